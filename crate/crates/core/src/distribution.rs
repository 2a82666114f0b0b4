//! Slices of concurrency-preserving nets, local controllers and the
//! isomorphism check between a strategy and its distributed version.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::game::PetriGame;
use crate::io::LabelledNet;
use crate::net::{Marking, PTNet, PlaceId, TransitionId};
use crate::strategy::StrategyNet;

/// The course of one token through a net.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slice {
    pub net: PTNet,
    /// Host places and transitions, in host order.
    pub places: Vec<PlaceId>,
    pub transitions: Vec<TransitionId>,
    pub environment: bool,
}

/// A one-token controller; labels map into the game net (weakly: a
/// controller only sees its own share of a joint transition).
pub type LocalController = LabelledNet;

#[derive(Clone, Debug)]
struct Uf(Vec<usize>);

impl Uf {
    fn find(&self, mut x: usize) -> usize {
        while self.0[x] != x {
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.0[hi] = lo;
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for i in 0..=rest.len() {
            let mut v = rest.clone();
            v.insert(i, n - 1);
            out.push(v);
        }
    }
    out.sort();
    out
}

struct Decomposer<'n> {
    net: &'n PTNet,
    /// Per transition: pre and post places split into (environment, system).
    groups: Vec<[(Vec<usize>, Vec<usize>); 2]>,
    initial: Vec<bool>,
}

impl Decomposer<'_> {
    fn consistent(&self, uf: &Uf) -> bool {
        let mut initial_in = HashMap::new();
        for (p, init) in self.initial.iter().enumerate() {
            if *init && initial_in.insert(uf.find(p), p).is_some() {
                return false;
            }
        }
        self.net.transition_ids().all(|t| {
            [self.net.pre(t), self.net.post(t)].iter().all(|m| {
                let roots: BTreeSet<usize> = m.support().map(|p| uf.find(p.index())).collect();
                roots.len() == m.support_len()
            })
        })
    }

    fn search(&self, i: usize, uf: Uf) -> Option<Uf> {
        if i == self.groups.len() {
            return Some(uf);
        }
        let [env, sys] = &self.groups[i];
        let pe = permutations(env.0.len());
        let ps = permutations(sys.0.len());
        for a in &pe {
            for b in &ps {
                let mut next = uf.clone();
                for (k, j) in a.iter().enumerate() {
                    next.union(env.0[k], env.1[*j]);
                }
                for (k, j) in b.iter().enumerate() {
                    next.union(sys.0[k], sys.1[*j]);
                }
                if self.consistent(&next) {
                    if let Some(done) = self.search(i + 1, next) {
                        return Some(done);
                    }
                }
            }
        }
        None
    }
}

/// Splits a safe, concurrency-preserving net into one slice per initial
/// token. `environment` are the environment places of `net`.
pub fn decompose_slices(net: &PTNet, environment: &BTreeSet<PlaceId>) -> Result<Vec<Slice>> {
    if let Some(t) = net
        .transition_ids()
        .find(|t| net.pre(*t).len() != net.post(*t).len())
    {
        return Err(Error::NotConcurrencyPreserving(
            net.transition_name(t).to_string(),
        ));
    }
    let m0 = net.initial_marking();
    if m0.max_count() > 1 {
        return Err(Error::Decomposition("initial marking is not safe".into()));
    }
    let mut groups = Vec::new();
    for t in net.transition_ids() {
        let split = |m: &Marking, env: bool| -> Vec<usize> {
            m.iter()
                .flat_map(|(p, n)| std::iter::repeat_n(p.index(), n as usize))
                .filter(|p| environment.contains(&PlaceId(*p as u32)) == env)
                .collect()
        };
        let (pe, qe) = (split(net.pre(t), true), split(net.post(t), true));
        let (ps, qs) = (split(net.pre(t), false), split(net.post(t), false));
        if pe.len() != qe.len() || ps.len() != qs.len() {
            return Err(Error::Decomposition(format!(
                "{} moves tokens between environment and system places",
                net.transition_name(t)
            )));
        }
        groups.push([(pe, qe), (ps, qs)]);
    }
    let d = Decomposer {
        net,
        groups,
        initial: net.place_ids().map(|p| m0.count(&p) > 0).collect(),
    };
    let uf = d
        .search(0, Uf((0..net.num_places()).collect()))
        .ok_or_else(|| {
            Error::Decomposition("no token-consistent pairing of pre- and postsets".into())
        })?;
    let mut components: BTreeMap<usize, Vec<PlaceId>> = BTreeMap::new();
    for p in net.place_ids() {
        components.entry(uf.find(p.index())).or_default().push(p);
    }
    let mut slices = Vec::new();
    for places in components.values() {
        let inits = places.iter().filter(|p| m0.count(p) > 0).count();
        if inits != 1 {
            return Err(Error::Decomposition(format!(
                "places {} are not reachable from exactly one initial token",
                places
                    .iter()
                    .map(|p| net.place_name(*p))
                    .collect::<Vec<_>>()
                    .join(", ")
            )));
        }
        let env = places
            .iter()
            .map(|p| environment.contains(p))
            .collect::<BTreeSet<_>>();
        if env.len() > 1 {
            return Err(Error::Decomposition(
                "slice mixes system and environment places".into(),
            ));
        }
        let set: BTreeSet<PlaceId> = places.iter().copied().collect();
        let transitions: Vec<TransitionId> = net
            .transition_ids()
            .filter(|t| {
                net.pre(*t)
                    .support()
                    .chain(net.post(*t).support())
                    .any(|p| set.contains(p))
            })
            .collect();
        let names: BTreeSet<String> = places
            .iter()
            .map(|p| net.place_name(*p).to_string())
            .chain(
                transitions
                    .iter()
                    .map(|t| net.transition_name(*t).to_string()),
            )
            .collect();
        slices.push(Slice {
            net: net.restrict(&names),
            places: places.clone(),
            transitions,
            environment: env.contains(&true),
        });
    }
    slices.sort_by_key(|s| (!s.environment, s.places.clone()));
    Ok(slices)
}

/// One controller per slice of the strategy, keeping the strategy's
/// transition names so that composition synchronizes on shared ones.
pub fn to_local_controllers(g: &PetriGame, s: &StrategyNet) -> Result<Vec<LocalController>> {
    let env: BTreeSet<PlaceId> = s
        .net
        .place_ids()
        .filter(|p| g.is_env(s.place_label[p.index()]))
        .collect();
    let slices = decompose_slices(&s.net, &env)?;
    Ok(slices
        .into_iter()
        .map(|sl| LocalController {
            place_label: sl.places.iter().map(|p| s.place_label[p.index()]).collect(),
            transition_label: sl
                .net
                .transition_ids()
                .map(|t| {
                    let host = s
                        .net
                        .transition_id(sl.net.transition_name(t))
                        .expect("kept name");
                    s.transition_label[host.index()]
                })
                .collect(),
            net: sl.net,
        })
        .collect())
}

/// Containment of images: each controller transition sees part of the
/// pre- and postset of its label.
pub fn is_weak_homomorphism(c: &LocalController, base: &PTNet) -> bool {
    c.net.transition_ids().all(|t| {
        let b = c.transition_label[t.index()];
        let lab = |m: &Marking| m.map(|p| c.place_label[p.index()]);
        lab(c.net.pre(t)).is_subset(base.pre(b)) && lab(c.net.post(t)).is_subset(base.post(b))
    })
}

/// The reachable part of a labelled net.
pub fn trim_reachable(ln: &LabelledNet, state_limit: usize) -> Result<LabelledNet> {
    let rg = ln.net.reachable_markings(state_limit)?;
    let mut names: BTreeSet<String> = BTreeSet::new();
    for m in &rg.markings {
        names.extend(m.support().map(|p| ln.net.place_name(*p).to_string()));
    }
    for (_, t, _) in &rg.edges {
        names.insert(ln.net.transition_name(*t).to_string());
    }
    let net = ln.net.restrict(&names);
    Ok(LabelledNet {
        place_label: net
            .place_ids()
            .map(|p| ln.place_label[ln.net.place(net.place_name(p)).expect("kept").index()])
            .collect(),
        transition_label: net
            .transition_ids()
            .map(|t| {
                ln.transition_label[ln
                    .net
                    .transition_id(net.transition_name(t))
                    .expect("kept")
                    .index()]
            })
            .collect(),
        net,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributionReport {
    pub ok: bool,
    /// Strategy place and transition names mapped to composition names.
    pub places: BTreeMap<String, String>,
    pub transitions: BTreeMap<String, String>,
    pub witness: Option<String>,
}

struct Iso<'n> {
    a: &'n LabelledNet,
    b: &'n LabelledNet,
    pmap: HashMap<PlaceId, PlaceId>,
    pused: HashMap<PlaceId, PlaceId>,
    tmap: HashMap<TransitionId, TransitionId>,
    tused: HashMap<TransitionId, TransitionId>,
    witness: Option<String>,
}

impl Iso<'_> {
    fn plabel_ok(&self, x: PlaceId, y: PlaceId) -> bool {
        self.a.place_label[x.index()] == self.b.place_label[y.index()]
    }

    /// Maps the places of `xs` onto `ys` (both with multiplicities), then continues.
    fn bind(
        &mut self,
        xs: &[PlaceId],
        ys: &[PlaceId],
        k: impl Fn(&mut Self) -> bool + Copy,
    ) -> bool {
        let Some((&x, xrest)) = xs.split_first() else {
            return k(self);
        };
        if let Some(&y) = self.pmap.get(&x) {
            let Some(i) = ys.iter().position(|z| *z == y) else {
                return false;
            };
            let mut yrest = ys.to_vec();
            yrest.remove(i);
            return self.bind(xrest, &yrest, k);
        }
        for i in 0..ys.len() {
            let y = ys[i];
            if self.pused.contains_key(&y) || !self.plabel_ok(x, y) || ys[..i].contains(&y) {
                continue;
            }
            self.pmap.insert(x, y);
            self.pused.insert(y, x);
            let mut yrest = ys.to_vec();
            yrest.remove(i);
            if self.bind(xrest, &yrest, k) {
                return true;
            }
            self.pmap.remove(&x);
            self.pused.remove(&y);
        }
        false
    }

    fn expand(m: &Marking) -> Vec<PlaceId> {
        m.iter()
            .flat_map(|(p, n)| std::iter::repeat_n(*p, n as usize))
            .collect()
    }

    fn step(&mut self) -> bool {
        let (a, b) = (self.a, self.b);
        let next = a.net.transition_ids().find(|t| {
            !self.tmap.contains_key(t) && a.net.pre(*t).support().all(|p| self.pmap.contains_key(p))
        });
        let Some(t) = next else {
            let done = self.tmap.len() == a.net.num_transitions()
                && self.pmap.len() == a.net.num_places()
                && a.net.num_transitions() == b.net.num_transitions()
                && a.net.num_places() == b.net.num_places();
            if !done && self.witness.is_none() {
                self.witness = Some(format!(
                    "sizes differ: strategy {}/{} places/transitions, composition {}/{}",
                    a.net.num_places(),
                    a.net.num_transitions(),
                    b.net.num_places(),
                    b.net.num_transitions()
                ));
            }
            return done;
        };
        let image: Marking = a.net.pre(t).map(|p| self.pmap[p]);
        let cands: Vec<TransitionId> = b
            .net
            .transition_ids()
            .filter(|u| {
                !self.tused.contains_key(u)
                    && a.transition_label[t.index()] == b.transition_label[u.index()]
                    && *b.net.pre(*u) == image
            })
            .collect();
        if cands.is_empty() && self.witness.is_none() {
            self.witness = Some(format!(
                "no counterpart for transition {}",
                a.net.transition_name(t)
            ));
        }
        for u in cands {
            self.tmap.insert(t, u);
            self.tused.insert(u, t);
            let xs = Self::expand(a.net.post(t));
            let ys = Self::expand(b.net.post(u));
            if xs.len() == ys.len() && self.bind(&xs, &ys, |s| s.step()) {
                return true;
            }
            self.tmap.remove(&t);
            self.tused.remove(&u);
        }
        false
    }
}

/// Composes the controllers and searches a label-preserving isomorphism
/// between the reachable parts of the composition and of the strategy.
pub fn check_distribution(
    s: &StrategyNet,
    controllers: &[LocalController],
    state_limit: usize,
) -> Result<DistributionReport> {
    let nets: Vec<PTNet> = controllers.iter().map(|c| c.net.clone()).collect();
    let composed = PTNet::parallel_compose(&nets)?;
    let mut place_label = Vec::new();
    let mut tlabel: HashMap<String, TransitionId> = HashMap::new();
    for c in controllers {
        place_label.extend(c.place_label.iter().copied());
        for t in c.net.transition_ids() {
            let l = c.transition_label[t.index()];
            if let Some(prev) = tlabel.insert(c.net.transition_name(t).to_string(), l) {
                if prev != l {
                    return Ok(DistributionReport {
                        ok: false,
                        places: BTreeMap::new(),
                        transitions: BTreeMap::new(),
                        witness: Some(format!(
                            "transition {} carries two labels",
                            c.net.transition_name(t)
                        )),
                    });
                }
            }
        }
    }
    let transition_label = composed
        .transition_ids()
        .map(|t| tlabel[composed.transition_name(t)])
        .collect();
    let comp = trim_reachable(
        &LabelledNet {
            net: composed,
            place_label,
            transition_label,
        },
        state_limit,
    )?;
    let strat = trim_reachable(s, state_limit)?;
    let mut iso = Iso {
        a: &strat,
        b: &comp,
        pmap: HashMap::new(),
        pused: HashMap::new(),
        tmap: HashMap::new(),
        tused: HashMap::new(),
        witness: None,
    };
    let xs = Iso::expand(strat.net.initial_marking());
    let ys = Iso::expand(comp.net.initial_marking());
    let ok = xs.len() == ys.len() && iso.bind(&xs, &ys, |s| s.step());
    if !ok && iso.witness.is_none() {
        iso.witness = Some("initial markings differ".into());
    }
    let (places, transitions) = if ok {
        (
            iso.pmap
                .iter()
                .map(|(x, y)| {
                    (
                        strat.net.place_name(*x).to_string(),
                        comp.net.place_name(*y).to_string(),
                    )
                })
                .collect(),
            iso.tmap
                .iter()
                .map(|(x, y)| {
                    (
                        strat.net.transition_name(*x).to_string(),
                        comp.net.transition_name(*y).to_string(),
                    )
                })
                .collect(),
        )
    } else {
        (BTreeMap::new(), BTreeMap::new())
    };
    Ok(DistributionReport {
        ok,
        places,
        transitions,
        witness: if ok { None } else { iso.witness },
    })
}
