//! Branching processes of P/T nets: depth-bounded unfolding, the causal,
//! conflict and concurrency relations, cuts, and the mcut/ecut operators on
//! finite strategy prefixes.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::game::{Check, PetriGame};
use crate::net::{Marking, Node, PTNet, PlaceId, Transition, TransitionId};

/// Default cap on the number of nodes created by [`unfold_prefix`].
pub const DEFAULT_NODE_LIMIT: usize = 200_000;

/// An occurrence net together with a labelling into a base net.
///
/// Condition and event indices are assigned in a canonical order (by depth
/// layer, then label, then preset), so unfolding the same net twice yields
/// identical processes.
#[derive(Clone, Debug)]
pub struct BranchingProcess {
    occ: PTNet,
    place_label: Vec<PlaceId>,
    transition_label: Vec<TransitionId>,
    base: PTNet,
    /// `past[i]` holds every node `x` with `x <= i` (reflexive).
    past: Vec<FixedBitSet>,
    /// `hazards[i]`: transitions in direct conflict with some transition of `past[i]`.
    hazards: Vec<FixedBitSet>,
}

/// A set of pairwise concurrent places of a branching process.
pub type Cut = BTreeSet<PlaceId>;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PlaceType {
    One,
    Two,
}

impl PartialEq for BranchingProcess {
    fn eq(&self, other: &Self) -> bool {
        self.occ == other.occ
            && self.place_label == other.place_label
            && self.transition_label == other.transition_label
            && self.base == other.base
    }
}

impl BranchingProcess {
    /// Wraps a hand-built labelled net. Only the label vectors are checked
    /// here; see [`validate_branching_process`] for the occurrence-net axioms.
    pub fn new(
        occ: PTNet,
        place_label: Vec<PlaceId>,
        transition_label: Vec<TransitionId>,
        base: PTNet,
    ) -> Result<Self> {
        if place_label.len() != occ.num_places() || transition_label.len() != occ.num_transitions()
        {
            return Err(Error::Other("labelling does not cover every node".into()));
        }
        if let Some(p) = place_label.iter().find(|p| p.index() >= base.num_places()) {
            return Err(Error::InvalidMarking(p.0));
        }
        if let Some(t) = transition_label
            .iter()
            .find(|t| t.index() >= base.num_transitions())
        {
            return Err(Error::UnknownTransition(format!("{t:?}")));
        }
        let (past, hazards) = relations(&occ);
        Ok(BranchingProcess {
            occ,
            place_label,
            transition_label,
            base,
            past,
            hazards,
        })
    }

    pub fn net(&self) -> &PTNet {
        &self.occ
    }

    pub fn base(&self) -> &PTNet {
        &self.base
    }

    pub fn place_label(&self, p: PlaceId) -> PlaceId {
        self.place_label[p.index()]
    }

    pub fn transition_label(&self, t: TransitionId) -> TransitionId {
        self.transition_label[t.index()]
    }

    pub fn place_labels(&self) -> &[PlaceId] {
        &self.place_label
    }

    pub fn transition_labels(&self) -> &[TransitionId] {
        &self.transition_label
    }

    pub fn nodes(&self) -> impl Iterator<Item = Node> + '_ {
        self.occ
            .place_ids()
            .map(Node::Place)
            .chain(self.occ.transition_ids().map(Node::Transition))
    }

    /// Places of the occurrence net carrying the given base label.
    pub fn places_labelled(&self, name: &str) -> Vec<PlaceId> {
        let Some(b) = self.base.place(name) else {
            return Vec::new();
        };
        self.occ
            .place_ids()
            .filter(|p| self.place_label(*p) == b)
            .collect()
    }

    /// Transitions of the occurrence net carrying the given base label.
    pub fn transitions_labelled(&self, name: &str) -> Vec<TransitionId> {
        let Some(b) = self.base.transition_id(name) else {
            return Vec::new();
        };
        self.occ
            .transition_ids()
            .filter(|t| self.transition_label(*t) == b)
            .collect()
    }

    fn index(&self, x: Node) -> Result<usize> {
        let i = match x {
            Node::Place(p) if p.index() < self.occ.num_places() => p.index(),
            Node::Transition(t) if t.index() < self.occ.num_transitions() => {
                self.occ.num_places() + t.index()
            }
            _ => return Err(Error::UnknownNode(format!("{x:?}"))),
        };
        Ok(i)
    }

    /// `x <= y` in the reflexive-transitive flow order.
    pub fn causal_leq(&self, x: Node, y: Node) -> Result<bool> {
        Ok(self.past[self.index(y)?].contains(self.index(x)?))
    }

    /// Some place reaches `x` and `y` through different outgoing arcs.
    pub fn in_conflict(&self, x: Node, y: Node) -> Result<bool> {
        let (i, j) = (self.index(x)?, self.index(y)?);
        Ok(!self.hazards[i].is_disjoint(&self.past[j]))
    }

    /// Neither causally related nor in conflict.
    pub fn concurrent(&self, x: Node, y: Node) -> Result<bool> {
        Ok(x != y
            && !self.causal_leq(x, y)?
            && !self.causal_leq(y, x)?
            && !self.in_conflict(x, y)?)
    }

    fn places_concurrent(&self, a: PlaceId, b: PlaceId) -> bool {
        self.concurrent(Node::Place(a), Node::Place(b))
            .unwrap_or(false)
    }

    /// Base marking obtained by labelling a set of places.
    pub fn label_marking(&self, places: &Cut) -> Marking {
        places.iter().map(|p| self.place_label(*p)).collect()
    }

    /// Place labels of a cut as sorted names.
    pub fn label_names(&self, places: &Cut) -> Vec<String> {
        let mut v: Vec<String> = places
            .iter()
            .map(|p| self.base.place_name(self.place_label(*p)).to_string())
            .collect();
        v.sort();
        v
    }

    /// The initial cut, i.e. the places without a producer.
    pub fn initial_cut(&self) -> Cut {
        self.occ.initial_marking().support().copied().collect()
    }

    /// All cuts (maximal sets of pairwise concurrent places), sorted.
    pub fn enumerate_cuts(&self, limit: usize) -> Result<Vec<Cut>> {
        let all: Vec<PlaceId> = self.occ.place_ids().collect();
        self.cliques(BTreeSet::new(), all, limit)
    }

    /// All cuts containing `p`.
    pub fn cuts_containing(&self, p: PlaceId, limit: usize) -> Result<Vec<Cut>> {
        let cands = self
            .occ
            .place_ids()
            .filter(|q| self.places_concurrent(p, *q))
            .collect();
        self.cliques(BTreeSet::from([p]), cands, limit)
    }

    fn cliques(&self, r: Cut, p: Vec<PlaceId>, limit: usize) -> Result<Vec<Cut>> {
        let mut out = Vec::new();
        self.bron_kerbosch(r, p, Vec::new(), &mut out, limit)?;
        out.sort();
        Ok(out)
    }

    fn bron_kerbosch(
        &self,
        r: Cut,
        mut p: Vec<PlaceId>,
        mut x: Vec<PlaceId>,
        out: &mut Vec<Cut>,
        limit: usize,
    ) -> Result<()> {
        if p.is_empty() && x.is_empty() {
            if out.len() >= limit {
                return Err(Error::StateLimit(limit));
            }
            out.push(r);
            return Ok(());
        }
        let pivot = p
            .iter()
            .chain(&x)
            .copied()
            .max_by_key(|u| p.iter().filter(|v| self.places_concurrent(*u, **v)).count())
            .expect("p or x is non-empty");
        let branch: Vec<PlaceId> = p
            .iter()
            .copied()
            .filter(|v| !self.places_concurrent(pivot, *v))
            .collect();
        for v in branch {
            let mut r2 = r.clone();
            r2.insert(v);
            let p2 = p
                .iter()
                .copied()
                .filter(|u| self.places_concurrent(v, *u))
                .collect();
            let x2 = x
                .iter()
                .copied()
                .filter(|u| self.places_concurrent(v, *u))
                .collect();
            self.bron_kerbosch(r2, p2, x2, out, limit)?;
            p.retain(|u| *u != v);
            x.push(v);
        }
        Ok(())
    }

    /// `C <= C'` iff every place of `C` lies causally below some place of `C'`.
    pub fn cut_leq(&self, c: &Cut, d: &Cut) -> bool {
        c.iter().all(|x| {
            d.iter().any(|y| {
                self.causal_leq(Node::Place(*x), Node::Place(*y))
                    .unwrap_or(false)
            })
        })
    }

    /// Transitions that can fire in the future of `cut`, found by exploring
    /// the markings reachable from the cut.
    pub fn reachable_from(&self, cut: &Cut) -> BTreeSet<TransitionId> {
        let start: Marking = cut.iter().copied().collect();
        let mut seen = HashSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        let mut fired = BTreeSet::new();
        while let Some(m) = queue.pop_front() {
            for t in self.occ.enabled_transitions(&m).unwrap_or_default() {
                fired.insert(t);
                let next = self.occ.fire(&m, t).expect("enabled");
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        fired
    }

    fn check_env(&self, g: &PetriGame, p: PlaceId) -> Result<()> {
        if p.index() >= self.occ.num_places() {
            return Err(Error::UnknownNode(format!("{p:?}")));
        }
        if !g.is_env(self.place_label(p)) {
            return Err(Error::NotEnvironmentPlace(
                self.occ.place_name(p).to_string(),
            ));
        }
        Ok(())
    }

    /// Type of `q` in the `p`-cut `cut`. Type 1: every reachable transition
    /// consuming `q` lies above `p`. Type 2: no reachable transition in the
    /// future of `q` lies above `p`. When nothing consuming `q` is reachable
    /// both hold and type 2 is reported.
    pub fn classify_type(
        &self,
        g: &PetriGame,
        cut: &Cut,
        p: PlaceId,
        q: PlaceId,
    ) -> Result<Option<PlaceType>> {
        self.check_env(g, p)?;
        let reach = self.reachable_from(cut);
        Ok(self.classify_with(&reach, p, q))
    }

    fn classify_with(
        &self,
        reach: &BTreeSet<TransitionId>,
        p: PlaceId,
        q: PlaceId,
    ) -> Option<PlaceType> {
        let above_p = |t: TransitionId| {
            self.causal_leq(Node::Place(p), Node::Transition(t))
                .unwrap_or(false)
        };
        let consumers: Vec<TransitionId> = self
            .occ
            .consumers(q)
            .iter()
            .copied()
            .filter(|t| reach.contains(t))
            .collect();
        if consumers.is_empty() {
            return Some(PlaceType::Two);
        }
        if consumers.iter().all(|t| above_p(*t)) {
            return Some(PlaceType::One);
        }
        let future_clear = reach.iter().all(|t| {
            !self
                .causal_leq(Node::Place(q), Node::Transition(*t))
                .unwrap_or(false)
                || !above_p(*t)
        });
        future_clear.then_some(PlaceType::Two)
    }

    /// Types of all places of a `p`-cut, or `None` if some place is untyped.
    pub fn cut_types(
        &self,
        g: &PetriGame,
        cut: &Cut,
        p: PlaceId,
    ) -> Result<Option<BTreeMap<PlaceId, PlaceType>>> {
        self.check_env(g, p)?;
        let reach = self.reachable_from(cut);
        let mut out = BTreeMap::new();
        for q in cut {
            match self.classify_with(&reach, p, *q) {
                Some(ty) => {
                    out.insert(*q, ty);
                }
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }

    /// The least `p`-cut in which every place has a type.
    pub fn compute_mcut(&self, g: &PetriGame, p: PlaceId) -> Result<Cut> {
        self.check_env(g, p)?;
        let name = || self.occ.place_name(p).to_string();
        let mut typed = Vec::new();
        for c in self.cuts_containing(p, 100_000)? {
            if self.cut_types(g, &c, p)?.is_some() {
                typed.push(c);
            }
        }
        let minimal: Vec<&Cut> = typed
            .iter()
            .filter(|c| !typed.iter().any(|d| d != *c && self.cut_leq(d, c)))
            .collect();
        match minimal.as_slice() {
            [] => Err(Error::PrefixTooShallow(name())),
            [c] => Ok((*c).clone()),
            _ => Err(Error::AmbiguousMcut(name())),
        }
    }

    /// The cut reached by firing `t` at `mcut(p)`.
    pub fn compute_ecut(&self, g: &PetriGame, p: PlaceId, t: TransitionId) -> Result<Cut> {
        let mcut = self.compute_mcut(g, p)?;
        if t.index() >= self.occ.num_transitions() {
            return Err(Error::UnknownNode(format!("{t:?}")));
        }
        let pre = self.occ.pre(t);
        if !pre.contains(&p) || !pre.support().all(|q| mcut.contains(q)) {
            return Err(Error::NotEnabled(self.occ.transition_name(t).to_string()));
        }
        let mut out: Cut = mcut.into_iter().filter(|q| !pre.contains(q)).collect();
        out.extend(self.occ.post(t).support().copied());
        Ok(out)
    }
}

/// Computes reflexive pasts and conflict hazards for every node. Works on any
/// net, so hand-built (possibly malformed) processes can still be inspected.
fn relations(net: &PTNet) -> (Vec<FixedBitSet>, Vec<FixedBitSet>) {
    let np = net.num_places();
    let n = np + net.num_transitions();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for t in net.transition_ids() {
        for p in net.pre(t).support() {
            preds[np + t.index()].push(p.index());
        }
        for p in net.post(t).support() {
            preds[p.index()].push(np + t.index());
        }
    }
    let mut past = Vec::with_capacity(n);
    for i in 0..n {
        let mut set = FixedBitSet::with_capacity(n);
        let mut stack = vec![i];
        set.insert(i);
        while let Some(j) = stack.pop() {
            for &k in &preds[j] {
                if !set.put(k) {
                    stack.push(k);
                }
            }
        }
        past.push(set);
    }
    // direct[t]: transitions sharing a precondition place with t
    let mut direct = vec![FixedBitSet::with_capacity(n); net.num_transitions()];
    for p in net.place_ids() {
        let cons = net.consumers(p);
        for &a in cons {
            for &b in cons {
                if a != b {
                    direct[a.index()].insert(np + b.index());
                }
            }
        }
    }
    let hazards = past
        .iter()
        .map(|set| {
            let mut h = FixedBitSet::with_capacity(n);
            for j in set.ones().filter(|j| *j >= np) {
                h.union_with(&direct[j - np]);
            }
            h
        })
        .collect();
    (past, hazards)
}

struct Cond {
    label: PlaceId,
    producer: Option<usize>,
    depth: u32,
    /// Conditions consumed in the causal past, with the consuming event.
    anc: BTreeMap<usize, usize>,
}

struct Event {
    label: TransitionId,
    preset: Vec<usize>,
    postset: Vec<usize>,
}

fn conds_concurrent(a: &Cond, ai: usize, b: &Cond, bi: usize) -> bool {
    if ai == bi || a.anc.contains_key(&bi) || b.anc.contains_key(&ai) {
        return false;
    }
    let (small, large) = if a.anc.len() <= b.anc.len() {
        (a, b)
    } else {
        (b, a)
    };
    small
        .anc
        .iter()
        .all(|(r, e)| large.anc.get(r).is_none_or(|f| f == e))
}

/// Unfolds `base` up to `depth` transition layers. Every token is a separate
/// condition, so nets with several tokens on a place unfold as well.
pub fn unfold_prefix(base: &PTNet, depth: u32) -> Result<BranchingProcess> {
    unfold_prefix_limited(base, depth, DEFAULT_NODE_LIMIT)
}

pub fn unfold_prefix_limited(base: &PTNet, depth: u32, limit: usize) -> Result<BranchingProcess> {
    let mut conds: Vec<Cond> = Vec::new();
    let mut events: Vec<Event> = Vec::new();
    for (p, n) in base.initial_marking().iter() {
        for _ in 0..n {
            conds.push(Cond {
                label: *p,
                producer: None,
                depth: 0,
                anc: BTreeMap::new(),
            });
        }
    }
    for layer in 1..=depth {
        let mut by_label: BTreeMap<PlaceId, Vec<usize>> = BTreeMap::new();
        for (i, c) in conds.iter().enumerate() {
            by_label.entry(c.label).or_default().push(i);
        }
        let mut fresh: Vec<(TransitionId, Vec<usize>)> = Vec::new();
        for t in base.transition_ids() {
            let groups: Vec<(Vec<usize>, u32)> = base
                .pre(t)
                .iter()
                .map(|(p, n)| (by_label.get(p).cloned().unwrap_or_default(), n))
                .collect();
            let mut chosen = Vec::new();
            co_sets(
                &conds,
                &groups,
                0,
                0,
                &mut chosen,
                &mut |set: &[usize]| {
                    if set.iter().map(|c| conds[*c].depth).max() == Some(layer - 1) {
                        let mut s = set.to_vec();
                        s.sort_unstable();
                        fresh.push((t, s));
                    }
                },
            );
        }
        if fresh.is_empty() {
            break;
        }
        fresh.sort();
        for (t, preset) in fresh {
            let e = events.len();
            let mut anc = BTreeMap::new();
            for &c in &preset {
                anc.extend(conds[c].anc.iter().map(|(k, v)| (*k, *v)));
                anc.insert(c, e);
            }
            let mut postset = Vec::new();
            for (p, n) in base.post(t).iter() {
                for _ in 0..n {
                    postset.push(conds.len());
                    conds.push(Cond {
                        label: *p,
                        producer: Some(e),
                        depth: layer,
                        anc: anc.clone(),
                    });
                }
            }
            events.push(Event {
                label: t,
                preset,
                postset,
            });
            if conds.len() + events.len() > limit {
                return Err(Error::StateLimit(limit));
            }
        }
    }
    build_process(base, &conds, &events)
}

/// Enumerates co-sets picking `n` conditions from each group, in index order.
fn co_sets(
    conds: &[Cond],
    groups: &[(Vec<usize>, u32)],
    g: usize,
    from: usize,
    chosen: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    let Some((cands, need)) = groups.get(g) else {
        emit(chosen);
        return;
    };
    let taken_here = chosen.len() - groups[..g].iter().map(|(_, n)| *n as usize).sum::<usize>();
    if taken_here == *need as usize {
        co_sets(conds, groups, g + 1, 0, chosen, emit);
        return;
    }
    for (k, &c) in cands.iter().enumerate().skip(from) {
        if chosen
            .iter()
            .all(|&d| conds_concurrent(&conds[c], c, &conds[d], d))
        {
            chosen.push(c);
            co_sets(conds, groups, g, k + 1, chosen, emit);
            chosen.pop();
        }
    }
}

fn build_process(base: &PTNet, conds: &[Cond], events: &[Event]) -> Result<BranchingProcess> {
    let places = conds
        .iter()
        .enumerate()
        .map(|(i, c)| format!("{}@{}", base.place_name(c.label), i))
        .collect();
    let transitions: Vec<Transition> = events
        .iter()
        .enumerate()
        .map(|(i, e)| Transition {
            name: format!("{}@{}", base.transition_name(e.label), i),
            pre: e.preset.iter().map(|c| PlaceId(*c as u32)).collect(),
            post: e.postset.iter().map(|c| PlaceId(*c as u32)).collect(),
        })
        .collect();
    let initial: Marking = conds
        .iter()
        .enumerate()
        .filter(|(_, c)| c.producer.is_none())
        .map(|(i, _)| PlaceId(i as u32))
        .collect();
    let occ = PTNet::from_parts(places, transitions, initial)?;
    BranchingProcess::new(
        occ,
        conds.iter().map(|c| c.label).collect(),
        events.iter().map(|e| e.label).collect(),
        base.clone(),
    )
}

/// Checks the occurrence-net and labelling axioms of a branching process.
pub fn validate_branching_process(bp: &BranchingProcess) -> Vec<Check> {
    let occ = &bp.occ;
    let base = &bp.base;
    let mut checks = Vec::new();
    let mut push = |name: &'static str, bad: Vec<String>| {
        checks.push(Check {
            name,
            ok: bad.is_empty(),
            detail: bad.join(", "),
        })
    };

    push(
        "single_producer",
        occ.place_ids()
            .filter(|p| occ.producers(*p).len() > 1)
            .map(|p| occ.place_name(p).to_string())
            .collect(),
    );
    push(
        "set_flow",
        occ.transition_ids()
            .filter(|t| occ.pre(*t).max_count() > 1 || occ.post(*t).max_count() > 1)
            .map(|t| occ.transition_name(t).to_string())
            .collect(),
    );
    push(
        "acyclic",
        occ.transition_ids()
            .filter(|t| {
                occ.post(*t).support().any(|p| {
                    bp.causal_leq(Node::Place(*p), Node::Transition(*t))
                        .unwrap_or(false)
                })
            })
            .map(|t| occ.transition_name(t).to_string())
            .collect(),
    );
    push(
        "no_self_conflict",
        occ.transition_ids()
            .filter(|t| {
                bp.in_conflict(Node::Transition(*t), Node::Transition(*t))
                    .unwrap_or(false)
            })
            .map(|t| occ.transition_name(t).to_string())
            .collect(),
    );
    push(
        "homomorphism",
        occ.transition_ids()
            .filter(|t| {
                let l = bp.transition_label(*t);
                occ.pre(*t).map(|p| bp.place_label(*p)) != *base.pre(l)
                    || occ.post(*t).map(|p| bp.place_label(*p)) != *base.post(l)
            })
            .map(|t| occ.transition_name(t).to_string())
            .collect(),
    );
    let mut seen = BTreeMap::new();
    let mut dup = Vec::new();
    for t in occ.transition_ids() {
        if let Some(other) = seen.insert((occ.pre(t).clone(), bp.transition_label(t)), t) {
            dup.push(format!(
                "{} / {}",
                occ.transition_name(other),
                occ.transition_name(t)
            ));
        }
    }
    push("injective", dup);
    let minimal: Marking = occ
        .place_ids()
        .filter(|p| occ.producers(*p).is_empty())
        .collect();
    push(
        "initial_is_minimal",
        if minimal == *occ.initial_marking() {
            Vec::new()
        } else {
            vec![format!(
                "initial {} vs minimal {}",
                occ.show_marking(occ.initial_marking()),
                occ.show_marking(&minimal)
            )]
        },
    );
    push(
        "initial_homomorphism",
        if occ.initial_marking().map(|p| bp.place_label(*p)) == *base.initial_marking() {
            Vec::new()
        } else {
            vec!["initial marking does not label onto the base initial marking".into()]
        },
    );
    checks
}
