//! Strategy nets: extraction from a solved decision game, independent
//! verification, decision sets of cuts and seeded play simulation.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decision::{
    Commitment, DecisionGame, DecisionSet, Entry, GameGraph, Move, Outcome, P0Reason, Player,
};
use crate::error::{Error, Result};
use crate::game::{Check, PetriGame};
use crate::multiset::Multiset;
use crate::net::{Marking, PTNet, PlaceId, Transition, TransitionId};
use crate::solver::Solution;
use crate::unfolding::{unfold_prefix, BranchingProcess, Cut, PlaceType};

pub use crate::io::LabelledNet as StrategyNet;

/// Strategy place index during construction.
type Sp = u32;
/// Tokens of the current position with their entries as the game sees them.
type Frontier = Vec<(Sp, Entry)>;

struct Builder<'x, 'a> {
    dg: &'x DecisionGame<'a>,
    gg: &'x GameGraph,
    sol: &'x Solution,
    place_label: Vec<PlaceId>,
    fixed: Vec<Option<Entry>>,
    parent: Vec<Sp>,
    trans: Vec<(TransitionId, Vec<Sp>, Vec<Sp>)>,
    tindex: HashMap<(Vec<Sp>, TransitionId), usize>,
    memo: HashSet<(usize, Frontier)>,
    memo2: HashSet<(Marking, Frontier)>,
}

impl Builder<'_, '_> {
    fn find(&mut self, mut x: Sp) -> Sp {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
        }
        x
    }

    fn canon(&mut self, f: &Frontier) -> Frontier {
        let mut out: Frontier = f.iter().map(|(s, e)| (self.find(*s), e.clone())).collect();
        out.sort();
        out
    }

    fn new_place(&mut self, label: PlaceId, fixed: Option<Entry>) -> Sp {
        let id = self.place_label.len() as Sp;
        self.place_label.push(label);
        self.fixed.push(fixed);
        self.parent.push(id);
        id
    }

    /// Identifies the tokens of `f` that are not in the earlier frontier
    /// `earlier` with the ones of `earlier`, entry by entry.
    fn merge(&mut self, f: &Frontier, earlier: &Frontier) -> Result<()> {
        let now: BTreeSet<Sp> = f.iter().map(|(s, _)| *s).collect();
        let then: BTreeSet<Sp> = earlier.iter().map(|(s, _)| *s).collect();
        let mut fresh: BTreeMap<&Entry, Vec<Sp>> = BTreeMap::new();
        for (s, e) in f.iter().filter(|(s, _)| !then.contains(s)) {
            fresh.entry(e).or_default().push(*s);
        }
        let mut old: BTreeMap<&Entry, Vec<Sp>> = BTreeMap::new();
        for (s, e) in earlier.iter().filter(|(s, _)| !now.contains(s)) {
            old.entry(e).or_default().push(*s);
        }
        if fresh
            .iter()
            .map(|(e, v)| (*e, v.len()))
            .ne(old.iter().map(|(e, v)| (*e, v.len())))
        {
            return Err(Error::Other(
                "revisited state with a different token multiset".into(),
            ));
        }
        for (e, qs) in &fresh {
            for (q, p) in qs.iter().zip(&old[e]) {
                self.parent[*q as usize] = *p;
            }
        }
        Ok(())
    }

    /// Fires `t` consuming the lowest-numbered tokens carrying `consumed`.
    fn fire(&mut self, f: &Frontier, t: TransitionId, consumed: &Multiset<Entry>) -> Frontier {
        let mut need = consumed.clone();
        let mut pre = Vec::new();
        let mut rest = Vec::new();
        for (s, e) in f {
            if need.count(e) > 0 {
                need.remove(e, 1);
                pre.push(*s);
            } else {
                rest.push((*s, e.clone()));
            }
        }
        pre.sort_unstable();
        let net = &self.dg.game.net;
        let post = match self.tindex.get(&(pre.clone(), t)) {
            Some(&i) => self.trans[i].2.clone(),
            None => {
                let mut post = Vec::new();
                for (q, n) in net.post(t).iter() {
                    for _ in 0..n {
                        let fixed = self.dg.game.is_env(*q).then(|| self.dg.env_entry(*q));
                        post.push(self.new_place(*q, fixed));
                    }
                }
                self.tindex.insert((pre.clone(), t), self.trans.len());
                self.trans.push((t, pre, post.clone()));
                post
            }
        };
        for s in post {
            let s = self.find(s);
            let q = self.place_label[s as usize];
            let e = if self.dg.game.is_env(q) {
                self.dg.env_entry(q)
            } else {
                Entry {
                    place: q,
                    ty: 1,
                    commit: Commitment::Top,
                }
            };
            rest.push((s, e));
        }
        rest.sort();
        rest
    }

    /// Hands the resolved entries to the pending tokens of `f`, respecting
    /// entries already fixed for reused places.
    fn assign(
        &self,
        f: &Frontier,
        resolved: &Multiset<Entry>,
    ) -> Option<(Frontier, Vec<(Sp, Entry)>)> {
        let mut left = resolved.clone();
        let mut out = Vec::new();
        let mut newly = Vec::new();
        let mut open = Vec::new();
        for (s, e) in f {
            if !e.is_top() {
                out.push((*s, e.clone()));
            } else if let Some(fx) = &self.fixed[*s as usize] {
                if left.remove(fx, 1) == 0 {
                    return None;
                }
                out.push((*s, fx.clone()));
            } else {
                open.push(*s);
            }
        }
        for s in open {
            let q = self.place_label[s as usize];
            let e = left.support().find(|e| e.place == q)?.clone();
            left.remove(&e, 1);
            newly.push((s, e.clone()));
            out.push((s, e));
        }
        if !left.is_empty() {
            return None;
        }
        out.sort();
        Some((out, newly))
    }

    fn explore(&mut self, v: usize, f: Frontier, path: &mut Vec<(usize, Frontier)>) -> Result<()> {
        let f = self.canon(&f);
        if self.memo.contains(&(v, f.clone())) {
            return Ok(());
        }
        let ds: DecisionSet = f.iter().map(|(_, e)| e.clone()).collect();
        if !DecisionGame::has_top(&ds) {
            if let Some((_, earlier)) = path.iter().rev().find(|(w, _)| *w == v) {
                let earlier = self.canon(&earlier.clone());
                return self.merge(&f, &earlier);
            }
        }
        self.memo.insert((v, f.clone()));
        match self.gg.outcome[v] {
            Outcome::P0Win(P0Reason::Termination) => return Ok(()),
            Outcome::P0Win(P0Reason::TypeTwo) => return self.type_two(f),
            Outcome::P1Win(r) => {
                return Err(Error::Other(format!(
                    "strategy reaches a losing state ({r:?})"
                )))
            }
            Outcome::NonTerminal => {}
        }
        path.push((v, f.clone()));
        let succ: Vec<(usize, usize)> = self.gg.successors(v).collect();
        if DecisionGame::has_top(&ds) {
            let mut chosen = None;
            for (e, w) in succ {
                if self.sol.attractor[w] {
                    continue;
                }
                let Move::Resolve { resolved } = &self.gg.edges[e].1 else {
                    continue;
                };
                if let Some(a) = self.assign(&f, resolved) {
                    chosen = Some((w, a));
                    break;
                }
            }
            let (w, (f2, newly)) = chosen.ok_or_else(|| {
                Error::Other("no winning resolution consistent with earlier choices".into())
            })?;
            for (s, e) in newly {
                self.fixed[s as usize] = Some(e);
            }
            self.explore(w, f2, path)?;
        } else {
            let edges: Vec<usize> = match self.gg.owner[v] {
                Player::Player1 => succ.iter().map(|(e, _)| *e).collect(),
                Player::Player0 => vec![self.sol.p0_choice[v].ok_or_else(|| {
                    Error::Other("winning Player-0 state without a choice".into())
                })?],
            };
            for e in edges {
                let (_, mv, w) = self.gg.edges[e].clone();
                let Move::Fire {
                    transition,
                    consumed,
                } = mv
                else {
                    return Err(Error::Other("resolution move at a resolved state".into()));
                };
                let cur = self.canon(&f);
                let f2 = self.fire(&cur, transition, &consumed);
                self.explore(w, f2, path)?;
            }
        }
        path.pop();
        Ok(())
    }

    /// Continues the type-2 tokens on their own once the environment is done.
    fn type_two(&mut self, f: Frontier) -> Result<()> {
        let dg = self.dg;
        let net = &dg.game.net;
        let ctx: Marking = f
            .iter()
            .filter(|(_, e)| e.ty != 2)
            .map(|(_, e)| e.place)
            .collect();
        let mut two: Frontier = f.into_iter().filter(|(_, e)| e.ty == 2).collect();
        let mut path: Vec<(DecisionSet, Frontier)> = Vec::new();
        loop {
            two = self.canon(&two);
            if !self.memo2.insert((ctx.clone(), two.clone())) {
                return Ok(());
            }
            let xs: DecisionSet = two.iter().map(|(_, e)| e.clone()).collect();
            if let Some((_, earlier)) = path.iter().rev().find(|(d, _)| *d == xs) {
                let earlier = self.canon(&earlier.clone());
                return self.merge(&two, &earlier);
            }
            let m = ctx.sum(&DecisionGame::marking(&xs));
            if net.enabled_transitions(&m)?.is_empty() {
                return Ok(());
            }
            let (t, inst) = dg
                .instantiations(&xs, 2)
                .into_iter()
                .next()
                .ok_or_else(|| Error::Other("type-2 part is stuck".into()))?;
            path.push((xs, two.clone()));
            let fired = self.fire(&two, t, &inst);
            let pending: DecisionSet = fired.iter().map(|(_, e)| e.clone()).collect();
            let mut chosen = None;
            for (r, next) in dg.resolutions(&pending) {
                if r.support().any(|e| e.ty != 2) || !dg.in_d(&ctx, &next) {
                    continue;
                }
                if let Some(a) = self.assign(&fired, &r) {
                    chosen = Some(a);
                    break;
                }
            }
            let (f2, newly) = chosen.ok_or_else(|| {
                Error::Other("no type-2 resolution consistent with earlier choices".into())
            })?;
            for (s, e) in newly {
                self.fixed[s as usize] = Some(e);
            }
            two = f2;
        }
    }

    fn finish(mut self, initial: &[Sp]) -> Result<StrategyNet> {
        let base = &self.dg.game.net;
        let n = self.place_label.len() as Sp;
        let roots: Vec<Sp> = (0..n).filter(|s| self.find(*s) == *s).collect();
        let index: HashMap<Sp, u32> = roots
            .iter()
            .enumerate()
            .map(|(i, s)| (*s, i as u32))
            .collect();
        let mut counts: HashMap<String, u32> = HashMap::new();
        let mut fresh = |label: &str| -> String {
            let k = counts.entry(label.to_string()).or_insert(0);
            *k += 1;
            if *k == 1 {
                label.to_string()
            } else {
                format!("{label}#{}", *k - 1)
            }
        };
        let place_names: Vec<String> = roots
            .iter()
            .map(|s| fresh(base.place_name(self.place_label[*s as usize])))
            .collect();
        let mut seen = HashSet::new();
        let mut transitions = Vec::new();
        let mut transition_label = Vec::new();
        for (t, pre, post) in self.trans.clone() {
            let remap = |xs: &[Sp], b: &mut Self| -> Marking {
                xs.iter().map(|s| PlaceId(index[&b.find(*s)])).collect()
            };
            let pre_m = remap(&pre, &mut self);
            let post_m = remap(&post, &mut self);
            if !seen.insert((pre_m.clone(), t)) {
                continue;
            }
            transitions.push(Transition {
                name: fresh(base.transition_name(t)),
                pre: pre_m,
                post: post_m,
            });
            transition_label.push(t);
        }
        let init: Marking = initial.iter().map(|s| PlaceId(index[s])).collect();
        let net = PTNet::from_parts(place_names, transitions, init)?;
        Ok(StrategyNet {
            net,
            place_label: roots
                .iter()
                .map(|s| self.place_label[*s as usize])
                .collect(),
            transition_label,
        })
    }
}

/// Builds a finite strategy net from the smallest winning initial state,
/// following Player 0's choices and every Player-1 move.
pub fn extract_strategy(dg: &DecisionGame, gg: &GameGraph, sol: &Solution) -> Result<StrategyNet> {
    let &v0 = sol.winning_initials.first().ok_or(Error::Unrealizable)?;
    let mut b = Builder {
        dg,
        gg,
        sol,
        place_label: Vec::new(),
        fixed: Vec::new(),
        parent: Vec::new(),
        trans: Vec::new(),
        tindex: HashMap::new(),
        memo: HashSet::new(),
        memo2: HashSet::new(),
    };
    let mut f = Frontier::new();
    for (e, n) in gg.states[v0].iter() {
        for _ in 0..n {
            let s = b.new_place(e.place, Some(e.clone()));
            f.push((s, e.clone()));
        }
    }
    let initial: Vec<Sp> = f.iter().map(|(s, _)| *s).collect();
    b.explore(v0, f, &mut Vec::new())?;
    b.finish(&initial)
}

/// A reachable marking of the strategy net and a firing sequence reaching it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub marking: Marking,
    pub trace: Vec<TransitionId>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub s1_ok: bool,
    pub s2_ok: bool,
    pub deadlock_avoiding: bool,
    pub winning: bool,
    /// Homomorphism, initial image and injectivity checks.
    pub structure: Vec<Check>,
    pub counterexamples: BTreeMap<&'static str, Witness>,
    pub reachable_markings: usize,
}

impl VerificationReport {
    pub fn all_ok(&self) -> bool {
        self.s1_ok
            && self.s2_ok
            && self.deadlock_avoiding
            && self.winning
            && self.structure.iter().all(|c| c.ok)
    }
}

fn structure_checks(g: &PetriGame, s: &StrategyNet) -> Vec<Check> {
    let base = &g.net;
    let net = &s.net;
    let lab = |m: &Marking| m.map(|p| s.place_label[p.index()]);
    let mut hom = Vec::new();
    for t in net.transition_ids() {
        let b = s.transition_label[t.index()];
        if lab(net.pre(t)) != *base.pre(b) || lab(net.post(t)) != *base.post(b) {
            hom.push(net.transition_name(t).to_string());
        }
    }
    let init_ok = lab(net.initial_marking()) == *base.initial_marking();
    let mut by_pre: HashMap<(&Marking, TransitionId), &str> = HashMap::new();
    let mut dup = Vec::new();
    for t in net.transition_ids() {
        if let Some(other) = by_pre.insert(
            (net.pre(t), s.transition_label[t.index()]),
            net.transition_name(t),
        ) {
            dup.push(format!("{other}/{}", net.transition_name(t)));
        }
    }
    vec![
        Check {
            name: "homomorphism",
            ok: hom.is_empty(),
            detail: hom.join(", "),
        },
        Check {
            name: "initial_image",
            ok: init_ok,
            detail: if init_ok {
                String::new()
            } else {
                "initial marking is not mapped onto the game's".into()
            },
        },
        Check {
            name: "injective",
            ok: dup.is_empty(),
            detail: dup.join(", "),
        },
    ]
}

/// Re-explores the strategy net and checks (S1), (S2), deadlock avoidance
/// and winning over all reachable markings.
pub fn verify_strategy(
    g: &PetriGame,
    s: &StrategyNet,
    state_limit: usize,
) -> Result<VerificationReport> {
    let net = &s.net;
    let base = &g.net;
    let label = |p: PlaceId| s.place_label[p.index()];
    let mut seen: HashMap<Marking, usize> = HashMap::new();
    let mut markings: Vec<Marking> = Vec::new();
    let mut parent: Vec<Option<(usize, TransitionId)>> = Vec::new();
    let m0 = net.initial_marking().clone();
    seen.insert(m0.clone(), 0);
    markings.push(m0);
    parent.push(None);
    let mut queue = VecDeque::from([0usize]);
    let mut counterexamples: BTreeMap<&'static str, Witness> = BTreeMap::new();
    let trace_to = |i: usize, parent: &[Option<(usize, TransitionId)>]| {
        let mut tr = Vec::new();
        let mut cur = i;
        while let Some((p, t)) = parent[cur] {
            tr.push(t);
            cur = p;
        }
        tr.reverse();
        tr
    };
    while let Some(i) = queue.pop_front() {
        let m = markings[i].clone();
        if let Some((p, n)) = m.iter().find(|(_, n)| *n > 1) {
            return Err(Error::UnsafeStrategy(net.place_name(*p).to_string(), n));
        }
        let enabled = net.enabled_transitions(&m)?;
        let mut record = |key: &'static str, detail: String| {
            counterexamples.entry(key).or_insert_with(|| Witness {
                marking: m.clone(),
                trace: trace_to(i, &parent),
                detail,
            });
        };
        for p in m.support() {
            let lp = label(*p);
            if g.is_env(lp) {
                for &bt in base.consumers(lp) {
                    let pre = base.pre(bt);
                    if pre.len() != 1 {
                        continue;
                    }
                    let present = net
                        .consumers(*p)
                        .iter()
                        .any(|&t| s.transition_label[t.index()] == bt && net.pre(t).len() == 1);
                    if !present {
                        record(
                            "s2",
                            format!(
                                "{} does not allow local transition {}",
                                net.place_name(*p),
                                base.transition_name(bt)
                            ),
                        );
                    }
                }
            } else {
                let choices: Vec<&str> = net
                    .consumers(*p)
                    .iter()
                    .filter(|t| enabled.contains(t))
                    .map(|t| net.transition_name(*t))
                    .collect();
                if choices.len() > 1 {
                    record(
                        "s1",
                        format!("{} enables {}", net.place_name(*p), choices.join(", ")),
                    );
                }
            }
            if g.is_bad(lp) {
                record(
                    "winning",
                    format!("bad place {} is marked", net.place_name(*p)),
                );
            }
        }
        if enabled.is_empty() {
            let image = m.map(|p| label(*p));
            let base_enabled = base.enabled_transitions(&image)?;
            if let Some(bt) = base_enabled.first() {
                record(
                    "deadlock",
                    format!(
                        "game enables {} but the strategy is stuck",
                        base.transition_name(*bt)
                    ),
                );
            }
        }
        for t in enabled {
            let next = net.fire(&m, t)?;
            if !seen.contains_key(&next) {
                if markings.len() >= state_limit {
                    return Err(Error::StateLimit(state_limit));
                }
                seen.insert(next.clone(), markings.len());
                markings.push(next);
                parent.push(Some((i, t)));
                queue.push_back(markings.len() - 1);
            }
        }
    }
    Ok(VerificationReport {
        s1_ok: !counterexamples.contains_key("s1"),
        s2_ok: !counterexamples.contains_key("s2"),
        deadlock_avoiding: !counterexamples.contains_key("deadlock"),
        winning: !counterexamples.contains_key("winning"),
        structure: structure_checks(g, s),
        counterexamples,
        reachable_markings: markings.len(),
    })
}

/// Unfolds a strategy net to `depth` layers, labelled directly into the game.
pub fn unfold_strategy(s: &StrategyNet, game: &PTNet, depth: u32) -> Result<BranchingProcess> {
    let bp = unfold_prefix(&s.net, depth)?;
    BranchingProcess::new(
        bp.net().clone(),
        bp.place_labels()
            .iter()
            .map(|p| s.place_label[p.index()])
            .collect(),
        bp.transition_labels()
            .iter()
            .map(|t| s.transition_label[t.index()])
            .collect(),
        game.clone(),
    )
}

/// The decision set of a cut: label, type and labelled postset per place.
pub fn decision_set_of_cut(
    bp: &BranchingProcess,
    cut: &Cut,
    types: &BTreeMap<PlaceId, PlaceType>,
) -> Result<DecisionSet> {
    let occ = bp.net();
    cut.iter()
        .map(|p| {
            let ty = types.get(p).ok_or_else(|| {
                Error::Other(format!("no type for {} in the prefix", occ.place_name(*p)))
            })?;
            Ok(Entry {
                place: bp.place_label(*p),
                ty: match ty {
                    PlaceType::One => 1,
                    PlaceType::Two => 2,
                },
                commit: Commitment::Set(
                    occ.consumers(*p)
                        .iter()
                        .map(|t| bp.transition_label(*t))
                        .collect(),
                ),
            })
        })
        .collect()
}

/// Picks which enabled transition fires next.
pub trait Chooser {
    fn choose(&mut self, marking: &Marking, enabled: &[TransitionId]) -> usize;
}

pub struct FirstEnabled;

impl Chooser for FirstEnabled {
    fn choose(&mut self, _: &Marking, _: &[TransitionId]) -> usize {
        0
    }
}

pub struct RandomChooser(ChaCha8Rng);

impl RandomChooser {
    pub fn seeded(seed: u64) -> Self {
        RandomChooser(ChaCha8Rng::seed_from_u64(seed))
    }
}

impl Chooser for RandomChooser {
    fn choose(&mut self, _: &Marking, enabled: &[TransitionId]) -> usize {
        self.0.gen_range(0..enabled.len())
    }
}

impl<F: FnMut(&Marking, &[TransitionId]) -> usize> Chooser for F {
    fn choose(&mut self, marking: &Marking, enabled: &[TransitionId]) -> usize {
        self(marking, enabled)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Play {
    pub initial: Marking,
    /// Fired transitions with the marking after each step.
    pub steps: Vec<(TransitionId, Marking)>,
    pub truncated: bool,
}

impl Play {
    pub fn markings(&self) -> impl Iterator<Item = &Marking> {
        std::iter::once(&self.initial).chain(self.steps.iter().map(|(_, m)| m))
    }
}

/// Runs the strategy net until nothing is enabled or `max_steps` fired.
pub fn simulate_play(s: &StrategyNet, chooser: &mut dyn Chooser, max_steps: usize) -> Result<Play> {
    let net = &s.net;
    let initial = net.initial_marking().clone();
    let mut m = initial.clone();
    let mut steps = Vec::new();
    loop {
        let enabled = net.enabled_transitions(&m)?;
        if enabled.is_empty() {
            return Ok(Play {
                initial,
                steps,
                truncated: false,
            });
        }
        if steps.len() >= max_steps {
            return Ok(Play {
                initial,
                steps,
                truncated: true,
            });
        }
        let i = chooser.choose(&m, &enabled).min(enabled.len() - 1);
        m = net.fire(&m, enabled[i])?;
        steps.push((enabled[i], m.clone()));
    }
}

/// Graph, solution and (if realizable) an extracted strategy.
#[derive(Clone, Debug)]
pub struct Synthesis {
    pub graph: GameGraph,
    pub solution: Solution,
    pub strategy: Option<StrategyNet>,
}

/// Runs the whole pipeline from a game to a strategy net.
pub fn synthesize(
    g: &PetriGame,
    reading: crate::decision::DReading,
    state_limit: usize,
) -> Result<Synthesis> {
    let dg = DecisionGame::with_reading(g, reading);
    let graph = crate::decision::build_game_graph(&dg, state_limit)?;
    let solution = crate::solver::solve(&graph);
    let strategy = if solution.realizable() {
        Some(extract_strategy(&dg, &graph, &solution)?)
    } else {
        None
    };
    Ok(Synthesis {
        graph,
        solution,
        strategy,
    })
}
