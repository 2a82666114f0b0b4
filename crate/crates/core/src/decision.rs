//! The finite two-player graph game over decision sets.
//!
//! A decision set abstracts a cut of a strategy: one entry per token, giving
//! its place, its type (1: waits for the environment, 2: independent of the
//! environment from now on) and the transitions the token currently allows.
//! Player 0 plays for the system, Player 1 for the environment.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::PetriGame;
use crate::multiset::Multiset;
use crate::net::{Marking, PlaceId, TransitionId};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Commitment {
    Set(BTreeSet<TransitionId>),
    /// A pending choice Player 0 still has to make.
    Top,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Entry {
    pub place: PlaceId,
    pub ty: u8,
    pub commit: Commitment,
}

impl Entry {
    pub fn allows(&self, t: TransitionId) -> bool {
        matches!(&self.commit, Commitment::Set(s) if s.contains(&t))
    }

    pub fn is_top(&self) -> bool {
        self.commit == Commitment::Top
    }
}

pub type DecisionSet = Multiset<Entry>;

/// A multiset of entries able to fire a transition together.
pub type Instantiation = (TransitionId, Multiset<Entry>);

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Player {
    Player0,
    Player1,
}

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum P0Reason {
    Termination,
    TypeTwo,
}

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum P1Reason {
    Bad,
    Nondeterminism,
    Deadlock,
}

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Outcome {
    NonTerminal,
    P0Win(P0Reason),
    P1Win(P1Reason),
}

impl Outcome {
    pub fn is_w0(self) -> bool {
        matches!(self, Outcome::P0Win(_))
    }

    pub fn is_w1(self) -> bool {
        matches!(self, Outcome::P1Win(_))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Move {
    /// Fires a transition, consuming the given entries.
    Fire {
        transition: TransitionId,
        consumed: Multiset<Entry>,
    },
    /// Replaces every pending entry; the resolved entries of one place are
    /// handed to that place's pending tokens in sorted order.
    Resolve { resolved: Multiset<Entry> },
}

/// How "terminating" is read inside the D fixpoint.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, Default)]
pub enum DReading {
    /// The type-2 tokens alone cannot fire any net transition.
    #[default]
    TypeTwoPart,
    /// No net transition is enabled at the whole decision set.
    WholeSet,
}

const D_UNIVERSE_LIMIT: usize = 200_000;

/// Game construction context for one Petri game.
pub struct DecisionGame<'a> {
    pub game: &'a PetriGame,
    pub reading: DReading,
    /// Resolution options of a pending token, per place.
    options: Vec<Vec<Entry>>,
    d_memo: RefCell<HashMap<(Marking, DecisionSet), bool>>,
}

fn subsets(items: &[TransitionId]) -> Vec<BTreeSet<TransitionId>> {
    let mut out = Vec::with_capacity(1 << items.len());
    for mask in 0u64..(1u64 << items.len()) {
        out.push(
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, t)| *t)
                .collect(),
        );
    }
    out
}

/// All multisets of size `k` over `items` (repetition allowed), in
/// lexicographic order of index sequences.
fn multichoose<T: Clone>(items: &[T], k: u32) -> Vec<Vec<T>> {
    fn go<T: Clone>(items: &[T], k: u32, from: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if k == 0 {
            out.push(cur.clone());
            return;
        }
        for i in from..items.len() {
            cur.push(items[i].clone());
            go(items, k - 1, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Sub-multisets of `avail` with exactly `k` elements.
fn sub_multisets(avail: &[(Entry, u32)], k: u32) -> Vec<Vec<(Entry, u32)>> {
    fn go(
        avail: &[(Entry, u32)],
        i: usize,
        k: u32,
        cur: &mut Vec<(Entry, u32)>,
        out: &mut Vec<Vec<(Entry, u32)>>,
    ) {
        if k == 0 {
            out.push(cur.clone());
            return;
        }
        if i == avail.len() {
            return;
        }
        let (e, n) = &avail[i];
        for take in (0..=(*n).min(k)).rev() {
            if take > 0 {
                cur.push((e.clone(), take));
            }
            go(avail, i + 1, k - take, cur, out);
            if take > 0 {
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(avail, 0, k, &mut Vec::new(), &mut out);
    out
}

impl<'a> DecisionGame<'a> {
    pub fn new(game: &'a PetriGame) -> Self {
        Self::with_reading(game, DReading::default())
    }

    pub fn with_reading(game: &'a PetriGame, reading: DReading) -> Self {
        let net = &game.net;
        let options = net
            .place_ids()
            .map(|p| {
                let post: Vec<TransitionId> = net.consumers(p).to_vec();
                if game.is_env(p) {
                    return vec![Entry {
                        place: p,
                        ty: 1,
                        commit: Commitment::Set(post.into_iter().collect()),
                    }];
                }
                let mut v = Vec::new();
                for ty in [1u8, 2] {
                    for s in subsets(&post) {
                        v.push(Entry {
                            place: p,
                            ty,
                            commit: Commitment::Set(s),
                        });
                    }
                }
                v
            })
            .collect();
        DecisionGame {
            game,
            reading,
            options,
            d_memo: RefCell::new(HashMap::new()),
        }
    }

    /// Builds an entry from names; `commit = None` means a pending choice.
    pub fn entry(&self, place: &str, ty: u8, commit: Option<&[&str]>) -> Result<Entry> {
        let net = &self.game.net;
        let p = net
            .place(place)
            .ok_or_else(|| Error::UnknownPlace(place.into()))?;
        let commit = match commit {
            None => Commitment::Top,
            Some(ts) => Commitment::Set(
                ts.iter()
                    .map(|t| {
                        net.transition_id(t)
                            .ok_or_else(|| Error::UnknownTransition(t.to_string()))
                    })
                    .collect::<Result<_>>()?,
            ),
        };
        Ok(Entry {
            place: p,
            ty,
            commit,
        })
    }

    /// The entry every environment token carries at `p`.
    pub fn env_entry(&self, p: PlaceId) -> Entry {
        Entry {
            place: p,
            ty: 1,
            commit: Commitment::Set(self.game.net.consumers(p).iter().copied().collect()),
        }
    }

    pub fn marking(ds: &DecisionSet) -> Marking {
        ds.map(|e| e.place)
    }

    pub fn has_top(ds: &DecisionSet) -> bool {
        ds.support().any(|e| e.is_top())
    }

    fn type_part(ds: &DecisionSet, ty: u8) -> DecisionSet {
        ds.filter(|e| e.ty == ty && !e.is_top())
    }

    /// Committed, enabled instantiations using only entries of type `ty`.
    pub fn instantiations(&self, ds: &DecisionSet, ty: u8) -> Vec<Instantiation> {
        let net = &self.game.net;
        let mut cands = BTreeSet::new();
        for e in ds.support() {
            if e.ty == ty {
                if let Commitment::Set(s) = &e.commit {
                    cands.extend(s.iter().copied());
                }
            }
        }
        let mut out = Vec::new();
        for t in cands {
            let mut partial: Vec<Vec<(Entry, u32)>> = vec![Vec::new()];
            for (p, need) in net.pre(t).iter() {
                let avail: Vec<(Entry, u32)> = ds
                    .iter()
                    .filter(|(e, _)| e.place == *p && e.ty == ty && e.allows(t))
                    .map(|(e, n)| (e.clone(), n))
                    .collect();
                let picks = sub_multisets(&avail, need);
                let mut next = Vec::new();
                for base in &partial {
                    for pick in &picks {
                        let mut v = base.clone();
                        v.extend(pick.iter().cloned());
                        next.push(v);
                    }
                }
                partial = next;
                if partial.is_empty() {
                    break;
                }
            }
            for inst in partial {
                out.push((t, inst.into_iter().collect()));
            }
        }
        out.sort();
        out
    }

    /// Two committed environment-free instantiations of type-1 tokens that
    /// compete for a token.
    pub fn detect_nondeterminism(&self, ds: &DecisionSet) -> bool {
        let insts: Vec<Instantiation> = self
            .instantiations(ds, 1)
            .into_iter()
            .filter(|(t, _)| !self.game.involves_env(*t))
            .collect();
        self.competing(ds, &insts)
    }

    fn competing(&self, ds: &DecisionSet, insts: &[Instantiation]) -> bool {
        for (i, (_, a)) in insts.iter().enumerate() {
            // identical spare tokens give a second instance sharing the rest
            if a.len() >= 2 && a.iter().any(|(e, n)| n < ds.count(e)) {
                return true;
            }
            for (_, b) in &insts[i + 1..] {
                if a.iter().any(|(e, n)| n + b.count(e) > ds.count(e)) {
                    return true;
                }
            }
        }
        false
    }

    pub fn is_player1_state(&self, ds: &DecisionSet) -> bool {
        !Self::has_top(ds)
            && self
                .instantiations(ds, 1)
                .iter()
                .all(|(t, _)| self.game.involves_env(*t))
    }

    pub fn owner(&self, ds: &DecisionSet) -> Player {
        if self.is_player1_state(ds) {
            Player::Player1
        } else {
            Player::Player0
        }
    }

    /// Winning-state classification. States with pending choices are never
    /// terminal.
    pub fn classify_terminal(&self, ds: &DecisionSet) -> Outcome {
        if Self::has_top(ds) {
            return Outcome::NonTerminal;
        }
        if ds.support().any(|e| self.game.is_bad(e.place)) {
            return Outcome::P1Win(P1Reason::Bad);
        }
        if self.detect_nondeterminism(ds) {
            return Outcome::P1Win(P1Reason::Nondeterminism);
        }
        if !self.instantiations(ds, 1).is_empty() {
            return Outcome::NonTerminal;
        }
        let m = Self::marking(ds);
        if self
            .game
            .net
            .enabled_transitions(&m)
            .unwrap_or_default()
            .is_empty()
        {
            return Outcome::P0Win(P0Reason::Termination);
        }
        let two = Self::type_part(ds, 2);
        if !two.is_empty() && self.in_d(&Self::marking(&Self::type_part(ds, 1)), &two) {
            return Outcome::P0Win(P0Reason::TypeTwo);
        }
        Outcome::P1Win(P1Reason::Deadlock)
    }

    /// Every way of resolving the pending entries of `ds`, in sorted order.
    /// No filtering by D happens here.
    pub fn resolutions(&self, ds: &DecisionSet) -> Vec<(Multiset<Entry>, DecisionSet)> {
        let mut rest = ds.clone();
        let mut pending: BTreeMap<PlaceId, u32> = BTreeMap::new();
        for (e, n) in ds.iter() {
            if e.is_top() {
                *pending.entry(e.place).or_insert(0) += n;
                rest.remove(e, n);
            }
        }
        let mut combos: Vec<Multiset<Entry>> = vec![Multiset::new()];
        for (p, k) in pending {
            let choices = multichoose(&self.options[p.index()], k);
            let mut next = Vec::with_capacity(combos.len() * choices.len());
            for c in &combos {
                for ch in &choices {
                    let mut m = c.clone();
                    for e in ch {
                        m.insert(e.clone(), 1);
                    }
                    next.push(m);
                }
            }
            combos = next;
        }
        let mut out: Vec<_> = combos
            .into_iter()
            .map(|r| {
                let s = rest.sum(&r);
                (r, s)
            })
            .collect();
        out.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
        out
    }

    /// Whether a resolved state may be entered, i.e. its type-2 part is in D.
    pub fn admissible(&self, ds: &DecisionSet) -> bool {
        let two = Self::type_part(ds, 2);
        if two.is_empty() {
            return true;
        }
        let ctx = match self.reading {
            DReading::TypeTwoPart => Marking::new(),
            DReading::WholeSet => Self::marking(&Self::type_part(ds, 1)),
        };
        self.in_d(&ctx, &two)
    }

    /// Decision sets at the start of the game: every resolution of all
    /// system tokens of the initial marking, with admissible type-2 parts.
    pub fn initial_states(&self) -> Vec<DecisionSet> {
        let mut ds = DecisionSet::new();
        for (p, n) in self.game.net.initial_marking().iter() {
            let e = if self.game.is_env(*p) {
                self.env_entry(*p)
            } else {
                Entry {
                    place: *p,
                    ty: 1,
                    commit: Commitment::Top,
                }
            };
            ds.insert(e, n);
        }
        let mut out: Vec<DecisionSet> = self
            .resolutions(&ds)
            .into_iter()
            .map(|(_, s)| s)
            .filter(|s| self.admissible(s))
            .collect();
        out.dedup();
        out
    }

    fn produce(&self, ds: &DecisionSet, t: TransitionId, inst: &Multiset<Entry>) -> DecisionSet {
        let mut next = ds
            .checked_sub(inst)
            .expect("instantiation is part of the state");
        for (q, n) in self.game.net.post(t).iter() {
            let e = if self.game.is_env(*q) {
                self.env_entry(*q)
            } else {
                Entry {
                    place: *q,
                    ty: 1,
                    commit: Commitment::Top,
                }
            };
            next.insert(e, n);
        }
        next
    }

    /// Moves available at `ds`, sorted by target state.
    pub fn successors(&self, ds: &DecisionSet) -> Result<Vec<(Move, DecisionSet)>> {
        if Self::has_top(ds) {
            return Ok(self
                .resolutions(ds)
                .into_iter()
                .filter(|(_, s)| self.admissible(s))
                .map(|(r, s)| (Move::Resolve { resolved: r }, s))
                .collect());
        }
        if self.classify_terminal(ds) != Outcome::NonTerminal {
            return Err(Error::Other("successors of a terminal decision set".into()));
        }
        let p1 = self.is_player1_state(ds);
        let mut out: Vec<(Move, DecisionSet)> = self
            .instantiations(ds, 1)
            .into_iter()
            .filter(|(t, _)| self.game.involves_env(*t) == p1)
            .map(|(t, inst)| {
                let next = self.produce(ds, t, &inst);
                (
                    Move::Fire {
                        transition: t,
                        consumed: inst,
                    },
                    next,
                )
            })
            .collect();
        out.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
        Ok(out)
    }

    /// Type-2 steps: each committed type-2 instantiation with each bad-free
    /// all-type-2 resolution of the produced tokens.
    fn type_two_steps(&self, x: &DecisionSet) -> Vec<(Instantiation, Vec<DecisionSet>)> {
        let net = &self.game.net;
        self.instantiations(x, 2)
            .into_iter()
            .map(|(t, inst)| {
                let post = net.post(t);
                let blocked = post
                    .support()
                    .any(|q| self.game.is_env(*q) || self.game.is_bad(*q));
                let mut targets = Vec::new();
                if !blocked {
                    let base = x
                        .checked_sub(&inst)
                        .expect("instantiation is part of the set");
                    let mut combos: Vec<DecisionSet> = vec![base];
                    for (q, n) in post.iter() {
                        let opts: Vec<Entry> = self.options[q.index()]
                            .iter()
                            .filter(|e| e.ty == 2)
                            .cloned()
                            .collect();
                        let choices = multichoose(&opts, n);
                        let mut next = Vec::new();
                        for c in &combos {
                            for ch in &choices {
                                let mut m = c.clone();
                                for e in ch {
                                    m.insert(e.clone(), 1);
                                }
                                next.push(m);
                            }
                        }
                        combos = next;
                    }
                    combos.sort();
                    targets = combos;
                }
                ((t, inst), targets)
            })
            .collect()
    }

    /// Membership of the type-2 part `x` in the greatest fixpoint D, with
    /// `ctx` the marking of the other tokens that stay put.
    pub fn in_d(&self, ctx: &Marking, x: &DecisionSet) -> bool {
        let key = (ctx.clone(), x.clone());
        if let Some(v) = self.d_memo.borrow().get(&key) {
            return *v;
        }
        let result = self.compute_d(ctx, x);
        self.d_memo
            .borrow_mut()
            .extend(result.iter().map(|(k, v)| ((ctx.clone(), k.clone()), *v)));
        result.get(x).copied().unwrap_or(false)
    }

    /// Greatest fixpoint over the closure of `x` under type-2 steps.
    pub fn compute_d(&self, ctx: &Marking, x: &DecisionSet) -> HashMap<DecisionSet, bool> {
        let mut index: HashMap<DecisionSet, usize> = HashMap::new();
        let mut states = vec![x.clone()];
        let mut steps: Vec<Vec<Vec<usize>>> = Vec::new();
        index.insert(x.clone(), 0);
        let mut queue = VecDeque::from([0usize]);
        let mut overflow = false;
        while let Some(i) = queue.pop_front() {
            let mut per_inst = Vec::new();
            for (_, targets) in self.type_two_steps(&states[i]) {
                let mut ids = Vec::new();
                for s in targets {
                    let j = match index.get(&s) {
                        Some(&j) => j,
                        None => {
                            if states.len() >= D_UNIVERSE_LIMIT {
                                overflow = true;
                                continue;
                            }
                            let j = states.len();
                            index.insert(s.clone(), j);
                            states.push(s);
                            queue.push_back(j);
                            j
                        }
                    };
                    ids.push(j);
                }
                per_inst.push(ids);
            }
            if steps.len() <= i {
                steps.resize(i + 1, Vec::new());
            }
            steps[i] = per_inst;
        }
        steps.resize(states.len(), Vec::new());
        let net = &self.game.net;
        let mut alive = vec![!overflow; states.len()];
        let terminated: Vec<bool> = states
            .iter()
            .map(|s| {
                net.enabled_transitions(&ctx.sum(&Self::marking(s)))
                    .unwrap_or_default()
                    .is_empty()
            })
            .collect();
        let base_ok: Vec<bool> = states
            .iter()
            .enumerate()
            .map(|(i, s)| {
                !s.support().any(|e| self.game.is_bad(e.place))
                    && (terminated[i]
                        || (!steps[i].is_empty() && !self.competing(s, &self.instantiations(s, 2))))
            })
            .collect();
        for (a, ok) in alive.iter_mut().zip(&base_ok) {
            *a &= *ok;
        }
        loop {
            let mut changed = false;
            for i in 0..states.len() {
                if !alive[i] || terminated[i] {
                    continue;
                }
                let ok = steps[i].iter().all(|ts| ts.iter().any(|j| alive[*j]));
                if !ok {
                    alive[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        states.into_iter().zip(alive).collect()
    }

    /// Renders a decision set with place and transition names.
    pub fn show(&self, ds: &DecisionSet) -> String {
        let net = &self.game.net;
        let parts: Vec<String> = ds
            .iter()
            .map(|(e, n)| {
                let c = match &e.commit {
                    Commitment::Top => "T".to_string(),
                    Commitment::Set(s) => {
                        let names: Vec<&str> = s.iter().map(|t| net.transition_name(*t)).collect();
                        format!("{{{}}}", names.join(","))
                    }
                };
                format!("({},{},{}):{}", net.place_name(e.place), e.ty, c, n)
            })
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// The explored graph game. States are sorted canonically, so indices are
/// stable across runs.
#[derive(Clone, Debug)]
pub struct GameGraph {
    pub states: Vec<DecisionSet>,
    pub owner: Vec<Player>,
    pub outcome: Vec<Outcome>,
    pub initial: Vec<usize>,
    /// Sorted by source, then target.
    pub edges: Vec<(usize, Move, usize)>,
    succ: Vec<Vec<usize>>,
}

impl GameGraph {
    /// Assembles a graph from raw parts; used by tests and generators.
    pub fn from_parts(
        states: Vec<DecisionSet>,
        owner: Vec<Player>,
        outcome: Vec<Outcome>,
        initial: Vec<usize>,
        edges: Vec<(usize, Move, usize)>,
    ) -> Self {
        let mut succ = vec![Vec::new(); owner.len()];
        for (i, (s, _, _)) in edges.iter().enumerate() {
            succ[*s].push(i);
        }
        for list in &mut succ {
            list.sort_by_key(|i| (edges[*i].2, *i));
        }
        GameGraph {
            states,
            owner,
            outcome,
            initial,
            edges,
            succ,
        }
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    /// Outgoing edges of `v` as (edge index, target), sorted by target.
    pub fn successors(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ[v].iter().map(move |i| (*i, self.edges[*i].2))
    }

    pub fn find(&self, ds: &DecisionSet) -> Option<usize> {
        self.states.binary_search(ds).ok()
    }

    pub fn w0(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|v| self.outcome[*v].is_w0())
    }

    pub fn w1(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|v| self.outcome[*v].is_w1())
    }
}

/// Explores the graph game from the initial decision sets.
pub fn build_game_graph(dg: &DecisionGame, state_limit: usize) -> Result<GameGraph> {
    let mut index: HashMap<DecisionSet, usize> = HashMap::new();
    let mut states: Vec<DecisionSet> = Vec::new();
    let mut raw_edges: Vec<(usize, Move, usize)> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |s: DecisionSet,
                      states: &mut Vec<DecisionSet>,
                      queue: &mut VecDeque<usize>|
     -> Result<usize> {
        if let Some(&i) = index.get(&s) {
            return Ok(i);
        }
        if states.len() >= state_limit {
            return Err(Error::StateLimit(state_limit));
        }
        let i = states.len();
        index.insert(s.clone(), i);
        states.push(s);
        queue.push_back(i);
        Ok(i)
    };
    let mut initial = Vec::new();
    for s in dg.initial_states() {
        initial.push(intern(s, &mut states, &mut queue)?);
    }
    let mut outcome_raw = Vec::new();
    while let Some(i) = queue.pop_front() {
        let ds = states[i].clone();
        let out = dg.classify_terminal(&ds);
        if outcome_raw.len() <= i {
            outcome_raw.resize(i + 1, Outcome::NonTerminal);
        }
        outcome_raw[i] = out;
        if out != Outcome::NonTerminal {
            continue;
        }
        for (mv, next) in dg.successors(&ds)? {
            let j = intern(next, &mut states, &mut queue)?;
            raw_edges.push((i, mv, j));
        }
    }
    outcome_raw.resize(states.len(), Outcome::NonTerminal);

    // canonical renumbering
    let mut order: Vec<usize> = (0..states.len()).collect();
    order.sort_by(|a, b| states[*a].cmp(&states[*b]));
    let mut rank = vec![0; states.len()];
    for (new, old) in order.iter().enumerate() {
        rank[*old] = new;
    }
    let sorted_states: Vec<DecisionSet> = order.iter().map(|i| states[*i].clone()).collect();
    let owner = sorted_states.iter().map(|s| dg.owner(s)).collect();
    let outcome = order.iter().map(|i| outcome_raw[*i]).collect();
    let mut initial: Vec<usize> = initial.into_iter().map(|i| rank[i]).collect();
    initial.sort_unstable();
    initial.dedup();
    let mut edges: Vec<(usize, Move, usize)> = raw_edges
        .into_iter()
        .map(|(s, m, t)| (rank[s], m, rank[t]))
        .collect();
    edges.sort();
    Ok(GameGraph::from_parts(
        sorted_states,
        owner,
        outcome,
        initial,
        edges,
    ))
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::Player0 => write!(f, "player0"),
            Player::Player1 => write!(f, "player1"),
        }
    }
}
