//! Place/transition nets with multiset flow.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiset::Multiset;

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlaceId(pub u32);

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TransitionId(pub u32);

impl fmt::Debug for PlaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

impl fmt::Debug for TransitionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

impl PlaceId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl TransitionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A node of a net: either a place or a transition.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Node {
    Place(PlaceId),
    Transition(TransitionId),
}

pub type Marking = Multiset<PlaceId>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub name: String,
    pub pre: Marking,
    pub post: Marking,
}

/// A finite P/T net. Every transition has non-empty pre- and postconditions,
/// node names are unique across places and transitions, and the initial
/// marking only mentions declared places.
#[derive(Clone, Debug)]
pub struct PTNet {
    places: Vec<String>,
    transitions: Vec<Transition>,
    initial: Marking,
    place_lookup: HashMap<String, PlaceId>,
    transition_lookup: HashMap<String, TransitionId>,
    consumers: Vec<Vec<TransitionId>>,
    producers: Vec<Vec<TransitionId>>,
}

impl PartialEq for PTNet {
    fn eq(&self, other: &Self) -> bool {
        self.places == other.places
            && self.transitions == other.transitions
            && self.initial == other.initial
    }
}

impl Eq for PTNet {}

type NamedArcs = Vec<(String, u32)>;

/// Incremental, name-based construction of a [`PTNet`].
#[derive(Default, Clone, Debug)]
pub struct NetBuilder {
    places: Vec<String>,
    transitions: Vec<(String, NamedArcs, NamedArcs)>,
    initial: Vec<(String, u32)>,
}

impl NetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn place(mut self, name: impl Into<String>, tokens: u32) -> Self {
        let name = name.into();
        if tokens > 0 {
            self.initial.push((name.clone(), tokens));
        }
        self.places.push(name);
        self
    }

    pub fn transition<S: AsRef<str>>(
        mut self,
        name: impl Into<String>,
        pre: &[(S, u32)],
        post: &[(S, u32)],
    ) -> Self {
        let conv = |v: &[(S, u32)]| {
            v.iter()
                .map(|(p, n)| (p.as_ref().to_string(), *n))
                .collect()
        };
        self.transitions.push((name.into(), conv(pre), conv(post)));
        self
    }

    pub fn build(self) -> Result<PTNet> {
        let mut place_lookup = HashMap::new();
        for (i, p) in self.places.iter().enumerate() {
            if place_lookup.insert(p.clone(), PlaceId(i as u32)).is_some() {
                return Err(Error::DuplicateNode(p.clone()));
            }
        }
        let lookup = |name: &str| {
            place_lookup
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnknownPlace(name.to_string()))
        };
        let mut transitions = Vec::with_capacity(self.transitions.len());
        for (name, pre, post) in &self.transitions {
            let mut tp = Marking::new();
            for (p, n) in pre {
                tp.insert(lookup(p)?, *n);
            }
            let mut tq = Marking::new();
            for (p, n) in post {
                tq.insert(lookup(p)?, *n);
            }
            transitions.push(Transition {
                name: name.clone(),
                pre: tp,
                post: tq,
            });
        }
        let mut initial = Marking::new();
        for (p, n) in &self.initial {
            initial.insert(lookup(p)?, *n);
        }
        PTNet::from_parts(self.places, transitions, initial)
    }
}

impl PTNet {
    /// Builds a net from index-based parts, checking all structural invariants.
    pub fn from_parts(
        places: Vec<String>,
        transitions: Vec<Transition>,
        initial: Marking,
    ) -> Result<Self> {
        let mut place_lookup = HashMap::new();
        for (i, p) in places.iter().enumerate() {
            if place_lookup.insert(p.clone(), PlaceId(i as u32)).is_some() {
                return Err(Error::DuplicateNode(p.clone()));
            }
        }
        let mut transition_lookup = HashMap::new();
        let mut consumers = vec![Vec::new(); places.len()];
        let mut producers = vec![Vec::new(); places.len()];
        for (i, t) in transitions.iter().enumerate() {
            let id = TransitionId(i as u32);
            if place_lookup.contains_key(&t.name)
                || transition_lookup.insert(t.name.clone(), id).is_some()
            {
                return Err(Error::DuplicateNode(t.name.clone()));
            }
            if t.pre.is_empty() {
                return Err(Error::EmptyPreset(t.name.clone()));
            }
            if t.post.is_empty() {
                return Err(Error::EmptyPostset(t.name.clone()));
            }
            for p in t.pre.support().chain(t.post.support()) {
                if p.index() >= places.len() {
                    return Err(Error::InvalidMarking(p.0));
                }
            }
            for p in t.pre.support() {
                consumers[p.index()].push(id);
            }
            for p in t.post.support() {
                producers[p.index()].push(id);
            }
        }
        if let Some(p) = initial.support().find(|p| p.index() >= places.len()) {
            return Err(Error::InvalidMarking(p.0));
        }
        Ok(PTNet {
            places,
            transitions,
            initial,
            place_lookup,
            transition_lookup,
            consumers,
            producers,
        })
    }

    pub fn empty() -> Self {
        PTNet::from_parts(Vec::new(), Vec::new(), Marking::new()).expect("empty net is valid")
    }

    pub fn num_places(&self) -> usize {
        self.places.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn place_ids(&self) -> impl Iterator<Item = PlaceId> + '_ {
        (0..self.places.len() as u32).map(PlaceId)
    }

    pub fn transition_ids(&self) -> impl Iterator<Item = TransitionId> + '_ {
        (0..self.transitions.len() as u32).map(TransitionId)
    }

    pub fn place_name(&self, p: PlaceId) -> &str {
        &self.places[p.index()]
    }

    pub fn transition(&self, t: TransitionId) -> &Transition {
        &self.transitions[t.index()]
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn place_names(&self) -> &[String] {
        &self.places
    }

    pub fn transition_name(&self, t: TransitionId) -> &str {
        &self.transitions[t.index()].name
    }

    pub fn place(&self, name: &str) -> Option<PlaceId> {
        self.place_lookup.get(name).copied()
    }

    pub fn transition_id(&self, name: &str) -> Option<TransitionId> {
        self.transition_lookup.get(name).copied()
    }

    pub fn pre(&self, t: TransitionId) -> &Marking {
        &self.transitions[t.index()].pre
    }

    pub fn post(&self, t: TransitionId) -> &Marking {
        &self.transitions[t.index()].post
    }

    /// Transitions having `p` in their precondition, in id order.
    pub fn consumers(&self, p: PlaceId) -> &[TransitionId] {
        &self.consumers[p.index()]
    }

    /// Transitions having `p` in their postcondition, in id order.
    pub fn producers(&self, p: PlaceId) -> &[TransitionId] {
        &self.producers[p.index()]
    }

    pub fn initial_marking(&self) -> &Marking {
        &self.initial
    }

    /// Same net with a different initial marking.
    pub fn with_initial(&self, m: Marking) -> Result<Self> {
        self.check_marking(&m)?;
        let mut out = self.clone();
        out.initial = m;
        Ok(out)
    }

    /// Parses a marking given by place names.
    pub fn marking<S: AsRef<str>>(&self, entries: &[(S, u32)]) -> Result<Marking> {
        let mut m = Marking::new();
        for (p, n) in entries {
            let id = self
                .place(p.as_ref())
                .ok_or_else(|| Error::UnknownPlace(p.as_ref().to_string()))?;
            m.insert(id, *n);
        }
        Ok(m)
    }

    /// Renders a marking with place names, e.g. `{A:1, Sys:2}`.
    pub fn show_marking(&self, m: &Marking) -> String {
        let parts: Vec<String> = m
            .iter()
            .map(|(p, n)| format!("{}:{}", self.place_name(*p), n))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }

    fn check_marking(&self, m: &Marking) -> Result<()> {
        match m.support().find(|p| p.index() >= self.places.len()) {
            Some(p) => Err(Error::InvalidMarking(p.0)),
            None => Ok(()),
        }
    }

    pub fn is_enabled(&self, m: &Marking, t: TransitionId) -> bool {
        self.pre(t).is_subset(m)
    }

    /// All transitions whose precondition is included in `m`.
    pub fn enabled_transitions(&self, m: &Marking) -> Result<Vec<TransitionId>> {
        self.check_marking(m)?;
        Ok(self.enabled_unchecked(m))
    }

    fn enabled_unchecked(&self, m: &Marking) -> Vec<TransitionId> {
        // Only consumers of marked places can be enabled.
        let mut cands: BTreeSet<TransitionId> = BTreeSet::new();
        for p in m.support() {
            cands.extend(self.consumers(*p).iter().copied());
        }
        cands
            .into_iter()
            .filter(|t| self.is_enabled(m, *t))
            .collect()
    }

    /// Fires `t` at `m`, returning `m - pre(t) + post(t)`.
    pub fn fire(&self, m: &Marking, t: TransitionId) -> Result<Marking> {
        self.check_marking(m)?;
        let rest = m
            .checked_sub(self.pre(t))
            .ok_or_else(|| Error::NotEnabled(self.transition_name(t).to_string()))?;
        Ok(rest.sum(self.post(t)))
    }

    /// Breadth-first exploration of all markings reachable from the initial one.
    pub fn reachable_markings(&self, state_limit: usize) -> Result<ReachabilityGraph> {
        let mut graph = ReachabilityGraph::default();
        let mut index: HashMap<Marking, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        index.insert(self.initial.clone(), 0);
        graph.markings.push(self.initial.clone());
        queue.push_back(0);
        if state_limit == 0 {
            return Err(Error::StateLimit(state_limit));
        }
        while let Some(i) = queue.pop_front() {
            let m = graph.markings[i].clone();
            for t in self.enabled_unchecked(&m) {
                let next = self.fire(&m, t)?;
                let j = match index.get(&next) {
                    Some(&j) => j,
                    None => {
                        if graph.markings.len() >= state_limit {
                            return Err(Error::StateLimit(state_limit));
                        }
                        let j = graph.markings.len();
                        index.insert(next.clone(), j);
                        graph.markings.push(next);
                        queue.push_back(j);
                        j
                    }
                };
                graph.edges.push((i, t, j));
            }
        }
        Ok(graph)
    }

    /// Decides `k`-boundedness by exploration. A marking exceeding `k` is
    /// reported as soon as it is found, even if exploration is incomplete.
    pub fn check_k_bounded(&self, k: u32, state_limit: usize) -> Boundedness {
        let mut seen: HashMap<Marking, ()> = HashMap::new();
        let mut queue = VecDeque::new();
        if self.initial.max_count() > k {
            return Boundedness::Exceeded(self.initial.clone());
        }
        seen.insert(self.initial.clone(), ());
        queue.push_back(self.initial.clone());
        while let Some(m) = queue.pop_front() {
            for t in self.enabled_unchecked(&m) {
                let Ok(next) = self.fire(&m, t) else { continue };
                if seen.contains_key(&next) {
                    continue;
                }
                if next.max_count() > k {
                    return Boundedness::Exceeded(next);
                }
                if seen.len() >= state_limit {
                    return Boundedness::Unknown;
                }
                seen.insert(next.clone(), ());
                queue.push_back(next);
            }
        }
        Boundedness::Bounded
    }

    /// Restriction to the named nodes. Transitions whose pre- or
    /// postcondition becomes empty are dropped.
    pub fn restrict(&self, nodes: &BTreeSet<String>) -> PTNet {
        let kept: Vec<PlaceId> = self
            .place_ids()
            .filter(|p| nodes.contains(self.place_name(*p)))
            .collect();
        let remap: BTreeMap<PlaceId, PlaceId> = kept
            .iter()
            .enumerate()
            .map(|(i, p)| (*p, PlaceId(i as u32)))
            .collect();
        let project = |m: &Marking| -> Marking {
            m.iter()
                .filter_map(|(p, n)| remap.get(p).map(|q| (*q, n)))
                .collect()
        };
        let transitions = self
            .transitions
            .iter()
            .filter(|t| nodes.contains(&t.name))
            .map(|t| Transition {
                name: t.name.clone(),
                pre: project(&t.pre),
                post: project(&t.post),
            })
            .filter(|t| !t.pre.is_empty() && !t.post.is_empty())
            .collect();
        let places = kept
            .iter()
            .map(|p| self.place_name(*p).to_string())
            .collect();
        PTNet::from_parts(places, transitions, project(&self.initial))
            .expect("restriction of a valid net is valid")
    }

    /// Every transition consumes as many tokens as it produces.
    pub fn is_concurrency_preserving(&self) -> bool {
        self.transitions.iter().all(|t| t.pre.len() == t.post.len())
    }

    /// Componentwise union of nets with pairwise disjoint places; transitions
    /// with the same name synchronize, i.e. their flows are merged.
    pub fn parallel_compose(nets: &[PTNet]) -> Result<PTNet> {
        let mut places: Vec<String> = Vec::new();
        let mut seen: HashMap<String, PlaceId> = HashMap::new();
        for net in nets {
            for p in &net.places {
                if seen.contains_key(p) {
                    return Err(Error::OverlappingPlaces(p.clone()));
                }
                seen.insert(p.clone(), PlaceId(places.len() as u32));
                places.push(p.clone());
            }
        }
        let mut order: Vec<String> = Vec::new();
        let mut merged: HashMap<String, (Marking, Marking)> = HashMap::new();
        let mut initial = Marking::new();
        for net in nets {
            let lift = |m: &Marking| m.map(|p| seen[net.place_name(*p)]);
            for t in &net.transitions {
                let entry = merged.entry(t.name.clone()).or_insert_with(|| {
                    order.push(t.name.clone());
                    (Marking::new(), Marking::new())
                });
                entry.0 = entry.0.sum(&lift(&t.pre));
                entry.1 = entry.1.sum(&lift(&t.post));
            }
            initial = initial.sum(&lift(&net.initial));
        }
        let transitions = order
            .into_iter()
            .map(|name| {
                let (pre, post) = merged.remove(&name).expect("recorded");
                Transition { name, pre, post }
            })
            .collect();
        PTNet::from_parts(places, transitions, initial)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Boundedness {
    Bounded,
    /// A reachable marking exceeding the bound.
    Exceeded(Marking),
    /// The state limit was hit before a verdict; the net may be unbounded.
    Unknown,
}

/// Reachable markings (vertices, in BFS discovery order) and fired
/// transitions (labelled edges).
#[derive(Clone, Debug, Default)]
pub struct ReachabilityGraph {
    pub markings: Vec<Marking>,
    pub edges: Vec<(usize, TransitionId, usize)>,
}

impl ReachabilityGraph {
    pub fn contains(&self, m: &Marking) -> bool {
        self.markings.contains(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pump() -> PTNet {
        NetBuilder::new()
            .place("p", 1)
            .transition("t", &[("p", 1)], &[("p", 2)])
            .build()
            .unwrap()
    }

    #[test]
    fn builder_rejects_malformed_nets() {
        let dup = NetBuilder::new().place("a", 0).place("a", 0).build();
        assert_eq!(dup.unwrap_err(), Error::DuplicateNode("a".into()));
        let clash = NetBuilder::new()
            .place("a", 0)
            .transition("a", &[("a", 1)], &[("a", 1)])
            .build();
        assert!(matches!(clash, Err(Error::DuplicateNode(_))));
        let empty_pre = NetBuilder::new()
            .place("a", 0)
            .transition::<&str>("t", &[], &[("a", 1)])
            .build();
        assert_eq!(empty_pre.unwrap_err(), Error::EmptyPreset("t".into()));
        let unknown = NetBuilder::new()
            .place("a", 0)
            .transition("t", &[("b", 1)], &[("a", 1)])
            .build();
        assert_eq!(unknown.unwrap_err(), Error::UnknownPlace("b".into()));
    }

    #[test]
    fn empty_marking_enables_nothing() {
        let net = pump();
        assert!(net.enabled_transitions(&Marking::new()).unwrap().is_empty());
    }

    #[test]
    fn foreign_marking_is_rejected() {
        let net = pump();
        let m: Marking = [PlaceId(7)].into_iter().collect();
        assert_eq!(net.enabled_transitions(&m), Err(Error::InvalidMarking(7)));
    }

    #[test]
    fn firing_a_disabled_transition_fails() {
        let net = pump();
        let t = net.transition_id("t").unwrap();
        assert_eq!(
            net.fire(&Marking::new(), t),
            Err(Error::NotEnabled("t".into()))
        );
    }

    #[test]
    fn self_loop_has_one_vertex_and_one_edge() {
        let net = NetBuilder::new()
            .place("p", 1)
            .transition("t", &[("p", 1)], &[("p", 1)])
            .build()
            .unwrap();
        let t = net.transition_id("t").unwrap();
        assert_eq!(
            net.fire(net.initial_marking(), t).unwrap(),
            *net.initial_marking()
        );
        let g = net.reachable_markings(10).unwrap();
        assert_eq!(g.markings.len(), 1);
        assert_eq!(g.edges, vec![(0, t, 0)]);
    }

    #[test]
    fn dead_net_has_a_single_vertex() {
        let net = NetBuilder::new()
            .place("p", 0)
            .place("q", 1)
            .transition("t", &[("p", 1)], &[("q", 1)])
            .build()
            .unwrap();
        let g = net.reachable_markings(10).unwrap();
        assert_eq!(g.markings.len(), 1);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn pumping_net_is_not_one_bounded_and_hits_the_limit() {
        let net = pump();
        assert!(matches!(
            net.check_k_bounded(1, 100),
            Boundedness::Exceeded(_)
        ));
        assert_eq!(net.check_k_bounded(1_000, 50), Boundedness::Unknown);
        assert_eq!(net.reachable_markings(5).unwrap_err(), Error::StateLimit(5));
    }

    #[test]
    fn restriction_edge_cases() {
        let net = pump();
        let all: BTreeSet<String> = ["p", "t"].iter().map(|s| s.to_string()).collect();
        assert_eq!(net.restrict(&all), net);
        let none = net.restrict(&BTreeSet::new());
        assert_eq!(none.num_places(), 0);
        assert_eq!(none.num_transitions(), 0);
        assert!(none.initial_marking().is_empty());
        // keeping the transition but not its place empties its flow
        let t_only: BTreeSet<String> = ["t"].iter().map(|s| s.to_string()).collect();
        assert_eq!(net.restrict(&t_only).num_transitions(), 0);
    }

    #[test]
    fn concurrency_preservation() {
        assert!(PTNet::empty().is_concurrency_preserving());
        assert!(!pump().is_concurrency_preserving());
        let merge = NetBuilder::new()
            .place("a", 1)
            .place("b", 1)
            .transition("t", &[("a", 1), ("b", 1)], &[("a", 1)])
            .build()
            .unwrap();
        assert!(!merge.is_concurrency_preserving());
    }

    #[test]
    fn composition_with_empty_net_is_identity() {
        let net = pump();
        let c = PTNet::parallel_compose(&[net.clone(), PTNet::empty()]).unwrap();
        assert_eq!(c, net);
    }

    #[test]
    fn composition_synchronizes_on_shared_names() {
        let a = NetBuilder::new()
            .place("a", 1)
            .place("a2", 0)
            .transition("sync", &[("a", 1)], &[("a2", 1)])
            .build()
            .unwrap();
        let b = NetBuilder::new()
            .place("b", 1)
            .place("b2", 0)
            .transition("sync", &[("b", 1)], &[("b2", 1)])
            .transition("solo", &[("b", 1)], &[("b", 1)])
            .build()
            .unwrap();
        let c = PTNet::parallel_compose(&[a.clone(), b]).unwrap();
        assert_eq!(c.num_transitions(), 2);
        let sync = c.transition_id("sync").unwrap();
        assert_eq!(c.pre(sync).len(), 2);
        assert_eq!(
            PTNet::parallel_compose(&[a.clone(), a]).unwrap_err(),
            Error::OverlappingPlaces("a".into())
        );
    }
}
