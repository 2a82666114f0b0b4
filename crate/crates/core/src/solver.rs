//! Reachability games: the Player-1 attractor of the bad terminal states.

use std::collections::VecDeque;

use crate::decision::{GameGraph, Player};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    /// States from which Player 1 forces a Player-1 win.
    pub attractor: Vec<bool>,
    /// For Player-0 states outside the attractor with moves: the chosen edge.
    pub p0_choice: Vec<Option<usize>>,
    pub winning_initials: Vec<usize>,
}

impl Solution {
    pub fn realizable(&self) -> bool {
        !self.winning_initials.is_empty()
    }

    pub fn is_winning(&self, v: usize) -> bool {
        !self.attractor[v]
    }
}

/// Computes the attractor by backward propagation, linear in the graph size.
pub fn solve(g: &GameGraph) -> Solution {
    let n = g.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut pending = vec![0usize; n];
    for (s, _, t) in &g.edges {
        preds[*t].push(*s);
        pending[*s] += 1;
    }
    let mut attr = vec![false; n];
    let mut queue = VecDeque::new();
    for v in 0..n {
        let joins = g.outcome[v].is_w1()
            || (g.owner[v] == Player::Player0 && pending[v] == 0 && !g.outcome[v].is_w0());
        if joins {
            attr[v] = true;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &u in &preds[v] {
            if attr[u] || g.outcome[u].is_w0() {
                continue;
            }
            let joins = match g.owner[u] {
                Player::Player1 => true,
                Player::Player0 => {
                    pending[u] -= 1;
                    pending[u] == 0
                }
            };
            if joins {
                attr[u] = true;
                queue.push_back(u);
            }
        }
    }
    let p0_choice = (0..n)
        .map(|v| {
            if attr[v] || g.owner[v] != Player::Player0 {
                return None;
            }
            g.successors(v).find(|(_, t)| !attr[*t]).map(|(e, _)| e)
        })
        .collect();
    let winning_initials = g.initial.iter().copied().filter(|v| !attr[*v]).collect();
    Solution {
        attractor: attr,
        p0_choice,
        winning_initials,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::{DecisionSet, Move, Outcome, P0Reason, P1Reason};
    use crate::multiset::Multiset;
    use crate::net::TransitionId;

    fn graph(owner: &[Player], outcome: &[Outcome], edges: &[(usize, usize)]) -> GameGraph {
        let mv = Move::Fire {
            transition: TransitionId(0),
            consumed: Multiset::new(),
        };
        let mut e: Vec<_> = edges.iter().map(|(s, t)| (*s, mv.clone(), *t)).collect();
        e.sort();
        GameGraph::from_parts(
            vec![DecisionSet::new(); owner.len()],
            owner.to_vec(),
            outcome.to_vec(),
            vec![0],
            e,
        )
    }

    const N: Outcome = Outcome::NonTerminal;
    const W0: Outcome = Outcome::P0Win(P0Reason::Termination);
    const W1: Outcome = Outcome::P1Win(P1Reason::Bad);

    #[test]
    fn player0_avoids_bad_branch() {
        use Player::*;
        let g = graph(
            &[Player0, Player0, Player0],
            &[N, W1, W0],
            &[(0, 1), (0, 2)],
        );
        let s = solve(&g);
        assert!(s.realizable());
        assert_eq!(g.edges[s.p0_choice[0].unwrap()].2, 2);
    }

    #[test]
    fn player1_picks_bad_branch() {
        use Player::*;
        let g = graph(
            &[Player1, Player0, Player0],
            &[N, W1, W0],
            &[(0, 1), (0, 2)],
        );
        assert!(!solve(&g).realizable());
    }

    #[test]
    fn player0_cycle_is_safe() {
        use Player::*;
        let g = graph(&[Player0, Player0], &[N, N], &[(0, 1), (1, 0)]);
        assert!(solve(&g).realizable());
    }

    #[test]
    fn stuck_player0_state_loses() {
        use Player::*;
        let g = graph(&[Player0], &[N], &[]);
        assert!(!solve(&g).realizable());
    }
}
