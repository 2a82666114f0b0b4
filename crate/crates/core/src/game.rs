//! Petri games: a net whose places are split between the system players and
//! the single environment player, plus bad places and a declared bound.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::net::{Boundedness, Marking, PTNet, PlaceId, TransitionId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PetriGame {
    pub net: PTNet,
    pub system: BTreeSet<PlaceId>,
    pub environment: BTreeSet<PlaceId>,
    pub bad: BTreeSet<PlaceId>,
    pub bound: u32,
}

/// Outcome of one validation check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub boundedness: Boundedness,
}

impl ValidationReport {
    pub fn synthesizable(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.ok)
    }

    /// True when the only failing check is an inconclusive bound check.
    pub fn bound_unknown(&self) -> bool {
        self.boundedness == Boundedness::Unknown
    }
}

impl PetriGame {
    /// Builds a game from place names. Places not listed as environment
    /// places are system places.
    pub fn new<S: AsRef<str>>(
        net: PTNet,
        environment: &[S],
        bad: &[S],
        bound: u32,
    ) -> Result<Self> {
        let lookup = |names: &[S]| -> Result<BTreeSet<PlaceId>> {
            names
                .iter()
                .map(|n| {
                    net.place(n.as_ref())
                        .ok_or_else(|| Error::UnknownPlace(n.as_ref().to_string()))
                })
                .collect()
        };
        let environment = lookup(environment)?;
        let bad = lookup(bad)?;
        let system = net
            .place_ids()
            .filter(|p| !environment.contains(p))
            .collect();
        Ok(PetriGame {
            net,
            system,
            environment,
            bad,
            bound,
        })
    }

    pub fn is_env(&self, p: PlaceId) -> bool {
        self.environment.contains(&p)
    }

    pub fn is_bad(&self, p: PlaceId) -> bool {
        self.bad.contains(&p)
    }

    /// Number of environment tokens in `m`.
    pub fn env_tokens(&self, m: &Marking) -> u32 {
        m.iter()
            .filter(|(p, _)| self.is_env(**p))
            .map(|(_, n)| n)
            .sum()
    }

    /// Does `t` have an environment place in its precondition?
    pub fn involves_env(&self, t: TransitionId) -> bool {
        self.net.pre(t).support().any(|p| self.is_env(*p))
    }

    pub fn place_ids_named<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<PlaceId>> {
        names
            .iter()
            .map(|n| {
                self.net
                    .place(n.as_ref())
                    .ok_or_else(|| Error::UnknownPlace(n.as_ref().to_string()))
            })
            .collect()
    }
}

/// Runs every structural check required before synthesis.
pub fn validate_game(g: &PetriGame, state_limit: usize) -> ValidationReport {
    let net = &g.net;
    let mut checks = Vec::new();

    let overlap: Vec<&str> = g
        .system
        .intersection(&g.environment)
        .map(|p| net.place_name(*p))
        .collect();
    let uncovered: Vec<&str> = net
        .place_ids()
        .filter(|p| !g.system.contains(p) && !g.environment.contains(p))
        .map(|p| net.place_name(p))
        .collect();
    let foreign = g
        .system
        .iter()
        .chain(&g.environment)
        .any(|p| p.index() >= net.num_places());
    checks.push(Check {
        name: "partition",
        ok: overlap.is_empty() && uncovered.is_empty() && !foreign,
        detail: if !overlap.is_empty() {
            format!("places in both partitions: {}", overlap.join(", "))
        } else if !uncovered.is_empty() {
            format!("places in neither partition: {}", uncovered.join(", "))
        } else if foreign {
            "partition mentions undeclared places".into()
        } else {
            String::new()
        },
    });

    let bad_foreign = g.bad.iter().any(|p| p.index() >= net.num_places());
    checks.push(Check {
        name: "bad_places",
        ok: !bad_foreign,
        detail: if bad_foreign {
            "bad places not declared in the net".into()
        } else {
            String::new()
        },
    });

    let env0 = g.env_tokens(net.initial_marking());
    checks.push(Check {
        name: "single_environment_token",
        ok: env0 == 1,
        detail: if env0 == 1 {
            String::new()
        } else {
            format!("initial marking has {env0} environment tokens")
        },
    });

    let mut offenders = Vec::new();
    for t in net.transition_ids() {
        let i = g.env_tokens(net.pre(t));
        let o = g.env_tokens(net.post(t));
        if i != o || i > 1 {
            offenders.push(format!("{} ({i} in, {o} out)", net.transition_name(t)));
        }
    }
    checks.push(Check {
        name: "environment_preservation",
        ok: offenders.is_empty(),
        detail: offenders.join(", "),
    });

    checks.push(Check {
        name: "positive_bound",
        ok: g.bound > 0,
        detail: if g.bound > 0 {
            String::new()
        } else {
            "bound must be positive".into()
        },
    });

    let boundedness = net.check_k_bounded(g.bound, state_limit);
    checks.push(Check {
        name: "bounded",
        ok: boundedness == Boundedness::Bounded,
        detail: match &boundedness {
            Boundedness::Bounded => String::new(),
            Boundedness::Exceeded(m) => format!(
                "reachable marking {} exceeds bound {}",
                net.show_marking(m),
                g.bound
            ),
            Boundedness::Unknown => format!(
                "state limit {state_limit} reached before a verdict; the net may be unbounded"
            ),
        },
    });

    ValidationReport {
        checks,
        boundedness,
    }
}
