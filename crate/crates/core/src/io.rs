//! JSON documents for games, strategies, controllers and branching
//! processes. All documents carry a `kind` field so one reader can tell them
//! apart; serialization is canonical (declaration order, sorted flow maps).

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{validate_game, PetriGame};
use crate::net::{Marking, PTNet, PlaceId, Transition, TransitionId};

pub const FORMAT_VERSION: &str = "1";

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Owner {
    System,
    Environment,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaceDoc {
    pub id: String,
    pub owner: Owner,
    #[serde(default)]
    pub bad: bool,
    #[serde(default)]
    pub initial: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub id: String,
    pub pre: BTreeMap<String, u32>,
    pub post: BTreeMap<String, u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameDocument {
    pub kind: String,
    pub format_version: String,
    pub bound: u32,
    pub places: Vec<PlaceDoc>,
    pub transitions: Vec<TransitionDoc>,
}

/// A place of a net labelled into a game net.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelledPlaceDoc {
    pub id: String,
    pub label: String,
    #[serde(default)]
    pub initial: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelledTransitionDoc {
    pub id: String,
    pub label: String,
    pub pre: BTreeMap<String, u32>,
    pub post: BTreeMap<String, u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelledNetDoc {
    pub places: Vec<LabelledPlaceDoc>,
    pub transitions: Vec<LabelledTransitionDoc>,
}

/// Strategy nets (`kind = "strategy"`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyDocument {
    pub kind: String,
    pub format_version: String,
    pub places: Vec<LabelledPlaceDoc>,
    pub transitions: Vec<LabelledTransitionDoc>,
}

/// Local controllers (`kind = "controllers"`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllersDocument {
    pub kind: String,
    pub format_version: String,
    pub controllers: Vec<LabelledNetDoc>,
}

/// A branching process with its base game (`kind = "branching_process"`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchingProcessDocument {
    pub kind: String,
    pub format_version: String,
    pub base: GameDocument,
    pub places: Vec<LabelledPlaceDoc>,
    pub transitions: Vec<LabelledTransitionDoc>,
}

/// The document kinds understood by [`read_document`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Game(GameDocument),
    Strategy(StrategyDocument),
    Controllers(ControllersDocument),
    BranchingProcess(BranchingProcessDocument),
}

fn syntax(e: serde_json::Error) -> Error {
    match e.classify() {
        serde_json::error::Category::Data => Error::Schema(e.to_string()),
        _ => Error::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        },
    }
}

/// Reads any document, dispatching on its `kind` field.
pub fn read_document(text: &str) -> Result<Document> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(syntax)?;
    let kind = value
        .get("kind")
        .and_then(|k| k.as_str())
        .ok_or_else(|| Error::Schema("missing field `kind`".into()))?;
    let doc = match kind {
        "game" => Document::Game(serde_json::from_value(value).map_err(syntax)?),
        "strategy" => Document::Strategy(serde_json::from_value(value).map_err(syntax)?),
        "controllers" => Document::Controllers(serde_json::from_value(value).map_err(syntax)?),
        "branching_process" => {
            Document::BranchingProcess(serde_json::from_value(value).map_err(syntax)?)
        }
        other => return Err(Error::Schema(format!("unknown kind `{other}`"))),
    };
    Ok(doc)
}

fn expect_kind(kind: &str, want: &str) -> Result<()> {
    if kind == want {
        Ok(())
    } else {
        Err(Error::Schema(format!(
            "expected kind `{want}`, found `{kind}`"
        )))
    }
}

fn check_version(v: &str) -> Result<()> {
    if v == FORMAT_VERSION {
        Ok(())
    } else {
        Err(Error::Schema(format!("unsupported format_version `{v}`")))
    }
}

fn flow(
    field: &str,
    map: &BTreeMap<String, u32>,
    places: &BTreeMap<&str, PlaceId>,
) -> Result<Marking> {
    let mut m = Marking::new();
    for (p, n) in map {
        let id = places
            .get(p.as_str())
            .ok_or_else(|| Error::Schema(format!("{field}: unknown place `{p}`")))?;
        if *n == 0 {
            return Err(Error::Schema(format!(
                "{field}.{p}: count must be positive"
            )));
        }
        m.insert(*id, *n);
    }
    Ok(m)
}

fn unique_ids<'a>(ids: impl Iterator<Item = (&'a str, String)>) -> Result<()> {
    let mut seen = HashSet::new();
    for (id, field) in ids {
        if !seen.insert(id) {
            return Err(Error::Schema(format!("{field}: duplicate id `{id}`")));
        }
    }
    Ok(())
}

/// Decodes a game document without running the semantic checks.
pub fn game_from_document(doc: &GameDocument) -> Result<PetriGame> {
    expect_kind(&doc.kind, "game")?;
    check_version(&doc.format_version)?;
    if doc.places.is_empty() {
        return Err(Error::Schema("places: list must not be empty".into()));
    }
    if doc.bound == 0 {
        return Err(Error::Schema("bound: must be positive".into()));
    }
    unique_ids(
        doc.places
            .iter()
            .enumerate()
            .map(|(i, p)| (p.id.as_str(), format!("places[{i}].id")))
            .chain(
                doc.transitions
                    .iter()
                    .enumerate()
                    .map(|(i, t)| (t.id.as_str(), format!("transitions[{i}].id"))),
            ),
    )?;
    let lookup: BTreeMap<&str, PlaceId> = doc
        .places
        .iter()
        .enumerate()
        .map(|(i, p)| (p.id.as_str(), PlaceId(i as u32)))
        .collect();
    let mut transitions = Vec::new();
    for (i, t) in doc.transitions.iter().enumerate() {
        let pre = flow(&format!("transitions[{i}].pre"), &t.pre, &lookup)?;
        let post = flow(&format!("transitions[{i}].post"), &t.post, &lookup)?;
        if pre.is_empty() || post.is_empty() {
            return Err(Error::Schema(format!(
                "transitions[{i}]: pre and post must be non-empty"
            )));
        }
        transitions.push(Transition {
            name: t.id.clone(),
            pre,
            post,
        });
    }
    let initial = doc
        .places
        .iter()
        .enumerate()
        .map(|(i, p)| (PlaceId(i as u32), p.initial))
        .collect();
    let net = PTNet::from_parts(
        doc.places.iter().map(|p| p.id.clone()).collect(),
        transitions,
        initial,
    )?;
    let pick = |f: &dyn Fn(&PlaceDoc) -> bool| -> BTreeSet<PlaceId> {
        doc.places
            .iter()
            .enumerate()
            .filter(|(_, p)| f(p))
            .map(|(i, _)| PlaceId(i as u32))
            .collect()
    };
    Ok(PetriGame {
        net,
        system: pick(&|p| p.owner == Owner::System),
        environment: pick(&|p| p.owner == Owner::Environment),
        bad: pick(&|p| p.bad),
        bound: doc.bound,
    })
}

/// Parses a game without semantic validation.
pub fn parse_game_unchecked(text: &str) -> Result<PetriGame> {
    match read_document(text)? {
        Document::Game(doc) => game_from_document(&doc),
        _ => Err(Error::Schema("expected kind `game`".into())),
    }
}

/// Parses and validates a game. An inconclusive bound check is reported as
/// [`Error::StateLimit`]; every other failed check as [`Error::InvalidGame`].
pub fn parse_game(text: &str, state_limit: usize) -> Result<PetriGame> {
    let g = parse_game_unchecked(text)?;
    let report = validate_game(&g, state_limit);
    if report.bound_unknown() {
        return Err(Error::StateLimit(state_limit));
    }
    if !report.synthesizable() {
        let msgs: Vec<String> = report
            .failures()
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect();
        return Err(Error::InvalidGame(msgs.join("; ")));
    }
    Ok(g)
}

pub fn game_to_document(g: &PetriGame) -> GameDocument {
    let net = &g.net;
    let names = |m: &Marking| -> BTreeMap<String, u32> {
        m.iter()
            .map(|(p, n)| (net.place_name(*p).to_string(), n))
            .collect()
    };
    GameDocument {
        kind: "game".into(),
        format_version: FORMAT_VERSION.into(),
        bound: g.bound,
        places: net
            .place_ids()
            .map(|p| PlaceDoc {
                id: net.place_name(p).to_string(),
                owner: if g.is_env(p) {
                    Owner::Environment
                } else {
                    Owner::System
                },
                bad: g.is_bad(p),
                initial: net.initial_marking().count(&p),
            })
            .collect(),
        transitions: net
            .transitions()
            .iter()
            .map(|t| TransitionDoc {
                id: t.name.clone(),
                pre: names(&t.pre),
                post: names(&t.post),
            })
            .collect(),
    }
}

/// Canonical pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents always serialize");
    s.push('\n');
    s
}

pub fn serialize_game(g: &PetriGame) -> String {
    to_json(&game_to_document(g))
}

/// A net whose nodes are labelled by nodes of `base`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledNet {
    pub net: PTNet,
    pub place_label: Vec<PlaceId>,
    pub transition_label: Vec<TransitionId>,
}

pub fn labelled_net_from_doc(
    places: &[LabelledPlaceDoc],
    transitions: &[LabelledTransitionDoc],
    base: &PTNet,
) -> Result<LabelledNet> {
    unique_ids(
        places
            .iter()
            .enumerate()
            .map(|(i, p)| (p.id.as_str(), format!("places[{i}].id")))
            .chain(
                transitions
                    .iter()
                    .enumerate()
                    .map(|(i, t)| (t.id.as_str(), format!("transitions[{i}].id"))),
            ),
    )?;
    let lookup: BTreeMap<&str, PlaceId> = places
        .iter()
        .enumerate()
        .map(|(i, p)| (p.id.as_str(), PlaceId(i as u32)))
        .collect();
    let mut place_label = Vec::new();
    for (i, p) in places.iter().enumerate() {
        place_label.push(base.place(&p.label).ok_or_else(|| {
            Error::Schema(format!("places[{i}].label: unknown place `{}`", p.label))
        })?);
    }
    let mut ts = Vec::new();
    let mut transition_label = Vec::new();
    for (i, t) in transitions.iter().enumerate() {
        transition_label.push(base.transition_id(&t.label).ok_or_else(|| {
            Error::Schema(format!(
                "transitions[{i}].label: unknown transition `{}`",
                t.label
            ))
        })?);
        ts.push(Transition {
            name: t.id.clone(),
            pre: flow(&format!("transitions[{i}].pre"), &t.pre, &lookup)?,
            post: flow(&format!("transitions[{i}].post"), &t.post, &lookup)?,
        });
    }
    let initial = places
        .iter()
        .enumerate()
        .map(|(i, p)| (PlaceId(i as u32), p.initial))
        .collect();
    let net = PTNet::from_parts(places.iter().map(|p| p.id.clone()).collect(), ts, initial)?;
    Ok(LabelledNet {
        net,
        place_label,
        transition_label,
    })
}

pub fn labelled_net_to_doc(ln: &LabelledNet, base: &PTNet) -> LabelledNetDoc {
    let net = &ln.net;
    let names = |m: &Marking| -> BTreeMap<String, u32> {
        m.iter()
            .map(|(p, n)| (net.place_name(*p).to_string(), n))
            .collect()
    };
    LabelledNetDoc {
        places: net
            .place_ids()
            .map(|p| LabelledPlaceDoc {
                id: net.place_name(p).to_string(),
                label: base.place_name(ln.place_label[p.index()]).to_string(),
                initial: net.initial_marking().count(&p),
            })
            .collect(),
        transitions: net
            .transition_ids()
            .map(|t| LabelledTransitionDoc {
                id: net.transition_name(t).to_string(),
                label: base
                    .transition_name(ln.transition_label[t.index()])
                    .to_string(),
                pre: names(net.pre(t)),
                post: names(net.post(t)),
            })
            .collect(),
    }
}

pub fn strategy_to_document(s: &LabelledNet, base: &PTNet) -> StrategyDocument {
    let d = labelled_net_to_doc(s, base);
    StrategyDocument {
        kind: "strategy".into(),
        format_version: FORMAT_VERSION.into(),
        places: d.places,
        transitions: d.transitions,
    }
}

pub fn strategy_from_document(doc: &StrategyDocument, base: &PTNet) -> Result<LabelledNet> {
    expect_kind(&doc.kind, "strategy")?;
    check_version(&doc.format_version)?;
    labelled_net_from_doc(&doc.places, &doc.transitions, base)
}

/// Parses a strategy document labelled into `base`.
pub fn parse_strategy(text: &str, base: &PTNet) -> Result<LabelledNet> {
    match read_document(text)? {
        Document::Strategy(doc) => strategy_from_document(&doc, base),
        _ => Err(Error::Schema("expected kind `strategy`".into())),
    }
}

pub fn controllers_to_document(cs: &[LabelledNet], base: &PTNet) -> ControllersDocument {
    ControllersDocument {
        kind: "controllers".into(),
        format_version: FORMAT_VERSION.into(),
        controllers: cs.iter().map(|c| labelled_net_to_doc(c, base)).collect(),
    }
}

pub fn controllers_from_document(
    doc: &ControllersDocument,
    base: &PTNet,
) -> Result<Vec<LabelledNet>> {
    expect_kind(&doc.kind, "controllers")?;
    check_version(&doc.format_version)?;
    doc.controllers
        .iter()
        .map(|c| labelled_net_from_doc(&c.places, &c.transitions, base))
        .collect()
}

/// Bundled example games and prefixes.
pub mod fixtures {
    use super::*;
    use crate::unfolding::BranchingProcess;

    pub const SAME_DECISION: &str = include_str!("../fixtures/same_decision.game");
    pub const SAME_DECISION_NO_TESTS: &str =
        include_str!("../fixtures/same_decision_no_tests.game");
    pub const SAME_DECISION_FULL: &str = include_str!("../fixtures/same_decision_full.game");
    pub const ALARM: &str = include_str!("../fixtures/alarm.game");
    pub const BROKEN_PARTITION: &str = include_str!("../fixtures/broken_partition.game");
    pub const PUMP: &str = include_str!("../fixtures/pump.game");
    pub const MCUT_PREFIX: &str = include_str!("../fixtures/mcut_prefix.json");

    /// Name and text of every bundled game.
    pub const GAMES: &[(&str, &str)] = &[
        ("same_decision", SAME_DECISION),
        ("same_decision_no_tests", SAME_DECISION_NO_TESTS),
        ("same_decision_full", SAME_DECISION_FULL),
        ("alarm", ALARM),
        ("broken_partition", BROKEN_PARTITION),
        ("pump", PUMP),
    ];

    pub fn text(name: &str) -> Option<&'static str> {
        GAMES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
    }

    pub fn game(name: &str) -> Result<PetriGame> {
        parse_game_unchecked(
            text(name).ok_or_else(|| Error::Other(format!("no fixture `{name}`")))?,
        )
    }

    /// The strategy prefix used for the mcut/ecut examples, with its game.
    pub fn mcut_prefix() -> Result<(PetriGame, BranchingProcess)> {
        match read_document(MCUT_PREFIX)? {
            Document::BranchingProcess(doc) => branching_process_from_document(&doc),
            _ => Err(Error::Schema("expected kind `branching_process`".into())),
        }
    }
}

pub fn branching_process_from_document(
    doc: &BranchingProcessDocument,
) -> Result<(PetriGame, crate::unfolding::BranchingProcess)> {
    expect_kind(&doc.kind, "branching_process")?;
    check_version(&doc.format_version)?;
    let game = game_from_document(&doc.base)?;
    let ln = labelled_net_from_doc(&doc.places, &doc.transitions, &game.net)?;
    let bp = crate::unfolding::BranchingProcess::new(
        ln.net,
        ln.place_label,
        ln.transition_label,
        game.net.clone(),
    )?;
    Ok((game, bp))
}

pub fn branching_process_to_document(
    game: &PetriGame,
    bp: &crate::unfolding::BranchingProcess,
) -> BranchingProcessDocument {
    let ln = LabelledNet {
        net: bp.net().clone(),
        place_label: bp.place_labels().to_vec(),
        transition_label: bp.transition_labels().to_vec(),
    };
    let d = labelled_net_to_doc(&ln, bp.base());
    BranchingProcessDocument {
        kind: "branching_process".into(),
        format_version: FORMAT_VERSION.into(),
        base: game_to_document(game),
        places: d.places,
        transitions: d.transitions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_round_trip_bit_exact() {
        for (name, text) in fixtures::GAMES {
            if *name == "broken_partition" {
                continue;
            }
            let g = parse_game_unchecked(text).unwrap();
            assert_eq!(serialize_game(&g), *text, "{name}");
        }
        let (g, bp) = fixtures::mcut_prefix().unwrap();
        assert_eq!(
            to_json(&branching_process_to_document(&g, &bp)),
            fixtures::MCUT_PREFIX
        );
    }

    #[test]
    fn same_decision_shape() {
        let g = parse_game(fixtures::SAME_DECISION, 10_000).unwrap();
        assert_eq!(g.net.num_places(), 9);
        assert_eq!(g.net.num_transitions(), 7);
        assert_eq!(g.bound, 2);
    }

    #[test]
    fn empty_places_is_a_schema_error() {
        let text = r#"{"kind":"game","format_version":"1","bound":1,"places":[],"transitions":[]}"#;
        assert!(matches!(parse_game(text, 10), Err(Error::Schema(_))));
    }

    #[test]
    fn syntax_errors_carry_a_location() {
        let err = parse_game("{\n  \"kind\": \"game\",\n  oops\n}", 10).unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn unknown_flow_place_names_the_field() {
        let text = r#"{"kind":"game","format_version":"1","bound":1,
            "places":[{"id":"e","owner":"environment","initial":1}],
            "transitions":[{"id":"t","pre":{"e":1},"post":{"x":1}}]}"#;
        let err = parse_game(text, 10).unwrap_err();
        assert_eq!(
            err,
            Error::Schema("transitions[0].post: unknown place `x`".into())
        );
    }

    #[test]
    fn broken_partition_is_rejected() {
        assert!(parse_game(fixtures::BROKEN_PARTITION, 100).is_err());
    }

    #[test]
    fn strategy_and_controllers_round_trip() {
        let g = fixtures::game("same_decision_full").unwrap();
        let s = crate::strategy::synthesize(&g, Default::default(), 1_000_000)
            .unwrap()
            .strategy
            .unwrap();
        let text = to_json(&strategy_to_document(&s, &g.net));
        let back = parse_strategy(&text, &g.net).unwrap();
        assert_eq!(back, s);
        assert_eq!(to_json(&strategy_to_document(&back, &g.net)), text);
        let cs = crate::distribution::to_local_controllers(&g, &s).unwrap();
        let doc = controllers_to_document(&cs, &g.net);
        let text = to_json(&doc);
        let Document::Controllers(read) = read_document(&text).unwrap() else {
            panic!("wrong kind");
        };
        assert_eq!(controllers_from_document(&read, &g.net).unwrap(), cs);
    }

    #[test]
    fn strategy_with_foreign_label_is_rejected() {
        let g = fixtures::game("same_decision").unwrap();
        let text = r#"{"kind":"strategy","format_version":"1",
            "places":[{"id":"x","label":"nowhere","initial":1}],"transitions":[]}"#;
        assert!(matches!(
            parse_strategy(text, &g.net),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn pump_is_inconclusive() {
        assert_eq!(parse_game(fixtures::PUMP, 500), Err(Error::StateLimit(500)));
    }
}
