//! Graphviz output. All functions are deterministic in their input.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::decision::{DecisionGame, GameGraph, Move, Player};
use crate::game::PetriGame;
use crate::io::LabelledNet;
use crate::net::{PTNet, PlaceId};
use crate::unfolding::BranchingProcess;

/// Quotes a label; `\n` sequences are kept as DOT line breaks.
fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\\\""))
}

#[derive(Default)]
struct Style<'a> {
    system: Option<&'a BTreeSet<PlaceId>>,
    bad: Option<&'a BTreeSet<PlaceId>>,
}

/// Writes places, transitions and arcs with node ids prefixed by `prefix`.
fn write_net(
    out: &mut String,
    net: &PTNet,
    prefix: &str,
    labels: Option<&LabelledNet>,
    base: Option<&PTNet>,
    style: &Style,
    indent: &str,
) {
    for p in net.place_ids() {
        let mut label = net.place_name(p).to_string();
        if let (Some(l), Some(b)) = (labels, base) {
            let lp = b.place_name(l.place_label[p.index()]);
            if lp != label {
                label = format!("{label}\\n[{lp}]");
            }
        }
        let tokens = net.initial_marking().count(&p);
        if tokens > 0 {
            label = format!("{label}\\n{tokens}");
        }
        let key = labels.map(|l| l.place_label[p.index()]).unwrap_or(p);
        let mut attrs = format!("shape=circle, label={}", quote(&label));
        if style.system.is_some_and(|s| s.contains(&key)) {
            attrs.push_str(", style=filled, fillcolor=gray80");
        }
        if style.bad.is_some_and(|s| s.contains(&key)) {
            attrs.push_str(", peripheries=2");
        }
        let _ = writeln!(out, "{indent}{prefix}p{} [{attrs}];", p.0);
    }
    for t in net.transition_ids() {
        let mut label = net.transition_name(t).to_string();
        if let (Some(l), Some(b)) = (labels, base) {
            let lt = b.transition_name(l.transition_label[t.index()]);
            if lt != label {
                label = format!("{label}\\n[{lt}]");
            }
        }
        let _ = writeln!(
            out,
            "{indent}{prefix}t{} [shape=box, label={}];",
            t.0,
            quote(&label)
        );
        for (p, n) in net.pre(t).iter() {
            let w = if n > 1 {
                format!(" [label=\"{n}\"]")
            } else {
                String::new()
            };
            let _ = writeln!(out, "{indent}{prefix}p{} -> {prefix}t{}{w};", p.0, t.0);
        }
        for (p, n) in net.post(t).iter() {
            let w = if n > 1 {
                format!(" [label=\"{n}\"]")
            } else {
                String::new()
            };
            let _ = writeln!(out, "{indent}{prefix}t{} -> {prefix}p{}{w};", t.0, p.0);
        }
    }
}

pub fn net_to_dot(net: &PTNet) -> String {
    let mut out = String::from("digraph net {\n");
    write_net(&mut out, net, "", None, None, &Style::default(), "  ");
    out.push_str("}\n");
    out
}

/// A game net: system places in gray, bad places with a double border.
pub fn game_to_dot(g: &PetriGame) -> String {
    let mut out = String::from("digraph game {\n");
    let style = Style {
        system: Some(&g.system),
        bad: Some(&g.bad),
    };
    write_net(&mut out, &g.net, "", None, None, &style, "  ");
    out.push_str("}\n");
    out
}

fn labelled(name: &str, ln: &LabelledNet, g: &PetriGame) -> String {
    let mut out = format!("digraph {name} {{\n");
    let style = Style {
        system: Some(&g.system),
        bad: Some(&g.bad),
    };
    write_net(&mut out, &ln.net, "", Some(ln), Some(&g.net), &style, "  ");
    out.push_str("}\n");
    out
}

pub fn branching_process_to_dot(g: &PetriGame, bp: &BranchingProcess) -> String {
    let ln = LabelledNet {
        net: bp.net().clone(),
        place_label: bp.place_labels().to_vec(),
        transition_label: bp.transition_labels().to_vec(),
    };
    labelled("unfolding", &ln, g)
}

pub fn strategy_to_dot(g: &PetriGame, s: &LabelledNet) -> String {
    labelled("strategy", s, g)
}

/// Controllers as clusters; shared transition names mark synchronization.
pub fn controllers_to_dot(g: &PetriGame, cs: &[LabelledNet]) -> String {
    let mut out = String::from("digraph controllers {\n");
    let style = Style {
        system: Some(&g.system),
        bad: Some(&g.bad),
    };
    for (i, c) in cs.iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{i} {{");
        let _ = writeln!(out, "    label=\"controller {i}\";");
        write_net(
            &mut out,
            &c.net,
            &format!("c{i}_"),
            Some(c),
            Some(&g.net),
            &style,
            "    ",
        );
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

#[derive(Clone, Debug, Default)]
pub struct GraphDotOptions {
    /// Restrict output to these states; all states when `None`.
    pub states: Option<BTreeSet<usize>>,
    /// Display names replacing the decision-set text.
    pub names: BTreeMap<usize, String>,
}

/// Player-1 states as diamonds, Player-0 states as boxes, Player-0 wins
/// with a double border and Player-1 wins in bold.
pub fn game_graph_to_dot(dg: &DecisionGame, gg: &GameGraph, opts: &GraphDotOptions) -> String {
    let net = &dg.game.net;
    let shown = |v: usize| opts.states.as_ref().is_none_or(|s| s.contains(&v));
    let mut out = String::from("digraph decisions {\n");
    for v in (0..gg.len()).filter(|v| shown(*v)) {
        let label = opts
            .names
            .get(&v)
            .cloned()
            .unwrap_or_else(|| dg.show(&gg.states[v]));
        let shape = match gg.owner[v] {
            Player::Player1 => "diamond",
            Player::Player0 => "box",
        };
        let mut attrs = format!("shape={shape}, label={}", quote(&label));
        if gg.outcome[v].is_w0() {
            attrs.push_str(", peripheries=2");
        }
        if gg.outcome[v].is_w1() {
            attrs.push_str(", style=bold, penwidth=3");
        }
        let _ = writeln!(out, "  v{v} [{attrs}];");
    }
    for (k, v) in gg.initial.iter().filter(|v| shown(**v)).enumerate() {
        let _ = writeln!(out, "  init{k} [shape=point];");
        let _ = writeln!(out, "  init{k} -> v{v};");
    }
    for (s, mv, t) in &gg.edges {
        if !shown(*s) || !shown(*t) {
            continue;
        }
        let label = match mv {
            Move::Fire { transition, .. } => net.transition_name(*transition).to_string(),
            Move::Resolve { .. } => "resolve".to_string(),
        };
        let _ = writeln!(out, "  v{s} -> v{t} [label={}];", quote(&label));
    }
    out.push_str("}\n");
    out
}
