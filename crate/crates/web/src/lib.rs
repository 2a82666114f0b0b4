//! Browser bindings. Every export takes game JSON text and returns JSON or
//! DOT text; errors come back as plain messages.

use petri_synth::io::{self, fixtures};
use petri_synth::{
    dot, simulate_play, synthesize, to_local_controllers, unfold_prefix, DReading, PetriGame,
    RandomChooser,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const STATE_LIMIT: usize = 200_000;

fn load(text: &str) -> Result<PetriGame, String> {
    io::parse_game(text, STATE_LIMIT).map_err(|e| e.to_string())
}

/// Names of the bundled games, as a JSON array.
#[wasm_bindgen]
pub fn fixture_names() -> String {
    let names: Vec<&str> = fixtures::GAMES
        .iter()
        .map(|(n, _)| *n)
        .filter(|n| *n != "broken_partition" && *n != "pump")
        .collect();
    serde_json::to_string(&names).unwrap()
}

#[wasm_bindgen]
pub fn fixture_text(name: &str) -> Result<String, String> {
    fixtures::text(name)
        .map(str::to_string)
        .ok_or_else(|| format!("no bundled game `{name}`"))
}

#[derive(Serialize)]
struct SolveResult {
    realizable: bool,
    states: usize,
    initial_states: usize,
    winning_initial_states: usize,
    game_dot: String,
    strategy_dot: Option<String>,
    controllers_dot: Option<String>,
}

/// Solves a game and renders the net, the strategy and its controllers.
#[wasm_bindgen]
pub fn solve(text: &str) -> Result<String, String> {
    let g = load(text)?;
    let s = synthesize(&g, DReading::default(), STATE_LIMIT).map_err(|e| e.to_string())?;
    let controllers_dot = match &s.strategy {
        Some(st) => to_local_controllers(&g, st)
            .ok()
            .map(|cs| dot::controllers_to_dot(&g, &cs)),
        None => None,
    };
    let out = SolveResult {
        realizable: s.solution.realizable(),
        states: s.graph.len(),
        initial_states: s.graph.initial.len(),
        winning_initial_states: s.solution.winning_initials.len(),
        game_dot: dot::game_to_dot(&g),
        strategy_dot: s.strategy.as_ref().map(|st| dot::strategy_to_dot(&g, st)),
        controllers_dot,
    };
    Ok(serde_json::to_string(&out).unwrap())
}

/// DOT text of the unfolding prefix up to `depth`.
#[wasm_bindgen]
pub fn unfold(text: &str, depth: u32) -> Result<String, String> {
    let g = load(text)?;
    let bp = unfold_prefix(&g.net, depth.min(8)).map_err(|e| e.to_string())?;
    Ok(dot::branching_process_to_dot(&g, &bp))
}

#[derive(Serialize)]
struct Step {
    transition: String,
    marking: String,
}

/// A seeded random play of the synthesized strategy, labelled in the game.
#[wasm_bindgen]
pub fn simulate(text: &str, seed: u64, max_steps: usize) -> Result<String, String> {
    let g = load(text)?;
    let st = synthesize(&g, DReading::default(), STATE_LIMIT)
        .map_err(|e| e.to_string())?
        .strategy
        .ok_or("game is not realizable")?;
    let play = simulate_play(&st, &mut RandomChooser::seeded(seed), max_steps)
        .map_err(|e| e.to_string())?;
    let show = |m: &petri_synth::Marking| g.net.show_marking(&m.map(|p| st.place_label[p.index()]));
    let mut steps = vec![Step {
        transition: String::new(),
        marking: show(&play.initial),
    }];
    for (t, m) in &play.steps {
        steps.push(Step {
            transition: g
                .net
                .transition_name(st.transition_label[t.index()])
                .to_string(),
            marking: show(m),
        });
    }
    Ok(serde_json::to_string(&steps).unwrap())
}
