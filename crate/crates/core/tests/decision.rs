use petri_synth::dot::{game_graph_to_dot, GraphDotOptions};
use petri_synth::io::fixtures;
use petri_synth::*;

fn states(dg: &DecisionGame) -> Vec<DecisionSet> {
    let e = |p: &str, c: &[&str]| dg.entry(p, 1, Some(c)).unwrap();
    let ea = || (e("EA", &["t_bot"]), 1);
    let sets: Vec<Vec<(Entry, u32)>> = vec![
        vec![
            (e("Env", &["t1", "t2"]), 1),
            (e("Sys", &["test1", "test2"]), 2),
        ],
        vec![ea(), (e("Sys", &[]), 2)],
        vec![ea(), (e("Sys", &["t1'", "t2'"]), 1), (e("Sys", &[]), 1)],
        vec![ea(), (e("A'", &[]), 2)],
        vec![ea(), (e("B'", &[]), 2)],
        vec![ea(), (e("Sys", &["t2'"]), 1), (e("bot", &[]), 1)],
        vec![ea(), (e("bot", &[]), 1), (e("B'", &["t_bot"]), 1)],
        vec![ea(), (e("bot", &[]), 1), (e("B'", &[]), 1)],
    ];
    sets.into_iter().map(|s| s.into_iter().collect()).collect()
}

#[test]
fn fragment_export_has_eight_named_states() {
    let g = fixtures::game("same_decision").unwrap();
    let dg = DecisionGame::new(&g);
    let vs = states(&dg);
    let mut sorted = vs.clone();
    sorted.sort();
    let index = |ds: &DecisionSet| sorted.binary_search(ds).unwrap();
    let fire = |t: &str, from: usize, to: usize| {
        let transition = g.net.transition_id(t).unwrap();
        let consumed = vs[from]
            .iter()
            .filter(|(e, _)| e.allows(transition))
            .map(|(e, n)| (e.clone(), n))
            .collect();
        (
            index(&vs[from]),
            Move::Fire {
                transition,
                consumed,
            },
            index(&vs[to]),
        )
    };
    let mut edges = vec![fire("t_bot", 6, 7)];
    edges.sort();
    let fragment = GameGraph::from_parts(
        sorted.clone(),
        sorted.iter().map(|ds| dg.owner(ds)).collect(),
        sorted.iter().map(|ds| dg.classify_terminal(ds)).collect(),
        vec![index(&vs[0])],
        edges,
    );
    let names = (0..8).map(|i| (index(&vs[i]), format!("v{i}"))).collect();
    let opts = GraphDotOptions {
        states: None,
        names,
    };
    let d = game_graph_to_dot(&dg, &fragment, &opts);
    assert_eq!(d, game_graph_to_dot(&dg, &fragment, &opts));
    let line = |i: usize| {
        let tag = format!("label=\"v{i}\"");
        d.lines().find(|l| l.contains(&tag)).unwrap().to_string()
    };
    for i in 0..8 {
        assert!(d.contains(&format!("label=\"v{i}\"")));
    }
    assert!(line(0).contains("shape=diamond"));
    assert!(!line(0).contains("peripheries") && !line(0).contains("bold"));
    assert!(line(2).contains("shape=box"));
    assert!(line(3).contains("peripheries=2"));
    for i in [1, 2, 4, 5, 6, 7] {
        assert!(line(i).contains("style=bold"), "v{i}: {}", line(i));
    }
    assert!(d.contains("[label=\"t_bot\"]"));
    assert_eq!(d.matches("shape=point").count(), 1);
}

#[test]
fn whole_set_reading_agrees_on_the_examples() {
    for (name, want) in [("same_decision", true), ("same_decision_no_tests", false)] {
        let g = fixtures::game(name).unwrap();
        let s = synthesize(&g, DReading::WholeSet, 1_000_000).unwrap();
        assert_eq!(s.solution.realizable(), want, "{name}");
    }
}

#[test]
fn terminal_states_reject_moves() {
    let g = fixtures::game("same_decision").unwrap();
    let dg = DecisionGame::new(&g);
    let vs = states(&dg);
    assert!(dg.successors(&vs[3]).is_err());
    assert!(!dg.successors(&vs[0]).unwrap().is_empty());
}

#[test]
fn state_limit_is_reported() {
    let g = fixtures::game("alarm").unwrap();
    let dg = DecisionGame::new(&g);
    assert_eq!(
        build_game_graph(&dg, 10).unwrap_err(),
        Error::StateLimit(10)
    );
}
