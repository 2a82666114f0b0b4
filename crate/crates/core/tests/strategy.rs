use std::collections::BTreeSet;

use petri_synth::io::fixtures;
use petri_synth::*;

const LIMIT: usize = 1_000_000;

fn strategy(name: &str) -> (PetriGame, StrategyNet) {
    let g = fixtures::game(name).unwrap();
    let s = synthesize(&g, DReading::default(), LIMIT)
        .unwrap()
        .strategy
        .unwrap();
    (g, s)
}

fn names(net: &PTNet, skip: &[&str]) -> BTreeSet<String> {
    net.place_ids()
        .map(|p| net.place_name(p).to_string())
        .chain(
            net.transition_ids()
                .map(|t| net.transition_name(t).to_string()),
        )
        .filter(|n| !skip.contains(&n.as_str()))
        .collect()
}

/// Labels of `net` given by name lookups into `base`.
fn labels_by_name(net: PTNet, label_of: impl Fn(&str) -> String, base: &PTNet) -> StrategyNet {
    let place_label = net
        .place_ids()
        .map(|p| base.place(&label_of(net.place_name(p))).unwrap())
        .collect();
    let transition_label = net
        .transition_ids()
        .map(|t| {
            base.transition_id(&label_of(net.transition_name(t)))
                .unwrap()
        })
        .collect();
    StrategyNet {
        net,
        place_label,
        transition_label,
    }
}

/// The game without the bad transition, unfolded and relabelled into the game.
fn full_unfolding(g: &PetriGame) -> StrategyNet {
    let restricted = g.net.restrict(&names(&g.net, &["t_bot", "bot"]));
    let bp = unfold_prefix(&restricted, 6).unwrap();
    let occ = bp.net();
    let label: std::collections::HashMap<String, String> = occ
        .place_ids()
        .map(|p| {
            (
                occ.place_name(p).to_string(),
                restricted.place_name(bp.place_label(p)).to_string(),
            )
        })
        .chain(occ.transition_ids().map(|t| {
            (
                occ.transition_name(t).to_string(),
                restricted
                    .transition_name(bp.transition_label(t))
                    .to_string(),
            )
        }))
        .collect();
    labels_by_name(occ.clone(), |n| label[n].clone(), &g.net)
}

#[test]
fn game_unfolding_has_six_copies_of_each_system_branch() {
    // two Sys tokens initially, two more after each test; every Sys condition
    // branches into t1' and t2'
    let g = fixtures::game("same_decision").unwrap();
    let restricted = g.net.restrict(&names(&g.net, &["t_bot", "bot"]));
    let bp = unfold_prefix(&restricted, 6).unwrap();
    assert_eq!(bp.places_labelled("Sys").len(), 6);
    assert_eq!(bp.places_labelled("A'").len(), 6);
    assert_eq!(bp.places_labelled("B'").len(), 6);
    assert_eq!(bp.transitions_labelled("t1'").len(), 6);
    assert_eq!(bp.transitions_labelled("t2'").len(), 6);
    assert_eq!(bp.transitions_labelled("test1").len(), 1);
    // depth is saturated
    let deeper = unfold_prefix(&restricted, 9).unwrap();
    assert_eq!(deeper.net().num_places(), bp.net().num_places());
}

#[test]
fn alarm_report_place_has_four_copies() {
    // pA is produced by A1, A3, tAA and tBB; A1 needs t1 and tA first
    let g = fixtures::game("alarm").unwrap();
    let bp = unfold_prefix(&g.net, 3).unwrap();
    assert_eq!(bp.places_labelled("pA").len(), 4);
    assert_eq!(
        unfold_prefix(&g.net, 1)
            .unwrap()
            .places_labelled("pA")
            .len(),
        1
    );
}

#[test]
fn strategy_unfolding_keeps_one_branch_per_test() {
    let (g, s) = strategy("same_decision_full");
    let bp = unfold_strategy(&s, &g.net, 10).unwrap();
    assert_eq!(bp.transitions_labelled("t1'").len(), 2);
    assert_eq!(bp.transitions_labelled("t2'").len(), 2);
    let test1 = bp.transitions_labelled("test1")[0];
    for t in bp.transitions_labelled("t1'") {
        assert!(bp
            .causal_leq(net::Node::Transition(test1), net::Node::Transition(t))
            .unwrap());
    }
}

#[test]
fn unrestricted_unfolding_violates_determinism() {
    let g = fixtures::game("same_decision").unwrap();
    let s = full_unfolding(&g);
    let r = verify_strategy(&g, &s, LIMIT).unwrap();
    assert!(!r.s1_ok);
    assert!(r.counterexamples.contains_key("s1"));
    assert!(r.structure.iter().all(|c| c.ok), "{:?}", r.structure);
}

#[test]
fn dropping_an_environment_branch_violates_s2() {
    let (g, s) = strategy("same_decision_full");
    let t2 = s
        .net
        .transition_ids()
        .find(|t| g.net.transition_name(s.transition_label[t.index()]) == "t2")
        .unwrap();
    let cut = s.net.restrict(&names(&s.net, &[s.net.transition_name(t2)]));
    let label = |n: &str| -> String {
        match s.net.place(n) {
            Some(p) => g.net.place_name(s.place_label[p.index()]).to_string(),
            None => {
                let t = s.net.transition_id(n).unwrap();
                g.net
                    .transition_name(s.transition_label[t.index()])
                    .to_string()
            }
        }
    };
    let pruned = labels_by_name(cut, label, &g.net);
    let r = verify_strategy(&g, &pruned, LIMIT).unwrap();
    assert!(!r.s2_ok);
    assert!(r.s1_ok);
    assert_eq!(
        r.counterexamples["s2"].marking,
        *pruned.net.initial_marking()
    );
}

#[test]
fn verification_agrees_with_the_solver() {
    for name in ["same_decision", "same_decision_full", "alarm"] {
        let (g, s) = strategy(name);
        let r = verify_strategy(&g, &s, LIMIT).unwrap();
        assert!(r.all_ok(), "{name}: {r:?}");
        assert!(r.counterexamples.is_empty());
    }
}

#[test]
fn unrealizable_game_has_no_strategy() {
    let g = fixtures::game("same_decision_no_tests").unwrap();
    let s = synthesize(&g, DReading::default(), LIMIT).unwrap();
    assert!(s.strategy.is_none());
    let dg = DecisionGame::new(&g);
    assert_eq!(
        extract_strategy(&dg, &s.graph, &s.solution),
        Err(Error::Unrealizable)
    );
}

#[test]
fn initial_cut_is_the_initial_decision_state() {
    let (g, s) = strategy("same_decision");
    let bp = unfold_strategy(&s, &g.net, 6).unwrap();
    let cut = bp.initial_cut();
    let env = *cut.iter().find(|p| g.is_env(bp.place_label(**p))).unwrap();
    let types = bp.cut_types(&g, &cut, env).unwrap().unwrap();
    let ds = decision_set_of_cut(&bp, &cut, &types).unwrap();
    let dg = DecisionGame::new(&g);
    let v0: DecisionSet = [
        (dg.entry("Env", 1, Some(&["t1", "t2"])).unwrap(), 1),
        (dg.entry("Sys", 1, Some(&["test1", "test2"])).unwrap(), 2),
    ]
    .into_iter()
    .collect();
    assert_eq!(ds, v0);
}

#[test]
fn cut_after_test1_and_two_t1_is_terminal_and_won() {
    let (g, s) = strategy("same_decision");
    let bp = unfold_strategy(&s, &g.net, 6).unwrap();
    let want = g.net.marking(&[("EA", 1), ("A'", 2)]).unwrap();
    let cuts = bp.enumerate_cuts(10_000).unwrap();
    let cut = cuts
        .iter()
        .find(|c| bp.label_marking(c) == want)
        .expect("cut reached by t1, test1, t1', t1'");
    let ea = *cut.iter().find(|p| g.is_env(bp.place_label(**p))).unwrap();
    let types = bp.cut_types(&g, cut, ea).unwrap().unwrap();
    let ds = decision_set_of_cut(&bp, cut, &types).unwrap();
    let dg = DecisionGame::new(&g);
    assert_eq!(DecisionGame::marking(&ds), want);
    assert_eq!(
        dg.classify_terminal(&ds),
        Outcome::P0Win(P0Reason::Termination)
    );
}

#[test]
fn random_plays_never_reach_a_bad_place() {
    for name in ["same_decision", "same_decision_full", "alarm"] {
        let (g, s) = strategy(name);
        for seed in 0..1000 {
            let play = simulate_play(&s, &mut RandomChooser::seeded(seed), 100).unwrap();
            assert!(!play.truncated);
            for m in play.markings() {
                assert!(
                    m.support().all(|p| !g.is_bad(s.place_label[p.index()])),
                    "{name} seed {seed}"
                );
            }
        }
    }
}

#[test]
fn first_enabled_play_is_reproducible() {
    let (g, s) = strategy("same_decision_full");
    let a = simulate_play(&s, &mut FirstEnabled, 100).unwrap();
    let b = simulate_play(&s, &mut FirstEnabled, 100).unwrap();
    assert_eq!(a, b);
    let labels: Vec<&str> = a
        .steps
        .iter()
        .map(|(t, _)| g.net.transition_name(s.transition_label[t.index()]))
        .collect();
    assert_eq!(labels.len(), 4);
    assert!(labels[..2] == ["t1", "test1"] || labels[..2] == ["t2", "test2"]);
    let last = &a.steps.last().unwrap().1;
    assert!(s.net.transition_ids().all(|t| !s.net.is_enabled(last, t)));
}

#[test]
fn closure_chooser_and_truncation() {
    let (_, s) = strategy("same_decision_full");
    let mut last = |_: &Marking, enabled: &[TransitionId]| enabled.len() - 1;
    let play = simulate_play(&s, &mut last, 1).unwrap();
    assert!(play.truncated);
    assert_eq!(play.steps.len(), 1);
}
