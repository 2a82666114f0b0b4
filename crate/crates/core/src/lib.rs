pub mod decision;
pub mod distribution;
pub mod dot;
pub mod error;
pub mod game;
pub mod io;
pub mod multiset;
pub mod net;
pub mod solver;
pub mod strategy;
pub mod unfolding;

pub use decision::{
    build_game_graph, Commitment, DReading, DecisionGame, DecisionSet, Entry, GameGraph, Move,
    Outcome, P0Reason, P1Reason, Player,
};
pub use distribution::{
    check_distribution, decompose_slices, to_local_controllers, DistributionReport,
    LocalController, Slice,
};
pub use dot::GraphDotOptions;
pub use error::{Error, Result};
pub use game::{validate_game, Check, PetriGame, ValidationReport};
pub use multiset::Multiset;
pub use net::{Boundedness, Marking, NetBuilder, Node, PTNet, PlaceId, TransitionId};
pub use solver::{solve, Solution};
pub use strategy::{
    decision_set_of_cut, extract_strategy, simulate_play, synthesize, unfold_strategy,
    verify_strategy, Chooser, FirstEnabled, Play, RandomChooser, StrategyNet, Synthesis,
    VerificationReport, Witness,
};
pub use unfolding::{unfold_prefix, validate_branching_process, BranchingProcess, Cut, PlaceType};
