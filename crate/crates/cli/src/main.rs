use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use petri_synth::io::{self, Document};
use petri_synth::{
    build_game_graph, check_distribution, dot, simulate_play, synthesize, to_local_controllers,
    unfold_prefix, validate_game, verify_strategy, DReading, DecisionGame, Error, PetriGame,
    RandomChooser,
};

#[derive(Parser)]
#[command(
    name = "petri-synth",
    version,
    about = "Synthesis of distributed controllers from Petri games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Override the bound declared in the game file.
    #[arg(long)]
    bound: Option<u32>,
    /// Maximum number of explored states before giving up (exit code 3).
    #[arg(long, default_value_t = 1_000_000)]
    state_limit: usize,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Copy, Clone, ValueEnum)]
enum Reading {
    TypeTwoPart,
    WholeSet,
}

impl From<Reading> for DReading {
    fn from(r: Reading) -> Self {
        match r {
            Reading::TypeTwoPart => DReading::TypeTwoPart,
            Reading::WholeSet => DReading::WholeSet,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check that a game is well formed and bounded.
    Validate {
        game: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Decide whether a winning strategy exists.
    Solve {
        game: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "type-two-part")]
        reading: Reading,
    },
    /// Compute a winning strategy and write it as a strategy document.
    Synth {
        game: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "type-two-part")]
        reading: Reading,
    },
    /// Check a strategy document against its game.
    Verify {
        strategy: PathBuf,
        #[arg(long)]
        against: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Also print one random play of the strategy.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 50)]
        max_steps: usize,
    },
    /// Split a strategy into local controllers and check their composition.
    Distribute {
        strategy: PathBuf,
        #[arg(long)]
        against: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Unfold a game net up to a depth.
    Unfold {
        game: PathBuf,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Render any document, or the decision graph of a game.
    Export {
        input: PathBuf,
        /// Game the strategy or controllers are labelled with.
        #[arg(long)]
        against: Option<PathBuf>,
        /// For a game: export its decision graph instead of the net.
        #[arg(long)]
        graph: bool,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug)]
enum Failure {
    Negative(String),
    Input(String),
    Limit(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::StateLimit(_) => Failure::Limit(e.to_string()),
            Error::Unrealizable => Failure::Negative(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_game(path: &Path, common: &Common) -> Result<PetriGame, Failure> {
    let mut g = io::parse_game_unchecked(&read(path)?)?;
    if let Some(b) = common.bound {
        g.bound = b;
    }
    let report = validate_game(&g, common.state_limit);
    if report.bound_unknown() {
        return Err(Failure::Limit(format!(
            "boundedness unknown after {} states",
            common.state_limit
        )));
    }
    if !report.synthesizable() {
        let msgs: Vec<String> = report
            .failures()
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect();
        return Err(Failure::Input(msgs.join("; ")));
    }
    Ok(g)
}

fn validate(path: &Path, common: &Common) -> Outcome {
    let mut g = io::parse_game_unchecked(&read(path)?)?;
    if let Some(b) = common.bound {
        g.bound = b;
    }
    let report = validate_game(&g, common.state_limit);
    for c in &report.checks {
        let status = if c.ok { "ok" } else { "FAIL" };
        println!("{status:4} {}  {}", c.name, c.detail);
    }
    if report.bound_unknown() {
        Err(Failure::Limit(
            "boundedness unknown within the state limit".into(),
        ))
    } else if !report.synthesizable() {
        Err(Failure::Input("game is not synthesizable".into()))
    } else {
        Ok(())
    }
}

fn solve(path: &Path, common: &Common, reading: Reading) -> Outcome {
    let g = load_game(path, common)?;
    let s = synthesize(&g, reading.into(), common.state_limit)?;
    if common.format == Some(Format::Dot) {
        let dg = DecisionGame::with_reading(&g, reading.into());
        print!(
            "{}",
            dot::game_graph_to_dot(&dg, &s.graph, &Default::default())
        );
    } else {
        println!(
            "{} ({} states, {} of {} initial states winning)",
            if s.solution.realizable() {
                "realizable"
            } else {
                "unrealizable"
            },
            s.graph.len(),
            s.solution.winning_initials.len(),
            s.graph.initial.len()
        );
    }
    if s.solution.realizable() {
        Ok(())
    } else {
        Err(Failure::Negative("no winning strategy".into()))
    }
}

fn synth(path: &Path, output: Option<&Path>, common: &Common, reading: Reading) -> Outcome {
    let g = load_game(path, common)?;
    let s = synthesize(&g, reading.into(), common.state_limit)?;
    let strategy = s.strategy.ok_or(Error::Unrealizable)?;
    let text = match common.format {
        Some(Format::Dot) => dot::strategy_to_dot(&g, &strategy),
        _ => io::to_json(&io::strategy_to_document(&strategy, &g.net)),
    };
    write(output, &text)
}

fn verify(
    path: &Path,
    against: &Path,
    common: &Common,
    seed: Option<u64>,
    max_steps: usize,
) -> Outcome {
    let g = load_game(against, common)?;
    let s = io::parse_strategy(&read(path)?, &g.net)?;
    let r = verify_strategy(&g, &s, common.state_limit)?;
    let flag = |b: bool| if b { "ok" } else { "FAIL" };
    println!("{:4} s1", flag(r.s1_ok));
    println!("{:4} s2", flag(r.s2_ok));
    println!("{:4} deadlock-avoiding", flag(r.deadlock_avoiding));
    println!("{:4} winning", flag(r.winning));
    for c in &r.structure {
        println!("{:4} {}  {}", flag(c.ok), c.name, c.detail);
    }
    for (k, w) in &r.counterexamples {
        let m: Vec<String> = w
            .marking
            .iter()
            .map(|(p, n)| format!("{}:{n}", s.net.place_name(*p)))
            .collect();
        println!(
            "{k}: {} at {{{}}} after [{}]",
            w.detail,
            m.join(", "),
            w.trace
                .iter()
                .map(|t| s.net.transition_name(*t))
                .collect::<Vec<_>>()
                .join(" ")
        );
    }
    println!("{} reachable markings", r.reachable_markings);
    if let Some(seed) = seed {
        let play = simulate_play(&s, &mut RandomChooser::seeded(seed), max_steps)?;
        let names: Vec<&str> = play
            .steps
            .iter()
            .map(|(t, _)| s.net.transition_name(*t))
            .collect();
        println!("play (seed {seed}): {}", names.join(" "));
    }
    if r.all_ok() {
        Ok(())
    } else {
        Err(Failure::Negative("strategy fails verification".into()))
    }
}

fn distribute(path: &Path, against: &Path, output: Option<&Path>, common: &Common) -> Outcome {
    let g = load_game(against, common)?;
    let s = io::parse_strategy(&read(path)?, &g.net)?;
    let cs = to_local_controllers(&g, &s)?;
    let r = check_distribution(&s, &cs, common.state_limit)?;
    eprintln!(
        "{} controllers, composition {}",
        cs.len(),
        if r.ok {
            "isomorphic to the strategy"
        } else {
            "differs from the strategy"
        }
    );
    if let Some(w) = &r.witness {
        eprintln!("witness: {w}");
    }
    let text = match common.format {
        Some(Format::Dot) => dot::controllers_to_dot(&g, &cs),
        _ => io::to_json(&io::controllers_to_document(&cs, &g.net)),
    };
    write(output, &text)?;
    if r.ok {
        Ok(())
    } else {
        Err(Failure::Negative(
            "controllers do not reproduce the strategy".into(),
        ))
    }
}

fn unfold(path: &Path, depth: u32, common: &Common) -> Outcome {
    let g = load_game(path, common)?;
    let bp = unfold_prefix(&g.net, depth)?;
    let text = match common.format {
        Some(Format::Json) => io::to_json(&io::branching_process_to_document(&g, &bp)),
        _ => dot::branching_process_to_dot(&g, &bp),
    };
    write(None, &text)
}

fn export(path: &Path, against: Option<&Path>, graph: bool, common: &Common) -> Outcome {
    let text = read(path)?;
    let json = common.format == Some(Format::Json);
    let base = || -> Result<PetriGame, Failure> {
        let p = against
            .ok_or_else(|| Failure::Input("--against GAME is required for this document".into()))?;
        load_game(p, common)
    };
    let out = match io::read_document(&text)? {
        Document::Game(doc) => {
            let mut g = io::game_from_document(&doc)?;
            if let Some(b) = common.bound {
                g.bound = b;
            }
            if graph {
                let dg = DecisionGame::new(&g);
                let gg = build_game_graph(&dg, common.state_limit)?;
                dot::game_graph_to_dot(&dg, &gg, &Default::default())
            } else if json {
                io::serialize_game(&g)
            } else {
                dot::game_to_dot(&g)
            }
        }
        Document::Strategy(doc) => {
            let g = base()?;
            let s = io::strategy_from_document(&doc, &g.net)?;
            if json {
                io::to_json(&io::strategy_to_document(&s, &g.net))
            } else {
                dot::strategy_to_dot(&g, &s)
            }
        }
        Document::Controllers(doc) => {
            let g = base()?;
            let cs = io::controllers_from_document(&doc, &g.net)?;
            if json {
                io::to_json(&io::controllers_to_document(&cs, &g.net))
            } else {
                dot::controllers_to_dot(&g, &cs)
            }
        }
        Document::BranchingProcess(doc) => {
            let (g, bp) = io::branching_process_from_document(&doc)?;
            if json {
                io::to_json(&io::branching_process_to_document(&g, &bp))
            } else {
                dot::branching_process_to_dot(&g, &bp)
            }
        }
    };
    write(None, &out)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { game, common } => validate(&game, &common),
        Command::Solve {
            game,
            common,
            reading,
        } => solve(&game, &common, reading),
        Command::Synth {
            game,
            output,
            common,
            reading,
        } => synth(&game, output.as_deref(), &common, reading),
        Command::Verify {
            strategy,
            against,
            common,
            seed,
            max_steps,
        } => verify(&strategy, &against, &common, seed, max_steps),
        Command::Distribute {
            strategy,
            against,
            output,
            common,
        } => distribute(&strategy, &against, output.as_deref(), &common),
        Command::Unfold {
            game,
            depth,
            common,
        } => unfold(&game, depth, &common),
        Command::Export {
            input,
            against,
            graph,
            common,
        } => export(&input, against.as_deref(), graph, &common),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative(m)) => {
            eprintln!("{m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Limit(m)) => {
            eprintln!("resource limit: {m}");
            ExitCode::from(3)
        }
    }
}
