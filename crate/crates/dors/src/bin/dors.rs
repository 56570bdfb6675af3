//! Batch command-line front end: solve one program, learn a policy
//! from a directory of instances, evaluate baseline against guided
//! search, run the renaming pipeline, and generate benchmark
//! instances.
//!
//! Exit codes: 0 model found / task succeeded, 10 no model, 1 usage
//! error, 2 I/O or format error, 3 resource limit hit.

use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use dors::bench::{
    gen_p1, gen_puzzle, parallel_map, run_experiment, Board, EvalReport, EvalRow,
    ExperimentConfig, PuzzleSpec, Threshold, TrainSide,
};
use dors::core::{GroundProgram, PartialAnswerSet};
use dors::policy::Policy;
use dors::search::{
    solve_with, Heuristic, RandomSeed, SolveConfig, SolveError, SolveOutcome, SolveStatus,
};
use dors::textio::{
    parse_program, read_instance, read_policy, render_program, write_policy, InstanceFile,
};

const EXIT_MODEL: i32 = 0;
const EXIT_NO_MODEL: i32 = 10;
const EXIT_USAGE: i32 = 1;
const EXIT_IO: i32 = 2;
const EXIT_LIMIT: i32 = 3;

#[derive(Parser)]
#[command(name = "dors", version, about = "Ground answer-set solver with learned choice-point heuristics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one ground program, optionally guided by a learned policy.
    Solve(SolveArgs),
    /// Run tracking solves over a directory of instances and learn a
    /// policy from the threshold split.
    Learn(LearnArgs),
    /// Compare baseline and guided search over a directory of
    /// instances and write a CSV report.
    Eval(EvalArgs),
    /// Rename grounder-introduced auxiliary atoms deterministically.
    Postp(PostpArgs),
    /// Apply the mock grounder translation to bounded choice rules.
    Mockground(MockgroundArgs),
    /// Generate benchmark instances.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    #[arg(long)]
    policy: Option<PathBuf>,
    /// Override the policy's scaling factor.
    #[arg(long)]
    delta: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_decisions: Option<u64>,
    #[arg(long)]
    timeout_secs: Option<u64>,
    /// Print run statistics on stderr.
    #[arg(long)]
    stats: bool,
}

#[derive(Args)]
struct LearnArgs {
    #[arg(long)]
    instances: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    delta: u32,
    #[arg(long, conflicts_with = "threshold_secs")]
    threshold_decisions: Option<u64>,
    #[arg(long)]
    threshold_secs: Option<f64>,
    #[arg(long, value_parser = parse_train_side, default_value = "below")]
    train_side: TrainSide,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    instances: PathBuf,
    #[arg(long)]
    policy: PathBuf,
    #[arg(long)]
    report: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    max_decisions: Option<u64>,
}

#[derive(Args)]
struct PostpArgs {
    file: PathBuf,
    #[arg(short)]
    output: PathBuf,
}

#[derive(Args)]
struct MockgroundArgs {
    file: PathBuf,
    #[arg(short)]
    output: PathBuf,
    #[arg(long, default_value_t = 0)]
    aux_seed: u64,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Sliding-tile planning instances, scrambled backwards from the
    /// goal.
    Puzzle(GenPuzzleArgs),
    /// The inconsistent two-cycle family.
    P1(GenP1Args),
}

#[derive(Args)]
struct GenPuzzleArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    count: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_parser = parse_board, default_value = "3x3")]
    board: Board,
}

#[derive(Args)]
struct GenP1Args {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    consistent: bool,
    #[arg(long)]
    out: PathBuf,
}

fn parse_train_side(s: &str) -> Result<TrainSide, String> {
    match s {
        "above" => Ok(TrainSide::Above),
        "below" => Ok(TrainSide::Below),
        _ => Err("expected `above` or `below`".into()),
    }
}

fn parse_board(s: &str) -> Result<Board, String> {
    match s {
        "3x3" => Ok(Board::ThreeByThree),
        "2x2" => Ok(Board::TwoByTwo),
        _ => Err("expected `3x3` or `2x2`".into()),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    let code = match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Learn(args) => cmd_learn(&args),
        Command::Eval(args) => cmd_eval(&args),
        Command::Postp(args) => cmd_postp(&args),
        Command::Mockground(args) => cmd_mockground(&args),
        Command::Gen(GenCommand::Puzzle(args)) => cmd_gen_puzzle(&args),
        Command::Gen(GenCommand::P1(args)) => cmd_gen_p1(&args),
    };
    std::process::exit(code);
}

fn fail_io(message: impl std::fmt::Display) -> i32 {
    eprintln!("error: {message}");
    EXIT_IO
}

fn read_program(path: &Path) -> Result<GroundProgram, i32> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail_io(format_args!("{}: {e}", path.display())))?;
    parse_program(&text).map_err(|e| fail_io(format_args!("{}: {e}", path.display())))
}

fn load_policy(path: &Path) -> Result<Policy, i32> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail_io(format_args!("{}: {e}", path.display())))?;
    read_policy(&text).map_err(|e| fail_io(format_args!("{}: {e}", path.display())))
}

fn print_model(outcome: &SolveOutcome) {
    let model = outcome.model.as_ref().expect("model status implies a model");
    let line = model
        .iter()
        .map(|l| l.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    println!("{line}");
}

fn cmd_solve(args: &SolveArgs) -> i32 {
    let program = match read_program(&args.file) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let policy = match &args.policy {
        None => None,
        Some(path) => match load_policy(path) {
            Ok(p) => Some(match args.delta {
                Some(d) if d >= 1 => p.with_delta(d),
                Some(_) => return fail_io("delta must be at least 1"),
                None => p,
            }),
            Err(code) => return code,
        },
    };
    let subclass = program.subclass().cloned();
    let heuristic = match &policy {
        None => None,
        Some(policy) => {
            let Some(subclass) = &subclass else {
                return fail_io("policy-guided solving requires a `%! subclass:` header");
            };
            Some(Heuristic::Policy {
                policy,
                subclass,
                seed: RandomSeed(args.seed),
            })
        }
    };
    let config = SolveConfig {
        heuristic,
        max_decisions: args.max_decisions,
        timeout: args.timeout_secs.map(Duration::from_secs),
        ..SolveConfig::default()
    };
    match solve_with(&program, &PartialAnswerSet::new(), &config) {
        Ok(outcome) => {
            if args.stats {
                eprintln!(
                    "decisions={} backtracks={} expand_calls={} policy_hits={}",
                    outcome.stats.decision_count,
                    outcome.stats.backtrack_count,
                    outcome.stats.expand_calls,
                    outcome.stats.policy_hits
                );
            }
            match outcome.status {
                SolveStatus::Model => {
                    print_model(&outcome);
                    EXIT_MODEL
                }
                SolveStatus::NoModel => {
                    println!("UNSATISFIABLE");
                    EXIT_NO_MODEL
                }
            }
        }
        Err(err @ (SolveError::DecisionLimit { .. } | SolveError::Timeout { .. })) => {
            eprintln!("error: {err}");
            EXIT_LIMIT
        }
        Err(err) => fail_io(err),
    }
}

fn load_instance_dir(dir: &Path) -> Result<Vec<InstanceFile>, i32> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| fail_io(format_args!("{}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "lp"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(fail_io(format_args!(
            "{}: no .lp instance files found",
            dir.display()
        )));
    }
    let mut instances = Vec::with_capacity(paths.len());
    for path in paths {
        instances.push(read_instance(&path).map_err(|e| fail_io(e))?);
    }
    Ok(instances)
}

fn cmd_learn(args: &LearnArgs) -> i32 {
    let instances = match load_instance_dir(&args.instances) {
        Ok(i) => i,
        Err(code) => return code,
    };
    let threshold = match (args.threshold_decisions, args.threshold_secs) {
        (Some(d), _) => Threshold::Decisions(d),
        (None, Some(s)) => Threshold::Seconds(s),
        (None, None) => Threshold::None,
    };
    let config = ExperimentConfig {
        delta: args.delta,
        threshold,
        train_side: args.train_side,
        seed: args.seed,
        jobs: args.jobs,
        max_decisions: None,
    };
    let (policy, _report) = run_experiment(&instances, &config);
    if policy.is_empty() {
        eprintln!("warning: training split is empty; writing an empty policy");
    }
    match std::fs::write(&args.out, write_policy(&policy)) {
        Ok(()) => EXIT_MODEL,
        Err(e) => fail_io(format_args!("{}: {e}", args.out.display())),
    }
}

fn cmd_eval(args: &EvalArgs) -> i32 {
    let instances = match load_instance_dir(&args.instances) {
        Ok(i) => i,
        Err(code) => return code,
    };
    let policy = match load_policy(&args.policy) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let runs = parallel_map(instances.len(), args.jobs, |i| {
        let inst = &instances[i];
        let baseline = timed_run(&inst.program, None, args.max_decisions);
        let guided = timed_run(
            &inst.program,
            Some(Heuristic::Policy {
                policy: &policy,
                subclass: &inst.subclass,
                seed: RandomSeed(args.seed.wrapping_add(i as u64)),
            }),
            args.max_decisions,
        );
        (baseline, guided)
    });
    let mut rows = Vec::new();
    for (inst, (baseline, guided)) in instances.iter().zip(runs) {
        let id = inst
            .path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        for (variant, run) in [("baseline", baseline), ("dspec", guided)] {
            rows.push(EvalRow {
                instance: id.clone(),
                subclass: inst.subclass.clone(),
                variant,
                status: run.0,
                stats: run.1,
                millis: run.2,
            });
        }
    }
    rows.sort_by(|a, b| (&a.instance, a.variant).cmp(&(&b.instance, b.variant)));
    let report = EvalReport { rows };
    match std::fs::write(&args.report, report.to_csv()) {
        Ok(()) => EXIT_MODEL,
        Err(e) => fail_io(format_args!("{}: {e}", args.report.display())),
    }
}

fn timed_run(
    program: &GroundProgram,
    heuristic: Option<Heuristic<'_>>,
    max_decisions: Option<u64>,
) -> (&'static str, dors::policy::SolveStats, u128) {
    let start = std::time::Instant::now();
    let config = SolveConfig {
        heuristic,
        max_decisions,
        ..SolveConfig::default()
    };
    let result = solve_with(program, &PartialAnswerSet::new(), &config);
    let millis = start.elapsed().as_millis();
    match result {
        Ok(outcome) => (
            match outcome.status {
                SolveStatus::Model => "model",
                SolveStatus::NoModel => "no_model",
            },
            outcome.stats,
            millis,
        ),
        Err(SolveError::DecisionLimit { stats, .. }) | Err(SolveError::Timeout { stats, .. }) => {
            ("limit", stats, millis)
        }
        Err(_) => ("limit", Default::default(), millis),
    }
}

fn cmd_postp(args: &PostpArgs) -> i32 {
    let program = match read_program(&args.file) {
        Ok(p) => p,
        Err(code) => return code,
    };
    match dors::postp::postprocess(&program) {
        Ok(outcome) => {
            for line in &outcome.diagnostics {
                eprintln!("note: {line}");
            }
            match std::fs::write(&args.output, render_program(&outcome.program)) {
                Ok(()) => EXIT_MODEL,
                Err(e) => fail_io(format_args!("{}: {e}", args.output.display())),
            }
        }
        Err(e) => fail_io(e),
    }
}

fn cmd_mockground(args: &MockgroundArgs) -> i32 {
    let program = match read_program(&args.file) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let grounded = dors::postp::mock_ground(&program, RandomSeed(args.aux_seed));
    match std::fs::write(&args.output, render_program(&grounded)) {
        Ok(()) => EXIT_MODEL,
        Err(e) => fail_io(format_args!("{}: {e}", args.output.display())),
    }
}

fn cmd_gen_puzzle(args: &GenPuzzleArgs) -> i32 {
    if let Err(e) = std::fs::create_dir_all(&args.out) {
        return fail_io(format_args!("{}: {e}", args.out.display()));
    }
    for i in 0..args.count {
        let spec = PuzzleSpec {
            board: args.board,
            scramble_moves: args.k,
            seed: args.seed.wrapping_add(u64::from(i)),
        };
        let program = match gen_puzzle(&spec) {
            Ok(p) => p,
            Err(e) => return fail_io(e),
        };
        let path = args.out.join(format!("puzzle_k{}_{:03}.lp", args.k, i));
        if let Err(e) = std::fs::write(&path, render_program(&program)) {
            return fail_io(format_args!("{}: {e}", path.display()));
        }
    }
    EXIT_MODEL
}

fn cmd_gen_p1(args: &GenP1Args) -> i32 {
    let program = gen_p1(args.n, args.consistent);
    match std::fs::write(&args.out, render_program(&program)) {
        Ok(()) => EXIT_MODEL,
        Err(e) => fail_io(format_args!("{}: {e}", args.out.display())),
    }
}
