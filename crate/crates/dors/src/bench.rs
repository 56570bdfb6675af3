//! Instance generation, the train/evaluate harness, and report
//! emission.
//!
//! The planning domain is a sliding-tile puzzle at desk scale: a 3x3
//! board for experiments and a 2x2 board small enough for end-to-end
//! cross-checks against explicit state-space search. Instances are
//! generated backwards — k random legal moves from the goal — so every
//! instance is solvable within its horizon, and the horizon doubles as
//! the subclass label.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::core::{
    Atom, BodyElement, GroundProgram, Literal, PartialAnswerSet, Rule, SubclassLabel, Term,
};
use crate::policy::{learn_policy, Policy, SolveStats, TrainingRecord};
use crate::postp::{augment, NameSpec};
use crate::search::{
    solve_with, Heuristic, RandomSeed, SolveConfig, SolveOutcome, SolveStatus,
};
use crate::textio::InstanceFile;

pub mod random;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("scramble length must be at least 1")]
    ZeroScramble,
}

/// Board size of the sliding-tile puzzle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Board {
    /// 3x3 grid, eight tiles; the experiment scale.
    ThreeByThree,
    /// 2x2 grid, three tiles; small enough for exhaustive oracles.
    TwoByTwo,
}

impl Board {
    pub fn side(self) -> u32 {
        match self {
            Board::ThreeByThree => 3,
            Board::TwoByTwo => 2,
        }
    }

    pub fn cells(self) -> u32 {
        self.side() * self.side()
    }

    pub fn tiles(self) -> u32 {
        self.cells() - 1
    }

    /// Cells orthogonally adjacent to `cell` (cells are numbered from 1
    /// in row-major order).
    pub fn neighbors(self, cell: u32) -> Vec<u32> {
        let side = self.side();
        let row = (cell - 1) / side;
        let col = (cell - 1) % side;
        let mut out = Vec::with_capacity(4);
        if row > 0 {
            out.push(cell - side);
        }
        if row + 1 < side {
            out.push(cell + side);
        }
        if col > 0 {
            out.push(cell - 1);
        }
        if col + 1 < side {
            out.push(cell + 1);
        }
        out
    }
}

/// Tile placement: `tile_at[c-1]` is the tile on cell c, 0 for the
/// blank.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoardState {
    pub board: Board,
    pub tile_at: Vec<u32>,
}

impl BoardState {
    /// Tiles 1..n in their home cells, blank on the last cell.
    pub fn goal(board: Board) -> BoardState {
        let mut tile_at: Vec<u32> = (1..=board.tiles()).collect();
        tile_at.push(0);
        BoardState { board, tile_at }
    }

    pub fn blank_cell(&self) -> u32 {
        self.tile_at.iter().position(|&t| t == 0).unwrap() as u32 + 1
    }

    /// Moves the tile on `cell` into the blank. `cell` must be adjacent
    /// to the blank.
    pub fn slide(&mut self, cell: u32) {
        let blank = self.blank_cell();
        debug_assert!(self.board.neighbors(blank).contains(&cell));
        self.tile_at[(blank - 1) as usize] = self.tile_at[(cell - 1) as usize];
        self.tile_at[(cell - 1) as usize] = 0;
    }

    pub fn is_goal(&self) -> bool {
        *self == BoardState::goal(self.board)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PuzzleSpec {
    pub board: Board,
    /// Scramble length and plan horizon (the subclass).
    pub scramble_moves: u32,
    pub seed: u64,
}

fn int(n: u32) -> Term {
    Term::Int(i64::from(n))
}

fn at_atom(tile: u32, cell: u32, t: u32) -> Atom {
    Atom::new("at", vec![int(tile), int(cell), int(t)])
}

fn blank_atom(cell: u32, t: u32) -> Atom {
    Atom::new("blank", vec![int(cell), int(t)])
}

fn occurs_atom(cell: u32, t: u32) -> Atom {
    Atom::new(
        "occurs",
        vec![Term::App("move".into(), vec![int(cell)]), int(t)],
    )
}

fn moved_atom(t: u32) -> Atom {
    Atom::new("moved", vec![int(t)])
}

fn pos_lit(atom: Atom) -> Literal {
    Literal::positive(atom)
}

/// The scrambled initial state of an instance, obtained by walking k
/// random legal moves backwards from the goal (never undoing the
/// previous move).
pub fn scramble(board: Board, k: u32, seed: u64) -> BoardState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = BoardState::goal(board);
    let mut last_blank: Option<u32> = None;
    for _ in 0..k {
        let blank = state.blank_cell();
        let mut options = board.neighbors(blank);
        if let Some(prev) = last_blank {
            if options.len() > 1 {
                options.retain(|&c| c != prev);
            }
        }
        let cell = options[rng.gen_range(0..options.len())];
        last_blank = Some(blank);
        state.slide(cell);
    }
    state
}

/// Emits the fully ground planning program for one puzzle instance:
/// one named bounded choice over moves per step, effect and inertia
/// rules, the goal constraint at the horizon, and the scrambled initial
/// state as facts. The choice rules are already augmented for the
/// renaming pipeline.
pub fn gen_puzzle(spec: &PuzzleSpec) -> Result<GroundProgram, GenError> {
    let k = spec.scramble_moves;
    if k == 0 {
        return Err(GenError::ZeroScramble);
    }
    let board = spec.board;
    let initial = scramble(board, k, spec.seed);
    let cells: Vec<u32> = (1..=board.cells()).collect();
    let tiles: Vec<u32> = (1..=board.tiles()).collect();

    let mut rules: Vec<Rule> = Vec::new();
    let mut names = std::collections::BTreeMap::new();

    for t in 0..k {
        // move choice for step t (named below)
        names.insert(
            rules.len(),
            NameSpec::with_args("move", vec![int(t)]),
        );
        rules.push(Rule::choice(
            0,
            Some(1),
            cells.iter().map(|&c| pos_lit(occurs_atom(c, t))).collect(),
            Vec::new(),
        ));
        // a move target must be adjacent to the blank
        for &c in &cells {
            for &b in &cells {
                if c != b && board.neighbors(b).contains(&c) {
                    continue;
                }
                rules.push(Rule::constraint(vec![
                    BodyElement::pos(pos_lit(occurs_atom(c, t))),
                    BodyElement::pos(pos_lit(blank_atom(b, t))),
                ]));
            }
        }
        // effects: the moved tile lands on the blank, the blank takes
        // the vacated cell
        for &b in &cells {
            for c in board.neighbors(b) {
                for &i in &tiles {
                    rules.push(Rule::normal(
                        pos_lit(at_atom(i, b, t + 1)),
                        vec![
                            BodyElement::pos(pos_lit(occurs_atom(c, t))),
                            BodyElement::pos(pos_lit(blank_atom(b, t))),
                            BodyElement::pos(pos_lit(at_atom(i, c, t))),
                        ],
                    ));
                }
            }
        }
        for &c in &cells {
            rules.push(Rule::normal(
                pos_lit(blank_atom(c, t + 1)),
                vec![BodyElement::pos(pos_lit(occurs_atom(c, t)))],
            ));
        }
        // inertia
        for &c in &cells {
            for &i in &tiles {
                rules.push(Rule::normal(
                    pos_lit(at_atom(i, c, t + 1)),
                    vec![
                        BodyElement::pos(pos_lit(at_atom(i, c, t))),
                        BodyElement::neg(pos_lit(occurs_atom(c, t))),
                    ],
                ));
            }
        }
        for &c in &cells {
            rules.push(Rule::normal(
                pos_lit(moved_atom(t)),
                vec![BodyElement::pos(pos_lit(occurs_atom(c, t)))],
            ));
        }
        for &c in &cells {
            rules.push(Rule::normal(
                pos_lit(blank_atom(c, t + 1)),
                vec![
                    BodyElement::pos(pos_lit(blank_atom(c, t))),
                    BodyElement::neg(pos_lit(moved_atom(t))),
                ],
            ));
        }
    }
    // goal at the horizon
    for &i in &tiles {
        rules.push(Rule::constraint(vec![BodyElement::neg(pos_lit(at_atom(
            i, i, k,
        )))]));
    }
    // scrambled initial state
    for (idx, &tile) in initial.tile_at.iter().enumerate() {
        let cell = idx as u32 + 1;
        if tile == 0 {
            rules.push(Rule::fact(pos_lit(blank_atom(cell, 0))));
        } else {
            rules.push(Rule::fact(pos_lit(at_atom(tile, cell, 0))));
        }
    }

    let label = SubclassLabel::new(format!("k{k}")).expect("valid label");
    let program = GroundProgram::new(rules, Some(label));
    Ok(augment(&program, &names).expect("generated program is clean"))
}

/// The inconsistent two-cycle family parameterized by the range of `t`
/// facts; the `consistent` variant drops the constraint on `p`.
///
/// The free-choice rules over `u(X)`/`v(X)` come first so that a
/// program-order selector walks into them before ever testing `p`/`q`.
pub fn gen_p1(n: u32, consistent: bool) -> GroundProgram {
    let mut rules: Vec<Rule> = Vec::new();
    let lit = |name: &str| pos_lit(Atom::named(name));
    let lit1 = |name: &str, x: u32| pos_lit(Atom::new(name, vec![int(x)]));
    for x in 0..=n {
        rules.push(Rule::normal(
            lit1("u", x),
            vec![
                BodyElement::pos(lit1("t", x)),
                BodyElement::neg(lit1("v", x)),
            ],
        ));
        rules.push(Rule::normal(
            lit1("v", x),
            vec![
                BodyElement::pos(lit1("t", x)),
                BodyElement::neg(lit1("u", x)),
            ],
        ));
    }
    for x in 0..=n {
        rules.push(Rule::fact(lit1("t", x)));
    }
    rules.push(Rule::normal(lit("p"), vec![BodyElement::neg(lit("q"))]));
    rules.push(Rule::normal(lit("q"), vec![BodyElement::neg(lit("p"))]));
    rules.push(Rule::fact(lit("r")));
    if !consistent {
        rules.push(Rule::constraint(vec![
            BodyElement::pos(lit("p")),
            BodyElement::pos(lit("r")),
        ]));
    }
    rules.push(Rule::constraint(vec![
        BodyElement::pos(lit("q")),
        BodyElement::neg(lit("s")),
    ]));
    GroundProgram::new(rules, Some(SubclassLabel::new("p1").unwrap()))
}

/// One step of a decoded plan: the cell whose tile slides, or a no-op.
pub type PlanStep = Option<u32>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("model assigns two moves to step {0}")]
    TwoMoves(u32),
    #[error("move at step {t} targets cell {cell}, which is not adjacent to the blank")]
    IllegalMove { t: u32, cell: u32 },
    #[error("model has no well-formed initial state")]
    BadInitialState,
    #[error("executing the plan does not reach the goal")]
    GoalMissed,
}

/// Extracts the move sequence from a model and checks it: legal moves
/// from the model's initial state, goal reached at the horizon.
pub fn decode_plan(
    board: Board,
    horizon: u32,
    model: &BTreeSet<Literal>,
) -> Result<Vec<PlanStep>, DecodeError> {
    let mut initial = vec![u32::MAX; board.cells() as usize];
    for lit in model {
        let atom = &lit.atom;
        if lit.strong_negation {
            continue;
        }
        match (atom.predicate(), atom.args()) {
            ("at", [Term::Int(tile), Term::Int(cell), Term::Int(0)]) => {
                initial[(*cell - 1) as usize] = *tile as u32;
            }
            ("blank", [Term::Int(cell), Term::Int(0)]) => {
                initial[(*cell - 1) as usize] = 0;
            }
            _ => {}
        }
    }
    if initial.iter().any(|&t| t == u32::MAX) {
        return Err(DecodeError::BadInitialState);
    }
    let mut state = BoardState {
        board,
        tile_at: initial,
    };
    let mut plan: Vec<PlanStep> = vec![None; horizon as usize];
    for lit in model {
        let atom = &lit.atom;
        if let ("occurs", [Term::App(f, cell_args), Term::Int(t)]) =
            (atom.predicate(), atom.args())
        {
            if f == "move" {
                if let [Term::Int(cell)] = cell_args.as_slice() {
                    let step = &mut plan[*t as usize];
                    if step.is_some() {
                        return Err(DecodeError::TwoMoves(*t as u32));
                    }
                    *step = Some(*cell as u32);
                }
            }
        }
    }
    for (t, step) in plan.iter().enumerate() {
        if let Some(cell) = step {
            if !board.neighbors(state.blank_cell()).contains(cell) {
                return Err(DecodeError::IllegalMove {
                    t: t as u32,
                    cell: *cell,
                });
            }
            state.slide(*cell);
        }
    }
    if !state.is_goal() {
        return Err(DecodeError::GoalMissed);
    }
    Ok(plan)
}

/// All step sequences of length exactly `horizon` (no-ops allowed) that
/// drive `initial` to the goal. Explicit state-space recursion,
/// independent of the solver.
pub fn enumerate_plans(board: Board, initial: &BoardState, horizon: u32) -> Vec<Vec<PlanStep>> {
    fn go(
        board: Board,
        state: &mut BoardState,
        t: u32,
        horizon: u32,
        prefix: &mut Vec<PlanStep>,
        out: &mut Vec<Vec<PlanStep>>,
    ) {
        if t == horizon {
            if state.is_goal() {
                out.push(prefix.clone());
            }
            return;
        }
        prefix.push(None);
        go(board, state, t + 1, horizon, prefix, out);
        prefix.pop();
        let blank = state.blank_cell();
        for cell in board.neighbors(blank) {
            state.slide(cell);
            prefix.push(Some(cell));
            go(board, state, t + 1, horizon, prefix, out);
            prefix.pop();
            state.slide(blank); // undo: the vacated cell is the old blank
        }
    }
    let mut out = Vec::new();
    let mut state = initial.clone();
    go(board, &mut state, 0, horizon, &mut Vec::new(), &mut out);
    out
}

// ---------------------------------------------------------------------------
// experiment harness
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Decisions(u64),
    Seconds(f64),
    /// No split: every instance trains.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainSide {
    Above,
    Below,
}

#[derive(Debug, Clone, Copy)]
pub struct ExperimentConfig {
    pub delta: u32,
    pub threshold: Threshold,
    pub train_side: TrainSide,
    pub seed: u64,
    pub jobs: usize,
    pub max_decisions: Option<u64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            delta: 1,
            threshold: Threshold::None,
            train_side: TrainSide::Below,
            seed: 0,
            jobs: 1,
            max_decisions: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalRow {
    pub instance: String,
    pub subclass: SubclassLabel,
    pub variant: &'static str,
    pub status: &'static str,
    pub stats: SolveStats,
    pub millis: u128,
}

/// One row per (instance, variant) pair, sorted by instance then
/// variant.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
}

pub const CSV_HEADER: &str = "instance,subclass,variant,status,decisions,backtracks,expand_calls,millis";

impl EvalReport {
    pub fn to_csv(&self) -> String {
        self.render_csv(false)
    }

    /// CSV with the wall-time column zeroed; byte-identical across runs
    /// with the same seeds.
    pub fn to_csv_masked(&self) -> String {
        self.render_csv(true)
    }

    fn render_csv(&self, mask_millis: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{CSV_HEADER}");
        for row in &self.rows {
            let millis = if mask_millis { 0 } else { row.millis };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                row.instance,
                row.subclass,
                row.variant,
                row.status,
                row.stats.decision_count,
                row.stats.backtrack_count,
                row.stats.expand_calls,
                millis
            );
        }
        out
    }
}

/// Outcome of one solver run under a decision cap.
#[derive(Debug, Clone)]
pub struct CappedRun {
    pub outcome: Option<SolveOutcome>,
    pub stats: SolveStats,
    pub status: &'static str,
    pub millis: u128,
}

fn run_capped(
    program: &GroundProgram,
    heuristic: Option<Heuristic<'_>>,
    max_decisions: Option<u64>,
) -> CappedRun {
    let start = Instant::now();
    let config = SolveConfig {
        heuristic,
        max_decisions,
        ..SolveConfig::default()
    };
    let result = solve_with(program, &PartialAnswerSet::new(), &config);
    let millis = start.elapsed().as_millis();
    match result {
        Ok(outcome) => CappedRun {
            stats: outcome.stats,
            status: match outcome.status {
                SolveStatus::Model => "model",
                SolveStatus::NoModel => "no_model",
            },
            outcome: Some(outcome),
            millis,
        },
        Err(err) => {
            let stats = match err {
                crate::search::SolveError::DecisionLimit { stats, .. } => stats,
                crate::search::SolveError::Timeout { stats, .. } => stats,
                _ => SolveStats::default(),
            };
            CappedRun {
                outcome: None,
                stats,
                status: "limit",
                millis,
            }
        }
    }
}

/// Runs `f` over the indices `0..n` on `jobs` worker threads, collecting
/// results in index order.
pub fn parallel_map<T: Send, F: Fn(usize) -> T + Sync>(n: usize, jobs: usize, f: F) -> Vec<T> {
    let jobs = jobs.max(1).min(n.max(1));
    if jobs <= 1 {
        return (0..n).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..n).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let value = f(i);
                slots.lock().unwrap()[i] = Some(value);
            });
        }
    });
    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|v| v.expect("every slot filled"))
        .collect()
}

/// Tracking results for every instance, in input order.
pub fn track_instances(
    instances: &[InstanceFile],
    jobs: usize,
    max_decisions: Option<u64>,
) -> Vec<(TrainingRecord, CappedRun)> {
    parallel_map(instances.len(), jobs, |i| {
        let inst = &instances[i];
        let run = run_capped(&inst.program, None, max_decisions);
        let record = TrainingRecord {
            subclass: inst.subclass.clone(),
            sequence: run
                .outcome
                .as_ref()
                .and_then(|o| o.decisions.clone()),
            source: instance_id(inst),
            solve_stats: run.stats,
        };
        (record, run)
    })
}

fn instance_id(inst: &InstanceFile) -> String {
    inst.path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| inst.path.display().to_string())
}

fn is_training(run: &CappedRun, threshold: Threshold, side: TrainSide) -> bool {
    let above = match threshold {
        Threshold::None => return true,
        Threshold::Decisions(d) => run.stats.decision_count > d,
        Threshold::Seconds(s) => run.millis as f64 / 1000.0 > s,
    };
    match side {
        TrainSide::Above => above,
        TrainSide::Below => !above,
    }
}

/// The full offline protocol: tracking runs on every instance, a
/// threshold split into training and evaluation sides, learning from
/// the training side, and a baseline-versus-guided comparison on the
/// held-out instances. The tracking run doubles as the baseline row.
pub fn run_experiment(
    instances: &[InstanceFile],
    config: &ExperimentConfig,
) -> (Policy, EvalReport) {
    let tracked = track_instances(instances, config.jobs, config.max_decisions);
    let mut train_records: Vec<TrainingRecord> = Vec::new();
    let mut eval_idx: Vec<usize> = Vec::new();
    for (i, (record, run)) in tracked.iter().enumerate() {
        if is_training(run, config.threshold, config.train_side) {
            train_records.push(record.clone());
        } else {
            eval_idx.push(i);
        }
    }
    let policy = learn_policy(&train_records, config.delta);
    let guided: Vec<CappedRun> = parallel_map(eval_idx.len(), config.jobs, |j| {
        let i = eval_idx[j];
        let inst = &instances[i];
        run_capped(
            &inst.program,
            Some(Heuristic::Policy {
                policy: &policy,
                subclass: &inst.subclass,
                seed: RandomSeed(config.seed.wrapping_add(i as u64)),
            }),
            config.max_decisions,
        )
    });
    let mut rows: Vec<EvalRow> = Vec::new();
    for (j, &i) in eval_idx.iter().enumerate() {
        let inst = &instances[i];
        let id = instance_id(inst);
        let base = &tracked[i].1;
        rows.push(EvalRow {
            instance: id.clone(),
            subclass: inst.subclass.clone(),
            variant: "baseline",
            status: base.status,
            stats: base.stats,
            millis: base.millis,
        });
        let run = &guided[j];
        rows.push(EvalRow {
            instance: id,
            subclass: inst.subclass.clone(),
            variant: "dspec",
            status: run.status,
            stats: run.stats,
            millis: run.millis,
        });
    }
    rows.sort_by(|a, b| (&a.instance, a.variant).cmp(&(&b.instance, b.variant)));
    (policy, EvalReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagate::enumerate_stable_models;
    use crate::search::solve_baseline;
    use crate::textio::{parse_program, render_program};

    #[test]
    fn p1_matches_the_hand_written_member() {
        let generated = gen_p1(0, false);
        let text = render_program(&generated);
        assert!(text.contains("u(0) :- t(0), not v(0)."));
        assert!(text.contains(":- p, r."));
        assert!(text.contains(":- q, not s."));
        // rule set equals the canonical member, order aside
        let canonical = parse_program(
            "p :- not q.\nq :- not p.\nr.\n:- p, r.\n:- q, not s.\nu(0) :- t(0), not v(0).\nv(0) :- t(0), not u(0).\nt(0).\n",
        )
        .unwrap();
        let mut ours: Vec<String> = generated
            .rules()
            .iter()
            .map(crate::textio::render_rule)
            .collect();
        let mut theirs: Vec<String> = canonical
            .rules()
            .iter()
            .map(crate::textio::render_rule)
            .collect();
        ours.sort();
        theirs.sort();
        assert_eq!(ours, theirs);
    }

    #[test]
    fn p1_inconsistent_and_consistent_counts() {
        assert_eq!(
            enumerate_stable_models(&gen_p1(0, false), 16).unwrap().len(),
            0
        );
        // free u/v choice per t, q forced false, p true
        assert_eq!(
            enumerate_stable_models(&gen_p1(2, true), 16).unwrap().len(),
            8
        );
    }

    #[test]
    fn puzzle_rejects_zero_horizon() {
        let spec = PuzzleSpec {
            board: Board::TwoByTwo,
            scramble_moves: 0,
            seed: 1,
        };
        assert_eq!(gen_puzzle(&spec), Err(GenError::ZeroScramble));
    }

    #[test]
    fn one_move_debug_instance_has_exactly_the_undo_models() {
        let spec = PuzzleSpec {
            board: Board::TwoByTwo,
            scramble_moves: 1,
            seed: 7,
        };
        let program = gen_puzzle(&spec).unwrap();
        let outcome = solve_baseline(&program, &PartialAnswerSet::new());
        assert!(outcome.found_model());
        let model = outcome.model.unwrap();
        let plan = decode_plan(Board::TwoByTwo, 1, &model).unwrap();
        let initial = scramble(Board::TwoByTwo, 1, 7);
        let oracle = enumerate_plans(Board::TwoByTwo, &initial, 1);
        assert_eq!(oracle.len(), 1, "one-move scramble has exactly the undo");
        assert_eq!(plan, oracle[0]);
    }

    #[test]
    fn goal_as_initial_state_is_satisfiable() {
        // horizon 2 from the goal: the empty plan suffices
        let board = Board::TwoByTwo;
        let spec = PuzzleSpec {
            board,
            scramble_moves: 2,
            seed: 3,
        };
        let program = gen_puzzle(&spec).unwrap();
        let outcome = solve_baseline(&program, &PartialAnswerSet::new());
        assert!(outcome.found_model());
        let plan = decode_plan(board, 2, &outcome.model.unwrap()).unwrap();
        let initial = scramble(board, 2, 3);
        assert!(enumerate_plans(board, &initial, 2).contains(&plan));
    }

    #[test]
    fn generated_instances_solve_and_decode() {
        for seed in 0..6u64 {
            let spec = PuzzleSpec {
                board: Board::ThreeByThree,
                scramble_moves: 4,
                seed,
            };
            let program = gen_puzzle(&spec).unwrap();
            assert_eq!(program.subclass().unwrap().as_str(), "k4");
            let outcome = solve_baseline(&program, &PartialAnswerSet::new());
            assert!(outcome.found_model(), "seed {seed} unsolvable");
            decode_plan(Board::ThreeByThree, 4, &outcome.model.unwrap())
                .unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        }
    }

    #[test]
    fn experiment_produces_two_rows_per_eval_instance() {
        let dir = std::env::temp_dir().join(format!("dors-bench-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let mut instances = Vec::new();
        for i in 0..4u64 {
            let spec = PuzzleSpec {
                board: Board::TwoByTwo,
                scramble_moves: 2,
                seed: i,
            };
            let program = gen_puzzle(&spec).unwrap();
            let path = dir.join(format!("i{i:02}.lp"));
            std::fs::write(&path, render_program(&program)).unwrap();
            instances.push(crate::textio::read_instance(&path).unwrap());
        }
        let config = ExperimentConfig {
            threshold: Threshold::Decisions(u64::MAX), // everything is "below"
            train_side: TrainSide::Above,              // so nothing trains
            ..ExperimentConfig::default()
        };
        let (policy, report) = run_experiment(&instances, &config);
        assert!(policy.is_empty());
        assert_eq!(report.rows.len(), 8);
        // empty policy: guided rows match baseline rows stat for stat
        for pair in report.rows.chunks(2) {
            assert_eq!(pair[0].variant, "baseline");
            assert_eq!(pair[1].variant, "dspec");
            assert_eq!(pair[0].stats, pair[1].stats);
            assert_eq!(pair[0].status, pair[1].status);
        }
        let masked = report.to_csv_masked();
        assert!(masked.starts_with(CSV_HEADER));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn p1_instances_train_nothing() {
        let dir = std::env::temp_dir().join(format!("dors-p1-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("p1.lp");
        std::fs::write(&path, render_program(&gen_p1(3, false))).unwrap();
        let instances = vec![crate::textio::read_instance(&path).unwrap()];
        let (policy, _report) = run_experiment(&instances, &ExperimentConfig::default());
        assert!(policy.is_empty(), "failed sequences contribute nothing");
        std::fs::remove_dir_all(&dir).ok();
    }
}
