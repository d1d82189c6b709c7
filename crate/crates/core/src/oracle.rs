//! Oracle models: a verifier that returns counterexamples, and a source of
//! uniformly random examples.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::grammar::GrammarParams;
use crate::program::Program;
use crate::size::program_size;
use crate::solver::PbeSolver;
use crate::task::{Example, PbeTask};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub input_low: i64,
    pub input_high: i64,
    pub exhaustive_arity_cap: usize,
    /// Half-width of the exhaustive grid.
    pub exhaustive_range: i64,
    pub random_trials: u64,
    /// Run the random trials before the grid. Only changes which
    /// counterexample is reported, not which inputs are checked.
    pub random_first: bool,
    pub example_cap: usize,
    pub time_cap: Duration,
    pub rng_seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            input_low: -50,
            input_high: 50,
            exhaustive_arity_cap: 3,
            exhaustive_range: 9,
            random_trials: 100_000,
            random_first: true,
            example_cap: 10_000,
            time_cap: Duration::from_secs(120),
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// No differing input was found.
    Equivalent,
    Counterexample(Vec<i64>),
}

fn differs(candidate: &Program, truth: &Program, input: &[i64]) -> bool {
    match truth.eval(input) {
        Ok(want) => candidate.eval(input) != Ok(want),
        Err(_) => false,
    }
}

/// Grid points of `[-r, r]^n` in lexicographic order.
fn grid(n: usize, r: i64) -> impl Iterator<Item = Vec<i64>> {
    let mut next = Some(vec![-r; n]);
    std::iter::from_fn(move || {
        let cur = next.take()?;
        let mut succ = cur.clone();
        for i in (0..n).rev() {
            if succ[i] < r {
                succ[i] += 1;
                next = Some(succ);
                break;
            }
            succ[i] = -r;
        }
        Some(cur)
    })
}

/// Exhaustive grid check (small arities) plus uniform random trials. A
/// returned counterexample always separates the two programs.
pub fn verify_equiv(candidate: &Program, truth: &Program, arity: usize, cfg: &OracleConfig) -> Verdict {
    let on_grid = || {
        if arity > cfg.exhaustive_arity_cap {
            return None;
        }
        grid(arity, cfg.exhaustive_range).find(|i| differs(candidate, truth, i))
    };
    let at_random = || {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        (0..cfg.random_trials)
            .map(|_| (0..arity).map(|_| rng.gen_range(cfg.input_low..=cfg.input_high)).collect::<Vec<i64>>())
            .find(|i| differs(candidate, truth, i))
    };
    let found = if cfg.random_first { at_random().or_else(on_grid) } else { on_grid().or_else(at_random) };
    found.map_or(Verdict::Equivalent, Verdict::Counterexample)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleModel {
    Cegis,
    Random,
}

impl OracleModel {
    pub fn name(self) -> &'static str {
        match self {
            OracleModel::Cegis => "cegis",
            OracleModel::Random => "random",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisReport {
    pub benchmark: String,
    pub solver: String,
    pub model: OracleModel,
    pub seed: u64,
    pub examples_used: usize,
    /// Seconds.
    pub wall_time: f64,
    /// Zero when no program was produced.
    pub program_size: u64,
    pub success: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// The outcome of one oracle loop, with the final candidate.
#[derive(Debug, Clone)]
pub struct LoopOutcome {
    pub report: SynthesisReport,
    pub program: Option<Program>,
    pub examples: Vec<Example>,
}

struct Run<'a> {
    solver: &'a dyn PbeSolver,
    truth: &'a Program,
    g: &'a GrammarParams,
    cfg: &'a OracleConfig,
    start: Instant,
    deadline: Instant,
    task: PbeTask,
}

impl<'a> Run<'a> {
    fn new(solver: &'a dyn PbeSolver, truth: &'a Program, g: &'a GrammarParams, cfg: &'a OracleConfig) -> Self {
        let start = Instant::now();
        Run { solver, truth, g, cfg, start, deadline: start + cfg.time_cap, task: PbeTask::empty(*g) }
    }

    fn add(&mut self, input: Vec<i64>) -> bool {
        match self.truth.eval(&input) {
            Ok(out) => self.task.push(Example::new(input, out)).unwrap_or(false),
            Err(_) => false,
        }
    }

    fn finish(self, model: OracleModel, program: Option<Program>, time: f64, error: Option<String>) -> LoopOutcome {
        let size = program.as_ref().and_then(|p| program_size(p, self.g).ok()).unwrap_or(0);
        let report = SynthesisReport {
            benchmark: String::new(),
            solver: self.solver.name().to_string(),
            model,
            seed: self.cfg.rng_seed,
            examples_used: self.task.len(),
            wall_time: time,
            program_size: size,
            success: error.is_none(),
            error,
        };
        LoopOutcome { report, program, examples: self.task.examples().to_vec() }
    }
}

/// Counterexample-guided synthesis against `truth`, starting from no
/// examples.
pub fn cegis_loop(solver: &dyn PbeSolver, truth: &Program, g: &GrammarParams, cfg: &OracleConfig) -> LoopOutcome {
    let mut run = Run::new(solver, truth, g, cfg);
    let mut last = None;
    let error = loop {
        let p = match solver.solve(&run.task, cfg.rng_seed, Some(run.deadline)) {
            Ok(p) => p,
            Err(e) => break Some(e.to_string()),
        };
        let verdict = verify_equiv(&p, truth, g.num_vars(), cfg);
        last = Some(p);
        match verdict {
            Verdict::Equivalent => break None,
            Verdict::Counterexample(i) => {
                if run.task.len() >= cfg.example_cap {
                    break Some("example cap reached".into());
                }
                if Instant::now() >= run.deadline {
                    break Some("time limit reached".into());
                }
                if !run.add(i) {
                    break Some("counterexample could not be added".into());
                }
            }
        }
    };
    let elapsed = run.start.elapsed().as_secs_f64();
    run.finish(OracleModel::Cegis, last, elapsed, error)
}

/// Synthesis from uniformly random examples; a fresh example is drawn
/// whenever the candidate is not yet equivalent. The reported time covers
/// the last solver call only.
pub fn random_loop(solver: &dyn PbeSolver, truth: &Program, g: &GrammarParams, cfg: &OracleConfig) -> LoopOutcome {
    const DUPLICATE_LIMIT: usize = 10_000;
    let mut run = Run::new(solver, truth, g, cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(1);
    let mut last = None;
    let mut last_time;
    let error = loop {
        let t0 = Instant::now();
        let solved = solver.solve(&run.task, cfg.rng_seed, Some(run.deadline));
        last_time = t0.elapsed().as_secs_f64();
        let p = match solved {
            Ok(p) => p,
            Err(e) => break Some(e.to_string()),
        };
        let verdict = verify_equiv(&p, truth, g.num_vars(), cfg);
        last = Some(p);
        if verdict == Verdict::Equivalent {
            break None;
        }
        if run.task.len() >= cfg.example_cap {
            break Some("example cap reached".into());
        }
        if Instant::now() >= run.deadline {
            break Some("time limit reached".into());
        }
        let fresh = (0..DUPLICATE_LIMIT).any(|_| {
            let input: Vec<i64> = (0..g.num_vars()).map(|_| rng.gen_range(cfg.input_low..=cfg.input_high)).collect();
            run.add(input)
        });
        if !fresh {
            break Some("input space exhausted".into());
        }
    };
    run.finish(OracleModel::Random, last, last_time, error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::LinearExpr;
    use crate::motivating;
    use crate::solver::PolyGen;
    use crate::text::parse_program;

    fn quick() -> OracleConfig {
        OracleConfig { random_trials: 2000, ..OracleConfig::default() }
    }

    #[test]
    fn grid_is_lexicographic() {
        let pts: Vec<Vec<i64>> = grid(2, 1).collect();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0], vec![-1, -1]);
        assert_eq!(pts[1], vec![-1, 0]);
        assert_eq!(pts[8], vec![1, 1]);
        assert_eq!(grid(0, 3).count(), 1);
    }

    #[test]
    fn reflexive_and_finds_counterexamples() {
        let p = motivating::target();
        assert_eq!(verify_equiv(&p, &p, 3, &quick()), Verdict::Equivalent);
        let x1 = Program::Term(LinearExpr::new(1, [(0, 1)]));
        let Verdict::Counterexample(i) = verify_equiv(&x1, &p, 3, &quick()) else { panic!() };
        assert!(i[0] + i[1] < 1 || i[0] + i[2] < 1);
        assert_ne!(x1.eval(&i), p.eval(&i));
    }

    #[test]
    fn boundary_point_is_on_grid() {
        let le = parse_program("(ite (<= x0 0) 1 0)").unwrap();
        let lt = parse_program("(ite (< x0 0) 1 0)").unwrap();
        let grid_only = OracleConfig { random_trials: 0, ..quick() };
        assert_eq!(verify_equiv(&le, &lt, 1, &grid_only), Verdict::Counterexample(vec![0]));
        let grid_first = OracleConfig { random_first: false, ..quick() };
        assert_eq!(verify_equiv(&le, &lt, 1, &grid_first), Verdict::Counterexample(vec![0]));
    }

    #[test]
    fn cegis_constant_and_identity() {
        let g = GrammarParams::new(1, -1, 5).unwrap();
        let five = Program::Term(LinearExpr::constant(5));
        let out = cegis_loop(&PolyGen::default(), &five, &g, &quick());
        assert!(out.report.success);
        assert!(out.report.examples_used <= 2);
        let x = Program::Term(LinearExpr::var(0));
        let out = cegis_loop(&PolyGen::default(), &x, &g, &quick());
        assert!(out.report.success);
        assert!(out.report.examples_used <= 3);
    }

    #[test]
    fn cegis_examples_each_refuted_previous_candidate() {
        let g = motivating::grammar();
        let truth = motivating::target();
        let solver = PolyGen::default();
        let out = cegis_loop(&solver, &truth, &g, &quick());
        assert!(out.report.success);
        for k in 0..out.examples.len() {
            let t = PbeTask::new(g, out.examples[..k].iter().cloned()).unwrap();
            let p = solver.solve(&t, 0, None).unwrap();
            let ex = &out.examples[k];
            assert_ne!(p.eval(&ex.input), Ok(ex.output));
        }
    }

    #[test]
    fn random_loop_constant_and_determinism() {
        let g = GrammarParams::new(2, -1, 5).unwrap();
        let three = Program::Term(LinearExpr::constant(3));
        let out = random_loop(&PolyGen::default(), &three, &g, &quick());
        assert!(out.report.success);
        assert!(out.report.examples_used <= 2);
        let truth = parse_program("(ite (<= x0 x1) x1 x0)").unwrap();
        let a = random_loop(&PolyGen::default(), &truth, &g, &quick());
        let b = random_loop(&PolyGen::default(), &truth, &g, &quick());
        assert_eq!(a.examples, b.examples);
        assert_eq!(a.report.examples_used, b.report.examples_used);
    }
}
