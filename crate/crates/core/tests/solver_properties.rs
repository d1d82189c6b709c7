use polygen_core::condition::literals_for;
use polygen_core::random::{random_chain, random_tree};
use polygen_core::task::consistent;
use polygen_core::{
    clause_solve, covered, dnf_solve, enum_terms, enumerate_conditions, id3_unify, motivating, polygen_solve,
    program_size, simplify_clause, solve_terms, synth_min_linear, unify, BoolTask, CondSolverConfig,
    DomainSolverConfig, EusolverConfig, Example, GrammarParams, LinearExpr, PbeTask, PolygenConfig, Program,
    TermSolverConfig,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn inputs(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::hash_set(prop::collection::vec(-4i64..=4, 2), 1..=n).prop_map(|s| {
        let mut v: Vec<_> = s.into_iter().collect();
        v.sort();
        v
    })
}

fn split_task(points: &[Vec<i64>], mask: u32) -> BoolTask {
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    for (i, p) in points.iter().enumerate() {
        if mask >> i & 1 == 1 {
            pos.push(p.clone());
        } else {
            neg.push(p.clone());
        }
    }
    BoolTask::new(2, pos, neg).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn domain_solver_is_sound_and_minimal(pts in inputs(3), outs in prop::collection::vec(-6i64..=6, 3)) {
        let g = GrammarParams::new(2, -3, 3).unwrap();
        let examples: Vec<Example> =
            pts.iter().zip(&outs).map(|(i, &o)| Example::new(i.clone(), o)).collect();
        let cfg = DomainSolverConfig::default();
        let got = synth_min_linear(&examples, &g, &cfg);
        prop_assert_eq!(&got, &synth_min_linear(&examples, &g, &cfg));
        let mut best: Option<u64> = None;
        for c in -3..=3 {
            for a in -3..=3 {
                for b in -3..=3 {
                    let e = LinearExpr::new(c, [(0, a), (1, b)]);
                    if examples.iter().all(|x| e.eval(&x.input) == Ok(x.output)) {
                        let s = program_size(&e, &g).unwrap();
                        best = Some(best.map_or(s, |b: u64| b.min(s)));
                    }
                }
            }
        }
        if let Some(e) = &got {
            prop_assert!(examples.iter().all(|x| e.eval(&x.input) == Ok(x.output)));
        }
        if let Some(b) = best {
            let e = got.expect("a brute-force solution exists");
            prop_assert!(program_size(&e, &g).unwrap() <= b);
        }
    }

    #[test]
    fn clause_and_dnf_solutions_are_correct(pts in inputs(8), mask in any::<u32>()) {
        let g = GrammarParams::new(2, -2, 2).unwrap();
        let t = split_task(&pts, mask);
        let atoms = enumerate_conditions(&g, 7);
        let lits = literals_for(&atoms, &t, false);
        if let Some(c) = clause_solve(&lits, &t) {
            prop_assert!(t.positives().iter().all(|i| c.eval(i).unwrap()));
            prop_assert!(t.negatives().iter().all(|i| !c.eval(i).unwrap()));
            let simpler = simplify_clause(&c, &t).unwrap();
            prop_assert!(simpler.literals().all(|l| c.literals().any(|m| m == l)));
            prop_assert!(t.negatives().iter().all(|i| !simpler.eval(i).unwrap()));
        }
        let cfg = CondSolverConfig::default();
        // Some labelings need more than the size cap allows.
        let d = dnf_solve(&t, &g, &cfg);
        if let Ok(d) = &d {
            prop_assert!(t.accepts(d));
        }
        prop_assert_eq!(d, dnf_solve(&t, &g, &cfg));
    }

    #[test]
    fn term_cover_is_sound_and_reproducible(seed in 0u64..1000, n in 1usize..12) {
        let g = GrammarParams::new(2, -2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let truth = random_tree(&mut rng, &g, 2, 1);
        let t = sample_task(&mut rng, &truth, &g, n);
        let cfg = TermSolverConfig { rng_seed: seed, ..TermSolverConfig::default() };
        let terms = solve_terms(&t, &cfg).unwrap();
        for ex in t.examples() {
            prop_assert!(terms.iter().any(|p| p.eval(&ex.input) == Ok(ex.output)));
        }
        let best = terms.iter().map(|p| covered(p, t.examples()).len()).max().unwrap();
        prop_assert!(best * terms.len() >= t.len());
        prop_assert_eq!(&terms, &solve_terms(&t, &cfg).unwrap());
        let no_memo = solve_terms(&t, &TermSolverConfig { memoize: false, ..cfg }).unwrap();
        for ex in t.examples() {
            prop_assert!(no_memo.iter().any(|p| p.eval(&ex.input) == Ok(ex.output)));
        }
    }
}

fn sample_task(rng: &mut ChaCha8Rng, truth: &Program, g: &GrammarParams, n: usize) -> PbeTask {
    let mut t = PbeTask::empty(*g);
    while t.len() < n {
        let i = vec![rng.gen_range(-10..=10), rng.gen_range(-10..=10)];
        let o = truth.eval(&i).unwrap();
        t.push(Example::new(i, o)).unwrap();
    }
    t
}

fn random_targets_are_solved(count: usize) {
    let g = GrammarParams::new(2, -2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for k in 0..count {
        let truth = random_chain(&mut rng, &g, 2, 2);
        let t = sample_task(&mut rng, &truth, &g, 40);
        let p = polygen_solve(&t, &PolygenConfig::default(), k as u64).unwrap();
        assert!(consistent(&p, t.examples()), "target {k}");
    }
}

#[test]
fn polygen_is_consistent_on_random_targets() {
    random_targets_are_solved(10);
}

/// About eight minutes on one core.
#[test]
#[ignore]
fn polygen_is_consistent_on_hundred_random_targets() {
    random_targets_are_solved(100);
}

/// Evaluates a decision list with branch `flip`'s condition negated on
/// `at`.
fn eval_flipped(p: &Program, input: &[i64], flip: usize, at: &[i64]) -> i64 {
    let Program::DecisionList { branches, default } = p else { panic!("not a decision list") };
    for (i, (c, t)) in branches.iter().enumerate() {
        let mut v = c.eval(input).unwrap();
        if i == flip && input == at {
            v = !v;
        }
        if v {
            return t.eval(input).unwrap();
        }
    }
    default.eval(input).unwrap()
}

#[test]
fn dont_care_inputs_tolerate_condition_flips() {
    let g = GrammarParams::new(2, -2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut flips = 0;
    for _ in 0..60 {
        let truth = random_tree(&mut rng, &g, 2, 2);
        let t = sample_task(&mut rng, &truth, &g, 12);
        let Ok(terms) = solve_terms(&t, &TermSolverConfig::default()) else { continue };
        let p = unify(&terms, &t, &CondSolverConfig::default()).unwrap();
        assert_eq!(p.branch_count(), terms.len() - 1);
        assert_eq!(p.terms(), terms);
        for i in 0..terms.len().saturating_sub(1) {
            for ex in t.examples() {
                let here = terms[i].eval(&ex.input) == Ok(ex.output);
                let later = terms[i + 1..].iter().any(|u| u.eval(&ex.input) == Ok(ex.output));
                if !(here && later) {
                    continue;
                }
                flips += 1;
                for other in t.examples() {
                    assert_eq!(eval_flipped(&p, &other.input, i, &ex.input), other.output);
                }
            }
        }
    }
    assert!(flips > 0);
}

#[test]
fn enumerated_terms_cover_distinct_sets_and_id3_is_consistent() {
    let t = motivating::task();
    let cfg = EusolverConfig::default();
    let terms = enum_terms(t.examples(), t.grammar(), &cfg).unwrap();
    let sets: Vec<Vec<usize>> = terms.iter().map(|e| covered(e, t.examples())).collect();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            assert_ne!(sets[i], sets[j]);
        }
    }
    let atoms = enumerate_conditions(t.grammar(), 7);
    let p = id3_unify(&terms, t.examples(), &atoms, cfg.max_depth).unwrap();
    assert!(consistent(&p, t.examples()));
}
