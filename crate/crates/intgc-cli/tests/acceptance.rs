//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line (run with `--nocapture` to see them). Every tolerance and
//! bound is pinned in the constants below.
//!
//! The criteria:
//! 1. provable schemes are valid on every enumerated small model and on 500
//!    seeded random models;
//! 2. the adjunction rule is sound model-by-model (validity biconditional);
//! 3. filtration verifies all five checks on 200 random instances;
//! 4. six known non-theorems are refuted within 3 worlds, each in under a
//!    second, with verified certificates;
//! 5. frame validity agrees with complex-algebra validity on a 20-formula
//!    corpus over every frame with at most 3 worlds;
//! 6. prefix normalization preserves satisfaction pointwise;
//! 7. enumeration matches brute-force oracles (preorder counts, frame sets);
//! 8. parse/render round-trips and the CLI is byte-deterministic.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use intgc::algebra::{complex_algebra, valid_in_algebra};
use intgc::bits::Relation;
use intgc::filtration::{build_filtration, verify_filtration};
use intgc::formula::{closure_basis, normalize, parse, render, Formula};
use intgc::kripke::{
    check_frame, default_world_names, valid_in_frame, CompiledFormula, EvalScratch, KripkeFrame,
    KripkeModel,
};
use intgc::search::{
    decide_bounded, enumerate_frames, enumerate_preorders, random_formula, random_model,
    RandomModelParams, SearchBudget, Verdict,
};

const RANDOM_MODELS_SCHEMES: usize = 500;
const RANDOM_MODELS_GC: usize = 500;
const GC_PAIRS_PER_MODEL: usize = 100;
const FILTRATION_INSTANCES: usize = 200;
const NORMALIZATION_MEMBERS: usize = 300;
const NORMALIZATION_MODELS: usize = 100;
const ROUNDTRIP_CASES: usize = 1000;

const LIMIT_SCHEMES: Duration = Duration::from_secs(60);
const LIMIT_GC: Duration = Duration::from_secs(60);
const LIMIT_FILTRATION: Duration = Duration::from_secs(120);
const LIMIT_PER_DECIDE: Duration = Duration::from_secs(1);
const LIMIT_AGREEMENT: Duration = Duration::from_secs(300);

fn pass(criterion: usize, detail: String) {
    println!("criterion {criterion}: PASS — {detail}");
}

fn two_vars() -> Vec<String> {
    vec!["p".to_string(), "q".to_string()]
}

/// Fixed pool of scheme bodies: height at most 3, variables p and q.
fn body_pool() -> Vec<Formula> {
    [
        "p",
        "q",
        "true",
        "false",
        "!p",
        "<>p",
        "[]q",
        "p & q",
        "p | q",
        "p -> q",
        "<>(p & q)",
        "[](p -> q)",
        "<>[]p",
        "!(p | q) -> q",
    ]
    .iter()
    .map(|t| parse(t).unwrap())
    .collect()
}

fn iff(l: Formula, r: Formula) -> Formula {
    Formula::and(Formula::imp(l.clone(), r.clone()), Formula::imp(r, l))
}

/// All provable-scheme instances over the body pool: the adjunction unit and
/// counit, round-trip stability, the two constants, distribution over meet
/// and join, and K-style distribution.
fn scheme_instances() -> Vec<Formula> {
    let pool = body_pool();
    let up = Formula::up;
    let down = Formula::down;
    let mut out = vec![down(Formula::Top), Formula::not(up(Formula::Bot))];
    for a in &pool {
        out.push(Formula::imp(a.clone(), down(up(a.clone()))));
        out.push(Formula::imp(up(down(a.clone())), a.clone()));
        out.push(iff(up(a.clone()), up(down(up(a.clone())))));
        out.push(iff(down(a.clone()), down(up(down(a.clone())))));
    }
    for a in &pool {
        for b in &pool {
            out.push(iff(
                down(Formula::and(a.clone(), b.clone())),
                Formula::and(down(a.clone()), down(b.clone())),
            ));
            out.push(iff(
                up(Formula::or(a.clone(), b.clone())),
                Formula::or(up(a.clone()), up(b.clone())),
            ));
            out.push(Formula::imp(
                down(Formula::imp(a.clone(), b.clone())),
                Formula::imp(down(a.clone()), down(b.clone())),
            ));
        }
    }
    out
}

/// Every model on frames with at most `max_worlds` worlds and up-set
/// valuations of `vars`, passed to `visit`.
fn for_each_enumerated_model(
    max_worlds: usize,
    vars: &[String],
    mut visit: impl FnMut(&KripkeModel),
) -> usize {
    let mut count = 0;
    for n in 1..=max_worlds {
        for frame in enumerate_frames(n) {
            let ups = frame.up_sets().unwrap();
            let mut choice = vec![0usize; vars.len()];
            loop {
                let valuation: BTreeMap<String, _> = vars
                    .iter()
                    .zip(&choice)
                    .map(|(v, &i)| (v.clone(), ups[i].clone()))
                    .collect();
                let model = KripkeModel::new(frame.clone(), valuation).unwrap();
                visit(&model);
                count += 1;
                let mut pos = 0;
                loop {
                    if pos == choice.len() {
                        break;
                    }
                    choice[pos] += 1;
                    if choice[pos] < ups.len() {
                        break;
                    }
                    choice[pos] = 0;
                    pos += 1;
                }
                if pos == choice.len() {
                    break;
                }
            }
        }
    }
    count
}

#[test]
fn criterion_1_provable_schemes_are_valid() {
    let start = Instant::now();
    let instances: Vec<(Formula, CompiledFormula)> = scheme_instances()
        .into_iter()
        .map(|f| {
            let cf = CompiledFormula::compile(&f);
            (f, cf)
        })
        .collect();
    let mut scratch = EvalScratch::new();

    let enumerated = for_each_enumerated_model(3, &two_vars(), |model| {
        for (f, cf) in &instances {
            assert!(
                model.valid_compiled(cf, &mut scratch),
                "scheme instance {} fails on an enumerated model",
                render(f)
            );
        }
    });

    let params = RandomModelParams::new(1, 6, &["p", "q"]);
    for seed in 0..RANDOM_MODELS_SCHEMES as u64 {
        let model = random_model(&params, 100_000 + seed);
        for (f, cf) in &instances {
            assert!(
                model.valid_compiled(cf, &mut scratch),
                "scheme instance {} fails on random model seed {seed}",
                render(f)
            );
        }
    }

    let elapsed = start.elapsed();
    assert!(elapsed < LIMIT_SCHEMES, "took {elapsed:?}");
    pass(
        1,
        format!(
            "{} scheme instances valid on {enumerated} enumerated and {RANDOM_MODELS_SCHEMES} \
             random models in {elapsed:.2?}",
            instances.len()
        ),
    );
}

#[test]
fn criterion_2_adjunction_rule_soundness() {
    let start = Instant::now();
    let params = RandomModelParams::new(1, 6, &["p", "q"]);
    let vars = two_vars();
    let mut scratch = EvalScratch::new();
    let mut checked = 0u64;
    for seed in 0..RANDOM_MODELS_GC as u64 {
        let model = random_model(&params, 200_000 + seed);
        let mut rng = ChaCha8Rng::seed_from_u64(300_000 + seed);
        for _ in 0..GC_PAIRS_PER_MODEL {
            let a = random_formula(&mut rng, 3, &vars);
            let b = random_formula(&mut rng, 3, &vars);
            let lower = Formula::imp(a.clone(), Formula::down(b.clone()));
            let upper = Formula::imp(Formula::up(a.clone()), b.clone());
            let lv = model.valid_compiled(&CompiledFormula::compile(&lower), &mut scratch);
            let uv = model.valid_compiled(&CompiledFormula::compile(&upper), &mut scratch);
            assert_eq!(
                lv,
                uv,
                "rule biconditional fails on seed {seed}: A = {}, B = {}",
                render(&a),
                render(&b)
            );
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < LIMIT_GC, "took {elapsed:?}");
    pass(
        2,
        format!("{checked} (A, B) pairs biconditional on {RANDOM_MODELS_GC} models in {elapsed:.2?}"),
    );
}

#[test]
fn criterion_3_filtration_five_checks() {
    let start = Instant::now();
    let params = RandomModelParams::new(1, 8, &["p", "q"]);
    let vars = two_vars();
    for i in 0..FILTRATION_INSTANCES as u64 {
        let model = random_model(&params, 400_000 + i);
        let mut rng = ChaCha8Rng::seed_from_u64(500_000 + i);
        let root = random_formula(&mut rng, 4, &vars);
        let filt = build_filtration(&model, root.clone()).unwrap();
        let report = verify_filtration(&filt);
        assert!(report.preservation_ok(), "instance {i}: {report:?}");
        assert!(report.quotient_frame_ok(), "instance {i}: {report:?}");
        assert!(
            report.agreement_ok(),
            "instance {i} root {}: {report:?}",
            render(&root)
        );
        assert!(report.class_bound_ok, "instance {i}: {report:?}");
        assert!(report.alt_relation_ok(), "instance {i}: {report:?}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed < LIMIT_FILTRATION, "took {elapsed:?}");
    pass(
        3,
        format!("all five checks on {FILTRATION_INSTANCES} random instances in {elapsed:.2?}"),
    );
}

#[test]
fn criterion_4_non_theorems_refuted() {
    let non_theorems = [
        "[]p -> p",
        "p -> <>p",
        "<>p -> p",
        "p -> []p",
        "<>p & <>q -> <>(p & q)",
        "[](p | q) -> []p | []q",
    ];
    let budget = SearchBudget {
        max_worlds: 3,
        ..Default::default()
    };
    let mut details = Vec::new();
    for text in non_theorems {
        let f = parse(text).unwrap();
        let start = Instant::now();
        let decision = decide_bounded(&f, &budget);
        let elapsed = start.elapsed();
        assert!(elapsed < LIMIT_PER_DECIDE, "{text} took {elapsed:?}");
        let Verdict::CountermodelFound { model, world } = &decision.outcome.verdict else {
            panic!("{text}: no countermodel within 3 worlds");
        };
        assert!(
            !model.satisfies(world, &f).unwrap(),
            "{text}: reported model does not refute"
        );
        let cert = decision.certificate.as_ref().expect("certificate attached");
        assert!(cert.verified, "{text}: certificate failed verification");
        assert!(cert.still_refutes, "{text}: quotient no longer refutes");
        details.push(format!(
            "{text} at {} world(s) in {elapsed:.1?}",
            model.frame().world_count()
        ));
    }
    pass(4, details.join("; "));
}

/// The fixed 20-formula corpus: the six non-theorems, provable-scheme
/// instances, and mixed fillers.
fn corpus() -> Vec<Formula> {
    [
        "[]p -> p",
        "p -> <>p",
        "<>p -> p",
        "p -> []p",
        "<>p & <>q -> <>(p & q)",
        "[](p | q) -> []p | []q",
        "p -> []<>p",
        "<>[]p -> p",
        "<>p <-> <>[]<>p",
        "[]p <-> []<>[]p",
        "[]true",
        "!<>false",
        "[](p & q) <-> []p & []q",
        "<>(p | q) <-> <>p | <>q",
        "[](p -> q) -> ([]p -> []q)",
        "p -> p",
        "p | !p",
        "!!p -> p",
        "(p -> q) | (q -> p)",
        "<>true",
    ]
    .iter()
    .map(|t| parse(t).unwrap())
    .collect()
}

#[test]
fn criterion_5_frame_algebra_agreement() {
    let start = Instant::now();
    let corpus = corpus();
    let vars = two_vars();
    let mut frames = 0u64;
    let mut disagreements = Vec::new();
    for n in 1..=3usize {
        for frame in enumerate_frames(n) {
            frames += 1;
            let alg = complex_algebra(&frame).unwrap();
            for f in &corpus {
                let on_frame = valid_in_frame(&frame, f, &vars, 1_000_000).unwrap();
                let on_algebra = valid_in_algebra(&alg, f, 1_000_000).unwrap();
                if on_frame != on_algebra {
                    disagreements.push(format!(
                        "{} on a {n}-world frame: frame={on_frame}, algebra={on_algebra}",
                        render(f)
                    ));
                }
            }
        }
    }
    assert!(disagreements.is_empty(), "{disagreements:?}");
    let elapsed = start.elapsed();
    assert!(elapsed < LIMIT_AGREEMENT, "took {elapsed:?}");
    pass(
        5,
        format!(
            "{} formulas agree across {frames} frames in {elapsed:.2?}",
            corpus.len()
        ),
    );
}

#[test]
fn criterion_6_normalization_preserves_satisfaction() {
    let start = Instant::now();
    let vars = two_vars();
    // Σ members: up to 3 alternating prefix layers over Γ members of 10
    // random roots. Roots are rerolled until each closure set carries enough
    // modal members to fill the sample.
    let mut rng = ChaCha8Rng::seed_from_u64(600_000);
    let mut members = Vec::new();
    for _ in 0..10 {
        let basis = loop {
            let basis = closure_basis(random_formula(&mut rng, 4, &vars));
            let modal = basis
                .gamma()
                .iter()
                .filter(|g| matches!(g, Formula::Up(_) | Formula::Down(_)))
                .count();
            if modal >= 10 {
                break basis;
            }
        };
        for g in basis.gamma() {
            if !matches!(g, Formula::Up(_) | Formula::Down(_)) {
                continue;
            }
            let mut cur = g.clone();
            for _ in 0..3 {
                cur = match cur {
                    Formula::Up(_) => Formula::down(cur),
                    Formula::Down(_) => Formula::up(cur),
                    other => other,
                };
                members.push(cur.clone());
            }
        }
    }
    assert!(members.len() >= NORMALIZATION_MEMBERS);
    members.truncate(NORMALIZATION_MEMBERS);

    let params = RandomModelParams::new(1, 6, &["p", "q"]);
    let models: Vec<KripkeModel> = (0..NORMALIZATION_MODELS as u64)
        .map(|i| random_model(&params, 700_000 + i))
        .collect();
    let mut scratch = EvalScratch::new();
    let mut checked = 0u64;
    for member in &members {
        let norm = normalize(member);
        let cm = CompiledFormula::compile(member);
        let cn = CompiledFormula::compile(&norm);
        for model in &models {
            let a = model.extension_compiled(&cm, &mut scratch);
            let b = model.extension_compiled(&cn, &mut scratch);
            assert_eq!(
                a,
                b,
                "{} and {} disagree",
                render(member),
                render(&norm)
            );
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    pass(
        6,
        format!(
            "{NORMALIZATION_MEMBERS} prefix-family members match their normal forms pointwise \
             ({checked} comparisons) in {elapsed:.2?}"
        ),
    );
}

fn all_relations(n: usize) -> Vec<Relation> {
    let cells: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .collect();
    (0..(1u64 << cells.len()))
        .map(|mask| {
            let mut r = Relation::empty(n);
            for (k, &(i, j)) in cells.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    r.set(i, j);
                }
            }
            r
        })
        .collect()
}

#[test]
fn criterion_7_enumeration_oracles() {
    // Known labeled preorder counts.
    assert_eq!(enumerate_preorders(1).count(), 1);
    assert_eq!(enumerate_preorders(2).count(), 4);
    assert_eq!(enumerate_preorders(3).count(), 29);

    // Frame streams for n ≤ 2 equal the brute-force filter of all relation
    // pairs through the frame checker, with no duplicates.
    for n in 1..=2usize {
        let mut brute = BTreeSet::new();
        for r_leq in all_relations(n) {
            if !(r_leq.is_reflexive() && r_leq.is_transitive()) {
                continue;
            }
            for r in all_relations(n) {
                let frame = KripkeFrame::new(default_world_names(n), r_leq.clone(), r);
                if check_frame(&frame).is_ok() {
                    brute.insert((frame.leq().clone(), frame.r().clone()));
                }
            }
        }
        let stream: Vec<_> = enumerate_frames(n).collect();
        let stream_set: BTreeSet<_> = stream
            .iter()
            .map(|f| (f.leq().clone(), f.r().clone()))
            .collect();
        assert_eq!(stream.len(), stream_set.len(), "duplicate frames at n={n}");
        assert_eq!(stream_set, brute, "frame stream mismatch at n={n}");
    }
    pass(
        7,
        "preorder counts 1/4/29 and n ≤ 2 frame streams match brute force".to_string(),
    );
}

#[test]
fn criterion_8_roundtrips_and_cli_determinism() {
    // parse ∘ render is the identity on seeded random trees.
    let vars: Vec<String> = ["p", "q", "r"].iter().map(|s| s.to_string()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(800_000);
    for i in 0..ROUNDTRIP_CASES {
        let f = random_formula(&mut rng, 5, &vars);
        let text = render(&f);
        assert_eq!(parse(&text).unwrap(), f, "case {i}: {text}");
    }

    // The CLI is byte-deterministic across repeated runs.
    let dir = tempfile::tempdir().unwrap();
    let model_path = dir.path().join("m.json");
    std::fs::write(
        &model_path,
        r#"{"worlds": ["a","b"], "leq": [], "r": [["b","a"]], "val": {"p": ["b"]}}"#,
    )
    .unwrap();
    let model = model_path.to_str().unwrap();
    let invocations: Vec<Vec<&str>> = vec![
        vec!["closure", "[]p -> p"],
        vec!["parse", "<>(p | q) -> <>p | <>q"],
        vec!["mc", model, "[]p -> p"],
        vec!["valid", model, "p -> []<>p"],
        vec!["filter", model, "[]p -> p", "--verify"],
        vec!["decide", "[]p -> p", "--max-worlds", "3", "--emit-filtration"],
        vec!["decide", "p -> []<>p", "--max-worlds", "2"],
        vec!["complex", model],
        vec!["export-dot", model],
    ];
    for args in &invocations {
        let run = || {
            let out = Command::new(env!("CARGO_BIN_EXE_intgc"))
                .args(args)
                .output()
                .expect("binary runs");
            assert!(
                out.status.success(),
                "intgc {args:?} failed: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            out.stdout
        };
        let first = run();
        let second = run();
        assert_eq!(first, second, "stdout differs across runs for {args:?}");
        assert!(!first.is_empty());
    }
    pass(
        8,
        format!(
            "{ROUNDTRIP_CASES} round-trips exact; {} CLI invocations byte-identical",
            invocations.len()
        ),
    );
}
