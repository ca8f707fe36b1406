//! Exhaustive frame enumeration and bounded countermodel search, plus seeded
//! random model and formula generation for property tests.
//!
//! Enumeration is over labeled structures in a fixed deterministic order; no
//! isomorphism reduction is attempted. The searcher can therefore promise
//! that identical inputs produce identical outcomes, including which
//! countermodel is reported.

use std::collections::{BTreeMap, HashSet};
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits::{Relation, WorldSet};
use crate::filtration::{build_filtration, verify_filtration, Filtration};
use crate::formula::{render, ClosureBasis, Formula};
use crate::kripke::{
    close_frame, default_world_names, eval_with, is_all, CompiledFormula, EvalScratch,
    KripkeFrame, KripkeModel,
};

/// Resource bounds for a search. All fields must be positive.
#[derive(Debug, Clone, Serialize)]
pub struct SearchBudget {
    pub max_worlds: usize,
    pub max_models: u64,
    pub max_millis: u64,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_worlds: 3,
            max_models: 10_000_000,
            max_millis: 60_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetReason {
    Models,
    Timeout,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Verdict {
    /// A model refuting the formula at `world`.
    CountermodelFound { model: KripkeModel, world: String },
    /// Every model with at most `max_worlds` worlds validates the formula.
    /// This is not a validity proof unless the bound reaches `2^|Γ|`.
    NoCountermodelUpTo { max_worlds: usize },
    BudgetExhausted {
        at_worlds: usize,
        reason: BudgetReason,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub frames_examined: u64,
    pub models_examined: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchOutcome {
    pub verdict: Verdict,
    pub stats: SearchStats,
}

/// Every preorder (reflexive-transitive relation) on `n` labeled points,
/// each exactly once, in ascending order of the off-diagonal bit pattern.
pub fn enumerate_preorders(n: usize) -> impl Iterator<Item = Relation> {
    assert!(n >= 1, "preorders need at least one point");
    let cells: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .collect();
    let total: u64 = 1u64 << cells.len();
    (0..total).filter_map(move |mask| {
        let mut rel = Relation::identity(n);
        for (k, &(i, j)) in cells.iter().enumerate() {
            if mask >> k & 1 == 1 {
                rel.set(i, j);
            }
        }
        rel.is_transitive().then_some(rel)
    })
}

/// Every frame on `n` labeled points: each preorder paired with every
/// relation satisfying the frame condition over it. Candidate relations are
/// produced by closing every seed relation and deduplicating, then sorted,
/// so the stream order is deterministic.
pub fn enumerate_frames(n: usize) -> impl Iterator<Item = KripkeFrame> {
    let names = default_world_names(n);
    enumerate_preorders(n).flat_map(move |leq| {
        let frame_for_seed = |r_seed: Relation| {
            close_frame(names.clone(), leq.clone(), r_seed)
        };
        // Rectangles: the closure of a single pair (x, y).
        let rects: Vec<Relation> = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .map(|(x, y)| frame_for_seed(Relation::from_pairs(n, &[(x, y)])).r().clone())
            .collect();
        let mut seen = HashSet::new();
        let total: u64 = 1u64 << (n * n);
        for mask in 0..total {
            let mut r = Relation::empty(n);
            let mut m = mask;
            while m != 0 {
                let k = m.trailing_zeros() as usize;
                m &= m - 1;
                for x in 0..n {
                    r.union_into_row(x, &rects[k].row_set(x));
                }
            }
            seen.insert(r);
        }
        let mut rs: Vec<Relation> = seen.into_iter().collect();
        rs.sort();
        let names = names.clone();
        let leq = leq.clone();
        rs.into_iter()
            .map(move |r| KripkeFrame::new(names.clone(), leq.clone(), r))
    })
}

/// Search frames of size `1..=max_worlds` and all up-set valuations of the
/// formula's variables for a refutation. Wall-clock budget is only checked
/// between frames, so a completed search is deterministic.
pub fn find_countermodel(f: &Formula, budget: &SearchBudget) -> SearchOutcome {
    assert!(
        budget.max_worlds >= 1 && budget.max_models >= 1 && budget.max_millis >= 1,
        "budget fields must be positive"
    );
    let deadline = Instant::now() + Duration::from_millis(budget.max_millis);
    let vars = f.variables();
    let cf = CompiledFormula::compile(f);
    let mut scratch = EvalScratch::new();
    let mut stats = SearchStats::default();

    for n in 1..=budget.max_worlds {
        for frame in enumerate_frames(n) {
            if Instant::now() >= deadline {
                return SearchOutcome {
                    verdict: Verdict::BudgetExhausted {
                        at_worlds: n,
                        reason: BudgetReason::Timeout,
                    },
                    stats,
                };
            }
            stats.frames_examined += 1;
            let ups = frame
                .up_sets()
                .expect("enumerated frames stay below the world limit");
            let mut choice = vec![0usize; vars.len()];
            'assignments: loop {
                if stats.models_examined >= budget.max_models {
                    return SearchOutcome {
                        verdict: Verdict::BudgetExhausted {
                            at_worlds: n,
                            reason: BudgetReason::Models,
                        },
                        stats,
                    };
                }
                stats.models_examined += 1;
                let words = eval_with(
                    &frame,
                    |v| {
                        vars.iter()
                            .position(|var| var == v)
                            .map(|k| &ups[choice[k]])
                    },
                    &cf,
                    &mut scratch,
                );
                if !is_all(words, n) {
                    let world = (0..n)
                        .find(|&x| words[x / 64] >> (x % 64) & 1 == 0)
                        .expect("some world refutes");
                    let valuation: BTreeMap<String, WorldSet> = vars
                        .iter()
                        .zip(&choice)
                        .map(|(v, &i)| (v.clone(), ups[i].clone()))
                        .collect();
                    let model = KripkeModel::new(frame.clone(), valuation)
                        .expect("up-sets are persistent valuations");
                    let world = model.frame().world_name(world).to_string();
                    return SearchOutcome {
                        verdict: Verdict::CountermodelFound { model, world },
                        stats,
                    };
                }
                let mut pos = 0;
                loop {
                    if pos == choice.len() {
                        break 'assignments;
                    }
                    choice[pos] += 1;
                    if choice[pos] < ups.len() {
                        break;
                    }
                    choice[pos] = 0;
                    pos += 1;
                }
            }
        }
    }
    SearchOutcome {
        verdict: Verdict::NoCountermodelUpTo {
            max_worlds: budget.max_worlds,
        },
        stats,
    }
}

/// A verified finite quotient attached to a found countermodel.
#[derive(Debug, Clone, Serialize)]
pub struct FiltrationCertificate {
    pub classes: usize,
    pub quotient: KripkeModel,
    pub class_of: BTreeMap<String, String>,
    pub gamma: Vec<String>,
    /// All five filtration checks passed.
    pub verified: bool,
    /// The quotient still refutes the formula.
    pub still_refutes: bool,
    pub refuted_at: String,
}

/// A search outcome plus, when a countermodel was found, its filtration
/// certificate. `class_bound_log2` is `|Γ|`: only a search reaching
/// `2^|Γ|` worlds would prove validity, so a negative search only ever
/// claims "no countermodel up to the bound".
#[derive(Debug, Clone, Serialize)]
pub struct Decision {
    pub formula: String,
    pub outcome: SearchOutcome,
    pub class_bound_log2: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<FiltrationCertificate>,
}

/// Run [`find_countermodel`]; on success, filter the found model through the
/// formula's closure set, verify every property of the quotient, and attach
/// it as a certificate.
pub fn decide_bounded(f: &Formula, budget: &SearchBudget) -> Decision {
    let basis = ClosureBasis::new(f.clone());
    let outcome = find_countermodel(f, budget);
    let certificate = match &outcome.verdict {
        Verdict::CountermodelFound { model, world } => {
            let filt =
                build_filtration(model, f.clone()).expect("searched models pass frame checks");
            Some(certificate_for(&filt, f, world))
        }
        _ => None,
    };
    Decision {
        formula: render(f),
        outcome,
        class_bound_log2: basis.gamma_len(),
        certificate,
    }
}

fn certificate_for(filt: &Filtration, f: &Formula, refuting_world: &str) -> FiltrationCertificate {
    let report = verify_filtration(filt);
    let quotient = filt.quotient_model();
    let class = filt
        .class_of_world(refuting_world)
        .expect("refuting world belongs to the source model");
    let class_name = filt.class_name(class);
    let still_refutes = !quotient
        .satisfies(&class_name, f)
        .expect("class name is a quotient world");
    FiltrationCertificate {
        classes: filt.class_count(),
        quotient,
        class_of: filt
            .source()
            .frame()
            .worlds()
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), filt.class_name(filt.class_of()[i])))
            .collect(),
        gamma: filt.basis().gamma().iter().map(render).collect(),
        verified: report.is_ok(),
        still_refutes,
        refuted_at: class_name,
    }
}

/// Parameters for seeded random models.
#[derive(Debug, Clone)]
pub struct RandomModelParams {
    pub min_worlds: usize,
    pub max_worlds: usize,
    /// Probability of each off-diagonal preorder seed edge.
    pub leq_density: f64,
    /// Probability of each modal-relation seed pair.
    pub r_density: f64,
    /// Probability of each (variable, world) seed membership.
    pub val_density: f64,
    pub vars: Vec<String>,
}

impl RandomModelParams {
    pub fn new(min_worlds: usize, max_worlds: usize, vars: &[&str]) -> Self {
        RandomModelParams {
            min_worlds,
            max_worlds,
            leq_density: 0.3,
            r_density: 0.3,
            val_density: 0.4,
            vars: vars.iter().map(|v| v.to_string()).collect(),
        }
    }
}

/// Deterministic-for-a-seed random model: seeded preorder and modal edges,
/// both closed, with up-closed random valuations. The output always passes
/// the frame checks.
pub fn random_model(params: &RandomModelParams, seed: u64) -> KripkeModel {
    assert!(params.min_worlds >= 1 && params.min_worlds <= params.max_worlds);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(params.min_worlds..=params.max_worlds);

    let mut leq_seed = Relation::empty(n);
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(params.leq_density) {
                leq_seed.set(i, j);
            }
        }
    }
    let mut r_seed = Relation::empty(n);
    for i in 0..n {
        for j in 0..n {
            if rng.random_bool(params.r_density) {
                r_seed.set(i, j);
            }
        }
    }
    let frame = close_frame(default_world_names(n), leq_seed, r_seed);

    let mut valuation = BTreeMap::new();
    for var in &params.vars {
        let mut set = WorldSet::empty(n);
        for x in 0..n {
            if rng.random_bool(params.val_density) {
                set.insert(x);
            }
        }
        valuation.insert(var.clone(), frame.up_close(&set));
    }
    KripkeModel::new(frame, valuation).expect("up-closed by construction")
}

/// Seeded random formula of height at most `depth` over `vars`.
pub fn random_formula(rng: &mut impl Rng, depth: usize, vars: &[String]) -> Formula {
    let leaf = |rng: &mut dyn rand::RngCore| match rng.random_range(0..6u32) {
        0 => Formula::Top,
        1 => Formula::Bot,
        _ => {
            let i = rng.random_range(0..vars.len() as u32) as usize;
            Formula::Var(vars[i].clone())
        }
    };
    if depth == 0 || vars.is_empty() {
        if vars.is_empty() {
            return if rng.random_bool(0.5) {
                Formula::Top
            } else {
                Formula::Bot
            };
        }
        return leaf(rng);
    }
    match rng.random_range(0..10u32) {
        0 | 1 => leaf(rng),
        2 => Formula::not(random_formula(rng, depth - 1, vars)),
        3 | 4 => Formula::up(random_formula(rng, depth - 1, vars)),
        5 | 6 => Formula::down(random_formula(rng, depth - 1, vars)),
        7 => Formula::and(
            random_formula(rng, depth - 1, vars),
            random_formula(rng, depth - 1, vars),
        ),
        8 => Formula::or(
            random_formula(rng, depth - 1, vars),
            random_formula(rng, depth - 1, vars),
        ),
        _ => Formula::imp(
            random_formula(rng, depth - 1, vars),
            random_formula(rng, depth - 1, vars),
        ),
    }
}
