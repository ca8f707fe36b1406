//! Kripke frames and models for the logic, with the frame closure condition
//! on the modal relation, persistence-checked valuations, and a bitset-based
//! model checker.
//!
//! A frame is a preordered set of worlds `(X, ≤)` plus a relation `R`
//! required to absorb the preorder on both sides: `x ≤ x'`, `x R y` and
//! `y' ≤ y` imply `x' R y'`. That condition is exactly what makes
//! satisfaction of every formula upward closed along `≤` (persistence), so
//! valuations are required to be upward closed as well.

mod eval;
pub mod io;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::bits::{Relation, WorldSet};
use crate::formula::Formula;

pub use eval::{CompiledFormula, EvalScratch};
pub(crate) use eval::eval_with;

/// Worlds above this are rejected by the up-set enumerator; every operation
/// that quantifies over valuations is exponential in the world count anyway.
pub const MAX_ENUMERATION_WORLDS: usize = 22;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KripkeError {
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("valuation for `{var}` is not upward closed: it misses `{world}`")]
    ValuationNotUpClosed { var: String, world: String },
    #[error("frame with {worlds} worlds exceeds the enumeration limit of {limit}")]
    TooManyWorlds { worlds: usize, limit: usize },
    #[error("checking {required} valuations exceeds the budget of {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
}

/// A finite Kripke frame: named worlds, a preorder `≤`, and the modal
/// relation `R`. Constructing one performs no validation; see
/// [`check_frame`] and [`close_frame`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeFrame {
    worlds: Vec<String>,
    leq: Relation,
    r: Relation,
}

impl KripkeFrame {
    pub fn new(worlds: Vec<String>, leq: Relation, r: Relation) -> Self {
        assert_eq!(worlds.len(), leq.size());
        assert_eq!(worlds.len(), r.size());
        KripkeFrame { worlds, leq, r }
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn world_index(&self, name: &str) -> Option<usize> {
        self.worlds.iter().position(|w| w == name)
    }

    pub fn world_name(&self, index: usize) -> &str {
        &self.worlds[index]
    }

    pub fn leq(&self) -> &Relation {
        &self.leq
    }

    pub fn r(&self) -> &Relation {
        &self.r
    }

    /// Smallest upward-closed superset of `set`.
    pub fn up_close(&self, set: &WorldSet) -> WorldSet {
        let mut out = self.leq.image(set);
        out.union_with(set);
        out
    }

    pub fn is_up_closed(&self, set: &WorldSet) -> bool {
        set.iter().all(|x| self.leq.row_set(x).is_subset(set))
    }

    /// All upward-closed subsets in ascending numeric order (so the empty
    /// set is first and the full set last).
    pub fn up_sets(&self) -> Result<Vec<WorldSet>, KripkeError> {
        let n = self.world_count();
        if n > MAX_ENUMERATION_WORLDS {
            return Err(KripkeError::TooManyWorlds {
                worlds: n,
                limit: MAX_ENUMERATION_WORLDS,
            });
        }
        let mut out = Vec::new();
        for mask in 0..(1u64 << n) {
            let mut closed = true;
            let mut m = mask;
            while m != 0 {
                let x = m.trailing_zeros() as usize;
                m &= m - 1;
                if self.leq.row(x)[0] & !mask != 0 {
                    closed = false;
                    break;
                }
            }
            if closed {
                out.push(WorldSet::from_words(n, {
                    let mut words = vec![0u64; crate::bits::words_for(n)];
                    words[0] = mask;
                    words
                }));
            }
        }
        Ok(out)
    }
}

/// Diagnostic listing of every frame-axiom violation, with witnesses.
#[derive(Debug, Clone, Default, Serialize, PartialEq, Eq)]
pub struct FrameReport {
    /// Worlds `x` with `x ≤ x` missing.
    pub missing_reflexive: Vec<String>,
    /// Triples `(x, y, z)` with `x ≤ y ≤ z` but not `x ≤ z`.
    pub transitivity: Vec<[String; 3]>,
    /// Quadruples `(x', x, y, y')` with `x ≤ x'`, `x R y`, `y' ≤ y`, but
    /// `x' R y'` missing.
    pub closure_condition: Vec<[String; 4]>,
}

impl FrameReport {
    pub fn is_ok(&self) -> bool {
        self.missing_reflexive.is_empty()
            && self.transitivity.is_empty()
            && self.closure_condition.is_empty()
    }
}

/// Check the preorder axioms and the `R` closure condition, reporting every
/// violation as an explicit witness tuple.
pub fn check_frame(frame: &KripkeFrame) -> FrameReport {
    let n = frame.world_count();
    let name = |i: usize| frame.world_name(i).to_string();
    let mut report = FrameReport::default();
    for x in 0..n {
        if !frame.leq.contains(x, x) {
            report.missing_reflexive.push(name(x));
        }
    }
    for x in 0..n {
        for y in frame.leq.row_set(x).iter() {
            for z in frame.leq.row_set(y).iter() {
                if !frame.leq.contains(x, z) {
                    report.transitivity.push([name(x), name(y), name(z)]);
                }
            }
        }
    }
    for x in 0..n {
        for y in frame.r.row_set(x).iter() {
            for x_up in frame.leq.row_set(x).iter() {
                for y_down in 0..n {
                    if frame.leq.contains(y_down, y) && !frame.r.contains(x_up, y_down) {
                        report
                            .closure_condition
                            .push([name(x_up), name(x), name(y), name(y_down)]);
                    }
                }
            }
        }
    }
    report
}

/// Build a valid frame from seeds: `leq` becomes the reflexive-transitive
/// closure of `leq_seed`, and `r` the smallest superset of `r_seed` closed
/// under the frame condition over that preorder.
pub fn close_frame(worlds: Vec<String>, leq_seed: Relation, r_seed: Relation) -> KripkeFrame {
    let n = worlds.len();
    let mut leq = leq_seed;
    leq.close_reflexive_transitive();
    let leq_t = leq.transpose();
    let mut r = Relation::empty(n);
    for x in 0..n {
        for y in r_seed.row_set(x).iter() {
            // Everything above x relates to everything below y.
            let down = leq_t.row_set(y);
            for x_up in leq.row_set(x).iter() {
                r.union_into_row(x_up, &down);
            }
        }
    }
    KripkeFrame::new(worlds, leq, r)
}

/// A model: a frame plus an upward-closed valuation per variable. Variables
/// absent from the map denote the empty set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeModel {
    frame: KripkeFrame,
    valuation: BTreeMap<String, WorldSet>,
}

impl KripkeModel {
    /// Rejects valuations that are not upward closed.
    pub fn new(
        frame: KripkeFrame,
        valuation: BTreeMap<String, WorldSet>,
    ) -> Result<Self, KripkeError> {
        for (var, set) in &valuation {
            for x in set.iter() {
                for y in frame.leq.row_set(x).iter() {
                    if !set.contains(y) {
                        return Err(KripkeError::ValuationNotUpClosed {
                            var: var.clone(),
                            world: frame.world_name(y).to_string(),
                        });
                    }
                }
            }
        }
        Ok(KripkeModel { frame, valuation })
    }

    /// Up-closes every valuation set instead of rejecting.
    pub fn up_closing(frame: KripkeFrame, valuation: BTreeMap<String, WorldSet>) -> Self {
        let valuation = valuation
            .into_iter()
            .map(|(var, set)| {
                let closed = frame.up_close(&set);
                (var, closed)
            })
            .collect();
        KripkeModel { frame, valuation }
    }

    pub fn frame(&self) -> &KripkeFrame {
        &self.frame
    }

    pub fn valuation(&self) -> &BTreeMap<String, WorldSet> {
        &self.valuation
    }

    pub fn var_extension(&self, var: &str) -> WorldSet {
        self.valuation
            .get(var)
            .cloned()
            .unwrap_or_else(|| WorldSet::empty(self.frame.world_count()))
    }

    /// The set of worlds satisfying `f`.
    pub fn extension(&self, f: &Formula) -> WorldSet {
        let cf = CompiledFormula::compile(f);
        let mut scratch = EvalScratch::new();
        self.extension_compiled(&cf, &mut scratch)
    }

    pub fn extension_compiled(&self, cf: &CompiledFormula, scratch: &mut EvalScratch) -> WorldSet {
        let n = self.frame.world_count();
        let words = eval::eval(&self.frame, &self.valuation, cf, scratch).to_vec();
        WorldSet::from_words(n, words)
    }

    pub fn satisfies(&self, world: &str, f: &Formula) -> Result<bool, KripkeError> {
        let x = self
            .frame
            .world_index(world)
            .ok_or_else(|| KripkeError::UnknownWorld(world.to_string()))?;
        Ok(self.extension(f).contains(x))
    }

    /// True iff every world satisfies `f`.
    pub fn valid(&self, f: &Formula) -> bool {
        self.extension(f).is_full()
    }

    pub fn valid_compiled(&self, cf: &CompiledFormula, scratch: &mut EvalScratch) -> bool {
        let n = self.frame.world_count();
        let words = eval::eval(&self.frame, &self.valuation, cf, scratch);
        is_all(words, n)
    }
}

pub(crate) fn is_all(words: &[u64], n: usize) -> bool {
    words.iter().map(|w| w.count_ones() as usize).sum::<usize>() == n
}

/// Validity over every model based on `frame`: all assignments of up-closed
/// sets to `vars` are checked, which costs `(#up-sets)^|vars|` model checks.
/// Variables of `f` missing from `vars` keep the empty valuation.
pub fn valid_in_frame(
    frame: &KripkeFrame,
    f: &Formula,
    vars: &[String],
    max_models: u64,
) -> Result<bool, KripkeError> {
    let ups = frame.up_sets()?;
    let required = (ups.len() as u128)
        .checked_pow(vars.len() as u32)
        .unwrap_or(u128::MAX);
    if required > max_models as u128 {
        return Err(KripkeError::BudgetExceeded {
            required,
            budget: max_models,
        });
    }
    let cf = CompiledFormula::compile(f);
    let mut scratch = EvalScratch::new();
    let mut choice = vec![0usize; vars.len()];
    let n = frame.world_count();
    loop {
        let words = eval::eval_with(
            frame,
            |v| {
                vars.iter()
                    .position(|var| var == v)
                    .map(|k| &ups[choice[k]])
            },
            &cf,
            &mut scratch,
        );
        if !is_all(words, n) {
            return Ok(false);
        }
        // Odometer increment over up-set indexes.
        let mut pos = 0;
        loop {
            if pos == choice.len() {
                return Ok(true);
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

/// `w0`, `w1`, ... — names for generated frames.
pub fn default_world_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("w{i}")).collect()
}
