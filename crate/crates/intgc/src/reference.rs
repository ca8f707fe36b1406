//! Straightforward reference implementations used for differential testing.
//!
//! Everything here follows the defining clauses literally — quantifier loops
//! over worlds, no memoization, no bitset tricks — and stays independent of
//! the optimized paths in [`crate::kripke`]. Tests compare the two routes on
//! the same inputs.

use crate::bits::Relation;
use crate::formula::Formula;
use crate::kripke::KripkeModel;

/// Satisfaction by direct structural recursion over the seven clauses.
pub fn naive_satisfies(model: &KripkeModel, x: usize, f: &Formula) -> bool {
    let frame = model.frame();
    let n = frame.world_count();
    match f {
        Formula::Var(v) => model.valuation().get(v).is_some_and(|s| s.contains(x)),
        Formula::Top => true,
        Formula::Bot => false,
        Formula::And(l, r) => naive_satisfies(model, x, l) && naive_satisfies(model, x, r),
        Formula::Or(l, r) => naive_satisfies(model, x, l) || naive_satisfies(model, x, r),
        Formula::Imp(l, r) => (0..n).all(|y| {
            !frame.leq().contains(x, y)
                || !naive_satisfies(model, y, l)
                || naive_satisfies(model, y, r)
        }),
        Formula::Not(c) => {
            (0..n).all(|y| !frame.leq().contains(x, y) || !naive_satisfies(model, y, c))
        }
        Formula::Up(c) => {
            (0..n).any(|y| frame.r().contains(x, y) && naive_satisfies(model, y, c))
        }
        Formula::Down(c) => {
            (0..n).all(|y| !frame.r().contains(y, x) || naive_satisfies(model, y, c))
        }
    }
}

/// The frame-condition closure computed by fixpoint iteration of the rule
/// `x ≤ x', x R y, y' ≤ y ⟹ x' R y'` (rather than the one-shot image
/// construction in [`crate::kripke::close_frame`]).
pub fn naive_star_closure(leq: &Relation, r_seed: &Relation) -> Relation {
    let n = leq.size();
    let mut r = r_seed.clone();
    loop {
        let mut changed = false;
        for x in 0..n {
            for y in 0..n {
                if !r.contains(x, y) {
                    continue;
                }
                for x_up in 0..n {
                    if !leq.contains(x, x_up) {
                        continue;
                    }
                    for y_down in 0..n {
                        if leq.contains(y_down, y) && !r.contains(x_up, y_down) {
                            r.set(x_up, y_down);
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            return r;
        }
    }
}
