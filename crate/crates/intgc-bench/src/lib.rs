//! Shared fixtures for the benchmark suite.

use intgc::formula::{parse, Formula};
use intgc::kripke::KripkeModel;
use intgc::search::{random_model, RandomModelParams};

/// A reproducible medium-size model.
pub fn fixture_model(worlds: usize, seed: u64) -> KripkeModel {
    let params = RandomModelParams::new(worlds, worlds, &["p", "q", "r"]);
    random_model(&params, seed)
}

/// A nested formula exercising every connective.
pub fn fixture_formula() -> Formula {
    parse("[]((p -> <>q) & !r) -> (<>[]p | [](q -> <>(r & p)))").unwrap()
}
