//! Model JSON loading/saving and DOT export.
//!
//! The on-disk schema is
//! `{"worlds": [...], "leq": [[x,y],...], "r": [[x,y],...], "val": {"p": [...]}}`.
//! `leq` is a seed — its reflexive-transitive closure is taken on load. `r`
//! must already satisfy the frame closure condition over the closed preorder
//! unless [`LoadOptions::close_r`] is set, and valuations must be upward
//! closed unless [`LoadOptions::close_valuation`] is set. Extra JSON keys are
//! ignored, so quotient files produced by filtering load back unchanged.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{check_frame, close_frame, KripkeError, KripkeFrame, KripkeModel};
use crate::bits::{Relation, WorldSet};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub worlds: Vec<String>,
    #[serde(default)]
    pub leq: Vec<(String, String)>,
    #[serde(default)]
    pub r: Vec<(String, String)>,
    #[serde(default)]
    pub val: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Close `r` under the frame condition instead of rejecting violations.
    pub close_r: bool,
    /// Up-close valuation sets instead of rejecting non-persistent ones.
    pub close_valuation: bool,
}

#[derive(Debug, Error)]
pub enum ModelLoadError {
    #[error("invalid model JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("model has no worlds")]
    NoWorlds,
    #[error("duplicate world `{0}`")]
    DuplicateWorld(String),
    #[error("unknown world `{world}` in {place}")]
    UnknownWorld { place: String, world: String },
    #[error(
        "r violates the frame condition ({witnesses} witness(es), first: \
         {first:?}); pass --close-r to close it"
    )]
    FrameCondition {
        witnesses: usize,
        first: [String; 4],
    },
    #[error("{0}; pass --close-valuation to up-close valuations")]
    Valuation(KripkeError),
}

/// Decode and validate a model per the schema rules above.
pub fn parse_model(json: &str, opts: LoadOptions) -> Result<KripkeModel, ModelLoadError> {
    let file: ModelFile = serde_json::from_str(json)?;
    model_from_file(&file, opts)
}

pub fn model_from_file(file: &ModelFile, opts: LoadOptions) -> Result<KripkeModel, ModelLoadError> {
    if file.worlds.is_empty() {
        return Err(ModelLoadError::NoWorlds);
    }
    let n = file.worlds.len();
    let mut index: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, w) in file.worlds.iter().enumerate() {
        if index.insert(w.as_str(), i).is_some() {
            return Err(ModelLoadError::DuplicateWorld(w.clone()));
        }
    }
    let resolve = |place: &str, w: &str| {
        index
            .get(w)
            .copied()
            .ok_or_else(|| ModelLoadError::UnknownWorld {
                place: place.to_string(),
                world: w.to_string(),
            })
    };

    let mut leq = Relation::empty(n);
    for (x, y) in &file.leq {
        leq.set(resolve("leq", x)?, resolve("leq", y)?);
    }
    leq.close_reflexive_transitive();

    let mut r = Relation::empty(n);
    for (x, y) in &file.r {
        r.set(resolve("r", x)?, resolve("r", y)?);
    }
    let frame = if opts.close_r {
        close_frame(file.worlds.clone(), leq, r)
    } else {
        let frame = KripkeFrame::new(file.worlds.clone(), leq, r);
        let report = check_frame(&frame);
        if !report.closure_condition.is_empty() {
            return Err(ModelLoadError::FrameCondition {
                witnesses: report.closure_condition.len(),
                first: report.closure_condition[0].clone(),
            });
        }
        frame
    };

    let mut valuation = BTreeMap::new();
    for (var, worlds) in &file.val {
        let mut set = WorldSet::empty(n);
        for w in worlds {
            set.insert(resolve(&format!("val.{var}"), w)?);
        }
        valuation.insert(var.clone(), set);
    }
    if opts.close_valuation {
        Ok(KripkeModel::up_closing(frame, valuation))
    } else {
        KripkeModel::new(frame, valuation).map_err(ModelLoadError::Valuation)
    }
}

impl From<&KripkeModel> for ModelFile {
    fn from(model: &KripkeModel) -> ModelFile {
        let frame = model.frame();
        let name = |i: usize| frame.world_name(i).to_string();
        ModelFile {
            worlds: frame.worlds().to_vec(),
            leq: frame.leq().pairs().map(|(x, y)| (name(x), name(y))).collect(),
            r: frame.r().pairs().map(|(x, y)| (name(x), name(y))).collect(),
            val: model
                .valuation()
                .iter()
                .map(|(var, set)| (var.clone(), set.iter().map(name).collect()))
                .collect(),
        }
    }
}

impl Serialize for KripkeModel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ModelFile::from(self).serialize(serializer)
    }
}

/// Graphviz rendering: solid edges for the covering relation of `≤` (with a
/// two-headed edge per `≤`-equivalent pair), dashed edges for `R`, and world
/// labels listing the variables satisfied there.
pub fn export_dot(model: &KripkeModel) -> String {
    use std::fmt::Write;

    let frame = model.frame();
    let n = frame.world_count();
    let leq = frame.leq();
    let strict = |x: usize, y: usize| x != y && leq.contains(x, y) && !leq.contains(y, x);

    let mut out = String::new();
    out.push_str("digraph model {\n  rankdir=BT;\n");
    for x in 0..n {
        let vars: Vec<&str> = model
            .valuation()
            .iter()
            .filter(|(_, set)| set.contains(x))
            .map(|(var, _)| var.as_str())
            .collect();
        let label = if vars.is_empty() {
            frame.world_name(x).to_string()
        } else {
            format!("{}\\n{}", frame.world_name(x), vars.join(" "))
        };
        writeln!(out, "  \"{}\" [label=\"{label}\"];", frame.world_name(x)).unwrap();
    }
    for x in 0..n {
        for y in 0..n {
            if strict(x, y) && !(0..n).any(|z| strict(x, z) && strict(z, y)) {
                writeln!(
                    out,
                    "  \"{}\" -> \"{}\";",
                    frame.world_name(x),
                    frame.world_name(y)
                )
                .unwrap();
            }
        }
    }
    // ≤-equivalent distinct worlds collapse order-theoretically; show them
    // with one double-headed edge.
    for x in 0..n {
        for y in x + 1..n {
            if leq.contains(x, y) && leq.contains(y, x) {
                writeln!(
                    out,
                    "  \"{}\" -> \"{}\" [dir=both];",
                    frame.world_name(x),
                    frame.world_name(y)
                )
                .unwrap();
            }
        }
    }
    for (x, y) in frame.r().pairs() {
        writeln!(
            out,
            "  \"{}\" -> \"{}\" [style=dashed];",
            frame.world_name(x),
            frame.world_name(y)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
