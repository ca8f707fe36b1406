//! Filtration: quotient a model by agreement on the closure set Γ of a root
//! formula, producing a finite model that satisfies exactly the same Γ
//! members pointwise.
//!
//! The textbook construction quantifies over the infinite prefix family Σ.
//! Every Σ member is provably equivalent to its prefix normal form in Γ, so
//! agreement and the quotient preorder reduce to Γ signatures, and the
//! quotient modal relation reduces to a finite set of normal-form pairs
//! ([`rf_pair_basis`]): `c R d` in the quotient iff for every pair
//! `(box, body)`, `d ⊨ box` implies `c ⊨ body`.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::bits::{Relation, WorldSet};
use crate::formula::{normalize, render, ClosureBasis, Formula};
use crate::kripke::{
    check_frame, CompiledFormula, EvalScratch, FrameReport, KripkeError, KripkeFrame, KripkeModel,
};

/// One world's satisfaction pattern over Γ, in `gamma` order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature(pub Vec<bool>);

impl Signature {
    pub fn bits(&self) -> String {
        self.0.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    fn leq(&self, other: &Signature) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *b || !*a)
    }
}

#[derive(Debug, Error)]
pub enum FiltrationError {
    #[error("source frame fails validation ({0:?})")]
    InvalidFrame(FrameReport),
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
}

/// The signature of a single world. Mostly a diagnostic; [`build_filtration`]
/// computes all worlds at once.
pub fn signature(
    model: &KripkeModel,
    world: &str,
    basis: &ClosureBasis,
) -> Result<Signature, KripkeError> {
    let x = model
        .frame()
        .world_index(world)
        .ok_or_else(|| KripkeError::UnknownWorld(world.to_string()))?;
    Ok(world_signatures(model, basis).swap_remove(x))
}

/// Signatures of every world, indexed like the frame's world list.
pub fn world_signatures(model: &KripkeModel, basis: &ClosureBasis) -> Vec<Signature> {
    let n = model.frame().world_count();
    let mut scratch = EvalScratch::new();
    let exts: Vec<WorldSet> = basis
        .gamma()
        .iter()
        .map(|g| model.extension_compiled(&CompiledFormula::compile(g), &mut scratch))
        .collect();
    (0..n)
        .map(|x| Signature(exts.iter().map(|e| e.contains(x)).collect()))
        .collect()
}

/// Normal-form pairs `(box, body)` such that the quotient relation is
/// `c R d iff ∀(box, body): d ⊨ box implies c ⊨ body`.
///
/// These are exactly the normal forms of all pairs `([]B, B)` with `[]B` in
/// the prefix family: each `[]C ∈ Γ` contributes `([]C, C)` (prefix depth 0)
/// and `([]C, <>[]C)` (all deeper prefixes), and each `<>C ∈ Γ` contributes
/// `([]<>C, <>C)`. At most `3·|Γ|` pairs before deduplication.
pub fn rf_pair_basis(basis: &ClosureBasis) -> Vec<(Formula, Formula)> {
    let mut pairs = Vec::new();
    for g in basis.gamma() {
        match g {
            Formula::Down(inner) => {
                pairs.push((normalize(g), normalize(inner)));
                pairs.push((normalize(g), normalize(&Formula::up(g.clone()))));
            }
            Formula::Up(_) => {
                pairs.push((normalize(&Formula::down(g.clone())), normalize(g)));
            }
            _ => {}
        }
    }
    dedup_sorted(pairs)
}

/// The dual pair basis `(body, diamond)`: the quotient relation equals
/// `c R d iff ∀(body, diamond): d ⊨ body implies c ⊨ diamond`, built from the
/// normal forms of all pairs `(B, <>B)` with `<>B` in the prefix family.
pub fn rf_pair_basis_alt(basis: &ClosureBasis) -> Vec<(Formula, Formula)> {
    let mut pairs = Vec::new();
    for g in basis.gamma() {
        match g {
            Formula::Up(inner) => {
                pairs.push((normalize(inner), normalize(g)));
                pairs.push((normalize(&Formula::down(g.clone())), normalize(g)));
            }
            Formula::Down(_) => {
                pairs.push((normalize(g), normalize(&Formula::up(g.clone()))));
            }
            _ => {}
        }
    }
    dedup_sorted(pairs)
}

fn dedup_sorted(mut pairs: Vec<(Formula, Formula)>) -> Vec<(Formula, Formula)> {
    pairs.sort();
    pairs.dedup();
    pairs
}

/// A filtration of `source` through the closure set of `basis.root()`.
#[derive(Debug, Clone)]
pub struct Filtration {
    basis: ClosureBasis,
    source: KripkeModel,
    classes: Vec<Signature>,
    class_of: Vec<usize>,
    leq_f: Relation,
    r_f: Relation,
    v_f: BTreeMap<String, WorldSet>,
}

impl Filtration {
    pub fn basis(&self) -> &ClosureBasis {
        &self.basis
    }

    pub fn source(&self) -> &KripkeModel {
        &self.source
    }

    pub fn classes(&self) -> &[Signature] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Class index of each source world, indexed like the world list.
    pub fn class_of(&self) -> &[usize] {
        &self.class_of
    }

    pub fn class_of_world(&self, world: &str) -> Result<usize, FiltrationError> {
        let x = self
            .source
            .frame()
            .world_index(world)
            .ok_or_else(|| FiltrationError::UnknownWorld(world.to_string()))?;
        Ok(self.class_of[x])
    }

    pub fn class_name(&self, class: usize) -> String {
        format!("c{class}")
    }

    pub fn leq_f(&self) -> &Relation {
        &self.leq_f
    }

    pub fn r_f(&self) -> &Relation {
        &self.r_f
    }

    pub fn v_f(&self) -> &BTreeMap<String, WorldSet> {
        &self.v_f
    }

    /// The quotient as an ordinary model with worlds `c0`, `c1`, ...
    pub fn quotient_model(&self) -> KripkeModel {
        let names: Vec<String> = (0..self.class_count()).map(|i| self.class_name(i)).collect();
        let frame = KripkeFrame::new(names, self.leq_f.clone(), self.r_f.clone());
        KripkeModel::new(frame, self.v_f.clone())
            .expect("quotient valuation is upward closed by construction")
    }
}

/// Quotient `model` by Γ-signature agreement for the closure set of `root`.
///
/// Classes are ordered by signature (entry 0 most significant), so output is
/// reproducible. The quotient preorder is entrywise signature inclusion and
/// the quotient modal relation comes from [`rf_pair_basis`].
pub fn build_filtration(model: &KripkeModel, root: Formula) -> Result<Filtration, FiltrationError> {
    let report = check_frame(model.frame());
    if !report.is_ok() {
        return Err(FiltrationError::InvalidFrame(report));
    }
    let basis = ClosureBasis::new(root);
    let sigs = world_signatures(model, &basis);

    let mut classes: Vec<Signature> = sigs.to_vec();
    classes.sort();
    classes.dedup();
    let class_of: Vec<usize> = sigs
        .iter()
        .map(|s| classes.binary_search(s).expect("own signature present"))
        .collect();

    let k = classes.len();
    let mut leq_f = Relation::empty(k);
    for i in 0..k {
        for j in 0..k {
            if classes[i].leq(&classes[j]) {
                leq_f.set(i, j);
            }
        }
    }

    let pair_indexes = |pairs: &[(Formula, Formula)]| -> Vec<(usize, usize)> {
        pairs
            .iter()
            .map(|(on_target, on_source)| {
                (
                    basis
                        .gamma_index(on_target)
                        .expect("pair component is a Γ member"),
                    basis
                        .gamma_index(on_source)
                        .expect("pair component is a Γ member"),
                )
            })
            .collect()
    };
    let r_f = relation_from_pairs(&classes, &pair_indexes(&rf_pair_basis(&basis)));

    let mut v_f = BTreeMap::new();
    for (gi, g) in basis.gamma().iter().enumerate() {
        if let Formula::Var(v) = g {
            let mut set = WorldSet::empty(k);
            for (ci, sig) in classes.iter().enumerate() {
                if sig.0[gi] {
                    set.insert(ci);
                }
            }
            v_f.insert(v.clone(), set);
        }
    }

    Ok(Filtration {
        basis,
        source: model.clone(),
        classes,
        class_of,
        leq_f,
        r_f,
        v_f,
    })
}

/// `c R d` iff for every `(jx, ix)`: `classes[d][jx]` implies `classes[c][ix]`.
fn relation_from_pairs(classes: &[Signature], pairs: &[(usize, usize)]) -> Relation {
    let k = classes.len();
    let mut rel = Relation::empty(k);
    for c in 0..k {
        for d in 0..k {
            if pairs
                .iter()
                .all(|&(jx, ix)| !classes[d].0[jx] || classes[c].0[ix])
            {
                rel.set(c, d);
            }
        }
    }
    rel
}

/// One world/class/formula triple where source and quotient disagree.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct AgreementFailure {
    pub world: String,
    pub class: String,
    pub formula: String,
    pub holds_in_source: bool,
}

/// Results of the five filtration checks, with witnesses on failure:
/// source-relation preservation into the quotient, quotient frame axioms,
/// pointwise agreement on every Γ member, the `2^|Γ|` class bound, and
/// equality of the two pair-basis routes to the quotient relation.
#[derive(Debug, Clone, Serialize)]
pub struct FiltrationReport {
    pub leq_preservation_failures: Vec<(String, String)>,
    pub r_preservation_failures: Vec<(String, String)>,
    pub quotient_frame: FrameReport,
    pub agreement_failures: Vec<AgreementFailure>,
    pub classes: usize,
    pub gamma_len: usize,
    pub class_bound_ok: bool,
    pub alt_relation_mismatches: Vec<(String, String)>,
}

impl FiltrationReport {
    pub fn preservation_ok(&self) -> bool {
        self.leq_preservation_failures.is_empty() && self.r_preservation_failures.is_empty()
    }

    pub fn quotient_frame_ok(&self) -> bool {
        self.quotient_frame.is_ok()
    }

    pub fn agreement_ok(&self) -> bool {
        self.agreement_failures.is_empty()
    }

    pub fn alt_relation_ok(&self) -> bool {
        self.alt_relation_mismatches.is_empty()
    }

    pub fn is_ok(&self) -> bool {
        self.preservation_ok()
            && self.quotient_frame_ok()
            && self.agreement_ok()
            && self.class_bound_ok
            && self.alt_relation_ok()
    }
}

/// Re-derive every property the construction promises, evaluating on the
/// quotient from scratch.
pub fn verify_filtration(filt: &Filtration) -> FiltrationReport {
    let source = filt.source();
    let frame = source.frame();
    let n = frame.world_count();
    let name = |i: usize| frame.world_name(i).to_string();

    let mut leq_fail = Vec::new();
    let mut r_fail = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let (cx, cy) = (filt.class_of[x], filt.class_of[y]);
            if frame.leq().contains(x, y) && !filt.leq_f.contains(cx, cy) {
                leq_fail.push((name(x), name(y)));
            }
            if frame.r().contains(x, y) && !filt.r_f.contains(cx, cy) {
                r_fail.push((name(x), name(y)));
            }
        }
    }

    let quotient = filt.quotient_model();
    let quotient_frame = check_frame(quotient.frame());

    let mut agreement = Vec::new();
    let mut scratch = EvalScratch::new();
    for g in filt.basis.gamma() {
        let cf = CompiledFormula::compile(g);
        let src_ext = source.extension_compiled(&cf, &mut scratch);
        let quo_ext = quotient.extension_compiled(&cf, &mut scratch);
        for x in 0..n {
            let in_source = src_ext.contains(x);
            if in_source != quo_ext.contains(filt.class_of[x]) {
                agreement.push(AgreementFailure {
                    world: name(x),
                    class: filt.class_name(filt.class_of[x]),
                    formula: render(g),
                    holds_in_source: in_source,
                });
            }
        }
    }

    let gamma_len = filt.basis.gamma_len();
    let class_bound_ok = if gamma_len >= usize::BITS as usize - 1 {
        true // 2^|Γ| dwarfs any representable class count
    } else {
        filt.class_count() <= 1usize << gamma_len
    };

    let alt_pairs: Vec<(usize, usize)> = rf_pair_basis_alt(&filt.basis)
        .iter()
        .map(|(a, b)| {
            (
                filt.basis.gamma_index(a).expect("pair component in Γ"),
                filt.basis.gamma_index(b).expect("pair component in Γ"),
            )
        })
        .collect();
    let r_alt = relation_from_pairs(&filt.classes, &alt_pairs);
    let mut alt_mismatches = Vec::new();
    let k = filt.class_count();
    for c in 0..k {
        for d in 0..k {
            if filt.r_f.contains(c, d) != r_alt.contains(c, d) {
                alt_mismatches.push((filt.class_name(c), filt.class_name(d)));
            }
        }
    }

    FiltrationReport {
        leq_preservation_failures: leq_fail,
        r_preservation_failures: r_fail,
        quotient_frame,
        agreement_failures: agreement,
        classes: filt.class_count(),
        gamma_len,
        class_bound_ok,
        alt_relation_mismatches: alt_mismatches,
    }
}
