//! Finite algebraic semantics: bounded distributive lattices with a Heyting
//! implication and a Galois-connected operator pair `(f, g)` interpreting
//! `<>` and `[]`, plus the complex algebra of a Kripke frame (its lattice of
//! up-sets with `f` the R-preimage and `g` the dual R-image).

use std::collections::BTreeMap;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::WorldSet;
use crate::formula::Formula;
use crate::kripke::{check_frame, FrameReport, KripkeError, KripkeFrame};

/// Complex algebras refuse frames whose up-set lattice would exceed this many
/// elements (the operation tables are quadratic in it).
pub const MAX_COMPLEX_ELEMENTS: usize = 4096;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("invalid algebra JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed algebra: {0}")]
    BadShape(String),
    #[error("leq is not a partial order: {0}")]
    NotAPartialOrder(String),
    #[error("not a lattice: elements {0} and {1} have no {2}")]
    NotALattice(usize, usize, &'static str),
    #[error("not distributive: witness triple ({0}, {1}, {2})")]
    NotDistributive(usize, usize, usize),
    #[error("variable `{0}` has no assigned value")]
    UnassignedVariable(String),
    #[error("checking {required} assignments exceeds the budget of {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error("frame fails validation ({0:?})")]
    InvalidFrame(FrameReport),
    #[error("up-set lattice too large: {upsets} elements exceed the limit of {limit}")]
    ComplexTooLarge { upsets: usize, limit: usize },
    #[error("operators violate the Galois-connection laws ({0:?})")]
    GcViolations(GcReport),
    #[error(transparent)]
    Frame(#[from] KripkeError),
}

/// A finite bounded distributive lattice with full meet/join/implication
/// tables. Elements are `0..len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteDistLattice {
    n: usize,
    leq: Vec<bool>,
    meet: Vec<usize>,
    join: Vec<usize>,
    imp: Vec<usize>,
    bottom: usize,
    top: usize,
}

impl FiniteDistLattice {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.n + b]
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.n + b]
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.n + b]
    }

    /// Heyting implication: the greatest `c` with `a ∧ c ≤ b`.
    pub fn imp(&self, a: usize, b: usize) -> usize {
        self.imp[a * self.n + b]
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }
}

/// Build the operation tables from an order matrix, or report the first
/// axiom that fails and where.
pub fn lattice_from_order(leq: &[Vec<bool>]) -> Result<FiniteDistLattice, AlgebraError> {
    let n = leq.len();
    if n == 0 {
        return Err(AlgebraError::BadShape("lattice has no elements".into()));
    }
    if leq.iter().any(|row| row.len() != n) {
        return Err(AlgebraError::BadShape(format!(
            "leq must be a {n}x{n} matrix"
        )));
    }
    let le = |a: usize, b: usize| leq[a][b];
    for a in 0..n {
        if !le(a, a) {
            return Err(AlgebraError::NotAPartialOrder(format!(
                "{a} is not below itself"
            )));
        }
    }
    for a in 0..n {
        for b in 0..n {
            if a != b && le(a, b) && le(b, a) {
                return Err(AlgebraError::NotAPartialOrder(format!(
                    "{a} and {b} are below each other"
                )));
            }
            for c in 0..n {
                if le(a, b) && le(b, c) && !le(a, c) {
                    return Err(AlgebraError::NotAPartialOrder(format!(
                        "{a} ≤ {b} ≤ {c} but not {a} ≤ {c}"
                    )));
                }
            }
        }
    }

    let bound = |a: usize, b: usize, below: bool| -> Option<usize> {
        // Greatest lower / least upper bound of {a, b}.
        let cands: Vec<usize> = (0..n)
            .filter(|&c| {
                if below {
                    le(c, a) && le(c, b)
                } else {
                    le(a, c) && le(b, c)
                }
            })
            .collect();
        cands
            .iter()
            .copied()
            .find(|&m| cands.iter().all(|&c| if below { le(c, m) } else { le(m, c) }))
    };

    let mut meet = vec![0usize; n * n];
    let mut join = vec![0usize; n * n];
    for a in 0..n {
        for b in 0..n {
            meet[a * n + b] = bound(a, b, true).ok_or(AlgebraError::NotALattice(a, b, "meet"))?;
            join[a * n + b] = bound(a, b, false).ok_or(AlgebraError::NotALattice(a, b, "join"))?;
        }
    }

    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let left = meet[a * n + join[b * n + c]];
                let right = join[meet[a * n + b] * n + meet[a * n + c]];
                if left != right {
                    return Err(AlgebraError::NotDistributive(a, b, c));
                }
            }
        }
    }

    let bottom = (0..n)
        .find(|&z| (0..n).all(|a| le(z, a)))
        .ok_or(AlgebraError::NotALattice(0, 0, "bottom"))?;
    let top = (0..n)
        .find(|&t| (0..n).all(|a| le(a, t)))
        .ok_or(AlgebraError::NotALattice(0, 0, "top"))?;

    // In a finite distributive lattice {c : a∧c ≤ b} is closed under joins,
    // so its join is the implication.
    let mut imp = vec![0usize; n * n];
    for a in 0..n {
        for b in 0..n {
            let mut best = bottom;
            for c in 0..n {
                if le(meet[a * n + c], b) {
                    best = join[best * n + c];
                }
            }
            debug_assert!(le(meet[a * n + best], b));
            imp[a * n + b] = best;
        }
    }

    Ok(FiniteDistLattice {
        n,
        leq: leq.iter().flat_map(|row| row.iter().copied()).collect(),
        meet,
        join,
        imp,
        bottom,
        top,
    })
}

/// A lattice equipped with the operator pair: `f` interprets `<>` and must be
/// additive and normal, `g` interprets `[]` and must be multiplicative and
/// co-normal, and together they must satisfy `f(a) ≤ b iff a ≤ g(b)`.
#[derive(Debug, Clone)]
pub struct GCAlgebra {
    lattice: FiniteDistLattice,
    f: Vec<usize>,
    g: Vec<usize>,
}

impl GCAlgebra {
    /// Validates the operator laws; see [`GCAlgebra::new_unchecked`] for the
    /// diagnostic path.
    pub fn new(
        lattice: FiniteDistLattice,
        f: Vec<usize>,
        g: Vec<usize>,
    ) -> Result<Self, AlgebraError> {
        let alg = Self::new_unchecked(lattice, f, g)?;
        let report = check_gc_operators(&alg);
        if report.is_ok() {
            Ok(alg)
        } else {
            Err(AlgebraError::GcViolations(report))
        }
    }

    /// Only checks that the tables are total over the carrier.
    pub fn new_unchecked(
        lattice: FiniteDistLattice,
        f: Vec<usize>,
        g: Vec<usize>,
    ) -> Result<Self, AlgebraError> {
        let n = lattice.len();
        for (name, table) in [("f", &f), ("g", &g)] {
            if table.len() != n {
                return Err(AlgebraError::BadShape(format!(
                    "{name} must list {n} values"
                )));
            }
            if let Some(v) = table.iter().find(|&&v| v >= n) {
                return Err(AlgebraError::BadShape(format!(
                    "{name} maps to {v}, outside 0..{n}"
                )));
            }
        }
        Ok(GCAlgebra { lattice, f, g })
    }

    pub fn lattice(&self) -> &FiniteDistLattice {
        &self.lattice
    }

    pub fn apply_f(&self, a: usize) -> usize {
        self.f[a]
    }

    pub fn apply_g(&self, a: usize) -> usize {
        self.g[a]
    }

    pub fn f_table(&self) -> &[usize] {
        &self.f
    }

    pub fn g_table(&self) -> &[usize] {
        &self.g
    }
}

/// Violations of the three operator-law families. Additivity and
/// multiplicativity follow from the Galois law; they are checked separately
/// as cross-validation.
#[derive(Debug, Clone, Default, Serialize)]
pub struct GcReport {
    pub f_not_normal: bool,
    pub f_additivity_failures: Vec<(usize, usize)>,
    pub g_not_conormal: bool,
    pub g_multiplicativity_failures: Vec<(usize, usize)>,
    pub galois_failures: Vec<(usize, usize)>,
}

impl GcReport {
    pub fn is_ok(&self) -> bool {
        !self.f_not_normal
            && !self.g_not_conormal
            && self.f_additivity_failures.is_empty()
            && self.g_multiplicativity_failures.is_empty()
            && self.galois_failures.is_empty()
    }
}

pub fn check_gc_operators(alg: &GCAlgebra) -> GcReport {
    let lat = &alg.lattice;
    let n = lat.len();
    let mut report = GcReport {
        f_not_normal: alg.f[lat.bottom()] != lat.bottom(),
        g_not_conormal: alg.g[lat.top()] != lat.top(),
        ..Default::default()
    };
    for a in 0..n {
        for b in 0..n {
            if alg.f[lat.join(a, b)] != lat.join(alg.f[a], alg.f[b]) {
                report.f_additivity_failures.push((a, b));
            }
            if alg.g[lat.meet(a, b)] != lat.meet(alg.g[a], alg.g[b]) {
                report.g_multiplicativity_failures.push((a, b));
            }
            if lat.leq(alg.f[a], b) != lat.leq(a, alg.g[b]) {
                report.galois_failures.push((a, b));
            }
        }
    }
    report
}

/// Homomorphic evaluation: `&`/`|`/`->` to meet/join/implication, `!a` to
/// `a -> bottom`, `<>` to `f`, `[]` to `g`.
pub fn eval_formula(
    alg: &GCAlgebra,
    assignment: &BTreeMap<String, usize>,
    f: &Formula,
) -> Result<usize, AlgebraError> {
    let lat = &alg.lattice;
    Ok(match f {
        Formula::Var(v) => *assignment
            .get(v)
            .ok_or_else(|| AlgebraError::UnassignedVariable(v.clone()))?,
        Formula::Top => lat.top(),
        Formula::Bot => lat.bottom(),
        Formula::Not(c) => {
            let cv = eval_formula(alg, assignment, c)?;
            lat.imp(cv, lat.bottom())
        }
        Formula::And(l, r) => {
            let (lv, rv) = (
                eval_formula(alg, assignment, l)?,
                eval_formula(alg, assignment, r)?,
            );
            lat.meet(lv, rv)
        }
        Formula::Or(l, r) => {
            let (lv, rv) = (
                eval_formula(alg, assignment, l)?,
                eval_formula(alg, assignment, r)?,
            );
            lat.join(lv, rv)
        }
        Formula::Imp(l, r) => {
            let (lv, rv) = (
                eval_formula(alg, assignment, l)?,
                eval_formula(alg, assignment, r)?,
            );
            lat.imp(lv, rv)
        }
        Formula::Up(c) => alg.f[eval_formula(alg, assignment, c)?],
        Formula::Down(c) => alg.g[eval_formula(alg, assignment, c)?],
    })
}

/// True iff the formula evaluates to top under every assignment of elements
/// to its variables (`len^|vars|` evaluations, budget-guarded).
pub fn valid_in_algebra(
    alg: &GCAlgebra,
    f: &Formula,
    max_assignments: u64,
) -> Result<bool, AlgebraError> {
    let vars = f.variables();
    let n = alg.lattice.len();
    let required = (n as u128)
        .checked_pow(vars.len() as u32)
        .unwrap_or(u128::MAX);
    if required > max_assignments as u128 {
        return Err(AlgebraError::BudgetExceeded {
            required,
            budget: max_assignments,
        });
    }
    let mut choice = vec![0usize; vars.len()];
    loop {
        let assignment: BTreeMap<String, usize> = vars
            .iter()
            .cloned()
            .zip(choice.iter().copied())
            .collect();
        if eval_formula(alg, &assignment, f)? != alg.lattice.top() {
            return Ok(false);
        }
        let mut pos = 0;
        loop {
            if pos == choice.len() {
                return Ok(true);
            }
            choice[pos] += 1;
            if choice[pos] < n {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// The complex algebra of a frame: elements are the up-sets in ascending
/// numeric order (so bottom is `∅` and top the full set), meet/join are
/// intersection/union, implication is the semantic one, `f(U)` is the set of
/// worlds with an R-successor in `U`, and `g(U)` the set of worlds all of
/// whose R-predecessors lie in `U`. The frame condition makes both images
/// up-sets and the pair a Galois connection.
pub fn complex_algebra(frame: &KripkeFrame) -> Result<GCAlgebra, AlgebraError> {
    let report = check_frame(frame);
    if !report.is_ok() {
        return Err(AlgebraError::InvalidFrame(report));
    }
    let ups = frame.up_sets()?;
    if ups.len() > MAX_COMPLEX_ELEMENTS {
        return Err(AlgebraError::ComplexTooLarge {
            upsets: ups.len(),
            limit: MAX_COMPLEX_ELEMENTS,
        });
    }
    let n = ups.len();
    let index: HashMap<&WorldSet, usize> = ups.iter().zip(0..).collect();
    let lookup = |set: &WorldSet| -> usize {
        *index
            .get(set)
            .expect("frame condition keeps operator images upward closed")
    };

    let mut leq = vec![false; n * n];
    let mut meet = vec![0usize; n * n];
    let mut join = vec![0usize; n * n];
    let mut imp = vec![0usize; n * n];
    for a in 0..n {
        for b in 0..n {
            leq[a * n + b] = ups[a].is_subset(&ups[b]);
            let mut m = ups[a].clone();
            m.intersect_with(&ups[b]);
            meet[a * n + b] = lookup(&m);
            let mut j = ups[a].clone();
            j.union_with(&ups[b]);
            join[a * n + b] = lookup(&j);
            // x ⊨ U -> V iff no y ≥ x is in U but not V.
            let mut bad = ups[b].complement();
            bad.intersect_with(&ups[a]);
            imp[a * n + b] = lookup(&frame.leq().preimage(&bad).complement());
        }
    }
    let lattice = FiniteDistLattice {
        n,
        leq,
        meet,
        join,
        imp,
        bottom: 0,
        top: n - 1,
    };

    let f: Vec<usize> = ups.iter().map(|u| lookup(&frame.r().preimage(u))).collect();
    let g: Vec<usize> = ups
        .iter()
        .map(|u| lookup(&frame.r().image(&u.complement()).complement()))
        .collect();
    GCAlgebra::new(lattice, f, g)
}

/// On-disk schema: `{"leq": [[0/1,...]], "f": [...], "g": [...]}` with
/// elements implicitly `0..n`. `elements` is informative output from the
/// complex-algebra command and ignored on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub leq: Vec<Vec<u8>>,
    pub f: Vec<usize>,
    pub g: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<Vec<String>>>,
}

impl AlgebraFile {
    pub fn from_algebra(alg: &GCAlgebra) -> Self {
        let lat = alg.lattice();
        let n = lat.len();
        AlgebraFile {
            leq: (0..n)
                .map(|a| (0..n).map(|b| lat.leq(a, b) as u8).collect())
                .collect(),
            f: alg.f.clone(),
            g: alg.g.clone(),
            elements: None,
        }
    }
}

/// Decode an algebra file without enforcing the operator laws (the carrier
/// must still form a finite distributive lattice).
pub fn parse_algebra_unchecked(json: &str) -> Result<GCAlgebra, AlgebraError> {
    let file: AlgebraFile = serde_json::from_str(json)?;
    let order: Vec<Vec<bool>> = file
        .leq
        .iter()
        .map(|row| row.iter().map(|&v| v != 0).collect())
        .collect();
    let lattice = lattice_from_order(&order)?;
    GCAlgebra::new_unchecked(lattice, file.f, file.g)
}

/// Decode an algebra file, enforcing the operator laws.
pub fn parse_algebra(json: &str) -> Result<GCAlgebra, AlgebraError> {
    let alg = parse_algebra_unchecked(json)?;
    let report = check_gc_operators(&alg);
    if report.is_ok() {
        Ok(alg)
    } else {
        Err(AlgebraError::GcViolations(report))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::Relation;
    use crate::formula::parse;

    fn chain(n: usize) -> FiniteDistLattice {
        let leq: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| a <= b).collect()).collect();
        lattice_from_order(&leq).unwrap()
    }

    #[test]
    fn two_chain_is_boolean() {
        let lat = chain(2);
        assert_eq!(lat.bottom(), 0);
        assert_eq!(lat.top(), 1);
        assert_eq!(lat.imp(1, 0), 0);
        assert_eq!(lat.imp(0, 0), 1);
        assert_eq!(lat.imp(0, 1), 1);
        assert_eq!(lat.meet(1, 0), 0);
        assert_eq!(lat.join(1, 0), 1);
    }

    #[test]
    fn three_chain_refutes_double_negation() {
        let lat = chain(3);
        let m = 1;
        assert_eq!(lat.imp(m, 0), 0);
        let not_not_m = lat.imp(lat.imp(m, 0), 0);
        assert_eq!(not_not_m, 2);
        assert_ne!(not_not_m, m);
    }

    #[test]
    fn diamond_is_not_distributive() {
        // bottom 0, atoms 1..=3, top 4.
        let mut leq = vec![vec![false; 5]; 5];
        for a in 0..5 {
            leq[a][a] = true;
            leq[0][a] = true;
            leq[a][4] = true;
        }
        assert!(matches!(
            lattice_from_order(&leq),
            Err(AlgebraError::NotDistributive(..))
        ));
    }

    #[test]
    fn non_orders_are_rejected() {
        let not_refl = vec![vec![false]];
        assert!(matches!(
            lattice_from_order(&not_refl),
            Err(AlgebraError::NotAPartialOrder(_))
        ));
        // Two incomparable elements have no join.
        let leq = vec![vec![true, false], vec![false, true]];
        assert!(matches!(
            lattice_from_order(&leq),
            Err(AlgebraError::NotALattice(..))
        ));
    }

    #[test]
    fn gc_check_examples() {
        let lat = chain(2);
        let id = GCAlgebra::new_unchecked(lat.clone(), vec![0, 1], vec![0, 1]).unwrap();
        assert!(check_gc_operators(&id).is_ok());

        // f constant bottom with g constant top is a Galois pair.
        let consts = GCAlgebra::new_unchecked(lat.clone(), vec![0, 0], vec![1, 1]).unwrap();
        assert!(check_gc_operators(&consts).is_ok());

        // f constant top is not even normal.
        let bad = GCAlgebra::new_unchecked(lat, vec![1, 1], vec![1, 1]).unwrap();
        let report = check_gc_operators(&bad);
        assert!(report.f_not_normal);
        assert!(!report.is_ok());
    }

    #[test]
    fn eval_examples() {
        let lat = chain(3);
        let alg = GCAlgebra::new(lat, vec![0, 1, 2], vec![0, 1, 2]).unwrap();
        let mut assignment = BTreeMap::new();
        assignment.insert("p".to_string(), 1);
        assert_eq!(
            eval_formula(&alg, &assignment, &parse("p -> p").unwrap()).unwrap(),
            alg.lattice().top()
        );
        assert_eq!(
            eval_formula(&alg, &assignment, &parse("[]true").unwrap()).unwrap(),
            alg.lattice().top()
        );
        assert_eq!(
            eval_formula(&alg, &assignment, &parse("!!p").unwrap()).unwrap(),
            alg.lattice().top()
        );
        assert!(matches!(
            eval_formula(&alg, &assignment, &parse("q").unwrap()),
            Err(AlgebraError::UnassignedVariable(_))
        ));
    }

    #[test]
    fn validity_examples() {
        let lat = chain(2);
        let alg = GCAlgebra::new(lat, vec![0, 1], vec![0, 1]).unwrap();
        // Valid on this particular algebra even though it is not provable.
        assert!(valid_in_algebra(&alg, &parse("[]p -> p").unwrap(), 100).unwrap());
        assert!(valid_in_algebra(&alg, &parse("p -> []<>p").unwrap(), 100).unwrap());
        assert!(!valid_in_algebra(&alg, &parse("p | !p").unwrap(), 2).is_err());
        assert!(matches!(
            valid_in_algebra(&alg, &parse("p & q & r").unwrap(), 4),
            Err(AlgebraError::BudgetExceeded { .. })
        ));
    }

    fn worked_frame() -> KripkeFrame {
        KripkeFrame::new(
            vec!["a".into(), "b".into()],
            Relation::identity(2),
            Relation::from_pairs(2, &[(1, 0)]),
        )
    }

    #[test]
    fn complex_algebra_worked_example() {
        let alg = complex_algebra(&worked_frame()).unwrap();
        let lat = alg.lattice();
        assert_eq!(lat.len(), 4); // ∅, {a}, {b}, {a,b}
        assert_eq!(lat.bottom(), 0);
        assert_eq!(lat.top(), 3);
        // f({a}) = {b}: index({a}) = 1, index({b}) = 2.
        assert_eq!(alg.apply_f(1), 2);
        // g({b}) = {a,b}.
        assert_eq!(alg.apply_g(2), 3);
        // Galois instance: f({a}) ⊆ {b} iff {a} ⊆ g({b}).
        assert!(lat.leq(alg.apply_f(1), 2));
        assert!(lat.leq(1, alg.apply_g(2)));

        // The worked countermodel refutes []p -> p algebraically too.
        assert!(!valid_in_algebra(&alg, &parse("[]p -> p").unwrap(), 100).unwrap());
    }

    #[test]
    fn complex_algebra_degenerate_relations() {
        let empty_r = KripkeFrame::new(
            vec!["a".into(), "b".into()],
            Relation::identity(2),
            Relation::empty(2),
        );
        let alg = complex_algebra(&empty_r).unwrap();
        assert!(alg.f_table().iter().all(|&v| v == alg.lattice().bottom()));
        assert!(alg.g_table().iter().all(|&v| v == alg.lattice().top()));

        let single = KripkeFrame::new(
            vec!["a".into()],
            Relation::identity(1),
            Relation::from_pairs(1, &[(0, 0)]),
        );
        let alg = complex_algebra(&single).unwrap();
        assert_eq!(alg.f_table(), &[0, 1]);
        assert_eq!(alg.g_table(), &[0, 1]);
    }

    #[test]
    fn complex_lattice_matches_lattice_from_order() {
        // Cross-check the direct up-set construction against the generic
        // table builder on the same order matrix.
        let frame = worked_frame();
        let alg = complex_algebra(&frame).unwrap();
        let lat = alg.lattice();
        let n = lat.len();
        let order: Vec<Vec<bool>> = (0..n)
            .map(|a| (0..n).map(|b| lat.leq(a, b)).collect())
            .collect();
        let rebuilt = lattice_from_order(&order).unwrap();
        assert_eq!(lat, &rebuilt);
    }

    #[test]
    fn algebra_file_roundtrip() {
        let alg = complex_algebra(&worked_frame()).unwrap();
        let json = serde_json::to_string(&AlgebraFile::from_algebra(&alg)).unwrap();
        let again = parse_algebra(&json).unwrap();
        assert_eq!(alg.lattice(), again.lattice());
        assert_eq!(alg.f_table(), again.f_table());
        assert_eq!(alg.g_table(), again.g_table());
    }
}
