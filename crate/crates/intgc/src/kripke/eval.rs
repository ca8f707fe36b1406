//! Bitset evaluation of formulas over a model.
//!
//! A formula is compiled once into a post-order array of nodes with shared
//! subterms deduplicated; evaluation then fills one bitset row per node in a
//! reusable scratch arena. The arena row of a node is the extension of that
//! subformula, so the pass is simultaneously the satisfaction check for every
//! (subformula, world) pair.

use std::collections::BTreeMap;
use std::collections::HashMap;

use crate::bits::{words_for, WorldSet};
use crate::formula::Formula;
use crate::kripke::KripkeFrame;

#[derive(Debug, Clone)]
enum Node {
    Var(String),
    Top,
    Bot,
    Not(u32),
    And(u32, u32),
    Or(u32, u32),
    Imp(u32, u32),
    Up(u32),
    Down(u32),
}

/// A formula lowered to a post-order node array (children before parents,
/// root last).
#[derive(Debug, Clone)]
pub struct CompiledFormula {
    nodes: Vec<Node>,
}

impl CompiledFormula {
    pub fn compile(f: &Formula) -> Self {
        fn go(f: &Formula, memo: &mut HashMap<Formula, u32>, nodes: &mut Vec<Node>) -> u32 {
            if let Some(&i) = memo.get(f) {
                return i;
            }
            let node = match f {
                Formula::Var(v) => Node::Var(v.clone()),
                Formula::Top => Node::Top,
                Formula::Bot => Node::Bot,
                Formula::Not(c) => Node::Not(go(c, memo, nodes)),
                Formula::And(l, r) => Node::And(go(l, memo, nodes), go(r, memo, nodes)),
                Formula::Or(l, r) => Node::Or(go(l, memo, nodes), go(r, memo, nodes)),
                Formula::Imp(l, r) => Node::Imp(go(l, memo, nodes), go(r, memo, nodes)),
                Formula::Up(c) => Node::Up(go(c, memo, nodes)),
                Formula::Down(c) => Node::Down(go(c, memo, nodes)),
            };
            let i = nodes.len() as u32;
            nodes.push(node);
            memo.insert(f.clone(), i);
            i
        }
        let mut nodes = Vec::new();
        go(f, &mut HashMap::new(), &mut nodes);
        CompiledFormula { nodes }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

/// Reusable evaluation arena; grows to the largest (nodes × words) seen.
#[derive(Debug, Default)]
pub struct EvalScratch {
    arena: Vec<u64>,
    tmp: Vec<u64>,
}

impl EvalScratch {
    pub fn new() -> Self {
        Self::default()
    }
}

/// Evaluate `cf` over the frame and valuation; returns the root extension as
/// a word slice borrowed from the scratch arena.
pub(crate) fn eval<'s>(
    frame: &KripkeFrame,
    valuation: &BTreeMap<String, WorldSet>,
    cf: &CompiledFormula,
    scratch: &'s mut EvalScratch,
) -> &'s [u64] {
    eval_with(frame, |v| valuation.get(v), cf, scratch)
}

/// As [`eval`], but with an arbitrary variable lookup so hot loops can swap
/// valuations without rebuilding a map.
pub(crate) fn eval_with<'s, 'v, F>(
    frame: &KripkeFrame,
    lookup: F,
    cf: &CompiledFormula,
    scratch: &'s mut EvalScratch,
) -> &'s [u64]
where
    F: Fn(&str) -> Option<&'v WorldSet>,
{
    let n = frame.world_count();
    let wpr = words_for(n);
    let full_tail = WorldSet::full(n);
    let full = full_tail.words();

    scratch.arena.clear();
    scratch.arena.resize(cf.nodes.len() * wpr, 0);
    scratch.tmp.clear();
    scratch.tmp.resize(wpr, 0);

    fn child(done: &[u64], wpr: usize, c: u32) -> &[u64] {
        &done[c as usize * wpr..(c as usize + 1) * wpr]
    }

    for (i, node) in cf.nodes.iter().enumerate() {
        let (done, rest) = scratch.arena.split_at_mut(i * wpr);
        let done: &[u64] = done;
        let out = &mut rest[..wpr];
        let child = |c: u32| child(done, wpr, c);
        match node {
            Node::Var(v) => {
                if let Some(set) = lookup(v) {
                    out.copy_from_slice(set.words());
                }
            }
            Node::Top => out.copy_from_slice(full),
            Node::Bot => {}
            Node::And(l, r) => {
                for ((o, a), b) in out.iter_mut().zip(child(*l)).zip(child(*r)) {
                    *o = a & b;
                }
            }
            Node::Or(l, r) => {
                for ((o, a), b) in out.iter_mut().zip(child(*l)).zip(child(*r)) {
                    *o = a | b;
                }
            }
            Node::Not(c) => {
                // x ⊨ !A iff no y ≥ x satisfies A.
                forbid_above(frame, child(*c), out);
            }
            Node::Imp(l, r) => {
                // x ⊨ A -> B iff no y ≥ x satisfies A but not B.
                let (lw, rw) = (child(*l), child(*r));
                for ((t, a), b) in scratch.tmp.iter_mut().zip(lw).zip(rw) {
                    *t = a & !b;
                }
                forbid_above(frame, &scratch.tmp, out);
            }
            Node::Up(c) => {
                // x ⊨ <>A iff some R-successor of x satisfies A.
                let cw = child(*c);
                for x in 0..n {
                    if crate::bits::any_and(frame.r().row(x), cw) {
                        out[x / 64] |= 1u64 << (x % 64);
                    }
                }
            }
            Node::Down(c) => {
                // x ⊨ []A iff every R-predecessor of x satisfies A:
                // complement of the R-image of the complement of A.
                let cw = child(*c);
                for (t, a) in scratch.tmp.iter_mut().zip(cw) {
                    *t = !a;
                }
                mask_tail(&mut scratch.tmp, full);
                for y in 0..n {
                    if scratch.tmp[y / 64] >> (y % 64) & 1 == 1 {
                        for (o, rw) in out.iter_mut().zip(frame.r().row(y)) {
                            *o |= rw;
                        }
                    }
                }
                for (o, f) in out.iter_mut().zip(full) {
                    *o = !*o & f;
                }
            }
        }
    }
    &scratch.arena[(cf.nodes.len() - 1) * wpr..]
}

/// `out[x] = 1` iff no `y ≥ x` lies in `bad`.
fn forbid_above(frame: &KripkeFrame, bad: &[u64], out: &mut [u64]) {
    let n = frame.world_count();
    for x in 0..n {
        if !crate::bits::any_and(frame.leq().row(x), bad) {
            out[x / 64] |= 1u64 << (x % 64);
        }
    }
}

fn mask_tail(words: &mut [u64], full: &[u64]) {
    for (w, f) in words.iter_mut().zip(full) {
        *w &= f;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::Relation;
    use crate::formula::parse;
    use crate::kripke::KripkeModel;

    #[test]
    fn compile_dedups_shared_subterms() {
        let f = parse("p -> p").unwrap();
        let cf = CompiledFormula::compile(&f);
        assert_eq!(cf.node_count(), 2); // p, p -> p

        let g = parse("(p & q) | (p & q)").unwrap();
        assert_eq!(CompiledFormula::compile(&g).node_count(), 4);
    }

    #[test]
    fn eval_matches_clauses_on_three_worlds() {
        // Chain a ≤ b ≤ c with R = {(c, a)} closed: c R a plus everything
        // forced by the chain.
        let leq = Relation::from_pairs(3, &[(0, 1), (1, 2)]);
        let frame = crate::kripke::close_frame(
            crate::kripke::default_world_names(3),
            leq,
            Relation::from_pairs(3, &[(2, 0)]),
        );
        let mut val = BTreeMap::new();
        val.insert("p".to_string(), WorldSet::from_indices(3, &[1, 2]));
        let m = KripkeModel::new(frame, val).unwrap();

        // w0 ⊭ p but w0's successors w1, w2 do ⊨ p, so !p fails everywhere
        // and p -> p holds everywhere.
        assert!(m.extension(&parse("!p").unwrap()).is_empty());
        assert!(m.valid(&parse("p -> p").unwrap()));
        // <>p: does some R-successor satisfy p? c R a only, and w0 ⊭ p.
        assert!(m.extension(&parse("<>p").unwrap()).is_empty());
        // []p at x: all R-predecessors satisfy p. Predecessor of w0 is w2 ⊨ p.
        assert!(m.valid(&parse("[]p").unwrap()));
    }
}
