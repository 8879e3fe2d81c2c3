//! Independent reference semantics: the discrete T_C operator, a dense
//! index-tensor reasoner, and a max-product forward chainer.
//!
//! None of this shares inference code with [`crate::reason`].

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::ground::{GroundClause, HerbrandBase};
use crate::lang::Atom;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("index tensor needs {needed} elements, cap is {cap}")]
    TooLarge { needed: u128, cap: u128 },
    #[error("{what} has length {found}, expected {expected}")]
    Dimension { what: &'static str, expected: usize, found: usize },
    #[error("atom `{0}` is not in the base")]
    UnknownAtom(String),
}

pub const DEFAULT_TENSOR_CAP: u128 = 100_000_000;

/// One application of T_C: the input plus heads of clauses whose bodies hold.
pub fn t_c_apply(ground: &[GroundClause], atoms: &BTreeSet<Atom>) -> BTreeSet<Atom> {
    let mut out = atoms.clone();
    for g in ground {
        if g.body.iter().all(|b| atoms.contains(b)) {
            out.insert(g.head.clone());
        }
    }
    out
}

pub fn t_c_iterate(ground: &[GroundClause], atoms: &BTreeSet<Atom>, steps: usize) -> BTreeSet<Atom> {
    (0..steps).fold(atoms.clone(), |acc, _| t_c_apply(ground, &acc))
}

/// Dense index tensor of shape atoms × ground clauses × max body length.
///
/// Cell (i, j) is active when ground clause j concludes atom i; its body
/// indices are padded with ⊤ (index 0).
#[derive(Clone, Debug)]
pub struct IndexTensor {
    pub n_atoms: usize,
    pub n_clauses: usize,
    pub body_len: usize,
    index: Vec<u32>,
    active: Vec<bool>,
    clause_of: Vec<usize>,
}

impl IndexTensor {
    pub fn build(base: &HerbrandBase, ground: &[GroundClause], cap: u128) -> Result<IndexTensor, OracleError> {
        let g = base.len();
        let c = ground.len();
        let l = ground.iter().map(|x| x.body.len()).max().unwrap_or(0).max(1);
        let needed = g as u128 * c as u128 * l as u128;
        if needed > cap {
            return Err(OracleError::TooLarge { needed, cap });
        }
        let mut index = vec![0u32; g * c * l];
        let mut active = vec![false; g * c];
        let lookup = |a: &Atom| base.index_of(a).ok_or_else(|| OracleError::UnknownAtom(a.to_string()));
        for (j, gc) in ground.iter().enumerate() {
            let h = lookup(&gc.head)?;
            active[h * c + j] = true;
            for (k, b) in gc.body.iter().enumerate() {
                index[(h * c + j) * l + k] = lookup(b)? as u32;
            }
        }
        Ok(IndexTensor {
            n_atoms: g,
            n_clauses: c,
            body_len: l,
            index,
            active,
            clause_of: ground.iter().map(|x| x.clause).collect(),
        })
    }

    pub fn element_count(&self) -> usize {
        self.index.len()
    }
}

fn lse(values: &[f64], gamma: f64) -> f64 {
    let top = values.iter().cloned().fold(f64::MIN, f64::max);
    top + gamma * values.iter().map(|v| ((v - top) / gamma).exp()).sum::<f64>().ln()
}

/// Message passing over the dense tensor, with the same soft operations as
/// the graph reasoner: every cell keeps its own conjunction memory.
pub fn tensor_infer(
    x0: &[f64],
    tensor: &IndexTensor,
    weights: &[f64],
    gamma: f64,
    steps: usize,
) -> Result<Vec<f64>, OracleError> {
    if x0.len() != tensor.n_atoms {
        return Err(OracleError::Dimension { what: "valuation", expected: tensor.n_atoms, found: x0.len() });
    }
    let (g, c, l) = (tensor.n_atoms, tensor.n_clauses, tensor.body_len);
    let mut x = x0.to_vec();
    let mut cell = vec![0.0; g * c];
    for _ in 0..steps {
        let mut next_cell = cell.clone();
        let mut next_x = x.clone();
        for i in 0..g {
            let mut inputs = vec![x[i]];
            for j in 0..c {
                let k = i * c + j;
                if !tensor.active[k] {
                    continue;
                }
                let mut prod = 1.0;
                for b in 0..l {
                    prod *= x[tensor.index[k * l + b] as usize];
                }
                let v = lse(&[cell[k], prod], gamma).min(1.0);
                next_cell[k] = v;
                inputs.push(weights[tensor.clause_of[j]] * v);
            }
            if inputs.len() > 1 {
                next_x[i] = lse(&inputs, gamma).min(1.0);
            }
        }
        x = next_x;
        cell = next_cell;
    }
    Ok(x)
}

/// Discrete forward chaining with product conjunction and max disjunction,
/// run for `steps` rounds from the fact probabilities.
pub fn max_product_oracle(
    ground: &[GroundClause],
    weights: &[f64],
    facts: &[(f64, Atom)],
    steps: usize,
) -> HashMap<Atom, f64> {
    let mut val: HashMap<Atom, f64> = HashMap::new();
    for (p, a) in facts {
        let e = val.entry(a.clone()).or_insert(0.0);
        *e = e.max(*p);
    }
    for _ in 0..steps {
        let mut next = val.clone();
        for gc in ground {
            let body: f64 = gc.body.iter().map(|b| val.get(b).copied().unwrap_or(0.0)).product();
            let v = weights[gc.clause] * body;
            let e = next.entry(gc.head.clone()).or_insert(0.0);
            if v > *e {
                *e = v;
            }
        }
        val = next;
    }
    val
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::{ground_clauses, GroundingParams};
    use crate::lang::{parse_atom, parse_language, parse_program};

    #[test]
    fn t_c_single_rule() {
        let l = parse_language("pred p/1 : t\npred q/1 : t\nconst t : a\n").unwrap();
        let prog = parse_program("q(a):-p(a).", &l).unwrap();
        let gr = ground_clauses(&prog, &l, &GroundingParams::default()).unwrap();
        let start: BTreeSet<Atom> = [parse_atom("p(a)", &l).unwrap()].into();
        let out = t_c_apply(&gr, &start);
        assert_eq!(out.len(), 2);
        assert_eq!(t_c_apply(&[], &start), start);
    }

    #[test]
    fn tensor_cap() {
        let l = parse_language("pred p/1 : t\npred q/1 : t\nconst t : a\n").unwrap();
        let prog = parse_program("q(a):-p(a).", &l).unwrap();
        let gr = ground_clauses(&prog, &l, &GroundingParams::default()).unwrap();
        let base = HerbrandBase::from_ground(&gr, &[]).unwrap();
        assert!(matches!(IndexTensor::build(&base, &gr, 2), Err(OracleError::TooLarge { .. })));
        let t = IndexTensor::build(&base, &gr, DEFAULT_TENSOR_CAP).unwrap();
        assert_eq!(t.element_count(), 3);
    }

    #[test]
    fn max_product_single_path() {
        let l = parse_language("pred p/1 : t\npred q/1 : t\nconst t : a\n").unwrap();
        let prog = parse_program("q(a):-p(a).", &l).unwrap();
        let gr = ground_clauses(&prog, &l, &GroundingParams::default()).unwrap();
        let v = max_product_oracle(&gr, &[0.5], &[(0.9, parse_atom("p(a)", &l).unwrap())], 3);
        assert!((v[&parse_atom("q(a)", &l).unwrap()] - 0.45).abs() < 1e-12);
    }
}
