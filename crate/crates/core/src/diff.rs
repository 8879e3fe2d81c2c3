//! Reverse-mode gradients through message passing.

use thiserror::Error;

use crate::graph::ReasoningGraph;
use crate::reason::{atom_stats, conj_raw, forward, Exec, History, ReasonError, ReasonerParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiffError {
    #[error(transparent)]
    Reason(#[from] ReasonError),
    #[error("seed refers to atom {0}, outside the base")]
    UnknownAtom(usize),
    #[error("attribution group {0} is empty")]
    EmptyGroup(usize),
    #[error("atom {0} appears in more than one attribution group")]
    OverlappingGroups(usize),
    #[error("gradient is not finite")]
    NonFinite,
}

/// Saved forward values of one inference, sufficient to replay and differentiate it.
#[derive(Clone, Debug)]
pub struct Tape<'g> {
    pub graph: &'g ReasoningGraph,
    pub weights: Vec<f64>,
    pub gamma: f64,
    pub exec: Exec,
    pub history: History,
}

impl<'g> Tape<'g> {
    pub fn record(graph: &'g ReasoningGraph, x0: &[f64], weights: &[f64], params: &ReasonerParams) -> Result<Tape<'g>, ReasonError> {
        let history = forward(x0, graph, weights, params)?;
        Ok(Tape { graph, weights: weights.to_vec(), gamma: params.gamma, exec: params.exec, history })
    }

    pub fn steps(&self) -> usize {
        self.history.atoms.len() - 1
    }

    pub fn output(&self) -> &[f64] {
        self.history.last()
    }

    /// Re-runs the forward pass from the saved x⁽⁰⁾ and weights.
    pub fn replay(&self) -> Result<History, ReasonError> {
        let params = ReasonerParams { gamma: self.gamma, steps: self.steps(), exec: self.exec };
        forward(&self.history.atoms[0], self.graph, &self.weights, &params)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradientBundle {
    pub d_weights: Vec<f64>,
    pub d_x0: Vec<f64>,
}

/// Gradients of Σ seedᵢ·x⁽ᵀ⁾[i] with respect to the clause weights and x⁽⁰⁾.
///
/// Softor passes the softmax of its inputs; an active clamp at 1 passes nothing.
pub fn backward(tape: &Tape<'_>, seed: &[(usize, f64)]) -> Result<GradientBundle, DiffError> {
    let g = tape.graph;
    let n = g.n_atoms();
    let nc = g.n_conj();
    let gamma = tape.gamma;
    let w = &tape.weights;
    let exec = tape.exec;
    let mut gx = vec![0.0; n];
    for &(i, s) in seed {
        if i >= n {
            return Err(DiffError::UnknownAtom(i));
        }
        gx[i] += s;
    }
    let mut carry = vec![0.0; nc];
    let mut d_weights = vec![0.0; g.clause_count];
    for t in (1..=tape.steps()).rev() {
        let x_prev = &tape.history.atoms[t - 1];
        let c_now = &tape.history.conj[t];
        let c_prev = &tape.history.conj[t - 1];
        // Atom update at step t: per-atom normaliser, or None when the
        // atom is a pass-through (None, passes 1) or clamped (Some(inf)).
        let stats: Vec<Option<(f64, f64)>> = exec.map(n, |a| {
            if g.incoming(a).is_empty() {
                return None;
            }
            let (m, s) = atom_stats(g, a, x_prev[a], c_now, w, gamma);
            if m + gamma * s.ln() > 1.0 {
                Some((f64::INFINITY, 1.0))
            } else {
                Some((m, s))
            }
        });
        let share = |a: usize, v: f64| -> f64 {
            match stats[a] {
                None => 1.0,
                Some((m, s)) if m.is_finite() => ((v - m) / gamma).exp() / s,
                Some(_) => 0.0,
            }
        };
        let gx_self: Vec<f64> = exec.map(n, |a| gx[a] * share(a, x_prev[a]));
        // Gradient reaching each conjunction value c⁽ᵗ⁾ and its weight share.
        let per_conj: Vec<(f64, f64)> = exec.map(nc, |j| {
            let h = g.head(j);
            let wk = w[g.clause_of(j)];
            let p = share(h, wk * c_now[j]);
            let up = gx[h] * p;
            (up * wk + carry[j], up * c_now[j])
        });
        for (j, &(_, gw)) in per_conj.iter().enumerate() {
            d_weights[g.clause_of(j)] += gw;
        }
        // Conjunction update at step t: c = clamp(softor(c_prev, prod)).
        let conj_back: Vec<(f64, f64)> = exec.map(nc, |j| {
            let gc = per_conj[j].0;
            if gc == 0.0 {
                return (0.0, 0.0);
            }
            let prod: f64 = g.body(j).iter().map(|&a| x_prev[a as usize]).product();
            let raw = conj_raw(c_prev[j], prod, gamma);
            if raw > 1.0 {
                return (0.0, 0.0);
            }
            let m = c_prev[j].max(prod);
            let e0 = ((c_prev[j] - m) / gamma).exp();
            let e1 = ((prod - m) / gamma).exp();
            let z = e0 + e1;
            (gc * e0 / z, gc * e1 / z)
        });
        gx = exec.map(n, |a| {
            let mut acc = gx_self[a];
            for (j, pos) in g.outgoing(a) {
                let gp = conj_back[j].1;
                if gp == 0.0 {
                    continue;
                }
                let others: f64 = g
                    .body(j)
                    .iter()
                    .enumerate()
                    .filter(|&(l, _)| l != pos)
                    .map(|(_, &b)| x_prev[b as usize])
                    .product();
                acc += gp * others;
            }
            acc
        });
        carry = conj_back.into_iter().map(|(c0, _)| c0).collect();
    }
    if gx.iter().chain(&d_weights).any(|v| !v.is_finite()) {
        return Err(DiffError::NonFinite);
    }
    Ok(GradientBundle { d_weights, d_x0: gx })
}

/// ∂x⁽ᵀ⁾[target] / ∂x⁽⁰⁾.
pub fn input_gradients(
    graph: &ReasoningGraph,
    weights: &[f64],
    x0: &[f64],
    params: &ReasonerParams,
    target: usize,
) -> Result<Vec<f64>, DiffError> {
    if target >= graph.n_atoms() {
        return Err(DiffError::UnknownAtom(target));
    }
    let tape = Tape::record(graph, x0, weights, params)?;
    Ok(backward(&tape, &[(target, 1.0)])?.d_x0)
}

/// Per group, the largest gradient entry among its atoms.
pub fn attribution_weights(e_atoms: &[f64], groups: &[Vec<usize>]) -> Result<Vec<f64>, DiffError> {
    let mut owner = std::collections::HashMap::new();
    let mut out = Vec::with_capacity(groups.len());
    for (gi, grp) in groups.iter().enumerate() {
        if grp.is_empty() {
            return Err(DiffError::EmptyGroup(gi));
        }
        let mut best = f64::NEG_INFINITY;
        for &a in grp {
            if a >= e_atoms.len() {
                return Err(DiffError::UnknownAtom(a));
            }
            if owner.insert(a, gi).is_some_and(|o| o != gi) {
                return Err(DiffError::OverlappingGroups(a));
            }
            best = best.max(e_atoms[a]);
        }
        out.push(best);
    }
    Ok(out)
}
