//! Message passing over the reasoning graph.

mod delta;

pub use delta::{DeltaReasoner, DeltaRun, DeltaScratch};

use thiserror::Error;

use crate::graph::ReasoningGraph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReasonError {
    #[error("{what} has length {found}, expected {expected}")]
    Dimension { what: &'static str, expected: usize, found: usize },
    #[error("initial valuation must assign 1 to ⊤, found {0}")]
    Top(f64),
    #[error("{what}[{index}] = {value} is outside [0,1]")]
    Range { what: &'static str, index: usize, value: f64 },
}

/// How per-node updates inside a step are scheduled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Data-parallel over nodes; falls back to sequential without the `parallel` feature.
    #[default]
    Parallel,
}

impl Exec {
    /// Maps `f` over `0..n`, keeping index order in the output.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel if n >= 2048 => {
                use rayon::prelude::*;
                (0..n).into_par_iter().with_min_len(1024).map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReasonerParams {
    /// Softor smoothing.
    pub gamma: f64,
    /// Number of message-passing rounds T.
    pub steps: usize,
    pub exec: Exec,
}

impl Default for ReasonerParams {
    fn default() -> Self {
        ReasonerParams { gamma: 0.01, steps: 5, exec: Exec::default() }
    }
}

/// Unclamped log-sum-exp smooth maximum, computed with the max shift.
#[inline]
pub fn softor_raw(values: &[f64], gamma: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = values.iter().map(|&v| ((v - m) / gamma).exp()).sum();
    m + gamma * s.ln()
}

/// Smooth disjunction clamped to at most 1. Empty input gives 0.
pub fn softor(values: &[f64], gamma: f64) -> f64 {
    softor_raw(values, gamma).min(1.0)
}

/// Product conjunction; the empty product is 1.
pub fn soft_conj(values: &[f64]) -> f64 {
    values.iter().product()
}

#[inline]
pub(crate) fn body_product(graph: &ReasoningGraph, conj: usize, x: &[f64]) -> f64 {
    graph.body(conj).iter().map(|&a| x[a as usize]).product()
}

/// Raw value of a conjunction update: softor(prev, prod).
#[inline]
pub(crate) fn conj_raw(prev: f64, prod: f64, gamma: f64) -> f64 {
    let m = prev.max(prod);
    m + gamma * (((prev - m) / gamma).exp() + ((prod - m) / gamma).exp()).ln()
}

#[inline]
pub(crate) fn conj_update(graph: &ReasoningGraph, conj: usize, c_prev: f64, x: &[f64], gamma: f64) -> f64 {
    conj_raw(c_prev, body_product(graph, conj, x), gamma).min(1.0)
}

/// Max and shifted exp-sum over {prev} ∪ {w·c} for an atom's update.
#[inline]
pub(crate) fn atom_stats(graph: &ReasoningGraph, atom: usize, prev: f64, c: &[f64], w: &[f64], gamma: f64) -> (f64, f64) {
    let inc = graph.incoming(atom);
    let mut m = prev;
    for &j in inc {
        let j = j as usize;
        m = m.max(w[graph.clause_of(j)] * c[j]);
    }
    let mut s = ((prev - m) / gamma).exp();
    for &j in inc {
        let j = j as usize;
        s += ((w[graph.clause_of(j)] * c[j] - m) / gamma).exp();
    }
    (m, s)
}

#[inline]
pub(crate) fn atom_update(graph: &ReasoningGraph, atom: usize, prev: f64, c: &[f64], w: &[f64], gamma: f64) -> f64 {
    if graph.incoming(atom).is_empty() {
        return prev;
    }
    let (m, s) = atom_stats(graph, atom, prev, c, w, gamma);
    (m + gamma * s.ln()).min(1.0)
}

/// Conjunction update for every node: softor(old value, product of body atoms).
pub fn atom2conj_step(x_atoms: &[f64], x_conj: &[f64], graph: &ReasoningGraph, gamma: f64, exec: Exec) -> Vec<f64> {
    exec.map(graph.n_conj(), |j| conj_update(graph, j, x_conj[j], x_atoms, gamma))
}

/// Atom update: softor over the old value and the weighted incoming conjunctions.
pub fn conj2atom_step(
    x_conj: &[f64],
    x_atoms: &[f64],
    weights: &[f64],
    graph: &ReasoningGraph,
    gamma: f64,
    exec: Exec,
) -> Vec<f64> {
    exec.map(graph.n_atoms(), |i| atom_update(graph, i, x_atoms[i], x_conj, weights, gamma))
}

pub(crate) fn check_inputs(x0: &[f64], graph: &ReasoningGraph, weights: &[f64]) -> Result<(), ReasonError> {
    if x0.len() != graph.n_atoms() {
        return Err(ReasonError::Dimension { what: "valuation", expected: graph.n_atoms(), found: x0.len() });
    }
    if weights.len() != graph.clause_count {
        return Err(ReasonError::Dimension { what: "weights", expected: graph.clause_count, found: weights.len() });
    }
    if x0[0] != 1.0 {
        return Err(ReasonError::Top(x0[0]));
    }
    for (index, &value) in x0.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(ReasonError::Range { what: "valuation", index, value });
        }
    }
    for (index, &value) in weights.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(ReasonError::Range { what: "weights", index, value });
        }
    }
    Ok(())
}

/// Full forward history: atom and conjunction values for steps 0..=T.
#[derive(Clone, Debug, PartialEq)]
pub struct History {
    pub atoms: Vec<Vec<f64>>,
    pub conj: Vec<Vec<f64>>,
}

impl History {
    pub fn last(&self) -> &[f64] {
        self.atoms.last().expect("history holds x0")
    }
}

pub fn forward(x0: &[f64], graph: &ReasoningGraph, weights: &[f64], params: &ReasonerParams) -> Result<History, ReasonError> {
    check_inputs(x0, graph, weights)?;
    let mut atoms = Vec::with_capacity(params.steps + 1);
    let mut conj = Vec::with_capacity(params.steps + 1);
    atoms.push(x0.to_vec());
    conj.push(vec![0.0; graph.n_conj()]);
    for t in 0..params.steps {
        let c = atom2conj_step(&atoms[t], &conj[t], graph, params.gamma, params.exec);
        let x = conj2atom_step(&c, &atoms[t], weights, graph, params.gamma, params.exec);
        conj.push(c);
        atoms.push(x);
    }
    Ok(History { atoms, conj })
}

/// Runs T rounds and returns the proof history x⁽⁰⁾..x⁽ᵀ⁾.
pub fn infer(x0: &[f64], graph: &ReasoningGraph, weights: &[f64], params: &ReasonerParams) -> Result<Vec<Vec<f64>>, ReasonError> {
    Ok(forward(x0, graph, weights, params)?.atoms)
}

/// Initial valuation with ⊤ = 1 and every other atom at 0.
pub fn initial_valuation(graph: &ReasoningGraph) -> Vec<f64> {
    let mut x = vec![0.0; graph.n_atoms()];
    x[0] = 1.0;
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::{ground_clauses, GroundingParams, HerbrandBase};
    use crate::lang::{parse_atom, parse_language, parse_program, Language};

    #[test]
    fn softor_values() {
        assert!((softor(&[0.8, 0.3], 0.01) - 0.8).abs() < 1e-6);
        assert_eq!(softor(&[1.0], 0.01), 1.0);
        assert!((softor(&[0.5, 0.5], 0.01) - (0.5 + 0.01 * 2f64.ln())).abs() < 1e-12);
        assert_eq!(softor(&[], 0.01), 0.0);
        assert_eq!(softor(&[1.0, 1.0], 0.01), 1.0);
    }

    #[test]
    fn conj_values() {
        assert!((soft_conj(&[0.9, 0.8]) - 0.72).abs() < 1e-12);
        assert_eq!(soft_conj(&[]), 1.0);
        assert_eq!(soft_conj(&[0.3, 0.0]), 0.0);
    }

    fn build(lang: &Language, prog: &str, facts: &[&str]) -> ReasoningGraph {
        let p = parse_program(prog, lang).unwrap();
        let g = ground_clauses(&p, lang, &GroundingParams::default()).unwrap();
        let fs: Vec<_> = facts.iter().map(|f| parse_atom(f, lang).unwrap()).collect();
        let base = HerbrandBase::from_ground(&g, &fs).unwrap();
        ReasoningGraph::build(p.len(), base, &g).unwrap()
    }

    #[test]
    fn single_steps() {
        let l = parse_language("pred p/1 : t\npred q/1 : t\nconst t : a\n").unwrap();
        let rg = build(&l, "q(a):-p(a).", &[]);
        let p = rg.base.index_of(&parse_atom("p(a)", &l).unwrap()).unwrap();
        let q = rg.base.index_of(&parse_atom("q(a)", &l).unwrap()).unwrap();
        let mut x = initial_valuation(&rg);
        x[p] = 0.9;
        let c = atom2conj_step(&x, &[0.0], &rg, 0.01, Exec::Sequential);
        assert!((c[0] - 0.9).abs() < 1e-6);
        let y = conj2atom_step(&c, &x, &[0.5], &rg, 0.01, Exec::Sequential);
        assert!((y[q] - 0.45).abs() < 1e-6);
        assert_eq!(y[p], 0.9);
        let x0 = {
            let mut v = initial_valuation(&rg);
            v[p] = 0.0;
            v
        };
        let c = atom2conj_step(&x0, &[0.0], &rg, 0.01, Exec::Sequential);
        assert!(c[0] <= 0.01 * 2f64.ln() + 1e-15);
    }

    #[test]
    fn two_messages_take_max() {
        let l = parse_language("pred p/1 : t\npred r/1 : t\npred q/1 : t\nconst t : a\n").unwrap();
        let rg = build(&l, "q(a):-p(a).\nq(a):-r(a).", &[]);
        let q = rg.base.index_of(&parse_atom("q(a)", &l).unwrap()).unwrap();
        let x = initial_valuation(&rg);
        let y = conj2atom_step(&[0.4, 0.6], &x, &[1.0, 1.0], &rg, 0.01, Exec::Sequential);
        assert!((y[q] - 0.6).abs() < 1e-6);
    }

    #[test]
    fn empty_program_is_identity() {
        let l = parse_language("pred p/1 : t\nconst t : a\n").unwrap();
        let base = HerbrandBase::from_ground(&[], &[parse_atom("p(a)", &l).unwrap()]).unwrap();
        let rg = ReasoningGraph::build(0, base, &[]).unwrap();
        let x0 = vec![1.0, 0.3];
        let h = infer(&x0, &rg, &[], &ReasonerParams::default()).unwrap();
        assert_eq!(h.len(), 6);
        assert_eq!(h[5], x0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let l = parse_language("pred p/1 : t\nconst t : a\n").unwrap();
        let base = HerbrandBase::from_ground(&[], &[parse_atom("p(a)", &l).unwrap()]).unwrap();
        let rg = ReasoningGraph::build(0, base, &[]).unwrap();
        let p = ReasonerParams::default();
        assert!(matches!(infer(&[1.0], &rg, &[], &p), Err(ReasonError::Dimension { .. })));
        assert!(matches!(infer(&[0.5, 0.0], &rg, &[], &p), Err(ReasonError::Top(_))));
        assert!(matches!(infer(&[1.0, 1.5], &rg, &[], &p), Err(ReasonError::Range { .. })));
    }
}
