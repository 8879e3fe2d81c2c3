#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use reasongraph::diff::{backward, Tape};
use reasongraph::graph::ReasoningGraph;
use reasongraph::ilp::{downward_refine, most_general_clause};
use reasongraph::lang::{Atom, Clause, Language, ModeDecl, Term};
use reasongraph::reason::{forward, Exec, ReasonerParams};
use reasongraph::synth::Instance;

/// Atoms and clauses that can influence any of `targets` through the graph.
pub fn ancestors(g: &ReasoningGraph, targets: &[usize]) -> (Vec<bool>, Vec<bool>) {
    let mut atoms = vec![false; g.n_atoms()];
    let mut clauses = vec![false; g.clause_count];
    let mut stack: Vec<usize> = targets.to_vec();
    for &t in targets {
        atoms[t] = true;
    }
    while let Some(a) = stack.pop() {
        for &j in g.incoming(a) {
            clauses[g.clause_of(j as usize)] = true;
            for &b in g.body(j as usize) {
                if !atoms[b as usize] {
                    atoms[b as usize] = true;
                    stack.push(b as usize);
                }
            }
        }
    }
    (atoms, clauses)
}

pub struct GradCheck {
    pub max_rel: f64,
    pub zero_paths_exact: bool,
    pub n_checked: usize,
}

/// Compares the analytic gradient of Σ cᵢ·x⁽ᵀ⁾ᵢ with central differences.
pub fn grad_check(inst: &Instance, seed: &[(usize, f64)], gamma: f64, steps: usize, h: f64, abs_floor: f64) -> GradCheck {
    let params = ReasonerParams { gamma, steps, exec: Exec::Sequential };
    let g = &inst.graph;
    let w = inst.weights();
    let x0 = inst.x0();
    let f = |x: &[f64], w: &[f64]| -> f64 {
        let h = forward(x, g, w, &params).unwrap();
        seed.iter().map(|&(i, c)| c * h.last()[i]).sum()
    };
    let tape = Tape::record(g, &x0, &w, &params).unwrap();
    let gb = backward(&tape, seed).unwrap();
    let mut max_rel: f64 = 0.0;
    let mut n = 0;
    let mut cmp = |an: f64, fd: f64| {
        let err = (an - fd).abs();
        let scale = an.abs().max(fd.abs());
        // Near zero only the absolute error is meaningful.
        let rel = if scale < 1e-3 {
            if err <= abs_floor { 0.0 } else { f64::INFINITY }
        } else {
            err / scale
        };
        max_rel = max_rel.max(rel);
        n += 1;
    };
    for k in 0..w.len() {
        let mut wp = w.clone();
        let mut wm = w.clone();
        wp[k] += h;
        wm[k] -= h;
        cmp(gb.d_weights[k], (f(&x0, &wp) - f(&x0, &wm)) / (2.0 * h));
    }
    for a in 1..x0.len() {
        let mut xp = x0.clone();
        let mut xm = x0.clone();
        xp[a] += h;
        xm[a] -= h;
        cmp(gb.d_x0[a], (f(&xp, &w) - f(&xm, &w)) / (2.0 * h));
    }
    let targets: Vec<usize> = seed.iter().map(|s| s.0).collect();
    let (anc_atoms, anc_clauses) = ancestors(g, &targets);
    let zero_paths_exact = (0..g.n_atoms()).all(|a| anc_atoms[a] || gb.d_x0[a] == 0.0)
        && (0..w.len()).all(|k| anc_clauses[k] || gb.d_weights[k] == 0.0);
    GradCheck { max_rel, zero_paths_exact, n_checked: n }
}

/// Redraws weights and gives every atom an input value in [lo, hi], so
/// central differences never step outside [0,1] or across a clamp.
pub fn interior(inst: &mut Instance, rng: &mut ChaCha8Rng, lo: f64, hi: f64) {
    for c in &mut inst.program {
        c.weight = rng.random_range(lo..hi);
    }
    inst.facts = inst.graph.base.atoms()[1..].iter().map(|a| (rng.random_range(lo..hi), a.clone())).collect();
}

fn subterms(t: &Term, out: &mut BTreeSet<Term>) {
    out.insert(t.clone());
    if let Term::App { args, .. } = t {
        for a in args {
            subterms(a, out);
        }
    }
}

fn substitute(t: &Term, names: &[String], vals: &[&Term]) -> Term {
    match t {
        Term::Var { name, .. } => match names.iter().position(|n| **n == **name) {
            Some(i) => vals[i].clone(),
            None => t.clone(),
        },
        Term::Const { .. } => t.clone(),
        Term::App { functor, args, dtype } => Term::App {
            functor: functor.clone(),
            args: args.iter().map(|a| substitute(a, names, vals)).collect(),
            dtype: dtype.clone(),
        },
    }
}

fn sub_atom(a: &Atom, names: &[String], vals: &[&Term]) -> Atom {
    Atom { pred: a.pred.clone(), args: a.args.iter().map(|t| substitute(t, names, vals)).collect() }
}

/// Exhaustive search for θ with headθ = head' and bodyθ ⊆ body'.
///
/// Candidate images of a variable are the subterms of `specific` with the
/// same datatype, so the search is complete.
pub fn brute_subsumes(general: &Clause, specific: &Clause) -> bool {
    let mut pool = BTreeSet::new();
    for a in std::iter::once(&specific.head).chain(&specific.body) {
        for t in &a.args {
            subterms(t, &mut pool);
        }
    }
    let mut vars: Vec<(String, String)> = Vec::new();
    for v in general.vars() {
        if let Term::Var { name, dtype } = v {
            if !vars.iter().any(|(n, _)| **n == *name) {
                vars.push((name.to_string(), dtype.to_string()));
            }
        }
    }
    let names: Vec<String> = vars.iter().map(|v| v.0.clone()).collect();
    let domains: Vec<Vec<&Term>> =
        vars.iter().map(|(_, d)| pool.iter().filter(|t| &**t.dtype() == d.as_str()).collect()).collect();
    if domains.iter().any(|d| d.is_empty()) {
        return false;
    }
    let body: HashSet<&Atom> = specific.body.iter().collect();
    let mut idx = vec![0usize; domains.len()];
    loop {
        let vals: Vec<&Term> = idx.iter().zip(&domains).map(|(&i, d)| d[i]).collect();
        if sub_atom(&general.head, &names, &vals) == specific.head
            && general.body.iter().all(|b| body.contains(&sub_atom(b, &names, &vals)))
        {
            return true;
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return false;
            }
            idx[k] += 1;
            if idx[k] < domains[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// A clause reached by a random walk of refinements from a head mode.
pub fn random_clause(lang: &Language, modes: &[ModeDecl], depth: usize, rng: &mut ChaCha8Rng) -> Clause {
    let heads: Vec<&ModeDecl> = modes.iter().filter(|m| m.is_head).collect();
    let mut c = most_general_clause(heads.choose(rng).unwrap());
    for _ in 0..rng.random_range(0..=3) {
        let next = downward_refine(&c, lang, modes, depth);
        match next.choose(rng) {
            Some(n) => c = n.clone(),
            None => break,
        }
    }
    c
}
