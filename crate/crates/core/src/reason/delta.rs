//! Incremental inference for many queries that share one graph and differ
//! from a cached base valuation in a few input atoms.
//!
//! A node is "dirty" at step t when its value differs from the cached base
//! run. Only dirty nodes and their readers are recomputed. A conjunction
//! whose body holds a *static zero* atom (no incoming edges and base value
//! 0) has product 0 in both runs unless that atom itself changed, so it is
//! only revisited through that guard atom. High fan-in atoms update their
//! cached log-sum-exp incrementally.

use std::collections::HashMap;

use super::{atom_stats, atom_update, check_inputs, conj_raw, forward, History, ReasonError, ReasonerParams};
use crate::graph::ReasoningGraph;

const NO_GUARD: u32 = u32::MAX;
/// Atoms with at most this many incoming conjunctions are recomputed in full.
const FULL_RECOMPUTE_DEGREE: usize = 32;

pub struct DeltaReasoner<'g> {
    graph: &'g ReasoningGraph,
    weights: Vec<f64>,
    gamma: f64,
    steps: usize,
    base: History,
    /// Per step (1..=T) and atom: the (max, shifted sum) of its base update.
    base_stats: Vec<Vec<(f64, f64)>>,
    guarded_off: Vec<usize>,
    guarded: Vec<u32>,
    unguarded_off: Vec<usize>,
    unguarded: Vec<u32>,
}

/// Reusable buffers for [`DeltaReasoner::run_in`].
pub struct DeltaScratch {
    atom_val: [Vec<f64>; 2],
    atom_mark: [Vec<u32>; 2],
    conj_val: [Vec<f64>; 2],
    conj_mark: [Vec<u32>; 2],
    seen_atom: Vec<u32>,
    seen_conj: Vec<u32>,
    clock: u32,
}

impl DeltaScratch {
    fn new(n_atoms: usize, n_conj: usize) -> DeltaScratch {
        DeltaScratch {
            atom_val: [vec![0.0; n_atoms], vec![0.0; n_atoms]],
            atom_mark: [vec![0; n_atoms], vec![0; n_atoms]],
            conj_val: [vec![0.0; n_conj], vec![0.0; n_conj]],
            conj_mark: [vec![0; n_conj], vec![0; n_conj]],
            seen_atom: vec![0; n_atoms],
            seen_conj: vec![0; n_conj],
            clock: 0,
        }
    }

    fn tick(&mut self) -> u32 {
        if self.clock >= u32::MAX - 2 {
            for v in self.atom_mark.iter_mut().chain(self.conj_mark.iter_mut()) {
                v.iter_mut().for_each(|m| *m = 0);
            }
            self.seen_atom.iter_mut().for_each(|m| *m = 0);
            self.seen_conj.iter_mut().for_each(|m| *m = 0);
            self.clock = 0;
        }
        self.clock += 1;
        self.clock
    }
}

/// Final values of the atoms that differ from the base run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DeltaRun {
    pub changed: HashMap<usize, f64>,
}

fn csr_lists(n: usize, lists: &[(usize, u32)]) -> (Vec<usize>, Vec<u32>) {
    let mut off = vec![0usize; n + 1];
    for &(a, _) in lists {
        off[a + 1] += 1;
    }
    for i in 0..n {
        off[i + 1] += off[i];
    }
    let mut fill = off.clone();
    let mut data = vec![0u32; lists.len()];
    for &(a, j) in lists {
        data[fill[a]] = j;
        fill[a] += 1;
    }
    (off, data)
}

impl<'g> DeltaReasoner<'g> {
    pub fn new(
        graph: &'g ReasoningGraph,
        weights: &[f64],
        base_x0: &[f64],
        params: &ReasonerParams,
    ) -> Result<DeltaReasoner<'g>, ReasonError> {
        check_inputs(base_x0, graph, weights)?;
        let base = forward(base_x0, graph, weights, params)?;
        let gamma = params.gamma;
        let base_stats = (1..=params.steps)
            .map(|t| {
                params.exec.map(graph.n_atoms(), |a| {
                    if graph.incoming(a).is_empty() {
                        (0.0, 0.0)
                    } else {
                        atom_stats(graph, a, base.atoms[t - 1][a], &base.conj[t], weights, gamma)
                    }
                })
            })
            .collect();
        let static_zero = |a: usize| graph.incoming(a).is_empty() && base_x0[a] == 0.0;
        let mut guarded_pairs = Vec::new();
        let mut unguarded_pairs = Vec::new();
        for j in 0..graph.n_conj() {
            let body = graph.body(j);
            let guard = body.iter().copied().find(|&a| static_zero(a as usize)).unwrap_or(NO_GUARD);
            if guard != NO_GUARD {
                guarded_pairs.push((guard as usize, j as u32));
            } else {
                let mut atoms: Vec<u32> = body.to_vec();
                atoms.sort_unstable();
                atoms.dedup();
                for a in atoms {
                    unguarded_pairs.push((a as usize, j as u32));
                }
            }
        }
        let (guarded_off, guarded) = csr_lists(graph.n_atoms(), &guarded_pairs);
        let (unguarded_off, unguarded) = csr_lists(graph.n_atoms(), &unguarded_pairs);
        Ok(DeltaReasoner {
            graph,
            weights: weights.to_vec(),
            gamma,
            steps: params.steps,
            base,
            base_stats,
            guarded_off,
            guarded,
            unguarded_off,
            unguarded,
        })
    }

    pub fn base(&self) -> &History {
        &self.base
    }

    pub fn scratch(&self) -> DeltaScratch {
        DeltaScratch::new(self.graph.n_atoms(), self.graph.n_conj())
    }

    /// Final value of `atom` in a run.
    pub fn value(&self, run: &DeltaRun, atom: usize) -> f64 {
        run.changed.get(&atom).copied().unwrap_or_else(|| self.base.last()[atom])
    }

    pub fn run(&self, changes: &[(usize, f64)]) -> Result<DeltaRun, ReasonError> {
        self.run_in(&mut self.scratch(), changes)
    }

    /// Infers with `x0` equal to the base valuation except at `changes`.
    pub fn run_in(&self, s: &mut DeltaScratch, changes: &[(usize, f64)]) -> Result<DeltaRun, ReasonError> {
        let g = self.graph;
        let gamma = self.gamma;
        let w = &self.weights;
        let n = g.n_atoms();
        let mut dirty_atoms: Vec<u32> = Vec::new();
        let mut dirty_conj: Vec<u32> = Vec::new();
        let mut mark_prev = s.tick();
        for &(a, v) in changes {
            if a >= n {
                return Err(ReasonError::Dimension { what: "changed atom index", expected: n, found: a });
            }
            if !(0.0..=1.0).contains(&v) {
                return Err(ReasonError::Range { what: "valuation", index: a, value: v });
            }
            if a == 0 && v != 1.0 {
                return Err(ReasonError::Top(v));
            }
            if v != self.base.atoms[0][a] {
                if s.atom_mark[0][a] != mark_prev {
                    dirty_atoms.push(a as u32);
                }
                s.atom_mark[0][a] = mark_prev;
                s.atom_val[0][a] = v;
            }
        }
        for t in 1..=self.steps {
            let mark = s.tick();
            let (p, c) = ((t - 1) % 2, t % 2);
            let atom_at_prev = |s: &DeltaScratch, a: usize| {
                if s.atom_mark[p][a] == mark_prev {
                    s.atom_val[p][a]
                } else {
                    self.base.atoms[t - 1][a]
                }
            };
            // Conjunctions.
            let mut cand: Vec<u32> = Vec::new();
            for &j in &dirty_conj {
                if s.seen_conj[j as usize] != mark {
                    s.seen_conj[j as usize] = mark;
                    cand.push(j);
                }
            }
            for &a in &dirty_atoms {
                let a = a as usize;
                let lists = [
                    &self.unguarded[self.unguarded_off[a]..self.unguarded_off[a + 1]],
                    &self.guarded[self.guarded_off[a]..self.guarded_off[a + 1]],
                ];
                for &j in lists.into_iter().flatten() {
                    if s.seen_conj[j as usize] != mark {
                        s.seen_conj[j as usize] = mark;
                        cand.push(j);
                    }
                }
            }
            let mut new_conj = Vec::new();
            for j in cand {
                let ju = j as usize;
                let c_prev = if s.conj_mark[p][ju] == mark_prev { s.conj_val[p][ju] } else { self.base.conj[t - 1][ju] };
                let prod: f64 = g.body(ju).iter().map(|&a| atom_at_prev(s, a as usize)).product();
                let v = conj_raw(c_prev, prod, gamma).min(1.0);
                if v != self.base.conj[t][ju] {
                    s.conj_mark[c][ju] = mark;
                    s.conj_val[c][ju] = v;
                    new_conj.push(j);
                }
            }
            // Atoms: previously dirty ones and heads of changed conjunctions.
            let mut by_head: Vec<(u32, u32)> = new_conj.iter().map(|&j| (g.head(j as usize) as u32, j)).collect();
            by_head.sort_unstable();
            let mut cand_atoms: Vec<u32> = Vec::new();
            for &a in dirty_atoms.iter().chain(by_head.iter().map(|(h, _)| h)) {
                if s.seen_atom[a as usize] != mark {
                    s.seen_atom[a as usize] = mark;
                    cand_atoms.push(a);
                }
            }
            let conj_now = |s: &DeltaScratch, j: usize| {
                if s.conj_mark[c][j] == mark {
                    s.conj_val[c][j]
                } else {
                    self.base.conj[t][j]
                }
            };
            let mut new_atoms = Vec::new();
            for a in cand_atoms {
                let au = a as usize;
                let prev = atom_at_prev(s, au);
                let inc = g.incoming(au);
                let v = if inc.is_empty() {
                    prev
                } else if inc.len() <= FULL_RECOMPUTE_DEGREE {
                    let mut m = prev;
                    for &j in inc {
                        m = m.max(w[g.clause_of(j as usize)] * conj_now(s, j as usize));
                    }
                    let mut sum = ((prev - m) / gamma).exp();
                    for &j in inc {
                        sum += ((w[g.clause_of(j as usize)] * conj_now(s, j as usize) - m) / gamma).exp();
                    }
                    (m + gamma * sum.ln()).min(1.0)
                } else {
                    let lo = by_head.partition_point(|&(h, _)| h < a);
                    let hi = by_head.partition_point(|&(h, _)| h <= a);
                    self.incremental_atom(s, t, au, prev, &by_head[lo..hi], c)
                };
                if v != self.base.atoms[t][au] {
                    s.atom_mark[c][au] = mark;
                    s.atom_val[c][au] = v;
                    new_atoms.push(a);
                }
            }
            dirty_atoms = new_atoms;
            dirty_conj = new_conj;
            mark_prev = mark;
        }
        let last = self.steps % 2;
        let changed = dirty_atoms
            .iter()
            .map(|&a| (a as usize, s.atom_val[last][a as usize]))
            .collect();
        Ok(DeltaRun { changed })
    }

    fn incremental_atom(&self, s: &DeltaScratch, t: usize, a: usize, prev: f64, changed: &[(u32, u32)], c: usize) -> f64 {
        let g = self.graph;
        let gamma = self.gamma;
        let (m, base_sum) = self.base_stats[t - 1][a];
        let mut removed = 0.0;
        let mut added = 0.0;
        let base_prev = self.base.atoms[t - 1][a];
        let mut terms: Vec<(f64, f64)> = vec![(base_prev, prev)];
        for &(_, j) in changed {
            let j = j as usize;
            let wk = self.weights[g.clause_of(j)];
            terms.push((wk * self.base.conj[t][j], wk * s.conj_val[c][j]));
        }
        let mut exact = false;
        for &(old, new) in &terms {
            let eo = (old - m) / gamma;
            let en = (new - m) / gamma;
            if en > 600.0 {
                exact = true;
                break;
            }
            removed += eo.exp();
            added += en.exp();
        }
        let sum = base_sum - removed + added;
        if exact || removed > 0.5 * base_sum || sum <= 0.0 {
            // Cancellation or overflow risk: fall back to the full update.
            let mut conj = self.base.conj[t].clone();
            for &(_, j) in changed {
                conj[j as usize] = s.conj_val[c][j as usize];
            }
            return atom_update(g, a, prev, &conj, &self.weights, gamma);
        }
        (m + gamma * sum.ln()).min(1.0)
    }

    pub fn graph(&self) -> &ReasoningGraph {
        self.graph
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::{ground_clauses, GroundingParams, HerbrandBase};
    use crate::lang::{parse_atom, parse_language, parse_program};
    use crate::reason::{infer, initial_valuation, Exec};

    #[test]
    fn matches_full_inference() {
        let l = parse_language(
            "pred edge/2 : node,node\npred path/2 : node,node\npred q/1 : node\nconst node : a,b,c,d\n",
        )
        .unwrap();
        let prog = parse_program(
            "0.9: path(X,Y):-edge(X,Y).\n0.8: path(X,Y):-edge(X,Z),path(Z,Y).\n0.7: q(X):-path(X,X),q(X).\n",
            &l,
        )
        .unwrap();
        let gp = GroundingParams::default();
        let gr = ground_clauses(&prog, &l, &gp).unwrap();
        let base = HerbrandBase::from_ground(&gr, &[]).unwrap();
        let rg = ReasoningGraph::build(prog.len(), base, &gr).unwrap();
        let w = [0.9, 0.8, 0.7];
        let params = ReasonerParams { gamma: 0.01, steps: 5, exec: Exec::Sequential };
        let mut x0 = initial_valuation(&rg);
        let e = |s: &str| rg.base.index_of(&parse_atom(s, &l).unwrap()).unwrap();
        x0[e("edge(a,b)")] = 1.0;
        let dr = DeltaReasoner::new(&rg, &w, &x0, &params).unwrap();
        let mut scratch = dr.scratch();
        for changes in [
            vec![(e("edge(b,c)"), 1.0)],
            vec![(e("edge(b,c)"), 0.6), (e("edge(c,a)"), 0.9), (e("q(a)"), 0.5)],
            vec![(e("edge(a,b)"), 0.0)],
            vec![],
        ] {
            let run = dr.run_in(&mut scratch, &changes).unwrap();
            let mut x = x0.clone();
            for &(a, v) in &changes {
                x[a] = v;
            }
            let full = infer(&x, &rg, &w, &params).unwrap();
            for a in 0..rg.n_atoms() {
                assert!((dr.value(&run, a) - full[5][a]).abs() < 1e-12, "atom {a}");
            }
        }
    }
}
