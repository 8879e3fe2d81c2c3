//! Bipartite forward reasoning graph in compressed sparse row layout.

use std::fmt::Write as _;

use thiserror::Error;

use crate::ground::{GroundClause, HerbrandBase};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("ground clause {conj} references atom `{atom}` missing from the base")]
    DanglingAtom { conj: usize, atom: String },
    #[error("ground clause {conj} has clause index {clause} but the program has {count} clauses")]
    ClauseIndex { conj: usize, clause: usize, count: usize },
}

/// Atom nodes are the base (⊤ at index 0); one conjunction node per ground clause.
///
/// Every conjunction has one outgoing edge, to its head, tagged with the
/// source clause. Incoming atom→conj edges are the body atoms, or ⊤ alone
/// for an empty body.
#[derive(Clone, Debug, PartialEq)]
pub struct ReasoningGraph {
    pub base: HerbrandBase,
    pub clause_count: usize,
    /// CSR over conjunctions: body atom indices.
    body_offsets: Vec<usize>,
    body_atoms: Vec<u32>,
    conj_head: Vec<u32>,
    conj_clause: Vec<u32>,
    /// CSR over atoms: conjunctions whose head is the atom, ascending.
    in_offsets: Vec<usize>,
    in_conj: Vec<u32>,
    /// CSR over atoms: (conjunction, body position) pairs reading the atom.
    out_offsets: Vec<usize>,
    out_conj: Vec<u32>,
    out_pos: Vec<u32>,
}

fn csr<T: Copy>(n: usize, items: &[(usize, T)]) -> (Vec<usize>, Vec<T>) {
    let mut offsets = vec![0usize; n + 1];
    for (k, _) in items {
        offsets[k + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut data: Vec<Option<T>> = vec![None; items.len()];
    for &(k, v) in items {
        data[fill[k]] = Some(v);
        fill[k] += 1;
    }
    (offsets, data.into_iter().map(|v| v.expect("filled")).collect())
}

impl ReasoningGraph {
    pub fn build(clause_count: usize, base: HerbrandBase, ground: &[GroundClause]) -> Result<ReasoningGraph, GraphError> {
        let mut body_offsets = Vec::with_capacity(ground.len() + 1);
        let mut body_atoms = Vec::new();
        let mut conj_head = Vec::with_capacity(ground.len());
        let mut conj_clause = Vec::with_capacity(ground.len());
        body_offsets.push(0);
        for (j, g) in ground.iter().enumerate() {
            if g.clause >= clause_count {
                return Err(GraphError::ClauseIndex { conj: j, clause: g.clause, count: clause_count });
            }
            let lookup = |a: &crate::lang::Atom| {
                base.index_of(a).ok_or_else(|| GraphError::DanglingAtom { conj: j, atom: a.to_string() })
            };
            conj_head.push(lookup(&g.head)? as u32);
            conj_clause.push(g.clause as u32);
            if g.body.is_empty() {
                body_atoms.push(0);
            } else {
                for b in &g.body {
                    body_atoms.push(lookup(b)? as u32);
                }
            }
            body_offsets.push(body_atoms.len());
        }
        let n = base.len();
        let heads: Vec<(usize, u32)> = conj_head.iter().enumerate().map(|(j, &h)| (h as usize, j as u32)).collect();
        let (in_offsets, in_conj) = csr(n, &heads);
        let mut outs: Vec<(usize, (u32, u32))> = Vec::with_capacity(body_atoms.len());
        for j in 0..conj_head.len() {
            for (p, &a) in body_atoms[body_offsets[j]..body_offsets[j + 1]].iter().enumerate() {
                outs.push((a as usize, (j as u32, p as u32)));
            }
        }
        let (out_offsets, out_pairs) = csr(n, &outs);
        let (out_conj, out_pos) = out_pairs.into_iter().unzip();
        Ok(ReasoningGraph {
            base,
            clause_count,
            body_offsets,
            body_atoms,
            conj_head,
            conj_clause,
            in_offsets,
            in_conj,
            out_offsets,
            out_conj,
            out_pos,
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.base.len()
    }

    pub fn n_conj(&self) -> usize {
        self.conj_head.len()
    }

    #[inline]
    pub fn body(&self, conj: usize) -> &[u32] {
        &self.body_atoms[self.body_offsets[conj]..self.body_offsets[conj + 1]]
    }

    #[inline]
    pub fn head(&self, conj: usize) -> usize {
        self.conj_head[conj] as usize
    }

    #[inline]
    pub fn clause_of(&self, conj: usize) -> usize {
        self.conj_clause[conj] as usize
    }

    /// Conjunctions concluding `atom`, ascending.
    #[inline]
    pub fn incoming(&self, atom: usize) -> &[u32] {
        &self.in_conj[self.in_offsets[atom]..self.in_offsets[atom + 1]]
    }

    /// (conjunction, body position) pairs that read `atom`.
    #[inline]
    pub fn outgoing(&self, atom: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let r = self.out_offsets[atom]..self.out_offsets[atom + 1];
        self.out_conj[r.clone()].iter().zip(&self.out_pos[r]).map(|(&c, &p)| (c as usize, p as usize))
    }

    pub fn max_body_len(&self) -> usize {
        (0..self.n_conj()).map(|j| self.body(j).len()).max().unwrap_or(0)
    }

    pub fn n_edges_atom_to_conj(&self) -> usize {
        self.body_atoms.len()
    }

    pub fn n_edges(&self) -> usize {
        self.body_atoms.len() + self.conj_head.len()
    }

    /// (atom, conj) pairs in conjunction order.
    pub fn edges_atom_to_conj(&self) -> Vec<(usize, usize)> {
        (0..self.n_conj()).flat_map(|j| self.body(j).iter().map(move |&a| (a as usize, j))).collect()
    }

    /// (conj, atom, clause) triples in conjunction order.
    pub fn edges_conj_to_atom(&self) -> Vec<(usize, usize, usize)> {
        (0..self.n_conj()).map(|j| (j, self.head(j), self.clause_of(j))).collect()
    }

    pub fn memory_footprint(&self) -> MemoryFootprint {
        let graph_units = (self.n_atoms() + self.n_conj() + self.n_edges()) as u64;
        let tensor_units = (self.n_atoms() as u64) * (self.n_conj() as u64);
        let ratio = if tensor_units == 0 { f64::INFINITY } else { graph_units as f64 / tensor_units as f64 };
        MemoryFootprint { graph_units, tensor_units, ratio }
    }

    /// Text edge list: `atom <id> <atom>`, `conj <id> <clause>`,
    /// `edge a2c <atom> <conj>`, `edge c2a <conj> <atom> <clause>`.
    pub fn export_text(&self) -> String {
        let mut s = String::new();
        for (i, a) in self.base.atoms().iter().enumerate() {
            let _ = writeln!(s, "atom {i} {a}");
        }
        for j in 0..self.n_conj() {
            let _ = writeln!(s, "conj {j} {}", self.clause_of(j));
        }
        for (a, j) in self.edges_atom_to_conj() {
            let _ = writeln!(s, "edge a2c {a} {j}");
        }
        for (j, a, k) in self.edges_conj_to_atom() {
            let _ = writeln!(s, "edge c2a {j} {a} {k}");
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MemoryFootprint {
    pub graph_units: u64,
    pub tensor_units: u64,
    /// graph_units / tensor_units; infinite when there are no conjunctions.
    pub ratio: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::{ground_clauses, GroundingParams};
    use crate::lang::{parse_atom, parse_language, parse_program};

    #[test]
    fn single_clause_edges() {
        let l = parse_language("pred p/1 : t\npred q/1 : t\npred r/1 : t\nconst t : a\n").unwrap();
        let prog = parse_program("q(a):-p(a).\nr(a):-.", &l).unwrap();
        let g = ground_clauses(&prog, &l, &GroundingParams::default()).unwrap();
        let base = HerbrandBase::from_ground(&g, &[]).unwrap();
        let rg = ReasoningGraph::build(2, base, &g).unwrap();
        assert_eq!(rg.n_conj(), 2);
        let p = rg.base.index_of(&parse_atom("p(a)", &l).unwrap()).unwrap();
        let q = rg.base.index_of(&parse_atom("q(a)", &l).unwrap()).unwrap();
        let r = rg.base.index_of(&parse_atom("r(a)", &l).unwrap()).unwrap();
        assert_eq!(rg.edges_atom_to_conj(), vec![(p, 0), (0, 1)]);
        assert_eq!(rg.edges_conj_to_atom(), vec![(0, q, 0), (1, r, 1)]);
        assert_eq!(rg.n_edges(), 4);
        let text = rg.export_text();
        assert!(text.contains("edge a2c 0 1"));
        assert!(text.contains(&format!("edge c2a 1 {r} 1")));
    }

    #[test]
    fn dangling_atom() {
        let l = parse_language("pred p/1 : t\npred q/1 : t\nconst t : a\n").unwrap();
        let prog = parse_program("q(a):-p(a).", &l).unwrap();
        let g = ground_clauses(&prog, &l, &GroundingParams::default()).unwrap();
        let base = HerbrandBase::from_ground(&[], &[]).unwrap();
        assert!(matches!(ReasoningGraph::build(1, base, &g), Err(GraphError::DanglingAtom { .. })));
    }

    #[test]
    fn footprint_without_conjunctions() {
        let l = parse_language("pred p/1 : t\nconst t : a\n").unwrap();
        let base = HerbrandBase::from_ground(&[], &[parse_atom("p(a)", &l).unwrap()]).unwrap();
        let rg = ReasoningGraph::build(0, base, &[]).unwrap();
        let m = rg.memory_footprint();
        assert_eq!((m.graph_units, m.tensor_units), (2, 0));
        assert!(m.ratio.is_infinite());
    }
}
