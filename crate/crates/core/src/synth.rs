//! Synthetic programs: small random instances for property checks and a
//! chain family for scaling measurements.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{GraphError, ReasoningGraph};
use crate::ground::{ground_clauses, GroundClause, GroundError, GroundingParams, HerbrandBase};
use crate::lang::{parse_language, parse_program, Atom, Clause, LangError, Language};
use crate::reason::initial_valuation;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("no instance within bounds after {0} attempts")]
    Exhausted(usize),
}

/// A grounded program with its graph and input facts.
#[derive(Clone, Debug)]
pub struct Instance {
    pub language: Language,
    pub program: Vec<Clause>,
    pub facts: Vec<(f64, Atom)>,
    pub ground: Vec<GroundClause>,
    pub graph: ReasoningGraph,
}

impl Instance {
    pub fn build(
        language: Language,
        program: Vec<Clause>,
        facts: Vec<(f64, Atom)>,
        grounding: &GroundingParams,
    ) -> Result<Instance, SynthError> {
        let ground = ground_clauses(&program, &language, grounding)?;
        let atoms: Vec<Atom> = facts.iter().map(|(_, a)| a.clone()).collect();
        let base = HerbrandBase::from_ground(&ground, &atoms)?;
        let graph = ReasoningGraph::build(program.len(), base, &ground)?;
        Ok(Instance { language, program, facts, ground, graph })
    }

    pub fn weights(&self) -> Vec<f64> {
        self.program.iter().map(|c| c.weight).collect()
    }

    /// ⊤ at 1 and each fact at its probability (max over repeats).
    pub fn x0(&self) -> Vec<f64> {
        let mut x = initial_valuation(&self.graph);
        for (p, a) in &self.facts {
            if let Some(i) = self.graph.base.index_of(a) {
                x[i] = x[i].max(*p);
            }
        }
        x
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomSpec {
    pub max_atoms: usize,
    pub max_ground: usize,
    pub max_preds: usize,
    pub max_consts: usize,
    pub max_clauses: usize,
    pub max_body: usize,
    /// Facts and weights are exactly 1 when set.
    pub binary: bool,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec { max_atoms: 200, max_ground: 100, max_preds: 5, max_consts: 3, max_clauses: 6, max_body: 3, binary: false }
    }
}

const VARS: [&str; 3] = ["X", "Y", "Z"];

fn random_atom(rng: &mut ChaCha8Rng, preds: &[usize], consts: usize, vars: &[&str]) -> String {
    let p = rng.random_range(0..preds.len());
    let args: Vec<String> = (0..preds[p])
        .map(|_| {
            if rng.random_bool(0.15) {
                format!("c{}", rng.random_range(0..consts))
            } else {
                vars[rng.random_range(0..vars.len())].to_string()
            }
        })
        .collect();
    format!("p{p}({})", args.join(","))
}

fn weight(rng: &mut ChaCha8Rng, binary: bool) -> f64 {
    if binary {
        1.0
    } else {
        rng.random_range(0.05..=1.0)
    }
}

/// Draws random typed programs over one datatype until one fits the bounds.
pub fn random_instance(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> Result<Instance, SynthError> {
    const ATTEMPTS: usize = 1000;
    for _ in 0..ATTEMPTS {
        let n_preds = rng.random_range(1..=spec.max_preds.max(1));
        let n_consts = rng.random_range(1..=spec.max_consts.max(1));
        let preds: Vec<usize> = (0..n_preds).map(|_| rng.random_range(1..=2)).collect();
        let mut lang_text = String::new();
        for (i, a) in preds.iter().enumerate() {
            lang_text += &format!("pred p{i}/{a} : {}\n", vec!["t"; *a].join(","));
        }
        let consts: Vec<String> = (0..n_consts).map(|i| format!("c{i}")).collect();
        lang_text += &format!("const t : {}\n", consts.join(","));
        let lang = parse_language(&lang_text)?;
        let n_clauses = rng.random_range(1..=spec.max_clauses.max(1));
        let mut prog = String::new();
        for _ in 0..n_clauses {
            let head = random_atom(rng, &preds, n_consts, &VARS[..2]);
            let body: Vec<String> =
                (0..rng.random_range(0..=spec.max_body)).map(|_| random_atom(rng, &preds, n_consts, &VARS)).collect();
            prog += &format!("{}: {head}:-{}.\n", weight(rng, spec.binary), body.join(","));
        }
        let program = parse_program(&prog, &lang)?;
        let ground = ground_clauses(&program, &lang, &GroundingParams::default())?;
        if ground.is_empty() || ground.len() > spec.max_ground {
            continue;
        }
        let base = HerbrandBase::from_ground(&ground, &[])?;
        if base.len() > spec.max_atoms {
            continue;
        }
        let mut facts: Vec<(f64, Atom)> = Vec::new();
        for a in &base.atoms()[1..] {
            if rng.random_bool(0.35) {
                facts.push((weight(rng, spec.binary), a.clone()));
            }
        }
        return Instance::build(lang, program, facts, &GroundingParams::default());
    }
    Err(SynthError::Exhausted(ATTEMPTS))
}

/// `n` clauses `s{i+1}(a):-s{i}(a)` with the fact `s0(a)`.
pub fn chain_instance(n: usize, weight: f64) -> Result<Instance, SynthError> {
    let mut lang_text = String::new();
    for i in 0..=n {
        lang_text += &format!("pred s{i}/1 : t\n");
    }
    lang_text += "const t : a\n";
    let lang = parse_language(&lang_text)?;
    let prog: String = (0..n).map(|i| format!("{weight}: s{}(a):-s{i}(a).\n", i + 1)).collect();
    let program = parse_program(&prog, &lang)?;
    let facts = vec![(1.0, crate::lang::parse_atom("s0(a)", &lang)?)];
    Instance::build(lang, program, facts, &GroundingParams::default())
}

/// Transitive closure over a ring of `n` nodes; grounding grows as n³.
pub fn path_instance(n: usize, weight: f64) -> Result<Instance, SynthError> {
    let nodes: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let lang = parse_language(&format!(
        "pred edge/2 : node,node\npred path/2 : node,node\nconst node : {}\n",
        nodes.join(",")
    ))?;
    let program =
        parse_program(&format!("{weight}: path(X,Y):-edge(X,Y).\n{weight}: path(X,Y):-edge(X,Z),path(Z,Y).\n"), &lang)?;
    let facts: String = (0..n).map(|i| format!("1.0 : edge(v{i},v{}).\n", (i + 1) % n)).collect();
    let facts = crate::lang::parse_facts(&facts, &lang)?;
    Instance::build(lang, program, facts, &GroundingParams::default())
}

/// Least-squares slope of ln y against ln x.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn random_instances_respect_bounds() {
        let mut rng = stream(3, "synth");
        let spec = RandomSpec::default();
        for _ in 0..20 {
            let inst = random_instance(&mut rng, &spec).unwrap();
            assert!(inst.ground.len() <= spec.max_ground && !inst.ground.is_empty());
            assert!(inst.graph.n_atoms() <= spec.max_atoms);
            assert_eq!(inst.x0()[0], 1.0);
        }
    }

    #[test]
    fn chain_sizes() {
        let c = chain_instance(10, 1.0).unwrap();
        assert_eq!(c.graph.n_conj(), 10);
        assert_eq!(c.graph.n_atoms(), 12);
        let p = path_instance(4, 0.9).unwrap();
        assert_eq!(p.graph.n_conj(), 16 + 64);
        assert!((log_log_slope(&[(1.0, 2.0), (2.0, 8.0), (4.0, 32.0)]) - 2.0).abs() < 1e-12);
    }
}
