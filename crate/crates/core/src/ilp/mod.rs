//! Structure learning: gradient scores, Gumbel-max sampling, refinement,
//! and multi-clause weight optimisation.

mod refine;

pub use refine::{downward_refine, mode_valid, most_general_clause};

use std::collections::{BTreeMap, HashSet};

use rand::distr::Open01;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::diff::{backward, DiffError, Tape};
use crate::graph::{GraphError, ReasoningGraph};
use crate::ground::{ground_clauses, GroundError, GroundingParams, HerbrandBase};
use crate::lang::{Atom, Clause, Example, Language, ModeDecl, Symbol};
use crate::reason::{forward, softor_raw, Exec, ReasonError, ReasonerParams};

#[derive(Debug, Error)]
pub enum IlpError {
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Reason(#[from] ReasonError),
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error("no candidate clauses to score")]
    EmptyCandidates,
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("loss became non-finite in epoch {epoch} (batch {batch})")]
    NonFiniteLoss { epoch: usize, batch: usize },
}

pub const CLIP: f64 = 1e-7;

/// Binary cross-entropy with p clipped to [1e-7, 1-1e-7].
pub fn bce_loss(p: f64, y: bool) -> f64 {
    let p = p.clamp(CLIP, 1.0 - CLIP);
    if y {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

/// dℓ/dp evaluated at the clipped probability.
pub fn bce_grad(p: f64, y: bool) -> f64 {
    let p = p.clamp(CLIP, 1.0 - CLIP);
    if y {
        -1.0 / p
    } else {
        1.0 / (1.0 - p)
    }
}

#[derive(Clone, Debug)]
pub struct IlpProblem {
    pub positives: Vec<Example>,
    pub negatives: Vec<Example>,
    pub background_facts: Vec<(f64, Atom)>,
    pub background_clauses: Vec<Clause>,
    pub language: Language,
    pub modes: Vec<ModeDecl>,
    pub target: Symbol,
}

impl IlpProblem {
    pub fn validate(&self) -> Result<(), IlpError> {
        if self.positives.is_empty() || self.negatives.is_empty() {
            return Err(IlpError::InvalidProblem("positives and negatives must be non-empty".into()));
        }
        if !self.modes.iter().any(|m| m.is_head && m.pred == self.target) {
            return Err(IlpError::InvalidProblem(format!("no head mode for `{}`", self.target)));
        }
        if self.positives.iter().any(|e| !e.positive) || self.negatives.iter().any(|e| e.positive) {
            return Err(IlpError::InvalidProblem("example polarity does not match its list".into()));
        }
        for e in self.positives.iter().chain(&self.negatives) {
            if e.target.pred != self.target {
                return Err(IlpError::InvalidProblem(format!("example `{}` is not about `{}`", e.target, self.target)));
            }
            if e.facts.iter().any(|(p, _)| !(0.0..=1.0).contains(p)) {
                return Err(IlpError::InvalidProblem(format!("fact probability outside [0,1] in `{}`", e.target)));
            }
        }
        Ok(())
    }

    /// The most general clause of the target's head mode.
    pub fn initial_clauses(&self) -> Vec<Clause> {
        self.modes
            .iter()
            .filter(|m| m.is_head && m.pred == self.target)
            .map(most_general_clause)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LearnParams {
    pub n_trial: usize,
    pub n_sample: usize,
    /// Number of clauses M in the learned program.
    pub program_size: usize,
    pub beta: f64,
    pub gamma: f64,
    pub steps: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Fraction of negatives used when scoring in trial i (last entry repeats).
    pub neg_ratio_schedule: Vec<f64>,
    pub seed: u64,
    /// Weight given to every candidate while scoring.
    pub score_weight: f64,
    /// Standard deviation of the normal initialisation of W.
    pub init_std: f64,
    /// Score candidates in a graph that also holds the clauses sampled so far.
    pub score_context: bool,
    pub grounding: GroundingParams,
    pub exec: Exec,
}

impl Default for LearnParams {
    fn default() -> Self {
        LearnParams {
            n_trial: 5,
            n_sample: 10,
            program_size: 2,
            beta: 1.0,
            gamma: 0.01,
            steps: 5,
            epochs: 50,
            batch_size: 64,
            learning_rate: 1e-2,
            neg_ratio_schedule: vec![0.2, 0.4, 0.6, 0.8, 1.0],
            seed: 0,
            score_weight: 0.5,
            init_std: 1.0,
            score_context: true,
            grounding: GroundingParams::default(),
            exec: Exec::default(),
        }
    }
}

impl LearnParams {
    pub fn reasoner(&self) -> ReasonerParams {
        ReasonerParams { gamma: self.gamma, steps: self.steps, exec: self.exec }
    }

    pub fn validate(&self) -> Result<(), IlpError> {
        let bad = |m: &str| Err(IlpError::InvalidProblem(m.to_string()));
        if self.n_trial == 0 || self.n_sample == 0 || self.program_size == 0 || self.epochs == 0 || self.batch_size == 0 {
            return bad("counts must be at least 1");
        }
        if self.neg_ratio_schedule.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
            return bad("negative ratios must lie in (0,1]");
        }
        if !(self.beta > 0.0 && self.gamma > 0.0 && self.learning_rate > 0.0) {
            return bad("beta, gamma and learning rate must be positive");
        }
        if !(self.init_std >= 0.0 && self.init_std.is_finite()) {
            return bad("init std must be finite and non-negative");
        }
        if !(0.0..=1.0).contains(&self.score_weight) {
            return bad("score weight must lie in [0,1]");
        }
        Ok(())
    }
}

struct Group {
    x0: Vec<f64>,
    members: Vec<usize>,
}

/// A compiled reasoning graph over learnable clauses (first) and background
/// clauses, with examples grouped by identical input facts.
pub struct Evaluator {
    pub graph: ReasoningGraph,
    n_learn: usize,
    background_weights: Vec<f64>,
    groups: Vec<Group>,
    /// (target atom index, label) per example.
    targets: Vec<(usize, bool)>,
    params: ReasonerParams,
}

fn facts_key(facts: &[(f64, Atom)]) -> String {
    let mut v: Vec<String> = facts.iter().map(|(p, a)| format!("{p:?}:{a}")).collect();
    v.sort();
    v.join(";")
}

impl Evaluator {
    pub fn new(
        learnable: &[Clause],
        background: &[Clause],
        background_facts: &[(f64, Atom)],
        examples: &[&Example],
        lang: &Language,
        grounding: &GroundingParams,
        params: ReasonerParams,
    ) -> Result<Evaluator, IlpError> {
        let clauses: Vec<Clause> = learnable.iter().chain(background).cloned().collect();
        let ground = ground_clauses(&clauses, lang, grounding)?;
        let mut extra: Vec<Atom> = background_facts.iter().map(|(_, a)| a.clone()).collect();
        for e in examples {
            extra.push(e.target.clone());
            extra.extend(e.facts.iter().map(|(_, a)| a.clone()));
        }
        let base = HerbrandBase::from_ground(&ground, &extra)?;
        let graph = ReasoningGraph::build(clauses.len(), base, &ground)?;
        let mut by_key: BTreeMap<String, usize> = BTreeMap::new();
        let mut groups: Vec<Group> = Vec::new();
        let mut targets = Vec::with_capacity(examples.len());
        for (i, e) in examples.iter().enumerate() {
            let key = facts_key(&e.facts);
            let gi = *by_key.entry(key).or_insert_with(|| {
                let mut x0 = vec![0.0f64; graph.n_atoms()];
                x0[0] = 1.0;
                for (p, a) in background_facts.iter().chain(&e.facts) {
                    let k = graph.base.index_of(a).expect("fact atoms are in the base");
                    x0[k] = x0[k].max(*p);
                }
                groups.push(Group { x0, members: Vec::new() });
                groups.len() - 1
            });
            groups[gi].members.push(i);
            targets.push((graph.base.index_of(&e.target).expect("targets are in the base"), e.positive));
        }
        Ok(Evaluator {
            graph,
            n_learn: learnable.len(),
            background_weights: background.iter().map(|c| c.weight).collect(),
            groups,
            targets,
            params,
        })
    }

    pub fn n_examples(&self) -> usize {
        self.targets.len()
    }

    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    fn full_weights(&self, w: &[f64]) -> Vec<f64> {
        w.iter().chain(&self.background_weights).copied().collect()
    }

    fn inner(&self) -> (Exec, Exec) {
        if self.groups.len() > 1 {
            (self.params.exec, Exec::Sequential)
        } else {
            (Exec::Sequential, self.params.exec)
        }
    }

    /// Probability of each example's target atom.
    pub fn predict(&self, w: &[f64]) -> Result<Vec<f64>, IlpError> {
        let weights = self.full_weights(w);
        let (outer, inner) = self.inner();
        let params = ReasonerParams { exec: inner, ..self.params };
        let outs = outer.map(self.groups.len(), |g| forward(&self.groups[g].x0, &self.graph, &weights, &params));
        let mut p = vec![0.0; self.targets.len()];
        for (g, out) in self.groups.iter().zip(outs) {
            let h = out?;
            let last = h.last();
            for &e in &g.members {
                p[e] = last[self.targets[e].0];
            }
        }
        Ok(p)
    }

    /// Σₑ coeffₑ·bce(pₑ, yₑ) and its gradient with respect to the learnable weights.
    pub fn loss_and_grad(&self, w: &[f64], coeffs: &[f64]) -> Result<(f64, Vec<f64>), IlpError> {
        let weights = self.full_weights(w);
        let (outer, inner) = self.inner();
        let params = ReasonerParams { exec: inner, ..self.params };
        let active: Vec<usize> =
            (0..self.groups.len()).filter(|&g| self.groups[g].members.iter().any(|&e| coeffs[e] != 0.0)).collect();
        let parts = outer.map(active.len(), |k| -> Result<(f64, Vec<f64>), IlpError> {
            let grp = &self.groups[active[k]];
            let tape = Tape::record(&self.graph, &grp.x0, &weights, &params)?;
            let out = tape.output();
            let mut loss = 0.0;
            let mut seed: Vec<(usize, f64)> = Vec::new();
            for &e in &grp.members {
                let c = coeffs[e];
                if c == 0.0 {
                    continue;
                }
                let (a, y) = self.targets[e];
                loss += c * bce_loss(out[a], y);
                seed.push((a, c * bce_grad(out[a], y)));
            }
            let gb = backward(&tape, &seed)?;
            Ok((loss, gb.d_weights))
        });
        let mut loss = 0.0;
        let mut grad = vec![0.0; self.n_learn];
        for part in parts {
            let (l, g) = part?;
            loss += l;
            for (acc, v) in grad.iter_mut().zip(&g[..self.n_learn]) {
                *acc += v;
            }
        }
        Ok((loss, grad))
    }
}

fn examples_of(problem: &IlpProblem) -> Vec<&Example> {
    problem.positives.iter().chain(&problem.negatives).collect()
}

/// Mini-batch coefficients (1/|batch|) for a shuffled pass over `chosen`.
fn batches(chosen: &[usize], batch_size: usize) -> Vec<Vec<usize>> {
    chosen.chunks(batch_size).map(|c| c.to_vec()).collect()
}

/// Scores candidates by β·(−∂L/∂w) summed over one pass of mini-batches.
///
/// All positives and a `neg_ratio` fraction of the negatives are used.
/// The graph holds the candidates together with `context` (clauses kept
/// from earlier trials, so a recursive candidate can use its base case);
/// every clause carries `params.score_weight` and only the candidates'
/// scores are returned.
pub fn score_clauses(
    problem: &IlpProblem,
    context: &[Clause],
    candidates: &[Clause],
    params: &LearnParams,
    neg_ratio: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>, IlpError> {
    if candidates.is_empty() {
        return Err(IlpError::EmptyCandidates);
    }
    let examples = examples_of(problem);
    let n_pos = problem.positives.len();
    let n_neg = problem.negatives.len();
    let take = ((neg_ratio * n_neg as f64).round() as usize).min(n_neg);
    let mut chosen: Vec<usize> = (0..n_pos).collect();
    chosen.extend(rand::seq::index::sample(rng, n_neg, take).into_iter().map(|i| n_pos + i));
    chosen.shuffle(rng);
    if chosen.is_empty() {
        return Ok(vec![0.0; candidates.len()]);
    }
    let clauses: Vec<Clause> = candidates.iter().chain(context).cloned().collect();
    let ev = Evaluator::new(
        &clauses,
        &problem.background_clauses,
        &problem.background_facts,
        &examples,
        &problem.language,
        &params.grounding,
        params.reasoner(),
    )?;
    // The gradient is linear in the per-example coefficients, so the sum
    // over batches is a single weighted backward pass per input group.
    let mut coeffs = vec![0.0; examples.len()];
    for b in batches(&chosen, params.batch_size) {
        let k = 1.0 / b.len() as f64;
        for e in b {
            coeffs[e] += k;
        }
    }
    let w = vec![params.score_weight; clauses.len()];
    let (_, grad) = ev.loss_and_grad(&w, &coeffs)?;
    Ok(grad[..candidates.len()].iter().map(|g| -params.beta * g).collect())
}

/// One Gumbel-max draw: argmax(s + g) with g = -ln(-ln u), u ∈ (0,1).
pub fn gumbel_argmax(s: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, &v) in s.iter().enumerate() {
        let u: f64 = rng.sample(Open01);
        let z = v - (-u.ln()).ln();
        if z > best_v {
            best_v = z;
            best = i;
        }
    }
    best
}

/// `n` independent Gumbel-max draws, collapsed to a sorted set of indices.
pub fn gumbel_sample(s: &[f64], n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    if s.is_empty() {
        return Vec::new();
    }
    let set: std::collections::BTreeSet<usize> = (0..n).map(|_| gumbel_argmax(s, rng)).collect();
    set.into_iter().collect()
}

fn softmax(row: &[f64]) -> Vec<f64> {
    let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = row.iter().map(|v| (v - m).exp()).collect();
    let z: f64 = e.iter().sum();
    e.into_iter().map(|v| v / z).collect()
}

/// Row-wise softmax, then per column a softor over the M rows, clamped to [0,1].
pub fn compose_weights(w: &[Vec<f64>], gamma: f64) -> Vec<f64> {
    let rows: Vec<Vec<f64>> = w.iter().map(|r| softmax(r)).collect();
    let k = rows.first().map_or(0, Vec::len);
    (0..k)
        .map(|i| {
            let col: Vec<f64> = rows.iter().map(|r| r[i]).collect();
            softor_raw(&col, gamma).clamp(0.0, 1.0)
        })
        .collect()
}

/// Pulls a gradient on the composed weights back to the raw matrix.
pub fn compose_backward(w: &[Vec<f64>], gamma: f64, g_w: &[f64]) -> Vec<Vec<f64>> {
    let rows: Vec<Vec<f64>> = w.iter().map(|r| softmax(r)).collect();
    let k = g_w.len();
    // Gradient on each softmaxed entry.
    let mut g_hat = vec![vec![0.0; k]; rows.len()];
    for i in 0..k {
        let col: Vec<f64> = rows.iter().map(|r| r[i]).collect();
        if softor_raw(&col, gamma) > 1.0 {
            continue;
        }
        let m = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = col.iter().map(|v| ((v - m) / gamma).exp()).collect();
        let z: f64 = e.iter().sum();
        for (r, ev) in e.iter().enumerate() {
            g_hat[r][i] = g_w[i] * ev / z;
        }
    }
    rows.iter()
        .zip(&g_hat)
        .map(|(p, g)| {
            let dot: f64 = p.iter().zip(g).map(|(a, b)| a * b).sum();
            p.iter().zip(g).map(|(pi, gi)| pi * (gi - dot)).collect()
        })
        .collect()
}

/// Argmax clause of each row (lowest index on ties), duplicates dropped.
pub fn discretize(w: &[Vec<f64>]) -> Vec<usize> {
    let mut out = Vec::new();
    for row in w {
        let mut best = 0;
        for (i, &v) in row.iter().enumerate() {
            if v > row[best] {
                best = i;
            }
        }
        if !row.is_empty() && !out.contains(&best) {
            out.push(best);
        }
    }
    out
}

/// RMSProp with smoothing 0.99 and ε = 1e-8, no momentum.
#[derive(Clone, Debug)]
pub struct RmsProp {
    pub lr: f64,
    pub alpha: f64,
    pub eps: f64,
    sq: Vec<Vec<f64>>,
}

impl RmsProp {
    pub fn new(lr: f64, shape: (usize, usize)) -> RmsProp {
        RmsProp { lr, alpha: 0.99, eps: 1e-8, sq: vec![vec![0.0; shape.1]; shape.0] }
    }

    pub fn step(&mut self, w: &mut [Vec<f64>], g: &[Vec<f64>]) {
        for ((wr, gr), sr) in w.iter_mut().zip(g).zip(self.sq.iter_mut()) {
            for ((wv, gv), sv) in wr.iter_mut().zip(gr).zip(sr.iter_mut()) {
                *sv = self.alpha * *sv + (1.0 - self.alpha) * gv * gv;
                *wv -= self.lr * gv / (sv.sqrt() + self.eps);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    pub accuracy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub neg_ratio: f64,
    pub n_candidates: usize,
    /// (clause, score) for every candidate, in candidate order.
    pub scores: Vec<(String, f64)>,
    pub sampled: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct TrainResult {
    /// Clauses the weights range over: the initial clauses and every sampled clause.
    pub clauses: Vec<Clause>,
    pub raw_weights: Vec<Vec<f64>>,
    pub w_star: Vec<f64>,
    pub history: Vec<EpochRecord>,
    pub trials: Vec<TrialRecord>,
    /// Discretised program with unit weights.
    pub program: Vec<Clause>,
}

/// Clause search followed by weight optimisation.
pub fn train(problem: &IlpProblem, initial: &[Clause], params: &LearnParams) -> Result<TrainResult, IlpError> {
    problem.validate()?;
    params.validate()?;
    let mut rng = crate::rng::stream(params.seed, "ilp");
    let depth = params.grounding.max_depth;
    let mut sampled: Vec<Clause> = Vec::new();
    let mut sampled_keys: HashSet<String> = HashSet::new();
    for c in initial {
        if sampled_keys.insert(c.key()) {
            sampled.push(c.clone().with_weight(1.0));
        }
    }
    let mut scored: HashSet<String> = HashSet::new();
    let mut candidates: Vec<Clause> = sampled.clone();
    let mut trials = Vec::new();
    for trial in 0..params.n_trial {
        if candidates.is_empty() {
            break;
        }
        let ratio = params
            .neg_ratio_schedule
            .get(trial)
            .or(params.neg_ratio_schedule.last())
            .copied()
            .unwrap_or(1.0);
        let cand_keys: HashSet<String> = candidates.iter().map(Clause::key).collect();
        let context: Vec<Clause> = if params.score_context {
            sampled.iter().filter(|c| !cand_keys.contains(&c.key())).cloned().collect()
        } else {
            Vec::new()
        };
        let s = score_clauses(problem, &context, &candidates, params, ratio, &mut rng)?;
        let picks = gumbel_sample(&s, params.n_sample, &mut rng);
        for c in &candidates {
            scored.insert(c.key());
        }
        let mut next = Vec::new();
        let mut next_keys = HashSet::new();
        let mut names = Vec::new();
        for &i in &picks {
            let d = &candidates[i];
            names.push(d.rule_text());
            if sampled_keys.insert(d.key()) {
                sampled.push(d.clone());
            }
            for r in downward_refine(d, &problem.language, &problem.modes, depth) {
                let k = r.key();
                if !scored.contains(&k) && next_keys.insert(k) {
                    next.push(r);
                }
            }
        }
        let scores = candidates.iter().map(Clause::rule_text).zip(s.iter().copied()).collect();
        trials.push(TrialRecord { trial, neg_ratio: ratio, n_candidates: candidates.len(), scores, sampled: names });
        candidates = next;
    }
    optimise(problem, sampled, params, &mut rng, trials)
}

/// Weight optimisation alone over a fixed clause set.
pub fn optimise_weights(problem: &IlpProblem, clauses: Vec<Clause>, params: &LearnParams) -> Result<TrainResult, IlpError> {
    problem.validate()?;
    params.validate()?;
    let mut rng = crate::rng::stream(params.seed, "ilp-weights");
    optimise(problem, clauses, params, &mut rng, Vec::new())
}

fn optimise(
    problem: &IlpProblem,
    clauses: Vec<Clause>,
    params: &LearnParams,
    rng: &mut ChaCha8Rng,
    trials: Vec<TrialRecord>,
) -> Result<TrainResult, IlpError> {
    let examples = examples_of(problem);
    let ev = Evaluator::new(
        &clauses,
        &problem.background_clauses,
        &problem.background_facts,
        &examples,
        &problem.language,
        &params.grounding,
        params.reasoner(),
    )?;
    let m = params.program_size;
    let k = clauses.len();
    let mut w: Vec<Vec<f64>> = (0..m).map(|_| (0..k).map(|_| params.init_std * rng.sample::<f64, _>(StandardNormal)).collect()).collect();
    let mut opt = RmsProp::new(params.learning_rate, (m, k));
    let mut history = Vec::with_capacity(params.epochs);
    let mut order: Vec<usize> = (0..examples.len()).collect();
    for epoch in 0..params.epochs {
        order.shuffle(rng);
        for (bi, b) in batches(&order, params.batch_size).into_iter().enumerate() {
            let mut coeffs = vec![0.0; examples.len()];
            for &e in &b {
                coeffs[e] = 1.0 / b.len() as f64;
            }
            let ws = compose_weights(&w, params.gamma);
            let (loss, g) = ev.loss_and_grad(&ws, &coeffs)?;
            if !loss.is_finite() || g.iter().any(|v| !v.is_finite()) {
                return Err(IlpError::NonFiniteLoss { epoch, batch: bi });
            }
            let gw = compose_backward(&w, params.gamma, &g);
            opt.step(&mut w, &gw);
        }
        let ws = compose_weights(&w, params.gamma);
        let p = ev.predict(&ws)?;
        let n = examples.len() as f64;
        let loss = examples.iter().zip(&p).map(|(e, &pe)| bce_loss(pe, e.positive)).sum::<f64>() / n;
        if !loss.is_finite() {
            return Err(IlpError::NonFiniteLoss { epoch, batch: usize::MAX });
        }
        let acc = examples.iter().zip(&p).filter(|(e, &pe)| (pe > 0.5) == e.positive).count() as f64 / n;
        history.push(EpochRecord { epoch, loss, accuracy: acc });
    }
    let w_star = compose_weights(&w, params.gamma);
    let program = discretize(&w).into_iter().map(|i| clauses[i].clone().with_weight(1.0)).collect();
    Ok(TrainResult { clauses, raw_weights: w, w_star, history, trials, program })
}

/// Accuracy of a fixed program (with its clause weights) on labelled examples,
/// thresholding target probabilities at 0.5.
pub fn evaluate_program(
    program: &[Clause],
    problem: &IlpProblem,
    examples: &[Example],
    params: &LearnParams,
) -> Result<f64, IlpError> {
    if examples.is_empty() {
        return Ok(1.0);
    }
    let refs: Vec<&Example> = examples.iter().collect();
    let ev = Evaluator::new(
        program,
        &problem.background_clauses,
        &problem.background_facts,
        &refs,
        &problem.language,
        &params.grounding,
        params.reasoner(),
    )?;
    let w: Vec<f64> = program.iter().map(|c| c.weight).collect();
    let p = ev.predict(&w)?;
    Ok(examples.iter().zip(&p).filter(|(e, &pe)| (pe > 0.5) == e.positive).count() as f64 / examples.len() as f64)
}
