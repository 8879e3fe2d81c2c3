use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Serialize, Deserialize, Clone, Debug)]
#[command(name = "reasongraph", version, about = "Differentiable forward reasoning and clause learning")]
pub struct Cli {
    /// Directory receiving every artifact of the run, including manifest.json.
    #[arg(long, global = true, default_value = "out", env = "REASONGRAPH_OUT")]
    pub out: PathBuf,
    /// Worker threads for parallel evaluation; 1 runs everything sequentially.
    #[arg(long, global = true, env = "REASONGRAPH_THREADS", value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,
    /// Seed for every random choice of the run.
    #[arg(long, global = true, default_value_t = 0, env = "REASONGRAPH_SEED")]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Serialize, Deserialize, Clone, Debug)]
pub enum Command {
    /// Ground a program and export its reasoning graph.
    Ground(GroundCmd),
    /// Run forward reasoning and write the proof history.
    Reason(ReasonCmd),
    /// Learn a program from examples.
    Learn(LearnCmd),
    /// Input-gradient attribution for one target atom.
    Explain(ExplainCmd),
    /// Memory and time scaling of the graph and tensor reasoners.
    Bench(BenchCmd),
    /// Write task data: programs, facts, examples or query datasets.
    GenData(GenDataCmd),
    /// Repeat a run from its manifest.
    Rerun(RerunCmd),
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

fn unit(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if (0.0..=1.0).contains(&v) => Ok(v),
        _ => Err(format!("`{s}` is not in [0,1]")),
    }
}

fn count(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(format!("`{s}` is not a positive integer")),
    }
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct ProgramInputs {
    /// Language declarations (predicates, constants, functors, list types).
    #[arg(long)]
    pub lang: PathBuf,
    /// Weighted clauses.
    #[arg(long)]
    pub program: PathBuf,
    /// Input facts with probabilities.
    #[arg(long)]
    pub facts: Option<PathBuf>,
    /// Largest functor nesting depth of ground terms.
    #[arg(long, default_value_t = 3, env = "REASONGRAPH_DEPTH")]
    pub depth: usize,
    /// Keep lists that repeat an element.
    #[arg(long)]
    pub keep_duplicates: bool,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct ReasonFlags {
    /// Softor smoothing.
    #[arg(long, default_value_t = 0.01, env = "REASONGRAPH_GAMMA", value_parser = positive, allow_negative_numbers = true)]
    pub gamma: f64,
    /// Message-passing steps T.
    #[arg(long, default_value_t = 5, env = "REASONGRAPH_STEPS", value_parser = count)]
    pub steps: usize,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct GroundCmd {
    #[command(flatten)]
    pub inputs: ProgramInputs,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct ReasonCmd {
    #[command(flatten)]
    pub inputs: ProgramInputs,
    #[command(flatten)]
    pub reason: ReasonFlags,
    /// Also render the history as a heatmap (rows = steps, columns = atoms).
    #[arg(long)]
    pub plot: bool,
}

#[derive(ValueEnum, Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
pub enum LearnTask {
    Member,
    Delete,
    Sort,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct LearnCmd {
    /// Built-in list task; its examples are generated from --seed.
    #[arg(long, conflicts_with_all = ["lang", "modes", "examples"], required_unless_present = "examples")]
    pub task: Option<LearnTask>,
    /// Positive examples generated for --task.
    #[arg(long, default_value_t = 200)]
    pub n_pos: usize,
    /// Negative examples generated for --task.
    #[arg(long, default_value_t = 200)]
    pub n_neg: usize,
    #[arg(long, requires_all = ["modes", "examples"])]
    pub lang: Option<PathBuf>,
    /// Mode declarations; the first head mode names the target.
    #[arg(long, requires = "lang")]
    pub modes: Option<PathBuf>,
    /// Labelled examples (`pos|neg atom` with optional facts).
    #[arg(long, requires = "lang")]
    pub examples: Option<PathBuf>,
    /// Fixed background clauses.
    #[arg(long, requires = "lang")]
    pub background: Option<PathBuf>,
    /// Background facts shared by all examples.
    #[arg(long, requires = "lang")]
    pub facts: Option<PathBuf>,
    #[arg(long, default_value_t = 3, env = "REASONGRAPH_DEPTH")]
    pub depth: usize,
    #[arg(long, default_value_t = 5, value_parser = count)]
    pub n_trial: usize,
    #[arg(long, default_value_t = 10, value_parser = count)]
    pub n_sample: usize,
    /// Clauses in the learned program (rows of the weight matrix).
    #[arg(long, default_value_t = 2, value_parser = count)]
    pub program_size: usize,
    #[arg(long, default_value_t = 1.0, value_parser = positive, allow_negative_numbers = true)]
    pub beta: f64,
    #[command(flatten)]
    pub reason: ReasonFlags,
    #[arg(long, default_value_t = 50, value_parser = count)]
    pub epochs: usize,
    #[arg(long, default_value_t = 1e-2, value_parser = positive, allow_negative_numbers = true)]
    pub lr: f64,
    #[arg(long, default_value_t = 64, value_parser = count)]
    pub batch: usize,
    /// Fraction of negatives used for scoring in each trial.
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.4,0.6,0.8,1.0", value_parser = unit, allow_negative_numbers = true)]
    pub neg_schedule: Vec<f64>,
    /// Weight every candidate carries while being scored.
    #[arg(long, default_value_t = 0.5, value_parser = unit, allow_negative_numbers = true)]
    pub score_weight: f64,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct ExplainCmd {
    #[command(flatten)]
    pub inputs: ProgramInputs,
    #[command(flatten)]
    pub reason: ReasonFlags,
    /// Ground atom whose probability is explained.
    #[arg(long)]
    pub target: String,
    /// Constants naming objects; input atoms are grouped by the first one they mention.
    #[arg(long, value_delimiter = ',')]
    pub group_consts: Vec<String>,
}

#[derive(ValueEnum, Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// n clauses s{i+1}(a):-s{i}(a).
    Chain,
    /// Transitive closure over a ring of n nodes.
    Path,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct BenchCmd {
    #[arg(long, value_enum, default_value = "chain")]
    pub family: Family,
    #[arg(long, value_delimiter = ',', default_value = "10,20,40,80,160", value_parser = count)]
    pub sizes: Vec<usize>,
    #[command(flatten)]
    pub reason: ReasonFlags,
    /// Largest dense tensor attempted, in elements.
    #[arg(long, default_value_t = 100_000_000)]
    pub tensor_cap: u64,
}

#[derive(ValueEnum, Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DataTask {
    EvenOdd,
    Cyclic,
    Member,
    Delete,
    Sort,
    /// Behind-the-Scenes query answering.
    Bts,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct GenDataCmd {
    #[arg(long, value_enum)]
    pub task: DataTask,
    /// Examples per label (list tasks) or queries per operation (bts).
    #[arg(long, default_value_t = 200)]
    pub n: usize,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct RerunCmd {
    /// manifest.json written by an earlier run.
    #[arg(long)]
    pub manifest: PathBuf,
}
