use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use reasongraph::diff::{attribution_weights, input_gradients};
use reasongraph::ground::GroundingParams;
use reasongraph::ilp::{evaluate_program, train, IlpProblem, LearnParams};
use reasongraph::lang::{
    examples_to_text, facts_to_text, modes_to_text, parse_atom, parse_examples, parse_facts, parse_language, parse_modes,
    parse_program, program_to_text, theta_equivalent, Atom, Example, Language, Term,
};
use reasongraph::oracle::{tensor_infer, IndexTensor};
use reasongraph::reason::{infer, ReasonerParams};
use reasongraph::synth::{chain_instance, log_log_slope, path_instance, Instance};
use reasongraph::tasks::{
    bts_background_text, gen_behind_scenes, gen_classic, gen_list_task, list_modes, list_language, ClassicTask, ListTask,
    BTS_LANGUAGE, BTS_PROGRAM, LIST_LANGUAGE,
};
use serde_json::json;

use crate::args::*;
use crate::plot;
use crate::run::{read_input, Run};

fn lang_err(flag: &str) -> impl Fn(reasongraph::lang::LangError) -> anyhow::Error + '_ {
    move |e| anyhow!("{flag}: {e}")
}

fn grounding(depth: usize, keep_duplicates: bool) -> GroundingParams {
    GroundingParams { max_depth: depth, dedup_list_elements: !keep_duplicates }
}

fn load(inputs: &ProgramInputs) -> Result<Instance> {
    let language = parse_language(&read_input("--lang", &inputs.lang)?).map_err(lang_err("--lang"))?;
    let program = parse_program(&read_input("--program", &inputs.program)?, &language).map_err(lang_err("--program"))?;
    let facts = match &inputs.facts {
        Some(p) => parse_facts(&read_input("--facts", p)?, &language).map_err(lang_err("--facts"))?,
        None => Vec::new(),
    };
    Instance::build(language, program, facts, &grounding(inputs.depth, inputs.keep_duplicates))
        .context("--program: grounding failed")
}

fn reasoner(flags: &ReasonFlags, run: &Run) -> ReasonerParams {
    ReasonerParams { gamma: flags.gamma, steps: flags.steps, exec: run.exec }
}

pub fn ground(cmd: &GroundCmd, run: &mut Run) -> Result<()> {
    let inst = load(&cmd.inputs)?;
    let g = &inst.graph;
    let mut text = String::new();
    for gc in &inst.ground {
        let body: Vec<String> = gc.body.iter().map(|a| a.to_string()).collect();
        text += &format!("{}\t{}:-{}.\n", gc.clause, gc.head, body.join(","));
    }
    run.write("ground.txt", &text)?;
    run.write("graph.txt", &g.export_text())?;
    let m = g.memory_footprint();
    let stats = json!({
        "atoms": g.n_atoms(),
        "conjunctions": g.n_conj(),
        "edges": g.n_edges(),
        "max_body": g.max_body_len(),
        "graph_units": m.graph_units,
        "tensor_units": m.tensor_units,
        "ratio": if m.ratio.is_finite() { json!(m.ratio) } else { json!(null) },
    });
    run.write_json("stats.json", &stats)?;
    println!("{} atoms, {} conjunctions, {} edges", g.n_atoms(), g.n_conj(), g.n_edges());
    Ok(())
}

pub fn reason(cmd: &ReasonCmd, run: &mut Run) -> Result<()> {
    let inst = load(&cmd.inputs)?;
    let g = &inst.graph;
    let x0 = inst.x0();
    let h = infer(&x0, g, &inst.weights(), &reasoner(&cmd.reason, run))?;
    let mut w = run.csv("history.csv")?;
    let mut header = vec!["step".to_string()];
    header.extend(g.base.atoms().iter().map(|a| a.to_string()));
    w.write_record(&header)?;
    for (t, x) in h.iter().enumerate() {
        let mut row = vec![t.to_string()];
        row.extend(x.iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    let last = h.last().expect("history holds x0");
    let mut w = run.csv("final.csv")?;
    w.write_record(["index", "atom", "input", "value"])?;
    for (i, a) in g.base.atoms().iter().enumerate() {
        w.write_record([i.to_string(), a.to_string(), x0[i].to_string(), last[i].to_string()])?;
    }
    w.flush()?;
    if cmd.plot {
        let p = run.path("heatmap.png")?;
        plot::heatmap(&h, &p)?;
    }
    let derived = (1..g.n_atoms()).filter(|&i| last[i] > 0.5).count();
    println!("{} atoms, {} steps, {} above 0.5", g.n_atoms(), cmd.reason.steps, derived);
    Ok(())
}

fn list_task(t: LearnTask) -> ListTask {
    match t {
        LearnTask::Member => ListTask::Member,
        LearnTask::Delete => ListTask::Delete,
        LearnTask::Sort => ListTask::Sort,
    }
}

fn custom_problem(cmd: &LearnCmd) -> Result<IlpProblem> {
    let (Some(lang), Some(modes), Some(examples)) = (&cmd.lang, &cmd.modes, &cmd.examples) else {
        bail!("--lang: either --task or all of --lang, --modes and --examples are required");
    };
    let language = parse_language(&read_input("--lang", lang)?).map_err(lang_err("--lang"))?;
    let modes = parse_modes(&read_input("--modes", modes)?, &language).map_err(lang_err("--modes"))?;
    let target = modes.iter().find(|m| m.is_head).map(|m| m.pred.clone()).ok_or_else(|| anyhow!("--modes: no head mode"))?;
    let ex = parse_examples(&read_input("--examples", examples)?, &language, examples.parent()).map_err(lang_err("--examples"))?;
    let (positives, negatives): (Vec<Example>, Vec<Example>) = ex.into_iter().partition(|e| e.positive);
    if positives.is_empty() || negatives.is_empty() {
        bail!("--examples: need at least one positive and one negative example");
    }
    let background_clauses = match &cmd.background {
        Some(p) => parse_program(&read_input("--background", p)?, &language).map_err(lang_err("--background"))?,
        None => Vec::new(),
    };
    let background_facts = match &cmd.facts {
        Some(p) => parse_facts(&read_input("--facts", p)?, &language).map_err(lang_err("--facts"))?,
        None => Vec::new(),
    };
    Ok(IlpProblem { positives, negatives, background_facts, background_clauses, language, modes, target })
}

pub fn learn(cmd: &LearnCmd, run: &mut Run) -> Result<()> {
    let (problem, test) = match cmd.task {
        Some(t) => {
            if cmd.n_pos == 0 || cmd.n_neg == 0 {
                bail!("--n-pos/--n-neg: both must be at least 1");
            }
            let t = list_task(t);
            let train = gen_list_task(t, cmd.n_pos, cmd.n_neg, run.seed)?;
            let test = gen_list_task(t, cmd.n_pos.div_ceil(2), cmd.n_neg.div_ceil(2), run.seed + 1000)?;
            (train, Some((t, test)))
        }
        None => (custom_problem(cmd)?, None),
    };
    let params = LearnParams {
        n_trial: cmd.n_trial,
        n_sample: cmd.n_sample,
        program_size: cmd.program_size,
        beta: cmd.beta,
        gamma: cmd.reason.gamma,
        steps: cmd.reason.steps,
        epochs: cmd.epochs,
        batch_size: cmd.batch,
        learning_rate: cmd.lr,
        neg_ratio_schedule: cmd.neg_schedule.clone(),
        seed: run.seed,
        score_weight: cmd.score_weight,
        grounding: grounding(cmd.depth, false),
        exec: run.exec,
        ..LearnParams::default()
    };
    let started = Instant::now();
    let res = train(&problem, &problem.initial_clauses(), &params).context("learn")?;
    let seconds = started.elapsed().as_secs_f64();

    run.write("program.txt", &program_to_text(&res.program))?;
    let mut w = run.csv("weights.csv")?;
    w.write_record(["clause", "weight"])?;
    for (c, v) in res.clauses.iter().zip(&res.w_star) {
        w.write_record([c.rule_text(), v.to_string()])?;
    }
    w.flush()?;
    let mut w = run.csv("history.csv")?;
    w.write_record(["epoch", "loss", "accuracy"])?;
    for e in &res.history {
        w.write_record([e.epoch.to_string(), e.loss.to_string(), e.accuracy.to_string()])?;
    }
    w.flush()?;
    let trials: Vec<_> = res
        .trials
        .iter()
        .map(|t| {
            json!({
                "trial": t.trial,
                "neg_ratio": t.neg_ratio,
                "candidates": t.n_candidates,
                "scores": t.scores.iter().map(|(c, s)| json!({"clause": c, "score": s})).collect::<Vec<_>>(),
                "sampled": t.sampled,
            })
        })
        .collect();
    run.write_json("trials.json", &trials)?;

    let final_loss = res.history.last().map(|h| h.loss);
    let train_acc = res.history.last().map(|h| h.accuracy);
    let mut summary = json!({
        "program": res.program.iter().map(|c| c.rule_text()).collect::<Vec<_>>(),
        "final_loss": final_loss,
        "train_accuracy": train_acc,
        "seconds": seconds,
    });
    if let Some((t, test)) = test {
        let ex: Vec<Example> = test.positives.iter().chain(&test.negatives).cloned().collect();
        let acc = evaluate_program(&res.program, &problem, &ex, &params)?;
        let reference = parse_program(t.reference_program(), &problem.language)?;
        let matches = res.program.len() == reference.len()
            && reference.iter().all(|r| res.program.iter().any(|c| theta_equivalent(c, r)));
        summary["test_accuracy"] = json!(acc);
        summary["matches_reference"] = json!(matches);
    }
    run.write_json("summary.json", &summary)?;
    print!("{}", program_to_text(&res.program));
    if let Some(l) = final_loss {
        println!("final loss {l:.4}");
    }
    Ok(())
}

fn first_constant<'a>(t: &'a Term, names: &[String]) -> Option<&'a str> {
    match t {
        Term::Const { name, .. } => names.iter().any(|n| **n == **name).then_some(&**name),
        Term::Var { .. } => None,
        Term::App { args, .. } => args.iter().find_map(|a| first_constant(a, names)),
    }
}

fn owner<'a>(a: &'a Atom, names: &[String]) -> Option<&'a str> {
    a.args.iter().find_map(|t| first_constant(t, names))
}

pub fn explain(cmd: &ExplainCmd, run: &mut Run) -> Result<()> {
    let inst = load(&cmd.inputs)?;
    let g = &inst.graph;
    let target = parse_atom(&cmd.target, &inst.language).map_err(lang_err("--target"))?;
    let ti = g.base.index_of(&target).ok_or_else(|| anyhow!("--target: `{target}` is not in the Herbrand base"))?;
    let x0 = inst.x0();
    let w = inst.weights();
    let params = reasoner(&cmd.reason, run);
    let value = infer(&x0, g, &w, &params)?.last().map(|x| x[ti]).unwrap_or(0.0);
    let grads = input_gradients(g, &w, &x0, &params, ti)?;
    let mut out = run.csv("gradients.csv")?;
    out.write_record(["index", "atom", "input", "gradient"])?;
    for (i, a) in g.base.atoms().iter().enumerate() {
        out.write_record([i.to_string(), a.to_string(), x0[i].to_string(), grads[i].to_string()])?;
    }
    out.flush()?;
    println!("{target} = {value:.6}");
    let mut ranked: Vec<usize> = (1..g.n_atoms()).filter(|&i| grads[i] != 0.0).collect();
    ranked.sort_by(|&a, &b| grads[b].total_cmp(&grads[a]));
    for &i in ranked.iter().take(10) {
        println!("  {:.6}  {}", grads[i], g.base.atom(i));
    }
    if !cmd.group_consts.is_empty() {
        for c in &cmd.group_consts {
            if inst.language.constant_type(c).is_none() {
                bail!("--group-consts: unknown constant `{c}`");
            }
        }
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); cmd.group_consts.len()];
        for i in 1..g.n_atoms() {
            if x0[i] > 0.0 {
                if let Some(c) = owner(g.base.atom(i), &cmd.group_consts) {
                    let k = cmd.group_consts.iter().position(|n| n == c).expect("owner is a listed constant");
                    groups[k].push(i);
                }
            }
        }
        let present: Vec<Vec<usize>> = groups.iter().filter(|g| !g.is_empty()).cloned().collect();
        let weights = attribution_weights(&grads, &present)?;
        let mut it = weights.into_iter();
        let mut out = run.csv("attribution.csv")?;
        out.write_record(["constant", "atoms", "weight"])?;
        for (c, grp) in cmd.group_consts.iter().zip(&groups) {
            let v = if grp.is_empty() { 0.0 } else { it.next().expect("one weight per present group") };
            out.write_record([c.clone(), grp.len().to_string(), v.to_string()])?;
            println!("{c}: {v:.6}");
        }
        out.flush()?;
    }
    Ok(())
}

fn best_of<F: FnMut() -> Result<()>>(reps: usize, mut f: F) -> Result<f64> {
    let mut best = f64::INFINITY;
    for _ in 0..reps {
        let t = Instant::now();
        f()?;
        best = best.min(t.elapsed().as_secs_f64() * 1e3);
    }
    Ok(best)
}

pub fn bench(cmd: &BenchCmd, run: &mut Run) -> Result<()> {
    crate::run::nonempty("--sizes", &cmd.sizes)?;
    let params = reasoner(&cmd.reason, run);
    let mut w = run.csv("bench.csv")?;
    w.write_record(["size", "atoms", "conjunctions", "graph_units", "tensor_units", "ratio", "graph_ms", "tensor_ms"])?;
    let mut units = Vec::new();
    let mut tensor = Vec::new();
    let mut times = Vec::new();
    for &n in &cmd.sizes {
        let inst = match cmd.family {
            Family::Chain => chain_instance(n, 1.0)?,
            Family::Path => path_instance(n, 1.0)?,
        };
        let g = &inst.graph;
        let x0 = inst.x0();
        let wts = inst.weights();
        let m = g.memory_footprint();
        let graph_ms = best_of(3, || infer(&x0, g, &wts, &params).map(|_| ()).map_err(Into::into))?;
        let tensor_ms = match IndexTensor::build(&g.base, &inst.ground, cmd.tensor_cap as u128) {
            Ok(t) => Some(best_of(3, || tensor_infer(&x0, &t, &wts, params.gamma, params.steps).map(|_| ()).map_err(Into::into))?),
            Err(_) => None,
        };
        w.write_record([
            n.to_string(),
            g.n_atoms().to_string(),
            g.n_conj().to_string(),
            m.graph_units.to_string(),
            m.tensor_units.to_string(),
            m.ratio.to_string(),
            format!("{graph_ms:.4}"),
            tensor_ms.map_or(String::new(), |t| format!("{t:.4}")),
        ])?;
        println!("n={n}: graph {} units in {graph_ms:.3} ms, tensor {} units", m.graph_units, m.tensor_units);
        units.push((n as f64, m.graph_units as f64));
        tensor.push((n as f64, m.tensor_units as f64));
        times.push((n as f64, graph_ms.max(1e-6)));
    }
    w.flush()?;
    let slope = |p: &[(f64, f64)]| if p.len() >= 2 { json!(log_log_slope(p)) } else { json!(null) };
    let slopes = json!({
        "graph_units": slope(&units),
        "tensor_units": slope(&tensor),
        "graph_ms": slope(&times),
    });
    run.write_json("slopes.json", &slopes)?;
    Ok(())
}

pub fn gen_data(cmd: &GenDataCmd, run: &mut Run) -> Result<()> {
    let list = match cmd.task {
        DataTask::EvenOdd | DataTask::Cyclic => {
            let s = gen_classic(if cmd.task == DataTask::EvenOdd { ClassicTask::EvenOdd } else { ClassicTask::CyclicGraph })?;
            run.write("language.txt", s.language_text)?;
            run.write("program.txt", s.program_text)?;
            run.write("facts.txt", s.facts_text)?;
            return Ok(());
        }
        DataTask::Bts => return gen_bts(cmd.n, run),
        DataTask::Member => ListTask::Member,
        DataTask::Delete => ListTask::Delete,
        DataTask::Sort => ListTask::Sort,
    };
    if cmd.n == 0 {
        bail!("--n: must be at least 1");
    }
    let lang: Language = list_language();
    let train = gen_list_task(list, cmd.n, cmd.n, run.seed)?;
    let test = gen_list_task(list, cmd.n.div_ceil(2), cmd.n.div_ceil(2), run.seed + 1000)?;
    run.write("language.txt", LIST_LANGUAGE)?;
    run.write("modes.txt", &modes_to_text(&list_modes(list, &lang)?))?;
    let all = |p: &IlpProblem| -> Vec<Example> { p.positives.iter().chain(&p.negatives).cloned().collect() };
    run.write("train.examples", &examples_to_text(&all(&train)))?;
    run.write("test.examples", &examples_to_text(&all(&test)))?;
    run.write("reference.txt", list.reference_program())?;
    if !train.background_clauses.is_empty() {
        run.write("background.txt", &program_to_text(&train.background_clauses))?;
    }
    if !train.background_facts.is_empty() {
        run.write("facts.txt", &facts_to_text(&train.background_facts))?;
    }
    Ok(())
}

fn gen_bts(n: usize, run: &mut Run) -> Result<()> {
    if n == 0 {
        bail!("--n: must be at least 1");
    }
    run.write("language.txt", BTS_LANGUAGE)?;
    run.write("program.txt", BTS_PROGRAM)?;
    run.write("background.txt", &bts_background_text())?;
    let data = gen_behind_scenes(n, run.seed);
    let mut w = run.csv("queries.csv")?;
    w.write_record(["id", "op", "color", "position", "objects", "answer"])?;
    let mut examples = String::new();
    for (i, d) in data.iter().enumerate() {
        let rel = format!("scenes/{i:05}.facts");
        run.write(&rel, &d.facts_text())?;
        examples += &format!("pos {} @ {rel}\n", d.answer_text());
        w.write_record([
            i.to_string(),
            d.query.op.name().to_string(),
            d.query.color.map_or(String::new(), |c| c.to_string()),
            d.query.position.to_string(),
            d.scene.objects.len().to_string(),
            d.answer.to_string(),
        ])?;
    }
    w.flush()?;
    run.write("examples.txt", &examples)?;
    println!("{} queries", data.len());
    Ok(())
}
