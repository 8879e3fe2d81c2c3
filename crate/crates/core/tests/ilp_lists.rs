use reasongraph::ilp::{evaluate_program, optimise_weights, score_clauses, train, Evaluator, LearnParams};
use reasongraph::lang::{parse_program, theta_equivalent, Example};
use reasongraph::rng::stream;
use reasongraph::tasks::{gen_list_task, ListTask};

/// `member(X,L)` examples whose X is the head of L.
fn head_member(e: &Example) -> bool {
    let s = e.target.to_string();
    let inner = &s["member(".len()..];
    let (x, rest) = inner.split_once(',').unwrap();
    let first = rest.trim_start_matches('[').split([',', ']']).next().unwrap();
    x == first
}

fn head_only_problem() -> reasongraph::ilp::IlpProblem {
    let mut pr = gen_list_task(ListTask::Member, 60, 60, 3).unwrap();
    pr.positives.retain(head_member);
    assert!(!pr.positives.is_empty());
    pr
}

#[test]
fn clause_covering_positives_scores_higher() {
    let pr = head_only_problem();
    let cands = parse_program("member(X,[X|N1]):-.\nmember(X,[N0,X|N3]):-.\n", &pr.language).unwrap();
    let params = LearnParams { batch_size: 10_000, score_context: false, ..LearnParams::default() };
    let s = score_clauses(&pr, &[], &cands, &params, 1.0, &mut stream(0, "t")).unwrap();
    assert!(s[0] > s[1], "{s:?}");

    // One batch over every example: the score is −∂L/∂w.
    let ex: Vec<&Example> = pr.positives.iter().chain(&pr.negatives).collect();
    let ev = Evaluator::new(&cands, &[], &[], &ex, &pr.language, &params.grounding, params.reasoner()).unwrap();
    let coeffs = vec![1.0 / ex.len() as f64; ex.len()];
    let h = 1e-5;
    for i in 0..2 {
        let mut wp = vec![params.score_weight; 2];
        let mut wm = wp.clone();
        wp[i] += h;
        wm[i] -= h;
        let fd = (ev.loss_and_grad(&wp, &coeffs).unwrap().0 - ev.loss_and_grad(&wm, &coeffs).unwrap().0) / (2.0 * h);
        assert!((-fd - s[i]).abs() <= 1e-4 * s[i].abs().max(1.0), "clause {i}: {} vs {}", -fd, s[i]);
    }
}

#[test]
fn weight_learning_picks_the_entailing_clause() {
    let pr = head_only_problem();
    let cands = parse_program("member(X,[N0,X|N3]):-.\nmember(X,[X|N1]):-.\nmember(X,[N0]):-.\n", &pr.language).unwrap();
    let params = LearnParams { program_size: 1, ..LearnParams::default() };
    let r = optimise_weights(&pr, cands.clone(), &params).unwrap();
    assert_eq!(r.program.len(), 1);
    assert!(theta_equivalent(&r.program[0], &cands[1]), "{}", r.program[0]);
    let last = r.history.last().unwrap();
    assert_eq!(last.accuracy, 1.0);
    assert!(last.loss < r.history[0].loss);
    assert!(r.w_star.iter().all(|w| (0.0..=1.0).contains(w)));
}

#[test]
fn train_is_reproducible_and_well_formed() {
    let pr = gen_list_task(ListTask::Member, 40, 40, 5).unwrap();
    let params = LearnParams { n_trial: 2, n_sample: 4, epochs: 3, seed: 9, ..LearnParams::default() };
    let a = train(&pr, &pr.initial_clauses(), &params).unwrap();
    let b = train(&pr, &pr.initial_clauses(), &params).unwrap();
    assert_eq!(a.trials.len(), 2);
    assert_eq!(a.history.len(), 3);
    assert!(a.program.len() <= params.program_size && !a.program.is_empty());
    assert!(theta_equivalent(&a.clauses[0], &pr.initial_clauses()[0]));
    assert_eq!(a.raw_weights, b.raw_weights);
    assert_eq!(a.trials, b.trials);
    for t in &a.trials {
        assert!(!t.sampled.is_empty() && t.sampled.len() <= params.n_sample);
    }
}

#[test]
fn reference_programs_are_perfect() {
    for task in [ListTask::Member, ListTask::Delete] {
        let pr = gen_list_task(task, 100, 100, 11).unwrap();
        let prog = parse_program(task.reference_program(), &pr.language).unwrap();
        let ex: Vec<Example> = pr.positives.iter().chain(&pr.negatives).cloned().collect();
        assert_eq!(evaluate_program(&prog, &pr, &ex, &LearnParams::default()).unwrap(), 1.0, "{}", task.name());
    }
}
