use std::time::Instant;

use reasongraph::tasks::{bts_facts, gen_behind_scenes, BtsModel};

#[test]
fn answers_match_oracle_on_small_batch() {
    let t = Instant::now();
    let model = BtsModel::with_defaults().unwrap();
    eprintln!("model: {} atoms, {} conj, {:?}", model.graph.n_atoms(), model.graph.n_conj(), t.elapsed());
    let solver = model.solver().unwrap();
    eprintln!("base run {:?}", t.elapsed());
    let data = gen_behind_scenes(25, 7);
    let mut s = solver.scratch();
    for inst in &data {
        let facts = bts_facts(inst, &model.language).unwrap();
        let probs = solver.answer_probabilities(&mut s, &facts).unwrap();
        let got = solver.answer(&mut s, &facts).unwrap();
        assert_eq!(got, Some(inst.answer), "{:?} {:?} {probs:?}", inst.scene.colors(), inst.query);
    }
    eprintln!("done {:?}", t.elapsed());
}

#[test]
#[ignore]
fn timing_full_batch() {
    let model = BtsModel::with_defaults().unwrap();
    let solver = model.solver().unwrap();
    let data = gen_behind_scenes(1000, 0);
    let t = Instant::now();
    let res = solver.answer_batch(&data);
    let ok = res.iter().zip(&data).filter(|(r, d)| r.as_ref().ok() == Some(&Some(d.answer))).count();
    eprintln!("{ok}/{} in {:?}", data.len(), t.elapsed());
}
