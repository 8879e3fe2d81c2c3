//! Task generators and symbolic ground truth: the classic reasoning
//! programs, list-operation induction, and Behind-the-Scenes queries.

mod lists;
mod scenes;

pub use lists::{gen_list_task, list_language, list_modes, Color, ListOp, ListOracleError, ListTask, LIST_LANGUAGE};
pub use scenes::{
    bts_background_text, bts_facts, bts_language, bts_program, gen_behind_scenes, BtsInstance, BtsModel, BtsSolver, Object, Query, QueryOp,
    Scene, TaskError, BTS_LANGUAGE, BTS_PROGRAM, BTS_STEPS,
};

use crate::lang::{parse_facts, parse_language, parse_program, Atom, Clause, Language, LangError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassicTask {
    EvenOdd,
    CyclicGraph,
}

/// A fixed program with its background facts.
#[derive(Clone, Debug)]
pub struct ClassicSetup {
    pub language: Language,
    pub program: Vec<Clause>,
    pub facts: Vec<(f64, Atom)>,
    pub language_text: &'static str,
    pub program_text: &'static str,
    pub facts_text: &'static str,
}

pub const EVEN_ODD_LANGUAGE: &str = "pred even/1 : nat\nconst nat : 0\nfunc s/1 : nat -> nat\n";
pub const EVEN_ODD_PROGRAM: &str = "1.0: even(s(s(X))):-even(X).\n";
pub const EVEN_ODD_FACTS: &str = "1.0 : even(0).\n";

pub const CYCLIC_LANGUAGE: &str = "pred edge/2 : node,node\npred cyclic/1 : node\nconst node : a,b,c,d,e,f\n";
pub const CYCLIC_PROGRAM: &str = "0.51: cyclic(X):-edge(X,X).\n0.54: edge(X,Y):-edge(X,Z),edge(Z,Y).\n";
pub const CYCLIC_FACTS: &str = "\
1.0 : edge(a,b).
1.0 : edge(b,c).
1.0 : edge(b,d).
1.0 : edge(c,a).
1.0 : edge(d,e).
1.0 : edge(d,f).
1.0 : edge(e,f).
1.0 : edge(f,e).
";

pub fn gen_classic(task: ClassicTask) -> Result<ClassicSetup, LangError> {
    let (language_text, program_text, facts_text) = match task {
        ClassicTask::EvenOdd => (EVEN_ODD_LANGUAGE, EVEN_ODD_PROGRAM, EVEN_ODD_FACTS),
        ClassicTask::CyclicGraph => (CYCLIC_LANGUAGE, CYCLIC_PROGRAM, CYCLIC_FACTS),
    };
    let language = parse_language(language_text)?;
    let program = parse_program(program_text, &language)?;
    let facts = parse_facts(facts_text, &language)?;
    Ok(ClassicSetup { language, program, facts, language_text, program_text, facts_text })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_shapes() {
        let e = gen_classic(ClassicTask::EvenOdd).unwrap();
        assert_eq!((e.program.len(), e.facts.len()), (1, 1));
        let c = gen_classic(ClassicTask::CyclicGraph).unwrap();
        assert_eq!((c.program.len(), c.facts.len()), (2, 8));
        assert_eq!(c.program[0].weight, 0.51);
        assert_eq!(c.program[1].weight, 0.54);
        let again = gen_classic(ClassicTask::CyclicGraph).unwrap();
        assert_eq!(crate::lang::program_to_text(&c.program), crate::lang::program_to_text(&again.program));
    }
}
