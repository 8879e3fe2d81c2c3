//! Behind-the-Scenes: scenes of up to three objects, queries about the scene
//! after a list operation, and a fixed program that answers them.

use rand::seq::{IndexedRandom, SliceRandom};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::lists::{self, Color};
use crate::graph::{GraphError, ReasoningGraph};
use crate::ground::{ground_clauses, GroundError, GroundingParams, HerbrandBase};
use crate::lang::{parse_atom, parse_facts, parse_language, parse_program, Atom, Clause, LangError, Language};
use crate::reason::{DeltaReasoner, DeltaScratch};
use crate::reason::{initial_valuation, Exec, ReasonError, ReasonerParams};

#[derive(Debug, Error)]
pub enum TaskError {
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Reason(#[from] ReasonError),
    #[error("invalid query input: {0}")]
    Query(String),
}

/// Message-passing rounds used for query answering. Sorting a three-element
/// list needs five rounds of derivations before the answer clause can fire.
pub const BTS_STEPS: usize = 8;

pub const SHAPES: [&str; 3] = ["sphere", "cube", "cylinder"];
pub const MATERIALS: [&str; 2] = ["metal", "matte"];
pub const POSITIONS: [&str; 3] = ["1st", "2nd", "3rd"];
const OBJECT_IDS: [&str; 3] = ["obj1", "obj2", "obj3"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Object {
    pub id: &'static str,
    pub color: Color,
    pub shape: &'static str,
    pub material: &'static str,
}

/// Objects ordered left to right. 1 to 3 objects, no repeated colour.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scene {
    pub objects: Vec<Object>,
}

impl Scene {
    pub fn colors(&self) -> Vec<Color> {
        self.objects.iter().map(|o| o.color).collect()
    }

    pub fn is_valid(&self) -> bool {
        let c = self.colors();
        (1..=3).contains(&c.len()) && c.iter().enumerate().all(|(i, x)| !c[..i].contains(x))
    }

    /// `left_of` holds between horizontally adjacent objects only, and the
    /// two ends are marked with `leftmost`/`rightmost`.
    pub fn facts_text(&self) -> String {
        let mut s = String::new();
        let n = self.objects.len();
        for w in self.objects.windows(2) {
            s.push_str(&format!("1.0 : left_of({},{}).\n", w[0].id, w[1].id));
        }
        s.push_str(&format!("1.0 : leftmost({}).\n", self.objects[0].id));
        s.push_str(&format!("1.0 : rightmost({}).\n", self.objects[n - 1].id));
        for o in &self.objects {
            s.push_str(&format!("1.0 : color({},{}).\n", o.id, o.color));
            s.push_str(&format!("1.0 : shape({},{}).\n", o.id, o.shape));
            s.push_str(&format!("1.0 : material({},{}).\n", o.id, o.material));
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QueryOp {
    Delete,
    Append,
    Reverse,
    Sort,
}

impl QueryOp {
    pub const ALL: [QueryOp; 4] = [QueryOp::Delete, QueryOp::Append, QueryOp::Reverse, QueryOp::Sort];

    pub fn name(self) -> &'static str {
        match self {
            QueryOp::Delete => "delete",
            QueryOp::Append => "append",
            QueryOp::Reverse => "reverse",
            QueryOp::Sort => "sort",
        }
    }

    pub fn from_name(s: &str) -> Option<QueryOp> {
        QueryOp::ALL.into_iter().find(|o| o.name() == s)
    }

    fn takes_color(self) -> bool {
        matches!(self, QueryOp::Delete | QueryOp::Append)
    }

    /// Whether some query of this kind is well posed on a scene of `n` objects.
    fn fits(self, n: usize) -> bool {
        match self {
            QueryOp::Delete => n >= 2,
            QueryOp::Append => n <= 2,
            QueryOp::Reverse | QueryOp::Sort => true,
        }
    }
}

/// "What is the colour of the object at `position` after `op`?"
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Query {
    pub op: QueryOp,
    pub color: Option<Color>,
    /// 1-based, counted from the left.
    pub position: usize,
}

impl Query {
    pub fn atom_text(&self) -> String {
        let pos = POSITIONS[self.position - 1];
        match self.color {
            Some(c) => format!("query3(q_{},{c},{pos})", self.op.name()),
            None => format!("query2(q_{},{pos})", self.op.name()),
        }
    }

    /// Ground-truth answer from the list oracle.
    pub fn answer(&self, scene: &Scene) -> Option<Color> {
        let colors = scene.colors();
        let after = match self.op {
            QueryOp::Delete => lists::delete(self.color?, &colors).ok()?,
            QueryOp::Append => {
                let c = self.color?;
                if colors.contains(&c) {
                    return None;
                }
                lists::append(c, &colors)
            }
            QueryOp::Reverse => lists::reverse(&colors),
            QueryOp::Sort => lists::sort(&colors),
        };
        after.get(self.position.checked_sub(1)?).copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BtsInstance {
    pub scene: Scene,
    pub query: Query,
    pub answer: Color,
}

impl BtsInstance {
    pub fn answer_text(&self) -> String {
        format!("answer({})", self.answer)
    }

    /// Scene facts plus the query atom at probability 1.
    pub fn facts_text(&self) -> String {
        format!("{}1.0 : {}.\n", self.scene.facts_text(), self.query.atom_text())
    }
}

fn sample_scene(n: usize, rng: &mut ChaCha8Rng) -> Scene {
    let mut colors = Color::ALL.to_vec();
    colors.shuffle(rng);
    let mut ids = OBJECT_IDS.to_vec();
    ids.shuffle(rng);
    let objects = (0..n)
        .map(|i| Object {
            id: ids[i],
            color: colors[i],
            shape: SHAPES.choose(rng).copied().unwrap_or("sphere"),
            material: MATERIALS.choose(rng).copied().unwrap_or("metal"),
        })
        .collect();
    Scene { objects }
}

/// `n_per_op` instances for each of delete, append, reverse and sort, in that
/// order.
///
/// Per instance the object count is uniform over the counts the operation
/// admits (delete needs two objects, append at most two); colours are drawn
/// without replacement and shapes and materials uniformly. The query is then
/// uniform over its valid (colour, position) pairs: delete removes a colour
/// present in the scene, append adds an absent one, and the position exists
/// in the resulting list.
pub fn gen_behind_scenes(n_per_op: usize, seed: u64) -> Vec<BtsInstance> {
    let mut out = Vec::with_capacity(4 * n_per_op);
    for op in QueryOp::ALL {
        let mut rng = crate::rng::stream(seed, &format!("behind-the-scenes/{}", op.name()));
        let counts: Vec<usize> = (1..=3).filter(|&n| op.fits(n)).collect();
        for _ in 0..n_per_op {
            let n = *counts.choose(&mut rng).expect("every operation admits some size");
            let scene = sample_scene(n, &mut rng);
            let colors = scene.colors();
            let choices: Vec<Option<Color>> = match op {
                QueryOp::Delete => colors.iter().map(|&c| Some(c)).collect(),
                QueryOp::Append => Color::ALL.into_iter().filter(|c| !colors.contains(c)).map(Some).collect(),
                _ => vec![None],
            };
            let mut valid = Vec::new();
            for &color in &choices {
                let len = match op {
                    QueryOp::Delete => n - 1,
                    QueryOp::Append => n + 1,
                    _ => n,
                };
                for position in 1..=len {
                    valid.push(Query { op, color, position });
                }
            }
            let query = *valid.choose(&mut rng).expect("valid queries exist");
            debug_assert_eq!(query.color.is_some(), op.takes_color());
            let answer = query.answer(&scene).expect("generated queries are answerable");
            out.push(BtsInstance { scene, query, answer });
        }
    }
    out
}

pub const BTS_LANGUAGE: &str = "\
pred left_of/2 : object,object
pred leftmost/1 : object
pred rightmost/1 : object
pred color/2 : object,color
pred shape/2 : object,shape
pred material/2 : object,material
pred chain/1 : objects
pred scene/1 : colors
pred query2/2 : qtype,position
pred query3/3 : qtype,color,position
pred answer/1 : color
pred get_color/3 : colors,position,color
pred same_position/2 : position,position
pred first_obj/2 : colors,color
pred second_obj/2 : colors,color
pred third_obj/2 : colors,color
pred delete/3 : color,colors,colors
pred append/3 : colors,colors,colors
pred reverse/3 : colors,colors,colors
pred permutation/2 : colors,colors
pred smaller/2 : color,color
pred is_sorted/1 : colors
pred sort/2 : colors,colors
const object : obj1,obj2,obj3
const color : cyan,gray,red,yellow
const shape : sphere,cube,cylinder
const material : metal,matte
const position : 1st,2nd,3rd
const qtype : q_delete,q_append,q_reverse,q_sort
list objects : object
list colors : color
";

pub const BTS_PROGRAM: &str = "\
chain([X]):-leftmost(X),rightmost(X).
chain([X,Y]):-leftmost(X),left_of(X,Y),rightmost(Y).
chain([X,Y,Z]):-left_of(X,Y),left_of(Y,Z).
scene([C1]):-chain([O1]),color(O1,C1).
scene([C1,C2]):-chain([O1,O2]),color(O1,C1),color(O2,C2).
scene([C1,C2,C3]):-chain([O1,O2,O3]),color(O1,C1),color(O2,C2),color(O3,C3).
answer(X):-scene(L1),delete(C,L1,L2),query3(q_delete,C,P),get_color(L2,P,X).
answer(X):-scene(L1),append([C],L1,L2),query3(q_append,C,P),get_color(L2,P,X).
answer(X):-scene(L1),reverse(L1,[],L2),query2(q_reverse,P),get_color(L2,P,X).
answer(X):-scene(L1),sort(L1,L2),query2(q_sort,P),get_color(L2,P,X).
get_color(L,P,X):-first_obj(L,X),same_position(P,1st).
get_color(L,P,X):-second_obj(L,X),same_position(P,2nd).
get_color(L,P,X):-third_obj(L,X),same_position(P,3rd).
first_obj([X|Y],X):-.
second_obj([Y,X|Z],X):-.
third_obj([Y,Z,X|W],X):-.
delete(X,[X|Y],Y):-.
delete(X,[Y|Z],[Y|V]):-delete(X,Z,V).
append([],X,X):-.
append([X|Y],Z,[X|V]):-append(Y,Z,V).
reverse([H|T],A,R):-reverse(T,[H|A],R).
reverse([],A,A):-.
permutation([],[]):-.
permutation([X|Y],Z):-permutation(Y,V),delete(X,Z,V).
is_sorted([X,Y|Z]):-smaller(X,Y),is_sorted([Y|Z]).
is_sorted([X]):-.
sort(X,Y):-permutation(X,Y),is_sorted(Y).
";

pub fn bts_language() -> Language {
    parse_language(BTS_LANGUAGE).expect("built-in language parses")
}

pub fn bts_program(lang: &Language) -> Result<Vec<Clause>, LangError> {
    parse_program(BTS_PROGRAM, lang)
}

/// Colour order and position identity, shared by all instances.
pub fn bts_background_text() -> String {
    let mut s = String::new();
    for a in Color::ALL {
        for b in Color::ALL {
            if a < b {
                s.push_str(&format!("1.0 : smaller({a},{b}).\n"));
            }
        }
    }
    for p in POSITIONS {
        s.push_str(&format!("1.0 : same_position({p},{p}).\n"));
    }
    s
}

pub fn bts_facts(instance: &BtsInstance, lang: &Language) -> Result<Vec<(f64, Atom)>, LangError> {
    parse_facts(&instance.facts_text(), lang)
}

/// Every atom an instance may set: scene attributes for any object and all queries.
fn input_atoms_text() -> Vec<String> {
    let mut v = Vec::new();
    for a in OBJECT_IDS {
        v.push(format!("leftmost({a})"));
        v.push(format!("rightmost({a})"));
        for b in OBJECT_IDS {
            v.push(format!("left_of({a},{b})"));
        }
        for c in Color::ALL {
            v.push(format!("color({a},{c})"));
        }
        for s in SHAPES {
            v.push(format!("shape({a},{s})"));
        }
        for m in MATERIALS {
            v.push(format!("material({a},{m})"));
        }
    }
    for op in QueryOp::ALL {
        for p in POSITIONS {
            if op.takes_color() {
                for c in Color::ALL {
                    v.push(format!("query3(q_{},{c},{p})", op.name()));
                }
            } else {
                v.push(format!("query2(q_{},{p})", op.name()));
            }
        }
    }
    v
}

/// The grounded query-answering program with its background valuation.
pub struct BtsModel {
    pub language: Language,
    pub program: Vec<Clause>,
    pub graph: ReasoningGraph,
    pub base_x0: Vec<f64>,
    pub params: ReasonerParams,
    answers: Vec<(Color, usize)>,
}

impl BtsModel {
    pub fn new(gamma: f64, steps: usize, exec: Exec) -> Result<BtsModel, TaskError> {
        let language = bts_language();
        let program = bts_program(&language)?;
        let ground = ground_clauses(&program, &language, &GroundingParams::default())?;
        let background = parse_facts(&bts_background_text(), &language)?;
        let mut extra: Vec<Atom> = background.iter().map(|(_, a)| a.clone()).collect();
        for t in input_atoms_text() {
            extra.push(parse_atom(&t, &language)?);
        }
        for c in Color::ALL {
            extra.push(parse_atom(&format!("answer({c})"), &language)?);
        }
        let base = HerbrandBase::from_ground(&ground, &extra)?;
        let graph = ReasoningGraph::build(program.len(), base, &ground)?;
        let mut base_x0 = initial_valuation(&graph);
        for (p, a) in &background {
            let i = graph.base.index_of(a).expect("background atoms are in the base");
            base_x0[i] = *p;
        }
        let answers = Color::ALL
            .into_iter()
            .map(|c| {
                let a = parse_atom(&format!("answer({c})"), &language).expect("answer atom parses");
                (c, graph.base.index_of(&a).expect("answer atoms are in the base"))
            })
            .collect();
        Ok(BtsModel { language, program, graph, base_x0, params: ReasonerParams { gamma, steps, exec }, answers })
    }

    pub fn with_defaults() -> Result<BtsModel, TaskError> {
        BtsModel::new(0.01, BTS_STEPS, Exec::default())
    }

    /// Runs the shared base inference once; queries are then answered incrementally.
    pub fn solver(&self) -> Result<BtsSolver<'_>, TaskError> {
        let weights: Vec<f64> = self.program.iter().map(|c| c.weight).collect();
        let delta = DeltaReasoner::new(&self.graph, &weights, &self.base_x0, &self.params)?;
        Ok(BtsSolver { model: self, delta })
    }
}

pub struct BtsSolver<'m> {
    model: &'m BtsModel,
    delta: DeltaReasoner<'m>,
}

fn is_query(a: &Atom) -> bool {
    matches!(&*a.pred, "query2" | "query3")
}

impl<'m> BtsSolver<'m> {
    pub fn scratch(&self) -> DeltaScratch {
        self.delta.scratch()
    }

    /// Probability of `answer(c)` for each colour.
    pub fn answer_probabilities(&self, s: &mut DeltaScratch, facts: &[(f64, Atom)]) -> Result<Vec<(Color, f64)>, TaskError> {
        let queries: Vec<&(f64, Atom)> = facts.iter().filter(|(_, a)| is_query(a)).collect();
        if queries.len() != 1 || queries[0].0 != 1.0 {
            return Err(TaskError::Query(format!("expected exactly one query atom at probability 1, found {}", queries.len())));
        }
        let base = &self.model.graph.base;
        let mut changes = Vec::with_capacity(facts.len());
        for (p, a) in facts {
            let i = base.index_of(a).ok_or_else(|| TaskError::Query(format!("atom `{a}` is not in the base")))?;
            changes.push((i, *p));
        }
        let run = self.delta.run_in(s, &changes)?;
        Ok(self.model.answers.iter().map(|&(c, i)| (c, self.delta.value(&run, i))).collect())
    }

    /// The most probable answer colour, or `None` (abstain) when no answer exceeds 0.5.
    pub fn answer(&self, s: &mut DeltaScratch, facts: &[(f64, Atom)]) -> Result<Option<Color>, TaskError> {
        let probs = self.answer_probabilities(s, facts)?;
        let (c, p) = probs.into_iter().fold((Color::Cyan, f64::NEG_INFINITY), |b, x| if x.1 > b.1 { x } else { b });
        Ok((p > 0.5).then_some(c))
    }

    /// Answers every instance; parallel over instances when the engine runs in parallel.
    pub fn answer_batch(&self, instances: &[BtsInstance]) -> Vec<Result<Option<Color>, TaskError>> {
        let lang = &self.model.language;
        let one = |s: &mut DeltaScratch, inst: &BtsInstance| -> Result<Option<Color>, TaskError> {
            let facts = bts_facts(inst, lang)?;
            self.answer(s, &facts)
        };
        #[cfg(feature = "parallel")]
        if self.model.params.exec == Exec::Parallel {
            use rayon::prelude::*;
            return instances.par_iter().map_init(|| self.scratch(), |s, inst| one(s, inst)).collect();
        }
        let mut s = self.scratch();
        instances.iter().map(|inst| one(&mut s, inst)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Color::*;

    fn scene(colors: &[Color]) -> Scene {
        Scene {
            objects: colors
                .iter()
                .enumerate()
                .map(|(i, &c)| Object { id: OBJECT_IDS[i], color: c, shape: "cube", material: "metal" })
                .collect(),
        }
    }

    #[test]
    fn oracle_answers() {
        let s = scene(&[Red, Gray, Cyan]);
        let q = |op, color, position| Query { op, color, position };
        assert_eq!(q(QueryOp::Delete, Some(Gray), 2).answer(&s), Some(Cyan));
        assert_eq!(q(QueryOp::Reverse, None, 1).answer(&s), Some(Cyan));
        assert_eq!(q(QueryOp::Sort, None, 1).answer(&s), Some(Cyan));
        assert_eq!(q(QueryOp::Append, Some(Red), 1).answer(&scene(&[Gray, Cyan])), Some(Red));
        assert_eq!(q(QueryOp::Reverse, None, 1).answer(&scene(&[Red])), Some(Red));
        assert_eq!(q(QueryOp::Delete, Some(Gray), 2).atom_text(), "query3(q_delete,gray,2nd)");
    }

    #[test]
    fn generator_invariants() {
        let a = gen_behind_scenes(50, 1);
        assert_eq!(a, gen_behind_scenes(50, 1));
        assert_eq!(a.len(), 200);
        for inst in &a {
            assert!(inst.scene.is_valid());
            assert_eq!(inst.query.answer(&inst.scene), Some(inst.answer));
        }
        for (k, op) in QueryOp::ALL.into_iter().enumerate() {
            assert!(a[k * 50..(k + 1) * 50].iter().all(|i| i.query.op == op));
        }
        let lang = bts_language();
        assert!(bts_facts(&a[0], &lang).is_ok());
    }
}
