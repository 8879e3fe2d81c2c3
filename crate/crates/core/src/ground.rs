//! Typed Herbrand grounding with bounded functor depth.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::lang::{Atom, Clause, Language, Symbol, Term};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroundError {
    #[error("datatype `{0}` has no ground terms")]
    EmptyDatatype(String),
    #[error("fact `{0}` is not ground")]
    NonGroundFact(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroundingParams {
    pub max_depth: usize,
    /// Discard lists that repeat an element.
    pub dedup_list_elements: bool,
}

impl Default for GroundingParams {
    fn default() -> Self {
        GroundingParams { max_depth: 3, dedup_list_elements: true }
    }
}

impl GroundingParams {
    pub fn admits(&self, atom: &Atom) -> bool {
        atom.depth() <= self.max_depth && !(self.dedup_list_elements && atom.has_duplicate_list_elements())
    }
}

/// All ground terms per datatype, ordered by depth and then by printed form.
#[derive(Clone, Debug)]
pub struct Universe {
    by_type: BTreeMap<Symbol, Vec<Term>>,
}

impl Universe {
    pub fn build(lang: &Language, params: &GroundingParams) -> Universe {
        // (term, depth) per datatype, grown level by level.
        let mut levels: BTreeMap<Symbol, Vec<(Term, usize)>> = BTreeMap::new();
        for dt in lang.dtypes() {
            let mut v: Vec<(Term, usize)> = lang
                .constants_of(dt)
                .iter()
                .map(|c| (Term::Const { name: c.clone(), dtype: dt.clone() }, 0))
                .collect();
            for f in lang.functors_returning(dt).filter(|f| f.arg_types.is_empty()) {
                v.push((Term::App { functor: f.name.clone(), args: Vec::new(), dtype: dt.clone() }, 0));
            }
            levels.insert(dt.clone(), v);
        }
        for d in 1..=params.max_depth {
            let mut fresh: Vec<(Symbol, Term)> = Vec::new();
            for f in lang.functors().iter().filter(|f| !f.arg_types.is_empty()) {
                let domains: Vec<&Vec<(Term, usize)>> =
                    f.arg_types.iter().map(|t| &levels[t]).collect();
                if domains.iter().any(|d| d.is_empty()) {
                    continue;
                }
                let mut idx = vec![0usize; domains.len()];
                'outer: loop {
                    let maxd = idx.iter().zip(&domains).map(|(&i, d)| d[i].1).max().unwrap_or(0);
                    if maxd + 1 == d {
                        let args: Vec<Term> = idx.iter().zip(&domains).map(|(&i, d)| d[i].0.clone()).collect();
                        let t = Term::App { functor: f.name.clone(), args, dtype: f.result.clone() };
                        if !(params.dedup_list_elements && t.has_duplicate_list_elements()) {
                            fresh.push((f.result.clone(), t));
                        }
                    }
                    for k in (0..idx.len()).rev() {
                        idx[k] += 1;
                        if idx[k] < domains[k].len() {
                            continue 'outer;
                        }
                        idx[k] = 0;
                    }
                    break;
                }
            }
            for (dt, t) in fresh {
                levels.get_mut(&dt).expect("declared datatype").push((t, d));
            }
        }
        let by_type = levels
            .into_iter()
            .map(|(dt, mut v)| {
                let mut keyed: Vec<(usize, String, Term)> =
                    v.drain(..).map(|(t, d)| (d, t.to_string(), t)).collect();
                keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
                (dt, keyed.into_iter().map(|(_, _, t)| t).collect())
            })
            .collect();
        Universe { by_type }
    }

    pub fn terms(&self, dtype: &str) -> &[Term] {
        self.by_type.get(dtype).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Ground terms of `dtype` up to the depth bound, depth-major then lexicographic.
pub fn enumerate_ground_terms(lang: &Language, dtype: &str, params: &GroundingParams) -> Result<Vec<Term>, GroundError> {
    let u = Universe::build(lang, params);
    let t = u.terms(dtype);
    if t.is_empty() {
        return Err(GroundError::EmptyDatatype(dtype.to_string()));
    }
    Ok(t.to_vec())
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundClause {
    /// Index of the source clause in the program.
    pub clause: usize,
    pub head: Atom,
    pub body: Vec<Atom>,
}

/// Term with variables replaced by slot indices, for fast instantiation.
enum Template {
    Fixed(Term),
    Slot(usize),
    App(Symbol, Symbol, Vec<Template>),
}

impl Template {
    fn compile(t: &Term, slots: &HashMap<Symbol, usize>) -> Template {
        match t {
            Term::Var { name, .. } => Template::Slot(slots[name]),
            Term::App { functor, args, dtype } if !t.is_ground() => Template::App(
                functor.clone(),
                dtype.clone(),
                args.iter().map(|a| Template::compile(a, slots)).collect(),
            ),
            _ => Template::Fixed(t.clone()),
        }
    }

    fn instantiate(&self, vals: &[&Term]) -> Term {
        match self {
            Template::Fixed(t) => t.clone(),
            Template::Slot(i) => vals[*i].clone(),
            Template::App(f, dt, args) => Term::App {
                functor: f.clone(),
                args: args.iter().map(|a| a.instantiate(vals)).collect(),
                dtype: dt.clone(),
            },
        }
    }
}

struct AtomTemplate {
    pred: Symbol,
    args: Vec<Template>,
    /// Highest slot index used; the atom is fully bound once that slot is.
    last_slot: Option<usize>,
}

impl AtomTemplate {
    fn instantiate(&self, vals: &[&Term]) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(|a| a.instantiate(vals)).collect() }
    }
}

struct ClauseGrounder<'a> {
    clause: usize,
    domains: Vec<&'a [Term]>,
    head: AtomTemplate,
    body: Vec<AtomTemplate>,
    params: GroundingParams,
}

impl<'a> ClauseGrounder<'a> {
    fn new(index: usize, c: &Clause, universe: &'a Universe, params: &GroundingParams) -> Result<Self, GroundError> {
        let vars = c.vars();
        let mut slots = HashMap::new();
        let mut domains = Vec::new();
        for (i, v) in vars.iter().enumerate() {
            if let Term::Var { name, dtype } = v {
                slots.insert(name.clone(), i);
                let d = universe.terms(dtype);
                if d.is_empty() {
                    return Err(GroundError::EmptyDatatype(dtype.to_string()));
                }
                domains.push(d);
            }
        }
        let compile = |a: &Atom| {
            let mut vs = Vec::new();
            a.collect_vars(&mut vs);
            let last_slot = vs
                .iter()
                .filter_map(|v| match v {
                    Term::Var { name, .. } => Some(slots[name]),
                    _ => None,
                })
                .max();
            AtomTemplate { pred: a.pred.clone(), args: a.args.iter().map(|t| Template::compile(t, &slots)).collect(), last_slot }
        };
        Ok(ClauseGrounder {
            clause: index,
            domains,
            head: compile(&c.head),
            body: c.body.iter().map(compile).collect(),
            params: *params,
        })
    }

    /// Enumerates assignments with the first variable fixed to `first` (if any).
    fn run(&self, first: Option<usize>, out: &mut Vec<GroundClause>) {
        let n = self.domains.len();
        let mut vals: Vec<&Term> = Vec::with_capacity(n);
        // Atoms that become fully bound at each depth of the search.
        let mut ready: Vec<Vec<usize>> = vec![Vec::new(); n.max(1)];
        let mut ground_now: Vec<usize> = Vec::new();
        let all: Vec<&AtomTemplate> = std::iter::once(&self.head).chain(self.body.iter()).collect();
        for (k, a) in all.iter().enumerate() {
            match a.last_slot {
                Some(s) => ready[s].push(k),
                None => ground_now.push(k),
            }
        }
        if ground_now.iter().any(|&k| !self.params.admits(&all[k].instantiate(&[]))) {
            return;
        }
        if n == 0 {
            out.push(GroundClause {
                clause: self.clause,
                head: self.head.instantiate(&[]),
                body: self.body.iter().map(|b| b.instantiate(&[])).collect(),
            });
            return;
        }
        self.search(0, first, &all, &ready, &mut vals, out);
    }

    fn search<'b>(
        &'b self,
        depth: usize,
        first: Option<usize>,
        all: &[&AtomTemplate],
        ready: &[Vec<usize>],
        vals: &mut Vec<&'b Term>,
        out: &mut Vec<GroundClause>,
    ) {
        let dom = self.domains[depth];
        let range = match (depth, first) {
            (0, Some(i)) => i..i + 1,
            _ => 0..dom.len(),
        };
        for i in range {
            vals.push(&dom[i]);
            let ok = ready[depth].iter().all(|&k| self.params.admits(&all[k].instantiate(vals)));
            if ok {
                if depth + 1 == self.domains.len() {
                    out.push(GroundClause {
                        clause: self.clause,
                        head: self.head.instantiate(vals),
                        body: self.body.iter().map(|b| b.instantiate(vals)).collect(),
                    });
                } else {
                    self.search(depth + 1, first, all, ready, vals, out);
                }
            }
            vals.pop();
        }
    }
}

/// Grounds every clause against the typed Herbrand universe.
///
/// Output order: by clause, then lexicographic in the variable assignment
/// (variables in first-occurrence order, domains in universe order).
/// Instances with an atom outside the base (too deep, or a list with a
/// repeated element when deduplication is on) are dropped.
pub fn ground_clauses(clauses: &[Clause], lang: &Language, params: &GroundingParams) -> Result<Vec<GroundClause>, GroundError> {
    let universe = Universe::build(lang, params);
    ground_with_universe(clauses, &universe, params)
}

pub fn ground_with_universe(
    clauses: &[Clause],
    universe: &Universe,
    params: &GroundingParams,
) -> Result<Vec<GroundClause>, GroundError> {
    let grounders = clauses
        .iter()
        .enumerate()
        .map(|(i, c)| ClauseGrounder::new(i, c, universe, params))
        .collect::<Result<Vec<_>, _>>()?;
    // Work units: one per value of each clause's first variable.
    let units: Vec<(usize, Option<usize>)> = grounders
        .iter()
        .enumerate()
        .flat_map(|(g, gr)| match gr.domains.first() {
            Some(d) => (0..d.len()).map(|i| (g, Some(i))).collect::<Vec<_>>(),
            None => vec![(g, None)],
        })
        .collect();
    let run = |&(g, first): &(usize, Option<usize>)| {
        let mut v = Vec::new();
        grounders[g].run(first, &mut v);
        v
    };
    #[cfg(feature = "parallel")]
    let parts: Vec<Vec<GroundClause>> = {
        use rayon::prelude::*;
        units.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Vec<GroundClause>> = units.iter().map(run).collect();
    Ok(parts.into_iter().flatten().collect())
}

/// Number of assignments before base filtering: the product of domain sizes.
pub fn substitution_count(clause: &Clause, universe: &Universe) -> u128 {
    clause
        .vars()
        .iter()
        .map(|v| universe.terms(v.dtype()).len() as u128)
        .product()
}

/// Ordered set of ground atoms. Index 0 is always ⊤.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HerbrandBase {
    atoms: Vec<Atom>,
    index: HashMap<Atom, usize>,
}

impl HerbrandBase {
    /// Collects ⊤, the extra atoms, and every atom of the ground clauses.
    /// Atoms other than ⊤ are sorted by predicate and then printed form.
    pub fn from_ground(ground: &[GroundClause], extra: &[Atom]) -> Result<HerbrandBase, GroundError> {
        let mut set: HashMap<Atom, ()> = HashMap::new();
        for a in extra {
            if !a.is_ground() {
                return Err(GroundError::NonGroundFact(a.to_string()));
            }
            set.insert(a.clone(), ());
        }
        for g in ground {
            set.insert(g.head.clone(), ());
            for b in &g.body {
                set.insert(b.clone(), ());
            }
        }
        set.remove(&Atom::top());
        let mut keyed: Vec<(Symbol, String, Atom)> =
            set.into_keys().map(|a| (a.pred.clone(), a.to_string(), a)).collect();
        keyed.sort_by(|x, y| (&x.0, &x.1).cmp(&(&y.0, &y.1)));
        let mut atoms = vec![Atom::top()];
        atoms.extend(keyed.into_iter().map(|(_, _, a)| a));
        let index = atoms.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        Ok(HerbrandBase { atoms, index })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn index_of(&self, a: &Atom) -> Option<usize> {
        self.index.get(a).copied()
    }
}

/// Grounds the program and collects its base together with the fact atoms.
pub fn herbrand_base(
    clauses: &[Clause],
    facts: &[Atom],
    lang: &Language,
    params: &GroundingParams,
) -> Result<HerbrandBase, GroundError> {
    let ground = ground_clauses(clauses, lang, params)?;
    HerbrandBase::from_ground(&ground, facts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_language, parse_program};

    #[test]
    fn list_enumeration_order() {
        let l = parse_language("pred p/1 : colors\nconst color : cyan,gray\nlist colors : color\n").unwrap();
        let ts = enumerate_ground_terms(&l, "colors", &GroundingParams { max_depth: 2, dedup_list_elements: true }).unwrap();
        let s: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
        assert_eq!(s, ["[]", "[cyan]", "[gray]", "[cyan,gray]", "[gray,cyan]"]);
    }

    #[test]
    fn no_dedup_keeps_repeats() {
        let l = parse_language("pred p/1 : colors\nconst color : cyan,gray\nlist colors : color\n").unwrap();
        let ts = enumerate_ground_terms(&l, "colors", &GroundingParams { max_depth: 2, dedup_list_elements: false }).unwrap();
        assert_eq!(ts.len(), 1 + 2 + 4);
    }

    #[test]
    fn even_grounding() {
        let l = parse_language("pred even/1 : nat\nconst nat : 0\nfunc s/1 : nat -> nat\n").unwrap();
        let p = parse_program("even(s(s(X))):-even(X).", &l).unwrap();
        let params = GroundingParams { max_depth: 10, dedup_list_elements: true };
        let g = ground_clauses(&p, &l, &params).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g[0].head.to_string(), "even(s(s(0)))");
        let base = HerbrandBase::from_ground(&g, &[]).unwrap();
        assert_eq!(base.len(), 12);
        assert!(base.atom(0).is_top());
    }

    #[test]
    fn empty_datatype_is_error() {
        let l = parse_language("pred p/1 : t\n").unwrap();
        let p = parse_program("p(X).", &l).unwrap();
        assert!(matches!(ground_clauses(&p, &l, &GroundingParams::default()), Err(GroundError::EmptyDatatype(_))));
    }
}
