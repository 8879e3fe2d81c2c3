use std::collections::BTreeMap;

use super::error::LangError;
use super::term::{Atom, Clause, Symbol, Term};

/// Finite map from variable names to terms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: BTreeMap<Symbol, Term>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Binds `var` (with its datatype) to `term`, rejecting datatype mismatches.
    pub fn bind(&mut self, var: &Term, term: Term) -> Result<(), LangError> {
        let Term::Var { name, dtype } = var else {
            return Err(LangError::Invalid { line: 0, msg: format!("`{var}` is not a variable") });
        };
        if dtype != term.dtype() {
            return Err(LangError::Datatype {
                what: name.to_string(),
                expected: dtype.to_string(),
                found: term.dtype().to_string(),
                line: 0,
            });
        }
        self.bindings.insert(name.clone(), term);
        Ok(())
    }

    pub fn apply_term(&self, t: &Term) -> Term {
        match t {
            Term::Var { name, .. } => self.bindings.get(name).cloned().unwrap_or_else(|| t.clone()),
            Term::App { functor, args, dtype } => Term::App {
                functor: functor.clone(),
                args: args.iter().map(|a| self.apply_term(a)).collect(),
                dtype: dtype.clone(),
            },
            Term::Const { .. } => t.clone(),
        }
    }

    pub fn apply_atom(&self, a: &Atom) -> Atom {
        Atom { pred: a.pred.clone(), args: a.args.iter().map(|t| self.apply_term(t)).collect() }
    }

    pub fn apply_clause(&self, c: &Clause) -> Clause {
        Clause {
            weight: c.weight,
            head: self.apply_atom(&c.head),
            body: c.body.iter().map(|b| self.apply_atom(b)).collect(),
        }
    }

    /// `self` followed by `other`: applying the result equals applying both in order.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut bindings: BTreeMap<Symbol, Term> =
            self.bindings.iter().map(|(k, v)| (k.clone(), other.apply_term(v))).collect();
        for (k, v) in &other.bindings {
            bindings.entry(k.clone()).or_insert_with(|| v.clone());
        }
        Substitution { bindings }
    }
}

/// One-way matching: extends `theta` so that `pattern·theta == target`.
fn match_term(pattern: &Term, target: &Term, theta: &mut BTreeMap<Symbol, Term>) -> bool {
    match pattern {
        Term::Var { name, dtype } => {
            if dtype != target.dtype() {
                return false;
            }
            match theta.get(name) {
                Some(bound) => bound == target,
                None => {
                    theta.insert(name.clone(), target.clone());
                    true
                }
            }
        }
        Term::Const { .. } => pattern == target,
        Term::App { functor, args, dtype } => match target {
            Term::App { functor: f2, args: a2, dtype: d2 } => {
                functor == f2
                    && dtype == d2
                    && args.len() == a2.len()
                    && args.iter().zip(a2).all(|(p, t)| match_term(p, t, theta))
            }
            _ => false,
        },
    }
}

fn match_atom(p: &Atom, t: &Atom, theta: &mut BTreeMap<Symbol, Term>) -> bool {
    p.pred == t.pred && p.args.len() == t.args.len() && p.args.iter().zip(&t.args).all(|(a, b)| match_term(a, b, theta))
}

fn match_body(rest: &[Atom], target: &[Atom], theta: &BTreeMap<Symbol, Term>) -> bool {
    let Some((first, rest)) = rest.split_first() else {
        return true;
    };
    target.iter().any(|t| {
        let mut th = theta.clone();
        match_atom(first, t, &mut th) && match_body(rest, target, &th)
    })
}

/// True if some θ maps `general` into `specific` (head to head, body into body).
///
/// Variables of the two clauses are treated as disjoint.
pub fn theta_subsumes(general: &Clause, specific: &Clause) -> bool {
    let mut theta = BTreeMap::new();
    // Rename `specific`'s variables apart so bindings never alias.
    let specific = rename_apart(specific);
    match_atom(&general.head, &specific.head, &mut theta) && match_body(&general.body, &specific.body, &theta)
}

/// θ-subsumption in both directions.
pub fn theta_equivalent(a: &Clause, b: &Clause) -> bool {
    theta_subsumes(a, b) && theta_subsumes(b, a)
}

fn rename_apart(c: &Clause) -> Clause {
    let map = c
        .vars()
        .into_iter()
        .filter_map(|v| match v {
            Term::Var { name, .. } => {
                let fresh: Symbol = super::term::sym(&format!("{name}'"));
                Some((name, fresh))
            }
            _ => None,
        })
        .collect();
    Clause {
        weight: c.weight,
        head: c.head.rename_vars(&map),
        body: c.body.iter().map(|b| b.rename_vars(&map)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_clause, parse_language, Language};

    fn lang() -> Language {
        parse_language("pred p/2 : t,t\npred q/1 : t\nconst t : a,b\nfunc f/1 : t -> t\n").unwrap()
    }

    #[test]
    fn apply_and_compose() {
        let l = lang();
        let c = parse_clause("p(X,Y):-q(X).", &l).unwrap();
        let mut t1 = Substitution::new();
        t1.bind(&Term::var("X", "t"), Term::app("f", vec![Term::var("Y", "t")], "t")).unwrap();
        let mut t2 = Substitution::new();
        t2.bind(&Term::var("Y", "t"), Term::constant("a", "t")).unwrap();
        let seq = t2.apply_clause(&t1.apply_clause(&c));
        assert_eq!(t1.compose(&t2).apply_clause(&c), seq);
        assert_eq!(seq.rule_text(), "p(f(a),a):-q(f(a)).");
    }

    #[test]
    fn bind_rejects_datatype() {
        let mut s = Substitution::new();
        assert!(s.bind(&Term::var("X", "t"), Term::constant("a", "u")).is_err());
    }

    #[test]
    fn subsumption() {
        let l = lang();
        let g = parse_clause("p(X,Y):-.", &l).unwrap();
        let s = parse_clause("p(X,X):-q(X).", &l).unwrap();
        assert!(theta_subsumes(&g, &s));
        assert!(!theta_subsumes(&s, &g));
        let r1 = parse_clause("p(X,Y):-q(X),q(Z).", &l).unwrap();
        let r2 = parse_clause("p(X,Y):-q(X).", &l).unwrap();
        assert!(theta_equivalent(&r1, &r2));
    }
}
