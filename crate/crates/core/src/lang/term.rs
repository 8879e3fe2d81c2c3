use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

/// Interned-ish symbol: cheap to clone, compared by content.
pub type Symbol = Arc<str>;

pub fn sym(s: &str) -> Symbol {
    Arc::from(s)
}

/// Reserved functor names used to desugar list syntax.
pub const CONS: &str = "cons";
pub const NIL: &str = "nil";

/// Predicate name of the special always-true atom.
pub const TOP_PREDICATE: &str = "⊤";

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Const { name: Symbol, dtype: Symbol },
    Var { name: Symbol, dtype: Symbol },
    App { functor: Symbol, args: Vec<Term>, dtype: Symbol },
}

impl Term {
    pub fn constant(name: &str, dtype: &str) -> Term {
        Term::Const { name: sym(name), dtype: sym(dtype) }
    }

    pub fn var(name: &str, dtype: &str) -> Term {
        Term::Var { name: sym(name), dtype: sym(dtype) }
    }

    pub fn app(functor: &str, args: Vec<Term>, dtype: &str) -> Term {
        Term::App { functor: sym(functor), args, dtype: sym(dtype) }
    }

    pub fn dtype(&self) -> &Symbol {
        match self {
            Term::Const { dtype, .. } | Term::Var { dtype, .. } | Term::App { dtype, .. } => dtype,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var { .. })
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Const { .. } => true,
            Term::Var { .. } => false,
            Term::App { args, .. } => args.iter().all(Term::is_ground),
        }
    }

    /// Functor nesting depth. Constants, variables and nullary functors have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::App { args, .. } if !args.is_empty() => {
                1 + args.iter().map(Term::depth).max().unwrap_or(0)
            }
            _ => 0,
        }
    }

    /// True if a constant symbol occurs anywhere inside the term.
    pub fn contains_constant(&self) -> bool {
        match self {
            Term::Const { .. } => true,
            Term::Var { .. } => false,
            Term::App { args, .. } => args.iter().any(Term::contains_constant),
        }
    }

    /// Pushes variables in left-to-right first-occurrence order, skipping duplicates.
    pub fn collect_vars(&self, out: &mut Vec<Term>) {
        match self {
            Term::Var { .. } => {
                if !out.contains(self) {
                    out.push(self.clone());
                }
            }
            Term::App { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
            Term::Const { .. } => {}
        }
    }

    pub fn occurs(&self, var_name: &str) -> bool {
        match self {
            Term::Var { name, .. } => &**name == var_name,
            Term::App { args, .. } => args.iter().any(|a| a.occurs(var_name)),
            Term::Const { .. } => false,
        }
    }

    fn is_cons(&self) -> bool {
        matches!(self, Term::App { functor, args, .. } if &**functor == CONS && args.len() == 2)
    }

    fn is_nil(&self) -> bool {
        matches!(self, Term::App { functor, args, .. } if &**functor == NIL && args.is_empty())
    }

    /// Elements of a cons chain plus its tail (nil for proper lists).
    pub fn list_parts(&self) -> Option<(Vec<&Term>, &Term)> {
        if !self.is_cons() && !self.is_nil() {
            return None;
        }
        let mut elems = Vec::new();
        let mut cur = self;
        while let Term::App { functor, args, .. } = cur {
            if &**functor == CONS && args.len() == 2 {
                elems.push(&args[0]);
                cur = &args[1];
            } else {
                break;
            }
        }
        Some((elems, cur))
    }

    /// True if some list inside this term repeats an element.
    pub fn has_duplicate_list_elements(&self) -> bool {
        match self {
            Term::App { args, .. } => {
                if let Some((elems, _)) = self.list_parts() {
                    for i in 0..elems.len() {
                        if elems[i + 1..].contains(&elems[i]) {
                            return true;
                        }
                    }
                }
                args.iter().any(Term::has_duplicate_list_elements)
            }
            _ => false,
        }
    }

    pub fn rename_vars(&self, map: &HashMap<Symbol, Symbol>) -> Term {
        match self {
            Term::Var { name, dtype } => match map.get(name) {
                Some(n) => Term::Var { name: n.clone(), dtype: dtype.clone() },
                None => self.clone(),
            },
            Term::App { functor, args, dtype } => Term::App {
                functor: functor.clone(),
                args: args.iter().map(|a| a.rename_vars(map)).collect(),
                dtype: dtype.clone(),
            },
            Term::Const { .. } => self.clone(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const { name, .. } | Term::Var { name, .. } => write!(f, "{name}"),
            Term::App { functor, args, .. } => {
                if let Some((elems, tail)) = self.list_parts() {
                    write!(f, "[")?;
                    for (i, e) in elems.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{e}")?;
                    }
                    if !tail.is_nil() {
                        write!(f, "|{tail}")?;
                    }
                    return write!(f, "]");
                }
                write!(f, "{functor}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Atom {
    pub pred: Symbol,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Atom {
        Atom { pred: sym(pred), args }
    }

    /// The special atom ⊤ that feeds conjunctions of body-less clauses.
    pub fn top() -> Atom {
        Atom { pred: sym(TOP_PREDICATE), args: Vec::new() }
    }

    pub fn is_top(&self) -> bool {
        &*self.pred == TOP_PREDICATE && self.args.is_empty()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn depth(&self) -> usize {
        self.args.iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn has_duplicate_list_elements(&self) -> bool {
        self.args.iter().any(Term::has_duplicate_list_elements)
    }

    pub fn collect_vars(&self, out: &mut Vec<Term>) {
        self.args.iter().for_each(|a| a.collect_vars(out));
    }

    pub fn vars(&self) -> Vec<Term> {
        let mut v = Vec::new();
        self.collect_vars(&mut v);
        v
    }

    pub fn rename_vars(&self, map: &HashMap<Symbol, Symbol>) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(|a| a.rename_vars(map)).collect() }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pred)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// A definite clause with a weight in [0,1].
#[derive(Clone, PartialEq, Debug)]
pub struct Clause {
    pub weight: f64,
    pub head: Atom,
    pub body: Vec<Atom>,
}

impl Clause {
    pub fn new(head: Atom, body: Vec<Atom>) -> Clause {
        Clause { weight: 1.0, head, body }
    }

    pub fn with_weight(mut self, weight: f64) -> Clause {
        self.weight = weight;
        self
    }

    /// Variables in first-occurrence order, head first.
    pub fn vars(&self) -> Vec<Term> {
        let mut v = Vec::new();
        self.head.collect_vars(&mut v);
        for b in &self.body {
            b.collect_vars(&mut v);
        }
        v
    }

    /// Renames variables to `V0, V1, ...` in first-occurrence order.
    pub fn canonical(&self) -> Clause {
        let map: HashMap<Symbol, Symbol> = self
            .vars()
            .into_iter()
            .enumerate()
            .filter_map(|(i, v)| match v {
                Term::Var { name, .. } => Some((name, sym(&format!("V{i}")))),
                _ => None,
            })
            .collect();
        Clause {
            weight: self.weight,
            head: self.head.rename_vars(&map),
            body: self.body.iter().map(|b| b.rename_vars(&map)).collect(),
        }
    }

    /// Identity of the clause up to variable renaming, ignoring the weight.
    pub fn key(&self) -> String {
        let c = self.canonical();
        let mut s = c.head.to_string();
        s.push_str(":-");
        for (i, b) in c.body.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&b.to_string());
        }
        s
    }

    pub fn rule_text(&self) -> String {
        let mut s = self.head.to_string();
        s.push_str(":-");
        for (i, b) in self.body.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&b.to_string());
        }
        s.push('.');
        s
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.weight, self.rule_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn list(elems: &[&str], dt: &str, edt: &str) -> Term {
        let mut t = Term::app(NIL, vec![], dt);
        for e in elems.iter().rev() {
            t = Term::app(CONS, vec![Term::constant(e, edt), t], dt);
        }
        t
    }

    #[test]
    fn list_display_and_depth() {
        let l = list(&["a", "b", "c"], "l", "e");
        assert_eq!(l.to_string(), "[a,b,c]");
        assert_eq!(l.depth(), 3);
        assert_eq!(list(&[], "l", "e").to_string(), "[]");
        assert_eq!(list(&[], "l", "e").depth(), 0);
        let partial = Term::app(CONS, vec![Term::var("X", "e"), Term::var("Y", "l")], "l");
        assert_eq!(partial.to_string(), "[X|Y]");
    }

    #[test]
    fn duplicate_detection() {
        assert!(list(&["a", "b", "a"], "l", "e").has_duplicate_list_elements());
        assert!(!list(&["a", "b"], "l", "e").has_duplicate_list_elements());
    }

    #[test]
    fn canonical_key_ignores_names() {
        let c1 = Clause::new(
            Atom::new("p", vec![Term::var("X", "t")]),
            vec![Atom::new("q", vec![Term::var("X", "t"), Term::var("Y", "t")])],
        );
        let c2 = Clause::new(
            Atom::new("p", vec![Term::var("A", "t")]),
            vec![Atom::new("q", vec![Term::var("A", "t"), Term::var("B", "t")])],
        );
        assert_eq!(c1.key(), c2.key());
    }
}
