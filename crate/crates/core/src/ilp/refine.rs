//! Downward refinement under mode declarations.

use std::collections::{HashMap, HashSet};

use crate::lang::{sym, theta_subsumes, Atom, Clause, Language, ModeDecl, ModeKind, Substitution, Symbol, Term};

fn conforms(atom: &Atom, mode: &ModeDecl, known: Option<&HashSet<Symbol>>) -> bool {
    if atom.pred != mode.pred || atom.args.len() != mode.args.len() {
        return false;
    }
    atom.args.iter().zip(&mode.args).all(|(t, m)| {
        if t.dtype() != &m.dtype {
            return false;
        }
        match m.kind {
            ModeKind::Constant => t.is_ground(),
            ModeKind::Output => !t.contains_constant(),
            ModeKind::Input => {
                if t.contains_constant() {
                    return false;
                }
                match known {
                    None => true,
                    Some(k) => {
                        let mut vs = Vec::new();
                        t.collect_vars(&mut vs);
                        vs.iter().all(|v| match v {
                            Term::Var { name, .. } => k.contains(name),
                            _ => true,
                        })
                    }
                }
            }
        }
    })
}

fn var_names(a: &Atom, out: &mut HashSet<Symbol>) {
    for v in a.vars() {
        if let Term::Var { name, .. } = v {
            out.insert(name);
        }
    }
}

/// Checks a clause against the mode declarations and the depth bound.
///
/// The head needs a matching `modeh`. Each body atom needs a matching
/// `modeb` whose `+` positions only use variables bound by the head or an
/// earlier body atom, whose `#` positions are ground, and whose `+`/`-`
/// positions hold no constants. Per-predicate body counts respect the
/// largest recall. Body atoms may not repeat or equal the head.
pub fn mode_valid(clause: &Clause, modes: &[ModeDecl], max_depth: usize) -> bool {
    if !modes.iter().any(|m| m.is_head && conforms(&clause.head, m, None)) {
        return false;
    }
    if clause.head.depth() > max_depth {
        return false;
    }
    let mut known = HashSet::new();
    var_names(&clause.head, &mut known);
    let mut counts: HashMap<&Symbol, usize> = HashMap::new();
    for (i, b) in clause.body.iter().enumerate() {
        if b.depth() > max_depth || *b == clause.head || clause.body[..i].contains(b) {
            return false;
        }
        let fitting: Vec<&ModeDecl> = modes.iter().filter(|m| !m.is_head && conforms(b, m, Some(&known))).collect();
        if fitting.is_empty() {
            return false;
        }
        let recall = modes.iter().filter(|m| !m.is_head && m.pred == b.pred).map(|m| m.recall).max().unwrap_or(0);
        let c = counts.entry(&b.pred).or_insert(0);
        *c += 1;
        if *c > recall {
            return false;
        }
        var_names(b, &mut known);
    }
    true
}

struct Fresh {
    used: HashSet<Symbol>,
    next: usize,
}

impl Fresh {
    fn new(c: &Clause) -> Fresh {
        let used = c
            .vars()
            .into_iter()
            .filter_map(|v| match v {
                Term::Var { name, .. } => Some(name),
                _ => None,
            })
            .collect();
        Fresh { used, next: 0 }
    }

    fn var(&mut self, dtype: &Symbol) -> Term {
        loop {
            let name = format!("N{}", self.next);
            self.next += 1;
            if !self.used.contains(name.as_str()) {
                let s = sym(&name);
                self.used.insert(s.clone());
                return Term::Var { name: s, dtype: dtype.clone() };
            }
        }
    }
}

fn depth0_terms(lang: &Language, dtype: &Symbol) -> Vec<Term> {
    let mut v: Vec<Term> =
        lang.constants_of(dtype).iter().map(|c| Term::Const { name: c.clone(), dtype: dtype.clone() }).collect();
    for f in lang.functors_returning(dtype).filter(|f| f.arg_types.is_empty()) {
        v.push(Term::App { functor: f.name.clone(), args: Vec::new(), dtype: dtype.clone() });
    }
    v
}

fn cartesian(options: &[Vec<Term>]) -> Vec<Vec<Term>> {
    options.iter().fold(vec![Vec::new()], |acc, opts| {
        acc.iter()
            .flat_map(|prefix| {
                opts.iter().map(move |o| {
                    let mut p = prefix.clone();
                    p.push(o.clone());
                    p
                })
            })
            .collect()
    })
}

/// One-step specialisations of `clause`: add a body atom, bind a variable to
/// a constant, unify two variables, or apply a functor to a variable.
///
/// Outputs are mode-valid, strictly more specific than the parent, and
/// unique up to variable renaming.
pub fn downward_refine(clause: &Clause, lang: &Language, modes: &[ModeDecl], max_depth: usize) -> Vec<Clause> {
    let vars = clause.vars();
    let mut raw: Vec<Clause> = Vec::new();
    // (i) add a body atom per body mode.
    for m in modes.iter().filter(|m| !m.is_head) {
        let present = clause.body.iter().filter(|b| b.pred == m.pred).count();
        if present >= m.recall {
            continue;
        }
        let mut fresh = Fresh::new(clause);
        let options: Vec<Vec<Term>> = m
            .args
            .iter()
            .map(|a| {
                let same: Vec<Term> = vars.iter().filter(|v| v.dtype() == &a.dtype).cloned().collect();
                match a.kind {
                    ModeKind::Input => same,
                    ModeKind::Output => {
                        let mut o = same;
                        o.push(fresh.var(&a.dtype));
                        o
                    }
                    ModeKind::Constant => depth0_terms(lang, &a.dtype),
                }
            })
            .collect();
        for args in cartesian(&options) {
            let mut c = clause.clone();
            c.body.push(Atom { pred: m.pred.clone(), args });
            raw.push(c);
        }
    }
    for (i, v) in vars.iter().enumerate() {
        // (ii) constant for a variable.
        for c in lang.constants_of(v.dtype()) {
            let mut th = Substitution::new();
            if th.bind(v, Term::Const { name: c.clone(), dtype: v.dtype().clone() }).is_ok() {
                raw.push(th.apply_clause(clause));
            }
        }
        // (iii) unify with an earlier variable of the same datatype.
        for u in vars[..i].iter().filter(|u| u.dtype() == v.dtype()) {
            let mut th = Substitution::new();
            if th.bind(v, u.clone()).is_ok() {
                raw.push(th.apply_clause(clause));
            }
        }
        // (iv) functor application.
        for f in lang.functors_returning(v.dtype()) {
            let mut fresh = Fresh::new(clause);
            let args = f.arg_types.iter().map(|t| fresh.var(t)).collect();
            let mut th = Substitution::new();
            if th.bind(v, Term::App { functor: f.name.clone(), args, dtype: f.result.clone() }).is_ok() {
                raw.push(th.apply_clause(clause));
            }
        }
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for c in raw {
        if !mode_valid(&c, modes, max_depth) {
            continue;
        }
        if theta_subsumes(&c, clause) {
            continue;
        }
        if seen.insert(c.key()) {
            out.push(c);
        }
    }
    out
}

/// The most general clause allowed by a head mode: distinct variables everywhere,
/// constants left unbound in `#` positions (those are filled by refinement).
pub fn most_general_clause(mode: &ModeDecl) -> Clause {
    let args = mode
        .args
        .iter()
        .enumerate()
        .map(|(i, a)| Term::Var { name: sym(&format!("X{i}")), dtype: a.dtype.clone() })
        .collect();
    Clause::new(Atom { pred: mode.pred.clone(), args }, Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_clause, parse_language, parse_modes};

    fn setup() -> (Language, Vec<ModeDecl>) {
        let l = parse_language(
            "pred member/2 : color,colors\nconst color : red,gray\nlist colors : color\n",
        )
        .unwrap();
        let m = parse_modes("modeh(1, member(+color,+colors)).\nmodeb(1, member(+color,+colors)).", &l).unwrap();
        (l, m)
    }

    #[test]
    fn reaches_member_program() {
        let (l, m) = setup();
        let start = parse_clause("member(X,Y):-.", &l).unwrap();
        let r1 = downward_refine(&start, &l, &m, 3);
        let keys: Vec<String> = r1.iter().map(|c| c.key()).collect();
        let cons = parse_clause("member(X,[Y|Z]):-.", &l).unwrap();
        assert!(keys.contains(&cons.key()), "{keys:?}");
        let r2 = downward_refine(&cons, &l, &m, 3);
        let keys2: Vec<String> = r2.iter().map(|c| c.key()).collect();
        for target in ["member(X,[X|Z]):-.", "member(X,[Y|Z]):-member(X,Z)."] {
            assert!(keys2.contains(&parse_clause(target, &l).unwrap().key()), "{target} not in {keys2:?}");
        }
    }

    #[test]
    fn recall_limits_body() {
        let (l, m) = setup();
        let c = parse_clause("member(X,[Y|Z]):-member(X,Z).", &l).unwrap();
        for r in downward_refine(&c, &l, &m, 3) {
            assert!(r.body.len() <= 1);
        }
    }

    #[test]
    fn validity_rules() {
        let (l, m) = setup();
        let ok = parse_clause("member(X,[Y|Z]):-member(X,Z).", &l).unwrap();
        assert!(mode_valid(&ok, &m, 3));
        let unbound = parse_clause("member(X,Y):-member(W,Y).", &l).unwrap();
        assert!(!mode_valid(&unbound, &m, 3));
        let constant = parse_clause("member(red,Y):-.", &l).unwrap();
        assert!(!mode_valid(&constant, &m, 3));
        let deep = parse_clause("member(X,[A,B,C|D]):-.", &l).unwrap();
        assert!(!mode_valid(&deep, &m, 2));
    }
}
