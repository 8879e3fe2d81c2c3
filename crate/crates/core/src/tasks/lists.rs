//! List operations over colour lists: a reference oracle and ILP example sets.

use std::fmt;

use rand::seq::IndexedRandom;
use thiserror::Error;

use crate::ilp::IlpProblem;
use crate::lang::{parse_atom, parse_facts, parse_language, parse_modes, parse_program, sym, Example, LangError, Language, ModeDecl};

/// Object colours, declared in their sort order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Color {
    Cyan,
    Gray,
    Red,
    Yellow,
}

impl Color {
    pub const ALL: [Color; 4] = [Color::Cyan, Color::Gray, Color::Red, Color::Yellow];

    pub fn name(self) -> &'static str {
        match self {
            Color::Cyan => "cyan",
            Color::Gray => "gray",
            Color::Red => "red",
            Color::Yellow => "yellow",
        }
    }

    pub fn from_name(s: &str) -> Option<Color> {
        Color::ALL.into_iter().find(|c| c.name() == s)
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ListOracleError {
    #[error("{0} is not in the list")]
    Absent(Color),
    #[error("{op} needs a colour argument")]
    MissingArgument { op: &'static str },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ListOp {
    Member,
    Delete,
    Append,
    Reverse,
    Sort,
}

impl ListOp {
    pub fn name(self) -> &'static str {
        match self {
            ListOp::Member => "member",
            ListOp::Delete => "delete",
            ListOp::Append => "append",
            ListOp::Reverse => "reverse",
            ListOp::Sort => "sort",
        }
    }

    /// Applies a list-valued operation. Member is answered by [`ListOp::holds`].
    pub fn apply(self, arg: Option<Color>, list: &[Color]) -> Result<Vec<Color>, ListOracleError> {
        let need = |op| arg.ok_or(ListOracleError::MissingArgument { op });
        match self {
            ListOp::Member => {
                let c = need("member")?;
                if list.contains(&c) {
                    Ok(list.to_vec())
                } else {
                    Err(ListOracleError::Absent(c))
                }
            }
            ListOp::Delete => delete(need("delete")?, list),
            ListOp::Append => Ok(append(need("append")?, list)),
            ListOp::Reverse => Ok(reverse(list)),
            ListOp::Sort => Ok(sort(list)),
        }
    }
}

pub fn member(c: Color, list: &[Color]) -> bool {
    list.iter().any(|&x| x == c)
}

/// Removes the first occurrence of `c`.
pub fn delete(c: Color, list: &[Color]) -> Result<Vec<Color>, ListOracleError> {
    let i = list.iter().position(|&x| x == c).ok_or(ListOracleError::Absent(c))?;
    let mut out = list.to_vec();
    out.remove(i);
    Ok(out)
}

/// Puts `c` in front, the leftmost position.
pub fn append(c: Color, list: &[Color]) -> Vec<Color> {
    let mut out = vec![c];
    out.extend_from_slice(list);
    out
}

pub fn reverse(list: &[Color]) -> Vec<Color> {
    list.iter().rev().copied().collect()
}

pub fn is_sorted(list: &[Color]) -> bool {
    list.windows(2).all(|w| w[0] <= w[1])
}

/// The permutation of `list` that is sorted.
pub fn sort(list: &[Color]) -> Vec<Color> {
    permutations(list).into_iter().find(|p| is_sorted(p)).unwrap_or_default()
}

fn permutations(list: &[Color]) -> Vec<Vec<Color>> {
    if list.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..list.len() {
        let mut rest = list.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

/// Every list of pairwise distinct colours with at most `max_len` elements.
pub fn distinct_lists(max_len: usize) -> Vec<Vec<Color>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for l in &frontier {
            for c in Color::ALL {
                if !l.contains(&c) {
                    let mut m: Vec<Color> = l.clone();
                    m.push(c);
                    next.push(m);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

pub fn list_text(list: &[Color]) -> String {
    let names: Vec<&str> = list.iter().map(|c| c.name()).collect();
    format!("[{}]", names.join(","))
}

/// Tasks with a learnable target predicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ListTask {
    Member,
    Delete,
    Sort,
}

impl ListTask {
    pub fn name(self) -> &'static str {
        match self {
            ListTask::Member => "member",
            ListTask::Delete => "delete",
            ListTask::Sort => "sort",
        }
    }

    pub fn from_name(s: &str) -> Option<ListTask> {
        [ListTask::Member, ListTask::Delete, ListTask::Sort].into_iter().find(|t| t.name() == s)
    }

    /// The target program, one clause per line.
    pub fn reference_program(self) -> &'static str {
        match self {
            ListTask::Member => "member(X,[X|Y]):-.\nmember(X,[Y|Z]):-member(X,Z).\n",
            ListTask::Delete => "delete(X,[X|Y],Y):-.\ndelete(X,[Y|Z],[Y|V]):-delete(X,Z,V).\n",
            ListTask::Sort => "sort(X,Y):-permutation(X,Y),is_sorted(Y).\n",
        }
    }
}

pub const LIST_LANGUAGE: &str = "\
pred member/2 : color,colors
pred delete/3 : color,colors,colors
pred smaller/2 : color,color
pred is_sorted/1 : colors
pred permutation/2 : colors,colors
pred sort/2 : colors,colors
const color : cyan,gray,red,yellow
list colors : color
";

/// Background used when learning `sort`: the `is_sorted` program learned
/// in the first curriculum stage, plus `permutation` and `delete`.
const SORT_BACKGROUND: &str = "\
delete(X,[X|Y],Y):-.
delete(X,[Y|Z],[Y|V]):-delete(X,Z,V).
permutation([],[]):-.
permutation([X|Y],Z):-permutation(Y,V),delete(X,Z,V).
is_sorted([X,Y|Z]):-smaller(X,Y),is_sorted([Y|Z]).
is_sorted([X]):-.
";

pub fn list_language() -> Language {
    parse_language(LIST_LANGUAGE).expect("built-in list language parses")
}

pub fn list_modes(task: ListTask, lang: &Language) -> Result<Vec<ModeDecl>, LangError> {
    let text = match task {
        ListTask::Member => "modeh(1, member(+color,+colors)).\nmodeb(1, member(+color,+colors)).\n",
        ListTask::Delete => "modeh(1, delete(+color,+colors,+colors)).\nmodeb(1, delete(+color,+colors,+colors)).\n",
        ListTask::Sort => {
            "modeh(1, sort(+colors,+colors)).\nmodeb(1, permutation(+colors,+colors)).\nmodeb(1, is_sorted(+colors)).\n"
        }
    };
    parse_modes(text, lang)
}

fn smaller_facts() -> String {
    let mut s = String::new();
    for a in Color::ALL {
        for b in Color::ALL {
            if a < b {
                s.push_str(&format!("smaller({a},{b}).\n"));
            }
        }
    }
    s
}

/// (positive, negative) example atoms as text, over lists of up to three distinct colours.
fn pools(task: ListTask) -> (Vec<String>, Vec<String>) {
    let lists = distinct_lists(3);
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    match task {
        ListTask::Member => {
            for l in &lists {
                for c in Color::ALL {
                    let t = format!("member({c},{})", list_text(l));
                    if member(c, l) {
                        pos.push(t)
                    } else {
                        neg.push(t)
                    }
                }
            }
        }
        ListTask::Delete => {
            for l in lists.iter().filter(|l| !l.is_empty()) {
                // Lists of the right length built from the input's elements.
                let shapes: Vec<&Vec<Color>> =
                    lists.iter().filter(|m| m.len() + 1 == l.len() && m.iter().all(|x| l.contains(x))).collect();
                for c in Color::ALL {
                    let truth = delete(c, l).ok();
                    for m in &shapes {
                        let t = format!("delete({c},{},{})", list_text(l), list_text(m));
                        if truth.as_ref() == Some(*m) {
                            pos.push(t)
                        } else {
                            neg.push(t)
                        }
                    }
                }
            }
        }
        ListTask::Sort => {
            for l in lists.iter().filter(|l| !l.is_empty()) {
                let truth = sort(l);
                for p in permutations(l) {
                    let t = format!("sort({},{})", list_text(l), list_text(&p));
                    if p == truth {
                        pos.push(t)
                    } else {
                        neg.push(t)
                    }
                }
            }
        }
    }
    (pos, neg)
}

/// An ILP problem with `n_pos` positives and `n_neg` near-miss negatives,
/// drawn uniformly with replacement from all tuples over lists of at most
/// three distinct colours. Examples carry no facts: the target atom itself
/// holds the input lists.
pub fn gen_list_task(task: ListTask, n_pos: usize, n_neg: usize, seed: u64) -> Result<IlpProblem, LangError> {
    let language = list_language();
    let modes = list_modes(task, &language)?;
    let mut rng = crate::rng::stream(seed, &format!("list-task/{}", task.name()));
    let (pos_pool, neg_pool) = pools(task);
    let draw = |pool: &[String], n: usize, positive: bool, rng: &mut rand_chacha::ChaCha8Rng| -> Result<Vec<Example>, LangError> {
        (0..n)
            .map(|_| {
                let t = pool.choose(rng).expect("pools are non-empty");
                Ok(Example { positive, target: parse_atom(t, &language)?, facts: Vec::new() })
            })
            .collect()
    };
    let positives = draw(&pos_pool, n_pos, true, &mut rng)?;
    let negatives = draw(&neg_pool, n_neg, false, &mut rng)?;
    let (background_clauses, background_facts) = match task {
        ListTask::Sort => (parse_program(SORT_BACKGROUND, &language)?, parse_facts(&smaller_facts(), &language)?),
        _ => (Vec::new(), Vec::new()),
    };
    Ok(IlpProblem {
        positives,
        negatives,
        background_facts,
        background_clauses,
        language,
        modes,
        target: sym(task.name()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Color::*;

    #[test]
    fn oracle_examples() {
        assert_eq!(delete(Gray, &[Red, Gray, Cyan]).unwrap(), vec![Red, Cyan]);
        assert_eq!(sort(&[Red, Cyan]), vec![Cyan, Red]);
        assert_eq!(reverse(&[]), Vec::<Color>::new());
        assert_eq!(delete(Yellow, &[Red]), Err(ListOracleError::Absent(Yellow)));
        assert_eq!(append(Red, &[Gray, Cyan]), vec![Red, Gray, Cyan]);
        assert!(member(Red, &[Gray, Red]) && !member(Yellow, &[Gray, Red]));
        assert_eq!(ListOp::Delete.apply(None, &[Red]), Err(ListOracleError::MissingArgument { op: "delete" }));
    }

    #[test]
    fn universe_counts() {
        assert_eq!(distinct_lists(3).len(), 41);
        let (p, n) = pools(ListTask::Member);
        assert_eq!((p.len(), n.len()), (100, 64));
        assert!(p.contains(&"member(red,[gray,red])".to_string()));
        assert!(n.contains(&"member(yellow,[gray,red])".to_string()));
        let (p, _) = pools(ListTask::Delete);
        assert!(p.contains(&"delete(gray,[red,gray,cyan],[red,cyan])".to_string()));
        assert_eq!(p.len(), 100);
    }

    #[test]
    fn generated_problem_is_valid() {
        for task in [ListTask::Member, ListTask::Delete, ListTask::Sort] {
            let pr = gen_list_task(task, 20, 20, 3).unwrap();
            pr.validate().unwrap();
            assert_eq!(pr.positives.len(), 20);
            let again = gen_list_task(task, 20, 20, 3).unwrap();
            assert_eq!(pr.positives, again.positives);
        }
    }
}
