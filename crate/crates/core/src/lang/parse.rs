//! Text formats: programs, languages, facts, modes and example sets.

use std::collections::HashMap;
use std::path::Path;

use super::error::LangError;
use super::language::{Language, ModeArg, ModeDecl, ModeKind};
use super::term::{sym, Atom, Clause, Symbol, Term, CONS, NIL};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    Var(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Pipe,
    Colon,
    Neck,
    Dot,
    Plus,
    Minus,
    Hash,
    Star,
    Path(String),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, LangError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    macro_rules! adv {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c.is_whitespace() {
            adv!();
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                adv!();
            }
            continue;
        }
        let simple = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ',' => Some(Tok::Comma),
            '|' => Some(Tok::Pipe),
            '.' => Some(Tok::Dot),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '#' => Some(Tok::Hash),
            '*' => Some(Tok::Star),
            _ => None,
        };
        if let Some(t) = simple {
            adv!();
            out.push(Token { tok: t, line: l0, col: c0 });
            continue;
        }
        if c == ':' {
            adv!();
            if i < chars.len() && chars[i] == '-' {
                adv!();
                out.push(Token { tok: Tok::Neck, line: l0, col: c0 });
            } else {
                out.push(Token { tok: Tok::Colon, line: l0, col: c0 });
            }
            continue;
        }
        if c == '@' {
            adv!();
            while i < chars.len() && chars[i].is_whitespace() && chars[i] != '\n' {
                adv!();
            }
            let mut s = String::new();
            while i < chars.len() && !chars[i].is_whitespace() {
                s.push(chars[i]);
                adv!();
            }
            if s.is_empty() {
                return Err(LangError::Syntax { line: l0, col: c0, msg: "expected a path after `@`".into() });
            }
            out.push(Token { tok: Tok::Path(s), line: l0, col: c0 });
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                s.push(chars[i]);
                adv!();
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                s.push('.');
                adv!();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    s.push(chars[i]);
                    adv!();
                }
                if i + 1 < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let j = if chars[i + 1] == '-' || chars[i + 1] == '+' { i + 2 } else { i + 1 };
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while i < j {
                            s.push(chars[i]);
                            adv!();
                        }
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            s.push(chars[i]);
                            adv!();
                        }
                    }
                }
            } else {
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    s.push(chars[i]);
                    adv!();
                }
            }
            out.push(Token { tok: Tok::Word(s), line: l0, col: c0 });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                adv!();
            }
            let tok = if c.is_uppercase() || c == '_' { Tok::Var(s) } else { Tok::Word(s) };
            out.push(Token { tok, line: l0, col: c0 });
            continue;
        }
        return Err(LangError::Syntax { line: l0, col: c0, msg: format!("unexpected character `{c}`") });
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum Raw {
    Var(String),
    App(String, Vec<Raw>),
}

#[derive(Clone, Debug)]
struct RawAtom {
    pred: String,
    args: Vec<Raw>,
    line: usize,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    eof_line: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Parser, LangError> {
        let eof_line = text.lines().count().max(1);
        Ok(Parser { toks: lex(text)?, pos: 0, eof_line })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn loc(&self) -> (usize, usize) {
        match self.toks.get(self.pos) {
            Some(t) => (t.line, t.col),
            None => (self.eof_line, 1),
        }
    }

    fn line(&self) -> usize {
        self.loc().0
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, LangError> {
        let (line, col) = self.loc();
        Err(LangError::Syntax { line, col, msg: msg.into() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), LangError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn word(&mut self, what: &str) -> Result<String, LangError> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => self.err(format!("expected {what}")),
        }
    }

    fn term(&mut self) -> Result<Raw, LangError> {
        match self.peek().cloned() {
            Some(Tok::Var(v)) => {
                self.pos += 1;
                Ok(Raw::Var(v))
            }
            Some(Tok::Word(w)) => {
                self.pos += 1;
                if self.eat(&Tok::LParen) {
                    let args = self.term_list(Tok::RParen)?;
                    Ok(Raw::App(w, args))
                } else {
                    Ok(Raw::App(w, Vec::new()))
                }
            }
            Some(Tok::LBracket) => {
                self.pos += 1;
                if self.eat(&Tok::RBracket) {
                    return Ok(Raw::App(NIL.into(), Vec::new()));
                }
                let mut elems = vec![self.term()?];
                while self.eat(&Tok::Comma) {
                    elems.push(self.term()?);
                }
                let tail = if self.eat(&Tok::Pipe) { self.term()? } else { Raw::App(NIL.into(), Vec::new()) };
                self.expect(Tok::RBracket, "`]`")?;
                Ok(elems.into_iter().rev().fold(tail, |acc, e| Raw::App(CONS.into(), vec![e, acc])))
            }
            _ => self.err("expected a term"),
        }
    }

    fn term_list(&mut self, close: Tok) -> Result<Vec<Raw>, LangError> {
        let mut args = vec![self.term()?];
        while self.eat(&Tok::Comma) {
            args.push(self.term()?);
        }
        self.expect(close, "`)`")?;
        Ok(args)
    }

    fn atom(&mut self) -> Result<RawAtom, LangError> {
        let line = self.line();
        let pred = self.word("a predicate name")?;
        let args = if self.eat(&Tok::LParen) { self.term_list(Tok::RParen)? } else { Vec::new() };
        Ok(RawAtom { pred, args, line })
    }

    /// Optional `<number> :` prefix.
    fn weight_prefix(&mut self) -> Result<Option<f64>, LangError> {
        if let (Some(Tok::Word(w)), Some(Tok::Colon)) = (self.peek(), self.peek_at(1)) {
            if let Ok(v) = w.parse::<f64>() {
                let line = self.line();
                self.pos += 2;
                if !(0.0..=1.0).contains(&v) {
                    return Err(LangError::Invalid { line, msg: format!("weight {v} outside [0,1]") });
                }
                return Ok(Some(v));
            }
        }
        Ok(None)
    }
}

/// Assigns datatypes to raw syntax using the language.
struct Typer<'a> {
    lang: &'a Language,
    vars: HashMap<String, Symbol>,
    fresh: usize,
}

impl<'a> Typer<'a> {
    fn new(lang: &'a Language) -> Typer<'a> {
        Typer { lang, vars: HashMap::new(), fresh: 0 }
    }

    fn term(&mut self, raw: &Raw, expected: &Symbol, line: usize) -> Result<Term, LangError> {
        match raw {
            Raw::Var(v) => {
                let name = if v == "_" {
                    self.fresh += 1;
                    format!("_G{}", self.fresh)
                } else {
                    v.clone()
                };
                if let Some(dt) = self.vars.get(&name) {
                    if dt != expected {
                        return Err(LangError::Datatype {
                            what: name,
                            expected: expected.to_string(),
                            found: dt.to_string(),
                            line,
                        });
                    }
                } else {
                    self.vars.insert(name.clone(), expected.clone());
                }
                Ok(Term::Var { name: sym(&name), dtype: expected.clone() })
            }
            Raw::App(name, args) => {
                if args.is_empty() {
                    if let Some(dt) = self.lang.constant_type(name) {
                        if dt != expected {
                            return Err(LangError::Datatype {
                                what: name.clone(),
                                expected: expected.to_string(),
                                found: dt.to_string(),
                                line,
                            });
                        }
                        return Ok(Term::Const { name: sym(name), dtype: dt.clone() });
                    }
                }
                let sigs: Vec<_> = self.lang.functors_named(name).collect();
                if sigs.is_empty() {
                    let kind = if args.is_empty() { "constant" } else { "functor" };
                    return Err(LangError::Undeclared { kind, name: name.clone(), line });
                }
                if !sigs.iter().any(|s| s.arg_types.len() == args.len()) {
                    return Err(LangError::Arity {
                        name: name.clone(),
                        expected: sigs[0].arg_types.len(),
                        found: args.len(),
                        line,
                    });
                }
                let Some(sig) = sigs.iter().find(|s| s.arg_types.len() == args.len() && &s.result == expected)
                else {
                    return Err(LangError::Datatype {
                        what: name.clone(),
                        expected: expected.to_string(),
                        found: sigs[0].result.to_string(),
                        line,
                    });
                };
                let arg_types = sig.arg_types.clone();
                let targs = args
                    .iter()
                    .zip(arg_types.iter())
                    .map(|(a, t)| self.term(a, t, line))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Term::App { functor: sym(name), args: targs, dtype: expected.clone() })
            }
        }
    }

    fn atom(&mut self, raw: &RawAtom) -> Result<Atom, LangError> {
        let Some(sig) = self.lang.predicate(&raw.pred) else {
            return Err(LangError::Undeclared { kind: "predicate", name: raw.pred.clone(), line: raw.line });
        };
        if sig.arity() != raw.args.len() {
            return Err(LangError::Arity {
                name: raw.pred.clone(),
                expected: sig.arity(),
                found: raw.args.len(),
                line: raw.line,
            });
        }
        let types = sig.arg_types.clone();
        let args = raw
            .args
            .iter()
            .zip(types.iter())
            .map(|(a, t)| self.term(a, t, raw.line))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Atom { pred: sym(&raw.pred), args })
    }
}

fn clause_statement(p: &mut Parser, lang: &Language) -> Result<Clause, LangError> {
    let weight = p.weight_prefix()?.unwrap_or(1.0);
    let head = p.atom()?;
    let mut body = Vec::new();
    if p.eat(&Tok::Neck) && p.peek() != Some(&Tok::Dot) {
        body.push(p.atom()?);
        while p.eat(&Tok::Comma) {
            body.push(p.atom()?);
        }
    }
    p.expect(Tok::Dot, "`.` at end of clause")?;
    let mut typer = Typer::new(lang);
    let head = typer.atom(&head)?;
    let body = body.iter().map(|b| typer.atom(b)).collect::<Result<Vec<_>, _>>()?;
    Ok(Clause { weight, head, body })
}

/// Parses a weighted program. Clauses without a weight prefix get weight 1.
pub fn parse_program(text: &str, lang: &Language) -> Result<Vec<Clause>, LangError> {
    let mut p = Parser::new(text)?;
    let mut out = Vec::new();
    while !p.at_end() {
        out.push(clause_statement(&mut p, lang)?);
    }
    Ok(out)
}

pub fn parse_clause(text: &str, lang: &Language) -> Result<Clause, LangError> {
    let mut p = Parser::new(text)?;
    let c = clause_statement(&mut p, lang)?;
    if !p.at_end() {
        return p.err("trailing input after clause");
    }
    Ok(c)
}

/// Parses a single atom, optionally followed by `.`.
pub fn parse_atom(text: &str, lang: &Language) -> Result<Atom, LangError> {
    let mut p = Parser::new(text)?;
    let raw = p.atom()?;
    p.eat(&Tok::Dot);
    if !p.at_end() {
        return p.err("trailing input after atom");
    }
    Typer::new(lang).atom(&raw)
}

fn fact_statement(p: &mut Parser, lang: &Language) -> Result<(f64, Atom), LangError> {
    let prob = p.weight_prefix()?.unwrap_or(1.0);
    let raw = p.atom()?;
    p.expect(Tok::Dot, "`.` at end of fact")?;
    let atom = Typer::new(lang).atom(&raw)?;
    if !atom.is_ground() {
        return Err(LangError::Invalid { line: raw.line, msg: format!("fact `{atom}` is not ground") });
    }
    Ok((prob, atom))
}

/// Parses `<prob> : atom.` lines; the probability defaults to 1.
pub fn parse_facts(text: &str, lang: &Language) -> Result<Vec<(f64, Atom)>, LangError> {
    let mut p = Parser::new(text)?;
    let mut out = Vec::new();
    while !p.at_end() {
        out.push(fact_statement(&mut p, lang)?);
    }
    Ok(out)
}

pub fn facts_to_text(facts: &[(f64, Atom)]) -> String {
    facts.iter().map(|(p, a)| format!("{p:?} : {a}.\n")).collect()
}

pub fn program_to_text(clauses: &[Clause]) -> String {
    clauses.iter().map(|c| format!("{c}\n")).collect()
}

/// Parses `modeh(r, p(+t,-t,#t)).` and `modeb(...)` declarations.
pub fn parse_modes(text: &str, lang: &Language) -> Result<Vec<ModeDecl>, LangError> {
    let mut p = Parser::new(text)?;
    let mut out = Vec::new();
    while !p.at_end() {
        let line = p.line();
        let kw = p.word("`modeh` or `modeb`")?;
        let is_head = match kw.as_str() {
            "modeh" => true,
            "modeb" => false,
            _ => return Err(LangError::Syntax { line, col: 1, msg: format!("unknown declaration `{kw}`") }),
        };
        p.expect(Tok::LParen, "`(`")?;
        let recall = if p.eat(&Tok::Star) {
            usize::MAX
        } else {
            let r = p.word("a recall number")?;
            r.parse::<usize>().map_err(|_| LangError::Invalid { line, msg: format!("bad recall `{r}`") })?
        };
        p.expect(Tok::Comma, "`,`")?;
        let pred = p.word("a predicate name")?;
        let mut args = Vec::new();
        if p.eat(&Tok::LParen) {
            loop {
                let kind = match p.peek() {
                    Some(Tok::Plus) => ModeKind::Input,
                    Some(Tok::Minus) => ModeKind::Output,
                    Some(Tok::Hash) => ModeKind::Constant,
                    _ => return p.err("expected `+`, `-` or `#`"),
                };
                p.pos += 1;
                let dt = p.word("a datatype")?;
                args.push(ModeArg { kind, dtype: sym(&dt) });
                if !p.eat(&Tok::Comma) {
                    break;
                }
            }
            p.expect(Tok::RParen, "`)`")?;
        }
        p.expect(Tok::RParen, "`)`")?;
        p.expect(Tok::Dot, "`.`")?;
        let Some(sig) = lang.predicate(&pred) else {
            return Err(LangError::Undeclared { kind: "predicate", name: pred, line });
        };
        if sig.arity() != args.len() {
            return Err(LangError::Arity { name: pred, expected: sig.arity(), found: args.len(), line });
        }
        for (a, t) in args.iter().zip(sig.arg_types.iter()) {
            if &a.dtype != t {
                return Err(LangError::Datatype {
                    what: pred.clone(),
                    expected: t.to_string(),
                    found: a.dtype.to_string(),
                    line,
                });
            }
        }
        out.push(ModeDecl { is_head, recall, pred: sym(&pred), args });
    }
    Ok(out)
}

pub fn modes_to_text(modes: &[ModeDecl]) -> String {
    modes.iter().map(|m| format!("{m}\n")).collect()
}

/// Parses the line-oriented `.lang` format:
///
/// ```text
/// pred edge/2 : node,node
/// const node : a,b,c
/// func s/1 : nat -> nat
/// list colors : color
/// ```
pub fn parse_language(text: &str) -> Result<Language, LangError> {
    let mut lang = Language::new();
    for (ln, raw_line) in text.lines().enumerate() {
        let line = ln + 1;
        let content = raw_line.split('%').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |msg: &str| LangError::Syntax { line, col: 1, msg: msg.to_string() };
        let (kw, rest) = content.split_once(char::is_whitespace).ok_or_else(|| syntax("incomplete declaration"))?;
        let (lhs, rhs) = rest.split_once(':').ok_or_else(|| syntax("expected `:`"))?;
        let lhs = lhs.trim();
        let list = |s: &str| -> Vec<String> {
            s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect()
        };
        let name_arity = |s: &str| -> Result<(String, usize), LangError> {
            let (n, a) = s.split_once('/').ok_or_else(|| syntax("expected name/arity"))?;
            let a = a.trim().parse::<usize>().map_err(|_| syntax("bad arity"))?;
            Ok((n.trim().to_string(), a))
        };
        match kw {
            "pred" => {
                let (name, ar) = name_arity(lhs)?;
                let ts = list(rhs);
                if ts.len() != ar {
                    return Err(LangError::Arity { name, expected: ar, found: ts.len(), line });
                }
                let ts: Vec<&str> = ts.iter().map(String::as_str).collect();
                lang.add_predicate(&name, &ts)?;
            }
            "const" => {
                let cs = list(rhs);
                let cs: Vec<&str> = cs.iter().map(String::as_str).collect();
                lang.add_constants(lhs, &cs)?;
            }
            "func" => {
                let (name, ar) = name_arity(lhs)?;
                let (args, res) = rhs.split_once("->").ok_or_else(|| syntax("expected `->`"))?;
                let ts = list(args);
                if ts.len() != ar {
                    return Err(LangError::Arity { name, expected: ar, found: ts.len(), line });
                }
                let ts: Vec<&str> = ts.iter().map(String::as_str).collect();
                lang.add_functor(&name, &ts, res.trim())?;
            }
            "list" => lang.add_list_type(lhs, rhs.trim())?,
            other => return Err(syntax(&format!("unknown declaration `{other}`"))),
        }
    }
    Ok(lang)
}

/// A labelled target atom with the facts it is evaluated under.
#[derive(Clone, Debug, PartialEq)]
pub struct Example {
    pub positive: bool,
    pub target: Atom,
    pub facts: Vec<(f64, Atom)>,
}

/// Parses an example set. Each entry is `pos|neg <atom>` followed by `.`,
/// an inline `{ facts }` block, or `@ path` naming a facts file resolved
/// against `base_dir`.
pub fn parse_examples(text: &str, lang: &Language, base_dir: Option<&Path>) -> Result<Vec<Example>, LangError> {
    let mut p = Parser::new(text)?;
    let mut out = Vec::new();
    while !p.at_end() {
        let line = p.line();
        let label = p.word("`pos` or `neg`")?;
        let positive = match label.as_str() {
            "pos" => true,
            "neg" => false,
            _ => return Err(LangError::Syntax { line, col: 1, msg: format!("expected `pos` or `neg`, found `{label}`") }),
        };
        let raw = p.atom()?;
        let target = Typer::new(lang).atom(&raw)?;
        if !target.is_ground() {
            return Err(LangError::Invalid { line, msg: format!("example `{target}` is not ground") });
        }
        let mut facts = Vec::new();
        match p.peek().cloned() {
            Some(Tok::Dot) => p.pos += 1,
            Some(Tok::LBrace) => {
                p.pos += 1;
                while p.peek() != Some(&Tok::RBrace) {
                    if p.at_end() {
                        return p.err("unterminated `{`");
                    }
                    facts.push(fact_statement(&mut p, lang)?);
                }
                p.pos += 1;
            }
            Some(Tok::Path(path)) => {
                p.pos += 1;
                let full = match base_dir {
                    Some(d) => d.join(&path),
                    None => Path::new(&path).to_path_buf(),
                };
                let text = std::fs::read_to_string(&full)
                    .map_err(|e| LangError::Invalid { line, msg: format!("cannot read {}: {e}", full.display()) })?;
                facts = parse_facts(&text, lang)?;
            }
            _ => return p.err("expected `.`, `{` or `@ path`"),
        }
        out.push(Example { positive, target, facts });
    }
    Ok(out)
}

pub fn examples_to_text(examples: &[Example]) -> String {
    let mut s = String::new();
    for e in examples {
        s.push_str(if e.positive { "pos " } else { "neg " });
        s.push_str(&e.target.to_string());
        if e.facts.is_empty() {
            s.push_str(".\n");
        } else {
            s.push_str(" {\n");
            for (p, a) in &e.facts {
                s.push_str(&format!("  {p:?} : {a}.\n"));
            }
            s.push_str("}\n");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph_lang() -> Language {
        parse_language("pred edge/2 : node,node\npred cyclic/1 : node\nconst node : a,b,c\n").unwrap()
    }

    fn list_lang() -> Language {
        parse_language(
            "pred member/2 : color,colors\nconst color : red,gray\nlist colors : color\n",
        )
        .unwrap()
    }

    #[test]
    fn parses_weighted_clause() {
        let cs = parse_program("0.51: cyclic(X):-edge(X,X).", &graph_lang()).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].weight, 0.51);
        assert_eq!(cs[0].body.len(), 1);
        assert_eq!(cs[0].to_string(), "0.51: cyclic(X):-edge(X,X).");
    }

    #[test]
    fn empty_body_forms() {
        let l = parse_language("pred even/1 : nat\nconst nat : 0\nfunc s/1 : nat -> nat\n").unwrap();
        let cs = parse_program("even(0):-.\neven(s(0)).", &l).unwrap();
        assert!(cs[0].body.is_empty() && cs[1].body.is_empty());
        assert_eq!(cs[1].head.args[0].depth(), 1);
    }

    #[test]
    fn list_sugar() {
        let cs = parse_program("member(X,[X|Y]):-.", &list_lang()).unwrap();
        let t = &cs[0].head.args[1];
        assert_eq!(t.to_string(), "[X|Y]");
        assert_eq!(&**t.dtype(), "colors");
        let a = parse_atom("member(red,[gray,red])", &list_lang()).unwrap();
        assert_eq!(a.to_string(), "member(red,[gray,red])");
        assert_eq!(a.args[1].depth(), 2);
    }

    #[test]
    fn errors_carry_kind() {
        let l = graph_lang();
        assert!(matches!(parse_program("foo(a).", &l), Err(LangError::Undeclared { .. })));
        assert!(matches!(parse_program("edge(a).", &l), Err(LangError::Arity { .. })));
        assert!(matches!(parse_program("cyclic(zz).", &l), Err(LangError::Undeclared { .. })));
        assert!(matches!(parse_program("cyclic(a)", &l), Err(LangError::Syntax { .. })));
        let ll = list_lang();
        assert!(matches!(parse_program("member([red],red).", &ll), Err(LangError::Datatype { .. })));
        assert!(matches!(parse_program("member(X,[X|X]).", &ll), Err(LangError::Datatype { .. })));
        assert!(matches!(parse_program("2.0: cyclic(a).", &l), Err(LangError::Invalid { .. })));
    }

    #[test]
    fn syntax_error_position() {
        match parse_program("cyclic(a).\ncyclic(b) edge", &graph_lang()) {
            Err(LangError::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 11)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trip() {
        let l = list_lang();
        let text = "0.3: member(X,[Y|Z]):-member(X,Z).\n1.0: member(X,[X|Y]):-.\n";
        let cs = parse_program(text, &l).unwrap();
        let again = parse_program(&program_to_text(&cs), &l).unwrap();
        assert_eq!(cs, again);
    }

    #[test]
    fn modes_and_facts() {
        let l = list_lang();
        let ms = parse_modes("modeh(1, member(+color,+colors)).\nmodeb(2, member(-color,#colors)).", &l).unwrap();
        assert_eq!(ms.len(), 2);
        assert!(ms[0].is_head);
        assert_eq!(ms[1].args[1].kind, ModeKind::Constant);
        assert_eq!(parse_modes(&modes_to_text(&ms), &l).unwrap(), ms);
        let fs = parse_facts("0.9 : member(red,[red]).\nmember(gray,[]).", &l).unwrap();
        assert_eq!(fs[0].0, 0.9);
        assert_eq!(fs[1].0, 1.0);
        assert!(parse_facts("member(X,[]).", &l).is_err());
    }

    #[test]
    fn examples_format() {
        let l = graph_lang();
        let ex = parse_examples("pos cyclic(a) { 1.0 : edge(a,a). }\nneg cyclic(b).", &l, None).unwrap();
        assert_eq!(ex.len(), 2);
        assert_eq!(ex[0].facts.len(), 1);
        assert!(!ex[1].positive);
        assert_eq!(parse_examples(&examples_to_text(&ex), &l, None).unwrap(), ex);
    }

    #[test]
    fn language_round_trip() {
        let l = list_lang();
        assert_eq!(parse_language(&l.to_text()).unwrap(), l);
    }
}
