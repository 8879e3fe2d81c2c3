use std::collections::{BTreeMap, BTreeSet};

use super::error::LangError;
use super::term::{sym, Symbol, CONS, NIL};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateSig {
    pub name: Symbol,
    pub arg_types: Vec<Symbol>,
}

impl PredicateSig {
    pub fn arity(&self) -> usize {
        self.arg_types.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorSig {
    pub name: Symbol,
    pub arg_types: Vec<Symbol>,
    pub result: Symbol,
}

/// Typed signature: predicates, constants per datatype, and functors.
///
/// Functors may be overloaded by result datatype, which is how each list
/// datatype gets its own `cons/2` and `nil/0`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Language {
    predicates: BTreeMap<Symbol, PredicateSig>,
    constants: BTreeMap<Symbol, Vec<Symbol>>,
    const_types: BTreeMap<Symbol, Symbol>,
    functors: Vec<FunctorSig>,
    dtypes: BTreeSet<Symbol>,
}

impl Language {
    pub fn new() -> Language {
        Language::default()
    }

    pub fn add_predicate(&mut self, name: &str, arg_types: &[&str]) -> Result<(), LangError> {
        if self.predicates.contains_key(name) {
            return Err(LangError::Duplicate { kind: "predicate", name: name.to_string() });
        }
        let sig = PredicateSig { name: sym(name), arg_types: arg_types.iter().map(|t| sym(t)).collect() };
        for t in &sig.arg_types {
            self.dtypes.insert(t.clone());
        }
        self.predicates.insert(sym(name), sig);
        Ok(())
    }

    pub fn add_constants(&mut self, dtype: &str, names: &[&str]) -> Result<(), LangError> {
        let dt = sym(dtype);
        self.dtypes.insert(dt.clone());
        for n in names {
            if self.const_types.contains_key(*n) || self.functors.iter().any(|f| &*f.name == *n) {
                return Err(LangError::Duplicate { kind: "constant", name: n.to_string() });
            }
            self.const_types.insert(sym(n), dt.clone());
            self.constants.entry(dt.clone()).or_default().push(sym(n));
        }
        Ok(())
    }

    pub fn add_functor(&mut self, name: &str, arg_types: &[&str], result: &str) -> Result<(), LangError> {
        if self.const_types.contains_key(name)
            || self.functors.iter().any(|f| &*f.name == name && &*f.result == result)
        {
            return Err(LangError::Duplicate { kind: "functor", name: name.to_string() });
        }
        if let Some(f) = self.functors.iter().find(|f| &*f.name == name) {
            if f.arg_types.len() != arg_types.len() {
                return Err(LangError::Duplicate { kind: "functor", name: name.to_string() });
            }
        }
        let sig = FunctorSig {
            name: sym(name),
            arg_types: arg_types.iter().map(|t| sym(t)).collect(),
            result: sym(result),
        };
        for t in sig.arg_types.iter().chain(std::iter::once(&sig.result)) {
            self.dtypes.insert(t.clone());
        }
        self.functors.push(sig);
        Ok(())
    }

    /// Declares `list_dtype` as lists of `elem_dtype` via `cons/2` and `nil/0`.
    pub fn add_list_type(&mut self, list_dtype: &str, elem_dtype: &str) -> Result<(), LangError> {
        self.add_functor(CONS, &[elem_dtype, list_dtype], list_dtype)?;
        self.add_functor(NIL, &[], list_dtype)
    }

    pub fn predicate(&self, name: &str) -> Option<&PredicateSig> {
        self.predicates.get(name)
    }

    pub fn predicates(&self) -> impl Iterator<Item = &PredicateSig> {
        self.predicates.values()
    }

    pub fn constant_type(&self, name: &str) -> Option<&Symbol> {
        self.const_types.get(name)
    }

    pub fn constants_of(&self, dtype: &str) -> &[Symbol] {
        self.constants.get(dtype).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn functors(&self) -> &[FunctorSig] {
        &self.functors
    }

    pub fn functors_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a FunctorSig> + 'a {
        self.functors.iter().filter(move |f| &*f.name == name)
    }

    pub fn functors_returning<'a>(&'a self, dtype: &'a str) -> impl Iterator<Item = &'a FunctorSig> + 'a {
        self.functors.iter().filter(move |f| &*f.result == dtype)
    }

    pub fn dtypes(&self) -> impl Iterator<Item = &Symbol> {
        self.dtypes.iter()
    }

    /// Element datatype if `dtype` was declared as a list type.
    pub fn list_element_type(&self, dtype: &str) -> Option<&Symbol> {
        self.functors
            .iter()
            .find(|f| &*f.name == CONS && &*f.result == dtype && f.arg_types.len() == 2)
            .map(|f| &f.arg_types[0])
    }

    /// Serializes back to the `.lang` text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in self.predicates.values() {
            let ts: Vec<&str> = p.arg_types.iter().map(|t| &**t).collect();
            out.push_str(&format!("pred {}/{} : {}\n", p.name, p.arity(), ts.join(",")));
        }
        for (dt, cs) in &self.constants {
            let cs: Vec<&str> = cs.iter().map(|c| &**c).collect();
            out.push_str(&format!("const {} : {}\n", dt, cs.join(",")));
        }
        for f in &self.functors {
            let ts: Vec<&str> = f.arg_types.iter().map(|t| &**t).collect();
            out.push_str(&format!("func {}/{} : {} -> {}\n", f.name, f.arg_types.len(), ts.join(","), f.result));
        }
        out
    }
}

/// Argument placement in a mode declaration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModeKind {
    /// `+`: must be bound to an existing variable.
    Input,
    /// `-`: may introduce a fresh variable.
    Output,
    /// `#`: must be a ground constant term.
    Constant,
}

impl ModeKind {
    pub fn symbol(self) -> char {
        match self {
            ModeKind::Input => '+',
            ModeKind::Output => '-',
            ModeKind::Constant => '#',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeArg {
    pub kind: ModeKind,
    pub dtype: Symbol,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeDecl {
    pub is_head: bool,
    pub recall: usize,
    pub pred: Symbol,
    pub args: Vec<ModeArg>,
}

impl std::fmt::Display for ModeDecl {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let args: Vec<String> = self.args.iter().map(|a| format!("{}{}", a.kind.symbol(), a.dtype)).collect();
        write!(
            f,
            "{}({}, {}({})).",
            if self.is_head { "modeh" } else { "modeb" },
            self.recall,
            self.pred,
            args.join(",")
        )
    }
}
