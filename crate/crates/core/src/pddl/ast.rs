use std::fmt::{self, Write};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedName {
    pub name: String,
    pub ty: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    pub params: Vec<TypedName>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    /// Variable name without the leading `?`.
    Var(String),
    Const(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomExpr {
    pub pred: String,
    pub args: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Condition {
    Atom { atom: AtomExpr, positive: bool },
    Equal { left: Term, right: Term, positive: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<TypedName>,
    pub precondition: Vec<Condition>,
    pub add: Vec<AtomExpr>,
    pub del: Vec<AtomExpr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainDef {
    pub name: String,
    pub requirements: Vec<String>,
    /// `(type, parent)` pairs; `object` is the implicit root.
    pub types: Vec<(String, String)>,
    pub constants: Vec<TypedName>,
    pub predicates: Vec<PredicateDecl>,
    pub actions: Vec<ActionSchema>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fact {
    pub pred: String,
    pub args: Vec<String>,
}

impl Fact {
    pub fn new(pred: &str, args: &[&str]) -> Fact {
        Fact {
            pred: pred.to_string(),
            args: args.iter().map(|a| a.to_string()).collect(),
        }
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.pred)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoalLiteral {
    pub fact: Fact,
    pub positive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemDef {
    pub name: String,
    pub domain: String,
    pub objects: Vec<TypedName>,
    pub init: Vec<Fact>,
    pub goal: Vec<GoalLiteral>,
}

impl DomainDef {
    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn has_type(&self, ty: &str) -> bool {
        ty == "object" || self.types.iter().any(|(t, _)| t == ty)
    }

    pub fn parent_of(&self, ty: &str) -> Option<&str> {
        self.types
            .iter()
            .find(|(t, _)| t == ty)
            .map(|(_, p)| p.as_str())
    }

    pub fn is_subtype(&self, sub: &str, sup: &str) -> bool {
        let mut cur = sub;
        // The type table is acyclic by construction, but bound the walk anyway.
        for _ in 0..=self.types.len() + 1 {
            if cur == sup {
                return true;
            }
            match self.parent_of(cur) {
                Some(p) => cur = p,
                None => return sup == "object",
            }
        }
        false
    }
}

impl ProblemDef {
    /// Renders the problem as PDDL text that parses back to an equal value.
    pub fn to_pddl(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "(define (problem {})", self.name);
        let _ = writeln!(out, "  (:domain {})", self.domain);
        out.push_str("  (:objects");
        for o in &self.objects {
            let _ = write!(out, "\n    {} - {}", o.name, o.ty);
        }
        out.push_str(")\n  (:init");
        for f in &self.init {
            let _ = write!(out, "\n    {f}");
        }
        out.push_str(")\n  (:goal (and");
        for g in &self.goal {
            if g.positive {
                let _ = write!(out, "\n    {}", g.fact);
            } else {
                let _ = write!(out, "\n    (not {})", g.fact);
            }
        }
        out.push_str(")))\n");
        out
    }
}
