use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Concept {
    Primitive(String, usize),
    Top,
    Bot,
    Union(Box<Concept>, Box<Concept>),
    Intersection(Box<Concept>, Box<Concept>),
    Not(Box<Concept>),
    Diff(Box<Concept>, Box<Concept>),
    Some(Box<Role>, Box<Concept>),
    All(Box<Role>, Box<Concept>),
    Nominal(String),
    /// `{a | R(a) = S(a)}`.
    Equal(Box<Role>, Box<Role>),
    /// `{a | R(a) ⊆ S(a)}`.
    Subset(Box<Role>, Box<Role>),
    /// Projection of a role on position 0 or 1.
    Extract(Box<Role>, u8),
    Goal(Box<Concept>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Primitive(String, usize, usize),
    Union(Box<Role>, Box<Role>),
    Intersection(Box<Role>, Box<Role>),
    Not(Box<Role>),
    Diff(Box<Role>, Box<Role>),
    Compose(Box<Role>, Box<Role>),
    Inverse(Box<Role>),
    TClosure(Box<Role>),
    RtClosure(Box<Role>),
    /// `R ∩ (Δ × C)`.
    Restrict(Box<Role>, Box<Concept>),
    Identity(Box<Concept>),
    Goal(Box<Role>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SetExpr {
    Concept(Concept),
    Role(Role),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FeatureExpr {
    Empty(SetExpr),
    NonEmpty(SetExpr),
    Count(SetExpr),
    ConceptDist(Concept, Role, Concept),
    RoleDist(Role, Role, Role),
    SumRoleDist(Role, Role, Role),
    /// Number of goal literals the state violates.
    GoalCount,
}

impl FeatureExpr {
    pub fn is_boolean(&self) -> bool {
        matches!(self, FeatureExpr::Empty(_) | FeatureExpr::NonEmpty(_))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("feature syntax: {msg} at offset {offset}")]
pub struct ExprError {
    pub offset: usize,
    pub msg: String,
}

/// Untyped syntax tree: `name` or `name(arg, ...)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub head: String,
    pub args: Vec<Term>,
    pub offset: usize,
}

fn is_word(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.'
}

pub fn parse_term(src: &str) -> Result<Term, ExprError> {
    let mut p = TermParser { src, i: 0 };
    let t = p.term()?;
    p.ws();
    if p.i != src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(t)
}

struct TermParser<'a> {
    src: &'a str,
    i: usize,
}

impl TermParser<'_> {
    fn err(&self, msg: &str) -> ExprError {
        ExprError {
            offset: self.i,
            msg: msg.to_string(),
        }
    }

    fn ws(&mut self) {
        while self.src[self.i..].starts_with(char::is_whitespace) {
            self.i += self.src[self.i..].chars().next().unwrap().len_utf8();
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.i..].chars().next()
    }

    fn term(&mut self) -> Result<Term, ExprError> {
        self.ws();
        let start = self.i;
        while self.peek().is_some_and(is_word) {
            self.i += 1;
        }
        if start == self.i {
            return Err(self.err("expected a name"));
        }
        let head = self.src[start..self.i].to_string();
        self.ws();
        let mut args = Vec::new();
        if self.peek() == Some('(') {
            self.i += 1;
            self.ws();
            if self.peek() == Some(')') {
                self.i += 1;
            } else {
                loop {
                    args.push(self.term()?);
                    self.ws();
                    match self.peek() {
                        Some(',') => self.i += 1,
                        Some(')') => {
                            self.i += 1;
                            break;
                        }
                        _ => return Err(self.err("expected ',' or ')'")),
                    }
                }
            }
        }
        Ok(Term { head, args, offset: start })
    }
}

fn bad(t: &Term, msg: impl Into<String>) -> ExprError {
    ExprError {
        offset: t.offset,
        msg: msg.into(),
    }
}

/// Named sub-expressions that may appear as bare names.
pub type Macros = HashMap<String, Term>;

fn expand<'a>(t: &'a Term, macros: &'a Macros) -> &'a Term {
    if t.args.is_empty() {
        if let Some(m) = macros.get(&t.head) {
            return m;
        }
    }
    t
}

fn arity(t: &Term, n: usize) -> Result<(), ExprError> {
    if t.args.len() == n {
        Ok(())
    } else {
        Err(bad(t, format!("{} takes {n} arguments, got {}", t.head, t.args.len())))
    }
}

fn index(t: &Term) -> Result<usize, ExprError> {
    t.head.parse().map_err(|_| bad(t, format!("expected a position, found {}", t.head)))
}

pub fn set_expr(t: &Term, macros: &Macros) -> Result<SetExpr, ExprError> {
    let t = expand(t, macros);
    let binary = |t: &Term| -> Result<(SetExpr, SetExpr), ExprError> {
        arity(t, 2)?;
        Ok((set_expr(&t.args[0], macros)?, set_expr(&t.args[1], macros)?))
    };
    Ok(match t.head.as_str() {
        "primitive" => match t.args.len() {
            2 => SetExpr::Concept(Concept::Primitive(t.args[0].head.clone(), index(&t.args[1])?)),
            3 => SetExpr::Role(Role::Primitive(
                t.args[0].head.clone(),
                index(&t.args[1])?,
                index(&t.args[2])?,
            )),
            _ => return Err(bad(t, "primitive takes a predicate and one or two positions")),
        },
        "top" => {
            arity(t, 0)?;
            SetExpr::Concept(Concept::Top)
        }
        "bot" => {
            arity(t, 0)?;
            SetExpr::Concept(Concept::Bot)
        }
        "union" | "intersection" | "diff" => {
            let (x, y) = binary(t)?;
            match (x, y) {
                (SetExpr::Concept(x), SetExpr::Concept(y)) => SetExpr::Concept(match t.head.as_str() {
                    "union" => Concept::Union(Box::new(x), Box::new(y)),
                    "intersection" => Concept::Intersection(Box::new(x), Box::new(y)),
                    _ => Concept::Diff(Box::new(x), Box::new(y)),
                }),
                (SetExpr::Role(x), SetExpr::Role(y)) => SetExpr::Role(match t.head.as_str() {
                    "union" => Role::Union(Box::new(x), Box::new(y)),
                    "intersection" => Role::Intersection(Box::new(x), Box::new(y)),
                    _ => Role::Diff(Box::new(x), Box::new(y)),
                }),
                _ => return Err(bad(t, format!("{} mixes a concept and a role", t.head))),
            }
        }
        "not" => {
            arity(t, 1)?;
            match set_expr(&t.args[0], macros)? {
                SetExpr::Concept(c) => SetExpr::Concept(Concept::Not(Box::new(c))),
                SetExpr::Role(r) => SetExpr::Role(Role::Not(Box::new(r))),
            }
        }
        "goal" => {
            arity(t, 1)?;
            match set_expr(&t.args[0], macros)? {
                SetExpr::Concept(c) => SetExpr::Concept(Concept::Goal(Box::new(c))),
                SetExpr::Role(r) => SetExpr::Role(Role::Goal(Box::new(r))),
            }
        }
        "some" | "all" => {
            arity(t, 2)?;
            let r = role(&t.args[0], macros)?;
            let c = concept(&t.args[1], macros)?;
            let (r, c) = (Box::new(r), Box::new(c));
            SetExpr::Concept(if t.head == "some" { Concept::Some(r, c) } else { Concept::All(r, c) })
        }
        "nominal" => {
            arity(t, 1)?;
            SetExpr::Concept(Concept::Nominal(t.args[0].head.clone()))
        }
        "equal" | "subset" => {
            arity(t, 2)?;
            let r = role(&t.args[0], macros)?;
            let s = role(&t.args[1], macros)?;
            let (r, s) = (Box::new(r), Box::new(s));
            SetExpr::Concept(if t.head == "equal" { Concept::Equal(r, s) } else { Concept::Subset(r, s) })
        }
        "extract" => {
            arity(t, 2)?;
            let pos = index(&t.args[1])?;
            if pos > 1 {
                return Err(bad(&t.args[1], "extract position must be 0 or 1"));
            }
            SetExpr::Concept(Concept::Extract(Box::new(role(&t.args[0], macros)?), pos as u8))
        }
        "compose" => {
            arity(t, 2)?;
            SetExpr::Role(Role::Compose(Box::new(role(&t.args[0], macros)?), Box::new(role(&t.args[1], macros)?)))
        }
        "inverse" | "tclosure" | "rtclosure" => {
            arity(t, 1)?;
            let r = Box::new(role(&t.args[0], macros)?);
            SetExpr::Role(match t.head.as_str() {
                "inverse" => Role::Inverse(r),
                "tclosure" => Role::TClosure(r),
                _ => Role::RtClosure(r),
            })
        }
        "restrict" => {
            arity(t, 2)?;
            SetExpr::Role(Role::Restrict(Box::new(role(&t.args[0], macros)?), Box::new(concept(&t.args[1], macros)?)))
        }
        "identity" => {
            arity(t, 1)?;
            SetExpr::Role(Role::Identity(Box::new(concept(&t.args[0], macros)?)))
        }
        other => return Err(bad(t, format!("unknown constructor {other}"))),
    })
}

pub fn concept(t: &Term, macros: &Macros) -> Result<Concept, ExprError> {
    match set_expr(t, macros)? {
        SetExpr::Concept(c) => Ok(c),
        SetExpr::Role(_) => Err(bad(t, "expected a concept, found a role")),
    }
}

pub fn role(t: &Term, macros: &Macros) -> Result<Role, ExprError> {
    match set_expr(t, macros)? {
        SetExpr::Role(r) => Ok(r),
        SetExpr::Concept(_) => Err(bad(t, "expected a role, found a concept")),
    }
}

pub fn feature_expr(t: &Term, macros: &Macros) -> Result<FeatureExpr, ExprError> {
    let t = expand(t, macros);
    Ok(match t.head.as_str() {
        "empty" | "nonempty" | "count" => {
            arity(t, 1)?;
            let s = set_expr(&t.args[0], macros)?;
            match t.head.as_str() {
                "empty" => FeatureExpr::Empty(s),
                "nonempty" => FeatureExpr::NonEmpty(s),
                _ => FeatureExpr::Count(s),
            }
        }
        "not" if t.args.len() == 1 && expand(&t.args[0], macros).head == "empty" => {
            match feature_expr(&t.args[0], macros)? {
                FeatureExpr::Empty(s) => FeatureExpr::NonEmpty(s),
                _ => unreachable!(),
            }
        }
        "concept_dist" => {
            arity(t, 3)?;
            FeatureExpr::ConceptDist(
                concept(&t.args[0], macros)?,
                role(&t.args[1], macros)?,
                concept(&t.args[2], macros)?,
            )
        }
        "role_dist" | "sum_role_dist" => {
            arity(t, 3)?;
            let (r, s, u) = (
                role(&t.args[0], macros)?,
                role(&t.args[1], macros)?,
                role(&t.args[2], macros)?,
            );
            if t.head == "role_dist" {
                FeatureExpr::RoleDist(r, s, u)
            } else {
                FeatureExpr::SumRoleDist(r, s, u)
            }
        }
        "goal_count" => {
            arity(t, 0)?;
            FeatureExpr::GoalCount
        }
        other => return Err(bad(t, format!("unknown feature kind {other}"))),
    })
}

impl std::str::FromStr for FeatureExpr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        feature_expr(&parse_term(s)?, &Macros::new())
    }
}

impl std::str::FromStr for SetExpr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        set_expr(&parse_term(s)?, &Macros::new())
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Primitive(p, i) => write!(f, "primitive({p}, {i})"),
            Concept::Top => write!(f, "top"),
            Concept::Bot => write!(f, "bot"),
            Concept::Union(a, b) => write!(f, "union({a}, {b})"),
            Concept::Intersection(a, b) => write!(f, "intersection({a}, {b})"),
            Concept::Not(a) => write!(f, "not({a})"),
            Concept::Diff(a, b) => write!(f, "diff({a}, {b})"),
            Concept::Some(r, c) => write!(f, "some({r}, {c})"),
            Concept::All(r, c) => write!(f, "all({r}, {c})"),
            Concept::Nominal(o) => write!(f, "nominal({o})"),
            Concept::Equal(r, s) => write!(f, "equal({r}, {s})"),
            Concept::Subset(r, s) => write!(f, "subset({r}, {s})"),
            Concept::Extract(r, i) => write!(f, "extract({r}, {i})"),
            Concept::Goal(c) => write!(f, "goal({c})"),
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Primitive(p, i, j) => write!(f, "primitive({p}, {i}, {j})"),
            Role::Union(a, b) => write!(f, "union({a}, {b})"),
            Role::Intersection(a, b) => write!(f, "intersection({a}, {b})"),
            Role::Not(a) => write!(f, "not({a})"),
            Role::Diff(a, b) => write!(f, "diff({a}, {b})"),
            Role::Compose(a, b) => write!(f, "compose({a}, {b})"),
            Role::Inverse(a) => write!(f, "inverse({a})"),
            Role::TClosure(a) => write!(f, "tclosure({a})"),
            Role::RtClosure(a) => write!(f, "rtclosure({a})"),
            Role::Restrict(r, c) => write!(f, "restrict({r}, {c})"),
            Role::Identity(c) => write!(f, "identity({c})"),
            Role::Goal(r) => write!(f, "goal({r})"),
        }
    }
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetExpr::Concept(c) => c.fmt(f),
            SetExpr::Role(r) => r.fmt(f),
        }
    }
}

impl fmt::Display for FeatureExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureExpr::Empty(s) => write!(f, "empty({s})"),
            FeatureExpr::NonEmpty(s) => write!(f, "nonempty({s})"),
            FeatureExpr::Count(s) => write!(f, "count({s})"),
            FeatureExpr::ConceptDist(c, r, d) => write!(f, "concept_dist({c}, {r}, {d})"),
            FeatureExpr::RoleDist(r, s, t) => write!(f, "role_dist({r}, {s}, {t})"),
            FeatureExpr::SumRoleDist(r, s, t) => write!(f, "sum_role_dist({r}, {s}, {t})"),
            FeatureExpr::GoalCount => write!(f, "goal_count()"),
        }
    }
}
