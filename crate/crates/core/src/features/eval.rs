use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::bits::{ObjSet, Relation};
use super::expr::{Concept, FeatureExpr, Role, SetExpr};
use crate::pddl::{GroundTask, State};

/// Natural numbers extended with infinity, ordered above every integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Num {
    Fin(u64),
    Inf,
}

impl Num {
    pub fn is_zero(self) -> bool {
        self == Num::Fin(0)
    }

    fn add(self, o: Num) -> Num {
        match (self, o) {
            (Num::Fin(a), Num::Fin(b)) => Num::Fin(a + b),
            _ => Num::Inf,
        }
    }
}

impl From<Option<u64>> for Num {
    fn from(d: Option<u64>) -> Num {
        d.map_or(Num::Inf, Num::Fin)
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num::Fin(n) => write!(f, "{n}"),
            Num::Inf => write!(f, "inf"),
        }
    }
}

impl Serialize for Num {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Num::Fin(n) => s.serialize_u64(*n),
            Num::Inf => s.serialize_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Num(Num),
}

impl Value {
    /// Boolean projection: a numeric value maps to whether it is zero.
    pub fn projection(self) -> bool {
        match self {
            Value::Bool(b) => b,
            Value::Num(n) => n.is_zero(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Num(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompileError {
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
    #[error("position {pos} out of range for {pred} of arity {arity}")]
    BadPosition { pred: String, pos: usize, arity: usize },
    #[error("unknown object {0}")]
    UnknownObject(String),
}

type N = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Op {
    CPrim { pred: u32, pos: usize, goal: bool },
    Top,
    Bot,
    CUnion(N, N),
    CInter(N, N),
    CNot(N),
    CDiff(N, N),
    Some(N, N),
    All(N, N),
    Nominal(u32),
    Equal(N, N),
    Subset(N, N),
    Extract(N, u8),
    RPrim { pred: u32, i: usize, j: usize, goal: bool },
    RUnion(N, N),
    RInter(N, N),
    RNot(N),
    RDiff(N, N),
    Compose(N, N),
    Inverse(N),
    TClosure(N),
    RtClosure(N),
    Restrict(N, N),
    Identity(N),
}

impl Op {
    fn is_role(&self) -> bool {
        matches!(
            self,
            Op::RPrim { .. }
                | Op::RUnion(..)
                | Op::RInter(..)
                | Op::RNot(_)
                | Op::RDiff(..)
                | Op::Compose(..)
                | Op::Inverse(_)
                | Op::TClosure(_)
                | Op::RtClosure(_)
                | Op::Restrict(..)
                | Op::Identity(_)
        )
    }

    fn children(&self) -> Vec<N> {
        match *self {
            Op::CPrim { .. } | Op::Top | Op::Bot | Op::Nominal(_) | Op::RPrim { .. } => vec![],
            Op::CNot(a) | Op::Extract(a, _) | Op::RNot(a) | Op::Inverse(a) | Op::TClosure(a) | Op::RtClosure(a) => {
                vec![a]
            }
            Op::Identity(a) => vec![a],
            Op::CUnion(a, b)
            | Op::CInter(a, b)
            | Op::CDiff(a, b)
            | Op::Some(a, b)
            | Op::All(a, b)
            | Op::Equal(a, b)
            | Op::Subset(a, b)
            | Op::RUnion(a, b)
            | Op::RInter(a, b)
            | Op::RDiff(a, b)
            | Op::Compose(a, b)
            | Op::Restrict(a, b) => vec![a, b],
        }
    }
}

#[derive(Clone, Debug)]
enum Kind {
    Empty(N),
    NonEmpty(N),
    Count(N),
    ConceptDist(N, N, N),
    RoleDist(N, N, N),
    SumRoleDist(N, N, N),
    GoalCount,
}

#[derive(Clone, Debug)]
enum Denot {
    C(ObjSet),
    R(Relation),
}

impl Denot {
    fn c(&self) -> &ObjSet {
        match self {
            Denot::C(s) => s,
            Denot::R(_) => unreachable!("type checked at compile time"),
        }
    }

    fn r(&self) -> &Relation {
        match self {
            Denot::R(r) => r,
            Denot::C(_) => unreachable!("type checked at compile time"),
        }
    }

    fn is_empty(&self) -> bool {
        match self {
            Denot::C(s) => s.is_empty(),
            Denot::R(r) => r.is_empty(),
        }
    }

    fn count(&self) -> u64 {
        match self {
            Denot::C(s) => s.count(),
            Denot::R(r) => r.count(),
        }
    }
}

/// Feature expressions compiled into a shared DAG for one task. Every
/// distinct subexpression is a single node, evaluated at most once per state;
/// nodes that do not depend on the state are evaluated once at compile time.
pub struct Evaluator<'t> {
    task: &'t GroundTask,
    n: usize,
    nodes: Vec<Op>,
    dynamic: Vec<bool>,
    index: HashMap<Op, N>,
    features: Vec<Kind>,
    statics: Vec<Option<Denot>>,
    goal_state: State,
}

impl<'t> Evaluator<'t> {
    pub fn new(task: &'t GroundTask, features: &[FeatureExpr]) -> Result<Evaluator<'t>, CompileError> {
        let goal_state = State::from_atoms(task.num_atoms(), task.goal_pos.iter().copied());
        let mut ev = Evaluator {
            task,
            n: task.num_objects(),
            nodes: Vec::new(),
            dynamic: Vec::new(),
            index: HashMap::new(),
            features: Vec::new(),
            statics: Vec::new(),
            goal_state,
        };
        for f in features {
            let k = ev.feature(f)?;
            ev.features.push(k);
        }
        let mut statics: Vec<Option<Denot>> = Vec::with_capacity(ev.nodes.len());
        for id in 0..ev.nodes.len() {
            if ev.dynamic[id] {
                statics.push(None);
            } else {
                let d = ev.compute(id, &task.init, &|c| statics[c as usize].as_ref().expect("children precede parents"));
                statics.push(Some(d));
            }
        }
        ev.statics = statics;
        Ok(ev)
    }

    pub fn num_features(&self) -> usize {
        self.features.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_dynamic_nodes(&self) -> usize {
        self.dynamic.iter().filter(|d| **d).count()
    }

    pub fn task(&self) -> &'t GroundTask {
        self.task
    }

    fn intern(&mut self, op: Op, dynamic: bool) -> N {
        if let Some(&id) = self.index.get(&op) {
            return id;
        }
        let id = self.nodes.len() as N;
        let dynamic = dynamic || op.children().iter().any(|&c| self.dynamic[c as usize]);
        self.index.insert(op.clone(), id);
        self.nodes.push(op);
        self.dynamic.push(dynamic);
        id
    }

    fn pred(&self, name: &str, positions: &[usize]) -> Result<u32, CompileError> {
        let p = self
            .task
            .predicate_id(name)
            .ok_or_else(|| CompileError::UnknownPredicate(name.to_string()))?;
        let arity = self.task.predicate_arity(p);
        for &pos in positions {
            if pos >= arity {
                return Err(CompileError::BadPosition {
                    pred: name.to_string(),
                    pos,
                    arity,
                });
            }
        }
        Ok(p)
    }

    fn concept(&mut self, c: &Concept, goal: bool) -> Result<N, CompileError> {
        let op = match c {
            Concept::Primitive(p, i) => {
                let pred = self.pred(p, &[*i])?;
                let dynamic = !goal && !self.task.predicate_is_static(pred);
                return Ok(self.intern(Op::CPrim { pred, pos: *i, goal }, dynamic));
            }
            Concept::Top => Op::Top,
            Concept::Bot => Op::Bot,
            Concept::Union(a, b) => Op::CUnion(self.concept(a, goal)?, self.concept(b, goal)?),
            Concept::Intersection(a, b) => Op::CInter(self.concept(a, goal)?, self.concept(b, goal)?),
            Concept::Not(a) => Op::CNot(self.concept(a, goal)?),
            Concept::Diff(a, b) => Op::CDiff(self.concept(a, goal)?, self.concept(b, goal)?),
            Concept::Some(r, c) => Op::Some(self.role(r, goal)?, self.concept(c, goal)?),
            Concept::All(r, c) => Op::All(self.role(r, goal)?, self.concept(c, goal)?),
            Concept::Nominal(o) => Op::Nominal(
                self.task
                    .object_id(o)
                    .ok_or_else(|| CompileError::UnknownObject(o.clone()))?,
            ),
            Concept::Equal(r, s) => Op::Equal(self.role(r, goal)?, self.role(s, goal)?),
            Concept::Subset(r, s) => Op::Subset(self.role(r, goal)?, self.role(s, goal)?),
            Concept::Extract(r, i) => Op::Extract(self.role(r, goal)?, *i),
            Concept::Goal(c) => return self.concept(c, true),
        };
        Ok(self.intern(op, false))
    }

    fn role(&mut self, r: &Role, goal: bool) -> Result<N, CompileError> {
        let op = match r {
            Role::Primitive(p, i, j) => {
                let pred = self.pred(p, &[*i, *j])?;
                let dynamic = !goal && !self.task.predicate_is_static(pred);
                return Ok(self.intern(Op::RPrim { pred, i: *i, j: *j, goal }, dynamic));
            }
            Role::Union(a, b) => Op::RUnion(self.role(a, goal)?, self.role(b, goal)?),
            Role::Intersection(a, b) => Op::RInter(self.role(a, goal)?, self.role(b, goal)?),
            Role::Not(a) => Op::RNot(self.role(a, goal)?),
            Role::Diff(a, b) => Op::RDiff(self.role(a, goal)?, self.role(b, goal)?),
            Role::Compose(a, b) => Op::Compose(self.role(a, goal)?, self.role(b, goal)?),
            Role::Inverse(a) => Op::Inverse(self.role(a, goal)?),
            Role::TClosure(a) => Op::TClosure(self.role(a, goal)?),
            Role::RtClosure(a) => Op::RtClosure(self.role(a, goal)?),
            Role::Restrict(a, c) => Op::Restrict(self.role(a, goal)?, self.concept(c, goal)?),
            Role::Identity(c) => Op::Identity(self.concept(c, goal)?),
            Role::Goal(a) => return self.role(a, true),
        };
        Ok(self.intern(op, false))
    }

    fn set(&mut self, s: &SetExpr) -> Result<N, CompileError> {
        match s {
            SetExpr::Concept(c) => self.concept(c, false),
            SetExpr::Role(r) => self.role(r, false),
        }
    }

    fn feature(&mut self, f: &FeatureExpr) -> Result<Kind, CompileError> {
        Ok(match f {
            FeatureExpr::Empty(s) => Kind::Empty(self.set(s)?),
            FeatureExpr::NonEmpty(s) => Kind::NonEmpty(self.set(s)?),
            FeatureExpr::Count(s) => Kind::Count(self.set(s)?),
            FeatureExpr::ConceptDist(c, r, d) => {
                Kind::ConceptDist(self.concept(c, false)?, self.role(r, false)?, self.concept(d, false)?)
            }
            FeatureExpr::RoleDist(r, s, t) => {
                Kind::RoleDist(self.role(r, false)?, self.role(s, false)?, self.role(t, false)?)
            }
            FeatureExpr::SumRoleDist(r, s, t) => {
                Kind::SumRoleDist(self.role(r, false)?, self.role(s, false)?, self.role(t, false)?)
            }
            FeatureExpr::GoalCount => Kind::GoalCount,
        })
    }

    fn compute<'a>(&self, id: usize, s: &State, get: &dyn Fn(N) -> &'a Denot) -> Denot {
        let n = self.n;
        let task = self.task;
        let source = |goal: bool| if goal { &self.goal_state } else { s };
        match self.nodes[id] {
            Op::CPrim { pred, pos, goal } => {
                let src = source(goal);
                let mut out = ObjSet::empty(n);
                for &a in task.atoms_of(pred) {
                    if src.contains(a) {
                        out.insert(task.atoms[a as usize].args[pos] as usize);
                    }
                }
                Denot::C(out)
            }
            Op::RPrim { pred, i, j, goal } => {
                let src = source(goal);
                let mut out = Relation::empty(n);
                for &a in task.atoms_of(pred) {
                    if src.contains(a) {
                        let args = &task.atoms[a as usize].args;
                        out.insert(args[i] as usize, args[j] as usize);
                    }
                }
                Denot::R(out)
            }
            Op::Top => Denot::C(ObjSet::full(n)),
            Op::Bot => Denot::C(ObjSet::empty(n)),
            Op::CUnion(a, b) => Denot::C(get(a).c().union(get(b).c())),
            Op::CInter(a, b) => Denot::C(get(a).c().intersection(get(b).c())),
            Op::CNot(a) => Denot::C(get(a).c().complement()),
            Op::CDiff(a, b) => Denot::C(get(a).c().difference(get(b).c())),
            Op::Some(r, c) => {
                let (r, c) = (get(r).r(), get(c).c());
                Denot::C(ObjSet::from_iter(
                    n,
                    (0..n).filter(|&a| r.row(a).iter().zip(c.words()).any(|(x, y)| x & y != 0)),
                ))
            }
            Op::All(r, c) => {
                let (r, c) = (get(r).r(), get(c).c());
                Denot::C(ObjSet::from_iter(
                    n,
                    (0..n).filter(|&a| r.row(a).iter().zip(c.words()).all(|(x, y)| x & !y == 0)),
                ))
            }
            Op::Nominal(o) => Denot::C(ObjSet::from_iter(n, [o as usize])),
            Op::Equal(r, t) => {
                let (r, t) = (get(r).r(), get(t).r());
                Denot::C(ObjSet::from_iter(n, (0..n).filter(|&a| r.row(a) == t.row(a))))
            }
            Op::Subset(r, t) => {
                let (r, t) = (get(r).r(), get(t).r());
                Denot::C(ObjSet::from_iter(
                    n,
                    (0..n).filter(|&a| r.row(a).iter().zip(t.row(a)).all(|(x, y)| x & !y == 0)),
                ))
            }
            Op::Extract(r, 0) => Denot::C(get(r).r().domain()),
            Op::Extract(r, _) => Denot::C(get(r).r().range()),
            Op::RUnion(a, b) => Denot::R(get(a).r().union(get(b).r())),
            Op::RInter(a, b) => Denot::R(get(a).r().intersection(get(b).r())),
            Op::RNot(a) => Denot::R(get(a).r().complement()),
            Op::RDiff(a, b) => Denot::R(get(a).r().difference(get(b).r())),
            Op::Compose(a, b) => Denot::R(get(a).r().compose(get(b).r())),
            Op::Inverse(a) => Denot::R(get(a).r().inverse()),
            Op::TClosure(a) => Denot::R(get(a).r().transitive_closure()),
            Op::RtClosure(a) => {
                let t = get(a).r().transitive_closure();
                Denot::R(t.union(&Relation::identity(&ObjSet::full(n))))
            }
            Op::Restrict(r, c) => Denot::R(get(r).r().restrict(get(c).c())),
            Op::Identity(c) => Denot::R(Relation::identity(get(c).c())),
        }
    }

    /// Feature values at `s`, in the order the features were given.
    pub fn eval(&self, s: &State) -> Vec<Value> {
        self.eval_counted(s).0
    }

    /// Also returns the number of set entries materialised, which is at most
    /// `|Δ|²` per dynamic node.
    pub fn eval_counted(&self, s: &State) -> (Vec<Value>, u64) {
        let mut dynamic: Vec<Option<Denot>> = vec![None; self.nodes.len()];
        let mut cells = 0u64;
        for id in 0..self.nodes.len() {
            if !self.dynamic[id] {
                continue;
            }
            let d = {
                let get = |c: N| -> &Denot {
                    self.statics[c as usize]
                        .as_ref()
                        .or(dynamic[c as usize].as_ref())
                        .expect("children precede parents")
                };
                self.compute(id, s, &get)
            };
            cells += if self.nodes[id].is_role() {
                (self.n * self.n) as u64
            } else {
                self.n as u64
            };
            dynamic[id] = Some(d);
        }
        let get = |c: N| -> &Denot {
            self.statics[c as usize]
                .as_ref()
                .or(dynamic[c as usize].as_ref())
                .expect("every node is evaluated")
        };
        let values = self.features.iter().map(|k| self.value(k, s, &get)).collect();
        (values, cells)
    }

    fn value<'a>(&self, k: &Kind, s: &State, get: &dyn Fn(N) -> &'a Denot) -> Value {
        match *k {
            Kind::Empty(x) => Value::Bool(get(x).is_empty()),
            Kind::NonEmpty(x) => Value::Bool(!get(x).is_empty()),
            Kind::Count(x) => Value::Num(Num::Fin(get(x).count())),
            Kind::ConceptDist(c, r, d) => Value::Num(get(r).r().distance(get(c).c(), get(d).c()).into()),
            Kind::RoleDist(r, s_, t) => {
                let (r, sr, t) = (get(r).r(), get(s_).r(), get(t).r());
                let best = (0..self.n)
                    .filter(|&a| !r.row_is_empty(a) && !t.row_is_empty(a))
                    .filter_map(|a| sr.distance(&r.row_set(a), &t.row_set(a)))
                    .min();
                Value::Num(best.into())
            }
            Kind::SumRoleDist(r, s_, t) => {
                let (r, sr, t) = (get(r).r(), get(s_).r(), get(t).r());
                let mut cache: HashMap<usize, Vec<u64>> = HashMap::new();
                let mut total = Num::Fin(0);
                for (a, x0) in r.pairs() {
                    let dist = cache.entry(x0).or_insert_with(|| sr.distances_from(x0));
                    let d = t.row_set(a).iter().map(|x| dist[x]).min().unwrap_or(u64::MAX);
                    total = total.add(if d == u64::MAX { Num::Inf } else { Num::Fin(d) });
                    if total == Num::Inf {
                        break;
                    }
                }
                Value::Num(total)
            }
            Kind::GoalCount => Value::Num(Num::Fin(self.task.unsatisfied_goals(s) as u64)),
        }
    }

    /// Evaluates a single concept or role to its extension, for tests and tools.
    pub fn extension(task: &'t GroundTask, expr: &SetExpr, s: &State) -> Result<Extension, CompileError> {
        let mut ev = Evaluator::new(task, &[])?;
        let root = ev.set(expr)?;
        let mut vals: Vec<Option<Denot>> = Vec::new();
        for id in 0..ev.nodes.len() {
            let d = ev.compute(id, s, &|c| vals[c as usize].as_ref().unwrap());
            vals.push(Some(d));
        }
        Ok(match vals[root as usize].take().unwrap() {
            Denot::C(c) => Extension::Concept(c.iter().collect()),
            Denot::R(r) => Extension::Role(r.pairs().collect()),
        })
    }
}

/// Plain extension of a concept or role over object indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extension {
    Concept(Vec<usize>),
    Role(Vec<(usize, usize)>),
}
