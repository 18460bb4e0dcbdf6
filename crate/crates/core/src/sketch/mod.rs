//! Policy sketches: Boolean and numerical features with rules `C ↦ E`.

mod parse;
mod policy;
mod separation;
mod termination;

pub use parse::{parse_sketch, SketchError};
pub use policy::{siwr, SiwrError, SketchPolicy};
pub use separation::{
    check_goal_separation, check_well_formed, SeparationError, SeparationReport, SeparationWitness, WellFormedReport,
};
pub use termination::{check_termination, eligible, replay_order, Case, Elimination, TerminationReport};

use std::fmt;

use crate::features::{FeatureExpr, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FeatureType {
    Bool,
    Num,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureDef {
    pub name: String,
    pub ty: FeatureType,
    pub expr: FeatureExpr,
}

/// Rule conditions refer to features by index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cond {
    True(usize),
    False(usize),
    Zero(usize),
    Positive(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Effect {
    True(usize),
    False(usize),
    Any(usize),
    Inc(usize),
    Dec(usize),
}

impl Cond {
    pub fn feature(self) -> usize {
        match self {
            Cond::True(f) | Cond::False(f) | Cond::Zero(f) | Cond::Positive(f) => f,
        }
    }

    pub fn holds(self, v: &[Value]) -> bool {
        match (self, v[self.feature()]) {
            (Cond::True(_), Value::Bool(b)) => b,
            (Cond::False(_), Value::Bool(b)) => !b,
            (Cond::Zero(_), Value::Num(n)) => n.is_zero(),
            (Cond::Positive(_), Value::Num(n)) => !n.is_zero(),
            _ => false,
        }
    }

    /// Whether the two conditions can never hold together.
    pub fn complements(self, o: Cond) -> bool {
        self.feature() == o.feature()
            && matches!(
                (self, o),
                (Cond::True(_), Cond::False(_))
                    | (Cond::False(_), Cond::True(_))
                    | (Cond::Zero(_), Cond::Positive(_))
                    | (Cond::Positive(_), Cond::Zero(_))
            )
    }
}

impl Effect {
    pub fn feature(self) -> usize {
        match self {
            Effect::True(f) | Effect::False(f) | Effect::Any(f) | Effect::Inc(f) | Effect::Dec(f) => f,
        }
    }

    fn allows(self, before: Value, after: Value) -> bool {
        match (self, after) {
            (Effect::True(_), Value::Bool(b)) => b,
            (Effect::False(_), Value::Bool(b)) => !b,
            (Effect::Any(_), _) => true,
            (Effect::Inc(_), Value::Num(n)) => matches!(before, Value::Num(m) if n > m),
            (Effect::Dec(_), Value::Num(n)) => matches!(before, Value::Num(m) if n < m),
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub id: String,
    pub conds: Vec<Cond>,
    pub effects: Vec<Effect>,
}

impl Rule {
    pub fn condition_holds(&self, f: &[Value]) -> bool {
        self.conds.iter().all(|c| c.holds(f))
    }

    /// `(f, f')` satisfies the rule: its condition holds in `f`, every effect
    /// holds between `f` and `f'`, and features not mentioned keep their value.
    pub fn pair_satisfies(&self, f: &[Value], g: &[Value]) -> bool {
        if !self.condition_holds(f) {
            return false;
        }
        (0..f.len()).all(|i| match self.effects.iter().find(|e| e.feature() == i) {
            Some(e) => e.allows(f[i], g[i]),
            None => f[i] == g[i],
        })
    }

    pub fn effect_on(&self, feature: usize) -> Option<Effect> {
        self.effects.iter().copied().find(|e| e.feature() == feature)
    }

    pub fn cond_on(&self, feature: usize) -> Option<Cond> {
        self.conds.iter().copied().find(|c| c.feature() == feature)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sketch {
    pub domain: Option<String>,
    /// Width the sketch is claimed to have.
    pub width: Option<u32>,
    pub features: Vec<FeatureDef>,
    pub rules: Vec<Rule>,
}

impl Sketch {
    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    pub fn feature_exprs(&self) -> Vec<FeatureExpr> {
        self.features.iter().map(|f| f.expr.clone()).collect()
    }

    pub fn rule_index(&self, id: &str) -> Option<usize> {
        self.rules.iter().position(|r| r.id == id)
    }

    /// Boolean projection of a valuation.
    pub fn project(&self, f: &[Value]) -> Vec<bool> {
        f.iter().map(|v| v.projection()).collect()
    }

    pub fn format_valuation(&self, f: &[Value]) -> String {
        let parts: Vec<String> = self
            .features
            .iter()
            .zip(f)
            .map(|(d, v)| format!("{}={v}", d.name))
            .collect();
        parts.join(" ")
    }

    /// Writes a Boolean projection as conditions, e.g. `g=0 !c1`.
    pub fn format_projection(&self, b: &[bool]) -> String {
        let parts: Vec<String> = self
            .features
            .iter()
            .zip(b)
            .map(|(d, &v)| match (d.ty, v) {
                (FeatureType::Bool, true) => d.name.clone(),
                (FeatureType::Bool, false) => format!("!{}", d.name),
                (FeatureType::Num, true) => format!("{}=0", d.name),
                (FeatureType::Num, false) => format!("{}>0", d.name),
            })
            .collect();
        parts.join(" ")
    }

    /// Sketch without the named feature or any condition and effect on it.
    pub fn without_feature(&self, name: &str) -> Sketch {
        let Some(drop) = self.feature_index(name) else {
            return self.clone();
        };
        let remap = |f: usize| if f > drop { f - 1 } else { f };
        let mut out = self.clone();
        out.features.remove(drop);
        for r in &mut out.rules {
            r.conds.retain(|c| c.feature() != drop);
            r.effects.retain(|e| e.feature() != drop);
            for c in &mut r.conds {
                *c = match *c {
                    Cond::True(f) => Cond::True(remap(f)),
                    Cond::False(f) => Cond::False(remap(f)),
                    Cond::Zero(f) => Cond::Zero(remap(f)),
                    Cond::Positive(f) => Cond::Positive(remap(f)),
                };
            }
            for e in &mut r.effects {
                *e = match *e {
                    Effect::True(f) => Effect::True(remap(f)),
                    Effect::False(f) => Effect::False(remap(f)),
                    Effect::Any(f) => Effect::Any(remap(f)),
                    Effect::Inc(f) => Effect::Inc(remap(f)),
                    Effect::Dec(f) => Effect::Dec(remap(f)),
                };
            }
        }
        out
    }
}

impl fmt::Display for Sketch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(d) = &self.domain {
            writeln!(f, "domain {d}")?;
        }
        if let Some(w) = self.width {
            writeln!(f, "width {w}")?;
        }
        for d in &self.features {
            let ty = match d.ty {
                FeatureType::Bool => "bool",
                FeatureType::Num => "num",
            };
            writeln!(f, "feature {} : {ty} := {}", d.name, d.expr)?;
        }
        let name = |i: usize| self.features[i].name.as_str();
        for r in &self.rules {
            let conds: Vec<String> = r
                .conds
                .iter()
                .map(|c| match *c {
                    Cond::True(i) => name(i).to_string(),
                    Cond::False(i) => format!("!{}", name(i)),
                    Cond::Zero(i) => format!("{}=0", name(i)),
                    Cond::Positive(i) => format!("{}>0", name(i)),
                })
                .collect();
            let effs: Vec<String> = r
                .effects
                .iter()
                .map(|e| match *e {
                    Effect::True(i) => name(i).to_string(),
                    Effect::False(i) => format!("!{}", name(i)),
                    Effect::Any(i) => format!("{}?", name(i)),
                    Effect::Inc(i) => format!("{}++", name(i)),
                    Effect::Dec(i) => format!("{}--", name(i)),
                })
                .collect();
            writeln!(f, "rule {} {{ {} }} -> {{ {} }}", r.id, conds.join(", "), effs.join(", "))?;
        }
        Ok(())
    }
}
