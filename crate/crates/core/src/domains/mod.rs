//! Shipped domain packs: a STRIPS domain file, the policy sketch for it, and
//! a seeded generator of desk-scale instances.

mod barman;
mod childsnack;
mod driverlog;
mod floortile;
mod graph;
mod grid;
mod schedule;
mod schema;
mod tpp;

use std::collections::BTreeMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use schema::{ParamSpec, Schema};

use crate::pddl::{parse_domain, DomainDef, Fact, GoalLiteral, ProblemDef, TypedName};
use crate::sketch::{parse_sketch, Sketch};

pub struct DomainPack {
    pub name: &'static str,
    pub domain: &'static str,
    pub sketch: &'static str,
    pub schema: &'static str,
    /// Width the shipped sketch is claimed to have.
    pub width: u32,
    generator: fn(&Params, &mut ChaCha8Rng) -> Result<Instance, GenError>,
}

macro_rules! pack {
    ($name:literal, $width:literal, $module:ident) => {
        DomainPack {
            name: $name,
            domain: include_str!(concat!("../../domains/", $name, "/domain.pddl")),
            sketch: include_str!(concat!("../../domains/", $name, "/sketch.sk")),
            schema: include_str!(concat!("../../domains/", $name, "/gen.schema")),
            width: $width,
            generator: $module::generate,
        }
    };
}

static PACKS: [DomainPack; 7] = [
    pack!("barman", 2, barman),
    pack!("childsnack", 1, childsnack),
    pack!("driverlog", 1, driverlog),
    pack!("floortile", 2, floortile),
    pack!("grid", 1, grid),
    pack!("schedule", 2, schedule),
    pack!("tpp", 1, tpp),
];

pub fn packs() -> &'static [DomainPack] {
    &PACKS
}

pub fn names() -> impl Iterator<Item = &'static str> {
    PACKS.iter().map(|p| p.name)
}

pub fn pack(name: &str) -> Result<&'static DomainPack, GenError> {
    PACKS
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| GenError::UnknownDomain(name.to_string()))
}

/// The sketch that makes SIW_R behave as SIW.
pub const SIW_EMULATION_SKETCH: &str = include_str!("../../domains/siw_emulation.sk");
/// Two rules undoing each other; the termination check cannot certify it.
pub const FLIP_FLOP_SKETCH: &str = include_str!("../../domains/flip_flop.sk");

impl DomainPack {
    pub fn domain_def(&self) -> DomainDef {
        parse_domain(self.domain).expect("shipped domain files parse")
    }

    pub fn sketch(&self) -> Sketch {
        parse_sketch(self.sketch).expect("shipped sketches parse")
    }

    pub fn schema(&self) -> Schema {
        Schema::parse(self.schema).expect("shipped schemas parse")
    }

    pub fn generate(&self, params: &GenParams) -> Result<ProblemDef, GenError> {
        let values = self.schema().resolve(&params.values)?;
        let p = Params(values);
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let inst = (self.generator)(&p, &mut rng)?;
        let mut tag = String::new();
        for (k, v) in &p.0 {
            tag.push_str(&format!("-{}{v}", k.replace('-', "")));
        }
        Ok(inst.into_problem(format!("{}{tag}-s{}", self.name, params.seed), self.name))
    }

    /// Generated instance as PDDL text.
    pub fn generate_text(&self, params: &GenParams) -> Result<String, GenError> {
        Ok(self.generate(params)?.to_pddl())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("unknown domain {0}")]
    UnknownDomain(String),
    #[error("unknown parameter {0}")]
    UnknownParam(String),
    #[error("parameter {name}={value} outside [{min}, {max}]")]
    OutOfBounds { name: String, value: u32, min: u32, max: u32 },
    #[error("malformed parameter list: {0}")]
    Syntax(String),
    #[error("{0}")]
    Infeasible(String),
}

/// Generator knobs by name plus the RNG seed; unspecified knobs take the
/// schema default.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GenParams {
    pub values: BTreeMap<String, u32>,
    pub seed: u64,
}

impl GenParams {
    pub fn new(seed: u64) -> GenParams {
        GenParams {
            values: BTreeMap::new(),
            seed,
        }
    }

    pub fn with(mut self, name: &str, value: u32) -> GenParams {
        self.values.insert(name.to_string(), value);
        self
    }

    /// Parses `name=value` pairs separated by commas or whitespace.
    pub fn parse(text: &str, seed: u64) -> Result<GenParams, GenError> {
        let mut p = GenParams::new(seed);
        for item in text.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| GenError::Syntax(item.to_string()))?;
            let v: u32 = v.trim().parse().map_err(|_| GenError::Syntax(item.to_string()))?;
            p.values.insert(k.trim().to_string(), v);
        }
        Ok(p)
    }
}

impl fmt::Display for GenParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Resolved knobs handed to a generator.
pub(crate) struct Params(BTreeMap<String, u32>);

impl Params {
    pub(crate) fn get(&self, name: &str) -> usize {
        self.0[name] as usize
    }
}

/// Generator output before it is wrapped into a problem definition.
#[derive(Default)]
pub(crate) struct Instance {
    objects: Vec<TypedName>,
    init: Vec<Fact>,
    goal: Vec<GoalLiteral>,
}

impl Instance {
    pub(crate) fn object(&mut self, name: impl Into<String>, ty: &str) -> String {
        let name = name.into();
        self.objects.push(TypedName {
            name: name.clone(),
            ty: ty.to_string(),
        });
        name
    }

    /// Declares `prefix1..prefixN` of the given type.
    pub(crate) fn objects(&mut self, prefix: &str, n: usize, ty: &str) -> Vec<String> {
        (1..=n).map(|i| self.object(format!("{prefix}{i}"), ty)).collect()
    }

    pub(crate) fn init(&mut self, pred: &str, args: &[&str]) {
        self.init.push(Fact::new(pred, args));
    }

    pub(crate) fn goal(&mut self, pred: &str, args: &[&str]) {
        self.goal.push(GoalLiteral {
            fact: Fact::new(pred, args),
            positive: true,
        });
    }

    fn into_problem(self, name: String, domain: &str) -> ProblemDef {
        ProblemDef {
            name,
            domain: domain.to_string(),
            objects: self.objects,
            init: self.init,
            goal: self.goal,
        }
    }
}

/// Fixed instance families used by the benchmark suite and the tests.
pub mod suites {
    use super::GenParams;

    fn p(pairs: &[(&str, u32)], seed: u64) -> GenParams {
        pairs.iter().fold(GenParams::new(seed), |g, (k, v)| g.with(k, *v))
    }

    /// Ten or more desk-scale instances per domain.
    pub fn standard(domain: &str) -> Vec<GenParams> {
        let mut out = Vec::new();
        match domain {
            "barman" => {
                for seed in 1..=10 {
                    let c = 1 + (seed as u32 - 1) % 3;
                    out.push(p(&[("cocktails", c), ("ingredients", 3)], seed));
                }
            }
            "childsnack" => {
                for seed in 1..=10 {
                    let s = seed as u32;
                    out.push(p(
                        &[
                            ("allergic", 1 + s % 3),
                            ("nonallergic", 1 + (s + 1) % 3),
                            ("trays", 1 + s % 2),
                            ("tables", 1 + s % 3),
                            ("extra-gluten-free", 0),
                        ],
                        seed,
                    ));
                }
            }
            "driverlog" => {
                for seed in 1..=10 {
                    let s = seed as u32;
                    out.push(p(
                        &[
                            ("locations", 3 + s % 4),
                            ("drivers", 1 + s % 2),
                            ("trucks", 1 + (s / 2) % 2),
                            ("packages", 1 + s % 4),
                            ("driver-goals", 1),
                            ("truck-goals", 1),
                        ],
                        seed,
                    ));
                }
            }
            "floortile" => {
                for seed in 1..=10 {
                    let s = seed as u32;
                    out.push(p(&[("rows", 2 + s % 3), ("cols", 2 + (s / 3) % 2), ("robots", 1 + s % 2)], seed));
                }
            }
            "grid" => {
                for seed in 1..=10 {
                    let s = seed as u32;
                    out.push(p(
                        &[
                            ("rows", 3 + s % 2),
                            ("cols", 3 + (s / 2) % 2),
                            ("shapes", 1 + s % 2),
                            ("keys", 2 + s % 2),
                            ("goal-keys", 1 + s % 2),
                            ("locks", 1 + s % 3),
                            ("holding", s % 3 / 2),
                        ],
                        seed,
                    ));
                }
            }
            "schedule" => {
                for seed in 1..=10 {
                    let s = seed as u32;
                    out.push(p(&[("parts", 2 + s % 3), ("colours", 1 + s % 3), ("hot", s % 2)], seed));
                }
            }
            "tpp" => {
                for seed in 1..=10 {
                    let s = seed as u32;
                    out.push(p(
                        &[
                            ("markets", 1 + s % 3),
                            ("goods", 1 + s % 3),
                            ("trucks", 1 + s % 2),
                            ("depots", 1),
                            ("max-quantity", 1 + s % 3),
                        ],
                        seed,
                    ));
                }
            }
            _ => {}
        }
        out
    }

    /// Instances small enough to enumerate every reachable state.
    pub fn micro(domain: &str) -> Vec<GenParams> {
        let mut out = Vec::new();
        for seed in 1..=3u64 {
            out.push(match domain {
                "barman" => p(&[("cocktails", 1), ("ingredients", 2)], seed),
                "childsnack" => p(
                    &[("allergic", 1), ("nonallergic", 1), ("trays", 1), ("tables", 1 + seed as u32 % 2)],
                    seed,
                ),
                "driverlog" => p(
                    &[
                        ("locations", 3),
                        ("drivers", 1),
                        ("trucks", 1),
                        ("packages", 1),
                        ("driver-goals", 1),
                        ("truck-goals", 1),
                    ],
                    seed,
                ),
                "floortile" => p(&[("rows", 2 + seed as u32 % 2), ("cols", 2), ("robots", 1)], seed),
                "grid" => p(
                    &[
                        ("rows", 2),
                        ("cols", 3),
                        ("shapes", 1),
                        ("keys", 2),
                        ("goal-keys", 1),
                        ("locks", 1),
                    ],
                    seed,
                ),
                "schedule" => p(&[("parts", 1), ("colours", 2), ("hot", seed as u32 % 2)], seed),
                "tpp" => p(
                    &[("markets", 1), ("goods", 1 + seed as u32 % 2), ("trucks", 1), ("max-quantity", 2)],
                    seed,
                ),
                _ => return Vec::new(),
            });
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{ground, parse_problem};

    #[test]
    fn every_pack_parses() {
        for pk in packs() {
            pk.domain_def();
            pk.sketch();
            let s = pk.schema();
            assert!(!s.params.is_empty(), "{}", pk.name);
        }
    }

    #[test]
    fn defaults_generate_groundable_instances() {
        for pk in packs() {
            let text = pk.generate_text(&GenParams::new(1)).unwrap();
            let d = pk.domain_def();
            let prob = parse_problem(&text, &d).unwrap_or_else(|e| panic!("{}: {e}\n{text}", pk.name));
            let task = ground(&d, &prob).unwrap();
            assert!(!task.is_goal(&task.init), "{}", pk.name);
        }
    }

    #[test]
    fn bounds_are_enforced() {
        let tpp = pack("tpp").unwrap();
        let err = tpp.generate(&GenParams::new(0).with("markets", 99)).unwrap_err();
        assert!(matches!(err, GenError::OutOfBounds { value: 99, .. }));
        assert!(matches!(
            tpp.generate(&GenParams::new(0).with("bogus", 1)),
            Err(GenError::UnknownParam(_))
        ));
        assert!(matches!(pack("hiking"), Err(GenError::UnknownDomain(_))));
    }

    #[test]
    fn params_parse() {
        let p = GenParams::parse("rows=3, cols=4", 9).unwrap();
        assert_eq!(p.values["rows"], 3);
        assert_eq!(p.to_string(), "cols=4,rows=3");
        assert!(GenParams::parse("rows", 0).is_err());
    }
}
