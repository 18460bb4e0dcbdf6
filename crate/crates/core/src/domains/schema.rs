use std::collections::BTreeMap;

use serde::Deserialize;

use super::GenError;

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    min: u32,
    max: u32,
    default: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamSpec {
    pub name: String,
    pub min: u32,
    pub max: u32,
    pub default: u32,
}

/// Parameter bounds read from a pack's `gen.schema` (TOML, one table per knob).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schema {
    pub params: Vec<ParamSpec>,
}

impl Schema {
    pub fn parse(src: &str) -> Result<Schema, String> {
        let raw: BTreeMap<String, RawSpec> = toml::from_str(src).map_err(|e| e.to_string())?;
        let mut params = Vec::new();
        for (name, r) in raw {
            if !(r.min <= r.default && r.default <= r.max) {
                return Err(format!("{name}: default {} outside [{}, {}]", r.default, r.min, r.max));
            }
            params.push(ParamSpec {
                name,
                min: r.min,
                max: r.max,
                default: r.default,
            });
        }
        Ok(Schema { params })
    }

    /// Fills in defaults and checks bounds.
    pub fn resolve(&self, given: &BTreeMap<String, u32>) -> Result<BTreeMap<String, u32>, GenError> {
        if let Some(k) = given.keys().find(|k| !self.params.iter().any(|p| &p.name == *k)) {
            return Err(GenError::UnknownParam(k.clone()));
        }
        let mut out = BTreeMap::new();
        for p in &self.params {
            let v = given.get(&p.name).copied().unwrap_or(p.default);
            if v < p.min || v > p.max {
                return Err(GenError::OutOfBounds {
                    name: p.name.clone(),
                    value: v,
                    min: p.min,
                    max: p.max,
                });
            }
            out.insert(p.name.clone(), v);
        }
        Ok(out)
    }
}
