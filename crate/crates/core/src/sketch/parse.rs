use thiserror::Error;

use super::{Cond, Effect, FeatureDef, FeatureType, Rule, Sketch};
use crate::features::{feature_expr, parse_term, Macros};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("sketch line {line}: {msg}")]
pub struct SketchError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> SketchError {
    SketchError { line, msg: msg.into() }
}

/// Joins physical lines into logical ones so that an expression may span
/// several lines while its parentheses are open.
fn logical_lines(src: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start = 0;
    let mut depth: i64 = 0;
    for (i, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if cur.is_empty() {
            if line.trim().is_empty() {
                continue;
            }
            start = i + 1;
        }
        cur.push(' ');
        cur.push_str(line.trim());
        depth += line.chars().map(|c| match c {
            '(' | '{' => 1,
            ')' | '}' => -1,
            _ => 0,
        }).sum::<i64>();
        if depth <= 0 {
            out.push((start, cur.trim().to_string()));
            cur.clear();
            depth = 0;
        }
    }
    if !cur.trim().is_empty() {
        out.push((start, cur.trim().to_string()));
    }
    out
}

pub fn parse_sketch(src: &str) -> Result<Sketch, SketchError> {
    let mut sk = Sketch {
        domain: None,
        width: None,
        features: Vec::new(),
        rules: Vec::new(),
    };
    let mut macros = Macros::new();
    for (ln, line) in logical_lines(src) {
        let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line.as_str(), ""));
        let rest = rest.trim();
        match kw {
            "domain" => sk.domain = Some(rest.to_string()),
            "width" => {
                sk.width = Some(rest.parse().map_err(|_| err(ln, format!("bad width {rest}")))?);
            }
            "let" => {
                let (name, body) = rest
                    .split_once(":=")
                    .ok_or_else(|| err(ln, "expected let <name> := <expr>"))?;
                let name = name.trim();
                if name.is_empty() || macros.contains_key(name) {
                    return Err(err(ln, format!("bad or repeated name {name:?}")));
                }
                let term = parse_term(body.trim()).map_err(|e| err(ln, e.to_string()))?;
                let term = substitute(&term, &macros);
                macros.insert(name.to_string(), term);
            }
            "feature" => {
                let (head, body) = rest
                    .split_once(":=")
                    .ok_or_else(|| err(ln, "expected feature <name> : <type> := <expr>"))?;
                let (name, ty) = head
                    .split_once(':')
                    .ok_or_else(|| err(ln, "missing feature type"))?;
                let name = name.trim().to_string();
                if sk.feature_index(&name).is_some() {
                    return Err(err(ln, format!("duplicate feature {name}")));
                }
                let ty = match ty.trim() {
                    "bool" => FeatureType::Bool,
                    "num" => FeatureType::Num,
                    other => return Err(err(ln, format!("unknown feature type {other}"))),
                };
                let term = parse_term(body.trim()).map_err(|e| err(ln, e.to_string()))?;
                let expr = feature_expr(&term, &macros).map_err(|e| err(ln, e.to_string()))?;
                if expr.is_boolean() != (ty == FeatureType::Bool) {
                    return Err(err(ln, format!("feature {name} declared with the wrong type")));
                }
                sk.features.push(FeatureDef { name, ty, expr });
            }
            "rule" => {
                let rule = parse_rule(&sk, ln, rest)?;
                if sk.rule_index(&rule.id).is_some() {
                    return Err(err(ln, format!("duplicate rule id {}", rule.id)));
                }
                sk.rules.push(rule);
            }
            other => return Err(err(ln, format!("unknown directive {other}"))),
        }
    }
    Ok(sk)
}

fn substitute(t: &crate::features::Term, macros: &Macros) -> crate::features::Term {
    if t.args.is_empty() {
        if let Some(m) = macros.get(&t.head) {
            return m.clone();
        }
    }
    crate::features::Term {
        head: t.head.clone(),
        args: t.args.iter().map(|a| substitute(a, macros)).collect(),
        offset: t.offset,
    }
}

fn braces(s: &str, ln: usize) -> Result<(&str, &str), SketchError> {
    let s = s.trim();
    let s = s.strip_prefix('{').ok_or_else(|| err(ln, "expected '{'"))?;
    let close = s.find('}').ok_or_else(|| err(ln, "expected '}'"))?;
    Ok((&s[..close], &s[close + 1..]))
}

fn items(s: &str) -> impl Iterator<Item = String> + '_ {
    s.split(',')
        .map(|x| x.chars().filter(|c| !c.is_whitespace()).collect::<String>())
        .filter(|x| !x.is_empty())
}

fn parse_rule(sk: &Sketch, ln: usize, rest: &str) -> Result<Rule, SketchError> {
    let brace = rest.find('{').ok_or_else(|| err(ln, "expected '{'"))?;
    let label = rest[..brace].trim();
    let id = if label.is_empty() {
        format!("r{}", sk.rules.len() + 1)
    } else {
        label.to_string()
    };
    let (conds_src, after) = braces(&rest[brace..], ln)?;
    let after = after
        .trim()
        .strip_prefix("->")
        .ok_or_else(|| err(ln, "expected '->' between condition and effect"))?;
    let (effs_src, tail) = braces(after, ln)?;
    if !tail.trim().is_empty() {
        return Err(err(ln, "trailing text after rule"));
    }
    let lookup = |name: &str, want: Option<FeatureType>| -> Result<usize, SketchError> {
        let i = sk
            .feature_index(name)
            .ok_or_else(|| err(ln, format!("unknown feature {name}")))?;
        if let Some(t) = want {
            if sk.features[i].ty != t {
                return Err(err(ln, format!("feature {name} used with the wrong type")));
            }
        }
        Ok(i)
    };
    let mut conds: Vec<Cond> = Vec::new();
    for it in items(conds_src) {
        let c = if let Some(n) = it.strip_suffix("=0") {
            Cond::Zero(lookup(n, Some(FeatureType::Num))?)
        } else if let Some(n) = it.strip_suffix(">0") {
            Cond::Positive(lookup(n, Some(FeatureType::Num))?)
        } else if let Some(n) = it.strip_prefix('!') {
            Cond::False(lookup(n, Some(FeatureType::Bool))?)
        } else {
            Cond::True(lookup(&it, Some(FeatureType::Bool))?)
        };
        if conds.iter().any(|x| x.feature() == c.feature()) {
            return Err(err(ln, format!("feature {it} appears twice in the condition")));
        }
        conds.push(c);
    }
    let mut effects: Vec<Effect> = Vec::new();
    for it in items(effs_src) {
        let e = if let Some(n) = it.strip_suffix("++") {
            Effect::Inc(lookup(n, Some(FeatureType::Num))?)
        } else if let Some(n) = it.strip_suffix("--") {
            Effect::Dec(lookup(n, Some(FeatureType::Num))?)
        } else if let Some(n) = it.strip_suffix('?') {
            Effect::Any(lookup(n, None)?)
        } else if let Some(n) = it.strip_prefix('!') {
            Effect::False(lookup(n, Some(FeatureType::Bool))?)
        } else {
            Effect::True(lookup(&it, Some(FeatureType::Bool))?)
        };
        if effects.iter().any(|x| x.feature() == e.feature()) {
            return Err(err(ln, format!("feature {it} appears twice in the effect")));
        }
        effects.push(e);
    }
    Ok(Rule { id, conds, effects })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SRC: &str = "
        # two features
        domain demo
        width 1
        let x := diff(goal(primitive(at,0,1)),
                      primitive(at,0,1))
        feature g : num := count(x)
        feature b : bool := nonempty(primitive(holding,0))
        rule { g>0, !b } -> { b, g? }
        rule fin { g>0, b } -> { g--, !b }
    ";

    #[test]
    fn parses_and_round_trips() {
        let sk = parse_sketch(SRC).unwrap();
        assert_eq!(sk.features.len(), 2);
        assert_eq!(sk.rules[0].id, "r1");
        assert_eq!(sk.rules[1].id, "fin");
        assert_eq!(sk.rules[1].effects, vec![Effect::Dec(0), Effect::False(1)]);
        let again = parse_sketch(&sk.to_string()).unwrap();
        assert_eq!(again, sk);
    }

    #[test]
    fn reports_unknown_and_mistyped_features() {
        let bad = SRC.replace("{ g--, !b }", "{ h--, !b }");
        assert!(parse_sketch(&bad).unwrap_err().msg.contains("unknown feature h"));
        let bad = SRC.replace("{ g>0, !b }", "{ g, !b }");
        assert!(parse_sketch(&bad).unwrap_err().msg.contains("wrong type"));
        let bad = SRC.replace("{ b, g? }", "{ b, b? }");
        assert!(parse_sketch(&bad).unwrap_err().msg.contains("twice"));
        let bad = SRC.replace("num := count(x)", "bool := count(x)");
        assert!(parse_sketch(&bad).is_err());
    }
}
