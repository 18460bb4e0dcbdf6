use serde::Serialize;

use super::{Cond, Effect, Rule, Sketch};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Case {
    /// Decrements a numerical feature that no other rule can increase.
    A,
    /// Flips a Boolean feature that no other rule can flip back.
    B,
    /// Every remaining rule that could undo the change is separated from it
    /// by complementary conditions on a feature marked in cases A or B.
    D,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Elimination {
    pub rule: usize,
    pub case: Case,
    pub feature: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TerminationReport {
    pub terminating: bool,
    pub eliminations: Vec<Elimination>,
    pub remaining: Vec<usize>,
}

impl TerminationReport {
    pub fn order(&self) -> Vec<usize> {
        self.eliminations.iter().map(|e| e.rule).collect()
    }
}

/// A change the rule makes that another rule might undo.
#[derive(Clone, Copy)]
enum Change {
    Dec(usize),
    /// Boolean `f` moved to the given value against its condition.
    Flip(usize, bool),
}

fn changes(r: &Rule) -> Vec<Change> {
    let mut out = Vec::new();
    for e in &r.effects {
        match *e {
            Effect::Dec(f) => out.push(Change::Dec(f)),
            Effect::True(f) if r.cond_on(f) == Some(Cond::False(f)) => out.push(Change::Flip(f, true)),
            Effect::False(f) if r.cond_on(f) == Some(Cond::True(f)) => out.push(Change::Flip(f, false)),
            _ => {}
        }
    }
    out
}

/// Whether `other` can move the feature back against `change`. For Boolean
/// features only the effect matters, not whether `other`'s condition matches.
fn undoes(other: &Rule, change: Change) -> bool {
    match change {
        Change::Dec(f) => matches!(other.effect_on(f), Some(Effect::Inc(_) | Effect::Any(_))),
        Change::Flip(f, to) => match other.effect_on(f) {
            Some(Effect::Any(_)) => true,
            Some(Effect::True(_)) => !to,
            Some(Effect::False(_)) => to,
            _ => false,
        },
    }
}

fn separated(r: &Rule, other: &Rule, marked: &[bool]) -> bool {
    r.conds
        .iter()
        .any(|c| marked[c.feature()] && other.conds.iter().any(|o| c.complements(*o)))
}

/// The first way, in the order A, B, D, that `rule` can be eliminated given
/// the rules still `remaining` and the `marked` features.
pub fn eligible(sketch: &Sketch, remaining: &[usize], marked: &[bool], rule: usize) -> Option<(Case, usize)> {
    let r = &sketch.rules[rule];
    let others = || remaining.iter().filter(move |&&o| o != rule).map(|&o| &sketch.rules[o]);
    let ch = changes(r);
    for c in &ch {
        if let Change::Dec(f) = *c {
            if !others().any(|o| undoes(o, *c)) {
                return Some((Case::A, f));
            }
        }
    }
    for c in &ch {
        if let Change::Flip(f, _) = *c {
            if !others().any(|o| undoes(o, *c)) {
                return Some((Case::B, f));
            }
        }
    }
    for c in &ch {
        let f = match *c {
            Change::Dec(f) | Change::Flip(f, _) => f,
        };
        if others().filter(|o| undoes(o, *c)).all(|o| separated(r, o, marked)) {
            return Some((Case::D, f));
        }
    }
    None
}

/// Sufficient test for termination by iterated rule elimination. Each step
/// tries case A on every remaining rule in file order, then B, then D.
/// Features used by A and B eliminations become marked.
pub fn check_termination(sketch: &Sketch) -> TerminationReport {
    let mut remaining: Vec<usize> = (0..sketch.rules.len()).collect();
    let mut marked = vec![false; sketch.features.len()];
    let mut eliminations = Vec::new();
    'outer: while !remaining.is_empty() {
        for want in [Case::A, Case::B, Case::D] {
            for (pos, &r) in remaining.iter().enumerate() {
                match eligible(sketch, &remaining, &marked, r) {
                    Some((case, f)) if case == want => {
                        if case != Case::D {
                            marked[f] = true;
                        }
                        eliminations.push(Elimination { rule: r, case, feature: f });
                        remaining.remove(pos);
                        continue 'outer;
                    }
                    _ => {}
                }
            }
        }
        break;
    }
    TerminationReport {
        terminating: remaining.is_empty(),
        eliminations,
        remaining,
    }
}

/// Checks that eliminating rules in exactly the given order is valid.
/// `Err(i)` names the first position whose rule is not eliminable then.
pub fn replay_order(sketch: &Sketch, order: &[usize]) -> Result<Vec<Elimination>, usize> {
    let mut remaining: Vec<usize> = (0..sketch.rules.len()).collect();
    let mut marked = vec![false; sketch.features.len()];
    let mut out = Vec::new();
    for (i, &r) in order.iter().enumerate() {
        let pos = remaining.iter().position(|&x| x == r).ok_or(i)?;
        let (case, f) = eligible(sketch, &remaining, &marked, r).ok_or(i)?;
        if case != Case::D {
            marked[f] = true;
        }
        remaining.remove(pos);
        out.push(Elimination { rule: r, case, feature: f });
    }
    if remaining.is_empty() {
        Ok(out)
    } else {
        Err(order.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sketch::parse_sketch;

    #[test]
    fn flip_flop_is_not_proved() {
        let sk = parse_sketch(
            "feature b : bool := empty(primitive(p,0))
             rule { b } -> { !b }
             rule { !b } -> { b }",
        )
        .unwrap();
        let rep = check_termination(&sk);
        assert!(!rep.terminating);
        assert_eq!(rep.remaining, vec![0, 1]);
    }

    #[test]
    fn counter_with_one_shot_reset() {
        // r2 may raise n, but it also makes b true and nothing makes b false.
        let sk = parse_sketch(
            "feature n : num := count(primitive(p,0))
             feature b : bool := empty(primitive(q,0))
             rule { n>0, b } -> { n-- }
             rule { !b } -> { n?, b }
             rule { !b } -> { b }",
        )
        .unwrap();
        let rep = check_termination(&sk);
        assert!(rep.terminating);
        let steps: Vec<(usize, Case)> = rep.eliminations.iter().map(|e| (e.rule, e.case)).collect();
        assert_eq!(steps, vec![(1, Case::B), (0, Case::A), (2, Case::B)]);
    }

    #[test]
    fn separation_by_marked_feature() {
        let sk = parse_sketch(
            "feature l : num := count(primitive(p,0))
             feature k : num := count(primitive(q,0))
             feature o : bool := empty(primitive(r,0))
             feature t : bool := empty(primitive(s,0))
             rule { l>0 } -> { l--, k?, o?, t? }
             rule { l=0, k>0 } -> { k--, o?, t? }
             rule { l>0, !o } -> { o, t? }
             rule { l=0, !t } -> { o?, t }",
        )
        .unwrap();
        let rep = check_termination(&sk);
        assert!(rep.terminating);
        let steps: Vec<(usize, Case)> = rep.eliminations.iter().map(|e| (e.rule, e.case)).collect();
        assert_eq!(steps, vec![(0, Case::A), (1, Case::A), (2, Case::D), (3, Case::B)]);
    }

    #[test]
    fn rule_without_changes_is_never_eliminated() {
        let sk = parse_sketch(
            "feature n : num := count(primitive(p,0))
             rule { } -> { n? }",
        )
        .unwrap();
        assert!(!check_termination(&sk).terminating);
    }

    #[test]
    fn unguarded_increase_blocks_decrease() {
        let sk = parse_sketch(
            "feature n : num := count(primitive(p,0))
             rule { n>0 } -> { n-- }
             rule { } -> { n++ }",
        )
        .unwrap();
        assert!(!check_termination(&sk).terminating);
    }
}
