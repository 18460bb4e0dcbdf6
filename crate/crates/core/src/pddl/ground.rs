use std::collections::{HashMap, HashSet};

use super::ast::{Condition, DomainDef, ProblemDef, Term};
use super::state::State;
use super::task::{ActionId, AtomId, GroundAction, GroundAtom, GroundTask, NOT_FLUENT};
use super::PddlError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroundLimits {
    pub max_atoms: usize,
    pub max_actions: usize,
}

impl Default for GroundLimits {
    fn default() -> Self {
        GroundLimits {
            max_atoms: 200_000,
            max_actions: 2_000_000,
        }
    }
}

pub fn ground(domain: &DomainDef, problem: &ProblemDef) -> Result<GroundTask, PddlError> {
    ground_with(domain, problem, GroundLimits::default())
}

struct Builder {
    atoms: Vec<GroundAtom>,
    index: HashMap<GroundAtom, AtomId>,
    max_atoms: usize,
}

impl Builder {
    fn intern(&mut self, atom: GroundAtom) -> Result<AtomId, PddlError> {
        if let Some(&id) = self.index.get(&atom) {
            return Ok(id);
        }
        if self.atoms.len() >= self.max_atoms {
            return Err(PddlError::Resource {
                resource: "ground atoms",
                limit: self.max_atoms,
            });
        }
        let id = self.atoms.len() as AtomId;
        self.index.insert(atom.clone(), id);
        self.atoms.push(atom);
        Ok(id)
    }
}

/// A precondition literal whose truth never changes, checked during enumeration.
enum StaticCheck {
    Atom { pred: u32, args: Vec<Slot>, positive: bool },
    Equal { left: Slot, right: Slot, positive: bool },
}

#[derive(Clone, Copy)]
enum Slot {
    Param(usize),
    Obj(u32),
}

pub fn ground_with(domain: &DomainDef, problem: &ProblemDef, limits: GroundLimits) -> Result<GroundTask, PddlError> {
    let mut objects = Vec::new();
    let mut object_types = Vec::new();
    let mut object_index = HashMap::new();
    for o in domain.constants.iter().chain(problem.objects.iter()) {
        if object_index.contains_key(&o.name) {
            continue;
        }
        object_index.insert(o.name.clone(), objects.len() as u32);
        objects.push(o.name.clone());
        object_types.push(o.ty.clone());
    }
    let pred_id: HashMap<&str, u32> = domain
        .predicates
        .iter()
        .enumerate()
        .map(|(i, p)| (p.name.as_str(), i as u32))
        .collect();
    let mut static_pred = vec![true; domain.predicates.len()];
    for a in &domain.actions {
        for e in a.add.iter().chain(a.del.iter()) {
            static_pred[pred_id[e.pred.as_str()] as usize] = false;
        }
    }
    let obj = |name: &str| -> Result<u32, PddlError> {
        object_index.get(name).copied().ok_or_else(|| PddlError::Parse {
            line: 0,
            col: 0,
            msg: format!("unknown object {name}"),
        })
    };
    let mut init_set: HashSet<GroundAtom> = HashSet::new();
    let mut init_list = Vec::new();
    for f in &problem.init {
        let atom = GroundAtom {
            pred: pred_id[f.pred.as_str()],
            args: f.args.iter().map(|a| obj(a)).collect::<Result<_, _>>()?,
        };
        if init_set.insert(atom.clone()) {
            init_list.push(atom);
        }
    }
    let mut b = Builder {
        atoms: Vec::new(),
        index: HashMap::new(),
        max_atoms: limits.max_atoms,
    };
    let mut init_ids = Vec::new();
    for a in init_list {
        init_ids.push(b.intern(a)?);
    }
    let mut goal_pos = Vec::new();
    let mut goal_neg = Vec::new();
    for g in &problem.goal {
        let atom = GroundAtom {
            pred: pred_id[g.fact.pred.as_str()],
            args: g.fact.args.iter().map(|a| obj(a)).collect::<Result<_, _>>()?,
        };
        let id = b.intern(atom)?;
        if g.positive {
            goal_pos.push(id);
        } else {
            goal_neg.push(id);
        }
    }

    let mut actions: Vec<GroundAction> = Vec::new();
    for (si, schema) in domain.actions.iter().enumerate() {
        let slot = |t: &Term| -> Result<Slot, PddlError> {
            Ok(match t {
                Term::Var(v) => Slot::Param(schema.params.iter().position(|p| &p.name == v).expect("checked by parser")),
                Term::Const(c) => Slot::Obj(obj(c)?),
            })
        };
        let candidates: Vec<Vec<u32>> = schema
            .params
            .iter()
            .map(|p| {
                (0..objects.len() as u32)
                    .filter(|&o| domain.is_subtype(&object_types[o as usize], &p.ty))
                    .collect()
            })
            .collect();
        // checks[d] are the static literals fully bound once d parameters are assigned.
        let mut checks: Vec<Vec<StaticCheck>> = (0..=schema.params.len()).map(|_| Vec::new()).collect();
        let ready = |slots: &[Slot]| {
            slots
                .iter()
                .map(|s| match s {
                    Slot::Param(i) => i + 1,
                    Slot::Obj(_) => 0,
                })
                .max()
                .unwrap_or(0)
        };
        for c in &schema.precondition {
            match c {
                Condition::Atom { atom, positive } => {
                    let pred = pred_id[atom.pred.as_str()];
                    if static_pred[pred as usize] {
                        let args = atom.args.iter().map(&slot).collect::<Result<Vec<_>, _>>()?;
                        let d = ready(&args);
                        checks[d].push(StaticCheck::Atom { pred, args, positive: *positive });
                    }
                }
                Condition::Equal { left, right, positive } => {
                    let (l, r) = (slot(left)?, slot(right)?);
                    let d = ready(&[l, r]);
                    checks[d].push(StaticCheck::Equal { left: l, right: r, positive: *positive });
                }
            }
        }
        let mut assignment = Vec::with_capacity(schema.params.len());
        let mut bindings = Vec::new();
        enumerate(&candidates, &checks, &init_set, &mut assignment, &mut bindings, limits.max_actions)?;
        for args in bindings {
            let inst = |a: &super::ast::AtomExpr| GroundAtom {
                pred: pred_id[a.pred.as_str()],
                args: a
                    .args
                    .iter()
                    .map(|t| match t {
                        Term::Var(v) => args[schema.params.iter().position(|p| &p.name == v).unwrap()],
                        Term::Const(c) => object_index[c.as_str()],
                    })
                    .collect(),
            };
            let mut pre_pos = Vec::new();
            let mut pre_neg = Vec::new();
            for c in &schema.precondition {
                if let Condition::Atom { atom, positive } = c {
                    let g = inst(atom);
                    if static_pred[g.pred as usize] {
                        if *positive {
                            // Static positive preconditions hold by construction; keep them
                            // so that plans can be replayed against the listed preconditions.
                            pre_pos.push(b.intern(g)?);
                        }
                        continue;
                    }
                    let id = b.intern(g)?;
                    if *positive {
                        pre_pos.push(id);
                    } else {
                        pre_neg.push(id);
                    }
                }
            }
            let mut add = Vec::new();
            for e in &schema.add {
                add.push(b.intern(inst(e))?);
            }
            let mut del = Vec::new();
            for e in &schema.del {
                del.push(b.intern(inst(e))?);
            }
            for v in [&mut pre_pos, &mut pre_neg, &mut add, &mut del] {
                v.sort_unstable();
                v.dedup();
            }
            del.retain(|d| add.binary_search(d).is_err());
            if pre_pos.iter().any(|p| pre_neg.binary_search(p).is_ok()) {
                continue;
            }
            if actions.len() >= limits.max_actions {
                return Err(PddlError::Resource {
                    resource: "ground actions",
                    limit: limits.max_actions,
                });
            }
            actions.push(GroundAction {
                schema: si as u32,
                args,
                pre_pos,
                pre_neg,
                add,
                del,
            });
        }
    }

    let atoms = b.atoms;
    let is_static: Vec<bool> = atoms.iter().map(|a| static_pred[a.pred as usize]).collect();
    let mut fluent_id = vec![NOT_FLUENT; atoms.len()];
    let mut num_fluents = 0;
    for (i, s) in is_static.iter().enumerate() {
        if !s {
            fluent_id[i] = num_fluents as u32;
            num_fluents += 1;
        }
    }
    let mut atoms_by_pred = vec![Vec::new(); domain.predicates.len()];
    for (i, a) in atoms.iter().enumerate() {
        atoms_by_pred[a.pred as usize].push(i as AtomId);
    }
    let mut trigger = vec![Vec::new(); atoms.len()];
    let mut untriggered: Vec<ActionId> = Vec::new();
    for (i, a) in actions.iter().enumerate() {
        match a.pre_pos.iter().find(|&&p| !is_static[p as usize]) {
            Some(&p) => trigger[p as usize].push(i as ActionId),
            None => untriggered.push(i as ActionId),
        }
    }
    let init = State::from_atoms(atoms.len(), init_ids);
    Ok(GroundTask {
        domain: domain.clone(),
        problem: problem.clone(),
        objects,
        object_types,
        atom_index: b.index,
        atoms,
        is_static,
        actions,
        init,
        goal_pos,
        goal_neg,
        object_index,
        atoms_by_pred,
        static_pred,
        fluent_id,
        num_fluents,
        trigger,
        untriggered,
    })
}

fn enumerate(
    candidates: &[Vec<u32>],
    checks: &[Vec<StaticCheck>],
    init: &HashSet<GroundAtom>,
    assignment: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
    max_actions: usize,
) -> Result<(), PddlError> {
    let depth = assignment.len();
    let resolve = |s: &Slot, asg: &[u32]| match s {
        Slot::Param(i) => asg[*i],
        Slot::Obj(o) => *o,
    };
    for c in &checks[depth] {
        let ok = match c {
            StaticCheck::Atom { pred, args, positive } => {
                let atom = GroundAtom {
                    pred: *pred,
                    args: args.iter().map(|s| resolve(s, assignment)).collect(),
                };
                init.contains(&atom) == *positive
            }
            StaticCheck::Equal { left, right, positive } => {
                (resolve(left, assignment) == resolve(right, assignment)) == *positive
            }
        };
        if !ok {
            return Ok(());
        }
    }
    if depth == candidates.len() {
        if out.len() >= max_actions {
            return Err(PddlError::Resource {
                resource: "ground actions",
                limit: max_actions,
            });
        }
        out.push(assignment.clone());
        return Ok(());
    }
    for &o in &candidates[depth] {
        assignment.push(o);
        enumerate(candidates, checks, init, assignment, out, max_actions)?;
        assignment.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{parse_domain, parse_problem};

    const DOM: &str = "(define (domain line)
      (:requirements :strips :typing :negative-preconditions :equality)
      (:types cell)
      (:predicates (at ?c - cell) (adj ?a ?b - cell) (seen ?c - cell))
      (:action move :parameters (?a ?b - cell)
        :precondition (and (at ?a) (adj ?a ?b) (not (= ?a ?b)))
        :effect (and (not (at ?a)) (at ?b) (seen ?b)))
      (:action stay :parameters (?a - cell)
        :precondition (at ?a)
        :effect (and (at ?a) (not (at ?a)))))";

    fn task(objs: &str) -> GroundTask {
        let d = parse_domain(DOM).unwrap();
        let p = parse_problem(
            &format!(
                "(define (problem p) (:domain line) (:objects {objs}) \
                 (:init (at c1) (adj c1 c2) (adj c2 c1) (adj c2 c3) (adj c3 c2)) (:goal (seen c3)))"
            ),
            &d,
        )
        .unwrap();
        ground(&d, &p).unwrap()
    }

    #[test]
    fn static_pruning_and_normalisation() {
        let t = task("c1 c2 c3 - cell");
        // Four adjacency pairs give four moves; every cell gives one stay.
        assert_eq!(t.actions.len(), 7);
        let stay = t.actions.iter().find(|a| a.schema == 1).unwrap();
        assert_eq!(stay.add.len(), 1);
        assert!(stay.del.is_empty());
        assert!(t.predicate_is_static(t.predicate_id("adj").unwrap()));
        // 3 at + 4 adj + 3 seen.
        assert_eq!(t.num_atoms(), 10);
        assert_eq!(t.num_fluents(), 6);
        for (i, a) in t.atoms.iter().enumerate() {
            assert_eq!(t.is_static[i], a.pred == 1);
        }
    }

    #[test]
    fn object_order_changes_indices_not_sets() {
        let a = task("c1 c2 c3 - cell");
        let b = task("c3 c1 c2 - cell");
        let names = |t: &GroundTask| {
            let mut v: Vec<String> = (0..t.actions.len() as u32).map(|i| t.action_name(i)).collect();
            v.sort();
            v
        };
        assert_eq!(names(&a), names(&b));
    }

    #[test]
    fn successors_match_naive_scan() {
        let t = task("c1 c2 c3 - cell");
        let mut s = t.init.clone();
        for _ in 0..3 {
            let naive: Vec<u32> = (0..t.actions.len() as u32).filter(|&a| t.applicable(&s, a)).collect();
            let fast: Vec<u32> = t.successors(&s).into_iter().map(|(a, _)| a).collect();
            assert_eq!(naive, fast);
            s = t.apply(&s, *fast.last().unwrap());
        }
    }

    #[test]
    fn budget_is_enforced() {
        let d = parse_domain(DOM).unwrap();
        let p = parse_problem(
            "(define (problem p) (:domain line) (:objects c1 c2 c3 - cell) (:init (at c1) (adj c1 c2)) (:goal (seen c2)))",
            &d,
        )
        .unwrap();
        let limits = GroundLimits { max_atoms: 2, max_actions: 100 };
        let e = ground_with(&d, &p, limits).unwrap_err();
        assert!(e.to_string().contains("ground atoms"));
    }
}
