use std::collections::HashMap;
use std::fmt::Write;

use super::ast::{DomainDef, ProblemDef};
use super::state::State;

pub type AtomId = u32;
pub type ActionId = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroundAtom {
    pub pred: u32,
    pub args: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundAction {
    pub schema: u32,
    pub args: Vec<u32>,
    pub pre_pos: Vec<AtomId>,
    pub pre_neg: Vec<AtomId>,
    pub add: Vec<AtomId>,
    pub del: Vec<AtomId>,
}

/// A fully grounded STRIPS task over a dense atom index.
#[derive(Clone, Debug)]
pub struct GroundTask {
    pub domain: DomainDef,
    pub problem: ProblemDef,
    /// Domain constants followed by problem objects.
    pub objects: Vec<String>,
    pub object_types: Vec<String>,
    pub atoms: Vec<GroundAtom>,
    pub is_static: Vec<bool>,
    pub actions: Vec<GroundAction>,
    pub init: State,
    pub goal_pos: Vec<AtomId>,
    pub goal_neg: Vec<AtomId>,
    pub(crate) object_index: HashMap<String, u32>,
    pub(crate) atom_index: HashMap<GroundAtom, AtomId>,
    pub(crate) atoms_by_pred: Vec<Vec<AtomId>>,
    pub(crate) static_pred: Vec<bool>,
    pub(crate) fluent_id: Vec<u32>,
    pub(crate) num_fluents: usize,
    pub(crate) trigger: Vec<Vec<ActionId>>,
    pub(crate) untriggered: Vec<ActionId>,
}

pub const NOT_FLUENT: u32 = u32::MAX;

impl GroundTask {
    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    /// Atoms that some action can add or delete.
    pub fn num_fluents(&self) -> usize {
        self.num_fluents
    }

    /// Dense index of a non-static atom, or [`NOT_FLUENT`].
    #[inline]
    pub fn fluent_id(&self, atom: AtomId) -> u32 {
        self.fluent_id[atom as usize]
    }

    pub fn predicate_id(&self, name: &str) -> Option<u32> {
        self.domain.predicates.iter().position(|p| p.name == name).map(|i| i as u32)
    }

    pub fn predicate_arity(&self, pred: u32) -> usize {
        self.domain.predicates[pred as usize].params.len()
    }

    pub fn predicate_is_static(&self, pred: u32) -> bool {
        self.static_pred[pred as usize]
    }

    pub fn atoms_of(&self, pred: u32) -> &[AtomId] {
        &self.atoms_by_pred[pred as usize]
    }

    pub fn object_id(&self, name: &str) -> Option<u32> {
        self.object_index.get(name).copied()
    }

    pub fn atom_id(&self, pred: &str, args: &[&str]) -> Option<AtomId> {
        let pred = self.predicate_id(pred)?;
        let args = args.iter().map(|a| self.object_id(a)).collect::<Option<Vec<_>>>()?;
        self.atom_index.get(&GroundAtom { pred, args }).copied()
    }

    pub fn atom_name(&self, atom: AtomId) -> String {
        let a = &self.atoms[atom as usize];
        let mut s = format!("({}", self.domain.predicates[a.pred as usize].name);
        for o in &a.args {
            let _ = write!(s, " {}", self.objects[*o as usize]);
        }
        s.push(')');
        s
    }

    pub fn action_name(&self, action: ActionId) -> String {
        let a = &self.actions[action as usize];
        let mut s = format!("({}", self.domain.actions[a.schema as usize].name);
        for o in &a.args {
            let _ = write!(s, " {}", self.objects[*o as usize]);
        }
        s.push(')');
        s
    }

    pub fn empty_state(&self) -> State {
        State::empty(self.atoms.len())
    }

    #[inline]
    pub fn applicable(&self, s: &State, action: ActionId) -> bool {
        let a = &self.actions[action as usize];
        a.pre_pos.iter().all(|&p| s.contains(p)) && !a.pre_neg.iter().any(|&p| s.contains(p))
    }

    pub fn apply(&self, s: &State, action: ActionId) -> State {
        let a = &self.actions[action as usize];
        let mut next = s.clone();
        for &d in &a.del {
            next.remove(d);
        }
        for &p in &a.add {
            next.insert(p);
        }
        next
    }

    /// Applicable actions in ascending index order.
    pub fn applicable_actions(&self, s: &State, out: &mut Vec<ActionId>) {
        out.clear();
        out.extend(self.untriggered.iter().copied().filter(|&a| self.applicable(s, a)));
        for atom in s.iter() {
            for &a in &self.trigger[atom as usize] {
                if self.applicable(s, a) {
                    out.push(a);
                }
            }
        }
        out.sort_unstable();
    }

    pub fn successors(&self, s: &State) -> Vec<(ActionId, State)> {
        let mut acts = Vec::new();
        self.applicable_actions(s, &mut acts);
        acts.into_iter().map(|a| (a, self.apply(s, a))).collect()
    }

    pub fn is_goal(&self, s: &State) -> bool {
        self.goal_pos.iter().all(|&g| s.contains(g)) && !self.goal_neg.iter().any(|&g| s.contains(g))
    }

    /// Number of goal literals that `s` violates.
    pub fn unsatisfied_goals(&self, s: &State) -> usize {
        self.goal_pos.iter().filter(|&&g| !s.contains(g)).count()
            + self.goal_neg.iter().filter(|&&g| s.contains(g)).count()
    }

    pub fn state_atoms(&self, s: &State) -> Vec<String> {
        s.iter().map(|a| self.atom_name(a)).collect()
    }

    /// Finds the ground action written as `(name arg ...)`.
    pub fn find_action(&self, schema: &str, args: &[&str]) -> Option<ActionId> {
        let sid = self.domain.actions.iter().position(|a| a.name == schema)? as u32;
        let args = args.iter().map(|a| self.object_id(a)).collect::<Option<Vec<_>>>()?;
        self.actions
            .iter()
            .position(|a| a.schema == sid && a.args == args)
            .map(|i| i as u32)
    }
}
