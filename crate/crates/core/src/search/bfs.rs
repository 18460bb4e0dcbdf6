use std::collections::HashSet;

use super::{extract_plan, GoalTest, Node, SearchResult, Status, NO_PARENT};
use crate::pddl::{GroundTask, State};

/// Breadth-first search with duplicate detection; the goal is tested when a
/// node is generated, so a goal root is returned with zero expansions.
pub fn bfs<G: GoalTest + ?Sized>(task: &GroundTask, root: &State, goal: &G, budget: u64) -> SearchResult {
    let mut res = SearchResult {
        status: Status::Exhausted,
        plan: Vec::new(),
        expanded: 0,
        generated: 1,
        effective_width: None,
        end_state: None,
        terminus: None,
        iterations: Vec::new(),
        complete: true,
    };
    if let Some(t) = goal.check(root) {
        res.status = Status::Solved;
        res.end_state = Some(root.clone());
        res.terminus = Some(t);
        return res;
    }
    let mut nodes = vec![Node {
        state: root.clone(),
        parent: NO_PARENT,
        action: 0,
    }];
    let mut closed: HashSet<State> = HashSet::new();
    closed.insert(root.clone());
    let mut acts = Vec::new();
    let mut head = 0;
    while head < nodes.len() {
        res.expanded += 1;
        let parent = head as u32;
        task.applicable_actions(&nodes[head].state, &mut acts);
        for &a in &acts {
            let next = task.apply(&nodes[head].state, a);
            res.generated += 1;
            if res.generated > budget {
                res.status = Status::BudgetExceeded;
                return res;
            }
            if let Some(t) = goal.check(&next) {
                nodes.push(Node { state: next.clone(), parent, action: a });
                res.plan = extract_plan(&nodes, nodes.len() as u32 - 1);
                res.status = Status::Solved;
                res.end_state = Some(next);
                res.terminus = Some(t);
                return res;
            }
            if closed.insert(next.clone()) {
                nodes.push(Node { state: next, parent, action: a });
            }
        }
        head += 1;
    }
    res
}
