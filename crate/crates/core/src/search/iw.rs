use super::novelty::NoveltyTable;
use super::{extract_plan, GoalTest, IterationStats, Node, SearchResult, Status, MAX_WIDTH, NO_PARENT};
use crate::pddl::{GroundTask, State};

/// Upper bound on IW(k) expansions over `n` atoms: the sum of C(n, m) for m <= k.
pub fn node_bound(n: u64, k: u32) -> u128 {
    let mut total: u128 = 0;
    let mut c: u128 = 1;
    for m in 0..=k as u64 {
        if m > n {
            break;
        }
        if m > 0 {
            c = c * (n - m + 1) as u128 / m as u128;
        }
        total += c;
    }
    total
}

/// One IW(k) call: breadth-first search that discards every generated state
/// whose novelty exceeds `k`. A fresh novelty table is used for each call.
pub fn iw_k<G: GoalTest + ?Sized>(task: &GroundTask, root: &State, goal: &G, k: u32, budget: u64) -> SearchResult {
    assert!(k <= MAX_WIDTH, "width {k} exceeds the supported maximum of {MAX_WIDTH}");
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
    let finish = |mut res: SearchResult| {
        debug_assert!(res.expanded as u128 <= node_bound(task.num_atoms() as u64, k));
        res.iterations.push(IterationStats {
            k,
            expanded: res.expanded,
            generated: res.generated,
            status: res.status,
        });
        if res.status == Status::Solved {
            res.effective_width = Some(k);
        }
        res
    };
    if res.generated > budget {
        res.status = Status::BudgetExceeded;
        return finish(res);
    }
    if let Some(t) = goal.check(root) {
        res.status = Status::Solved;
        res.end_state = Some(root.clone());
        res.terminus = Some(t);
        return finish(res);
    }
    let mut table = NoveltyTable::new(task.num_fluents(), k);
    table.novelty(task, root);
    let mut nodes = vec![Node {
        state: root.clone(),
        parent: NO_PARENT,
        action: 0,
    }];
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
                return finish(res);
            }
            if let Some(t) = goal.check(&next) {
                nodes.push(Node { state: next.clone(), parent, action: a });
                res.plan = extract_plan(&nodes, nodes.len() as u32 - 1);
                res.status = Status::Solved;
                res.end_state = Some(next);
                res.terminus = Some(t);
                return finish(res);
            }
            if k > 0 && table.novelty(task, &next) <= k {
                nodes.push(Node { state: next, parent, action: a });
            } else if next != nodes[head].state {
                res.complete = false;
            }
        }
        head += 1;
    }
    finish(res)
}

/// Runs IW(0), IW(1), ... IW(max_k) until one succeeds; the budget is shared
/// by all calls. The effective width is the `k` of the succeeding call.
pub fn iw<G: GoalTest + ?Sized>(task: &GroundTask, root: &State, goal: &G, max_k: u32, budget: u64) -> SearchResult {
    let mut total = SearchResult {
        status: Status::Exhausted,
        plan: Vec::new(),
        expanded: 0,
        generated: 0,
        effective_width: None,
        end_state: None,
        terminus: None,
        iterations: Vec::new(),
        complete: false,
    };
    for k in 0..=max_k.min(MAX_WIDTH) {
        let r = iw_k(task, root, goal, k, budget - total.generated.min(budget));
        total.expanded += r.expanded;
        total.generated += r.generated;
        total.iterations.extend(r.iterations);
        match r.status {
            Status::Solved | Status::BudgetExceeded => {
                total.status = r.status;
                total.plan = r.plan;
                total.effective_width = r.effective_width;
                total.end_state = r.end_state;
                total.terminus = r.terminus;
                return total;
            }
            Status::Exhausted if r.complete && k > 0 => {
                // Nothing was pruned, so larger k would explore the same space.
                total.complete = true;
                return total;
            }
            Status::Exhausted => {}
        }
    }
    total
}
