use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{GenError, Instance, Params};

const ATTEMPTS: usize = 200;

/// Cells reachable from `start` without entering a locked cell.
fn open_region(rows: usize, cols: usize, locked: &[bool], start: usize) -> Vec<bool> {
    let mut seen = vec![false; rows * cols];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(x) = queue.pop_front() {
        for y in neighbours(rows, cols, x) {
            if !seen[y] && !locked[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    seen
}

fn neighbours(rows: usize, cols: usize, x: usize) -> Vec<usize> {
    let (r, c) = (x / cols, x % cols);
    let mut out = Vec::with_capacity(4);
    if r > 0 {
        out.push(x - cols);
    }
    if r + 1 < rows {
        out.push(x + cols);
    }
    if c > 0 {
        out.push(x - 1);
    }
    if c + 1 < cols {
        out.push(x + 1);
    }
    out
}

pub(crate) fn generate(p: &Params, rng: &mut ChaCha8Rng) -> Result<Instance, GenError> {
    let (rows, cols, nshapes, nkeys) = (p.get("rows"), p.get("cols"), p.get("shapes"), p.get("keys"));
    let (ngoal, nlocks, holding) = (p.get("goal-keys"), p.get("locks"), p.get("holding") == 1);
    let n = rows * cols;
    if ngoal > nkeys {
        return Err(GenError::Infeasible("more goal keys than keys".into()));
    }
    if nlocks + 1 > n {
        return Err(GenError::Infeasible("no room for the robot".into()));
    }
    let key_shape = |k: usize| k % nshapes;
    let lock_shapes = nshapes.min(nkeys);

    let mut layout = None;
    for _ in 0..ATTEMPTS {
        let mut cells: Vec<usize> = (0..n).collect();
        cells.shuffle(rng);
        let robot = cells[0];
        let mut locked = vec![false; n];
        for &c in &cells[1..=nlocks] {
            locked[c] = true;
        }
        let region = open_region(rows, cols, &locked, robot);
        let reachable_locks = (0..n)
            .filter(|&x| locked[x])
            .all(|x| neighbours(rows, cols, x).iter().any(|&y| region[y]));
        if reachable_locks {
            layout = Some((robot, locked, region));
            break;
        }
    }
    let (robot, locked, region) =
        layout.ok_or_else(|| GenError::Infeasible("could not place locks next to the open region".into()))?;

    let mut inst = Instance::default();
    let cell = |x: usize| format!("pos-{}-{}", x / cols, x % cols);
    for x in 0..n {
        inst.object(cell(x), "place");
    }
    let keys = inst.objects("key", nkeys, "key");
    let shapes = inst.objects("shape", nshapes, "shape");

    let lock_shape: Vec<Option<usize>> = (0..n)
        .map(|x| locked[x].then(|| rng.gen_range(0..lock_shapes)))
        .collect();
    // For each shape a lock needs, its first key starts in the open region.
    let open_cells: Vec<usize> = (0..n).filter(|&x| region[x]).collect();
    let mut start: Vec<Option<usize>> = Vec::with_capacity(nkeys);
    for k in 0..nkeys {
        let needed = lock_shape.contains(&Some(key_shape(k))) && (0..k).all(|j| key_shape(j) != key_shape(k));
        start.push(if holding && k == 0 {
            None
        } else if needed {
            Some(*open_cells.choose(rng).expect("robot cell is open"))
        } else {
            Some(rng.gen_range(0..n))
        });
    }

    for x in 0..n {
        for y in neighbours(rows, cols, x) {
            inst.init("conn", &[&cell(x), &cell(y)]);
        }
        match lock_shape[x] {
            Some(s) => {
                inst.init("locked", &[&cell(x)]);
                inst.init("lock-shape", &[&cell(x), &shapes[s]]);
            }
            None => inst.init("open", &[&cell(x)]),
        }
    }
    for (k, key) in keys.iter().enumerate() {
        inst.init("key-shape", &[key, &shapes[key_shape(k)]]);
        match start[k] {
            Some(x) => inst.init("at", &[key, &cell(x)]),
            None => inst.init("holding", &[key]),
        }
    }
    inst.init("at-robot", &[&cell(robot)]);
    if !holding {
        inst.init("arm-empty", &[]);
    }
    let mut order: Vec<usize> = (0..nkeys).collect();
    order.shuffle(rng);
    for &k in &order[..ngoal] {
        let target = loop {
            let x = rng.gen_range(0..n);
            if start[k] != Some(x) {
                break x;
            }
        };
        inst.goal("at", &[&keys[k], &cell(target)]);
    }
    Ok(inst)
}
