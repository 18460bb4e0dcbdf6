use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{GenError, Instance, Params};

pub(crate) fn generate(p: &Params, rng: &mut ChaCha8Rng) -> Result<Instance, GenError> {
    let (rows, cols, robots) = (p.get("rows"), p.get("cols"), p.get("robots"));
    if robots > cols {
        // With more robots than the free row can hold they may wall each
        // other in.
        return Err(GenError::Infeasible(format!("{robots} robots need at least {robots} columns")));
    }
    let mut inst = Instance::default();
    let tile = |r: usize, c: usize| format!("tile_{r}-{c}");
    for r in 0..rows {
        for c in 0..cols {
            inst.object(tile(r, c), "tile");
        }
    }
    let bots = inst.objects("robot", robots, "robot");
    let colors = [inst.object("white", "color"), inst.object("black", "color")];

    let mut cells: Vec<(usize, usize)> = (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c))).collect();
    cells.shuffle(rng);
    let starts = &cells[..robots];
    for (b, &(r, c)) in bots.iter().zip(starts) {
        inst.init("robot-at", &[b, &tile(r, c)]);
        inst.init("robot-has", &[b, &colors[rng.gen_range(0..2)]]);
    }
    for r in 0..rows {
        for c in 0..cols {
            if !starts.contains(&(r, c)) {
                inst.init("clear", &[&tile(r, c)]);
            }
        }
    }
    for r in 0..rows {
        for c in 0..cols {
            if r + 1 < rows {
                inst.init("up", &[&tile(r + 1, c), &tile(r, c)]);
                inst.init("down", &[&tile(r, c), &tile(r + 1, c)]);
            }
            if c + 1 < cols {
                inst.init("right", &[&tile(r, c + 1), &tile(r, c)]);
                inst.init("left", &[&tile(r, c), &tile(r, c + 1)]);
            }
        }
    }
    for c in &colors {
        inst.init("available-color", &[c]);
    }
    for r in 1..rows {
        for c in 0..cols {
            inst.goal("painted", &[&tile(r, c), &colors[(r + c) % 2]]);
        }
    }
    Ok(inst)
}
