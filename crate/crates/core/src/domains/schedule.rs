use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{GenError, Instance, Params};

const COLOURS: [&str; 4] = ["red", "blue", "green", "yellow"];
const SHAPES: [&str; 3] = ["cylindrical", "circular", "oblong"];
const SURFACES: [&str; 3] = ["polished", "rough", "smooth"];

/// Goals are reachable in the order shape, surface, colour without ever
/// heating a part: lathe for shape, grind, lathe or (cold parts only)
/// polish for surface, the immersion painter for colour.
pub(crate) fn generate(p: &Params, rng: &mut ChaCha8Rng) -> Result<Instance, GenError> {
    let (np, nc, nhot) = (p.get("parts"), p.get("colours"), p.get("hot"));
    if nhot > np {
        return Err(GenError::Infeasible("more hot parts than parts".into()));
    }
    let mut inst = Instance::default();
    let parts = inst.objects("part", np, "part");
    for s in &SHAPES[1..] {
        inst.object(*s, "ashape");
    }
    let colours: Vec<String> = COLOURS[..nc].iter().map(|c| inst.object(*c, "colour")).collect();

    let mut order: Vec<usize> = (0..np).collect();
    order.shuffle(rng);
    let hot: Vec<bool> = (0..np).map(|i| order[..nhot].contains(&i)).collect();
    inst.init("ready", &[]);
    for c in &colours {
        inst.init("has-paint", &["immersion-painter", c]);
        if rng.gen_bool(0.5) {
            inst.init("has-paint", &["spray-painter", c]);
        }
    }
    let mut goals = 0;
    for (i, x) in parts.iter().enumerate() {
        let shape = SHAPES[rng.gen_range(0..SHAPES.len())];
        let surface = SURFACES[rng.gen_range(0..SURFACES.len())];
        let colour = if rng.gen_bool(0.3) {
            "uncoloured".to_string()
        } else {
            colours[rng.gen_range(0..nc)].clone()
        };
        inst.init("shape", &[x, shape]);
        inst.init("surface-condition", &[x, surface]);
        inst.init("painted", &[x, &colour]);
        inst.init("temperature", &[x, if hot[i] { "hot" } else { "cold" }]);

        if shape != "cylindrical" && rng.gen_bool(0.6) {
            inst.goal("shape", &[x, "cylindrical"]);
            goals += 1;
        }
        let options: Vec<&str> = SURFACES
            .iter()
            .copied()
            .filter(|s| *s != surface && !(hot[i] && *s == "polished"))
            .collect();
        if rng.gen_bool(0.6) || (i + 1 == np && goals == 0) {
            inst.goal("surface-condition", &[x, options[rng.gen_range(0..options.len())]]);
            goals += 1;
        }
        let others: Vec<&String> = colours.iter().filter(|c| **c != colour).collect();
        if !others.is_empty() && rng.gen_bool(0.6) {
            inst.goal("painted", &[x, others[rng.gen_range(0..others.len())]]);
            goals += 1;
        }
    }
    Ok(inst)
}
