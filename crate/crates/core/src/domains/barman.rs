use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use super::{GenError, Instance, Params};

pub(crate) fn generate(p: &Params, rng: &mut ChaCha8Rng) -> Result<Instance, GenError> {
    let (nc, ni) = (p.get("cocktails"), p.get("ingredients"));
    let mut inst = Instance::default();
    let shaker = inst.object("shaker1", "shaker");
    let hands = [inst.object("left", "hand"), inst.object("right", "hand")];
    let shots = inst.objects("shot", nc + 1, "shot");
    let ingredients = inst.objects("ingredient", ni, "ingredient");
    let cocktails = inst.objects("cocktail", nc, "cocktail");
    let dispensers = inst.objects("dispenser", ni, "dispenser");
    let levels: Vec<String> = (0..3).map(|i| inst.object(format!("l{i}"), "level")).collect();

    inst.init("ontable", &[&shaker]);
    for s in &shots {
        inst.init("ontable", &[s]);
        inst.init("clean", &[s]);
        inst.init("empty", &[s]);
    }
    inst.init("clean", &[&shaker]);
    inst.init("empty", &[&shaker]);
    for h in &hands {
        inst.init("handempty", &[h]);
    }
    for (d, i) in dispensers.iter().zip(&ingredients) {
        inst.init("dispenses", &[d, i]);
    }
    inst.init("shaker-empty-level", &[&shaker, &levels[0]]);
    inst.init("shaker-level", &[&shaker, &levels[0]]);
    for w in levels.windows(2) {
        inst.init("next", &[&w[0], &w[1]]);
    }
    for c in &cocktails {
        let mut pick: Vec<&String> = ingredients.iter().collect();
        pick.shuffle(rng);
        inst.init("cocktail-part1", &[c, pick[0]]);
        inst.init("cocktail-part2", &[c, pick[1]]);
    }
    for (s, c) in shots.iter().zip(&cocktails) {
        inst.goal("contains", &[s, c]);
    }
    Ok(inst)
}
