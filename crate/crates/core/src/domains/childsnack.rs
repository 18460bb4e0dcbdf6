use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{GenError, Instance, Params};

pub(crate) fn generate(p: &Params, rng: &mut ChaCha8Rng) -> Result<Instance, GenError> {
    let (na, nn, nt, np, extra) = (
        p.get("allergic"),
        p.get("nonallergic"),
        p.get("trays"),
        p.get("tables"),
        p.get("extra-gluten-free"),
    );
    let n = na + nn;
    if n == 0 {
        return Err(GenError::Infeasible("no children to serve".into()));
    }
    let mut inst = Instance::default();
    let children = inst.objects("child", n, "child");
    let breads = inst.objects("bread", n, "bread-portion");
    let contents = inst.objects("content", n, "content-portion");
    let trays = inst.objects("tray", nt, "tray");
    let tables = inst.objects("table", np, "place");
    let sandwiches = inst.objects("sandw", n, "sandwich");

    let gf = (na + extra).min(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for (k, &c) in order.iter().enumerate() {
        let flag = if k < na { "allergic_gluten" } else { "not_allergic_gluten" };
        inst.init(flag, &[&children[c]]);
    }
    for c in &children {
        inst.init("waiting", &[c, &tables[rng.gen_range(0..np)]]);
    }
    let mut bread_order: Vec<usize> = (0..n).collect();
    bread_order.shuffle(rng);
    let mut content_order: Vec<usize> = (0..n).collect();
    content_order.shuffle(rng);
    for i in 0..n {
        inst.init("at_kitchen_bread", &[&breads[i]]);
        inst.init("at_kitchen_content", &[&contents[i]]);
    }
    for &i in &bread_order[..gf] {
        inst.init("no_gluten_bread", &[&breads[i]]);
    }
    for &i in &content_order[..gf] {
        inst.init("no_gluten_content", &[&contents[i]]);
    }
    for t in &trays {
        inst.init("at", &[t, "kitchen"]);
    }
    for s in &sandwiches {
        inst.init("notexist", &[s]);
    }
    for c in &children {
        inst.goal("served", &[c]);
    }
    Ok(inst)
}
