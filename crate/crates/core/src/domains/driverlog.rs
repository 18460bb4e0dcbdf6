use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::graph::connected;
use super::{GenError, Instance, Params};

pub(crate) fn generate(p: &Params, rng: &mut ChaCha8Rng) -> Result<Instance, GenError> {
    let (nl, nd, nt, np) = (p.get("locations"), p.get("drivers"), p.get("trucks"), p.get("packages"));
    let (gd, gt) = (p.get("driver-goals"), p.get("truck-goals"));
    if gd > nd || gt > nt {
        return Err(GenError::Infeasible("more driver or truck goals than drivers or trucks".into()));
    }
    let mut inst = Instance::default();
    let locs = inst.objects("s", nl, "location");
    let drivers = inst.objects("driver", nd, "driver");
    let trucks = inst.objects("truck", nt, "truck");
    let packages = inst.objects("package", np, "obj");

    for (a, b) in connected(nl, 0.25, rng) {
        inst.init("link", &[&locs[a], &locs[b]]);
        inst.init("link", &[&locs[b], &locs[a]]);
    }
    for (a, b) in connected(nl, 0.25, rng) {
        inst.init("path", &[&locs[a], &locs[b]]);
        inst.init("path", &[&locs[b], &locs[a]]);
    }
    let mut place = |inst: &mut Instance, x: &String| {
        let l = rng.gen_range(0..nl);
        inst.init("at", &[x, &locs[l]]);
        l
    };
    let mut start = Vec::new();
    for d in &drivers {
        inst.init("driver", &[d]);
        start.push(place(&mut inst, d));
    }
    for t in &trucks {
        inst.init("truck", &[t]);
        inst.init("empty", &[t]);
        start.push(place(&mut inst, t));
    }
    for o in &packages {
        inst.init("obj", &[o]);
        start.push(place(&mut inst, o));
    }
    let mut away = |from: usize| {
        let l = rng.gen_range(0..nl - 1);
        if l >= from {
            l + 1
        } else {
            l
        }
    };
    let mut goals = Vec::new();
    for (i, o) in packages.iter().enumerate() {
        goals.push((o.clone(), away(start[nd + nt + i])));
    }
    for (i, d) in drivers.iter().enumerate().take(gd) {
        goals.push((d.clone(), away(start[i])));
    }
    for (i, t) in trucks.iter().enumerate().take(gt) {
        goals.push((t.clone(), away(start[nd + i])));
    }
    for (x, l) in goals {
        inst.goal("at", &[&x, &locs[l]]);
    }
    Ok(inst)
}
