use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::graph::connected;
use super::{GenError, Instance, Params};

pub(crate) fn generate(p: &Params, rng: &mut ChaCha8Rng) -> Result<Instance, GenError> {
    let (nm, ng, nt, nd, maxq) = (p.get("markets"), p.get("goods"), p.get("trucks"), p.get("depots"), p.get("max-quantity"));
    let mut inst = Instance::default();
    let depots = inst.objects("depot", nd, "depot");
    let markets = inst.objects("market", nm, "market");
    let trucks = inst.objects("truck", nt, "truck");
    let goods = inst.objects("goods", ng, "goods");

    // Every good has a goal quantity and at least that much on sale,
    // spread over a random nonempty set of markets.
    let mut demand = Vec::new();
    let mut supply = vec![vec![0usize; nm]; ng];
    for g in 0..ng {
        let q = rng.gen_range(1..=maxq);
        demand.push(q);
        let mut sellers: Vec<usize> = (0..nm).collect();
        sellers.shuffle(rng);
        sellers.truncate(rng.gen_range(1..=nm));
        for unit in 0..q + rng.gen_range(0..=1) {
            supply[g][sellers[unit % sellers.len()]] += 1;
        }
    }
    let top = supply.iter().flatten().copied().chain(demand.iter().copied()).max().unwrap_or(1);
    let levels: Vec<String> = (0..=top).map(|i| inst.object(format!("level{i}"), "level")).collect();

    let places: Vec<&String> = depots.iter().chain(&markets).collect();
    for (a, b) in connected(places.len(), 0.3, rng) {
        inst.init("connected", &[places[a], places[b]]);
        inst.init("connected", &[places[b], places[a]]);
    }
    for w in levels.windows(2) {
        inst.init("next", &[&w[1], &w[0]]);
    }
    for t in &trucks {
        let d = depots.choose(rng).expect("at least one depot");
        inst.init("at", &[t, d]);
    }
    for (g, good) in goods.iter().enumerate() {
        for (m, market) in markets.iter().enumerate() {
            inst.init("on-sale", &[good, market, &levels[supply[g][m]]]);
            inst.init("ready-to-load", &[good, market, &levels[0]]);
        }
        for t in &trucks {
            inst.init("loaded", &[good, t, &levels[0]]);
        }
        inst.init("stored", &[good, &levels[0]]);
        inst.goal("stored", &[good, &levels[demand[g]]]);
    }
    Ok(inst)
}
