use std::cell::RefCell;
use std::collections::{BTreeSet, HashSet};

use proptest::prelude::*;
use sketchplan::domains::{pack, packs, suites, GenParams};
use sketchplan::features::{Concept, Evaluator, Extension, Num, Role, SetExpr, Value};
use sketchplan::pddl::{ground, load_task, parse_plan, validate_plan, write_plan, GroundTask, State};
use sketchplan::search::{bfs, iw_k, node_bound, SerialConfig, TopGoal};
use sketchplan::sketch::{check_termination, siwr, Effect, FeatureType, Sketch};

const REL: &str = "(define (domain rel) (:requirements :strips)
  (:predicates (p ?x) (q ?x) (r ?x ?y) (s ?x ?y))
  (:action mp :parameters (?x) :precondition (and) :effect (p ?x))
  (:action mq :parameters (?x) :precondition (and) :effect (q ?x))
  (:action mr :parameters (?x ?y) :precondition (and) :effect (r ?x ?y))
  (:action ms :parameters (?x ?y) :precondition (and) :effect (s ?x ?y)))";

fn rel_task() -> GroundTask {
    load_task(REL, "(define (problem x) (:domain rel) (:objects a b c d) (:init) (:goal (p a)))").unwrap()
}

fn concept() -> impl Strategy<Value = Concept> {
    let leaf = prop_oneof![
        Just(Concept::Primitive("p".into(), 0)),
        Just(Concept::Primitive("q".into(), 0)),
        Just(Concept::Top),
        Just(Concept::Bot),
        prop::sample::select(vec!["a", "b", "c", "d"]).prop_map(|o| Concept::Nominal(o.into())),
    ];
    leaf.prop_recursive(3, 24, 2, |c| {
        let r = role_leaf();
        prop_oneof![
            (c.clone(), c.clone()).prop_map(|(x, y)| Concept::Union(Box::new(x), Box::new(y))),
            (c.clone(), c.clone()).prop_map(|(x, y)| Concept::Intersection(Box::new(x), Box::new(y))),
            (c.clone(), c.clone()).prop_map(|(x, y)| Concept::Diff(Box::new(x), Box::new(y))),
            c.clone().prop_map(|x| Concept::Not(Box::new(x))),
            (r.clone(), c.clone()).prop_map(|(r, x)| Concept::Some(Box::new(r), Box::new(x))),
            (r.clone(), c.clone()).prop_map(|(r, x)| Concept::All(Box::new(r), Box::new(x))),
            (r.clone(), r.clone()).prop_map(|(r, s)| Concept::Equal(Box::new(r), Box::new(s))),
            (r.clone(), r.clone()).prop_map(|(r, s)| Concept::Subset(Box::new(r), Box::new(s))),
            (r, 0u8..2).prop_map(|(r, i)| Concept::Extract(Box::new(r), i)),
        ]
    })
}

fn role_leaf() -> impl Strategy<Value = Role> + Clone {
    prop_oneof![
        Just(Role::Primitive("r".into(), 0, 1)),
        Just(Role::Primitive("r".into(), 1, 0)),
        Just(Role::Primitive("s".into(), 0, 1)),
    ]
}

fn role() -> impl Strategy<Value = Role> {
    role_leaf().prop_recursive(3, 24, 2, |r| {
        prop_oneof![
            (r.clone(), r.clone()).prop_map(|(x, y)| Role::Union(Box::new(x), Box::new(y))),
            (r.clone(), r.clone()).prop_map(|(x, y)| Role::Intersection(Box::new(x), Box::new(y))),
            (r.clone(), r.clone()).prop_map(|(x, y)| Role::Diff(Box::new(x), Box::new(y))),
            (r.clone(), r.clone()).prop_map(|(x, y)| Role::Compose(Box::new(x), Box::new(y))),
            r.clone().prop_map(|x| Role::Not(Box::new(x))),
            r.clone().prop_map(|x| Role::Inverse(Box::new(x))),
            r.clone().prop_map(|x| Role::TClosure(Box::new(x))),
            r.clone().prop_map(|x| Role::RtClosure(Box::new(x))),
            (r, prop::sample::select(vec!["p", "q"]))
                .prop_map(|(x, c)| Role::Restrict(Box::new(x), Box::new(Concept::Primitive(c.into(), 0)))),
        ]
    })
}

fn state(task: &GroundTask) -> impl Strategy<Value = State> {
    let n = task.num_atoms();
    prop::collection::vec(any::<bool>(), n)
        .prop_map(move |bits| State::from_atoms(n, (0..n as u32).filter(|&i| bits[i as usize])))
}

/// Reference semantics over plain sets of object indices.
struct Naive<'a> {
    task: &'a GroundTask,
    s: &'a State,
}

type Pairs = BTreeSet<(usize, usize)>;

impl Naive<'_> {
    fn universe(&self) -> BTreeSet<usize> {
        (0..self.task.num_objects()).collect()
    }

    fn atoms(&self, pred: &str) -> Vec<Vec<usize>> {
        self.s
            .iter()
            .map(|a| &self.task.atoms[a as usize])
            .filter(|a| Some(a.pred) == self.task.predicate_id(pred))
            .map(|a| a.args.iter().map(|&o| o as usize).collect())
            .collect()
    }

    fn image(&self, r: &Pairs, a: usize) -> BTreeSet<usize> {
        r.iter().filter(|p| p.0 == a).map(|p| p.1).collect()
    }

    fn concept(&self, c: &Concept) -> BTreeSet<usize> {
        match c {
            Concept::Primitive(p, i) => self.atoms(p).into_iter().map(|a| a[*i]).collect(),
            Concept::Top => self.universe(),
            Concept::Bot => BTreeSet::new(),
            Concept::Union(x, y) => &self.concept(x) | &self.concept(y),
            Concept::Intersection(x, y) => &self.concept(x) & &self.concept(y),
            Concept::Diff(x, y) => &self.concept(x) - &self.concept(y),
            Concept::Not(x) => &self.universe() - &self.concept(x),
            Concept::Nominal(o) => BTreeSet::from([self.task.object_id(o).unwrap() as usize]),
            Concept::Some(r, x) => {
                let (r, x) = (self.role(r), self.concept(x));
                self.universe().into_iter().filter(|&a| self.image(&r, a).iter().any(|b| x.contains(b))).collect()
            }
            Concept::All(r, x) => {
                let (r, x) = (self.role(r), self.concept(x));
                self.universe().into_iter().filter(|&a| self.image(&r, a).iter().all(|b| x.contains(b))).collect()
            }
            Concept::Equal(r, t) => {
                let (r, t) = (self.role(r), self.role(t));
                self.universe().into_iter().filter(|&a| self.image(&r, a) == self.image(&t, a)).collect()
            }
            Concept::Subset(r, t) => {
                let (r, t) = (self.role(r), self.role(t));
                self.universe().into_iter().filter(|&a| self.image(&r, a).is_subset(&self.image(&t, a))).collect()
            }
            Concept::Extract(r, i) => self.role(r).into_iter().map(|p| if *i == 0 { p.0 } else { p.1 }).collect(),
            Concept::Goal(_) => unimplemented!("goal expressions are not generated"),
        }
    }

    fn role(&self, r: &Role) -> Pairs {
        let all = || -> Pairs {
            let u = self.universe();
            u.iter().flat_map(|&a| u.iter().map(move |&b| (a, b))).collect()
        };
        match r {
            Role::Primitive(p, i, j) => self.atoms(p).into_iter().map(|a| (a[*i], a[*j])).collect(),
            Role::Union(x, y) => &self.role(x) | &self.role(y),
            Role::Intersection(x, y) => &self.role(x) & &self.role(y),
            Role::Diff(x, y) => &self.role(x) - &self.role(y),
            Role::Not(x) => &all() - &self.role(x),
            Role::Inverse(x) => self.role(x).into_iter().map(|(a, b)| (b, a)).collect(),
            Role::Compose(x, y) => {
                let (x, y) = (self.role(x), self.role(y));
                x.iter().flat_map(|&(a, b)| y.iter().filter(move |p| p.0 == b).map(move |p| (a, p.1))).collect()
            }
            Role::TClosure(x) => {
                let mut c = self.role(x);
                loop {
                    let step: Pairs =
                        c.iter().flat_map(|&(a, b)| c.iter().filter(move |p| p.0 == b).map(move |p| (a, p.1))).collect();
                    let next = &c | &step;
                    if next == c {
                        return c;
                    }
                    c = next;
                }
            }
            Role::RtClosure(x) => {
                let id: Pairs = self.universe().into_iter().map(|a| (a, a)).collect();
                &id | &self.role(&Role::TClosure(x.clone()))
            }
            Role::Restrict(x, c) => {
                let c = self.concept(c);
                self.role(x).into_iter().filter(|p| c.contains(&p.1)).collect()
            }
            Role::Identity(c) => self.concept(c).into_iter().map(|a| (a, a)).collect(),
            Role::Goal(_) => unimplemented!("goal expressions are not generated"),
        }
    }
}

fn extension(task: &GroundTask, e: SetExpr, s: &State) -> Extension {
    let mut x = Evaluator::extension(task, &e, s).unwrap();
    match &mut x {
        Extension::Concept(v) => v.sort_unstable(),
        Extension::Role(v) => v.sort_unstable(),
    }
    x
}

fn micro_instance() -> impl Strategy<Value = (&'static str, GenParams)> {
    let names: Vec<&'static str> = packs().iter().map(|p| p.name).collect();
    (prop::sample::select(names), 0usize..3, 1u64..500).prop_map(|(d, i, seed)| {
        let mut g = suites::micro(d)[i].clone();
        g.seed = seed;
        (d, g)
    })
}

fn task_of(domain: &str, g: &GenParams) -> GroundTask {
    let p = pack(domain).unwrap();
    ground(&p.domain_def(), &p.generate(g).unwrap()).unwrap()
}

fn shuffled(sk: &Sketch, perm: &[usize]) -> Sketch {
    let mut out = sk.clone();
    let mut rules: Vec<_> = sk.rules.iter().cloned().enumerate().collect();
    rules.sort_by_key(|(i, _)| perm[*i % perm.len()] * 100 + i);
    out.rules = rules.into_iter().map(|(_, r)| r).collect();
    out
}

fn value() -> impl Strategy<Value = u64> {
    0u64..4
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn concepts_match_reference_semantics(c in concept(), states in prop::collection::vec(state(&rel_task()), 4)) {
        let task = rel_task();
        for s in states {
            let expected: Vec<usize> = Naive { task: &task, s: &s }.concept(&c).into_iter().collect();
            prop_assert_eq!(extension(&task, SetExpr::Concept(c.clone()), &s), Extension::Concept(expected));
        }
    }

    #[test]
    fn roles_match_reference_semantics(r in role(), s in state(&rel_task())) {
        let task = rel_task();
        let expected: Vec<(usize, usize)> = Naive { task: &task, s: &s }.role(&r).into_iter().collect();
        prop_assert_eq!(extension(&task, SetExpr::Role(r), &s), Extension::Role(expected));
    }

    #[test]
    fn de_morgan_and_closure_laws(c in concept(), d in concept(), r in role(), s in state(&rel_task())) {
        let task = rel_task();
        let cs = |x: Concept| extension(&task, SetExpr::Concept(x), &s);
        let rs = |x: Role| extension(&task, SetExpr::Role(x), &s);
        let not = |x: Concept| Concept::Not(Box::new(x));
        prop_assert_eq!(
            cs(not(Concept::Union(Box::new(c.clone()), Box::new(d.clone())))),
            cs(Concept::Intersection(Box::new(not(c.clone())), Box::new(not(d.clone()))))
        );
        let tc = rs(Role::TClosure(Box::new(r.clone())));
        prop_assert_eq!(rs(Role::TClosure(Box::new(Role::TClosure(Box::new(r.clone()))))), tc.clone());
        prop_assert_eq!(
            rs(Role::RtClosure(Box::new(r.clone()))),
            rs(Role::Union(Box::new(Role::Identity(Box::new(Concept::Top))), Box::new(Role::TClosure(Box::new(r.clone())))))
        );
        prop_assert_eq!(rs(Role::Inverse(Box::new(Role::Inverse(Box::new(r.clone()))))), rs(r));
    }

    #[test]
    fn state_matches_set_model(atoms in prop::collection::btree_set(0u32..130, 0..40),
                               other in prop::collection::btree_set(0u32..130, 0..40),
                               extra in 0u32..130) {
        let mut s = State::from_atoms(130, atoms.iter().copied());
        prop_assert_eq!(s.len(), atoms.len());
        prop_assert_eq!(s.iter().collect::<BTreeSet<_>>(), atoms.clone());
        let t = State::from_atoms(130, other.iter().copied());
        prop_assert_eq!(s.is_subset(&t), atoms.is_subset(&other));
        s.insert(extra);
        prop_assert!(s.contains(extra));
        s.remove(extra);
        prop_assert!(!s.contains(extra));
        let mut model = atoms.clone();
        model.remove(&extra);
        prop_assert_eq!(s.iter().collect::<BTreeSet<_>>(), model.clone());
        prop_assert!(s == State::from_atoms(130, model.iter().copied()));
    }

    #[test]
    fn gen_params_round_trip(values in prop::collection::btree_map("[a-z][a-z-]{0,8}", 0u32..1000, 0..6), seed in any::<u64>()) {
        let mut g = GenParams::new(seed);
        g.values = values;
        prop_assert_eq!(GenParams::parse(&g.to_string(), seed).unwrap(), g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn generators_are_deterministic_and_groundable((domain, g) in micro_instance()) {
        let p = pack(domain).unwrap();
        let text = p.generate_text(&g).unwrap();
        prop_assert_eq!(&text, &p.generate_text(&g).unwrap());
        let a = task_of(domain, &g);
        let b = task_of(domain, &g);
        prop_assert_eq!(&a.atoms, &b.atoms);
        prop_assert_eq!(&a.actions, &b.actions);
        prop_assert!(!a.is_goal(&a.init));
    }

    #[test]
    fn siwr_plans_validate((domain, g) in micro_instance()) {
        let t = task_of(domain, &g);
        let r = siwr(&t, &pack(domain).unwrap().sketch(), SerialConfig::default(), true).unwrap();
        prop_assert!(r.solved(), "{} {}: {:?}", domain, g, r.outcome);
        let steps = parse_plan(&write_plan(&t, &r.plan)).unwrap();
        prop_assert!(validate_plan(&t, &steps).is_valid());
    }

    #[test]
    fn iw_is_bounded_and_never_shorter_than_bfs((domain, g) in micro_instance(), k in 1u32..3) {
        let t = task_of(domain, &g);
        let r = iw_k(&t, &t.init, &TopGoal(&t), k, 1_000_000);
        prop_assert!(r.expanded as u128 <= node_bound(t.num_fluents() as u64, k));
        if r.solved() {
            let opt = bfs(&t, &t.init, &TopGoal(&t), 2_000_000);
            prop_assert!(opt.solved());
            prop_assert!(r.plan_length() >= opt.plan_length());
        }
    }

    #[test]
    fn wider_search_generates_a_superset((domain, g) in micro_instance()) {
        let t = task_of(domain, &g);
        let generated = |k: u32| {
            let seen = RefCell::new(HashSet::new());
            let never = |s: &State| {
                seen.borrow_mut().insert(s.clone());
                false
            };
            iw_k(&t, &t.init, &never, k, 1_000_000);
            seen.into_inner()
        };
        let (one, two) = (generated(1), generated(2));
        prop_assert!(one.is_subset(&two));
    }

    #[test]
    fn termination_verdict_ignores_rule_order(i in 0usize..7, perm in prop::collection::vec(0usize..10, 1..8)) {
        let sk = packs()[i].sketch();
        let rep = check_termination(&sk);
        let other = check_termination(&shuffled(&sk, &perm));
        prop_assert_eq!(rep.terminating, other.terminating);
        prop_assert_eq!(rep.remaining.len(), other.remaining.len());
    }

    #[test]
    fn rule_pairs_respect_conditions(i in 0usize..7, f in prop::collection::vec(value(), 8), g in prop::collection::vec(value(), 8)) {
        let sk = packs()[i].sketch();
        let val = |xs: &[u64]| -> Vec<Value> {
            sk.features
                .iter()
                .zip(xs)
                .map(|(d, &x)| match d.ty {
                    FeatureType::Bool => Value::Bool(x % 2 == 1),
                    FeatureType::Num if x == 3 => Value::Num(Num::Inf),
                    FeatureType::Num => Value::Num(Num::Fin(x)),
                })
                .collect()
        };
        let (f, g) = (val(&f), val(&g));
        for r in &sk.rules {
            if r.pair_satisfies(&f, &g) {
                prop_assert!(r.condition_holds(&f));
            }
            let strict = r.effects.iter().any(|e| match e {
                Effect::Inc(_) | Effect::Dec(_) => true,
                Effect::True(x) => f[*x] != Value::Bool(true),
                Effect::False(x) => f[*x] != Value::Bool(false),
                Effect::Any(_) => false,
            });
            if strict {
                prop_assert!(!r.pair_satisfies(&f, &f));
            }
        }
    }
}
