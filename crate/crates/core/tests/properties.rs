mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use mashup_core::composer::{linearize_all, merge_contributions, AspectContribution};
use mashup_core::diag::Pos;
use mashup_core::meta::Attribute;
use mashup_core::runtime::{conformance, load_model, save_model, ModelInstance};
use mashup_core::types::{Bounds, PrimitiveType};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn contribution(unit: &str, attrs: &[u8]) -> AspectContribution {
    let mut c = AspectContribution::empty("C", unit, Pos::new(1, 1));
    for a in attrs {
        c.attributes.push((
            Attribute {
                name: format!("f{a}"),
                ty: PrimitiveType::Int,
                multiplicity: Bounds::ONE,
                pos: Pos::new(1, 1),
            },
            unit.to_string(),
        ));
    }
    c
}

fn attr_names() -> impl Strategy<Value = Vec<u8>> {
    proptest::collection::btree_set(0u8..12, 0..4).prop_map(|s| s.into_iter().collect())
}

/// Supertype lists where class `i` only extends classes before it.
fn dag(max: usize) -> impl Strategy<Value = Vec<Vec<usize>>> {
    (1..=max).prop_flat_map(|n| {
        (0..n)
            .map(|i| {
                proptest::collection::vec(0..i.max(1), 0..=i.min(3))
                    .prop_map(move |v| {
                        let mut seen = BTreeSet::new();
                        v.into_iter().filter(|x| *x < i && seen.insert(*x)).collect::<Vec<_>>()
                    })
                    .boxed()
            })
            .collect::<Vec<_>>()
    })
}

fn ancestors(c: usize, g: &[Vec<usize>], out: &mut BTreeSet<usize>) {
    for s in &g[c] {
        if out.insert(*s) {
            ancestors(*s, g, out);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn merge_is_associative(a in attr_names(), b in attr_names(), c in attr_names()) {
        let (ca, cb, cc) = (contribution("a.act", &a), contribution("b.act", &b), contribution("c.act", &c));
        let left = merge_contributions(&ca, &cb).and_then(|ab| merge_contributions(&ab, &cc));
        let right = merge_contributions(&cb, &cc).and_then(|bc| merge_contributions(&ca, &bc));
        let disjoint = [&a, &b, &c].iter().flat_map(|v| v.iter()).collect::<BTreeSet<_>>().len()
            == a.len() + b.len() + c.len();
        prop_assert_eq!(left.is_ok(), disjoint);
        prop_assert_eq!(right.is_ok(), disjoint);
        if let (Ok(l), Ok(r)) = (left, right) {
            prop_assert_eq!(&l, &r);
            prop_assert_eq!(l.units, vec!["a.act".to_string(), "b.act".into(), "c.act".into()]);
        }
    }

    #[test]
    fn linearization_matches_oracle(g in dag(8)) {
        let name = |i: usize| format!("K{i}");
        let supers: BTreeMap<String, Vec<String>> =
            g.iter().enumerate().map(|(i, s)| (name(i), s.iter().map(|x| name(*x)).collect())).collect();
        let lins = linearize_all(&supers).unwrap();
        for c in 0..g.len() {
            let lin = &lins[&name(c)];
            let mut want: Vec<String> = oracle_lin(c, &g).into_iter().map(name).collect();
            want.push("Object".into());
            prop_assert_eq!(lin, &want);
            // exactly the class, its ancestors and the root, each once
            let mut anc = BTreeSet::new();
            ancestors(c, &g, &mut anc);
            prop_assert_eq!(lin.len(), anc.len() + 2);
            let set: BTreeSet<&String> = lin.iter().collect();
            prop_assert_eq!(set.len(), lin.len());
        }
    }

    #[test]
    fn emof_operations_keep_the_graph_coherent(seed in any::<u64>(), steps in 0usize..150) {
        let w = emof_woven();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = ModelInstance::new(w.package.clone());
        for _ in 0..steps {
            let op = random_op(&mut rng, &w, &m);
            apply_op(&w, &mut m, &op);
            let v = structural_violations(&w, &m);
            prop_assert!(v.is_empty(), "after {:?}: {:?}", op, v);
        }
    }

    #[test]
    fn saved_models_reload_isomorphically(seed in any::<u64>(), steps in 0usize..80) {
        let w = emof_woven();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_model(&mut rng, &w, steps);
        prop_assert!(conformance(&w, &m).is_empty());
        let text = save_model(&w, &m).unwrap();
        let back = load_model(&text, &w).unwrap();
        prop_assert!(isomorphic(&m, &back).is_ok());
        prop_assert_eq!(save_model(&w, &back).unwrap(), text);
    }
}
