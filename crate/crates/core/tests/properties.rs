mod common;

use circuit_zpf::netlist;
use common::Tree;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tree(seed: u64) -> Tree {
    Tree::random(&mut ChaCha8Rng::seed_from_u64(seed), 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hermitian_symmetry(seed in any::<u64>(), lw in -2.0f64..2.0) {
        let net = tree(seed).network();
        let w = 10f64.powf(lw);
        let (zp, zm) = (net.impedance(w).unwrap(), net.impedance(-w).unwrap());
        prop_assert!((zm - zp.conj()).norm() <= 1e-12 * zp.norm());
    }

    #[test]
    fn passive(seed in any::<u64>(), lw in -2.0f64..2.0) {
        let net = tree(seed).network();
        let z = net.impedance(10f64.powf(lw)).unwrap();
        prop_assert!(z.re >= -1e-12 * z.norm(), "{z}");
    }

    #[test]
    fn nodal_analysis_matches_composition(seed in any::<u64>(), lw in -1.0f64..1.0) {
        let t = tree(seed);
        let w = 10f64.powf(lw);
        let (a, b) = (t.network().impedance(w).unwrap(), t.impedance(w));
        // Round-off envelope for up to 16 elements with spread values.
        prop_assert!((a - b).norm() <= 1e-11 * b.norm(), "{a} vs {b}");
    }

    #[test]
    fn netlist_round_trip(seed in any::<u64>()) {
        let net = tree(seed).network();
        let text = netlist::unparse(&net);
        let back = netlist::parse(&text).unwrap();
        let sorted = |n: &circuit_zpf::CircuitNetwork| {
            let mut e = n.elements().to_vec();
            e.sort_by(|a, b| a.name.cmp(&b.name));
            e
        };
        prop_assert_eq!(sorted(&back), sorted(&net));
        prop_assert_eq!(back.port(), net.port());
        prop_assert_eq!(netlist::unparse(&back), text);
    }

    #[test]
    fn value_format_round_trip(mant in 1.0f64..1000.0, exp in -15i32..10) {
        let v = mant * 10f64.powi(exp);
        let s = netlist::format_value(v);
        prop_assert_eq!(netlist::parse_value(&s).unwrap(), v);
    }

    #[test]
    fn parser_never_panics(text in "[RLCPORTabgnd0-9 .pnumkMG#=\n-]{0,80}") {
        let _ = netlist::parse(&text);
    }
}
