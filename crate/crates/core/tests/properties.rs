use std::sync::{Arc, OnceLock};

use gdft::dft::{convolve, inverse_dft, naive_dft};
use gdft::group::{find_triple, GroupSpec, TripleSearch};
use gdft::planner::{execute_plan, PlanConfig, Planner};
use gdft::{FiniteGroup, GroupAlgebraElement, OpCounter};
use proptest::prelude::*;

const SPECS: &[&str] = &[
    "cyclic:1",
    "cyclic:7",
    "cyclic:12",
    "cyclic:30",
    "cyclic:64",
    "dihedral:5",
    "dihedral:6",
    "dihedral:16",
    "symmetric:3",
    "symmetric:4",
    "alternating:4",
    "alternating:5",
    "quaternion8:8",
    "heisenberg_p:3",
    "cyclic:2*symmetric:3",
    "cyclic:3*alternating:4",
    "sl2:5",
];

fn planner() -> &'static Planner {
    static P: OnceLock<Planner> = OnceLock::new();
    P.get_or_init(|| Planner::new(PlanConfig::default()))
}

fn group(i: usize) -> Arc<FiniteGroup> {
    static GROUPS: OnceLock<Vec<Arc<FiniteGroup>>> = OnceLock::new();
    let all = GROUPS.get_or_init(|| {
        SPECS
            .iter()
            .map(|s| Arc::new(GroupSpec::parse_short(s).unwrap().build().unwrap()))
            .collect()
    });
    Arc::clone(&all[i])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn group_axioms(i in 0..SPECS.len(), a in any::<usize>(), b in any::<usize>(), c in any::<usize>()) {
        let g = group(i);
        let n = g.order();
        let (a, b, c) = (a % n, b % n, c % n);
        prop_assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
        prop_assert_eq!(g.mul(a, g.identity()), a);
        prop_assert_eq!(g.mul(a, g.inv(a)), g.identity());
    }

    #[test]
    fn plan_matches_naive(i in 0..SPECS.len(), seed in 0u64..1000) {
        let g = group(i);
        let plan = planner().plan(&g).unwrap();
        let alpha = GroupAlgebraElement::random(&g, seed);
        let got = execute_plan(&plan, &alpha, &OpCounter::new()).unwrap();
        let want = naive_dft(&alpha, plan.irreps(), &OpCounter::new()).unwrap();
        prop_assert!(got.max_block_residual(&want) <= 1e-7 * alpha.l1_norm());
    }

    #[test]
    fn planning_is_deterministic(i in 0..SPECS.len()) {
        let g = group(i);
        let fresh = Planner::new(PlanConfig::default());
        let a = fresh.plan(&g).unwrap().spec();
        let b = planner().plan(&g).unwrap().spec();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn convolution_theorem(i in 0..SPECS.len(), s1 in 0u64..1000, s2 in 0u64..1000) {
        let g = group(i);
        let irreps = planner().irreps(&g).unwrap();
        let ops = OpCounter::new();
        let (a, b) = (GroupAlgebraElement::random(&g, s1), GroupAlgebraElement::random(&g, s2));
        let lhs = naive_dft(&convolve(&a, &b, &ops).unwrap(), &irreps, &ops).unwrap();
        let rhs = naive_dft(&a, &irreps, &ops).unwrap().mul(&naive_dft(&b, &irreps, &ops).unwrap(), &ops);
        let scale = a.l1_norm() * b.l1_norm();
        prop_assert!(lhs.max_block_residual(&rhs) <= 1e-8 * scale.max(1.0));
    }

    #[test]
    fn inverse_round_trip(i in 0..SPECS.len(), seed in 0u64..1000) {
        let g = group(i);
        let irreps = planner().irreps(&g).unwrap();
        let ops = OpCounter::new();
        let a = GroupAlgebraElement::random(&g, seed);
        let back = inverse_dft(&naive_dft(&a, &irreps, &ops).unwrap(), &irreps, &ops).unwrap();
        prop_assert!(back.max_abs_diff(&a) <= 1e-8);
    }
}

#[test]
fn triples_factor_their_products() {
    for i in 0..SPECS.len() {
        let g = group(i);
        if let TripleSearch::TripleCase(t) = find_triple(&g).unwrap() {
            assert!(t.n.is_normal(), "{}", g.label());
            let both: Vec<usize> = t.h.elements().iter().copied().filter(|&x| t.k.contains(x)).collect();
            assert_eq!(both, t.n.elements(), "{}", g.label());
            let mut products: Vec<usize> = t
                .h
                .elements()
                .iter()
                .flat_map(|&h| t.k.elements().iter().map(move |&k| (h, k)))
                .map(|(h, k)| g.mul(h, k))
                .collect();
            products.sort_unstable();
            products.dedup();
            assert_eq!(products.len(), t.product_size(), "{}", g.label());
            assert!(t.h.is_proper() && t.k.is_proper());
        }
    }
}
