use std::collections::BTreeSet;

use proptest::collection::vec;
use proptest::prelude::*;
use proptest::sample::subsequence;

use cofix::mapping::{Arity, Mapping, MappingSet};
use cofix::metric::{FiniteSpace, MetricSpace, Point};
use cofix::oracle::{
    enumerate_coincidence, enumerate_common_fixed_points, generate_instance, AnchorMode, InstanceRecipe,
};
use cofix::reduction::{induce_four, induce_three, injective_restriction, solve_four, solve_three, Restriction};
use cofix::reduction::{Outcome, ReductionOptions};

fn line(n: usize) -> MetricSpace {
    let xs: Vec<f64> = (0..n).map(|i| i as f64).collect();
    FiniteSpace::on_line(&xs).unwrap().into()
}

fn table_map() -> impl Strategy<Value = Vec<usize>> {
    (1usize..13).prop_flat_map(|n| vec(0..n, n))
}

/// `f` together with `S`, `T` (and a second anchor map `g`) whose values all
/// lie in `fX`, so the range inclusions hold.
fn reducible() -> impl Strategy<Value = (Vec<usize>, Vec<usize>, Vec<usize>, Vec<usize>)> {
    table_map().prop_flat_map(|f| {
        let n = f.len();
        let image: Vec<usize> = f.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let pick = move |len: usize| vec(prop::sample::select(image.clone()), len);
        let perm = Just((0..n).collect::<Vec<usize>>()).prop_shuffle();
        (Just(f), pick(n), pick(n), perm)
    })
}

proptest! {
    #[test]
    fn restriction_is_injective_with_the_full_image(f in table_map()) {
        let n = f.len();
        let space = line(n);
        let r = injective_restriction(&space, &Mapping::Table(f.clone())).unwrap();
        let Restriction::Finite { subset, image, section } = r else {
            panic!("finite spaces give finite restrictions");
        };
        let full: BTreeSet<usize> = f.iter().copied().collect();
        let on_e: Vec<usize> = subset.iter().map(|&x| f[x]).collect();
        let on_e_set: BTreeSet<usize> = on_e.iter().copied().collect();
        prop_assert_eq!(subset.len(), full.len());
        prop_assert_eq!(on_e.len(), on_e_set.len());
        prop_assert_eq!(&on_e_set, &full);
        prop_assert_eq!(image, full.into_iter().collect::<Vec<_>>());
        for (k, &x) in section.iter().enumerate() {
            prop_assert!(subset.contains(&x));
            // the smallest preimage is chosen
            prop_assert_eq!(f.iter().position(|&y| y == f[x]), Some(x));
            prop_assert_eq!(f[x], on_e_set.iter().copied().nth(k).unwrap());
        }
    }

    #[test]
    fn three_map_square_commutes((f, s, t, _) in reducible()) {
        let space = line(f.len());
        let maps = MappingSet::three(s.clone(), t.clone(), f.clone());
        let r = injective_restriction(&space, maps.f().unwrap()).unwrap();
        let w = induce_three(&space, &maps, &r).unwrap();
        prop_assert!(w.commutes(&space, &maps));
        let Restriction::Finite { subset, .. } = &r else { unreachable!() };
        for &x in subset {
            let local = r.to_local(&Point::Index(f[x])).unwrap();
            let g = w.induced_s.apply(&w.induced_space, &local).unwrap();
            let h = w.induced_t.apply(&w.induced_space, &local).unwrap();
            prop_assert_eq!(r.to_global(&g), Point::Index(s[x]));
            prop_assert_eq!(r.to_global(&h), Point::Index(t[x]));
        }
    }

    #[test]
    fn four_map_square_commutes((f, s, t, perm) in reducible()) {
        let space = line(f.len());
        // g = f composed with a permutation has the same image as f
        let g: Vec<usize> = perm.iter().map(|&p| f[p]).collect();
        let maps = MappingSet::four(s.clone(), t.clone(), f.clone(), g.clone());
        let r1 = injective_restriction(&space, maps.f().unwrap()).unwrap();
        let r2 = injective_restriction(&space, maps.g().unwrap()).unwrap();
        let w = induce_four(&space, &maps, &r1, &r2).unwrap();
        prop_assert!(w.commutes(&space, &maps));
        let Restriction::Finite { subset, .. } = &r2 else { unreachable!() };
        for &x in subset {
            let local = r1.to_local(&Point::Index(g[x])).unwrap();
            let b = w.induced_t.apply(&w.induced_space, &local).unwrap();
            prop_assert_eq!(r1.to_global(&b), Point::Index(t[x]));
        }
    }

    #[test]
    fn subsets_restrict_to_themselves(keep in subsequence((0..10).collect::<Vec<usize>>(), 1..10)) {
        // f maps everything onto `keep`, hitting every element.
        let f: Vec<usize> = (0..10).map(|x| keep[x % keep.len()]).collect();
        let r = injective_restriction(&line(10), &Mapping::Table(f)).unwrap();
        prop_assert_eq!(r.len(), Some(keep.len()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn induced_fixed_points_are_points_of_coincidence(seed in any::<u64>(), n in 2usize..30) {
        let recipe = InstanceRecipe { seed, n, arity: Arity::Three, ..InstanceRecipe::default() };
        let inst = generate_instance(&recipe).unwrap();
        prop_assert!(inst.verified);
        let r = injective_restriction(&inst.space, inst.maps.f().unwrap()).unwrap();
        let w = induce_three(&inst.space, &inst.maps, &r).unwrap();
        let fixed = enumerate_common_fixed_points(&w.induced_space, &[&w.induced_s, &w.induced_t]).unwrap();
        let global: Vec<usize> = fixed
            .into_iter()
            .map(|k| r.to_global(&Point::Index(k)).index().unwrap())
            .collect();
        let oracle = enumerate_coincidence(&inst.space, &inst.maps).unwrap();
        prop_assert_eq!(global, oracle.points_of_coincidence);
    }

    #[test]
    fn identity_anchors_degenerate_to_two_maps(seed in any::<u64>(), n in 1usize..30) {
        let recipe = InstanceRecipe { seed, n, arity: Arity::Two, ..InstanceRecipe::default() };
        let inst = generate_instance(&recipe).unwrap();
        let id = Mapping::identity(&inst.space);
        let three = MappingSet::three(inst.maps.s.clone(), inst.maps.t.clone(), id.clone());
        let four = MappingSet::four(inst.maps.s.clone(), inst.maps.t.clone(), id.clone(), id);
        let opts = ReductionOptions::default();
        let x0 = Point::Index(seed as usize % n);
        let plain = cofix::solver::picard_solve(
            &inst.space, &inst.maps.s, &inst.maps.t, &x0, &inst.coefficients, &opts.solve,
        )
        .unwrap();
        let a = solve_three(&inst.space, &three, &inst.coefficients, &x0, &opts).unwrap();
        let b = solve_four(&inst.space, &four, &inst.coefficients, &x0, &opts).unwrap();
        prop_assert_eq!(a.common_fixed_point.as_ref(), Some(&plain.limit));
        prop_assert_eq!(b.common_fixed_point.as_ref(), Some(&plain.limit));
    }

    #[test]
    fn shared_anchor_lifts_agree(seed in any::<u64>(), n in 2usize..30) {
        let recipe = InstanceRecipe {
            seed,
            n,
            arity: Arity::Four,
            anchors: AnchorMode::Shared,
            ..InstanceRecipe::default()
        };
        let inst = generate_instance(&recipe).unwrap();
        prop_assert!(inst.verified);
        let x0 = Point::Index(seed as usize % n);
        let r = solve_four(&inst.space, &inst.maps, &inst.coefficients, &x0, &ReductionOptions::default()).unwrap();
        prop_assert_eq!(r.outcome, Outcome::CommonFixedPoint);
        let v = r.point_of_coincidence.clone().unwrap();
        let (f, g) = (inst.maps.f().unwrap(), inst.maps.g().unwrap());
        let first = cofix::reduction::lift_to_common_fixed_point(&inst.space, &inst.maps.s, f, &v).unwrap();
        let second = cofix::reduction::lift_to_common_fixed_point(&inst.space, &inst.maps.t, g, &v).unwrap();
        prop_assert_eq!(&first, &second);
        prop_assert_eq!(r.common_fixed_point, Some(first));
    }
}
