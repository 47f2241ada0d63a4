use proptest::collection::vec;
use proptest::prelude::*;

use cofix::contraction::{
    check_condition, check_condition_four, check_condition_three, check_condition_two, condition_terms,
    synthesize_coefficients, CheckOptions, Coefficients, ConditionMaps, PairSource,
};
use cofix::mapping::{Mapping, MappingSet};
use cofix::metric::{FiniteSpace, MetricSpace};

/// Points on a line plus three random self-maps of the same universe.
fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<usize>, Vec<usize>, Vec<usize>)> {
    (2usize..9).prop_flat_map(|n| {
        (
            vec(-10.0f64..10.0, n),
            vec(0..n, n),
            vec(0..n, n),
            vec(0..n, n),
        )
    })
}

fn coefficients() -> impl Strategy<Value = Coefficients> {
    (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..5.0, 0.05f64..0.99).prop_map(
        |(a, b, g, d, l, budget)| {
            let total = a + b + g + 2.0 * d;
            let s = if total > 0.0 { budget / total } else { 0.0 };
            Coefficients::new(a * s, b * s, g * s, d * s, l)
        },
    )
}

fn space(xs: &[f64]) -> MetricSpace {
    FiniteSpace::on_line(xs).unwrap().into()
}

fn opts() -> CheckOptions {
    CheckOptions::default()
}

proptest! {
    #[test]
    fn raising_l_never_breaks_a_passing_check(
        (xs, s, t, _) in instance(),
        c in coefficients(),
        extra in 0.0f64..10.0,
    ) {
        let sp = space(&xs);
        let (s, t) = (Mapping::Table(s), Mapping::Table(t));
        let before = check_condition_two(&sp, &s, &t, &c, &PairSource::Exhaustive, opts()).unwrap();
        let raised = Coefficients { l: c.l + extra, ..c };
        let after = check_condition_two(&sp, &s, &t, &raised, &PairSource::Exhaustive, opts()).unwrap();
        if before.satisfied {
            prop_assert!(after.satisfied);
        }
        prop_assert!(after.worst_margin <= before.worst_margin);
    }

    #[test]
    fn identity_anchor_substitutes_consistently((xs, s, t, f) in instance(), c in coefficients()) {
        let sp = space(&xs);
        let id = Mapping::identity(&sp);
        let (s, t, f) = (Mapping::Table(s), Mapping::Table(t), Mapping::Table(f));
        let src = PairSource::Exhaustive;

        let two = check_condition_two(&sp, &s, &t, &c, &src, opts()).unwrap();
        let three = check_condition_three(&sp, &s, &t, &id, &c, &src, opts()).unwrap();
        prop_assert_eq!(two.satisfied, three.satisfied);
        prop_assert_eq!(&two.worst_pair, &three.worst_pair);

        let three = check_condition_three(&sp, &s, &t, &f, &c, &src, opts()).unwrap();
        let four = check_condition_four(&sp, &s, &t, &f, &f, &c, &src, opts()).unwrap();
        prop_assert_eq!(three.satisfied, four.satisfied);
        prop_assert_eq!(&three.worst_pair, &four.worst_pair);
    }

    #[test]
    fn violations_re_verify_at_the_worst_pair((xs, s, t, f) in instance(), c in coefficients(), three in any::<bool>()) {
        let sp = space(&xs);
        let maps = if three {
            MappingSet::three(s, t, f)
        } else {
            MappingSet::two(s, t)
        };
        let cmaps = ConditionMaps::from_set(&maps).unwrap();
        let report = check_condition(&sp, &cmaps, &c, &PairSource::Exhaustive, opts()).unwrap();
        prop_assert_eq!(report.satisfied, report.worst_margin <= report.tolerance);
        if !report.satisfied {
            let (x, y) = report.worst_pair.clone().unwrap();
            let terms = condition_terms(&sp, &cmaps, &x, &y).unwrap();
            prop_assert_eq!(terms.lhs, report.worst_lhs);
            prop_assert_eq!(terms.lhs - terms.rhs(&c), report.worst_margin);
            prop_assert!(report.worst_margin > report.tolerance);
        }
    }

    #[test]
    fn synthesized_tuples_re_verify((xs, s, t, f) in instance(), three in any::<bool>()) {
        let sp = space(&xs);
        let maps = if three { MappingSet::three(s, t, f) } else { MappingSet::two(s, t) };
        if let Ok(syn) = synthesize_coefficients(&sp, &maps, &PairSource::Exhaustive, 0.05, opts()) {
            let c = syn.coefficients.validate().unwrap();
            prop_assert!(c.budget() <= 0.95 + 1e-12);
            let cmaps = ConditionMaps::from_set(&maps).unwrap();
            let r = check_condition(&sp, &cmaps, &c, &PairSource::Exhaustive, opts()).unwrap();
            prop_assert!(r.satisfied);
        }
    }

    #[test]
    fn budgets_of_one_or_more_are_rejected(
        a in 0.0f64..2.0, b in 0.0f64..2.0, g in 0.0f64..2.0, d in 0.0f64..2.0, l in 0.0f64..3.0,
    ) {
        let c = Coefficients::new(a, b, g, d, l);
        prop_assert_eq!(c.validate().is_ok(), c.budget() < 1.0);
    }
}
