use proptest::collection::vec;
use proptest::prelude::*;

use cofix::metric::{verify_metric_axioms, EuclideanSpace, FiniteSpace, MetricSpace, Point};
use cofix::oracle::{generate_instance, InstanceRecipe, MetricMode};

fn small_table() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..7).prop_flat_map(|n| vec(vec(0.0f64..4.0, n), n))
}

proptest! {
    #[test]
    fn tabulated_points_keep_euclidean_distances(
        points in (1usize..4).prop_flat_map(|m| vec(vec(-50.0f64..50.0, m), 1..16))
    ) {
        let m = points[0].len();
        let table: MetricSpace = FiniteSpace::tabulate(&points).unwrap().into();
        let e: MetricSpace = EuclideanSpace::new(m).unwrap().into();
        for i in 0..points.len() {
            for j in 0..points.len() {
                let tabulated = table.distance(&Point::Index(i), &Point::Index(j)).unwrap();
                let direct = e
                    .distance(&Point::Vector(points[i].clone()), &Point::Vector(points[j].clone()))
                    .unwrap();
                prop_assert!((tabulated - direct).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn accepted_tables_are_metrics(rows in small_table()) {
        // Symmetrise with a zero diagonal so a fair share of tables pass.
        let n = rows.len();
        let sym: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { rows[i.min(j)][i.max(j)] }).collect())
            .collect();
        let fs = FiniteSpace::new(sym).unwrap();
        let space: MetricSpace = fs.clone().into();
        if verify_metric_axioms(&space, 0.0).passed {
            for x in 0..n {
                for y in 0..n {
                    prop_assert_eq!(fs.d(x, y), fs.d(y, x));
                    prop_assert_eq!(fs.d(x, y) == 0.0, x == y);
                    for z in 0..n {
                        prop_assert!(fs.d(x, z) <= fs.d(x, y) + fs.d(y, z));
                    }
                }
            }
        }
    }

    #[test]
    fn generated_spaces_pass_the_axioms_exactly(
        seed in any::<u64>(),
        n in 1usize..24,
        embed in any::<bool>(),
        dimension in 1usize..5,
    ) {
        let recipe = InstanceRecipe {
            seed,
            n,
            metric: if embed { MetricMode::Embedding { dimension } } else { MetricMode::RandomTable },
            ..InstanceRecipe::default()
        };
        let a = generate_instance(&recipe).unwrap();
        prop_assert!(verify_metric_axioms(&a.space, 0.0).passed);
        let b = generate_instance(&recipe).unwrap();
        prop_assert_eq!(a, b);
    }
}
