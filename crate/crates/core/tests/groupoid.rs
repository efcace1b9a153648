mod common;

use std::sync::Arc;

use leafwise_core::groupoid::*;
use proptest::prelude::*;

fn cyclic_action(n: usize, m: usize, step: usize) -> GroupoidModel {
    let g = FiniteGroup::cyclic(n);
    let perm: Vec<Vec<usize>> = (0..n)
        .map(|h| (0..m).map(|x| (x + h * step) % m).collect())
        .collect();
    GroupoidModel::action(&g, &perm).unwrap()
}

#[test]
fn action_groupoid_counts() {
    let gp = cyclic_action(3, 6, 2);
    assert_eq!(gp.n_arrows(), 18);
    assert_eq!(gp.orbit(0), vec![0, 2, 4]);
}

#[test]
fn cutoff_on_two_point_swap() {
    let s = common::swap_two_points(6);
    let seed = Seed::Function(Arc::new(|x, z: &[f64]| 1.0 + x as f64 + z[0] * z[1]));
    let c = compute_cutoff(&s, seed).unwrap();
    assert!(c.partition_defect(&s).unwrap() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cyclic_actions_satisfy_groupoid_laws(n in 1usize..5, k in 1usize..4, step in 0usize..3) {
        // Z/n acting on Z/(n k) by translation by multiples of `step·k`
        let m = n * k;
        let gp = cyclic_action(n, m, step * k);
        for g1 in 0..gp.n_arrows() {
            for g2 in 0..gp.n_arrows() {
                if let Some(p) = gp.compose(g1, g2) {
                    prop_assert_eq!(gp.source(p), gp.source(g1));
                    prop_assert_eq!(gp.target(p), gp.target(g2));
                }
            }
        }
    }

    #[test]
    fn cutoff_partition_of_unity(a in 0.1f64..3.0, b in -2.0f64..2.0, c in -2.0f64..2.0) {
        let s = common::half_shift(8);
        let seed = Seed::Function(Arc::new(move |_, z: &[f64]| {
            a + (b * (6.283 * z[0]).sin() + c * (6.283 * z[1]).cos()).exp()
        }));
        let cut = compute_cutoff(&s, seed).unwrap();
        prop_assert!(cut.partition_defect(&s).unwrap() < 1e-12);
        prop_assert!(cut.values[0].iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn modular_cocycle_multiplicative(w in proptest::collection::vec(0.1f64..10.0, 4), om in proptest::collection::vec(0.1f64..10.0, 4)) {
        let gp = cyclic_action(4, 4, 1);
        let base = BaseModel::new(w, vec![1; 4]).unwrap();
        let omega = TransversalDensity::new(om).unwrap();
        let d = modular_cocycle(&gp, &base, &omega).unwrap();
        prop_assert!(cocycle_defect(&gp, &d) < 1e-12);
    }

    #[test]
    fn averaged_metric_is_invariant(a in 0.5f64..4.0, b in 0.5f64..4.0, t in -0.4f64..0.4) {
        let s = common::flip(4);
        let cut = compute_cutoff(&s, Seed::Uniform).unwrap();
        let rho: MetricFn = Arc::new(move |_, z: &[f64]| {
            let off = t * (6.283 * z[0]).sin();
            vec![a, off, off, b]
        });
        let m = average_metric(&s, rho, &cut).unwrap();
        prop_assert!(m.invariance_defect(&s).unwrap() < 1e-12);
    }
}
