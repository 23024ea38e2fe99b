//! Property tests for the structural invariants of the density layer.

use interlace::densities::{
    coalescing_cdf, entrance_mu, entrance_nu, km_density, lambda_kernel, q_density,
    q_density_dual, top_eigenvalue_cdf, vandermonde_h,
};
use interlace::{InterlacedPoint, OrderedPoint, Time};
use proptest::prelude::*;

fn time_strategy() -> impl Strategy<Value = f64> {
    0.05f64..3.0
}

/// Strictly interlaced (x, y) of rank n with O(1) coordinates.
fn interlaced_strategy(n: usize) -> impl Strategy<Value = InterlacedPoint> {
    (
        -2.0f64..0.0,
        prop::collection::vec(0.05f64..1.0, n),
        prop::collection::vec(0.05f64..0.95, n),
    )
        .prop_map(move |(x0, gaps, fracs)| {
            let mut x = vec![x0];
            for g in &gaps {
                x.push(x.last().unwrap() + 0.05 + g);
            }
            let y: Vec<f64> =
                (0..n).map(|i| x[i] + fracs[i] * (x[i + 1] - x[i])).collect();
            InterlacedPoint::new(x, y).expect("construction is interlaced")
        })
}

fn ordered_strategy(n: usize) -> impl Strategy<Value = OrderedPoint> {
    (-2.0f64..0.0, prop::collection::vec(0.01f64..1.0, n - 1)).prop_map(|(first, gaps)| {
        let mut v = vec![first];
        for g in gaps {
            v.push(v.last().unwrap() + g);
        }
        OrderedPoint::new(v).expect("sorted by construction")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn duality_is_exact_transpose(
        (w, w2) in (1usize..=3)
            .prop_flat_map(|n| (interlaced_strategy(n), interlaced_strategy(n))),
        tv in time_strategy(),
    ) {
        let t = Time::new(tv).unwrap();
        let a = q_density_dual(&w, &w2, t).unwrap().value;
        let b = q_density(&w2, &w, t).unwrap().value;
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn km_density_nonnegative_and_symmetric(
        y in ordered_strategy(3),
        y2 in ordered_strategy(3),
        tv in time_strategy(),
    ) {
        let t = Time::new(tv).unwrap();
        let a = km_density(&y, &y2, t).unwrap().value;
        let b = km_density(&y2, &y, t).unwrap().value;
        prop_assert!(a >= 0.0);
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
    }

    #[test]
    fn q_density_nonnegative_on_cone(
        w in interlaced_strategy(2),
        w2 in interlaced_strategy(2),
        tv in time_strategy(),
    ) {
        let t = Time::new(tv).unwrap();
        prop_assert!(q_density(&w, &w2, t).unwrap().value >= 0.0);
    }

    #[test]
    fn entrance_factorization(
        w in interlaced_strategy(2),
        tv in time_strategy(),
    ) {
        let t = Time::new(tv).unwrap();
        let nu = entrance_nu(&w, t).value;
        let mu = entrance_mu(w.x_point(), t).value;
        let lam = lambda_kernel(
            w.x_point(),
            &OrderedPoint::new(w.y().to_vec()).unwrap(),
        ).unwrap().value;
        let scale = nu.abs().max(mu * lam).max(1e-300);
        prop_assert!((nu - mu * lam).abs() <= 1e-12 * scale);
    }

    #[test]
    fn top_cdf_bounded_monotone(
        n in 1usize..=4,
        x in -4.0f64..4.0,
        tv in time_strategy(),
    ) {
        let t = Time::new(tv).unwrap();
        let v = top_eigenvalue_cdf(n, x, t);
        let v_up = top_eigenvalue_cdf(n, x + 0.3, t);
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert!(v_up >= v - 1e-12);
    }

    #[test]
    fn coalescing_cdf_in_unit_interval(
        z in ordered_strategy(3),
        shift in -1.0f64..1.0,
        tv in time_strategy(),
    ) {
        let t = Time::new(tv).unwrap();
        let z2: Vec<f64> = z.values().iter().map(|v| v + shift).collect();
        let p = coalescing_cdf(&z, &z2, t).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn vandermonde_zero_iff_tie(v in ordered_strategy(3)) {
        let h = vandermonde_h(&v);
        let has_tie = v.values().windows(2).any(|w| w[0] == w[1]);
        prop_assert_eq!(h == 0.0, has_tie);
        prop_assert!(h >= 0.0);
    }
}
