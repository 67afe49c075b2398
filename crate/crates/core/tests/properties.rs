//! Property tests against independent oracles: finite differences for
//! Jacobians, complex arithmetic for realified germs, closed-form
//! stereographic inverse, and the sphere planner invariants.

use milnor_core::germ::builtin_germ;
use milnor_core::linalg::{dist, dot, norm};
use milnor_core::sphere_geom::{nu_field, stereo_p, stereo_q, v_field, SpherePoint};
use milnor_core::sphere_planner::{plan, region_member, Style};
use num_complex::Complex64;
use proptest::prelude::*;

fn vec_in(dim: usize, r: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-r..r, dim)
}

fn sphere_point(m: usize) -> impl Strategy<Value = SpherePoint> {
    vec_in(m + 1, 1.0)
        .prop_filter("away from 0", |v| norm(v) > 1e-3)
        .prop_map(|v| SpherePoint::normalize(&v).unwrap())
}

fn complex_oracle(name: &str, x: &[f64]) -> Complex64 {
    let z = Complex64::new(x[0], x[1]);
    let w = Complex64::new(x[2], x[3]);
    match name {
        "complex-z2w2" => z * z + w * w,
        "complex-z2w3" => z * z + w * w * w,
        "arrangement-braid2" => z * w * (z - w),
        "arrangement-single" => z,
        _ => unreachable!(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobian_matches_central_differences(x in vec_in(4, 0.5), pick in 0usize..5) {
        let name = ["complex-z2w2", "complex-z2w3", "arrangement-braid2", "real-twist4to3", "projection4to3"][pick];
        let g = builtin_germ(name).unwrap();
        let j = g.map.jacobian(&x).unwrap();
        let h = 1e-6;
        for col in 0..4 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[col] += h;
            xm[col] -= h;
            let (fp, fm) = (g.map.eval(&xp).unwrap(), g.map.eval(&xm).unwrap());
            for row in 0..g.p() {
                let fd = (fp[row] - fm[row]) / (2.0 * h);
                prop_assert!((j[(row, col)] - fd).abs() <= 1e-7, "{name} ({row},{col}): {} vs {fd}", j[(row, col)]);
            }
        }
    }

    #[test]
    fn realified_germs_match_complex_arithmetic(x in vec_in(4, 2.0), pick in 0usize..4) {
        let name = ["complex-z2w2", "complex-z2w3", "arrangement-braid2", "arrangement-single"][pick];
        let g = builtin_germ(name).unwrap();
        let f = g.map.eval(&x).unwrap();
        let c = complex_oracle(name, &x);
        prop_assert!((f[0] - c.re).abs() <= 1e-12 * (1.0 + c.norm()));
        prop_assert!((f[1] - c.im).abs() <= 1e-12 * (1.0 + c.norm()));
    }

    #[test]
    fn weighted_homogeneity(x in vec_in(4, 1.0), t in 0.1f64..3.0) {
        // z² + w² and the braid polynomial are homogeneous of degree 2 and 3
        for (name, d) in [("complex-z2w2", 2), ("arrangement-braid2", 3)] {
            let g = builtin_germ(name).unwrap();
            let tx: Vec<f64> = x.iter().map(|v| t * v).collect();
            let lhs = g.map.eval(&tx).unwrap();
            let rhs: Vec<f64> = g.map.eval(&x).unwrap().iter().map(|v| t.powi(d) * v).collect();
            prop_assert!(dist(&lhs, &rhs) <= 1e-12 * (1.0 + norm(&rhs)));
        }
    }

    #[test]
    fn stereographic_round_trip(y in vec_in(3, 20.0)) {
        let x = stereo_q(&y);
        prop_assert!((norm(x.coords()) - 1.0).abs() <= 1e-12);
        // closed-form inverse: (2y, |y|² − 1) / (|y|² + 1)
        let s = dot(&y, &y);
        let mut oracle: Vec<f64> = y.iter().map(|v| 2.0 * v / (s + 1.0)).collect();
        oracle.push((s - 1.0) / (s + 1.0));
        prop_assert!(dist(x.coords(), &oracle) <= 1e-12);
        let back = stereo_p(&x).unwrap();
        prop_assert!(dist(&back, &y) <= 1e-9 * (1.0 + s));
    }

    #[test]
    fn tangent_fields(x3 in sphere_point(3), x2 in sphere_point(2)) {
        let v = v_field(&x3).unwrap();
        prop_assert!(dot(&v, x3.coords()).abs() <= 1e-15);
        prop_assert!((norm(&v) - 1.0).abs() <= 1e-12);
        let nu = nu_field(&x2).unwrap();
        prop_assert!(dot(&nu, x2.coords()).abs() <= 1e-15);
        let c = x2.coords();
        prop_assert!((norm(&nu) - (1.0 - c[0] * c[0]).max(0.0).sqrt()).abs() <= 1e-12);
    }

    #[test]
    fn sphere_plans_hold_their_contract(m in 1usize..5, seed in any::<u64>()) {
        let mut rng = milnor_core::sampling::rng_for(seed, 0);
        let a = SpherePoint::normalize(&milnor_core::sampling::random_unit(m + 1, &mut rng)).unwrap();
        let b = SpherePoint::normalize(&milnor_core::sampling::random_unit(m + 1, &mut rng)).unwrap();
        for (a, b) in [(a.clone(), b.clone()), (a.clone(), a.neg()), (a.clone(), a.clone())] {
            let r = plan(&a, &b).unwrap();
            let max_region = if m % 2 == 1 { 2 } else { 3 };
            prop_assert!(r.region <= max_region);
            prop_assert!(region_member(m, Style::for_dim(m), r.region, &a, &b).unwrap().0);
            prop_assert_eq!(r.path.eval(0.0), a.coords().to_vec());
            prop_assert_eq!(r.path.eval(1.0), b.coords().to_vec());
            for k in 0..=64 {
                let x = r.path.eval(k as f64 / 64.0);
                prop_assert!((norm(&x) - 1.0).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn coincident_pairs_give_constant_paths() {
    let a = SpherePoint::normalize(&[0.3, -0.4, 0.5, 0.1]).unwrap();
    let r = plan(&a, &a).unwrap();
    assert_eq!(r.region, 1);
    for k in 0..=8 {
        assert!(dist(&r.path.eval(k as f64 / 8.0), a.coords()) <= 1e-15);
    }
}
