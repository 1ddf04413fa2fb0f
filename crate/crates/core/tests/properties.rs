//! Randomized invariants of the map, rotation, periodic and density modules.

mod common;

use common::*;
use lorenz_acim::{
    classify, equivalence_check, renormalize, AcimClass, CriticalPolicy, EquivalenceVerdict, Error,
    MapParams, SidedPoint,
};
use proptest::prelude::*;

/// Homeomorphic map `ac + b(1 − c) = 1` with `a > 1 > b`.
fn homeo_map(c: f64, s: f64) -> (MapParams<f64>, f64) {
    let a = 1.0 + (1.0 / c - 1.0) * s;
    let b = (1.0 - a * c) / (1.0 - c);
    let rho = a.ln() / (a.ln() - b.ln());
    (MapParams::new(a, b, c).unwrap(), rho)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn lift_identity_exact(input in lift_exact_input()) {
        check_lift_exact(input)?;
    }

    #[test]
    fn lift_identity_float(input in lift_float_input()) {
        check_lift_float(input)?;
    }

    #[test]
    fn transfer_preserves_integral_and_sign(input in transfer_input()) {
        check_transfer(input)?;
    }

    #[test]
    fn ulam_rows_are_stochastic(input in ulam_input()) {
        check_ulam_rows(input)?;
    }

    #[test]
    fn ulam_rows_are_stochastic_exact(input in ulam_exact_input()) {
        check_ulam_rows_exact(input)?;
    }

    #[test]
    fn periodic_orbits_close(input in exact_map_input()) {
        check_orbit_closure(input)?;
    }

    #[test]
    fn two_periodic_closed_form_matches_enumeration(input in exact_map_input()) {
        check_two_periodic(input)?;
    }

    #[test]
    fn images_of_central_interval_cover(input in exact_map_input()) {
        check_covering(input)?;
    }

    #[test]
    fn derivative_identity(c in 0.05f64..0.95, s in 0.05f64..=1.0, t in 0.05f64..=1.0, x in 0.0f64..=1.0, n in 1usize..=200) {
        let p = float_map(c, s, t);
        let trace = p.iterate(SidedPoint::plain(x), n, CriticalPolicy::Stop).unwrap();
        prop_assume!(trace.critical_hit.is_none());
        let m = trace.visit_counts[n] as i32;
        let (la, lb) = (p.a().ln(), p.b().ln());
        let expected = f64::from(n as i32 - m) * la + f64::from(m) * lb;
        // recursive summation error bound
        let bound = 2.0 * n as f64 * f64::EPSILON * (f64::from(n as i32 - m) * la.abs() + f64::from(m) * lb.abs());
        let got = trace.total_log_deriv();
        prop_assert!((got - expected).abs() <= bound.max(f64::EPSILON), "{got} vs {expected}");
    }

    #[test]
    fn preimages_are_sound(ci in 1i64..64, aj in 1i64..=32, bk in 1i64..=32, yn in 0i64..=101, yf in 0.0f64..=1.0) {
        let p = exact_map(ci, aj, bk);
        let y = q(yn, 101);
        for pre in p.preimages(&y) {
            prop_assert_eq!(p.eval(&pre).unwrap(), y.clone());
        }
        let pf = p.to_f64();
        for pre in pf.preimages(&yf) {
            prop_assert!((pf.eval(&pre).unwrap() - yf).abs() <= 1e-12);
        }
    }

    #[test]
    fn branches_are_increasing(c in 0.05f64..0.95, s in 0.05f64..=1.0, t in 0.05f64..=1.0, u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let p = float_map(c, s, t);
        let (u, v) = (u.min(v), u.max(v));
        prop_assume!(v - u > 1e-9);
        let (l0, l1) = (u * c, v * c);
        prop_assert!(p.eval_plain(&l0).unwrap() < p.eval_plain(&l1).unwrap());
        let (r0, r1) = (c + (1.0 - c) * u, c + (1.0 - c) * v);
        prop_assume!(r0 > c);
        prop_assert!(p.eval_plain(&r0).unwrap() < p.eval_plain(&r1).unwrap());
    }

    #[test]
    fn parry_verdict_matches_threshold(a in 1.0001f64..2.0) {
        prop_assume!((a - 2f64.sqrt()).abs() > 1e-6);
        let p = MapParams::new(a, a, 0.5).unwrap();
        let verdict = equivalence_check(&p).unwrap();
        prop_assert_eq!(matches!(verdict, EquivalenceVerdict::NotEquivalent { .. }), a < 2f64.sqrt());
    }

    #[test]
    fn visit_counts_track_rotation(c in 0.1f64..0.9, s in 0.05f64..0.95, x in 0.0f64..=1.0) {
        let (p, rho) = homeo_map(c, s);
        let n = 100_000;
        let trace = p.iterate(SidedPoint::plain(x), n, CriticalPolicy::Stop).unwrap();
        prop_assume!(trace.critical_hit.is_none());
        for (k, m) in trace.visit_counts.iter().enumerate() {
            prop_assert!((*m as f64 - k as f64 * rho).abs() <= 4.0, "k = {k}, m = {m}, rho = {rho}");
        }
    }

    #[test]
    fn lift_stays_near_rigid_rotation(c in 0.1f64..0.9, s in 0.05f64..0.95) {
        let (p, rho) = homeo_map(c, s);
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            let mut pt = p.lift_point(&x);
            for n in 1..=10_000 {
                pt = p.lift_step(&pt);
                let drift = pt.turns as f64 + pt.pos - x - n as f64 * rho;
                prop_assert!(drift.abs() <= 2.0, "x = {x}, n = {n}, drift = {drift}");
            }
        }
    }

    #[test]
    fn classification_is_backend_invariant(ci in 1i64..64, s in 1i64..=64, t in 1i64..=64) {
        // dyadic parameters are exact in both backends
        let aj = (s * (4096 / ci) / 64).max(1);
        let bk = (t * (4096 / (64 - ci)) / 64).max(1);
        let exact = MapParams::new(q(aj, 64), q(bk, 64), q(ci, 64)).unwrap();
        let float = exact.to_f64();
        let ce = classify(&exact).unwrap();
        let cf = match classify(&float) {
            Err(Error::IndeterminateRationality) => return Err(TestCaseError::reject("indeterminate")),
            other => other.unwrap(),
        };
        prop_assert_eq!(ce.class.name(), cf.class.name());
        match (ce.class, cf.class) {
            (AcimClass::PeriodicIdentity { n }, AcimClass::PeriodicIdentity { n: m }) => prop_assert_eq!(n, m),
            (AcimClass::UniqueEquivalentBounded { r_lo, .. }, AcimClass::UniqueEquivalentBounded { r_lo: s_lo, .. }) => {
                prop_assert!((r_lo - s_lo).abs() <= 1e-12)
            }
            _ => {}
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: CASES, max_global_rejects: 20_000, ..ProptestConfig::default() })]

    #[test]
    fn renormalization_round_trip(ci in 1i64..64, sj in 1i64..=80, tk in 1i64..=80) {
        let p = two_periodic_map(ci, sj, tk, 201);
        let Some(r) = renormalize(&p).unwrap() else {
            return Err(TestCaseError::reject("not renormalizable"));
        };
        let (u, v, c) = (r.u().clone(), r.v().clone(), p.c().clone());
        let width = v.clone() - u.clone();
        for k in 1..=100i64 {
            let left = u.clone() + (c.clone() - u.clone()) * q(k, 101);
            let right = c.clone() + (v.clone() - c.clone()) * q(k, 101);
            for x in [left, right] {
                let Some(fx) = apply_n(&p, &x, r.kappa) else { continue };
                let t = (x.clone() - u.clone()) / width.clone();
                let conj = u.clone() + width.clone() * r.rescaled.eval_plain(&t).unwrap();
                prop_assert_eq!(conj, fx);
            }
        }
    }
}
