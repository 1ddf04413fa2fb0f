//! Generators and checks shared by the property and acceptance targets.
#![allow(dead_code)]

use lorenz_acim::density::{pf_apply, ulam_matrix, StepDensity};
use lorenz_acim::{
    equivalence_check, minimal_period, periodic_orbit, Branch, CriticalPolicy, Kappa, MapParams,
    Rational, Scalar, SidedPoint,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

pub const CASES: u32 = 200;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

/// `c = ci/64`, `a = (aj/32)/c`, `b = (bk/32)/(1 − c)`: every admissible shape.
pub fn exact_map(ci: i64, aj: i64, bk: i64) -> MapParams<Rational> {
    let c = q(ci, 64);
    let a = q(aj, 32) / c.clone();
    let b = q(bk, 32) / (q(1, 1) - c.clone());
    MapParams::new(a, b, c).unwrap()
}

/// Both slopes above one.
pub fn expanding_map(ci: i64, sj: i64, tk: i64) -> MapParams<Rational> {
    let one = q(1, 1);
    let c = q(ci, 64);
    let a = one.clone() + (one.clone() / c.clone() - one.clone()) * q(sj, 33);
    let b = one.clone() + (one.clone() / (one.clone() - c.clone()) - one.clone()) * q(tk, 33);
    MapParams::new(a, b, c).unwrap()
}

/// No fixed point and `f(0) < c < f(1)`, so the minimal period is two.
pub fn two_periodic_map(ci: i64, sj: i64, tk: i64, den: i64) -> MapParams<Rational> {
    let one = q(1, 1);
    let c = q(ci, 64);
    let lo_a = std::cmp::max(one.clone(), (one.clone() - c.clone()) / c.clone());
    let lo_b = std::cmp::max(one.clone(), c.clone() / (one.clone() - c.clone()));
    let a = lo_a.clone() + (one.clone() / c.clone() - lo_a) * q(sj, den);
    let b = lo_b.clone() + (one.clone() / (one.clone() - c.clone()) - lo_b) * q(tk, den);
    MapParams::new(a, b, c).unwrap()
}

pub fn float_map(c: f64, s: f64, t: f64) -> MapParams<f64> {
    MapParams::new(s / c, t / (1.0 - c), c).unwrap()
}

pub fn step_density(cuts: &[i64], vals: &[i64]) -> StepDensity<Rational> {
    let mut xs: Vec<i64> = cuts.to_vec();
    xs.sort_unstable();
    xs.dedup();
    let mut bps = vec![q(0, 1)];
    bps.extend(xs.iter().map(|&k| q(k, 97)));
    bps.push(q(1, 1));
    let values = (0..bps.len() - 1)
        .map(|i| q(vals[i % vals.len()], 7))
        .collect();
    StepDensity::new(bps, values).unwrap()
}

pub fn apply_n<T: Scalar>(p: &MapParams<T>, x: &T, n: usize) -> Option<T> {
    let trace = p
        .iterate(SidedPoint::plain(x.clone()), n, CriticalPolicy::Stop)
        .unwrap();
    trace.critical_hit.is_none().then(|| trace.last().x.clone())
}

/// `f^n(x) = x`, reading `c` as `c⁻` or `c⁺` when the orbit meets it.
pub fn returns_to<T: Scalar>(p: &MapParams<T>, x: &T, n: usize) -> bool {
    [
        CriticalPolicy::Stop,
        CriticalPolicy::ContinueLeft,
        CriticalPolicy::ContinueRight,
    ]
    .into_iter()
    .any(|policy| {
        let trace = p.iterate(SidedPoint::plain(x.clone()), n, policy).unwrap();
        trace.steps() == n && &trace.last().x == x
    })
}

/// Images of a closed interval under `f`, split at `c`.
pub fn interval_image<T: Scalar>(p: &MapParams<T>, lo: &T, hi: &T) -> Vec<(T, T)> {
    let c = p.c();
    if hi <= c {
        vec![(
            p.apply_branch(Branch::Left, lo),
            p.apply_branch(Branch::Left, hi),
        )]
    } else if lo >= c {
        vec![(
            p.apply_branch(Branch::Right, lo),
            p.apply_branch(Branch::Right, hi),
        )]
    } else {
        vec![
            (p.apply_branch(Branch::Left, lo), T::one()),
            (T::zero(), p.apply_branch(Branch::Right, hi)),
        ]
    }
}

/// Whether the union of closed intervals covers `[0, 1]`.
pub fn covers_unit<T: Scalar>(mut intervals: Vec<(T, T)>) -> bool {
    intervals.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut reach = T::zero();
    for (lo, hi) in intervals {
        if lo > reach {
            return false;
        }
        if hi > reach {
            reach = hi;
        }
    }
    reach >= T::one()
}

pub type ExactMapInput = (i64, i64, i64);

pub fn exact_map_input() -> impl Strategy<Value = ExactMapInput> {
    (1i64..64, 1i64..=32, 1i64..=32)
}

pub fn float_map_input() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.05f64..0.95, 0.05f64..=1.0, 0.05f64..=1.0)
}

pub fn lift_exact_input() -> impl Strategy<Value = (ExactMapInput, i64, usize)> {
    (exact_map_input(), 0i64..=101, 0usize..=60)
}

pub fn lift_float_input() -> impl Strategy<Value = ((f64, f64, f64), f64, usize)> {
    (float_map_input(), 0.0f64..=1.0, 0usize..=1000)
}

pub fn transfer_input() -> impl Strategy<Value = (ExactMapInput, Vec<i64>, Vec<i64>)> {
    (
        exact_map_input(),
        prop::collection::vec(1i64..97, 0..6),
        prop::collection::vec(0i64..20, 1..7),
    )
}

pub fn ulam_input() -> impl Strategy<Value = ((f64, f64, f64), usize)> {
    (float_map_input(), 2usize..300)
}

pub fn ulam_exact_input() -> impl Strategy<Value = (ExactMapInput, usize)> {
    (exact_map_input(), 2usize..40)
}

/// `Fⁿ(x) = mₙ + fⁿ(x)`, exactly.
pub fn check_lift_exact(
    ((ci, aj, bk), xn, n): (ExactMapInput, i64, usize),
) -> Result<(), TestCaseError> {
    let p = exact_map(ci, aj, bk);
    let x = q(xn, 101);
    let trace = p
        .iterate(SidedPoint::plain(x.clone()), n, CriticalPolicy::Stop)
        .unwrap();
    prop_assume!(trace.critical_hit.is_none());
    let m = trace.visit_counts[n] as i64;
    prop_assert_eq!(
        p.lift_iterate(&x, n).value(),
        q(m, 1) + trace.last().x.clone()
    );
    Ok(())
}

/// `Fⁿ(x) = mₙ + fⁿ(x)` within `1e-9`.
pub fn check_lift_float(
    ((c, s, t), x, n): ((f64, f64, f64), f64, usize),
) -> Result<(), TestCaseError> {
    let p = float_map(c, s, t);
    let trace = p
        .iterate(SidedPoint::plain(x), n, CriticalPolicy::Stop)
        .unwrap();
    prop_assume!(trace.critical_hit.is_none());
    let want = trace.visit_counts[n] as f64 + trace.last().x;
    prop_assert!((p.lift_iterate(&x, n).value() - want).abs() <= 1e-9);
    Ok(())
}

/// Transport preserves integrals and signs.
pub fn check_transfer(
    ((ci, aj, bk), cuts, vals): (ExactMapInput, Vec<i64>, Vec<i64>),
) -> Result<(), TestCaseError> {
    let p = exact_map(ci, aj, bk);
    let h = step_density(&cuts, &vals);
    let g = pf_apply(&p, &h).unwrap();
    prop_assert_eq!(g.integral(), h.integral());
    prop_assert!(g.values().iter().all(|v| v >= &q(0, 1)));

    let (pf, hf) = (p.to_f64(), h.to_f64());
    let gf = pf_apply(&pf, &hf).unwrap();
    prop_assert!((gf.integral() - hf.integral()).abs() <= 1e-12);
    prop_assert!(gf.values().iter().all(|v| *v >= 0.0));
    Ok(())
}

pub fn check_ulam_rows(((c, s, t), n): ((f64, f64, f64), usize)) -> Result<(), TestCaseError> {
    let p = float_map(c, s, t);
    let u = ulam_matrix(&p, n).unwrap();
    for i in 0..n {
        prop_assert!((u.row_sum(i) - 1.0).abs() <= 1e-12);
        prop_assert!(u.row_blocks(i) <= 2);
    }
    Ok(())
}

pub fn check_ulam_rows_exact(
    ((ci, aj, bk), n): (ExactMapInput, usize),
) -> Result<(), TestCaseError> {
    let p = exact_map(ci, aj, bk);
    let u = ulam_matrix(&p, n).unwrap();
    for i in 0..n {
        prop_assert_eq!(u.row_sum(i), q(1, 1));
        prop_assert!(u.row_blocks(i) <= 2);
    }
    Ok(())
}

/// Every point of the `κ`-orbit returns after `κ` steps.
pub fn check_orbit_closure((ci, sj, tk): ExactMapInput) -> Result<(), TestCaseError> {
    let p = expanding_map(ci, sj, tk);
    let Kappa::Finite(kappa) = minimal_period(&p, 64).unwrap() else {
        return Err(TestCaseError::reject("no finite period"));
    };
    prop_assume!(kappa <= 8);
    let s = periodic_orbit(&p, kappa).unwrap();
    prop_assert_eq!(s.orbit.len(), kappa);
    for x in &s.orbit {
        prop_assert!(returns_to(&p, x, kappa));
    }

    let pf = p.to_f64();
    prop_assume!(minimal_period(&pf, 64).unwrap() == Kappa::Finite(kappa));
    let sf = periodic_orbit(&pf, kappa).unwrap();
    for x in &sf.orbit {
        if let Some(y) = apply_n(&pf, x, kappa) {
            prop_assert!((y - x).abs() <= 1e-10);
        }
    }
    Ok(())
}

/// Enumerated 2-orbit against the solution of `x = b(y − c)`, `y = ax + 1 − ac`.
pub fn check_two_periodic((ci, sj, tk): ExactMapInput) -> Result<(), TestCaseError> {
    let p = two_periodic_map(ci, sj, tk, 33);
    prop_assert_eq!(minimal_period(&p, 64).unwrap(), Kappa::Finite(2));
    let s = periodic_orbit(&p, 2).unwrap();
    let (a, b, c) = (p.a().clone(), p.b().clone(), p.c().clone());
    let one = q(1, 1);
    let x = b.clone() * (one.clone() - a.clone() * c.clone() - c.clone())
        / (one.clone() - a.clone() * b);
    let y = a.clone() * x.clone() + one - a * c;
    prop_assert_eq!(s.p_left, Some(x));
    prop_assert_eq!(s.p_right, Some(y));
    prop_assert_eq!(s.a_image, Some(p.f0()));
    prop_assert_eq!(s.b_image, Some(p.f1()));
    prop_assert!(equivalence_check(&p).is_ok());
    Ok(())
}

/// The first `κ` images of `[P_L, P_R]` cover `[0, 1]`.
pub fn check_covering((ci, sj, tk): ExactMapInput) -> Result<(), TestCaseError> {
    let p = expanding_map(ci, sj, tk);
    let Kappa::Finite(kappa) = minimal_period(&p, 64).unwrap() else {
        return Err(TestCaseError::reject("no finite period"));
    };
    prop_assume!((2..=8).contains(&kappa));
    let s = periodic_orbit(&p, kappa).unwrap();
    let (pl, pr) = (s.p_left.unwrap(), s.p_right.unwrap());
    let mut current = vec![(pl, pr)];
    let mut all = current.clone();
    for _ in 1..kappa {
        current = current
            .iter()
            .flat_map(|(lo, hi)| interval_image(&p, lo, hi))
            .collect();
        all.extend(current.iter().cloned());
    }
    prop_assert!(covers_unit(all));
    Ok(())
}

fn run<S: Strategy>(
    strategy: S,
    check: impl Fn(S::Value) -> Result<(), TestCaseError>,
    cases: u32,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, check).map_err(|e| e.to_string())
}

/// Run every listed suite with `cases` instances; one result per suite.
pub fn run_listed_suites(cases: u32) -> Vec<(&'static str, Result<(), String>)> {
    vec![
        (
            "lift identity (exact)",
            run(lift_exact_input(), check_lift_exact, cases),
        ),
        (
            "lift identity (float)",
            run(lift_float_input(), check_lift_float, cases),
        ),
        (
            "transfer integral preservation",
            run(transfer_input(), check_transfer, cases),
        ),
        (
            "ulam row stochasticity",
            run(ulam_input(), check_ulam_rows, cases),
        ),
        (
            "ulam row stochasticity (exact)",
            run(ulam_exact_input(), check_ulam_rows_exact, cases),
        ),
        (
            "periodic orbit closure",
            run(exact_map_input(), check_orbit_closure, cases),
        ),
        (
            "two-periodic closed form",
            run(exact_map_input(), check_two_periodic, cases),
        ),
        (
            "covering identity",
            run(exact_map_input(), check_covering, cases),
        ),
    ]
}
