//! Closed-form invariant densities.

use serde::Serialize;

use crate::density::step::{StepDensity, SumBuilder};
use crate::density::transfer::pf_apply;
use crate::error::{Error, Result};
use crate::map::{CriticalPolicy, MapParams, SidedPoint};
use crate::scalar::{powi, Scalar};

/// A series density together with its truncation error bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct SeriesDensity<T: Scalar> {
    pub density: StepDensity<T>,
    pub terms: usize,
    /// `2·a^{−terms+1}/(a − 1)`.
    pub tail_bound: f64,
}

/// `2·a^{−terms+1}/(a − 1)`.
pub fn parry_tail_bound(a: f64, terms: usize) -> f64 {
    2.0 * a.powi(1 - terms as i32) / (a - 1.0)
}

/// Smallest term count whose tail bound is below `eps`.
pub fn parry_terms_for(a: f64, eps: f64) -> usize {
    let mut t = 1;
    while parry_tail_bound(a, t) >= eps {
        t += 1;
    }
    t
}

/// Invariant density of `f_{a,a,c}` from the endpoint orbits:
/// `g(x) ∝ Σ_{n<T} a⁻ⁿ (1[fⁿ(0) < x] − 1[fⁿ(1) < x])`.
///
/// The orbit of 0 continues through `c⁺` and the orbit of 1 through `c⁻`.
pub fn parry_density<T: Scalar>(a: &T, c: &T, terms: usize) -> Result<SeriesDensity<T>> {
    if a <= &T::one() {
        return Err(Error::InvalidParams(format!(
            "slope must exceed 1, got {a}"
        )));
    }
    if terms == 0 {
        return Err(Error::InvalidParams("at least one term is needed".into()));
    }
    let p = MapParams::new(a.clone(), a.clone(), c.clone())?;
    if p.f0().is_zero() && p.f1().is_one() {
        return Err(Error::DegenerateEndpoints);
    }
    let zero_orbit = p.iterate(
        SidedPoint::plain(T::zero()),
        terms - 1,
        CriticalPolicy::ContinueRight,
    )?;
    let one_orbit = p.iterate(
        SidedPoint::plain(T::one()),
        terms - 1,
        CriticalPolicy::ContinueLeft,
    )?;
    let tail_bound = parry_tail_bound(a.to_f64_lossy(), terms);
    let mut builder = SumBuilder::new();
    let inv_a = T::one() / a.clone();
    let mut weight = T::one();
    for (x0, x1) in zero_orbit.points.iter().zip(&one_orbit.points) {
        builder.add(x0.x.clone(), T::one(), weight.clone());
        builder.add(x1.x.clone(), T::one(), -weight.clone());
        weight = weight * inv_a.clone();
    }
    let mut breakpoints = vec![T::zero()];
    let mut values = Vec::new();
    for (_, hi, v) in builder.signed_pieces() {
        let v = if v.is_negative() {
            if v.to_f64_lossy().abs() > tail_bound {
                return Err(Error::InvalidDensity(format!(
                    "series value {v} is below the truncation tolerance"
                )));
            }
            T::zero()
        } else {
            v
        };
        values.push(v);
        breakpoints.push(hi);
    }
    let raw = StepDensity::new(breakpoints, values)?.simplify();
    if !raw.integral().is_positive() {
        return Err(Error::DegenerateEndpoints);
    }
    Ok(SeriesDensity {
        density: raw.normalized()?,
        terms,
        tail_bound,
    })
}

/// `S_{β,α}` with `α = 1/(β^{k−1}(β − 1))`.
pub fn markov_map<T: Scalar>(beta: &T, k: usize) -> Result<MapParams<T>> {
    if beta <= &T::one() || k == 0 {
        return Err(Error::InvalidParams(format!(
            "need β > 1 and k ≥ 1, got β = {beta}, k = {k}"
        )));
    }
    let alpha = T::one() / (powi(beta, k as i64 - 1) * (beta.clone() - T::one()));
    MapParams::lorenz_beta(beta.clone(), alpha).map_err(|e| Error::InvalidParams(e.to_string()))
}

/// `g_{β,k} = 1/(β − 1)·1_[0,1] + Σ_{i=1}^{k} β^{i−1}·1_[0, β^{−i}]`, normalized,
/// checked to be a fixed point of the transfer operator of [`markov_map`].
pub fn markov_density<T: Scalar>(beta: &T, k: usize) -> Result<StepDensity<T>> {
    let p = markov_map(beta, k)?;
    let mut builder = SumBuilder::new();
    builder.add(T::zero(), T::one(), T::one() / (beta.clone() - T::one()));
    for i in 1..=k as i64 {
        builder.add(T::zero(), powi(beta, -i), powi(beta, i - 1));
    }
    let g = builder.finish()?.normalized()?;
    check_fixed(&p, &g)?;
    Ok(g)
}

/// `f_{1, n, 1 − 1/n}`.
pub fn markov_n_map<T: Scalar>(n: usize) -> Result<MapParams<T>> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("need n ≥ 2, got {n}")));
    }
    MapParams::new(
        T::one(),
        T::from_usize(n).expect("small integer"),
        T::from_ratio(n as i64 - 1, n as i64),
    )
}

/// `g_n = 2/(n + 1) Σ_{i<n} 1_[i/n, 1]`.
pub fn markov_density_n<T: Scalar>(n: usize) -> Result<StepDensity<T>> {
    markov_n_map::<T>(n)?;
    let n64 = n as i64;
    let breakpoints = (0..=n64).map(|i| T::from_ratio(i, n64)).collect();
    let values = (0..n64)
        .map(|j| T::from_ratio(2 * (j + 1), n64 + 1))
        .collect();
    StepDensity::new(breakpoints, values)
}

fn check_fixed<T: Scalar>(p: &MapParams<T>, g: &StepDensity<T>) -> Result<()> {
    let pg = pf_apply(p, g)?;
    let fixed = if T::EXACT {
        &pg == g
    } else {
        pg.l1_distance(g) < 1e-12
    };
    if fixed {
        Ok(())
    } else {
        Err(Error::VerificationFailed(format!(
            "density is not invariant (L1 residual {:e})",
            pg.l1_distance(g)
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn markov_examples() {
        let g = markov_density(&q(2, 1), 1).unwrap();
        assert_eq!(g.breakpoints(), &[q(0, 1), q(1, 2), q(1, 1)]);
        assert_eq!(g.values(), &[q(4, 3), q(2, 3)]);

        let g = markov_density(&q(3, 2), 2).unwrap();
        assert_eq!(g.breakpoints(), &[q(0, 1), q(4, 9), q(2, 3), q(1, 1)]);
        // raw 9/2, 3, 2 scaled by the same constant
        let v = g.values();
        assert_eq!(v[0].clone() / v[2].clone(), q(9, 4));
        assert_eq!(v[1].clone() / v[2].clone(), q(3, 2));
        assert_eq!(g.integral(), q(1, 1));

        assert!(markov_density(&2.0, 1).is_ok());
        assert!(matches!(
            markov_density(&q(1, 1), 1),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn markov_n_examples() {
        let g = markov_density_n::<Rational>(2).unwrap();
        assert_eq!(g.values(), &[q(2, 3), q(4, 3)]);
        for n in 2..8 {
            let g = markov_density_n::<Rational>(n).unwrap();
            assert_eq!(g.integral(), q(1, 1));
        }
        let p = markov_n_map::<Rational>(3).unwrap();
        let g = markov_density_n::<Rational>(3).unwrap();
        assert_eq!(pf_apply(&p, &g).unwrap(), g);
    }

    #[test]
    fn parry_degenerate_and_tail() {
        assert!(matches!(
            parry_density(&2.0, &0.5, 60),
            Err(Error::DegenerateEndpoints)
        ));
        assert!(parry_tail_bound(1.8, 60) < 1e-14);
        assert!(parry_tail_bound(1.8, parry_terms_for(1.8, 1e-14)) < 1e-14);
    }

    #[test]
    fn parry_density_is_invariant() {
        let s = parry_density(&1.8, &0.5, 60).unwrap();
        let p = MapParams::new(1.8, 1.8, 0.5).unwrap();
        let pg = pf_apply(&p, &s.density).unwrap();
        assert!(pg.l1_distance(&s.density) < 1e-12);
        assert!((s.density.integral() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parry_with_one_fixed_endpoint() {
        // 0 is fixed, 1 is not
        let s = parry_density(&q(3, 2), &q(2, 3), 80).unwrap();
        let p = MapParams::new(q(3, 2), q(3, 2), q(2, 3)).unwrap();
        let pg = pf_apply(&p, &s.density).unwrap();
        assert!(pg.l1_distance(&s.density) < 1e-12);
    }
}
