//! Invariant density of a renormalizable map, assembled from the series
//! density of its symmetric renormalization.

use serde::Serialize;

use crate::density::closed_form::{parry_density, parry_terms_for};
use crate::density::step::{StepDensity, SumBuilder};
use crate::density::transfer::{pf_apply, pf_power};
use crate::error::{Error, Result};
use crate::map::MapParams;
use crate::periodic::{equivalence_check, renormalize, EquivalenceVerdict, RenormData};
use crate::scalar::Scalar;

/// Truncation error targeted for the series of the renormalized map.
const SERIES_TAIL: f64 = 1e-14;
/// Accepted `L1` residuals of the invariance checks.
const INVARIANCE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct RenormalizedDensity<T: Scalar> {
    pub density: StepDensity<T>,
    pub renorm: RenormData<T>,
    pub terms: usize,
    /// `‖P^κ g_* − g_*‖₁`.
    pub cycle_residual: f64,
    /// `‖P g − g‖₁`.
    pub residual: f64,
}

/// Push a density on `[0, 1]` forward onto `[u, v]` by the affine bijection,
/// dividing values by `v − u` and extending by zero.
pub fn pull_back<T: Scalar>(g: &StepDensity<T>, u: &T, v: &T) -> Result<StepDensity<T>> {
    let width = v.clone() - u.clone();
    let mut builder = SumBuilder::new();
    for (lo, hi, val) in g.pieces() {
        builder.add(
            u.clone() + lo.clone() * width.clone(),
            u.clone() + hi.clone() * width.clone(),
            val.clone() / width.clone(),
        );
    }
    builder.finish()
}

/// `g = (1/κ) Σ_{i<κ} Pⁱ g_*`, where `g_*` is the series density of the
/// renormalized map transported onto `[A, B]`.
pub fn renormalized_density<T: Scalar>(p: &MapParams<T>) -> Result<RenormalizedDensity<T>> {
    match equivalence_check(p)? {
        EquivalenceVerdict::NotEquivalent { .. } => {}
        other => {
            return Err(Error::NotApplicable(format!(
                "equivalence verdict is {}; no renormalized density",
                other.name()
            )))
        }
    }
    let renorm =
        renormalize(p)?.ok_or_else(|| Error::NotApplicable("map is not renormalizable".into()))?;
    if !renorm.symmetric {
        return Err(Error::AsymmetricRenormalization {
            left: renorm.left_slope.to_f64_lossy(),
            right: renorm.right_slope.to_f64_lossy(),
        });
    }
    let slope = renorm.rescaled.a().clone();
    let terms = parry_terms_for(slope.to_f64_lossy(), SERIES_TAIL);
    let series = parry_density(&slope, renorm.rescaled.c(), terms)?;
    let g_star = pull_back(&series.density, renorm.u(), renorm.v())?;

    let kappa = renorm.kappa;
    let cycle_residual = pf_power(p, &g_star, kappa)?.l1_distance(&g_star);
    if cycle_residual.is_nan() || cycle_residual >= INVARIANCE_TOL {
        return Err(Error::VerificationFailed(format!(
            "P^{kappa} g_* differs from g_* by {cycle_residual:e} in L1"
        )));
    }
    let mut term = g_star.clone();
    let mut sum = g_star;
    for _ in 1..kappa {
        term = pf_apply(p, &term)?;
        sum = sum.add(&term);
    }
    let density = sum.scale(&(T::one() / T::from_usize(kappa).expect("small integer")));
    let residual = pf_apply(p, &density)?.l1_distance(&density);
    if residual.is_nan() || residual >= INVARIANCE_TOL {
        return Err(Error::VerificationFailed(format!(
            "P g differs from g by {residual:e} in L1"
        )));
    }
    Ok(RenormalizedDensity {
        density,
        renorm,
        terms,
        cycle_residual,
        residual,
    })
}
