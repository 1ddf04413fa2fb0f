//! The transfer operator on step densities.
//!
//! `P h(x) = h((x − f(0))/a)/a · 1_[f(0), 1](x) + h(x/b + c)/b · 1_[0, f(1)](x)`

use crate::density::step::{StepDensity, SumBuilder, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::map::{Branch, MapParams};
use crate::scalar::{max_of, min_of, Scalar};

/// `P h` with the default breakpoint budget.
pub fn pf_apply<T: Scalar>(p: &MapParams<T>, h: &StepDensity<T>) -> Result<StepDensity<T>> {
    pf_apply_with_budget(p, h, DEFAULT_BUDGET)
}

/// `P h`: each piece is transported along each branch it meets, with its
/// value divided by the branch slope.
pub fn pf_apply_with_budget<T: Scalar>(
    p: &MapParams<T>,
    h: &StepDensity<T>,
    budget: usize,
) -> Result<StepDensity<T>> {
    let c = p.c();
    let (inv_a, inv_b) = (T::one() / p.a().clone(), T::one() / p.b().clone());
    let mut builder = SumBuilder::new();
    for (lo, hi, v) in h.pieces() {
        if lo < c {
            let top = min_of(hi, c);
            builder.add(
                p.apply_branch(Branch::Left, lo),
                p.apply_branch(Branch::Left, &top),
                v.clone() * inv_a.clone(),
            );
        }
        if hi > c {
            let bottom = max_of(lo, c);
            builder.add(
                p.apply_branch(Branch::Right, &bottom),
                p.apply_branch(Branch::Right, hi),
                v.clone() * inv_b.clone(),
            );
        }
    }
    builder.finish()?.coarsen(budget)
}

/// `Pᵏ h`.
pub fn pf_power<T: Scalar>(
    p: &MapParams<T>,
    h: &StepDensity<T>,
    k: usize,
) -> Result<StepDensity<T>> {
    let mut g = h.clone();
    for _ in 0..k {
        g = pf_apply(p, &g)?;
    }
    Ok(g)
}

/// `Aₙ(h) = (1/n) Σ_{i<n} Pⁱ h`.
pub fn birkhoff_average<T: Scalar>(
    p: &MapParams<T>,
    h: &StepDensity<T>,
    n: usize,
) -> Result<StepDensity<T>> {
    if n == 0 {
        return Err(Error::InvalidParams(
            "average needs at least one term".into(),
        ));
    }
    let mut term = h.clone();
    let mut sum = h.clone();
    for _ in 1..n {
        term = pf_apply(p, &term)?;
        sum = sum.add(&term).coarsen(DEFAULT_BUDGET)?;
    }
    let inv_n = T::one() / T::from_usize(n).expect("count fits");
    Ok(sum.scale(&inv_n))
}
