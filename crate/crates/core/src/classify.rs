//! Existence and character of the absolutely continuous invariant measure.

use serde::Serialize;

use crate::affine::compose_power;
use crate::error::{Error, Result};
use crate::map::{MapParams, Side, SidedPoint};
use crate::numtheory::convergents;
use crate::rotation::{log_ratio_rationality, LogRatioVerdict, DEFAULT_DEPTH, MAX_DENOMINATOR};
use crate::scalar::{format_rational, Scalar, FLOAT_EPS};

/// Floating-point rotation amounts within this distance of a small-denominator
/// fraction are treated as that fraction.
const RIGID_ROTATION_TOL: f64 = 1e-14;
/// Grid size for floating-point identity checks.
const IDENTITY_GRID: usize = 10_000;

/// The verdict itself.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "class")]
pub enum AcimClass {
    /// `ac + b(1 − c) < 1`: no acim.
    NoAcim,
    /// Boundary case with rational `log a / log b`: `fⁿ = id`.
    PeriodicIdentity { n: u64 },
    /// Boundary case with irrational `log a / log b`: unique acim, density in `[r_lo, r_hi]`.
    UniqueEquivalentBounded { r_lo: f64, r_hi: f64 },
    /// `ac + b(1 − c) > 1`: unique acim with density of bounded variation.
    UniqueBoundedVariation,
}

impl AcimClass {
    pub fn name(&self) -> &'static str {
        match self {
            AcimClass::NoAcim => "NoAcim",
            AcimClass::PeriodicIdentity { .. } => "PeriodicIdentity",
            AcimClass::UniqueEquivalentBounded { .. } => "UniqueEquivalentBounded",
            AcimClass::UniqueBoundedVariation => "UniqueBoundedVariation",
        }
    }
}

/// Classification together with the boundary sum `ac + b(1 − c)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AcimClassification {
    #[serde(flatten)]
    pub class: AcimClass,
    pub boundary_sum: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_sum_exact: Option<String>,
}

/// Sign of `ac + b(1 − c) − 1`. Floating-point sums within `1e-12` of one are
/// rejected unless they equal one exactly.
fn boundary_sign<T: Scalar>(p: &MapParams<T>) -> Result<std::cmp::Ordering> {
    use std::cmp::Ordering;
    let s = p.boundary_sum();
    if T::EXACT {
        return Ok(s
            .partial_cmp(&T::one())
            .expect("rationals are totally ordered"));
    }
    let d = s.to_f64_lossy() - 1.0;
    if d == 0.0 {
        Ok(Ordering::Equal)
    } else if d.abs() <= FLOAT_EPS {
        Err(Error::BoundaryAmbiguous {
            boundary_sum: s.to_f64_lossy(),
        })
    } else if d < 0.0 {
        Ok(Ordering::Less)
    } else {
        Ok(Ordering::Greater)
    }
}

/// Denominator of the rotation number on the boundary, or `None` if the
/// rotation number is irrational.
fn boundary_period<T: Scalar>(p: &MapParams<T>) -> Result<Option<u64>> {
    let (a, b) = (p.a(), p.b());
    if a.is_one() && b.is_one() {
        let shift = T::one() - p.c().clone();
        if let Some(r) = shift.to_rational() {
            let den = r.denom().try_into().map_err(|_| {
                Error::InvalidParams(format!(
                    "rotation {} has a denominator beyond u64",
                    format_rational(&r)
                ))
            })?;
            return Ok(Some(den));
        }
        let x = shift.to_f64_lossy();
        let hit = convergents(x, DEFAULT_DEPTH, MAX_DENOMINATOR)
            .into_iter()
            .find(|&(num, den)| (num as f64 / den as f64 - x).abs() <= RIGID_ROTATION_TOL);
        return Ok(hit.map(|(_, den)| den as u64));
    }
    match log_ratio_rationality(a, b, DEFAULT_DEPTH)? {
        LogRatioVerdict::Rational {
            p: num,
            q: den,
            verified,
        } => {
            if !verified {
                return Err(Error::VerificationFailed(format!(
                    "a^{den} = b^{num} could not be confirmed"
                )));
            }
            // ρ = p / (p − q) in lowest terms; p and q are coprime, hence so are p and p − q
            Ok(Some((num - den).unsigned_abs()))
        }
        LogRatioVerdict::Irrational { .. } => Ok(None),
        LogRatioVerdict::UnknownAtDepth { .. } => Err(Error::IndeterminateRationality),
    }
}

/// `r_lo = min((a/b)⁴, (b/a)⁴)`.
fn density_bound<T: Scalar>(p: &MapParams<T>) -> f64 {
    let ratio = p.a().clone() / p.b().clone();
    let r4 = crate::scalar::powi(&ratio, 4);
    let r = if r4 > T::one() { T::one() / r4 } else { r4 };
    r.to_f64_lossy()
}

/// Decide which case of the classification applies.
pub fn classify<T: Scalar>(p: &MapParams<T>) -> Result<AcimClassification> {
    use std::cmp::Ordering;
    let sum = p.boundary_sum();
    let class = match boundary_sign(p)? {
        Ordering::Less => AcimClass::NoAcim,
        Ordering::Greater => AcimClass::UniqueBoundedVariation,
        Ordering::Equal => match boundary_period(p)? {
            Some(_) => AcimClass::PeriodicIdentity {
                n: identity_power(p)?,
            },
            None => {
                let r_lo = density_bound(p);
                AcimClass::UniqueEquivalentBounded {
                    r_lo,
                    r_hi: 1.0 / r_lo,
                }
            }
        },
    };
    Ok(AcimClassification {
        class,
        boundary_sum: sum.to_f64_lossy(),
        boundary_sum_exact: sum.to_rational().map(|r| format_rational(&r)),
    })
}

/// The smallest `n` with `fⁿ = id`, verified before it is returned.
pub fn identity_power<T: Scalar>(p: &MapParams<T>) -> Result<u64> {
    if boundary_sign(p)? != std::cmp::Ordering::Equal {
        return Err(Error::PreconditionViolation(
            "ac + b(1-c) must equal 1".into(),
        ));
    }
    let n = boundary_period(p)?.ok_or_else(|| {
        Error::PreconditionViolation(
            "rotation number is irrational; no power of f is the identity".into(),
        )
    })?;
    verify_identity(p, n)?;
    Ok(n)
}

fn verify_identity<T: Scalar>(p: &MapParams<T>, n: u64) -> Result<()> {
    let steps = n as usize;
    if T::EXACT {
        let pieces = compose_power(p, steps);
        if let Some(bad) = pieces.iter().find(|piece| !piece.map.is_identity()) {
            return Err(Error::VerificationFailed(format!(
                "f^{n} = {}x + {} on ({}, {})",
                bad.map.slope, bad.map.offset, bad.lo, bad.hi
            )));
        }
        return Ok(());
    }
    for k in 0..=IDENTITY_GRID {
        let x = T::from_ratio(k as i64, IDENTITY_GRID as i64);
        let trace = p.iterate(
            SidedPoint::plain(x.clone()),
            steps,
            crate::map::CriticalPolicy::ContinueLeft,
        )?;
        let y = trace.last().x.to_f64_lossy();
        // 0 and 1 are one point of the circle
        let d = (y - x.to_f64_lossy()).abs();
        let d = d.min(1.0 - d);
        if d > FLOAT_EPS {
            return Err(Error::VerificationFailed(format!("f^{n}({x}) = {y}")));
        }
    }
    Ok(())
}

/// `c√a + (1 − c)√b > 1`, decided without square roots for exact input.
pub fn conjugacy_condition<T: Scalar>(p: &MapParams<T>) -> bool {
    let (a, b, c) = (p.a().clone(), p.b().clone(), p.c().clone());
    if !T::EXACT {
        let (a, b, c) = (a.to_f64_lossy(), b.to_f64_lossy(), c.to_f64_lossy());
        return c * a.sqrt() + (1.0 - c) * b.sqrt() > 1.0;
    }
    // u = c√a, v = (1 − c)√b; u + v > 1 ⟺ v > 1 − u
    let one = T::one();
    let u2 = c.clone() * c.clone() * a;
    if u2 > one {
        return true;
    }
    // 1 − u ≥ 0: square both sides, v² > 1 − 2u + u² ⟺ 2u > 1 + u² − v²
    let v2 = (one.clone() - c.clone()) * (one.clone() - c) * b;
    let d = one + u2.clone() - v2;
    if d.is_negative() {
        return true;
    }
    let four = T::from_i64(4).expect("small integer");
    four * u2 > d.clone() * d
}

/// `h_s(x) = s·x / (1 + (s − 1)·x)`.
pub fn h_s<T: Scalar>(s: &T, x: &T) -> T {
    s.clone() * x.clone() / (T::one() + (s.clone() - T::one()) * x.clone())
}

/// `h_s⁻¹(y) = y / (s − (s − 1)·y)`.
pub fn h_s_inv<T: Scalar>(s: &T, y: &T) -> T {
    y.clone() / (s.clone() - (s.clone() - T::one()) * y.clone())
}

/// `h_s ∘ f ∘ h_s⁻¹ (x)`. The conjugated critical point `h_s(c)` needs a side.
pub fn conjugate_map_eval<T: Scalar>(p: &MapParams<T>, s: &T, x: &SidedPoint<T>) -> Result<T> {
    if !s.is_positive() {
        return Err(Error::InvalidParams(format!("s must be positive, got {s}")));
    }
    let critical = h_s(s, p.c());
    let z = if crate::scalar::approx_eq(&x.x, &critical) && x.side != Side::Plain {
        SidedPoint {
            x: p.c().clone(),
            side: x.side,
        }
    } else {
        SidedPoint::plain(h_s_inv(s, &x.x))
    };
    let y = p.eval(&z)?;
    Ok(h_s(s, &y))
}
