//! Rotation numbers, Lyapunov exponents and the rationality of `log a / log b`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::map::{CriticalPolicy, LiftPoint, MapParams, SidedPoint};
use crate::numtheory::{convergents, log_ratio, rational_pow};
use crate::scalar::{approx_eq, format_rational, Rational, Scalar};

/// Default number of continued-fraction terms.
pub const DEFAULT_DEPTH: usize = 40;
/// Largest convergent denominator considered.
pub const MAX_DENOMINATOR: i64 = 1_000_000;

/// Above this many bits per coordinate, exact lift iteration falls back to `f64`.
const EXACT_LIFT_BITS: u64 = 4096;

/// Empirical rotation interval `[lo, hi]` from the orbits of the endpoints.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RotationEstimate {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub error_bound: f64,
}

/// Whether `log a / log b` is rational.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LogRatioVerdict {
    /// `log a / log b = p / q`.
    Rational {
        p: i64,
        q: i64,
        verified: bool,
    },
    Irrational {
        reason: String,
    },
    /// No certificate available; `p / q` is the best convergent found.
    UnknownAtDepth {
        depth: usize,
        p: i64,
        q: i64,
    },
}

/// Rotation number of a homeomorphic map.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RotationNumber {
    pub value: f64,
    /// Exact value, when the rotation number is a certified rational.
    #[serde(
        serialize_with = "serialize_opt_rational",
        skip_serializing_if = "Option::is_none"
    )]
    pub exact: Option<Rational>,
}

fn serialize_opt_rational<S: serde::Serializer>(
    x: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    x.as_ref().map(format_rational).serialize(s)
}

/// `true` when `f(0) = f(1)`, i.e. `ac + b(1 − c) = 1` (within slack for floats).
pub fn is_homeomorphism<T: Scalar>(p: &MapParams<T>) -> bool {
    approx_eq(&p.f0(), &p.f1())
}

/// Decide whether `log a / log b` is rational.
///
/// Exact inputs are settled by comparing exponent vectors over a coprime
/// basis of the numerators and denominators; a rational answer is then
/// confirmed through `a^q = b^p`. Floating-point inputs only yield the best
/// continued-fraction convergent.
pub fn log_ratio_rationality<T: Scalar>(a: &T, b: &T, depth: usize) -> Result<LogRatioVerdict> {
    if a <= &T::zero() || b <= &T::zero() {
        return Err(Error::InvalidParams("slopes must be positive".into()));
    }
    if a.is_one() || b.is_one() {
        return Err(Error::DegenerateSlope);
    }
    if let (Some(ra), Some(rb)) = (a.to_rational(), b.to_rational()) {
        return Ok(match log_ratio(&ra, &rb) {
            Some((p, q)) => {
                let verified = p.unsigned_abs() <= MAX_DENOMINATOR as u64
                    && q <= MAX_DENOMINATOR
                    && rational_pow(&ra, q) == rational_pow(&rb, p);
                LogRatioVerdict::Rational { p, q, verified }
            }
            None => LogRatioVerdict::Irrational {
                reason: "exponent vectors over a coprime factor basis are not proportional".into(),
            },
        });
    }
    let ratio = a.ln() / b.ln();
    let (p, q) = convergents(ratio, depth, MAX_DENOMINATOR)
        .last()
        .copied()
        .unwrap_or((ratio.round() as i64, 1));
    Ok(LogRatioVerdict::UnknownAtDepth { depth, p, q })
}

/// Rotation number `ρ = 1 + log b / (log a − log b)` of a homeomorphic map,
/// with `ρ = 1 − c` for the rigid rotation `a = b = 1`.
pub fn rotation_number_homeo<T: Scalar>(p: &MapParams<T>) -> Result<RotationNumber> {
    if !is_homeomorphism(p) {
        return Err(Error::NotHomeomorphism {
            f0: p.f0().to_f64_lossy(),
            f1: p.f1().to_f64_lossy(),
        });
    }
    let (a, b) = (p.a(), p.b());
    if a.is_one() && b.is_one() {
        let rho = T::one() - p.c().clone();
        return Ok(RotationNumber {
            value: rho.to_f64_lossy(),
            exact: rho.to_rational(),
        });
    }
    let (la, lb) = (a.ln(), b.ln());
    let value = la / (la - lb);
    let exact = match log_ratio_rationality(a, b, DEFAULT_DEPTH)? {
        // log a = (p/q) log b gives ρ = p / (p − q)
        LogRatioVerdict::Rational {
            p,
            q,
            verified: true,
        } => Some(Rational::from_ratio(p, p - q)),
        _ => None,
    };
    Ok(RotationNumber { value, exact })
}

/// `Fⁿ(x)` split into integer and fractional parts, iterating exactly while
/// the representation stays small and in `f64` afterwards.
pub fn lift_orbit_end<T: Scalar>(p: &MapParams<T>, x: &T, n: usize) -> (i64, f64) {
    let mut point = p.lift_point(x);
    for k in 0..n {
        if point.pos.size_bits() > EXACT_LIFT_BITS {
            let pf = p.to_f64();
            let mut pt = LiftPoint {
                turns: point.turns,
                pos: point.pos.to_f64_lossy(),
            };
            for _ in k..n {
                pt = pf.lift_step(&pt);
            }
            return (pt.turns, pt.pos);
        }
        point = p.lift_step(&point);
    }
    (point.turns, point.pos.to_f64_lossy())
}

/// `lo = Fⁿ(0)/n`, `hi = (Fⁿ(1) − 1)/n`, each within `1/n` of the rotation
/// number of its base point.
pub fn rotation_interval_estimate<T: Scalar>(
    p: &MapParams<T>,
    n: usize,
) -> Result<RotationEstimate> {
    if n == 0 {
        return Err(Error::InvalidParams(
            "iteration count must be at least 1".into(),
        ));
    }
    let nf = n as f64;
    let (t0, x0) = lift_orbit_end(p, &T::zero(), n);
    let (t1, x1) = lift_orbit_end(p, &T::one(), n);
    Ok(RotationEstimate {
        lo: (t0 as f64 + x0) / nf,
        hi: ((t1 - 1) as f64 + x1) / nf,
        n,
        error_bound: 1.0 / nf,
    })
}

/// `λₙ(x) = (1 − mₙ/n) log a + (mₙ/n) log b`.
pub fn lyapunov_estimate<T: Scalar>(p: &MapParams<T>, x: SidedPoint<T>, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParams(
            "iteration count must be at least 1".into(),
        ));
    }
    let trace = p.iterate(x, n, CriticalPolicy::Stop)?;
    if let Some(index) = trace.critical_hit {
        return Err(Error::CriticalHit { index });
    }
    Ok(trace.total_log_deriv() / n as f64)
}
