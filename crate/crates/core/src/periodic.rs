//! Minimal period, the periodic orbit bracketing `c`, equivalence of the acim
//! with Lebesgue measure, and renormalization.

use serde::{Serialize, Serializer};

use crate::affine::compose_power;
use crate::error::{Error, Result};
use crate::map::{Branch, CriticalPolicy, MapParams, SidedPoint};
use crate::scalar::{
    approx_eq, approx_le, serialize_intervals, serialize_opt_scalar, serialize_scalars, Scalar,
};

/// Default preimage search depth.
pub const DEFAULT_MAX_DEPTH: usize = 64;
/// Floating-point periodic points closer than this are one point.
const ORBIT_MERGE_TOL: f64 = 1e-9;
/// Slack for floating-point cross-checks of closed forms.
const CROSS_CHECK_TOL: f64 = 1e-10;

/// Minimal period, or proof that none was found up to a depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kappa {
    Finite(usize),
    InfiniteUpTo(usize),
}

impl Kappa {
    pub fn finite(self) -> Option<usize> {
        match self {
            Kappa::Finite(k) => Some(k),
            Kappa::InfiniteUpTo(_) => None,
        }
    }
}

impl std::fmt::Display for Kappa {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kappa::Finite(k) => write!(f, "{k}"),
            Kappa::InfiniteUpTo(d) => write!(f, ">{d}"),
        }
    }
}

impl Serialize for Kappa {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Kappa::Finite(k) => s.serialize_u64(*k as u64),
            Kappa::InfiniteUpTo(_) => s.serialize_str(&self.to_string()),
        }
    }
}

/// The unique `κ`-periodic orbit and the boundary images of `c`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct PeriodicStructure<T: Scalar> {
    pub kappa: usize,
    #[serde(serialize_with = "serialize_scalars")]
    pub orbit: Vec<T>,
    #[serde(serialize_with = "serialize_opt_scalar")]
    pub p_left: Option<T>,
    #[serde(serialize_with = "serialize_opt_scalar")]
    pub p_right: Option<T>,
    /// `A = f^κ(c⁺)`.
    #[serde(rename = "A", serialize_with = "serialize_opt_scalar")]
    pub a_image: Option<T>,
    /// `B = f^κ(c⁻)`.
    #[serde(rename = "B", serialize_with = "serialize_opt_scalar")]
    pub b_image: Option<T>,
    /// `M = min((c − A)/(B − c), (B − c)/(c − A))`, for `κ = 2` only.
    #[serde(rename = "M", serialize_with = "serialize_opt_scalar")]
    pub m_ratio: Option<T>,
}

/// Why the acim is equivalent to Lebesgue measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquivalenceReason {
    FixedPoint,
    IntervalEscape,
    ExactMatch,
}

/// Equivalence of the acim with Lebesgue measure.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case", bound = "")]
pub enum EquivalenceVerdict<T: Scalar> {
    Equivalent {
        reason: EquivalenceReason,
    },
    /// The density vanishes on each gap.
    NotEquivalent {
        #[serde(serialize_with = "serialize_intervals")]
        gaps: Vec<(T, T)>,
    },
    NotApplicable {
        reason: String,
    },
}

impl<T: Scalar> EquivalenceVerdict<T> {
    pub fn name(&self) -> &'static str {
        match self {
            EquivalenceVerdict::Equivalent { .. } => "Equivalent",
            EquivalenceVerdict::NotEquivalent { .. } => "NotEquivalent",
            EquivalenceVerdict::NotApplicable { .. } => "NotApplicable",
        }
    }

    pub fn is_equivalent(&self) -> Option<bool> {
        match self {
            EquivalenceVerdict::Equivalent { .. } => Some(true),
            EquivalenceVerdict::NotEquivalent { .. } => Some(false),
            EquivalenceVerdict::NotApplicable { .. } => None,
        }
    }
}

/// The renormalization of `f` on `[A, B]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct RenormData<T: Scalar> {
    #[serde(serialize_with = "serialize_scalars")]
    pub interval: Vec<T>,
    pub kappa: usize,
    /// Return time on `[A, c)`.
    pub ell: usize,
    /// Return time on `(c, B]`.
    pub r: usize,
    /// Slope of `f^κ` on `[A, c)`.
    #[serde(serialize_with = "crate::scalar::serialize_scalar")]
    pub left_slope: T,
    /// Slope of `f^κ` on `(c, B]`.
    #[serde(serialize_with = "crate::scalar::serialize_scalar")]
    pub right_slope: T,
    /// `f^κ` on `[A, B]` rescaled to the unit interval.
    pub rescaled: MapParams<T>,
    pub symmetric: bool,
}

impl<T: Scalar> RenormData<T> {
    pub fn u(&self) -> &T {
        &self.interval[0]
    }

    pub fn v(&self) -> &T {
        &self.interval[1]
    }
}

/// Fixed points of `f`, in increasing order.
pub fn fixed_points<T: Scalar>(p: &MapParams<T>) -> Vec<T> {
    let mut out = Vec::new();
    let (a, b, c) = (p.a(), p.b(), p.c());
    if p.f0().is_zero() || (!T::EXACT && approx_eq(&p.f0(), &T::zero())) {
        out.push(T::zero());
    } else if !a.is_one() {
        let x = p.f0() / (T::one() - a.clone());
        if approx_le(&T::zero(), &x) && &x < c {
            out.push(x);
        }
    }
    if p.f1().is_one() || (!T::EXACT && approx_eq(&p.f1(), &T::one())) {
        out.push(T::one());
    } else if !b.is_one() {
        let x = b.clone() * c.clone() / (b.clone() - T::one());
        if &x > c && approx_le(&x, &T::one()) {
            out.push(x);
        }
    }
    out
}

/// The smallest fixed point of `f`, if any.
pub fn has_fixed_point<T: Scalar>(p: &MapParams<T>) -> Option<T> {
    fixed_points(p).into_iter().next()
}

fn require_expanding<T: Scalar>(p: &MapParams<T>) -> Result<()> {
    let s = p.boundary_sum();
    if s <= T::one() {
        return Err(Error::PreconditionViolation(format!(
            "ac + b(1-c) = {s} must exceed 1"
        )));
    }
    Ok(())
}

fn insert_sorted<T: Scalar>(set: &mut Vec<T>, x: T) {
    let merge = |y: &T| {
        if T::EXACT {
            y == &x
        } else {
            (y.to_f64_lossy() - x.to_f64_lossy()).abs() <= 1e-14
        }
    };
    if !set.iter().any(merge) {
        let pos = set.partition_point(|y| y < &x);
        set.insert(pos, x);
    }
}

/// `κ = m + 2` where `m` is the first depth at which a preimage of `c` falls
/// in `[f(0), f(1)]`; `κ = 1` when `f` has a fixed point.
pub fn minimal_period<T: Scalar>(p: &MapParams<T>, max_depth: usize) -> Result<Kappa> {
    require_expanding(p)?;
    if has_fixed_point(p).is_some() {
        return Ok(Kappa::Finite(1));
    }
    let (lo, hi) = (p.f0(), p.f1());
    let mut level = vec![p.c().clone()];
    for i in 0..max_depth {
        if level.iter().any(|y| approx_le(&lo, y) && approx_le(y, &hi)) {
            return Ok(Kappa::Finite(i + 2));
        }
        let mut next = Vec::new();
        for y in &level {
            for x in p.preimages(y) {
                insert_sorted(&mut next, x.x);
            }
        }
        if next.is_empty() {
            break;
        }
        level = next;
    }
    Ok(Kappa::InfiniteUpTo(max_depth))
}

fn same_point<T: Scalar>(x: &T, y: &T) -> bool {
    if T::EXACT {
        x == y
    } else {
        (x.to_f64_lossy() - y.to_f64_lossy()).abs() <= ORBIT_MERGE_TOL
    }
}

/// Candidates for `κ`-periodic points: fixed points of the continuity pieces
/// of `f^κ`, kept only when following the piece's itinerary on the closed
/// branch domains returns to the start. A point equal to `c` is read as `c⁻`
/// or `c⁺` according to the branch taken. Each orbit is sorted and tagged
/// with the branch applied at each point.
fn periodic_candidates<T: Scalar>(p: &MapParams<T>, kappa: usize) -> Vec<Vec<(T, Branch)>> {
    let c = p.c();
    let mut orbits: Vec<Vec<(T, Branch)>> = Vec::new();
    for piece in compose_power(p, kappa) {
        let Some(x) = piece.map.fixed_point() else {
            continue;
        };
        if !(approx_le(&piece.lo, &x) && approx_le(&x, &piece.hi)) {
            continue;
        }
        let mut y = x.clone();
        let mut orbit = Vec::with_capacity(kappa);
        let mut realized = true;
        for &branch in &piece.itinerary {
            let inside = match branch {
                Branch::Left => approx_le(&T::zero(), &y) && approx_le(&y, c),
                Branch::Right => approx_le(c, &y) && approx_le(&y, &T::one()),
            };
            if !inside {
                realized = false;
                break;
            }
            let next = p.apply_branch(branch, &y);
            orbit.push((y, branch));
            y = next;
        }
        if !realized || !same_point(&y, &x) {
            continue;
        }
        orbit.sort_by(|u, v| u.0.partial_cmp(&v.0).expect("finite points"));
        // minimal period must be κ itself
        if orbit
            .windows(2)
            .any(|w| same_point(&w[0].0, &w[1].0) && w[0].1 == w[1].1)
        {
            continue;
        }
        let known = orbits.iter().any(|o| {
            o.iter()
                .zip(&orbit)
                .all(|(u, v)| same_point(&u.0, &v.0) && u.1 == v.1)
        });
        if !known {
            orbits.push(orbit);
        }
    }
    orbits
}

fn boundary_image<T: Scalar>(p: &MapParams<T>, start: SidedPoint<T>, kappa: usize) -> Result<T> {
    let trace = p.iterate(start, kappa, CriticalPolicy::Stop)?;
    if let Some(index) = trace.critical_hit {
        return Err(Error::CriticalHit { index });
    }
    Ok(trace.last().x.clone())
}

fn check_close<T: Scalar>(what: &str, got: &T, want: &T) -> Result<()> {
    let ok = if T::EXACT {
        got == want
    } else {
        (got.to_f64_lossy() - want.to_f64_lossy()).abs() <= CROSS_CHECK_TOL
    };
    if ok {
        Ok(())
    } else {
        Err(Error::VerificationFailed(format!(
            "{what}: {got} differs from closed form {want}"
        )))
    }
}

/// `P_L = (abc + bc − b)/(ab − 1)` and `P_R = (abc + ac − 1)/(ab − 1)`.
pub fn two_periodic_closed_form<T: Scalar>(p: &MapParams<T>) -> (T, T) {
    let (a, b, c) = (p.a().clone(), p.b().clone(), p.c().clone());
    let ab = a.clone() * b.clone();
    let abc = ab.clone() * c.clone();
    let den = ab - T::one();
    let pl = (abc.clone() + b.clone() * c.clone() - b) / den.clone();
    let pr = (abc + a * c - T::one()) / den;
    (pl, pr)
}

/// The unique `κ`-periodic orbit with `P_L`, `P_R`, `A`, `B` and (for `κ = 2`) `M`.
pub fn periodic_orbit<T: Scalar>(p: &MapParams<T>, kappa: usize) -> Result<PeriodicStructure<T>> {
    if kappa == 0 {
        return Err(Error::InvalidParams("period must be positive".into()));
    }
    if kappa == 1 {
        let x = has_fixed_point(p).ok_or(Error::NoneFound { kappa })?;
        return Ok(PeriodicStructure {
            kappa,
            orbit: vec![x],
            p_left: None,
            p_right: None,
            a_image: None,
            b_image: None,
            m_ratio: None,
        });
    }
    let mut orbits = periodic_candidates(p, kappa);
    match orbits.len() {
        0 => return Err(Error::NoneFound { kappa }),
        1 => {}
        count => return Err(Error::UniquenessViolated { kappa, count }),
    }
    let tagged = orbits.pop().expect("one orbit");
    let c = p.c();
    let p_left = tagged
        .iter()
        .filter(|(_, br)| *br == Branch::Left)
        .map(|(x, _)| x)
        .last()
        .cloned();
    let p_right = tagged
        .iter()
        .find(|(_, br)| *br == Branch::Right)
        .map(|(x, _)| x.clone());
    let orbit: Vec<T> = tagged.into_iter().map(|(x, _)| x).collect();
    let a_image = boundary_image(p, SidedPoint::right(c.clone()), kappa)?;
    let b_image = boundary_image(p, SidedPoint::left(c.clone()), kappa)?;
    let m_ratio = (kappa == 2).then(|| {
        let (left, right) = (c.clone() - a_image.clone(), b_image.clone() - c.clone());
        if left.is_zero() || right.is_zero() {
            T::zero()
        } else if left <= right {
            left / right
        } else {
            right / left
        }
    });
    if kappa == 2 {
        let (pl, pr) = two_periodic_closed_form(p);
        check_close(
            "P_L",
            p_left.as_ref().ok_or(Error::NoneFound { kappa })?,
            &pl,
        )?;
        check_close(
            "P_R",
            p_right.as_ref().ok_or(Error::NoneFound { kappa })?,
            &pr,
        )?;
        check_close("A", &a_image, &p.f0())?;
        check_close("B", &b_image, &p.f1())?;
    }
    Ok(PeriodicStructure {
        kappa,
        orbit,
        p_left,
        p_right,
        a_image: Some(a_image),
        b_image: Some(b_image),
        m_ratio,
    })
}

/// Equivalent iff `ab > 1 + M` (for `M < 1`) or `ab ≥ 2` (for `M = 1`).
pub fn two_periodic_criterion<T: Scalar>(p: &MapParams<T>, m: &T) -> bool {
    let ab = p.a().clone() * p.b().clone();
    if m.is_one() || (!T::EXACT && approx_eq(m, &T::one())) {
        ab >= T::from_i64(2).expect("small integer")
    } else {
        ab > T::one() + m.clone()
    }
}

/// Whether the acim of an expanding map is equivalent to Lebesgue measure.
pub fn equivalence_check<T: Scalar>(p: &MapParams<T>) -> Result<EquivalenceVerdict<T>> {
    if p.boundary_sum() <= T::one() {
        return Ok(EquivalenceVerdict::NotApplicable {
            reason: "ac + b(1-c) ≤ 1".into(),
        });
    }
    let kappa = match minimal_period(p, DEFAULT_MAX_DEPTH)? {
        Kappa::Finite(k) => k,
        Kappa::InfiniteUpTo(d) => {
            return Ok(EquivalenceVerdict::NotApplicable {
                reason: format!("no minimal period found up to depth {d}"),
            })
        }
    };
    if kappa == 1 {
        return Ok(EquivalenceVerdict::Equivalent {
            reason: EquivalenceReason::FixedPoint,
        });
    }
    let s = periodic_orbit(p, kappa)?;
    let verdict = interval_verdict(&s)?;
    if let Some(m) = &s.m_ratio {
        let expected = two_periodic_criterion(p, m);
        let got = verdict.is_equivalent() == Some(true);
        let ab = (p.a().clone() * p.b().clone()).to_f64_lossy();
        let threshold = 1.0 + m.to_f64_lossy();
        let borderline = !T::EXACT && (ab - threshold).abs() <= CROSS_CHECK_TOL;
        if expected != got && !borderline {
            return Err(Error::VerificationFailed(format!(
                "interval test and ab-versus-1+M criterion disagree (ab = {ab}, M = {})",
                m.to_f64_lossy()
            )));
        }
    }
    Ok(verdict)
}

fn interval_verdict<T: Scalar>(s: &PeriodicStructure<T>) -> Result<EquivalenceVerdict<T>> {
    let missing = || Error::NoneFound { kappa: s.kappa };
    let (pl, pr) = (
        s.p_left.as_ref().ok_or_else(missing)?,
        s.p_right.as_ref().ok_or_else(missing)?,
    );
    let (a, b) = (
        s.a_image.as_ref().ok_or_else(missing)?,
        s.b_image.as_ref().ok_or_else(missing)?,
    );
    let lt = |x: &T, y: &T| !approx_le(y, x);
    if approx_eq(a, pl) && approx_eq(b, pr) {
        return Ok(EquivalenceVerdict::Equivalent {
            reason: EquivalenceReason::ExactMatch,
        });
    }
    if lt(a, pl) || lt(pr, b) {
        return Ok(EquivalenceVerdict::Equivalent {
            reason: EquivalenceReason::IntervalEscape,
        });
    }
    let mut gaps = Vec::new();
    if lt(pl, a) {
        gaps.push((pl.clone(), a.clone()));
    }
    if lt(b, pr) {
        gaps.push((b.clone(), pr.clone()));
    }
    Ok(EquivalenceVerdict::NotEquivalent { gaps })
}

/// Product of branch slopes along an itinerary.
fn itinerary_slope<T: Scalar>(p: &MapParams<T>, branches: &[Branch]) -> T {
    branches
        .iter()
        .fold(T::one(), |acc, br| acc * p.slope(*br).clone())
}

/// Renormalize `f` on `[A, B]` when `[A, B] ⊆ [P_L, P_R]`.
pub fn renormalize<T: Scalar>(p: &MapParams<T>) -> Result<Option<RenormData<T>>> {
    let kappa = match minimal_period(p, DEFAULT_MAX_DEPTH)? {
        Kappa::Finite(1) => return Err(Error::NotRenormalizable { kappa: 1 }),
        Kappa::Finite(k) => k,
        Kappa::InfiniteUpTo(d) => {
            return Err(Error::PreconditionViolation(format!(
                "no minimal period found up to depth {d}"
            )))
        }
    };
    let s = periodic_orbit(p, kappa)?;
    let missing = || Error::NoneFound { kappa };
    let (pl, pr) = (
        s.p_left.clone().ok_or_else(missing)?,
        s.p_right.clone().ok_or_else(missing)?,
    );
    let (a, b) = (
        s.a_image.clone().ok_or_else(missing)?,
        s.b_image.clone().ok_or_else(missing)?,
    );
    if !(approx_le(&pl, &a) && approx_le(&b, &pr)) {
        return Ok(None);
    }
    let c = p.c().clone();
    let left = p.iterate(SidedPoint::left(c.clone()), kappa, CriticalPolicy::Stop)?;
    let right = p.iterate(SidedPoint::right(c.clone()), kappa, CriticalPolicy::Stop)?;
    let left_slope = itinerary_slope(p, &left.branches);
    let right_slope = itinerary_slope(p, &right.branches);
    let c_star = (c - a.clone()) / (b.clone() - a.clone());
    let rescaled = MapParams::new(left_slope.clone(), right_slope.clone(), c_star)?;
    let symmetric = if T::EXACT {
        left_slope == right_slope
    } else {
        let (l, r) = (left_slope.to_f64_lossy(), right_slope.to_f64_lossy());
        (l - r).abs() <= 1e-12 * l.abs().max(r.abs())
    };
    Ok(Some(RenormData {
        interval: vec![a, b],
        kappa,
        ell: kappa,
        r: kappa,
        left_slope,
        right_slope,
        rescaled,
        symmetric,
    }))
}
