//! Piecewise linear Lorenz maps
//!
//! ```text
//!            ⎧ a·x + 1 − a·c   x ∈ [0, c)
//! f(x)   =   ⎨
//!            ⎩ b·(x − c)       x ∈ (c, 1]
//! ```
//!
//! with `a, b > 0`, `0 < c < 1`, `a·c ≤ 1` and `b·(1 − c) ≤ 1`. The critical
//! point is two-valued: `f(c⁻) = 1` and `f(c⁺) = 0`, so evaluation at `c`
//! needs an explicit [`Side`].

use serde::{Deserialize, Serialize};

use crate::affine::Affine;
use crate::error::{Error, Result};
use crate::scalar::{approx_le, serialize_scalar, Rational, Scalar};

/// Which one-sided limit a point stands for. Only meaningful at `x = c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plain,
    Left,
    Right,
}

impl Side {
    pub fn label(self) -> &'static str {
        match self {
            Side::Plain => "plain",
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// A point of `[0, 1]`, with a side tag for the two copies `c⁻`, `c⁺` of the critical point.
#[derive(Clone, Debug, PartialEq)]
pub struct SidedPoint<T> {
    pub x: T,
    pub side: Side,
}

impl<T> SidedPoint<T> {
    pub fn plain(x: T) -> Self {
        Self {
            x,
            side: Side::Plain,
        }
    }

    pub fn left(x: T) -> Self {
        Self {
            x,
            side: Side::Left,
        }
    }

    pub fn right(x: T) -> Self {
        Self {
            x,
            side: Side::Right,
        }
    }
}

/// The two affine branches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "R")]
    Right,
}

/// What [`MapParams::iterate`] does when an orbit lands exactly on `c`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CriticalPolicy {
    /// End the trace at the critical point.
    #[default]
    Stop,
    /// Continue through `c⁻` (next point is 1).
    ContinueLeft,
    /// Continue through `c⁺` (next point is 0).
    ContinueRight,
}

/// Validated parameters `(a, b, c)` of `f_{a,b,c}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct MapParams<T: Scalar> {
    #[serde(serialize_with = "serialize_scalar")]
    a: T,
    #[serde(serialize_with = "serialize_scalar")]
    b: T,
    #[serde(serialize_with = "serialize_scalar")]
    c: T,
    exact: bool,
}

impl<T: Scalar> MapParams<T> {
    /// Validate `(a, b, c)`. Floating-point input is allowed `1e-12` of slack on
    /// the two range inequalities.
    pub fn new(a: T, b: T, c: T) -> Result<Self> {
        let violation = |constraint: &'static str, detail: String| {
            Err(Error::ConstraintViolation { constraint, detail })
        };
        for (name, v) in [("a", &a), ("b", &b), ("c", &c)] {
            if !v.to_f64_lossy().is_finite() {
                return violation("finite parameters", format!("{name} = {v}"));
            }
        }
        if a <= T::zero() {
            return violation("a > 0", format!("a = {a}"));
        }
        if b <= T::zero() {
            return violation("b > 0", format!("b = {b}"));
        }
        if c <= T::zero() || c >= T::one() {
            return violation("0 < c < 1", format!("c = {c}"));
        }
        let ac = a.clone() * c.clone();
        if !approx_le(&ac, &T::one()) {
            return violation("ac ≤ 1", format!("ac = {ac}"));
        }
        let b1c = b.clone() * (T::one() - c.clone());
        if !approx_le(&b1c, &T::one()) {
            return violation("b(1−c) ≤ 1", format!("b(1−c) = {b1c}"));
        }
        Ok(Self {
            a,
            b,
            c,
            exact: T::EXACT,
        })
    }

    /// `S_{β,α} = f_{β,α,1/β}`.
    pub fn lorenz_beta(beta: T, alpha: T) -> Result<Self> {
        let c = T::one() / beta.clone();
        Self::new(beta, alpha, c)
    }

    pub fn a(&self) -> &T {
        &self.a
    }

    pub fn b(&self) -> &T {
        &self.b
    }

    pub fn c(&self) -> &T {
        &self.c
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// `f(0) = 1 − a·c`.
    pub fn f0(&self) -> T {
        T::one() - self.a.clone() * self.c.clone()
    }

    /// `f(1) = b·(1 − c)`.
    pub fn f1(&self) -> T {
        self.b.clone() * (T::one() - self.c.clone())
    }

    /// `a·c + b·(1 − c)`; compare with 1 to decide existence of an acim.
    pub fn boundary_sum(&self) -> T {
        self.a.clone() * self.c.clone() + self.f1()
    }

    pub fn slope(&self, branch: Branch) -> &T {
        match branch {
            Branch::Left => &self.a,
            Branch::Right => &self.b,
        }
    }

    /// The affine formula of a branch, valid on its whole domain.
    pub fn branch_map(&self, branch: Branch) -> Affine<T> {
        match branch {
            Branch::Left => Affine::new(self.a.clone(), self.f0()),
            Branch::Right => Affine::new(self.b.clone(), -(self.b.clone() * self.c.clone())),
        }
    }

    /// Branch responsible for `x`; `c` needs a side.
    pub fn branch_of(&self, x: &SidedPoint<T>) -> Result<Branch> {
        if x.x < self.c {
            Ok(Branch::Left)
        } else if x.x > self.c {
            Ok(Branch::Right)
        } else {
            match x.side {
                Side::Left => Ok(Branch::Left),
                Side::Right => Ok(Branch::Right),
                Side::Plain => Err(Error::AmbiguousCritical),
            }
        }
    }

    pub fn apply_branch(&self, branch: Branch, x: &T) -> T {
        match branch {
            Branch::Left => self.a.clone() * x.clone() + self.f0(),
            Branch::Right => self.b.clone() * (x.clone() - self.c.clone()),
        }
    }

    fn check_unit(&self, x: &T) -> Result<()> {
        if approx_le(&T::zero(), x) && approx_le(x, &T::one()) {
            Ok(())
        } else {
            Err(Error::ConstraintViolation {
                constraint: "0 ≤ x ≤ 1",
                detail: format!("x = {x}"),
            })
        }
    }

    /// `f(x)`, with `f(c⁻) = 1` and `f(c⁺) = 0`.
    pub fn eval(&self, x: &SidedPoint<T>) -> Result<T> {
        self.check_unit(&x.x)?;
        let branch = self.branch_of(x)?;
        Ok(self.apply_branch(branch, &x.x))
    }

    /// Convenience for points known to differ from `c`.
    pub fn eval_plain(&self, x: &T) -> Result<T> {
        self.eval(&SidedPoint::plain(x.clone()))
    }

    /// Forward orbit of length `n + 1` with visit counts and log-derivative sums.
    pub fn iterate(
        &self,
        x: SidedPoint<T>,
        n: usize,
        policy: CriticalPolicy,
    ) -> Result<OrbitTrace<T>> {
        self.check_unit(&x.x)?;
        let (log_a, log_b) = (self.a.ln(), self.b.ln());
        let mut trace = OrbitTrace {
            points: Vec::with_capacity(n + 1),
            branches: Vec::with_capacity(n),
            visit_counts: Vec::with_capacity(n + 1),
            log_deriv: Vec::with_capacity(n + 1),
            critical_hit: None,
        };
        trace.points.push(x);
        trace.visit_counts.push(0);
        trace.log_deriv.push(0.0);
        for k in 0..n {
            let current = trace.points.last_mut().expect("trace is never empty");
            if current.x == self.c && current.side == Side::Plain {
                trace.critical_hit.get_or_insert(k);
                current.side = match policy {
                    CriticalPolicy::Stop => break,
                    CriticalPolicy::ContinueLeft => Side::Left,
                    CriticalPolicy::ContinueRight => Side::Right,
                };
            }
            let branch = self.branch_of(current)?;
            let next = self.apply_branch(branch, &current.x);
            let (m, ld) = (trace.visit_counts[k], trace.log_deriv[k]);
            match branch {
                Branch::Left => {
                    trace.visit_counts.push(m);
                    trace.log_deriv.push(ld + log_a);
                }
                Branch::Right => {
                    trace.visit_counts.push(m + 1);
                    trace.log_deriv.push(ld + log_b);
                }
            }
            trace.branches.push(branch);
            trace.points.push(SidedPoint::plain(next));
        }
        Ok(trace)
    }

    /// Representative of a real number for lift iteration: points of the
    /// closed unit interval are kept as they are, other reals are reduced to
    /// `k + y` with `y ∈ (0, 1]`.
    pub fn lift_point(&self, x: &T) -> LiftPoint<T> {
        if &T::zero() <= x && x <= &T::one() {
            return LiftPoint {
                turns: 0,
                pos: x.clone(),
            };
        }
        // k = ceil(x) - 1
        let k = -((-x.clone()).floor_val()) - T::one();
        LiftPoint {
            turns: k.to_i64().expect("lift argument out of i64 range"),
            pos: x.clone() - k,
        }
    }

    /// One application of the degree-one lift `F`, normalized by `F(0) = f(0)`:
    /// `F(k + y) = k + f(y) + 1_{(c,1]}(y)`. At `y = c` the lift is continuous
    /// (`F(c) = 1`), and the representative continues through `c⁻`.
    pub fn lift_step(&self, p: &LiftPoint<T>) -> LiftPoint<T> {
        if p.pos == self.c {
            return LiftPoint {
                turns: p.turns,
                pos: T::one(),
            };
        }
        if p.pos > self.c {
            LiftPoint {
                turns: p.turns + 1,
                pos: self.apply_branch(Branch::Right, &p.pos),
            }
        } else {
            LiftPoint {
                turns: p.turns,
                pos: self.apply_branch(Branch::Left, &p.pos),
            }
        }
    }

    /// `F(x)` for real `x`.
    pub fn lift_eval(&self, x: &T) -> T {
        self.lift_step(&self.lift_point(x)).value()
    }

    /// `Fⁿ(x)`, kept as integer part plus representative so that large
    /// iteration counts lose no precision.
    pub fn lift_iterate(&self, x: &T, n: usize) -> LiftPoint<T> {
        let mut p = self.lift_point(x);
        for _ in 0..n {
            p = self.lift_step(&p);
        }
        p
    }

    /// All `x` with `f(x) = y`; at most one per branch. `c⁻` is returned for
    /// `y = 1` and `c⁺` for `y = 0`.
    pub fn preimages(&self, y: &T) -> Vec<SidedPoint<T>> {
        let mut out = Vec::with_capacity(2);
        if y < &T::zero() || y > &T::one() {
            return out;
        }
        if y.is_one() {
            out.push(SidedPoint::left(self.c.clone()));
        } else {
            let x = (y.clone() - self.f0()) / self.a.clone();
            if let Some(x) = snap_to_domain(x, &T::zero(), &self.c) {
                out.push(SidedPoint::plain(x));
            }
        }
        if y.is_zero() {
            out.push(SidedPoint::right(self.c.clone()));
        } else {
            let x = y.clone() / self.b.clone() + self.c.clone();
            if x > self.c {
                if let Some(x) = snap_to_domain(x, &self.c, &T::one()) {
                    out.push(SidedPoint::plain(x));
                }
            }
        }
        out
    }

    pub fn to_f64(&self) -> MapParams<f64> {
        MapParams {
            a: self.a.to_f64_lossy(),
            b: self.b.to_f64_lossy(),
            c: self.c.to_f64_lossy(),
            exact: false,
        }
    }
}

/// Accepts `lo ≤ x < hi` for the left domain or `lo < x ≤ hi` for the right
/// one, snapping floating-point values within slack of the outer end.
fn snap_to_domain<T: Scalar>(x: T, lo: &T, hi: &T) -> Option<T> {
    let is_left = lo.is_zero();
    if is_left {
        if &x < lo {
            return approx_le(lo, &x).then(|| lo.clone());
        }
        (&x < hi).then_some(x)
    } else {
        if &x > hi {
            return approx_le(&x, hi).then(|| hi.clone());
        }
        (&x > lo).then_some(x)
    }
}

/// Orbit of a point together with the bookkeeping needed by rotation and
/// Lyapunov estimates.
#[derive(Clone, Debug)]
pub struct OrbitTrace<T> {
    /// `x_0, …, x_k`; shorter than requested if the orbit stopped at `c`.
    pub points: Vec<SidedPoint<T>>,
    /// Branch used at each step.
    pub branches: Vec<Branch>,
    /// `m_k = #{0 ≤ i < k : x_i ∈ (c, 1]}`.
    pub visit_counts: Vec<usize>,
    /// `Σ_{i<k} log f'(x_i)`.
    pub log_deriv: Vec<f64>,
    /// First index at which a plain point equal to `c` was met.
    pub critical_hit: Option<usize>,
}

impl<T: Clone> OrbitTrace<T> {
    /// Number of completed steps.
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    pub fn last(&self) -> &SidedPoint<T> {
        self.points.last().expect("trace is never empty")
    }

    pub fn visits(&self) -> usize {
        *self.visit_counts.last().expect("trace is never empty")
    }

    pub fn total_log_deriv(&self) -> f64 {
        *self.log_deriv.last().expect("trace is never empty")
    }
}

/// A real number `turns + pos` with `pos ∈ [0, 1]`, as produced by lift iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftPoint<T> {
    pub turns: i64,
    pub pos: T,
}

impl<T: Scalar> LiftPoint<T> {
    pub fn value(&self) -> T {
        T::from_i64(self.turns).expect("i64 fits every backend") + self.pos.clone()
    }
}

/// Map parameters in whichever backend the input called for.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyMap {
    Exact(MapParams<Rational>),
    Float(MapParams<f64>),
}

/// Run a generic expression against either backend of an [`AnyMap`].
#[macro_export]
macro_rules! with_map {
    ($any:expr, $p:ident => $body:expr) => {
        match $any {
            $crate::AnyMap::Exact($p) => $body,
            $crate::AnyMap::Float($p) => $body,
        }
    };
}

impl AnyMap {
    /// Parse three parameter strings. The exact backend is used when `exact`
    /// is set or any parameter is written as a fraction `p/q`.
    pub fn parse(a: &str, b: &str, c: &str, exact: bool) -> Result<Self> {
        let exact = exact || [a, b, c].iter().any(|s| s.contains('/'));
        if exact {
            Ok(AnyMap::Exact(MapParams::new(
                Rational::parse_str(a)?,
                Rational::parse_str(b)?,
                Rational::parse_str(c)?,
            )?))
        } else {
            Ok(AnyMap::Float(MapParams::new(
                f64::parse_str(a)?,
                f64::parse_str(b)?,
                f64::parse_str(c)?,
            )?))
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, AnyMap::Exact(_))
    }

    pub fn to_f64(&self) -> MapParams<f64> {
        with_map!(self, p => p.to_f64())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(with_map!(self, p => serde_json::to_string(p))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RawParams = serde_json::from_str(s)?;
        let text = |v: &serde_json::Value| -> Result<String> {
            match v {
                serde_json::Value::String(s) => Ok(s.clone()),
                serde_json::Value::Number(n) => Ok(n.to_string()),
                other => Err(Error::Parse(format!(
                    "expected string or number, got {other}"
                ))),
            }
        };
        let (a, b, c) = (text(&raw.a)?, text(&raw.b)?, text(&raw.c)?);
        if raw.exact {
            Ok(AnyMap::Exact(MapParams::new(
                Rational::parse_str(&a)?,
                Rational::parse_str(&b)?,
                Rational::parse_str(&c)?,
            )?))
        } else {
            Ok(AnyMap::Float(MapParams::new(
                f64::parse_str(&a)?,
                f64::parse_str(&b)?,
                f64::parse_str(&c)?,
            )?))
        }
    }
}

#[derive(Deserialize)]
struct RawParams {
    a: serde_json::Value,
    b: serde_json::Value,
    c: serde_json::Value,
    #[serde(default)]
    exact: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn exact(a: Rational, b: Rational, c: Rational) -> MapParams<Rational> {
        MapParams::new(a, b, c).unwrap()
    }

    #[test]
    fn validation_accepts_range_equalities() {
        let p = exact(q(2, 1), q(2, 1), q(1, 2));
        assert_eq!(p.f0(), q(0, 1));
        assert_eq!(p.f1(), q(1, 1));
        let p = exact(q(4, 1), q(1, 2), q(1, 7));
        assert_eq!(p.f0(), q(3, 7));
        assert_eq!(p.f1(), q(3, 7));
    }

    #[test]
    fn validation_names_the_violated_inequality() {
        let err = MapParams::new(3.0, 1.0, 0.5).unwrap_err();
        match err {
            Error::ConstraintViolation { constraint, .. } => assert_eq!(constraint, "ac ≤ 1"),
            other => panic!("unexpected {other:?}"),
        }
        for (a, b, c, name) in [
            (0.0, 1.0, 0.5, "a > 0"),
            (1.0, -1.0, 0.5, "b > 0"),
            (1.0, 1.0, 1.0, "0 < c < 1"),
            (1.0, 3.0, 0.5, "b(1−c) ≤ 1"),
        ] {
            match MapParams::new(a, b, c) {
                Err(Error::ConstraintViolation { constraint, .. }) => assert_eq!(constraint, name),
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn eval_branches_and_critical_limits() {
        let p = MapParams::new(2.0, 2.0, 0.5).unwrap();
        assert_eq!(p.eval_plain(&0.25).unwrap(), 0.5);
        assert_eq!(p.eval(&SidedPoint::left(0.5)).unwrap(), 1.0);
        assert_eq!(p.eval(&SidedPoint::right(0.5)).unwrap(), 0.0);
        assert!(matches!(p.eval_plain(&0.5), Err(Error::AmbiguousCritical)));
        assert!(p.eval_plain(&1.5).is_err());

        let p = exact(q(4, 1), q(1, 2), q(1, 7));
        assert_eq!(p.eval_plain(&q(1, 1)).unwrap(), q(3, 7));
    }

    #[test]
    fn iterate_counts_right_branch_visits() {
        let p = exact(q(2, 1), q(2, 1), q(1, 2));
        let t = p
            .iterate(SidedPoint::plain(q(1, 3)), 2, CriticalPolicy::Stop)
            .unwrap();
        let xs: Vec<_> = t.points.iter().map(|s| s.x.clone()).collect();
        assert_eq!(xs, vec![q(1, 3), q(2, 3), q(1, 3)]);
        assert_eq!(t.visit_counts, vec![0, 0, 1]);

        let t = p
            .iterate(SidedPoint::plain(q(1, 3)), 0, CriticalPolicy::Stop)
            .unwrap();
        assert_eq!(t.points.len(), 1);
        assert_eq!(t.visit_counts, vec![0]);
    }

    #[test]
    fn iterate_returns_after_three_steps_for_period_three_map() {
        let p = exact(q(4, 1), q(1, 2), q(1, 7));
        let t = p
            .iterate(SidedPoint::plain(q(1, 20)), 3, CriticalPolicy::Stop)
            .unwrap();
        assert_eq!(t.last().x, q(1, 20));
        assert_eq!(t.critical_hit, None);
    }

    #[test]
    fn critical_hits_follow_policy() {
        // 1/4 -> 1/2 = c under the doubling map
        let p = exact(q(2, 1), q(2, 1), q(1, 2));
        let start = || SidedPoint::plain(q(1, 4));
        let stop = p.iterate(start(), 5, CriticalPolicy::Stop).unwrap();
        assert_eq!(stop.critical_hit, Some(1));
        assert_eq!(stop.steps(), 1);
        let left = p.iterate(start(), 3, CriticalPolicy::ContinueLeft).unwrap();
        assert_eq!(left.points[2].x, q(1, 1));
        assert_eq!(left.points[1].side, Side::Left);
        let right = p
            .iterate(start(), 3, CriticalPolicy::ContinueRight)
            .unwrap();
        assert_eq!(right.points[2].x, q(0, 1));
        assert_eq!(right.visit_counts, vec![0, 0, 1, 1]);
    }

    #[test]
    fn lift_examples() {
        let p = MapParams::new(2.0, 2.0, 0.5).unwrap();
        assert_eq!(p.lift_eval(&0.75), 1.5);
        assert_eq!(p.lift_eval(&0.0), p.f0());
        assert_eq!(p.lift_eval(&1.75), 2.5);
        assert_eq!(p.lift_eval(&-0.25), 0.5);
        let pe = exact(q(2, 1), q(2, 1), q(1, 2));
        assert_eq!(pe.lift_iterate(&q(1, 3), 2).value(), q(4, 3));
        // fixed endpoint 1 turns once per step
        assert_eq!(pe.lift_iterate(&q(1, 1), 5).value(), q(6, 1));
    }

    #[test]
    fn preimage_examples() {
        let p = exact(q(2, 1), q(2, 1), q(1, 2));
        let pre = p.preimages(&q(1, 2));
        assert_eq!(
            pre,
            vec![SidedPoint::plain(q(1, 4)), SidedPoint::plain(q(3, 4))]
        );
        let pre = p.preimages(&q(0, 1));
        assert_eq!(
            pre,
            vec![SidedPoint::plain(q(0, 1)), SidedPoint::right(q(1, 2))]
        );

        let p = MapParams::new(1.15, 1.15, 0.3).unwrap();
        let pre = p.preimages(&0.3);
        assert_eq!(pre.len(), 1);
        assert!((pre[0].x - 0.560_869_565_217_391_3).abs() < 1e-12);
        assert!((p.eval(&pre[0]).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let m = AnyMap::parse("4", "1/2", "1/7", false).unwrap();
        assert!(m.is_exact());
        let s = m.to_json().unwrap();
        assert_eq!(s, r#"{"a":"4","b":"1/2","c":"1/7","exact":true}"#);
        assert_eq!(AnyMap::from_json(&s).unwrap(), m);

        let f = AnyMap::from_json(r#"{"a": 1.5, "b": "1.5", "c": 0.5, "exact": false}"#).unwrap();
        assert_eq!(f, AnyMap::Float(MapParams::new(1.5, 1.5, 0.5).unwrap()));
        let e = AnyMap::from_json(r#"{"a": 1.2, "b": 1.2, "c": 0.5, "exact": true}"#).unwrap();
        assert_eq!(e, AnyMap::Exact(exact(q(6, 5), q(6, 5), q(1, 2))));
    }
}
