//! Piecewise-constant densities on `[0, 1]`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{serialize_scalars, Scalar};

/// Default limit on the number of breakpoints of a step density.
pub const DEFAULT_BUDGET: usize = 100_000;
/// Floating-point breakpoints closer than this are merged.
pub const MERGE_GAP: f64 = 1e-14;

/// `values[i]` on `[breakpoints[i], breakpoints[i+1])`, the last piece closed.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct StepDensity<T: Scalar> {
    #[serde(serialize_with = "serialize_scalars")]
    breakpoints: Vec<T>,
    #[serde(serialize_with = "serialize_scalars")]
    values: Vec<T>,
}

impl<T: Scalar> StepDensity<T> {
    /// Validate breakpoints `0 = t₀ < … < t_k = 1` and `k` nonnegative values.
    pub fn new(breakpoints: Vec<T>, values: Vec<T>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidDensity(msg));
        if values.is_empty() || breakpoints.len() != values.len() + 1 {
            return bad(format!(
                "{} breakpoints for {} values",
                breakpoints.len(),
                values.len()
            ));
        }
        if !breakpoints[0].is_zero() || !breakpoints[breakpoints.len() - 1].is_one() {
            return bad("breakpoints must start at 0 and end at 1".into());
        }
        if let Some(w) = breakpoints.windows(2).find(|w| w[0] >= w[1]) {
            return bad(format!("breakpoints not increasing at {} ≥ {}", w[0], w[1]));
        }
        if let Some(v) = values
            .iter()
            .find(|v| v.is_negative() || !v.to_f64_lossy().is_finite())
        {
            return bad(format!("value {v} is negative or not finite"));
        }
        Ok(Self {
            breakpoints,
            values,
        })
    }

    /// `v` on the whole interval.
    pub fn constant(v: T) -> Self {
        Self {
            breakpoints: vec![T::zero(), T::one()],
            values: vec![v],
        }
    }

    /// `N` equal cells with the given values.
    pub fn uniform_cells(values: Vec<T>) -> Result<Self> {
        let n = values.len() as i64;
        let breakpoints = (0..=n).map(|i| T::from_ratio(i, n)).collect();
        Self::new(breakpoints, values)
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(lo, hi, value)` for every piece.
    pub fn pieces(&self) -> impl Iterator<Item = (&T, &T, &T)> {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, v)| (&w[0], &w[1], v))
    }

    pub fn integral(&self) -> T {
        self.pieces().fold(T::zero(), |acc, (lo, hi, v)| {
            acc + v.clone() * (hi.clone() - lo.clone())
        })
    }

    /// Value at `x`, using the half-open piece convention.
    pub fn eval(&self, x: &T) -> T {
        let i = self.breakpoints.partition_point(|t| t <= x);
        let i = i.clamp(1, self.values.len());
        self.values[i - 1].clone()
    }

    pub fn scale(&self, k: &T) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v.clone() * k.clone()).collect(),
        }
    }

    /// Rescale to integral one.
    pub fn normalized(&self) -> Result<Self> {
        let total = self.integral();
        if !total.is_positive() {
            return Err(Error::InvalidDensity("integral is not positive".into()));
        }
        Ok(self.scale(&(T::one() / total)))
    }

    /// Sum of two densities on the common refinement.
    pub fn add(&self, other: &Self) -> Self {
        let mut builder = SumBuilder::new();
        for (lo, hi, v) in self.pieces().chain(other.pieces()) {
            builder.add(lo.clone(), hi.clone(), v.clone());
        }
        builder.finish().expect("sum of densities is a density")
    }

    /// Merge adjacent pieces with equal values.
    pub fn simplify(&self) -> Self {
        let mut breakpoints = vec![self.breakpoints[0].clone()];
        let mut values: Vec<T> = Vec::with_capacity(self.values.len());
        for (_, hi, v) in self.pieces() {
            if values.last().is_some_and(|last| values_equal(last, v)) {
                *breakpoints.last_mut().expect("nonempty") = hi.clone();
            } else {
                values.push(v.clone());
                breakpoints.push(hi.clone());
            }
        }
        Self {
            breakpoints,
            values,
        }
    }

    /// Enforce a breakpoint budget: pieces shorter than `1e-14` are absorbed
    /// into a neighbour (mass preserving); if that is not enough, fail.
    pub fn coarsen(self, budget: usize) -> Result<Self> {
        if self.breakpoints.len() <= budget {
            return Ok(self);
        }
        let gap = T::from_f64(MERGE_GAP).expect("representable");
        let mut breakpoints = vec![self.breakpoints[0].clone()];
        let mut values: Vec<T> = Vec::new();
        for (lo, hi, v) in self.pieces() {
            let len = hi.clone() - lo.clone();
            match values.last_mut() {
                Some(last) if len < gap => {
                    // spread the short piece's mass over the previous one
                    let n = breakpoints.len();
                    let prev_len = breakpoints[n - 1].clone() - breakpoints[n - 2].clone();
                    *last = (last.clone() * prev_len.clone() + v.clone() * len.clone())
                        / (prev_len + len);
                    breakpoints[n - 1] = hi.clone();
                }
                _ => {
                    values.push(v.clone());
                    breakpoints.push(hi.clone());
                }
            }
        }
        let out = Self {
            breakpoints,
            values,
        }
        .simplify();
        if out.breakpoints.len() > budget {
            return Err(Error::BreakpointBudgetExceeded {
                count: out.breakpoints.len(),
                budget,
            });
        }
        Ok(out)
    }

    pub fn to_f64(&self) -> StepDensity<f64> {
        StepDensity {
            breakpoints: self.breakpoints.iter().map(|t| t.to_f64_lossy()).collect(),
            values: self.values.iter().map(|v| v.to_f64_lossy()).collect(),
        }
    }

    /// `∫|g − h|`, evaluated in `f64`.
    pub fn l1_distance(&self, other: &Self) -> f64 {
        let mut builder = SumBuilder::<f64>::new();
        for (lo, hi, v) in self.pieces() {
            builder.add(lo.to_f64_lossy(), hi.to_f64_lossy(), v.to_f64_lossy());
        }
        for (lo, hi, v) in other.pieces() {
            builder.add(lo.to_f64_lossy(), hi.to_f64_lossy(), -v.to_f64_lossy());
        }
        builder
            .signed_pieces()
            .iter()
            .map(|(lo, hi, v)| v.abs() * (hi - lo))
            .sum()
    }
}

fn values_equal<T: Scalar>(x: &T, y: &T) -> bool {
    if T::EXACT {
        x == y
    } else {
        let (x, y) = (x.to_f64_lossy(), y.to_f64_lossy());
        (x - y).abs() <= 1e-15 * x.abs().max(y.abs()).max(1.0)
    }
}

/// Accumulates weighted indicator functions of intervals of `[0, 1]`.
pub struct SumBuilder<T> {
    items: Vec<(T, T, T)>,
}

impl<T: Scalar> Default for SumBuilder<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> SumBuilder<T> {
    pub fn new() -> Self {
        Self { items: Vec::new() }
    }

    /// Add `v·1_[lo, hi)`; empty intervals are ignored.
    pub fn add(&mut self, lo: T, hi: T, v: T) {
        if lo < hi && !v.is_zero() {
            self.items.push((lo, hi, v));
        }
    }

    /// Pieces of the sum over `[0, 1]` with possibly negative values.
    pub fn signed_pieces(&self) -> Vec<(T, T, T)> {
        let mut points: Vec<T> = Vec::with_capacity(2 * self.items.len() + 2);
        points.push(T::zero());
        points.push(T::one());
        for (lo, hi, _) in &self.items {
            points.push(lo.clone());
            points.push(hi.clone());
        }
        points.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
        points.dedup();
        if !T::EXACT {
            let gap = MERGE_GAP;
            let mut merged: Vec<T> = Vec::with_capacity(points.len());
            for t in points {
                match merged.last() {
                    Some(last) if (t.to_f64_lossy() - last.to_f64_lossy()) < gap => {
                        // keep 0 and 1 as the outer breakpoints
                        if t.is_one() {
                            *merged.last_mut().expect("nonempty") = t;
                        }
                    }
                    _ => merged.push(t),
                }
            }
            points = merged;
        }
        let index = |x: &T| {
            let i = points.partition_point(|t| t < x);
            if T::EXACT || i == points.len() {
                return i.min(points.len() - 1);
            }
            // snap to the nearest merged breakpoint
            if i > 0 && (x.to_f64_lossy() - points[i - 1].to_f64_lossy()) < MERGE_GAP {
                i - 1
            } else {
                i
            }
        };
        let mut diff: Vec<T> = vec![T::zero(); points.len()];
        for (lo, hi, v) in &self.items {
            let (i, j) = (index(lo), index(hi));
            diff[i] = diff[i].clone() + v.clone();
            diff[j] = diff[j].clone() - v.clone();
        }
        let mut out = Vec::with_capacity(points.len() - 1);
        let mut acc = T::zero();
        for k in 0..points.len() - 1 {
            acc = acc + diff[k].clone();
            out.push((points[k].clone(), points[k + 1].clone(), acc.clone()));
        }
        out
    }

    /// The sum as a step density. Floating-point rounding residue below
    /// `1e-13` relative to the largest weight is treated as zero; other
    /// negative values are an error.
    pub fn finish(self) -> Result<StepDensity<T>> {
        let scale = self
            .items
            .iter()
            .map(|(_, _, v)| v.to_f64_lossy().abs())
            .fold(0.0, f64::max);
        let pieces = self.signed_pieces();
        let mut breakpoints = Vec::with_capacity(pieces.len() + 1);
        let mut values = Vec::with_capacity(pieces.len());
        breakpoints.push(T::zero());
        for (_, hi, v) in pieces {
            let v = if !T::EXACT && v.to_f64_lossy().abs() <= 1e-13 * scale {
                T::zero()
            } else {
                v
            };
            if v.is_negative() {
                return Err(Error::InvalidDensity(format!("negative value {v}")));
            }
            values.push(v);
            breakpoints.push(hi);
        }
        Ok(StepDensity {
            breakpoints,
            values,
        }
        .simplify())
    }
}
