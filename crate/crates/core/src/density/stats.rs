//! Summary statistics of step densities.

use serde::Serialize;

use crate::density::step::StepDensity;
use crate::scalar::{max_of, min_of, serialize_scalar, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct DensityStats<T: Scalar> {
    #[serde(serialize_with = "serialize_scalar")]
    pub integral: T,
    /// Sum of the jumps between adjacent pieces.
    #[serde(serialize_with = "serialize_scalar")]
    pub total_variation: T,
    #[serde(serialize_with = "serialize_scalar")]
    pub min: T,
    #[serde(serialize_with = "serialize_scalar")]
    pub max: T,
    /// Lebesgue measure of `{h > 0}`.
    #[serde(serialize_with = "serialize_scalar")]
    pub support_measure: T,
}

pub fn density_stats<T: Scalar>(h: &StepDensity<T>) -> DensityStats<T> {
    let values = h.values();
    let total_variation = values.windows(2).fold(T::zero(), |acc, w| {
        acc + (w[1].clone() - w[0].clone()).abs()
    });
    let min = values
        .iter()
        .skip(1)
        .fold(values[0].clone(), |m, v| min_of(&m, v));
    let max = values
        .iter()
        .skip(1)
        .fold(values[0].clone(), |m, v| max_of(&m, v));
    let support_measure = h
        .pieces()
        .filter(|(_, _, v)| !v.is_zero())
        .fold(T::zero(), |acc, (lo, hi, _)| acc + hi.clone() - lo.clone());
    DensityStats {
        integral: h.integral(),
        total_variation,
        min,
        max,
        support_measure,
    }
}
