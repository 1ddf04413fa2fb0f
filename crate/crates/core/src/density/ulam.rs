//! Ulam discretization of the transfer operator on `N` equal cells.

use rayon::prelude::*;

use crate::density::step::StepDensity;
use crate::error::{Error, Result};
use crate::map::{Branch, MapParams};
use crate::scalar::{max_of, min_of, Scalar};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Row-stochastic matrix with entries `m(cellᵢ ∩ f⁻¹(cellⱼ)) / m(cellᵢ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct UlamOperator<T> {
    n: usize,
    rows: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> UlamOperator<T> {
    pub fn cells(&self) -> usize {
        self.n
    }

    /// Nonzero entries of row `i`, by increasing column.
    pub fn row(&self, i: usize) -> &[(usize, T)] {
        &self.rows[i]
    }

    pub fn row_sum(&self, i: usize) -> T {
        self.rows[i]
            .iter()
            .fold(T::zero(), |acc, (_, w)| acc + w.clone())
    }

    /// Number of maximal runs of consecutive columns in row `i`.
    pub fn row_blocks(&self, i: usize) -> usize {
        let cols: Vec<usize> = self.rows[i].iter().map(|(j, _)| *j).collect();
        if cols.is_empty() {
            return 0;
        }
        1 + cols.windows(2).filter(|w| w[1] != w[0] + 1).count()
    }

    pub fn entry(&self, i: usize, j: usize) -> T {
        self.rows[i]
            .iter()
            .find(|(col, _)| *col == j)
            .map(|(_, w)| w.clone())
            .unwrap_or_else(T::zero)
    }

    /// Coordinate-list triples `(row, column, value)`.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |(j, w)| (i, *j, w)))
    }
}

/// Add `N·overlap/slope` for every cell met by the image `[y0, y1)`.
fn spread<T: Scalar>(row: &mut Vec<(usize, T)>, n: usize, y0: &T, y1: &T, slope: &T) {
    if y0 >= y1 {
        return;
    }
    let nt = T::from_usize(n).expect("cell count fits");
    let first = (y0.clone() * nt.clone())
        .floor_val()
        .to_usize()
        .unwrap_or(0)
        .min(n - 1);
    let last_cell = (y1.clone() * nt.clone())
        .floor_val()
        .to_usize()
        .unwrap_or(0)
        .min(n - 1);
    for j in first..=last_cell {
        let lo = T::from_ratio(j as i64, n as i64);
        let hi = T::from_ratio(j as i64 + 1, n as i64);
        let overlap = min_of(y1, &hi) - max_of(y0, &lo);
        if overlap > T::zero() {
            row.push((j, nt.clone() * overlap / slope.clone()));
        }
    }
}

/// Build the Ulam matrix; rows are assembled in parallel.
pub fn ulam_matrix<T: Scalar>(p: &MapParams<T>, n: usize) -> Result<UlamOperator<T>> {
    if n < 2 {
        return Err(Error::InvalidParams(format!(
            "need at least 2 cells, got {n}"
        )));
    }
    let c = p.c();
    let rows = (0..n)
        .into_par_iter()
        .map(|i| {
            let lo = T::from_ratio(i as i64, n as i64);
            let hi = T::from_ratio(i as i64 + 1, n as i64);
            let mut row = Vec::new();
            if &lo < c {
                let top = min_of(&hi, c);
                let (y0, y1) = (
                    p.apply_branch(Branch::Left, &lo),
                    p.apply_branch(Branch::Left, &top),
                );
                spread(&mut row, n, &y0, &y1, p.a());
            }
            if &hi > c {
                let bottom = max_of(&lo, c);
                let (y0, y1) = (
                    p.apply_branch(Branch::Right, &bottom),
                    p.apply_branch(Branch::Right, &hi),
                );
                spread(&mut row, n, &y0, &y1, p.b());
            }
            row.sort_by_key(|(j, _)| *j);
            let mut merged: Vec<(usize, T)> = Vec::with_capacity(row.len());
            for (j, w) in row {
                match merged.last_mut() {
                    Some((k, acc)) if *k == j => *acc = acc.clone() + w,
                    _ => merged.push((j, w)),
                }
            }
            merged
        })
        .collect();
    Ok(UlamOperator { n, rows })
}

/// Stationary density by averaged power iteration `π ← (π + πM)/2`.
pub fn ulam_stationary<T: Scalar>(
    u: &UlamOperator<T>,
    tol: f64,
    max_iter: usize,
) -> Result<StepDensity<f64>> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let n = u.n;
    let rows: Vec<Vec<(usize, f64)>> = u
        .rows
        .iter()
        .map(|row| row.iter().map(|(j, w)| (*j, w.to_f64_lossy())).collect())
        .collect();
    let mut pi = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut change = f64::INFINITY;
    for _ in 0..max_iter {
        next.iter_mut().for_each(|x| *x = 0.0);
        for (i, row) in rows.iter().enumerate() {
            let w = pi[i];
            if w == 0.0 {
                continue;
            }
            for (j, m) in row {
                next[*j] += w * m;
            }
        }
        let mut total = 0.0;
        for (x, y) in next.iter_mut().zip(&pi) {
            *x = 0.5 * (*x + y);
            total += *x;
        }
        change = 0.0;
        for (x, y) in next.iter_mut().zip(&pi) {
            *x /= total;
            change += (*x - y).abs();
        }
        std::mem::swap(&mut pi, &mut next);
        if change < tol {
            let values = pi.iter().map(|x| x * n as f64).collect();
            return StepDensity::uniform_cells(values);
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        last_change: change,
    })
}
