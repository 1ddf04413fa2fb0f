//! Multiplicative relations between positive rationals.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::Rational;

/// Refine `numbers` into pairwise coprime factors `> 1` such that every input
/// is a product of powers of them.
pub fn coprime_basis(numbers: &[BigUint]) -> Vec<BigUint> {
    let mut basis: Vec<BigUint> = numbers
        .iter()
        .filter(|n| !n.is_one() && !n.is_zero())
        .cloned()
        .collect();
    loop {
        basis.sort();
        basis.dedup();
        let mut split = None;
        'search: for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                let g = basis[i].gcd(&basis[j]);
                if !g.is_one() {
                    split = Some((i, j, g));
                    break 'search;
                }
            }
        }
        let Some((i, j, g)) = split else {
            return basis;
        };
        let (x, y) = (&basis[i] / &g, &basis[j] / &g);
        basis.swap_remove(j);
        basis.swap_remove(i);
        basis.extend([g, x, y].into_iter().filter(|n| !n.is_one()));
    }
}

fn valuation(mut n: BigUint, prime_like: &BigUint) -> (i64, BigUint) {
    let mut e = 0;
    loop {
        let (quot, rem) = n.div_rem(prime_like);
        if !rem.is_zero() {
            return (e, n);
        }
        n = quot;
        e += 1;
    }
}

/// Exponent vector of a positive rational over a coprime basis covering its
/// numerator and denominator.
pub fn exponents(r: &Rational, basis: &[BigUint]) -> Vec<i64> {
    let mut num = r.numer().magnitude().clone();
    let mut den = r.denom().magnitude().clone();
    basis
        .iter()
        .map(|b| {
            let (en, rest_n) = valuation(num.clone(), b);
            let (ed, rest_d) = valuation(den.clone(), b);
            num = rest_n;
            den = rest_d;
            en - ed
        })
        .collect()
}

/// The reduced pair `(p, q)`, `q > 0`, with `a^q = b^p`, if one exists.
/// Both inputs must be positive and different from one.
pub fn log_ratio(a: &Rational, b: &Rational) -> Option<(i64, i64)> {
    debug_assert!(a.is_positive() && b.is_positive());
    let basis = coprime_basis(&[
        a.numer().magnitude().clone(),
        a.denom().magnitude().clone(),
        b.numer().magnitude().clone(),
        b.denom().magnitude().clone(),
    ]);
    let (va, vb) = (exponents(a, &basis), exponents(b, &basis));
    let k = vb.iter().position(|e| *e != 0)?;
    // log a / log b = va[k] / vb[k] if the vectors are proportional
    let (mut p, mut q) = (va[k], vb[k]);
    if q < 0 {
        p = -p;
        q = -q;
    }
    let g = p.gcd(&q);
    if g == 0 {
        return None;
    }
    let (p, q) = (p / g, q / g);
    let proportional = va.iter().zip(&vb).all(|(x, y)| x * q == y * p);
    proportional.then_some((p, q))
}

/// `x^n` for a possibly negative integer exponent.
pub fn rational_pow(x: &Rational, n: i64) -> Rational {
    let base = if n < 0 { x.recip() } else { x.clone() };
    num_traits::pow(base, n.unsigned_abs() as usize)
}

/// Best rational approximations of `x` by continued fractions, stopping at
/// `depth` terms or when a denominator would exceed `max_den`.
pub fn convergents(x: f64, depth: usize, max_den: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    if !x.is_finite() {
        return out;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut rest = x;
    for _ in 0..depth {
        let a = rest.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i128;
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        if q2 > max_den as i128 || p2.abs() > i64::MAX as i128 {
            break;
        }
        out.push((p2 as i64, q2 as i64));
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = rest - a as f64;
        if frac.abs() < 1e-15 {
            break;
        }
        rest = 1.0 / frac;
    }
    out
}
