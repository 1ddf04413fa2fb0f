//! Affine maps and compositions of the two branches.

use crate::map::{Branch, MapParams};
use crate::scalar::{approx_eq, Scalar};

/// `x ↦ slope·x + offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct Affine<T> {
    pub slope: T,
    pub offset: T,
}

impl<T: Scalar> Affine<T> {
    pub fn new(slope: T, offset: T) -> Self {
        Self { slope, offset }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero())
    }

    pub fn eval(&self, x: &T) -> T {
        self.slope.clone() * x.clone() + self.offset.clone()
    }

    /// Solve `self(x) = y`.
    pub fn invert(&self, y: &T) -> T {
        (y.clone() - self.offset.clone()) / self.slope.clone()
    }

    /// `outer ∘ self`.
    pub fn then(&self, outer: &Affine<T>) -> Affine<T> {
        Affine::new(
            outer.slope.clone() * self.slope.clone(),
            outer.slope.clone() * self.offset.clone() + outer.offset.clone(),
        )
    }

    /// The unique fixed point, if the slope differs from one.
    pub fn fixed_point(&self) -> Option<T> {
        if self.slope.is_one() {
            None
        } else {
            Some(self.offset.clone() / (T::one() - self.slope.clone()))
        }
    }

    /// Slope one and offset zero; exact for rationals, within slack for floats.
    pub fn is_identity(&self) -> bool {
        approx_eq(&self.slope, &T::one()) && approx_eq(&self.offset, &T::zero())
    }
}

/// One continuity piece of `fⁿ`: the open interval `(lo, hi)` on which `fⁿ`
/// follows `itinerary` and equals `map`.
#[derive(Clone, Debug)]
pub struct Piece<T> {
    pub lo: T,
    pub hi: T,
    pub map: Affine<T>,
    pub itinerary: Vec<Branch>,
}

/// All continuity pieces of `fⁿ`, in increasing order.
pub fn compose_power<T: Scalar>(p: &MapParams<T>, n: usize) -> Vec<Piece<T>> {
    let mut pieces = vec![Piece {
        lo: T::zero(),
        hi: T::one(),
        map: Affine::identity(),
        itinerary: Vec::new(),
    }];
    let c = p.c();
    let (left, right) = (p.branch_map(Branch::Left), p.branch_map(Branch::Right));
    for _ in 0..n {
        let mut next = Vec::with_capacity(pieces.len() * 2);
        for piece in pieces {
            let (y_lo, y_hi) = (piece.map.eval(&piece.lo), piece.map.eval(&piece.hi));
            let step = |lo: T, hi: T, branch: Branch| {
                let outer = if branch == Branch::Left {
                    &left
                } else {
                    &right
                };
                let mut itinerary = piece.itinerary.clone();
                itinerary.push(branch);
                Piece {
                    lo,
                    hi,
                    map: piece.map.then(outer),
                    itinerary,
                }
            };
            if &y_hi <= c {
                next.push(step(piece.lo.clone(), piece.hi.clone(), Branch::Left));
            } else if &y_lo >= c {
                next.push(step(piece.lo.clone(), piece.hi.clone(), Branch::Right));
            } else {
                let cut = piece.map.invert(c);
                next.push(step(piece.lo.clone(), cut.clone(), Branch::Left));
                next.push(step(cut, piece.hi.clone(), Branch::Right));
            }
        }
        pieces = next;
    }
    pieces
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn composition_order() {
        let f = Affine::new(q(2, 1), q(1, 1));
        let g = Affine::new(q(3, 1), q(0, 1));
        // g ∘ f (x) = 3(2x + 1)
        let h = f.then(&g);
        assert_eq!(h.eval(&q(1, 1)), q(9, 1));
        assert_eq!(h.fixed_point(), Some(q(-3, 5)));
        assert_eq!(f.invert(&q(5, 1)), q(2, 1));
    }

    #[test]
    fn doubling_power_pieces() {
        let p = MapParams::new(q(2, 1), q(2, 1), q(1, 2)).unwrap();
        let pieces = compose_power(&p, 3);
        assert_eq!(pieces.len(), 8);
        for (k, piece) in pieces.iter().enumerate() {
            assert_eq!(piece.lo, q(k as i64, 8));
            assert_eq!(piece.map.slope, q(8, 1));
            assert_eq!(piece.map.eval(&piece.lo), q(0, 1));
        }
    }

    #[test]
    fn period_three_map_composes_to_identity() {
        let p = MapParams::new(q(4, 1), q(1, 2), q(1, 7)).unwrap();
        let pieces = compose_power(&p, 3);
        assert!(pieces.iter().all(|piece| piece.map.is_identity()));
    }
}
