//! Piecewise linear Lorenz maps `f_{a,b,c}` on `[0, 1]`: existence and
//! character of absolutely continuous invariant measures, equivalence with
//! Lebesgue measure, and invariant densities computed by exact transport,
//! Ulam's method and closed forms.
//!
//! Every operation is generic over the [`Scalar`] backend: `f64`, or exact
//! rationals ([`Rational`]).
//!
//! ```
//! use lorenz_acim::{classify, AcimClass, AnyMap};
//!
//! let map = AnyMap::parse("4", "1/2", "1/7", false).unwrap();
//! let AnyMap::Exact(p) = map else { unreachable!() };
//! assert_eq!(classify(&p).unwrap().class, AcimClass::PeriodicIdentity { n: 3 });
//! ```

pub mod affine;
pub mod classify;
pub mod density;
pub mod error;
pub mod io;
pub mod map;
pub mod numtheory;
pub mod periodic;
pub mod rotation;
pub mod scalar;

pub use affine::{compose_power, Affine, Piece};
pub use classify::{
    classify, conjugacy_condition, conjugate_map_eval, identity_power, AcimClass,
    AcimClassification,
};
pub use error::{Error, Result};
pub use map::{AnyMap, Branch, CriticalPolicy, LiftPoint, MapParams, OrbitTrace, Side, SidedPoint};
pub use periodic::{
    equivalence_check, fixed_points, has_fixed_point, minimal_period, periodic_orbit, renormalize,
    EquivalenceReason, EquivalenceVerdict, Kappa, PeriodicStructure, RenormData,
};
pub use rotation::{
    log_ratio_rationality, lyapunov_estimate, rotation_interval_estimate, rotation_number_homeo,
    LogRatioVerdict, RotationEstimate, RotationNumber,
};
pub use scalar::{Rational, Scalar};
