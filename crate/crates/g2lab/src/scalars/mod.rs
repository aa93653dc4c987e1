//! Exact arithmetic in towers ℚ ⊂ ℚ(ζ_m) ⊂ ℚ(ζ_m)(√d₁,…,√d_s), with dense
//! polynomials, matrices and root finding inside the tower.
//!
//! ```
//! use g2lab::scalars::{FieldTower, try_sqrt};
//! let t = FieldTower::cyclotomic(8);
//! let two = t.from_int(2);
//! let r = try_sqrt(&two).unwrap();
//! assert_eq!(&r * &r, two);
//! ```

mod local;
mod matrix;
mod poly;
mod tower;

pub(crate) use local::fp;
pub use local::{roots_in_tower, roots_in_tower_with, RootOptions};
pub use matrix::{kernel_basis, Matrix};
pub use poly::{resultant, Poly};
pub use tower::{cyclotomic_poly, euler_phi, FieldTower, Scalar, MAX_DEPTH};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero divisor detected at tower level {level}")]
    ZeroDivisorDetected { level: usize },
    #[error("tower depth cap {0} exceeded")]
    TowerDepthExceeded(usize),
    #[error("scalars live in incompatible towers")]
    TowerMismatch,
    #[error("coordinate vector has length {got}, expected {expected}")]
    BadLength { expected: usize, got: usize },
    #[error("conductor {have} is not divisible by {needed}")]
    ConductorTooSmall { needed: u64, have: u64 },
    #[error("matrix is not square")]
    NonSquareMatrix,
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error("matrix is singular")]
    Singular,
    #[error("not a square in this tower")]
    NotASquare,
    #[error("polynomial did not split completely; unsplit cofactor has degree {}", .cofactor.degree().unwrap_or(0))]
    IncompleteSplit { roots: Vec<(Scalar, usize)>, cofactor: Poly },
    #[error("zero polynomial")]
    ZeroPolynomial,
}

/// A square root of `x` in its own tower, verified by squaring.
///
/// The search recurses through the square-root levels with the norm trick
/// and finishes at the cyclotomic base with modular root finding. A `None`
/// is advisory: it can be wrong, a `Some` never is.
pub fn try_sqrt(x: &Scalar) -> Option<Scalar> {
    let r = local::sqrt_in_tower(x)?;
    debug_assert!(&r * &r == *x);
    if &r * &r == *x {
        Some(r)
    } else {
        None
    }
}

/// Returns a tower in which `d` has a square root, together with that root.
///
/// If [`try_sqrt`] succeeds the tower is returned unchanged.
pub fn adjoin_sqrt(tower: &FieldTower, d: &Scalar) -> Result<(FieldTower, Scalar), ScalarError> {
    let d = d.lift_to(tower)?;
    if d.is_zero() {
        return Err(ScalarError::DivisionByZero);
    }
    if let Some(r) = try_sqrt(&d) {
        return Ok((tower.clone(), r));
    }
    tower.push_sqrt_unchecked(&d)
}
