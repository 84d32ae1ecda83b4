use crate::scalar::{lit, Scalar};

use super::FrameError;

/// Cap on a spring's stiffness relative to the member's 3EI/L. Fixity
/// factors at or above `RIGID_CAP / (1 + RIGID_CAP)` are assembled at this
/// stiffness, which is how γ = 1 reaches the element.
pub const RIGID_CAP: f64 = 1e6;

/// Rotational spring stiffness k (N·mm/rad) for fixity factor γ:
/// `k = (3EI/L) γ / (1 − γ)`.
pub fn fixity_to_stiffness<T: Scalar>(
    gamma: T,
    bending_stiffness: T,
    length: T,
) -> Result<T, FrameError> {
    if !(gamma >= T::zero() && gamma <= T::one()) {
        return Err(FrameError::FixityOutOfRange {
            index: 0,
            value: crate::scalar::to_f64(gamma),
        });
    }
    if gamma == T::one() {
        return Err(FrameError::RigidJoint);
    }
    let base = lit::<T>(3.0) * bending_stiffness / length;
    Ok(base * gamma / (T::one() - gamma))
}

/// Inverse of [`fixity_to_stiffness`]: `γ = (1 + (3EI/L)/k)⁻¹`. Infinite k
/// gives γ = 1.
pub fn stiffness_to_fixity<T: Scalar>(stiffness: T, bending_stiffness: T, length: T) -> T {
    if stiffness.is_infinite() {
        return T::one();
    }
    let base = lit::<T>(3.0) * bending_stiffness / length;
    stiffness / (stiffness + base)
}

/// Fixity factor the element actually sees, with the rigid cap applied.
///
/// For γ below the cap this is γ itself; the cap maps every γ closer to 1
/// onto the fixity of a spring with k = RIGID_CAP · 3EI/L.
pub fn effective_fixity<T: Scalar>(gamma: T) -> T {
    let cap = lit::<T>(RIGID_CAP);
    gamma.min(cap / (T::one() + cap))
}
