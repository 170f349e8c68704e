//! Floating-point abstraction shared by the generic numerical kernels.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumCast};

/// Real scalar used by the elliptic, quadrature, root-finding, linear-mode,
/// two-mode and eigenvalue kernels. Implemented for `f32` and `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumCast + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Converts an index or count into the scalar type.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Widens the value to `f64` (used for reporting).
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Convergence floor for iterative kernels: `1e-14` in double precision,
    /// a small multiple of machine epsilon for narrower types.
    #[inline]
    fn iter_tol() -> Self {
        let floor = Self::epsilon() * Self::lit(8.0);
        let target = Self::lit(1e-14);
        if target > floor {
            target
        } else {
            floor
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}
