//! Eigenmodes of the linear problem: a box `[-1, 1]` with hard walls and a
//! central delta barrier of strength `gamma`.
//!
//! Odd modes do not feel the barrier: `sin(j pi x)`, energy `(j pi)^2`.
//! Even modes are `A (sin k|x| + (2k/gamma) cos kx)` with `tan k = -2k/gamma`,
//! one root per interval `((2n-1) pi/2, n pi)`.

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::roots::brent;
use crate::scalar::Real;

/// Offset keeping the bracket away from the tangent pole and the upper end.
const BRACKET_OFFSET: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Symmetric,
    Antisymmetric,
}

/// One normalized linear eigenmode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearMode<T> {
    pub parity: Parity,
    /// 1-based index within the parity class.
    pub index: usize,
    pub k: T,
    pub energy: T,
    pub amplitude: T,
    gamma: T,
}

impl<T: Real> LinearMode<T> {
    pub fn symmetric(gamma: T, index: usize) -> Result<Self> {
        let k = symmetric_k(gamma, index)?;
        let c = cos_weight(gamma, k);
        // Closed form of the norm: 2 * integral_0^1 (sin kx + c cos kx)^2.
        let (s2, s) = ((k + k).sin(), k.sin());
        let half = T::lit(0.5);
        let norm2 = T::lit(2.0)
            * (half - s2 / (T::lit(4.0) * k) + c * s * s / k + c * c * (half + s2 / (T::lit(4.0) * k)));
        Ok(Self {
            parity: Parity::Symmetric,
            index,
            k,
            energy: k * k,
            amplitude: T::one() / norm2.sqrt(),
            gamma,
        })
    }

    pub fn antisymmetric(index: usize) -> Result<Self> {
        if index == 0 {
            return Err(Error::InvalidArgument("mode index starts at 1".into()));
        }
        let k = T::from_count(index) * T::PI();
        Ok(Self {
            parity: Parity::Antisymmetric,
            index,
            k,
            energy: k * k,
            amplitude: T::one(),
            gamma: T::zero(),
        })
    }

    pub fn eval(&self, x: T) -> T {
        match self.parity {
            Parity::Antisymmetric => (self.k * x).sin(),
            Parity::Symmetric => {
                let c = cos_weight(self.gamma, self.k);
                self.amplitude * ((self.k * x.abs()).sin() + c * (self.k * x).cos())
            }
        }
    }
}

fn cos_weight<T: Real>(gamma: T, k: T) -> T {
    if gamma.is_infinite() {
        T::zero()
    } else {
        T::lit(2.0) * k / gamma
    }
}

/// Wave number of the `n`-th even mode (n >= 1).
pub fn symmetric_k<T: Real>(gamma: T, n: usize) -> Result<T> {
    if !(gamma > T::zero()) {
        return Err(Error::Domain(format!("barrier strength must be positive, got {gamma}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("mode index starts at 1".into()));
    }
    let nf = T::from_count(n);
    let off = T::lit(BRACKET_OFFSET);
    let lo = (nf - T::lit(0.5)) * T::PI() + off;
    let hi = nf * T::PI();
    // Pole-free form of tan k + 2k/gamma = 0.
    let f = |k: T| k.sin() + cos_weight(gamma, k) * k.cos();
    let hi_inner = hi - off;
    let upper = if (f(hi_inner) > T::zero()) != (f(lo) > T::zero()) {
        hi_inner
    } else {
        hi
    };
    if (f(upper) > T::zero()) == (f(lo) > T::zero()) {
        // The root sits within rounding of n pi (barrier effectively infinite).
        return Ok(hi);
    }
    brent(f, lo, upper, T::epsilon() * T::lit(4.0) * hi, 200)
}

/// The first `count` modes ordered by energy, alternating even/odd.
pub fn basis<T: Real>(gamma: T, count: usize) -> Result<Vec<LinearMode<T>>> {
    if count < 2 {
        return Err(Error::InvalidArgument(format!("basis size must be at least 2, got {count}")));
    }
    (0..count)
        .map(|i| {
            let index = i / 2 + 1;
            if i % 2 == 0 {
                LinearMode::symmetric(gamma, index)
            } else {
                LinearMode::antisymmetric(index)
            }
        })
        .collect()
}

/// Integrates `f` over `[-1, 1]` with a 64-node rule on each half.
pub fn integrate_box<T: Real, F: FnMut(T) -> T>(gl: &GaussLegendre<T>, mut f: F) -> T {
    gl.integrate(-T::one(), T::zero(), &mut f) + gl.integrate(T::zero(), T::one(), &mut f)
}

/// Overlap integrals of the two lowest modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlaps<T> {
    /// `integral phi0^4`
    pub chi40: T,
    /// `integral phi1^4`
    pub chi04: T,
    /// `integral phi0^2 phi1^2`
    pub chi22: T,
}

pub fn lowest_overlaps<T: Real>(gamma: T) -> Result<Overlaps<T>> {
    let gl = GaussLegendre::new(64);
    let s = LinearMode::symmetric(gamma, 1)?;
    let a = LinearMode::antisymmetric(1)?;
    Ok(Overlaps {
        chi40: integrate_box(&gl, |x| s.eval(x).powi(4)),
        chi04: integrate_box(&gl, |x| a.eval(x).powi(4)),
        chi22: integrate_box(&gl, |x| (s.eval(x) * a.eval(x)).powi(2)),
    })
}
