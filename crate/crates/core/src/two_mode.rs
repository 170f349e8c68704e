//! Two-mode approximations built from the lowest even and odd linear modes.
//!
//! The trial state is `u phi0 + v phi1` with `u^2 + v^2 = 1`. Stationarity gives
//!
//! ```text
//! Gamma u = u e0 + etaN (u^3 chi40 + 3 u v^2 chi22)
//! Gamma v = v e1 + etaN (v^3 chi04 + 3 v u^2 chi22)
//! ```
//!
//! and the localized-basis description uses `omega = (e1 - e0)/2` together
//! with `W40 = integral phi_L^4 = (chi40 + chi04 + 6 chi22)/4`, where
//! `phi_{L,R} = (phi0 -+ phi1)/sqrt 2`.

use serde::Serialize;

use crate::error::Result;
use crate::exact_states::ExactState;
use crate::linear_modes::{integrate_box, lowest_overlaps, LinearMode};
use crate::quadrature::GaussLegendre;
use crate::scalar::Real;

/// Overlaps and energies of the two lowest modes at one barrier strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoModeModel<T> {
    pub gamma: T,
    pub chi40: T,
    pub chi04: T,
    pub chi22: T,
    pub w40: T,
    pub e0: T,
    pub e1: T,
    /// Gap `e1 - e0`.
    pub delta: T,
    /// Half gap.
    pub omega: T,
    /// Mean energy `(e0 + e1)/2`.
    pub mean_energy: T,
}

/// A stationary point of the two-mode energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoModeState<T> {
    pub u: T,
    pub v: T,
    pub chemical_potential: T,
    pub energy: T,
}

/// A fixed point of the semiclassical population-imbalance dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymmetryPoint<T> {
    pub eta_n: T,
    /// Magnitude of the imbalance; `-z` is the mirror-image partner.
    pub z: T,
    /// Relative phase, `0` or `pi`.
    pub theta: T,
}

impl<T: Real> TwoModeModel<T> {
    pub fn new(gamma: T) -> Result<Self> {
        let o = lowest_overlaps(gamma)?;
        let e0 = LinearMode::symmetric(gamma, 1)?.energy;
        let e1 = LinearMode::<T>::antisymmetric(1)?.energy;
        let half = T::lit(0.5);
        Ok(Self {
            gamma,
            chi40: o.chi40,
            chi04: o.chi04,
            chi22: o.chi22,
            w40: (o.chi40 + o.chi04 + T::lit(6.0) * o.chi22) / T::lit(4.0),
            e0,
            e1,
            delta: e1 - e0,
            omega: (e1 - e0) * half,
            mean_energy: (e1 + e0) * half,
        })
    }

    /// `u^2` of the mixed stationary point, if it lies strictly inside `(0, 1)`.
    pub fn variational_u2(&self, eta_n: T) -> Option<T> {
        let six = T::lit(6.0);
        let three = T::lit(3.0);
        let num = eta_n * (three * self.chi22 - self.chi04) - self.delta;
        let den = eta_n * (six * self.chi22 - self.chi40 - self.chi04);
        if den == T::zero() {
            return None;
        }
        let u2 = num / den;
        (u2 > T::zero() && u2 < T::one()).then_some(u2)
    }

    pub fn variational_energy(&self, u: T, eta_n: T) -> T {
        let u2 = u * u;
        let v2 = T::one() - u2;
        u2 * self.e0
            + v2 * self.e1
            + eta_n * T::lit(0.5)
                * (self.chi40 * u2 * u2 + self.chi04 * v2 * v2 + T::lit(6.0) * self.chi22 * u2 * v2)
    }

    /// `d^2 E / du^2` at coefficient `u` (with `v^2 = 1 - u^2`).
    pub fn variational_curvature(&self, u: T, eta_n: T) -> T {
        // E(s) with s = u^2: dE/du = 2u E'(s), d2E/du2 = 2 E'(s) + 4 u^2 E''(s).
        let s = u * u;
        let two = T::lit(2.0);
        let six = T::lit(6.0);
        let d1 = self.e0 - self.e1
            + eta_n * (self.chi40 * s - self.chi04 * (T::one() - s) + T::lit(3.0) * self.chi22 * (T::one() - two * s));
        let d2 = eta_n * (self.chi40 + self.chi04 - six * self.chi22);
        two * d1 + T::lit(4.0) * s * d2
    }

    /// The two chemical potentials implied by the stationarity equations at
    /// `(u, v)`; they coincide at a stationary point.
    pub fn chemical_potentials(&self, u: T, v: T, eta_n: T) -> (T, T) {
        let three = T::lit(3.0);
        (
            self.e0 + eta_n * (u * u * self.chi40 + three * v * v * self.chi22),
            self.e1 + eta_n * (v * v * self.chi04 + three * u * u * self.chi22),
        )
    }

    /// The mixed stationary state, when it exists.
    pub fn asymmetric_state(&self, eta_n: T) -> Option<TwoModeState<T>> {
        let u2 = self.variational_u2(eta_n)?;
        let (u, v) = (u2.sqrt(), (T::one() - u2).sqrt());
        Some(TwoModeState {
            u,
            v,
            chemical_potential: self.chemical_potentials(u, v, eta_n).0,
            energy: self.variational_energy(u, eta_n),
        })
    }

    /// Pure even (`u = 1`) or odd (`u = 0`) stationary state.
    pub fn pure_state(&self, even: bool, eta_n: T) -> TwoModeState<T> {
        let (u, v) = if even { (T::one(), T::zero()) } else { (T::zero(), T::one()) };
        let (g0, g1) = self.chemical_potentials(u, v, eta_n);
        TwoModeState {
            u,
            v,
            chemical_potential: if even { g0 } else { g1 },
            energy: self.variational_energy(u, eta_n),
        }
    }

    /// Attractive onset of the mixed state, `-Delta / (3 chi22 - chi40)`.
    pub fn critical_attractive_variational(&self) -> T {
        -self.delta / (T::lit(3.0) * self.chi22 - self.chi40)
    }

    /// Repulsive onset of the mixed state, `Delta / (3 chi22 - chi04)`.
    pub fn critical_repulsive_variational(&self) -> T {
        self.delta / (T::lit(3.0) * self.chi22 - self.chi04)
    }

    /// Effective interaction `zeta = W40 etaN / omega`.
    pub fn zeta(&self, eta_n: T) -> T {
        self.w40 * eta_n / self.omega
    }

    /// `2 omega / W40`.
    pub fn sacchetti_critical(&self) -> T {
        T::lit(2.0) * self.omega / self.w40
    }

    /// Self-trapped fixed point at `etaN`: phase `pi` for repulsion, `0` for attraction.
    pub fn sacchetti_point(&self, eta_n: T) -> Option<AsymmetryPoint<T>> {
        let zeta = self.zeta(eta_n);
        let z = sacchetti_z(zeta)?;
        Some(AsymmetryPoint {
            eta_n,
            z,
            theta: if zeta > T::zero() { T::PI() } else { T::zero() },
        })
    }
}

/// Imbalance `sqrt(1 - 4/zeta^2)` of the self-trapped fixed points. `None`
/// below the threshold `|zeta| = 2`; exactly zero at it.
pub fn sacchetti_z<T: Real>(zeta: T) -> Option<T> {
    let two = T::lit(2.0);
    if zeta.abs() < two || zeta.is_nan() {
        return None;
    }
    let r = T::lit(4.0) / (zeta * zeta);
    Some((T::one() - r).max(T::zero()).sqrt())
}

/// Large-barrier estimate `8 pi^2 / (3 gamma)`.
pub fn malomed_large<T: Real>(gamma: T) -> T {
    T::lit(8.0) * T::PI() * T::PI() / (T::lit(3.0) * gamma)
}

/// Small-barrier estimate `2 ln(16 / gamma)`.
pub fn malomed_small<T: Real>(gamma: T) -> T {
    T::lit(2.0) * (T::lit(16.0) / gamma).ln()
}

/// Projection of an exact state onto the localized two-mode basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalizedProjection {
    /// `(A_L^2 - A_R^2) / (A_L^2 + A_R^2)`.
    pub z: f64,
    /// `A_L^2 + A_R^2`, the weight captured by the two modes.
    pub captured: f64,
}

/// Imbalance of an exact state measured in the localized basis.
pub fn z_exact(state: &ExactState, model: &TwoModeModel<f64>) -> Result<LocalizedProjection> {
    let even = LinearMode::symmetric(model.gamma, 1)?;
    let odd = LinearMode::<f64>::antisymmetric(1)?;
    let sampler = state.sampler()?;
    let gl = GaussLegendre::<f64>::new(64);
    let s2 = std::f64::consts::SQRT_2;
    let left = integrate_box(&gl, |x| (even.eval(x) - odd.eval(x)) / s2 * sampler.eval(x));
    let right = integrate_box(&gl, |x| (even.eval(x) + odd.eval(x)) / s2 * sampler.eval(x));
    let (l2, r2) = (left * left, right * right);
    Ok(LocalizedProjection {
        z: (l2 - r2) / (l2 + r2),
        captured: l2 + r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn model10() -> TwoModeModel<f64> {
        TwoModeModel::new(10.0).unwrap()
    }

    #[test]
    fn model_at_gamma_10() {
        let m = model10();
        assert!((m.e0 - 7.041_924_13).abs() < 1e-7);
        assert!((m.w40 - 1.355_013_52).abs() < 1e-7);
        assert!((m.w40 - (m.chi40 + m.chi04 + 6.0 * m.chi22) / 4.0).abs() < 1e-12);
        assert!(m.delta > 0.0);
    }

    #[test]
    fn localized_overlap_matches_direct_quadrature() {
        // Independent oracle for W40: integrate phi_L^4 directly.
        let m = model10();
        let gl = GaussLegendre::<f64>::new(64);
        let a = LinearMode::symmetric(10.0, 1).unwrap();
        let b = LinearMode::<f64>::antisymmetric(1).unwrap();
        let w = integrate_box(&gl, |x| ((a.eval(x) - b.eval(x)) / 2f64.sqrt()).powi(4));
        assert!((w - m.w40).abs() < 1e-12);
    }

    #[test]
    fn critical_values_at_gamma_10() {
        let m = model10();
        assert!((m.critical_attractive_variational() + 2.11).abs() < 5e-3);
        assert!((m.critical_repulsive_variational() - 2.25).abs() < 5e-3);
        assert!((m.sacchetti_critical() - 2.086_83).abs() < 1e-4);
        assert!(m.variational_u2(-2.0).is_none());
        assert!(m.variational_u2(2.0).is_none());
        assert!(m.variational_u2(-2.2).is_some());
        assert!(m.variational_u2(2.3).is_some());
    }

    #[test]
    fn u2_saturates_for_strong_interaction() {
        let m = model10();
        let limit = (3.0 * m.chi22 - m.chi04) / (6.0 * m.chi22 - m.chi40 - m.chi04);
        assert!((m.variational_u2(1e9).unwrap() - limit).abs() < 1e-8);
        let att_limit = m.variational_u2(-1e9).unwrap();
        assert!((att_limit - limit).abs() < 1e-8);
    }

    #[test]
    fn pure_mode_energies() {
        let m = model10();
        assert_eq!(m.variational_energy(1.0, 0.0), m.e0);
        assert_eq!(m.variational_energy(0.0, 0.0), m.e1);
        let even = m.pure_state(true, -3.0);
        assert!((even.chemical_potential - (m.e0 - 3.0 * m.chi40)).abs() < 1e-12);
        let odd = m.pure_state(false, 3.0);
        assert!((odd.chemical_potential - (m.e1 + 3.0 * m.chi04)).abs() < 1e-12);
    }

    #[test]
    fn malomed_and_sacchetti_arithmetic() {
        let g = 8.0 * std::f64::consts::PI.powi(2) / 3.0;
        assert!((malomed_large(g) - 1.0).abs() < 1e-15);
        assert_eq!(malomed_small(16.0f64), 0.0);
        assert!((malomed_large(10.0f64) - 2.632).abs() < 1e-3);
        assert_eq!(sacchetti_z(2.0f64), Some(0.0));
        assert!((sacchetti_z(4.0f64).unwrap() - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(sacchetti_z(1.0f64), None);
        assert_eq!(sacchetti_z(-1.99f64), None);
    }

    #[test]
    fn fixed_point_phase() {
        let m = model10();
        let rep = m.sacchetti_point(5.0).unwrap();
        assert_eq!(rep.theta, std::f64::consts::PI);
        let att = m.sacchetti_point(-5.0).unwrap();
        assert_eq!(att.theta, 0.0);
        assert!((rep.z - att.z).abs() < 1e-15);
    }

    #[test]
    fn strong_barrier_limits() {
        let m = TwoModeModel::<f64>::new(1e6).unwrap();
        assert!(m.critical_attractive_variational().abs() < 1e-4);
        assert!(m.critical_repulsive_variational().abs() < 1e-4);
        let mut last = f64::INFINITY;
        for g in [10.0, 100.0, 1e3, 1e4, 1e6] {
            let c = TwoModeModel::<f64>::new(g).unwrap().sacchetti_critical();
            assert!(c < last);
            last = c;
        }
        assert!(last < 1e-4);
    }

    #[test]
    fn works_in_single_precision() {
        let m = TwoModeModel::<f32>::new(10.0).unwrap();
        assert!((m.sacchetti_critical() - 2.086_83).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn stationary_point_has_common_chemical_potential(eta in prop_oneof![-40.0f64..-2.2, 2.3f64..40.0]) {
            let m = model10();
            let s = m.asymmetric_state(eta).unwrap();
            let (g0, g1) = m.chemical_potentials(s.u, s.v, eta);
            prop_assert!((g0 - g1).abs() < 1e-10);
            prop_assert!((s.u * s.u + s.v * s.v - 1.0).abs() < 1e-12);
            let curvature = m.variational_curvature(s.u, eta);
            let expected_sign = if eta < 0.0 { 1.0 } else { -1.0 };
            prop_assert!(curvature * expected_sign > 0.0);
        }

        #[test]
        fn curvature_matches_finite_difference(u in 0.1f64..0.9, eta in -20.0f64..20.0) {
            let m = model10();
            let h = 1e-4;
            let fd = (m.variational_energy(u + h, eta) - 2.0 * m.variational_energy(u, eta)
                + m.variational_energy(u - h, eta)) / (h * h);
            prop_assert!((fd - m.variational_curvature(u, eta)).abs() < 1e-5 * (1.0 + fd.abs()));
        }

        #[test]
        fn sacchetti_z_in_unit_interval(zeta in -1e3f64..1e3) {
            if let Some(z) = sacchetti_z(zeta) {
                prop_assert!((0.0..=1.0).contains(&z));
            } else {
                prop_assert!(zeta.abs() < 2.0);
            }
        }
    }
}
