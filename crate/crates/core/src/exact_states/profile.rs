//! Single-sided elliptic profiles measured from the wall.
//!
//! On each side the state is `a f(k s | m)` with `s` the distance to the wall,
//! so `f(0) = 0` matches the hard-wall condition:
//!
//! ```text
//! repulsive:  f = sn,                     f' = cn dn,              mu = k^2 (1 + m)
//! attractive: f = sqrt(1-m) sn/dn = cn(s - K), f' = sqrt(1-m) cn/dn^2, mu = k^2 (1 - 2m)
//! a^2 = 2 m k^2 / |etaN|
//! ```
//!
//! `weight` is `m * integral_0^s f^2`, kept in this form so that it stays
//! finite as `m -> 0`:
//!
//! ```text
//! repulsive:  s - Eps(s)
//! attractive: Eps(s) - (1-m) s - m sn cn / dn
//! ```

use serde::Serialize;

use crate::elliptic::Elliptic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Interaction {
    Repulsive,
    Attractive,
}

impl Interaction {
    pub fn of(eta_n: f64) -> Self {
        if eta_n > 0.0 {
            Interaction::Repulsive
        } else {
            Interaction::Attractive
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ProfilePoint {
    pub f: f64,
    pub df: f64,
    pub weight: f64,
}

pub fn chemical_potential(kind: Interaction, k: f64, m: f64) -> f64 {
    match kind {
        Interaction::Repulsive => k * k * (1.0 + m),
        Interaction::Attractive => k * k * (1.0 - 2.0 * m),
    }
}

pub fn amplitude(k: f64, m: f64, eta_n: f64) -> f64 {
    k * (2.0 * m / eta_n.abs()).sqrt()
}

/// Profile value and slope only.
pub fn value(kind: Interaction, table: &Elliptic<f64>, s: f64) -> (f64, f64) {
    let v = table.eval(s);
    match kind {
        Interaction::Repulsive => (v.sn, v.cn * v.dn),
        Interaction::Attractive => {
            let c = (1.0 - table.m()).sqrt();
            (c * v.sn / v.dn, c * v.cn / (v.dn * v.dn))
        }
    }
}

pub fn point(kind: Interaction, table: &Elliptic<f64>, s: f64) -> ProfilePoint {
    let v = table.eval(s);
    let m = table.m();
    match kind {
        Interaction::Repulsive => ProfilePoint {
            f: v.sn,
            df: v.cn * v.dn,
            weight: s - v.epsilon,
        },
        Interaction::Attractive => {
            let c = (1.0 - m).sqrt();
            ProfilePoint {
                f: c * v.sn / v.dn,
                df: c * v.cn / (v.dn * v.dn),
                weight: v.epsilon - (1.0 - m) * s - m * v.sn * v.cn / v.dn,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;

    #[test]
    fn weight_matches_quadrature_of_profile_squared() {
        let gl = GaussLegendre::<f64>::new(64);
        for kind in [Interaction::Repulsive, Interaction::Attractive] {
            for &(s, m) in &[(1.3, 0.2), (3.0, 0.5), (2.6, 0.999)] {
                let t = Elliptic::new(m).unwrap();
                let q = gl.integrate_panels(0.0, s, 16, |x| value(kind, &t, x).0.powi(2));
                let w = point(kind, &t, s).weight;
                assert!((w - m * q).abs() < 1e-12, "{kind:?} s={s} m={m}");
            }
        }
    }

    #[test]
    fn attractive_profile_is_shifted_cn() {
        let m = 0.7;
        let t = Elliptic::new(m).unwrap();
        for &s in &[0.0, 0.4, 1.9, 3.3] {
            let shifted = t.eval(s - t.k()).cn;
            assert!((value(Interaction::Attractive, &t, s).0 - shifted).abs() < 1e-13);
        }
    }

    #[test]
    fn slope_matches_finite_difference() {
        let h = 1e-5;
        for kind in [Interaction::Repulsive, Interaction::Attractive] {
            let t = Elliptic::new(0.45).unwrap();
            let s = 1.1;
            let fd = (value(kind, &t, s + h).0 - value(kind, &t, s - h).0) / (2.0 * h);
            assert!((fd - value(kind, &t, s).1).abs() < 1e-9);
        }
    }
}
