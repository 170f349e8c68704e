//! Imaginary-time relaxation on a grid, with the delta barrier replaced by a
//! narrow Gaussian and the hard walls by a steep power law.
//!
//! The grid works in its own coordinate `y` with kinetic operator
//! `-1/2 d^2/dy^2`, potential
//!
//! ```text
//! V(y) = gamma / (sqrt(pi) xi) exp(-y^2 / xi^2) + |y / L|^p
//! ```
//!
//! and walls near `|y| = L`. Box coordinates are `x = 2y`; under this map the
//! barrier strength and `etaN` carry over unchanged while energies and
//! chemical potentials are twice their box values. Reported energies are
//! converted back to box units.
//!
//! Each step solves `(1 + dt (T + V + etaN psi_n^2)) psi_{n+1} = psi_n`
//! (backward Euler with the density lagged) and renormalizes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Half-width of the computational domain.
pub const DOMAIN_HALF_WIDTH: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridConfig {
    pub n_points: usize,
    pub dt: f64,
    pub t_max: f64,
    /// Gaussian barrier width.
    pub xi: f64,
    /// Wall exponent.
    pub p: f64,
    /// Wall scale.
    pub wall: f64,
    pub gamma: f64,
    pub eta_n: f64,
    /// Relative amplitude of the seeding noise.
    pub noise: f64,
    pub seed: u64,
}

impl GridConfig {
    pub fn new(gamma: f64, eta_n: f64) -> Self {
        Self {
            n_points: 256,
            dt: 0.0078125,
            t_max: 30.0,
            xi: 0.05,
            p: 1000.0,
            wall: 0.495,
            gamma,
            eta_n,
            noise: 1e-3,
            seed: 20_240_601,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.dt, self.t_max, self.xi, self.p, self.wall];
        if positive.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument("grid parameters must be positive and finite".into()));
        }
        if !self.n_points.is_power_of_two() || self.n_points < 16 {
            return Err(Error::InvalidArgument(format!(
                "grid size must be a power of two >= 16, got {}",
                self.n_points
            )));
        }
        if !(self.gamma >= 0.0) || !self.eta_n.is_finite() || !(self.noise >= 0.0) {
            return Err(Error::InvalidArgument("invalid barrier, interaction or noise".into()));
        }
        if self.wall >= DOMAIN_HALF_WIDTH {
            return Err(Error::InvalidArgument("walls must sit inside the domain".into()));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * DOMAIN_HALF_WIDTH / self.n_points as f64
    }

    /// Cell-centred nodes; none falls on the barrier.
    pub fn nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n_points)
            .map(|j| -DOMAIN_HALF_WIDTH + (j as f64 + 0.5) * h)
            .collect()
    }
}

/// Potential sampled on the grid nodes.
pub fn build_potential(config: &GridConfig) -> Vec<f64> {
    let norm = config.gamma / (std::f64::consts::PI.sqrt() * config.xi);
    config
        .nodes()
        .iter()
        .map(|&y| norm * (-(y * y) / (config.xi * config.xi)).exp() + (y / config.wall).abs().powf(config.p))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Seed {
    /// Lowest wall mode, exactly symmetric.
    Symmetric,
    /// Lowest wall mode times `1 + noise * N(0, 1)` per node.
    Noisy,
}

/// Relaxed state. Energies are per particle in box units.
#[derive(Debug, Clone, Serialize)]
pub struct GridState {
    /// Grid nodes in grid units.
    pub y: Vec<f64>,
    /// Amplitude normalized in grid units.
    pub psi: Vec<f64>,
    pub mu: f64,
    pub energy_per_particle: f64,
    /// `|P_left - P_right|`.
    pub z_asym: f64,
    /// Sign of `P_left - P_right` (`0` when balanced to rounding).
    pub dominant_side: i8,
}

impl GridState {
    /// `(x, psi(x))` in box units, normalized over the box coordinate.
    pub fn box_profile(&self) -> Vec<(f64, f64)> {
        let s = std::f64::consts::SQRT_2;
        self.y.iter().zip(&self.psi).map(|(y, p)| (2.0 * y, p / s)).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Frame {
    pub t: f64,
    pub density: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroundRun {
    pub state: GridState,
    /// `E/N` after every step (box units).
    pub energies: Vec<f64>,
    pub trajectory: Vec<Frame>,
    pub steps: usize,
    /// Final per-step change of `E/N` below `1e-10`.
    pub converged: bool,
}

struct Energetics {
    energy: f64,
    mu: f64,
}

fn energetics(psi: &[f64], v: &[f64], h: f64, eta_n: f64) -> Energetics {
    let n = psi.len();
    let mut kinetic = 0.0;
    for j in 0..=n {
        let left = if j == 0 { 0.0 } else { psi[j - 1] };
        let right = if j == n { 0.0 } else { psi[j] };
        kinetic += 0.5 * ((right - left) / h).powi(2) * h;
    }
    let potential: f64 = psi.iter().zip(v).map(|(p, v)| v * p * p * h).sum();
    let quartic: f64 = psi.iter().map(|p| p.powi(4) * h).sum();
    // Grid-unit energies are twice the box values.
    Energetics {
        energy: 0.5 * (kinetic + potential + 0.5 * eta_n * quartic),
        mu: 0.5 * (kinetic + potential + eta_n * quartic),
    }
}

fn normalize(psi: &mut [f64], h: f64) {
    let norm = (psi.iter().map(|p| p * p).sum::<f64>() * h).sqrt();
    for p in psi.iter_mut() {
        *p /= norm;
    }
}

/// Thomas algorithm for a symmetric tridiagonal system with constant off-diagonal.
fn solve_tridiagonal(diag: &[f64], off: f64, rhs: &mut [f64], scratch: &mut [f64]) {
    let n = diag.len();
    scratch[0] = off / diag[0];
    rhs[0] /= diag[0];
    for j in 1..n {
        let denom = diag[j] - off * scratch[j - 1];
        scratch[j] = off / denom;
        rhs[j] = (rhs[j] - off * rhs[j - 1]) / denom;
    }
    for j in (0..n - 1).rev() {
        rhs[j] -= scratch[j] * rhs[j + 1];
    }
}

/// Relaxes from the chosen seed to `t_max`, optionally recording `|psi|^2`
/// every `record_every` steps.
pub fn imaginary_time_ground(config: &GridConfig, seed: Seed, record_every: Option<usize>) -> Result<GroundRun> {
    config.validate()?;
    let h = config.spacing();
    let y = config.nodes();
    let v = build_potential(config);
    let mut psi: Vec<f64> = y
        .iter()
        .map(|&yy| {
            if yy.abs() < config.wall {
                (std::f64::consts::FRAC_PI_2 * yy / config.wall).cos()
            } else {
                0.0
            }
        })
        .collect();
    if seed == Seed::Noisy {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        for p in psi.iter_mut() {
            let g: f64 = StandardNormal.sample(&mut rng);
            *p *= 1.0 + config.noise * g;
        }
    }
    normalize(&mut psi, h);

    let steps = (config.t_max / config.dt).round() as usize;
    let off = -0.5 * config.dt / (h * h);
    let mut diag = vec![0.0; psi.len()];
    let mut scratch = vec![0.0; psi.len()];
    let mut energies = Vec::with_capacity(steps + 1);
    energies.push(energetics(&psi, &v, h, config.eta_n).energy);
    let mut trajectory = Vec::new();
    let record = |t: f64, psi: &[f64], out: &mut Vec<Frame>| {
        out.push(Frame {
            t,
            density: psi.iter().map(|p| p * p).collect(),
        })
    };
    if record_every.is_some() {
        record(0.0, &psi, &mut trajectory);
    }
    for step in 1..=steps {
        for j in 0..psi.len() {
            diag[j] = 1.0 + config.dt * (1.0 / (h * h) + v[j] + config.eta_n * psi[j] * psi[j]);
        }
        solve_tridiagonal(&diag, off, &mut psi, &mut scratch);
        normalize(&mut psi, h);
        energies.push(energetics(&psi, &v, h, config.eta_n).energy);
        if let Some(k) = record_every {
            if k > 0 && step % k == 0 {
                record(step as f64 * config.dt, &psi, &mut trajectory);
            }
        }
    }
    let fin = energetics(&psi, &v, h, config.eta_n);
    let last_change = match energies.len() {
        n if n >= 2 => (energies[n - 1] - energies[n - 2]).abs(),
        _ => f64::INFINITY,
    };
    let half = psi.len() / 2;
    let left: f64 = psi[..half].iter().map(|p| p * p * h).sum();
    let right: f64 = psi[half..].iter().map(|p| p * p * h).sum();
    let diff = left - right;
    Ok(GroundRun {
        state: GridState {
            y,
            psi,
            mu: fin.mu,
            energy_per_particle: fin.energy,
            z_asym: diff.abs(),
            dominant_side: if diff.abs() < 1e-12 { 0 } else { diff.signum() as i8 },
        },
        energies,
        trajectory,
        steps,
        converged: last_change < 1e-10,
    })
}

/// Kink located in a ground-state energy curve.
#[derive(Debug, Clone, Serialize)]
pub struct KinkScan {
    pub eta_n: Vec<f64>,
    pub energy_per_particle: Vec<f64>,
    /// Refined position of the kink, if one stands out.
    pub kink: Option<f64>,
}

/// Ground-state `E/N` over `etaN = from, from + step, ... , to` from noisy
/// seeds, and the position of the largest second difference.
pub fn kink_scan(base: &GridConfig, from: f64, to: f64, step: f64) -> Result<KinkScan> {
    if !(step > 0.0) {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    let count = ((to - from).abs() / step + 1e-9).floor() as usize + 1;
    let dir = if to >= from { 1.0 } else { -1.0 };
    let etas: Vec<f64> = (0..count).map(|i| from + dir * step * i as f64).collect();
    let energies = etas
        .par_iter()
        .map(|&eta| {
            let cfg = GridConfig { eta_n: eta, ..*base };
            imaginary_time_ground(&cfg, Seed::Noisy, None).map(|r| r.state.energy_per_particle)
        })
        .collect::<Result<Vec<f64>>>()?;
    let kink = locate_kink(&etas, &energies);
    Ok(KinkScan {
        eta_n: etas,
        energy_per_particle: energies,
        kink,
    })
}

/// `etaN` of the kink in `E/N` for barrier strength `gamma`, or `None` when
/// the curve is smooth over the range.
pub fn kink_critical(gamma: f64, from: f64, to: f64, step: f64) -> Result<Option<f64>> {
    Ok(kink_scan(&GridConfig::new(gamma, from), from, to, step)?.kink)
}

/// Peak of `|second difference|`, refined by a parabola through the peak and
/// its neighbours. The peak must exceed ten times the median.
pub fn locate_kink(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 5 {
        return None;
    }
    let d2: Vec<f64> = (1..x.len() - 1).map(|i| (y[i + 1] - 2.0 * y[i] + y[i - 1]).abs()).collect();
    let mut sorted = d2.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[sorted.len() / 2];
    let (imax, &peak) = d2.iter().enumerate().max_by(|a, b| a.1.partial_cmp(b.1).unwrap())?;
    if !(peak > 10.0 * median) || peak == 0.0 {
        return None;
    }
    let centre = x[imax + 1];
    if imax == 0 || imax + 1 == d2.len() {
        return Some(centre);
    }
    let (a, b, c) = (d2[imax - 1], d2[imax], d2[imax + 1]);
    let denom = a - 2.0 * b + c;
    let offset = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
    let spacing = x[imax + 2] - x[imax + 1];
    Some(centre + offset.clamp(-1.0, 1.0) * spacing)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_pieces() {
        let cfg = GridConfig::new(10.0, 0.0);
        let v = build_potential(&cfg);
        // Barrier height at the origin (half a cell off the node).
        let y0 = cfg.nodes()[cfg.n_points / 2];
        let barrier = 10.0 / (std::f64::consts::PI.sqrt() * 0.05) * (-(y0 * y0) / 0.0025).exp();
        assert!((v[cfg.n_points / 2] - barrier - (y0 / 0.495).abs().powf(1000.0)).abs() < 1e-12);
        assert!((10.0 / (std::f64::consts::PI.sqrt() * 0.05) - 112.838).abs() < 1e-3);
        let free = build_potential(&GridConfig::new(0.0, 0.0));
        let min = free.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((0.0..1e-12).contains(&min));
    }

    #[test]
    fn discrete_barrier_integrates_to_strength() {
        let cfg = GridConfig {
            n_points: 4096,
            ..GridConfig::new(10.0, 0.0)
        };
        let h = cfg.spacing();
        let norm = 10.0 / (std::f64::consts::PI.sqrt() * cfg.xi);
        let total: f64 = cfg.nodes().iter().map(|y| norm * (-(y * y) / (cfg.xi * cfg.xi)).exp() * h).sum();
        assert!((total - 10.0).abs() < 1e-6);
    }

    #[test]
    fn config_validation() {
        let mut cfg = GridConfig::new(10.0, 1.0);
        cfg.n_points = 300;
        assert!(imaginary_time_ground(&cfg, Seed::Symmetric, None).is_err());
        cfg.n_points = 256;
        cfg.dt = -1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn tridiagonal_solver_matches_dense() {
        let diag = vec![4.0, 5.0, 6.0, 7.0];
        let off = -1.0;
        let mut rhs = vec![1.0, 2.0, 3.0, 4.0];
        let mut scratch = vec![0.0; 4];
        solve_tridiagonal(&diag, off, &mut rhs, &mut scratch);
        let mut dense = vec![0.0; 16];
        for i in 0..4 {
            dense[i * 4 + i] = diag[i];
            if i > 0 {
                dense[i * 4 + i - 1] = off;
                dense[(i - 1) * 4 + i] = off;
            }
        }
        let mut b = vec![1.0, 2.0, 3.0, 4.0];
        crate::roots::solve_dense(&mut dense, &mut b).unwrap();
        for i in 0..4 {
            assert!((rhs[i] - b[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn kink_detection_on_synthetic_curve() {
        let x: Vec<f64> = (0..61).map(|i| -4.0 + 0.05 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|&e| if e < -2.0 { 0.3 * (e + 2.0) } else { 0.0 } + 0.01 * e).collect();
        let k = locate_kink(&x, &y).unwrap();
        assert!((k + 2.0).abs() < 0.05);
        let smooth: Vec<f64> = x.iter().map(|e| 0.1 * e * e).collect();
        assert!(locate_kink(&x, &smooth).is_none());
    }
}
