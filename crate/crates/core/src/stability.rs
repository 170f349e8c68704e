//! Bogoliubov-de Gennes spectra in a truncated basis of linear modes.
//!
//! With `f = u + v` and `g = u - v` the linearized equations become
//!
//! ```text
//! M3 f = lambda g,   M1 g = lambda f
//! M3 = diag(e - mu) + 3 Omega,   M1 = diag(e - mu) + Omega
//! Omega_ab = etaN integral phi_a psi^2 phi_b
//! ```
//!
//! so `lambda^2` are the eigenvalues of `M1 M3`. A state is stable when every
//! `lambda` is real. The gauge (phase) mode, whose left eigenvector is the
//! state's own coefficient vector, is excluded from the classification.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::eigen::{eigenvalues, eigenvector, Matrix};
use crate::error::{Error, Result};
use crate::exact_states::{self, ExactState, Family};
use crate::linear_modes::{basis, LinearMode};
use crate::quadrature::GaussLegendre;

/// Default truncation.
pub const DEFAULT_BASIS: usize = 6;
/// Default tolerance on `|Im lambda|`.
pub const DEFAULT_TOL: f64 = 1e-6;

const PANELS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Stable,
    NonOscillatoryUnstable,
    OscillatoryUnstable,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::Stable => "stable",
            Classification::NonOscillatoryUnstable => "non_oscillatory_unstable",
            Classification::OscillatoryUnstable => "oscillatory_unstable",
        }
    }
}

/// One excitation with its `(u, v)` coefficient vectors.
#[derive(Debug, Clone, Serialize)]
pub struct BdgMode {
    pub lambda: Complex<f64>,
    pub u: Vec<Complex<f64>>,
    pub v: Vec<Complex<f64>>,
    /// True when scaled so that `sum(|u|^2 - |v|^2) = 1`; only possible for
    /// real, nonzero `lambda`.
    pub normalized: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilitySpectrum {
    pub basis_size: usize,
    pub mu: f64,
    pub lambda_squared: Vec<Complex<f64>>,
    /// `lambda` with `Re >= 0` for each entry of `lambda_squared`, followed by its partner `-lambda`.
    pub lambda: Vec<Complex<f64>>,
    /// Index into `lambda_squared` of the gauge mode.
    pub phase_mode: Option<usize>,
    pub classification: Classification,
    pub modes: Vec<BdgMode>,
    /// Set when the basis is too small to resolve every kind of instability.
    pub warning: Option<String>,
}

impl StabilitySpectrum {
    /// Non-gauge frequencies with `Re >= 0`, ordered by modulus.
    pub fn frequencies(&self) -> Vec<Complex<f64>> {
        let mut out: Vec<Complex<f64>> = self
            .lambda_squared
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != self.phase_mode)
            .map(|(_, l2)| principal_sqrt(*l2))
            .collect();
        out.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap_or(std::cmp::Ordering::Equal));
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BdgOptions {
    pub basis_size: usize,
    pub tol: f64,
    /// Compute `(u, v)` vectors.
    pub modes: bool,
}

impl Default for BdgOptions {
    fn default() -> Self {
        Self {
            basis_size: DEFAULT_BASIS,
            tol: DEFAULT_TOL,
            modes: false,
        }
    }
}

fn principal_sqrt(z: Complex<f64>) -> Complex<f64> {
    let r = z.sqrt();
    if r.re < 0.0 {
        -r
    } else {
        r
    }
}

/// Samples a profile and the basis on a composite quadrature grid.
struct Grid {
    weights: Vec<f64>,
    psi: Vec<f64>,
    density: Vec<f64>,
    modes: Vec<Vec<f64>>,
}

impl Grid {
    fn new(psi: &dyn Fn(f64) -> f64, modes: &[LinearMode<f64>]) -> Self {
        let gl = GaussLegendre::<f64>::new(64);
        let mut xs = Vec::new();
        let mut weights = Vec::new();
        for (lo, hi) in [(-1.0, 0.0), (0.0, 1.0)] {
            let width = (hi - lo) / PANELS as f64;
            for p in 0..PANELS {
                let a = lo + width * p as f64;
                for (x, w) in gl.points(a, a + width) {
                    xs.push(x);
                    weights.push(w);
                }
            }
        }
        let psi: Vec<f64> = xs.iter().map(|&x| psi(x)).collect();
        let density = psi.iter().map(|p| p * p).collect();
        let modes = modes.iter().map(|m| xs.iter().map(|&x| m.eval(x)).collect()).collect();
        Self {
            weights,
            psi,
            density,
            modes,
        }
    }

    fn overlap(&self, a: usize, b: usize, with_density: bool) -> f64 {
        let (fa, fb) = (&self.modes[a], &self.modes[b]);
        (0..self.weights.len())
            .map(|i| {
                let d = if with_density { self.density[i] } else { 1.0 };
                self.weights[i] * fa[i] * d * fb[i]
            })
            .sum()
    }
}

/// `Omega_ab = etaN integral phi_a psi^2 phi_b`, split at the barrier.
pub fn build_interaction_matrix(state: &ExactState, modes: &[LinearMode<f64>]) -> Result<Matrix<f64>> {
    let sampler = state.sampler()?;
    let grid = Grid::new(&|x| sampler.eval(x), modes);
    Ok(interaction(&grid, state.eta_n))
}

fn interaction(grid: &Grid, eta_n: f64) -> Matrix<f64> {
    let n = grid.modes.len();
    let mut m = Matrix::zeros(n, n);
    for a in 0..n {
        for b in 0..=a {
            let v = eta_n * grid.overlap(a, b, true);
            m.set(a, b, v);
            m.set(b, a, v);
        }
    }
    m
}

/// Spectrum of an exact state with the default options.
pub fn bdg_spectrum(state: &ExactState, basis_size: usize) -> Result<StabilitySpectrum> {
    bdg_spectrum_with(
        state,
        &BdgOptions {
            basis_size,
            ..BdgOptions::default()
        },
    )
}

pub fn bdg_spectrum_with(state: &ExactState, opts: &BdgOptions) -> Result<StabilitySpectrum> {
    let sampler = state.sampler()?;
    spectrum_of_profile(&|x| sampler.eval(x), state.mu, state.eta_n, state.gamma, opts)
}

/// Spectrum of an arbitrary real profile `psi` with chemical potential `mu`.
pub fn spectrum_of_profile(
    psi: &dyn Fn(f64) -> f64,
    mu: f64,
    eta_n: f64,
    gamma: f64,
    opts: &BdgOptions,
) -> Result<StabilitySpectrum> {
    let modes = basis(gamma, opts.basis_size)?;
    let n = modes.len();
    let grid = Grid::new(psi, &modes);
    let omega = interaction(&grid, eta_n);
    let diag = |i: usize, j: usize| if i == j { modes[i].energy - mu } else { 0.0 };
    let m1 = Matrix::from_fn(n, n, |i, j| diag(i, j) + omega.get(i, j));
    let m3 = Matrix::from_fn(n, n, |i, j| diag(i, j) + 3.0 * omega.get(i, j));
    let product = m1.matmul(&m3);
    let lambda_squared = eigenvalues(&product)?;

    // State coefficients: the left null vector of M1 M3 in the untruncated problem.
    let coeffs: Vec<f64> = (0..n)
        .map(|a| (0..grid.weights.len()).map(|i| grid.weights[i] * grid.modes[a][i] * grid.psi[i]).sum())
        .collect();
    let coeffs = if coeffs.iter().all(|c| *c == 0.0) { None } else { Some(coeffs) };
    let phase_mode = match &coeffs {
        Some(c) => identify_phase_mode(&product.transpose(), &lambda_squared, c)?,
        None => None,
    };

    let mut lambda = Vec::with_capacity(2 * n);
    for l2 in &lambda_squared {
        let l = principal_sqrt(*l2);
        lambda.push(l);
        lambda.push(-l);
    }
    let relevant: Vec<Complex<f64>> = lambda_squared
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != phase_mode)
        .map(|(_, l2)| principal_sqrt(*l2))
        .collect();
    let classification = classify(&relevant, opts.tol);

    let modes_out = if opts.modes {
        lambda_squared
            .iter()
            .map(|l2| excitation(&product, &m3, *l2))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let warning = (n < 3).then(|| "basis of fewer than three modes cannot show oscillatory instability".to_string());
    Ok(StabilitySpectrum {
        basis_size: n,
        mu,
        lambda_squared,
        lambda,
        phase_mode,
        classification,
        modes: modes_out,
        warning,
    })
}

fn classify(freqs: &[Complex<f64>], tol: f64) -> Classification {
    let unstable: Vec<&Complex<f64>> = freqs.iter().filter(|l| l.im.abs() > tol).collect();
    if unstable.is_empty() {
        Classification::Stable
    } else if unstable.iter().any(|l| l.re.abs() > tol) {
        Classification::OscillatoryUnstable
    } else {
        Classification::NonOscillatoryUnstable
    }
}

fn identify_phase_mode(
    transposed: &Matrix<f64>,
    lambda_squared: &[Complex<f64>],
    coeffs: &[f64],
) -> Result<Option<usize>> {
    let cnorm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    let mut best = (None, 0.0);
    for (i, l2) in lambda_squared.iter().enumerate() {
        let Ok(y) = eigenvector(transposed, *l2) else { continue };
        let dot: Complex<f64> = y.iter().zip(coeffs).map(|(a, c)| a * c).sum();
        let overlap = dot.norm() / cnorm;
        if overlap > best.1 {
            best = (Some(i), overlap);
        }
    }
    Ok(best.0)
}

fn excitation(product: &Matrix<f64>, m3: &Matrix<f64>, l2: Complex<f64>) -> Result<BdgMode> {
    let n = product.rows();
    let mut lambda = principal_sqrt(l2);
    let f = eigenvector(product, l2)?;
    let m3f: Vec<Complex<f64>> = (0..n)
        .map(|i| (0..n).map(|j| f[j] * m3.get(i, j)).sum())
        .collect();
    let real_nonzero = lambda.im.abs() < 1e-9 * (1.0 + lambda.norm()) && lambda.norm() > 1e-9;
    if !real_nonzero {
        let g: Vec<Complex<f64>> = if lambda.norm() > 0.0 { m3f.iter().map(|v| v / lambda).collect() } else { m3f };
        return Ok(BdgMode {
            lambda,
            u: f.iter().zip(&g).map(|(a, b)| (a + b) / 2.0).collect(),
            v: f.iter().zip(&g).map(|(a, b)| (a - b) / 2.0).collect(),
            normalized: false,
        });
    }
    // sum(u^2 - v^2) = sum(f g) = f^T M3 f / lambda; flip lambda if negative.
    let fm3f: f64 = f.iter().zip(&m3f).map(|(a, b)| (a.conj() * b).re).sum();
    let mut norm = fm3f / lambda.re;
    if norm < 0.0 {
        lambda = -lambda;
        norm = -norm;
    }
    let scale = 1.0 / norm.sqrt();
    let g: Vec<Complex<f64>> = m3f.iter().map(|v| v / lambda).collect();
    Ok(BdgMode {
        lambda,
        u: f.iter().zip(&g).map(|(a, b)| (a + b) * (scale / 2.0)).collect(),
        v: f.iter().zip(&g).map(|(a, b)| (a - b) * (scale / 2.0)).collect(),
        normalized: true,
    })
}

/// Sign-changing point of the classification along a branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Threshold {
    pub eta_n: f64,
    pub before: Classification,
    pub after: Classification,
}

/// One row of a stability sweep.
#[derive(Debug, Clone)]
pub struct StabilityPoint {
    pub eta_n: f64,
    pub spectrum: Result<StabilitySpectrum>,
}

/// Solves the branch along the grid, then computes spectra in parallel.
/// Output order follows the grid.
pub fn stability_sweep(
    family: Family,
    gamma: f64,
    from: f64,
    to: f64,
    step: f64,
    branch: usize,
    opts: &BdgOptions,
) -> Result<Vec<StabilityPoint>> {
    let states = exact_states::continuation_sweep(family, gamma, from, to, step, branch)?;
    Ok(states
        .into_par_iter()
        .map(|p| StabilityPoint {
            eta_n: p.eta_n,
            spectrum: p.state.and_then(|s| bdg_spectrum_with(&s, opts)),
        })
        .collect())
}

/// Classification changes along a branch over `[from, to]`, located by
/// bisection to `resolution` in `etaN`.
pub fn instability_thresholds(
    family: Family,
    gamma: f64,
    from: f64,
    to: f64,
    step: f64,
    branch: usize,
    opts: &BdgOptions,
    resolution: f64,
) -> Result<Vec<Threshold>> {
    let sweep = exact_states::continuation_sweep(family, gamma, from, to, step, branch)?;
    let classes: Vec<Option<(ExactState, Classification)>> = sweep
        .into_par_iter()
        .map(|p| {
            let s = p.state.ok()?;
            let c = bdg_spectrum_with(&s, opts).ok()?.classification;
            Some((s, c))
        })
        .collect();
    let mut out = Vec::new();
    for w in classes.windows(2) {
        let (Some((sa, ca)), Some((sb, cb))) = (&w[0], &w[1]) else { continue };
        if ca == cb {
            continue;
        }
        let (mut lo, mut hi) = (sa.eta_n, sb.eta_n);
        while (hi - lo).abs() > resolution {
            let mid = 0.5 * (lo + hi);
            let c = exact_states::solve(family, gamma, mid, branch)
                .and_then(|s| bdg_spectrum_with(&s, opts))
                .map(|s| s.classification);
            match c {
                Ok(c) if c == *ca => lo = mid,
                Ok(_) => hi = mid,
                Err(_) => break,
            }
        }
        out.push(Threshold {
            eta_n: 0.5 * (lo + hi),
            before: *ca,
            after: *cb,
        });
    }
    Ok(out)
}

/// Scan settings for [`coalescence_gamma`].
#[derive(Debug, Clone, Copy)]
pub struct CoalescencePolicy {
    /// Most attractive `etaN` scanned.
    pub eta_min: f64,
    /// Least attractive `etaN` scanned.
    pub eta_max: f64,
    pub eta_step: f64,
    pub basis_size: usize,
    pub gamma_lo: f64,
    pub gamma_hi: f64,
    /// Final bracket width in `gamma`.
    pub resolution: f64,
}

impl Default for CoalescencePolicy {
    fn default() -> Self {
        Self {
            eta_min: -60.0,
            eta_max: -1.0,
            eta_step: 1.0,
            basis_size: 24,
            gamma_lo: 1.0,
            gamma_hi: 10.0,
            resolution: 0.05,
        }
    }
}

/// Signed separation of the two lowest excitation frequencies of the
/// antisymmetric attractive state: their gap when both are real, minus the
/// imaginary part once they have merged into a complex pair.
pub fn lowest_pair_gap(gamma: f64, eta_n: f64, basis_size: usize) -> Result<f64> {
    let state = exact_states::solve_antisym_attractive(gamma, eta_n, 1)?;
    let spec = bdg_spectrum(&state, basis_size)?;
    let f = spec.frequencies();
    if f.len() < 2 {
        return Err(Error::InvalidArgument("need at least two excitations".into()));
    }
    if f[0].im.abs() > DEFAULT_TOL {
        return Ok(-f[0].im.abs());
    }
    Ok(f[1].re - f[0].re)
}

/// Smallest signed gap over the `etaN` scan (refined around the discrete minimum).
pub fn minimum_gap(gamma: f64, policy: &CoalescencePolicy) -> Result<(f64, f64)> {
    let count = ((policy.eta_max - policy.eta_min) / policy.eta_step).round() as usize;
    let etas: Vec<f64> = (0..=count).map(|i| policy.eta_max - policy.eta_step * i as f64).collect();
    let gaps: Vec<f64> = etas
        .par_iter()
        .map(|&e| lowest_pair_gap(gamma, e, policy.basis_size).unwrap_or(f64::INFINITY))
        .collect();
    let (imin, _) = gaps
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .ok_or(Error::InvalidArgument("empty scan".into()))?;
    // Golden-section refinement inside the neighbouring grid cells.
    let lo = (etas[imin] - policy.eta_step).max(policy.eta_min);
    let hi = (etas[imin] + policy.eta_step).min(policy.eta_max);
    let g = |e: f64| lowest_pair_gap(gamma, e, policy.basis_size).unwrap_or(f64::INFINITY);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..30 {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - ratio * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + ratio * (b - a);
            gd = g(d);
        }
    }
    let (eta, gap) = if gc < gd { (c, gc) } else { (d, gd) };
    if gaps[imin] < gap {
        Ok((etas[imin], gaps[imin]))
    } else {
        Ok((eta, gap))
    }
}

/// Barrier strength at which the two lowest excitation frequencies of the
/// antisymmetric attractive branch first touch. Below it they merge into a
/// complex pair (oscillatory instability).
pub fn coalescence_gamma(policy: &CoalescencePolicy) -> Result<f64> {
    let gap = |g: f64| minimum_gap(g, policy).map(|(_, v)| v);
    let (mut lo, mut hi) = (policy.gamma_lo, policy.gamma_hi);
    let (glo, ghi) = (gap(lo)?, gap(hi)?);
    if (glo < 0.0) == (ghi < 0.0) {
        return Err(Error::NoBracket("coalescence barrier strength"));
    }
    let lo_merged = glo < 0.0;
    while hi - lo > policy.resolution {
        let mid = 0.5 * (lo + hi);
        if (gap(mid)? < 0.0) == lo_merged {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
