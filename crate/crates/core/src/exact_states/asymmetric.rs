//! Asymmetric states, found by branch switching at the pitchfork where they
//! split off a symmetric or antisymmetric parent branch.
//!
//! Unknowns are `(kL, mL, kR, mR)`; the amplitudes follow from the amplitude
//! relations and `sigma = +-1` fixes the sign of the right side relative to
//! the left. The barrier term of the jump condition uses the mean of the two
//! one-sided values of `psi(0)`, which keeps the system equivariant under the
//! left/right swap so the parent branch's Jacobian splits into a symmetric
//! and an antisymmetric block. The pitchfork is where the antisymmetric
//! block becomes singular.

use std::sync::{Mutex, OnceLock};

use super::families::solve_symmetric_seeded;
use super::profile::{self, Interaction};
use super::{check_inputs, ExactState, Family, SideParams};
use crate::elliptic::Elliptic;
use crate::error::{Error, Result};
use crate::roots::{bisect, max_abs, newton, NewtonOptions};

const SCAN_STEP: f64 = 0.05;
const SCAN_LIMIT: f64 = 100.0;
const COLLAPSE: f64 = 1e-7;
const FD: f64 = 1e-7;
const MAX_ARC_STEPS: usize = 20_000;

/// A pitchfork on a parent branch.
#[derive(Debug, Clone)]
pub struct Bifurcation {
    pub eta_n: f64,
    pub parent: ExactState,
    /// Unit vector along the asymmetric direction `(dk, dm, -dk, -dm)`.
    pub direction: [f64; 4],
}

fn residual(kind: Interaction, sigma: f64, gamma: f64, eta_n: f64, x: &[f64]) -> Option<Vec<f64>> {
    let (kl, ml, kr, mr) = (x[0], x[1], x[2], x[3]);
    let valid = |k: f64, m: f64| k > 0.0 && m > 0.0 && m < 1.0 - 1e-12;
    if !valid(kl, ml) || !valid(kr, mr) {
        return None;
    }
    let tl = Elliptic::new(ml).ok()?;
    let tr = Elliptic::new(mr).ok()?;
    let pl = profile::point(kind, &tl, kl);
    let pr = profile::point(kind, &tr, kr);
    let al = profile::amplitude(kl, ml, eta_n);
    let ar = sigma * profile::amplitude(kr, mr, eta_n);
    let (psi_l, psi_r) = (al * pl.f, ar * pr.f);
    Some(vec![
        psi_l - psi_r,
        -ar * kr * pr.df - al * kl * pl.df - gamma * 0.5 * (psi_l + psi_r),
        profile::chemical_potential(kind, kl, ml) - profile::chemical_potential(kind, kr, mr),
        2.0 * (kl * pl.weight + kr * pr.weight) / eta_n.abs() - 1.0,
    ])
}

fn sigma_of(parent: Family) -> f64 {
    match parent {
        Family::SymRep | Family::SymAtt => 1.0,
        _ => -1.0,
    }
}

/// Rows of the residual that are odd under the swap.
fn odd_rows(sigma: f64) -> [usize; 2] {
    if sigma > 0.0 {
        [0, 2]
    } else {
        [1, 2]
    }
}

/// Antisymmetric block of the Jacobian at a parent state.
fn antisymmetric_block(parent: &ExactState, sigma: f64) -> Option<[f64; 4]> {
    let kind = parent.interaction();
    let x = [parent.left.k, parent.left.m, parent.right.k, parent.right.m];
    let rows = odd_rows(sigma);
    let mut block = [0.0; 4];
    for (col, dir) in [[1.0, 0.0, -1.0, 0.0], [0.0, 1.0, 0.0, -1.0]].iter().enumerate() {
        let plus: Vec<f64> = x.iter().zip(dir).map(|(a, d)| a + FD * d).collect();
        let minus: Vec<f64> = x.iter().zip(dir).map(|(a, d)| a - FD * d).collect();
        let rp = residual(kind, sigma, parent.gamma, parent.eta_n, &plus)?;
        let rm = residual(kind, sigma, parent.gamma, parent.eta_n, &minus)?;
        for (r, &row) in rows.iter().enumerate() {
            block[r * 2 + col] = (rp[row] - rm[row]) / (2.0 * FD);
        }
    }
    Some(block)
}

fn block_det(b: &[f64; 4]) -> f64 {
    b[0] * b[3] - b[1] * b[2]
}

fn solve_parent(parent: Family, gamma: f64, eta_n: f64, branch: usize, seed: Option<&ExactState>) -> Result<ExactState> {
    match parent {
        Family::SymRep | Family::SymAtt => solve_symmetric_seeded(parent, gamma, eta_n, branch, seed),
        Family::AntisymRep => super::solve_antisym_repulsive(gamma, eta_n, branch),
        Family::AntisymAtt => super::solve_antisym_attractive(gamma, eta_n, branch),
        _ => Err(Error::InvalidArgument(format!("{parent} is not a parent family"))),
    }
}

type CacheKey = (Family, u64, usize);

fn cache() -> &'static Mutex<Vec<(CacheKey, Bifurcation)>> {
    static CACHE: OnceLock<Mutex<Vec<(CacheKey, Bifurcation)>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(Vec::new()))
}

/// Locates the first pitchfork on the parent branch `(parent, branch)` by
/// scanning `|etaN|` outward from zero.
pub fn bifurcation(parent: Family, gamma: f64, branch: usize) -> Result<Bifurcation> {
    if parent.is_asymmetric() {
        return Err(Error::InvalidArgument(format!("{parent} is not a parent family")));
    }
    let key = (parent, gamma.to_bits(), branch);
    if let Some((_, b)) = cache().lock().unwrap().iter().find(|(k, _)| *k == key) {
        return Ok(b.clone());
    }
    let found = locate(parent, gamma, branch)?;
    cache().lock().unwrap().push((key, found.clone()));
    Ok(found)
}

fn locate(parent: Family, gamma: f64, branch: usize) -> Result<Bifurcation> {
    let sign = match parent.interaction() {
        Interaction::Repulsive => 1.0,
        Interaction::Attractive => -1.0,
    };
    let sigma = sigma_of(parent);
    let det_at = |state: &ExactState| antisymmetric_block(state, sigma).map(|b| block_det(&b));

    let mut eta = sign * SCAN_STEP;
    let mut prev = solve_parent(parent, gamma, eta, branch, None)?;
    let mut prev_det = det_at(&prev).ok_or(Error::Singular)?;
    let (lo, hi) = loop {
        let next_eta = eta + sign * SCAN_STEP;
        if next_eta.abs() > SCAN_LIMIT {
            return Err(Error::NoBracket("pitchfork on the parent branch"));
        }
        let next = solve_parent(parent, gamma, next_eta, branch, Some(&prev))?;
        let d = det_at(&next).ok_or(Error::Singular)?;
        if d.signum() != prev_det.signum() {
            break (prev, next);
        }
        eta = next_eta;
        prev = next;
        prev_det = d;
    };

    let lo_det = prev_det;
    let det_on = |e: f64| -> f64 {
        solve_parent(parent, gamma, e, branch, Some(&lo))
            .ok()
            .and_then(|s| det_at(&s))
            .map(|d| d * lo_det.signum())
            .unwrap_or(f64::NAN)
    };
    let eta_c = bisect(det_on, lo.eta_n, hi.eta_n, 1e-12)?;
    let parent_state = solve_parent(parent, gamma, eta_c, branch, Some(&lo))?;
    let block = antisymmetric_block(&parent_state, sigma).ok_or(Error::Singular)?;
    // Null vector of the (nearly) singular 2x2 block.
    let cand = [[block[1], -block[0]], [block[3], -block[2]]];
    let v = if cand[0][0].hypot(cand[0][1]) >= cand[1][0].hypot(cand[1][1]) { cand[0] } else { cand[1] };
    let n = (2.0 * (v[0] * v[0] + v[1] * v[1])).sqrt();
    Ok(Bifurcation {
        eta_n: eta_c,
        parent: parent_state,
        direction: [v[0] / n, v[1] / n, -v[0] / n, -v[1] / n],
    })
}

/// Pseudo-arclength continuation from the pitchfork to `target`.
fn trace(kind: Interaction, sigma: f64, gamma: f64, bif: &Bifurcation, target: f64) -> Result<[f64; 4]> {
    let p = &bif.parent;
    let mut x = [p.left.k, p.left.m, p.right.k, p.right.m, bif.eta_n];
    let mut tangent = [bif.direction[0], bif.direction[1], bif.direction[2], bif.direction[3], 0.0];
    let mut ds = 0.01;
    let ds_max = 0.2;
    let opts = NewtonOptions {
        tol: 1e-11,
        max_iter: 12,
        fd_step: FD,
    };
    for _ in 0..MAX_ARC_STEPS {
        let predicted: Vec<f64> = x.iter().zip(&tangent).map(|(a, t)| a + ds * t).collect();
        let t = tangent;
        let xp = predicted.clone();
        let system = |y: &[f64]| -> Option<Vec<f64>> {
            let mut r = residual(kind, sigma, gamma, y[4], &y[..4])?;
            if y[4] * target <= 0.0 {
                return None;
            }
            r.push((0..5).map(|i| t[i] * (y[i] - xp[i])).sum());
            Some(r)
        };
        let Ok(rep) = newton(system, &predicted, &opts) else {
            ds *= 0.5;
            if ds < 1e-7 {
                break;
            }
            continue;
        };
        let y: [f64; 5] = rep.x.try_into().expect("five unknowns");
        if (y[4] - target) * (x[4] - target) <= 0.0 {
            let w = (target - x[4]) / (y[4] - x[4]);
            let guess: Vec<f64> = (0..4).map(|i| x[i] + w * (y[i] - x[i])).collect();
            let fixed = newton(
                |z| residual(kind, sigma, gamma, target, z),
                &guess,
                &NewtonOptions::default(),
            )?;
            return Ok(fixed.x.try_into().expect("four unknowns"));
        }
        let diff: Vec<f64> = (0..5).map(|i| y[i] - x[i]).collect();
        let len = diff.iter().map(|d| d * d).sum::<f64>().sqrt();
        for i in 0..5 {
            tangent[i] = diff[i] / len;
        }
        x = y;
        ds = (ds * 1.3).min(ds_max);
    }
    Err(Error::NoConvergence {
        what: "asymmetric branch continuation",
        iterations: MAX_ARC_STEPS,
        residual: (x[4] - target).abs(),
    })
}

fn collapsed(x: &[f64]) -> bool {
    (x[0] - x[2]).abs() + (x[1] - x[3]).abs() < COLLAPSE
}

fn build(family: Family, gamma: f64, eta_n: f64, branch: usize, sigma: f64, x: &[f64]) -> Result<ExactState> {
    let left = SideParams {
        amplitude: profile::amplitude(x[0], x[1], eta_n),
        k: x[0],
        m: x[1],
    };
    let right = SideParams {
        amplitude: sigma * profile::amplitude(x[2], x[3], eta_n),
        k: x[2],
        m: x[3],
    };
    let state = ExactState::assemble(family, gamma, eta_n, branch, left, right)?;
    // Orient so the larger peak sits on the left.
    let s = state.sampler()?;
    let peak = |lo: f64| (0..400).map(|i| s.eval(lo + (i as f64 + 0.5) / 400.0).abs()).fold(0.0, f64::max);
    let left_peak = peak(-1.0);
    let right_peak = peak(0.0);
    Ok(if right_peak > left_peak { state.mirrored() } else { state })
}

fn default_parent(family: Family) -> Family {
    match family {
        Family::AsymAtt => Family::SymAtt,
        _ => Family::AntisymRep,
    }
}

fn solve_asym(family: Family, gamma: f64, eta_n: f64, seed: Option<&ExactState>) -> Result<ExactState> {
    let kind = family.interaction();
    check_inputs(kind, gamma, eta_n)?;
    let (mut parent, mut branch) = (default_parent(family), 1);
    match seed {
        Some(s) if s.family == family => {
            if let Ok(state) = refine_asymmetric(gamma, eta_n, s) {
                return Ok(state);
            }
            let sigma = if s.right.amplitude < 0.0 { -1.0 } else { 1.0 };
            branch = s.branch;
            parent = if sigma > 0.0 {
                default_parent(Family::AsymAtt).with_interaction(kind)
            } else {
                default_parent(Family::AsymRep).with_interaction(kind)
            };
        }
        Some(s) if !s.family.is_asymmetric() && s.interaction() == kind => {
            parent = s.family;
            branch = s.branch;
        }
        _ => {}
    }
    let bif = bifurcation(parent, gamma, branch)?;
    if eta_n.abs() <= bif.eta_n.abs() {
        return Err(Error::BelowBifurcation {
            eta_n,
            threshold: bif.eta_n,
        });
    }
    let sigma = sigma_of(parent);
    let x = trace(kind, sigma, gamma, &bif, eta_n)?;
    if collapsed(&x) {
        return Err(Error::BelowBifurcation {
            eta_n,
            threshold: bif.eta_n,
        });
    }
    let r = residual(kind, sigma, gamma, eta_n, &x).ok_or(Error::Singular)?;
    if max_abs(&r) > 1e-10 {
        return Err(Error::NoConvergence {
            what: "asymmetric state",
            iterations: 0,
            residual: max_abs(&r),
        });
    }
    build(family, gamma, eta_n, branch, sigma, &x)
}

/// Newton refinement of an asymmetric guess at `etaN`, without falling back
/// to branch switching. Fails if the iteration converges onto a symmetric or
/// antisymmetric state.
pub fn refine_asymmetric(gamma: f64, eta_n: f64, guess: &ExactState) -> Result<ExactState> {
    let family = guess.family;
    if !family.is_asymmetric() {
        return Err(Error::InvalidArgument(format!("{family} is not an asymmetric family")));
    }
    let kind = family.interaction();
    check_inputs(kind, gamma, eta_n)?;
    let sigma = if guess.right.amplitude < 0.0 { -1.0 } else { 1.0 };
    let x0 = [guess.left.k, guess.left.m, guess.right.k, guess.right.m];
    let rep = newton(|z| residual(kind, sigma, gamma, eta_n, z), &x0, &NewtonOptions::default())?;
    if collapsed(&rep.x) {
        return Err(Error::NoConvergence {
            what: "asymmetric refinement (collapsed onto a parity state)",
            iterations: rep.iterations,
            residual: 0.0,
        });
    }
    build(family, gamma, eta_n, guess.branch, sigma, &rep.x)
}

impl Family {
    fn with_interaction(self, kind: Interaction) -> Family {
        match (self, kind) {
            (Family::SymAtt | Family::SymRep, Interaction::Attractive) => Family::SymAtt,
            (Family::SymAtt | Family::SymRep, Interaction::Repulsive) => Family::SymRep,
            (_, Interaction::Attractive) => Family::AntisymAtt,
            (_, Interaction::Repulsive) => Family::AntisymRep,
        }
    }
}

/// Asymmetric attractive state. Without a seed the branch is switched onto at
/// the pitchfork of the lowest symmetric branch. A symmetric or antisymmetric
/// seed selects a different parent branch; an asymmetric seed is refined
/// directly.
pub fn solve_asym_attractive(gamma: f64, eta_n: f64, seed: Option<&ExactState>) -> Result<ExactState> {
    solve_asym(Family::AsymAtt, gamma, eta_n, seed)
}

/// Asymmetric repulsive state, by default from the pitchfork of the lowest
/// antisymmetric branch. Seeds behave as for [`solve_asym_attractive`].
pub fn solve_asym_repulsive(gamma: f64, eta_n: f64, seed: Option<&ExactState>) -> Result<ExactState> {
    solve_asym(Family::AsymRep, gamma, eta_n, seed)
}

