//! Symmetric and antisymmetric families.

use super::profile::{self, Interaction};
use super::{check_inputs, ExactState, Family, SideParams};
use crate::elliptic::Elliptic;
use crate::error::{Error, Result};
use crate::linear_modes::symmetric_k;
use crate::roots::{brent, newton, NewtonOptions};

/// Largest `m` tried by the antisymmetric bracket.
const M_CEILING: f64 = 1.0 - 1e-13;

fn antisymmetric(kind: Interaction, gamma: f64, eta_n: f64, j: usize) -> Result<ExactState> {
    check_inputs(kind, gamma, eta_n)?;
    if j == 0 {
        return Err(Error::InvalidArgument("antisymmetric index starts at 1".into()));
    }
    let jj = (j * j) as f64;
    let eta = eta_n.abs();
    // Normalization with k = 2jK: 16 j^2 K (K - E) for repulsion,
    // 16 j^2 K (E - (1 - m) K) for attraction, divided by |etaN|.
    let norm = |m: f64| -> f64 {
        let Ok(t) = Elliptic::new(m) else { return f64::NAN };
        let (k, e) = (t.k(), t.e());
        if !k.is_finite() {
            return f64::INFINITY;
        }
        let core = match kind {
            Interaction::Repulsive => k - e,
            Interaction::Attractive => e - (1.0 - m) * k,
        };
        16.0 * jj * k * core / eta - 1.0
    };
    if norm(M_CEILING) < 0.0 {
        return Err(Error::NoBracket("antisymmetric normalization"));
    }
    let m = brent(norm, 0.0, M_CEILING, 1e-16, 300)?;
    let k = 2.0 * j as f64 * Elliptic::new(m)?.k();
    let a = profile::amplitude(k, m, eta_n);
    let family = match kind {
        Interaction::Repulsive => Family::AntisymRep,
        Interaction::Attractive => Family::AntisymAtt,
    };
    ExactState::assemble(
        family,
        gamma,
        eta_n,
        j,
        SideParams { amplitude: a, k, m },
        SideParams { amplitude: -a, k, m },
    )
}

/// Antisymmetric repulsive state with `j` half periods per side (`k = 2jK`).
pub fn solve_antisym_repulsive(gamma: f64, eta_n: f64, j: usize) -> Result<ExactState> {
    antisymmetric(Interaction::Repulsive, gamma, eta_n, j)
}

/// Antisymmetric attractive state with `j` half periods per side.
pub fn solve_antisym_attractive(gamma: f64, eta_n: f64, j: usize) -> Result<ExactState> {
    antisymmetric(Interaction::Attractive, gamma, eta_n, j)
}

/// Jump and normalization conditions of an even state, unknowns `(k, m)`.
pub(crate) fn symmetric_residual(kind: Interaction, gamma: f64, eta_n: f64, x: &[f64]) -> Option<Vec<f64>> {
    let (k, m) = (x[0], x[1]);
    if !(k > 0.0) || !(m > 0.0 && m < 1.0 - 1e-12) {
        return None;
    }
    let t = Elliptic::new(m).ok()?;
    let v = t.eval(k);
    // 2 k psi'(0+) + gamma psi(0) = 0, cleared of the common factors.
    let jump = match kind {
        Interaction::Repulsive => 2.0 * k * v.cn * v.dn + gamma * v.sn,
        Interaction::Attractive => 2.0 * k * v.cn + gamma * v.sn * v.dn,
    };
    let weight = profile::point(kind, &t, k).weight;
    Some(vec![jump, 4.0 * k * weight / eta_n.abs() - 1.0])
}

fn symmetric_state(family: Family, gamma: f64, eta_n: f64, branch: usize, k: f64, m: f64) -> Result<ExactState> {
    let a = profile::amplitude(k, m, eta_n);
    let side = SideParams { amplitude: a, k, m };
    ExactState::assemble(family, gamma, eta_n, branch, side, side)
}

fn newton_symmetric(kind: Interaction, gamma: f64, eta_n: f64, seed: [f64; 2]) -> Result<[f64; 2]> {
    let rep = newton(
        |x| symmetric_residual(kind, gamma, eta_n, x),
        &seed,
        &NewtonOptions::default(),
    )?;
    Ok([rep.x[0], rep.x[1]])
}

/// Small-`m` seed built from the linear mode of the branch.
fn linear_seed(gamma: f64, eta_n: f64, branch: usize) -> Result<[f64; 2]> {
    let k = symmetric_k(gamma, branch)?;
    let per_m = k / 2.0 - (2.0 * k).sin() / 4.0;
    let m = (eta_n.abs() / (4.0 * k * per_m)).min(0.9);
    Ok([k, m])
}

pub(crate) fn solve_symmetric_seeded(
    family: Family,
    gamma: f64,
    eta_n: f64,
    branch: usize,
    seed: Option<&ExactState>,
) -> Result<ExactState> {
    let kind = family.interaction();
    check_inputs(kind, gamma, eta_n)?;
    if branch == 0 {
        return Err(Error::InvalidArgument("symmetric branch index starts at 1".into()));
    }
    let expected_nodes = 2 * (branch - 1);
    let accept = |x: [f64; 2]| -> Option<ExactState> {
        let s = symmetric_state(family, gamma, eta_n, branch, x[0], x[1]).ok()?;
        (s.node_count == expected_nodes).then_some(s)
    };
    if let Some(prev) = seed.filter(|s| s.family == family && s.branch == branch) {
        if let Some(s) = newton_symmetric(kind, gamma, eta_n, [prev.left.k, prev.left.m])
            .ok()
            .and_then(accept)
        {
            return Ok(s);
        }
    }
    let start = linear_seed(gamma, eta_n, branch)?;
    if let Some(s) = newton_symmetric(kind, gamma, eta_n, start).ok().and_then(accept) {
        return Ok(s);
    }
    // Homotopy in etaN from the weakly nonlinear regime.
    let target = eta_n;
    let mut eta = target.signum() * target.abs().min(0.05);
    let mut x = newton_symmetric(kind, gamma, eta, linear_seed(gamma, eta, branch)?)?;
    let mut step = eta.abs();
    while eta != target {
        let next = if (target - eta).abs() <= step { target } else { eta + target.signum() * step };
        match newton_symmetric(kind, gamma, next, x) {
            Ok(nx) if accept(nx).is_some() || next != target => {
                eta = next;
                x = nx;
                step = (step * 1.5).min(target.abs());
            }
            _ => {
                step *= 0.5;
                if step < 1e-6 {
                    return Err(Error::NoConvergence {
                        what: "symmetric homotopy",
                        iterations: 0,
                        residual: f64::NAN,
                    });
                }
            }
        }
    }
    accept(x).ok_or(Error::NoConvergence {
        what: "symmetric branch identification",
        iterations: 0,
        residual: f64::NAN,
    })
}

/// Even repulsive state on the branch continued from linear mode `branch`.
pub fn solve_sym_repulsive(gamma: f64, eta_n: f64, branch: usize) -> Result<ExactState> {
    solve_symmetric_seeded(Family::SymRep, gamma, eta_n, branch, None)
}

/// Even attractive state on the branch continued from linear mode `branch`.
pub fn solve_sym_attractive(gamma: f64, eta_n: f64, branch: usize) -> Result<ExactState> {
    solve_symmetric_seeded(Family::SymAtt, gamma, eta_n, branch, None)
}
