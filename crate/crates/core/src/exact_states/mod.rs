//! Exact stationary states in closed form.
//!
//! A state is described by one elliptic profile per side (see [`profile`]):
//! `psi(x) = aL f(kL (1 + x) | mL)` for `x < 0` and
//! `psi(x) = aR f(kR (1 - x) | mR)` for `x >= 0`. The left amplitude is
//! positive; the sign of the right amplitude fixes the parity of the node
//! count. Six conditions tie the parameters together: the two amplitude
//! relations, equal chemical potential, continuity at the barrier, the slope
//! jump `psi'(0+) - psi'(0-) = gamma psi(0)`, and unit normalization.

mod asymmetric;
mod families;
pub mod profile;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::elliptic::Elliptic;
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

pub use asymmetric::{bifurcation, refine_asymmetric, solve_asym_attractive, solve_asym_repulsive, Bifurcation};
pub use families::{
    solve_antisym_attractive, solve_antisym_repulsive, solve_sym_attractive, solve_sym_repulsive,
};
pub use profile::Interaction;

/// Points used to count sign changes of a state.
const NODE_GRID: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    #[serde(rename = "antisym-rep")]
    AntisymRep,
    #[serde(rename = "sym-rep")]
    SymRep,
    #[serde(rename = "antisym-att")]
    AntisymAtt,
    #[serde(rename = "sym-att")]
    SymAtt,
    #[serde(rename = "asym-att")]
    AsymAtt,
    #[serde(rename = "asym-rep")]
    AsymRep,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::AntisymRep,
        Family::SymRep,
        Family::AntisymAtt,
        Family::SymAtt,
        Family::AsymAtt,
        Family::AsymRep,
    ];

    pub fn interaction(self) -> Interaction {
        match self {
            Family::AntisymRep | Family::SymRep | Family::AsymRep => Interaction::Repulsive,
            _ => Interaction::Attractive,
        }
    }

    pub fn is_asymmetric(self) -> bool {
        matches!(self, Family::AsymAtt | Family::AsymRep)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::AntisymRep => "antisym-rep",
            Family::SymRep => "sym-rep",
            Family::AntisymAtt => "antisym-att",
            Family::SymAtt => "sym-att",
            Family::AsymAtt => "asym-att",
            Family::AsymRep => "asym-rep",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown family '{s}'")))
    }
}

/// Elliptic parameters of one side. `amplitude` carries the sign of the side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SideParams {
    pub amplitude: f64,
    pub k: f64,
    pub m: f64,
}

/// A solved stationary state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactState {
    pub family: Family,
    pub gamma: f64,
    pub eta_n: f64,
    /// Branch index (antisymmetric: number of half periods `j`; symmetric:
    /// linear-mode index; asymmetric: index of the parent symmetric branch).
    pub branch: usize,
    pub left: SideParams,
    pub right: SideParams,
    pub mu: f64,
    pub energy_per_particle: f64,
    pub node_count: usize,
}

impl ExactState {
    pub(crate) fn assemble(
        family: Family,
        gamma: f64,
        eta_n: f64,
        branch: usize,
        left: SideParams,
        right: SideParams,
    ) -> Result<Self> {
        let kind = family.interaction();
        let mut state = ExactState {
            family,
            gamma,
            eta_n,
            branch,
            left,
            right,
            mu: profile::chemical_potential(kind, left.k, left.m),
            energy_per_particle: 0.0,
            node_count: 0,
        };
        let (quartic, nodes) = {
            let sampler = state.sampler()?;
            (sampler.integrate(|v| v.powi(4)), sampler.node_count())
        };
        state.energy_per_particle = state.mu - 0.5 * eta_n * quartic;
        state.node_count = nodes;
        Ok(state)
    }

    pub fn interaction(&self) -> Interaction {
        self.family.interaction()
    }

    /// Prepares repeated evaluation of `psi`.
    pub fn sampler(&self) -> Result<Sampler<'_>> {
        Ok(Sampler {
            state: self,
            left: Elliptic::new(self.left.m)?,
            right: Elliptic::new(self.right.m)?,
        })
    }

    /// `psi(x)` for `x` in `[-1, 1]`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sampler().map(|s| s.eval(x)).unwrap_or(f64::NAN)
    }

    /// The six defining conditions evaluated at the stored parameters:
    /// left and right amplitude relations, equal chemical potentials,
    /// continuity, slope jump, normalization.
    pub fn residuals(&self) -> [f64; 6] {
        let kind = self.interaction();
        let (l, r) = (self.left, self.right);
        let (Ok(tl), Ok(tr)) = (Elliptic::new(l.m), Elliptic::new(r.m)) else {
            return [f64::NAN; 6];
        };
        let pl = profile::point(kind, &tl, l.k);
        let pr = profile::point(kind, &tr, r.k);
        let eta = self.eta_n.abs();
        let norm = 2.0 * (l.k * pl.weight + r.k * pr.weight) / eta;
        let psi0_left = l.amplitude * pl.f;
        let psi0_right = r.amplitude * pr.f;
        [
            l.amplitude * l.amplitude - 2.0 * l.m * l.k * l.k / eta,
            r.amplitude * r.amplitude - 2.0 * r.m * r.k * r.k / eta,
            profile::chemical_potential(kind, l.k, l.m) - profile::chemical_potential(kind, r.k, r.m),
            psi0_left - psi0_right,
            -r.amplitude * r.k * pr.df - l.amplitude * l.k * pl.df - self.gamma * 0.5 * (psi0_left + psi0_right),
            norm - 1.0,
        ]
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// The reflected state `psi(-x)`, rescaled so the left amplitude stays positive.
    pub fn mirrored(&self) -> ExactState {
        let sign = self.right.amplitude.signum();
        let mut out = self.clone();
        out.left = SideParams {
            amplitude: self.right.amplitude.abs(),
            ..self.right
        };
        out.right = SideParams {
            amplitude: sign * self.left.amplitude,
            ..self.left
        };
        out
    }

    /// Probability on the left minus probability on the right.
    pub fn imbalance(&self) -> f64 {
        let Ok(s) = self.sampler() else { return f64::NAN };
        let gl = GaussLegendre::<f64>::new(64);
        let left = gl.integrate_panels(-1.0, 0.0, 4, |x| s.eval(x).powi(2));
        let right = gl.integrate_panels(0.0, 1.0, 4, |x| s.eval(x).powi(2));
        left - right
    }
}

/// Cached elliptic tables for evaluating one state.
pub struct Sampler<'a> {
    state: &'a ExactState,
    left: Elliptic<f64>,
    right: Elliptic<f64>,
}

impl Sampler<'_> {
    pub fn eval(&self, x: f64) -> f64 {
        let st = self.state;
        let kind = st.interaction();
        match st.family {
            Family::AntisymRep | Family::AntisymAtt => {
                // Centered form: exact zero at the barrier.
                let sign = if st.branch.is_multiple_of(2) { 1.0 } else { -1.0 };
                sign * st.left.amplitude * profile::value(kind, &self.left, st.left.k * x).0
            }
            _ if x < 0.0 => st.left.amplitude * profile::value(kind, &self.left, st.left.k * (1.0 + x)).0,
            _ => st.right.amplitude * profile::value(kind, &self.right, st.right.k * (1.0 - x)).0,
        }
    }

    /// `integral_{-1}^{1} g(psi(x)) dx` by composite Gauss-Legendre on each half.
    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        let gl = GaussLegendre::<f64>::new(64);
        gl.integrate_panels(-1.0, 0.0, 4, |x| g(self.eval(x)))
            + gl.integrate_panels(0.0, 1.0, 4, |x| g(self.eval(x)))
    }

    /// Sign changes on a uniform midpoint grid.
    pub fn node_count(&self) -> usize {
        let h = 2.0 / NODE_GRID as f64;
        let scale = (0..NODE_GRID)
            .map(|i| self.eval(-1.0 + (i as f64 + 0.5) * h).abs())
            .fold(0.0, f64::max);
        let floor = 1e-12 * scale;
        let mut count = 0;
        let mut last = 0.0f64;
        for i in 0..NODE_GRID {
            let v = self.eval(-1.0 + (i as f64 + 0.5) * h);
            if v.abs() <= floor {
                continue;
            }
            if last != 0.0 && v.signum() != last.signum() {
                count += 1;
            }
            last = v;
        }
        count
    }
}

/// Solves one family at one `etaN`. `branch` is ignored for asymmetric families.
pub fn solve(family: Family, gamma: f64, eta_n: f64, branch: usize) -> Result<ExactState> {
    match family {
        Family::AntisymRep => solve_antisym_repulsive(gamma, eta_n, branch),
        Family::SymRep => solve_sym_repulsive(gamma, eta_n, branch),
        Family::AntisymAtt => solve_antisym_attractive(gamma, eta_n, branch),
        Family::SymAtt => solve_sym_attractive(gamma, eta_n, branch),
        Family::AsymAtt => solve_asym_attractive(gamma, eta_n, None),
        Family::AsymRep => solve_asym_repulsive(gamma, eta_n, None),
    }
}

/// One point of a sweep. Failures are kept so a sweep never aborts.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub eta_n: f64,
    pub state: Result<ExactState>,
}

/// Solves `family` at `etaN = from, from + step, ...` up to `to`, seeding each
/// point from the previous success.
pub fn continuation_sweep(
    family: Family,
    gamma: f64,
    from: f64,
    to: f64,
    step: f64,
    branch: usize,
) -> Result<Vec<SweepPoint>> {
    if !(step > 0.0) || !from.is_finite() || !to.is_finite() {
        return Err(Error::InvalidArgument("sweep needs a positive step and finite range".into()));
    }
    let count = ((to - from).abs() / step + 1e-9).floor() as usize + 1;
    let dir = if to >= from { 1.0 } else { -1.0 };
    let mut out = Vec::with_capacity(count);
    let mut previous: Option<ExactState> = None;
    for i in 0..count {
        let eta = from + dir * step * i as f64;
        let state = match family {
            Family::SymRep | Family::SymAtt => {
                families::solve_symmetric_seeded(family, gamma, eta, branch, previous.as_ref())
            }
            Family::AsymAtt => solve_asym_attractive(gamma, eta, previous.as_ref()),
            Family::AsymRep => solve_asym_repulsive(gamma, eta, previous.as_ref()),
            _ => solve(family, gamma, eta, branch),
        };
        if let Ok(s) = &state {
            previous = Some(s.clone());
        }
        out.push(SweepPoint { eta_n: eta, state });
    }
    Ok(out)
}

pub(crate) fn check_inputs(kind: Interaction, gamma: f64, eta_n: f64) -> Result<()> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::Domain(format!("barrier strength must be positive and finite, got {gamma}")));
    }
    let ok = match kind {
        Interaction::Repulsive => eta_n > 0.0,
        Interaction::Attractive => eta_n < 0.0,
    };
    if !ok || !eta_n.is_finite() {
        return Err(Error::Domain(format!("etaN = {eta_n} has the wrong sign for a {kind:?} family")));
    }
    Ok(())
}
