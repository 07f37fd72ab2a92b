//! High-order perturbation of surfaces: recursions for the Taylor
//! coefficients `G̃_n(f̃)[ξ̃]` of the Dirichlet-Neumann operator
//! `G̃(εf̃) = Σ_n G̃_n(f̃) εⁿ`.
//!
//! * [`oe`]: operator expansions, in the direct and the self-adjoint ("fast") form.
//! * [`fe`]: field expansions on the exponential basis `e^{|K^Tp| y}`.
//! * [`tfe`]: transformed field expansions on the flattened strip.

pub mod fe;
pub mod oe;
pub mod tfe;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{SpectralGrid, SurfaceField};
use crate::lattice::Depth;

pub use oe::{AdjointSign, OeForm};

type C = Complex64;

/// Largest supported perturbation order; `1/n!` stays comfortably representable.
pub const MAX_ORDER: usize = 32;

/// Threshold on the tail-energy ratio above which a correction is flagged
/// as under-resolved.
pub const RESOLUTION_WARN: f64 = 1e-6;

/// Relative size below which a correction is treated as roundoff by the monitor.
pub(crate) const NEGLIGIBLE: f64 = 1e-12;

/// Inputs whose conjugate-symmetry defect is below this fraction of their
/// largest coefficient count as real.
pub const REALITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    OeDirect,
    OeAdjoint,
    Fe,
    Tfe,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::OeDirect, Algorithm::OeAdjoint, Algorithm::Fe, Algorithm::Tfe];

    pub fn tag(&self) -> &'static str {
        match self {
            Algorithm::OeDirect => "oe-direct",
            Algorithm::OeAdjoint => "oe-adjoint",
            Algorithm::Fe => "fe",
            Algorithm::Tfe => "tfe",
        }
    }

    /// OE and FE are only derived for infinite depth.
    pub fn supports(&self, depth: Depth) -> bool {
        matches!(self, Algorithm::Tfe) || matches!(depth, Depth::Infinite)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.tag() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown algorithm {s:?}; expected one of oe-direct, oe-adjoint, fe, tfe")))
    }
}

/// Interface profile `f̃`, Dirichlet data `ξ̃`, and discretization for one expansion.
#[derive(Debug, Clone)]
pub struct PerturbationProblem {
    pub profile: SurfaceField,
    pub dirichlet: SurfaceField,
    pub order: usize,
    /// Depth `a` of the artificial boundary (TFE only).
    pub strip_depth: f64,
    /// Chebyshev order (TFE only).
    pub n_y: usize,
}

impl PerturbationProblem {
    pub fn new(profile: SurfaceField, dirichlet: SurfaceField, order: usize, strip_depth: f64, n_y: usize) -> Result<Self> {
        if !profile.same_grid(&dirichlet) {
            return Err(Error::GridMismatch);
        }
        if order > MAX_ORDER {
            return Err(Error::InvalidArgument(format!("order {order} exceeds the maximum {MAX_ORDER}")));
        }
        if !(strip_depth > 0.0 && strip_depth.is_finite()) {
            return Err(Error::InvalidArgument(format!("strip depth a = {strip_depth} must be positive")));
        }
        if let Depth::Finite(h) = profile.grid().lattice().depth() {
            if h <= strip_depth {
                return Err(Error::InvalidArgument(format!(
                    "fluid depth h = {h} must exceed the strip depth a = {strip_depth}"
                )));
            }
        }
        Ok(PerturbationProblem { profile, dirichlet, order, strip_depth, n_y })
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        self.profile.grid()
    }

    pub fn depth(&self) -> Depth {
        self.grid().lattice().depth()
    }

    /// Profile and Dirichlet data are both real valued. Expansions of real
    /// problems are projected onto real fields order by order.
    pub fn is_real(&self) -> bool {
        [&self.profile, &self.dirichlet]
            .iter()
            .all(|f| f.conjugate_symmetry_defect() <= REALITY_TOL * f.max_coefficient())
    }

    fn require_infinite_depth(&self, algorithm: Algorithm) -> Result<()> {
        if algorithm.supports(self.depth()) {
            Ok(())
        } else {
            Err(Error::Unsupported(format!("{algorithm} is only available in infinite depth")))
        }
    }
}

/// Resolution monitor for one order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderDiagnostics {
    pub order: usize,
    /// Energy fraction of `ν̃_n` in the outer quarter of the Fourier range.
    pub fourier_tail: f64,
    /// Energy fraction of `ũ_n` in the top quarter of Chebyshev degrees (TFE).
    pub chebyshev_tail: Option<f64>,
}

impl OrderDiagnostics {
    pub fn under_resolved(&self) -> bool {
        self.fourier_tail > RESOLUTION_WARN || self.chebyshev_tail.is_some_and(|t| t > RESOLUTION_WARN)
    }
}

/// The corrections `ν̃_0 … ν̃_N` of the operator applied to fixed Dirichlet data.
#[derive(Debug, Clone)]
pub struct DnoExpansion {
    pub algorithm: Algorithm,
    pub corrections: Vec<SurfaceField>,
    pub diagnostics: Vec<OrderDiagnostics>,
}

impl DnoExpansion {
    pub(crate) fn new(algorithm: Algorithm, corrections: Vec<SurfaceField>, chebyshev_tails: Option<Vec<f64>>) -> Self {
        // Corrections at roundoff level have meaningless spectra.
        let reference = corrections.iter().fold(0.0f64, |m, c| m.max(c.max_coefficient()));
        let diagnostics: Vec<OrderDiagnostics> = corrections
            .iter()
            .enumerate()
            .map(|(n, nu)| OrderDiagnostics {
                order: n,
                fourier_tail: if nu.max_coefficient() > NEGLIGIBLE * reference { nu.tail_energy_ratio() } else { 0.0 },
                chebyshev_tail: chebyshev_tails.as_ref().map(|t| t[n]),
            })
            .collect();
        for d in diagnostics.iter().filter(|d| d.under_resolved()) {
            log::warn!(
                "{algorithm}: order {} looks under-resolved (Fourier tail {:.2e}, Chebyshev tail {:?})",
                d.order,
                d.fourier_tail,
                d.chebyshev_tail
            );
        }
        DnoExpansion { algorithm, corrections, diagnostics }
    }

    /// Wraps corrections computed elsewhere (for example read back from an
    /// archive). All corrections must share one grid.
    pub fn from_corrections(algorithm: Algorithm, corrections: Vec<SurfaceField>) -> Result<Self> {
        let first = corrections.first().ok_or_else(|| Error::InvalidArgument("expansion needs at least one order".into()))?;
        if corrections.iter().any(|c| !c.same_grid(first)) {
            return Err(Error::GridMismatch);
        }
        Ok(Self::new(algorithm, corrections, None))
    }

    pub fn order(&self) -> usize {
        self.corrections.len().saturating_sub(1)
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        self.corrections[0].grid()
    }

    /// The scalar series `ν̂_{p,0} … ν̂_{p,N}` of the mode at `index`.
    pub fn mode_series(&self, index: usize) -> Vec<C> {
        self.corrections.iter().map(|c| c.coefficients()[index]).collect()
    }
}

/// Computes the expansion with the chosen algorithm. The adjoint OE form
/// uses the sign validated against the direct form.
pub fn expand(problem: &PerturbationProblem, algorithm: Algorithm) -> Result<DnoExpansion> {
    match algorithm {
        Algorithm::OeDirect => oe::oe_expand(problem, OeForm::Direct),
        Algorithm::OeAdjoint => oe::oe_expand(problem, OeForm::Adjoint),
        Algorithm::Fe => fe::fe_expand(problem),
        Algorithm::Tfe => tfe::tfe_expand(problem),
    }
}

/// Identity for complex problems, the projection onto real fields for real
/// ones.
pub(crate) fn reality_projection(real: bool) -> impl Fn(SurfaceField) -> SurfaceField {
    move |f| if real { f.real_part() } else { f }
}

/// Shared grid-level data of the profile: `F̃_m = f̃^m/m!` for `m ≤ N` and
/// the components of `K^T∇_α f̃`, all as grid values.
pub(crate) struct ProfileData {
    pub taylor: Vec<Vec<C>>,
    pub grad: Vec<Vec<C>>,
}

impl ProfileData {
    pub fn new(profile: &SurfaceField, order: usize) -> Self {
        let f = profile.grid_values();
        let mut taylor = vec![vec![C::new(1.0, 0.0); f.len()]];
        for m in 1..=order {
            let prev = &taylor[m - 1];
            let inv = 1.0 / m as f64;
            taylor.push(prev.iter().zip(&f).map(|(p, v)| p * v * inv).collect());
        }
        let grad = profile.surface_gradient_k().iter().map(SurfaceField::grid_values).collect();
        ProfileData { taylor, grad }
    }
}

/// Coefficients of `|K^T D|^power` applied to `coeffs`.
pub(crate) fn abs_pow(grid: &SpectralGrid, coeffs: &[C], power: u32) -> Vec<C> {
    coeffs.iter().enumerate().map(|(i, c)| c * grid.wavenumber(i).powi(power as i32)).collect()
}

/// Coefficients of `i(K^T D)_j |K^T D|^power` applied to `coeffs`.
pub(crate) fn ktd_abs_pow(grid: &SpectralGrid, coeffs: &[C], j: usize, power: u32) -> Vec<C> {
    coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c * C::new(0.0, grid.kt(i)[j] * grid.wavenumber(i).powi(power as i32)))
        .collect()
}

pub(crate) fn mul_into(acc: &mut [C], a: &[C], b: &[C], s: C) {
    for ((o, x), y) in acc.iter_mut().zip(a).zip(b) {
        *o += x * y * s;
    }
}

pub(crate) fn product(a: &[C], b: &[C]) -> Vec<C> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}
