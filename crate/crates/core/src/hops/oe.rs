//! Operator expansions.
//!
//! The direct recursion is
//!
//! ```text
//! G̃_n = F̃_n |K^TD|^{n+1} - (K^T∇f̃) F̃_{n-1} · (iK^TD) |K^TD|^{n-1}
//!       - Σ_{ℓ<n} G̃_ℓ F̃_{n-ℓ} |K^TD|^{n-ℓ},        F̃_m = f̃^m/m!,
//! ```
//!
//! which nests one operator application per term and so costs `O(2^n)`
//! transforms. Transposing every term gives the self-adjoint form, which
//! only needs the previously computed `G̃_ℓ ξ̃`:
//!
//! ```text
//! G̃_n ξ̃ = |K^TD|^{n+1}[F̃_n ξ̃] + s |K^TD|^{n-1}(iK^TD)·[(K^T∇f̃) F̃_{n-1} ξ̃]
//!         - Σ_{ℓ<n} |K^TD|^{n-ℓ}[F̃_{n-ℓ} G̃_ℓ ξ̃].
//! ```
//!
//! Transposing `-(K^T∇f̃)F̃_{n-1}·(iK^TD)` flips the sign of the skew factor
//! `iK^TD`, so `s = +1` ([`AdjointSign::Transposed`]). The opposite sign is
//! kept selectable so the two can be compared against the direct form.

use num_complex::Complex64;

use super::{abs_pow, reality_projection, ktd_abs_pow, mul_into, product, Algorithm, DnoExpansion, PerturbationProblem, ProfileData};
use crate::error::Result;
use crate::fourier::{SpectralGrid, SurfaceField};

type C = Complex64;

/// Orders above this make the direct form slow enough to mention.
const DIRECT_ORDER_WARN: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OeForm {
    Direct,
    Adjoint,
}

/// Sign `s` of the gradient term in the self-adjoint recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdjointSign {
    /// `s = +1`, the exact transpose of the direct recursion.
    #[default]
    Transposed,
    /// `s = -1`, the direct-form sign carried over unchanged.
    Unflipped,
}

impl AdjointSign {
    fn value(self) -> f64 {
        match self {
            AdjointSign::Transposed => 1.0,
            AdjointSign::Unflipped => -1.0,
        }
    }
}

pub fn oe_expand(problem: &PerturbationProblem, form: OeForm) -> Result<DnoExpansion> {
    match form {
        OeForm::Direct => oe_direct_expand(problem),
        OeForm::Adjoint => oe_adjoint_expand(problem, AdjointSign::default()),
    }
}

struct Direct<'a> {
    grid: &'a SpectralGrid,
    data: ProfileData,
}

impl Direct<'_> {
    /// `G̃_n` applied to `xi` (coefficients in, coefficients out).
    fn apply(&self, n: usize, xi: &[C]) -> Vec<C> {
        let g = self.grid;
        if n == 0 {
            return abs_pow(g, xi, 1);
        }
        let mut acc = product(&self.data.taylor[n], &g.to_grid(&abs_pow(g, xi, n as u32 + 1)));
        for (j, df) in self.data.grad.iter().enumerate() {
            let dxi = g.to_grid(&ktd_abs_pow(g, xi, j, n as u32 - 1));
            let w = product(df, &self.data.taylor[n - 1]);
            mul_into(&mut acc, &w, &dxi, C::new(-1.0, 0.0));
        }
        let mut out = g.from_grid(&acc);
        for l in 0..n {
            let arg = product(&self.data.taylor[n - l], &g.to_grid(&abs_pow(g, xi, (n - l) as u32)));
            let inner = self.apply(l, &g.from_grid(&arg));
            out.iter_mut().zip(&inner).for_each(|(o, v)| *o -= v);
        }
        out
    }
}

fn oe_direct_expand(problem: &PerturbationProblem) -> Result<DnoExpansion> {
    problem.require_infinite_depth(Algorithm::OeDirect)?;
    if problem.order > DIRECT_ORDER_WARN {
        log::info!("direct operator expansion to order {} costs about 2^{} operator applications", problem.order, problem.order);
    }
    let grid = problem.grid();
    let direct = Direct { grid, data: ProfileData::new(&problem.profile, problem.order) };
    let xi = problem.dirichlet.coefficients();
    let project = reality_projection(problem.is_real());
    let corrections = (0..=problem.order)
        .map(|n| SurfaceField::from_coefficients(grid, direct.apply(n, xi)).map(&project))
        .collect::<Result<Vec<_>>>()?;
    Ok(DnoExpansion::new(Algorithm::OeDirect, corrections, None))
}

/// Self-adjoint recursion with an explicit gradient-term sign.
pub fn oe_adjoint_expand(problem: &PerturbationProblem, sign: AdjointSign) -> Result<DnoExpansion> {
    problem.require_infinite_depth(Algorithm::OeAdjoint)?;
    let grid = problem.grid();
    let g: &SpectralGrid = grid;
    let data = ProfileData::new(&problem.profile, problem.order);
    let s = sign.value();
    let project = reality_projection(problem.is_real());
    let xi = problem.dirichlet.grid_values();

    let nu0 = abs_pow(g, problem.dirichlet.coefficients(), 1);
    let nu0 = project(SurfaceField::from_coefficients(grid, nu0)?);
    let mut previous_grid = vec![nu0.grid_values()];
    let mut corrections = vec![nu0];
    for n in 1..=problem.order {
        let mut out = abs_pow(g, &g.from_grid(&product(&data.taylor[n], &xi)), n as u32 + 1);
        let fx = product(&data.taylor[n - 1], &xi);
        for (j, df) in data.grad.iter().enumerate() {
            let term = ktd_abs_pow(g, &g.from_grid(&product(df, &fx)), j, n as u32 - 1);
            out.iter_mut().zip(&term).for_each(|(o, t)| *o += t * s);
        }
        for (l, gl) in previous_grid.iter().enumerate() {
            let term = abs_pow(g, &g.from_grid(&product(&data.taylor[n - l], gl)), (n - l) as u32);
            out.iter_mut().zip(&term).for_each(|(o, t)| *o -= t);
        }
        let nu = project(SurfaceField::from_coefficients(grid, out)?);
        previous_grid.push(nu.grid_values());
        corrections.push(nu);
    }
    Ok(DnoExpansion::new(Algorithm::OeAdjoint, corrections, None))
}
