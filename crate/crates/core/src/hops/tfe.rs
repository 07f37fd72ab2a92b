//! Transformed field expansions.
//!
//! The change of variables `y' = a(y - g)/(a - g)`, `g = εf̃`, flattens the
//! strip `-a < y < g` to `-a < y' < 0`. Expanding the transformed field in
//! `ε` gives, at every order, one constant-coefficient problem per Fourier
//! mode,
//!
//! ```text
//! ∂_y²u_n + K^T∇·K^T∇u_n = K^T∇·F^α_n + ∂_y F^y_n + F^0_n,
//! u_n(0) = δ_{n0} ξ̃,   ∂_y u_n - T u_n = J_n  at y = -a,
//! ```
//!
//! with sources built from `u_{n-1}`, `u_{n-2}` (below `∇` is `K^T∇_α`):
//!
//! ```text
//! a²F^α_n = -2a f ∇u_{n-1} + a(a+y) ∇f ∂_y u_{n-1} - f² ∇u_{n-2} + (a+y) f ∇f ∂_y u_{n-2}
//! a²F^y_n = a(a+y) ∇f·∇u_{n-1} + (a+y) f ∇f·∇u_{n-2} - (a+y)² |∇f|² ∂_y u_{n-2}
//! a²F^0_n = a ∇f·∇u_{n-1} + f ∇f·∇u_{n-2} - (a+y) |∇f|² ∂_y u_{n-2}
//! a J_n   = f T[u_{n-1}(-a)]
//! ```
//!
//! and the Neumann data
//!
//! ```text
//! ν̃_n = ∂_y u_n - ∇f·∇u_{n-1} - f ν̃_{n-1}/a - f ∇f·∇u_{n-2}/a + |∇f|² ∂_y u_{n-2}
//! ```
//!
//! at `y = 0`. Products are collocated on the `(α_j, y_r)` grid; `|∇f|²` is
//! the bilinear `Σ ∂_j f ∂_j f` so that complex test profiles work too.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{reality_projection, Algorithm, DnoExpansion, PerturbationProblem, NEGLIGIBLE};
use crate::bvp::{ModeBvp, ModeForcing, ModeSolver, TransparentOperator};
use crate::chebyshev::ChebyshevBasis;
use crate::error::Result;
use crate::fourier::SurfaceField;
use crate::volume::VolumeField;

type C = Complex64;

/// Grid values of `K^T∇_α u` and `∂_y u` for one order.
struct Derivatives {
    grad: Vec<Vec<C>>,
    dy: Vec<C>,
}

impl Derivatives {
    fn of(u: &VolumeField) -> Self {
        let d = u.grid().n_physical();
        Derivatives { grad: (0..d).map(|j| u.ktd_component(j).to_grid_values()).collect(), dy: u.diff_y().to_grid_values() }
    }
}

pub fn tfe_expand(problem: &PerturbationProblem) -> Result<DnoExpansion> {
    tfe_expand_impl(problem, false).map(|(e, _)| e)
}

/// Like [`tfe_expand`], also returning the volume corrections `ũ_0 … ũ_N`.
pub fn tfe_expand_with_fields(problem: &PerturbationProblem) -> Result<(DnoExpansion, Vec<VolumeField>)> {
    tfe_expand_impl(problem, true)
}

fn tfe_expand_impl(problem: &PerturbationProblem, keep_fields: bool) -> Result<(DnoExpansion, Vec<VolumeField>)> {
    let grid = problem.grid();
    let a = problem.strip_depth;
    let basis = ChebyshevBasis::new(problem.n_y, a)?;
    let solver = ModeSolver::new(basis.clone());
    let transparent = TransparentOperator::new(grid.lattice().clone(), a)?;
    let m = grid.len();
    let d = grid.n_physical();
    let zero = C::new(0.0, 0.0);

    let tau: Vec<f64> = grid.wavenumbers().iter().map(|&k| transparent.symbol_of(k)).collect();
    let f = problem.profile.grid_values();
    let df: Vec<Vec<C>> = problem.profile.surface_gradient_k().iter().map(SurfaceField::grid_values).collect();
    let df_sq: Vec<C> = (0..m).map(|j| df.iter().map(|c| c[j] * c[j]).sum()).collect();
    let xi = problem.dirichlet.coefficients();

    let mut fields = Vec::new();
    let mut corrections = Vec::with_capacity(problem.order + 1);
    let project = reality_projection(problem.is_real());
    let mut cheb_tails = Vec::with_capacity(problem.order + 1);
    let mut u_ref = 0.0f64;
    let mut prev1: Option<(VolumeField, Derivatives)> = None;
    let mut prev2: Option<Derivatives> = None;
    let mut nu_prev: Vec<C> = Vec::new();

    for n in 0..=problem.order {
        // Sources from the two previous orders.
        let (forcing, robin) = match &prev1 {
            None => (None, vec![zero; m]),
            Some((u1, d1)) => {
                let levels = basis.len();
                let mut f_alpha = vec![vec![zero; m * levels]; d];
                let mut f_y = vec![zero; m * levels];
                let mut f_0 = vec![zero; m * levels];
                let inv_a2 = 1.0 / (a * a);
                for (r, &y) in basis.points().iter().enumerate() {
                    let ay = a + y;
                    for j in 0..m {
                        let idx = r * m + j;
                        let fj = f[j];
                        let dfg1: C = (0..d).map(|c| df[c][j] * d1.grad[c][idx]).sum();
                        let (dfg2, d2y) = match &prev2 {
                            Some(d2) => ((0..d).map(|c| df[c][j] * d2.grad[c][idx]).sum(), d2.dy[idx]),
                            None => (zero, zero),
                        };
                        for c in 0..d {
                            let g2 = prev2.as_ref().map_or(zero, |d2| d2.grad[c][idx]);
                            f_alpha[c][idx] = (-2.0 * a * fj * d1.grad[c][idx] + a * ay * df[c][j] * d1.dy[idx]
                                - fj * fj * g2
                                + ay * fj * df[c][j] * d2y)
                                * inv_a2;
                        }
                        f_y[idx] = (a * ay * dfg1 + ay * fj * dfg2 - ay * ay * df_sq[j] * d2y) * inv_a2;
                        f_0[idx] = (a * dfg1 + fj * dfg2 - ay * df_sq[j] * d2y) * inv_a2;
                    }
                }
                let to_vol = |v: &[C]| VolumeField::from_grid_values(grid, &basis, v);
                let alpha = f_alpha.iter().map(|v| to_vol(v)).collect::<Result<Vec<_>>>()?;
                let fy = to_vol(&f_y)?;
                let f0 = to_vol(&f_0)?;

                let bottom = u1.trace_bottom().apply_indexed(|i| C::new(tau[i], 0.0));
                let tb: Vec<C> = grid.to_grid(bottom.coefficients()).iter().zip(&f).map(|(t, fj)| t * fj / a).collect();
                (Some((alpha, fy, f0)), grid.from_grid(&tb))
            }
        };

        let columns = (0..m)
            .into_par_iter()
            .map(|i| {
                let forcing = match &forcing {
                    None => ModeForcing::default(),
                    Some((alpha, fy, f0)) => ModeForcing {
                        alpha: alpha.iter().map(|v| v.mode_column(i)).collect(),
                        y: fy.mode_column(i),
                        zero: f0.mode_column(i),
                    },
                };
                let bvp = ModeBvp {
                    kt: grid.kt(i).to_vec(),
                    tau: tau[i],
                    dirichlet_top: if n == 0 { xi[i] } else { zero },
                    robin_bottom: robin[i],
                    forcing,
                };
                solver.solve(&bvp).map(|s| s.coeffs)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut coeffs = vec![zero; m * basis.len()];
        for (i, col) in columns.iter().enumerate() {
            for (q, c) in col.iter().enumerate() {
                coeffs[q * m + i] = *c;
            }
        }
        let u = VolumeField::from_coefficients(grid, &basis, coeffs)?;
        let du = Derivatives::of(&u);

        let mut nu: Vec<C> = du.dy[..m].to_vec();
        if let Some((_, d1)) = &prev1 {
            for j in 0..m {
                let dfg1: C = (0..d).map(|c| df[c][j] * d1.grad[c][j]).sum();
                nu[j] -= dfg1 + f[j] * nu_prev[j] / a;
            }
        }
        if let Some(d2) = &prev2 {
            for j in 0..m {
                let dfg2: C = (0..d).map(|c| df[c][j] * d2.grad[c][j]).sum();
                nu[j] += df_sq[j] * d2.dy[j] - f[j] * dfg2 / a;
            }
        }
        let nu_n = project(if n == 0 { u.diff_y().trace_top() } else { SurfaceField::from_coefficients(grid, grid.from_grid(&nu))? });
        nu_prev = nu_n.grid_values();
        corrections.push(nu_n);

        let u_max = u.max_coefficient();
        u_ref = u_ref.max(u_max);
        cheb_tails.push(if u_max > NEGLIGIBLE * u_ref { u.chebyshev_tail_ratio() } else { 0.0 });

        prev2 = prev1.take().map(|(_, d1)| d1);
        if keep_fields {
            fields.push(u.clone());
        }
        prev1 = Some((u, du));
    }
    Ok((DnoExpansion::new(Algorithm::Tfe, corrections, Some(cheb_tails)), fields))
}
