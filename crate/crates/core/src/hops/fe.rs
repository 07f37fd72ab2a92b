//! Field expansions in infinite depth.
//!
//! The field is `ũ = Σ_n εⁿ Σ_p â_{n,p} e^{|K^Tp| y} e^{ip·α}`. Expanding the
//! Dirichlet condition at `y = εf̃` gives
//!
//! ```text
//! a_n = δ_{n0} ξ̃ - Σ_{ℓ<n} F̃_{n-ℓ} |K^TD|^{n-ℓ} a_ℓ,
//! ```
//!
//! and the Neumann data `∂_yũ - ε(K^T∇f̃)·K^T∇_αũ` at the interface gives
//!
//! ```text
//! ν̃_n = Σ_{ℓ+m=n} F̃_m |K^TD|^{m+1} a_ℓ
//!       - (K^T∇f̃) · Σ_{ℓ+m=n-1} F̃_m (iK^TD) |K^TD|^m a_ℓ.
//! ```

use num_complex::Complex64;

use super::{abs_pow, reality_projection, ktd_abs_pow, mul_into, Algorithm, DnoExpansion, PerturbationProblem, ProfileData};
use crate::error::Result;
use crate::fourier::{SpectralGrid, SurfaceField};

type C = Complex64;

pub fn fe_expand(problem: &PerturbationProblem) -> Result<DnoExpansion> {
    problem.require_infinite_depth(Algorithm::Fe)?;
    let grid = problem.grid();
    let g: &SpectralGrid = grid;
    let data = ProfileData::new(&problem.profile, problem.order);
    let one = C::new(1.0, 0.0);
    let zero = C::new(0.0, 0.0);
    let d = data.grad.len();
    let project = reality_projection(problem.is_real());

    let mut amplitudes: Vec<Vec<C>> = Vec::with_capacity(problem.order + 1);
    let mut corrections = Vec::with_capacity(problem.order + 1);
    for n in 0..=problem.order {
        let a_n = if n == 0 {
            problem.dirichlet.coefficients().to_vec()
        } else {
            let mut acc = vec![zero; g.len()];
            for (l, a_l) in amplitudes.iter().enumerate() {
                let v = g.to_grid(&abs_pow(g, a_l, (n - l) as u32));
                mul_into(&mut acc, &data.taylor[n - l], &v, -one);
            }
            project(SurfaceField::from_coefficients(grid, g.from_grid(&acc))?).into_coefficients()
        };
        amplitudes.push(a_n);

        // m = 0 contributes |K^TD| a_n exactly; the rest is collocated.
        let mut acc = vec![zero; g.len()];
        for m in 1..=n {
            let v = g.to_grid(&abs_pow(g, &amplitudes[n - m], m as u32 + 1));
            mul_into(&mut acc, &data.taylor[m], &v, one);
        }
        if n >= 1 {
            for j in 0..d {
                let mut inner = vec![zero; g.len()];
                for m in 0..n {
                    let v = g.to_grid(&ktd_abs_pow(g, &amplitudes[n - 1 - m], j, m as u32));
                    mul_into(&mut inner, &data.taylor[m], &v, one);
                }
                mul_into(&mut acc, &data.grad[j], &inner, -one);
            }
        }
        let mut nu = g.from_grid(&acc);
        for (o, t) in nu.iter_mut().zip(abs_pow(g, &amplitudes[n], 1)) {
            *o += t;
        }
        corrections.push(project(SurfaceField::from_coefficients(grid, nu)?));
    }
    Ok(DnoExpansion::new(Algorithm::Fe, corrections, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hops::oe::{oe_expand, OeForm};
    use crate::lattice::{Depth, LatticeSpec};

    #[test]
    fn agrees_with_operator_expansion() {
        let l = LatticeSpec::new(&[vec![1.0], vec![2f64.sqrt()]], Depth::Infinite).unwrap();
        let g = SpectralGrid::new(l, &[16, 16]).unwrap();
        let f = SurfaceField::from_fn(&g, |a| C::new(a[0].cos() * a[1].sin(), 0.0));
        let xi = SurfaceField::from_fn(&g, |a| C::new(a[1].cos() + 0.5 * (a[0] - a[1]).sin(), 0.0));
        let p = PerturbationProblem::new(f, xi, 6, 0.1, 8).unwrap();
        let fe = fe_expand(&p).unwrap();
        let oe = oe_expand(&p, OeForm::Adjoint).unwrap();
        for (n, (a, b)) in fe.corrections.iter().zip(&oe.corrections).enumerate() {
            let scale = b.max_coefficient().max(1.0);
            assert!(a.sub(b).unwrap().max_coefficient() < 1e-10 * scale, "order {n}");
        }
    }
}
