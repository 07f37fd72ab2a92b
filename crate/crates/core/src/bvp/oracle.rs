//! Closed-form solution of the infinite-depth mode problem.
//!
//! The homogeneous part is `ξ̂ E(y) + Ĵ S(y)` with
//! `E(y) = e^{ky}`, `S(y) = sinh(ky)/(k e^{ka})` (`S = y` at `k = 0`), and the
//! forced part is the Green's function integral
//!
//! ```text
//! û(y) = e^{ka} { ∫_y^0 E(y) S(t) F(t) dt + ∫_{-a}^y E(t) S(y) F(t) dt }.
//! ```
//!
//! The `F^y` channel is integrated by parts (using `F^y(-a) = 0`) so that it
//! never differentiates the forcing. Integrals use Clenshaw-Curtis
//! quadrature on each sub-interval. Every kernel is evaluated in a form whose
//! exponentials have non-positive arguments.

use num_complex::Complex64;

use crate::bvp::ModeBvp;
use crate::chebyshev::ChebyshevBasis;
use crate::error::{Error, Result};

type C = Complex64;

/// The kernels `E`, `S`, `C = S'` for wavenumber `k` on a strip of depth `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticKernels {
    pub k: f64,
    pub a: f64,
}

/// `e^{k·base} sinh(k·arg) / k`, continuous at `k = 0` (value `arg`).
fn exp_sinhc(k: f64, base: f64, arg: f64) -> f64 {
    if k == 0.0 {
        arg
    } else if (k * arg).abs() < 0.5 {
        (k * base).exp() * (k * arg).sinh() / k
    } else {
        ((k * (base + arg)).exp() - (k * (base - arg)).exp()) / (2.0 * k)
    }
}

/// `e^{k·base} cosh(k·arg)`.
fn exp_cosh(k: f64, base: f64, arg: f64) -> f64 {
    if k == 0.0 {
        1.0
    } else {
        0.5 * ((k * (base + arg)).exp() + (k * (base - arg)).exp())
    }
}

/// `e^{k·base} sinh(k·arg)`.
fn exp_sinh(k: f64, base: f64, arg: f64) -> f64 {
    k * exp_sinhc(k, base, arg)
}

pub fn analytic_kernels(k: f64, a: f64) -> AnalyticKernels {
    AnalyticKernels { k, a }
}

impl AnalyticKernels {
    pub fn e(&self, y: f64) -> f64 {
        (self.k * y).exp()
    }

    pub fn s(&self, y: f64) -> f64 {
        exp_sinhc(self.k, -self.a, y)
    }

    pub fn c(&self, y: f64) -> f64 {
        exp_cosh(self.k, -self.a, y)
    }
}

/// Clenshaw-Curtis nodes and weights on `[-1, 1]` with `n + 1` points.
pub fn clenshaw_curtis(n: usize) -> (Vec<f64>, Vec<f64>) {
    use std::f64::consts::PI;
    if n == 0 {
        return (vec![0.0], vec![2.0]);
    }
    let nodes = (0..=n).map(|j| (PI * j as f64 / n as f64).cos()).collect();
    let weights = (0..=n)
        .map(|j| {
            let cj = if j == 0 || j == n { 1.0 } else { 2.0 };
            let mut s = 0.0;
            for k in 1..=n / 2 {
                let bk = if 2 * k == n { 1.0 } else { 2.0 };
                s += bk / (4.0 * (k * k) as f64 - 1.0) * (2.0 * PI * (k * j) as f64 / n as f64).cos();
            }
            cj / n as f64 * (1.0 - s)
        })
        .collect();
    (nodes, weights)
}

/// Quadrature-based evaluation of the exact mode solution.
pub struct AnalyticOracle<'a> {
    bvp: &'a ModeBvp,
    basis: &'a ChebyshevBasis,
    kernels: AnalyticKernels,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl<'a> AnalyticOracle<'a> {
    /// Only the infinite-depth condition `τ = k` has the closed form above.
    /// `order` is the Clenshaw-Curtis degree on each sub-interval.
    pub fn new(bvp: &'a ModeBvp, basis: &'a ChebyshevBasis, order: usize) -> Result<Self> {
        let k = bvp.wavenumber();
        if (bvp.tau - k).abs() > 1e-14 * k.max(1.0) {
            return Err(Error::Unsupported("the analytic oracle covers the infinite-depth symbol only".into()));
        }
        if order < basis.n_y() {
            log::warn!("oracle quadrature order {order} is below N_y = {}", basis.n_y());
        }
        let (nodes, weights) = clenshaw_curtis(order);
        Ok(AnalyticOracle { bvp, basis, kernels: analytic_kernels(k, basis.strip_depth()), nodes, weights })
    }

    fn forcing_g(&self, t: f64) -> C {
        let f = &self.bvp.forcing;
        let mut g = C::new(0.0, 0.0);
        for (comp, &kj) in f.alpha.iter().zip(&self.bvp.kt) {
            if !comp.is_empty() {
                g += C::new(0.0, kj) * self.basis.eval(comp, t);
            }
        }
        if !f.zero.is_empty() {
            g += self.basis.eval(&f.zero, t);
        }
        g
    }

    fn forcing_y(&self, t: f64) -> C {
        if self.bvp.forcing.y.is_empty() {
            C::new(0.0, 0.0)
        } else {
            self.basis.eval(&self.bvp.forcing.y, t)
        }
    }

    fn integrate(&self, lo: f64, hi: f64, f: impl Fn(f64) -> C) -> C {
        if hi <= lo {
            return C::new(0.0, 0.0);
        }
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| f(mid + half * x) * (w * half)).sum()
    }

    /// `(û(y), û'(y))`.
    pub fn eval(&self, y: f64) -> (C, C) {
        let k = self.kernels.k;
        let a = self.kernels.a;
        let xi = self.bvp.dirichlet_top;
        let j = self.bvp.robin_bottom;
        let mut u = xi * self.kernels.e(y) + j * self.kernels.s(y);
        let mut du = xi * (k * self.kernels.e(y)) + j * self.kernels.c(y);

        let has_g = !self.bvp.forcing.zero.is_empty() || self.bvp.forcing.alpha.iter().any(|c| !c.is_empty());
        if has_g {
            // e^{ka}E(y)S(t) = e^{ky} sinh(kt)/k for t > y; e^{ka}E(t)S(y) = e^{kt} sinh(ky)/k for t < y.
            u += self.integrate(y, 0.0, |t| self.forcing_g(t) * exp_sinhc(k, y, t));
            u += self.integrate(-a, y, |t| self.forcing_g(t) * exp_sinhc(k, t, y));
            du += self.integrate(y, 0.0, |t| self.forcing_g(t) * exp_sinh(k, y, t));
            du += self.integrate(-a, y, |t| self.forcing_g(t) * exp_cosh(k, t, y));
        }
        if !self.bvp.forcing.y.is_empty() {
            u -= self.integrate(y, 0.0, |t| self.forcing_y(t) * exp_cosh(k, y, t));
            u -= self.integrate(-a, y, |t| self.forcing_y(t) * exp_sinh(k, t, y));
            du += self.forcing_y(y);
            du -= self.integrate(y, 0.0, |t| self.forcing_y(t) * (k * exp_cosh(k, y, t)));
            du -= self.integrate(-a, y, |t| self.forcing_y(t) * (k * exp_cosh(k, t, y)));
        }
        (u, du)
    }
}

/// Values of the exact solution at the basis collocation points.
pub fn analytic_oracle_solve(bvp: &ModeBvp, basis: &ChebyshevBasis, order: usize) -> Result<Vec<C>> {
    let oracle = AnalyticOracle::new(bvp, basis, order)?;
    Ok(basis.points().iter().map(|&y| oracle.eval(y).0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvp::{ModeForcing, ModeSolver};

    fn re(x: f64) -> C {
        C::new(x, 0.0)
    }

    #[test]
    fn kernels_at_zero_wavenumber() {
        let kern = analytic_kernels(0.0, 0.3);
        for y in [-0.3, -0.1, 0.0] {
            assert_eq!(kern.s(y), y);
            assert_eq!(kern.c(y), 1.0);
        }
    }

    #[test]
    fn kernel_values_and_robin_identity() {
        let kern = analytic_kernels(1.0, 1.0);
        assert!((kern.e(-1.0) - 0.3678794).abs() < 1e-7);
        for &k in &[0.5, 1.0 + 2f64.sqrt(), 40.0, 900.0] {
            let a = 0.1;
            let kern = analytic_kernels(k, a);
            assert_eq!(kern.e(0.0), 1.0);
            assert_eq!(kern.s(0.0), 0.0);
            let (xi, j) = (C::new(0.7, -0.2), C::new(-1.3, 0.4));
            let u = xi * kern.e(-a) + j * kern.s(-a);
            let du = xi * (k * kern.e(-a)) + j * kern.c(-a);
            assert!((du - u * k - j).norm() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn clenshaw_curtis_integrates_polynomials() {
        let (x, w) = clenshaw_curtis(16);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m4: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
        assert!((m4 - 0.4).abs() < 1e-14);
    }

    #[test]
    fn homogeneous_case_reduces_to_kernels() {
        let basis = ChebyshevBasis::new(8, 0.1).unwrap();
        let bvp = ModeBvp::homogeneous(2.0, re(1.5), re(-0.5));
        let kern = analytic_kernels(2.0, 0.1);
        let vals = analytic_oracle_solve(&bvp, &basis, 16).unwrap();
        for (y, v) in basis.points().iter().zip(&vals) {
            assert_eq!(*v, re(1.5) * kern.e(*y) + re(-0.5) * kern.s(*y));
        }
    }

    #[test]
    fn constant_forcing_zero_wavenumber() {
        // û'' = 1, û(0) = 0, û'(-a) = 0  =>  û = y²/2 + a y.
        let a = 0.1;
        let basis = ChebyshevBasis::new(4, a).unwrap();
        let one = basis.values_to_coeffs(&[re(1.0); 5]);
        let bvp = ModeBvp {
            forcing: ModeForcing { zero: one, ..Default::default() },
            ..ModeBvp::homogeneous(0.0, re(0.0), re(0.0))
        };
        let oracle = AnalyticOracle::new(&bvp, &basis, 16).unwrap();
        assert!((oracle.eval(-a).0 - re(-a * a / 2.0)).norm() < 1e-15);
        for &y in basis.points() {
            assert!((oracle.eval(y).0 - re(y * y / 2.0 + a * y)).norm() < 1e-15);
        }
    }

    #[test]
    fn agrees_with_collocation_for_polynomial_forcing() {
        let a = 0.1;
        let basis = ChebyshevBasis::new(32, a).unwrap();
        let solver = ModeSolver::new(basis.clone());
        let k = 1.0 + 2f64.sqrt();
        let poly = [0.3, -1.0, 2.0, 0.5, -0.25, 1.5, 0.7];
        let vals: Vec<C> = basis
            .points()
            .iter()
            .map(|&y| re(poly.iter().rev().fold(0.0, |acc, c| acc * (y / a) + c)))
            .collect();
        let bvp = ModeBvp {
            forcing: ModeForcing { zero: basis.values_to_coeffs(&vals), ..Default::default() },
            ..ModeBvp::homogeneous(k, re(0.0), re(0.0))
        };
        let exact = analytic_oracle_solve(&bvp, &basis, 64).unwrap();
        let sol = solver.solve(&bvp).unwrap();
        let scale = exact.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        let err = exact.iter().zip(&sol.values).fold(0.0f64, |m, (e, s)| m.max((e - s).norm()));
        assert!(err <= 1e-10 * scale, "{err} vs {scale}");
    }

    #[test]
    fn finite_depth_is_unsupported() {
        let basis = ChebyshevBasis::new(4, 0.1).unwrap();
        let bvp = ModeBvp { tau: 0.5, ..ModeBvp::homogeneous(1.0, re(1.0), re(0.0)) };
        assert!(AnalyticOracle::new(&bvp, &basis, 8).is_err());
    }
}
