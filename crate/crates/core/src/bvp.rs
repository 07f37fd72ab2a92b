//! Per-mode two-point boundary value problems on the flattened strip.
//!
//! After a Fourier transform in `α`, every mode `p` of the strip problem is
//! the ODE
//!
//! ```text
//! û'' - k² û = (iK^T p)·F̂^α + ∂_y F̂^y + F̂^0,   -a < y < 0,
//! û(0) = ξ̂,   û'(-a) - τ û(-a) = Ĵ,
//! ```
//!
//! with `k = |K^T p|` and `τ` the transparent-condition symbol. The
//! collocation solver lives here; [`oracle`] holds the closed-form Green's
//! function solution used to check it.

pub mod oracle;

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::chebyshev::ChebyshevBasis;
use crate::error::{Error, Result};
use crate::lattice::{Depth, LatticeSpec};

type C = Complex64;

/// The transparent (exact Robin) condition imposed at `y = -a`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransparentOperator {
    lattice: LatticeSpec,
    a: f64,
}

impl TransparentOperator {
    pub fn new(lattice: LatticeSpec, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidArgument(format!("artificial depth a = {a} must be positive")));
        }
        if let Depth::Finite(h) = lattice.depth() {
            if h <= a {
                return Err(Error::InvalidArgument(format!(
                    "fluid depth h = {h} must exceed the artificial boundary depth a = {a}"
                )));
            }
        }
        Ok(TransparentOperator { lattice, a })
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn artificial_depth(&self) -> f64 {
        self.a
    }

    /// Symbol as a function of the wavenumber `k = |K^T p|`.
    pub fn symbol_of(&self, k: f64) -> f64 {
        match self.lattice.depth() {
            Depth::Infinite => k,
            Depth::Finite(h) => k * ((h - self.a) * k).tanh(),
        }
    }

    /// `|K^T p|` in infinite depth, `|K^T p| tanh((h-a)|K^T p|)` in finite depth.
    pub fn symbol(&self, p: &[i64]) -> Result<f64> {
        Ok(self.symbol_of(self.lattice.wavenumber(p)?))
    }
}

/// Volumetric forcing of one mode, as Chebyshev coefficient vectors. An
/// empty vector stands for a zero channel.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModeForcing {
    /// One vector per physical direction.
    pub alpha: Vec<Vec<C>>,
    pub y: Vec<C>,
    pub zero: Vec<C>,
}

impl ModeForcing {
    pub fn is_zero(&self) -> bool {
        self.alpha.iter().all(Vec::is_empty) && self.y.is_empty() && self.zero.is_empty()
    }
}

/// One Fourier mode's boundary value problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeBvp {
    /// `K^T p`.
    pub kt: Vec<f64>,
    /// Transparent symbol at this mode.
    pub tau: f64,
    pub dirichlet_top: C,
    pub robin_bottom: C,
    pub forcing: ModeForcing,
}

impl ModeBvp {
    /// Unforced problem in infinite depth (`τ = k`) with a scalar wavevector.
    pub fn homogeneous(k: f64, dirichlet_top: C, robin_bottom: C) -> Self {
        ModeBvp { kt: vec![k], tau: k, dirichlet_top, robin_bottom, forcing: ModeForcing::default() }
    }

    pub fn wavenumber(&self) -> f64 {
        self.kt.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Solution of a [`ModeBvp`]: Chebyshev coefficients, grid values, and the
/// boundary traces.
#[derive(Debug, Clone)]
pub struct ModeSolution {
    pub coeffs: Vec<C>,
    pub values: Vec<C>,
    pub top: C,
    pub dtop: C,
    pub bottom: C,
    pub dbottom: C,
}

/// Chebyshev collocation solver. The second-derivative matrix is built once
/// per `(N_y, a)` and shared read-only.
#[derive(Debug, Clone)]
pub struct ModeSolver {
    basis: Arc<ChebyshevBasis>,
    d2: Vec<f64>,
}

/// Tolerance on `F̂^y(-a) = 0`, relative to the channel's coefficient scale
/// when that exceeds one.
pub const FY_BOTTOM_TOL: f64 = 1e-10;

impl ModeSolver {
    pub fn new(basis: Arc<ChebyshevBasis>) -> Self {
        let m = basis.len();
        let d = basis.diff_matrix();
        let mut d2 = vec![0.0; m * m];
        for i in 0..m {
            for k in 0..m {
                let dik = d[i * m + k];
                if dik == 0.0 {
                    continue;
                }
                for j in 0..m {
                    d2[i * m + j] += dik * d[k * m + j];
                }
            }
        }
        ModeSolver { basis, d2 }
    }

    pub fn basis(&self) -> &Arc<ChebyshevBasis> {
        &self.basis
    }

    /// Right-hand side `(iK^Tp)·F̂^α + ∂_y F̂^y + F̂^0` as Chebyshev coefficients.
    pub fn assemble_rhs(&self, bvp: &ModeBvp) -> Result<Vec<C>> {
        let m = self.basis.len();
        let mut rhs = vec![C::new(0.0, 0.0); m];
        let check_len = |v: &Vec<C>| -> Result<()> {
            if v.is_empty() || v.len() == m {
                Ok(())
            } else {
                Err(Error::DimensionMismatch { expected: m, got: v.len() })
            }
        };
        if !bvp.forcing.alpha.is_empty() && bvp.forcing.alpha.len() != bvp.kt.len() {
            return Err(Error::DimensionMismatch { expected: bvp.kt.len(), got: bvp.forcing.alpha.len() });
        }
        for (comp, &kj) in bvp.forcing.alpha.iter().zip(&bvp.kt) {
            check_len(comp)?;
            for (r, c) in rhs.iter_mut().zip(comp) {
                *r += C::new(0.0, kj) * c;
            }
        }
        check_len(&bvp.forcing.y)?;
        if !bvp.forcing.y.is_empty() {
            let scale = bvp.forcing.y.iter().fold(1.0f64, |s, c| s.max(c.norm()));
            let at_bottom = self.basis.bottom(&bvp.forcing.y).norm();
            if at_bottom > FY_BOTTOM_TOL * scale {
                return Err(Error::InvalidArgument(format!(
                    "F^y must vanish at y = -a, found |F^y(-a)| = {at_bottom:e}"
                )));
            }
            for (r, c) in rhs.iter_mut().zip(self.basis.diff_coeffs(&bvp.forcing.y)) {
                *r += c;
            }
        }
        check_len(&bvp.forcing.zero)?;
        for (r, c) in rhs.iter_mut().zip(&bvp.forcing.zero) {
            *r += c;
        }
        Ok(rhs)
    }

    /// Solves for grid values given the right side at the collocation points.
    /// Row 0 carries the Dirichlet condition and the last row the Robin one.
    pub fn solve_values(&self, k: f64, tau: f64, top: C, bottom: C, rhs_values: &[C]) -> Result<Vec<C>> {
        let m = self.basis.len();
        if m == 1 {
            return Ok(vec![top]);
        }
        let n = m - 1;
        let d = self.basis.diff_matrix();
        let k2 = k * k;
        let mat = DMatrix::from_fn(m, m, |i, j| {
            if i == 0 {
                if j == 0 { 1.0 } else { 0.0 }
            } else if i == n {
                d[n * m + j] - if j == n { tau } else { 0.0 }
            } else {
                self.d2[i * m + j] - if i == j { k2 } else { 0.0 }
            }
        });
        let mut b = DMatrix::<f64>::zeros(m, 2);
        for i in 0..m {
            let v = if i == 0 {
                top
            } else if i == n {
                bottom
            } else {
                rhs_values[i]
            };
            b[(i, 0)] = v.re;
            b[(i, 1)] = v.im;
        }
        let x = mat
            .lu()
            .solve(&b)
            .ok_or_else(|| Error::Singular(format!("collocation matrix for k = {k}, tau = {tau}")))?;
        Ok((0..m).map(|i| C::new(x[(i, 0)], x[(i, 1)])).collect())
    }

    /// Solves one mode's boundary value problem.
    pub fn solve(&self, bvp: &ModeBvp) -> Result<ModeSolution> {
        let rhs = self.assemble_rhs(bvp)?;
        let rhs_values = self.basis.coeffs_to_values(&rhs);
        let values =
            self.solve_values(bvp.wavenumber(), bvp.tau, bvp.dirichlet_top, bvp.robin_bottom, &rhs_values)?;
        let coeffs = self.basis.values_to_coeffs(&values);
        let dcoeffs = self.basis.diff_coeffs(&coeffs);
        Ok(ModeSolution {
            top: self.basis.top(&coeffs),
            bottom: self.basis.bottom(&coeffs),
            dtop: self.basis.top(&dcoeffs),
            dbottom: self.basis.bottom(&dcoeffs),
            coeffs,
            values,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> C {
        C::new(x, 0.0)
    }

    fn k2d(depth: Depth) -> LatticeSpec {
        LatticeSpec::new(&[vec![1.0], vec![2f64.sqrt()]], depth).unwrap()
    }

    #[test]
    fn transparent_symbol_examples() {
        let t = TransparentOperator::new(k2d(Depth::Infinite), 0.1).unwrap();
        assert_eq!(t.symbol(&[0, 0]).unwrap(), 0.0);
        let k = 1.0 + 2f64.sqrt();
        assert!((t.symbol(&[1, 1]).unwrap() - k).abs() < 1e-15);
        let tf = TransparentOperator::new(k2d(Depth::Finite(0.25)), 0.1).unwrap();
        assert_eq!(tf.symbol(&[0, 0]).unwrap(), 0.0);
        let expected = k * (0.15 * k).tanh();
        assert!((tf.symbol(&[1, 1]).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.8379508438).abs() < 1e-9);
        assert!(TransparentOperator::new(k2d(Depth::Finite(0.1)), 0.1).is_err());
    }

    #[test]
    fn homogeneous_solutions() {
        let solver = ModeSolver::new(ChebyshevBasis::new(16, 0.1).unwrap());
        let k = 3.0;
        let sol = solver.solve(&ModeBvp::homogeneous(k, re(1.0), re(0.0))).unwrap();
        for (y, v) in solver.basis().points().iter().zip(&sol.values) {
            assert!((v - re((k * y).exp())).norm() < 1e-13);
        }
        let sol = solver.solve(&ModeBvp::homogeneous(0.0, re(0.0), re(1.0))).unwrap();
        for (y, v) in solver.basis().points().iter().zip(&sol.values) {
            assert!((v - re(*y)).norm() < 1e-13);
        }
    }

    #[test]
    fn manufactured_cos_times_exponential() {
        let a = 0.1;
        let basis = ChebyshevBasis::new(32, a).unwrap();
        let solver = ModeSolver::new(basis.clone());
        let k = 1.0 + 2f64.sqrt();
        // u* = cos(y) e^{ky}; u*'' - k² u* = (-cos y - 2k sin y) e^{ky}
        let exact = |y: f64| y.cos() * (k * y).exp();
        let dexact = |y: f64| (k * y.cos() - y.sin()) * (k * y).exp();
        let f0: Vec<C> = basis.points().iter().map(|&y| re((-y.cos() - 2.0 * k * y.sin()) * (k * y).exp())).collect();
        let bvp = ModeBvp {
            kt: vec![k],
            tau: k,
            dirichlet_top: re(exact(0.0)),
            robin_bottom: re(dexact(-a) - k * exact(-a)),
            forcing: ModeForcing { zero: basis.values_to_coeffs(&f0), ..Default::default() },
        };
        let sol = solver.solve(&bvp).unwrap();
        for (y, v) in basis.points().iter().zip(&sol.values) {
            assert!((v - re(exact(*y))).norm() < 1e-10);
        }
    }

    #[test]
    fn finite_depth_mode_matches_cosh_profile() {
        let (a, h) = (0.1, 0.25);
        let t = TransparentOperator::new(k2d(Depth::Finite(h)), a).unwrap();
        let k = 1.0 + 2f64.sqrt();
        let basis = ChebyshevBasis::new(16, a).unwrap();
        let solver = ModeSolver::new(basis.clone());
        let bvp = ModeBvp { tau: t.symbol_of(k), ..ModeBvp::homogeneous(k, re(1.0), re(0.0)) };
        let sol = solver.solve(&bvp).unwrap();
        for (y, v) in basis.points().iter().zip(&sol.values) {
            let exact = (k * (h + y)).cosh() / (k * h).cosh();
            assert!((v - re(exact)).norm() < 1e-13);
        }
        assert!((sol.dtop - re(k * (k * h).tanh())).norm() < 1e-11);
    }

    #[test]
    fn large_wavenumber_is_stable() {
        let a = 0.1;
        let solver = ModeSolver::new(ChebyshevBasis::new(32, a).unwrap());
        let k = 1e3;
        let basis = solver.basis().clone();
        let f0: Vec<C> = basis.points().iter().map(|&y| re(1.0 + y)).collect();
        let bvp = ModeBvp {
            forcing: ModeForcing { zero: basis.values_to_coeffs(&f0), ..Default::default() },
            ..ModeBvp::homogeneous(k, re(1.0), re(2.0))
        };
        let sol = solver.solve(&bvp).unwrap();
        assert!(sol.values.iter().all(|v| v.re.is_finite() && v.im.is_finite()));
        let d = basis.diff_values(&sol.values);
        let n = basis.n_y();
        assert!((sol.values[0] - re(1.0)).norm() <= 1e-8);
        assert!((d[n] - sol.values[n] * k - re(2.0)).norm() <= 1e-8 * 2.0);
    }

    #[test]
    fn rejects_nonvanishing_fy() {
        let basis = ChebyshevBasis::new(8, 0.1).unwrap();
        let solver = ModeSolver::new(basis.clone());
        let fy: Vec<C> = basis.points().iter().map(|_| re(1.0)).collect();
        let bvp = ModeBvp {
            forcing: ModeForcing { y: basis.values_to_coeffs(&fy), ..Default::default() },
            ..ModeBvp::homogeneous(1.0, re(0.0), re(0.0))
        };
        assert!(matches!(solver.solve(&bvp), Err(Error::InvalidArgument(_))));
    }
}
