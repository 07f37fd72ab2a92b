//! Manufactured solutions: exact harmonic fields whose interface traces
//! serve as input data and reference output.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{SpectralGrid, SurfaceField};
use crate::lattice::{Depth, LatticeSpec};

type C = Complex64;

/// Profile names accepted by [`profile_library`].
pub const PROFILE_NAMES: [&str; 3] = ["cos_sin_2d", "cos_cos_sin_3d", "custom"];

/// `φ̃(α, y) = L(α) Y(y)` with lateral part `A e^{iq·α}` (plus
/// `conj(A) e^{-iq·α}` when symmetrized) and vertical part `e^{|K^Tq| y}`
/// or `cosh(|K^Tq|(h+y))/cosh(|K^Tq| h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ManufacturedSolution {
    lattice: LatticeSpec,
    amplitude: C,
    mode: Vec<i64>,
    symmetrize: bool,
    kt: Vec<f64>,
    k: f64,
}

/// Values of `φ̃`, `∂_yφ̃` and `K^T∇_αφ̃` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointValues {
    pub value: C,
    pub dy: C,
    pub grad: Vec<C>,
}

impl ManufacturedSolution {
    pub fn new(lattice: LatticeSpec, amplitude: C, mode: Vec<i64>, symmetrize: bool) -> Result<Self> {
        let kt = lattice.kt_p(&mode);
        let k = lattice.wavenumber(&mode)?;
        Ok(ManufacturedSolution { lattice, amplitude, mode, symmetrize, kt, k })
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn mode(&self) -> &[i64] {
        &self.mode
    }

    pub fn amplitude(&self) -> C {
        self.amplitude
    }

    pub fn symmetrized(&self) -> bool {
        self.symmetrize
    }

    pub fn wavenumber(&self) -> f64 {
        self.k
    }

    /// `Y(y)` and `Y'(y)`. The finite-depth ratio is written with decaying
    /// exponentials only so that large `kh` does not overflow.
    pub fn vertical(&self, y: f64) -> (f64, f64) {
        let k = self.k;
        let up = (k * y).exp();
        match self.lattice.depth() {
            Depth::Infinite => (up, k * up),
            Depth::Finite(h) => {
                let down = (-k * (2.0 * h + y)).exp();
                let norm = 1.0 + (-2.0 * k * h).exp();
                ((up + down) / norm, k * (up - down) / norm)
            }
        }
    }

    pub fn eval(&self, alpha: &[f64], y: f64) -> PointValues {
        let phase: f64 = self.mode.iter().zip(alpha).map(|(q, a)| *q as f64 * a).sum();
        let e = C::from_polar(1.0, phase);
        let plus = self.amplitude * e;
        let (lateral, odd) = if self.symmetrize {
            let minus = self.amplitude.conj() * e.conj();
            (plus + minus, plus - minus)
        } else {
            (plus, plus)
        };
        let (v, dv) = self.vertical(y);
        PointValues {
            value: lateral * v,
            dy: lateral * dv,
            grad: self.kt.iter().map(|kj| odd * C::new(0.0, *kj) * v).collect(),
        }
    }

    /// Exact Dirichlet and Neumann traces at the interface `y = g̃(α)`:
    /// `ξ̃ = φ̃(α, g̃)` and `ν̃ = ∂_yφ̃ - (K^T∇g̃)·K^T∇_αφ̃` at `y = g̃`.
    pub fn exact_traces(&self, profile: &SurfaceField) -> Result<(SurfaceField, SurfaceField)> {
        let grid = profile.grid();
        if grid.lattice() != &self.lattice {
            return Err(Error::InvalidArgument("manufactured solution and profile use different lattices".into()));
        }
        let g = profile.grid_values();
        let scale = g.iter().fold(1.0f64, |m, v| m.max(v.norm()));
        if g.iter().any(|v| v.im.abs() > 1e-12 * scale) {
            return Err(Error::InvalidArgument("interface profile must be real".into()));
        }
        if let Depth::Finite(h) = self.lattice.depth() {
            let lowest = g.iter().fold(f64::INFINITY, |m, v| m.min(v.re));
            if lowest <= -h {
                return Err(Error::InvalidArgument(format!("interface reaches y = {lowest} at or below the bottom -h = {}", -h)));
            }
        }
        let dg: Vec<Vec<C>> = profile.surface_gradient_k().iter().map(SurfaceField::grid_values).collect();
        let mut xi = Vec::with_capacity(grid.len());
        let mut nu = Vec::with_capacity(grid.len());
        for (j, gj) in g.iter().enumerate() {
            let p = self.eval(&grid.point(j), gj.re);
            let slope: C = dg.iter().zip(&p.grad).map(|(d, u)| d[j].re * u).sum();
            xi.push(p.value);
            nu.push(p.dy - slope);
        }
        Ok((SurfaceField::from_grid_values(grid, &xi)?, SurfaceField::from_grid_values(grid, &nu)?))
    }
}

/// `sup|exact - approx| / sup|exact|` over the collocation grid.
pub fn relative_error(exact: &SurfaceField, approx: &SurfaceField) -> Result<f64> {
    let diff = exact.sub(approx)?;
    let denom = exact.sup_norm();
    if denom == 0.0 {
        return Err(Error::UndefinedMetric);
    }
    Ok(diff.sup_norm() / denom)
}

/// Named interface profiles.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// `cos α_1 sin α_2`.
    CosSin2d,
    /// `cos α_1 + cos α_2 + sin α_3`.
    CosCosSin3d,
    /// Explicit Fourier coefficients `(p, f̂_p)`.
    Custom(Vec<(Vec<i64>, C)>),
}

impl Profile {
    pub fn name(&self) -> &'static str {
        match self {
            Profile::CosSin2d => "cos_sin_2d",
            Profile::CosCosSin3d => "cos_cos_sin_3d",
            Profile::Custom(_) => "custom",
        }
    }

    pub fn sample(&self, grid: &Arc<SpectralGrid>) -> Result<SurfaceField> {
        let need = |d: usize| {
            if grid.modes().dim() == d {
                Ok(())
            } else {
                Err(Error::DimensionMismatch { expected: d, got: grid.modes().dim() })
            }
        };
        match self {
            Profile::CosSin2d => {
                need(2)?;
                Ok(SurfaceField::from_fn(grid, |a| C::new(a[0].cos() * a[1].sin(), 0.0)))
            }
            Profile::CosCosSin3d => {
                need(3)?;
                Ok(SurfaceField::from_fn(grid, |a| C::new(a[0].cos() + a[1].cos() + a[2].sin(), 0.0)))
            }
            Profile::Custom(list) => {
                let mut coeffs = vec![C::new(0.0, 0.0); grid.len()];
                for (p, c) in list {
                    if p.len() != grid.modes().dim() {
                        return Err(Error::DimensionMismatch { expected: grid.modes().dim(), got: p.len() });
                    }
                    let i = grid
                        .modes()
                        .index_of(p)
                        .ok_or_else(|| Error::InvalidArgument(format!("profile mode {p:?} outside the mode set")))?;
                    coeffs[i] += c;
                }
                SurfaceField::from_coefficients(grid, coeffs)
            }
        }
    }
}

/// Looks up a profile by name; `custom` takes its coefficients from `custom`.
pub fn profile_library(name: &str, custom: &[(Vec<i64>, C)], grid: &Arc<SpectralGrid>) -> Result<SurfaceField> {
    let profile = match name {
        "cos_sin_2d" => Profile::CosSin2d,
        "cos_cos_sin_3d" => Profile::CosCosSin3d,
        "custom" => Profile::Custom(custom.to_vec()),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "unknown profile {name:?}; available: {}",
                PROFILE_NAMES.join(", ")
            )))
        }
    };
    profile.sample(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev::ChebyshevBasis;
    use crate::volume::VolumeField;

    fn lattice_2d(depth: Depth) -> LatticeSpec {
        LatticeSpec::new(&[vec![1.0], vec![2f64.sqrt()]], depth).unwrap()
    }

    fn lattice_3d(depth: Depth) -> LatticeSpec {
        LatticeSpec::new(&[vec![1.0, 0.0], vec![0.0, -1.0], vec![0.5f64.sqrt(), 1.0 / 3f64.sqrt()]], depth).unwrap()
    }

    #[test]
    fn flat_traces() {
        let l = lattice_2d(Depth::Infinite);
        let g = SpectralGrid::new(l.clone(), &[16, 16]).unwrap();
        let ms = ManufacturedSolution::new(l, C::new(-3.0, 0.0), vec![1, 1], false).unwrap();
        let (xi, nu) = ms.exact_traces(&SurfaceField::zeros(&g)).unwrap();
        assert!((xi.coefficient(&[1, 1]).unwrap() - C::new(-3.0, 0.0)).norm() < 1e-14);
        let c = nu.coefficient(&[1, 1]).unwrap();
        assert!((c - C::new(-3.0 * (1.0 + 2f64.sqrt()), 0.0)).norm() < 1e-13);
        assert!((c.re + 7.2426).abs() < 1e-4);
        let flat = xi.abs_ktd_pow(1);
        assert!(flat.sub(&nu).unwrap().max_coefficient() < 1e-12);
    }

    #[test]
    fn constant_shift() {
        let l = lattice_2d(Depth::Infinite);
        let g = SpectralGrid::new(l.clone(), &[8, 8]).unwrap();
        let ms = ManufacturedSolution::new(l, C::new(-3.0, 0.0), vec![1, 1], false).unwrap();
        let c = 0.05;
        let shift = SurfaceField::from_fn(&g, |_| C::new(c, 0.0));
        let (xi, nu) = ms.exact_traces(&shift).unwrap();
        let k = 1.0 + 2f64.sqrt();
        assert!((xi.coefficient(&[1, 1]).unwrap() - C::new(-3.0 * (k * c).exp(), 0.0)).norm() < 1e-13);
        assert!(xi.abs_ktd_pow(1).sub(&nu).unwrap().max_coefficient() < 1e-12);
    }

    #[test]
    fn finite_depth_profile_has_no_bottom_flux() {
        let h = 0.25;
        let ms = ManufacturedSolution::new(lattice_3d(Depth::Finite(h)), C::new(-1.0, 0.0), vec![1, 1, 2], true).unwrap();
        let (v, dv) = ms.vertical(-h);
        assert!(dv.abs() < 1e-15);
        let k = ms.wavenumber();
        assert!((v - 1.0 / (k * h).cosh()).abs() < 1e-15);
        let (v0, dv0) = ms.vertical(0.0);
        assert!((v0 - 1.0).abs() < 1e-15);
        assert!((dv0 - k * (k * h).tanh()).abs() < 1e-14);
        let big = ManufacturedSolution::new(lattice_2d(Depth::Finite(1e3)), C::new(1.0, 0.0), vec![1, 1], false).unwrap();
        assert!(big.vertical(-1.0).0.is_finite());
    }

    #[test]
    fn harmonic_on_a_volume_grid() {
        let l = lattice_3d(Depth::Infinite);
        let g = SpectralGrid::new(l.clone(), &[8, 8, 8]).unwrap();
        let b = ChebyshevBasis::new(24, 0.5).unwrap();
        let ms = ManufacturedSolution::new(l, C::new(-1.0, 0.0), vec![1, 1, 2], true).unwrap();
        let mut vals = Vec::new();
        for &y in b.points() {
            for j in 0..g.len() {
                vals.push(ms.eval(&g.point(j), y).value);
            }
        }
        let u = VolumeField::from_grid_values(&g, &b, &vals).unwrap();
        let mut lap = u.diff_y().diff_y();
        for j in 0..2 {
            let t = u.ktd_component(j).ktd_component(j);
            let c: Vec<C> = lap.coefficients().iter().zip(t.coefficients()).map(|(a, b)| a + b).collect();
            lap = VolumeField::from_coefficients(&g, &b, c).unwrap();
        }
        assert!(lap.max_coefficient() < 1e-10, "{}", lap.max_coefficient());
    }

    #[test]
    fn symmetrized_traces_are_real() {
        let l = lattice_3d(Depth::Infinite);
        let g = SpectralGrid::new(l.clone(), &[8, 8, 8]).unwrap();
        let ms = ManufacturedSolution::new(l, C::new(-1.0, 0.5), vec![1, 1, 2], true).unwrap();
        let f = profile_library("cos_cos_sin_3d", &[], &g).unwrap().scale(C::new(0.1, 0.0));
        let (xi, nu) = ms.exact_traces(&f).unwrap();
        assert!(xi.grid_values().iter().all(|v| v.im.abs() < 1e-13));
        assert!(nu.grid_values().iter().all(|v| v.im.abs() < 1e-13));
    }

    #[test]
    fn errors() {
        let l = lattice_2d(Depth::Finite(0.1));
        let g = SpectralGrid::new(l.clone(), &[8, 8]).unwrap();
        let ms = ManufacturedSolution::new(l, C::new(1.0, 0.0), vec![1, 0], false).unwrap();
        let deep = SurfaceField::from_fn(&g, |a| C::new(0.2 * a[0].cos(), 0.0));
        assert!(matches!(ms.exact_traces(&deep), Err(Error::InvalidArgument(_))));
        let complex = SurfaceField::from_fn(&g, |a| C::new(0.0, 0.01 * a[0].cos()));
        assert!(ms.exact_traces(&complex).is_err());
    }

    #[test]
    fn relative_error_examples() {
        let g = SpectralGrid::new(lattice_2d(Depth::Infinite), &[8, 8]).unwrap();
        let exact = SurfaceField::from_fn(&g, |a| C::new(2.0 * (a[0] + a[1]).cos(), 0.0));
        assert_eq!(relative_error(&exact, &exact).unwrap(), 0.0);
        let scaled = exact.scale(C::new(1.01, 0.0));
        assert!((relative_error(&exact, &scaled).unwrap() - 0.01).abs() < 1e-15);
        let bump = exact.add(&SurfaceField::single_mode(&g, &[1, 0], C::new(1e-3, 0.0)).unwrap()).unwrap();
        assert!((relative_error(&exact, &bump).unwrap() - 5e-4).abs() < 1e-15);
        assert_eq!(relative_error(&SurfaceField::zeros(&g), &exact), Err(Error::UndefinedMetric));
    }

    #[test]
    fn library() {
        let g = SpectralGrid::new(lattice_2d(Depth::Infinite), &[8, 8]).unwrap();
        let f = profile_library("cos_sin_2d", &[], &g).unwrap();
        let nz: Vec<f64> = f.coefficients().iter().map(|c| c.norm()).filter(|m| *m > 1e-14).collect();
        assert_eq!(nz.len(), 4);
        assert!(nz.iter().all(|m| (m - 0.25).abs() < 1e-15));
        let custom = profile_library("custom", &[(vec![1, 1], C::new(0.5, 0.0)), (vec![-1, -1], C::new(0.5, 0.0))], &g).unwrap();
        for (j, v) in custom.grid_values().iter().enumerate() {
            let a = g.point(j);
            assert!((v - C::new((a[0] + a[1]).cos(), 0.0)).norm() < 1e-15);
        }
        let err = profile_library("wavy", &[], &g).unwrap_err().to_string();
        assert!(err.contains("cos_sin_2d") && err.contains("custom"));
        let g3 = SpectralGrid::new(lattice_3d(Depth::Infinite), &[8, 8, 8]).unwrap();
        let f3 = profile_library("cos_cos_sin_3d", &[], &g3).unwrap();
        assert_eq!(f3.coefficients().iter().filter(|c| c.norm() > 1e-14).count(), 6);
        assert!(profile_library("cos_sin_2d", &[], &g3).is_err());
    }
}
