//! Fourier-Chebyshev fields on `P(Γ) × [-a, 0]`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::chebyshev::ChebyshevBasis;
use crate::error::{Error, Result};
use crate::fourier::{SpectralGrid, SurfaceField};

type C = Complex64;

/// Laterally periodic function of `(α, y)` stored as coefficients
/// `û_{p,q}` of `T_q((2y+a)/a) e^{ip·α}`, laid out level-major
/// (`index = q · |modes| + mode`).
#[derive(Debug, Clone)]
pub struct VolumeField {
    grid: Arc<SpectralGrid>,
    basis: Arc<ChebyshevBasis>,
    coeffs: Vec<C>,
}

/// Applies `op` to the column of every mode of a level-major array.
fn map_columns(data: &[C], modes: usize, levels: usize, op: impl Fn(&[C]) -> Vec<C>) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); data.len()];
    let mut col = vec![C::new(0.0, 0.0); levels];
    for i in 0..modes {
        for (q, c) in col.iter_mut().enumerate() {
            *c = data[q * modes + i];
        }
        for (q, v) in op(&col).into_iter().enumerate() {
            out[q * modes + i] = v;
        }
    }
    out
}

impl VolumeField {
    pub fn zeros(grid: &Arc<SpectralGrid>, basis: &Arc<ChebyshevBasis>) -> Self {
        VolumeField {
            grid: grid.clone(),
            basis: basis.clone(),
            coeffs: vec![C::new(0.0, 0.0); grid.len() * basis.len()],
        }
    }

    pub fn from_coefficients(grid: &Arc<SpectralGrid>, basis: &Arc<ChebyshevBasis>, coeffs: Vec<C>) -> Result<Self> {
        let expected = grid.len() * basis.len();
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: coeffs.len() });
        }
        Ok(VolumeField { grid: grid.clone(), basis: basis.clone(), coeffs })
    }

    /// From Fourier coefficients in `α` and grid values in `y`
    /// (`index = r · |modes| + mode`).
    pub fn from_hybrid(grid: &Arc<SpectralGrid>, basis: &Arc<ChebyshevBasis>, hybrid: &[C]) -> Result<Self> {
        let expected = grid.len() * basis.len();
        if hybrid.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: hybrid.len() });
        }
        let coeffs = map_columns(hybrid, grid.len(), basis.len(), |c| basis.values_to_coeffs(c));
        Ok(VolumeField { grid: grid.clone(), basis: basis.clone(), coeffs })
    }

    /// Fourier coefficients in `α`, grid values in `y`.
    pub fn to_hybrid(&self) -> Vec<C> {
        map_columns(&self.coeffs, self.grid.len(), self.basis.len(), |c| self.basis.coeffs_to_values(c))
    }

    /// From values at `(α_j, y_r)`, laid out `r · |grid| + j`.
    pub fn from_grid_values(grid: &Arc<SpectralGrid>, basis: &Arc<ChebyshevBasis>, values: &[C]) -> Result<Self> {
        let m = grid.len();
        let expected = m * basis.len();
        if values.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: values.len() });
        }
        let mut hybrid = Vec::with_capacity(expected);
        for level in values.chunks_exact(m) {
            hybrid.extend(grid.from_grid(level));
        }
        Self::from_hybrid(grid, basis, &hybrid)
    }

    /// Values at `(α_j, y_r)`, laid out `r · |grid| + j`.
    pub fn to_grid_values(&self) -> Vec<C> {
        let m = self.grid.len();
        let hybrid = self.to_hybrid();
        let mut out = Vec::with_capacity(hybrid.len());
        for level in hybrid.chunks_exact(m) {
            out.extend(self.grid.to_grid(level));
        }
        out
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn basis(&self) -> &Arc<ChebyshevBasis> {
        &self.basis
    }

    pub fn coefficients(&self) -> &[C] {
        &self.coeffs
    }

    /// Chebyshev coefficients of mode `index`.
    pub fn mode_column(&self, index: usize) -> Vec<C> {
        let m = self.grid.len();
        (0..self.basis.len()).map(|q| self.coeffs[q * m + index]).collect()
    }

    fn check(&self, other: &VolumeField) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) && Arc::ptr_eq(&self.basis, &other.basis) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `∂_y` by the Chebyshev coefficient recurrence.
    pub fn diff_y(&self) -> VolumeField {
        let coeffs = map_columns(&self.coeffs, self.grid.len(), self.basis.len(), |c| self.basis.diff_coeffs(c));
        VolumeField { grid: self.grid.clone(), basis: self.basis.clone(), coeffs }
    }

    /// Multiplies every `(p, q)` coefficient by `symbol(mode index)`.
    pub fn apply_indexed(&self, symbol: impl Fn(usize) -> C) -> VolumeField {
        let m = self.grid.len();
        let sym: Vec<C> = (0..m).map(symbol).collect();
        let coeffs = self.coeffs.iter().enumerate().map(|(k, c)| c * sym[k % m]).collect();
        VolumeField { grid: self.grid.clone(), basis: self.basis.clone(), coeffs }
    }

    /// Component `j` of `K^T ∇_α`.
    pub fn ktd_component(&self, j: usize) -> VolumeField {
        let g = self.grid.clone();
        self.apply_indexed(|i| C::new(0.0, g.kt(i)[j]))
    }

    fn trace(&self, weight: impl Fn(usize) -> f64) -> SurfaceField {
        let m = self.grid.len();
        let mut out = vec![C::new(0.0, 0.0); m];
        for (q, level) in self.coeffs.chunks_exact(m).enumerate() {
            let w = weight(q);
            for (o, c) in out.iter_mut().zip(level) {
                *o += c * w;
            }
        }
        SurfaceField::from_coefficients(&self.grid, out).expect("trace has grid length")
    }

    /// Trace at `y = 0`.
    pub fn trace_top(&self) -> SurfaceField {
        self.trace(|_| 1.0)
    }

    /// Trace at `y = -a`.
    pub fn trace_bottom(&self) -> SurfaceField {
        self.trace(|q| if q % 2 == 0 { 1.0 } else { -1.0 })
    }

    /// Collocation product at the `(α_j, y_r)` grid.
    pub fn pointwise_product(&self, other: &VolumeField) -> Result<VolumeField> {
        self.check(other)?;
        let a = self.to_grid_values();
        let b = other.to_grid_values();
        let prod: Vec<C> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        Self::from_grid_values(&self.grid, &self.basis, &prod)
    }

    pub fn sub(&self, other: &VolumeField) -> Result<VolumeField> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(VolumeField { grid: self.grid.clone(), basis: self.basis.clone(), coeffs })
    }

    pub fn max_coefficient(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Energy fraction held by Chebyshev degrees above `3N_y/4`.
    pub fn chebyshev_tail_ratio(&self) -> f64 {
        let m = self.grid.len();
        let cut = (3 * self.basis.n_y()) / 4;
        let mut total = 0.0;
        let mut tail = 0.0;
        for (q, level) in self.coeffs.chunks_exact(m).enumerate() {
            let e: f64 = level.iter().map(|c| c.norm_sqr()).sum();
            total += e;
            if q > cut {
                tail += e;
            }
        }
        if total > 0.0 {
            tail / total
        } else {
            0.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Depth, LatticeSpec};

    fn setup(n_y: usize, a: f64) -> (Arc<SpectralGrid>, Arc<ChebyshevBasis>) {
        let l = LatticeSpec::new(&[vec![1.0], vec![2f64.sqrt()]], Depth::Infinite).unwrap();
        (SpectralGrid::new(l, &[8, 8]).unwrap(), ChebyshevBasis::new(n_y, a).unwrap())
    }

    fn sample(g: &Arc<SpectralGrid>, b: &Arc<ChebyshevBasis>, f: impl Fn(&[f64], f64) -> C) -> Vec<C> {
        let mut v = Vec::new();
        for &y in b.points() {
            for j in 0..g.len() {
                v.push(f(&g.point(j), y));
            }
        }
        v
    }

    #[test]
    fn roundtrip() {
        let (g, b) = setup(12, 0.2);
        let vals = sample(&g, &b, |a, y| C::new((a[0] + y).cos() * (3.0 * y).exp(), a[1].sin() * y));
        let f = VolumeField::from_grid_values(&g, &b, &vals).unwrap();
        let back = f.to_grid_values();
        let sup = vals.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        let err = vals.iter().zip(&back).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        assert!(err <= 10.0 * f64::EPSILON * sup * 4.0, "{err}");
    }

    #[test]
    fn derivative_of_growing_mode() {
        let a = 0.1;
        let (g, b) = setup(16, a);
        let k = 1.0 + 2f64.sqrt();
        let vals = sample(&g, &b, |al, y| C::from_polar((k * y).exp(), al[0] + al[1]));
        let f = VolumeField::from_grid_values(&g, &b, &vals).unwrap();
        let df = f.diff_y().to_grid_values();
        let err = df.iter().zip(&vals).fold(0.0f64, |m, (d, u)| m.max((d - u * k).norm()));
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn traces_of_linear_profile() {
        let a = 0.1;
        let (g, b) = setup(4, a);
        let vals = sample(&g, &b, |al, y| C::from_polar(y + a, al[0] + al[1]));
        let f = VolumeField::from_grid_values(&g, &b, &vals).unwrap();
        let top = f.trace_top();
        assert!((top.coefficient(&[1, 1]).unwrap() - C::new(a, 0.0)).norm() < 1e-15);
        assert!(f.trace_bottom().max_coefficient() < 1e-15);
    }

    #[test]
    fn product_with_one() {
        let (g, b) = setup(6, 0.5);
        let u = VolumeField::from_grid_values(&g, &b, &sample(&g, &b, |al, y| C::new(al[0].cos() + y, 0.0))).unwrap();
        let one = VolumeField::from_grid_values(&g, &b, &sample(&g, &b, |_, _| C::new(1.0, 0.0))).unwrap();
        assert!(u.pointwise_product(&one).unwrap().sub(&u).unwrap().max_coefficient() < 1e-14);
    }
}
