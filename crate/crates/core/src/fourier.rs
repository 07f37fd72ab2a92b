//! Fourier collocation on the torus: transforms, multipliers, and
//! pseudospectral products of periodic envelope functions.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, ModeSet};

type C = Complex64;

/// Shared discretization data for one `(lattice, N_α)` pair: mode set, FFT
/// plans, and the wavevectors `K^T p` of every mode.
pub struct SpectralGrid {
    lattice: LatticeSpec,
    modes: ModeSet,
    /// Row-major `len × n`.
    kt: Vec<f64>,
    wavenumbers: Vec<f64>,
    /// Mode index -> flat index in the FFT (wrapped) layout.
    fft_index: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
    padded: OnceLock<Arc<SpectralGrid>>,
}

impl std::fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("counts", &self.modes.counts())
            .field("lattice", &self.lattice)
            .finish()
    }
}

impl SpectralGrid {
    pub fn new(lattice: LatticeSpec, counts: &[usize]) -> Result<Arc<Self>> {
        if counts.len() != lattice.d_torus() {
            return Err(Error::DimensionMismatch { expected: lattice.d_torus(), got: counts.len() });
        }
        let modes = ModeSet::new(counts)?;
        let n = lattice.n_physical();
        let mut kt = Vec::with_capacity(modes.len() * n);
        let mut wavenumbers = Vec::with_capacity(modes.len());
        let mut fft_index = Vec::with_capacity(modes.len());
        for p in modes.iter() {
            let v = lattice.kt_p(p);
            wavenumbers.push(v.iter().map(|x| x * x).sum::<f64>().sqrt());
            kt.extend_from_slice(&v);
            let mut flat = 0usize;
            for (m, &pm) in p.iter().enumerate() {
                flat = flat * counts[m] + pm.rem_euclid(counts[m] as i64) as usize;
            }
            fft_index.push(flat);
        }
        let mut planner = FftPlanner::new();
        let forward = counts.iter().map(|&c| planner.plan_fft_forward(c)).collect();
        let inverse = counts.iter().map(|&c| planner.plan_fft_inverse(c)).collect();
        Ok(Arc::new(SpectralGrid {
            lattice,
            modes,
            kt,
            wavenumbers,
            fft_index,
            forward,
            inverse,
            padded: OnceLock::new(),
        }))
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn modes(&self) -> &ModeSet {
        &self.modes
    }

    pub fn counts(&self) -> &[usize] {
        self.modes.counts()
    }

    /// Number of modes, equal to the number of collocation points.
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn n_physical(&self) -> usize {
        self.lattice.n_physical()
    }

    /// `K^T p` for the mode at `index`.
    pub fn kt(&self, index: usize) -> &[f64] {
        let n = self.n_physical();
        &self.kt[index * n..(index + 1) * n]
    }

    /// `|K^T p|` for the mode at `index`.
    pub fn wavenumber(&self, index: usize) -> f64 {
        self.wavenumbers[index]
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Collocation point `α_j` for the flat grid index (row-major, last axis fastest).
    pub fn point(&self, flat: usize) -> Vec<f64> {
        let counts = self.counts();
        let mut alpha = vec![0.0; counts.len()];
        let mut rest = flat;
        for m in (0..counts.len()).rev() {
            let j = rest % counts[m];
            rest /= counts[m];
            alpha[m] = 2.0 * std::f64::consts::PI * j as f64 / counts[m] as f64;
        }
        alpha
    }

    fn fft_axes(&self, buf: &mut [C], plans: &[Arc<dyn Fft<f64>>]) {
        let counts = self.counts();
        let total = buf.len();
        let mut line = Vec::new();
        for (m, plan) in plans.iter().enumerate() {
            let len = counts[m];
            if len == 1 {
                continue;
            }
            let stride: usize = counts[m + 1..].iter().product();
            if stride == 1 {
                plan.process(buf);
                continue;
            }
            line.resize(len, C::new(0.0, 0.0));
            let block = len * stride;
            for outer in (0..total).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (j, v) in line.iter_mut().enumerate() {
                        *v = buf[base + j * stride];
                    }
                    plan.process(&mut line);
                    for (j, v) in line.iter().enumerate() {
                        buf[base + j * stride] = *v;
                    }
                }
            }
        }
    }

    /// Evaluates a coefficient vector (mode order) at the collocation points.
    pub fn to_grid(&self, coeffs: &[C]) -> Vec<C> {
        debug_assert_eq!(coeffs.len(), self.len());
        let mut buf = vec![C::new(0.0, 0.0); self.len()];
        for (c, &j) in coeffs.iter().zip(&self.fft_index) {
            buf[j] = *c;
        }
        self.fft_axes(&mut buf, &self.inverse);
        buf
    }

    /// Recovers coefficients `f̂_p = (1/|grid|) Σ_j f(α_j) e^{-ip·α_j}` from grid values.
    pub fn from_grid(&self, values: &[C]) -> Vec<C> {
        debug_assert_eq!(values.len(), self.len());
        let mut buf = values.to_vec();
        self.fft_axes(&mut buf, &self.forward);
        let scale = 1.0 / self.len() as f64;
        self.fft_index.iter().map(|&j| buf[j] * scale).collect()
    }

    /// The grid with `⌈3N_m/2⌉` points per axis used for dealiased products.
    pub fn padded(&self) -> Arc<SpectralGrid> {
        self.padded
            .get_or_init(|| {
                let counts: Vec<usize> =
                    self.counts().iter().map(|&c| if c == 1 { 1 } else { (3 * c).div_ceil(2) }).collect();
                SpectralGrid::new(self.lattice.clone(), &counts).expect("padded grid of a valid grid")
            })
            .clone()
    }

    fn pad(&self, coeffs: &[C], padded: &SpectralGrid) -> Vec<C> {
        let mut out = vec![C::new(0.0, 0.0); padded.len()];
        for (i, c) in coeffs.iter().enumerate() {
            let idx = padded.modes.index_of(self.modes.mode(i)).expect("padded set contains original");
            out[idx] = *c;
        }
        out
    }

    fn truncate(&self, coeffs: &[C], padded: &SpectralGrid) -> Vec<C> {
        (0..self.len())
            .map(|i| coeffs[padded.modes.index_of(self.modes.mode(i)).expect("contained")])
            .collect()
    }
}

/// A periodic envelope function on the torus, stored as Fourier coefficients
/// in mode-set order. Grid values are computed on demand.
#[derive(Debug, Clone)]
pub struct SurfaceField {
    grid: Arc<SpectralGrid>,
    coeffs: Vec<C>,
}

impl SurfaceField {
    pub fn zeros(grid: &Arc<SpectralGrid>) -> Self {
        SurfaceField { grid: grid.clone(), coeffs: vec![C::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_coefficients(grid: &Arc<SpectralGrid>, coeffs: Vec<C>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: coeffs.len() });
        }
        Ok(SurfaceField { grid: grid.clone(), coeffs })
    }

    pub fn from_grid_values(grid: &Arc<SpectralGrid>, values: &[C]) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(SurfaceField { grid: grid.clone(), coeffs: grid.from_grid(values) })
    }

    /// Samples `f(α)` at the collocation points and transforms.
    pub fn from_fn(grid: &Arc<SpectralGrid>, f: impl Fn(&[f64]) -> C) -> Self {
        let values: Vec<C> = (0..grid.len()).map(|j| f(&grid.point(j))).collect();
        SurfaceField { grid: grid.clone(), coeffs: grid.from_grid(&values) }
    }

    /// `amplitude · e^{ip·α}`.
    pub fn single_mode(grid: &Arc<SpectralGrid>, p: &[i64], amplitude: C) -> Result<Self> {
        let idx = grid
            .modes()
            .index_of(p)
            .ok_or_else(|| Error::InvalidArgument(format!("mode {p:?} outside the mode set")))?;
        let mut f = Self::zeros(grid);
        f.coeffs[idx] = amplitude;
        Ok(f)
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn coefficients(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coefficients(self) -> Vec<C> {
        self.coeffs
    }

    pub fn coefficient(&self, p: &[i64]) -> Option<C> {
        self.grid.modes().index_of(p).map(|i| self.coeffs[i])
    }

    pub fn grid_values(&self) -> Vec<C> {
        self.grid.to_grid(&self.coeffs)
    }

    pub fn same_grid(&self, other: &SurfaceField) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid)
    }

    fn check_grid(&self, other: &SurfaceField) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Multiplies the coefficient of every mode by `symbol(p)`.
    pub fn apply_multiplier(&self, symbol: impl Fn(&[i64]) -> C) -> SurfaceField {
        let modes = self.grid.modes();
        let coeffs = self.coeffs.iter().enumerate().map(|(i, c)| symbol(modes.mode(i)) * c).collect();
        SurfaceField { grid: self.grid.clone(), coeffs }
    }

    /// Like [`apply_multiplier`](Self::apply_multiplier) with the symbol
    /// addressed by mode index, which gives access to precomputed `K^T p`.
    pub fn apply_indexed(&self, symbol: impl Fn(usize) -> C) -> SurfaceField {
        let coeffs = self.coeffs.iter().enumerate().map(|(i, c)| symbol(i) * c).collect();
        SurfaceField { grid: self.grid.clone(), coeffs }
    }

    /// `|K^T D|^power`.
    pub fn abs_ktd_pow(&self, power: u32) -> SurfaceField {
        let g = self.grid.clone();
        self.apply_indexed(|i| C::new(g.wavenumber(i).powi(power as i32), 0.0))
    }

    /// Component `j` of `K^T ∇_α`, the symbol `i (K^T p)_j`.
    pub fn ktd_component(&self, j: usize) -> SurfaceField {
        let g = self.grid.clone();
        self.apply_indexed(|i| C::new(0.0, g.kt(i)[j]))
    }

    /// The envelope of the physical gradient, `K^T ∇_α f̃`, one field per
    /// physical direction.
    pub fn surface_gradient_k(&self) -> Vec<SurfaceField> {
        (0..self.grid.n_physical()).map(|j| self.ktd_component(j)).collect()
    }

    /// Pseudospectral product: grid values multiplied pointwise, then
    /// transformed back (no dealiasing).
    pub fn pointwise_product(&self, other: &SurfaceField) -> Result<SurfaceField> {
        self.check_grid(other)?;
        let a = self.grid_values();
        let b = other.grid_values();
        let prod: Vec<C> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        Ok(SurfaceField { grid: self.grid.clone(), coeffs: self.grid.from_grid(&prod) })
    }

    /// Product evaluated on the 3/2-padded grid and truncated back.
    pub fn pointwise_product_dealiased(&self, other: &SurfaceField) -> Result<SurfaceField> {
        self.check_grid(other)?;
        let padded = self.grid.padded();
        let a = padded.to_grid(&self.grid.pad(&self.coeffs, &padded));
        let b = padded.to_grid(&self.grid.pad(&other.coeffs, &padded));
        let prod: Vec<C> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        let full = padded.from_grid(&prod);
        Ok(SurfaceField { grid: self.grid.clone(), coeffs: self.grid.truncate(&full, &padded) })
    }

    pub fn add(&self, other: &SurfaceField) -> Result<SurfaceField> {
        self.check_grid(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(SurfaceField { grid: self.grid.clone(), coeffs })
    }

    pub fn sub(&self, other: &SurfaceField) -> Result<SurfaceField> {
        self.check_grid(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(SurfaceField { grid: self.grid.clone(), coeffs })
    }

    pub fn scale(&self, s: C) -> SurfaceField {
        SurfaceField { grid: self.grid.clone(), coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// `self += s · other`.
    pub fn axpy(&mut self, s: C, other: &SurfaceField) -> Result<()> {
        self.check_grid(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += s * b;
        }
        Ok(())
    }

    /// Discrete sup norm over the collocation grid.
    pub fn sup_norm(&self) -> f64 {
        self.grid_values().iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Largest coefficient modulus.
    pub fn max_coefficient(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// `max |f̂_{-p} - conj(f̂_p)|` over the pairs present in the mode set.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let modes = self.grid.modes();
        (0..self.coeffs.len())
            .filter_map(|i| modes.index_of_negated(i).map(|j| (self.coeffs[j] - self.coeffs[i].conj()).norm()))
            .fold(0.0, f64::max)
    }

    /// Conjugate-symmetric part `(f̂_p + conj(f̂_{-p}))/2`, the coefficients of
    /// `Re f`. Unpaired modes are left alone.
    pub fn real_part(&self) -> SurfaceField {
        let modes = self.grid.modes();
        let coeffs = (0..self.coeffs.len())
            .map(|i| match modes.index_of_negated(i) {
                Some(j) => (self.coeffs[i] + self.coeffs[j].conj()) * 0.5,
                None => self.coeffs[i],
            })
            .collect();
        SurfaceField { grid: self.grid.clone(), coeffs }
    }

    /// Discrete `L²` pairing `Σ_p f̂_p conj(ĝ_p)`, equal to the grid mean of `f ḡ`.
    pub fn inner(&self, other: &SurfaceField) -> Result<C> {
        self.check_grid(other)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum())
    }

    /// Ratio of coefficient energy in the outer quarter of each axis's range
    /// to the total energy.
    pub fn tail_energy_ratio(&self) -> f64 {
        let modes = self.grid.modes();
        let mut total = 0.0;
        let mut tail = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = c.norm_sqr();
            total += e;
            let outer = modes.mode(i).iter().zip(modes.counts()).any(|(&p, &n)| {
                n >= 4 && (p.unsigned_abs() as f64) > 0.375 * n as f64
            });
            if outer {
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
