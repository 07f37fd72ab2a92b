//! Quasiperiodic lattice geometry and truncated Fourier mode sets.
//!
//! A quasiperiodic function of `x ∈ R^n` is the restriction of a function
//! periodic on the torus `[0, 2π)^d` to the plane `α = K x`. Everything in
//! this crate works with the periodic envelope on the torus; the matrix `K`
//! only enters through the physical wavevector `K^T p` of each mode `p`.

use crate::error::{Error, Result};

/// Default truncation radius for the integer-independence check on `K`.
pub const DEFAULT_RESONANCE_RADIUS: i64 = 8;

/// Fluid depth below the mean interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Depth {
    Infinite,
    Finite(f64),
}

impl Depth {
    pub fn is_finite(&self) -> bool {
        matches!(self, Depth::Finite(_))
    }
}

/// Quasiperiodicity data: physical dimension `n`, torus dimension `d`, the
/// `d × n` matrix `K`, and the fluid depth.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    n_physical: usize,
    d_torus: usize,
    /// Row-major `d × n`.
    k: Vec<f64>,
    depth: Depth,
}

impl LatticeSpec {
    /// Builds a lattice from the rows of `K`, checking integer independence
    /// of the rows up to [`DEFAULT_RESONANCE_RADIUS`].
    pub fn new(k_rows: &[Vec<f64>], depth: Depth) -> Result<Self> {
        Self::with_resonance_radius(k_rows, depth, DEFAULT_RESONANCE_RADIUS)
    }

    pub fn with_resonance_radius(k_rows: &[Vec<f64>], depth: Depth, radius: i64) -> Result<Self> {
        let d = k_rows.len();
        if d == 0 {
            return Err(Error::InvalidArgument("K has no rows".into()));
        }
        let n = k_rows[0].len();
        if n == 0 {
            return Err(Error::InvalidArgument("K has no columns".into()));
        }
        if let Some(row) = k_rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: row.len() });
        }
        if d <= n {
            return Err(Error::InvalidArgument(format!(
                "torus dimension d = {d} must exceed physical dimension n = {n}"
            )));
        }
        if k_rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("K has non-finite entries".into()));
        }
        if let Depth::Finite(h) = depth {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidArgument(format!("depth h = {h} must be positive")));
            }
        }
        let lattice = LatticeSpec {
            n_physical: n,
            d_torus: d,
            k: k_rows.iter().flatten().copied().collect(),
            depth,
        };
        lattice.check_resonance(radius)?;
        Ok(lattice)
    }

    /// Rejects `K` if some nonzero `p` with `|p|_∞ ≤ radius` has `K^T p ≈ 0`.
    fn check_resonance(&self, radius: i64) -> Result<()> {
        let scale = self.k.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let side = (2 * radius + 1) as usize;
        let total = side.pow(self.d_torus as u32);
        let mut p = vec![0i64; self.d_torus];
        for flat in 0..total {
            let mut rest = flat;
            for m in (0..self.d_torus).rev() {
                p[m] = (rest % side) as i64 - radius;
                rest /= side;
            }
            if p.iter().all(|&v| v == 0) {
                continue;
            }
            if self.wavenumber_unchecked(&p) <= 1e-12 * scale {
                return Err(Error::Resonant(p.clone()));
            }
        }
        Ok(())
    }

    pub fn n_physical(&self) -> usize {
        self.n_physical
    }

    pub fn d_torus(&self) -> usize {
        self.d_torus
    }

    pub fn depth(&self) -> Depth {
        self.depth
    }

    /// Entry `K[row][col]`.
    pub fn k(&self, row: usize, col: usize) -> f64 {
        self.k[row * self.n_physical + col]
    }

    /// The physical wavevector `K^T p`.
    pub fn kt_p(&self, p: &[i64]) -> Vec<f64> {
        let n = self.n_physical;
        let mut out = vec![0.0; n];
        for (m, &pm) in p.iter().enumerate() {
            if pm == 0 {
                continue;
            }
            let pm = pm as f64;
            for (j, o) in out.iter_mut().enumerate() {
                *o += self.k[m * n + j] * pm;
            }
        }
        out
    }

    fn wavenumber_unchecked(&self, p: &[i64]) -> f64 {
        self.kt_p(p).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `|K^T p|`, exactly zero for `p = 0`.
    pub fn wavenumber(&self, p: &[i64]) -> Result<f64> {
        if p.len() != self.d_torus {
            return Err(Error::DimensionMismatch { expected: self.d_torus, got: p.len() });
        }
        Ok(self.wavenumber_unchecked(p))
    }
}

/// The truncated set of torus modes `p` with
/// `-⌊N_m/2⌋ ≤ p_m ≤ ⌈N_m/2⌉ - 1`, stored in row-major order (last axis
/// fastest, each axis ascending). For even `N_m` this is the usual
/// `-N_m/2 … N_m/2 - 1` DFT range; `N_m = 1` holds only `p_m = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeSet {
    counts: Vec<usize>,
    modes: Vec<i64>,
}

impl ModeSet {
    pub fn new(counts: &[usize]) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidArgument("mode counts are empty".into()));
        }
        if counts.contains(&0) {
            return Err(Error::InvalidArgument(format!("mode counts {counts:?} must be positive")));
        }
        let d = counts.len();
        let total: usize = counts.iter().product();
        let mut modes = Vec::with_capacity(total * d);
        for flat in 0..total {
            let mut rest = flat;
            let start = modes.len();
            modes.resize(start + d, 0);
            for m in (0..d).rev() {
                let c = rest % counts[m];
                rest /= counts[m];
                modes[start + m] = c as i64 - (counts[m] / 2) as i64;
            }
        }
        Ok(ModeSet { counts: counts.to_vec(), modes })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn len(&self) -> usize {
        self.modes.len() / self.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn mode(&self, index: usize) -> &[i64] {
        let d = self.dim();
        &self.modes[index * d..(index + 1) * d]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[i64]> + '_ {
        self.modes.chunks_exact(self.dim())
    }

    /// Lowest and highest representable value of `p_m`.
    pub fn range(&self, axis: usize) -> (i64, i64) {
        let n = self.counts[axis];
        let lo = -((n / 2) as i64);
        (lo, lo + n as i64 - 1)
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.len() == self.dim()
            && p.iter().enumerate().all(|(m, &v)| {
                let (lo, hi) = self.range(m);
                (lo..=hi).contains(&v)
            })
    }

    pub fn index_of(&self, p: &[i64]) -> Option<usize> {
        if !self.contains(p) {
            return None;
        }
        let mut idx = 0usize;
        for (m, &v) in p.iter().enumerate() {
            let (lo, _) = self.range(m);
            idx = idx * self.counts[m] + (v - lo) as usize;
        }
        Some(idx)
    }

    /// Index of the mode `-p`, when representable.
    pub fn index_of_negated(&self, index: usize) -> Option<usize> {
        let neg: Vec<i64> = self.mode(index).iter().map(|v| -v).collect();
        self.index_of(&neg)
    }

    /// Whether some even-length axis sits at its unpaired `-N_m/2` mode.
    pub fn is_nyquist(&self, index: usize) -> bool {
        self.mode(index).iter().enumerate().any(|(m, &v)| {
            let n = self.counts[m];
            n.is_multiple_of(2) && n > 1 && v == -((n / 2) as i64)
        })
    }
}

/// Smallest nonzero wavenumber `|K^T p|` over the mode set and the first mode
/// (in set order) attaining it. `None` when the set holds only `p = 0`.
pub fn smallest_divisor(lattice: &LatticeSpec, modes: &ModeSet) -> Option<(f64, Vec<i64>)> {
    let mut best: Option<(f64, &[i64])> = None;
    for p in modes.iter() {
        if p.iter().all(|&v| v == 0) {
            continue;
        }
        let k = lattice.wavenumber_unchecked(p);
        if best.is_none_or(|(b, _)| k < b) {
            best = Some((k, p));
        }
    }
    best.map(|(k, p)| (k, p.to_vec()))
}
