//! Chebyshev representation on the strip `y ∈ [-a, 0]`.
//!
//! Functions are expanded in `T_q((2y + a)/a)`, `0 ≤ q ≤ N_y`, and collocated
//! at the extrema points `y_r = (a/2)(cos(πr/N_y) - 1)`, so `y_0 = 0` is the
//! top and `y_{N_y} = -a` the bottom of the strip.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

type C = Complex64;

pub struct ChebyshevBasis {
    n_y: usize,
    a: f64,
    points: Vec<f64>,
    /// Collocation derivative `d/dy`, row-major `(N_y+1)²`.
    diff: Vec<f64>,
    fft: Option<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for ChebyshevBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ChebyshevBasis").field("n_y", &self.n_y).field("a", &self.a).finish()
    }
}

impl ChebyshevBasis {
    pub fn new(n_y: usize, a: f64) -> Result<Arc<Self>> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidArgument(format!("strip depth a = {a} must be positive")));
        }
        let n = n_y;
        let x: Vec<f64> = (0..=n)
            .map(|r| if n == 0 { 1.0 } else { (std::f64::consts::PI * r as f64 / n as f64).cos() })
            .collect();
        let points = x.iter().map(|&x| 0.5 * a * (x - 1.0)).collect();

        // Gauss-Lobatto differentiation matrix in x, diagonal by negative row sums.
        let m = n + 1;
        let mut diff = vec![0.0; m * m];
        if n > 0 {
            let cbar = |i: usize| if i == 0 || i == n { 2.0 } else { 1.0 };
            for i in 0..m {
                let mut row_sum = 0.0;
                for j in 0..m {
                    if i == j {
                        continue;
                    }
                    let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                    let v = cbar(i) / cbar(j) * sign / (x[i] - x[j]);
                    diff[i * m + j] = v;
                    row_sum += v;
                }
                diff[i * m + i] = -row_sum;
            }
            let chain = 2.0 / a;
            diff.iter_mut().for_each(|v| *v *= chain);
        }
        let fft = (n > 0).then(|| FftPlanner::new().plan_fft_forward(2 * n));
        Ok(Arc::new(ChebyshevBasis { n_y, a, points, diff, fft }))
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    pub fn len(&self) -> usize {
        self.n_y + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn strip_depth(&self) -> f64 {
        self.a
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Maps `y ∈ [-a, 0]` to the Chebyshev argument in `[-1, 1]`.
    pub fn argument(&self, y: f64) -> f64 {
        (2.0 * y + self.a) / self.a
    }

    pub fn diff_matrix(&self) -> &[f64] {
        &self.diff
    }

    /// Sums `Σ_j w_j cos(π q j / N)` style DCT-I through a length-`2N` FFT of
    /// the even extension; returns `W_q / 2`.
    fn dct1(&self, v: &[C]) -> Vec<C> {
        let n = self.n_y;
        let fft = self.fft.as_ref().expect("dct1 needs N_y > 0");
        let mut buf = Vec::with_capacity(2 * n);
        buf.extend_from_slice(v);
        buf.extend(v[1..n].iter().rev());
        fft.process(&mut buf);
        buf.truncate(n + 1);
        buf.iter_mut().for_each(|w| *w *= 0.5);
        buf
    }

    /// Grid values `u(y_r)` to coefficients `û_q`.
    pub fn values_to_coeffs(&self, values: &[C]) -> Vec<C> {
        debug_assert_eq!(values.len(), self.len());
        let n = self.n_y;
        if n == 0 {
            return values.to_vec();
        }
        let w = self.dct1(values);
        w.iter()
            .enumerate()
            .map(|(q, s)| {
                let cbar = if q == 0 || q == n { 2.0 } else { 1.0 };
                s * (2.0 / (n as f64 * cbar))
            })
            .collect()
    }

    /// Coefficients `û_q` to grid values `u(y_r)`.
    pub fn coeffs_to_values(&self, coeffs: &[C]) -> Vec<C> {
        debug_assert_eq!(coeffs.len(), self.len());
        let n = self.n_y;
        if n == 0 {
            return coeffs.to_vec();
        }
        let mut scaled = coeffs.to_vec();
        scaled[0] *= 2.0;
        scaled[n] *= 2.0;
        self.dct1(&scaled)
    }

    /// Coefficients of `∂_y u` by the backward recurrence
    /// `c'_{q-1} = c'_{q+1} + 2q c_q`, times the chain factor `2/a`.
    pub fn diff_coeffs(&self, coeffs: &[C]) -> Vec<C> {
        let n = self.n_y;
        let zero = C::new(0.0, 0.0);
        let mut out = vec![zero; n + 1];
        if n == 0 {
            return out;
        }
        for q in (1..=n).rev() {
            let next = if q < n { out[q + 1] } else { zero };
            out[q - 1] = next + coeffs[q] * (2.0 * q as f64);
        }
        out[0] *= 0.5;
        let chain = 2.0 / self.a;
        out.iter_mut().for_each(|c| *c *= chain);
        out
    }

    /// Collocation derivative of grid values.
    pub fn diff_values(&self, values: &[C]) -> Vec<C> {
        let m = self.len();
        (0..m)
            .map(|i| {
                let row = &self.diff[i * m..(i + 1) * m];
                row.iter().zip(values).map(|(d, v)| v * *d).sum()
            })
            .collect()
    }

    /// Clenshaw evaluation at `y`.
    pub fn eval(&self, coeffs: &[C], y: f64) -> C {
        let x = self.argument(y);
        let zero = C::new(0.0, 0.0);
        let (mut b1, mut b2) = (zero, zero);
        for c in coeffs.iter().skip(1).rev() {
            let b0 = c + b1 * (2.0 * x) - b2;
            b2 = b1;
            b1 = b0;
        }
        coeffs[0] + b1 * x - b2
    }

    /// Value at `y = 0`, where every `T_q` equals one.
    pub fn top(&self, coeffs: &[C]) -> C {
        coeffs.iter().sum()
    }

    /// Value at `y = -a`, where `T_q = (-1)^q`.
    pub fn bottom(&self, coeffs: &[C]) -> C {
        coeffs.iter().enumerate().map(|(q, c)| if q % 2 == 0 { *c } else { -c }).sum()
    }
}
