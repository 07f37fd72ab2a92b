//! Summation of the perturbation series: truncated Taylor sums and Padé
//! approximants, applied per Fourier coefficient.
//!
//! Padé denominators come from the Toeplitz system
//! `Σ_{m=1}^{M} b_m c_{L+j-m} = -c_{L+j}` (`1 ≤ j ≤ M`, `c_k = 0` for `k < 0`),
//! whose numerical rank is read off an SVD. When the system is rank deficient, `M` is reduced to the
//! numerical rank and `L` kept; at rank zero the approximant is the plain
//! Taylor polynomial.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::SurfaceField;
use crate::hops::DnoExpansion;

type C = Complex64;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOL: f64 = 1e-13;

/// A denominator smaller than this fraction of `Σ|b_m ε^m|` flags a near pole.
pub const NEAR_POLE_TOL: f64 = 1e-12;

/// Modes whose scaled series stays below this fraction of the largest scaled
/// coefficient of the whole expansion are treated as roundoff and summed
/// by Taylor.
pub const NOISE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Summation {
    Taylor,
    Pade,
}

impl Summation {
    pub fn tag(&self) -> &'static str {
        match self {
            Summation::Taylor => "taylor",
            Summation::Pade => "pade",
        }
    }
}

impl fmt::Display for Summation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Summation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "taylor" => Ok(Summation::Taylor),
            "pade" => Ok(Summation::Pade),
            _ => Err(Error::InvalidArgument(format!("unknown summation {s:?}; expected taylor or pade"))),
        }
    }
}

/// `Σ_n c_n εⁿ` by Horner's rule.
pub fn taylor_sum(series: &[C], eps: f64) -> C {
    series.iter().rev().fold(C::new(0.0, 0.0), |acc, c| acc * eps + c)
}

/// Default split `L = ⌈N/2⌉`, `M = ⌊N/2⌋` for a series through order `N`.
pub fn default_degrees(order: usize) -> (usize, usize) {
    (order - order / 2, order / 2)
}

/// Rational approximant `Σ a_ℓ εˡ / Σ b_m εᵐ` with `b_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PadeApproximant {
    pub numerator: Vec<C>,
    pub denominator: Vec<C>,
    /// Degrees asked for; the denominator may be shorter after rank reduction.
    pub requested: (usize, usize),
    /// The system had rank zero and the Taylor polynomial was used instead.
    pub taylor_fallback: bool,
}

/// Value of an approximant with the size of its denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PadeValue {
    pub value: C,
    pub divisor: f64,
    pub near_pole: bool,
}

impl PadeApproximant {
    /// `[L/M]` approximant from `c_0 … c_{L+M}` (extra terms are ignored).
    pub fn new(series: &[C], l: usize, m: usize) -> Result<Self> {
        if series.len() < l + m + 1 {
            return Err(Error::InvalidArgument(format!(
                "[{l}/{m}] approximant needs {} coefficients, got {}",
                l + m + 1,
                series.len()
            )));
        }
        let c = |k: isize| if k < 0 { C::new(0.0, 0.0) } else { series[k as usize] };
        let mut mm = m;
        let mut b = Vec::new();
        while mm > 0 {
            let a = DMatrix::from_fn(mm, mm, |j, col| c(l as isize + j as isize + 1 - (col as isize + 1)));
            let rhs = DVector::from_fn(mm, |j, _| -c((l + j + 1) as isize));
            let svd = a.clone().svd(false, false);
            let smax = svd.singular_values.iter().fold(0.0f64, |s, v| s.max(*v));
            let rank = if smax > 0.0 { svd.singular_values.iter().filter(|s| **s > RANK_TOL * smax).count() } else { 0 };
            if rank < mm {
                mm = rank;
                continue;
            }
            // The SVD only decides the rank; LU with one refinement step keeps
            // the Toeplitz residual at roundoff for ill-conditioned systems.
            let lu = a.clone().lu();
            let mut x = lu.solve(&rhs).ok_or_else(|| Error::Singular(format!("[{l}/{mm}] Toeplitz system")))?;
            if let Some(dx) = lu.solve(&(&rhs - &a * &x)) {
                x += dx;
            }
            b = x.iter().copied().collect();
            break;
        }
        if mm == 0 {
            let order = l + m;
            return Ok(PadeApproximant {
                numerator: series[..=order].to_vec(),
                denominator: vec![C::new(1.0, 0.0)],
                requested: (l, m),
                taylor_fallback: m > 0,
            });
        }
        let mut denominator = Vec::with_capacity(mm + 1);
        denominator.push(C::new(1.0, 0.0));
        denominator.extend(b);
        let numerator = (0..=l)
            .map(|k| (0..=k.min(mm)).map(|j| denominator[j] * series[k - j]).sum())
            .collect();
        Ok(PadeApproximant { numerator, denominator, requested: (l, m), taylor_fallback: false })
    }

    pub fn eval(&self, eps: f64) -> Result<PadeValue> {
        let num = taylor_sum(&self.numerator, eps);
        let den = taylor_sum(&self.denominator, eps);
        let divisor = den.norm();
        if divisor == 0.0 {
            return Err(Error::Pole(eps));
        }
        let scale: f64 = self.denominator.iter().enumerate().map(|(m, b)| b.norm() * eps.abs().powi(m as i32)).sum();
        Ok(PadeValue { value: num / den, divisor, near_pole: divisor < NEAR_POLE_TOL * scale })
    }
}

/// A summed Neumann field with the diagnostics gathered along the way.
#[derive(Debug, Clone)]
pub struct SummedField {
    pub field: SurfaceField,
    /// Some Padé denominator was close to zero.
    pub pole_flag: bool,
    /// Smallest `|denominator|` over all modes (Padé only).
    pub min_divisor: Option<f64>,
    /// Modes whose Padé system degenerated to the Taylor polynomial.
    pub taylor_fallbacks: usize,
}

/// Sums the first `order + 1` corrections at `eps`, with the default Padé
/// split.
pub fn sum_expansion(expansion: &DnoExpansion, order: usize, eps: f64, method: Summation) -> Result<SummedField> {
    sum_expansion_with(expansion, order, eps, method, default_degrees(order))
}

/// Like [`sum_expansion`] with explicit Padé degrees `(L, M)`, `L + M ≤ order`.
///
/// Padé approximants are built from the scaled coefficients `c_n εⁿ` and
/// evaluated at one, which leaves the exact approximant unchanged but lets
/// the rank test see the terms that actually matter at this `ε`.
pub fn sum_expansion_with(
    expansion: &DnoExpansion,
    order: usize,
    eps: f64,
    method: Summation,
    degrees: (usize, usize),
) -> Result<SummedField> {
    if order > expansion.order() {
        return Err(Error::InvalidArgument(format!(
            "order {order} exceeds the computed order {}",
            expansion.order()
        )));
    }
    let grid = expansion.grid();
    let modes = grid.len();
    match method {
        Summation::Taylor => {
            let coeffs = (0..modes).map(|i| taylor_sum(&expansion.mode_series(i)[..=order], eps)).collect();
            Ok(SummedField {
                field: SurfaceField::from_coefficients(grid, coeffs)?,
                pole_flag: false,
                min_divisor: None,
                taylor_fallbacks: 0,
            })
        }
        Summation::Pade => {
            let (l, m) = degrees;
            if l + m > order {
                return Err(Error::InvalidArgument(format!("[{l}/{m}] needs order {} but only {order} is summed", l + m)));
            }
            let scaled: Vec<Vec<C>> = (0..modes)
                .map(|i| {
                    let mut p = 1.0;
                    expansion.mode_series(i)[..=order]
                        .iter()
                        .map(|c| {
                            let v = c * p;
                            p *= eps;
                            v
                        })
                        .collect()
                })
                .collect();
            let global = scaled.iter().flatten().fold(0.0f64, |s, c| s.max(c.norm()));
            let mut coeffs = Vec::with_capacity(modes);
            let mut pole_flag = false;
            let mut min_divisor = f64::INFINITY;
            let mut taylor_fallbacks = 0;
            for series in &scaled {
                let local = series.iter().fold(0.0f64, |s, c| s.max(c.norm()));
                if local <= NOISE_FLOOR * global {
                    coeffs.push(series.iter().sum());
                    continue;
                }
                let pade = PadeApproximant::new(series, l, m)?;
                taylor_fallbacks += usize::from(pade.taylor_fallback);
                let v = pade.eval(1.0).map_err(|_| Error::Pole(eps))?;
                pole_flag |= v.near_pole;
                min_divisor = min_divisor.min(v.divisor);
                coeffs.push(v.value);
            }
            Ok(SummedField {
                field: SurfaceField::from_coefficients(grid, coeffs)?,
                pole_flag,
                min_divisor: min_divisor.is_finite().then_some(min_divisor),
                taylor_fallbacks,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(v: &[f64]) -> Vec<C> {
        v.iter().map(|x| C::new(*x, 0.0)).collect()
    }

    #[test]
    fn geometric_series() {
        let s = re(&[1.0; 9]);
        let p = PadeApproximant::new(&s, 4, 4).unwrap();
        assert_eq!(p.denominator.len(), 2);
        let v = p.eval(0.5).unwrap();
        assert!((v.value - C::new(2.0, 0.0)).norm() < 1e-14);
        assert!((taylor_sum(&s, 0.5) - C::new(2.0 - 0.5f64.powi(8), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn exponential_two_two() {
        let s = re(&[1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0]);
        let p = PadeApproximant::new(&s, 2, 2).unwrap();
        assert!((p.eval(1.0).unwrap().value - C::new(19.0 / 7.0, 0.0)).norm() < 1e-14);
        let expected_den = re(&[1.0, -0.5, 1.0 / 12.0]);
        for (b, e) in p.denominator.iter().zip(&expected_den) {
            assert!((b - e).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_series_falls_back_to_taylor() {
        let p = PadeApproximant::new(&re(&[3.0, 0.0, 0.0, 0.0, 0.0]), 2, 2).unwrap();
        assert!(p.taylor_fallback);
        assert_eq!(p.eval(0.7).unwrap().value, C::new(3.0, 0.0));
    }

    #[test]
    fn exact_pole_is_an_error() {
        let p = PadeApproximant::new(&re(&[1.0, 1.0, 1.0]), 1, 1).unwrap();
        assert_eq!(p.eval(1.0), Err(Error::Pole(1.0)));
        assert!(PadeApproximant::new(&re(&[1.0, 1.0]), 1, 1).is_err());
    }

    #[test]
    fn default_split() {
        assert_eq!(default_degrees(16), (8, 8));
        assert_eq!(default_degrees(5), (3, 2));
        assert_eq!(default_degrees(0), (0, 0));
    }
}
