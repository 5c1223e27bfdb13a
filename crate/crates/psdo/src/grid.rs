//! Direct quadrature of `τ`-quantized operators on a uniform grid in one
//! dimension.
//!
//! On `x_n = −xmax + n h`, `n < N`, the operator is the matrix
//! `A[n][m] = h K_z(n − m)` with `z = (1−τ)x_n + τx_m` and the band-limited
//! kernel `K_z(j) = (2π)^{−1} ∫ e^{i j h ξ} a(z, ξ) χ(ξ) dξ`, evaluated by an
//! inverse FFT of length `2N`. For `τ = p/q` every `z` lies on the fine grid
//! `−xmax + s h/q` with `s = qn + p(m − n)`, so one kernel per `s` suffices.

use num_complex::Complex64;
use psdo_core::hermite::HermiteExpansion;
use psdo_core::scalar::Rational;
use psdo_core::symbol::PointSymbol;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::specs::GridSpec;

#[derive(Debug, thiserror::Error)]
pub enum GridError {
    #[error("grid quadrature needs a one-dimensional symbol, got d = {0}")]
    Dimension(usize),
    #[error("input does not decay at the grid edges: |u| = {0:e} > 1e-12 · max|u|")]
    EdgeDecay(f64),
    #[error("tau = {0} has denominator above {MAX_DENOMINATOR}")]
    Tau(String),
}

/// Largest denominator of `τ` the fine grid accepts.
pub const MAX_DENOMINATOR: i64 = 64;

/// Fraction of the band tapered by the raised cosine.
pub const TAPER: f64 = 0.1;

/// Samples on `x_n = x0 + n h`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub x0: f64,
    pub h: f64,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn points(spec: &GridSpec) -> Vec<f64> {
        let h = 2.0 * spec.xmax / spec.n as f64;
        (0..spec.n).map(|n| -spec.xmax + n as f64 * h).collect()
    }

    pub fn from_fn(spec: &GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        let h = 2.0 * spec.xmax / spec.n as f64;
        GridFunction { x0: -spec.xmax, h, values: Self::points(spec).into_iter().map(f).collect() }
    }

    pub fn from_expansion(spec: &GridSpec, u: &HermiteExpansion) -> Self {
        Self::from_fn(spec, |x| u.eval_1d(x))
    }

    pub fn x(&self, n: usize) -> f64 {
        self.x0 + n as f64 * self.h
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max_n |u_n − v_n|`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Raised-cosine window equal to 1 below `(1 − TAPER)` of the band edge.
pub fn taper(xi: f64, xi_max: f64) -> f64 {
    let start = (1.0 - TAPER) * xi_max;
    let a = xi.abs();
    if a <= start {
        1.0
    } else if a >= xi_max {
        0.0
    } else {
        0.5 * (1.0 + (std::f64::consts::PI * (a - start) / (TAPER * xi_max)).cos())
    }
}

/// Compensated (Neumaier) sum; rows are summed in index order so results
/// do not depend on the thread count.
pub fn neumaier_sum(values: impl Iterator<Item = Complex64>) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    for v in values {
        for (s, c, x) in [(&mut sum.re, &mut comp.re, v.re), (&mut sum.im, &mut comp.im, v.im)] {
            let t = *s + x;
            if s.abs() >= x.abs() {
                *c += (*s - t) + x;
            } else {
                *c += (x - t) + *s;
            }
            *s = t;
        }
    }
    sum + comp
}

fn tau_fraction(tau: &Rational) -> Result<(i64, i64), GridError> {
    use num_traits::ToPrimitive;
    let p = tau.numer().to_i64();
    let q = tau.denom().to_i64();
    match (p, q) {
        // Rationals are kept in lowest terms.
        (Some(p), Some(q)) if q <= MAX_DENOMINATOR => Ok((p, q)),
        _ => Err(GridError::Tau(tau.to_string())),
    }
}

/// `(2π)^{−1} ∫∫ e^{i(x−y)ξ} a((1−τ)x + τy, ξ) u(y) dy dξ` on the grid of `u`.
pub fn grid_apply_op_tau<P: PointSymbol + Sync + ?Sized>(
    a: &P,
    tau: &Rational,
    u: &GridFunction,
) -> Result<GridFunction, GridError> {
    if a.dim() != 1 {
        return Err(GridError::Dimension(a.dim()));
    }
    let n = u.values.len();
    let peak = u.max_abs();
    let edge = u.values[0].norm().max(u.values[n - 1].norm());
    if edge > 1e-12 * peak.max(f64::MIN_POSITIVE) {
        return Err(GridError::EdgeDecay(edge));
    }
    let (p, q) = tau_fraction(tau)?;
    let h = u.h;
    let m_len = 2 * n;
    let xi_max = std::f64::consts::PI / h;
    let xis: Vec<f64> = (0..m_len)
        .map(|k| {
            let k = if k < m_len / 2 { k as i64 } else { k as i64 - m_len as i64 };
            2.0 * std::f64::consts::PI * k as f64 / (m_len as f64 * h)
        })
        .collect();
    let window: Vec<f64> = xis.iter().map(|&x| taper(x, xi_max)).collect();

    // Range of s = (q − p) n + p m over the index square.
    let corners = [0i64, (q - p) * (n as i64 - 1), p * (n as i64 - 1), q * (n as i64 - 1)];
    let s_min = *corners.iter().min().expect("nonempty");
    let s_max = *corners.iter().max().expect("nonempty");

    let fft = FftPlanner::<f64>::new().plan_fft_inverse(m_len);
    let scale = 1.0 / (m_len as f64 * h);
    // kernel[s - s_min][j mod M] for the needed (s, j) pairs only.
    let entries: Vec<Vec<(usize, usize, Complex64)>> = (s_min..=s_max)
        .into_par_iter()
        .map(|s| {
            let z = u.x0 + s as f64 * h / q as f64;
            let mut buf: Vec<Complex64> = xis
                .iter()
                .zip(&window)
                .map(|(&xi, &w)| if w == 0.0 { Complex64::new(0.0, 0.0) } else { a.eval(&[z, xi]) * w })
                .collect();
            fft.process(&mut buf);
            let mut out = Vec::new();
            // Rows n with s = q n + p (m − n) for some m in range.
            for row in 0..n as i64 {
                let rem = s - q * row;
                let cols: Box<dyn Iterator<Item = i64>> = if p == 0 {
                    if rem == 0 {
                        Box::new(0..n as i64)
                    } else {
                        Box::new(std::iter::empty())
                    }
                } else if rem % p == 0 {
                    Box::new(std::iter::once(row + rem / p))
                } else {
                    Box::new(std::iter::empty())
                };
                for col in cols {
                    if col < 0 || col >= n as i64 {
                        continue;
                    }
                    let j = (row - col).rem_euclid(m_len as i64) as usize;
                    out.push((row as usize, col as usize, buf[j] * scale * h));
                }
            }
            out
        })
        .collect();

    let mut matrix = vec![Complex64::new(0.0, 0.0); n * n];
    for block in entries {
        for (r, c, v) in block {
            matrix[r * n + c] = v;
        }
    }
    let values: Vec<Complex64> = (0..n)
        .into_par_iter()
        .map(|r| neumaier_sum(matrix[r * n..(r + 1) * n].iter().zip(&u.values).map(|(k, v)| k * v)))
        .collect();
    Ok(GridFunction { x0: u.x0, h, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use psdo_core::scalar::rational;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let v = [1e16, 1.0, -1e16, 1.0].map(|x| Complex64::new(x, 0.0));
        assert_eq!(neumaier_sum(v.into_iter()).re, 2.0);
    }

    #[test]
    fn taper_shape() {
        assert_eq!(taper(0.5, 1.0), 1.0);
        assert_eq!(taper(1.0, 1.0), 0.0);
        assert!((taper(0.95, 1.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fraction_reduced() {
        assert_eq!(tau_fraction(&rational(2, 4)).unwrap(), (1, 2));
        assert_eq!(tau_fraction(&rational(-1, 1)).unwrap(), (-1, 1));
        assert!(tau_fraction(&rational(1, 1000)).is_err());
    }
}
