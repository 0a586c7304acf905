//! Per-symbol mutual information `U = I(S_i; Y_i)` for a uniform signal.
//!
//! With `S` uniform on the `M` points, `p(y) = theta(y) / M` where
//! `theta(y) = sum_j g(y - j)` is the noise density periodized with period
//! one. Hence `h(Y) = ln M - int_0^1 theta ln theta` and
//! `U = (ln M + h_cell - h_noise) / ln 2`, with `h_noise` the entropy of the
//! noise folded onto the circle of length `M`.

use std::f64::consts::{LN_2, PI, SQRT_2};

use statrs::function::erf::erf;

use crate::channel::{NoiseKind, NoiseModel, SystemParams};
use crate::error::{Error, Result};

const BASE_POINTS: usize = 1 << 14;
const MAX_POINTS: usize = 1 << 21;
const TOLERANCE: f64 = 1e-6;

/// `U` in bits for the channel of `params`.
pub fn per_symbol_info(params: &SystemParams) -> Result<f64> {
    per_symbol_info_for(&params.noise())
}

/// `U` in bits for an explicit noise model.
pub fn per_symbol_info_for(noise: &NoiseModel) -> Result<f64> {
    let m = noise.m() as f64;
    let kernel = Kernel::of(noise);
    let h_noise = kernel.scaled(m).entropy()? + m.ln();
    let h_cell = kernel.entropy()?;
    Ok(((m.ln() + h_cell - h_noise) / LN_2).max(0.0))
}

/// Gaussian (optionally truncated to `|r| < half_width`) periodized with
/// period one.
#[derive(Debug, Clone, Copy)]
struct Kernel {
    sigma: f64,
    half_width: Option<f64>,
}

impl Kernel {
    fn of(noise: &NoiseModel) -> Self {
        Kernel {
            sigma: noise.sigma(),
            half_width: match noise.kind() {
                NoiseKind::FullGaussian => None,
                NoiseKind::Truncated => Some(noise.half_width()),
            },
        }
    }

    /// Same kernel measured in units of `period`.
    fn scaled(self, period: f64) -> Self {
        Kernel {
            sigma: self.sigma / period,
            half_width: self.half_width.map(|h| h / period),
        }
    }

    fn density(&self, y: f64) -> f64 {
        let s = self.sigma;
        match self.half_width {
            None if s > 0.3 => {
                // Fourier series of the periodized Gaussian.
                let mut sum = 1.0;
                let mut k = 1.0;
                loop {
                    let w = (-2.0 * PI * PI * k * k * s * s).exp();
                    if w < 1e-18 {
                        break;
                    }
                    sum += 2.0 * w * (2.0 * PI * k * y).cos();
                    k += 1.0;
                }
                sum
            }
            None => {
                let reach = (8.0 * s).ceil() as i64 + 1;
                let y0 = y.round();
                let norm = 1.0 / (s * (2.0 * PI).sqrt());
                (-reach..=reach)
                    .map(|j| {
                        let d = y - (y0 + j as f64);
                        norm * (-d * d / (2.0 * s * s)).exp()
                    })
                    .sum()
            }
            Some(h) => {
                let norm = 1.0 / (s * (2.0 * PI).sqrt() * erf(h / (s * SQRT_2)));
                let lo = (y - h).floor() as i64;
                let hi = (y + h).ceil() as i64;
                (lo..=hi)
                    .filter_map(|j| {
                        let d = y - j as f64;
                        (d.abs() < h).then(|| norm * (-d * d / (2.0 * s * s)).exp())
                    })
                    .sum()
            }
        }
    }

    /// Integration window within which the periodized density lives and is
    /// smooth: a full period when the kernel is wide, else a narrow window
    /// around the peak.
    fn window(&self) -> (f64, f64) {
        let reach = 12.0 * self.sigma;
        match self.half_width {
            Some(h) if h < 0.5 => {
                let r = reach.min(h);
                (-r, r)
            }
            Some(h) if reach > h => (0.0, 1.0),
            _ if reach < 0.5 => (-reach, reach),
            _ => (-0.5, 0.5),
        }
    }

    /// `-int f ln f` over one period.
    fn entropy(&self) -> Result<f64> {
        let (a, b) = self.window();
        let integrand = |y: f64| {
            let f = self.density(y);
            if f > 0.0 {
                -f * f.ln()
            } else {
                0.0
            }
        };
        let midpoint = |n: usize| {
            let step = (b - a) / n as f64;
            (0..n).map(|i| integrand(a + (i as f64 + 0.5) * step)).sum::<f64>() * step
        };
        let mut n = BASE_POINTS;
        let mut coarse = midpoint(n);
        let mut previous: Option<f64> = None;
        loop {
            n *= 2;
            let fine = midpoint(n);
            let extrapolated = (4.0 * fine - coarse) / 3.0;
            if let Some(prev) = previous {
                let diff = (extrapolated - prev).abs();
                if diff <= TOLERANCE {
                    return Ok(extrapolated);
                }
                if n >= MAX_POINTS {
                    return Err(Error::QuadratureNonConvergence { diff });
                }
            }
            previous = Some(extrapolated);
            coarse = fine;
        }
    }
}
