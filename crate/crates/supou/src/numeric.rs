//! Shared numerical utilities: quadrature, compensated summation, special
//! functions, and the scale constant that maps power tails to stable scales.

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Gamma function on the real line (poles at non-positive integers).
pub fn gamma(x: f64) -> f64 {
    if x > 0.0 {
        ln_gamma(x).exp()
    } else {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * ln_gamma(1.0 - x).exp())
    }
}

/// Scale of a stable law whose tails are P(|X|>x) ~ A x^{-lambda}.
///
/// Returns sigma with sigma^lambda = Gamma(2-lambda)/(1-lambda) * A * cos(pi lambda / 2),
/// continuous through lambda = 1 where the value is (A pi / 2)^{1}.
pub fn stable_scale_from_tail_sum(lambda: f64, tail_sum: f64) -> Result<f64> {
    if !(0.0..2.0).contains(&lambda) || lambda <= 0.0 {
        return Err(Error::invalid("lambda", format!("{lambda} not in (0,2)")));
    }
    if tail_sum < 0.0 || !tail_sum.is_finite() {
        return Err(Error::invalid("tail_sum", format!("{tail_sum} must be finite and >= 0")));
    }
    if (lambda - 1.0).abs() < 1e-9 {
        return Ok(tail_sum * std::f64::consts::FRAC_PI_2);
    }
    let c = gamma(2.0 - lambda) / (1.0 - lambda) * (std::f64::consts::FRAC_PI_2 * lambda).cos();
    debug_assert!(c > 0.0);
    Ok((c * tail_sum).powf(1.0 / lambda))
}

/// Neumaier compensated sum. Used everywhere an accumulation must be
/// independent of chunking so that parallel and serial runs agree bitwise
/// (folds still happen in a fixed order; compensation just kills the
/// dependence of rounding on intermediate magnitudes drifting).
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// SplitMix64 step; used to derive independent per-replication seeds.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn simpson_c(_f: &mut impl FnMut(f64) -> Complex64, a: f64, b: f64, fa: Complex64, fm: Complex64, fb: Complex64) -> Complex64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_c(
    f: &mut impl FnMut(f64) -> Complex64,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Complex64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson_c(f, a, m, fa, flm, fm);
    let right = simpson_c(f, m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.norm() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_c(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive_c(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature for complex-valued integrands on [a, b].
pub fn integrate_complex(mut f: impl FnMut(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Complex64 {
    if a == b {
        return Complex64::new(0.0, 0.0);
    }
    // seed with a few panels so oscillation in the middle is not missed
    let n = 8;
    let h = (b - a) / n as f64;
    let mut total = Complex64::new(0.0, 0.0);
    let mut xs = Vec::with_capacity(n + 1);
    for i in 0..=n {
        xs.push(a + h * i as f64);
    }
    for i in 0..n {
        let (x0, x1) = (xs[i], xs[i + 1]);
        let f0 = f(x0);
        let f1 = f(x1);
        let fm = f(0.5 * (x0 + x1));
        let whole = simpson_c(&mut f, x0, x1, f0, fm, f1);
        total += adaptive_c(&mut f, x0, x1, f0, fm, f1, whole, tol / n as f64, 40);
    }
    total
}

/// Adaptive Simpson quadrature for real integrands on [a, b].
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    integrate_complex(|x| Complex64::new(f(x), 0.0), a, b, tol).re
}

/// Least-squares line fit. Returns (slope, intercept, slope standard error).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return Err(Error::invalid("points", "need at least two (x, y) pairs of equal length"));
    }
    let nf = n as f64;
    let mx = compensated_sum(xs.iter().copied()) / nf;
    let my = compensated_sum(ys.iter().copied()) / nf;
    let sxx = compensated_sum(xs.iter().map(|&x| (x - mx) * (x - mx)));
    let sxy = compensated_sum(xs.iter().zip(ys).map(|(&x, &y)| (x - mx) * (y - my)));
    if sxx <= 0.0 {
        return Err(Error::invalid("points", "x values are all equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let se = if n > 2 {
        let ss_res = compensated_sum(
            xs.iter().zip(ys).map(|(&x, &y)| {
                let r = y - (intercept + slope * x);
                r * r
            }),
        );
        (ss_res / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok((slope, intercept, se))
}
