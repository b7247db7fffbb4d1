//! Numeric tabulation of the geometric stable Lévy measure.
//!
//! L(1) geometric stable means κ_L(ζ) = −log(1 − κ_S(ζ)) with κ_S a stable
//! cumulant; equivalently L is a stable process subordinated by a Gamma
//! subordinator (Lévy measure s^{-1} e^{-s} ds). The Lévy measure of L then
//! has density
//!     n(x) = ∫_0^∞ f_s(x) s^{-1} e^{-s} ds,
//! with f_s the stable density at time s. Using self-similarity
//! f_s(x) = s^{-1/γ} f_1(x s^{-1/γ}) and the substitution y = x s^{-1/γ}:
//!     n(x) = (γ/|x|) ∫_0^∞ e^{-(|x|/y)^γ} f_1(±y) dy  (sign of x).
//! There is no power law at the origin: n(x) ~ c/|x|, so the mass near 0
//! grows logarithmically.

use num_complex::Complex64;

use crate::distributions::{stable_tail_constant, StableLaw};
#[cfg(test)]
use crate::distributions::stable_cumulant;
use crate::error::{Error, Result};
use crate::numeric::{integrate, integrate_complex};

use std::f64::consts::{FRAC_PI_2, PI};

/// Tabulated density of a stable law, built by inverting the characteristic
/// function along a rotated (damped) contour.
#[derive(Debug)]
pub struct StableDensity {
    pub law: StableLaw,
    /// positive abscissae, log-spaced
    ys: Vec<f64>,
    f_pos: Vec<f64>,
    f_neg: Vec<f64>,
    f0: f64,
    /// beyond ys.last() the power tail f(±y) ≈ k± y^{-γ-1} is used
    k_plus: f64,
    k_minus: f64,
}

/// One point of the inversion integral for y >= 0:
/// f(y) = (1/π) Re ∫_0^∞ e^{-iζy} φ(ζ) dζ, contour ζ = t e^{-iθ}.
fn invert_at(law: &StableLaw, y: f64) -> f64 {
    let g = law.gamma;
    let chi = StableLaw::chi(g);
    // pick the steepest rotation that keeps |φ| bounded on the ray
    let mut theta = FRAC_PI_2.min(PI / (2.0 * g)) * 0.5;
    while (g * theta).cos() - law.rho * chi * (g * theta).sin() <= 0.05 && theta > 1e-3 {
        theta *= 0.5;
    }
    let rot = Complex64::from_polar(1.0, -theta);
    let sg = law.sigma.powf(g);
    let decay_re = sg * ((g * theta).cos() - law.rho * chi * (g * theta).sin());
    // e^{-t y sinθ} and |φ| = e^{-decay_re t^γ} both damp the integrand
    let t_osc = if y > 0.0 { 60.0 / (y * theta.sin()) } else { f64::INFINITY };
    let t_cf = (60.0 / decay_re).powf(1.0 / g);
    let t_max = t_osc.min(t_cf);
    let integrand = |t: f64| -> Complex64 {
        let zeta = t * rot;
        // κ on the ray: -σ^γ ζ^γ (1 - iρχ), principal power
        let k = -sg * zeta.powf(g) * Complex64::new(1.0, -law.rho * chi);
        (Complex64::new(0.0, -y) * zeta + k).exp() * rot
    };
    (integrate_complex(integrand, 0.0, t_max, 1e-11).re / PI).max(0.0)
}

impl StableDensity {
    pub fn build(law: StableLaw) -> Result<Self> {
        if law.c != 0.0 {
            return Err(Error::invalid("c", "density table expects a centered law"));
        }
        let g = law.gamma;
        let cg = stable_tail_constant(g);
        let k_plus = g * cg * (1.0 + law.rho) / 2.0 * law.sigma.powf(g);
        let k_minus = g * cg * (1.0 - law.rho) / 2.0 * law.sigma.powf(g);
        // body out to where the first-order tail expansion is accurate
        let y_max = 40.0 * law.sigma.max(1.0);
        let y_min = 1e-4 * law.sigma.min(1.0);
        let n = 200;
        let ratio = (y_max / y_min).powf(1.0 / (n as f64 - 1.0));
        let mut ys = Vec::with_capacity(n);
        let mut y = y_min;
        for _ in 0..n {
            ys.push(y);
            y *= ratio;
        }
        let f_pos: Vec<f64> = ys.iter().map(|&y| invert_at(&law, y)).collect();
        let mirrored = StableLaw { rho: -law.rho, ..law };
        let f_neg: Vec<f64> = ys.iter().map(|&y| invert_at(&mirrored, y)).collect();
        let f0 = invert_at(&law, 0.0);
        Ok(StableDensity { law, ys, f_pos, f_neg, f0, k_plus, k_minus })
    }

    /// Density at y (any sign).
    pub fn eval(&self, y: f64) -> f64 {
        let (mag, table, k_tail) = if y >= 0.0 {
            (y, &self.f_pos, self.k_plus)
        } else {
            (-y, &self.f_neg, self.k_minus)
        };
        let y_min = self.ys[0];
        let y_max = *self.ys.last().unwrap();
        if mag <= y_min {
            // density is continuous at 0
            let f_first = table[0];
            return self.f0 + (f_first - self.f0) * (mag / y_min);
        }
        if mag >= y_max {
            return k_tail * mag.powf(-self.law.gamma - 1.0);
        }
        // log-spaced grid: locate by logarithm
        let ratio = (self.ys[1] / self.ys[0]).ln();
        let idx = ((mag / y_min).ln() / ratio).floor() as usize;
        let idx = idx.min(self.ys.len() - 2);
        let (x0, x1) = (self.ys[idx], self.ys[idx + 1]);
        let t = (mag - x0) / (x1 - x0);
        table[idx] * (1.0 - t) + table[idx + 1] * t
    }

    pub fn tail_coeffs(&self) -> (f64, f64) {
        (self.k_plus, self.k_minus)
    }

    pub fn body_end(&self) -> f64 {
        *self.ys.last().unwrap()
    }
}

/// Which side / region of the real line a Lévy-measure integral runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GsRegion {
    SmallBall,
    SmallPositive,
    SmallNegative,
    BigPositive,
    BigNegative,
}

/// Tabulated geometric stable Lévy measure density.
#[derive(Debug)]
pub struct GsLevyTable {
    pub gamma: f64,
    /// positive abscissae, log-spaced
    xs: Vec<f64>,
    n_pos: Vec<f64>,
    n_neg: Vec<f64>,
    /// n(±x) ≈ t± x^{-γ-1} beyond xs.last()
    t_plus: f64,
    t_minus: f64,
}

impl GsLevyTable {
    pub fn build(gamma: f64, sigma: f64, rho: f64) -> Result<Self> {
        let law = StableLaw::new(gamma, sigma, rho, 0.0)?;
        let stable = StableDensity::build(law)?;
        let n = 160;
        let x_min = 1e-5_f64;
        let x_max = 1e3;
        let ratio = (x_max / x_min).powf(1.0 / (n as f64 - 1.0));
        let mut xs = Vec::with_capacity(n);
        let mut x = x_min;
        for _ in 0..n {
            xs.push(x);
            x *= ratio;
        }
        let n_pos: Vec<f64> = xs.iter().map(|&x| Self::density_side(&stable, gamma, x, true)).collect();
        let n_neg: Vec<f64> = xs.iter().map(|&x| Self::density_side(&stable, gamma, x, false)).collect();
        let (kp, km) = stable.tail_coeffs();
        // tail equivalence: the measure inherits the stable density tail
        // (the subordinator has unit mean)
        Ok(GsLevyTable { gamma, xs, n_pos, n_neg, t_plus: kp, t_minus: km })
    }

    /// n(±x) = (γ/x) ∫_0^∞ e^{-(x/y)^γ} f_1(±y) dy for x > 0.
    fn density_side(stable: &StableDensity, gamma: f64, x: f64, positive: bool) -> f64 {
        let a = stable.body_end();
        let lo = x / 36f64.powf(1.0 / gamma); // e^{-(x/y)^γ} < 1e-15 below
        let sgn = if positive { 1.0 } else { -1.0 };
        let mut total = 0.0;
        if lo < a {
            total += integrate(
                |ln_y| {
                    let y = ln_y.exp();
                    (-(x / y).powf(gamma)).exp() * stable.eval(sgn * y) * y
                },
                lo.max(1e-300).ln(),
                a.ln(),
                1e-12,
            );
        }
        // analytic tail piece: ∫_A^∞ e^{-(x/y)^γ} k y^{-γ-1} dy
        //   = (k/γ) x^{-γ} (1 - e^{-(x/A)^γ}), A = max(a, lo)
        let (kp, km) = stable.tail_coeffs();
        let k_tail = if positive { kp } else { km };
        let big_a = a.max(lo);
        let u = (x / big_a).powf(gamma);
        let tail = if u < 1e-8 {
            // avoid cancellation: 1 - e^{-u} ≈ u
            (k_tail / gamma) * x.powf(-gamma) * u * (1.0 - 0.5 * u)
        } else {
            (k_tail / gamma) * x.powf(-gamma) * (1.0 - (-u).exp())
        };
        total += tail;
        gamma / x * total
    }

    /// Lévy density at x (any sign, x != 0).
    pub fn density(&self, x: f64) -> f64 {
        let (mag, table, t_tail) = if x >= 0.0 {
            (x, &self.n_pos, self.t_plus)
        } else {
            (-x, &self.n_neg, self.t_minus)
        };
        let x_min = self.xs[0];
        let x_max = *self.xs.last().unwrap();
        if mag >= x_max {
            return t_tail * mag.powf(-self.gamma - 1.0);
        }
        if mag <= x_min {
            // n(x) ~ c/x near the origin
            return table[0] * x_min / mag;
        }
        let idx = ((mag / x_min).ln() / (self.xs[1] / self.xs[0]).ln()).floor() as usize;
        let idx = idx.min(self.xs.len() - 2);
        let (x0, x1) = (self.xs[idx], self.xs[idx + 1]);
        // interpolate log-density in log-x (the density is positive and
        // roughly power-like between knots)
        let t = (mag.ln() - x0.ln()) / (x1.ln() - x0.ln());
        let l0 = table[idx].max(1e-300).ln();
        let l1 = table[idx + 1].max(1e-300).ln();
        (l0 * (1.0 - t) + l1 * t).exp()
    }

    /// ∫ |x|^power over the region, with analytic tail beyond the grid.
    pub fn abs_moment(&self, power: f64, region: GsRegion) -> Result<f64> {
        let seg = |lo: f64, hi: f64, positive: bool| -> f64 {
            integrate(
                |ln_x| {
                    let x = ln_x.exp();
                    let s = if positive { x } else { -x };
                    x.powf(power) * self.density(s) * x
                },
                lo.ln(),
                hi.ln(),
                1e-12,
            )
        };
        let x_min = 1e-8;
        let x_max = *self.xs.last().unwrap();
        match region {
            GsRegion::SmallBall | GsRegion::SmallPositive | GsRegion::SmallNegative => {
                if power <= 0.0 {
                    return Err(Error::invalid("power", "small-ball moment needs power > 0 (log divergence)"));
                }
                // n ~ c±/x near 0 ⇒ integrand ~ c x^{power-1}: head below x_min
                // contributes ~ c x_min^power / power, negligible
                Ok(match region {
                    GsRegion::SmallPositive => seg(x_min, 1.0, true),
                    GsRegion::SmallNegative => seg(x_min, 1.0, false),
                    _ => seg(x_min, 1.0, true) + seg(x_min, 1.0, false),
                })
            }
            GsRegion::BigPositive | GsRegion::BigNegative => {
                let positive = region == GsRegion::BigPositive;
                if power >= self.gamma {
                    return Err(Error::invalid("power", "tail moment diverges (power >= gamma)"));
                }
                let t_tail = if positive { self.t_plus } else { self.t_minus };
                let tail = t_tail * x_max.powf(power - self.gamma) / (self.gamma - power);
                Ok(seg(1.0, x_max, positive) + tail)
            }
        }
    }

    /// ∫_{|x|<=cut} x² μ(dx): variance of the small-jump substitution.
    pub fn small_ball_variance(&self, cut: f64) -> f64 {
        let seg = |positive: bool| -> f64 {
            integrate(
                |ln_x| {
                    let x: f64 = ln_x.exp();
                    let s = if positive { x } else { -x };
                    x * x * self.density(s) * x
                },
                (1e-8f64).ln(),
                cut.ln(),
                1e-13,
            )
        };
        seg(true) + seg(false)
    }

    /// Signed mean of the region |x| <= cut (finite: density ~ c/x).
    pub fn small_ball_mean(&self, cut: f64) -> f64 {
        integrate(
            |ln_x| {
                let x: f64 = ln_x.exp();
                (x * self.density(x) - x * self.density(-x)) * x
            },
            (1e-8f64).ln(),
            cut.ln(),
            1e-13,
        )
    }

    /// μ(±(cut, ∞)) for one side.
    pub fn mass_above(&self, cut: f64, positive: bool) -> f64 {
        let x_max = *self.xs.last().unwrap();
        let t_tail = if positive { self.t_plus } else { self.t_minus };
        let tail = t_tail * x_max.powf(-self.gamma) / self.gamma;
        if cut >= x_max {
            return t_tail * cut.powf(-self.gamma) / self.gamma;
        }
        let body = integrate(
            |ln_x| {
                let x: f64 = ln_x.exp();
                let s = if positive { x } else { -x };
                self.density(s) * x
            },
            cut.ln(),
            x_max.ln(),
            1e-13,
        );
        body + tail
    }

    /// Inverse-CDF table for jumps with |x| > cut, for compound Poisson
    /// substitution. Returns (total rate, sampler data).
    pub fn tail_sampler(&self, cut: f64) -> GsTailSampler {
        let n = 400;
        let x_hi = 1e6_f64;
        let build_side = |positive: bool| -> (f64, Vec<f64>, Vec<f64>) {
            let mass = self.mass_above(cut, positive);
            let mut xs = Vec::with_capacity(n + 1);
            let mut cdf = Vec::with_capacity(n + 1);
            let ratio = (x_hi / cut).powf(1.0 / n as f64);
            let mut x = cut;
            let mut acc = 0.0;
            xs.push(x);
            cdf.push(0.0);
            for _ in 0..n {
                let x_next = x * ratio;
                let mid = (x * x_next).sqrt();
                let s = if positive { mid } else { -mid };
                acc += self.density(s) * (x_next - x);
                xs.push(x_next);
                cdf.push(acc);
                x = x_next;
            }
            // remaining mass beyond x_hi folded into the last knot
            let total = acc.max(mass);
            for c in cdf.iter_mut() {
                *c /= total;
            }
            (mass, xs, cdf)
        };
        let (mp, xsp, cdfp) = build_side(true);
        let (mm, xsm, cdfm) = build_side(false);
        GsTailSampler { mass_pos: mp, mass_neg: mm, xs_pos: xsp, cdf_pos: cdfp, xs_neg: xsm, cdf_neg: cdfm }
    }
}

/// Inverse-CDF sampler for geometric stable jumps above a cutoff.
#[derive(Clone, Debug)]
pub struct GsTailSampler {
    pub mass_pos: f64,
    pub mass_neg: f64,
    xs_pos: Vec<f64>,
    cdf_pos: Vec<f64>,
    xs_neg: Vec<f64>,
    cdf_neg: Vec<f64>,
}

impl GsTailSampler {
    pub fn total_rate(&self) -> f64 {
        self.mass_pos + self.mass_neg
    }

    /// Draw one jump given uniforms (side choice, quantile).
    pub fn sample(&self, u_side: f64, u_q: f64) -> f64 {
        let positive = u_side < self.mass_pos / self.total_rate();
        let (xs, cdf) = if positive {
            (&self.xs_pos, &self.cdf_pos)
        } else {
            (&self.xs_neg, &self.cdf_neg)
        };
        let i = match cdf.binary_search_by(|c| c.partial_cmp(&u_q).unwrap()) {
            Ok(i) => i,
            Err(i) => i.min(cdf.len() - 1).max(1),
        };
        let (c0, c1) = (cdf[i - 1], cdf[i]);
        let t = if c1 > c0 { (u_q - c0) / (c1 - c0) } else { 0.5 };
        let mag = xs[i - 1] + t * (xs[i] - xs[i - 1]);
        if positive {
            mag
        } else {
            -mag
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn stable_density_normalizes_and_matches_cauchy() {
        // Cauchy: f(y) = 1/(π(1+y²))
        let law = StableLaw::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let d = StableDensity::build(law).unwrap();
        for y in [0.0, 0.5, 1.0, 3.0, 10.0] {
            let exact = 1.0 / (PI * (1.0 + y * y));
            let got = if y == 0.0 { invert_at(&law, 0.0) } else { d.eval(y) };
            assert_relative_eq!(got, exact, max_relative = 0.02);
        }
    }

    #[test]
    fn stable_density_skewed_positive_support() {
        // gamma = 0.5, rho = 1: supported on (0, ∞)
        let law = StableLaw::new(0.5, 1.0, 1.0, 0.0).unwrap();
        let d = StableDensity::build(law).unwrap();
        assert!(d.eval(-0.5) < 1e-4, "left density {}", d.eval(-0.5));
        assert!(d.eval(1.0) > 0.01);
    }

    #[test]
    fn gs_measure_matches_cumulant() {
        // oracle: ∫ (cos(ζx) − 1) n(x) dx = Re(−log(1 − κ_S(ζ))) for the
        // symmetric case
        let (g, s) = (1.5, 1.0);
        let table = GsLevyTable::build(g, s, 0.0).unwrap();
        for zeta in [0.5, 1.0, 2.0] {
            let num = integrate(
                |ln_x| {
                    let x: f64 = ln_x.exp();
                    ((zeta * x).cos() - 1.0) * (table.density(x) + table.density(-x)) * x
                },
                (1e-7f64).ln(),
                (1e5f64).ln(),
                1e-12,
            );
            let law = StableLaw::new(g, s, 0.0, 0.0).unwrap();
            let exact = -(Complex64::new(1.0, 0.0) - stable_cumulant(&law, zeta)).ln();
            assert_relative_eq!(num, exact.re, max_relative = 0.03);
        }
    }

    #[test]
    fn gs_tail_matches_stable_tail() {
        // M+(x) ~ C_γ (1+ρ)/2 σ^γ x^{-γ}
        let (g, s, r) = (1.2, 1.0, 0.4);
        let table = GsLevyTable::build(g, s, r).unwrap();
        let expect = stable_tail_constant(g) * (1.0 + r) / 2.0 * s.powf(g) * 50f64.powf(-g);
        let got = table.mass_above(50.0, true);
        assert_relative_eq!(got, expect, max_relative = 0.05);
    }

    #[test]
    fn gs_small_ball_variance_positive_finite() {
        let table = GsLevyTable::build(0.8, 1.0, 0.0).unwrap();
        let v = table.small_ball_variance(0.01);
        assert!(v.is_finite() && v > 0.0);
        // variance shrinks with the cutoff
        assert!(table.small_ball_variance(0.001) < v);
    }

    #[test]
    fn gs_tail_sampler_consistent() {
        let table = GsLevyTable::build(1.5, 1.0, 0.0).unwrap();
        let s = table.tail_sampler(0.5);
        assert_relative_eq!(s.mass_pos, s.mass_neg, max_relative = 1e-6);
        // median of the positive side should sit where half the mass is
        let med = s.sample(0.0, 0.5);
        let half = table.mass_above(med, true) / table.mass_above(0.5, true);
        assert_relative_eq!(half, 0.5, epsilon = 0.03);
    }
}
