//! Quantile tables for the compensated small-jump part (|x| <= 1) of a
//! two-sided power Lévy measure, built by characteristic-function inversion.
//!
//! The increment law of that part over L-time τ is infinitely divisible, so
//! an arbitrary τ is decomposed into dyadic pieces τ0·2^j drawn from
//! precomputed tables; the sub-table remainder falls back on the untruncated
//! stable law (valid for small τ, where a jump above 1 is an O(τ) event) and
//! the above-table excess on a Gaussian (CLT for bounded jumps).

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::distributions::{stable_sample, StableLaw};
use crate::error::{Error, Result};
#[cfg(test)]
use crate::numeric::integrate_complex;

/// L-time resolved exactly by one window substep of the OU recursion.
pub(crate) const SUB_LTIME: f64 = 0.1;

/// Monotone CDF sampled by inverse transform with linear interpolation.
#[derive(Clone, Debug)]
pub(crate) struct CdfTable {
    xs: Vec<f64>,
    cdf: Vec<f64>,
}

impl CdfTable {
    pub(crate) fn sample(&self, u: f64) -> f64 {
        let c = &self.cdf;
        if u <= c[0] {
            return self.xs[0];
        }
        if u >= *c.last().unwrap() {
            return *self.xs.last().unwrap();
        }
        let mut lo = 0usize;
        let mut hi = c.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if c[mid] <= u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if c[hi] <= c[lo] {
            return self.xs[lo];
        }
        let w = (u - c[lo]) / (c[hi] - c[lo]);
        self.xs[lo] + w * (self.xs[hi] - self.xs[lo])
    }

    /// Build from a density sampled on an increasing grid (trapezoid CDF,
    /// normalized). A segment straddling zero is treated as an excluded hole
    /// and carries no mass (two-sided band supports).
    pub(crate) fn from_density(xs: Vec<f64>, dens: Vec<f64>) -> CdfTable {
        let mut cdf = Vec::with_capacity(xs.len());
        cdf.push(0.0);
        for i in 1..xs.len() {
            let seg = if xs[i - 1] < 0.0 && xs[i] > 0.0 {
                0.0
            } else {
                0.5 * (dens[i] + dens[i - 1]) * (xs[i] - xs[i - 1])
            };
            cdf.push(cdf[i - 1] + seg.max(0.0));
        }
        let total = *cdf.last().unwrap();
        if total > 0.0 {
            for c in cdf.iter_mut() {
                *c /= total;
            }
        }
        CdfTable { xs, cdf }
    }
}

/// κ_{μ2}(ζ) = ∫_{|x|≤1} (e^{iζx} - 1 - iζx) μ(dx) for density
/// c1 x^{-γ-1} (x > 0), c2 |x|^{-γ-1} (x < 0): the full pair cumulant minus
/// the uncompensated part above the unit ball.
pub(crate) fn truncated_cumulant(c1: f64, c2: f64, gamma: f64, zeta: f64) -> Complex64 {
    if zeta == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let full = crate::model::jump_cumulant(
        &crate::model::LevyMeasureSpec::StablePair { c1, c2, gamma },
        zeta,
    )
    .expect("pair parameters validated by the caller");
    let one = Complex64::new(1.0, 0.0);
    let big = (c1 / gamma) * (crate::distributions::pareto_plus_cf(zeta, gamma, 1.0) - one)
        + (c2 / gamma) * (crate::distributions::pareto_plus_cf(-zeta, gamma, 1.0) - one);
    full - big
}

/// Direct quadrature of the same integral; oracle for the closed form.
#[cfg(test)]
pub(crate) fn truncated_cumulant_quadrature(c1: f64, c2: f64, gamma: f64, zeta: f64) -> Complex64 {
    if zeta == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let g = |z: f64| -> Complex64 {
        // substitute x = u^s to flatten the x^{1-γ} endpoint behavior
        let s = 2.0 / (2.0 - gamma);
        integrate_complex(
            |u| {
                if u <= 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let x = u.powf(s);
                let t = z * x;
                // series branch avoids cancellation against the singular density
                let f = if t.abs() < 1e-4 {
                    Complex64::new(
                        -t * t / 2.0 * (1.0 - t * t / 12.0),
                        -t * t * t / 6.0 * (1.0 - t * t / 20.0),
                    )
                } else {
                    Complex64::new(0.0, t).exp() - Complex64::new(1.0, t)
                };
                f * x.powf(-gamma - 1.0) * s * u.powf(s - 1.0)
            },
            0.0,
            1.0,
            1e-11,
        )
    };
    c1 * g(zeta) + c2 * g(-zeta)
}

/// Linear interpolation on an ascending grid.
fn interp(zs: &[f64], ks: &[Complex64], z: f64) -> Complex64 {
    if z <= zs[0] {
        return ks[0];
    }
    if z >= *zs.last().unwrap() {
        return *ks.last().unwrap();
    }
    let mut lo = 0usize;
    let mut hi = zs.len() - 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if zs[mid] <= z {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let w = (z - zs[lo]) / (zs[hi] - zs[lo]);
    ks[lo] + (ks[hi] - ks[lo]) * w
}

/// Gil-Pelaez inversion of φ(ζ) = exp(scaled(ζ)) into a CDF table.
/// `scaled` is given at the master nodes `zs`; `var` and `core` set the
/// value-grid extent and inner resolution.
fn cdf_from_cf(zs: &[f64], scaled: &[Complex64], var: f64, core: f64) -> CdfTable {
    // truncate where |φ| < e^{-46}
    let mut zeta_cut = *zs.last().unwrap();
    for (i, k) in scaled.iter().enumerate() {
        if k.re < -46.0 {
            zeta_cut = zs[i];
            break;
        }
    }
    // individual jumps are bounded by 1, so a couple of units of headroom
    // beyond the Gaussian-scale bulk covers all but negligible mass
    let x_hi = 8.0 * var.sqrt() + 2.0;
    let x_lo = (core.min(var.sqrt()).max(1e-9)) / 50.0;
    let per_side = 200usize;
    let lr = (x_hi / x_lo).ln();
    let mut xs = Vec::with_capacity(2 * per_side + 1);
    for i in (0..per_side).rev() {
        xs.push(-(x_lo * (lr * i as f64 / (per_side - 1) as f64).exp()));
    }
    xs.push(0.0);
    for i in 0..per_side {
        xs.push(x_lo * (lr * i as f64 / (per_side - 1) as f64).exp());
    }

    let dz = (std::f64::consts::PI / (8.0 * x_hi)).min(zeta_cut / 800.0);
    let n = ((zeta_cut / dz).ceil() as usize).min(200_000).max(16);
    let dz = zeta_cut / n as f64;
    // φ at the uniform nodes (node 0 handled analytically in the sum)
    let phi: Vec<Complex64> = (1..=n)
        .map(|i| interp(zs, scaled, i as f64 * dz).exp())
        .collect();

    let mut cdf = Vec::with_capacity(xs.len());
    for &x in &xs {
        // trapezoid over Im(e^{-iζx} φ(ζ))/ζ; the ζ→0 limit is -x
        let mut s = 0.5 * (-x);
        for (i, p) in phi.iter().enumerate() {
            let z = (i + 1) as f64 * dz;
            let e = Complex64::new(0.0, -z * x).exp();
            let w = if i + 1 == n { 0.5 } else { 1.0 };
            s += w * (e * p).im / z;
        }
        let f = 0.5 - s * dz / std::f64::consts::PI;
        cdf.push(f.clamp(0.0, 1.0));
    }
    // enforce monotonicity
    for i in 1..cdf.len() {
        if cdf[i] < cdf[i - 1] {
            cdf[i] = cdf[i - 1];
        }
    }
    CdfTable { xs, cdf }
}

/// Dyadic table set for one (c1, c2, γ, m) configuration.
#[derive(Clone, Debug)]
pub(crate) struct TruncTables {
    tau_min: f64,
    taus: Vec<f64>,
    tables: Vec<CdfTable>,
    stationary: CdfTable,
    var_rate: f64,
    /// untruncated-stable fallback for sub-table remainders
    fallback_sigma: f64,
    fallback_rho: f64,
    fallback_drift: f64,
    gamma: f64,
}

impl TruncTables {
    pub(crate) fn build(c1: f64, c2: f64, gamma: f64, m: usize) -> Result<Self> {
        let mf = m as f64;
        let tau0 = SUB_LTIME / mf;
        let j_min = -6i32;
        let j_max = ((50.0 / tau0).log2().ceil() as i32).max(0);
        let taus: Vec<f64> = (j_min..=j_max).map(|j| tau0 * 2f64.powi(j)).collect();
        let tau_min = taus[0];
        let var_rate = (c1 + c2) / (2.0 - gamma);
        let sigma_l = crate::numeric::stable_scale_from_tail_sum(gamma, (c1 + c2) / gamma)?;

        // master κ grid out to where the smallest piece has fully decayed
        let mut zeta_max = 8.0;
        while tau_min * (-truncated_cumulant(c1, c2, gamma, zeta_max).re) < 46.0 {
            zeta_max *= 2.0;
            if zeta_max > 1e9 {
                return Err(Error::numerical(
                    "trunc_tables",
                    "characteristic function does not decay",
                ));
            }
        }
        let n_master = 3000usize;
        let z1 = 1e-3;
        let lr = (zeta_max / z1).ln();
        let mut zs = vec![0.0];
        let mut ks = vec![Complex64::new(0.0, 0.0)];
        for i in 0..n_master {
            let z = z1 * (lr * i as f64 / (n_master - 1) as f64).exp();
            zs.push(z);
            ks.push(truncated_cumulant(c1, c2, gamma, z));
        }
        // cumulative ∫_0^ζ κ(u)/u du for the stationary marginal of one summand
        let mut kmarg = vec![Complex64::new(0.0, 0.0); zs.len()];
        kmarg[1] = ks[1] * 0.5; // κ ~ -v u²/2 near 0, so ∫_0^{z1} κ/u du ≈ κ(z1)/2
        for i in 2..zs.len() {
            let f0 = ks[i - 1] / zs[i - 1];
            let f1 = ks[i] / zs[i];
            kmarg[i] = kmarg[i - 1] + (f0 + f1) * 0.5 * (zs[i] - zs[i - 1]);
        }

        let mut tables = Vec::with_capacity(taus.len());
        for &tau in &taus {
            let scaled: Vec<Complex64> = ks.iter().map(|k| k * tau).collect();
            let core = sigma_l * tau.powf(1.0 / gamma);
            tables.push(cdf_from_cf(&zs, &scaled, var_rate * tau, core));
        }
        let scaled_st: Vec<Complex64> = kmarg.iter().map(|k| k / mf).collect();
        let core_st = sigma_l * (gamma * mf).powf(-1.0 / gamma);
        let stationary = cdf_from_cf(&zs, &scaled_st, var_rate / (2.0 * mf), core_st);

        let fallback_drift = if gamma > 1.0 || c1 == c2 {
            0.0
        } else {
            -(c1 - c2) / (1.0 - gamma)
        };
        Ok(TruncTables {
            tau_min,
            taus,
            tables,
            stationary,
            var_rate,
            fallback_sigma: sigma_l,
            fallback_rho: (c1 - c2) / (c1 + c2),
            fallback_drift,
            gamma,
        })
    }

    /// Draw L2(τ) (compensated small-jump increment over L-time τ).
    pub(crate) fn draw_increment<R: Rng + ?Sized>(&self, tau: f64, rng: &mut R) -> f64 {
        if tau <= 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        let mut rem = tau;
        let top = *self.taus.last().unwrap();
        if rem > 2.0 * top {
            // bounded jumps: the bulk beyond the largest table is Gaussian
            let g: f64 = rng.sample(StandardNormal);
            acc += g * (self.var_rate * (rem - top)).sqrt();
            rem = top;
        }
        for j in (0..self.taus.len()).rev() {
            let tj = self.taus[j];
            while rem >= tj * (1.0 - 1e-9) {
                acc += self.tables[j].sample(rng.gen());
                rem -= tj;
            }
        }
        if rem > self.tau_min * 1e-6 {
            // sub-table remainder: truncation at |x| = 1 is an O(rem) event,
            // so the untruncated stable law is used
            let law = StableLaw::new(
                self.gamma,
                self.fallback_sigma * rem.powf(1.0 / self.gamma),
                self.fallback_rho,
                self.fallback_drift * rem,
            )
            .expect("fallback law parameters are valid by construction");
            acc += stable_sample(&law, rng);
        }
        acc
    }

    /// Draw the stationary value of one OU summand driven by this part
    /// (cumulant κ_{μ2}/m).
    pub(crate) fn draw_stationary<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.stationary.sample(rng.gen())
    }
}
