//! The model: characteristic quadruple (a, b, μ, π), its asymptotic
//! descriptors (tails of μ at zero and infinity, Blumenthal–Getoor index,
//! regular variation of π), and theoretical cumulants.

pub mod gs;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::distributions::{pareto_plus_cf, stable_cumulant, stable_tail_constant, JumpDist, RegVarTail, StableLaw};
use crate::error::{Error, Result};
use crate::numeric::{integrate, integrate_complex, stable_scale_from_tail_sum};
#[cfg(test)]
use crate::numeric::gamma as gamma_fn;
use crate::slowvar::SlowlyVaryingSpec;

use std::f64::consts::PI;

/// Lévy measure μ of the background driving Lévy process.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LevyMeasureSpec {
    /// Finite measure rate * F.
    CompoundPoisson { rate: f64, jumps: JumpDist },
    /// Density c1 x^{-γ-1} on (0,∞), c2 |x|^{-γ-1} on (-∞,0).
    StablePair { c1: f64, c2: f64, gamma: f64 },
    /// Student-type measure represented by its two asymptotic regimes:
    /// density ~ (δ/π) x^{-2} near 0 and ~ K |x|^{-γ-1} at infinity,
    /// glued at |x| = 1; `c` is a location shift of L(1).
    Student { delta: f64, gamma: f64, c: f64 },
    /// L(1) geometric stable: cumulant -log(1 - κ_stable(ζ)).
    GeometricStable { gamma: f64, sigma: f64, rho: f64 },
}

/// Behavior of M±(x) = μ(±(x,∞)) as x → 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZeroTail {
    /// M±(x) ~ c± x^{-beta}.
    PowerLaw { beta: f64, c_plus: f64, c_minus: f64 },
    /// Finite total mass (compound Poisson): beta = 0.
    FiniteMeasure,
    /// Mass near the origin grows at a logarithmic rate; no power law.
    Logarithmic,
}

impl LevyMeasureSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            LevyMeasureSpec::CompoundPoisson { rate, jumps } => {
                if !(rate > &0.0) {
                    return Err(Error::invalid("rate", "must be > 0"));
                }
                jumps.validate()
            }
            LevyMeasureSpec::StablePair { c1, c2, gamma } => {
                if *c1 < 0.0 || *c2 < 0.0 || c1 + c2 <= 0.0 {
                    return Err(Error::invalid("c1,c2", "need c1, c2 >= 0 with c1 + c2 > 0"));
                }
                if !(gamma > &0.0 && gamma < &2.0) {
                    return Err(Error::invalid("gamma", format!("{gamma} not in (0,2)")));
                }
                if *gamma == 1.0 && c1 != c2 {
                    return Err(Error::invalid("c1,c2", "must be equal when gamma = 1"));
                }
                Ok(())
            }
            LevyMeasureSpec::Student { delta, gamma, c } => {
                if !(delta > &0.0) {
                    return Err(Error::invalid("delta", "must be > 0"));
                }
                if !(gamma > &0.0 && gamma < &2.0) {
                    return Err(Error::invalid("gamma", format!("{gamma} not in (0,2)")));
                }
                if !c.is_finite() {
                    return Err(Error::invalid("c", "must be finite"));
                }
                Ok(())
            }
            LevyMeasureSpec::GeometricStable { gamma, sigma, rho } => {
                StableLaw::new(*gamma, *sigma, *rho, 0.0).map(|_| ())
            }
        }
    }

    /// Coefficient of the |x|^{-γ-1} Student tail density:
    /// K = Γ((γ+1)/2) δ^γ / (√π Γ(γ/2)).
    pub fn student_tail_coeff(delta: f64, gamma: f64) -> f64 {
        (ln_gamma((gamma + 1.0) / 2.0) - ln_gamma(gamma / 2.0)).exp() * delta.powf(gamma)
            / PI.sqrt()
    }
}

/// Behavior of the Lévy measure at the origin (Eq. M±(x) ~ c± x^{-β}).
pub fn tail_indices_at_zero(mu: &LevyMeasureSpec) -> ZeroTail {
    match mu {
        LevyMeasureSpec::CompoundPoisson { .. } => ZeroTail::FiniteMeasure,
        LevyMeasureSpec::StablePair { c1, c2, gamma } => ZeroTail::PowerLaw {
            beta: *gamma,
            c_plus: c1 / gamma,
            c_minus: c2 / gamma,
        },
        LevyMeasureSpec::Student { delta, .. } => ZeroTail::PowerLaw {
            beta: 1.0,
            c_plus: delta / PI,
            c_minus: delta / PI,
        },
        LevyMeasureSpec::GeometricStable { .. } => ZeroTail::Logarithmic,
    }
}

/// Blumenthal–Getoor index.
pub fn bg_index(mu: &LevyMeasureSpec) -> f64 {
    match mu {
        LevyMeasureSpec::CompoundPoisson { .. } => 0.0,
        LevyMeasureSpec::StablePair { gamma, .. } => *gamma,
        LevyMeasureSpec::Student { .. } => 1.0,
        LevyMeasureSpec::GeometricStable { .. } => 0.0,
    }
}

/// Regular variation of the BDLP at infinity, stated for the stationary
/// marginal X(0): P(X(0) > x) ~ p k(x) x^{-γ} with p + q = 1 and the scale
/// folded into k. The Lévy tail is then M±(x) ~ γ (p|q) k(x) x^{-γ}.
pub fn tail_indices_at_infinity(mu: &LevyMeasureSpec) -> Result<RegVarTail> {
    match mu {
        LevyMeasureSpec::CompoundPoisson { rate, jumps } => {
            let (g, tp, tq) = jumps.tail_constants().ok_or_else(|| {
                Error::Unsupported("light-tailed jump distribution: no regularly varying tail".into())
            })?;
            let s = tp + tq;
            RegVarTail::new(
                g,
                tp / s,
                tq / s,
                SlowlyVaryingSpec::constant(rate * s / g)?,
            )
        }
        LevyMeasureSpec::StablePair { c1, c2, gamma } => {
            let s = c1 + c2;
            RegVarTail::new(
                *gamma,
                c1 / s,
                c2 / s,
                SlowlyVaryingSpec::constant(s / (gamma * gamma))?,
            )
        }
        LevyMeasureSpec::Student { delta, gamma, .. } => {
            let kf = LevyMeasureSpec::student_tail_coeff(*delta, *gamma);
            RegVarTail::new(
                *gamma,
                0.5,
                0.5,
                SlowlyVaryingSpec::constant(2.0 * kf / (gamma * gamma))?,
            )
        }
        LevyMeasureSpec::GeometricStable { gamma, sigma, rho } => {
            let cg = stable_tail_constant(*gamma);
            RegVarTail::new(
                *gamma,
                (1.0 + rho) / 2.0,
                (1.0 - rho) / 2.0,
                SlowlyVaryingSpec::constant(cg * sigma.powf(*gamma) / gamma)?,
            )
        }
    }
}

/// Mixing distribution π of the OU relaxation rates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PiSpec {
    /// Gamma(alpha, 1) density x^{α-1} e^{-x} / Γ(α).
    Gamma { alpha: f64 },
    /// Density given at sample points (x ascending, density), with its
    /// regular-variation data at zero stated explicitly.
    TabulatedDensity {
        alpha: f64,
        ell: SlowlyVaryingSpec,
        samples: Vec<(f64, f64)>,
    },
}

impl PiSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            PiSpec::Gamma { alpha } => {
                if *alpha > 0.0 {
                    Ok(())
                } else {
                    Err(Error::invalid("alpha", "must be > 0"))
                }
            }
            PiSpec::TabulatedDensity { alpha, samples, .. } => {
                if !(*alpha > 0.0) {
                    return Err(Error::invalid("alpha", "must be > 0"));
                }
                if samples.len() < 4 {
                    return Err(Error::invalid("samples", "need at least 4 density samples"));
                }
                if samples.windows(2).any(|w| w[0].0 >= w[1].0) || samples[0].0 <= 0.0 {
                    return Err(Error::invalid("samples", "x values must be positive and strictly increasing"));
                }
                if samples.iter().any(|&(_, d)| d < 0.0) {
                    return Err(Error::invalid("samples", "density values must be >= 0"));
                }
                let total = self.tabulated_mass();
                if (total - 1.0).abs() > 0.02 {
                    return Err(Error::invalid(
                        "samples",
                        format!("density integrates to {total}, expected 1 within 2%"),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Head mass below the first sample point, from the stated regular
    /// variation: π((0,x]) ≈ ℓ(1/x) x^α.
    fn head_mass(&self) -> f64 {
        match self {
            PiSpec::Gamma { .. } => 0.0,
            PiSpec::TabulatedDensity { alpha, ell, samples } => {
                let x0 = samples[0].0;
                ell.eval(1.0 / x0) * x0.powf(*alpha)
            }
        }
    }

    fn tabulated_mass(&self) -> f64 {
        match self {
            PiSpec::Gamma { .. } => 1.0,
            PiSpec::TabulatedDensity { samples, .. } => {
                let mut m = self.head_mass();
                for w in samples.windows(2) {
                    m += 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0);
                }
                m
            }
        }
    }

    /// Regular variation at zero: (α, ℓ) with π((0,x]) ~ ℓ(1/x) x^α.
    pub fn regvar(&self) -> (f64, SlowlyVaryingSpec) {
        match self {
            PiSpec::Gamma { alpha } => (
                *alpha,
                SlowlyVaryingSpec::Constant { value: (-ln_gamma(alpha + 1.0)).exp() },
            ),
            PiSpec::TabulatedDensity { alpha, ell, .. } => (*alpha, *ell),
        }
    }

    /// ∫ ξ^θ π(dξ), +∞ when divergent (Gamma: divergent iff α + θ ≤ 0).
    pub fn moment(&self, theta: f64) -> f64 {
        match self {
            PiSpec::Gamma { alpha } => {
                if alpha + theta > 0.0 {
                    (ln_gamma(alpha + theta) - ln_gamma(*alpha)).exp()
                } else {
                    f64::INFINITY
                }
            }
            PiSpec::TabulatedDensity { alpha, samples, .. } => {
                if alpha + theta <= 0.0 {
                    return f64::INFINITY;
                }
                // head: density ~ α ℓ x^{α-1} ⇒ ∫_0^{x0} x^θ π(dx) ≈ α/(α+θ) x0^θ π((0,x0])
                let x0 = samples[0].0;
                let mut m = alpha / (alpha + theta) * x0.powf(theta) * self.head_mass();
                for w in samples.windows(2) {
                    let f0 = w[0].0.powf(theta) * w[0].1;
                    let f1 = w[1].0.powf(theta) * w[1].1;
                    m += 0.5 * (f0 + f1) * (w[1].0 - w[0].0);
                }
                m
            }
        }
    }

    /// Correlation of the finite-variance components: r(t) = ∫ e^{-tξ} π(dξ).
    pub fn correlation(&self, t: f64) -> f64 {
        match self {
            PiSpec::Gamma { alpha } => (1.0 + t).powf(-alpha),
            PiSpec::TabulatedDensity { samples, .. } => {
                let mut m = self.head_mass(); // e^{-tx} ≈ 1 below x0
                for w in samples.windows(2) {
                    let f0 = (-t * w[0].0).exp() * w[0].1;
                    let f1 = (-t * w[1].0).exp() * w[1].1;
                    m += 0.5 * (f0 + f1) * (w[1].0 - w[0].0);
                }
                m / self.tabulated_mass()
            }
        }
    }

    /// Draw one OU rate ξ ~ π.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            PiSpec::Gamma { alpha } => {
                rand_distr::Gamma::new(*alpha, 1.0).expect("validated alpha").sample(rng)
            }
            PiSpec::TabulatedDensity { alpha, samples, .. } => {
                let head = self.head_mass();
                let total = self.tabulated_mass();
                let mut u: f64 = rng.gen::<f64>() * total;
                if u < head {
                    // power-law head: π((0,x]) ∝ x^α below x0
                    return samples[0].0 * (u / head).powf(1.0 / alpha);
                }
                u -= head;
                for w in samples.windows(2) {
                    let seg = 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0);
                    if u <= seg || w[1].0 == samples.last().unwrap().0 {
                        let frac = if seg > 0.0 { (u / seg).min(1.0) } else { 0.0 };
                        return w[0].0 + frac * (w[1].0 - w[0].0);
                    }
                    u -= seg;
                }
                samples.last().unwrap().0
            }
        }
    }
}

/// The characteristic quadruple (a, b, μ, π).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicQuadruple {
    pub a: f64,
    pub b: f64,
    pub mu: LevyMeasureSpec,
    pub pi: PiSpec,
}

impl CharacteristicQuadruple {
    pub fn new(a: f64, b: f64, mu: LevyMeasureSpec, pi: PiSpec) -> Result<Self> {
        let q = CharacteristicQuadruple { a, b, mu, pi };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.a.is_finite() {
            return Err(Error::invalid("a", "must be finite"));
        }
        if !(self.b >= 0.0 && self.b.is_finite()) {
            return Err(Error::invalid("b", "must be finite and >= 0"));
        }
        self.mu.validate()?;
        self.pi.validate()?;
        // when the BDLP mean exists (tail index > 1) the theorems assume it
        // is zero
        if let Some(mean) = self.implied_mean() {
            if mean.abs() > 1e-9 {
                return Err(Error::invalid(
                    "a",
                    format!("implied mean {mean} must be 0 when the tail index exceeds 1; use with_zero_mean"),
                ));
            }
        }
        Ok(())
    }

    /// E L(1) = a + mean of μ's cumulant, when it exists (tail index > 1).
    pub fn implied_mean(&self) -> Option<f64> {
        let mu_mean = match &self.mu {
            LevyMeasureSpec::CompoundPoisson { rate, jumps } => {
                let big = jumps.mean_big()?;
                Some(rate * (jumps.mean_small() + big))
            }
            LevyMeasureSpec::StablePair { c1, c2, gamma } => {
                if *gamma > 1.0 {
                    Some((c1 - c2) / (gamma - 1.0))
                } else {
                    None
                }
            }
            LevyMeasureSpec::Student { gamma, c, .. } => {
                if *gamma > 1.0 {
                    Some(*c)
                } else {
                    None
                }
            }
            LevyMeasureSpec::GeometricStable { gamma, .. } => {
                if *gamma > 1.0 {
                    Some(0.0)
                } else {
                    None
                }
            }
        }?;
        Some(self.a + mu_mean)
    }

    /// Same quadruple with the drift solved so the implied mean is zero
    /// (no-op when the mean does not exist).
    pub fn with_zero_mean(mut self) -> Self {
        if let Some(mean) = self.implied_mean() {
            self.a -= mean;
        }
        self
    }
}

/// Cumulant κ_μ(ζ) = ∫ (e^{iζx} - 1 - iζx 1_{|x|≤1}) μ(dx) for the
/// pure-jump part, by closed form where available.
pub fn jump_cumulant(mu: &LevyMeasureSpec, zeta: f64) -> Result<Complex64> {
    if zeta == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    match mu {
        LevyMeasureSpec::CompoundPoisson { rate, jumps } => {
            Ok(rate * (jumps.char_fn(zeta) - 1.0 - Complex64::new(0.0, zeta * jumps.mean_small())))
        }
        LevyMeasureSpec::StablePair { c1, c2, gamma } => {
            let s = c1 + c2;
            let sigma = stable_scale_from_tail_sum(*gamma, s / gamma)?;
            let law = StableLaw::new(*gamma, sigma, (c1 - c2) / s, 0.0)?;
            let mut k = stable_cumulant(&law, zeta);
            if *gamma != 1.0 {
                // move from the natural stable compensation to the unit-ball
                // truncation of the Lévy–Khintchine form
                k -= Complex64::new(0.0, zeta * (c1 - c2) / (1.0 - gamma));
            }
            Ok(k)
        }
        LevyMeasureSpec::Student { delta, gamma, c } => {
            // symmetric: small-ball part (δ/π)|x|^{-2}, tail K|x|^{-γ-1}
            let az = zeta.abs();
            let small = 2.0 * (delta / PI)
                * integrate(|x| ((az * x).cos() - 1.0) / (x * x), 1e-12, 1.0, 1e-12);
            let kf = LevyMeasureSpec::student_tail_coeff(*delta, *gamma);
            let i_plus = pareto_plus_cf(az, *gamma, 1.0) / gamma; // ∫_1^∞ e^{iζx} x^{-γ-1} dx
            let big = kf * (2.0 * i_plus.re - 2.0 / gamma);
            Ok(Complex64::new(small + big, *c * zeta))
        }
        LevyMeasureSpec::GeometricStable { gamma, sigma, rho } => {
            let law = StableLaw::new(*gamma, *sigma, *rho, 0.0)?;
            let ks = stable_cumulant(&law, zeta);
            Ok(-(Complex64::new(1.0, 0.0) - ks).ln())
        }
    }
}

/// κ_L(ζ) = iaζ − bζ²/2 + κ_μ(ζ).
pub fn levy_cumulant(quad: &CharacteristicQuadruple, zeta: f64) -> Result<Complex64> {
    let jump = jump_cumulant(&quad.mu, zeta)?;
    Ok(Complex64::new(-0.5 * quad.b * zeta * zeta, quad.a * zeta) + jump)
}

/// Cumulant of the stationary marginal X(0):
/// ∫_0^∞ κ_L(ζ e^{-v}) dv — independent of π.
pub fn supou_marginal_cumulant(quad: &CharacteristicQuadruple, zeta: f64) -> Result<Complex64> {
    if zeta == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    // find the truncation point: |κ_L| decays like a power of e^{-v}
    let mut v_max = 8.0_f64;
    let mut tail = levy_cumulant(quad, zeta * (-v_max).exp())?.norm();
    let mut prev;
    loop {
        prev = tail;
        if tail < 1e-12 || v_max > 512.0 {
            break;
        }
        v_max *= 2.0;
        tail = levy_cumulant(quad, zeta * (-v_max).exp())?.norm();
    }
    if tail >= 1e-10 {
        return Err(Error::numerical(
            "supou_marginal_cumulant",
            format!("integrand did not decay: |kappa| = {tail} at v = {v_max}"),
        ));
    }
    // local decay exponent bounds the remainder: |∫_V^∞| ≤ tail / eta
    let eta = if tail > 0.0 && prev > tail {
        (prev / tail).ln() / (v_max / 2.0)
    } else {
        1.0
    };
    let remainder = tail / eta.max(1e-3);
    if remainder > 1e-9 {
        return Err(Error::numerical(
            "supou_marginal_cumulant",
            format!("remainder bound {remainder} too large"),
        ));
    }
    let mut quaderr: Option<String> = None;
    let val = integrate_complex(
        |v| match levy_cumulant(quad, zeta * (-v).exp()) {
            Ok(k) => k,
            Err(e) => {
                quaderr = Some(e.to_string());
                Complex64::new(f64::NAN, f64::NAN)
            }
        },
        0.0,
        v_max,
        1e-10,
    );
    if let Some(e) = quaderr {
        return Err(Error::numerical("supou_marginal_cumulant", e));
    }
    if !val.re.is_finite() || !val.im.is_finite() {
        return Err(Error::numerical("supou_marginal_cumulant", "non-finite integral"));
    }
    Ok(val)
}

pub use crate::slowvar::SlowlyVaryingSpec as SlowVar;

/// de Bruijn conjugate within the supported family.
pub fn de_bruijn_conjugate(h: &SlowlyVaryingSpec) -> SlowlyVaryingSpec {
    h.de_bruijn_conjugate()
}
