//! Exact OU transition kernels per driver type, and the internal sub-driver
//! decomposition used by the path engine.

use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::distributions::{stable_sample, JumpDist, StableLaw};
use crate::error::{Error, Result};
use crate::model::gs::GsTailSampler;
use crate::model::LevyMeasureSpec;
use crate::numeric::stable_scale_from_tail_sum;

use super::tables::{CdfTable, TruncTables, SUB_LTIME};

/// Series truncation for shot-noise stationary starts.
pub const STATIONARY_REL_TOL: f64 = 1e-8;

/// A background driving Lévy process with an exactly simulatable OU
/// transition.
#[derive(Clone, Debug)]
pub enum ExactBdlp {
    /// Brownian part with variance b per unit time.
    Gaussian { b: f64 },
    /// Stable L(1) law; the law's shift acts as a drift rate.
    Stable(StableLaw),
    /// Jumps of law `jumps` at Poisson rate `rate`, no compensation.
    CompoundPoisson { rate: f64, jumps: JumpDist },
}

impl ExactBdlp {
    /// The exactly simulatable driver equivalent to a Lévy measure, where one
    /// exists. Student and geometric stable measures have no closed-form OU
    /// transition and are routed through the approximation path instead.
    pub fn try_from_measure(mu: &LevyMeasureSpec) -> Result<ExactBdlp> {
        match mu {
            LevyMeasureSpec::CompoundPoisson { rate, jumps } => Ok(ExactBdlp::CompoundPoisson {
                rate: *rate,
                jumps: jumps.clone(),
            }),
            LevyMeasureSpec::StablePair { c1, c2, gamma } => {
                let s = c1 + c2;
                let sigma = stable_scale_from_tail_sum(*gamma, s / gamma)?;
                let drift = if *gamma == 1.0 { 0.0 } else { -(c1 - c2) / (1.0 - gamma) };
                Ok(ExactBdlp::Stable(StableLaw::new(
                    *gamma,
                    sigma,
                    (c1 - c2) / s,
                    drift,
                )?))
            }
            LevyMeasureSpec::Student { .. } => Err(Error::Unsupported(
                "no exact OU transition for a Student measure".into(),
            )),
            LevyMeasureSpec::GeometricStable { .. } => Err(Error::Unsupported(
                "no exact OU transition for a geometric stable measure".into(),
            )),
        }
    }
}

/// One exact transition of the OU summand dX = -ξX dt + dL(ξt):
/// returns e^{-ξ dt}·state + ∫_0^dt e^{-ξ(dt-s)} dL(ξs).
pub fn ou_exact_step<R: Rng + ?Sized>(
    xi: f64,
    state: f64,
    dt: f64,
    bdlp: &ExactBdlp,
    rng: &mut R,
) -> f64 {
    let decay = (-xi * dt).exp();
    let inc = match bdlp {
        ExactBdlp::Gaussian { b } => {
            let sd = (0.5 * b * (1.0 - (-2.0 * xi * dt).exp())).sqrt();
            let g: f64 = rng.sample(StandardNormal);
            g * sd
        }
        ExactBdlp::Stable(law) => {
            let g = law.gamma;
            let scale = law.sigma * ((1.0 - (-g * xi * dt).exp()) / g).powf(1.0 / g);
            let shift = law.c * (1.0 - decay);
            let step_law = StableLaw::new(g, scale, law.rho, shift)
                .expect("derived step law is valid");
            stable_sample(&step_law, rng)
        }
        ExactBdlp::CompoundPoisson { rate, jumps } => {
            let mean = rate * xi * dt;
            let n = if mean > 0.0 {
                Poisson::new(mean).map(|p| p.sample(rng) as u64).unwrap_or(0)
            } else {
                0
            };
            let mut acc = 0.0;
            for _ in 0..n {
                let tau: f64 = rng.gen_range(0.0..dt);
                acc += (-xi * (dt - tau)).exp() * jumps.sample(rng);
            }
            acc
        }
    };
    decay * state + inc
}

/// A draw from the stationary law of the OU summand: X = ∫_0^∞ e^{-u} dL(u).
pub fn stationary_init<R: Rng + ?Sized>(
    _xi: f64,
    bdlp: &ExactBdlp,
    rng: &mut R,
    rel_tol: f64,
) -> f64 {
    match bdlp {
        ExactBdlp::Gaussian { b } => {
            let g: f64 = rng.sample(StandardNormal);
            g * (0.5 * b).sqrt()
        }
        ExactBdlp::Stable(law) => {
            let g = law.gamma;
            let st = StableLaw::new(g, law.sigma * g.powf(-1.0 / g), law.rho, law.c)
                .expect("derived stationary law is valid");
            stable_sample(&st, rng)
        }
        ExactBdlp::CompoundPoisson { rate, jumps } => {
            // backward shot noise Σ e^{-u_i} x_i, u_i Poisson(rate) on (0,∞),
            // truncated where the decay factor drops below rel_tol
            let horizon = (1.0 / rel_tol.max(1e-300)).ln();
            let mut acc = 0.0;
            let mut u = 0.0;
            loop {
                let e: f64 = rng.gen();
                u += -e.max(1e-300).ln() / rate;
                if u > horizon {
                    break;
                }
                acc += (-u).exp() * jumps.sample(rng);
            }
            acc
        }
    }
}

/// Jump-size samplers for the split compound Poisson pieces.
#[derive(Clone, Debug)]
pub(crate) enum JumpSampler {
    /// |J| = cutoff·U^{-1/γ}, sign + with probability p.
    ParetoTail { gamma: f64, p: f64, cutoff: f64 },
    /// |J| has density ∝ x^{-γ-1} on (lo, hi], sign + with probability p.
    ParetoBand { gamma: f64, p: f64, lo: f64, hi: f64 },
    /// Finite support (normalized weights).
    Atoms(Vec<(f64, f64)>),
    /// Uniform pieces (lo, hi, normalized weight).
    Segments(Vec<(f64, f64, f64)>),
    /// Tabulated tail of a geometric stable measure.
    GsTail(Arc<GsTailSampler>),
    /// Generic tabulated law.
    Table(Arc<CdfTable>),
}

impl JumpSampler {
    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            JumpSampler::ParetoTail { gamma, p, cutoff } => {
                let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                let mag = cutoff * u.powf(-1.0 / gamma);
                if rng.gen::<f64>() < *p {
                    mag
                } else {
                    -mag
                }
            }
            JumpSampler::ParetoBand { gamma, p, lo, hi } => {
                let u: f64 = rng.gen();
                let a = lo.powf(-gamma);
                let b = hi.powf(-gamma);
                let mag = (a - u * (a - b)).powf(-1.0 / gamma);
                if rng.gen::<f64>() < *p {
                    mag
                } else {
                    -mag
                }
            }
            JumpSampler::Atoms(atoms) => {
                let mut u: f64 = rng.gen();
                for &(x, w) in atoms {
                    if u < w {
                        return x;
                    }
                    u -= w;
                }
                atoms.last().map(|&(x, _)| x).unwrap_or(0.0)
            }
            JumpSampler::Segments(segs) => {
                let mut u: f64 = rng.gen();
                for &(lo, hi, w) in segs {
                    if u < w {
                        return lo + (hi - lo) * (u / w);
                    }
                    u -= w;
                }
                segs.last().map(|&(_, hi, _)| hi).unwrap_or(0.0)
            }
            JumpSampler::GsTail(t) => t.sample(rng.gen(), rng.gen()),
            JumpSampler::Table(t) => t.sample(rng.gen()),
        }
    }
}

/// One independent piece of the per-summand BDLP decomposition. Rates and
/// variances are already scaled by 1/m.
#[derive(Clone, Debug)]
pub(crate) enum SubDriver {
    /// Deterministic drift a per unit L-time.
    Drift { a: f64 },
    /// Brownian part, variance b per unit L-time.
    Gaussian { b: f64 },
    /// Compound Poisson at rate per unit L-time.
    Cp { rate: f64, jumps: JumpSampler },
    /// Compensated small-jump part of a two-sided power measure; `m_scale`
    /// converts ξ·dt into table time.
    TruncStable { tables: Arc<TruncTables>, m_scale: f64 },
}

/// Joint draw of the kernel-weighted increment I = ∫ e^{-ξ(dt-s)} dL(ξs)
/// and the plain increment ΔL = L(ξ(t+dt)) - L(ξt) over one grid step.
impl SubDriver {
    pub(crate) fn step<R: Rng + ?Sized>(&self, xi: f64, dt: f64, rng: &mut R) -> (f64, f64) {
        match self {
            SubDriver::Drift { a } => (a * (1.0 - (-xi * dt).exp()), a * xi * dt),
            SubDriver::Gaussian { b } => {
                let var_i = 0.5 * b * (1.0 - (-2.0 * xi * dt).exp());
                let var_l = b * xi * dt;
                let cov = b * (1.0 - (-xi * dt).exp());
                let g1: f64 = rng.sample(StandardNormal);
                let g2: f64 = rng.sample(StandardNormal);
                let i = g1 * var_i.sqrt();
                let resid = (var_l - cov * cov / var_i).max(0.0);
                let dl = (cov / var_i) * i + g2 * resid.sqrt();
                (i, dl)
            }
            SubDriver::Cp { rate, jumps } => {
                let mean = rate * xi * dt;
                let n = if mean > 0.0 {
                    Poisson::new(mean).map(|p| p.sample(rng) as u64).unwrap_or(0)
                } else {
                    0
                };
                let mut i = 0.0;
                let mut dl = 0.0;
                for _ in 0..n {
                    let tau: f64 = rng.gen_range(0.0..dt);
                    let x = jumps.sample(rng);
                    i += (-xi * (dt - tau)).exp() * x;
                    dl += x;
                }
                (i, dl)
            }
            SubDriver::TruncStable { tables, m_scale } => {
                // the kernel is below e^{-10} before the final 10/ξ window;
                // earlier jumps enter ΔL only
                let w = (10.0 / xi).min(dt);
                let early = dt - w;
                let mut i = 0.0;
                let mut dl = 0.0;
                if early > 0.0 {
                    dl += tables.draw_increment(xi * early * m_scale, rng);
                }
                // full substeps of L-time SUB_LTIME plus one ragged remainder
                let n_full = (xi * w / SUB_LTIME).floor() as u64;
                let h = SUB_LTIME / xi;
                let mut s = early;
                for k in 0..=n_full {
                    let len = if k < n_full { h } else { dt - s };
                    if len <= 0.0 {
                        break;
                    }
                    let z = tables.draw_increment(xi * len * m_scale, rng);
                    let kern = (-xi * (dt - (s + 0.5 * len))).exp();
                    i += kern * z;
                    dl += z;
                    s += len;
                }
                (i, dl)
            }
        }
    }

    pub(crate) fn stationary<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            SubDriver::Drift { a } => *a,
            SubDriver::Gaussian { b } => stationary_init(1.0, &ExactBdlp::Gaussian { b: *b }, rng, STATIONARY_REL_TOL),
            SubDriver::Cp { rate, jumps } => {
                let horizon = (1.0 / STATIONARY_REL_TOL).ln();
                let mut acc = 0.0;
                let mut u = 0.0;
                loop {
                    let e: f64 = rng.gen();
                    u += -e.max(1e-300).ln() / rate;
                    if u > horizon {
                        break;
                    }
                    acc += (-u).exp() * jumps.sample(rng);
                }
                acc
            }
            SubDriver::TruncStable { tables, .. } => tables.draw_stationary(rng),
        }
    }
}
