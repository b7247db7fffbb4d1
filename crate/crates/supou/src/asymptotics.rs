//! Long-horizon regime classification for the integrated process and the
//! parameters of the limit laws.
//!
//! The normalized integral X*(Tt)/A_T converges (in finite-dimensional
//! distribution) to one of a small family of self-similar processes. Which
//! one depends on three exponents: the marginal tail index γ ∈ (0,2), the
//! mixing-density exponent α > 0 (correlation decays like (1+t)^{-α}), and
//! the growth index β ∈ [0,2) of the jump measure at the origin — plus
//! whether a Gaussian component is present.

use serde::Serialize;

use crate::distributions::{doa_params, JumpRegion};
use crate::error::{Error, Result};
use crate::model::gs::{GsLevyTable, GsRegion};
use crate::model::{
    bg_index, tail_indices_at_infinity, tail_indices_at_zero, CharacteristicQuadruple,
    LevyMeasureSpec, ZeroTail,
};
use crate::numeric::gamma as gamma_fn;
use crate::slowvar::SlowlyVaryingSpec;

/// Relative slack used to detect boundary parameter sets.
const BOUNDARY_TOL: f64 = 1e-12;

/// The limit family for X*(Tt)/A_T (or one of its independent components).
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Regime {
    /// Stable Lévy motion of the given index (independent increments).
    StableLevy { index: f64 },
    /// Stable Lévy motion of index 1+α formed by combining the big-jump and
    /// small-jump contributions, which are stable of the same index.
    SumStable { index: f64 },
    /// The dependent-increment β-stable self-similar process with
    /// H = 1 − α/β ∈ (1/β, 1).
    ZProcess { alpha: f64, beta: f64, hurst: f64 },
    /// Fractional Brownian motion with H = 1 − α/2.
    Fbm { hurst: f64 },
    /// Brownian motion (component-level limit when mixing is integrable).
    Brownian,
    /// On a boundary parameter set no limit is asserted.
    Boundary { condition: String },
}

impl Regime {
    /// Normalization exponent E in A_T = T^E × slowly varying.
    pub fn exponent(&self) -> Option<f64> {
        match self {
            Regime::StableLevy { index } | Regime::SumStable { index } => Some(1.0 / index),
            Regime::ZProcess { hurst, .. } | Regime::Fbm { hurst } => Some(*hurst),
            Regime::Brownian => Some(0.5),
            Regime::Boundary { .. } => None,
        }
    }

    pub fn is_boundary(&self) -> bool {
        matches!(self, Regime::Boundary { .. })
    }
}

/// Fully parameterized limit law, computed from a characteristic quadruple.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "law")]
pub enum LimitLaw {
    /// L(1) ~ S_index(sigma, rho, 0).
    Stable { index: f64, sigma: f64, rho: f64 },
    /// Self-similar β-stable process; `sigma`/`rho` parameterize the
    /// underlying stable noise.
    ZProcess {
        alpha: f64,
        beta: f64,
        hurst: f64,
        sigma: f64,
        rho: f64,
    },
    /// Fractional Brownian motion: the prefactor is stated ambiguously in
    /// two source displays, so every reading is emitted as a variance
    /// candidate; empirical verification selects among them.
    Fbm {
        hurst: f64,
        variance_candidates: Vec<FbmVarianceCandidate>,
    },
    Brownian { sigma2: f64 },
}

/// One reading of the fBm prefactor: `sigma2` is Var of the limit at t = 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FbmVarianceCandidate {
    pub expression: String,
    pub sigma2: f64,
}

/// Classification result: the regime, its normalization, and the hypothesis
/// audit trail.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegimeReport {
    pub regime: Regime,
    /// Exponent of T in A_T (absent on a boundary).
    pub exponent: Option<f64>,
    /// Slowly varying factor of A_T; identity unless built from a quadruple
    /// (`classify_quad`) or recomputed via `normalization_at`.
    pub sv_factor: SlowlyVaryingSpec,
    /// Populated by `classify_quad` / `limit_stable_params`.
    pub limit_law: Option<LimitLaw>,
    pub boundary: bool,
    /// (condition, satisfied) pairs; conditions taken on trust are listed
    /// with `true` and a "(assumed)" suffix.
    pub hypotheses_checked: Vec<(String, bool)>,
}

/// Per-component regimes of the Lévy–Itô split: big jumps (x1), compensated
/// small jumps (x2), Gaussian part (x3, absent when b = 0).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentRegimes {
    pub x1: Regime,
    pub x2: Regime,
    pub x3: Option<Regime>,
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= BOUNDARY_TOL * a.abs().max(b.abs()).max(1.0)
}

fn validate_params(gamma: f64, alpha: f64, beta: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 2.0) {
        return Err(Error::invalid("gamma", format!("{gamma} not in (0,2)")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid("alpha", "must be positive and finite"));
    }
    if !(beta >= 0.0 && beta < 2.0) {
        return Err(Error::invalid("beta", format!("{beta} not in [0,2)")));
    }
    Ok(())
}

/// Regimes of the three independent components.
pub fn classify_components(
    gamma: f64,
    alpha: f64,
    beta: f64,
    gaussian_present: bool,
) -> Result<ComponentRegimes> {
    validate_params(gamma, alpha, beta)?;
    let x1 = if near(gamma, 1.0 + alpha) {
        Regime::Boundary {
            condition: "gamma = 1 + alpha".into(),
        }
    } else if gamma < 1.0 + alpha {
        Regime::StableLevy { index: gamma }
    } else {
        Regime::StableLevy { index: 1.0 + alpha }
    };
    let x2 = if near(alpha, 1.0) {
        Regime::Boundary {
            condition: "alpha = 1 (mixing integrability boundary)".into(),
        }
    } else if alpha > 1.0 {
        Regime::Brownian
    } else if near(beta, 1.0 + alpha) {
        Regime::Boundary {
            condition: "beta = 1 + alpha".into(),
        }
    } else if beta < 1.0 + alpha {
        Regime::StableLevy { index: 1.0 + alpha }
    } else {
        Regime::ZProcess {
            alpha,
            beta,
            hurst: 1.0 - alpha / beta,
        }
    };
    let x3 = if !gaussian_present {
        None
    } else if near(alpha, 1.0) {
        Some(Regime::Boundary {
            condition: "alpha = 1 (mixing integrability boundary)".into(),
        })
    } else if alpha > 1.0 {
        Some(Regime::Brownian)
    } else {
        Some(Regime::Fbm {
            hurst: 1.0 - alpha / 2.0,
        })
    };
    Ok(ComponentRegimes { x1, x2, x3 })
}

/// Max-normalization-exponent composition of the component regimes: the
/// component with the fastest-growing A_T dominates; equal-index stable
/// contributions merge into a combined stable law.
pub fn compose_components(c: &ComponentRegimes) -> Regime {
    let mut parts: Vec<&Regime> = vec![&c.x1, &c.x2];
    if let Some(x3) = &c.x3 {
        parts.push(x3);
    }
    // a boundary component only matters if its exponent range can reach the
    // top; conservatively, any boundary not strictly dominated wins
    let definite_max = parts
        .iter()
        .filter_map(|r| r.exponent())
        .fold(f64::NEG_INFINITY, f64::max);
    for r in &parts {
        if let Regime::Boundary { condition } = r {
            // boundary exponents straddle their two sides; without resolving
            // them the composition itself is a boundary unless some definite
            // component strictly dominates both sides
            let dominated = match condition.as_str() {
                s if s.starts_with("alpha = 1") => definite_max > 0.5 + BOUNDARY_TOL,
                _ => false,
            };
            if !dominated {
                return (*r).clone();
            }
        }
    }
    let mut winners: Vec<&Regime> = parts
        .iter()
        .copied()
        .filter(|r| r.exponent().map(|e| near(e, definite_max)).unwrap_or(false))
        .collect();
    if winners.len() > 1 {
        // stable laws of equal index combine; anything else tied is a
        // boundary (this occurs only on measure-zero parameter sets)
        let all_stable_same = winners.iter().all(
            |r| matches!(r, Regime::StableLevy { index } | Regime::SumStable { index } if near(1.0 / index, definite_max)),
        );
        let all_brownian = winners.iter().all(|r| matches!(r, Regime::Brownian));
        if all_stable_same {
            return Regime::SumStable {
                index: 1.0 / definite_max,
            };
        }
        if all_brownian {
            return Regime::Brownian;
        }
        return Regime::Boundary {
            condition: "distinct limit families with equal normalization exponents".into(),
        };
    }
    winners.pop().expect("at least one component present").clone()
}

/// Classify the limit regime from the bare exponents.
///
/// `beta` is the origin growth index of the jump measure when a power law
/// holds there, and the Blumenthal–Getoor index otherwise (the small-jump
/// criterion only needs the comparison with 1 + α).
pub fn classify_regime(
    gamma: f64,
    alpha: f64,
    beta: f64,
    gaussian_present: bool,
) -> Result<RegimeReport> {
    validate_params(gamma, alpha, beta)?;
    let mut hypotheses: Vec<(String, bool)> = vec![
        ("gamma in (0,2)".into(), true),
        ("alpha > 0".into(), true),
        ("beta in [0,2)".into(), true),
        (
            "BDLP mean is zero when gamma > 1 (assumed)".into(),
            true,
        ),
        (
            "mixing density regularly varying at 0 with index alpha (assumed)".into(),
            true,
        ),
    ];

    let regime = if !gaussian_present {
        // no Gaussian part: split on gamma vs 1+alpha, then beta vs 1+alpha
        if near(gamma, 1.0 + alpha) {
            Regime::Boundary {
                condition: "gamma = 1 + alpha".into(),
            }
        } else if gamma < 1.0 + alpha {
            // the stated partition ignores beta here; when beta > gamma the
            // small-jump normalization could in principle dominate — record
            // the check rather than silently trusting the display
            hypotheses.push((
                "small-jump exponent dominated by tail exponent (beta <= gamma or 1 - alpha/beta <= 1/gamma)".into(),
                beta <= gamma || 1.0 - alpha / beta <= 1.0 / gamma + BOUNDARY_TOL,
            ));
            Regime::StableLevy { index: gamma }
        } else if near(beta, 1.0 + alpha) {
            Regime::Boundary {
                condition: "beta = 1 + alpha".into(),
            }
        } else if beta < 1.0 + alpha {
            Regime::SumStable { index: 1.0 + alpha }
        } else {
            Regime::ZProcess {
                alpha,
                beta,
                hurst: 1.0 - alpha / beta,
            }
        }
    } else {
        // Gaussian part present: beta is irrelevant for the regime type
        if near(alpha, 1.0) {
            // not covered by the source result; the Gaussian component sits
            // on the short/long-range dependence boundary
            Regime::Boundary {
                condition: "alpha = 1 with a Gaussian component".into(),
            }
        } else if alpha > 1.0 {
            Regime::StableLevy { index: gamma }
        } else if near(gamma, 2.0 / (2.0 - alpha)) {
            Regime::Boundary {
                condition: "gamma = 2/(2 - alpha)".into(),
            }
        } else if gamma < 2.0 / (2.0 - alpha) {
            Regime::StableLevy { index: gamma }
        } else {
            Regime::Fbm {
                hurst: 1.0 - alpha / 2.0,
            }
        }
    };

    let boundary = regime.is_boundary();
    Ok(RegimeReport {
        exponent: regime.exponent(),
        sv_factor: SlowlyVaryingSpec::Constant { value: 1.0 },
        limit_law: None,
        boundary,
        hypotheses_checked: hypotheses,
        regime,
    })
}

/// The slowly varying factor of A_T for a definite regime, from the marginal
/// tail factor `k` and the mixing-density factor `ell`.
pub fn sv_factor_for(
    regime: &Regime,
    k: &SlowlyVaryingSpec,
    ell: &SlowlyVaryingSpec,
) -> Result<SlowlyVaryingSpec> {
    match regime {
        Regime::StableLevy { index } => {
            // k^# is the de Bruijn conjugate of 1/k(x^{1/γ}); A_T carries
            // k^#(T)^{1/γ}
            Ok(k
                .powf(-1.0)
                .compose_power(1.0 / index)
                .de_bruijn_conjugate()
                .powf(1.0 / index))
        }
        Regime::SumStable { index } => Ok(ell
            .powf(-1.0)
            .compose_power(1.0 / index)
            .de_bruijn_conjugate()
            .powf(1.0 / index)),
        Regime::ZProcess { beta, .. } => Ok(ell.powf(1.0 / beta)),
        Regime::Fbm { .. } => Ok(ell.powf(0.5)),
        Regime::Brownian => SlowlyVaryingSpec::constant(1.0),
        Regime::Boundary { condition } => Err(Error::BoundaryRegime(condition.clone())),
    }
}

/// A_T for a definite regime: T^E times the slowly varying factor built from
/// `k` (marginal tail) and `ell` (mixing density).
pub fn normalization_at(
    report: &RegimeReport,
    t: f64,
    k: &SlowlyVaryingSpec,
    ell: &SlowlyVaryingSpec,
) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::invalid("t", "must be > 0"));
    }
    let e = report
        .exponent
        .ok_or_else(|| Error::BoundaryRegime("no normalization on a boundary set".into()))?;
    let sv = sv_factor_for(&report.regime, k, ell)?;
    Ok(t.powf(e) * sv.eval(t))
}

/// Signed moments ∫ |y|^{power} μ(dy) over the big-jump region, per side.
fn big_abs_moments(mu: &LevyMeasureSpec, power: f64, gs: Option<&GsLevyTable>) -> Result<(f64, f64)> {
    match mu {
        LevyMeasureSpec::CompoundPoisson { rate, jumps } => {
            let plus = jumps
                .abs_moment(power, JumpRegion::BigPositive)
                .ok_or_else(|| Error::numerical("big_abs_moments", "divergent tail moment"))?;
            let minus = jumps
                .abs_moment(power, JumpRegion::BigNegative)
                .ok_or_else(|| Error::numerical("big_abs_moments", "divergent tail moment"))?;
            Ok((rate * plus, rate * minus))
        }
        LevyMeasureSpec::StablePair { c1, c2, gamma } => {
            if power >= *gamma {
                return Err(Error::numerical("big_abs_moments", "divergent tail moment"));
            }
            Ok((c1 / (gamma - power), c2 / (gamma - power)))
        }
        LevyMeasureSpec::Student { delta, gamma, .. } => {
            if power >= *gamma {
                return Err(Error::numerical("big_abs_moments", "divergent tail moment"));
            }
            let kf = LevyMeasureSpec::student_tail_coeff(*delta, *gamma);
            Ok((kf / (gamma - power), kf / (gamma - power)))
        }
        LevyMeasureSpec::GeometricStable { .. } => {
            let t = gs.ok_or_else(|| Error::numerical("big_abs_moments", "missing GS table"))?;
            Ok((
                t.abs_moment(power, GsRegion::BigPositive)?,
                t.abs_moment(power, GsRegion::BigNegative)?,
            ))
        }
    }
}

/// Signed moments ∫ |y|^{power} μ(dy) over 0 < |y| <= 1, per side.
fn small_abs_moments(
    mu: &LevyMeasureSpec,
    power: f64,
    gs: Option<&GsLevyTable>,
) -> Result<(f64, f64)> {
    match mu {
        LevyMeasureSpec::CompoundPoisson { rate, jumps } => {
            let plus = jumps
                .abs_moment(power, JumpRegion::SmallPositive)
                .ok_or_else(|| Error::numerical("small_abs_moments", "divergent moment"))?;
            let minus = jumps
                .abs_moment(power, JumpRegion::SmallNegative)
                .ok_or_else(|| Error::numerical("small_abs_moments", "divergent moment"))?;
            Ok((rate * plus, rate * minus))
        }
        LevyMeasureSpec::StablePair { c1, c2, gamma } => {
            if power <= *gamma {
                return Err(Error::numerical("small_abs_moments", "divergent small moment"));
            }
            Ok((c1 / (power - gamma), c2 / (power - gamma)))
        }
        LevyMeasureSpec::Student { delta, .. } => {
            // small-ball density (δ/π) |x|^{-2} per side
            if power <= 1.0 {
                return Err(Error::numerical("small_abs_moments", "divergent small moment"));
            }
            let v = (delta / std::f64::consts::PI) / (power - 1.0);
            Ok((v, v))
        }
        LevyMeasureSpec::GeometricStable { .. } => {
            let t = gs.ok_or_else(|| Error::numerical("small_abs_moments", "missing GS table"))?;
            Ok((
                t.abs_moment(power, GsRegion::SmallPositive)?,
                t.abs_moment(power, GsRegion::SmallNegative)?,
            ))
        }
    }
}

/// Scale/skew of the (1+α)-stable law with Lévy-type constants c±:
/// σ^{1+α} = (Γ(1−α)/α)(c⁺ + c⁻) sin(πα/2), ρ = (c⁺ − c⁻)/(c⁺ + c⁻).
fn one_plus_alpha_law(alpha: f64, c_plus: f64, c_minus: f64) -> Result<(f64, f64)> {
    let s = c_plus + c_minus;
    if !(s > 0.0) {
        return Ok((0.0, 0.0));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid("alpha", "index 1+alpha requires alpha in (0,1)"));
    }
    let sigma = (gamma_fn(1.0 - alpha) / alpha * s * (std::f64::consts::FRAC_PI_2 * alpha).sin())
        .powf(1.0 / (1.0 + alpha));
    Ok((sigma, (c_plus - c_minus) / s))
}

fn gs_table_for(mu: &LevyMeasureSpec) -> Result<Option<GsLevyTable>> {
    Ok(match mu {
        LevyMeasureSpec::GeometricStable { gamma, sigma, rho } => {
            Some(GsLevyTable::build(*gamma, *sigma, *rho)?)
        }
        _ => None,
    })
}

/// The limit-law parameters for a definite regime, from the quadruple.
pub fn limit_stable_params(
    report: &RegimeReport,
    quad: &CharacteristicQuadruple,
) -> Result<LimitLaw> {
    let (pi_alpha, _) = quad.pi.regvar();
    match &report.regime {
        Regime::StableLevy { index } | Regime::SumStable { index } => {
            let marginal = !matches!(report.regime, Regime::SumStable { .. })
                && is_marginal_index(*index, quad);
            if marginal {
                // regime I: γ-stable with the marginal's own (σ, ρ) inflated
                // by the π moment
                let tail = tail_indices_at_infinity(&quad.mu)?;
                let (sigma, rho) = doa_params(&tail)?;
                let moment = quad.pi.moment(1.0 - index);
                if !moment.is_finite() {
                    return Err(Error::numerical(
                        "limit_stable_params",
                        "the mixing moment E xi^{1-gamma} diverges",
                    ));
                }
                return Ok(LimitLaw::Stable {
                    index: *index,
                    sigma: sigma * (index * moment).powf(1.0 / index),
                    rho,
                });
            }
            // index = 1+α: combine big-jump and small-jump constants
            let alpha = index - 1.0;
            if (alpha - pi_alpha).abs() > 1e-9 {
                return Err(Error::invalid(
                    "report",
                    "stable index does not match 1 + alpha of the quadruple",
                ));
            }
            let gs = gs_table_for(&quad.mu)?;
            let pre = alpha / (1.0 + alpha);
            let (b_plus, b_minus) = big_abs_moments(&quad.mu, 1.0 + alpha, gs.as_ref())?;
            let (s_plus, s_minus) = small_abs_moments(&quad.mu, 1.0 + alpha, gs.as_ref())?;
            let c_plus = pre * (b_plus + s_plus);
            let c_minus = pre * (b_minus + s_minus);
            let (sigma, rho) = one_plus_alpha_law(alpha, c_plus, c_minus)?;
            Ok(LimitLaw::Stable {
                index: *index,
                sigma,
                rho,
            })
        }
        Regime::ZProcess { alpha, beta, hurst } => {
            let (c_plus, c_minus) = match tail_indices_at_zero(&quad.mu) {
                ZeroTail::PowerLaw { beta: b0, c_plus, c_minus } => {
                    if (b0 - beta).abs() > 1e-9 {
                        return Err(Error::invalid(
                            "report",
                            "beta does not match the quadruple's origin index",
                        ));
                    }
                    (c_plus, c_minus)
                }
                _ => {
                    return Err(Error::Unsupported(
                        "dependent-increment stable limit needs a power law at the origin".into(),
                    ))
                }
            };
            let sigma = crate::numeric::stable_scale_from_tail_sum(*beta, c_plus + c_minus)?;
            Ok(LimitLaw::ZProcess {
                alpha: *alpha,
                beta: *beta,
                hurst: *hurst,
                sigma,
                rho: (c_plus - c_minus) / (c_plus + c_minus),
            })
        }
        Regime::Fbm { hurst } => {
            let alpha = 2.0 * (1.0 - hurst);
            let b = quad.b;
            if !(b > 0.0) {
                return Err(Error::invalid("quad", "fBm limit requires b > 0"));
            }
            let g = gamma_fn(1.0 + alpha) / ((2.0 - alpha) * (1.0 - alpha));
            let mut candidates = vec![
                FbmVarianceCandidate {
                    expression: "b * g (printed multiplier read as the variance)".into(),
                    sigma2: b * g,
                },
                FbmVarianceCandidate {
                    expression: "(b * g)^2 (printed multiplier read as the std-dev)".into(),
                    sigma2: (b * g) * (b * g),
                },
                FbmVarianceCandidate {
                    expression: "b^2/2 * g (alternate display, read as the variance)".into(),
                    sigma2: 0.5 * b * b * g,
                },
                FbmVarianceCandidate {
                    expression: "(b^2/2 * g)^2 (alternate display, read as the std-dev)".into(),
                    sigma2: (0.5 * b * b * g) * (0.5 * b * b * g),
                },
            ];
            candidates.sort_by(|a, b| a.sigma2.total_cmp(&b.sigma2));
            candidates.dedup_by(|a, b| (a.sigma2 - b.sigma2).abs() < 1e-12 * b.sigma2.abs().max(1.0));
            Ok(LimitLaw::Fbm {
                hurst: *hurst,
                variance_candidates: candidates,
            })
        }
        Regime::Brownian => {
            // integrable mixing: variances add across the decomposition
            let inv = quad.pi.moment(-1.0);
            if !inv.is_finite() {
                return Err(Error::numerical(
                    "limit_stable_params",
                    "E xi^{-1} diverges; no Brownian limit",
                ));
            }
            let gs = gs_table_for(&quad.mu)?;
            let sigma2_small = match &quad.mu {
                LevyMeasureSpec::CompoundPoisson { rate, jumps } => {
                    rate * jumps.abs_moment(2.0, JumpRegion::Small).unwrap_or(0.0)
                }
                LevyMeasureSpec::StablePair { c1, c2, gamma } => (c1 + c2) / (2.0 - gamma),
                LevyMeasureSpec::Student { delta, .. } => 2.0 * delta / std::f64::consts::PI,
                LevyMeasureSpec::GeometricStable { .. } => {
                    gs.as_ref().expect("GS table built above").small_ball_variance(1.0)
                }
            };
            // a Brownian limit needs a finite second moment overall, so the
            // big-jump region contributes too
            let (b2_plus, b2_minus) = big_abs_moments(&quad.mu, 2.0, gs.as_ref())?;
            Ok(LimitLaw::Brownian {
                sigma2: (quad.b + sigma2_small + b2_plus + b2_minus) * inv,
            })
        }
        Regime::Boundary { condition } => Err(Error::BoundaryRegime(condition.clone())),
    }
}

/// Distinguish regime I (index = marginal γ) from the 1+α stable regimes
/// when both are tagged `StableLevy`. A light-tailed measure has no marginal
/// tail index, so it never matches.
fn is_marginal_index(index: f64, quad: &CharacteristicQuadruple) -> bool {
    tail_indices_at_infinity(&quad.mu)
        .map(|tail| (tail.gamma - index).abs() < 1e-9)
        .unwrap_or(false)
}

/// Classify directly from a quadruple: extracts (γ, α, β), fills the slowly
/// varying factor of A_T and the limit law.
pub fn classify_quad(quad: &CharacteristicQuadruple) -> Result<RegimeReport> {
    quad.validate()?;
    let (alpha, ell) = quad.pi.regvar();
    let beta = match tail_indices_at_zero(&quad.mu) {
        ZeroTail::PowerLaw { beta, .. } => beta,
        // only the comparison with 1 + alpha matters; the Blumenthal-Getoor
        // index is the right surrogate when no power law holds at the origin
        ZeroTail::FiniteMeasure | ZeroTail::Logarithmic => bg_index(&quad.mu),
    };
    let one = SlowlyVaryingSpec::Constant { value: 1.0 };
    let mut report = match tail_indices_at_infinity(&quad.mu) {
        Ok(tail) => {
            let mut r = classify_regime(tail.gamma, alpha, beta, quad.b > 0.0)?;
            if !r.boundary {
                r.sv_factor = sv_factor_for(&r.regime, &tail.k, &ell)?;
            }
            r
        }
        // light-tailed jump measure: the marginal has all power moments, so
        // the big-jump component never dominates and the small-jump /
        // Gaussian comparison alone decides the regime
        Err(Error::Unsupported(_)) => {
            let mut r = classify_light_tail(alpha, beta, quad.b > 0.0)?;
            if !r.boundary {
                r.sv_factor = sv_factor_for(&r.regime, &one, &ell)?;
            }
            r
        }
        Err(e) => return Err(e),
    };
    if !report.boundary {
        report.limit_law = Some(limit_stable_params(&report, quad)?);
    }
    Ok(report)
}

/// Regime when the jump measure is light-tailed at infinity (all power
/// moments of the marginal finite): only the small-jump and Gaussian
/// components can dominate.
fn classify_light_tail(alpha: f64, beta: f64, gaussian_present: bool) -> Result<RegimeReport> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid("alpha", "must be positive and finite"));
    }
    if !(beta >= 0.0 && beta < 2.0) {
        return Err(Error::invalid("beta", format!("{beta} not in [0,2)")));
    }
    let hypotheses: Vec<(String, bool)> = vec![
        ("jump measure light-tailed at infinity".into(), true),
        ("alpha > 0".into(), true),
        ("beta in [0,2)".into(), true),
        (
            "mixing density regularly varying at 0 with index alpha (assumed)".into(),
            true,
        ),
    ];
    let regime = if near(alpha, 1.0) {
        Regime::Boundary {
            condition: "alpha = 1 (mixing integrability boundary)".into(),
        }
    } else if alpha > 1.0 {
        Regime::Brownian
    } else if gaussian_present {
        // fBm exponent 1 - alpha/2 beats 1/(1+alpha) and 1 - alpha/beta
        Regime::Fbm {
            hurst: 1.0 - alpha / 2.0,
        }
    } else if near(beta, 1.0 + alpha) {
        Regime::Boundary {
            condition: "beta = 1 + alpha".into(),
        }
    } else if beta < 1.0 + alpha {
        Regime::SumStable { index: 1.0 + alpha }
    } else {
        Regime::ZProcess {
            alpha,
            beta,
            hurst: 1.0 - alpha / beta,
        }
    };
    let boundary = regime.is_boundary();
    Ok(RegimeReport {
        exponent: regime.exponent(),
        sv_factor: SlowlyVaryingSpec::Constant { value: 1.0 },
        limit_law: None,
        boundary,
        hypotheses_checked: hypotheses,
        regime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::JumpDist;
    use crate::model::PiSpec;
    use approx::assert_relative_eq;

    fn report(gamma: f64, alpha: f64, beta: f64, b: bool) -> RegimeReport {
        classify_regime(gamma, alpha, beta, b).unwrap()
    }

    #[test]
    fn classify_examples() {
        // no Gaussian part
        let r = report(0.8, 0.5, 0.3, false);
        assert_eq!(r.regime, Regime::StableLevy { index: 0.8 });
        assert_relative_eq!(r.exponent.unwrap(), 1.25);

        let r = report(1.8, 0.5, 0.3, false);
        assert_eq!(r.regime, Regime::SumStable { index: 1.5 });
        assert_relative_eq!(r.exponent.unwrap(), 1.0 / 1.5);

        let r = report(1.8, 0.5, 1.7, false);
        match r.regime {
            Regime::ZProcess { hurst, .. } => {
                assert_relative_eq!(hurst, 1.0 - 0.5 / 1.7, max_relative = 1e-12)
            }
            other => panic!("expected ZProcess, got {other:?}"),
        }

        // Gaussian part present
        let r = report(1.5, 0.5, 0.3, true);
        assert_eq!(r.regime, Regime::Fbm { hurst: 0.75 }); // 1.5 > 2/(2-0.5)

        let r = report(1.2, 0.5, 0.3, true);
        assert_eq!(r.regime, Regime::StableLevy { index: 1.2 }); // 1.2 < 4/3

        let r = report(1.2, 1.5, 0.3, true);
        assert_eq!(r.regime, Regime::StableLevy { index: 1.2 }); // alpha > 1
    }

    #[test]
    fn classify_boundaries() {
        assert!(report(1.5, 0.5, 0.3, false).boundary); // gamma = 1 + alpha
        assert!(report(1.8, 0.5, 1.5, false).boundary); // beta = 1 + alpha
        assert!(report(4.0 / 3.0, 0.5, 0.3, true).boundary); // gamma = 2/(2-alpha)
        assert!(report(1.5, 1.0, 0.3, true).boundary); // alpha = 1 with Gaussian
        assert!(!report(1.5, 1.0, 0.3, false).boundary); // alpha = 1, b = 0: regime I
    }

    #[test]
    fn classify_rejects_invalid() {
        assert!(classify_regime(2.0, 0.5, 0.3, false).is_err());
        assert!(classify_regime(0.0, 0.5, 0.3, false).is_err());
        assert!(classify_regime(1.5, 0.0, 0.3, false).is_err());
        assert!(classify_regime(1.5, 0.5, 2.0, false).is_err());
        assert!(classify_regime(1.5, 0.5, -0.1, false).is_err());
    }

    /// The full classifier equals the max-exponent composition of the
    /// component classifiers wherever beta <= gamma (every measure family in
    /// scope satisfies this: pair/Student/compound-Poisson/geometric stable).
    #[test]
    fn composition_matches_full_classifier() {
        let n = 60;
        for i in 0..n {
            let gamma = 0.02 + 1.96 * i as f64 / (n - 1) as f64;
            for j in 0..n {
                let alpha = 0.05 + 2.4 * j as f64 / (n - 1) as f64;
                for l in 0..n {
                    let beta = 1.98 * l as f64 / (n - 1) as f64;
                    if beta > gamma {
                        continue;
                    }
                    for b in [false, true] {
                        let full = report(gamma, alpha, beta, b);
                        let comp =
                            compose_components(&classify_components(gamma, alpha, beta, b).unwrap());
                        if full.boundary || comp.is_boundary() {
                            continue; // boundary geometry differs only in labels
                        }
                        let composed_exp = comp.exponent().unwrap();
                        let full_exp = full.exponent.unwrap();
                        assert!(
                            (composed_exp - full_exp).abs() < 1e-12,
                            "({gamma},{alpha},{beta},{b}): composed {comp:?} vs full {:?}",
                            full.regime
                        );
                        // same family up to the SumStable/StableLevy tag
                        let same = match (&comp, &full.regime) {
                            (Regime::StableLevy { index: a }, Regime::StableLevy { index: c })
                            | (Regime::SumStable { index: a }, Regime::SumStable { index: c })
                            | (Regime::StableLevy { index: a }, Regime::SumStable { index: c })
                            | (Regime::SumStable { index: a }, Regime::StableLevy { index: c }) => {
                                (a - c).abs() < 1e-12
                            }
                            (a, c) => a == c,
                        };
                        assert!(same, "({gamma},{alpha},{beta},{b}): {comp:?} vs {:?}", full.regime);
                    }
                }
            }
        }
    }

    #[test]
    fn exponent_monotonicity() {
        // regime I: E = 1/gamma decreasing in gamma
        let mut prev = f64::INFINITY;
        for i in 0..50 {
            let gamma = 0.1 + i as f64 * 0.01;
            let e = report(gamma, 1.5, 0.0, false).exponent.unwrap();
            assert!(e < prev);
            prev = e;
        }
        // II.b: E decreasing in alpha
        let mut prev = f64::INFINITY;
        for i in 0..30 {
            let alpha = 0.3 + i as f64 * 0.01;
            let e = report(1.9, alpha, 1.8, false).exponent.unwrap();
            assert!(e < prev);
            prev = e;
        }
    }

    #[test]
    fn z_regime_hurst_range() {
        for (gamma, alpha, beta) in [(1.8, 0.5, 1.7), (1.9, 0.2, 1.3), (1.95, 0.7, 1.9)] {
            if gamma <= 1.0 + alpha || beta <= 1.0 + alpha {
                continue;
            }
            match report(gamma, alpha, beta, false).regime {
                Regime::ZProcess { hurst, beta, .. } => {
                    assert!(hurst > 1.0 / beta && hurst < 1.0, "H={hurst} beta={beta}");
                }
                other => panic!("expected ZProcess, got {other:?}"),
            }
        }
    }

    #[test]
    fn normalization_examples() {
        let one = SlowlyVaryingSpec::Constant { value: 1.0 };
        let r = report(0.8, 0.5, 0.3, false);
        assert_relative_eq!(
            normalization_at(&r, 1e4, &one, &one).unwrap(),
            1e5,
            max_relative = 1e-10
        );

        let r = report(1.8, 0.5, 0.3, false); // SumStable(1.5)
        assert_relative_eq!(
            normalization_at(&r, 1e3, &one, &one).unwrap(),
            100.0,
            max_relative = 1e-10
        );

        let r = report(1.8, 0.5, 1.7, false); // ZProcess
        let two = SlowlyVaryingSpec::Constant { value: 2.0 };
        assert_relative_eq!(
            normalization_at(&r, 1e3, &one, &two).unwrap(),
            1e3_f64.powf(1.0 - 0.5 / 1.7) * 2.0_f64.powf(1.0 / 1.7),
            max_relative = 1e-10
        );

        // boundary: no normalization
        let r = report(1.5, 0.5, 0.3, false);
        assert!(normalization_at(&r, 1e3, &one, &one).is_err());
    }

    fn quad(mu: LevyMeasureSpec, b: f64, alpha: f64) -> CharacteristicQuadruple {
        let q = CharacteristicQuadruple {
            a: 0.0,
            b,
            mu,
            pi: PiSpec::Gamma { alpha },
        }
        .with_zero_mean();
        q.validate().unwrap();
        q
    }

    #[test]
    fn regime_one_sigma_example() {
        // sigma = 1 marginal, Gamma(2) mixing, gamma = 0.8:
        // sigma_tilde = (0.8 Gamma(2.2)/Gamma(2))^{1/0.8}
        let q = quad(
            LevyMeasureSpec::CompoundPoisson {
                rate: 1.0,
                jumps: JumpDist::Pareto {
                    gamma: 0.8,
                    p: 0.5,
                    q: 0.5,
                    cutoff: 1.0,
                },
            },
            0.0,
            2.0,
        );
        let r = classify_quad(&q).unwrap();
        assert_eq!(r.regime, Regime::StableLevy { index: 0.8 });
        match r.limit_law.unwrap() {
            LimitLaw::Stable { index, sigma, rho } => {
                assert_relative_eq!(index, 0.8);
                assert_eq!(rho, 0.0);
                let sigma_marginal =
                    crate::numeric::stable_scale_from_tail_sum(0.8, 1.0).unwrap();
                let expect = sigma_marginal
                    * (0.8 * gamma_fn(2.2) / gamma_fn(2.0)).powf(1.25);
                assert_relative_eq!(sigma, expect, max_relative = 1e-10);
                // the spec'd numeric value for the pi-moment factor alone
                assert_relative_eq!(
                    (0.8 * gamma_fn(2.2) / gamma_fn(2.0)).powf(1.25),
                    0.854,
                    max_relative = 2e-3
                );
            }
            other => panic!("expected stable law, got {other:?}"),
        }
    }

    #[test]
    fn sum_stable_small_support_reduces_to_small_constants() {
        // jumps supported in |x| <= 1: the big-jump constants vanish
        let q = quad(
            LevyMeasureSpec::CompoundPoisson {
                rate: 1.0,
                jumps: JumpDist::Uniform { lo: -0.5, hi: 1.0 },
            },
            0.0,
            0.5,
        );
        let r = classify_quad(&q).unwrap();
        assert_eq!(r.regime, Regime::SumStable { index: 1.5 });
        let alpha = 0.5;
        let pre = alpha / (1.0 + alpha);
        let c_plus = pre * (2.0 / 3.0) * crate::numeric::integrate(|x| x.powf(1.5), 0.0, 1.0, 1e-12);
        let c_minus = pre * (2.0 / 3.0) * crate::numeric::integrate(|x| x.powf(1.5), 0.0, 0.5, 1e-12);
        let (sig, rho) = one_plus_alpha_law(alpha, c_plus, c_minus).unwrap();
        match r.limit_law.unwrap() {
            LimitLaw::Stable { index, sigma, rho: r2 } => {
                assert_relative_eq!(index, 1.5);
                assert_relative_eq!(sigma, sig, max_relative = 1e-9);
                assert_relative_eq!(r2, rho, max_relative = 1e-9);
            }
            other => panic!("expected stable law, got {other:?}"),
        }
    }

    #[test]
    fn z_regime_pair_constants() {
        // pair measure c1 = c2 = 1, gamma = beta = 1.7, alpha = 0.5
        let q = quad(
            LevyMeasureSpec::StablePair {
                c1: 1.0,
                c2: 1.0,
                gamma: 1.7,
            },
            0.0,
            0.5,
        );
        let r = classify_quad(&q).unwrap();
        match r.limit_law.unwrap() {
            LimitLaw::ZProcess { beta, hurst, sigma, rho, .. } => {
                assert_relative_eq!(beta, 1.7);
                assert_relative_eq!(hurst, 1.0 - 0.5 / 1.7, max_relative = 1e-12);
                assert_eq!(rho, 0.0);
                let expect =
                    crate::numeric::stable_scale_from_tail_sum(1.7, 2.0 / 1.7).unwrap();
                assert_relative_eq!(sigma, expect, max_relative = 1e-12);
            }
            other => panic!("expected Z-limit, got {other:?}"),
        }
    }

    #[test]
    fn fbm_candidates() {
        let q = quad(
            LevyMeasureSpec::StablePair {
                c1: 1.0,
                c2: 1.0,
                gamma: 1.7,
            },
            2.0,
            0.5,
        );
        let r = classify_quad(&q).unwrap();
        assert_eq!(r.regime, Regime::Fbm { hurst: 0.75 });
        match r.limit_law.unwrap() {
            LimitLaw::Fbm { hurst, variance_candidates } => {
                assert_relative_eq!(hurst, 0.75);
                let g = gamma_fn(1.5) / (1.5 * 0.5);
                // with b = 2, b*g and b^2/2*g coincide, leaving two readings
                assert_eq!(variance_candidates.len(), 2);
                assert!(variance_candidates
                    .iter()
                    .any(|c| (c.sigma2 - 2.0 * g).abs() < 1e-12));
                assert!(variance_candidates
                    .iter()
                    .any(|c| (c.sigma2 - 4.0 * g * g).abs() < 1e-10));
            }
            other => panic!("expected fBm, got {other:?}"),
        }
    }

    #[test]
    fn geometric_stable_routes_through_bg_index() {
        // logarithmic origin growth: BG index 0 < 1 + alpha, so the
        // gamma > 1 + alpha case lands in the combined-stable regime
        let q = quad(
            LevyMeasureSpec::GeometricStable {
                gamma: 1.8,
                sigma: 1.0,
                rho: 0.0,
            },
            0.0,
            0.5,
        );
        let r = classify_quad(&q).unwrap();
        assert_eq!(r.regime, Regime::SumStable { index: 1.5 });
        match r.limit_law.unwrap() {
            LimitLaw::Stable { index, sigma, rho } => {
                assert_relative_eq!(index, 1.5);
                assert!(sigma > 0.0);
                assert!(rho.abs() < 1e-6, "symmetric measure must give rho=0, got {rho}");
            }
            other => panic!("expected stable law, got {other:?}"),
        }
    }

    #[test]
    fn symmetric_measures_have_zero_skew() {
        for q in [
            quad(
                LevyMeasureSpec::StablePair {
                    c1: 1.0,
                    c2: 1.0,
                    gamma: 1.8,
                },
                0.0,
                0.6,
            ),
            quad(
                LevyMeasureSpec::Student {
                    delta: 1.0,
                    gamma: 1.8,
                    c: 0.0,
                },
                0.0,
                0.5,
            ),
        ] {
            let r = classify_quad(&q).unwrap();
            match r.limit_law.unwrap() {
                LimitLaw::Stable { rho, .. } | LimitLaw::ZProcess { rho, .. } => {
                    assert!(rho.abs() < 1e-9, "got rho = {rho}")
                }
                other => panic!("unexpected law {other:?}"),
            }
        }
    }

    #[test]
    fn report_serializes() {
        let r = report(0.8, 0.5, 0.3, false);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("StableLevy"));
        assert!(s.contains("hypotheses_checked"));
    }
}
