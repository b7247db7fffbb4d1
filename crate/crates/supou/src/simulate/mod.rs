//! Path generation: the process is simulated as a finite superposition of m
//! OU summands with rates drawn from π and BDLP cumulant κ/m each, split by
//! the Lévy–Itô decomposition into independently simulated components
//! (big jumps + drift, compensated small jumps, Brownian part). Integration
//! uses the pathwise OU identity X*(t) = (X(0) - X(t) + L(ξt))/ξ per summand.

mod drivers;
mod tables;

pub use drivers::{ou_exact_step, stationary_init, ExactBdlp, STATIONARY_REL_TOL};

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::distributions::{pareto_plus_cf, JumpDist};
use crate::error::{Error, Result};
use crate::model::gs::GsLevyTable;
use crate::model::{jump_cumulant, CharacteristicQuadruple, LevyMeasureSpec, PiSpec};
use crate::numeric::{splitmix64, CompensatedSum};

use drivers::{JumpSampler, SubDriver};
use tables::TruncTables;

/// Initialization policy for the stationary start.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BurnIn {
    /// Draw X(0) from the exact stationary law (series/tables per driver).
    StationarySeries,
    /// Start at zero and discard an initial stretch of the given length.
    Time(f64),
}

impl Serialize for BurnIn {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BurnIn::StationarySeries => s.serialize_str("stationary-series"),
            BurnIn::Time(t) => s.serialize_f64(*t),
        }
    }
}

impl<'de> Deserialize<'de> for BurnIn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Time(f64),
            Tag(String),
        }
        match Repr::deserialize(d)? {
            Repr::Time(t) => Ok(BurnIn::Time(t)),
            Repr::Tag(s) if s == "stationary-series" => Ok(BurnIn::StationarySeries),
            Repr::Tag(s) => Err(D::Error::custom(format!(
                "burn_in must be a number or \"stationary-series\", got {s:?}"
            ))),
        }
    }
}

/// Simulation plan shared by every replication.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub horizon: f64,
    /// Strictly increasing, from 0 to the horizon.
    pub grid: Vec<f64>,
    /// Number m of OU summands in the superposition.
    pub superposition_count: usize,
    pub burn_in: BurnIn,
    /// Jumps below this size are Gaussian-substituted on the approximation
    /// path (Student / geometric stable small-jump parts).
    pub small_jump_cutoff: f64,
    pub replications: usize,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(grid: Vec<f64>, superposition_count: usize, replications: usize, seed: u64) -> Result<Self> {
        let horizon = *grid.last().unwrap_or(&0.0);
        let cfg = SimConfig {
            horizon,
            grid,
            superposition_count,
            burn_in: BurnIn::StationarySeries,
            small_jump_cutoff: 1e-2,
            replications,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() || self.grid[0] != 0.0 {
            return Err(Error::invalid("grid", "must start at 0"));
        }
        if self.grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("grid", "must be strictly increasing"));
        }
        if (self.grid.last().unwrap() - self.horizon).abs() > 1e-12 * self.horizon.max(1.0) {
            return Err(Error::invalid("grid", "must end at the horizon"));
        }
        if self.superposition_count == 0 {
            return Err(Error::invalid("superposition_count", "must be >= 1"));
        }
        if self.replications == 0 {
            return Err(Error::invalid("replications", "must be >= 1"));
        }
        if !(self.small_jump_cutoff > 0.0 && self.small_jump_cutoff <= 1.0) {
            return Err(Error::invalid("small_jump_cutoff", "must be in (0, 1]"));
        }
        if let BurnIn::Time(t) = self.burn_in {
            if !(t >= 0.0) {
                return Err(Error::invalid("burn_in", "must be >= 0"));
            }
        }
        Ok(())
    }
}

/// A path and its running integral on the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub integrated: Vec<f64>,
}

impl SamplePath {
    pub fn zero(grid: &[f64]) -> Self {
        SamplePath {
            grid: grid.to_vec(),
            values: vec![0.0; grid.len()],
            integrated: vec![0.0; grid.len()],
        }
    }
}

/// The three independent components of the Lévy–Itô decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentPaths {
    pub x1: SamplePath,
    pub x2: SamplePath,
    pub x3: SamplePath,
}

impl ComponentPaths {
    /// Pointwise sum of the components (the total process and integral).
    pub fn total(&self) -> SamplePath {
        let n = self.x1.grid.len();
        let mut values = Vec::with_capacity(n);
        let mut integrated = Vec::with_capacity(n);
        for i in 0..n {
            values.push(self.x1.values[i] + self.x2.values[i] + self.x3.values[i]);
            integrated.push(self.x1.integrated[i] + self.x2.integrated[i] + self.x3.integrated[i]);
        }
        SamplePath {
            grid: self.x1.grid.clone(),
            values,
            integrated,
        }
    }
}

/// All replications of one experiment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathEnsemble {
    pub config: SimConfig,
    /// Replication index of each entry in `replications`.
    pub replication_ids: Vec<usize>,
    pub replications: Vec<ComponentPaths>,
    /// Derived seed per replication index (including failed ones).
    pub seeds: Vec<u64>,
    /// Replications that failed, with the error message.
    pub failures: Vec<(usize, String)>,
}

/// Which side of the |x| = 1 split a part carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JumpHalf {
    Big,
    Small,
}

/// One factor of the Lévy–Itô decomposition: (a, 0, μ·1_{|x|>1}, π),
/// (0, 0, μ·1_{|x|≤1}, π) or (0, b, 0, π).
#[derive(Clone, Debug)]
pub struct LevyItoPart {
    pub a: f64,
    pub b: f64,
    pub measure: Option<(LevyMeasureSpec, JumpHalf)>,
    pub pi: PiSpec,
    gs: Option<Arc<GsLevyTable>>,
}

impl LevyItoPart {
    /// Cumulant of this factor's BDLP at time 1.
    pub fn cumulant(&self, zeta: f64) -> Result<Complex64> {
        let mut k = Complex64::new(-0.5 * self.b * zeta * zeta, self.a * zeta);
        if let Some((mu, half)) = &self.measure {
            let big = big_jump_cumulant(mu, zeta, self.gs.as_deref())?;
            k += match half {
                JumpHalf::Big => big,
                JumpHalf::Small => jump_cumulant(mu, zeta)? - location_term(mu, zeta) - big,
            };
        }
        Ok(k)
    }

    /// Total mass of the carried jump measure (big half only).
    pub fn jump_mass(&self) -> Result<f64> {
        match &self.measure {
            Some((mu, JumpHalf::Big)) => Ok(big_jump_rate(mu, self.gs.as_deref())?),
            _ => Err(Error::Unsupported("mass defined for the big-jump factor only".into())),
        }
    }
}

/// The iζc location term a Student measure carries inside its cumulant; it
/// belongs with the drift factor of the decomposition.
fn location_term(mu: &LevyMeasureSpec, zeta: f64) -> Complex64 {
    match mu {
        LevyMeasureSpec::Student { c, .. } => Complex64::new(0.0, c * zeta),
        _ => Complex64::new(0.0, 0.0),
    }
}

fn measure_location(mu: &LevyMeasureSpec) -> f64 {
    match mu {
        LevyMeasureSpec::Student { c, .. } => *c,
        _ => 0.0,
    }
}

/// μ(|x| > 1).
fn big_jump_rate(mu: &LevyMeasureSpec, gs: Option<&GsLevyTable>) -> Result<f64> {
    Ok(match mu {
        LevyMeasureSpec::CompoundPoisson { rate, jumps } => rate * prob_big(jumps),
        LevyMeasureSpec::StablePair { c1, c2, gamma } => (c1 + c2) / gamma,
        LevyMeasureSpec::Student { delta, gamma, .. } => {
            2.0 * LevyMeasureSpec::student_tail_coeff(*delta, *gamma) / gamma
        }
        LevyMeasureSpec::GeometricStable { .. } => {
            let t = gs.ok_or_else(|| Error::numerical("levy_ito_split", "missing GS table"))?;
            t.mass_above(1.0, true) + t.mass_above(1.0, false)
        }
    })
}

/// P(|J| > 1) under a jump-size law.
fn prob_big(jumps: &JumpDist) -> f64 {
    match jumps {
        JumpDist::Pareto { gamma, cutoff, .. } => {
            if *cutoff >= 1.0 {
                1.0
            } else {
                cutoff.powf(*gamma)
            }
        }
        JumpDist::PointMasses { atoms } => atoms
            .iter()
            .filter(|&&(x, _)| x.abs() > 1.0)
            .map(|&(_, w)| w)
            .sum(),
        JumpDist::Uniform { lo, hi } => {
            let len = hi - lo;
            let above = (hi - lo.max(1.0)).max(0.0);
            let below = (hi.min(-1.0) - lo).max(0.0);
            (above + below) / len
        }
    }
}

/// ∫_{|x|>1} (e^{iζx} - 1) μ(dx).
fn big_jump_cumulant(mu: &LevyMeasureSpec, zeta: f64, gs: Option<&GsLevyTable>) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    Ok(match mu {
        LevyMeasureSpec::CompoundPoisson { rate, jumps } => {
            rate * big_char_integral(jumps, zeta)
        }
        LevyMeasureSpec::StablePair { c1, c2, gamma } => {
            (c1 / gamma) * (pareto_plus_cf(zeta, *gamma, 1.0) - one)
                + (c2 / gamma) * (pareto_plus_cf(-zeta, *gamma, 1.0) - one)
        }
        LevyMeasureSpec::Student { delta, gamma, .. } => {
            let kf = LevyMeasureSpec::student_tail_coeff(*delta, *gamma) / gamma;
            kf * (pareto_plus_cf(zeta, *gamma, 1.0) - one)
                + kf * (pareto_plus_cf(-zeta, *gamma, 1.0) - one)
        }
        LevyMeasureSpec::GeometricStable { .. } => {
            let t = gs.ok_or_else(|| Error::numerical("levy_ito_split", "missing GS table"))?;
            let mut acc = Complex64::new(0.0, 0.0);
            for positive in [true, false] {
                let sgn = if positive { 1.0 } else { -1.0 };
                // log-substituted trapezoid over the tabulated density
                let n = 4000;
                let t_hi = (1e3_f64).ln();
                let mut prev: Option<Complex64> = None;
                for i in 0..=n {
                    let u = t_hi * i as f64 / n as f64;
                    let x = u.exp();
                    let f = (Complex64::new(0.0, zeta * sgn * x).exp() - one)
                        * t.density(sgn * x)
                        * x;
                    if let Some(p) = prev {
                        acc += (p + f) * 0.5 * (t_hi / n as f64);
                    }
                    prev = Some(f);
                }
            }
            acc
        }
    })
}

/// ∫_{|x|>1} (e^{iζx} - 1) dF(x) for a jump-size law F.
fn big_char_integral(jumps: &JumpDist, zeta: f64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    match jumps {
        JumpDist::Pareto { gamma, p, q, cutoff } => {
            let c = cutoff.max(1.0);
            let scale = (cutoff / c).powf(*gamma);
            scale
                * (p * (pareto_plus_cf(zeta, *gamma, c) - one)
                    + q * (pareto_plus_cf(-zeta, *gamma, c) - one))
        }
        JumpDist::PointMasses { atoms } => atoms
            .iter()
            .filter(|&&(x, _)| x.abs() > 1.0)
            .map(|&(x, w)| w * (Complex64::new(0.0, zeta * x).exp() - one))
            .sum(),
        JumpDist::Uniform { lo, hi } => {
            let mut acc = Complex64::new(0.0, 0.0);
            let len = hi - lo;
            for (a, b) in [(lo.max(1.0), *hi), (*lo, hi.min(-1.0))] {
                if b > a {
                    let seg = if zeta == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        (Complex64::new(0.0, zeta * b).exp() - Complex64::new(0.0, zeta * a).exp())
                            / Complex64::new(0.0, zeta)
                            - (b - a) * one
                    };
                    acc += seg / len;
                }
            }
            acc
        }
    }
}

/// Lévy–Itô decomposition of the quadruple into independent factors
/// (a, 0, μ1, π), (0, 0, μ2, π), (0, b, 0, π).
pub fn levy_ito_split(quad: &CharacteristicQuadruple) -> Result<(LevyItoPart, LevyItoPart, LevyItoPart)> {
    let gs = match &quad.mu {
        LevyMeasureSpec::GeometricStable { gamma, sigma, rho } => {
            Some(Arc::new(GsLevyTable::build(*gamma, *sigma, *rho)?))
        }
        _ => None,
    };
    let p1 = LevyItoPart {
        a: quad.a + measure_location(&quad.mu),
        b: 0.0,
        measure: Some((quad.mu.clone(), JumpHalf::Big)),
        pi: quad.pi.clone(),
        gs: gs.clone(),
    };
    let p2 = LevyItoPart {
        a: 0.0,
        b: 0.0,
        measure: Some((quad.mu.clone(), JumpHalf::Small)),
        pi: quad.pi.clone(),
        gs: gs.clone(),
    };
    let p3 = LevyItoPart {
        a: 0.0,
        b: quad.b,
        measure: None,
        pi: quad.pi.clone(),
        gs,
    };
    Ok((p1, p2, p3))
}

/// Per-summand bookkeeping needed for the exact integration identity.
#[derive(Clone, Debug, Default)]
pub struct OuBookkeeping {
    /// Relaxation rate of each summand.
    pub xi: Vec<f64>,
    /// Summand values at each grid point: `states[j][k]`.
    pub states: Vec<Vec<f64>>,
    /// Cumulative BDLP increment L_k(ξ_k t_j): `lcum[j][k]`.
    pub lcum: Vec<Vec<f64>>,
}

/// Exact running integral from the identity
/// X*_k(t) = (X_k(0) - X_k(t) + L_k(ξ_k t)) / ξ_k, summed over summands.
pub fn integrate_path(book: &OuBookkeeping) -> Vec<f64> {
    let n = book.states.len();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let mut s = CompensatedSum::default();
        for k in 0..book.xi.len() {
            s.add((book.states[0][k] - book.states[j][k] + book.lcum[j][k]) / book.xi[k]);
        }
        out.push(s.value());
    }
    out
}

/// Trapezoid fallback for paths without per-summand bookkeeping.
pub fn integrate_trapezoid(grid: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = CompensatedSum::default();
    out.push(0.0);
    for j in 1..grid.len() {
        acc.add(0.5 * (values[j] + values[j - 1]) * (grid[j] - grid[j - 1]));
        out.push(acc.value());
    }
    out
}

/// Reusable simulation engine: driver decomposition and inversion tables are
/// built once and shared across replications.
pub struct Engine {
    pi: PiSpec,
    m: usize,
    drivers: [Vec<SubDriver>; 3],
}

impl Engine {
    pub fn new(quad: &CharacteristicQuadruple, config: &SimConfig) -> Result<Engine> {
        quad.validate()?;
        config.validate()?;
        let m = config.superposition_count;
        let mf = m as f64;
        let eps = config.small_jump_cutoff;
        let mut d1: Vec<SubDriver> = Vec::new();
        let mut d2: Vec<SubDriver> = Vec::new();
        let mut d3: Vec<SubDriver> = Vec::new();

        let drift1 = quad.a + measure_location(&quad.mu);
        if drift1 != 0.0 {
            d1.push(SubDriver::Drift { a: drift1 / mf });
        }
        if quad.b > 0.0 {
            d3.push(SubDriver::Gaussian { b: quad.b / mf });
        }

        match &quad.mu {
            LevyMeasureSpec::CompoundPoisson { rate, jumps } => {
                let pb = prob_big(jumps);
                if pb > 0.0 {
                    d1.push(SubDriver::Cp {
                        rate: rate * pb / mf,
                        jumps: conditional_sampler(jumps, JumpHalf::Big)?,
                    });
                }
                if pb < 1.0 {
                    d2.push(SubDriver::Cp {
                        rate: rate * (1.0 - pb) / mf,
                        jumps: conditional_sampler(jumps, JumpHalf::Small)?,
                    });
                }
                let mean_small = rate * jumps.mean_small();
                if mean_small != 0.0 {
                    d2.push(SubDriver::Drift { a: -mean_small / mf });
                }
            }
            LevyMeasureSpec::StablePair { c1, c2, gamma } => {
                let s = c1 + c2;
                d1.push(SubDriver::Cp {
                    rate: s / gamma / mf,
                    jumps: JumpSampler::ParetoTail {
                        gamma: *gamma,
                        p: c1 / s,
                        cutoff: 1.0,
                    },
                });
                d2.push(SubDriver::TruncStable {
                    tables: Arc::new(TruncTables::build(*c1, *c2, *gamma, m)?),
                    m_scale: 1.0 / mf,
                });
            }
            LevyMeasureSpec::Student { delta, gamma, .. } => {
                let kf = LevyMeasureSpec::student_tail_coeff(*delta, *gamma);
                d1.push(SubDriver::Cp {
                    rate: 2.0 * kf / gamma / mf,
                    jumps: JumpSampler::ParetoTail {
                        gamma: *gamma,
                        p: 0.5,
                        cutoff: 1.0,
                    },
                });
                // density (δ/π)|x|^{-2} between the cutoff and 1, Gaussian
                // substitution below the cutoff (variance-matched)
                if eps < 1.0 {
                    d2.push(SubDriver::Cp {
                        rate: 2.0 * (delta / PI) * (1.0 / eps - 1.0) / mf,
                        jumps: JumpSampler::ParetoBand {
                            gamma: 1.0,
                            p: 0.5,
                            lo: eps,
                            hi: 1.0,
                        },
                    });
                }
                d2.push(SubDriver::Gaussian {
                    b: 2.0 * delta * eps / PI / mf,
                });
            }
            LevyMeasureSpec::GeometricStable { gamma, sigma, rho } => {
                let table = GsLevyTable::build(*gamma, *sigma, *rho)?;
                d1.push(SubDriver::Cp {
                    rate: (table.mass_above(1.0, true) + table.mass_above(1.0, false)) / mf,
                    jumps: JumpSampler::GsTail(Arc::new(table.tail_sampler(1.0))),
                });
                let band_rate =
                    table.mass_above(eps, true) + table.mass_above(eps, false)
                        - table.mass_above(1.0, true)
                        - table.mass_above(1.0, false);
                if band_rate > 0.0 {
                    d2.push(SubDriver::Cp {
                        rate: band_rate / mf,
                        jumps: JumpSampler::Table(Arc::new(gs_band_table(&table, eps))),
                    });
                }
                let v = table.small_ball_variance(eps);
                if v > 0.0 {
                    d2.push(SubDriver::Gaussian { b: v / mf });
                }
                let band_mean = table.small_ball_mean(1.0) - table.small_ball_mean(eps);
                if band_mean != 0.0 {
                    d2.push(SubDriver::Drift { a: -band_mean / mf });
                }
            }
        }

        Ok(Engine {
            pi: quad.pi.clone(),
            m,
            drivers: [d1, d2, d3],
        })
    }

    /// One replication on the configured grid.
    pub fn simulate<R: Rng + ?Sized>(&self, config: &SimConfig, rng: &mut R) -> Result<ComponentPaths> {
        let grid = &config.grid;
        let n = grid.len();
        let xis: Vec<f64> = (0..self.m).map(|_| self.pi.sample(rng)).collect();
        if xis.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::Simulation("drew a non-positive relaxation rate".into()));
        }

        let mut paths: Vec<SamplePath> = Vec::with_capacity(3);
        for drivers in &self.drivers {
            if drivers.is_empty() {
                paths.push(SamplePath::zero(grid));
                continue;
            }
            // per-summand, per-subdriver state
            let mut state: Vec<Vec<f64>> = Vec::with_capacity(self.m);
            for _ in 0..self.m {
                let row: Vec<f64> = match config.burn_in {
                    BurnIn::StationarySeries => drivers.iter().map(|d| d.stationary(rng)).collect(),
                    BurnIn::Time(_) => vec![0.0; drivers.len()],
                };
                state.push(row);
            }
            if let BurnIn::Time(t) = config.burn_in {
                if t > 0.0 {
                    for (k, &xi) in xis.iter().enumerate() {
                        let decay = (-xi * t).exp();
                        for (d, drv) in drivers.iter().enumerate() {
                            let (inc, _) = drv.step(xi, t, rng);
                            state[k][d] = decay * state[k][d] + inc;
                        }
                    }
                }
            }

            let mut book = OuBookkeeping {
                xi: xis.clone(),
                states: Vec::with_capacity(n),
                lcum: Vec::with_capacity(n),
            };
            let summand = |st: &Vec<f64>| -> f64 { st.iter().sum() };
            book.states.push(state.iter().map(summand).collect());
            book.lcum.push(vec![0.0; self.m]);

            for j in 1..n {
                let dt = grid[j] - grid[j - 1];
                let mut lrow = Vec::with_capacity(self.m);
                for (k, &xi) in xis.iter().enumerate() {
                    let decay = (-xi * dt).exp();
                    let mut dl = 0.0;
                    for (d, drv) in drivers.iter().enumerate() {
                        let (inc, l) = drv.step(xi, dt, rng);
                        state[k][d] = decay * state[k][d] + inc;
                        dl += l;
                    }
                    lrow.push(book.lcum[j - 1][k] + dl);
                }
                book.states.push(state.iter().map(summand).collect());
                book.lcum.push(lrow);
            }

            let values: Vec<f64> = book
                .states
                .iter()
                .map(|row| {
                    let mut s = CompensatedSum::default();
                    for v in row {
                        s.add(*v);
                    }
                    s.value()
                })
                .collect();
            let integrated = integrate_path(&book);
            paths.push(SamplePath {
                grid: grid.clone(),
                values,
                integrated,
            });
        }

        let x3 = paths.pop().unwrap();
        let x2 = paths.pop().unwrap();
        let x1 = paths.pop().unwrap();
        Ok(ComponentPaths { x1, x2, x3 })
    }
}

/// Conditional jump-size law given |J| > 1 (Big) or |J| ≤ 1 (Small).
fn conditional_sampler(jumps: &JumpDist, half: JumpHalf) -> Result<JumpSampler> {
    match jumps {
        JumpDist::Pareto { gamma, p, cutoff, .. } => match half {
            JumpHalf::Big => Ok(JumpSampler::ParetoTail {
                gamma: *gamma,
                p: *p,
                cutoff: cutoff.max(1.0),
            }),
            JumpHalf::Small => {
                if *cutoff >= 1.0 {
                    return Err(Error::Simulation("no small-jump mass".into()));
                }
                Ok(JumpSampler::ParetoBand {
                    gamma: *gamma,
                    p: *p,
                    lo: *cutoff,
                    hi: 1.0,
                })
            }
        },
        JumpDist::PointMasses { atoms } => {
            let kept: Vec<(f64, f64)> = atoms
                .iter()
                .filter(|&&(x, _)| match half {
                    JumpHalf::Big => x.abs() > 1.0,
                    JumpHalf::Small => x.abs() <= 1.0,
                })
                .cloned()
                .collect();
            let total: f64 = kept.iter().map(|&(_, w)| w).sum();
            if total <= 0.0 {
                return Err(Error::Simulation("no mass in the requested half".into()));
            }
            Ok(JumpSampler::Atoms(
                kept.into_iter().map(|(x, w)| (x, w / total)).collect(),
            ))
        }
        JumpDist::Uniform { lo, hi } => {
            let mut segs = Vec::new();
            let candidates: Vec<(f64, f64)> = match half {
                JumpHalf::Big => vec![(lo.max(1.0), *hi), (*lo, hi.min(-1.0))],
                JumpHalf::Small => vec![(lo.max(-1.0), hi.min(1.0))],
            };
            let mut total = 0.0;
            for (a, b) in candidates {
                if b > a {
                    total += b - a;
                    segs.push((a, b, b - a));
                }
            }
            if total <= 0.0 {
                return Err(Error::Simulation("no mass in the requested half".into()));
            }
            Ok(JumpSampler::Segments(
                segs.into_iter().map(|(a, b, w)| (a, b, w / total)).collect(),
            ))
        }
    }
}

/// Tabulated band (cutoff < |x| ≤ 1) of a geometric stable Lévy measure.
fn gs_band_table(table: &GsLevyTable, eps: f64) -> tables::CdfTable {
    let n_side = 200;
    let lr = (1.0 / eps).ln();
    let mut xs = Vec::with_capacity(2 * n_side);
    for i in (0..n_side).rev() {
        xs.push(-(eps * (lr * i as f64 / (n_side - 1) as f64).exp()));
    }
    for i in 0..n_side {
        xs.push(eps * (lr * i as f64 / (n_side - 1) as f64).exp());
    }
    let dens: Vec<f64> = xs.iter().map(|&x| table.density(x)).collect();
    tables::CdfTable::from_density(xs, dens)
}

/// Convenience one-shot replication (engine built ad hoc).
pub fn simulate_supou<R: Rng + ?Sized>(
    quad: &CharacteristicQuadruple,
    config: &SimConfig,
    rng: &mut R,
) -> Result<ComponentPaths> {
    Engine::new(quad, config)?.simulate(config, rng)
}

/// Seed for replication r, derived from the master seed.
pub fn replication_seed(master: u64, r: usize) -> u64 {
    splitmix64(master.wrapping_add((r as u64 + 1).wrapping_mul(0x9E3779B97F4A7C15)))
}

/// N independent replications, deterministically seeded and order-stable
/// under any parallel schedule. Per-replication failures are collected, not
/// fatal.
pub fn run_ensemble(quad: &CharacteristicQuadruple, config: &SimConfig) -> Result<PathEnsemble> {
    let engine = Engine::new(quad, config)?;
    let seeds: Vec<u64> = (0..config.replications)
        .map(|r| replication_seed(config.seed, r))
        .collect();
    let results: Vec<Result<ComponentPaths>> = seeds
        .par_iter()
        .map(|&seed| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            engine.simulate(config, &mut rng)
        })
        .collect();
    let mut ensemble = PathEnsemble {
        config: config.clone(),
        replication_ids: Vec::new(),
        replications: Vec::new(),
        seeds,
        failures: Vec::new(),
    };
    for (r, res) in results.into_iter().enumerate() {
        match res {
            Ok(p) => {
                ensemble.replication_ids.push(r);
                ensemble.replications.push(p);
            }
            Err(e) => ensemble.failures.push((r, e.to_string())),
        }
    }
    if ensemble.replications.is_empty() {
        return Err(Error::Simulation(format!(
            "all {} replications failed; first error: {}",
            config.replications,
            ensemble.failures.first().map(|(_, e)| e.as_str()).unwrap_or("none")
        )));
    }
    Ok(ensemble)
}

/// CSV export: header `replication,component,t,x,xstar`, rows ordered by
/// (replication, component, t).
pub fn write_paths_csv<W: std::io::Write>(ensemble: &PathEnsemble, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["replication", "component", "t", "x", "xstar"])?;
    for (idx, paths) in ensemble.replication_ids.iter().zip(&ensemble.replications) {
        for (name, path) in [("x1", &paths.x1), ("x2", &paths.x2), ("x3", &paths.x3)] {
            for j in 0..path.grid.len() {
                w.write_record([
                    idx.to_string(),
                    name.to_string(),
                    format!("{}", path.grid[j]),
                    format!("{}", path.values[j]),
                    format!("{}", path.integrated[j]),
                ])?;
            }
        }
    }
    w.flush().map_err(|e| Error::Simulation(e.to_string()))?;
    Ok(())
}
