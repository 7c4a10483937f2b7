//! Closed-form information utilization ratios and the event ledger.
//!
//! Every formula is `numerator / denominator` with the denominator equal to
//! total evaluations times the codomain entropy `H`. For algorithms where only
//! bounds are known (PSO, SPSO, DE best-type variants, JADE) `ratio` is the
//! lower bound and `ratio_upper` the upper bound.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::entropy::{log2_binomial, log2_falling_factorial, pi, pi_sum};
use crate::error::{Error, Result};
use crate::trace::{DecisionEvent, EventKind};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IurReport {
    pub algorithm: String,
    pub g: Option<u64>,
    pub lambda: Option<u64>,
    pub mu: Option<u64>,
    pub s: Option<u64>,
    pub p: Option<f64>,
    #[serde(rename = "H_bits")]
    pub h_bits: f64,
    pub numerator_bits: f64,
    pub denominator_bits: f64,
    pub ratio: f64,
    pub ratio_upper: f64,
    pub exact: bool,
}

impl IurReport {
    fn new(algorithm: &str, h_bits: f64, numerator: f64, numerator_upper: f64, denominator: f64) -> Self {
        Self {
            algorithm: algorithm.to_string(),
            g: None,
            lambda: None,
            mu: None,
            s: None,
            p: None,
            h_bits,
            numerator_bits: numerator,
            denominator_bits: denominator,
            ratio: numerator / denominator,
            ratio_upper: numerator_upper / denominator,
            exact: numerator == numerator_upper,
        }
    }

    fn exact(algorithm: &str, h_bits: f64, numerator: f64, denominator: f64) -> Self {
        Self::new(algorithm, h_bits, numerator, numerator, denominator)
    }

    fn interval(algorithm: &str, h_bits: f64, lower: f64, upper: f64, denominator: f64) -> Self {
        let mut r = Self::new(algorithm, h_bits, lower, upper, denominator);
        r.exact = false;
        r
    }

    fn g(mut self, g: u64) -> Self {
        self.g = Some(g);
        self
    }

    fn lambda_mu(mut self, lambda: u64, mu: u64) -> Self {
        self.lambda = Some(lambda);
        self.mu = Some(mu);
        self
    }

    fn swarm(mut self, s: u64) -> Self {
        self.s = Some(s);
        self
    }
}

fn check_h(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("codomain entropy must be positive, got {h}")))
    }
}

fn check_g(g: u64) -> Result<()> {
    if g == 0 {
        Err(Error::domain("g must be at least 1"))
    } else {
        Ok(())
    }
}

fn check_s(s: u64) -> Result<()> {
    if s == 0 {
        Err(Error::domain("swarm size must be at least 1"))
    } else {
        Ok(())
    }
}

/// Monte Carlo uses no information; `g` evaluations only set the denominator.
pub fn iur_mc(g: u64, h: f64) -> Result<IurReport> {
    check_g(g)?;
    check_h(h)?;
    Ok(IurReport::exact("mc", h, 0.0, g as f64 * h).g(g))
}

pub fn iur_lj(g: u64, h: f64) -> Result<IurReport> {
    check_g(g)?;
    check_h(h)?;
    Ok(IurReport::exact("lj", h, pi_sum(g - 1), g as f64 * h).g(g))
}

fn check_lambda_mu(lambda: u64, mu: u64) -> Result<()> {
    if lambda == 0 || mu > lambda {
        Err(Error::domain(format!("need 0 <= mu <= lambda and lambda >= 1, got mu={mu}, lambda={lambda}")))
    } else {
        Ok(())
    }
}

pub fn iur_es(g: u64, lambda: u64, mu: u64, h: f64) -> Result<IurReport> {
    check_g(g)?;
    check_h(h)?;
    check_lambda_mu(lambda, mu)?;
    let numerator = (g - 1) as f64 * log2_binomial(lambda, mu)?;
    let denominator = (g * lambda) as f64 * h;
    Ok(IurReport::exact("es", h, numerator, denominator).g(g).lambda_mu(lambda, mu))
}

pub fn iur_cmaes(g: u64, lambda: u64, mu: u64, h: f64) -> Result<IurReport> {
    check_g(g)?;
    check_h(h)?;
    check_lambda_mu(lambda, mu)?;
    let numerator = (g - 1) as f64 * log2_falling_factorial(lambda, mu)?;
    let denominator = (g * lambda) as f64 * h;
    Ok(IurReport::exact("cmaes", h, numerator, denominator).g(g).lambda_mu(lambda, mu))
}

/// Shared lower bound of the swarm/population family: `s * sum_{i<g} pi(i)`.
fn population_lower(g: u64, s: u64) -> f64 {
    s as f64 * pi_sum(g - 1)
}

pub fn iur_pso_bounds(g: u64, s: u64, h: f64) -> Result<IurReport> {
    check_g(g)?;
    check_h(h)?;
    check_s(s)?;
    let lower = population_lower(g, s);
    let upper = lower + (g - 1) as f64 * (s as f64).log2();
    Ok(IurReport::interval("pso", h, lower, upper, (s * g) as f64 * h).g(g).swarm(s))
}

pub fn iur_spso_bounds(g: u64, s: u64, h: f64) -> Result<IurReport> {
    check_g(g)?;
    check_h(h)?;
    check_s(s)?;
    let lower = population_lower(g, s);
    let upper = lower + (s * (g - 1)) as f64 * 3f64.log2();
    Ok(IurReport::interval("spso", h, lower, upper, (s * g) as f64 * h).g(g).swarm(s))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum DeVariant {
    #[default]
    #[serde(rename = "rand/1")]
    Rand1,
    #[serde(rename = "rand/2")]
    Rand2,
    #[serde(rename = "best/1")]
    Best1,
    #[serde(rename = "best/2")]
    Best2,
    #[serde(rename = "current-to-best/1")]
    CurrentToBest1,
}

impl DeVariant {
    pub const ALL: [DeVariant; 5] = [
        DeVariant::Rand1,
        DeVariant::Rand2,
        DeVariant::Best1,
        DeVariant::Best2,
        DeVariant::CurrentToBest1,
    ];

    /// Whether the mutation base or direction depends on the population best.
    pub fn uses_best(self) -> bool {
        matches!(self, DeVariant::Best1 | DeVariant::Best2 | DeVariant::CurrentToBest1)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DeVariant::Rand1 => "rand/1",
            DeVariant::Rand2 => "rand/2",
            DeVariant::Best1 => "best/1",
            DeVariant::Best2 => "best/2",
            DeVariant::CurrentToBest1 => "current-to-best/1",
        }
    }
}

impl fmt::Display for DeVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DeVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DeVariant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::domain(format!("unknown DE variant `{s}`")))
    }
}

pub fn iur_de(g: u64, s: u64, h: f64, variant: DeVariant) -> Result<IurReport> {
    if variant.uses_best() {
        let mut r = iur_pso_bounds(g, s, h)?;
        r.algorithm = format!("de/{variant}");
        return Ok(r);
    }
    check_g(g)?;
    check_h(h)?;
    check_s(s)?;
    let numerator = population_lower(g, s);
    Ok(IurReport::exact(&format!("de/{variant}"), h, numerator, (s * g) as f64 * h).g(g).swarm(s))
}

/// Size of JADE's elite set: `ceil(p * s)`.
pub fn pbest_count(p: f64, s: u64) -> u64 {
    ((p * s as f64).ceil() as u64).clamp(1, s)
}

pub fn iur_jade_bounds(g: u64, s: u64, p: f64, h: f64) -> Result<IurReport> {
    check_g(g)?;
    check_h(h)?;
    check_s(s)?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::domain(format!("need 0 < p <= 1, got {p}")));
    }
    let lower = population_lower(g, s);
    let upper = lower + (g - 1) as f64 * log2_binomial(s, pbest_count(p, s))?;
    let mut r = IurReport::interval("jade", h, lower, upper, (s * g) as f64 * h).g(g).swarm(s);
    r.p = Some(p);
    Ok(r)
}

/// Upper bound `log2(m) / H` for any comparison-based algorithm using `m` evaluations.
pub fn comparison_upper_bound(m: u64, h: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("m must be at least 1"));
    }
    check_h(h)?;
    Ok((m as f64).log2() / h)
}

/// Bits attributed to an event, and whether the price is exact or an upper bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Price {
    pub bits: f64,
    pub exact: bool,
}

pub fn price_event(event: &DecisionEvent) -> Result<Price> {
    event.validate()?;
    let price = match event.kind {
        EventKind::CompareWithBest { history } => Price {
            bits: pi(history)?,
            exact: true,
        },
        EventKind::TopMuOfLambda { lambda, mu } => Price {
            bits: log2_binomial(lambda, mu)?,
            exact: true,
        },
        EventKind::RankedTopMuOfLambda { lambda, mu } => Price {
            bits: log2_falling_factorial(lambda, mu)?,
            exact: true,
        },
        EventKind::RingBestOfThree => Price {
            bits: 3f64.log2(),
            exact: false,
        },
        EventKind::GlobalBestOfSwarm { swarm } => Price {
            bits: (swarm as f64).log2(),
            exact: false,
        },
        EventKind::PbestMembership { p, size } => Price {
            bits: log2_binomial(size, pbest_count(p, size))?,
            exact: false,
        },
    };
    Ok(price)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LedgerEntry {
    pub event: DecisionEvent,
    pub bits: f64,
    pub exact: bool,
}

pub fn ledger_entries(events: &[DecisionEvent]) -> Result<Vec<LedgerEntry>> {
    events
        .iter()
        .map(|e| {
            let price = price_event(e)?;
            Ok(LedgerEntry {
                event: *e,
                bits: price.bits,
                exact: price.exact,
            })
        })
        .collect()
}

/// Prices a stream of events against `total_evals * h` acquired bits.
///
/// Upper-bound prices contribute to `ratio_upper` only, so the report is an
/// interval whenever any such event is present.
pub fn ledger_total(events: &[DecisionEvent], total_evals: u64, h: f64) -> Result<IurReport> {
    if total_evals == 0 {
        return Err(Error::domain("ledger needs at least one evaluation"));
    }
    check_h(h)?;
    let mut lower = 0.0;
    let mut upper = 0.0;
    for entry in ledger_entries(events)? {
        upper += entry.bits;
        if entry.exact {
            lower += entry.bits;
        }
    }
    let denominator = total_evals as f64 * h;
    let mut report = IurReport::new("ledger", h, lower, upper, denominator);
    report.exact = lower == upper;
    Ok(report)
}
