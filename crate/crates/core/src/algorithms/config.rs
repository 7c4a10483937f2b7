use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iur::DeVariant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlgorithmId {
    #[serde(rename = "MC", alias = "mc")]
    Mc,
    #[serde(rename = "LJ", alias = "lj")]
    Lj,
    #[serde(rename = "ES", alias = "es")]
    Es,
    #[serde(rename = "CMAES", alias = "cmaes")]
    Cmaes,
    #[serde(rename = "PSO", alias = "pso")]
    Pso,
    #[serde(rename = "SPSO", alias = "spso")]
    Spso,
    #[serde(rename = "DE", alias = "de")]
    De,
    #[serde(rename = "JADE", alias = "jade")]
    Jade,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 8] = [
        AlgorithmId::Mc,
        AlgorithmId::Lj,
        AlgorithmId::Es,
        AlgorithmId::Cmaes,
        AlgorithmId::Pso,
        AlgorithmId::Spso,
        AlgorithmId::De,
        AlgorithmId::Jade,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmId::Mc => "mc",
            AlgorithmId::Lj => "lj",
            AlgorithmId::Es => "es",
            AlgorithmId::Cmaes => "cmaes",
            AlgorithmId::Pso => "pso",
            AlgorithmId::Spso => "spso",
            AlgorithmId::De => "de",
            AlgorithmId::Jade => "jade",
        }
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        AlgorithmId::ALL
            .into_iter()
            .find(|a| a.as_str() == lower || (lower == "cma-es" && *a == AlgorithmId::Cmaes))
            .ok_or_else(|| Error::Config(format!("unknown algorithm `{s}`")))
    }
}

/// User-facing configuration. Unset fields take per-algorithm defaults.
///
/// JSON example: `{"algorithm": "ES", "lambda": 30, "mu": 15}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub algorithm: AlgorithmId,
    /// Offspring per generation (ES, CMA-ES). ES default 30; CMA-ES default `4 + floor(3 ln d)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<usize>,
    /// Parents (ES, CMA-ES). Default `lambda / 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<usize>,
    /// Swarm or population size (PSO, SPSO, DE, JADE). Default 40.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    /// LJ radius contraction on a failed comparison. Default 0.99.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// ES log-normal step-size learning rate. Default 0.5.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_sigma: Option<f64>,
    /// Cognitive coefficient. Default 2.05.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi1: Option<f64>,
    /// Social coefficient. Default 2.05.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi2: Option<f64>,
    /// DE scale factor. Default 0.5.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<f64>,
    /// DE crossover rate. Default 0.9.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cr: Option<f64>,
    /// JADE greedy fraction. Default 0.05.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// JADE adaptation rate. Default 0.1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// DE mutation strategy. Default `rand/1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub de_variant: Option<DeVariant>,
    /// Initial step size (ES, CMA-ES). Default a quarter of the mean box width.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_sigma: Option<f64>,
}

/// Configuration with every default filled in for a given dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub algorithm: AlgorithmId,
    pub dimension: usize,
    pub lambda: usize,
    pub mu: usize,
    pub s: usize,
    pub gamma: f64,
    pub delta_sigma: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub f: f64,
    pub cr: f64,
    pub p: f64,
    pub c: f64,
    pub de_variant: DeVariant,
    /// `None` means a quarter of the mean box width.
    pub initial_sigma: Option<f64>,
}

pub const DEFAULT_POPULATION: usize = 40;
pub const DEFAULT_ES_LAMBDA: usize = 30;

impl OptimizerConfig {
    pub fn new(algorithm: AlgorithmId) -> Self {
        Self {
            algorithm,
            lambda: None,
            mu: None,
            s: None,
            gamma: None,
            delta_sigma: None,
            phi1: None,
            phi2: None,
            f: None,
            cr: None,
            p: None,
            c: None,
            de_variant: None,
            initial_sigma: None,
        }
    }

    pub fn es(lambda: usize, mu: usize) -> Self {
        Self {
            lambda: Some(lambda),
            mu: Some(mu),
            ..Self::new(AlgorithmId::Es)
        }
    }

    pub fn de(variant: DeVariant) -> Self {
        Self {
            de_variant: Some(variant),
            ..Self::new(AlgorithmId::De)
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Fills defaults for a `dimension`-dimensional problem and validates.
    pub fn resolve(&self, dimension: usize) -> Result<ResolvedConfig> {
        if dimension == 0 {
            return Err(Error::Config("dimension must be positive".into()));
        }
        let default_lambda = match self.algorithm {
            AlgorithmId::Cmaes => 4 + (3.0 * (dimension as f64).ln()).floor() as usize,
            _ => DEFAULT_ES_LAMBDA,
        };
        let lambda = self.lambda.unwrap_or(default_lambda);
        let resolved = ResolvedConfig {
            algorithm: self.algorithm,
            dimension,
            lambda,
            mu: self.mu.unwrap_or((lambda / 2).max(1)),
            s: self.s.unwrap_or(DEFAULT_POPULATION),
            gamma: self.gamma.unwrap_or(0.99),
            delta_sigma: self.delta_sigma.unwrap_or(0.5),
            phi1: self.phi1.unwrap_or(2.05),
            phi2: self.phi2.unwrap_or(2.05),
            f: self.f.unwrap_or(0.5),
            cr: self.cr.unwrap_or(0.9),
            p: self.p.unwrap_or(0.05),
            c: self.c.unwrap_or(0.1),
            de_variant: self.de_variant.unwrap_or(DeVariant::Rand1),
            initial_sigma: self.initial_sigma,
        };
        resolved.validate()?;
        Ok(resolved)
    }
}

fn bad(message: String) -> Error {
    Error::config(message)
}

impl ResolvedConfig {
    pub fn validate(&self) -> Result<()> {
        use AlgorithmId::*;
        let alg = self.algorithm;
        if matches!(alg, Es | Cmaes) {
            if self.mu == 0 || self.mu > self.lambda {
                return Err(bad(format!("need 1 <= mu <= lambda, got mu={}, lambda={}", self.mu, self.lambda)));
            }
            if alg == Cmaes && self.lambda < 2 {
                return Err(bad("CMA-ES needs lambda >= 2".into()));
            }
            if let Some(sigma) = self.initial_sigma {
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(bad(format!("initial_sigma must be positive, got {sigma}")));
                }
            }
        }
        if alg == Es && !(self.delta_sigma >= 0.0 && self.delta_sigma.is_finite()) {
            return Err(bad(format!("delta_sigma must be >= 0, got {}", self.delta_sigma)));
        }
        if alg == Lj && !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(bad(format!("need 0 < gamma < 1, got {}", self.gamma)));
        }
        if matches!(alg, Pso | Spso) {
            if !(self.phi1 >= 0.0 && self.phi2 >= 0.0) {
                return Err(bad("phi1 and phi2 must be >= 0".into()));
            }
            if alg == Spso && !(self.phi1 + self.phi2 > 4.0) {
                return Err(bad(format!(
                    "constriction needs phi1 + phi2 > 4, got {}",
                    self.phi1 + self.phi2
                )));
            }
        }
        if matches!(alg, De | Jade) {
            if !(self.f > 0.0 && self.f.is_finite()) {
                return Err(bad(format!("F must be positive, got {}", self.f)));
            }
            if !(0.0..=1.0).contains(&self.cr) {
                return Err(bad(format!("need 0 <= CR <= 1, got {}", self.cr)));
            }
        }
        if alg == Jade {
            if !(self.p > 0.0 && self.p <= 1.0) {
                return Err(bad(format!("need 0 < p <= 1, got {}", self.p)));
            }
            if !(self.c > 0.0 && self.c <= 1.0) {
                return Err(bad(format!("need 0 < c <= 1, got {}", self.c)));
            }
        }
        let min_population = match alg {
            Pso => 1,
            Spso | Jade => 3,
            De => match self.de_variant {
                DeVariant::Rand1 => 4,
                DeVariant::Rand2 => 6,
                DeVariant::Best1 | DeVariant::CurrentToBest1 => 3,
                DeVariant::Best2 => 5,
            },
            _ => 0,
        };
        if self.s < min_population {
            return Err(bad(format!("{alg} needs s >= {min_population}, got {}", self.s)));
        }
        Ok(())
    }

    /// Evaluations per generation.
    pub fn batch_size(&self) -> usize {
        match self.algorithm {
            AlgorithmId::Mc | AlgorithmId::Lj => 1,
            AlgorithmId::Es | AlgorithmId::Cmaes => self.lambda,
            _ => self.s,
        }
    }

    pub fn sigma0(&self, mean_width: f64) -> f64 {
        self.initial_sigma.unwrap_or(mean_width / 4.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_defaults_fill_in() {
        let c = OptimizerConfig::from_json(r#"{"algorithm":"CMAES"}"#).unwrap();
        let r = c.resolve(5).unwrap();
        assert_eq!((r.lambda, r.mu), (8, 4));
        assert_eq!(r.batch_size(), 8);
        let r = OptimizerConfig::from_json(r#"{"algorithm":"es"}"#).unwrap().resolve(5).unwrap();
        assert_eq!((r.lambda, r.mu, r.delta_sigma), (30, 15, 0.5));
        let r = OptimizerConfig::new(AlgorithmId::Jade).resolve(5).unwrap();
        assert_eq!((r.s, r.p, r.c), (40, 0.05, 0.1));
        let c = OptimizerConfig::from_json(r#"{"algorithm":"DE","de_variant":"best/2","f":0.7}"#).unwrap();
        assert_eq!(c.de_variant, Some(DeVariant::Best2));
        assert_eq!(OptimizerConfig::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(OptimizerConfig::from_json(r#"{"algorithm":"ES","typo":1}"#).is_err());
        assert!(OptimizerConfig::from_json(r#"{"algorithm":"XX"}"#).is_err());
        assert!(OptimizerConfig::es(10, 11).resolve(5).is_err());
        assert!(OptimizerConfig::es(10, 0).resolve(5).is_err());
        let mut c = OptimizerConfig::new(AlgorithmId::Lj);
        c.gamma = Some(1.0);
        assert!(c.resolve(5).is_err());
        let mut c = OptimizerConfig::new(AlgorithmId::Jade);
        c.p = Some(0.0);
        assert!(c.resolve(5).is_err());
        let mut c = OptimizerConfig::de(DeVariant::Rand2);
        c.s = Some(5);
        assert!(c.resolve(5).is_err());
        c.cr = Some(1.5);
        c.s = Some(10);
        assert!(c.resolve(5).is_err());
        let mut c = OptimizerConfig::new(AlgorithmId::De);
        c.f = Some(0.0);
        assert!(c.resolve(5).is_err());
    }

    #[test]
    fn ids_parse_case_insensitively() {
        for a in AlgorithmId::ALL {
            assert_eq!(a.as_str().parse::<AlgorithmId>().unwrap(), a);
            assert_eq!(a.as_str().to_uppercase().parse::<AlgorithmId>().unwrap(), a);
        }
        assert!("foo".parse::<AlgorithmId>().is_err());
    }
}
