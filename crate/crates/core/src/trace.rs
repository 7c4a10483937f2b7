use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One unit of information an optimizer extracts from its evaluations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum EventKind {
    /// A fresh value compared with the minimum of `history` earlier values.
    CompareWithBest { history: u64 },
    /// Unordered index set of the best `mu` out of `lambda`.
    TopMuOfLambda { lambda: u64, mu: u64 },
    /// Ordered indices of the best `mu` out of `lambda`.
    RankedTopMuOfLambda { lambda: u64, mu: u64 },
    /// Best of a particle and its two ring neighbours.
    RingBestOfThree,
    /// Index of the best particle in a swarm of `swarm`.
    GlobalBestOfSwarm { swarm: u64 },
    /// Membership of the best `ceil(p * size)` individuals.
    PbestMembership { p: f64, size: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionEvent {
    pub kind: EventKind,
    pub generation: u64,
}

impl DecisionEvent {
    pub fn new(kind: EventKind, generation: u64) -> Self {
        Self { kind, generation }
    }

    pub fn validate(&self) -> Result<()> {
        self.kind.validate()
    }
}

impl EventKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            EventKind::CompareWithBest { history: 0 } => {
                Err(Error::domain("CompareWithBest needs a history of at least 1"))
            }
            EventKind::TopMuOfLambda { lambda, mu } | EventKind::RankedTopMuOfLambda { lambda, mu }
                if mu == 0 || mu > lambda =>
            {
                Err(Error::domain(format!("need 1 <= mu <= lambda, got mu={mu}, lambda={lambda}")))
            }
            EventKind::GlobalBestOfSwarm { swarm: 0 } => {
                Err(Error::domain("swarm size must be positive"))
            }
            EventKind::PbestMembership { p, size } if !(p > 0.0 && p <= 1.0) || size == 0 => {
                Err(Error::domain(format!("need 0 < p <= 1 and size >= 1, got p={p}, size={size}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventKind::CompareWithBest { history } => write!(f, "CompareWithBest({history})"),
            EventKind::TopMuOfLambda { lambda, mu } => write!(f, "TopMuOfLambda({lambda},{mu})"),
            EventKind::RankedTopMuOfLambda { lambda, mu } => {
                write!(f, "RankedTopMuOfLambda({lambda},{mu})")
            }
            EventKind::RingBestOfThree => write!(f, "RingBestOfThree()"),
            EventKind::GlobalBestOfSwarm { swarm } => write!(f, "GlobalBestOfSwarm({swarm})"),
            EventKind::PbestMembership { p, size } => write!(f, "PbestMembership({p},{size})"),
        }
    }
}

impl FromStr for EventKind {
    type Err = Error;

    fn from_str(token: &str) -> Result<Self> {
        let bad = || Error::Data(format!("malformed event token `{token}`"));
        let open = token.find('(').ok_or_else(bad)?;
        let inner = token[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let args: Vec<&str> = if inner.is_empty() {
            Vec::new()
        } else {
            inner.split(',').collect()
        };
        let int = |i: usize| -> Result<u64> {
            args.get(i).ok_or_else(bad)?.trim().parse().map_err(|_| bad())
        };
        let kind = match (&token[..open], args.len()) {
            ("CompareWithBest", 1) => EventKind::CompareWithBest { history: int(0)? },
            ("TopMuOfLambda", 2) => EventKind::TopMuOfLambda { lambda: int(0)?, mu: int(1)? },
            ("RankedTopMuOfLambda", 2) => EventKind::RankedTopMuOfLambda {
                lambda: int(0)?,
                mu: int(1)?,
            },
            ("RingBestOfThree", 0) => EventKind::RingBestOfThree,
            ("GlobalBestOfSwarm", 1) => EventKind::GlobalBestOfSwarm { swarm: int(0)? },
            ("PbestMembership", 2) => EventKind::PbestMembership {
                p: args[0].trim().parse().map_err(|_| bad())?,
                size: int(1)?,
            },
            _ => return Err(bad()),
        };
        Ok(kind)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: u64,
    pub evals: u64,
    pub best_error: f64,
    pub events: Vec<DecisionEvent>,
}

/// Per-generation history of one seeded run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub algorithm_id: String,
    pub problem: String,
    pub seed: u64,
    pub budget: u64,
    pub records: Vec<GenerationRecord>,
}

pub const TRACE_CSV_HEADER: &str = "generation,evals,best_error,events";

impl RunTrace {
    pub fn new(algorithm_id: impl Into<String>, problem: impl Into<String>, seed: u64, budget: u64) -> Self {
        Self {
            algorithm_id: algorithm_id.into(),
            problem: problem.into(),
            seed,
            budget,
            records: Vec::new(),
        }
    }

    /// Appends the next generation. The stored best error is the running minimum.
    pub fn record_generation(&mut self, best_error: f64, evals: u64, events: Vec<DecisionEvent>) -> Result<()> {
        if evals > self.budget {
            return Err(Error::Budget {
                used: evals,
                budget: self.budget,
            });
        }
        let previous = self.records.last();
        if let Some(prev) = previous {
            if evals < prev.evals {
                return Err(Error::Data(format!(
                    "cumulative evaluations went backwards: {} after {}",
                    evals, prev.evals
                )));
            }
        }
        let best_error = match previous {
            Some(prev) if prev.best_error <= best_error => prev.best_error,
            _ => best_error,
        };
        self.records.push(GenerationRecord {
            generation: self.records.len() as u64 + 1,
            evals,
            best_error,
            events,
        });
        Ok(())
    }

    pub fn generations(&self) -> usize {
        self.records.len()
    }

    pub fn evals(&self) -> u64 {
        self.records.last().map_or(0, |r| r.evals)
    }

    pub fn final_error(&self) -> Option<f64> {
        self.records.last().map(|r| r.best_error)
    }

    /// All events in generation order.
    pub fn events(&self) -> Vec<DecisionEvent> {
        self.records.iter().flat_map(|r| r.events.iter().copied()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(TRACE_CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let events = r
                .events
                .iter()
                .map(|e| e.kind.to_string())
                .collect::<Vec<_>>()
                .join(";");
            let _ = writeln!(out, "{},{},{:e},{}", r.generation, r.evals, r.best_error, events);
        }
        out
    }

    /// Rebuilds the records of a trace from its CSV form. Metadata is supplied by the caller.
    pub fn records_from_csv(text: &str) -> Result<Vec<GenerationRecord>> {
        let mut lines = text.lines();
        if lines.next() != Some(TRACE_CSV_HEADER) {
            return Err(Error::Data("missing trace header".into()));
        }
        lines
            .filter(|l| !l.is_empty())
            .map(|line| {
                let mut cols = line.splitn(4, ',');
                let mut next = |what: &str| {
                    cols.next()
                        .ok_or_else(|| Error::Data(format!("missing {what} in `{line}`")))
                };
                let generation: u64 = next("generation")?
                    .parse()
                    .map_err(|_| Error::Data(format!("bad generation in `{line}`")))?;
                let evals = next("evals")?
                    .parse()
                    .map_err(|_| Error::Data(format!("bad evals in `{line}`")))?;
                let best_error = next("best_error")?
                    .parse()
                    .map_err(|_| Error::Data(format!("bad best_error in `{line}`")))?;
                let events = next("events")?;
                let events = if events.is_empty() {
                    Vec::new()
                } else {
                    events
                        .split(';')
                        .map(|t| Ok(DecisionEvent::new(t.parse()?, generation)))
                        .collect::<Result<_>>()?
                };
                Ok(GenerationRecord {
                    generation,
                    evals,
                    best_error,
                    events,
                })
            })
            .collect()
    }
}
