//! `manifest.json`: the full request plus everything it resolved to.
//!
//! The `request` block alone is enough to reproduce a run; the other fields
//! are an echo for readers.

use std::path::Path;

use serde::{Deserialize, Serialize};

use iurlab::algorithms::ResolvedConfig;
use iurlab::experiments::{ExperimentPlan, LabeledConfig};
use iurlab::Result;

pub const FILE_NAME: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case", deny_unknown_fields)]
pub enum Request {
    Bench {
        plan: ExperimentPlan,
        config: LabeledConfig,
        traces: bool,
    },
    Sweep {
        plan: ExperimentPlan,
        lambda: usize,
        mus: Vec<usize>,
    },
    Compare {
        plan: ExperimentPlan,
        configs: Vec<LabeledConfig>,
        pairs: Vec<(String, String)>,
    },
}

impl Request {
    pub fn plan(&self) -> &ExperimentPlan {
        match self {
            Request::Bench { plan, .. } | Request::Sweep { plan, .. } | Request::Compare { plan, .. } => plan,
        }
    }

    pub fn plan_mut(&mut self) -> &mut ExperimentPlan {
        match self {
            Request::Bench { plan, .. } | Request::Sweep { plan, .. } | Request::Compare { plan, .. } => plan,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Request::Bench { .. } => "bench",
            Request::Sweep { .. } => "sweep",
            Request::Compare { .. } => "compare",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedEntry {
    pub label: String,
    pub config: ResolvedConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub request: Request,
    pub budget: u64,
    pub seeds: Vec<u64>,
    pub resolved: Vec<ResolvedEntry>,
    /// Artifact file names, relative to the manifest.
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(request: Request, resolved: Vec<ResolvedEntry>, outputs: Vec<String>) -> Self {
        let plan = request.plan();
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            budget: plan.budget(),
            seeds: (0..plan.runs).map(|r| plan.seed(r)).collect(),
            request,
            resolved,
            outputs,
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::write(dir.join(FILE_NAME), serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use iurlab::algorithms::AlgorithmId;

    #[test]
    fn request_round_trips_through_json() {
        let request = Request::Compare {
            plan: ExperimentPlan::default(),
            configs: vec![LabeledConfig::algorithm(AlgorithmId::Lj), LabeledConfig::algorithm(AlgorithmId::Mc)],
            pairs: vec![("lj".into(), "mc".into())],
        };
        let manifest = Manifest::new(request.clone(), Vec::new(), Vec::new());
        let back: Manifest = serde_json::from_str(&serde_json::to_string(&manifest).unwrap()).unwrap();
        assert_eq!(back.request, request);
        assert_eq!(back.seeds.len(), 20);
        assert_eq!(back.budget, 20_000);
    }

    #[test]
    fn unknown_request_fields_are_rejected() {
        let text = r#"{"command":"sweep","plan":null,"lambda":10,"mus":[1],"extra":1}"#;
        assert!(serde_json::from_str::<Request>(text).is_err());
    }
}
