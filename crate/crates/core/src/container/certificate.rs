use serde::{Deserialize, Serialize};

use super::iterated::IteratedContainerResult;
use super::regular::{Phase1Mode, RegularContainerResult};
use super::robust::RobustContainerResult;

/// The serialized outcome of a container procedure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainerCertificate {
    #[serde(rename = "F")]
    pub f: Vec<u64>,
    #[serde(rename = "Q")]
    pub q: Vec<u64>,
    pub case: String,
    pub iterations: usize,
    pub guarantees_applicable: bool,
    pub trace: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub phase1_mode: Option<Phase1Mode>,
    #[serde(rename = "F0", skip_serializing_if = "Option::is_none", default)]
    pub f0: Option<Vec<u64>>,
}

impl ContainerCertificate {
    pub fn from_robust(r: &RobustContainerResult, robust_verified: bool) -> Self {
        ContainerCertificate {
            f: r.f.to_vec(),
            q: r.q.to_vec(),
            case: r.case.tag().to_string(),
            iterations: 1,
            guarantees_applicable: robust_verified && r.size_condition && r.supply_condition,
            trace: r.trace.clone(),
            phase1_mode: None,
            f0: None,
        }
    }

    pub fn from_iterated(r: &IteratedContainerResult) -> Self {
        let case = r.states.last().map(|s| s.case.tag()).unwrap_or("NoIteration").to_string();
        ContainerCertificate {
            f: r.f.to_vec(),
            q: r.q.to_vec(),
            case,
            iterations: r.iterations,
            guarantees_applicable: r.guarantees_applicable,
            trace: r.trace.clone(),
            phase1_mode: None,
            f0: None,
        }
    }

    pub fn from_regular(r: &RegularContainerResult) -> Self {
        ContainerCertificate {
            f: r.f.to_vec(),
            q: r.q.to_vec(),
            case: r.case.tag().to_string(),
            iterations: r.phase1_rounds,
            guarantees_applicable: r.guarantees_applicable,
            trace: r.trace.clone(),
            phase1_mode: Some(r.phase1_mode),
            f0: Some(r.f0.to_vec()),
        }
    }
}
