//! Fingerprint and container procedures.

mod book;
mod certificate;
mod iterated;
mod regular;
mod robust;

pub use book::PairBook;
pub use certificate::ContainerCertificate;
pub use iterated::{iterated_container, iterated_target, iteration_bound, IteratedContainerResult, IteratedContainerState};
pub use regular::{
    phase1_strip, regular_container, regular_target, Phase1Mode, Phase1Result, RegularCase, RegularContainerResult,
    RegularParams, RegularThresholds, DEFAULT_PHASE1_CAP,
};
pub use robust::{robust_pair_container, RobustCase, RobustContainerResult, RobustThresholds};
