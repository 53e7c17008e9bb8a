//! Eigenvalues of `A_Φ` from the root system of `Q = z^N(Φ − λ)`.

mod eigenfunction;
mod observation;
mod scan;
mod system;

pub use eigenfunction::{construct_eigenfunction, eigenfunction_value, factorization_defect, Eigenpair};
pub use observation::{verify_observation, ObservationResiduals};
pub use scan::{
    scan_eigenvalues, ExcludedCell, GridSample, Region, RejectedCandidate, ScanOptions, ScanReport, SeedFailure,
};
pub use system::{assemble, build_criterion, CriterionSystem};
