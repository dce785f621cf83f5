//! Fidelities, dressed states and two-qubit state tomography.

pub mod density;
pub mod dressed;
pub mod ensemble;
pub mod fidelity;
pub mod haar;
pub mod reconstruction;
pub mod tomography;

pub use density::{hermitian_sqrt, CMatrix, DensityMatrix};
pub use dressed::{dress, DressedState, DRESSING_SCALE};
pub use ensemble::{
    calibrate_jitter, fidelity_histogram, Ensemble, FidelityEnsemble, FidelityExperiment, STATE_SYNTHESIS_JITTER,
};
pub use fidelity::{fidelity_mixed, fidelity_pure};
pub use haar::{haar_gate, haar_unitary, random_state};
pub use reconstruction::{log_likelihood, qst_linear_inversion, qst_mle, MleOptions, MleResult};
pub use tomography::{
    collect_tomo_data, exact_tomo_data, exact_tomo_data_mixed, pauli_hs_basis, pauli_matrix, BornComparator,
    DetectionStrategy, DressedSource, MaximallyMixedSource, PauliAxis, PureSource, StateSource, TomoDataset,
    TomoRecord, TomoSetting,
};
