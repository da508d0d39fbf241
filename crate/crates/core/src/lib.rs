//! Quantum Fisher information and detection-scheme phase sensitivities of a
//! Mach–Zehnder interferometer fed by a spin-coherent state and vacuum.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! `*F64` / `*F32` aliases below fix the scalar.

pub mod detection;
pub mod error;
pub mod fock;
pub mod interferometer;
pub mod qfi;
pub mod scalar;
pub mod states;

pub use detection::{
    optimize_phase, sensitivity, sensitivity_oracle, Observable, PhaseOptimum, Scheme, Sensitivity,
    SensitivityPoint,
};
pub use error::{Error, Result};
pub use fock::{FockState, TwoModeState};
pub use interferometer::{apply_bs, apply_phase, propagate, BeamSplitter, PhaseConfig, Scenario};
pub use qfi::{qfi_report_su2, qfim_su2, QfiReport, Qfim};
pub use scalar::Real;
pub use states::{input_moments, su2_coherent, InputMoments, Su2CoherentParams};

pub type FockStateF64 = FockState<f64>;
pub type TwoModeStateF64 = TwoModeState<f64>;
pub type Su2CoherentParamsF64 = Su2CoherentParams<f64>;
pub type InputMomentsF64 = InputMoments<f64>;
pub type BeamSplitterF64 = BeamSplitter<f64>;
pub type PhaseConfigF64 = PhaseConfig<f64>;
pub type QfimF64 = Qfim<f64>;
pub type QfiReportF64 = QfiReport<f64>;
pub type SensitivityF64 = Sensitivity<f64>;

pub type FockStateF32 = FockState<f32>;
pub type TwoModeStateF32 = TwoModeState<f32>;
pub type Su2CoherentParamsF32 = Su2CoherentParams<f32>;
pub type InputMomentsF32 = InputMoments<f32>;
pub type BeamSplitterF32 = BeamSplitter<f32>;
pub type PhaseConfigF32 = PhaseConfig<f32>;
pub type QfimF32 = Qfim<f32>;
pub type QfiReportF32 = QfiReport<f32>;
pub type SensitivityF32 = Sensitivity<f32>;
