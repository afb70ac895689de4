//! Spin-photon scattering: emission and absorption operators, the joint
//! channel, its process matrix averaged over the detection window, and the
//! polarization analyzer.

pub mod analyzer;
pub mod chi;
pub mod emission;
pub mod geometry;
pub mod joint;
pub mod noise;
pub mod polarization;

pub use analyzer::{analyzer_povm, detection_probability, photon_expectation, Analyzer, Port, WavePlateKind, WavePlateSetting};
pub use chi::{
    averaging_nodes, chi_averaged, chi_single_direction, AngularWindow, AveragedChi, AveragingMethod,
    AveragingOptions, ThetaLimits, Weighting,
};
pub use emission::{absorption_operator, emission_kraus, reduced_spin_after_scatter, scatter_joint_state, scattering_kraus};
pub use geometry::{direction, NoiseModel, ScatteringGeometry};
pub use joint::JointScatteringMap;
pub use noise::apply_background;
pub use polarization::{polarization_pair, transverse_frame, PolarizationBasis, PolarizationVector};
