//! Figure-level quantities: collapse surfaces, ellipsoid shape, entropy
//! and concurrence maps, polarization scans.

pub mod ellipsoid;
pub mod grid;
pub mod maps;
pub mod scan;

pub use ellipsoid::{
    aspect_ratio_sweep, check_monotone, collapse_surface, ellipsoid_summary, EllipsoidSummary, SweepPoint,
    MONOTONE_LIMIT_DEG,
};
pub use grid::{BlochGrid, DEFAULT_GRID_POINTS};
pub use maps::{argmax, argmin, concurrence_map, entropy_map, MapPoint};
pub use scan::{
    default_hwp_angles, fit_visibility, pointer_readout_correlation, polarization_scan, polarization_scan_sampled,
    PolarizationScan, ScanPoint,
};
