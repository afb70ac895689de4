use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Matrix2, Matrix3};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::quantum::{chi_to_affine, BlochVector, ProcessMatrix};
use crate::scattering::{chi_averaged, AveragingOptions, ScatteringGeometry};

use super::grid::BlochGrid;

/// Minor in-plane axis below which the aspect ratio is reported unbounded.
pub const DEGENERATE_AXIS: f64 = 1e-12;

/// Image of every grid point under the Bloch affine map of `chi`.
pub fn collapse_surface(chi: &ProcessMatrix, grid: &BlochGrid) -> Result<Vec<BlochVector>> {
    chi.require_cptp()?;
    let aff = chi_to_affine(chi);
    Ok(grid.points().par_iter().map(|b| aff.apply(b)).collect())
}

/// Shape of the image of the Bloch ball.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EllipsoidSummary {
    /// Descending.
    pub semi_axes: [f64; 3],
    /// One unit vector per semi-axis, same order.
    pub principal_directions: [[f64; 3]; 3],
    pub center: [f64; 3],
    /// Ratio of the two singular values of the `x-y` block; `None` when the
    /// minor one vanishes.
    pub in_plane_aspect_ratio: Option<f64>,
    /// Azimuth of the in-plane major axis, radians in `(−π/2, π/2]`.
    pub main_axis_azimuth: f64,
}

impl EllipsoidSummary {
    pub fn is_unbounded(&self) -> bool {
        self.in_plane_aspect_ratio.is_none()
    }

    pub fn principal_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|r, col| self.principal_directions[col][r])
    }
}

/// Singular-value description of `b ↦ M b + t`.
pub fn ellipsoid_summary(chi: &ProcessMatrix) -> Result<EllipsoidSummary> {
    chi.require_cptp()?;
    let aff = chi_to_affine(chi);
    let svd = aff.linear.svd(true, false);
    let u = svd.u.ok_or_else(|| invalid("SVD failed"))?;
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let semi_axes = order.map(|k| svd.singular_values[k]);
    let principal_directions = order.map(|k| {
        let col = u.column(k);
        [col[0], col[1], col[2]]
    });

    let block: Matrix2<f64> = aff.linear.fixed_view::<2, 2>(0, 0).into();
    let in_plane = block.svd(true, false);
    let (i_max, i_min) = if in_plane.singular_values[0] >= in_plane.singular_values[1] { (0, 1) } else { (1, 0) };
    let s_max = in_plane.singular_values[i_max];
    let s_min = in_plane.singular_values[i_min];
    let in_plane_aspect_ratio = if s_min > DEGENERATE_AXIS { Some(s_max / s_min) } else { None };
    let major = in_plane.u.ok_or_else(|| invalid("SVD failed"))?.column(i_max).into_owned();
    let main_axis_azimuth = wrap_axis_angle(major[1].atan2(major[0]));

    let t = aff.translation;
    Ok(EllipsoidSummary {
        semi_axes,
        principal_directions,
        center: [t.x, t.y, t.z],
        in_plane_aspect_ratio,
        main_axis_azimuth,
    })
}

/// Maps an axis direction angle into `(−π/2, π/2]`.
pub fn wrap_axis_angle(a: f64) -> f64 {
    let mut x = a.rem_euclid(PI);
    if x > FRAC_PI_2 {
        x -= PI;
    }
    x
}

/// One point of the window-width sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub width_deg: f64,
    /// `None` when unbounded.
    pub ratio: Option<f64>,
}

/// In-plane aspect ratio of the averaged channel for each full window width.
pub fn aspect_ratio_sweep(
    widths_deg: &[f64],
    geometry: &ScatteringGeometry,
    options: &AveragingOptions,
) -> Result<Vec<SweepPoint>> {
    widths_deg
        .iter()
        .map(|&w| {
            if !(w > 0.0 && w <= 360.0) {
                return Err(invalid(format!("window width must lie in (0, 360] degrees, got {w}")));
            }
            let g = geometry.clone().with_window_degrees(w);
            let chi = chi_averaged(&g, options)?.chi;
            Ok(SweepPoint { width_deg: w, ratio: ellipsoid_summary(&chi)?.in_plane_aspect_ratio })
        })
        .collect()
}

/// Largest width up to which the ratio must not increase. Beyond a half
/// turn the uniform-window ratio rises again slightly before returning to 1.
pub const MONOTONE_LIMIT_DEG: f64 = 180.0;

/// Checks that the ratio is non-increasing in width over points with width
/// at most `limit_deg`. Unbounded ratios count as infinite.
pub fn check_monotone(points: &[SweepPoint], limit_deg: f64) -> Result<()> {
    let mut pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.width_deg <= limit_deg)
        .map(|p| (p.width_deg, p.ratio.unwrap_or(f64::INFINITY)))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    for pair in pts.windows(2) {
        let ((w0, r0), (w1, r1)) = (pair[0], pair[1]);
        if r1 > r0 * (1.0 + 1e-12) {
            return Err(invalid(format!(
                "aspect ratio increases from {r0} at {w0}° to {r1} at {w1}°"
            )));
        }
    }
    Ok(())
}
