use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::quantum::measures::entropy_of_matrix;
use crate::quantum::matrix::to_dynamic;
use crate::quantum::{bloch_to_density, concurrence, BlochVector, ProcessMatrix};
use crate::scattering::{apply_background, JointScatteringMap, NoiseModel};

use super::grid::BlochGrid;

/// Value attached to one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapPoint {
    pub point: BlochVector,
    pub value: f64,
}

/// Von Neumann entropy (nats) of the channel output for each pure grid
/// state, in grid order.
pub fn entropy_map(chi: &ProcessMatrix, grid: &BlochGrid) -> Result<Vec<MapPoint>> {
    chi.require_cptp()?;
    grid.points()
        .par_iter()
        .map(|b| {
            let out = chi.apply(&bloch_to_density(b)?);
            Ok(MapPoint { point: *b, value: entropy_of_matrix(&to_dynamic(out.matrix()))? })
        })
        .collect()
}

/// Concurrence of the joint spin-photon state, background included, for
/// each pure grid state, in grid order.
pub fn concurrence_map(map: &JointScatteringMap, noise: &NoiseModel, grid: &BlochGrid) -> Result<Vec<MapPoint>> {
    noise.validate()?;
    grid.points()
        .par_iter()
        .map(|b| {
            let joint = apply_background(&map.apply(&bloch_to_density(b)?), noise)?;
            Ok(MapPoint { point: *b, value: concurrence(&joint)? })
        })
        .collect()
}

/// Entry with the smallest value; ties keep the earliest grid index.
pub fn argmin(points: &[MapPoint]) -> Option<&MapPoint> {
    points.iter().reduce(|a, b| if b.value < a.value { b } else { a })
}

pub fn argmax(points: &[MapPoint]) -> Option<&MapPoint> {
    points.iter().reduce(|a, b| if b.value > a.value { b } else { a })
}
