use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::quantum::BlochVector;

/// Default number of grid points.
pub const DEFAULT_GRID_POINTS: usize = 2048;

/// Unit Bloch vectors used as pure input states.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochGrid {
    points: Vec<BlochVector>,
}

impl BlochGrid {
    pub fn new(points: Vec<BlochVector>) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("grid must contain at least one point"));
        }
        if let Some(p) = points.iter().find(|p| (p.norm() - 1.0).abs() > 1e-12) {
            return Err(invalid(format!("grid point {p:?} is not on the unit sphere")));
        }
        Ok(Self { points })
    }

    /// Fibonacci-sphere sampling with `n` nearly uniform points.
    pub fn fibonacci(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(invalid("grid needs at least one point"));
        }
        let golden = PI * (3.0 - 5f64.sqrt());
        let points = (0..n)
            .map(|i| {
                let z = 1.0 - (2 * i + 1) as f64 / n as f64;
                let r = (1.0 - z * z).max(0.0).sqrt();
                let phi = golden * i as f64;
                let v = nalgebra::Vector3::new(r * phi.cos(), r * phi.sin(), z).normalize();
                BlochVector::from(v)
            })
            .collect();
        Self::new(points)
    }

    pub fn points(&self) -> &[BlochVector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Typical nearest-neighbour distance `√(4π/N)`.
    pub fn spacing(&self) -> f64 {
        (4.0 * PI / self.points.len() as f64).sqrt()
    }
}

impl Default for BlochGrid {
    fn default() -> Self {
        Self::fibonacci(DEFAULT_GRID_POINTS).expect("non-empty grid")
    }
}
