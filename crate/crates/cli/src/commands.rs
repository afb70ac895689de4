use std::path::PathBuf;

use serde::Serialize;
use serde_json::json;
use spinscatter::analysis::{
    argmax, argmin, aspect_ratio_sweep, check_monotone, collapse_surface, ellipsoid_summary, entropy_map,
    concurrence_map, pointer_readout_correlation, polarization_scan, polarization_scan_sampled, BlochGrid,
    MapPoint, MONOTONE_LIMIT_DEG,
};
use spinscatter::quantum::{bloch_to_density, Axis, BlochVector, OperatorBasis, ProcessMatrix, SpinState};
use spinscatter::scattering::geometry::angles;
use spinscatter::scattering::{
    chi_averaged, chi_single_direction, AveragingOptions, JointScatteringMap, PolarizationVector,
};
use spinscatter::tomography::{
    exact_process_tomography, simulate_process_tomography, write_counts_csv, TomographyInputSet,
};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::{fmt, OutputDir};

pub const DEFAULT_SWEEP_WIDTHS: [f64; 13] =
    [11.25, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0, 110.0, 120.0, 130.0, 140.0, 180.0];

/// Validated config plus its hash and output directory.
pub struct Run {
    pub config: RunConfig,
    pub hash: String,
    out: OutputDir,
}

impl Run {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let hash = config.hash();
        let out = OutputDir::create(&config.output_dir, &hash)?;
        Ok(Self { config, hash, out })
    }

    fn averaging(&self) -> AveragingOptions {
        AveragingOptions::default()
    }

    /// χ of the single detector direction.
    pub fn point_channel(&self) -> Result<ProcessMatrix> {
        let (theta, phi) = angles(&self.config.geometry.detector()?);
        Ok(chi_single_direction(theta, phi))
    }

    /// Model channel: the point channel with `ideal`, else the window average.
    pub fn channel(&self) -> Result<ProcessMatrix> {
        if self.config.ideal {
            self.point_channel()
        } else {
            Ok(chi_averaged(&self.config.geometry, &self.averaging())?.chi)
        }
    }

    pub fn joint_map(&self) -> Result<JointScatteringMap> {
        if self.config.ideal {
            Ok(JointScatteringMap::point(&self.config.geometry.detector()?, &PolarizationVector::laser_z())?)
        } else {
            Ok(JointScatteringMap::averaged(&self.config.geometry, &self.averaging())?)
        }
    }

    fn grid(&self) -> Result<BlochGrid> {
        Ok(BlochGrid::fibonacci(self.config.grid_points)?)
    }

    fn write_chi(&self, name: &str, chi: &ProcessMatrix) -> Result<PathBuf> {
        let pauli = chi.to_basis(OperatorBasis::Pauli);
        let reporting = chi.to_basis(OperatorBasis::Reporting).unit_trace();
        self.out.write_json(name, &json!({ "pauli": pauli, "reporting_unit_trace": reporting }))
    }

    /// Model, ideal and reconstructed process matrices, the collapse
    /// surface and the ellipsoid summary.
    pub fn process(&self) -> Result<Vec<PathBuf>> {
        let cfg = &self.config;
        let ideal = self.point_channel()?;
        let model = self.channel()?;
        let inputs = TomographyInputSet::standard();
        let mut files = vec![self.write_chi("chi_ideal.json", &ideal)?, self.write_chi("chi_averaged.json", &model)?];

        let reconstructed = if cfg.noiseless {
            exact_process_tomography(&model, &inputs)?
        } else {
            let run = simulate_process_tomography(&model, &inputs, cfg.counts_per_setting, cfg.require_seed()?)?;
            let (path, w) = self.out.csv_writer("process_counts.csv")?;
            write_counts_csv(&run.records, w)?;
            files.push(path);
            run.chi
        };
        files.push(self.write_chi("chi_reconstructed.json", &reconstructed)?);

        let grid = self.grid()?;
        let model_img = collapse_surface(&model, &grid)?;
        let rec_img = collapse_surface(&reconstructed, &grid)?;
        let rows = grid.points().iter().zip(&model_img).zip(&rec_img).map(|((b, m), r)| {
            [b.x, b.y, b.z, m.x, m.y, m.z, r.x, r.y, r.z].map(fmt).to_vec()
        });
        files.push(self.out.write_csv(
            "collapse_surface.csv",
            &["bx", "by", "bz", "model_x", "model_y", "model_z", "reconstructed_x", "reconstructed_y", "reconstructed_z"],
            rows,
        )?);

        let model_summary = ellipsoid_summary(&model)?;
        let rec_summary = ellipsoid_summary(&reconstructed)?;
        files.push(self.out.write_json(
            "ellipsoid.json",
            &json!({
                "semi_axes": model_summary.semi_axes,
                "principal_directions": model_summary.principal_directions,
                "center": model_summary.center,
                "in_plane_aspect_ratio": model_summary.in_plane_aspect_ratio,
                "main_axis_azimuth_deg": model_summary.main_axis_azimuth.to_degrees(),
                "reconstructed": rec_summary,
            }),
        )?);
        files.push(self.summary(
            "process_run.json",
            json!({
                "frobenius_reconstructed_vs_model": reconstructed.frobenius_distance(&model),
                "inputs": "standard",
            }),
        )?);
        Ok(files)
    }

    /// Entropy and concurrence over the Bloch-sphere grid.
    pub fn maps(&self) -> Result<Vec<PathBuf>> {
        let grid = self.grid()?;
        let entropy = entropy_map(&self.channel()?, &grid)?;
        let conc = concurrence_map(&self.joint_map()?, &self.config.effective_noise(), &grid)?;
        let rows = |pts: &[MapPoint]| {
            pts.iter().map(|p| [p.point.x, p.point.y, p.point.z, p.value].map(fmt).to_vec()).collect::<Vec<_>>()
        };
        let mut files = vec![
            self.out.write_csv("entropy_map.csv", &["bx", "by", "bz", "entropy_nats"], rows(&entropy))?,
            self.out.write_csv("concurrence_map.csv", &["bx", "by", "bz", "concurrence"], rows(&conc))?,
        ];
        let ext = |p: Option<&MapPoint>| p.map(|p| json!({ "point": p.point, "value": p.value }));
        files.push(self.summary(
            "maps_run.json",
            json!({
                "grid_points": grid.len(),
                "grid_spacing": grid.spacing(),
                "entropy_min": ext(argmin(&entropy)),
                "entropy_max": ext(argmax(&entropy)),
                "concurrence_min": ext(argmin(&conc)),
                "concurrence_max": ext(argmax(&conc)),
            }),
        )?);
        Ok(files)
    }

    /// Half-wave-plate scan behind a quarter-wave plate at 45°.
    pub fn scan(&self, initial: &SpinState, hwp_deg: &[f64]) -> Result<Vec<PathBuf>> {
        let map = self.joint_map()?;
        let noise = self.config.effective_noise();
        let angles: Vec<f64> = hwp_deg.iter().map(|a| a.to_radians()).collect();
        let exact = polarization_scan(initial, &angles, &map, &noise)?;
        let sampled = if self.config.noiseless {
            None
        } else {
            Some(polarization_scan_sampled(
                initial,
                &angles,
                &map,
                &noise,
                self.config.counts_per_setting,
                self.config.require_seed()?,
            )?)
        };
        let mut header = vec!["hwp_deg", "p_plus_exact"];
        if sampled.is_some() {
            header.push("p_plus_sampled");
        }
        let rows = hwp_deg.iter().enumerate().map(|(i, a)| {
            let mut row = vec![fmt(*a), fmt(exact.points[i].p_plus)];
            if let Some(s) = &sampled {
                row.push(fmt(s.points[i].p_plus));
            }
            row
        });
        let mut files = vec![self.out.write_csv("polarization_scan.csv", &header, rows)?];
        let b = initial.bloch();
        files.push(self.summary(
            "polarization_scan.json",
            json!({
                "initial_bloch": [b.x, b.y, b.z],
                "visibility_exact": exact.visibility,
                "fit_exact": exact.fit,
                "visibility_sampled": sampled.as_ref().map(|s| s.visibility),
                "fit_sampled": sampled.as_ref().map(|s| s.fit),
                "pointer_readout_correlation": pointer_readout_correlation(&map, &noise)?,
            }),
        )?);
        Ok(files)
    }

    /// In-plane aspect ratio against full window width; fails when the
    /// ratio rises with width up to a half turn.
    pub fn sweep(&self, widths_deg: &[f64]) -> Result<Vec<PathBuf>> {
        let points = aspect_ratio_sweep(widths_deg, &self.config.geometry, &self.averaging())?;
        check_monotone(&points, MONOTONE_LIMIT_DEG)?;
        let rows = points
            .iter()
            .map(|p| vec![fmt(p.width_deg), p.ratio.map(fmt).unwrap_or_else(|| "inf".into())]);
        let files = vec![
            self.out.write_csv("aspect_ratio.csv", &["width_deg", "ratio"], rows)?,
            self.summary("aspect_ratio.json", json!({ "points": points, "monotone_up_to_deg": MONOTONE_LIMIT_DEG }))?,
        ];
        Ok(files)
    }

    fn summary(&self, name: &str, results: serde_json::Value) -> Result<PathBuf> {
        #[derive(Serialize)]
        struct Summary<'a> {
            geometry: &'a spinscatter::scattering::ScatteringGeometry,
            noise: spinscatter::scattering::NoiseModel,
            seed: Option<u64>,
            counts_per_setting: u64,
            noiseless: bool,
            ideal: bool,
            results: serde_json::Value,
        }
        let c = &self.config;
        self.out.write_json(
            name,
            &Summary {
                geometry: &c.geometry,
                noise: c.effective_noise(),
                seed: c.seed,
                counts_per_setting: c.counts_per_setting,
                noiseless: c.noiseless,
                ideal: c.ideal,
                results,
            },
        )
    }
}

/// `x`, `-y`, `+z`, or three comma-separated Bloch components.
pub fn parse_initial_state(s: &str) -> Result<SpinState> {
    let s = s.trim();
    let (sign, rest) = match s.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, s.strip_prefix('+').unwrap_or(s)),
    };
    if let Some(axis) = Axis::parse(rest) {
        return Ok(SpinState::along(axis, sign));
    }
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| CliError::Config(format!("initial: cannot parse {s:?}")))?;
    if parts.len() != 3 {
        return Err(CliError::Config(format!("initial: expected an axis or three components, got {s:?}")));
    }
    bloch_to_density(&BlochVector::new(parts[0], parts[1], parts[2]))
        .map_err(|e| CliError::Config(format!("initial: {e}")))
}

/// `steps` angles from `from` (included) to `to` (excluded).
pub fn angle_range(from_deg: f64, to_deg: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 3 || to_deg.partial_cmp(&from_deg) != Some(std::cmp::Ordering::Greater) {
        return Err(CliError::Config("scan: need at least three steps over a non-empty range".into()));
    }
    Ok((0..steps).map(|i| from_deg + (to_deg - from_deg) * i as f64 / steps as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_states() {
        assert!((parse_initial_state("-x").unwrap().bloch().x + 1.0).abs() < 1e-12);
        assert!((parse_initial_state("y").unwrap().bloch().y - 1.0).abs() < 1e-12);
        assert!((parse_initial_state("0.6, 0, 0.8").unwrap().bloch().z - 0.8).abs() < 1e-12);
        assert!(parse_initial_state("q").is_err());
        assert!(parse_initial_state("1,2").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(angle_range(0.0, 180.0, 4).unwrap(), vec![0.0, 45.0, 90.0, 135.0]);
        assert!(angle_range(0.0, 0.0, 4).is_err());
    }
}
