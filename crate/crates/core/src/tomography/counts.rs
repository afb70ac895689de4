//! Measurement settings, projection-noise count simulation and the count CSV
//! layout.

use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quantum::matrix::{c, hadamard, identity2, kron2, pauli, trace, Axis, Mat2, Mat4};
use crate::quantum::{JointState, SpinState};
use crate::scattering::{analyzer_povm, Analyzer, Port};

/// One measurement type: a spin Pauli axis, a photon analyzer, or both (a
/// correlator).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSetting {
    pub spin_axis: Option<Axis>,
    pub photon_analyzer: Option<Analyzer>,
}

impl MeasurementSetting {
    pub fn new(spin_axis: Option<Axis>, photon_analyzer: Option<Analyzer>) -> Result<Self> {
        if spin_axis.is_none() && photon_analyzer.is_none() {
            return Err(invalid("a measurement setting needs at least one observable"));
        }
        Ok(Self { spin_axis, photon_analyzer })
    }

    pub fn spin(axis: Axis) -> Self {
        Self { spin_axis: Some(axis), photon_analyzer: None }
    }

    /// Pauli correlator `σ_spin ⊗ σ_photon`; `None` stands for the identity.
    pub fn pauli(spin: Option<Axis>, photon: Option<Axis>) -> Result<Self> {
        Self::new(spin, photon.map(Analyzer::for_photon_axis))
    }

    /// Stable label such as `zx`, `z_`, `_y`.
    pub fn id(&self) -> String {
        let spin = self.spin_axis.map_or("_", Axis::label);
        let photon = match self.photon_analyzer {
            None => "_".to_string(),
            Some(a) => match photon_axis_of(&a) {
                Some(axis) => axis.label().to_string(),
                None => "a".to_string(),
            },
        };
        format!("{spin}{photon}")
    }

    fn spin_operator_pointer_basis(&self) -> Mat2 {
        match self.spin_axis {
            Some(axis) => {
                let h = hadamard();
                h * pauli(axis) * h
            }
            None => identity2(),
        }
    }

    fn photon_operator(&self) -> Mat2 {
        match &self.photon_analyzer {
            Some(a) => analyzer_povm(a, Port::Plus) - analyzer_povm(a, Port::Minus),
            None => identity2(),
        }
    }

    /// `±1`-valued observable on the joint space (spin factor in the pointer
    /// basis).
    pub fn joint_observable(&self) -> Mat4 {
        kron2(&self.spin_operator_pointer_basis(), &self.photon_operator())
    }
}

/// Photon Pauli axis measured by `analyzer`, if it is one.
pub fn photon_axis_of(analyzer: &Analyzer) -> Option<Axis> {
    let obs = analyzer_povm(analyzer, Port::Plus) - analyzer_povm(analyzer, Port::Minus);
    Axis::ALL.into_iter().find(|&ax| (obs - pauli(ax)).norm() < 1e-9)
}

/// States whose outcome probabilities can be evaluated for a setting.
pub trait Measurable {
    fn expectation(&self, setting: &MeasurementSetting) -> Result<f64>;
}

impl Measurable for SpinState {
    fn expectation(&self, setting: &MeasurementSetting) -> Result<f64> {
        if setting.photon_analyzer.is_some() {
            return Err(invalid("a spin state has no photon to analyze"));
        }
        let axis = setting.spin_axis.ok_or_else(|| invalid("setting has no spin axis"))?;
        Ok(trace(&(self.matrix() * pauli(axis))).re)
    }
}

impl Measurable for JointState {
    fn expectation(&self, setting: &MeasurementSetting) -> Result<f64> {
        Ok(trace(&(self.matrix() * setting.joint_observable())).re)
    }
}

/// Counts for one setting. `n_plus` counts the `+1` outcome of the setting's
/// observable. `port` is set when the record was post-selected on a photon
/// port.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub setting_id: String,
    pub setting: MeasurementSetting,
    pub port: Option<Port>,
    pub n_plus: u64,
    pub n_minus: u64,
    pub seed: u64,
}

impl CountRecord {
    /// Prefixes the setting id, e.g. with the tomography input it belongs to.
    pub fn tagged(mut self, prefix: &str) -> Self {
        self.setting_id = format!("{prefix}:{}", self.setting_id);
        self
    }

    pub fn total(&self) -> u64 {
        self.n_plus + self.n_minus
    }

    /// `(n₊ − n₋)/N`.
    pub fn mean(&self) -> f64 {
        (self.n_plus as f64 - self.n_minus as f64) / self.total() as f64
    }
}

/// SplitMix64 step, used to derive per-setting seeds from a run seed.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws `n_plus ~ Binomial(N, p₊)` for probability `p_plus`.
pub fn sample_binomial(p_plus: f64, n: u64, seed: u64) -> Result<(u64, u64)> {
    if n < 1 {
        return Err(invalid("N must be at least 1"));
    }
    let p = p_plus.clamp(0.0, 1.0);
    let dist = Binomial::new(n, p).map_err(|e| Error::Numerical(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = dist.sample(&mut rng);
    Ok((k, n - k))
}

pub fn simulate_counts<S: Measurable + ?Sized>(
    state: &S,
    setting: &MeasurementSetting,
    n: u64,
    seed: u64,
) -> Result<CountRecord> {
    let p = (1.0 + state.expectation(setting)?) / 2.0;
    let (n_plus, n_minus) = sample_binomial(p, n, seed)?;
    Ok(CountRecord { setting_id: setting.id(), setting: *setting, port: None, n_plus, n_minus, seed })
}

/// Counts of the spin setting on events where the photon left through
/// `port` of `analyzer`, repeated until `N` such events were collected.
pub fn simulate_conditional_counts(
    state: &JointState,
    spin_axis: Axis,
    analyzer: &Analyzer,
    port: Port,
    n: u64,
    seed: u64,
) -> Result<CountRecord> {
    let p_plus = conditional_spin_probability(state, spin_axis, analyzer, port)?;
    let (n_plus, n_minus) = sample_binomial(p_plus, n, seed)?;
    let setting = MeasurementSetting { spin_axis: Some(spin_axis), photon_analyzer: Some(*analyzer) };
    Ok(CountRecord {
        setting_id: setting.id(),
        setting,
        port: Some(port),
        n_plus,
        n_minus,
        seed,
    })
}

/// Smallest port probability treated as an observable event.
pub const MIN_CONDITION_PROBABILITY: f64 = 1e-12;

/// `P(spin +1 along axis | photon in port)`.
pub fn conditional_spin_probability(
    state: &JointState,
    spin_axis: Axis,
    analyzer: &Analyzer,
    port: Port,
) -> Result<f64> {
    let proj = analyzer_povm(analyzer, port);
    let h = hadamard();
    let spin_plus = h * (identity2() + pauli(spin_axis)) * h * c(0.5, 0.0);
    let rho = state.matrix();
    let p_port = trace(&(rho * kron2(&identity2(), &proj))).re;
    if p_port < MIN_CONDITION_PROBABILITY {
        return Err(Error::InsufficientData(format!(
            "photon port {port:?} is never reached (probability {p_port:e})"
        )));
    }
    Ok((trace(&(rho * kron2(&spin_plus, &proj))).re / p_port).clamp(0.0, 1.0))
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    setting_id: String,
    axis_spin: String,
    analyzer_qwp: String,
    analyzer_hwp: String,
    port: String,
    n_plus: u64,
    n_minus: u64,
    #[serde(rename = "N")]
    n: u64,
    seed: u64,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

fn parse_opt(s: &str, field: &str) -> Result<Option<f64>> {
    if s.trim().is_empty() {
        return Ok(None);
    }
    s.trim().parse().map(Some).map_err(|_| invalid(format!("bad {field} value {s:?}")))
}

/// Writes records with a header row. Angles are radians; empty cells mean
/// "not present". `port` is `+1`/`-1` for post-selected records.
pub fn write_counts_csv<W: Write>(records: &[CountRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in records {
        w.serialize(CsvRow {
            setting_id: r.setting_id.clone(),
            axis_spin: r.setting.spin_axis.map_or(String::new(), |a| a.label().to_string()),
            analyzer_qwp: fmt_opt(r.setting.photon_analyzer.map(|a| a.qwp.angle)),
            analyzer_hwp: fmt_opt(r.setting.photon_analyzer.map(|a| a.hwp.angle)),
            port: match r.port {
                Some(Port::Plus) => "+1".into(),
                Some(Port::Minus) => "-1".into(),
                None => String::new(),
            },
            n_plus: r.n_plus,
            n_minus: r.n_minus,
            n: r.total(),
            seed: r.seed,
        })?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads records written by [`write_counts_csv`]; lines starting with `#`
/// are skipped.
pub fn read_counts_csv<R: Read>(reader: R) -> Result<Vec<CountRecord>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let row: CsvRow = row?;
        if row.n_plus + row.n_minus != row.n {
            return Err(invalid(format!("row {}: n_plus + n_minus != N", row.setting_id)));
        }
        let spin_axis = match row.axis_spin.trim() {
            "" => None,
            s => Some(Axis::parse(s).ok_or_else(|| invalid(format!("bad axis_spin {s:?}")))?),
        };
        let qwp = parse_opt(&row.analyzer_qwp, "analyzer_qwp")?;
        let hwp = parse_opt(&row.analyzer_hwp, "analyzer_hwp")?;
        let photon_analyzer = match (qwp, hwp) {
            (Some(q), Some(h)) => Some(Analyzer::new(q, h)),
            (None, None) => None,
            _ => return Err(invalid("analyzer_qwp and analyzer_hwp must both be set or both empty")),
        };
        let port = match row.port.trim() {
            "" => None,
            "+1" | "1" => Some(Port::Plus),
            "-1" => Some(Port::Minus),
            s => return Err(invalid(format!("bad port {s:?}"))),
        };
        out.push(CountRecord {
            setting_id: row.setting_id,
            setting: MeasurementSetting::new(spin_axis, photon_analyzer)?,
            port,
            n_plus: row.n_plus,
            n_minus: row.n_minus,
            seed: row.seed,
        });
    }
    Ok(out)
}
