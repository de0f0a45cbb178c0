//! Orchestration of full and reduced runs, writing their outputs to disk.

use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::forces::biot_savart_at_point;
use crate::geometry::DiscreteCurve;
use crate::integrator::{integrate_with, output_grid, IntegratorConfig, StepStats};
use crate::output::{
    frame_file_name, reduced_header, reduced_row, write_frame, DiagnosticsRow, LastState, RunMetadata,
    RunStatus,
};
use crate::reduced::{gamma_closed_form, run_reduced, CircleSystemState, ReducedTrajectory};
use crate::scenario::Scenario;
use crate::scheme::forces_of;
use crate::vec3::Vec3;

pub const SCENARIO_FILE: &str = "scenario.toml";
pub const METADATA_FILE: &str = "metadata.toml";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const REDUCED_FILE: &str = "reduced.csv";

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub frames: usize,
    pub diagnostics: Vec<DiagnosticsRow>,
    pub stats: StepStats,
}

fn create_file(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Integrates a scenario, writing `frame_NNNNN.csv` at every output time
/// plus `diagnostics.csv`, the resolved `scenario.toml` and `metadata.toml`.
///
/// Metadata is written on failure too, with the last time that was reached.
pub fn run_scenario(scenario: &Scenario, out_dir: &Path) -> Result<RunSummary> {
    let state = scenario.system_state()?;
    let config = scenario.integrator_config();
    config.validate()?;

    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    write_text(&out_dir.join(SCENARIO_FILE), &scenario.to_toml_string())?;

    let mut meta = RunMetadata {
        version: env!("CARGO_PKG_VERSION").to_string(),
        status: RunStatus::Failed,
        tol: config.tol,
        tolerance_kind: "absolute, max norm over all coordinates".into(),
        h_init: config.h_init,
        h_min: config.h_min,
        safety: config.safety,
        min_factor: config.min_factor,
        max_factor: config.max_factor,
        max_steps: config.max_steps,
        threads: rayon::current_num_threads(),
        frames_written: 0,
        last_good_time: 0.0,
        error: None,
        stats: StepStats::default(),
        last_state: None,
    };

    let result = integrate_scenario(scenario, &state, &config, out_dir, &mut meta);
    match &result {
        Ok(summary) => {
            meta.status = RunStatus::Completed;
            meta.stats = summary.stats;
        }
        Err(e) => {
            if let Error::Integration { t, state: y, .. } = e {
                meta.last_good_time = *t;
                meta.last_state = state
                    .layout()
                    .unpack(y)
                    .and_then(|curves| DiagnosticsRow::compute(*t, meta.frames_written, &curves, &meta.stats))
                    .ok()
                    .map(|row| LastState::from(&row));
            }
            meta.error = Some(e.to_string());
        }
    }
    let text = toml::to_string(&meta).expect("metadata serializes");
    write_text(&out_dir.join(METADATA_FILE), &text)?;
    result
}

fn integrate_scenario(
    scenario: &Scenario,
    state: &crate::scheme::SystemState,
    config: &IntegratorConfig,
    out_dir: &Path,
    meta: &mut RunMetadata,
) -> Result<RunSummary> {
    // intersecting curves are reported before any output is produced
    forces_of(state)?;

    let diag_path = out_dir.join(DIAGNOSTICS_FILE);
    let mut diag = create_file(&diag_path)?;
    writeln!(diag, "{}", DiagnosticsRow::header(state.curves.len())).map_err(|e| Error::io(&diag_path, e))?;

    let model = state.model();
    let times = output_grid(0.0, scenario.t_end, scenario.output_dt);
    let mut rows = Vec::with_capacity(times.len() + 1);
    let rhs = |_t: f64, y: &[f64], out: &mut [f64]| model.rhs(y, out);

    let stats = integrate_with(rhs, &state.to_flat(), (0.0, scenario.t_end), &times, config, |snap, stats| {
        let curves = model.layout.unpack(&snap.state)?;
        let frame = rows.len();
        let path = out_dir.join(frame_file_name(frame));
        let mut w = create_file(&path)?;
        write_frame(&mut w, &curves)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(&path, e))?;
        let row = DiagnosticsRow::compute(snap.t, frame, &curves, stats)?;
        writeln!(diag, "{}", row.to_csv())
            .and_then(|_| diag.flush())
            .map_err(|e| Error::io(&diag_path, e))?;
        log::info!(
            "t = {:.4}  frame {frame}  steps {}/{}  h = {:.3e}",
            snap.t,
            stats.accepted,
            stats.rejected,
            stats.h
        );
        rows.push(row);
        meta.frames_written = rows.len();
        meta.last_good_time = snap.t;
        meta.stats = *stats;
        Ok(())
    })?;
    diag.flush().map_err(|e| Error::io(&diag_path, e))?;

    Ok(RunSummary {
        out_dir: out_dir.to_path_buf(),
        frames: rows.len(),
        diagnostics: rows,
        stats,
    })
}

/// Settings of a reduced concentric-circle run.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedRun {
    pub initial: CircleSystemState,
    pub t_end: f64,
    pub output_dt: f64,
    pub tol: f64,
}

impl ReducedRun {
    pub fn integrate(&self) -> Result<ReducedTrajectory> {
        if !(self.t_end > 0.0 && self.output_dt > 0.0) {
            return Err(Error::Domain(format!(
                "need t_end > 0 and output_dt > 0, got {} and {}",
                self.t_end, self.output_dt
            )));
        }
        let config = IntegratorConfig::default()
            .with_tol(self.tol)
            .with_h_init(self.output_dt.min(1e-2));
        let times = output_grid(0.0, self.t_end, self.output_dt);
        run_reduced(&self.initial, self.t_end, &times, &config)
    }

    /// Integrates and writes `reduced.csv` into `out_dir`.
    pub fn run_to(&self, out_dir: &Path) -> Result<ReducedTrajectory> {
        let traj = self.integrate()?;
        fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
        let path = out_dir.join(REDUCED_FILE);
        let mut w = create_file(&path)?;
        let io = |e| Error::io(&path, e);
        writeln!(w, "{}", reduced_header(self.initial.n())).map_err(io)?;
        for row in &traj.rows {
            writeln!(w, "{}", reduced_row(row.t, &row.state)).map_err(io)?;
        }
        w.flush().map_err(io)?;
        Ok(traj)
    }
}

/// Polygonal versus closed-form field on a pair of coaxial circles.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceReport {
    pub r_i: f64,
    pub r_j: f64,
    pub z: f64,
    /// `(M, max-norm error)` per resolution.
    pub rows: Vec<(usize, f64)>,
    /// Least-squares slope of `-log(error)` against `log(M)`.
    pub order: Option<f64>,
}

impl fmt::Display for ForceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "r_i = {}, r_j = {}, z = {}", self.r_i, self.r_j, self.z)?;
        writeln!(f, "{:>8}  {:>12}", "M", "max error")?;
        for (m, e) in &self.rows {
            writeln!(f, "{m:>8}  {e:>12.4e}")?;
        }
        match self.order {
            Some(p) => writeln!(f, "fitted order: {p:.3}"),
            None => writeln!(f, "fitted order: n/a"),
        }
    }
}

/// Compares the discrete Biot-Savart field of circle `j` (radius `r_j`,
/// plane z = 0) on the nodes of circle `i` (radius `r_i`, plane z = `z`)
/// with the elliptic-integral formula, for each `M` in `m_list`.
pub fn validate_forces(r_i: f64, r_j: f64, z: f64, m_list: &[usize]) -> Result<ForceReport> {
    gamma_closed_form(r_i, r_j, z, 0.0)?;
    if m_list.is_empty() {
        return Err(Error::Domain("need at least one resolution".into()));
    }
    if let Some(m) = m_list.iter().find(|&&m| m < 3) {
        return Err(Error::Domain(format!("resolution must be >= 3, got {m}")));
    }
    let spec = Default::default();
    let mut rows = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let source = DiscreteCurve::circle(m, Vec3::ZERO, r_j)?;
        let target = DiscreteCurve::circle(m, Vec3::new(0.0, 0.0, z), r_i)?;
        let mut err: f64 = 0.0;
        for (k, &p) in target.nodes().iter().enumerate() {
            let discrete = biot_savart_at_point(p, &source, &spec)?;
            let exact = gamma_closed_form(r_i, r_j, z, k as f64 / m as f64)?;
            err = err.max((discrete - exact).norm());
        }
        rows.push((m, err));
    }
    Ok(ForceReport {
        r_i,
        r_j,
        z,
        order: fitted_order(&rows),
        rows,
    })
}

fn fitted_order(rows: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(_, e)| *e > 0.0)
        .map(|&(m, e)| ((m as f64).ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(-sxy / sxx)
}
