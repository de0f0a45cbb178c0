//! Plain-text output: one CSV frame per output time, a diagnostics table, the
//! reduced trajectory table, and run metadata.
//!
//! Frames have the header `curve_id,node_id,x,y,z` and coordinates written
//! with 17 significant digits, so they read back bit-exactly.

use std::fmt::Write as _;
use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forces::min_intercurve_distance;
use crate::geometry::{generalized_area, DiscreteCurve, GeometryCache};
use crate::integrator::StepStats;
use crate::reduced::CircleSystemState;
use crate::vec3::Vec3;

pub const FRAME_HEADER: &str = "curve_id,node_id,x,y,z";

pub fn frame_file_name(index: usize) -> String {
    format!("frame_{index:05}.csv")
}

pub fn write_frame<W: Write>(mut w: W, curves: &[DiscreteCurve]) -> io::Result<()> {
    writeln!(w, "{FRAME_HEADER}")?;
    for (i, c) in curves.iter().enumerate() {
        for (k, p) in c.nodes().iter().enumerate() {
            writeln!(w, "{i},{k},{:.16e},{:.16e},{:.16e}", p.x, p.y, p.z)?;
        }
    }
    Ok(())
}

/// Parses a frame file back into per-curve node lists.
///
/// Rows must be grouped by curve with consecutive ids starting at zero.
pub fn read_frame(text: &str) -> Result<Vec<Vec<Vec3>>> {
    let err = |line: usize, message: String| Error::Parse {
        line,
        column: 1,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == FRAME_HEADER => {}
        _ => return Err(err(1, format!("expected header {FRAME_HEADER:?}"))),
    }
    let mut curves: Vec<Vec<Vec3>> = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(err(lineno, format!("expected 5 fields, got {}", fields.len())));
        }
        let curve: usize = fields[0]
            .parse()
            .map_err(|_| err(lineno, format!("bad curve id {:?}", fields[0])))?;
        let node: usize = fields[1]
            .parse()
            .map_err(|_| err(lineno, format!("bad node id {:?}", fields[1])))?;
        let mut xyz = [0.0; 3];
        for (slot, f) in xyz.iter_mut().zip(&fields[2..]) {
            *slot = f
                .parse()
                .map_err(|_| err(lineno, format!("bad coordinate {f:?}")))?;
        }
        if curve == curves.len() {
            curves.push(Vec::new());
        } else if curve + 1 != curves.len() {
            return Err(err(lineno, format!("curve id {curve} out of order")));
        }
        let nodes = curves.last_mut().expect("pushed above");
        if node != nodes.len() {
            return Err(err(lineno, format!("node id {node} out of order")));
        }
        nodes.push(Vec3::new(xyz[0], xyz[1], xyz[2]));
    }
    Ok(curves)
}

/// Diagnostics recorded at each output time.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub frame: usize,
    pub lengths: Vec<f64>,
    /// `None` where some node has no Frenet frame.
    pub areas: Vec<Option<f64>>,
    pub max_curvature: f64,
    pub min_distance: Option<f64>,
    /// Largest `|d[k] M / L - 1|` over all curves.
    pub nonuniformity: f64,
    pub accepted: usize,
    pub rejected: usize,
}

impl DiagnosticsRow {
    pub fn compute(t: f64, frame: usize, curves: &[DiscreteCurve], stats: &StepStats) -> Result<Self> {
        let caches = curves
            .iter()
            .map(GeometryCache::compute)
            .collect::<Result<Vec<_>>>()?;
        Ok(DiagnosticsRow {
            t,
            frame,
            lengths: caches.iter().map(|g| g.length).collect(),
            areas: curves
                .iter()
                .zip(&caches)
                .map(|(c, g)| generalized_area(c, g).ok())
                .collect(),
            max_curvature: caches
                .iter()
                .flat_map(|g| g.curvatures.iter().copied())
                .fold(0.0, f64::max),
            min_distance: min_intercurve_distance(curves),
            nonuniformity: caches
                .iter()
                .map(GeometryCache::mesh_nonuniformity)
                .fold(0.0, f64::max),
            accepted: stats.accepted,
            rejected: stats.rejected,
        })
    }

    pub fn header(n_curves: usize) -> String {
        let mut h = String::from("t,frame");
        for i in 0..n_curves {
            write!(h, ",length_{i}").unwrap();
        }
        for i in 0..n_curves {
            write!(h, ",area_{i}").unwrap();
        }
        h.push_str(",max_curvature,min_distance,mesh_nonuniformity,accepted,rejected");
        h
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("{:.16e},{}", self.t, self.frame);
        for l in &self.lengths {
            write!(s, ",{l:.16e}").unwrap();
        }
        for a in &self.areas {
            match a {
                Some(a) => write!(s, ",{a:.16e}").unwrap(),
                None => s.push(','),
            }
        }
        write!(s, ",{:.16e},", self.max_curvature).unwrap();
        if let Some(d) = self.min_distance {
            write!(s, "{d:.16e}").unwrap();
        }
        write!(s, ",{:.16e},{},{}", self.nonuniformity, self.accepted, self.rejected).unwrap();
        s
    }
}

/// `t,r_1..r_n,z_12..z_{n-1,n},sum_r2`
pub fn reduced_header(n: usize) -> String {
    let mut h = String::from("t");
    for i in 1..=n {
        write!(h, ",r_{i}").unwrap();
    }
    for i in 1..n {
        write!(h, ",z_{}{}", i, i + 1).unwrap();
    }
    h.push_str(",sum_r2");
    h
}

pub fn reduced_row(t: f64, state: &CircleSystemState) -> String {
    let mut s = format!("{t:.16e}");
    for v in state.radii.iter().chain(&state.gaps) {
        write!(s, ",{v:.16e}").unwrap();
    }
    write!(s, ",{:.16e}", state.sum_r2()).unwrap();
    s
}

/// Run outcome written next to the outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub version: String,
    pub status: RunStatus,
    pub tol: f64,
    pub tolerance_kind: String,
    pub h_init: f64,
    pub h_min: f64,
    pub safety: f64,
    pub min_factor: f64,
    pub max_factor: f64,
    pub max_steps: usize,
    pub threads: usize,
    pub frames_written: usize,
    pub last_good_time: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub stats: StepStats,
    /// Geometry of the last accepted state when a run fails.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub last_state: Option<LastState>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LastState {
    pub lengths: Vec<f64>,
    pub max_curvature: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_distance: Option<f64>,
    pub nonuniformity: f64,
}

impl From<&DiagnosticsRow> for LastState {
    fn from(row: &DiagnosticsRow) -> Self {
        LastState {
            lengths: row.lengths.clone(),
            max_curvature: row.max_curvature,
            min_distance: row.min_distance,
            nonuniformity: row.nonuniformity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    Failed,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frames_roundtrip_bitwise() {
        let curves = vec![
            DiscreteCurve::circle(7, Vec3::new(0.1, -0.2, 1.0 / 3.0), 1.7).unwrap(),
            DiscreteCurve::circle(5, Vec3::ZERO, std::f64::consts::PI).unwrap(),
        ];
        let mut buf = Vec::new();
        write_frame(&mut buf, &curves).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("curve_id,node_id,x,y,z\n0,0,"));
        let back = read_frame(&text).unwrap();
        assert_eq!(back.len(), 2);
        for (c, b) in curves.iter().zip(&back) {
            assert_eq!(c.nodes(), b.as_slice());
        }
    }

    #[test]
    fn malformed_frames() {
        assert!(read_frame("").is_err());
        assert!(read_frame("x,y\n").is_err());
        assert!(read_frame("curve_id,node_id,x,y,z\n1,0,0,0,0\n").is_err());
        assert!(read_frame("curve_id,node_id,x,y,z\n0,1,0,0,0\n").is_err());
        assert!(read_frame("curve_id,node_id,x,y,z\n0,0,0,a,0\n").is_err());
        assert!(read_frame("curve_id,node_id,x,y,z\n0,0,0,0\n").is_err());
    }

    #[test]
    fn reduced_columns() {
        assert_eq!(reduced_header(3), "t,r_1,r_2,r_3,z_12,z_23,sum_r2");
        let s = CircleSystemState::new(vec![2.0, 1.0], vec![3.0]).unwrap();
        let row = reduced_row(0.0, &s);
        assert_eq!(row.split(',').count(), 5);
        assert!(row.ends_with("5.0000000000000000e0"));
    }

    #[test]
    fn diagnostics_row_shape() {
        let curves = vec![
            DiscreteCurve::circle(50, Vec3::ZERO, 1.0).unwrap(),
            DiscreteCurve::circle(50, Vec3::new(0.0, 0.0, 2.0), 1.0).unwrap(),
        ];
        let row = DiagnosticsRow::compute(0.0, 0, &curves, &StepStats::default()).unwrap();
        assert_eq!(
            DiagnosticsRow::header(2).split(',').count(),
            row.to_csv().split(',').count()
        );
        assert!((row.min_distance.unwrap() - 2.0).abs() < 1e-12);
        assert!(row.nonuniformity < 1e-12);
        assert!(row.areas.iter().all(Option::is_some));
    }
}
