//! Scenario files: TOML descriptions of a family of initial curves plus the
//! model and solver settings.
//!
//! ```toml
//! name = "example1"
//! m = 100              # nodes per curve
//! delta = 0.0          # Biot-Savart regularization
//! omega = 0.0          # tangential redistribution rate
//! flux_rule = "node"   # or "trapezoid", quadrature of κ v_N in the redistribution
//! tol = 1e-3           # integrator tolerance (absolute, max norm)
//! max_steps = 1000000  # attempted-step budget before the run is abandoned
//! t_end = 45.0
//! output_dt = 0.2
//!
//! [[curves]]
//! kind = "perturbed_circle"   # or "circle", "explicit"
//! center = [0.1, 0.0, 0.2]
//! radius = 1.0
//! amplitude = 0.2             # out-of-plane term amplitude * sin(2π frequency u)
//! frequency = 3
//! a = 0.05
//! b = 0.1
//! ```
//!
//! Unknown keys are rejected.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forces::BiotSavartSpec;
use crate::geometry::DiscreteCurve;
use crate::integrator::{IntegratorConfig, DEFAULT_MAX_STEPS};
use crate::redistribution::{FluxRule, RedistParams};
use crate::scheme::{CurveParams, SystemState};
use crate::vec3::Vec3;

pub const DEFAULT_M: usize = 100;
pub const DEFAULT_TOL: f64 = 1e-3;
pub const DEFAULT_OUTPUT_DT: f64 = 0.2;

const PRESETS: &[(&str, &str)] = &[
    ("example1", include_str!("../presets/example1.toml")),
    ("example2", include_str!("../presets/example2.toml")),
    ("example3", include_str!("../presets/example3.toml")),
    ("shrinking-circle", include_str!("../presets/shrinking-circle.toml")),
    ("binormal-circle", include_str!("../presets/binormal-circle.toml")),
    ("coaxial-rings", include_str!("../presets/coaxial-rings.toml")),
];

/// Names and one-line descriptions of the built-in scenarios.
pub fn presets() -> Vec<(&'static str, &'static str)> {
    PRESETS
        .iter()
        .map(|(name, text)| {
            let about = text
                .lines()
                .next()
                .and_then(|l| l.strip_prefix("# "))
                .unwrap_or("");
            (*name, about)
        })
        .collect()
}

pub fn preset_source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn preset(name: &str) -> Result<Scenario> {
    let text = preset_source(name).ok_or_else(|| Error::UnknownPreset(name.to_string()))?;
    Scenario::from_toml_str(text)
}

/// Loads a preset by name, or a scenario file by path.
pub fn load_scenario(path_or_preset: &str) -> Result<Scenario> {
    if let Some(text) = preset_source(path_or_preset) {
        return Scenario::from_toml_str(text);
    }
    let path = Path::new(path_or_preset);
    if !path.exists() {
        return Err(Error::UnknownPreset(path_or_preset.to_string()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Scenario::from_toml_str(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Circle,
    PerturbedCircle,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    #[default]
    Ccw,
    Cw,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveShape {
    /// `center + r (cos φ axis_u + sin φ axis_v) + amplitude sin(2π frequency u) axis_u × axis_v`,
    /// with `φ = ±2π u` and nodes at `u = s + warp sin(2π s) / 2π`, `s = k / m`.
    Circle {
        center: Vec3,
        radius: f64,
        axis_u: Vec3,
        axis_v: Vec3,
        amplitude: f64,
        frequency: u32,
        orientation: Orientation,
        mesh_warp: f64,
    },
    Explicit { nodes: Vec<Vec3> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    pub kind: CurveKind,
    pub shape: CurveShape,
    pub params: CurveParams,
}

impl CurveSpec {
    pub fn discretize(&self, m: usize) -> Result<DiscreteCurve> {
        match &self.shape {
            CurveShape::Explicit { nodes } => DiscreteCurve::new(nodes.clone()),
            &CurveShape::Circle {
                center,
                radius,
                axis_u,
                axis_v,
                amplitude,
                frequency,
                orientation,
                mesh_warp,
            } => {
                let normal = axis_u.cross(axis_v);
                let sign = match orientation {
                    Orientation::Ccw => 1.0,
                    Orientation::Cw => -1.0,
                };
                DiscreteCurve::sample(m, |s| {
                    let u = s + mesh_warp * (2.0 * PI * s).sin() / (2.0 * PI);
                    let phi = sign * 2.0 * PI * u;
                    center
                        + (axis_u * phi.cos() + axis_v * phi.sin()) * radius
                        + normal * (amplitude * (2.0 * PI * frequency as f64 * u).sin())
                })
            }
        }
    }
}

/// A validated scenario with every default resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub m: usize,
    pub delta: f64,
    pub omega: f64,
    pub flux_rule: FluxRule,
    pub tol: f64,
    pub h_init: f64,
    pub max_steps: usize,
    pub t_end: f64,
    pub output_dt: f64,
    pub output_dir: Option<PathBuf>,
    pub curves: Vec<CurveSpec>,
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| toml_error(text, &e))?;
        raw.validate()
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&RawScenario::from(self)).expect("scenario serializes")
    }

    pub fn system_state(&self) -> Result<SystemState> {
        let curves = self
            .curves
            .iter()
            .map(|c| c.discretize(self.m))
            .collect::<Result<Vec<_>>>()?;
        SystemState::new(
            curves,
            self.curves.iter().map(|c| c.params).collect(),
            BiotSavartSpec::regularized(self.delta),
            RedistParams {
                omega: self.omega,
                flux_rule: self.flux_rule,
            },
        )
    }

    pub fn integrator_config(&self) -> IntegratorConfig {
        IntegratorConfig::for_mesh(self.m)
            .with_tol(self.tol)
            .with_h_init(self.h_init)
            .with_max_steps(self.max_steps)
    }
}

fn toml_error(text: &str, e: &toml::de::Error) -> Error {
    let (line, column) = match e.span() {
        Some(span) => {
            let before = &text[..span.start.min(text.len())];
            let line = before.matches('\n').count() + 1;
            let column = before.len() - before.rfind('\n').map_or(0, |p| p + 1) + 1;
            (line, column)
        }
        None => (0, 0),
    };
    Error::Parse {
        line,
        column,
        message: e.message().to_string(),
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    flux_rule: Option<FluxRule>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h_init: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_steps: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output_dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output_dir: Option<String>,
    #[serde(default)]
    curves: Vec<RawCurve>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCurve {
    #[serde(skip_serializing_if = "Option::is_none")]
    kind: Option<CurveKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    center: Option<Vec3>,
    #[serde(skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    axis_u: Option<Vec3>,
    #[serde(skip_serializing_if = "Option::is_none")]
    axis_v: Option<Vec3>,
    #[serde(skip_serializing_if = "Option::is_none")]
    amplitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    frequency: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    orientation: Option<Orientation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mesh_warp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nodes: Option<Vec<Vec3>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<f64>,
}

/// Collects every violation instead of stopping at the first.
#[derive(Default)]
struct Problems(Vec<String>);

impl Problems {
    fn push(&mut self, msg: impl Into<String>) {
        self.0.push(msg.into());
    }

    fn require<T: Copy>(&mut self, field: &str, v: Option<T>) -> Option<T> {
        if v.is_none() {
            self.push(format!("{field}: missing"));
        }
        v
    }

    fn finite(&mut self, field: &str, v: f64) {
        if !v.is_finite() {
            self.push(format!("{field}: must be finite, got {v}"));
        }
    }

    fn positive(&mut self, field: &str, v: f64) {
        if !(v > 0.0 && v.is_finite()) {
            self.push(format!("{field}: must be > 0, got {v}"));
        }
    }

    fn non_negative(&mut self, field: &str, v: f64) {
        if !(v >= 0.0 && v.is_finite()) {
            self.push(format!("{field}: must be >= 0, got {v}"));
        }
    }

    fn vector(&mut self, field: &str, v: Vec3) {
        if !v.is_finite() {
            self.push(format!("{field}: components must be finite"));
        }
    }
}

impl RawScenario {
    fn validate(self) -> Result<Scenario> {
        let mut p = Problems::default();

        let m = match self.m {
            None => DEFAULT_M,
            Some(m) if m >= 3 => m as usize,
            Some(m) => {
                p.push(format!("m: must be >= 3, got {m}"));
                3
            }
        };
        let delta = self.delta.unwrap_or(0.0);
        p.non_negative("delta", delta);
        let omega = self.omega.unwrap_or(0.0);
        p.non_negative("omega", omega);
        let tol = self.tol.unwrap_or(DEFAULT_TOL);
        p.positive("tol", tol);
        let default_h = IntegratorConfig::for_mesh(m).h_init;
        let h_init = self.h_init.unwrap_or(default_h);
        p.positive("h_init", h_init);
        let max_steps = match self.max_steps {
            None => DEFAULT_MAX_STEPS,
            Some(n) if n >= 1 => n as usize,
            Some(n) => {
                p.push(format!("max_steps: must be >= 1, got {n}"));
                1
            }
        };
        let t_end = p.require("t_end", self.t_end).unwrap_or(1.0);
        p.positive("t_end", t_end);
        let output_dt = self.output_dt.unwrap_or(DEFAULT_OUTPUT_DT);
        p.positive("output_dt", output_dt);

        if self.curves.is_empty() {
            p.push("curves: at least one curve is required");
        }
        let curves: Vec<CurveSpec> = self
            .curves
            .into_iter()
            .enumerate()
            .filter_map(|(i, c)| c.validate(&format!("curves[{i}]"), &mut p))
            .collect();

        if p.0.is_empty() {
            Ok(Scenario {
                name: self.name.unwrap_or_else(|| "scenario".into()),
                m,
                delta,
                omega,
                flux_rule: self.flux_rule.unwrap_or_default(),
                tol,
                h_init,
                max_steps,
                t_end,
                output_dt,
                output_dir: self.output_dir.map(PathBuf::from),
                curves,
            })
        } else {
            Err(Error::Validation(p.0))
        }
    }
}

impl RawCurve {
    fn validate(self, at: &str, p: &mut Problems) -> Option<CurveSpec> {
        let field = |name: &str| format!("{at}.{name}");
        let a = p.require(&field("a"), self.a);
        let b = p.require(&field("b"), self.b);
        if let Some(a) = a {
            p.non_negative(&field("a"), a);
        }
        if let Some(b) = b {
            p.finite(&field("b"), b);
        }
        let kind = p.require(&field("kind"), self.kind)?;

        let shape = match kind {
            CurveKind::Explicit => {
                let nodes = match self.nodes {
                    Some(n) => n,
                    None => {
                        p.push(format!("{}: missing", field("nodes")));
                        return None;
                    }
                };
                if nodes.len() < 3 {
                    p.push(format!("{}: need at least 3 nodes, got {}", field("nodes"), nodes.len()));
                }
                if nodes.iter().any(|v| !v.is_finite()) {
                    p.push(format!("{}: components must be finite", field("nodes")));
                }
                for unused in [
                    ("center", self.center.is_some()),
                    ("radius", self.radius.is_some()),
                    ("amplitude", self.amplitude.is_some()),
                    ("frequency", self.frequency.is_some()),
                    ("mesh_warp", self.mesh_warp.is_some()),
                ] {
                    if unused.1 {
                        p.push(format!("{}: not allowed for explicit curves", field(unused.0)));
                    }
                }
                CurveShape::Explicit { nodes }
            }
            CurveKind::Circle | CurveKind::PerturbedCircle => {
                if self.nodes.is_some() {
                    p.push(format!("{}: only allowed for explicit curves", field("nodes")));
                }
                let center = p.require(&field("center"), self.center);
                let radius = p.require(&field("radius"), self.radius);
                if let Some(r) = radius {
                    p.positive(&field("radius"), r);
                }
                if let Some(c) = center {
                    p.vector(&field("center"), c);
                }
                let axis_u = self.axis_u.unwrap_or(Vec3::X);
                let axis_v = self.axis_v.unwrap_or(Vec3::Y);
                let unit = |v: Vec3| v.is_finite() && (v.norm() - 1.0).abs() < 1e-9;
                if !unit(axis_u) {
                    p.push(format!("{}: must be a unit vector", field("axis_u")));
                }
                if !unit(axis_v) {
                    p.push(format!("{}: must be a unit vector", field("axis_v")));
                }
                if !(axis_u.dot(axis_v).abs() < 1e-9) {
                    p.push(format!("{}: axis_u and axis_v must be orthogonal", at));
                }
                let (amplitude, frequency) = match kind {
                    CurveKind::PerturbedCircle => {
                        let amp = p.require(&field("amplitude"), self.amplitude);
                        let freq = p.require(&field("frequency"), self.frequency);
                        (amp.unwrap_or(0.0), freq.unwrap_or(0))
                    }
                    _ => {
                        if self.amplitude.is_some() || self.frequency.is_some() {
                            p.push(format!(
                                "{}: amplitude/frequency need kind = \"perturbed_circle\"",
                                at
                            ));
                        }
                        (0.0, 0)
                    }
                };
                p.finite(&field("amplitude"), amplitude);
                if !(0..=u32::MAX as i64).contains(&frequency) {
                    p.push(format!("{}: must be a non-negative integer", field("frequency")));
                }
                let mesh_warp = self.mesh_warp.unwrap_or(0.0);
                if !(mesh_warp.abs() < 1.0) {
                    p.push(format!("{}: must lie in (-1, 1), got {mesh_warp}", field("mesh_warp")));
                }
                CurveShape::Circle {
                    center: center.unwrap_or(Vec3::ZERO),
                    radius: radius.unwrap_or(1.0),
                    axis_u,
                    axis_v,
                    amplitude,
                    frequency: frequency.clamp(0, u32::MAX as i64) as u32,
                    orientation: self.orientation.unwrap_or_default(),
                    mesh_warp,
                }
            }
        };
        Some(CurveSpec {
            kind,
            shape,
            params: CurveParams::new(a.unwrap_or(0.0), b.unwrap_or(0.0)),
        })
    }
}

impl From<&Scenario> for RawScenario {
    fn from(s: &Scenario) -> Self {
        RawScenario {
            name: Some(s.name.clone()),
            m: Some(s.m as i64),
            delta: Some(s.delta),
            omega: Some(s.omega),
            flux_rule: Some(s.flux_rule),
            tol: Some(s.tol),
            h_init: Some(s.h_init),
            max_steps: Some(s.max_steps as i64),
            t_end: Some(s.t_end),
            output_dt: Some(s.output_dt),
            output_dir: s.output_dir.as_ref().map(|p| p.display().to_string()),
            curves: s.curves.iter().map(RawCurve::from).collect(),
        }
    }
}

impl From<&CurveSpec> for RawCurve {
    fn from(c: &CurveSpec) -> Self {
        let mut raw = RawCurve {
            kind: Some(c.kind),
            a: Some(c.params.a),
            b: Some(c.params.b),
            ..Default::default()
        };
        match &c.shape {
            CurveShape::Explicit { nodes } => raw.nodes = Some(nodes.clone()),
            &CurveShape::Circle {
                center,
                radius,
                axis_u,
                axis_v,
                amplitude,
                frequency,
                orientation,
                mesh_warp,
            } => {
                raw.center = Some(center);
                raw.radius = Some(radius);
                raw.axis_u = Some(axis_u);
                raw.axis_v = Some(axis_v);
                if c.kind == CurveKind::PerturbedCircle {
                    raw.amplitude = Some(amplitude);
                    raw.frequency = Some(frequency as i64);
                }
                raw.orientation = Some(orientation);
                raw.mesh_warp = Some(mesh_warp);
            }
        }
        raw
    }
}
