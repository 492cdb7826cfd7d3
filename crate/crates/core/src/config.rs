//! Sectioned `key = value` run configuration.
//!
//! ```text
//! # comment
//! [mesh]
//! kind = tensor          # tensor | random_smooth
//! imax = 65              # jmax defaults to imax
//! nmax = 320
//!
//! [limiter]
//! kind = sas             # none | barth_jespersen | sas
//! beta_steep = 4.2
//!
//! limiter.p = 2          # dotted keys work anywhere
//! ```
//!
//! Sections: `mesh` (kind, imax, jmax, nmax, gamma, seed, rerandomize),
//! `limiter` (kind, beta_smooth, beta_steep, p, epsilon), `field` (kind, a, b,
//! c, k, lo, hi) and `output` (dir, stride, vtk). Omitted keys take the
//! defaults of [`RunConfig::default`].

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::fields::FieldSpec;
use crate::meshgen::{MeshSeriesSpec, SeriesKind};
use crate::reconstruct::{LimiterConfig, LimiterKind};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown section [{section}]")]
    UnknownSection { line: usize, section: String },
    #[error("line {line}: unknown key `{key}` in [{section}]")]
    UnknownKey {
        line: usize,
        section: String,
        key: String,
    },
    #[error("line {line}: [{section}] {key} = `{value}`: {message}")]
    BadValue {
        line: usize,
        section: String,
        key: String,
        value: String,
        message: String,
    },
    #[error("[{section}] {message}")]
    Invalid { section: &'static str, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Dump every `stride`-th intermediate step; 0 disables intermediate dumps.
    pub stride: usize,
    pub vtk: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            stride: 0,
            vtk: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mesh: MeshSeriesSpec,
    pub limiter: LimiterConfig,
    pub field: FieldSpec,
    /// Transition band used for the interface width.
    pub lo: f64,
    pub hi: f64,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mesh: MeshSeriesSpec::default(),
            limiter: LimiterConfig::default(),
            field: FieldSpec::Sine,
            lo: 0.05,
            hi: 0.95,
            output: OutputConfig::default(),
        }
    }
}

impl FromStr for RunConfig {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_config(s)
    }
}

const SECTIONS: [&str; 4] = ["mesh", "limiter", "field", "output"];

struct Entry<'a> {
    line: usize,
    section: String,
    key: &'a str,
    value: &'a str,
}

impl Entry<'_> {
    fn bad(&self, message: impl Into<String>) -> ConfigError {
        ConfigError::BadValue {
            line: self.line,
            section: self.section.clone(),
            key: self.key.to_string(),
            value: self.value.to_string(),
            message: message.into(),
        }
    }

    fn parse<T: FromStr>(&self, what: &str) -> Result<T, ConfigError> {
        self.value
            .parse()
            .map_err(|_| self.bad(format!("expected {what}")))
    }

    fn boolean(&self) -> Result<bool, ConfigError> {
        match self.value.to_ascii_lowercase().as_str() {
            "true" | "yes" | "on" | "1" => Ok(true),
            "false" | "no" | "off" | "0" => Ok(false),
            _ => Err(self.bad("expected a boolean")),
        }
    }
}

#[derive(Default)]
struct FieldKeys {
    kind: Option<String>,
    a: Option<f64>,
    b: Option<f64>,
    c: Option<f64>,
    k: Option<f64>,
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut jmax_set = false;
    let mut field = FieldKeys::default();
    let mut section: Option<String> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                line,
                message: format!("unterminated section header `{content}`"),
            })?;
            let name = name.trim().to_string();
            if !SECTIONS.contains(&name.as_str()) {
                return Err(ConfigError::UnknownSection { line, section: name });
            }
            section = Some(name);
            continue;
        }
        let (lhs, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let (lhs, value) = (lhs.trim(), value.trim());
        let (sec, key) = match lhs.split_once('.') {
            Some((s, k)) => {
                if !SECTIONS.contains(&s) {
                    return Err(ConfigError::UnknownSection {
                        line,
                        section: s.to_string(),
                    });
                }
                (s.to_string(), k)
            }
            None => match &section {
                Some(s) => (s.clone(), lhs),
                None => {
                    return Err(ConfigError::Syntax {
                        line,
                        message: format!("key `{lhs}` outside any section"),
                    })
                }
            },
        };
        let e = Entry {
            line,
            section: sec,
            key,
            value,
        };
        match (e.section.as_str(), key) {
            ("mesh", "kind") => {
                cfg.mesh.kind = match value {
                    "tensor" => SeriesKind::Tensor,
                    "random_smooth" | "random" => SeriesKind::RandomSmooth,
                    _ => return Err(e.bad("expected tensor or random_smooth")),
                }
            }
            ("mesh", "imax") => cfg.mesh.imax = e.parse("an integer")?,
            ("mesh", "jmax") => {
                cfg.mesh.jmax = e.parse("an integer")?;
                jmax_set = true;
            }
            ("mesh", "nmax") => cfg.mesh.nmax = e.parse("an integer")?,
            ("mesh", "gamma") => cfg.mesh.gamma = e.parse("a number")?,
            ("mesh", "seed") => cfg.mesh.seed = e.parse("an unsigned integer")?,
            ("mesh", "rerandomize") => cfg.mesh.rerandomize = e.boolean()?,
            ("limiter", "kind") => {
                cfg.limiter.kind = match value {
                    "none" => LimiterKind::None,
                    "barth_jespersen" | "bj" => LimiterKind::BarthJespersen,
                    "sas" => LimiterKind::Sas,
                    _ => return Err(e.bad("expected none, barth_jespersen or sas")),
                }
            }
            ("limiter", "beta_smooth") => cfg.limiter.beta_smooth = e.parse("a number")?,
            ("limiter", "beta_steep") => cfg.limiter.beta_steep = e.parse("a number")?,
            ("limiter", "p") => cfg.limiter.p = e.parse("a number")?,
            ("limiter", "epsilon") => cfg.limiter.epsilon = e.parse("a number")?,
            ("field", "kind") => {
                if !["sine", "shock", "affine", "constant"].contains(&value) {
                    return Err(e.bad("expected sine, shock, affine or constant"));
                }
                field.kind = Some(value.to_string());
            }
            ("field", "a") => field.a = Some(e.parse("a number")?),
            ("field", "b") => field.b = Some(e.parse("a number")?),
            ("field", "c") => field.c = Some(e.parse("a number")?),
            ("field", "k") => field.k = Some(e.parse("a number")?),
            ("field", "lo") => cfg.lo = e.parse("a number")?,
            ("field", "hi") => cfg.hi = e.parse("a number")?,
            ("output", "dir") => cfg.output.dir = PathBuf::from(value),
            ("output", "stride") => cfg.output.stride = e.parse("an integer")?,
            ("output", "vtk") => cfg.output.vtk = e.boolean()?,
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    section: e.section.clone(),
                    key: key.to_string(),
                })
            }
        }
    }
    if !jmax_set {
        cfg.mesh.jmax = cfg.mesh.imax;
    }
    cfg.field = match field.kind.as_deref() {
        None | Some("sine") => FieldSpec::Sine,
        Some("shock") => FieldSpec::Shock,
        Some("affine") => FieldSpec::Affine {
            a: field.a.unwrap_or(0.0),
            b: field.b.unwrap_or(0.0),
            c: field.c.unwrap_or(0.0),
        },
        Some(_) => FieldSpec::Constant(field.k.unwrap_or(1.0)),
    };
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.mesh.validate().map_err(|e| ConfigError::Invalid {
            section: "mesh",
            message: e.to_string(),
        })?;
        self.limiter.validate().map_err(|e| ConfigError::Invalid {
            section: "limiter",
            message: e.to_string(),
        })?;
        let finite = match self.field {
            FieldSpec::Affine { a, b, c } => a.is_finite() && b.is_finite() && c.is_finite(),
            FieldSpec::Constant(k) => k.is_finite(),
            _ => true,
        };
        if !finite {
            return Err(ConfigError::Invalid {
                section: "field",
                message: "field coefficients must be finite".into(),
            });
        }
        if !(self.lo < self.hi) {
            return Err(ConfigError::Invalid {
                section: "field",
                message: format!("lo ({}) must be below hi ({})", self.lo, self.hi),
            });
        }
        Ok(())
    }

    /// Canonical text form; parsing it gives back an equal configuration.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let m = &self.mesh;
        let _ = writeln!(s, "[mesh]");
        let _ = writeln!(s, "kind = {}", m.kind.name());
        let _ = writeln!(s, "imax = {}\njmax = {}\nnmax = {}", m.imax, m.jmax, m.nmax);
        let _ = writeln!(s, "gamma = {}\nseed = {}\nrerandomize = {}", m.gamma, m.seed, m.rerandomize);
        let l = &self.limiter;
        let _ = writeln!(s, "\n[limiter]");
        let _ = writeln!(s, "kind = {}", l.kind.name());
        let _ = writeln!(s, "beta_smooth = {}\nbeta_steep = {}", l.beta_smooth, l.beta_steep);
        let _ = writeln!(s, "p = {}\nepsilon = {:e}", l.p, l.epsilon);
        let _ = writeln!(s, "\n[field]");
        let _ = writeln!(s, "kind = {}", self.field.name());
        match self.field {
            FieldSpec::Affine { a, b, c } => {
                let _ = writeln!(s, "a = {a}\nb = {b}\nc = {c}");
            }
            FieldSpec::Constant(k) => {
                let _ = writeln!(s, "k = {k}");
            }
            _ => {}
        }
        let _ = writeln!(s, "lo = {}\nhi = {}", self.lo, self.hi);
        let o = &self.output;
        let _ = writeln!(s, "\n[output]");
        let _ = writeln!(s, "dir = {}", o.dir.display());
        let _ = writeln!(s, "stride = {}\nvtk = {}", o.stride, o.vtk);
        s
    }
}
