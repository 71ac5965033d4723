//! Run manifests, CSV tables and atomic file output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::integrator::IntegratorConfig;
use crate::mathieu::DriveAmplitude;
use crate::scenario::DriveParameters;

use super::CliError;

pub const TOOL: &str = "paramosc";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Fully resolved per-subcommand settings. Together with the scenario and
/// the integrator configuration this determines every output byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Settings {
    StabilityChart {
        a_range: [f64; 2],
        b_range: [f64; 2],
        resolution: usize,
    },
    ModeLine {
        g_range: [f64; 2],
        samples: usize,
        amplitude: DriveAmplitude,
    },
    Entropy {
        omega_t_max: f64,
        samples: usize,
    },
    Wigner {
        omega_t: Vec<f64>,
        q_range: [f64; 2],
        p_range: [f64; 2],
        resolution: usize,
    },
    Density {
        omega_t: Vec<f64>,
        /// `None` sizes the window from the widest mode at the requested times.
        x_range: Option<[f64; 2]>,
        resolution: usize,
    },
    GeneralCheck {
        periods: f64,
        drift_tol: f64,
        path_tol: f64,
        corrupt_seed: bool,
    },
}

impl Settings {
    pub fn subcommand(&self) -> &'static str {
        match self {
            Settings::StabilityChart { .. } => "stability-chart",
            Settings::ModeLine { .. } => "mode-line",
            Settings::Entropy { .. } => "entropy",
            Settings::Wigner { .. } => "wigner",
            Settings::Density { .. } => "density",
            Settings::GeneralCheck { .. } => "general-check",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub params: DriveParameters,
    pub integrator: IntegratorConfig,
    pub out_dir: PathBuf,
    pub settings: Settings,
}

impl RunManifest {
    pub fn new(params: DriveParameters, integrator: IntegratorConfig, out_dir: PathBuf, settings: Settings) -> Self {
        Self {
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
            subcommand: settings.subcommand().to_string(),
            params,
            integrator,
            out_dir,
            settings,
        }
    }

    /// SHA-256 over everything except the output directory, so a replay into
    /// another directory produces identical files.
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("manifest serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("out_dir");
        }
        let text = serde_json::to_string(&v).expect("manifest serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("invalid manifest: {e}")))
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct OutputFile {
    pub name: String,
    pub contents: Vec<u8>,
}

/// A CSV file under construction: `#` comment lines, a header row, records.
pub struct Table {
    comments: Vec<String>,
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(manifest: &RunManifest, header: &[&str]) -> Self {
        let p = &manifest.params;
        let comments = vec![
            format!("{} {} {}", manifest.tool, manifest.version, manifest.subcommand),
            format!("manifest_sha256: {}", manifest.hash()),
            format!(
                "omega={} g={} delta_g={} Omega={} t0={}",
                p.omega(),
                p.g(),
                p.delta_g(),
                p.drive_freq(),
                p.t0()
            ),
        ];
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Self { comments, writer }
    }

    pub fn comment(mut self, line: impl Into<String>) -> Self {
        self.comments.push(line.into());
        self
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("in-memory write");
    }

    pub fn floats(&mut self, values: &[f64]) {
        self.row(values.iter().map(|&v| fmt_f64(v)));
    }

    pub fn finish(self, name: impl Into<String>) -> OutputFile {
        let mut contents = Vec::new();
        for c in &self.comments {
            contents.extend_from_slice(b"# ");
            contents.extend_from_slice(c.as_bytes());
            contents.push(b'\n');
        }
        contents.extend(self.writer.into_inner().expect("in-memory flush"));
        OutputFile {
            name: name.into(),
            contents,
        }
    }
}

fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> std::io::Result<()> {
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let mut f = fs::File::create(&tmp)?;
    f.write_all(contents)?;
    f.sync_all()?;
    drop(f);
    fs::rename(&tmp, dir.join(name))
}

/// Writes all files, then the manifest last.
pub fn write_outputs(manifest: &RunManifest, files: &[OutputFile]) -> Result<(), CliError> {
    let dir = &manifest.out_dir;
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    for f in files {
        write_atomic(dir, &f.name, &f.contents).map_err(io)?;
    }
    write_atomic(dir, "manifest.json", manifest.to_json().as_bytes()).map_err(io)
}

/// `32` → `32`, `12.5` → `12.5`; used in per-time file names.
pub fn time_tag(omega_t: f64) -> String {
    format!("{omega_t}")
}
