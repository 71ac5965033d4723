//! Physical model: two identical oscillators of frequency ω coupled through
//! `γ(t) = g + Δg·cos(Ωt)`, decoupled into the soft (`ε₋`) and stiff (`ε₊`)
//! normal modes with `ε∓² = ω² ∓ 2ωγ(t)`.
//!
//! Natural units with ħ = 1 throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which normal mode: `Minus` is the soft mode `ε₋`, `Plus` the stiff mode `ε₊`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeSelector {
    Minus,
    Plus,
}

impl ModeSelector {
    pub const BOTH: [ModeSelector; 2] = [ModeSelector::Minus, ModeSelector::Plus];

    /// −1 for the minus mode, +1 for the plus mode.
    pub fn sign(self) -> f64 {
        match self {
            ModeSelector::Minus => -1.0,
            ModeSelector::Plus => 1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ModeSelector::Minus => "minus",
            ModeSelector::Plus => "plus",
        }
    }
}

/// Drive schedule and static constants of the coupled-oscillator model.
///
/// Construction enforces `g > Δg ≥ 0`, so the coupling never changes sign and
/// `|γ(t)| = γ(t)`. `g + Δg` may exceed `ω/2`, in which case `ε₋²` dips
/// below zero during part of each period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDrive")]
pub struct DriveParameters {
    omega: f64,
    g: f64,
    delta_g: f64,
    #[serde(rename = "Omega")]
    drive_freq: f64,
    t0: f64,
}

// deserialization goes through the validating constructor
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDrive {
    omega: f64,
    g: f64,
    delta_g: f64,
    #[serde(rename = "Omega")]
    drive_freq: f64,
    t0: f64,
}

impl TryFrom<RawDrive> for DriveParameters {
    type Error = Error;

    fn try_from(r: RawDrive) -> Result<Self> {
        DriveParameters::new(r.omega, r.g, r.delta_g, r.drive_freq, r.t0)
    }
}

impl DriveParameters {
    pub fn new(omega: f64, g: f64, delta_g: f64, drive_freq: f64, t0: f64) -> Result<Self> {
        for (key, v) in [
            ("omega", omega),
            ("g", g),
            ("delta_g", delta_g),
            ("Omega", drive_freq),
            ("t0", t0),
        ] {
            if !v.is_finite() {
                return Err(Error::param(key, "must be a finite number"));
            }
        }
        if omega <= 0.0 {
            return Err(Error::param("omega", "must be positive"));
        }
        if drive_freq <= 0.0 {
            return Err(Error::param("Omega", "must be positive"));
        }
        if delta_g < 0.0 {
            return Err(Error::param("delta_g", "must be non-negative"));
        }
        if g < 0.0 {
            return Err(Error::param("g", "must be non-negative"));
        }
        // g = 0 is only admissible for the undriven case, where γ ≡ 0.
        if delta_g > 0.0 && g <= delta_g {
            return Err(Error::param(
                "delta_g",
                format!("must be smaller than g = {g} so that the coupling keeps its sign"),
            ));
        }
        Ok(Self {
            omega,
            g,
            delta_g,
            drive_freq,
            t0,
        })
    }

    /// Static coupling (`Δg = 0`) starting at `t0 = 0`.
    pub fn undriven(omega: f64, g: f64) -> Result<Self> {
        Self::new(omega, g, 0.0, 1.0, 0.0)
    }

    /// The common setup where the drive amplitude is a fixed fraction of `g`.
    pub fn with_ratio(omega: f64, g: f64, ratio: f64, drive_freq: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&ratio) {
            return Err(Error::param("delta_ratio", "must lie in [0, 1)"));
        }
        Self::new(omega, g, ratio * g, drive_freq, 0.0)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn delta_g(&self) -> f64 {
        self.delta_g
    }

    /// Drive angular frequency Ω.
    pub fn drive_freq(&self) -> f64 {
        self.drive_freq
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn drive_period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.drive_freq
    }

    /// `γ(t) = g + Δg·cos(Ωt)`.
    pub fn coupling_at(&self, t: f64) -> f64 {
        self.g + self.delta_g * (self.drive_freq * t).cos()
    }

    /// `ε∓²(t) = ω² ∓ 2ωγ(t)`; negative values are legal for the minus mode.
    pub fn mode_frequency_squared(&self, mode: ModeSelector, t: f64) -> f64 {
        self.omega * self.omega + mode.sign() * 2.0 * self.omega * self.coupling_at(t)
    }

    pub fn is_driven(&self) -> bool {
        self.delta_g != 0.0
    }
}

/// On-disk scenario description. Every key is optional so that a file can
/// override just the values it names.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub omega: Option<f64>,
    pub g: Option<f64>,
    pub delta_g: Option<f64>,
    #[serde(rename = "Omega")]
    pub drive_freq: Option<f64>,
    pub t0: Option<f64>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::param("config", format!("malformed JSON: {e}")))?;
        let obj = raw
            .as_object()
            .ok_or_else(|| Error::param("config", "top level must be an object"))?;
        let mut cfg = ScenarioConfig::default();
        for (key, value) in obj {
            let slot = match key.as_str() {
                "omega" => &mut cfg.omega,
                "g" => &mut cfg.g,
                "delta_g" => &mut cfg.delta_g,
                "Omega" => &mut cfg.drive_freq,
                "t0" => &mut cfg.t0,
                other => return Err(Error::param(other, "unknown key")),
            };
            let v = value
                .as_f64()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::param(key, "must be a finite decimal number"))?;
            *slot = Some(v);
        }
        Ok(cfg)
    }

    /// Resolves to validated parameters, using ω = Ω = 1, g = 0.4,
    /// Δg = 0.1·g and t₀ = 0 for anything left unspecified.
    pub fn resolve(&self) -> Result<DriveParameters> {
        let g = self.g.unwrap_or(0.4);
        DriveParameters::new(
            self.omega.unwrap_or(1.0),
            g,
            // g/10 rounds to the nearest decimal where 0.1·g may not
            self.delta_g.unwrap_or(g / 10.0),
            self.drive_freq.unwrap_or(1.0),
            self.t0.unwrap_or(0.0),
        )
    }
}
