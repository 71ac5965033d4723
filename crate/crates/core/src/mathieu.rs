//! Canonical Mathieu form `f'' + (a − 2b·cos 2τ)f = 0`, monodromy matrices,
//! Floquet exponents and stability scans.
//!
//! Physical time maps to canonical time through `τ = Ωt/2`, so one drive
//! period is the canonical period π. Exponents are reported per unit canonical
//! time; [`FloquetResult::physical_exponent`] rescales by `Ω/2`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{propagate_scalar, IntegratorConfig, OscState};
use crate::scenario::{DriveParameters, ModeSelector};

/// `||tr M| − 2|` below this is reported as marginal.
pub const CLASSIFICATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CanonicalMathieuParams {
    pub a: f64,
    pub b: f64,
}

/// `a∓ = 4(ω² ∓ 2ωg)/Ω²`, `b∓ = ±4ωΔg/Ω²`.
pub fn canonical_params(params: &DriveParameters, mode: ModeSelector) -> CanonicalMathieuParams {
    canonical_from(params.omega(), params.g(), params.delta_g(), params.drive_freq(), mode)
}

fn canonical_from(omega: f64, g: f64, delta_g: f64, drive: f64, mode: ModeSelector) -> CanonicalMathieuParams {
    let s = mode.sign();
    let w2 = drive * drive;
    CanonicalMathieuParams {
        a: 4.0 * (omega * omega + s * 2.0 * omega * g) / w2,
        b: -s * 4.0 * omega * delta_g / w2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FloquetResult {
    /// Fundamental matrix after one canonical period, `[[f₁, f₂], [f₁', f₂']]`.
    pub monodromy: [[f64; 2]; 2],
    pub trace: f64,
    pub det: f64,
    /// `arccos(tr M / 2)/π`, with `Im F ≥ 0`.
    pub exponent: C64,
    pub stable: bool,
    pub marginal: bool,
    pub multiplier_moduli: [f64; 2],
}

impl FloquetResult {
    fn from_matrix(m: [[f64; 2]; 2]) -> Self {
        let trace = m[0][0] + m[1][1];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let mut exponent = C64::new(trace / 2.0, 0.0).acos() / PI;
        if exponent.im < 0.0 {
            exponent = exponent.conj();
        }
        if exponent.im == 0.0 {
            // normalise the sign of an exactly-zero imaginary part
            exponent.im = 0.0;
        }
        let disc = C64::new(trace * trace - 4.0 * det, 0.0).sqrt();
        let mu1 = (C64::new(trace, 0.0) + disc) / 2.0;
        let mu2 = (C64::new(trace, 0.0) - disc) / 2.0;
        let excess = trace.abs() - 2.0;
        Self {
            monodromy: m,
            trace,
            det,
            exponent,
            stable: excess <= CLASSIFICATION_TOL,
            marginal: excess.abs() <= CLASSIFICATION_TOL,
            multiplier_moduli: [mu1.norm(), mu2.norm()],
        }
    }

    /// Exponent per unit physical time for drive frequency Ω.
    pub fn physical_exponent(&self, drive_freq: f64) -> C64 {
        self.exponent * (drive_freq / 2.0)
    }
}

/// Integrates both fundamental solutions over one canonical period.
pub fn monodromy(p: CanonicalMathieuParams, cfg: &IntegratorConfig) -> Result<FloquetResult> {
    if !(p.a.is_finite() && p.b.is_finite()) {
        return Err(Error::Domain(format!("non-finite Mathieu parameters ({}, {})", p.a, p.b)));
    }
    // Real equation: the real part carries the (1, 0) column and the imaginary
    // part the (0, 1) column of one complex integration.
    let seed = OscState::new(0.0, C64::new(1.0, 0.0), C64::new(0.0, 1.0));
    let traj = propagate_scalar(|tau| p.a - 2.0 * p.b * (2.0 * tau).cos(), seed, PI, cfg)?;
    let end = traj.last();
    Ok(FloquetResult::from_matrix([
        [end.b.re, end.b.im],
        [end.bdot.re, end.bdot.im],
    ]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModePoint {
    pub params: CanonicalMathieuParams,
    pub floquet: FloquetResult,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeLinePoint {
    pub g: f64,
    pub minus: ModePoint,
    pub plus: ModePoint,
}

impl ModeLinePoint {
    pub fn mode(&self, mode: ModeSelector) -> &ModePoint {
        match mode {
            ModeSelector::Minus => &self.minus,
            ModeSelector::Plus => &self.plus,
        }
    }
}

/// How the drive amplitude follows the static coupling along a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveAmplitude {
    /// `Δg = r·g`.
    Ratio(f64),
    /// Fixed `Δg`, independent of g.
    Fixed(f64),
}

impl DriveAmplitude {
    pub fn at(self, g: f64) -> f64 {
        match self {
            DriveAmplitude::Ratio(r) => r * g,
            DriveAmplitude::Fixed(dg) => dg,
        }
    }
}

/// Evaluates both modes for one static coupling.
pub fn mode_point(
    omega: f64,
    drive_freq: f64,
    amplitude: DriveAmplitude,
    g: f64,
    cfg: &IntegratorConfig,
) -> Result<ModeLinePoint> {
    let dg = amplitude.at(g);
    let eval = |mode| -> Result<ModePoint> {
        let params = canonical_from(omega, g, dg, drive_freq, mode);
        Ok(ModePoint {
            params,
            floquet: monodromy(params, cfg)?,
        })
    };
    Ok(ModeLinePoint {
        g,
        minus: eval(ModeSelector::Minus)?,
        plus: eval(ModeSelector::Plus)?,
    })
}

/// Samples the straight line `g ↦ (a∓(g), b∓(g))` at `n` evenly spaced
/// couplings. Only ω and Ω are taken from `params`.
pub fn mode_line(
    params: &DriveParameters,
    amplitude: DriveAmplitude,
    g_range: (f64, f64),
    n: usize,
    cfg: &IntegratorConfig,
) -> Result<Vec<ModeLinePoint>> {
    let (g_min, g_max) = g_range;
    if !(g_min >= 0.0 && g_max > g_min && g_max.is_finite()) {
        return Err(Error::param("g_range", "need 0 <= g_min < g_max"));
    }
    if n < 2 {
        return Err(Error::param("n", "need at least two samples"));
    }
    let step = (g_max - g_min) / (n - 1) as f64;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let g = if i + 1 == n { g_max } else { g_min + i as f64 * step };
            mode_point(params.omega(), params.drive_freq(), amplitude, g, cfg)
        })
        .collect()
}

/// Maximal runs of consecutive unstable samples, as inclusive index ranges.
pub fn unstable_runs(line: &[ModeLinePoint], mode: ModeSelector) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut open: Option<usize> = None;
    for (i, pt) in line.iter().enumerate() {
        let unstable = !pt.mode(mode).floquet.stable;
        match (unstable, open) {
            (true, None) => open = Some(i),
            (false, Some(s)) => {
                runs.push((s, i - 1));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        runs.push((s, line.len() - 1));
    }
    runs
}

/// Locates a root of `|tr M(x)| − 2` in `[lo, hi]` by bisection. The bracket
/// must straddle a stability transition.
pub fn bisect_transition<F>(mut trace_at: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let excess = |tr: f64| tr.abs() - 2.0;
    let mut f_lo = excess(trace_at(lo)?);
    let f_hi = excess(trace_at(hi)?);
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Domain(format!(
            "bracket [{lo}, {hi}] does not straddle a stability boundary"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = excess(trace_at(mid)?);
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Boundary in g of the stability band on one mode.
pub fn bisect_mode_boundary(
    omega: f64,
    drive_freq: f64,
    amplitude: DriveAmplitude,
    mode: ModeSelector,
    bracket: (f64, f64),
    tol: f64,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    bisect_transition(
        |g| {
            let p = canonical_from(omega, g, amplitude.at(g), drive_freq, mode);
            Ok(monodromy(p, cfg)?.trace)
        },
        bracket.0,
        bracket.1,
        tol,
    )
}

/// Boundary in `a` at fixed `b`.
pub fn bisect_a_boundary(b: f64, bracket: (f64, f64), tol: f64, cfg: &IntegratorConfig) -> Result<f64> {
    bisect_transition(
        |a| Ok(monodromy(CanonicalMathieuParams { a, b }, cfg)?.trace),
        bracket.0,
        bracket.1,
        tol,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChartCell {
    pub a: f64,
    pub b: f64,
    pub stable: bool,
    pub marginal: bool,
    pub im_f: f64,
}

/// Stability over a rectangular `(a, b)` grid.
///
/// Cells are row-major with `b` indexing rows and `a` columns, both axes
/// including their end points.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityChart {
    pub a_values: Vec<f64>,
    pub b_values: Vec<f64>,
    pub cells: Vec<ChartCell>,
}

impl StabilityChart {
    pub fn cell(&self, a_idx: usize, b_idx: usize) -> &ChartCell {
        &self.cells[b_idx * self.a_values.len() + a_idx]
    }
}

pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + i as f64 * step })
        .collect()
}

pub fn stability_chart(
    a_range: (f64, f64),
    b_range: (f64, f64),
    resolution: (usize, usize),
    cfg: &IntegratorConfig,
) -> Result<StabilityChart> {
    let finite = [a_range.0, a_range.1, b_range.0, b_range.1]
        .iter()
        .all(|v| v.is_finite());
    if !finite || a_range.1 <= a_range.0 || b_range.1 <= b_range.0 {
        return Err(Error::param("range", "need finite ranges with lo < hi"));
    }
    if resolution.0 < 2 || resolution.1 < 2 {
        return Err(Error::param("resolution", "need at least 2 points per axis"));
    }
    let a_values = linspace(a_range.0, a_range.1, resolution.0);
    let b_values = linspace(b_range.0, b_range.1, resolution.1);
    let na = a_values.len();
    let cells = (0..na * b_values.len())
        .into_par_iter()
        .map(|idx| {
            let (a, b) = (a_values[idx % na], b_values[idx / na]);
            let f = monodromy(CanonicalMathieuParams { a, b }, cfg)?;
            Ok(ChartCell {
                a,
                b,
                stable: f.stable,
                marginal: f.marginal,
                im_f: f.exponent.im,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StabilityChart {
        a_values,
        b_values,
        cells,
    })
}
