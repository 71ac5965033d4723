//! Reduced Gaussian state of one oscillator after tracing out its partner:
//! density matrix, linear and von Neumann entropies, and Wigner function.
//!
//! With `ξ∓ = −iḂ∓/B∓` the reduced density matrix is
//! `ρ(x', x) = Λ·exp(−Re α (x'² + x²) + β x x')·exp(i Im α (x'² − x²))`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::auxiliary::{ModePair, ModeXiPair};
use crate::error::{Error, Result};
use crate::mathieu::linspace;
use crate::scenario::{DriveParameters, ModeSelector};

/// `(α, β, Λ)` of the reduced density matrix for the symmetric rotation
/// `c = s = 1/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedGaussianParams {
    pub alpha: C64,
    pub beta: f64,
    pub lambda: f64,
}

pub fn reduced_params(xi: &ModeXiPair) -> Result<ReducedGaussianParams> {
    reduced_params_rotated(xi, FRAC_1_SQRT_2, FRAC_1_SQRT_2)
}

pub(crate) fn reduced_params_rotated(xi: &ModeXiPair, c: f64, s: f64) -> Result<ReducedGaussianParams> {
    let (xm, xp) = (xi.xi_minus, xi.xi_plus);
    if !(xm.re > 0.0) {
        return Err(Error::Domain(format!("Re ξ₋ = {} must be positive", xm.re)));
    }
    if !(xp.re > 0.0) {
        return Err(Error::Domain(format!("Re ξ₊ = {} must be positive", xp.re)));
    }
    let (c2, s2) = (c * c, s * s);
    let denom = xm.re * c2 + xp.re * s2;
    let diff = xm - xp;
    let alpha = (xm.conj() * s2 + xp.conj() * c2) / 2.0 - c2 * s2 * diff.conj().powu(2) / (4.0 * denom);
    let beta = c2 * s2 * diff.norm_sqr() / (2.0 * denom);
    let lambda = (xm.re * xp.re / (PI * denom)).sqrt();
    Ok(ReducedGaussianParams { alpha, beta, lambda })
}

impl ReducedGaussianParams {
    /// `4(Re α)² − β²`, the quantity under the square root in the purity.
    pub fn entropy_discriminant(&self) -> f64 {
        4.0 * self.alpha.re * self.alpha.re - self.beta * self.beta
    }

    /// `2 Re α + β`, the Wigner width denominator.
    pub fn wigner_denominator(&self) -> f64 {
        2.0 * self.alpha.re + self.beta
    }
}

pub fn reduced_density(p: &ReducedGaussianParams, x2p: f64, x2: f64) -> C64 {
    let real = -p.alpha.re * (x2p * x2p + x2 * x2) + p.beta * x2 * x2p;
    let imag = p.alpha.im * (x2p * x2p - x2 * x2);
    p.lambda * C64::new(real, imag).exp()
}

/// `L = 1 − πΛ²/√(4(Re α)² − β²)`.
pub fn linear_entropy(p: &ReducedGaussianParams) -> Result<f64> {
    let disc = p.entropy_discriminant();
    if !(disc > 0.0) {
        return Err(Error::Domain(format!(
            "4(Re α)² − β² = {disc:e} must be positive"
        )));
    }
    Ok(1.0 - PI * p.lambda * p.lambda / disc.sqrt())
}

/// Single-mode Gaussian entropy from the purity via the symplectic
/// eigenvalue `ν = 1/(2·purity)`.
pub fn von_neumann_entropy(purity: f64) -> Result<f64> {
    if !(purity > 0.0 && purity <= 1.0 + 1e-12) {
        return Err(Error::Domain(format!("purity {purity} outside (0, 1]")));
    }
    let nu = 0.5 / purity.min(1.0);
    let xlogx = |x: f64| if x <= 0.0 { 0.0 } else { x * x.ln() };
    Ok(xlogx(nu + 0.5) - xlogx(nu - 0.5))
}

pub fn wigner(p: &ReducedGaussianParams, q: f64, p_mom: f64) -> Result<f64> {
    let den = p.wigner_denominator();
    let quad = 4.0 * p.alpha.norm_sqr() - p.beta * p.beta;
    if !(den > 0.0) {
        return Err(Error::Domain(format!("2 Re α + β = {den:e} must be positive")));
    }
    if !(quad > 0.0) {
        return Err(Error::Domain(format!("4|α|² − β² = {quad:e} must be positive")));
    }
    Ok(wigner_unchecked(p, den, quad, q, p_mom))
}

fn wigner_unchecked(p: &ReducedGaussianParams, den: f64, quad: f64, q: f64, p_mom: f64) -> f64 {
    let pref = p.lambda / (PI * den).sqrt();
    pref * ((4.0 * p.alpha.im * q * p_mom - q * q * quad - p_mom * p_mom) / den).exp()
}

/// Closed-form Wigner function of the undriven model,
/// `(2√(ε₋ε₊)/(π(ε₋+ε₊)))·exp(−2(ε₋ε₊q² + p²)/(ε₋+ε₊))`.
pub fn wigner_static(params: &DriveParameters, q: f64, p_mom: f64) -> Result<f64> {
    if params.is_driven() {
        return Err(Error::param("delta_g", "static Wigner function needs delta_g = 0"));
    }
    let e2m = params.mode_frequency_squared(ModeSelector::Minus, 0.0);
    if !(e2m > 0.0) {
        return Err(Error::param(
            "g",
            format!("g = {} must be below the critical coupling ω/2", params.g()),
        ));
    }
    let em = e2m.sqrt();
    let ep = params.mode_frequency_squared(ModeSelector::Plus, 0.0).sqrt();
    let sum = em + ep;
    Ok(2.0 * (em * ep).sqrt() / (PI * sum) * (-2.0 * (em * ep * q * q + p_mom * p_mom) / sum).exp())
}

/// `2π∫∫W² dq dp`, evaluated from the Wigner quadratic form.
///
/// `W = N·exp(−vᵀ K v)` with `v = (q, p)` gives `∫∫W² = N²π/(2√det K)`.
pub fn purity_from_wigner(p: &ReducedGaussianParams) -> Result<f64> {
    let den = p.wigner_denominator();
    if !(den > 0.0) {
        return Err(Error::Domain(format!("2 Re α + β = {den:e} must be positive")));
    }
    let kqq = (4.0 * p.alpha.norm_sqr() - p.beta * p.beta) / den;
    let kpp = 1.0 / den;
    let kqp = -2.0 * p.alpha.im / den;
    let det = kqq * kpp - kqp * kqp;
    if !(det > 0.0) {
        return Err(Error::Domain(format!("Wigner quadratic form not positive (det {det:e})")));
    }
    let norm_sq = p.lambda * p.lambda / (PI * den);
    Ok(2.0 * PI * norm_sq * PI / (2.0 * det.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropySample {
    pub t: f64,
    pub linear_entropy: f64,
    pub purity: f64,
}

pub fn entropy_at(pair: &ModePair, t: f64) -> Result<EntropySample> {
    let p = reduced_params(&pair.xi_at(t)?)?;
    let l = linear_entropy(&p)?;
    Ok(EntropySample {
        t,
        linear_entropy: l,
        purity: 1.0 - l,
    })
}

pub fn entropy_series(pair: &ModePair, times: &[f64]) -> Result<Vec<EntropySample>> {
    times.iter().map(|&t| entropy_at(pair, t)).collect()
}

/// Row-major Wigner values: `p` indexes rows, `q` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub t: f64,
    pub q_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub values: Vec<f64>,
}

impl WignerGrid {
    pub fn at(&self, q_idx: usize, p_idx: usize) -> f64 {
        self.values[p_idx * self.q_values.len() + q_idx]
    }

    pub fn cell_area(&self) -> f64 {
        let dq = self.q_values[1] - self.q_values[0];
        let dp = self.p_values[1] - self.p_values[0];
        dq * dp
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Riemann sum of the grid.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_area()
    }

    /// Area of the cells where `W > W_max/e`.
    pub fn support_area(&self) -> f64 {
        let threshold = self.max() / std::f64::consts::E;
        self.values.iter().filter(|&&w| w > threshold).count() as f64 * self.cell_area()
    }
}

pub fn wigner_grid_from_params(
    p: &ReducedGaussianParams,
    t: f64,
    q_range: (f64, f64),
    p_range: (f64, f64),
    resolution: (usize, usize),
) -> Result<WignerGrid> {
    if resolution.0 < 2 || resolution.1 < 2 {
        return Err(Error::param("resolution", "need at least 2 points per axis"));
    }
    if !(q_range.1 > q_range.0 && p_range.1 > p_range.0) {
        return Err(Error::param("range", "need lo < hi"));
    }
    // validates the domain once
    wigner(p, 0.0, 0.0)?;
    let den = p.wigner_denominator();
    let quad = 4.0 * p.alpha.norm_sqr() - p.beta * p.beta;
    let q_values = linspace(q_range.0, q_range.1, resolution.0);
    let p_values = linspace(p_range.0, p_range.1, resolution.1);
    let nq = q_values.len();
    let values = (0..nq * p_values.len())
        .into_par_iter()
        .map(|idx| wigner_unchecked(p, den, quad, q_values[idx % nq], p_values[idx / nq]))
        .collect();
    Ok(WignerGrid {
        t,
        q_values,
        p_values,
        values,
    })
}

pub fn wigner_grid(
    pair: &ModePair,
    t: f64,
    q_range: (f64, f64),
    p_range: (f64, f64),
    resolution: (usize, usize),
) -> Result<WignerGrid> {
    let p = reduced_params(&pair.xi_at(t)?)?;
    wigner_grid_from_params(&p, t, q_range, p_range, resolution)
}
