//! Lewis–Riesenfeld auxiliary amplitudes `B∓(t)` of the two normal modes and
//! the quantities built from them: `ξ∓ = −iḂ/B`, characteristic lengths,
//! number-state wave functions and the joint ground-state density.
//!
//! The Lewis–Riesenfeld phases `θₙ(t)` are never computed. They are global
//! phases and drop out of every density, entropy and Wigner quantity here.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::integrator::{propagate_scalar, IntegratorConfig, OscState, ScalarTrajectory};
use crate::scenario::{DriveParameters, ModeSelector};

/// Trajectory evolution aborts when the relative Wronskian drift exceeds this.
pub const WRONSKIAN_ABORT: f64 = 1e-6;

/// Highest supported excitation number for [`mode_wavefunction`].
pub const MAX_EXCITATION: usize = 30;

/// Instantaneous mode energy as a principal complex square root.
pub fn mode_energy(params: &DriveParameters, mode: ModeSelector, t: f64) -> C64 {
    C64::new(params.mode_frequency_squared(mode, t), 0.0).sqrt()
}

/// Seeds the instantaneous ground state of one normal mode at `t₀`:
/// `B = i/√(2ε*)`, `Ḃ = −√(ε/2)`, principal branches throughout.
pub fn thermal_initial_conditions(params: &DriveParameters, mode: ModeSelector) -> Result<OscState> {
    let t0 = params.t0();
    let eps = mode_energy(params, mode, t0);
    if eps.norm() == 0.0 {
        return Err(Error::DegenerateMode { t: t0 });
    }
    let b = C64::i() / (2.0 * eps.conj()).sqrt();
    let bdot = -(eps / 2.0).sqrt();
    Ok(OscState::new(t0, b, bdot))
}

/// Relative deviation of the Wronskian from `i`, normalised by the size of
/// the bilinear terms so that it stays meaningful when `|B|` grows.
pub fn wronskian_error(s: &OscState) -> f64 {
    let scale = (2.0 * s.b.norm() * s.bdot.norm()).max(1.0);
    (s.wronskian() - C64::i()).norm() / scale
}

#[derive(Debug, Clone)]
pub struct AuxiliaryTrajectory {
    mode: ModeSelector,
    params: DriveParameters,
    traj: ScalarTrajectory,
    max_wronskian_error: f64,
}

impl AuxiliaryTrajectory {
    pub fn mode(&self) -> ModeSelector {
        self.mode
    }

    pub fn params(&self) -> &DriveParameters {
        &self.params
    }

    pub fn start(&self) -> f64 {
        self.traj.start()
    }

    pub fn end(&self) -> f64 {
        self.traj.end()
    }

    /// Largest relative Wronskian deviation seen at any accepted step.
    pub fn max_wronskian_error(&self) -> f64 {
        self.max_wronskian_error
    }

    pub fn samples(&self) -> impl ExactSizeIterator<Item = OscState> + '_ {
        self.traj.nodes()
    }

    pub fn initial(&self) -> OscState {
        self.traj.nodes().next().unwrap()
    }

    pub fn state_at(&self, t: f64) -> Result<OscState> {
        self.traj.state_at(t)
    }

    /// Largest `|B|` over the accepted steps.
    pub fn max_modulus(&self) -> f64 {
        self.samples().map(|s| s.b.norm()).fold(0.0, f64::max)
    }
}

/// Integrates `B̈ + ε²(t)B = 0` from the thermal seed up to `t_end`.
pub fn evolve_auxiliary(
    params: &DriveParameters,
    mode: ModeSelector,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<AuxiliaryTrajectory> {
    let seed = thermal_initial_conditions(params, mode)?;
    let p = *params;
    let traj = propagate_scalar(move |t| p.mode_frequency_squared(mode, t), seed, t_end, cfg)?;
    let mut max_err: f64 = 0.0;
    for s in traj.nodes() {
        let e = wronskian_error(&s);
        if e > WRONSKIAN_ABORT {
            return Err(Error::WronskianDrift { t: s.t, drift: e });
        }
        max_err = max_err.max(e);
    }
    Ok(AuxiliaryTrajectory {
        mode,
        params: *params,
        traj,
        max_wronskian_error: max_err,
    })
}

/// Both normal-mode trajectories of one scenario over a common interval.
#[derive(Debug, Clone)]
pub struct ModePair {
    pub minus: AuxiliaryTrajectory,
    pub plus: AuxiliaryTrajectory,
}

impl ModePair {
    pub fn evolve(params: &DriveParameters, t_end: f64, cfg: &IntegratorConfig) -> Result<Self> {
        let (minus, plus) = rayon::join(
            || evolve_auxiliary(params, ModeSelector::Minus, t_end, cfg),
            || evolve_auxiliary(params, ModeSelector::Plus, t_end, cfg),
        );
        Ok(Self {
            minus: minus?,
            plus: plus?,
        })
    }

    pub fn params(&self) -> &DriveParameters {
        self.minus.params()
    }

    pub fn get(&self, mode: ModeSelector) -> &AuxiliaryTrajectory {
        match mode {
            ModeSelector::Minus => &self.minus,
            ModeSelector::Plus => &self.plus,
        }
    }

    pub fn xi_at(&self, t: f64) -> Result<ModeXiPair> {
        xi_at(&self.minus, &self.plus, t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeXiPair {
    pub xi_minus: C64,
    pub xi_plus: C64,
    pub t: f64,
}

impl ModeXiPair {
    pub fn new(xi_minus: C64, xi_plus: C64, t: f64) -> Self {
        Self { xi_minus, xi_plus, t }
    }

    /// Static pair `ξ∓ = ε∓` for real mode energies.
    pub fn from_energies(eps_minus: f64, eps_plus: f64) -> Self {
        Self::new(C64::new(eps_minus, 0.0), C64::new(eps_plus, 0.0), 0.0)
    }
}

/// `−iḂ/B` for a single state.
pub fn xi_of(s: &OscState) -> Result<C64> {
    let modulus = s.b.norm();
    if modulus < 1e-300 {
        return Err(Error::SingularEvaluation { t: s.t, modulus });
    }
    Ok(-C64::i() * s.bdot / s.b)
}

pub fn xi_at(minus: &AuxiliaryTrajectory, plus: &AuxiliaryTrajectory, t: f64) -> Result<ModeXiPair> {
    Ok(ModeXiPair {
        xi_minus: xi_of(&minus.state_at(t)?)?,
        xi_plus: xi_of(&plus.state_at(t)?)?,
        t,
    })
}

/// `l(t) = √2·|B(t)|`.
pub fn characteristic_length(traj: &AuxiliaryTrajectory, t: f64) -> Result<f64> {
    Ok(SQRT_2 * traj.state_at(t)?.b.norm())
}

/// Physicists' Hermite polynomial by the three-term recurrence.
pub fn hermite(n: usize, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if n == 0 {
        return h0;
    }
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Number-state wave function `Φₙ(q, t)` from one auxiliary state.
pub fn wavefunction_from_state(s: &OscState, n: usize, q: f64) -> Result<C64> {
    if n > MAX_EXCITATION {
        return Err(Error::param(
            "n",
            format!("excitation {n} exceeds supported maximum {MAX_EXCITATION}"),
        ));
    }
    let modulus = s.b.norm();
    if modulus < 1e-300 {
        return Err(Error::SingularEvaluation { t: s.t, modulus });
    }
    let b2 = modulus * modulus;
    let log_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
    // (2^{-2n} / (2π|B|²(n!)²))^{1/4}
    let norm = (-(n as f64) * 2f64.ln() * 0.5 - 0.25 * (2.0 * PI * b2).ln() - 0.5 * log_fact).exp();
    let phase = (s.b.conj() / s.b).powu(n as u32);
    let big_q = q / (2.0 * b2).sqrt();
    let gauss = (C64::i() * s.bdot / (2.0 * s.b) * q * q).exp();
    Ok(norm * phase * hermite(n, big_q) * gauss)
}

pub fn mode_wavefunction(traj: &AuxiliaryTrajectory, n: usize, q: f64, t: f64) -> Result<C64> {
    wavefunction_from_state(&traj.state_at(t)?, n, q)
}

/// `|Ψ₀₀(x₁, x₂, t)|²` with `q∓ = (x₁ ∓ x₂)/√2`.
pub fn joint_ground_density(
    minus: &AuxiliaryTrajectory,
    plus: &AuxiliaryTrajectory,
    x1: f64,
    x2: f64,
    t: f64,
) -> Result<f64> {
    let sm = minus.state_at(t)?;
    let sp = plus.state_at(t)?;
    joint_ground_density_from_states(&sm, &sp, x1, x2)
}

pub fn joint_ground_density_from_states(sm: &OscState, sp: &OscState, x1: f64, x2: f64) -> Result<f64> {
    let qm = (x1 - x2) / SQRT_2;
    let qp = (x1 + x2) / SQRT_2;
    let fm = wavefunction_from_state(sm, 0, qm)?.norm_sqr();
    let fp = wavefunction_from_state(sp, 0, qp)?.norm_sqr();
    Ok(fm * fp)
}

/// Spread of the joint ground density along its two fixed principal
/// directions `x₁ = ∓x₂`: the standard deviations `|B∓|` and their ratio
/// (larger over smaller).
pub fn density_stretch(minus: &AuxiliaryTrajectory, plus: &AuxiliaryTrajectory, t: f64) -> Result<(f64, f64, f64)> {
    let sm = minus.state_at(t)?.b.norm();
    let sp = plus.state_at(t)?.b.norm();
    Ok((sm, sp, sm.max(sp) / sm.min(sp)))
}
