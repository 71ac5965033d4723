//! Auxiliary-matrix solution for the general two-oscillator quadratic
//! Hamiltonian `H = ½Σ(μᵢpᵢ² + νᵢxᵢ²) + γ x₁x₂`.
//!
//! The ladder operators `aᵢ = Σₖ(A_ik xₖ + B_ik pₖ)` stay canonical as long as
//! the `B_ik` obey the coupled classical equations, `Ḃ_ik = −μₖA_ik`, and the
//! three bilinear constraints
//!
//! * WC1: `Σₖ (Ḃ_mk B_nk − Ḃ_nk B_mk)/μₖ = 0`
//! * WC2: the complex conjugate of WC1
//! * WC3: `Σₖ (Ḃ_mk B*_nk/μₖ − B_mk Ḃ*_nk/μₖ*) = iδₘₙ`
//!
//! are conserved.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C64;

use crate::auxiliary::thermal_initial_conditions;
use crate::error::{Error, Result};
use crate::integrator::{propagate_coupled, CoupledCoefficients, CoupledState, IntegratorConfig, OscState};
use crate::scenario::{DriveParameters, ModeSelector};

/// Evolution aborts when any constraint residual drifts beyond this.
pub const CONSTRAINT_ABORT: f64 = 1e-6;
/// User-supplied seeds must satisfy the constraints to this tolerance.
pub const SEED_TOL: f64 = 1e-10;

pub type Coefficient = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Time-dependent coefficients `μᵢ(t)`, `νᵢ(t)`, `γ(t)`.
pub struct QuadraticHamiltonian {
    mu: [Coefficient; 2],
    mu_dot: [Option<Coefficient>; 2],
    nu: [Coefficient; 2],
    gamma: Coefficient,
}

impl std::fmt::Debug for QuadraticHamiltonian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QuadraticHamiltonian")
            .field("analytic_mu_dot", &[self.mu_dot[0].is_some(), self.mu_dot[1].is_some()])
            .finish_non_exhaustive()
    }
}

impl QuadraticHamiltonian {
    pub fn new(mu: [Coefficient; 2], nu: [Coefficient; 2], gamma: Coefficient) -> Self {
        Self {
            mu,
            mu_dot: [None, None],
            nu,
            gamma,
        }
    }

    /// Supplies analytic `μ̇ₖ`, replacing the finite-difference fallback.
    pub fn with_mu_dot(mut self, mu_dot: [Coefficient; 2]) -> Self {
        let [a, b] = mu_dot;
        self.mu_dot = [Some(a), Some(b)];
        self
    }

    /// Unit masses, `νᵢ = ω²`, and cross coupling `2ω·γ(t)`.
    ///
    /// The factor `2ω` makes the normal-mode frequencies `ω² ∓ 2ωγ(t)`, the
    /// convention used by the scalar mode equations.
    pub fn from_drive(params: &DriveParameters) -> Self {
        let p = *params;
        let w2 = p.omega() * p.omega();
        Self::new(
            [Box::new(|_| 1.0), Box::new(|_| 1.0)],
            [Box::new(move |_| w2), Box::new(move |_| w2)],
            Box::new(move |t| 2.0 * p.omega() * p.coupling_at(t)),
        )
        .with_mu_dot([Box::new(|_| 0.0), Box::new(|_| 0.0)])
    }
}

impl CoupledCoefficients for QuadraticHamiltonian {
    fn mu(&self, k: usize, t: f64) -> f64 {
        (self.mu[k])(t)
    }

    fn nu(&self, k: usize, t: f64) -> f64 {
        (self.nu[k])(t)
    }

    fn gamma(&self, t: f64) -> f64 {
        (self.gamma)(t)
    }

    fn mu_dot(&self, k: usize, t: f64) -> f64 {
        match &self.mu_dot[k] {
            Some(f) => f(t),
            None => {
                let h = 1e-6 * t.abs().max(1.0);
                (self.mu(k, t + h) - self.mu(k, t - h)) / (2.0 * h)
            }
        }
    }
}

type Mat2 = [[C64; 2]; 2];

/// `B_ik`, `Ḃ_ik` and `A_ik = −Ḃ_ik/μₖ` at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxiliaryMatrix {
    pub t: f64,
    pub b: Mat2,
    pub bdot: Mat2,
    pub a: Mat2,
}

impl AuxiliaryMatrix {
    pub fn new(t: f64, b: Mat2, bdot: Mat2, h: &QuadraticHamiltonian) -> Result<Self> {
        let mut a = [[C64::default(); 2]; 2];
        for k in 0..2 {
            let mu = h.mu(k, t);
            if mu == 0.0 {
                return Err(Error::SingularMass { k: k + 1, t });
            }
            for i in 0..2 {
                a[i][k] = -bdot[i][k] / mu;
            }
        }
        Ok(Self { t, b, bdot, a })
    }

    fn state(&self) -> CoupledState {
        CoupledState {
            t: self.t,
            b: self.b,
            bdot: self.bdot,
        }
    }

    /// Largest deviation of `A_ik` from `−Ḃ_ik/μₖ`.
    pub fn ccdp_residual(&self, h: &QuadraticHamiltonian) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for k in 0..2 {
                let r = self.bdot[i][k] + h.mu(k, self.t) * self.a[i][k];
                worst = worst.max(r.norm());
            }
        }
        worst
    }

    /// `|Ψ₀₀(x₁, x₂)|²` of the common vacuum of `a₁`, `a₂`.
    ///
    /// The vacuum is `exp(−½xᵀZx)` with `Z = i B⁻¹A`, so the density is
    /// `√det(Re Z)/π · exp(−xᵀ Re(Z) x)`.
    pub fn ground_density(&self, x1: f64, x2: f64) -> Result<f64> {
        let b = self.b;
        let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
        if det.norm() < 1e-300 {
            return Err(Error::SingularEvaluation {
                t: self.t,
                modulus: det.norm(),
            });
        }
        let inv = [[b[1][1] / det, -b[0][1] / det], [-b[1][0] / det, b[0][0] / det]];
        let z: [[C64; 2]; 2] =
            std::array::from_fn(|r| std::array::from_fn(|c| C64::i() * (inv[r][0] * self.a[0][c] + inv[r][1] * self.a[1][c])));
        let rxx = z[0][0].re;
        let ryy = z[1][1].re;
        let rxy = 0.5 * (z[0][1].re + z[1][0].re);
        let det_re = rxx * ryy - rxy * rxy;
        if !(det_re > 0.0 && rxx > 0.0) {
            return Err(Error::Domain("vacuum Gaussian is not normalisable".into()));
        }
        let quad = rxx * x1 * x1 + 2.0 * rxy * x1 * x2 + ryy * x2 * x2;
        Ok(det_re.sqrt() / PI * (-quad).exp())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintResiduals {
    pub wc1: f64,
    pub wc2: f64,
    pub wc3: f64,
}

impl ConstraintResiduals {
    pub fn max(&self) -> f64 {
        self.wc1.max(self.wc2).max(self.wc3)
    }
}

/// Max-abs residual of each constraint over all `(m, n)`.
pub fn constraint_residuals(m: &AuxiliaryMatrix, h: &QuadraticHamiltonian) -> ConstraintResiduals {
    let mu = [C64::new(h.mu(0, m.t), 0.0), C64::new(h.mu(1, m.t), 0.0)];
    let (b, bd) = (&m.b, &m.bdot);
    let mut res = ConstraintResiduals {
        wc1: 0.0,
        wc2: 0.0,
        wc3: 0.0,
    };
    for r in 0..2 {
        for s in 0..2 {
            let mut wc1 = C64::default();
            let mut wc2 = C64::default();
            let mut wc3 = C64::default();
            for k in 0..2 {
                wc1 += (bd[r][k] * b[s][k] - bd[s][k] * b[r][k]) / mu[k];
                wc2 += (bd[r][k].conj() * b[s][k].conj() - bd[s][k].conj() * b[r][k].conj()) / mu[k].conj();
                wc3 += bd[r][k] * b[s][k].conj() / mu[k] - b[r][k] * bd[s][k].conj() / mu[k].conj();
            }
            if r == s {
                wc3 -= C64::i();
            }
            res.wc1 = res.wc1.max(wc1.norm());
            res.wc2 = res.wc2.max(wc2.norm());
            res.wc3 = res.wc3.max(wc3.norm());
        }
    }
    res
}

/// Composes two scalar normal-mode states into the auxiliary matrix whose
/// first row annihilates the `q₋ = (x₁ − x₂)/√2` mode and whose second row
/// annihilates `q₊ = (x₁ + x₂)/√2`.
pub fn compose_normal_modes(minus: &OscState, plus: &OscState, h: &QuadraticHamiltonian) -> Result<AuxiliaryMatrix> {
    let r = FRAC_1_SQRT_2;
    let b = [[minus.b * r, -minus.b * r], [plus.b * r, plus.b * r]];
    let bdot = [[minus.bdot * r, -minus.bdot * r], [plus.bdot * r, plus.bdot * r]];
    AuxiliaryMatrix::new(minus.t, b, bdot, h)
}

/// Rotation-composed thermal seeds of the two normal modes at `t₀`.
pub fn normal_mode_init(params: &DriveParameters) -> Result<AuxiliaryMatrix> {
    let h = QuadraticHamiltonian::from_drive(params);
    let minus = thermal_initial_conditions(params, ModeSelector::Minus)?;
    let plus = thermal_initial_conditions(params, ModeSelector::Plus)?;
    let m = compose_normal_modes(&minus, &plus, &h)?;
    let res = constraint_residuals(&m, &h);
    if res.max() > 1e-12 {
        return Err(Error::InvalidSeed { residual: res.max() });
    }
    Ok(m)
}

#[derive(Debug, Clone)]
pub struct GeneralTrajectory {
    pub samples: Vec<AuxiliaryMatrix>,
    pub residuals: Vec<ConstraintResiduals>,
    trajectory: crate::integrator::CoupledTrajectory,
}

impl GeneralTrajectory {
    /// Largest change of any constraint residual relative to the seed.
    pub fn max_drift(&self) -> f64 {
        let r0 = self.residuals[0];
        self.residuals
            .iter()
            .map(|r| {
                (r.wc1 - r0.wc1)
                    .abs()
                    .max((r.wc2 - r0.wc2).abs())
                    .max((r.wc3 - r0.wc3).abs())
            })
            .fold(0.0, f64::max)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.max()).fold(0.0, f64::max)
    }

    pub fn state_at(&self, t: f64, h: &QuadraticHamiltonian) -> Result<AuxiliaryMatrix> {
        let s = self.trajectory.state_at(t)?;
        AuxiliaryMatrix::new(t, s.b, s.bdot, h)
    }
}

fn residual_scale(m: &AuxiliaryMatrix, h: &QuadraticHamiltonian) -> f64 {
    let mut scale: f64 = 1.0;
    for k in 0..2 {
        let mu = h.mu(k, m.t).abs();
        for r in 0..2 {
            for s in 0..2 {
                scale = scale.max(2.0 * m.bdot[r][k].norm() * m.b[s][k].norm() / mu);
            }
        }
    }
    scale
}

pub fn evolve_general(
    h: &QuadraticHamiltonian,
    init: &AuxiliaryMatrix,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<GeneralTrajectory> {
    let seed = constraint_residuals(init, h);
    if seed.max() > SEED_TOL {
        return Err(Error::InvalidSeed { residual: seed.max() });
    }
    let trajectory = propagate_coupled(h, init.state(), t_end, cfg)?;
    let mut samples = Vec::with_capacity(trajectory.len());
    let mut residuals = Vec::with_capacity(trajectory.len());
    for s in trajectory.nodes() {
        let m = AuxiliaryMatrix::new(s.t, s.b, s.bdot, h)?;
        let r = constraint_residuals(&m, h);
        let drift = r.max() / residual_scale(&m, h);
        if drift > CONSTRAINT_ABORT {
            return Err(Error::ConstraintDrift { t: s.t, residual: r.max() });
        }
        samples.push(m);
        residuals.push(r);
    }
    Ok(GeneralTrajectory {
        samples,
        residuals,
        trajectory,
    })
}
