//! C ABI over the `paramosc` library.
//!
//! Every fallible call returns a [`ParamoscStatus`] and writes its result
//! through an out-pointer. On failure a message is kept per thread and can be
//! fetched with [`paramosc_last_error_message`]. Handles are opaque and must
//! be released with their matching `_free` function.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use paramosc::auxiliary::{joint_ground_density, ModePair};
use paramosc::gaussian::{linear_entropy, purity_from_wigner, reduced_params, von_neumann_entropy, wigner};
use paramosc::mathieu::{canonical_params, monodromy, CanonicalMathieuParams};
use paramosc::{DriveParameters, Error, IntegratorConfig, Method, ModeSelector};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamoscStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    InvalidConfig = 3,
    /// Integration failed: step underflow, non-finite values, drift abort.
    IntegrationFailure = 4,
    OutOfRange = 5,
    /// Quantity undefined for the given state (singular or non-normalisable).
    Domain = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamoscMode {
    Minus = 0,
    Plus = 1,
}

impl From<ParamoscMode> for ModeSelector {
    fn from(m: ParamoscMode) -> Self {
        match m {
            ParamoscMode::Minus => ModeSelector::Minus,
            ParamoscMode::Plus => ModeSelector::Plus,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamoscComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ParamoscComplex {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// Integrator settings. `fixed_step > 0` selects fixed-step RK4, otherwise
/// the adaptive Dormand–Prince pair is used.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamoscIntegrator {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub initial_step: f64,
    pub fixed_step: f64,
}

impl ParamoscIntegrator {
    fn to_config(self) -> IntegratorConfig {
        IntegratorConfig {
            method: if self.fixed_step > 0.0 {
                Method::Rk4 { step: self.fixed_step }
            } else {
                Method::DormandPrince45
            },
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            initial_step: self.initial_step,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamoscFloquet {
    /// Row-major one-period monodromy matrix.
    pub monodromy: [f64; 4],
    pub trace: f64,
    pub det: f64,
    /// Canonical-time Floquet exponent.
    pub exponent: ParamoscComplex,
    pub stable: bool,
    pub marginal: bool,
}

/// Validated drive parameters.
pub struct ParamoscScenario {
    params: DriveParameters,
}

/// Both normal-mode trajectories of a scenario.
pub struct ParamoscEvolution {
    pair: ModePair,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> ParamoscStatus {
    match e {
        Error::InvalidParameter { .. } => ParamoscStatus::InvalidParameter,
        Error::InvalidConfig(_) => ParamoscStatus::InvalidConfig,
        Error::OutOfRange { .. } => ParamoscStatus::OutOfRange,
        Error::SingularEvaluation { .. } | Error::Domain(_) | Error::DegenerateMode { .. } => ParamoscStatus::Domain,
        _ => ParamoscStatus::IntegrationFailure,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> ParamoscStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error(String::new());
            ParamoscStatus::Ok
        }
        Ok(Err(Fail::Null(name))) => {
            set_error(format!("null pointer passed as `{name}`"));
            ParamoscStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            ParamoscStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(name))
}

unsafe fn put<T>(p: *mut T, name: &'static str, v: T) -> Result<(), Fail> {
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    p.write(v);
    Ok(())
}

unsafe fn config_or_default(cfg: *const ParamoscIntegrator) -> Result<IntegratorConfig, Fail> {
    let cfg = match cfg.as_ref() {
        Some(c) => c.to_config(),
        None => IntegratorConfig::default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn paramosc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copies the calling thread's last error message into `buf` (always
/// NUL-terminated when `len > 0`) and returns the length the full message
/// needs, including the terminator. Pass a null `buf` to query the length.
///
/// # Safety
/// `buf` must be null or point to at least `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn paramosc_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len() + 1
    })
}

/// Fills `out` with the default adaptive settings.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn paramosc_integrator_default(out: *mut ParamoscIntegrator) -> ParamoscStatus {
    guard(|| {
        let d = IntegratorConfig::default();
        put(
            out,
            "out",
            ParamoscIntegrator {
                rel_tol: d.rel_tol,
                abs_tol: d.abs_tol,
                max_step: d.max_step,
                initial_step: d.initial_step,
                fixed_step: 0.0,
            },
        )
    })
}

/// # Safety
/// `out` must be null or valid for writes. On success `*out` owns a handle
/// to release with [`paramosc_scenario_free`].
#[no_mangle]
pub unsafe extern "C" fn paramosc_scenario_new(
    omega: f64,
    g: f64,
    delta_g: f64,
    drive_freq: f64,
    t0: f64,
    out: *mut *mut ParamoscScenario,
) -> ParamoscStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let params = DriveParameters::new(omega, g, delta_g, drive_freq, t0)?;
        out.write(Box::into_raw(Box::new(ParamoscScenario { params })));
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a handle from [`paramosc_scenario_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn paramosc_scenario_free(s: *mut ParamoscScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// `γ(t) = g + Δg·cos Ωt`.
///
/// # Safety
/// `s` must be a live scenario handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn paramosc_scenario_coupling_at(
    s: *const ParamoscScenario,
    t: f64,
    out: *mut f64,
) -> ParamoscStatus {
    guard(|| put(out, "out", get(s, "scenario")?.params.coupling_at(t)))
}

/// `ε∓²(t) = ω² ∓ 2ωγ(t)`; may be negative.
///
/// # Safety
/// `s` must be a live scenario handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn paramosc_scenario_mode_frequency_squared(
    s: *const ParamoscScenario,
    mode: ParamoscMode,
    t: f64,
    out: *mut f64,
) -> ParamoscStatus {
    guard(|| {
        let v = get(s, "scenario")?.params.mode_frequency_squared(mode.into(), t);
        put(out, "out", v)
    })
}

/// Canonical Mathieu parameters `(a, b)` of one mode.
///
/// # Safety
/// `s` must be a live scenario handle, `a` and `b` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn paramosc_scenario_mathieu_params(
    s: *const ParamoscScenario,
    mode: ParamoscMode,
    a: *mut f64,
    b: *mut f64,
) -> ParamoscStatus {
    guard(|| {
        let p = canonical_params(&get(s, "scenario")?.params, mode.into());
        put(a, "a", p.a)?;
        put(b, "b", p.b)
    })
}

/// Monodromy and Floquet data of `f'' + (a − 2b·cos 2τ)f = 0`. A null `cfg`
/// selects the default integrator.
///
/// # Safety
/// `cfg` must be null or valid for reads, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn paramosc_monodromy(
    a: f64,
    b: f64,
    cfg: *const ParamoscIntegrator,
    out: *mut ParamoscFloquet,
) -> ParamoscStatus {
    guard(|| {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidParameter {
                key: "a/b".into(),
                reason: "must be finite".into(),
            }
            .into());
        }
        let cfg = config_or_default(cfg)?;
        let f = monodromy(CanonicalMathieuParams { a, b }, &cfg)?;
        let m = f.monodromy;
        put(
            out,
            "out",
            ParamoscFloquet {
                monodromy: [m[0][0], m[0][1], m[1][0], m[1][1]],
                trace: f.trace,
                det: f.det,
                exponent: f.exponent.into(),
                stable: f.stable,
                marginal: f.marginal,
            },
        )
    })
}

/// Evolves both normal modes from their thermal seeds up to `t_end`.
///
/// # Safety
/// `s` must be a live scenario handle, `cfg` null or valid for reads, `out`
/// valid for writes. On success `*out` must be released with
/// [`paramosc_evolution_free`].
#[no_mangle]
pub unsafe extern "C" fn paramosc_evolution_new(
    s: *const ParamoscScenario,
    t_end: f64,
    cfg: *const ParamoscIntegrator,
    out: *mut *mut ParamoscEvolution,
) -> ParamoscStatus {
    guard(|| {
        let params = get(s, "scenario")?.params;
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let cfg = config_or_default(cfg)?;
        let pair = ModePair::evolve(&params, t_end, &cfg)?;
        out.write(Box::into_raw(Box::new(ParamoscEvolution { pair })));
        Ok(())
    })
}

/// # Safety
/// `e` must be null or a handle from [`paramosc_evolution_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn paramosc_evolution_free(e: *mut ParamoscEvolution) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// `B(t)` and `Ḃ(t)` of one mode.
///
/// # Safety
/// `e` must be a live evolution handle, `b` and `bdot` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn paramosc_evolution_state(
    e: *const ParamoscEvolution,
    mode: ParamoscMode,
    t: f64,
    b: *mut ParamoscComplex,
    bdot: *mut ParamoscComplex,
) -> ParamoscStatus {
    guard(|| {
        let s = get(e, "evolution")?.pair.get(mode.into()).state_at(t)?;
        put(b, "b", s.b.into())?;
        put(bdot, "bdot", s.bdot.into())
    })
}

/// `ξ∓ = −iḂ∓/B∓` at `t`.
///
/// # Safety
/// `e` must be a live evolution handle, outputs valid for writes.
#[no_mangle]
pub unsafe extern "C" fn paramosc_evolution_xi(
    e: *const ParamoscEvolution,
    t: f64,
    xi_minus: *mut ParamoscComplex,
    xi_plus: *mut ParamoscComplex,
) -> ParamoscStatus {
    guard(|| {
        let xi = get(e, "evolution")?.pair.xi_at(t)?;
        put(xi_minus, "xi_minus", xi.xi_minus.into())?;
        put(xi_plus, "xi_plus", xi.xi_plus.into())
    })
}

/// Linear entropy `1 − tr ρ²` of either oscillator at `t`.
///
/// # Safety
/// `e` must be a live evolution handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn paramosc_evolution_linear_entropy(
    e: *const ParamoscEvolution,
    t: f64,
    out: *mut f64,
) -> ParamoscStatus {
    guard(|| {
        let p = reduced_params(&get(e, "evolution")?.pair.xi_at(t)?)?;
        put(out, "out", linear_entropy(&p)?)
    })
}

/// Purity computed from the Wigner quadratic form, independent of the
/// linear-entropy formula.
///
/// # Safety
/// `e` must be a live evolution handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn paramosc_evolution_purity_from_wigner(
    e: *const ParamoscEvolution,
    t: f64,
    out: *mut f64,
) -> ParamoscStatus {
    guard(|| {
        let p = reduced_params(&get(e, "evolution")?.pair.xi_at(t)?)?;
        put(out, "out", purity_from_wigner(&p)?)
    })
}

/// Reduced-state Wigner function `W(q, p)` at `t`.
///
/// # Safety
/// `e` must be a live evolution handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn paramosc_evolution_wigner(
    e: *const ParamoscEvolution,
    t: f64,
    q: f64,
    p: f64,
    out: *mut f64,
) -> ParamoscStatus {
    guard(|| {
        let rp = reduced_params(&get(e, "evolution")?.pair.xi_at(t)?)?;
        put(out, "out", wigner(&rp, q, p)?)
    })
}

/// Joint ground-state density `|Ψ₀₀(x₁, x₂, t)|²`.
///
/// # Safety
/// `e` must be a live evolution handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn paramosc_evolution_joint_density(
    e: *const ParamoscEvolution,
    x1: f64,
    x2: f64,
    t: f64,
    out: *mut f64,
) -> ParamoscStatus {
    guard(|| {
        let pair = &get(e, "evolution")?.pair;
        put(out, "out", joint_ground_density(&pair.minus, &pair.plus, x1, x2, t)?)
    })
}

/// Gaussian von Neumann entropy for a given purity in (0, 1].
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn paramosc_von_neumann_entropy(purity: f64, out: *mut f64) -> ParamoscStatus {
    guard(|| put(out, "out", von_neumann_entropy(purity)?))
}
