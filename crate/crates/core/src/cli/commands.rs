//! Subcommand bodies: compute everything, return in-memory files.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::auxiliary::{joint_ground_density_from_states, wronskian_error, ModePair};
use crate::gaussian::{entropy_at, von_neumann_entropy, wigner_grid};
use crate::general::{
    compose_normal_modes, evolve_general, normal_mode_init, AuxiliaryMatrix, QuadraticHamiltonian,
};
use crate::mathieu::{linspace, mode_line, stability_chart, unstable_runs};
use crate::scenario::ModeSelector;

use super::output::{fmt_f64, time_tag, OutputFile, RunManifest, Settings, Table};
use super::CliError;

pub struct RunOutput {
    pub files: Vec<OutputFile>,
    pub summary: String,
    /// Set when the run completed but a requested check did not pass.
    pub failure: Option<String>,
}

impl RunOutput {
    fn ok(files: Vec<OutputFile>, summary: String) -> Self {
        Self {
            files,
            summary,
            failure: None,
        }
    }
}

pub fn run(m: &RunManifest) -> Result<RunOutput, CliError> {
    match &m.settings {
        Settings::StabilityChart {
            a_range,
            b_range,
            resolution,
        } => chart(m, *a_range, *b_range, *resolution),
        Settings::ModeLine { .. } => line(m),
        Settings::Entropy { omega_t_max, samples } => entropy(m, *omega_t_max, *samples),
        Settings::Wigner {
            omega_t,
            q_range,
            p_range,
            resolution,
        } => wigner(m, omega_t, *q_range, *p_range, *resolution),
        Settings::Density {
            omega_t,
            x_range,
            resolution,
        } => density(m, omega_t, *x_range, *resolution),
        Settings::GeneralCheck { .. } => general(m),
    }
}

fn flag(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

fn chart(m: &RunManifest, a: [f64; 2], b: [f64; 2], res: usize) -> Result<RunOutput, CliError> {
    let chart = stability_chart((a[0], a[1]), (b[0], b[1]), (res, res), &m.integrator)?;
    let mut t = Table::new(m, &["a", "b", "stable", "imF"])
        .comment("canonical Mathieu form f'' + (a - 2b cos 2tau) f = 0; imF in canonical units");
    for c in &chart.cells {
        t.row([fmt_f64(c.a), fmt_f64(c.b), flag(c.stable), fmt_f64(c.im_f)]);
    }
    let unstable = chart.cells.iter().filter(|c| !c.stable).count();
    let summary = format!("stability-chart: {res}x{res} cells, {unstable} unstable");
    Ok(RunOutput::ok(vec![t.finish("chart.csv")], summary))
}

fn line(m: &RunManifest) -> Result<RunOutput, CliError> {
    let Settings::ModeLine {
        g_range,
        samples,
        amplitude,
    } = &m.settings
    else {
        unreachable!()
    };
    let pts = mode_line(&m.params, *amplitude, (g_range[0], g_range[1]), *samples, &m.integrator)?;
    let mut t = Table::new(
        m,
        &[
            "g",
            "a_minus",
            "b_minus",
            "reF_minus",
            "imF_minus",
            "stable_minus",
            "a_plus",
            "b_plus",
            "reF_plus",
            "imF_plus",
            "stable_plus",
        ],
    )
    .comment(format!("amplitude: {amplitude:?}"))
    .comment(format!(
        "F in canonical units (tau = Omega t / 2); physical F = {} * F",
        m.params.drive_freq() / 2.0
    ));
    for p in &pts {
        let mut row = vec![fmt_f64(p.g)];
        for mode in ModeSelector::BOTH {
            let mp = p.mode(mode);
            row.extend([
                fmt_f64(mp.params.a),
                fmt_f64(mp.params.b),
                fmt_f64(mp.floquet.exponent.re),
                fmt_f64(mp.floquet.exponent.im),
                flag(mp.floquet.stable),
            ]);
        }
        t.row(row);
    }
    let describe = |mode| {
        unstable_runs(&pts, mode)
            .iter()
            .map(|&(i, j)| format!("[{}, {}]", pts[i].g, pts[j].g))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let summary = format!(
        "mode-line: {} samples; unstable minus: {}; unstable plus: {}",
        pts.len(),
        describe(ModeSelector::Minus),
        describe(ModeSelector::Plus)
    );
    Ok(RunOutput::ok(vec![t.finish("mode_line.csv")], summary))
}

/// Physical time of a snapshot given in units of Ωt.
fn physical_times(m: &RunManifest, omega_t: &[f64]) -> Result<Vec<f64>, CliError> {
    let t0 = m.params.t0();
    omega_t
        .iter()
        .map(|&w| {
            let t = w / m.params.drive_freq();
            if t < t0 {
                Err(CliError::Usage(format!(
                    "invalid parameter `times`: Omega t = {w} precedes t0 = {t0}"
                )))
            } else {
                Ok(t)
            }
        })
        .collect()
}

/// Both modes evolved far enough to cover `t_max` (at least one period).
fn evolve_pair(m: &RunManifest, t_max: f64) -> Result<ModePair, CliError> {
    let end = t_max.max(m.params.t0() + m.params.drive_period());
    Ok(ModePair::evolve(&m.params, end, &m.integrator)?)
}

fn entropy(m: &RunManifest, omega_t_max: f64, samples: usize) -> Result<RunOutput, CliError> {
    let t0 = m.params.t0();
    let t_max = omega_t_max / m.params.drive_freq();
    if t_max <= t0 {
        return Err(CliError::Usage(format!(
            "invalid parameter `t-max`: Omega t = {omega_t_max} must lie after t0 = {t0}"
        )));
    }
    let pair = evolve_pair(m, t_max)?;
    let times = linspace(t0, t_max, samples);
    let mut ent = Table::new(m, &["t", "L", "purity", "vN_entropy"]);
    let mut aux = Table::new(
        m,
        &[
            "t",
            "reB_minus",
            "imB_minus",
            "reBdot_minus",
            "imBdot_minus",
            "reB_plus",
            "imB_plus",
            "reBdot_plus",
            "imBdot_plus",
            "wronskian_err_minus",
            "wronskian_err_plus",
            "l_minus",
            "l_plus",
        ],
    );
    let mut l_max: f64 = 0.0;
    for &t in &times {
        let e = entropy_at(&pair, t)?;
        let s = von_neumann_entropy(e.purity)?;
        ent.floats(&[t, e.linear_entropy, e.purity, s]);
        l_max = l_max.max(e.linear_entropy);
        let sm = pair.minus.state_at(t)?;
        let sp = pair.plus.state_at(t)?;
        aux.floats(&[
            t,
            sm.b.re,
            sm.b.im,
            sm.bdot.re,
            sm.bdot.im,
            sp.b.re,
            sp.b.im,
            sp.bdot.re,
            sp.bdot.im,
            wronskian_error(&sm),
            wronskian_error(&sp),
            std::f64::consts::SQRT_2 * sm.b.norm(),
            std::f64::consts::SQRT_2 * sp.b.norm(),
        ]);
    }
    let summary = format!("entropy: {samples} samples up to t = {t_max}, max L = {l_max:.6}");
    Ok(RunOutput::ok(
        vec![ent.finish("entropy.csv"), aux.finish("aux.csv")],
        summary,
    ))
}

fn wigner(
    m: &RunManifest,
    omega_t: &[f64],
    q: [f64; 2],
    p: [f64; 2],
    res: usize,
) -> Result<RunOutput, CliError> {
    let times = physical_times(m, omega_t)?;
    let pair = evolve_pair(m, times.iter().copied().fold(f64::MIN, f64::max))?;
    let mut files = Vec::new();
    let mut summary = Table::new(m, &["omega_t", "t", "integral", "max", "support_area"])
        .comment("support_area: area of cells with W > max/e");
    for (&w, &t) in omega_t.iter().zip(&times) {
        let grid = wigner_grid(&pair, t, (q[0], q[1]), (p[0], p[1]), (res, res))?;
        let mut tab = Table::new(m, &["q", "p", "W"]).comment(format!("Omega t = {w}, t = {t}"));
        for (pi, &pv) in grid.p_values.iter().enumerate() {
            for (qi, &qv) in grid.q_values.iter().enumerate() {
                tab.floats(&[qv, pv, grid.at(qi, pi)]);
            }
        }
        files.push(tab.finish(format!("wigner_t{}.csv", time_tag(w))));
        summary.floats(&[w, t, grid.integral(), grid.max(), grid.support_area()]);
    }
    files.push(summary.finish("wigner_summary.csv"));
    Ok(RunOutput::ok(
        files,
        format!("wigner: {} grids of {res}x{res}", omega_t.len()),
    ))
}

fn density(
    m: &RunManifest,
    omega_t: &[f64],
    x_range: Option<[f64; 2]>,
    res: usize,
) -> Result<RunOutput, CliError> {
    let times = physical_times(m, omega_t)?;
    let pair = evolve_pair(m, times.iter().copied().fold(f64::MIN, f64::max))?;
    let states = times
        .iter()
        .map(|&t| Ok((pair.minus.state_at(t)?, pair.plus.state_at(t)?)))
        .collect::<crate::Result<Vec<_>>>()?;
    let x = x_range.unwrap_or_else(|| {
        let widest = states
            .iter()
            .map(|(a, b)| a.b.norm().max(b.b.norm()))
            .fold(0.0, f64::max);
        let half = (6.0 * widest).ceil();
        [-half, half]
    });
    let xs = linspace(x[0], x[1], res);
    let cell = (xs[1] - xs[0]).powi(2);
    let mut files = Vec::new();
    let mut summary = Table::new(
        m,
        &["omega_t", "t", "integral", "sigma_minus", "sigma_plus", "stretch"],
    )
    .comment("sigma: spread |B| along x1 = -x2 (minus) and x1 = x2 (plus); stretch = larger/smaller");
    for ((&w, &t), (sm, sp)) in omega_t.iter().zip(&times).zip(&states) {
        let values = (0..res * res)
            .into_par_iter()
            .map(|idx| joint_ground_density_from_states(sm, sp, xs[idx % res], xs[idx / res]))
            .collect::<crate::Result<Vec<f64>>>()?;
        let mut tab = Table::new(m, &["x1", "x2", "rho"]).comment(format!("Omega t = {w}, t = {t}"));
        for (idx, v) in values.iter().enumerate() {
            tab.floats(&[xs[idx % res], xs[idx / res], *v]);
        }
        files.push(tab.finish(format!("density_t{}.csv", time_tag(w))));
        let (a, b) = (sm.b.norm(), sp.b.norm());
        let integral = values.iter().sum::<f64>() * cell;
        summary.floats(&[w, t, integral, a, b, a.max(b) / a.min(b)]);
    }
    files.push(summary.finish("density_summary.csv"));
    Ok(RunOutput::ok(
        files,
        format!("density: {} grids of {res}x{res} over [{}, {}]", omega_t.len(), x[0], x[1]),
    ))
}

const PROBES: [(f64, f64); 4] = [(0.0, 0.0), (0.5, -0.3), (1.0, 1.0), (-0.7, 0.2)];

fn rel_path_diff(a: &AuxiliaryMatrix, b: &AuxiliaryMatrix) -> f64 {
    let mut scale: f64 = 1.0;
    let mut diff: f64 = 0.0;
    for r in 0..2 {
        for k in 0..2 {
            scale = scale.max(a.b[r][k].norm()).max(a.bdot[r][k].norm());
            diff = diff
                .max((a.b[r][k] - b.b[r][k]).norm())
                .max((a.bdot[r][k] - b.bdot[r][k]).norm());
        }
    }
    diff / scale
}

fn general(m: &RunManifest) -> Result<RunOutput, CliError> {
    let Settings::GeneralCheck {
        periods,
        drift_tol,
        path_tol,
        corrupt_seed,
    } = m.settings
    else {
        unreachable!()
    };
    let h = QuadraticHamiltonian::from_drive(&m.params);
    let mut init = normal_mode_init(&m.params)?;
    if corrupt_seed {
        let mut b = init.b;
        b[0][0] *= C64::new(1.0 + 1e-6, 0.0);
        init = AuxiliaryMatrix::new(init.t, b, init.bdot, &h)?;
    }
    let t_end = m.params.t0() + periods * 2.0 * PI / m.params.drive_freq();
    let traj = evolve_general(&h, &init, t_end, &m.integrator)?;
    let pair = ModePair::evolve(&m.params, t_end, &m.integrator)?;

    let mut tab = Table::new(
        m,
        &[
            "t", "reB11", "imB11", "reB12", "imB12", "reB21", "imB21", "reB22", "imB22", "wc1_res", "wc2_res",
            "wc3_res",
        ],
    );
    let mut path: f64 = 0.0;
    let mut dens: f64 = 0.0;
    for (s, r) in traj.samples.iter().zip(&traj.residuals) {
        let b = &s.b;
        tab.floats(&[
            s.t, b[0][0].re, b[0][0].im, b[0][1].re, b[0][1].im, b[1][0].re, b[1][0].im, b[1][1].re, b[1][1].im,
            r.wc1, r.wc2, r.wc3,
        ]);
        let sm = pair.minus.state_at(s.t)?;
        let sp = pair.plus.state_at(s.t)?;
        let composed = compose_normal_modes(&sm, &sp, &h)?;
        path = path.max(rel_path_diff(s, &composed));
        for (x1, x2) in PROBES {
            let d1 = s.ground_density(x1, x2)?;
            let d2 = joint_ground_density_from_states(&sm, &sp, x1, x2)?;
            dens = dens.max((d1 - d2).abs() / d2.abs().max(1e-300).max(d1.abs()));
        }
    }
    let drift = traj.max_drift();
    let mut sum = Table::new(m, &["metric", "value"]);
    for (k, v) in [
        ("samples", traj.samples.len() as f64),
        ("t_end", t_end),
        ("max_constraint_drift", drift),
        ("max_constraint_residual", traj.max_residual()),
        ("max_relative_path_difference", path),
        ("max_relative_density_difference", dens),
    ] {
        sum.row([k.to_string(), fmt_f64(v)]);
    }
    let summary = format!(
        "general-check: {} samples to t = {t_end:.6}; constraint drift {drift:.3e}; path difference {path:.3e}; density difference {dens:.3e}",
        traj.samples.len()
    );
    let mut failures = Vec::new();
    if drift > drift_tol {
        failures.push(format!("constraint drift {drift:e} > {drift_tol:e}"));
    }
    if path > path_tol || dens > path_tol {
        failures.push(format!("path difference {:e} > {path_tol:e}", path.max(dens)));
    }
    Ok(RunOutput {
        files: vec![tab.finish("general.csv"), sum.finish("general_summary.csv")],
        summary,
        failure: (!failures.is_empty()).then(|| failures.join("; ")),
    })
}
