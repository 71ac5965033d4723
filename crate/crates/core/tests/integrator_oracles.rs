mod common;

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use paramosc::integrator::{propagate_coupled, propagate_scalar, CoupledState};
use paramosc::general::QuadraticHamiltonian;
use paramosc::{DriveParameters, IntegratorConfig, OscState};
use rand::{Rng, SeedableRng};
use rustfft::FftPlanner;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn closed_form_solutions() {
    let cfg = IntegratorConfig::default();
    let cos = propagate_scalar(|_| 1.0, OscState::new(0.0, c(1.0, 0.0), c(0.0, 0.0)), PI, &cfg).unwrap();
    assert!((cos.last().b.re + 1.0).abs() < 1e-9);
    let exp = propagate_scalar(|_| -1.0, OscState::new(0.0, c(1.0, 0.0), c(1.0, 0.0)), 1.0, &cfg).unwrap();
    assert!((exp.last().b.re - std::f64::consts::E).abs() < 1e-8);
    let sin = propagate_scalar(|_| 4.0, OscState::new(0.0, c(0.0, 0.0), c(2.0, 0.0)), PI / 4.0, &cfg).unwrap();
    assert!((sin.last().b.re - 1.0).abs() < 1e-9);
}

#[test]
fn linearity_with_random_coefficients() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let w = |t: f64| 0.5 + 0.3 * (1.3 * t).cos();
    let cfg = IntegratorConfig::fixed(0.01);
    for _ in 0..5 {
        let mut rc = || c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (c1, c2) = (rc(), rc());
        let (s1, s2) = (OscState::new(0.0, rc(), rc()), OscState::new(0.0, rc(), rc()));
        let mix = OscState::new(0.0, c1 * s1.b + c2 * s2.b, c1 * s1.bdot + c2 * s2.bdot);
        let end = |s| propagate_scalar(w, s, 12.0, &cfg).unwrap().last();
        let (e1, e2, em) = (end(s1), end(s2), end(mix));
        assert!((em.b - (c1 * e1.b + c2 * e2.b)).norm() < 1e-9);
        assert!((em.bdot - (c1 * e1.bdot + c2 * e2.bdot)).norm() < 1e-9);
    }
    // the adaptive path picks its own steps, so the identity holds to tolerance
    let cfg = IntegratorConfig::default();
    let (c1, c2) = (c(0.3, -1.1), c(-0.7, 0.4));
    let (s1, s2) = (OscState::new(0.0, c(1.0, 0.0), c(0.0, 0.5)), OscState::new(0.0, c(0.0, 1.0), c(-1.0, 0.0)));
    let mix = OscState::new(0.0, c1 * s1.b + c2 * s2.b, c1 * s1.bdot + c2 * s2.bdot);
    let end = |s| propagate_scalar(w, s, 12.0, &cfg).unwrap().last();
    assert!((end(mix).b - (c1 * end(s1).b + c2 * end(s2).b)).norm() < 1e-9);
}

#[test]
fn rk4_order() {
    let s = OscState::new(0.0, c(1.0, 0.0), c(0.0, 0.0));
    let err = |h: f64| {
        let end = propagate_scalar(|_| 1.0, s, PI, &IntegratorConfig::fixed(h)).unwrap().last();
        (end.b - c(-1.0, 0.0)).norm() + end.bdot.norm()
    };
    let ratio = err(PI / 50.0) / err(PI / 100.0);
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
}

/// Wronskian drift over 100 unit-frequency periods shrinks in proportion to
/// the tolerance; the 1e-8 level is reached at rel_tol 1e-11.
#[test]
fn wronskian_drift_scales_with_tolerance() {
    let s = OscState::new(0.0, c(0.0, 1.0 / 2f64.sqrt()), c(-1.0 / 2f64.sqrt(), 0.0));
    let drift = |tol: f64| {
        let tr = propagate_scalar(|_| 1.0, s, 200.0 * PI, &IntegratorConfig::adaptive(tol)).unwrap();
        tr.nodes().map(|n| (n.wronskian() - s.wronskian()).norm()).fold(0.0, f64::max)
    };
    let (d10, d11, d12) = (drift(1e-10), drift(1e-11), drift(1e-12));
    assert!(d11 < d10 && d12 < d11, "{d10:e} {d11:e} {d12:e}");
    assert!(d11 <= 1e-8, "{d11:e}");
    assert!(d12 <= 1e-9, "{d12:e}");
}

/// Normal-mode frequencies of the undriven coupled system from the FFT of
/// `B₁₁(t)`.
#[test]
fn spectral_normal_modes() {
    let g = 0.4;
    let p = DriveParameters::undriven(1.0, g).unwrap();
    let h = QuadraticHamiltonian::from_drive(&p);
    let zero = C64::default();
    let init = CoupledState {
        t: 0.0,
        b: [[c(1.0, 0.0), zero], [zero, c(1.0, 0.0)]],
        bdot: [[zero; 2]; 2],
    };
    let n = 8192;
    let t_end = 1200.0;
    let tr = propagate_coupled(&h, init, t_end, &IntegratorConfig::default()).unwrap();
    let dt = t_end / n as f64;
    let mut buf: Vec<_> = (0..n)
        .map(|k| {
            // Hann window to keep leakage out of the neighbouring peak
            let wdw = 0.5 - 0.5 * (2.0 * PI * k as f64 / n as f64).cos();
            c(tr.state_at(k as f64 * dt).unwrap().b[0][0].re * wdw, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let bin = 2.0 * PI / (n as f64 * dt);
    let mag: Vec<f64> = buf[..n / 2].iter().map(|z| z.norm()).collect();
    let mut peaks: Vec<usize> = (1..n / 2 - 1)
        .filter(|&k| mag[k] > mag[k - 1] && mag[k] >= mag[k + 1])
        .collect();
    peaks.sort_by(|&a, &b| mag[b].partial_cmp(&mag[a]).unwrap());
    let mut found: Vec<f64> = peaks[..2].iter().map(|&k| k as f64 * bin).collect();
    found.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let expected = [(1.0 - 2.0 * g).sqrt(), (1.0 + 2.0 * g).sqrt()];
    for (f, e) in found.iter().zip(expected) {
        assert!((f - e).abs() <= bin, "peak {f} vs {e} (bin {bin})");
    }
}
