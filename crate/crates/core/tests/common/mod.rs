#![allow(dead_code)]

use paramosc::DriveParameters;

pub fn drive(g: f64, dg: f64) -> DriveParameters {
    DriveParameters::new(1.0, g, dg, 1.0, 0.0).unwrap()
}

/// Adaptive double-exponential quadrature on `[a, b]`.
pub fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64, abs_err: f64) -> f64 {
    quadrature::double_exponential::integrate(f, a, b, abs_err).integral
}

/// Splits `[a, b]` into 16 pieces so a narrow peak anywhere inside a wide
/// window is still resolved.
pub fn quad_split(f: impl Fn(f64) -> f64, a: f64, b: f64, abs_err: f64) -> f64 {
    let n = 16;
    let h = (b - a) / n as f64;
    (0..n)
        .map(|k| quad(&f, a + k as f64 * h, a + (k + 1) as f64 * h, abs_err / n as f64))
        .sum()
}

/// Iterated split quadrature over a rectangle.
pub fn quad2(f: impl Fn(f64, f64) -> f64, x: (f64, f64), y: (f64, f64), abs_err: f64) -> f64 {
    quad_split(|xv| quad_split(|yv| f(xv, yv), y.0, y.1, abs_err * 1e-2), x.0, x.1, abs_err)
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}
