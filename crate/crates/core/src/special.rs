//! Special functions and fixed quadrature rules.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function by the Lanczos approximation (g = 7, nine terms), with reflection for x < 1/2.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// Surface measure |S^{n-1}| = 2π^{n/2}/Γ(n/2) of the unit sphere in R^n.
pub fn sphere_measure(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

/// Volume |B_1| of the unit ball in R^n.
pub fn ball_volume(n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    sphere_measure(n) / n as f64
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, z);
        dp = if d != 0.0 { d } else { dp };
        x[i] = -z;
        x[m - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(m: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to [a, b].
pub fn gauss_legendre_on(m: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(m);
    let c = 0.5 * (b - a);
    let d = 0.5 * (b + a);
    (x.iter().map(|t| c * t + d).collect(), w.iter().map(|v| c * v).collect())
}

/// Composite Gauss–Legendre rule over consecutive breakpoints.
pub fn composite_gauss(breaks: &[f64], m: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(m);
    let mut nodes = Vec::with_capacity(m * breaks.len());
    let mut weights = Vec::with_capacity(m * breaks.len());
    for pair in breaks.windows(2) {
        let c = 0.5 * (pair[1] - pair[0]);
        let d = 0.5 * (pair[1] + pair[0]);
        for (t, v) in x.iter().zip(&w) {
            nodes.push(c * t + d);
            weights.push(c * v);
        }
    }
    (nodes, weights)
}

/// Breakpoints on [a, b] graded geometrically toward `a` down to width `finest`.
pub fn graded_breaks(a: f64, b: f64, finest: f64, uniform_panels: usize) -> Vec<f64> {
    let len = b - a;
    let mut breaks = vec![a];
    let mut w = finest.min(len / uniform_panels.max(1) as f64);
    let coarse = len / uniform_panels.max(1) as f64;
    let mut x = a;
    while x + w < b - 1e-15 * len && w < coarse {
        x += w;
        breaks.push(x);
        w *= 2.0;
    }
    let rest = b - x;
    let panels = ((rest / coarse).ceil() as usize).max(1);
    for k in 1..=panels {
        breaks.push(x + rest * k as f64 / panels as f64);
    }
    breaks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_matches_factorials_and_half_integers() {
        assert!((gamma(5.0) - 24.0).abs() < 1e-11);
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-13);
        assert!((gamma(1.5) - 0.5 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn sphere_measure_low_dimensions() {
        assert!((sphere_measure(2) - 2.0 * PI).abs() < 1e-12);
        assert!((sphere_measure(3) - 4.0 * PI).abs() < 1e-12);
        assert!((sphere_measure(4) - 2.0 * PI * PI).abs() < 1e-12);
        assert!((ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre_on(6, 0.0, 2.0);
        let s: f64 = x.iter().zip(&w).map(|(t, v)| v * t.powi(11)).sum();
        assert!((s - 2f64.powi(12) / 12.0).abs() < 1e-10);
    }

    #[test]
    fn graded_breaks_cover_interval() {
        let b = graded_breaks(0.0, 1.0, 1e-6, 8);
        assert_eq!(b[0], 0.0);
        assert!((b[b.len() - 1] - 1.0).abs() < 1e-15);
        assert!(b.windows(2).all(|p| p[1] > p[0]));
    }
}
