//! The family u^δ(x) = x_n/|(x′, x_n + δ)| on A⁺_{1/2,1}: nonnegative, superharmonic, with
//! |∂_r u^δ| ≤ Cδ, yet ‖u^δ‖_{L¹}/‖∂_r u^δ‖_{L¹} blows up as δ → 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::composite_gauss;

/// Tolerance on −Δu^δ from below.
pub const SUPERHARMONIC_TOLERANCE: f64 = 1e-8;
/// Step of the fourth-order difference Laplacian.
const LAPLACIAN_STEP: f64 = 2e-3;
const GAUSS_POINTS: usize = 8;

/// ρ = |(x′, x_n + δ)| with |x′| = `lateral`.
fn rho(lateral: f64, height: f64, delta: f64) -> f64 {
    lateral.hypot(height + delta)
}

/// u^δ at a point with lateral distance `lateral` and height `height`.
#[must_use]
pub fn value(lateral: f64, height: f64, delta: f64) -> f64 {
    let d = rho(lateral, height, delta);
    if d == 0.0 {
        0.0
    } else {
        height / d
    }
}

/// ∂_r u^δ = x_n δ (x_n + δ)/(r ρ³), ρ = |(x′, x_n + δ)|.
#[must_use]
pub fn radial_derivative(lateral: f64, height: f64, delta: f64) -> f64 {
    let r = lateral.hypot(height);
    let d = rho(lateral, height, delta);
    height * delta * (height + delta) / (r * d * d * d)
}

/// −Δu^δ = [(n − 1)x_n + 2δ]/ρ³ in dimension n.
#[must_use]
pub fn minus_laplacian(n: usize, lateral: f64, height: f64, delta: f64) -> f64 {
    let d = rho(lateral, height, delta);
    ((n as f64 - 1.0) * height + 2.0 * delta) / (d * d * d)
}

/// u^δ on Cartesian coordinates in dimension n = `x.len()`.
fn value_cartesian(x: &[f64], delta: f64) -> f64 {
    let n = x.len();
    let lateral = x[..n - 1].iter().map(|v| v * v).sum::<f64>().sqrt();
    value(lateral, x[n - 1], delta)
}

/// Fourth-order central difference Laplacian.
fn laplacian_fd(x: &[f64], delta: f64, h: f64) -> f64 {
    let mut total = 0.0;
    let mut y = x.to_vec();
    let centre = value_cartesian(x, delta);
    for k in 0..x.len() {
        let mut at = |s: f64| {
            y[k] = x[k] + s;
            let v = value_cartesian(&y, delta);
            y[k] = x[k];
            v
        };
        let (p1, m1, p2, m2) = (at(h), at(-h), at(2.0 * h), at(-2.0 * h));
        total += (-p2 + 16.0 * p1 - 30.0 * centre + 16.0 * m1 - m2) / (12.0 * h * h);
    }
    total
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Remark81Report {
    pub delta: f64,
    pub n: usize,
    /// min over probe points of −Δu^δ by finite differences.
    pub min_minus_laplacian: f64,
    /// max |FD − closed form| of the Laplacian over the probes.
    pub laplacian_formula_error: f64,
    pub superharmonic: bool,
    /// max |∂_r u^δ|/δ over the probes; `None` at δ = 0.
    pub radial_sup_over_delta: Option<f64>,
    /// max |centred difference − closed form| of ∂_r u^δ over the probes.
    pub radial_formula_error: f64,
    pub l1: f64,
    pub radial_l1: f64,
    /// ‖u^δ‖_{L¹}/‖∂_r u^δ‖_{L¹}; infinite when the denominator vanishes.
    pub ratio: f64,
}

/// Probe points (lateral, height) on the closed half-annulus, in the plane through the x_n axis.
fn probes() -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    for i in 0..=20 {
        let r = 0.5 + 0.5 * i as f64 / 20.0;
        for j in 0..=40 {
            let psi = std::f64::consts::FRAC_PI_2 * j as f64 / 40.0;
            // psi measured from the flat part; both signs of x₁ are covered by symmetry in n = 2.
            pts.push((r * psi.cos(), r * psi.sin()));
        }
    }
    pts
}

/// Angles in (0, π/2] from the flat part, graded geometrically toward it down to `finest`.
fn graded_angles(finest: f64) -> Vec<f64> {
    let half = std::f64::consts::FRAC_PI_2;
    let mut breaks = vec![0.0];
    let mut w = finest;
    let mut x = 0.0;
    while x + w < half / 8.0 {
        x += w;
        breaks.push(x);
        w *= 1.5;
    }
    let rest = half - x;
    for k in 1..=16 {
        breaks.push(x + rest * k as f64 / 16.0);
    }
    breaks
}

/// (‖u^δ‖_{L¹}, ‖∂_r u^δ‖_{L¹}) over A⁺_{1/2,1} in dimension 2 or 3.
fn norms(n: usize, delta: f64) -> (f64, f64) {
    let finest = (delta / 50.0).clamp(1e-9, 1e-2);
    let (psi, wpsi) = composite_gauss(&graded_angles(finest), GAUSS_POINTS);
    let r_breaks: Vec<f64> = (0..=16).map(|k| 0.5 + 0.5 * k as f64 / 16.0).collect();
    let (rs, wr) = composite_gauss(&r_breaks, GAUSS_POINTS);
    let (mut l1, mut radial) = (0.0, 0.0);
    for (r, a) in rs.iter().zip(&wr) {
        for (p, b) in psi.iter().zip(&wpsi) {
            // p is the angle from the flat part: lateral = r cos p, height = r sin p.
            let (lat, h) = (r * p.cos(), r * p.sin());
            let w = match n {
                // Two quarter-planes, each with area element r dr dp.
                2 => 2.0 * a * b * r,
                // Area element r² cos p dr dp, times 2π for the rotation about the x_n axis.
                _ => 2.0 * std::f64::consts::PI * a * b * r * r * p.cos(),
            };
            l1 += w * value(lat, h, delta).abs();
            radial += w * radial_derivative(lat, h, delta).abs();
        }
    }
    (l1, radial)
}

/// Builds the δ-family member, checks superharmonicity and the radial derivative formula, and
/// computes the L¹ ratio.
pub fn remark81_counterexample(delta: f64, n: usize) -> Result<Remark81Report> {
    if !(2..=3).contains(&n) {
        return Err(Error::DimensionOutOfRange { n, min: 2, max: 3 });
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidArgument(format!("δ must lie in [0, 1], got {delta}")));
    }
    let h = LAPLACIAN_STEP;
    let (mut min_lap, mut lap_err, mut sup_ratio, mut radial_err) = (f64::INFINITY, 0.0f64, 0.0f64, 0.0f64);
    for (lat, height) in probes() {
        // The x_{n} axis sits at lateral = 0; in n = 3 place the lateral offset along x₁.
        let x: Vec<f64> = if n == 2 { vec![lat, height] } else { vec![lat, 0.0, height] };
        // The only singularity sits at x = −δe_n, at distance ≥ 1/2 from every probe.
        let fd = -laplacian_fd(&x, delta, h);
        min_lap = min_lap.min(fd);
        let exact = minus_laplacian(n, lat, height, delta);
        lap_err = lap_err.max((fd - exact).abs() / (1.0 + exact.abs()));
        let dr = radial_derivative(lat, height, delta);
        let r = lat.hypot(height);
        let step = 1e-6;
        let (out, inn) = ((r + step) / r, (r - step) / r);
        let fd = (value(lat * out, height * out, delta) - value(lat * inn, height * inn, delta)) / (2.0 * step);
        radial_err = radial_err.max((fd - dr).abs());
        if delta > 0.0 {
            sup_ratio = sup_ratio.max(dr.abs() / delta);
        }
    }
    let (l1, radial_l1) = norms(n, delta);
    let ratio = if radial_l1 > 0.0 { l1 / radial_l1 } else { f64::INFINITY };
    if !ratio.is_finite() && delta > 0.0 {
        return Err(Error::NonFiniteValue { index: 0, value: ratio });
    }
    Ok(Remark81Report {
        delta,
        n,
        min_minus_laplacian: min_lap,
        laplacian_formula_error: lap_err,
        superharmonic: min_lap >= -SUPERHARMONIC_TOLERANCE,
        radial_sup_over_delta: (delta > 0.0).then_some(sup_ratio),
        radial_formula_error: radial_err,
        l1,
        radial_l1,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limit_object_is_zero_homogeneous() {
        for (lat, h) in [(0.3, 0.4), (0.9, 0.1), (0.0, 0.7)] {
            assert_eq!(radial_derivative(lat, h, 0.0), 0.0);
            assert!((value(2.0 * lat, 2.0 * h, 0.0) - value(lat, h, 0.0)).abs() < 1e-15);
        }
        let rep = remark81_counterexample(0.0, 2).unwrap();
        assert_eq!(rep.radial_l1, 0.0);
        assert!(rep.ratio.is_infinite());
    }

    #[test]
    fn smooth_member_is_superharmonic_with_finite_ratio() {
        for n in [2, 3] {
            let rep = remark81_counterexample(1.0, n).unwrap();
            assert!(rep.superharmonic, "{rep:?}");
            assert!(rep.laplacian_formula_error < 1e-6, "{}", rep.laplacian_formula_error);
            assert!(rep.radial_formula_error < 1e-6, "{}", rep.radial_formula_error);
            assert!(rep.ratio.is_finite() && rep.ratio > 0.0);
        }
    }

    #[test]
    fn planar_l1_norm_matches_a_direct_polar_sum() {
        // Independent route: midpoint rule in (r, φ) over the upper half-annulus.
        let delta = 0.3;
        let (m, k) = (400, 1600);
        let mut direct = 0.0;
        for i in 0..m {
            let r = 0.5 + 0.5 * (i as f64 + 0.5) / m as f64;
            for j in 0..k {
                let phi = std::f64::consts::PI * (j as f64 + 0.5) / k as f64;
                let (x1, x2) = (r * phi.cos(), r * phi.sin());
                direct += value(x1.abs(), x2, delta) * r * (0.5 / m as f64) * (std::f64::consts::PI / k as f64);
            }
        }
        let (l1, _) = norms(2, delta);
        assert!((l1 - direct).abs() < 1e-5 * direct, "{l1} vs {direct}");
    }

    #[test]
    fn ratio_grows_as_delta_shrinks() {
        for n in [2, 3] {
            let r: Vec<f64> = [1e-1, 1e-2, 1e-3].iter().map(|&d| remark81_counterexample(d, n).unwrap().ratio).collect();
            assert!(r[0] < r[1] && r[1] < r[2], "{r:?}");
            assert!(r[2] / r[0] >= 10.0);
        }
    }

    #[test]
    fn rejects_dimensions_outside_two_and_three() {
        assert!(remark81_counterexample(0.1, 4).is_err());
        assert!(remark81_counterexample(-0.1, 2).is_err());
    }
}
