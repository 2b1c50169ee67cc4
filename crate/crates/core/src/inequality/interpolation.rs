//! Interpolation, Nash and Poincaré inequalities on cubes, evaluated by tensor Gauss quadrature
//! of trigonometric probes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::cube::{integrate, CubeFunction, CubePoint};

/// Relative slack absorbing quadrature error when comparing the two sides.
pub const COMPARISON_SLACK: f64 = 1e-9;

/// Gauss panels and points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeQuadrature {
    pub panels: usize,
    pub gauss_points: usize,
}

impl CubeQuadrature {
    /// 10⁴ nodes on an interval, 192² on a square, 36³ on a cube.
    #[must_use]
    pub fn for_dim(n: usize) -> Self {
        match n {
            1 => Self { panels: 2500, gauss_points: 4 },
            2 => Self { panels: 48, gauss_points: 4 },
            _ => Self { panels: 12, gauss_points: 3 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    /// Right side with the constant applied.
    pub rhs: f64,
    pub constant: f64,
    /// lhs over the constant-free right side; the smallest constant that would still pass.
    pub empirical_constant: f64,
    pub pass: bool,
}

impl InequalityCheck {
    /// `scale` is ∫|u|^p, the size of the rounding error in either side.
    fn new(lhs: f64, core: f64, constant: f64, scale: f64) -> Self {
        let rhs = constant * core;
        let floor = 1e-12 * scale;
        Self {
            lhs,
            rhs,
            constant,
            // A left side at rounding level needs no constant.
            empirical_constant: if lhs <= floor { 0.0 } else { crate::report::ratio(lhs, core) },
            pass: lhs <= rhs * (1.0 + COMPARISON_SLACK) + floor,
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("p must be ≥ 1, got {p}")))
    }
}

fn check_unit_interval(name: &str, e: f64) -> Result<()> {
    if e > 0.0 && e < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must lie in (0, 1), got {e}")))
    }
}

fn sample(u: &CubeFunction, lo: f64, hi: f64) -> Result<Vec<CubePoint>> {
    let q = CubeQuadrature::for_dim(u.n);
    u.sample(lo, hi, q.panels, q.gauss_points)
}

/// Unit-cube sample without second derivatives.
pub fn sample_first_order(u: &CubeFunction) -> Result<Vec<CubePoint>> {
    let q = CubeQuadrature::for_dim(u.n);
    u.sample_first_order(0.0, 1.0, q.panels, q.gauss_points)
}

/// Unit-cube sample with second derivatives.
pub fn sample_unit_cube(u: &CubeFunction) -> Result<Vec<CubePoint>> {
    sample(u, 0.0, 1.0)
}

/// x^p for x ≥ 0, exact and cheap at the common exponents.
fn pow(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if p == 2.0 {
        x * x
    } else {
        x.powf(p)
    }
}

/// |u′|^{p−1}|u″| with the convention |u′|⁰ = 1.
fn gradient_hessian_product(pt: &CubePoint, p: f64) -> f64 {
    pow(pt.gradient_norm, p - 1.0) * pt.hessian_norm
}

/// ∫₀^δ|u′|^p ≤ pδ∫₀^δ|u′|^{p−1}|u″| + 9^p δ^{−p}∫₀^δ|u|^p with the constants written out.
pub fn interp_1d_explicit(u: &CubeFunction, p: f64, delta: f64) -> Result<InequalityCheck> {
    if u.n != 1 {
        return Err(Error::DimensionOutOfRange { n: u.n, min: 1, max: 1 });
    }
    check_delta(delta)?;
    interp_1d_sampled(&sample(u, 0.0, delta)?, p, delta)
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("δ must lie in (0, 1], got {delta}")))
    }
}

/// [`interp_1d_explicit`] on points sampled over [0, δ].
pub fn interp_1d_sampled(pts: &[CubePoint], p: f64, delta: f64) -> Result<InequalityCheck> {
    check_p(p)?;
    check_delta(delta)?;
    let lhs = integrate(pts, |q| pow(q.gradient_norm, p));
    let mass = integrate(pts, |q| pow(q.value.abs(), p));
    let rhs = p * delta * integrate(pts, |q| gradient_hessian_product(q, p)) + 9f64.powf(p) * delta.powf(-p) * mass;
    Ok(InequalityCheck::new(lhs, rhs, 1.0, mass))
}

/// Sample over [0, δ] for [`interp_1d_sampled`].
pub fn sample_interval(u: &CubeFunction, delta: f64) -> Result<Vec<CubePoint>> {
    sample(u, 0.0, delta)
}

/// C_p = n^{max(1, p/2)}·2^p·9^p: the interval bound summed over directions.
#[must_use]
pub fn interp_cube_candidate(n: usize, p: f64) -> f64 {
    (n as f64).powf((p / 2.0).max(1.0)) * 18f64.powf(p)
}

/// ∫_Q|∇u|^p ≤ C_p(ε∫_Q|∇u|^{p−1}|D²u| + ε^{−p}∫_Q|u|^p).
pub fn interp_cube(u: &CubeFunction, p: f64, epsilon: f64, candidate: f64) -> Result<InequalityCheck> {
    interp_cube_sampled(&sample(u, 0.0, 1.0)?, p, epsilon, candidate)
}

/// [`interp_cube`] on points from [`CubeFunction::sample`] over the unit cube.
pub fn interp_cube_sampled(pts: &[CubePoint], p: f64, epsilon: f64, candidate: f64) -> Result<InequalityCheck> {
    check_p(p)?;
    check_unit_interval("ε", epsilon)?;
    let lhs = integrate(pts, |q| pow(q.gradient_norm, p));
    let mass = integrate(pts, |q| pow(q.value.abs(), p));
    let core = epsilon * integrate(pts, |q| gradient_hessian_product(q, p)) + epsilon.powf(-p) * mass;
    Ok(InequalityCheck::new(lhs, core, candidate, mass))
}

/// C_p = 2^{p−1}·max(nᵖ, 2^{n(p−1)}): Poincaré on cubes of side 1/k, k ∈ [1/ε̃, 2/ε̃).
#[must_use]
pub fn nash_candidate(n: usize, p: f64) -> f64 {
    2f64.powf(p - 1.0) * (n as f64).powf(p).max(2f64.powf(n as f64 * (p - 1.0)))
}

/// ∫_Q|u|^p ≤ C_p(ε̃^p∫_Q|∇u|^p + ε̃^{−n(p−1)}(∫_Q|u|)^p).
pub fn nash_cube(u: &CubeFunction, p: f64, epsilon: f64) -> Result<InequalityCheck> {
    nash_cube_sampled(u.n, &sample_first_order(u)?, p, epsilon)
}

/// [`nash_cube`] on points sampled over (0,1)ⁿ.
pub fn nash_cube_sampled(n: usize, pts: &[CubePoint], p: f64, epsilon: f64) -> Result<InequalityCheck> {
    check_p(p)?;
    check_unit_interval("ε̃", epsilon)?;
    let lhs = integrate(pts, |q| pow(q.value.abs(), p));
    let core = epsilon.powf(p) * integrate(pts, |q| pow(q.gradient_norm, p))
        + epsilon.powf(-(n as f64) * (p - 1.0)) * integrate(pts, |q| q.value.abs()).powf(p);
    Ok(InequalityCheck::new(lhs, core, nash_candidate(n, p), lhs))
}

/// ∫_Q|u − u_Q|^p ≤ nᵖ∫_Q|∇u|^p.
pub fn poincare_cube(u: &CubeFunction, p: f64) -> Result<InequalityCheck> {
    poincare_cube_sampled(u.n, &sample_first_order(u)?, p)
}

/// [`poincare_cube`] on points sampled over (0,1)ⁿ.
pub fn poincare_cube_sampled(n: usize, pts: &[CubePoint], p: f64) -> Result<InequalityCheck> {
    check_p(p)?;
    let mean = integrate(pts, |q| q.value);
    let lhs = integrate(pts, |q| pow((q.value - mean).abs(), p));
    let core = integrate(pts, |q| pow(q.gradient_norm, p));
    let mass = integrate(pts, |q| pow(q.value.abs(), p));
    Ok(InequalityCheck::new(lhs, core, (n as f64).powf(p), mass))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequality::cube::TrigTerm;
    use std::f64::consts::PI;

    fn sine_1d() -> CubeFunction {
        CubeFunction::new(1, 0.0, vec![0.0], vec![TrigTerm { coefficient: 1.0, frequencies: vec![1], sine: vec![true] }]).unwrap()
    }

    fn x1(n: usize) -> CubeFunction {
        let mut lin = vec![0.0; n];
        lin[0] = 1.0;
        CubeFunction::affine(0.0, lin).unwrap()
    }

    #[test]
    fn constant_passes_the_interval_bound() {
        let u = CubeFunction::affine(2.0, vec![0.0]).unwrap();
        let c = interp_1d_explicit(&u, 2.0, 0.5).unwrap();
        assert_eq!(c.lhs, 0.0);
        // 9² δ^{−2} c² δ = 81·4·4·0.5.
        assert!((c.rhs - 81.0 * 4.0 * 4.0 * 0.5).abs() < 1e-9);
        assert!(c.pass);
    }

    #[test]
    fn sine_closed_forms() {
        // ∫|u′| = 4, ∫|u″| = 8π, ∫|u| = 2/π over one period.
        let c = interp_1d_explicit(&sine_1d(), 1.0, 1.0).unwrap();
        assert!((c.lhs - 4.0).abs() < 1e-6, "{}", c.lhs);
        assert!((c.rhs - (8.0 * PI + 18.0 / PI)).abs() < 1e-5, "{}", c.rhs);
        assert!(c.pass);
    }

    #[test]
    fn poincare_on_the_first_coordinate() {
        let c = poincare_cube(&x1(2), 2.0).unwrap();
        assert!((c.lhs - 1.0 / 12.0).abs() < 1e-12);
        assert!((c.rhs - 4.0).abs() < 1e-10, "{c:?}");
        assert!(c.pass);
        let zero = poincare_cube(&CubeFunction::affine(3.0, vec![0.0, 0.0]).unwrap(), 2.0).unwrap();
        assert!(zero.lhs.abs() < 1e-20 && zero.rhs == 0.0 && zero.pass, "{zero:?}");
    }

    #[test]
    fn nash_on_the_first_coordinate() {
        let c = nash_cube(&x1(2), 2.0, 0.5).unwrap();
        assert!((c.lhs - 1.0 / 3.0).abs() < 1e-12);
        // ε̃²·1 + ε̃^{−2}·(1/2)² = 1/4 + 1.
        assert!((c.rhs / c.constant - 1.25).abs() < 1e-12);
        assert!(c.pass);
    }

    #[test]
    fn interpolation_on_the_first_coordinate() {
        let c = interp_cube(&x1(2), 2.0, 0.5, interp_cube_candidate(2, 2.0)).unwrap();
        assert!((c.lhs - 1.0).abs() < 1e-12);
        // D²u = 0, so the core is ε^{−2}∫x₁² = 4/3.
        assert!((c.empirical_constant - 0.75).abs() < 1e-12);
        assert!(c.pass);
        let zero = interp_cube(&CubeFunction::affine(0.0, vec![0.0, 0.0]).unwrap(), 2.0, 0.5, 1.0).unwrap();
        assert!(zero.pass && zero.lhs == 0.0);
    }

    #[test]
    fn candidate_constants_for_p_up_to_two() {
        assert_eq!(interp_cube_candidate(2, 1.0), 2.0 * 18.0);
        assert_eq!(interp_cube_candidate(3, 2.0), 3.0 * 324.0);
        assert_eq!(nash_candidate(2, 2.0), 2.0 * 4.0);
    }
}
