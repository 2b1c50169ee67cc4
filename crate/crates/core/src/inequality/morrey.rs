//! Morrey-type Hölder bounds driven by radial derivatives only.
//!
//! With the growth hypothesis ∫_{B_ρ(y)} |u_{r_y}| ≤ C̄ ρ^{n−1+α}, the mean-value chain gives
//! |u(y) − u_S| ≤ L C̄ d^{n+α}/|S| with L = (1 + (n−1)/α)/n for S ⊂ B_d(y).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{ball_volume, composite_gauss, gauss_legendre_on, sphere_measure};

/// A probe with exact value and gradient.
pub trait ProbeFunction: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    /// Profile and its derivative at radius r when the probe is radial about the origin.
    fn radial_profile(&self, _r: f64) -> Option<(f64, f64)> {
        None
    }
}

/// Radial probe u(x) = g(|x|) given by its profile and derivative.
pub struct RadialProbe<G, D> {
    pub n: usize,
    pub profile: G,
    pub derivative: D,
}

impl<G: Fn(f64) -> f64 + Sync, D: Fn(f64) -> f64 + Sync> ProbeFunction for RadialProbe<G, D> {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.profile)(norm(x))
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let r = norm(x);
        let d = (self.derivative)(r);
        x.iter().map(|&xi| if r > 0.0 { d * xi / r } else { 0.0 }).collect()
    }

    fn radial_profile(&self, r: f64) -> Option<(f64, f64)> {
        Some(((self.profile)(r), (self.derivative)(r)))
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// (1 + (n−1)/α)/n.
#[must_use]
pub fn lemma_constant(n: usize, alpha: f64) -> f64 {
    (1.0 + (n as f64 - 1.0) / alpha) / n as f64
}

/// |B₁(0) ∩ B₁(e₁)|: the lens S = B_d(y) ∩ B_d(ȳ) with d = |y − ȳ| has volume this times dⁿ.
#[must_use]
pub fn lens_fraction(n: usize) -> f64 {
    let (x, w) = gauss_legendre_on(64, 0.5, 1.0);
    let cap: f64 = x.iter().zip(&w).map(|(&t, &wt)| wt * (1.0 - t * t).powf((n as f64 - 1.0) / 2.0)).sum();
    2.0 * ball_volume(n - 1) * cap
}

/// Seminorm bound 2 L C̄ / c_n.
#[must_use]
pub fn seminorm_bound(n: usize, alpha: f64, cbar: f64) -> f64 {
    2.0 * lemma_constant(n, alpha) * cbar / lens_fraction(n)
}

/// Hölder norm bound on B_{1/4}: L C̄ (2 + 2^{−α})/c_n + 4ⁿ‖u‖_{L¹(B₁)}/c_n.
#[must_use]
pub fn norm_bound(n: usize, alpha: f64, cbar: f64, l1_norm: f64) -> f64 {
    let c = lens_fraction(n);
    lemma_constant(n, alpha) * cbar * (2.0 + 2f64.powf(-alpha)) / c + 4f64.powi(n as i32) * l1_norm / c
}

/// ∫_{B_ρ(y)} |u_{r_y}| dx for a radial u with profile derivative `du`, with |y| = `y_norm`.
///
/// Axisymmetric about the line through 0 and y: x = y + sω, ω at angle θ to y/|y|.
pub fn radial_derivative_mass(n: usize, du: impl Fn(f64) -> f64, y_norm: f64, rho: f64) -> f64 {
    if y_norm == 0.0 {
        let (s, w) = composite_gauss(&graded(rho), 8);
        return sphere_measure(n) * s.iter().zip(&w).map(|(&r, &wt)| wt * du(r).abs() * r.powi(n as i32 - 1)).sum::<f64>();
    }
    let (s, ws) = composite_gauss(&graded(rho), 8);
    let breaks: Vec<f64> = (0..=48).map(|k| std::f64::consts::PI * k as f64 / 48.0).collect();
    let (th, wt) = composite_gauss(&breaks, 8);
    let ang = if n >= 2 { sphere_measure(n - 1) } else { 1.0 };
    let mut total = 0.0;
    for (&si, &wsi) in s.iter().zip(&ws) {
        let mut inner = 0.0;
        for (&t, &wti) in th.iter().zip(&wt) {
            let c = t.cos();
            let r = (y_norm * y_norm + si * si + 2.0 * y_norm * si * c).sqrt();
            if r == 0.0 {
                continue;
            }
            let radial_part = (si + y_norm * c) / r;
            inner += wti * t.sin().powi(n as i32 - 2) * (du(r) * radial_part).abs();
        }
        total += wsi * si.powi(n as i32 - 1) * inner;
    }
    ang * total
}

/// Panels [0, ρ2⁻²⁰], …, [ρ/2, ρ] resolving integrable singularities at the centre.
fn graded(rho: f64) -> Vec<f64> {
    let mut b = vec![0.0];
    b.extend((0..=20).rev().map(|k| rho * 0.5f64.powi(k)));
    b
}

/// ∫_{B_ρ(y)} |u_{r_y}| and the ball average of u for a general probe in n = 3.
pub fn spherical_masses(probe: &dyn ProbeFunction, y: &[f64], rho: f64) -> Result<(f64, f64)> {
    if probe.dim() != 3 || y.len() != 3 {
        return Err(Error::InvalidArgument("general-probe quadrature is three-dimensional".into()));
    }
    let (s, ws) = gauss_legendre_on(16, 0.0, rho);
    let (ct, wc) = composite_gauss(&[-1.0, -0.5, 0.0, 0.5, 1.0], 16);
    let m_phi = 256;
    let mut radial = 0.0;
    let mut mass = 0.0;
    for (&si, &wsi) in s.iter().zip(&ws) {
        for (&c, &wci) in ct.iter().zip(&wc) {
            let st = (1.0 - c * c).sqrt();
            for k in 0..m_phi {
                let phi = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / m_phi as f64;
                let om = [st * phi.cos(), st * phi.sin(), c];
                let x = [y[0] + si * om[0], y[1] + si * om[1], y[2] + si * om[2]];
                let g = probe.gradient(&x);
                let w = wsi * wci * (2.0 * std::f64::consts::PI / m_phi as f64) * si * si;
                radial += w * (g[0] * om[0] + g[1] * om[1] + g[2] * om[2]).abs();
                mass += w * probe.value(&x);
            }
        }
    }
    Ok((radial, mass / ball_volume(3) / rho.powi(3)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorreyReport {
    pub alpha: f64,
    pub cbar: f64,
    pub lemma_constant: f64,
    /// Largest |u(y) − u_{B_d(y)}| / (L C̄ d^{n+α}/|B_d|) over probed (y, d).
    pub worst_lemma_ratio: f64,
    pub pass: bool,
}

/// Checks the growth hypothesis on `(centers, radii)` and the mean-value conclusion with S = B_d(y).
pub fn morrey_check(
    probe: &dyn ProbeFunction,
    alpha: f64,
    cbar: f64,
    centers: &[Vec<f64>],
    radii: &[f64],
) -> Result<MorreyReport> {
    let n = probe.dim();
    let l = lemma_constant(n, alpha);
    let mut worst: f64 = 0.0;
    for y in centers {
        for &rho in radii {
            let (radial, avg) = masses(probe, y, rho)?;
            let allowed = cbar * rho.powf(n as f64 - 1.0 + alpha);
            if radial > allowed * (1.0 + 1e-9) + 1e-14 {
                return Err(Error::HypothesisViolated(format!(
                    "∫|u_r| over B_{rho}({y:?}) = {radial:.6e} exceeds C̄ρ^(n−1+α) = {allowed:.6e}"
                )));
            }
            let dev = (probe.value(y) - avg).abs();
            let bound = l * cbar * rho.powf(alpha) / ball_volume(n);
            let r = if dev == 0.0 { 0.0 } else { dev / bound };
            worst = worst.max(r);
        }
    }
    Ok(MorreyReport { alpha, cbar, lemma_constant: l, worst_lemma_ratio: worst, pass: worst <= 1.0 + 1e-9 })
}

fn masses(probe: &dyn ProbeFunction, y: &[f64], rho: f64) -> Result<(f64, f64)> {
    let n = probe.dim();
    if probe.radial_profile(1.0).is_some() && y.iter().all(|&v| v == 0.0) {
        let du = |r: f64| probe.radial_profile(r).map_or(0.0, |p| p.1);
        let (s, w) = composite_gauss(&graded(rho), 8);
        let integral: f64 =
            s.iter().zip(&w).map(|(&r, &wt)| wt * probe.radial_profile(r).map_or(0.0, |p| p.0) * r.powi(n as i32 - 1)).sum();
        let avg = sphere_measure(n) * integral / (ball_volume(n) * rho.powi(n as i32));
        return Ok((radial_derivative_mass(n, du, 0.0, rho), avg));
    }
    if n == 3 {
        spherical_masses(probe, y, rho)
    } else {
        Err(Error::InvalidArgument(format!("general probes in n = {} are not supported", probe.dim())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn lens_volume_in_three_dimensions() {
        assert!((lens_fraction(3) - 5.0 * PI / 12.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_mass_of_power_profile() {
        // ∫_{B_ρ} |d/dr r^α| = |S²| α ρ^{2+α}/(2+α) in n = 3.
        let a = 0.5;
        let rho = 0.3;
        let m = radial_derivative_mass(3, |r| a * r.powf(a - 1.0), 0.0, rho);
        let exact = 4.0 * PI * a * rho.powf(2.0 + a) / (2.0 + a);
        assert!((m / exact - 1.0).abs() < 1e-6, "{m} vs {exact}");
    }

    #[test]
    fn axisymmetric_and_spherical_kernels_agree_off_centre() {
        let probe = RadialProbe { n: 3, profile: |r: f64| r * r, derivative: |r: f64| 2.0 * r };
        let y = [0.0, 0.0, 0.2];
        let (sph, _) = spherical_masses(&probe, &y, 0.1).unwrap();
        let axi = radial_derivative_mass(3, |r| 2.0 * r, 0.2, 0.1);
        assert!((sph / axi - 1.0).abs() < 1e-3, "{sph} vs {axi}");
    }

    #[test]
    fn linear_probe_meets_lipschitz_bound() {
        struct X1;
        impl ProbeFunction for X1 {
            fn dim(&self) -> usize {
                3
            }
            fn value(&self, x: &[f64]) -> f64 {
                x[0]
            }
            fn gradient(&self, _: &[f64]) -> Vec<f64> {
                vec![1.0, 0.0, 0.0]
            }
        }
        // ∫_{B_ρ(y)} |ω₁| = 2πρ³/3 exactly, so C̄ = 2π/3 with α = 1.
        let cbar = 2.0 * PI / 3.0;
        let rep = morrey_check(&X1, 1.0, cbar * (1.0 + 1e-4), &[vec![0.1, 0.0, 0.0]], &[0.1, 0.2]).unwrap();
        assert!(rep.pass);
        assert!(1.0 <= seminorm_bound(3, 1.0, cbar));
    }
}
