//! L¹ control of a superharmonic function minus a constant by its radial derivative, on
//! B₁ ∖ B_{1/2} and on B₁, in three dimensions.
//!
//! Probes are Σ cᵢ/|x − xᵢ| with cᵢ ≥ 0 and poles outside B̄₁, plus a solid harmonic, minus
//! a|x − z|² with a ≥ 0; so −Δu = 6a ≥ 0 exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::composite_gauss;
use crate::stats::weighted_median;

use super::harmonic::{HarmonicProbe, SphereRule};

/// Step of the fourth-order difference Laplacian used to confirm superharmonicity.
const LAPLACIAN_STEP: f64 = 1e-3;
pub const SUPERHARMONIC_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointMass {
    pub charge: f64,
    pub position: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperharmonicProbe {
    pub masses: Vec<PointMass>,
    pub harmonic: HarmonicProbe,
    /// a in −a|x − z|².
    pub concavity: f64,
    pub concavity_center: [f64; 3],
}

fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl SuperharmonicProbe {
    /// u = c/|x − x₀|.
    #[must_use]
    pub fn single_pole(charge: f64, position: [f64; 3]) -> Self {
        Self {
            masses: vec![PointMass { charge, position }],
            harmonic: HarmonicProbe { degree: 0, coefficients: vec![0.0] },
            concavity: 0.0,
            concavity_center: [0.0; 3],
        }
    }

    /// Nonnegative charges with poles outside B̄₁ and a ≥ 0.
    pub fn validate(&self) -> Result<()> {
        for m in &self.masses {
            let r = dot(&m.position, &m.position).sqrt();
            if m.charge < 0.0 || r <= 1.0 {
                return Err(Error::NotSuperharmonic { point: m.position.to_vec(), value: if m.charge < 0.0 { m.charge } else { f64::NAN } });
            }
        }
        if self.concavity < 0.0 {
            return Err(Error::NotSuperharmonic { point: self.concavity_center.to_vec(), value: 6.0 * self.concavity });
        }
        Ok(())
    }

    /// Exact −Δu inside B₁.
    #[must_use]
    pub fn minus_laplacian(&self) -> f64 {
        6.0 * self.concavity
    }

    /// (u, u_r) at radius r > 0 in direction ω = (sin θ cos φ, sin θ sin φ, cos θ).
    #[must_use]
    pub fn value_and_radial(&self, r: f64, cos_theta: f64, phi: f64) -> (f64, f64) {
        let s = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
        let omega = [s * phi.cos(), s * phi.sin(), cos_theta];
        let x = [r * omega[0], r * omega[1], r * omega[2]];
        let (hv, hw) = self.harmonic.value_and_radial(r, cos_theta, phi);
        let mut value = hv;
        let mut radial = if r > 0.0 { hw / r } else { 0.0 };
        for m in &self.masses {
            let d = sub(&x, &m.position);
            let dist = dot(&d, &d).sqrt();
            value += m.charge / dist;
            radial -= m.charge * dot(&d, &omega) / (dist * dist * dist);
        }
        let d = sub(&x, &self.concavity_center);
        value -= self.concavity * dot(&d, &d);
        radial -= 2.0 * self.concavity * dot(&d, &omega);
        (value, radial)
    }

    #[must_use]
    pub fn value(&self, x: &[f64; 3]) -> f64 {
        let r = dot(x, x).sqrt();
        if r == 0.0 {
            return self.value_and_radial(0.0, 1.0, 0.0).0;
        }
        self.value_and_radial(r, x[2] / r, x[1].atan2(x[0])).0
    }

    /// −Δu at x by the fourth-order five-point stencil in each direction.
    #[must_use]
    pub fn minus_laplacian_fd(&self, x: &[f64; 3]) -> f64 {
        let h = LAPLACIAN_STEP;
        let centre = self.value(x);
        let mut total = 0.0;
        for k in 0..3 {
            let at = |s: f64| {
                let mut y = *x;
                y[k] += s;
                self.value(&y)
            };
            total += (-at(2.0 * h) + 16.0 * at(h) - 30.0 * centre + 16.0 * at(-h) - at(-2.0 * h)) / (12.0 * h * h);
        }
        -total
    }
}

/// Radial Gauss nodes on [lo, 1] times the sphere rule, with weights r² dr dω.
#[derive(Debug, Clone, PartialEq)]
struct ShellRule {
    r: Vec<f64>,
    cos_theta: Vec<f64>,
    phi: Vec<f64>,
    weight: Vec<f64>,
    /// r ≥ 1/2.
    outer: Vec<bool>,
}

fn shell_rule(sphere: &SphereRule) -> ShellRule {
    let breaks = [0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0];
    let (rs, wr) = composite_gauss(&breaks, 4);
    let mut rule = ShellRule { r: Vec::new(), cos_theta: Vec::new(), phi: Vec::new(), weight: Vec::new(), outer: Vec::new() };
    for (r, w) in rs.iter().zip(&wr) {
        for k in 0..sphere.weights.len() {
            rule.r.push(*r);
            rule.cos_theta.push(sphere.cos_theta[k]);
            rule.phi.push(sphere.phi[k]);
            rule.weight.push(w * r * r * sphere.weights[k]);
            rule.outer.push(*r >= 0.5);
        }
    }
    rule
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperharmonicReport {
    /// L¹-optimal shift on the annulus: the weighted median of u there.
    pub shift_annulus: f64,
    /// L¹-optimal shift on the ball.
    pub shift_ball: f64,
    /// Median of the trace on ∂B₁.
    pub shift_sphere_median: f64,
    pub deviation_annulus: f64,
    pub radial_annulus: f64,
    pub deviation_ball: f64,
    pub radial_ball: f64,
    /// ‖u − t‖_{L¹(B₁∖B_{1/2})}/‖u_r‖_{L¹(B₁∖B_{1/2})} with the optimal t.
    pub constant_annulus: f64,
    /// Same ratio with the sphere median as t.
    pub constant_annulus_median: f64,
    /// ‖u − t‖_{L¹(B₁)}/‖u_r‖_{L¹(B₁)}.
    pub constant_ball: f64,
    /// ‖u − t‖_{L¹(B₁)}/‖u_r‖_{L¹(B₁∖B_{1/2})}.
    pub constant_strengthened: f64,
}

impl SuperharmonicReport {
    /// Largest of the three constants with optimal shifts.
    #[must_use]
    pub fn worst_constant(&self) -> f64 {
        self.constant_annulus.max(self.constant_ball).max(self.constant_strengthened)
    }
}

/// Evaluates both sides of the annulus, ball and strengthened bounds for one probe.
pub fn superharmonic_l1_control(u: &SuperharmonicProbe, sphere: &SphereRule) -> Result<SuperharmonicReport> {
    u.validate()?;
    let shell = shell_rule(sphere);
    let (vals, radial): (Vec<f64>, Vec<f64>) =
        (0..shell.r.len()).map(|k| u.value_and_radial(shell.r[k], shell.cos_theta[k], shell.phi[k])).unzip();
    let annulus_weights: Vec<f64> = shell.weight.iter().zip(&shell.outer).map(|(w, o)| if *o { *w } else { 0.0 }).collect();
    let t_annulus = weighted_median(&vals, &annulus_weights);
    let t_ball = weighted_median(&vals, &shell.weight);
    let trace: Vec<f64> = (0..sphere.weights.len()).map(|k| u.value_and_radial(1.0, sphere.cos_theta[k], sphere.phi[k]).0).collect();
    let t_sphere = weighted_median(&trace, &sphere.weights);
    let l1 = |t: f64, weights: &[f64]| vals.iter().zip(weights).map(|(v, w)| w * (v - t).abs()).sum::<f64>();
    let radial_l1 = |weights: &[f64]| radial.iter().zip(weights).map(|(v, w)| w * v.abs()).sum::<f64>();
    let deviation_annulus = l1(t_annulus, &annulus_weights);
    let radial_annulus = radial_l1(&annulus_weights);
    let deviation_ball = l1(t_ball, &shell.weight);
    let radial_ball = radial_l1(&shell.weight);
    let ratio = crate::report::ratio;
    Ok(SuperharmonicReport {
        shift_annulus: t_annulus,
        shift_ball: t_ball,
        shift_sphere_median: t_sphere,
        deviation_annulus,
        radial_annulus,
        deviation_ball,
        radial_ball,
        constant_annulus: ratio(deviation_annulus, radial_annulus),
        constant_annulus_median: ratio(l1(t_sphere, &annulus_weights), radial_annulus),
        constant_ball: ratio(deviation_ball, radial_ball),
        constant_strengthened: ratio(deviation_ball, radial_annulus),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_harmonic_has_a_finite_constant() {
        let u = SuperharmonicProbe {
            masses: vec![],
            harmonic: HarmonicProbe::first_coordinate(),
            concavity: 0.0,
            concavity_center: [0.0; 3],
        };
        let rep = superharmonic_l1_control(&u, &SphereRule::new(16, 32)).unwrap();
        // By symmetry the optimal shift is 0; then ∫|x₁| over the annulus against ∫|ω₁|.
        assert!(rep.shift_annulus.abs() < 0.05);
        assert!(rep.worst_constant().is_finite() && rep.worst_constant() > 0.0);
    }

    #[test]
    fn single_pole_outside_the_ball() {
        // Independent route for the annulus: the potential is axisymmetric about the pole's axis,
        // so a fine (r, cos θ) product rule needs no azimuthal sum.
        let u = SuperharmonicProbe::single_pole(1.0, [0.0, 0.0, 2.0]);
        let rep = superharmonic_l1_control(&u, &SphereRule::new(32, 8)).unwrap();
        let (rs, wr) = composite_gauss(&(0..=32).map(|k| 0.5 + k as f64 / 64.0).collect::<Vec<_>>(), 6);
        let (cs, wc) = composite_gauss(&(0..=64).map(|k| -1.0 + k as f64 / 32.0).collect::<Vec<_>>(), 6);
        let mut radial = 0.0;
        for (r, a) in rs.iter().zip(&wr) {
            for (c, b) in cs.iter().zip(&wc) {
                let d2 = r * r + 4.0 - 4.0 * r * c;
                let ur = -(r - 2.0 * c) / d2.powf(1.5);
                radial += 2.0 * std::f64::consts::PI * a * b * r * r * ur.abs();
            }
        }
        assert!((rep.radial_annulus - radial).abs() < 1e-4 * radial, "{} vs {radial}", rep.radial_annulus);
        assert!(rep.constant_annulus.is_finite() && rep.constant_strengthened.is_finite());
    }

    #[test]
    fn concave_part_is_superharmonic_by_differences() {
        let u = SuperharmonicProbe {
            masses: vec![PointMass { charge: 0.7, position: [1.6, 0.0, 0.2] }],
            harmonic: HarmonicProbe::first_coordinate(),
            concavity: 0.4,
            concavity_center: [0.1, 0.0, 0.0],
        };
        let fd = u.minus_laplacian_fd(&[0.3, 0.2, -0.4]);
        assert!((fd - u.minus_laplacian()).abs() < 1e-7, "{fd}");
    }

    #[test]
    fn interior_poles_and_negative_charges_are_rejected() {
        assert!(SuperharmonicProbe::single_pole(1.0, [0.5, 0.0, 0.0]).validate().is_err());
        assert!(SuperharmonicProbe::single_pole(-1.0, [2.0, 0.0, 0.0]).validate().is_err());
    }
}
