//! Solid harmonics in three dimensions and the median control of a harmonic function by its
//! radial derivative on the unit sphere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::gauss_legendre_on;
use crate::stats::weighted_median;

/// Highest degree accepted by the probes.
pub const MAX_DEGREE: usize = 16;

/// Orthonormal associated Legendre values P̄_ℓ^m(cos θ) for 0 ≤ m ≤ ℓ ≤ `lmax`, stored at
/// index ℓ(ℓ+1)/2 + m, normalized so that P̄_ℓ^m(cos θ)·{1, √2 cos mφ, √2 sin mφ} is orthonormal
/// on the sphere.
#[must_use]
pub fn normalized_legendre(lmax: usize, x: f64) -> Vec<f64> {
    let tri = |l: usize, m: usize| l * (l + 1) / 2 + m;
    let mut p = vec![0.0; tri(lmax, lmax) + 1];
    let s = (1.0 - x * x).max(0.0).sqrt();
    p[0] = (0.25 / std::f64::consts::PI).sqrt();
    for m in 1..=lmax {
        let mf = m as f64;
        p[tri(m, m)] = ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s * p[tri(m - 1, m - 1)];
    }
    for m in 0..lmax {
        p[tri(m + 1, m)] = (2.0 * m as f64 + 3.0).sqrt() * x * p[tri(m, m)];
    }
    for m in 0..=lmax {
        for l in (m + 2)..=lmax {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
            p[tri(l, m)] = a * (x * p[tri(l - 1, m)] - b * p[tri(l - 2, m)]);
        }
    }
    p
}

/// Real orthonormal spherical harmonics Y_ℓm, ℓ ≤ `lmax`, at index ℓ² + ℓ + m, m ∈ [−ℓ, ℓ].
#[must_use]
pub fn real_harmonics(lmax: usize, cos_theta: f64, phi: f64) -> Vec<f64> {
    let p = normalized_legendre(lmax, cos_theta);
    let mut y = vec![0.0; (lmax + 1) * (lmax + 1)];
    let root2 = std::f64::consts::SQRT_2;
    for l in 0..=lmax {
        let base = l * l + l;
        y[base] = p[l * (l + 1) / 2];
        for m in 1..=l {
            let pm = p[l * (l + 1) / 2 + m];
            let (s, c) = (m as f64 * phi).sin_cos();
            y[base + m] = root2 * pm * c;
            y[base - m] = root2 * pm * s;
        }
    }
    y
}

/// v(x) = Σ a_ℓm r^ℓ Y_ℓm(x/r) in B₁ ⊂ ℝ³; harmonic term by term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicProbe {
    pub degree: usize,
    /// (degree + 1)² coefficients in the order of [`real_harmonics`].
    pub coefficients: Vec<f64>,
}

impl HarmonicProbe {
    pub fn new(degree: usize, coefficients: Vec<f64>) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::InvalidArgument(format!("degree {degree} exceeds {MAX_DEGREE}")));
        }
        if coefficients.len() != (degree + 1) * (degree + 1) {
            return Err(Error::InvalidArgument(format!("need {} coefficients, got {}", (degree + 1) * (degree + 1), coefficients.len())));
        }
        Ok(Self { degree, coefficients })
    }

    /// v = x₁ = √(4π/3)·r Y₁,₁.
    #[must_use]
    pub fn first_coordinate() -> Self {
        let mut c = vec![0.0; 4];
        c[3] = (4.0 * std::f64::consts::PI / 3.0).sqrt();
        Self { degree: 1, coefficients: c }
    }

    /// v(0) = a₀₀ Y₀₀.
    #[must_use]
    pub fn center_value(&self) -> f64 {
        self.coefficients[0] * (0.25 / std::f64::consts::PI).sqrt()
    }

    /// (v, r v_r) at radius r in direction (cos θ, φ): r v_r = Σ ℓ a_ℓm r^ℓ Y_ℓm.
    #[must_use]
    pub fn value_and_radial(&self, r: f64, cos_theta: f64, phi: f64) -> (f64, f64) {
        let y = real_harmonics(self.degree, cos_theta, phi);
        let (mut v, mut w) = (0.0, 0.0);
        let mut rl = 1.0;
        for l in 0..=self.degree {
            let mut s = 0.0;
            for k in (l * l)..((l + 1) * (l + 1)) {
                s += self.coefficients[k] * y[k];
            }
            v += rl * s;
            w += l as f64 * rl * s;
            rl *= r;
        }
        (v, w)
    }

    /// v at a Cartesian point.
    #[must_use]
    pub fn value(&self, x: &[f64; 3]) -> f64 {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if r == 0.0 {
            return self.center_value();
        }
        self.value_and_radial(r, x[2] / r, x[1].atan2(x[0])).0
    }
}

/// Product rule on ∂B₁: Gauss in cos θ, uniform in φ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereRule {
    pub polar: usize,
    pub azimuthal: usize,
    pub cos_theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    #[must_use]
    pub fn new(polar: usize, azimuthal: usize) -> Self {
        let (ct, wc) = gauss_legendre_on(polar, -1.0, 1.0);
        let mut rule = Self { polar, azimuthal, cos_theta: Vec::new(), phi: Vec::new(), weights: Vec::new() };
        let dphi = 2.0 * std::f64::consts::PI / azimuthal as f64;
        for (c, w) in ct.iter().zip(&wc) {
            for k in 0..azimuthal {
                rule.cos_theta.push(*c);
                rule.phi.push((k as f64 + 0.5) * dphi);
                rule.weights.push(w * dphi);
            }
        }
        rule
    }

    /// 50 × 200 = 10⁴ nodes.
    #[must_use]
    pub fn standard() -> Self {
        Self::new(50, 200)
    }

    /// Exact for spherical polynomials of degree < min(2·polar, azimuthal).
    #[must_use]
    pub fn exact_degree(&self) -> usize {
        (2 * self.polar).min(self.azimuthal) - 1
    }
}

/// 2n^{3/2} at n = 3.
#[must_use]
pub fn median_constant() -> f64 {
    2.0 * 3f64.powf(1.5)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicReport {
    pub center_value: f64,
    pub median: f64,
    pub sup_deviation: f64,
    pub sup_radial: f64,
    pub l1_deviation: f64,
    pub l1_radial: f64,
    pub constant: f64,
    /// Weight of {v > t} and {v < t} over |∂B₁|.
    pub above_fraction: f64,
    pub below_fraction: f64,
    pub pass_sup: bool,
    pub pass_l1: bool,
}

/// ‖v − v(0)‖_{L∞(∂B₁)} ≤ 2n^{3/2}‖v_r‖_{L∞(∂B₁)} and ‖v − t‖_{L¹(∂B₁)} ≤ 2n^{3/2}‖v_r‖_{L¹(∂B₁)}
/// with t the boundary median.
pub fn harmonic_median_control(v: &HarmonicProbe, rule: &SphereRule) -> Result<HarmonicReport> {
    // |v| and |v_r| are only Lipschitz, but the trace itself must be resolved.
    if 2 * v.degree > rule.exact_degree() {
        return Err(Error::QuadratureUnderResolved(format!(
            "degree {} on a rule exact to degree {}",
            v.degree,
            rule.exact_degree()
        )));
    }
    let (vals, radial): (Vec<f64>, Vec<f64>) =
        rule.cos_theta.iter().zip(&rule.phi).map(|(c, p)| v.value_and_radial(1.0, *c, *p)).unzip();
    let t = weighted_median(&vals, &rule.weights);
    let v0 = v.center_value();
    let total: f64 = rule.weights.iter().sum();
    let mut report = HarmonicReport {
        center_value: v0,
        median: t,
        sup_deviation: 0.0,
        sup_radial: 0.0,
        l1_deviation: 0.0,
        l1_radial: 0.0,
        constant: median_constant(),
        above_fraction: 0.0,
        below_fraction: 0.0,
        pass_sup: false,
        pass_l1: false,
    };
    for ((val, vr), w) in vals.iter().zip(&radial).zip(&rule.weights) {
        report.sup_deviation = report.sup_deviation.max((val - v0).abs());
        report.sup_radial = report.sup_radial.max(vr.abs());
        report.l1_deviation += w * (val - t).abs();
        report.l1_radial += w * vr.abs();
        if *val > t {
            report.above_fraction += w / total;
        } else if *val < t {
            report.below_fraction += w / total;
        }
    }
    let slack = 1e-12 * (1.0 + v0.abs() + t.abs());
    report.pass_sup = report.sup_deviation <= report.constant * report.sup_radial + slack;
    report.pass_l1 = report.l1_deviation <= report.constant * report.l1_radial + slack * total;
    Ok(report)
}
