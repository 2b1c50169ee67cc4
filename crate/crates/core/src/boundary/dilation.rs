//! Dilations u_λ(x) = u(λx), λ ∈ [1, 1.1], of a half-disk field rescaled to B₆⁺, and the two
//! quantitative steps of the L¹-by-radial-derivative argument built on them.
//!
//! Every integral here is a tensor Gauss rule in physical polar coordinates applied to the
//! bilinear interpolant of the base field, so both sides of the λ-identity see the same function.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;
use crate::special::{composite_gauss, gauss_legendre_on};

use super::grid::{Field2D, HalfDiskMesh};
use super::torsion::TorsionSolution;

/// Radius of the rescaled half-ball carrying the base field.
pub const PHYSICAL_RADIUS: f64 = 6.0;
/// Upper end of the averaging window in λ.
pub const LAMBDA_MAX: f64 = 1.1;
pub const IDENTITY_TOLERANCE: f64 = 1e-3;
pub const EPSILON_SWEEP: [f64; 3] = [0.3, 0.1, 0.03];

const GAUSS_POINTS: usize = 4;
const ANGULAR_PANELS: usize = 128;

/// Base field on B₁⁺ (or B_R⁺) viewed on B₆⁺, with −Δu = `coefficient`·f(u) after rescaling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilationFamily {
    pub base: Field2D,
    /// Physical radius over mesh radius.
    pub scale: f64,
    /// Factor in front of f once the equation is moved to B₆⁺: λ_equation·(R/6)².
    pub coefficient: f64,
    pub lambdas: Vec<f64>,
    /// Second-order u_r of the base at the nodes, interpolated bilinearly in between.
    pub radial: Field2D,
}

impl DilationFamily {
    /// `lambda_equation` is the parameter the base field solves −Δu = λf(u) with on its own mesh.
    pub fn new(base: Field2D, lambda_equation: f64) -> Result<Self> {
        let m = *base.mesh();
        if !m.has_origin() {
            return Err(Error::InvalidMesh("dilations need a half-disk mesh through the origin".into()));
        }
        if !(lambda_equation >= 0.0 && lambda_equation.is_finite()) {
            return Err(Error::InvalidArgument(format!("λ must be finite and ≥ 0, got {lambda_equation}")));
        }
        let scale = PHYSICAL_RADIUS / m.outer;
        let lambdas = (0..=10).map(|k| 1.0 + (LAMBDA_MAX - 1.0) * k as f64 / 10.0).collect();
        let radial = Field2D::new(m, base.gradient().radial)?;
        Ok(Self { base, scale, coefficient: lambda_equation / (scale * scale), lambdas, radial })
    }

    /// u_λ at the physical point (r, φ); `None` once λr leaves B₆⁺.
    #[must_use]
    pub fn value(&self, lambda: f64, r: f64, phi: f64) -> Option<f64> {
        self.base.sample(lambda * r / self.scale, phi)
    }

    /// u_r(λx) at the physical point x = (r, φ), interpolated from the nodal gradient.
    #[must_use]
    pub fn radial_derivative(&self, lambda: f64, r: f64, phi: f64) -> Option<f64> {
        self.radial.sample(lambda * r / self.scale, phi).map(|s| s / self.scale)
    }

    /// Exact r-slope of the bilinear interpolant, so that d/dλ u_λ = r·slope holds identically.
    fn interpolant_slope(&self, lambda: f64, r: f64, phi: f64) -> Option<f64> {
        self.base.sample_radial_slope(lambda * r / self.scale, phi).map(|s| s / self.scale)
    }

    /// u_λ on the largest sub-mesh of the physical grid where it is defined.
    pub fn resample(&self, lambda: f64) -> Result<Field2D> {
        if !(1.0..=LAMBDA_MAX + 1e-12).contains(&lambda) {
            return Err(Error::InvalidArgument(format!("λ = {lambda} outside [1, {LAMBDA_MAX}]")));
        }
        let m = self.base.mesh();
        let h = PHYSICAL_RADIUS / m.nr as f64;
        let rows = ((m.nr as f64 / lambda) + 1e-9).floor() as usize;
        let mesh = HalfDiskMesh::half_disk(rows as f64 * h, rows, m.nphi)?;
        let mut values = vec![0.0; mesh.len()];
        for i in 0..=rows {
            for j in 1..m.nphi {
                values[mesh.index(i, j)] = self
                    .value(lambda, mesh.radius(i), mesh.angle(j))
                    .ok_or_else(|| Error::DomainOutsideMesh { lo: 0.0, hi: mesh.radius(i), mesh_lo: 0.0, mesh_hi: PHYSICAL_RADIUS })?;
            }
        }
        Field2D::new(mesh, values)
    }

    /// d/dλ f(u_λ)(x) integrated over [1, 1.1] by Gauss panels split where λr crosses a grid row,
    /// so that u_λ is linear in λ on every panel.
    fn averaged_derivative(&self, f: &Nonlinearity, r: f64, phi: f64) -> Result<f64> {
        let m = self.base.mesh();
        let dr = m.dr();
        let (lo, hi) = (r / self.scale, LAMBDA_MAX * r / self.scale);
        let mut breaks = vec![1.0];
        let first = (lo / dr).floor() as usize + 1;
        let mut i = first;
        while (i as f64) * dr < hi {
            let lam = i as f64 * dr * self.scale / r;
            if lam > 1.0 + 1e-14 && lam < LAMBDA_MAX - 1e-14 {
                breaks.push(lam);
            }
            i += 1;
        }
        breaks.push(LAMBDA_MAX);
        let mut total = 0.0;
        for w in breaks.windows(2) {
            let (nodes, weights) = gauss_legendre_on(GAUSS_POINTS, w[0], w[1]);
            for (lam, wt) in nodes.iter().zip(&weights) {
                let u = self.value(*lam, r, phi).ok_or_else(|| outside(lam * r))?;
                let ur = self.interpolant_slope(*lam, r, phi).ok_or_else(|| outside(lam * r))?;
                total += wt * f.fprime(u) * r * ur;
            }
        }
        Ok(self.coefficient * total)
    }

    /// ∫ |u| over the physical half-annulus (lo, hi).
    pub fn l1_norm(&self, lo: f64, hi: f64) -> Result<f64> {
        integrate(&annulus_rule(&uniform_breaks(lo, hi, 0.05)), |r, phi| Ok(self.value(1.0, r, phi).ok_or_else(|| outside(r))?.abs()))
    }

    /// ∫ |u_r| over the physical half-annulus (lo, hi).
    pub fn radial_l1_norm(&self, lo: f64, hi: f64) -> Result<f64> {
        integrate(&annulus_rule(&uniform_breaks(lo, hi, 0.05)), |r, phi| {
            Ok(self.radial_derivative(1.0, r, phi).ok_or_else(|| outside(r))?.abs())
        })
    }
}

fn outside(r: f64) -> Error {
    Error::DomainOutsideMesh { lo: 0.0, hi: r, mesh_lo: 0.0, mesh_hi: PHYSICAL_RADIUS }
}

/// ζ(r): 1 on [4.1, 4.9], 0 outside (4, 5), quintic smoothstep ramps in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusCutoff {
    pub inner: f64,
    pub outer: f64,
    pub ramp: f64,
}

impl Default for AnnulusCutoff {
    fn default() -> Self {
        Self { inner: 4.0, outer: 5.0, ramp: 0.1 }
    }
}

impl AnnulusCutoff {
    /// (ζ, ζ′, ζ″) at r.
    #[must_use]
    pub fn profile(&self, r: f64) -> (f64, f64, f64) {
        let step = |t: f64| {
            let t = t.clamp(0.0, 1.0);
            (t * t * t * (10.0 - 15.0 * t + 6.0 * t * t), 30.0 * t * t * (1.0 - t) * (1.0 - t), 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t))
        };
        let h = self.ramp;
        if r <= self.inner || r >= self.outer {
            (0.0, 0.0, 0.0)
        } else if r < self.inner + h {
            let (s, ds, dds) = step((r - self.inner) / h);
            (s, ds / h, dds / (h * h))
        } else if r > self.outer - h {
            let (s, ds, dds) = step((self.outer - r) / h);
            (s, -ds / h, dds / (h * h))
        } else {
            (1.0, 0.0, 0.0)
        }
    }

    /// ξ = x₂ζ(r).
    #[must_use]
    pub fn xi(&self, r: f64, phi: f64) -> f64 {
        r * phi.sin() * self.profile(r).0
    }

    /// Δξ = x₂(ζ″ + 3ζ′/r) in the plane.
    #[must_use]
    pub fn laplacian_xi(&self, r: f64, phi: f64) -> f64 {
        let (_, d1, d2) = self.profile(r);
        r * phi.sin() * (d2 + 3.0 * d1 / r)
    }

    fn breaks(&self) -> Vec<f64> {
        let h = self.ramp;
        let mut b = uniform_breaks(self.inner, self.inner + h, h / 4.0);
        b.pop();
        let mut mid = uniform_breaks(self.inner + h, self.outer - h, 0.025);
        mid.pop();
        b.extend(mid);
        b.extend(uniform_breaks(self.outer - h, self.outer, h / 4.0));
        b
    }
}

fn uniform_breaks(a: f64, b: f64, width: f64) -> Vec<f64> {
    let k = ((b - a) / width).ceil().max(1.0) as usize;
    (0..=k).map(|i| a + (b - a) * i as f64 / k as f64).collect()
}

/// (r, φ, weight·r) triples over the half-annulus with the given radial breaks.
fn annulus_rule(r_breaks: &[f64]) -> Vec<(f64, f64, f64)> {
    let (rs, rw) = composite_gauss(r_breaks, GAUSS_POINTS);
    let phi_breaks: Vec<f64> = (0..=ANGULAR_PANELS).map(|k| std::f64::consts::PI * k as f64 / ANGULAR_PANELS as f64).collect();
    let (ps, pw) = composite_gauss(&phi_breaks, GAUSS_POINTS);
    let mut rule = Vec::with_capacity(rs.len() * ps.len());
    for (r, a) in rs.iter().zip(&rw) {
        for (p, b) in ps.iter().zip(&pw) {
            rule.push((*r, *p, a * b * r));
        }
    }
    rule
}

fn integrate(rule: &[(f64, f64, f64)], g: impl Fn(f64, f64) -> Result<f64>) -> Result<f64> {
    rule.iter().try_fold(0.0, |acc, &(r, p, w)| Ok(acc + w * g(r, p)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonPoint {
    pub epsilon: f64,
    /// ε‖u‖_{L¹(A⁺_{3,6})} + ε^exponent ‖u_r‖_{L¹(A⁺_{3,6})}.
    pub rhs_core: f64,
    /// ∫(f(u) − f(u_{1.1}))ξ over `rhs_core`; zero when both vanish.
    pub implied_constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilationReport {
    /// ∫₁^{1.1}(−d/dλ ∫ f(u_λ)ξ) dλ.
    pub averaged_derivative: f64,
    /// ∫ (f(u) − f(u_{1.1}))ξ.
    pub endpoint_difference: f64,
    pub relative_gap: f64,
    /// max over quadrature points of f(u) − f(u_{1.1}) − f′(u)(u − u_{1.1}); ≤ 0 for convex f.
    pub convexity_max_excess: f64,
    /// max of the absolute value of the same quantity; zero for affine f.
    pub convexity_max_gap: f64,
    /// Quadrature points with u ≥ u_{1.1} and with u < u_{1.1}.
    pub points_decreasing: usize,
    pub points_increasing: usize,
    pub l1_annulus: f64,
    pub radial_l1_annulus: f64,
    pub gamma: f64,
    pub epsilon_exponent: f64,
    pub epsilon_sweep: Vec<EpsilonPoint>,
}

/// Checks that averaging −d/dλ ∫ f(u_λ)ξ over [1, 1.1] reproduces ∫ (f(u) − f(u_{1.1}))ξ,
/// checks the convexity bound at every quadrature point, and records the ε trade-off.
pub fn dilation_average_identity(family: &DilationFamily, f: &Nonlinearity) -> Result<DilationReport> {
    let cutoff = AnnulusCutoff::default();
    let rule = annulus_rule(&cutoff.breaks());
    let mu = family.coefficient;
    let (mut lhs, mut rhs) = (0.0, 0.0);
    let (mut excess, mut gap_abs) = (f64::NEG_INFINITY, 0.0f64);
    let (mut decreasing, mut increasing) = (0, 0);
    for &(r, phi, w) in &rule {
        let xi = cutoff.xi(r, phi);
        let u = family.value(1.0, r, phi).ok_or_else(|| outside(r))?;
        let u_end = family.value(LAMBDA_MAX, r, phi).ok_or_else(|| outside(LAMBDA_MAX * r))?;
        let difference = mu * (f.f(u) - f.f(u_end));
        rhs += w * difference * xi;
        if xi != 0.0 {
            lhs -= w * xi * family.averaged_derivative(f, r, phi)?;
        }
        let gap = difference - mu * f.fprime(u) * (u - u_end);
        excess = excess.max(gap);
        gap_abs = gap_abs.max(gap.abs());
        if u >= u_end {
            decreasing += 1;
        } else {
            increasing += 1;
        }
    }
    let scale = lhs.abs().max(rhs.abs());
    let relative_gap = if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale };
    if !(relative_gap <= IDENTITY_TOLERANCE) {
        return Err(Error::ResidualTooLarge { residual: relative_gap, tolerance: IDENTITY_TOLERANCE });
    }
    let l1 = family.l1_norm(3.0, PHYSICAL_RADIUS)?;
    let radial = family.radial_l1_norm(3.0, PHYSICAL_RADIUS)?;
    let gamma = crate::interior::gamma_exponent(2);
    let exponent = -1.0 - 2.0 * (2.0 + gamma) / gamma;
    let epsilon_sweep = EPSILON_SWEEP
        .iter()
        .map(|&eps| {
            let core = eps * l1 + eps.powf(exponent) * radial;
            let implied = if core > 0.0 { rhs / core } else if rhs <= 0.0 { 0.0 } else { f64::INFINITY };
            EpsilonPoint { epsilon: eps, rhs_core: core, implied_constant: implied }
        })
        .collect();
    Ok(DilationReport {
        averaged_derivative: lhs,
        endpoint_difference: rhs,
        relative_gap,
        convexity_max_excess: excess,
        convexity_max_gap: gap_abs,
        points_decreasing: decreasing,
        points_increasing: increasing,
        l1_annulus: l1,
        radial_l1_annulus: radial,
        gamma,
        epsilon_exponent: exponent,
        epsilon_sweep,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step1Point {
    pub lambda: f64,
    /// 2λ⁻³ ∫ (−Δu_λ)ξ.
    pub source_term: f64,
    /// λ⁻² ∫ Δ(λ⁻¹ x·∇u_λ)ξ = λ⁻² ∫ r u_r(λx) Δξ.
    pub transport_term: f64,
    /// c ∫_{A⁺_{ρ₁,ρ₂}} (−Δu_λ)φ, a lower bound for ∫(−Δu_λ)ξ.
    pub torsion_term: f64,
}

impl Step1Point {
    #[must_use]
    pub fn lhs(&self) -> f64 {
        self.source_term + self.transport_term
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step1Report {
    pub comparison_constant: f64,
    pub height_excess: f64,
    pub points: Vec<Step1Point>,
    /// ‖u‖_{L¹(A⁺_{4.7,4.8})}.
    pub core_l1: f64,
    /// ‖u_r‖_{L¹(A⁺_{3,6})}.
    pub radial_l1: f64,
    /// Smallest C with min_λ LHS ≥ c‖u‖_{L¹(A⁺_{4.7,4.8})} − C‖u_r‖_{L¹(A⁺_{3,6})}.
    pub implied_constant: f64,
}

/// Lower bound of the λ-identity's left side for every λ in the family's grid, with the torsion
/// comparison c·φ ≤ x₂ checked at every torsion node.
pub fn step1_lower_bound(
    family: &DilationFamily,
    f: &Nonlinearity,
    cutoff: &AnnulusCutoff,
    torsion: &TorsionSolution,
) -> Result<Step1Report> {
    let tm = *torsion.field.mesh();
    if !(tm.inner > cutoff.inner + 0.1 * cutoff.ramp && tm.inner < cutoff.inner + 2.0 * cutoff.ramp)
        || !(tm.outer > cutoff.outer - 2.0 * cutoff.ramp && tm.outer < cutoff.outer - cutoff.ramp)
    {
        return Err(Error::InvalidArgument(format!(
            "torsion annulus ({}, {}) must have ρ₁ ∈ (4.1, 4.2), ρ₂ ∈ (4.8, 4.9)",
            tm.inner, tm.outer
        )));
    }
    let c = torsion.comparison_constant();
    let height_excess = torsion.height_excess();
    if height_excess > 0.0 {
        return Err(Error::ComparisonFailed(format!("c·φ exceeds x₂ by {height_excess:e} with c = {c}")));
    }
    let rule = annulus_rule(&cutoff.breaks());
    let torsion_rule = annulus_rule(&uniform_breaks(tm.inner, tm.outer, 0.025));
    let mu = family.coefficient;
    let mut points = Vec::with_capacity(family.lambdas.len());
    for &lam in &family.lambdas {
        let minus_laplacian = |r: f64, phi: f64| -> Result<f64> {
            let u = family.value(lam, r, phi).ok_or_else(|| outside(lam * r))?;
            Ok(lam * lam * mu * f.f(u))
        };
        let mut source = 0.0;
        let mut transport = 0.0;
        for &(r, phi, w) in &rule {
            let xi = cutoff.xi(r, phi);
            if xi != 0.0 {
                source += w * minus_laplacian(r, phi)? * xi;
            }
            let lap = cutoff.laplacian_xi(r, phi);
            if lap != 0.0 {
                let ur = family.radial_derivative(lam, r, phi).ok_or_else(|| outside(lam * r))?;
                transport += w * r * ur * lap;
            }
        }
        let torsion_term = c * integrate(&torsion_rule, |r, phi| {
            Ok(minus_laplacian(r, phi)? * torsion.field.sample(r, phi).unwrap_or(0.0))
        })?;
        points.push(Step1Point {
            lambda: lam,
            source_term: 2.0 * source / lam.powi(3),
            transport_term: transport / (lam * lam),
            torsion_term,
        });
        if torsion_term > source * (1.0 + 1e-9) + 1e-14 {
            return Err(Error::ComparisonFailed(format!(
                "∫(−Δu_λ)ξ = {source:e} below c∫(−Δu_λ)φ = {torsion_term:e} at λ = {lam}"
            )));
        }
    }
    let core_l1 = family.l1_norm(4.7, 4.8)?;
    let radial_l1 = family.radial_l1_norm(3.0, PHYSICAL_RADIUS)?;
    let worst = points.iter().map(Step1Point::lhs).fold(f64::INFINITY, f64::min);
    let deficit = (c * core_l1 - worst).max(0.0);
    let implied_constant = if deficit == 0.0 {
        0.0
    } else if radial_l1 > 0.0 {
        deficit / radial_l1
    } else {
        f64::INFINITY
    };
    Ok(Step1Report { comparison_constant: c, height_excess, points, core_l1, radial_l1, implied_constant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::torsion::torsion_solve;

    fn height_family(nr: usize, nphi: usize) -> DilationFamily {
        let mesh = HalfDiskMesh::half_disk(1.0, nr, nphi).unwrap();
        DilationFamily::new(Field2D::from_fn(mesh, |r, p| r * p.sin()).unwrap(), 36.0).unwrap()
    }

    #[test]
    fn unit_dilation_reproduces_the_base() {
        let fam = height_family(64, 32);
        let u1 = fam.resample(1.0).unwrap();
        for (a, b) in u1.values().iter().zip(fam.base.values()) {
            assert!((a - b).abs() < 1e-10);
        }
        let u11 = fam.resample(1.1).unwrap();
        assert!(u11.mesh().outer <= PHYSICAL_RADIUS / 1.1 + 1e-12);
    }

    #[test]
    fn cutoff_is_one_inside_and_flat_at_the_ends() {
        let z = AnnulusCutoff::default();
        assert_eq!(z.profile(4.5), (1.0, 0.0, 0.0));
        for r in [4.0, 5.0, 3.0, 5.5] {
            assert_eq!(z.profile(r).0, 0.0);
        }
        let (_, d, _) = z.profile(4.1 - 1e-12);
        assert!(d.abs() < 1e-6);
        // ζ′ integrates to one over the inner ramp.
        let (x, w) = gauss_legendre_on(20, 4.0, 4.1);
        let s: f64 = x.iter().zip(&w).map(|(r, w)| w * z.profile(*r).1).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn affine_source_gives_equality_in_the_convexity_bound() {
        let rep = dilation_average_identity(&height_family(64, 32), &Nonlinearity::linear(1.0)).unwrap();
        assert!(rep.convexity_max_gap < 1e-8, "{}", rep.convexity_max_gap);
    }

    #[test]
    fn identity_holds_on_the_height_function() {
        // u = x₂ is linear along rays, so u − u_{1.1} = −0.1 x₂ and the right side is explicit:
        // ∫ (x₂ − 1.1x₂)x₂ζ = −0.1 ∫ x₂²ζ.
        let fam = height_family(64, 128);
        let rep = dilation_average_identity(&fam, &Nonlinearity::linear(1.0)).unwrap();
        assert!(rep.relative_gap < 1e-10, "{}", rep.relative_gap);
        let z = AnnulusCutoff::default();
        let (x, w) = gauss_legendre_on(40, 4.0, 5.0);
        let radial: f64 = x.iter().zip(&w).map(|(r, w)| w * r.powi(3) * z.profile(*r).0).sum();
        // ∫₀^π sin² = π/2; base on B₁ with λ_equation = 36 gives coefficient 1; u = x₂/6 on B₆.
        let exact = -0.1 * radial * std::f64::consts::FRAC_PI_2 / 6.0;
        assert!((rep.endpoint_difference - exact).abs() < 1e-3 * exact.abs(), "{} vs {exact}", rep.endpoint_difference);
        // x₂ grows under dilation, so u < u_{1.1} off the flat rows.
        assert!(rep.points_increasing > 0 && rep.points_decreasing == 0);
    }

    #[test]
    fn zero_field_gives_zero_on_both_sides_of_step1() {
        let mesh = HalfDiskMesh::half_disk(1.0, 64, 32).unwrap();
        let fam = DilationFamily::new(Field2D::zeros(mesh), 0.0).unwrap();
        let torsion = torsion_solve(4.15, 4.85, 128, 512).unwrap();
        let rep = step1_lower_bound(&fam, &Nonlinearity::exp(), &AnnulusCutoff::default(), &torsion).unwrap();
        assert!(rep.points.iter().all(|p| p.lhs() == 0.0 && p.torsion_term == 0.0));
        assert_eq!(rep.core_l1, 0.0);
        assert_eq!(rep.radial_l1, 0.0);
        assert_eq!(rep.implied_constant, 0.0);
        assert!(rep.height_excess <= 0.0);
    }

    #[test]
    fn step1_rejects_a_misplaced_torsion_annulus() {
        let mesh = HalfDiskMesh::half_disk(1.0, 32, 16).unwrap();
        let fam = DilationFamily::new(Field2D::zeros(mesh), 0.0).unwrap();
        let torsion = torsion_solve(4.0, 4.85, 128, 256).unwrap();
        assert!(step1_lower_bound(&fam, &Nonlinearity::exp(), &AnnulusCutoff::default(), &torsion).is_err());
    }
}
