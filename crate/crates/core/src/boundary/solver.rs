//! Minimal solutions of −Δu = λf(u) on the half-disk, the fold in λ, and the first eigenvalue
//! of the linearized operator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;

use super::grid::{Field2D, HalfDiskMesh};
use super::poisson::PolarPoisson;

pub const RESIDUAL_TOLERANCE: f64 = 1e-8;
const MAX_NEWTON_STEPS: usize = 80;
const MAX_PCG_ITERATIONS: usize = 4000;

/// Data on the curved boundary r = R.
#[derive(Debug, Clone, PartialEq)]
pub enum CurvedBoundary {
    Zero,
    /// Values at φ_j, j = 0..=nphi; the two end values must be zero.
    Trace(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfDiskSolution {
    pub field: Field2D,
    pub lambda: f64,
    /// sup over interior nodes of |−Δ_h u − λf(u)|.
    pub residual: f64,
    pub newton_steps: usize,
    pub linear_iterations: usize,
}

/// −Δ_h u − λf(u) at the interior nodes.
fn residual(p: &PolarPoisson, u: &[f64], f: &Nonlinearity, lambda: f64) -> Vec<f64> {
    let mut res = p.apply(u);
    let m = p.mesh();
    for i in 1..m.nr {
        for j in 1..m.nphi {
            let k = m.index(i, j);
            res[k] -= lambda * f.f(u[k]);
        }
    }
    res
}

fn boundary_data(mesh: &HalfDiskMesh, curved: &CurvedBoundary) -> Result<Vec<f64>> {
    let mut b = vec![0.0; mesh.len()];
    if let CurvedBoundary::Trace(t) = curved {
        if t.len() != mesh.nphi + 1 {
            return Err(Error::InvalidArgument(format!("trace has {} values, mesh has {} angles", t.len(), mesh.nphi + 1)));
        }
        if t[0] != 0.0 || t[mesh.nphi] != 0.0 {
            return Err(Error::InvalidArgument("trace must vanish at the corners".into()));
        }
        for (j, &v) in t.iter().enumerate() {
            b[mesh.index(mesh.nr, j)] = v;
        }
    }
    Ok(b)
}

/// Minimal solution by monotone Newton iteration from u ≡ 0 (or from the harmonic extension of
/// the trace).
pub fn solve_half_disk(f: &Nonlinearity, lambda: f64, mesh: HalfDiskMesh, curved: &CurvedBoundary) -> Result<HalfDiskSolution> {
    solve_half_disk_from(f, lambda, mesh, curved, None)
}

/// As [`solve_half_disk`], starting from `start`, which must be a subsolution (for instance the
/// minimal solution at a smaller λ).
pub fn solve_half_disk_from(
    f: &Nonlinearity,
    lambda: f64,
    mesh: HalfDiskMesh,
    curved: &CurvedBoundary,
    start: Option<&Field2D>,
) -> Result<HalfDiskSolution> {
    if !f.flags.nonnegative {
        return Err(Error::HypothesisViolated(format!("half-disk solver needs f ≥ 0; {} lacks the flag", f.label())));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda must be finite and nonnegative, got {lambda}")));
    }
    if !mesh.has_origin() {
        return Err(Error::InvalidMesh("the half-disk solver needs the origin row".into()));
    }
    let p = PolarPoisson::dirichlet(mesh)?;
    let bdry = boundary_data(&mesh, curved)?;
    let mut u = match start {
        Some(s) if s.mesh() == &mesh => {
            let mut v = s.values().to_vec();
            for j in 0..=mesh.nphi {
                v[mesh.index(mesh.nr, j)] = bdry[mesh.index(mesh.nr, j)];
            }
            v
        }
        Some(_) => return Err(Error::InvalidMesh("start field lives on another mesh".into())),
        None => p.solve(&vec![0.0; mesh.len()], &bdry),
    };
    let limit = f.upper_limit();
    let mut linear = 0;
    for step in 0..=MAX_NEWTON_STEPS {
        let res = residual(&p, &u, f, lambda);
        let sup = res.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if !sup.is_finite() {
            return Err(Error::NewtonDiverged { lambda });
        }
        if sup <= RESIDUAL_TOLERANCE {
            return Ok(HalfDiskSolution { field: Field2D::new(mesh, u)?, lambda, residual: sup, newton_steps: step, linear_iterations: linear });
        }
        if step == MAX_NEWTON_STEPS {
            break;
        }
        let potential: Vec<f64> = u.iter().map(|&v| lambda * f.fprime(v)).collect();
        let rhs: Vec<f64> = res.iter().map(|v| -v).collect();
        let out = p.pcg(&potential, &rhs, 1e-12, MAX_PCG_ITERATIONS).map_err(|_| Error::NewtonDiverged { lambda })?;
        linear += out.iterations;
        for (v, d) in u.iter_mut().zip(&out.solution) {
            *v += d;
        }
        if u.iter().any(|v| !v.is_finite() || limit.is_some_and(|l| *v >= l)) {
            return Err(Error::NewtonDiverged { lambda });
        }
    }
    Err(Error::NewtonDiverged { lambda })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldEstimate {
    /// Midpoint of the final bracket.
    pub lambda_star: f64,
    pub lower: f64,
    pub upper: f64,
    /// Minimal solution at `lower`.
    pub lower_solution: HalfDiskSolution,
}

/// Fold of the minimal branch: largest λ with a minimal solution, by bisection to `rel_tol`.
pub fn fold_half_disk(f: &Nonlinearity, mesh: HalfDiskMesh, rel_tol: f64) -> Result<FoldEstimate> {
    let zero = CurvedBoundary::Zero;
    let mut lo_sol = solve_half_disk(f, 0.0, mesh, &zero)?;
    let mut hi = 1.0;
    loop {
        match solve_half_disk_from(f, hi, mesh, &zero, Some(&lo_sol.field)) {
            Ok(s) => {
                lo_sol = s;
                hi *= 2.0;
                if hi > 1e8 {
                    return Err(Error::NoBracket { s: f64::NAN, upper: hi });
                }
            }
            Err(Error::NewtonDiverged { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    while hi - lo_sol.lambda > rel_tol * hi {
        let mid = 0.5 * (lo_sol.lambda + hi);
        match solve_half_disk_from(f, mid, mesh, &zero, Some(&lo_sol.field)) {
            Ok(s) => lo_sol = s,
            Err(Error::NewtonDiverged { .. }) => hi = mid,
            Err(e) => return Err(e),
        }
    }
    Ok(FoldEstimate { lambda_star: 0.5 * (lo_sol.lambda + hi), lower: lo_sol.lambda, upper: hi, lower_solution: lo_sol })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigen2D {
    pub first_eigenvalue: f64,
    /// ‖Ax − μx‖ in the r-weighted norm, x normalized.
    pub residual: f64,
    pub iterations: usize,
}

/// Smallest eigenvalue of −Δ_h − λf′(u) with Dirichlet data on the whole boundary.
///
/// Locally optimal preconditioned inverse iteration with −Δ_h⁻¹ as preconditioner: each step
/// takes the Rayleigh–Ritz minimizer over span{x, P(Ax − μx), previous direction}.
pub fn first_eigenvalue_2d(field: &Field2D, f: &Nonlinearity, lambda: f64) -> Result<Eigen2D> {
    let mesh = *field.mesh();
    let potential: Vec<f64> = field.values().iter().map(|&v| lambda * f.fprime(v)).collect();
    smallest_eigenvalue_2d(mesh, &potential)
}

/// Smallest eigenvalue of −Δ_h − V.
pub fn smallest_eigenvalue_2d(mesh: HalfDiskMesh, potential: &[f64]) -> Result<Eigen2D> {
    let p = PolarPoisson::dirichlet(mesh)?;
    let zero = vec![0.0; mesh.len()];
    let apply_a = |x: &[f64]| -> Vec<f64> {
        let mut y = p.apply(x);
        for (k, v) in y.iter_mut().enumerate() {
            *v -= potential[k] * x[k];
        }
        p.mask(&mut y);
        y
    };
    let normalize = |x: &mut Vec<f64>| {
        let n = p.dot(x, x).sqrt();
        x.iter_mut().for_each(|v| *v /= n);
    };
    let mut ones = vec![1.0; mesh.len()];
    p.mask(&mut ones);
    let mut x = p.solve(&ones, &zero);
    p.mask(&mut x);
    normalize(&mut x);
    let mut prev: Option<Vec<f64>> = None;
    let mut mu = 0.0;
    for it in 1..=2000 {
        let ax = apply_a(&x);
        mu = p.dot(&x, &ax);
        let r: Vec<f64> = ax.iter().zip(&x).map(|(a, b)| a - mu * b).collect();
        let rn = p.dot(&r, &r).sqrt();
        if rn <= 1e-9 * mu.abs().max(1.0) {
            return Ok(Eigen2D { first_eigenvalue: mu, residual: rn, iterations: it });
        }
        let mut w = p.solve(&r, &zero);
        p.mask(&mut w);
        let mut basis: Vec<Vec<f64>> = vec![x.clone()];
        for mut v in std::iter::once(w).chain(prev.take()) {
            for _ in 0..2 {
                for b in &basis {
                    let c = p.dot(&v, b);
                    v.iter_mut().zip(b).for_each(|(vi, bi)| *vi -= c * bi);
                }
            }
            let nv = p.dot(&v, &v).sqrt();
            if nv > 1e-12 {
                v.iter_mut().for_each(|vi| *vi /= nv);
                basis.push(v);
            }
        }
        let images: Vec<Vec<f64>> = basis.iter().map(|b| apply_a(b)).collect();
        let k = basis.len();
        let mut g = vec![vec![0.0; k]; k];
        for a in 0..k {
            for b in a..k {
                let v = 0.5 * (p.dot(&basis[a], &images[b]) + p.dot(&images[a], &basis[b]));
                g[a][b] = v;
                g[b][a] = v;
            }
        }
        let coeffs = smallest_eigenvector(&g);
        let mut next = vec![0.0; mesh.len()];
        let mut dir = vec![0.0; mesh.len()];
        for (a, c) in coeffs.iter().enumerate() {
            next.iter_mut().zip(&basis[a]).for_each(|(n, b)| *n += c * b);
            if a > 0 {
                dir.iter_mut().zip(&basis[a]).for_each(|(d, b)| *d += c * b);
            }
        }
        if p.dot(&dir, &dir) > 0.0 {
            prev = Some(dir);
        }
        normalize(&mut next);
        x = next;
    }
    if !mu.is_finite() {
        return Err(Error::NonFiniteValue { index: 0, value: mu });
    }
    Err(Error::NotConverged { iterations: 2000 })
}

/// Eigenvector of the smallest eigenvalue of a small symmetric matrix (cyclic Jacobi).
fn smallest_eigenvector(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[i][j].powi(2)).sum();
        let diag: f64 = (0..n).map(|i| m[i][i].powi(2)).sum();
        if off <= 1e-30 * diag.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q] == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let best = (0..n).min_by(|&i, &j| m[i][i].total_cmp(&m[j][j])).unwrap_or(0);
    (0..n).map(|i| v[i][best]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::torsion::half_disk_torsion_sup;

    fn mesh() -> HalfDiskMesh {
        HalfDiskMesh::half_disk(1.0, 32, 32).unwrap()
    }

    #[test]
    fn zero_lambda_gives_zero() {
        let s = solve_half_disk(&Nonlinearity::exp(), 0.0, mesh(), &CurvedBoundary::Zero).unwrap();
        assert!(s.field.values().iter().all(|&v| v == 0.0));
        assert_eq!(s.newton_steps, 0);
    }

    #[test]
    fn small_lambda_sits_under_the_torsion_bound() {
        // u ≥ λ·φ_T (f ≥ 1) and u ≤ λ f(sup u)·φ_T, with φ_T the half-disk torsion function.
        let lambda = 0.1;
        let s = solve_half_disk(&Nonlinearity::exp(), lambda, mesh(), &CurvedBoundary::Zero).unwrap();
        let umax = s.field.max_value();
        let torsion = half_disk_torsion_sup(mesh()).unwrap();
        assert!(umax >= lambda * torsion * (1.0 - 1e-9));
        assert!(umax <= lambda * umax.exp() * torsion * (1.0 + 1e-9));
        assert!(s.field.min_value() >= 0.0);
        assert!(s.newton_steps <= 50);
        assert!(s.residual <= RESIDUAL_TOLERANCE);
    }

    #[test]
    fn solution_is_even_in_the_angle() {
        let s = solve_half_disk(&Nonlinearity::exp(), 1.0, mesh(), &CurvedBoundary::Zero).unwrap();
        let m = mesh();
        for i in 0..=m.nr {
            for j in 0..=m.nphi {
                assert!((s.field.at(i, j) - s.field.at(i, m.nphi - j)).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn linear_eigenvalue_matches_half_disk_bessel_zero() {
        // First Dirichlet eigenvalue of the half-disk: j_{1,1}² = 14.6819706...
        let m = HalfDiskMesh::half_disk(1.0, 64, 64).unwrap();
        let e = smallest_eigenvalue_2d(m, &vec![0.0; m.len()]).unwrap();
        assert!((e.first_eigenvalue / 14.681_970_642_123_9 - 1.0).abs() < 2e-3, "{}", e.first_eigenvalue);
        let shifted = smallest_eigenvalue_2d(m, &vec![4.0; m.len()]).unwrap();
        assert!((shifted.first_eigenvalue - (e.first_eigenvalue - 4.0)).abs() < 1e-7);
    }

    #[test]
    fn fold_brackets_a_solvable_and_unsolvable_lambda() {
        let m = HalfDiskMesh::half_disk(1.0, 16, 16).unwrap();
        let f = Nonlinearity::exp();
        let fold = fold_half_disk(&f, m, 1e-3).unwrap();
        assert!(solve_half_disk(&f, fold.upper * 1.01, m, &CurvedBoundary::Zero).is_err());
        let mu = first_eigenvalue_2d(&fold.lower_solution.field, &f, fold.lower).unwrap().first_eigenvalue;
        assert!(mu > -1e-6 && mu < 1.0, "eigenvalue near the fold {mu}");
    }

    #[test]
    fn trace_data_is_honoured() {
        let m = mesh();
        let trace: Vec<f64> = (0..=m.nphi).map(|j| if j == 0 || j == m.nphi { 0.0 } else { m.angle(j).sin() }).collect();
        let s = solve_half_disk(&Nonlinearity::exp(), 0.0, m, &CurvedBoundary::Trace(trace)).unwrap();
        // Harmonic extension of sin φ is r sin φ; the polar stencil is exact in r for it.
        for (i, j) in [(8, 8), (20, 5), (31, 30)] {
            let exact = m.radius(i) * m.angle(j).sin();
            assert!((s.field.at(i, j) - exact).abs() < 1e-3);
        }
    }
}
