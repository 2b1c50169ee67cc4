//! Trigonometric polynomials plus an affine part on the unit cube (0,1)ⁿ, n ≤ 3, with exact
//! derivatives, and tensor Gauss sampling of value, gradient and Hessian.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::composite_gauss;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// c · Π_d trig_d(2π k_d x_d), with trig_d = sin when `sine[d]`, cos otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub coefficient: f64,
    pub frequencies: Vec<u32>,
    pub sine: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeFunction {
    pub n: usize,
    pub constant: f64,
    pub linear: Vec<f64>,
    pub terms: Vec<TrigTerm>,
}

/// (f, f′, f″) of one axis factor at x.
fn axis_factor(k: u32, sine: bool, x: f64) -> (f64, f64, f64) {
    let w = TWO_PI * f64::from(k);
    let (s, c) = (w * x).sin_cos();
    if sine {
        (s, w * c, -w * w * s)
    } else {
        (c, -w * s, -w * w * c)
    }
}

impl CubeFunction {
    pub fn new(n: usize, constant: f64, linear: Vec<f64>, terms: Vec<TrigTerm>) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::DimensionOutOfRange { n, min: 1, max: 3 });
        }
        if linear.len() != n || terms.iter().any(|t| t.frequencies.len() != n || t.sine.len() != n) {
            return Err(Error::InvalidArgument(format!("every component must have length n = {n}")));
        }
        Ok(Self { n, constant, linear, terms })
    }

    /// c + a·x.
    pub fn affine(constant: f64, linear: Vec<f64>) -> Result<Self> {
        Self::new(linear.len(), constant, linear, Vec::new())
    }

    /// Largest frequency in any direction.
    #[must_use]
    pub fn degree(&self) -> u32 {
        self.terms.iter().flat_map(|t| t.frequencies.iter().copied()).max().unwrap_or(0)
    }

    #[must_use]
    pub fn value(&self, x: &[f64]) -> f64 {
        let mut v = self.constant + self.linear.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        for t in &self.terms {
            v += t.coefficient * (0..self.n).map(|d| axis_factor(t.frequencies[d], t.sine[d], x[d]).0).product::<f64>();
        }
        v
    }

    #[must_use]
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.linear.clone();
        for t in &self.terms {
            let f: Vec<(f64, f64, f64)> = (0..self.n).map(|d| axis_factor(t.frequencies[d], t.sine[d], x[d])).collect();
            for (d, gd) in g.iter_mut().enumerate() {
                *gd += t.coefficient * (0..self.n).map(|e| if e == d { f[e].1 } else { f[e].0 }).product::<f64>();
            }
        }
        g
    }

    /// Row-major n × n Hessian.
    #[must_use]
    pub fn hessian(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut h = vec![0.0; n * n];
        for t in &self.terms {
            let f: Vec<(f64, f64, f64)> = (0..n).map(|d| axis_factor(t.frequencies[d], t.sine[d], x[d])).collect();
            for a in 0..n {
                for b in 0..n {
                    let prod: f64 = (0..n)
                        .map(|e| match (e == a, e == b) {
                            (true, true) => f[e].2,
                            (true, false) | (false, true) => f[e].1,
                            (false, false) => f[e].0,
                        })
                        .product();
                    h[a * n + b] += t.coefficient * prod;
                }
            }
        }
        h
    }

    /// Samples on the tensor grid over [lo, hi]ⁿ with `panels` Gauss panels per axis.
    ///
    /// Fails when a panel spans more than a quarter period of the highest frequency.
    pub fn sample(&self, lo: f64, hi: f64, panels: usize, gauss_points: usize) -> Result<Vec<CubePoint>> {
        self.sample_impl(lo, hi, panels, gauss_points, true)
    }

    /// As [`Self::sample`] without second derivatives; `hessian_norm` is NaN.
    pub fn sample_first_order(&self, lo: f64, hi: f64, panels: usize, gauss_points: usize) -> Result<Vec<CubePoint>> {
        self.sample_impl(lo, hi, panels, gauss_points, false)
    }

    fn sample_impl(&self, lo: f64, hi: f64, panels: usize, gauss_points: usize, with_hessian: bool) -> Result<Vec<CubePoint>> {
        let width = (hi - lo) / panels as f64;
        if f64::from(self.degree()) * width > 0.25 {
            return Err(Error::QuadratureUnderResolved(format!(
                "degree {} over panels of width {width:.3e}",
                self.degree()
            )));
        }
        let breaks: Vec<f64> = (0..=panels).map(|k| lo + (hi - lo) * k as f64 / panels as f64).collect();
        let (xs, ws) = composite_gauss(&breaks, gauss_points);
        let m = xs.len();
        let n = self.n;
        // Per term and axis: factor tables over the 1D nodes.
        let tables: Vec<Vec<Vec<(f64, f64, f64)>>> = self
            .terms
            .iter()
            .map(|t| (0..n).map(|d| xs.iter().map(|&x| axis_factor(t.frequencies[d], t.sine[d], x)).collect()).collect())
            .collect();
        let total = m.pow(n as u32);
        let mut out = Vec::with_capacity(total);
        let mut idx = [0usize; 3];
        for flat in 0..total {
            let mut rem = flat;
            for slot in idx[..n].iter_mut().rev() {
                *slot = rem % m;
                rem /= m;
            }
            let mut weight = 1.0;
            let mut value = self.constant;
            for d in 0..n {
                weight *= ws[idx[d]];
                value += self.linear[d] * xs[idx[d]];
            }
            let mut grad = [0.0; 3];
            grad[..n].copy_from_slice(&self.linear);
            let mut hess = [0.0; 9];
            for (t, tab) in self.terms.iter().zip(&tables) {
                let mut f = [(1.0, 0.0, 0.0); 3];
                for d in 0..n {
                    f[d] = tab[d][idx[d]];
                }
                let c = t.coefficient;
                value += c * f[0].0 * f[1].0 * f[2].0;
                for a in 0..n {
                    let mut ga = c;
                    for (e, fe) in f.iter().enumerate() {
                        ga *= if e == a { fe.1 } else { fe.0 };
                    }
                    grad[a] += ga;
                    if !with_hessian {
                        continue;
                    }
                    for b in 0..n {
                        let mut hab = c;
                        for (e, fe) in f.iter().enumerate() {
                            hab *= match (e == a, e == b) {
                                (true, true) => fe.2,
                                (true, false) | (false, true) => fe.1,
                                (false, false) => fe.0,
                            };
                        }
                        hess[a * 3 + b] += hab;
                    }
                }
            }
            out.push(CubePoint {
                weight,
                value,
                gradient_norm: grad.iter().map(|g| g * g).sum::<f64>().sqrt(),
                hessian_norm: if with_hessian { hess.iter().map(|h| h * h).sum::<f64>().sqrt() } else { f64::NAN },
            });
        }
        Ok(out)
    }
}

/// One quadrature node with the quantities the cube inequalities integrate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubePoint {
    pub weight: f64,
    pub value: f64,
    pub gradient_norm: f64,
    /// Frobenius norm.
    pub hessian_norm: f64,
}

/// Σ w g over the sampled points.
pub fn integrate(points: &[CubePoint], g: impl Fn(&CubePoint) -> f64) -> f64 {
    points.iter().map(|p| p.weight * g(p)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mixed() -> CubeFunction {
        CubeFunction::new(
            2,
            0.3,
            vec![0.5, -1.0],
            vec![
                TrigTerm { coefficient: 0.7, frequencies: vec![2, 1], sine: vec![true, false] },
                TrigTerm { coefficient: -0.4, frequencies: vec![0, 3], sine: vec![false, true] },
            ],
        )
        .unwrap()
    }

    #[test]
    fn derivatives_match_difference_quotients() {
        let u = mixed();
        let x = [0.31, 0.77];
        let h = 1e-5;
        let g = u.gradient(&x);
        let hs = u.hessian(&x);
        for d in 0..2 {
            let mut p = x;
            let mut m = x;
            p[d] += h;
            m[d] -= h;
            let fd = (u.value(&p) - u.value(&m)) / (2.0 * h);
            assert!((fd - g[d]).abs() < 1e-6, "{fd} vs {}", g[d]);
            let gp = u.gradient(&p);
            let gm = u.gradient(&m);
            for e in 0..2 {
                let fd2 = (gp[e] - gm[e]) / (2.0 * h);
                assert!((fd2 - hs[d * 2 + e]).abs() < 1e-5, "{fd2} vs {}", hs[d * 2 + e]);
            }
        }
    }

    #[test]
    fn grid_sampling_agrees_with_pointwise_evaluation() {
        let u = mixed();
        let pts = u.sample(0.0, 1.0, 16, 4).unwrap();
        // ∫ u over the unit square: constant + linear means; trig terms with a zero mean.
        let mean = integrate(&pts, |p| p.value);
        assert!((mean - (0.3 + 0.25 - 0.5)).abs() < 1e-12, "{mean}");
        assert!((integrate(&pts, |_| 1.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn coarse_panels_are_rejected() {
        assert!(matches!(mixed().sample(0.0, 1.0, 4, 4), Err(Error::QuadratureUnderResolved(_))));
    }
}
