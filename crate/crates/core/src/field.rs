//! Radial fields, finite-difference derivatives and serialization.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{Dimension, RadialMesh};

/// Minimum node count for the derivative stencils.
pub const MIN_DIFF_NODES: usize = 5;

/// A function of r = |x| sampled on a radial mesh, carrying the dimension n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialField {
    mesh: RadialMesh,
    values: Vec<f64>,
    dim: Dimension,
}

impl RadialField {
    pub fn new(mesh: RadialMesh, values: Vec<f64>, dim: Dimension) -> Result<Self> {
        if values.len() != mesh.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values for {} mesh nodes",
                values.len(),
                mesh.len()
            )));
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index, value });
        }
        Ok(Self { mesh, values, dim })
    }

    pub fn from_fn(mesh: RadialMesh, dim: Dimension, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = mesh.nodes().iter().map(|&r| f(r)).collect();
        Self::new(mesh, values, dim)
    }

    #[must_use]
    pub fn mesh(&self) -> &RadialMesh {
        &self.mesh
    }

    #[must_use]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[must_use]
    pub fn dim(&self) -> Dimension {
        self.dim
    }

    #[must_use]
    pub fn n(&self) -> usize {
        self.dim.get()
    }

    #[must_use]
    pub fn nodes(&self) -> &[f64] {
        self.mesh.nodes()
    }

    /// Same nodes, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.mesh.clone(), values, self.dim)
    }

    /// Pointwise map of the values.
    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = self.nodes().iter().zip(&self.values).map(|(&r, &u)| f(r, u)).collect();
        self.with_values(values)
    }

    /// The field u(ρ·) on the mesh scaled by 1/ρ, i.e. a dilation sampled exactly.
    pub fn dilated(&self, rho: f64) -> Self {
        Self { mesh: self.mesh.scaled(1.0 / rho), values: self.values.clone(), dim: self.dim }
    }

    /// Piecewise-linear interpolation; constant extrapolation outside the mesh.
    #[must_use]
    pub fn interpolate(&self, r: f64) -> f64 {
        interpolate(self.nodes(), &self.values, r)
    }

    #[must_use]
    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// First or second radial derivative by three-point Lagrange stencils
    /// (central interior, one-sided at the ends; four points for the second derivative at the ends).
    pub fn differentiate(&self, order: usize) -> Result<Self> {
        Ok(Self { mesh: self.mesh.clone(), values: derivative(self.nodes(), &self.values, order)?, dim: self.dim })
    }

    /// Radial Laplacian u_rr + (n-1) u_r / r.
    pub fn laplacian(&self) -> Result<Self> {
        let d1 = derivative(self.nodes(), &self.values, 1)?;
        let d2 = derivative(self.nodes(), &self.values, 2)?;
        let n1 = (self.n() - 1) as f64;
        let values = self.nodes().iter().zip(d1.iter().zip(&d2)).map(|(&r, (&a, &b))| b + n1 * a / r).collect();
        self.with_values(values)
    }

    /// Radial Laplacian from five-point Lagrange stencils (windows shifted inward at the ends).
    pub fn laplacian_high_order(&self) -> Result<Self> {
        let x = self.nodes();
        let n = x.len();
        if n < MIN_DIFF_NODES {
            return Err(Error::MeshTooCoarse { nodes: n, required: MIN_DIFF_NODES });
        }
        let n1 = (self.n() - 1) as f64;
        let values = (0..n)
            .map(|i| {
                let start = i.saturating_sub(2).min(n - 5);
                let xs = &x[start..start + 5];
                let ys = &self.values[start..start + 5];
                let d1: f64 = fd_weights(x[i], xs, 1).iter().zip(ys).map(|(w, v)| w * v).sum();
                let d2: f64 = fd_weights(x[i], xs, 2).iter().zip(ys).map(|(w, v)| w * v).sum();
                d2 + n1 * d1 / x[i]
            })
            .collect();
        self.with_values(values)
    }

    /// Cumulative trapezoid ∫_{r_0}^{r} u dr.
    pub fn antiderivative(&self) -> Self {
        let r = self.nodes();
        let mut acc = vec![0.0; r.len()];
        for i in 1..r.len() {
            acc[i] = acc[i - 1] + 0.5 * (r[i] - r[i - 1]) * (self.values[i] + self.values[i - 1]);
        }
        Self { mesh: self.mesh.clone(), values: acc, dim: self.dim }
    }

    /// CSV with header `r,u`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["r", "u"])?;
        for (r, u) in self.nodes().iter().zip(&self.values) {
            wr.write_record([fmt17(*r), fmt17(*u)])?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Reads `r,u` CSV produced by [`RadialField::write_csv`].
    pub fn read_csv<R: Read>(rd: R, dim: Dimension) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(rd);
        let mut nodes = Vec::new();
        let mut values = Vec::new();
        for rec in reader.records() {
            let rec = rec?;
            nodes.push(parse_f64(rec.get(0))?);
            values.push(parse_f64(rec.get(1))?);
        }
        let mesh = RadialMesh::from_nodes(nodes, crate::mesh::Grading::Uniform)?;
        Self::new(mesh, values, dim)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RadialField = serde_json::from_str(s)?;
        let mesh = RadialMesh::from_nodes(raw.mesh.nodes().to_vec(), raw.mesh.grading())?;
        Self::new(mesh, raw.values, raw.dim)
    }
}

/// Formats with 17 significant digits.
#[must_use]
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: Option<&str>) -> Result<f64> {
    s.ok_or_else(|| Error::Io("missing column".into()))?
        .trim()
        .parse::<f64>()
        .map_err(|e| Error::Io(e.to_string()))
}

/// Piecewise-linear interpolation on increasing `x`; constant outside.
#[must_use]
pub fn interpolate(x: &[f64], y: &[f64], t: f64) -> f64 {
    let n = x.len();
    if t <= x[0] {
        return y[0];
    }
    if t >= x[n - 1] {
        return y[n - 1];
    }
    let i = x.partition_point(|&v| v <= t).saturating_sub(1).min(n - 2);
    let w = (t - x[i]) / (x[i + 1] - x[i]);
    y[i] + w * (y[i + 1] - y[i])
}

/// Finite-difference weights for the `order`-th derivative at `x0` from the stencil `xs`.
pub fn fd_weights(x0: f64, xs: &[f64], order: usize) -> Vec<f64> {
    let m = xs.len();
    let mut c = vec![vec![0.0; order + 1]; m];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..m {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

/// Derivative of sampled values on nonuniform nodes.
pub fn derivative(x: &[f64], y: &[f64], order: usize) -> Result<Vec<f64>> {
    let n = x.len();
    if n < MIN_DIFF_NODES {
        return Err(Error::MeshTooCoarse { nodes: n, required: MIN_DIFF_NODES });
    }
    if !(1..=2).contains(&order) {
        return Err(Error::InvalidArgument(format!("derivative order {order} not in {{1, 2}}")));
    }
    let mut out = vec![0.0; n];
    let end = if order == 1 { 3 } else { 4 };
    let apply = |x0: f64, idx: &[usize]| -> f64 {
        let xs: Vec<f64> = idx.iter().map(|&k| x[k]).collect();
        fd_weights(x0, &xs, order).iter().zip(idx).map(|(w, &k)| w * y[k]).sum()
    };
    let head: Vec<usize> = (0..end).collect();
    let tail: Vec<usize> = (n - end..n).collect();
    out[0] = apply(x[0], &head);
    out[n - 1] = apply(x[n - 1], &tail);
    for i in 1..n - 1 {
        let hm = x[i] - x[i - 1];
        let hp = x[i + 1] - x[i];
        out[i] = if order == 1 {
            (-hp / (hm * (hm + hp))) * y[i - 1] + ((hp - hm) / (hm * hp)) * y[i] + (hm / (hp * (hm + hp))) * y[i + 1]
        } else {
            2.0 * (y[i - 1] / (hm * (hm + hp)) - y[i] / (hm * hp) + y[i + 1] / (hp * (hm + hp)))
        };
    }
    Ok(out)
}
