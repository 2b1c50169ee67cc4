//! Absorption of errors in larger balls for subadditive ball functions σ on B₁.
//!
//! Hypothesis: ρ^β σ(B_{ρ/2}(y)) ≤ δ ρ^β σ(B_ρ(y)) + C̄ for B_ρ(y) ⊂ B₁, with δ = 1/(2^{1+β}M)
//! and M the size of a cover of B_{1/2} by balls of radius 1/8 centred in B_{1/2}.
//! Conclusion: σ(B_{1/2}) ≤ 2·4^β M C̄.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::ball_volume;

/// A nonnegative set function on balls inside B₁.
pub trait BallFunction: Sync {
    fn dim(&self) -> usize;
    fn sigma(&self, center: &[f64], radius: f64) -> f64;
}

/// σ(B) = |B|.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lebesgue {
    pub n: usize,
}

impl BallFunction for Lebesgue {
    fn dim(&self) -> usize {
        self.n
    }

    fn sigma(&self, _center: &[f64], radius: f64) -> f64 {
        ball_volume(self.n) * radius.powi(self.n as i32)
    }
}

/// σ(B) = |B| + `mass`·[atom ∈ B]: subadditive, and violates the hypothesis at every ball whose
/// half contains the atom once `mass` outweighs C̄.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LebesgueWithAtom {
    pub n: usize,
    pub atom: Vec<f64>,
    pub mass: f64,
}

impl BallFunction for LebesgueWithAtom {
    fn dim(&self) -> usize {
        self.n
    }

    fn sigma(&self, center: &[f64], radius: f64) -> f64 {
        let inside = distance(center, &self.atom) < radius;
        ball_volume(self.n) * radius.powi(self.n as i32) + if inside { self.mass } else { 0.0 }
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Centres in B_{1/2} whose balls of radius 1/8 cover B_{1/2}.
///
/// Greedy maximal separated subset of a cubic lattice of spacing h: a lattice point left out is
/// within 1/8 − h√n/2 of a chosen centre, and every point of B_{1/2} is within h√n/2 of a lattice
/// point in B_{1/2}.
pub fn covering_net(n: usize) -> Result<Vec<Vec<f64>>> {
    if !(2..=3).contains(&n) {
        return Err(Error::DimensionOutOfRange { n, min: 2, max: 3 });
    }
    let per_half = if n == 2 { 64 } else { 32 };
    let h = 0.5 / per_half as f64;
    let separation = 0.125 - h * (n as f64).sqrt() / 2.0;
    let k = per_half as i64;
    let mut lattice = Vec::new();
    let mut push = |p: Vec<f64>| {
        if norm(&p) <= 0.5 {
            lattice.push(p);
        }
    };
    for i in -k..=k {
        for j in -k..=k {
            if n == 2 {
                push(vec![i as f64 * h, j as f64 * h]);
            } else {
                for l in -k..=k {
                    push(vec![i as f64 * h, j as f64 * h, l as f64 * h]);
                }
            }
        }
    }
    let mut net: Vec<Vec<f64>> = Vec::new();
    for p in lattice {
        if net.iter().all(|c| distance(c, &p) >= separation) {
            net.push(p);
        }
    }
    Ok(net)
}

/// C_β = 2·4^β M.
#[must_use]
pub fn conclusion_constant(beta: f64, covering: usize) -> f64 {
    2.0 * 4f64.powf(beta) * covering as f64
}

/// δ = 1/(2^{1+β}M).
#[must_use]
pub fn auto_delta(beta: f64, covering: usize) -> f64 {
    1.0 / (2f64.powf(1.0 + beta) * covering as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubadditiveInstance {
    pub beta: f64,
    pub cbar: f64,
    /// Covering number M.
    pub covering: usize,
    pub delta: f64,
}

impl SubadditiveInstance {
    /// Instance with M from [`covering_net`] and δ = 1/(2^{1+β}M).
    pub fn auto(n: usize, beta: f64, cbar: f64) -> Result<Self> {
        if !(beta >= 0.0) {
            return Err(Error::InvalidArgument(format!("β must be ≥ 0, got {beta}")));
        }
        if !(cbar > 0.0) {
            return Err(Error::InvalidArgument(format!("C̄ must be > 0, got {cbar}")));
        }
        let covering = covering_net(n)?.len();
        Ok(Self { beta, cbar, covering, delta: auto_delta(beta, covering) })
    }
}

/// Deterministic family of balls B_ρ(y) ⊂ B₁: B₁ itself, then random centres and radii.
#[must_use]
pub fn probe_balls(n: usize, count: usize, seed: u64) -> Vec<(Vec<f64>, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut balls = vec![(vec![0.0; n], 1.0)];
    while balls.len() < count {
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = norm(&y);
        if r >= 1.0 {
            continue;
        }
        let rho = rng.random_range(0.0..1.0) * (1.0 - r);
        if rho > 0.0 {
            balls.push((y, rho));
        }
    }
    balls
}

/// Left side minus δ times the right side, ρ^β(σ(B_{ρ/2}) − δσ(B_ρ)), for one probe ball.
pub fn hypothesis_excess(sigma: &dyn BallFunction, inst: &SubadditiveInstance, center: &[f64], rho: f64) -> f64 {
    rho.powf(inst.beta) * (sigma.sigma(center, rho / 2.0) - inst.delta * sigma.sigma(center, rho))
}

/// sup over `balls` of the hypothesis excess, clamped at 0: the smallest admissible C̄.
#[must_use]
pub fn smallest_cbar(sigma: &dyn BallFunction, inst: &SubadditiveInstance, balls: &[(Vec<f64>, f64)]) -> f64 {
    balls.iter().map(|(c, r)| hypothesis_excess(sigma, inst, c, *r)).fold(0.0, f64::max)
}

/// Checks σ(B) ≤ Σσ(Bʲ) on `count` random covers B_r(y) ⊂ ∪ B_{r/4}(y + 2r xᵢ) built from the net.
pub fn check_subadditivity(sigma: &dyn BallFunction, count: usize, seed: u64) -> Result<()> {
    let n = sigma.dim();
    let net = covering_net(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    while done < count {
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
        let room = 1.0 - norm(&y);
        if room <= 0.0 {
            continue;
        }
        let r = rng.random_range(0.0..1.0) * room / 1.25;
        if r <= 0.0 {
            continue;
        }
        let whole = sigma.sigma(&y, r);
        let parts: f64 = net
            .iter()
            .map(|x| {
                let c: Vec<f64> = y.iter().zip(x).map(|(a, b)| a + 2.0 * r * b).collect();
                sigma.sigma(&c, r / 4.0)
            })
            .sum();
        if whole > parts * (1.0 + 1e-12) {
            return Err(Error::HypothesisViolated(format!("σ(B_{r}({y:?})) = {whole:e} exceeds the cover sum {parts:e}")));
        }
        done += 1;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimonReport {
    pub instance: SubadditiveInstance,
    pub probes: usize,
    /// σ(B_{1/2}).
    pub lhs: f64,
    /// C_β C̄.
    pub rhs: f64,
    pub conclusion_constant: f64,
    pub pass: bool,
}

/// Verifies the hypothesis on every probe ball, then the conclusion.
pub fn simon_absorption(
    sigma: &dyn BallFunction,
    inst: &SubadditiveInstance,
    balls: &[(Vec<f64>, f64)],
) -> Result<SimonReport> {
    for (c, r) in balls {
        if norm(c) + r > 1.0 + 1e-12 {
            return Err(Error::InvalidArgument(format!("probe ball B_{r}({c:?}) leaves B₁")));
        }
        let excess = hypothesis_excess(sigma, inst, c, *r);
        if excess > inst.cbar * (1.0 + 1e-12) {
            return Err(Error::HypothesisFailedAtBall { center: c.clone(), radius: *r });
        }
    }
    let n = sigma.dim();
    let lhs = sigma.sigma(&vec![0.0; n], 0.5);
    let cb = conclusion_constant(inst.beta, inst.covering);
    let rhs = cb * inst.cbar;
    Ok(SimonReport { instance: inst.clone(), probes: balls.len(), lhs, rhs, conclusion_constant: cb, pass: lhs <= rhs })
}
