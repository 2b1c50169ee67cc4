//! Seeded generators of probe functions with exact structure.
//!
//! Every sample is a pure function of (config, family, index): the generator for sample `index`
//! is ChaCha8 seeded by `seed` on its own stream, so sweeps can draw samples in any order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inequality::cube::{CubeFunction, TrigTerm};
use crate::inequality::harmonic::{HarmonicProbe, MAX_DEGREE};
use crate::inequality::superharmonic::{PointMass, SuperharmonicProbe};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    /// Frequency cap for trigonometric probes.
    pub trig_degree: u32,
    /// Terms per sparse trigonometric probe in n ≥ 2; n = 1 uses the full basis.
    pub trig_terms: usize,
    pub harmonic_degree: usize,
    /// Degree cap of the harmonic part of superharmonic probes.
    pub superharmonic_harmonic_degree: usize,
    pub max_masses: usize,
    /// Poles lie in the shell `mass_radius.0 ≤ |x| ≤ mass_radius.1`.
    pub mass_radius: (f64, f64),
    /// a in −a|x − z|² is uniform on [0, max_concavity].
    pub max_concavity: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            trig_degree: 8,
            trig_terms: 12,
            harmonic_degree: 10,
            superharmonic_harmonic_degree: 4,
            max_masses: 5,
            mass_radius: (1.5, 3.0),
            max_concavity: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Trig = 1,
    Harmonic = 2,
    Superharmonic = 3,
    RadialPower = 4,
}

impl SamplerConfig {
    fn rng(&self, family: Family, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(((family as u64) << 56) | index);
        rng
    }
}

/// A probe together with the config and index that reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sampled<T> {
    pub config: SamplerConfig,
    pub index: u64,
    pub probe: T,
}

impl<T> Sampled<T> {
    fn new(config: &SamplerConfig, index: u64, probe: T) -> Self {
        Self { config: config.clone(), index, probe }
    }
}

fn coefficient(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(-1.0..=1.0)
}

/// Trigonometric polynomial on (0,1)ⁿ with frequencies ≤ `degree` and coefficients uniform on
/// [−1, 1]; degree 0 gives a constant.
///
/// n = 1 fills the whole basis {1, cos 2πkx, sin 2πkx}. Higher n draws `trig_terms` random
/// tensor products, one of which reaches `degree` in some direction.
pub fn sample_trig(cfg: &SamplerConfig, n: usize, degree: u32, index: u64) -> Result<Sampled<CubeFunction>> {
    if degree > 16 {
        return Err(Error::InvalidArgument(format!("trigonometric degree {degree} exceeds 16")));
    }
    let mut rng = cfg.rng(Family::Trig, index);
    let constant = coefficient(&mut rng);
    let mut terms = Vec::new();
    if degree > 0 {
        if n == 1 {
            for k in 1..=degree {
                for sine in [false, true] {
                    terms.push(TrigTerm { coefficient: coefficient(&mut rng), frequencies: vec![k], sine: vec![sine] });
                }
            }
        } else {
            for j in 0..cfg.trig_terms.max(1) {
                let mut frequencies: Vec<u32> = (0..n).map(|_| rng.random_range(0..=degree)).collect();
                if j == 0 {
                    let d = rng.random_range(0..n);
                    frequencies[d] = degree;
                }
                let sine = (0..n).map(|_| rng.random_bool(0.5)).collect();
                terms.push(TrigTerm { coefficient: coefficient(&mut rng), frequencies, sine });
            }
        }
    }
    let u = CubeFunction::new(n, constant, vec![0.0; n], terms)?;
    Ok(Sampled::new(cfg, index, u))
}

/// Σ_{ℓ ≤ degree} a_ℓm r^ℓ Y_ℓm with a_ℓm uniform on [−1, 1].
pub fn sample_harmonic(cfg: &SamplerConfig, degree: usize, index: u64) -> Result<Sampled<HarmonicProbe>> {
    if degree > MAX_DEGREE {
        return Err(Error::InvalidArgument(format!("harmonic degree {degree} exceeds {MAX_DEGREE}")));
    }
    let mut rng = cfg.rng(Family::Harmonic, index);
    let coefficients = (0..(degree + 1) * (degree + 1)).map(|_| coefficient(&mut rng)).collect();
    Ok(Sampled::new(cfg, index, HarmonicProbe::new(degree, coefficients)?))
}

fn unit_vector(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi = rng.random_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - z * z).max(0.0).sqrt();
    [s * phi.cos(), s * phi.sin(), z]
}

/// Σ cᵢ/|x − xᵢ| + harmonic − a|x − z|² with 1..=`max_masses` charges uniform on [0, 1], poles in
/// the configured shell, harmonic degree uniform in 0..=cap, and z uniform in B₁.
pub fn sample_superharmonic(cfg: &SamplerConfig, index: u64) -> Result<Sampled<SuperharmonicProbe>> {
    let (lo, hi) = cfg.mass_radius;
    if !(lo > 1.0 && hi >= lo) {
        return Err(Error::InvalidArgument(format!("pole shell [{lo}, {hi}] must lie outside B̄₁")));
    }
    let mut rng = cfg.rng(Family::Superharmonic, index);
    let count = rng.random_range(1..=cfg.max_masses.max(1));
    let masses = (0..count)
        .map(|_| {
            let dir = unit_vector(&mut rng);
            let r = rng.random_range(lo..=hi);
            PointMass { charge: rng.random_range(0.0..=1.0), position: [r * dir[0], r * dir[1], r * dir[2]] }
        })
        .collect();
    let degree = rng.random_range(0..=cfg.superharmonic_harmonic_degree.min(MAX_DEGREE));
    let coefficients = (0..(degree + 1) * (degree + 1)).map(|_| coefficient(&mut rng)).collect();
    let harmonic = HarmonicProbe::new(degree, coefficients)?;
    let concavity = rng.random_range(0.0..=cfg.max_concavity);
    let concavity_center = loop {
        let z = [coefficient(&mut rng), coefficient(&mut rng), coefficient(&mut rng)];
        if z.iter().map(|v| v * v).sum::<f64>() < 1.0 {
            break z;
        }
    };
    Ok(Sampled::new(cfg, index, SuperharmonicProbe { masses, harmonic, concavity, concavity_center }))
}

/// u(x) = c|x|^α: ∫_{B_ρ}|u_r| grows exactly like ρ^{n−1+α}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialPower {
    pub coefficient: f64,
    pub exponent: f64,
}

impl RadialPower {
    #[must_use]
    pub fn value(&self, r: f64) -> f64 {
        self.coefficient * r.powf(self.exponent)
    }

    #[must_use]
    pub fn derivative(&self, r: f64) -> f64 {
        self.coefficient * self.exponent * r.powf(self.exponent - 1.0)
    }

    /// ∫_{B_ρ}|u_r| / ρ^{n−1+α} = |S^{n−1}||c|α/(n−1+α).
    #[must_use]
    pub fn growth_constant(&self, n: usize) -> f64 {
        crate::special::sphere_measure(n) * self.coefficient.abs() * self.exponent / (n as f64 - 1.0 + self.exponent)
    }
}

/// c uniform on [−1, 1], α uniform on [0.1, 1].
#[must_use]
pub fn sample_radial_power(cfg: &SamplerConfig, index: u64) -> Sampled<RadialPower> {
    let mut rng = cfg.rng(Family::RadialPower, index);
    let coefficient = coefficient(&mut rng);
    let exponent = rng.random_range(0.1..=1.0);
    Sampled::new(cfg, index, RadialPower { coefficient, exponent })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_configs_give_equal_serialized_probes() {
        let cfg = SamplerConfig::default();
        let a = serde_json::to_string(&sample_trig(&cfg, 2, 5, 0).unwrap()).unwrap();
        let b = serde_json::to_string(&sample_trig(&cfg, 2, 5, 0).unwrap()).unwrap();
        assert_eq!(a, b);
        let c = serde_json::to_string(&sample_superharmonic(&cfg, 3).unwrap()).unwrap();
        assert_eq!(c, serde_json::to_string(&sample_superharmonic(&cfg, 3).unwrap()).unwrap());
        assert_ne!(a, serde_json::to_string(&sample_trig(&cfg, 2, 5, 1).unwrap()).unwrap());
        let other = SamplerConfig { seed: 43, ..cfg };
        assert_ne!(a, serde_json::to_string(&sample_trig(&other, 2, 5, 0).unwrap()).unwrap());
    }

    #[test]
    fn degree_zero_is_constant() {
        let cfg = SamplerConfig::default();
        let u = sample_trig(&cfg, 3, 0, 7).unwrap().probe;
        assert!(u.terms.is_empty());
        assert_eq!(u.value(&[0.1, 0.2, 0.3]), u.value(&[0.9, 0.5, 0.7]));
        let v = sample_harmonic(&cfg, 0, 7).unwrap().probe;
        assert_eq!(v.value(&[0.1, 0.2, 0.3]), v.center_value());
    }

    #[test]
    fn trig_degree_is_attained() {
        let cfg = SamplerConfig::default();
        for n in 1..=3 {
            assert_eq!(sample_trig(&cfg, n, 6, 11).unwrap().probe.degree(), 6);
        }
        assert!(sample_trig(&cfg, 1, 17, 0).is_err());
    }

    #[test]
    fn coefficient_mean_is_centred() {
        // Uniform on [−1, 1]: σ = 1/√3 per coefficient.
        let cfg = SamplerConfig::default();
        let mut sum = 0.0;
        let mut count = 0usize;
        let mut index = 0;
        while count < 10_000 {
            let v = sample_harmonic(&cfg, 10, index).unwrap().probe;
            sum += v.coefficients.iter().sum::<f64>();
            count += v.coefficients.len();
            index += 1;
        }
        let sigma = (1.0 / 3.0 / count as f64).sqrt();
        assert!((sum / count as f64).abs() < 3.0 * sigma, "mean {}", sum / count as f64);
    }

    fn laplacian_fd(f: impl Fn(&[f64; 3]) -> f64, x: &[f64; 3]) -> f64 {
        let h = 1e-3;
        let c = f(x);
        let mut total = 0.0;
        for k in 0..3 {
            let at = |s: f64| {
                let mut y = *x;
                y[k] += s;
                f(&y)
            };
            total += (-at(2.0 * h) + 16.0 * at(h) - 30.0 * c + 16.0 * at(-h) - at(-2.0 * h)) / (12.0 * h * h);
        }
        total
    }

    fn interior_points(count: usize) -> Vec<[f64; 3]> {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut pts = Vec::new();
        while pts.len() < count {
            let x = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let r2: f64 = x.iter().map(|v: &f64| v * v).sum();
            // Keep the stencil inside B₁.
            if r2.sqrt() < 0.99 {
                pts.push(x);
            }
        }
        pts
    }

    #[test]
    fn potentials_and_harmonics_are_harmonic() {
        let cfg = SamplerConfig { max_concavity: 0.0, ..SamplerConfig::default() };
        for index in 0..5 {
            let u = sample_superharmonic(&cfg, index).unwrap().probe;
            let v = sample_harmonic(&cfg, 6, index).unwrap().probe;
            for x in interior_points(20) {
                assert!(laplacian_fd(|y| u.value(y), &x).abs() <= 1e-6);
                assert!(laplacian_fd(|y| v.value(y), &x).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn superharmonic_probes_pass_the_difference_test() {
        let cfg = SamplerConfig::default();
        let u = sample_superharmonic(&cfg, 0).unwrap().probe;
        assert!(u.masses.iter().all(|m| m.charge >= 0.0 && (1.5..=3.0).contains(&m.position.iter().map(|v| v * v).sum::<f64>().sqrt())));
        for x in interior_points(1000) {
            assert!(u.minus_laplacian_fd(&x) >= -1e-8);
        }
    }

    #[test]
    fn radial_power_growth_constant() {
        let p = sample_radial_power(&SamplerConfig::default(), 0).probe;
        assert!((0.1..=1.0).contains(&p.exponent));
        let rho = 0.4;
        let mass = crate::inequality::morrey::radial_derivative_mass(3, |r| p.derivative(r), 0.0, rho);
        assert!((mass / (p.growth_constant(3) * rho.powf(2.0 + p.exponent)) - 1.0).abs() < 1e-6);
    }
}
