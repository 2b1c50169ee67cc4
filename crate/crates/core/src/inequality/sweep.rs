//! Randomized sweeps of the stand-alone inequalities, grouped as the CLI exposes them.
//!
//! Each check maps over sample indices in parallel and folds with max/sum, so the report does not
//! depend on scheduling. The witness kept for a failing check is the one with the lowest index.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::sampler::{sample_harmonic, sample_radial_power, sample_superharmonic, sample_trig, SamplerConfig};

use super::harmonic::{harmonic_median_control, SphereRule};
use super::interpolation::{
    interp_1d_sampled, interp_cube_candidate, interp_cube_sampled, nash_candidate, nash_cube_sampled,
    poincare_cube_sampled, sample_first_order, sample_interval, sample_unit_cube,
};
use super::morrey::{morrey_check, RadialProbe};
use super::simon::{
    check_subadditivity, conclusion_constant, probe_balls, simon_absorption, smallest_cbar, Lebesgue, LebesgueWithAtom,
    SubadditiveInstance,
};
use super::superharmonic::{superharmonic_l1_control, SUPERHARMONIC_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteGroup {
    AppendixA,
    AppendixB,
    AppendixC,
    Harmonic,
    Superharmonic,
}

impl SuiteGroup {
    pub const ALL: [SuiteGroup; 5] =
        [Self::AppendixA, Self::AppendixB, Self::AppendixC, Self::Harmonic, Self::Superharmonic];

    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            Self::AppendixA => "appendix-a",
            Self::AppendixB => "appendix-b",
            Self::AppendixC => "appendix-c",
            Self::Harmonic => "harmonic",
            Self::Superharmonic => "superharmonic",
        }
    }

    /// Sample count used when the caller gives none.
    #[must_use]
    pub fn default_samples(self) -> usize {
        match self {
            Self::Superharmonic => 200,
            _ => 1000,
        }
    }
}

impl fmt::Display for SuiteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite group {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCheck {
    pub name: String,
    pub samples: usize,
    /// Inequality evaluations; a sample may be checked at several (p, δ, ε).
    pub evaluations: usize,
    pub violations: usize,
    /// Largest lhs over constant-free rhs seen.
    pub max_empirical_constant: f64,
    /// The constant being tested, when there is one.
    pub constant: Option<f64>,
    pub witness: Option<Value>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub group: SuiteGroup,
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<SweepCheck>,
    pub pass: bool,
}

#[derive(Debug, Clone, Default)]
struct Tally {
    evaluations: usize,
    violations: usize,
    max_constant: f64,
    witness: Option<(u64, Value)>,
}

impl Tally {
    fn merge(mut self, other: Self) -> Self {
        self.evaluations += other.evaluations;
        self.violations += other.violations;
        self.max_constant = self.max_constant.max(other.max_constant);
        self.witness = match (self.witness, other.witness) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        };
        self
    }

    fn record(&mut self, index: u64, constant: f64, pass: bool, witness: impl FnOnce() -> Value) {
        self.evaluations += 1;
        // NaN must not hide behind max.
        self.max_constant = if constant.is_nan() { f64::INFINITY } else { self.max_constant.max(constant) };
        if !pass {
            self.violations += 1;
            if self.witness.is_none() {
                self.witness = Some((index, witness()));
            }
        }
    }

    fn into_check(self, name: &str, samples: usize, constant: Option<f64>) -> SweepCheck {
        SweepCheck {
            name: name.to_string(),
            samples,
            evaluations: self.evaluations,
            violations: self.violations,
            max_empirical_constant: self.max_constant,
            constant,
            witness: self.witness.map(|w| w.1),
            pass: self.violations == 0,
        }
    }
}

/// Maps `per_sample` over 0..samples, filling K tallies per sample, and folds them.
fn sweep<const K: usize>(
    samples: usize,
    per_sample: impl Fn(u64, &mut [Tally; K]) -> Result<()> + Sync,
) -> Result<[Tally; K]> {
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut t: [Tally; K] = std::array::from_fn(|_| Tally::default());
            per_sample(i, &mut t)?;
            Ok(t)
        })
        .try_reduce(
            || std::array::from_fn(|_| Tally::default()),
            |a, b| {
                let mut b = b.into_iter();
                Ok(a.map(|x| x.merge(b.next().unwrap_or_default())))
            },
        )
}

fn to_json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).unwrap_or(Value::Null)
}

/// Runs one group with `samples` random probes drawn from `cfg`.
pub fn run_suite(group: SuiteGroup, samples: usize, cfg: &SamplerConfig) -> Result<SuiteReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("a sweep needs at least one sample".into()));
    }
    let checks = match group {
        SuiteGroup::AppendixA => appendix_a(samples, cfg)?,
        SuiteGroup::AppendixB => appendix_b(samples, cfg)?,
        SuiteGroup::AppendixC => appendix_c(samples, cfg)?,
        SuiteGroup::Harmonic => harmonic(samples, cfg)?,
        SuiteGroup::Superharmonic => superharmonic(samples, cfg)?,
    };
    let pass = checks.iter().all(|c| c.pass);
    Ok(SuiteReport { group, seed: cfg.seed, samples, checks, pass })
}

const INTERVAL_DELTAS: [f64; 3] = [1.0, 0.5, 0.125];
const EXPONENTS: [f64; 2] = [1.0, 2.0];
const CUBE_EPSILONS: [f64; 2] = [0.5, 0.125];
/// Frequency cap of the three-dimensional cube probes, set by the 36³ quadrature.
const CUBE_DEGREE_3D: u32 = 3;

/// Degree of sample `index` cycles through 0..=cap.
fn cycled_degree(index: u64, cap: u32) -> u32 {
    (index % (u64::from(cap) + 1)) as u32
}

fn appendix_a(samples: usize, cfg: &SamplerConfig) -> Result<Vec<SweepCheck>> {
    let cap = cfg.trig_degree;
    let [interval] = sweep(samples, |i, [t]| {
        let s = sample_trig(cfg, 1, cycled_degree(i, cap), i)?;
        for delta in INTERVAL_DELTAS {
            let pts = sample_interval(&s.probe, delta)?;
            for p in EXPONENTS {
                let c = interp_1d_sampled(&pts, p, delta)?;
                t.record(i, c.empirical_constant, c.pass, || json!({"p": p, "delta": delta, "check": c, "probe": s}));
            }
        }
        Ok(())
    })?;

    // One second-order sample in the square feeds all three cube checks.
    let n = 2;
    let [poincare2, interp, nash] = sweep(samples, |i, [poincare, interp, nash]| {
        let s = sample_trig(cfg, n, cycled_degree(i, cap), i)?;
        let pts = sample_unit_cube(&s.probe)?;
        for p in EXPONENTS {
            let c = poincare_cube_sampled(n, &pts, p)?;
            poincare.record(i, c.empirical_constant, c.pass, || json!({"p": p, "check": c, "probe": s}));
            for eps in CUBE_EPSILONS {
                let c = interp_cube_sampled(&pts, p, eps, interp_cube_candidate(n, p))?;
                interp.record(i, c.empirical_constant, c.pass, || json!({"p": p, "epsilon": eps, "check": c, "probe": s}));
                let c = nash_cube_sampled(n, &pts, p, eps)?;
                nash.record(i, c.empirical_constant, c.pass, || json!({"p": p, "epsilon": eps, "check": c, "probe": s}));
            }
        }
        Ok(())
    })?;

    let n = 3;
    let degree_cap = cap.min(CUBE_DEGREE_3D);
    let [poincare3] = sweep(samples, |i, [t]| {
        let s = sample_trig(cfg, n, cycled_degree(i, degree_cap), i)?;
        let pts = sample_first_order(&s.probe)?;
        for p in EXPONENTS {
            let c = poincare_cube_sampled(n, &pts, p)?;
            t.record(i, c.empirical_constant, c.pass, || json!({"p": p, "check": c, "probe": s}));
        }
        Ok(())
    })?;

    // Cube constants are reported at p = 2; p = 1 is tested against its own value.
    Ok(vec![
        interval.into_check("interp_1d_explicit", samples, Some(1.0)),
        poincare2.into_check("poincare_cube_n2", samples, Some(4.0)),
        poincare3.into_check("poincare_cube_n3", samples, Some(9.0)),
        interp.into_check("interp_cube_n2", samples, Some(interp_cube_candidate(2, 2.0))),
        nash.into_check("nash_cube_n2", samples, Some(nash_candidate(2, 2.0))),
    ])
}

const SIMON_BETAS: [f64; 3] = [0.0, 0.5, 1.0];
const SUBADDITIVITY_COVERS: usize = 100;

fn appendix_b(samples: usize, cfg: &SamplerConfig) -> Result<Vec<SweepCheck>> {
    let mut checks = Vec::new();
    for n in [2, 3] {
        let sigma = Lebesgue { n };
        check_subadditivity(&sigma, SUBADDITIVITY_COVERS, cfg.seed)?;
        let balls = probe_balls(n, samples, cfg.seed);
        let mut tally = Tally::default();
        let mut previous = 0.0;
        for (k, beta) in SIMON_BETAS.into_iter().enumerate() {
            let mut inst = SubadditiveInstance::auto(n, beta, 1.0)?;
            inst.cbar = smallest_cbar(&sigma, &inst, &balls);
            let rep = simon_absorption(&sigma, &inst, &balls)?;
            // C_β must grow with β.
            let monotone = rep.conclusion_constant > previous;
            previous = rep.conclusion_constant;
            tally.record(k as u64, crate::report::ratio(rep.lhs, inst.cbar), rep.pass && monotone, || to_json(&rep));
        }
        let check = tally.into_check(&format!("simon_lebesgue_n{n}"), samples, Some(conclusion_constant(0.0, 1)));
        checks.push(SweepCheck { constant: None, ..check });
    }

    // σ = |B| + atom: C̄ is tuned to the Lebesgue part, so the ball around the atom must fail.
    let n = 2;
    let sigma = LebesgueWithAtom { n, atom: vec![0.3, 0.2], mass: 10.0 };
    check_subadditivity(&sigma, SUBADDITIVITY_COVERS, cfg.seed)?;
    let balls = probe_balls(n, samples, cfg.seed);
    let mut inst = SubadditiveInstance::auto(n, 0.0, 1.0)?;
    inst.cbar = smallest_cbar(&Lebesgue { n }, &inst, &balls);
    let mut tally = Tally::default();
    match simon_absorption(&sigma, &inst, &balls) {
        Err(Error::HypothesisFailedAtBall { center, radius }) => {
            let genuine = super::simon::hypothesis_excess(&sigma, &inst, &center, radius) > inst.cbar;
            tally.record(0, 0.0, genuine, || json!({"center": center, "radius": radius}));
        }
        Ok(rep) => tally.record(0, 0.0, false, || json!({"accepted": rep})),
        Err(e) => return Err(e),
    }
    checks.push(tally.into_check("simon_rejects_atom", samples, None));
    Ok(checks)
}

const MORREY_RADII: [f64; 4] = [0.05, 0.1, 0.2, 0.4];

fn appendix_c(samples: usize, cfg: &SamplerConfig) -> Result<Vec<SweepCheck>> {
    let n = 3;
    let [t] = sweep(samples, |i, [t]| {
        let s = sample_radial_power(cfg, i);
        let p = s.probe;
        let probe = RadialProbe { n, profile: move |r: f64| p.value(r), derivative: move |r: f64| p.derivative(r) };
        // The growth is exact, so C̄ only needs room for quadrature error.
        let cbar = p.growth_constant(n) * (1.0 + 1e-6) + 1e-300;
        let rep = morrey_check(&probe, p.exponent, cbar, &[vec![0.0; n]], &MORREY_RADII)?;
        t.record(i, rep.worst_lemma_ratio, rep.pass, || json!({"report": rep, "probe": s}));
        Ok(())
    })?;
    Ok(vec![t.into_check("morrey_radial_power", samples, Some(1.0))])
}

fn harmonic(samples: usize, cfg: &SamplerConfig) -> Result<Vec<SweepCheck>> {
    let rule = SphereRule::standard();
    let cap = cfg.harmonic_degree as u32;
    let [sup, l1, median] = sweep(samples, |i, [sup, l1, median]| {
        let s = sample_harmonic(cfg, cycled_degree(i, cap) as usize, i)?;
        let rep = harmonic_median_control(&s.probe, &rule)?;
        let witness = || json!({"report": rep, "probe": s});
        sup.record(i, crate::report::ratio(rep.sup_deviation, rep.sup_radial), rep.pass_sup, witness);
        l1.record(i, crate::report::ratio(rep.l1_deviation, rep.l1_radial), rep.pass_l1, witness);
        let half = 0.5 + 1e-9;
        let fraction = rep.above_fraction.max(rep.below_fraction);
        median.record(i, fraction, rep.above_fraction <= half && rep.below_fraction <= half, witness);
        Ok(())
    })?;
    let constant = Some(super::harmonic::median_constant());
    Ok(vec![
        sup.into_check("harmonic_sup", samples, constant),
        l1.into_check("harmonic_l1", samples, constant),
        median.into_check("harmonic_median_property", samples, Some(0.5)),
    ])
}

/// The suite maximum may grow by at most this factor when the family doubles.
pub const SUPERHARMONIC_GROWTH_LIMIT: f64 = 2.0;
/// Interior points per probe at which −Δu is checked by differences.
const SUPERHARMONIC_FD_POINTS: usize = 16;

fn superharmonic_family(samples: usize, cfg: &SamplerConfig, name: &str) -> Result<SweepCheck> {
    let rule = SphereRule::new(16, 32);
    let [t] = sweep(samples, |i, [t]| {
        let s = sample_superharmonic(cfg, i)?;
        let rep = superharmonic_l1_control(&s.probe, &rule)?;
        let worst = rep.worst_constant();
        let min_minus_laplacian = spiral_points(SUPERHARMONIC_FD_POINTS)
            .iter()
            .map(|x| s.probe.minus_laplacian_fd(x))
            .fold(f64::INFINITY, f64::min);
        let pass = worst.is_finite() && min_minus_laplacian >= -SUPERHARMONIC_TOLERANCE;
        t.record(i, worst, pass, || json!({"report": rep, "min_minus_laplacian": min_minus_laplacian, "probe": s}));
        Ok(())
    })?;
    Ok(t.into_check(name, samples, None))
}

/// Points on a spiral filling B_{0.98}, far enough from ∂B₁ for the difference stencil.
fn spiral_points(count: usize) -> Vec<[f64; 3]> {
    (0..count)
        .map(|k| {
            let f = (k as f64 + 0.5) / count as f64;
            let (z, phi) = (2.0 * f - 1.0, 2.4 * k as f64);
            let r = 0.98 * f.cbrt();
            let s = (1.0 - z * z).sqrt();
            [r * s * phi.cos(), r * s * phi.sin(), r * z]
        })
        .collect()
}

/// `samples` probes, then twice as many probes with twice the mass cap; the suite maximum of the
/// second family must stay within [`SUPERHARMONIC_GROWTH_LIMIT`] of the first.
fn superharmonic(samples: usize, cfg: &SamplerConfig) -> Result<Vec<SweepCheck>> {
    let base = superharmonic_family(samples, cfg, "superharmonic_l1")?;
    let doubled_cfg = SamplerConfig { max_masses: 2 * cfg.max_masses, ..cfg.clone() };
    let doubled = superharmonic_family(2 * samples, &doubled_cfg, "superharmonic_l1_doubled")?;
    let growth = crate::report::ratio(doubled.max_empirical_constant, base.max_empirical_constant);
    let mut tally = Tally::default();
    tally.record(0, growth, growth <= SUPERHARMONIC_GROWTH_LIMIT, || {
        json!({"base_max": base.max_empirical_constant, "doubled_max": doubled.max_empirical_constant})
    });
    let growth_check = tally.into_check("superharmonic_growth", 2 * samples, Some(SUPERHARMONIC_GROWTH_LIMIT));
    Ok(vec![base, doubled, growth_check])
}
