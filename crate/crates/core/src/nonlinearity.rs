//! Nonlinearities f with derivatives, primitive and structural flags.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::composite_gauss;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NonlinearityKind {
    /// scale · e^t
    Exp { scale: f64 },
    /// (1 + t)^p, extended by zero below t = -1
    Power { p: f64 },
    /// 1 / (1 - t)^2 on t < 1
    Mems,
    /// slope · t
    Linear { slope: f64 },
    /// e^{2(e^t - t)}
    DoubleExp,
    /// base(t) - shift
    Shifted { base: Box<NonlinearityKind>, shift: f64 },
    /// Piecewise-linear interpolation of tabulated (t, f(t)), linear extrapolation.
    Table { t: Vec<f64>, f: Vec<f64> },
}

/// Structural properties claimed for f.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearityFlags {
    pub nonnegative: bool,
    pub nondecreasing: bool,
    pub convex: bool,
    /// f ≥ -K; zero means f ≥ 0.
    pub lower_bound_k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Nonlinearity {
    pub kind: NonlinearityKind,
    pub flags: NonlinearityFlags,
}

const FLAG_PROBES: usize = 1000;

impl Nonlinearity {
    pub fn exp() -> Self {
        Self::scaled_exp(1.0)
    }

    pub fn scaled_exp(scale: f64) -> Self {
        Self::from_kind(NonlinearityKind::Exp { scale })
    }

    pub fn power(p: f64) -> Self {
        Self::from_kind(NonlinearityKind::Power { p })
    }

    pub fn mems() -> Self {
        Self::from_kind(NonlinearityKind::Mems)
    }

    pub fn linear(slope: f64) -> Self {
        Self::from_kind(NonlinearityKind::Linear { slope })
    }

    pub fn double_exp() -> Self {
        Self::from_kind(NonlinearityKind::DoubleExp)
    }

    /// f - K; the lower bound flag becomes K plus whatever bound f had.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut flags = self.flags;
        flags.lower_bound_k += shift.max(0.0);
        flags.nonnegative = self.flags.nonnegative && shift <= 0.0;
        Self { kind: NonlinearityKind::Shifted { base: Box::new(self.kind.clone()), shift }, flags }
    }

    pub fn table(t: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if t.len() < 2 || t.len() != f.len() || t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("table needs ≥ 2 strictly increasing abscissae".into()));
        }
        let kind = NonlinearityKind::Table { t, f };
        let flags = table_flags(&kind);
        Ok(Self { kind, flags })
    }

    /// Reads a two-column `t,f` CSV (header optional).
    pub fn table_from_file(path: &Path) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().has_headers(false).comment(Some(b'#')).from_path(path)?;
        let (mut t, mut f) = (Vec::new(), Vec::new());
        for rec in rd.records() {
            let rec = rec?;
            let a = rec.get(0).unwrap_or("").trim().parse::<f64>();
            let b = rec.get(1).unwrap_or("").trim().parse::<f64>();
            if let (Ok(a), Ok(b)) = (a, b) {
                t.push(a);
                f.push(b);
            }
        }
        Self::table(t, f)
    }

    /// Parses `exp`, `exp:SCALE`, `power:P`, `mems`, `linear`, `linear:SLOPE`, `doubleexp`, `table:FILE`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (head, arg) = match spec.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (spec, None),
        };
        let num = |a: Option<&str>, default: f64| -> Result<f64> {
            a.map_or(Ok(default), |s| {
                s.parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad number in nonlinearity '{spec}'")))
            })
        };
        match head {
            "exp" => Ok(Self::scaled_exp(num(arg, 1.0)?)),
            "power" => {
                let p = num(arg, 2.0)?;
                if !(p > 1.0) {
                    return Err(Error::InvalidArgument("power:p needs p > 1".into()));
                }
                Ok(Self::power(p))
            }
            "mems" => Ok(Self::mems()),
            "linear" => Ok(Self::linear(num(arg, 1.0)?)),
            "doubleexp" => Ok(Self::double_exp()),
            "table" => Self::table_from_file(Path::new(
                arg.ok_or_else(|| Error::InvalidArgument("table:FILE needs a path".into()))?,
            )),
            _ => Err(Error::InvalidArgument(format!("unknown nonlinearity '{spec}'"))),
        }
    }

    fn from_kind(kind: NonlinearityKind) -> Self {
        let flags = declared_flags(&kind);
        Self { kind, flags }
    }

    /// Short label used in reports.
    #[must_use]
    pub fn label(&self) -> String {
        label(&self.kind)
    }

    #[must_use]
    pub fn f(&self, t: f64) -> f64 {
        eval(&self.kind, t, 0)
    }

    #[must_use]
    pub fn fprime(&self, t: f64) -> f64 {
        eval(&self.kind, t, 1)
    }

    #[must_use]
    pub fn fsecond(&self, t: f64) -> f64 {
        eval(&self.kind, t, 2)
    }

    /// Primitive F with F(0) = 0.
    #[must_use]
    pub fn primitive(&self, t: f64) -> f64 {
        primitive(&self.kind, t)
    }

    /// Largest argument for which f is finite (exclusive), if any.
    #[must_use]
    pub fn upper_limit(&self) -> Option<f64> {
        upper_limit(&self.kind)
    }

    /// Probes the claimed flags and F' = f on a grid over `[lo, hi]`; returns the first discrepancy.
    pub fn verify_flags(&self, lo: f64, hi: f64) -> Result<()> {
        let fl = self.flags;
        let h = 1e-5 * (1.0 + hi.abs().max(lo.abs()));
        let mut prev = self.f(lo);
        for k in 0..FLAG_PROBES {
            let t = lo + (hi - lo) * k as f64 / (FLAG_PROBES - 1) as f64;
            let f = self.f(t);
            if fl.convex && self.fsecond(t) < -1e-12 {
                return Err(Error::HypothesisViolated(format!("convexity fails at t = {t}")));
            }
            if fl.nonnegative && f < -1e-12 {
                return Err(Error::HypothesisViolated(format!("f(t) < 0 at t = {t}")));
            }
            if (fl.nonnegative || fl.lower_bound_k > 0.0) && f < -fl.lower_bound_k - 1e-12 {
                return Err(Error::HypothesisViolated(format!("f(t) < -K at t = {t}")));
            }
            if fl.nondecreasing && f < prev - 1e-12 * (1.0 + prev.abs()) {
                return Err(Error::HypothesisViolated(format!("f decreases at t = {t}")));
            }
            prev = f;
            if !matches!(self.kind, NonlinearityKind::Table { .. }) {
                let d = (self.primitive(t + h) - self.primitive(t - h)) / (2.0 * h);
                if (d - f).abs() > 1e-6 * f.abs().max(1.0) {
                    return Err(Error::HypothesisViolated(format!("F' ≠ f at t = {t}: {d} vs {f}")));
                }
            }
        }
        Ok(())
    }
}

fn label(kind: &NonlinearityKind) -> String {
    match kind {
        NonlinearityKind::Exp { scale } if *scale == 1.0 => "exp".into(),
        NonlinearityKind::Exp { scale } => format!("exp:{scale}"),
        NonlinearityKind::Power { p } => format!("power:{p}"),
        NonlinearityKind::Mems => "mems".into(),
        NonlinearityKind::Linear { slope } => format!("linear:{slope}"),
        NonlinearityKind::DoubleExp => "doubleexp".into(),
        NonlinearityKind::Shifted { base, shift } => format!("{}-{shift}", label(base)),
        NonlinearityKind::Table { .. } => "table".into(),
    }
}

fn declared_flags(kind: &NonlinearityKind) -> NonlinearityFlags {
    let all = |ok: bool| NonlinearityFlags { nonnegative: ok, nondecreasing: ok, convex: ok, lower_bound_k: 0.0 };
    match kind {
        NonlinearityKind::Exp { scale } => all(*scale >= 0.0),
        NonlinearityKind::Power { .. } | NonlinearityKind::Mems | NonlinearityKind::DoubleExp => all(true),
        NonlinearityKind::Linear { slope } => NonlinearityFlags {
            nonnegative: false,
            nondecreasing: *slope >= 0.0,
            convex: true,
            lower_bound_k: 0.0,
        },
        NonlinearityKind::Shifted { base, shift } => {
            let b = declared_flags(base);
            NonlinearityFlags { nonnegative: b.nonnegative && *shift <= 0.0, lower_bound_k: shift.max(0.0), ..b }
        }
        NonlinearityKind::Table { .. } => table_flags(kind),
    }
}

fn table_flags(kind: &NonlinearityKind) -> NonlinearityFlags {
    let NonlinearityKind::Table { t, f } = kind else { unreachable!("table flags on a non-table kind") };
    let slopes: Vec<f64> = t.windows(2).zip(f.windows(2)).map(|(a, b)| (b[1] - b[0]) / (a[1] - a[0])).collect();
    let min_f = f.iter().copied().fold(f64::INFINITY, f64::min);
    NonlinearityFlags {
        nonnegative: min_f >= 0.0 && slopes[0] >= 0.0,
        nondecreasing: slopes.iter().all(|&s| s >= 0.0),
        convex: slopes.windows(2).all(|w| w[1] >= w[0] - 1e-14),
        lower_bound_k: (-min_f).max(0.0),
    }
}

fn upper_limit(kind: &NonlinearityKind) -> Option<f64> {
    match kind {
        NonlinearityKind::Mems => Some(1.0),
        NonlinearityKind::Shifted { base, .. } => upper_limit(base),
        _ => None,
    }
}

fn eval(kind: &NonlinearityKind, t: f64, order: u8) -> f64 {
    match kind {
        NonlinearityKind::Exp { scale } => scale * t.exp(),
        NonlinearityKind::Power { p } => {
            let b = 1.0 + t;
            if b <= 0.0 {
                return 0.0;
            }
            match order {
                0 => b.powf(*p),
                1 => p * b.powf(p - 1.0),
                _ => p * (p - 1.0) * b.powf(p - 2.0),
            }
        }
        NonlinearityKind::Mems => {
            let b = 1.0 - t;
            match order {
                0 => b.powi(-2),
                1 => 2.0 * b.powi(-3),
                _ => 6.0 * b.powi(-4),
            }
        }
        NonlinearityKind::Linear { slope } => match order {
            0 => slope * t,
            1 => *slope,
            _ => 0.0,
        },
        NonlinearityKind::DoubleExp => {
            let g = 2.0 * (t.exp() - t);
            let g1 = 2.0 * (t.exp() - 1.0);
            let g2 = 2.0 * t.exp();
            let e = g.exp();
            match order {
                0 => e,
                1 => g1 * e,
                _ => (g2 + g1 * g1) * e,
            }
        }
        NonlinearityKind::Shifted { base, shift } => {
            let v = eval(base, t, order);
            if order == 0 {
                v - shift
            } else {
                v
            }
        }
        NonlinearityKind::Table { t: xs, f } => {
            let n = xs.len();
            let i = xs.partition_point(|&v| v <= t).saturating_sub(1).min(n - 2);
            let slope = (f[i + 1] - f[i]) / (xs[i + 1] - xs[i]);
            match order {
                0 => f[i] + slope * (t - xs[i]),
                1 => slope,
                _ => 0.0,
            }
        }
    }
}

fn primitive(kind: &NonlinearityKind, t: f64) -> f64 {
    match kind {
        NonlinearityKind::Exp { scale } => scale * t.exp_m1(),
        NonlinearityKind::Power { p } => {
            let b = (1.0 + t).max(0.0);
            (b.powf(p + 1.0) - 1.0) / (p + 1.0)
        }
        NonlinearityKind::Mems => 1.0 / (1.0 - t) - 1.0,
        NonlinearityKind::Linear { slope } => 0.5 * slope * t * t,
        NonlinearityKind::Shifted { base, shift } => primitive(base, t) - shift * t,
        NonlinearityKind::Table { t: xs, .. } => {
            // Trapezoid over the breakpoints between 0 and t is exact for a piecewise-linear f.
            let (a, b, sign) = if t >= 0.0 { (0.0, t, 1.0) } else { (t, 0.0, -1.0) };
            let mut pts = vec![a];
            pts.extend(xs.iter().copied().filter(|&x| x > a && x < b));
            pts.push(b);
            sign * pts.windows(2).map(|w| 0.5 * (w[1] - w[0]) * (eval(kind, w[0], 0) + eval(kind, w[1], 0))).sum::<f64>()
        }
        NonlinearityKind::DoubleExp => {
            let panels = ((t.abs() / 0.05).ceil() as usize).max(1);
            let breaks: Vec<f64> = (0..=panels).map(|k| t * k as f64 / panels as f64).collect();
            let (x, w) = composite_gauss(&breaks, 16);
            x.iter().zip(&w).map(|(&s, &v)| v * eval(kind, s, 0)).sum()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declared_flags_hold_on_probe_grids() {
        for f in [Nonlinearity::exp(), Nonlinearity::power(2.0), Nonlinearity::power(3.0), Nonlinearity::double_exp()] {
            f.verify_flags(0.0, 3.0).unwrap();
        }
        Nonlinearity::mems().verify_flags(0.0, 0.9).unwrap();
        Nonlinearity::exp().shifted(0.5).verify_flags(-1.0, 2.0).unwrap();
    }

    #[test]
    fn false_claims_are_caught() {
        let mut f = Nonlinearity::linear(-1.0);
        f.flags.nondecreasing = true;
        assert!(f.verify_flags(0.0, 1.0).is_err());
    }

    #[test]
    fn parse_round_trips_labels() {
        assert_eq!(Nonlinearity::parse("exp").unwrap(), Nonlinearity::exp());
        assert_eq!(Nonlinearity::parse("power:3").unwrap(), Nonlinearity::power(3.0));
        assert_eq!(Nonlinearity::parse("exp:16").unwrap().f(0.0), 16.0);
        assert!(Nonlinearity::parse("power:0.5").is_err());
        assert!(Nonlinearity::parse("sinh").is_err());
    }

    #[test]
    fn table_interpolates_and_integrates() {
        let f = Nonlinearity::table(vec![0.0, 1.0, 2.0], vec![1.0, 2.0, 4.0]).unwrap();
        assert!(f.flags.convex && f.flags.nondecreasing && f.flags.nonnegative);
        assert!((f.f(1.5) - 3.0).abs() < 1e-15);
        assert!((f.primitive(2.0) - 4.5).abs() < 1e-12);
    }
}
