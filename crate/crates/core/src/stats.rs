//! Weighted medians and one-dimensional minimization.

/// Lower weighted median: smallest v with weight{≤ v} ≥ half the total.
#[must_use]
pub fn weighted_median(values: &[f64], weights: &[f64]) -> f64 {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    for &i in &idx {
        acc += weights[i];
        if acc >= 0.5 * total {
            return values[i];
        }
    }
    values[idx[idx.len() - 1]]
}

/// Minimizer of a unimodal `g` on `[a, b]` by golden-section search.
pub fn golden_section_min(mut a: f64, mut b: f64, tol: f64, g: impl Fn(f64) -> f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    while (b - a).abs() > tol {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_respects_weights() {
        assert_eq!(weighted_median(&[3.0, 1.0, 2.0], &[1.0, 1.0, 1.0]), 2.0);
        assert_eq!(weighted_median(&[1.0, 2.0, 3.0], &[0.1, 0.1, 5.0]), 3.0);
    }

    #[test]
    fn golden_section_finds_parabola_vertex() {
        let x = golden_section_min(-3.0, 5.0, 1e-10, |x| (x - 1.25).powi(2));
        assert!((x - 1.25).abs() < 1e-8);
    }
}
