//! Two-sided Mann-Whitney U test, normal approximation with tie and
//! continuity corrections.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MannWhitney {
    /// U statistic of the first sample.
    pub u: f64,
    pub p_value: f64,
}

/// Average ranks (1-based) of `values`, ties sharing their mean rank.
fn ranks(values: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut rank = vec![0.0; values.len()];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            rank[k] = avg;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    (rank, tie_term)
}

pub fn mann_whitney(a: &[f64], b: &[f64]) -> Option<MannWhitney> {
    if a.is_empty() || b.is_empty() {
        return None;
    }
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (rank, tie_term) = ranks(&pooled);
    let r1: f64 = rank[..a.len()].iter().sum();
    let u1 = r1 - n1 * (n1 + 1.0) / 2.0;
    let u2 = n1 * n2 - u1;
    let n = n1 + n2;
    let mean = n1 * n2 / 2.0;
    let var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    let p_value = if var <= 0.0 {
        1.0
    } else {
        let z = (u1.max(u2) - mean - 0.5) / var.sqrt();
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        (2.0 * (1.0 - normal.cdf(z))).min(1.0)
    };
    Some(MannWhitney { u: u1, p_value })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Reference values from scipy.stats.mannwhitneyu(method="asymptotic").
    #[test]
    fn matches_reference_values() {
        let cases: [(&[f64], &[f64], f64, f64); 4] = [
            (
                &[175., 172., 159., 163., 163.],
                &[58., 28., 27., 55., 12.],
                25.0,
                0.0119252335930176,
            ),
            (
                &[1., 2., 3., 4., 5.],
                &[3., 4., 5., 6., 7., 8.],
                4.5,
                0.066015431521231,
            ),
            (&[5., 5., 5.], &[5., 5., 5.], 4.5, 1.0),
            (
                &[1.5, 2.5, 2.5, 9.],
                &[2.5, 3., 3., 3., 10.],
                5.0,
                0.253887299829074,
            ),
        ];
        for (a, b, u, p) in cases {
            let r = mann_whitney(a, b).unwrap();
            assert_eq!(r.u, u);
            assert!((r.p_value - p).abs() < 1e-9, "{a:?} {b:?}: {} vs {p}", r.p_value);
        }
        assert!(mann_whitney(&[], &[1.0]).is_none());
    }
}
