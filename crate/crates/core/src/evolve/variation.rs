//! Single-point crossover and bounded polynomial mutation on `[-1, 1]` genes.

use rand::Rng;

use crate::assembly::{Genome, GENOME_LEN};

const LOWER: f64 = -1.0;
const UPPER: f64 = 1.0;

/// Bounded polynomial mutation of one gene with random draw `u` in `[0, 1)`.
pub fn polynomial_mutation(x: f64, u: f64, eta: f64) -> f64 {
    let span = UPPER - LOWER;
    let d1 = (x - LOWER) / span;
    let d2 = (UPPER - x) / span;
    let e = eta + 1.0;
    let dq = if u <= 0.5 {
        (2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1).powf(e)).powf(1.0 / e) - 1.0
    } else {
        1.0 - (2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2).powf(e)).powf(1.0 / e)
    };
    (x + dq * span).clamp(LOWER, UPPER)
}

/// Swaps the tails of two genomes at gene index `cut`.
pub fn crossover(a: &Genome, b: &Genome, cut: usize) -> (Genome, Genome) {
    let (a, b) = (a.genes(), b.genes());
    let mut c1 = a[..cut].to_vec();
    c1.extend_from_slice(&b[cut..]);
    let mut c2 = b[..cut].to_vec();
    c2.extend_from_slice(&a[cut..]);
    (
        Genome::new(c1).expect("crossover keeps length and bounds"),
        Genome::new(c2).expect("crossover keeps length and bounds"),
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VariationRates {
    pub crossover: f64,
    pub mutation: f64,
    pub eta: f64,
}

/// What happened while producing one pair of children.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OffspringTrace {
    pub cut: Option<usize>,
    pub mutated_genes: usize,
}

/// Two children: optional crossover, then per-gene mutation of both.
pub fn make_offspring<R: Rng + ?Sized>(
    parents: (&Genome, &Genome),
    rates: VariationRates,
    rng: &mut R,
) -> (Genome, Genome, OffspringTrace) {
    let mut trace = OffspringTrace::default();
    let (c1, c2) = if rng.random::<f64>() < rates.crossover {
        let cut = rng.random_range(1..GENOME_LEN);
        trace.cut = Some(cut);
        crossover(parents.0, parents.1, cut)
    } else {
        (parents.0.clone(), parents.1.clone())
    };
    let mut mutate = |g: Genome| {
        let mut genes: Vec<f64> = g.into();
        for x in &mut genes {
            if rng.random::<f64>() < rates.mutation {
                *x = polynomial_mutation(*x, rng.random::<f64>(), rates.eta);
                trace.mutated_genes += 1;
            }
        }
        Genome::new(genes).expect("mutation is clamped to bounds")
    };
    let c1 = mutate(c1);
    let c2 = mutate(c2);
    (c1, c2, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Textbook formulation written out separately, with the bounds as inputs.
    fn reference_mutation(x: f64, u: f64, eta: f64, lo: f64, hi: f64) -> f64 {
        let delta1 = (x - lo) / (hi - lo);
        let delta2 = (hi - x) / (hi - lo);
        let mut_pow = 1.0 / (eta + 1.0);
        let deltaq = if u <= 0.5 {
            let xy = 1.0 - delta1;
            let val = 2.0 * u + (1.0 - 2.0 * u) * xy.powf(eta + 1.0);
            val.powf(mut_pow) - 1.0
        } else {
            let xy = 1.0 - delta2;
            let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy.powf(eta + 1.0);
            1.0 - val.powf(mut_pow)
        };
        (x + deltaq * (hi - lo)).max(lo).min(hi)
    }

    #[test]
    fn symmetric_draw_leaves_gene_unchanged() {
        for x in [-1.0, -0.3, 0.0, 0.7, 1.0] {
            assert_eq!(polynomial_mutation(x, 0.5, 20.0), x);
        }
    }

    #[test]
    fn upper_bound_is_pinned() {
        for u in [0.51, 0.7, 0.99] {
            assert_eq!(polynomial_mutation(1.0, u, 20.0), 1.0);
        }
    }

    #[test]
    fn matches_reference_implementation() {
        let got = polynomial_mutation(0.0, 0.1, 20.0);
        let want = reference_mutation(0.0, 0.1, 20.0, -1.0, 1.0);
        assert!((got - want).abs() < 1e-12);
        assert!(got < 0.0);
    }

    fn genome(v: f64) -> Genome {
        Genome::new(vec![v; GENOME_LEN]).unwrap()
    }

    #[test]
    fn zero_rates_copy_parents() {
        let rates = VariationRates {
            crossover: 0.0,
            mutation: 0.0,
            eta: 20.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (a, b) = (genome(0.25), genome(-0.5));
        let (c1, c2, trace) = make_offspring((&a, &b), rates, &mut rng);
        assert_eq!((c1, c2), (a, b));
        assert_eq!(trace, OffspringTrace::default());
    }

    #[test]
    fn cut_at_45_swaps_tails() {
        let (a, b) = (genome(0.25), genome(-0.5));
        let (c1, c2) = crossover(&a, &b, 45);
        assert!(c1.genes()[..45].iter().all(|&g| g == 0.25));
        assert!(c1.genes()[45..].iter().all(|&g| g == -0.5));
        assert!(c2.genes()[..45].iter().all(|&g| g == -0.5));
        assert!(c2.genes()[45..].iter().all(|&g| g == 0.25));
    }

    proptest! {
        #[test]
        fn mutation_matches_reference_and_stays_in_bounds(
            x in -1.0f64..=1.0, u in 0.0f64..1.0, eta in 1.0f64..50.0,
        ) {
            let got = polynomial_mutation(x, u, eta);
            prop_assert!((-1.0..=1.0).contains(&got));
            prop_assert!((got - reference_mutation(x, u, eta, -1.0, 1.0)).abs() < 1e-12);
        }

        #[test]
        fn offspring_stay_in_bounds(seed in any::<u64>(), a in -1.0f64..=1.0, b in -1.0f64..=1.0) {
            let rates = VariationRates { crossover: 0.5, mutation: 0.3, eta: 20.0 };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (mut p, mut q) = (genome(a), genome(b));
            for _ in 0..20 {
                let (c1, c2, _) = make_offspring((&p, &q), rates, &mut rng);
                p = c1;
                q = c2;
            }
            prop_assert!(p.genes().iter().chain(q.genes()).all(|g| (-1.0..=1.0).contains(g)));
        }
    }
}
