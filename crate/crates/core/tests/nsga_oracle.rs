//! Non-dominated sorting against repeated Pareto peeling.

use levelgan::evolve::{dominates, non_dominated_sort};
use proptest::prelude::*;

/// Peels off the non-dominated members of what remains until nothing is left.
fn peel(points: &[[f64; 2]]) -> Vec<Vec<usize>> {
    let mut remaining: Vec<usize> = (0..points.len()).collect();
    let mut layers = Vec::new();
    while !remaining.is_empty() {
        let front: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| {
                !remaining.iter().any(|&j| {
                    let (a, b) = (points[j], points[i]);
                    a[0] >= b[0] && a[1] >= b[1] && (a[0] > b[0] || a[1] > b[1])
                })
            })
            .collect();
        remaining.retain(|i| !front.contains(i));
        layers.push(front);
    }
    layers
}

proptest! {
    #[test]
    fn sort_matches_peeling(points in prop::collection::vec((0u8..12, 0u8..12), 0..=50)) {
        // Small integer grids produce plenty of ties and duplicates.
        let objs: Vec<[f64; 2]> = points.iter().map(|&(a, b)| [a as f64, b as f64 / 11.0]).collect();
        prop_assert_eq!(non_dominated_sort(&objs), peel(&objs));
    }

    #[test]
    fn dominance_is_a_strict_partial_order(a in any::<(i8, i8)>(), b in any::<(i8, i8)>(), c in any::<(i8, i8)>()) {
        let v = |p: (i8, i8)| [p.0 as f64, p.1 as f64];
        let (a, b, c) = (v(a), v(b), v(c));
        prop_assert!(!dominates(&a, &a));
        prop_assert!(!(dominates(&a, &b) && dominates(&b, &a)));
        if dominates(&a, &b) && dominates(&b, &c) {
            prop_assert!(dominates(&a, &c));
        }
    }
}
