//! Pareto dominance, non-dominated sorting and crowding distance. All
//! objectives are maximised.

use std::cmp::Ordering;

/// True when `a` is at least as good as `b` everywhere and strictly better
/// somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strictly = true;
        }
    }
    strictly
}

/// Fast non-dominated sort. Returns the layers as index lists (ascending
/// within each layer), best layer first.
pub fn non_dominated_sort<O: AsRef<[f64]>>(objectives: &[O]) -> Vec<Vec<usize>> {
    let n = objectives.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (objectives[i].as_ref(), objectives[j].as_ref());
            if dominates(a, b) {
                dominates_list[i].push(j);
                dominated_by[j] += 1;
            } else if dominates(b, a) {
                dominates_list[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut layers = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        layers.push(current);
        current = next;
    }
    layers
}

/// Rank of every individual given its layers.
pub fn ranks(layers: &[Vec<usize>], n: usize) -> Vec<usize> {
    let mut rank = vec![usize::MAX; n];
    for (k, layer) in layers.iter().enumerate() {
        for &i in layer {
            rank[i] = k;
        }
    }
    rank
}

/// Crowding distance of each member of `layer`, in layer order. Layers of at
/// most two members are all boundary points. Objectives that are constant
/// across the layer contribute nothing.
pub fn crowding_distance<O: AsRef<[f64]>>(objectives: &[O], layer: &[usize]) -> Vec<f64> {
    let m = layer.len();
    if m <= 2 {
        return vec![f64::INFINITY; m];
    }
    let dims = objectives[layer[0]].as_ref().len();
    let mut distance = vec![0.0; m];
    let mut order: Vec<usize> = (0..m).collect();
    for k in 0..dims {
        let value = |pos: usize| objectives[layer[pos]].as_ref()[k];
        order.sort_by(|&a, &b| value(a).partial_cmp(&value(b)).unwrap_or(Ordering::Equal));
        let (lo, hi) = (value(order[0]), value(order[m - 1]));
        if hi <= lo {
            continue;
        }
        distance[order[0]] = f64::INFINITY;
        distance[order[m - 1]] = f64::INFINITY;
        for w in 1..m - 1 {
            distance[order[w]] += (value(order[w + 1]) - value(order[w - 1])) / (hi - lo);
        }
    }
    distance
}

/// Crowded-comparison order: lower rank first, then larger crowding.
pub fn crowded_cmp(a: (usize, f64), b: (usize, f64)) -> Ordering {
    a.0.cmp(&b.0)
        .then_with(|| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dominance_examples() {
        assert!(!dominates(&[10.0, 0.5], &[10.0, 0.5]));
        assert!(dominates(&[12.0, 0.5], &[10.0, 0.5]));
        assert!(!dominates(&[12.0, 0.4], &[10.0, 0.5]));
    }

    #[test]
    fn chain_sorts_into_singleton_layers() {
        let objs = [[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]];
        assert_eq!(non_dominated_sort(&objs), vec![vec![2], vec![1], vec![0]]);
    }

    #[test]
    fn trade_offs_share_a_layer() {
        let objs = [[3.0, 1.0], [1.0, 3.0], [2.0, 2.0]];
        assert_eq!(non_dominated_sort(&objs), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn crowding_fixtures() {
        let objs = [[0.0, 10.0], [5.0, 5.0], [10.0, 0.0]];
        let d = crowding_distance(&objs, &[0, 1, 2]);
        assert_eq!(d[0], f64::INFINITY);
        assert_eq!(d[2], f64::INFINITY);
        assert!((d[1] - 2.0).abs() < 1e-12);

        let pair = crowding_distance(&objs, &[0, 1]);
        assert_eq!(pair, vec![f64::INFINITY; 2]);

        // Second objective constant: only the first contributes.
        let flat = [[0.0, 1.0], [2.0, 1.0], [3.0, 1.0], [8.0, 1.0]];
        let d = crowding_distance(&flat, &[0, 1, 2, 3]);
        assert!((d[1] - 3.0 / 8.0).abs() < 1e-12);
        assert!((d[2] - 6.0 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn crowded_order() {
        assert_eq!(crowded_cmp((0, 1.0), (1, 9.0)), Ordering::Less);
        assert_eq!(crowded_cmp((1, f64::INFINITY), (1, 3.0)), Ordering::Less);
        assert_eq!(crowded_cmp((1, 3.0), (1, 3.0)), Ordering::Equal);
    }
}
