use crate::geo::DistanceMatrix;
use crate::numeric::exact_sum;

/// Minimum spanning tree weight over `m` nodes with edge weights `dist`
/// (dense Prim). Zero for fewer than two nodes.
pub fn prim_weight(m: usize, dist: impl Fn(usize, usize) -> f64) -> f64 {
    if m < 2 {
        return 0.0;
    }
    let mut in_tree = vec![false; m];
    let mut best = vec![f64::INFINITY; m];
    let mut edges = Vec::with_capacity(m - 1);
    in_tree[0] = true;
    for (j, b) in best.iter_mut().enumerate().skip(1) {
        *b = dist(0, j);
    }
    for _ in 1..m {
        let mut next = usize::MAX;
        for j in 0..m {
            if !in_tree[j] && (next == usize::MAX || best[j] < best[next]) {
                next = j;
            }
        }
        in_tree[next] = true;
        edges.push(best[next]);
        for j in 0..m {
            if !in_tree[j] {
                best[j] = best[j].min(dist(next, j));
            }
        }
    }
    exact_sum(edges)
}

/// MST weight of the sub-matrix induced by `nodes`.
pub fn mst_lower_bound(matrix: &DistanceMatrix, nodes: &[usize]) -> f64 {
    prim_weight(nodes.len(), |a, b| matrix.get(nodes[a], nodes[b]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::GeoPoint;
    use proptest::prelude::*;

    /// Minimum over every subset of m-1 edges that connects all nodes.
    fn brute_mst(m: usize, d: &DistanceMatrix, nodes: &[usize]) -> f64 {
        let edges: Vec<(usize, usize)> = (0..m).flat_map(|i| ((i + 1)..m).map(move |j| (i, j))).collect();
        let mut best = f64::INFINITY;
        for combo in itertools::Itertools::combinations(edges.iter(), m - 1) {
            let mut parent: Vec<usize> = (0..m).collect();
            fn find(p: &mut [usize], x: usize) -> usize {
                if p[x] != x {
                    let r = find(p, p[x]);
                    p[x] = r;
                }
                p[x]
            }
            let mut ok = true;
            for &&(a, b) in &combo {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra == rb {
                    ok = false;
                    break;
                }
                parent[ra] = rb;
            }
            if ok {
                best = best.min(exact_sum(combo.iter().map(|&&(a, b)| d.get(nodes[a], nodes[b]))));
            }
        }
        best
    }

    #[test]
    fn trivial_sets() {
        let m = DistanceMatrix::from_rows(&[vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]]).unwrap();
        assert_eq!(mst_lower_bound(&m, &[]), 0.0);
        assert_eq!(mst_lower_bound(&m, &[2]), 0.0);
        assert_eq!(mst_lower_bound(&m, &[0, 1, 2]), 2.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn matches_spanning_tree_enumeration(
            pts in prop::collection::vec((39.85f64..40.05, -75.3f64..-75.0), 8),
        ) {
            let pts: Vec<GeoPoint> = pts.into_iter().map(|(a, b)| GeoPoint::new(a, b).unwrap()).collect();
            let m = DistanceMatrix::from_points(&pts).unwrap();
            let nodes: Vec<usize> = (0..8).collect();
            let prim = mst_lower_bound(&m, &nodes);
            let brute = brute_mst(8, &m, &nodes);
            prop_assert!((prim - brute).abs() <= 1e-12 * brute.max(1.0));
        }
    }
}
