//! Exact maximum-weight bipartite assignment (Hungarian method) with a
//! deterministic lexicographic tie-break.

/// Max-weight matching on a dense `rows x cols` matrix of non-negative
/// weights, saturating the smaller side. Returns the partner of every row
/// (`None` only when `rows > cols`) and the total weight.
///
/// Among optimal matchings the one whose sorted `(row, col)` list is
/// lexicographically smallest is returned.
pub fn max_weight_assignment(weights: &[Vec<u64>]) -> (Vec<Option<usize>>, u64) {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return (vec![None; rows], 0);
    }
    let row_ids: Vec<usize> = (0..rows).collect();
    let col_ids: Vec<usize> = (0..cols).collect();
    let best = optimum(weights, &row_ids, &col_ids);

    let mut free_rows = row_ids;
    let mut free_cols = col_ids;
    let mut out = vec![None; rows];
    let mut remaining = best;
    for r in 0..rows {
        free_rows.retain(|&x| x != r);
        let mut chosen = None;
        for (pos, &c) in free_cols.iter().enumerate() {
            let w = weights[r][c];
            if w > remaining {
                continue;
            }
            let mut rest_cols = free_cols.clone();
            rest_cols.remove(pos);
            if w + optimum(weights, &free_rows, &rest_cols) == remaining {
                chosen = Some((pos, c));
                break;
            }
        }
        match chosen {
            Some((pos, c)) => {
                out[r] = Some(c);
                remaining -= weights[r][c];
                free_cols.remove(pos);
            }
            // Leaving the row unmatched is only optimal when rows > cols.
            None => debug_assert_eq!(optimum(weights, &free_rows, &free_cols), remaining),
        }
    }
    (out, best)
}

/// Optimal total weight of the sub-matrix selected by `rows` x `cols`.
fn optimum(weights: &[Vec<u64>], rows: &[usize], cols: &[usize]) -> u64 {
    if rows.is_empty() || cols.is_empty() {
        return 0;
    }
    let (small, large, transposed) = if rows.len() <= cols.len() {
        (rows, cols, false)
    } else {
        (cols, rows, true)
    };
    let max_w = small
        .iter()
        .flat_map(|&a| {
            large.iter().map(move |&b| {
                if transposed {
                    weights[b][a]
                } else {
                    weights[a][b]
                }
            })
        })
        .max()
        .unwrap_or(0) as i64;
    let cost: Vec<Vec<i64>> = small
        .iter()
        .map(|&a| {
            large
                .iter()
                .map(|&b| {
                    let w = if transposed {
                        weights[b][a]
                    } else {
                        weights[a][b]
                    };
                    max_w - w as i64
                })
                .collect()
        })
        .collect();
    let assign = hungarian_min(&cost);
    assign
        .iter()
        .enumerate()
        .map(|(i, &j)| max_w - cost[i][j])
        .sum::<i64>() as u64
}

/// Min-cost assignment of every row of an `n x m` matrix (`n <= m`) to a
/// distinct column. Classic potentials formulation, O(n^2 m).
fn hungarian_min(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    let m = cost[0].len();
    debug_assert!(n <= m);
    const INF: i64 = i64::MAX / 4;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![INF; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = INF;
            let mut j1 = 0;
            for j in 1..=m {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut ans = vec![0; n];
    for j in 1..=m {
        if p[j] != 0 {
            ans[p[j] - 1] = j - 1;
        }
    }
    ans
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// All injective row->column maps of the smaller side.
    fn brute(weights: &[Vec<u64>]) -> u64 {
        fn go(w: &[Vec<u64>], r: usize, used: &mut Vec<bool>, transposed: bool) -> u64 {
            let (rows, cols) = if transposed {
                (w[0].len(), w.len())
            } else {
                (w.len(), w[0].len())
            };
            if r == rows {
                return 0;
            }
            let mut best = 0;
            for c in 0..cols {
                if !used[c] {
                    used[c] = true;
                    let x = if transposed { w[c][r] } else { w[r][c] };
                    best = best.max(x + go(w, r + 1, used, transposed));
                    used[c] = false;
                }
            }
            best
        }
        let transposed = weights.len() > weights[0].len();
        let cols = if transposed {
            weights.len()
        } else {
            weights[0].len()
        };
        go(weights, 0, &mut vec![false; cols], transposed)
    }

    #[test]
    fn single_pair() {
        assert_eq!(max_weight_assignment(&[vec![7]]), (vec![Some(0)], 7));
    }

    #[test]
    fn ties_resolve_lexicographically() {
        let w = vec![vec![1, 1], vec![1, 1]];
        assert_eq!(max_weight_assignment(&w).0, vec![Some(0), Some(1)]);
        let w = vec![vec![0, 0, 0]; 2];
        assert_eq!(max_weight_assignment(&w).0, vec![Some(0), Some(1)]);
    }

    #[test]
    fn more_rows_than_columns() {
        let w = vec![vec![1], vec![5], vec![3]];
        assert_eq!(max_weight_assignment(&w), (vec![None, Some(0), None], 5));
    }

    proptest! {
        #[test]
        fn matches_factorial_enumeration(
            rows in 1usize..8, cols in 1usize..8,
            seed in proptest::collection::vec(0u64..50, 49)
        ) {
            let w: Vec<Vec<u64>> = (0..rows)
                .map(|r| (0..cols).map(|c| seed[r * 7 + c]).collect())
                .collect();
            let (assign, total) = max_weight_assignment(&w);
            prop_assert_eq!(total, brute(&w));
            let realized: u64 = assign.iter().enumerate()
                .filter_map(|(r, c)| c.map(|c| w[r][c])).sum();
            prop_assert_eq!(realized, total);
            prop_assert_eq!(assign.iter().flatten().count(), rows.min(cols));
        }
    }
}
