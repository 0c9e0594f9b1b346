//! Exact separator scan for instances whose adjacency is a path.
//!
//! On a path every support is an interval, so the `i`-th supports of all
//! collections (counted from the left) correspond. Between supports `i` and
//! `i+1` each collection has a boundary position; all disagreements lie in
//! the window spanned by those boundaries, and the best separator is found
//! by one incremental left-to-right scan of it.

use crate::distance::{Alignment, Correspondence, LabelMap};
use crate::error::{Error, Result};
use crate::model::{Instance, Partition, UnitId};

/// Candidate separator positions `left..=right`. Position `p` sits between
/// the `p`-th and `p+1`-th unit of the path (0 = before the first unit).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub left: usize,
    pub right: usize,
}

/// Outcome of scanning one window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatorChoice {
    /// Separator between ordered supports `window` and `window + 1`.
    pub window: usize,
    pub span: Window,
    pub position: usize,
    pub cost: u64,
    /// Cost of every candidate, `costs[j]` for position `span.left + j`.
    pub costs: Vec<u64>,
    /// Per-collection unit updates performed by the scan.
    pub steps: usize,
}

/// Result of [`solve_1d`].
#[derive(Clone, Debug)]
pub struct Solution1d {
    pub alignment: Alignment,
    pub choices: Vec<SeparatorChoice>,
    /// Sum of the chosen separator costs.
    pub summed_cost: u64,
    pub steps: usize,
}

/// Units in left-to-right order, collection labels in left-to-right order
/// and each collection's boundary positions.
#[derive(Clone, Debug)]
pub struct PathView {
    pub order: Vec<UnitId>,
    pub labels: Vec<Vec<String>>,
    /// `boundaries[c][i]`: number of units left of the boundary between
    /// support `i` and `i+1` of collection `c`.
    pub boundaries: Vec<Vec<usize>>,
    /// Populations in path order, `pops[c][j]`.
    pub pops: Vec<Vec<u64>>,
}

impl PathView {
    pub fn new(instance: &Instance) -> Result<Self> {
        let order = path_order(instance)?;
        let mut labels = Vec::new();
        let mut boundaries = Vec::new();
        let mut pops = Vec::new();
        for c in instance.collections() {
            let mut ordered: Vec<String> = Vec::new();
            let mut bounds = Vec::new();
            for (pos, &u) in order.iter().enumerate() {
                let l = c
                    .partition
                    .label_of(u)
                    .expect("validated collection covers every unit");
                if ordered.last().map(String::as_str) != Some(l) {
                    if !ordered.is_empty() {
                        bounds.push(pos);
                    }
                    ordered.push(l.to_string());
                }
            }
            labels.push(ordered);
            boundaries.push(bounds);
            pops.push(order.iter().map(|&u| c.pop(u)).collect());
        }
        if let Some(first) = labels.first() {
            for (c, l) in labels.iter().enumerate().skip(1) {
                if l.len() != first.len() {
                    let cs = instance.collections();
                    return Err(Error::UnequalSupportCounts {
                        first: cs[0].name.clone(),
                        first_count: first.len(),
                        other: cs[c].name.clone(),
                        other_count: l.len(),
                    });
                }
            }
        }
        Ok(Self {
            order,
            labels,
            boundaries,
            pops,
        })
    }

    pub fn support_count(&self) -> usize {
        self.labels.first().map_or(0, Vec::len)
    }

    pub fn window(&self, i: usize) -> Window {
        let left = self.boundaries.iter().map(|b| b[i]).min().unwrap_or(0);
        let right = self.boundaries.iter().map(|b| b[i]).max().unwrap_or(0);
        Window { left, right }
    }

    /// Incremental scan: cost(p+1) = cost(p) + sum over collections of
    /// +p_c(unit p) when the collection has that unit right of its boundary,
    /// -p_c(unit p) otherwise. The negative terms also sum to cost(left).
    pub fn scan(&self, i: usize) -> SeparatorChoice {
        let span = self.window(i);
        let width = span.right - span.left;
        let mut rel = vec![0i64; width + 1];
        let mut base = 0i64;
        let mut steps = 0;
        for q in span.left..span.right {
            let mut delta = 0i64;
            for (c, bounds) in self.boundaries.iter().enumerate() {
                let p = self.pops[c][q] as i64;
                if q >= bounds[i] {
                    delta += p;
                } else {
                    delta -= p;
                    base += p;
                }
                steps += 1;
            }
            rel[q - span.left + 1] = rel[q - span.left] + delta;
        }
        let costs: Vec<u64> = rel.iter().map(|&r| (base + r) as u64).collect();
        let (best, &cost) = costs
            .iter()
            .enumerate()
            .min_by_key(|&(j, &c)| (c, j))
            .expect("window has at least one position");
        SeparatorChoice {
            window: i,
            span,
            position: span.left + best,
            cost,
            costs,
            steps,
        }
    }
}

/// Units of a path graph from one end to the other, starting at the
/// endpoint with the smaller index.
pub fn path_order(instance: &Instance) -> Result<Vec<UnitId>> {
    let g = instance.graph();
    let n = g.unit_count();
    if n == 0 {
        return Ok(Vec::new());
    }
    if g.edge_count() != n - 1 {
        return Err(Error::NotOneDimensional(format!(
            "{} edges on {n} units",
            g.edge_count()
        )));
    }
    if let Some(u) = instance.units().find(|&u| g.neighbors(u).len() > 2) {
        return Err(Error::NotOneDimensional(format!(
            "unit {} has degree {}",
            instance.unit_name(u),
            g.neighbors(u).len()
        )));
    }
    let start = instance
        .units()
        .find(|&u| g.neighbors(u).len() <= 1)
        .ok_or_else(|| Error::NotOneDimensional("no endpoint".into()))?;
    let mut order = Vec::with_capacity(n);
    let mut prev = None;
    let mut cur = Some(start);
    while let Some(u) = cur {
        order.push(u);
        let next = g.neighbors(u).iter().copied().find(|&w| Some(w) != prev);
        prev = Some(u);
        cur = next;
    }
    if order.len() != n {
        return Err(Error::NotOneDimensional("graph is disconnected".into()));
    }
    Ok(order)
}

/// Labels of every collection ordered by their leftmost unit.
pub fn enumerate_supports_left_to_right(instance: &Instance) -> Result<Vec<Vec<String>>> {
    Ok(PathView::new(instance)?.labels)
}

/// Scans window `i` (between ordered supports `i` and `i+1`, 0-based).
pub fn scan_window(instance: &Instance, i: usize) -> Result<SeparatorChoice> {
    let view = PathView::new(instance)?;
    if i + 1 >= view.support_count() {
        return Err(Error::BadParameters(format!(
            "window {i} out of range for {} supports",
            view.support_count()
        )));
    }
    Ok(view.scan(i))
}

/// Independent minimum-cost separator per window. Coinciding separators
/// drop the support between them.
pub fn solve_1d(instance: &Instance) -> Result<Solution1d> {
    let view = PathView::new(instance)?;
    let m = view.support_count();
    let n = view.order.len();
    let choices: Vec<SeparatorChoice> = (0..m.saturating_sub(1)).map(|i| view.scan(i)).collect();
    debug_assert!(choices.windows(2).all(|w| w[0].position <= w[1].position));

    let names = &view.labels[0];
    let mut assignment = vec![0usize; n];
    let mut start = 0;
    for i in 0..m {
        let end = choices.get(i).map_or(n, |c| c.position);
        for &u in &view.order[start..end] {
            assignment[u.index()] = i;
        }
        start = end.max(start);
    }
    let result = Partition::from_labeling(names, &assignment);
    let mut corr = Correspondence::new();
    for (c, coll) in instance.collections().iter().enumerate() {
        let pairs = view.labels[c].iter().enumerate().map(|(i, l)| {
            let target = &names[i];
            let present = result.label_index(target).is_some();
            (l.clone(), present.then(|| target.clone()))
        });
        corr.insert(coll.name.clone(), LabelMap::from_pairs(&coll.name, pairs)?);
    }
    let alignment = Alignment::new(instance, result, corr)?;
    Ok(Solution1d {
        summed_cost: choices.iter().map(|c| c.cost).sum(),
        steps: choices.iter().map(|c| c.steps).sum(),
        choices,
        alignment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AdjacencyGraph, Collection, Layout};

    fn path_instance(cuts: &[&[usize]], n: usize) -> Instance {
        let names: Vec<String> = (1..=n).map(|i| format!("u{i}")).collect();
        let g = AdjacencyGraph::new(n, (1..n).map(|i| (UnitId(i as u32 - 1), UnitId(i as u32))));
        let cols = cuts
            .iter()
            .enumerate()
            .map(|(c, cut)| {
                let mut bounds = vec![0];
                bounds.extend_from_slice(cut);
                bounds.push(n);
                let supports = bounds.windows(2).enumerate().map(|(i, w)| {
                    (
                        format!("L{i}"),
                        (w[0]..w[1]).map(|u| UnitId(u as u32)).collect(),
                    )
                });
                Collection {
                    name: format!("C{c}"),
                    partition: Partition::new(n, supports),
                    population: vec![1; n],
                }
            })
            .collect();
        Instance::new(names, g, cols, Layout::Explicit)
            .unwrap()
            .validated()
            .unwrap()
    }

    #[test]
    fn single_support() {
        let inst = path_instance(&[&[]], 3);
        let sol = solve_1d(&inst).unwrap();
        assert!(sol.choices.is_empty());
        assert_eq!(sol.alignment.objective(), 0);
    }

    #[test]
    fn identical_collections_have_empty_windows() {
        let inst = path_instance(&[&[2, 4], &[2, 4]], 6);
        let sol = solve_1d(&inst).unwrap();
        assert!(sol
            .choices
            .iter()
            .all(|c| c.span.left == c.span.right && c.cost == 0));
        assert_eq!(sol.alignment.objective(), 0);
    }

    #[test]
    fn two_by_two_majority() {
        // Disagreement on the second unit only; three separator positions
        // overall, the chosen one recolours that unit once.
        let inst = path_instance(&[&[1], &[2]], 4);
        let sol = solve_1d(&inst).unwrap();
        assert_eq!(sol.choices[0].costs, vec![1, 1]);
        assert_eq!(sol.choices[0].position, 1);
        assert_eq!(sol.alignment.objective(), 1);
    }

    #[test]
    fn unequal_counts_rejected() {
        let inst = path_instance(&[&[2], &[1, 2]], 4);
        assert!(matches!(
            solve_1d(&inst),
            Err(Error::UnequalSupportCounts { .. })
        ));
    }

    #[test]
    fn coinciding_separators_drop_a_support() {
        // Middle support of width one on both sides of a shared boundary.
        let inst = path_instance(&[&[2, 3], &[2, 3], &[3, 4]], 6);
        let sol = solve_1d(&inst).unwrap();
        let pos: Vec<usize> = sol.choices.iter().map(|c| c.position).collect();
        assert_eq!(pos, vec![2, 3]);
        let inst = path_instance(&[&[2, 3], &[3, 3 + 1], &[3, 5]], 6);
        let sol = solve_1d(&inst).unwrap();
        assert!(sol.choices[0].position <= sol.choices[1].position);
    }

    #[test]
    fn non_path_rejected() {
        let names = (0..4).map(|i| format!("u{i}")).collect();
        let g = AdjacencyGraph::grid(2, 2);
        let p = Partition::new(4, [("a".to_string(), (0..4).map(UnitId).collect())]);
        let c = Collection {
            name: "C".into(),
            partition: p,
            population: vec![1; 4],
        };
        let inst = Instance::new(names, g, vec![c], Layout::Explicit).unwrap();
        assert!(matches!(solve_1d(&inst), Err(Error::NotOneDimensional(_))));
    }
}
