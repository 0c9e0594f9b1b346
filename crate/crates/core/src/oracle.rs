//! Exhaustive reference solver for small instances and the partition
//! gadget used to show two-collection alignment is hard.
//!
//! Every candidate alignment is priced against each collection with the
//! best injective support correspondence, found by a subset DP over the
//! smaller label side. Nothing here depends on the heuristics it checks.

use crate::distance::{Alignment, Correspondence, LabelMap};
use crate::error::{Error, Result};
use crate::model::{AdjacencyGraph, Collection, Instance, Layout, Partition, UnitId};

/// Which labelings the oracle enumerates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMode {
    /// Each unit takes one of the labels it carries in some input
    /// collection, under a fixed matching of every collection onto the first.
    Restricted,
    /// Every partition of the units into connected blocks.
    Full,
}

impl std::str::FromStr for OracleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "restricted" => Ok(Self::Restricted),
            "full" => Ok(Self::Full),
            other => Err(Error::Parse(format!("unknown oracle mode `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct OracleLimits {
    /// Restricted mode: cap on the number of labelings.
    pub max_labelings: u64,
    /// Full mode: cap on the number of units.
    pub max_units: usize,
    /// Cap on the smaller label side of a correspondence DP.
    pub max_dp_labels: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_labelings: 1 << 22,
            max_units: 12,
            max_dp_labels: 16,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub optimum: u64,
    pub alignment: Alignment,
    /// Candidate labelings examined.
    pub examined: u64,
    /// Candidates that passed the contiguity filter.
    pub feasible: u64,
}

/// Collection data in dense form.
struct Dense {
    labels: Vec<Vec<usize>>,
    label_counts: Vec<usize>,
    pops: Vec<Vec<u64>>,
    totals: Vec<u64>,
}

impl Dense {
    fn new(instance: &Instance) -> Self {
        let cs = instance.collections();
        Self {
            labels: cs.iter().map(|c| c.partition.labeling()).collect(),
            label_counts: cs.iter().map(|c| c.partition.support_count()).collect(),
            pops: cs.iter().map(|c| c.population.clone()).collect(),
            totals: cs.iter().map(Collection::total_population).collect(),
        }
    }
}

/// Best injective pairing of `weights[b][l]` (blocks x labels); returns the
/// total and, per block, the paired label.
fn best_pairing(weights: &[Vec<u64>], labels: usize) -> (u64, Vec<Option<usize>>) {
    let blocks = weights.len();
    if blocks == 0 || labels == 0 {
        return (0, vec![None; blocks]);
    }
    if labels <= blocks {
        // DP over blocks, mask of used labels.
        let size = 1usize << labels;
        let mut dp = vec![vec![None::<u64>; size]; blocks + 1];
        dp[0][0] = Some(0);
        for b in 0..blocks {
            for mask in 0..size {
                let Some(cur) = dp[b][mask] else { continue };
                let skip = &mut dp[b + 1][mask];
                *skip = Some(skip.map_or(cur, |s| s.max(cur)));
                for l in 0..labels {
                    if mask & (1 << l) == 0 {
                        let next = &mut dp[b + 1][mask | (1 << l)];
                        let v = cur + weights[b][l];
                        *next = Some(next.map_or(v, |s| s.max(v)));
                    }
                }
            }
        }
        let (mut mask, best) = dp[blocks]
            .iter()
            .enumerate()
            .filter_map(|(m, v)| v.map(|v| (m, v)))
            .max_by_key(|&(m, v)| (v, std::cmp::Reverse(m)))
            .expect("empty mask reachable");
        let mut pick = vec![None; blocks];
        let mut target = best;
        for b in (0..blocks).rev() {
            if dp[b][mask] == Some(target) {
                continue;
            }
            let l = (0..labels)
                .find(|&l| {
                    mask & (1 << l) != 0
                        && target >= weights[b][l]
                        && dp[b][mask ^ (1 << l)] == Some(target - weights[b][l])
                })
                .expect("dp backtrack");
            pick[b] = Some(l);
            mask ^= 1 << l;
            target -= weights[b][l];
        }
        (best, pick)
    } else {
        let transposed: Vec<Vec<u64>> = (0..labels)
            .map(|l| (0..blocks).map(|b| weights[b][l]).collect())
            .collect();
        let (best, per_label) = best_pairing(&transposed, blocks);
        let mut pick = vec![None; blocks];
        for (l, b) in per_label.iter().enumerate() {
            if let Some(b) = b {
                pick[*b] = Some(l);
            }
        }
        (best, pick)
    }
}

/// Cost of every collection for a dense block labeling and the pairing
/// achieving it.
fn price(
    dense: &Dense,
    blocks: &[usize],
    block_count: usize,
) -> (Vec<u64>, Vec<Vec<Option<usize>>>) {
    let mut costs = Vec::with_capacity(dense.labels.len());
    let mut pairings = Vec::with_capacity(dense.labels.len());
    for c in 0..dense.labels.len() {
        let lc = dense.label_counts[c];
        let mut w = vec![vec![0u64; lc]; block_count];
        for (u, &b) in blocks.iter().enumerate() {
            w[b][dense.labels[c][u]] += dense.pops[c][u];
        }
        let (kept, pick) = best_pairing(&w, lc);
        costs.push(dense.totals[c] - kept);
        pairings.push(pick);
    }
    (costs, pairings)
}

/// Exhaustive minimum of the largest weighted distance.
pub fn brute_force_align(
    instance: &Instance,
    mode: OracleMode,
    limits: OracleLimits,
) -> Result<OracleResult> {
    let dense = Dense::new(instance);
    if let Some(&max) = dense.label_counts.iter().max() {
        if max > limits.max_dp_labels {
            return Err(Error::TooLargeForOracle(format!("{max} labels")));
        }
    }
    match mode {
        OracleMode::Restricted => restricted(instance, &dense, limits),
        OracleMode::Full => full(instance, &dense, limits),
    }
}

fn restricted(instance: &Instance, dense: &Dense, limits: OracleLimits) -> Result<OracleResult> {
    let n = instance.unit_count();
    let base = &dense.labels[0];
    let base_count = dense.label_counts[0];
    // Map every collection onto the first collection's labels; unmatched
    // labels get fresh ids past the first collection's range.
    let mut next_fresh = base_count;
    let mut mapped: Vec<Vec<usize>> = Vec::with_capacity(dense.labels.len());
    for c in 0..dense.labels.len() {
        let lc = dense.label_counts[c];
        let mut w = vec![vec![0u64; base_count]; lc];
        for u in 0..n {
            w[dense.labels[c][u]][base[u]] += dense.pops[c][u] + dense.pops[0][u];
        }
        let (_, pick) = best_pairing(&w, base_count);
        let to_base: Vec<usize> = pick
            .into_iter()
            .map(|p| {
                p.unwrap_or_else(|| {
                    next_fresh += 1;
                    next_fresh - 1
                })
            })
            .collect();
        mapped.push((0..n).map(|u| to_base[dense.labels[c][u]]).collect());
    }
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|u| {
            let mut v: Vec<usize> = mapped.iter().map(|m| m[u]).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    let total: u128 = candidates.iter().map(|c| c.len() as u128).product();
    if total > limits.max_labelings as u128 {
        return Err(Error::TooLargeForOracle(format!("{total} labelings")));
    }
    let label_space = next_fresh;
    let free: Vec<usize> = (0..n).filter(|&u| candidates[u].len() > 1).collect();
    let mut digits = vec![0usize; free.len()];
    let mut labeling: Vec<usize> = candidates.iter().map(|c| c[0]).collect();
    let mut best: Option<(u64, Vec<usize>)> = None;
    let (mut examined, mut feasible) = (0u64, 0u64);
    loop {
        examined += 1;
        if instance.graph().labeling_is_contiguous(&labeling) {
            feasible += 1;
            let (costs, _) = price(dense, &labeling, label_space);
            let obj = costs.iter().copied().max().unwrap_or(0);
            if best.as_ref().is_none_or(|(b, _)| obj < *b) {
                best = Some((obj, labeling.clone()));
            }
        }
        // Odometer with the last free unit most significant, so the
        // enumeration is in lexicographic order of the labeling.
        let mut i = 0;
        loop {
            if i == free.len() {
                let (optimum, labeling) = best.expect("input collections are feasible");
                let alignment = build_alignment(instance, dense, &labeling, label_space)?;
                debug_assert_eq!(alignment.objective(), optimum);
                return Ok(OracleResult {
                    optimum,
                    alignment,
                    examined,
                    feasible,
                });
            }
            let u = free[i];
            digits[i] += 1;
            if digits[i] < candidates[u].len() {
                labeling[u] = candidates[u][digits[i]];
                break;
            }
            digits[i] = 0;
            labeling[u] = candidates[u][0];
            i += 1;
        }
    }
}

fn full(instance: &Instance, dense: &Dense, limits: OracleLimits) -> Result<OracleResult> {
    let n = instance.unit_count();
    if n > limits.max_units || n > 30 {
        return Err(Error::TooLargeForOracle(format!(
            "{n} units (limit {})",
            limits.max_units
        )));
    }
    let mut best: Option<(u64, Vec<usize>, usize)> = None;
    let (mut examined, mut feasible) = (0u64, 0u64);
    let mut labeling = vec![0usize; n];
    for_each_connected_partition(instance.graph(), |blocks| {
        examined += 1;
        feasible += 1;
        for (b, &mask) in blocks.iter().enumerate() {
            for u in BitIter(mask) {
                labeling[u] = b;
            }
        }
        let (costs, _) = price(dense, &labeling, blocks.len());
        let obj = costs.iter().copied().max().unwrap_or(0);
        let better = match &best {
            None => true,
            Some((b, l, _)) => obj < *b || (obj == *b && labeling < *l),
        };
        if better {
            best = Some((obj, labeling.clone(), blocks.len()));
        }
    });
    let (optimum, blocks, count) = best.expect("at least one partition");
    let alignment = build_alignment(instance, dense, &blocks, count)?;
    debug_assert_eq!(alignment.objective(), optimum);
    Ok(OracleResult {
        optimum,
        alignment,
        examined,
        feasible,
    })
}

/// Names blocks after the first collection's paired labels (fresh names
/// `new<k>` otherwise) and records every collection's pairing.
fn build_alignment(
    instance: &Instance,
    dense: &Dense,
    labeling: &[usize],
    label_space: usize,
) -> Result<Alignment> {
    // Compact to the labels that occur.
    let mut remap = vec![usize::MAX; label_space];
    let mut used = 0;
    let mut compact = Vec::with_capacity(labeling.len());
    for &l in labeling {
        if remap[l] == usize::MAX {
            remap[l] = used;
            used += 1;
        }
        compact.push(remap[l]);
    }
    let (_, pairings) = price(dense, &compact, used);
    let first = &instance.collections()[0].partition;
    let mut names: Vec<Option<String>> = pairings[0]
        .iter()
        .map(|p| p.map(|l| first.label(l).to_string()))
        .collect();
    let mut fresh = 0;
    for name in &mut names {
        if name.is_none() {
            loop {
                fresh += 1;
                let candidate = format!("new{fresh}");
                if first.label_index(&candidate).is_none() {
                    *name = Some(candidate);
                    break;
                }
            }
        }
    }
    let names: Vec<String> = names.into_iter().map(Option::unwrap).collect();
    let result = Partition::from_labeling(&names, &compact);
    let mut corr = Correspondence::new();
    for (c, coll) in instance.collections().iter().enumerate() {
        let mut image = vec![None; dense.label_counts[c]];
        for (b, p) in pairings[c].iter().enumerate() {
            if let Some(l) = p {
                image[*l] = Some(names[b].clone());
            }
        }
        let pairs = coll.partition.labels().iter().cloned().zip(image);
        corr.insert(coll.name.clone(), LabelMap::from_pairs(&coll.name, pairs)?);
    }
    Alignment::new(instance, result, corr)
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

/// Calls `visit` once for every partition of the units into connected
/// blocks (as bitmasks). Blocks are listed in order of their smallest unit.
pub fn for_each_connected_partition(graph: &AdjacencyGraph, mut visit: impl FnMut(&[u64])) {
    let n = graph.unit_count();
    assert!(n <= 64, "bitmask enumeration supports at most 64 units");
    let adj: Vec<u64> = (0..n)
        .map(|u| {
            graph
                .neighbors(UnitId(u as u32))
                .iter()
                .fold(0u64, |m, w| m | (1 << w.index()))
        })
        .collect();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut blocks = Vec::new();
    partition_rec(&adj, all, &mut blocks, &mut visit);
}

fn partition_rec(adj: &[u64], free: u64, blocks: &mut Vec<u64>, visit: &mut impl FnMut(&[u64])) {
    if free == 0 {
        visit(blocks);
        return;
    }
    let v = free.trailing_zeros() as usize;
    let frontier = adj[v] & free;
    let mut sets = Vec::new();
    connected_sets(adj, free, 1 << v, frontier, 0, &mut sets);
    for s in sets {
        blocks.push(s);
        partition_rec(adj, free & !s, blocks, visit);
        blocks.pop();
    }
}

/// Every connected subset of `free` that contains `set` and extends it
/// only through `frontier`, never touching `excluded`.
fn connected_sets(
    adj: &[u64],
    free: u64,
    set: u64,
    frontier: u64,
    excluded: u64,
    out: &mut Vec<u64>,
) {
    if frontier == 0 {
        out.push(set);
        return;
    }
    let f = frontier.trailing_zeros() as usize;
    let bit = 1u64 << f;
    connected_sets(adj, free, set, frontier & !bit, excluded | bit, out);
    let grown = set | bit;
    let next = (frontier | (adj[f] & free)) & !grown & !excluded;
    connected_sets(adj, free, grown, next, excluded, out);
}

/// Two-collection instance encoding a partition problem on `values`.
///
/// Units `a`, `u1..un`, `b`; `a` and `b` touch every `u_i` (bars above and
/// below the row) and consecutive `u_i` touch. `S = {{a} + U, {b}}`,
/// `T = {{a}, U + {b}}`; `p(u_i) = x_i`, `p(a) = p(b) = sum + 1`.
pub fn generate_gadget(values: &[u64]) -> Result<Instance> {
    if values.is_empty() {
        return Err(Error::EmptyMultiset);
    }
    if values.contains(&0) {
        return Err(Error::NonPositiveValue);
    }
    let n = values.len();
    let total: u64 = values.iter().sum();
    let a = UnitId(0);
    let b = UnitId(n as u32 + 1);
    let row: Vec<UnitId> = (1..=n as u32).map(UnitId).collect();
    let mut names = vec!["a".to_string()];
    names.extend((1..=n).map(|i| format!("u{i}")));
    names.push("b".to_string());
    let mut edges = Vec::new();
    for (i, &u) in row.iter().enumerate() {
        edges.push((a, u));
        edges.push((b, u));
        if i + 1 < n {
            edges.push((u, row[i + 1]));
        }
    }
    let graph = AdjacencyGraph::new(n + 2, edges);
    let mut pops = vec![total + 1; n + 2];
    pops[1..=n].copy_from_slice(values);
    let with_a: Vec<UnitId> = std::iter::once(a).chain(row.iter().copied()).collect();
    let with_b: Vec<UnitId> = row.iter().copied().chain(std::iter::once(b)).collect();
    let s = Collection {
        name: "S".into(),
        partition: Partition::new(n + 2, [("s1".into(), with_a), ("s2".into(), vec![b])]),
        population: pops.clone(),
    };
    let t = Collection {
        name: "T".into(),
        partition: Partition::new(n + 2, [("t1".into(), vec![a]), ("t2".into(), with_b)]),
        population: pops,
    };
    Instance::new(names, graph, vec![s, t], Layout::Explicit)
}

/// Outcome of checking both directions of the gadget equivalence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Consistent {
        /// Partitions of the multiset with the requested difference.
        partitions: u64,
        /// Alignments whose objective equals `(S + delta) / 2`.
        alignments: u64,
    },
    Counterexample(String),
}

/// Checks that partitions of `values` with difference `delta` and gadget
/// alignments of objective `(S + delta) / 2` correspond both ways.
pub fn verify_partition_equivalence(values: &[u64], delta: u64) -> Result<Equivalence> {
    let gadget = generate_gadget(values)?;
    let total: u64 = values.iter().sum();
    if delta > total || (total + delta) % 2 == 1 {
        return Err(Error::InfeasibleDelta { delta, total });
    }
    let n = values.len();
    if n + 2 > OracleLimits::default().max_units {
        return Err(Error::TooLargeForOracle(format!("{n} values")));
    }
    let target = (total + delta) / 2;
    let dense = Dense::new(&gadget);
    let units = n + 2;

    // Forward: each partition (U1 with a, U2 with b) yields an alignment.
    let mut partitions = 0;
    for subset in 0u64..(1 << n) {
        let s1: u64 = (0..n)
            .filter(|i| subset & (1 << i) != 0)
            .map(|i| values[i])
            .sum();
        if s1.abs_diff(total - s1) != delta {
            continue;
        }
        partitions += 1;
        let mut labeling = vec![1usize; units];
        labeling[0] = 0;
        for i in 0..n {
            if subset & (1 << i) != 0 {
                labeling[i + 1] = 0;
            }
        }
        if !gadget.graph().labeling_is_contiguous(&labeling) {
            return Ok(Equivalence::Counterexample(format!(
                "partition {subset:#b} is not contiguous in the gadget"
            )));
        }
        let (costs, _) = price(&dense, &labeling, 2);
        let obj = costs.iter().copied().max().unwrap_or(0);
        if obj != target {
            return Ok(Equivalence::Counterexample(format!(
                "partition {subset:#b} gives objective {obj}, expected {target}"
            )));
        }
    }

    // Backward: every alignment at the target objective keeps a and b
    // apart and induces a partition with the requested difference.
    let a_bit = 1u64;
    let b_bit = 1u64 << (n + 1);
    let mut alignments = 0;
    let mut failure = None;
    let mut labeling = vec![0usize; units];
    for_each_connected_partition(gadget.graph(), |blocks| {
        if failure.is_some() {
            return;
        }
        for (b, &mask) in blocks.iter().enumerate() {
            for u in BitIter(mask) {
                labeling[u] = b;
            }
        }
        let (costs, _) = price(&dense, &labeling, blocks.len());
        if costs.iter().copied().max() != Some(target) {
            return;
        }
        alignments += 1;
        let block_a = blocks.iter().copied().find(|m| m & a_bit != 0).unwrap();
        if block_a & b_bit != 0 {
            failure = Some(format!("blocks {blocks:?}: a and b share a support"));
            return;
        }
        let block_b = blocks.iter().copied().find(|m| m & b_bit != 0).unwrap();
        let row_sum = |mask: u64| -> u64 {
            (0..n)
                .filter(|i| mask & (1 << (i + 1)) != 0)
                .map(|i| values[i])
                .sum()
        };
        // The collection at the target fixes which side is read off.
        let side = if costs[0] == target {
            row_sum(block_a)
        } else {
            total - row_sum(block_b)
        };
        if side.abs_diff(total - side) != delta {
            failure = Some(format!(
                "blocks {blocks:?}: induced difference {} != {delta}",
                side.abs_diff(total - side)
            ));
        }
    });
    Ok(match failure {
        Some(msg) => Equivalence::Counterexample(msg),
        None => Equivalence::Consistent {
            partitions,
            alignments,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;

    #[test]
    fn pairing_dp_matches_enumeration() {
        let w = vec![vec![5, 1, 0], vec![4, 4, 0], vec![0, 0, 2], vec![9, 0, 0]];
        let (best, pick) = best_pairing(&w, 3);
        // Block 3 takes label 0, block 1 label 1, block 2 label 2.
        assert_eq!(best, 9 + 4 + 2);
        let realized: u64 = pick
            .iter()
            .enumerate()
            .filter_map(|(b, l)| l.map(|l| w[b][l]))
            .sum();
        assert_eq!(realized, best);
    }

    #[test]
    fn connected_partitions_of_a_triangle_and_path() {
        let tri = AdjacencyGraph::new(
            3,
            [
                (UnitId(0), UnitId(1)),
                (UnitId(1), UnitId(2)),
                (UnitId(0), UnitId(2)),
            ],
        );
        let mut count = 0;
        for_each_connected_partition(&tri, |_| count += 1);
        assert_eq!(count, 5); // Bell(3)
        let path = AdjacencyGraph::new(3, [(UnitId(0), UnitId(1)), (UnitId(1), UnitId(2))]);
        let mut count = 0;
        for_each_connected_partition(&path, |_| count += 1);
        assert_eq!(count, 4); // {0,2} is not connected
    }

    #[test]
    fn connected_partitions_of_grid_are_exact() {
        // Cross-check against filtering all set partitions of a 2x3 grid.
        let g = AdjacencyGraph::grid(3, 2);
        let mut fast = 0u64;
        for_each_connected_partition(&g, |_| fast += 1);
        let mut slow = 0u64;
        let n = 6;
        let mut rgs = vec![0usize; n];
        fn rec(i: usize, max: usize, rgs: &mut Vec<usize>, g: &AdjacencyGraph, out: &mut u64) {
            if i == rgs.len() {
                if g.labeling_is_contiguous(rgs) {
                    *out += 1;
                }
                return;
            }
            for l in 0..=max + 1 {
                rgs[i] = l;
                rec(i + 1, max.max(l), rgs, g, out);
            }
        }
        rgs[0] = 0;
        rec(1, 0, &mut rgs, &g, &mut slow);
        assert_eq!(fast, slow);
    }

    #[test]
    fn gadget_shape() {
        let g = generate_gadget(&[3, 5]).unwrap();
        assert_eq!(g.unit_count(), 4);
        assert!(validate(&g).is_empty());
        let s = &g.collections()[0];
        let t = &g.collections()[1];
        assert_eq!(s.pop(g.unit("a").unwrap()), 9);
        assert_eq!(t.pop(g.unit("b").unwrap()), 9);
        assert_eq!(s.partition.members(0).len(), 3);
        assert_eq!(s.partition.members(1), &[g.unit("b").unwrap()]);
        assert_eq!(t.partition.members(0), &[g.unit("a").unwrap()]);
        assert_eq!(t.partition.members(1).len(), 3);
    }

    #[test]
    fn gadget_of_ones() {
        let g = generate_gadget(&[1; 5]).unwrap();
        assert_eq!(g.collections()[0].pop(g.unit("a").unwrap()), 6);
    }

    #[test]
    fn gadget_rejects_empty() {
        assert!(matches!(generate_gadget(&[]), Err(Error::EmptyMultiset)));
    }

    #[test]
    fn gadget_optimum_small() {
        let g = generate_gadget(&[1, 1, 2]).unwrap();
        let r = brute_force_align(&g, OracleMode::Restricted, OracleLimits::default()).unwrap();
        assert_eq!(r.optimum, 2);
        assert_eq!(r.examined, 8);
        let r = brute_force_align(&g, OracleMode::Full, OracleLimits::default()).unwrap();
        assert_eq!(r.optimum, 2);
    }

    #[test]
    fn equivalence_examples() {
        assert!(matches!(
            verify_partition_equivalence(&[1, 2, 3], 0).unwrap(),
            Equivalence::Consistent { partitions: 2, .. }
        ));
        assert!(matches!(
            verify_partition_equivalence(&[1, 1], 2).unwrap(),
            Equivalence::Consistent { .. }
        ));
        assert!(matches!(
            verify_partition_equivalence(&[2], 1),
            Err(Error::InfeasibleDelta { .. })
        ));
        assert!(matches!(
            verify_partition_equivalence(&[2], 4),
            Err(Error::InfeasibleDelta { .. })
        ));
    }

    #[test]
    fn full_mode_guard() {
        let g = generate_gadget(&[1; 11]).unwrap();
        assert!(matches!(
            brute_force_align(&g, OracleMode::Full, OracleLimits::default()),
            Err(Error::TooLargeForOracle(_))
        ));
    }
}
