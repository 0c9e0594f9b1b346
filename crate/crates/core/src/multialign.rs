//! Heuristic for any number of collections: hyperedge matching of supports,
//! then an envy-graph allocation of the disagreeing units to collections.

use serde::Serialize;

use crate::distance::Alignment;
use crate::error::{Error, Result};
use crate::grouping::{
    attach, completion_exists, fine_labelings, overlap_weights, Grouping, Pricing, SupportGraph,
};
use crate::model::{Instance, UnitId};

/// Largest number of support tuples enumerated.
pub const HYPERGRAPH_BUDGET: u128 = 1 << 20;

/// Accepted local-search moves before the matching search stops.
const LOCAL_SEARCH_CAP: usize = 10_000;

/// Largest item count for exact maximin shares.
pub const MAX_SHARE_ITEMS: usize = 15;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hyperedge {
    /// One support index per collection.
    pub supports: Vec<usize>,
    pub weight: u64,
}

/// Support tuples with nonzero weight; other tuples weigh zero.
#[derive(Clone, Debug)]
pub struct SharedUnitsHypergraph {
    pub counts: Vec<usize>,
    /// `pair[i][j]` for `i < j`: overlap weights between collections.
    pair: Vec<Vec<Vec<Vec<u64>>>>,
    pub edges: Vec<Hyperedge>,
}

impl SharedUnitsHypergraph {
    /// Sum over unordered pairs of collections of the pairwise overlap.
    pub fn weight(&self, supports: &[usize]) -> u64 {
        let k = supports.len();
        let mut w = 0;
        for i in 0..k {
            for j in i + 1..k {
                w += self.pair[i][j][supports[i]][supports[j]];
            }
        }
        w
    }

    pub fn pair_weight(&self, i: usize, j: usize, si: usize, sj: usize) -> u64 {
        if i < j {
            self.pair[i][j][si][sj]
        } else {
            self.pair[j][i][sj][si]
        }
    }
}

pub fn build_hypergraph(instance: &Instance) -> Result<SharedUnitsHypergraph> {
    let k = instance.collections().len();
    let counts: Vec<usize> = instance
        .collections()
        .iter()
        .map(|c| c.partition.support_count())
        .collect();
    let tuples = counts.iter().map(|&c| c as u128).try_fold(1u128, |acc, c| {
        acc.checked_mul(c).filter(|&p| p <= HYPERGRAPH_BUDGET)
    });
    let tuples = tuples.ok_or_else(|| {
        Error::HypergraphTooDense(
            counts
                .iter()
                .fold(1u128, |a, &c| a.saturating_mul(c as u128)),
        )
    })?;
    let fine = fine_labelings(instance);
    let mut pair = vec![vec![Vec::new(); k]; k];
    for (i, row) in pair.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate().skip(i + 1) {
            *cell = overlap_weights(instance, i, j, &fine);
        }
    }
    let mut h = SharedUnitsHypergraph {
        counts: counts.clone(),
        pair,
        edges: Vec::new(),
    };
    let mut tuple = vec![0usize; k];
    for _ in 0..tuples {
        let w = h.weight(&tuple);
        if w > 0 {
            h.edges.push(Hyperedge {
                supports: tuple.clone(),
                weight: w,
            });
        }
        for d in (0..k).rev() {
            tuple[d] += 1;
            if tuple[d] < counts[d] {
                break;
            }
            tuple[d] = 0;
        }
    }
    Ok(h)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HyperMatching {
    pub edges: Vec<Hyperedge>,
    pub weight: u64,
    pub local_moves: usize,
}

/// Greedy by descending weight, completed with arbitrary disjoint tuples,
/// then improved by replacing one edge or recombining two.
#[allow(clippy::needless_range_loop)]
pub fn match_hypergraph(h: &SharedUnitsHypergraph) -> Result<HyperMatching> {
    let k = h.counts.len();
    let size = h.counts.iter().copied().min().unwrap_or(0);
    let mut order: Vec<&Hyperedge> = h.edges.iter().collect();
    order.sort_by(|a, b| {
        b.weight
            .cmp(&a.weight)
            .then_with(|| a.supports.cmp(&b.supports))
    });
    let mut used: Vec<Vec<bool>> = h.counts.iter().map(|&c| vec![false; c]).collect();
    let mut chosen: Vec<Vec<usize>> = Vec::with_capacity(size);
    for e in order {
        if chosen.len() == size {
            break;
        }
        if e.supports.iter().enumerate().all(|(c, &s)| !used[c][s]) {
            for (c, &s) in e.supports.iter().enumerate() {
                used[c][s] = true;
            }
            chosen.push(e.supports.clone());
        }
    }
    while chosen.len() < size {
        let tuple: Vec<usize> = (0..k)
            .map(|c| {
                used[c]
                    .iter()
                    .position(|&u| !u)
                    .expect("every collection has a free support")
            })
            .collect();
        for (c, &s) in tuple.iter().enumerate() {
            used[c][s] = true;
        }
        chosen.push(tuple);
    }

    let mut moves = 0;
    'search: while moves < LOCAL_SEARCH_CAP {
        // Replace one edge by a heavier tuple using its own or free supports.
        for e in 0..chosen.len() {
            let current = h.weight(&chosen[e]);
            for cand in &h.edges {
                if cand.weight <= current {
                    continue;
                }
                let fits = cand
                    .supports
                    .iter()
                    .enumerate()
                    .all(|(c, &s)| !used[c][s] || chosen[e][c] == s);
                if fits {
                    for (c, &s) in chosen[e].iter().enumerate() {
                        used[c][s] = false;
                    }
                    for (c, &s) in cand.supports.iter().enumerate() {
                        used[c][s] = true;
                    }
                    chosen[e] = cand.supports.clone();
                    moves += 1;
                    continue 'search;
                }
            }
        }
        // Recombine two edges: every collection but the first may swap.
        for a in 0..chosen.len() {
            for b in a + 1..chosen.len() {
                let current = h.weight(&chosen[a]) + h.weight(&chosen[b]);
                for mask in 1u64..(1 << (k - 1)) {
                    let mut x = chosen[a].clone();
                    let mut y = chosen[b].clone();
                    for c in 1..k {
                        if mask & (1 << (c - 1)) != 0 {
                            std::mem::swap(&mut x[c], &mut y[c]);
                        }
                    }
                    if h.weight(&x) + h.weight(&y) > current {
                        chosen[a] = x;
                        chosen[b] = y;
                        moves += 1;
                        continue 'search;
                    }
                }
            }
        }
        break;
    }
    chosen.sort();
    if chosen.len() < size {
        return Err(Error::MatchingShortfall {
            found: chosen.len(),
            required: size,
        });
    }
    let edges: Vec<Hyperedge> = chosen
        .into_iter()
        .map(|s| Hyperedge {
            weight: h.weight(&s),
            supports: s,
        })
        .collect();
    Ok(HyperMatching {
        weight: edges.iter().map(|e| e.weight).sum(),
        edges,
        local_moves: moves,
    })
}

/// Attaches every unmatched support to the matched hyperedge it overlaps
/// most, keeping each group contiguous within its collection.
pub fn attach_unmatched_multi(
    instance: &Instance,
    h: &SharedUnitsHypergraph,
    matching: &HyperMatching,
) -> Result<Grouping> {
    let fine = fine_labelings(instance);
    let k = h.counts.len();
    let groups = matching.edges.len();
    let mut group_of = Vec::with_capacity(k);
    for (c, coll) in instance.collections().iter().enumerate() {
        let mut anchors = vec![None; h.counts[c]];
        for (g, e) in matching.edges.iter().enumerate() {
            anchors[e.supports[c]] = Some(g);
        }
        let sg = SupportGraph::new(instance, &fine[c], h.counts[c]);
        let score = |s: usize, g: usize| -> u64 {
            (0..k)
                .filter(|&o| o != c)
                .map(|o| h.pair_weight(c, o, s, matching.edges[g].supports[o]))
                .sum()
        };
        group_of.push(attach(
            &sg,
            &anchors,
            groups,
            score,
            &coll.name,
            coll.partition.labels(),
        )?);
    }
    Ok(Grouping {
        groups,
        group_of,
        anchor: matching.edges.iter().map(|e| e.supports.clone()).collect(),
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Allocation {
    /// Agent of every item.
    pub owner: Vec<usize>,
    pub bundles: Vec<Vec<usize>>,
    pub rotations: usize,
    /// Envy cycles left in place because rotating them broke feasibility.
    pub blocked_cycles: usize,
    /// Items given to an envied agent because no unenvied one was feasible.
    pub non_source: usize,
    /// Items given to an infeasible agent because no agent was feasible.
    pub fallbacks: usize,
}

/// Envy-graph allocation of items to agents.
///
/// `values[a][i]` is agent `a`'s value for item `i`. Items are taken in
/// descending order of their largest value. Each goes to a feasible agent
/// nobody envies, preferring the one valuing it most; envy cycles are then
/// rotated away. `feasible` judges a partial owner assignment.
pub fn envy_graph_allocate(
    values: &[Vec<u64>],
    mut feasible: impl FnMut(&[Option<usize>]) -> bool,
) -> Allocation {
    let agents = values.len();
    let items = values.first().map_or(0, Vec::len);
    let mut order: Vec<usize> = (0..items).collect();
    order.sort_by_key(|&i| std::cmp::Reverse((0..agents).map(|a| values[a][i]).max().unwrap_or(0)));
    let mut owner: Vec<Option<usize>> = vec![None; items];
    let mut bundles: Vec<Vec<usize>> = vec![Vec::new(); agents];
    let mut out = Allocation::default();
    let value = |a: usize, bundle: &[usize]| -> u64 { bundle.iter().map(|&i| values[a][i]).sum() };

    for item in order {
        let envied: Vec<bool> = (0..agents)
            .map(|j| (0..agents).any(|i| i != j && value(i, &bundles[j]) > value(i, &bundles[i])))
            .collect();
        let feasible_agents: Vec<usize> = (0..agents)
            .filter(|&a| {
                owner[item] = Some(a);
                let ok = feasible(&owner);
                owner[item] = None;
                ok
            })
            .collect();
        let best = |pool: &mut dyn Iterator<Item = usize>| {
            pool.max_by_key(|&a| (values[a][item], std::cmp::Reverse(a)))
        };
        let agent =
            if let Some(a) = best(&mut feasible_agents.iter().copied().filter(|&a| !envied[a])) {
                a
            } else if let Some(a) = best(&mut feasible_agents.iter().copied()) {
                out.non_source += 1;
                a
            } else {
                out.fallbacks += 1;
                best(&mut (0..agents)).expect("at least one agent")
            };
        owner[item] = Some(agent);
        bundles[agent].push(item);

        while let Some(cycle) = envy_cycle(values, &bundles) {
            let before: u64 = (0..agents).map(|a| value(a, &bundles[a])).sum();
            let mut rotated = bundles.clone();
            for w in 0..cycle.len() {
                let (i, j) = (cycle[w], cycle[(w + 1) % cycle.len()]);
                rotated[i] = bundles[j].clone();
            }
            let mut trial = owner.clone();
            for (a, b) in rotated.iter().enumerate() {
                for &i in b {
                    trial[i] = Some(a);
                }
            }
            if !feasible(&trial) {
                out.blocked_cycles += 1;
                break;
            }
            let after: u64 = (0..agents).map(|a| value(a, &rotated[a])).sum();
            assert!(after > before, "envy rotation must raise total value");
            bundles = rotated;
            owner = trial;
            out.rotations += 1;
        }
    }
    out.owner = owner
        .into_iter()
        .map(|o| o.expect("every item allocated"))
        .collect();
    out.bundles = bundles;
    out
}

/// A cycle `a0 -> a1 -> ...` where each agent envies the next, if any.
pub fn envy_cycle(values: &[Vec<u64>], bundles: &[Vec<usize>]) -> Option<Vec<usize>> {
    let agents = values.len();
    let v = |a: usize, b: &[usize]| -> u64 { b.iter().map(|&i| values[a][i]).sum() };
    let envies: Vec<Vec<usize>> = (0..agents)
        .map(|i| {
            let own = v(i, &bundles[i]);
            (0..agents)
                .filter(|&j| j != i && v(i, &bundles[j]) > own)
                .collect()
        })
        .collect();
    // 0 unvisited, 1 on stack, 2 done.
    let mut state = vec![0u8; agents];
    let mut stack: Vec<usize> = Vec::new();
    fn dfs(
        a: usize,
        envies: &[Vec<usize>],
        state: &mut [u8],
        stack: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        state[a] = 1;
        stack.push(a);
        for &b in &envies[a] {
            if state[b] == 1 {
                let start = stack.iter().position(|&x| x == b).expect("on stack");
                return Some(stack[start..].to_vec());
            }
            if state[b] == 0 {
                if let Some(c) = dfs(b, envies, state, stack) {
                    return Some(c);
                }
            }
        }
        stack.pop();
        state[a] = 2;
        None
    }
    (0..agents).find_map(|a| {
        if state[a] == 0 {
            dfs(a, &envies, &mut state, &mut stack)
        } else {
            None
        }
    })
}

/// Best achievable smallest part when splitting `values` into `n` parts.
pub fn maximin_share(values: &[u64], n: usize) -> Result<u64> {
    if n == 0 {
        return Err(Error::BadParameters("zero parts".into()));
    }
    if values.len() > MAX_SHARE_ITEMS {
        return Err(Error::SizeLimit(format!(
            "{} items exceed the exact limit of {MAX_SHARE_ITEMS}",
            values.len()
        )));
    }
    if n > values.len() {
        return Ok(0);
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let total: u64 = sorted.iter().sum();
    let ceiling = total / n as u64;
    let mut best = lpt_min_part(&sorted, n);
    let mut bins = vec![0u64; n];
    fn go(i: usize, items: &[u64], rest: u64, bins: &mut [u64], best: &mut u64, ceiling: u64) {
        if *best == ceiling {
            return;
        }
        if i == items.len() {
            *best = (*best).max(bins.iter().copied().min().unwrap_or(0));
            return;
        }
        // Every bin can at most gain all remaining items.
        if bins.iter().map(|&b| b + rest).min().unwrap_or(0) <= *best {
            return;
        }
        for b in 0..bins.len() {
            // Empty bins are interchangeable.
            if bins[b] == 0 && bins[..b].contains(&0) {
                continue;
            }
            bins[b] += items[i];
            go(i + 1, items, rest - items[i], bins, best, ceiling);
            bins[b] -= items[i];
        }
    }
    go(0, &sorted, total, &mut bins, &mut best, ceiling);
    Ok(best)
}

/// Smallest part of the longest-processing-time split; a lower bound on the
/// maximin share.
pub fn lpt_min_part(values: &[u64], n: usize) -> u64 {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut bins = vec![0u64; n];
    for v in sorted {
        let i = (0..n).min_by_key(|&i| (bins[i], i)).expect("n > 0");
        bins[i] += v;
    }
    bins.into_iter().min().unwrap_or(0)
}

/// Largest item count for the direct minimax enumeration.
pub const MAX_GAMMA_ITEMS: usize = 14;

/// Smallest achievable worst-case charge over all `n`-part splits: for a
/// split, the charge of part `k` is the value of everything outside it.
pub fn gamma_direct(values: &[u64], n: usize) -> Result<u64> {
    if n == 0 {
        return Err(Error::BadParameters("zero parts".into()));
    }
    if values.len() > MAX_GAMMA_ITEMS {
        return Err(Error::SizeLimit(format!(
            "{} items exceed the enumeration limit of {MAX_GAMMA_ITEMS}",
            values.len()
        )));
    }
    let total: u64 = values.iter().sum();
    let mut digits = vec![0usize; values.len()];
    let mut best = u64::MAX;
    loop {
        let mut parts = vec![0u64; n];
        for (i, &d) in digits.iter().enumerate() {
            parts[d] += values[i];
        }
        let worst = parts.iter().map(|&p| total - p).max().unwrap_or(total);
        best = best.min(worst);
        let mut i = 0;
        loop {
            if i == digits.len() {
                return Ok(best);
            }
            digits[i] += 1;
            if digits[i] < n {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GammaCheck {
    pub total: u64,
    pub mu: u64,
    pub gamma: u64,
    pub holds: bool,
}

/// Computes both sides of `gamma = total - mu` independently.
pub fn gamma_identity_check(values: &[u64], n: usize) -> Result<GammaCheck> {
    let total: u64 = values.iter().sum();
    let mu = maximin_share(values, n)?;
    let gamma = gamma_direct(values, n)?;
    Ok(GammaCheck {
        total,
        mu,
        gamma,
        holds: gamma == total - mu,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CollectionBound {
    pub name: String,
    /// Population of the collection over all disagreement units.
    pub sum_p: u64,
    pub mu: u64,
    /// False when `mu` is the greedy lower bound.
    pub mu_exact: bool,
    pub eq8_bound: f64,
    /// Distance to the alignment, recomputed from scratch.
    pub realized_dw: u64,
    /// Population of the collection over units given to other collections.
    pub charged: u64,
}

impl CollectionBound {
    pub fn within_bound(&self) -> bool {
        3 * self.realized_dw as u128 + 2 * self.mu as u128 <= 3 * self.sum_p as u128
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiReport {
    pub collections: Vec<CollectionBound>,
    pub objective: u64,
    pub matching_weight: u64,
    pub disagreement: usize,
    pub rotations: usize,
    pub blocked_cycles: usize,
    pub non_source: usize,
    pub fallbacks: usize,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct MultiAlignment {
    pub alignment: Alignment,
    pub matching: HyperMatching,
    /// Disagreement units in the order used by `allocation`.
    pub items: Vec<UnitId>,
    pub allocation: Allocation,
    pub report: MultiReport,
}

pub fn align_multi(instance: &Instance) -> Result<MultiAlignment> {
    let cs = instance.collections();
    let k = cs.len();
    if k < 2 {
        return Err(Error::CollectionCount {
            expected: "at least 2",
            got: k,
        });
    }
    let h = build_hypergraph(instance)?;
    let matching = match_hypergraph(&h)?;
    let grouping = attach_unmatched_multi(instance, &h, &matching)?;
    let fine = fine_labelings(instance);
    let coarse = grouping.coarse(&fine);
    let n = instance.unit_count();
    let items: Vec<UnitId> = instance
        .units()
        .filter(|u| coarse.iter().any(|l| l[u.index()] != coarse[0][u.index()]))
        .collect();
    let values: Vec<Vec<u64>> = cs
        .iter()
        .map(|c| items.iter().map(|&u| c.pop(u)).collect())
        .collect();

    let mut partial: Vec<Option<usize>> = (0..n).map(|u| Some(coarse[0][u])).collect();
    let allocation = envy_graph_allocate(&values, |owners| {
        for (i, &u) in items.iter().enumerate() {
            partial[u.index()] = owners[i].map(|a| coarse[a][u.index()]);
        }
        completion_exists(instance, &coarse, &partial)
    });

    let mut labeling = coarse[0].clone();
    for (i, &u) in items.iter().enumerate() {
        labeling[u.index()] = coarse[allocation.owner[i]][u.index()];
    }
    let pricing = Pricing::new(instance, &fine, &grouping);
    let refined = pricing.refine(labeling);
    let alignment = pricing.alignment(&refined)?;

    let mut warnings = Vec::new();
    if allocation.fallbacks > 0 {
        warnings.push(format!("{} contiguity fallbacks", allocation.fallbacks));
    }
    let mut bounds = Vec::with_capacity(k);
    for (c, coll) in cs.iter().enumerate() {
        let (mu, mu_exact) = match maximin_share(&values[c], k) {
            Ok(mu) => (mu, true),
            Err(_) => (lpt_min_part(&values[c], k), false),
        };
        let sum_p: u64 = values[c].iter().sum();
        let bound = CollectionBound {
            name: coll.name.clone(),
            sum_p,
            mu,
            mu_exact,
            eq8_bound: sum_p as f64 - 2.0 / 3.0 * mu as f64,
            realized_dw: alignment.cost(&coll.name),
            charged: (0..items.len())
                .filter(|&i| allocation.owner[i] != c)
                .map(|i| values[c][i])
                .sum(),
        };
        if !bound.within_bound() {
            warnings.push(format!(
                "{}: distance {} exceeds bound {:.2}{}",
                bound.name,
                bound.realized_dw,
                bound.eq8_bound,
                if mu_exact { "" } else { " (approximate)" }
            ));
        }
        bounds.push(bound);
    }
    let report = MultiReport {
        collections: bounds,
        objective: alignment.objective(),
        matching_weight: matching.weight,
        disagreement: items.len(),
        rotations: allocation.rotations,
        blocked_cycles: allocation.blocked_cycles,
        non_source: allocation.non_source,
        fallbacks: allocation.fallbacks,
        warnings,
    };
    Ok(MultiAlignment {
        alignment,
        matching,
        items,
        allocation,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn maximin_examples() {
        assert_eq!(maximin_share(&[20, 20, 20, 15, 15, 15, 20], 2).unwrap(), 60);
        assert_eq!(maximin_share(&[3, 5, 8], 1).unwrap(), 16);
        assert_eq!(maximin_share(&[3, 5], 3).unwrap(), 0);
        assert!(maximin_share(&[1; 16], 2).is_err());
    }

    #[test]
    fn gamma_examples() {
        let g = gamma_identity_check(&[3, 5, 8], 2).unwrap();
        assert_eq!((g.total, g.mu, g.gamma, g.holds), (16, 8, 8, true));
        let g = gamma_identity_check(&[7], 2).unwrap();
        assert_eq!((g.mu, g.gamma), (0, 7));
    }

    #[test]
    fn single_item_goes_to_highest_value() {
        let a = envy_graph_allocate(&[vec![3], vec![9], vec![5]], |_| true);
        assert_eq!(a.owner, vec![1]);
        assert_eq!(a.bundles, vec![vec![], vec![0], vec![]]);
    }

    #[test]
    fn no_items() {
        let a = envy_graph_allocate(&[vec![], vec![]], |_| true);
        assert!(a.owner.is_empty());
        assert_eq!(a.bundles, vec![Vec::<usize>::new(), vec![]]);
    }

    #[test]
    fn infeasible_everywhere_falls_back() {
        let a = envy_graph_allocate(&[vec![1], vec![2]], |_| false);
        assert_eq!((a.owner[0], a.fallbacks), (1, 1));
    }

    fn exhaustive_mu(values: &[u64], n: usize) -> u64 {
        let mut best = 0;
        let combos = n.pow(values.len() as u32);
        for mut code in 0..combos {
            let mut parts = vec![0u64; n];
            for &v in values {
                parts[code % n] += v;
                code /= n;
            }
            best = best.max(*parts.iter().min().unwrap());
        }
        best
    }

    proptest! {
        #[test]
        fn maximin_matches_enumeration(values in proptest::collection::vec(1u64..30, 0..9), n in 1usize..4) {
            prop_assert_eq!(maximin_share(&values, n).unwrap(), exhaustive_mu(&values, n));
            prop_assert!(lpt_min_part(&values, n) <= exhaustive_mu(&values, n));
        }

        #[test]
        fn allocation_partitions_items_and_leaves_no_cycle(
            seed in proptest::collection::vec(1u64..20, 40),
            agents in 2usize..5,
            items in 0usize..10,
        ) {
            let values: Vec<Vec<u64>> = (0..agents)
                .map(|a| (0..items).map(|i| seed[(a * 10 + i) % 40]).collect())
                .collect();
            let alloc = envy_graph_allocate(&values, |_| true);
            let mut seen: Vec<usize> = alloc.bundles.concat();
            seen.sort_unstable();
            prop_assert_eq!(seen, (0..items).collect::<Vec<_>>());
            for (a, b) in alloc.bundles.iter().enumerate() {
                prop_assert!(b.iter().all(|&i| alloc.owner[i] == a));
            }
            prop_assert!(envy_cycle(&values, &alloc.bundles).is_none());
            prop_assert_eq!(alloc.blocked_cycles, 0);
        }
    }
}
