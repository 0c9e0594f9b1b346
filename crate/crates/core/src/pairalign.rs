//! Two-collection heuristic: match supports by weighted overlap, then split
//! the disagreeing units between the two collections with a greedy
//! balanced partition that respects contiguity.

use serde::Serialize;

use crate::assignment::max_weight_assignment;
use crate::distance::Alignment;
use crate::error::{Error, Result};
use crate::grouping::{
    attach, completion_exists, components, fine_labelings, Grouping, Pricing, SupportGraph,
};
use crate::model::{Collection, Instance, UnitId};

/// Overlap weights between the supports of two collections.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SharedUnitsGraph {
    pub left: Vec<String>,
    pub right: Vec<String>,
    /// `weights[s][t]`, in label order.
    pub weights: Vec<Vec<u64>>,
}

impl SharedUnitsGraph {
    pub fn weight(&self, s: &str, t: &str) -> Option<u64> {
        let i = self.left.iter().position(|l| l == s)?;
        let j = self.right.iter().position(|l| l == t)?;
        Some(self.weights[i][j])
    }
}

pub fn build_shared_units_graph(s: &Collection, t: &Collection) -> SharedUnitsGraph {
    let mut weights = vec![vec![0u64; t.partition.support_count()]; s.partition.support_count()];
    for i in 0..s.partition.unit_count() {
        let u = UnitId(i as u32);
        if let (Some(a), Some(b)) = (s.partition.owner(u), t.partition.owner(u)) {
            weights[a][b] += s.pop(u) + t.pop(u);
        }
    }
    SharedUnitsGraph {
        left: s.partition.labels().to_vec(),
        right: t.partition.labels().to_vec(),
        weights,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Matching {
    /// Matched `(left, right)` support indices, sorted.
    pub pairs: Vec<(usize, usize)>,
    pub weight: u64,
}

/// Exact maximum-weight matching saturating the smaller side.
pub fn max_weight_matching(graph: &SharedUnitsGraph) -> Matching {
    let (assign, weight) = max_weight_assignment(&graph.weights);
    let pairs = assign
        .iter()
        .enumerate()
        .filter_map(|(s, t)| t.map(|t| (s, t)))
        .collect();
    Matching { pairs, weight }
}

/// Groups the supports of both collections: one group per matched pair,
/// unmatched supports of the larger collection attached to the pair whose
/// partner they overlap most.
pub fn attach_unmatched(
    instance: &Instance,
    graph: &SharedUnitsGraph,
    matching: &Matching,
) -> Result<Grouping> {
    let fine = fine_labelings(instance);
    let groups = matching.pairs.len();
    let mut group_of = [vec![None; graph.left.len()], vec![None; graph.right.len()]];
    for (h, &(s, t)) in matching.pairs.iter().enumerate() {
        group_of[0][s] = Some(h);
        group_of[1][t] = Some(h);
    }
    let mut resolved = Vec::with_capacity(2);
    for c in 0..2 {
        let coll = &instance.collections()[c];
        let sg = SupportGraph::new(instance, &fine[c], coll.partition.support_count());
        let score = |s: usize, h: usize| {
            let (ms, mt) = matching.pairs[h];
            if c == 0 {
                graph.weights[s][mt]
            } else {
                graph.weights[ms][s]
            }
        };
        resolved.push(attach(
            &sg,
            &group_of[c],
            groups,
            score,
            &coll.name,
            coll.partition.labels(),
        )?);
    }
    Ok(Grouping {
        groups,
        anchor: matching.pairs.iter().map(|&(s, t)| vec![s, t]).collect(),
        group_of: resolved,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Part {
    S,
    T,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub part: Part,
    pub unit: UnitId,
    /// Population of the unit in the receiving part's collection.
    pub value: u64,
    pub sum_s: u64,
    pub sum_t: u64,
    pub part_s: Vec<UnitId>,
    pub part_t: Vec<UnitId>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PartitionTrace {
    pub steps: Vec<TraceStep>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairPartition {
    /// Units keeping the first collection's labels.
    pub part_s: Vec<UnitId>,
    /// Units keeping the second collection's labels.
    pub part_t: Vec<UnitId>,
    pub trace: PartitionTrace,
    pub contiguity_skips: usize,
    /// Moves made by [`shuffle_parts`] after the greedy pass.
    pub shuffles: usize,
}

/// Greedy balanced split of the disagreement units.
///
/// `coarse[0]` and `coarse[1]` give each unit's group under the two
/// collections. The part with the smaller running sum (ties to S) takes the
/// next unit of its own descending order; a part sums populations of its
/// own collection. A move is feasible when the labeling can still be
/// completed contiguously by giving every unassigned unit to one side.
pub fn greedy_pair_partition(
    instance: &Instance,
    coarse: &[Vec<usize>; 2],
    disagreement: &[UnitId],
) -> PairPartition {
    let cs = instance.collections();
    let pops = [&cs[0].population, &cs[1].population];
    let n = instance.unit_count();
    let mut partial: Vec<Option<usize>> = (0..n).map(|u| Some(coarse[0][u])).collect();
    for &u in disagreement {
        partial[u.index()] = None;
    }
    let witnesses = [coarse[0].clone(), coarse[1].clone()];
    let mut sums = [0u64; 2];
    let mut parts: [Vec<UnitId>; 2] = [Vec::new(), Vec::new()];
    let mut trace = PartitionTrace::default();
    let mut skips = 0;

    for comp in components(instance, disagreement) {
        let orders: [Vec<UnitId>; 2] = [0, 1].map(|side| {
            let mut o = comp.clone();
            o.sort_by_key(|u| std::cmp::Reverse(pops[side][u.index()]));
            o
        });
        let mut taken = vec![false; n];
        for _ in 0..comp.len() {
            let preferred = if sums[1] < sums[0] { 1 } else { 0 };
            let mut chosen = None;
            for side in [preferred, 1 - preferred] {
                for &u in &orders[side] {
                    if taken[u.index()] {
                        continue;
                    }
                    partial[u.index()] = Some(coarse[side][u.index()]);
                    if completion_exists(instance, &witnesses, &partial) {
                        chosen = Some((side, u));
                        break;
                    }
                    partial[u.index()] = None;
                    skips += 1;
                }
                if chosen.is_some() {
                    break;
                }
            }
            // A feasible state always admits a move for the side whose
            // completion witnesses it.
            let (side, u) = chosen.expect("greedy partition keeps a contiguous completion");
            taken[u.index()] = true;
            let value = pops[side][u.index()];
            sums[side] += value;
            parts[side].push(u);
            trace.steps.push(TraceStep {
                part: if side == 0 { Part::S } else { Part::T },
                unit: u,
                value,
                sum_s: sums[0],
                sum_t: sums[1],
                part_s: parts[0].clone(),
                part_t: parts[1].clone(),
            });
        }
    }
    let [part_s, part_t] = parts;
    PairPartition {
        part_s,
        part_t,
        trace,
        contiguity_skips: skips,
        shuffles: 0,
    }
}

/// Local repair after the greedy pass: moves a single unit, or a whole
/// connected block of disagreement units, to the other part while that
/// keeps every support contiguous and strictly lowers the larger of the two
/// costs. Returns the number of moves.
pub fn shuffle_parts(
    instance: &Instance,
    coarse: &[Vec<usize>; 2],
    partition: &mut PairPartition,
) -> usize {
    let cs = instance.collections();
    let n = instance.unit_count();
    let mut side: Vec<Option<usize>> = vec![None; n];
    for &u in &partition.part_s {
        side[u.index()] = Some(0);
    }
    for &u in &partition.part_t {
        side[u.index()] = Some(1);
    }
    let disagreement: Vec<UnitId> = instance
        .units()
        .filter(|u| side[u.index()].is_some())
        .collect();
    let mut moves: Vec<Vec<UnitId>> = components(instance, &disagreement);
    moves.extend(disagreement.iter().map(|&u| vec![u]));

    let cost = |side: &[Option<usize>]| -> u64 {
        let mut paid = [0u64; 2];
        for u in instance.units() {
            match side[u.index()] {
                Some(0) => paid[1] += cs[1].pop(u),
                Some(_) => paid[0] += cs[0].pop(u),
                None => {}
            }
        }
        paid[0].max(paid[1])
    };
    let labels = |side: &[Option<usize>]| -> Vec<usize> {
        (0..n).map(|u| coarse[side[u].unwrap_or(0)][u]).collect()
    };
    let mut current = cost(&side);
    let mut count = 0;
    // Each accepted move strictly lowers `current`.
    'search: loop {
        for block in &moves {
            for target in [0, 1] {
                if block.iter().all(|u| side[u.index()] == Some(target)) {
                    continue;
                }
                let mut trial = side.clone();
                for u in block {
                    trial[u.index()] = Some(target);
                }
                let c = cost(&trial);
                if c < current && instance.graph().labeling_is_contiguous(&labels(&trial)) {
                    side = trial;
                    current = c;
                    count += 1;
                    continue 'search;
                }
            }
        }
        break;
    }
    partition.part_s = disagreement
        .iter()
        .copied()
        .filter(|u| side[u.index()] == Some(0))
        .collect();
    partition.part_t = disagreement
        .iter()
        .copied()
        .filter(|u| side[u.index()] == Some(1))
        .collect();
    partition.shuffles = count;
    count
}

/// Quality bounds of the balanced split against the achieved objective.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    /// Larger population of every disagreement unit, sorted descending.
    pub max_values: Vec<u64>,
    pub sum_m: u64,
    pub max_m: u64,
    pub lpt_bound: f64,
    /// Best two-way split of `max_values`; absent when too large to compute.
    pub a_star: Option<u64>,
    pub list_bound: Option<f64>,
    /// Smaller population of the units in each part.
    pub min_sum_part_s: u64,
    pub min_sum_part_t: u64,
    pub achieved: u64,
    pub cost_s: u64,
    pub cost_t: u64,
    pub contiguity_skips: usize,
    pub shuffles: usize,
}

/// Subset-sum table limit for the exact two-way split.
const MAX_SPLIT_TOTAL: u64 = 1 << 26;

impl BoundReport {
    /// `achieved <= 7/6 (sum_m / 2 + max_m)`, in integers.
    pub fn within_lpt_bound(&self) -> bool {
        12 * self.achieved as u128 <= 7 * (self.sum_m as u128 + 2 * self.max_m as u128)
    }

    pub fn within_list_bound(&self) -> Option<bool> {
        self.a_star
            .map(|a| 2 * self.achieved as u128 <= 3 * a as u128)
    }
}

/// Smallest achievable larger half when splitting `values` in two.
pub fn optimal_two_way_split(values: &[u64]) -> Option<u64> {
    let total: u64 = values.iter().sum();
    if total > MAX_SPLIT_TOTAL {
        return None;
    }
    let half = (total / 2) as usize;
    let mut reach = vec![false; half + 1];
    reach[0] = true;
    for &v in values {
        let v = v as usize;
        for s in (v..=half).rev() {
            if reach[s - v] {
                reach[s] = true;
            }
        }
    }
    let best_low = (0..=half).rev().find(|&s| reach[s]).unwrap_or(0) as u64;
    Some(total - best_low)
}

#[derive(Clone, Debug)]
pub struct PairAlignment {
    pub alignment: Alignment,
    pub graph: SharedUnitsGraph,
    pub matching: Matching,
    pub partition: PairPartition,
    pub report: BoundReport,
}

pub fn align_pair(instance: &Instance) -> Result<PairAlignment> {
    let cs = instance.collections();
    if cs.len() != 2 {
        return Err(Error::CollectionCount {
            expected: "exactly 2",
            got: cs.len(),
        });
    }
    let graph = build_shared_units_graph(&cs[0], &cs[1]);
    let matching = max_weight_matching(&graph);
    let grouping = attach_unmatched(instance, &graph, &matching)?;
    let fine = fine_labelings(instance);
    let coarse = grouping.coarse(&fine);
    let coarse: [Vec<usize>; 2] = [coarse[0].clone(), coarse[1].clone()];
    let disagreement: Vec<UnitId> = instance
        .units()
        .filter(|u| coarse[0][u.index()] != coarse[1][u.index()])
        .collect();
    let mut partition = greedy_pair_partition(instance, &coarse, &disagreement);
    shuffle_parts(instance, &coarse, &mut partition);

    let mut labeling = coarse[0].clone();
    for &u in &partition.part_t {
        labeling[u.index()] = coarse[1][u.index()];
    }
    let pricing = Pricing::new(instance, &fine, &grouping);
    let refined = pricing.refine(labeling);
    let alignment = pricing.alignment(&refined)?;

    let pair_max = |u: &UnitId| cs[0].pop(*u).max(cs[1].pop(*u));
    let pair_min = |u: &UnitId| cs[0].pop(*u).min(cs[1].pop(*u));
    let mut max_values: Vec<u64> = disagreement.iter().map(pair_max).collect();
    max_values.sort_unstable_by(|a, b| b.cmp(a));
    let a_star = optimal_two_way_split(&max_values);
    let sum_m: u64 = max_values.iter().sum();
    let max_m = max_values.first().copied().unwrap_or(0);
    let report = BoundReport {
        sum_m,
        max_m,
        lpt_bound: 7.0 / 6.0 * (sum_m as f64 / 2.0 + max_m as f64),
        a_star,
        list_bound: a_star.map(|a| 1.5 * a as f64),
        min_sum_part_s: partition.part_s.iter().map(pair_min).sum(),
        min_sum_part_t: partition.part_t.iter().map(pair_min).sum(),
        achieved: alignment.objective(),
        cost_s: alignment.cost(&cs[0].name),
        cost_t: alignment.cost(&cs[1].name),
        contiguity_skips: partition.contiguity_skips,
        shuffles: partition.shuffles,
        max_values,
    };
    Ok(PairAlignment {
        alignment,
        graph,
        matching,
        partition,
        report,
    })
}
