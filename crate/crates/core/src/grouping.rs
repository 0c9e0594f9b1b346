//! Support groups shared by the pair and multi-collection heuristics.
//!
//! A matching picks one anchor support per collection for every group.
//! Supports left over (collections with more supports than the smallest
//! one) are attached to a group so that the group stays a contiguous set of
//! supports in their own collection. Trading then happens on the coarse
//! labeling where every unit carries its support's group, and attached
//! supports may finally be carved back out of their group's region.

use crate::distance::{Alignment, Correspondence, LabelMap};
use crate::error::{Error, Result};
use crate::model::{Instance, Partition, UnitId};

/// Largest number of unmatched supports per collection tried exhaustively.
pub const MAX_SURPLUS: usize = 6;

/// Units with alternatives inside one group region up to which every
/// carving is enumerated.
const MAX_REFINE_UNITS: usize = 12;

/// Adjacency between the supports of one collection.
#[derive(Clone, Debug)]
pub struct SupportGraph {
    adjacent: Vec<Vec<bool>>,
}

impl SupportGraph {
    pub fn new(instance: &Instance, labeling: &[usize], supports: usize) -> Self {
        let mut adjacent = vec![vec![false; supports]; supports];
        for (a, b) in instance.graph().edges() {
            let (la, lb) = (labeling[a.index()], labeling[b.index()]);
            if la != lb {
                adjacent[la][lb] = true;
                adjacent[lb][la] = true;
            }
        }
        Self { adjacent }
    }

    /// True when `set` induces a connected subgraph.
    pub fn is_connected(&self, set: &[usize]) -> bool {
        let Some(&start) = set.first() else {
            return true;
        };
        let mut seen = vec![start];
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in set {
                if !seen.contains(&w) && self.adjacent[v][w] {
                    seen.push(w);
                    stack.push(w);
                }
            }
        }
        seen.len() == set.len()
    }
}

/// Assigns every unmatched support to a group, maximising the summed
/// `score` subject to each group being connected in `graph`.
///
/// `anchors[s]` is the group of a matched support. Exhaustive over all
/// assignments; ties go to the lexicographically smallest one.
pub fn attach(
    graph: &SupportGraph,
    anchors: &[Option<usize>],
    groups: usize,
    score: impl Fn(usize, usize) -> u64,
    collection: &str,
    labels: &[String],
) -> Result<Vec<usize>> {
    let unmatched: Vec<usize> = (0..anchors.len())
        .filter(|&s| anchors[s].is_none())
        .collect();
    if unmatched.len() > MAX_SURPLUS {
        return Err(Error::SurplusTooLarge {
            surplus: unmatched.len(),
            limit: MAX_SURPLUS,
        });
    }
    let base: Vec<usize> = anchors.iter().map(|a| a.unwrap_or(usize::MAX)).collect();
    if unmatched.is_empty() {
        return Ok(base);
    }
    if groups == 0 {
        return Err(Error::Unattachable {
            collection: collection.to_string(),
            label: labels[unmatched[0]].clone(),
        });
    }
    let mut choice = vec![0usize; unmatched.len()];
    let mut best: Option<(u64, Vec<usize>)> = None;
    loop {
        let mut assign = base.clone();
        for (i, &s) in unmatched.iter().enumerate() {
            assign[s] = choice[i];
        }
        let touched =
            |h: usize| -> Vec<usize> { (0..assign.len()).filter(|&s| assign[s] == h).collect() };
        let feasible = choice.iter().all(|&h| graph.is_connected(&touched(h)));
        if feasible {
            let total: u64 = unmatched
                .iter()
                .zip(&choice)
                .map(|(&s, &h)| score(s, h))
                .sum();
            if best.as_ref().is_none_or(|(b, _)| total > *b) {
                best = Some((total, assign));
            }
        }
        // Odometer, last digit fastest for lexicographic order.
        let mut i = choice.len();
        loop {
            if i == 0 {
                return best.map(|(_, a)| a).ok_or_else(|| Error::Unattachable {
                    collection: collection.to_string(),
                    label: labels[unmatched[0]].clone(),
                });
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < groups {
                break;
            }
            choice[i] = 0;
        }
    }
}

/// Groups of supports across all collections.
#[derive(Clone, Debug)]
pub struct Grouping {
    pub groups: usize,
    /// `group_of[c][s]`: group of support `s` of collection `c`.
    pub group_of: Vec<Vec<usize>>,
    /// `anchor[h][c]`: matched support of collection `c` in group `h`.
    pub anchor: Vec<Vec<usize>>,
}

impl Grouping {
    /// Group id of every unit, per collection.
    pub fn coarse(&self, fine: &[Vec<usize>]) -> Vec<Vec<usize>> {
        fine.iter()
            .enumerate()
            .map(|(c, labels)| labels.iter().map(|&s| self.group_of[c][s]).collect())
            .collect()
    }

    pub fn is_anchor(&self, c: usize, s: usize) -> bool {
        self.anchor[self.group_of[c][s]][c] == s
    }

    pub fn has_attachments(&self) -> bool {
        self.group_of
            .iter()
            .enumerate()
            .any(|(c, g)| (0..g.len()).any(|s| !self.is_anchor(c, s)))
    }
}

/// Final labeling: ids below `groups` are group regions, the rest index
/// `pieces`, attached supports carved out of their group.
#[derive(Clone, Debug)]
pub struct Refined {
    pub labeling: Vec<usize>,
    pub pieces: Vec<(usize, usize)>,
}

/// Dense view of the fine labelings with the data needed for pricing.
pub struct Pricing<'a> {
    pub instance: &'a Instance,
    pub fine: &'a [Vec<usize>],
    pub grouping: &'a Grouping,
    pub pieces: Vec<(usize, usize)>,
}

impl<'a> Pricing<'a> {
    pub fn new(instance: &'a Instance, fine: &'a [Vec<usize>], grouping: &'a Grouping) -> Self {
        let mut pieces = Vec::new();
        for (c, groups) in grouping.group_of.iter().enumerate() {
            for s in 0..groups.len() {
                if !grouping.is_anchor(c, s) {
                    pieces.push((c, s));
                }
            }
        }
        Self {
            instance,
            fine,
            grouping,
            pieces,
        }
    }

    fn piece_id(&self, c: usize, s: usize) -> Option<usize> {
        self.pieces
            .iter()
            .position(|&p| p == (c, s))
            .map(|i| self.grouping.groups + i)
    }

    /// Image of every support of every collection in the label space of
    /// `labeling`: anchors map to their group, attached supports to their
    /// piece when it occurs.
    fn images(&self, labeling: &[usize]) -> Vec<Vec<Option<usize>>> {
        let mut present = vec![false; self.grouping.groups + self.pieces.len()];
        for &l in labeling {
            present[l] = true;
        }
        self.grouping
            .group_of
            .iter()
            .enumerate()
            .map(|(c, groups)| {
                (0..groups.len())
                    .map(|s| {
                        if self.grouping.is_anchor(c, s) {
                            Some(groups[s]).filter(|&h| present[h])
                        } else {
                            self.piece_id(c, s).filter(|&p| present[p])
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn costs(&self, labeling: &[usize]) -> Vec<u64> {
        let images = self.images(labeling);
        self.instance
            .collections()
            .iter()
            .enumerate()
            .map(|(c, coll)| {
                labeling
                    .iter()
                    .enumerate()
                    .filter(|&(u, &l)| images[c][self.fine[c][u]] != Some(l))
                    .map(|(u, _)| coll.population[u])
                    .sum()
            })
            .collect()
    }

    /// Carves attached supports out of each group region where that lowers
    /// the objective, keeping every support contiguous.
    pub fn refine(&self, coarse_alignment: Vec<usize>) -> Refined {
        let mut labeling = coarse_alignment;
        if !self.grouping.has_attachments() {
            return Refined {
                labeling,
                pieces: self.pieces.clone(),
            };
        }
        for h in 0..self.grouping.groups {
            let region: Vec<usize> = (0..labeling.len()).filter(|&u| labeling[u] == h).collect();
            let options: Vec<(usize, Vec<usize>)> = region
                .iter()
                .filter_map(|&u| {
                    let mut opts = vec![h];
                    for c in 0..self.fine.len() {
                        let s = self.fine[c][u];
                        if self.grouping.group_of[c][s] == h && !self.grouping.is_anchor(c, s) {
                            opts.push(self.piece_id(c, s).expect("attached support has a piece"));
                        }
                    }
                    (opts.len() > 1).then_some((u, opts))
                })
                .collect();
            if options.is_empty() {
                continue;
            }
            let graph = self.instance.graph();
            let mut best = (
                self.costs(&labeling).into_iter().max().unwrap_or(0),
                labeling.clone(),
            );
            let consider = |candidate: &Vec<usize>, best: &mut (u64, Vec<usize>)| {
                if graph.labeling_is_contiguous(candidate) {
                    let obj = self.costs(candidate).into_iter().max().unwrap_or(0);
                    if obj < best.0 {
                        *best = (obj, candidate.clone());
                    }
                }
            };
            if options.len() <= MAX_REFINE_UNITS {
                let mut digits = vec![0usize; options.len()];
                let mut candidate = labeling.clone();
                'odometer: loop {
                    consider(&candidate, &mut best);
                    let mut i = options.len();
                    loop {
                        if i == 0 {
                            break 'odometer;
                        }
                        i -= 1;
                        let (u, opts) = &options[i];
                        digits[i] += 1;
                        if digits[i] < opts.len() {
                            candidate[*u] = opts[digits[i]];
                            break;
                        }
                        digits[i] = 0;
                        candidate[*u] = h;
                    }
                }
            } else {
                // Whole-support carving only.
                let mut pieces: Vec<usize> =
                    options.iter().flat_map(|(_, o)| o[1..].to_vec()).collect();
                pieces.sort_unstable();
                pieces.dedup();
                let pieces = &pieces[..pieces.len().min(MAX_REFINE_UNITS)];
                for mask in 1u32..(1 << pieces.len()) {
                    let mut candidate = labeling.clone();
                    for (u, opts) in &options {
                        if let Some(&p) = opts[1..].iter().find(|p| {
                            pieces
                                .iter()
                                .position(|q| q == *p)
                                .is_some_and(|i| mask & (1 << i) != 0)
                        }) {
                            candidate[*u] = p;
                        }
                    }
                    consider(&candidate, &mut best);
                }
            }
            labeling = best.1;
        }
        Refined {
            labeling,
            pieces: self.pieces.clone(),
        }
    }

    /// Names group regions after the first collection's anchor labels and
    /// pieces `<collection>:<label>`; builds the correspondence.
    pub fn alignment(&self, refined: &Refined) -> Result<Alignment> {
        let collections = self.instance.collections();
        let first = &collections[0].partition;
        let mut names: Vec<String> = (0..self.grouping.groups)
            .map(|h| first.label(self.grouping.anchor[h][0]).to_string())
            .collect();
        for &(c, s) in &refined.pieces {
            let mut name = format!(
                "{}:{}",
                collections[c].name,
                collections[c].partition.label(s)
            );
            while names.contains(&name) {
                name.push('\'');
            }
            names.push(name);
        }
        let result = Partition::from_labeling(&names, &refined.labeling);
        let images = self.images(&refined.labeling);
        let mut corr = Correspondence::new();
        for (c, coll) in collections.iter().enumerate() {
            let pairs = coll
                .partition
                .labels()
                .iter()
                .enumerate()
                .map(|(s, l)| (l.clone(), images[c][s].map(|i| names[i].clone())));
            corr.insert(coll.name.clone(), LabelMap::from_pairs(&coll.name, pairs)?);
        }
        Alignment::new(self.instance, result, corr)
    }
}

/// Feasibility of a partially assigned labeling: some collection's coarse
/// labels, used for every still unassigned unit, leave all supports
/// contiguous. Assigning a unit to that same collection keeps the witness,
/// so a feasible state always has a feasible move.
pub fn completion_exists(
    instance: &Instance,
    coarse: &[Vec<usize>],
    partial: &[Option<usize>],
) -> bool {
    let mut labels = vec![0usize; partial.len()];
    coarse.iter().any(|fill| {
        for (u, p) in partial.iter().enumerate() {
            labels[u] = p.unwrap_or(fill[u]);
        }
        instance.graph().labeling_is_contiguous(&labels)
    })
}

/// Fine label indices of every collection.
pub fn fine_labelings(instance: &Instance) -> Vec<Vec<usize>> {
    instance
        .collections()
        .iter()
        .map(|c| c.partition.labeling())
        .collect()
}

/// `sum_{u in s cap t} (p_a(u) + p_b(u))` for every support pair.
pub fn overlap_weights(
    instance: &Instance,
    a: usize,
    b: usize,
    fine: &[Vec<usize>],
) -> Vec<Vec<u64>> {
    let cs = instance.collections();
    let mut w = vec![vec![0u64; cs[b].partition.support_count()]; cs[a].partition.support_count()];
    for u in instance.units() {
        let i = u.index();
        w[fine[a][i]][fine[b][i]] += cs[a].pop(u) + cs[b].pop(u);
    }
    w
}

/// Connected components of `units` in the adjacency graph, each sorted,
/// ordered by smallest unit.
pub fn components(instance: &Instance, units: &[UnitId]) -> Vec<Vec<UnitId>> {
    let mut inside = vec![false; instance.unit_count()];
    for &u in units {
        inside[u.index()] = true;
    }
    let mut out = Vec::new();
    let mut sorted = units.to_vec();
    sorted.sort_unstable();
    for &start in &sorted {
        if !inside[start.index()] {
            continue;
        }
        inside[start.index()] = false;
        let mut comp = vec![start];
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in instance.graph().neighbors(v) {
                if inside[w.index()] {
                    inside[w.index()] = false;
                    comp.push(w);
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}
