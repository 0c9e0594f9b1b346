//! Units, adjacency, collections of supports, and instance validation.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Index of a spatial unit inside an [`Instance`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(transparent)]
pub struct UnitId(pub u32);

impl UnitId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Undirected adjacency between units. Contiguity of a support means its
/// units induce a connected subgraph here.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyGraph {
    neighbors: Vec<Vec<UnitId>>,
}

impl AdjacencyGraph {
    /// Builds a graph on `n` units. Duplicate edges collapse; self-loops are
    /// rejected by the caller's naming layer, here they panic.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (UnitId, UnitId)>) -> Self {
        let mut neighbors = vec![Vec::new(); n];
        for (a, b) in edges {
            assert_ne!(a, b, "self-loop");
            neighbors[a.index()].push(b);
            neighbors[b.index()].push(a);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Self { neighbors }
    }

    /// 4-neighbourhood grid, units numbered row-major from the lower-left
    /// corner: index = (y-1)*width + (x-1).
    pub fn grid(width: usize, height: usize) -> Self {
        let id = |x: usize, y: usize| UnitId((y * width + x) as u32);
        let mut edges = Vec::new();
        for y in 0..height {
            for x in 0..width {
                if x + 1 < width {
                    edges.push((id(x, y), id(x + 1, y)));
                }
                if y + 1 < height {
                    edges.push((id(x, y), id(x, y + 1)));
                }
            }
        }
        Self::new(width * height, edges)
    }

    pub fn unit_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, u: UnitId) -> &[UnitId] {
        &self.neighbors[u.index()]
    }

    pub fn is_adjacent(&self, a: UnitId, b: UnitId) -> bool {
        self.neighbors[a.index()].binary_search(&b).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges as ordered pairs `(a, b)` with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (UnitId, UnitId)> + '_ {
        self.neighbors.iter().enumerate().flat_map(|(a, list)| {
            let a = UnitId(a as u32);
            list.iter().filter(move |&&b| a < b).map(move |&b| (a, b))
        })
    }

    /// Number of connected components of the subgraph induced by `members`.
    pub fn component_count(&self, members: &[UnitId]) -> usize {
        let mut inside = vec![false; self.unit_count()];
        for &u in members {
            inside[u.index()] = true;
        }
        self.count_components(&mut inside, members)
    }

    /// True when every unit carrying the same label lies in one component.
    /// `labels[u] == usize::MAX` marks a unit ignored by the check.
    pub fn labeling_is_contiguous(&self, labels: &[usize]) -> bool {
        let n = labels.len();
        let mut seen = vec![false; n];
        let mut label_seen = HashMap::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            let l = labels[start];
            if l == usize::MAX || seen[start] {
                continue;
            }
            if label_seen.insert(l, ()).is_some() {
                return false;
            }
            seen[start] = true;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &w in &self.neighbors[v] {
                    let w = w.index();
                    if !seen[w] && labels[w] == l {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        true
    }

    fn count_components(&self, inside: &mut [bool], members: &[UnitId]) -> usize {
        let mut count = 0;
        let mut stack = Vec::new();
        for &start in members {
            if !inside[start.index()] {
                continue;
            }
            count += 1;
            inside[start.index()] = false;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for &w in self.neighbors(v) {
                    if inside[w.index()] {
                        inside[w.index()] = false;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }
}

/// How units are placed on screen, when known.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    Grid { width: usize, height: usize },
    Explicit,
}

/// An assignment of units to labelled supports. Built from `(label, units)`
/// lists so that overlaps and holes survive until [`validate`] reports them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<String>,
    members: Vec<Vec<UnitId>>,
    owner: Vec<Option<u32>>,
    overlaps: Vec<(UnitId, usize, usize)>,
}

impl Partition {
    /// `n` is the number of units in the universe. Labels are kept sorted.
    pub fn new(n: usize, supports: impl IntoIterator<Item = (String, Vec<UnitId>)>) -> Self {
        let mut merged: BTreeMap<String, Vec<UnitId>> = BTreeMap::new();
        for (label, units) in supports {
            merged.entry(label).or_default().extend(units);
        }
        let mut labels = Vec::with_capacity(merged.len());
        let mut members = Vec::with_capacity(merged.len());
        for (label, mut units) in merged {
            units.sort_unstable();
            units.dedup();
            labels.push(label);
            members.push(units);
        }
        let mut owner = vec![None; n];
        let mut overlaps = Vec::new();
        for (i, units) in members.iter().enumerate() {
            for &u in units {
                match owner[u.index()] {
                    None => owner[u.index()] = Some(i as u32),
                    Some(prev) => overlaps.push((u, prev as usize, i)),
                }
            }
        }
        Self {
            labels,
            members,
            owner,
            overlaps,
        }
    }

    /// Builds a partition from a dense labeling; empty labels are dropped.
    pub fn from_labeling(labels: &[String], assignment: &[usize]) -> Self {
        let mut buckets = vec![Vec::new(); labels.len()];
        for (u, &l) in assignment.iter().enumerate() {
            buckets[l].push(UnitId(u as u32));
        }
        Self::new(
            assignment.len(),
            labels
                .iter()
                .cloned()
                .zip(buckets)
                .filter(|(_, units)| !units.is_empty()),
        )
    }

    pub fn unit_count(&self) -> usize {
        self.owner.len()
    }

    pub fn support_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.binary_search_by(|l| l.as_str().cmp(label)).ok()
    }

    pub fn members(&self, i: usize) -> &[UnitId] {
        &self.members[i]
    }

    /// Support index of `u`, if covered.
    pub fn owner(&self, u: UnitId) -> Option<usize> {
        self.owner[u.index()].map(|x| x as usize)
    }

    pub fn label_of(&self, u: UnitId) -> Option<&str> {
        self.owner(u).map(|i| self.labels[i].as_str())
    }

    /// Dense label indices. Panics on uncovered units; call on validated
    /// partitions only.
    pub fn labeling(&self) -> Vec<usize> {
        self.owner
            .iter()
            .enumerate()
            .map(|(u, o)| o.unwrap_or_else(|| panic!("unit {u} uncovered")) as usize)
            .collect()
    }

    pub fn supports(&self) -> impl Iterator<Item = (&str, &[UnitId])> {
        self.labels
            .iter()
            .map(String::as_str)
            .zip(self.members.iter().map(Vec::as_slice))
    }
}

/// One collection of supports together with its population function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Collection {
    pub name: String,
    pub partition: Partition,
    pub population: Vec<u64>,
}

impl Collection {
    pub fn pop(&self, u: UnitId) -> u64 {
        self.population[u.index()]
    }

    pub fn total_population(&self) -> u64 {
        self.population.iter().sum()
    }
}

/// Units, adjacency and the input collections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    unit_names: Vec<String>,
    unit_index: HashMap<String, UnitId>,
    graph: AdjacencyGraph,
    collections: Vec<Collection>,
    layout: Layout,
}

impl Instance {
    pub fn new(
        unit_names: Vec<String>,
        graph: AdjacencyGraph,
        collections: Vec<Collection>,
        layout: Layout,
    ) -> Result<Self> {
        let mut unit_index = HashMap::with_capacity(unit_names.len());
        for (i, name) in unit_names.iter().enumerate() {
            if unit_index.insert(name.clone(), UnitId(i as u32)).is_some() {
                return Err(Error::DuplicateUnit(name.clone()));
            }
        }
        assert_eq!(graph.unit_count(), unit_names.len());
        Ok(Self {
            unit_names,
            unit_index,
            graph,
            collections,
            layout,
        })
    }

    /// Grid instance with units named `u<x>_<y>`.
    pub fn grid_unit_names(width: usize, height: usize) -> Vec<String> {
        let mut names = Vec::with_capacity(width * height);
        for y in 1..=height {
            for x in 1..=width {
                names.push(format!("u{x}_{y}"));
            }
        }
        names
    }

    pub fn unit_count(&self) -> usize {
        self.unit_names.len()
    }

    pub fn units(&self) -> impl Iterator<Item = UnitId> {
        (0..self.unit_names.len() as u32).map(UnitId)
    }

    pub fn unit_name(&self, u: UnitId) -> &str {
        &self.unit_names[u.index()]
    }

    pub fn unit_names(&self) -> &[String] {
        &self.unit_names
    }

    pub fn unit(&self, name: &str) -> Result<UnitId> {
        self.unit_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownUnit(name.to_string()))
    }

    pub fn graph(&self) -> &AdjacencyGraph {
        &self.graph
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn collections(&self) -> &[Collection] {
        &self.collections
    }

    pub fn collection(&self, name: &str) -> Result<&Collection> {
        self.collections
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownCollection(name.to_string()))
    }

    /// Same units and adjacency, different collections.
    pub fn with_collections(&self, collections: Vec<Collection>) -> Self {
        Self {
            collections,
            ..self.clone()
        }
    }

    /// Fails with every violation found.
    pub fn validated(self) -> Result<Self> {
        let v = validate(&self);
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::Invalid(v))
        }
    }
}

/// A failed partition property, naming where it failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoCollections,
    DuplicateCollection {
        collection: String,
    },
    /// Property (c): a unit belongs to no support.
    Uncovered {
        collection: String,
        unit: String,
    },
    /// Property (b): a unit belongs to two supports.
    Overlap {
        collection: String,
        unit: String,
        labels: (String, String),
    },
    EmptySupport {
        collection: String,
        label: String,
    },
    /// Contiguity: the support induces `components` > 1 pieces.
    Disconnected {
        collection: String,
        label: String,
        components: usize,
    },
    /// Populations must be at least 1.
    NonPositivePopulation {
        collection: String,
        unit: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoCollections => write!(f, "instance has no collections"),
            Violation::DuplicateCollection { collection } => {
                write!(f, "{collection}: duplicate collection name")
            }
            Violation::Uncovered { collection, unit } => {
                write!(
                    f,
                    "{collection}: cover violated, unit {unit} has no support"
                )
            }
            Violation::Overlap {
                collection,
                unit,
                labels,
            } => write!(
                f,
                "{collection}: disjointness violated, unit {unit} in both {} and {}",
                labels.0, labels.1
            ),
            Violation::EmptySupport { collection, label } => {
                write!(f, "{collection}/{label}: support is empty")
            }
            Violation::Disconnected {
                collection,
                label,
                components,
            } => write!(
                f,
                "{collection}/{label}: contiguity violated, {components} components"
            ),
            Violation::NonPositivePopulation { collection, unit } => {
                write!(f, "{collection}: population of {unit} must be >= 1")
            }
        }
    }
}

/// Every contiguity and partition violation of every collection.
pub fn validate(instance: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    if instance.collections.is_empty() {
        out.push(Violation::NoCollections);
    }
    let mut names = std::collections::BTreeSet::new();
    for c in &instance.collections {
        if !names.insert(c.name.as_str()) {
            out.push(Violation::DuplicateCollection {
                collection: c.name.clone(),
            });
        }
        out.extend(validate_partition(instance, &c.name, &c.partition));
        for u in instance.units() {
            if c.population.get(u.index()).copied().unwrap_or(0) == 0 {
                out.push(Violation::NonPositivePopulation {
                    collection: c.name.clone(),
                    unit: instance.unit_name(u).to_string(),
                });
            }
        }
    }
    out
}

/// Partition properties (a)-(c) plus contiguity for a single labeling.
pub fn validate_partition(instance: &Instance, name: &str, p: &Partition) -> Vec<Violation> {
    let mut out = Vec::new();
    for u in instance.units() {
        if p.owner(u).is_none() {
            out.push(Violation::Uncovered {
                collection: name.to_string(),
                unit: instance.unit_name(u).to_string(),
            });
        }
    }
    for &(u, a, b) in &p.overlaps {
        out.push(Violation::Overlap {
            collection: name.to_string(),
            unit: instance.unit_name(u).to_string(),
            labels: (p.labels[a].clone(), p.labels[b].clone()),
        });
    }
    for (i, label) in p.labels.iter().enumerate() {
        let members = &p.members[i];
        if members.is_empty() {
            out.push(Violation::EmptySupport {
                collection: name.to_string(),
                label: label.clone(),
            });
            continue;
        }
        let components = instance.graph.component_count(members);
        if components > 1 {
            out.push(Violation::Disconnected {
                collection: name.to_string(),
                label: label.clone(),
                components,
            });
        }
    }
    out
}
