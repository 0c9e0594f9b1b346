//! Support correspondences, the unit and weighted distances, and aligned
//! results carrying their realized costs.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{validate_partition, Collection, Instance, Partition, UnitId, Violation};

/// Maps the labels of one labeling onto the labels of another. A label
/// mapped to `None` has no partner: every unit carrying it disagrees.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelMap {
    image: BTreeMap<String, Option<String>>,
}

impl LabelMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fails if two source labels share a target.
    pub fn from_pairs(
        collection: &str,
        pairs: impl IntoIterator<Item = (String, Option<String>)>,
    ) -> Result<Self> {
        let mut map = Self::new();
        let mut hit = BTreeSet::new();
        for (src, dst) in pairs {
            if let Some(d) = &dst {
                if !hit.insert(d.clone()) {
                    return Err(Error::NonInjective {
                        collection: collection.to_string(),
                        target: d.clone(),
                    });
                }
            }
            map.image.insert(src, dst);
        }
        Ok(map)
    }

    /// Identity on the labels of `p`.
    pub fn identity(p: &Partition) -> Self {
        Self {
            image: p
                .labels()
                .iter()
                .map(|l| (l.clone(), Some(l.clone())))
                .collect(),
        }
    }

    pub fn get(&self, label: &str) -> Option<&Option<String>> {
        self.image.get(label)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Option<&str>)> {
        self.image.iter().map(|(k, v)| (k.as_str(), v.as_deref()))
    }

    /// Inverse map onto `source`'s labels; labels of `target` that are not
    /// hit map to `None`.
    pub fn inverse(&self, target: &Partition) -> Self {
        let mut image: BTreeMap<String, Option<String>> =
            target.labels().iter().map(|l| (l.clone(), None)).collect();
        for (src, dst) in &self.image {
            if let Some(d) = dst {
                image.insert(d.clone(), Some(src.clone()));
            }
        }
        Self { image }
    }

    /// Resolves every label of `p` to an index into `target`'s labels.
    /// `None` means no partner (or a partner absent from `target`).
    pub(crate) fn resolve(
        &self,
        collection: &str,
        p: &Partition,
        target: &Partition,
    ) -> Result<Vec<Option<usize>>> {
        p.labels()
            .iter()
            .map(|l| match self.image.get(l) {
                None => Err(Error::IncompleteCorrespondence {
                    collection: collection.to_string(),
                    label: l.clone(),
                }),
                Some(None) => Ok(None),
                Some(Some(d)) => Ok(target.label_index(d)),
            })
            .collect()
    }
}

/// One [`LabelMap`] per input collection, keyed by collection name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Correspondence {
    maps: BTreeMap<String, LabelMap>,
}

impl Correspondence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, collection: impl Into<String>, map: LabelMap) {
        self.maps.insert(collection.into(), map);
    }

    pub fn get(&self, collection: &str) -> Result<&LabelMap> {
        self.maps
            .get(collection)
            .ok_or_else(|| Error::UnknownCollection(collection.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &LabelMap)> {
        self.maps.iter().map(|(k, v)| (k.as_str(), v))
    }
}

/// Units `u` with `map(label_a(u)) != label_b(u)`.
pub fn disagreement_set(a: &Partition, b: &Partition, map: &LabelMap) -> Result<BTreeSet<UnitId>> {
    let resolved = map.resolve("", a, b)?;
    let mut out = BTreeSet::new();
    for i in 0..a.unit_count() {
        let u = UnitId(i as u32);
        let la = a.owner(u).and_then(|l| resolved[l]);
        if la.is_none() || la != b.owner(u) {
            out.insert(u);
        }
    }
    Ok(out)
}

/// Number of units on which the two labelings disagree.
pub fn unit_distance(a: &Partition, b: &Partition, map: &LabelMap) -> Result<usize> {
    Ok(disagreement_set(a, b, map)?.len())
}

/// Total population, in `c`, of the units that must be swapped to turn
/// `c` into `target`. Not symmetric.
pub fn weighted_distance(c: &Collection, target: &Partition, map: &LabelMap) -> Result<u64> {
    let resolved = map.resolve(&c.name, &c.partition, target)?;
    let mut total = 0;
    for i in 0..c.partition.unit_count() {
        let u = UnitId(i as u32);
        let mapped = c.partition.owner(u).and_then(|l| resolved[l]);
        if mapped.is_none() || mapped != target.owner(u) {
            total += c.pop(u);
        }
    }
    Ok(total)
}

/// A candidate alignment with its per-collection costs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alignment {
    pub result: Partition,
    pub correspondence: Correspondence,
    pub costs: BTreeMap<String, u64>,
}

impl Alignment {
    /// Computes the cost of every collection from scratch.
    pub fn new(
        instance: &Instance,
        result: Partition,
        correspondence: Correspondence,
    ) -> Result<Self> {
        let mut costs = BTreeMap::new();
        for c in instance.collections() {
            let map = correspondence.get(&c.name)?;
            costs.insert(c.name.clone(), weighted_distance(c, &result, map)?);
        }
        Ok(Self {
            result,
            correspondence,
            costs,
        })
    }

    /// Largest per-collection cost.
    pub fn objective(&self) -> u64 {
        self.costs.values().copied().max().unwrap_or(0)
    }

    /// Sum of per-collection costs.
    pub fn total_cost(&self) -> u64 {
        self.costs.values().sum()
    }

    pub fn cost(&self, collection: &str) -> u64 {
        self.costs.get(collection).copied().unwrap_or(0)
    }
}

/// Max over collections of the weighted distance to `alignment.result`,
/// recomputed rather than read from the cached costs.
pub fn objective(instance: &Instance, alignment: &Alignment) -> Result<u64> {
    let mut best = 0;
    for c in instance.collections() {
        let map = alignment.correspondence.get(&c.name)?;
        best = best.max(weighted_distance(c, &alignment.result, map)?);
    }
    Ok(best)
}

/// Partition checks on the result plus consistency of the cached costs.
pub fn validate_alignment(instance: &Instance, alignment: &Alignment) -> Vec<String> {
    let mut out: Vec<String> = validate_partition(instance, "alignment", &alignment.result)
        .into_iter()
        .map(|v: Violation| v.to_string())
        .collect();
    for c in instance.collections() {
        let map = match alignment.correspondence.get(&c.name) {
            Ok(m) => m,
            Err(e) => {
                out.push(e.to_string());
                continue;
            }
        };
        let mut hit = BTreeSet::new();
        for (_, dst) in map.iter() {
            if let Some(d) = dst {
                if !hit.insert(d) {
                    out.push(format!("{}: correspondence hits `{d}` twice", c.name));
                }
            }
        }
        match weighted_distance(c, &alignment.result, map) {
            Ok(cost) if Some(&cost) == alignment.costs.get(&c.name) => {}
            Ok(cost) => out.push(format!(
                "{}: cached cost {:?} != recomputed {cost}",
                c.name,
                alignment.costs.get(&c.name)
            )),
            Err(e) => out.push(e.to_string()),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(spec: &[(&str, &[u32])]) -> Partition {
        let n = spec.iter().map(|(_, u)| u.len()).sum();
        Partition::new(
            n,
            spec.iter()
                .map(|(l, us)| (l.to_string(), us.iter().copied().map(UnitId).collect())),
        )
    }

    #[test]
    fn identity_distance_is_zero() {
        let p = part(&[("a", &[0, 1]), ("b", &[2])]);
        let m = LabelMap::identity(&p);
        assert!(disagreement_set(&p, &p, &m).unwrap().is_empty());
    }

    #[test]
    fn missing_label_is_incomplete() {
        let p = part(&[("a", &[0, 1]), ("b", &[2])]);
        let m = LabelMap::from_pairs("C", [("a".to_string(), Some("a".to_string()))]).unwrap();
        assert!(matches!(
            disagreement_set(&p, &p, &m),
            Err(Error::IncompleteCorrespondence { .. })
        ));
    }

    #[test]
    fn unmatched_label_costs_everything() {
        let p = part(&[("a", &[0, 1]), ("b", &[2])]);
        let m = LabelMap::from_pairs(
            "C",
            [
                ("a".to_string(), Some("a".to_string())),
                ("b".to_string(), None),
            ],
        )
        .unwrap();
        let set = disagreement_set(&p, &p, &m).unwrap();
        assert_eq!(set.into_iter().collect::<Vec<_>>(), vec![UnitId(2)]);
    }

    #[test]
    fn non_injective_rejected() {
        let r = LabelMap::from_pairs(
            "C",
            [
                ("a".to_string(), Some("x".to_string())),
                ("b".to_string(), Some("x".to_string())),
            ],
        );
        assert!(matches!(r, Err(Error::NonInjective { .. })));
    }
}
