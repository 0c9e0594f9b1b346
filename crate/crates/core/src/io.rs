//! JSON instance and alignment formats.
//!
//! ```json
//! { "units": ["u1_1", ...],
//!   "adjacency": [["u1_1","u2_1"], ...]  |  {"grid": [w, h]},
//!   "collections": [ { "name": "S",
//!                      "supports": { "s1": ["u1_1", ...] },
//!                      "populations": { "u1_1": 20, ... } } ] }
//! ```
//!
//! The grid shorthand expands to a 4-neighbourhood with units `u<x>_<y>`,
//! 1-based, row-major from the lower-left corner.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distance::{Alignment, Correspondence, LabelMap};
use crate::error::{Error, Result};
use crate::model::{AdjacencyGraph, Collection, Instance, Layout, Partition, UnitId};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    units: Option<Vec<String>>,
    adjacency: AdjacencyFile,
    collections: Vec<CollectionFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum AdjacencyFile {
    Grid { grid: [usize; 2] },
    Edges(Vec<[String; 2]>),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CollectionFile {
    name: String,
    supports: BTreeMap<String, Vec<String>>,
    populations: BTreeMap<String, u64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct AlignmentFile {
    #[serde(default = "default_alignment_name")]
    name: String,
    supports: BTreeMap<String, Vec<String>>,
    correspondence: BTreeMap<String, BTreeMap<String, Option<String>>>,
    #[serde(default)]
    costs: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    objective: Option<u64>,
}

fn default_alignment_name() -> String {
    "A".to_string()
}

/// Largest grid side accepted by the shorthand.
const MAX_GRID_UNITS: usize = 1 << 20;

/// Parses without running validation. Structural errors (unknown units,
/// self-loops, malformed JSON) still fail.
pub fn parse_instance_unchecked(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text)?;
    let (names, graph, layout) = match &file.adjacency {
        AdjacencyFile::Grid { grid: [w, h] } => {
            let (w, h) = (*w, *h);
            if w == 0 || h == 0 || w.checked_mul(h).is_none_or(|n| n > MAX_GRID_UNITS) {
                return Err(Error::Parse(format!("bad grid dimensions {w}x{h}")));
            }
            let names = Instance::grid_unit_names(w, h);
            if let Some(listed) = &file.units {
                let mut a = listed.clone();
                let mut b = names.clone();
                a.sort();
                b.sort();
                if a != b {
                    return Err(Error::Parse(
                        "units list does not match grid shorthand".into(),
                    ));
                }
            }
            (
                names,
                AdjacencyGraph::grid(w, h),
                Layout::Grid {
                    width: w,
                    height: h,
                },
            )
        }
        AdjacencyFile::Edges(edges) => {
            let names = file
                .units
                .clone()
                .ok_or_else(|| Error::Parse("missing `units`".into()))?;
            let index = name_index(&names)?;
            let mut pairs = Vec::with_capacity(edges.len());
            for [a, b] in edges {
                let ia = lookup(&index, a)?;
                let ib = lookup(&index, b)?;
                if ia == ib {
                    return Err(Error::SelfLoop(a.clone()));
                }
                pairs.push((ia, ib));
            }
            let graph = AdjacencyGraph::new(names.len(), pairs);
            (names, graph, Layout::Explicit)
        }
    };
    let index = name_index(&names)?;
    let n = names.len();
    let mut collections = Vec::with_capacity(file.collections.len());
    for c in file.collections {
        collections.push(Collection {
            partition: partition_from_file(&index, n, &c.supports)?,
            population: {
                let mut pop = vec![0; n];
                for (unit, &p) in &c.populations {
                    pop[lookup(&index, unit)?.index()] = p;
                }
                pop
            },
            name: c.name,
        });
    }
    Instance::new(names, graph, collections, layout)
}

/// Parses and validates.
pub fn parse_instance(text: &str) -> Result<Instance> {
    parse_instance_unchecked(text)?.validated()
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn instance_to_json(instance: &Instance) -> serde_json::Value {
    let adjacency = match instance.layout() {
        Layout::Grid { width, height } => AdjacencyFile::Grid {
            grid: [width, height],
        },
        Layout::Explicit => AdjacencyFile::Edges(
            instance
                .graph()
                .edges()
                .map(|(a, b)| {
                    [
                        instance.unit_name(a).to_string(),
                        instance.unit_name(b).to_string(),
                    ]
                })
                .collect(),
        ),
    };
    let collections = instance
        .collections()
        .iter()
        .map(|c| CollectionFile {
            name: c.name.clone(),
            supports: supports_to_file(instance, &c.partition),
            populations: instance
                .units()
                .map(|u| (instance.unit_name(u).to_string(), c.pop(u)))
                .collect(),
        })
        .collect();
    let file = InstanceFile {
        units: Some(instance.unit_names().to_vec()),
        adjacency,
        collections,
    };
    serde_json::to_value(file).expect("instance serializes")
}

/// Alignment in the collection schema plus `correspondence`, `costs` and
/// `objective`.
pub fn alignment_to_json(instance: &Instance, alignment: &Alignment) -> serde_json::Value {
    let file = AlignmentFile {
        name: default_alignment_name(),
        supports: supports_to_file(instance, &alignment.result),
        correspondence: alignment
            .correspondence
            .iter()
            .map(|(c, m)| {
                (
                    c.to_string(),
                    m.iter()
                        .map(|(k, v)| (k.to_string(), v.map(str::to_string)))
                        .collect(),
                )
            })
            .collect(),
        costs: alignment.costs.clone(),
        objective: Some(alignment.objective()),
    };
    serde_json::to_value(file).expect("alignment serializes")
}

/// Reads an alignment and recomputes its costs against `instance`; costs
/// stored in the file are ignored.
pub fn parse_alignment(instance: &Instance, text: &str) -> Result<Alignment> {
    let file: AlignmentFile = serde_json::from_str(text)?;
    let index: BTreeMap<&str, UnitId> = instance
        .units()
        .map(|u| (instance.unit_name(u), u))
        .collect();
    let mut supports = Vec::with_capacity(file.supports.len());
    for (label, units) in &file.supports {
        let ids = units
            .iter()
            .map(|n| {
                index
                    .get(n.as_str())
                    .copied()
                    .ok_or_else(|| Error::UnknownUnit(n.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        supports.push((label.clone(), ids));
    }
    let result = Partition::new(instance.unit_count(), supports);
    let mut corr = Correspondence::new();
    for (name, pairs) in file.correspondence {
        let map = LabelMap::from_pairs(&name, pairs)?;
        corr.insert(name, map);
    }
    Alignment::new(instance, result, corr)
}

/// Comma-separated positive integers, e.g. `3,5,7`.
pub fn parse_multiset(text: &str) -> Result<Vec<u64>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::EmptyMultiset);
    }
    text.split(',')
        .map(|t| {
            let v: u64 = t
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("`{t}`: {e}")))?;
            if v == 0 {
                Err(Error::NonPositiveValue)
            } else {
                Ok(v)
            }
        })
        .collect()
}

fn supports_to_file(instance: &Instance, p: &Partition) -> BTreeMap<String, Vec<String>> {
    p.supports()
        .map(|(l, us)| {
            (
                l.to_string(),
                us.iter()
                    .map(|&u| instance.unit_name(u).to_string())
                    .collect(),
            )
        })
        .collect()
}

fn name_index(names: &[String]) -> Result<BTreeMap<&str, UnitId>> {
    let mut index = BTreeMap::new();
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.as_str(), UnitId(i as u32)).is_some() {
            return Err(Error::DuplicateUnit(n.clone()));
        }
    }
    Ok(index)
}

fn lookup(index: &BTreeMap<&str, UnitId>, name: &str) -> Result<UnitId> {
    index
        .get(name)
        .copied()
        .ok_or_else(|| Error::UnknownUnit(name.to_string()))
}

fn partition_from_file(
    index: &BTreeMap<&str, UnitId>,
    n: usize,
    supports: &BTreeMap<String, Vec<String>>,
) -> Result<Partition> {
    let mut out = Vec::with_capacity(supports.len());
    for (label, units) in supports {
        let ids = units
            .iter()
            .map(|u| lookup(index, u))
            .collect::<Result<Vec<_>>>()?;
        out.push((label.clone(), ids));
    }
    Ok(Partition::new(n, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
        "adjacency": {"grid": [2, 1]},
        "collections": [
            {"name": "A", "supports": {"x": ["u1_1", "u2_1"]},
             "populations": {"u1_1": 1, "u2_1": 2}}
        ]}"#;

    #[test]
    fn grid_shorthand() {
        let inst = parse_instance(SMALL).unwrap();
        assert_eq!(inst.unit_count(), 2);
        assert_eq!(inst.graph().edge_count(), 1);
        assert_eq!(inst.unit_name(UnitId(1)), "u2_1");
    }

    #[test]
    fn malformed_json() {
        assert!(matches!(
            parse_instance("{\"units\": ["),
            Err(Error::Json(_))
        ));
    }

    #[test]
    fn unknown_unit_in_support() {
        let text = SMALL.replace("[\"u1_1\", \"u2_1\"]", "[\"u1_1\", \"u9_9\"]");
        assert!(matches!(parse_instance(&text), Err(Error::UnknownUnit(u)) if u == "u9_9"));
    }

    #[test]
    fn missing_population_is_a_violation() {
        let text = SMALL.replace(", \"u2_1\": 2", "");
        assert!(matches!(parse_instance(&text), Err(Error::Invalid(v)) if v.len() == 1));
    }

    #[test]
    fn multiset() {
        assert_eq!(parse_multiset("3, 5,7").unwrap(), vec![3, 5, 7]);
        assert!(matches!(parse_multiset(""), Err(Error::EmptyMultiset)));
        assert!(matches!(
            parse_multiset("1,0"),
            Err(Error::NonPositiveValue)
        ));
        assert!(parse_multiset("1,x").is_err());
    }
}
