//! Seeded random grid instances.

use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{AdjacencyGraph, Collection, Instance, Layout, Partition, UnitId};

const MAX_ATTEMPTS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub width: usize,
    pub height: usize,
    /// Number of collections.
    pub k: usize,
    /// Supports per collection.
    pub m: usize,
    pub population: RangeInclusive<u64>,
}

/// `k` collections of `m` supports each on a `width x height` grid, grown
/// from random seed units. A grid of height 1 is a path.
pub fn gen_random(seed: u64, params: &GenParams) -> Result<Instance> {
    let GenParams {
        width,
        height,
        k,
        m,
        ref population,
    } = *params;
    let n = width * height;
    if n == 0 || m == 0 || m > n || k == 0 || population.is_empty() || *population.start() == 0 {
        return Err(Error::BadParameters(format!(
            "grid {width}x{height}, k={k}, m={m}, populations {population:?}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graph = AdjacencyGraph::grid(width, height);
    let mut collections = Vec::with_capacity(k);
    for c in 0..k {
        let labeling = (0..MAX_ATTEMPTS)
            .find_map(|_| grow_regions(&graph, m, &mut rng))
            .ok_or(Error::GenerationFailed(MAX_ATTEMPTS))?;
        let name = collection_name(c);
        let prefix = name.to_lowercase();
        let supports = (0..m).map(|i| {
            (
                format!("{prefix}{}", i + 1),
                (0..n)
                    .filter(|&u| labeling[u] == i)
                    .map(|u| UnitId(u as u32))
                    .collect(),
            )
        });
        collections.push(Collection {
            partition: Partition::new(n, supports),
            population: (0..n).map(|_| rng.gen_range(population.clone())).collect(),
            name,
        });
    }
    Instance::new(
        Instance::grid_unit_names(width, height),
        graph,
        collections,
        Layout::Grid { width, height },
    )?
    .validated()
}

/// `S`, `T`, then `C3`, `C4`, ...
fn collection_name(c: usize) -> String {
    match c {
        0 => "S".into(),
        1 => "T".into(),
        _ => format!("C{}", c + 1),
    }
}

/// Simultaneous growth: each round a random region claims a random free
/// neighbour. `None` only when the graph is disconnected.
fn grow_regions(graph: &AdjacencyGraph, m: usize, rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
    let n = graph.unit_count();
    let mut labels = vec![usize::MAX; n];
    let mut units: Vec<usize> = (0..n).collect();
    units.shuffle(rng);
    let mut members: Vec<Vec<usize>> = Vec::with_capacity(m);
    for (i, &u) in units[..m].iter().enumerate() {
        labels[u] = i;
        members.push(vec![u]);
    }
    let mut free = n - m;
    while free > 0 {
        let growable: Vec<usize> = (0..m)
            .filter(|&i| {
                members[i].iter().any(|&u| {
                    graph
                        .neighbors(UnitId(u as u32))
                        .iter()
                        .any(|w| labels[w.index()] == usize::MAX)
                })
            })
            .collect();
        let &i = growable.choose(rng)?;
        let frontier: Vec<usize> = members[i]
            .iter()
            .flat_map(|&u| graph.neighbors(UnitId(u as u32)).iter().map(|w| w.index()))
            .filter(|&w| labels[w] == usize::MAX)
            .collect();
        let &w = frontier.choose(rng)?;
        labels[w] = i;
        members[i].push(w);
        free -= 1;
    }
    Some(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::instance_to_json;

    fn params(w: usize, h: usize, k: usize, m: usize) -> GenParams {
        GenParams {
            width: w,
            height: h,
            k,
            m,
            population: 1..=20,
        }
    }

    #[test]
    fn deterministic() {
        let a = gen_random(42, &params(4, 4, 2, 4)).unwrap();
        let b = gen_random(42, &params(4, 4, 2, 4)).unwrap();
        assert_eq!(
            instance_to_json(&a).to_string(),
            instance_to_json(&b).to_string()
        );
        assert_eq!(a.collections()[0].partition.support_count(), 4);
    }

    #[test]
    fn single_support_collections_agree() {
        let inst = gen_random(7, &params(3, 3, 3, 1)).unwrap();
        for c in inst.collections() {
            assert_eq!(c.partition.support_count(), 1);
            assert_eq!(c.partition.members(0).len(), 9);
        }
    }

    #[test]
    fn too_many_supports() {
        assert!(matches!(
            gen_random(1, &params(2, 2, 2, 5)),
            Err(Error::BadParameters(_))
        ));
    }

    #[test]
    fn many_seeds_validate() {
        for seed in 0..50 {
            let inst = gen_random(seed, &params(5, 4, 3, 5)).unwrap();
            assert!(crate::model::validate(&inst).is_empty());
        }
    }
}
