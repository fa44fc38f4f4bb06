//! Cached computations shared by the command line and the reports.

use std::collections::BTreeMap;

use kodaira_core::{
    automorphism_group, compute_h1, count_orbits, find_prestructures, find_structures, for_each_structure,
    has_quotient_isomorphic_to, lift_structures, structure_metadata, ElementId, FiniteGroup, SearchOptions,
};
use rand::rngs::StdRng;
use rand::seq::index::sample;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cache::Cache;
use crate::catalog::Catalog;
use crate::Error;

/// Totals of an exhaustive structure search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub label: String,
    pub b: usize,
    pub count: u64,
    /// `(|K1|, |K2|, count)`.
    pub kernel_orders: Vec<(usize, usize, u64)>,
    /// `(o(z), count)`.
    pub z_orders: Vec<(usize, u64)>,
    /// `(shard index, count)` for the non-empty shards.
    pub shard_counts: Vec<(usize, u64)>,
    pub shards: usize,
}

/// First homology sampled at uniformly random positions of the enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct H1Scan {
    pub label: String,
    pub total: u64,
    pub seed: u64,
    /// Enumeration positions that were sampled, ascending.
    pub positions: Vec<u64>,
    /// H1 in display form, keyed with its sample count.
    pub counts: BTreeMap<String, u64>,
    /// For each H1 value, the first sampled position where it occurred.
    pub first_position: BTreeMap<String, u64>,
}

/// Lifts of one structure along a surjection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftSummary {
    pub base: Vec<ElementId>,
    pub lifts: usize,
    pub generating: usize,
}

/// Catalog, cache and thread budget in one place.
pub struct Workspace {
    pub catalog: Catalog,
    pub cache: Cache,
    pub threads: Option<usize>,
}

impl Workspace {
    pub fn new(catalog: Catalog, cache: Cache) -> Self {
        Workspace {
            catalog,
            cache,
            threads: None,
        }
    }

    pub fn group(&self, label: &str) -> Result<FiniteGroup, Error> {
        Ok(self.catalog.load_group(label)?)
    }

    fn options(&self) -> SearchOptions {
        SearchOptions {
            threads: self.threads,
            ..Default::default()
        }
    }

    pub fn aut_order(&self, label: &str) -> Result<usize, Error> {
        let label = self.catalog.entry(label)?.label.clone();
        self.cache.get_or_compute("aut-order", &label, &json!({}), || {
            let g = self.group(&label)?;
            Ok::<_, Error>((automorphism_group(&g)?.len(), 1))
        })
    }

    /// Exhaustive count of genus-`b` structures.
    pub fn census(&self, label: &str, b: usize, extended: bool) -> Result<Census, Error> {
        let label = self.catalog.entry(label)?.label.clone();
        self.cache.get_or_compute("structures-count", &label, &json!({ "b": b }), || {
            let g = self.group(&label)?;
            let opts = SearchOptions {
                allow_large_genus: extended,
                ..self.options()
            };
            let out = find_structures(&g, b, &opts)?;
            let census = Census {
                label: label.clone(),
                b,
                count: out.count,
                kernel_orders: out.kernel_orders.iter().map(|(&(k1, k2), &c)| (k1, k2, c)).collect(),
                z_orders: out.z_orders.into_iter().collect(),
                shard_counts: out
                    .shard_counts
                    .iter()
                    .enumerate()
                    .filter(|&(_, &c)| c > 0)
                    .map(|(i, &c)| (i, c))
                    .collect(),
                shards: out.shard_counts.len(),
            };
            let shards = census.shards;
            Ok::<_, Error>((census, shards))
        })
    }

    pub fn prestructure_count(&self, label: &str, b: usize) -> Result<u64, Error> {
        let label = self.catalog.entry(label)?.label.clone();
        self.cache.get_or_compute("prestructures-count", &label, &json!({ "b": b }), || {
            let out = find_prestructures(&self.group(&label)?, b, &self.options())?;
            Ok::<_, Error>((out.count, out.shard_counts.len()))
        })
    }

    pub fn orbits(&self, census: &Census) -> Result<u64, Error> {
        Ok(count_orbits(census.count, self.aut_order(&census.label)?)?)
    }

    /// The first `k` structures in enumeration order.
    pub fn first_structures(&self, g: &FiniteGroup, b: usize, k: usize, extended: bool) -> Result<Vec<Vec<ElementId>>, Error> {
        let opts = SearchOptions {
            first: Some(k),
            allow_large_genus: extended,
            ..self.options()
        };
        Ok(find_structures(g, b, &opts)?.structures)
    }

    /// H1 at `samples` distinct uniformly random enumeration positions.
    pub fn h1_scan(&self, label: &str, b: usize, samples: usize, seed: u64) -> Result<H1Scan, Error> {
        let label = self.catalog.entry(label)?.label.clone();
        let params = json!({ "b": b, "samples": samples, "seed": seed });
        self.cache.get_or_compute("h1-scan", &label, &params, || {
            let census = self.census(&label, b, false)?;
            let g = self.group(&label)?;
            let scan = scan_h1(&g, &census, samples, seed)?;
            Ok::<_, Error>((scan, 1))
        })
    }

    /// Lifts `base` (a structure on `quotient`) to `label` along a surjection
    /// found by quotient recognition.
    pub fn lifts(&self, label: &str, quotient: &str, bases: &[Vec<ElementId>], b: usize) -> Result<Vec<LiftSummary>, Error> {
        let g = self.group(label)?;
        let h = self.group(quotient)?;
        let (_, projection) = has_quotient_isomorphic_to(&g, &h)
            .ok_or_else(|| Error::Usage(format!("{quotient} is not a quotient of {label}")))?;
        bases
            .iter()
            .map(|base| {
                let lifts = lift_structures(&g, &projection, base, b)?;
                Ok(LiftSummary {
                    base: base.clone(),
                    lifts: lifts.len(),
                    generating: lifts.iter().filter(|l| l.generates).count(),
                })
            })
            .collect()
    }
}

/// Computes H1 at sampled enumeration positions, streaming only the shards
/// that contain one.
pub fn scan_h1(g: &FiniteGroup, census: &Census, samples: usize, seed: u64) -> Result<H1Scan, Error> {
    let total = census.count;
    let samples = samples.min(total as usize);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut positions: Vec<u64> = sample(&mut rng, total as usize, samples).into_iter().map(|i| i as u64).collect();
    positions.sort_unstable();
    let mut counts = BTreeMap::new();
    let mut first_position = BTreeMap::new();
    let mut pending = positions.iter().copied().peekable();
    let mut offset = 0u64;
    for &(shard, count) in &census.shard_counts {
        let wanted: Vec<u64> = std::iter::from_fn(|| pending.next_if(|&p| p < offset + count)).collect();
        if !wanted.is_empty() {
            let opts = SearchOptions {
                shard_range: Some(shard..shard + 1),
                ..Default::default()
            };
            let mut index = offset;
            let mut next = 0;
            let mut failure = None;
            for_each_structure(g, census.b, &opts, &mut |t| {
                if index == wanted[next] {
                    match compute_h1(g, t, census.b) {
                        Ok(h) => {
                            let key = h.to_string();
                            *counts.entry(key.clone()).or_insert(0) += 1;
                            first_position.entry(key).or_insert(index);
                        }
                        Err(e) => {
                            failure = Some(e);
                            return false;
                        }
                    }
                    next += 1;
                }
                index += 1;
                next < wanted.len()
            })?;
            if let Some(e) = failure {
                return Err(e.into());
            }
        }
        offset += count;
    }
    Ok(H1Scan {
        label: census.label.clone(),
        total,
        seed,
        positions,
        counts,
        first_position,
    })
}

/// `(m1, m2)` indices of the two kernels for a structure.
pub fn kernel_indices(g: &FiniteGroup, t: &[ElementId], b: usize) -> Result<(usize, usize), Error> {
    let s = structure_metadata(g, t, b)?;
    Ok((s.m1, s.m2))
}
