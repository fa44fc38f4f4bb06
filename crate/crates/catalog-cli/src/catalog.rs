//! Shipped presentations and the manifest that indexes them.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use kodaira_core::classify::is_abelian_normal_of_prime_index;
use kodaira_core::{
    is_cct, mon, parse_presentations, parse_word, realize, ElementId, EnumerationError, FiniteGroup, ParseError,
    Presentation, SubgroupSet,
};
use serde::{Deserialize, Serialize};

/// Overrides the catalog directory.
pub const CATALOG_ENV: &str = "KODAIRA_CATALOG";

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("unknown catalog label `{0}`")]
    UnknownLabel(String),
    #[error("`{0}` needs a user-supplied presentation (external input required)")]
    ExternalInput(String),
    #[error("catalog corrupted: `{label}` realizes order {found}, manifest says {expected}")]
    OrderMismatch { label: String, expected: usize, found: usize },
    #[error("`{label}` listed in the manifest but missing from {file}")]
    MissingPresentation { label: String, file: String },
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("manifest: {0}")]
    Manifest(#[from] serde_json::Error),
    #[error("{file}: {source}")]
    Parse { file: String, source: ParseError },
    #[error("enumerating `{label}`: {source}")]
    Enumeration { label: String, source: EnumerationError },
    #[error("witness word for `{label}`: {source}")]
    Witness { label: String, source: ParseError },
}

/// A normal abelian subgroup `⟨generators⟩` of prime index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianWitness {
    pub generators: Vec<String>,
    pub index: usize,
}

/// Golden values attached to an entry. Every field is optional.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Annotations {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cct: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monolithic: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mon_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abelian_normal_witness: Option<AbelianWitness>,
    /// Two non-trivial normal subgroups meeting trivially.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disjoint_normal_pair: Option<[Vec<String>; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aut_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prestructures: Option<u64>,
    /// Number of structures of type (2, n), summed over n.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structures: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbits: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_orders: Option<(usize, usize)>,
    /// Every first homology group that occurs, in display form.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub h1: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceAnnotation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
}

/// Numerical invariants of the surfaces attached to the group's structures.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceAnnotation {
    pub q: i64,
    pub k2: i64,
    pub c2: i64,
    pub sigma: i64,
    pub b1: i64,
    pub b2: i64,
    pub g1: i64,
    pub g2: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_g: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub betti: Option<[i64; 5]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub label: String,
    pub file: String,
    pub order: usize,
    #[serde(default)]
    pub annotations: Annotations,
}

/// A label the catalog knows about but cannot realize.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExternalEntry {
    pub label: String,
    pub order: usize,
    pub status: String,
    pub note: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub format: u32,
    pub groups: Vec<CatalogEntry>,
    #[serde(default)]
    pub external: Vec<ExternalEntry>,
}

pub struct Catalog {
    root: PathBuf,
    manifest: Manifest,
    files: Mutex<HashMap<String, Vec<Presentation>>>,
}

impl Catalog {
    /// `$KODAIRA_CATALOG` if set, else the directory shipped with the crate.
    pub fn default_dir() -> PathBuf {
        std::env::var_os(CATALOG_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("catalog"))
    }

    pub fn open_default() -> Result<Self, CatalogError> {
        Self::open(Self::default_dir())
    }

    pub fn open(root: impl Into<PathBuf>) -> Result<Self, CatalogError> {
        let root = root.into();
        let path = root.join("manifest.json");
        let text = fs::read_to_string(&path).map_err(|source| CatalogError::Io { path, source })?;
        Ok(Catalog {
            root,
            manifest: serde_json::from_str(&text)?,
            files: Mutex::new(HashMap::new()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.manifest.groups
    }

    pub fn external(&self) -> &[ExternalEntry] {
        &self.manifest.external
    }

    pub fn entry(&self, label: &str) -> Result<&CatalogEntry, CatalogError> {
        let label = normalize_label(label);
        if let Some(e) = self.manifest.groups.iter().find(|e| e.label == label) {
            return Ok(e);
        }
        if self.manifest.external.iter().any(|e| e.label == label) {
            return Err(CatalogError::ExternalInput(label));
        }
        Err(CatalogError::UnknownLabel(label))
    }

    /// Entries of the given order, in manifest order.
    pub fn of_order(&self, order: usize) -> impl Iterator<Item = &CatalogEntry> {
        self.manifest.groups.iter().filter(move |e| e.order == order)
    }

    pub fn presentation(&self, label: &str) -> Result<Presentation, CatalogError> {
        let entry = self.entry(label)?;
        let mut files = self.files.lock().expect("catalog file cache poisoned");
        if !files.contains_key(&entry.file) {
            let path = self.root.join(&entry.file);
            let text = fs::read_to_string(&path).map_err(|source| CatalogError::Io { path, source })?;
            let parsed = parse_presentations(&text).map_err(|source| CatalogError::Parse {
                file: entry.file.clone(),
                source,
            })?;
            files.insert(entry.file.clone(), parsed);
        }
        files[&entry.file]
            .iter()
            .find(|p| p.label.as_deref() == Some(entry.label.as_str()))
            .cloned()
            .ok_or_else(|| CatalogError::MissingPresentation {
                label: entry.label.clone(),
                file: entry.file.clone(),
            })
    }

    /// Parses, enumerates and order-checks a catalog group.
    pub fn load_group(&self, label: &str) -> Result<FiniteGroup, CatalogError> {
        let entry = self.entry(label)?;
        let p = self.presentation(&entry.label)?;
        let g = realize(&p).map_err(|source| CatalogError::Enumeration {
            label: entry.label.clone(),
            source,
        })?;
        if g.order() != entry.order {
            return Err(CatalogError::OrderMismatch {
                label: entry.label.clone(),
                expected: entry.order,
                found: g.order(),
            });
        }
        Ok(g.with_label(entry.label.clone()))
    }
}

/// Accepts `G(36,10)`, `G(36, 10)` and `36,10`.
pub fn normalize_label(label: &str) -> String {
    let inner: String = label.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = inner.trim_start_matches("G(").trim_start_matches('(').trim_end_matches(')');
    format!("G({inner})")
}

fn subgroup_of_words(g: &FiniteGroup, label: &str, words: &[String]) -> Result<SubgroupSet, CatalogError> {
    let names: Vec<String> = g.generators().iter().map(|n| n.name.clone()).collect();
    let images: Vec<ElementId> = g.generators().iter().map(|n| n.element).collect();
    let mut elements = Vec::with_capacity(words.len());
    for w in words {
        let word = parse_word(w, &names).map_err(|source| CatalogError::Witness {
            label: label.to_string(),
            source,
        })?;
        elements.push(word.eval_total(g, &images));
    }
    Ok(g.subgroup_generated(&elements).expect("elements are in range"))
}

/// Checks the annotations that are cheap to recompute (predicates, witnesses,
/// |Aut| when `with_aut`). Returns one message per mismatch.
pub fn check_annotations(entry: &CatalogEntry, g: &FiniteGroup, with_aut: bool) -> Result<Vec<String>, CatalogError> {
    let a = &entry.annotations;
    let mut bad = Vec::new();
    let label = &entry.label;
    if let Some(expected) = a.cct {
        let found = is_cct(g).is_cct;
        if found != expected {
            bad.push(format!("{label}: CCT {found}, expected {expected}"));
        }
    }
    if a.monolithic.is_some() || a.mon_order.is_some() {
        let v = mon(g);
        if let Some(expected) = a.monolithic {
            if v.is_monolithic != expected {
                bad.push(format!("{label}: monolithic {}, expected {expected}", v.is_monolithic));
            }
        }
        if let Some(expected) = a.mon_order {
            if v.mon.order() != expected {
                bad.push(format!("{label}: |mon| {}, expected {expected}", v.mon.order()));
            }
        }
    }
    if let Some(w) = &a.abelian_normal_witness {
        let n = subgroup_of_words(g, label, &w.generators)?;
        if g.order() != n.order() * w.index || !is_abelian_normal_of_prime_index(g, &n) {
            bad.push(format!(
                "{label}: <{}> is not an abelian normal subgroup of index {}",
                w.generators.join(", "),
                w.index
            ));
        }
    }
    if let Some([first, second]) = &a.disjoint_normal_pair {
        let n1 = subgroup_of_words(g, label, first)?;
        let n2 = subgroup_of_words(g, label, second)?;
        let ok = g.is_normal(&n1) && g.is_normal(&n2) && !n1.is_trivial() && !n2.is_trivial() && n1.intersect(&n2).is_trivial();
        if !ok {
            bad.push(format!("{label}: normal pair does not meet trivially"));
        }
    }
    if with_aut {
        if let Some(expected) = a.aut_order {
            match kodaira_core::automorphism_group(g) {
                Ok(auts) if auts.len() == expected => {}
                Ok(auts) => bad.push(format!("{label}: |Aut| {}, expected {expected}", auts.len())),
                Err(e) => bad.push(format!("{label}: {e}")),
            }
        }
    }
    Ok(bad)
}
