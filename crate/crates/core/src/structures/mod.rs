//! Diagonal double Kodaira structures: the relation system, verification,
//! exhaustive search, lifting along quotients and orbit counting.

mod backtrack;
mod engine;
mod relations;

pub use backtrack::backtrack_structures;
pub use engine::{find_prestructures, find_structures, for_each_structure, SearchOptions, SearchOutcome};
pub use relations::{generate_structure_relations, Relation, RelationKind, RelationSet, Symbol};

use serde::Serialize;

use crate::automorphisms::{apply_to_tuple, Automorphism};
use crate::group::{ElementId, FiniteGroup, IDENTITY};
use crate::set::SubgroupSet;
use crate::GroupError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("genus b = {0} is below 2")]
    GenusTooSmall(usize),
    #[error("branching order n = {0} is below 2")]
    BranchingOrder(usize),
    #[error("tuple has length {found}, expected {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error("b = {0} is expensive; pass the large-genus override to search anyway")]
    GenusNeedsOverride(usize),
    #[error("total {total} is not divisible by |Aut(G)| = {aut_order}")]
    NotDivisible { total: u64, aut_order: usize },
    #[error("projection has length {found}, expected the group order {expected}")]
    BadProjection { expected: usize, found: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A reason a tuple fails to be a structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    OutOfRange { position: usize, id: ElementId },
    TrivialZ,
    ZOrder { expected: usize, found: usize },
    Relation(String),
    NotGenerating,
}

/// A verified structure together with its subgroup data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KodairaStructure {
    pub b: usize,
    /// Order of `z`.
    pub n: usize,
    pub entries: Vec<ElementId>,
    pub k1: SubgroupSet,
    pub k2: SubgroupSet,
    /// Indices `[G : K1]` and `[G : K2]`.
    pub m1: usize,
    pub m2: usize,
    pub strong: bool,
}

fn check_tuple(g: &FiniteGroup, t: &[ElementId], b: usize) -> Result<Vec<Violation>, StructureError> {
    if b < 2 {
        return Err(StructureError::GenusTooSmall(b));
    }
    if t.len() != 4 * b + 1 {
        return Err(StructureError::WrongLength {
            expected: 4 * b + 1,
            found: t.len(),
        });
    }
    Ok(t.iter()
        .enumerate()
        .filter(|&(_, &id)| id >= g.order())
        .map(|(position, &id)| Violation::OutOfRange { position, id })
        .collect())
}

fn check_relations<'a>(
    g: &FiniteGroup,
    t: &[ElementId],
    relations: impl Iterator<Item = &'a Relation>,
    out: &mut Vec<Violation>,
) {
    for r in relations {
        if r.lhs.eval_total(g, t) != r.rhs.eval_total(g, t) {
            out.push(Violation::Relation(r.name.clone()));
        }
    }
}

/// Checks the surface and conjugacy relations, the order of `z` (exactly `n`
/// when given, otherwise at least 2) and optionally that the entries
/// generate `g`. An empty result means the tuple is a structure.
pub fn verify_structure(
    g: &FiniteGroup,
    t: &[ElementId],
    b: usize,
    n: Option<usize>,
    require_generation: bool,
) -> Result<Vec<Violation>, StructureError> {
    let mut out = check_tuple(g, t, b)?;
    if !out.is_empty() {
        return Ok(out);
    }
    let rels = generate_structure_relations(b, None)?;
    let z = t[4 * b];
    match n {
        Some(n) if g.element_order(z) != n => out.push(Violation::ZOrder {
            expected: n,
            found: g.element_order(z),
        }),
        None if z == IDENTITY => out.push(Violation::TrivialZ),
        _ => {}
    }
    check_relations(g, t, rels.core(), &mut out);
    if require_generation && g.close(t.iter().copied()).order() != g.order() {
        out.push(Violation::NotGenerating);
    }
    Ok(out)
}

/// Checks only the conjugacy relations and `z ≠ 1`.
pub fn verify_prestructure(g: &FiniteGroup, t: &[ElementId], b: usize) -> Result<Vec<Violation>, StructureError> {
    let mut out = check_tuple(g, t, b)?;
    if !out.is_empty() {
        return Ok(out);
    }
    if t[4 * b] == IDENTITY {
        out.push(Violation::TrivialZ);
    }
    let rels = generate_structure_relations(b, None)?;
    check_relations(
        g,
        t,
        rels.relations.iter().filter(|r| r.commutator.is_some()),
        &mut out,
    );
    Ok(out)
}

/// Computes `K1`, `K2`, their indices and strongness for a tuple.
pub fn structure_metadata(g: &FiniteGroup, t: &[ElementId], b: usize) -> Result<KodairaStructure, StructureError> {
    let bad = check_tuple(g, t, b)?;
    if let Some(Violation::OutOfRange { id, .. }) = bad.first() {
        return Err(GroupError::OutOfRange { id: *id, order: g.order() }.into());
    }
    let z = t[4 * b];
    let k1 = g.close(t[..2 * b].iter().copied().chain([z]));
    let k2 = g.close(t[2 * b..].iter().copied());
    let (m1, m2) = (g.order() / k1.order(), g.order() / k2.order());
    Ok(KodairaStructure {
        b,
        n: g.element_order(z),
        entries: t.to_vec(),
        k1,
        k2,
        m1,
        m2,
        strong: m1 == 1 && m2 == 1,
    })
}

/// A preimage of a structure along a quotient map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lift {
    pub entries: Vec<ElementId>,
    pub generates: bool,
}

/// All preimages of `base` (a structure on the quotient) under `projection`
/// that satisfy the relations with `z ≠ 1`, each flagged by whether it
/// generates `g`.
pub fn lift_structures(
    g: &FiniteGroup,
    projection: &[ElementId],
    base: &[ElementId],
    b: usize,
) -> Result<Vec<Lift>, StructureError> {
    if projection.len() != g.order() {
        return Err(StructureError::BadProjection {
            expected: g.order(),
            found: projection.len(),
        });
    }
    if base.len() != 4 * b + 1 {
        return Err(StructureError::WrongLength {
            expected: 4 * b + 1,
            found: base.len(),
        });
    }
    let candidates: Vec<Vec<ElementId>> = base
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            g.elements()
                .filter(|&y| projection[y] == x && !(i == 4 * b && y == IDENTITY))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    backtrack_structures(g, b, None, &candidates, false, &mut |t| {
        out.push(Lift {
            entries: t.to_vec(),
            generates: g.close(t.iter().copied()).order() == g.order(),
        });
        true
    })?;
    Ok(out)
}

/// Number of Aut-orbits on a set of `total` structures, assuming the action
/// is free. Fails when the total is not a multiple of `|Aut|`.
pub fn count_orbits(total: u64, aut_order: usize) -> Result<u64, StructureError> {
    if aut_order == 0 || total % aut_order as u64 != 0 {
        return Err(StructureError::NotDivisible { total, aut_order });
    }
    Ok(total / aut_order as u64)
}

/// Whether only the identity automorphism fixes `t`.
pub fn stabilizer_is_trivial(auts: &[Automorphism], t: &[ElementId]) -> bool {
    auts.iter().filter(|phi| apply_to_tuple(phi, t) == t).count() == 1
}

/// The lexicographically smallest tuple in the Aut-orbit of `t`.
pub fn canonical_representative(auts: &[Automorphism], t: &[ElementId]) -> Vec<ElementId> {
    auts.iter()
        .map(|phi| apply_to_tuple(phi, t))
        .min()
        .unwrap_or_else(|| t.to_vec())
}
