//! Finite group engine for diagonal double Kodaira structures.
//!
//! Groups are dense multiplication tables realized from presentations by
//! coset enumeration. On top of that substrate sit the gating predicates
//! (CCT, monolithic), automorphism groups, the structure search with its
//! orbit and lifting machinery, and the homology and numerical invariants of
//! the associated branched covers.

/// Version tag for cached results; bump when search or homology output changes.
pub const ENGINE_VERSION: &str = concat!("kodaira-", env!("CARGO_PKG_VERSION"));

pub mod automorphisms;
pub mod classify;
pub mod group;
pub mod presentation;
pub mod set;
pub mod structures;
pub mod todd_coxeter;
pub mod topology;

pub use automorphisms::{apply_to_tuple, automorphism_group, is_isomorphic, Automorphism};
pub use classify::{all_normal_subgroups, has_quotient_isomorphic_to, is_cct, mon, CctVerdict, MonolithicVerdict};
pub use group::{ElementId, FiniteGroup, NamedGenerator, IDENTITY};
pub use presentation::{evaluate_word, parse_presentation, parse_word, parse_presentations, EvalError, ParseError, Presentation, Word};
pub use set::{ElementSet, SubgroupSet};
pub use structures::{
    count_orbits, find_prestructures, find_structures, for_each_structure, generate_structure_relations, lift_structures,
    structure_metadata, verify_prestructure, verify_structure, KodairaStructure, RelationSet, SearchOptions, SearchOutcome,
    StructureError,
};
pub use topology::{
    compute_h1, orbifold_presentation, schreier_rewrite, smith_normal_form, surface_invariants, AbelianInvariants,
    IntMatrix, SchreierMatrix, SurfaceInvariantReport, TopologyError,
};
pub use todd_coxeter::{realize, todd_coxeter, EnumerationError, DEFAULT_MAX_COSETS};

/// Errors raised by group construction and group-level operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("element id {id} out of range for group of order {order}")]
    OutOfRange { id: ElementId, order: usize },
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("order {order} exceeds the supported limit {limit}")]
    TooLarge { order: usize, limit: usize },
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("element set is not a subgroup")]
    NotSubgroup,
}
