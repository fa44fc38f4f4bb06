//! Bit-vector sets of element identifiers.

use std::fmt;

use crate::group::ElementId;

/// A set of element identifiers of a fixed finite group, stored as a
/// bit-vector. Groups of order at most 64 fit in a single machine word.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSet {
    universe: usize,
    words: Vec<u64>,
}

impl ElementSet {
    pub fn empty(universe: usize) -> Self {
        ElementSet {
            universe,
            words: vec![0; universe.div_ceil(64).max(1)],
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for g in 0..universe {
            s.insert(g);
        }
        s
    }

    pub fn from_elements(universe: usize, elements: impl IntoIterator<Item = ElementId>) -> Self {
        let mut s = Self::empty(universe);
        for g in elements {
            s.insert(g);
        }
        s
    }

    /// Builds a set over a universe of at most 64 elements from a word mask.
    pub fn from_mask(universe: usize, mask: u64) -> Self {
        assert!(universe <= 64, "mask sets need a universe of at most 64");
        let mask = if universe == 64 { mask } else { mask & ((1u64 << universe) - 1) };
        ElementSet {
            universe,
            words: vec![mask],
        }
    }

    /// The single-word mask. Only meaningful when the universe is at most 64.
    pub fn mask(&self) -> u64 {
        debug_assert!(self.universe <= 64);
        self.words[0]
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn contains(&self, g: ElementId) -> bool {
        g < self.universe && self.words[g >> 6] >> (g & 63) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, g: ElementId) -> bool {
        assert!(g < self.universe, "element {g} outside universe {}", self.universe);
        let w = &mut self.words[g >> 6];
        let bit = 1u64 << (g & 63);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    pub fn remove(&mut self, g: ElementId) {
        if g < self.universe {
            self.words[g >> 6] &= !(1u64 << (g & 63));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| BitIter(w).map(move |b| i * 64 + b))
    }

    pub fn elements(&self) -> Vec<ElementId> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersection(&self, other: &ElementSet) -> ElementSet {
        ElementSet {
            universe: self.universe,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn union(&self, other: &ElementSet) -> ElementSet {
        ElementSet {
            universe: self.universe,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Iterates over the set bits of a word, lowest first.
#[derive(Clone, Copy)]
pub struct BitIter(pub u64);

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            let b = self.0.trailing_zeros() as usize;
            self.0 &= self.0 - 1;
            Some(b)
        }
    }
}

/// A subgroup of a finite group, given by its members.
///
/// Constructed only through closure operations on a [`FiniteGroup`], so the
/// member set always contains the identity and is closed under products and
/// inverses.
///
/// [`FiniteGroup`]: crate::group::FiniteGroup
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubgroupSet {
    pub(crate) members: ElementSet,
}

impl SubgroupSet {
    pub(crate) fn from_closed(members: ElementSet) -> Self {
        SubgroupSet { members }
    }

    pub fn members(&self) -> &ElementSet {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, g: ElementId) -> bool {
        self.members.contains(g)
    }

    pub fn elements(&self) -> Vec<ElementId> {
        self.members.elements()
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn is_subgroup_of(&self, other: &SubgroupSet) -> bool {
        self.members.is_subset(&other.members)
    }

    /// The intersection of two subgroups, which is again a subgroup.
    pub fn intersect(&self, other: &SubgroupSet) -> SubgroupSet {
        SubgroupSet {
            members: self.members.intersection(&other.members),
        }
    }
}

impl fmt::Debug for SubgroupSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup(order {}) {:?}", self.order(), self.members)
    }
}
