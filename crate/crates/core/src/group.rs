//! Finite groups as dense multiplication tables.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand::rngs::StdRng;

use crate::set::{ElementSet, SubgroupSet};
use crate::GroupError;

/// Dense element identifier. The identity is always `0`.
pub type ElementId = usize;

pub const IDENTITY: ElementId = 0;

/// Largest order representable by the dense table.
pub const MAX_ORDER: usize = 1 << 16;

/// Orders up to this bound get an exhaustive associativity check.
const EXHAUSTIVE_ASSOC_LIMIT: usize = 256;
const SAMPLED_ASSOC_TRIPLES: usize = 1_000_000;

/// A named generator of a group realized from a presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedGenerator {
    pub name: String,
    pub element: ElementId,
}

/// An immutable finite group: multiplication table plus element metadata.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<u16>,
    inverses: Vec<u16>,
    element_orders: Vec<u32>,
    label: Option<String>,
    generators: Vec<NamedGenerator>,
}

impl std::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("label", &self.label)
            .field("order", &self.order)
            .finish_non_exhaustive()
    }
}

impl FiniteGroup {
    /// Builds a group from a row-major table where `table[g * order + h] = g·h`.
    ///
    /// Checks the identity axiom (element 0), existence of inverses and
    /// associativity (exhaustive up to order 256, sampled above).
    pub fn from_table(order: usize, table: Vec<ElementId>) -> Result<Self, GroupError> {
        if order == 0 || order > MAX_ORDER {
            return Err(GroupError::TooLarge { order, limit: MAX_ORDER });
        }
        if table.len() != order * order {
            return Err(GroupError::NotAGroup(format!(
                "table has {} entries, expected {}",
                table.len(),
                order * order
            )));
        }
        if let Some(&bad) = table.iter().find(|&&x| x >= order) {
            return Err(GroupError::OutOfRange { id: bad, order });
        }
        let table: Vec<u16> = table.into_iter().map(|x| x as u16).collect();
        for g in 0..order {
            if table[g] as usize != g || table[g * order] as usize != g {
                return Err(GroupError::NotAGroup(format!("element 0 is not an identity for {g}")));
            }
        }
        let mut inverses = vec![u16::MAX; order];
        for g in 0..order {
            let row = &table[g * order..(g + 1) * order];
            match row.iter().position(|&x| x == 0) {
                Some(h) if table[h * order + g] == 0 => inverses[g] = h as u16,
                _ => return Err(GroupError::NotAGroup(format!("element {g} has no two-sided inverse"))),
            }
        }
        let mut group = FiniteGroup {
            order,
            table,
            inverses,
            element_orders: Vec::new(),
            label: None,
            generators: Vec::new(),
        };
        group.check_associative()?;
        group.element_orders = (0..order).map(|g| group.compute_element_order(g)).collect();
        Ok(group)
    }

    fn check_associative(&self) -> Result<(), GroupError> {
        let n = self.order;
        let fail = |a, b, c| GroupError::NotAGroup(format!("associativity fails on ({a}, {b}, {c})"));
        if n <= EXHAUSTIVE_ASSOC_LIMIT {
            for a in 0..n {
                for b in 0..n {
                    let ab = self.mul(a, b);
                    for c in 0..n {
                        if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                            return Err(fail(a, b, c));
                        }
                    }
                }
            }
        } else {
            let mut rng = StdRng::seed_from_u64(0x5eed_0f_a550c);
            for _ in 0..SAMPLED_ASSOC_TRIPLES {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                    return Err(fail(a, b, c));
                }
            }
        }
        Ok(())
    }

    fn compute_element_order(&self, g: ElementId) -> u32 {
        let mut k = 1;
        let mut x = g;
        while x != IDENTITY {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_generators(mut self, generators: Vec<NamedGenerator>) -> Self {
        self.generators = generators;
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Generators recorded when the group was realized from a presentation.
    pub fn generators(&self) -> &[NamedGenerator] {
        &self.generators
    }

    pub fn generator(&self, name: &str) -> Option<ElementId> {
        self.generators.iter().find(|g| g.name == name).map(|g| g.element)
    }

    pub fn elements(&self) -> std::ops::Range<ElementId> {
        0..self.order
    }

    /// Table lookup without range checks beyond the slice bounds.
    #[inline]
    pub fn mul(&self, g: ElementId, h: ElementId) -> ElementId {
        self.table[g * self.order + h] as ElementId
    }

    #[inline]
    pub fn inv(&self, g: ElementId) -> ElementId {
        self.inverses[g] as ElementId
    }

    #[inline]
    pub fn element_order(&self, g: ElementId) -> usize {
        self.element_orders[g] as usize
    }

    pub fn element_orders(&self) -> impl Iterator<Item = usize> + '_ {
        self.element_orders.iter().map(|&k| k as usize)
    }

    fn check(&self, g: ElementId) -> Result<(), GroupError> {
        if g < self.order {
            Ok(())
        } else {
            Err(GroupError::OutOfRange { id: g, order: self.order })
        }
    }

    pub fn multiply(&self, g: ElementId, h: ElementId) -> Result<ElementId, GroupError> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul(g, h))
    }

    pub fn inverse(&self, g: ElementId) -> Result<ElementId, GroupError> {
        self.check(g)?;
        Ok(self.inv(g))
    }

    /// `g^k` for any integer `k`.
    pub fn pow(&self, g: ElementId, k: i64) -> ElementId {
        let base = if k < 0 { self.inv(g) } else { g };
        let e = k.unsigned_abs() % self.element_order(g) as u64;
        (0..e).fold(IDENTITY, |acc, _| self.mul(acc, base))
    }

    /// `[g, h] = g h g⁻¹ h⁻¹`.
    #[inline]
    pub fn comm(&self, g: ElementId, h: ElementId) -> ElementId {
        self.mul(self.mul(g, h), self.mul(self.inv(g), self.inv(h)))
    }

    pub fn commutator(&self, g: ElementId, h: ElementId) -> Result<ElementId, GroupError> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.comm(g, h))
    }

    /// `x g x⁻¹`.
    #[inline]
    pub fn conj(&self, x: ElementId, g: ElementId) -> ElementId {
        self.mul(self.mul(x, g), self.inv(x))
    }

    pub fn commutes(&self, g: ElementId, h: ElementId) -> bool {
        self.mul(g, h) == self.mul(h, g)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|g| (g + 1..self.order).all(|h| self.commutes(g, h)))
    }

    pub fn whole(&self) -> SubgroupSet {
        SubgroupSet::from_closed(ElementSet::full(self.order))
    }

    pub fn trivial_subgroup(&self) -> SubgroupSet {
        SubgroupSet::from_closed(ElementSet::from_elements(self.order, [IDENTITY]))
    }

    pub fn centralizer(&self, g: ElementId) -> Result<SubgroupSet, GroupError> {
        self.check(g)?;
        Ok(self.centralizer_of(g))
    }

    pub(crate) fn centralizer_of(&self, g: ElementId) -> SubgroupSet {
        let members = ElementSet::from_elements(self.order, (0..self.order).filter(|&h| self.commutes(g, h)));
        SubgroupSet::from_closed(members)
    }

    pub fn center(&self) -> SubgroupSet {
        let members = ElementSet::from_elements(
            self.order,
            (0..self.order).filter(|&g| (0..self.order).all(|h| self.commutes(g, h))),
        );
        SubgroupSet::from_closed(members)
    }

    pub fn derived_subgroup(&self) -> SubgroupSet {
        let mut gens = ElementSet::empty(self.order);
        for g in 0..self.order {
            for h in 0..self.order {
                gens.insert(self.comm(g, h));
            }
        }
        self.close(gens.iter())
    }

    /// The least subgroup containing `gens`.
    pub fn subgroup_generated(&self, gens: &[ElementId]) -> Result<SubgroupSet, GroupError> {
        for &g in gens {
            self.check(g)?;
        }
        Ok(self.close(gens.iter().copied()))
    }

    /// Closure of a generating set under right multiplication by the generators.
    pub(crate) fn close(&self, gens: impl IntoIterator<Item = ElementId>) -> SubgroupSet {
        let gens: Vec<ElementId> = gens.into_iter().filter(|&g| g != IDENTITY).collect();
        let mut members = ElementSet::empty(self.order);
        members.insert(IDENTITY);
        let mut queue = VecDeque::from([IDENTITY]);
        while let Some(x) = queue.pop_front() {
            for &s in &gens {
                let y = self.mul(x, s);
                if members.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        SubgroupSet::from_closed(members)
    }

    /// The least normal subgroup containing `gens`.
    pub fn normal_closure(&self, gens: &[ElementId]) -> Result<SubgroupSet, GroupError> {
        for &g in gens {
            self.check(g)?;
        }
        Ok(self.normal_close(gens.iter().copied()))
    }

    pub(crate) fn normal_close(&self, gens: impl IntoIterator<Item = ElementId>) -> SubgroupSet {
        let mut conjugates = ElementSet::empty(self.order);
        for g in gens {
            for x in 0..self.order {
                conjugates.insert(self.conj(x, g));
            }
        }
        self.close(conjugates.iter())
    }

    pub fn is_normal(&self, h: &SubgroupSet) -> bool {
        h.members
            .iter()
            .all(|g| (0..self.order).all(|x| h.members.contains(self.conj(x, g))))
    }

    /// Checks that an arbitrary element set is a subgroup and wraps it.
    pub fn subgroup_from_set(&self, set: ElementSet) -> Result<SubgroupSet, GroupError> {
        if set.universe() != self.order || !set.contains(IDENTITY) {
            return Err(GroupError::NotSubgroup);
        }
        let elems = set.elements();
        for &a in &elems {
            if !set.contains(self.inv(a)) {
                return Err(GroupError::NotSubgroup);
            }
            for &b in &elems {
                if !set.contains(self.mul(a, b)) {
                    return Err(GroupError::NotSubgroup);
                }
            }
        }
        Ok(SubgroupSet::from_closed(set))
    }

    /// The conjugacy class of `g`.
    pub fn conjugacy_class(&self, g: ElementId) -> ElementSet {
        ElementSet::from_elements(self.order, (0..self.order).map(|x| self.conj(x, g)))
    }

    /// Sizes of all conjugacy classes, sorted.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut seen = ElementSet::empty(self.order);
        let mut sizes = Vec::new();
        for g in 0..self.order {
            if !seen.contains(g) {
                let class = self.conjugacy_class(g);
                sizes.push(class.len());
                seen = seen.union(&class);
            }
        }
        sizes.sort_unstable();
        sizes
    }

    /// Quotient by a normal subgroup. Cosets are numbered by their least
    /// element, so the identity coset is `0`. Returns the quotient group and
    /// the projection as an array indexed by element.
    pub fn quotient(&self, n: &SubgroupSet) -> Result<(FiniteGroup, Vec<ElementId>), GroupError> {
        if n.members.universe() != self.order {
            return Err(GroupError::NotSubgroup);
        }
        if !self.is_normal(n) {
            return Err(GroupError::NotNormal);
        }
        let mut projection = vec![usize::MAX; self.order];
        let mut reps = Vec::new();
        for g in 0..self.order {
            if projection[g] == usize::MAX {
                let idx = reps.len();
                reps.push(g);
                for h in n.members.iter() {
                    projection[self.mul(g, h)] = idx;
                }
            }
        }
        let q = reps.len();
        let mut table = Vec::with_capacity(q * q);
        for &a in &reps {
            for &b in &reps {
                table.push(projection[self.mul(a, b)]);
            }
        }
        let quotient = FiniteGroup::from_table(q, table)?;
        Ok((quotient, projection))
    }

    /// Multiset fingerprint of element orders (sorted).
    pub fn order_profile(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.element_orders().collect();
        v.sort_unstable();
        v
    }

    /// A cheap conjugation-invariant fingerprint of `g`: its order, the size
    /// of its centralizer and the multiset of element orders inside the
    /// centralizer.
    pub fn element_fingerprint(&self, g: ElementId) -> (usize, Vec<usize>) {
        let mut orders: Vec<usize> = (0..self.order)
            .filter(|&h| self.commutes(g, h))
            .map(|h| self.element_order(h))
            .collect();
        orders.sort_unstable();
        (self.element_order(g), orders)
    }

    /// Direct product `self × other`, with `(a, b)` numbered `a * |other| + b`.
    pub fn direct_product(&self, other: &FiniteGroup) -> FiniteGroup {
        let (n, m) = (self.order, other.order);
        let mut table = Vec::with_capacity(n * m * n * m);
        for a in 0..n {
            for b in 0..m {
                for c in 0..n {
                    for d in 0..m {
                        table.push(self.mul(a, c) * m + other.mul(b, d));
                    }
                }
            }
        }
        FiniteGroup::from_table(n * m, table).expect("product of groups is a group")
    }

    /// The cyclic group of order `n`.
    pub fn cyclic(n: usize) -> FiniteGroup {
        let table = (0..n * n).map(|i| (i / n + i % n) % n).collect();
        FiniteGroup::from_table(n, table).expect("cyclic group").with_label(format!("C{n}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> FiniteGroup {
        // permutations of {0,1,2} in lexicographic order, identity first
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let mut table = Vec::new();
        for a in &perms {
            for b in &perms {
                // (a·b)(i) = a(b(i))
                table.push(idx([a[b[0]], a[b[1]], a[b[2]]]));
            }
        }
        FiniteGroup::from_table(6, table).unwrap()
    }

    #[test]
    fn identity_and_range() {
        let g = s3();
        for x in g.elements() {
            assert_eq!(g.multiply(IDENTITY, x).unwrap(), x);
        }
        assert!(matches!(g.multiply(6, 0), Err(GroupError::OutOfRange { .. })));
    }

    #[test]
    fn rejects_non_associative_table() {
        // a Latin square with identity 0 that is not associative (order 5 loop)
        let rows = [
            [0, 1, 2, 3, 4],
            [1, 0, 3, 4, 2],
            [2, 4, 0, 1, 3],
            [3, 2, 4, 0, 1],
            [4, 3, 1, 2, 0],
        ];
        let table = rows.iter().flatten().copied().collect();
        assert!(matches!(FiniteGroup::from_table(5, table), Err(GroupError::NotAGroup(_))));
    }

    #[test]
    fn s3_subgroups() {
        let g = s3();
        assert_eq!(g.derived_subgroup().order(), 3);
        assert!(g.center().is_trivial());
        let t = 1; // a transposition
        assert_eq!(g.normal_closure(&[t]).unwrap().order(), 6);
        assert_eq!(g.centralizer(t).unwrap().order(), 2);
        let a3 = g.derived_subgroup();
        let (q, pi) = g.quotient(&a3).unwrap();
        assert_eq!(q.order(), 2);
        for a in g.elements() {
            for b in g.elements() {
                assert_eq!(pi[g.mul(a, b)], q.mul(pi[a], pi[b]));
            }
        }
        let c2 = g.subgroup_generated(&[t]).unwrap();
        assert!(matches!(g.quotient(&c2), Err(GroupError::NotNormal)));
    }

    #[test]
    fn quotient_by_whole_is_trivial() {
        let g = s3();
        let (q, _) = g.quotient(&g.whole()).unwrap();
        assert_eq!(q.order(), 1);
    }

    #[test]
    fn cyclic_and_products() {
        let c4 = FiniteGroup::cyclic(4);
        let v4 = FiniteGroup::cyclic(2).direct_product(&FiniteGroup::cyclic(2));
        assert_ne!(c4.order_profile(), v4.order_profile());
        assert!(v4.is_abelian());
        assert_eq!(c4.pow(1, -1), 3);
    }
}
