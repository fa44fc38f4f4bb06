//! The CCT and monolithic predicates, the normal subgroup lattice and
//! quotient recognition.

use std::collections::BTreeSet;

use crate::automorphisms::is_isomorphic;
use crate::group::{ElementId, FiniteGroup, IDENTITY};
use crate::set::SubgroupSet;

/// Verdict of the commutativity-transitivity test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CctVerdict {
    pub is_cct: bool,
    /// `(x, y, w)` non-central with `[x,y] = [y,w] = 1` and `[x,w] ≠ 1`.
    pub witness: Option<(ElementId, ElementId, ElementId)>,
    /// Set for abelian input, where the predicate holds trivially.
    pub vacuous: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonolithicVerdict {
    pub is_monolithic: bool,
    pub mon: SubgroupSet,
}

/// A group is CCT iff every non-central element has an abelian centralizer.
pub fn is_cct(g: &FiniteGroup) -> CctVerdict {
    if g.is_abelian() {
        return CctVerdict {
            is_cct: true,
            witness: None,
            vacuous: true,
        };
    }
    let center = g.center();
    for y in g.elements().filter(|&y| !center.contains(y)) {
        let c = g.centralizer_of(y).elements();
        for (i, &x) in c.iter().enumerate() {
            if let Some(&w) = c[i + 1..].iter().find(|&&w| !g.commutes(x, w)) {
                return CctVerdict {
                    is_cct: false,
                    witness: Some((x, y, w)),
                    vacuous: false,
                };
            }
        }
    }
    CctVerdict {
        is_cct: true,
        witness: None,
        vacuous: false,
    }
}

/// The intersection of all non-trivial normal subgroups, computed as the
/// intersection of the normal closures of the non-identity elements.
pub fn mon(g: &FiniteGroup) -> MonolithicVerdict {
    let mut m = g.whole();
    for x in g.elements().skip(1) {
        m = m.intersect(&g.normal_close([x]));
        if m.is_trivial() {
            break;
        }
    }
    MonolithicVerdict {
        is_monolithic: m.order() > 1,
        mon: m,
    }
}

/// Every normal subgroup, sorted by order and then by members. Built as the
/// join-closure of the normal closures of single elements.
pub fn all_normal_subgroups(g: &FiniteGroup) -> Vec<SubgroupSet> {
    let mut found: BTreeSet<SubgroupSet> = BTreeSet::new();
    found.insert(g.trivial_subgroup());
    let mut frontier: Vec<SubgroupSet> = Vec::new();
    for x in g.elements().skip(1) {
        let n = g.normal_close([x]);
        if found.insert(n.clone()) {
            frontier.push(n);
        }
    }
    let atoms: Vec<SubgroupSet> = frontier.clone();
    while let Some(a) = frontier.pop() {
        for b in &atoms {
            if b.is_subgroup_of(&a) {
                continue;
            }
            let join = g.close(a.members().union(b.members()).iter());
            if found.insert(join.clone()) {
                frontier.push(join);
            }
        }
    }
    let mut out: Vec<SubgroupSet> = found.into_iter().collect();
    out.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.cmp(b)));
    out
}

/// Finds a normal subgroup `N` with `G/N ≅ H`. Returns `N` together with a
/// surjective homomorphism `G → H` (as an array over the elements of `G`)
/// whose kernel is `N`.
pub fn has_quotient_isomorphic_to(g: &FiniteGroup, h: &FiniteGroup) -> Option<(SubgroupSet, Vec<ElementId>)> {
    if g.order() % h.order() != 0 {
        return None;
    }
    let index_target = g.order() / h.order();
    for n in all_normal_subgroups(g).into_iter().filter(|n| n.order() == index_target) {
        let (q, projection) = g.quotient(&n).expect("normal subgroup");
        if let Some(iso) = is_isomorphic(&q, h) {
            let map = projection.iter().map(|&c| iso[c]).collect();
            return Some((n, map));
        }
    }
    None
}

/// Whether `n` is an abelian normal subgroup of prime index.
pub fn is_abelian_normal_of_prime_index(g: &FiniteGroup, n: &SubgroupSet) -> bool {
    let index = g.order() / n.order();
    let elems = n.elements();
    g.is_normal(n)
        && is_prime(index)
        && elems.iter().all(|&a| elems.iter().all(|&b| g.commutes(a, b)))
}

fn is_prime(k: usize) -> bool {
    k >= 2 && (2..).take_while(|d| d * d <= k).all(|d| k % d != 0)
}

/// Whether the trivial group is the only normal subgroup below `n` other
/// than `n` itself, i.e. `n` is a minimal normal subgroup.
pub fn is_minimal_normal(g: &FiniteGroup, n: &SubgroupSet) -> bool {
    !n.is_trivial()
        && g.is_normal(n)
        && n.elements().into_iter().filter(|&x| x != IDENTITY).all(|x| g.normal_close([x]) == *n)
}
