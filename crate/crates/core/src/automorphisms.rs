//! Automorphism groups and isomorphism testing by backtracking over the
//! images of a generating sequence.

use std::collections::HashMap;

use crate::group::{ElementId, FiniteGroup, IDENTITY};
use crate::set::ElementSet;

/// Largest group order accepted by [`automorphism_group`].
pub const AUT_ORDER_LIMIT: usize = 1 << 12;

/// An automorphism stored as a flat permutation of element ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Automorphism {
    pub permutation: Vec<ElementId>,
}

impl Automorphism {
    pub fn identity(order: usize) -> Self {
        Automorphism {
            permutation: (0..order).collect(),
        }
    }

    #[inline]
    pub fn apply(&self, g: ElementId) -> ElementId {
        self.permutation[g]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        Automorphism {
            permutation: other.permutation.iter().map(|&g| self.permutation[g]).collect(),
        }
    }

    pub fn inverse(&self) -> Automorphism {
        let mut inv = vec![0; self.permutation.len()];
        for (g, &h) in self.permutation.iter().enumerate() {
            inv[h] = g;
        }
        Automorphism { permutation: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.permutation.iter().enumerate().all(|(g, &h)| g == h)
    }

    /// Checks bijectivity and multiplicativity against `group`.
    pub fn is_automorphism_of(&self, group: &FiniteGroup) -> bool {
        let n = group.order();
        if self.permutation.len() != n {
            return false;
        }
        let image = ElementSet::from_elements(n, self.permutation.iter().copied());
        image.len() == n
            && group.elements().all(|a| {
                group
                    .elements()
                    .all(|b| self.apply(group.mul(a, b)) == group.mul(self.apply(a), self.apply(b)))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AutError {
    #[error("group order {order} exceeds the automorphism limit {limit}")]
    TooLarge { order: usize, limit: usize },
}

/// Applies `phi` componentwise.
pub fn apply_to_tuple(phi: &Automorphism, t: &[ElementId]) -> Vec<ElementId> {
    t.iter().map(|&g| phi.apply(g)).collect()
}

type Fingerprint = (usize, Vec<usize>);

fn fingerprints(g: &FiniteGroup) -> Vec<Fingerprint> {
    g.elements().map(|x| g.element_fingerprint(x)).collect()
}

/// A generating sequence chosen greedily: at each step take the element
/// outside the current subgroup with the fewest fingerprint-compatible
/// candidates, preferring the larger resulting subgroup on ties.
fn generating_sequence(g: &FiniteGroup, fps: &[Fingerprint]) -> Vec<ElementId> {
    let mut class_size: HashMap<&Fingerprint, usize> = HashMap::new();
    for fp in fps {
        *class_size.entry(fp).or_default() += 1;
    }
    let mut seq = Vec::new();
    let mut current = g.trivial_subgroup();
    while current.order() < g.order() {
        let best = g
            .elements()
            .filter(|&x| !current.contains(x))
            .map(|x| {
                let mut gens = seq.clone();
                gens.push(x);
                let size = g.close(gens).order();
                (class_size[&fps[x]], std::cmp::Reverse(size), x)
            })
            .min()
            .expect("proper subgroup has an outside element");
        seq.push(best.2);
        current = g.close(seq.iter().copied());
    }
    seq
}

/// Extends images of `seq[..k]` to a map on the generated subgroup by BFS,
/// checking well-definedness and injectivity. `map` uses `usize::MAX` for
/// undefined entries.
fn extend(
    g: &FiniteGroup,
    h: &FiniteGroup,
    seq: &[ElementId],
    images: &[ElementId],
    map: &mut [ElementId],
    used: &mut ElementSet,
) -> bool {
    map.fill(usize::MAX);
    *used = ElementSet::empty(h.order());
    map[IDENTITY] = IDENTITY;
    used.insert(IDENTITY);
    let mut queue = vec![IDENTITY];
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        for (&s, &t) in seq.iter().zip(images) {
            let y = g.mul(x, s);
            let fy = h.mul(map[x], t);
            if map[y] == usize::MAX {
                if !used.insert(fy) {
                    return false;
                }
                map[y] = fy;
                queue.push(y);
            } else if map[y] != fy {
                return false;
            }
        }
    }
    true
}

/// Backtracking over images of `seq` in `h`. Calls `visit` for each
/// complete isomorphism; stops when `visit` returns false.
fn search(g: &FiniteGroup, h: &FiniteGroup, mut visit: impl FnMut(&[ElementId]) -> bool) {
    if g.order() != h.order() {
        return;
    }
    let fg = fingerprints(g);
    let fh = fingerprints(h);
    let seq = generating_sequence(g, &fg);
    let candidates: Vec<Vec<ElementId>> = seq
        .iter()
        .map(|&s| h.elements().filter(|&t| fh[t] == fg[s]).collect())
        .collect();
    let mut images = Vec::with_capacity(seq.len());
    let mut map = vec![usize::MAX; g.order()];
    let mut used = ElementSet::empty(h.order());
    fn rec(
        g: &FiniteGroup,
        h: &FiniteGroup,
        seq: &[ElementId],
        candidates: &[Vec<ElementId>],
        images: &mut Vec<ElementId>,
        map: &mut Vec<ElementId>,
        used: &mut ElementSet,
        visit: &mut dyn FnMut(&[ElementId]) -> bool,
    ) -> bool {
        let k = images.len();
        if k == seq.len() {
            extend(g, h, seq, images, map, used);
            return visit(map);
        }
        for &t in &candidates[k] {
            images.push(t);
            let ok = extend(g, h, &seq[..=k], images, map, used);
            let defined = map.iter().filter(|&&m| m != usize::MAX).count();
            // a complete sequence must produce a bijection
            let complete_ok = k + 1 < seq.len() || defined == g.order();
            if ok && complete_ok && !rec(g, h, seq, candidates, images, map, used, visit) {
                images.pop();
                return false;
            }
            images.pop();
        }
        true
    }
    rec(g, h, &seq, &candidates, &mut images, &mut map, &mut used, &mut visit);
}

/// All automorphisms of `g`, identity first.
pub fn automorphism_group(g: &FiniteGroup) -> Result<Vec<Automorphism>, AutError> {
    if g.order() > AUT_ORDER_LIMIT {
        return Err(AutError::TooLarge {
            order: g.order(),
            limit: AUT_ORDER_LIMIT,
        });
    }
    let mut out = Vec::new();
    search(g, g, |perm| {
        out.push(Automorphism {
            permutation: perm.to_vec(),
        });
        true
    });
    if let Some(pos) = out.iter().position(Automorphism::is_identity) {
        let id = out.remove(pos);
        out.insert(0, id);
    }
    Ok(out)
}

/// An isomorphism `g → h` as an array over the elements of `g`, if any.
pub fn is_isomorphic(g: &FiniteGroup, h: &FiniteGroup) -> Option<Vec<ElementId>> {
    if g.order() != h.order() || g.order_profile() != h.order_profile() || g.class_sizes() != h.class_sizes() {
        return None;
    }
    let mut found = None;
    search(g, h, |perm| {
        found = Some(perm.to_vec());
        false
    });
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;
    use crate::todd_coxeter::realize;

    fn grp(text: &str) -> FiniteGroup {
        realize(&parse_presentation(text).unwrap()).unwrap()
    }

    /// Brute force over all permutations fixing the identity.
    fn brute_aut_count(g: &FiniteGroup) -> usize {
        fn rec(g: &FiniteGroup, perm: &mut Vec<usize>, used: &mut Vec<bool>, count: &mut usize) {
            let k = perm.len();
            if k == g.order() {
                let phi = Automorphism { permutation: perm.clone() };
                if phi.is_automorphism_of(g) {
                    *count += 1;
                }
                return;
            }
            for t in 0..g.order() {
                if !used[t] && g.element_order(t) == g.element_order(k) {
                    used[t] = true;
                    perm.push(t);
                    rec(g, perm, used, count);
                    perm.pop();
                    used[t] = false;
                }
            }
        }
        let mut count = 0;
        let mut used = vec![false; g.order()];
        used[0] = true;
        rec(g, &mut vec![0], &mut used, &mut count);
        count
    }

    #[test]
    fn small_counts_match_brute_force() {
        for text in [
            "gens x, y; rel x^2 = y^3 = (x*y)^2 = 1;",
            "gens a, b; rel a^4 = b^2 = (a*b)^2 = 1;",
            "gens i, j; rel i^4 = 1; rel i^2 = j^2; rel j*i*j^-1 = i^-1;",
            "gens a, b; rel a^2 = b^2 = [a,b] = 1;",
            "gens a; rel a^8;",
        ] {
            let g = grp(text);
            let auts = automorphism_group(&g).unwrap();
            assert_eq!(auts.len(), brute_aut_count(&g), "{text}");
            assert!(auts[0].is_identity());
            for phi in &auts {
                assert!(phi.is_automorphism_of(&g));
            }
        }
    }

    #[test]
    fn isomorphism_checks() {
        let c4 = FiniteGroup::cyclic(4);
        let v4 = FiniteGroup::cyclic(2).direct_product(&FiniteGroup::cyclic(2));
        assert!(is_isomorphic(&c4, &v4).is_none());
        let s3a = grp("gens x, y; rel x^2 = y^3 = (x*y)^2 = 1;");
        let s3b = grp("gens a, b; rel a^2 = b^2 = (a*b)^3 = 1;");
        let iso = is_isomorphic(&s3a, &s3b).unwrap();
        for a in s3a.elements() {
            for b in s3a.elements() {
                assert_eq!(iso[s3a.mul(a, b)], s3b.mul(iso[a], iso[b]));
            }
        }
        let id = is_isomorphic(&s3a, &s3a).unwrap();
        assert_eq!(id.len(), 6);
    }

    #[test]
    fn compose_and_inverse() {
        let g = grp("gens a, b; rel a^4 = b^2 = (a*b)^2 = 1;");
        let auts = automorphism_group(&g).unwrap();
        for a in &auts {
            assert!(a.compose(&a.inverse()).is_identity());
            for b in &auts {
                assert!(auts.contains(&a.compose(b)));
            }
        }
    }
}
