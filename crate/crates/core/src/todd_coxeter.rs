//! Coset enumeration over the trivial subgroup (HLT strategy with immediate
//! coincidence processing), collapsed to a dense multiplication table.

use std::collections::VecDeque;

use crate::group::{ElementId, FiniteGroup, NamedGenerator};
use crate::presentation::Presentation;
use crate::GroupError;

pub const DEFAULT_MAX_COSETS: usize = 1 << 16;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnumerationError {
    #[error("coset limit {limit} exceeded (group infinite or limit too small)")]
    CosetLimit { limit: usize },
    #[error("presentation has no generators")]
    NoGenerators,
    #[error(transparent)]
    Group(#[from] GroupError),
}

struct CosetTable {
    cols: usize,
    table: Vec<u32>,
    parent: Vec<u32>,
    live: usize,
    max_live: usize,
    storage_cap: usize,
}

impl CosetTable {
    fn new(cols: usize, max_live: usize) -> Self {
        CosetTable {
            cols,
            table: vec![NONE; cols],
            parent: vec![0],
            live: 1,
            max_live,
            storage_cap: max_live.saturating_mul(8).max(1024),
        }
    }

    #[inline]
    fn get(&self, c: u32, x: usize) -> u32 {
        self.table[c as usize * self.cols + x]
    }

    #[inline]
    fn set(&mut self, c: u32, x: usize, d: u32) {
        self.table[c as usize * self.cols + x] = d;
    }

    fn allocated(&self) -> usize {
        self.parent.len()
    }

    fn is_live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn define(&mut self, c: u32, x: usize) -> Result<u32, EnumerationError> {
        if self.live >= self.max_live || self.allocated() >= self.storage_cap {
            return Err(EnumerationError::CosetLimit { limit: self.max_live });
        }
        let d = self.allocated() as u32;
        self.parent.push(d);
        self.table.extend(std::iter::repeat(NONE).take(self.cols));
        self.live += 1;
        self.set(c, x, d);
        self.set(d, x ^ 1, c);
        Ok(d)
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut root = c;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut x = c;
        while self.parent[x as usize] != root {
            let next = self.parent[x as usize];
            self.parent[x as usize] = root;
            x = next;
        }
        root
    }

    fn merge(&mut self, a: u32, b: u32, queue: &mut Vec<u32>) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (keep, dead) = if a < b { (a, b) } else { (b, a) };
        self.parent[dead as usize] = keep;
        self.live -= 1;
        queue.push(dead);
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut i = 0;
        while i < queue.len() {
            let e = queue[i];
            i += 1;
            for x in 0..self.cols {
                let f = self.get(e, x);
                if f == NONE {
                    continue;
                }
                self.set(f, x ^ 1, NONE);
                let e1 = self.rep(e);
                let f1 = self.rep(f);
                let ex = self.get(e1, x);
                if ex != NONE {
                    self.merge(f1, ex, &mut queue);
                } else {
                    let fx = self.get(f1, x ^ 1);
                    if fx != NONE {
                        self.merge(e1, fx, &mut queue);
                    } else {
                        self.set(e1, x, f1);
                        self.set(f1, x ^ 1, e1);
                    }
                }
            }
        }
    }

    /// Scans `word` (a column sequence) from coset `c`, defining cosets as
    /// needed, and records the deduction or coincidence at the end.
    fn scan_and_fill(&mut self, c: u32, word: &[usize]) -> Result<(), EnumerationError> {
        if word.is_empty() {
            return Ok(());
        }
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0usize, word.len() as isize - 1);
        loop {
            while i as isize <= j {
                let next = self.get(f, word[i]);
                if next == NONE {
                    break;
                }
                f = next;
                i += 1;
            }
            if i as isize > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i as isize {
                let next = self.get(b, word[j as usize] ^ 1);
                if next == NONE {
                    break;
                }
                b = next;
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return Ok(());
            }
            if j == i as isize {
                let x = word[i];
                self.set(f, x, b);
                self.set(b, x ^ 1, f);
                return Ok(());
            }
            self.define(f, word[i])?;
        }
    }

    /// Drops dead cosets, keeping live ones in order. Returns the new index
    /// of each old coset (`NONE` for dead ones).
    fn compact(&mut self) -> Vec<u32> {
        let n = self.allocated();
        let mut remap = vec![NONE; n];
        let mut next = 0u32;
        for c in 0..n as u32 {
            if self.is_live(c) {
                remap[c as usize] = next;
                next += 1;
            }
        }
        let mut table = Vec::with_capacity(next as usize * self.cols);
        for c in 0..n as u32 {
            if remap[c as usize] == NONE {
                continue;
            }
            for x in 0..self.cols {
                let d = self.get(c, x);
                table.push(if d == NONE { NONE } else { remap[d as usize] });
            }
        }
        self.table = table;
        self.parent = (0..next).collect();
        remap
    }
}

/// Enumerates the cosets of the trivial subgroup and returns the group as
/// a multiplication table. Elements are numbered by breadth-first search
/// from the identity over the columns `g0, g0⁻¹, g1, g1⁻¹, ...`.
pub fn todd_coxeter(presentation: &Presentation, max_cosets: usize) -> Result<FiniteGroup, EnumerationError> {
    let ngens = presentation.generators.len();
    if ngens == 0 {
        return Err(EnumerationError::NoGenerators);
    }
    let cols = 2 * ngens;
    let relators: Vec<Vec<usize>> = presentation
        .relators
        .iter()
        .filter(|r| !r.is_identity())
        .map(|r| r.letters().map(|(g, s)| 2 * g + usize::from(s < 0)).collect())
        .collect();

    let mut ct = CosetTable::new(cols, max_cosets.max(1));
    let mut c = 0u32;
    while (c as usize) < ct.allocated() {
        if ct.is_live(c) {
            for r in &relators {
                ct.scan_and_fill(c, r)?;
                if !ct.is_live(c) {
                    break;
                }
            }
            for x in 0..cols {
                if !ct.is_live(c) {
                    break;
                }
                if ct.get(c, x) == NONE {
                    ct.define(c, x)?;
                }
            }
        }
        c += 1;
        if ct.allocated() > 4096 && ct.allocated() > 2 * ct.live && (c as usize) < ct.allocated() {
            let remap = ct.compact();
            // resume at the first live coset at or after the old position
            let n = remap.len();
            c = (c as usize..n).map(|k| remap[k]).find(|&k| k != NONE).unwrap_or(ct.allocated() as u32);
        }
    }
    ct.compact();
    collapse(presentation, &ct)
}

/// Enumerates with the default coset limit.
pub fn realize(presentation: &Presentation) -> Result<FiniteGroup, EnumerationError> {
    todd_coxeter(presentation, DEFAULT_MAX_COSETS)
}

fn collapse(presentation: &Presentation, ct: &CosetTable) -> Result<FiniteGroup, EnumerationError> {
    let n = ct.allocated();
    let cols = ct.cols;
    // breadth-first renumbering from coset 0
    let mut order = Vec::with_capacity(n);
    let mut new_id = vec![usize::MAX; n];
    // (parent coset, column) of the defining edge, in old numbering
    let mut tree: Vec<(u32, usize)> = vec![(0, 0); n];
    new_id[0] = 0;
    order.push(0u32);
    let mut queue = VecDeque::from([0u32]);
    while let Some(c) = queue.pop_front() {
        for x in 0..cols {
            let d = ct.get(c, x);
            if new_id[d as usize] == usize::MAX {
                new_id[d as usize] = order.len();
                order.push(d);
                tree[d as usize] = (c, x);
                queue.push_back(d);
            }
        }
    }
    debug_assert_eq!(order.len(), n);
    // mult[c][d] = act(mult[c][parent(d)], x) along the tree, old numbering
    let mut mult_old = vec![0u32; n * n];
    for c in 0..n {
        mult_old[c * n] = c as u32;
        for &d in &order[1..] {
            let (p, x) = tree[d as usize];
            let prev = mult_old[c * n + p as usize];
            mult_old[c * n + d as usize] = ct.get(prev, x);
        }
    }
    let mut table = vec![0usize; n * n];
    for c in 0..n {
        for d in 0..n {
            table[new_id[c] * n + new_id[d]] = new_id[mult_old[c * n + d] as usize];
        }
    }
    let generators = presentation
        .generators
        .iter()
        .enumerate()
        .map(|(i, name)| NamedGenerator {
            name: name.clone(),
            element: new_id[ct.get(0, 2 * i) as usize] as ElementId,
        })
        .collect();
    let mut group = FiniteGroup::from_table(n, table)?.with_generators(generators);
    if let Some(label) = &presentation.label {
        group = group.with_label(label.clone());
    }
    Ok(group)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    fn order_of(text: &str) -> usize {
        realize(&parse_presentation(text).unwrap()).unwrap().order()
    }

    #[test]
    fn trivial_and_small() {
        assert_eq!(order_of("gens x; rel x = 1;"), 1);
        assert_eq!(order_of("gens x; rel x^7;"), 7);
        assert_eq!(order_of("gens x, y; rel x^2 = y^3 = (x*y)^2 = 1;"), 6);
        assert_eq!(order_of("gens a, b; rel a^2 = b^3 = (a*b)^5 = 1;"), 60);
        assert_eq!(order_of("gens x, y; rel x^4 = y^9 = 1; rel x*y*x^-1 = y^-1;"), 36);
    }

    #[test]
    fn collapse_to_trivial_is_not_an_error() {
        assert_eq!(order_of("gens x, y; rel x^2; rel x^3; rel y = x;"), 1);
    }

    #[test]
    fn infinite_hits_limit() {
        let p = parse_presentation("gens x, y; rel [x, y];").unwrap();
        assert!(matches!(todd_coxeter(&p, 500), Err(EnumerationError::CosetLimit { .. })));
    }

    #[test]
    fn relators_hold_and_deterministic() {
        let text = "gens x, y; rel x^2 = y^3 = (x*y)^2 = 1;";
        let p = parse_presentation(text).unwrap();
        let g = realize(&p).unwrap();
        let assignment: Vec<usize> = g.generators().iter().map(|n| n.element).collect();
        for r in &p.relators {
            assert_eq!(r.eval_total(&g, &assignment), 0);
        }
        assert!(!g.is_abelian());
        let h = realize(&p).unwrap();
        assert_eq!(g, h);
    }
}
