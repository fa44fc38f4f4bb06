//! Exhaustive structure search.
//!
//! For groups of order at most 64 every subset is a `u64` mask. Each
//! conjugacy relation `[a, y] = w` has its first-row symbol `a` alone on the
//! left, so once the second row and `z` are fixed it confines `a` to the
//! coset mask `{x : x y x⁻¹ = w y}`. The second row is enumerated with
//! these masks as pruning, `ρ2b` is solved from the second surface relation
//! and `τ1b` from the first, both as conjugacy conditions. Generation and
//! the subgroups `K1`, `K2` are tracked through a precomputed join table on
//! the subgroup lattice.

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;

use rayon::prelude::*;

use crate::group::{ElementId, FiniteGroup, IDENTITY};
use crate::set::BitIter;

use super::backtrack::backtrack_tuples;
use super::relations::{generate_structure_relations, RelationSet, Symbol};
use super::StructureError;

/// Largest group order handled by the bitmask engine.
pub const ENGINE_ORDER_LIMIT: usize = 64;

#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    /// Required order of `z`; any order ≥ 2 when unset.
    pub n: Option<usize>,
    /// Restrict `z` to a single element.
    pub z: Option<ElementId>,
    /// Stop after this many structures (deterministic enumeration order).
    pub first: Option<usize>,
    /// Keep every structure found, not just the counts.
    pub collect: bool,
    pub threads: Option<usize>,
    /// Sort collected tuples lexicographically by element id.
    pub canonical_order: bool,
    /// Permit `b > 2`, whose search space grows like `|G|^(2b-1)`.
    pub allow_large_genus: bool,
    /// Use the generic backtracker even where the bitmask engine applies.
    pub backtracking: bool,
    /// Only run these shards. Shards are the `(z, ρ21, τ21)` triples in
    /// element order (one per `z` on the backtracking path); the list is
    /// fixed by the group and `n`/`z`, so indices are stable across runs.
    pub shard_range: Option<Range<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchOutcome {
    pub count: u64,
    /// False when the search stopped early.
    pub complete: bool,
    pub structures: Vec<Vec<ElementId>>,
    /// Counts keyed by `(|K1|, |K2|)`. Empty for prestructures.
    pub kernel_orders: BTreeMap<(usize, usize), u64>,
    /// Counts keyed by the value of `z`.
    pub z_counts: BTreeMap<ElementId, u64>,
    /// Counts keyed by the order of `z`.
    pub z_orders: BTreeMap<usize, u64>,
    /// Count per shard, indexed like the deterministic shard list; zero for
    /// shards that were skipped or not reached.
    pub shard_counts: Vec<u64>,
}

struct Tables {
    n: usize,
    mul: Vec<u8>,
    inv: Vec<u8>,
    /// `cs[a·n + d] = {x : x a x⁻¹ = d}`
    cs: Vec<u64>,
    /// `csi[a·n + d] = {t : t⁻¹ a t = d}`
    csi: Vec<u64>,
    noncentral: u64,
    orders: Vec<usize>,
}

impl Tables {
    fn new(g: &FiniteGroup) -> Self {
        let n = g.order();
        let mut mul = vec![0u8; n * n];
        for a in 0..n {
            for b in 0..n {
                mul[a * n + b] = g.mul(a, b) as u8;
            }
        }
        let inv: Vec<u8> = (0..n).map(|a| g.inv(a) as u8).collect();
        let mut cs = vec![0u64; n * n];
        let mut csi = vec![0u64; n * n];
        let mut noncentral = 0u64;
        for a in 0..n {
            for x in 0..n {
                let d = g.conj(x, a);
                cs[a * n + d] |= 1 << x;
                csi[a * n + d] |= 1 << inv[x];
                if d != a {
                    noncentral |= 1 << a;
                }
            }
        }
        Tables {
            n,
            mul,
            inv,
            cs,
            csi,
            noncentral,
            orders: g.element_orders().collect(),
        }
    }

    #[inline]
    fn m(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.n + b as usize]
    }
}

/// Every subgroup with the table `join[h·n + g] = ⟨h, g⟩`.
struct Lattice {
    n: usize,
    orders: Vec<usize>,
    join: Vec<u32>,
    full: u32,
}

impl Lattice {
    fn build(t: &Tables) -> Self {
        let n = t.n;
        let mut masks: Vec<u64> = vec![1];
        let mut gens: Vec<Vec<u8>> = vec![Vec::new()];
        let mut index: HashMap<u64, u32> = HashMap::from([(1u64, 0u32)]);
        let mut join = Vec::new();
        let mut i = 0;
        while i < masks.len() {
            for g in 0..n {
                if masks[i] >> g & 1 == 1 {
                    join.push(i as u32);
                    continue;
                }
                let mut gs = gens[i].clone();
                gs.push(g as u8);
                let mask = Self::closure(t, &gs);
                let id = *index.entry(mask).or_insert_with(|| {
                    masks.push(mask);
                    gens.push(gs);
                    (masks.len() - 1) as u32
                });
                join.push(id);
            }
            i += 1;
        }
        let full_mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Lattice {
            n,
            orders: masks.iter().map(|m| m.count_ones() as usize).collect(),
            join,
            full: index[&full_mask],
        }
    }

    fn closure(t: &Tables, gens: &[u8]) -> u64 {
        let mut mask = 1u64;
        let mut queue = vec![0u8];
        while let Some(x) = queue.pop() {
            for &s in gens {
                let y = t.m(x, s);
                if mask >> y & 1 == 0 {
                    mask |= 1 << y;
                    queue.push(y);
                }
            }
        }
        mask
    }

    #[inline]
    fn join(&self, h: u32, g: u8) -> u32 {
        self.join[h as usize * self.n + g as usize]
    }
}

/// A conjugacy relation `[a, y] = w` compiled for mask lookups.
struct FirstRel {
    a: usize,
    y: usize,
    w: Vec<(usize, bool)>,
}

struct Plan {
    b: usize,
    width: usize,
    /// Second-row positions for steps `1..2b`; `ρ2b` is step `2b`.
    seq2: Vec<usize>,
    rho2b: usize,
    tau1b: usize,
    rels_at: Vec<Vec<FirstRel>>,
    surface: bool,
}

impl Plan {
    fn new(rels: &RelationSet, surface: bool) -> Self {
        let b = rels.b;
        let width = 4 * b + 1;
        let rho2b = Symbol::Rho(2, b).index(b);
        let tau2b = Symbol::Tau(2, b).index(b);
        let mut seq2: Vec<usize> = (2 * b..4 * b).filter(|&p| p != rho2b && p != tau2b).collect();
        seq2.push(tau2b);
        let mut step_of = vec![usize::MAX; width];
        step_of[4 * b] = 0;
        for (i, &p) in seq2.iter().enumerate() {
            step_of[p] = i + 1;
        }
        step_of[rho2b] = 2 * b;
        let mut rels_at: Vec<Vec<FirstRel>> = (0..=2 * b).map(|_| Vec::new()).collect();
        for r in &rels.relations {
            let Some((a, y)) = r.commutator else { continue };
            let w: Vec<(usize, bool)> = r.rhs.letters().map(|(p, s)| (p, s < 0)).collect();
            let step = w.iter().map(|&(p, _)| step_of[p]).chain([step_of[y]]).max().unwrap_or(0);
            rels_at[step].push(FirstRel { a, y, w });
        }
        Plan {
            b,
            width,
            seq2,
            rho2b,
            tau1b: Symbol::Tau(1, b).index(b),
            rels_at,
            surface,
        }
    }
}

type Emit<'e> = &'e mut dyn FnMut(&[u8]) -> bool;

struct Worker<'a, 'e> {
    t: &'a Tables,
    lat: Option<&'a Lattice>,
    plan: &'a Plan,
    vals: Vec<u8>,
    masks: Vec<Vec<u64>>,
    k2: Vec<u32>,
    count: u64,
    hist: Vec<u64>,
    emit: Option<Emit<'e>>,
    stopped: bool,
}

impl<'a, 'e> Worker<'a, 'e> {
    fn new(t: &'a Tables, lat: Option<&'a Lattice>, plan: &'a Plan, emit: Option<Emit<'e>>) -> Self {
        let b = plan.b;
        Worker {
            t,
            lat,
            plan,
            vals: vec![0; plan.width],
            masks: vec![vec![0; 2 * b]; 2 * b + 1],
            k2: vec![0; 2 * b + 1],
            count: 0,
            hist: if lat.is_some() { vec![0; (t.n + 1) * (t.n + 1)] } else { Vec::new() },
            emit,
            stopped: false,
        }
    }

    fn eval(&self, w: &[(usize, bool)]) -> u8 {
        let t = self.t;
        w.iter().fold(IDENTITY as u8, |acc, &(p, inverse)| {
            let x = self.vals[p];
            t.m(acc, if inverse { t.inv[x as usize] } else { x })
        })
    }

    /// Intersects the first-row masks with the relations that become
    /// evaluable at `step`. False when some mask empties.
    fn apply(&mut self, step: usize) -> bool {
        let n = self.t.n;
        let base = if step == 0 { vec![self.t.noncentral; 2 * self.plan.b] } else { self.masks[step - 1].clone() };
        self.masks[step].copy_from_slice(&base);
        for r in &self.plan.rels_at[step] {
            let w = self.eval(&r.w);
            let y = self.vals[r.y];
            let d = self.t.m(w, y);
            let m = self.masks[step][r.a] & self.t.cs[y as usize * n + d as usize];
            self.masks[step][r.a] = m;
            if m == 0 {
                return false;
            }
        }
        true
    }

    fn chain_k2(&mut self, step: usize, x: u8) {
        if let Some(lat) = self.lat {
            let prev = if step == 0 { 0 } else { self.k2[step - 1] };
            self.k2[step] = lat.join(prev, x);
        }
    }

    fn run_shard(&mut self, z: u8, fixed: &[u8]) {
        let b = self.plan.b;
        self.vals[4 * b] = z;
        if !self.apply(0) {
            return;
        }
        self.chain_k2(0, z);
        self.row2(1, fixed);
    }

    fn row2(&mut self, step: usize, fixed: &[u8]) {
        if self.stopped {
            return;
        }
        let b = self.plan.b;
        let t = self.t;
        if step == 2 * b {
            let cand = if self.plan.surface {
                // ρ2b⁻¹ τ2b ρ2b = P⁻¹ z⁻¹ τ21⋯τ2b with P = ∏_{k<b} ρ2k⁻¹ τ2k ρ2k
                let mut p = IDENTITY as u8;
                for k in 1..b {
                    let r = self.vals[Symbol::Rho(2, k).index(b)];
                    let s = self.vals[Symbol::Tau(2, k).index(b)];
                    p = t.m(p, t.m(t.m(t.inv[r as usize], s), r));
                }
                let mut f = t.m(t.inv[p as usize], t.inv[self.vals[4 * b] as usize]);
                for k in 1..=b {
                    f = t.m(f, self.vals[Symbol::Tau(2, k).index(b)]);
                }
                let tau2b = self.vals[Symbol::Tau(2, b).index(b)];
                t.csi[tau2b as usize * t.n + f as usize] & t.noncentral
            } else {
                t.noncentral
            };
            for r in BitIter(cand) {
                self.vals[self.plan.rho2b] = r as u8;
                if self.apply(step) {
                    self.chain_k2(step, r as u8);
                    self.row1_start();
                    if self.stopped {
                        return;
                    }
                }
            }
            return;
        }
        let pos = self.plan.seq2[step - 1];
        let cand = match fixed.get(step - 1) {
            Some(&x) => (1u64 << x) & t.noncentral,
            None => t.noncentral,
        };
        for x in BitIter(cand) {
            self.vals[pos] = x as u8;
            if self.apply(step) {
                self.chain_k2(step, x as u8);
                self.row2(step + 1, fixed);
                if self.stopped {
                    return;
                }
            }
        }
    }

    fn row1_start(&mut self) {
        let b = self.plan.b;
        if !self.plan.surface {
            if self.emit.is_none() {
                let last = &self.masks[2 * b];
                self.count += last.iter().map(|m| m.count_ones() as u64).product::<u64>();
            } else {
                self.row1_all(0);
            }
            return;
        }
        let lat = self.lat.expect("lattice is built for structure searches");
        let z = self.vals[4 * b];
        self.row1(0, self.k2[2 * b], lat.join(0, z));
    }

    /// Prestructure enumeration: every first-row combination.
    fn row1_all(&mut self, pos: usize) {
        let b = self.plan.b;
        if pos == 2 * b {
            self.count += 1;
            if let Some(emit) = self.emit.as_mut() {
                if !emit(&self.vals) {
                    self.stopped = true;
                }
            }
            return;
        }
        for x in BitIter(self.masks[2 * b][pos]) {
            self.vals[pos] = x as u8;
            self.row1_all(pos + 1);
            if self.stopped {
                return;
            }
        }
    }

    fn row1(&mut self, pos: usize, gid: u32, kid: u32) {
        let b = self.plan.b;
        let t = self.t;
        let lat = self.lat.expect("lattice");
        let last = &self.masks[2 * b];
        if pos + 2 < 2 * b {
            for x in BitIter(last[pos]) {
                self.vals[pos] = x as u8;
                self.row1(pos + 1, lat.join(gid, x as u8), lat.join(kid, x as u8));
                if self.stopped {
                    return;
                }
            }
            return;
        }
        // pos is ρ1b: τ1b⁻¹ (ρ1b Q T') τ1b = ρ1b z with
        // Q = ∏_{k=b-1..1} ρ1k⁻¹ τ1k⁻¹ ρ1k and T' = τ11⋯τ1(b-1)
        let mut qt = IDENTITY as u8;
        for k in (1..b).rev() {
            let r = self.vals[Symbol::Rho(1, k).index(b)];
            let s = self.vals[Symbol::Tau(1, k).index(b)];
            qt = t.m(qt, t.m(t.m(t.inv[r as usize], t.inv[s as usize]), r));
        }
        for k in 1..b {
            qt = t.m(qt, self.vals[Symbol::Tau(1, k).index(b)]);
        }
        let z = self.vals[4 * b];
        let k2_order = lat.orders[self.k2[2 * b] as usize];
        let tau_mask = last[self.plan.tau1b];
        for r in BitIter(last[pos]) {
            let r = r as u8;
            self.vals[pos] = r;
            let (g1, k1) = (lat.join(gid, r), lat.join(kid, r));
            let d = t.m(r, qt);
            let e = t.m(r, z);
            let cand = tau_mask & t.csi[d as usize * t.n + e as usize];
            for s in BitIter(cand) {
                let s = s as u8;
                if lat.join(g1, s) != lat.full {
                    continue;
                }
                let k1_order = lat.orders[lat.join(k1, s) as usize];
                self.count += 1;
                self.hist[k1_order * (t.n + 1) + k2_order] += 1;
                if let Some(emit) = self.emit.as_mut() {
                    self.vals[self.plan.tau1b] = s;
                    if !emit(&self.vals) {
                        self.stopped = true;
                        return;
                    }
                }
            }
        }
    }
}

#[derive(Default)]
struct Partial {
    count: u64,
    hist: Vec<u64>,
    z_counts: BTreeMap<ElementId, u64>,
    shard_counts: BTreeMap<usize, u64>,
    tuples: Vec<Vec<u8>>,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.count += other.count;
        if self.hist.len() < other.hist.len() {
            self.hist.resize(other.hist.len(), 0);
        }
        for (a, b) in self.hist.iter_mut().zip(&other.hist) {
            *a += b;
        }
        for (z, c) in other.z_counts {
            *self.z_counts.entry(z).or_default() += c;
        }
        self.shard_counts.extend(other.shard_counts);
        self.tuples.extend(other.tuples);
        self
    }
}

fn clamp_range(opts: &SearchOptions, len: usize) -> Range<usize> {
    match &opts.shard_range {
        Some(r) => r.start.min(len)..r.end.min(len).max(r.start.min(len)),
        None => 0..len,
    }
}

fn dense(counts: &BTreeMap<usize, u64>, len: usize) -> Vec<u64> {
    let mut v = vec![0; len];
    for (&i, &c) in counts {
        v[i] = c;
    }
    v
}

fn z_candidates(g: &FiniteGroup, opts: &SearchOptions) -> Vec<ElementId> {
    let mut is_comm = vec![false; g.order()];
    for x in g.elements() {
        for y in g.elements() {
            is_comm[g.comm(x, y)] = true;
        }
    }
    g.elements()
        .filter(|&z| z != IDENTITY && is_comm[z])
        .filter(|&z| opts.n.map_or(true, |n| g.element_order(z) == n))
        .filter(|&z| opts.z.map_or(true, |w| w == z))
        .collect()
}

fn check_args(b: usize, opts: &SearchOptions) -> Result<(), StructureError> {
    if b < 2 {
        return Err(StructureError::GenusTooSmall(b));
    }
    if b > 2 && !opts.allow_large_genus {
        return Err(StructureError::GenusNeedsOverride(b));
    }
    if let Some(n) = opts.n {
        if n < 2 {
            return Err(StructureError::BranchingOrder(n));
        }
    }
    Ok(())
}

fn run(
    g: &FiniteGroup,
    b: usize,
    opts: &SearchOptions,
    surface: bool,
    mut visit: Option<&mut dyn FnMut(&[ElementId]) -> bool>,
) -> Result<SearchOutcome, StructureError> {
    check_args(b, opts)?;
    if opts.backtracking || g.order() > ENGINE_ORDER_LIMIT {
        return run_fallback(g, b, opts, surface, visit);
    }
    let rels = generate_structure_relations(b, None)?;
    let plan = Plan::new(&rels, surface);
    let tables = Tables::new(g);
    let lattice = surface.then(|| Lattice::build(&tables));
    let zs = z_candidates(g, opts);
    let nc: Vec<u8> = BitIter(tables.noncentral).map(|x| x as u8).collect();
    let mut shards: Vec<(u8, [u8; 2])> = Vec::new();
    for &z in &zs {
        for &a in &nc {
            shards.extend(nc.iter().map(|&c| (z as u8, [a, c])));
        }
    }
    let active = clamp_range(opts, shards.len());

    let sequential = visit.is_some() || opts.first.is_some();
    let mut complete = true;
    let total = if sequential {
        let limit = opts.first.unwrap_or(usize::MAX);
        let mut kept: Vec<Vec<u8>> = Vec::new();
        let keep = opts.collect || opts.first.is_some();
        let mut wide: Vec<ElementId> = Vec::new();
        let mut emit = |v: &[u8]| {
            if keep {
                kept.push(v.to_vec());
            }
            let go_on = match visit.as_mut() {
                Some(f) => {
                    wide.clear();
                    wide.extend(v.iter().map(|&x| x as ElementId));
                    f(&wide)
                }
                None => true,
            };
            go_on && kept.len() < limit
        };
        let mut acc = Partial::default();
        let mut worker = Worker::new(&tables, lattice.as_ref(), &plan, Some(&mut emit));
        for (i, &(z, fixed)) in shards.iter().enumerate().take(active.end).skip(active.start) {
            let before = worker.count;
            worker.run_shard(z, &fixed);
            *acc.z_counts.entry(z as ElementId).or_default() += worker.count - before;
            acc.shard_counts.insert(i, worker.count - before);
            if worker.stopped {
                complete = false;
                break;
            }
        }
        acc.count = worker.count;
        acc.hist = std::mem::take(&mut worker.hist);
        drop(worker);
        acc.tuples = kept;
        acc
    } else {
        let work = || {
            shards[active.clone()]
                .par_iter()
                .enumerate()
                .map(|(i, &(z, fixed))| {
                    let mut tuples = Vec::new();
                    let mut push = |v: &[u8]| {
                        tuples.push(v.to_vec());
                        true
                    };
                    let emit: Option<Emit> = if opts.collect { Some(&mut push) } else { None };
                    let mut worker = Worker::new(&tables, lattice.as_ref(), &plan, emit);
                    worker.run_shard(z, &fixed);
                    let (count, hist) = (worker.count, std::mem::take(&mut worker.hist));
                    drop(worker);
                    Partial {
                        count,
                        hist,
                        z_counts: BTreeMap::from([(z as ElementId, count)]),
                        shard_counts: BTreeMap::from([(active.start + i, count)]),
                        tuples,
                    }
                })
                .reduce(Partial::default, Partial::merge)
        };
        match opts.threads {
            Some(k) => rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .expect("thread pool")
                .install(work),
            None => work(),
        }
    };

    let n1 = tables.n + 1;
    let mut out = SearchOutcome {
        count: total.count,
        complete,
        structures: total.tuples.into_iter().map(|v| v.into_iter().map(usize::from).collect()).collect(),
        kernel_orders: total
            .hist
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c > 0)
            .map(|(i, &c)| ((i / n1, i % n1), c))
            .collect(),
        z_counts: total.z_counts.into_iter().filter(|&(_, c)| c > 0).collect(),
        z_orders: BTreeMap::new(),
        shard_counts: dense(&total.shard_counts, shards.len()),
    };
    for (&z, &c) in &out.z_counts {
        *out.z_orders.entry(tables.orders[z]).or_default() += c;
    }
    if opts.canonical_order {
        out.structures.sort();
    }
    Ok(out)
}

/// Backtracking search for groups beyond the bitmask engine.
fn run_fallback(
    g: &FiniteGroup,
    b: usize,
    opts: &SearchOptions,
    surface: bool,
    mut visit: Option<&mut dyn FnMut(&[ElementId]) -> bool>,
) -> Result<SearchOutcome, StructureError> {
    let center = g.center();
    let nc: Vec<ElementId> = g.elements().filter(|&x| !center.contains(x)).collect();
    let mut out = SearchOutcome {
        complete: true,
        ..Default::default()
    };
    let limit = opts.first.unwrap_or(usize::MAX);
    let zs = z_candidates(g, opts);
    let active = clamp_range(opts, zs.len());
    out.shard_counts = vec![0; zs.len()];
    for (i, z) in zs.into_iter().enumerate().take(active.end).skip(active.start) {
        let mut candidates = vec![nc.clone(); 4 * b + 1];
        candidates[4 * b] = vec![z];
        let mut found = 0u64;
        backtrack_tuples(g, b, None, &candidates, surface, surface, &mut |t| {
            found += 1;
            if surface {
                let k1 = g.close(t[..2 * b].iter().copied().chain([z])).order();
                let k2 = g.close(t[2 * b..].iter().copied()).order();
                *out.kernel_orders.entry((k1, k2)).or_default() += 1;
            }
            if opts.collect || opts.first.is_some() {
                out.structures.push(t.to_vec());
            }
            let go_on = visit.as_mut().map_or(true, |f| f(t));
            go_on && out.structures.len() < limit
        })?;
        out.count += found;
        out.shard_counts[i] = found;
        if found > 0 {
            out.z_counts.insert(z, found);
            *out.z_orders.entry(g.element_order(z)).or_default() += found;
        }
        if out.structures.len() >= limit {
            out.complete = false;
            break;
        }
    }
    if opts.canonical_order {
        out.structures.sort();
    }
    Ok(out)
}

/// Counts (and optionally collects) the structures of genus `b` on `g`:
/// tuples satisfying the surface and conjugacy relations, with `z ≠ 1` of
/// the requested order, that generate `g`.
pub fn find_structures(g: &FiniteGroup, b: usize, opts: &SearchOptions) -> Result<SearchOutcome, StructureError> {
    run(g, b, opts, true, None)
}

/// Like [`find_structures`] but with only the conjugacy relations and no
/// generation requirement.
pub fn find_prestructures(g: &FiniteGroup, b: usize, opts: &SearchOptions) -> Result<SearchOutcome, StructureError> {
    run(g, b, opts, false, None)
}

/// Streams structures to `visit` in enumeration order, stopping when it
/// returns false. Runs on one thread.
pub fn for_each_structure(
    g: &FiniteGroup,
    b: usize,
    opts: &SearchOptions,
    visit: &mut dyn FnMut(&[ElementId]) -> bool,
) -> Result<SearchOutcome, StructureError> {
    run(g, b, opts, true, Some(visit))
}
