//! First homology of the branched cover attached to a structure, and the
//! closed-form numerical invariants of the surface.
//!
//! `H1(S, ℤ)` is the abelianization of the kernel of the induced map from
//! the orbifold braid group onto `G`. The kernel has index `|G|`, so its
//! cosets are the elements of `G`; Reidemeister–Schreier rewriting gives an
//! integer relator matrix whose cokernel is the answer.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::group::{ElementId, FiniteGroup, IDENTITY};
use crate::presentation::Presentation;
use crate::structures::{generate_structure_relations, StructureError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TopologyError {
    #[error("expected {expected} generator images, got {found}")]
    ImageCount { expected: usize, found: usize },
    #[error("relator {index} does not map to the identity")]
    NotHomomorphism { index: usize },
    #[error("generator images do not generate the group")]
    NotSurjective,
    #[error("{quantity} is not an integer for these parameters")]
    NonIntegral { quantity: &'static str },
    #[error("m = {m} does not divide |G| = {order}")]
    Divisibility { m: u64, order: u64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("torsion coefficient {0} does not fit in 64 bits")]
    TorsionOverflow(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// A finitely generated abelian group `ℤ^rank ⊕ ℤ_{d1} ⊕ … ⊕ ℤ_{dk}` with
/// `d1 | d2 | … | dk` and every `di ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AbelianInvariants {
    pub rank: usize,
    pub torsion: Vec<u64>,
}

impl fmt::Display for AbelianInvariants {
    /// Renders as e.g. `Z^12 + (Z_2)^2 + Z_4`; the trivial group is `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        let mut i = 0;
        while i < self.torsion.len() {
            let d = self.torsion[i];
            let k = self.torsion[i..].iter().take_while(|&&e| e == d).count();
            parts.push(if k == 1 { format!("Z_{d}") } else { format!("(Z_{d})^{k}") });
            i += k;
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Self {
        let mut m = IntMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            m.data[i * cols..(i + 1) * cols].copy_from_slice(&r[..cols]);
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

/// The orbifold braid group presentation: the structure relations of genus
/// `b` plus `z^n`.
pub fn orbifold_presentation(b: usize, n: usize) -> Result<Presentation, TopologyError> {
    Ok(generate_structure_relations(b, Some(n))?.to_presentation())
}

/// The rewritten relator matrix of the kernel of `φ`, together with the
/// Schreier generator `(coset, generator)` labelling each column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchreierMatrix {
    pub matrix: IntMatrix,
    pub columns: Vec<(ElementId, usize)>,
    /// Transversal word per coset, as `(generator, ±1)` letters.
    pub transversal: Vec<Vec<(usize, i64)>>,
}

/// Reidemeister–Schreier rewriting of every relator of `p` at every coset
/// of `ker φ`, where `images[i] = φ(generator i)`.
pub fn schreier_rewrite(p: &Presentation, images: &[ElementId], g: &FiniteGroup) -> Result<SchreierMatrix, TopologyError> {
    let k = p.generators.len();
    if images.len() != k {
        return Err(TopologyError::ImageCount {
            expected: k,
            found: images.len(),
        });
    }
    for (index, r) in p.relators.iter().enumerate() {
        if r.eval_total(g, images) != IDENTITY {
            return Err(TopologyError::NotHomomorphism { index });
        }
    }
    if g.close(images.iter().copied()).order() != g.order() {
        return Err(TopologyError::NotSurjective);
    }
    let order = g.order();
    // BFS transversal: generators in order, positive letter before inverse
    let mut transversal: Vec<Option<Vec<(usize, i64)>>> = vec![None; order];
    let mut tree_edge = vec![false; order * k];
    transversal[IDENTITY] = Some(Vec::new());
    let mut queue = std::collections::VecDeque::from([IDENTITY]);
    while let Some(c) = queue.pop_front() {
        for x in 0..k {
            for sign in [1i64, -1] {
                let (d, edge) = if sign > 0 {
                    let d = g.mul(c, images[x]);
                    (d, c * k + x)
                } else {
                    let d = g.mul(c, g.inv(images[x]));
                    (d, d * k + x)
                };
                if transversal[d].is_none() {
                    let mut w = transversal[c].clone().expect("visited");
                    w.push((x, sign));
                    transversal[d] = Some(w);
                    tree_edge[edge] = true;
                    queue.push_back(d);
                }
            }
        }
    }
    let mut column_of = vec![usize::MAX; order * k];
    let mut columns = Vec::new();
    for c in 0..order {
        for x in 0..k {
            if !tree_edge[c * k + x] {
                column_of[c * k + x] = columns.len();
                columns.push((c, x));
            }
        }
    }
    let cols = columns.len();
    let letters: Vec<Vec<(usize, i64)>> = p.relators.iter().map(|r| r.letters().collect()).collect();
    let inv_images: Vec<ElementId> = images.iter().map(|&x| g.inv(x)).collect();
    let nrel = letters.len();
    let mut matrix = IntMatrix::zeros(order * nrel, cols);
    matrix.data.par_chunks_mut((nrel * cols).max(1)).enumerate().for_each(|(c, block)| {
        for (ri, word) in letters.iter().enumerate() {
            let row = &mut block[ri * cols..(ri + 1) * cols];
            let mut cur = c;
            for &(x, s) in word {
                if s > 0 {
                    let col = column_of[cur * k + x];
                    if col != usize::MAX {
                        row[col] += 1;
                    }
                    cur = g.mul(cur, images[x]);
                } else {
                    cur = g.mul(cur, inv_images[x]);
                    let col = column_of[cur * k + x];
                    if col != usize::MAX {
                        row[col] -= 1;
                    }
                }
            }
        }
    });
    Ok(SchreierMatrix {
        matrix,
        columns,
        transversal: transversal.into_iter().map(|w| w.expect("surjective")).collect(),
    })
}

trait Entry: Clone {
    fn is_zero(&self) -> bool;
    fn abs_lt(&self, other: &Self) -> bool;
    fn is_unit(&self) -> bool;
    fn quot(&self, d: &Self) -> Option<Self>;
    /// `self - q·b`
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl Entry for i64 {
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.unsigned_abs() < other.unsigned_abs()
    }
    fn is_unit(&self) -> bool {
        self.unsigned_abs() == 1
    }
    fn quot(&self, d: &Self) -> Option<Self> {
        self.checked_div(*d)
    }
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self> {
        self.checked_sub(q.checked_mul(*b)?)
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Entry for BigInt {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.magnitude() < other.magnitude()
    }
    fn is_unit(&self) -> bool {
        self.magnitude() == &num_bigint::BigUint::from(1u8)
    }
    fn quot(&self, d: &Self) -> Option<Self> {
        Some(self / d)
    }
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self> {
        Some(self - q * b)
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// Diagonalizes by unimodular row and column operations, always pivoting on
/// an entry of least absolute value. Returns the nonzero diagonal, or
/// `None` on arithmetic overflow.
fn diagonalize<T: Entry>(rows: usize, cols: usize, mut a: Vec<T>) -> Option<Vec<T>> {
    let mut diag = Vec::new();
    let mut t = 0;
    while t < cols.min(rows) {
        let mut best: Option<(usize, usize)> = None;
        'search: for r in t..rows {
            for c in t..cols {
                let v = &a[r * cols + c];
                if v.is_zero() {
                    continue;
                }
                if best.map_or(true, |(br, bc)| v.abs_lt(&a[br * cols + bc])) {
                    best = Some((r, c));
                    if v.is_unit() {
                        break 'search;
                    }
                }
            }
        }
        let Some((pr, pc)) = best else { break };
        swap_rows(&mut a, cols, t, pr);
        swap_cols(&mut a, rows, cols, t, pc);
        loop {
            let p = a[t * cols + t].clone();
            let support: Vec<usize> = (t..cols).filter(|&c| !a[t * cols + c].is_zero()).collect();
            let mut smallest: Option<usize> = None;
            for r in t + 1..rows {
                let v = a[r * cols + t].clone();
                if v.is_zero() {
                    continue;
                }
                let q = v.quot(&p)?;
                if !q.is_zero() {
                    for &c in &support {
                        let nv = a[r * cols + c].sub_mul(&q, &a[t * cols + c])?;
                        a[r * cols + c] = nv;
                    }
                }
                let rem = &a[r * cols + t];
                if !rem.is_zero() && smallest.map_or(true, |s| rem.abs_lt(&a[s * cols + t])) {
                    smallest = Some(r);
                }
            }
            if let Some(r) = smallest {
                swap_rows(&mut a, cols, t, r);
                continue;
            }
            // column t is clear, so column operations only touch row t
            let mut smallest: Option<usize> = None;
            for c in t + 1..cols {
                let v = a[t * cols + c].clone();
                if v.is_zero() {
                    continue;
                }
                let q = v.quot(&p)?;
                a[t * cols + c] = v.sub_mul(&q, &p)?;
                let rem = &a[t * cols + c];
                if !rem.is_zero() && smallest.map_or(true, |s| rem.abs_lt(&a[t * cols + s])) {
                    smallest = Some(c);
                }
            }
            match smallest {
                Some(c) => swap_cols(&mut a, rows, cols, t, c),
                None => break,
            }
        }
        diag.push(a[t * cols + t].clone());
        t += 1;
    }
    Some(diag)
}

fn swap_rows<T>(a: &mut [T], cols: usize, i: usize, j: usize) {
    if i != j {
        for c in 0..cols {
            a.swap(i * cols + c, j * cols + c);
        }
    }
}

fn swap_cols<T>(a: &mut [T], rows: usize, cols: usize, i: usize, j: usize) {
    if i != j {
        for r in 0..rows {
            a.swap(r * cols + i, r * cols + j);
        }
    }
}

/// Invariant factors from an arbitrary nonzero diagonal: repeatedly
/// replaces `(di, dj)` by `(gcd, lcm)`.
fn invariant_factors(diag: &[BigInt]) -> Vec<BigInt> {
    let mut d: Vec<BigInt> = diag.iter().map(|x| x.abs()).collect();
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            let l = &d[i] / &g * &d[j];
            d[i] = g;
            d[j] = l;
        }
    }
    d
}

/// Cokernel of `m` acting on `ℤ^cols`: free rank `cols − rank(m)` and the
/// invariant factors greater than 1. Runs in checked 64-bit arithmetic and
/// redoes the computation over big integers on overflow.
pub fn smith_normal_form(m: &IntMatrix) -> Result<AbelianInvariants, TopologyError> {
    let diag: Vec<BigInt> = match diagonalize(m.rows, m.cols, m.data.clone()) {
        Some(d) => d.iter().map(Entry::to_big).collect(),
        None => diagonalize(m.rows, m.cols, m.data.iter().map(|&x| BigInt::from(x)).collect())
            .expect("big integer arithmetic does not overflow"),
    };
    invariants_from_diagonal(m.cols, &diag)
}

fn invariants_from_diagonal(cols: usize, diag: &[BigInt]) -> Result<AbelianInvariants, TopologyError> {
    let factors = invariant_factors(diag);
    let torsion = factors
        .iter()
        .filter(|d| !d.is_unit())
        .map(|d| d.to_u64().ok_or_else(|| TopologyError::TorsionOverflow(d.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AbelianInvariants {
        rank: cols - diag.len(),
        torsion,
    })
}

/// Smith normal form over big integers from the start.
pub fn smith_normal_form_big(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<AbelianInvariants, TopologyError> {
    let diag = diagonalize(rows, cols, data).expect("big integer arithmetic does not overflow");
    invariants_from_diagonal(cols, &diag)
}

/// `H1(S, ℤ)` for the cover attached to a structure tuple of genus `b`.
/// The orbifold order is the order of `z`.
pub fn compute_h1(g: &FiniteGroup, entries: &[ElementId], b: usize) -> Result<AbelianInvariants, TopologyError> {
    if entries.len() != 4 * b + 1 {
        return Err(StructureError::WrongLength {
            expected: 4 * b + 1,
            found: entries.len(),
        }
        .into());
    }
    let n = g.element_order(entries[4 * b]);
    let p = orbifold_presentation(b, n)?;
    let rewritten = schreier_rewrite(&p, entries, g)?;
    smith_normal_form(&rewritten.matrix)
}

/// Numerical invariants of the surface and its two fibrations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurfaceInvariantReport {
    pub order: u64,
    pub b: u64,
    pub n: u64,
    pub m1: u64,
    pub m2: u64,
    pub c1_sq: i64,
    pub c2: i64,
    pub sigma: i64,
    pub chi: i64,
    /// Genera of the two base curves.
    pub b1_base: i64,
    pub b2_base: i64,
    /// Genera of the two fibres.
    pub g1: i64,
    pub g2: i64,
    pub q: Option<i64>,
    pub p_g: Option<i64>,
    pub betti: Option<[i64; 5]>,
}

fn integral(x: Ratio<i128>, quantity: &'static str) -> Result<i64, TopologyError> {
    if !x.is_integer() {
        return Err(TopologyError::NonIntegral { quantity });
    }
    x.to_integer()
        .to_i64()
        .ok_or(TopologyError::Parameter(format!("{quantity} overflows")))
}

/// Closed-form invariants with `𝔫 = 1 − 1/n`:
/// `c1² = |G|(2b−2)(4b−4+4𝔫−𝔫²)`, `c2 = |G|(2b−2)(2b−2+𝔫)`,
/// `σ = (c1² − 2c2)/3`, `χ = (c1² + c2)/12`, base genera `mᵢ(b−1)+1`,
/// fibre genera from `2gᵢ−2 = (|G|/mᵢ)(2b−2+𝔫)`. With `q`:
/// `p_g = χ − 1 + q` and Betti numbers `(1, 2q, c2 − 2 + 4q, 2q, 1)`.
pub fn surface_invariants(
    order: u64,
    b: u64,
    n: u64,
    m1: u64,
    m2: u64,
    q: Option<u64>,
) -> Result<SurfaceInvariantReport, TopologyError> {
    if b < 2 {
        return Err(TopologyError::Parameter(format!("b = {b} is below 2")));
    }
    if n < 2 {
        return Err(TopologyError::Parameter(format!("n = {n} is below 2")));
    }
    for m in [m1, m2] {
        if m == 0 || order % m != 0 {
            return Err(TopologyError::Divisibility { m, order });
        }
    }
    let r = |x: u64| Ratio::from_integer(x as i128);
    let nn = Ratio::new(n as i128 - 1, n as i128);
    let g = r(order);
    let bb = r(b);
    let two = r(2);
    let c1_sq = g * (two * bb - two) * (r(4) * bb - r(4) + r(4) * nn - nn * nn);
    let c2 = g * (two * bb - two) * (two * bb - two + nn);
    let sigma = (c1_sq - two * c2) / r(3);
    let chi = (c1_sq + c2) / r(12);
    let base = |m: u64| r(m) * (bb - r(1)) + r(1);
    let fibre = |m: u64| (g / r(m)) * (two * bb - two + nn) / two + r(1);
    let c1_sq_i = integral(c1_sq, "c1^2")?;
    let c2_i = integral(c2, "c2")?;
    let chi_i = integral(chi, "chi")?;
    let (p_g, betti) = match q {
        Some(q) => {
            let q = q as i64;
            let b1 = 2 * q;
            (Some(chi_i - 1 + q), Some([1, b1, c2_i - 2 + 2 * b1, b1, 1]))
        }
        None => (None, None),
    };
    Ok(SurfaceInvariantReport {
        order,
        b,
        n,
        m1,
        m2,
        c1_sq: c1_sq_i,
        c2: c2_i,
        sigma: integral(sigma, "sigma")?,
        chi: chi_i,
        b1_base: integral(base(m1), "b1")?,
        b2_base: integral(base(m2), "b2")?,
        g1: integral(fibre(m1), "g1")?,
        g2: integral(fibre(m2), "g2")?,
        q: q.map(|q| q as i64),
        p_g,
        betti,
    })
}
