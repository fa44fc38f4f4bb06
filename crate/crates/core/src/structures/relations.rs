//! The defining relation system of a structure of type (b, n).
//!
//! Symbols are numbered in tuple order
//! `ρ11, τ11, …, ρ1b, τ1b, ρ21, τ21, …, ρ2b, τ2b, z`.

use crate::presentation::{Presentation, Word};

use super::StructureError;

/// A symbol of the relation system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    /// `ρ_{row, col}` with row in {1, 2} and col in 1..=b.
    Rho(usize, usize),
    Tau(usize, usize),
    Z,
}

impl Symbol {
    /// Position in the (4b+1)-tuple.
    pub fn index(self, b: usize) -> usize {
        match self {
            Symbol::Rho(row, col) => 2 * b * (row - 1) + 2 * (col - 1),
            Symbol::Tau(row, col) => 2 * b * (row - 1) + 2 * (col - 1) + 1,
            Symbol::Z => 4 * b,
        }
    }

    pub fn from_index(index: usize, b: usize) -> Symbol {
        if index == 4 * b {
            return Symbol::Z;
        }
        let row = index / (2 * b) + 1;
        let col = (index % (2 * b)) / 2 + 1;
        if index % 2 == 0 {
            Symbol::Rho(row, col)
        } else {
            Symbol::Tau(row, col)
        }
    }

    /// ASCII name such as `r11`, `t22` or `z`.
    pub fn name(self) -> String {
        match self {
            Symbol::Rho(r, c) => format!("r{r}{c}"),
            Symbol::Tau(r, c) => format!("t{r}{c}"),
            Symbol::Z => "z".to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RelationKind {
    Surface,
    RhoAction,
    TauAction,
    Orbifold,
}

/// One equation `lhs = rhs` over the structure symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    pub kind: RelationKind,
    pub lhs: Word,
    pub rhs: Word,
    /// For conjugacy relations `[a, y] = w`: the first-row symbol `a`
    /// and the symbol `y`, both as tuple positions.
    pub commutator: Option<(usize, usize)>,
}

impl Relation {
    /// The relator `lhs · rhs⁻¹`.
    pub fn relator(&self) -> Word {
        self.lhs.mul(&self.rhs.inverse())
    }

    /// Tuple positions occurring in the relation.
    pub fn symbols(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.lhs.generators_used().chain(self.rhs.generators_used()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// The full relation system for genus `b`, optionally with the orbifold
/// relator `z^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationSet {
    pub b: usize,
    pub n: Option<usize>,
    pub relations: Vec<Relation>,
}

impl RelationSet {
    pub fn symbol_count(&self) -> usize {
        4 * self.b + 1
    }

    pub fn symbol_names(&self) -> Vec<String> {
        (0..self.symbol_count()).map(|i| Symbol::from_index(i, self.b).name()).collect()
    }

    pub fn of_kind(&self, kind: RelationKind) -> impl Iterator<Item = &Relation> {
        self.relations.iter().filter(move |r| r.kind == kind)
    }

    /// Surface plus conjugacy relations (everything except the orbifold relator).
    pub fn core(&self) -> impl Iterator<Item = &Relation> {
        self.relations.iter().filter(|r| r.kind != RelationKind::Orbifold)
    }

    pub fn get(&self, name: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.name == name)
    }

    /// The relation system as a presentation on `4b+1` generators.
    pub fn to_presentation(&self) -> Presentation {
        Presentation {
            label: Some(match self.n {
                Some(n) => format!("P2orb(b={}, n={n})", self.b),
                None => format!("P2(b={})", self.b),
            }),
            generators: self.symbol_names(),
            relators: self.relations.iter().map(Relation::relator).collect(),
        }
    }
}

/// Builds the surface and conjugacy relations for genus `b`, appending the
/// orbifold relator `z^n` when `n` is given.
pub fn generate_structure_relations(b: usize, n: Option<usize>) -> Result<RelationSet, StructureError> {
    if b < 2 {
        return Err(StructureError::GenusTooSmall(b));
    }
    if let Some(n) = n {
        if n < 2 {
            return Err(StructureError::BranchingOrder(n));
        }
    }
    let g = |s: Symbol| Word::gen(s.index(b));
    let inv = |s: Symbol| g(s).inverse();
    let comm = Word::commutator;
    let one = Word::identity();
    let z = g(Symbol::Z);
    let zi = inv(Symbol::Z);
    let (r1, t1) = (|j| Symbol::Rho(1, j), |j| Symbol::Tau(1, j));
    let (r2, t2) = (|j| Symbol::Rho(2, j), |j| Symbol::Tau(2, j));

    let mut relations = Vec::new();

    let mut s1 = one.clone();
    for j in (1..=b).rev() {
        s1 = s1.mul(&comm(&inv(r1(j)), &inv(t1(j)))).mul(&inv(t1(j)));
    }
    for j in 1..=b {
        s1 = s1.mul(&g(t1(j)));
    }
    relations.push(Relation {
        name: "S1".into(),
        kind: RelationKind::Surface,
        lhs: s1,
        rhs: z.clone(),
        commutator: None,
    });
    let mut s2 = one.clone();
    for j in 1..=b {
        s2 = s2.mul(&comm(&inv(r2(j)), &g(t2(j)))).mul(&g(t2(j)));
    }
    for j in (1..=b).rev() {
        s2 = s2.mul(&inv(t2(j)));
    }
    relations.push(Relation {
        name: "S2".into(),
        kind: RelationKind::Surface,
        lhs: s2,
        rhs: zi.clone(),
        commutator: None,
    });

    let action = |a: Symbol, y: Symbol, rhs: Word, name: String, kind| Relation {
        name,
        kind,
        lhs: comm(&g(a), &g(y)),
        rhs,
        commutator: Some((a.index(b), y.index(b))),
    };

    let mut count = 0;
    for j in 1..=b {
        let a = r1(j);
        for k in (1..=b).rev() {
            let rhs = match j.cmp(&k) {
                std::cmp::Ordering::Less | std::cmp::Ordering::Equal => one.clone(),
                std::cmp::Ordering::Greater => zi
                    .mul(&g(r2(k)))
                    .mul(&inv(r2(j)))
                    .mul(&z)
                    .mul(&g(r2(j)))
                    .mul(&inv(r2(k))),
            };
            count += 1;
            relations.push(action(a, r2(k), rhs, format!("R{count}"), RelationKind::RhoAction));
        }
        for k in (1..=b).rev() {
            let rhs = match j.cmp(&k) {
                std::cmp::Ordering::Less => one.clone(),
                std::cmp::Ordering::Equal => zi.clone(),
                std::cmp::Ordering::Greater => comm(&zi, &g(t2(k))),
            };
            count += 1;
            relations.push(action(a, t2(k), rhs, format!("R{count}"), RelationKind::RhoAction));
        }
        count += 1;
        relations.push(action(a, Symbol::Z, comm(&inv(r2(j)), &z), format!("R{count}"), RelationKind::RhoAction));
    }

    let mut count = 0;
    for j in 1..=b {
        let a = t1(j);
        for k in (1..=b).rev() {
            let rhs = match j.cmp(&k) {
                std::cmp::Ordering::Less => one.clone(),
                std::cmp::Ordering::Equal => inv(t2(j)).mul(&z).mul(&g(t2(j))),
                std::cmp::Ordering::Greater => comm(&inv(t2(j)), &z),
            };
            count += 1;
            relations.push(action(a, r2(k), rhs, format!("T{count}"), RelationKind::TauAction));
        }
        for k in (1..=b).rev() {
            let rhs = match j.cmp(&k) {
                std::cmp::Ordering::Less => one.clone(),
                std::cmp::Ordering::Equal => comm(&inv(t2(j)), &z),
                std::cmp::Ordering::Greater => inv(t2(j))
                    .mul(&z)
                    .mul(&g(t2(j)))
                    .mul(&zi)
                    .mul(&g(t2(k)))
                    .mul(&z)
                    .mul(&inv(t2(j)))
                    .mul(&zi)
                    .mul(&g(t2(j)))
                    .mul(&inv(t2(k))),
            };
            count += 1;
            relations.push(action(a, t2(k), rhs, format!("T{count}"), RelationKind::TauAction));
        }
        count += 1;
        relations.push(action(a, Symbol::Z, comm(&inv(t2(j)), &z), format!("T{count}"), RelationKind::TauAction));
    }

    if let Some(n) = n {
        relations.push(Relation {
            name: "O".into(),
            kind: RelationKind::Orbifold,
            lhs: z.pow(n as i64),
            rhs: one,
            commutator: None,
        });
    }
    Ok(RelationSet { b, n, relations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_indexing_round_trips() {
        for b in 2..5 {
            for i in 0..=4 * b {
                assert_eq!(Symbol::from_index(i, b).index(b), i);
            }
        }
        assert_eq!(Symbol::Tau(2, 1).index(2), 5);
        assert_eq!(Symbol::Z.name(), "z");
    }

    #[test]
    fn relation_counts() {
        for b in 2..6 {
            let rs = generate_structure_relations(b, None).unwrap();
            assert_eq!(rs.relations.len(), 2 * b * (2 * b + 1) + 2);
            assert_eq!(rs.of_kind(RelationKind::Surface).count(), 2);
        }
        assert_eq!(generate_structure_relations(2, Some(2)).unwrap().relations.len(), 23);
        assert_eq!(generate_structure_relations(3, None).unwrap().relations.len(), 44);
        assert!(generate_structure_relations(1, None).is_err());
    }
}
