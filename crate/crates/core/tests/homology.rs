mod common;

use common::catalog_group;
use kodaira_core::*;

fn first_structure(g: &FiniteGroup) -> Vec<ElementId> {
    find_structures(g, 2, &SearchOptions { first: Some(1), ..Default::default() })
        .unwrap()
        .structures
        .remove(0)
}

#[test]
fn index_two_subgroup_of_free_group() {
    let p = parse_presentation("gens a, b;").unwrap();
    let c2 = FiniteGroup::cyclic(2);
    let m = schreier_rewrite(&p, &[1, 0], &c2).unwrap();
    assert_eq!(m.matrix.cols, 3);
    assert_eq!(m.matrix.rows, 0);
    assert_eq!(smith_normal_form(&m.matrix).unwrap(), AbelianInvariants { rank: 3, torsion: vec![] });
}

#[test]
fn rejects_non_homomorphisms_and_non_surjections() {
    let g = catalog_group("order32.grp", "G(32,49)");
    let mut t = first_structure(&g);
    let p = orbifold_presentation(2, 2).unwrap();
    t[0] = g.mul(t[0], t[1]);
    assert!(matches!(schreier_rewrite(&p, &t, &g), Err(TopologyError::NotHomomorphism { .. })));
    let q = parse_presentation("gens a;").unwrap();
    assert!(matches!(schreier_rewrite(&q, &[0], &g), Err(TopologyError::NotSurjective)));
    assert!(matches!(schreier_rewrite(&q, &[0, 1], &g), Err(TopologyError::ImageCount { .. })));
}

/// Rewrites every relator at every coset over all `|G|·k` pairs
/// `(coset, generator)`, tree edges included.
fn full_rewrite(p: &Presentation, images: &[ElementId], g: &FiniteGroup) -> Vec<Vec<i64>> {
    let k = p.generators.len();
    let mut rows = Vec::new();
    for c in g.elements() {
        for r in &p.relators {
            let mut row = vec![0i64; g.order() * k];
            let mut cur = c;
            for (x, s) in r.letters() {
                if s > 0 {
                    row[cur * k + x] += 1;
                    cur = g.mul(cur, images[x]);
                } else {
                    cur = g.mul(cur, g.inv(images[x]));
                    row[cur * k + x] -= 1;
                }
            }
            assert_eq!(cur, c, "relator closes up at its coset");
            rows.push(row);
        }
    }
    rows
}

#[test]
fn rewriting_matches_an_independent_walk() {
    let g = catalog_group("order64.grp", "G(64,199)");
    let t = first_structure(&g);
    let p = orbifold_presentation(2, 2).unwrap();
    let m = schreier_rewrite(&p, &t, &g).unwrap();
    assert_eq!((m.matrix.rows, m.matrix.cols), (64 * 23, 64 * 9 - 63));
    for (c, w) in m.transversal.iter().enumerate() {
        let value = w.iter().fold(IDENTITY, |acc, &(x, s)| g.mul(acc, g.pow(t[x], s)));
        assert_eq!(value, c);
    }
    let full = full_rewrite(&p, &t, &g);
    let k = 9;
    for (i, row) in full.iter().enumerate() {
        // exponent sums per generator agree with the parent relator
        let relator = &p.relators[i % 23];
        for x in 0..k {
            let expected: i64 = relator.letters().filter(|&(y, _)| y == x).map(|(_, s)| s).sum();
            let got: i64 = (0..64).map(|c| row[c * k + x]).sum();
            assert_eq!(got, expected);
        }
        let reduced: Vec<i64> = m.columns.iter().map(|&(c, x)| row[c * k + x]).collect();
        assert_eq!(reduced.as_slice(), m.matrix.row(i));
    }
    // z^2 at coset c touches (c, z) and (c·z, z)
    let z = t[8];
    for c in [0usize, 5, 17] {
        let row = &full[c * 23 + 22];
        let hits: Vec<usize> = (0..64 * k).filter(|&j| row[j] != 0).collect();
        let mut expected = vec![c * k + 8, g.mul(c, z) * k + 8];
        expected.sort_unstable();
        assert_eq!(hits, expected);
    }
}

#[test]
fn h1_of_order_32_structures() {
    let expected = AbelianInvariants { rank: 8, torsion: vec![2, 2, 2, 2] };
    for label in ["G(32,49)", "G(32,50)"] {
        let g = catalog_group("order32.grp", label);
        let out = find_structures(&g, 2, &SearchOptions { first: Some(3000), ..Default::default() }).unwrap();
        for t in out.structures.iter().step_by(1000) {
            assert_eq!(compute_h1(&g, t, 2).unwrap(), expected, "{label}");
        }
    }
}

#[test]
fn h1_is_invariant_under_automorphisms() {
    let g = catalog_group("order64.grp", "G(64,266)");
    let auts = automorphism_group(&g).unwrap();
    let out = find_structures(&g, 2, &SearchOptions { first: Some(40_000), ..Default::default() }).unwrap();
    for t in out.structures.iter().step_by(10_000) {
        let h = compute_h1(&g, t, 2).unwrap();
        assert_eq!(h.rank % 2, 0);
        for phi in auts.iter().step_by(4_000) {
            let image = apply_to_tuple(phi, t);
            assert_eq!(compute_h1(&g, &image, 2).unwrap(), h);
        }
    }
}

#[test]
fn invariant_identities_hold_on_a_sweep() {
    let mut checked = 0;
    for order in [32u64, 48, 64, 96, 128, 243, 360] {
        for b in 2..8 {
            for n in 2..12 {
                for m in [1u64, 2, 3, 4] {
                    let Ok(r) = surface_invariants(order, b, n, m, m, Some(b)) else { continue };
                    assert_eq!(3 * r.sigma, r.c1_sq - 2 * r.c2);
                    assert_eq!(12 * r.chi, r.c1_sq + r.c2);
                    let betti = r.betti.unwrap();
                    assert_eq!((betti[0], betti[1]), (betti[4], betti[3]));
                    assert_eq!(betti.iter().enumerate().map(|(i, &x)| if i % 2 == 0 { x } else { -x }).sum::<i64>(), r.c2);
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 100);
}
