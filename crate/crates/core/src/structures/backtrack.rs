//! Generic relation-scheduled backtracking over explicit candidate lists.
//! Used for lifting and for groups beyond the bitmask engine.

use crate::group::{ElementId, FiniteGroup};

use super::relations::{generate_structure_relations, Relation, RelationKind};
use super::StructureError;

/// Enumerates tuples with `t[i] ∈ candidates[i]` satisfying the surface and
/// conjugacy relations (and `z^n = 1` when `n` is given), optionally
/// generating `g`. Assignment runs `z`, second row, first row; each relation
/// is checked as soon as its last symbol is assigned. `visit` returns false
/// to stop.
pub fn backtrack_structures(
    g: &FiniteGroup,
    b: usize,
    n: Option<usize>,
    candidates: &[Vec<ElementId>],
    require_generation: bool,
    visit: &mut dyn FnMut(&[ElementId]) -> bool,
) -> Result<(), StructureError> {
    backtrack_tuples(g, b, n, candidates, true, require_generation, visit)
}

/// As [`backtrack_structures`]; with `surface` false the two surface
/// relations are skipped.
pub(crate) fn backtrack_tuples(
    g: &FiniteGroup,
    b: usize,
    n: Option<usize>,
    candidates: &[Vec<ElementId>],
    surface: bool,
    require_generation: bool,
    visit: &mut dyn FnMut(&[ElementId]) -> bool,
) -> Result<(), StructureError> {
    let rels = generate_structure_relations(b, n)?;
    let width = 4 * b + 1;
    if candidates.len() != width {
        return Err(StructureError::WrongLength {
            expected: width,
            found: candidates.len(),
        });
    }
    let order: Vec<usize> = std::iter::once(4 * b).chain(2 * b..4 * b).chain(0..2 * b).collect();
    let mut step_of = vec![0; width];
    for (s, &p) in order.iter().enumerate() {
        step_of[p] = s;
    }
    let mut scheduled: Vec<Vec<&Relation>> = vec![Vec::new(); width];
    for r in rels.relations.iter().filter(|r| surface || r.kind != RelationKind::Surface) {
        let last = r.symbols().into_iter().map(|p| step_of[p]).max().unwrap_or(0);
        scheduled[last].push(r);
    }

    struct Ctx<'a> {
        g: &'a FiniteGroup,
        order: &'a [usize],
        candidates: &'a [Vec<ElementId>],
        scheduled: &'a [Vec<&'a Relation>],
        require_generation: bool,
    }

    fn rec(ctx: &Ctx, step: usize, t: &mut [ElementId], visit: &mut dyn FnMut(&[ElementId]) -> bool) -> bool {
        if step == ctx.order.len() {
            if ctx.require_generation && ctx.g.close(t.iter().copied()).order() != ctx.g.order() {
                return true;
            }
            return visit(t);
        }
        let pos = ctx.order[step];
        for &x in &ctx.candidates[pos] {
            t[pos] = x;
            // unassigned positions hold stale values but no scheduled
            // relation reads them
            let ok = ctx.scheduled[step]
                .iter()
                .all(|r| r.lhs.eval_total(ctx.g, t) == r.rhs.eval_total(ctx.g, t));
            if ok && !rec(ctx, step + 1, t, visit) {
                return false;
            }
        }
        true
    }

    let ctx = Ctx {
        g,
        order: &order,
        candidates,
        scheduled: &scheduled,
        require_generation,
    };
    let mut t = vec![0; width];
    rec(&ctx, 0, &mut t, visit);
    Ok(())
}
