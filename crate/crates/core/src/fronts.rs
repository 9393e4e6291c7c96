//! Level fronts: the Pareto-minimal grid sizes for each number of levels.
//!
//! For a complete ternary tree with `l` levels the achievable grid sizes
//! form a staircase set with integer minimal points; this module iterates
//! the advance recurrence in pure `i64` arithmetic. Every front width is
//! odd (the root must sit on the centre column), which makes the
//! construction-1 height `w_s/2 + max(w_s/2, h_b + 1/2)` equal to the
//! integer expression `max(w_s, (w_s + 1)/2 + h_b)`; the equivalence is
//! cross-checked against the exact rational operator in the tests.

use std::fmt::Write as _;

use num::rational::BigRational;
use thiserror::Error;

use crate::drawing::ConstructionTree;
use crate::staircase::{Construction, Point2, Provenance, Staircase};

/// Errors from front computation and lookups.
#[derive(Debug, Error)]
pub enum FrontError {
    /// Levels are counted from 1.
    #[error("level must be at least 1")]
    BadLevel,
    /// `i64` arithmetic overflowed while advancing to the named level.
    #[error("arithmetic overflow while computing level {level}")]
    Overflow { level: u32 },
    /// A requested grid size is not on the named front.
    #[error("size {w}x{h} is not on the level-{level} front")]
    NotFound { level: u32, w: i64, h: i64 },
}

/// One Pareto-minimal grid size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridPoint {
    pub w: i64,
    pub h: i64,
}

impl GridPoint {
    pub fn new(w: i64, h: i64) -> Self {
        Self { w, h }
    }

    /// Componentwise domination (this size fits inside the other).
    pub fn le(&self, other: &Self) -> bool {
        self.w <= other.w && self.h <= other.h
    }
}

/// The Pareto front for one level, with a back-pointer per point describing
/// how it was constructed from the previous front (absent at level 1).
#[derive(Clone, Debug)]
pub struct LevelFront {
    level: u32,
    points: Vec<GridPoint>,
    provenance: Vec<Option<Provenance>>,
}

impl LevelFront {
    pub fn level(&self) -> u32 {
        self.level
    }

    /// Minimal sizes sorted by increasing width (and decreasing height).
    pub fn points(&self) -> &[GridPoint] {
        &self.points
    }

    /// Parallel to [`LevelFront::points`].
    pub fn provenance(&self) -> &[Option<Provenance>] {
        &self.provenance
    }

    /// Index of an exact front point, if present.
    pub fn find(&self, w: i64, h: i64) -> Option<usize> {
        let idx = self.points.partition_point(|q| q.w < w);
        (idx < self.points.len() && self.points[idx] == GridPoint::new(w, h)).then_some(idx)
    }

    /// Index of the leftmost front point that fits inside `w x h`, if any.
    pub fn find_dominating(&self, w: i64, h: i64) -> Option<usize> {
        let probe = GridPoint::new(w, h);
        self.points.iter().position(|p| p.le(&probe))
    }

    /// The same front as an exact staircase set.
    pub fn to_exact_staircase(&self) -> Staircase<BigRational> {
        let pts = self
            .points
            .iter()
            .map(|p| {
                Point2::new(
                    BigRational::from_integer(p.w.into()),
                    BigRational::from_integer(p.h.into()),
                )
            })
            .collect();
        Staircase::normalize(pts).expect("front points are positive antichains")
    }
}

type Tagged = (GridPoint, Provenance);

fn push_if_undominated(out: &mut Vec<Tagged>, item: Tagged) {
    match out.last() {
        Some(last) if last.0.h <= item.0.h => {}
        _ => out.push(item),
    }
}

/// Merges two antichains sorted by `(w, h)`, resolving exact ties by the
/// provenance order (construction 1 first, then side and bottom indices).
fn merge_antichains(a: Vec<Tagged>, b: Vec<Tagged>) -> Vec<Tagged> {
    if a.is_empty() {
        return b;
    }
    if b.is_empty() {
        return a;
    }
    let mut out: Vec<Tagged> = Vec::with_capacity(a.len() + b.len());
    let mut ia = a.into_iter().peekable();
    let mut ib = b.into_iter().peekable();
    loop {
        let pick_a = match (ia.peek(), ib.peek()) {
            (None, None) => break,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (Some(x), Some(y)) => match (x.0.w, x.0.h).cmp(&(y.0.w, y.0.h)) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => false,
                std::cmp::Ordering::Equal => {
                    let xa = ia.next().expect("peeked");
                    let yb = ib.next().expect("peeked");
                    let keep = if xa.1 <= yb.1 { xa } else { yb };
                    push_if_undominated(&mut out, keep);
                    continue;
                }
            },
        };
        let item = if pick_a {
            ia.next().expect("peeked")
        } else {
            ib.next().expect("peeked")
        };
        push_if_undominated(&mut out, item);
    }
    out
}

/// Advances one front to the next level in checked integer arithmetic.
fn advance_front(prev: &LevelFront) -> Result<LevelFront, FrontError> {
    let level = prev.level + 1;
    let overflow = || FrontError::Overflow { level };
    let pts = &prev.points;
    let k = pts.len();
    let mut acc: Vec<Tagged> = Vec::new();

    // Construction 1: side copies rotated against the grid edges, bottom
    // copy below the root row. One row per bottom source, side sources from
    // widest to narrowest so widths increase along the row.
    for j in 0..k {
        let bottom = pts[j];
        let mut row: Vec<Tagged> = Vec::with_capacity(k);
        for i in (0..k).rev() {
            let side = pts[i];
            let w = side
                .h
                .checked_mul(2)
                .and_then(|x| x.checked_add(bottom.w))
                .ok_or_else(overflow)?;
            let lifted = (side.w + 1)
                .checked_div(2)
                .and_then(|x| x.checked_add(bottom.h))
                .ok_or_else(overflow)?;
            let h = side.w.max(lifted);
            row.push((
                GridPoint::new(w, h),
                Provenance {
                    construction: Construction::One,
                    side: i,
                    bottom: j,
                },
            ));
        }
        acc = merge_antichains(acc, row);
    }

    // Construction 2: side copies beside the root column, bottom copy
    // underneath. One row per side source; equal widths along a row keep
    // only the shortest candidate.
    for i in 0..k {
        let side = pts[i];
        let base = side
            .h
            .checked_mul(2)
            .and_then(|x| x.checked_add(1))
            .ok_or_else(overflow)?;
        let mut row: Vec<Tagged> = Vec::with_capacity(k);
        for j in 0..k {
            let bottom = pts[j];
            let w = base.max(bottom.w);
            let h = side.w.checked_add(bottom.h).ok_or_else(overflow)?;
            let cand = (
                GridPoint::new(w, h),
                Provenance {
                    construction: Construction::Two,
                    side: i,
                    bottom: j,
                },
            );
            if let Some(last) = row.last() {
                if last.0.w == cand.0.w {
                    row.pop();
                }
            }
            row.push(cand);
        }
        acc = merge_antichains(acc, row);
    }

    let (points, provenance): (Vec<_>, Vec<_>) = acc.into_iter().unzip();
    Ok(LevelFront {
        level,
        points,
        provenance: provenance.into_iter().map(Some).collect(),
    })
}

/// Computes the Pareto fronts for levels `1..=max_level`.
///
/// Level 1 is the single node on a `1x1` grid; each later front is the
/// antichain of sizes reachable by the two constructions from the previous
/// one.
pub fn compute_fronts(max_level: u32) -> Result<Vec<LevelFront>, FrontError> {
    if max_level == 0 {
        return Err(FrontError::BadLevel);
    }
    let mut fronts = Vec::with_capacity(max_level as usize);
    fronts.push(LevelFront {
        level: 1,
        points: vec![GridPoint::new(1, 1)],
        provenance: vec![None],
    });
    while fronts.len() < max_level as usize {
        let next = advance_front(fronts.last().expect("nonempty"))?;
        fronts.push(next);
    }
    Ok(fronts)
}

/// Reconstructs a construction plan realizing the `index`-th point of the
/// level-`level` front by following the provenance back-pointers. The
/// resulting tree's predicted size equals the front point, and its drawing
/// satisfies all geometric checks.
pub fn witness(
    fronts: &[LevelFront],
    level: u32,
    index: usize,
) -> Result<ConstructionTree, FrontError> {
    if level == 0 || fronts.len() < level as usize {
        return Err(FrontError::BadLevel);
    }
    let front = &fronts[level as usize - 1];
    let point = front.points.get(index).ok_or(FrontError::NotFound {
        level,
        w: -1,
        h: -1,
    })?;
    match front.provenance.get(index).copied().flatten() {
        None => {
            debug_assert_eq!(*point, GridPoint::new(1, 1));
            Ok(ConstructionTree::Leaf)
        }
        Some(prov) => {
            let side = witness(fronts, level - 1, prov.side)?;
            let bottom = witness(fronts, level - 1, prov.bottom)?;
            Ok(ConstructionTree::node(prov.construction, side, bottom))
        }
    }
}

/// CSV for a span of fronts with full back-pointers:
/// `level,w,h,construction,src_l,src_b`.
pub fn fronts_csv(fronts: &[LevelFront]) -> String {
    let mut out = String::from("level,w,h,construction,src_l,src_b\n");
    for front in fronts {
        for (p, prov) in front.points.iter().zip(&front.provenance) {
            let _ = write!(out, "{},{},{}", front.level, p.w, p.h);
            match prov {
                Some(pr) => {
                    let _ = write!(out, ",{},{},{}", pr.construction.id(), pr.side, pr.bottom);
                }
                None => out.push_str(",,,"),
            }
            out.push('\n');
        }
    }
    out
}

/// Scatter CSV across fronts: `level,w,h,construction` (construction blank
/// at level 1).
pub fn scatter_csv(fronts: &[LevelFront]) -> String {
    let mut out = String::from("level,w,h,construction\n");
    for front in fronts {
        for (p, prov) in front.points.iter().zip(&front.provenance) {
            let _ = write!(out, "{},{},{}", front.level, p.w, p.h);
            match prov {
                Some(pr) => {
                    let _ = write!(out, ",{}", pr.construction.id());
                }
                None => out.push(','),
            }
            out.push('\n');
        }
    }
    out
}
