//! Staircase sets: upper-closed subsets of the open positive quadrant.
//!
//! A staircase set is stored as the antichain of its minimal points, sorted
//! by strictly increasing width (equivalently strictly decreasing height).
//! The containment order used throughout is `a <= b` iff `a` is a *superset*
//! of `b` — smaller in the order means more grid sizes are achievable.
//!
//! The advance operator `N` maps the achievable-size set for `l` levels of a
//! complete ternary tree to the set for `l + 1` levels by combining a side
//! subtree `(w_l, h_l)` with a bottom subtree `(w_b, h_b)` in two ways:
//!
//! * construction 1: `(2 h_l + w_b, w_l/2 + max(w_l/2, h_b + 1/2))`
//! * construction 2: `(max(2 h_l + 1, w_b), w_l + h_b)`
//!
//! `N_inf` is the same operator with the additive constants dropped; it is
//! scale-equivariant and governs the asymptotics.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Zero};
use thiserror::Error;

/// Errors from staircase construction, arithmetic, and parsing.
#[derive(Debug, Error)]
pub enum StaircaseError {
    /// Every staircase set must contain at least one point.
    #[error("empty set")]
    Empty,
    /// Coordinates and shift factors must be positive (and finite for floats).
    #[error("domain: {0}")]
    Domain(&'static str),
    /// CSV round-trip failures.
    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Coordinate arithmetic shared by the exact-rational and floating-point
/// instantiations of the algebra.
///
/// Implemented for [`BigRational`] and `f64` only: both halve exactly, which
/// the construction-1 height formula relies on. Truncating integer division
/// rules out machine integers here; the integer fast path for level fronts
/// lives in [`crate::fronts`] with a reformulated height that stays integral.
pub trait Coord: Clone + PartialOrd + Zero + One + std::ops::Div<Output = Self> {
    /// Rejects values the algebra cannot order reliably (NaN, infinities).
    fn is_finite_value(&self) -> bool;

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half(self) -> Self {
        self / Self::two()
    }

    fn double(self) -> Self {
        self.clone() + self
    }
}

impl Coord for f64 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Coord for BigRational {
    fn is_finite_value(&self) -> bool {
        true
    }
}

fn cmp_coord<C: PartialOrd>(a: &C, b: &C) -> Ordering {
    a.partial_cmp(b).expect("coordinates are validated finite")
}

fn max_coord<C: PartialOrd>(a: C, b: C) -> C {
    if cmp_coord(&a, &b) == Ordering::Less {
        b
    } else {
        a
    }
}

/// A width/height pair. The algebra keeps both coordinates strictly
/// positive; [`Staircase::normalize`] rejects anything else.
#[derive(Clone, Debug, PartialEq)]
pub struct Point2<C> {
    pub w: C,
    pub h: C,
}

impl<C: Coord> Point2<C> {
    pub fn new(w: C, h: C) -> Self {
        Self { w, h }
    }

    fn is_strictly_positive(&self) -> bool {
        self.w.is_finite_value()
            && self.h.is_finite_value()
            && self.w > C::zero()
            && self.h > C::zero()
    }

    /// Componentwise order: `self` dominates `other`'s position, meaning
    /// `other` lies in the upper closure of `self`.
    pub fn le(&self, other: &Self) -> bool {
        self.w <= other.w && self.h <= other.h
    }

    fn scaled(&self, factor: &C) -> Self {
        Point2 {
            w: self.w.clone() * factor.clone(),
            h: self.h.clone() * factor.clone(),
        }
    }
}

/// Which of the two recursive constructions produced a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Construction {
    /// Side copies flush with the grid edges, bottom copy one row below the
    /// root.
    One,
    /// Side copies adjacent to the root column, bottom copy below them.
    Two,
}

impl Construction {
    pub fn id(self) -> u8 {
        match self {
            Construction::One => 1,
            Construction::Two => 2,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            1 => Some(Construction::One),
            2 => Some(Construction::Two),
            _ => None,
        }
    }
}

/// Back-pointer carried by every advance output: which construction and
/// which source points (indices into the input antichain) produced it.
///
/// The derived lexicographic order — construction 1 before 2, then side
/// index, then bottom index — is the tie rule applied when several pairs
/// yield exactly the same point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Provenance {
    pub construction: Construction,
    pub side: usize,
    pub bottom: usize,
}

/// An upper-closed subset of the positive quadrant, stored as the strict
/// antichain of its minimal points sorted by increasing width.
#[derive(Clone, Debug, PartialEq)]
pub struct Staircase<C> {
    points: Vec<Point2<C>>,
}

/// Result of an advance: the output staircase plus one provenance record per
/// minimal point.
#[derive(Clone, Debug)]
pub struct Advanced<C> {
    pub staircase: Staircase<C>,
    pub provenance: Vec<Provenance>,
}

impl<C> Advanced<C> {
    pub fn into_staircase(self) -> Staircase<C> {
        self.staircase
    }
}

impl<C: Coord> Staircase<C> {
    /// Builds the staircase generated by an arbitrary point collection:
    /// validates positivity, drops dominated points and duplicates, and
    /// sorts the survivors.
    pub fn normalize(points: Vec<Point2<C>>) -> Result<Self, StaircaseError> {
        if points.is_empty() {
            return Err(StaircaseError::Empty);
        }
        if points.iter().any(|p| !p.is_strictly_positive()) {
            return Err(StaircaseError::Domain("coordinates must be positive"));
        }
        Ok(Self::normalize_unchecked(points))
    }

    /// Same as [`Staircase::normalize`] but assumes coordinates were already
    /// validated (used internally where positivity is preserved by
    /// construction).
    fn normalize_unchecked(mut points: Vec<Point2<C>>) -> Self {
        points.sort_by(|a, b| cmp_coord(&a.w, &b.w).then_with(|| cmp_coord(&a.h, &b.h)));
        let mut kept: Vec<Point2<C>> = Vec::with_capacity(points.len());
        for p in points {
            // Sorted by (w, then h): p is dominated exactly when the last
            // kept point (which has w <= p.w) also has h <= p.h.
            match kept.last() {
                Some(last) if last.h <= p.h => {}
                _ => kept.push(p),
            }
        }
        Staircase { points: kept }
    }

    /// The antichain of minimal points, sorted by increasing width.
    pub fn points(&self) -> &[Point2<C>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false — the empty set is not a staircase — but provided for
    /// symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Membership of a point in the upper closure.
    pub fn contains(&self, p: &Point2<C>) -> bool {
        let idx = self.points.partition_point(|q| q.w <= p.w);
        // Among candidates with q.w <= p.w the smallest height is at idx-1.
        idx > 0 && self.points[idx - 1].h <= p.h
    }

    /// Containment order: `self <= other` iff `self` contains `other` as a
    /// set, i.e. every minimal point of `other` lies in `self`'s closure.
    pub fn leq(&self, other: &Self) -> bool {
        other.points.iter().all(|q| self.contains(q))
    }

    /// Scales both coordinates of the whole set by a positive factor.
    pub fn shift(&self, factor: &C) -> Result<Self, StaircaseError> {
        if !factor.is_finite_value() || !(*factor > C::zero()) {
            return Err(StaircaseError::Domain("shift factor must be positive"));
        }
        let scaled = self.points.iter().map(|p| p.scaled(factor)).collect();
        // Exact arithmetic preserves the antichain, but floating-point
        // multiplication may collapse neighbours; re-normalizing keeps the
        // invariant in both modes.
        Ok(Self::normalize_unchecked(scaled))
    }

    /// The advance operator `N` (exact recurrence, with additive constants).
    pub fn advance(&self) -> Advanced<C> {
        self.advance_impl(false)
    }

    /// The advance operator at infinity `N_inf` (additive constants
    /// dropped); scale-equivariant.
    pub fn advance_inf(&self) -> Advanced<C> {
        self.advance_impl(true)
    }

    fn advance_impl(&self, at_infinity: bool) -> Advanced<C> {
        let pts = &self.points;
        let k = pts.len();
        let mut acc: Vec<(Point2<C>, Provenance)> = Vec::new();

        // Construction 1, one row per bottom source j. Iterating the side
        // source from the last point (largest width, smallest height) to the
        // first yields strictly increasing widths 2 h_i + w_j and strictly
        // decreasing heights, i.e. each row is already a sorted antichain.
        for j in 0..k {
            let bottom = &pts[j];
            let reach = if at_infinity {
                bottom.h.clone()
            } else {
                bottom.h.clone() + C::one().half()
            };
            let mut row: Vec<(Point2<C>, Provenance)> = Vec::with_capacity(k);
            for i in (0..k).rev() {
                let side = &pts[i];
                let w = side.h.clone().double() + bottom.w.clone();
                let half_side = side.w.clone().half();
                let h = half_side.clone() + max_coord(half_side, reach.clone());
                row.push((
                    Point2::new(w, h),
                    Provenance {
                        construction: Construction::One,
                        side: i,
                        bottom: j,
                    },
                ));
            }
            acc = merge_antichains(acc, row);
        }

        // Construction 2, one row per side source i. Widths
        // max(2 h_i + 1, w_j) are non-decreasing in j with flat runs while
        // the side term dominates; heights w_i + h_j are strictly
        // decreasing, so on a flat run only the last candidate survives.
        for i in 0..k {
            let side = &pts[i];
            let base = if at_infinity {
                side.h.clone().double()
            } else {
                side.h.clone().double() + C::one()
            };
            let mut row: Vec<(Point2<C>, Provenance)> = Vec::with_capacity(k);
            for j in 0..k {
                let bottom = &pts[j];
                let w = max_coord(base.clone(), bottom.w.clone());
                let h = side.w.clone() + bottom.h.clone();
                let cand = (
                    Point2::new(w, h),
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

        let (points, provenance) = acc.into_iter().unzip();
        Advanced {
            staircase: Staircase { points },
            provenance,
        }
    }
}

/// Merges two sorted antichains into the antichain of their union,
/// resolving exact point ties by the provenance order.
fn merge_antichains<C: Coord>(
    a: Vec<(Point2<C>, Provenance)>,
    b: Vec<(Point2<C>, Provenance)>,
) -> Vec<(Point2<C>, Provenance)> {
    if a.is_empty() {
        return b;
    }
    if b.is_empty() {
        return a;
    }
    let mut out: Vec<(Point2<C>, Provenance)> = Vec::with_capacity(a.len() + b.len());
    let mut ia = a.into_iter().peekable();
    let mut ib = b.into_iter().peekable();
    loop {
        let pick_a = match (ia.peek(), ib.peek()) {
            (None, None) => break,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (Some(x), Some(y)) => {
                match cmp_coord(&x.0.w, &y.0.w).then_with(|| cmp_coord(&x.0.h, &y.0.h)) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => {
                        // Identical points: keep the smaller provenance and
                        // consume both.
                        let xa = ia.next().expect("peeked");
                        let yb = ib.next().expect("peeked");
                        let keep = if xa.1 <= yb.1 { xa } else { yb };
                        push_if_undominated(&mut out, keep);
                        continue;
                    }
                }
            }
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

fn push_if_undominated<C: Coord>(
    out: &mut Vec<(Point2<C>, Provenance)>,
    item: (Point2<C>, Provenance),
) {
    // Items arrive sorted by (w, then h), so the only possible dominator of
    // the incoming item is the most recently kept point.
    match out.last() {
        Some(last) if last.0.h <= item.0.h => {}
        _ => out.push(item),
    }
}

/// The least factor `rho` with `b <= shift(a, rho)`, i.e. the smallest
/// multiplicative blow-up of `a` that lands inside `b`'s closure.
///
/// For each minimal point `p` of `a` the inner minimum over `q` in `b` of
/// `max(q.w / p.w, q.h / p.h)` is located by binary search: the predicate
/// `q.w * p.h >= q.h * p.w` (width ratio overtakes height ratio) is monotone
/// along `b`, the maximum ratio is decreasing before the crossover and
/// increasing from it, so only the two candidates around the crossover need
/// division.
pub fn minimal_shift<C: Coord>(a: &Staircase<C>, b: &Staircase<C>) -> C {
    let mut best: Option<C> = None;
    for p in a.points() {
        let j = b
            .points()
            .partition_point(|q| q.w.clone() * p.h.clone() < q.h.clone() * p.w.clone());
        let mut local: Option<C> = None;
        if j < b.len() {
            let q = &b.points()[j];
            local = Some(q.w.clone() / p.w.clone());
        }
        if j > 0 {
            let q = &b.points()[j - 1];
            let cand = q.h.clone() / p.h.clone();
            local = Some(match local {
                Some(cur) if cur <= cand => cur,
                _ => cand,
            });
        }
        let local = local.expect("staircases are never empty");
        if best.as_ref().map_or(true, |m| local > *m) {
            best = Some(local);
        }
    }
    best.expect("staircases are never empty")
}

const EXACT_CSV_HEADER: &str = "w_num,w_den,h_num,h_den,construction,src_l,src_b";
const FLOAT_CSV_HEADER: &str = "w,h,construction";

/// Serializes an exact staircase to CSV. When provenance is supplied it must
/// be parallel to the antichain; points without provenance (level-1 fronts)
/// leave the last three columns empty.
pub fn exact_to_csv(s: &Staircase<BigRational>, provenance: Option<&[Provenance]>) -> String {
    let mut out = String::new();
    out.push_str(EXACT_CSV_HEADER);
    out.push('\n');
    for (i, p) in s.points().iter().enumerate() {
        let _ = write!(
            out,
            "{},{},{},{}",
            p.w.numer(),
            p.w.denom(),
            p.h.numer(),
            p.h.denom()
        );
        match provenance.and_then(|pr| pr.get(i)) {
            Some(pr) => {
                let _ = write!(out, ",{},{},{}", pr.construction.id(), pr.side, pr.bottom);
            }
            None => out.push_str(",,,"),
        }
        out.push('\n');
    }
    out
}

/// Serializes a floating-point staircase to CSV (shortest round-trip float
/// formatting).
pub fn float_to_csv(s: &Staircase<f64>, provenance: Option<&[Provenance]>) -> String {
    let mut out = String::new();
    out.push_str(FLOAT_CSV_HEADER);
    out.push('\n');
    for (i, p) in s.points().iter().enumerate() {
        let _ = write!(out, "{},{}", p.w, p.h);
        match provenance.and_then(|pr| pr.get(i)) {
            Some(pr) => {
                let _ = write!(out, ",{}", pr.construction.id());
            }
            None => out.push(','),
        }
        out.push('\n');
    }
    out
}

/// Parses the exact CSV format back. The rows must already form a sorted
/// antichain (as written by [`exact_to_csv`]); anything else is rejected so
/// that provenance rows stay aligned with the points.
pub fn exact_from_csv(
    text: &str,
) -> Result<(Staircase<BigRational>, Vec<Option<Provenance>>), StaircaseError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == EXACT_CSV_HEADER => {}
        _ => {
            return Err(StaircaseError::Parse {
                line: 1,
                reason: format!("expected header `{EXACT_CSV_HEADER}`"),
            })
        }
    }
    let mut points: Vec<Point2<BigRational>> = Vec::new();
    let mut provenance: Vec<Option<Provenance>> = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(StaircaseError::Parse {
                line: line_no,
                reason: format!("expected 7 fields, found {}", fields.len()),
            });
        }
        let parse_int = |s: &str, what: &str| -> Result<BigInt, StaircaseError> {
            BigInt::from_str(s).map_err(|e| StaircaseError::Parse {
                line: line_no,
                reason: format!("{what}: {e}"),
            })
        };
        let w_num = parse_int(fields[0], "width numerator")?;
        let w_den = parse_int(fields[1], "width denominator")?;
        let h_num = parse_int(fields[2], "height numerator")?;
        let h_den = parse_int(fields[3], "height denominator")?;
        if w_den.is_zero() || h_den.is_zero() {
            return Err(StaircaseError::Parse {
                line: line_no,
                reason: "zero denominator".to_string(),
            });
        }
        let p = Point2::new(BigRational::new(w_num, w_den), BigRational::new(h_num, h_den));
        if !p.is_strictly_positive() {
            return Err(StaircaseError::Parse {
                line: line_no,
                reason: "coordinates must be positive".to_string(),
            });
        }
        let prov = match (fields[4], fields[5], fields[6]) {
            ("", "", "") => None,
            (c, l, b) => {
                let id: u8 = c.parse().map_err(|_| StaircaseError::Parse {
                    line: line_no,
                    reason: format!("bad construction id `{c}`"),
                })?;
                let construction =
                    Construction::from_id(id).ok_or_else(|| StaircaseError::Parse {
                        line: line_no,
                        reason: format!("bad construction id `{id}`"),
                    })?;
                let side: usize = l.parse().map_err(|_| StaircaseError::Parse {
                    line: line_no,
                    reason: format!("bad side index `{l}`"),
                })?;
                let bottom: usize = b.parse().map_err(|_| StaircaseError::Parse {
                    line: line_no,
                    reason: format!("bad bottom index `{b}`"),
                })?;
                Some(Provenance {
                    construction,
                    side,
                    bottom,
                })
            }
        };
        if let Some(last) = points.last() {
            if !(last.w < p.w && last.h > p.h) {
                return Err(StaircaseError::Parse {
                    line: line_no,
                    reason: "rows must form a sorted antichain".to_string(),
                });
            }
        }
        points.push(p);
        provenance.push(prov);
    }
    if points.is_empty() {
        return Err(StaircaseError::Empty);
    }
    Ok((Staircase { points }, provenance))
}
