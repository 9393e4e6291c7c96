//! Explicit straight-line orthogonal drawings of complete ternary trees.
//!
//! A [`ConstructionTree`] records, per internal node, which of the two
//! recursive constructions to apply and which sub-trees fill the side and
//! bottom copies. [`generate`] turns that record into grid coordinates;
//! [`Drawing::validate`] checks the geometric requirements:
//!
//! (a) nodes in bounds and pairwise distinct,
//! (b) every parent-child edge axis-aligned,
//! (c) no node in the interior of an edge,
//! (d) no two edges sharing a grid point except at common endpoints,
//! (e) bounding boxes of sibling subtrees pairwise disjoint,
//! (f) root on the centre column,
//! (g) the vertical ray from the root to the top edge free of nodes and
//!     edges.
//!
//! (a)-(e) make a drawing valid; (f)-(g) additionally make it pluggable as
//! a rotated side copy, which is what the size recurrences count.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::staircase::Construction;

/// Maximum levels that [`generate`] will materialize (the node count grows
/// as `3^levels`).
pub const MAX_GENERATED_LEVELS: u32 = 14;

/// Errors from drawing construction and rendering.
#[derive(Debug, Error)]
pub enum DrawingError {
    /// The node map does not describe a complete ternary tree, or a
    /// construction tree cannot be materialized.
    #[error("structure: {0}")]
    Structure(String),
    /// Rendering requires checks (a)-(d) to hold.
    #[error("invalid drawing")]
    Invalid,
}

/// Path of a node from the root: digit 0 descends into the left copy,
/// 1 into the bottom copy, 2 into the right copy.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(Vec<u8>);

impl NodeId {
    pub fn root() -> Self {
        NodeId(Vec::new())
    }

    pub fn from_digits(digits: &[u8]) -> Result<Self, DrawingError> {
        if digits.iter().any(|&d| d > 2) {
            return Err(DrawingError::Structure("node digits must be 0..=2".into()));
        }
        Ok(NodeId(digits.to_vec()))
    }

    pub fn digits(&self) -> &[u8] {
        &self.0
    }

    /// Depth below the root (root is 0).
    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn child(&self, digit: u8) -> Self {
        debug_assert!(digit <= 2);
        let mut d = self.0.clone();
        d.push(digit);
        NodeId(d)
    }

    pub fn parent(&self) -> Option<Self> {
        if self.0.is_empty() {
            None
        } else {
            Some(NodeId(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// The path with left and right branches exchanged.
    pub fn mirrored(&self) -> Self {
        NodeId(self.0.iter().map(|&d| 2 - d).collect())
    }

    fn prepend(&mut self, digit: u8) {
        self.0.insert(0, digit);
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Recursive plan for drawing a complete ternary tree: a leaf, or a
/// construction choice with the plans for the (mirrored) side copies and
/// the bottom copy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstructionTree {
    Leaf,
    Node {
        construction: Construction,
        side: Box<ConstructionTree>,
        bottom: Box<ConstructionTree>,
    },
}

impl ConstructionTree {
    pub fn node(construction: Construction, side: ConstructionTree, bottom: ConstructionTree) -> Self {
        ConstructionTree::Node {
            construction,
            side: Box::new(side),
            bottom: Box::new(bottom),
        }
    }

    /// Number of levels, provided every branch has the same depth (a
    /// complete ternary tree requires it).
    pub fn uniform_levels(&self) -> Option<u32> {
        match self {
            ConstructionTree::Leaf => Some(1),
            ConstructionTree::Node { side, bottom, .. } => {
                let s = side.uniform_levels()?;
                let b = bottom.uniform_levels()?;
                (s == b).then_some(s + 1)
            }
        }
    }

    /// Grid size the construction recurrences predict for this plan.
    pub fn predicted_size(&self) -> Result<(i64, i64), DrawingError> {
        let too_deep = || DrawingError::Structure("predicted size overflows i64".into());
        match self {
            ConstructionTree::Leaf => Ok((1, 1)),
            ConstructionTree::Node {
                construction,
                side,
                bottom,
            } => {
                let (ws, hs) = side.predicted_size()?;
                let (wb, hb) = bottom.predicted_size()?;
                match construction {
                    Construction::One => {
                        let w = hs
                            .checked_mul(2)
                            .and_then(|x| x.checked_add(wb))
                            .ok_or_else(too_deep)?;
                        let lifted = (ws + 1) / 2 + hb;
                        Ok((w, ws.max(lifted)))
                    }
                    Construction::Two => {
                        let w = hs
                            .checked_mul(2)
                            .and_then(|x| x.checked_add(1))
                            .ok_or_else(too_deep)?
                            .max(wb);
                        Ok((w, ws.checked_add(hb).ok_or_else(too_deep)?))
                    }
                }
            }
        }
    }
}

/// Node coordinates on a `width x height` grid, `(0, 0)` the top-left cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Drawing {
    levels: u32,
    width: i64,
    height: i64,
    positions: BTreeMap<NodeId, (i64, i64)>,
}

/// Outcome of the geometric checks; field order follows (a)-(g).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub in_bounds_distinct: bool,
    pub edges_axis_aligned: bool,
    pub edge_interiors_clear: bool,
    pub no_crossings: bool,
    pub subtree_separation: bool,
    pub root_centered: bool,
    pub root_ray_free: bool,
}

impl ValidationReport {
    /// Checks (a)-(e): a correct drawing of the tree.
    pub fn valid_drawing(&self) -> bool {
        self.in_bounds_distinct
            && self.edges_axis_aligned
            && self.edge_interiors_clear
            && self.no_crossings
            && self.subtree_separation
    }

    /// Checks (a)-(g): additionally usable as a rotated side copy, which is
    /// the predicate the size fronts count.
    pub fn satisfies_size_predicate(&self) -> bool {
        self.valid_drawing() && self.root_centered && self.root_ray_free
    }
}

#[derive(Serialize)]
struct NodeDto {
    path: String,
    x: i64,
    y: i64,
}

#[derive(Serialize)]
struct DrawingDto {
    levels: u32,
    width: i64,
    height: i64,
    nodes: Vec<NodeDto>,
}

fn node_count(levels: u32) -> usize {
    ((3usize.pow(levels)) - 1) / 2
}

/// Closed integer rectangles (min_x, max_x, min_y, max_y).
fn boxes_intersect(a: (i64, i64, i64, i64), b: (i64, i64, i64, i64)) -> bool {
    a.0 <= b.1 && b.0 <= a.1 && a.2 <= b.3 && b.2 <= a.3
}

impl Drawing {
    /// Builds a drawing from explicit node positions, verifying that the
    /// node set is exactly a complete ternary tree with `levels` levels.
    pub fn from_positions(
        levels: u32,
        width: i64,
        height: i64,
        positions: BTreeMap<NodeId, (i64, i64)>,
    ) -> Result<Self, DrawingError> {
        if levels == 0 {
            return Err(DrawingError::Structure("levels must be at least 1".into()));
        }
        if width <= 0 || height <= 0 {
            return Err(DrawingError::Structure("grid must be positive".into()));
        }
        let expected = node_count(levels);
        if positions.len() != expected {
            return Err(DrawingError::Structure(format!(
                "expected {expected} nodes for {levels} levels, found {}",
                positions.len()
            )));
        }
        for id in positions.keys() {
            if id.depth() as u32 >= levels {
                return Err(DrawingError::Structure(format!(
                    "node {id} deeper than {levels} levels"
                )));
            }
            if id.digits().iter().any(|&d| d > 2) {
                return Err(DrawingError::Structure("node digits must be 0..=2".into()));
            }
            if let Some(parent) = id.parent() {
                if !positions.contains_key(&parent) {
                    return Err(DrawingError::Structure(format!(
                        "node {id} has no parent in the map"
                    )));
                }
            }
        }
        // A parent-closed subset of the complete tree with the full node
        // count and bounded depth is the complete tree itself.
        Ok(Drawing {
            levels,
            width,
            height,
            positions,
        })
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn width(&self) -> i64 {
        self.width
    }

    pub fn height(&self) -> i64 {
        self.height
    }

    pub fn position(&self, id: &NodeId) -> Option<(i64, i64)> {
        self.positions.get(id).copied()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&NodeId, &(i64, i64))> {
        self.positions.iter()
    }

    /// Parent-child segments as (parent position, child position).
    fn edges(&self) -> Vec<((i64, i64), (i64, i64))> {
        self.positions
            .iter()
            .filter(|(id, _)| id.depth() > 0)
            .map(|(id, &child)| {
                let parent = self.positions[&id.parent().expect("non-root")];
                (parent, child)
            })
            .collect()
    }

    /// Re-centers the drawing horizontally on a wider grid and pads rows at
    /// the bottom, preserving all checks (a)-(g). The new width must keep
    /// the centre column aligned, so it must be odd when the root moves.
    pub fn embedded_in(&self, width: i64, height: i64) -> Result<Self, DrawingError> {
        if width < self.width || height < self.height {
            return Err(DrawingError::Structure(format!(
                "target grid {width}x{height} smaller than drawing {}x{}",
                self.width, self.height
            )));
        }
        if width % 2 == 0 {
            return Err(DrawingError::Structure(
                "target width must be odd to keep the root centred".into(),
            ));
        }
        let dx = (width - 1) / 2 - (self.width - 1) / 2;
        let positions = self
            .positions
            .iter()
            .map(|(id, &(x, y))| (id.clone(), (x + dx, y)))
            .collect();
        Ok(Drawing {
            levels: self.levels,
            width,
            height,
            positions,
        })
    }

    /// Runs the geometric checks (a)-(g).
    pub fn validate(&self) -> ValidationReport {
        let positions = &self.positions;

        // (a) in bounds and distinct.
        let mut occupied: HashMap<(i64, i64), &NodeId> = HashMap::with_capacity(positions.len());
        let mut in_bounds_distinct = true;
        for (id, &(x, y)) in positions {
            if !(0 <= x && x < self.width && 0 <= y && y < self.height) {
                in_bounds_distinct = false;
            }
            if occupied.insert((x, y), id).is_some() {
                in_bounds_distinct = false;
            }
        }

        // (b) axis-aligned edges.
        let edges = self.edges();
        let edges_axis_aligned = edges
            .iter()
            .all(|&((x1, y1), (x2, y2))| (x1 == x2) != (y1 == y2));

        // (c) + (d) via the coverage map: every grid point an edge passes
        // through, flagged endpoint or interior. Skipped for non-axis
        // segments (reported by (b) already).
        let mut coverage: HashMap<(i64, i64), Vec<(usize, bool)>> = HashMap::new();
        for (idx, &((x1, y1), (x2, y2))) in edges.iter().enumerate() {
            if (x1 == x2) == (y1 == y2) {
                continue;
            }
            if x1 == x2 {
                let (lo, hi) = (y1.min(y2), y1.max(y2));
                for y in lo..=hi {
                    coverage
                        .entry((x1, y))
                        .or_default()
                        .push((idx, y == y1 || y == y2));
                }
            } else {
                let (lo, hi) = (x1.min(x2), x1.max(x2));
                for x in lo..=hi {
                    coverage
                        .entry((x, y1))
                        .or_default()
                        .push((idx, x == x1 || x == x2));
                }
            }
        }
        // Edge endpoints always coincide with nodes; interiors never may.
        let edge_interiors_clear = coverage.iter().all(|(cell, hits)| {
            hits.iter().all(|&(_, endpoint)| endpoint) || !occupied.contains_key(cell)
        });
        let no_crossings = coverage
            .values()
            .all(|hits| hits.len() < 2 || hits.iter().all(|&(_, endpoint)| endpoint));

        // (e) sibling subtree bounding boxes pairwise disjoint, bottom-up.
        let subtree_separation = self.sibling_boxes_disjoint();

        // (f) root on the centre column.
        let root_pos = positions.get(&NodeId::root()).copied();
        let root_centered = root_pos.map_or(false, |(x, _)| x == (self.width - 1) / 2);

        // (g) the vertical ray from the root to the top edge crosses no
        // node and no edge.
        let root_ray_free = root_pos.map_or(false, |(rx, ry)| {
            (0..ry).all(|y| !occupied.contains_key(&(rx, y)) && !coverage.contains_key(&(rx, y)))
        });

        ValidationReport {
            in_bounds_distinct,
            edges_axis_aligned,
            edge_interiors_clear,
            no_crossings,
            subtree_separation,
            root_centered,
            root_ray_free,
        }
    }

    fn sibling_boxes_disjoint(&self) -> bool {
        fn bbox(
            drawing: &Drawing,
            id: &NodeId,
            ok: &mut bool,
        ) -> (i64, i64, i64, i64) {
            let (x, y) = drawing.positions[id];
            let mut acc = (x, x, y, y);
            if (id.depth() as u32) + 1 < drawing.levels {
                let children: Vec<(i64, i64, i64, i64)> = (0u8..3)
                    .map(|d| bbox(drawing, &id.child(d), ok))
                    .collect();
                for i in 0..3 {
                    for j in (i + 1)..3 {
                        if boxes_intersect(children[i], children[j]) {
                            *ok = false;
                        }
                    }
                }
                for c in children {
                    acc = (
                        acc.0.min(c.0),
                        acc.1.max(c.1),
                        acc.2.min(c.2),
                        acc.3.max(c.3),
                    );
                }
            }
            acc
        }
        let mut ok = true;
        if self.levels > 0 {
            bbox(self, &NodeId::root(), &mut ok);
        }
        ok
    }

    /// True when mirroring left-right (and swapping the 0/2 branches) maps
    /// the drawing onto itself.
    pub fn is_vertically_symmetric(&self) -> bool {
        self.positions.iter().all(|(id, &(x, y))| {
            self.positions.get(&id.mirrored()) == Some(&(self.width - 1 - x, y))
        })
    }

    /// ASCII rendering on a doubled grid: nodes `o`, edge segments `-`/`|`,
    /// empty cells `.`. Requires checks (a)-(d).
    pub fn render_ascii(&self) -> Result<String, DrawingError> {
        let report = self.validate();
        if !(report.in_bounds_distinct
            && report.edges_axis_aligned
            && report.edge_interiors_clear
            && report.no_crossings)
        {
            return Err(DrawingError::Invalid);
        }
        let cols = (self.width * 2 - 1) as usize;
        let rows = (self.height * 2 - 1) as usize;
        let mut grid = vec![b'.'; cols * rows];
        let mut set = |x: i64, y: i64, ch: u8| {
            grid[y as usize * cols + x as usize] = ch;
        };
        for &((x1, y1), (x2, y2)) in &self.edges() {
            if x1 == x2 {
                let (lo, hi) = (y1.min(y2), y1.max(y2));
                for yy in (2 * lo + 1)..(2 * hi) {
                    set(2 * x1, yy, b'|');
                }
            } else {
                let (lo, hi) = (x1.min(x2), x1.max(x2));
                for xx in (2 * lo + 1)..(2 * hi) {
                    set(xx, 2 * y1, b'-');
                }
            }
        }
        for &(x, y) in self.positions.values() {
            set(2 * x, 2 * y, b'o');
        }
        let mut out = String::with_capacity((cols + 1) * rows);
        for r in 0..rows {
            out.push_str(
                std::str::from_utf8(&grid[r * cols..(r + 1) * cols]).expect("ascii grid"),
            );
            out.push('\n');
        }
        Ok(out)
    }

    /// SVG rendering with one line per edge and one circle per node.
    /// Requires checks (a)-(d).
    pub fn render_svg(&self) -> Result<String, DrawingError> {
        let report = self.validate();
        if !(report.in_bounds_distinct
            && report.edges_axis_aligned
            && report.edge_interiors_clear
            && report.no_crossings)
        {
            return Err(DrawingError::Invalid);
        }
        const CELL: i64 = 20;
        const PAD: i64 = 10;
        let px = |x: i64| x * CELL + PAD;
        let mut out = String::new();
        let (w, h) = (px(self.width - 1) + PAD, px(self.height - 1) + PAD);
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
             viewBox=\"0 0 {w} {h}\">\n"
        ));
        for ((x1, y1), (x2, y2)) in self.edges() {
            out.push_str(&format!(
                "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" \
                 stroke=\"#333333\" stroke-width=\"2\"/>\n",
                px(x1),
                px(y1),
                px(x2),
                px(y2)
            ));
        }
        for (id, &(x, y)) in &self.positions {
            let fill = if id.depth() == 0 { "#d04040" } else { "#4068c0" };
            out.push_str(&format!(
                "  <circle cx=\"{}\" cy=\"{}\" r=\"5\" fill=\"{fill}\"/>\n",
                px(x),
                px(y)
            ));
        }
        out.push_str("</svg>\n");
        Ok(out)
    }

    /// JSON description: levels, grid size, and per-node path/coordinates.
    pub fn to_json(&self) -> String {
        let dto = DrawingDto {
            levels: self.levels,
            width: self.width,
            height: self.height,
            nodes: self
                .positions
                .iter()
                .map(|(id, &(x, y))| NodeDto {
                    path: id.to_string(),
                    x,
                    y,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&dto).expect("serializable") + "\n"
    }
}

/// A placed subdrawing during generation.
struct Placed {
    width: i64,
    height: i64,
    cells: Vec<(NodeId, i64, i64)>,
}

/// Materializes a construction plan into grid coordinates.
///
/// The side plan is drawn once, then placed twice: rotated clockwise on the
/// left and counter-clockwise on the right, which mirrors it. The bottom
/// plan is placed below the root. Grid size always equals
/// [`ConstructionTree::predicted_size`].
pub fn generate(tree: &ConstructionTree) -> Result<Drawing, DrawingError> {
    let levels = tree.uniform_levels().ok_or_else(|| {
        DrawingError::Structure("side and bottom subtrees must have equal depth".into())
    })?;
    if levels > MAX_GENERATED_LEVELS {
        return Err(DrawingError::Structure(format!(
            "refusing to materialize {levels} levels (limit {MAX_GENERATED_LEVELS})"
        )));
    }
    let placed = place(tree);
    let mut positions = BTreeMap::new();
    for (id, x, y) in placed.cells {
        match positions.entry(id) {
            Entry::Vacant(v) => {
                v.insert((x, y));
            }
            Entry::Occupied(o) => {
                return Err(DrawingError::Structure(format!(
                    "duplicate node {}",
                    o.key()
                )))
            }
        }
    }
    Drawing::from_positions(levels, placed.width, placed.height, positions)
}

fn place(tree: &ConstructionTree) -> Placed {
    match tree {
        ConstructionTree::Leaf => Placed {
            width: 1,
            height: 1,
            cells: vec![(NodeId::root(), 0, 0)],
        },
        ConstructionTree::Node {
            construction,
            side,
            bottom,
        } => {
            let s = place(side);
            let b = place(bottom);
            let (width, height, root, left_map, right_map, bottom_map): (
                i64,
                i64,
                (i64, i64),
                Box<dyn Fn(i64, i64) -> (i64, i64)>,
                Box<dyn Fn(i64, i64) -> (i64, i64)>,
                Box<dyn Fn(i64, i64) -> (i64, i64)>,
            ) = match construction {
                Construction::One => {
                    // Side copies rotated and flush against the grid edges,
                    // vertically spanning rows 0..s.width; bottom copy one
                    // row below the root.
                    let width = 2 * s.height + b.width;
                    let root_row = (s.width - 1) / 2;
                    let height = s.width.max(root_row + 1 + b.height);
                    let root_col = s.height + (b.width - 1) / 2;
                    let sh = s.height;
                    let sw = s.width;
                    let bw = b.width;
                    (
                        width,
                        height,
                        (root_col, root_row),
                        Box::new(move |x, y| (sh - 1 - y, x)),
                        Box::new(move |x, y| (sh + bw + y, sw - 1 - x)),
                        Box::new(move |x, y| (sh + x, root_row + 1 + y)),
                    )
                }
                Construction::Two => {
                    // Side copies rotated and adjacent to the root column;
                    // bottom copy centred underneath them.
                    let width = (2 * s.height + 1).max(b.width);
                    let centre = (width - 1) / 2;
                    let root_row = (s.width - 1) / 2;
                    let height = s.width + b.height;
                    let sw = s.width;
                    let bw = b.width;
                    (
                        width,
                        height,
                        (centre, root_row),
                        Box::new(move |x, y| (centre - 1 - y, x)),
                        Box::new(move |x, y| (centre + 1 + y, sw - 1 - x)),
                        Box::new(move |x, y| (centre - (bw - 1) / 2 + x, sw + y)),
                    )
                }
            };
            let mut cells =
                Vec::with_capacity(1 + 2 * s.cells.len() + b.cells.len());
            cells.push((NodeId::root(), root.0, root.1));
            for (id, x, y) in &s.cells {
                let mut left_id = id.clone();
                left_id.prepend(0);
                let (lx, ly) = left_map(*x, *y);
                cells.push((left_id, lx, ly));
                let mut right_id = id.clone();
                right_id.prepend(2);
                let (rx, ry) = right_map(*x, *y);
                cells.push((right_id, rx, ry));
            }
            for (id, x, y) in &b.cells {
                let mut bottom_id = id.clone();
                bottom_id.prepend(1);
                let (bx, by) = bottom_map(*x, *y);
                cells.push((bottom_id, bx, by));
            }
            Placed {
                width,
                height,
                cells,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::rational::BigRational;
    use num::BigInt;
    use proptest::prelude::*;

    fn leaf() -> ConstructionTree {
        ConstructionTree::Leaf
    }

    fn n1(side: ConstructionTree, bottom: ConstructionTree) -> ConstructionTree {
        ConstructionTree::node(Construction::One, side, bottom)
    }

    fn n2(side: ConstructionTree, bottom: ConstructionTree) -> ConstructionTree {
        ConstructionTree::node(Construction::Two, side, bottom)
    }

    fn id(digits: &[u8]) -> NodeId {
        NodeId::from_digits(digits).unwrap()
    }

    fn drawing_from(
        levels: u32,
        width: i64,
        height: i64,
        nodes: &[(&str, i64, i64)],
    ) -> Drawing {
        let positions = nodes
            .iter()
            .map(|&(path, x, y)| {
                let digits: Vec<u8> = path.bytes().map(|b| b - b'0').collect();
                (NodeId::from_digits(&digits).unwrap(), (x, y))
            })
            .collect();
        Drawing::from_positions(levels, width, height, positions).unwrap()
    }

    #[test]
    fn predicted_sizes_frozen() {
        assert_eq!(leaf().predicted_size().unwrap(), (1, 1));
        assert_eq!(n1(leaf(), leaf()).predicted_size().unwrap(), (3, 2));
        assert_eq!(n2(leaf(), leaf()).predicted_size().unwrap(), (3, 2));
        let t2 = || n2(leaf(), leaf());
        assert_eq!(n1(t2(), t2()).predicted_size().unwrap(), (7, 4));
        assert_eq!(n2(t2(), t2()).predicted_size().unwrap(), (5, 5));
    }

    #[test]
    fn generate_two_levels_both_constructions() {
        for tree in [n1(leaf(), leaf()), n2(leaf(), leaf())] {
            let d = generate(&tree).unwrap();
            assert_eq!((d.width(), d.height()), (3, 2));
            assert_eq!(d.position(&id(&[])), Some((1, 0)));
            assert_eq!(d.position(&id(&[0])), Some((0, 0)));
            assert_eq!(d.position(&id(&[1])), Some((1, 1)));
            assert_eq!(d.position(&id(&[2])), Some((2, 0)));
        }
    }

    #[test]
    fn generate_three_levels_construction_two() {
        let d = generate(&n2(n2(leaf(), leaf()), n2(leaf(), leaf()))).unwrap();
        assert_eq!((d.width(), d.height()), (5, 5));
        let expected = [
            ("", 2, 1),
            ("0", 1, 1),
            ("00", 1, 0),
            ("01", 0, 1),
            ("02", 1, 2),
            ("1", 2, 3),
            ("10", 1, 3),
            ("11", 2, 4),
            ("12", 3, 3),
            ("2", 3, 1),
            ("20", 3, 2),
            ("21", 4, 1),
            ("22", 3, 0),
        ];
        for (path, x, y) in expected {
            let digits: Vec<u8> = path.bytes().map(|b| b - b'0').collect();
            assert_eq!(d.position(&id(&digits)), Some((x, y)), "node {path}");
        }
        assert!(d.validate().satisfies_size_predicate());
    }

    #[test]
    fn generate_three_levels_construction_one() {
        let d = generate(&n1(n2(leaf(), leaf()), n2(leaf(), leaf()))).unwrap();
        assert_eq!((d.width(), d.height()), (7, 4));
        let expected = [
            ("", 3, 1),
            ("0", 1, 1),
            ("00", 1, 0),
            ("01", 0, 1),
            ("02", 1, 2),
            ("1", 3, 2),
            ("10", 2, 2),
            ("11", 3, 3),
            ("12", 4, 2),
            ("2", 5, 1),
            ("20", 5, 2),
            ("21", 6, 1),
            ("22", 5, 0),
        ];
        for (path, x, y) in expected {
            let digits: Vec<u8> = path.bytes().map(|b| b - b'0').collect();
            assert_eq!(d.position(&id(&digits)), Some((x, y)), "node {path}");
        }
        assert!(d.validate().satisfies_size_predicate());
    }

    #[test]
    fn generate_rejects_uneven_depths() {
        let lopsided = n1(leaf(), n2(leaf(), leaf()));
        assert!(matches!(
            generate(&lopsided),
            Err(DrawingError::Structure(_))
        ));
    }

    fn all_trees(levels: u32) -> Vec<ConstructionTree> {
        if levels == 1 {
            return vec![leaf()];
        }
        let subs = all_trees(levels - 1);
        let mut out = Vec::new();
        for c in [Construction::One, Construction::Two] {
            for s in &subs {
                for b in &subs {
                    out.push(ConstructionTree::node(c, s.clone(), b.clone()));
                }
            }
        }
        out
    }

    #[test]
    fn exhaustive_small_trees_validate_and_match_predictions() {
        let mut count = 0;
        for levels in 1..=4 {
            for tree in all_trees(levels) {
                let d = generate(&tree).unwrap();
                let (w, h) = tree.predicted_size().unwrap();
                assert_eq!((d.width(), d.height()), (w, h));
                let report = d.validate();
                assert!(
                    report.satisfies_size_predicate(),
                    "tree {tree:?} failed {report:?}"
                );
                assert!(d.is_vertically_symmetric());
                count += 1;
            }
        }
        assert_eq!(count, 1 + 2 + 8 + 128);
    }

    #[test]
    fn exhaustive_depth_five_trees_validate() {
        let mut count = 0u32;
        for tree in all_trees(5) {
            let d = generate(&tree).unwrap();
            let (w, h) = tree.predicted_size().unwrap();
            assert_eq!((d.width(), d.height()), (w, h));
            assert!(d.validate().satisfies_size_predicate());
            count += 1;
        }
        assert_eq!(count, 2 * 128 * 128);
    }

    #[test]
    fn separation_violation_detected() {
        // Hand-built 9x5 layout: left subtree sprawls down the left edge,
        // bottom subtree reaches left underneath it, so their boxes (and
        // two edges) collide while nodes stay distinct and off the edge
        // interiors.
        let d = drawing_from(
            3,
            9,
            5,
            &[
                ("", 4, 1),
                ("0", 1, 1),
                ("00", 1, 0),
                ("01", 1, 4),
                ("02", 0, 1),
                ("1", 4, 3),
                ("10", 0, 3),
                ("11", 4, 4),
                ("12", 5, 3),
                ("2", 7, 1),
                ("20", 7, 0),
                ("21", 7, 2),
                ("22", 8, 1),
            ],
        );
        let report = d.validate();
        assert!(report.in_bounds_distinct);
        assert!(report.edges_axis_aligned);
        assert!(report.edge_interiors_clear);
        assert!(!report.subtree_separation);
        assert!(!report.no_crossings);
        assert!(!report.valid_drawing());
    }

    #[test]
    fn hand_built_valid_drawing_passes() {
        // A 7x5 three-level drawing not produced by either construction.
        let d = drawing_from(
            3,
            7,
            5,
            &[
                ("", 3, 1),
                ("0", 1, 1),
                ("00", 1, 0),
                ("01", 1, 2),
                ("02", 0, 1),
                ("1", 3, 3),
                ("10", 2, 3),
                ("11", 3, 4),
                ("12", 4, 3),
                ("2", 5, 1),
                ("20", 5, 0),
                ("21", 5, 2),
                ("22", 6, 1),
            ],
        );
        let report = d.validate();
        assert!(report.satisfies_size_predicate(), "{report:?}");
    }

    #[test]
    fn out_of_bounds_and_duplicates_detected() {
        let d = drawing_from(2, 3, 2, &[("", 1, 0), ("0", 0, 0), ("1", 1, 1), ("2", 3, 0)]);
        assert!(!d.validate().in_bounds_distinct);
        let d = drawing_from(2, 3, 2, &[("", 1, 0), ("0", 0, 0), ("1", 0, 0), ("2", 2, 0)]);
        assert!(!d.validate().in_bounds_distinct);
    }

    #[test]
    fn diagonal_edge_detected() {
        let d = drawing_from(2, 3, 2, &[("", 1, 0), ("0", 0, 0), ("1", 0, 1), ("2", 2, 0)]);
        assert!(!d.validate().edges_axis_aligned);
    }

    #[test]
    fn node_on_edge_interior_detected() {
        // Root at the centre, left child two cells away, bottom child on
        // the connecting row in between.
        let d = drawing_from(2, 5, 2, &[("", 2, 0), ("0", 0, 0), ("1", 1, 0), ("2", 4, 0)]);
        let report = d.validate();
        assert!(!report.edge_interiors_clear);
    }

    #[test]
    fn structure_errors_rejected() {
        // Wrong node count.
        let mut positions = BTreeMap::new();
        positions.insert(NodeId::root(), (0, 0));
        assert!(matches!(
            Drawing::from_positions(2, 3, 2, positions),
            Err(DrawingError::Structure(_))
        ));
        // Orphan node (parent missing).
        let mut positions = BTreeMap::new();
        positions.insert(NodeId::root(), (1, 0));
        positions.insert(id(&[0]), (0, 0));
        positions.insert(id(&[1]), (1, 1));
        positions.insert(id(&[2, 2]), (2, 0));
        assert!(matches!(
            Drawing::from_positions(2, 3, 2, positions),
            Err(DrawingError::Structure(_))
        ));
        // Bad digits.
        assert!(NodeId::from_digits(&[3]).is_err());
    }

    #[test]
    fn ascii_render_two_levels_golden() {
        let d = generate(&n2(leaf(), leaf())).unwrap();
        assert_eq!(d.render_ascii().unwrap(), "o-o-o\n..|..\n..o..\n");
    }

    #[test]
    fn ascii_render_rejects_invalid() {
        let d = drawing_from(2, 3, 2, &[("", 1, 0), ("0", 0, 0), ("1", 0, 1), ("2", 2, 0)]);
        assert!(matches!(d.render_ascii(), Err(DrawingError::Invalid)));
        assert!(matches!(d.render_svg(), Err(DrawingError::Invalid)));
    }

    #[test]
    fn svg_render_counts() {
        let d = generate(&n2(n2(leaf(), leaf()), n2(leaf(), leaf()))).unwrap();
        let svg = d.render_svg().unwrap();
        assert_eq!(svg.matches("<circle").count(), 13);
        assert_eq!(svg.matches("<line").count(), 12);
        assert!(svg.starts_with("<svg "));
        // Deterministic output.
        assert_eq!(svg, d.render_svg().unwrap());
    }

    #[test]
    fn json_golden_two_levels() {
        let d = generate(&n2(leaf(), leaf())).unwrap();
        let json: serde_json::Value = serde_json::from_str(&d.to_json()).unwrap();
        assert_eq!(json["levels"], 2);
        assert_eq!(json["width"], 3);
        assert_eq!(json["height"], 2);
        let nodes = json["nodes"].as_array().unwrap();
        assert_eq!(nodes.len(), 4);
        assert_eq!(nodes[0]["path"], "");
        assert_eq!(nodes[0]["x"], 1);
        assert_eq!(nodes[1]["path"], "0");
        assert_eq!(nodes[2]["path"], "1");
        assert_eq!(nodes[3]["path"], "2");
    }

    #[test]
    fn embedding_preserves_predicate() {
        let d = generate(&n2(n2(leaf(), leaf()), n2(leaf(), leaf()))).unwrap();
        let e = d.embedded_in(9, 7).unwrap();
        assert_eq!((e.width(), e.height()), (9, 7));
        assert!(e.validate().satisfies_size_predicate());
        assert!(e.is_vertically_symmetric());
        assert!(d.embedded_in(3, 9).is_err());
        assert!(d.embedded_in(6, 9).is_err());
    }

    #[test]
    fn asymmetric_drawing_detected() {
        let d = drawing_from(
            2,
            5,
            2,
            &[("", 2, 0), ("0", 0, 0), ("1", 2, 1), ("2", 4, 0)],
        );
        assert!(d.is_vertically_symmetric());
        let d = drawing_from(
            2,
            5,
            2,
            &[("", 2, 0), ("0", 1, 0), ("1", 2, 1), ("2", 4, 0)],
        );
        assert!(!d.is_vertically_symmetric());
    }

    #[test]
    fn mirrored_paths() {
        assert_eq!(id(&[0, 1, 2]).mirrored(), id(&[2, 1, 0]));
        assert_eq!(NodeId::root().mirrored(), NodeId::root());
        assert_eq!(id(&[0, 1, 2]).to_string(), "012");
        assert_eq!(NodeId::root().to_string(), "");
        assert_eq!(id(&[0, 1]).parent(), Some(id(&[0])));
        assert_eq!(NodeId::root().parent(), None);
    }

    proptest! {
        /// The integer construction-1 height form used throughout equals
        /// the exact half-integer expression whenever the side width is
        /// odd, which it always is for front points.
        #[test]
        fn integer_height_form_matches_rational(ws in 0u32..2000, hb in 1i64..4000) {
            let ws = 2 * ws as i64 + 1;
            let rat = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
            let exact_half = rat(ws, 2);
            let exact = exact_half.clone()
                + std::cmp::max(exact_half, rat(hb, 1) + rat(1, 2));
            let integer = std::cmp::max(ws, (ws + 1) / 2 + hb);
            prop_assert_eq!(exact, rat(integer, 1));
        }

        /// Random trees of uniform depth validate and match predictions.
        #[test]
        fn random_depth_six_trees_validate(seed in proptest::bits::u64::ANY) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            fn build(rng: &mut impl Rng, levels: u32) -> ConstructionTree {
                if levels == 1 {
                    return ConstructionTree::Leaf;
                }
                let c = if rng.gen_bool(0.5) {
                    Construction::One
                } else {
                    Construction::Two
                };
                ConstructionTree::node(
                    c,
                    build(rng, levels - 1),
                    build(rng, levels - 1),
                )
            }
            let tree = build(&mut rng, 6);
            let d = generate(&tree).unwrap();
            let (w, h) = tree.predicted_size().unwrap();
            prop_assert_eq!((d.width(), d.height()), (w, h));
            prop_assert!(d.validate().satisfies_size_predicate());
            prop_assert!(d.is_vertically_symmetric());
        }
    }
}
