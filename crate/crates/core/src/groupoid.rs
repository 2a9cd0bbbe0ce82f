//! Discrete groupoids and rectangular double groupoids.
//!
//! Arrows compose in diagram order: `(g1, g2)` is composable iff
//! `dst(g1) == src(g2)` and the composite runs `src(g1) -> dst(g2)`.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

pub type ObjectId = usize;
pub type ArrowId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub src: ObjectId,
    pub dst: ObjectId,
}

/// A principal discrete groupoid: at most one arrow between any ordered pair
/// of objects, so composition is determined by endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Groupoid {
    objects: usize,
    arrows: Vec<Arrow>,
    inverse: Vec<ArrowId>,
    units: Vec<ArrowId>,
    by_ends: HashMap<(ObjectId, ObjectId), ArrowId>,
}

impl Groupoid {
    /// The pair groupoid on `n` objects: one arrow `i -> j` for every pair.
    /// Arrow ids are `i * n + j`.
    pub fn pair(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("pair groupoid needs at least one object".into()));
        }
        let arrows: Vec<Arrow> = (0..n * n)
            .map(|k| Arrow {
                src: k / n,
                dst: k % n,
            })
            .collect();
        let inverse = arrows.iter().map(|a| a.dst * n + a.src).collect();
        let units = (0..n).map(|i| i * n + i).collect();
        let by_ends = arrows
            .iter()
            .enumerate()
            .map(|(k, a)| ((a.src, a.dst), k))
            .collect();
        Ok(Groupoid {
            objects: n,
            arrows,
            inverse,
            units,
            by_ends,
        })
    }

    pub fn object_count(&self) -> usize {
        self.objects
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn arrows(&self) -> impl Iterator<Item = (ArrowId, Arrow)> + '_ {
        self.arrows.iter().copied().enumerate()
    }

    pub fn arrow(&self, g: ArrowId) -> Result<Arrow> {
        self.arrows
            .get(g)
            .copied()
            .ok_or_else(|| Error::Lookup(format!("no arrow with id {g}")))
    }

    pub fn src(&self, g: ArrowId) -> ObjectId {
        self.arrows[g].src
    }

    pub fn dst(&self, g: ArrowId) -> ObjectId {
        self.arrows[g].dst
    }

    pub fn unit(&self, a: ObjectId) -> ArrowId {
        self.units[a]
    }

    pub fn units(&self) -> &[ArrowId] {
        &self.units
    }

    pub fn is_unit(&self, g: ArrowId) -> bool {
        let a = self.arrows[g];
        a.src == a.dst && self.units[a.src] == g
    }

    pub fn inverse(&self, g: ArrowId) -> ArrowId {
        self.inverse[g]
    }

    pub fn between(&self, src: ObjectId, dst: ObjectId) -> Option<ArrowId> {
        self.by_ends.get(&(src, dst)).copied()
    }

    pub fn is_composable(&self, g1: ArrowId, g2: ArrowId) -> bool {
        self.arrows[g1].dst == self.arrows[g2].src
    }

    pub fn compose(&self, g1: ArrowId, g2: ArrowId) -> Result<ArrowId> {
        let (a1, a2) = (self.arrow(g1)?, self.arrow(g2)?);
        if a1.dst != a2.src {
            return Err(Error::Composition {
                first: self.label(g1),
                second: self.label(g2),
            });
        }
        self.between(a1.src, a2.dst).ok_or_else(|| Error::Composition {
            first: self.label(g1),
            second: self.label(g2),
        })
    }

    /// All composable pairs, the set Γ².
    pub fn composable_pairs(&self) -> Vec<(ArrowId, ArrowId)> {
        let mut out = Vec::new();
        for g1 in 0..self.arrows.len() {
            for g2 in 0..self.arrows.len() {
                if self.is_composable(g1, g2) {
                    out.push((g1, g2));
                }
            }
        }
        out
    }

    /// Descriptor key for an arrow: `u:A` for units, `a:A>B` otherwise.
    pub fn label(&self, g: ArrowId) -> String {
        match self.arrows.get(g) {
            Some(a) if self.is_unit(g) => format!("u:{}", a.src),
            Some(a) => format!("a:{}>{}", a.src, a.dst),
            None => format!("?{g}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquareId {
    pub row: usize,
    pub col: usize,
}

impl SquareId {
    pub fn new(row: usize, col: usize) -> Self {
        SquareId { row, col }
    }
}

impl fmt::Display for SquareId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.row, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeDir {
    Horizontal,
    Vertical,
}

/// A grid edge. Horizontal edge `(r, c)` runs from vertex `(r, c)` to
/// `(r, c + 1)`; vertical edge `(r, c)` from `(r, c)` to `(r + 1, c)`.
/// `inverse` flips the direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub dir: EdgeDir,
    pub row: usize,
    pub col: usize,
    pub inverse: bool,
}

impl Edge {
    pub fn inv(self) -> Edge {
        Edge {
            inverse: !self.inverse,
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Composability {
    Horizontal,
    Vertical,
    None,
}

/// Rectangle of squares covered by a (composite) cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Footprint {
    pub top: usize,
    pub left: usize,
    pub rows: usize,
    pub cols: usize,
}

impl Footprint {
    pub fn square(s: SquareId) -> Self {
        Footprint {
            top: s.row,
            left: s.col,
            rows: 1,
            cols: 1,
        }
    }

    /// `other` sits immediately to the right of `self`, same row band.
    pub fn h_adjacent(&self, other: &Footprint) -> bool {
        self.top == other.top && self.rows == other.rows && other.left == self.left + self.cols
    }

    /// `other` sits immediately below `self`, same column band.
    pub fn v_adjacent(&self, other: &Footprint) -> bool {
        self.left == other.left && self.cols == other.cols && other.top == self.top + self.rows
    }

    pub fn h_join(&self, other: &Footprint) -> Footprint {
        Footprint {
            cols: self.cols + other.cols,
            ..*self
        }
    }

    pub fn v_join(&self, other: &Footprint) -> Footprint {
        Footprint {
            rows: self.rows + other.rows,
            ..*self
        }
    }
}

/// A rectangular grid double groupoid, optionally with folding.
///
/// Folding is represented by the pair groupoid on the vertex set: every
/// ordered pair of vertices indexes exactly one folded arrow, which is what
/// lets horizontal and vertical cells compose with each other.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleGroupoid {
    rows: usize,
    cols: usize,
    folded: Option<Groupoid>,
}

impl DoubleGroupoid {
    pub fn grid(rows: usize, cols: usize, folding: bool) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Domain(format!(
                "grid double groupoid needs positive rows and cols, got {rows}x{cols}"
            )));
        }
        let folded = if folding {
            Some(Groupoid::pair((rows + 1) * (cols + 1))?)
        } else {
            None
        };
        Ok(DoubleGroupoid { rows, cols, folded })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn folding(&self) -> bool {
        self.folded.is_some()
    }

    pub fn folded(&self) -> Option<&Groupoid> {
        self.folded.as_ref()
    }

    pub fn vertex_count(&self) -> usize {
        (self.rows + 1) * (self.cols + 1)
    }

    pub fn vertex(&self, r: usize, c: usize) -> ObjectId {
        r * (self.cols + 1) + c
    }

    pub fn vertex_pos(&self, v: ObjectId) -> (usize, usize) {
        (v / (self.cols + 1), v % (self.cols + 1))
    }

    pub fn squares(&self) -> Vec<SquareId> {
        (0..self.rows)
            .flat_map(|r| (0..self.cols).map(move |c| SquareId::new(r, c)))
            .collect()
    }

    /// Squares plus their inverses.
    pub fn square_count(&self) -> usize {
        2 * self.rows * self.cols
    }

    pub fn check_square(&self, s: SquareId) -> Result<()> {
        if s.row < self.rows && s.col < self.cols {
            Ok(())
        } else {
            Err(Error::Lookup(format!(
                "square {s} outside {}x{} grid",
                self.rows, self.cols
            )))
        }
    }

    /// Edges of the grid in both orientations.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for r in 0..=self.rows {
            for c in 0..self.cols {
                for inverse in [false, true] {
                    out.push(Edge {
                        dir: EdgeDir::Horizontal,
                        row: r,
                        col: c,
                        inverse,
                    });
                }
            }
        }
        for r in 0..self.rows {
            for c in 0..=self.cols {
                for inverse in [false, true] {
                    out.push(Edge {
                        dir: EdgeDir::Vertical,
                        row: r,
                        col: c,
                        inverse,
                    });
                }
            }
        }
        out
    }

    pub fn edge_ends(&self, e: Edge) -> (ObjectId, ObjectId) {
        let from = self.vertex(e.row, e.col);
        let to = match e.dir {
            EdgeDir::Horizontal => self.vertex(e.row, e.col + 1),
            EdgeDir::Vertical => self.vertex(e.row + 1, e.col),
        };
        if e.inverse {
            (to, from)
        } else {
            (from, to)
        }
    }

    /// Corners of a square in section-matrix order `[A, B, A', B']`: top-left,
    /// bottom-left, top-right, bottom-right.
    pub fn square_vertices(&self, s: SquareId) -> [ObjectId; 4] {
        [
            self.vertex(s.row, s.col),
            self.vertex(s.row + 1, s.col),
            self.vertex(s.row, s.col + 1),
            self.vertex(s.row + 1, s.col + 1),
        ]
    }

    /// Boundary of a square: `(d, r, m, n)` = top, bottom, left, right.
    pub fn square_edges(&self, s: SquareId) -> [Edge; 4] {
        let h = |row, col| Edge {
            dir: EdgeDir::Horizontal,
            row,
            col,
            inverse: false,
        };
        let v = |row, col| Edge {
            dir: EdgeDir::Vertical,
            row,
            col,
            inverse: false,
        };
        [
            h(s.row, s.col),
            h(s.row + 1, s.col),
            v(s.row, s.col),
            v(s.row, s.col + 1),
        ]
    }

    pub fn composable(&self, s1: SquareId, s2: SquareId) -> Result<Composability> {
        self.check_square(s1)?;
        self.check_square(s2)?;
        Ok(if s1.row == s2.row && s2.col == s1.col + 1 {
            Composability::Horizontal
        } else if s1.col == s2.col && s2.row == s1.row + 1 {
            Composability::Vertical
        } else {
            Composability::None
        })
    }

    /// Whether the four squares form a 2x2 block in reading order.
    pub fn is_block(&self, s: [SquareId; 4]) -> bool {
        s.iter().all(|&q| self.check_square(q).is_ok())
            && s[1] == SquareId::new(s[0].row, s[0].col + 1)
            && s[2] == SquareId::new(s[0].row + 1, s[0].col)
            && s[3] == SquareId::new(s[0].row + 1, s[0].col + 1)
    }
}
