//! Double Fell bundles over rectangular grid double groupoids.
//!
//! A section over one square is a 4x4 block matrix in the vertex frame
//! `(A, B, A', B')`:
//!
//! ```text
//!   a      m*     d*     alpha*
//!   m      b      alpha'* r*
//!   d      alpha' a'     n*
//!   alpha  r      n      b'
//! ```
//!
//! All sixteen blocks are independent data. Block `(i, j)` has shape
//! `n_{v_i} x n_{v_j}` and describes a map from vertex `v_j` to vertex `v_i`.

mod axioms;
mod compose;
mod example1;

pub use axioms::{check_double_star_axioms, DOUBLE_STAR_CONDITIONS};
pub use compose::{compose4, hcompose, union, vcompose, CompositionMode, Order, UnionDir};
pub use example1::{build_example1, Example1};

use rand::Rng;

use crate::cxmat::{op_norm, Mat};
use crate::error::{Error, Result};
use crate::exec::gaussian_mat;
use crate::fell::{FellBundle, Section};
use crate::groupoid::{DoubleGroupoid, Footprint, ObjectId, SquareId};

/// Named positions of the one-square section matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    A,
    B,
    APrime,
    BPrime,
    M,
    MStar,
    N,
    NStar,
    D,
    DStar,
    R,
    RStar,
    Alpha,
    AlphaStar,
    AlphaPrime,
    AlphaPrimeStar,
}

impl Slot {
    pub const ALL: [Slot; 16] = [
        Slot::A,
        Slot::B,
        Slot::APrime,
        Slot::BPrime,
        Slot::M,
        Slot::MStar,
        Slot::N,
        Slot::NStar,
        Slot::D,
        Slot::DStar,
        Slot::R,
        Slot::RStar,
        Slot::Alpha,
        Slot::AlphaStar,
        Slot::AlphaPrime,
        Slot::AlphaPrimeStar,
    ];

    /// (row, col) in the 4x4 block frame.
    pub fn position(self) -> (usize, usize) {
        match self {
            Slot::A => (0, 0),
            Slot::B => (1, 1),
            Slot::APrime => (2, 2),
            Slot::BPrime => (3, 3),
            Slot::M => (1, 0),
            Slot::MStar => (0, 1),
            Slot::N => (3, 2),
            Slot::NStar => (2, 3),
            Slot::D => (2, 0),
            Slot::DStar => (0, 2),
            Slot::R => (3, 1),
            Slot::RStar => (1, 3),
            Slot::Alpha => (3, 0),
            Slot::AlphaStar => (0, 3),
            Slot::AlphaPrime => (2, 1),
            Slot::AlphaPrimeStar => (1, 2),
        }
    }

    pub fn at(row: usize, col: usize) -> Slot {
        *Slot::ALL
            .iter()
            .find(|s| s.position() == (row, col))
            .expect("4x4 position")
    }
}

/// Block matrix over an ordered list of vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPayload {
    vertices: Vec<ObjectId>,
    blocks: Vec<Vec<Mat>>,
}

impl BlockPayload {
    pub fn new(vertices: Vec<ObjectId>, blocks: Vec<Vec<Mat>>) -> Result<Self> {
        let k = vertices.len();
        if blocks.len() != k || blocks.iter().any(|row| row.len() != k) {
            return Err(Error::Dimension {
                op: "block payload",
                left: (k, k),
                right: (blocks.len(), blocks.first().map_or(0, Vec::len)),
            });
        }
        for i in 0..k {
            for j in 0..k {
                let (ri, cj) = (blocks[i][i].rows(), blocks[j][j].cols());
                if blocks[i][j].shape() != (ri, cj) {
                    return Err(Error::Dimension {
                        op: "block payload",
                        left: (ri, cj),
                        right: blocks[i][j].shape(),
                    });
                }
            }
        }
        Ok(BlockPayload { vertices, blocks })
    }

    pub fn vertices(&self) -> &[ObjectId] {
        &self.vertices
    }

    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    pub fn block(&self, i: usize, j: usize) -> &Mat {
        &self.blocks[i][j]
    }

    pub fn blocks(&self) -> &[Vec<Mat>] {
        &self.blocks
    }

    pub fn block_dims(&self) -> Vec<usize> {
        (0..self.size()).map(|i| self.blocks[i][i].rows()).collect()
    }

    pub fn assemble(&self) -> Mat {
        let dims = self.block_dims();
        let offsets: Vec<usize> = dims
            .iter()
            .scan(0, |acc, &d| {
                let o = *acc;
                *acc += d;
                Some(o)
            })
            .collect();
        let n: usize = dims.iter().sum();
        let mut out = Mat::zeros(n, n);
        for i in 0..self.size() {
            for j in 0..self.size() {
                out.set_block(offsets[i], offsets[j], &self.blocks[i][j]);
            }
        }
        out
    }

    /// Block adjoint: block `(i, j)` of the result is `block(j, i)*`.
    pub fn adjoint(&self) -> BlockPayload {
        let k = self.size();
        BlockPayload {
            vertices: self.vertices.clone(),
            blocks: (0..k)
                .map(|i| (0..k).map(|j| self.blocks[j][i].adjoint()).collect())
                .collect(),
        }
    }

    /// Block transpose: block `(i, j)` of the result is `block(j, i)^t`.
    pub fn transpose(&self) -> BlockPayload {
        let k = self.size();
        BlockPayload {
            vertices: self.vertices.clone(),
            blocks: (0..k)
                .map(|i| (0..k).map(|j| self.blocks[j][i].transpose()).collect())
                .collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &BlockPayload) -> f64 {
        if self.vertices != other.vertices {
            return f64::INFINITY;
        }
        self.blocks
            .iter()
            .flatten()
            .zip(other.blocks.iter().flatten())
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }
}

/// Section of a double Fell bundle over a single square.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareSection {
    square: SquareId,
    payload: BlockPayload,
}

impl SquareSection {
    pub fn square(&self) -> SquareId {
        self.square
    }

    pub fn payload(&self) -> &BlockPayload {
        &self.payload
    }

    pub fn get(&self, slot: Slot) -> &Mat {
        let (i, j) = slot.position();
        self.payload.block(i, j)
    }

    pub fn assemble(&self) -> Mat {
        self.payload.assemble()
    }

    pub fn adjoint(&self) -> SquareSection {
        SquareSection {
            square: self.square,
            payload: self.payload.adjoint(),
        }
    }

    pub fn transposed(&self) -> SquareSection {
        SquareSection {
            square: self.square,
            payload: self.payload.transpose(),
        }
    }

    pub fn to_graded(&self) -> GradedElement {
        GradedElement {
            grade: Grade::Square(self.square),
            footprint: Some(Footprint::square(self.square)),
            payload: Some(self.payload.clone()),
        }
    }
}

/// Double Fell bundle with full matrix fibers over a grid double groupoid;
/// vertex `v` carries dimension `dims[v]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleFellBundle {
    dg: DoubleGroupoid,
    dims: Vec<usize>,
}

impl DoubleFellBundle {
    pub fn new(dg: DoubleGroupoid, dims: Vec<usize>) -> Result<Self> {
        if dims.len() != dg.vertex_count() {
            return Err(Error::Domain(format!(
                "{} vertex dimensions given for {} vertices",
                dims.len(),
                dg.vertex_count()
            )));
        }
        if dims.contains(&0) {
            return Err(Error::Domain("vertex dimension 0".into()));
        }
        Ok(DoubleFellBundle { dg, dims })
    }

    /// Line bundle (all fibers one-dimensional).
    pub fn line(dg: DoubleGroupoid) -> Self {
        let n = dg.vertex_count();
        DoubleFellBundle { dg, dims: vec![1; n] }
    }

    pub fn uniform(dg: DoubleGroupoid, dim: usize) -> Result<Self> {
        let n = dg.vertex_count();
        DoubleFellBundle::new(dg, vec![dim; n])
    }

    pub fn groupoid(&self) -> &DoubleGroupoid {
        &self.dg
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// The Fell bundle over the folded (pair) groupoid on the vertices.
    pub fn folded_bundle(&self) -> Result<FellBundle> {
        let g = self
            .dg
            .folded()
            .ok_or_else(|| Error::Precondition("double groupoid has no folding".into()))?;
        FellBundle::new(g.clone(), self.dims.clone())
    }

    fn frame_dims(&self, s: SquareId) -> [usize; 4] {
        self.dg.square_vertices(s).map(|v| self.dims[v])
    }

    /// Builds a square section from its 4x4 blocks (row-major).
    pub fn section(&self, s: SquareId, blocks: Vec<Vec<Mat>>) -> Result<SquareSection> {
        self.dg.check_square(s)?;
        let dims = self.frame_dims(s);
        let payload = BlockPayload::new(self.dg.square_vertices(s).to_vec(), blocks)?;
        if payload.block_dims() != dims {
            return Err(Error::Dimension {
                op: "square section",
                left: (dims[0], dims[1]),
                right: (payload.block_dims()[0], payload.block_dims()[1]),
            });
        }
        Ok(SquareSection { square: s, payload })
    }

    pub fn section_from_fn(
        &self,
        s: SquareId,
        mut f: impl FnMut(Slot, (usize, usize)) -> Mat,
    ) -> Result<SquareSection> {
        let dims = self.frame_dims(s);
        let blocks = (0..4)
            .map(|i| (0..4).map(|j| f(Slot::at(i, j), (dims[i], dims[j]))).collect())
            .collect();
        self.section(s, blocks)
    }

    pub fn random_section(&self, s: SquareId, rng: &mut impl Rng) -> Result<SquareSection> {
        self.section_from_fn(s, |_, (r, c)| gaussian_mat(rng, r, c))
    }

    /// Scalar section from sixteen values in [`Slot::ALL`] order (line
    /// bundles only).
    pub fn scalar_section(&self, s: SquareId, values: &[crate::cxmat::Cx; 16]) -> Result<SquareSection> {
        self.section_from_fn(s, |slot, shape| {
            let k = Slot::ALL.iter().position(|&x| x == slot).expect("slot");
            if shape == (1, 1) {
                Mat::scalar(values[k])
            } else {
                Mat::zeros(shape.0, shape.1)
            }
        })
    }

    /// The square section as a section of the folded Fell bundle: block
    /// `(i, j)` sits over the folded arrow `v_j -> v_i`.
    pub fn to_folded_section(&self, x: &SquareSection) -> Result<(FellBundle, Section)> {
        let b = self.folded_bundle()?;
        let verts = x.payload.vertices.clone();
        let mut entries = std::collections::BTreeMap::new();
        for i in 0..4 {
            for j in 0..4 {
                let g = b.base().between(verts[j], verts[i]).expect("pair groupoid");
                entries.insert(g, x.payload.block(i, j).clone());
            }
        }
        let s = Section::from_entries(&b, entries)?;
        Ok((b, s))
    }

    pub fn from_folded_section(&self, sq: SquareId, b: &FellBundle, s: &Section) -> Result<SquareSection> {
        let verts = self.dg.square_vertices(sq);
        let blocks = (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| s.get(b.base().between(verts[j], verts[i]).expect("pair groupoid")).clone())
                    .collect()
            })
            .collect();
        self.section(sq, blocks)
    }
}

/// Which graded component of the double *-algebra an element lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Grade {
    Zero,
    Square(SquareId),
    HComposite(SquareId, SquareId),
    VComposite(SquareId, SquareId),
    Block2x2([SquareId; 4]),
    /// Composite covering a rectangle larger than 2x2.
    Region(Footprint),
    HUnion(SquareId, SquareId),
    VUnion(SquareId, SquareId),
}

impl Grade {
    fn for_footprint(f: Footprint) -> Grade {
        let sq = |dr, dc| SquareId::new(f.top + dr, f.left + dc);
        match (f.rows, f.cols) {
            (1, 1) => Grade::Square(sq(0, 0)),
            (1, 2) => Grade::HComposite(sq(0, 0), sq(0, 1)),
            (2, 1) => Grade::VComposite(sq(0, 0), sq(1, 0)),
            (2, 2) => Grade::Block2x2([sq(0, 0), sq(0, 1), sq(1, 0), sq(1, 1)]),
            _ => Grade::Region(f),
        }
    }

    pub fn is_union(&self) -> bool {
        matches!(self, Grade::HUnion(..) | Grade::VUnion(..))
    }
}

/// An element of the double *-algebra: a grade plus its block payload.
/// `Zero` carries neither footprint nor payload.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedElement {
    grade: Grade,
    footprint: Option<Footprint>,
    payload: Option<BlockPayload>,
}

impl GradedElement {
    pub fn zero() -> Self {
        GradedElement {
            grade: Grade::Zero,
            footprint: None,
            payload: None,
        }
    }

    pub fn grade(&self) -> Grade {
        self.grade
    }

    pub fn footprint(&self) -> Option<Footprint> {
        self.footprint
    }

    pub fn payload(&self) -> Option<&BlockPayload> {
        self.payload.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.grade == Grade::Zero
    }

    pub fn assemble(&self) -> Option<Mat> {
        self.payload.as_ref().map(BlockPayload::assemble)
    }

    /// Both involutions of the double *-algebra act as the block adjoint and
    /// keep the grade.
    pub fn adjoint(&self) -> GradedElement {
        GradedElement {
            grade: self.grade,
            footprint: self.footprint,
            payload: self.payload.as_ref().map(BlockPayload::adjoint),
        }
    }

    /// C*-norm of the assembled payload (zero for `Zero`).
    pub fn norm(&self) -> f64 {
        self.assemble().map_or(0.0, |m| op_norm(&m))
    }
}
