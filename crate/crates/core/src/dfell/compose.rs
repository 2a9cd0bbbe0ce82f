//! Horizontal and vertical composition, 2x2 blocks, and unions.
//!
//! Every rule is a table of block terms. Edge and vertex positions of a
//! composite are chain products along the glued boundary. The four 2-cell
//! positions (alpha, alpha*, alpha', alpha'*) combine by entrywise (Schur)
//! product, which is what makes horizontal-then-vertical and
//! vertical-then-horizontal agree for matrix-valued fibers.

use super::{BlockPayload, Grade, GradedElement, SquareSection};
use crate::cxmat::Mat;
use crate::error::{Error, Result};
use crate::groupoid::Footprint;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum CompositionMode {
    /// Glue without comparing the shared boundary data.
    #[default]
    Lenient,
    /// Reject operands whose data on the shared edge disagree beyond `tol`.
    Strict { tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    /// Horizontal composites of the top and bottom rows, then vertical.
    HThenV,
    /// Vertical composites of the left and right columns, then horizontal.
    VThenH,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnionDir {
    Horizontal,
    Vertical,
}

#[derive(Clone, Copy)]
enum Side {
    L,
    R,
}

#[derive(Clone, Copy)]
enum Term {
    Take(Side, usize, usize),
    /// Diagram-order product: first the left-hand factor, then the right.
    Chain((Side, usize, usize), (Side, usize, usize)),
    Schur((Side, usize, usize), (Side, usize, usize)),
}

use Side::{L, R};
use Term::{Chain, Schur, Take};

const fn t(s: Side, i: usize, j: usize) -> Term {
    Take(s, i, j)
}

const fn ch(a: (Side, usize, usize), b: (Side, usize, usize)) -> Term {
    Chain(a, b)
}

const fn sc(a: (Side, usize, usize), b: (Side, usize, usize)) -> Term {
    Schur(a, b)
}

// X = left operand (L), Y = right operand (R).
const HORIZONTAL: [[Term; 4]; 4] = [
    [t(L, 0, 0), t(L, 0, 1), ch((R, 0, 2), (L, 0, 2)), sc((R, 0, 3), (L, 0, 3))],
    [t(L, 1, 0), t(L, 1, 1), sc((R, 1, 2), (L, 1, 2)), ch((R, 1, 3), (L, 1, 3))],
    [ch((L, 2, 0), (R, 2, 0)), sc((L, 2, 1), (R, 2, 1)), t(R, 2, 2), t(R, 2, 3)],
    [sc((L, 3, 0), (R, 3, 0)), ch((L, 3, 1), (R, 3, 1)), t(R, 3, 2), t(R, 3, 3)],
];

// X = top operand (L), Z = bottom operand (R).
const VERTICAL: [[Term; 4]; 4] = [
    [t(L, 0, 0), ch((R, 0, 1), (L, 0, 1)), t(L, 0, 2), sc((R, 0, 3), (L, 0, 3))],
    [ch((L, 1, 0), (R, 1, 0)), t(R, 1, 1), sc((R, 1, 2), (L, 1, 2)), t(R, 1, 3)],
    [t(L, 2, 0), sc((L, 2, 1), (R, 2, 1)), t(L, 2, 2), ch((R, 2, 3), (L, 2, 3))],
    [sc((L, 3, 0), (R, 3, 0)), t(R, 3, 1), ch((L, 3, 2), (R, 3, 2)), t(R, 3, 3)],
];

// Frame (A, B, A', B', A'', B''); the right square's frame is (A', B', A'', B'').
const H_UNION: [[Term; 6]; 6] = [
    [t(L, 0, 0), t(L, 0, 1), t(L, 0, 2), t(L, 0, 3), ch((R, 0, 2), (L, 0, 2)), sc((R, 0, 3), (L, 0, 3))],
    [t(L, 1, 0), t(L, 1, 1), t(L, 1, 2), t(L, 1, 3), sc((R, 1, 2), (L, 1, 2)), ch((R, 1, 3), (L, 1, 3))],
    [t(L, 2, 0), t(L, 2, 1), t(L, 2, 2), t(L, 2, 3), t(R, 0, 2), t(R, 0, 3)],
    [t(L, 3, 0), t(L, 3, 1), t(L, 3, 2), t(L, 3, 3), t(R, 1, 2), t(R, 1, 3)],
    [ch((L, 2, 0), (R, 2, 0)), sc((L, 2, 1), (R, 2, 1)), t(R, 2, 0), t(R, 2, 1), t(R, 2, 2), t(R, 2, 3)],
    [sc((L, 3, 0), (R, 3, 0)), ch((L, 3, 1), (R, 3, 1)), t(R, 3, 0), t(R, 3, 1), t(R, 3, 2), t(R, 3, 3)],
];

// Frame (A, B, C, A', B', C'); the lower square's frame is (B, C, B', C').
const V_UNION: [[Term; 6]; 6] = [
    [t(L, 0, 0), t(L, 0, 1), ch((R, 0, 1), (L, 0, 1)), t(L, 0, 2), t(L, 0, 3), sc((R, 0, 3), (L, 0, 3))],
    [t(L, 1, 0), t(L, 1, 1), t(R, 0, 1), t(L, 1, 2), t(R, 0, 2), t(R, 0, 3)],
    [ch((L, 1, 0), (R, 1, 0)), t(R, 1, 0), t(R, 1, 1), sc((R, 1, 2), (L, 1, 2)), t(R, 1, 2), t(R, 1, 3)],
    [t(L, 2, 0), t(L, 2, 1), sc((L, 2, 1), (R, 2, 1)), t(L, 2, 2), t(L, 2, 3), ch((R, 2, 3), (L, 2, 3))],
    [t(L, 3, 0), t(R, 2, 0), t(R, 2, 1), t(L, 3, 2), t(L, 3, 3), t(R, 2, 3)],
    [sc((L, 3, 0), (R, 3, 0)), t(R, 3, 0), t(R, 3, 1), ch((L, 3, 2), (R, 3, 2)), t(R, 3, 2), t(R, 3, 3)],
];

fn eval(term: Term, x: &BlockPayload, y: &BlockPayload) -> Result<Mat> {
    let get = |(s, i, j): (Side, usize, usize)| match s {
        L => x.block(i, j),
        R => y.block(i, j),
    };
    match term {
        Take(s, i, j) => Ok(get((s, i, j)).clone()),
        Chain(first, second) => get(second).try_mul(get(first)),
        Schur(p, q) => get(p).hadamard(get(q)),
    }
}

fn apply<const K: usize>(
    table: &[[Term; K]; K],
    vertices: Vec<usize>,
    x: &BlockPayload,
    y: &BlockPayload,
) -> Result<BlockPayload> {
    let blocks = table
        .iter()
        .map(|row| row.iter().map(|&term| eval(term, x, y)).collect())
        .collect::<Result<Vec<Vec<Mat>>>>()?;
    BlockPayload::new(vertices, blocks)
}

fn check_shared(
    mode: CompositionMode,
    x: &BlockPayload,
    y: &BlockPayload,
    pairs: [((usize, usize), (usize, usize)); 4],
    what: &str,
) -> Result<()> {
    let CompositionMode::Strict { tol } = mode else {
        return Ok(());
    };
    for ((xi, xj), (yi, yj)) in pairs {
        let d = x.block(xi, xj).max_abs_diff(y.block(yi, yj));
        if !(d <= tol) {
            return Err(Error::Inconsistency {
                message: format!("{what} operands disagree on the shared edge"),
                witness: format!("block ({xi},{xj}) vs ({yi},{yj}) differ by {d:e}"),
            });
        }
    }
    Ok(())
}

fn operands<'a>(
    x: &'a GradedElement,
    y: &'a GradedElement,
) -> Option<Result<(&'a BlockPayload, Footprint, &'a BlockPayload, Footprint)>> {
    if x.is_zero() || y.is_zero() {
        return None;
    }
    if x.grade.is_union() || y.grade.is_union() {
        return Some(Err(Error::Grade(
            "unions are terminal and do not compose further".into(),
        )));
    }
    let (Some(px), Some(fx), Some(py), Some(fy)) = (&x.payload, x.footprint, &y.payload, y.footprint)
    else {
        return Some(Err(Error::Grade("non-zero element without payload".into())));
    };
    if px.size() != 4 || py.size() != 4 {
        return Some(Err(Error::Grade("composite payload must be 4x4".into())));
    }
    Some(Ok((px, fx, py, fy)))
}

impl GradedElement {
    /// Horizontal product of the double *-algebra. Non-adjacent operands
    /// multiply to `Zero`.
    pub fn h_product(&self, rhs: &GradedElement) -> Result<GradedElement> {
        match self.h_compose(rhs, CompositionMode::Lenient) {
            Err(Error::Composition { .. }) => Ok(GradedElement::zero()),
            other => other,
        }
    }

    /// Vertical product of the double *-algebra. Non-adjacent operands
    /// multiply to `Zero`.
    pub fn v_product(&self, rhs: &GradedElement) -> Result<GradedElement> {
        match self.v_compose(rhs, CompositionMode::Lenient) {
            Err(Error::Composition { .. }) => Ok(GradedElement::zero()),
            other => other,
        }
    }

    /// Horizontal composite; `rhs` must sit immediately to the right.
    pub fn h_compose(&self, rhs: &GradedElement, mode: CompositionMode) -> Result<GradedElement> {
        let Some(ops) = operands(self, rhs) else {
            return Ok(GradedElement::zero());
        };
        let (px, fx, py, fy) = ops?;
        if !fx.h_adjacent(&fy) {
            return Err(Error::Composition {
                first: format!("{fx:?}"),
                second: format!("{fy:?}"),
            });
        }
        check_shared(
            mode,
            px,
            py,
            [((2, 2), (0, 0)), ((3, 2), (1, 0)), ((2, 3), (0, 1)), ((3, 3), (1, 1))],
            "horizontal",
        )?;
        let v = px.vertices();
        let w = py.vertices();
        let payload = apply(&HORIZONTAL, vec![v[0], v[1], w[2], w[3]], px, py)?;
        let footprint = fx.h_join(&fy);
        Ok(GradedElement {
            grade: Grade::for_footprint(footprint),
            footprint: Some(footprint),
            payload: Some(payload),
        })
    }

    /// Vertical composite; `rhs` must sit immediately below.
    pub fn v_compose(&self, rhs: &GradedElement, mode: CompositionMode) -> Result<GradedElement> {
        let Some(ops) = operands(self, rhs) else {
            return Ok(GradedElement::zero());
        };
        let (px, fx, py, fy) = ops?;
        if !fx.v_adjacent(&fy) {
            return Err(Error::Composition {
                first: format!("{fx:?}"),
                second: format!("{fy:?}"),
            });
        }
        check_shared(
            mode,
            px,
            py,
            [((1, 1), (0, 0)), ((3, 1), (2, 0)), ((1, 3), (0, 2)), ((3, 3), (2, 2))],
            "vertical",
        )?;
        let v = px.vertices();
        let w = py.vertices();
        let payload = apply(&VERTICAL, vec![v[0], w[1], v[2], w[3]], px, py)?;
        let footprint = fx.v_join(&fy);
        Ok(GradedElement {
            grade: Grade::for_footprint(footprint),
            footprint: Some(footprint),
            payload: Some(payload),
        })
    }
}

pub fn hcompose(s1: &SquareSection, s2: &SquareSection, mode: CompositionMode) -> Result<GradedElement> {
    s1.to_graded().h_compose(&s2.to_graded(), mode)
}

pub fn vcompose(s1: &SquareSection, s3: &SquareSection, mode: CompositionMode) -> Result<GradedElement> {
    s1.to_graded().v_compose(&s3.to_graded(), mode)
}

/// Composite of a 2x2 block given in reading order (top-left, top-right,
/// bottom-left, bottom-right).
pub fn compose4(s: [&SquareSection; 4], order: Order, mode: CompositionMode) -> Result<GradedElement> {
    let [s1, s2, s3, s4] = s;
    match order {
        Order::HThenV => hcompose(s1, s2, mode)?.v_compose(&hcompose(s3, s4, mode)?, mode),
        Order::VThenH => vcompose(s1, s3, mode)?.h_compose(&vcompose(s2, s4, mode)?, mode),
    }
}

/// Union of two adjacent squares as a single 6x6 block element. The first
/// 4x4 corner reproduces `s1`.
pub fn union(s1: &SquareSection, s2: &SquareSection, dir: UnionDir) -> Result<GradedElement> {
    let (a, b) = (s1.square(), s2.square());
    let (fa, fb) = (Footprint::square(a), Footprint::square(b));
    let (x, y) = (s1.payload(), s2.payload());
    let (v, w) = (x.vertices(), y.vertices());
    let (grade, footprint, payload) = match dir {
        UnionDir::Horizontal if fa.h_adjacent(&fb) => (
            Grade::HUnion(a, b),
            fa.h_join(&fb),
            apply(&H_UNION, vec![v[0], v[1], v[2], v[3], w[2], w[3]], x, y)?,
        ),
        UnionDir::Vertical if fa.v_adjacent(&fb) => (
            Grade::VUnion(a, b),
            fa.v_join(&fb),
            apply(&V_UNION, vec![v[0], v[1], w[1], v[2], v[3], w[3]], x, y)?,
        ),
        _ => {
            return Err(Error::Composition {
                first: a.to_string(),
                second: b.to_string(),
            })
        }
    };
    Ok(GradedElement {
        grade,
        footprint: Some(footprint),
        payload: Some(payload),
    })
}
