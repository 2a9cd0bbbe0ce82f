//! Fell bundles over discrete principal groupoids.
//!
//! The fiber over an arrow `g: A -> B` is the full space of `n_B x n_A`
//! complex matrices, where `n_A` is the dimension attached to object `A`.
//! Products are written in diagram order (`e1 e2` lives over `g1 g2`); on raw
//! matrices that is `e2 . e1`, which [`FellBundle::fiber_mul`] takes care of.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use crate::cxmat::{self, op_norm, Cx, Mat};
use crate::error::{Error, Result};
use crate::exec::{gaussian_cx, gaussian_mat, sample_rng, Exec};
use crate::groupoid::{ArrowId, Groupoid, ObjectId};
use crate::report::Report;

#[derive(Debug, Clone, PartialEq)]
pub struct FellBundle {
    base: Groupoid,
    dims: Vec<usize>,
    zero_fibers: BTreeSet<ArrowId>,
    negated_over: Option<ArrowId>,
}

/// A vector in the fiber over `arrow`.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub arrow: ArrowId,
    pub value: Mat,
}

impl FellBundle {
    pub fn new(base: Groupoid, dims: Vec<usize>) -> Result<Self> {
        if dims.len() != base.object_count() {
            return Err(Error::Domain(format!(
                "{} object dimensions given for {} objects",
                dims.len(),
                base.object_count()
            )));
        }
        if let Some(a) = dims.iter().position(|&n| n == 0) {
            return Err(Error::Domain(format!("object {a} has dimension 0")));
        }
        Ok(FellBundle {
            base,
            dims,
            zero_fibers: BTreeSet::new(),
            negated_over: None,
        })
    }

    /// Full matrix fibers over the pair groupoid on `dims.len()` objects.
    pub fn pair(dims: &[usize]) -> Result<Self> {
        FellBundle::new(Groupoid::pair(dims.len())?, dims.to_vec())
    }

    /// Line bundle over Pair(n).
    pub fn line(n: usize) -> Result<Self> {
        FellBundle::pair(&vec![1; n])
    }

    /// Replaces the fiber over `g` by the zero space.
    pub fn with_zero_fiber(mut self, g: ArrowId) -> Result<Self> {
        self.base.arrow(g)?;
        self.zero_fibers.insert(g);
        Ok(self)
    }

    /// Negative-control hook: negates every product that lands over `g`.
    /// This breaks `(e1 e2)* = e2* e1*` whenever `g` is not self-inverse.
    pub fn with_negated_products_over(mut self, g: ArrowId) -> Result<Self> {
        self.base.arrow(g)?;
        self.negated_over = Some(g);
        Ok(self)
    }

    pub fn base(&self) -> &Groupoid {
        &self.base
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn offset(&self, a: ObjectId) -> usize {
        self.dims[..a].iter().sum()
    }

    pub fn is_zero_fiber(&self, g: ArrowId) -> bool {
        self.zero_fibers.contains(&g)
    }

    /// Shape of matrices in the fiber over `g: A -> B`, i.e. `(n_B, n_A)`.
    pub fn fiber_shape(&self, g: ArrowId) -> (usize, usize) {
        (self.dims[self.base.dst(g)], self.dims[self.base.src(g)])
    }

    pub fn fiber_dim(&self, g: ArrowId) -> usize {
        if self.is_zero_fiber(g) {
            0
        } else {
            let (r, c) = self.fiber_shape(g);
            r * c
        }
    }

    /// Matrix-unit basis of the fiber over `g` (empty for a zero fiber).
    pub fn fiber_basis(&self, g: ArrowId) -> Vec<Mat> {
        if self.is_zero_fiber(g) {
            return Vec::new();
        }
        let (r, c) = self.fiber_shape(g);
        Mat::unit_basis(r, c)
    }

    pub fn element(&self, g: ArrowId, value: Mat) -> Result<Element> {
        self.base.arrow(g)?;
        let shape = self.fiber_shape(g);
        if value.shape() != shape {
            return Err(Error::Dimension {
                op: "fiber element",
                left: shape,
                right: value.shape(),
            });
        }
        if self.is_zero_fiber(g) && !value.is_zero() {
            return Err(Error::Domain(format!(
                "fiber over {} is zero",
                self.base.label(g)
            )));
        }
        Ok(Element { arrow: g, value })
    }

    pub fn zero_element(&self, g: ArrowId) -> Element {
        let (r, c) = self.fiber_shape(g);
        Element {
            arrow: g,
            value: Mat::zeros(r, c),
        }
    }

    pub fn unit_element(&self, a: ObjectId) -> Element {
        Element {
            arrow: self.base.unit(a),
            value: Mat::identity(self.dims[a]),
        }
    }

    pub fn random_element(&self, rng: &mut impl Rng, g: ArrowId) -> Element {
        if self.is_zero_fiber(g) {
            return self.zero_element(g);
        }
        let (r, c) = self.fiber_shape(g);
        Element {
            arrow: g,
            value: gaussian_mat(rng, r, c),
        }
    }

    /// `e1 e2`, living over `g1 g2`.
    pub fn fiber_mul(&self, e1: &Element, e2: &Element) -> Result<Element> {
        let g = self.base.compose(e1.arrow, e2.arrow)?;
        if self.is_zero_fiber(g) {
            return Ok(self.zero_element(g));
        }
        let mut value = e2.value.try_mul(&e1.value)?;
        if self.negated_over == Some(g) {
            value = -&value;
        }
        Ok(Element { arrow: g, value })
    }

    pub fn involution(&self, e: &Element) -> Element {
        Element {
            arrow: self.base.inverse(e.arrow),
            value: e.value.adjoint(),
        }
    }

    pub fn norm(&self, e: &Element) -> f64 {
        op_norm(&e.value)
    }

    fn random_arrow_from(&self, rng: &mut impl Rng, src: Option<ObjectId>) -> ArrowId {
        let candidates: Vec<ArrowId> = self
            .base
            .arrows()
            .filter(|(_, a)| src.is_none_or(|s| a.src == s))
            .map(|(k, _)| k)
            .collect();
        candidates[rng.random_range(0..candidates.len())]
    }
}

/// A section: one matrix per arrow of the base.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    entries: Vec<Mat>,
}

impl Section {
    pub fn zero(b: &FellBundle) -> Self {
        Section {
            entries: (0..b.base.arrow_count())
                .map(|g| b.zero_element(g).value)
                .collect(),
        }
    }

    pub fn from_entries(b: &FellBundle, entries: BTreeMap<ArrowId, Mat>) -> Result<Self> {
        let mut s = Section::zero(b);
        for (g, m) in entries {
            s.entries[g] = b.element(g, m)?.value;
        }
        Ok(s)
    }

    pub fn random(b: &FellBundle, rng: &mut impl Rng) -> Self {
        Section {
            entries: (0..b.base.arrow_count())
                .map(|g| b.random_element(rng, g).value)
                .collect(),
        }
    }

    pub fn get(&self, g: ArrowId) -> &Mat {
        &self.entries[g]
    }

    pub fn element(&self, g: ArrowId) -> Element {
        Element {
            arrow: g,
            value: self.entries[g].clone(),
        }
    }

    /// Convolution product in matrix order:
    /// `(s1 * s2)(A -> C) = sum_B s1(B -> C) o s2(A -> B)`.
    pub fn mul(&self, rhs: &Section, b: &FellBundle) -> Result<Section> {
        let mut out = Section::zero(b);
        for (h, k) in b.base.composable_pairs() {
            let prod = b.fiber_mul(&rhs.element(h), &self.element(k))?;
            out.entries[prod.arrow] = out.entries[prod.arrow].try_add(&prod.value)?;
        }
        Ok(out)
    }

    pub fn adjoint(&self, b: &FellBundle) -> Section {
        Section {
            entries: (0..self.entries.len())
                .map(|g| self.entries[b.base.inverse(g)].adjoint())
                .collect(),
        }
    }

    pub fn scale(&self, z: Cx) -> Section {
        Section {
            entries: self.entries.iter().map(|m| m.scale(z)).collect(),
        }
    }
}

/// Assembles the linking matrix: block `(B, A)` holds the entry over `A -> B`.
pub fn linking(b: &FellBundle, s: &Section) -> Mat {
    let n = b.total_dim();
    let mut out = Mat::zeros(n, n);
    for (g, a) in b.base.arrows() {
        out.set_block(b.offset(a.dst), b.offset(a.src), s.get(g));
    }
    out
}

/// Inverse of [`linking`] on block-compatible matrices.
pub fn unlink(b: &FellBundle, m: &Mat) -> Result<Section> {
    let n = b.total_dim();
    if m.shape() != (n, n) {
        return Err(Error::Dimension {
            op: "unlink",
            left: (n, n),
            right: m.shape(),
        });
    }
    let entries = b
        .base
        .arrows()
        .map(|(g, a)| {
            let (r, c) = b.fiber_shape(g);
            (g, m.block(b.offset(a.dst), b.offset(a.src), r, c))
        })
        .collect();
    Section::from_entries(b, entries)
}

pub(crate) fn rel(a: &Mat, b: &Mat) -> f64 {
    a.max_abs_diff(b) / (1.0 + a.max_abs().max(b.max_abs()))
}

pub const FELL_AXIOMS: [&str; 10] = [
    "fell.1 projection is multiplicative",
    "fell.2 bilinearity",
    "fell.3 associativity",
    "fell.4 norm submultiplicativity",
    "fell.5 involution covers inverse",
    "fell.6 involution conjugate linear",
    "fell.7 involution is involutive",
    "fell.8 involution reverses products",
    "fell.9 C*-identity",
    "fell.10 positivity of e*e",
];

pub(crate) type Sample<const N: usize> = ([f64; N], String);

fn fell_sample(b: &FellBundle, seed: u64, k: usize) -> Result<Sample<10>> {
    let mut rng = sample_rng(seed, k);
    let g1 = b.random_arrow_from(&mut rng, None);
    let g2 = b.random_arrow_from(&mut rng, Some(b.base.dst(g1)));
    let g3 = b.random_arrow_from(&mut rng, Some(b.base.dst(g2)));
    let e1 = b.random_element(&mut rng, g1);
    let e2 = b.random_element(&mut rng, g2);
    let e3 = b.random_element(&mut rng, g3);
    let x = b.random_element(&mut rng, g1);
    let y = b.random_element(&mut rng, g2);
    let (lam, mu) = (gaussian_cx(&mut rng), gaussian_cx(&mut rng));
    let witness = format!(
        "arrows ({}, {}, {})",
        b.base.label(g1),
        b.base.label(g2),
        b.base.label(g3)
    );

    let mut r = [0.0; 10];
    let e12 = b.fiber_mul(&e1, &e2)?;
    let g12 = b.base.compose(g1, g2)?;
    r[0] = if e12.arrow == g12 && e12.value.shape() == b.fiber_shape(g12) {
        0.0
    } else {
        1.0
    };

    let comb = |u: &Element, v: &Element| Element {
        arrow: u.arrow,
        value: &u.value.scale(lam) + &v.value.scale(mu),
    };
    let left = b.fiber_mul(&comb(&x, &e1), &e2)?.value;
    let left_exp = &b.fiber_mul(&x, &e2)?.value.scale(lam) + &e12.value.scale(mu);
    let right = b.fiber_mul(&e1, &comb(&y, &e2))?.value;
    let right_exp = &b.fiber_mul(&e1, &y)?.value.scale(lam) + &e12.value.scale(mu);
    r[1] = rel(&left, &left_exp).max(rel(&right, &right_exp));

    let lhs = b.fiber_mul(&e12, &e3)?.value;
    let rhs = b.fiber_mul(&e1, &b.fiber_mul(&e2, &e3)?)?.value;
    r[2] = rel(&lhs, &rhs);

    let (n1, n2) = (b.norm(&e1), b.norm(&e2));
    r[3] = (b.norm(&e12) - n1 * n2).max(0.0) / (1.0 + n1 * n2);

    let s1 = b.involution(&e1);
    let inv = b.base.inverse(g1);
    r[4] = if s1.arrow == inv && s1.value.shape() == b.fiber_shape(inv) {
        0.0
    } else {
        1.0
    };

    let c = b.involution(&comb(&x, &e1)).value;
    let c_exp = &b.involution(&x).value.scale(lam.conj()) + &s1.value.scale(mu.conj());
    r[5] = rel(&c, &c_exp);

    r[6] = rel(&b.involution(&s1).value, &e1.value);

    let lhs = b.involution(&e12).value;
    let rhs = b.fiber_mul(&b.involution(&e2), &s1)?.value;
    r[7] = rel(&lhs, &rhs);

    let ee = b.fiber_mul(&s1, &e1)?;
    let nee = b.norm(&ee);
    r[8] = (nee - n1 * n1).abs() / (1.0 + n1 * n1);

    let herm = ee.value.max_abs_diff(&ee.value.adjoint());
    let min = *cxmat::eigh(&ee.value)?.values.last().expect("non-empty");
    r[9] = ((-min).max(0.0) + herm) / (1.0 + nee);

    Ok((r, witness))
}

pub(crate) fn collect_reports<const N: usize>(
    names: &[&str; N],
    samples: Vec<Result<Sample<N>>>,
    tol: f64,
    seed: u64,
) -> Vec<Report> {
    let mut columns: Vec<Vec<(f64, Option<String>)>> = vec![Vec::new(); N];
    for s in samples {
        match s {
            Ok((r, w)) => {
                for (k, col) in columns.iter_mut().enumerate() {
                    let witness = (!(r[k] <= tol)).then(|| w.clone());
                    col.push((r[k], witness));
                }
            }
            Err(e) => {
                for col in columns.iter_mut() {
                    col.push((f64::INFINITY, Some(e.to_string())));
                }
            }
        }
    }
    names
        .iter()
        .zip(columns)
        .map(|(name, col)| Report::from_samples(*name, col, tol, Some(seed)))
        .collect()
}

/// Samples the ten Fell bundle axioms with seeded Gaussian elements.
pub fn check_fell_axioms(
    b: &FellBundle,
    samples: usize,
    tol: f64,
    seed: u64,
    exec: Exec,
) -> Vec<Report> {
    let results = exec.map(samples.max(1), |k| fell_sample(b, seed, k));
    collect_reports(&FELL_AXIOMS, results, tol, seed)
}

pub const CSTAR_CONDITIONS: [&str; 6] = [
    "cstar.1 homsets are vector spaces, composition bilinear",
    "cstar.2 adjoint-preserving endofunctor",
    "cstar.3 m*m positive and faithful",
    "cstar.4 norm submultiplicativity",
    "cstar.5 homsets complete",
    "cstar.6 C*-identity",
];

fn cstar_sample(b: &FellBundle, seed: u64, k: usize) -> Result<Sample<5>> {
    let mut rng = sample_rng(seed, k);
    let mut r = [0.0f64; 5];
    let mut worst = String::new();
    let mut worst_val = 0.0;
    for (g, arrow) in b.base.arrows() {
        let m = b.random_element(&mut rng, g);
        let m2 = b.random_element(&mut rng, g);
        let h = b.random_arrow_from(&mut rng, Some(arrow.dst));
        let p = b.random_element(&mut rng, h);
        let (lam, mu) = (gaussian_cx(&mut rng), gaussian_cx(&mut rng));

        // 1: closure of (A,B) and bilinearity of composition.
        let combo = &m.value.scale(lam) + &m2.value.scale(mu);
        let combo = b.element(g, combo)?;
        let lhs = b.fiber_mul(&combo, &p)?.value;
        let rhs = &b.fiber_mul(&m, &p)?.value.scale(lam) + &b.fiber_mul(&m2, &p)?.value.scale(mu);
        let c1 = rel(&lhs, &rhs);

        // 2: adjoint functor: (mp)* = p* m*, m** = m, id* = id.
        let mp = b.fiber_mul(&m, &p)?;
        let c2 = rel(
            &b.involution(&mp).value,
            &b.fiber_mul(&b.involution(&p), &b.involution(&m))?.value,
        )
        .max(rel(&b.involution(&b.involution(&m)).value, &m.value))
        .max({
            let id = b.unit_element(arrow.src);
            rel(&b.involution(&id).value, &id.value)
        });

        // 3: m*m in (A,A) is positive, and m*m = 0 forces m = 0.
        let mm = b.fiber_mul(&m, &b.involution(&m))?;
        let nmm = op_norm(&mm.value);
        let nm = b.norm(&m);
        let min = *cxmat::eigh(&mm.value)?.values.last().expect("non-empty");
        let lands_in_endo = if b.base.is_unit(mm.arrow) && b.base.src(mm.arrow) == arrow.src {
            0.0
        } else {
            1.0
        };
        let faithful = (nm * nm - nmm).max(0.0) / (1.0 + nm * nm);
        let c3 = ((-min).max(0.0) / (1.0 + nmm)).max(faithful).max(lands_in_endo);

        // 4: submultiplicativity.
        let np = b.norm(&p);
        let c4 = (b.norm(&mp) - nm * np).max(0.0) / (1.0 + nm * np);

        // 6: C*-identity.
        let c6 = (nmm - nm * nm).abs() / (1.0 + nm * nm);

        for (slot, v) in [c1, c2, c3, c4, c6].into_iter().enumerate() {
            r[slot] = r[slot].max(v);
            if v > worst_val {
                worst_val = v;
                worst = format!("homset {}, composed with {}", b.base.label(g), b.base.label(h));
            }
        }
    }
    Ok((r, worst))
}

/// Checks the six C*-category conditions homset by homset.
pub fn check_cstar_category(
    b: &FellBundle,
    samples: usize,
    tol: f64,
    seed: u64,
    exec: Exec,
) -> Vec<Report> {
    if let Some(&u) = b.base.units().iter().find(|&&u| b.is_zero_fiber(u)) {
        return CSTAR_CONDITIONS
            .iter()
            .map(|name| {
                Report::fail(
                    *name,
                    f64::INFINITY,
                    Some(seed),
                    format!("unit fiber over {} is zero, not unital", b.base.label(u)),
                )
            })
            .collect();
    }
    let results = exec.map(samples.max(1), |k| cstar_sample(b, seed, k));
    let names = [
        CSTAR_CONDITIONS[0],
        CSTAR_CONDITIONS[1],
        CSTAR_CONDITIONS[2],
        CSTAR_CONDITIONS[3],
        CSTAR_CONDITIONS[5],
    ];
    let mut reports = collect_reports(&names, results, tol, seed);
    // Finite-dimensional normed spaces are complete.
    reports.insert(4, Report::pass(CSTAR_CONDITIONS[4], 0.0, Some(seed)));
    reports
}

/// Dimension of span{x y : x in E_g1, y in E_g2} inside E_{g1 g2}.
pub fn product_span_rank(b: &FellBundle, g1: ArrowId, g2: ArrowId, tol: f64) -> Result<usize> {
    let g = b.base.compose(g1, g2)?;
    let mut rows = Vec::new();
    for x in b.fiber_basis(g1) {
        for y in b.fiber_basis(g2) {
            let p = b.fiber_mul(&Element { arrow: g1, value: x.clone() }, &Element { arrow: g2, value: y })?;
            rows.push(p.value.vec());
        }
    }
    if rows.is_empty() {
        return Ok(0);
    }
    let (r, c) = b.fiber_shape(g);
    let span = Mat::from_rows(rows)?;
    debug_assert_eq!(span.cols(), r * c);
    Ok(cxmat::rank(&span, tol))
}

/// Whether every product of fibers spans the fiber over the composite.
pub fn is_saturated(b: &FellBundle, tol: f64) -> Result<bool> {
    for (g1, g2) in b.base.composable_pairs() {
        let g = b.base.compose(g1, g2)?;
        if product_span_rank(b, g1, g2, tol)? != b.fiber_dim(g) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Bookkeeping guard for the bundle projection: products sit over composed
/// arrows, units over units, adjoints over inverses, with matching shapes.
pub fn check_projection_functor(b: &FellBundle, samples: usize, seed: u64, exec: Exec) -> Report {
    let results = exec.map(samples.max(1), |k| -> (f64, Option<String>) {
        let mut rng = sample_rng(seed, k);
        let g1 = b.random_arrow_from(&mut rng, None);
        let g2 = b.random_arrow_from(&mut rng, Some(b.base.dst(g1)));
        let e1 = b.random_element(&mut rng, g1);
        let e2 = b.random_element(&mut rng, g2);
        let mut bad = Vec::new();
        match (b.fiber_mul(&e1, &e2), b.base.compose(g1, g2)) {
            (Ok(p), Ok(g)) => {
                let (dst, src) = (b.dims[b.base.dst(g2)], b.dims[b.base.src(g1)]);
                if p.arrow != g || p.value.shape() != (dst, src) {
                    bad.push("product not over composite");
                }
            }
            _ => bad.push("composable pair rejected"),
        }
        let a = b.base.src(g1);
        let unit = b.unit_element(a);
        if !b.base.is_unit(unit.arrow) {
            bad.push("identity not over unit");
        }
        match b.fiber_mul(&unit, &e1) {
            Ok(p) if p.value.max_abs_diff(&e1.value) == 0.0 => {}
            _ if b.is_zero_fiber(g1) => {}
            _ => bad.push("left unit law"),
        }
        let s = b.involution(&e1);
        if s.arrow != b.base.inverse(g1) || s.value.shape() != b.fiber_shape(s.arrow) {
            bad.push("adjoint not over inverse");
        }
        if bad.is_empty() {
            (0.0, None)
        } else {
            (
                1.0,
                Some(format!(
                    "{} at ({}, {})",
                    bad.join(", "),
                    b.base.label(g1),
                    b.base.label(g2)
                )),
            )
        }
    });
    Report::from_samples("functor.p strict double *-functor bookkeeping", results, 0.0, Some(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cxmat::ONE;
    use crate::report::Status;

    #[test]
    fn unit_fiber_product_is_matrix_product() {
        let b = FellBundle::pair(&[2, 2]).unwrap();
        let mut rng = sample_rng(1, 0);
        let u = b.base().unit(0);
        let x = b.random_element(&mut rng, u);
        let y = b.random_element(&mut rng, u);
        let p = b.fiber_mul(&x, &y).unwrap();
        assert_eq!(p.arrow, u);
        assert_eq!(p.value, &y.value * &x.value);
    }

    #[test]
    fn unit_law() {
        let b = FellBundle::pair(&[2, 3]).unwrap();
        let mut rng = sample_rng(2, 0);
        let g = b.base().between(0, 1).unwrap();
        let e = b.random_element(&mut rng, g);
        let p = b.fiber_mul(&e, &b.unit_element(1)).unwrap();
        assert_eq!(p, e);
    }

    #[test]
    fn non_composable_rejected() {
        let b = FellBundle::pair(&[1, 1]).unwrap();
        let g = b.base().between(0, 1).unwrap();
        let e = b.zero_element(g);
        assert!(matches!(b.fiber_mul(&e, &e), Err(Error::Composition { .. })));
    }

    #[test]
    fn line_bundle_pair_two_sections_multiply_as_matrices() {
        let b = FellBundle::line(2).unwrap();
        let mut rng = sample_rng(3, 0);
        let s1 = Section::random(&b, &mut rng);
        let s2 = Section::random(&b, &mut rng);
        let l1 = linking(&b, &s1);
        let l2 = linking(&b, &s2);
        // Hand-expanded 2x2 product.
        let mut oracle = Mat::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                oracle[(i, j)] = l1[(i, 0)] * l2[(0, j)] + l1[(i, 1)] * l2[(1, j)];
            }
        }
        assert!(linking(&b, &s1.mul(&s2, &b).unwrap()).max_abs_diff(&oracle) < 1e-12);
    }

    #[test]
    fn linking_pair_two_m2_is_m4() {
        let b = FellBundle::pair(&[2, 2]).unwrap();
        let s = Section::random(&b, &mut sample_rng(4, 0));
        let l = linking(&b, &s);
        assert_eq!(l.shape(), (4, 4));
        assert_eq!(unlink(&b, &l).unwrap(), s);
    }

    #[test]
    fn unit_only_section_is_block_diagonal() {
        let b = FellBundle::pair(&[2, 1]).unwrap();
        let mut entries = BTreeMap::new();
        entries.insert(b.base().unit(0), Mat::identity(2));
        entries.insert(b.base().unit(1), Mat::scalar(ONE));
        let l = linking(&b, &Section::from_entries(&b, entries).unwrap());
        assert_eq!(l, Mat::identity(3));
    }

    #[test]
    fn linking_is_multiplicative_pair_three() {
        let b = FellBundle::line(3).unwrap();
        for k in 0..20 {
            let mut rng = sample_rng(5, k);
            let s1 = Section::random(&b, &mut rng);
            let s2 = Section::random(&b, &mut rng);
            let lhs = linking(&b, &s1.mul(&s2, &b).unwrap());
            let rhs = &linking(&b, &s1) * &linking(&b, &s2);
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
            assert_eq!(linking(&b, &s1.adjoint(&b)), linking(&b, &s1).adjoint());
        }
    }

    #[test]
    fn element_shape_checked() {
        let b = FellBundle::pair(&[2, 3]).unwrap();
        let g = b.base().between(0, 1).unwrap();
        assert!(b.element(g, Mat::zeros(3, 2)).is_ok());
        assert!(matches!(b.element(g, Mat::zeros(2, 3)), Err(Error::Dimension { .. })));
    }

    #[test]
    fn fell_axioms_pass_pair_two() {
        let b = FellBundle::pair(&[2, 2]).unwrap();
        let reports = check_fell_axioms(&b, 100, 1e-10, 42, Exec::Parallel);
        assert_eq!(reports.len(), 10);
        for r in &reports {
            assert_eq!(r.status, Status::Pass, "{r:?}");
            assert!(r.residual <= 1e-10);
        }
    }

    #[test]
    fn fell_axioms_line_pair_one() {
        let b = FellBundle::line(1).unwrap();
        let reports = check_fell_axioms(&b, 50, 1e-12, 1, Exec::Sequential);
        assert!(reports.iter().all(|r| r.status == Status::Pass));
    }

    #[test]
    fn corrupted_product_fails_axiom_eight() {
        let b = FellBundle::pair(&[2, 2]).unwrap();
        let g = b.base().between(0, 1).unwrap();
        let b = b.with_negated_products_over(g).unwrap();
        let reports = check_fell_axioms(&b, 100, 1e-9, 42, Exec::Sequential);
        let eight = &reports[7];
        assert_eq!(eight.status, Status::Fail);
        assert!(eight.witness.as_deref().unwrap().contains("arrows"));
    }

    #[test]
    fn cstar_category_pair_two() {
        let b = FellBundle::pair(&[2, 2]).unwrap();
        let reports = check_cstar_category(&b, 50, 1e-9, 42, Exec::Parallel);
        assert_eq!(reports.len(), 6);
        assert!(reports.iter().all(|r| r.status == Status::Pass), "{reports:?}");
    }

    #[test]
    fn zero_norm_means_zero() {
        let m = Mat::zeros(2, 3);
        assert_eq!(op_norm(&m), 0.0);
        assert!(m.is_zero());
    }

    #[test]
    fn saturation_cases() {
        for n in 1..=4 {
            assert!(is_saturated(&FellBundle::line(n).unwrap(), 1e-9).unwrap());
            assert!(is_saturated(&FellBundle::pair(&vec![2; n]).unwrap(), 1e-9).unwrap());
        }
        let b = FellBundle::pair(&[2, 2]).unwrap();
        let g = b.base().between(0, 1).unwrap();
        let mutant = b.with_zero_fiber(g).unwrap();
        assert!(!is_saturated(&mutant, 1e-9).unwrap());
    }

    #[test]
    fn morita_fullness_rank() {
        let b = FellBundle::pair(&[2, 3]).unwrap();
        let g = b.base().between(0, 1).unwrap();
        // E_g E_{g^-1} lands over the unit at the source, M_{n_src}.
        let rank = product_span_rank(&b, g, b.base().inverse(g), 1e-9).unwrap();
        assert_eq!(rank, 4);
        let rank = product_span_rank(&b, b.base().inverse(g), g, 1e-9).unwrap();
        assert_eq!(rank, 9);
    }

    #[test]
    fn projection_functor_guard() {
        let b = FellBundle::pair(&[1, 2, 3]).unwrap();
        let r = check_projection_functor(&b, 50, 9, Exec::Parallel);
        assert_eq!(r.status, Status::Pass);
        let g = b.base().between(0, 2).unwrap();
        let e = b.zero_element(g);
        assert_eq!(b.involution(&e).value.shape(), (1, 3));
    }
}
