//! GNS representations built from a state on a unit-fiber algebra.
//!
//! For a state `phi` on `(A, A)` every homset `(A, B)` carries the
//! semi-inner product `<x, y> = phi(x* y)`. Quotienting by its null space
//! gives the Hilbert space `H_B`, a morphism `m: B -> C` acts by left
//! composition `[x] -> [m x]`, and the class of `id_A` is the cyclic vector.
//!
//! Homset elements are handled through their coordinates in the row-major
//! matrix-unit basis, so left composition by `T` is the Kronecker product
//! `T (x) I_{n_A}`. 2-cells are linear maps between homsets, given as
//! matrices on those coordinates.

use std::collections::BTreeMap;

use rand::Rng;

use crate::cxmat::{self, gram_quotient, op_norm, rank, Cx, GramQuotient, Mat};
use crate::error::{Error, Result};
use crate::exec::{gaussian_mat, sample_rng, Exec};
use crate::fell::FellBundle;
use crate::groupoid::ObjectId;
use crate::report::Report;

const STATE_TOL: f64 = 1e-12;

/// A state `phi(a) = tr(rho a)` on the unit-fiber algebra `(A, A)`.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    object: ObjectId,
    rho: Mat,
}

impl State {
    pub fn new(b: &FellBundle, object: ObjectId, rho: Mat) -> Result<Self> {
        if object >= b.dims().len() {
            return Err(Error::Lookup(format!("object {object}")));
        }
        let n = b.dims()[object];
        if rho.shape() != (n, n) {
            return Err(Error::Domain(format!(
                "density matrix is {}x{}, object has dimension {n}",
                rho.rows(),
                rho.cols()
            )));
        }
        rho.check_finite()?;
        let herm = rho.max_abs_diff(&rho.adjoint());
        if herm > STATE_TOL {
            return Err(Error::Domain(format!("density matrix not Hermitian (residual {herm:e})")));
        }
        let min = *cxmat::eigh(&rho.hermitian_part())?.values.last().expect("non-empty");
        if min < -STATE_TOL {
            return Err(Error::Domain(format!("density matrix has eigenvalue {min:e}")));
        }
        let tr = rho.trace();
        if (tr - Cx::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::Domain(format!("density matrix has trace {tr}")));
        }
        Ok(State { object, rho })
    }

    pub fn normalized_trace(b: &FellBundle, object: ObjectId) -> Result<Self> {
        let n = *b.dims().get(object).ok_or_else(|| Error::Lookup(format!("object {object}")))?;
        State::new(b, object, Mat::identity(n).scale(Cx::new(1.0 / n as f64, 0.0)))
    }

    /// The pure state `a -> a_kk`.
    pub fn vector(b: &FellBundle, object: ObjectId, k: usize) -> Result<Self> {
        let n = *b.dims().get(object).ok_or_else(|| Error::Lookup(format!("object {object}")))?;
        if k >= n {
            return Err(Error::Domain(format!("basis index {k} out of range for dimension {n}")));
        }
        State::new(b, object, Mat::unit(n, n, k, k))
    }

    pub fn object(&self) -> ObjectId {
        self.object
    }

    pub fn rho(&self) -> &Mat {
        &self.rho
    }

    /// `tr(rho a)`; panics if `a` is not `n_A x n_A`.
    pub fn eval(&self, a: &Mat) -> Cx {
        (&self.rho * a).trace()
    }

    pub fn is_faithful(&self, tol: f64) -> bool {
        rank(&self.rho, tol) == self.rho.rows()
    }
}

/// The Hilbert space `H_B`: the homset `(A, B)` modulo the state's null
/// space, with an optional unitary change of frame on its coordinates.
#[derive(Debug, Clone)]
pub struct HomsetSpace {
    target: ObjectId,
    shape: (usize, usize),
    gram: Mat,
    quotient: GramQuotient,
    frame: Mat,
}

impl HomsetSpace {
    fn build(b: &FellBundle, state: &State, target: ObjectId, tol: f64) -> Result<Self> {
        let shape = (b.dims()[target], b.dims()[state.object]);
        let basis = Mat::unit_basis(shape.0, shape.1);
        let k = basis.len();
        let mut gram = Mat::zeros(k, k);
        for (i, bi) in basis.iter().enumerate() {
            let bi = bi.adjoint();
            for (j, bj) in basis.iter().enumerate() {
                gram[(i, j)] = state.eval(&(&bi * bj));
            }
        }
        let quotient = gram_quotient(&gram, tol)?;
        let frame = Mat::identity(quotient.dim);
        Ok(HomsetSpace {
            target,
            shape,
            gram,
            quotient,
            frame,
        })
    }

    pub fn target(&self) -> ObjectId {
        self.target
    }

    pub fn dim(&self) -> usize {
        self.quotient.dim
    }

    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    pub fn isometry(&self) -> &Mat {
        &self.quotient.isometry
    }

    /// Shape `(n_B, n_A)` of the homset's matrices.
    pub fn homset_shape(&self) -> (usize, usize) {
        self.shape
    }

    /// Coefficients (in the matrix-unit basis) to Hilbert-space coordinates.
    pub fn project(&self) -> Mat {
        &(&self.frame * &self.quotient.isometry.adjoint()) * &self.gram
    }

    /// Hilbert-space coordinates to a representative's coefficients.
    pub fn lift(&self) -> Mat {
        &self.quotient.isometry * &self.frame.adjoint()
    }

    pub fn class_of(&self, x: &Mat) -> Result<Vec<Cx>> {
        if x.shape() != self.shape {
            return Err(Error::Dimension {
                op: "homset class",
                left: self.shape,
                right: x.shape(),
            });
        }
        Ok(self.project().try_mul(&Mat::column(&x.vec()))?.col(0))
    }

    fn null_basis(&self) -> Option<&Mat> {
        self.quotient.null_basis.as_ref()
    }
}

/// GNS data anchored at one object: the state, the spaces `H_B` built so
/// far, and the cyclic vector in `H_A`.
#[derive(Debug, Clone)]
pub struct GnsRep {
    state: State,
    dims: Vec<usize>,
    spaces: BTreeMap<ObjectId, HomsetSpace>,
}

impl GnsRep {
    pub fn anchor(&self) -> ObjectId {
        self.state.object
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn space(&self, b: ObjectId) -> Result<&HomsetSpace> {
        self.spaces
            .get(&b)
            .ok_or_else(|| Error::Lookup(format!("no GNS space built for object {b}")))
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjectId> + '_ {
        self.spaces.keys().copied()
    }

    pub fn dim(&self, b: ObjectId) -> Result<usize> {
        Ok(self.space(b)?.dim())
    }

    pub fn cyclic_vector(&self) -> Vec<Cx> {
        let a = self.anchor();
        self.space(a)
            .and_then(|h| h.class_of(&Mat::identity(self.dims[a])))
            .expect("anchor space is always built")
    }

    /// `F(m)` for `m: B -> C` (an `n_C x n_B` matrix), as a map `H_B -> H_C`.
    pub fn represent(&self, src: ObjectId, dst: ObjectId, m: &Mat) -> Result<Mat> {
        let (hb, hc) = (self.space(src)?, self.space(dst)?);
        let expected = (self.dims[dst], self.dims[src]);
        if m.shape() != expected {
            return Err(Error::Dimension {
                op: "gns represent",
                left: expected,
                right: m.shape(),
            });
        }
        let left = left_composition(m, self.dims[self.anchor()]);
        Ok(&(&hc.project() * &left) * &hb.lift())
    }

    /// The same representation seen through unitaries `w[B]` on each space:
    /// `F'(m) = w[C] F(m) w[B]*` and `xi' = w[A] xi`.
    pub fn conjugated(&self, w: &BTreeMap<ObjectId, Mat>) -> Result<GnsRep> {
        let mut out = self.clone();
        for (b, space) in out.spaces.iter_mut() {
            let u = w
                .get(b)
                .ok_or_else(|| Error::Lookup(format!("no unitary given for object {b}")))?;
            if u.shape() != (space.dim(), space.dim()) {
                return Err(Error::Dimension {
                    op: "conjugated representation",
                    left: (space.dim(), space.dim()),
                    right: u.shape(),
                });
            }
            space.frame = u * &space.frame;
        }
        Ok(out)
    }
}

/// Left composition by `t` on homset coordinates anchored at an object of
/// dimension `n_anchor`.
pub fn left_composition(t: &Mat, n_anchor: usize) -> Mat {
    t.kron(&Mat::identity(n_anchor))
}

/// Builds `H_A` and the cyclic vector for `state`.
pub fn gns_object(b: &FellBundle, state: &State, tol: f64) -> Result<GnsRep> {
    let a = state.object;
    if a >= b.dims().len() || b.dims()[a] != state.rho.rows() {
        return Err(Error::Domain("state does not match the bundle".into()));
    }
    let mut spaces = BTreeMap::new();
    spaces.insert(a, HomsetSpace::build(b, state, a, tol)?);
    Ok(GnsRep {
        state: state.clone(),
        dims: b.dims().to_vec(),
        spaces,
    })
}

/// Adds `H_B`, the quotient of the homset `(A, B)`.
pub fn gns_homset(rep: &GnsRep, b: &FellBundle, target: ObjectId, tol: f64) -> Result<GnsRep> {
    if b.dims() != rep.dims.as_slice() {
        return Err(Error::Domain("homset from a different bundle".into()));
    }
    if target >= rep.dims.len() {
        return Err(Error::Lookup(format!("object {target}")));
    }
    let mut out = rep.clone();
    out.spaces
        .insert(target, HomsetSpace::build(b, &rep.state, target, tol)?);
    Ok(out)
}

/// `H_B` for every object `B`.
pub fn gns_full(b: &FellBundle, state: &State, tol: f64) -> Result<GnsRep> {
    let mut rep = gns_object(b, state, tol)?;
    for target in 0..b.dims().len() {
        if target != state.object {
            rep = gns_homset(&rep, b, target, tol)?;
        }
    }
    Ok(rep)
}

fn twocell_shape_check(hm: &HomsetSpace, hn: &HomsetSpace, alpha: &Mat) -> Result<()> {
    let expected = (hn.shape.0 * hn.shape.1, hm.shape.0 * hm.shape.1);
    if alpha.shape() != expected {
        return Err(Error::Dimension {
            op: "gns 2-cell",
            left: expected,
            right: alpha.shape(),
        });
    }
    Ok(())
}

/// `F(alpha): H_M -> H_N` for a linear map `alpha` from the homset `M` (in
/// `src`, target object `m`) to the homset `N` (in `dst`, target `n`).
/// Fails with a quotient error if `alpha` does not preserve null spaces.
pub fn gns_twocell(
    src: &GnsRep,
    m: ObjectId,
    dst: &GnsRep,
    n: ObjectId,
    alpha: &Mat,
    tol: f64,
) -> Result<Mat> {
    let (hm, hn) = (src.space(m)?, dst.space(n)?);
    twocell_shape_check(hm, hn, alpha)?;
    if let Some(null) = hm.null_basis() {
        let image = alpha.try_mul(null)?;
        let scale = 1.0 + op_norm(alpha) * op_norm(hn.gram()).sqrt();
        for c in 0..image.cols() {
            let v = Mat::column(&image.col(c));
            let len = (&(&v.adjoint() * hn.gram()) * &v)[(0, 0)].re.max(0.0).sqrt();
            let residual = len / scale;
            if residual > tol.sqrt().max(tol) {
                return Err(Error::Quotient {
                    residual,
                    witness: format!("null vector {c} of the source maps outside the target null space"),
                });
            }
        }
    }
    Ok(&(&hn.project() * alpha) * &hm.lift())
}

/// The adjoint 2-cell `N -> M` with respect to the GNS inner products.
pub fn twocell_adjoint(src: &GnsRep, m: ObjectId, dst: &GnsRep, n: ObjectId, alpha: &Mat) -> Result<Mat> {
    let (hm, hn) = (src.space(m)?, dst.space(n)?);
    twocell_shape_check(hm, hn, alpha)?;
    let q = hm.isometry();
    Ok(&(&(q * &q.adjoint()) * &alpha.adjoint()) * hn.gram())
}

/// Unitaries `u[B]: H1_B -> H2_B` with `u F1(m) xi1 = F2(m) xi2`.
#[derive(Debug, Clone)]
pub struct Intertwiner {
    pub unitaries: BTreeMap<ObjectId, Mat>,
}

impl Intertwiner {
    pub fn get(&self, b: ObjectId) -> Result<&Mat> {
        self.unitaries
            .get(&b)
            .ok_or_else(|| Error::Lookup(format!("no intertwiner component at object {b}")))
    }

    /// `max |u[C] F1(m) - F2(m) u[B]|` over the matrix units of every homset.
    pub fn residual(&self, rep1: &GnsRep, rep2: &GnsRep) -> Result<f64> {
        let mut worst = 0.0f64;
        for (&bs, ub) in &self.unitaries {
            for (&bt, uc) in &self.unitaries {
                for m in Mat::unit_basis(rep1.dims[bt], rep1.dims[bs]) {
                    let lhs = uc * &rep1.represent(bs, bt, &m)?;
                    let rhs = &rep2.represent(bs, bt, &m)? * ub;
                    worst = worst.max(lhs.max_abs_diff(&rhs));
                }
            }
        }
        Ok(worst)
    }
}

pub fn gns_intertwiner(rep1: &GnsRep, rep2: &GnsRep, tol: f64) -> Result<Intertwiner> {
    let a = rep1.anchor();
    if rep2.anchor() != a || rep1.dims != rep2.dims {
        return Err(Error::Precondition("representations are anchored differently".into()));
    }
    let (xi1, xi2) = (Mat::column(&rep1.cyclic_vector()), Mat::column(&rep2.cyclic_vector()));
    let na = rep1.dims[a];
    for x in Mat::unit_basis(na, na) {
        let v1 = (&xi1.adjoint() * &(&rep1.represent(a, a, &x)? * &xi1))[(0, 0)];
        let v2 = (&xi2.adjoint() * &(&rep2.represent(a, a, &x)? * &xi2))[(0, 0)];
        if (v1 - v2).norm() > tol {
            return Err(Error::Precondition(format!(
                "state values differ on a basis element: {v1} vs {v2}"
            )));
        }
    }
    let mut unitaries = BTreeMap::new();
    for b in rep1.objects() {
        rep2.space(b)?;
        let span = |rep: &GnsRep, xi: &Mat| -> Result<Mat> {
            let cols: Vec<Vec<Cx>> = Mat::unit_basis(rep.dims[b], na)
                .iter()
                .map(|m| Ok(rep.represent(a, b, m)?.try_mul(xi)?.col(0)))
                .collect::<Result<_>>()?;
            let dim = rep.dim(b)?;
            Ok(Mat::from_fn(dim, cols.len(), |i, j| cols[j][i]))
        };
        let (v1, v2) = (span(rep1, &xi1)?, span(rep2, &xi2)?);
        let u = &(&v2 * &v1.adjoint()) * &cxmat::hermitian_pinv(&(&v1 * &v1.adjoint()), tol)?;
        let dim = u.cols();
        let unitarity = (&u.adjoint() * &u).max_abs_diff(&Mat::identity(dim));
        let transport = (&u * &v1).max_abs_diff(&v2);
        if unitarity > tol.sqrt() || transport > tol.sqrt() {
            return Err(Error::Inconsistency {
                message: format!("intertwiner at object {b} is not unitary"),
                witness: format!("|u*u - 1| = {unitarity:e}, |u F1 xi1 - F2 xi2| = {transport:e}"),
            });
        }
        unitaries.insert(b, u);
    }
    Ok(Intertwiner { unitaries })
}

pub const GNS_CHECKS: [&str; 8] = [
    "gns.reconstruction",
    "gns.functoriality",
    "gns.contraction",
    "gns.isometry",
    "gns.cauchy_schwarz",
    "gns.cyclicity",
    "gns.twocells",
    "gns.intertwiner",
];

fn inner_form(v: &Mat, w: &Mat) -> Cx {
    (&v.adjoint() * w)[(0, 0)]
}

fn random_objects(rep: &GnsRep, rng: &mut impl Rng) -> (ObjectId, ObjectId, ObjectId) {
    let objs: Vec<ObjectId> = rep.objects().collect();
    let mut pick = || objs[rng.random_range(0..objs.len())];
    (pick(), pick(), pick())
}

/// Reconstruction, functoriality, contraction, Cauchy–Schwarz, cyclicity,
/// 2-cell functoriality and recovery of a random conjugation, over every
/// space built in `rep`.
pub fn check_gns(rep: &GnsRep, samples: usize, tol: f64, seed: u64, exec: Exec) -> Vec<Report> {
    let a = rep.anchor();
    let na = rep.dims[a];
    let xi = Mat::column(&rep.cyclic_vector());
    let mut reports = Vec::new();

    let recon = Mat::unit_basis(na, na)
        .iter()
        .map(|x| -> Result<f64> {
            let fx = rep.represent(a, a, x)?;
            Ok((rep.state.eval(x) - inner_form(&xi, &(&fx * &xi))).norm())
        })
        .map(|r| match r {
            Ok(v) => (v, None),
            Err(e) => (f64::INFINITY, Some(e.to_string())),
        })
        .collect();
    reports.push(Report::from_samples(GNS_CHECKS[0], recon, tol, Some(seed)));

    let faithful = rep.state.is_faithful(tol);
    let per_sample = exec.map(samples.max(1), |k| -> Result<([f64; 5], String)> {
        let mut rng = sample_rng(seed, k);
        let (b, c, d) = random_objects(rep, &mut rng);
        let dims = &rep.dims;
        let m = gaussian_mat(&mut rng, dims[c], dims[b]);
        let p = gaussian_mat(&mut rng, dims[d], dims[c]);
        let fm = rep.represent(b, c, &m)?;
        let fp = rep.represent(c, d, &p)?;
        let fpm = rep.represent(b, d, &(&p * &m))?;
        let fid = rep.represent(b, b, &Mat::identity(dims[b]))?;
        let fadj = rep.represent(c, b, &m.adjoint())?;
        let scale = 1.0 + op_norm(&m) * (1.0 + op_norm(&p));
        let functor = (fpm.max_abs_diff(&(&fp * &fm)) / scale)
            .max(fid.max_abs_diff(&Mat::identity(fid.rows())))
            .max(fadj.max_abs_diff(&fm.adjoint()) / scale);

        let (nfm, nm) = (op_norm(&fm), op_norm(&m));
        let contraction = (nfm - nm).max(0.0);
        let isometry = if faithful { (nfm - nm).abs() / (1.0 + nm) } else { 0.0 };

        let hb = rep.space(b)?;
        let x = gaussian_mat(&mut rng, hb.shape.0, hb.shape.1);
        let y = gaussian_mat(&mut rng, hb.shape.0, hb.shape.1);
        let phi = |u: &Mat, v: &Mat| rep.state.eval(&(&u.adjoint() * v));
        let (xx, yy, xy) = (phi(&x, &x).re, phi(&y, &y).re, phi(&x, &y));
        let cs = (xy.norm_sqr() - xx * yy).max(0.0) / (1.0 + xx * yy);

        // Left composition 2-cells (A, B) -> (A, C) and (A, C) -> (A, D).
        let t1 = left_composition(&m, na);
        let t2 = left_composition(&p, na);
        let f1 = gns_twocell(rep, b, rep, c, &t1, tol)?;
        let f2 = gns_twocell(rep, c, rep, d, &t2, tol)?;
        let f21 = gns_twocell(rep, b, rep, d, &(&t2 * &t1), tol)?;
        let adj = twocell_adjoint(rep, b, rep, c, &t1)?;
        let f1adj = gns_twocell(rep, c, rep, b, &adj, tol)?;
        let twocells = (f21.max_abs_diff(&(&f2 * &f1)) / scale)
            .max(f1adj.max_abs_diff(&f1.adjoint()) / scale)
            .max((op_norm(&f1) - op_norm(&t1)).max(0.0));

        Ok((
            [functor, contraction, isometry, cs, twocells],
            format!("objects ({b}, {c}, {d})"),
        ))
    });
    let mut columns: Vec<Vec<(f64, Option<String>)>> = vec![Vec::new(); 5];
    for s in per_sample {
        match s {
            Ok((r, w)) => {
                for (col, v) in columns.iter_mut().zip(r) {
                    col.push((v, Some(w.clone())));
                }
            }
            Err(e) => columns
                .iter_mut()
                .for_each(|col| col.push((f64::INFINITY, Some(e.to_string())))),
        }
    }
    let mut columns = columns.into_iter();
    for name in &GNS_CHECKS[1..3] {
        reports.push(Report::from_samples(*name, columns.next().unwrap(), tol, Some(seed)));
    }
    let iso = columns.next().unwrap();
    reports.push(if faithful {
        Report::from_samples(GNS_CHECKS[3], iso, tol, Some(seed))
    } else {
        Report::vacuous(GNS_CHECKS[3], Some(seed), "state is not faithful")
    });
    reports.push(Report::from_samples(GNS_CHECKS[4], columns.next().unwrap(), tol, Some(seed)));

    let cyc = rep
        .objects()
        .map(|b| -> (f64, Option<String>) {
            let cols: Result<Vec<Vec<Cx>>> = Mat::unit_basis(rep.dims[b], na)
                .iter()
                .map(|m| Ok(rep.represent(a, b, m)?.try_mul(&xi)?.col(0)))
                .collect();
            match (cols, rep.dim(b)) {
                (Ok(cols), Ok(dim)) => {
                    let span = Mat::from_fn(dim, cols.len(), |i, j| cols[j][i]);
                    let r = rank(&span, tol);
                    let gap = dim.abs_diff(r) as f64;
                    (gap, Some(format!("object {b}: rank {r}, dimension {dim}")))
                }
                (Err(e), _) | (_, Err(e)) => (f64::INFINITY, Some(e.to_string())),
            }
        })
        .collect();
    reports.push(Report::from_samples(GNS_CHECKS[5], cyc, 0.0, Some(seed)));
    reports.push(Report::from_samples(GNS_CHECKS[6], columns.next().unwrap(), tol, Some(seed)));

    reports.push(intertwiner_report(rep, tol, seed));
    reports
}

/// Conjugates `rep` by random unitaries and checks the intertwiner recovers
/// them (up to the tolerance) and intertwines every generator.
fn intertwiner_report(rep: &GnsRep, tol: f64, seed: u64) -> Report {
    let mut rng = sample_rng(seed, usize::MAX >> 1);
    let w: BTreeMap<ObjectId, Mat> = rep
        .objects()
        .map(|b| {
            let dim = rep.dim(b).expect("built");
            (b, crate::exec::random_unitary(&mut rng, dim))
        })
        .collect();
    let result = rep.conjugated(&w).and_then(|rep2| {
        let u = gns_intertwiner(rep, &rep2, tol)?;
        let recovered = w
            .iter()
            .map(|(b, wb)| u.get(*b).map(|ub| ub.max_abs_diff(wb)))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        Ok(recovered.max(u.residual(rep, &rep2)?))
    });
    match result {
        Ok(r) => Report::from_samples(GNS_CHECKS[7], vec![(r, None)], tol, Some(seed)),
        Err(e) => Report::fail(GNS_CHECKS[7], f64::INFINITY, Some(seed), e.to_string()),
    }
}
