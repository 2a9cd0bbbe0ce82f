//! The dual bundle: complex conjugation `J`, transposed sections, and
//! reversed arrows.
//!
//! With `J` the entrywise conjugation, `J G* J = G^t` for any section `G`,
//! so the dual of a section is its transpose. Over the dual arrow
//! `g^o: B -> A` sits the transpose of the fiber over `g: A -> B`, and the
//! left action of `(B, B)` on `E_g` turns into a right action on `E_g^o`.

use rand::Rng;

use crate::cxmat::{Cx, Mat};
use crate::dfell::SquareSection;
use crate::error::{Error, Result};
use crate::exec::{gaussian_cx, gaussian_mat, gaussian_vec, sample_rng, Exec};
use crate::fell::{is_saturated, linking, Element, FellBundle, Section};
use crate::groupoid::ArrowId;
use crate::report::Report;

/// Entrywise complex conjugation.
pub fn conj_j(v: &[Cx]) -> Vec<Cx> {
    v.iter().map(Cx::conj).collect()
}

/// The dual of an assembled section matrix.
pub fn dual_matrix(m: &Mat) -> Mat {
    m.transpose()
}

/// Block-wise dual of a square section: block `(i, j)` becomes
/// `block(j, i)^t`, keeping the vertex frame.
pub fn dual_square_section(x: &SquareSection) -> SquareSection {
    x.transposed()
}

/// The dual of a saturated Fell bundle over a pair groupoid. Objects and
/// fiber dimensions are unchanged; every arrow is replaced by its reverse.
#[derive(Debug, Clone, PartialEq)]
pub struct DualDescriptor {
    source: FellBundle,
    reversal: Vec<ArrowId>,
}

pub fn dual_category(b: &FellBundle, tol: f64) -> Result<DualDescriptor> {
    if !is_saturated(b, tol)? {
        return Err(Error::Precondition("dual requires a saturated bundle".into()));
    }
    let base = b.base();
    Ok(DualDescriptor {
        source: b.clone(),
        reversal: (0..base.arrow_count()).map(|g| base.inverse(g)).collect(),
    })
}

impl DualDescriptor {
    pub fn source(&self) -> &FellBundle {
        &self.source
    }

    /// `g^o` for an arrow `g` of the source.
    pub fn reversed(&self, g: ArrowId) -> ArrowId {
        self.reversal[g]
    }

    /// The bundle the dual sections live on.
    pub fn bundle(&self) -> &FellBundle {
        &self.source
    }

    pub fn dual_element(&self, e: &Element) -> Element {
        Element {
            arrow: self.reversed(e.arrow),
            value: e.value.transpose(),
        }
    }

    /// `dual(s)(g^o) = s(g)^t`.
    pub fn dual_section(&self, s: &Section) -> Result<Section> {
        let entries = (0..self.reversal.len())
            .map(|g| (self.reversed(g), s.get(g).transpose()))
            .collect();
        Section::from_entries(&self.source, entries)
    }

    /// The dual of the dual, which is the source bundle again.
    pub fn dual(&self) -> DualDescriptor {
        let mut reversal = vec![0; self.reversal.len()];
        for (g, &h) in self.reversal.iter().enumerate() {
            reversal[h] = g;
        }
        DualDescriptor {
            source: self.source.clone(),
            reversal,
        }
    }
}

pub const DUAL_CHECKS: [&str; 5] = [
    "dual.conjugation",
    "dual.antihomomorphism",
    "dual.involutive",
    "dual.action_exchange",
    "dual.bimodule",
];

fn rel(a: &Mat, b: &Mat) -> f64 {
    a.max_abs_diff(b) / (1.0 + a.max_abs().max(b.max_abs()))
}

fn apply(m: &Mat, v: &[Cx]) -> Vec<Cx> {
    (m * &Mat::column(v)).col(0)
}

fn vec_diff(x: &[Cx], y: &[Cx]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

/// Samples the dual identities. Conjugation is held to 1e-14 and the
/// algebraic identities to 1e-12 (or `tol`, if tighter); involutivity and the
/// action exchange must hold exactly.
pub fn check_dual(d: &DualDescriptor, samples: usize, tol: f64, seed: u64, exec: Exec) -> Vec<Report> {
    let b = d.bundle();
    let per_sample = exec.map(samples.max(1), |k| -> Result<[f64; 5]> {
        let mut rng = sample_rng(seed, k);
        let s1 = Section::random(b, &mut rng);
        let s2 = Section::random(b, &mut rng);
        let g1 = linking(b, &s1);
        let psi = gaussian_vec(&mut rng, g1.rows());

        let lhs = conj_j(&apply(&g1.adjoint(), &conj_j(&psi)));
        let rhs = apply(&dual_matrix(&g1), &psi);
        let scale = 1.0 + g1.max_abs() * psi.iter().map(|z| z.norm()).sum::<f64>();
        let conj = vec_diff(&lhs, &rhs) / scale;

        let prod = d.dual_section(&s1.mul(&s2, b)?)?;
        let anti = d.dual_section(&s2)?.mul(&d.dual_section(&s1)?, b)?;
        let adj = d.dual_section(&s1.adjoint(b))?;
        let adj_exp = d.dual_section(&s1)?.adjoint(b);
        let antihom = rel(&linking(b, &prod), &linking(b, &anti))
            .max(rel(&linking(b, &adj), &linking(b, &adj_exp)))
            .max(rel(&linking(b, &d.dual_section(&s1)?), &dual_matrix(&g1)));

        let back = d.dual().dual_section(&d.dual_section(&s1)?)?;
        let involutive = if back == s1 { 0.0 } else { 1.0 };

        // A left (B, B) action on E_g becomes a right action on E_g^o.
        let g = rng.random_range(0..b.base().arrow_count());
        let arrow = b.base().arrow(g)?;
        let e = b.random_element(&mut rng, g);
        let x = b.random_element(&mut rng, b.base().unit(arrow.dst));
        let xe = b.fiber_mul(&e, &x)?;
        let de = d.dual_element(&e);
        let dx = d.dual_element(&x);
        let swapped = de.value.try_mul(&dx.value)?;
        let shapes_ok = de.arrow == b.base().inverse(g) && swapped.shape() == b.fiber_shape(de.arrow);
        let exchange = if shapes_ok {
            d.dual_element(&xe).value.max_abs_diff(&swapped)
        } else {
            f64::INFINITY
        };

        // a . G . c^t with commuting left and right actions.
        let n = g1.rows();
        let a = gaussian_mat(&mut rng, n, n);
        let c = gaussian_mat(&mut rng, n, n).scale(gaussian_cx(&mut rng));
        let bimodule = rel(&(&(&a * &g1) * &c.transpose()), &(&a * &(&g1 * &c.transpose())));

        Ok([conj, antihom, involutive, exchange, bimodule])
    });
    let mut columns: Vec<Vec<(f64, Option<String>)>> = vec![Vec::new(); 5];
    for r in per_sample {
        match r {
            Ok(v) => columns.iter_mut().zip(v).for_each(|(c, x)| c.push((x, None))),
            Err(e) => columns
                .iter_mut()
                .for_each(|c| c.push((f64::INFINITY, Some(e.to_string())))),
        }
    }
    let tols = [tol.min(1e-14), tol.min(1e-12), 0.0, 0.0, tol.min(1e-12)];
    DUAL_CHECKS
        .iter()
        .zip(columns)
        .zip(tols)
        .map(|((name, col), t)| Report::from_samples(*name, col, t, Some(seed)))
        .collect()
}
