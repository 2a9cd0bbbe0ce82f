//! Library results compared against values computed independently here:
//! nalgebra's symmetric eigensolver, closed-form Gram matrices, and
//! hand-built conjugations.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

use dfb_core::cxmat::{eigh, op_norm, rank, Cx, Mat};
use dfb_core::exec::{gaussian_mat, random_unitary, sample_rng};
use dfb_core::fell::{is_saturated, FellBundle};
use dfb_core::gns::{gns_full, gns_intertwiner, State};
use dfb_core::shell::{parse_descriptor, serialize_descriptor, BaseSpec, BundleDescriptor, MatrixSpec};

/// The real symmetric 2n x 2n matrix [[Re H, -Im H], [Im H, Re H]] of a
/// Hermitian `h`. Its spectrum is the spectrum of `h` with every value twice.
fn real_embedding(h: &Mat) -> DMatrix<f64> {
    let n = h.rows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

fn oracle_spectrum(h: &Mat) -> Vec<f64> {
    let mut values: Vec<f64> = SymmetricEigen::new(real_embedding(h)).eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    values.into_iter().step_by(2).collect()
}

fn hermitian(m: &Mat) -> Mat {
    (m + &m.adjoint()).scale(Cx::new(0.5, 0.0))
}

#[test]
fn eigenvalues_match_nalgebra() {
    let mut rng = sample_rng(7, 0);
    for n in 1..=8 {
        for _ in 0..10 {
            let h = hermitian(&gaussian_mat(&mut rng, n, n));
            let ours = eigh(&h).unwrap();
            let theirs = oracle_spectrum(&h);
            for (a, b) in ours.values.iter().zip(&theirs) {
                assert!((a - b).abs() < 1e-10 * (1.0 + b.abs()), "n={n}: {a} vs {b}");
            }
            // Columns really are eigenvectors.
            for (k, &l) in ours.values.iter().enumerate() {
                let v = Mat::column(&ours.vectors.col(k));
                let r = (&(&h * &v) - &v.scale(Cx::new(l, 0.0))).max_abs();
                assert!(r < 1e-10 * (1.0 + l.abs()));
            }
        }
    }
}

#[test]
fn operator_norm_matches_nalgebra() {
    let mut rng = sample_rng(8, 0);
    for (r, c) in [(1, 1), (2, 3), (4, 4), (5, 2), (8, 8)] {
        for _ in 0..10 {
            let m = gaussian_mat(&mut rng, r, c);
            let top = oracle_spectrum(&(&m.adjoint() * &m))[0];
            let want = top.max(0.0).sqrt();
            assert!((op_norm(&m) - want).abs() < 1e-10 * (1.0 + want));
        }
    }
}

#[test]
fn rank_of_products() {
    let mut rng = sample_rng(9, 0);
    for k in 1..=4 {
        let m = &gaussian_mat(&mut rng, 5, k) * &gaussian_mat(&mut rng, k, 6);
        assert_eq!(rank(&m, 1e-9), k);
    }
}

fn cx(re: f64) -> Cx {
    Cx::new(re, 0.0)
}

/// `G_kl = tr(rho E_k* E_l)` over row-major matrix units of `(A, B)` is
/// `I_{n_B} (x) rho^t`.
fn closed_form_gram(n_b: usize, rho: &Mat) -> Mat {
    Mat::identity(n_b).kron(&rho.transpose())
}

#[test]
fn trace_state_gram_is_half_identity() {
    let b = FellBundle::pair(&[2, 2]).unwrap();
    let rep = gns_full(&b, &State::normalized_trace(&b, 0).unwrap(), 1e-12).unwrap();
    for obj in 0..2 {
        let g = rep.space(obj).unwrap().gram();
        assert!(g.max_abs_diff(&Mat::identity(4).scale(cx(0.5))) < 1e-15);
        assert_eq!(rep.dim(obj).unwrap(), 4);
    }
}

#[test]
fn pure_state_gram_has_rank_two() {
    let b = FellBundle::pair(&[2, 2]).unwrap();
    let state = State::vector(&b, 0, 0).unwrap();
    let rep = gns_full(&b, &state, 1e-12).unwrap();
    let mut rho = Mat::zeros(2, 2);
    rho[(0, 0)] = cx(1.0);
    for obj in 0..2 {
        let g = rep.space(obj).unwrap().gram();
        assert!(g.max_abs_diff(&closed_form_gram(2, &rho)) < 1e-15);
        assert_eq!(rank(g, 1e-9), 2);
        assert_eq!(rep.dim(obj).unwrap(), 2);
    }
}

#[test]
fn random_state_gram_matches_closed_form() {
    let mut rng = sample_rng(10, 0);
    let b = FellBundle::pair(&[3, 2, 1]).unwrap();
    let x = gaussian_mat(&mut rng, 2, 2);
    let p = &x * &x.adjoint();
    let rho = p.scale(cx(1.0 / p.trace().re));
    let rep = gns_full(&b, &State::new(&b, 1, rho.clone()).unwrap(), 1e-12).unwrap();
    for (obj, &n) in b.dims().iter().enumerate() {
        let g = rep.space(obj).unwrap().gram();
        assert!(g.max_abs_diff(&closed_form_gram(n, &rho)) < 1e-14, "object {obj}");
    }
}

#[test]
fn intertwiner_recovers_a_known_conjugation() {
    let mut rng = sample_rng(11, 0);
    for (dims, state) in [
        (vec![2, 2], None),
        (vec![2, 3], Some(0)),
        (vec![1, 2, 2], None),
    ] {
        let b = FellBundle::pair(&dims).unwrap();
        let s = match state {
            Some(k) => State::vector(&b, 0, k).unwrap(),
            None => State::normalized_trace(&b, 0).unwrap(),
        };
        let rep = gns_full(&b, &s, 1e-12).unwrap();
        let v: BTreeMap<usize, Mat> = rep
            .objects()
            .map(|o| (o, random_unitary(&mut rng, rep.dim(o).unwrap())))
            .collect();
        let rep2 = rep.conjugated(&v).unwrap();
        let u = gns_intertwiner(&rep, &rep2, 1e-12).unwrap();
        for (o, vo) in &v {
            assert!(u.get(*o).unwrap().max_abs_diff(vo) <= 1e-9, "{dims:?} object {o}");
        }
        assert!(u.residual(&rep, &rep2).unwrap() <= 1e-9);
    }
}

#[test]
fn pair_bundles_are_saturated() {
    for n in 1..=4 {
        for d in 1..=3 {
            assert!(is_saturated(&FellBundle::pair(&vec![d; n]).unwrap(), 1e-9).unwrap());
        }
        let mixed: Vec<usize> = (1..=n).collect();
        assert!(is_saturated(&FellBundle::pair(&mixed).unwrap(), 1e-9).unwrap());
    }
}

#[test]
fn a_zero_fiber_breaks_saturation() {
    for n in 2..=4 {
        let b = FellBundle::pair(&vec![2; n]).unwrap();
        let g = b.base().between(0, n - 1).unwrap();
        assert!(!is_saturated(&b.with_zero_fiber(g).unwrap(), 1e-9).unwrap());
    }
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = MatrixSpec> {
    prop::collection::vec(prop::collection::vec(any::<[i32; 2]>(), cols), rows).prop_map(|rows| {
        MatrixSpec(
            rows.into_iter()
                .map(|r| r.into_iter().map(|[a, b]| [a as f64 / 64.0, b as f64 / 64.0]).collect())
                .collect(),
        )
    })
}

fn pair_descriptor() -> impl Strategy<Value = BundleDescriptor> {
    prop::collection::vec(1usize..=3, 1..=4).prop_flat_map(|dims| {
        let n = dims.len();
        let mut keyed = Vec::new();
        for src in 0..n {
            for dst in 0..n {
                let key = if src == dst {
                    format!("u:{src}")
                } else {
                    format!("a:{src}>{dst}")
                };
                keyed.push((Just(key), matrix(dims[dst], dims[src])));
            }
        }
        let section = keyed.prop_map(|entries| entries.into_iter().collect::<BTreeMap<_, _>>());
        let sections = prop::collection::vec(section, 0..=2).prop_map(|ss| {
            ss.into_iter()
                .enumerate()
                .map(|(k, s)| (format!("s{}", k + 1), s))
                .collect::<BTreeMap<_, _>>()
        });
        (Just(dims), sections).prop_map(move |(dims, sections)| BundleDescriptor {
            base: BaseSpec::Pair { n },
            dims,
            sections,
        })
    })
}

proptest! {
    #[test]
    fn descriptor_round_trip(d in pair_descriptor()) {
        let text = serialize_descriptor(&d);
        let back = parse_descriptor(&text).unwrap();
        prop_assert_eq!(&back, &d);
        prop_assert_eq!(serialize_descriptor(&back), text);
        for name in d.sections.keys() {
            prop_assert!(d.fell_section(name).is_ok());
        }
    }
}

#[test]
fn singular_values_match_nalgebra() {
    let mut rng = sample_rng(12, 0);
    for (r, c) in [(1, 3), (3, 1), (4, 4), (6, 3), (3, 7)] {
        let m = gaussian_mat(&mut rng, r, c);
        let ours = dfb_core::cxmat::singular_values(&m);
        let gram = if r >= c { &m.adjoint() * &m } else { &m * &m.adjoint() };
        let theirs: Vec<f64> = oracle_spectrum(&gram).iter().map(|l| l.max(0.0).sqrt()).collect();
        assert_eq!(ours.len(), r.min(c));
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-10 * (1.0 + b));
        }
    }
}
