//! The one-square line bundle and its identification with `M_4`.
//!
//! Sections of the line bundle over a single folded square are exactly the
//! linking matrices of `Pair(2)` with `M_2` fibers: the top-left block holds
//! the `(A, B)` corner, the top-right block the maps out of `(A', B')`.

use super::{DoubleFellBundle, SquareSection};
use crate::cxmat::{op_norm, Mat};
use crate::error::{Error, Result};
use crate::exec::{gaussian_mat, sample_rng, Exec};
use crate::fell::{linking, rel, FellBundle, Section};
use crate::groupoid::{DoubleGroupoid, SquareId};
use crate::report::Report;

#[derive(Debug, Clone)]
pub struct Example1 {
    pub double: DoubleFellBundle,
    pub pair: FellBundle,
    pub square: SquareId,
}

pub fn build_example1() -> Example1 {
    let dg = DoubleGroupoid::grid(1, 1, true).expect("1x1 grid");
    Example1 {
        double: DoubleFellBundle::line(dg),
        pair: FellBundle::pair(&[2, 2]).expect("Pair(2)"),
        square: SquareId::new(0, 0),
    }
}

impl Example1 {
    /// `M_4 -> sections over the square`, entry `(i, j)` to block `(i, j)`.
    pub fn iso(&self, x: &Mat) -> Result<SquareSection> {
        if x.shape() != (4, 4) {
            return Err(Error::Dimension {
                op: "example iso",
                left: (4, 4),
                right: x.shape(),
            });
        }
        let blocks = (0..4)
            .map(|i| (0..4).map(|j| Mat::scalar(x[(i, j)])).collect())
            .collect();
        self.double.section(self.square, blocks)
    }

    pub fn iso_inv(&self, s: &SquareSection) -> Mat {
        s.assemble()
    }

    pub fn from_pair_section(&self, s: &Section) -> Result<SquareSection> {
        self.iso(&linking(&self.pair, s))
    }

    /// Product of square sections as groupoid convolution over the folded
    /// vertex groupoid.
    pub fn product(&self, x: &SquareSection, y: &SquareSection) -> Result<SquareSection> {
        let (b, fx) = self.double.to_folded_section(x)?;
        let (_, fy) = self.double.to_folded_section(y)?;
        self.double.from_folded_section(self.square, &b, &fx.mul(&fy, &b)?)
    }

    /// C*-norm of the square section, read off the folded linking matrix.
    pub fn norm(&self, x: &SquareSection) -> Result<f64> {
        let (b, s) = self.double.to_folded_section(x)?;
        Ok(op_norm(&linking(&b, &s)))
    }

    /// Checks that the identification carries products, adjoints and norms
    /// across, over `samples` random pairs.
    pub fn check_transport(&self, samples: usize, tol: f64, seed: u64, exec: Exec) -> Vec<Report> {
        let results = exec.map(samples.max(1), |k| -> Result<[f64; 3]> {
            let mut rng = sample_rng(seed, k);
            let x = gaussian_mat(&mut rng, 4, 4);
            let y = gaussian_mat(&mut rng, 4, 4);
            let (sx, sy) = (self.iso(&x)?, self.iso(&y)?);
            let prod = self.iso_inv(&self.product(&sx, &sy)?);
            let adj = self.iso_inv(&sx.adjoint());
            let nx = op_norm(&x);
            Ok([
                rel(&prod, &(&x * &y)),
                rel(&adj, &x.adjoint()),
                (self.norm(&sx)? - nx).abs() / (1.0 + nx),
            ])
        });
        let names = ["example1.product", "example1.adjoint", "example1.norm"];
        (0..3)
            .map(|c| {
                let col = results
                    .iter()
                    .map(|r| match r {
                        Ok(v) => (v[c], None),
                        Err(e) => (f64::INFINITY, Some(e.to_string())),
                    })
                    .collect();
                Report::from_samples(names[c], col, tol, Some(seed))
            })
            .collect()
    }
}
