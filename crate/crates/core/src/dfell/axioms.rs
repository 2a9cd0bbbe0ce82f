use rand::Rng;

use super::{compose4, CompositionMode, DoubleFellBundle, Grade, GradedElement, Order};
use crate::cxmat::op_norm;
use crate::error::Result;
use crate::exec::{sample_rng, Exec};
use crate::fell::{collect_reports, rel, Sample};
use crate::groupoid::{Footprint, SquareId};
use crate::report::Report;

pub const DOUBLE_STAR_CONDITIONS: [&str; 9] = [
    "double.a grading covers the algebra",
    "double.b non-adjacent products vanish",
    "double.c products land in composite grades",
    "double.d adjoint lands in the adjoint grade",
    "double.e Zero annihilates",
    "double.f involutions commute",
    "double.g grid degeneracies",
    "double.h interchange law",
    "double.i C*-identity on payloads",
];

fn random_square(b: &DoubleFellBundle, rng: &mut impl Rng) -> SquareId {
    let dg = b.groupoid();
    SquareId::new(rng.random_range(0..dg.rows()), rng.random_range(0..dg.cols()))
}

fn flag(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        1.0
    }
}

/// Frame the composite over footprint `f` should carry: its four corners.
fn corner_frame(b: &DoubleFellBundle, f: Footprint) -> Vec<usize> {
    let dg = b.groupoid();
    vec![
        dg.vertex(f.top, f.left),
        dg.vertex(f.top + f.rows, f.left),
        dg.vertex(f.top, f.left + f.cols),
        dg.vertex(f.top + f.rows, f.left + f.cols),
    ]
}

fn payload_diff(x: &GradedElement, y: &GradedElement) -> f64 {
    match (x.payload(), y.payload()) {
        (None, None) => 0.0,
        (Some(p), Some(q)) => {
            let scale = 1.0 + p.assemble().max_abs().max(q.assemble().max_abs());
            p.max_abs_diff(q) / scale
        }
        _ => 1.0,
    }
}

fn cstar_residual(x: &GradedElement) -> f64 {
    let Some(m) = x.assemble() else {
        return 0.0;
    };
    let n = op_norm(&m);
    (op_norm(&(&m.adjoint() * &m)) - n * n).abs() / (1.0 + n * n)
}

fn sample(b: &DoubleFellBundle, seed: u64, k: usize) -> Result<Sample<9>> {
    let mut rng = sample_rng(seed, k);
    let dg = b.groupoid();
    let lenient = CompositionMode::Lenient;
    let (s1, s2) = (random_square(b, &mut rng), random_square(b, &mut rng));
    let x = b.random_section(s1, &mut rng)?.to_graded();
    let y = b.random_section(s2, &mut rng)?.to_graded();
    let witness = format!("squares ({s1}), ({s2})");
    let mut r = [0.0; 9];

    let p = x.payload().expect("square payload");
    r[0] = flag(
        x.grade() == Grade::Square(s1)
            && x.footprint() == Some(Footprint::square(s1))
            && p.vertices() == dg.square_vertices(s1)
            && p.block_dims() == dg.square_vertices(s1).map(|v| b.dims()[v]),
    );

    let (fx, fy) = (Footprint::square(s1), Footprint::square(s2));
    let h = x.h_product(&y)?;
    let v = x.v_product(&y)?;
    r[1] = flag(
        (fx.h_adjacent(&fy) || h.is_zero())
            && (fx.v_adjacent(&fy) || v.is_zero())
            && x.h_product(&x)?.is_zero()
            && x.v_product(&x)?.is_zero(),
    );

    // A guaranteed-adjacent partner on each side, when the grid has one.
    let right = (s1.col + 1 < dg.cols()).then(|| SquareId::new(s1.row, s1.col + 1));
    let below = (s1.row + 1 < dg.rows()).then(|| SquareId::new(s1.row + 1, s1.col));
    let mut composites = Vec::new();
    for (partner, horizontal) in [(right, true), (below, false)] {
        let Some(q) = partner else { continue };
        let z = b.random_section(q, &mut rng)?.to_graded();
        let (c, expected) = if horizontal {
            (x.h_product(&z)?, Grade::HComposite(s1, q))
        } else {
            (x.v_product(&z)?, Grade::VComposite(s1, q))
        };
        let f = c.footprint();
        let frame_ok = f.is_some_and(|f| c.payload().is_some_and(|p| p.vertices() == corner_frame(b, f)));
        r[2] = r[2].max(flag(c.grade() == expected && frame_ok));

        let adj = if horizontal {
            x.adjoint().h_product(&z.adjoint())?
        } else {
            x.adjoint().v_product(&z.adjoint())?
        };
        r[3] = r[3].max(payload_diff(&c.adjoint(), &adj));
        composites.push(c);
    }

    let xs = x.adjoint();
    let ps = xs.payload().expect("square payload");
    let mut swap = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            swap = swap.max(rel(ps.block(i, j), &p.block(j, i).adjoint()));
        }
    }
    r[3] = r[3].max(swap).max(flag(xs.grade() == x.grade() && xs.footprint() == x.footprint()));

    let zero = GradedElement::zero();
    r[4] = flag(
        zero.h_product(&x)?.is_zero()
            && x.h_product(&zero)?.is_zero()
            && zero.v_product(&x)?.is_zero()
            && x.v_product(&zero)?.is_zero()
            && zero.adjoint().is_zero(),
    );

    // Both involutions act as the block adjoint; applying them in either
    // order, or twice, must be consistent.
    r[5] = payload_diff(&xs.adjoint(), &x).max(payload_diff(&y.adjoint().adjoint(), &y));

    if dg.rows() >= 2 && dg.cols() >= 2 {
        let top = SquareId::new(rng.random_range(0..dg.rows() - 1), rng.random_range(0..dg.cols() - 1));
        let block = [
            top,
            SquareId::new(top.row, top.col + 1),
            SquareId::new(top.row + 1, top.col),
            SquareId::new(top.row + 1, top.col + 1),
        ];
        let s = block
            .iter()
            .map(|&q| b.random_section(q, &mut rng))
            .collect::<Result<Vec<_>>>()?;
        let ops = [&s[0], &s[1], &s[2], &s[3]];
        let hv = compose4(ops, Order::HThenV, lenient)?;
        let vh = compose4(ops, Order::VThenH, lenient)?;
        r[7] = payload_diff(&hv, &vh).max(flag(hv.grade() == Grade::Block2x2(block) && hv.grade() == vh.grade()));
        composites.push(hv);
    }

    r[8] = composites
        .iter()
        .chain([&x, &y])
        .map(cstar_residual)
        .fold(0.0, f64::max);

    Ok((r, witness))
}

/// Samples the double *-algebra conditions. Condition (g) concerns
/// degenerate cells, which a rectangular grid does not have, and is reported
/// vacuous; (c) and (h) are vacuous on grids too small to contain an
/// adjacent pair or a 2x2 block.
pub fn check_double_star_axioms(
    b: &DoubleFellBundle,
    samples: usize,
    tol: f64,
    seed: u64,
    exec: Exec,
) -> Vec<Report> {
    let results = exec.map(samples.max(1), |k| sample(b, seed, k));
    let mut reports = collect_reports(&DOUBLE_STAR_CONDITIONS, results, tol, seed);
    let dg = b.groupoid();
    reports[6] = Report::vacuous(
        DOUBLE_STAR_CONDITIONS[6],
        Some(seed),
        "rectangular grids have no degenerate cells",
    );
    if dg.rows() < 2 || dg.cols() < 2 {
        reports[7] = Report::vacuous(DOUBLE_STAR_CONDITIONS[7], Some(seed), "grid has no 2x2 block");
    }
    if dg.rows() == 1 && dg.cols() == 1 {
        reports[2] = Report::vacuous(DOUBLE_STAR_CONDITIONS[2], Some(seed), "grid has a single square");
    }
    reports
}
