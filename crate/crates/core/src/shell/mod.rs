//! Command-line front end: descriptor files in, one report per check out.

mod descriptor;

pub use descriptor::{parse_descriptor, serialize_descriptor, Base, BaseSpec, BundleDescriptor, MatrixSpec};

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cxmat::Mat;
use crate::dfell::{
    build_example1, check_double_star_axioms, compose4, hcompose, union, vcompose, CompositionMode, Grade,
    GradedElement, Order, Slot, SquareSection, UnionDir,
};
use crate::dual::{check_dual, dual_category, dual_matrix, dual_square_section};
use crate::error::{Error, Result};
use crate::exec::{gaussian_mat, sample_rng, Exec};
use crate::fell::{check_cstar_category, check_fell_axioms, linking, product_span_rank, FellBundle};
use crate::gns::{check_gns, gns_full, gns_object, State};
use crate::report::{all_pass, Report, Status};

#[derive(Debug, Parser)]
#[command(name = "dfb", version, about = "Check Fell bundles, double Fell bundles and their GNS and dual constructions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Residual tolerance for the checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Random samples per check.
    #[arg(long, global = true, default_value_t = 100)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// One JSON object per line instead of text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Dir {
    H,
    V,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OrderArg {
    Hv,
    Vh,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// The ten Fell bundle axioms.
    CheckFell { file: PathBuf },
    /// The C*-category conditions.
    CheckCstar { file: PathBuf },
    /// The double *-algebra conditions (grid bases only).
    CheckDouble { file: PathBuf },
    /// Whether every product of fibers spans the fiber over the composite.
    Saturation { file: PathBuf },
    /// Horizontal or vertical composite of two square sections.
    Compose {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1, required = true)]
        sections: Vec<String>,
        #[arg(long)]
        dir: Dir,
    },
    /// Composite of a 2x2 block given in reading order.
    Compose4 {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1, required = true)]
        sections: Vec<String>,
        #[arg(long)]
        order: OrderArg,
    },
    /// Union of two adjacent square sections.
    Union {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1, required = true)]
        sections: Vec<String>,
        #[arg(long)]
        dir: Dir,
    },
    /// GNS representation from a density matrix on an object.
    Gns {
        file: PathBuf,
        #[arg(long)]
        object: usize,
        #[arg(long)]
        state: PathBuf,
        /// Also build the spaces for every other object.
        #[arg(long)]
        homsets: bool,
    },
    /// Dual bundle checks, optionally printing the dual of one section.
    Dual {
        file: PathBuf,
        #[arg(long)]
        section: Option<String>,
    },
    /// The one-square line bundle and its identification with M_4.
    Example1,
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    json: bool,
    tol: f64,
    samples: usize,
    seed: u64,
}

#[derive(Serialize)]
struct PayloadLine<'a> {
    payload: Payload<'a>,
}

#[derive(Serialize)]
struct Payload<'a> {
    grade: String,
    vertices: &'a [usize],
    matrix: MatrixSpec,
}

impl Ctx<'_> {
    fn report(&mut self, r: &Report) -> Result<()> {
        if self.json {
            writeln!(self.out, "{}", serde_json::to_string(r).expect("report serializes"))?;
        } else {
            let status = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Vacuous => "VACUOUS",
            };
            let seed = r.seed.map_or(String::from("-"), |s| s.to_string());
            writeln!(self.out, "{status:<8}{}  residual={:.3e}  seed={seed}", r.check, r.residual)?;
            if let Some(w) = &r.witness {
                writeln!(self.out, "        {w}")?;
            }
        }
        Ok(())
    }

    fn reports(&mut self, rs: &[Report]) -> Result<bool> {
        for r in rs {
            self.report(r)?;
        }
        Ok(all_pass(rs))
    }

    fn matrix(&mut self, label: &str, grade: String, vertices: &[usize], m: &Mat) -> Result<()> {
        if self.json {
            let line = PayloadLine {
                payload: Payload {
                    grade,
                    vertices,
                    matrix: MatrixSpec::from_mat(m),
                },
            };
            writeln!(self.out, "{}", serde_json::to_string(&line).expect("payload serializes"))?;
        } else {
            writeln!(self.out, "{label} {grade} over vertices {vertices:?}")?;
            for row in m.to_rows() {
                let cells: Vec<String> = row.iter().map(|z| format!("{z:>12.6}")).collect();
                writeln!(self.out, "  {}", cells.join(" "))?;
            }
        }
        Ok(())
    }

    fn element(&mut self, label: &str, x: &GradedElement) -> Result<()> {
        match (x.payload(), x.assemble()) {
            (Some(p), Some(m)) => self.matrix(label, grade_label(x.grade()), p.vertices(), &m),
            _ => self.matrix(label, grade_label(Grade::Zero), &[], &Mat::zeros(0, 0)),
        }
    }
}

fn grade_label(g: Grade) -> String {
    let list = |qs: &[crate::groupoid::SquareId]| {
        qs.iter().map(|q| format!("({q})")).collect::<Vec<_>>().join(" ")
    };
    match g {
        Grade::Zero => "zero".into(),
        Grade::Square(q) => format!("square {}", list(&[q])),
        Grade::HComposite(a, b) => format!("horizontal {}", list(&[a, b])),
        Grade::VComposite(a, b) => format!("vertical {}", list(&[a, b])),
        Grade::Block2x2(qs) => format!("block {}", list(&qs)),
        Grade::Region(f) => format!("region ({},{}) {}x{}", f.top, f.left, f.rows, f.cols),
        Grade::HUnion(a, b) => format!("horizontal union {}", list(&[a, b])),
        Grade::VUnion(a, b) => format!("vertical union {}", list(&[a, b])),
    }
}

fn load(path: &Path) -> Result<BundleDescriptor> {
    let text = std::fs::read_to_string(path)?;
    parse_descriptor(&text)
}

fn load_state(path: &Path, b: &FellBundle, object: usize) -> Result<State> {
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum StateFile {
        Wrapped { rho: MatrixSpec },
        Bare(MatrixSpec),
    }
    let text = std::fs::read_to_string(path)?;
    let parsed: StateFile = serde_json::from_str(&text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let (StateFile::Wrapped { rho } | StateFile::Bare(rho)) = parsed;
    State::new(b, object, rho.to_mat()?)
}

fn sections<const K: usize>(d: &BundleDescriptor, names: &[String]) -> Result<[SquareSection; K]> {
    if names.len() != K {
        return Err(Error::Domain(format!("expected {K} section names, got {}", names.len())));
    }
    let v = names
        .iter()
        .map(|n| d.square_section(n))
        .collect::<Result<Vec<_>>>()?;
    Ok(v.try_into().expect("length checked"))
}

fn saturation_report(b: &FellBundle, tol: f64) -> Result<Report> {
    for (g1, g2) in b.base().composable_pairs() {
        let g = b.base().compose(g1, g2)?;
        let (rank, dim) = (product_span_rank(b, g1, g2, tol)?, b.fiber_dim(g));
        if rank < dim {
            return Ok(Report::fail(
                "saturation",
                (dim - rank) as f64,
                None,
                format!(
                    "products over ({}, {}) span rank {rank} of {dim}",
                    b.base().label(g1),
                    b.base().label(g2)
                ),
            ));
        }
    }
    Ok(Report::pass("saturation", 0.0, None))
}

fn union_report(s1: &SquareSection, s2: &SquareSection, dir: UnionDir, u: &GradedElement) -> Report {
    let p = u.payload().expect("union payload");
    // Positions of s1's frame inside the union's frame, and the blocks the
    // union takes from s2 instead (the shared edge of a vertical union).
    let (keep, from_s2): ([usize; 4], &[((usize, usize), (usize, usize))]) = match dir {
        UnionDir::Horizontal => ([0, 1, 2, 3], &[]),
        UnionDir::Vertical => ([0, 1, 3, 4], &[((3, 1), (2, 0)), ((1, 3), (0, 2))]),
    };
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let expected = match from_s2.iter().find(|(pos, _)| *pos == (i, j)) {
                Some((_, (a, b))) => s2.payload().block(*a, *b),
                None => s1.payload().block(i, j),
            };
            worst = worst.max(p.block(keep[i], keep[j]).max_abs_diff(expected));
        }
    }
    if worst == 0.0 {
        Report::pass("union.restriction", 0.0, None)
    } else {
        Report::fail("union.restriction", worst, None, "first operand not recovered from the union")
    }
}

fn execute(cmd: Command, ctx: &mut Ctx) -> Result<bool> {
    let (tol, samples, seed) = (ctx.tol, ctx.samples, ctx.seed);
    let exec = Exec::Parallel;
    match cmd {
        Command::CheckFell { file } => {
            let b = load(&file)?.fell_bundle()?;
            ctx.reports(&check_fell_axioms(&b, samples, tol, seed, exec))
        }
        Command::CheckCstar { file } => {
            let b = load(&file)?.fell_bundle()?;
            ctx.reports(&check_cstar_category(&b, samples, tol, seed, exec))
        }
        Command::CheckDouble { file } => {
            let d = load(&file)?.double_bundle()?;
            ctx.reports(&check_double_star_axioms(&d, samples, tol, seed, exec))
        }
        Command::Saturation { file } => {
            let b = load(&file)?.fell_bundle()?;
            ctx.reports(&[saturation_report(&b, tol)?])
        }
        Command::Compose { file, sections: names, dir } => {
            let d = load(&file)?;
            let [s1, s2] = sections::<2>(&d, &names)?;
            let mode = CompositionMode::Lenient;
            let x = match dir {
                Dir::H => hcompose(&s1, &s2, mode)?,
                Dir::V => vcompose(&s1, &s2, mode)?,
            };
            ctx.element("composite", &x)?;
            let adj = match dir {
                Dir::H => hcompose(&s1.adjoint(), &s2.adjoint(), mode)?,
                Dir::V => vcompose(&s1.adjoint(), &s2.adjoint(), mode)?,
            };
            let residual = adj.payload().expect("composite").max_abs_diff(x.adjoint().payload().expect("composite"));
            ctx.reports(&[Report::from_samples("compose.adjoint", vec![(residual, None)], tol, None)])
        }
        Command::Compose4 { file, sections: names, order } => {
            let d = load(&file)?;
            let s = sections::<4>(&d, &names)?;
            let ops = [&s[0], &s[1], &s[2], &s[3]];
            let mode = CompositionMode::Lenient;
            let (first, second) = match order {
                OrderArg::Hv => (Order::HThenV, Order::VThenH),
                OrderArg::Vh => (Order::VThenH, Order::HThenV),
            };
            let x = compose4(ops, first, mode)?;
            let y = compose4(ops, second, mode)?;
            ctx.element("composite", &x)?;
            let residual = x.payload().expect("composite").max_abs_diff(y.payload().expect("composite"));
            ctx.reports(&[Report::from_samples("compose4.interchange", vec![(residual, None)], tol, None)])
        }
        Command::Union { file, sections: names, dir } => {
            let d = load(&file)?;
            let [s1, s2] = sections::<2>(&d, &names)?;
            let dir = match dir {
                Dir::H => UnionDir::Horizontal,
                Dir::V => UnionDir::Vertical,
            };
            let u = union(&s1, &s2, dir)?;
            ctx.element("union", &u)?;
            ctx.reports(&[union_report(&s1, &s2, dir, &u)])
        }
        Command::Gns { file, object, state, homsets } => {
            let b = load(&file)?.fell_bundle()?;
            let st = load_state(&state, &b, object)?;
            let build_tol = tol.min(1e-12);
            let rep = if homsets {
                gns_full(&b, &st, build_tol)?
            } else {
                gns_object(&b, &st, build_tol)?
            };
            let dims: BTreeMap<String, usize> = rep
                .objects()
                .map(|o| Ok((o.to_string(), rep.dim(o)?)))
                .collect::<Result<_>>()?;
            if ctx.json {
                let line = serde_json::json!({"gns": {"object": object, "dimensions": dims}});
                writeln!(ctx.out, "{line}")?;
            } else {
                writeln!(ctx.out, "GNS anchored at object {object}, space dimensions {dims:?}")?;
            }
            ctx.reports(&check_gns(&rep, samples, tol, seed, exec))
        }
        Command::Dual { file, section } => {
            let d = load(&file)?;
            let b = d.fell_bundle()?;
            if let Some(name) = &section {
                match d.base()? {
                    Base::Pair(_) => {
                        let (b, s) = d.fell_section(name)?;
                        let verts: Vec<usize> = (0..b.dims().len()).collect();
                        ctx.matrix("dual", "section".into(), &verts, &dual_matrix(&linking(&b, &s)))?;
                    }
                    Base::Grid(_) => {
                        let s = d.square_section(name)?;
                        let t = dual_square_section(&s);
                        ctx.element("dual", &t.to_graded())?;
                    }
                }
            }
            match dual_category(&b, tol) {
                Ok(dual) => ctx.reports(&check_dual(&dual, samples, tol, seed, exec)),
                Err(e @ Error::Precondition(_)) => {
                    ctx.reports(&[Report::fail("dual.saturated", 1.0, None, e.to_string())])
                }
                Err(e) => Err(e),
            }
        }
        Command::Example1 => {
            let ex = build_example1();
            let layout: Vec<Vec<&str>> = (0..4)
                .map(|i| (0..4).map(|j| slot_name(Slot::at(i, j))).collect())
                .collect();
            if ctx.json {
                writeln!(ctx.out, "{}", serde_json::json!({ "layout": layout }))?;
            } else {
                writeln!(ctx.out, "one-square section layout (rows and columns A, B, A', B'):")?;
                for row in &layout {
                    let cells: Vec<String> = row.iter().map(|s| format!("{s:<8}")).collect();
                    writeln!(ctx.out, "  {}", cells.join(""))?;
                }
            }
            let mut worst = 0.0f64;
            for k in 0..samples.max(1) {
                let x = gaussian_mat(&mut sample_rng(seed, k), 4, 4);
                worst = worst.max(ex.iso_inv(&ex.iso(&x)?).max_abs_diff(&x));
            }
            let mut reports = vec![Report::from_samples("example1.roundtrip", vec![(worst, None)], 0.0, Some(seed))];
            reports.extend(ex.check_transport(samples, tol.min(1e-12), seed, exec));
            ctx.reports(&reports)
        }
    }
}

fn slot_name(s: Slot) -> &'static str {
    match s {
        Slot::A => "a",
        Slot::B => "b",
        Slot::APrime => "a'",
        Slot::BPrime => "b'",
        Slot::M => "m",
        Slot::MStar => "m*",
        Slot::N => "n",
        Slot::NStar => "n*",
        Slot::D => "d",
        Slot::DStar => "d*",
        Slot::R => "r",
        Slot::RStar => "r*",
        Slot::Alpha => "alpha",
        Slot::AlphaStar => "alpha*",
        Slot::AlphaPrime => "alpha'",
        Slot::AlphaPrimeStar => "alpha'*",
    }
}

/// Runs the CLI on `args` (including the program name). Returns the exit
/// code: 0 when every check passes, 1 on a failed check or bad input, 2 on
/// a usage error.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    let mut ctx = Ctx {
        out,
        json: cli.json,
        tol: cli.tol,
        samples: cli.samples,
        seed: cli.seed,
    };
    match execute(cli.command, &mut ctx) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
