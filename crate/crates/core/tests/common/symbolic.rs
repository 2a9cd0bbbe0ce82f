//! Hand-transcribed symbolic layouts of composites, unions and duals.
//!
//! Every symbol is a distinct prime, so each output entry factors uniquely
//! into the symbols it was built from. Symbols shared by two squares (a
//! common vertex or edge) carry the same prime in both.

use std::collections::BTreeMap;

use dfb_core::cxmat::{Cx, Mat};
use dfb_core::dfell::{
    compose4, hcompose, union, vcompose, CompositionMode, DoubleFellBundle, GradedElement, Order, Slot,
    SquareSection, UnionDir,
};
use dfb_core::dual::dual_square_section;
use dfb_core::groupoid::{DoubleGroupoid, SquareId};

const SYMBOLS: &[&str] = &[
    "a", "b", "c", "a'", "b'", "c'", "a''", "b''", "c''", "m", "n", "o", "p", "q", "r", "d1", "d2", "r1", "r2",
    "r3", "r4", "al1", "al2", "al3", "al4", "al1'", "al2'", "al3'", "al4'",
];

fn primes(count: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut k = 2u64;
    while out.len() < count {
        if (2..k).take_while(|d| d * d <= k).all(|d| !k.is_multiple_of(d)) {
            out.push(k);
        }
        k += 1;
    }
    out
}

/// Prime for every symbol and its starred partner. `d3`/`d4` are the same
/// edges as `r1`/`r2`.
fn table() -> BTreeMap<String, u64> {
    let ps = primes(2 * SYMBOLS.len());
    let mut t = BTreeMap::new();
    for (k, s) in SYMBOLS.iter().enumerate() {
        t.insert(s.to_string(), ps[2 * k]);
        t.insert(format!("{s}*"), ps[2 * k + 1]);
    }
    for (alias, of) in [("d3", "r1"), ("d4", "r2")] {
        let (v, vs) = (t[of], t[&format!("{of}*")]);
        t.insert(alias.into(), v);
        t.insert(format!("{alias}*"), vs);
    }
    t
}

fn value(t: &BTreeMap<String, u64>, entry: &str) -> f64 {
    entry
        .split_whitespace()
        .map(|tok| *t.get(tok).unwrap_or_else(|| panic!("unknown symbol {tok}")) as f64)
        .product()
}

/// Symbol names in `Slot::ALL` order for a square whose frame vertices are
/// named `v`, with edges (m, n, d, r) and 2-cell index `k`.
fn names(v: [&str; 4], m: &str, n: &str, d: &str, r: &str, k: usize) -> [String; 16] {
    let s = |x: &str| x.to_string();
    let st = |x: &str| format!("{x}*");
    [
        s(v[0]),
        s(v[1]),
        s(v[2]),
        s(v[3]),
        s(m),
        st(m),
        s(n),
        st(n),
        s(d),
        st(d),
        s(r),
        st(r),
        format!("al{k}"),
        format!("al{k}*"),
        format!("al{k}'"),
        format!("al{k}'*"),
    ]
}

struct Grid {
    bundle: DoubleFellBundle,
    t: BTreeMap<String, u64>,
}

impl Grid {
    fn new(rows: usize, cols: usize) -> Grid {
        Grid {
            bundle: DoubleFellBundle::line(DoubleGroupoid::grid(rows, cols, true).unwrap()),
            t: table(),
        }
    }

    fn square(&self, row: usize, col: usize, names: [String; 16]) -> SquareSection {
        let values: [Cx; 16] = std::array::from_fn(|k| Cx::new(self.t[&names[k]] as f64, 0.0));
        self.bundle.scalar_section(SquareId::new(row, col), &values).unwrap()
    }

    fn s1(&self) -> SquareSection {
        self.square(0, 0, names(["a", "b", "a'", "b'"], "m", "n", "d1", "r1", 1))
    }

    fn s2(&self) -> SquareSection {
        self.square(0, 1, names(["a'", "b'", "a''", "b''"], "n", "o", "d2", "r2", 2))
    }

    fn s3(&self, row: usize) -> SquareSection {
        self.square(row, 0, names(["b", "c", "b'", "c'"], "p", "q", "d3", "r3", 3))
    }

    fn s4(&self) -> SquareSection {
        self.square(1, 1, names(["b'", "c'", "b''", "c''"], "q", "r", "d4", "r4", 4))
    }

    fn layout<const K: usize>(&self, x: &GradedElement, expected: [[&str; K]; K]) -> Outcome {
        let p = x.payload().ok_or("composite is zero")?;
        if p.size() != K {
            return Err(format!("expected {K} vertices, found {}", p.size()));
        }
        for i in 0..K {
            for j in 0..K {
                let got = p.block(i, j)[(0, 0)];
                let want = value(&self.t, expected[i][j]);
                if got != Cx::new(want, 0.0) {
                    return Err(format!("entry ({}, {}) should be {}", i + 1, j + 1, expected[i][j]));
                }
            }
        }
        Ok(())
    }
}

pub type Outcome = Result<(), String>;

const LENIENT: CompositionMode = CompositionMode::Lenient;

fn err(e: dfb_core::Error) -> String {
    e.to_string()
}

pub fn horizontal_composite_of_top_row() -> Outcome {
    let g = Grid::new(2, 2);
    let x = hcompose(&g.s1(), &g.s2(), LENIENT).map_err(err)?;
    g.layout(
        &x,
        [
            ["a", "m*", "d2* d1*", "al2* al1*"],
            // (2, 4) is (r1 r2)*; the displayed r1* would break the involution.
            ["m", "b", "al2'* al1'*", "r2* r1*"],
            ["d1 d2", "al1' al2'", "a''", "o*"],
            ["al1 al2", "r1 r2", "o", "b''"],
        ],
    )
}

pub fn horizontal_composite_of_bottom_row() -> Outcome {
    let g = Grid::new(2, 2);
    let x = hcompose(&g.s3(1), &g.s4(), LENIENT).map_err(err)?;
    g.layout(
        &x,
        [
            ["b", "p*", "d4* d3*", "al4* al3*"],
            ["p", "c", "al4'* al3'*", "r4* r3*"],
            ["d3 d4", "al3' al4'", "b''", "r*"],
            ["al3 al4", "r3 r4", "r", "c''"],
        ],
    )
}

pub fn vertical_composite_of_left_column() -> Outcome {
    let g = Grid::new(2, 2);
    let x = vcompose(&g.s1(), &g.s3(1), LENIENT).map_err(err)?;
    g.layout(
        &x,
        [
            ["a", "p* m*", "d1*", "al3* al1*"],
            ["m p", "c", "al3'* al1'*", "r3*"],
            ["d1", "al1' al3'", "a'", "q* n*"],
            ["al1 al3", "r3", "n q", "c'"],
        ],
    )
}

pub fn vertical_composite_of_right_column() -> Outcome {
    let g = Grid::new(2, 2);
    let x = vcompose(&g.s2(), &g.s4(), LENIENT).map_err(err)?;
    g.layout(
        &x,
        [
            ["a'", "q* n*", "d2*", "al4* al2*"],
            ["n q", "c'", "al4'* al2'*", "r4*"],
            ["d2", "al2' al4'", "a''", "r* o*"],
            ["al2 al4", "r4", "o r", "c''"],
        ],
    )
}

pub fn block_composite_in_both_orders() -> Outcome {
    let g = Grid::new(2, 2);
    let (s1, s2, s3, s4) = (g.s1(), g.s2(), g.s3(1), g.s4());
    let expected = [
        ["a", "p* m*", "d2* d1*", "al4* al3* al2* al1*"],
        ["m p", "c", "al4'* al3'* al2'* al1'*", "r4* r3*"],
        ["d1 d2", "al1' al2' al3' al4'", "a''", "r* o*"],
        ["al1 al2 al3 al4", "r3 r4", "o r", "c''"],
    ];
    for order in [Order::HThenV, Order::VThenH] {
        let x = compose4([&s1, &s2, &s3, &s4], order, LENIENT).map_err(err)?;
        g.layout(&x, expected).map_err(|e| format!("{order:?}: {e}"))?;
    }
    Ok(())
}

pub fn horizontal_union() -> Outcome {
    let g = Grid::new(1, 2);
    let x = union(&g.s1(), &g.s2(), UnionDir::Horizontal).map_err(err)?;
    g.layout(
        &x,
        [
            ["a", "m*", "d1*", "al1*", "d2* d1*", "al2* al1*"],
            ["m", "b", "al1'*", "r1*", "al2'* al1'*", "r2* r1*"],
            ["d1", "al1'", "a'", "n*", "d2*", "al2*"],
            ["al1", "r1", "n", "b'", "al2'*", "r2*"],
            ["d1 d2", "al1' al2'", "d2", "al2'", "a''", "o*"],
            ["al1 al2", "r1 r2", "al2", "r2", "o", "b''"],
        ],
    )
}

pub fn vertical_union() -> Outcome {
    let g = Grid::new(2, 1);
    let x = union(&g.s1(), &g.s3(1), UnionDir::Vertical).map_err(err)?;
    g.layout(
        &x,
        [
            ["a", "m*", "p* m*", "d1*", "al1*", "al3* al1*"],
            ["m", "b", "p*", "al1'*", "d3*", "al3*"],
            ["m p", "p", "c", "al3'* al1'*", "al3'*", "r3*"],
            ["d1", "al1'", "al1' al3'", "a'", "n*", "q* n*"],
            ["al1", "d3", "al3'", "n", "b'", "q*"],
            ["al1 al3", "al3", "r3", "n q", "q", "c'"],
        ],
    )
}

pub fn horizontal_union_of_all_ones_is_all_ones() -> Outcome {
    let b = DoubleFellBundle::line(DoubleGroupoid::grid(1, 2, true).unwrap());
    let ones = [Cx::new(1.0, 0.0); 16];
    let s1 = b.scalar_section(SquareId::new(0, 0), &ones).unwrap();
    let s2 = b.scalar_section(SquareId::new(0, 1), &ones).unwrap();
    let m = union(&s1, &s2, UnionDir::Horizontal).map_err(err)?.assemble();
    if m != Some(Mat::from_fn(6, 6, |_, _| Cx::new(1.0, 0.0))) {
        return Err("union of all-ones sections is not all ones".into());
    }
    Ok(())
}

/// The dual of a section whose upper triangle holds the conjugates of its
/// lower triangle: transposes above the diagonal, conjugates below.
pub fn dual_section_layout() -> Outcome {
    let b = DoubleFellBundle::line(DoubleGroupoid::grid(1, 1, true).unwrap());
    let t = table();
    let z = |s: &str| Cx::new(t[s] as f64, t[&format!("{s}*")] as f64);
    let lower = |s: &str| z(s);
    let upper = |s: &str| z(s).conj();
    let x = b
        .section_from_fn(SquareId::new(0, 0), |slot, _| {
            let v = match slot {
                Slot::A => z("a"),
                Slot::B => z("b"),
                Slot::APrime => z("a'"),
                Slot::BPrime => z("b'"),
                Slot::M => lower("m"),
                Slot::MStar => upper("m"),
                Slot::N => lower("n"),
                Slot::NStar => upper("n"),
                Slot::D => lower("d1"),
                Slot::DStar => upper("d1"),
                Slot::R => lower("r1"),
                Slot::RStar => upper("r1"),
                Slot::Alpha => lower("al1"),
                Slot::AlphaStar => upper("al1"),
                Slot::AlphaPrime => lower("al1'"),
                Slot::AlphaPrimeStar => upper("al1'"),
            };
            Mat::scalar(v)
        })
        .unwrap();
    // "s^t" is the transpose (a plain copy for scalars), "bar s" the conjugate.
    let expected = [
        ["a^t", "m^t", "d1^t", "al1^t"],
        ["bar m", "b^t", "al1'^t", "r1^t"],
        ["bar d1", "bar al1'", "a'^t", "n^t"],
        ["bar al1", "bar r1", "bar n", "b'^t"],
    ];
    let d = dual_square_section(&x);
    for i in 0..4 {
        for j in 0..4 {
            let e = expected[i][j];
            let want = match e.strip_prefix("bar ") {
                Some(s) => z(s).conj(),
                None => z(e.trim_end_matches("^t")),
            };
            if d.payload().block(i, j)[(0, 0)] != want {
                return Err(format!("({}, {}) should be {e}", i + 1, j + 1));
            }
        }
    }
    if dual_square_section(&d) != x {
        return Err("dual of the dual differs from the section".into());
    }
    Ok(())
}

/// Every symbolic layout, by name.
pub fn all() -> Vec<(&'static str, Outcome)> {
    vec![
        ("horizontal composite, top row", horizontal_composite_of_top_row()),
        ("horizontal composite, bottom row", horizontal_composite_of_bottom_row()),
        ("vertical composite, left column", vertical_composite_of_left_column()),
        ("vertical composite, right column", vertical_composite_of_right_column()),
        ("2x2 block composite", block_composite_in_both_orders()),
        ("horizontal union", horizontal_union()),
        ("vertical union", vertical_union()),
        ("dual section", dual_section_layout()),
    ]
}
