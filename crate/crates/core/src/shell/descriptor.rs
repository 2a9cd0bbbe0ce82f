//! JSON bundle descriptors.
//!
//! ```json
//! {
//!   "base": {"kind": "grid", "rows": 1, "cols": 1, "folding": true},
//!   "dims": [1, 1, 1, 1],
//!   "sections": {"s1": {"u:0": [[[1, 0]]], "sq:0,0": [[[0, 2]]]}}
//! }
//! ```
//!
//! Objects (and grid vertices, numbered row by row) are referred to by
//! index. Arrow keys: `u:A` is the unit at `A`, `a:A>B` the arrow `A -> B`.
//! On grids, `e:h:r,c` is the horizontal edge leaving vertex `(r, c)`,
//! `e:v:r,c` the vertical one, `sq:r,c` the 2-cell from the top-left to the
//! bottom-right corner of square `(r, c)`, and `sq2:r,c` the one from its
//! bottom-left to its top-right corner. Scalars are `[re, im]` pairs and
//! matrices are row-major nested arrays.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cxmat::{Cx, Mat};
use crate::dfell::{DoubleFellBundle, SquareSection};
use crate::error::{Error, Result};
use crate::fell::{FellBundle, Section};
use crate::groupoid::{DoubleGroupoid, ObjectId, SquareId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BaseSpec {
    Pair { n: usize },
    Grid { rows: usize, cols: usize, folding: bool },
}

/// A matrix as row-major nested `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixSpec(pub Vec<Vec<[f64; 2]>>);

impl MatrixSpec {
    pub fn from_mat(m: &Mat) -> Self {
        MatrixSpec(
            m.to_rows()
                .into_iter()
                .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        )
    }

    pub fn to_mat(&self) -> Result<Mat> {
        let rows = self
            .0
            .iter()
            .map(|row| row.iter().map(|&[re, im]| Cx::new(re, im)).collect())
            .collect();
        let m = Mat::from_rows(rows)?;
        m.check_finite()?;
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleDescriptor {
    pub base: BaseSpec,
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sections: BTreeMap<String, BTreeMap<String, MatrixSpec>>,
}

/// The base a descriptor resolves to.
#[derive(Debug, Clone)]
pub enum Base {
    Pair(FellBundle),
    Grid(DoubleFellBundle),
}

fn located(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Descriptor {
        location: location.into(),
        message: message.into(),
    }
}

/// Parses and validates a descriptor. Syntax and type errors carry the
/// line and column of the offending token; semantic errors carry the path
/// of the offending entry.
pub fn parse_descriptor(text: &str) -> Result<BundleDescriptor> {
    let d: BundleDescriptor = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    d.validate()?;
    Ok(d)
}

pub fn serialize_descriptor(d: &BundleDescriptor) -> String {
    serde_json::to_string_pretty(d).expect("descriptor is always serializable")
}

fn parse_index(s: &str, location: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| located(location, format!("expected an index, found {s:?}")))
}

fn parse_pair(s: &str, location: &str) -> Result<(usize, usize)> {
    let (r, c) = s
        .split_once(',')
        .ok_or_else(|| located(location, format!("expected r,c, found {s:?}")))?;
    Ok((parse_index(r, location)?, parse_index(c, location)?))
}

impl BundleDescriptor {
    pub fn base(&self) -> Result<Base> {
        match self.base {
            BaseSpec::Pair { n } => {
                if self.dims.len() != n {
                    return Err(located("dims", format!("{} entries for {n} objects", self.dims.len())));
                }
                FellBundle::pair(&self.dims)
                    .map(Base::Pair)
                    .map_err(|e| located("base", e.to_string()))
            }
            BaseSpec::Grid { rows, cols, folding } => {
                let dg = DoubleGroupoid::grid(rows, cols, folding).map_err(|e| located("base", e.to_string()))?;
                if self.dims.len() != dg.vertex_count() {
                    return Err(located(
                        "dims",
                        format!("{} entries for {} vertices", self.dims.len(), dg.vertex_count()),
                    ));
                }
                DoubleFellBundle::new(dg, self.dims.clone())
                    .map(Base::Grid)
                    .map_err(|e| located("dims", e.to_string()))
            }
        }
    }

    /// The Fell bundle checked by the 1-categorical commands: the bundle
    /// itself for pair bases, the folded vertex bundle for grids.
    pub fn fell_bundle(&self) -> Result<FellBundle> {
        match self.base()? {
            Base::Pair(b) => Ok(b),
            Base::Grid(d) => d.folded_bundle().map_err(|e| located("base.folding", e.to_string())),
        }
    }

    pub fn double_bundle(&self) -> Result<DoubleFellBundle> {
        match self.base()? {
            Base::Grid(d) => Ok(d),
            Base::Pair(_) => Err(located("base.kind", "a grid base is required")),
        }
    }

    /// Resolves an arrow key to `(source, target)` objects.
    fn resolve_key(&self, key: &str, location: &str) -> Result<(ObjectId, ObjectId)> {
        let objects = self.dims.len();
        let check = |v: usize| {
            if v < objects {
                Ok(v)
            } else {
                Err(located(location, format!("unknown object {v}")))
            }
        };
        if let Some(a) = key.strip_prefix("u:") {
            let a = check(parse_index(a, location)?)?;
            return Ok((a, a));
        }
        if let Some(rest) = key.strip_prefix("a:") {
            let (a, b) = rest
                .split_once('>')
                .ok_or_else(|| located(location, format!("malformed arrow key {key:?}")))?;
            if let BaseSpec::Grid { folding: false, .. } = self.base {
                return Err(located(location, "arrow keys on a grid require folding"));
            }
            return Ok((check(parse_index(a, location)?)?, check(parse_index(b, location)?)?));
        }
        let BaseSpec::Grid { rows, cols, .. } = self.base else {
            return Err(located(location, format!("unknown arrow key {key:?} for a pair base")));
        };
        let vertex = |r: usize, c: usize| r * (cols + 1) + c;
        let in_square = |r: usize, c: usize| {
            if r < rows && c < cols {
                Ok(())
            } else {
                Err(located(location, format!("square {r},{c} outside the grid")))
            }
        };
        if let Some(rc) = key.strip_prefix("e:h:") {
            let (r, c) = parse_pair(rc, location)?;
            if r > rows || c >= cols {
                return Err(located(location, format!("horizontal edge {r},{c} outside the grid")));
            }
            return Ok((vertex(r, c), vertex(r, c + 1)));
        }
        if let Some(rc) = key.strip_prefix("e:v:") {
            let (r, c) = parse_pair(rc, location)?;
            if r >= rows || c > cols {
                return Err(located(location, format!("vertical edge {r},{c} outside the grid")));
            }
            return Ok((vertex(r, c), vertex(r + 1, c)));
        }
        if let Some(rc) = key.strip_prefix("sq:") {
            let (r, c) = parse_pair(rc, location)?;
            in_square(r, c)?;
            return Ok((vertex(r, c), vertex(r + 1, c + 1)));
        }
        if let Some(rc) = key.strip_prefix("sq2:") {
            let (r, c) = parse_pair(rc, location)?;
            in_square(r, c)?;
            return Ok((vertex(r + 1, c), vertex(r, c + 1)));
        }
        Err(located(location, format!("unknown arrow key {key:?}")))
    }

    /// Resolved entries of a named section, keyed by `(source, target)`.
    pub fn entries(&self, name: &str) -> Result<BTreeMap<(ObjectId, ObjectId), Mat>> {
        let raw = self
            .sections
            .get(name)
            .ok_or_else(|| located(format!("sections.{name}"), "no such section"))?;
        let mut out = BTreeMap::new();
        for (key, spec) in raw {
            let location = format!("sections.{name}.{key}");
            let (src, dst) = self.resolve_key(key, &location)?;
            let m = spec.to_mat().map_err(|e| located(&location, e.to_string()))?;
            let expected = (self.dims[dst], self.dims[src]);
            if m.shape() != expected {
                return Err(located(
                    &location,
                    format!("expected a {}x{} matrix, found {}x{}", expected.0, expected.1, m.rows(), m.cols()),
                ));
            }
            if out.insert((src, dst), m).is_some() {
                return Err(located(&location, "arrow given twice"));
            }
        }
        Ok(out)
    }

    /// A named section of a pair (or folded grid) base as a groupoid section.
    pub fn fell_section(&self, name: &str) -> Result<(FellBundle, Section)> {
        let b = self.fell_bundle()?;
        let entries = self
            .entries(name)?
            .into_iter()
            .map(|((s, t), m)| (b.base().between(s, t).expect("pair groupoid"), m))
            .collect();
        let s = Section::from_entries(&b, entries).map_err(|e| located(format!("sections.{name}"), e.to_string()))?;
        Ok((b, s))
    }

    /// The square a grid section lives on: the only square whose corners
    /// contain every referenced vertex, or the one named by an `sq` key.
    pub fn section_square(&self, name: &str) -> Result<SquareId> {
        let d = self.double_bundle()?;
        let dg = d.groupoid();
        let location = format!("sections.{name}");
        let keys = &self.sections.get(name).ok_or_else(|| located(&location, "no such section"))?;
        let pinned: BTreeSet<SquareId> = keys
            .keys()
            .filter_map(|k| k.strip_prefix("sq:").or_else(|| k.strip_prefix("sq2:")))
            .map(|rc| parse_pair(rc, &location).map(|(r, c)| SquareId::new(r, c)))
            .collect::<Result<_>>()?;
        let touched: BTreeSet<ObjectId> = self.entries(name)?.keys().flat_map(|&(s, t)| [s, t]).collect();
        let candidates: Vec<SquareId> = dg
            .squares()
            .into_iter()
            .filter(|&q| {
                let corners = dg.square_vertices(q);
                touched.iter().all(|v| corners.contains(v)) && (pinned.is_empty() || pinned.contains(&q))
            })
            .collect();
        match candidates.as_slice() {
            [q] => Ok(*q),
            [] => Err(located(location, "entries do not fit inside a single square")),
            _ => Err(located(
                location,
                "entries do not determine a unique square; add an sq:r,c entry",
            )),
        }
    }

    pub fn square_section(&self, name: &str) -> Result<SquareSection> {
        let d = self.double_bundle()?;
        let q = self.section_square(name)?;
        let entries = self.entries(name)?;
        let corners = d.groupoid().square_vertices(q);
        d.section_from_fn(q, |slot, (r, c)| {
            let (i, j) = slot.position();
            entries
                .get(&(corners[j], corners[i]))
                .cloned()
                .unwrap_or_else(|| Mat::zeros(r, c))
        })
    }

    fn validate(&self) -> Result<()> {
        let base = self.base()?;
        for name in self.sections.keys() {
            self.entries(name)?;
            if let Base::Grid(_) = base {
                self.section_square(name)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_pair_descriptor() {
        let d = parse_descriptor(r#"{"base":{"kind":"pair","n":2},"dims":[2,2]}"#).unwrap();
        let b = d.fell_bundle().unwrap();
        assert_eq!(b.dims(), &[2, 2]);
        assert_eq!(b.base().arrow_count(), 4);
    }

    #[test]
    fn syntax_error_has_position() {
        let text = "{\"base\": {\"kind\": \"pair\", \"n\": 2},\n \"dims\": [2, 2}";
        match parse_descriptor(text) {
            Err(Error::Syntax { line, column, .. }) => {
                assert_eq!(line, 2);
                assert!(column > 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shape_mismatch_has_location() {
        let text = r#"{"base":{"kind":"pair","n":2},"dims":[1,2],
            "sections":{"s":{"a:0>1":[[[1,0]]]}}}"#;
        match parse_descriptor(text) {
            Err(Error::Descriptor { location, .. }) => assert_eq!(location, "sections.s.a:0>1"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_arrow_is_rejected() {
        let text = r#"{"base":{"kind":"pair","n":2},"dims":[1,1],"sections":{"s":{"a:0>5":[[[1,0]]]}}}"#;
        assert!(matches!(parse_descriptor(text), Err(Error::Descriptor { .. })));
        let text = r#"{"base":{"kind":"pair","n":2},"dims":[1,1],"sections":{"s":{"sq:0,0":[[[1,0]]]}}}"#;
        assert!(matches!(parse_descriptor(text), Err(Error::Descriptor { .. })));
    }

    #[test]
    fn grid_keys_resolve_to_square_slots() {
        use crate::dfell::Slot;
        let text = r#"{"base":{"kind":"grid","rows":1,"cols":1,"folding":true},"dims":[1,1,1,1],
            "sections":{"s":{"sq:0,0":[[[2,0]]],"sq2:0,0":[[[3,0]]],"e:h:1,0":[[[5,0]]],"e:v:0,1":[[[7,0]]],"a:3>1":[[[11,0]]]}}}"#;
        let d = parse_descriptor(text).unwrap();
        let s = d.square_section("s").unwrap();
        let val = |slot| s.get(slot)[(0, 0)].re;
        assert_eq!(val(Slot::Alpha), 2.0);
        assert_eq!(val(Slot::AlphaPrime), 3.0);
        assert_eq!(val(Slot::R), 5.0);
        assert_eq!(val(Slot::N), 7.0);
        assert_eq!(val(Slot::NStar), 11.0);
        assert_eq!(val(Slot::A), 0.0);
    }

    #[test]
    fn ambiguous_square_is_reported() {
        let text = r#"{"base":{"kind":"grid","rows":1,"cols":2,"folding":true},"dims":[1,1,1,1,1,1],
            "sections":{"s":{"e:v:0,1":[[[1,0]]]}}}"#;
        assert!(matches!(parse_descriptor(text), Err(Error::Descriptor { .. })));
    }

    #[test]
    fn round_trip() {
        let text = r#"{"base":{"kind":"grid","rows":1,"cols":2,"folding":true},"dims":[1,1,1,1,1,1],
            "sections":{"s":{"sq:0,1":[[[0.1,-3e-7]]]}}}"#;
        let d = parse_descriptor(text).unwrap();
        assert_eq!(parse_descriptor(&serialize_descriptor(&d)).unwrap(), d);
    }
}
