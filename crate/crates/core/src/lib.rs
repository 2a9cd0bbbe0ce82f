//! Finite-dimensional Fell bundles and double Fell bundles as dense complex
//! linear algebra, with checkers for every axiom system involved.
//!
//! - [`cxmat`]: complex matrices, Jacobi eigensolver, norms, Gram quotients
//! - [`groupoid`]: pair groupoids and rectangular double groupoids with folding
//! - [`fell`]: Fell bundles, sections, linking algebras, saturation
//! - [`dfell`]: square sections, horizontal/vertical composition, unions,
//!   the double *-algebra checks and the one-square example
//! - [`gns`]: GNS representations from density-matrix states
//! - [`dual`]: the conjugation `J` and the transposed dual category
//! - [`shell`]: descriptor files and the `dfb` command line

pub mod cxmat;
pub mod dfell;
pub mod dual;
pub mod error;
pub mod exec;
pub mod fell;
pub mod gns;
pub mod groupoid;
pub mod report;
pub mod shell;

pub use cxmat::{Cx, Mat};
pub use error::{Error, Result};
pub use exec::Exec;
pub use report::{Report, Status};
