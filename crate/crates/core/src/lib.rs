//! Exact computations around the Hasse invariant on Hilbert modular varieties
//! in characteristic `p`, over small finite fields.

pub mod cli;
pub mod exactla;
pub mod field;
pub mod hilbzip;
pub mod schubert;
pub mod weylchar;
pub mod zipgroup;

pub use exactla::{Matrix, SemilinearMap, Subspace};
pub use field::{FieldCtx, FieldElem};
pub use hilbzip::{check_equivalence, HilbertZip, ZipReport};
pub use schubert::{GroupElem, MultiPoly, Order};
pub use weylchar::{Character, CocharDatum, Perm, WeylElem};
pub use zipgroup::{OrbitPartition, ZipGroupElem};
