//! Exact computations in generalized Brin-Thompson groups `V_{k_1,...,k_m}`
//! acting on products of Cantor spaces.
//!
//! The layers build on each other:
//!
//! * [`words`] and [`point`]: finite words, word tuples and eventually periodic points;
//! * [`clopen`]: exact clopen algebra over multicylinders;
//! * [`table`]: tables, composition, supports and localization;
//! * [`analysis`]: localized subgroups and bounded algebraic-disjointness searches;
//! * [`embedding`]: coordinatewise embeddings and their anchor projections;
//! * [`limits`]: nested cylinder chains and the limit points they determine;
//! * [`io`]: JSON file formats.

pub mod analysis;
pub mod clopen;
pub mod embedding;
pub mod error;
pub mod io;
pub mod limits;
pub mod point;
pub mod table;
pub mod words;

pub use clopen::{is_partition, Clopen, Measure, MultiCylinder};
pub use error::{Error, Result, TableSide};
pub use point::{EventuallyPeriodic, RationalPoint};
pub use table::{random_element, validate, Element, FixedLocus, Row, Table};
pub use words::{prefix_compare, PrefixOrder, Signature, Word, WordTuple};
