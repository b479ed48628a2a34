//! Exact computer algebra for the colored Jones function of the figure-eight
//! knot and its (r,2)-cables: Laurent polynomial arithmetic, the quantum torus,
//! inhomogeneous recurrence fitting, and machine-checked AJ certificates.

pub mod apoly;
pub mod jones;
pub mod laurent;
pub mod linalg;
pub mod probes;
pub mod qtorus;
pub mod recurrence;
pub mod serial;

mod dense;

pub use apoly::AJReport;
pub use jones::JonesSequence;
pub use laurent::{LaurentPoly1, LaurentPoly2, RationalFunc1};
pub use qtorus::{CommutativeMLPoly, MPoly, QTorusOperator};
pub use recurrence::{AnnihilatorCertificate, InhomogeneousFit};
