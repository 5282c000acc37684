//! Paving experiments around diagonal symmetries of projections.
//!
//! * [`exact`]: rationals and `Q(sqrt(rho))` for exact certificates.
//! * [`linalg`]: floating frames, projections, symmetries and operator norms.
//! * [`weaver`]: the explicit counterexample projection and its exhaustive
//!   `(alpha, beta)` certificate against `||psp|| <= 2 delta_p`.
//! * [`rearrange`]: zero-sum rearrangement and the single-vector symmetry
//!   with `||psp(v)|| <= sqrt(2 delta_p + 3 delta_p^2)`.
//! * [`paving`]: exhaustive searches and seeded scans on random projections.
//! * [`report`]: JSON and CSV report envelopes shared by the CLI and FFI.

pub mod error;
pub mod exact;
pub mod linalg;
pub mod paving;
pub mod rearrange;
pub mod report;
pub mod weaver;

pub use error::{Error, Result};
pub use exact::{QuadExt, Rational};
pub use linalg::{OrthonormalFrame, Projection, SymmetricMatrix, Symmetry, Vector};
pub use weaver::{CertificateReport, Verdict, WeaverParams};
