//! Cohomogeneity-one metrics of Spin(7) holonomy on ℝ⁴ bundles over S⁴.
//!
//! The core is generic over the coefficient field (see [`Scalar`]): `f64` for
//! numerics and exact [`BigRational`](num_rational::BigRational) arithmetic for
//! algebraic identities such as `d² = 0`, Ricci-flatness of flow data, the
//! superpotential identity and harmonic-form norms.

pub mod error;
pub mod jet;
mod linalg;
pub mod scalar;
pub mod triad;

pub mod closed_form_solutions;
pub mod curvature;
pub mod gradient_flow;
pub mod harmonic_forms;
pub mod invariant_forms;
pub mod metric_families;
pub mod ode;
pub mod quadrature;
pub mod report;
pub mod special;
pub mod spinor_calibration;

pub use error::{Error, Result};
pub use invariant_forms::{Form, Frame, Generator};
pub use jet::Jet;
pub use scalar::Scalar;
pub use triad::TriadJet;

pub type Exact = num_rational::BigRational;
pub type FormF = Form<f64>;
pub type FormQ = Form<Exact>;
pub type JetF = Jet<f64>;
pub type JetQ = Jet<Exact>;
pub type TriadF = TriadJet<f64>;
pub type TriadQ = TriadJet<Exact>;
