//! Two exchange-symmetric two-level atoms coupled to one f-deformed cavity mode
//! through `2k`-photon transitions, with a deformed Kerr medium and
//! intensity-dependent Stark shifts.
//!
//! The crate evolves the state in closed form, manifold by manifold, and
//! computes the atom-field von Neumann entropy, the one-atom tangle and the
//! atom-atom concurrence. [`oracle`] provides an independent dense evolution
//! used to certify the closed form.

pub mod algebra;
pub mod cli;
pub mod cubic;
pub mod density;
pub mod dynamics;
pub mod error;
pub mod measures;
pub mod model;
pub mod oracle;
pub mod pipeline;

pub use error::{Error, Result};
pub use model::{DeformationFunction, ModelParams, Picture, ScenarioLabel, ScenarioPreset};
