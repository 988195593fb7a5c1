//! Three independent routes to `ψ(x)` plus the boost identities.

pub mod boost;
pub mod grid;
pub mod paraxial;
pub mod propagation;
pub mod quadrature;

pub use boost::{boosted_phase, comoving_phase, subluminal_rest_phase, superluminal_rest_phase};
pub use grid::{linspace, periodic_axis, Axis, FieldGrid, SpacetimePoint};
pub use paraxial::{eval_paraxial, ParaxialEnvelopeParams, ParaxialField};
pub use propagation::{eval_spectral_propagation, Propagation, PropagationOptions};
pub use quadrature::{eval_quadrature, QuadratureField};
