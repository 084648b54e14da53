//! Γ₀(N) coset enumeration, reduction to the standard domain, cusp
//! sectors and cuspidal zones, and hyperbolic quadrature over Γ₀(N)\ℍ.
//!
//! The cuspidal zone at a cusp 𝔞 of height Y is σ_𝔞{0 < x ≤ 1, y > Y}.

mod cosets;
mod grid;
mod mat;

pub use cosets::{
    coset_reps, cuspidal_zone_membership, in_gamma0, locate, volume, CosetList, Cusp, CuspLabel, Location,
};
pub use grid::{integrate, integrate_refined, BaseNode, GridIntegral, GridPoint, GridSpec, QuadratureGrid};
pub use mat::{reduce, Mat2};
