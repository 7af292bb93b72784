//! Even/odd exterior differential forms, oriented-chain integration, flows
//! and convective derivatives on flat affine space, and the Galilei-invariant
//! induction laws of electromagnetism for bodies in motion built on top of
//! them.
//!
//! The crate is organized bottom-up:
//!
//! - [`exterior`]: pointwise k-covectors with even/odd parity, the metric and
//!   volume form, and the vector/form correspondences of flat 3-space.
//! - [`fields`]: sampled form fields, the exterior derivative, Lie
//!   derivatives via the Cartan formula, and grad/curl/div.
//! - [`chains`]: oriented simplicial chains, the boundary operators and the
//!   inner/outer Riemann integrals with their sign laws.
//! - [`flows`]: motions, relative motions (Galilei boosts), pull-backs,
//!   convective time-derivatives and the transport identities.
//! - [`poincare`]: homotopy potentials of closed forms on star-shaped
//!   domains.
//! - [`induction`]: the electromagnetic state bundle and the residual
//!   evaluators for the Faraday/Ampere/Gauss laws, charge balance,
//!   constitutive relations and the Poynting identity.
//! - [`spacetime`]: the classical 4D affine space-time split and the
//!   equivalence of two-form closedness with the 3D laws.
//! - [`scenarios`]: the canonical worked scenarios (translating body,
//!   sliding bar, Faraday disc), the custom verification harness and the
//!   self-test battery behind the CLI.

pub mod chains;
pub mod induction;
pub mod error;
pub mod exterior;
pub mod fields;
pub mod flows;
pub mod linalg;
pub mod poincare;
pub mod scenarios;
pub mod spacetime;
pub mod specfile;
pub mod poly;

pub use error::{Error, Result};
