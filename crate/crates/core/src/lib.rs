//! Exact and numeric toolkit for Borcherds products attached to Del Pezzo
//! lattices, the Eguchi–Hanson instanton, and zeta-regularized torsion
//! identities for log-Enriques surfaces.
//!
//! Module map:
//! - [`qseries`]: exact Laurent q-series and the Borcherds exponent series.
//! - [`lattice`]: integral lattices, complements, enumeration, embeddings.
//! - [`delpezzo`]: Picard and Mukai lattices of Del Pezzo surfaces.
//! - [`borcherds`]: evaluation of the product on the tube domain.
//! - [`ehgeometry`]: Eguchi–Hanson potential, metric and curvature.
//! - [`spectral`]: Hurwitz zeta, torsion zeta functions, cone zeta.
//! - [`invariants`]: assemblers for the torsion invariants.

pub mod borcherds;
pub mod delpezzo;
pub mod ehgeometry;
pub mod invariants;
pub mod lattice;
pub mod qseries;
pub mod spectral;
