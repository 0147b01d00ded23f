//! Exact decision and construction for systems of integral congruences
//! `x_j - x_i = a_ij (mod gcd(i,j))` and their degree-n generalizations,
//! together with the cohomological machinery that explains them: cochain
//! complexes attached to families of subgroups of a finitely generated
//! abelian group, refinement maps and explicit homotopies, and an ordering
//! homotopy on singular chains that reduces everything to increasing tuples.
//!
//! All arithmetic is exact (`num_bigint::BigInt`); nothing here floats.

pub mod intlin;
pub mod abgroup;
pub mod homology;
pub mod cochain;
pub mod simplicial;
pub mod solver;
pub mod lattice;
pub mod cli;
