//! K-decompositions of matroids.
//!
//! A K-decomposition is a rooted binary tree over the ground set whose inner
//! nodes carry small color-merge tables; the rank of any subset is read off a
//! single bottom-up coloring pass. This crate builds such decompositions from
//! GF(q) representations plus branch-decompositions, checks that arbitrary
//! decompositions describe matroids, and computes Tutte polynomial data by
//! dynamic programming over the tree. Brute-force oracles for all of these
//! live in [`matroid::oracle`].

pub mod branch;
pub mod cli;
pub mod construct;
pub mod decomp;
pub mod gf;
pub mod matroid;
pub mod synthetic;
pub mod tutte;
pub mod verify;
