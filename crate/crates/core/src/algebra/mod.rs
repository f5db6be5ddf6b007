//! Exact SL₂(ℤ) arithmetic, the alphabet grading and the truncated
//! noncommutative series ring.

mod alphabet;
mod group;
mod ncpoly;

pub use alphabet::{Alphabet, HalfInteger, Letter, Monomial, MultiplierSpec};
pub use group::{Cusp, Generator, GroupElement, Sign, Word, WordLetter};
pub use ncpoly::{Grading, NcPoly};
