//! Mechanical checks for free-by-cyclic groups built as ascending HNN
//! extensions of free groups: free-group words, Stallings graphs, Tietze
//! scripts, abelianization, metric small cancellation and combinatorial
//! Morse theory on one-vertex presentation complexes.

pub mod morse;
pub mod presentations;
pub mod smallcancel;
pub mod stallings;
pub mod verify;
pub mod words;

pub use presentations::{parse, Presentation};
pub use words::{Alphabet, CyclicWord, Generator, Letter, WeightMap, Word};
