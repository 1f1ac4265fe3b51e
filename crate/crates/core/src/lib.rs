//! Computations with self-similar groups acting on rooted `d`-ary trees.
//!
//! Group elements are finite-state automorphisms kept in a canonical minimal
//! form, which makes the word problem a value comparison. On top of that sit
//! contraction and nucleus analysis, search and verification of non-Hausdorff
//! elements of the germinal groupoid, finite level quotients with stabilizer
//! chains, and activity growth of automata.

pub mod activity;
pub mod ball;
pub mod contraction;
pub mod error;
pub mod group;
pub mod hausdorff;
pub mod level_quotients;
pub mod perm_group;
pub mod registry;
pub mod report;
pub mod tree_words;
pub mod wreath;

pub use error::{Error, Result};
pub use group::{Family, FamilyParams, GeneratorDef, Group, GroupSpec};
pub use tree_words::{boundary_metric, Alphabet, BoundaryDistance, Cylinder, Ray, Word};
pub use wreath::{Automaton, Element, GenLetter, GroupWord, IdentityCheck, LevelNormalForm};

/// Schema tag carried by every JSON document the crate emits.
pub const SCHEMA: &str = "germlab/1";
