//! Algebra of finite-state tree automorphisms: evaluation, sections, products,
//! inverses, powers, minimization and the word problem.

mod automaton;
mod element;
mod intern;

pub use automaton::{check_permutation, Automaton, MachineState, RawMachine};
pub use element::{
    Element, GenLetter, GroupWord, IdentityCheck, LevelNormalForm, MAX_TRACKED_WORD,
};
pub(crate) use element::walk_along_ray;
pub use intern::{ElementId, InternTable};
