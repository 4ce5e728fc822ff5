//! Session automata over data words: symbolic normal forms, canonical
//! automata, language operations and active learning.

pub mod automaton;
pub mod canonical;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod langops;
pub mod learner;
pub mod symbolic;
pub mod words;

pub use automaton::{Automaton, AutomatonClass, Diagnostic, StateId, Transition};
pub use error::{Error, Result};
pub use symbolic::{SymbolicDfa, SymbolicNfa};
pub use words::{
    DataLetter, DataValue, DataWord, Label, OpKind, RegisterOp, SymbolicWord, TransitionLabel,
};
