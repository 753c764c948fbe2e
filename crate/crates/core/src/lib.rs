//! Trace equivalence for programs with non-local control flow.
//!
//! Programs with `goto`, `break`, `return` and a single indicator variable
//! are compiled into CF-GKAT automata, lowered to GKAT automata (one per
//! starting indicator value) and compared by bisimulation. A bounded,
//! brute-force implementation of the denotational semantics lives in
//! [`oracle`] and is used to validate the automaton pipeline.
//!
//! ```
//! use cfgkat::syntax::{BExp, Exp};
//!
//! // x := 1 and skip have the same traces
//! let report = cfgkat::driver::equiv(&Exp::assign(1), &Exp::assert(BExp::True)).unwrap();
//! assert!(report.verdict);
//! ```

pub mod automata;
pub mod boolean;
pub mod cli;
pub mod driver;
pub mod error;
pub mod frontend;
pub mod gkat;
pub mod oracle;
pub mod syntax;
pub mod thompson;
pub mod word;

pub use error::Error;
