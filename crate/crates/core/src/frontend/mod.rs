//! Front end for the blinded C subset.
//!
//! A C function is parsed into a statement tree ([`parser`]), an indicator
//! variable is picked ([`indicator`]), statements the checker cannot
//! interpret are optionally replaced by fresh `pact`/`pbool` calls
//! ([`blind`]) and the result is lifted to an [`Exp`] ([`lift`]).
//!
//! ```
//! use cfgkat::frontend::{lift_source, IndicatorChoice};
//!
//! let src = "void f() { int x = 2; if (x == 1) pact(7); }";
//! let lifted = lift_source(src, "f", &IndicatorChoice::Auto).unwrap();
//! assert_eq!(lifted.indicator.as_deref(), Some("x"));
//! ```

pub mod blind;
pub mod indicator;
pub mod lexer;
pub mod lift;
pub mod parser;

use serde::{Deserialize, Serialize};

use crate::syntax::{Exp, Loc};

pub use blind::{auto_blind, auto_blind_with, BlindingTable};
pub use indicator::{analyze_indicator, detect_indicator, Candidate, IndicatorAnalysis};
pub use lift::lift_to_exp;
pub use parser::{parse_file, parse_function, SourceFile, SourceFunction};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum FrontendError {
    #[error("{loc}: expected {expected}, found {found}")]
    Syntax { loc: Loc, expected: String, found: String },
    #[error("{loc}: unsupported construct: {construct}")]
    UnsupportedConstruct { loc: Loc, construct: String },
    #[error("{loc}: do-while body contains a break or a label and cannot be unrolled")]
    DoWhileWithBreakOrLabel { loc: Loc },
    #[error("{loc}: `{text}` is not pact/pbool, indicator or control flow (try --auto-blind)")]
    NonBlindableStatement { loc: Loc, text: String },
    #[error("function `{name}` not found")]
    FunctionNotFound { name: String },
    #[error("`{name}` cannot be the indicator: {reason}")]
    InvalidIndicator { name: String, reason: String },
}

/// How the indicator variable of a function is chosen.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum IndicatorChoice {
    /// First qualifying variable by declaration order.
    #[default]
    Auto,
    /// This variable, which must qualify.
    Named(String),
    /// No indicator.
    Disabled,
}

impl IndicatorChoice {
    /// Resolves the choice for `f`.
    pub fn resolve(&self, f: &SourceFunction) -> Result<Option<String>, FrontendError> {
        match self {
            IndicatorChoice::Auto => Ok(detect_indicator(f)),
            IndicatorChoice::Disabled => Ok(None),
            IndicatorChoice::Named(name) => {
                let analysis = analyze_indicator(f);
                match analysis.candidates.iter().find(|c| &c.name == name) {
                    Some(c) if c.qualifies() => Ok(Some(name.clone())),
                    Some(c) => Err(FrontendError::InvalidIndicator {
                        name: name.clone(),
                        reason: c.reason.clone().unwrap_or_default(),
                    }),
                    None => Err(FrontendError::InvalidIndicator {
                        name: name.clone(),
                        reason: "no such local variable".into(),
                    }),
                }
            }
        }
    }
}

/// A function lifted to a program.
#[derive(Clone, Debug)]
pub struct Lifted {
    pub exp: Exp,
    pub indicator: Option<String>,
}

/// Parses and lifts function `name` of `src` without blinding.
pub fn lift_source(src: &str, name: &str, choice: &IndicatorChoice) -> Result<Lifted, FrontendError> {
    let f = parse_function(src, name)?;
    let indicator = choice.resolve(&f)?;
    let exp = lift_to_exp(&f, indicator.as_deref(), None)?;
    Ok(Lifted { exp, indicator })
}

/// Lifts two functions that are to be compared, blinding both against one
/// shared table when `blind` is set.
pub fn lift_pair(
    a: &SourceFunction,
    b: &SourceFunction,
    choice: &IndicatorChoice,
    blind: bool,
) -> Result<(Lifted, Lifted, Option<BlindingTable>), FrontendError> {
    let ia = choice.resolve(a)?;
    let ib = choice.resolve(b)?;
    let (table, a, b) = if blind {
        let (t, a, b) = auto_blind_with(a, b, ia.as_deref(), ib.as_deref());
        (Some(t), a, b)
    } else {
        (None, a.clone(), b.clone())
    };
    let la = Lifted { exp: lift_to_exp(&a, ia.as_deref(), None)?, indicator: ia };
    let lb = Lifted { exp: lift_to_exp(&b, ib.as_deref(), None)?, indicator: ib };
    Ok((la, lb, table))
}
