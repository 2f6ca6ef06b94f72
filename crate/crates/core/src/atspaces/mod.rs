//! Truncated free Lie algebras, cyclic words and tangential derivations:
//! the graded calculus behind w-braid logarithms and the Kashiwara-Vergne
//! solver.
//!
//! Elements carry their generator count and truncation degree; operations on
//! mixed truncations take the minimum. Free Lie elements are stored on the
//! Lyndon basis (a Lyndon word stands for its standard bracketing).

mod lyndon;
mod tder;

pub use lyndon::{
    all_words, assoc_exp, assoc_log, bch, bch_generic, bch_universal, dynkin_project, is_lyndon,
    lie_from_assoc, lyndon_bracket_assoc, lyndon_words, AssocElement, LieBracket, LieElement,
};
pub use tder::{delta_tilde, j_exp, j_exp_via_adjoint, SemidirectElement, TDerElement, TrElement};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AtError {
    #[error("generator counts differ: {a} vs {b}")]
    GeneratorMismatch { a: usize, b: usize },
    #[error("element is not primitive: residual word {word:?} is not Lyndon")]
    NotPrimitive { word: String },
    #[error("logarithm requires constant term 1")]
    BadConstantTerm,
}

/// Letters of small alphabets render as x, y, z, w; larger ones as x1, x2, ...
pub fn letter_name(n: usize, g: u8) -> String {
    if n <= 4 {
        ["x", "y", "z", "w"][g as usize].to_string()
    } else {
        format!("x{}", g + 1)
    }
}

pub fn word_name(n: usize, w: &[u8]) -> String {
    w.iter().map(|&g| letter_name(n, g)).collect()
}

/// Inverse of [`word_name`] for alphabets of size <= 4.
pub fn parse_word(n: usize, s: &str) -> Option<Vec<u8>> {
    let mut out = Vec::new();
    for c in s.chars() {
        let g = match c {
            'x' => 0u8,
            'y' => 1,
            'z' => 2,
            'w' => 3,
            _ => return None,
        };
        if g as usize >= n {
            return None;
        }
        out.push(g);
    }
    Some(out)
}
