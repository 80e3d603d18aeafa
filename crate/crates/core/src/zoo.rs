//! Built-in codes, stored as verbatim matrices.

use crate::codes::LinearCode;
use crate::css::CssTriple;
use crate::error::{Error, Result};
use crate::gf2::BinaryMatrix;

/// Checks of the `{000, 111}` repetition code.
pub const H_REP: &str = "110\n101";
/// Generator of the [7,3,4] simplex code.
pub const G_S: &str = "0001111\n0110011\n1010101";
/// Check matrix of the simplex code.
pub const H_C: &str = "1101001\n0101010\n1001100\n1110000";
/// Check matrix of the [7,4,3] Hamming (punctured Reed-Muller) code.
pub const H_C_PLUS: &str = "0111100\n1011010\n1101001";

pub const NAMES: &[&str] = &["repetition3", "even-parity3", "hamming7", "simplex7"];

fn matrix(text: &str) -> BinaryMatrix {
    text.parse().expect("built-in matrix is well formed")
}

/// [3,1,3] with check matrix `H_REP`.
pub fn repetition3() -> LinearCode {
    LinearCode::from_matrices(matrix("111"), matrix(H_REP)).expect("built-in code is consistent")
}

/// [3,2,2].
pub fn even_parity3() -> LinearCode {
    LinearCode::from_parity_check(matrix("111")).expect("built-in code is consistent")
}

/// [7,4,3] with check matrix `H_C_PLUS`.
pub fn hamming7() -> LinearCode {
    LinearCode::from_parity_check(matrix(H_C_PLUS)).expect("built-in code is consistent")
}

/// [7,3,4] with generator `G_S` and check matrix `H_C`.
pub fn simplex7() -> LinearCode {
    LinearCode::from_matrices(matrix(G_S), matrix(H_C)).expect("built-in code is consistent")
}

pub fn by_name(name: &str) -> Result<LinearCode> {
    match name {
        "repetition3" => Ok(repetition3()),
        "even-parity3" => Ok(even_parity3()),
        "hamming7" => Ok(hamming7()),
        "simplex7" => Ok(simplex7()),
        other => Err(Error::Usage(format!(
            "unknown code {other:?}; known: {}",
            NAMES.join(", ")
        ))),
    }
}

/// One logical qubit in seven: Hamming code plus the all-ones check.
pub fn steane_triple() -> CssTriple {
    CssTriple::build(&hamming7(), &matrix("1111111")).expect("Steane triple is valid")
}

/// One logical qubit in three, protected in basis 2 only: cosets of the
/// full code split by the all-ones check, with the dual presented through
/// `H_REP`.
pub fn three_qubit_triple() -> CssTriple {
    let full = LinearCode::full(3).expect("n = 3");
    CssTriple::build(&full, &matrix("111"))
        .and_then(|t| t.with_dual_presentation(repetition3()))
        .expect("three-qubit triple is valid")
}

pub const TRIPLE_NAMES: &[&str] = &["steane7", "three-qubit"];

pub fn triple_by_name(name: &str) -> Result<CssTriple> {
    match name {
        "steane7" => Ok(steane_triple()),
        "three-qubit" => Ok(three_qubit_triple()),
        other => Err(Error::Usage(format!(
            "unknown triple {other:?}; known: {}",
            TRIPLE_NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_generator_and_hamming_check_span_the_same_space() {
        assert!(matrix(G_S).same_row_space(&matrix(H_C_PLUS)));
    }

    #[test]
    fn every_zoo_code_is_consistent() {
        for name in NAMES {
            let c = by_name(name).unwrap();
            for g in c.generator().rows() {
                assert!(c.check().syndrome(g).unwrap().is_zero(), "{name}");
            }
            assert_eq!(c.codewords().unwrap().len(), 1 << c.k());
        }
        assert!(by_name("golay").is_err());
    }
}
