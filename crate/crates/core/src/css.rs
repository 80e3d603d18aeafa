//! CSS triples `C+ ⊃ C`, `C⊥ = dual(C)`: `K` logical qubits stored in the
//! `2^K` cosets of `C` inside `C+`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::codes::{CodeSummary, LinearCode};
use crate::error::{Error, Result};
use crate::gf2::{BinaryMatrix, BitWord};

/// Attempt budget for [`search_weakly_self_dual`].
pub const DEFAULT_SEARCH_ATTEMPTS: usize = 100_000;

#[derive(Debug, Clone)]
pub struct CssTriple {
    c_plus: LinearCode,
    c: LinearCode,
    c_perp: LinearCode,
    extra_rows: BinaryMatrix,
    offsets: BinaryMatrix,
    logical_positions: Vec<usize>,
    d1: usize,
    d2: usize,
}

impl CssTriple {
    /// Builds the triple from `C+` and the `K` checks that split it into
    /// cosets of `C`.
    pub fn build(c_plus: &LinearCode, extra_rows: &BinaryMatrix) -> Result<Self> {
        let c = c_plus.kth_order_subcode(extra_rows)?;
        let c_perp = c.dual();
        Self::assemble(c_plus.clone(), c, c_perp, extra_rows.clone())
    }

    fn assemble(
        c_plus: LinearCode,
        c: LinearCode,
        c_perp: LinearCode,
        extra_rows: BinaryMatrix,
    ) -> Result<Self> {
        let n = c_plus.n();
        let k_logical = extra_rows.n_rows();
        if c_plus.k() - c.k() != k_logical {
            return Err(Error::Construction(
                "dim(C+) - dim(C) differs from K".into(),
            ));
        }
        if c_plus.k() + c_perp.k() != n + k_logical {
            return Err(Error::Construction("k1 + k2 != n + K".into()));
        }
        for g in c.generator().rows() {
            if !c_plus.contains(g)? {
                return Err(Error::Construction(format!("{g} is in C but not in C+")));
            }
        }

        // One word of C+ per extra check, failing exactly that check.
        let extra_syndromes = BinaryMatrix::new(
            k_logical,
            c_plus
                .generator()
                .rows()
                .iter()
                .map(|g| extra_rows.syndrome(g))
                .collect::<Result<_>>()?,
        )?;
        let c_reduced = c.generator().row_reduce();
        let mut raw = Vec::with_capacity(k_logical);
        for m in 0..k_logical {
            let coeffs = extra_syndromes
                .solve_left(&BitWord::unit(k_logical, m)?)?
                .ok_or_else(|| {
                    Error::Construction("extra checks are not independent on C+".into())
                })?;
            let mut o = c_plus.generator().combine(&coeffs)?;
            // clear the pivot positions of C so its generator can be fanned
            // out from them
            for (row, &p) in c_reduced.reduced.rows().iter().zip(&c_reduced.pivots) {
                if o.get(p) {
                    o = o ^ *row;
                }
            }
            raw.push(o);
        }
        let reduced = BinaryMatrix::new(n, raw)?.row_reduce();
        if reduced.rank != k_logical {
            return Err(Error::Construction("coset offsets are dependent".into()));
        }

        let d1 = c_plus.min_distance()?;
        let d2 = c_perp.min_distance()?;
        Ok(Self {
            c_plus,
            c,
            c_perp,
            extra_rows,
            offsets: reduced.reduced,
            logical_positions: reduced.pivots,
            d1,
            d2,
        })
    }

    /// Replaces the presentation of `C⊥` (and hence of `C`) by an equivalent
    /// one, e.g. to pick which parity checks a basis-2 corrector measures.
    pub fn with_dual_presentation(self, c_perp: LinearCode) -> Result<Self> {
        if !c_perp.same_code(&self.c_perp) {
            return Err(Error::Construction(
                "replacement dual has a different codeword set".into(),
            ));
        }
        let c = c_perp.dual();
        Ok(Self { c, c_perp, ..self })
    }

    pub fn n(&self) -> usize {
        self.c_plus.n()
    }

    /// Number of logical qubits `K`.
    pub fn k_logical(&self) -> usize {
        self.extra_rows.n_rows()
    }

    pub fn k1(&self) -> usize {
        self.c_plus.k()
    }

    pub fn k2(&self) -> usize {
        self.c_perp.k()
    }

    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    /// Number of arbitrary single-qubit defections the code recovers from.
    pub fn correctable(&self) -> usize {
        ((self.d1 - 1) / 2).min((self.d2 - 1) / 2)
    }

    pub fn c_plus(&self) -> &LinearCode {
        &self.c_plus
    }

    pub fn c(&self) -> &LinearCode {
        &self.c
    }

    pub fn c_perp(&self) -> &LinearCode {
        &self.c_perp
    }

    pub fn extra_rows(&self) -> &BinaryMatrix {
        &self.extra_rows
    }

    /// Coset offsets, one per logical qubit, in reduced form and zero on the
    /// pivot columns of `C`.
    pub fn offsets(&self) -> &BinaryMatrix {
        &self.offsets
    }

    /// Qubit holding each logical input before encoding.
    pub fn logical_positions(&self) -> &[usize] {
        &self.logical_positions
    }

    /// Offset of coset `i`; bit `l` of `i` (first logical = most
    /// significant) selects offset row `l`.
    pub fn coset_offset(&self, i: usize) -> Result<BitWord> {
        let k = self.k_logical();
        if i >> k != 0 {
            return Err(Error::Usage(format!(
                "coset index {i} out of range for K = {k}"
            )));
        }
        self.offsets.combine(&BitWord::new(i as u32, k)?)
    }

    pub fn coset_words(&self, i: usize) -> Result<Vec<BitWord>> {
        let offset = self.coset_offset(i)?;
        Ok(self
            .c
            .codewords()?
            .into_iter()
            .map(|w| w ^ offset)
            .collect())
    }

    pub fn summary(&self) -> Result<CssSummary> {
        Ok(CssSummary {
            n: self.n(),
            k_logical: self.k_logical(),
            d1: self.d1,
            d2: self.d2,
            c_plus: self.c_plus.summary()?,
            c: self.c.summary()?,
            c_perp: self.c_perp.summary()?,
            extra_rows: self.extra_rows.clone(),
            offsets: self.offsets.clone(),
            logical_positions: self.logical_positions.clone(),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CssSummary {
    pub n: usize,
    pub k_logical: usize,
    pub d1: usize,
    pub d2: usize,
    pub c_plus: CodeSummary,
    pub c: CodeSummary,
    pub c_perp: CodeSummary,
    pub extra_rows: BinaryMatrix,
    pub offsets: BinaryMatrix,
    pub logical_positions: Vec<usize>,
}

/// Random search for a code `C+` of dimension `(n + K) / 2` containing its
/// own dual, used with `C = dual(C+)` so that `d1 = d2 = d(C+)`.
///
/// Returns `Ok(None)` when no witness is found within `max_attempts`.
pub fn search_weakly_self_dual(
    n: usize,
    k_logical: usize,
    d_target: usize,
    seed: u64,
    max_attempts: usize,
) -> Result<Option<CssTriple>> {
    if n > crate::codes::MAX_TABLE_LEN {
        return Err(Error::Capability(format!(
            "search limited to n <= {}",
            crate::codes::MAX_TABLE_LEN
        )));
    }
    if k_logical == 0 || k_logical > n {
        return Err(Error::Usage(format!(
            "need 1 <= K <= n, got K = {k_logical}"
        )));
    }
    if d_target <= 1 {
        let units = (0..k_logical)
            .map(|j| BitWord::unit(n, j))
            .collect::<Result<_>>()?;
        return CssTriple::build(&LinearCode::full(n)?, &BinaryMatrix::new(n, units)?).map(Some);
    }
    if (n + k_logical) % 2 == 1 {
        return Ok(None);
    }
    let k = (n + k_logical) / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let full_mask = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    for _ in 0..max_attempts {
        let rows = (0..k)
            .map(|_| BitWord::new(rng.random::<u32>() & full_mask, n))
            .collect::<Result<Vec<_>>>()?;
        let g = BinaryMatrix::new(n, rows)?;
        if !g.is_independent() {
            continue;
        }
        let code = LinearCode::from_generator(g)?;
        let dual = code.dual();
        if !dual
            .generator()
            .rows()
            .iter()
            .all(|r| code.contains(r).unwrap_or(false))
        {
            continue;
        }
        if code.min_distance()? < d_target {
            continue;
        }
        // generator rows of C+ outside span(C) become the extra checks
        let mut extra = Vec::new();
        let mut span = dual.generator().clone();
        for r in code.generator().rows() {
            let candidate = span.stack(&BinaryMatrix::new(n, vec![*r])?)?;
            if candidate.rank() > span.rank() {
                span = candidate;
                extra.push(*r);
            }
        }
        let triple = CssTriple::build(&code, &BinaryMatrix::new(n, extra)?)?;
        if triple.d1() >= d_target && triple.d2() >= d_target {
            return Ok(Some(triple));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    fn w(s: &str) -> BitWord {
        s.parse().unwrap()
    }

    #[test]
    fn steane_triple_parameters() {
        let t = zoo::steane_triple();
        assert_eq!((t.n(), t.k_logical(), t.d1(), t.d2()), (7, 1, 3, 3));
        assert!(t.c().same_code(&zoo::simplex7()));
        assert!(t.c_perp().same_code(&zoo::hamming7()));
        assert_eq!(t.k1() + t.k2(), t.n() + t.k_logical());
        assert_eq!(t.c().min_distance().unwrap(), 4);
    }

    #[test]
    fn steane_offset_matches_hand_derived_word() {
        let t = zoo::steane_triple();
        assert_eq!(t.coset_offset(1).unwrap(), w("0010110"));
        assert_eq!(t.logical_positions(), &[2]);
        // the offset coset is C ⊕ 1111111
        let mut a = t.coset_words(1).unwrap();
        let mut b: Vec<_> = zoo::simplex7()
            .codewords()
            .unwrap()
            .iter()
            .map(|c| *c ^ w("1111111"))
            .collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn three_qubit_triple_protects_basis_two_only() {
        let t = zoo::three_qubit_triple();
        assert_eq!((t.d1(), t.d2()), (1, 3));
        assert!(t.c().same_code(&zoo::even_parity3()));
        assert!(t.c_perp().same_code(&zoo::repetition3()));
        assert_eq!(t.c_perp().check().to_string(), zoo::H_REP);
    }

    #[test]
    fn build_rejects_row_in_check_span() {
        let h = zoo::hamming7();
        let bad = BinaryMatrix::new(7, vec![h.check().row(2)]).unwrap();
        assert!(matches!(
            CssTriple::build(&h, &bad),
            Err(Error::DependentRows(_))
        ));
    }

    #[test]
    fn wrong_dual_presentation_is_rejected() {
        let t = zoo::steane_triple();
        assert!(t.with_dual_presentation(zoo::simplex7()).is_err());
    }

    #[test]
    fn search_finds_seven_qubit_code() {
        for seed in [0, 1, 42] {
            let t = search_weakly_self_dual(7, 1, 3, seed, DEFAULT_SEARCH_ATTEMPTS)
                .unwrap()
                .expect("a [7,4,3] weakly self-dual code exists");
            assert!(t.d1() >= 3 && t.d2() >= 3);
            assert_eq!(t.k1() + t.k2(), 8);
        }
    }

    #[test]
    fn search_is_deterministic_per_seed() {
        let a = search_weakly_self_dual(7, 1, 3, 9, DEFAULT_SEARCH_ATTEMPTS)
            .unwrap()
            .unwrap();
        let b = search_weakly_self_dual(7, 1, 3, 9, DEFAULT_SEARCH_ATTEMPTS)
            .unwrap()
            .unwrap();
        assert_eq!(a.c_plus().generator(), b.c_plus().generator());
    }

    #[test]
    fn search_trivial_target_uses_full_code() {
        let t = search_weakly_self_dual(5, 2, 1, 0, 10).unwrap().unwrap();
        assert_eq!(t.k1(), 5);
        assert_eq!(t.k_logical(), 2);
    }

    /// Exhaustive: no CSS triple on 3 bits has distance 3 in both bases.
    #[test]
    fn no_three_bit_code_corrects_both_bases() {
        // any C+ with d1 >= 3 on 3 bits is the repetition code (k1 = 1); then
        // K = 1 forces C = {0} and C⊥ = full code with d2 = 1
        let mut best = 0;
        for gen_mask in 1u32..(1 << 8) {
            // subsets of the 7 nonzero words as generator candidates
            let rows: Vec<_> = (1u32..8)
                .filter(|v| gen_mask >> (v - 1) & 1 == 1)
                .map(|v| BitWord::new(v, 3).unwrap())
                .collect();
            let g = BinaryMatrix::new(3, rows).unwrap();
            if !g.is_independent() {
                continue;
            }
            let cp = LinearCode::from_generator(g).unwrap();
            for extra in 1u32..8 {
                let extra = BinaryMatrix::new(3, vec![BitWord::new(extra, 3).unwrap()]).unwrap();
                if let Ok(t) = CssTriple::build(&cp, &extra) {
                    best = best.max(t.d1().min(t.d2()));
                }
            }
        }
        assert!(best < 3);
        assert_eq!(
            search_weakly_self_dual(3, 1, 3, 7, 10_000)
                .unwrap()
                .map(|t| t.n()),
            None
        );
    }
}
