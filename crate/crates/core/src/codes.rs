//! Binary linear codes: duals, subcodes, cosets, minimum distance and
//! coset-leader syndrome tables.

use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{BinaryMatrix, BitWord};

/// Largest dimension for which codewords are enumerated.
pub const MAX_ENUM_DIM: usize = 24;
/// Largest length for exhaustive coset-leader search.
pub const MAX_TABLE_LEN: usize = 20;

/// An `[n, k, d]` binary linear code, held as an independent generator and an
/// independent parity-check matrix.
#[derive(Clone)]
pub struct LinearCode {
    generator: BinaryMatrix,
    check: BinaryMatrix,
    distance: OnceLock<usize>,
}

impl LinearCode {
    /// Code spanned by the rows of `generator`; the check matrix is its null
    /// space.
    pub fn from_generator(generator: BinaryMatrix) -> Result<Self> {
        if !generator.is_independent() {
            return Err(Error::DependentRows(format!(
                "generator has rank {} but {} rows",
                generator.rank(),
                generator.n_rows()
            )));
        }
        let check = generator.null_space();
        Ok(Self::from_parts(generator, check))
    }

    /// Code of all words passing every row of `check`.
    pub fn from_parity_check(check: BinaryMatrix) -> Result<Self> {
        if !check.is_independent() {
            return Err(Error::DependentRows(format!(
                "check matrix has rank {} but {} rows",
                check.rank(),
                check.n_rows()
            )));
        }
        let generator = check.null_space();
        Ok(Self::from_parts(generator, check))
    }

    /// Both presentations given explicitly; they are verified to describe the
    /// same code.
    pub fn from_matrices(generator: BinaryMatrix, check: BinaryMatrix) -> Result<Self> {
        if generator.n_cols() != check.n_cols() {
            return Err(Error::LengthMismatch {
                left: generator.n_cols(),
                right: check.n_cols(),
            });
        }
        if !generator.is_independent() || !check.is_independent() {
            return Err(Error::DependentRows(
                "generator or check rows are dependent".into(),
            ));
        }
        if generator.n_rows() + check.n_rows() != generator.n_cols() {
            return Err(Error::Construction(format!(
                "dimensions {} + {} do not add up to n = {}",
                generator.n_rows(),
                check.n_rows(),
                generator.n_cols()
            )));
        }
        for g in generator.rows() {
            if !check.syndrome(g)?.is_zero() {
                return Err(Error::Construction(format!(
                    "generator row {g} fails a check"
                )));
            }
        }
        Ok(Self::from_parts(generator, check))
    }

    fn from_parts(generator: BinaryMatrix, check: BinaryMatrix) -> Self {
        Self {
            generator,
            check,
            distance: OnceLock::new(),
        }
    }

    /// The `[n, n]` code of all words.
    pub fn full(n: usize) -> Result<Self> {
        Self::from_generator(BinaryMatrix::identity(n)?)
    }

    pub fn n(&self) -> usize {
        self.generator.n_cols()
    }

    pub fn k(&self) -> usize {
        self.generator.n_rows()
    }

    pub fn generator(&self) -> &BinaryMatrix {
        &self.generator
    }

    pub fn check(&self) -> &BinaryMatrix {
        &self.check
    }

    /// Codewords indexed by their generator coefficients.
    pub fn codewords(&self) -> Result<Vec<BitWord>> {
        if self.k() > MAX_ENUM_DIM {
            return Err(Error::Capability(format!(
                "k = {} exceeds the enumeration bound {MAX_ENUM_DIM}",
                self.k()
            )));
        }
        self.generator.span()
    }

    pub fn contains(&self, w: &BitWord) -> Result<bool> {
        Ok(self.syndrome(w)?.is_zero())
    }

    pub fn syndrome(&self, w: &BitWord) -> Result<BitWord> {
        self.check.syndrome(w)
    }

    /// Minimum nonzero codeword weight; `n` for the zero code.
    pub fn min_distance(&self) -> Result<usize> {
        if let Some(&d) = self.distance.get() {
            return Ok(d);
        }
        let d = if self.k() == 0 {
            self.n()
        } else {
            self.codewords()?
                .iter()
                .filter(|w| !w.is_zero())
                .map(BitWord::weight)
                .min()
                .expect("k >= 1 gives a nonzero codeword")
        };
        Ok(*self.distance.get_or_init(|| d))
    }

    /// `floor((d - 1) / 2)`.
    pub fn max_correctable(&self) -> Result<usize> {
        Ok((self.min_distance()? - 1) / 2)
    }

    /// The dual code: generator and check matrices swap roles.
    pub fn dual(&self) -> LinearCode {
        Self::from_parts(self.check.clone(), self.generator.clone())
    }

    /// Same codeword set, regardless of presentation.
    pub fn same_code(&self, other: &LinearCode) -> bool {
        self.generator.same_row_space(&other.generator)
    }

    /// Subcode obtained by appending `extra_checks` to the check matrix.
    pub fn kth_order_subcode(&self, extra_checks: &BinaryMatrix) -> Result<LinearCode> {
        let stacked = self.check.stack(extra_checks)?;
        let rank = stacked.rank();
        if rank != self.check.n_rows() + extra_checks.n_rows() {
            return Err(Error::DependentRows(format!(
                "{} extra rows add only {} to the check rank; increase n",
                extra_checks.n_rows(),
                rank - self.check.n_rows()
            )));
        }
        Self::from_parity_check(stacked)
    }

    /// Splits the code into the `2^x` cosets of words taking each value `j`
    /// on `positions` (first listed position = most significant bit of `j`).
    pub fn coset_decompose(&self, positions: &[usize]) -> Result<Vec<Coset>> {
        let n = self.n();
        let indicators = positions
            .iter()
            .map(|&p| BitWord::unit(n, p))
            .collect::<Result<Vec<_>>>()?;
        let indicators = BinaryMatrix::new(n, indicators)?;
        let sub = self.kth_order_subcode(&indicators)?;

        // Offsets: a codeword taking value e_i on the positions, per i.
        let restricted = BinaryMatrix::new(
            positions.len(),
            self.generator
                .rows()
                .iter()
                .map(|g| g.restrict(positions))
                .collect::<Result<_>>()?,
        )?;
        let x = positions.len();
        let mut basis = Vec::with_capacity(x);
        for i in 0..x {
            let coeffs = restricted
                .solve_left(&BitWord::unit(x, i)?)?
                .expect("independence was checked by the subcode construction");
            basis.push(self.generator.combine(&coeffs)?);
        }
        let basis = BinaryMatrix::new(n, basis)?;
        (0..1u32 << x)
            .map(|j| {
                let offset = basis.combine(&BitWord::new(j, x)?)?;
                Ok(Coset {
                    base: sub.clone(),
                    offset,
                })
            })
            .collect()
    }

    pub fn syndrome_table(&self) -> Result<SyndromeTable> {
        SyndromeTable::build(self)
    }
}

impl fmt::Debug for LinearCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearCode")
            .field("n", &self.n())
            .field("k", &self.k())
            .field("generator", &self.generator)
            .field("check", &self.check)
            .finish()
    }
}

/// JSON-facing summary of a code.
#[derive(Debug, Clone, Serialize)]
pub struct CodeSummary {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub generator: BinaryMatrix,
    pub check: BinaryMatrix,
}

impl LinearCode {
    pub fn summary(&self) -> Result<CodeSummary> {
        Ok(CodeSummary {
            n: self.n(),
            k: self.k(),
            d: self.min_distance()?,
            generator: self.generator.clone(),
            check: self.check.clone(),
        })
    }
}

/// `base ⊕ offset`.
#[derive(Debug, Clone)]
pub struct Coset {
    pub base: LinearCode,
    pub offset: BitWord,
}

impl Coset {
    pub fn words(&self) -> Result<Vec<BitWord>> {
        Ok(self
            .base
            .codewords()?
            .into_iter()
            .map(|w| w ^ self.offset)
            .collect())
    }

    pub fn contains(&self, w: &BitWord) -> Result<bool> {
        self.base.contains(&w.xor(&self.offset)?)
    }

    /// Cosets of the same code are identical or disjoint, so a single
    /// membership test decides equality.
    pub fn same_as(&self, other: &Coset) -> Result<bool> {
        if !self.base.same_code(&other.base) {
            return Ok(false);
        }
        self.contains(&other.offset)
    }
}

/// Coset-leader decoding table: each syndrome maps to the minimum-weight
/// error producing it, ties broken by the lexicographically smallest word.
#[derive(Debug, Clone)]
pub struct SyndromeTable {
    code: LinearCode,
    leaders: Vec<BitWord>,
    max_correctable: usize,
}

impl SyndromeTable {
    pub fn build(code: &LinearCode) -> Result<Self> {
        let n = code.n();
        if n > MAX_TABLE_LEN {
            return Err(Error::Capability(format!(
                "n = {n} exceeds the exhaustive leader-search bound {MAX_TABLE_LEN}"
            )));
        }
        let r = code.check().n_rows();
        let mut leaders: Vec<Option<BitWord>> = vec![None; 1 << r];
        let mut remaining = leaders.len();
        let mut errors: Vec<BitWord> = BitWord::all(n)?.collect();
        // packed order equals lexicographic order of the printed words
        errors.sort_by_key(|e| (e.weight(), e.value()));
        for e in errors {
            let s = code.syndrome(&e)?.value() as usize;
            if leaders[s].is_none() {
                leaders[s] = Some(e);
                remaining -= 1;
                if remaining == 0 {
                    break;
                }
            }
        }
        Ok(Self {
            code: code.clone(),
            leaders: leaders
                .into_iter()
                .map(|l| l.expect("every syndrome is reachable"))
                .collect(),
            max_correctable: code.max_correctable()?,
        })
    }

    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    pub fn max_correctable(&self) -> usize {
        self.max_correctable
    }

    pub fn syndrome_len(&self) -> usize {
        self.code.check().n_rows()
    }

    pub fn lookup(&self, syndrome: &BitWord) -> Result<BitWord> {
        if syndrome.len() != self.syndrome_len() {
            return Err(Error::LengthMismatch {
                left: self.syndrome_len(),
                right: syndrome.len(),
            });
        }
        Ok(self.leaders[syndrome.value() as usize])
    }

    /// `received ⊕ leader(syndrome(received))`.
    pub fn decode(&self, received: &BitWord) -> Result<BitWord> {
        let s = self.code.syndrome(received)?;
        Ok(*received ^ self.lookup(&s)?)
    }

    /// `(syndrome, leader)` pairs in syndrome order.
    pub fn entries(&self) -> impl Iterator<Item = (BitWord, BitWord)> + '_ {
        let r = self.syndrome_len();
        self.leaders
            .iter()
            .enumerate()
            .map(move |(s, &e)| (BitWord::new(s as u32, r).expect("syndrome fits"), e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    fn w(s: &str) -> BitWord {
        s.parse().unwrap()
    }

    #[test]
    fn zoo_distances() {
        assert_eq!(zoo::hamming7().min_distance().unwrap(), 3);
        assert_eq!(zoo::simplex7().min_distance().unwrap(), 4);
        assert_eq!(zoo::repetition3().min_distance().unwrap(), 3);
        assert_eq!(zoo::even_parity3().min_distance().unwrap(), 2);
    }

    #[test]
    fn zero_code_distance_is_n() {
        let z = LinearCode::full(4).unwrap().dual();
        assert_eq!(z.k(), 0);
        assert_eq!(z.min_distance().unwrap(), 4);
    }

    #[test]
    fn dual_examples() {
        let d = zoo::simplex7().dual();
        assert_eq!((d.n(), d.k(), d.min_distance().unwrap()), (7, 4, 3));
        assert!(d.same_code(&zoo::hamming7()));

        let full = LinearCode::full(5).unwrap();
        assert_eq!(full.dual().k(), 0);

        // repetition dual: enumerate words with even overlap with 111
        let rep = zoo::repetition3();
        let mut expected: Vec<_> = BitWord::all(3)
            .unwrap()
            .filter(|v| rep.codewords().unwrap().iter().all(|c| !c.dot(v).unwrap()))
            .collect();
        expected.sort();
        let mut got = rep.dual().codewords().unwrap();
        got.sort();
        assert_eq!(got, expected);
        assert_eq!(got.len(), 4);
    }

    #[test]
    fn subcode_adds_one_check() {
        let all_ones = BinaryMatrix::from_strs(&["1111111"]).unwrap();
        let c = zoo::hamming7().kth_order_subcode(&all_ones).unwrap();
        assert_eq!(c.k(), 3);
        assert!(c.same_code(&zoo::simplex7()));
    }

    #[test]
    fn subcode_indicator_rows_count_cosets() {
        let n = 10;
        let full = LinearCode::full(n).unwrap();
        let rows = [3, 5, 9]
            .iter()
            .map(|&p| BitWord::unit(n, p).unwrap())
            .collect();
        let sub = full
            .kth_order_subcode(&BinaryMatrix::new(n, rows).unwrap())
            .unwrap();
        assert_eq!(sub.k(), 7);
        let cosets = full.coset_decompose(&[3, 5, 9]).unwrap();
        assert_eq!(cosets.len(), 8);
        // coset 5 = 101: fourth and tenth bits one, sixth zero
        for word in cosets[5].words().unwrap() {
            assert!(word.get(3) && !word.get(5) && word.get(9));
        }
    }

    #[test]
    fn dependent_extra_row_is_rejected() {
        let h = zoo::hamming7();
        let in_span = BinaryMatrix::new(7, vec![h.check().row(0) ^ h.check().row(1)]).unwrap();
        assert!(matches!(
            h.kth_order_subcode(&in_span),
            Err(Error::DependentRows(_))
        ));
    }

    #[test]
    fn coset_decompose_four_bit_example() {
        let c = LinearCode::from_generator(BinaryMatrix::from_strs(&["0011", "1100"]).unwrap())
            .unwrap();
        let cosets = c.coset_decompose(&[0]).unwrap();
        let mut c0 = cosets[0].words().unwrap();
        let mut c1 = cosets[1].words().unwrap();
        c0.sort();
        c1.sort();
        assert_eq!(c0, vec![w("0000"), w("0011")]);
        assert_eq!(c1, vec![w("1100"), w("1111")]);

        let single = c.coset_decompose(&[]).unwrap();
        assert_eq!(single.len(), 1);
        let mut all = single[0].words().unwrap();
        all.sort();
        let mut expected = c.codewords().unwrap();
        expected.sort();
        assert_eq!(all, expected);
    }

    #[test]
    fn coset_decompose_on_information_set_gives_singletons() {
        let h = zoo::hamming7();
        let info = h.generator().row_reduce().pivots;
        let cosets = h.coset_decompose(&info).unwrap();
        assert_eq!(cosets.len(), 16);
        assert!(cosets.iter().all(|c| c.words().unwrap().len() == 1));
    }

    #[test]
    fn coset_decompose_rejects_dependent_positions() {
        // repetition code: bits 0 and 1 are always equal
        assert!(zoo::repetition3().coset_decompose(&[0, 1]).is_err());
    }

    #[test]
    fn repetition_table_follows_hrep() {
        let t = zoo::repetition3().syndrome_table().unwrap();
        assert_eq!(t.lookup(&w("11")).unwrap(), w("100"));
        assert_eq!(t.lookup(&w("10")).unwrap(), w("010"));
        assert_eq!(t.lookup(&w("01")).unwrap(), w("001"));
        assert_eq!(t.lookup(&w("00")).unwrap(), w("000"));
    }

    #[test]
    fn hamming_single_errors_have_distinct_syndromes() {
        let h = zoo::hamming7();
        let mut seen = std::collections::HashSet::new();
        for q in 0..7 {
            let s = h.syndrome(&BitWord::unit(7, q).unwrap()).unwrap();
            // column q of the check matrix
            let col: String = h
                .check()
                .rows()
                .iter()
                .map(|r| if r.get(q) { '1' } else { '0' })
                .collect();
            assert_eq!(s.to_string(), col);
            assert!(!s.is_zero());
            assert!(seen.insert(s));
        }
        let t = h.syndrome_table().unwrap();
        for q in 0..7 {
            let e = BitWord::unit(7, q).unwrap();
            assert_eq!(t.lookup(&h.syndrome(&e).unwrap()).unwrap(), e);
        }
    }

    #[test]
    fn leader_tie_break_is_lexicographic() {
        // even-parity code: every odd word has syndrome 1; leader must be 001
        let t = zoo::even_parity3().syndrome_table().unwrap();
        assert_eq!(t.lookup(&w("1")).unwrap(), w("001"));
    }

    #[test]
    fn table_size_limit() {
        let big = LinearCode::full(21).unwrap();
        assert!(matches!(big.syndrome_table(), Err(Error::Capability(_))));
    }
}
