//! Bit-exact linear algebra over GF(2).
//!
//! Words are packed into a `u32`. Bit index 0 is the leftmost character of
//! the printed word and the most significant of the `len` packed bits, so the
//! packed value of a word equals the computational-basis index of the
//! corresponding product state when qubit `j` carries bit `j`.

use std::fmt;
use std::ops::{BitAnd, BitXor};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Longest supported word.
pub const MAX_WORD_LEN: usize = 32;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitWord {
    // `len` first so the derived ordering groups by length, then value;
    // for equal lengths the value order is the lexicographic order of the
    // printed strings.
    len: u8,
    bits: u32,
}

/// Result of testing a word against one parity-check row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckOutcome {
    Satisfied,
    Failed,
}

impl BitWord {
    pub fn new(value: u32, len: usize) -> Result<Self> {
        if len > MAX_WORD_LEN {
            return Err(Error::WordTooLong(len));
        }
        if len < MAX_WORD_LEN && value >> len != 0 {
            return Err(Error::Usage(format!(
                "value {value:#x} does not fit in {len} bits"
            )));
        }
        Ok(Self {
            len: len as u8,
            bits: value,
        })
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(0, len)
    }

    pub fn ones(len: usize) -> Result<Self> {
        Self::new(mask(len)?, len)
    }

    /// Word with a single set bit at position `j`.
    pub fn unit(len: usize, j: usize) -> Result<Self> {
        Self::from_positions(len, &[j])
    }

    pub fn from_positions(len: usize, positions: &[usize]) -> Result<Self> {
        let mut w = Self::zeros(len)?;
        for &j in positions {
            if j >= len {
                return Err(Error::Usage(format!(
                    "bit {j} out of range for length {len}"
                )));
            }
            w = w.with_bit(j, true);
        }
        Ok(w)
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let mut w = Self::zeros(bits.len())?;
        for (j, &b) in bits.iter().enumerate() {
            w = w.with_bit(j, b);
        }
        Ok(w)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Packed value; equals the basis-state index of the word.
    #[inline]
    pub fn value(&self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    #[inline]
    fn shift(&self, j: usize) -> usize {
        debug_assert!(j < self.len());
        self.len() - 1 - j
    }

    /// Bit at position `j` (0 = leftmost). Panics if out of range.
    #[inline]
    pub fn get(&self, j: usize) -> bool {
        assert!(
            j < self.len(),
            "bit {j} out of range for length {}",
            self.len
        );
        (self.bits >> self.shift(j)) & 1 == 1
    }

    #[must_use]
    pub fn with_bit(mut self, j: usize, bit: bool) -> Self {
        assert!(
            j < self.len(),
            "bit {j} out of range for length {}",
            self.len
        );
        let s = self.shift(j);
        self.bits = (self.bits & !(1 << s)) | ((bit as u32) << s);
        self
    }

    #[must_use]
    pub fn flipped(mut self, j: usize) -> Self {
        assert!(
            j < self.len(),
            "bit {j} out of range for length {}",
            self.len
        );
        self.bits ^= 1 << self.shift(j);
        self
    }

    /// Number of 1-bits.
    #[inline]
    pub fn weight(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Positions of the set bits, left to right.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&j| self.get(j))
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }

    /// Componentwise sum mod 2.
    pub fn xor(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        Ok(Self {
            len: self.len,
            bits: self.bits ^ other.bits,
        })
    }

    /// Bitwise AND.
    pub fn and(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        Ok(Self {
            len: self.len,
            bits: self.bits & other.bits,
        })
    }

    /// Parity of `weight(self AND other)`; `true` when odd.
    pub fn dot(&self, other: &Self) -> Result<bool> {
        Ok(self.and(other)?.weight() % 2 == 1)
    }

    pub fn distance(&self, other: &Self) -> Result<usize> {
        Ok(self.xor(other)?.weight())
    }

    /// Bits at the listed positions, packed into a new word in list order.
    pub fn restrict(&self, positions: &[usize]) -> Result<Self> {
        let mut out = Self::zeros(positions.len())?;
        for (i, &p) in positions.iter().enumerate() {
            if p >= self.len() {
                return Err(Error::Usage(format!(
                    "bit {p} out of range for length {}",
                    self.len
                )));
            }
            out = out.with_bit(i, self.get(p));
        }
        Ok(out)
    }

    /// Every word of length `len`, in increasing packed order.
    pub fn all(len: usize) -> Result<impl Iterator<Item = BitWord>> {
        if len > 24 {
            return Err(Error::Capability(format!(
                "refusing to enumerate 2^{len} words"
            )));
        }
        let l = len as u8;
        Ok((0u32..(1u32 << len)).map(move |bits| BitWord { len: l, bits }))
    }
}

fn mask(len: usize) -> Result<u32> {
    match len {
        0 => Ok(0),
        1..=31 => Ok((1u32 << len) - 1),
        32 => Ok(u32::MAX),
        _ => Err(Error::WordTooLong(len)),
    }
}

/// `Satisfied` iff `weight(h AND u)` is even.
pub fn parity_check(h: &BitWord, u: &BitWord) -> Result<CheckOutcome> {
    Ok(if h.dot(u)? {
        CheckOutcome::Failed
    } else {
        CheckOutcome::Satisfied
    })
}

impl BitXor for BitWord {
    type Output = BitWord;

    /// Panics on length mismatch; use [`BitWord::xor`] for a checked variant.
    fn bitxor(self, rhs: Self) -> Self {
        self.xor(&rhs).expect("xor of words with different lengths")
    }
}

impl BitAnd for BitWord {
    type Output = BitWord;

    fn bitand(self, rhs: Self) -> Self {
        self.and(&rhs).expect("and of words with different lengths")
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.len() {
            f.write_str(if self.get(j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitWord({self})")
    }
}

impl FromStr for BitWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() > MAX_WORD_LEN {
            return Err(Error::WordTooLong(s.len()));
        }
        let mut w = Self::zeros(s.len())?;
        for (j, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => w = w.with_bit(j, true),
                _ => return Err(Error::Parse(s.to_string())),
            }
        }
        Ok(w)
    }
}

impl Serialize for BitWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Rows of equal-length words. The column count is stored separately so a
/// matrix with zero rows still knows its width.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    n: usize,
    rows: Vec<BitWord>,
}

/// Reduced row-echelon form together with its rank and pivot columns.
/// `pivots[i]` is the pivot column of row `i` of `reduced`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Echelon {
    pub reduced: BinaryMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl BinaryMatrix {
    pub fn new(n: usize, rows: Vec<BitWord>) -> Result<Self> {
        if n > MAX_WORD_LEN {
            return Err(Error::WordTooLong(n));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::LengthMismatch {
                left: n,
                right: bad.len(),
            });
        }
        Ok(Self { n, rows })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, Vec::new())
    }

    pub fn identity(n: usize) -> Result<Self> {
        let rows = (0..n).map(|j| BitWord::unit(n, j)).collect::<Result<_>>()?;
        Self::new(n, rows)
    }

    /// Builds a matrix from printed rows. All rows must have the same length.
    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let words = rows
            .iter()
            .map(|r| r.parse())
            .collect::<Result<Vec<BitWord>>>()?;
        let n = words.first().map_or(0, BitWord::len);
        Self::new(n, words)
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitWord] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> BitWord {
        self.rows[i]
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn stack(&self, other: &BinaryMatrix) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut rows = self.rows.clone();
        rows.extend_from_slice(&other.rows);
        Self::new(self.n, rows)
    }

    /// Reduced row-echelon form; at each step the leftmost available column
    /// becomes the next pivot.
    pub fn row_reduce(&self) -> Echelon {
        self.reduce_with_order((0..self.n).collect())
    }

    /// Reduced form whose pivots are chosen scanning from the rightmost
    /// column. Each reduced row is the only row with a 1 in its pivot
    /// column, so a parity check can be accumulated into that position.
    /// Rows are returned in the order their pivots were found.
    pub fn row_reduce_from_right(&self) -> Echelon {
        self.reduce_with_order((0..self.n).rev().collect())
    }

    fn reduce_with_order(&self, columns: Vec<usize>) -> Echelon {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in columns {
            if r == rows.len() {
                break;
            }
            let Some(p) = (r..rows.len()).find(|&i| rows[i].get(col)) else {
                continue;
            };
            rows.swap(r, p);
            let pivot_row = rows[r];
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.get(col) {
                    *row = *row ^ pivot_row;
                }
            }
            pivots.push(col);
            r += 1;
        }
        rows.truncate(r);
        Echelon {
            reduced: BinaryMatrix { n: self.n, rows },
            rank: r,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.row_reduce().rank
    }

    pub fn is_independent(&self) -> bool {
        self.rank() == self.n_rows()
    }

    /// Basis of `{v : row·v even for every row}`, one vector per free column.
    pub fn null_space(&self) -> BinaryMatrix {
        let ech = self.row_reduce();
        let mut is_pivot = vec![false; self.n];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::with_capacity(self.n - ech.rank);
        for free in (0..self.n).filter(|&c| !is_pivot[c]) {
            let mut v = BitWord::zeros(self.n)
                .expect("n already validated")
                .with_bit(free, true);
            for (row, &p) in ech.reduced.rows.iter().zip(&ech.pivots) {
                if row.get(free) {
                    v = v.with_bit(p, true);
                }
            }
            basis.push(v);
        }
        BinaryMatrix {
            n: self.n,
            rows: basis,
        }
    }

    /// Parity of each row against `u`, packed with row 0 leftmost.
    pub fn syndrome(&self, u: &BitWord) -> Result<BitWord> {
        let mut s = BitWord::zeros(self.n_rows())?;
        for (i, row) in self.rows.iter().enumerate() {
            if row.dot(u)? {
                s = s.with_bit(i, true);
            }
        }
        Ok(s)
    }

    /// `sum_i coeffs[i] * row_i`.
    pub fn combine(&self, coeffs: &BitWord) -> Result<BitWord> {
        if coeffs.len() != self.n_rows() {
            return Err(Error::LengthMismatch {
                left: self.n_rows(),
                right: coeffs.len(),
            });
        }
        let mut acc = BitWord::zeros(self.n)?;
        for i in coeffs.support() {
            acc = acc ^ self.rows[i];
        }
        Ok(acc)
    }

    /// All `2^m` combinations of rows, indexed by the coefficient word.
    pub fn span(&self) -> Result<Vec<BitWord>> {
        let m = self.n_rows();
        if m > 24 {
            return Err(Error::Capability(format!(
                "span of {m} rows is too large to enumerate"
            )));
        }
        let mut out = Vec::with_capacity(1 << m);
        let zero = BitWord::zeros(self.n)?;
        out.push(zero);
        // Row 0 is the most significant coefficient bit; build the table so
        // that out[c] = combine(c).
        for i in (0..m).rev() {
            let row = self.rows[i];
            let len = out.len();
            for c in 0..len {
                let w = out[c] ^ row;
                out.push(w);
            }
        }
        Ok(out)
    }

    pub fn contains_in_row_space(&self, w: &BitWord) -> Result<bool> {
        if w.len() != self.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: w.len(),
            });
        }
        let ech = self.row_reduce();
        let mut r = *w;
        for (row, &p) in ech.reduced.rows.iter().zip(&ech.pivots) {
            if r.get(p) {
                r = r ^ *row;
            }
        }
        Ok(r.is_zero())
    }

    /// Coefficients `c` (one bit per row) with `sum_i c_i * row_i == target`,
    /// or `None` when `target` is outside the row space.
    pub fn solve_left(&self, target: &BitWord) -> Result<Option<BitWord>> {
        if target.len() != self.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: target.len(),
            });
        }
        let m = self.n_rows();
        if m > 64 {
            return Err(Error::Capability(format!("solve over {m} rows")));
        }
        // Each working row carries the set of original rows it is built from.
        let mut work: Vec<(BitWord, u64)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (*r, 1u64 << i))
            .collect();
        let mut residual = (*target, 0u64);
        let mut r = 0;
        for col in 0..self.n {
            let Some(p) = (r..m).find(|&i| work[i].0.get(col)) else {
                continue;
            };
            work.swap(r, p);
            let (prow, pmask) = work[r];
            for (i, row) in work.iter_mut().enumerate() {
                if i != r && row.0.get(col) {
                    row.0 = row.0 ^ prow;
                    row.1 ^= pmask;
                }
            }
            if residual.0.get(col) {
                residual.0 = residual.0 ^ prow;
                residual.1 ^= pmask;
            }
            r += 1;
        }
        if !residual.0.is_zero() {
            return Ok(None);
        }
        let mut coeffs = BitWord::zeros(m)?;
        for i in 0..m {
            if residual.1 >> i & 1 == 1 {
                coeffs = coeffs.with_bit(i, true);
            }
        }
        Ok(Some(coeffs))
    }

    pub fn same_row_space(&self, other: &BinaryMatrix) -> bool {
        self.n == other.n && self.row_reduce().reduced == other.row_reduce().reduced
    }
}

impl fmt::Display for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BinaryMatrix")
            .field("n", &self.n)
            .field(
                "rows",
                &self.rows.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            )
            .finish()
    }
}

impl FromStr for BinaryMatrix {
    type Err = Error;

    /// One word per line; blank lines and `#` comments are skipped.
    fn from_str(s: &str) -> Result<Self> {
        let lines: Vec<&str> = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        Self::from_strs(&lines)
    }
}

impl Serialize for BinaryMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.rows.len()))?;
        for r in &self.rows {
            seq.serialize_element(&r.to_string())?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> BitWord {
        s.parse().unwrap()
    }

    /// Independent checker: count common ones character by character.
    fn brute_parity(h: &str, u: &str) -> CheckOutcome {
        let common = h
            .chars()
            .zip(u.chars())
            .filter(|&(a, b)| a == '1' && b == '1')
            .count();
        if common % 2 == 0 {
            CheckOutcome::Satisfied
        } else {
            CheckOutcome::Failed
        }
    }

    #[test]
    fn xor_examples() {
        assert_eq!(w("0001111") ^ w("0110011"), w("0111100"));
        assert_eq!(w("101") ^ w("011"), w("110"));
        let a = w("1011001");
        assert!((a ^ a).is_zero());
    }

    #[test]
    fn xor_length_mismatch_is_an_error() {
        assert_eq!(
            w("101").xor(&w("1010")),
            Err(Error::LengthMismatch { left: 3, right: 4 })
        );
    }

    #[test]
    fn parity_check_examples() {
        for (h, u) in [
            ("1110000", "0000000"),
            ("0111100", "1010101"),
            ("1111111", "1100110"),
        ] {
            assert_eq!(
                parity_check(&w(h), &w(u)).unwrap(),
                brute_parity(h, u),
                "{h} . {u}"
            );
        }
        assert_eq!(
            parity_check(&w("1110000"), &w("0000000")).unwrap(),
            CheckOutcome::Satisfied
        );
        // AND = 0010100, weight 2
        assert_eq!(
            parity_check(&w("0111100"), &w("1010101")).unwrap(),
            CheckOutcome::Satisfied
        );
        assert_eq!(
            parity_check(&w("0111100"), &w("0000101")).unwrap(),
            CheckOutcome::Failed
        );
        assert_eq!(
            parity_check(&w("1111111"), &w("1100110")).unwrap(),
            CheckOutcome::Satisfied
        );
    }

    #[test]
    fn bit_order_matches_print_order() {
        let x = w("1000000");
        assert_eq!(x.value(), 64);
        assert!(x.get(0));
        assert_eq!(x.to_string(), "1000000");
        assert_eq!(BitWord::unit(3, 2).unwrap(), w("001"));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(matches!("10a".parse::<BitWord>(), Err(Error::Parse(_))));
        assert!(matches!(
            "0".repeat(33).parse::<BitWord>(),
            Err(Error::WordTooLong(33))
        ));
    }

    #[test]
    fn row_reduce_examples() {
        let m = BinaryMatrix::from_strs(&["11", "01"]).unwrap();
        let e = m.row_reduce();
        assert_eq!(e.rank, 2);
        assert_eq!(e.reduced, BinaryMatrix::from_strs(&["10", "01"]).unwrap());

        let gs = BinaryMatrix::from_strs(&["0001111", "0110011", "1010101"]).unwrap();
        assert_eq!(gs.rank(), 3);

        let z = BinaryMatrix::new(5, vec![BitWord::zeros(5).unwrap(); 3]).unwrap();
        assert_eq!(z.rank(), 0);
        assert!(z.row_reduce().pivots.is_empty());
    }

    #[test]
    fn leftmost_pivot_wins() {
        let m = BinaryMatrix::from_strs(&["011", "110"]).unwrap();
        assert_eq!(m.row_reduce().pivots, vec![0, 1]);
    }

    #[test]
    fn right_reduction_keeps_systematic_checks() {
        let h = BinaryMatrix::from_strs(&["0111100", "1011010", "1101001"]).unwrap();
        let e = h.row_reduce_from_right();
        assert_eq!(e.pivots, vec![6, 5, 4]);
        assert!(e.reduced.same_row_space(&h));
        let hrep = BinaryMatrix::from_strs(&["110", "101"]).unwrap();
        let e = hrep.row_reduce_from_right();
        assert_eq!(e.pivots, vec![2, 1]);
        assert_eq!(e.reduced.rows(), &[w("101"), w("110")]);
    }

    #[test]
    fn null_space_of_simplex_generator() {
        let gs = BinaryMatrix::from_strs(&["0001111", "0110011", "1010101"]).unwrap();
        let ns = gs.null_space();
        assert_eq!(ns.n_rows(), 4);
        // every returned word passes every check of G_s, by brute force
        for v in ns.span().unwrap() {
            for g in gs.rows() {
                assert_eq!(
                    brute_parity(&g.to_string(), &v.to_string()),
                    CheckOutcome::Satisfied
                );
            }
        }
        let hc = BinaryMatrix::from_strs(&["1101001", "0101010", "1001100", "1110000"]).unwrap();
        assert!(ns.same_row_space(&hc));
    }

    #[test]
    fn null_space_edge_cases() {
        let id = BinaryMatrix::identity(5).unwrap();
        assert_eq!(id.null_space().n_rows(), 0);

        let ones = BinaryMatrix::new(6, vec![BitWord::ones(6).unwrap()]).unwrap();
        let ns = ones.null_space();
        assert_eq!(ns.n_rows(), 5);
        let even: Vec<_> = BitWord::all(6)
            .unwrap()
            .filter(|v| v.weight() % 2 == 0)
            .collect();
        let mut span = ns.span().unwrap();
        span.sort();
        assert_eq!(span, even);
    }

    #[test]
    fn span_is_indexed_by_coefficients() {
        let g = BinaryMatrix::from_strs(&["100", "010"]).unwrap();
        let s = g.span().unwrap();
        for (c, word) in s.iter().enumerate() {
            let coeffs = BitWord::new(c as u32, 2).unwrap();
            assert_eq!(*word, g.combine(&coeffs).unwrap());
        }
    }

    #[test]
    fn solve_left_finds_combination() {
        let g = BinaryMatrix::from_strs(&["0001111", "0110011", "1010101"]).unwrap();
        let c = g.solve_left(&w("1101001")).unwrap().unwrap();
        assert_eq!(g.combine(&c).unwrap(), w("1101001"));
        assert_eq!(g.solve_left(&w("1000000")).unwrap(), None);
    }

    #[test]
    fn matrix_text_round_trip() {
        let text = "110\n101";
        let m: BinaryMatrix = text.parse().unwrap();
        assert_eq!(m.to_string(), text);
    }
}
