//! Dense state vectors over system ⊗ environment ⊗ ancilla qubits.
//!
//! Qubit `q` of an `N`-qubit register contributes `2^(N-1-q)` to a basis
//! index, so the system word occupies the most significant bits and a
//! [`BitWord`] over the system qubits indexes amplitudes directly.
//! "Basis 2" is the Hadamard-rotated basis `|0̄⟩ = (|0⟩+|1⟩)/√2`,
//! `|1̄⟩ = (|0⟩-|1⟩)/√2`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gf2::{BinaryMatrix, BitWord};

/// Largest register simulated densely.
pub const MAX_QUBITS: usize = 20;
/// Default magnitude below which an amplitude is treated as absent.
pub const DEFAULT_SUPPORT_TOL: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub type Matrix2 = [[Complex64; 2]; 2];
pub type Matrix4 = [[Complex64; 4]; 4];

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n_sys: usize,
    n_env: usize,
    n_anc: usize,
    amps: Vec<Complex64>,
}

impl QuantumState {
    /// `|0…0⟩` on all registers.
    pub fn zero(n_sys: usize, n_env: usize, n_anc: usize) -> Result<Self> {
        let n = n_sys + n_env + n_anc;
        if n > MAX_QUBITS {
            return Err(Error::Capability(format!(
                "{n} qubits exceeds the dense-simulation limit of {MAX_QUBITS}"
            )));
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Ok(Self {
            n_sys,
            n_env,
            n_anc,
            amps,
        })
    }

    /// Normalizes `amps`; fails on a zero vector or a length that does not
    /// match the registers.
    pub fn from_amplitudes(
        n_sys: usize,
        n_env: usize,
        n_anc: usize,
        amps: Vec<Complex64>,
    ) -> Result<Self> {
        let mut s = Self::zero(n_sys, n_env, n_anc)?;
        if amps.len() != s.amps.len() {
            return Err(Error::Usage(format!(
                "expected {} amplitudes, got {}",
                s.amps.len(),
                amps.len()
            )));
        }
        s.amps = amps;
        s.normalize()?;
        Ok(s)
    }

    /// Equal-weight superposition of the given system words.
    pub fn uniform(n_sys: usize, words: &[BitWord]) -> Result<Self> {
        Self::superposition(n_sys, words.iter().map(|w| (*w, ONE)))
    }

    /// `Σ c_w |w⟩` over system words, normalized.
    pub fn superposition(
        n_sys: usize,
        terms: impl IntoIterator<Item = (BitWord, Complex64)>,
    ) -> Result<Self> {
        let mut s = Self::zero(n_sys, 0, 0)?;
        s.amps[0] = ZERO;
        for (w, c) in terms {
            if w.len() != n_sys {
                return Err(Error::LengthMismatch {
                    left: n_sys,
                    right: w.len(),
                });
            }
            s.amps[w.value() as usize] += c;
        }
        s.normalize()?;
        Ok(s)
    }

    /// Appends fresh `|0…0⟩` environment and ancilla registers.
    pub fn with_registers(&self, n_env: usize, n_anc: usize) -> Result<Self> {
        if self.n_env != 0 || self.n_anc != 0 {
            return Err(Error::Usage("registers already attached".into()));
        }
        let mut out = Self::zero(self.n_sys, n_env, n_anc)?;
        out.amps[0] = ZERO;
        let shift = n_env + n_anc;
        for (i, a) in self.amps.iter().enumerate() {
            out.amps[i << shift] = *a;
        }
        Ok(out)
    }

    pub fn n_sys(&self) -> usize {
        self.n_sys
    }

    pub fn n_env(&self) -> usize {
        self.n_env
    }

    pub fn n_anc(&self) -> usize {
        self.n_anc
    }

    pub fn n_qubits(&self) -> usize {
        self.n_sys + self.n_env + self.n_anc
    }

    /// Register index of environment qubit `i`.
    pub fn env_qubit(&self, i: usize) -> usize {
        assert!(i < self.n_env);
        self.n_sys + i
    }

    /// Register index of ancilla qubit `i`.
    pub fn anc_qubit(&self, i: usize) -> usize {
        assert!(i < self.n_anc);
        self.n_sys + self.n_env + i
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sqr().sqrt();
        if n < 1e-300 || !n.is_finite() {
            return Err(Error::Usage("state has zero norm".into()));
        }
        let inv = 1.0 / n;
        for a in &mut self.amps {
            *a *= inv;
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits() {
            return Err(Error::Usage(format!(
                "qubit {q} out of range for {} qubits",
                self.n_qubits()
            )));
        }
        Ok(())
    }

    #[inline]
    fn bit(&self, q: usize) -> usize {
        1 << (self.n_qubits() - 1 - q)
    }

    /// Applies a 2×2 unitary `u` (rows = output, columns = input) to qubit `q`.
    pub fn apply_single(&mut self, q: usize, u: &Matrix2) -> Result<()> {
        self.check_qubit(q)?;
        let b = self.bit(q);
        for i in 0..self.amps.len() {
            if i & b == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | b]);
                self.amps[i] = u[0][0] * a0 + u[0][1] * a1;
                self.amps[i | b] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
        Ok(())
    }

    /// Applies a 4×4 unitary on `(q_hi, q_lo)`, with `q_hi` the more
    /// significant index bit of the operator's basis `|q_hi q_lo⟩`.
    pub fn apply_two(&mut self, q_hi: usize, q_lo: usize, u: &Matrix4) -> Result<()> {
        self.check_qubit(q_hi)?;
        self.check_qubit(q_lo)?;
        if q_hi == q_lo {
            return Err(Error::Usage("two-qubit gate on a single qubit".into()));
        }
        let (bh, bl) = (self.bit(q_hi), self.bit(q_lo));
        for i in 0..self.amps.len() {
            if i & (bh | bl) == 0 {
                let idx = [i, i | bl, i | bh, i | bh | bl];
                let v = idx.map(|k| self.amps[k]);
                for (r, &k) in idx.iter().enumerate() {
                    self.amps[k] = (0..4).map(|c| u[r][c] * v[c]).sum();
                }
            }
        }
        Ok(())
    }

    /// Basis-1 NOT.
    pub fn apply_x(&mut self, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        let b = self.bit(q);
        for i in 0..self.amps.len() {
            if i & b == 0 {
                self.amps.swap(i, i | b);
            }
        }
        Ok(())
    }

    /// Sign flip of `|1⟩`; this is the NOT of basis 2.
    pub fn apply_z(&mut self, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        let b = self.bit(q);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & b != 0 {
                *a = -*a;
            }
        }
        Ok(())
    }

    /// The basis-1 ↔ basis-2 rotation on one qubit (self-inverse).
    pub fn apply_h(&mut self, q: usize) -> Result<()> {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        self.apply_single(q, &[[h, h], [h, -h]])
    }

    /// Basis-1 controlled NOT.
    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::Usage("CNOT control equals target".into()));
        }
        let (bc, bt) = (self.bit(control), self.bit(target));
        for i in 0..self.amps.len() {
            if i & bc != 0 && i & bt == 0 {
                self.amps.swap(i, i | bt);
            }
        }
        Ok(())
    }

    /// Probability of reading `1` on qubit `q` in basis 1.
    pub fn prob_one(&self, q: usize) -> Result<f64> {
        self.check_qubit(q)?;
        let b = self.bit(q);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & b != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projects qubit `q` onto `|outcome⟩` and renormalizes; returns the
    /// probability of that outcome. Fails if the outcome has zero weight.
    pub fn project(&mut self, q: usize, outcome: bool) -> Result<f64> {
        self.check_qubit(q)?;
        let b = self.bit(q);
        let mut p = 0.0;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & b != 0) != outcome {
                *a = ZERO;
            } else {
                p += a.norm_sqr();
            }
        }
        self.normalize()?;
        Ok(p)
    }

    pub fn inner(&self, other: &QuantumState) -> Result<Complex64> {
        if self.amps.len() != other.amps.len() {
            return Err(Error::Usage(
                "inner product of states with different registers".into(),
            ));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`, insensitive to global phase.
    pub fn fidelity(&self, other: &QuantumState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Largest `|a_i - b_i|` after removing the relative global phase.
    pub fn max_deviation_up_to_phase(&self, other: &QuantumState) -> Result<f64> {
        let ov = self.inner(other)?;
        let phase = if ov.norm() > 1e-300 {
            ov / ov.norm()
        } else {
            ONE
        };
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest `|a_i - b_i|` with no phase adjustment.
    pub fn max_deviation(&self, other: &QuantumState) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Marginal distribution of the system word in basis 1.
    pub fn system_probabilities(&self) -> Vec<f64> {
        let shift = self.n_env + self.n_anc;
        let mut p = vec![0.0; 1 << self.n_sys];
        for (i, a) in self.amps.iter().enumerate() {
            p[i >> shift] += a.norm_sqr();
        }
        p
    }

    /// Density matrix of the system register, tracing out environment and
    /// ancilla.
    pub fn system_density(&self) -> DensityMatrix {
        let shift = self.n_env + self.n_anc;
        let rest = 1usize << shift;
        let dim = 1usize << self.n_sys;
        let mut rho = DensityMatrix::zeros(dim);
        for s1 in 0..dim {
            for s2 in s1..dim {
                let v: Complex64 = (0..rest)
                    .map(|r| self.amps[s1 * rest + r] * self.amps[s2 * rest + r].conj())
                    .sum();
                rho.data[s1 * dim + s2] = v;
                rho.data[s2 * dim + s1] = v.conj();
            }
        }
        rho
    }

    /// CSV of `(basis-index, word, re, im)` for amplitudes above `tol`; the
    /// word covers every qubit of the register.
    pub fn dump_csv(&self, tol: f64) -> String {
        let n = self.n_qubits();
        let mut out = String::from("index,word,re,im\n");
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() > tol {
                let word = BitWord::new(i as u32, n).expect("index fits the register");
                writeln!(out, "{i},{word},{:.16e},{:.16e}", a.re, a.im).expect("string write");
            }
        }
        out
    }
}

/// Row-major complex square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    /// `self += weight * other`.
    pub fn add_scaled(&mut self, weight: f64, other: &DensityMatrix) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * weight;
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        // ρ is Hermitian, so Tr ρ² = Σ |ρ_ij|²
        self.data.iter().map(Complex64::norm_sqr).sum()
    }

    /// `⟨ψ|ρ|ψ⟩` for a system-only pure state.
    pub fn expectation(&self, psi: &QuantumState) -> Result<f64> {
        Ok(self.sandwich(psi, psi)?.re)
    }

    /// `⟨bra|ρ|ket⟩` for system-only pure states.
    pub fn sandwich(&self, bra: &QuantumState, ket: &QuantumState) -> Result<Complex64> {
        let (a, b) = (bra.amplitudes(), ket.amplitudes());
        if a.len() != self.dim || b.len() != self.dim {
            return Err(Error::Usage(
                "state and density matrix dimensions differ".into(),
            ));
        }
        let mut acc = ZERO;
        for (r, ar) in a.iter().enumerate() {
            if *ar == ZERO {
                continue;
            }
            let row: Complex64 = b
                .iter()
                .enumerate()
                .map(|(c, bc)| self.get(r, c) * bc)
                .sum();
            acc += ar.conj() * row;
        }
        Ok(acc)
    }
}

/// Reduced state of one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitDensity {
    pub rho: Matrix2,
}

impl SingleQubitDensity {
    /// Off-diagonal coherence factor `α` relative to the reference pure
    /// state `a|0⟩ + b|1⟩`, from `ρ01 = α a b*`. `None` when `a b* = 0`.
    pub fn alpha(&self, a: Complex64, b: Complex64) -> Option<Complex64> {
        let ab = a * b.conj();
        (ab.norm() > 1e-300).then(|| self.rho[0][1] / ab)
    }

    pub fn trace(&self) -> Complex64 {
        self.rho[0][0] + self.rho[1][1]
    }

    pub fn purity(&self) -> f64 {
        self.rho.iter().flatten().map(Complex64::norm_sqr).sum()
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let t = self.trace().re;
        let det = (self.rho[0][0] * self.rho[1][1] - self.rho[0][1] * self.rho[1][0]).re;
        let disc = (t * t / 4.0 - det).max(0.0).sqrt();
        [t / 2.0 - disc, t / 2.0 + disc]
    }

    /// Hermitian, unit trace, eigenvalues in `[0, 1]`, all within `tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        let herm = (self.rho[0][1] - self.rho[1][0].conj()).norm() < tol
            && self.rho[0][0].im.abs() < tol
            && self.rho[1][1].im.abs() < tol;
        let [lo, hi] = self.eigenvalues();
        herm && (self.trace() - ONE).norm() < tol && lo > -tol && hi < 1.0 + tol
    }
}

/// A generator matrix with one phase angle per row. Combining distinct rows
/// multiplies their phase factors; a row combined with itself cancels to
/// the zero word with unit phase.
#[derive(Debug, Clone)]
pub struct PhasedGenerator {
    matrix: BinaryMatrix,
    phases: Vec<f64>,
}

impl PhasedGenerator {
    pub fn new(matrix: BinaryMatrix, phases: Vec<f64>) -> Result<Self> {
        if phases.len() != matrix.n_rows() {
            return Err(Error::Usage(format!(
                "{} phases for {} rows",
                phases.len(),
                matrix.n_rows()
            )));
        }
        if !matrix.is_independent() {
            return Err(Error::DependentRows(
                "phased generator rows must be independent".into(),
            ));
        }
        Ok(Self { matrix, phases })
    }

    /// All phases zero.
    pub fn unphased(matrix: BinaryMatrix) -> Result<Self> {
        let k = matrix.n_rows();
        Self::new(matrix, vec![0.0; k])
    }

    pub fn matrix(&self) -> &BinaryMatrix {
        &self.matrix
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// XOR of the listed rows (repeats allowed) and the product of the phase
    /// factors of rows used an odd number of times.
    pub fn combine(&self, rows: &[usize]) -> Result<(BitWord, Complex64)> {
        let mut odd = vec![false; self.matrix.n_rows()];
        for &r in rows {
            if r >= odd.len() {
                return Err(Error::Usage(format!("row {r} out of range")));
            }
            odd[r] = !odd[r];
        }
        let mut word = BitWord::zeros(self.matrix.n_cols())?;
        let mut angle = 0.0;
        for (r, _) in odd.iter().enumerate().filter(|(_, &o)| o) {
            word = word ^ self.matrix.row(r);
            angle += self.phases[r];
        }
        Ok((word, Complex64::from_polar(1.0, angle)))
    }
}

/// Equal-magnitude superposition of all `2^k` row combinations, each with
/// the product of the phase factors of the rows used.
pub fn state_from_generator(g: &PhasedGenerator) -> Result<QuantumState> {
    let k = g.matrix.n_rows();
    let n = g.matrix.n_cols();
    if k > MAX_QUBITS {
        return Err(Error::Capability(format!("2^{k} terms")));
    }
    let terms = (0..1u32 << k)
        .map(|c| {
            let rows: Vec<usize> = BitWord::new(c, k)?.support().collect();
            g.combine(&rows)
        })
        .collect::<Result<Vec<_>>>()?;
    QuantumState::superposition(n, terms)
}

/// Applies the basis rotation to each listed qubit.
pub fn basis2_transform(s: &QuantumState, qubits: &[usize]) -> Result<QuantumState> {
    let mut out = s.clone();
    for &q in qubits {
        out.apply_h(q)?;
    }
    Ok(out)
}

/// Basis-1 NOT on every system qubit set in `mask`.
pub fn complement_qubits(s: &QuantumState, mask: &BitWord) -> Result<QuantumState> {
    if mask.len() != s.n_sys() {
        return Err(Error::LengthMismatch {
            left: s.n_sys(),
            right: mask.len(),
        });
    }
    let mut out = s.clone();
    for q in mask.support() {
        out.apply_x(q)?;
    }
    Ok(out)
}

/// Marginal distribution of the system word measured in basis 2.
fn basis2_distribution(s: &QuantumState) -> Result<Vec<f64>> {
    let all: Vec<usize> = (0..s.n_sys()).collect();
    Ok(basis2_transform(s, &all)?.system_probabilities())
}

/// Probability that the basis-2 system word satisfies the parity check
/// `check`.
pub fn parity_check_probability(s: &QuantumState, check: &BitWord) -> Result<f64> {
    if check.len() != s.n_sys() {
        return Err(Error::LengthMismatch {
            left: s.n_sys(),
            right: check.len(),
        });
    }
    Ok(basis2_distribution(s)?
        .iter()
        .enumerate()
        .filter(|(w, _)| (check.value() & *w as u32).count_ones().is_multiple_of(2))
        .map(|(_, p)| p)
        .sum::<f64>()
        .clamp(0.0, 1.0))
}

/// System words whose basis-2 amplitude magnitude (marginal, for states with
/// environment or ancilla) exceeds `tol`, in increasing order.
pub fn support_in_basis2(s: &QuantumState, tol: f64) -> Result<Vec<BitWord>> {
    let n = s.n_sys();
    basis2_distribution(s)?
        .iter()
        .enumerate()
        .filter(|(_, p)| p.sqrt() > tol)
        .map(|(w, _)| BitWord::new(w as u32, n))
        .collect()
}

/// Basis-2 amplitudes of a system-only state, indexed by word.
pub fn basis2_amplitudes(s: &QuantumState) -> Result<Vec<Complex64>> {
    if s.n_env() + s.n_anc() != 0 {
        return Err(Error::Usage(
            "basis-2 amplitudes need a system-only state".into(),
        ));
    }
    let all: Vec<usize> = (0..s.n_sys()).collect();
    Ok(basis2_transform(s, &all)?.amplitudes().to_vec())
}

/// Reduced density matrix of `qubit`, tracing out every other qubit.
pub fn reduced_density(s: &QuantumState, qubit: usize) -> Result<SingleQubitDensity> {
    s.check_qubit(qubit)?;
    let b = s.bit(qubit);
    let mut rho = [[ZERO; 2]; 2];
    for i in 0..s.amps.len() {
        if i & b == 0 {
            let (a0, a1) = (s.amps[i], s.amps[i | b]);
            rho[0][0] += a0 * a0.conj();
            rho[0][1] += a0 * a1.conj();
            rho[1][0] += a1 * a0.conj();
            rho[1][1] += a1 * a1.conj();
        }
    }
    Ok(SingleQubitDensity { rho })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn w(s: &str) -> BitWord {
        s.parse().unwrap()
    }

    #[test]
    fn rotation_of_zero_is_plus() {
        let s = QuantumState::zero(1, 0, 0).unwrap();
        let t = basis2_transform(&s, &[0]).unwrap();
        assert!((t.amplitude(0) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((t.amplitude(1) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rotation_is_self_inverse() {
        let s = QuantumState::from_amplitudes(
            3,
            0,
            0,
            (0..8).map(|i| c(i as f64, 1.0 - i as f64)).collect(),
        )
        .unwrap();
        let t = basis2_transform(&basis2_transform(&s, &[0, 2]).unwrap(), &[0, 2]).unwrap();
        assert!(s.max_deviation(&t) < 1e-12);
    }

    #[test]
    fn all_zero_word_is_uniform_in_basis_two() {
        let n = 6;
        let s = QuantumState::zero(n, 0, 0).unwrap();
        let t = basis2_transform(&s, &(0..n).collect::<Vec<_>>()).unwrap();
        let expect = 2f64.powf(-(n as f64) / 2.0);
        assert!(t
            .amplitudes()
            .iter()
            .all(|a| (a - c(expect, 0.0)).norm() < 1e-12));
        assert_eq!(
            support_in_basis2(&s, DEFAULT_SUPPORT_TOL).unwrap().len(),
            1 << n
        );
    }

    #[test]
    fn simplex_state_has_eight_equal_words() {
        let g = PhasedGenerator::unphased(zoo::simplex7().generator().clone()).unwrap();
        let s = state_from_generator(&g).unwrap();
        let amp = 1.0 / 8f64.sqrt();
        let words = [
            "0000000", "1010101", "0110011", "1100110", "0001111", "1011010", "0111100", "1101001",
        ];
        for word in words {
            assert!(
                (s.amplitude(w(word).value() as usize) - c(amp, 0.0)).norm() < 1e-12,
                "{word}"
            );
        }
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_all_ones_row_gives_ghz() {
        let phi = 0.7;
        let g =
            PhasedGenerator::new(BinaryMatrix::from_strs(&["1111"]).unwrap(), vec![phi]).unwrap();
        let s = state_from_generator(&g).unwrap();
        assert!((s.amplitude(0) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
        assert!((s.amplitude(15) - Complex64::from_polar(FRAC_1_SQRT_2, phi)).norm() < 1e-12);
    }

    #[test]
    fn empty_generator_gives_zero_word() {
        let g = PhasedGenerator::unphased(BinaryMatrix::empty(4).unwrap()).unwrap();
        let s = state_from_generator(&g).unwrap();
        assert_eq!(s.amplitude(0), ONE);
    }

    #[test]
    fn row_combined_with_itself_is_zero_with_unit_phase() {
        let g =
            PhasedGenerator::new(zoo::simplex7().generator().clone(), vec![0.3, 1.1, 2.0]).unwrap();
        let (word, phase) = g.combine(&[1, 1]).unwrap();
        assert!(word.is_zero());
        assert_eq!(phase, ONE);
        let (word, phase) = g.combine(&[0, 2]).unwrap();
        assert_eq!(word, w("1011010"));
        assert!((phase - Complex64::from_polar(1.0, 2.3)).norm() < 1e-15);
    }

    #[test]
    fn complement_examples() {
        let ghz = QuantumState::uniform(3, &[w("000"), w("111")]).unwrap();
        let flipped = complement_qubits(&ghz, &w("100")).unwrap();
        let expect = QuantumState::uniform(3, &[w("100"), w("011")]).unwrap();
        assert!(flipped.max_deviation(&expect) < 1e-15);
        assert_eq!(complement_qubits(&ghz, &w("000")).unwrap(), ghz);
    }

    #[test]
    fn complement_flips_signs_in_basis_two() {
        // |w̄⟩ in basis 1 is H^{⊗n}|w⟩
        let n = 4;
        for word in BitWord::all(n).unwrap() {
            let all: Vec<usize> = (0..n).collect();
            let bar = basis2_transform(&QuantumState::uniform(n, &[word]).unwrap(), &all).unwrap();
            for j in 0..n {
                let out = complement_qubits(&bar, &BitWord::unit(n, j).unwrap()).unwrap();
                let sign = if word.get(j) { -1.0 } else { 1.0 };
                let expect = QuantumState::from_amplitudes(
                    n,
                    0,
                    0,
                    bar.amplitudes().iter().map(|a| a * sign).collect(),
                )
                .unwrap();
                assert!(out.max_deviation(&expect) < 1e-12);
            }
        }
    }

    #[test]
    fn ghz_interference() {
        for phi in [0.0, 0.4, PI / 3.0, PI, 5.0] {
            let g = PhasedGenerator::new(BinaryMatrix::from_strs(&["111"]).unwrap(), vec![phi])
                .unwrap();
            let s = state_from_generator(&g).unwrap();
            let p = parity_check_probability(&s, &w("111")).unwrap();
            assert!((p - (phi / 2.0).cos().powi(2)).abs() < 1e-12);
            let amps = basis2_amplitudes(&s).unwrap();
            let e = Complex64::from_polar(1.0, phi);
            for word in BitWord::all(3).unwrap() {
                let expect = if word.weight() % 2 == 0 {
                    (ONE + e) / 4.0
                } else {
                    (ONE - e) / 4.0
                };
                assert!(
                    (amps[word.value() as usize] - expect).norm() < 1e-12,
                    "{word} φ={phi}"
                );
            }
        }
    }

    #[test]
    fn zero_phase_check_is_certain() {
        let g = PhasedGenerator::unphased(zoo::simplex7().generator().clone()).unwrap();
        let s = state_from_generator(&g).unwrap();
        for row in zoo::simplex7().generator().rows() {
            assert_eq!(parity_check_probability(&s, row).unwrap(), 1.0);
        }
    }

    #[test]
    fn repetition_support_is_even_parity() {
        let s = QuantumState::uniform(3, &[w("000"), w("111")]).unwrap();
        assert_eq!(
            support_in_basis2(&s, DEFAULT_SUPPORT_TOL).unwrap(),
            vec![w("000"), w("011"), w("101"), w("110")]
        );
    }

    #[test]
    fn reduced_density_of_product_state() {
        let (a, b) = (c(0.6, 0.0), c(0.0, 0.8));
        let s = QuantumState::from_amplitudes(1, 0, 0, vec![a, b])
            .unwrap()
            .with_registers(2, 1)
            .unwrap();
        let r = reduced_density(&s, 0).unwrap();
        assert!((r.rho[0][0] - a * a.conj()).norm() < 1e-15);
        assert!((r.rho[0][1] - a * b.conj()).norm() < 1e-15);
        assert!((r.rho[1][0] - a.conj() * b).norm() < 1e-15);
        assert!((r.alpha(a, b).unwrap() - ONE).norm() < 1e-15);
        assert!(r.is_valid(1e-12));
    }

    #[test]
    fn reduced_density_of_bell_pair_is_mixed() {
        let s = QuantumState::uniform(2, &[w("00"), w("11")]).unwrap();
        for q in 0..2 {
            let r = reduced_density(&s, q).unwrap();
            assert!((r.rho[0][0].re - 0.5).abs() < 1e-15 && r.rho[0][1].norm() < 1e-15);
            assert!((r.purity() - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn system_density_traces_out_environment() {
        let s = QuantumState::from_amplitudes(
            1,
            1,
            0,
            vec![c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(-0.5, 0.0)],
        )
        .unwrap();
        let rho = s.system_density();
        assert!((rho.trace() - ONE).norm() < 1e-15);
        assert!((rho.purity() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn register_limit() {
        assert!(matches!(
            QuantumState::zero(10, 6, 5),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn csv_dump_lists_nonzero_amplitudes() {
        let s = QuantumState::uniform(2, &[w("00"), w("11")]).unwrap();
        let csv = s.dump_csv(DEFAULT_SUPPORT_TOL);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "index,word,re,im");
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("3,11,7.0710678118654746e-1"));
    }
}
