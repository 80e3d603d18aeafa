//! Encoding and correction circuits for CSS triples, a branch-enumerating
//! executor, and the end-to-end recovery experiments.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channels::{
    apply_defection, apply_entangle, apply_phase_errors, DefectionSpec, EntangleSpec,
    PhaseErrorSpec,
};
use crate::codes::{LinearCode, SyndromeTable};
use crate::css::CssTriple;
use crate::error::{Error, Result};
use crate::gf2::{BinaryMatrix, BitWord};
use crate::qstate::{reduced_density, DensityMatrix, QuantumState, SingleQubitDensity};
use crate::zoo;

/// Branches lighter than this are dropped during enumeration.
pub const BRANCH_CUTOFF: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Basis {
    One,
    Two,
}

impl TryFrom<u8> for Basis {
    type Error = Error;

    fn try_from(b: u8) -> Result<Self> {
        match b {
            1 => Ok(Basis::One),
            2 => Ok(Basis::Two),
            _ => Err(Error::Usage(format!("basis must be 1 or 2, got {b}"))),
        }
    }
}

impl From<Basis> for u8 {
    fn from(b: Basis) -> u8 {
        match b {
            Basis::One => 1,
            Basis::Two => 2,
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", u8::from(*self))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "kebab-case")]
pub enum Gate {
    Not {
        qubit: usize,
        basis: Basis,
    },
    Cnot {
        control: usize,
        target: usize,
        basis: Basis,
    },
    /// `|0⟩ → |0̄⟩`, `|1⟩ → |1̄⟩`.
    Rotate {
        qubit: usize,
    },
    Measure {
        qubit: usize,
        basis: Basis,
        slot: usize,
    },
    /// NOT on every target when the listed slots read `pattern`.
    ClassicalNot {
        slots: Vec<usize>,
        pattern: BitWord,
        targets: Vec<usize>,
        basis: Basis,
    },
    /// Returns a measured qubit to the basis zero state: NOT when `slot`
    /// reads 1.
    Reset {
        qubit: usize,
        basis: Basis,
        slot: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    n_slots: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, n_slots: usize) -> Self {
        Self {
            n_qubits,
            n_slots,
            gates: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Appends `gate` after checking it against the gates already present.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let mut written = self.written_slots();
        self.check_gate(&gate, &mut written)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        for g in &other.gates {
            self.push(g.clone())?;
        }
        Ok(())
    }

    fn written_slots(&self) -> Vec<bool> {
        let mut w = vec![false; self.n_slots];
        for g in &self.gates {
            if let Gate::Measure { slot, .. } = g {
                w[*slot] = true;
            }
        }
        w
    }

    /// Qubit indices in range and every slot written before it is read.
    pub fn validate(&self) -> Result<()> {
        let mut written = vec![false; self.n_slots];
        for g in &self.gates {
            self.check_gate(g, &mut written)?;
        }
        Ok(())
    }

    fn check_gate(&self, g: &Gate, written: &mut [bool]) -> Result<()> {
        let q = |i: usize| -> Result<()> {
            if i >= self.n_qubits {
                return Err(Error::Usage(format!(
                    "qubit {i} out of range ({} qubits)",
                    self.n_qubits
                )));
            }
            Ok(())
        };
        let read = |s: usize, written: &[bool]| -> Result<()> {
            if s >= self.n_slots || !written[s] {
                return Err(Error::Usage(format!(
                    "classical slot {s} read before it is written"
                )));
            }
            Ok(())
        };
        match g {
            Gate::Not { qubit, .. } | Gate::Rotate { qubit } => q(*qubit),
            Gate::Cnot {
                control, target, ..
            } => {
                q(*control)?;
                q(*target)?;
                if control == target {
                    return Err(Error::Usage("CNOT control equals target".into()));
                }
                Ok(())
            }
            Gate::Measure { qubit, slot, .. } => {
                q(*qubit)?;
                if *slot >= self.n_slots {
                    return Err(Error::Usage(format!("classical slot {slot} out of range")));
                }
                written[*slot] = true;
                Ok(())
            }
            Gate::ClassicalNot {
                slots,
                pattern,
                targets,
                ..
            } => {
                if pattern.len() != slots.len() {
                    return Err(Error::LengthMismatch {
                        left: slots.len(),
                        right: pattern.len(),
                    });
                }
                for &s in slots {
                    read(s, written)?;
                }
                targets.iter().try_for_each(|&t| q(t))
            }
            Gate::Reset { qubit, slot, .. } => {
                q(*qubit)?;
                read(*slot, written)
            }
        }
    }
}

/// One measurement branch: its probability, the conditional state, and the
/// classical records of every circuit run so far.
#[derive(Debug, Clone)]
pub struct Branch {
    pub weight: f64,
    pub state: QuantumState,
    pub history: Vec<Vec<bool>>,
}

impl Branch {
    pub fn new(state: QuantumState) -> Self {
        Self {
            weight: 1.0,
            state,
            history: Vec::new(),
        }
    }
}

/// How measurements are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum MeasureMode {
    /// Keep every outcome as a weighted branch.
    Enumerate,
    /// Draw one outcome per measurement from a seeded generator.
    Sampled { seed: u64 },
}

pub struct Executor {
    rng: Option<ChaCha8Rng>,
}

impl Executor {
    pub fn new(mode: MeasureMode) -> Self {
        let rng = match mode {
            MeasureMode::Enumerate => None,
            MeasureMode::Sampled { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        };
        Self { rng }
    }

    pub fn enumerate() -> Self {
        Self::new(MeasureMode::Enumerate)
    }

    pub fn run(&mut self, circuit: &Circuit, branches: Vec<Branch>) -> Result<Vec<Branch>> {
        circuit.validate()?;
        let mut out = Vec::with_capacity(branches.len());
        for b in branches {
            if b.state.n_qubits() < circuit.n_qubits() {
                return Err(Error::Usage(format!(
                    "circuit needs {} qubits, state has {}",
                    circuit.n_qubits(),
                    b.state.n_qubits()
                )));
            }
            let mut work = vec![(b, vec![false; circuit.n_slots()])];
            for g in circuit.gates() {
                let mut next = Vec::with_capacity(work.len());
                for (br, slots) in work {
                    self.step(g, br, slots, &mut next)?;
                }
                work = next;
            }
            out.extend(work.into_iter().map(|(mut br, slots)| {
                br.history.push(slots);
                br
            }));
        }
        Ok(out)
    }

    pub fn run_state(&mut self, circuit: &Circuit, state: QuantumState) -> Result<Vec<Branch>> {
        self.run(circuit, vec![Branch::new(state)])
    }

    fn step(
        &mut self,
        g: &Gate,
        mut br: Branch,
        mut slots: Vec<bool>,
        next: &mut Vec<(Branch, Vec<bool>)>,
    ) -> Result<()> {
        let s = &mut br.state;
        match g {
            Gate::Not { qubit, basis } => not(s, *qubit, *basis)?,
            Gate::Cnot {
                control,
                target,
                basis,
            } => match basis {
                Basis::One => s.apply_cnot(*control, *target)?,
                // H⊗H · CNOT · H⊗H reverses control and target
                Basis::Two => s.apply_cnot(*target, *control)?,
            },
            Gate::Rotate { qubit } => s.apply_h(*qubit)?,
            Gate::ClassicalNot {
                slots: read,
                pattern,
                targets,
                basis,
            } => {
                let hit = read
                    .iter()
                    .enumerate()
                    .all(|(i, &sl)| slots[sl] == pattern.get(i));
                if hit {
                    for &t in targets {
                        not(s, t, *basis)?;
                    }
                }
            }
            Gate::Reset { qubit, basis, slot } => {
                if slots[*slot] {
                    not(s, *qubit, *basis)?;
                }
            }
            Gate::Measure { qubit, basis, slot } => {
                let (q, basis, slot) = (*qubit, *basis, *slot);
                if basis == Basis::Two {
                    s.apply_h(q)?;
                }
                let p1 = s.prob_one(q)?;
                let outcomes: Vec<(bool, f64)> = match self.rng.as_mut() {
                    None => [(false, 1.0 - p1), (true, p1)]
                        .into_iter()
                        .filter(|&(_, p)| p * br.weight > BRANCH_CUTOFF)
                        .collect(),
                    Some(rng) => {
                        let one = rng.random::<f64>() < p1;
                        vec![(one, 1.0)]
                    }
                };
                let n_out = outcomes.len();
                for (i, (bit, p)) in outcomes.into_iter().enumerate() {
                    let mut child = if i + 1 == n_out {
                        std::mem::replace(&mut br.state, QuantumState::zero(0, 0, 0)?)
                    } else {
                        br.state.clone()
                    };
                    child.project(q, bit)?;
                    if basis == Basis::Two {
                        child.apply_h(q)?;
                    }
                    let mut child_slots = slots.clone();
                    child_slots[slot] = bit;
                    next.push((
                        Branch {
                            weight: br.weight * p,
                            state: child,
                            history: br.history.clone(),
                        },
                        child_slots,
                    ));
                }
                return Ok(());
            }
        }
        next.push((br, std::mem::take(&mut slots)));
        Ok(())
    }
}

fn not(s: &mut QuantumState, q: usize, basis: Basis) -> Result<()> {
    match basis {
        Basis::One => s.apply_x(q),
        Basis::Two => s.apply_z(q),
    }
}

pub fn total_weight(branches: &[Branch]) -> f64 {
    branches.iter().map(|b| b.weight).sum()
}

/// `Σ w_b ρ_sys(b)`.
pub fn mixture_system_density(branches: &[Branch]) -> Result<DensityMatrix> {
    let first = branches
        .first()
        .ok_or_else(|| Error::Usage("no branches".into()))?;
    let mut rho = DensityMatrix::zeros(1 << first.state.n_sys());
    for b in branches {
        rho.add_scaled(b.weight, &b.state.system_density());
    }
    Ok(rho)
}

/// `Σ w_b ρ_q(b)` for a single qubit.
pub fn mixture_reduced_density(branches: &[Branch], qubit: usize) -> Result<SingleQubitDensity> {
    let mut rho = [[ZERO; 2]; 2];
    for b in branches {
        let r = reduced_density(&b.state, qubit)?;
        for (row, rrow) in rho.iter_mut().zip(r.rho) {
            for (x, y) in row.iter_mut().zip(rrow) {
                *x += y * b.weight;
            }
        }
    }
    Ok(SingleQubitDensity { rho })
}

/// Maps the logical inputs (at the logical positions) with all other qubits
/// in `|0⟩` to `Σ c_i |Ci⟩`. Each logical qubit fans its coset offset out
/// from its position; then each generator row of `C` (reduced form) is
/// fanned out from its pivot after rotating the pivot.
pub fn build_encoder(css: &CssTriple) -> Result<Circuit> {
    let n = css.n();
    let mut c = Circuit::new(n, 0);
    for (row, &p) in css.offsets().rows().iter().zip(css.logical_positions()) {
        for t in row.support().filter(|&t| t != p) {
            c.push(Gate::Cnot {
                control: p,
                target: t,
                basis: Basis::One,
            })?;
        }
    }
    let ech = css.c().generator().row_reduce();
    for (row, &p) in ech.reduced.rows().iter().zip(&ech.pivots) {
        c.push(Gate::Rotate { qubit: p })?;
        for t in row.support().filter(|&t| t != p) {
            c.push(Gate::Cnot {
                control: p,
                target: t,
                basis: Basis::One,
            })?;
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "style", rename_all = "kebab-case")]
pub enum CorrectorStyle {
    /// Parity accumulated onto code qubits chosen as check pivots.
    InPlace,
    /// Parity accumulated onto ancillas starting at register index `first`.
    Ancilla { first: usize },
}

/// A correction circuit with the table it applies.
#[derive(Debug, Clone)]
pub struct Corrector {
    pub circuit: Circuit,
    pub basis: Basis,
    pub table: SyndromeTable,
    /// Qubits measured, in syndrome-bit order.
    pub measured: Vec<usize>,
    /// Code qubits that are not measured.
    pub data: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectionOutcome {
    pub basis: Basis,
    pub syndrome: BitWord,
    pub correction: BitWord,
    pub weight: f64,
}

impl Corrector {
    /// Interprets the slot record of one run.
    pub fn outcome(&self, slots: &[bool], weight: f64) -> Result<CorrectionOutcome> {
        let syndrome = BitWord::from_bits(&slots[..self.measured.len()])?;
        Ok(CorrectionOutcome {
            basis: self.basis,
            syndrome,
            correction: self.table.lookup(&syndrome)?,
            weight,
        })
    }
}

/// Builds the syndrome extraction and correction circuit for the checks of
/// `C+` (basis 1) or `C⊥` (basis 2).
pub fn build_corrector(
    css: &CssTriple,
    basis: Basis,
    style: CorrectorStyle,
    reencode: bool,
) -> Result<Corrector> {
    let n = css.n();
    let code = match basis {
        Basis::One => css.c_plus(),
        Basis::Two => css.c_perp(),
    };
    match style {
        CorrectorStyle::InPlace => {
            let ech = code.check().row_reduce_from_right();
            // syndrome bits follow the order of the parity qubits
            let mut rows: Vec<(usize, BitWord)> = ech
                .pivots
                .iter()
                .copied()
                .zip(ech.reduced.rows().iter().copied())
                .collect();
            rows.sort_by_key(|(p, _)| *p);
            let parity: Vec<usize> = rows.iter().map(|(p, _)| *p).collect();
            let checks = BinaryMatrix::new(n, rows.into_iter().map(|(_, r)| r).collect())?;
            let table = SyndromeTable::build(&LinearCode::from_matrices(
                code.generator().clone(),
                checks.clone(),
            )?)?;
            let r = parity.len();
            let data: Vec<usize> = (0..n).filter(|j| !parity.contains(j)).collect();
            let mut c = Circuit::new(n, r);
            let fan_in = |c: &mut Circuit| -> Result<()> {
                for (row, &p) in checks.rows().iter().zip(&parity) {
                    for j in row.support().filter(|&j| j != p) {
                        c.push(Gate::Cnot {
                            control: j,
                            target: p,
                            basis,
                        })?;
                    }
                }
                Ok(())
            };
            fan_in(&mut c)?;
            for (slot, &p) in parity.iter().enumerate() {
                c.push(Gate::Measure {
                    qubit: p,
                    basis,
                    slot,
                })?;
            }
            push_corrections(
                &mut c,
                &table,
                r,
                |e| e.support().filter(|j| data.contains(j)).collect(),
                basis,
            )?;
            for (slot, &p) in parity.iter().enumerate() {
                c.push(Gate::Reset {
                    qubit: p,
                    basis,
                    slot,
                })?;
            }
            if reencode {
                fan_in(&mut c)?;
            }
            Ok(Corrector {
                circuit: c,
                basis,
                table,
                measured: parity,
                data,
            })
        }
        CorrectorStyle::Ancilla { first } => {
            if first < n {
                return Err(Error::Usage(format!(
                    "ancillas must follow the {n} code qubits"
                )));
            }
            let checks = code.check();
            let r = checks.n_rows();
            let table = code.syndrome_table()?;
            let anc: Vec<usize> = (first..first + r).collect();
            let mut c = Circuit::new(first + r, r);
            for (row, &a) in checks.rows().iter().zip(&anc) {
                if basis == Basis::Two {
                    c.push(Gate::Rotate { qubit: a })?;
                }
                for j in row.support() {
                    c.push(Gate::Cnot {
                        control: j,
                        target: a,
                        basis,
                    })?;
                }
            }
            for (slot, &a) in anc.iter().enumerate() {
                c.push(Gate::Measure {
                    qubit: a,
                    basis,
                    slot,
                })?;
            }
            push_corrections(&mut c, &table, r, |e| e.support().collect(), basis)?;
            for (slot, &a) in anc.iter().enumerate() {
                c.push(Gate::Reset {
                    qubit: a,
                    basis,
                    slot,
                })?;
                if basis == Basis::Two {
                    c.push(Gate::Rotate { qubit: a })?;
                }
            }
            Ok(Corrector {
                circuit: c,
                basis,
                table,
                measured: anc,
                data: (0..n).collect(),
            })
        }
    }
}

fn push_corrections(
    c: &mut Circuit,
    table: &SyndromeTable,
    r: usize,
    targets: impl Fn(&BitWord) -> Vec<usize>,
    basis: Basis,
) -> Result<()> {
    for (s, e) in table.entries().filter(|(s, _)| !s.is_zero()) {
        let t = targets(&e);
        if !t.is_empty() {
            c.push(Gate::ClassicalNot {
                slots: (0..r).collect(),
                pattern: s,
                targets: t,
                basis,
            })?;
        }
    }
    Ok(())
}

/// Equal superposition of coset `i` of `C` in `C+`.
pub fn coset_state(css: &CssTriple, i: usize) -> Result<QuantumState> {
    QuantumState::uniform(css.n(), &css.coset_words(i)?)
}

/// `Σ c_i |Ci⟩` built directly from the coset words.
pub fn logical_state(css: &CssTriple, logical: &[Complex64]) -> Result<QuantumState> {
    check_logical(css, logical)?;
    let mut amps = vec![ZERO; 1 << css.n()];
    for (i, &ci) in logical.iter().enumerate() {
        let words = css.coset_words(i)?;
        let norm = (words.len() as f64).sqrt();
        for w in words {
            amps[w.value() as usize] += ci / norm;
        }
    }
    QuantumState::from_amplitudes(css.n(), 0, 0, amps)
}

fn check_logical(css: &CssTriple, logical: &[Complex64]) -> Result<()> {
    let k = css.k_logical();
    if logical.len() != 1 << k {
        return Err(Error::Usage(format!(
            "expected {} logical amplitudes for K = {k}, got {}",
            1 << k,
            logical.len()
        )));
    }
    Ok(())
}

/// The unencoded input: logical amplitudes on the logical positions.
pub fn encoder_input(css: &CssTriple, logical: &[Complex64]) -> Result<QuantumState> {
    check_logical(css, logical)?;
    let mut amps = vec![ZERO; 1 << css.n()];
    for (i, &ci) in logical.iter().enumerate() {
        amps[logical_index(css, i)] = ci;
    }
    QuantumState::from_amplitudes(css.n(), 0, 0, amps)
}

/// An encoded block with the amplitudes it stores.
#[derive(Debug, Clone)]
pub struct EncodedBlock {
    pub css: CssTriple,
    pub logical: Vec<Complex64>,
    pub state: QuantumState,
}

impl EncodedBlock {
    /// `1 - Σ_i |⟨Ci|ψ⟩|²` for a system-only state.
    pub fn span_residual(&self, s: &QuantumState) -> Result<f64> {
        let mut inside = 0.0;
        for i in 0..1 << self.css.k_logical() {
            inside += coset_state(&self.css, i)?.fidelity(s)?;
        }
        Ok((1.0 - inside).max(0.0))
    }
}

/// Runs the encoder circuit and checks it against the direct construction.
pub fn encode(css: &CssTriple, logical: &[Complex64]) -> Result<EncodedBlock> {
    let input = encoder_input(css, logical)?;
    let logical = input_logical(css, &input);
    let mut branches = Executor::enumerate().run_state(&build_encoder(css)?, input)?;
    let state = branches.pop().expect("encoder has no measurements").state;
    let direct = logical_state(css, &logical)?;
    let dev = state.max_deviation(&direct);
    if dev > 1e-10 {
        return Err(Error::Construction(format!(
            "encoder output deviates from the coset superposition by {dev:e}"
        )));
    }
    Ok(EncodedBlock {
        css: css.clone(),
        logical,
        state,
    })
}

fn logical_index(css: &CssTriple, i: usize) -> usize {
    let n = css.n();
    let k = css.k_logical();
    css.logical_positions()
        .iter()
        .enumerate()
        .filter(|(l, _)| i >> (k - 1 - l) & 1 == 1)
        .map(|(_, &p)| 1usize << (n - 1 - p))
        .sum()
}

/// The normalized logical amplitudes held by an encoder input.
fn input_logical(css: &CssTriple, input: &QuantumState) -> Vec<Complex64> {
    (0..1usize << css.k_logical())
        .map(|i| input.amplitude(logical_index(css, i)))
        .collect()
}

/// Closed-form coherence factor left on the data qubit by the three-qubit
/// phase-error scheme (rotations `diag(e^{iεφ/2}, e^{-iεφ/2})`).
pub fn phase_error_alpha(phis: [f64; 3], eps: f64) -> Complex64 {
    let c = phis.map(|p| (eps * p).cos());
    let s = phis.map(|p| (eps * p).sin());
    Complex64::new(
        0.5 * (c[0] + c[1] + c[2] - c[0] * c[1] * c[2]),
        0.5 * s[0] * s[1] * s[2],
    )
}

/// Closed-form coherence factor after correcting three entangled qubits.
pub fn purity_alpha(eps: [f64; 3]) -> f64 {
    let [e0, e1, e2] = eps;
    1.0 - 0.5 * (e0 * e1 + e0 * e2 + e1 * e2) + 0.5 * e0 * e1 * e2
}

/// Reduced state of the data qubit after a three-qubit experiment.
#[derive(Debug, Clone, Serialize)]
pub struct AlphaReport {
    #[serde(skip)]
    pub density: SingleQubitDensity,
    #[serde(serialize_with = "ser_complex")]
    pub alpha: Complex64,
    pub outcomes: Vec<CorrectionOutcome>,
}

fn ser_complex<S: serde::Serializer>(c: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [c.re, c.im].serialize(s)
}

/// Basis-2 correction of the three-qubit block without re-encoding; the
/// data qubit then holds the logical state.
fn correct_three_qubit(state: QuantumState, block: &EncodedBlock) -> Result<AlphaReport> {
    let corrector = build_corrector(&block.css, Basis::Two, CorrectorStyle::InPlace, false)?;
    let branches = Executor::enumerate().run_state(&corrector.circuit, state)?;
    let density = mixture_reduced_density(&branches, corrector.data[0])?;
    let (a, b) = (block.logical[0], block.logical[1]);
    let alpha = density
        .alpha(a, b)
        .ok_or_else(|| Error::Usage("coherence factor needs a and b both nonzero".into()))?;
    let outcomes = branches
        .iter()
        .map(|br| corrector.outcome(&br.history[0], br.weight))
        .collect::<Result<_>>()?;
    Ok(AlphaReport {
        density,
        alpha,
        outcomes,
    })
}

/// Encodes `a|0⟩ + b|1⟩` in three qubits, rotates qubit `j` by `εφ_j`, and
/// corrects in basis 2.
pub fn run_phase_error_experiment(
    phis: [f64; 3],
    eps: f64,
    a: Complex64,
    b: Complex64,
) -> Result<AlphaReport> {
    let block = encode(&zoo::three_qubit_triple(), &[a, b])?;
    let spec = PhaseErrorSpec::new(phis.to_vec(), eps)?;
    let state = apply_phase_errors(&block.state, &spec)?;
    correct_three_qubit(state, &block)
}

/// Encodes `a|0⟩ + b|1⟩` in three qubits, entangles qubit `j` with its own
/// environment qubit at strength `ε_j` (zero means untouched), and corrects
/// in basis 2.
pub fn run_purity_amplification(eps: [f64; 3], a: Complex64, b: Complex64) -> Result<AlphaReport> {
    if eps.iter().any(|e| !(0.0..=1.0).contains(e)) {
        return Err(Error::Usage("strengths must lie in [0, 1]".into()));
    }
    let block = encode(&zoo::three_qubit_triple(), &[a, b])?;
    let state = apply_entangle(
        &block.state.with_registers(3, 0)?,
        &EntangleSpec::per_qubit(&eps)?,
    )?;
    correct_three_qubit(state, &block)
}

/// `|C⟩` with basis-2 flips on the positions selected by `l` (first
/// position = most significant bit of `l`).
pub fn basis2_flipped_code(c: &LinearCode, positions: &[usize], l: usize) -> Result<QuantumState> {
    let x = positions.len();
    if l >> x != 0 {
        return Err(Error::Usage(format!(
            "flip pattern {l} out of range for {x} positions"
        )));
    }
    let mut s = QuantumState::uniform(c.n(), &c.codewords()?)?;
    for (m, &p) in positions.iter().enumerate() {
        if l >> (x - 1 - m) & 1 == 1 {
            s.apply_z(p)?;
        }
    }
    Ok(s)
}

/// Max amplitude deviation between coset `j` of `c` (split on `positions`)
/// and `Σ_l (-1)^{wt(j·l)} |C/²S_l⟩`, both normalized.
pub fn coset_sum_identity_check(c: &LinearCode, positions: &[usize], j: usize) -> Result<f64> {
    if c.n() > 12 {
        return Err(Error::Capability(format!("n = {} exceeds 12", c.n())));
    }
    let cosets = c.coset_decompose(positions)?;
    let coset = cosets
        .get(j)
        .ok_or_else(|| Error::Usage(format!("coset index {j} out of range")))?;
    let lhs = QuantumState::uniform(c.n(), &coset.words()?)?;
    let mut sum = vec![ZERO; 1 << c.n()];
    for l in 0..cosets.len() {
        let sign = if (j & l).count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        for (acc, a) in sum
            .iter_mut()
            .zip(basis2_flipped_code(c, positions, l)?.amplitudes())
        {
            *acc += a * sign;
        }
    }
    let rhs = QuantumState::from_amplitudes(c.n(), 0, 0, sum)?;
    Ok(lhs.max_deviation(&rhs))
}

/// Error process applied between encoding and correction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ErrorSpec {
    None,
    Phase(PhaseErrorSpec),
    Entangle(EntangleSpec),
    Defection(DefectionSpec),
}

impl ErrorSpec {
    fn env_qubits(&self) -> usize {
        match self {
            ErrorSpec::None | ErrorSpec::Phase(_) => 0,
            ErrorSpec::Entangle(e) => e.terms.iter().map(|t| t.env + 1).max().unwrap_or(0),
            ErrorSpec::Defection(d) => d.env_qubits(),
        }
    }

    /// Number of system qubits touched.
    pub fn affected(&self) -> usize {
        match self {
            ErrorSpec::None => 0,
            ErrorSpec::Phase(p) => p.angles.iter().filter(|a| p.eps * **a != 0.0).count(),
            ErrorSpec::Entangle(e) => {
                let mut q: Vec<usize> = e.terms.iter().map(|t| t.qubit).collect();
                q.sort_unstable();
                q.dedup();
                q.len()
            }
            ErrorSpec::Defection(d) => d.x(),
        }
    }

    fn apply(&self, s: &QuantumState) -> Result<QuantumState> {
        match self {
            ErrorSpec::None => Ok(s.clone()),
            ErrorSpec::Phase(p) => apply_phase_errors(s, p),
            ErrorSpec::Entangle(e) => apply_entangle(s, e),
            ErrorSpec::Defection(d) => apply_defection(s, &d.materialize()?, 0),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchRecord {
    pub weight: f64,
    pub syndromes: Vec<CorrectionOutcome>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecoveryReport {
    /// `⟨QC|ρ|QC⟩` against the error-free encoded block.
    pub fidelity: f64,
    /// `Tr ρ²` of the system after tracing out environment and ancillas.
    pub purity: f64,
    /// Logical coherence `⟨C0|ρ|C1⟩ / (c0 c1*)`, for one logical qubit with
    /// both amplitudes nonzero.
    pub alpha: Option<[f64; 2]>,
    /// Whether the number of affected qubits is within the correctable range.
    pub within_guarantee: bool,
    pub branches: Vec<BranchRecord>,
}

/// Encode, apply `error`, correct in basis 1 then in basis 2 (ancilla
/// style), and compare with the error-free block.
pub fn run_recovery(
    css: &CssTriple,
    logical: &[Complex64],
    error: &ErrorSpec,
    mode: MeasureMode,
) -> Result<RecoveryReport> {
    let block = encode(css, logical)?;
    let n = css.n();
    let n_env = error.env_qubits();
    let n_anc = (n - css.k1()).max(n - css.k2());
    let state = error.apply(&block.state.with_registers(n_env, n_anc)?)?;
    let first = n + n_env;
    let c1 = build_corrector(css, Basis::One, CorrectorStyle::Ancilla { first }, true)?;
    let c2 = build_corrector(css, Basis::Two, CorrectorStyle::Ancilla { first }, true)?;
    let mut exec = Executor::new(mode);
    let branches = exec.run_state(&c1.circuit, state)?;
    let branches = exec.run(&c2.circuit, branches)?;
    let rho = mixture_system_density(&branches)?;
    let fidelity = rho.expectation(&block.state)?;
    let purity = rho.purity();
    let alpha = if css.k_logical() == 1 {
        let ab = block.logical[0] * block.logical[1].conj();
        if ab.norm() > 1e-12 {
            let v = rho.sandwich(&coset_state(css, 0)?, &coset_state(css, 1)?)? / ab;
            Some([v.re, v.im])
        } else {
            None
        }
    } else {
        None
    };
    let branches = branches
        .iter()
        .map(|b| {
            Ok(BranchRecord {
                weight: b.weight,
                syndromes: vec![
                    c1.outcome(&b.history[0], b.weight)?,
                    c2.outcome(&b.history[1], b.weight)?,
                ],
            })
        })
        .collect::<Result<_>>()?;
    Ok(RecoveryReport {
        fidelity,
        purity,
        alpha,
        within_guarantee: error.affected() <= css.correctable(),
        branches,
    })
}

/// Recovery from an arbitrary defection, with every measurement branch kept.
pub fn run_defection_recovery(
    css: &CssTriple,
    logical: &[Complex64],
    defect: &DefectionSpec,
) -> Result<RecoveryReport> {
    run_recovery(
        css,
        logical,
        &ErrorSpec::Defection(defect.clone()),
        MeasureMode::Enumerate,
    )
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ManifestMode {
    #[default]
    Enumerate,
    Sampled,
}

/// A recovery experiment described as data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    /// Built-in triple name.
    pub css: String,
    /// Logical amplitudes as `[re, im]` pairs.
    pub logical: Vec<[f64; 2]>,
    pub error: ErrorSpec,
    #[serde(default)]
    pub mode: ManifestMode,
    #[serde(default)]
    pub seed: Option<u64>,
}

pub fn run_manifest(m: &Manifest) -> Result<RecoveryReport> {
    let css = zoo::triple_by_name(&m.css)?;
    let logical: Vec<Complex64> = m
        .logical
        .iter()
        .map(|[re, im]| Complex64::new(*re, *im))
        .collect();
    let mut error = m.error.clone();
    if let ErrorSpec::Defection(d) = &mut error {
        if d.seed.is_none() && d.kind == crate::channels::DefectionKind::Random {
            d.seed = Some(
                m.seed
                    .ok_or_else(|| Error::Usage("random defection needs a seed".into()))?,
            );
        }
    }
    let mode = match m.mode {
        ManifestMode::Enumerate => MeasureMode::Enumerate,
        ManifestMode::Sampled => MeasureMode::Sampled {
            seed: m
                .seed
                .ok_or_else(|| Error::Usage("sampled mode needs a seed".into()))?,
        },
    };
    run_recovery(&css, &logical, &error, mode)
}
