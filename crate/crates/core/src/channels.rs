//! Error processes: unitary phase rotations, the environment-entangling
//! operator `W`, and general defections of a set of qubits.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitWord;
use crate::qstate::{Matrix2, Matrix4, QuantumState};

/// Tolerance on unitarity and isometry checks.
pub const ISOMETRY_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Per-qubit angles scaled by a common strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseErrorSpec {
    pub angles: Vec<f64>,
    pub eps: f64,
}

impl PhaseErrorSpec {
    pub fn new(angles: Vec<f64>, eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::Usage(format!("strength {eps} outside [0, 1]")));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::Usage("angles must be finite".into()));
        }
        Ok(Self { angles, eps })
    }

    /// `diag(e^{iεφ/2}, e^{-iεφ/2})` for qubit `j`.
    pub fn operator(&self, j: usize) -> Matrix2 {
        let t = self.eps * self.angles[j] / 2.0;
        [
            [Complex64::from_polar(1.0, t), ZERO],
            [ZERO, Complex64::from_polar(1.0, -t)],
        ]
    }
}

/// Applies the phase rotation to every system qubit.
pub fn apply_phase_errors(s: &QuantumState, spec: &PhaseErrorSpec) -> Result<QuantumState> {
    if spec.angles.len() != s.n_sys() {
        return Err(Error::LengthMismatch {
            left: s.n_sys(),
            right: spec.angles.len(),
        });
    }
    let mut out = s.clone();
    for j in 0..spec.angles.len() {
        out.apply_single(j, &spec.operator(j))?;
    }
    Ok(out)
}

/// One system qubit entangled with one environment qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntangleTerm {
    pub qubit: usize,
    pub eps: f64,
    /// Index within the environment register.
    pub env: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntangleSpec {
    pub terms: Vec<EntangleTerm>,
}

impl EntangleSpec {
    pub fn new(terms: Vec<EntangleTerm>) -> Result<Self> {
        for (i, t) in terms.iter().enumerate() {
            if !(t.eps > 0.0 && t.eps <= 1.0) {
                return Err(Error::Usage(format!("strength {} outside (0, 1]", t.eps)));
            }
            if terms[..i].iter().any(|u| u.env == t.env) {
                return Err(Error::Usage(format!(
                    "environment qubit {} used twice",
                    t.env
                )));
            }
        }
        Ok(Self { terms })
    }

    /// Qubit `j` paired with environment qubit `j` for each nonzero strength.
    pub fn per_qubit(strengths: &[f64]) -> Result<Self> {
        Self::new(
            strengths
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0.0)
                .map(|(j, &eps)| EntangleTerm {
                    qubit: j,
                    eps,
                    env: j,
                })
                .collect(),
        )
    }
}

/// The 4×4 entangling operator over `|q⟩|env⟩` in the order
/// `(0ψ1, 0ψ2, 1ψ1, 1ψ2)`, with `ψ1 = |0⟩` and `ψ2 = |1⟩`.
pub fn entangle_operator(eps: f64) -> Matrix4 {
    let s = (2.0 * eps - eps * eps).max(0.0).sqrt();
    let c = |x: f64| Complex64::new(x, 0.0);
    [
        [ONE, ZERO, ZERO, ZERO],
        [ZERO, ONE, ZERO, ZERO],
        [ZERO, ZERO, c(1.0 - eps), c(s)],
        [ZERO, ZERO, c(-s), c(1.0 - eps)],
    ]
}

/// Largest entry of `U†U - I`.
pub fn unitarity_deviation<const N: usize>(u: &[[Complex64; N]; N]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..N {
        for j in 0..N {
            let v: Complex64 = (0..N).map(|k| u[k][i].conj() * u[k][j]).sum();
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((v - target).norm());
        }
    }
    worst
}

pub fn apply_entangle(s: &QuantumState, spec: &EntangleSpec) -> Result<QuantumState> {
    let mut out = s.clone();
    for t in &spec.terms {
        if t.qubit >= s.n_sys() || t.env >= s.n_env() {
            return Err(Error::Usage(format!(
                "term (qubit {}, env {}) out of range",
                t.qubit, t.env
            )));
        }
        let w = entangle_operator(t.eps);
        let dev = unitarity_deviation(&w);
        if dev > ISOMETRY_TOL {
            return Err(Error::NotIsometry { deviation: dev });
        }
        out.apply_two(t.qubit, s.env_qubit(t.env), &w)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DefectionKind {
    Identity,
    /// Seeded Gaussian isometry.
    Random,
    /// The entangling operator on a single qubit, `params.eps`.
    Entangle,
    /// Basis-1 complement of the qubits set in `params.pattern`.
    Flip1,
    /// Basis-2 complement of the qubits set in `params.pattern`.
    Flip2,
    /// Environment vectors given in `params.vectors`.
    Explicit,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DefectionParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<BitWord>,
    /// `vectors[j][k][e] = [re, im]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Vec<Vec<Vec<[f64; 2]>>>>,
}

/// Serializable description of a defection. [`DefectionSpec::materialize`]
/// turns it into the environment vectors that act on a state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectionSpec {
    #[serde(rename = "type")]
    pub kind: DefectionKind,
    pub qubits: Vec<usize>,
    #[serde(default)]
    pub params: DefectionParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl DefectionSpec {
    pub fn identity(qubits: Vec<usize>) -> Self {
        Self {
            kind: DefectionKind::Identity,
            qubits,
            params: DefectionParams::default(),
            seed: None,
        }
    }

    pub fn random(qubits: Vec<usize>, seed: u64) -> Self {
        Self {
            kind: DefectionKind::Random,
            qubits,
            params: DefectionParams::default(),
            seed: Some(seed),
        }
    }

    pub fn entangle(qubit: usize, eps: f64) -> Self {
        Self {
            kind: DefectionKind::Entangle,
            qubits: vec![qubit],
            params: DefectionParams {
                eps: Some(eps),
                ..Default::default()
            },
            seed: None,
        }
    }

    /// `basis` is 1 or 2; `pattern` has one bit per affected qubit.
    pub fn flip(qubits: Vec<usize>, basis: u8, pattern: BitWord) -> Result<Self> {
        let kind = match basis {
            1 => DefectionKind::Flip1,
            2 => DefectionKind::Flip2,
            b => return Err(Error::Usage(format!("basis must be 1 or 2, got {b}"))),
        };
        Ok(Self {
            kind,
            qubits,
            params: DefectionParams {
                pattern: Some(pattern),
                ..Default::default()
            },
            seed: None,
        })
    }

    pub fn explicit(qubits: Vec<usize>, vectors: &[Vec<Vec<Complex64>>]) -> Self {
        let vectors = vectors
            .iter()
            .map(|vj| {
                vj.iter()
                    .map(|v| v.iter().map(|c| [c.re, c.im]).collect())
                    .collect()
            })
            .collect();
        Self {
            kind: DefectionKind::Explicit,
            qubits,
            params: DefectionParams {
                vectors: Some(vectors),
                ..Default::default()
            },
            seed: None,
        }
    }

    pub fn x(&self) -> usize {
        self.qubits.len()
    }

    /// Environment qubits needed: two per affected qubit.
    pub fn env_qubits(&self) -> usize {
        2 * self.x()
    }

    /// Builds the environment vectors `e_jk`.
    pub fn materialize(&self) -> Result<Defection> {
        let x = self.x();
        for (i, q) in self.qubits.iter().enumerate() {
            if self.qubits[..i].contains(q) {
                return Err(Error::Usage(format!("qubit {q} listed twice")));
            }
        }
        if x > 5 {
            return Err(Error::Capability(format!(
                "defection of {x} qubits needs {} environment qubits",
                2 * x
            )));
        }
        let dj = 1usize << x;
        let de = 1usize << (2 * x);
        let mut e = vec![vec![vec![ZERO; de]; dj]; dj];
        let need_pattern = || {
            self.params
                .pattern
                .filter(|p| p.len() == x)
                .ok_or_else(|| Error::Usage(format!("flip needs a {x}-bit pattern")))
        };
        match self.kind {
            DefectionKind::Identity => {
                for ej in &mut e {
                    ej[0][0] = ONE;
                }
            }
            DefectionKind::Flip1 => {
                let k = need_pattern()?.value() as usize;
                for ej in &mut e {
                    ej[k][0] = ONE;
                }
            }
            DefectionKind::Flip2 => {
                let p = need_pattern()?.value();
                for (j, ej) in e.iter_mut().enumerate() {
                    let odd = (p & j as u32).count_ones() % 2 == 1;
                    ej[0][0] = if odd { -ONE } else { ONE };
                }
            }
            DefectionKind::Entangle => {
                if x != 1 {
                    return Err(Error::Usage("entangle defection acts on one qubit".into()));
                }
                let eps = self
                    .params
                    .eps
                    .ok_or_else(|| Error::Usage("entangle defection needs eps".into()))?;
                let w = entangle_operator(eps);
                // environment |ψ1⟩ = |00⟩, |ψ2⟩ = |10⟩ so that the first
                // environment qubit plays the role of the single W qubit
                for j in 0..2 {
                    e[j][0][0] = w[2 * j][2 * j];
                    e[j][0][2] = w[2 * j + 1][2 * j];
                }
            }
            DefectionKind::Random => {
                let seed = self
                    .seed
                    .ok_or_else(|| Error::Usage("random defection needs a seed".into()))?;
                let v = random_isometry(dj * de, dj, seed)?;
                for j in 0..dj {
                    for k in 0..dj {
                        for env in 0..de {
                            e[j][k][env] = v[((j ^ k) * de + env) * dj + j];
                        }
                    }
                }
            }
            DefectionKind::Explicit => {
                let given = self
                    .params
                    .vectors
                    .as_ref()
                    .ok_or_else(|| Error::Usage("explicit defection needs vectors".into()))?;
                if given.len() != dj || given.iter().any(|g| g.len() != dj) {
                    return Err(Error::Usage(format!(
                        "expected {dj}×{dj} environment vectors"
                    )));
                }
                for j in 0..dj {
                    for k in 0..dj {
                        let v = &given[j][k];
                        if v.len() > de {
                            return Err(Error::Usage(format!(
                                "environment vectors longer than {de}"
                            )));
                        }
                        for (env, [re, im]) in v.iter().enumerate() {
                            e[j][k][env] = Complex64::new(*re, *im);
                        }
                    }
                }
            }
        }
        let d = Defection {
            qubits: self.qubits.clone(),
            vectors: e,
        };
        let dev = d.isometry_deviation();
        if dev > ISOMETRY_TOL {
            return Err(Error::NotIsometry { deviation: dev });
        }
        Ok(d)
    }
}

/// `|j⟩|e0⟩ → Σ_k |j⊕k⟩|e_jk⟩` on the affected qubits, with
/// `vectors[j][k]` the (unnormalized) environment vector `e_jk`. The first
/// listed qubit is the most significant bit of `j` and `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Defection {
    qubits: Vec<usize>,
    vectors: Vec<Vec<Vec<Complex64>>>,
}

impl Defection {
    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn vector(&self, j: usize, k: usize) -> &[Complex64] {
        &self.vectors[j][k]
    }

    pub fn env_qubits(&self) -> usize {
        2 * self.qubits.len()
    }

    /// Largest entry of `V†V - I` for the map on the affected qubits.
    pub fn isometry_deviation(&self) -> f64 {
        let dj = self.vectors.len();
        let mut worst: f64 = 0.0;
        for a in 0..dj {
            for b in 0..dj {
                // ⟨V a|V b⟩ pairs terms landing on the same word m
                let v: Complex64 = (0..dj)
                    .map(|m| {
                        let ea = &self.vectors[a][a ^ m];
                        let eb = &self.vectors[b][b ^ m];
                        ea.iter()
                            .zip(eb)
                            .map(|(p, q)| p.conj() * q)
                            .sum::<Complex64>()
                    })
                    .sum();
                let target = if a == b { ONE } else { ZERO };
                worst = worst.max((v - target).norm());
            }
        }
        worst
    }
}

/// Columns of a seeded complex Gaussian `rows × cols` matrix, orthonormalized
/// by modified Gram-Schmidt; row-major.
pub fn random_isometry(rows: usize, cols: usize, seed: u64) -> Result<Vec<Complex64>> {
    if cols > rows {
        return Err(Error::Usage(format!(
            "cannot embed {cols} columns in dimension {rows}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut m: Vec<Complex64> = (0..rows * cols)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    for c in 0..cols {
        for p in 0..c {
            let proj: Complex64 = (0..rows)
                .map(|r| m[r * cols + p].conj() * m[r * cols + c])
                .sum();
            for r in 0..rows {
                let sub = proj * m[r * cols + p];
                m[r * cols + c] -= sub;
            }
        }
        let norm = (0..rows)
            .map(|r| m[r * cols + c].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if norm < 1e-12 {
            return Err(Error::Construction("degenerate random matrix".into()));
        }
        for r in 0..rows {
            m[r * cols + c] /= norm;
        }
    }
    Ok(m)
}

/// Applies `d` using environment qubits `env_offset .. env_offset + 2x`,
/// which must be in `|0…0⟩`.
pub fn apply_defection(s: &QuantumState, d: &Defection, env_offset: usize) -> Result<QuantumState> {
    let x = d.qubits.len();
    if x == 0 {
        return Ok(s.clone());
    }
    let n = s.n_qubits();
    if env_offset + 2 * x > s.n_env() {
        return Err(Error::Usage(format!(
            "defection needs environment qubits {env_offset}..{} but the register has {}",
            env_offset + 2 * x,
            s.n_env()
        )));
    }
    if let Some(q) = d.qubits.iter().find(|&&q| q >= s.n_sys()) {
        return Err(Error::Usage(format!("qubit {q} is not a system qubit")));
    }
    let bit = |q: usize| 1usize << (n - 1 - q);
    let sys_bits: Vec<usize> = d.qubits.iter().map(|&q| bit(q)).collect();
    let env_bits: Vec<usize> = (0..2 * x)
        .map(|i| bit(s.env_qubit(env_offset + i)))
        .collect();
    let env_mask: usize = env_bits.iter().sum();
    let sys_mask: usize = sys_bits.iter().sum();
    // scatter a local index (first listed = MSB) onto register bits
    let spread = |bits: &[usize], v: usize| -> usize {
        let m = bits.len();
        (0..m)
            .filter(|i| v >> (m - 1 - i) & 1 == 1)
            .map(|i| bits[i])
            .sum()
    };
    let gather = |bits: &[usize], idx: usize| -> usize {
        let m = bits.len();
        (0..m)
            .filter(|&i| idx & bits[i] != 0)
            .map(|i| 1 << (m - 1 - i))
            .sum()
    };
    let amps = s.amplitudes();
    let mut out = vec![ZERO; amps.len()];
    let dj = 1usize << x;
    for (idx, &a) in amps.iter().enumerate() {
        if a == ZERO {
            continue;
        }
        if idx & env_mask != 0 {
            return Err(Error::Usage(
                "defection environment qubits are not in |0⟩".into(),
            ));
        }
        let j = gather(&sys_bits, idx);
        let base = idx & !sys_mask;
        for k in 0..dj {
            let target_sys = spread(&sys_bits, j ^ k);
            for (env, &ev) in d.vectors[j][k].iter().enumerate() {
                if ev != ZERO {
                    out[base | target_sys | spread(&env_bits, env)] += a * ev;
                }
            }
        }
    }
    QuantumState::from_amplitudes(s.n_sys(), s.n_env(), s.n_anc(), out)
}

/// Marks each of `n` qubits as defecting with probability `p`; the set
/// receives a random isometry seeded from `seed`.
pub fn sample_stochastic_defection(n: usize, p: f64, seed: u64) -> Result<DefectionSpec> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Usage(format!("probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let qubits = (0..n).filter(|_| rng.random_bool(p)).collect();
    Ok(DefectionSpec::random(qubits, seed))
}
