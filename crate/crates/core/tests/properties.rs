use num_complex::Complex64;
use proptest::prelude::*;

use qecc_core::bounds::{binomial_cdf, entropy, inverse_entropy, rate_window, survival};
use qecc_core::channels::{
    apply_entangle, apply_phase_errors, DefectionSpec, EntangleSpec, PhaseErrorSpec,
};
use qecc_core::codec::{encode, run_defection_recovery};
use qecc_core::codes::LinearCode;
use qecc_core::gf2::{parity_check, BinaryMatrix, BitWord, CheckOutcome};
use qecc_core::qstate::{
    basis2_transform, parity_check_probability, state_from_generator, support_in_basis2,
    PhasedGenerator, QuantumState, DEFAULT_SUPPORT_TOL,
};
use qecc_core::zoo;

fn word(n: usize) -> impl Strategy<Value = BitWord> {
    (0u32..1 << n).prop_map(move |v| BitWord::new(v, n).unwrap())
}

fn matrix(n: usize, max_rows: usize) -> impl Strategy<Value = BinaryMatrix> {
    prop::collection::vec(word(n), 1..=max_rows)
        .prop_map(move |rows| BinaryMatrix::new(n, rows).unwrap())
}

/// A code from the row space of a random matrix, with zero rows dropped.
fn code(n: usize, max_rows: usize) -> impl Strategy<Value = LinearCode> {
    matrix(n, max_rows).prop_filter_map("zero matrix", move |m| {
        let e = m.row_reduce();
        let rows: Vec<BitWord> = e.reduced.rows()[..e.rank].to_vec();
        (!rows.is_empty())
            .then(|| LinearCode::from_generator(BinaryMatrix::new(n, rows).unwrap()).unwrap())
    })
}

fn amplitudes(dim: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
        .prop_filter("nonzero", |v| {
            v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3
        })
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn xor_is_self_inverse(a in word(12), b in word(12)) {
        prop_assert_eq!(a ^ b ^ b, a);
        prop_assert_eq!(a.distance(&b).unwrap(), (a ^ b).weight());
    }

    #[test]
    fn parity_check_is_linear(h in word(10), u in word(10), v in word(10)) {
        let sat = |w: &BitWord| parity_check(&h, w).unwrap() == CheckOutcome::Satisfied;
        prop_assert_eq!(sat(&(u ^ v)), sat(&u) == sat(&v));
    }

    #[test]
    fn null_space_annihilates_rows(m in matrix(11, 8)) {
        let ns = m.null_space();
        prop_assert_eq!(ns.n_rows() + m.rank(), 11);
        for r in m.rows() {
            for z in ns.rows() {
                prop_assert!(!r.dot(z).unwrap());
            }
        }
    }

    #[test]
    fn dual_of_dual_is_identity(c in code(10, 7)) {
        let d = c.dual();
        prop_assert_eq!(c.k() + d.k(), c.n());
        prop_assert!(d.dual().same_code(&c));
    }

    #[test]
    fn codewords_have_zero_syndrome(c in code(9, 6), coeffs in word(6)) {
        let coeffs = coeffs.restrict(&(0..c.k()).collect::<Vec<_>>()).unwrap();
        let w = c.generator().combine(&coeffs).unwrap();
        prop_assert!(c.syndrome(&w).unwrap().is_zero());
    }

    #[test]
    fn syndrome_decoding_corrects_within_radius(
        c in code(9, 5),
        coeffs in word(5),
        positions in prop::sample::subsequence((0..9).collect::<Vec<usize>>(), 0..=4),
    ) {
        let t = c.max_correctable().unwrap();
        let e = BitWord::from_positions(9, &positions[..positions.len().min(t)]).unwrap();
        let coeffs = coeffs.restrict(&(0..c.k()).collect::<Vec<_>>()).unwrap();
        let w = c.generator().combine(&coeffs).unwrap();
        let table = c.syndrome_table().unwrap();
        prop_assert_eq!(table.decode(&(w ^ e)).unwrap(), w);
    }

    #[test]
    fn cosets_partition_the_code(c in code(8, 5), p in 0usize..8) {
        let Ok(cosets) = c.coset_decompose(&[p]) else { return Ok(()); };
        let mut all: Vec<BitWord> = cosets.iter().flat_map(|k| k.words().unwrap()).collect();
        all.sort();
        let mut words = c.codewords().unwrap();
        words.sort();
        prop_assert_eq!(all, words);
    }

    #[test]
    fn basis2_support_is_dual(c in code(8, 6)) {
        let words = c.codewords().unwrap();
        let s = QuantumState::uniform(8, &words).unwrap();
        let mut dual = c.dual().codewords().unwrap();
        dual.sort();
        prop_assert_eq!(support_in_basis2(&s, DEFAULT_SUPPORT_TOL).unwrap(), dual);
    }

    #[test]
    fn basis2_transform_is_an_involution(amps in amplitudes(16)) {
        let s = QuantumState::from_amplitudes(4, 0, 0, amps).unwrap();
        let all = [0, 1, 2, 3];
        let back = basis2_transform(&basis2_transform(&s, &all).unwrap(), &all).unwrap();
        prop_assert!(back.max_deviation(&s) < 1e-12);
        prop_assert!((back.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interference_law_holds(phases in prop::collection::vec(0.0..std::f64::consts::TAU, 3)) {
        let g = zoo::simplex7().generator().clone();
        let s = state_from_generator(&PhasedGenerator::new(g.clone(), phases.clone()).unwrap()).unwrap();
        for (row, phi) in g.rows().iter().zip(&phases) {
            let p = parity_check_probability(&s, row).unwrap();
            prop_assert!((p - (phi / 2.0).cos().powi(2)).abs() < 1e-10);
        }
    }

    #[test]
    fn channels_preserve_norm(amps in amplitudes(8), angles in prop::collection::vec(-3.0f64..3.0, 3), eps in 0.0f64..=1.0) {
        let s = QuantumState::from_amplitudes(3, 0, 0, amps).unwrap();
        let phased = apply_phase_errors(&s, &PhaseErrorSpec::new(angles, eps).unwrap()).unwrap();
        prop_assert!((phased.norm_sqr() - 1.0).abs() < 1e-12);
        let strengths = [eps.max(1e-3), 0.0, eps.max(1e-3) / 2.0];
        let e = EntangleSpec::per_qubit(&strengths).unwrap();
        let entangled = apply_entangle(&s.with_registers(3, 0).unwrap(), &e).unwrap();
        prop_assert!((entangled.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_inverse_round_trips(x in 1e-6f64..0.5) {
        let y = entropy(x).unwrap();
        prop_assert!((inverse_entropy(y).unwrap() - x).abs() < 1e-9);
    }

    #[test]
    fn rate_window_is_ordered(n in 8usize..2000, f1 in 0.0f64..0.6, f2 in 0.0f64..0.6) {
        let d1 = ((f1 * n as f64) as usize).max(1);
        let d2 = ((f2 * n as f64) as usize).max(1);
        let w = rate_window(n, 1, d1, d2).unwrap();
        prop_assert!(w.lower <= w.upper + 1e-12);
        prop_assert!(!(w.achievable && !w.possible));
    }

    #[test]
    fn binomial_cdf_is_monotone(n in 1u64..400, p in 0.001f64..0.999, x in 0u64..400) {
        let x = x.min(n);
        let (f, tail) = binomial_cdf(n, p, x).unwrap();
        prop_assert!((f + tail - 1.0).abs() < 1e-12);
        if x > 0 {
            prop_assert!(binomial_cdf(n, p, x - 1).unwrap().0 <= f + 1e-15);
        }
    }

    #[test]
    fn survival_is_a_power(n in 50u64..5000, p in 0.001f64..0.2, rounds in 1u64..50) {
        let d = (n / 10).max(1);
        let r = survival(n, p, d, rounds).unwrap();
        prop_assert!((r.p_exact - r.f_exact.powf(rounds as f64)).abs() <= 1e-12 * r.p_exact.max(1e-300));
        prop_assert!(r.mu >= 0.0 && r.sigma >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn encoder_output_lies_in_coset_span(amps in amplitudes(2)) {
        for css in [zoo::steane_triple(), zoo::three_qubit_triple()] {
            let block = encode(&css, &amps).unwrap();
            prop_assert!(block.span_residual(&block.state).unwrap() < 1e-12);
        }
    }

    #[test]
    fn single_defections_are_recovered(amps in amplitudes(2), q in 0usize..7, seed in any::<u64>()) {
        let r = run_defection_recovery(&zoo::steane_triple(), &amps, &DefectionSpec::random(vec![q], seed)).unwrap();
        prop_assert!(r.fidelity > 1.0 - 1e-9);
        prop_assert!(r.purity > 1.0 - 1e-9);
        prop_assert!(r.within_guarantee);
    }
}
