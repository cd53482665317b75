//! BB84 prepare-and-measure exchange, simulated qubit by qubit on the state
//! vector. The sender prepares `H^basis X^bit |0>`, an optional adversary
//! intervenes, the receiver applies `H^basis` and measures in Z. Positions
//! where both picked the same basis survive sifting.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{apply_gate, measure_all, Gate, QuantumState};
use crate::rng;
use crate::rng::StreamRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    fn random<R: Rng>(rng: &mut R) -> Basis {
        if rng.random::<bool>() {
            Basis::X
        } else {
            Basis::Z
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Basis::Z => 'Z',
            Basis::X => 'X',
        }
    }
}

/// Adversary strategies on the quantum channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EveKind {
    None,
    /// Measure each qubit in a uniformly random basis and re-prepare the
    /// observed outcome in that basis.
    InterceptResend,
    /// Replace every qubit with a fresh uniformly random BB84 state.
    Swap,
    /// One fair coin per session: pass everything through untouched, or run
    /// the full swap attack.
    HalfSwap,
}

#[derive(Debug, Clone, Copy)]
pub struct EveModel {
    pub kind: EveKind,
    /// Seed for the adversary's own randomness, independent of the protocol
    /// stream.
    pub seed: u64,
}

impl EveModel {
    pub fn none() -> Self {
        EveModel {
            kind: EveKind::None,
            seed: 0,
        }
    }
}

/// Classical bit-flip applied to each transmitted qubit's eventual
/// measurement outcome.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub flip_probability: f64,
}

impl ChannelConfig {
    pub fn noiseless() -> Self {
        ChannelConfig {
            flip_probability: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.flip_probability) {
            return Err(Error::invalid_config("flip_probability", "must be in [0, 1]"));
        }
        Ok(())
    }
}

/// One completed exchange: everything both sides know after sifting.
#[derive(Debug, Clone, PartialEq)]
pub struct QkdSession {
    pub n: usize,
    pub sender_bits: Vec<u8>,
    pub sender_bases: Vec<Basis>,
    pub receiver_bases: Vec<Basis>,
    pub receiver_bits: Vec<u8>,
    /// Positions where the bases matched.
    pub sifted_indices: Vec<usize>,
    /// Sender/receiver bits restricted to the sifted positions.
    pub sender_key: Vec<u8>,
    pub receiver_key: Vec<u8>,
}

/// n random bits, each from simulating `H|0>` and measuring in Z.
pub fn quantum_random_bits<R: Rng>(n: usize, rng: &mut R) -> Vec<u8> {
    let zero = QuantumState::zero(1);
    (0..n)
        .map(|_| {
            let plus = apply_gate(&zero, &Gate::H { qubit: 0 }).expect("valid 1-qubit gate");
            measure_all(&plus, rng)[0]
        })
        .collect()
}

fn prepare(bit: u8, basis: Basis) -> QuantumState {
    let mut state = QuantumState::zero(1);
    if bit == 1 {
        state = apply_gate(&state, &Gate::X { qubit: 0 }).expect("valid");
    }
    if basis == Basis::X {
        state = apply_gate(&state, &Gate::H { qubit: 0 }).expect("valid");
    }
    state
}

fn measure_in(state: &QuantumState, basis: Basis, rng: &mut impl Rng) -> u8 {
    let rotated = if basis == Basis::X {
        apply_gate(state, &Gate::H { qubit: 0 }).expect("valid")
    } else {
        state.clone()
    };
    measure_all(&rotated, rng)[0]
}

/// Run one full BB84 exchange of `n` qubits.
pub fn bb84_exchange(
    n: usize,
    eve: &EveModel,
    channel: &ChannelConfig,
    rng: &mut StreamRng,
) -> QkdSession {
    assert!(n >= 1, "exchange needs at least one qubit");
    channel.validate().expect("validated channel");

    let sender_bits = quantum_random_bits(n, rng);
    let sender_bases: Vec<Basis> = (0..n).map(|_| Basis::random(rng)).collect();
    let receiver_bases: Vec<Basis> = (0..n).map(|_| Basis::random(rng)).collect();

    let mut eve_rng = rng::stream(eve.seed, "eve", &[]);
    // The half-swap adversary commits to one branch for the whole session.
    let swap_session = eve.kind == EveKind::Swap
        || (eve.kind == EveKind::HalfSwap && eve_rng.random::<bool>());

    let mut receiver_bits = Vec::with_capacity(n);
    for j in 0..n {
        let mut qubit = prepare(sender_bits[j], sender_bases[j]);

        match eve.kind {
            EveKind::None => {}
            EveKind::InterceptResend => {
                let eve_basis = Basis::random(&mut eve_rng);
                let outcome = measure_in(&qubit, eve_basis, &mut eve_rng);
                qubit = prepare(outcome, eve_basis);
            }
            EveKind::Swap | EveKind::HalfSwap => {
                if swap_session {
                    let fresh_bit = u8::from(eve_rng.random::<bool>());
                    let fresh_basis = Basis::random(&mut eve_rng);
                    qubit = prepare(fresh_bit, fresh_basis);
                }
            }
        }

        let mut bit = measure_in(&qubit, receiver_bases[j], rng);
        if channel.flip_probability > 0.0 && rng.random::<f64>() < channel.flip_probability {
            bit ^= 1;
        }
        receiver_bits.push(bit);
    }

    let sifted_indices: Vec<usize> = (0..n)
        .filter(|&j| sender_bases[j] == receiver_bases[j])
        .collect();
    let sender_key = sifted_indices.iter().map(|&j| sender_bits[j]).collect();
    let receiver_key = sifted_indices.iter().map(|&j| receiver_bits[j]).collect();

    QkdSession {
        n,
        sender_bits,
        sender_bases,
        receiver_bases,
        receiver_bits,
        sifted_indices,
        sender_key,
        receiver_key,
    }
}

/// Outcome of the public test-bit comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    /// Positions *within the sifted key* that were sacrificed for testing.
    pub tested_indices: Vec<usize>,
    pub error_count: usize,
    pub qber: f64,
    pub n_allowed: usize,
    pub passed: bool,
}

/// Sample `ceil(test_fraction * |S|)` sifted positions, compare sender and
/// receiver bits there, and pass iff the error count stays within
/// `n_allowed`. Tested positions must be dropped from the key material;
/// see [`QkdSession::surviving_keys`].
pub fn run_test(
    session: &QkdSession,
    test_fraction: f64,
    n_allowed: usize,
    rng: &mut StreamRng,
) -> Result<TestReport> {
    if !(0.0..1.0).contains(&test_fraction) || test_fraction == 0.0 {
        return Err(Error::invalid_config("test_fraction", "must be in (0, 1)"));
    }
    let sifted = session.sender_key.len();
    if sifted == 0 {
        return Ok(TestReport {
            tested_indices: Vec::new(),
            error_count: 0,
            qber: 0.0,
            n_allowed,
            passed: true,
        });
    }
    let count = ((test_fraction * sifted as f64).ceil() as usize).clamp(1, sifted);
    let mut tested_indices: Vec<usize> = index::sample(rng, sifted, count).into_vec();
    tested_indices.sort_unstable();
    let error_count = tested_indices
        .iter()
        .filter(|&&i| session.sender_key[i] != session.receiver_key[i])
        .count();
    Ok(TestReport {
        qber: error_count as f64 / count as f64,
        error_count,
        n_allowed,
        passed: error_count <= n_allowed,
        tested_indices,
    })
}

impl QkdSession {
    /// Sifted keys with the tested positions removed: what both sides keep
    /// as raw key material after a passed test.
    pub fn surviving_keys(&self, report: &TestReport) -> (Vec<u8>, Vec<u8>) {
        let mut sender = Vec::with_capacity(self.sender_key.len());
        let mut receiver = Vec::with_capacity(self.receiver_key.len());
        let mut tested = report.tested_indices.iter().peekable();
        for i in 0..self.sender_key.len() {
            if tested.peek() == Some(&&i) {
                tested.next();
                continue;
            }
            sender.push(self.sender_key[i]);
            receiver.push(self.receiver_key[i]);
        }
        (sender, receiver)
    }
}

/// Per-qubit session record: `index,sender_bit,sender_basis,receiver_basis,
/// receiver_bit,sifted` with a header row.
pub fn session_dump(session: &QkdSession) -> String {
    let mut out =
        String::from("index,sender_bit,sender_basis,receiver_basis,receiver_bit,sifted\n");
    let mut sifted = session.sifted_indices.iter().peekable();
    for j in 0..session.n {
        let is_sifted = if sifted.peek() == Some(&&j) {
            sifted.next();
            1
        } else {
            0
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            j,
            session.sender_bits[j],
            session.sender_bases[j].as_char(),
            session.receiver_bases[j].as_char(),
            session.receiver_bits[j],
            is_sifted
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn quantum_bits_deterministic_and_fair() {
        let mut a = rng::stream(1, "qrb", &[]);
        let mut b = rng::stream(1, "qrb", &[]);
        assert!(quantum_random_bits(0, &mut a).is_empty());
        let xs = quantum_random_bits(200, &mut a);
        // rerun from the same stream start
        let _ = quantum_random_bits(0, &mut b);
        let ys = quantum_random_bits(200, &mut b);
        assert_eq!(xs, ys);

        let mut c = rng::stream(2, "qrb-mc", &[]);
        let bits = quantum_random_bits(100_000, &mut c);
        let ones = bits.iter().map(|&b| u32::from(b)).sum::<u32>() as f64;
        let fraction = ones / bits.len() as f64;
        assert!((0.49..=0.51).contains(&fraction), "fraction = {fraction}");
    }

    #[test]
    fn no_eve_keys_agree() {
        for seed in 0..20 {
            let mut stream = rng::stream(seed, "bb84", &[]);
            let session = bb84_exchange(
                500,
                &EveModel::none(),
                &ChannelConfig::noiseless(),
                &mut stream,
            );
            assert_eq!(session.sender_key, session.receiver_key);
        }
    }

    #[test]
    fn sift_rate_near_half() {
        let mut stream = rng::stream(3, "bb84-sift", &[]);
        let session = bb84_exchange(
            10_000,
            &EveModel::none(),
            &ChannelConfig::noiseless(),
            &mut stream,
        );
        let rate = session.sifted_indices.len() as f64 / session.n as f64;
        assert!((0.48..=0.52).contains(&rate), "rate = {rate}");
    }

    #[test]
    fn sifting_matches_brute_force() {
        let mut stream = rng::stream(4, "bb84-brute", &[]);
        let session = bb84_exchange(
            300,
            &EveModel {
                kind: EveKind::InterceptResend,
                seed: 7,
            },
            &ChannelConfig::noiseless(),
            &mut stream,
        );
        let expected: Vec<usize> = (0..session.n)
            .filter(|&j| session.sender_bases[j] == session.receiver_bases[j])
            .collect();
        assert_eq!(session.sifted_indices, expected);
        for (pos, &j) in session.sifted_indices.iter().enumerate() {
            assert_eq!(session.sender_key[pos], session.sender_bits[j]);
            assert_eq!(session.receiver_key[pos], session.receiver_bits[j]);
        }
    }

    fn sifted_disagreement(session: &QkdSession) -> f64 {
        let errors = session
            .sender_key
            .iter()
            .zip(&session.receiver_key)
            .filter(|(a, b)| a != b)
            .count();
        errors as f64 / session.sender_key.len() as f64
    }

    #[test]
    fn intercept_resend_qber_quarter() {
        // Analytic oracle via case enumeration: conditioned on matching
        // sender/receiver bases, Eve guesses right half the time (no error)
        // and wrong half the time (the re-prepared qubit collapses to a
        // uniform outcome at the receiver) -> QBER 1/4.
        let mut stream = rng::stream(5, "bb84-ir", &[]);
        let session = bb84_exchange(
            10_000,
            &EveModel {
                kind: EveKind::InterceptResend,
                seed: 11,
            },
            &ChannelConfig::noiseless(),
            &mut stream,
        );
        let qber = sifted_disagreement(&session);
        assert!((0.23..=0.27).contains(&qber), "qber = {qber}");
    }

    #[test]
    fn swap_qber_half() {
        let mut stream = rng::stream(6, "bb84-swap", &[]);
        let session = bb84_exchange(
            10_000,
            &EveModel {
                kind: EveKind::Swap,
                seed: 13,
            },
            &ChannelConfig::noiseless(),
            &mut stream,
        );
        let qber = sifted_disagreement(&session);
        assert!((0.47..=0.53).contains(&qber), "qber = {qber}");
    }

    #[test]
    fn channel_flip_one_inverts_all() {
        let mut stream = rng::stream(7, "bb84-flip", &[]);
        let session = bb84_exchange(
            400,
            &EveModel::none(),
            &ChannelConfig {
                flip_probability: 1.0,
            },
            &mut stream,
        );
        assert!(session
            .sender_key
            .iter()
            .zip(&session.receiver_key)
            .all(|(a, b)| a != b));
    }

    #[test]
    fn detectability_ordering() {
        // mean QBER: none < half-swap < swap.
        let mut totals = [0.0f64; 3];
        for seed in 0..100 {
            for (slot, kind) in [EveKind::None, EveKind::HalfSwap, EveKind::Swap]
                .into_iter()
                .enumerate()
            {
                let mut stream = rng::stream(1000 + seed, "bb84-order", &[slot as u64]);
                let session = bb84_exchange(
                    2000,
                    &EveModel { kind, seed },
                    &ChannelConfig::noiseless(),
                    &mut stream,
                );
                totals[slot] += sifted_disagreement(&session);
            }
        }
        assert!(totals[0] < totals[1], "none {} vs half {}", totals[0], totals[1]);
        assert!(totals[1] < totals[2], "half {} vs swap {}", totals[1], totals[2]);
    }

    #[test]
    fn run_test_counts_and_passes() {
        let mut stream = rng::stream(8, "bb84-test", &[]);
        let session = bb84_exchange(
            600,
            &EveModel::none(),
            &ChannelConfig::noiseless(),
            &mut stream,
        );
        let report = run_test(&session, 0.25, 0, &mut stream).unwrap();
        assert_eq!(report.error_count, 0);
        assert!(report.passed);
        assert_eq!(report.qber, 0.0);
        let expected = ((0.25 * session.sender_key.len() as f64).ceil()) as usize;
        assert_eq!(report.tested_indices.len(), expected);

        let (sender, receiver) = session.surviving_keys(&report);
        assert_eq!(sender.len(), session.sender_key.len() - expected);
        assert_eq!(sender, receiver);
    }

    #[test]
    fn swap_attack_detected() {
        let mut failures = 0;
        for seed in 0..50 {
            let mut stream = rng::stream(seed, "bb84-detect", &[]);
            let session = bb84_exchange(
                10_000,
                &EveModel {
                    kind: EveKind::Swap,
                    seed,
                },
                &ChannelConfig::noiseless(),
                &mut stream,
            );
            let report = run_test(&session, 0.1, 0, &mut stream).unwrap();
            if !report.passed {
                failures += 1;
            }
        }
        assert_eq!(failures, 50, "swap must essentially always trip the test");
    }

    #[test]
    fn half_swap_passes_about_half_the_time() {
        let mut passes = 0u32;
        let trials = 200u64;
        for seed in 0..trials {
            let mut stream = rng::stream(seed, "bb84-half", &[]);
            let session = bb84_exchange(
                100,
                &EveModel {
                    kind: EveKind::HalfSwap,
                    seed: 10_000 + seed,
                },
                &ChannelConfig::noiseless(),
                &mut stream,
            );
            // Pin the sacrifice at 10 test bits.
            let fraction = 9.5 / session.sender_key.len() as f64;
            let report = run_test(&session, fraction, 0, &mut stream).unwrap();
            assert_eq!(report.tested_indices.len(), 10);
            if report.passed {
                passes += 1;
            }
        }
        let rate = f64::from(passes) / trials as f64;
        assert!(rate >= 0.45, "pass rate = {rate}");
    }

    #[test]
    fn empty_sift_report() {
        let session = QkdSession {
            n: 2,
            sender_bits: vec![0, 1],
            sender_bases: vec![Basis::Z, Basis::X],
            receiver_bases: vec![Basis::X, Basis::Z],
            receiver_bits: vec![0, 0],
            sifted_indices: vec![],
            sender_key: vec![],
            receiver_key: vec![],
        };
        let mut stream = rng::stream(9, "bb84-empty", &[]);
        let report = run_test(&session, 0.5, 0, &mut stream).unwrap();
        assert!(report.passed);
        assert_eq!(report.qber, 0.0);
    }

    #[test]
    fn dump_format() {
        let mut stream = rng::stream(10, "bb84-dump", &[]);
        let session = bb84_exchange(
            5,
            &EveModel::none(),
            &ChannelConfig::noiseless(),
            &mut stream,
        );
        let dump = session_dump(&session);
        let lines: Vec<&str> = dump.lines().collect();
        assert_eq!(
            lines[0],
            "index,sender_bit,sender_basis,receiver_basis,receiver_bit,sifted"
        );
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("0,"));

        let mut replay = rng::stream(10, "bb84-dump", &[]);
        let again = bb84_exchange(
            5,
            &EveModel::none(),
            &ChannelConfig::noiseless(),
            &mut replay,
        );
        assert_eq!(dump, session_dump(&again));
    }
}
