//! Dense state-vector simulation of small quantum circuits.
//!
//! States are immutable values over `2^n` complex amplitudes with
//! little-endian qubit ordering: qubit 0 is the least significant bit of the
//! basis index. All operations are pure; sampling happens only in
//! [`measure_all`] and takes an explicit generator.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Upper bound on simulated register width, enforced by config validation.
/// Desk-scale experiments stay at or below 8 qubits.
pub const MAX_QUBITS: usize = 20;

/// A pure quantum state: `2^num_qubits` complex amplitudes, unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// The all-zeros computational basis state `|0...0>`.
    pub fn zero(num_qubits: usize) -> Self {
        assert!(num_qubits >= 1, "state needs at least one qubit");
        let mut amplitudes = vec![Complex64::ZERO; 1 << num_qubits];
        amplitudes[0] = Complex64::ONE;
        QuantumState {
            num_qubits,
            amplitudes,
        }
    }

    /// Build a state from raw amplitudes; the length must be `2^num_qubits`
    /// and the squared-magnitude sum must be 1 within 1e-10.
    pub fn from_amplitudes(num_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 1 << num_qubits {
            return Err(Error::DimensionMismatch(format!(
                "expected {} amplitudes for {} qubit(s), got {}",
                1usize << num_qubits,
                num_qubits,
                amplitudes.len()
            )));
        }
        let state = QuantumState {
            num_qubits,
            amplitudes,
        };
        if (state.norm_sqr() - 1.0).abs() > 1e-10 {
            return Err(Error::DimensionMismatch(format!(
                "amplitudes are not normalized (norm^2 = {})",
                state.norm_sqr()
            )));
        }
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }
}

/// A single gate application. Two-qubit variants carry distinct indices;
/// rotation variants carry an angle in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H { qubit: usize },
    X { qubit: usize },
    Rx { qubit: usize, angle: f64 },
    Ry { qubit: usize, angle: f64 },
    Rz { qubit: usize, angle: f64 },
    Cx { control: usize, target: usize },
    Cz { control: usize, target: usize },
    Crz { control: usize, target: usize, angle: f64 },
}

impl Gate {
    /// The qubits this gate touches.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H { qubit } | Gate::X { qubit } => vec![qubit],
            Gate::Rx { qubit, .. } | Gate::Ry { qubit, .. } | Gate::Rz { qubit, .. } => {
                vec![qubit]
            }
            Gate::Cx { control, target }
            | Gate::Cz { control, target }
            | Gate::Crz {
                control, target, ..
            } => vec![control, target],
        }
    }

    /// The inverse gate: H and X are involutions, rotations negate the
    /// angle, controlled gates invert their base gate.
    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Rx { qubit, angle } => Gate::Rx {
                qubit,
                angle: -angle,
            },
            Gate::Ry { qubit, angle } => Gate::Ry {
                qubit,
                angle: -angle,
            },
            Gate::Rz { qubit, angle } => Gate::Rz {
                qubit,
                angle: -angle,
            },
            Gate::Crz {
                control,
                target,
                angle,
            } => Gate::Crz {
                control,
                target,
                angle: -angle,
            },
            g => g,
        }
    }

    /// Check target indices against a register width.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        for &q in &qs {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    num_qubits,
                });
            }
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::DimensionMismatch(format!(
                "two-qubit gate targets must be distinct, got ({}, {})",
                qs[0], qs[1]
            )));
        }
        Ok(())
    }
}

/// An ordered gate list over a fixed register width. Construction validates
/// every gate.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSpec {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl CircuitSpec {
    pub fn new(num_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        for gate in &gates {
            gate.validate(num_qubits)?;
        }
        Ok(CircuitSpec { num_qubits, gates })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }
}

/// 2x2 unitary for a single-qubit gate, row major.
fn single_qubit_matrix(gate: &Gate) -> [[Complex64; 2]; 2] {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    match *gate {
        Gate::H { .. } => [
            [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)],
            [c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)],
        ],
        Gate::X { .. } => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        Gate::Rx { angle, .. } => {
            let (h, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
            [[c(h, 0.0), c(0.0, -s)], [c(0.0, -s), c(h, 0.0)]]
        }
        Gate::Ry { angle, .. } => {
            let (h, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
            [[c(h, 0.0), c(-s, 0.0)], [c(s, 0.0), c(h, 0.0)]]
        }
        Gate::Rz { angle, .. } => [
            [Complex64::from_polar(1.0, -angle / 2.0), c(0.0, 0.0)],
            [c(0.0, 0.0), Complex64::from_polar(1.0, angle / 2.0)],
        ],
        _ => unreachable!("not a single-qubit gate"),
    }
}

fn apply_in_place(amplitudes: &mut [Complex64], gate: &Gate) {
    match *gate {
        Gate::H { qubit } | Gate::X { qubit } | Gate::Rx { qubit, .. } | Gate::Ry { qubit, .. }
        | Gate::Rz { qubit, .. } => {
            let m = single_qubit_matrix(gate);
            let step = 1usize << qubit;
            let mut base = 0;
            while base < amplitudes.len() {
                for offset in base..base + step {
                    let a = amplitudes[offset];
                    let b = amplitudes[offset + step];
                    amplitudes[offset] = m[0][0] * a + m[0][1] * b;
                    amplitudes[offset + step] = m[1][0] * a + m[1][1] * b;
                }
                base += step << 1;
            }
        }
        Gate::Cx { control, target } => {
            let cmask = 1usize << control;
            let tmask = 1usize << target;
            for i in 0..amplitudes.len() {
                if i & cmask != 0 && i & tmask == 0 {
                    amplitudes.swap(i, i | tmask);
                }
            }
        }
        Gate::Cz { control, target } => {
            let mask = (1usize << control) | (1usize << target);
            for (i, amp) in amplitudes.iter_mut().enumerate() {
                if i & mask == mask {
                    *amp = -*amp;
                }
            }
        }
        Gate::Crz {
            control,
            target,
            angle,
        } => {
            let cmask = 1usize << control;
            let tmask = 1usize << target;
            let phase0 = Complex64::from_polar(1.0, -angle / 2.0);
            let phase1 = Complex64::from_polar(1.0, angle / 2.0);
            for (i, amp) in amplitudes.iter_mut().enumerate() {
                if i & cmask != 0 {
                    *amp *= if i & tmask == 0 { phase0 } else { phase1 };
                }
            }
        }
    }
}

/// Apply one gate, returning the unitary image of the state.
pub fn apply_gate(state: &QuantumState, gate: &Gate) -> Result<QuantumState> {
    gate.validate(state.num_qubits)?;
    let mut next = state.clone();
    apply_in_place(&mut next.amplitudes, gate);
    Ok(next)
}

/// Run a whole circuit: the left fold of [`apply_gate`] over its gates.
pub fn run_circuit(circuit: &CircuitSpec, initial: &QuantumState) -> Result<QuantumState> {
    if circuit.num_qubits != initial.num_qubits {
        return Err(Error::DimensionMismatch(format!(
            "circuit is over {} qubit(s) but state has {}",
            circuit.num_qubits, initial.num_qubits
        )));
    }
    let mut next = initial.clone();
    for gate in &circuit.gates {
        apply_in_place(&mut next.amplitudes, gate);
    }
    Ok(next)
}

/// Exact basis-state probabilities `|amplitude_i|^2`.
pub fn probabilities(state: &QuantumState) -> Vec<f64> {
    state.amplitudes.iter().map(Complex64::norm_sqr).collect()
}

/// Sample one measurement of all qubits in the Z basis. Returns one bit per
/// qubit, index q holding qubit q's outcome.
pub fn measure_all<R: Rng>(state: &QuantumState, rng: &mut R) -> Vec<u8> {
    let u: f64 = rng.random();
    let mut cumulative = 0.0;
    let mut outcome = state.amplitudes.len() - 1;
    for (i, amp) in state.amplitudes.iter().enumerate() {
        cumulative += amp.norm_sqr();
        if u < cumulative {
            outcome = i;
            break;
        }
    }
    (0..state.num_qubits)
        .map(|q| ((outcome >> q) & 1) as u8)
        .collect()
}

/// `<Z>` on one qubit: P(bit = 0) - P(bit = 1), marginalized over the rest.
pub fn expectation_z(state: &QuantumState, qubit: usize) -> Result<f64> {
    if qubit >= state.num_qubits {
        return Err(Error::QubitOutOfRange {
            index: qubit,
            num_qubits: state.num_qubits,
        });
    }
    let mask = 1usize << qubit;
    let mut value = 0.0;
    for (i, amp) in state.amplitudes.iter().enumerate() {
        let p = amp.norm_sqr();
        value += if i & mask == 0 { p } else { -p };
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn amp(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn hadamard_on_zero() {
        let state = apply_gate(&QuantumState::zero(1), &Gate::H { qubit: 0 }).unwrap();
        assert!((state.amplitudes()[0] - amp(FRAC_1_SQRT_2)).norm() < 1e-12);
        assert!((state.amplitudes()[1] - amp(FRAC_1_SQRT_2)).norm() < 1e-12);
    }

    #[test]
    fn x_flips_zero() {
        let state = apply_gate(&QuantumState::zero(1), &Gate::X { qubit: 0 }).unwrap();
        assert!((state.amplitudes()[0]).norm() < 1e-12);
        assert!((state.amplitudes()[1] - amp(1.0)).norm() < 1e-12);
    }

    #[test]
    fn ry_half_pi_matches_matrix_product() {
        // Independent oracle: multiply the 2x2 rotation matrix against (1, 0).
        let angle = std::f64::consts::FRAC_PI_2;
        let expected = [(angle / 2.0).cos(), (angle / 2.0).sin()];
        let state = apply_gate(&QuantumState::zero(1), &Gate::Ry { qubit: 0, angle }).unwrap();
        assert!((state.amplitudes()[0] - amp(expected[0])).norm() < 1e-12);
        assert!((state.amplitudes()[1] - amp(expected[1])).norm() < 1e-12);
        assert!((expected[0] - 0.7071).abs() < 5e-5);
        assert!((expected[1] - 0.7071).abs() < 5e-5);
    }

    #[test]
    fn empty_circuit_is_identity() {
        let circuit = CircuitSpec::new(2, vec![]).unwrap();
        let initial = QuantumState::zero(2);
        assert_eq!(run_circuit(&circuit, &initial).unwrap(), initial);
    }

    #[test]
    fn double_hadamard_is_identity() {
        let circuit =
            CircuitSpec::new(1, vec![Gate::H { qubit: 0 }, Gate::H { qubit: 0 }]).unwrap();
        let state = run_circuit(&circuit, &QuantumState::zero(1)).unwrap();
        assert!((state.amplitudes()[0] - amp(1.0)).norm() < 1e-12);
        assert!(state.amplitudes()[1].norm() < 1e-12);
    }

    #[test]
    fn h_tensor_h_uniform() {
        // Oracle: tensor product of (1/sqrt2, 1/sqrt2) with itself.
        let circuit =
            CircuitSpec::new(2, vec![Gate::H { qubit: 0 }, Gate::H { qubit: 1 }]).unwrap();
        let state = run_circuit(&circuit, &QuantumState::zero(2)).unwrap();
        for a in state.amplitudes() {
            assert!((a - amp(0.5)).norm() < 1e-12);
        }
    }

    #[test]
    fn mismatched_qubit_count_rejected() {
        let circuit = CircuitSpec::new(2, vec![]).unwrap();
        assert!(run_circuit(&circuit, &QuantumState::zero(3)).is_err());
    }

    #[test]
    fn invalid_target_rejected() {
        let err = apply_gate(&QuantumState::zero(1), &Gate::X { qubit: 3 });
        assert!(matches!(err, Err(Error::QubitOutOfRange { .. })));
        assert!(CircuitSpec::new(2, vec![Gate::Cx { control: 1, target: 1 }]).is_err());
    }

    #[test]
    fn probabilities_of_known_states() {
        let one = apply_gate(&QuantumState::zero(1), &Gate::X { qubit: 0 }).unwrap();
        assert_eq!(probabilities(&one), vec![0.0, 1.0]);

        let plus = apply_gate(&QuantumState::zero(1), &Gate::H { qubit: 0 }).unwrap();
        let p = probabilities(&plus);
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);

        // RY(pi/3)|0> -> (cos^2(pi/6), sin^2(pi/6)) = (0.75, 0.25)
        let angle = std::f64::consts::FRAC_PI_3;
        let rot = apply_gate(&QuantumState::zero(1), &Gate::Ry { qubit: 0, angle }).unwrap();
        let p = probabilities(&rot);
        assert!((p[0] - 0.75).abs() < 1e-12);
        assert!((p[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn measure_all_deterministic_cases() {
        let mut rng = rng::stream(9, "measure", &[]);
        assert_eq!(measure_all(&QuantumState::zero(3), &mut rng), vec![0, 0, 0]);
        let one = apply_gate(&QuantumState::zero(1), &Gate::X { qubit: 0 }).unwrap();
        assert_eq!(measure_all(&one, &mut rng), vec![1]);
    }

    #[test]
    fn measure_all_monte_carlo() {
        let plus = apply_gate(&QuantumState::zero(1), &Gate::H { qubit: 0 }).unwrap();
        let mut rng = rng::stream(1234, "measure-mc", &[]);
        let draws = 100_000;
        let ones: u64 = (0..draws)
            .map(|_| u64::from(measure_all(&plus, &mut rng)[0]))
            .sum();
        let fraction = ones as f64 / draws as f64;
        assert!((0.49..=0.51).contains(&fraction), "fraction = {fraction}");
    }

    #[test]
    fn expectation_z_basics() {
        let zero = QuantumState::zero(1);
        assert!((expectation_z(&zero, 0).unwrap() - 1.0).abs() < 1e-12);
        let one = apply_gate(&zero, &Gate::X { qubit: 0 }).unwrap();
        assert!((expectation_z(&one, 0).unwrap() + 1.0).abs() < 1e-12);
        let plus = apply_gate(&zero, &Gate::H { qubit: 0 }).unwrap();
        assert!(expectation_z(&plus, 0).unwrap().abs() < 1e-12);
        assert!(expectation_z(&zero, 1).is_err());
    }

    #[test]
    fn little_endian_indexing() {
        // X on qubit 0 of |00> must populate basis index 1.
        let state = apply_gate(&QuantumState::zero(2), &Gate::X { qubit: 0 }).unwrap();
        assert!((state.amplitudes()[1] - amp(1.0)).norm() < 1e-12);
    }

    fn random_gate<R: Rng>(num_qubits: usize, rng: &mut R) -> Gate {
        let angle = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let q = rng.random_range(0..num_qubits);
        let mut q2 = rng.random_range(0..num_qubits);
        while num_qubits > 1 && q2 == q {
            q2 = rng.random_range(0..num_qubits);
        }
        match rng.random_range(0..8) {
            0 => Gate::H { qubit: q },
            1 => Gate::X { qubit: q },
            2 => Gate::Rx { qubit: q, angle },
            3 => Gate::Ry { qubit: q, angle },
            4 => Gate::Rz { qubit: q, angle },
            5 if num_qubits > 1 => Gate::Cx {
                control: q,
                target: q2,
            },
            6 if num_qubits > 1 => Gate::Cz {
                control: q,
                target: q2,
            },
            7 if num_qubits > 1 => Gate::Crz {
                control: q,
                target: q2,
                angle,
            },
            _ => Gate::Ry { qubit: q, angle },
        }
    }

    #[test]
    fn norm_conserved_on_random_circuits() {
        let mut rng = rng::stream(7, "norm", &[]);
        for _ in 0..50 {
            let num_qubits = rng.random_range(1..=8);
            let gates: Vec<Gate> = (0..rng.random_range(0..=64))
                .map(|_| random_gate(num_qubits, &mut rng))
                .collect();
            let circuit = CircuitSpec::new(num_qubits, gates).unwrap();
            let state = run_circuit(&circuit, &QuantumState::zero(num_qubits)).unwrap();
            assert!((state.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn gate_inverse_round_trip() {
        let mut rng = rng::stream(11, "inverse", &[]);
        for _ in 0..200 {
            let num_qubits = rng.random_range(1..=5);
            // Scramble into a generic state first.
            let warmup: Vec<Gate> = (0..6).map(|_| random_gate(num_qubits, &mut rng)).collect();
            let start =
                run_circuit(&CircuitSpec::new(num_qubits, warmup).unwrap(), &QuantumState::zero(num_qubits))
                    .unwrap();
            let gate = random_gate(num_qubits, &mut rng);
            let there = apply_gate(&start, &gate).unwrap();
            let back = apply_gate(&there, &gate.inverse()).unwrap();
            for (a, b) in back.amplitudes().iter().zip(start.amplitudes()) {
                assert!((a - b).norm() < 1e-12, "gate {gate:?} did not invert");
            }
        }
    }
}
