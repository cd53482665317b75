//! Simplified quantum convolutional classifier. Each stage applies a
//! three-parameter block to adjacent active-qubit pairs (RY on both, CX from
//! the discarded into the kept qubit, RZ on the kept qubit), then drops the
//! second qubit of every pair. Pooling is discard-without-measurement, so
//! stages halve the active set until a single readout qubit remains; its
//! Z marginal is the binary class distribution.

use super::{encode_features, Classifier};
use crate::error::{Error, Result};
use crate::quantum::{probabilities, run_circuit, CircuitSpec, Gate, QuantumState, MAX_QUBITS};

#[derive(Debug, Clone, PartialEq)]
pub struct QcnnModel {
    num_qubits: usize,
    params: Vec<f64>,
}

impl QcnnModel {
    /// A zero-parameter model over a power-of-two register. Parameter count
    /// is 3 per pair per stage, i.e. `3 * (num_qubits - 1)` in total.
    pub fn new(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS || !num_qubits.is_power_of_two() {
            return Err(Error::invalid_config(
                "num_qubits",
                format!("must be a power of two in 1..={MAX_QUBITS}"),
            ));
        }
        Ok(QcnnModel {
            num_qubits,
            params: vec![0.0; 3 * (num_qubits - 1)],
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_stages(&self) -> usize {
        self.num_qubits.trailing_zeros() as usize
    }

    /// Active qubits after `stage` halvings: the kept (first) member of each
    /// adjacent pair survives.
    pub fn active_qubits_after(&self, stage: usize) -> Vec<usize> {
        let mut active: Vec<usize> = (0..self.num_qubits).collect();
        for _ in 0..stage {
            active = active.chunks(2).map(|pair| pair[0]).collect();
        }
        active
    }

    pub fn circuit(&self, x: &[f64]) -> Result<CircuitSpec> {
        if x.len() != self.num_qubits {
            return Err(Error::DimensionMismatch(format!(
                "expected {} feature(s), got {}",
                self.num_qubits,
                x.len()
            )));
        }
        let mut gates = encode_features(x);
        let mut params = self.params.iter();
        let mut active: Vec<usize> = (0..self.num_qubits).collect();
        while active.len() > 1 {
            let mut next = Vec::with_capacity(active.len() / 2);
            for pair in active.chunks(2) {
                let (kept, dropped) = (pair[0], pair[1]);
                let mut angle = || *params.next().expect("param length matches layout");
                gates.push(Gate::Ry {
                    qubit: kept,
                    angle: angle(),
                });
                gates.push(Gate::Ry {
                    qubit: dropped,
                    angle: angle(),
                });
                gates.push(Gate::Cx {
                    control: dropped,
                    target: kept,
                });
                gates.push(Gate::Rz {
                    qubit: kept,
                    angle: angle(),
                });
                next.push(kept);
            }
            active = next;
        }
        CircuitSpec::new(self.num_qubits, gates)
    }

    /// The qubit whose Z marginal is read out (always qubit 0 with the
    /// kept-first pooling rule).
    pub fn readout_qubit(&self) -> usize {
        *self
            .active_qubits_after(self.num_stages())
            .first()
            .expect("at least one active qubit")
    }
}

impl Classifier for QcnnModel {
    fn num_features(&self) -> usize {
        self.num_qubits
    }

    fn num_classes(&self) -> usize {
        2
    }

    fn num_params(&self) -> usize {
        3 * (self.num_qubits - 1)
    }

    fn params(&self) -> &[f64] {
        &self.params
    }

    fn with_params(&self, params: &[f64]) -> Result<Self> {
        if params.len() != self.num_params() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} parameter(s), got {}",
                self.num_params(),
                params.len()
            )));
        }
        Ok(QcnnModel {
            num_qubits: self.num_qubits,
            params: params.to_vec(),
        })
    }

    fn class_probabilities(&self, x: &[f64]) -> Result<Vec<f64>> {
        let circuit = self.circuit(x)?;
        let state = run_circuit(&circuit, &QuantumState::zero(self.num_qubits))?;
        let mask = 1usize << self.readout_qubit();
        let mut p0 = 0.0;
        for (index, p) in probabilities(&state).iter().enumerate() {
            if index & mask == 0 {
                p0 += p;
            }
        }
        Ok(vec![p0, 1.0 - p0])
    }
}
