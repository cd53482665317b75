//! Variational quantum classifier: angle-encoding feature map plus a
//! RealAmplitudes-style ansatz (per-qubit RY layers separated by CX rings,
//! one trailing RY layer). Readout folds basis states into classes by
//! `index mod num_classes`.

use super::{encode_features, mod_class_readout, Classifier};
use crate::error::{Error, Result};
use crate::quantum::{probabilities, run_circuit, CircuitSpec, Gate, QuantumState, MAX_QUBITS};

#[derive(Debug, Clone, PartialEq)]
pub struct VqcModel {
    num_qubits: usize,
    num_layers: usize,
    num_classes: usize,
    params: Vec<f64>,
}

impl VqcModel {
    /// A model with all-zero parameters (`num_qubits * (num_layers + 1)` of
    /// them).
    pub fn new(num_qubits: usize, num_layers: usize, num_classes: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::invalid_config(
                "num_qubits",
                format!("must be in 1..={MAX_QUBITS}"),
            ));
        }
        if num_layers == 0 {
            return Err(Error::invalid_config("num_layers", "must be >= 1"));
        }
        if num_classes < 2 || num_classes > (1 << num_qubits) {
            return Err(Error::invalid_config(
                "num_classes",
                format!("must be in 2..=2^{num_qubits}"),
            ));
        }
        Ok(VqcModel {
            num_qubits,
            num_layers,
            num_classes,
            params: vec![0.0; num_qubits * (num_layers + 1)],
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_layers(&self) -> usize {
        self.num_layers
    }

    /// The full circuit for one sample: encoding, then the parameterized
    /// ansatz.
    pub fn circuit(&self, x: &[f64]) -> Result<CircuitSpec> {
        if x.len() != self.num_qubits {
            return Err(Error::DimensionMismatch(format!(
                "expected {} feature(s), got {}",
                self.num_qubits,
                x.len()
            )));
        }
        let n = self.num_qubits;
        let mut gates = encode_features(x);
        let mut params = self.params.iter();
        for _ in 0..self.num_layers {
            for qubit in 0..n {
                gates.push(Gate::Ry {
                    qubit,
                    angle: *params.next().expect("param length matches layout"),
                });
            }
            if n >= 2 {
                for qubit in 0..n {
                    gates.push(Gate::Cx {
                        control: qubit,
                        target: (qubit + 1) % n,
                    });
                }
            }
        }
        for qubit in 0..n {
            gates.push(Gate::Ry {
                qubit,
                angle: *params.next().expect("param length matches layout"),
            });
        }
        CircuitSpec::new(n, gates)
    }
}

impl Classifier for VqcModel {
    fn num_features(&self) -> usize {
        self.num_qubits
    }

    fn num_classes(&self) -> usize {
        self.num_classes
    }

    fn num_params(&self) -> usize {
        self.num_qubits * (self.num_layers + 1)
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
        Ok(VqcModel {
            params: params.to_vec(),
            ..self.clone()
        })
    }

    fn class_probabilities(&self, x: &[f64]) -> Result<Vec<f64>> {
        let circuit = self.circuit(x)?;
        let state = run_circuit(&circuit, &QuantumState::zero(self.num_qubits))?;
        Ok(mod_class_readout(&probabilities(&state), self.num_classes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_model_keeps_ground_state() {
        let model = VqcModel::new(1, 1, 2).unwrap();
        let probs = model.class_probabilities(&[0.0]).unwrap();
        assert!((probs[0] - 1.0).abs() < 1e-12);
        assert!(probs[1].abs() < 1e-12);
    }

    #[test]
    fn uniform_state_gives_even_parity_split() {
        // Drive both qubits to |+> via the encoding; CX ring maps the
        // uniform state to itself, so mod-2 readout is (0.5, 0.5).
        let model = VqcModel::new(2, 1, 2).unwrap();
        let x = [std::f64::consts::FRAC_PI_2; 2];
        let probs = model.class_probabilities(&x).unwrap();
        assert!((probs[0] - 0.5).abs() < 1e-10);
        assert!((probs[1] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn single_ry_half_pi() {
        let model = VqcModel::new(1, 1, 2)
            .unwrap()
            .with_params(&[std::f64::consts::FRAC_PI_2, 0.0])
            .unwrap();
        let probs = model.class_probabilities(&[0.0]).unwrap();
        // Scalar oracle: cos^2(pi/4) = sin^2(pi/4) = 0.5.
        assert!((probs[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn param_count_formula() {
        let model = VqcModel::new(4, 3, 2).unwrap();
        assert_eq!(model.num_params(), 4 * (3 + 1));
        assert!(model.with_params(&[0.0; 5]).is_err());
    }

    #[test]
    fn class_bounds_checked() {
        assert!(VqcModel::new(2, 1, 5).is_err());
        assert!(VqcModel::new(2, 1, 4).is_ok());
        assert!(VqcModel::new(2, 0, 2).is_err());
    }

    #[test]
    fn feature_dimension_checked() {
        let model = VqcModel::new(2, 1, 2).unwrap();
        assert!(model.class_probabilities(&[0.0]).is_err());
    }
}
