//! BB84 key distribution over a simulated quantum channel, plus the byte
//! ciphers and parameter wire format used to move model parameters through
//! the resulting keys.

mod bb84;
mod cipher;
mod wire;

pub use bb84::{
    bb84_exchange, quantum_random_bits, run_test, session_dump, Basis, ChannelConfig, EveKind,
    EveModel, QkdSession, TestReport,
};
pub use cipher::{decrypt_bytes, encrypt_bytes, fit_key_to_message, xor_bytes, xor_cipher};
pub use wire::{deserialize_params, serialize_params};
