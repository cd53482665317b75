//! The secured parameter channel. Uplink pipeline order is fixed: DP noise,
//! then wire serialization, then encryption under a fresh per-transmission
//! QKD key. The downlink inverts it. With QKD disabled the payload is the
//! serialized text as-is, so the only lossy step either way is the wire
//! quantization — which is what makes security layers metric-transparent.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::privacy::{add_noise, DpConfig};
use crate::qkd::{
    bb84_exchange, decrypt_bytes, deserialize_params, encrypt_bytes, fit_key_to_message,
    run_test, serialize_params, xor_bytes, ChannelConfig, EveModel,
};
use crate::rng::StreamRng;

/// Fresh exchanges attempted before a round is abandoned.
pub const KEY_RETRY_LIMIT: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CipherKind {
    Shift256,
    Xor,
}

#[derive(Debug, Clone)]
pub struct QkdLinkConfig {
    pub cipher: CipherKind,
    pub channel: ChannelConfig,
    pub test_fraction: f64,
    pub n_allowed: usize,
}

/// What actually travels: the (possibly encrypted) payload plus the
/// receiver's copy of the symmetric key from its side of the exchange.
#[derive(Debug, Clone)]
pub struct Transmission {
    pub payload: Vec<u8>,
    pub receiver_key: Option<Vec<u8>>,
}

/// Run BB84 exchanges until enough post-test key material exists for
/// `needed_bytes`. Each attempt transmits three times the needed sifted
/// length (expected yield is about half, minus test bits).
pub fn establish_key(
    needed_bytes: usize,
    link: &QkdLinkConfig,
    rng: &mut StreamRng,
) -> Result<(Vec<u8>, Vec<u8>)> {
    let needed_bits = needed_bytes * 8;
    let n = (3 * needed_bits).max(16);
    for _ in 0..KEY_RETRY_LIMIT {
        let session = bb84_exchange(n, &EveModel::none(), &link.channel, rng);
        let report = run_test(&session, link.test_fraction, link.n_allowed, rng)?;
        if !report.passed {
            continue;
        }
        let (sender_bits, receiver_bits) = session.surviving_keys(&report);
        if sender_bits.len() >= needed_bits {
            return Ok((
                fit_key_to_message(&sender_bits, needed_bytes)?,
                fit_key_to_message(&receiver_bits, needed_bytes)?,
            ));
        }
    }
    Err(Error::RoundAbort(format!(
        "QKD key shortfall: {needed_bits} bits not reached in {KEY_RETRY_LIMIT} exchange attempts"
    )))
}

/// Prepare one parameter transmission: optional DP noise, wire encoding,
/// optional encryption.
pub fn secure_uplink(
    params: &[f64],
    dp: Option<&DpConfig>,
    qkd: Option<&QkdLinkConfig>,
    wire_decimals: u32,
    dp_rng: &mut StreamRng,
    link_rng: &mut StreamRng,
) -> Result<Transmission> {
    let noised = match dp {
        Some(cfg) => add_noise(params, cfg, dp_rng)?,
        None => params.to_vec(),
    };
    let bytes = serialize_params(&noised, wire_decimals)?;
    match qkd {
        None => Ok(Transmission {
            payload: bytes,
            receiver_key: None,
        }),
        Some(link) => {
            let (sender_key, receiver_key) = establish_key(bytes.len(), link, link_rng)?;
            let payload = match link.cipher {
                CipherKind::Shift256 => encrypt_bytes(&bytes, &sender_key)?,
                CipherKind::Xor => xor_bytes(&bytes, &sender_key)?,
            };
            Ok(Transmission {
                payload,
                receiver_key: Some(receiver_key),
            })
        }
    }
}

/// Invert [`secure_uplink`] on the receiving side.
pub fn secure_downlink(
    transmission: &Transmission,
    qkd: Option<&QkdLinkConfig>,
) -> Result<Vec<f64>> {
    let bytes = match (&transmission.receiver_key, qkd) {
        (None, None) => transmission.payload.clone(),
        (Some(key), Some(link)) => match link.cipher {
            CipherKind::Shift256 => decrypt_bytes(&transmission.payload, key)?,
            CipherKind::Xor => xor_bytes(&transmission.payload, key)?,
        },
        _ => {
            return Err(Error::MalformedPayload(
                "transmission key does not match the link configuration".into(),
            ))
        }
    };
    deserialize_params(&bytes)
}
