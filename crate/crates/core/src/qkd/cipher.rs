//! Symmetric ciphers over QKD key material: the modular shift cipher
//! `c = (m + 2k) mod 256` and the XOR one-time pad, plus bit-to-byte key
//! fitting.

use crate::error::{Error, Result};

/// Pack the first `8 * needed_bytes` key bits big-endian into bytes.
/// Errors when the key is too short; the caller is expected to run another
/// exchange.
pub fn fit_key_to_message(key_bits: &[u8], needed_bytes: usize) -> Result<Vec<u8>> {
    let needed_bits = needed_bytes * 8;
    if key_bits.len() < needed_bits {
        return Err(Error::KeyMaterial {
            needed: needed_bits,
            available: key_bits.len(),
        });
    }
    Ok(key_bits[..needed_bits]
        .chunks_exact(8)
        .map(|byte| byte.iter().fold(0u8, |acc, &bit| (acc << 1) | bit))
        .collect())
}

fn check_lengths(message: usize, key: usize) -> Result<()> {
    if message != key {
        return Err(Error::DimensionMismatch(format!(
            "message length {message} != key length {key}"
        )));
    }
    Ok(())
}

/// `c_i = (m_i + 2 k_i) mod 256`
pub fn encrypt_bytes(message: &[u8], key: &[u8]) -> Result<Vec<u8>> {
    check_lengths(message.len(), key.len())?;
    Ok(message
        .iter()
        .zip(key)
        .map(|(&m, &k)| m.wrapping_add(k.wrapping_mul(2)))
        .collect())
}

/// `m_i = (c_i - 2 k_i) mod 256`
pub fn decrypt_bytes(cipher: &[u8], key: &[u8]) -> Result<Vec<u8>> {
    check_lengths(cipher.len(), key.len())?;
    Ok(cipher
        .iter()
        .zip(key)
        .map(|(&c, &k)| c.wrapping_sub(k.wrapping_mul(2)))
        .collect())
}

/// Bitwise XOR of two equal-length bit sequences; self-inverse.
pub fn xor_cipher(message_bits: &[u8], key_bits: &[u8]) -> Result<Vec<u8>> {
    check_lengths(message_bits.len(), key_bits.len())?;
    Ok(message_bits
        .iter()
        .zip(key_bits)
        .map(|(&m, &k)| m ^ k)
        .collect())
}

/// XOR one-time pad on packed bytes (the byte-level view of [`xor_cipher`]).
pub fn xor_bytes(message: &[u8], key: &[u8]) -> Result<Vec<u8>> {
    check_lengths(message.len(), key.len())?;
    Ok(message.iter().zip(key).map(|(&m, &k)| m ^ k).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn key_packing_big_endian() {
        assert_eq!(
            fit_key_to_message(&[0, 1, 0, 0, 0, 0, 0, 1], 1).unwrap(),
            vec![65]
        );
        assert_eq!(fit_key_to_message(&[1, 0, 1], 0).unwrap(), Vec::<u8>::new());
        assert!(matches!(
            fit_key_to_message(&[1; 15], 2),
            Err(Error::KeyMaterial { .. })
        ));
    }

    #[test]
    fn key_packing_matches_brute_force() {
        let mut rng = crate::rng::stream(1, "cipher-pack", &[]);
        let bits: Vec<u8> = (0..16).map(|_| u8::from(rng.random::<bool>())).collect();
        let packed = fit_key_to_message(&bits, 2).unwrap();
        // Oracle: sum bit * 2^(7-position) per byte.
        for (byte_index, &byte) in packed.iter().enumerate() {
            let mut expected = 0u32;
            for bit_index in 0..8 {
                expected += u32::from(bits[byte_index * 8 + bit_index]) << (7 - bit_index);
            }
            assert_eq!(u32::from(byte), expected);
        }
    }

    #[test]
    fn shift_cipher_known_value() {
        // (65 + 2*66) mod 256 = 197
        assert_eq!(encrypt_bytes(&[65], &[66]).unwrap(), vec![197]);
        assert_eq!(encrypt_bytes(&[10, 20], &[0, 0]).unwrap(), vec![10, 20]);
    }

    #[test]
    fn shift_cipher_exhaustive_round_trip() {
        for m in 0..=255u8 {
            for k in 0..=255u8 {
                let c = encrypt_bytes(&[m], &[k]).unwrap();
                assert_eq!(decrypt_bytes(&c, &[k]).unwrap(), vec![m]);
            }
        }
    }

    #[test]
    fn xor_cipher_rules() {
        let m = [1u8, 0, 1, 1];
        assert_eq!(xor_cipher(&m, &m).unwrap(), vec![0, 0, 0, 0]);
        assert_eq!(xor_cipher(&m, &[0, 0, 0, 0]).unwrap(), m.to_vec());
        assert!(xor_cipher(&m, &[1]).is_err());
    }

    #[test]
    fn xor_matches_truth_table() {
        let mut rng = crate::rng::stream(2, "cipher-xor", &[]);
        let m: Vec<u8> = (0..64).map(|_| u8::from(rng.random::<bool>())).collect();
        let k: Vec<u8> = (0..64).map(|_| u8::from(rng.random::<bool>())).collect();
        let c = xor_cipher(&m, &k).unwrap();
        for i in 0..64 {
            let expected = match (m[i], k[i]) {
                (0, 0) | (1, 1) => 0,
                _ => 1,
            };
            assert_eq!(c[i], expected);
        }
        assert_eq!(xor_cipher(&c, &k).unwrap(), m);
    }

    #[test]
    fn xor_bytes_round_trip() {
        for m in [0u8, 1, 17, 128, 255] {
            for k in [0u8, 3, 99, 200, 255] {
                let c = xor_bytes(&[m], &[k]).unwrap();
                assert_eq!(xor_bytes(&c, &[k]).unwrap(), vec![m]);
            }
        }
    }
}
