//! Wire format for parameter vectors: fixed-point decimal text, one byte per
//! character, values comma-separated. Fixed precision keeps payload length
//! (and therefore required key length) a pure function of the vector size.

use crate::error::{Error, Result};

/// Render each value as sign + fixed-point decimal with `decimals`
/// fractional digits (1..=17), comma separated, ASCII encoded.
pub fn serialize_params(params: &[f64], decimals: u32) -> Result<Vec<u8>> {
    if !(1..=17).contains(&decimals) {
        return Err(Error::invalid_config("decimals", "must be in 1..=17"));
    }
    let body = params
        .iter()
        .map(|v| {
            if !v.is_finite() {
                return Err(Error::MalformedPayload(format!(
                    "cannot serialize non-finite value {v}"
                )));
            }
            Ok(format!("{v:.prec$}", prec = decimals as usize))
        })
        .collect::<Result<Vec<_>>>()?
        .join(",");
    Ok(body.into_bytes())
}

/// Exact inverse of [`serialize_params`].
pub fn deserialize_params(bytes: &[u8]) -> Result<Vec<f64>> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Error::MalformedPayload(format!("payload is not ASCII text: {e}")))?;
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|field| {
            field
                .parse::<f64>()
                .map_err(|_| Error::MalformedPayload(format!("bad number field {field:?}")))
        })
        .collect()
}
