//! Payload conversions: text ↔ 5-bit character codes ↔ bit arrays, and bit
//! arrays ↔ arbitrary-precision integers.
//!
//! The alphabet has 27 symbols — space plus a–z — coded as 0 through 26 in
//! five bits, most-significant bit first. Codes 27–31 are invalid and decode
//! to an error rather than a substitute character.
//!
//! Bit arrays are plain `Vec<u8>` holding 0/1 values.

use num_bigint::BigUint;
use thiserror::Error;

/// Bits per character code.
pub const BITS_PER_CHAR: usize = 5;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("unsupported character {ch:?} at position {pos} (alphabet is space and a-z)")]
    UnsupportedChar { ch: char, pos: usize },
    #[error("bit array length {len} is not a multiple of {BITS_PER_CHAR}")]
    LengthNotMultiple { len: usize },
    #[error("group {index} decodes to invalid code {value} (valid codes are 0-26)")]
    InvalidGroup { index: usize, value: u8 },
    #[error("bit array is empty")]
    EmptyBits,
    #[error("entry at position {pos} is {value}, not a bit")]
    NotABit { pos: usize, value: u8 },
    #[error("value needs {needed} bits but only {len} were requested")]
    ValueTooWide { needed: u64, len: usize },
    #[error("requested bit length is zero")]
    ZeroLength,
}

fn check_bits(bits: &[u8]) -> Result<(), CodecError> {
    if bits.is_empty() {
        return Err(CodecError::EmptyBits);
    }
    for (pos, &value) in bits.iter().enumerate() {
        if value > 1 {
            return Err(CodecError::NotABit { pos, value });
        }
    }
    Ok(())
}

fn char_code(ch: char, pos: usize) -> Result<u8, CodecError> {
    match ch {
        ' ' => Ok(0),
        'a'..='z' => Ok(ch as u8 - b'a' + 1),
        _ => Err(CodecError::UnsupportedChar { ch, pos }),
    }
}

/// Encode text over the 27-symbol alphabet as 5 bits per character,
/// most-significant bit first. Input is case-folded to lowercase; any other
/// character is rejected.
pub fn text_to_bits(text: &str) -> Result<Vec<u8>, CodecError> {
    let mut bits = Vec::with_capacity(text.len() * BITS_PER_CHAR);
    for (pos, ch) in text.chars().enumerate() {
        let folded = ch.to_ascii_lowercase();
        let code = char_code(folded, pos)?;
        for k in (0..BITS_PER_CHAR).rev() {
            bits.push((code >> k) & 1);
        }
    }
    Ok(bits)
}

/// Decode a bit array back to text; inverse of [`text_to_bits`].
pub fn bits_to_text(bits: &[u8]) -> Result<String, CodecError> {
    check_bits(bits)?;
    if bits.len() % BITS_PER_CHAR != 0 {
        return Err(CodecError::LengthNotMultiple { len: bits.len() });
    }
    let mut text = String::with_capacity(bits.len() / BITS_PER_CHAR);
    for (index, group) in bits.chunks(BITS_PER_CHAR).enumerate() {
        let value = group.iter().fold(0u8, |acc, &b| (acc << 1) | b);
        match value {
            0 => text.push(' '),
            1..=26 => text.push((b'a' + value - 1) as char),
            _ => return Err(CodecError::InvalidGroup { index, value }),
        }
    }
    Ok(text)
}

/// Interpret a bit array as a big-endian arbitrary-precision integer.
pub fn bits_to_number(bits: &[u8]) -> Result<BigUint, CodecError> {
    check_bits(bits)?;
    let mut value = BigUint::ZERO;
    for &b in bits {
        value = (value << 1) | BigUint::from(b);
    }
    Ok(value)
}

/// Render a value as a big-endian bit array of exactly `len` bits;
/// inverse of [`bits_to_number`] for values that fit.
pub fn number_to_bits(value: &BigUint, len: usize) -> Result<Vec<u8>, CodecError> {
    if len == 0 {
        return Err(CodecError::ZeroLength);
    }
    let needed = value.bits();
    if needed > len as u64 {
        return Err(CodecError::ValueTooWide { needed, len });
    }
    Ok((0..len)
        .rev()
        .map(|k| if value.bit(k as u64) { 1 } else { 0 })
        .collect())
}
