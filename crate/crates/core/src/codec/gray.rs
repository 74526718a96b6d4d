use super::CodecError;

/// Binary-reflected Gray code of `value` on `width` bits, most significant first.
pub fn gray_encode(value: u64, width: u32) -> Result<Vec<u8>, CodecError> {
    if width > 63 || value >> width != 0 {
        return Err(CodecError::ValueOutOfRange { value, width });
    }
    let g = value ^ (value >> 1);
    Ok((0..width).rev().map(|i| ((g >> i) & 1) as u8).collect())
}

/// Inverse of [`gray_encode`]: prefix XOR of the code bits.
pub fn gray_decode(code: &[u8]) -> u64 {
    let mut acc = 0u8;
    code.iter().fold(0u64, |v, &b| {
        acc ^= b & 1;
        (v << 1) | acc as u64
    })
}
