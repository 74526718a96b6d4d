use super::CodecError;

/// Payload bits zero-padded to a fixed frame length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitFrame {
    bits: Vec<u8>,
    padding: usize,
}

impl BitFrame {
    pub fn pad(payload: &[u8], frame_len: usize) -> Result<Self, CodecError> {
        if payload.len() > frame_len {
            return Err(CodecError::LengthMismatch {
                expected: frame_len,
                got: payload.len(),
            });
        }
        let mut bits = payload.to_vec();
        bits.resize(frame_len, 0);
        Ok(Self {
            bits,
            padding: frame_len - payload.len(),
        })
    }

    /// Reinterprets `bits` as a frame whose final `padding` bits are padding.
    pub fn from_parts(bits: Vec<u8>, padding: usize) -> Result<Self, CodecError> {
        if padding > bits.len() {
            return Err(CodecError::LengthMismatch {
                expected: bits.len(),
                got: padding,
            });
        }
        Ok(Self { bits, padding })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn padding(&self) -> usize {
        self.padding
    }

    pub fn payload(&self) -> &[u8] {
        &self.bits[..self.bits.len() - self.padding]
    }

    pub fn into_payload(mut self) -> Vec<u8> {
        self.bits.truncate(self.bits.len() - self.padding);
        self.bits
    }
}

/// Fraction of positions at which `sent` and `received` differ.
pub fn bit_error_rate(sent: &[u8], received: &[u8]) -> Result<f64, CodecError> {
    if sent.len() != received.len() {
        return Err(CodecError::LengthMismatch {
            expected: sent.len(),
            got: received.len(),
        });
    }
    if sent.is_empty() {
        return Err(CodecError::Empty);
    }
    let errors = sent.iter().zip(received).filter(|(a, b)| a != b).count();
    Ok(errors as f64 / sent.len() as f64)
}

/// Binary-symmetric-channel log-likelihood ratios; positive favours 0.
pub fn llr_from_hard_bits(bits: &[u8], crossover: f64) -> Result<Vec<f64>, CodecError> {
    if !(crossover > 0.0 && crossover < 0.5) {
        return Err(CodecError::InvalidCrossover(crossover));
    }
    let mag = ((1.0 - crossover) / crossover).ln();
    Ok(bits
        .iter()
        .map(|&b| if b == 0 { mag } else { -mag })
        .collect())
}

/// Hexadecimal dump of a bit string, four bits per digit, most significant first.
pub fn bits_to_hex(bits: &[u8]) -> String {
    bits.chunks(4)
        .map(|c| {
            let v = c
                .iter()
                .enumerate()
                .fold(0u32, |v, (i, &b)| v | ((b as u32) << (3 - i)));
            char::from_digit(v, 16).unwrap()
        })
        .collect()
}

/// Parses a dump written by [`bits_to_hex`] back into `n_bits` bits.
pub fn hex_to_bits(hex: &str, n_bits: usize) -> Result<Vec<u8>, CodecError> {
    let hex = hex.trim();
    if hex.len() != n_bits.div_ceil(4) {
        return Err(CodecError::LengthMismatch {
            expected: n_bits.div_ceil(4),
            got: hex.len(),
        });
    }
    let mut bits = Vec::with_capacity(hex.len() * 4);
    for c in hex.chars() {
        let v = c.to_digit(16).ok_or(CodecError::InvalidHex(c))?;
        bits.extend((0..4).rev().map(|i| ((v >> i) & 1) as u8));
    }
    if bits[n_bits..].iter().any(|&b| b != 0) {
        return Err(CodecError::InvalidHex(hex.chars().last().unwrap()));
    }
    bits.truncate(n_bits);
    Ok(bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ber_examples() {
        let a = vec![0u8, 1, 1, 0];
        assert_eq!(bit_error_rate(&a, &a).unwrap(), 0.0);
        let inv: Vec<u8> = a.iter().map(|b| 1 - b).collect();
        assert_eq!(bit_error_rate(&a, &inv).unwrap(), 1.0);
        let sent = vec![0u8; 64800];
        let mut recv = sent.clone();
        for i in 0..648 {
            recv[i * 100] = 1;
        }
        assert_eq!(bit_error_rate(&sent, &recv).unwrap(), 0.01);
        assert!(bit_error_rate(&[], &[]).is_err());
        assert!(bit_error_rate(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn llr_examples() {
        let l = llr_from_hard_bits(&[0, 1], 0.11).unwrap();
        assert!((l[0] - (0.89f64 / 0.11).ln()).abs() < 1e-15);
        assert!((l[0] - 2.090).abs() < 1e-3);
        assert_eq!(l[1], -l[0]);
        let near_half = llr_from_hard_bits(&[0], 0.5 - 1e-12).unwrap();
        assert!(near_half[0].abs() < 1e-10);
        for p in [0.0, 0.5, 0.7, -0.1, f64::NAN] {
            assert!(llr_from_hard_bits(&[0], p).is_err());
        }
    }

    #[test]
    fn frames_pad_and_strip() {
        let f = BitFrame::pad(&[1, 0, 1], 8).unwrap();
        assert_eq!(f.bits(), &[1, 0, 1, 0, 0, 0, 0, 0]);
        assert_eq!((f.padding(), f.payload()), (5, &[1u8, 0, 1][..]));
        assert_eq!(f.into_payload(), vec![1, 0, 1]);
        assert!(BitFrame::pad(&[0; 9], 8).is_err());
    }

    #[test]
    fn hex_dump() {
        let bits = vec![1, 0, 1, 0, 0, 0, 0, 1, 1];
        let hex = bits_to_hex(&bits);
        assert_eq!(hex, "a18");
        assert_eq!(hex_to_bits(&hex, 9).unwrap(), bits);
        assert!(hex_to_bits("a19", 9).is_err());
        assert!(hex_to_bits("ag8", 9).is_err());
        assert_eq!(bits_to_hex(&vec![0; 64800]).len(), 16200);
    }
}
