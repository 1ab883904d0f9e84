use super::{gen_m_sequence, BinarySequence};
use crate::error::{param, Result};

/// Feedback taps (see [`gen_m_sequence`]) of a fixed primitive polynomial per
/// even degree. Degree 8 uses x⁸+x⁴+x³+x²+1.
pub fn default_primitive_taps(degree: u32) -> Option<u32> {
    match degree {
        4 => Some(0x3),     // x^4 + x + 1
        6 => Some(0x3),     // x^6 + x + 1
        8 => Some(0x1d),    // x^8 + x^4 + x^3 + x^2 + 1
        10 => Some(0x9),    // x^10 + x^3 + 1
        12 => Some(0x53),   // x^12 + x^6 + x^4 + x + 1
        14 => Some(0x2b),   // x^14 + x^5 + x^3 + x + 1
        16 => Some(0x100b), // x^16 + x^12 + x^3 + x + 1
        _ => None,
    }
}

/// Small Kasami set of degree `degree` built on the default primitive
/// polynomial with seed 1.
pub fn gen_kasami_family(degree: u32) -> Result<Vec<BinarySequence>> {
    let taps = default_primitive_taps(degree).ok_or_else(|| {
        param(format!(
            "Kasami degree must be even in 4..=16, got {degree}"
        ))
    })?;
    gen_kasami_family_with(degree, taps, 1)
}

/// Small Kasami set from an explicit m-sequence generator.
///
/// Member 1 is `m1` itself; member `k ≥ 2` is `m1 ⊕ D^(k-1) m2` where `m2` is
/// `m1` decimated by `q = 2^(N/2) + 1` (period `2^(N/2) − 1`, repeated `q` times)
/// and `D^l` is a cyclic left shift by `l`.
pub fn gen_kasami_family_with(degree: u32, taps: u32, seed: u32) -> Result<Vec<BinarySequence>> {
    if degree < 4 || !degree.is_multiple_of(2) {
        return Err(param(format!(
            "Kasami degree must be even and >= 4, got {degree}"
        )));
    }
    let m1 = gen_m_sequence(degree, taps, seed)?;
    let len = m1.len();
    let q = (1usize << (degree / 2)) + 1;
    let m2: Vec<u8> = (0..len).map(|j| m1.bits[(j * q) % len]).collect();
    if m2.iter().all(|&b| b == 0) {
        return Err(param("decimated sequence vanished; choose another seed"));
    }
    let size = 1usize << (degree / 2);
    let mut family = Vec::with_capacity(size);
    family.push(m1.clone());
    for shift in 1..size {
        let bits = (0..len)
            .map(|n| m1.bits[n] ^ m2[(n + shift) % len])
            .collect();
        family.push(BinarySequence { bits });
    }
    Ok(family)
}
