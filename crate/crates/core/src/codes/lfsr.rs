use super::BinarySequence;
use crate::error::{param, Error, Result};

/// Maximal-length sequence from a Fibonacci LFSR.
///
/// `taps` holds the low coefficients of the feedback polynomial
/// `x^degree + Σ c_i x^i`: bit `i` is `c_i` (the leading term is implicit).
/// Bit `i` of `seed` is the initial `a[i]`; the output obeys
/// `a[n + degree] = Σ c_i a[n + i]` over GF(2).
pub fn gen_m_sequence(degree: u32, taps: u32, seed: u32) -> Result<BinarySequence> {
    if !(2..=24).contains(&degree) {
        return Err(param(format!("LFSR degree {degree} outside 2..=24")));
    }
    let mask = (1u32 << degree) - 1;
    if taps & !mask != 0 {
        return Err(param(format!("taps {taps:#x} exceed degree {degree}")));
    }
    let seed = seed & mask;
    if seed == 0 {
        return Err(param("LFSR seed must be nonzero"));
    }
    let period = (1usize << degree) - 1;
    let mut state = seed;
    let mut bits = Vec::with_capacity(period);
    for step in 0..period {
        bits.push((state & 1) as u8);
        let feedback = (state & taps).count_ones() & 1;
        state = (state >> 1) | (feedback << (degree - 1));
        if state == seed && step + 1 < period {
            return Err(Error::NonPrimitive {
                degree,
                taps,
                period: step + 1,
            });
        }
    }
    if state != seed {
        // Singular register (c_0 = 0): the state never cycles back to the seed.
        return Err(Error::NonPrimitive {
            degree,
            taps,
            period: 0,
        });
    }
    Ok(BinarySequence { bits })
}
