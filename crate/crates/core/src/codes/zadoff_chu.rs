use std::f64::consts::PI;

use num_complex::Complex64;

use super::{ComplexSequence, SequenceFamily};
use crate::error::{param, Result};

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Zadoff-Chu sequence of length `len` and root `root`.
///
/// Odd lengths use `exp(jπ r l(l+1)/L)`, even lengths `exp(jπ r l²/L)`.
/// The exponent is reduced modulo `2L` in integer arithmetic so long
/// sequences keep full phase precision.
pub fn gen_zadoff_chu(len: usize, root: usize) -> Result<ComplexSequence> {
    if len < 2 {
        return Err(param(format!("ZC length must be >= 2, got {len}")));
    }
    if root == 0 || root >= len {
        return Err(param(format!("ZC root {root} outside 1..{len}")));
    }
    if gcd(root as u64, len as u64) != 1 {
        return Err(param(format!(
            "ZC root {root} is not co-prime with length {len}"
        )));
    }
    let l_len = len as u128;
    let r = root as u128;
    let modulus = 2 * l_len;
    let values = (0..l_len)
        .map(|l| {
            let k = if len % 2 == 1 { l * (l + 1) } else { l * l };
            let num = (r * k) % modulus;
            Complex64::from_polar(1.0, PI * num as f64 / len as f64)
        })
        .collect();
    Ok(ComplexSequence {
        values,
        family: SequenceFamily::ZadoffChu,
        index: root as i64,
    })
}
