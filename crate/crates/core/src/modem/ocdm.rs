use crate::codes::ComplexSequence;
use crate::error::{Error, Result};
use crate::waveform::{ComplexWaveform, Scheme, Waveform};

/// OCDM: every code element weights one chirp symbol,
/// `Re(z)·Re(CH[n]) − Im(z)·Im(CH[n])`.
pub fn ocdm_modulate(code: &ComplexSequence, chirp: &ComplexWaveform) -> Result<Waveform> {
    if chirp.is_empty() {
        return Err(Error::Empty("chirp symbol"));
    }
    let samples = code
        .values
        .iter()
        .flat_map(|z| chirp.samples.iter().map(move |c| z.re * c.re - z.im * c.im))
        .collect();
    Ok(Waveform::new(samples, chirp.sample_rate)?.tagged(Scheme::ZcChirp, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{gen_chirp_set, gen_zadoff_chu};
    use num_complex::Complex64;

    #[test]
    fn sixty_seven_symbol_length() {
        let chirps = gen_chirp_set(37e3, 45e3, 0.36e-3, 500e3, 5).unwrap();
        for (root, ch) in [1, 66, 34, 33, 22].into_iter().zip(&chirps) {
            let z = gen_zadoff_chu(67, root).unwrap();
            let w = ocdm_modulate(&z, ch).unwrap();
            assert_eq!(w.len(), 12_060);
            assert!((w.duration() - 24.12e-3).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_code_gives_real_chirp() {
        let ch = &gen_chirp_set(37e3, 45e3, 0.36e-3, 500e3, 1).unwrap()[0];
        let w =
            ocdm_modulate(&ComplexSequence::custom(vec![Complex64::new(1.0, 0.0)]), ch).unwrap();
        assert_eq!(w.samples, ch.real_part().samples);
    }
}
