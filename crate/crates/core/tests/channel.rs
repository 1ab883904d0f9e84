use alps::channel::{
    add_awgn, doppler_resample, sample_multipath, DopplerSpec, FirDesign, MultipathProfile,
    TRANSDUCER_CENTER_HZ,
};
use alps::Waveform;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FS: f64 = 500e3;

fn tone(n: usize, f: f64) -> Waveform {
    let s = (0..n)
        .map(|i| (2.0 * std::f64::consts::PI * f * i as f64 / FS).sin())
        .collect();
    Waveform::new(s, FS).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn awgn_hits_the_requested_snr(snr in -10.0..30.0f64, seed in any::<u64>()) {
        let w = tone(200_000, 41e3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = add_awgn(&w, snr, &mut rng).unwrap();
        let ps = w.samples.iter().map(|v| v * v).sum::<f64>();
        let pn = w.samples.iter().zip(&y.samples).map(|(a, b)| (b - a).powi(2)).sum::<f64>();
        let measured = 10.0 * (ps / pn).log10();
        // the estimate has a standard deviation of 4.34·sqrt(2/n) ≈ 0.014 dB
        prop_assert!((measured - snr).abs() < 0.1, "{measured} vs {snr}");
    }

    #[test]
    fn multipath_draws_respect_the_profile(count in 0usize..30, seed in any::<u64>()) {
        let p = MultipathProfile::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let list = sample_multipath(&mut rng, count, &p, 3).unwrap();
        let direct = &list.paths[0];
        prop_assert_eq!((direct.delay, direct.attenuation), (0.0, 1.0));
        prop_assert_eq!(list.paths.len(), count + 1);
        for path in &list.paths[1..] {
            prop_assert!(path.delay >= p.delay_min && path.delay <= p.delay_max);
            prop_assert!((0.0..=1.0).contains(&path.attenuation));
            prop_assert_eq!(path.beacon_id, 3);
        }
    }

    #[test]
    fn doppler_scales_length_by_the_rate_ratio(v in -4.0..4.0f64) {
        let w = tone(12_000, 41e3);
        let spec = DopplerSpec::radial(v, 343.0, FS);
        let y = doppler_resample(&w, &spec).unwrap();
        let ratio = spec.virtual_rate().unwrap() / FS;
        let span = ((w.len() - 1) as f64 / ratio).floor() as usize + 1;
        prop_assert_eq!(y.len(), span);
        prop_assert!((y.len() as f64 - w.len() as f64 / ratio).abs() < 2.0);
    }
}

#[test]
fn doppler_at_rest_is_the_identity() {
    let w = tone(4000, 41e3);
    let y = doppler_resample(&w, &DopplerSpec::radial(0.0, 343.0, FS)).unwrap();
    assert_eq!(y.len(), w.len());
    let err = w
        .samples
        .iter()
        .zip(&y.samples)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-9, "{err}");
}

#[test]
fn approaching_receiver_hears_a_higher_tone() {
    let w = tone(50_000, 40e3);
    let y = doppler_resample(&w, &DopplerSpec::radial(4.0, 343.0, FS)).unwrap();
    // zero crossings per second estimate the tone frequency
    let freq = |s: &[f64]| {
        let z = s.windows(2).filter(|p| p[0] < 0.0 && p[1] >= 0.0).count();
        z as f64 / (s.len() as f64 / FS)
    };
    let shift = freq(&y.samples[1000..40_000]) / freq(&w.samples[1000..40_000]);
    assert!((shift - (343.0 + 4.0) / 343.0).abs() < 2e-3, "{shift}");
}

#[test]
fn transducer_model_meets_its_band_requirements() {
    let fir = FirDesign::default().build(FS).unwrap();
    let (_, peak) = fir.peak();
    assert!(20.0 * peak.log10() - fir.gain_db(TRANSDUCER_CENTER_HZ) < 3.0);
    assert!(fir.stopband_rejection_db(30e3, 55e3) <= -30.0);
    assert!(fir.taps.iter().all(|t| t.is_finite()));
}
