use nalgebra::DMatrix;
use oamlos::channel::ChannelMatrix;
use oamlos::link::*;
use oamlos::seed;
use oamlos::Complex64;

fn channel(entries: [Complex64; 4]) -> ChannelMatrix {
    ChannelMatrix::measured(DMatrix::from_row_slice(2, 2, &entries), 10e9).unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn test_channel() -> ChannelMatrix {
    channel([c(1.0, 0.0), c(0.3, 0.2), c(-0.2, 0.3), c(0.9, -0.1)])
}

/// Mean squared error of the pilot estimate over many noise draws.
fn estimate_mse(h: &ChannelMatrix, pilot_len: usize, snr_db: f64, draws: u64) -> f64 {
    let sched = FrameSchedule::new(pilot_len, 1).unwrap();
    let bits = |id| BitStream::new(vec![0; 4], id).unwrap();
    let mut total = 0.0;
    for i in 0..draws {
        let frame = build_frame(&bits(1), &bits(2), &sched, seed::derive(7, &[i, 1])).unwrap();
        let (y1, y2) = apply_channel(&frame.tx1, &frame.tx2, h, snr_db, seed::derive(7, &[i, 2])).unwrap();
        let est = zf_channel_estimate(&y1, &y2, &frame.pilot1, &frame.pilot2, &sched).unwrap();
        for n in 0..2 {
            for m in 0..2 {
                total += (est[(n, m)] - h.entry(n, m)).norm_sqr();
            }
        }
    }
    total / draws as f64
}

#[test]
fn estimation_error_falls_as_one_over_pilot_energy() {
    let h = test_channel();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for pilot_len in [8usize, 32, 128] {
        for snr_db in [10.0, 20.0, 30.0] {
            let mse = estimate_mse(&h, pilot_len, snr_db, 400);
            xs.push((pilot_len as f64 * 10f64.powf(snr_db / 10.0)).log10());
            ys.push(mse.log10());
        }
    }
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    assert!((slope + 1.0).abs() <= 0.15, "log-log slope {slope}");
}

#[test]
fn noise_has_requested_variance() {
    let mut rng = seed::rng(11, &[seed::Stream::Noise as u64]);
    let variance = 0.37;
    let w = complex_noise(&mut rng, 1_000_000, variance);
    let power = w.iter().map(|v| v.norm_sqr()).sum::<f64>() / w.len() as f64;
    let re = w.iter().map(|v| v.re * v.re).sum::<f64>() / w.len() as f64;
    assert!((power / variance - 1.0).abs() < 0.01);
    assert!((re / (variance / 2.0) - 1.0).abs() < 0.01);
}

#[test]
fn awgn_ber_decreases_with_snr() {
    let grid = [0.0, 4.0, 8.0, 12.0, 14.0, 16.0];
    let bers: Vec<f64> = grid
        .iter()
        .map(|&snr| {
            let (e, b) = awgn_reference(snr, 25_000, 3).unwrap();
            e as f64 / b as f64
        })
        .collect();
    assert!(bers.windows(2).all(|w| w[1] <= w[0]), "{bers:?}");
}

#[test]
fn ber_approaches_one_half_at_low_snr() {
    let (e, b) = awgn_reference(-30.0, 25_000, 5).unwrap();
    assert!((e as f64 / b as f64 - 0.5).abs() < 0.01);
}

#[test]
fn raw_interference_ceiling_is_seed_independent() {
    let h = channel([c(1.0, 0.0), c(0.45, 0.1), c(0.4, -0.2), c(1.0, 0.0)]);
    let scenario = LinkScenario { channel: h, schedule: FrameSchedule::default(), equalizer: Equalizer::Raw };
    let trials = 25;
    let a = run_link_sim(&scenario, &[f64::INFINITY], trials, 1).unwrap();
    let b = run_link_sim(&scenario, &[f64::INFINITY], trials, 2).unwrap();
    for s in 0..2 {
        let (pa, pb) = (a[0].ber_per_stream[s], b[0].ber_per_stream[s]);
        assert!(pa > 0.0, "stream {s} shows no interference");
        let bits = a[0].bits_per_stream as f64;
        let sigma = (pa * (1.0 - pa) / bits).sqrt() * 2f64.sqrt();
        assert!((pa - pb).abs() <= 4.0 * sigma, "stream {s}: {pa} vs {pb}");
    }
}

#[test]
fn sweeps_are_bit_identical_for_a_seed() {
    let scenario = LinkScenario { channel: test_channel(), schedule: FrameSchedule::default(), equalizer: Equalizer::ZeroForcing };
    let grid = [0.0, 10.0, 20.0];
    assert_eq!(run_link_sim(&scenario, &grid, 6, 99).unwrap(), run_link_sim(&scenario, &grid, 6, 99).unwrap());
}
