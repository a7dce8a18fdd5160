//! Multi-level feature extraction.
//!
//! App-level samples are sliding windows of per-frame (inter-arrival,
//! normalized size, direction) triples. Action-level samples are sliding
//! windows of 22-dimensional statistics computed over 1-second bursts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::trace::{TrafficTrace, MICROS_PER_SECOND};
use crate::wire::frame::{Direction, FrameRecord};

/// Sizes are scaled by this and clamped to 1 before entering the classifier.
pub const SIZE_DIVISOR: f64 = 2048.0;
/// Inter-arrival times are clamped to this many seconds.
pub const DT_CLAMP_S: f64 = 1.0;
/// Number of 100 ms sub-slots used for the frame-rate moments.
const RATE_SUB_SLOTS: usize = 10;

/// Number of per-burst statistics.
pub const BURST_FEATURE_DIM: usize = 22;
/// Channels of one app-level time step: (dt, size, direction).
pub const APP_CHANNELS: usize = 3;

/// One app-level classifier input: `window_len` consecutive frame triples,
/// time-major `[t][c]`, centered on `center_frame`.
#[derive(Clone, Debug, PartialEq)]
pub struct AppFeatureSample<S> {
    /// Index of the window's center frame within the trace.
    pub center_frame: usize,
    pub window_len: usize,
    /// Flattened `window_len * 3` values.
    pub values: Vec<S>,
}

/// One second of a trace, anchored at the trace's first frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Burst {
    pub burst_index: usize,
    /// Absolute start, microseconds.
    pub start_us: i64,
    pub frames: Vec<FrameRecord>,
}

impl Burst {
    pub fn end_us(&self) -> i64 {
        self.start_us + MICROS_PER_SECOND
    }

    pub fn contains_us(&self, ts: i64) -> bool {
        ts >= self.start_us && ts < self.end_us()
    }
}

/// The 22 per-burst statistics, in tag order `p_1..p_22`.
#[derive(Clone, Debug, PartialEq)]
pub struct BurstFeatureVector<S>(pub [S; BURST_FEATURE_DIM]);

impl<S: Scalar> BurstFeatureVector<S> {
    pub fn zeros() -> Self {
        BurstFeatureVector([S::ZERO; BURST_FEATURE_DIM])
    }

    pub fn as_slice(&self) -> &[S] {
        &self.0
    }
}

/// One action-level classifier input: `window_len` consecutive burst feature
/// vectors, time-major `[t][c]`, centered on `center_burst`.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionFeatureSample<S> {
    pub center_burst: usize,
    pub window_len: usize,
    /// Flattened `window_len * 22` values.
    pub values: Vec<S>,
}

fn require_odd(name: &str, w: usize, min: usize) -> Result<()> {
    if w < min || w % 2 == 0 {
        return Err(Error::config(format!(
            "{name} must be an odd integer >= {min}, got {w}"
        )));
    }
    Ok(())
}

/// Per-frame normalized triples for a whole trace: inter-arrival seconds
/// clamped to [0, 1] (0 for the first frame), size scaled by 1/2048 and
/// clamped to 1, direction as +/-1.
pub fn frame_triples<S: Scalar>(frames: &[FrameRecord]) -> Vec<[S; APP_CHANNELS]> {
    let mut out = Vec::with_capacity(frames.len());
    for (i, f) in frames.iter().enumerate() {
        let dt = if i == 0 {
            0.0
        } else {
            let d = (f.timestamp_us - frames[i - 1].timestamp_us) as f64 / 1e6;
            d.clamp(0.0, DT_CLAMP_S)
        };
        let size = (f.size_bytes as f64 / SIZE_DIVISOR).min(1.0);
        let dir = f.direction.sign() as f64;
        out.push([S::from_f64(dt), S::from_f64(size), S::from_f64(dir)]);
    }
    out
}

/// Slide a length-`w_s` window over the trace, one sample per frame that has
/// a full window on both sides. Traces shorter than `w_s` yield no samples.
pub fn app_samples<S: Scalar>(
    trace: &TrafficTrace,
    w_s: usize,
) -> Result<Vec<AppFeatureSample<S>>> {
    require_odd("window size w_s", w_s, 3)?;
    let m = trace.frames.len();
    if m < w_s {
        return Ok(Vec::new());
    }
    let triples = frame_triples::<S>(&trace.frames);
    let half = (w_s - 1) / 2;
    let mut samples = Vec::with_capacity(m - w_s + 1);
    for center in half..=(m - 1 - half) {
        let mut values = Vec::with_capacity(w_s * APP_CHANNELS);
        for t in (center - half)..=(center + half) {
            values.extend_from_slice(&triples[t]);
        }
        samples.push(AppFeatureSample {
            center_frame: center,
            window_len: w_s,
            values,
        });
    }
    Ok(samples)
}

/// Split a trace into consecutive 1-second bursts anchored at its first
/// frame. Every frame lands in exactly one burst; empty bursts are kept.
pub fn burstify(trace: &TrafficTrace) -> Vec<Burst> {
    if trace.frames.is_empty() {
        return Vec::new();
    }
    let t0 = trace.start_us();
    // floor(duration)+1 bursts: equals ceil(duration) for fractional
    // durations and still covers the final frame when the duration is an
    // exact whole number of seconds.
    let n = (trace.duration_us() / MICROS_PER_SECOND) as usize + 1;
    let mut bursts: Vec<Burst> = (0..n)
        .map(|k| Burst {
            burst_index: k,
            start_us: t0 + k as i64 * MICROS_PER_SECOND,
            frames: Vec::new(),
        })
        .collect();
    for f in &trace.frames {
        let k = ((f.timestamp_us - t0) / MICROS_PER_SECOND) as usize;
        bursts[k].frames.push(*f);
    }
    bursts
}

fn mean<S: Scalar>(xs: &[S]) -> S {
    if xs.is_empty() {
        return S::ZERO;
    }
    xs.iter().copied().sum::<S>() / S::from_usize(xs.len())
}

/// Population variance; 0 for empty or single-element slices.
fn pop_variance<S: Scalar>(xs: &[S]) -> S {
    if xs.is_empty() {
        return S::ZERO;
    }
    let mu = mean(xs);
    xs.iter()
        .map(|&x| (x - mu) * (x - mu))
        .sum::<S>()
        / S::from_usize(xs.len())
}

/// Mean of successive differences of a time-sorted microsecond sequence, in
/// seconds; 0 when fewer than two entries.
fn mean_interval<S: Scalar>(times_us: &[i64]) -> S {
    if times_us.len() < 2 {
        return S::ZERO;
    }
    let total = (times_us[times_us.len() - 1] - times_us[0]) as f64 / 1e6;
    S::from_f64(total / (times_us.len() - 1) as f64)
}

/// Fisher-Pearson moment skewness over raw counts; 0 when the variance is 0.
fn skewness<S: Scalar>(xs: &[S]) -> S {
    let mu = mean(xs);
    let m2 = pop_variance(xs);
    if m2 <= S::ZERO {
        return S::ZERO;
    }
    let m3 = xs
        .iter()
        .map(|&x| {
            let d = x - mu;
            d * d * d
        })
        .sum::<S>()
        / S::from_usize(xs.len());
    m3 / m2.powf(S::from_f64(1.5))
}

/// Excess kurtosis over raw counts; 0 when the variance is 0.
fn excess_kurtosis<S: Scalar>(xs: &[S]) -> S {
    let mu = mean(xs);
    let m2 = pop_variance(xs);
    if m2 <= S::ZERO {
        return S::ZERO;
    }
    let m4 = xs
        .iter()
        .map(|&x| {
            let d = x - mu;
            let d2 = d * d;
            d2 * d2
        })
        .sum::<S>()
        / S::from_usize(xs.len());
    m4 / (m2 * m2) - S::from_f64(3.0)
}

/// 20/60/20 ascending size split: k = floor(0.2*n); low is the first k,
/// high the last k, mid the remaining n-2k.
fn size_split<S: Scalar>(sizes: &mut Vec<S>) -> (Vec<S>, Vec<S>, Vec<S>) {
    sizes.sort_by(|a, b| a.partial_cmp(b).expect("sizes are finite"));
    let n = sizes.len();
    let k = n / 5;
    let low = sizes[..k].to_vec();
    let mid = sizes[k..n - k].to_vec();
    let high = sizes[n - k..].to_vec();
    (low, mid, high)
}

/// Mean size, split means, split variances and mean interval for one link
/// direction: the (p7..p14) block, reused for (p15..p22).
fn link_block<S: Scalar>(frames: &[&FrameRecord]) -> [S; 8] {
    let mut sizes: Vec<S> = frames
        .iter()
        .map(|f| S::from_f64(f.size_bytes as f64))
        .collect();
    let times: Vec<i64> = frames.iter().map(|f| f.timestamp_us).collect();
    let avg = mean(&sizes);
    let (low, mid, high) = size_split(&mut sizes);
    [
        avg,
        mean(&low),
        mean(&mid),
        mean(&high),
        pop_variance(&low),
        pop_variance(&mid),
        pop_variance(&high),
        mean_interval(&times),
    ]
}

/// Compute the 22 burst statistics. Empty bursts and empty per-link subsets
/// contribute zeros.
pub fn burst_features<S: Scalar>(burst: &Burst) -> BurstFeatureVector<S> {
    let frames = &burst.frames;
    if frames.is_empty() {
        return BurstFeatureVector::zeros();
    }
    let mut p = [S::ZERO; BURST_FEATURE_DIM];

    let n = frames.len();
    p[0] = S::from_usize(n);
    let all_sizes: Vec<S> = frames
        .iter()
        .map(|f| S::from_f64(f.size_bytes as f64))
        .collect();
    p[1] = mean(&all_sizes);
    let all_times: Vec<i64> = frames.iter().map(|f| f.timestamp_us).collect();
    p[2] = mean_interval(&all_times);

    let up: Vec<&FrameRecord> = frames
        .iter()
        .filter(|f| f.direction == Direction::Uplink)
        .collect();
    let down: Vec<&FrameRecord> = frames
        .iter()
        .filter(|f| f.direction == Direction::Downlink)
        .collect();
    p[3] = S::from_usize(up.len()) / S::from_usize(down.len().max(1));

    // Frame-rate moments over ten 100 ms sub-slots of the burst.
    let mut slot_counts = [S::ZERO; RATE_SUB_SLOTS];
    for f in frames {
        let slot = (((f.timestamp_us - burst.start_us) / 100_000) as usize)
            .min(RATE_SUB_SLOTS - 1);
        slot_counts[slot] += S::ONE;
    }
    p[4] = excess_kurtosis(&slot_counts);
    p[5] = skewness(&slot_counts);

    p[6..14].copy_from_slice(&link_block(&up));
    p[14..22].copy_from_slice(&link_block(&down));

    BurstFeatureVector(p)
}

/// Burst feature vectors for every burst of a trace.
pub fn trace_burst_features<S: Scalar>(trace: &TrafficTrace) -> Vec<BurstFeatureVector<S>> {
    burstify(trace).iter().map(burst_features).collect()
}

/// Slide a length-`w_a` window over the per-burst feature vectors.
pub fn action_samples<S: Scalar>(
    features: &[BurstFeatureVector<S>],
    w_a: usize,
) -> Result<Vec<ActionFeatureSample<S>>> {
    require_odd("window size w_a", w_a, 1)?;
    let n = features.len();
    if n < w_a {
        return Ok(Vec::new());
    }
    let half = (w_a - 1) / 2;
    let mut samples = Vec::with_capacity(n - w_a + 1);
    for center in half..=(n - 1 - half) {
        let mut values = Vec::with_capacity(w_a * BURST_FEATURE_DIM);
        for t in (center - half)..=(center + half) {
            values.extend_from_slice(features[t].as_slice());
        }
        samples.push(ActionFeatureSample {
            center_burst: center,
            window_len: w_a,
            values,
        });
    }
    Ok(samples)
}

/// Dump burst feature vectors as delimited text with the `p_1..p_22` header.
pub fn write_burst_features_csv<S: Scalar>(
    path: &Path,
    features: &[BurstFeatureVector<S>],
) -> Result<()> {
    let mut out = String::new();
    let header: Vec<String> = (1..=BURST_FEATURE_DIM).map(|i| format!("p_{i}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for f in features {
        let row: Vec<String> = f.as_slice().iter().map(|v| format!("{}", v.to_f64())).collect();
        writeln!(out, "{}", row.join(",")).expect("string write cannot fail");
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mac::MacAddr;
    use proptest::prelude::*;

    fn mac(last: u8) -> MacAddr {
        MacAddr::new([2, 0, 0, 0, 0, last])
    }

    fn frame(ts_us: i64, size: u32, dir: Direction) -> FrameRecord {
        FrameRecord::new(ts_us, size, dir, mac(7), mac(1)).unwrap()
    }

    fn trace_of(frames: Vec<FrameRecord>) -> TrafficTrace {
        TrafficTrace {
            station: mac(7),
            trace_index: 0,
            frames,
        }
    }

    fn uniform_trace(m: usize) -> TrafficTrace {
        trace_of(
            (0..m)
                .map(|i| frame(i as i64 * 50_000, 100 + i as u32, Direction::Uplink))
                .collect(),
        )
    }

    #[test]
    fn app_sample_counts_match_center_enumeration() {
        let trace = uniform_trace(100);
        let samples = app_samples::<f64>(&trace, 31).unwrap();
        assert_eq!(samples.len(), 70);
        assert_eq!(samples.first().unwrap().center_frame, 15);
        assert_eq!(samples.last().unwrap().center_frame, 84);

        let one = app_samples::<f64>(&uniform_trace(31), 31).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].center_frame, 15);
    }

    #[test]
    fn even_window_is_a_configuration_error() {
        let trace = uniform_trace(29);
        assert!(app_samples::<f64>(&trace, 30).is_err());
        assert!(app_samples::<f64>(&trace, 1).is_err());
        assert!(action_samples::<f64>(&[], 4).is_err());
    }

    #[test]
    fn short_trace_yields_no_samples() {
        let trace = uniform_trace(10);
        assert!(app_samples::<f64>(&trace, 31).unwrap().is_empty());
    }

    #[test]
    fn triples_are_normalized() {
        let trace = trace_of(vec![
            frame(0, 5000, Direction::Uplink),
            frame(2_500_000, 512, Direction::Downlink),
        ]);
        let t = frame_triples::<f64>(&trace.frames);
        assert_eq!(t[0], [0.0, 1.0, 1.0]); // first dt 0, size clamped
        assert_eq!(t[1], [1.0, 0.25, -1.0]); // dt clamped to 1 s
    }

    #[test]
    fn burst_count_examples() {
        // duration 9.5 s -> 10 bursts
        let t = trace_of(vec![
            frame(0, 100, Direction::Uplink),
            frame(9_500_000, 100, Direction::Uplink),
        ]);
        assert_eq!(burstify(&t).len(), 10);

        // everything within 0.3 s -> 1 burst
        let t = trace_of(vec![
            frame(0, 100, Direction::Uplink),
            frame(300_000, 100, Direction::Uplink),
        ]);
        assert_eq!(burstify(&t).len(), 1);

        // offsets 0.1, 1.0, 2.99 from an anchor at 0.1 -> bursts 0, 1, 2
        let t = trace_of(vec![
            frame(100_000, 100, Direction::Uplink),
            frame(1_000_000, 100, Direction::Uplink),
            frame(2_990_000, 100, Direction::Uplink),
        ]);
        let bursts = burstify(&t);
        assert_eq!(bursts.len(), 3);
        assert!(bursts.iter().all(|b| b.frames.len() == 1));
    }

    #[test]
    fn whole_second_duration_still_covers_every_frame() {
        let t = trace_of(vec![
            frame(0, 100, Direction::Uplink),
            frame(2_000_000, 100, Direction::Uplink),
        ]);
        let bursts = burstify(&t);
        assert_eq!(bursts.len(), 3);
        let assigned: usize = bursts.iter().map(|b| b.frames.len()).sum();
        assert_eq!(assigned, 2);
        for b in &bursts {
            for f in &b.frames {
                assert!(b.contains_us(f.timestamp_us));
            }
        }
    }

    #[test]
    fn burst_feature_golden_example() {
        let b = Burst {
            burst_index: 0,
            start_us: 0,
            frames: vec![
                frame(0, 100, Direction::Uplink),
                frame(200_000, 200, Direction::Downlink),
                frame(500_000, 300, Direction::Uplink),
            ],
        };
        let p = burst_features::<f64>(&b).0;
        let expected = [
            3.0,                    // p1 frame count
            200.0,                  // p2 mean size
            0.25,                   // p3 mean interval
            2.0,                    // p4 up/down ratio
            -1.2380952380952381,    // p5 rate kurtosis (hand-computed)
            0.8728715609439697,     // p6 rate skewness (hand-computed)
            200.0,                  // p7 mean up size
            0.0,                    // p8 low-20% empty (k=0)
            200.0,                  // p9 mid-60% mean
            0.0,                    // p10 high-20% empty
            0.0,                    // p11
            10000.0,                // p12 mid variance
            0.0,                    // p13
            0.5,                    // p14 up mean interval
            200.0,                  // p15 mean down size
            0.0,                    // p16
            200.0,                  // p17
            0.0,                    // p18
            0.0,                    // p19
            0.0,                    // p20 single element
            0.0,                    // p21
            0.0,                    // p22 single down frame
        ];
        for (i, (&got, &want)) in p.iter().zip(expected.iter()).enumerate() {
            assert!(
                (got - want).abs() < 1e-12,
                "p_{}: got {got}, want {want}",
                i + 1
            );
        }
    }

    #[test]
    fn empty_burst_is_all_zeros() {
        let b = Burst {
            burst_index: 0,
            start_us: 0,
            frames: vec![],
        };
        assert_eq!(burst_features::<f64>(&b), BurstFeatureVector::zeros());
    }

    #[test]
    fn action_sample_counts() {
        let feats: Vec<BurstFeatureVector<f64>> =
            (0..10).map(|_| BurstFeatureVector::zeros()).collect();
        let s = action_samples(&feats, 5).unwrap();
        assert_eq!(s.len(), 6);
        assert_eq!(s[0].center_burst, 2);
        assert_eq!(s[5].center_burst, 7);

        let feats3: Vec<BurstFeatureVector<f64>> =
            (0..3).map(|_| BurstFeatureVector::zeros()).collect();
        assert!(action_samples(&feats3, 5).unwrap().is_empty());

        let identity = action_samples(&feats, 1).unwrap();
        assert_eq!(identity.len(), 10);
        assert_eq!(identity[3].values, feats[3].as_slice());
    }

    fn arbitrary_burst() -> impl Strategy<Value = Burst> {
        proptest::collection::vec((0i64..1_000_000, 24u32..4000, prop::bool::ANY), 0..40).prop_map(
            |specs| {
                let mut frames: Vec<FrameRecord> = specs
                    .into_iter()
                    .map(|(off, size, up)| {
                        frame(
                            off,
                            size,
                            if up {
                                Direction::Uplink
                            } else {
                                Direction::Downlink
                            },
                        )
                    })
                    .collect();
                frames.sort_by_key(|f| f.timestamp_us);
                Burst {
                    burst_index: 0,
                    start_us: 0,
                    frames,
                }
            },
        )
    }

    proptest! {
        #[test]
        fn time_shift_leaves_features_unchanged(b in arbitrary_burst(), shift in 0i64..1_000_000_000) {
            let shifted = Burst {
                burst_index: b.burst_index,
                start_us: b.start_us + shift,
                frames: b
                    .frames
                    .iter()
                    .map(|f| frame(f.timestamp_us + shift, f.size_bytes as u32, f.direction))
                    .collect(),
            };
            let a = burst_features::<f64>(&b).0;
            let c = burst_features::<f64>(&shifted).0;
            for i in 0..BURST_FEATURE_DIM {
                prop_assert!((a[i] - c[i]).abs() < 1e-9, "p_{} changed under shift", i + 1);
            }
        }

        #[test]
        fn direction_swap_swaps_link_blocks(b in arbitrary_burst()) {
            let flipped = Burst {
                burst_index: b.burst_index,
                start_us: b.start_us,
                frames: b
                    .frames
                    .iter()
                    .map(|f| {
                        let d = match f.direction {
                            Direction::Uplink => Direction::Downlink,
                            Direction::Downlink => Direction::Uplink,
                        };
                        frame(f.timestamp_us, f.size_bytes as u32, d)
                    })
                    .collect(),
            };
            let a = burst_features::<f64>(&b).0;
            let c = burst_features::<f64>(&flipped).0;
            // p1, p2, p3, p5, p6 are direction-free.
            for i in [0usize, 1, 2, 4, 5] {
                prop_assert!((a[i] - c[i]).abs() < 1e-12);
            }
            // Uplink block (p7..p14) swaps with downlink block (p15..p22).
            for i in 0..8 {
                prop_assert!((a[6 + i] - c[14 + i]).abs() < 1e-12);
                prop_assert!((a[14 + i] - c[6 + i]).abs() < 1e-12);
            }
            // p4 becomes n_down / max(n_up, 1).
            let n_up = b.frames.iter().filter(|f| f.direction == Direction::Uplink).count();
            let n_down = b.frames.len() - n_up;
            let want = n_down as f64 / (n_up.max(1)) as f64;
            prop_assert!((c[3] - want).abs() < 1e-12);
        }

        #[test]
        fn sample_count_formulas(m in 0usize..200, half_w in 1usize..20) {
            let w = 2 * half_w + 1;
            let trace = uniform_trace(m);
            let n_app = app_samples::<f64>(&trace, w).unwrap().len();
            prop_assert_eq!(n_app, if m >= w { m - w + 1 } else { 0 });

            let feats: Vec<BurstFeatureVector<f64>> =
                (0..m).map(|_| BurstFeatureVector::zeros()).collect();
            let n_act = action_samples(&feats, w).unwrap().len();
            prop_assert_eq!(n_act, if m >= w { m - w + 1 } else { 0 });
        }

        #[test]
        fn every_frame_in_exactly_one_burst(b in arbitrary_burst()) {
            prop_assume!(!b.frames.is_empty());
            let t = trace_of(b.frames.clone());
            let bursts = burstify(&t);
            let total: usize = bursts.iter().map(|x| x.frames.len()).sum();
            prop_assert_eq!(total, t.frames.len());
            for burst in &bursts {
                for f in &burst.frames {
                    prop_assert!(burst.contains_us(f.timestamp_us));
                }
            }
        }
    }
}
