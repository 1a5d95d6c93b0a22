use proptest::prelude::*;
use rivalry_core::analysis::{
    analyze_series, detect_dominance_series, ActivitySeries, AnalysisConfig, Channel, DominanceInterval,
};
use rivalry_core::export::write_trajectory_csv;
use rivalry_core::integrator::{simulate, SimConfig};
use rivalry_core::model::{ModelInstance, ModelKind, Stimulus};

/// Sample-by-sample scan: label each sample, drop the undecided ones, then
/// group runs of equal labels. A run spans its first labelled sample to the
/// end of its last one.
fn scan_intervals(times: &[f64], a1: &[f64], a2: &[f64], dt: f64, delta: f64, t0: f64) -> Vec<(u8, f64, f64)> {
    let labelled: Vec<(usize, u8)> = (0..times.len())
        .filter(|&k| times[k] >= t0 - 1e-9 * dt)
        .filter_map(|k| {
            if a1[k] - a2[k] > delta {
                Some((k, 1))
            } else if a2[k] - a1[k] > delta {
                Some((k, 2))
            } else {
                None
            }
        })
        .collect();
    let mut runs: Vec<(u8, usize, usize)> = Vec::new();
    for (k, c) in labelled {
        match runs.last_mut() {
            Some(run) if run.0 == c => run.2 = k,
            _ => runs.push((c, k, k)),
        }
    }
    runs.into_iter().map(|(c, s, l)| (c, times[s], times[l] + dt)).collect()
}

struct Recount {
    mean_1: Option<f64>,
    mean_2: Option<f64>,
    switches: usize,
    predominance: (f64, f64),
}

fn recount(intervals: &[(u8, f64, f64)], window: (f64, f64)) -> Recount {
    let n = intervals.len();
    let mut sums = [0.0; 2];
    let mut counts = [0usize; 2];
    let mut totals = [0.0; 2];
    let mut switches = 0;
    for (i, &(c, s, e)) in intervals.iter().enumerate() {
        let ch = (c - 1) as usize;
        totals[ch] += e - s;
        if i > 0 && i + 1 < n {
            sums[ch] += e - s;
            counts[ch] += 1;
        }
        if i > 0 && intervals[i - 1].0 != c {
            switches += 1;
        }
    }
    let mean = |ch: usize| (counts[ch] > 0).then(|| sums[ch] / counts[ch] as f64);
    let len = window.1 - window.0;
    Recount {
        mean_1: mean(0),
        mean_2: mean(1),
        switches,
        predominance: (totals[0] / len, totals[1] / len),
    }
}

fn as_tuples(ivs: &[DominanceInterval]) -> Vec<(u8, f64, f64)> {
    ivs.iter().map(|iv| (iv.channel.number(), iv.start, iv.end)).collect()
}

fn config(delta: f64, t_transient: f64) -> AnalysisConfig {
    AnalysisConfig {
        t_transient,
        delta,
        epsilon_fusion: delta,
        min_switches_rivalry: 3,
        activity_midpoint: 0.25,
    }
}

/// Piecewise-constant pair of channels: one level pair per segment.
fn piecewise() -> impl Strategy<Value = (ActivitySeries, f64, f64)> {
    let level = prop::sample::select(vec![(1.0, 0.0), (0.0, 1.0), (0.5, 0.5), (0.55, 0.5), (0.0, 0.0), (0.8, 0.6), (0.3, 0.9)]);
    (
        prop::collection::vec((level, 1usize..40), 1..30),
        prop::sample::select(vec![1.0, 0.1, 0.25, 2.0]),
        0.01f64..0.5,
        0.0f64..0.5,
    )
        .prop_map(|(segments, dt, delta, cut)| {
            let (mut a1, mut a2) = (Vec::new(), Vec::new());
            for ((l1, l2), len) in segments {
                a1.extend(std::iter::repeat(l1).take(len));
                a2.extend(std::iter::repeat(l2).take(len));
            }
            let times: Vec<f64> = (0..a1.len()).map(|k| k as f64 * dt).collect();
            let t0 = (cut * a1.len() as f64).floor() * dt;
            (ActivitySeries::new(times, a1, a2, dt).unwrap(), delta, t0)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn detector_matches_brute_force_scan((series, delta, t0) in piecewise()) {
        let cfg = config(delta, t0);
        let report = analyze_series(&series, &cfg).unwrap();
        let oracle = scan_intervals(&series.times, &series.a1, &series.a2, series.sample_interval, delta, t0);
        prop_assert_eq!(as_tuples(&report.intervals), oracle.clone());
        let n = report.intervals.len();
        for (i, iv) in report.intervals.iter().enumerate() {
            prop_assert_eq!(iv.complete, i > 0 && i + 1 < n);
        }
        let expect = recount(&oracle, report.window);
        prop_assert_eq!(report.mean_duration_1, expect.mean_1);
        prop_assert_eq!(report.mean_duration_2, expect.mean_2);
        prop_assert_eq!(report.switches, expect.switches);
        prop_assert_eq!((report.predominance_1, report.predominance_2), expect.predominance);
        let window_s = (report.window.1 - report.window.0) / 1000.0;
        prop_assert_eq!(report.alternation_rate, expect.switches as f64 / window_s);
    }
}

fn noisy_series() -> impl Strategy<Value = ActivitySeries> {
    (prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 2..300), prop::sample::select(vec![1.0, 0.5]))
        .prop_map(|(pts, dt)| {
            let times = (0..pts.len()).map(|k| k as f64 * dt).collect();
            let (a1, a2) = pts.into_iter().unzip();
            ActivitySeries::new(times, a1, a2, dt).unwrap()
        })
}

proptest! {
    #[test]
    fn intervals_tile_the_window(series in noisy_series(), delta in 0.0f64..0.6) {
        let report = analyze_series(&series, &config(delta, 0.0)).unwrap();
        let (t0, t1) = report.window;
        let mut prev_end = t0;
        let mut prev_channel: Option<Channel> = None;
        for iv in &report.intervals {
            prop_assert!(iv.end > iv.start);
            prop_assert!(iv.start >= prev_end);
            prop_assert_ne!(Some(iv.channel), prev_channel);
            // gaps between intervals only contain undecided samples
            for k in 0..series.times.len() {
                let t = series.times[k];
                if t >= prev_end && t < iv.start {
                    prop_assert!((series.a1[k] - series.a2[k]).abs() <= delta);
                }
            }
            prev_end = iv.end;
            prev_channel = Some(iv.channel);
        }
        prop_assert!(prev_end <= t1);
        let sum = report.predominance_1 + report.predominance_2 + report.undecided_fraction;
        prop_assert!((sum - 1.0).abs() < 1e-9);
        prop_assert_eq!(report.switches, report.intervals.len().saturating_sub(1));
    }

    #[test]
    fn relabelling_swaps_every_output(series in noisy_series(), delta in 0.0f64..0.6) {
        let cfg = config(delta, 0.0);
        let direct = analyze_series(&series, &cfg).unwrap();
        let swapped = analyze_series(&series.swapped(), &cfg).unwrap();
        prop_assert_eq!(swapped, direct.swapped());
    }

    #[test]
    fn wider_margin_never_adds_switches(series in noisy_series(), d in 0.0f64..0.5, extra in 0.0f64..0.5) {
        let narrow = detect_dominance_series(&series, &config(d, 0.0)).unwrap();
        let wide = detect_dominance_series(&series, &config(d + extra, 0.0)).unwrap();
        prop_assert!(wide.len() <= narrow.len());
    }
}

#[test]
fn wilson_rivalry_intervals_match_a_scan_of_the_exported_csv() {
    let kind = ModelKind::Wilson;
    let model = ModelInstance::default_for(kind);
    let cfg = SimConfig::default_for(kind);
    let traj = simulate(&model, &Stimulus::equal(20.0).unwrap(), &cfg).unwrap();
    let analysis = AnalysisConfig::default_for(kind, cfg.duration);
    let report = rivalry_core::analysis::analyze(&traj, &analysis).unwrap();
    assert!(report.switches >= 3);

    let mut buf = Vec::new();
    write_trajectory_csv(&traj, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let e1 = header.iter().position(|h| *h == "E1").unwrap();
    let e2 = header.iter().position(|h| *h == "E2").unwrap();
    let (mut t, mut a1, mut a2) = (Vec::new(), Vec::new(), Vec::new());
    for line in lines {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        t.push(cells[0]);
        a1.push(cells[e1]);
        a2.push(cells[e2]);
    }
    let oracle = scan_intervals(&t, &a1, &a2, traj.sample_interval(), analysis.delta, analysis.t_transient);
    assert_eq!(as_tuples(&report.intervals), oracle);
    let expect = recount(&oracle, report.window);
    assert_eq!(report.mean_duration_1, expect.mean_1);
    assert_eq!(report.mean_duration_2, expect.mean_2);
    assert_eq!(report.switches, expect.switches);
}
