//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! per check (run with `--nocapture` to see them for passing tests).
//!
//! Stochastic criteria average their statistic over three pinned seeds at
//! the full sample counts; threshold criteria that must hold for every seed
//! are checked per seed.

use std::sync::LazyLock;

use otasync::experiments::{
    run_capacity, run_experiment, run_fig4, run_fig5, run_fig6, run_fig7, run_table1,
    ExperimentId, Fig4Result, Fig5Result, Fig7Result, OutputFormat, Overrides, Table1Result,
    ALL_SCS_KHZ, FIG7_PERIODS_MS,
};
use otasync::nr_timing::{ta_index_for_rtt, TaMode};
use otasync::{percentile, simulate, ErrorConfig, Numerology, SimConfig};

const SEEDS: [u64; 3] = [11, 23, 47];

fn overrides(seed: u64) -> Overrides {
    Overrides {
        seed: Some(seed),
        ..Overrides::default()
    }
}

static TABLE1_RUNS: LazyLock<Vec<Table1Result>> = LazyLock::new(|| {
    SEEDS
        .iter()
        .map(|&s| run_table1(&overrides(s), 4).expect("table1 runs"))
        .collect()
});

static FIG4_RUNS: LazyLock<Vec<Fig4Result>> = LazyLock::new(|| {
    SEEDS
        .iter()
        .map(|&s| run_fig4(&overrides(s), 4).expect("fig4 runs"))
        .collect()
});

static FIG5_RUNS: LazyLock<Vec<Fig5Result>> = LazyLock::new(|| {
    SEEDS
        .iter()
        .map(|&s| run_fig5(&overrides(s), 4).expect("fig5 runs"))
        .collect()
});

static FIG7_RUNS: LazyLock<Vec<Fig7Result>> = LazyLock::new(|| {
    SEEDS
        .iter()
        .map(|&s| run_fig7(&overrides(s), 4).expect("fig7 runs"))
        .collect()
});

fn seed_mean(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

struct Checks {
    criterion: &'static str,
    failures: Vec<String>,
}

impl Checks {
    fn new(criterion: &'static str) -> Self {
        Self {
            criterion,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: String) {
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("[{}] {verdict} - {detail}", self.criterion);
        if !ok {
            self.failures.push(detail);
        }
    }

    fn finish(self) {
        assert!(
            self.failures.is_empty(),
            "{} failed checks:\n  {}",
            self.criterion,
            self.failures.join("\n  ")
        );
    }
}

fn within(value: f64, target: f64, rel_tol: f64) -> bool {
    (value - target).abs() <= rel_tol * target
}

#[test]
fn ac1_table1_kappa2_uncorrected() {
    let abs_targets = [192.0, 96.0, 48.0, 24.0];
    let mean_targets = [129.0, 65.0, 32.0, 16.0];
    let mut checks = Checks::new("AC-1");
    for (i, &scs) in ALL_SCS_KHZ.iter().enumerate() {
        let abs = seed_mean(
            TABLE1_RUNS
                .iter()
                .map(|r| r.row(scs, 2.0, false).unwrap().abs_mean_ns),
        );
        let mean = seed_mean(
            TABLE1_RUNS
                .iter()
                .map(|r| r.row(scs, 2.0, false).unwrap().mean_ns.abs()),
        );
        checks.check(
            within(abs, abs_targets[i], 0.15),
            format!("{scs} kHz abs-mean {abs:.2} ns within 15% of {} ns", abs_targets[i]),
        );
        checks.check(
            within(mean, mean_targets[i], 0.10),
            format!("{scs} kHz mean-magnitude {mean:.2} ns within 10% of {} ns", mean_targets[i]),
        );
    }
    checks.finish();
}

#[test]
fn ac2_table1_kappa1_uncorrected() {
    let abs_targets = [261.0, 131.0, 65.0, 32.0];
    let mean_targets = [129.0, 65.0, 32.0, 16.0];
    let mut checks = Checks::new("AC-2");
    for (i, &scs) in ALL_SCS_KHZ.iter().enumerate() {
        let abs = seed_mean(
            TABLE1_RUNS
                .iter()
                .map(|r| r.row(scs, 1.0, false).unwrap().abs_mean_ns),
        );
        let mean = seed_mean(
            TABLE1_RUNS
                .iter()
                .map(|r| r.row(scs, 1.0, false).unwrap().mean_ns.abs()),
        );
        checks.check(
            within(abs, abs_targets[i], 0.15),
            format!("{scs} kHz abs-mean {abs:.2} ns within 15% of {} ns", abs_targets[i]),
        );
        checks.check(
            within(mean, mean_targets[i], 0.10),
            format!(
                "{scs} kHz mean-magnitude {mean:.2} ns within 10% of {} ns (kappa-independent bias)",
                mean_targets[i]
            ),
        );
    }
    checks.finish();
}

#[test]
fn ac3_table1_kappa2_corrected() {
    let max_targets = [557.0, 270.0, 138.0, 67.0];
    let mut checks = Checks::new("AC-3");
    for (i, &scs) in ALL_SCS_KHZ.iter().enumerate() {
        let mean = seed_mean(
            TABLE1_RUNS
                .iter()
                .map(|r| r.row(scs, 2.0, true).unwrap().mean_ns.abs()),
        );
        let max = seed_mean(
            TABLE1_RUNS
                .iter()
                .map(|r| r.row(scs, 2.0, true).unwrap().max_abs_ns),
        );
        let max_uncorrected = seed_mean(
            TABLE1_RUNS
                .iter()
                .map(|r| r.row(scs, 2.0, false).unwrap().max_abs_ns),
        );
        let ratio = max / max_uncorrected;
        checks.check(
            mean <= 5.0,
            format!("{scs} kHz corrected mean-magnitude {mean:.3} ns <= 5 ns"),
        );
        checks.check(
            within(max, max_targets[i], 0.25),
            format!("{scs} kHz corrected max {max:.1} ns within 25% of {} ns", max_targets[i]),
        );
        checks.check(
            (0.4..=0.7).contains(&ratio),
            format!("{scs} kHz corrected/uncorrected max ratio {ratio:.3} in [0.4, 0.7]"),
        );
    }
    checks.finish();
}

#[test]
fn ac4_fig4_percentiles_and_ordering() {
    let mut checks = Checks::new("AC-4");
    let p999_15 = seed_mean(
        FIG4_RUNS
            .iter()
            .map(|r| r.curve(15).unwrap().percentile(0.999).unwrap()),
    );
    checks.check(
        p999_15 < 1000.0,
        format!("15 kHz 99.9th percentile {p999_15:.1} ns < 1000 ns"),
    );
    for &scs in &[30, 60, 120] {
        let p = seed_mean(
            FIG4_RUNS
                .iter()
                .map(|r| r.curve(scs).unwrap().percentile(0.99999).unwrap()),
        );
        checks.check(
            p < 1000.0,
            format!("{scs} kHz 99.999th percentile {p:.1} ns < 1000 ns"),
        );
    }
    for q in [0.5, 0.9, 0.99, 0.999] {
        for pair in ALL_SCS_KHZ.windows(2) {
            let hi = seed_mean(
                FIG4_RUNS
                    .iter()
                    .map(|r| r.curve(pair[0]).unwrap().percentile(q).unwrap()),
            );
            let lo = seed_mean(
                FIG4_RUNS
                    .iter()
                    .map(|r| r.curve(pair[1]).unwrap().percentile(q).unwrap()),
            );
            checks.check(
                hi > lo,
                format!(
                    "CDF ordering at q={q}: {} kHz ({hi:.1} ns) above {} kHz ({lo:.1} ns)",
                    pair[0], pair[1]
                ),
            );
        }
    }
    checks.finish();
}

#[test]
fn ac5_fig6_thresholds_every_seed() {
    let mut checks = Checks::new("AC-5");
    for &seed in &SEEDS {
        let r = run_fig6(&overrides(seed), 2).expect("fig6 runs");
        let fast = r.run(60.0).unwrap();
        let slow = r.run(120.0).unwrap();
        checks.check(
            fast.max_abs_ns < 1000.0,
            format!("seed {seed}: 60 ms max {:.0} ns < 1000 ns", fast.max_abs_ns),
        );
        checks.check(
            slow.max_abs_ns > 1000.0,
            format!("seed {seed}: 120 ms max {:.0} ns > 1000 ns", slow.max_abs_ns),
        );
    }
    checks.finish();
}

#[test]
fn ac6_fig7_monotone_ordered_gaps() {
    let mut checks = Checks::new("AC-6");
    // Seed-averaged curve per SCS.
    let curve = |scs: u32| -> Vec<f64> {
        (0..FIG7_PERIODS_MS.len())
            .map(|i| {
                seed_mean(
                    FIG7_RUNS
                        .iter()
                        .map(|r| r.curve(scs).unwrap().points[i].mean_max_abs_ns),
                )
            })
            .collect()
    };
    let curves: Vec<(u32, Vec<f64>)> = ALL_SCS_KHZ.iter().map(|&s| (s, curve(s))).collect();

    for (scs, c) in &curves {
        let monotone = c.windows(2).all(|w| w[1] >= w[0]);
        checks.check(
            monotone,
            format!("{scs} kHz max-error curve monotone non-decreasing in period"),
        );
    }
    for (i, &period) in FIG7_PERIODS_MS.iter().enumerate() {
        let at = |j: usize| curves[j].1[i];
        checks.check(
            at(0) > at(1) && at(1) > at(2) && at(2) > at(3),
            format!(
                "period {period} ms ordered: {:.0} > {:.0} > {:.0} > {:.0} ns",
                at(0), at(1), at(2), at(3)
            ),
        );
        let gaps = [at(0) - at(1), at(1) - at(2), at(2) - at(3)];
        checks.check(
            gaps[0] >= gaps[1] && gaps[1] >= gaps[2],
            format!(
                "period {period} ms gaps non-increasing: {:.1} >= {:.1} >= {:.1} ns",
                gaps[0], gaps[1], gaps[2]
            ),
        );
    }
    checks.finish();
}

#[test]
fn ac7_fig5_monotone_and_crossing() {
    let mut checks = Checks::new("AC-7");
    for r in FIG5_RUNS.iter() {
        for c in &r.curves {
            let monotone = c
                .points
                .windows(2)
                .all(|w| w[1].max_abs_ns >= w[0].max_abs_ns);
            checks.check(
                monotone,
                format!(
                    "seed {}: {} kHz max error monotone non-decreasing in granularity",
                    r.config.seed, c.scs_khz
                ),
            );
        }
    }
    let crossing = seed_mean(
        FIG5_RUNS
            .iter()
            .map(|r| r.curve(15).unwrap().crossing_budget_ns.expect("curve crosses budget")),
    );
    checks.check(
        crossing < 100.0,
        format!("15 kHz curve reaches 1000 ns at granularity {crossing:.1} ns < 100 ns"),
    );
    checks.finish();
}

#[test]
fn ac8_capacity_exact() {
    let mut checks = Checks::new("AC-8");
    let r = run_capacity(&Overrides::default()).expect("capacity runs");
    checks.check(
        r.payload_bits == 352 && r.domains == 8,
        format!("{} payload bits into {} SIB bits -> {} domains (expected 8)",
            r.payload_bits, r.config.sib_max_bits, r.domains),
    );
    checks.finish();
}

#[test]
fn ac9_property_suite() {
    let mut checks = Checks::new("AC-9");

    // TA unit halves exactly per numerology step.
    let halving = (0u8..3).all(|mu| {
        let hi: Numerology = Numerology::new(mu).unwrap();
        let lo: Numerology = Numerology::new(mu + 1).unwrap();
        hi.ta_time_unit_ns() == 2.0 * lo.ta_time_unit_ns()
    });
    checks.check(halving, "TA time unit halves exactly across numerologies".into());

    // Floor residual bound on a deterministic grid.
    let mut floor_ok = true;
    for mu in 0..=3u8 {
        let num: Numerology = Numerology::new(mu).unwrap();
        let unit = num.ta_time_unit_ns();
        for i in 0..20_000u32 {
            let rtt = f64::from(i) * 7.3;
            let idx = ta_index_for_rtt(rtt, &num, TaMode::RandomAccess)
                .map(|ta| f64::from(ta.index()));
            let Ok(idx) = idx else {
                floor_ok = false;
                break;
            };
            let residual = rtt - idx * unit;
            if !(0.0..unit).contains(&residual) {
                floor_ok = false;
                break;
            }
        }
    }
    checks.check(floor_ok, "0 <= rtt - floor(rtt/U)*U < U over sampled grid".into());

    // Zero-error simulation peaks exactly at drift * period.
    let cfg = SimConfig {
        theta_ppm: 10.0,
        sync_period_ms: 60.0,
        duration_ms: 600.0,
        tick_ms: Some(1.0),
        seed: 3,
        numerology: Numerology::new(0).unwrap(),
        errors: ErrorConfig::zeroed(),
    };
    let max = simulate(&cfg).unwrap().max_abs_ns();
    checks.check(
        max == 600.0,
        format!("zero-error simulation max {max} ns == theta * period exactly"),
    );

    // Bit-identical reruns per seed.
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let small = Overrides {
        samples: Some(10_000),
        seed: Some(SEEDS[0]),
        ..Overrides::default()
    };
    for dir in [&dir_a, &dir_b] {
        run_experiment(ExperimentId::Fig4, &small, 2)
            .unwrap()
            .write(dir.path(), OutputFormat::Both)
            .unwrap();
    }
    let identical = ["fig4.csv", "fig4.json"].iter().all(|name| {
        std::fs::read(dir_a.path().join(name)).unwrap()
            == std::fs::read(dir_b.path().join(name)).unwrap()
    });
    checks.check(identical, "re-running with the same seed reproduces output bytes".into());

    // Nearest-rank percentile equals the full-sort oracle.
    let mut state = 0x2545_F491_4F6C_DD1Du64;
    let samples: Vec<f64> = (0..10_000)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 2_000_000) as f64 - 1_000_000.0
        })
        .collect();
    let mut sorted = samples.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let percentile_ok = (1..1000).all(|i| {
        let q = f64::from(i) / 1000.0;
        let rank = (q * samples.len() as f64).ceil() as usize;
        percentile(&samples, q).unwrap() == sorted[rank.clamp(1, samples.len()) - 1]
    });
    checks.check(
        percentile_ok,
        "percentile agrees exactly with full-sort oracle on 10^4 elements".into(),
    );

    checks.finish();
}
