//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fail.

mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use scrumsim::metrics::{median, Metric};
use scrumsim::model::{classify_sociability, rng_from_seed, sample_population, SosdBand};
use scrumsim::report::{scenario_report, Scenario};
use scrumsim::sweep::{execute_sweep, SweepDesign};
use scrumsim::WorldConfig;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn constants() -> WorldConfig {
    WorldConfig::load(&fixture("table2-constants.cfg")).expect("constants fixture")
}

fn scenarios_csv(workers: &str) -> Result<(Vec<u8>, Duration), String> {
    let cfg = fixture("table2-constants.cfg");
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_scrumsim"))
        .args(["scenarios", "--config"])
        .arg(&cfg)
        .args(["--reps", "30", "--seed", "1", "--workers", workers])
        .output()
        .map_err(|e| e.to_string())?;
    let took = start.elapsed();
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    Ok((out.stdout, took))
}

fn determinism() -> Outcome {
    let (a, ta) = scenarios_csv("1")?;
    let (b, tb) = scenarios_csv("1")?;
    let (c, tc) = scenarios_csv("8")?;
    let rows = a.iter().filter(|&&b| b == b'\n').count() - 1;
    if rows != 120 {
        return Err(format!("expected 120 rows, got {rows}"));
    }
    if a != b || a != c {
        return Err("CSV bytes differ between invocations".into());
    }
    let slowest = ta.max(tb).max(tc);
    if slowest >= Duration::from_secs(10) {
        return Err(format!("slowest invocation took {slowest:?}"));
    }
    Ok(format!(
        "120 rows identical at workers 1, 1, 8; slowest {:.3}s",
        slowest.as_secs_f64()
    ))
}

fn kernel_oracle() -> Outcome {
    common::kernel_oracle_check(1000, 0x00ac_ce97)?;
    Ok("1000 random cases within 1e-12, 6 guard cases exact".into())
}

fn invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a7a);
    for i in 0..100 {
        let base = common::random_config(&mut rng);
        for seed in 0..5 {
            let config = WorldConfig {
                seed,
                ..base.clone()
            };
            common::invariant_check(&config).map_err(|m| format!("config {i}: {m}"))?;
        }
    }
    Ok("100 configs x 5 seeds".into())
}

fn solo_isolation() -> Outcome {
    for seed in 0..10 {
        common::solo_isolation_check(seed)?;
    }
    Ok("0 member competence reads over 10 seeds".into())
}

fn scenario_experiment() -> Outcome {
    let base = constants();
    let master = base.seed;
    let rows =
        execute_sweep(&SweepDesign::scenarios(base, 30, master), 8).map_err(|e| e.to_string())?;
    let rep = scenario_report(&rows).map_err(|e| e.to_string())?;
    let v = Scenario::ALL.map(|s| rep.velocity(s));
    let solved = Scenario::ALL.map(|s| rep.cell(s).median(Metric::Solved).unwrap_or(f64::NAN));
    let p42 = rep.p_value(Scenario::S4, Scenario::S2).unwrap_or(f64::NAN);
    let detail = format!(
        "master seed {master}; velocity {:.3}/{:.3}/{:.3}/{:.3}; solved {}/{}/{}/{}; p(S4,S2) = {p42:.2e}; {}",
        v[0], v[1], v[2], v[3], solved[0], solved[1], solved[2], solved[3], rep.ordering
    );
    let mut failed = Vec::new();
    if !(v[3] > v[0] && v[3] > v[1] && v[3] > v[2]) || p42 >= 0.05 {
        failed.push("5a");
    }
    if v[2] <= v[0] {
        failed.push("5b");
    }
    if solved.iter().any(|&s| s.is_nan() || s < 90.0) {
        failed.push("5c");
    }
    if failed.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{} failed: {detail}", failed.join(", ")))
    }
}

fn band_mass() -> Outcome {
    const TAIL: f64 = 0.226_627_352_376_868_2;
    let config = WorldConfig {
        n_developers: 10_000,
        n_stories: 0,
        ..constants()
    };
    let pop =
        sample_population(&config, &mut rng_from_seed(config.seed)).map_err(|e| e.to_string())?;
    let high = pop
        .developers
        .iter()
        .filter(|d| classify_sociability(d.sosd, &pop.stats, config.band_k) == SosdBand::HighBand)
        .count() as f64
        / 10_000.0;
    if (high - TAIL).abs() <= 0.03 {
        Ok(format!("HighBand fraction {high:.4} vs {TAIL:.4}"))
    } else {
        Err(format!("HighBand fraction {high:.4} vs {TAIL:.4}"))
    }
}

fn median_convention() -> Outcome {
    let m = median(&[1.0, 2.0, 3.0, 4.0]).map_err(|e| e.to_string())?;
    if m != 2.5 {
        return Err(format!("median([1,2,3,4]) = {m}"));
    }
    let mut runner = TestRunner::new_with_rng(
        PropConfig {
            failure_persistence: None,
            ..PropConfig::with_cases(256)
        },
        proptest::test_runner::TestRng::deterministic_rng(
            proptest::test_runner::RngAlgorithm::ChaCha,
        ),
    );
    let strategy = prop::collection::vec(-1e6f64..1e6, 1..60).prop_flat_map(|v| {
        let n = v.len();
        (Just(v), Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
    });
    runner
        .run(&strategy, |(values, perm)| {
            let shuffled: Vec<f64> = perm.iter().map(|&i| values[i]).collect();
            prop_assert_eq!(median(&values).unwrap(), median(&shuffled).unwrap());
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("median([1,2,3,4]) = 2.5; permutation invariant over 256 cases".into())
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("determinism", determinism),
        ("kernel oracle equivalence", kernel_oracle),
        ("invariant suite", invariants),
        ("solo-mode isolation", solo_isolation),
        ("scenario experiment", scenario_experiment),
        ("band mass", band_mass),
        ("median convention", median_convention),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
