//! Shared helpers for the integration suites: seeded samplers, an
//! independent grid oracle for the two-state probabilistic decision, and a
//! scripted runner for the compiled binary.

#![allow(dead_code)]

use std::process::{Command, Output};

use num_complex::Complex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use coherent_amp::CoherentLabel64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_label(rng: &mut ChaCha8Rng, max_amplitude: f64) -> CoherentLabel64 {
    let amplitude = rng.gen_range(1e-3..=max_amplitude);
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    CoherentLabel64::new(amplitude, phase).expect("sampled label is valid")
}

/// Exhaustive two-state oracle: scans the witness off-diagonal entry `z`
/// over an even grid on the square enclosing its admissible disc and reports
/// the best joint slack.  Positive means some grid point certifies
/// feasibility; the decision is `margin >= 0`.
///
/// For probabilities `p1, p2` the two positivity constraints reduce to
/// `|z|^2 <= p1 p2` and `|gA - z gB|^2 <= (1 - p1)(1 - p2)`, so the grid
/// slack is the pointwise minimum of those two quadratic slacks.
pub fn grid_oracle_margin(
    g_a12: Complex<f64>,
    g_b12: Complex<f64>,
    p1: f64,
    p2: f64,
    resolution: usize,
) -> f64 {
    let radius = (p1 * p2).sqrt();
    let disc_budget = p1 * p2;
    let residual_budget = (1.0 - p1) * (1.0 - p2);
    let mut best = f64::NEG_INFINITY;
    for i in 0..resolution {
        let re = -radius + 2.0 * radius * i as f64 / (resolution - 1) as f64;
        for j in 0..resolution {
            let im = -radius + 2.0 * radius * j as f64 / (resolution - 1) as f64;
            let z = Complex::new(re, im);
            let slack_disc = disc_budget - z.norm_sqr();
            let slack_residual = residual_budget - (g_a12 - z * g_b12).norm_sqr();
            best = best.max(slack_disc.min(slack_residual));
        }
    }
    best
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_coherent-amp")
}

pub fn run_cli(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary executes")
}

/// One scripted invocation: arguments plus the expected exit code.
pub struct Scenario {
    pub name: &'static str,
    pub args: Vec<String>,
    pub expected_exit: i32,
}

fn s(name: &'static str, args: &[&str], expected_exit: i32) -> Scenario {
    Scenario {
        name,
        args: args.iter().map(|a| a.to_string()).collect(),
        expected_exit,
    }
}

/// The scripted scenario suite: every subcommand and every exit code.
pub fn scenario_suite() -> Vec<Scenario> {
    const PI: &str = "3.141592653589793";
    vec![
        s(
            "feasible-deamplify-ok",
            &["feasible", "--alpha1", "1", "--alpha2", "1", "--eta", PI, "--g1", "0.6", "--g2", "0.6"],
            0,
        ),
        s(
            "feasible-amplify-rejected",
            &["feasible", "--alpha1", "1", "--alpha2", "1", "--eta", PI, "--g1", "1.5", "--g2", "1.5"],
            1,
        ),
        s(
            "feasible-json",
            &["feasible", "--alpha1", "1", "--alpha2", "2", "--eta", "1.0472", "--g1", "1.7", "--g2", "0.85", "--format", "json"],
            0,
        ),
        s(
            "feasible-missing-flag",
            &["feasible", "--alpha1", "1", "--alpha2", "2", "--eta", "1.0", "--g2", "0.85"],
            2,
        ),
        s("envelope-pass", &["envelope", "--eta", "1.0", "--g1", "1.05", "--g2", "1.0"], 0),
        s("envelope-fail", &["envelope", "--eta", "2.0", "--g1", "1.2", "--g2", "1.1"], 1),
        s("envelope-bad-number", &["envelope", "--eta", "abc", "--g1", "1.2", "--g2", "1.1"], 2),
        s("max-gain-finite", &["max-gain", "--alpha1", "1", "--alpha2", "2", "--eta", "1.0471975511965976"], 0),
        s("max-gain-unbounded-json", &["max-gain", "--alpha1", "1", "--alpha2", "2", "--eta", "0", "--format", "json"], 0),
        s("pi-feasible", &["pi", "--alpha1", "1", "--alpha2", "1", "--eta", PI, "--g1", "0.6", "--g2", "0.6"], 0),
        s(
            "pi-infeasible-json",
            &["pi", "--alpha1", "1", "--alpha2", "1", "--eta", PI, "--g1", "1.5", "--g2", "1.5", "--format", "json"],
            1,
        ),
        s(
            "dykstra-feasible",
            &["dykstra", "--alpha1", "1", "--alpha2", "1", "--eta", PI, "--g1", "2", "--g2", "2", "--p", "0.8"],
            0,
        ),
        s(
            "dykstra-infeasible",
            &["dykstra", "--alpha1", "1", "--alpha2", "1", "--eta", PI, "--g1", "2", "--g2", "2", "--p", "0.9"],
            1,
        ),
        s(
            "dykstra-budget-exhausted",
            &["dykstra", "--alpha1", "1", "--alpha2", "1", "--eta", PI, "--g1", "2", "--g2", "2", "--p", "0.9", "--max-iters", "3"],
            3,
        ),
        s(
            "kraus-bundle",
            &["kraus", "--alpha1", "1", "--alpha2", "1", "--eta", PI, "--g1", "0.5", "--g2", "0.5"],
            0,
        ),
        s(
            "kraus-rejects-csv",
            &["kraus", "--alpha1", "1", "--alpha2", "1", "--eta", PI, "--g1", "0.5", "--g2", "0.5", "--format", "csv"],
            2,
        ),
        s(
            "kraus-infeasible",
            &["kraus", "--alpha1", "1", "--alpha2", "1", "--eta", PI, "--g1", "2", "--g2", "2"],
            1,
        ),
        s(
            "verify-residuals",
            &["verify", "--alpha1", "1", "--alpha2", "1", "--eta", PI, "--g1", "0.5", "--g2", "0.5"],
            0,
        ),
        s("wigner-csv", &["wigner", "--alpha1", "1", "--resolution", "5"], 0),
        s(
            "wigner-json",
            &["wigner", "--alpha1", "0.5", "--theta", "1.2", "--resolution", "3", "--format", "json"],
            0,
        ),
        s("wigner-bad-window", &["wigner", "--alpha1", "1", "--window", "0:1:2"], 2),
        s(
            "channel-trajectory",
            &["channel", "--alpha1", "1", "--alpha2", "1", "--eta", PI, "--g1", "0.5", "--g2", "0.5", "--gamma", "1", "--time", "1", "--steps", "5"],
            0,
        ),
        s("detector-csv", &["detector", "--alpha1", "0", "--alpha2", "1", "--dark", "0.01", "--eff", "0.9"], 0),
        s(
            "detector-json",
            &["detector", "--alpha1", "0.3", "--alpha2", "1.4", "--prior", "0.3", "--format", "json"],
            0,
        ),
        s(
            "sweep-grid",
            &["sweep", "--grid", "g1:1.0:1.4:3", "--alpha1", "1", "--alpha2", "1", "--eta", "2.0", "--g2", "1.0"],
            0,
        ),
        s(
            "sweep-bad-axis",
            &["sweep", "--grid", "bogus:0:1:3", "--alpha1", "1", "--alpha2", "1", "--eta", "2.0", "--g1", "1.0", "--g2", "1.0"],
            2,
        ),
        s("unknown-flag", &["feasible", "--bogus", "1"], 2),
        s(
            "unwritable-output",
            &["feasible", "--alpha1", "1", "--alpha2", "1", "--eta", PI, "--g1", "0.6", "--g2", "0.6", "--output", "/nonexistent-dir/out.csv"],
            4,
        ),
        s(
            "eta-folded-with-warning",
            &["feasible", "--alpha1", "1", "--alpha2", "1", "--eta", "7.0", "--g1", "0.6", "--g2", "0.6"],
            0,
        ),
    ]
}
