//! Acceptance gate: one test per criterion, each printing a PASS line on
//! success (run with `--nocapture` to see all lines; a failing criterion
//! reports itself in the panic message).

mod common;

use nalgebra::DVector;
use rand::Rng;

use coherent_amp::amplifier::{
    corollary1_feasible, exact_feasible, max_gain, theorem1_envelope, AmplifierInstance, MaxGain,
};
use coherent_amp::channel::{distance_trajectory, LossChannel};
use coherent_amp::fock::{truncation_dim, TruncationConfig};
use coherent_amp::geometry::{self, distance, gram, overlap, wigner_grid};
use coherent_amp::kraus::{
    build_kraus, complete_to_identity, completeness_residual, verify_action,
};
use coherent_amp::transform::{
    default_clip, dykstra_feasibility, factor_coefficients, max_uniform_success,
    pi_deterministic, Verdict,
};
use coherent_amp::CoherentLabel64;

use common::{grid_oracle_margin, random_label, rng, run_cli, scenario_suite};

fn lbl(amplitude: f64, phase: f64) -> CoherentLabel64 {
    CoherentLabel64::new(amplitude, phase).unwrap()
}

fn random_instance(
    rng: &mut rand_chacha::ChaCha8Rng,
    max_alpha: f64,
    g_lo: f64,
    g_hi: f64,
) -> AmplifierInstance<f64> {
    let a1 = rng.gen_range(1e-3..=max_alpha);
    let a2 = rng.gen_range(1e-3..=max_alpha);
    let eta = rng.gen_range(1e-6..=std::f64::consts::PI);
    let g1 = rng.gen_range(g_lo..=g_hi);
    let g2 = rng.gen_range(g_lo..=g_hi);
    AmplifierInstance::new(lbl(a1, 0.0), lbl(a2, eta), g1, g2).unwrap()
}

#[test]
fn criterion_01_overlap_distance_identity() {
    let mut r = rng(101);
    for _ in 0..1000 {
        let a = random_label(&mut r, 3.0);
        let b = random_label(&mut r, 3.0);
        let lhs = overlap(&a, &b).norm_sqr();
        let rhs = (-distance(&a, &b)).exp();
        assert!(
            (lhs - rhs).abs() < 1e-12,
            "criterion 1: FAIL at {a:?}, {b:?}: |overlap|^2 = {lhs}, exp(-distance) = {rhs}"
        );
    }
    println!("criterion 1 (overlap/distance identity, 1000 pairs): PASS");
}

#[test]
fn criterion_02_exact_matches_deterministic_witness() {
    let mut r = rng(202);
    let mut checked = 0usize;
    for _ in 0..10_000 {
        let inst = random_instance(&mut r, 3.0, 1e-3, 2.5);
        let exact = exact_feasible(&inst);
        if exact.margin.abs() <= 1e-9 {
            continue;
        }
        let (out1, out2) = inst.outputs();
        let g_a = gram(&[inst.state1, inst.state2]);
        let g_b = gram(&[out1, out2]);
        let (_, witness) = pi_deterministic(&g_a, &g_b).unwrap();
        assert_eq!(
            exact.feasible(),
            witness.feasible(),
            "criterion 2: FAIL, exact and witness verdicts disagree at {inst:?} (margin {})",
            exact.margin
        );
        checked += 1;
    }
    assert!(checked > 9_000, "criterion 2: too few decisive samples");
    println!("criterion 2 (exact vs deterministic witness, {checked} decisive of 10000): PASS");
}

#[test]
fn criterion_03_envelope_is_necessary_but_not_sufficient() {
    let mut r = rng(303);
    let mut gap_seen = false;
    for _ in 0..10_000 {
        let inst = random_instance(&mut r, 3.0, 1.0, 2.5);
        let envelope = theorem1_envelope(inst.eta(), inst.gain1, inst.gain2).unwrap();
        let exact = exact_feasible(&inst);
        if exact.feasible() {
            assert!(
                envelope,
                "criterion 3: FAIL, exact-feasible instance violates the envelope: {inst:?}"
            );
        }
        if envelope && !exact.feasible() {
            gap_seen = true;
        }
    }
    assert!(
        gap_seen,
        "criterion 3: FAIL, no sampled instance exhibits the envelope gap"
    );
    // pinned gap witness: cos(eta) = 0.9, exact slack 0.36 - 0.44 < 0
    let eta = 0.9f64.acos();
    assert!(theorem1_envelope(eta, 1.2, 1.0).unwrap());
    let witness = exact_feasible(
        &AmplifierInstance::new(lbl(1.0, 0.0), lbl(1.0, eta), 1.2, 1.0).unwrap(),
    );
    assert!(!witness.feasible());
    assert!(
        (witness.margin - (0.36 - 0.44)).abs() < 1e-12,
        "criterion 3: FAIL, gap witness slack {} != 0.36 - 0.44",
        witness.margin
    );
    println!("criterion 3 (envelope necessity and documented gap): PASS");
}

#[test]
fn criterion_04_equal_output_boundary() {
    let mut r = rng(404);
    for _ in 0..100 {
        let a1 = lbl(r.gen_range(0.1..=2.0), 0.0);
        let a2 = lbl(
            r.gen_range(0.1..=2.0),
            r.gen_range(0.011..=std::f64::consts::PI),
        );
        let g1max = match max_gain(&a1, &a2).unwrap() {
            MaxGain::Finite(g) => g,
            MaxGain::Unbounded => panic!("criterion 4: unbounded gain at eta > 0.01"),
        };
        let (below, _) = corollary1_feasible(a1, a2, g1max * (1.0 - 1e-6)).unwrap();
        let (above, _) = corollary1_feasible(a1, a2, g1max * (1.0 + 1e-6)).unwrap();
        assert!(
            below.feasible() && !above.feasible(),
            "criterion 4: FAIL, no flip around g1max = {g1max} for {a1:?}, {a2:?}"
        );
    }
    // pinned case: alpha1 = 1, alpha2 = 2, cos(eta) = 1/2
    let a1 = lbl(1.0, 0.0);
    let a2 = lbl(2.0, 0.5f64.acos());
    let g1max = match max_gain(&a1, &a2).unwrap() {
        MaxGain::Finite(g) => g,
        MaxGain::Unbounded => panic!("criterion 4: pinned case must be bounded"),
    };
    assert!(
        (g1max - 3.0f64.sqrt()).abs() < 1e-12,
        "criterion 4: FAIL, g1max = {g1max} != sqrt(3)"
    );
    let boundary = exact_feasible(
        &AmplifierInstance::new(a1, a2, 3.0f64.sqrt(), 3.0f64.sqrt() / 2.0).unwrap(),
    );
    assert!(
        boundary.margin.abs() < 1e-12,
        "criterion 4: FAIL, boundary slack {} != 0",
        boundary.margin
    );
    println!("criterion 4 (equal-output gain boundary, 100 flips + pinned sqrt(3)): PASS");
}

#[test]
fn criterion_05_kraus_pipeline_residuals() {
    let mut r = rng(505);
    let config = TruncationConfig::with_epsilon(1e-12);
    let mut built = 0usize;
    let mut attempts = 0usize;
    while built < 100 {
        attempts += 1;
        assert!(attempts < 20_000, "criterion 5: sampling exhausted");
        let inst = random_instance(&mut r, 1.2, 0.3, 1.3);
        let exact = exact_feasible(&inst);
        if !exact.feasible() || exact.margin < 1e-6 {
            continue;
        }
        let (out1, out2) = inst.outputs();
        let g_a = gram(&[inst.state1, inst.state2]);
        let g_b = gram(&[out1, out2]);
        let (pi, _) = pi_deterministic(&g_a, &g_b).unwrap();
        let coeffs = factor_coefficients(&pi, default_clip(&pi)).unwrap();
        let all = [inst.state1, inst.state2, out1, out2];
        let dim = truncation_dim(&all, &config).unwrap();
        let ks = build_kraus(&[inst.state1, inst.state2], &[out1, out2], &coeffs, dim).unwrap();
        let report = verify_action(&ks).unwrap();
        assert!(
            report.max_action_residual() < 1e-7,
            "criterion 5: FAIL, action residual {} at {inst:?}",
            report.max_action_residual()
        );
        assert!(
            report.max_eq14_residual() < 1e-8,
            "criterion 5: FAIL, biorthogonality residual {} at {inst:?}",
            report.max_eq14_residual()
        );
        assert!(
            report.completeness_residual < 1e-8,
            "criterion 5: FAIL, span completeness residual {} at {inst:?}",
            report.completeness_residual
        );
        let completed = complete_to_identity(&ks).unwrap();
        let full = completeness_residual(&completed);
        assert!(
            full < 1e-8,
            "criterion 5: FAIL, full completeness residual {full} at {inst:?}"
        );
        built += 1;
    }
    println!("criterion 5 (Kraus pipeline residuals on 100 feasible instances): PASS");
}

#[test]
fn criterion_06_probabilistic_search_vs_grid_oracle() {
    let mut r = rng(606);
    let mut decisive = 0usize;
    for k in 0..200 {
        let inst = random_instance(&mut r, 1.5, 0.5, 2.0);
        let p1 = r.gen_range(0.05..=0.95);
        let p2 = r.gen_range(0.05..=0.95);
        let (out1, out2) = inst.outputs();
        let g_a = gram(&[inst.state1, inst.state2]);
        let g_b = gram(&[out1, out2]);
        let oracle = grid_oracle_margin(
            g_a.entries()[(0, 1)],
            g_b.entries()[(0, 1)],
            p1,
            p2,
            400,
        );
        if oracle.abs() <= 1e-6 {
            continue;
        }
        let p = DVector::from_vec(vec![p1, p2]);
        let report = dykstra_feasibility(&g_a, &g_b, &p, 20_000, 1e-9).unwrap();
        let agree = match report.verdict {
            Verdict::Feasible => oracle >= 0.0,
            Verdict::Infeasible => oracle < 0.0,
            Verdict::Inconclusive => false,
        };
        assert!(
            agree,
            "criterion 6: FAIL, instance {k}: search says {:?}, oracle margin {oracle}",
            report.verdict
        );
        decisive += 1;
    }
    assert!(decisive >= 190, "criterion 6: too few decisive instances");

    // pinned uniform maximum: {1, -1} -> {2, -2}
    let g_a = gram(&[lbl(1.0, 0.0), lbl(1.0, std::f64::consts::PI)]);
    let g_b = gram(&[lbl(2.0, 0.0), lbl(2.0, std::f64::consts::PI)]);
    let p_star = max_uniform_success(&g_a, &g_b, 1e-6).unwrap();
    let expected = (1.0 - (-2.0f64).exp()) / (1.0 - (-8.0f64).exp());
    assert!(
        (p_star - expected).abs() < 1e-4,
        "criterion 6: FAIL, p* = {p_star}, expected {expected}"
    );
    println!("criterion 6 (grid oracle agreement, {decisive} decisive; p* within 1e-4): PASS");
}

#[test]
fn criterion_07_distinguishability_never_increases() {
    let mut r = rng(707);
    let mut feasible_seen = 0usize;
    for _ in 0..10_000 {
        let inst = random_instance(&mut r, 3.0, 1e-3, 2.5);
        let exact = exact_feasible(&inst);
        if !exact.feasible() {
            continue;
        }
        feasible_seen += 1;
        let (out1, out2) = inst.outputs();
        let d_in = distance(&inst.state1, &inst.state2);
        let d_out = distance(&out1, &out2);
        assert!(
            d_out <= d_in + 1e-12,
            "criterion 7: FAIL, output distance {d_out} exceeds input {d_in} at {inst:?}"
        );
        let g_a = gram(&[inst.state1, inst.state2]);
        let g_b = gram(&[out1, out2]);
        for i in 0..2 {
            for j in 0..2 {
                let a_ij = g_a.entries()[(i, j)].norm();
                let b_ij = g_b.entries()[(i, j)].norm();
                assert!(
                    a_ij <= b_ij + 1e-12,
                    "criterion 7: FAIL, |G_A| = {a_ij} > |G_B| = {b_ij} at {inst:?}"
                );
            }
        }
    }
    assert!(feasible_seen > 100, "criterion 7: too few feasible samples");
    println!("criterion 7 (distinguishability non-increase on {feasible_seen} feasible): PASS");
}

#[test]
fn criterion_08_loss_channel_closed_forms() {
    let a = lbl(1.3, 0.0);
    let b = lbl(0.4, 2.0);
    let ch = LossChannel::new(0.8).unwrap();
    let d0 = distance(&a, &b);
    let times: Vec<f64> = (0..50).map(|k| 3.0 * k as f64 / 49.0).collect();
    let reports = distance_trajectory(&a, &b, &ch, &times).unwrap();
    for rep in &reports {
        let expected = (-0.8 * rep.time).exp() * d0;
        assert!(
            (rep.distance - expected).abs() < 1e-12,
            "criterion 8: FAIL, distance {} != {expected} at t = {}",
            rep.distance,
            rep.time
        );
        assert!(rep.rate <= 0.0, "criterion 8: FAIL, positive decay rate");
        let scale = rep.analytic_rate.abs().max(1e-30);
        assert!(
            (rep.fd_rate - rep.analytic_rate).abs() < 1e-6 * scale,
            "criterion 8: FAIL, finite-difference rate {} vs analytic {} at t = {}",
            rep.fd_rate,
            rep.analytic_rate,
            rep.time
        );
        assert!(
            (rep.analytic_rate + 0.8 * rep.distance).abs() < 1e-12,
            "criterion 8: FAIL, rate does not match -gamma D(t)"
        );
    }
    println!("criterion 8 (loss-channel closed forms on 50-point grid): PASS");
}

#[test]
fn criterion_09_wigner_normalization() {
    let label = lbl(1.3, 0.7);
    let window = geometry::WignerGrid::default_window(&label);
    let grid = wigner_grid(&label, window, 201).unwrap();
    let integral = grid.integral();
    assert!(
        (integral - 1.0).abs() < 1e-6,
        "criterion 9: FAIL, integral {integral}"
    );
    let peak = grid
        .values
        .iter()
        .fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let expected = 1.0 / std::f64::consts::PI;
    assert!(
        (peak - expected).abs() < 1e-9,
        "criterion 9: FAIL, peak {peak} != 1/pi"
    );
    println!("criterion 9 (Wigner normalization and peak): PASS");
}

#[test]
fn criterion_10_cli_byte_determinism() {
    let scenarios = scenario_suite();
    assert!(scenarios.len() >= 20);
    let mut exit_codes_seen = std::collections::BTreeSet::new();
    let mut subcommands_seen = std::collections::BTreeSet::new();
    for sc in &scenarios {
        let args: Vec<&str> = sc.args.iter().map(String::as_str).collect();
        let first = run_cli(&args);
        let second = run_cli(&args);
        let code = first.status.code().unwrap();
        assert_eq!(
            code, sc.expected_exit,
            "criterion 10: FAIL, scenario {} exited {code}, expected {} (stderr: {})",
            sc.name,
            sc.expected_exit,
            String::from_utf8_lossy(&first.stderr)
        );
        assert_eq!(
            second.status.code().unwrap(),
            code,
            "criterion 10: FAIL, scenario {} exit code changed between runs",
            sc.name
        );
        assert_eq!(
            first.stdout, second.stdout,
            "criterion 10: FAIL, scenario {} stdout differs between runs",
            sc.name
        );
        exit_codes_seen.insert(code);
        subcommands_seen.insert(sc.args[0].clone());
    }
    for code in [0, 1, 2, 3, 4] {
        assert!(
            exit_codes_seen.contains(&code),
            "criterion 10: FAIL, exit code {code} never exercised"
        );
    }
    for sub in [
        "feasible", "envelope", "max-gain", "pi", "dykstra", "kraus", "verify", "wigner",
        "channel", "detector", "sweep",
    ] {
        assert!(
            subcommands_seen.contains(sub),
            "criterion 10: FAIL, subcommand {sub} never exercised"
        );
    }
    println!(
        "criterion 10 (CLI determinism, {} scenarios, all subcommands and exit codes): PASS",
        scenarios.len()
    );
}
