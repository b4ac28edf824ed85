//! Analytic two-state amplification conditions: the exact distance
//! inequality, the phase/gain envelope, the equality locus, the equal-output
//! corollary, the maximum gain, and parameter sweeps.
//!
//! The exact decision is the distance inequality (the envelope is necessary
//! but not tight off the equality locus; both are exposed and the gap is
//! tested).

use crate::error::{Error, Result};
use crate::fock::CoherentLabel;
use crate::real::{r, Real};
use crate::transform::{Binding, FeasibilityReport, Verdict};

/// A two-state amplification problem: inputs and their per-state gains.
#[derive(Debug, Clone, Copy)]
pub struct AmplifierInstance<T: Real> {
    pub state1: CoherentLabel<T>,
    pub state2: CoherentLabel<T>,
    pub gain1: T,
    pub gain2: T,
}

impl<T: Real> AmplifierInstance<T> {
    pub fn new(
        state1: CoherentLabel<T>,
        state2: CoherentLabel<T>,
        gain1: T,
        gain2: T,
    ) -> Result<Self> {
        if gain1 <= T::zero() {
            return Err(Error::GainOutOfRange(gain1.to_f64()));
        }
        if gain2 <= T::zero() {
            return Err(Error::GainOutOfRange(gain2.to_f64()));
        }
        Ok(Self {
            state1,
            state2,
            gain1,
            gain2,
        })
    }

    /// Relative phase folded into `[0, pi]`.
    pub fn eta(&self) -> T {
        fold_eta(self.state1.phase() - self.state2.phase())
    }

    pub fn outputs(&self) -> (CoherentLabel<T>, CoherentLabel<T>) {
        (self.state1.scaled(self.gain1), self.state2.scaled(self.gain2))
    }
}

/// Folds a phase difference into `[0, pi]`.
pub fn fold_eta<T: Real>(delta: T) -> T {
    let tau = T::two_pi();
    let mut d = delta.abs() % tau;
    if d > T::pi() {
        d = tau - d;
    }
    d
}

/// Exact two-state criterion: the amplified distance may not exceed the
/// input distance. Margin is the signed slack `D_in - D_out`.
pub fn exact_feasible<T: Real>(inst: &AmplifierInstance<T>) -> FeasibilityReport<T> {
    let a1 = inst.state1.amplitude();
    let a2 = inst.state2.amplitude();
    let (g1, g2) = (inst.gain1, inst.gain2);
    let cos_eta = inst.eta().cos();
    let two = r::<T>(2.0);
    let slack = two * a1 * a2 * (g1 * g2 - T::one()) * cos_eta
        - (g1 * g1 - T::one()) * a1 * a1
        - (g2 * g2 - T::one()) * a2 * a2;
    FeasibilityReport {
        verdict: if slack >= T::zero() {
            Verdict::Feasible
        } else {
            Verdict::Infeasible
        },
        margin: slack,
        binding: Binding::AnalyticBoundary,
        witness: None,
        iterations: 0,
    }
}

/// Amplitude-free envelope `cos eta >= sqrt((g1^2-1)(g2^2-1))/(g1 g2 - 1)`.
///
/// Necessary for feasibility at any amplitudes and tight only on the
/// equality locus; use [`exact_feasible`] for decisions at fixed amplitudes.
pub fn theorem1_envelope<T: Real>(eta: T, g1: T, g2: T) -> Result<bool> {
    if g1 < T::one() {
        return Err(Error::GainOutOfRange(g1.to_f64()));
    }
    if g2 < T::one() {
        return Err(Error::GainOutOfRange(g2.to_f64()));
    }
    if g1 == T::one() && g2 == T::one() {
        return Ok(true);
    }
    let rhs = ((g1 * g1 - T::one()) * (g2 * g2 - T::one())).sqrt() / (g1 * g2 - T::one());
    Ok(fold_eta(eta).cos() >= rhs)
}

/// Amplitude ratio `alpha1/alpha2` at which the envelope becomes exact.
pub fn equality_locus<T: Real>(g1: T, g2: T) -> Result<T> {
    if g1 <= T::one() {
        return Err(Error::GainOutOfRange(g1.to_f64()));
    }
    if g2 <= T::one() {
        return Err(Error::GainOutOfRange(g2.to_f64()));
    }
    Ok(((g2 * g2 - T::one()) / (g1 * g1 - T::one())).sqrt())
}

/// Equal-output-amplitude check: `g2` is implied by `g1 a1 = g2 a2`, and the
/// decision delegates to [`exact_feasible`] on the completed instance.
pub fn corollary1_feasible<T: Real>(
    state1: CoherentLabel<T>,
    state2: CoherentLabel<T>,
    g1: T,
) -> Result<(FeasibilityReport<T>, T)> {
    if state2.amplitude().is_zero() {
        return Err(Error::ZeroAmplitude);
    }
    let g2 = g1 * state1.amplitude() / state2.amplitude();
    let inst = AmplifierInstance::new(state1, state2, g1, g2)?;
    Ok((exact_feasible(&inst), g2))
}

/// Maximum equal-output gain, or `Unbounded` for collinear states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaxGain<T: Real> {
    /// Collinear states (`eta = 0`) can be pushed toward a common output
    /// with arbitrarily large gain.
    Unbounded,
    Finite(T),
}

/// Largest `g1` under the equal-output constraint `g1 a1 = g2 a2`.
pub fn max_gain<T: Real>(a1: &CoherentLabel<T>, a2: &CoherentLabel<T>) -> Result<MaxGain<T>> {
    if a1.amplitude() <= T::zero() {
        return Err(Error::ZeroAmplitude);
    }
    let eta = fold_eta(a1.phase() - a2.phase());
    let cos_eta = eta.cos();
    if eta.is_zero() || cos_eta >= T::one() {
        return Ok(MaxGain::Unbounded);
    }
    let x1 = a1.amplitude();
    let x2 = a2.amplitude();
    let two = r::<T>(2.0);
    let num = x1 * x1 + x2 * x2 - two * x1 * x2 * cos_eta;
    let den = two * x1 * x1 * (T::one() - cos_eta);
    Ok(MaxGain::Finite((num / den).sqrt()))
}

/// One axis of a parameter sweep: a closed range with `steps` samples
/// (`steps = 1` pins the axis at `min`).
#[derive(Debug, Clone, Copy)]
pub struct Axis<T: Real> {
    pub min: T,
    pub max: T,
    pub steps: usize,
}

impl<T: Real> Axis<T> {
    pub fn fixed(v: T) -> Self {
        Self {
            min: v,
            max: v,
            steps: 1,
        }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if self.steps < 1 || self.min > self.max {
            return Err(Error::InvalidAxis(format!(
                "{name}: min {} max {} steps {}",
                self.min.to_f64(),
                self.max.to_f64(),
                self.steps
            )));
        }
        Ok(())
    }

    fn value(&self, k: usize) -> T {
        if self.steps == 1 {
            self.min
        } else {
            self.min
                + (self.max - self.min) * r::<T>(k as f64) / r::<T>((self.steps - 1) as f64)
        }
    }
}

/// Axes in emission order: alpha1, alpha2, eta, g1, g2.
#[derive(Debug, Clone, Copy)]
pub struct SweepSpec<T: Real> {
    pub alpha1: Axis<T>,
    pub alpha2: Axis<T>,
    pub eta: Axis<T>,
    pub g1: Axis<T>,
    pub g2: Axis<T>,
}

#[derive(Debug, Clone, Copy)]
pub struct SweepRow<T: Real> {
    pub alpha1: T,
    pub alpha2: T,
    pub eta: T,
    pub g1: T,
    pub g2: T,
    pub feasible: bool,
    pub margin: T,
    /// Equal-output maximum gain; `None` when unbounded or undefined.
    pub g1max: Option<T>,
}

const SWEEP_GUARD: u128 = 100_000_000;

/// Evaluates the exact criterion (and the maximum gain where defined) on the
/// full grid, rows in lexicographic axis order.
pub fn sweep<T: Real>(spec: &SweepSpec<T>) -> Result<Vec<SweepRow<T>>> {
    spec.alpha1.validate("alpha1")?;
    spec.alpha2.validate("alpha2")?;
    spec.eta.validate("eta")?;
    spec.g1.validate("g1")?;
    spec.g2.validate("g2")?;
    let total = [&spec.alpha1, &spec.alpha2, &spec.eta, &spec.g1, &spec.g2]
        .iter()
        .map(|a| a.steps as u128)
        .product::<u128>();
    if total > SWEEP_GUARD {
        return Err(Error::GridTooLarge(total));
    }
    let mut rows = Vec::with_capacity(total as usize);
    for i1 in 0..spec.alpha1.steps {
        let a1 = spec.alpha1.value(i1);
        for i2 in 0..spec.alpha2.steps {
            let a2 = spec.alpha2.value(i2);
            for ie in 0..spec.eta.steps {
                let eta = spec.eta.value(ie);
                let s1 = CoherentLabel::new(a1, T::zero())?;
                let s2 = CoherentLabel::new(a2, eta)?;
                let g1max = if a1 > T::zero() {
                    match max_gain(&s1, &s2)? {
                        MaxGain::Finite(g) => Some(g),
                        MaxGain::Unbounded => None,
                    }
                } else {
                    None
                };
                for ig1 in 0..spec.g1.steps {
                    let g1 = spec.g1.value(ig1);
                    for ig2 in 0..spec.g2.steps {
                        let g2 = spec.g2.value(ig2);
                        let inst = AmplifierInstance::new(s1, s2, g1, g2)?;
                        let report = exact_feasible(&inst);
                        rows.push(SweepRow {
                            alpha1: a1,
                            alpha2: a2,
                            eta,
                            g1,
                            g2,
                            feasible: report.feasible(),
                            margin: report.margin,
                            g1max,
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{distance, gram};
    use crate::transform::pi_deterministic;
    use rand::{Rng, SeedableRng};

    type L = CoherentLabel<f64>;
    const PI: f64 = std::f64::consts::PI;

    fn lbl(a: f64, t: f64) -> L {
        L::new(a, t).unwrap()
    }

    fn inst(a1: f64, a2: f64, eta: f64, g1: f64, g2: f64) -> AmplifierInstance<f64> {
        AmplifierInstance::new(lbl(a1, 0.0), lbl(a2, eta), g1, g2).unwrap()
    }

    #[test]
    fn unit_gains_always_feasible() {
        for eta in [0.0, 0.5, PI] {
            let report = exact_feasible(&inst(1.0, 2.0, eta, 1.0, 1.0));
            assert!(report.feasible());
            assert!(report.margin.abs() < 1e-14);
        }
    }

    #[test]
    fn uniform_gain_above_one_infeasible() {
        let report = exact_feasible(&inst(1.0, 1.0, PI / 6.0, 1.5, 1.5));
        assert!(!report.feasible());
        // LHS = 2*1.25*cos(pi/6) ~ 2.165 < RHS = 2.5
        let expect = 2.0 * 1.25 * (PI / 6.0).cos() - 2.5;
        assert!((report.margin - expect).abs() < 1e-12);
    }

    #[test]
    fn boundary_instance_has_zero_slack() {
        // alpha1=1, alpha2=2, cos eta = 0.5, g1 = sqrt(3), g2 = sqrt(3)/2
        let eta = (0.5f64).acos();
        let report = exact_feasible(&inst(1.0, 2.0, eta, 3.0f64.sqrt(), 3.0f64.sqrt() / 2.0));
        assert!(report.margin.abs() < 1e-10);
    }

    #[test]
    fn margin_is_distance_difference() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let i = inst(
                rng.gen_range(0.1..2.0),
                rng.gen_range(0.1..2.0),
                rng.gen_range(0.0..PI),
                rng.gen_range(0.3..2.0),
                rng.gen_range(0.3..2.0),
            );
            let (o1, o2) = i.outputs();
            let expect = distance(&i.state1, &i.state2) - distance(&o1, &o2);
            assert!((exact_feasible(&i).margin - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn envelope_uniform_gain_needs_zero_eta() {
        assert!(theorem1_envelope(0.0, 1.4, 1.4).unwrap());
        assert!(!theorem1_envelope(1e-3, 1.4, 1.4).unwrap());
    }

    #[test]
    fn envelope_degenerate_gains() {
        assert!(theorem1_envelope(2.0, 1.0, 1.0).unwrap());
    }

    #[test]
    fn envelope_rejects_gain_below_one() {
        assert!(theorem1_envelope(0.2, 0.9, 1.1).is_err());
    }

    #[test]
    fn documented_gap_between_envelope_and_exact() {
        // g1=1.2, g2=1.0: envelope RHS = 0, passes for any eta <= pi/2,
        // yet the exact check fails at alpha1=alpha2=1, cos eta = 0.9.
        let eta = (0.9f64).acos();
        assert!(theorem1_envelope(eta, 1.2, 1.0).unwrap());
        let report = exact_feasible(&inst(1.0, 1.0, eta, 1.2, 1.0));
        assert!(!report.feasible());
        // exact slack: 0.36 - 0.44 < 0
        assert!((report.margin - (0.36 - 0.44)).abs() < 1e-12);
    }

    #[test]
    fn equality_locus_symmetric_gains() {
        assert!((equality_locus(1.5f64, 1.5).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn equality_locus_formula() {
        // g1 = sqrt(5), g2 = sqrt(2) -> sqrt(1/4) = 0.5
        let ratio = equality_locus(5.0f64.sqrt(), 2.0f64.sqrt()).unwrap();
        assert!((ratio - 0.5).abs() < 1e-12);
    }

    #[test]
    fn equality_locus_zero_margin_cross_check() {
        let g1 = 1.7f64;
        let g2 = 1.3f64;
        let ratio = equality_locus(g1, g2).unwrap();
        let rhs = ((g1 * g1 - 1.0) * (g2 * g2 - 1.0)).sqrt() / (g1 * g2 - 1.0);
        let eta = rhs.acos();
        let a2 = 1.0;
        let a1 = ratio * a2;
        let report = exact_feasible(&inst(a1, a2, eta, g1, g2));
        assert!(report.margin.abs() < 1e-10, "margin {}", report.margin);
    }

    #[test]
    fn corollary_equal_amplitudes_only_unit_gain() {
        let (r1, g2) = corollary1_feasible(lbl(1.0, 0.0), lbl(1.0, 0.7), 1.0).unwrap();
        assert!((g2 - 1.0).abs() < 1e-15);
        assert!(r1.feasible());
        let (r2, _) = corollary1_feasible(lbl(1.0, 0.0), lbl(1.0, 0.7), 1.01).unwrap();
        assert!(!r2.feasible());
    }

    #[test]
    fn corollary_boundary_bracketing() {
        let eta = (0.5f64).acos();
        let g = 3.0f64.sqrt();
        let below = corollary1_feasible(lbl(1.0, 0.0), lbl(2.0, eta), g * (1.0 - 1e-6))
            .unwrap()
            .0;
        let above = corollary1_feasible(lbl(1.0, 0.0), lbl(2.0, eta), g * (1.0 + 1e-6))
            .unwrap()
            .0;
        assert!(below.feasible());
        assert!(!above.feasible());
    }

    #[test]
    fn corollary_rejects_zero_second_amplitude() {
        assert!(matches!(
            corollary1_feasible(lbl(1.0, 0.0), lbl(0.0, 0.0), 1.2),
            Err(Error::ZeroAmplitude)
        ));
    }

    #[test]
    fn max_gain_reference_values() {
        let eta = (0.5f64).acos();
        match max_gain(&lbl(1.0, 0.0), &lbl(2.0, eta)).unwrap() {
            MaxGain::Finite(g) => assert!((g - 3.0f64.sqrt()).abs() < 1e-12),
            MaxGain::Unbounded => panic!("expected finite"),
        }
        match max_gain(&lbl(1.0, 0.0), &lbl(1.0, 0.4)).unwrap() {
            MaxGain::Finite(g) => assert!((g - 1.0).abs() < 1e-12),
            MaxGain::Unbounded => panic!("expected finite"),
        }
        match max_gain(&lbl(1.0, 0.0), &lbl(2.0, PI)).unwrap() {
            MaxGain::Finite(g) => assert!((g - 1.5).abs() < 1e-12),
            MaxGain::Unbounded => panic!("expected finite"),
        }
    }

    #[test]
    fn max_gain_collinear_unbounded() {
        assert_eq!(
            max_gain(&lbl(1.0, 0.0), &lbl(2.0, 0.0)).unwrap(),
            MaxGain::Unbounded
        );
    }

    #[test]
    fn exact_agrees_with_gram_check() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let a1 = lbl(rng.gen_range(0.05..3.0), 0.0);
            let a2 = lbl(rng.gen_range(0.05..3.0), rng.gen_range(0.001..PI));
            let g1: f64 = rng.gen_range(0.05..2.5);
            let g2: f64 = rng.gen_range(0.05..2.5);
            let inst = AmplifierInstance::new(a1, a2, g1, g2).unwrap();
            let exact = exact_feasible(&inst);
            if exact.margin.abs() <= 1e-9 {
                continue;
            }
            let g_a = gram(&[a1, a2]);
            let g_b = gram(&[a1.scaled(g1), a2.scaled(g2)]);
            let (_, lemma) = pi_deterministic(&g_a, &g_b).unwrap();
            assert_eq!(exact.feasible(), lemma.feasible(), "margin {}", exact.margin);
        }
    }

    #[test]
    fn sweep_counts_and_sign_change() {
        let spec = SweepSpec {
            alpha1: Axis::fixed(1.0),
            alpha2: Axis::fixed(2.0),
            eta: Axis::fixed((0.5f64).acos()),
            g1: Axis {
                min: 1.0,
                max: 2.5,
                steps: 151,
            },
            g2: Axis::fixed(3.0f64.sqrt() / 2.0),
        };
        let rows = sweep(&spec).unwrap();
        assert_eq!(rows.len(), 151);
        let flips = rows
            .windows(2)
            .filter(|w| w[0].margin.signum() != w[1].margin.signum())
            .count();
        assert_eq!(flips, 1);
    }

    #[test]
    fn sweep_single_point_matches_exact() {
        let spec = SweepSpec {
            alpha1: Axis::fixed(1.0),
            alpha2: Axis::fixed(1.0),
            eta: Axis::fixed(PI / 6.0),
            g1: Axis::fixed(1.5),
            g2: Axis::fixed(1.5),
        };
        let rows = sweep(&spec).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(!rows[0].feasible);
    }

    #[test]
    fn sweep_guard_rejects_huge_grids() {
        let big = Axis {
            min: 0.0,
            max: 1.0,
            steps: 100_000,
        };
        let spec = SweepSpec {
            alpha1: big,
            alpha2: big,
            eta: Axis::fixed(1.0),
            g1: Axis::fixed(1.0),
            g2: Axis::fixed(1.0),
        };
        assert!(matches!(sweep(&spec), Err(Error::GridTooLarge(_))));
    }
}
