//! Truncated Fock-space carriers for coherent states.
//!
//! Everything downstream (reciprocal states, Kraus operators, completeness
//! checks) is verified numerically in this basis, so the truncation rule and
//! the coefficient recurrence live here.

use nalgebra::DVector;
use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::real::{r, Real};

/// A pure coherent state, parameterized as amplitude and phase.
///
/// The phase is stored normalized to `[0, 2pi)`; the vacuum compares equal
/// regardless of phase.
#[derive(Debug, Clone, Copy)]
pub struct CoherentLabel<T: Real> {
    amplitude: T,
    phase: T,
}

impl<T: Real> CoherentLabel<T> {
    pub fn new(amplitude: T, phase: T) -> Result<Self> {
        if amplitude < T::zero() {
            return Err(Error::NegativeAmplitude(amplitude.to_f64()));
        }
        Ok(Self {
            amplitude,
            phase: normalize_phase(phase),
        })
    }

    /// Convenience constructor with zero phase.
    pub fn real(amplitude: T) -> Result<Self> {
        Self::new(amplitude, T::zero())
    }

    pub fn from_complex(z: Complex<T>) -> Self {
        let amplitude = crate::real::cabs(z);
        let phase = if amplitude.is_zero() {
            T::zero()
        } else {
            normalize_phase(z.im.atan2(z.re))
        };
        Self { amplitude, phase }
    }

    pub fn amplitude(&self) -> T {
        self.amplitude
    }

    pub fn phase(&self) -> T {
        self.phase
    }

    /// The complex value `amplitude * e^{i phase}`.
    pub fn complex(&self) -> Complex<T> {
        Complex::new(
            self.amplitude * self.phase.cos(),
            self.amplitude * self.phase.sin(),
        )
    }

    /// Same phase, amplitude scaled by `gain`.
    pub fn scaled(&self, gain: T) -> Self {
        Self {
            amplitude: self.amplitude * gain,
            phase: self.phase,
        }
    }
}

impl<T: Real> PartialEq for CoherentLabel<T> {
    fn eq(&self, other: &Self) -> bool {
        if self.amplitude.is_zero() && other.amplitude.is_zero() {
            return true;
        }
        self.amplitude == other.amplitude && self.phase == other.phase
    }
}

fn normalize_phase<T: Real>(phase: T) -> T {
    let tau = T::two_pi();
    let mut p = phase % tau;
    if p < T::zero() {
        p += tau;
    }
    // The remainder can land exactly on tau for tiny negative inputs.
    if p >= tau {
        p -= tau;
    }
    p
}

/// How far out in photon number to carry the basis.
#[derive(Debug, Clone, Copy)]
pub struct TruncationConfig<T: Real> {
    pub tail_epsilon: T,
    pub max_dim: usize,
    pub explicit_dim: Option<usize>,
}

impl<T: Real> Default for TruncationConfig<T> {
    fn default() -> Self {
        Self {
            tail_epsilon: r(1e-12),
            max_dim: 4096,
            explicit_dim: None,
        }
    }
}

impl<T: Real> TruncationConfig<T> {
    pub fn with_epsilon(tail_epsilon: T) -> Self {
        Self {
            tail_epsilon,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tail_epsilon > T::zero() && self.tail_epsilon < T::one()) {
            return Err(Error::InvalidConfig(format!(
                "tail_epsilon {} outside (0,1)",
                self.tail_epsilon.to_f64()
            )));
        }
        if self.max_dim == 0 {
            return Err(Error::InvalidConfig("max_dim must be positive".into()));
        }
        if let Some(d) = self.explicit_dim {
            if d == 0 {
                return Err(Error::InvalidConfig("explicit_dim must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Dense state vector in the truncated photon-number basis.
#[derive(Debug, Clone)]
pub struct FockVector<T: Real> {
    coefficients: DVector<Complex<T>>,
}

impl<T: Real> FockVector<T> {
    pub fn from_vector(coefficients: DVector<Complex<T>>) -> Self {
        Self { coefficients }
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &DVector<Complex<T>> {
        &self.coefficients
    }

    pub fn norm(&self) -> T {
        self.coefficients.norm()
    }
}

/// Smallest photon number `N` such that the Poisson(alpha^2) mass beyond `N`
/// is below `epsilon`.
pub fn photon_cutoff<T: Real>(label: &CoherentLabel<T>, epsilon: T, cap: usize) -> Result<usize> {
    let lambda = label.amplitude() * label.amplitude();
    let mut term = (-lambda).exp();
    if term.is_zero() && !lambda.is_zero() {
        return Err(Error::AmplitudeOverflow(label.amplitude().to_f64()));
    }
    let target = T::one() - epsilon;
    let mut cumulative = term;
    let mut n = 0usize;
    while cumulative < target {
        if n >= cap {
            return Err(Error::DimensionOverflow {
                amplitude: label.amplitude().to_f64(),
                max_dim: cap,
            });
        }
        n += 1;
        term = term * lambda / r(n as f64);
        cumulative += term;
    }
    Ok(n)
}

/// Basis size (cutoff + 1) covering every label's photon-number tail.
pub fn truncation_dim<T: Real>(
    labels: &[CoherentLabel<T>],
    config: &TruncationConfig<T>,
) -> Result<usize> {
    config.validate()?;
    if labels.is_empty() {
        return Err(Error::InvalidConfig("label list is empty".into()));
    }
    if let Some(d) = config.explicit_dim {
        if d > config.max_dim {
            return Err(Error::DimensionOverflow {
                amplitude: f64::NAN,
                max_dim: config.max_dim,
            });
        }
        return Ok(d);
    }
    let mut dim = 1usize;
    for label in labels {
        let cutoff = photon_cutoff(label, config.tail_epsilon, config.max_dim)?;
        dim = dim.max(cutoff + 1);
    }
    if dim > config.max_dim {
        let worst = labels
            .iter()
            .map(|l| l.amplitude())
            .fold(T::zero(), |a, b| a.max(b));
        return Err(Error::DimensionOverflow {
            amplitude: worst.to_f64(),
            max_dim: config.max_dim,
        });
    }
    Ok(dim)
}

/// Coherent-state coefficients `c_n = e^{-a^2/2} (a e^{i t})^n / sqrt(n!)`
/// built by the multiplicative recurrence.
pub fn coherent_vector<T: Real>(label: &CoherentLabel<T>, dim: usize) -> Result<FockVector<T>> {
    if dim == 0 {
        return Err(Error::InvalidConfig("dimension must be positive".into()));
    }
    let z = label.complex();
    let c0 = (-(label.amplitude() * label.amplitude()) / r(2.0)).exp();
    if c0.is_zero() && !label.amplitude().is_zero() {
        return Err(Error::AmplitudeOverflow(label.amplitude().to_f64()));
    }
    let mut coeffs = DVector::from_element(dim, Complex::<T>::zero());
    let mut c = Complex::new(c0, T::zero());
    coeffs[0] = c;
    for n in 1..dim {
        c *= z.unscale(r::<T>(n as f64).sqrt());
        coeffs[n] = c;
    }
    Ok(FockVector::from_vector(coeffs))
}

/// `<u|v>`, conjugate-linear in the first argument.
pub fn inner_product<T: Real>(u: &FockVector<T>, v: &FockVector<T>) -> Result<Complex<T>> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch(u.dim(), v.dim()));
    }
    Ok(u.coefficients().dotc(v.coefficients()))
}
