//! Explicit Kraus operators for coherent-state set transformations in the
//! truncated Fock basis, with numerical verification of their action and
//! completeness.
//!
//! The success operators are `A_k = sum_i (c_ki / gamma_i) |phi_i><dual_i|`
//! built from reciprocal (biorthogonal) states of the input set. The
//! operator is invariant to the dual scaling convention because it divides
//! by `gamma_i = <dual_i|psi_i>`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fock::{coherent_vector, CoherentLabel, FockVector};
use crate::real::{cabs, r, Real};
use crate::transform::CoefficientMatrix;

const CONDITION_LIMIT: f64 = 1e12;

/// Biorthogonal partners of a linearly independent state set.
#[derive(Debug, Clone)]
pub struct DualBasis<T: Real> {
    pub duals: Vec<FockVector<T>>,
    /// `gamma_i = <dual_i|psi_i>`, all nonzero.
    pub normalizers: Vec<Complex<T>>,
}

/// Success Kraus operators plus the data needed to re-verify them.
#[derive(Debug, Clone)]
pub struct KrausSet<T: Real> {
    pub operators: Vec<DMatrix<Complex<T>>>,
    pub set_a: Vec<CoherentLabel<T>>,
    pub set_b: Vec<CoherentLabel<T>>,
    pub coeffs: CoefficientMatrix<T>,
    pub dim: usize,
}

/// Residuals from re-checking a Kraus set against its defining relations.
#[derive(Debug, Clone)]
pub struct VerificationReport<T: Real> {
    /// `||A_k psi_i - c_ki phi_i||` for every operator/state pair.
    pub action_residuals: DMatrix<T>,
    /// `||P (sum A^dag A) P - P||_max` on the input span.
    pub completeness_residual: T,
    /// Biorthogonality residuals `|<dual_s|psi_t> - gamma_s delta_st|`.
    pub eq14_residuals: DMatrix<T>,
}

impl<T: Real> VerificationReport<T> {
    pub fn max_action_residual(&self) -> T {
        self.action_residuals
            .iter()
            .fold(T::zero(), |a, &b| a.max(b))
    }

    pub fn max_eq14_residual(&self) -> T {
        self.eq14_residuals.iter().fold(T::zero(), |a, &b| a.max(b))
    }
}

fn state_matrix<T: Real>(labels: &[CoherentLabel<T>], dim: usize) -> Result<DMatrix<Complex<T>>> {
    let mut m = DMatrix::from_element(dim, labels.len(), Complex::<T>::zero());
    for (j, label) in labels.iter().enumerate() {
        let v = coherent_vector(label, dim)?;
        m.set_column(j, v.coefficients());
    }
    Ok(m)
}

fn numeric_gram<T: Real>(states: &DMatrix<Complex<T>>) -> DMatrix<Complex<T>> {
    states.adjoint() * states
}

fn check_conditioning<T: Real>(gram: &DMatrix<Complex<T>>) -> Result<()> {
    let evs = crate::geometry::hermitian_eigenvalues(gram);
    let min = evs[0];
    let max = evs[evs.len() - 1];
    if min <= T::zero() {
        return Err(Error::IllConditioned {
            cond: f64::INFINITY,
            limit: CONDITION_LIMIT,
        });
    }
    let cond = (max / min).to_f64();
    if cond > CONDITION_LIMIT {
        return Err(Error::IllConditioned {
            cond,
            limit: CONDITION_LIMIT,
        });
    }
    Ok(())
}

/// Reciprocal states of `set_a` in a `dim`-dimensional truncated basis.
///
/// For two states the construction follows the closed form
/// `dual_1 = psi_1 / <psi_2|psi_1> - psi_2` (and symmetrically); for general
/// `N` the duals come from Gram-inverse linear combinations.
pub fn reciprocal_states<T: Real>(
    set_a: &[CoherentLabel<T>],
    dim: usize,
) -> Result<DualBasis<T>> {
    let n = set_a.len();
    if n == 0 {
        return Err(Error::InvalidConfig("empty state set".into()));
    }
    let states = state_matrix(set_a, dim)?;
    let gram = numeric_gram(&states);
    check_conditioning(&gram)?;

    let mut duals = Vec::with_capacity(n);
    if n == 1 {
        duals.push(FockVector::from_vector(states.column(0).into_owned()));
    } else if n == 2 {
        // <psi_2|psi_1> and <psi_1|psi_2> from the truncated vectors
        let o21 = gram[(1, 0)];
        let o12 = gram[(0, 1)];
        let psi1 = states.column(0);
        let psi2 = states.column(1);
        duals.push(FockVector::from_vector(psi1 / o21 - psi2.into_owned()));
        duals.push(FockVector::from_vector(psi2 / o12 - psi1.into_owned()));
    } else {
        let inv = gram
            .clone()
            .try_inverse()
            .ok_or(Error::IllConditioned {
                cond: f64::INFINITY,
                limit: CONDITION_LIMIT,
            })?;
        let dual_mat = &states * inv;
        for j in 0..n {
            duals.push(FockVector::from_vector(dual_mat.column(j).into_owned()));
        }
    }

    let mut normalizers = Vec::with_capacity(n);
    for (i, dual) in duals.iter().enumerate() {
        let gamma = dual.coefficients().dotc(&states.column(i));
        if cabs(gamma) <= r(1e-12) {
            return Err(Error::IllConditioned {
                cond: f64::INFINITY,
                limit: CONDITION_LIMIT,
            });
        }
        normalizers.push(gamma);
    }
    Ok(DualBasis { duals, normalizers })
}

/// Assembles the success operators from a factorized witness matrix.
pub fn build_kraus<T: Real>(
    set_a: &[CoherentLabel<T>],
    set_b: &[CoherentLabel<T>],
    coeffs: &CoefficientMatrix<T>,
    dim: usize,
) -> Result<KrausSet<T>> {
    let n = set_a.len();
    if set_b.len() != n {
        return Err(Error::DimensionMismatch(n, set_b.len()));
    }
    if coeffs.num_states() != n {
        return Err(Error::CoefficientShape {
            got: coeffs.num_states(),
            expected: n,
        });
    }
    let duals = reciprocal_states(set_a, dim)?;
    let outputs = state_matrix(set_b, dim)?;
    let m = coeffs.num_operators();
    let mut operators = Vec::with_capacity(m);
    for k in 0..m {
        let mut op = DMatrix::from_element(dim, dim, Complex::<T>::zero());
        for i in 0..n {
            let weight = coeffs.entries()[(k, i)] / duals.normalizers[i];
            let phi = outputs.column(i);
            op += (phi * weight) * duals.duals[i].coefficients().adjoint();
        }
        operators.push(op);
    }
    Ok(KrausSet {
        operators,
        set_a: set_a.to_vec(),
        set_b: set_b.to_vec(),
        coeffs: coeffs.clone(),
        dim,
    })
}

fn kraus_sum<T: Real>(ks: &KrausSet<T>) -> DMatrix<Complex<T>> {
    let mut s = DMatrix::from_element(ks.dim, ks.dim, Complex::<T>::zero());
    for op in &ks.operators {
        s += op.adjoint() * op;
    }
    s
}

/// Orthogonal projector onto the span of the input vectors.
fn span_projector<T: Real>(states: &DMatrix<Complex<T>>) -> Result<DMatrix<Complex<T>>> {
    let gram = numeric_gram(states);
    let inv = gram.try_inverse().ok_or(Error::IllConditioned {
        cond: f64::INFINITY,
        limit: CONDITION_LIMIT,
    })?;
    Ok(states * inv * states.adjoint())
}

fn max_abs<T: Real>(m: &DMatrix<Complex<T>>) -> T {
    m.iter().map(|c| cabs(*c)).fold(T::zero(), |a, b| a.max(b))
}

/// Recomputes action, biorthogonality, and span-completeness residuals.
pub fn verify_action<T: Real>(ks: &KrausSet<T>) -> Result<VerificationReport<T>> {
    let n = ks.set_a.len();
    let m = ks.operators.len();
    let inputs = state_matrix(&ks.set_a, ks.dim)?;
    let outputs = state_matrix(&ks.set_b, ks.dim)?;
    let duals = reciprocal_states(&ks.set_a, ks.dim)?;

    let mut action = DMatrix::from_element(m, n, T::zero());
    for k in 0..m {
        for i in 0..n {
            let lhs = &ks.operators[k] * inputs.column(i);
            let rhs = outputs.column(i) * ks.coeffs.entries()[(k, i)];
            action[(k, i)] = (lhs - rhs).norm();
        }
    }

    let mut eq14 = DMatrix::from_element(n, n, T::zero());
    for s in 0..n {
        for t in 0..n {
            let ip = duals.duals[s].coefficients().dotc(&inputs.column(t));
            let expect = if s == t {
                duals.normalizers[s]
            } else {
                Complex::zero()
            };
            eq14[(s, t)] = cabs(ip - expect);
        }
    }

    let p = span_projector(&inputs)?;
    let s = kraus_sum(ks);
    let completeness = max_abs(&(&p * &s * &p - &p));

    Ok(VerificationReport {
        action_residuals: action,
        completeness_residual: completeness,
        eq14_residuals: eq14,
    })
}

/// Appends the Hermitian square root of `I - sum A^dag A` so the completed
/// set resolves the identity on the whole truncated space.
pub fn complete_to_identity<T: Real>(ks: &KrausSet<T>) -> Result<KrausSet<T>> {
    let s = kraus_sum(ks);
    let residual = DMatrix::identity(ks.dim, ks.dim) - s;
    let eig = crate::geometry::hermitian_part(&residual).symmetric_eigen();
    let overshoot = r::<T>(-1e-6);
    let mut b = DMatrix::from_element(ks.dim, ks.dim, Complex::<T>::zero());
    for k in 0..ks.dim {
        let lam = eig.eigenvalues[k];
        if lam < overshoot {
            return Err(Error::CompletionOvershoot(lam.to_f64()));
        }
        if lam > T::zero() {
            let v = eig.eigenvectors.column(k);
            b += (v * Complex::new(lam.sqrt(), T::zero())) * v.adjoint();
        }
    }
    let mut completed = ks.clone();
    completed.operators.push(b);
    Ok(completed)
}

/// Full-space completeness residual `||sum A^dag A - I||_max`.
pub fn completeness_residual<T: Real>(ks: &KrausSet<T>) -> T {
    let s = kraus_sum(ks);
    max_abs(&(s - DMatrix::identity(ks.dim, ks.dim)))
}

/// Eigenvalues of `P (sum A^dag A) P` restricted to the span, for the
/// probabilistic bound `sum A^dag A <= P` on the success branch.
pub fn span_kraus_eigenvalues<T: Real>(ks: &KrausSet<T>) -> Result<DVector<T>> {
    let inputs = state_matrix(&ks.set_a, ks.dim)?;
    let p = span_projector(&inputs)?;
    let m = &p * kraus_sum(ks) * &p;
    Ok(crate::geometry::hermitian_eigenvalues(&m))
}

impl<T: Real> KrausSet<T> {
    /// JSON bundle: dimensions, operators as `[re, im]` pairs in row-major
    /// order, source labels, and a residual summary.
    pub fn to_json(&self) -> Result<serde_json::Value> {
        let report = verify_action(self)?;
        let ops: Vec<Vec<[f64; 2]>> = self
            .operators
            .iter()
            .map(|op| {
                let mut flat = Vec::with_capacity(self.dim * self.dim);
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        let c = op[(i, j)];
                        flat.push([c.re.to_f64(), c.im.to_f64()]);
                    }
                }
                flat
            })
            .collect();
        let labels = |set: &[CoherentLabel<T>]| -> Vec<serde_json::Value> {
            set.iter()
                .map(|l| {
                    serde_json::json!({
                        "amplitude": l.amplitude().to_f64(),
                        "phase": l.phase().to_f64(),
                    })
                })
                .collect()
        };
        Ok(serde_json::json!({
            "schema_version": 1,
            "dim": self.dim,
            "M": self.operators.len(),
            "operators": ops,
            "set_a": labels(&self.set_a),
            "set_b": labels(&self.set_b),
            "residuals": {
                "max_action": report.max_action_residual().to_f64(),
                "max_eq14": report.max_eq14_residual().to_f64(),
                "span_completeness": report.completeness_residual.to_f64(),
            },
        }))
    }
}
