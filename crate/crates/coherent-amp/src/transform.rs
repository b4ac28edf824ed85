//! Pure-state set transformation: the witness-matrix conditions, an
//! alternating-projection feasibility search, and the coefficient
//! factorization feeding the Kraus construction.
//!
//! A transformation `A -> B` with per-state success probabilities `p` exists
//! iff some Hermitian `Pi` satisfies: `Pi >= 0`, `diag(Pi) = p`, and
//! `G_A - Pi o G_B >= 0` (`o` = Hadamard product).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{default_psd_tol, hermitian_part, psd_check, GramMatrix, PsdVerdict};
use crate::real::{cabs, r, Real};

/// Candidate witness matrix: Hermitian, diagonal = success probabilities.
#[derive(Debug, Clone)]
pub struct PiMatrix<T: Real> {
    entries: DMatrix<Complex<T>>,
    probabilities: DVector<T>,
}

impl<T: Real> PiMatrix<T> {
    /// Builds from entries, forcing the diagonal onto `probabilities`.
    pub fn new(entries: DMatrix<Complex<T>>, probabilities: DVector<T>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        if entries.nrows() != probabilities.len() {
            return Err(Error::DimensionMismatch(
                entries.nrows(),
                probabilities.len(),
            ));
        }
        let slack = r::<T>(1e-9);
        let mut p = probabilities;
        for i in 0..p.len() {
            if p[i] < -slack || p[i] > T::one() + slack {
                return Err(Error::InvalidProbability(p[i].to_f64()));
            }
            p[i] = p[i].clamp(T::zero(), T::one());
        }
        let mut m = hermitian_part(&entries);
        for i in 0..p.len() {
            m[(i, i)] = Complex::new(p[i], T::zero());
        }
        Ok(Self {
            entries: m,
            probabilities: p,
        })
    }

    /// Builds from a Hermitian matrix, reading probabilities off the diagonal.
    pub fn from_entries(entries: DMatrix<Complex<T>>) -> Result<Self> {
        let p = DVector::from_fn(entries.nrows(), |i, _| entries[(i, i)].re);
        Self::new(entries, p)
    }

    pub fn entries(&self) -> &DMatrix<Complex<T>> {
        &self.entries
    }

    pub fn probabilities(&self) -> &DVector<T> {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.len() == 0
    }
}

/// Factor `C` with `C^dag C = Pi`; rows are the success Kraus coefficients.
#[derive(Debug, Clone)]
pub struct CoefficientMatrix<T: Real> {
    entries: DMatrix<Complex<T>>,
}

impl<T: Real> CoefficientMatrix<T> {
    pub fn entries(&self) -> &DMatrix<Complex<T>> {
        &self.entries
    }

    /// Number of success Kraus operators.
    pub fn num_operators(&self) -> usize {
        self.entries.nrows()
    }

    pub fn num_states(&self) -> usize {
        self.entries.ncols()
    }
}

/// `K = G_A - Pi o G_B` with its positivity verdict.
#[derive(Debug, Clone)]
pub struct ResidualGram<T: Real> {
    pub entries: DMatrix<Complex<T>>,
    pub verdict: PsdVerdict<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Feasible,
    Infeasible,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Binding {
    PiPositivity,
    ResidualPositivity,
    AnalyticBoundary,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Feasible => write!(f, "feasible"),
            Verdict::Infeasible => write!(f, "infeasible"),
            Verdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

impl std::fmt::Display for Binding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Binding::PiPositivity => write!(f, "pi-positivity"),
            Binding::ResidualPositivity => write!(f, "residual-positivity"),
            Binding::AnalyticBoundary => write!(f, "analytic-boundary"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FeasibilityReport<T: Real> {
    pub verdict: Verdict,
    /// Signed, scale-relative minimum eigenvalue of the binding matrix (or
    /// the distance slack for the analytic check).
    pub margin: T,
    pub binding: Binding,
    pub witness: Option<PiMatrix<T>>,
    pub iterations: usize,
}

impl<T: Real> FeasibilityReport<T> {
    pub fn feasible(&self) -> bool {
        self.verdict == Verdict::Feasible
    }
}

/// Deterministic witness: `Pi_ij = gA_ij / gB_ij` elementwise.
///
/// With unit probabilities the residual condition degenerates to `K = 0`, so
/// the deterministic transformation exists iff this ratio matrix is PSD.
pub fn pi_deterministic<T: Real>(
    g_a: &GramMatrix<T>,
    g_b: &GramMatrix<T>,
) -> Result<(PiMatrix<T>, FeasibilityReport<T>)> {
    let n = check_same_size(g_a, g_b)?;
    let floor = r::<T>(1e-300);
    let mut entries = DMatrix::from_element(n, n, Complex::<T>::zero());
    for i in 0..n {
        for j in 0..n {
            let b = g_b.entries()[(i, j)];
            if cabs(b) < floor {
                return Err(Error::ZeroGramEntry(i, j));
            }
            entries[(i, j)] = g_a.entries()[(i, j)] / b;
        }
    }
    let pi = PiMatrix::new(entries, DVector::from_element(n, T::one()))?;
    let verdict = psd_check(pi.entries(), default_psd_tol())?;
    let feasible = verdict.is_psd;
    let report = FeasibilityReport {
        verdict: if feasible {
            Verdict::Feasible
        } else {
            Verdict::Infeasible
        },
        margin: verdict.margin(),
        binding: Binding::PiPositivity,
        witness: if feasible { Some(pi.clone()) } else { None },
        iterations: 0,
    };
    Ok((pi, report))
}

/// Verifies the three witness conditions for a *given* `Pi`.
pub fn lemma1_check<T: Real>(
    g_a: &GramMatrix<T>,
    g_b: &GramMatrix<T>,
    pi: &PiMatrix<T>,
) -> Result<FeasibilityReport<T>> {
    let n = check_same_size(g_a, g_b)?;
    if pi.len() != n {
        return Err(Error::DimensionMismatch(pi.len(), n));
    }
    let v1 = psd_check(pi.entries(), default_psd_tol())?;
    let k = residual_matrix(g_a, g_b, pi);
    let v3 = psd_check(&k, default_psd_tol())?;
    let (margin, binding) = if v1.margin() <= v3.margin() {
        (v1.margin(), Binding::PiPositivity)
    } else {
        (v3.margin(), Binding::ResidualPositivity)
    };
    let feasible = v1.is_psd && v3.is_psd;
    Ok(FeasibilityReport {
        verdict: if feasible {
            Verdict::Feasible
        } else {
            Verdict::Infeasible
        },
        margin,
        binding,
        witness: if feasible { Some(pi.clone()) } else { None },
        iterations: 0,
    })
}

fn residual_matrix<T: Real>(
    g_a: &GramMatrix<T>,
    g_b: &GramMatrix<T>,
    pi: &PiMatrix<T>,
) -> DMatrix<Complex<T>> {
    g_a.entries() - pi.entries().component_mul(g_b.entries())
}

/// `K = G_A - Pi o G_B` with its positivity verdict attached.
pub fn residual_gram<T: Real>(
    g_a: &GramMatrix<T>,
    g_b: &GramMatrix<T>,
    pi: &PiMatrix<T>,
) -> Result<ResidualGram<T>> {
    let n = check_same_size(g_a, g_b)?;
    if pi.len() != n {
        return Err(Error::DimensionMismatch(pi.len(), n));
    }
    let entries = hermitian_part(&residual_matrix(g_a, g_b, pi));
    let verdict = psd_check(&entries, default_psd_tol())?;
    Ok(ResidualGram { entries, verdict })
}

fn check_same_size<T: Real>(g_a: &GramMatrix<T>, g_b: &GramMatrix<T>) -> Result<usize> {
    if g_a.len() != g_b.len() {
        return Err(Error::DimensionMismatch(g_a.len(), g_b.len()));
    }
    Ok(g_a.len())
}

/// Clips negative eigenvalues of a Hermitian matrix at zero.
fn psd_project<T: Real>(m: &DMatrix<Complex<T>>) -> DMatrix<Complex<T>> {
    let eig = hermitian_part(m).symmetric_eigen();
    let n = m.nrows();
    let mut clipped = DMatrix::from_element(n, n, Complex::<T>::zero());
    for k in 0..n {
        let lam = eig.eigenvalues[k];
        if lam > T::zero() {
            let v = eig.eigenvectors.column(k);
            let scaled = v * Complex::new(lam, T::zero());
            clipped += scaled * v.adjoint();
        }
    }
    clipped
}

/// Projection onto {Hermitian, PSD, diag = p}: alternate eigenvalue clipping
/// and diagonal reset until both hold to a joint tolerance.
fn project_diag_psd<T: Real>(
    m: &DMatrix<Complex<T>>,
    p: &DVector<T>,
    tol: T,
) -> DMatrix<Complex<T>> {
    let mut x = hermitian_part(m);
    for _ in 0..300 {
        for i in 0..p.len() {
            x[(i, i)] = Complex::new(p[i], T::zero());
        }
        x = psd_project(&x);
        let mut diag_dev = T::zero();
        for i in 0..p.len() {
            diag_dev = diag_dev.max(cabs(x[(i, i)] - Complex::new(p[i], T::zero())));
        }
        if diag_dev <= tol {
            break;
        }
    }
    for i in 0..p.len() {
        x[(i, i)] = Complex::new(p[i], T::zero());
    }
    x
}

/// Projection onto {Pi : G_A - Pi o G_B PSD}: clip the residual's negative
/// eigenvalues and push the violation back through `G_B` elementwise.
fn project_residual_psd<T: Real>(
    m: &DMatrix<Complex<T>>,
    g_a: &GramMatrix<T>,
    g_b: &GramMatrix<T>,
) -> DMatrix<Complex<T>> {
    let x = hermitian_part(m);
    let k = g_a.entries() - x.component_mul(g_b.entries());
    let k_plus = psd_project(&k);
    let n = x.nrows();
    let floor = r::<T>(1e-300);
    DMatrix::from_fn(n, n, |i, j| {
        let mut b = g_b.entries()[(i, j)];
        if cabs(b) < floor {
            b = Complex::new(floor, T::zero());
        }
        (g_a.entries()[(i, j)] - k_plus[(i, j)]) / b
    })
}

/// Searches for a witness `Pi` at fixed probabilities by alternating
/// projections with Dykstra correction.
///
/// Returns a three-way verdict: alternating projections cannot certify
/// infeasibility exactly, so a stalled positive inter-set gap is reported as
/// infeasible and exhaustion without convergence as inconclusive.
pub fn dykstra_feasibility<T: Real>(
    g_a: &GramMatrix<T>,
    g_b: &GramMatrix<T>,
    p: &DVector<T>,
    max_iters: usize,
    tol: T,
) -> Result<FeasibilityReport<T>> {
    let n = check_same_size(g_a, g_b)?;
    if p.len() != n {
        return Err(Error::DimensionMismatch(p.len(), n));
    }
    for i in 0..n {
        if p[i] < T::zero() || p[i] > T::one() {
            return Err(Error::InvalidProbability(p[i].to_f64()));
        }
    }
    if tol <= T::zero() {
        return Err(Error::InvalidConfig("tol must be positive".into()));
    }

    // rank-1 start sqrt(p_i p_j): PSD with the right diagonal.
    let mut x = DMatrix::from_fn(n, n, |i, j| {
        Complex::new((p[i] * p[j]).sqrt(), T::zero())
    });
    let mut corr_a = DMatrix::from_element(n, n, Complex::<T>::zero());
    let mut corr_b = DMatrix::from_element(n, n, Complex::<T>::zero());

    let mut prev_gap = T::max_value().unwrap();
    let mut stall = 0usize;
    let stall_limit = 50usize;

    for iter in 0..max_iters {
        let y = project_diag_psd(&(&x + &corr_a), p, tol * r(1e-2));
        corr_a = &x + &corr_a - &y;
        let z = project_residual_psd(&(&y + &corr_b), g_a, g_b);
        corr_b = &y + &corr_b - &z;
        x = z.clone();

        // candidate: force the diagonal and re-verify all three conditions
        let candidate = PiMatrix::new(z.clone(), p.clone())?;
        let v1 = psd_check(candidate.entries(), default_psd_tol())?;
        let k = residual_matrix(g_a, g_b, &candidate);
        let v3 = psd_check(&k, default_psd_tol())?;
        let m1 = v1.margin();
        let m3 = v3.margin();
        if m1 >= -tol && m3 >= -tol {
            let (margin, binding) = if m1 <= m3 {
                (m1, Binding::PiPositivity)
            } else {
                (m3, Binding::ResidualPositivity)
            };
            return Ok(FeasibilityReport {
                verdict: Verdict::Feasible,
                margin,
                binding,
                witness: Some(candidate),
                iterations: iter + 1,
            });
        }

        let gap = (&y - &z).norm();
        if gap > tol && prev_gap - gap < r::<T>(1e-6) * gap {
            stall += 1;
            if stall >= stall_limit {
                let binding = if m1 <= m3 {
                    Binding::PiPositivity
                } else {
                    Binding::ResidualPositivity
                };
                return Ok(FeasibilityReport {
                    verdict: Verdict::Infeasible,
                    margin: m1.min(m3),
                    binding,
                    witness: None,
                    iterations: iter + 1,
                });
            }
        } else {
            stall = 0;
        }
        prev_gap = gap;
    }

    Ok(FeasibilityReport {
        verdict: Verdict::Inconclusive,
        margin: T::zero(),
        binding: Binding::PiPositivity,
        witness: None,
        iterations: max_iters,
    })
}

/// Default iteration budget for the alternating-projection search.
pub const DEFAULT_DYKSTRA_ITERS: usize = 5000;

/// Largest uniform success probability, by bisection over the Dykstra search.
pub fn max_uniform_success<T: Real>(
    g_a: &GramMatrix<T>,
    g_b: &GramMatrix<T>,
    tol: T,
) -> Result<T> {
    let n = check_same_size(g_a, g_b)?;
    let iters = 4 * DEFAULT_DYKSTRA_ITERS;
    let feas_tol = r::<T>(1e-9);
    let run = |p_val: T| -> Result<Verdict> {
        let p = DVector::from_element(n, p_val);
        Ok(dykstra_feasibility(g_a, g_b, &p, iters, feas_tol)?.verdict)
    };
    match run(T::one())? {
        Verdict::Feasible => return Ok(T::one()),
        Verdict::Inconclusive => return Err(Error::BisectionAmbiguous(1.0)),
        Verdict::Infeasible => {}
    }
    let mut lo = T::zero();
    let mut hi = T::one();
    while hi - lo > tol {
        let mid = (lo + hi) * r(0.5);
        match run(mid)? {
            Verdict::Feasible => lo = mid,
            Verdict::Infeasible => hi = mid,
            Verdict::Inconclusive => return Err(Error::BisectionAmbiguous(mid.to_f64())),
        }
    }
    Ok(lo)
}

/// Eigen-factorizes a PSD `Pi` into `C` with `C^dag C = Pi`, dropping
/// numerically zero eigenvalues and rejecting eigenvalues below `-clip`.
pub fn factor_coefficients<T: Real>(pi: &PiMatrix<T>, clip: T) -> Result<CoefficientMatrix<T>> {
    let eig = pi.entries().clone().symmetric_eigen();
    let n = pi.len();
    let max_lam = eig
        .eigenvalues
        .iter()
        .fold(T::zero(), |a, &b| a.max(b.abs()));
    // `clip` bounds tolerated negativity; rank decisions use a separate
    // spectrum-relative threshold so a generous clip cannot drop real modes
    let rank_tol = r::<T>(1e-12) * T::one().max(max_lam);
    let mut kept: Vec<usize> = Vec::new();
    for k in 0..n {
        let lam = eig.eigenvalues[k];
        if lam < -clip {
            return Err(Error::NotPositive {
                eigenvalue: lam.to_f64(),
                clip: clip.to_f64(),
            });
        }
        if lam > rank_tol {
            kept.push(k);
        }
    }
    let mut entries = DMatrix::from_element(kept.len(), n, Complex::<T>::zero());
    for (row, &k) in kept.iter().enumerate() {
        let s = eig.eigenvalues[k].sqrt();
        for j in 0..n {
            entries[(row, j)] = eig.eigenvectors[(j, k)].conj() * Complex::new(s, T::zero());
        }
    }
    Ok(CoefficientMatrix { entries })
}

/// Default factorization clip threshold, scaled by the matrix norm.
pub fn default_clip<T: Real>(pi: &PiMatrix<T>) -> T {
    let scale = pi
        .entries()
        .iter()
        .map(|c| cabs(*c))
        .fold(T::zero(), |a, b| a.max(b));
    r::<T>(1e-10) * T::one().max(scale)
}
