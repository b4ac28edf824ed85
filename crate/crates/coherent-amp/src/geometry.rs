//! Analytic coherent-state geometry: overlaps, the squared-difference
//! distance, Gram matrices, positivity checks, and Wigner grids.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::CoherentLabel;
use crate::real::{cexp, r, Real};

/// Default relative tolerance for positive-semidefinite verdicts.
pub fn default_psd_tol<T: Real>() -> T {
    r(1e-10)
}

/// Pairwise-overlap matrix of a coherent-state set. Hermitian with unit
/// diagonal by construction.
#[derive(Debug, Clone)]
pub struct GramMatrix<T: Real> {
    entries: DMatrix<Complex<T>>,
    labels: Vec<CoherentLabel<T>>,
}

impl<T: Real> GramMatrix<T> {
    pub fn entries(&self) -> &DMatrix<Complex<T>> {
        &self.entries
    }

    pub fn labels(&self) -> &[CoherentLabel<T>] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Outcome of a positive-semidefiniteness test.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PsdVerdict<T: Real> {
    pub is_psd: bool,
    pub min_eigenvalue: T,
    /// Absolute tolerance actually applied: `tol * max(1, spectral norm)`.
    pub tolerance_used: T,
    /// The `max(1, spectral norm)` scale, kept so callers can report a
    /// scale-free margin.
    pub scale: T,
}

impl<T: Real> PsdVerdict<T> {
    /// Signed minimum eigenvalue divided by the matrix scale.
    pub fn margin(&self) -> T {
        self.min_eigenvalue / self.scale
    }
}

/// `<a|b> = exp(-(|a|^2+|b|^2)/2 + conj(a) b)`; never zero.
pub fn overlap<T: Real>(a: &CoherentLabel<T>, b: &CoherentLabel<T>) -> Complex<T> {
    let za = a.complex();
    let zb = b.complex();
    let half = r::<T>(0.5);
    let exponent = za.conj() * zb - Complex::new((za.norm_sqr() + zb.norm_sqr()) * half, T::zero());
    cexp(exponent)
}

/// Squared modulus of the amplitude difference; `|<a|b>|^2 = exp(-D)`.
pub fn distance<T: Real>(a: &CoherentLabel<T>, b: &CoherentLabel<T>) -> T {
    (a.complex() - b.complex()).norm_sqr()
}

/// Gram matrix of a label set, Hermitian and unit-diagonal by construction.
pub fn gram<T: Real>(labels: &[CoherentLabel<T>]) -> GramMatrix<T> {
    let n = labels.len();
    let mut entries = DMatrix::from_element(n, n, Complex::<T>::zero());
    for i in 0..n {
        entries[(i, i)] = Complex::new(T::one(), T::zero());
        for j in (i + 1)..n {
            let o = overlap(&labels[i], &labels[j]);
            entries[(i, j)] = o;
            entries[(j, i)] = o.conj();
        }
    }
    GramMatrix {
        entries,
        labels: labels.to_vec(),
    }
}

/// Hermitian part `(m + m^dag)/2`.
pub fn hermitian_part<T: Real>(m: &DMatrix<Complex<T>>) -> DMatrix<Complex<T>> {
    let half = Complex::new(r::<T>(0.5), T::zero());
    (m + m.adjoint()) * half
}

/// Full eigendecomposition PSD test with scale-relative tolerance.
pub fn psd_check<T: Real>(m: &DMatrix<Complex<T>>, tol: T) -> Result<PsdVerdict<T>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Ok(PsdVerdict {
            is_psd: true,
            min_eigenvalue: T::zero(),
            tolerance_used: tol,
            scale: T::one(),
        });
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let mut min = eig.eigenvalues[0];
    let mut max_abs = T::zero();
    for &ev in eig.eigenvalues.iter() {
        min = min.min(ev);
        max_abs = max_abs.max(ev.abs());
    }
    let scale = T::one().max(max_abs);
    let tolerance_used = tol * scale;
    Ok(PsdVerdict {
        is_psd: min >= -tolerance_used,
        min_eigenvalue: min,
        tolerance_used,
        scale,
    })
}

/// Eigenvalues of the Hermitian part, ascending.
pub fn hermitian_eigenvalues<T: Real>(m: &DMatrix<Complex<T>>) -> DVector<T> {
    let mut evs: Vec<T> = hermitian_part(m)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    DVector::from_vec(evs)
}

/// Sampled Wigner function of a coherent state on a uniform grid.
///
/// Convention: quadratures `x = (a + a^dag)/sqrt(2)`, `hbar = 1`, so
/// `W(x,p) = exp(-(x - sqrt(2) Re a)^2 - (p - sqrt(2) Im a)^2) / pi`.
#[derive(Debug, Clone)]
pub struct WignerGrid<T: Real> {
    pub window: (T, T, T, T),
    pub resolution: usize,
    /// `values[(ix, ip)]`, row-major over x then p.
    pub values: DMatrix<T>,
}

pub fn wigner_grid<T: Real>(
    label: &CoherentLabel<T>,
    window: (T, T, T, T),
    resolution: usize,
) -> Result<WignerGrid<T>> {
    let (x_min, x_max, p_min, p_max) = window;
    if resolution < 2 || x_min >= x_max || p_min >= p_max {
        return Err(Error::InvalidGrid);
    }
    let z = label.complex();
    let sqrt2 = r::<T>(2.0).sqrt();
    let cx = sqrt2 * z.re;
    let cp = sqrt2 * z.im;
    let steps = r::<T>((resolution - 1) as f64);
    let dx = (x_max - x_min) / steps;
    let dp = (p_max - p_min) / steps;
    let inv_pi = T::one() / T::pi();
    let values = DMatrix::from_fn(resolution, resolution, |ix, ip| {
        let x = x_min + dx * r(ix as f64);
        let p = p_min + dp * r(ip as f64);
        inv_pi * (-(x - cx) * (x - cx) - (p - cp) * (p - cp)).exp()
    });
    Ok(WignerGrid {
        window,
        resolution,
        values,
    })
}

impl<T: Real> WignerGrid<T> {
    /// Trapezoid quadrature of the sampled grid.
    pub fn integral(&self) -> T {
        let (x_min, x_max, p_min, p_max) = self.window;
        let steps = r::<T>((self.resolution - 1) as f64);
        let dx = (x_max - x_min) / steps;
        let dp = (p_max - p_min) / steps;
        let half = r::<T>(0.5);
        let mut total = T::zero();
        let n = self.resolution;
        for ix in 0..n {
            let wx = if ix == 0 || ix == n - 1 { half } else { T::one() };
            for ip in 0..n {
                let wp = if ip == 0 || ip == n - 1 { half } else { T::one() };
                total += wx * wp * self.values[(ix, ip)];
            }
        }
        total * dx * dp
    }

    /// CSV with header `x,p,w`, row-major over x then p.
    pub fn to_csv(&self) -> String {
        let (x_min, x_max, p_min, p_max) = self.window;
        let steps = r::<T>((self.resolution - 1) as f64);
        let dx = (x_max - x_min) / steps;
        let dp = (p_max - p_min) / steps;
        let mut out = String::from("x,p,w\n");
        for ix in 0..self.resolution {
            let x = x_min + dx * r::<T>(ix as f64);
            for ip in 0..self.resolution {
                let p = p_min + dp * r::<T>(ip as f64);
                out.push_str(&format!(
                    "{:.16e},{:.16e},{:.16e}\n",
                    x.to_f64(),
                    p.to_f64(),
                    self.values[(ix, ip)].to_f64()
                ));
            }
        }
        out
    }

    /// JSON object with window, resolution and a flat row-major value array.
    pub fn to_json(&self) -> serde_json::Value {
        let (x_min, x_max, p_min, p_max) = self.window;
        let mut flat = Vec::with_capacity(self.resolution * self.resolution);
        for ix in 0..self.resolution {
            for ip in 0..self.resolution {
                flat.push(self.values[(ix, ip)].to_f64());
            }
        }
        serde_json::json!({
            "schema_version": 1,
            "window": {
                "x_min": x_min.to_f64(),
                "x_max": x_max.to_f64(),
                "p_min": p_min.to_f64(),
                "p_max": p_max.to_f64(),
            },
            "resolution": self.resolution,
            "values": flat,
        })
    }

    /// Window covering `center +- 6 sigma` on both axes (`sigma = 1/sqrt(2)`).
    pub fn default_window(label: &CoherentLabel<T>) -> (T, T, T, T) {
        let z = label.complex();
        let sqrt2 = r::<T>(2.0).sqrt();
        let cx = sqrt2 * z.re;
        let cp = sqrt2 * z.im;
        let span = r::<T>(6.0) / sqrt2;
        (cx - span, cx + span, cp - span, cp + span)
    }
}
