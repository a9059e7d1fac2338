//! Problem parameterization and the spectral coordinate.
//!
//! Eigenvalues are searched in the `s`-plane, with `mu = -s (s + 1)`. The map
//! is two-to-one (`s` and `-1 - s` give the same `mu`), so every reported
//! point is reduced to the half-plane `Re(s) >= -1/2` with `Im(s) >= 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectraError};

/// One problem instance: azimuthal wavenumber, Reynolds number, truncation
/// coordinate `x0 = cos(theta0)` and series truncation order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParams {
    pub k: i64,
    pub eps: f64,
    pub x0: f64,
    pub m: usize,
}

impl SpectralParams {
    pub fn new(k: i64, eps: f64, x0: f64, m: usize) -> Result<Self> {
        if !eps.is_finite() || eps < 0.0 {
            return Err(SpectraError::InvalidParams(format!("eps must be finite and >= 0, got {eps}")));
        }
        if !x0.is_finite() || x0 <= 0.0 || x0 > 1.0 {
            return Err(SpectraError::InvalidParams(format!("x0 must lie in (0, 1], got {x0}")));
        }
        if m < 2 {
            return Err(SpectraError::InvalidParams(format!("truncation order M must be >= 2, got {m}")));
        }
        Ok(Self { k, eps, x0, m })
    }

    pub fn abs_k(&self) -> u64 {
        self.k.unsigned_abs()
    }

    /// `k^2`, the only way the wavenumber enters the equations.
    pub fn k2(&self) -> f64 {
        (self.k as f64) * (self.k as f64)
    }

    pub fn is_full_sphere(&self) -> bool {
        self.x0 >= 1.0
    }

    pub fn with_x0(self, x0: f64) -> Result<Self> {
        Self::new(self.k, self.eps, x0, self.m)
    }

    pub fn with_eps(self, eps: f64) -> Result<Self> {
        Self::new(self.k, eps, self.x0, self.m)
    }

    pub fn with_m(self, m: usize) -> Result<Self> {
        Self::new(self.k, self.eps, self.x0, m)
    }

    /// The series solver needs a truncated layer.
    pub(crate) fn require_truncated(&self) -> Result<()> {
        if self.x0 >= 1.0 {
            return Err(SpectraError::InvalidParams(
                "x0 = 1 (full sphere) is served by the analytic spectra, not the series solver".into(),
            ));
        }
        Ok(())
    }
}

/// `mu = -s (s + 1)`.
pub fn mu_of_s(s: Complex64) -> Complex64 {
    -s * (s + 1.0)
}

/// Reduce `s` to the representative with `Re(s) >= -1/2` and, for complex
/// values, nonnegative imaginary part.
pub fn canonicalize_s(s: Complex64) -> Complex64 {
    let mut t = if s.re >= -0.5 { s } else { -1.0 - s };
    if t.im < 0.0 {
        t.im = -t.im;
    }
    t
}

/// True iff the point lies inside the region where `Re(mu) < 0`.
pub fn in_stability_domain(s: Complex64) -> bool {
    s.re > 0.0 && s.im.abs() < (s.re * (s.re + 1.0)).sqrt()
}

/// A point of the spectrum; `mu` is always derived from `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    s: Complex64,
}

impl SpectralPoint {
    pub fn new(s: Complex64) -> Self {
        Self { s: canonicalize_s(s) }
    }

    pub fn real(s: f64) -> Self {
        Self::new(Complex64::new(s, 0.0))
    }

    pub fn s(&self) -> Complex64 {
        self.s
    }

    pub fn mu(&self) -> Complex64 {
        mu_of_s(self.s)
    }

    pub fn is_stable(&self) -> bool {
        in_stability_domain(self.s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootKind {
    Real,
    ComplexPair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootSource {
    Series,
    Oracle,
    Analytic,
}

impl RootSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            RootSource::Series => "series",
            RootSource::Oracle => "oracle",
            RootSource::Analytic => "analytic",
        }
    }
}

/// An eigenvalue located by one of the solvers.
///
/// `residual` is the determinant magnitude at the root relative to its
/// magnitude one probe step away, so it is independent of how the
/// determinant was scaled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub point: SpectralPoint,
    pub residual: f64,
    pub kind: RootKind,
    pub source: RootSource,
}

/// Roots whose imaginary part is below this are treated as real.
pub const REAL_AXIS_TOL: f64 = 1e-9;

impl Root {
    pub fn new(s: Complex64, residual: f64, source: RootSource) -> Self {
        let point = SpectralPoint::new(s);
        let kind = if point.s().im.abs() <= REAL_AXIS_TOL { RootKind::Real } else { RootKind::ComplexPair };
        Self { point, residual, kind, source }
    }

    pub fn s(&self) -> Complex64 {
        self.point.s()
    }

    pub fn mu(&self) -> Complex64 {
        self.point.mu()
    }
}
