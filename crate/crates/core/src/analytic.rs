//! Closed-form spectra and eigenfunctions.
//!
//! On the full sphere (`x0 = 1`) the eigenvalue problems reduce to
//! hypergeometric equations whose polynomial solutions give the spectra
//! exactly. These serve as the `x0 = 1` solver and as reference data for the
//! truncated problem.
//!
//! Eigenfunctions are represented as [`WeightedPoly`], a polynomial times
//! powers of `1 - x` and `1 + x`, so that derivatives and the Darboux pair are
//! computed exactly rather than by finite differences.

use std::num::NonZeroUsize;
use std::ops::{Add, Mul, Neg, Sub};

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boundary;
use crate::error::{Result, SpectraError};
use crate::params::SpectralParams;
use crate::series::{self, Field};

type C64 = Complex64;

/// Real polynomial in ascending powers of `x`, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `a + b x`
    pub fn linear(a: f64, b: f64) -> Self {
        Self::new(vec![a, b])
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| i as f64 * c).collect())
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(self.coeffs.iter().map(|&v| v * c).collect())
    }

    pub fn pow(&self, n: usize) -> Self {
        (0..n).fold(Self::constant(1.0), |acc, _| &acc * self)
    }

    /// Legendre polynomial `P_n` by Bonnet's recurrence.
    pub fn legendre(n: usize) -> Self {
        let mut prev = Self::constant(1.0);
        if n == 0 {
            return prev;
        }
        let mut cur = Self::linear(0.0, 1.0);
        for j in 1..n {
            let j = j as f64;
            let next = (&(&Self::linear(0.0, 2.0 * j + 1.0) * &cur) - &prev.scale(j)).scale(1.0 / (j + 1.0));
            prev = cur;
            cur = next;
        }
        cur
    }

    /// Largest coefficient difference against `other`.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).map(|i| (self.coeff(i) - other.coeff(i)).abs()).fold(0.0, f64::max)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

/// `(1 - x)^alpha (1 + x)^beta P(x)` on `(-1, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPoly {
    pub alpha: f64,
    pub beta: f64,
    pub poly: Polynomial,
}

fn is_integer(v: f64) -> bool {
    (v - v.round()).abs() < 1e-12
}

impl WeightedPoly {
    pub fn new(alpha: f64, beta: f64, poly: Polynomial) -> Self {
        Self { alpha, beta, poly }
    }

    pub fn from_poly(poly: Polynomial) -> Self {
        Self::new(0.0, 0.0, poly)
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.poly.is_zero() {
            return 0.0;
        }
        (1.0 - x).powf(self.alpha) * (1.0 + x).powf(self.beta) * self.poly.eval(x)
    }

    pub fn derivative(&self) -> Self {
        let p = &self.poly;
        let term_a = &Polynomial::linear(-self.alpha, -self.alpha) * p;
        let term_b = &Polynomial::linear(self.beta, -self.beta) * p;
        let term_c = &Polynomial::new(vec![1.0, 0.0, -1.0]) * &p.derivative();
        Self::new(self.alpha - 1.0, self.beta - 1.0, &(&term_a + &term_b) + &term_c)
    }

    /// Multiply by `(1 - x^2)^power`.
    pub fn times_w2(&self, power: f64) -> Self {
        Self::new(self.alpha + power, self.beta + power, self.poly.clone())
    }

    pub fn times_poly(&self, q: &Polynomial) -> Self {
        Self::new(self.alpha, self.beta, &self.poly * q)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(self.alpha, self.beta, self.poly.scale(c))
    }

    /// Sum of two terms whose exponents differ by integers.
    ///
    /// Panics otherwise, since the result is not of this form.
    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        assert!(is_integer(self.alpha - other.alpha) && is_integer(self.beta - other.beta), "weights differ by a non-integer power");
        let alpha = self.alpha.min(other.alpha);
        let beta = self.beta.min(other.beta);
        let lift = |t: &Self| {
            let da = (t.alpha - alpha).round() as usize;
            let db = (t.beta - beta).round() as usize;
            &(&Polynomial::linear(1.0, -1.0).pow(da) * &Polynomial::linear(1.0, 1.0).pow(db)) * &t.poly
        };
        Self::new(alpha, beta, &lift(self) + &lift(other))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }
}

pub fn sigma_of(k: i64, eps: f64) -> f64 {
    ((k * k) as f64 + eps * eps / 4.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    KNonzeroFullSphere,
    K0FullSphere,
    K0ChiLimit,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::KNonzeroFullSphere => "k-nonzero-full-sphere",
            Regime::K0FullSphere => "k0-full-sphere",
            Regime::K0ChiLimit => "k0-chi-limit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSpectrum {
    pub sigma: f64,
    pub s_values: Vec<f64>,
    pub mu_values: Vec<f64>,
    pub regime: Regime,
    /// Only the trivial eigenvalue `mu = 0` survives (k = 0, eps >= 2).
    pub empty_nontrivial: bool,
}

impl AnalyticSpectrum {
    fn from_s(sigma: f64, s_values: Vec<f64>, regime: Regime) -> Self {
        let mu_values = s_values.iter().map(|s| -s * (s + 1.0)).collect();
        Self { sigma, s_values, mu_values, regime, empty_nontrivial: false }
    }

    /// Nontrivial part, dropping `mu = 0`.
    pub fn nontrivial_s(&self) -> Vec<f64> {
        self.s_values.iter().copied().filter(|&s| s != 0.0).collect()
    }
}

/// `s_n = sigma + n`, `n = 0..=n_max`.
pub fn spectrum_full_sphere_k(k: i64, eps: f64, n_max: usize) -> Result<AnalyticSpectrum> {
    if k == 0 {
        return Err(SpectraError::InvalidParams("spectrum_full_sphere_k requires k != 0".into()));
    }
    check_eps(eps)?;
    let sigma = sigma_of(k, eps);
    Ok(AnalyticSpectrum::from_s(sigma, (0..=n_max).map(|n| sigma + n as f64).collect(), Regime::KNonzeroFullSphere))
}

/// `mu_n = -n(n+1)` for `eps < 2`, including the trivial `n = 0`; only the
/// trivial eigenvalue for `eps >= 2`.
pub fn spectrum_full_sphere_k0(eps: f64, n_max: usize) -> Result<AnalyticSpectrum> {
    check_eps(eps)?;
    let sigma = eps / 2.0;
    if eps >= 2.0 {
        let mut sp = AnalyticSpectrum::from_s(sigma, vec![0.0], Regime::K0FullSphere);
        sp.empty_nontrivial = true;
        return Ok(sp);
    }
    Ok(AnalyticSpectrum::from_s(sigma, (0..=n_max).map(|n| n as f64).collect(), Regime::K0FullSphere))
}

/// Limits of the self-adjoint `chi` problem: `s_n = 1 + n` for `eps <= 2`,
/// `s_n = eps/2 + n` beyond.
pub fn spectrum_chi_limit(eps: f64, n_max: usize) -> Result<AnalyticSpectrum> {
    check_eps(eps)?;
    let sigma = eps / 2.0;
    let first = sigma.max(1.0);
    Ok(AnalyticSpectrum::from_s(sigma, (0..=n_max).map(|n| first + n as f64).collect(), Regime::K0ChiLimit))
}

fn check_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps >= 0.0 {
        Ok(())
    } else {
        Err(SpectraError::InvalidParams(format!("eps must be finite and >= 0, got {eps}")))
    }
}

/// Terminating `F(alpha, beta; gamma; (1 - x)/2)` with `alpha = -n`, as a
/// polynomial in `x`.
///
/// The term ratio in `z` gives the leading coefficient; the rest follow from
/// the hypergeometric equation written in `x`,
/// `(1 - x^2) F'' + (alpha + beta + 1 - 2 gamma - (alpha + beta + 1) x) F' - alpha beta F = 0`,
/// solved downward. Expanding the powers of `z` directly cancels badly.
fn terminating_hypergeometric(n: usize, beta: f64, gamma: f64) -> Polynomial {
    let alpha = -(n as f64);
    let mut term = 1.0;
    for j in 0..n {
        let jf = j as f64;
        term *= (alpha + jf) * (beta + jf) / ((gamma + jf) * (jf + 1.0));
    }
    let a = alpha + beta + 1.0 - 2.0 * gamma;
    let mut f = vec![0.0; n + 3];
    f[n] = term * (-0.5f64).powi(n as i32);
    for j in (0..n).rev() {
        let jf = j as f64;
        f[j] = ((jf + 2.0) * (jf + 1.0) * f[j + 2] + a * (jf + 1.0) * f[j + 1]) / ((jf + alpha) * (jf + beta));
    }
    Polynomial::new(f)
}

/// `F_n(x) = F(-n, n + 1 + 2 sigma; 1 + sigma; (1 - x)/2)`.
pub fn hypergeom_truncated(n: usize, sigma: f64) -> Result<Polynomial> {
    if !(sigma > -1.0) {
        return Err(SpectraError::InvalidParams(format!("sigma must exceed -1, got {sigma}")));
    }
    Ok(terminating_hypergeometric(n, n as f64 + 1.0 + 2.0 * sigma, 1.0 + sigma))
}

/// `F(-n, n + 1; 1 + sigma; (1 - x)/2)`; equals `P_n` at `sigma = 0`.
pub fn k0_truncated(n: usize, sigma: f64) -> Result<Polynomial> {
    if !(sigma >= 0.0) {
        return Err(SpectraError::InvalidParams(format!("sigma must be >= 0, got {sigma}")));
    }
    Ok(terminating_hypergeometric(n, n as f64 + 1.0, 1.0 + sigma))
}

/// Full-sphere vorticity eigenfunction
/// `((1 - x)/(1 + x))^(eps/4) (1 - x^2)^(sigma/2) F_n(x)` with `mu = mu_n`.
pub fn phi_k_mode(k: i64, eps: f64, n: usize) -> Result<WeightedPoly> {
    check_eps(eps)?;
    let sigma = sigma_of(k, eps);
    let f = hypergeom_truncated(n, sigma)?;
    Ok(WeightedPoly::new(eps / 4.0 + sigma / 2.0, -eps / 4.0 + sigma / 2.0, f))
}

/// Pointwise value of [`phi_k_mode`] for `|x| < 1`.
pub fn eigenfunction_phi_k(k: i64, eps: f64, n: usize, x: f64) -> Result<C64> {
    if !(x.abs() < 1.0) {
        return Err(SpectraError::InvalidParams(format!("need |x| < 1, got {x}")));
    }
    Ok(C64::new(phi_k_mode(k, eps, n)?.eval(x), 0.0))
}

/// `L_k Phi + eps Phi' - mu Phi` for a weighted polynomial `Phi`.
pub fn vorticity_operator(phi: &WeightedPoly, k: i64, eps: f64, mu: f64) -> WeightedPoly {
    let d = phi.derivative();
    let flux = d.times_w2(1.0).derivative();
    let centrifugal = phi.times_w2(-1.0).scale((k * k) as f64);
    flux.sub(&centrifugal).add(&d.scale(eps)).sub(&phi.scale(mu))
}

/// `((1 - x^2) chi')' - (eps^2 + 4 + 4 eps x)/(4(1 - x^2)) chi - mu chi`.
pub fn chi_operator(chi: &WeightedPoly, eps: f64, mu: f64) -> WeightedPoly {
    let flux = chi.derivative().times_w2(1.0).derivative();
    let potential = chi.times_w2(-1.0).times_poly(&Polynomial::linear((eps * eps + 4.0) / 4.0, eps));
    flux.sub(&potential).sub(&chi.scale(mu))
}

/// The first half of the Darboux pair: `w chi' - (eps + 2x)/(2w) chi`.
pub fn darboux_forward(chi: &WeightedPoly, eps: f64) -> WeightedPoly {
    chi.derivative().times_w2(0.5).sub(&chi.times_poly(&Polynomial::linear(eps / 2.0, 1.0)).times_w2(-0.5))
}

/// The second half: `w phi' + eps/(2w) phi`, which equals `mu chi`.
pub fn darboux_backward(phi: &WeightedPoly, eps: f64) -> WeightedPoly {
    phi.derivative().times_w2(0.5).add(&phi.scale(eps / 2.0).times_w2(-0.5))
}

/// Points on which weighted-polynomial identities are sampled.
pub fn sample_grid() -> Vec<f64> {
    (1..200).map(|i| -0.99 + 0.01 * (i - 1) as f64).filter(|x| x.abs() <= 0.99).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualCheck {
    pub residual: f64,
    /// The reference magnitude vanished; the residual is reported as 0.
    pub degenerate: bool,
}

/// Apply both halves of the Darboux pair to `chi` and compare with
/// `mu chi`: `max |mu chi_hat - mu chi| / max |mu chi|` on [`sample_grid`].
pub fn darboux_residual(chi: &WeightedPoly, eps: f64, mu: f64) -> Result<ResidualCheck> {
    if mu == 0.0 {
        return Err(SpectraError::TrivialEigenvalue(C64::new(0.0, 0.0)));
    }
    let image = darboux_backward(&darboux_forward(chi, eps), eps);
    let grid = sample_grid();
    let reference = grid.iter().map(|&x| (mu * chi.eval(x)).abs()).fold(0.0, f64::max);
    if reference == 0.0 || chi.is_zero() {
        return Ok(ResidualCheck { residual: 0.0, degenerate: true });
    }
    let worst = grid.iter().map(|&x| (image.eval(x) - mu * chi.eval(x)).abs()).fold(0.0, f64::max);
    Ok(ResidualCheck { residual: worst / reference, degenerate: false })
}

/// A full-sphere `chi` eigenfunction with its eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiMode {
    pub s: f64,
    pub mu: f64,
    pub chi: WeightedPoly,
}

/// `eps = 0`: `chi = sqrt(1 - x^2) P_n'(x)`, `mu = -n(n+1)`, `n >= 1`.
pub fn chi_legendre_mode(n: usize) -> Result<ChiMode> {
    if n == 0 {
        return Err(SpectraError::TrivialEigenvalue(C64::new(0.0, 0.0)));
    }
    let s = n as f64;
    Ok(ChiMode { s, mu: -s * (s + 1.0), chi: WeightedPoly::new(0.5, 0.5, Polynomial::legendre(n).derivative()) })
}

fn chi_from_partner(phi: WeightedPoly, eps: f64, s: f64) -> Result<ChiMode> {
    let mu = -s * (s + 1.0);
    if mu == 0.0 {
        return Err(SpectraError::TrivialEigenvalue(C64::new(0.0, 0.0)));
    }
    Ok(ChiMode { s, mu, chi: darboux_backward(&phi, eps).scale(1.0 / mu) })
}

/// Branch `s = eps/2 + n`, obtained from the partner function
/// `(1 - x^2)^(eps/4) F_n(x)` with `sigma = eps/2`.
pub fn chi_shifted_mode(eps: f64, n: usize) -> Result<ChiMode> {
    check_eps(eps)?;
    let sigma = eps / 2.0;
    let phi = WeightedPoly::new(eps / 4.0, eps / 4.0, hypergeom_truncated(n, sigma)?);
    chi_from_partner(phi, eps, sigma + n as f64)
}

/// Branch `s = m >= 1`, obtained from the partner function
/// `((1 - x)/(1 + x))^(eps/4) F~_m(x)`.
pub fn chi_integer_mode(eps: f64, m: usize) -> Result<ChiMode> {
    check_eps(eps)?;
    let phi = WeightedPoly::new(eps / 4.0, -eps / 4.0, k0_truncated(m, eps / 2.0)?);
    chi_from_partner(phi, eps, m as f64)
}

/// Composite Gauss-Legendre rule: 32 nodes on each of 8 subintervals.
pub fn composite_gauss<F: FnMut(f64) -> f64>(a: f64, b: f64, mut f: F) -> f64 {
    let rule = GaussLegendre::new(NonZeroUsize::new(32).expect("nonzero"));
    let h = (b - a) / 8.0;
    (0..8).map(|i| rule.integrate(a + i as f64 * h, a + (i + 1) as f64 * h, &mut f)).sum()
}

/// Green's identity `mu = -(Phi, Phi) / ||Psi||_H^2` for a real root of the
/// truncated problem at `eps = 0`, `k != 0`, with
/// `||Psi||_H^2 = int (1 - x^2)|Psi'|^2 + k^2 |Psi|^2 / (1 - x^2)`.
///
/// Returns `|mu + (Phi, Phi)/||Psi||^2| / |mu|`.
pub fn green_identity_residual(params: &SpectralParams, s: f64) -> Result<ResidualCheck> {
    if params.eps != 0.0 || params.k == 0 {
        return Err(SpectraError::InvalidParams("Green's identity check needs eps = 0 and k != 0".into()));
    }
    let sc = C64::new(s, 0.0);
    let matrix = boundary::assemble_k(params, sc)?;
    let v = matrix.null_vector();
    let coeffs = series::coeffs_k(params, sc, [v[0], v[1], v[2], v[3]])?;
    let k2 = params.k2();
    let x0 = params.x0;
    let phi2 = composite_gauss(-x0, x0, |x| coeffs.eval(Field::Phi, x).0.norm_sqr());
    let energy = composite_gauss(-x0, x0, |x| {
        let (psi, dpsi) = coeffs.eval(Field::Psi, x);
        let w2 = 1.0 - x * x;
        w2 * dpsi.norm_sqr() + k2 * psi.norm_sqr() / w2
    });
    let mu = -s * (s + 1.0);
    if energy == 0.0 || !energy.is_finite() {
        return Ok(ResidualCheck { residual: 0.0, degenerate: true });
    }
    Ok(ResidualCheck { residual: (mu + phi2 / energy).abs() / mu.abs(), degenerate: false })
}
