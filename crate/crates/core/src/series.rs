//! Truncated power series for the vorticity `Phi` and stream function `Psi`.
//!
//! Both are expanded about the ordinary point `x = 0` with separated parity:
//!
//! ```text
//! Psi(x) = sum c_m x^(2m) + sum d_m x^(2m+1)
//! Phi(x) = sum a_m x^(2m) + sum b_m x^(2m+1)
//! ```
//!
//! For `k != 0` the four seeds `(a0, b0, c0, d0)` are free. For `k = 0` the
//! second equation of the system pins `b0 = -eps a0 - s(s+1) d0`, the additive
//! constant `c0` is set to zero and `(a0, d0)` remain free.
//!
//! All sequences have length `M + 1`; `s` enters only through `s (s + 1)`.

use num_complex::Complex64;

use crate::error::{Result, SpectraError};
use crate::params::SpectralParams;

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Seeds {
    /// `(a0, b0, c0, d0)` for `k != 0`.
    NonZeroK([C64; 4]),
    /// `(a0, d0)` for `k = 0`.
    ZeroK([C64; 2]),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCoefficients {
    pub a: Vec<C64>,
    pub b: Vec<C64>,
    pub c: Vec<C64>,
    pub d: Vec<C64>,
    pub seeds: Seeds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Psi,
    Phi,
}

/// Magnitudes of the last retained even and odd terms at `x0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTail {
    pub tail_phi: f64,
    pub tail_psi: f64,
}

fn require_k(params: &SpectralParams, nonzero: bool) -> Result<()> {
    match (nonzero, params.k == 0) {
        (true, true) => Err(SpectraError::InvalidParams("this recurrence requires k != 0".into())),
        (false, false) => Err(SpectraError::InvalidParams("this recurrence requires k = 0".into())),
        _ => Ok(()),
    }
}

/// Vorticity coefficients `(a, b)` for `k != 0`.
///
/// `a_{m+2}` is computed before `b_{m+2}` because the odd recurrence uses it.
pub fn vorticity_k(params: &SpectralParams, s: C64, a0: C64, b0: C64) -> Result<(Vec<C64>, Vec<C64>)> {
    require_k(params, true)?;
    let m_max = params.m;
    let k2 = params.k2();
    let eps = params.eps;
    let ss = s * (s + 1.0);

    let mut a = vec![C64::new(0.0, 0.0); m_max + 1];
    let mut b = vec![C64::new(0.0, 0.0); m_max + 1];
    a[0] = a0;
    b[0] = b0;
    a[1] = ((k2 - ss) * a0 - eps * b0) / 2.0;
    b[1] = ((k2 + 2.0 - ss) * b0 - 2.0 * eps * a[1]) / 6.0;

    for m in 0..m_max.saturating_sub(1) {
        let mf = m as f64;
        let (e1, e2) = (2.0 * mf + 2.0, 2.0 * mf + 3.0);
        a[m + 2] = ((k2 - ss + 2.0 * e1 * e1) * a[m + 1] + (ss - 2.0 * mf * (2.0 * mf + 1.0)) * a[m] - eps * e2 * b[m + 1]
            + eps * (2.0 * mf + 1.0) * b[m])
            / ((2.0 * mf + 4.0) * e2);
        b[m + 2] = ((k2 - ss + 2.0 * e2 * e2) * b[m + 1] + (ss - e1 * (2.0 * mf + 1.0)) * b[m] - eps * (2.0 * mf + 4.0) * a[m + 2]
            + eps * e1 * a[m + 1])
            / ((2.0 * mf + 5.0) * (2.0 * mf + 4.0));
    }
    Ok((a, b))
}

/// Stream-function coefficients `(c, d)` for `k != 0`, driven by `(a, b)`.
///
/// The first terms come from the general recurrence at `m = -1` with every
/// index `-1` coefficient set to zero:
/// `c_1 = (k^2 c0 + a0) / 2` and `d_1 = ((k^2 + 2) d0 + b0) / 6`.
pub fn stream_k(params: &SpectralParams, a: &[C64], b: &[C64], c0: C64, d0: C64) -> Result<(Vec<C64>, Vec<C64>)> {
    require_k(params, true)?;
    let m_max = params.m;
    if a.len() < m_max || b.len() < m_max {
        return Err(SpectraError::InvalidParams(format!("vorticity sequences too short: need {m_max}, got {} and {}", a.len(), b.len())));
    }
    let k2 = params.k2();
    let mut c = vec![C64::new(0.0, 0.0); m_max + 1];
    let mut d = vec![C64::new(0.0, 0.0); m_max + 1];
    c[0] = c0;
    d[0] = d0;
    c[1] = (k2 * c0 + a[0]) / 2.0;
    d[1] = ((k2 + 2.0) * d0 + b[0]) / 6.0;
    for m in 0..m_max.saturating_sub(1) {
        let mf = m as f64;
        let (e1, e2) = (2.0 * mf + 2.0, 2.0 * mf + 3.0);
        c[m + 2] = ((k2 + 2.0 * e1 * e1) * c[m + 1] - 2.0 * mf * (2.0 * mf + 1.0) * c[m] + a[m + 1] - a[m]) / ((2.0 * mf + 4.0) * e2);
        d[m + 2] =
            ((k2 + 2.0 * e2 * e2) * d[m + 1] - e1 * (2.0 * mf + 1.0) * d[m] + b[m + 1] - b[m]) / ((2.0 * mf + 5.0) * (2.0 * mf + 4.0));
    }
    Ok((c, d))
}

/// All four sequences for `k != 0` from the seeds `(a0, b0, c0, d0)`.
pub fn coeffs_k(params: &SpectralParams, s: C64, seeds: [C64; 4]) -> Result<SeriesCoefficients> {
    let [a0, b0, c0, d0] = seeds;
    let (a, b) = vorticity_k(params, s, a0, b0)?;
    let (c, d) = stream_k(params, &a, &b, c0, d0)?;
    Ok(SeriesCoefficients { a, b, c, d, seeds: Seeds::NonZeroK(seeds) })
}

/// All four sequences for `k = 0` from the free seeds `(a0, d0)`.
pub fn coeffs_k0(params: &SpectralParams, s: C64, a0: C64, d0: C64) -> Result<SeriesCoefficients> {
    require_k(params, false)?;
    let ss = s * (s + 1.0);
    if ss.norm() == 0.0 {
        return Err(SpectraError::TrivialEigenvalue(s));
    }
    let m_max = params.m;
    let eps = params.eps;
    let zero = C64::new(0.0, 0.0);
    let mut a = vec![zero; m_max + 1];
    let mut b = vec![zero; m_max + 1];
    let mut c = vec![zero; m_max + 1];
    let mut d = vec![zero; m_max + 1];
    a[0] = a0;
    b[0] = -eps * a0 - ss * d0;
    d[0] = d0;

    // (2m - s)(2m + 1 + s) = 2m(2m+1) - s(s+1), and likewise for the odd terms
    for m in 0..m_max {
        let mf = m as f64;
        let even = 2.0 * mf * (2.0 * mf + 1.0);
        let odd = (2.0 * mf + 1.0) * (2.0 * mf + 2.0);
        a[m + 1] = ((even - ss) * a[m] - eps * (2.0 * mf + 1.0) * b[m]) / ((2.0 * mf + 2.0) * (2.0 * mf + 1.0));
        b[m + 1] = ((odd - ss) * b[m] - eps * (2.0 * mf + 2.0) * a[m + 1]) / ((2.0 * mf + 3.0) * (2.0 * mf + 2.0));
        c[m + 1] = (even * c[m] + a[m]) / ((2.0 * mf + 2.0) * (2.0 * mf + 1.0));
        d[m + 1] = (odd * d[m] + b[m]) / ((2.0 * mf + 3.0) * (2.0 * mf + 2.0));
    }
    Ok(SeriesCoefficients { a, b, c, d, seeds: Seeds::ZeroK([a0, d0]) })
}

impl SeriesCoefficients {
    pub fn order(&self) -> usize {
        self.a.len() - 1
    }

    fn parts(&self, field: Field) -> (&[C64], &[C64]) {
        match field {
            Field::Psi => (&self.c, &self.d),
            Field::Phi => (&self.a, &self.b),
        }
    }

    /// Value and first derivative of the truncated series at `x`.
    pub fn eval(&self, field: Field, x: f64) -> (C64, C64) {
        let [v, dv, _] = self.eval_jet(field, x);
        (v, dv)
    }

    /// Value, first and second derivative at `x`.
    ///
    /// Even and odd parts are each summed by Horner's rule in `y = x^2`.
    pub fn eval_jet(&self, field: Field, x: f64) -> [C64; 3] {
        let (even, odd) = self.parts(field);
        let y = x * x;
        let zero = C64::new(0.0, 0.0);
        // E(y), E'(y), E''(y) and O(y), O'(y), O''(y)
        let horner = |coef: &[C64]| {
            let (mut p, mut dp, mut ddp) = (zero, zero, zero);
            for &cm in coef.iter().rev() {
                ddp = ddp * y + 2.0 * dp;
                dp = dp * y + p;
                p = p * y + cm;
            }
            (p, dp, ddp)
        };
        let (e, de, dde) = horner(even);
        let (o, d_o, ddo) = horner(odd);
        // f(x) = E(x^2) + x O(x^2)
        let value = e + x * o;
        let first = 2.0 * x * de + o + 2.0 * y * d_o;
        let second = 2.0 * de + 4.0 * y * dde + 6.0 * x * d_o + 4.0 * x * y * ddo;
        [value, first, second]
    }

    pub fn tail(&self, x0: f64) -> SeriesTail {
        let m = self.order();
        let even = x0.powi(2 * m as i32);
        let odd = even * x0;
        SeriesTail {
            tail_phi: self.a[m].norm() * even + self.b[m].norm() * odd,
            tail_psi: self.c[m].norm() * even + self.d[m].norm() * odd,
        }
    }

    pub fn is_finite(&self) -> bool {
        [&self.a, &self.b, &self.c, &self.d].iter().all(|v| v.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }
}

/// Residuals of the differential system at `x`, for checking a truncated
/// series against the equations it was built from.
///
/// For `k != 0` returns `(L_k Psi - Phi, L_k Phi + eps Phi' - mu Phi)`; for
/// `k = 0` returns `(L_0 Psi - Phi, Phi' + eps Phi / (1 - x^2) - mu Psi')`.
pub fn equation_residuals(params: &SpectralParams, s: C64, coeffs: &SeriesCoefficients, x: f64) -> (C64, C64) {
    let mu = crate::params::mu_of_s(s);
    let w = 1.0 - x * x;
    let [psi, dpsi, ddpsi] = coeffs.eval_jet(Field::Psi, x);
    let [phi, dphi, ddphi] = coeffs.eval_jet(Field::Phi, x);
    let k2 = params.k2();
    let l_psi = w * ddpsi - 2.0 * x * dpsi - k2 * psi / w;
    if params.k != 0 {
        let l_phi = w * ddphi - 2.0 * x * dphi - k2 * phi / w;
        (l_psi - phi, l_phi + params.eps * dphi - mu * phi)
    } else {
        (l_psi - phi, dphi + params.eps * phi / w - mu * dpsi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn p(k: i64, eps: f64, m: usize) -> SpectralParams {
        SpectralParams::new(k, eps, 0.9, m).unwrap()
    }

    #[test]
    fn first_vorticity_terms() {
        let (a, _) = vorticity_k(&p(1, 0.0, 10), c(1.0), c(1.0), c(0.0)).unwrap();
        assert_eq!(a[1], c(-0.5));
        let (a, _) = vorticity_k(&p(2, 1.0, 10), c(0.0), c(1.0), c(2.0)).unwrap();
        assert_eq!(a[1], c(1.0));
    }

    #[test]
    fn zero_seeds_give_zero_sequences() {
        let params = p(3, 2.5, 40);
        let z = coeffs_k(&params, C64::new(0.7, 1.3), [c(0.0); 4]).unwrap();
        assert!(z.a.iter().chain(&z.b).chain(&z.c).chain(&z.d).all(|v| v.norm() == 0.0));
        let z = coeffs_k0(&p(0, 1.0, 40), C64::new(2.0, 0.5), c(0.0), c(0.0)).unwrap();
        assert!(z.a.iter().chain(&z.b).chain(&z.c).chain(&z.d).all(|v| v.norm() == 0.0));
    }

    #[test]
    fn first_stream_terms() {
        let params = p(1, 0.0, 10);
        let (a, b) = vorticity_k(&params, c(1.0), c(0.0), c(0.0)).unwrap();
        let (cc, _) = stream_k(&params, &a, &b, c(1.0), c(0.0)).unwrap();
        assert_eq!(cc[1], c(0.5));

        // hand expansion: a1 = (4 - 6)/2 = -1, c1 = 1/2, c2 = (12 c1 + a1 - a0)/12 = 1/3
        let params = p(2, 0.0, 10);
        let s = coeffs_k(&params, c(2.0), [c(1.0), c(0.0), c(0.0), c(0.0)]).unwrap();
        assert_eq!(s.a[1], c(-1.0));
        assert_eq!(s.c[1], c(0.5));
        assert!((s.c[2] - c(1.0 / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn k0_initial_terms() {
        let s = coeffs_k0(&p(0, 1.0, 10), c(1.0), c(1.0), c(0.0)).unwrap();
        assert_eq!(s.b[0], c(-1.0));
        assert_eq!(s.a[1], c(-0.5));
        assert_eq!(s.c[0], c(0.0));
        assert_eq!(s.c[1], c(0.5));

        let s = coeffs_k0(&p(0, 0.0, 10), c(2.0), c(0.0), c(1.0)).unwrap();
        assert_eq!(s.b[0], c(-6.0));
        assert_eq!(s.b[1], c(4.0));
    }

    #[test]
    fn k0_rejects_trivial_eigenvalue() {
        assert!(matches!(coeffs_k0(&p(0, 1.0, 10), c(0.0), c(1.0), c(0.0)), Err(SpectraError::TrivialEigenvalue(_))));
        assert!(coeffs_k0(&p(0, 1.0, 10), c(-1.0), c(1.0), c(0.0)).is_err());
    }

    #[test]
    fn wrong_k_is_rejected() {
        assert!(vorticity_k(&p(0, 1.0, 10), c(1.0), c(1.0), c(0.0)).is_err());
        assert!(coeffs_k0(&p(1, 1.0, 10), c(1.0), c(1.0), c(0.0)).is_err());
    }

    #[test]
    fn eval_monomials() {
        let zero = vec![c(0.0); 5];
        let mut coeffs =
            SeriesCoefficients { a: zero.clone(), b: zero.clone(), c: zero.clone(), d: zero.clone(), seeds: Seeds::NonZeroK([c(0.0); 4]) };
        coeffs.c[0] = c(1.0);
        assert_eq!(coeffs.eval(Field::Psi, 0.37), (c(1.0), c(0.0)));
        coeffs.c[0] = c(0.0);
        coeffs.c[1] = c(1.0);
        assert_eq!(coeffs.eval(Field::Psi, 0.5), (c(0.25), c(1.0)));
        coeffs.c[1] = c(0.0);
        coeffs.d[0] = c(1.0);
        assert_eq!(coeffs.eval(Field::Psi, 0.9), (c(0.9), c(1.0)));
        // x^5 through the odd part: value, 5x^4, 20x^3
        coeffs.d[0] = c(0.0);
        coeffs.d[2] = c(1.0);
        let [v, d1, d2] = coeffs.eval_jet(Field::Psi, 0.6);
        assert!((v - c(0.6f64.powi(5))).norm() < 1e-15);
        assert!((d1 - c(5.0 * 0.6f64.powi(4))).norm() < 1e-15);
        assert!((d2 - c(20.0 * 0.6f64.powi(3))).norm() < 1e-14);
    }

    #[test]
    fn tail_examples() {
        let zero = vec![c(0.0); 11];
        let mut coeffs =
            SeriesCoefficients { a: zero.clone(), b: zero.clone(), c: zero.clone(), d: zero, seeds: Seeds::NonZeroK([c(0.0); 4]) };
        assert_eq!(coeffs.tail(0.5), SeriesTail { tail_phi: 0.0, tail_psi: 0.0 });
        coeffs.a[10] = c(1.0);
        assert!((coeffs.tail(0.5).tail_phi - 9.5367431640625e-7).abs() < 1e-20);

        let zero = vec![c(0.0); 151];
        let mut coeffs =
            SeriesCoefficients { a: zero.clone(), b: zero.clone(), c: zero.clone(), d: zero, seeds: Seeds::NonZeroK([c(0.0); 4]) };
        coeffs.a[150] = c(1.0);
        // 0.99^300 evaluated in extended precision
        assert!((coeffs.tail(0.99).tail_phi - 0.049040894071285).abs() < 1e-12);
    }

    #[test]
    fn parity_decouples_without_flow() {
        let params = p(2, 0.0, 60);
        let s = C64::new(1.3, 0.4);
        let even = coeffs_k(&params, s, [c(1.0), c(0.0), c(0.7), c(0.0)]).unwrap();
        assert!(even.b.iter().chain(&even.d).all(|v| v.norm() == 0.0));
        let odd = coeffs_k(&params, s, [c(0.0), c(1.0), c(0.0), c(0.3)]).unwrap();
        assert!(odd.a.iter().chain(&odd.c).all(|v| v.norm() == 0.0));
    }

    #[test]
    fn truncated_series_satisfies_the_equations() {
        let s = C64::new(2.3, 0.0);
        for (k, eps) in [(1, 0.0), (3, 2.0), (2, 4.0)] {
            let params = SpectralParams::new(k, eps, 0.9, 150).unwrap();
            let coeffs = coeffs_k(&params, s, [c(1.0), c(-0.5), c(0.25), c(2.0)]).unwrap();
            for x in [0.1, 0.3, 0.5] {
                let (r1, r2) = equation_residuals(&params, s, &coeffs, x);
                assert!(r1.norm() < 1e-8 && r2.norm() < 1e-8, "k={k} eps={eps} x={x}: {r1} {r2}");
            }
        }
        let params = SpectralParams::new(0, 1.0, 0.9, 150).unwrap();
        let coeffs = coeffs_k0(&params, s, c(1.0), c(-0.4)).unwrap();
        for x in [0.1, 0.3, 0.5] {
            let (r1, r2) = equation_residuals(&params, s, &coeffs, x);
            assert!(r1.norm() < 1e-8 && r2.norm() < 1e-8, "k=0 x={x}: {r1} {r2}");
        }
    }

    proptest! {
        #[test]
        fn linear_in_seeds(re in 0.0f64..5.0, im in -2.0f64..2.0, eps in 0.0f64..6.0, k in 1i64..6, alpha in -3.0f64..3.0) {
            let params = SpectralParams::new(k, eps, 0.9, 60).unwrap();
            let s = C64::new(re, im);
            let seeds = [C64::new(0.3, -1.0), c(1.1), C64::new(0.0, 0.5), c(-0.8)];
            let base = coeffs_k(&params, s, seeds).unwrap();
            let scaled = coeffs_k(&params, s, seeds.map(|z| z * alpha)).unwrap();
            for (u, v) in base.a.iter().chain(&base.b).chain(&base.c).chain(&base.d)
                .zip(scaled.a.iter().chain(&scaled.b).chain(&scaled.c).chain(&scaled.d)) {
                prop_assert!((u * alpha - v).norm() <= 1e-12 * (1.0 + v.norm()));
            }
        }

        #[test]
        fn symmetric_under_reflection_and_sign_of_k(re in 0.0f64..5.0, im in -2.0f64..2.0, eps in 0.0f64..6.0, k in 1i64..6) {
            let s = C64::new(re, im);
            let seeds = [c(1.0), c(-0.5), c(0.25), c(2.0)];
            let params = SpectralParams::new(k, eps, 0.9, 60).unwrap();
            let neg = SpectralParams::new(-k, eps, 0.9, 60).unwrap();
            let u = coeffs_k(&params, s, seeds).unwrap();
            let v = coeffs_k(&params, -1.0 - s, seeds).unwrap();
            let w = coeffs_k(&neg, s, seeds).unwrap();
            // s(s+1) and (-1-s)(-s) can differ in the last bit, so compare
            // against the largest coefficient of the run
            let scale = u.a.iter().chain(&u.b).chain(&u.c).chain(&u.d).map(|z| z.norm()).fold(1.0, f64::max);
            for ((x, y), z) in u.a.iter().chain(&u.b).chain(&u.c).chain(&u.d)
                .zip(v.a.iter().chain(&v.b).chain(&v.c).chain(&v.d))
                .zip(w.a.iter().chain(&w.b).chain(&w.c).chain(&w.d)) {
                prop_assert!((x - y).norm() <= 1e-13 * scale);
                prop_assert_eq!(x, z);
            }
        }
    }
}
