//! Self-check suite behind `sphere-spectra verify`.
//!
//! Checks are grouped so that cheap subsets can be run alone. Every check
//! reports the measured quantity next to its tolerance.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{self, Polynomial};
use crate::boundary::{self, assemble_k, det_f, determinant};
use crate::error::{Result, SpectraError};
use crate::oracle::{self, ShootConfig};
use crate::params::SpectralParams;
use crate::rootfind::{self, ScanConfig, ScanOutcome};
use crate::series::{self, Seeds, SeriesCoefficients};

type C64 = Complex64;

/// Largest allowed disagreement between series and oracle roots.
pub const ORACLE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckGroup {
    Series,
    Boundary,
    Analytic,
    Oracle,
    Green,
    Darboux,
}

impl CheckGroup {
    pub const ALL: [CheckGroup; 6] =
        [CheckGroup::Series, CheckGroup::Boundary, CheckGroup::Analytic, CheckGroup::Oracle, CheckGroup::Green, CheckGroup::Darboux];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckGroup::Series => "series",
            CheckGroup::Boundary => "boundary",
            CheckGroup::Analytic => "analytic",
            CheckGroup::Oracle => "oracle",
            CheckGroup::Green => "green",
            CheckGroup::Darboux => "darboux",
        }
    }
}

impl fmt::Display for CheckGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckGroup {
    type Err = SpectraError;
    fn from_str(s: &str) -> Result<Self> {
        CheckGroup::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| SpectraError::InvalidParams(format!("unknown check group '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub group: CheckGroup,
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    fn new(group: CheckGroup, name: impl Into<String>, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self { group, name: name.into(), passed: measured <= tolerance, measured, tolerance, detail: detail.into() }
    }

    fn failed(group: CheckGroup, name: impl Into<String>, err: &SpectraError) -> Self {
        Self { group, name: name.into(), passed: false, measured: f64::NAN, tolerance: 0.0, detail: err.to_string() }
    }

    fn from_result(group: CheckGroup, name: &str, r: Result<Check>) -> Check {
        r.unwrap_or_else(|e| Check::failed(group, name, &e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub passed: bool,
    pub groups: Vec<CheckGroup>,
    pub checks: Vec<Check>,
    pub elapsed_seconds: f64,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Run the selected groups (all of them when `groups` is empty).
pub fn run(groups: &[CheckGroup]) -> Report {
    let start = Instant::now();
    let groups: Vec<CheckGroup> = if groups.is_empty() { CheckGroup::ALL.to_vec() } else { groups.to_vec() };
    let mut checks = Vec::new();
    for g in &groups {
        checks.extend(match g {
            CheckGroup::Series => series_checks(),
            CheckGroup::Boundary => boundary_checks(),
            CheckGroup::Analytic => analytic_checks(),
            CheckGroup::Oracle => oracle_checks(),
            CheckGroup::Green => green_checks(),
            CheckGroup::Darboux => darboux_checks(),
        });
    }
    Report { passed: checks.iter().all(|c| c.passed), groups, checks, elapsed_seconds: start.elapsed().as_secs_f64() }
}

fn rel(a: C64, b: C64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

fn max_coeff(c: &SeriesCoefficients) -> f64 {
    [&c.a, &c.b, &c.c, &c.d].iter().flat_map(|v| v.iter()).fold(0.0, |m, z| m.max(z.norm()))
}

fn coeff_diff(x: &SeriesCoefficients, y: &SeriesCoefficients) -> f64 {
    [(&x.a, &y.a), (&x.b, &y.b), (&x.c, &y.c), (&x.d, &y.d)]
        .iter()
        .flat_map(|(u, v)| u.iter().zip(v.iter()))
        .fold(0.0, |m, (p, q)| m.max((p - q).norm()))
}

const SAMPLE_S: [(f64, f64); 4] = [(0.7, 0.0), (2.3, 0.4), (4.1, -1.2), (6.5, 0.0)];

fn series_checks() -> Vec<Check> {
    let g = CheckGroup::Series;
    let seeds = [C64::new(1.0, 0.0), C64::new(-0.5, 0.0), C64::new(0.3, 0.0), C64::new(2.0, 0.0)];
    let mut out = Vec::new();
    out.push(Check::from_result(
        g,
        "s <-> -1-s symmetry of coefficients",
        (|| {
            let mut worst: f64 = 0.0;
            for k in 1..4 {
                let p = SpectralParams::new(k, 1.5, 0.9, 150)?;
                for (re, im) in SAMPLE_S {
                    let s = C64::new(re, im);
                    let x = series::coeffs_k(&p, s, seeds)?;
                    let y = series::coeffs_k(&p, -1.0 - s, seeds)?;
                    worst = worst.max(coeff_diff(&x, &y) / max_coeff(&x));
                }
            }
            Ok(Check::new(g, "s <-> -1-s symmetry of coefficients", worst, 1e-13, "relative to largest coefficient"))
        })(),
    ));
    out.push(Check::from_result(
        g,
        "k <-> -k symmetry of coefficients",
        (|| {
            let mut worst: f64 = 0.0;
            for k in 1..4 {
                for (re, im) in SAMPLE_S {
                    let s = C64::new(re, im);
                    let x = series::coeffs_k(&SpectralParams::new(k, 2.0, 0.9, 150)?, s, seeds)?;
                    let y = series::coeffs_k(&SpectralParams::new(-k, 2.0, 0.9, 150)?, s, seeds)?;
                    worst = worst.max(coeff_diff(&x, &y));
                }
            }
            Ok(Check::new(g, "k <-> -k symmetry of coefficients", worst, 0.0, "exact"))
        })(),
    ));
    out.push(Check::from_result(
        g,
        "series solves the differential equations",
        (|| {
            let mut worst: f64 = 0.0;
            for (k, eps) in [(0, 1.0), (1, 0.0), (2, 3.0), (3, 1.0)] {
                let p = SpectralParams::new(k, eps, 0.9, 150)?;
                let s = C64::new(2.3, 0.4);
                let c = if k == 0 { series::coeffs_k0(&p, s, seeds[0], seeds[3])? } else { series::coeffs_k(&p, s, seeds)? };
                for x in [0.1, 0.3, 0.5] {
                    let (r1, r2) = series::equation_residuals(&p, s, &c, x);
                    worst = worst.max(r1.norm()).max(r2.norm());
                }
            }
            Ok(Check::new(g, "series solves the differential equations", worst, 1e-8, "x = 0.1, 0.3, 0.5; M = 150"))
        })(),
    ));
    out
}

/// Reference matrix for `k = 1, eps = 0, x0 = 0.9, M = 150, s = 3/2`, summed
/// in exact rational arithmetic.
const EXACT_A1: [[f64; 4]; 4] = [
    [0.7753621461361668, 0.0, 2.294157338705614, 0.0],
    [0.0, 0.3552985407109504, 0.0, 2.294157338705614],
    [4.367558738760528, 0.0, 9.780354970270196, 0.0],
    [0.0, 2.7492170835280527, 0.0, 12.074512308975809],
];

fn boundary_checks() -> Vec<Check> {
    let g = CheckGroup::Boundary;
    let mut out = Vec::new();
    out.push(Check::from_result(
        g,
        "F(s) = F(-1-s)",
        (|| {
            let mut worst: f64 = 0.0;
            for (k, eps) in [(0, 1.0), (1, 0.0), (2, 4.0), (3, 1.0)] {
                let p = SpectralParams::new(k, eps, 0.9, 150)?;
                for (re, im) in SAMPLE_S {
                    let s = C64::new(re, im);
                    worst = worst.max(rel(determinant(&p, s)?.rescaled(0.0), determinant(&p, -1.0 - s)?.rescaled(0.0)));
                }
            }
            Ok(Check::new(g, "F(s) = F(-1-s)", worst, 1e-12, "relative"))
        })(),
    ));
    out.push(Check::from_result(
        g,
        "F_k = F_-k",
        (|| {
            let mut worst: f64 = 0.0;
            for k in 1..4 {
                for (re, im) in SAMPLE_S {
                    let s = C64::new(re, im);
                    let a = determinant(&SpectralParams::new(k, 1.0, 0.9, 150)?, s)?.rescaled(0.0);
                    let b = determinant(&SpectralParams::new(-k, 1.0, 0.9, 150)?, s)?.rescaled(0.0);
                    worst = worst.max(rel(a, b));
                }
            }
            Ok(Check::new(g, "F_k = F_-k", worst, 0.0, "exact"))
        })(),
    ));
    out.push(Check::from_result(
        g,
        "parity block factorization at eps = 0",
        (|| {
            let mut worst: f64 = 0.0;
            for k in 1..4 {
                let p = SpectralParams::new(k, 0.0, 0.9, 150)?;
                for (re, im) in SAMPLE_S {
                    let s = C64::new(re, im);
                    let m = assemble_k(&p, s)?;
                    let block = |r: [usize; 2]| m.get(r[0], r[0]) * m.get(r[1], r[1]) - m.get(r[0], r[1]) * m.get(r[1], r[0]);
                    worst = worst.max(rel(det_f(&m)?.rescaled(0.0), block([0, 2]) * block([1, 3])));
                }
            }
            Ok(Check::new(g, "parity block factorization at eps = 0", worst, 1e-10, "relative"))
        })(),
    ));
    out.push(Check::from_result(
        g,
        "matrix matches exact rational reference",
        (|| {
            let p = SpectralParams::new(1, 0.0, 0.9, 150)?;
            let m = assemble_k(&p, C64::new(1.5, 0.0))?;
            let mut worst: f64 = 0.0;
            for (i, row) in EXACT_A1.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    worst = worst.max((m.get(i, j) - v).norm() / 12.074512308975809);
                }
            }
            Ok(Check::new(g, "matrix matches exact rational reference", worst, 1e-12, "k = 1, s = 3/2, x0 = 0.9"))
        })(),
    ));
    out
}

/// Explicit `F_n` for `n <= 3`.
pub fn explicit_f(n: usize, sigma: f64) -> Polynomial {
    let d = 2.0 * (1.0 + sigma);
    match n {
        0 => Polynomial::constant(1.0),
        1 => Polynomial::linear(0.0, 1.0),
        2 => Polynomial::new(vec![-1.0 / d, 0.0, (2.0 * sigma + 3.0) / d]),
        3 => Polynomial::new(vec![0.0, -3.0 / d, 0.0, (5.0 + 2.0 * sigma) / d]),
        _ => panic!("explicit list stops at n = 3"),
    }
}

/// Explicit `F~_n` for `n <= 3`.
pub fn explicit_f_tilde(n: usize, sigma: f64) -> Polynomial {
    let (s1, s2, s3) = (1.0 + sigma, 2.0 + sigma, 3.0 + sigma);
    match n {
        0 => Polynomial::constant(1.0),
        1 => Polynomial::new(vec![sigma / s1, 1.0 / s1]),
        2 => Polynomial::new(vec![sigma * sigma - 1.0, 3.0 * sigma, 3.0]).scale(1.0 / (s1 * s2)),
        3 => {
            Polynomial::new(vec![sigma * (sigma * sigma - 4.0), 6.0 * sigma * sigma - 9.0, 15.0 * sigma, 15.0]).scale(1.0 / (s1 * s2 * s3))
        }
        _ => panic!("explicit list stops at n = 3"),
    }
}

/// Worst deviation of the analytic spectra from `mu_n = -(sigma+n)(sigma+n+1)`,
/// `k = 1..5`, `eps` in `{0, 3}`, `n <= 20`, relative to `|mu_n|`.
pub fn full_sphere_spectrum_error() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 1..=5i64 {
        for eps in [0.0, 3.0] {
            let sp = analytic::spectrum_full_sphere_k(k, eps, 20)?;
            let sigma = ((k * k) as f64 + eps * eps / 4.0).sqrt();
            for (n, mu) in sp.mu_values.iter().enumerate() {
                let want = -(sigma + n as f64) * (sigma + n as f64 + 1.0);
                worst = worst.max((mu - want).abs() / want.abs());
            }
        }
    }
    Ok(worst)
}

/// Worst coefficient deviation of the constructors from the explicit lists.
pub fn polynomial_list_error() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for sigma in [0.0, 0.5, 1.0, 2.5, 7.0] {
        for n in 0..4 {
            worst = worst.max(analytic::hypergeom_truncated(n, sigma)?.max_coeff_diff(&explicit_f(n, sigma)));
            worst = worst.max(analytic::k0_truncated(n, sigma)?.max_coeff_diff(&explicit_f_tilde(n, sigma)));
        }
    }
    Ok(worst)
}

fn analytic_checks() -> Vec<Check> {
    let g = CheckGroup::Analytic;
    let mut out = Vec::new();
    out.push(Check::from_result(
        g,
        "full-sphere spectrum k != 0",
        full_sphere_spectrum_error()
            .map(|e| Check::new(g, "full-sphere spectrum k != 0", e, 4.0 * f64::EPSILON, "k = 1..5, eps in {0, 3}")),
    ));
    out.push(Check::from_result(
        g,
        "F_n and F~_n explicit lists",
        polynomial_list_error().map(|e| Check::new(g, "F_n and F~_n explicit lists", e, 1e-12, "n <= 3")),
    ));
    out.push(Check::from_result(
        g,
        "F~_n(sigma = 0) = P_n",
        (|| {
            let mut worst: f64 = 0.0;
            for n in 0..16 {
                let p = Polynomial::legendre(n);
                let scale = p.coefficients().iter().fold(0.0f64, |m, v| m.max(v.abs()));
                worst = worst.max(analytic::k0_truncated(n, 0.0)?.max_coeff_diff(&p) / scale);
            }
            Ok(Check::new(g, "F~_n(sigma = 0) = P_n", worst, 1e-14, "relative to largest coefficient"))
        })(),
    ));
    out.push(Check::from_result(
        g,
        "eigenfunctions solve the vorticity equation",
        (|| {
            let xs: Vec<f64> = (0..20).map(|i| -0.95 + 0.1 * i as f64).collect();
            let mut worst: f64 = 0.0;
            for (k, eps) in [(1, 0.0), (2, 0.0), (1, 2.0), (3, 3.0)] {
                let sigma = analytic::sigma_of(k, eps);
                for n in 0..5 {
                    let phi = analytic::phi_k_mode(k, eps, n)?;
                    let s = sigma + n as f64;
                    let res = analytic::vorticity_operator(&phi, k, eps, -s * (s + 1.0));
                    let scale = xs.iter().map(|&x| phi.eval(x).abs()).fold(0.0, f64::max);
                    worst = worst.max(xs.iter().map(|&x| res.eval(x).abs()).fold(0.0, f64::max) / scale);
                }
            }
            Ok(Check::new(g, "eigenfunctions solve the vorticity equation", worst, 1e-10, "20 sample points"))
        })(),
    ));
    out.push(Check::from_result(
        g,
        "k = 0 spectra and chi limits",
        (|| {
            let mut bad = 0.0;
            if !analytic::spectrum_full_sphere_k0(2.0, 5)?.empty_nontrivial {
                bad += 1.0;
            }
            if analytic::spectrum_full_sphere_k0(1.0, 3)?.mu_values != vec![0.0, -2.0, -6.0, -12.0] {
                bad += 1.0;
            }
            if analytic::spectrum_chi_limit(1.0, 2)?.s_values != vec![1.0, 2.0, 3.0] {
                bad += 1.0;
            }
            if analytic::spectrum_chi_limit(4.0, 2)?.s_values != vec![2.0, 3.0, 4.0] {
                bad += 1.0;
            }
            Ok(Check::new(g, "k = 0 spectra and chi limits", bad, 0.0, "number of mismatches"))
        })(),
    ));
    out
}

/// The series root finder used by the equivalence check.
pub type SeriesRootFn<'a> = dyn Fn(&SpectralParams, &ScanConfig) -> Result<ScanOutcome> + Sync + 'a;

/// Parameter matrix of the oracle-equivalence check.
pub fn equivalence_matrix() -> Vec<SpectralParams> {
    let mut v = Vec::new();
    for k in 0..4i64 {
        for eps in [0.0, 1.0, 4.0] {
            for x0 in [0.5, 0.9] {
                let m = if k == 0 { 100 } else { 150 };
                v.push(SpectralParams::new(k, eps, x0, m).expect("valid matrix entry"));
            }
        }
    }
    v
}

/// Compare series and oracle roots on `[0, 8]` for one parameter set:
/// same count and pairwise `|ds| < ORACLE_TOL`.
pub fn oracle_equivalence_case(params: &SpectralParams, series_roots: &SeriesRootFn) -> Check {
    let g = CheckGroup::Oracle;
    let name = format!("oracle equivalence k={} eps={} x0={}", params.k, params.eps, params.x0);
    let scan = ScanConfig { s_min: 0.0, s_max: 8.0, ..Default::default() };
    let run = || -> Result<Check> {
        let a = series_roots(params, &scan)?.values();
        let b = oracle::system_roots(params, &scan, &ShootConfig::default())?.values();
        if a.len() != b.len() {
            return Ok(Check {
                group: g,
                name: name.clone(),
                passed: false,
                measured: f64::INFINITY,
                tolerance: ORACLE_TOL,
                detail: format!("series {a:?} vs oracle {b:?}"),
            });
        }
        let worst = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        Ok(Check::new(g, name.clone(), worst, ORACLE_TOL, format!("{} roots", a.len())))
    };
    Check::from_result(g, &name, run())
}

/// The full equivalence matrix, run in parallel.
pub fn oracle_equivalence(series_roots: &SeriesRootFn) -> Vec<Check> {
    equivalence_matrix().par_iter().map(|p| oracle_equivalence_case(p, series_roots)).collect()
}

fn oracle_checks() -> Vec<Check> {
    let g = CheckGroup::Oracle;
    let mut out = oracle_equivalence(&|p, s| rootfind::series_roots(p, s));
    out.push(Check::from_result(
        g,
        "oracle roots stable under step halving",
        (|| {
            let scan = ScanConfig { s_min: 0.0, s_max: 6.0, ..Default::default() };
            let mut worst: f64 = 0.0;
            for (k, eps, x0) in [(1, 0.0, 0.9), (0, 1.0, 0.95), (2, 4.0, 0.9)] {
                let p = SpectralParams::new(k, eps, x0, 150)?;
                let a = oracle::system_roots(&p, &scan, &ShootConfig { steps: 2000, richardson: false })?.values();
                let b = oracle::system_roots(&p, &scan, &ShootConfig { steps: 4000, richardson: false })?.values();
                if a.len() != b.len() {
                    return Ok(Check::new(g, "oracle roots stable under step halving", f64::INFINITY, 1e-8, "root count changed"));
                }
                worst = a.iter().zip(&b).fold(worst, |m, (x, y)| m.max((x - y).abs()));
            }
            Ok(Check::new(g, "oracle roots stable under step halving", worst, 1e-8, "2000 vs 4000 steps"))
        })(),
    ));
    out.push(Check::from_result(
        g,
        "k = 0 roots have negative mu",
        (|| {
            let scan = ScanConfig { s_min: -0.5, s_max: 8.0, ..Default::default() };
            let mut positive = 0.0;
            for eps in [1.0, 4.0] {
                for x0 in [0.5, 0.9] {
                    let p = SpectralParams::new(0, eps, x0, 100)?;
                    for r in rootfind::series_roots(&p, &scan)?.roots {
                        if r.mu().re >= 0.0 {
                            positive += 1.0;
                        }
                    }
                }
            }
            Ok(Check::new(g, "k = 0 roots have negative mu", positive, 0.0, "count of roots with mu >= 0"))
        })(),
    ));
    out
}

/// Green's-identity residual at the first real root for `eps = 0`.
pub fn green_first_root(k: i64, x0: f64) -> Result<f64> {
    let p = SpectralParams::new(k, 0.0, x0, 150)?;
    let roots = rootfind::series_roots(&p, &ScanConfig { s_min: 0.0, s_max: 8.0, ..Default::default() })?;
    let first = roots.roots.first().ok_or(SpectraError::InvalidParams(format!("no root for k = {k}")))?;
    let r = analytic::green_identity_residual(&p, first.s().re)?;
    if r.degenerate {
        return Err(SpectraError::InvalidParams("degenerate eigenfunction".into()));
    }
    Ok(r.residual)
}

fn green_checks() -> Vec<Check> {
    let g = CheckGroup::Green;
    [1, 3]
        .into_iter()
        .map(|k| {
            let name = format!("Green identity at first root, k={k}, x0=0.9");
            Check::from_result(g, &name, green_first_root(k, 0.9).map(|r| Check::new(g, name.clone(), r, 1e-4, "")))
        })
        .collect()
}

/// Darboux-pair residuals of the constructed `chi` modes.
pub fn darboux_residuals() -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for n in 1..4 {
        let m = analytic::chi_legendre_mode(n)?;
        out.push((format!("eps=0 Legendre mode n={n}"), analytic::darboux_residual(&m.chi, 0.0, m.mu)?.residual));
    }
    for n in 0..3 {
        let m = analytic::chi_shifted_mode(4.0, n)?;
        out.push((format!("eps=4 mode s={}", m.s), analytic::darboux_residual(&m.chi, 4.0, m.mu)?.residual));
    }
    for n in 1..3 {
        let m = analytic::chi_integer_mode(1.0, n)?;
        out.push((format!("eps=1 mode s={}", m.s), analytic::darboux_residual(&m.chi, 1.0, m.mu)?.residual));
    }
    Ok(out)
}

fn darboux_checks() -> Vec<Check> {
    let g = CheckGroup::Darboux;
    match darboux_residuals() {
        Ok(v) => v.into_iter().map(|(name, r)| Check::new(g, format!("Darboux pair, {name}"), r, 1e-10, "")).collect(),
        Err(e) => vec![Check::failed(g, "Darboux pair", &e)],
    }
}

/// Build `F_k` from externally supplied vorticity coefficients; used to
/// check that a corrupted recurrence is caught by the equivalence check.
pub fn determinant_from_vorticity<V>(params: &SpectralParams, s: C64, vorticity: V) -> Result<boundary::Determinant>
where
    V: Fn(C64, C64) -> Result<(Vec<C64>, Vec<C64>)>,
{
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut columns = Vec::with_capacity(4);
    for j in 0..4 {
        let mut seeds = [zero; 4];
        seeds[j] = one;
        let (a, b) = vorticity(seeds[0], seeds[1])?;
        let (c, d) = series::stream_k(params, &a, &b, seeds[2], seeds[3])?;
        let coeffs = SeriesCoefficients { a, b, c, d, seeds: Seeds::NonZeroK(seeds) };
        columns.push(boundary::functionals_k(&coeffs, params.x0).to_vec());
    }
    det_f(&boundary::BoundaryMatrix::from_columns(*params, s, &columns))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_names_round_trip() {
        for g in CheckGroup::ALL {
            assert_eq!(g.as_str().parse::<CheckGroup>().unwrap(), g);
        }
        assert!("bogus".parse::<CheckGroup>().is_err());
    }

    #[test]
    fn cheap_groups_pass() {
        let r = run(&[CheckGroup::Analytic, CheckGroup::Darboux, CheckGroup::Series, CheckGroup::Boundary]);
        for c in &r.checks {
            assert!(c.passed, "{c:?}");
        }
        assert!(r.passed);
        assert!(r.checks.iter().all(|c| c.group != CheckGroup::Oracle));
    }

    #[test]
    fn explicit_lists_agree_at_sample_sigma() {
        assert!(polynomial_list_error().unwrap() < 1e-12);
        assert!(full_sphere_spectrum_error().unwrap() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn vorticity_injection_reproduces_determinant() {
        let p = SpectralParams::new(2, 1.0, 0.9, 150).unwrap();
        let s = C64::new(2.2, 0.0);
        let d1 = determinant(&p, s).unwrap();
        let d2 = determinant_from_vorticity(&p, s, |a0, b0| series::vorticity_k(&p, s, a0, b0)).unwrap();
        assert_eq!(d1, d2);
    }
}
