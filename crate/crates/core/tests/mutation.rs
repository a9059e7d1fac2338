//! A corrupted vorticity recurrence must be rejected by the oracle
//! equivalence check.

use num_complex::Complex64;
use sphere_spectra::error::Result;
use sphere_spectra::params::{RootSource, SpectralParams};
use sphere_spectra::rootfind::{scan_real_roots, ScanConfig, ScanOutcome};
use sphere_spectra::verify::{determinant_from_vorticity, equivalence_matrix, oracle_equivalence_case};

type C64 = Complex64;

#[derive(Clone, Copy)]
enum Mutation {
    None,
    CouplingSign,
    LagSign,
}

fn vorticity(p: &SpectralParams, s: C64, a0: C64, b0: C64, mutation: Mutation) -> (Vec<C64>, Vec<C64>) {
    let k2 = (p.k * p.k) as f64;
    let eps = p.eps;
    let ss = s * (s + 1.0);
    let (coupling, lag) = match mutation {
        Mutation::None => (1.0, 1.0),
        Mutation::CouplingSign => (-1.0, 1.0),
        Mutation::LagSign => (1.0, -1.0),
    };
    let mut a = vec![C64::new(0.0, 0.0); p.m + 1];
    let mut b = vec![C64::new(0.0, 0.0); p.m + 1];
    a[0] = a0;
    b[0] = b0;
    a[1] = ((k2 - ss) * a0 - eps * b0) / 2.0;
    b[1] = ((k2 + 2.0 - ss) * b0 - 2.0 * eps * a[1]) / 6.0;
    for m in 0..p.m - 1 {
        let mf = m as f64;
        let (e1, e2) = (2.0 * mf + 2.0, 2.0 * mf + 3.0);
        a[m + 2] = ((k2 - ss + 2.0 * e1 * e1) * a[m + 1] + lag * (ss - 2.0 * mf * (2.0 * mf + 1.0)) * a[m]
            - coupling * eps * e2 * b[m + 1]
            + eps * (2.0 * mf + 1.0) * b[m])
            / ((2.0 * mf + 4.0) * e2);
        b[m + 2] = ((k2 - ss + 2.0 * e2 * e2) * b[m + 1] + (ss - e1 * (2.0 * mf + 1.0)) * b[m] - eps * (2.0 * mf + 4.0) * a[m + 2]
            + eps * e1 * a[m + 1])
            / ((2.0 * mf + 5.0) * (2.0 * mf + 4.0));
    }
    (a, b)
}

fn roots_with(mutation: Mutation) -> impl Fn(&SpectralParams, &ScanConfig) -> Result<ScanOutcome> + Sync {
    move |p, cfg| {
        let det = |s: f64| {
            let s = C64::new(s, 0.0);
            determinant_from_vorticity(p, s, |a0, b0| Ok(vorticity(p, s, a0, b0, mutation)))
        };
        let reference = det(0.5 * (cfg.s_min + cfg.s_max))?.log_scale;
        scan_real_roots(|s| Ok(det(s)?.rescaled(reference).re), cfg, RootSource::Series)
    }
}

fn failures(mutation: Mutation) -> usize {
    let f = roots_with(mutation);
    equivalence_matrix().iter().filter(|p| p.k != 0).filter(|p| !oracle_equivalence_case(p, &f).passed).count()
}

#[test]
fn faithful_copy_passes() {
    assert_eq!(failures(Mutation::None), 0);
}

#[test]
fn flipped_coupling_sign_is_caught() {
    assert!(failures(Mutation::CouplingSign) > 0);
}

#[test]
fn flipped_lag_sign_is_caught() {
    assert!(failures(Mutation::LagSign) > 0);
}
