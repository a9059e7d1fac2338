use sphere_spectra::cli::run_trace;
use sphere_spectra::oracle::{system_roots, ShootConfig};
use sphere_spectra::params::SpectralParams;
use sphere_spectra::rootfind::{Branch, ScanConfig, SweepParam, TraceConfig};

fn scan(s_min: f64, s_max: f64) -> ScanConfig {
    ScanConfig { s_min, s_max, ..Default::default() }
}

fn assert_descending(branches: &[Branch], min_branches: usize) {
    let full: Vec<&Branch> = branches.iter().filter(|b| !b.is_complex() && b.samples.len() > 3).collect();
    assert!(full.len() >= min_branches, "only {} real branches", full.len());
    for b in full {
        for w in b.samples.windows(2) {
            assert!(w[1].root.s().re < w[0].root.s().re, "branch {} rises at x0 = {}", b.id, w[1].param);
        }
    }
}

#[test]
fn k1_roots_descend_as_the_cap_grows() {
    let p = SpectralParams::new(1, 0.0, 0.3, 150).unwrap();
    let branches = run_trace(&p, &TraceConfig::new(SweepParam::X0, 0.3, 0.99, 0.01, scan(0.0, 12.0))).unwrap();
    assert_descending(&branches, 3);
    let last: Vec<f64> = branches.iter().filter_map(|b| b.samples.last()).filter(|s| s.param > 0.989).map(|s| s.root.s().re).collect();
    assert!(last.len() >= 3 && last.iter().all(|&s| s > 1.0), "{last:?}");
}

#[test]
fn k0_roots_descend_towards_integers() {
    let p = SpectralParams::new(0, 1.0, 0.5, 100).unwrap();
    let branches = run_trace(&p, &TraceConfig::new(SweepParam::X0, 0.5, 0.95, 0.05, scan(0.0, 8.0))).unwrap();
    assert_descending(&branches, 2);
}

#[test]
fn complex_continuation_converges_after_first_merge() {
    let p = SpectralParams::new(1, 0.0, 0.9, 150).unwrap();
    let branches = run_trace(&p, &TraceConfig::new(SweepParam::Eps, 2.0, 4.0, 0.1, scan(0.0, 8.0))).unwrap();
    let event = branches.iter().flat_map(|b| &b.events).next().expect("a coalescence in eps in [2, 4]");
    let root = event.continued.as_ref().expect("continuation succeeded");
    assert!(root.s().im > 0.0);
    assert!(root.residual < 1e-8, "residual {}", root.residual);
    let complex: Vec<&Branch> = branches.iter().filter(|b| b.is_complex()).collect();
    assert!(!complex.is_empty());
    for b in complex {
        assert!(b.samples.iter().all(|s| s.root.residual < 1e-8));
    }
}

#[test]
fn oracle_first_root_near_full_sphere_limit() {
    let p = SpectralParams::new(3, 0.0, 0.99, 150).unwrap();
    let roots = system_roots(&p, &scan(0.0, 5.0), &ShootConfig::default()).unwrap().values();
    assert!((roots[0] - 3.0).abs() < 0.05, "{roots:?}");
}
