use std::f64::consts::PI;

use hartogs_core::automorphisms::CayleyTransform;
use hartogs_core::hartogs::HartogsPoint;
use hartogs_core::verification::{run_suite, McTarget, Monomial, SuiteConfig};
use hartogs_core::{BaseMap, CVector, Domain, DomainDescriptor, HartogsDomain, C64};

fn cv(v: &[(f64, f64)]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|&(a, b)| C64::new(a, b)))
}

#[test]
fn disc_kernel_values() {
    let d = Domain::disc();
    let k = d.kernel_eval(&cv(&[(0.0, 0.0)]), &cv(&[(0.0, 0.0)])).unwrap();
    assert!((k.re - 1.0 / PI).abs() < 1e-15);
    let k = d.kernel_eval(&cv(&[(0.5, 0.0)]), &cv(&[(0.5, 0.0)])).unwrap();
    assert!((k.re - 16.0 / (9.0 * PI)).abs() < 1e-14);
}

#[test]
fn cayley_disc_to_half_plane() {
    let map = BaseMap::Cayley(CayleyTransform::to_siegel(0));
    let z = cv(&[(0.0, 0.0)]);
    let img = map.apply(&z).unwrap();
    assert!((img[0] - C64::new(0.0, 1.0)).norm() < 1e-15);
    let r = Domain::disc().transformation_residual(&Domain::half_plane(), &map, &z, &z).unwrap();
    assert!(r <= 1e-12);
}

#[test]
fn tumanov_examples() {
    let d = Domain::disc();
    let z = cv(&[(0.0, 0.0)]);
    assert!((d.tumanov_r(&z, &z).unwrap() - C64::new(2.0, 0.0)).norm() < 1e-12);
    let bd = Domain::product(vec![Domain::disc(), Domain::disc()]).unwrap();
    let z2 = CVector::zeros(2);
    assert!((bd.tumanov_r(&z2, &z2).unwrap() - C64::new(4.0, 0.0)).norm() < 1e-12);
}

#[test]
fn hartogs_origin_value() {
    let h = HartogsDomain::new(Domain::disc(), 1, 1.0).unwrap();
    let o = HartogsPoint::new(CVector::zeros(1), CVector::zeros(1));
    let c = h.kernel_compare(&o, &o, 50).unwrap();
    assert!((c.operator.re - 3.0 / PI.powi(3)).abs() < 1e-14);
    assert!(c.rel_err < 1e-12);
}

#[test]
fn mc_odd_monomial_vanishes() {
    let t = McTarget::new(Domain::product(vec![Domain::disc(), Domain::disc()]).unwrap(), None).unwrap();
    let f = Monomial::parse("x0*x1", 2).unwrap();
    let e = hartogs_core::verification::mc_reproducing(&t, &f, &CVector::zeros(2), 100_000, 5).unwrap();
    assert!(e.deviation <= 3.0);
}

#[test]
fn report_json_roundtrip() {
    let r = run_suite(&SuiteConfig::new("tumanov").with_domain(DomainDescriptor::Disc).with_samples(5)).unwrap();
    assert!(r.pass);
    let json = serde_json::to_string(&r).unwrap();
    let back: hartogs_core::SuiteReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back.residual_bits(), r.residual_bits());
}
