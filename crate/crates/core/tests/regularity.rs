use birkdist_core::birkhoff::{Birkhoff, BirkhoffOptions, RouteRegistry};
use birkdist_core::dynamics::{ObservableTerm, PiecewiseMap, PiecewiseObservable};
use birkdist_core::piecewise::{PiecewiseFn, C64};
use birkdist_core::regularity::*;
use birkdist_core::system::IntervalSystem;
use birkdist_core::transfer::SpectralOptions;
use proptest::prelude::*;
use std::f64::consts::{LN_2, PI, TAU};
use std::sync::OnceLock;

fn system(map: PiecewiseMap) -> IntervalSystem {
    IntervalSystem::build(map, &SpectralOptions { bins: 512, ..Default::default() }).unwrap()
}

fn doubling() -> &'static IntervalSystem {
    static SYS: OnceLock<IntervalSystem> = OnceLock::new();
    SYS.get_or_init(|| system(PiecewiseMap::doubling()))
}

fn birkhoff<'a>(sys: &'a IntervalSystem, phi: &PiecewiseFn) -> Birkhoff<'a> {
    Birkhoff::new(sys, phi, &RouteRegistry::default(), &BirkhoffOptions::default()).unwrap()
}

fn cos() -> PiecewiseFn {
    PiecewiseObservable::cos(1.0, 1.0).function().clone()
}

fn x_minus_half() -> PiecewiseFn {
    PiecewiseObservable::single(
        0.0,
        1.0,
        vec![ObservableTerm::Poly { coef: 1.0, power: 1 }, ObservableTerm::Poly { coef: -0.5, power: 0 }],
    )
    .function()
    .clone()
}

fn coboundary() -> PiecewiseFn {
    PiecewiseObservable::sin(2.0, 1.0).plus(&PiecewiseObservable::sin(1.0, -1.0)).unwrap().function().clone()
}

/// `Σ_k sin(2π2^k x)/(2π2^k)`, the primitive of the cosine Birkhoff series.
fn cos_primitive(x: f64) -> f64 {
    (0..60).map(|k| (TAU * (k as f64).exp2() * x).sin() / (TAU * (k as f64).exp2())).sum()
}

#[test]
fn log_lipschitz_of_cosine_primitive() {
    let closed = PrimitiveGrid::from_fn(0.0, 1.0, 20, cos_primitive).unwrap();
    let r = log_lipschitz_ratio(&closed);
    assert!(r.stable, "{:?}", r.levels);
    // |Δψ| ≤ Σ_k min(δ, 1/(π2^k)) keeps every ratio below about 1/ln 2, and
    // the level sups flatten out between 2⁻⁴ and 2⁻²⁰.
    assert!(r.levels.iter().all(|l| l.sup_ratio < 1.0 / LN_2), "{:?}", r.levels);
    let tail: Vec<f64> = r.levels[4..].windows(2).map(|w| w[1].sup_ratio - w[0].sup_ratio).collect();
    assert!(tail.windows(2).all(|w| w[1] <= w[0] + 1e-12) && *tail.last().unwrap() < 0.015, "{tail:?}");

    let computed = PrimitiveGrid::sample(&birkhoff(doubling(), &cos()), 10).unwrap();
    let oracle = PrimitiveGrid::from_fn(0.0, 1.0, 10, cos_primitive).unwrap();
    for (a, b) in computed.values.iter().zip(&oracle.values) {
        assert!((a.re - b.re).abs() < 1e-7);
    }
    assert!(log_lipschitz_ratio(&computed).stable);
}

#[test]
fn bv_verdicts() {
    let b = birkhoff(doubling(), &coboundary());
    let grid = PrimitiveGrid::sample(&b, 12).unwrap();
    assert_eq!(bv_test(&grid).verdict, BvVerdict::Bounded);
    let closed = PrimitiveGrid::from_fn(0.0, 1.0, 20, cos_primitive).unwrap();
    let report = bv_test(&closed);
    assert_eq!(report.verdict, BvVerdict::Diverging);
    assert!(report.levels.windows(2).all(|w| w[1].variation >= w[0].variation));
}

#[test]
fn zygmund_mismatch_coefficient() {
    let hs = dyadic_scales(8, 24);
    let p = zygmund_profile(&birkhoff(doubling(), &x_minus_half()), 0.5, &hs).unwrap();
    assert!((p.fit.slope.abs() - 1.0 / LN_2).abs() < 0.1 / LN_2, "{:?}", p.fit);
    assert!(!p.zygmund);
    assert!((p.predicted.unwrap() + 1.0 / LN_2).abs() < 1e-12);
    assert_eq!(p.refit(), p.fit);

    let c = zygmund_profile(&birkhoff(doubling(), &cos()), 0.5, &hs).unwrap();
    assert!(c.fit.slope.abs() < ZYGMUND_SLOPE && c.zygmund, "{:?}", c.fit);
    assert_eq!(c.predicted, Some(0.0));
}

#[test]
fn zygmund_of_zero_and_bad_probes() {
    let hs = dyadic_scales(8, 12);
    let z = zygmund_profile(&birkhoff(doubling(), &PiecewiseFn::zero()), 0.5, &hs).unwrap();
    assert!(z.second_differences.iter().all(|&d| d == 0.0));
    let b = birkhoff(doubling(), &cos());
    assert!(zygmund_profile(&b, 0.5, &[0.25, 0.3]).is_err());
    assert!(zygmund_profile(&b, 0.001, &hs).is_err());
}

#[test]
fn zygmund_on_tripling() {
    let sys = system(PiecewiseMap::multiply(3).unwrap());
    let p = zygmund_profile(&birkhoff(&sys, &x_minus_half()), 1.0 / 3.0, &dyadic_scales(8, 24)).unwrap();
    let expected = 1.0 / 3f64.ln();
    assert!((p.predicted.unwrap() + expected).abs() < 1e-9);
    assert!((p.fit.slope + expected).abs() < 0.1 * expected, "{:?}", p.fit);
}

#[test]
fn clt_of_cosine() {
    let hs = [(-15f64).exp2(), (-20f64).exp2(), (-25f64).exp2()];
    let r = clt_modulus(doubling(), &cos(), 0, &hs, &CltOptions::default()).unwrap();
    assert!((r.sigma2 - 0.5).abs() < 1e-9 && (r.lyapunov - LN_2).abs() < 1e-12);
    let ks: Vec<f64> = r.levels.iter().map(|l| l.ks).collect();
    assert!(ks[2] < 0.1, "{ks:?}");
    let noise = 2.0 / 2000f64.sqrt();
    assert!(ks.windows(2).all(|w| w[1] <= w[0] + noise), "{ks:?}");

    let doubled = cos().scale(C64::new(2.0, 0.0));
    let small = CltOptions { samples: 64, ..Default::default() };
    let a = clt_modulus(doubling(), &cos(), 0, &hs[..1], &small).unwrap();
    let b = clt_modulus(doubling(), &doubled, 0, &hs[..1], &small).unwrap();
    assert_eq!(a.levels, b.levels);
    assert!((b.sigma2 - 2.0).abs() < 1e-8);
}

#[test]
fn clt_refuses_coboundary() {
    let err = clt_modulus(doubling(), &coboundary(), 0, &[(-10f64).exp2()], &CltOptions::default()).unwrap_err();
    assert!(matches!(err, birkdist_core::Error::Precondition(_)));
}

#[test]
fn holder_convergence_of_cosine() {
    let b = birkhoff(doubling(), &cos());
    let r = holder_convergence(&b, 0.5, 12, 8, 1e-12).unwrap();
    let rate = r.rate.unwrap();
    assert!(rate < 1.0 && rate <= 2f64.powf(-0.5) * 1.05, "{rate}");
    assert!(r.distances.windows(2).all(|w| w[1].distance <= w[0].distance));
    let z = holder_convergence(&birkhoff(doubling(), &PiecewiseFn::zero()), 0.5, 4, 6, 1e-12).unwrap();
    assert!(z.distances.iter().all(|d| d.distance == 0.0));
    let late = holder_convergence(&b, 0.5, 60, 4, 1e-12).unwrap();
    assert!(late.distances.last().unwrap().distance <= 1e-9);
}

#[test]
fn cosine_primitive_oracle() {
    let b = birkhoff(doubling(), &cos());
    assert!((b.primitive(0.25).unwrap().value.re - 1.0 / (2.0 * PI)).abs() < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn n_scale_matches_floor(k in 2u32..6, e in 1.0f64..30.0) {
        let map = PiecewiseMap::multiply(k).unwrap();
        let h = (-e).exp2();
        let n = n_scale(&map, 0.123_456_7 / k as f64, h).unwrap();
        let mut oracle = 0usize;
        while (k as f64).powi(oracle as i32 + 1) <= 1.0 / h {
            oracle += 1;
        }
        prop_assert_eq!(n, oracle);
        prop_assert_eq!(n, ((1.0 / h).ln() / (k as f64).ln()).floor() as usize);
    }

    #[test]
    fn clt_statistic_is_scale_free(e in -3i32..4) {
        let c = (e as f64).exp2();
        let opts = CltOptions { samples: 16, ..Default::default() };
        let h = [(-12f64).exp2()];
        let a = clt_modulus(doubling(), &cos(), 0, &h, &opts).unwrap();
        let b = clt_modulus(doubling(), &cos().scale(C64::new(c, 0.0)), 0, &h, &opts).unwrap();
        prop_assert_eq!(a.levels, b.levels);
    }
}
