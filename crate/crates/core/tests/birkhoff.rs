use birkdist_core::birkhoff::{Birkhoff, BirkhoffOptions, RouteRegistry};
use birkdist_core::dynamics::{ObservablePiece, ObservableTerm, PiecewiseMap, PiecewiseObservable};
use birkdist_core::piecewise::{AffinePiece, Piece, PiecewiseFn, Term, C64};
use birkdist_core::system::IntervalSystem;
use birkdist_core::transfer::SpectralOptions;
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;

fn doubling() -> &'static IntervalSystem {
    static SYS: OnceLock<IntervalSystem> = OnceLock::new();
    SYS.get_or_init(|| {
        IntervalSystem::build(PiecewiseMap::doubling(), &SpectralOptions { bins: 512, ..Default::default() }).unwrap()
    })
}

fn swap4() -> &'static IntervalSystem {
    static SYS: OnceLock<IntervalSystem> = OnceLock::new();
    SYS.get_or_init(|| {
        IntervalSystem::build(PiecewiseMap::swap4(), &SpectralOptions { bins: 512, ..Default::default() }).unwrap()
    })
}

fn birkhoff<'a>(sys: &'a IntervalSystem, phi: &PiecewiseFn, route: &str) -> Birkhoff<'a> {
    let opts = BirkhoffOptions { route: route.into(), ..Default::default() };
    Birkhoff::new(sys, phi, &RouteRegistry::default(), &opts).unwrap()
}

fn cos(q: f64) -> PiecewiseFn {
    PiecewiseObservable::cos(q, 1.0).function().clone()
}

fn sin(q: f64) -> PiecewiseFn {
    PiecewiseObservable::sin(q, 1.0).function().clone()
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

fn doubling_pieces() -> Vec<AffinePiece> {
    PiecewiseMap::doubling().affine_pieces().unwrap()
}

/// `Σ_k ∫₀ˣ ({2ᵏy} − ½) dy`, summed in closed form per term.
fn fractional_series(x: f64) -> f64 {
    (0..64)
        .map(|k| {
            let s = (k as f64).exp2();
            let t = (s * x).fract();
            (t * t - t) / 2.0 / s
        })
        .sum()
}

#[test]
fn partial_primitive_examples() {
    let b = birkhoff(doubling(), &cos(1.0), "orbit");
    assert!((b.primitive_partial(0.25, 0).unwrap().re - 1.0 / (2.0 * PI)).abs() < 1e-15);
    for n in [0, 1, 5, 12] {
        assert!(b.primitive_partial(0.5, n).unwrap().norm() < 1e-15);
    }
    assert_eq!(b.primitive_partial(0.0, 3).unwrap().norm(), 0.0);
}

#[test]
fn fractional_part_series_oracle() {
    let b = birkhoff(doubling(), &x_minus_half(), "exact");
    for x in [0.5, 0.3, 0.125, 0.71, 1.0] {
        let v = b.primitive(x).unwrap();
        let want = fractional_series(x);
        assert!((v.value.re - want).abs() < 1e-8, "x = {x}: {} vs {want}", v.value.re);
    }
    assert!((fractional_series(0.5) + 0.125).abs() < 1e-15);
}

#[test]
fn coboundary_primitive_telescopes() {
    let phi = sin(2.0).sub(&sin(1.0));
    let b = birkhoff(doubling(), &phi, "orbit");
    for x in [0.1, 0.25, 0.6, 1.0] {
        let want = ((2.0 * PI * x).cos() - 1.0) / (2.0 * PI);
        assert!((b.primitive(x).unwrap().value.re - want).abs() < 1e-8);
    }
    assert!(b.primitive(1.0).unwrap().value.norm() < 1e-8);
}

#[test]
fn pairings_with_trig_test_functions() {
    let b = birkhoff(doubling(), &cos(1.0), "orbit");
    assert!((b.pair_with_bv(&cos(1.0)).unwrap().value.re - 0.5).abs() < 1e-12);
    assert!(b.pair_with_bv(&PiecewiseFn::indicator(0.0, 1.0)).unwrap().value.norm() < 1e-12);
    let x = 0.37;
    let by_pairing = b.pair_with_bv(&PiecewiseFn::indicator(0.0, x)).unwrap().value;
    assert_eq!(by_pairing, b.primitive(x).unwrap().value);
}

#[test]
fn routes_agree_on_a_grid() {
    let phi = cos(1.0);
    let orbit = birkhoff(doubling(), &phi, "orbit");
    let ulam = birkhoff(doubling(), &phi, "ulam");
    let xs: Vec<f64> = (0..=256).map(|i| i as f64 / 256.0).collect();
    let a = orbit.primitive_grid(&xs).unwrap();
    let b = ulam.primitive_grid(&xs).unwrap();
    let worst = a.iter().zip(&b).map(|(u, v)| (u.value - v.value).norm()).fold(0.0, f64::max);
    assert!(worst < 1e-4, "{worst}");
}

#[test]
fn swap4_correction_matches_eigenvector_pairing() {
    let sys = swap4();
    assert_eq!(sys.period(), 2);
    let phi = PiecewiseObservable::new(
        vec![
            ObservablePiece { lo: 0.0, hi: 0.5, terms: vec![ObservableTerm::Poly { coef: 1.0, power: 0 }] },
            ObservablePiece { lo: 0.5, hi: 1.0, terms: vec![ObservableTerm::Poly { coef: -1.0, power: 0 }] },
        ],
        1.0,
    )
    .unwrap()
    .function()
    .clone();
    let b = birkhoff(sys, &phi, "exact");
    assert_eq!(b.block_length(), 2);
    for x in [0.0, 0.2, 0.5, 0.8] {
        let c = b.cesaro_primitive(x, 512).unwrap();
        // Φ₋₁γ = (∫sγ)s with s = φ, so G(x) = ½∫₀ˣ s.
        let want = 0.5 * if x <= 0.5 { x } else { 1.0 - x };
        assert!((c.g.re - want).abs() < 1e-10, "x = {x}: {c:?}");
        assert!(c.residual < 1e-8, "{c:?}");
    }
}

#[test]
fn cesaro_on_doubling_has_no_correction() {
    let b = birkhoff(doubling(), &cos(1.0), "exact");
    let c = b.cesaro_primitive(0.25, 1024).unwrap();
    assert_eq!(c.g.norm(), 0.0);
    assert!((c.limit - c.psi).norm() < 1e-8);
    let c0 = b.cesaro_primitive(0.0, 64).unwrap();
    assert_eq!((c0.limit.norm(), c0.g.norm()), (0.0, 0.0));
}

#[test]
fn coboundary_alpha_derivative_is_g() {
    let phi = sin(2.0).sub(&sin(1.0));
    let b = birkhoff(doubling(), &phi, "exact");
    let h = (-16f64).exp2();
    for x in [0.1, 0.3, 0.55, 0.9] {
        let slope = b.alpha_slope(x, h).unwrap().re;
        assert!((slope - (2.0 * PI * x).sin()).abs() < 1e-6, "x = {x}: {slope}");
    }
    let a1 = b.alpha_primitive(1.0, 512).unwrap().value.re;
    let a0 = b.alpha_primitive(0.0, 512).unwrap().value.re;
    // α(1) − α(0) = ∫g
    assert!((a1 - a0).abs() < 1e-6);
}

#[test]
fn stieltjes_and_integration_by_parts() {
    let b = birkhoff(doubling(), &cos(1.0), "orbit");
    let gamma = PiecewiseFn::from_pieces(vec![Piece::new(
        0.0,
        1.0,
        vec![Term::new(2, 0.0, C64::new(1.0, 0.0)), Term::new(0, 2.0, C64::new(0.0, 0.5))],
    )]);
    let direct = b.pair_with_bv(&gamma).unwrap().value;
    let stieltjes = b.stieltjes_pairing(&gamma, 10).unwrap();
    assert!((direct - stieltjes).norm() < 1e-4, "{direct} vs {stieltjes}");

    // −∫ψ Dγ dm + γ(b)ψ(b), with trapezoid quadrature on ψ.
    let n = 1 << 12;
    let xs: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let psi = b.primitive_grid(&xs).unwrap();
    let dg = gamma.derivative();
    let mut integral = C64::new(0.0, 0.0);
    for i in 0..n {
        let (x0, x1) = (xs[i], xs[i + 1]);
        integral += (psi[i].value * dg.eval(x0) + psi[i + 1].value * dg.eval(x1)) * (0.5 * (x1 - x0));
    }
    let by_parts = -integral + gamma.eval(1.0) * psi[n].value;
    assert!((by_parts - direct).norm() < 1e-6, "{by_parts} vs {direct}");
}

fn trig_poly(coefs: &[(i32, f64, f64)]) -> PiecewiseFn {
    let terms = coefs
        .iter()
        .flat_map(|&(q, c, s)| {
            vec![
                ObservableTerm::Cos { coef: c, freq: q as f64, phase: 0.0 },
                ObservableTerm::Sin { coef: s, freq: q as f64, phase: 0.0 },
            ]
        })
        .collect();
    PiecewiseObservable::single(0.0, 1.0, terms).function().clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn truncation_index_within_one_block(x in 0.001f64..1.0) {
        let b = birkhoff(swap4(), &x_minus_half(), "exact");
        let gamma = PiecewiseFn::indicator(0.0, x);
        let t = b.truncation_formula(&gamma);
        let i0 = b.truncation_index(&gamma) as f64;
        prop_assert!(i0 >= t && i0 <= t + b.block_length() as f64);
        prop_assert_eq!(b.truncation_index(&gamma) % b.block_length(), 0);
    }

    #[test]
    fn telescoping_is_exact(
        coefs in proptest::collection::vec((1i32..4, -1.0f64..1.0, -1.0f64..1.0), 1..3),
        x in 0.05f64..1.0,
        n in 1usize..6,
    ) {
        let g = trig_poly(&coefs);
        let pieces = doubling_pieces();
        let phi = g.compose_affine(&pieces).sub(&g);
        let b = birkhoff(doubling(), &phi, "orbit");
        let gamma = PiecewiseFn::indicator(0.0, x);
        let blocks: C64 = b.block_sums(&gamma, n).unwrap().into_iter().sum();
        let mut gn = g.clone();
        for _ in 0..n {
            gn = gn.compose_affine(&pieces);
        }
        let want = gn.sub(&g).inner(&gamma);
        prop_assert!((blocks - want).norm() < 1e-12);
        // Limit: −∫g 1_{[0,x]} + x∫g
        let limit = -g.integral_over(0.0, x) + g.integral() * x;
        prop_assert!((b.primitive(x).unwrap().value - limit).norm() < 1e-6);
    }
}
