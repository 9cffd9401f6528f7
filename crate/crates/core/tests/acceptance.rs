//! Acceptance suite. Runs every criterion, prints one line each and exits
//! nonzero if any failed.

use birkdist_core::birkhoff::{Birkhoff, BirkhoffOptions, RouteRegistry};
use birkdist_core::dynamics::{ObservableTerm, PiecewiseMap, PiecewiseObservable};
use birkdist_core::piecewise::{PiecewiseFn, C64};
use birkdist_core::regularity::*;
use birkdist_core::system::IntervalSystem;
use birkdist_core::torus::*;
use birkdist_core::transfer::*;
use birkdist_core::variance::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{LN_2, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn system(map: PiecewiseMap) -> IntervalSystem {
    IntervalSystem::build(map, &SpectralOptions::default()).expect("system builds")
}

fn cos(q: f64) -> PiecewiseFn {
    PiecewiseObservable::cos(q, 1.0).function().clone()
}

fn x_minus_half() -> PiecewiseObservable {
    PiecewiseObservable::single(
        0.0,
        1.0,
        vec![ObservableTerm::Poly { coef: 1.0, power: 1 }, ObservableTerm::Poly { coef: -0.5, power: 0 }],
    )
}

fn coboundary() -> PiecewiseObservable {
    PiecewiseObservable::sin(2.0, 1.0).plus(&PiecewiseObservable::sin(1.0, -1.0)).unwrap()
}

fn birkhoff<'a>(sys: &'a IntervalSystem, phi: &PiecewiseFn, route: &str) -> Birkhoff<'a> {
    let opts = BirkhoffOptions { route: route.into(), ..Default::default() };
    Birkhoff::new(sys, phi, &RouteRegistry::default(), &opts).expect("series builds")
}

fn random_trig(rng: &mut ChaCha8Rng, terms: usize) -> PiecewiseFn {
    let terms = (0..terms)
        .flat_map(|_| {
            let q = rng.gen_range(1..6) as f64;
            [
                ObservableTerm::Cos { coef: rng.gen_range(-1.0..1.0), freq: q, phase: 0.0 },
                ObservableTerm::Sin { coef: rng.gen_range(-1.0..1.0), freq: q, phase: 0.0 },
            ]
        })
        .collect();
    PiecewiseObservable::single(0.0, 1.0, terms).function().clone()
}

fn spectral_floor() -> Outcome {
    let t = Instant::now();
    let map = PiecewiseMap::doubling();
    let opts = SpectralOptions { bins: 1024, ..Default::default() };
    let d = SpectralDecomposition::compute(UlamDiscretization::new(&map, 1024).unwrap(), &opts).unwrap();
    let e = ergodic_structure(&d, opts.support_floor).unwrap();
    let lead = (d.spectrum().ritz[0] - 1.0).norm();
    let dev = e.components[0].density.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    let secs = t.elapsed().as_secs_f64();
    check(
        lead < 1e-9 && dev < 1e-6 && secs < 10.0,
        format!("|λ₁−1| = {lead:.2e}, sup|ρ−1| = {dev:.2e}, {secs:.2} s"),
    )
}

fn period_detection() -> Outcome {
    let t = Instant::now();
    let swap = system(PiecewiseMap::swap4());
    let vals = swap.decomposition().spectrum().values();
    let two = system(PiecewiseMap::two_component());
    let masses = two.ergodic().basin_masses();
    let secs = t.elapsed().as_secs_f64();
    let ok = vals == vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]
        && swap.period() == 2
        && two.ergodic().count() == 2
        && masses.iter().all(|m| (m - 0.5).abs() < 1e-4)
        && secs < 10.0;
    let shown: Vec<f64> = vals.iter().map(|z| z.re).collect();
    check(
        ok,
        format!(
            "swap4 Λ = {shown:?}, p = {}; E = {}, masses [{:.6}, {:.6}], {secs:.2} s",
            swap.period(),
            two.ergodic().count(),
            masses[0],
            masses[1]
        ),
    )
}

fn primitive_oracle() -> Outcome {
    let sys = system(PiecewiseMap::doubling());
    let closed = birkhoff(&sys, &cos(1.0), "orbit");
    let adjoint = birkhoff(&sys, &cos(1.0), "ulam");
    let want = 1.0 / (2.0 * PI);
    let a = (closed.primitive(0.25).unwrap().value.re - want).abs();
    let b = (adjoint.primitive(0.25).unwrap().value.re - want).abs();
    let xs: Vec<f64> = (0..=256).map(|i| i as f64 / 256.0).collect();
    let ga = closed.primitive_grid(&xs).unwrap();
    let gb = adjoint.primitive_grid(&xs).unwrap();
    let grid = ga.iter().zip(&gb).map(|(u, v)| (u.value - v.value).norm()).fold(0.0, f64::max);
    check(a < 1e-8 && b < 1e-4 && grid < 1e-4, format!("closed {a:.2e}, adjoint {b:.2e}, grid {grid:.2e}"))
}

fn variance() -> Outcome {
    let sys = system(PiecewiseMap::doubling());
    let gk = sigma2_component(&sys, &cos(1.0), 0, &VarianceOptions::default()).unwrap().total();
    let mc = monte_carlo_sigma2(sys.map(), &cos(1.0), &MonteCarloOptions { samples: 100_000, horizon: 1000, seed: 2024 })
        .unwrap();
    let two = system(PiecewiseMap::two_component());
    let phi = PiecewiseObservable::cos(2.0, 1.0).plus(&PiecewiseObservable::sin(6.0, 0.5)).unwrap();
    let r = variance_report(&two, phi.function(), &VarianceOptions::default()).unwrap();
    check(
        (gk - 0.5).abs() < 1e-6 && (mc.mean - 0.5).abs() < 0.02 && r.identity_residual < 1e-8,
        format!("Green–Kubo {gk:.10}, Monte Carlo {:.4} ± {:.4}, identity residual {:.2e}", mc.mean, mc.half_width(), r.identity_residual),
    )
}

fn coboundary_chain() -> Outcome {
    let sys = system(PiecewiseMap::doubling());
    let phi = coboundary();
    let r = coboundary_solve(&sys, phi.function(), &CoboundaryOptions::default()).unwrap();
    let d: Vec<f64> = r.grid.iter().zip(&r.g).map(|(x, g)| g - (2.0 * PI * x).sin()).collect();
    let mean = d.iter().sum::<f64>() / d.len().max(1) as f64;
    let g_err = d.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    let orbits = obstruction_scan(&sys, &phi, 6).unwrap();
    let worst = orbits.iter().map(|o| o.sum.abs()).fold(0.0, f64::max);
    let grid = PrimitiveGrid::sample(&birkhoff(&sys, phi.function(), "auto"), 12).unwrap();
    let bv = bv_test(&grid).verdict;
    check(
        r.is_coboundary() && r.sigma2_m < 1e-6 && g_err < 1e-4 && worst < 1e-8 && bv == BvVerdict::Bounded,
        format!(
            "σ²_m = {:.2e}, g error {g_err:.2e}, {} cycles with max |sum| {worst:.2e}, BV {}",
            r.sigma2_m,
            orbits.len(),
            bv.as_str()
        ),
    )
}

fn non_zygmund() -> Outcome {
    let sys = system(PiecewiseMap::doubling());
    let hs = dyadic_scales(8, 24);
    let p = zygmund_profile(&birkhoff(&sys, x_minus_half().function(), "auto"), 0.5, &hs).unwrap();
    let c = zygmund_profile(&birkhoff(&sys, &cos(1.0), "auto"), 0.5, &hs).unwrap();
    let coef = p.fit.slope.abs();
    check(
        (coef - 1.0 / LN_2).abs() < 0.1 / LN_2 && c.fit.slope.abs() < 0.05 && c.zygmund,
        format!("coefficient {coef:.4} (1/ln 2 = {:.4}), cosine {:.2e}", 1.0 / LN_2, c.fit.slope.abs()),
    )
}

fn clt() -> Outcome {
    let sys = system(PiecewiseMap::doubling());
    let hs = [(-15f64).exp2(), (-20f64).exp2(), (-25f64).exp2()];
    let r = clt_modulus(&sys, &cos(1.0), 0, &hs, &CltOptions::default()).unwrap();
    let ks: Vec<f64> = r.levels.iter().map(|l| l.ks).collect();
    let noise = 2.0 / 2000f64.sqrt();
    check(
        ks[2] < 0.1 && ks.windows(2).all(|w| w[1] <= w[0] + noise),
        format!("KS at 2⁻¹⁵, 2⁻²⁰, 2⁻²⁵: {:.4}, {:.4}, {:.4}", ks[0], ks[1], ks[2]),
    )
}

fn crossing_constant() -> Outcome {
    let ps = vec![vec![1, 0], vec![1, 1], vec![2, 3], vec![5, -7]];
    let t = crossing_table(&HyperbolicMatrix::cat(), &ps, 40, (-30, 30)).unwrap();
    check(t.max == 2, format!("max count {} over {} (p, ℓ) pairs", t.max, t.entries.len()))
}

fn lambda_zero() -> Outcome {
    let r = TrigPolynomial::cos(&[1, 1], 1.0);
    let u = birkhoff_fourier(&FourierSystem::cat(), &r, Direction::Alpha, 40).unwrap();
    let p = besov_profile(&u, 40, &BesovOptions::default()).unwrap();
    let l = crossing_table(&HyperbolicMatrix::cat(), &[vec![1, 1]], 40, (-30, 30)).unwrap().max;
    let top = p.blocks.iter().map(|b| b.sup).fold(0.0, f64::max);
    let growth = p.growth_exponent.unwrap_or(0.0);
    check(
        top <= 2.0 && growth <= 0.05 && p.blocks.iter().all(|b| b.sup <= l as f64 * r.l1()),
        format!("max block sup {top:.4}, growth exponent {growth:.2e}, L = {l}"),
    )
}

fn log_besov() -> Outcome {
    let sys = FourierSystem::circle(2).unwrap();
    let u = birkhoff_fourier(&sys, &TrigPolynomial::cos(&[1], 1.0), Direction::Alpha, 45).unwrap();
    let p = besov_profile(&u, 40, &BesovOptions::default()).unwrap();
    let ratio = p.blocks.iter().map(|b| b.sup / (1.0 + b.level as f64)).fold(0.0, f64::max);
    let slope = p.log_besov_slope(5).unwrap();
    check(slope <= 0.05 && ratio.is_finite(), format!("sup value/(1+ℓ) = {ratio:.4}, slope beyond ℓ = 5: {slope:.2e}"))
}

fn advection() -> Outcome {
    let m = HyperbolicMatrix::cat();
    let r = TrigPolynomial::cos(&[1, 1], 1.0);
    let zero = TrigPolynomial::zero(2);
    let one = TrigPolynomial::constant(2, 1.0);
    let charge = advect(&m, &r, &zero, &one, 50).unwrap();
    let drift = charge.steps.iter().map(|s| (s.q - charge.steps[0].q).norm()).fold(0.0, f64::max);
    let y = advect(&m, &r, &zero, &TrigPolynomial::cos(&[0, 1], 1.0), 50).unwrap();
    let half = y.steps[1..].iter().all(|s| s.q == C64::new(0.5, 0.0));
    let own = advect(&m, &r, &zero, &r, 50).unwrap();
    check(
        drift == 0.0 && half && own.limit == Some(C64::new(0.0, 0.0)),
        format!("charge drift {drift:.1e}, Q_j(cos 2πy) = ½ for j ≥ 1: {half}, u_ω(R) = {:?}", own.limit.map(|z| z.re)),
    )
}

fn deformation() -> Outcome {
    let m = HyperbolicMatrix::cat();
    let w = [TrigPolynomial::constant(2, 1.0), TrigPolynomial::zero(2)];
    let a = infinitesimal_deformation(&m, &w, [0.3, 0.6], 1e-14).unwrap().alpha;
    let err = a[0].abs().max((a[1] + 1.0).abs());
    let hs = dyadic_scales(4, 24);
    let scan =
        deformation_second_differences(&m, &[TrigPolynomial::sin(&[0, 1], 1.0), TrigPolynomial::zero(2)], &hs, 1e-14)
            .unwrap();
    let top = scan.levels.iter().map(|l| l.max_ratio).fold(0.0, f64::max);
    check(err < 1e-10 && scan.bounded, format!("|α − (0,−1)| = {err:.2e}, max |Δ²α|/h = {top:.4}, bounded {}", scan.bounded))
}

fn operator_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut duality = 0.0f64;
    for map in [PiecewiseMap::doubling(), PiecewiseMap::swap4(), PiecewiseMap::two_component()] {
        let pieces = map.affine_pieces().unwrap();
        for _ in 0..10 {
            let (phi, gamma) = (random_trig(&mut rng, 3), random_trig(&mut rng, 3));
            let lhs = phi.inner(&gamma.transfer_affine(&pieces).conj());
            let rhs = phi.compose_affine(&pieces).inner(&gamma.conj());
            duality = duality.max((lhs - rhs).norm());
        }
        let u = UlamDiscretization::new(&map, 256).unwrap();
        let a: Vec<C64> = (0..256).map(|_| C64::new(rng.gen_range(-1.0..1.0), 0.0)).collect();
        let b: Vec<C64> = (0..256).map(|_| C64::new(rng.gen_range(-1.0..1.0), 0.0)).collect();
        duality = duality.max((u.pair(&a, &u.push_forward(&b)) - u.pair(&u.pull_back(&a), &b)).norm());
    }
    let mut residual = 0.0f64;
    for map in [PiecewiseMap::doubling(), PiecewiseMap::swap4(), PiecewiseMap::two_component()] {
        residual = residual.max(system(map).decomposition().residuals().max());
    }
    let sys = system(PiecewiseMap::doubling());
    let pieces = sys.map().affine_pieces().unwrap();
    let phi = cos(1.0);
    let mut theta = 0.0f64;
    for _ in 0..20 {
        let g = random_trig(&mut rng, 2);
        let a = theta_functional(&sys, &phi, &g, &VarianceOptions::default()).unwrap();
        let b = theta_functional(&sys, &phi, &g.compose_affine(&pieces), &VarianceOptions::default()).unwrap();
        theta = theta.max((a - b).norm());
    }
    check(
        duality < 1e-8 && residual < 1e-8 && theta < 1e-6,
        format!("duality {duality:.2e}, projector residual {residual:.2e}, Θ invariance {theta:.2e}"),
    )
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("spectral floor", spectral_floor),
        ("period detection", period_detection),
        ("primitive oracle", primitive_oracle),
        ("variance", variance),
        ("coboundary chain", coboundary_chain),
        ("non-Zygmund coefficient", non_zygmund),
        ("CLT of the modulus", clt),
        ("annulus crossing constant", crossing_constant),
        ("Λ⁰ membership", lambda_zero),
        ("log-Besov growth", log_besov),
        ("advection", advection),
        ("deformation", deformation),
        ("operator algebra", operator_algebra),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {:>2}. {name}: {detail} ({:.2} s)", i + 1, t.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
