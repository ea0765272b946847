//! One pass/fail line per acceptance criterion, with wall-clock runtimes.
//!
//! Run with `cargo test -p densbound --test acceptance`. The process exits
//! non-zero when a criterion fails outside the documented exceptions listed in
//! `KNOWN_CONFLICTS`.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use densbound::bounds::{
    gaussian_sweep, k_esssup, k_phi, k_q, log_c_j, log_c_tilde_j, mu_lower_esssup, mu_lower_kq, mu_lower_orlicz,
    mu_lower_orlicz_quasidisc, mu_lower_quasidisc, sweep_slope, BoundReport,
};
use densbound::conformal::image_area;
use densbound::fem_oracle::{
    b_m2_disk_estimate, bessel_j1_prime, fem_reference, j1_prime_first_zero, mesh_from_map, mu_disk_reference,
};
use densbound::orlicz::{holder_pairing, luxemburg_norm, orlicz_norm_bracket};
use densbound::youngfn::{probe_delta_prime, ProbeGrid};
use densbound::{ConformalMap, DensityField, DiskQuadrature, Measure, SampledFunction, ScenarioParams, YoungFunction};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Criteria whose failure is explained in the decision ledger: the stated
/// quasidisc bound carries `‖ρ‖^{(q−2)/q}`, so it cannot be (−1)-homogeneous
/// while also producing the stated Gaussian slope.
const KNOWN_CONFLICTS: &[usize] = &[9];

/// `j′₁,₁` to 17 digits.
const J1_PRIME_ZERO: f64 = 1.841_183_781_340_659_3;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn pp(c: f64, k: u32) -> ConformalMap {
    ConformalMap::perturbed_power(Complex64::new(c, 0.0), k).unwrap()
}

fn pp_maps() -> Vec<ConformalMap> {
    vec![ConformalMap::identity(), pp(0.3, 2), pp(0.3, 3), pp(0.5, 2), pp(0.5, 3)]
}

fn all_maps() -> Vec<ConformalMap> {
    let mut v = pp_maps();
    v.push(ConformalMap::moebius_disk(Complex64::new(0.3, 0.2)).unwrap());
    v.push(
        ConformalMap::polynomial(vec![Complex64::new(0.1, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.1, 0.05)])
            .unwrap(),
    );
    v
}

fn densities() -> Vec<DensityField> {
    vec![
        DensityField::Constant(1.0),
        DensityField::Gaussian { n: 1.0 },
        DensityField::Gaussian { n: 4.0 },
        DensityField::PullbackJacobianPower { gamma: 1.0 },
        DensityField::PullbackOrliczCanceling { eps: 1.5 },
    ]
}

fn quad() -> DiskQuadrature {
    DiskQuadrature::new(16, 48).unwrap()
}

fn disk_reference() -> Check {
    let x = j1_prime_first_zero();
    ensure(rel(x, J1_PRIME_ZERO) < 1e-12, || format!("j'_1,1 = {x:.17}"))?;
    ensure(bessel_j1_prime(x).abs() < 1e-13, || format!("J1'(root) = {:e}", bessel_j1_prime(x)))?;
    let mu = mu_disk_reference();
    let fem = fem_reference(&ConformalMap::identity(), &DensityField::Constant(1.0), &[4, 5, 6])
        .map_err(|e| e.to_string())?;
    let err = rel(fem.extrapolated, mu);
    ensure(err < 1e-2, || format!("FEM {} vs {mu}", fem.extrapolated))?;
    let factors = fem.convergence_factors();
    ensure(factors.iter().all(|f| (3.0..=5.0).contains(f)), || format!("convergence factors {factors:?}"))?;
    Ok(format!(
        "mu_FEM = {:.6} (levels 4-6), (j'_1,1)^2 = {mu:.12}, rel err {err:.1e}, h^2 factor {:.2}",
        fem.extrapolated, factors[0]
    ))
}

fn soundness() -> Check {
    let mut fixtures = Vec::new();
    for map in pp_maps() {
        for rho in densities() {
            fixtures.push((map.clone(), rho));
        }
    }
    let b = b_m2_disk_estimate(12, &YoungFunction::exp_pow(1.5).unwrap()).map_err(|e| e.to_string())?.value;
    let params = ScenarioParams::default();
    let results: Vec<_> = fixtures
        .par_iter()
        .map(|(map, rho)| -> Result<(f64, Vec<BoundReport>), String> {
            let q = quad();
            let fem = fem_reference(map, rho, &[4, 5]).map_err(|e| e.to_string())?;
            let reports = [
                mu_lower_esssup(map, rho, &q),
                mu_lower_kq(map, rho, params.p, params.q, &q),
                mu_lower_quasidisc(map, rho, &params, &q),
                mu_lower_orlicz(map, rho, params.eps, b, &q),
                mu_lower_orlicz_quasidisc(map, rho, &params, b, &q),
            ];
            let reports = reports.into_iter().collect::<densbound::Result<Vec<_>>>().map_err(|e| e.to_string())?;
            Ok((fem.extrapolated, reports))
        })
        .collect();
    let (mut clean, mut checked, mut worst) = (0, 0, 0.0f64);
    for ((map, rho), r) in fixtures.iter().zip(results) {
        let (mu, reports) = r.map_err(|e| format!("{} / {}: {e}", map.label(), rho.label()))?;
        for rep in reports {
            let ratio = rep.bound / mu;
            if rep.is_clean() {
                clean += 1;
                ensure(ratio <= 1.02, || format!("{} / {} / {}: ratio {ratio}", map.label(), rho.label(), rep.method))?;
            }
            if rep.bound > 0.0 {
                checked += 1;
                worst = worst.max(ratio);
            }
        }
    }
    ensure(fixtures.len() >= 12 && clean > 0, || format!("only {} fixtures, {clean} clean reports", fixtures.len()))?;
    Ok(format!(
        "{} fixtures, {clean} clean reports <= 1.02 mu_FEM; max ratio over all {checked} positive bounds {worst:.4} (B pinned at trial estimate {b:.5})",
        fixtures.len()
    ))
}

fn tightness() -> Check {
    let q = quad();
    let mu = mu_disk_reference();
    let rho = DensityField::PullbackJacobianPower { gamma: 1.0 };
    let mut worst = 0.0f64;
    let maps = all_maps();
    for map in &maps {
        let r = mu_lower_esssup(map, &rho, &q).map_err(|e| e.to_string())?;
        let e = rel(r.bound, mu);
        ensure(e < 1e-9, || format!("{}: {} vs {mu}", map.label(), r.bound))?;
        worst = worst.max(e);
    }
    Ok(format!("{} maps, max rel deviation from mu(D) {worst:.1e}", maps.len()))
}

fn random_field(rng: &mut ChaCha8Rng, m: &Arc<Measure>) -> SampledFunction {
    let block = rng.gen_range(1..24);
    let mut v = 0.0;
    let values = (0..m.len())
        .map(|i| {
            if i % block == 0 {
                v = if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(-3.0..3.0) };
            }
            v
        })
        .collect();
    SampledFunction::new(values, m.clone()).unwrap()
}

fn orlicz_engine() -> Check {
    let q = DiskQuadrature::new(8, 16).unwrap();
    let m = q.measure().clone();
    let youngs = [
        YoungFunction::exp_square(),
        YoungFunction::log_linear(),
        YoungFunction::log_pow(2.0).unwrap(),
        YoungFunction::power(3.0).unwrap(),
        YoungFunction::exp_pow(1.5).unwrap(),
    ];
    for y in &youngs {
        for c in [0.1, 1.0, 7.5] {
            let f = SampledFunction::constant(c, m.clone()).unwrap();
            let got = luxemburg_norm(&f, y).map_err(|e| e.to_string())?;
            let want = c / y.inverse(1.0 / PI).map_err(|e| e.to_string())?;
            ensure(rel(got, want) < 1e-8, || format!("{y:?} c={c}: {got} vs {want}"))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    // M(u) = u^p/p: the Orlicz norm is p′^{1/p′}‖f‖_p, attained by the dual
    // field g = λ|f|^{p−1} normalised so that Σ w g^{p′}/p′ = 1
    for p in [1.5, 2.0, 3.0] {
        let pp = p / (p - 1.0);
        let y = YoungFunction::power(p).unwrap();
        for _ in 0..10 {
            let f = random_field(&mut rng, &m);
            let g: Vec<f64> = f.values().iter().map(|v| v.abs().powf(p - 1.0)).collect();
            let scale = (m.integrate(|i| g[i].powf(pp) / pp)).powf(-1.0 / pp);
            let dual = m.integrate(|i| f.values()[i].abs() * g[i] * scale);
            let want = pp.powf(1.0 / pp) * f.lp_norm(p);
            ensure(rel(dual, want) < 1e-6, || format!("p={p}: dual {dual} vs {want}"))?;
            let (lo, hi) = orlicz_norm_bracket(&f, &y).map_err(|e| e.to_string())?;
            ensure(rel(lo, p.powf(-1.0 / p) * f.lp_norm(p)) < 1e-6, || format!("p={p}: Luxemburg {lo}"))?;
            ensure(lo <= dual * (1.0 + 1e-9) && dual <= hi * (1.0 + 1e-9), || format!("p={p}: {lo} {dual} {hi}"))?;
        }
    }
    let (mut holder, mut young) = (0, 0);
    for i in 0..100 {
        let y = &youngs[i % youngs.len()];
        let ystar = y.complementary();
        let f = random_field(&mut rng, &m);
        let g = random_field(&mut rng, &m);
        let (lhs, rhs) = holder_pairing(&f, &g, y).map_err(|e| e.to_string())?;
        if lhs > rhs * (1.0 + 1e-12) {
            holder += 1;
        }
        for (a, b) in f.values().iter().zip(g.values()) {
            let (a, b) = (a.abs(), b.abs());
            let sum = y.eval(a).map_err(|e| e.to_string())? + ystar.eval(b).map_err(|e| e.to_string())?;
            if a * b > sum * (1.0 + 1e-12) + 1e-300 {
                young += 1;
            }
        }
    }
    ensure(holder == 0 && young == 0, || format!("{holder} Hölder and {young} Young violations"))?;
    Ok("constants to 1e-8, L^p/Orlicz factor to 1e-6, 100 random fields: 0 Hölder, 0 Young violations".into())
}

fn young_identities() -> Check {
    let mut worst_bi = 0.0f64;
    for y in [YoungFunction::log_linear(), YoungFunction::power(2.5).unwrap(), YoungFunction::exp_pow(2.0).unwrap()] {
        let bi = y.numeric_complement().numeric_complement();
        for i in 0..30 {
            let u = 0.05 * 1.25f64.powi(i);
            let (a, b) = (y.eval(u).map_err(|e| e.to_string())?, bi.eval(u).map_err(|e| e.to_string())?);
            let e = rel(b, a);
            ensure(e <= 1e-4, || format!("{y:?} u={u}: {a} vs {b}"))?;
            worst_bi = worst_bi.max(e);
        }
    }
    let c = probe_delta_prime(&YoungFunction::log_linear(), &ProbeGrid::default()).value.ok_or("Δ′ probe unbounded")?;
    ensure(c <= 2.0 + 1e-9, || format!("Δ′ constant {c}"))?;
    let mut worst_psi = 0.0f64;
    for (eps, alpha) in [(1.0, 4.0), (1.0, 5.0), (1.5, 6.0), (2.0, 4.0)] {
        let phi = YoungFunction::log_pow(eps).unwrap();
        let psi = YoungFunction::psi_eps(eps, alpha).unwrap();
        for i in 0..=60 {
            let u = 10f64.powf(3.0 * i as f64 / 60.0);
            let inner = phi.eval(u / phi.inverse(u).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            let got = psi.eval(inner).map_err(|e| e.to_string())?;
            let want = 2.0 / alpha * u.powf((alpha - 2.0) / 2.0);
            let e = rel(got, want);
            ensure(e <= 1e-6, || format!("eps={eps} alpha={alpha} u={u}: {got} vs {want}"))?;
            worst_psi = worst_psi.max(e);
        }
    }
    Ok(format!("biconjugation max rel {worst_bi:.1e}, Δ′ constant {c:.12}, Ψ composition max rel {worst_psi:.1e}"))
}

fn gaussian_slope() -> Check {
    let params = ScenarioParams { q: 4.0, alpha: 12.0, ..ScenarioParams::default() };
    let s = params.rho_exponent().map_err(|e| e.to_string())?;
    let predicted = (params.q * params.alpha - 2.0 * params.q - 2.0 * params.alpha) / (params.q * (params.alpha - 2.0))
        * (params.q - 2.0)
        / params.q;
    ensure((predicted - 0.2).abs() < 1e-15, || format!("predicted slope {predicted}"))?;
    let quad = DiskQuadrature::graded(12, 4.0, 12, 16).map_err(|e| e.to_string())?;
    let ns = [10.0, 100.0, 1000.0, 10000.0];
    let mut slopes = Vec::new();
    for map in [ConformalMap::identity(), pp(0.3, 2), pp(0.5, 3)] {
        let reports = gaussian_sweep(&map, &ns, &params, &quad).map_err(|e| e.to_string())?;
        for (r, n) in reports.iter().zip(ns) {
            let log_norm = r.intermediate("log_rho_norm").ok_or("missing log_rho_norm")?;
            let domination = (PI / (n * s)).ln() / s;
            ensure(log_norm <= domination, || format!("{} n={n}: ln‖ρ‖ {log_norm} > {domination}", map.label()))?;
        }
        let slope = sweep_slope(&reports).ok_or("slope fit failed")?;
        ensure(rel(slope, predicted) < 0.05, || format!("{}: slope {slope}", map.label()))?;
        slopes.push(slope);
    }
    Ok(format!("slopes {slopes:.6?} vs predicted {predicted}; quadrature norms below (pi/(ns))^(1/s)"))
}

fn log_space_constants() -> Check {
    let mut worst = 0.0f64;
    for (alpha, k) in [(4.0, 1.2), (12.0, 1.05), (3.0, 1.5), (2.5, 1.01)] {
        let base = log_c_j(alpha, k, PI).map_err(|e| e.to_string())?;
        for t in [1e-6, 0.5, 3.0, 1e8] {
            let scaled = log_c_j(alpha, k, PI * t).map_err(|e| e.to_string())?;
            let area_term = |l: &densbound::bounds::LogCJ| l.terms.iter().find(|(n, _)| *n == "log_area").map(|x| x.1);
            ensure(area_term(&scaled) == Some((PI * t).ln()), || "log_area term is not ln area".into())?;
            let same = base.terms.iter().zip(&scaled.terms).all(|(a, b)| a.0 == "log_area" || a == b);
            ensure(same, || "area changes an area-free term".into())?;
            let e = (scaled.value - base.value - t.ln()).abs() / base.value.abs();
            ensure(e <= 1e-12, || format!("alpha={alpha} K={k} t={t}: linearity {e:e}"))?;
            worst = worst.max(e);
        }
        ensure(rel(base.recompose(), base.value) <= 1e-12, || "log C_J recomposition".into())?;
        let tilde = log_c_tilde_j(alpha, k, 1.5, PI).map_err(|e| e.to_string())?;
        ensure((tilde.recompose() - tilde.loglog).abs() <= 1e-12 * tilde.loglog.abs().max(1.0), || {
            "log C~_J recomposition".into()
        })?;
    }
    // nothing in the log-space pipeline may panic, whatever the inputs
    let quad = quad();
    let mut panics = 0;
    for alpha in [2.0 + 1e-12, 2.5, 4.0, 40.0, 1e6] {
        for k in [1.0, 1.0 + 1e-12, 1.2, 3.0] {
            for area in [1e-300, 1e-8, PI, 1e12, 1e300] {
                let run = catch_unwind(AssertUnwindSafe(|| {
                    let _ = log_c_j(alpha, k, area);
                    let _ = log_c_tilde_j(alpha, k, 1.5, area);
                }));
                panics += run.is_err() as usize;
            }
            let params = ScenarioParams { alpha, k, ..ScenarioParams::default() };
            let run = catch_unwind(AssertUnwindSafe(|| {
                for rho in
                    [DensityField::Constant(1e-200), DensityField::Constant(1e200), DensityField::Gaussian { n: 1e4 }]
                {
                    let _ = mu_lower_quasidisc(&ConformalMap::identity(), &rho, &params, &quad);
                    let _ = mu_lower_orlicz_quasidisc(&ConformalMap::identity(), &rho, &params, 0.7, &quad);
                }
            }));
            panics += run.is_err() as usize;
        }
    }
    ensure(panics == 0, || format!("{panics} panics"))?;
    Ok(format!("area linearity max rel {worst:.1e}, recomposition to 1e-12, no panics on extreme inputs"))
}

fn change_of_variables() -> Check {
    let q = quad();
    let e = rel(image_area(&pp(0.5, 2), &q), 1.125 * PI);
    ensure(e < 1e-10, || format!("area pp(0.5,2) rel err {e:e}"))?;
    let mut worst = 0.0f64;
    for map in all_maps() {
        let exact = map.closed_form_area().ok_or_else(|| format!("{}: no closed form", map.label()))?;
        let e = rel(image_area(&map, &q), exact);
        ensure(e < 1e-10, || format!("{}: area rel err {e:e}", map.label()))?;
        worst = worst.max(e);
    }
    let mut factors = Vec::new();
    for map in [ConformalMap::identity(), pp(0.5, 2), pp(0.3, 3)] {
        let exact = map.closed_form_area().unwrap();
        let errs = (3..=6)
            .map(|l| mesh_from_map(&map, l).map(|m| (m.total_area() - exact).abs()))
            .collect::<densbound::Result<Vec<_>>>()
            .map_err(|e| e.to_string())?;
        for w in errs.windows(2) {
            let f = w[0] / w[1];
            ensure((3.0..=5.0).contains(&f), || format!("{}: mesh area errors {errs:?}", map.label()))?;
            factors.push(f);
        }
    }
    Ok(format!("quadrature areas max rel {worst:.1e}; mesh area error ratios {factors:.2?}"))
}

fn homogeneity() -> Check {
    let q = quad();
    let params = ScenarioParams::default();
    let phi = YoungFunction::log_pow(params.eps).unwrap();
    let (mut worst_k, mut worst_b) = (0.0f64, 0.0f64);
    let mut quasi = Vec::new();
    for map in pp_maps() {
        for rho in densities() {
            for c in [0.25, 3.0] {
                let scaled = rho.clone().scaled(c);
                let k = |r: &DensityField| -> densbound::Result<[f64; 3]> {
                    Ok([k_esssup(&map, r, &q)?.value, k_q(&map, r, params.q, &q)?, k_phi(&map, r, &phi, &q)?])
                };
                let (k0, k1) = (k(&rho).map_err(|e| e.to_string())?, k(&scaled).map_err(|e| e.to_string())?);
                for (a, b) in k0.iter().zip(k1) {
                    worst_k = worst_k.max(rel(b, c * a));
                }
                let bounds = |r: &DensityField| -> densbound::Result<Vec<BoundReport>> {
                    Ok(vec![
                        mu_lower_esssup(&map, r, &q)?,
                        mu_lower_kq(&map, r, params.p, params.q, &q)?,
                        mu_lower_orlicz(&map, r, params.eps, 0.7, &q)?,
                        mu_lower_quasidisc(&map, r, &params, &q)?,
                    ])
                };
                let (b0, b1) = (bounds(&rho).map_err(|e| e.to_string())?, bounds(&scaled).map_err(|e| e.to_string())?);
                for (a, b) in b0.iter().zip(&b1) {
                    let degree = (b.bound_log - a.bound_log) / c.ln();
                    if a.bound > 0.0 {
                        worst_b = worst_b.max(rel(b.bound, a.bound / c));
                    } else {
                        quasi.push(degree);
                    }
                }
            }
        }
    }
    let quasi_worst = quasi.iter().map(|d| (d + 1.0).abs()).fold(0.0, f64::max);
    let detail = format!(
        "K functionals max rel {worst_k:.1e}; esssup/lp_kq/orlicz bounds max rel {worst_b:.1e}; quasidisc degree {:.6} (|deg+1| up to {quasi_worst:.3})",
        quasi.first().copied().unwrap_or(f64::NAN)
    );
    if worst_k <= 1e-9 && worst_b <= 1e-9 && quasi_worst <= 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let criteria: [(&str, Option<Duration>, fn() -> Check); 9] = [
        ("disk reference eigenvalue", Some(Duration::from_secs(30)), disk_reference),
        ("soundness suite", Some(Duration::from_secs(300)), soundness),
        ("tightness for the pullback density", None, tightness),
        ("Orlicz engine", None, orlicz_engine),
        ("Young-function identities", None, young_identities),
        ("Gaussian sweep slope and domination", None, gaussian_slope),
        ("log-space constants", None, log_space_constants),
        ("change-of-variables consistency", None, change_of_variables),
        ("homogeneity in the density", None, homogeneity),
    ];
    let mut unexpected = 0;
    let mut passed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let id = i + 1;
        let start = Instant::now();
        let outcome = catch_unwind(f).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(d), Some(l)) if elapsed > l => Err(format!("{d}; runtime over {} s", l.as_secs())),
            (o, _) => o,
        };
        let secs = elapsed.as_secs_f64();
        match outcome {
            Ok(d) => {
                passed += 1;
                println!("PASS {id} {name} ({secs:.1} s): {d}");
            }
            Err(d) => {
                let known = KNOWN_CONFLICTS.contains(&id);
                unexpected += (!known) as usize;
                let note = if known { " [known conflict, see ledger]" } else { "" };
                println!("FAIL {id} {name} ({secs:.1} s): {d}{note}");
            }
        }
    }
    println!("acceptance: {passed}/9 passed");
    if unexpected > 0 {
        std::process::exit(1);
    }
}
