//! Exit criteria, run without the libtest harness so that every criterion
//! prints its `PASS`/`FAIL` line. Extra arguments filter criteria by name.
//! Run with `cargo test -p gwtree --test acceptance`.

use std::panic::catch_unwind;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use gwtree::codings::{
    contour_from_heights, contour_from_tree, height_from_tree, height_from_walk, tree_from_walk, visit_times,
    walk_from_tree,
};
use gwtree::exactlaw::{check_absolute_continuity, enumerate_conditioned, geometric_half_exact, kemperman_check};
use gwtree::limits::{
    contour_limit_experiment, height_contour_gap_experiment, llt_experiment, lukasiewicz_marginal_experiment,
    progeny_asymptotics_experiment, ratio_vs_gamma_experiment, ContourConfig, GapConfig, LltConfig,
    MarginalConfig, ProgenyConfig, RatioConfig,
};
use gwtree::offspring::{FiniteVarianceLaw, OffspringLaw};
use gwtree::quadrature::{integrate, uniform_breaks};
use gwtree::report::ExperimentReport;
use gwtree::sampler::{sample_conditioned, sampler_law_exact, Method};
use gwtree::stable::{gaussian_density, StableLaw};

fn geo() -> OffspringLaw<f64> {
    OffspringLaw::geometric(0.5).unwrap()
}

fn stable15() -> OffspringLaw<f64> {
    OffspringLaw::stable(1.5).unwrap()
}

static REPORTED: AtomicBool = AtomicBool::new(false);

fn verdict(criterion: u32, ok: bool, elapsed: Duration, limit: Duration, detail: String) {
    REPORTED.store(true, Ordering::SeqCst);
    let timely = elapsed <= limit;
    let status = if ok && timely { "PASS" } else { "FAIL" };
    println!(
        "criterion {criterion}: {status} ({:.2}s of {}s) {detail}",
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    assert!(ok, "criterion {criterion} failed: {detail}");
    assert!(timely, "criterion {criterion} exceeded its time limit");
}

fn stat(report: &ExperimentReport, key: &str) -> String {
    format!("{key}={}", report.statistics[key])
}

fn criterion_1_sampler_exactness() {
    let started = Instant::now();
    let law = geo();
    let mut worst: f64 = 0.0;
    let mut exact_rational = true;
    for n in 2..=6 {
        let sampler = sampler_law_exact(&law.pmf_vec(n), n).unwrap();
        let exact = enumerate_conditioned(&law, n).unwrap();
        assert_eq!(sampler.len(), exact.len());
        for ((ts, ps), (te, pe)) in sampler.iter().zip(&exact) {
            assert_eq!(ts, te);
            worst = worst.max((ps - pe).abs());
        }
        let pmf = geometric_half_exact(n);
        let rational = sampler_law_exact(&pmf, n).unwrap();
        let reference = gwtree::exactlaw::enumerate_conditioned_weights(&pmf, n).unwrap();
        exact_rational &= rational == reference;
    }
    verdict(
        1,
        worst <= 1e-12 && exact_rational,
        started.elapsed(),
        Duration::from_secs(10),
        format!("max per-tree gap {worst:.3e}, rational laws equal: {exact_rational}"),
    );
}

fn criterion_2_kemperman_identity() {
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    for law in [geo(), stable15(), OffspringLaw::explicit(vec![0.3, 0.45, 0.0, 0.25]).unwrap()] {
        let check = kemperman_check(&law, 14, 4);
        worst = worst.max(check.max_gap);
    }
    verdict(2, worst <= 1e-12, started.elapsed(), Duration::from_secs(30), format!("max gap {worst:.3e}"));
}

fn criterion_3_absolute_continuity_identity() {
    let started = Instant::now();
    let truncated = stable15().truncated(32).unwrap();
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for law in [geo(), truncated] {
        for (n, a) in [(4, 0.5), (6, 0.5), (6, 0.25)] {
            let r = check_absolute_continuity(&law, n, a).unwrap();
            worst = worst.max(r.statistics["max_discrepancy"].as_f64().unwrap());
            ok &= r.passed();
        }
    }
    verdict(
        3,
        ok && worst <= 1e-10,
        started.elapsed(),
        Duration::from_secs(60),
        format!("max discrepancy {worst:.3e}"),
    );
}

fn criterion_4_local_limit_theorem() {
    let started = Instant::now();
    let g = llt_experiment(&geo(), &LltConfig::default()).unwrap();
    let s = llt_experiment(&stable15(), &LltConfig { e1_bound: None, ..LltConfig::default() }).unwrap();
    verdict(
        4,
        g.passed() && s.passed(),
        started.elapsed(),
        Duration::from_secs(120),
        format!(
            "geometric {} {}; stable {} {}",
            stat(&g, "e1"),
            stat(&g, "e2"),
            stat(&s, "e1"),
            stat(&s, "e2")
        ),
    );
}

fn criterion_5_progeny_asymptotics() {
    let started = Instant::now();
    let r = progeny_asymptotics_experiment(&geo(), &ProgenyConfig::default()).unwrap();
    let r1 = r.statistics["r1"].as_array().unwrap().last().unwrap().as_f64().unwrap();
    let ratio = r.statistics["tail_over_point"].as_array().unwrap().last().unwrap().as_f64().unwrap();
    let ok = (0.95..=1.05).contains(&r1) && (ratio / 2.0 - 1.0).abs() <= 0.05;
    verdict(
        5,
        ok && r.passed(),
        started.elapsed(),
        Duration::from_secs(60),
        format!("P[ζ=2048]·2√π·n^1.5 = {r1:.5}, P[ζ≥n]/(nP[ζ=n]) = {ratio:.5}"),
    );
}

fn criterion_6_ratio_against_gamma() {
    let started = Instant::now();
    let g = ratio_vs_gamma_experiment(&geo(), &RatioConfig::default()).unwrap();
    let s = ratio_vs_gamma_experiment(&stable15(), &RatioConfig::default()).unwrap();
    verdict(
        6,
        g.passed() && s.passed(),
        started.elapsed(),
        Duration::from_secs(180),
        format!("geometric {}; stable {}", stat(&g, "sup_gap"), stat(&s, "sup_gap")),
    );
}

/// `int_0^inf q_s(x) ds` by quadrature in `log s`, plus the first-order tail
/// `theta p_1(0) x S^(-1/theta)` beyond `S`.
fn passage_total_by_time_quadrature(law: &StableLaw<f64>, x: f64) -> f64 {
    let th = law.theta();
    // below this time p_1 is evaluated beyond -20, where it is negligible
    let lo = th * (x / 20.0f64).ln();
    let hi = 14.0f64;
    let r = integrate(
        |u: f64| {
            let s = u.exp();
            s * law.first_passage_density(s, x).unwrap()
        },
        &uniform_breaks(lo, hi, 40),
        1e-9,
        20_000,
    )
    .unwrap();
    r.value + th * law.p1_at_zero() * x * (-hi / th).exp()
}

fn criterion_7_stable_numerics() {
    let started = Instant::now();
    let mut checks = Vec::new();
    let mut ok = true;
    for theta in [1.3, 1.5, 1.8, 2.0] {
        let law = StableLaw::new(theta).unwrap();
        let cut = 200.0;
        let body = integrate(
            |x: f64| law.density_p1_quadrature(x).unwrap(),
            &uniform_breaks(-30.0, cut, 230),
            1e-10,
            50_000,
        )
        .unwrap()
        .value;
        let total = body + (1.0 - law.cdf_quadrature(cut).unwrap());
        ok &= (total - 1.0).abs() <= 1e-6;
        let p0 = law.density_p1_quadrature(0.0).unwrap();
        ok &= (p0 - law.p1_at_zero()).abs() <= 1e-7;
        checks.push(format!("θ={theta}: ∫p1-1={:.1e}, p1(0) gap={:.1e}", total - 1.0, p0 - law.p1_at_zero()));
        for x in [0.5, 1.0, 2.0] {
            let fourier = law.passage_integral(0.0, x).unwrap();
            let by_time = passage_total_by_time_quadrature(&law, x);
            ok &= (fourier - 1.0).abs() <= 1e-5 && (by_time - 1.0).abs() <= 1e-5;
        }
    }
    let gauss = StableLaw::new(2.0).unwrap();
    let mut gauss_gap: f64 = 0.0;
    for i in 0..=120 {
        let x = -6.0 + 0.1 * i as f64;
        gauss_gap = gauss_gap.max((gauss.density_p1_quadrature(x).unwrap() - gaussian_density(x)).abs());
    }
    ok &= gauss_gap <= 1e-8;
    let tail = gauss.zeta_tail(1.0).unwrap();
    let tail_gap = (tail - 1.0 / std::f64::consts::PI.sqrt()).abs();
    ok &= tail_gap <= 1e-12;
    verdict(
        7,
        ok,
        started.elapsed(),
        Duration::from_secs(60),
        format!("{}; gaussian gap {gauss_gap:.1e}; N(ζ>1) gap {tail_gap:.1e}", checks.join("; ")),
    );
}

fn criterion_8_scaling_limit() {
    let started = Instant::now();
    let law = FiniteVarianceLaw::try_from(geo()).unwrap();
    let contour = contour_limit_experiment(&law, &ContourConfig::default()).unwrap();
    let gap_stable = height_contour_gap_experiment(
        &stable15(),
        &GapConfig { n_list: vec![1_000, 10_000], replicates: 200, ..GapConfig::default() },
    )
    .unwrap();
    let gap_geo = height_contour_gap_experiment(&geo(), &GapConfig::default()).unwrap();
    let marginal_geo = lukasiewicz_marginal_experiment(&geo(), &MarginalConfig::default()).unwrap();
    let marginal_stable = lukasiewicz_marginal_experiment(&stable15(), &MarginalConfig::default()).unwrap();
    let parts = [
        ("contour", contour.passed()),
        ("gap_geometric", gap_geo.passed()),
        ("gap_stable", gap_stable.passed()),
        ("marginal_geometric", marginal_geo.passed()),
        ("marginal_stable", marginal_stable.passed()),
    ];
    let failed: Vec<&str> = parts.iter().filter(|p| !p.1).map(|p| p.0).collect();
    // Exact mean height of a uniform plane tree with 10^4 vertices over 100,
    // from the bounded Dyck-path recursion; about sqrt(pi) - 1.5/100.
    let finite_n_mean = 1.757_446_465_253_396;
    let max_mean = &contour.statistics["max_mean"];
    let z_finite = (max_mean["mean"].as_f64().unwrap() - finite_n_mean) / max_mean["std_error"].as_f64().unwrap();
    verdict(
        8,
        failed.is_empty(),
        started.elapsed(),
        Duration::from_secs(300),
        format!(
            "{} {} {} {} (z against the exact n = 10^4 mean {z_finite:.2}); gap {} / {}; Γ-weight {} / {}; failed parts {failed:?}",
            stat(&contour, "ks_marginal"),
            stat(&contour, "reversal_ks"),
            stat(&contour, "max_mean"),
            stat(&contour, "max_mean_z"),
            stat(&gap_geo, "mean_gap"),
            stat(&gap_stable, "mean_gap"),
            stat(&marginal_geo, "mean_gamma_given_survival"),
            stat(&marginal_stable, "mean_gamma_given_survival"),
        ),
    );
}

fn criterion_9_performance() {
    let law = geo();
    let mut times = Vec::new();
    for seed in 0..5 {
        let started = Instant::now();
        let tree = sample_conditioned(&law, 1_000_000, Method::Rejection, seed).unwrap();
        times.push(started.elapsed());
        assert_eq!(tree.size(), 1_000_000);
    }
    times.sort();
    let median = times[2];
    let big = sample_conditioned(&law, 10_000_000, Method::Rejection, 99).unwrap();
    let started = Instant::now();
    let walk = walk_from_tree(&big);
    let back = tree_from_walk(&walk);
    let heights = height_from_walk(&walk);
    let heights_direct = height_from_tree(&big);
    let contour = contour_from_heights(&heights);
    let contour_direct = contour_from_tree(&big);
    let visits = visit_times(&big);
    let codings = started.elapsed();
    assert_eq!(back, big);
    assert_eq!(heights, heights_direct);
    assert_eq!(contour, contour_direct);
    assert_eq!(visits.len(), big.size() + 1);
    let ok = median <= Duration::from_secs(60) && codings <= Duration::from_secs(10);
    verdict(
        9,
        ok,
        median + codings,
        Duration::from_secs(70),
        format!("median n=1e6 sample {:.3}s, codings at 1e7 {:.3}s", median.as_secs_f64(), codings.as_secs_f64()),
    );
}

fn main() -> ExitCode {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria = [
        (1, "criterion_1_sampler_exactness", criterion_1_sampler_exactness as fn()),
        (2, "criterion_2_kemperman_identity", criterion_2_kemperman_identity as fn()),
        (3, "criterion_3_absolute_continuity_identity", criterion_3_absolute_continuity_identity as fn()),
        (4, "criterion_4_local_limit_theorem", criterion_4_local_limit_theorem as fn()),
        (5, "criterion_5_progeny_asymptotics", criterion_5_progeny_asymptotics as fn()),
        (6, "criterion_6_ratio_against_gamma", criterion_6_ratio_against_gamma as fn()),
        (7, "criterion_7_stable_numerics", criterion_7_stable_numerics as fn()),
        (8, "criterion_8_scaling_limit", criterion_8_scaling_limit as fn()),
        (9, "criterion_9_performance", criterion_9_performance as fn()),
    ];
    let mut failed = Vec::new();
    let mut ran = 0;
    for (n, name, run) in criteria {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        REPORTED.store(false, Ordering::SeqCst);
        if catch_unwind(run).is_err() {
            if !REPORTED.load(Ordering::SeqCst) {
                println!("criterion {n}: FAIL (error before a verdict)");
            }
            failed.push(n);
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {failed:?}");
        ExitCode::FAILURE
    }
}
