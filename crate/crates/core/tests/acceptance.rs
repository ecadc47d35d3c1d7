//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so the report is always printed. Exits non-zero if
//! any criterion fails.

use std::fs;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cloudburst::advisor::{distribute_processors, NodeSizes, Policy, Rounding};
use cloudburst::baselines::BaselineKind;
use cloudburst::cost::CostModel;
use cloudburst::coupled::CoupledModel;
use cloudburst::profile::{fit_profile, ApplicationProfile, TimeUnit, TimingObservation};
use cloudburst::sweep::{
    aggregate_by_ratio, crossover_ratio, run_sensitivity, run_sweep, sensitivity_table, write_sensitivity,
    write_sweep, Decider, Decision, SensitivityRow, SweepConfig, SweepResult, DEFAULT_ERRORS,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rel(x: f64, y: f64) -> f64 {
    if x == y {
        0.0
    } else {
        (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
    }
}

fn worked_examples() -> Outcome {
    let cloud: NodeSizes = "1,2,4,8,12,16".parse().unwrap();
    let local = NodeSizes::contiguous(200).unwrap();
    let budget_45 = distribute_processors(45.0, &cloud, Rounding::DownForBudget);
    let deadline_41 = distribute_processors(41.0, &cloud, Rounding::UpForDeadline);
    let up = distribute_processors(9.5, &local, Rounding::UpForDeadline);
    let down = distribute_processors(9.5, &local, Rounding::DownForBudget);
    let pass = budget_45 == [16, 16, 12]
        && deadline_41 == [16, 16, 12]
        && deadline_41.iter().sum::<u32>() == 44
        && up == [10]
        && down == [9];
    outcome(pass, format!("45 down -> {budget_45:?}, 41 up -> {deadline_41:?}, 9.5 -> up {up:?} / down {down:?}"))
}

/// Double-exponential quadrature of `f` over `(0, len)`, tolerant of an
/// integrable singularity at 0. `f` receives the distance from 0.
fn tanh_sinh(f: impl Fn(f64) -> f64, len: f64) -> f64 {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let sum_at = |h: f64| {
        let n = (6.0 / h) as i64;
        let mut total = 0.0;
        for j in -n..=n {
            let s = j as f64 * h;
            let u = half_pi * s.sinh();
            let w = 0.5 * len * half_pi * s.cosh() / u.cosh().powi(2);
            // Distance from the nearer end, computed without cancellation.
            let x = if s <= 0.0 { len / (1.0 + (-2.0 * u).exp()) } else { len - len / (1.0 + (2.0 * u).exp()) };
            if w == 0.0 || x <= 0.0 || !w.is_finite() {
                continue;
            }
            let v = f(x) * w;
            if v.is_finite() {
                total += v;
            }
        }
        total * h
    };
    let mut h = 0.5;
    let mut prev = sum_at(h);
    for _ in 0..10 {
        h /= 2.0;
        let next = sum_at(h);
        if (next - prev).abs() <= 1e-15 * next.abs() {
            return next;
        }
        prev = next;
    }
    prev
}

fn closed_form_vs_quadrature() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a = 10f64.powf(rng.random_range(0.0..4.0));
        let b = rng.random_range(-2.5..-1.2);
        let alpha = rng.random_range(0.01..0.2);
        let k = rng.random_range(0.5..3.5);
        let t = 10f64.powf(rng.random_range(-1.0..2.0));
        let model = CoupledModel::new(
            ApplicationProfile::new(a, b, TimeUnit::Hours).unwrap(),
            CostModel::with_ratio(alpha, k).unwrap(),
        )
        .unwrap();
        let exact = model.cost_of_time(t).unwrap();
        let numeric = tanh_sinh(|s| k * alpha * (s / a).powf(1.0 / b), t);
        worst = worst.max(rel(exact, numeric));
    }
    outcome(worst <= 1e-8, format!("100 random models, max relative gap {worst:.3e} (tolerance 1e-8)"))
}

fn round_trips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (mut profile_gap, mut cost_gap) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let a = 10f64.powf(rng.random_range(-1.0..4.0));
        let b = rng.random_range(-3.0..-1.05);
        let profile = ApplicationProfile::new(a, b, TimeUnit::Hours).unwrap();
        let p: u32 = rng.random_range(1..100_000);
        let t = profile.eval_time(p).unwrap();
        profile_gap = profile_gap.max(rel(profile.required_processors(t).unwrap(), f64::from(p)));

        let model = CoupledModel::new(profile, CostModel::with_ratio(rng.random_range(0.01..0.2), 1.5).unwrap()).unwrap();
        let hours = 10f64.powf(rng.random_range(-2.0..3.0));
        cost_gap = cost_gap.max(rel(model.time_of_cost(model.cost_of_time(hours).unwrap()).unwrap(), hours));
        let money = 10f64.powf(rng.random_range(-1.0..3.0));
        cost_gap = cost_gap.max(rel(model.cost_of_time(model.time_of_cost(money).unwrap()).unwrap(), money));
    }
    let pass = profile_gap <= 1e-9 && cost_gap <= 1e-9;
    outcome(pass, format!("profile inverse {profile_gap:.2e}, coupled inverse {cost_gap:.2e} (tolerance 1e-9)"))
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn fit_recovery() -> Outcome {
    let truths = [(1013.50, -1.58), (7004.86, -2.06)];
    let counts: Vec<u32> = (0..8).map(|i| 1u32 << i).collect();
    let mut noiseless = 0.0f64;
    for &(a, b) in &truths {
        let obs: Vec<_> = counts
            .iter()
            .map(|&p| TimingObservation::new(p, a * f64::from(p).powf(b), TimeUnit::Hours).unwrap())
            .collect();
        let fit = fit_profile(&obs).unwrap().profile;
        noiseless = noiseless.max(rel(fit.a(), a)).max(rel(fit.b(), b));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut noisy = 0.0f64;
    for trial in 0..50 {
        let (a, b) = truths[trial % 2];
        let obs: Vec<_> = counts
            .iter()
            .flat_map(|&p| [p, p])
            .map(|p| {
                let t = a * f64::from(p).powf(b) * (1.0 + 0.02 * normal(&mut rng));
                TimingObservation::new(p, t, TimeUnit::Hours).unwrap()
            })
            .collect();
        let fit = fit_profile(&obs).unwrap().profile;
        noisy = noisy.max(rel(fit.a(), a)).max(rel(fit.b(), b));
    }
    let pass = noiseless <= 1e-6 && noisy <= 0.05;
    outcome(pass, format!("noiseless max error {noiseless:.2e} (<= 1e-6), 2% noise over 50 trials max error {noisy:.4} (<= 0.05)"))
}

fn crossover(results: &[SweepResult]) -> Outcome {
    let rows = aggregate_by_ratio(results, Policy::DeadlineAware).unwrap();
    let advisor_at = |k: f64| rows.iter().find(|r| r.decider == Decider::Advisor && r.price_ratio == k);
    let (Some(low), Some(high)) = (advisor_at(1.8), advisor_at(2.2)) else {
        return outcome(false, "grid lacks K = 1.8 or K = 2.2");
    };
    // Exact integer comparisons: count / n within [lo, hi] percent.
    let within = |count: usize, n: usize, lo: usize, hi: usize| 100 * count >= lo * n && 100 * count <= hi * n;
    let local_ok = within(low.local_chosen, low.feasible, 61, 81);
    let cloud_ok = within(high.cloud_chosen(), high.feasible, 46, 66);
    let cross = crossover_ratio(&rows);
    let cross_ok = cross.is_some_and(|k| (1.8..=2.6).contains(&k));
    outcome(
        local_ok && cloud_ok && cross_ok && results.len() == 28_000,
        format!(
            "{} points; K=1.8 local-cheapest {}/{} = {:.4} (0.71 +/- 0.10); K=2.2 cloud-cheapest {}/{} = {:.4} (0.56 +/- 0.10); crossover {:?} (in [1.8, 2.6])",
            results.len(),
            low.local_chosen,
            low.feasible,
            low.local_chosen as f64 / low.feasible as f64,
            high.cloud_chosen(),
            high.feasible,
            high.cloud_chosen() as f64 / high.feasible as f64,
            cross,
        ),
    )
}

fn same_fraction(table: &[SensitivityRow], error: f64, policy: Policy) -> f64 {
    table.iter().find(|r| r.error == error && r.same_decision).map(|r| r.cell(policy).fraction).unwrap_or(f64::NAN)
}

fn sensitivity_trends(table: &[SensitivityRow]) -> Outcome {
    let mut failures = Vec::new();
    let mut lines = Vec::new();
    for policy in [Policy::DeadlineAware, Policy::BudgetAware] {
        let f = |e: f64| same_fraction(table, e, policy);
        lines.push(format!(
            "{policy}: same at -0.9/-0.5/-0.1/+0.1/+0.5/+0.9 = {:.3}/{:.3}/{:.3}/{:.3}/{:.3}/{:.3}",
            f(-0.9),
            f(-0.5),
            f(-0.1),
            f(0.1),
            f(0.5),
            f(0.9)
        ));
        if !(f(0.9) >= 0.85) {
            failures.push(format!("{policy} same-decision at +0.9 is {:.4} < 0.85", f(0.9)));
        }
        for sign in [-1.0, 1.0] {
            if !(f(sign * 0.1) >= f(sign * 0.5) && f(sign * 0.5) >= f(sign * 0.9)) {
                failures.push(format!("{policy} not monotone for sign {sign}"));
            }
        }
    }
    let budget_same = same_fraction(table, -0.9, Policy::BudgetAware);
    if !(1.0 - budget_same > budget_same) {
        failures.push(format!("budget at -0.9: different {:.4} <= same {budget_same:.4}", 1.0 - budget_same));
    }
    let detail = if failures.is_empty() {
        lines.join("; ")
    } else {
        format!("{}; FAILED: {}", lines.join("; "), failures.join("; "))
    };
    outcome(failures.is_empty(), detail)
}

fn objective(d: &Decision, policy: Policy) -> f64 {
    if !d.feasible {
        return f64::INFINITY;
    }
    match policy {
        Policy::DeadlineAware => d.cost,
        Policy::BudgetAware => d.turnaround_hours,
    }
}

fn dominance(results: &[SweepResult]) -> Outcome {
    let mut violations = 0usize;
    let mut first = None;
    let mut checked = 0usize;
    for r in results {
        for run in &r.runs {
            let get = |d: Decider| objective(run.decision(d).unwrap(), run.policy);
            let advisor = get(Decider::Advisor);
            let local = get(Decider::Baseline(BaselineKind::AlwaysLocal));
            let cloud = get(Decider::Baseline(BaselineKind::AlwaysCloud));
            let worst = get(Decider::Baseline(BaselineKind::WorstCase));
            let metric = run.decision(Decider::Advisor).unwrap().relative_to_local;
            let ok = advisor <= local
                && advisor <= cloud
                && worst >= advisor
                && metric.is_none_or(|m| (-1.0..=0.0).contains(&m));
            checked += 1;
            if !ok {
                violations += 1;
                first.get_or_insert((r.index, run.policy));
            }
        }
    }
    outcome(violations == 0, format!("{checked} (point, policy) pairs checked, {violations} violations, first {first:?}"))
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn determinism(config: &SweepConfig, first: &[SweepResult]) -> Outcome {
    let run = |results: &[SweepResult]| {
        let dir = tempfile::tempdir().unwrap();
        write_sweep(dir.path(), &config.fingerprint(), results).unwrap();
        let records = run_sensitivity(config, &DEFAULT_ERRORS).unwrap();
        let table = sensitivity_table(&records).unwrap();
        write_sensitivity(dir.path(), &config.fingerprint_with("errors"), &records, &table).unwrap();
        dir_bytes(dir.path())
    };
    let a = run(first);
    let b = run(&run_sweep(config).unwrap());
    let same = a == b;
    let size: usize = a.iter().map(|(_, bytes)| bytes.len()).sum();
    outcome(same && a.len() == 5, format!("{} files, {size} bytes, identical across runs: {same}", a.len()))
}

fn main() {
    let mut report: Vec<(usize, &str, Outcome, f64)> = Vec::new();
    let mut check = |n: usize, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let secs = start.elapsed().as_secs_f64();
        println!("criterion {n} {name}: {} ({secs:.2}s) | {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        report.push((n, name, o, secs));
    };

    check(1, "worked-example fidelity", &mut worked_examples);
    check(2, "closed form vs quadrature", &mut closed_form_vs_quadrature);
    check(3, "round trips", &mut round_trips);
    check(4, "fit recovery", &mut fit_recovery);

    let config = SweepConfig::default();
    let start = Instant::now();
    let results = run_sweep(&config).expect("default sweep runs");
    println!("(default sweep: {} points in {:.2}s)", results.len(), start.elapsed().as_secs_f64());

    check(5, "crossover reproduction", &mut || crossover(&results));
    check(6, "sensitivity trends", &mut || {
        let records = run_sensitivity(&config, &DEFAULT_ERRORS).expect("sensitivity runs");
        sensitivity_trends(&sensitivity_table(&records).unwrap())
    });
    check(7, "dominance", &mut || dominance(&results));
    check(8, "determinism", &mut || determinism(&config, &results));

    let failed: Vec<usize> = report.iter().filter(|(_, _, o, _)| !o.pass).map(|(n, ..)| *n).collect();
    println!("acceptance: {} of {} criteria passed", report.len() - failed.len(), report.len());
    if !failed.is_empty() {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
