use mcbench::bundled;
use mcbench::engine::{run, ExecutionStrategy};
use mcbench::payoffs::bs_closed_form;
use mcbench::simcore::{gaussian, normal_cdf, uniform, Model, RngKey, ASSET_SHOCK, VARIANCE_SHOCK};
use mcbench::task::OptionTask;

const N: u64 = 100_000;

/// Kolmogorov-Smirnov statistic of `xs` against `cdf`.
fn ks(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

// 1% critical value of the one-sample KS statistic.
fn ks_critical(n: u64) -> f64 {
    1.628 / (n as f64).sqrt()
}

#[test]
fn gaussian_deviates_pass_kolmogorov_smirnov() {
    let xs: Vec<f64> = (0..N).map(|i| gaussian(RngKey::new(9, i, 0, ASSET_SHOCK))).collect();
    let d = ks(xs, normal_cdf);
    assert!(d < ks_critical(N), "D = {d}");
}

#[test]
fn gaussian_deviates_along_one_path_pass_kolmogorov_smirnov() {
    let xs: Vec<f64> = (0..N as u32)
        .map(|s| gaussian(RngKey::new(3, 17, s, VARIANCE_SHOCK)))
        .collect();
    let d = ks(xs, normal_cdf);
    assert!(d < ks_critical(N), "D = {d}");
}

#[test]
fn uniform_deviates_pass_kolmogorov_smirnov() {
    let xs: Vec<f64> = (0..N).map(|i| uniform(RngKey::new(5, i, 1, ASSET_SHOCK))).collect();
    let d = ks(xs, |x| x.clamp(0.0, 1.0));
    assert!(d < ks_critical(N), "D = {d}");
}

#[test]
fn shock_dimensions_are_uncorrelated() {
    let pairs: Vec<(f64, f64)> = (0..N)
        .map(|i| {
            (
                gaussian(RngKey::new(1, i, 2, ASSET_SHOCK)),
                gaussian(RngKey::new(1, i, 2, VARIANCE_SHOCK)),
            )
        })
        .collect();
    let n = N as f64;
    let (mx, my) = pairs.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let cov: f64 = pairs.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / n;
    let vx: f64 = pairs.iter().map(|(x, _)| (x - mx).powi(2)).sum::<f64>() / n;
    let vy: f64 = pairs.iter().map(|(_, y)| (y - my).powi(2)).sum::<f64>() / n;
    let rho = cov / (vx * vy).sqrt();
    assert!(rho.abs() < 4.0 / n.sqrt(), "rho = {rho}");
}

fn control(paths: u64) -> OptionTask {
    bundled::tasks()
        .resolve("bs-eu-control")
        .unwrap()
        .clone()
        .with_paths(paths)
}

#[test]
fn stderr_halves_when_paths_quadruple() {
    let small = run(&control(10_000), ExecutionStrategy::task_parallel(4), 1).unwrap();
    let large = run(&control(40_000), ExecutionStrategy::task_parallel(4), 1).unwrap();
    let ratio = small.stderr / large.stderr;
    assert!((2.0 / 1.5..=2.0 * 1.5).contains(&ratio), "ratio = {ratio}");
}

#[test]
fn confidence_intervals_cover_the_closed_form() {
    let task = control(20_000);
    let Model::Gbm(p) = task.model else { unreachable!() };
    let exact = bs_closed_form(&p, task.payoff.strike, task.maturity);
    let trials = 40;
    let covered = (0..trials)
        .filter(|&seed| {
            let r = run(&task, ExecutionStrategy::task_parallel(4), 1000 + seed).unwrap();
            (r.price - exact).abs() <= 1.96 * r.stderr
        })
        .count();
    // Nominal 95%; fewer than 32 of 40 would be a four-sigma shortfall.
    assert!(covered >= 32, "{covered} of {trials}");
}

#[test]
fn knock_out_prices_are_ordered_pathwise() {
    let tasks = bundled::tasks();
    let price = |d: &str| {
        let t = tasks.resolve(d).unwrap().clone().with_paths(20_000).with_steps(128);
        run(&t, ExecutionStrategy::task_parallel(4), 5).unwrap().price
    };
    let (eu, ba, dob) = (price("he-eu"), price("he-ba"), price("he-do"));
    assert!(eu >= ba && ba >= dob && dob >= 0.0, "{eu} {ba} {dob}");
}

#[test]
fn digital_price_is_a_discounted_probability() {
    let t = bundled::tasks()
        .resolve("he-di")
        .unwrap()
        .clone()
        .with_paths(20_000)
        .with_steps(128);
    let r = run(&t, ExecutionStrategy::task_parallel(4), 5).unwrap();
    let cap = t.payoff.digital_amount * (-t.model.rate() * t.maturity).exp();
    assert!(r.price > 0.0 && r.price <= cap, "{} vs {cap}", r.price);
}

#[test]
fn asian_call_is_cheaper_than_european() {
    let asian = bundled::tasks()
        .resolve("bl-as")
        .unwrap()
        .clone()
        .with_paths(20_000)
        .with_steps(64);
    let european = control(20_000);
    let a = run(&asian, ExecutionStrategy::task_parallel(4), 8).unwrap();
    let e = run(&european, ExecutionStrategy::task_parallel(4), 8).unwrap();
    assert!(a.price < e.price, "{} vs {}", a.price, e.price);
}
