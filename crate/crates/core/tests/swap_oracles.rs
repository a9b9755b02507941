//! Swap-count and type-2 analytics against Monte Carlo, quadrature and simulation.

use nudgem::fluid::response_tails;
use nudgem::policy::NamedPolicy;
use nudgem::resp2::{extra_wait_ccdf, r2_ccdf, w2_ccdf, W2Model};
use nudgem::sim::{empirical_ccdf, simulate, JobClass, Metric, SimConfig, SimPolicy};
use nudgem::swap::{
    mean_response, mean_swaps, mean_swaps_at, mean_swaps_quadrature, priority_mean_response, swap_pmf,
    workload_ccdf, SwapChain,
};
use nudgem::{decay_rate, JobMix, PhaseType, SizeShape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fig5a() -> JobMix {
    JobMix::from_ratio(2.0 / 3.0, 4.0, 0.7, SizeShape::Exp, SizeShape::Exp).unwrap()
}

/// A type-2 job that must wait `s` is passed by each type-1 job among the next
/// `m` arrivals that arrives while it still waits; each pass adds that job's size.
/// Returns the number of passes and the added wait.
fn tagged_run(mix: &JobMix, m: usize, s: f64, rng: &mut ChaCha8Rng) -> (usize, f64) {
    let mut wait = s;
    let mut clock = 0.0;
    let mut passes = 0;
    let mut extra = 0.0;
    for _ in 0..m {
        let u: f64 = rng.random();
        clock += -(1.0 - u).ln() / mix.lambda();
        if clock >= wait {
            break;
        }
        if rng.random::<f64>() < mix.p() {
            let x = mix.ph1().sample(rng);
            passes += 1;
            wait += x;
            extra += x;
        }
    }
    (passes, extra)
}

fn within(est: f64, se: f64, target: f64) -> bool {
    (est - target).abs() <= 3.0 * se + 1e-12
}

#[test]
fn conditional_pmf_matches_monte_carlo() {
    let mix = fig5a();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let reps = 1_000_000;
    for (m, s) in [(1usize, 1.0), (2, 2.0)] {
        let chain = SwapChain::new(&mix, m).unwrap();
        let pmf = swap_pmf(&chain, s).unwrap();
        let mut counts = vec![0u64; m + 1];
        for _ in 0..reps {
            counts[tagged_run(&mix, m, s, &mut rng).0] += 1;
        }
        for (k, &c) in counts.iter().enumerate() {
            let f = c as f64 / reps as f64;
            let se = (f * (1.0 - f) / reps as f64).sqrt();
            assert!(within(f, se, pmf.probs[k]), "m = {m}, k = {k}: {f} vs {}", pmf.probs[k]);
        }
    }
    let pmf = swap_pmf(&SwapChain::new(&mix, 1).unwrap(), 1.0).unwrap();
    assert!((pmf.probs[1] - 2.0 / 3.0 * (1.0 - (-0.7f64).exp())).abs() < 1e-12);
}

#[test]
fn extra_wait_matches_monte_carlo() {
    let mix = fig5a();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let reps = 400_000;
    let (m, s) = (1, 50.0);
    let samples: Vec<f64> = (0..reps).map(|_| tagged_run(&mix, m, s, &mut rng).1).collect();
    for t in [0.0, 0.25, 1.0, 2.0] {
        let f = samples.iter().filter(|&&x| x > t).count() as f64 / reps as f64;
        let se = (f * (1.0 - f) / reps as f64).sqrt();
        let exact = extra_wait_ccdf(&mix, m, s, t).unwrap();
        assert!(within(f, se, exact), "t = {t}: {f} vs {exact}");
    }
    // Mass of the extra wait equals the probability of at least one pass.
    for m in 1..=3 {
        let chain = SwapChain::new(&mix, m).unwrap();
        let none = swap_pmf(&chain, 2.0).unwrap().probs[0];
        let mass = extra_wait_ccdf(&mix, m, 2.0, 0.0).unwrap();
        assert!((mass - (1.0 - none)).abs() < 1e-12);
        assert_eq!(extra_wait_ccdf(&mix, m, 0.0, 1.0).unwrap(), 0.0);
    }
}

#[test]
fn mean_swaps_identities() {
    let mix = fig5a();
    let direct = mean_swaps(&mix, 5).unwrap();
    let quad = mean_swaps_quadrature(&mix, 5).unwrap();
    assert!((direct - quad).abs() < 1e-6, "{direct} vs {quad}");
    for m in 1..=3 {
        let chain = SwapChain::new(&mix, m).unwrap();
        assert_eq!(mean_swaps_at(&chain, 0.0).unwrap(), 0.0);
        let mut prev = 0.0;
        for i in 0..40 {
            let v = mean_swaps_at(&chain, 0.25 * i as f64).unwrap();
            assert!(v >= prev - 1e-14);
            prev = v;
        }
    }
    let tiny = JobMix::from_ratio(1e-8, 4.0, 0.7, SizeShape::Exp, SizeShape::Exp).unwrap();
    assert!(mean_swaps(&tiny, 3).unwrap() < 1e-6);
}

#[test]
fn mean_response_orderings_and_simulation() {
    let mix = fig5a();
    let info = decay_rate(&mix).unwrap();
    let m = nudgem::asymptotics::m_opt(&info);
    let r = mean_response(&mix, m).unwrap();
    let prio = priority_mean_response(&mix).unwrap();
    assert!(prio <= r.nudge && r.nudge < r.fcfs);
    let stats = simulate(&SimConfig::new(mix.clone(), SimPolicy::Named(NamedPolicy::NudgeM { m }), 1_000_000, 8)).unwrap();
    assert!(stats.class(JobClass::Any).mean_response.within(r.nudge, 3.0));

    let e = PhaseType::exponential(1.0).unwrap();
    let same = JobMix::new(0.5, e.clone(), e, 0.7).unwrap();
    let r = mean_response(&same, 4).unwrap();
    assert!((r.nudge - r.fcfs).abs() < 1e-12);
    assert!((r.fcfs - 1.0 / 0.3).abs() < 1e-12);
}

#[test]
fn workload_tail_prefactor() {
    let mix = fig5a();
    let info = decay_rate(&mix).unwrap();
    let t = 40.0 / info.theta_z;
    let scaled = (info.theta_z * t).exp() * workload_ccdf(&mix, t).unwrap();
    assert!((scaled / info.c_z - 1.0).abs() < 1e-6);
}

#[test]
fn type2_wait_limits() {
    let mix = fig5a();
    assert!((w2_ccdf(&mix, 3, 0.0).unwrap() - 0.7).abs() < 1e-12);
    // Without type-1 arrivals nobody passes a type-2 job.
    let rare_type1 = JobMix::from_ratio(1e-9, 4.0, 0.7, SizeShape::Exp, SizeShape::Exp).unwrap();
    for t in [0.5, 2.0, 10.0] {
        let a = w2_ccdf(&rare_type1, 3, t).unwrap();
        let b = workload_ccdf(&rare_type1, t).unwrap();
        assert!((a - b).abs() < 1e-6);
    }
    let model = W2Model::new(&mix, 4).unwrap();
    assert!((model.r2_ccdf(0.0).unwrap() - 1.0).abs() < 1e-12);
    for i in 0..30 {
        let t = 0.7 * i as f64;
        assert!(model.r2_ccdf(t).unwrap() >= model.w2_ccdf(t).unwrap() - 1e-14);
    }
}

#[test]
fn type2_response_by_quadrature() {
    // P[R2 > t] = P[W2 > t] + (1-λ)P[X2 > t] + ∫_0^t f_W2(u) P[X2 > t-u] du, with f_W2 = -d/du P[W2 > u].
    let mix = JobMix::from_ratio(
        2.0 / 3.0,
        4.0,
        0.6,
        SizeShape::Erlang { stages: 2 },
        SizeShape::Hyperexp { scv: 2.0, f: 0.5 },
    )
    .unwrap();
    let model = W2Model::new(&mix, 2).unwrap();
    let tm = model.generator().clone();
    let v = model.terminal().clone();
    let init = model.initial().clone();
    let x2 = mix.ph2().clone();
    let size_tail = |u: f64| -> f64 {
        let e = nudgem::linalg::expm(x2.generator(), u).unwrap().value;
        (x2.alpha() * e * nudgem::linalg::ones(x2.phases()))[0]
    };
    for t in [0.5, 2.0, 6.0] {
        let density = |u: f64| -> f64 {
            let e = nudgem::linalg::expm(&tm, u).unwrap().value;
            -(&init * e * &tm * &v)[0] * size_tail(t - u)
        };
        let conv = quadrature::integrate(density, 0.0, t, 1e-11).integral;
        let expected = model.w2_ccdf(t).unwrap() + (1.0 - mix.lambda()) * size_tail(t) + conv;
        let got = r2_ccdf(&mix, 2, t).unwrap();
        assert!((got - expected).abs() < 1e-8, "t = {t}: {got} vs {expected}");
    }
}

#[test]
fn type2_response_matches_simulation() {
    let mix = fig5a();
    let times = vec![1.0, 5.0, 10.0, 20.0];
    let cfg = SimConfig::new(mix.clone(), SimPolicy::Named(NamedPolicy::NudgeM { m: 5 }), 1_000_000, 55)
        .with_times(times.clone());
    let stats = simulate(&cfg).unwrap();
    let tails = response_tails(&mix, 5, &times).unwrap();
    for tail in tails {
        let t = tail.t;
        let r2 = empirical_ccdf(&stats, JobClass::Type2, Metric::Response, t).unwrap();
        assert!(r2.within(tail.type2, 3.0), "type-2 t = {t}: {r2:?} vs {}", tail.type2);
        let r1 = empirical_ccdf(&stats, JobClass::Type1, Metric::Response, t).unwrap();
        assert!(r1.within(tail.type1, 3.0), "type-1 t = {t}: {r1:?} vs {}", tail.type1);
    }
}
