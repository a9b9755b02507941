//! Decay rate and prefactors of the workload, ATIR of Nudge-M and of the
//! general policy family, heavy-traffic limits.

use crate::error::{Error, Result};
use crate::linalg;
use crate::phtype::JobMix;
use crate::policy::{NamedPolicy, PolicyFn};
use crate::tol;

/// Largest window accepted by [`family_prefactors`]; the type-2 sum runs over `2^(2M)` strings.
pub const FAMILY_CAP: usize = 6;

/// Largest window accepted by [`verify_optimality`].
pub const ENUMERATION_CAP: usize = 3;

/// Exponential decay rate and prefactor of the FCFS workload, together with
/// the size transforms evaluated at minus the decay rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayInfo {
    pub theta_z: f64,
    pub c_z: f64,
    /// `p S1(-theta) / S(-theta)`.
    pub w1: f64,
    /// `(1-p) / S(-theta)`.
    pub w: f64,
    pub p: f64,
    /// Type-1 size transform at `-theta_z` (infinite when type 1 never occurs and the transform diverges).
    pub lt1: f64,
    /// Type-2 size transform at `-theta_z`.
    pub lt2: f64,
    /// Size transform of a random job at `-theta_z`.
    pub lt: f64,
}

/// Type-1 and type-2 waiting-time prefactors with the resulting ATIR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtirReport {
    pub c_w1: f64,
    pub c_w2: f64,
    pub atir: f64,
}

impl AtirReport {
    fn from_prefactors(info: &DecayInfo, c_w1: f64, c_w2: f64) -> Self {
        let p = info.p;
        let mut atir = 1.0;
        if p > 0.0 {
            atir -= p * c_w1 * info.lt1 / (info.c_z * info.lt);
        }
        if p < 1.0 {
            atir -= (1.0 - p) * c_w2 * info.lt2 / (info.c_z * info.lt);
        }
        Self { c_w1, c_w2, atir }
    }
}

/// Decay rate `theta_z` (minus the dominant eigenvalue of `T`) and prefactor `c_z`
/// of the workload tail, cross-checked against the root of `lambda (S(-theta) - 1) = theta`.
pub fn decay_rate(mix: &JobMix) -> Result<DecayInfo> {
    let lambda = mix.lambda();
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Instability { lambda });
    }
    // Phases of a type that never arrives are unreachable and would pollute the spectrum.
    let n1 = mix.ph1().phases();
    let keep: Vec<usize> = (0..mix.phases())
        .filter(|&i| if i < n1 { mix.p() > 0.0 } else { mix.p() < 1.0 })
        .collect();
    let t = mix.workload_generator().select_rows(&keep).select_columns(&keep);
    let beta = mix.beta().select_columns(&keep);
    let eig = linalg::dominant_eigen(&t)?;
    let theta = -eig.value;
    if !(theta > 0.0) {
        return Err(Error::Numeric(format!("dominant eigenvalue {} of T is not negative", eig.value)));
    }
    let beta_r = (beta * &eig.right)[0];
    let l_one = eig.left.sum();
    let l_r = (&eig.left * &eig.right)[0];
    let c_z = lambda * beta_r * l_one / (theta * l_r);

    let root = decay_rate_by_root(mix)?;
    if (root - theta).abs() > tol::DECAY_CROSS_CHECK * theta.max(1.0) {
        return Err(Error::Numeric(format!(
            "decay rate {theta} from T disagrees with transform root {root}"
        )));
    }

    let p = mix.p();
    let lt1 = transform_or_inf(mix.laplace1(-theta), p > 0.0)?;
    let lt2 = transform_or_inf(mix.laplace2(-theta), p < 1.0)?;
    let lt = mix.laplace(-theta)?;
    Ok(DecayInfo {
        theta_z: theta,
        c_z,
        w1: if p > 0.0 { p * lt1 / lt } else { 0.0 },
        w: (1.0 - p) / lt,
        p,
        lt1,
        lt2,
        lt,
    })
}

fn transform_or_inf(v: Result<f64>, needed: bool) -> Result<f64> {
    match v {
        Ok(x) => Ok(x),
        Err(_) if !needed => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// Positive root of `lambda (S(-theta) - 1) = theta` by bisection.
pub fn decay_rate_by_root(mix: &JobMix) -> Result<f64> {
    let lambda = mix.lambda();
    let bound = mix.size_decay_rate();
    let f = |theta: f64| -> Result<f64> { Ok(lambda * (mix.laplace(-theta)? - 1.0) - theta) };
    let mut lo = bound * 1e-9;
    if f(lo)? >= 0.0 {
        return Err(Error::Numeric("transform root not bracketed near zero".into()));
    }
    let mut hi = bound * 0.5;
    let mut gap = 0.5;
    while f(hi)? <= 0.0 {
        gap *= 0.5;
        if gap < 1e-15 {
            return Err(Error::Numeric("transform root not bracketed below the size decay rate".into()));
        }
        lo = hi;
        hi = bound * (1.0 - gap);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `1 - w1 (w1+w)^m - (1-w1) (w1+w)^m S(-theta)^m`, defined for real `m`.
pub fn atir_nudge_m_real(info: &DecayInfo, m: f64) -> f64 {
    let a = (info.w1 + info.w).powf(m);
    1.0 - info.w1 * a - (1.0 - info.w1) * a * info.lt.powf(m)
}

/// ATIR of Nudge-M over FCFS.
pub fn atir_nudge_m(info: &DecayInfo, m: usize) -> f64 {
    atir_nudge_m_real(info, m as f64)
}

/// Unfloored log ratio whose floor is the optimal window.
pub fn m_opt_raw(info: &DecayInfo) -> f64 {
    let (a, b) = (info.lt1, info.lt2);
    ((a * (b - 1.0)) / (b * (a - 1.0))).ln() / info.lt.ln()
}

/// Window maximizing the ATIR of Nudge-M, clamped at zero.
pub fn m_opt(info: &DecayInfo) -> usize {
    let raw = m_opt_raw(info);
    if raw.is_finite() && raw > 0.0 {
        raw.floor() as usize
    } else {
        0
    }
}

/// `(c_w1, c_w2) = (c_z (w1+w)^m, c_z (w1+w)^m S(-theta)^m)`.
pub fn prefactors_nudge_m(info: &DecayInfo, m: usize) -> (f64, f64) {
    let a = info.c_z * (info.w1 + info.w).powi(m as i32);
    (a, a * info.lt.powi(m as i32))
}

/// Limit of the optimal Nudge-M ATIR as the load tends to one.
pub fn heavy_traffic_atir(p: f64, e1: f64, e2: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(e1 > 0.0) || !(e2 > 0.0) {
        return Err(Error::Input(format!("need p in [0,1] and positive means, got {p}, {e1}, {e2}")));
    }
    let mean = p * e1 + (1.0 - p) * e2;
    if (mean - 1.0).abs() > tol::MEAN_NORMALIZATION {
        return Err(Error::Input(format!("p e1 + (1-p) e2 = {mean}, expected 1")));
    }
    if e2 < e1 {
        return Err(Error::Input(format!("type-2 mean {e2} is smaller than type-1 mean {e1}")));
    }
    let log = -p * e1 * e1.ln() - (1.0 - p) * e2 * e2.ln();
    Ok(1.0 - log.exp())
}

/// Heavy-traffic approximation `floor(log(E2/E1) / log(1 + theta_z))` of the optimal window.
pub fn m_heavy(mix: &JobMix, info: &DecayInfo) -> usize {
    floor_nonneg((mix.mean2() / mix.mean1()).ln() / info.theta_z.ln_1p())
}

/// Second heavy-traffic form `floor(log(E2/E1) E[X^2] / (2 (1 - lambda)))`.
pub fn m_heavy_moment(mix: &JobMix) -> usize {
    floor_nonneg((mix.mean2() / mix.mean1()).ln() * mix.second_moment() / (2.0 * (1.0 - mix.lambda())))
}

fn floor_nonneg(x: f64) -> usize {
    if x.is_finite() && x > 0.0 {
        x.floor() as usize
    } else {
        0
    }
}

fn check_family_mix(info: &DecayInfo) -> Result<()> {
    if !(info.p > 0.0 && info.p < 1.0) {
        return Err(Error::Input(format!(
            "family prefactors need both job types present, got p = {}",
            info.p
        )));
    }
    Ok(())
}

/// Waiting-time prefactors and ATIR of any policy in the family, by direct
/// enumeration of type strings. Cost is `O(4^M M)`.
pub fn family_prefactors(policy: &PolicyFn, info: &DecayInfo) -> Result<AtirReport> {
    let m = policy.window();
    if m > FAMILY_CAP {
        return Err(Error::Complexity { what: "policy window", value: m, cap: FAMILY_CAP });
    }
    check_family_mix(info)?;
    if m == 0 {
        return Ok(AtirReport::from_prefactors(info, info.c_z, info.c_z));
    }
    let (p, q) = (info.p, 1.0 - info.p);
    let (a, b, s) = (info.lt1, info.lt2, info.lt);
    let mi = m as i32;

    // Strings are bit masks: bit k-1 is set when position k (1 = newest) holds a two.
    let mut sum1 = 0.0;
    for idx in 0..(1usize << m) {
        let t = idx.count_ones() as i32;
        let n = policy.n_index(idx) as i32;
        sum1 += q.powi(t) * p.powi(mi - t) * a.powi(mi - t) * b.powi(t - n);
    }
    let c_w1 = info.c_z * sum1 / s.powi(mi);

    let mask = (1usize << m) - 1;
    let tagged = 1usize << m;
    let mut sum2 = 0.0;
    for idx in 0..(1usize << (2 * m)) {
        if idx & tagged == 0 {
            continue;
        }
        let t = idx.count_ones() as i32;
        let older = (idx >> (m + 1)).count_ones() as i32;
        let mut term = q.powi(t) * p.powi(2 * mi - t) / q * a.powi(mi - 1 - older) * b.powi(older);
        for k in 1..=m {
            if idx & (1 << (k - 1)) != 0 {
                continue;
            }
            let window = (idx >> k) & mask;
            let before_tagged = ((idx & mask) >> k).count_ones() as usize;
            if policy.n_index(window) > before_tagged {
                term *= a;
            }
        }
        sum2 += term;
    }
    let c_w2 = info.c_z * sum2 / s.powi(mi - 1);
    Ok(AtirReport::from_prefactors(info, c_w1, c_w2))
}

/// ATIR of a named policy through [`family_prefactors`].
pub fn atir_named(policy: NamedPolicy, info: &DecayInfo) -> Result<f64> {
    let window = policy.window();
    if window > FAMILY_CAP {
        return Err(Error::Complexity { what: "policy window", value: window, cap: FAMILY_CAP });
    }
    Ok(family_prefactors(&policy.table()?, info)?.atir)
}

/// Best Nudge-K,L parameters over `1 <= K, L <= bound` with `K + L - 1 <= FAMILY_CAP`.
pub fn best_nudge_kl(info: &DecayInfo, bound: usize) -> Result<(usize, usize, f64)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for k in 1..=bound {
        for l in 1..=bound {
            if k + l - 1 > FAMILY_CAP {
                continue;
            }
            let v = atir_named(NamedPolicy::NudgeKL { k, l }, info)?;
            if best.is_none_or(|(_, _, b)| v > b + 1e-15) {
                best = Some((k, l, v));
            }
        }
    }
    best.ok_or_else(|| Error::Input("empty search range".into()))
}

/// Outcome of the exhaustive optimality check over one window.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalityReport {
    pub window: usize,
    pub m_opt: usize,
    pub policies: usize,
    pub best_atir: f64,
    /// ATIR of Nudge-min(window, m_opt).
    pub nudge_atir: f64,
    /// Policies whose ATIR equals the best within rounding.
    pub ties: usize,
    pub edges: usize,
    /// Edges where the increment rule is undecided because its ratio equals one.
    pub tied_edges: usize,
    pub counterexamples: Vec<String>,
}

impl OptimalityReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Enumerates every valid policy of window `m`, checks that Nudge-min(m, m_opt)
/// attains the best ATIR, and checks the increment rule on every edge
/// `n -> n + e_s` that stays valid.
pub fn verify_optimality(m: usize, info: &DecayInfo) -> Result<OptimalityReport> {
    if m == 0 || m > ENUMERATION_CAP {
        return Err(Error::Complexity { what: "enumeration window", value: m, cap: ENUMERATION_CAP });
    }
    check_family_mix(info)?;
    let mopt = m_opt(info);
    let ratio = {
        let (a, b) = (info.lt1, info.lt2);
        (a * (b - 1.0)) / (b * (a - 1.0))
    };
    let policies = PolicyFn::enumerate(m);
    let mut atirs = Vec::with_capacity(policies.len());
    for pol in &policies {
        atirs.push(family_prefactors(pol, info)?.atir);
    }
    let target = PolicyFn::from_fn(m, |s| s.iter().take(mopt.min(m)).filter(|&&x| x == 2).count())?;
    let nudge_atir = family_prefactors(&target, info)?.atir;
    let best_atir = atirs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let slack = 1e-12 * best_atir.abs().max(1.0);
    let ties = atirs.iter().filter(|&&v| (v - best_atir).abs() <= slack).count();
    let mut counterexamples = Vec::new();
    for (pol, &v) in policies.iter().zip(&atirs) {
        if v > nudge_atir + slack {
            counterexamples.push(format!("policy {pol} has ATIR {v} above Nudge-{} ({nudge_atir})", mopt.min(m)));
        }
    }

    let index: std::collections::HashMap<&[u8], usize> =
        policies.iter().enumerate().map(|(i, p)| (p.table_slice(), i)).collect();
    let mut edges = 0;
    let mut tied_edges = 0;
    for (i, pol) in policies.iter().enumerate() {
        for s in 0..(1usize << m) {
            let n = pol.n_index(s);
            if n >= s.count_ones() as usize {
                continue;
            }
            let mut table = pol.table_slice().to_vec();
            table[s] += 1;
            let Some(&j) = index.get(table.as_slice()) else { continue };
            edges += 1;
            let k_prime = nth_two_position(s, n + 1);
            let rule = ratio / info.lt.powi(k_prime as i32);
            if (rule - 1.0).abs() <= 1e-9 {
                tied_edges += 1;
                continue;
            }
            let improves = atirs[j] > atirs[i];
            let predicted = k_prime <= mopt;
            if improves != predicted {
                counterexamples.push(format!(
                    "raising n({}) in {pol}: ATIR {} -> {}, rule predicts {}",
                    PolicyFn::word(s, m),
                    atirs[i],
                    atirs[j],
                    if predicted { "improvement" } else { "deterioration" }
                ));
            }
        }
    }
    Ok(OptimalityReport {
        window: m,
        m_opt: mopt,
        policies: policies.len(),
        best_atir,
        nudge_atir,
        ties,
        edges,
        tied_edges,
        counterexamples,
    })
}

/// 1-based position of the `k`-th two in string `s`.
fn nth_two_position(s: usize, k: usize) -> usize {
    let mut seen = 0;
    for pos in 1.. {
        if s & (1 << (pos - 1)) != 0 {
            seen += 1;
            if seen == k {
                return pos;
            }
        }
    }
    unreachable!()
}

/// Comparison of Nudge-K,M with `K = i` against Nudge-M,L with `L = i` at window `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmMlComparison {
    /// ATIR of Nudge-K,M minus ATIR of Nudge-M,L.
    pub difference: f64,
    /// `S1(-theta) > (1-p)/p`.
    pub predicate: bool,
    /// Ratio of the ATIR increments when the window grows by one.
    pub increment_ratio: f64,
}

impl KmMlComparison {
    /// The sign of the difference matches the predicate (vacuous when the policies coincide).
    pub fn agrees(&self) -> bool {
        if self.difference.abs() <= 1e-15 {
            return true;
        }
        (self.difference > 0.0) == self.predicate
    }
}

pub fn compare_km_ml(i: usize, m: usize, info: &DecayInfo) -> Result<KmMlComparison> {
    let mopt = m_opt(info);
    if i == 0 || i > m || m > mopt {
        return Err(Error::Input(format!("need 1 <= i <= M <= M_opt, got i = {i}, M = {m}, M_opt = {mopt}")));
    }
    let km = atir_named(NamedPolicy::NudgeKM { k: i, m }, info)?;
    let ml = atir_named(NamedPolicy::NudgeML { m, l: i }, info)?;
    let p = info.p;
    Ok(KmMlComparison {
        difference: km - ml,
        predicate: info.lt1 > (1.0 - p) / p,
        increment_ratio: increment_ratio(i, m, info),
    })
}

/// `sum_{j<i} C(M,j) w1^(M-j) w^j / sum_{j<i} C(M,j) w^(M-j) w1^j`.
pub fn increment_ratio(i: usize, m: usize, info: &DecayInfo) -> f64 {
    let (w1, w) = (info.w1, info.w);
    let mut num = 0.0;
    let mut den = 0.0;
    let mut binom = 1.0;
    for j in 0..i.min(m + 1) {
        let (mj, jj) = ((m - j) as i32, j as i32);
        num += binom * w1.powi(mj) * w.powi(jj);
        den += binom * w.powi(mj) * w1.powi(jj);
        binom = binom * (m - j) as f64 / (j + 1) as f64;
    }
    num / den
}
