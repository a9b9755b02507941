//! Phase-type job sizes and the two-class job mix.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, RowVector, Vector};
use crate::tol;

/// A phase-type distribution `PH(alpha, S)`: the absorption time of a
/// Markov chain started according to `alpha` with transient generator `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseType {
    alpha: RowVector,
    s: Matrix,
    exit: Vector,
}

impl PhaseType {
    pub fn new(alpha: RowVector, s: Matrix) -> Result<Self> {
        let n = alpha.len();
        if n == 0 {
            return Err(Error::InvalidDistribution("no phases".into()));
        }
        if s.nrows() != n || s.ncols() != n {
            return Err(Error::InvalidDistribution(format!(
                "alpha has {n} phases but S is {}x{}",
                s.nrows(),
                s.ncols()
            )));
        }
        if alpha.iter().any(|&a| !(a >= 0.0)) {
            return Err(Error::InvalidDistribution("alpha has negative entries".into()));
        }
        if (alpha.sum() - 1.0).abs() > tol::DEFAULT_REL {
            return Err(Error::InvalidDistribution(format!(
                "alpha sums to {} (jobs must have nonzero size)",
                alpha.sum()
            )));
        }
        for i in 0..n {
            if !(s[(i, i)] < 0.0) {
                return Err(Error::InvalidDistribution(format!("S[{i},{i}] is not negative")));
            }
        }
        if !linalg::is_subgenerator(&s) {
            return Err(Error::InvalidDistribution(
                "S must have nonnegative off-diagonal entries and nonpositive row sums".into(),
            ));
        }
        let exit = -(&s * linalg::ones(n));
        let exit = exit.map(|x| if x.abs() < 1e-15 { 0.0 } else { x });
        if linalg::inverse(&(-s.clone())).is_err() {
            return Err(Error::InvalidDistribution("-S is singular".into()));
        }
        Ok(Self { alpha, s, exit })
    }

    /// Exponential distribution with the given mean.
    pub fn exponential(mean: f64) -> Result<Self> {
        Self::erlang(1, mean)
    }

    /// Erlang distribution with `stages` phases and the given mean.
    pub fn erlang(stages: usize, mean: f64) -> Result<Self> {
        if stages == 0 || !(mean > 0.0) || !mean.is_finite() {
            return Err(Error::InvalidDistribution(format!(
                "erlang needs stages >= 1 and a positive mean, got {stages}, {mean}"
            )));
        }
        let rate = stages as f64 / mean;
        let mut s = Matrix::zeros(stages, stages);
        for i in 0..stages {
            s[(i, i)] = -rate;
            if i + 1 < stages {
                s[(i, i + 1)] = rate;
            }
        }
        Self::new(linalg::unit_row(stages, 0), s)
    }

    /// Two-phase hyperexponential with branch probability `q` and rates `mu1`, `mu2`.
    pub fn hyperexponential(q: f64, mu1: f64, mu2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) || !(mu1 > 0.0) || !(mu2 > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "hyperexponential needs q in [0,1] and positive rates, got {q}, {mu1}, {mu2}"
            )));
        }
        let alpha = RowVector::from_row_slice(&[q, 1.0 - q]);
        let s = Matrix::from_row_slice(2, 2, &[-mu1, 0.0, 0.0, -mu2]);
        Self::new(alpha, s)
    }

    pub fn alpha(&self) -> &RowVector {
        &self.alpha
    }

    pub fn generator(&self) -> &Matrix {
        &self.s
    }

    /// Exit-rate vector `s* = (-S) 1`.
    pub fn exit(&self) -> &Vector {
        &self.exit
    }

    pub fn phases(&self) -> usize {
        self.alpha.len()
    }

    /// `k! alpha (-S)^{-k} 1`.
    pub fn moment(&self, k: u32) -> Result<f64> {
        if k == 0 {
            return Ok(1.0);
        }
        let neg = -self.s.clone();
        let mut v = linalg::ones(self.phases());
        let mut fact = 1.0;
        for j in 1..=k {
            v = linalg::solve_vec(&neg, &v)
                .map_err(|_| Error::InvalidDistribution("-S is singular".into()))?;
            fact *= j as f64;
        }
        Ok(fact * (&self.alpha * v)[0])
    }

    pub fn mean(&self) -> f64 {
        self.moment(1).expect("validated at construction")
    }

    /// Decay rate: minus the largest real part in the spectrum of `S`.
    pub fn decay_rate(&self) -> f64 {
        -self
            .s
            .clone()
            .complex_eigenvalues()
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Laplace transform `alpha (sI - S)^{-1} s*`, defined for `s > -decay_rate`.
    pub fn laplace(&self, s: f64) -> Result<f64> {
        if s <= -self.decay_rate() {
            return Err(Error::DecayRateExceeded { s });
        }
        let n = self.phases();
        let m = Matrix::identity(n, n) * s - &self.s;
        let x = linalg::solve_vec(&m, &self.exit).map_err(|_| Error::DecayRateExceeded { s })?;
        Ok((&self.alpha * x)[0])
    }

    /// Copy with all times multiplied by `factor` (means scale by `factor`).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) {
            return Err(Error::Input(format!("time scale {factor} must be positive")));
        }
        Self::new(self.alpha.clone(), &self.s / factor)
    }

    /// Draws one job size by simulating the absorbing chain.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let n = self.phases();
        let mut phase = pick(rng, self.alpha.iter().copied(), n);
        let mut total = 0.0;
        loop {
            let rate = -self.s[(phase, phase)];
            let u: f64 = rng.random();
            total += -(1.0 - u).ln() / rate;
            let weights = (0..n)
                .map(|j| if j == phase { 0.0 } else { self.s[(phase, j)] })
                .chain(std::iter::once(self.exit[phase]));
            let next = pick_scaled(rng, weights, rate);
            if next == n {
                return total;
            }
            phase = next;
        }
    }
}

fn pick<R: Rng + ?Sized>(rng: &mut R, weights: impl Iterator<Item = f64>, fallback: usize) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        acc += w;
        if w > 0.0 {
            last = i;
        }
        if u < acc {
            return i;
        }
    }
    if fallback == 0 {
        0
    } else {
        last
    }
}

fn pick_scaled<R: Rng + ?Sized>(rng: &mut R, weights: impl Iterator<Item = f64>, total: f64) -> usize {
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        acc += w;
        if w > 0.0 {
            last = i;
        }
        if u < acc {
            return i;
        }
    }
    last
}

/// Fits a two-phase hyperexponential `(q, mu1, mu2)` matching the mean, the
/// squared coefficient of variation and `f = (q/mu1)/mean`.
///
/// When two solutions exist the one whose first phase has the larger mean
/// is returned. `scv = 1` yields an exponential written with two phases.
pub fn fit_hyperexp(mean: f64, scv: f64, f: f64) -> Result<PhaseType> {
    if !(mean > 0.0) || !mean.is_finite() {
        return Err(Error::Fit(format!("mean {mean} must be positive")));
    }
    if !(scv >= 1.0) {
        return Err(Error::Fit(format!("scv {scv} < 1 cannot be matched by a hyperexponential")));
    }
    if !(f > 0.0 && f < 1.0) {
        return Err(Error::Fit(format!("f {f} must lie in (0, 1)")));
    }
    // With a = 1/mu1, b = 1/mu2 and c = (scv + 1) mean / 2:
    //   f a + (1 - f) b = c  and  f mean / a + (1 - f) mean / b = 1,
    // which reduces to f a^2 + (mean (1 - 2f) - c) a + f c mean = 0.
    let c = (scv + 1.0) * mean / 2.0;
    let bq = mean * (1.0 - 2.0 * f) - c;
    let disc = (bq * bq - 4.0 * f * f * c * mean).max(0.0);
    let candidates = [(-bq + disc.sqrt()) / (2.0 * f), (-bq - disc.sqrt()) / (2.0 * f)];
    for a in candidates {
        let b = (c - f * a) / (1.0 - f);
        if !(a > 0.0 && b > 0.0) {
            continue;
        }
        let q = f * mean / a;
        if !(q > 0.0 && q <= 1.0 + 1e-12) {
            continue;
        }
        return PhaseType::hyperexponential(q.min(1.0), 1.0 / a, 1.0 / b);
    }
    Err(Error::Fit(format!("no nonnegative solution for mean {mean}, scv {scv}, f {f}")))
}

/// Arrival rate, type probability and the two job-size distributions.
///
/// Times are normalized so that the mean job size is one; the load is `lambda`.
#[derive(Debug, Clone)]
pub struct JobMix {
    p: f64,
    lambda: f64,
    ph1: PhaseType,
    ph2: PhaseType,
    alpha: RowVector,
    s: Matrix,
    exit: Vector,
    t: Matrix,
}

impl JobMix {
    pub fn new(p: f64, ph1: PhaseType, ph2: PhaseType, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Input(format!("type-1 probability {p} outside [0, 1]")));
        }
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::Instability { lambda });
        }
        let mean = p * ph1.mean() + (1.0 - p) * ph2.mean();
        if (mean - 1.0).abs() > tol::MEAN_NORMALIZATION {
            return Err(Error::Input(format!(
                "mean job size is {mean}, expected 1 (use JobMix::rescaled to normalize)"
            )));
        }
        let (n1, n2) = (ph1.phases(), ph2.phases());
        let n = n1 + n2;
        let mut alpha = RowVector::zeros(n);
        alpha.columns_mut(0, n1).copy_from(&(ph1.alpha() * p));
        alpha.columns_mut(n1, n2).copy_from(&(ph2.alpha() * (1.0 - p)));
        let mut s = Matrix::zeros(n, n);
        s.view_mut((0, 0), (n1, n1)).copy_from(ph1.generator());
        s.view_mut((n1, n1), (n2, n2)).copy_from(ph2.generator());
        let mut exit = Vector::zeros(n);
        exit.rows_mut(0, n1).copy_from(ph1.exit());
        exit.rows_mut(n1, n2).copy_from(ph2.exit());
        let t = &s + linalg::ones(n) * &alpha * lambda;
        Ok(Self { p, lambda, ph1, ph2, alpha, s, exit, t })
    }

    /// Builds a mix after rescaling time so that the mean job size is one.
    pub fn rescaled(p: f64, ph1: PhaseType, ph2: PhaseType, lambda: f64) -> Result<Self> {
        let mean = p * ph1.mean() + (1.0 - p) * ph2.mean();
        let factor = 1.0 / mean;
        Self::new(p, ph1.scaled(factor)?, ph2.scaled(factor)?, lambda)
    }

    /// Mix with type-2 jobs `ratio` times larger on average than type-1 jobs.
    pub fn from_ratio(p: f64, ratio: f64, lambda: f64, shape1: SizeShape, shape2: SizeShape) -> Result<Self> {
        if !(ratio > 0.0) {
            return Err(Error::Input(format!("mean ratio {ratio} must be positive")));
        }
        let e1 = 1.0 / (p + (1.0 - p) * ratio);
        let e2 = ratio * e1;
        Self::new(p, shape1.build(e1)?, shape2.build(e2)?, lambda)
    }

    /// Same job sizes at another arrival rate.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.p, self.ph1.clone(), self.ph2.clone(), lambda)
    }

    /// Exchanges the roles of the two job types.
    pub fn swapped_types(&self) -> Result<Self> {
        Self::new(1.0 - self.p, self.ph2.clone(), self.ph1.clone(), self.lambda)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn ph1(&self) -> &PhaseType {
        &self.ph1
    }

    pub fn ph2(&self) -> &PhaseType {
        &self.ph2
    }

    /// `alpha = (p alpha_1, (1-p) alpha_2)`.
    pub fn alpha(&self) -> &RowVector {
        &self.alpha
    }

    /// Block-diagonal `S = diag(S_1, S_2)`.
    pub fn generator(&self) -> &Matrix {
        &self.s
    }

    pub fn exit(&self) -> &Vector {
        &self.exit
    }

    /// `beta = (1 - lambda) alpha`.
    pub fn beta(&self) -> RowVector {
        &self.alpha * (1.0 - self.lambda)
    }

    /// Workload generator `T = S + lambda 1 alpha`.
    pub fn workload_generator(&self) -> &Matrix {
        &self.t
    }

    pub fn phases(&self) -> usize {
        self.alpha.len()
    }

    pub fn mean1(&self) -> f64 {
        self.ph1.mean()
    }

    pub fn mean2(&self) -> f64 {
        self.ph2.mean()
    }

    /// `E[X^2]` of a random job.
    pub fn second_moment(&self) -> f64 {
        self.p * self.ph1.moment(2).expect("valid") + (1.0 - self.p) * self.ph2.moment(2).expect("valid")
    }

    /// Transform of a type-1 job size.
    pub fn laplace1(&self, s: f64) -> Result<f64> {
        self.ph1.laplace(s)
    }

    /// Transform of a type-2 job size.
    pub fn laplace2(&self, s: f64) -> Result<f64> {
        self.ph2.laplace(s)
    }

    /// Transform of a random job size.
    pub fn laplace(&self, s: f64) -> Result<f64> {
        let a = if self.p > 0.0 { self.laplace1(s)? } else { 0.0 };
        let b = if self.p < 1.0 { self.laplace2(s)? } else { 0.0 };
        Ok(self.p * a + (1.0 - self.p) * b)
    }

    /// Smallest decay rate among the type distributions that occur.
    pub fn size_decay_rate(&self) -> f64 {
        let mut d = f64::INFINITY;
        if self.p > 0.0 {
            d = d.min(self.ph1.decay_rate());
        }
        if self.p < 1.0 {
            d = d.min(self.ph2.decay_rate());
        }
        d
    }
}

/// Shape of a job-size distribution, independent of its mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SizeShape {
    Exp,
    Erlang { stages: usize },
    Hyperexp { scv: f64, f: f64 },
}

impl SizeShape {
    pub fn build(&self, mean: f64) -> Result<PhaseType> {
        match *self {
            SizeShape::Exp => PhaseType::exponential(mean),
            SizeShape::Erlang { stages } => PhaseType::erlang(stages, mean),
            SizeShape::Hyperexp { scv, f } => fit_hyperexp(mean, scv, f),
        }
    }
}

/// One job type in a mix file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhaseSpec {
    Named(NamedPhase),
    Raw {
        alpha: Vec<f64>,
        #[serde(rename = "S")]
        s: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NamedPhase {
    Exp { mean: f64 },
    Erlang { stages: usize, mean: f64 },
    Hyperexp { mean: f64, scv: f64, f: f64 },
}

impl PhaseSpec {
    pub fn build(&self) -> Result<PhaseType> {
        match self {
            PhaseSpec::Named(NamedPhase::Exp { mean }) => PhaseType::exponential(*mean),
            PhaseSpec::Named(NamedPhase::Erlang { stages, mean }) => PhaseType::erlang(*stages, *mean),
            PhaseSpec::Named(NamedPhase::Hyperexp { mean, scv, f }) => fit_hyperexp(*mean, *scv, *f),
            PhaseSpec::Raw { alpha, s } => {
                let n = alpha.len();
                if s.len() != n || s.iter().any(|r| r.len() != n) {
                    return Err(Error::InvalidDistribution(format!("S must be {n}x{n}")));
                }
                let flat: Vec<f64> = s.iter().flatten().copied().collect();
                PhaseType::new(RowVector::from_row_slice(alpha), Matrix::from_row_slice(n, n, &flat))
            }
        }
    }
}

/// Job-mix definition file.
///
/// ```json
/// { "p": 0.6667, "lambda": 0.7,
///   "type1": { "kind": "exp", "mean": 0.5 },
///   "type2": { "kind": "hyperexp", "mean": 2.0, "scv": 2.0, "f": 0.5 } }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixSpec {
    pub p: f64,
    pub lambda: f64,
    pub type1: PhaseSpec,
    pub type2: PhaseSpec,
    /// Rescale time so the mean job size is one. Off by default.
    #[serde(default)]
    pub normalize: bool,
}

impl MixSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("mix file: {e}")))
    }

    pub fn build(&self) -> Result<JobMix> {
        let ph1 = self.type1.build()?;
        let ph2 = self.type2.build()?;
        if self.normalize {
            JobMix::rescaled(self.p, ph1, ph2, self.lambda)
        } else {
            JobMix::new(self.p, ph1, ph2, self.lambda)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;

    #[test]
    fn exponential_moments() {
        assert_relative_eq!(PhaseType::exponential(0.5).unwrap().moment(1).unwrap(), 0.5, epsilon = 1e-14);
        assert_relative_eq!(PhaseType::exponential(1.0).unwrap().moment(2).unwrap(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn erlang_mean_against_monte_carlo() {
        let ph = PhaseType::erlang(2, 1.0).unwrap();
        assert_relative_eq!(ph.moment(1).unwrap(), 1.0, epsilon = 1e-14);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| ph.sample(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        assert!((mean - 1.0).abs() < 4.0 * se, "mc mean {mean} se {se}");
    }

    #[test]
    fn laplace_examples() {
        let e = PhaseType::exponential(1.0).unwrap();
        assert_relative_eq!(e.laplace(-0.3).unwrap(), 1.0 / 0.7, epsilon = 1e-12);
        assert_relative_eq!(e.laplace(0.0).unwrap(), 1.0, epsilon = 1e-12);
        // Per-stage transforms multiply: (2 / (2 - 0.5))^2.
        let er = PhaseType::erlang(2, 1.0).unwrap();
        assert_relative_eq!(er.laplace(-0.5).unwrap(), (2.0f64 / 1.5).powi(2), epsilon = 1e-12);
        assert!(matches!(e.laplace(-1.0), Err(Error::DecayRateExceeded { .. })));
        assert!(matches!(e.laplace(-2.0), Err(Error::DecayRateExceeded { .. })));
    }

    #[test]
    fn laplace_increases_toward_decay_rate() {
        let ph = fit_hyperexp(2.0, 2.0, 0.5).unwrap();
        let theta = ph.decay_rate();
        let mut prev = ph.laplace(0.0).unwrap();
        for k in 1..50 {
            let s = -theta * k as f64 / 50.0;
            let v = ph.laplace(s).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn hyperexp_fits() {
        let h = fit_hyperexp(2.0, 2.0, 0.5).unwrap();
        assert_relative_eq!(h.mean(), 2.0, epsilon = 1e-12);
        let scv = h.moment(2).unwrap() / 4.0 - 1.0;
        assert_relative_eq!(scv, 2.0, epsilon = 1e-9);

        let e = fit_hyperexp(1.0, 1.0, 0.5).unwrap();
        for s in [-0.5, 0.0, 0.3, 2.0] {
            assert_relative_eq!(e.laplace(s).unwrap(), 1.0 / (1.0 + s), epsilon = 1e-9);
        }

        let g = fit_hyperexp(1.0, 4.0, 0.7).unwrap();
        let mean = g.mean();
        let scv = g.moment(2).unwrap() / (mean * mean) - 1.0;
        let q = g.alpha()[0];
        let f = q / -g.generator()[(0, 0)] / mean;
        assert_relative_eq!(mean, 1.0, epsilon = 1e-9);
        assert_relative_eq!(scv, 4.0, epsilon = 1e-9);
        assert_relative_eq!(f, 0.7, epsilon = 1e-9);

        assert!(matches!(fit_hyperexp(1.0, 0.5, 0.5), Err(Error::Fit(_))));
        assert!(matches!(fit_hyperexp(1.0, 2.0, 1.0), Err(Error::Fit(_))));
    }

    #[test]
    fn invalid_distributions_rejected() {
        let bad_alpha = RowVector::from_row_slice(&[0.5, 0.4]);
        let s = Matrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -1.0]);
        assert!(PhaseType::new(bad_alpha, s.clone()).is_err());
        let pos_row = Matrix::from_row_slice(2, 2, &[-1.0, 2.0, 0.0, -1.0]);
        assert!(PhaseType::new(RowVector::from_row_slice(&[1.0, 0.0]), pos_row).is_err());
        let neg_off = Matrix::from_row_slice(2, 2, &[-1.0, -0.1, 0.0, -1.0]);
        assert!(PhaseType::new(RowVector::from_row_slice(&[1.0, 0.0]), neg_off).is_err());
    }

    #[test]
    fn job_mix_normalization() {
        let ph1 = PhaseType::exponential(0.5).unwrap();
        let ph2 = PhaseType::exponential(2.0).unwrap();
        let mix = JobMix::new(2.0 / 3.0, ph1.clone(), ph2.clone(), 0.7).unwrap();
        assert_eq!(mix.phases(), 2);
        assert_relative_eq!(mix.alpha().sum(), 1.0, epsilon = 1e-15);
        let mean = (mix.alpha() * linalg::solve_vec(&(-mix.generator().clone()), &linalg::ones(2)).unwrap())[0];
        assert_relative_eq!(mean, 1.0, epsilon = 1e-12);

        assert!(JobMix::new(0.5, ph1.clone(), ph2.clone(), 0.7).is_err());
        let r = JobMix::rescaled(0.5, ph1.clone(), ph2.clone(), 0.7).unwrap();
        assert_relative_eq!(0.5 * r.mean1() + 0.5 * r.mean2(), 1.0, epsilon = 1e-12);
        assert!(matches!(
            JobMix::new(2.0 / 3.0, ph1, ph2, 1.0),
            Err(Error::Instability { .. })
        ));
    }

    #[test]
    fn mix_file_parsing() {
        let text = r#"{ "p": 0.6666666666666666, "lambda": 0.7,
            "type1": { "kind": "exp", "mean": 0.5 },
            "type2": { "kind": "hyperexp", "mean": 2.0, "scv": 2.0, "f": 0.5 } }"#;
        let mix = MixSpec::from_json(text).unwrap().build().unwrap();
        assert_eq!(mix.phases(), 3);

        let raw = r#"{ "p": 0.5, "lambda": 0.5,
            "type1": { "alpha": [1.0], "S": [[-1.0]] },
            "type2": { "kind": "erlang", "stages": 3, "mean": 1.0 } }"#;
        let mix = MixSpec::from_json(raw).unwrap().build().unwrap();
        assert_eq!(mix.phases(), 4);

        let unnormalized = r#"{ "p": 0.5, "lambda": 0.5, "normalize": true,
            "type1": { "kind": "exp", "mean": 1.0 },
            "type2": { "kind": "exp", "mean": 4.0 } }"#;
        let mix = MixSpec::from_json(unnormalized).unwrap().build().unwrap();
        assert_relative_eq!(mix.mean2() / mix.mean1(), 4.0, epsilon = 1e-12);

        assert!(MixSpec::from_json("{").is_err());
    }
}
