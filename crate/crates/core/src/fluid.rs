//! Type-1 waiting and response times under Nudge-M through a Markov-modulated
//! fluid queue with jumps. The fluid level is the virtual waiting time of a
//! type-1 arrival; phases in the down set drain it at rate one, phases in the
//! up set add the work of jobs that can no longer be passed.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, RowVector, Vector};
use crate::phtype::JobMix;
use crate::resp2::{self, check_time};
use crate::tol;

/// Largest window accepted by [`build_nudge_m_fluid`].
pub const FLUID_CAP: usize = 10;

/// Partitioned rate and boundary matrices of a fluid queue with jumps.
#[derive(Debug, Clone)]
pub struct FluidModel {
    t_mm: Matrix,
    t_mp: Matrix,
    t_pm: Matrix,
    t_pp: Matrix,
    t_star_00: Matrix,
    t_star_0p: Matrix,
    p_m0: Matrix,
    p_mp: Matrix,
}

impl FluidModel {
    /// Validates dimensions, zero row sums of the generator and of the
    /// zero-level block, and stochastic rows of the boundary matrix.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        t_mm: Matrix,
        t_mp: Matrix,
        t_pm: Matrix,
        t_pp: Matrix,
        t_star_00: Matrix,
        t_star_0p: Matrix,
        p_m0: Matrix,
        p_mp: Matrix,
    ) -> Result<Self> {
        let nm = t_mm.nrows();
        let np = t_pp.nrows();
        let n0 = t_star_00.nrows();
        let dims = [
            ("T--", &t_mm, nm, nm),
            ("T-+", &t_mp, nm, np),
            ("T+-", &t_pm, np, nm),
            ("T++", &t_pp, np, np),
            ("T*00", &t_star_00, n0, n0),
            ("T*0+", &t_star_0p, n0, np),
            ("P-0", &p_m0, nm, n0),
            ("P-+", &p_mp, nm, np),
        ];
        for (name, m, r, c) in dims {
            if m.nrows() != r || m.ncols() != c {
                return Err(Error::Dimension(format!(
                    "{name} is {}x{}, expected {r}x{c}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        if nm == 0 || np == 0 || n0 == 0 || n0 > nm {
            return Err(Error::Dimension("fluid model needs nonempty phase sets".into()));
        }
        let check_rows = |name: &str, a: &Matrix, b: &Matrix, target: f64| -> Result<()> {
            for i in 0..a.nrows() {
                let sum = a.row(i).sum() + b.row(i).sum();
                let scale = 1.0 + a.row(i).abs().sum() + b.row(i).abs().sum();
                if (sum - target).abs() > 1e-12 * scale {
                    return Err(Error::InvalidDistribution(format!(
                        "row {i} of {name} sums to {sum}, expected {target}"
                    )));
                }
            }
            Ok(())
        };
        check_rows("[T-- T-+]", &t_mm, &t_mp, 0.0)?;
        check_rows("[T+- T++]", &t_pm, &t_pp, 0.0)?;
        check_rows("T*", &t_star_00, &t_star_0p, 0.0)?;
        check_rows("P", &p_m0, &p_mp, 1.0)?;
        let mut full = Matrix::zeros(nm + np, nm + np);
        full.view_mut((0, 0), (nm, nm)).copy_from(&t_mm);
        full.view_mut((0, nm), (nm, np)).copy_from(&t_mp);
        full.view_mut((nm, 0), (np, nm)).copy_from(&t_pm);
        full.view_mut((nm, nm), (np, np)).copy_from(&t_pp);
        if !linalg::is_subgenerator(&full) {
            return Err(Error::InvalidDistribution("fluid generator has negative off-diagonal rates".into()));
        }
        if p_m0.iter().chain(p_mp.iter()).any(|&x| x < 0.0) {
            return Err(Error::InvalidDistribution("negative boundary probability".into()));
        }
        Ok(Self {
            t_mm,
            t_mp,
            t_pm,
            t_pp,
            t_star_00,
            t_star_0p,
            p_m0,
            p_mp,
        })
    }

    pub fn down_phases(&self) -> usize {
        self.t_mm.nrows()
    }

    pub fn up_phases(&self) -> usize {
        self.t_pp.nrows()
    }

    pub fn t_mm(&self) -> &Matrix {
        &self.t_mm
    }

    pub fn t_mp(&self) -> &Matrix {
        &self.t_mp
    }

    pub fn t_pm(&self) -> &Matrix {
        &self.t_pm
    }

    pub fn t_pp(&self) -> &Matrix {
        &self.t_pp
    }

    pub fn t_star_00(&self) -> &Matrix {
        &self.t_star_00
    }

    pub fn t_star_0p(&self) -> &Matrix {
        &self.t_star_0p
    }

    pub fn p_m0(&self) -> &Matrix {
        &self.p_m0
    }

    pub fn p_mp(&self) -> &Matrix {
        &self.p_mp
    }
}

fn place_row(dst: &mut Matrix, row: usize, col: usize, v: &RowVector, scale: f64) {
    for (j, x) in v.iter().enumerate() {
        dst[(row, col + j)] += scale * x;
    }
}

fn place_block(dst: &mut Matrix, row: usize, col: usize, src: &Matrix) {
    let mut view = dst.view_mut((row, col), (src.nrows(), src.ncols()));
    view += src;
}

fn place_col(dst: &mut Matrix, row: usize, col: usize, v: &Vector) {
    for (i, x) in v.iter().enumerate() {
        dst[(row + i, col)] += x;
    }
}

/// FCFS: every arrival adds its work at once, so the fluid is the workload.
pub fn build_fcfs_fluid(mix: &JobMix) -> Result<FluidModel> {
    let lambda = mix.lambda();
    let n = mix.phases();
    let la = mix.alpha() * lambda;
    FluidModel::new(
        Matrix::from_element(1, 1, -lambda),
        linalg::row_matrix(&la),
        linalg::col_matrix(mix.exit()),
        mix.generator().clone(),
        Matrix::from_element(1, 1, -lambda),
        linalg::row_matrix(&la),
        Matrix::from_element(1, 1, 1.0),
        Matrix::zeros(1, n),
    )
}

/// Nudge with a single passable type-2 job at the back of the queue, built with
/// four up subsets: add type-1; add type-2 then type-1; add type-2 and keep the
/// stored job; add the stored type-2 job when the fluid empties.
pub fn build_nudge1_fluid(mix: &JobMix) -> Result<FluidModel> {
    let lambda = mix.lambda();
    let p = mix.p();
    let (a1, s1, e1) = (mix.ph1().alpha(), mix.ph1().generator(), mix.ph1().exit());
    let (a2, s2, e2) = (mix.ph2().alpha(), mix.ph2().generator(), mix.ph2().exit());
    let (n1, n2) = (s1.nrows(), s2.nrows());
    let off = [0, n1, n1 + n2, n1 + 2 * n2];
    let np = n1 + 3 * n2;

    let t_mm = Matrix::from_row_slice(2, 2, &[-lambda, lambda * (1.0 - p), 0.0, -lambda]);
    let mut t_mp = Matrix::zeros(2, np);
    place_row(&mut t_mp, 0, off[0], a1, lambda * p);
    place_row(&mut t_mp, 1, off[1], a2, lambda * p);
    place_row(&mut t_mp, 1, off[2], a2, lambda * (1.0 - p));

    let mut t_pm = Matrix::zeros(np, 2);
    place_col(&mut t_pm, off[0], 0, e1);
    place_col(&mut t_pm, off[2], 1, e2);
    place_col(&mut t_pm, off[3], 0, e2);

    let mut t_pp = Matrix::zeros(np, np);
    place_block(&mut t_pp, off[0], off[0], s1);
    place_block(&mut t_pp, off[1], off[0], &(linalg::col_matrix(e2) * linalg::row_matrix(a1)));
    place_block(&mut t_pp, off[1], off[1], s2);
    place_block(&mut t_pp, off[2], off[2], s2);
    place_block(&mut t_pp, off[3], off[3], s2);

    let mut t_star_0p = Matrix::zeros(1, np);
    place_row(&mut t_star_0p, 0, off[0], a1, lambda * p);
    place_row(&mut t_star_0p, 0, off[3], a2, lambda * (1.0 - p));

    let p_m0 = Matrix::from_row_slice(2, 1, &[1.0, 0.0]);
    let mut p_mp = Matrix::zeros(2, np);
    place_row(&mut p_mp, 1, off[3], a2, 1.0);

    FluidModel::new(
        t_mm,
        t_mp,
        t_pm,
        t_pp,
        Matrix::from_element(1, 1, -lambda),
        t_star_0p,
        p_m0,
        p_mp,
    )
}

/// Index layout of the Nudge-M fluid model. A stored pattern `s` is a bit mask
/// with bit `i-1` set when the `i`-th last arrival is a waiting type-2 job that
/// has not been added to the fluid. Down phases are the patterns in binary
/// order; the up set concatenates subset 1 (type-1 work), subset 2 (type-2 then
/// type-1 work), both over patterns with the newest bit clear, and subset 3
/// (type-2 work) over all patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NudgeMLayout {
    pub m: usize,
    pub n1: usize,
    pub n2: usize,
}

impl NudgeMLayout {
    pub fn patterns(&self) -> usize {
        1 << self.m
    }

    pub fn down(&self) -> usize {
        self.patterns()
    }

    pub fn up(&self) -> usize {
        let half = self.patterns() / 2;
        half * self.n1 + half * self.n2 + self.patterns() * self.n2
    }

    /// Up index of phase `i` of subset 1 for pattern `s` (newest bit clear).
    pub fn sub1(&self, s: usize, i: usize) -> usize {
        debug_assert_eq!(s & 1, 0);
        (s >> 1) * self.n1 + i
    }

    pub fn sub2(&self, s: usize, i: usize) -> usize {
        debug_assert_eq!(s & 1, 0);
        (self.patterns() / 2) * self.n1 + (s >> 1) * self.n2 + i
    }

    pub fn sub3(&self, s: usize, i: usize) -> usize {
        (self.patterns() / 2) * (self.n1 + self.n2) + s * self.n2 + i
    }

    /// Pattern after an arrival: shift every entry back one position, drop the
    /// oldest and put `newest` in front.
    pub fn shift(&self, s: usize, newest: bool) -> usize {
        ((s << 1) | usize::from(newest)) & (self.patterns() - 1)
    }

    /// Pattern with the oldest stored type-2 job removed.
    pub fn dec(&self, s: usize) -> usize {
        if s == 0 {
            0
        } else {
            s & !(1 << (usize::BITS - 1 - s.leading_zeros()))
        }
    }

    pub fn oldest_set(&self, s: usize) -> bool {
        s >> (self.m - 1) & 1 == 1
    }
}

/// Nudge-M fluid model for window `1 <= m <= FLUID_CAP`.
pub fn build_nudge_m_fluid(mix: &JobMix, m: usize) -> Result<FluidModel> {
    if m == 0 {
        return Err(Error::Input("window must be at least 1; use the FCFS model for 0".into()));
    }
    if m > FLUID_CAP {
        return Err(Error::Complexity { what: "fluid window", value: m, cap: FLUID_CAP });
    }
    let lambda = mix.lambda();
    let p = mix.p();
    let (a1, s1, e1) = (mix.ph1().alpha(), mix.ph1().generator(), mix.ph1().exit());
    let (a2, s2, e2) = (mix.ph2().alpha(), mix.ph2().generator(), mix.ph2().exit());
    let lay = NudgeMLayout { m, n1: s1.nrows(), n2: s2.nrows() };
    let (nm, np) = (lay.down(), lay.up());

    let mut t_mm = Matrix::zeros(nm, nm);
    let mut t_mp = Matrix::zeros(nm, np);
    for s in 0..nm {
        t_mm[(s, s)] = -lambda;
        let after1 = lay.shift(s, false);
        let after2 = lay.shift(s, true);
        if lay.oldest_set(s) {
            place_row(&mut t_mp, s, lay.sub2(after1, 0), a2, lambda * p);
            place_row(&mut t_mp, s, lay.sub3(after2, 0), a2, lambda * (1.0 - p));
        } else {
            t_mm[(s, after2)] += lambda * (1.0 - p);
            place_row(&mut t_mp, s, lay.sub1(after1, 0), a1, lambda * p);
        }
    }

    let mut t_pm = Matrix::zeros(np, nm);
    let mut t_pp = Matrix::zeros(np, np);
    let exit2_alpha1 = linalg::col_matrix(e2) * linalg::row_matrix(a1);
    for s in (0..nm).step_by(2) {
        place_block(&mut t_pp, lay.sub1(s, 0), lay.sub1(s, 0), s1);
        place_col(&mut t_pm, lay.sub1(s, 0), s, e1);
        place_block(&mut t_pp, lay.sub2(s, 0), lay.sub2(s, 0), s2);
        place_block(&mut t_pp, lay.sub2(s, 0), lay.sub1(s, 0), &exit2_alpha1);
    }
    for s in 0..nm {
        place_block(&mut t_pp, lay.sub3(s, 0), lay.sub3(s, 0), s2);
        place_col(&mut t_pm, lay.sub3(s, 0), s, e2);
    }

    let mut t_star_0p = Matrix::zeros(1, np);
    place_row(&mut t_star_0p, 0, lay.sub1(0, 0), a1, lambda * p);
    place_row(&mut t_star_0p, 0, lay.sub3(0, 0), a2, lambda * (1.0 - p));

    let mut p_m0 = Matrix::zeros(nm, 1);
    p_m0[(0, 0)] = 1.0;
    let mut p_mp = Matrix::zeros(nm, np);
    for s in 1..nm {
        place_row(&mut p_mp, s, lay.sub3(lay.dec(s), 0), a2, 1.0);
    }

    FluidModel::new(
        t_mm,
        t_mp,
        t_pm,
        t_pp,
        Matrix::from_element(1, 1, -lambda),
        t_star_0p,
        p_m0,
        p_mp,
    )
}

/// `‖T+- + Ψ T-- + T++ Ψ + Ψ T-+ Ψ‖∞`.
pub fn riccati_residual(t_mm: &Matrix, t_mp: &Matrix, t_pm: &Matrix, t_pp: &Matrix, psi: &Matrix) -> f64 {
    let r = t_pm + psi * t_mm + t_pp * psi + psi * t_mp * psi;
    inf_norm(&r)
}

fn inf_norm(a: &Matrix) -> f64 {
    a.row_iter().map(|r| r.abs().sum()).fold(0.0, f64::max)
}

/// Minimal nonnegative solution of `T+- + Ψ T-- + T++ Ψ + Ψ T-+ Ψ = 0` by the
/// structure-preserving doubling algorithm.
pub fn riccati_sda(t_mm: &Matrix, t_mp: &Matrix, t_pm: &Matrix, t_pp: &Matrix) -> Result<Matrix> {
    let nm = t_mm.nrows();
    let np = t_pp.nrows();
    // Written as X C X - X D - A X + B = 0.
    let a = -t_pp.clone();
    let d = -t_mm.clone();
    let b = t_pm;
    let c = t_mp;
    let gamma = a
        .diagonal()
        .iter()
        .chain(d.diagonal().iter())
        .fold(0.0f64, |g, &x| g.max(x));
    if gamma <= 0.0 {
        return Err(Error::InvalidDistribution("fluid generator has no outflow".into()));
    }
    let im = Matrix::identity(nm, nm);
    let ip = Matrix::identity(np, np);
    let a_g = &a + &ip * gamma;
    let d_g = &d + &im * gamma;
    let d_inv_c = linalg::solve(&d_g, c)?;
    let a_inv_b = linalg::solve(&a_g, b)?;
    let w = &a_g - b * &d_inv_c;
    let v = &d_g - c * &a_inv_b;
    let w_inv = linalg::inverse(&w)?;
    let v_inv = linalg::inverse(&v)?;
    let d_inv = linalg::inverse(&d_g)?;
    let mut e = &im - &v_inv * (2.0 * gamma);
    let mut f = &ip - &w_inv * (2.0 * gamma);
    let mut g = &d_inv_c * &w_inv * (2.0 * gamma);
    let mut h = &w_inv * b * &d_inv * (2.0 * gamma);

    let mut residual = f64::INFINITY;
    for _ in 0..tol::SDA_MAX_ITER {
        let gh = &im - &g * &h;
        let hg = &ip - &h * &g;
        let gh_e = linalg::solve(&gh, &e)?;
        let gh_gf = linalg::solve(&gh, &(&g * &f))?;
        let hg_f = linalg::solve(&hg, &f)?;
        let hg_he = linalg::solve(&hg, &(&h * &e))?;
        let h_next = &h + &f * hg_he;
        let g_next = &g + &e * gh_gf;
        let e_next = &e * gh_e;
        let f_next = &f * hg_f;
        let step = inf_norm(&(&h_next - &h));
        h = h_next;
        g = g_next;
        e = e_next;
        f = f_next;
        residual = riccati_residual(t_mm, t_mp, t_pm, t_pp, &h);
        if step <= tol::SDA_STEP || residual <= tol::SDA_RESIDUAL {
            if residual > tol::RICCATI_ACCEPT {
                break;
            }
            return Ok(h);
        }
    }
    Err(Error::Solver { what: "doubling iteration", residual })
}

/// Solves the Riccati equation of `model`.
pub fn solve_riccati(model: &FluidModel) -> Result<Matrix> {
    riccati_sda(&model.t_mm, &model.t_mp, &model.t_pm, &model.t_pp)
}

/// Stationary description of the fluid level: `P[level > t] = π₊ e^{Kt}(-K)^{-1} Ψ 1`
/// and an atom `c0` at zero.
#[derive(Debug, Clone)]
pub struct FluidSolution {
    pub psi: Matrix,
    pub k: Matrix,
    pub pi_plus: RowVector,
    pub c0: f64,
    tail: Vector,
    return_col: Vector,
}

/// Builds the stationary solution from a Riccati solution `psi`.
pub fn stationary_fluid(model: &FluidModel, psi: &Matrix) -> Result<FluidSolution> {
    let np = model.up_phases();
    if psi.nrows() != np || psi.ncols() != model.down_phases() {
        return Err(Error::Dimension("psi does not match the model".into()));
    }
    let star_inv = linalg::inverse(&model.t_star_00)?;
    let p_tilde = &model.p_mp - &model.p_m0 * &star_inv * &model.t_star_0p;
    let k = &model.t_pp + psi * &model.t_mp;
    let jump = psi * &p_tilde;

    // Left null vector of (ΨP̃ - I) with one equation replaced by a normalization.
    let mut sys = (&jump - Matrix::identity(np, np)).transpose();
    sys.row_mut(np - 1).fill(1.0);
    let mut rhs = Vector::zeros(np);
    rhs[np - 1] = 1.0;
    let pi = linalg::solve_vec(&sys, &rhs).map_err(|_| Error::Solver {
        what: "up-phase stationary vector (not unique)",
        residual: f64::NAN,
    })?;
    let mut pi = pi.transpose();
    let fixed = inf_norm(&linalg::row_matrix(&(&pi * &jump - &pi)));
    if fixed > 1e-9 {
        return Err(Error::Solver { what: "up-phase stationary vector", residual: fixed });
    }

    let psi_one = psi * linalg::ones(model.down_phases());
    let tail = linalg::solve_vec(&(-k.clone()), &psi_one)?;
    let n0 = model.t_star_00.nrows();
    let atom_col = psi * &model.p_m0 * &star_inv * linalg::ones(n0);
    let eta = (&pi * (&tail - &atom_col))[0];
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::Solver { what: "fluid normalization", residual: eta });
    }
    pi /= eta;
    let c0 = -(&pi * &atom_col)[0];
    let return_col = psi_one;
    Ok(FluidSolution { psi: psi.clone(), k, pi_plus: pi, c0, tail, return_col })
}

impl FluidSolution {
    /// `P[level > t]`.
    pub fn ccdf(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        let e = linalg::expm(&self.k, t)?.value;
        Ok((&self.pi_plus * e * &self.tail)[0])
    }

    /// Density of the level at `t > 0`.
    pub fn density(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        let e = linalg::expm(&self.k, t)?.value;
        Ok((&self.pi_plus * e * &self.return_col)[0])
    }

    /// Probability mass of the continuous part, `π₊(-K)^{-1}Ψ1`.
    pub fn continuous_mass(&self) -> f64 {
        (&self.pi_plus * &self.tail)[0]
    }

    /// Tail of the level plus an independent `PH(alpha, S)` size, given that
    /// the probability of level zero is `empty`.
    pub fn response_ccdf(&self, empty: f64, alpha: &RowVector, s: &Matrix, t: f64) -> Result<f64> {
        check_time(t)?;
        let nk = self.k.nrows();
        let ns = s.nrows();
        let mut b = Matrix::zeros(nk + ns, nk + ns);
        b.view_mut((0, 0), (nk, nk)).copy_from(&self.k);
        b.view_mut((0, nk), (nk, ns))
            .copy_from(&(linalg::col_matrix(&self.return_col) * linalg::row_matrix(alpha)));
        b.view_mut((nk, nk), (ns, ns)).copy_from(s);
        let e = linalg::expm(&b, t)?.value;
        let wait = (&self.pi_plus * e.view((0, 0), (nk, nk)) * &self.tail)[0];
        let conv = (&self.pi_plus * e.view((0, nk), (nk, ns)) * linalg::ones(ns))[0];
        let own = empty * (alpha * linalg::expm(s, t)?.value * linalg::ones(ns))[0];
        Ok(wait + own + conv)
    }
}

impl FluidSolution {
    /// `ccdf` over a grid of times.
    pub fn ccdf_many(&self, times: &[f64]) -> Result<Vec<f64>> {
        let rows = linalg::row_orbit(&self.pi_plus, &self.k, times)?;
        Ok(rows.iter().map(|r| (r * &self.tail)[0]).collect())
    }

    /// `response_ccdf` over a grid of times.
    pub fn response_ccdf_many(&self, empty: f64, alpha: &RowVector, s: &Matrix, times: &[f64]) -> Result<Vec<f64>> {
        let nk = self.k.nrows();
        let ns = s.nrows();
        let mut b = Matrix::zeros(nk + ns, nk + ns);
        b.view_mut((0, 0), (nk, nk)).copy_from(&self.k);
        b.view_mut((0, nk), (nk, ns))
            .copy_from(&(linalg::col_matrix(&self.return_col) * linalg::row_matrix(alpha)));
        b.view_mut((nk, nk), (ns, ns)).copy_from(s);
        let mut start = RowVector::zeros(nk + ns);
        start.columns_mut(0, nk).copy_from(&self.pi_plus);
        let joint = linalg::row_orbit(&start, &b, times)?;
        let own = linalg::row_orbit(alpha, s, times)?;
        Ok(joint
            .iter()
            .zip(&own)
            .map(|(r, o)| {
                let wait = (r.columns(0, nk) * &self.tail)[0];
                let conv = r.columns(nk, ns).sum();
                wait + conv + empty * o.sum()
            })
            .collect())
    }
}

/// Solved fluid model for Nudge-M; window 0 gives FCFS.
pub fn nudge_m_solution(mix: &JobMix, m: usize) -> Result<FluidSolution> {
    let model = if m == 0 { build_fcfs_fluid(mix)? } else { build_nudge_m_fluid(mix, m)? };
    let psi = solve_riccati(&model)?;
    stationary_fluid(&model, &psi)
}

/// `P[W_1 > t]` from a solved model.
pub fn w1_ccdf(solution: &FluidSolution, t: f64) -> Result<f64> {
    solution.ccdf(t)
}

/// `P[R_1 > t]`: the type-1 wait plus the type-1 size. The queue is empty with
/// probability `1 - lambda`.
pub fn r1_ccdf(solution: &FluidSolution, mix: &JobMix, t: f64) -> Result<f64> {
    solution.response_ccdf(1.0 - mix.lambda(), mix.ph1().alpha(), mix.ph1().generator(), t)
}

/// Response-time tails of both types and their job-averaged mix at `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseTail {
    pub t: f64,
    pub type1: f64,
    pub type2: f64,
    pub overall: f64,
}

/// Evaluates the Nudge-M response-time tails over a grid of times.
pub fn response_tails(mix: &JobMix, m: usize, times: &[f64]) -> Result<Vec<ResponseTail>> {
    let p = mix.p();
    let solution = if p > 0.0 { Some(nudge_m_solution(mix, m)?) } else { None };
    let w2 = if p < 1.0 && m > 0 { Some(resp2::W2Model::new(mix, m)?) } else { None };
    let type1 = match &solution {
        Some(sol) => sol.response_ccdf_many(1.0 - mix.lambda(), mix.ph1().alpha(), mix.ph1().generator(), times)?,
        None => vec![0.0; times.len()],
    };
    let type2 = match (&w2, p < 1.0) {
        (Some(model), _) => model.r2_ccdf_many(times)?,
        (None, true) => resp2::fcfs_response_ccdf_many(mix, mix.ph2().alpha(), mix.ph2().generator(), times)?,
        (None, false) => vec![0.0; times.len()],
    };
    Ok(times
        .iter()
        .zip(type1.into_iter().zip(type2))
        .map(|(&t, (type1, type2))| ResponseTail { t, type1, type2, overall: p * type1 + (1.0 - p) * type2 })
        .collect())
}

/// Tail improvement ratio `1 - P[R > t]/P[R_FCFS > t]` of Nudge-M at each time.
pub fn tir_curve(mix: &JobMix, m: usize, times: &[f64]) -> Result<Vec<(f64, f64)>> {
    let nudge = response_tails(mix, m, times)?;
    let fcfs = response_tails(mix, 0, times)?;
    Ok(nudge
        .iter()
        .zip(&fcfs)
        .map(|(a, b)| (a.t, 1.0 - a.overall / b.overall))
        .collect())
}
