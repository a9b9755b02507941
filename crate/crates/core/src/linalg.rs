//! Dense linear-algebra kernels: Kronecker products and sums, the matrix
//! exponential, linear solves and the dominant real eigenpair.

use nalgebra::{DMatrix, DVector, RowDVector};

use crate::error::{Error, Result};
use crate::tol;

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;
pub type RowVector = RowDVector<f64>;

/// Kronecker product `a ⊗ b`.
pub fn kron_prod(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

/// Kronecker sum `a ⊕ b = a ⊗ I + I ⊗ b`.
pub fn kron_sum(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if !a.is_square() || !b.is_square() {
        return Err(Error::Dimension(format!(
            "kron_sum needs square operands, got {}x{} and {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let ia = Matrix::identity(a.nrows(), a.nrows());
    let ib = Matrix::identity(b.nrows(), b.nrows());
    Ok(a.kronecker(&ib) + ia.kronecker(b))
}

/// Column vector of ones.
pub fn ones(n: usize) -> Vector {
    Vector::from_element(n, 1.0)
}

/// Row vector of ones.
pub fn ones_row(n: usize) -> RowVector {
    RowVector::from_element(n, 1.0)
}

/// Unit row vector `e_k` of length `n`.
pub fn unit_row(n: usize, k: usize) -> RowVector {
    let mut e = RowVector::zeros(n);
    e[k] = 1.0;
    e
}

/// Row vector viewed as a `1 x n` matrix.
pub fn row_matrix(v: &RowVector) -> Matrix {
    Matrix::from_row_slice(1, v.len(), v.as_slice())
}

/// Column vector viewed as a `n x 1` matrix.
pub fn col_matrix(v: &Vector) -> Matrix {
    Matrix::from_column_slice(v.len(), 1, v.as_slice())
}

fn check_finite(m: &Matrix, what: &str) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numeric(format!("{what}: non-finite entries")))
    }
}

/// Solves `a x = b`.
pub fn solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if !a.is_square() || a.nrows() != b.nrows() {
        return Err(Error::Dimension(format!(
            "solve: {}x{} system with {}x{} right-hand side",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let x = a
        .clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::Numeric("solve: singular matrix".into()))?;
    check_finite(&x, "solve")?;
    Ok(x)
}

/// Solves `a x = b` for a column vector.
pub fn solve_vec(a: &Matrix, b: &Vector) -> Result<Vector> {
    let x = solve(a, &col_matrix(b))?;
    Ok(x.column(0).into_owned())
}

/// Solves `x a = b` for a row vector `x`.
pub fn solve_left(b: &RowVector, a: &Matrix) -> Result<RowVector> {
    let x = solve_vec(&a.transpose(), &b.transpose())?;
    Ok(x.transpose())
}

/// Inverse of a square matrix.
pub fn inverse(a: &Matrix) -> Result<Matrix> {
    solve(a, &Matrix::identity(a.nrows(), a.nrows()))
}

/// Matrix exponential together with scaling diagnostics.
#[derive(Debug, Clone)]
pub struct MatrixExpResult {
    pub value: Matrix,
    /// One-norm of `Q t` that drove the choice of Padé degree and scaling.
    pub norm_bound: f64,
    pub squarings: u32,
    pub pade_degree: u32,
}

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
// Largest one-norms for which each Padé degree meets double precision.
#[allow(clippy::excessive_precision)]
const THETA: [(u32, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152;

fn one_norm(a: &Matrix) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn pade_low(a: &Matrix, b: &[f64]) -> (Matrix, Matrix) {
    let n = a.nrows();
    let id = Matrix::identity(n, n);
    let a2 = a * a;
    let mut u = id.clone() * b[1];
    let mut v = id * b[0];
    let mut pow = a2.clone();
    let mut k = 2;
    while k < b.len() {
        v += &pow * b[k];
        if k + 1 < b.len() {
            u += &pow * b[k + 1];
        }
        pow = &pow * &a2;
        k += 2;
    }
    (a * u, v)
}

fn pade13(a: &Matrix) -> (Matrix, Matrix) {
    let b = &PADE13;
    let n = a.nrows();
    let id = Matrix::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
    let u = a * (&a6 * inner_u + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1]);
    let inner_v = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let v = &a6 * inner_v + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];
    (u, v)
}

/// `exp(q t)` by scaling and squaring with a Padé approximant of degree
/// 3, 5, 7, 9 or 13 chosen from the one-norm of `q t`.
pub fn expm(q: &Matrix, t: f64) -> Result<MatrixExpResult> {
    if !q.is_square() {
        return Err(Error::Dimension(format!("expm of {}x{} matrix", q.nrows(), q.ncols())));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Input(format!("expm: time {t} must be finite and nonnegative")));
    }
    check_finite(q, "expm argument")?;
    let n = q.nrows();
    let a = q * t;
    let norm = one_norm(&a);
    if n == 0 || norm == 0.0 {
        return Ok(MatrixExpResult {
            value: Matrix::identity(n, n),
            norm_bound: norm,
            squarings: 0,
            pade_degree: 0,
        });
    }

    let low = THETA.iter().find(|(_, theta)| norm <= *theta);
    let (u, v, squarings, degree) = match low {
        Some(&(degree, _)) => {
            let coeffs: &[f64] = match degree {
                3 => &PADE3,
                5 => &PADE5,
                7 => &PADE7,
                _ => &PADE9,
            };
            let (u, v) = pade_low(&a, coeffs);
            (u, v, 0u32, degree)
        }
        None => {
            let s = (norm / THETA13).log2().ceil().max(0.0) as u32;
            let scaled = &a / 2f64.powi(s as i32);
            let (u, v) = pade13(&scaled);
            (u, v, s, 13)
        }
    };
    let mut r = solve(&(&v - &u), &(&v + &u))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    check_finite(&r, "expm")?;
    Ok(MatrixExpResult {
        value: r,
        norm_bound: norm,
        squarings,
        pade_degree: degree,
    })
}

/// `v exp(q t)` for each time, stepping through the sorted times and reusing
/// `exp(q h)` for repeated step lengths `h`. Results follow the input order.
pub fn row_orbit(v: &RowVector, q: &Matrix, times: &[f64]) -> Result<Vec<RowVector>> {
    let mut order: Vec<usize> = (0..times.len()).collect();
    for &t in times {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Input(format!("time {t} must be finite and nonnegative")));
        }
    }
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
    let mut out = vec![RowVector::zeros(v.len()); times.len()];
    let mut steps: Vec<(f64, Matrix)> = Vec::new();
    let mut current = v.clone();
    let mut clock = 0.0;
    for i in order {
        let h = times[i] - clock;
        if h > 0.0 {
            let tol = 1e-12 * h.max(1.0);
            let e = match steps.iter().position(|(k, _)| (k - h).abs() <= tol) {
                Some(j) => &steps[j].1,
                None => {
                    steps.push((h, expm(q, h)?.value));
                    &steps.last().unwrap().1
                }
            };
            current = &current * e;
            clock = times[i];
        }
        out[i] = current.clone();
    }
    Ok(out)
}

/// Real dominant eigenvalue (largest real part) with its left and right
/// eigenvectors, normalized so that `left * right = 1` and `right` sums to one.
#[derive(Debug, Clone)]
pub struct DominantEigen {
    pub value: f64,
    pub left: RowVector,
    pub right: Vector,
}

/// Dominant eigenpair of `a`. Rejects complex or repeated dominant eigenvalues.
pub fn dominant_eigen(a: &Matrix) -> Result<DominantEigen> {
    if !a.is_square() || a.nrows() == 0 {
        return Err(Error::Dimension("dominant_eigen needs a nonempty square matrix".into()));
    }
    check_finite(a, "dominant_eigen")?;
    let n = a.nrows();
    let eig = a.clone().complex_eigenvalues();
    let scale = one_norm(a).max(1.0);
    let (idx, top) = eig
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.re.total_cmp(&y.1.re))
        .map(|(i, z)| (i, *z))
        .expect("nonempty spectrum");
    if top.im.abs() > tol::EIGEN_IMAG * scale {
        return Err(Error::UnsupportedSpectrum(format!(
            "dominant eigenvalue {}{:+}i is complex",
            top.re, top.im
        )));
    }
    for (i, z) in eig.iter().enumerate() {
        if i != idx && (z.re - top.re).abs() <= tol::EIGEN_SEPARATION * scale {
            return Err(Error::UnsupportedSpectrum(format!(
                "dominant eigenvalue {} is not simple (companion {}{:+}i)",
                top.re, z.re, z.im
            )));
        }
    }

    // Inverse iteration with a slightly perturbed shift.
    let shift = top.re + 1e-9 * scale;
    let shifted = a - Matrix::identity(n, n) * shift;
    let lu = shifted.clone().lu();
    let lu_t = shifted.transpose().lu();
    let mut right = ones(n);
    let mut left = ones(n);
    for _ in 0..6 {
        right = lu
            .solve(&right)
            .ok_or_else(|| Error::Numeric("inverse iteration: singular shift".into()))?;
        let nr = right.norm();
        right /= nr;
        left = lu_t
            .solve(&left)
            .ok_or_else(|| Error::Numeric("inverse iteration: singular shift".into()))?;
        let nl = left.norm();
        left /= nl;
    }
    let left = left.transpose();
    let value = (&left * a * &right)[0] / (&left * &right)[0];
    let rs = right.sum();
    if rs == 0.0 {
        return Err(Error::Numeric("dominant right eigenvector sums to zero".into()));
    }
    let right = right / rs;
    let lr = (&left * &right)[0];
    let left = left / lr;
    Ok(DominantEigen { value, left, right })
}

/// Checks that `m` is a subgenerator: nonnegative off-diagonal entries and
/// row sums at most zero.
pub fn is_subgenerator(m: &Matrix) -> bool {
    if !m.is_square() {
        return false;
    }
    m.row_iter().enumerate().all(|(i, row)| {
        let off_ok = row
            .iter()
            .enumerate()
            .all(|(j, &x)| i == j || x >= 0.0);
        off_ok && row.sum() <= tol::GENERATOR_ROW_SUM * (1.0 + row[i].abs())
    })
}

/// Stacks matrices into a block matrix given as rows of blocks.
pub fn block(rows: &[Vec<&Matrix>]) -> Result<Matrix> {
    let heights: Vec<usize> = rows
        .iter()
        .map(|r| r.first().map(|m| m.nrows()).unwrap_or(0))
        .collect();
    let widths: Vec<usize> = rows
        .first()
        .map(|r| r.iter().map(|m| m.ncols()).collect())
        .unwrap_or_default();
    let total_h: usize = heights.iter().sum();
    let total_w: usize = widths.iter().sum();
    let mut out = Matrix::zeros(total_h, total_w);
    let mut r0 = 0;
    for (bi, r) in rows.iter().enumerate() {
        if r.len() != widths.len() {
            return Err(Error::Dimension("block: ragged block rows".into()));
        }
        let mut c0 = 0;
        for (bj, m) in r.iter().enumerate() {
            if m.nrows() != heights[bi] || m.ncols() != widths[bj] {
                return Err(Error::Dimension(format!(
                    "block ({bi},{bj}) is {}x{}, expected {}x{}",
                    m.nrows(),
                    m.ncols(),
                    heights[bi],
                    widths[bj]
                )));
            }
            out.view_mut((r0, c0), (m.nrows(), m.ncols())).copy_from(*m);
            c0 += widths[bj];
        }
        r0 += heights[bi];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn random_subgenerator(n: usize, seed: u64) -> Matrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut q = Matrix::zeros(n, n);
        for i in 0..n {
            let mut sum = 0.0;
            for j in 0..n {
                if i != j {
                    let x: f64 = rng.random_range(0.0..2.0);
                    q[(i, j)] = x;
                    sum += x;
                }
            }
            q[(i, i)] = -sum - rng.random_range(0.0..1.0);
        }
        q
    }

    #[test]
    fn kron_identities() {
        let i2 = Matrix::identity(2, 2);
        let i3 = Matrix::identity(3, 3);
        assert_eq!(kron_prod(&i2, &i3), Matrix::identity(6, 6));
        let a = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let z = Matrix::zeros(1, 1);
        assert_eq!(kron_sum(&a, &z).unwrap(), a);
        assert!(kron_sum(&Matrix::zeros(2, 3), &z).is_err());
    }

    #[test]
    fn kron_sum_eigenvalues_are_pairwise_sums() {
        // Triangular operands: eigenvalues are the diagonals, so the oracle is enumeration.
        let a = Matrix::from_row_slice(2, 2, &[-1.0, 0.7, 0.0, -2.5]);
        let b = Matrix::from_row_slice(2, 2, &[0.3, 0.0, 1.1, -0.4]);
        let mut expected: Vec<f64> = [-1.0, -2.5]
            .iter()
            .flat_map(|x| [0.3, -0.4].iter().map(move |y| x + y))
            .collect();
        expected.sort_by(f64::total_cmp);
        let mut got: Vec<f64> = kron_sum(&a, &b)
            .unwrap()
            .complex_eigenvalues()
            .iter()
            .map(|z| z.re)
            .collect();
        got.sort_by(f64::total_cmp);
        for (g, e) in got.iter().zip(&expected) {
            assert_relative_eq!(g, e, epsilon = 1e-12);
        }
    }

    #[test]
    fn expm_trivial_cases() {
        let z = Matrix::zeros(3, 3);
        assert_eq!(expm(&z, 2.0).unwrap().value, Matrix::identity(3, 3));
        let d = Matrix::from_element(1, 1, -1.0);
        assert_relative_eq!(expm(&d, 1.0).unwrap().value[(0, 0)], (-1f64).exp(), max_relative = 1e-14);
        assert!(expm(&d, -1.0).is_err());
        let bad = Matrix::from_element(1, 1, f64::NAN);
        assert!(expm(&bad, 1.0).is_err());
    }

    #[test]
    fn expm_semigroup_property() {
        let q = random_subgenerator(5, 7);
        let a = expm(&q, 0.8).unwrap().value;
        let b = expm(&q, 2.3).unwrap().value;
        let c = expm(&q, 3.1).unwrap().value;
        let diff = (&a * &b - &c).abs().max();
        assert!(diff < 1e-10, "semigroup defect {diff}");
    }

    #[test]
    fn expm_matches_taylor_series_oracle() {
        // Plain truncated Taylor series with many terms on a small-norm argument.
        let q = random_subgenerator(4, 3) * 0.1;
        let mut term = Matrix::identity(4, 4);
        let mut sum = term.clone();
        for k in 1..60 {
            term = &term * &q / k as f64;
            sum += &term;
        }
        let e = expm(&q, 1.0).unwrap().value;
        assert!((e - sum).abs().max() < 1e-14);
    }

    #[test]
    fn expm_of_subgenerator_is_substochastic() {
        let q = random_subgenerator(6, 11);
        for &t in &[0.0, 0.01, 0.5, 1.0, 5.0, 50.0, 500.0] {
            let e = expm(&q, t).unwrap().value;
            assert!(e.iter().all(|&x| x >= -1e-15), "negative entry at t={t}");
            for row in e.row_iter() {
                let s = row.sum();
                assert!((0.0..=1.0 + tol::EXPM_ROW_SUM).contains(&s), "row sum {s} at t={t}");
            }
        }
    }

    #[test]
    fn dominant_eigen_of_triangular() {
        let a = Matrix::from_row_slice(3, 3, &[-1.0, 0.5, 0.2, 0.0, -0.3, 0.1, 0.0, 0.0, -2.0]);
        let d = dominant_eigen(&a).unwrap();
        assert_relative_eq!(d.value, -0.3, epsilon = 1e-12);
        let resid = &a * &d.right - &d.right * d.value;
        assert!(resid.norm() < 1e-10);
        let lresid = &d.left * &a - &d.left * d.value;
        assert!(lresid.norm() < 1e-10);
        assert_relative_eq!((&d.left * &d.right)[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dominant_eigen_rejects_complex_and_repeated() {
        let rot = Matrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert!(matches!(dominant_eigen(&rot), Err(Error::UnsupportedSpectrum(_))));
        let rep = Matrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(dominant_eigen(&rep), Err(Error::UnsupportedSpectrum(_))));
    }

    #[test]
    fn block_assembly() {
        let a = Matrix::identity(2, 2);
        let b = Matrix::zeros(2, 1);
        let c = Matrix::zeros(1, 2);
        let d = Matrix::from_element(1, 1, 5.0);
        let m = block(&[vec![&a, &b], vec![&c, &d]]).unwrap();
        assert_eq!(m.nrows(), 3);
        assert_eq!(m[(2, 2)], 5.0);
        assert!(block(&[vec![&a, &c]]).is_err());
    }
}
