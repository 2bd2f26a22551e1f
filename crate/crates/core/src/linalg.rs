//! Small shared linear-algebra helpers on complex matrices.
//!
//! The Hermitian eigensolver is a classical Householder tridiagonalization
//! followed by implicit-shift QL with eigenvector accumulation. (The
//! general-purpose eigensolver shipped with the matrix library fails to
//! converge on some complex Hermitian inputs with clustered eigenvalues, so
//! the decomposition the whole verification stack rests on is implemented
//! and tested here.)

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Householder reduction of a Hermitian matrix to real symmetric
/// tridiagonal form; returns `(diag, off_diag, q)` with `A = Q T Q†`.
fn tridiagonalize(mat: &DMatrix<Complex64>) -> (Vec<f64>, Vec<f64>, DMatrix<Complex64>) {
    let n = mat.nrows();
    let mut a = mat.clone();
    let mut q = DMatrix::identity(n, n);

    for k in 0..n.saturating_sub(2) {
        // column below the diagonal
        let norm_x: f64 = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm_x;

        // Householder vector v = x − α e₁ (normalized)
        let mut v = vec![ZERO; n];
        v[k + 1] = x0 - alpha;
        for i in k + 2..n {
            v[i] = a[(i, k)];
        }
        let vnorm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for c in v.iter_mut() {
            *c /= vnorm;
        }

        // Hermitian rank-2 update A ← A − w v† − v w†,
        // w = p − (v†p) v with p = 2·A v
        let mut p = vec![ZERO; n];
        for i in 0..n {
            let mut acc = ZERO;
            for (j, &vj) in v.iter().enumerate() {
                acc += a[(i, j)] * vj;
            }
            p[i] = acc * 2.0;
        }
        let vp: Complex64 = v.iter().zip(&p).map(|(vi, pi)| vi.conj() * pi).sum();
        let mut w = p;
        for (wi, &vi) in w.iter_mut().zip(v.iter()) {
            *wi -= vi * vp;
        }
        for i in 0..n {
            for j in 0..n {
                let upd = w[i] * v[j].conj() + v[i] * w[j].conj();
                a[(i, j)] -= upd;
            }
        }
        // Q ← Q (I − 2 v v†)
        for row in 0..n {
            let mut acc = ZERO;
            for (j, &vj) in v.iter().enumerate() {
                acc += q[(row, j)] * vj;
            }
            for (j, &vj) in v.iter().enumerate() {
                q[(row, j)] -= acc * 2.0 * vj.conj();
            }
        }
    }

    // phase-rotate the complex off-diagonal onto the real axis: with
    // Φ = diag(φ) and φ_{i+1} = t_{i+1,i}·φ_i / |t_{i+1,i}|, the matrix
    // Φ† T Φ is real symmetric tridiagonal
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut phi = Complex64::new(1.0, 0.0);
    let mut phases = vec![Complex64::new(1.0, 0.0); n];
    for i in 0..n {
        diag[i] = a[(i, i)].re;
        phases[i] = phi;
        if i + 1 < n {
            let t = a[(i + 1, i)];
            let r = t.norm();
            off[i] = r;
            if r > 0.0 {
                phi = t * phi / r;
            }
        }
    }
    for (col, &ph) in phases.iter().enumerate() {
        for row in 0..n {
            q[(row, col)] *= ph;
        }
    }
    (diag, off, q)
}

/// Implicit-shift QL iteration on a real symmetric tridiagonal matrix,
/// accumulating the rotations into the columns of `z`.
fn tql2(d: &mut [f64], e: &mut Vec<f64>, z: &mut DMatrix<Complex64>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e.push(0.0);

    for l in 0..n {
        let mut iter = 0;
        loop {
            // find a negligible off-diagonal element
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(Error::Data(
                    "tridiagonal QL iteration failed to converge".into(),
                ));
            }

            // Wilkinson shift
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;

            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // deflate and retry the sweep
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                for row in 0..z.nrows() {
                    let zi = z[(row, i)];
                    let zi1 = z[(row, i + 1)];
                    z[(row, i + 1)] = zi * s + zi1 * c;
                    z[(row, i)] = zi * c - zi1 * s;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted
/// ascending and eigenvector columns permuted to match.
pub fn hermitian_eigen_sorted(mat: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let n = mat.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let (mut d, off, mut q) = tridiagonalize(mat);
    let mut e = off;
    tql2(&mut d, &mut e, &mut q).expect("QL iteration converges for Hermitian input");

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &q.column(i));
    }
    (values, vectors)
}

/// Sorted eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(mat: &DMatrix<Complex64>) -> Vec<f64> {
    hermitian_eigen_sorted(mat).0
}

/// Largest singular value of a Hermitian matrix (its spectral norm).
pub fn spectral_norm_hermitian(mat: &DMatrix<Complex64>) -> f64 {
    hermitian_eigenvalues(mat)
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max)
}

/// Max-abs deviation from Hermiticity.
pub fn hermiticity_error(mat: &DMatrix<Complex64>) -> f64 {
    let adj = mat.adjoint();
    (mat - adj).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Compensated (Kahan) accumulator for reproducible sums in fixed order.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> KahanSum {
        KahanSum::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn random_hermitian(n: usize, seed: u64) -> DMatrix<Complex64> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
    }

    fn check_eigen(mat: &DMatrix<Complex64>, tol: f64) {
        let n = mat.nrows();
        let (vals, vecs) = hermitian_eigen_sorted(mat);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let scale = vals.iter().map(|v| v.abs()).fold(1.0, f64::max);
        // residuals per eigenpair
        for j in 0..n {
            let v = vecs.column(j);
            let mut res = 0.0f64;
            for i in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += mat[(i, k)] * v[k];
                }
                acc -= v[i] * Complex64::new(vals[j], 0.0);
                res = res.max(acc.norm());
            }
            assert!(res <= tol * scale, "eigenpair {j}: residual {res:.3e}");
        }
        // orthonormality
        let gram = vecs.adjoint() * &vecs;
        let dev = (&gram - DMatrix::<Complex64>::identity(n, n))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        assert!(dev <= tol, "orthonormality deviation {dev:.3e}");
    }

    #[test]
    fn random_matrices_decompose_accurately() {
        for n in [1usize, 2, 3, 5, 16, 40] {
            check_eigen(&random_hermitian(n, n as u64), 1e-11);
        }
    }

    #[test]
    fn clustered_spectra_are_resolved() {
        // eigenvalues packed exponentially close must still give small
        // residuals (the failure mode that disqualified the off-the-shelf
        // solver)
        let n = 24;
        let u = {
            let h = random_hermitian(n, 99);
            hermitian_eigen_sorted(&h).1
        };
        let mut d = DMatrix::zeros(n, n);
        for i in 0..n {
            let cluster = (i / 3) as f64;
            let split = 1e-9 * (i % 3) as f64;
            d[(i, i)] = Complex64::new(cluster + split, 0.0);
        }
        let mat = &u * d * u.adjoint();
        check_eigen(&mat, 1e-10);
    }

    #[test]
    fn diagonal_and_degenerate_inputs() {
        let mut m = DMatrix::zeros(3, 3);
        m[(0, 0)] = Complex64::new(2.0, 0.0);
        m[(1, 1)] = Complex64::new(2.0, 0.0);
        m[(2, 2)] = Complex64::new(-1.0, 0.0);
        let (vals, _) = hermitian_eigen_sorted(&m);
        assert_eq!(vals, vec![-1.0, 2.0, 2.0]);

        let zero = DMatrix::<Complex64>::zeros(4, 4);
        let (vals, vecs) = hermitian_eigen_sorted(&zero);
        assert!(vals.iter().all(|&v| v == 0.0));
        let gram = vecs.adjoint() * &vecs;
        assert!((gram - DMatrix::<Complex64>::identity(4, 4))
            .iter()
            .all(|c| c.norm() < 1e-14));
    }

    #[test]
    fn kahan_beats_naive_on_adversarial_sum() {
        let mut k = KahanSum::new();
        let mut naive = 0.0f64;
        for _ in 0..10_000 {
            k.add(0.1);
            naive += 0.1;
        }
        assert!((k.value() - 1000.0).abs() <= (naive - 1000.0).abs());
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn eigenvalues_sum_to_trace(seed in 0u64..500, n in 1usize..12) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
            let mut m = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
            let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
            let vals = hermitian_eigenvalues(&m);
            let trace: f64 = (0..n).map(|i| m[(i, i)].re).sum();
            prop_assert!((vals.iter().sum::<f64>() - trace).abs() < 1e-9 * (1.0 + trace.abs()));
        }
    }
}
