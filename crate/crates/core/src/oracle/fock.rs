//! Dense Fock-space assembly of the operator each representation implements.
//!
//! Jordan-Wigner ordering: k-points are the most significant grouping, then
//! bands, then spin — mode `(p, k, σ) ↦ (k·n_s + p)·2 + σ`. Operators are
//! built by direct action on occupation-number basis states, so each
//! representation's assembly is an independent code path from the tensor
//! algebra it is checked against.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::factorize::{CholeskyFactors, DfFactors, ThcFactors};
use crate::hamiltonian::KHamiltonian;
use crate::kmesh::modsub;
use crate::linalg::{hermitian_eigenvalues, spectral_norm_hermitian};

/// Dense-assembly cap: at most `2^12`-dimensional Fock spaces.
pub const MAX_QUBITS: usize = 12;

/// The operator a representation implements, as a dense Fock-space matrix.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    pub matrix: DMatrix<Complex64>,
    pub provenance: &'static str,
    /// Identity weight the walk leaves out; the block-encoded operator is
    /// `matrix − encoded_shift·I`.
    pub encoded_shift: f64,
}

impl DenseOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// The operator actually encoded by the walk.
    pub fn encoded(&self) -> DMatrix<Complex64> {
        let mut m = self.matrix.clone();
        for i in 0..m.nrows() {
            m[(i, i)] -= Complex64::new(self.encoded_shift, 0.0);
        }
        m
    }

    pub fn spectrum(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn encoded_norm(&self) -> f64 {
        spectral_norm_hermitian(&self.encoded())
    }
}

/// λ-bound check: passes iff `λ + 1e−9 ≥ ‖encoded operator‖`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct LambdaBoundReport {
    pub lambda: f64,
    pub encoded_norm: f64,
    pub margin: f64,
    pub pass: bool,
}

pub fn check_lambda_bound(op: &DenseOperator, lambda: f64) -> LambdaBoundReport {
    let norm = op.encoded_norm();
    LambdaBoundReport {
        lambda,
        encoded_norm: norm,
        margin: lambda - norm,
        pass: lambda + 1e-9 >= norm,
    }
}

/// Deviation of `a − b` from a pure identity shift: returns
/// `(shift, max_abs_deviation)`.
pub fn identity_shift_deviation(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> (f64, f64) {
    let dim = a.nrows();
    let mut tr = Complex64::new(0.0, 0.0);
    for i in 0..dim {
        tr += a[(i, i)] - b[(i, i)];
    }
    let shift = tr / dim as f64;
    let mut dev = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let mut d = a[(i, j)] - b[(i, j)];
            if i == j {
                d -= shift;
            }
            dev = dev.max(d.norm());
        }
    }
    (shift.re, dev)
}

/// Ladder-operator context on `2·n_s·N_k` modes.
pub(crate) struct FockSpace {
    pub n_spatial: usize,
    pub dim: usize,
}

impl FockSpace {
    pub fn new(ham: &KHamiltonian) -> Result<FockSpace> {
        let modes = ham.total_spin_orbitals();
        if modes > MAX_QUBITS {
            return Err(Error::DimensionCap {
                qubits: modes,
                cap: MAX_QUBITS,
            });
        }
        Ok(FockSpace {
            n_spatial: ham.n_spatial,
            dim: 1 << modes,
        })
    }

    #[inline]
    pub fn mode(&self, k: usize, p: usize, spin: usize) -> usize {
        (k * self.n_spatial + p) * 2 + spin
    }

    /// Apply a normal-ordered ladder string (listed left to right, applied
    /// right to left) to basis state `state`; returns `(new_state, sign)`.
    #[inline]
    fn apply_ops(&self, ops: &[(usize, bool)], state: usize) -> Option<(usize, f64)> {
        let mut s = state;
        let mut sign = 1.0f64;
        for &(mode, dagger) in ops.iter().rev() {
            let occupied = s & (1 << mode) != 0;
            if dagger == occupied {
                return None;
            }
            let parity = (s & ((1 << mode) - 1)).count_ones();
            if parity % 2 == 1 {
                sign = -sign;
            }
            s ^= 1 << mode;
        }
        Some((s, sign))
    }

    /// Accumulate `coeff · op_string` into `out`.
    pub fn add_term(&self, out: &mut DMatrix<Complex64>, coeff: Complex64, ops: &[(usize, bool)]) {
        if coeff.norm_sqr() == 0.0 {
            return;
        }
        for state in 0..self.dim {
            if let Some((target, sign)) = self.apply_ops(ops, state) {
                out[(target, state)] += coeff * sign;
            }
        }
    }

    /// Spin-summed one-body operator `Σ_σ Σ_{PQ} C[P][Q] a†_{Pσ} a_{Qσ}` for
    /// a spatial coefficient matrix over composite indices `P = k·n_s + p`.
    pub fn one_body(&self, coeffs: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let n_sp = coeffs.nrows();
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for spin in 0..2 {
            for p in 0..n_sp {
                for q in 0..n_sp {
                    let c = coeffs[(p, q)];
                    self.add_term(&mut out, c, &[(2 * p + spin, true), (2 * q + spin, false)]);
                }
            }
        }
        out
    }
}

fn trace_mean(m: &DMatrix<Complex64>) -> f64 {
    let mut tr = Complex64::new(0.0, 0.0);
    for i in 0..m.nrows() {
        tr += m[(i, i)];
    }
    (tr / m.nrows() as f64).re
}

fn effective_one_body_matrix(ham: &KHamiltonian) -> DMatrix<Complex64> {
    let hp = ham.effective_one_body();
    let nk = ham.mesh.num_kpoints();
    let n = ham.n_spatial;
    DMatrix::from_fn(nk * n, nk * n, |a, b| {
        let (ka, pa) = (a / n, a % n);
        let (kb, pb) = (b / n, b % n);
        if ka == kb {
            hp[[ka, pa, pb]]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn bare_one_body_matrix(ham: &KHamiltonian) -> DMatrix<Complex64> {
    let nk = ham.mesh.num_kpoints();
    let n = ham.n_spatial;
    DMatrix::from_fn(nk * n, nk * n, |a, b| {
        let (ka, pa) = (a / n, a % n);
        let (kb, pb) = (b / n, b % n);
        if ka == kb {
            ham.h[[ka, pa, pb]]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Direct second-quantized assembly of `H = H₁ + H₂`.
pub fn assemble_direct(ham: &KHamiltonian) -> Result<DenseOperator> {
    let fock = FockSpace::new(ham)?;
    let nk = ham.mesh.num_kpoints();
    let n = ham.n_spatial;
    let mut matrix = fock.one_body(&bare_one_body_matrix(ham));

    for q in 0..nk {
        let qv = ham.mesh.from_flat(q);
        for k in 0..nk {
            let kv = ham.mesh.from_flat(k);
            let kq = ham.mesh.flat_index(modsub(&ham.mesh, kv, qv).expect("valid"));
            for kp in 0..nk {
                let kpv = ham.mesh.from_flat(kp);
                let kpq = ham.mesh.flat_index(modsub(&ham.mesh, kpv, qv).expect("valid"));
                for sigma in 0..2 {
                    for tau in 0..2 {
                        for p in 0..n {
                            for qq in 0..n {
                                for r in 0..n {
                                    for s in 0..n {
                                        let val = ham.v_at(q, k, kp, p, qq, r, s) * 0.5;
                                        fock.add_term(
                                            &mut matrix,
                                            val,
                                            &[
                                                (fock.mode(k, p, sigma), true),
                                                (fock.mode(kq, qq, sigma), false),
                                                (fock.mode(kpq, r, tau), true),
                                                (fock.mode(kp, s, tau), false),
                                            ],
                                        );
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    Ok(DenseOperator {
        matrix,
        provenance: "direct",
        encoded_shift: 0.0,
    })
}

/// Sparse (Pauli) assembly: effective one-body term plus the symmetrized
/// two-body form whose second half is the anticommuted conjugate string.
pub fn assemble_sparse(ham: &KHamiltonian) -> Result<DenseOperator> {
    let fock = FockSpace::new(ham)?;
    let nk = ham.mesh.num_kpoints();
    let n = ham.n_spatial;
    let mut matrix = fock.one_body(&effective_one_body_matrix(ham));

    for q in 0..nk {
        let qv = ham.mesh.from_flat(q);
        for k in 0..nk {
            let kv = ham.mesh.from_flat(k);
            let kq = ham.mesh.flat_index(modsub(&ham.mesh, kv, qv).expect("valid"));
            for kp in 0..nk {
                let kpv = ham.mesh.from_flat(kp);
                let kpq = ham.mesh.flat_index(modsub(&ham.mesh, kpv, qv).expect("valid"));
                for sigma in 0..2 {
                    for tau in 0..2 {
                        for p in 0..n {
                            for qq in 0..n {
                                for r in 0..n {
                                    for s in 0..n {
                                        let val = ham.v_at(q, k, kp, p, qq, r, s) * 0.25;
                                        let m_p = fock.mode(k, p, sigma);
                                        let m_q = fock.mode(kq, qq, sigma);
                                        let m_r = fock.mode(kpq, r, tau);
                                        let m_s = fock.mode(kp, s, tau);
                                        fock.add_term(
                                            &mut matrix,
                                            val,
                                            &[(m_p, true), (m_q, false), (m_r, true), (m_s, false)],
                                        );
                                        fock.add_term(
                                            &mut matrix,
                                            val.conj(),
                                            &[(m_p, false), (m_q, true), (m_r, false), (m_s, true)],
                                        );
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    let shift = trace_mean(&matrix);
    Ok(DenseOperator {
        matrix,
        provenance: "sparse",
        encoded_shift: shift,
    })
}

/// Factor blocks lifted to spin-summed Fock operators, traceless parts only,
/// together with the coefficient 1-norm `s = Σ (|Re L| + |Im L|)`.
fn factor_pair_operators(
    ham: &KHamiltonian,
    fock: &FockSpace,
    fac: &CholeskyFactors,
) -> Vec<(DMatrix<Complex64>, DMatrix<Complex64>, f64)> {
    let nk = ham.mesh.num_kpoints();
    let n = ham.n_spatial;
    let n_sp = nk * n;
    let mut out = Vec::new();
    for q in 0..nk {
        let qv = ham.mesh.from_flat(q);
        for vec in &fac.vectors[q] {
            let mut rho = DMatrix::zeros(n_sp, n_sp);
            for k in 0..nk {
                let kv = ham.mesh.from_flat(k);
                let kq = ham.mesh.flat_index(modsub(&ham.mesh, kv, qv).expect("valid"));
                for p in 0..n {
                    for qq in 0..n {
                        rho[(k * n + p, kq * n + qq)] += vec[(k * n + p) * n + qq];
                    }
                }
            }
            let adj = rho.adjoint();
            let a_sp = (&rho + &adj) * Complex64::new(0.5, 0.0);
            let b_sp = (&rho - &adj) * Complex64::new(0.0, 0.5);
            let mut a = fock.one_body(&a_sp);
            let mut b = fock.one_body(&b_sp);
            let (ta, tb) = (trace_mean(&a), trace_mean(&b));
            for i in 0..fock.dim {
                a[(i, i)] -= Complex64::new(ta, 0.0);
                b[(i, i)] -= Complex64::new(tb, 0.0);
            }
            let s: f64 = vec.iter().map(|v| v.re.abs() + v.im.abs()).sum();
            out.push((a, b, s));
        }
    }
    out
}

/// Single-factorized assembly: effective one-body term plus
/// `½ Σ_{Q,n} (Â₀² + B̂₀²)` over traceless factor operators. The walk block
/// encodes each square through one step of amplitude amplification, dropping
/// an identity weight of `s²/4` per operator.
pub fn assemble_sf(ham: &KHamiltonian, fac: &CholeskyFactors) -> Result<DenseOperator> {
    let fock = FockSpace::new(ham)?;
    let one = fock.one_body(&effective_one_body_matrix(ham));
    let mut matrix = one.clone();
    let mut dropped = trace_mean(&one);
    for (a, b, s) in factor_pair_operators(ham, &fock, fac) {
        matrix += (&a * &a + &b * &b) * Complex64::new(0.5, 0.0);
        dropped += 0.5 * s * s;
    }
    Ok(DenseOperator {
        matrix,
        provenance: "sf",
        encoded_shift: dropped,
    })
}

/// Double-factorized assembly: like SF but with eigenvalue-truncated blocks;
/// the dropped identity weight per `(Q, n)` operator is `(Σ|f|)²/4`.
pub fn assemble_df(ham: &KHamiltonian, fac: &DfFactors) -> Result<DenseOperator> {
    let fock = FockSpace::new(ham)?;
    let nk = ham.mesh.num_kpoints();
    let n = ham.n_spatial;
    let n_sp = nk * n;
    let one = fock.one_body(&effective_one_body_matrix(ham));
    let mut matrix = one.clone();
    let mut dropped = trace_mean(&one);

    for q in 0..nk {
        let qv = fac.mesh.from_flat(q);
        for per_k in &fac.blocks[q] {
            for pick_a in [true, false] {
                let mut op_sp = DMatrix::zeros(n_sp, n_sp);
                let mut s = 0.0f64;
                for (k, block) in per_k.iter().enumerate() {
                    let kv = fac.mesh.from_flat(k);
                    let kq = fac.mesh.flat_index(modsub(&fac.mesh, kv, qv).expect("valid"));
                    let eig = if pick_a { &block.a } else { &block.b };
                    s += eig.values.iter().map(|f| f.abs()).sum::<f64>();
                    // embed the pair-space eigenvectors into the composite
                    // spatial index
                    // rows 0..n sit at k; a full pair block continues at k⊖Q
                    let embed = |row: usize| -> usize {
                        if row < n {
                            k * n + row
                        } else {
                            kq * n + (row - n)
                        }
                    };
                    for (j, &f) in eig.values.iter().enumerate() {
                        let col = eig.vectors.column(j);
                        for r1 in 0..block.dim {
                            for r2 in 0..block.dim {
                                op_sp[(embed(r1), embed(r2))] +=
                                    col[r1] * col[r2].conj() * Complex64::new(f, 0.0);
                            }
                        }
                    }
                }
                let mut op = fock.one_body(&op_sp);
                let t = trace_mean(&op);
                for i in 0..fock.dim {
                    op[(i, i)] -= Complex64::new(t, 0.0);
                }
                matrix += &op * &op * Complex64::new(0.5, 0.0);
                dropped += 0.25 * s * s;
            }
        }
    }

    Ok(DenseOperator {
        matrix,
        provenance: "df",
        encoded_shift: dropped,
    })
}

/// Tensor-hypercontraction assembly: bare one-body term plus the product of
/// factor-basis pair operators. The ladder-operator construction encodes the
/// operator as-is, so no identity weight is dropped.
pub fn assemble_thc(ham: &KHamiltonian, fac: &ThcFactors) -> Result<DenseOperator> {
    use crate::factorize::thc::pair_flag;
    let fock = FockSpace::new(ham)?;
    let nk = ham.mesh.num_kpoints();
    let n = ham.n_spatial;
    let n_sp = nk * n;
    let m = fac.m_rank;
    let mut matrix = fock.one_body(&bare_one_body_matrix(ham));

    for q in 0..nk {
        let qv = fac.mesh.from_flat(q);
        // pair operators P(G, μ) = Σ_{k | flag = G} χ*_{pk,μ} χ_{q(k⊖Q),μ} a†a
        let mut pair_ops: Vec<Option<DMatrix<Complex64>>> = vec![None; 8 * m];
        for g in 0..8 {
            for mu in 0..m {
                let mut op_sp = DMatrix::zeros(n_sp, n_sp);
                let mut any = false;
                for k in 0..nk {
                    let kv = fac.mesh.from_flat(k);
                    if pair_flag(&fac.mesh, kv, qv) != g {
                        continue;
                    }
                    any = true;
                    let kq = fac.mesh.flat_index(modsub(&fac.mesh, kv, qv).expect("valid"));
                    for p in 0..n {
                        for qq in 0..n {
                            op_sp[(k * n + p, kq * n + qq)] +=
                                fac.chi[[k, p, mu]].conj() * fac.chi[[kq, qq, mu]];
                        }
                    }
                }
                if any {
                    pair_ops[g * m + mu] = Some(fock.one_body(&op_sp));
                }
            }
        }

        for g1 in 0..8 {
            for mu in 0..m {
                let Some(left) = pair_ops[g1 * m + mu].as_ref() else {
                    continue;
                };
                // accumulate the ζ-weighted right factor before one product
                let mut right = DMatrix::zeros(fock.dim, fock.dim);
                let mut any = false;
                for g2 in 0..8 {
                    for nu in 0..m {
                        let z = fac.zeta[[q, g1, g2, mu, nu]];
                        if z.norm_sqr() == 0.0 {
                            continue;
                        }
                        if let Some(op) = pair_ops[g2 * m + nu].as_ref() {
                            right += op.adjoint() * z;
                            any = true;
                        }
                    }
                }
                if any {
                    matrix += left * right * Complex64::new(0.5, 0.0);
                }
            }
        }
    }

    Ok(DenseOperator {
        matrix,
        provenance: "thc",
        encoded_shift: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorize::{cholesky_sf, double_factorize, synthesize_thc};
    use crate::hamiltonian::generate_synthetic;
    use crate::kmesh::Mesh;

    fn shift_dev(a: &DenseOperator, b: &DenseOperator) -> f64 {
        identity_shift_deviation(&a.matrix, &b.matrix).1
    }

    #[test]
    fn one_body_only_spectrum_is_orbital_sums() {
        // V = 0: the many-body spectrum is all occupation sums of orbital
        // eigenvalues
        let mesh = Mesh::new(1, 1, 1).unwrap();
        let mut ham = generate_synthetic(mesh, 2, 5, 0.0);
        ham.v.fill(Complex64::new(0.0, 0.0));
        let op = assemble_direct(&ham).unwrap();
        let spectrum = op.spectrum();

        let block = DMatrix::from_fn(2, 2, |p, q| ham.h[[0, p, q]]);
        let orb = hermitian_eigenvalues(&block);
        let mut expect = Vec::new();
        for occ in 0..16usize {
            // modes (p, spin): energy adds the orbital eigenvalue once per spin
            let mut e = 0.0;
            for p in 0..2 {
                for spin in 0..2 {
                    if occ & (1 << (2 * p + spin)) != 0 {
                        e += orb[p];
                    }
                }
            }
            expect.push(e);
        }
        expect.sort_by(f64::total_cmp);
        for (a, b) in spectrum.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn sparse_assembly_is_identity_shift_from_direct() {
        for (mesh, n) in [
            (Mesh::new(1, 1, 1).unwrap(), 2),
            (Mesh::new(1, 1, 2).unwrap(), 2),
            (Mesh::new(1, 1, 4).unwrap(), 1),
        ] {
            let ham = generate_synthetic(mesh, n, 8, 0.2);
            let direct = assemble_direct(&ham).unwrap();
            let sparse = assemble_sparse(&ham).unwrap();
            let dev = shift_dev(&direct, &sparse);
            assert!(dev < 1e-9, "mesh {mesh}: deviation {dev:.3e}");
        }
    }

    #[test]
    fn sf_assembly_matches_direct_up_to_shift() {
        let mesh = Mesh::new(1, 1, 2).unwrap();
        let ham = generate_synthetic(mesh, 2, 9, 0.2);
        let direct = assemble_direct(&ham).unwrap();
        let fac = cholesky_sf(&ham, 1e-13).unwrap();
        let sf = assemble_sf(&ham, &fac).unwrap();
        let dev = shift_dev(&direct, &sf);
        assert!(dev < 1e-9, "deviation {dev:.3e}");
    }

    #[test]
    fn df_assembly_at_zero_cutoff_matches_sf() {
        let mesh = Mesh::new(1, 1, 2).unwrap();
        let ham = generate_synthetic(mesh, 1, 10, 0.1);
        let fac = cholesky_sf(&ham, 1e-13).unwrap();
        let df = double_factorize(&fac, 0.0, false).unwrap();
        let a = assemble_sf(&ham, &fac).unwrap();
        let b = assemble_df(&ham, &df).unwrap();
        let dev = (&a.matrix - &b.matrix)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-9, "deviation {dev:.3e}");
    }

    #[test]
    fn thc_assembly_matches_direct_exactly() {
        let mesh = Mesh::new(1, 1, 2).unwrap();
        let fac = synthesize_thc(mesh, 2, 3, 12);
        let ham = fac.into_hamiltonian(12, 0.0);
        let direct = assemble_direct(&ham).unwrap();
        let thc = assemble_thc(&ham, &fac).unwrap();
        let dev = (&direct.matrix - &thc.matrix)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-9, "deviation {dev:.3e}");
    }

    #[test]
    fn lambda_bound_detects_artificial_violation() {
        let mesh = Mesh::new(1, 1, 1).unwrap();
        let ham = generate_synthetic(mesh, 2, 3, 0.0);
        let op = assemble_sparse(&ham).unwrap();
        let lam = crate::lambda::lambda_sparse(&ham).lambda_total;
        let rep = check_lambda_bound(&op, lam);
        assert!(rep.pass, "margin {:.3e}", rep.margin);
        let halved = check_lambda_bound(&op, 0.5 * op.encoded_norm());
        assert!(!halved.pass);
        assert!(halved.margin < 0.0);

        // zero Hamiltonian, lambda = 0 edge
        let zero = KHamiltonian::zero(mesh, 1);
        let op = assemble_sparse(&zero).unwrap();
        assert!(check_lambda_bound(&op, 0.0).pass);
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let mesh = Mesh::new(2, 2, 2).unwrap();
        let ham = KHamiltonian::zero(mesh, 1); // 16 spin-orbitals
        assert!(matches!(
            assemble_direct(&ham),
            Err(Error::DimensionCap { .. })
        ));
    }

    use crate::hamiltonian::KHamiltonian;
}
