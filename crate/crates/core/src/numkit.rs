//! Dense complex linear algebra for small Hermitian problems.
//!
//! Everything downstream (Bloch Hamiltonians, ribbon slices, real-space
//! chains) produces Hermitian matrices of dimension a few hundred at most, so
//! a cyclic complex Jacobi eigensolver is used instead of an external LAPACK
//! backend: it is dependency-free, unconditionally stable, and its rotations
//! keep the accumulated eigenvector matrix unitary to machine precision.
//!
//! Tolerances live in one place, [`NumericPolicy`]; callers never pass single
//! ad-hoc epsilons.

use ndarray::{Array2, Axis};
use num_complex::Complex64;

use crate::{Error, Result};

/// Dense complex matrix, row-major, the only matrix type used by the crate.
pub type CMatrix = Array2<Complex64>;

/// Shorthand constructor used throughout the crate.
#[inline]
pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// ═══════════════════════════════════════════════════════════════════════
// Numeric policy
// ═══════════════════════════════════════════════════════════════════════

/// The single record of every tolerance the crate uses.
///
/// Scaled tolerances are noted per field; scale factors are always
/// `max(1, size_of_input)` so that tiny matrices are not held to absurd
/// absolute precision and large ones are not given a free pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericPolicy {
    /// Max allowed `|a_ij - conj(a_ji)|`, scaled by `max(1, max|a_ij|)`.
    pub hermiticity_tol: f64,
    /// Eigenpair residual `||A v - lambda v||`, scaled by `max(1, ||A||_F)`.
    pub eig_residual_tol: f64,
    /// Max entry of `|V^H V - I|`.
    pub orthonormality_tol: f64,
    /// Determinants of permutation and diagonal matrices must be exact to this.
    pub det_exact_tol: f64,
    /// Decoherence moduli may exceed 1 by at most this much.
    pub modulus_slack: f64,
    /// `|L(0) - 1|` must stay below this.
    pub time_zero_tol: f64,
    /// Two-band gaps below this floor route to the exact (projector) path
    /// instead of the closed form.
    pub gap_floor: f64,
    /// Half-width of the "effectively zero energy" window used when filling
    /// the Fermi sea.
    pub zero_mode_tol: f64,
    /// Max distance of the plaquette-field sum from an integer multiple of
    /// 2*pi, in units of 2*pi.
    pub chern_residue_tol: f64,
    /// Quantized Berry phases are snapped to {0, pi} when within this window.
    pub zak_snap_window: f64,
    /// Cusp detector: flag second differences above this multiple of their
    /// median.
    pub cusp_chi: f64,
    /// Direct gaps below this are reported as degenerate nodes.
    pub node_gap_tol: f64,
}

impl NumericPolicy {
    pub const DEFAULT: NumericPolicy = NumericPolicy {
        hermiticity_tol: 1e-12,
        eig_residual_tol: 1e-10,
        orthonormality_tol: 1e-10,
        det_exact_tol: 1e-12,
        modulus_slack: 1e-9,
        time_zero_tol: 1e-12,
        gap_floor: 1e-8,
        zero_mode_tol: 1e-10,
        chern_residue_tol: 0.01,
        zak_snap_window: 0.1,
        cusp_chi: 10.0,
        node_gap_tol: 1e-6,
    };
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self::DEFAULT
    }
}

// ═══════════════════════════════════════════════════════════════════════
// Input certification
// ═══════════════════════════════════════════════════════════════════════

/// Largest entrywise deviation from Hermiticity, `max |a_ij - conj(a_ji)|`.
pub fn hermiticity_violation(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (a[[i, j]] - a[[j, i]].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

fn check_square(a: &CMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows())
}

fn check_finite(a: &CMatrix) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Certify a matrix as Hermitian within the policy tolerance.
pub fn check_hermitian(a: &CMatrix, policy: &NumericPolicy) -> Result<()> {
    check_square(a)?;
    check_finite(a)?;
    let scale = a.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(1.0);
    let tol = policy.hermiticity_tol * scale;
    let violation = hermiticity_violation(a);
    if violation > tol {
        return Err(Error::NotHermitian { violation, tol });
    }
    Ok(())
}

// ═══════════════════════════════════════════════════════════════════════
// Hermitian eigendecomposition (cyclic complex Jacobi)
// ═══════════════════════════════════════════════════════════════════════

/// Eigendecomposition of a Hermitian matrix.
///
/// `values` ascend; `vectors` holds the matching eigenvectors as columns, so
/// `A = V diag(values) V^H`. Degenerate eigenvalues keep the adjacency the
/// sort produced; nothing downstream may depend on the basis chosen inside a
/// degenerate subspace, only on its projector.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenSystem {
    /// Matrix whose columns are the eigenvectors selected by `indices`.
    pub fn columns(&self, indices: &[usize]) -> CMatrix {
        self.vectors.select(Axis(1), indices)
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// The input must be Hermitian within `policy.hermiticity_tol` (scaled); it
/// is then symmetrized exactly before iteration, so the returned `values` are
/// real by construction. Quadratic convergence makes ~10 sweeps typical; the
/// sweep cap only guards against non-finite arithmetic slipping through.
pub fn eig_hermitian(a: &CMatrix, policy: &NumericPolicy) -> Result<EigenSystem> {
    check_hermitian(a, policy)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(EigenSystem {
            values: Vec::new(),
            vectors: CMatrix::zeros((0, 0)),
        });
    }

    // Work on an exactly Hermitian copy: average the off-diagonal pairs,
    // drop imaginary parts of the diagonal.
    let mut m = a.clone();
    for i in 0..n {
        m[[i, i]] = cx(m[[i, i]].re, 0.0);
        for j in (i + 1)..n {
            let avg = 0.5 * (m[[i, j]] + m[[j, i]].conj());
            m[[i, j]] = avg;
            m[[j, i]] = avg.conj();
        }
    }

    let fro = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let stop = 1e-15 * fro.max(1.0);
    let skip = stop / n as f64;
    let mut v = CMatrix::eye(n);

    const MAX_SWEEPS: usize = 64;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_norm(&m) <= stop {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = m[[p, q]];
                let babs = b.norm();
                if babs <= skip {
                    continue;
                }
                rotate(&mut m, &mut v, p, q, b, babs);
            }
        }
    }
    if !converged && off_norm(&m) > stop {
        return Err(Error::NoConvergence {
            sweeps: MAX_SWEEPS,
            off: off_norm(&m),
        });
    }

    // Ascending sort, stable under ties so degenerate pairs stay adjacent in
    // the order the sweep produced them.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[[i, i]]
            .re
            .partial_cmp(&m[[j, j]].re)
            .expect("eigenvalues are finite")
            .then(i.cmp(&j))
    });
    let values: Vec<f64> = order.iter().map(|&i| m[[i, i]].re).collect();
    let vectors = v.select(Axis(1), &order);

    Ok(EigenSystem { values, vectors })
}

/// Frobenius norm of the off-diagonal part.
fn off_norm(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[[i, j]].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One two-sided Jacobi rotation annihilating `m[p][q]`.
///
/// With `b = m[p][q] = |b| w`, the unitary has `R_pp = R_qq = c`,
/// `R_pq = s w`, `R_qp = -s conj(w)`; the angle solves
/// `cot(2 theta) = (m_qq - m_pp) / (2 |b|)` picking the smaller root, which
/// bounds `|t| <= 1` and keeps the process monotone.
fn rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize, b: Complex64, babs: f64) {
    let n = m.nrows();
    let app = m[[p, p]].re;
    let aqq = m[[q, q]].re;
    let tau = (aqq - app) / (2.0 * babs);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (tau - (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let w = b / babs;
    let sw = s * w;
    let swc = s * w.conj();

    for i in 0..n {
        if i == p || i == q {
            continue;
        }
        let aip = m[[i, p]];
        let aiq = m[[i, q]];
        let nip = c * aip - swc * aiq;
        let niq = sw * aip + c * aiq;
        m[[i, p]] = nip;
        m[[p, i]] = nip.conj();
        m[[i, q]] = niq;
        m[[q, i]] = niq.conj();
    }
    m[[p, p]] = cx(app - t * babs, 0.0);
    m[[q, q]] = cx(aqq + t * babs, 0.0);
    m[[p, q]] = cx(0.0, 0.0);
    m[[q, p]] = cx(0.0, 0.0);

    for i in 0..n {
        let vip = v[[i, p]];
        let viq = v[[i, q]];
        v[[i, p]] = c * vip - swc * viq;
        v[[i, q]] = sw * vip + c * viq;
    }
}

// ═══════════════════════════════════════════════════════════════════════
// Unitary evolution and determinants
// ═══════════════════════════════════════════════════════════════════════

/// `exp(-i A t)` for Hermitian `A`, via the eigendecomposition.
///
/// The result depends only on spectral projectors, so it is well defined even
/// when `A` has degeneracies, and satisfies the group property
/// `U(t1) U(t2) = U(t1 + t2)` to roundoff.
pub fn evolve_unitary(a: &CMatrix, t: f64, policy: &NumericPolicy) -> Result<CMatrix> {
    let es = eig_hermitian(a, policy)?;
    Ok(evolve_from_eigen(&es, t))
}

/// `exp(-i A t)` from a precomputed eigendecomposition of `A`.
///
/// Cheaper when many times are needed for one matrix.
pub fn evolve_from_eigen(es: &EigenSystem, t: f64) -> CMatrix {
    let n = es.values.len();
    let mut scaled = es.vectors.clone();
    for (j, &lambda) in es.values.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -lambda * t);
        for i in 0..n {
            scaled[[i, j]] *= phase;
        }
    }
    let vh = es.vectors.t().mapv(|z| z.conj());
    scaled.dot(&vh)
}

/// Determinant by LU factorization with partial (modulus) pivoting.
///
/// Singular input returns exactly zero. Permutation and diagonal matrices
/// come out exact because no elimination arithmetic happens on their entries.
pub fn det_complex(a: &CMatrix) -> Result<Complex64> {
    let n = check_square(a)?;
    check_finite(a)?;
    if n == 0 {
        return Ok(cx(1.0, 0.0));
    }
    let mut m = a.clone();
    let mut det = cx(1.0, 0.0);
    let mut sign = 1.0;
    for col in 0..n {
        let mut piv = col;
        let mut best = m[[col, col]].norm();
        for r in (col + 1)..n {
            let v = m[[r, col]].norm();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return Ok(cx(0.0, 0.0));
        }
        if piv != col {
            for c2 in 0..n {
                let tmp = m[[col, c2]];
                m[[col, c2]] = m[[piv, c2]];
                m[[piv, c2]] = tmp;
            }
            sign = -sign;
        }
        let pval = m[[col, col]];
        det *= pval;
        for r in (col + 1)..n {
            let f = m[[r, col]] / pval;
            if f.norm_sqr() == 0.0 {
                continue;
            }
            for c2 in (col + 1)..n {
                let sub = f * m[[col, c2]];
                m[[r, c2]] -= sub;
            }
        }
    }
    Ok(det * sign)
}

/// `A^H B` for rectangular complex matrices; used for overlap blocks.
pub fn adjoint_times(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.t().mapv(|z| z.conj()).dot(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const POLICY: NumericPolicy = NumericPolicy::DEFAULT;

    // ── oracles ────────────────────────────────────────────────────────
    // Written before the implementations they certify; fully independent
    // code paths (series expansion, permutation sum).

    /// `exp(-i A t)` by scaled-and-squared 20-term Taylor series.
    fn expm_taylor(a: &CMatrix, t: f64) -> CMatrix {
        let n = a.nrows();
        let amax = a.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        let bound = amax * n as f64 * t.abs();
        let squarings = if bound > 0.5 {
            (bound / 0.5).log2().ceil() as u32
        } else {
            0
        };
        let scale = cx(0.0, -t / f64::powi(2.0, squarings as i32));
        let b = a.mapv(|z| z * scale);
        let mut term = CMatrix::eye(n);
        let mut sum = CMatrix::eye(n);
        for j in 1..=20 {
            term = term.dot(&b).mapv(|z| z / j as f64);
            sum = &sum + &term;
        }
        for _ in 0..squarings {
            sum = sum.dot(&sum);
        }
        sum
    }

    /// Determinant as the sum over all permutations (Heap's algorithm).
    fn det_leibniz(a: &CMatrix) -> Complex64 {
        fn heap(
            k: usize,
            perm: &mut Vec<usize>,
            sign: &mut f64,
            a: &CMatrix,
            acc: &mut Complex64,
        ) {
            if k <= 1 {
                let mut term = cx(*sign, 0.0);
                for (row, &col) in perm.iter().enumerate() {
                    term *= a[[row, col]];
                }
                *acc += term;
                return;
            }
            // canonical form: k-1 swaps between recursions, none after the
            // last, so the caller's state invariant holds
            for i in 0..(k - 1) {
                heap(k - 1, perm, sign, a, acc);
                if k % 2 == 0 {
                    perm.swap(i, k - 1);
                } else {
                    perm.swap(0, k - 1);
                }
                *sign = -*sign;
            }
            heap(k - 1, perm, sign, a, acc);
        }
        let n = a.nrows();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut acc = cx(0.0, 0.0);
        heap(n, &mut perm, &mut sign, a, &mut acc);
        acc
    }

    fn random_hermitian(n: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = CMatrix::zeros((n, n));
        for i in 0..n {
            a[[i, i]] = cx(rng.random::<f64>() * 4.0 - 2.0, 0.0);
            for j in (i + 1)..n {
                let z = cx(
                    rng.random::<f64>() * 2.0 - 1.0,
                    rng.random::<f64>() * 2.0 - 1.0,
                );
                a[[i, j]] = z;
                a[[j, i]] = z.conj();
            }
        }
        a
    }

    fn random_complex(n: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMatrix::from_shape_fn((n, n), |_| {
            cx(
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
            )
        })
    }

    fn max_abs(a: &CMatrix) -> f64 {
        a.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    // ── eigensolver ────────────────────────────────────────────────────

    #[test]
    fn pauli_x_eigensystem_is_analytic() {
        let mut a = CMatrix::zeros((2, 2));
        a[[0, 1]] = cx(1.0, 0.0);
        a[[1, 0]] = cx(1.0, 0.0);
        let es = eig_hermitian(&a, &POLICY).unwrap();
        assert!((es.values[0] + 1.0).abs() < 1e-14, "E- = {}", es.values[0]);
        assert!((es.values[1] - 1.0).abs() < 1e-14, "E+ = {}", es.values[1]);
        // eigenvectors (1, -1)/sqrt(2) and (1, 1)/sqrt(2) up to phase
        for (col, sgn) in [(0, -1.0), (1, 1.0)] {
            let v0 = es.vectors[[0, col]];
            let v1 = es.vectors[[1, col]];
            assert!((v0.norm() - 1.0 / f64::sqrt(2.0)).abs() < 1e-12);
            assert!((v1 - sgn * v0).norm() < 1e-12, "component ratio off");
        }
    }

    #[test]
    fn reconstruction_and_residuals_on_random_matrices() {
        for (n, seed) in [(2, 1u64), (5, 2), (8, 3), (13, 4), (40, 5)] {
            let a = random_hermitian(n, seed);
            let es = eig_hermitian(&a, &POLICY).unwrap();
            let fro = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let scale = fro.max(1.0);

            // ascending order
            for w in es.values.windows(2) {
                assert!(w[0] <= w[1], "eigenvalues not ascending: {:?}", es.values);
            }
            // residual per pair
            for (j, &lambda) in es.values.iter().enumerate() {
                let vj = es.vectors.column(j).to_owned();
                let av = a.dot(&vj);
                let resid: f64 = av
                    .iter()
                    .zip(vj.iter())
                    .map(|(x, y)| (x - y * lambda).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(
                    resid <= POLICY.eig_residual_tol * scale,
                    "n={n} seed={seed} j={j}: residual {resid:.3e}"
                );
            }
            // orthonormality
            let gram = adjoint_times(&es.vectors, &es.vectors);
            for i in 0..n {
                for j in 0..n {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    let d = (gram[[i, j]] - cx(expect, 0.0)).norm();
                    assert!(
                        d <= POLICY.orthonormality_tol,
                        "gram deviation {d:.3e} at ({i},{j})"
                    );
                }
            }
            // reconstruction
            let mut rec = CMatrix::zeros((n, n));
            for (j, &lambda) in es.values.iter().enumerate() {
                for r in 0..n {
                    for c2 in 0..n {
                        rec[[r, c2]] +=
                            es.vectors[[r, j]] * es.vectors[[c2, j]].conj() * lambda;
                    }
                }
            }
            let err = max_abs(&(&rec - &a));
            assert!(err <= 1e-10 * scale, "reconstruction error {err:.3e}");
        }
    }

    #[test]
    fn non_hermitian_input_is_rejected_with_violation() {
        let mut a = random_hermitian(4, 9);
        a[[1, 2]] += cx(1e-6, 0.0);
        let err = eig_hermitian(&a, &POLICY).unwrap_err();
        match err {
            Error::NotHermitian { violation, .. } => {
                assert!((violation - 1e-6).abs() < 1e-9, "violation = {violation:e}");
            }
            other => panic!("expected NotHermitian, got {other:?}"),
        }
        let msg = format!("{}", eig_hermitian(&a, &POLICY).unwrap_err());
        assert!(msg.contains("1.000e-6"), "diagnostic lacks magnitude: {msg}");
    }

    #[test]
    fn non_square_and_non_finite_are_rejected() {
        let rect = CMatrix::zeros((2, 3));
        assert!(matches!(
            eig_hermitian(&rect, &POLICY),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
        let mut bad = CMatrix::zeros((2, 2));
        bad[[0, 0]] = cx(f64::NAN, 0.0);
        assert!(matches!(eig_hermitian(&bad, &POLICY), Err(Error::NonFinite)));
        assert!(matches!(det_complex(&bad), Err(Error::NonFinite)));
    }

    #[test]
    fn degenerate_spectrum_projector_is_basis_independent() {
        // A has an exactly doubly degenerate ground pair; the projector on
        // that subspace must match the analytic one even though the basis
        // inside it is arbitrary.
        let mut a = CMatrix::zeros((3, 3));
        a[[0, 0]] = cx(-1.0, 0.0);
        a[[1, 1]] = cx(-1.0, 0.0);
        a[[2, 2]] = cx(2.0, 0.0);
        // rotate by a fixed unitary so the degeneracy is not diagonal
        let u = {
            let h = random_hermitian(3, 77);
            evolve_unitary(&h, 1.0, &POLICY).unwrap()
        };
        let rotated = u.dot(&a).dot(&u.t().mapv(|z| z.conj()));
        let es = eig_hermitian(&rotated, &POLICY).unwrap();
        assert!((es.values[0] + 1.0).abs() < 1e-12);
        assert!((es.values[1] + 1.0).abs() < 1e-12);
        let phi = es.columns(&[0, 1]);
        let proj = phi.dot(&phi.t().mapv(|z| z.conj())); // 3x3 projector
        // analytic projector: I - |u e3><u e3|
        let e3 = u.column(2).to_owned();
        let mut expect = CMatrix::eye(3);
        for r in 0..3 {
            for c2 in 0..3 {
                expect[[r, c2]] -= e3[r] * e3[c2].conj();
            }
        }
        let err = max_abs(&(&proj - &expect));
        assert!(err < 1e-10, "projector deviates by {err:.3e}");
    }

    // ── evolution ──────────────────────────────────────────────────────

    #[test]
    fn evolution_matches_taylor_series_oracle() {
        let a = random_hermitian(6, 11);
        let u = evolve_unitary(&a, 0.7, &POLICY).unwrap();
        let oracle = expm_taylor(&a, 0.7);
        let err = max_abs(&(&u - &oracle));
        assert!(err <= 1e-9, "evolution vs series oracle: {err:.3e}");
    }

    #[test]
    fn evolution_at_zero_time_is_identity() {
        let a = random_hermitian(5, 12);
        let u = evolve_unitary(&a, 0.0, &POLICY).unwrap();
        let err = max_abs(&(&u - &CMatrix::eye(5)));
        assert!(err <= 1e-12, "U(0) deviates from identity by {err:.3e}");
    }

    #[test]
    fn evolution_is_unitary_and_has_unimodular_determinant() {
        let a = random_hermitian(7, 13);
        let u = evolve_unitary(&a, 3.9, &POLICY).unwrap();
        let gram = adjoint_times(&u, &u);
        let err = max_abs(&(&gram - &CMatrix::eye(7)));
        assert!(err <= POLICY.orthonormality_tol, "U^H U - I = {err:.3e}");
        let d = det_complex(&u).unwrap();
        assert!(
            (d.norm() - 1.0).abs() <= POLICY.modulus_slack,
            "|det U| = {}",
            d.norm()
        );
    }

    #[test]
    fn evolution_group_property_holds() {
        let a = random_hermitian(6, 14);
        for (t1, t2) in [(0.3, 0.4), (1.7, -2.5), (5.0, 5.0)] {
            let u1 = evolve_unitary(&a, t1, &POLICY).unwrap();
            let u2 = evolve_unitary(&a, t2, &POLICY).unwrap();
            let u12 = evolve_unitary(&a, t1 + t2, &POLICY).unwrap();
            let err = max_abs(&(&u1.dot(&u2) - &u12));
            assert!(err <= 1e-9, "group property at ({t1},{t2}): {err:.3e}");
        }
    }

    // ── determinant ────────────────────────────────────────────────────

    #[test]
    fn determinant_of_permutation_and_diagonal_is_exact() {
        // odd permutation of 4 elements: cycle (0 1 2 3), sign -1
        let mut p = CMatrix::zeros((4, 4));
        p[[0, 1]] = cx(1.0, 0.0);
        p[[1, 2]] = cx(1.0, 0.0);
        p[[2, 3]] = cx(1.0, 0.0);
        p[[3, 0]] = cx(1.0, 0.0);
        let d = det_complex(&p).unwrap();
        assert!(
            (d - cx(-1.0, 0.0)).norm() <= POLICY.det_exact_tol,
            "permutation det = {d}"
        );

        let mut diag = CMatrix::zeros((3, 3));
        diag[[0, 0]] = cx(2.0, 1.0);
        diag[[1, 1]] = cx(0.0, -3.0);
        diag[[2, 2]] = cx(-1.5, 0.5);
        let expect = cx(2.0, 1.0) * cx(0.0, -3.0) * cx(-1.5, 0.5);
        let d = det_complex(&diag).unwrap();
        assert!(
            (d - expect).norm() <= POLICY.det_exact_tol * expect.norm(),
            "diagonal det = {d}, expect {expect}"
        );
    }

    #[test]
    fn determinant_matches_leibniz_oracle() {
        for seed in [21u64, 22, 23] {
            let a = random_complex(4, seed);
            let lu = det_complex(&a).unwrap();
            let leibniz = det_leibniz(&a);
            assert!(
                (lu - leibniz).norm() <= 1e-12,
                "seed {seed}: LU {lu} vs Leibniz {leibniz}"
            );
        }
    }

    #[test]
    fn determinant_of_singular_matrix_is_zero() {
        let mut a = random_complex(4, 31);
        let row0: Vec<Complex64> = (0..4).map(|j| a[[0, j]]).collect();
        for j in 0..4 {
            a[[3, j]] = row0[j] * cx(2.0, -1.0);
        }
        let d = det_complex(&a).unwrap();
        assert!(d.norm() <= 1e-12, "singular det = {d}");
    }

    #[test]
    fn empty_matrix_has_unit_determinant() {
        let a = CMatrix::zeros((0, 0));
        assert_eq!(det_complex(&a).unwrap(), cx(1.0, 0.0));
    }

    // ── property tests ─────────────────────────────────────────────────

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn prop_eig_reconstructs_random_hermitian(
            n in 1usize..7,
            seed in 0u64..1000,
        ) {
            let a = random_hermitian(n, seed.wrapping_mul(2654435761).wrapping_add(n as u64));
            let es = eig_hermitian(&a, &POLICY).unwrap();
            let mut rec = CMatrix::zeros((n, n));
            for (j, &lambda) in es.values.iter().enumerate() {
                for r in 0..n {
                    for c2 in 0..n {
                        rec[[r, c2]] += es.vectors[[r, j]] * es.vectors[[c2, j]].conj() * lambda;
                    }
                }
            }
            let fro = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(max_abs(&(&rec - &a)) <= 1e-10 * fro.max(1.0));
        }

        #[test]
        fn prop_det_is_multiplicative(seed in 0u64..500) {
            let a = random_complex(3, seed.wrapping_add(7000));
            let b = random_complex(3, seed.wrapping_add(9000));
            let ab = a.dot(&b);
            let lhs = det_complex(&ab).unwrap();
            let rhs = det_complex(&a).unwrap() * det_complex(&b).unwrap();
            let scale = lhs.norm().max(rhs.norm()).max(1.0);
            prop_assert!((lhs - rhs).norm() <= 1e-11 * scale);
        }

        #[test]
        fn prop_group_property(seed in 0u64..300, t1 in -3.0f64..3.0, t2 in -3.0f64..3.0) {
            let a = random_hermitian(4, seed.wrapping_add(40_000));
            let u1 = evolve_unitary(&a, t1, &POLICY).unwrap();
            let u2 = evolve_unitary(&a, t2, &POLICY).unwrap();
            let u12 = evolve_unitary(&a, t1 + t2, &POLICY).unwrap();
            prop_assert!(max_abs(&(&u1.dot(&u2) - &u12)) <= 1e-9);
        }
    }
}
