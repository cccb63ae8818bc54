//! Hermitian eigendecomposition by cyclic Jacobi sweeps.
//!
//! At the 2x2 / 4x4 sizes used in this crate a complex Jacobi iteration is
//! accurate to near machine precision, fully deterministic, and needs no
//! external linear-algebra backend. Each rotation zeroes one off-diagonal
//! pair with a unitary 2x2 rotation; sweeps repeat until the largest
//! off-diagonal magnitude falls below threshold.

use num_complex::Complex64;

use super::ComplexSquareMatrix;

const MAX_SWEEPS: usize = 64;

/// Diagonalize a Hermitian matrix. Returns eigenvalues in ascending order
/// and the matching eigenvectors as columns.
///
/// The caller is responsible for checking Hermiticity; this routine reads
/// only the upper triangle phase conventions of the working copy it
/// symmetrizes internally.
pub(super) fn jacobi_hermitian(m: &ComplexSquareMatrix) -> (Vec<f64>, ComplexSquareMatrix) {
    let n = m.dim();
    // Work on the exactly Hermitian average so roundoff in the input cannot
    // leak imaginary parts onto the diagonal.
    let mut a = m.hermitian_part();
    let mut v = ComplexSquareMatrix::identity(n);

    let scale = 1.0 + a.max_abs();
    let tol = 1e-15 * scale;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a.at(p, q).norm());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.at(p, q);
                let b = apq.norm();
                if b <= tol * 1e-2 {
                    continue;
                }
                let alpha = a.at(p, p).re;
                let gamma = a.at(q, q).re;
                let phase = apq / b;

                // tan(2*theta) = 2b / (alpha - gamma); pick the smaller angle.
                let zeta = (alpha - gamma) / (2.0 * b);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (zeta * zeta + 1.0).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                apply_rotation(&mut a, &mut v, p, q, c, s, phase);
            }
        }
    }

    // Collect eigenvalues and sort ascending with a stable index order so
    // degenerate clusters keep a deterministic column arrangement.
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.at(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = ComplexSquareMatrix::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors.set(row, new_col, v.at(row, old_col));
        }
    }
    (eigenvalues, vectors)
}

/// A <- J† A J and V <- V J for the complex Jacobi rotation J acting on the
/// (p, q) plane: J[p][p] = c, J[p][q] = -s*phase, J[q][p] = s*conj(phase),
/// J[q][q] = c.
fn apply_rotation(
    a: &mut ComplexSquareMatrix,
    v: &mut ComplexSquareMatrix,
    p: usize,
    q: usize,
    c: f64,
    s: f64,
    phase: Complex64,
) {
    let n = a.dim();
    let phc = phase.conj();

    // Column update: B = A J.
    for k in 0..n {
        let akp = a.at(k, p);
        let akq = a.at(k, q);
        a.set(k, p, akp * c + akq * (s * phc));
        a.set(k, q, akq * c - akp * (s * phase));
    }
    // Row update: A' = J† B.
    for k in 0..n {
        let apk = a.at(p, k);
        let aqk = a.at(q, k);
        a.set(p, k, apk * c + aqk * (s * phase));
        a.set(q, k, aqk * c - apk * (s * phc));
    }
    // Clean the rotated pair: the (p, q) element is zero by construction and
    // the diagonal is real for Hermitian input.
    let app = a.at(p, p);
    let aqq = a.at(q, q);
    a.set(p, p, Complex64::new(app.re, 0.0));
    a.set(q, q, Complex64::new(aqq.re, 0.0));
    a.set(p, q, Complex64::new(0.0, 0.0));
    a.set(q, p, Complex64::new(0.0, 0.0));

    for k in 0..n {
        let vkp = v.at(k, p);
        let vkq = v.at(k, q);
        v.set(k, p, vkp * c + vkq * (s * phc));
        v.set(k, q, vkq * c - vkp * (s * phase));
    }
}
