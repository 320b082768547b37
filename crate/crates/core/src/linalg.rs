//! Dense symmetric eigenvalues by cyclic Jacobi rotations.

use crate::error::{contract, Error, Result};

/// Sweep cap.
pub const MAX_SWEEPS: usize = 100;
/// Convergence threshold on the off-diagonal Frobenius norm, relative to the
/// Frobenius norm of the input (absolute below norm 1).
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;

/// Eigenvalues of the symmetric `n × n` row-major matrix `a`, ascending.
/// The matrix is overwritten.
pub fn symmetric_eigenvalues(a: &mut [f64], n: usize) -> Result<Vec<f64>> {
    if a.len() != n * n {
        return Err(contract!("expected {} entries, got {}", n * n, a.len()));
    }
    for p in 0..n {
        for q in p + 1..n {
            if a[p * n + q] != a[q * n + p] {
                return Err(contract!("matrix is not symmetric at ({p},{q})"));
            }
        }
    }
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    let off_norm = |a: &[f64]| {
        let mut s = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                s += 2.0 * a[p * n + q] * a[p * n + q];
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_norm(a) <= OFF_DIAGONAL_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(a, n, p, q);
            }
        }
    }
    if !converged && off_norm(a) > OFF_DIAGONAL_TOL * scale {
        return Err(Error::Resource(format!(
            "Jacobi did not converge in {MAX_SWEEPS} sweeps"
        )));
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Annihilates `a[p][q]` with a plane rotation applied on both sides.
fn rotate(a: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    if apq == 0.0 {
        return;
    }
    let app = a[p * n + p];
    let aqq = a[q * n + q];
    let theta = (aqq - app) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let arp = a[r * n + p];
        let arq = a[r * n + q];
        let new_rp = c * arp - s * arq;
        let new_rq = s * arp + c * arq;
        a[r * n + p] = new_rp;
        a[p * n + r] = new_rp;
        a[r * n + q] = new_rq;
        a[q * n + r] = new_rq;
    }
    a[p * n + p] = app - t * apq;
    a[q * n + q] = aqq + t * apq;
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
}
