//! Hermitian eigensolver.
//!
//! Householder reduction of the Hermitian input to a real symmetric
//! tridiagonal matrix (after a diagonal phase change), implicit-shift QL on
//! the tridiagonal form, then back-transformation. Everything runs in a
//! fixed order so identical input gives bit-identical output.

use num_complex::Complex64 as C64;

use super::matrix::{adjoint, mat_add, ComplexMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` pairs with `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
    /// `max_k ‖A·v_k − λ_k·v_k‖₂`.
    pub residual_norm: f64,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EighConfig {
    /// Residual bound is `residual_tol · max(1, ‖A‖_max·dim)`.
    pub residual_tol: f64,
    /// Eigenvalues closer than `cluster_tol · max(1, ‖A‖_max)` are treated
    /// as one degenerate cluster when canonicalising eigenvectors.
    pub cluster_tol: f64,
    /// QL sweeps allowed per eigenvalue before giving up.
    pub max_iter: usize,
}

impl Default for EighConfig {
    fn default() -> Self {
        Self {
            residual_tol: 1e-10,
            cluster_tol: 1e-10,
            max_iter: 60,
        }
    }
}

pub fn eigh(a: &ComplexMatrix, tol: f64) -> Result<EigenDecomposition> {
    eigh_with(
        a,
        &EighConfig {
            residual_tol: tol,
            cluster_tol: tol,
            ..EighConfig::default()
        },
    )
}

pub fn eigh_with(a: &ComplexMatrix, cfg: &EighConfig) -> Result<EigenDecomposition> {
    a.check_finite()?;
    let n = a.dim();
    let herm = mat_add(a, &adjoint(a))?.scale_real(0.5);
    let scale = herm.max_norm().max(1.0);

    let (q, diag, off) = tridiagonalize(&herm);
    let (eigenvalues, zt) = tql2(diag, off, cfg.max_iter).map_err(|_| Error::NonConvergence {
        residual: f64::INFINITY,
        bound: cfg.residual_tol * (herm.max_norm() * n as f64).max(1.0),
    })?;

    // V = (Q·D)·Z, with zt holding the columns of Z as rows.
    let mut vectors = vec![vec![C64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        let q_row = q.row(i);
        for (j, z) in zt.iter().enumerate() {
            vectors[j][i] = q_row.iter().zip(z).map(|(&qv, &zv)| qv * zv).sum();
        }
    }

    canonicalize_clusters(&eigenvalues, &mut vectors, cfg.cluster_tol * scale);
    for v in vectors.iter_mut() {
        fix_phase(v);
    }

    let mut eigenvectors = ComplexMatrix::zeros(n);
    for (j, v) in vectors.iter().enumerate() {
        for (i, &x) in v.iter().enumerate() {
            eigenvectors[(i, j)] = x;
        }
    }

    let residual_norm = vectors
        .iter()
        .zip(&eigenvalues)
        .map(|(v, &lambda)| {
            herm.mat_vec(v)
                .iter()
                .zip(v)
                .map(|(av, x)| (av - x * lambda).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);

    let bound = cfg.residual_tol * (herm.max_norm() * n as f64).max(1.0);
    if !(residual_norm <= bound) {
        return Err(Error::NonConvergence {
            residual: residual_norm,
            bound,
        });
    }
    let eig_sum: f64 = eigenvalues.iter().sum();
    let trace_gap = (eig_sum - herm.trace().re).abs();
    if !(trace_gap <= cfg.residual_tol * n as f64 * scale) {
        return Err(Error::NonConvergence {
            residual: trace_gap,
            bound,
        });
    }

    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
        residual_norm,
    })
}

/// Eigenvalues only, same algorithm and ordering.
pub fn eigvalsh(a: &ComplexMatrix, tol: f64) -> Result<Vec<f64>> {
    Ok(eigh(a, tol)?.eigenvalues)
}

/// Returns `(Q·D, diag, offdiag)` with `A = (QD)·T·(QD)†`, `T` real
/// symmetric tridiagonal. `offdiag[i]` couples `i` and `i+1`; the last
/// entry is zero.
fn tridiagonalize(a: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>, Vec<f64>) {
    let n = a.dim();
    let mut w = a.clone();
    let mut q = ComplexMatrix::identity(n);
    let zero = C64::new(0.0, 0.0);

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let x: Vec<C64> = (k + 1..n).map(|i| w[(i, k)]).collect();
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let xnorm = (x[0].norm_sqr() + tail).sqrt();
        let phase = if x[0] == zero {
            C64::new(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let tau = 2.0 / v.iter().map(|z| z.norm_sqr()).sum::<f64>();

        // p = tau · S v over the trailing block.
        let p: Vec<C64> = (0..m)
            .map(|r| {
                let row = &w.row(k + 1 + r)[k + 1..];
                row.iter().zip(&v).map(|(&s, &vv)| s * vv).sum::<C64>() * tau
            })
            .collect();
        let vp: C64 = v.iter().zip(&p).map(|(a, b)| a.conj() * b).sum();
        let half = 0.5 * tau * vp.re;
        let wv: Vec<C64> = p.iter().zip(&v).map(|(&pp, &vv)| pp - vv * half).collect();

        for r in 0..m {
            for c in 0..m {
                let upd = v[r] * wv[c].conj() + wv[r] * v[c].conj();
                w[(k + 1 + r, k + 1 + c)] -= upd;
            }
        }
        w[(k + 1, k)] = alpha;
        w[(k, k + 1)] = alpha.conj();
        for r in 1..m {
            w[(k + 1 + r, k)] = zero;
            w[(k, k + 1 + r)] = zero;
        }

        // Q <- Q·H on columns k+1.. .
        for i in 0..n {
            let qv: C64 = (0..m).map(|r| q[(i, k + 1 + r)] * v[r]).sum::<C64>() * tau;
            for r in 0..m {
                q[(i, k + 1 + r)] -= qv * v[r].conj();
            }
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| w[(i, i)].re).collect();
    let mut off = vec![0.0; n];
    let mut phi = C64::new(1.0, 0.0);
    let mut phases = vec![phi; n];
    for i in 0..n.saturating_sub(1) {
        let e = w[(i + 1, i)];
        off[i] = e.norm();
        if off[i] > 0.0 {
            phi *= e / off[i];
        }
        phases[i + 1] = phi;
    }
    for i in 0..n {
        for (j, ph) in phases.iter().enumerate() {
            q[(i, j)] *= ph;
        }
    }
    (q, diag, off)
}

/// Implicit QL on a symmetric tridiagonal matrix. Returns ascending
/// eigenvalues and eigenvectors stored one per row.
fn tql2(
    mut d: Vec<f64>,
    mut e: Vec<f64>,
    max_iter: usize,
) -> std::result::Result<(Vec<f64>, Vec<Vec<f64>>), ()> {
    let n = d.len();
    let mut zt: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = vec![0.0; n];
            row[i] = 1.0;
            row
        })
        .collect();
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > max_iter {
                    return Err(());
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (lo, hi) = zt.split_at_mut(i + 1);
                    let (zi, zi1) = (&mut lo[i], &mut hi[0]);
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let hb = *b;
                        *b = s * *a + c * hb;
                        *a = c * *a - s * hb;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // Stable ascending sort; equal values keep the solver's order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = order.iter().map(|&i| zt[i].clone()).collect();
    Ok((values, vectors))
}

/// Replaces each numerically degenerate cluster of eigenvectors by the
/// basis obtained from pivoted Gram–Schmidt on the projected unit vectors
/// `P·e_j`: the next pivot is the basis index with the largest residual,
/// lowest index first on ties. The result depends only on the cluster's
/// subspace, not on the rotation the solver happened to produce.
fn canonicalize_clusters(values: &[f64], vectors: &mut [Vec<C64>], tol: f64) {
    let n = values.len();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] <= tol {
            end += 1;
        }
        if end - start > 1 {
            canonicalize_block(&mut vectors[start..end]);
        }
        start = end;
    }
}

fn canonicalize_block(block: &mut [Vec<C64>]) {
    let m = block.len();
    let n = block[0].len();
    // Coefficients of P·e_j in the cluster basis: conj(V[j, :]).
    let mut coeffs: Vec<Vec<C64>> = (0..n)
        .map(|j| block.iter().map(|v| v[j].conj()).collect())
        .collect();
    let mut chosen: Vec<Vec<C64>> = Vec::with_capacity(m);
    for _ in 0..m {
        let norms: Vec<f64> = coeffs
            .iter()
            .map(|g| g.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .collect();
        let best = norms.iter().cloned().fold(0.0, f64::max);
        let pivot = norms
            .iter()
            .position(|&x| x >= best * (1.0 - 1e-9))
            .expect("non-empty cluster");
        let len = norms[pivot].sqrt();
        let q: Vec<C64> = coeffs[pivot].iter().map(|z| z / len).collect();
        for g in coeffs.iter_mut() {
            let proj: C64 = q.iter().zip(g.iter()).map(|(a, b)| a.conj() * b).sum();
            for (gi, qi) in g.iter_mut().zip(&q) {
                *gi -= qi * proj;
            }
        }
        chosen.push(q);
    }
    let fresh: Vec<Vec<C64>> = chosen
        .iter()
        .map(|g| {
            (0..n)
                .map(|i| block.iter().zip(g).map(|(v, &gc)| v[i] * gc).sum())
                .collect()
        })
        .collect();
    for (slot, v) in block.iter_mut().zip(fresh) {
        *slot = v;
    }
}

/// Rotates `v` so its first largest-modulus component is real positive.
fn fix_phase(v: &mut [C64]) {
    let best = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if best == 0.0 {
        return;
    }
    let k = v
        .iter()
        .position(|z| z.norm() >= best * (1.0 - 1e-9))
        .expect("non-zero vector");
    let phase = v[k].conj() / v[k].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
}
