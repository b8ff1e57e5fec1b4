use std::fmt::Write as _;
use std::ops::{Index, IndexMut};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting empty, ragged or
    /// non-finite input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    op: "from_rows",
                    left: dim,
                    right: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        let m = Self { dim, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn check_finite(&self) -> Result<()> {
        match self
            .data
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            Some(p) => Err(Error::NonFinite {
                row: p / self.dim,
                col: p % self.dim,
            }),
            None => Ok(()),
        }
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// In-place `self += s * other`.
    pub fn add_scaled(&mut self, other: &Self, s: C64) -> Result<()> {
        check_dims("add_scaled", self, other)?;
        for (x, &y) in self.data.iter_mut().zip(&other.data) {
            *x += y * s;
        }
        Ok(())
    }

    pub fn mat_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "mat_vec: vector length mismatch");
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// ⟨u|M|v⟩ with the left vector conjugated.
    pub fn sandwich(&self, u: &[C64], v: &[C64]) -> C64 {
        let mv = self.mat_vec(v);
        u.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }

    /// Principal submatrix on the given index set, in the given order.
    pub fn submatrix(&self, indices: &[usize]) -> Self {
        let k = indices.len();
        let mut out = Self::zeros(k);
        for (r, &i) in indices.iter().enumerate() {
            for (c, &j) in indices.iter().enumerate() {
                out.data[r * k + c] = self[(i, j)];
            }
        }
        out
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim;
        (0..n).all(|i| (i..n).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol))
    }

    /// Debug dump: one row per line, entries `re+imi` at 17 significant
    /// digits, separated by single spaces.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for i in 0..self.dim {
            for (j, z) in self.row(i).iter().enumerate() {
                if j > 0 {
                    out.push(' ');
                }
                let sign = if z.im.is_sign_negative() { '-' } else { '+' };
                write!(out, "{:.16e}{}{:.16e}i", z.re, sign, z.im.abs()).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRecord {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let split = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..self.dim)
                .map(|i| self.row(i).iter().map(f).collect())
                .collect()
        };
        MatrixRecord {
            dim: self.dim,
            re: split(|z| z.re),
            im: split(|z| z.im),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rec = MatrixRecord::deserialize(deserializer)?;
        if rec.re.len() != rec.dim || rec.im.len() != rec.dim {
            return Err(serde::de::Error::custom(
                "matrix row count does not match dim",
            ));
        }
        let rows: Vec<Vec<C64>> = rec
            .re
            .iter()
            .zip(&rec.im)
            .map(|(r, i)| r.iter().zip(i).map(|(&a, &b)| C64::new(a, b)).collect())
            .collect();
        ComplexMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

fn check_dims(op: &'static str, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            op,
            left: a.dim,
            right: b.dim,
        });
    }
    Ok(())
}

pub fn mat_add(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dims("mat_add", a, b)?;
    Ok(ComplexMatrix {
        dim: a.dim,
        data: a.data.iter().zip(&b.data).map(|(x, y)| x + y).collect(),
    })
}

pub fn mat_sub(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dims("mat_sub", a, b)?;
    Ok(ComplexMatrix {
        dim: a.dim,
        data: a.data.iter().zip(&b.data).map(|(x, y)| x - y).collect(),
    })
}

/// Row-oriented product. Zero entries of `a` are skipped, which makes
/// products of the (very sparse) ladder matrices cheap at large cutoffs.
pub fn mat_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dims("mat_mul", a, b)?;
    let n = a.dim;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        let out_row = &mut out.data[i * n..(i + 1) * n];
        for k in 0..n {
            let aik = a.data[i * n + k];
            if aik == ZERO {
                continue;
            }
            let b_row = &b.data[k * n..(k + 1) * n];
            for (o, &bkj) in out_row.iter_mut().zip(b_row) {
                *o += aik * bkj;
            }
        }
    }
    Ok(out)
}

pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out.data[j * n + i] = a.data[i * n + j].conj();
        }
    }
    out
}

/// `a·b − b·a`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dims("commutator", a, b)?;
    mat_sub(&mat_mul(a, b)?, &mat_mul(b, a)?)
}

/// Kronecker product `a ⊗ b` (rectangular-free: both square).
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim, b.dim);
    let mut out = ComplexMatrix::zeros(na * nb);
    for i in 0..na {
        for j in 0..na {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k, j * nb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        mat_sub(a, b).unwrap().max_norm()
    }

    fn sample4() -> ComplexMatrix {
        let rows: Vec<Vec<C64>> = (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| {
                        c(
                            (i * 4 + j) as f64 * 0.37 - 2.0,
                            (j as f64 - i as f64) * 0.11,
                        )
                    })
                    .collect()
            })
            .collect();
        ComplexMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn add_identity_cases() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(mat_add(&i2, &i2).unwrap(), i2.scale_real(2.0));

        let a = sample4();
        assert_eq!(mat_add(&a, &ComplexMatrix::zeros(4)).unwrap(), a);

        let p =
            ComplexMatrix::from_rows(&[vec![c(1., 0.), c(0., 1.)], vec![c(0., -1.), c(1., 0.)]])
                .unwrap();
        let q =
            ComplexMatrix::from_rows(&[vec![c(1., 0.), c(0., -1.)], vec![c(0., 1.), c(1., 0.)]])
                .unwrap();
        assert_eq!(
            mat_add(&p, &q).unwrap(),
            ComplexMatrix::from_diagonal(&[2.0, 2.0])
        );
    }

    #[test]
    fn dimension_mismatch_names_both_dims() {
        let err = mat_add(&ComplexMatrix::zeros(2), &ComplexMatrix::zeros(3)).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                op: "mat_add",
                left: 2,
                right: 3
            }
        );
        assert!(err.to_string().contains("2 vs 3"));
        assert!(mat_mul(&ComplexMatrix::zeros(2), &ComplexMatrix::zeros(3)).is_err());
        assert!(commutator(&ComplexMatrix::zeros(4), &ComplexMatrix::zeros(3)).is_err());
    }

    #[test]
    fn multiplication_cases() {
        let a = sample4();
        assert_eq!(mat_mul(&a, &ComplexMatrix::identity(4)).unwrap(), a);

        let raise = ComplexMatrix::from_real_rows(&[vec![0., 1.], vec![0., 0.]]).unwrap();
        let lower = ComplexMatrix::from_real_rows(&[vec![0., 0.], vec![1., 0.]]).unwrap();
        assert_eq!(
            mat_mul(&raise, &lower).unwrap(),
            ComplexMatrix::from_diagonal(&[1.0, 0.0])
        );

        // 3-level lowering matrix: a|n> = sqrt(n)|n-1>.
        let s2 = 2f64.sqrt();
        let a3 =
            ComplexMatrix::from_real_rows(&[vec![0., 1., 0.], vec![0., 0., s2], vec![0., 0., 0.]])
                .unwrap();
        let prod = mat_mul(&a3, &adjoint(&a3)).unwrap();
        assert!(max_diff(&prod, &ComplexMatrix::from_diagonal(&[1.0, 2.0, 0.0])) < 1e-15);
    }

    #[test]
    fn adjoint_cases() {
        let a = ComplexMatrix::from_rows(&[vec![c(0., 0.), c(0., 1.)], vec![c(0., 0.), c(0., 0.)]])
            .unwrap();
        let expected =
            ComplexMatrix::from_rows(&[vec![c(0., 0.), c(0., 0.)], vec![c(0., -1.), c(0., 0.)]])
                .unwrap();
        assert_eq!(adjoint(&a), expected);
        assert_eq!(
            adjoint(&ComplexMatrix::identity(3)),
            ComplexMatrix::identity(3)
        );
        let s = sample4();
        assert_eq!(adjoint(&adjoint(&s)), s);
    }

    #[test]
    fn pauli_commutator() {
        let sx = ComplexMatrix::from_real_rows(&[vec![0., 1.], vec![1., 0.]]).unwrap();
        let sy =
            ComplexMatrix::from_rows(&[vec![c(0., 0.), c(0., -1.)], vec![c(0., 1.), c(0., 0.)]])
                .unwrap();
        let sz = ComplexMatrix::from_diagonal(&[1.0, -1.0]);
        let comm = commutator(&sx, &sy).unwrap();
        assert_eq!(comm, sz.scale(c(0., 2.)));
        let a = sample4();
        assert_eq!(commutator(&a, &a).unwrap().max_norm(), 0.0);
    }

    #[test]
    fn non_finite_rejected() {
        let err = ComplexMatrix::from_real_rows(&[vec![1., f64::NAN], vec![0., 1.]]).unwrap_err();
        assert_eq!(err, Error::NonFinite { row: 0, col: 1 });
        assert_eq!(
            ComplexMatrix::from_rows(&[]).unwrap_err(),
            Error::EmptyMatrix
        );
    }

    #[test]
    fn dump_format() {
        let m =
            ComplexMatrix::from_rows(&[vec![c(1., -0.5), c(0., 0.)], vec![c(-2., 3.), c(0.1, 0.)]])
                .unwrap();
        let dump = m.dump();
        let lines: Vec<&str> = dump.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(
            lines[0],
            "1.0000000000000000e0-5.0000000000000000e-1i 0.0000000000000000e0+0.0000000000000000e0i"
        );
        assert_eq!(
            lines[1],
            "-2.0000000000000000e0+3.0000000000000000e0i 1.0000000000000001e-1+0.0000000000000000e0i"
        );
    }

    #[test]
    fn kron_with_identity() {
        let sz = ComplexMatrix::from_diagonal(&[1.0, -1.0]);
        let k = kron(&sz, &ComplexMatrix::identity(2));
        assert_eq!(k, ComplexMatrix::from_diagonal(&[1.0, 1.0, -1.0, -1.0]));
    }
}
