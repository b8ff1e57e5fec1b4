//! Truncated two-mode Fock space (optionally ⊗ spinor) and the operators
//! built on it.
//!
//! Conventions (see `CONVENTIONS.md` at the repository root):
//!
//! * `z = x + iy`, `z̄ = x − iy`, `p_z = (p_x − i p_y)/2`, `p_z̄ = (p_x + i p_y)/2`.
//! * Chiral modes `a = (a_x + i a_y)/√2`, `b = (a_x − i a_y)/√2`, so that
//!   `z = ℓ(a + b†)` and `p_z = (i/2)(ħ/ℓ)(a† − b)` with `ℓ = √(ħ/m|ω̃|)`.
//! * `L_z = ħ(n_b − n_a)`.
//!
//! Flat index order is lexicographic in `(spin, n_a, n_b)` with spin up first.

use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{adjoint, kron, mat_add, mat_mul, ComplexMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    fn offset(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spin::Up => write!(f, "+1/2"),
            Spin::Down => write!(f, "-1/2"),
        }
    }
}

/// One occupation-number basis state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisState {
    pub n_a: usize,
    pub n_b: usize,
    pub spin: Spin,
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|n_a={}, n_b={}; {}>", self.n_a, self.n_b, self.spin)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    cutoff: usize,
    include_spin: bool,
}

impl FockSpace {
    pub fn new(cutoff: usize, include_spin: bool) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::Usage("cutoff must be positive".into()));
        }
        Ok(Self {
            cutoff,
            include_spin,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn include_spin(&self) -> bool {
        self.include_spin
    }

    /// Number of states per spin component, `(N_cut + 1)²`.
    pub fn mode_dim(&self) -> usize {
        (self.cutoff + 1) * (self.cutoff + 1)
    }

    pub fn dim(&self) -> usize {
        if self.include_spin {
            2 * self.mode_dim()
        } else {
            self.mode_dim()
        }
    }

    pub fn spinless(&self) -> Self {
        Self {
            include_spin: false,
            ..*self
        }
    }

    pub fn index(&self, state: BasisState) -> usize {
        let per = self.cutoff + 1;
        assert!(
            state.n_a <= self.cutoff && state.n_b <= self.cutoff,
            "occupation above cutoff"
        );
        let spin = if self.include_spin {
            state.spin.offset()
        } else {
            assert_eq!(state.spin, Spin::Up, "spinless space has no down component");
            0
        };
        spin * self.mode_dim() + state.n_a * per + state.n_b
    }

    pub fn state(&self, index: usize) -> BasisState {
        assert!(index < self.dim(), "index out of range");
        let per = self.cutoff + 1;
        let spin = if index >= self.mode_dim() {
            Spin::Down
        } else {
            Spin::Up
        };
        let rest = index % self.mode_dim();
        BasisState {
            n_a: rest / per,
            n_b: rest % per,
            spin,
        }
    }

    pub fn states(&self) -> impl Iterator<Item = BasisState> + '_ {
        (0..self.dim()).map(|i| self.state(i))
    }

    /// Interior projection: `n_a + n_b ≤ N_cut − 2`, where operators
    /// quadratic in the ladder operators are free of truncation error.
    pub fn is_interior(&self, state: BasisState) -> bool {
        state.n_a + state.n_b + 2 <= self.cutoff
    }

    pub fn interior_indices(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.is_interior(self.state(i)))
            .collect()
    }

    /// Lifts a spinless operator to this space (identity on the spinor).
    fn lift(&self, op: ComplexMatrix) -> ComplexMatrix {
        if self.include_spin {
            kron(&ComplexMatrix::identity(2), &op)
        } else {
            op
        }
    }
}

/// Largest entry modulus of `a − b` restricted to interior rows and columns.
pub fn interior_max_diff(space: &FockSpace, a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let idx = space.interior_indices();
    let mut worst: f64 = 0.0;
    for &i in &idx {
        for &j in &idx {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscParams {
    pub mass: f64,
    /// May be zero or negative; operators use `|ω̃|` as the length scale.
    pub omega_tilde: f64,
    pub hbar: f64,
}

impl OscParams {
    pub fn new(mass: f64, omega_tilde: f64, hbar: f64) -> Result<Self> {
        if !(mass > 0.0) || !(hbar > 0.0) {
            return Err(Error::Usage(format!(
                "mass and hbar must be positive (got m = {mass}, hbar = {hbar})"
            )));
        }
        Ok(Self {
            mass,
            omega_tilde,
            hbar,
        })
    }

    fn scale(&self) -> Result<f64> {
        if self.omega_tilde == 0.0 {
            return Err(Error::CriticalField);
        }
        Ok(self.omega_tilde.abs())
    }

    /// `√(ħ / m|ω̃|)`.
    pub fn length(&self) -> Result<f64> {
        Ok((self.hbar / (self.mass * self.scale()?)).sqrt())
    }

    /// `m|ω̃|ħ`, the natural unit of `p²`.
    pub fn momentum_sq_unit(&self) -> Result<f64> {
        Ok(self.mass * self.scale()? * self.hbar)
    }
}

fn lowering(space: &FockSpace, mode_a: bool) -> ComplexMatrix {
    let bare = space.spinless();
    let mut m = ComplexMatrix::zeros(bare.dim());
    for col in 0..bare.dim() {
        let s = bare.state(col);
        let n = if mode_a { s.n_a } else { s.n_b };
        if n == 0 {
            continue;
        }
        let target = if mode_a {
            BasisState {
                n_a: s.n_a - 1,
                ..s
            }
        } else {
            BasisState {
                n_b: s.n_b - 1,
                ..s
            }
        };
        m[(bare.index(target), col)] = C64::new((n as f64).sqrt(), 0.0);
    }
    space.lift(m)
}

/// Annihilation operator of chiral mode `a` (the mode entering H₀).
pub fn ladder_a(space: &FockSpace) -> ComplexMatrix {
    lowering(space, true)
}

/// Annihilation operator of chiral mode `b` (carries the Landau degeneracy).
pub fn ladder_b(space: &FockSpace) -> ComplexMatrix {
    lowering(space, false)
}

pub fn number_a(space: &FockSpace) -> ComplexMatrix {
    diagonal_op(space, |s| s.n_a as f64)
}

pub fn number_b(space: &FockSpace) -> ComplexMatrix {
    diagonal_op(space, |s| s.n_b as f64)
}

fn diagonal_op(space: &FockSpace, f: impl Fn(BasisState) -> f64) -> ComplexMatrix {
    let diag: Vec<f64> = space.states().map(f).collect();
    ComplexMatrix::from_diagonal(&diag)
}

/// `(z, z̄)` with `z = ℓ(a + b†)` and `z̄ = z†`.
pub fn position_ops(space: &FockSpace, p: &OscParams) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let ell = p.length()?;
    let a = ladder_a(space);
    let b_dag = adjoint(&ladder_b(space));
    let z = mat_add(&a, &b_dag)?.scale_real(ell);
    let zbar = adjoint(&z);
    Ok((z, zbar))
}

/// `(p_z, p_z̄)` with `p_z = (i/2)(ħ/ℓ)(a† − b)` and `p_z̄ = p_z†`.
pub fn momentum_ops(space: &FockSpace, p: &OscParams) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let ell = p.length()?;
    let a_dag = adjoint(&ladder_a(space));
    let mut diff = a_dag;
    diff.add_scaled(&ladder_b(space), C64::new(-1.0, 0.0))?;
    let pz = diff.scale(C64::new(0.0, 0.5 * p.hbar / ell));
    let pzbar = adjoint(&pz);
    Ok((pz, pzbar))
}

/// Cartesian `(x, p_x)` recovered from the complex coordinates.
pub fn cartesian_x(space: &FockSpace, p: &OscParams) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (z, zbar) = position_ops(space, p)?;
    let (pz, pzbar) = momentum_ops(space, p)?;
    Ok((mat_add(&z, &zbar)?.scale_real(0.5), mat_add(&pz, &pzbar)?))
}

/// `p² = 4 p_z p_z̄`.
pub fn p_squared(space: &FockSpace, p: &OscParams) -> Result<ComplexMatrix> {
    let (pz, pzbar) = momentum_ops(space, p)?;
    Ok(mat_mul(&pz, &pzbar)?.scale_real(4.0))
}

/// `p²` assembled from the ladder decomposition
/// `2m|ω̃|ħ [a†a + aa† − (m|ω̃|/2ħ) z z̄ + L_z/ħ]`.
pub fn p_squared_via_ladder(space: &FockSpace, p: &OscParams) -> Result<ComplexMatrix> {
    let unit = p.momentum_sq_unit()?;
    let w = p.omega_tilde.abs();
    let a = ladder_a(space);
    let a_dag = adjoint(&a);
    let (z, zbar) = position_ops(space, p)?;
    let mut inner = mat_mul(&a_dag, &a)?;
    inner.add_scaled(&mat_mul(&a, &a_dag)?, C64::new(1.0, 0.0))?;
    inner.add_scaled(
        &mat_mul(&z, &zbar)?,
        C64::new(-p.mass * w / (2.0 * p.hbar), 0.0),
    )?;
    inner.add_scaled(
        &angular_momentum(space, p.hbar),
        C64::new(1.0 / p.hbar, 0.0),
    )?;
    Ok(inner.scale_real(2.0 * unit))
}

/// `L_z = ħ(n_b − n_a)`.
pub fn angular_momentum(space: &FockSpace, hbar: f64) -> ComplexMatrix {
    diagonal_op(space, |s| hbar * (s.n_b as f64 - s.n_a as f64))
}

/// The ladder pair written in terms of `z` and `p_z`:
/// `(1/√(m|ω̃|ħ)) p_z̄ − (i/2)√(m|ω̃|/ħ) z` and
/// `(1/√(m|ω̃|ħ)) p_z − (i/2)√(m|ω̃|/ħ) z̄`.
pub fn printed_ladder_pair(
    space: &FockSpace,
    p: &OscParams,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let unit = p.momentum_sq_unit()?;
    let (z, zbar) = position_ops(space, p)?;
    let (pz, pzbar) = momentum_ops(space, p)?;
    let k = C64::new(0.0, -0.5 * (p.mass * p.omega_tilde.abs() / p.hbar).sqrt());
    let mut lower = pzbar.scale_real(1.0 / unit.sqrt());
    lower.add_scaled(&z, k)?;
    let mut upper = pz.scale_real(1.0 / unit.sqrt());
    upper.add_scaled(&zbar, k)?;
    Ok((lower, upper))
}

/// Block matrix `[[upper, off_ur], [off_ll, lower]]` in spin-major order.
pub fn embed_spinor(
    upper: &ComplexMatrix,
    lower: &ComplexMatrix,
    off_ur: &ComplexMatrix,
    off_ll: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let n = upper.dim();
    for blk in [lower, off_ur, off_ll] {
        if blk.dim() != n {
            return Err(Error::DimensionMismatch {
                op: "embed_spinor",
                left: n,
                right: blk.dim(),
            });
        }
    }
    let mut out = ComplexMatrix::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = upper[(i, j)];
            out[(i, n + j)] = off_ur[(i, j)];
            out[(n + i, j)] = off_ll[(i, j)];
            out[(n + i, n + j)] = lower[(i, j)];
        }
    }
    Ok(out)
}
