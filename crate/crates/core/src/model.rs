//! Physical parameters, the unperturbed Dirac-oscillator Hamiltonian, the
//! first-order GUP perturbation and the analytic Landau spectrum.

use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    embed_spinor, momentum_ops, p_squared, position_ops, BasisState, FockSpace, OscParams, Spin,
};
use crate::numerics::{adjoint, ComplexMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::Plus => write!(f, "+"),
            Branch::Minus => write!(f, "-"),
        }
    }
}

/// Physical inputs. Derived quantities are methods so they can never go
/// stale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub mass: f64,
    pub light_speed: f64,
    pub hbar: f64,
    /// Oscillator frequency ω.
    pub omega: f64,
    /// Magnetic field along z.
    pub field: f64,
    /// |e|.
    pub charge: f64,
    /// GUP parameter `a` (inverse momentum units).
    pub gup_a: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            mass: 1.0,
            light_speed: 1.0,
            hbar: 1.0,
            omega: 1.0,
            field: 0.0,
            charge: 1.0,
            gup_a: 0.0,
        }
    }
}

impl ModelParams {
    /// Natural units `m = c = ħ = |e| = 1`.
    pub fn natural(omega: f64, field: f64, gup_a: f64) -> Result<Self> {
        let p = Self {
            omega,
            field,
            gup_a,
            ..Self::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mass", self.mass),
            ("light_speed", self.light_speed),
            ("hbar", self.hbar),
            ("charge", self.charge),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Usage(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if !(self.omega >= 0.0 && self.omega.is_finite()) {
            return Err(Error::Usage(format!(
                "omega must be nonnegative, got {}",
                self.omega
            )));
        }
        if !self.field.is_finite() {
            return Err(Error::Usage("field must be finite".into()));
        }
        if !(self.gup_a >= 0.0 && self.gup_a.is_finite()) {
            return Err(Error::Usage(format!(
                "gup_a must be nonnegative, got {}",
                self.gup_a
            )));
        }
        Ok(())
    }

    /// Copy with a different GUP parameter. Negative values are accepted
    /// here (the finite-difference oracle evaluates `H(−a)`).
    pub fn with_gup_a(&self, gup_a: f64) -> Self {
        Self { gup_a, ..*self }
    }

    pub fn with_field(&self, field: f64) -> Self {
        Self { field, ..*self }
    }

    /// `ω_c = |e|B/(mc)`.
    pub fn omega_c(&self) -> f64 {
        self.charge * self.field / (self.mass * self.light_speed)
    }

    pub fn omega_tilde(&self) -> f64 {
        reduced_frequency(self)
    }

    /// `λ = ħω̃/(mc²)`.
    pub fn lambda(&self) -> f64 {
        self.hbar * self.omega_tilde() / self.rest_energy()
    }

    /// `a·m·c`, the dimensionless GUP strength.
    pub fn alpha_gup(&self) -> f64 {
        self.gup_a * self.mass * self.light_speed
    }

    pub fn rest_energy(&self) -> f64 {
        self.mass * self.light_speed * self.light_speed
    }

    /// `a·c·m·ħ·ω̃`, the unit in which GUP shifts are quoted.
    pub fn shift_unit(&self) -> f64 {
        self.gup_a * self.light_speed * self.mass * self.hbar * self.omega_tilde()
    }

    pub fn osc(&self) -> OscParams {
        OscParams {
            mass: self.mass,
            omega_tilde: self.omega_tilde(),
            hbar: self.hbar,
        }
    }
}

/// `ω̃ = ω − |e|B/(2mc)`.
pub fn reduced_frequency(p: &ModelParams) -> f64 {
    p.omega - 0.5 * p.omega_c()
}

/// Closed-form level `±mc²√(1 + 4ħω̃n/(mc²))`, evaluated with the signed
/// `ω̃`. Past the critical field the radicand can go negative.
pub fn landau_level(p: &ModelParams, n: usize, branch: Branch) -> Result<f64> {
    let radicand = 1.0 + 4.0 * p.lambda() * n as f64;
    if radicand < 0.0 {
        return Err(Error::BranchCollapse { n, radicand });
    }
    Ok(branch.sign() * p.rest_energy() * radicand.sqrt())
}

/// Eigenvalue of the assembled H₀ for level `n`. Equal to
/// [`landau_level`] for `ω̃ ≥ 0`; past the critical field the operators are
/// built on `|ω̃|` and the spectrum is `±mc²√(1 + 4|λ|n)`.
pub fn level_energy(p: &ModelParams, n: usize, branch: Branch) -> f64 {
    branch.sign() * p.rest_energy() * (1.0 + 4.0 * p.lambda().abs() * n as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinorLevel {
    pub n: usize,
    pub branch: Branch,
    pub energy: f64,
    pub c_n: f64,
    pub d_n: f64,
}

/// Level `n` with coefficients
/// `c = ±√((E⁺ ± mc²)/2E⁺)`, `d = √((E⁺ ∓ mc²)/2E⁺)`.
///
/// The zero mode exists on one branch only: `+` for `ω̃ ≥ 0`, `−` past the
/// critical field.
pub fn spinor_level(p: &ModelParams, n: usize, branch: Branch) -> Result<SpinorLevel> {
    let wt = p.omega_tilde();
    if n == 0 {
        let present = match branch {
            Branch::Plus => wt >= 0.0,
            Branch::Minus => wt < 0.0,
        };
        if !present {
            return Err(Error::LevelAbsent {
                n,
                branch,
                omega_tilde: wt,
            });
        }
    }
    let e_plus = level_energy(p, n, Branch::Plus);
    let mc2 = p.rest_energy();
    let s = branch.sign();
    let c_n = s * ((e_plus + s * mc2) / (2.0 * e_plus)).max(0.0).sqrt();
    let d_n = ((e_plus - s * mc2) / (2.0 * e_plus)).max(0.0).sqrt();
    Ok(SpinorLevel {
        n,
        branch,
        energy: s * e_plus,
        c_n,
        d_n,
    })
}

impl SpinorLevel {
    /// Nonzero components of the eigenstate with spectator quantum number
    /// `spectator`.
    ///
    /// For `ω̃ ≥ 0`: `c|n_a=n, n_b=k; ↑⟩ − i d|n_a=n−1, n_b=k; ↓⟩`.
    /// For `ω̃ < 0` the roles of the modes swap:
    /// `c|n_a=k, n_b=n−1; ↑⟩ + i d|n_a=k, n_b=n; ↓⟩`.
    pub fn components(&self, p: &ModelParams, spectator: usize) -> Vec<(BasisState, C64)> {
        let n = self.n;
        let k = spectator;
        let mut out = Vec::with_capacity(2);
        if p.omega_tilde() >= 0.0 {
            out.push((
                BasisState {
                    n_a: n,
                    n_b: k,
                    spin: Spin::Up,
                },
                C64::new(self.c_n, 0.0),
            ));
            if n >= 1 {
                out.push((
                    BasisState {
                        n_a: n - 1,
                        n_b: k,
                        spin: Spin::Down,
                    },
                    C64::new(0.0, -self.d_n),
                ));
            }
        } else {
            if n >= 1 {
                out.push((
                    BasisState {
                        n_a: k,
                        n_b: n - 1,
                        spin: Spin::Up,
                    },
                    C64::new(self.c_n, 0.0),
                ));
            }
            out.push((
                BasisState {
                    n_a: k,
                    n_b: n,
                    spin: Spin::Down,
                },
                C64::new(0.0, self.d_n),
            ));
        }
        out.retain(|(_, amp)| amp.norm() > 0.0);
        out
    }

    /// State vector on a spinful space.
    pub fn embed(&self, space: &FockSpace, p: &ModelParams, spectator: usize) -> Result<Vec<C64>> {
        if !space.include_spin() {
            return Err(Error::SpinRequired);
        }
        let mut v = vec![C64::new(0.0, 0.0); space.dim()];
        for (state, amp) in self.components(p, spectator) {
            if state.n_a > space.cutoff() || state.n_b > space.cutoff() {
                return Err(Error::OutsideInterior {
                    descriptor: state.to_string(),
                    cutoff: space.cutoff(),
                });
            }
            v[space.index(state)] = amp;
        }
        Ok(v)
    }
}

/// `H₀ = [[mc², U], [U†, −mc²]]` with `U = 2c p_z + i m ω̃ c z̄`.
///
/// The lower-left block is `U†` so that H₀ is Hermitian. At `ω̃ = 0` the
/// off-diagonal coupling is set to zero and H₀ reduces to `β mc²`.
pub fn build_h0(space: &FockSpace, p: &ModelParams) -> Result<ComplexMatrix> {
    if !space.include_spin() {
        return Err(Error::SpinRequired);
    }
    p.validate_lenient()?;
    let bare = space.spinless();
    let n = bare.dim();
    let mc2 = p.rest_energy();
    let upper = ComplexMatrix::identity(n).scale_real(mc2);
    let lower = ComplexMatrix::identity(n).scale_real(-mc2);
    let wt = p.omega_tilde();
    if wt == 0.0 {
        let zero = ComplexMatrix::zeros(n);
        return embed_spinor(&upper, &lower, &zero, &zero);
    }
    let osc = p.osc();
    let (pz, _) = momentum_ops(&bare, &osc)?;
    let (_, zbar) = position_ops(&bare, &osc)?;
    let c = p.light_speed;
    let mut coupling = pz.scale_real(2.0 * c);
    coupling.add_scaled(&zbar, C64::new(0.0, p.mass * wt * c))?;
    let coupling_dag = adjoint(&coupling);
    embed_spinor(&upper, &lower, &coupling, &coupling_dag)
}

/// `H′ = −a c p² ⊗ I₂`. Identically zero at `ω̃ = 0`.
pub fn build_h_prime(space: &FockSpace, p: &ModelParams) -> Result<ComplexMatrix> {
    if !space.include_spin() {
        return Err(Error::SpinRequired);
    }
    p.validate_lenient()?;
    let bare = space.spinless();
    let n = bare.dim();
    let zero = ComplexMatrix::zeros(n);
    if p.omega_tilde() == 0.0 || p.gup_a == 0.0 {
        return Ok(ComplexMatrix::zeros(space.dim()));
    }
    let block = p_squared(&bare, &p.osc())?.scale_real(-p.gup_a * p.light_speed);
    embed_spinor(&block, &block, &zero, &zero)
}

/// `H = H₀ + H′`.
pub fn build_full(space: &FockSpace, p: &ModelParams) -> Result<ComplexMatrix> {
    let mut h = build_h0(space, p)?;
    if p.gup_a != 0.0 {
        h.add_scaled(&build_h_prime(space, p)?, C64::new(1.0, 0.0))?;
    }
    Ok(h)
}

impl ModelParams {
    /// Like [`validate`](Self::validate) but allows a negative `gup_a`.
    fn validate_lenient(&self) -> Result<()> {
        self.with_gup_a(self.gup_a.abs()).validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{eigh, inner, vec_norm};

    fn params_lambda(lambda: f64) -> ModelParams {
        // m = c = ħ = 1, B = 0 so ω̃ = ω = λ.
        ModelParams::natural(lambda, 0.0, 0.0).unwrap()
    }

    #[test]
    fn reduced_frequency_examples() {
        assert_eq!(
            reduced_frequency(&ModelParams::natural(1.0, 1.0, 0.0).unwrap()),
            0.5
        );
        assert_eq!(
            reduced_frequency(&ModelParams::natural(1.0, 2.0, 0.0).unwrap()),
            0.0
        );
        assert_eq!(
            reduced_frequency(&ModelParams::natural(0.7, 0.0, 0.0).unwrap()),
            0.7
        );
    }

    #[test]
    fn landau_level_examples() {
        let p = params_lambda(0.1);
        assert_eq!(landau_level(&p, 0, Branch::Plus).unwrap(), 1.0);
        assert_eq!(landau_level(&p, 0, Branch::Minus).unwrap(), -1.0);
        assert!(
            (landau_level(&p, 1, Branch::Plus).unwrap() - 1.183_215_956_619_923_2).abs() < 1e-15
        );
        assert!((landau_level(&p, 4, Branch::Minus).unwrap() + 2.6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn branch_collapse_past_critical_field() {
        // ω = 1, B = 3 → ω̃ = −0.5, λ = −0.5; n = 1 gives 1 − 2 < 0.
        let p = ModelParams::natural(1.0, 3.0, 0.0).unwrap();
        assert!(matches!(
            landau_level(&p, 1, Branch::Plus),
            Err(Error::BranchCollapse { n: 1, .. })
        ));
        assert!(landau_level(&p, 0, Branch::Plus).is_ok());
    }

    #[test]
    fn spinor_coefficients() {
        let p = params_lambda(0.1);
        let l0 = spinor_level(&p, 0, Branch::Plus).unwrap();
        assert_eq!((l0.c_n, l0.d_n), (1.0, 0.0));
        let l1 = spinor_level(&p, 1, Branch::Plus).unwrap();
        assert!((l1.c_n - 0.960_508_785_677_808_5).abs() < 1e-12);
        assert!((l1.d_n - 0.278_249_658_824_124_5).abs() < 1e-12);
        for n in 0..10 {
            for branch in [Branch::Plus, Branch::Minus] {
                if let Ok(l) = spinor_level(&p, n, branch) {
                    assert!((l.c_n * l.c_n + l.d_n * l.d_n - 1.0).abs() < 1e-12);
                    match branch {
                        Branch::Plus => assert!(l.energy >= 1.0),
                        Branch::Minus => assert!(l.energy <= -1.0),
                    }
                }
            }
        }
        assert!(matches!(
            spinor_level(&p, 0, Branch::Minus),
            Err(Error::LevelAbsent { n: 0, .. })
        ));
    }

    #[test]
    fn h0_hermitian_and_eigenstates() {
        let space = FockSpace::new(6, true).unwrap();
        for (omega, field) in [(0.3, 0.0), (1.0, 1.0), (1.0, 3.0), (1.0, 2.0), (0.0, 0.0)] {
            let p = ModelParams::natural(omega, field, 0.0).unwrap();
            let h0 = build_h0(&space, &p).unwrap();
            assert!(h0.is_hermitian(1e-12), "omega={omega} B={field}");
            assert_eq!(adjoint(&h0), h0);
            if p.omega_tilde() == 0.0 {
                continue;
            }
            for n in 0..4 {
                for branch in [Branch::Plus, Branch::Minus] {
                    let Ok(level) = spinor_level(&p, n, branch) else {
                        continue;
                    };
                    for k in 0..3 {
                        let psi = level.embed(&space, &p, k).unwrap();
                        assert!((vec_norm(&psi) - 1.0).abs() < 1e-14);
                        let hpsi = h0.mat_vec(&psi);
                        let resid: f64 = hpsi
                            .iter()
                            .zip(&psi)
                            .map(|(h, v)| (h - v * level.energy).norm_sqr())
                            .sum::<f64>()
                            .sqrt();
                        assert!(resid < 1e-13, "n={n} {branch} k={k}: {resid}");
                    }
                }
            }
        }
    }

    #[test]
    fn small_space_spectrum_is_charge_symmetric() {
        let space = FockSpace::new(5, true).unwrap();
        let p = params_lambda(0.1);
        let vals = eigh(&build_h0(&space, &p).unwrap(), 1e-10)
            .unwrap()
            .eigenvalues;
        let n = vals.len();
        for i in 0..n {
            assert!((vals[i] + vals[n - 1 - i]).abs() < 1e-10);
        }
    }

    #[test]
    fn h_prime_cases() {
        let space = FockSpace::new(5, true).unwrap();
        let p = ModelParams::natural(1.0, 1.0, 0.0).unwrap();
        assert_eq!(build_h_prime(&space, &p).unwrap().max_norm(), 0.0);
        assert_eq!(
            build_full(&space, &p).unwrap(),
            build_h0(&space, &p).unwrap()
        );

        let pa = p.with_gup_a(1e-3);
        let h1 = build_h_prime(&space, &pa).unwrap();
        let h2 = build_h_prime(&space, &p.with_gup_a(2e-3)).unwrap();
        assert!(
            crate::numerics::mat_sub(&h2, &h1.scale_real(2.0))
                .unwrap()
                .max_norm()
                < 1e-18
        );
        assert!(h1.is_hermitian(0.0));

        let psi0 = spinor_level(&pa, 0, Branch::Plus)
            .unwrap()
            .embed(&space, &pa, 0)
            .unwrap();
        let e0 = inner(&psi0, &h1.mat_vec(&psi0)).re;
        assert!((e0 / pa.shift_unit() + 1.0).abs() < 1e-12);

        // Critical field: no oscillator, no correction.
        let crit = ModelParams::natural(1.0, 2.0, 1e-3).unwrap();
        assert_eq!(build_h_prime(&space, &crit).unwrap().max_norm(), 0.0);
    }

    #[test]
    fn spinless_space_is_rejected() {
        let space = FockSpace::new(3, false).unwrap();
        let p = params_lambda(0.1);
        assert_eq!(build_h0(&space, &p).unwrap_err(), Error::SpinRequired);
    }
}
