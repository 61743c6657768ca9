//! The two-level quench model: a momentum-resolved Hamiltonian family
//! `H_k(t) = k sx + i gamma sy + F t sz` in natural units, its instantaneous
//! spectrum and exceptional-point structure, and the discrete symmetries used
//! by the parity checks.

use core::fmt;

use num_complex::Complex64;
#[cfg_attr(feature = "std", allow(unused_imports))]
use num_traits::Float;

use crate::algebra::{Matrix2C, Vector2C};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelError {
    /// The quench force must be positive (forward linear ramp).
    NonPositiveForce { force: f64 },
    /// A parameter was NaN or infinite.
    NonFiniteParameter,
    /// Eigenvector frames requested at (or too close to) an exceptional
    /// point, where they coalesce.
    DegenerateFrame { gap: f64 },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::NonPositiveForce { force } => {
                write!(f, "quench force must be positive, got {force}")
            }
            ModelError::NonFiniteParameter => write!(f, "model parameters must be finite"),
            ModelError::DegenerateFrame { gap } => {
                write!(f, "eigenvector frame is degenerate (gap {gap:e})")
            }
        }
    }
}

impl core::error::Error for ModelError {}

/// Physical parameters of one momentum mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeParams {
    k: f64,
    gamma: f64,
    force: f64,
}

impl ModeParams {
    pub fn new(k: f64, gamma: f64, force: f64) -> Result<Self, ModelError> {
        if !(k.is_finite() && gamma.is_finite() && force.is_finite()) {
            return Err(ModelError::NonFiniteParameter);
        }
        if force <= 0.0 {
            return Err(ModelError::NonPositiveForce { force });
        }
        Ok(Self { k, gamma, force })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn force(&self) -> f64 {
        self.force
    }

    /// Same mode with the momentum sign flipped.
    pub fn with_k(&self, k: f64) -> Result<Self, ModelError> {
        Self::new(k, self.gamma, self.force)
    }

    /// The adiabaticity parameter `(k^2 - gamma^2) / (2F)`.
    pub fn delta(&self) -> f64 {
        (self.k * self.k - self.gamma * self.gamma) / (2.0 * self.force)
    }

    /// `gamma^2 / F`: the scale of non-Hermiticity of the quench.
    pub fn nonherm_scale(&self) -> f64 {
        self.gamma * self.gamma / self.force
    }

    /// Modes with `|k| < |gamma|` pass through exceptional points during the
    /// ramp and undergo symmetry-broken evolution.
    pub fn is_pt_broken(&self) -> bool {
        self.k.abs() < self.gamma.abs()
    }

    /// Total amplitude-growth exponent accumulated between the exceptional
    /// points: `pi (gamma^2 - k^2) / (2F)` for broken modes, zero otherwise.
    ///
    /// `exp(2 * growth_exponent)` bounds the singular-value spread of the
    /// propagator; it decides which representations stay meaningful in f64.
    pub fn growth_exponent(&self) -> f64 {
        if self.is_pt_broken() {
            core::f64::consts::PI * (self.gamma * self.gamma - self.k * self.k)
                / (2.0 * self.force)
        } else {
            0.0
        }
    }

    /// `H_k(t)` as an entrywise matrix: `[[F t, k + gamma], [k - gamma, -F t]]`.
    pub fn hamiltonian(&self, t: f64) -> Matrix2C {
        Matrix2C::from_reals(
            self.force * t,
            self.k + self.gamma,
            self.k - self.gamma,
            -self.force * t,
        )
    }

    /// The Hermitian part `k sx + F t sz` (drops the anti-Hermitian drive).
    pub fn hermitian_part(&self, t: f64) -> Matrix2C {
        Matrix2C::from_reals(self.force * t, self.k, self.k, -self.force * t)
    }

    /// Instantaneous eigenvalues `(+E, -E)` with
    /// `E = sqrt(F^2 t^2 + k^2 - gamma^2)` on the principal branch:
    /// real non-negative when the radicand is non-negative, otherwise
    /// `+i * sqrt(|radicand|)`.
    pub fn instantaneous_eigenvalues(&self, t: f64) -> (Complex64, Complex64) {
        let w = self.eigenvalue_squared(t);
        let e = if w >= 0.0 {
            Complex64::new(w.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-w).sqrt())
        };
        (e, -e)
    }

    /// `E^2 = F^2 t^2 + k^2 - gamma^2 = -det H` as a real number.
    pub fn eigenvalue_squared(&self, t: f64) -> f64 {
        let ft = self.force * t;
        ft * ft + self.k * self.k - self.gamma * self.gamma
    }

    /// Times at which the instantaneous eigenvalues (and eigenvectors)
    /// coalesce: `F^2 t^2 = gamma^2 - k^2`.
    pub fn ep_times(&self) -> EpTimes {
        let disc = self.gamma * self.gamma - self.k * self.k;
        if disc > 0.0 {
            let t = disc.sqrt() / self.force;
            EpTimes::Pair(-t, t)
        } else if disc == 0.0 {
            EpTimes::Single(0.0)
        } else {
            EpTimes::None
        }
    }

    /// Right and left instantaneous eigenvector frames, biorthogonally
    /// normalized. Only meaningful where the spectrum is real and
    /// non-degenerate; errors otherwise.
    pub fn biorthogonal_frame(&self, t: f64) -> Result<BiorthogonalFrame, ModelError> {
        let w = self.eigenvalue_squared(t);
        let scale = (self.force * t).abs().max(self.k.abs()).max(self.gamma.abs());
        if w <= (1e-12 * scale) * (1e-12 * scale) {
            return Err(ModelError::DegenerateFrame { gap: w });
        }
        let e = w.sqrt();
        let a = self.force * t;
        let b = self.k + self.gamma;
        let c = self.k - self.gamma;
        // Branch the eigenvector formula on sign(a) to avoid the cancelling
        // representation (E -+ a small when a >+- 0).
        let (r_plus, r_minus) = if a >= 0.0 {
            (
                Vector2C::from_reals(e + a, c),
                Vector2C::from_reals(b, -(e + a)),
            )
        } else {
            (
                Vector2C::from_reals(b, e - a),
                Vector2C::from_reals(e - a, -c),
            )
        };
        // Left eigenvectors are right eigenvectors of H^T (b and c swapped).
        let (l_plus, l_minus) = if a >= 0.0 {
            (
                Vector2C::from_reals(e + a, b),
                Vector2C::from_reals(c, -(e + a)),
            )
        } else {
            (
                Vector2C::from_reals(c, e - a),
                Vector2C::from_reals(e - a, -b),
            )
        };
        let norm_pair = |l: Vector2C, r: Vector2C| -> Result<(Vector2C, Vector2C), ModelError> {
            let r = r.scale_re(1.0 / r.norm());
            let pairing = l.inner(&r);
            if pairing.norm() < 1e-14 {
                return Err(ModelError::DegenerateFrame { gap: pairing.norm() });
            }
            Ok((l.scale(pairing.inv().conj()), r))
        };
        let (l_minus, r_minus) = norm_pair(l_minus, r_minus)?;
        let (l_plus, r_plus) = norm_pair(l_plus, r_plus)?;
        Ok(BiorthogonalFrame { r_minus, r_plus, l_minus, l_plus })
    }
}

/// Exceptional-point times of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpTimes {
    /// Fully symmetric evolution (`|k| > |gamma|`): the spectrum never
    /// coalesces.
    None,
    /// Boundary mode `|k| = |gamma|`: a single coalescence at `t = 0`.
    Single(f64),
    /// Broken mode `|k| < |gamma|`: entry and exit crossings.
    Pair(f64, f64),
}

impl EpTimes {
    pub fn count(&self) -> usize {
        match self {
            EpTimes::None => 0,
            EpTimes::Single(_) => 1,
            EpTimes::Pair(..) => 2,
        }
    }

    pub fn as_array(&self) -> [Option<f64>; 2] {
        match *self {
            EpTimes::None => [None, None],
            EpTimes::Single(t) => [Some(t), None],
            EpTimes::Pair(a, b) => [Some(a), Some(b)],
        }
    }
}

/// Instantaneous eigenvector frames of `H` and `H^T`, with `<l_i|r_j> = delta_ij`.
#[derive(Debug, Clone, Copy)]
pub struct BiorthogonalFrame {
    pub r_minus: Vector2C,
    pub r_plus: Vector2C,
    pub l_minus: Vector2C,
    pub l_plus: Vector2C,
}

/// Adjoint action of the combined parity / time-reversal operation on a
/// matrix, composed literally from `P = sy` and `T = -i sy K`:
/// `M -> sy ((-i sy) conj(M) (i sy)) sy`.
pub fn pt_adjoint(m: &Matrix2C) -> Matrix2C {
    let sy = Matrix2C::pauli_y();
    let minus_i_sy = sy.scale(Complex64::new(0.0, -1.0));
    let plus_i_sy = sy.scale(Complex64::new(0.0, 1.0));
    sy * (minus_i_sy * m.conj_entries() * plus_i_sy) * sy
}

/// Max-entry magnitude of the commutator of `H_k(t)` with the combined
/// parity / time-reversal operation. Vanishes identically for this family.
pub fn check_pt_commutator(p: &ModeParams, t: f64) -> f64 {
    let h = p.hamiltonian(t);
    (pt_adjoint(&h) - h).max_abs()
}

/// Max-entry magnitude of `sz H_{(k,gamma)}(t) sz - H_{(-k,-gamma)}(t)`;
/// zero to roundoff by Pauli anticommutation.
pub fn check_k_parity(p: &ModeParams, t: f64) -> f64 {
    let sz = Matrix2C::pauli_z();
    let flipped = ModeParams { k: -p.k, gamma: -p.gamma, force: p.force };
    (sz * p.hamiltonian(t) * sz - flipped.hamiltonian(t)).max_abs()
}
