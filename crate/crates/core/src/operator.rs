//! Operators on a semi-Hilbertian space: membership, A-adjoints,
//! compression to the range of `A`, and the A-normality family.

use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, smallest_singular_pair, spectral_norm};
use crate::matrix::{ComplexMatrix, C64};
use crate::space::SemiHilbertSpace;

/// Membership of `T` in `B_{A^{1/2}}(H)` and `B_A(H)` with the residuals
/// that decided it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Membership {
    /// `T·N(A) ⊆ N(A)`, tested as `‖A^{1/2} T (I − P)‖_F` small.
    pub a_bounded: bool,
    /// `R(T*A) ⊆ R(A)`, tested as `‖(I − P) T* A‖_F` small.
    pub a_adjointable: bool,
    pub bounded_residual: f64,
    pub adjointable_residual: f64,
}

/// Both routes to A-normality, reported side by side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalityCheck {
    /// `‖A T^♯ T − A T T^♯‖_F / (‖A‖‖T‖‖T^♯‖)`
    pub definition_residual: f64,
    /// `‖M M* − M* M‖_F / ‖M‖²`
    pub compressed_residual: f64,
    pub tol: f64,
}

impl NormalityCheck {
    pub fn by_definition(&self) -> bool {
        self.definition_residual <= self.tol
    }

    pub fn by_compression(&self) -> bool {
        self.compressed_residual <= self.tol
    }

    pub fn consistent(&self) -> bool {
        self.by_definition() == self.by_compression()
    }
}

#[derive(Clone, Debug)]
pub struct SemiHilbertOperator {
    space: Arc<SemiHilbertSpace>,
    t: ComplexMatrix,
    membership: Membership,
    compressed: OnceLock<ComplexMatrix>,
}

fn relative(residual: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        residual / scale
    } else {
        residual
    }
}

impl SemiHilbertOperator {
    pub fn new(space: Arc<SemiHilbertSpace>, t: ComplexMatrix) -> Result<Self> {
        if !t.is_square() || t.rows() != space.dim() {
            return Err(Error::dims(
                format!("{0}x{0}", space.dim()),
                format!("{}x{}", t.rows(), t.cols()),
            ));
        }
        let n = space.dim();
        let complement = &ComplexMatrix::identity(n) - space.projection();
        let bounded_residual = relative(
            (&(space.half() * &t) * &complement).frobenius_norm(),
            space.half().frobenius_norm() * t.frobenius_norm(),
        );
        let adjointable_residual = relative(
            (&(&complement * &t.adjoint()) * space.weight()).frobenius_norm(),
            space.weight().frobenius_norm() * t.frobenius_norm(),
        );
        let tol = space.tol();
        let membership = Membership {
            a_bounded: bounded_residual <= tol,
            a_adjointable: adjointable_residual <= tol,
            bounded_residual,
            adjointable_residual,
        };
        Ok(Self {
            space,
            t,
            membership,
            compressed: OnceLock::new(),
        })
    }

    /// Convenience constructor for a fresh `(A, T)` pair.
    pub fn from_pair(a: ComplexMatrix, t: ComplexMatrix) -> Result<Self> {
        Self::new(Arc::new(SemiHilbertSpace::new(a)?), t)
    }

    /// Another operator on the same space.
    pub fn with_matrix(&self, t: ComplexMatrix) -> Result<Self> {
        Self::new(self.space.clone(), t)
    }

    pub fn space(&self) -> &Arc<SemiHilbertSpace> {
        &self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.t
    }

    pub fn membership(&self) -> Membership {
        self.membership
    }

    pub fn is_a_bounded(&self) -> bool {
        self.membership.a_bounded
    }

    pub fn is_a_adjointable(&self) -> bool {
        self.membership.a_adjointable
    }

    fn require_bounded(&self) -> Result<()> {
        if self.membership.a_bounded {
            Ok(())
        } else {
            Err(Error::NotABounded {
                residual: self.membership.bounded_residual,
            })
        }
    }

    fn require_adjointable(&self) -> Result<()> {
        if self.membership.a_adjointable {
            Ok(())
        } else {
            Err(Error::NotAAdjointable {
                residual: self.membership.adjointable_residual,
            })
        }
    }

    /// `Λ^{1/2} Q* T Q Λ^{−1/2}` without any membership requirement: the
    /// compression of `P T P`, i.e. of `T` restricted to `R(A)`.
    pub fn range_compression(&self) -> ComplexMatrix {
        let left = self.space.scaled_q(f64::sqrt).adjoint();
        let right = self.space.scaled_q(|l| 1.0 / l.sqrt());
        &(&left * &self.t) * &right
    }

    /// The `r × r` matrix of `T̃` on `R(A^{1/2})`, satisfying
    /// `M Λ^{1/2} Q* = Λ^{1/2} Q* T`.
    pub fn compress(&self) -> Result<&ComplexMatrix> {
        self.require_bounded()?;
        Ok(self.compressed.get_or_init(|| self.range_compression()))
    }

    /// `‖M Z − Z T‖_F` with `Z = Λ^{1/2} Q*`.
    pub fn intertwining_residual(&self) -> Result<f64> {
        let m = self.compress()?;
        let z = self.space.embed();
        Ok((&(m * &z) - &(&z * &self.t)).frobenius_norm())
    }

    /// The A-adjoint `T^♯ = A† T* A`.
    pub fn sharp_matrix(&self) -> Result<ComplexMatrix> {
        self.require_adjointable()?;
        Ok(&(self.space.dagger() * &self.t.adjoint()) * self.space.weight())
    }

    pub fn sharp(&self) -> Result<Self> {
        self.with_matrix(self.sharp_matrix()?)
    }

    /// `T − λI`
    pub fn shifted(&self, lambda: C64) -> Result<Self> {
        self.with_matrix(self.t.shift(lambda))
    }

    /// `p(T)` for ascending coefficients.
    pub fn polynomial(&self, coeffs: &[C64]) -> Result<Self> {
        self.with_matrix(self.t.polynomial(coeffs))
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.with_matrix(&self.t * &other.t)
    }

    /// `‖T‖_A`, the largest singular value of `M`.
    pub fn a_operator_norm(&self) -> Result<f64> {
        spectral_norm(self.compress()?)
    }

    pub fn normality(&self, tol: f64) -> Result<NormalityCheck> {
        let sharp = self.sharp_matrix()?;
        let a = self.space.weight();
        let lhs = &(a * &sharp) * &self.t;
        let rhs = &(a * &self.t) * &sharp;
        let definition_residual = relative(
            (&lhs - &rhs).frobenius_norm(),
            a.frobenius_norm() * self.t.frobenius_norm() * sharp.frobenius_norm(),
        );
        let m = self.compress()?;
        let mh = m.adjoint();
        let compressed_residual = relative(
            (&(m * &mh) - &(&mh * m)).frobenius_norm(),
            m.frobenius_norm().powi(2),
        );
        Ok(NormalityCheck {
            definition_residual,
            compressed_residual,
            tol,
        })
    }

    /// `A T^♯ T = A T T^♯` within `tol` (relative).
    pub fn is_a_normal(&self, tol: f64) -> Result<bool> {
        Ok(self.normality(tol)?.by_definition())
    }

    /// The stricter classical condition `T^♯ T = T T^♯`. Implies
    /// [`is_a_normal`](Self::is_a_normal) but not conversely.
    pub fn is_a_normal_classic(&self, tol: f64) -> Result<bool> {
        let sharp = self.sharp_matrix()?;
        let diff = &(&sharp * &self.t) - &(&self.t * &sharp);
        let scale = self.t.frobenius_norm() * sharp.frobenius_norm();
        Ok(relative(diff.frobenius_norm(), scale) <= tol)
    }

    /// `A T^♯ T − A T T^♯ ⪰ 0` within `tol` (relative).
    pub fn is_a_hyponormal(&self, tol: f64) -> Result<bool> {
        let sharp = self.sharp_matrix()?;
        let a = self.space.weight();
        let d = &(&(a * &sharp) * &self.t) - &(&(a * &self.t) * &sharp);
        let scale = a.frobenius_norm() * self.t.frobenius_norm() * sharp.frobenius_norm();
        let eig = herm_eig(&d.hermitian_part())?;
        Ok(eig.min() >= -tol * scale.max(f64::MIN_POSITIVE))
    }

    /// The A-inverse `S = lift(M⁻¹)` with `A T S = A S T = A`.
    pub fn a_inverse(&self) -> Result<Self> {
        let m = self.compress()?;
        let (sigma_min, _) = smallest_singular_pair(m)?;
        let sigma_max = spectral_norm(m)?;
        if sigma_min <= self.space.tol() * sigma_max || sigma_max == 0.0 {
            return Err(Error::NotAInvertible { sigma_min });
        }
        let inv = m.inverse().map_err(|_| Error::NotAInvertible { sigma_min })?;
        lift(&self.space, &inv)
    }

    /// `(‖A T S − A‖_F, ‖A S T − A‖_F)`.
    pub fn a_inverse_residuals(&self, s: &Self) -> (f64, f64) {
        let a = self.space.weight();
        let ats = &(&(a * &self.t) * &s.t) - a;
        let ast = &(&(a * &s.t) * &self.t) - a;
        (ats.frobenius_norm(), ast.frobenius_norm())
    }
}

/// The unique `T` with `R(T) ⊆ R(A)` whose compression is `m`:
/// `T = Q Λ^{−1/2} M Λ^{1/2} Q*`.
pub fn lift(space: &Arc<SemiHilbertSpace>, m: &ComplexMatrix) -> Result<SemiHilbertOperator> {
    let r = space.rank();
    if m.rows() != r || m.cols() != r {
        return Err(Error::dims(format!("{r}x{r}"), format!("{}x{}", m.rows(), m.cols())));
    }
    let left = space.scaled_q(|l| 1.0 / l.sqrt());
    let right = space.scaled_q(f64::sqrt).adjoint();
    SemiHilbertOperator::new(space.clone(), &(&left * m) * &right)
}
