//! Minkowski norms on a single two-dimensional tangent space.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};

/// Jet type used for every derivative computation in the crate: seeds are
/// `(x¹, x², v¹, v²)`.
pub type Jet4 = Jet<4>;

/// Vectors shorter than this are treated as zero.
pub const ZERO_VECTOR_EPS: f64 = 1e-12;

/// A user supplied norm. Implementations evaluate `F(v)` on jets so that
/// gradients and Hessians follow by forward-mode differentiation.
pub trait CustomNorm: Send + Sync {
    fn eval(&self, v: [Jet4; 2]) -> Jet4;
    fn name(&self) -> &str {
        "custom"
    }
}

/// Scalars a norm can be evaluated on: plain values or [`Jet4`].
pub trait EvalScalar: Scalar {
    fn lift(self) -> Jet4;
    fn lower(j: Jet4) -> Self;
}

impl EvalScalar for f64 {
    fn lift(self) -> Jet4 {
        Jet4::constant(self)
    }
    fn lower(j: Jet4) -> Self {
        j.v
    }
}

impl EvalScalar for Jet4 {
    fn lift(self) -> Jet4 {
        self
    }
    fn lower(j: Jet4) -> Self {
        j
    }
}

#[derive(Clone)]
pub enum NormFamily {
    Euclidean,
    Riemannian(Matrix2<f64>),
    /// `F(v) = sqrt(vᵀ A v) + b·v`
    Randers {
        a: Matrix2<f64>,
        b: Vector2<f64>,
    },
    Custom(Arc<dyn CustomNorm>),
}

impl fmt::Debug for NormFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Euclidean => write!(f, "Euclidean"),
            Self::Riemannian(a) => write!(f, "Riemannian({a:?})"),
            Self::Randers { a, b } => write!(f, "Randers {{ a: {a:?}, b: {b:?} }}"),
            Self::Custom(c) => write!(f, "Custom({})", c.name()),
        }
    }
}

/// A strongly convex, positively homogeneous norm on `ℝ²`.
#[derive(Debug, Clone)]
pub struct MinkowskiNorm {
    family: NormFamily,
}

pub(crate) fn check_spd(a: &Matrix2<f64>) -> Result<()> {
    if (a[(0, 1)] - a[(1, 0)]).abs() > 1e-12 * a.norm() {
        return Err(Error::InvalidNorm("matrix is not symmetric".into()));
    }
    if !(a[(0, 0)] > 0.0 && a.determinant() > 0.0) {
        return Err(Error::InvalidNorm("matrix is not positive definite".into()));
    }
    Ok(())
}

/// `sqrt(bᵀ A⁻¹ b)`, the dual length of `b`.
pub(crate) fn dual_length(a: &Matrix2<f64>, b: &Vector2<f64>) -> f64 {
    let inv = a.try_inverse().expect("checked positive definite");
    (b.transpose() * inv * b)[(0, 0)].sqrt()
}

pub(crate) fn check_randers(a: &Matrix2<f64>, b: &Vector2<f64>) -> Result<()> {
    check_spd(a)?;
    let nb = dual_length(a, b);
    if !(nb < 1.0 - 1e-9) {
        return Err(Error::InvalidNorm(format!(
            "Randers drift has A-norm {nb}, must be below 1"
        )));
    }
    Ok(())
}

/// Evaluates `sqrt(vᵀ A v)` on any scalar.
pub(crate) fn quad_form<S: Scalar>(a: &Matrix2<f64>, v: &[S; 2]) -> S {
    v[0] * v[0] * a[(0, 0)] + v[0] * v[1] * (2.0 * a[(0, 1)]) + v[1] * v[1] * a[(1, 1)]
}

impl MinkowskiNorm {
    pub fn euclidean() -> Self {
        Self {
            family: NormFamily::Euclidean,
        }
    }

    pub fn riemannian(a: Matrix2<f64>) -> Result<Self> {
        check_spd(&a)?;
        Ok(Self {
            family: NormFamily::Riemannian(a),
        })
    }

    pub fn randers(a: Matrix2<f64>, b: Vector2<f64>) -> Result<Self> {
        check_randers(&a, &b)?;
        Ok(Self {
            family: NormFamily::Randers { a, b },
        })
    }

    pub fn custom(c: Arc<dyn CustomNorm>) -> Self {
        Self {
            family: NormFamily::Custom(c),
        }
    }

    pub fn family(&self) -> &NormFamily {
        &self.family
    }

    pub fn is_reversible(&self) -> bool {
        match &self.family {
            NormFamily::Randers { b, .. } => b.norm() == 0.0,
            NormFamily::Custom(_) => false,
            _ => true,
        }
    }

    /// Generic evaluation used by both the value and the derivative paths.
    pub fn eval_generic<S: EvalScalar>(&self, v: [S; 2]) -> S {
        match &self.family {
            NormFamily::Euclidean => (v[0] * v[0] + v[1] * v[1]).sqrt(),
            NormFamily::Riemannian(a) => quad_form(a, &v).sqrt(),
            NormFamily::Randers { a, b } => quad_form(a, &v).sqrt() + v[0] * b[0] + v[1] * b[1],
            NormFamily::Custom(c) => S::lower(c.eval([v[0].lift(), v[1].lift()])),
        }
    }

    /// `F(v)`.
    pub fn evaluate(&self, v: &Vector2<f64>) -> Result<f64> {
        check_finite(v)?;
        if v.norm() == 0.0 {
            return Ok(0.0);
        }
        Ok(self.eval_generic([v[0], v[1]]))
    }

    /// `(g_ij(v)) = ½ ∂²(F²)/∂vⁱ∂vʲ`.
    pub fn fundamental_tensor(&self, v: &Vector2<f64>) -> Result<FundamentalTensor> {
        check_nonzero(v)?;
        let vj = [Jet4::variable(v[0], 2), Jet4::variable(v[1], 3)];
        let f = self.eval_generic(vj);
        let e = f * f * 0.5;
        let g = Matrix2::new(e.h[2][2], e.h[2][3], e.h[3][2], e.h[3][3]);
        FundamentalTensor::new(g, *v)
    }
}

pub(crate) fn check_finite(v: &Vector2<f64>) -> Result<()> {
    if !(v[0].is_finite() && v[1].is_finite()) {
        return Err(Error::InvalidVector(format!(
            "non-finite component in {v:?}"
        )));
    }
    Ok(())
}

pub(crate) fn check_nonzero(v: &Vector2<f64>) -> Result<()> {
    check_finite(v)?;
    if v.norm() <= ZERO_VECTOR_EPS {
        return Err(Error::NormNotSmoothAtZero);
    }
    Ok(())
}

/// The inner product `g_v` on the tangent space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalTensor {
    pub matrix: Matrix2<f64>,
    pub reference: Vector2<f64>,
}

impl FundamentalTensor {
    pub(crate) fn new(mut g: Matrix2<f64>, reference: Vector2<f64>) -> Result<Self> {
        let off = 0.5 * (g[(0, 1)] + g[(1, 0)]);
        g[(0, 1)] = off;
        g[(1, 0)] = off;
        let tr = g.trace();
        let det = g.determinant();
        let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
        let min_eig = 0.5 * tr - disc;
        if !(min_eig > 1e-12 * tr.abs().max(1e-300)) {
            return Err(Error::StrongConvexityViolated(min_eig));
        }
        Ok(Self {
            matrix: g,
            reference,
        })
    }

    pub fn inner(&self, a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
        (a.transpose() * self.matrix * b)[(0, 0)]
    }

    pub fn norm_sq(&self, a: &Vector2<f64>) -> f64 {
        self.inner(a, a)
    }
}
