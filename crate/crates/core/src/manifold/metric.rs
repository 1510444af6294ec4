//! Position-dependent Finsler metrics `F(x, v)` on a chart, and the derived
//! spray and fundamental tensor.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::jet::Scalar;
use crate::model_surface::ModelSurface;
use crate::norms::{
    check_randers, quad_form, CustomNorm, EvalScalar, FundamentalTensor, Jet4, MinkowskiNorm,
    NormFamily,
};

/// A user supplied metric evaluated on jets in both position and velocity.
pub trait CustomMetric: Send + Sync {
    fn eval(&self, x: [Jet4; 2], v: [Jet4; 2]) -> Jet4;
    fn name(&self) -> &str {
        "custom"
    }
}

#[derive(Clone)]
pub enum MetricField {
    /// The same norm at every point (locally Minkowski).
    Constant(MinkowskiNorm),
    /// `e^{a|x|²/2} |v|`, a Riemannian metric with Gauss curvature `−2a e^{−a|x|²}`.
    Conformal {
        a: f64,
    },
    /// `sqrt(vᵀ A v) + b(x)·v` with `b(x) = b0 + B x`.
    RandersAffine {
        a: Matrix2<f64>,
        b0: Vector2<f64>,
        b_lin: Matrix2<f64>,
    },
    /// `sqrt(v_t² + f(t)² v_θ²)` in polar coordinates `(t, θ)`.
    Revolution(Arc<ModelSurface>),
    /// `F² = r²(1 − ε a² b⁴ / r⁶)` with `a = v_t`, `b = f(t) v_θ`, `r² = a² + b²`:
    /// a non-Riemannian deformation of a surface of revolution that leaves
    /// radial and purely angular directions unchanged.
    RevolutionPerturbed {
        surface: Arc<ModelSurface>,
        eps: f64,
    },
    Custom(Arc<dyn CustomMetric>),
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(n) => write!(f, "Constant({:?})", n.family()),
            Self::Conformal { a } => write!(f, "Conformal {{ a: {a} }}"),
            Self::RandersAffine { a, b0, b_lin } => {
                write!(
                    f,
                    "RandersAffine {{ a: {a:?}, b0: {b0:?}, b_lin: {b_lin:?} }}"
                )
            }
            Self::Revolution(s) => write!(f, "Revolution({})", s.curvature_fn()),
            Self::RevolutionPerturbed { surface, eps } => {
                write!(f, "RevolutionPerturbed({}, {eps})", surface.curvature_fn())
            }
            Self::Custom(c) => write!(f, "Custom({})", c.name()),
        }
    }
}

fn profile<S: Scalar>(surface: &ModelSurface, t: S) -> S {
    let [f, df, ddf] = surface.derivs(t.value());
    t.chain(f, df, ddf)
}

impl MetricField {
    pub fn randers_affine(a: Matrix2<f64>, b0: Vector2<f64>, b_lin: Matrix2<f64>) -> Result<Self> {
        check_randers(&a, &b0)?;
        Ok(Self::RandersAffine { a, b0, b_lin })
    }

    pub fn revolution(surface: ModelSurface) -> Self {
        Self::Revolution(Arc::new(surface))
    }

    /// Whether the metric uses polar coordinates around a pole.
    pub fn is_polar(&self) -> bool {
        matches!(self, Self::Revolution(_) | Self::RevolutionPerturbed { .. })
    }

    pub fn is_reversible(&self) -> bool {
        match self {
            Self::Constant(n) => n.is_reversible(),
            Self::RandersAffine { b0, b_lin, .. } => b0.norm() == 0.0 && b_lin.norm() == 0.0,
            Self::Custom(_) => false,
            _ => true,
        }
    }

    pub fn is_riemannian(&self) -> bool {
        match self {
            Self::Constant(n) => match n.family() {
                NormFamily::Euclidean | NormFamily::Riemannian(_) => true,
                NormFamily::Randers { b, .. } => b.norm() == 0.0,
                NormFamily::Custom(_) => false,
            },
            Self::Conformal { .. } | Self::Revolution(_) => true,
            Self::RandersAffine { b0, b_lin, .. } => b0.norm() == 0.0 && b_lin.norm() == 0.0,
            _ => false,
        }
    }

    pub fn surface(&self) -> Option<&ModelSurface> {
        match self {
            Self::Revolution(s) | Self::RevolutionPerturbed { surface: s, .. } => Some(s),
            _ => None,
        }
    }

    pub fn eval_generic<S: EvalScalar>(&self, x: [S; 2], v: [S; 2]) -> S {
        match self {
            Self::Constant(n) => n.eval_generic(v),
            Self::Conformal { a } => {
                ((x[0] * x[0] + x[1] * x[1]) * (0.5 * a)).exp() * (v[0] * v[0] + v[1] * v[1]).sqrt()
            }
            Self::RandersAffine { a, b0, b_lin } => {
                let b1 = x[0] * b_lin[(0, 0)] + x[1] * b_lin[(0, 1)] + b0[0];
                let b2 = x[0] * b_lin[(1, 0)] + x[1] * b_lin[(1, 1)] + b0[1];
                quad_form(a, &v).sqrt() + b1 * v[0] + b2 * v[1]
            }
            Self::Revolution(s) => {
                let f = profile(s, x[0]);
                (v[0] * v[0] + f * f * v[1] * v[1]).sqrt()
            }
            Self::RevolutionPerturbed { surface, eps } => {
                let f = profile(surface, x[0]);
                let a2 = v[0] * v[0];
                let b = f * v[1];
                let b2 = b * b;
                let r2 = a2 + b2;
                (r2 - a2 * b2 * b2 * *eps / (r2 * r2)).sqrt()
            }
            Self::Custom(c) => {
                S::lower(c.eval([x[0].lift(), x[1].lift()], [v[0].lift(), v[1].lift()]))
            }
        }
    }

    /// `F(x, v)`; zero at `v = 0`.
    pub fn value(&self, x: &Vector2<f64>, v: &Vector2<f64>) -> f64 {
        if v[0] == 0.0 && v[1] == 0.0 {
            return 0.0;
        }
        self.eval_generic([x[0], x[1]], [v[0], v[1]])
    }

    /// `½F²` as a jet in `(x¹, x², v¹, v²)`.
    pub fn lagrangian(&self, x: &Vector2<f64>, v: &Vector2<f64>) -> Jet4 {
        let f = self.eval_generic(
            [Jet4::variable(x[0], 0), Jet4::variable(x[1], 1)],
            [Jet4::variable(v[0], 2), Jet4::variable(v[1], 3)],
        );
        f * f * 0.5
    }

    pub fn fundamental_tensor(
        &self,
        x: &Vector2<f64>,
        v: &Vector2<f64>,
    ) -> Result<FundamentalTensor> {
        crate::norms::check_nonzero(v)?;
        let l = self.lagrangian(x, v);
        FundamentalTensor::new(Matrix2::new(l.h[2][2], l.h[2][3], l.h[3][2], l.h[3][3]), *v)
    }

    /// Spray coefficients `G(x, v)`: geodesics satisfy `ẍ + 2G(x, ẋ) = 0`.
    pub fn spray(&self, x: &Vector2<f64>, v: &Vector2<f64>) -> Result<Vector2<f64>> {
        crate::norms::check_nonzero(v)?;
        let l = self.lagrangian(x, v);
        let g = Matrix2::new(l.h[2][2], l.h[2][3], l.h[3][2], l.h[3][3]);
        let mut rhs = Vector2::zeros();
        for i in 0..2 {
            rhs[i] = l.h[2 + i][0] * v[0] + l.h[2 + i][1] * v[1] - l.g[i];
        }
        let inv = g
            .try_inverse()
            .ok_or(Error::StrongConvexityViolated(g.determinant()))?;
        Ok(inv * rhs * 0.5)
    }

    /// The norm on the tangent space at `x`.
    pub fn norm_at(self: &Arc<Self>, x: Vector2<f64>) -> MinkowskiNorm {
        match self.as_ref() {
            Self::Constant(n) => n.clone(),
            _ => MinkowskiNorm::custom(Arc::new(Frozen {
                field: self.clone(),
                x,
            })),
        }
    }
}

struct Frozen {
    field: Arc<MetricField>,
    x: Vector2<f64>,
}

impl CustomNorm for Frozen {
    fn eval(&self, v: [Jet4; 2]) -> Jet4 {
        self.field
            .eval_generic([Jet4::constant(self.x[0]), Jet4::constant(self.x[1])], v)
    }
    fn name(&self) -> &str {
        "frozen metric"
    }
}
