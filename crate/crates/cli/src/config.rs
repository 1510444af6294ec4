//! Flat `key = value` experiment files with dotted section names.
//!
//! ```text
//! # comments start with '#'
//! suite = tct
//! seed = 7
//! sample_count = 20
//! model.profile = gauss_tanh
//! manifold.family = model
//! ```

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::str::FromStr;

use nalgebra::{Matrix2, Vector2};

use ftct_core::model_surface::{ClosedForm, Curvature, ProfileSpec};
use ftct_core::tct::TctMode;

use crate::error::ConfigError;

const KEYS: &[&str] = &[
    "suite",
    "seed",
    "sample_count",
    "output_path",
    "model.profile",
    "model.curvature",
    "model.t_max",
    "manifold.family",
    "manifold.profile",
    "manifold.curvature",
    "manifold.t_max",
    "manifold.eps",
    "manifold.a",
    "manifold.b",
    "manifold.b_lin",
    "manifold.conformal",
    "manifold.radius",
    "manifold.base",
    "tolerances.profile",
    "tolerances.g0",
    "tolerances.curvature",
    "tolerances.tangent",
    "tolerances.angle",
    "tolerances.angle_sum",
    "tolerances.key_lemma",
    "tolerances.index_gap",
    "tolerances.double_triangle",
    "tolerances.convexity",
    "tolerances.reverse",
    "tolerances.radial",
    "key_lemma.delta",
    "key_lemma.omega",
    "key_lemma.l",
    "key_lemma.epsilon",
    "key_lemma.theta_floor",
    "key_lemma.x",
    "key_lemma.direction",
    "tct.mode",
    "tct.delta",
    "tct.r_max",
    "tct.margin",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Profile,
    Curvature,
    Angles,
    KeyLemma,
    DoubleTriangle,
    Tct,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Profile => "profile",
            Self::Curvature => "curvature",
            Self::Angles => "angles",
            Self::KeyLemma => "key_lemma",
            Self::DoubleTriangle => "double_triangle",
            Self::Tct => "tct",
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "profile" => Self::Profile,
            "curvature" => Self::Curvature,
            "angles" => Self::Angles,
            "key_lemma" => Self::KeyLemma,
            "double_triangle" => Self::DoubleTriangle,
            "tct" => Self::Tct,
            _ => return Err(format!("unknown suite `{s}`")),
        })
    }
}

/// A profile together with its truncation radius.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceConfig {
    pub spec: ProfileSpec,
    pub t_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ManifoldConfig {
    /// The polar chart of the model surface itself.
    Model,
    Revolution(SurfaceConfig),
    PerturbedRevolution {
        surface: SurfaceConfig,
        eps: f64,
    },
    /// `sqrt(vᵀ A v) + (b + B x)·v` on the box `(−radius, radius)²`;
    /// `b = 0`, `B = 0` gives a Riemannian metric and `A = I` the Euclidean one.
    Randers {
        a: Matrix2<f64>,
        b: Vector2<f64>,
        b_lin: Matrix2<f64>,
        radius: f64,
        base: Vector2<f64>,
    },
    Conformal {
        a: f64,
        radius: f64,
        base: Vector2<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Residual of `f'' + G f = 0` along the profile.
    pub profile: f64,
    /// Distance of the extrapolated `G(0⁺)` from its exact value.
    pub g0: f64,
    pub curvature: f64,
    pub tangent: f64,
    pub angle: f64,
    pub angle_sum: f64,
    pub key_lemma: f64,
    pub index_gap: f64,
    pub double_triangle: f64,
    pub convexity: f64,
    pub reverse: f64,
    pub radial: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            profile: 1e-8,
            g0: 1e-4,
            curvature: 1e-4,
            tangent: 1e-6,
            angle: 5e-4,
            angle_sum: 1e-5,
            key_lemma: 1e-7,
            index_gap: 1e-6,
            double_triangle: 1e-6,
            convexity: 1e-6,
            reverse: 1e-6,
            radial: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyLemmaConfig {
    pub delta: f64,
    pub omega: f64,
    pub l: f64,
    pub epsilon: f64,
    pub theta_floor: Option<f64>,
    /// Start point and direction of the variation; derived from `l` and `omega` on polar charts.
    pub x: Option<Vector2<f64>>,
    pub direction: Option<Vector2<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TctConfig {
    pub mode: TctMode,
    pub r_max: Option<f64>,
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub suite: Suite,
    pub seed: u64,
    pub sample_count: usize,
    pub output_path: String,
    pub model: SurfaceConfig,
    pub manifold: ManifoldConfig,
    pub tolerances: Tolerances,
    pub key_lemma: KeyLemmaConfig,
    pub tct: TctConfig,
}

struct Entries(BTreeMap<String, (usize, String)>);

fn line_err(line: usize, msg: impl Into<String>) -> ConfigError {
    ConfigError::Line {
        line,
        msg: msg.into(),
    }
}

impl Entries {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(line_err(
                    line,
                    format!("expected `key = value`, got `{content}`"),
                ));
            };
            let key = key.trim();
            let value = value.trim().trim_matches('"');
            if !KEYS.contains(&key) {
                return Err(line_err(line, format!("unknown key `{key}`")));
            }
            if value.is_empty() {
                return Err(line_err(line, format!("empty value for `{key}`")));
            }
            if let Some((first, _)) = map.insert(key.to_string(), (line, value.to_string())) {
                return Err(line_err(
                    line,
                    format!("duplicate key `{key}` (first set on line {first})"),
                ));
            }
        }
        Ok(Self(map))
    }

    fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.0.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        let Some((line, v)) = self.raw(key) else {
            return Ok(None);
        };
        v.parse()
            .map(Some)
            .map_err(|_| line_err(line, format!("cannot parse `{v}` for `{key}`")))
    }

    fn number(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        let Some((line, v)) = self.raw(key) else {
            return Ok(None);
        };
        parse_number(v)
            .filter(|x| x.is_finite())
            .map(Some)
            .ok_or_else(|| line_err(line, format!("`{key}` must be a finite number, got `{v}`")))
    }

    fn positive(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        let v = self.number(key)?;
        match v {
            Some(x) if x <= 0.0 => Err(line_err(
                self.raw(key).unwrap().0,
                format!("`{key}` must be positive"),
            )),
            _ => Ok(v),
        }
    }

    fn numbers<const N: usize>(&self, key: &str) -> Result<Option<[f64; N]>, ConfigError> {
        let Some((line, v)) = self.raw(key) else {
            return Ok(None);
        };
        let parts: Option<Vec<f64>> = v.split(',').map(|p| parse_number(p.trim())).collect();
        match parts {
            Some(p) if p.len() == N && p.iter().all(|x| x.is_finite()) => {
                Ok(Some(p.try_into().unwrap()))
            }
            _ => Err(line_err(
                line,
                format!("`{key}` needs {N} comma-separated numbers, got `{v}`"),
            )),
        }
    }

    /// Missing keys are taken from `default`.
    fn surface(
        &self,
        section: &str,
        default: &SurfaceConfig,
    ) -> Result<SurfaceConfig, ConfigError> {
        let profile = self.raw(&format!("{section}.profile"));
        let curvature = self.raw(&format!("{section}.curvature"));
        let spec = match (profile, curvature) {
            (Some(_), Some((line, _))) => {
                return Err(line_err(
                    line,
                    format!("`{section}.profile` and `{section}.curvature` are exclusive"),
                ))
            }
            (Some((line, v)), None) => ProfileSpec::ClosedForm(
                ClosedForm::parse(v)
                    .ok_or_else(|| line_err(line, format!("unknown closed-form profile `{v}`")))?,
            ),
            (None, Some((line, v))) => ProfileSpec::Curvature(
                Curvature::parse(v)
                    .ok_or_else(|| line_err(line, format!("cannot parse curvature `{v}`")))?,
            ),
            (None, None) => default.spec.clone(),
        };
        let t_max = self
            .positive(&format!("{section}.t_max"))?
            .unwrap_or(default.t_max);
        Ok(SurfaceConfig { spec, t_max })
    }
}

/// Accepts plain numbers and the forms `pi`, `pi/k`, `a*pi` and `a*pi/k`.
fn parse_number(s: &str) -> Option<f64> {
    if let Ok(x) = s.parse() {
        return Some(x);
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().ok()?),
        None => (s, 1.0),
    };
    let factor = match num.strip_suffix("pi") {
        Some("") => 1.0,
        Some(a) => a.trim().strip_suffix('*')?.trim().parse().ok()?,
        None => return None,
    };
    Some(factor * PI / den)
}

fn matrix(m: [f64; 4]) -> Matrix2<f64> {
    Matrix2::new(m[0], m[1], m[2], m[3])
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let e = Entries::parse(text)?;
        let suite = match e.raw("suite") {
            Some((line, v)) => v.parse().map_err(|m: String| line_err(line, m))?,
            None => return Err(ConfigError::Missing("suite".into())),
        };
        let sample_count: usize = e.get("sample_count")?.unwrap_or(20);
        if sample_count == 0 {
            return Err(line_err(
                e.raw("sample_count").unwrap().0,
                "`sample_count` must be at least 1",
            ));
        }

        let default_model = SurfaceConfig {
            spec: ProfileSpec::ClosedForm(ClosedForm::GaussTanh),
            t_max: 3.0,
        };
        let model = e.surface("model", &default_model)?;

        let radius = e.positive("manifold.radius")?.unwrap_or(2.0);
        let base = e
            .numbers::<2>("manifold.base")?
            .map(Vector2::from)
            .unwrap_or_else(Vector2::zeros);
        let family = e.raw("manifold.family").map(|(l, v)| (l, v.to_string()));
        let manifold = match family.as_ref().map(|(l, v)| (*l, v.as_str())) {
            None | Some((_, "model")) => ManifoldConfig::Model,
            Some((_, "revolution")) => ManifoldConfig::Revolution(e.surface("manifold", &model)?),
            Some((line, "perturbed_revolution")) => ManifoldConfig::PerturbedRevolution {
                surface: e.surface("manifold", &model)?,
                eps: e
                    .number("manifold.eps")?
                    .ok_or_else(|| line_err(line, "perturbed_revolution needs `manifold.eps`"))?,
            },
            Some((_, "euclidean")) => ManifoldConfig::Randers {
                a: Matrix2::identity(),
                b: Vector2::zeros(),
                b_lin: Matrix2::zeros(),
                radius,
                base,
            },
            Some((line, fam @ ("riemannian" | "randers" | "randers_affine"))) => {
                let a = e
                    .numbers::<4>("manifold.a")?
                    .map(matrix)
                    .unwrap_or_else(Matrix2::identity);
                let b = e
                    .numbers::<2>("manifold.b")?
                    .map(Vector2::from)
                    .unwrap_or_else(Vector2::zeros);
                let b_lin = e
                    .numbers::<4>("manifold.b_lin")?
                    .map(matrix)
                    .unwrap_or_else(Matrix2::zeros);
                if fam == "riemannian"
                    && (e.raw("manifold.b").is_some() || e.raw("manifold.b_lin").is_some())
                {
                    return Err(line_err(
                        line,
                        "a riemannian manifold takes no `manifold.b` or `manifold.b_lin`",
                    ));
                }
                if fam == "randers" && e.raw("manifold.b_lin").is_some() {
                    return Err(line_err(
                        line,
                        "use `randers_affine` for a position-dependent drift",
                    ));
                }
                ManifoldConfig::Randers {
                    a,
                    b,
                    b_lin,
                    radius,
                    base,
                }
            }
            Some((line, "conformal")) => ManifoldConfig::Conformal {
                a: e.number("manifold.conformal")?
                    .ok_or_else(|| line_err(line, "conformal needs `manifold.conformal`"))?,
                radius,
                base,
            },
            Some((line, other)) => {
                return Err(line_err(line, format!("unknown manifold family `{other}`")))
            }
        };

        let d = Tolerances::default();
        let tol = |k: &str, dv: f64| -> Result<f64, ConfigError> {
            Ok(e.positive(&format!("tolerances.{k}"))?.unwrap_or(dv))
        };
        let tolerances = Tolerances {
            profile: tol("profile", d.profile)?,
            g0: tol("g0", d.g0)?,
            curvature: tol("curvature", d.curvature)?,
            tangent: tol("tangent", d.tangent)?,
            angle: tol("angle", d.angle)?,
            angle_sum: tol("angle_sum", d.angle_sum)?,
            key_lemma: tol("key_lemma", d.key_lemma)?,
            index_gap: tol("index_gap", d.index_gap)?,
            double_triangle: tol("double_triangle", d.double_triangle)?,
            convexity: tol("convexity", d.convexity)?,
            reverse: tol("reverse", d.reverse)?,
            radial: tol("radial", d.radial)?,
        };

        let key_lemma = KeyLemmaConfig {
            delta: e.positive("key_lemma.delta")?.unwrap_or(0.05),
            omega: e.positive("key_lemma.omega")?.unwrap_or(PI / 3.0),
            l: e.positive("key_lemma.l")?.unwrap_or(1.2),
            epsilon: e.positive("key_lemma.epsilon")?.unwrap_or(0.1),
            theta_floor: e.positive("key_lemma.theta_floor")?,
            x: e.numbers::<2>("key_lemma.x")?.map(Vector2::from),
            direction: e.numbers::<2>("key_lemma.direction")?.map(Vector2::from),
        };

        let mode = match e.raw("tct.mode") {
            None | Some((_, "exact")) => TctMode::Exact,
            Some((line, "weak")) => TctMode::Weak(
                e.positive("tct.delta")?
                    .ok_or_else(|| line_err(line, "weak mode needs `tct.delta`"))?,
            ),
            Some((line, other)) => {
                return Err(line_err(line, format!("unknown tct mode `{other}`")))
            }
        };
        let tct = TctConfig {
            mode,
            r_max: e.positive("tct.r_max")?,
            margin: e.positive("tct.margin")?,
        };

        Ok(Self {
            suite,
            seed: e.get("seed")?.unwrap_or(0),
            sample_count,
            output_path: e
                .get("output_path")?
                .unwrap_or_else(|| format!("{}.csv", suite.name())),
            model,
            manifold,
            tolerances,
            key_lemma,
            tct,
        })
    }
}
