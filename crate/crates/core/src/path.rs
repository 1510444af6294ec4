//! Sampled geodesic paths.

use nalgebra::Vector2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample {
    /// Forward arclength from the start.
    pub s: f64,
    pub x: Vector2<f64>,
    /// Unit-speed velocity `dx/ds`.
    pub v: Vector2<f64>,
}

/// A unit-speed geodesic stored as samples `(s, x, ẋ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicPath {
    pub samples: Vec<PathSample>,
    pub forward_length: f64,
    /// `∫ F(−ċ) ds` over the path; equals the forward length for reversible metrics.
    pub reverse_length: f64,
}

impl GeodesicPath {
    pub fn start(&self) -> &PathSample {
        &self.samples[0]
    }

    pub fn end(&self) -> &PathSample {
        self.samples.last().unwrap()
    }

    /// A path of zero length sitting at `x`.
    pub fn constant(x: Vector2<f64>, v: Vector2<f64>) -> Self {
        Self {
            samples: vec![PathSample { s: 0.0, x, v }],
            forward_length: 0.0,
            reverse_length: 0.0,
        }
    }

    /// Cubic Hermite interpolation of position (and its derivative) at arclength `s`.
    pub fn point_at(&self, s: f64) -> (Vector2<f64>, Vector2<f64>) {
        let n = self.samples.len();
        if n == 1 {
            return (self.samples[0].x, self.samples[0].v);
        }
        let s = s.clamp(0.0, self.samples[n - 1].s);
        let i = self
            .samples
            .partition_point(|p| p.s <= s)
            .saturating_sub(1)
            .min(n - 2);
        let (a, b) = (&self.samples[i], &self.samples[i + 1]);
        let h = b.s - a.s;
        if h <= 0.0 {
            return (a.x, a.v);
        }
        let u = (s - a.s) / h;
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        let x = a.x * h00 + a.v * (h * h10) + b.x * h01 + b.v * (h * h11);
        let d00 = 6.0 * u2 - 6.0 * u;
        let d10 = 3.0 * u2 - 4.0 * u + 1.0;
        let d01 = -6.0 * u2 + 6.0 * u;
        let d11 = 3.0 * u2 - 2.0 * u;
        let v = (a.x * d00 + b.x * d01) / h + a.v * d10 + b.v * d11;
        (x, v)
    }

    /// The same curve traversed backwards, `c̄(s) = c(L − s)`.
    ///
    /// Forward and reverse lengths swap; velocities are negated.
    pub fn reversed(&self) -> Self {
        let l = self.forward_length;
        let samples = self
            .samples
            .iter()
            .rev()
            .map(|p| PathSample {
                s: l - p.s,
                x: p.x,
                v: -p.v,
            })
            .collect();
        Self {
            samples,
            forward_length: self.reverse_length,
            reverse_length: self.forward_length,
        }
    }
}
