use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;

/// Boundary tolerance used when deciding whether a point sits on a shape.
pub const BOUNDARY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ShapeSpec {
    Rectangle {
        center: Vec2,
        width: f64,
        height: f64,
        /// Counter-clockwise rotation of the width axis, radians.
        rotation: f64,
    },
    Circle {
        center: Vec2,
        radius: f64,
    },
}

/// Axis-aligned rectangle `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vec2,
    pub max: Vec2,
}

impl Aabb {
    pub fn new(min: Vec2, max: Vec2) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn contains_box(&self, other: &Aabb) -> bool {
        self.contains(other.min) && self.contains(other.max)
    }

    pub fn expanded(&self, margin: f64) -> Aabb {
        Aabb::new(
            self.min - Vec2::new(margin, margin),
            self.max + Vec2::new(margin, margin),
        )
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    /// Slab test: the parameter interval `[t_enter, t_exit]` over which
    /// `origin + t * dir` lies in the box, if any.
    pub fn ray_interval(&self, origin: Vec2, dir: Vec2) -> Option<(f64, f64)> {
        let mut t0 = f64::NEG_INFINITY;
        let mut t1 = f64::INFINITY;
        for (o, d, lo, hi) in [
            (origin.x, dir.x, self.min.x, self.max.x),
            (origin.y, dir.y, self.min.y, self.max.y),
        ] {
            if d.abs() < 1e-300 {
                if o < lo || o > hi {
                    return None;
                }
            } else {
                let a = (lo - o) / d;
                let b = (hi - o) / d;
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                t0 = t0.max(a);
                t1 = t1.min(b);
            }
        }
        (t0 <= t1).then_some((t0, t1))
    }
}

impl ShapeSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ShapeSpec::Rectangle {
                center,
                width,
                height,
                rotation,
            } => {
                if !(center.is_finite() && rotation.is_finite()) {
                    return Err(Error::validation("rectangle center/rotation must be finite"));
                }
                if !(width > 0.0 && width.is_finite()) {
                    return Err(Error::validation(format!(
                        "rectangle width must be > 0, got {width}"
                    )));
                }
                if !(height > 0.0 && height.is_finite()) {
                    return Err(Error::validation(format!(
                        "rectangle height must be > 0, got {height}"
                    )));
                }
            }
            ShapeSpec::Circle { center, radius } => {
                if !center.is_finite() {
                    return Err(Error::validation("circle center must be finite"));
                }
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(Error::validation(format!(
                        "circle radius must be > 0, got {radius}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn center(&self) -> Vec2 {
        match *self {
            ShapeSpec::Rectangle { center, .. } | ShapeSpec::Circle { center, .. } => center,
        }
    }

    /// Negative inside, zero on the boundary, positive outside.
    pub fn signed_distance(&self, p: Vec2) -> f64 {
        match *self {
            ShapeSpec::Rectangle {
                center,
                width,
                height,
                rotation,
            } => {
                let local = (p - center).rotate(-rotation);
                let qx = local.x.abs() - width / 2.0;
                let qy = local.y.abs() - height / 2.0;
                let outside = Vec2::new(qx.max(0.0), qy.max(0.0)).norm();
                outside + qx.max(qy).min(0.0)
            }
            ShapeSpec::Circle { center, radius } => p.dist(center) - radius,
        }
    }

    pub fn contains_strict(&self, p: Vec2) -> bool {
        self.signed_distance(p) < -BOUNDARY_TOL
    }

    pub fn bounding_box(&self) -> Aabb {
        match *self {
            ShapeSpec::Rectangle {
                center,
                width,
                height,
                rotation,
            } => {
                let (s, c) = rotation.sin_cos();
                let ex = (c * width / 2.0).abs() + (s * height / 2.0).abs();
                let ey = (s * width / 2.0).abs() + (c * height / 2.0).abs();
                Aabb::new(center - Vec2::new(ex, ey), center + Vec2::new(ex, ey))
            }
            ShapeSpec::Circle { center, radius } => Aabb::new(
                center - Vec2::new(radius, radius),
                center + Vec2::new(radius, radius),
            ),
        }
    }

    /// Smallest `t >= 0` with `origin + t * dir` on the boundary, entering
    /// from outside. `dir` must be a unit vector.
    pub fn ray_entry(&self, origin: Vec2, dir: Vec2) -> Option<f64> {
        match *self {
            ShapeSpec::Rectangle {
                center,
                width,
                height,
                rotation,
            } => {
                let o = (origin - center).rotate(-rotation);
                let d = dir.rotate(-rotation);
                let half = Vec2::new(width / 2.0, height / 2.0);
                let (t0, t1) = Aabb::new(-half, half).ray_interval(o, d)?;
                (t1 >= 0.0 && t0 >= 0.0).then_some(t0)
            }
            ShapeSpec::Circle { center, radius } => {
                let oc = origin - center;
                let b = oc.dot(dir);
                let disc = b * b - (oc.norm_sq() - radius * radius);
                if disc < 0.0 {
                    return None;
                }
                let t = -b - disc.sqrt();
                (t >= 0.0).then_some(t)
            }
        }
    }

    /// Whether the closed segment `a..b` passes through the open interior.
    pub fn segment_hits_interior(&self, a: Vec2, b: Vec2) -> bool {
        match *self {
            ShapeSpec::Circle { center, radius } => {
                let ab = b - a;
                let len_sq = ab.norm_sq();
                let t = if len_sq > 0.0 {
                    ((center - a).dot(ab) / len_sq).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                (a + ab * t).dist(center) < radius - BOUNDARY_TOL
            }
            ShapeSpec::Rectangle {
                center,
                width,
                height,
                rotation,
            } => {
                let la = (a - center).rotate(-rotation);
                let lb = (b - center).rotate(-rotation);
                let half = Vec2::new(width / 2.0, height / 2.0);
                let Some((t0, t1)) = Aabb::new(-half, half).ray_interval(la, lb - la) else {
                    return false;
                };
                let (t0, t1) = (t0.max(0.0), t1.min(1.0));
                if t1 < t0 {
                    return false;
                }
                let mid = a + (b - a) * ((t0 + t1) / 2.0);
                self.contains_strict(mid)
            }
        }
    }

    /// `k` boundary points used as the target's point-target set.
    ///
    /// Rectangles yield side midpoints in the order +width, −width, +height,
    /// −height (in the rectangle's own frame), cycling when `k > 4`. Circles
    /// yield `k` equally spaced points starting at angle 0.
    pub fn reference_points(&self, k: usize) -> Result<Vec<Vec2>> {
        if k < 1 {
            return Err(Error::argument("reference point count must be >= 1"));
        }
        let points = match *self {
            ShapeSpec::Rectangle {
                center,
                width,
                height,
                rotation,
            } => {
                let sides = [
                    Vec2::new(width / 2.0, 0.0),
                    Vec2::new(-width / 2.0, 0.0),
                    Vec2::new(0.0, height / 2.0),
                    Vec2::new(0.0, -height / 2.0),
                ];
                (0..k)
                    .map(|i| sides[i % 4].rotate(rotation) + center)
                    .collect()
            }
            ShapeSpec::Circle { center, radius } => (0..k)
                .map(|i| {
                    let angle = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                    center + Vec2::from_polar(radius, angle)
                })
                .collect(),
        };
        Ok(points)
    }
}
