use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::Point2;

/// Rigid motion of the plane: rotate by `theta` about the origin, then
/// translate by `(tx, ty)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawPose")]
pub struct Pose {
    pub tx: f64,
    pub ty: f64,
    theta: f64,
}

#[derive(Deserialize)]
struct RawPose {
    tx: f64,
    ty: f64,
    theta: f64,
}

impl From<RawPose> for Pose {
    fn from(r: RawPose) -> Self {
        Pose::new(r.tx, r.ty, r.theta)
    }
}

impl Default for Pose {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Pose {
    pub const IDENTITY: Pose = Pose {
        tx: 0.0,
        ty: 0.0,
        theta: 0.0,
    };

    pub fn new(tx: f64, ty: f64, theta: f64) -> Self {
        Self {
            tx,
            ty,
            theta: normalize_angle(theta),
        }
    }

    /// Pure rotation by `k` quarter turns.
    pub fn quarter_turns(k: i32) -> Self {
        Self::new(0.0, 0.0, f64::from(k.rem_euclid(4)) * std::f64::consts::FRAC_PI_2)
    }

    /// Rotation in `[0, 2π)`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    fn cos_sin(&self) -> (f64, f64) {
        // Snap exact quarter turns so axis-aligned inputs stay axis-aligned.
        let q = self.theta / std::f64::consts::FRAC_PI_2;
        if (q - q.round()).abs() < 1e-12 {
            match (q.round() as i64).rem_euclid(4) {
                0 => (1.0, 0.0),
                1 => (0.0, 1.0),
                2 => (-1.0, 0.0),
                _ => (0.0, -1.0),
            }
        } else {
            (self.theta.cos(), self.theta.sin())
        }
    }

    pub fn rotate(&self, p: Point2) -> Point2 {
        let (c, s) = self.cos_sin();
        Point2::new(c * p.x - s * p.y, s * p.x + c * p.y)
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        let r = self.rotate(p);
        Point2::new(r.x + self.tx, r.y + self.ty)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Pose) -> Pose {
        let t = self.apply(Point2::new(other.tx, other.ty));
        Pose::new(t.x, t.y, self.theta + other.theta)
    }

    pub fn inverse(&self) -> Pose {
        let r = Pose::new(0.0, 0.0, -self.theta);
        let t = r.rotate(Point2::new(-self.tx, -self.ty));
        Pose::new(t.x, t.y, -self.theta)
    }
}

pub(crate) fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn theta_is_normalized() {
        assert!((Pose::new(0.0, 0.0, -FRAC_PI_2).theta() - 3.0 * FRAC_PI_2).abs() < 1e-12);
        assert!(Pose::new(0.0, 0.0, TAU).theta().abs() < 1e-12);
        assert!((Pose::new(0.0, 0.0, 5.0 * PI).theta() - PI).abs() < 1e-9);
    }

    #[test]
    fn quarter_turn_is_exact() {
        let p = Pose::new(1.0, 2.0, FRAC_PI_2).apply(Point2::new(1.0, 0.0));
        assert_eq!(p, Point2::new(1.0, 3.0));
    }

    #[test]
    fn inverse_and_compose() {
        let a = Pose::new(0.3, -1.2, 0.7);
        let b = Pose::new(-2.0, 0.5, 2.1);
        let p = Point2::new(0.4, 0.9);
        let q = a.compose(&b).apply(p);
        let r = a.apply(b.apply(p));
        assert!(q.dist(r) < 1e-12);
        assert!(a.inverse().apply(a.apply(p)).dist(p) < 1e-12);
    }
}
