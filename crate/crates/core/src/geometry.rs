//! Analytic description of the smooth physical domain.
//!
//! Every domain is described by its signed distance `d` (negative inside),
//! together with `∇d` and `Hess d`. Inside the tubular neighbourhood
//! `|d| <= δ` the orthogonal projection onto the boundary is
//! `b(x) = x - d(x) ∇d(x)` and its derivative is
//! `Db(x) = I - ∇d ⊗ ∇d - d(x) Hess d(x)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{Mat, Point};

/// A user supplied signed distance function with analytic derivatives.
///
/// Implementations must return the true signed distance inside the tube
/// (so that `|∇d| = 1` there).
pub trait LevelSet<const D: usize>: Send + Sync {
    fn value(&self, x: &Point<D>) -> f64;
    fn gradient(&self, x: &Point<D>) -> Point<D>;
    fn hessian(&self, x: &Point<D>) -> Mat<D>;
}

#[derive(Clone)]
pub enum DomainKind<const D: usize> {
    /// The unit disk (`D = 2`) or unit ball (`D = 3`), `d(x) = |x| - 1`.
    UnitBall,
    LevelSet(Arc<dyn LevelSet<D>>),
}

impl<const D: usize> fmt::Debug for DomainKind<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainKind::UnitBall if D == 2 => write!(f, "UnitDisk2D"),
            DomainKind::UnitBall => write!(f, "UnitBall3D"),
            DomainKind::LevelSet(_) => write!(f, "LevelSet"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Domain<const D: usize> {
    pub kind: DomainKind<D>,
    pub tube_width: f64,
}

/// Tube width used for the unit disk and ball (curvature radius 1).
pub const UNIT_BALL_TUBE_WIDTH: f64 = 0.5;

impl Domain<2> {
    pub fn unit_disk() -> Self {
        Domain { kind: DomainKind::UnitBall, tube_width: UNIT_BALL_TUBE_WIDTH }
    }
}

impl Domain<3> {
    pub fn unit_ball() -> Self {
        Domain { kind: DomainKind::UnitBall, tube_width: UNIT_BALL_TUBE_WIDTH }
    }
}

impl<const D: usize> Domain<D> {
    pub fn level_set(level_set: Arc<dyn LevelSet<D>>, tube_width: f64) -> Self {
        assert!(tube_width > 0.0, "tube width must be positive");
        Domain { kind: DomainKind::LevelSet(level_set), tube_width }
    }

    pub fn dimension(&self) -> usize {
        D
    }

    pub fn signed_distance(&self, x: &Point<D>) -> f64 {
        match &self.kind {
            DomainKind::UnitBall => x.norm() - 1.0,
            DomainKind::LevelSet(ls) => ls.value(x),
        }
    }

    /// `∇d(x)`; for the unit ball this is undefined at the origin, which is
    /// outside the tube.
    pub fn distance_gradient(&self, x: &Point<D>) -> Point<D> {
        match &self.kind {
            DomainKind::UnitBall => x / x.norm(),
            DomainKind::LevelSet(ls) => ls.gradient(x),
        }
    }

    pub fn distance_hessian(&self, x: &Point<D>) -> Mat<D> {
        match &self.kind {
            DomainKind::UnitBall => {
                let r = x.norm();
                let n = x / r;
                (Mat::<D>::identity() - n * n.transpose()) / r
            }
            DomainKind::LevelSet(ls) => ls.hessian(x),
        }
    }

    pub fn in_tube(&self, x: &Point<D>) -> bool {
        self.signed_distance(x).abs() <= self.tube_width
    }

    fn check_tube(&self, x: &Point<D>) -> Result<f64> {
        let d = self.signed_distance(x);
        if d.abs() <= self.tube_width {
            Ok(d)
        } else {
            Err(Error::PointOutsideTube { distance: d, width: self.tube_width })
        }
    }

    /// Orthogonal projection `b(x) = x - d(x) ∇d(x)` onto the boundary.
    pub fn project_boundary(&self, x: &Point<D>) -> Result<Point<D>> {
        let d = self.check_tube(x)?;
        match &self.kind {
            // Normalising directly keeps |b(x)| = 1 to the last bit.
            DomainKind::UnitBall => Ok(x / x.norm()),
            DomainKind::LevelSet(ls) => Ok(x - ls.gradient(x) * d),
        }
    }

    /// `Db(x) = I - ∇d ⊗ ∇d - d(x) Hess d(x)`.
    pub fn projection_derivative(&self, x: &Point<D>) -> Result<Mat<D>> {
        let d = self.check_tube(x)?;
        let n = self.distance_gradient(x);
        let hess = self.distance_hessian(x);
        Ok(Mat::<D>::identity() - n * n.transpose() - hess * d)
    }
}
