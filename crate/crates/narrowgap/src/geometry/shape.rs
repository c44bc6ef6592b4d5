use std::fmt::Debug;
use std::sync::Arc;

pub type Point = [f64; 2];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub const EMPTY: BBox = BBox { min: [f64::INFINITY; 2], max: [f64::NEG_INFINITY; 2] };
    pub const ALL: BBox = BBox { min: [f64::NEG_INFINITY; 2], max: [f64::INFINITY; 2] };

    pub fn contains(&self, p: Point) -> bool {
        (0..2).all(|k| p[k] >= self.min[k] && p[k] <= self.max[k])
    }

    pub fn union(&self, o: &BBox) -> BBox {
        BBox {
            min: [self.min[0].min(o.min[0]), self.min[1].min(o.min[1])],
            max: [self.max[0].max(o.max[0]), self.max[1].max(o.max[1])],
        }
    }

    pub fn intersect(&self, o: &BBox) -> BBox {
        BBox {
            min: [self.min[0].max(o.min[0]), self.min[1].max(o.min[1])],
            max: [self.max[0].min(o.max[0]), self.max[1].min(o.max[1])],
        }
    }
}

/// A region given by a signed indicator: negative strictly inside, positive
/// strictly outside, zero on the boundary.
pub trait ImplicitShape: Debug + Send + Sync {
    fn indicator(&self, p: Point) -> f64;
    /// The indicator is positive outside this box.
    fn bbox(&self) -> BBox;
}

pub type Shape = Arc<dyn ImplicitShape>;

/// Bisection for the sign change of `f` on [lo, hi] where `f(lo) < 0 <= f(hi)`.
/// Returns the bracketing pair once it is narrower than `tol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Fraction t in (0, 1] along a -> b where `shape` first turns non-negative,
/// assuming `a` is inside and `b` is not. Accurate to `1e-10` relative.
pub fn locate_boundary(shape: &dyn ImplicitShape, a: Point, b: Point) -> f64 {
    let at = |t: f64| shape.indicator([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
    bisect(at, 0.0, 1.0, 1e-12).1
}

#[derive(Debug, Clone)]
pub struct Disk {
    pub center: Point,
    pub radius: f64,
}

impl ImplicitShape for Disk {
    fn indicator(&self, p: Point) -> f64 {
        (p[0] - self.center[0]).hypot(p[1] - self.center[1]) - self.radius
    }
    fn bbox(&self) -> BBox {
        let [cx, cy] = self.center;
        let r = self.radius;
        BBox { min: [cx - r, cy - r], max: [cx + r, cy + r] }
    }
}

/// Axis-aligned rectangle with rounded corners (exact signed distance).
#[derive(Debug, Clone)]
pub struct RoundedRect {
    pub center: Point,
    pub half: [f64; 2],
    pub corner: f64,
}

impl ImplicitShape for RoundedRect {
    fn indicator(&self, p: Point) -> f64 {
        let qx = (p[0] - self.center[0]).abs() - (self.half[0] - self.corner);
        let qy = (p[1] - self.center[1]).abs() - (self.half[1] - self.corner);
        qx.max(0.0).hypot(qy.max(0.0)) + qx.max(qy).min(0.0) - self.corner
    }
    fn bbox(&self) -> BBox {
        BBox {
            min: [self.center[0] - self.half[0], self.center[1] - self.half[1]],
            max: [self.center[0] + self.half[0], self.center[1] + self.half[1]],
        }
    }
}

/// Horizontal band `y_lo < y < y_hi` restricted to `x_lo < x < x_hi`.
#[derive(Debug, Clone)]
pub struct Band {
    pub y: [f64; 2],
    pub x: [f64; 2],
}

impl ImplicitShape for Band {
    fn indicator(&self, p: Point) -> f64 {
        (self.y[0] - p[1]).max(p[1] - self.y[1]).max(self.x[0] - p[0]).max(p[0] - self.x[1])
    }
    fn bbox(&self) -> BBox {
        BBox { min: [self.x[0], self.y[0]], max: [self.x[1], self.y[1]] }
    }
}

/// Region on one side of the graph `y = offset + Σ coef·|x - x0|^power`:
/// above it when `upward`, below it otherwise.
#[derive(Debug, Clone)]
pub struct PowerEpigraph {
    pub x0: f64,
    pub offset: f64,
    pub coef: f64,
    pub power: f64,
    pub upward: bool,
}

impl ImplicitShape for PowerEpigraph {
    fn indicator(&self, p: Point) -> f64 {
        let graph = self.offset + self.coef * (p[0] - self.x0).abs().powf(self.power);
        if self.upward {
            graph - p[1]
        } else {
            p[1] - graph
        }
    }
    fn bbox(&self) -> BBox {
        BBox::ALL
    }
}

/// Upper half-annulus `r_in < |p - c| < r_out`, `y > c_y`.
#[derive(Debug, Clone)]
pub struct UpperArc {
    pub center: Point,
    pub r_in: f64,
    pub r_out: f64,
}

impl ImplicitShape for UpperArc {
    fn indicator(&self, p: Point) -> f64 {
        let r = (p[0] - self.center[0]).hypot(p[1] - self.center[1]);
        (self.r_in - r).max(r - self.r_out).max(self.center[1] - p[1])
    }
    fn bbox(&self) -> BBox {
        let [cx, cy] = self.center;
        BBox { min: [cx - self.r_out, cy], max: [cx + self.r_out, cy + self.r_out] }
    }
}

#[derive(Debug, Clone)]
pub struct Union(pub Vec<Shape>);

impl ImplicitShape for Union {
    fn indicator(&self, p: Point) -> f64 {
        self.0.iter().map(|s| s.indicator(p)).fold(f64::INFINITY, f64::min)
    }
    fn bbox(&self) -> BBox {
        self.0.iter().fold(BBox::EMPTY, |b, s| b.union(&s.bbox()))
    }
}

#[derive(Debug, Clone)]
pub struct Intersection(pub Vec<Shape>);

impl ImplicitShape for Intersection {
    fn indicator(&self, p: Point) -> f64 {
        self.0.iter().map(|s| s.indicator(p)).fold(f64::NEG_INFINITY, f64::max)
    }
    fn bbox(&self) -> BBox {
        self.0.iter().fold(BBox::ALL, |b, s| b.intersect(&s.bbox()))
    }
}

/// Contains no points.
#[derive(Debug, Clone)]
pub struct Empty;

impl ImplicitShape for Empty {
    fn indicator(&self, _p: Point) -> f64 {
        1.0
    }
    fn bbox(&self) -> BBox {
        BBox::EMPTY
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounded_rect_distance() {
        let r = RoundedRect { center: [0.0, 0.0], half: [2.0, 1.0], corner: 0.5 };
        assert!((r.indicator([3.0, 0.0]) - 1.0).abs() < 1e-15);
        assert!((r.indicator([0.0, 0.0]) + 1.0).abs() < 1e-15);
        let c = [1.5, 0.5];
        let p = [c[0] + 1.0, c[1] + 1.0];
        assert!((r.indicator(p) - (2f64.sqrt() - 0.5)).abs() < 1e-14);
    }

    #[test]
    fn bisection_hits_circle() {
        let d = Disk { center: [0.3, -0.2], radius: 0.7 };
        let t = locate_boundary(&d, [0.3, -0.2], [1.3, -0.2]);
        assert!((t - 0.7).abs() < 1e-10);
    }
}
