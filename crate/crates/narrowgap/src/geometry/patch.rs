use serde::{Deserialize, Serialize};

use super::orders::VanishingOrders;
use super::shape::Point;
use crate::{Error, Result};

/// A gap graph `x_n = h(x')` over the patch box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphFn {
    Constant {
        value: f64,
    },
    /// `offset + sign · Σ_j coef_j |x_j|^{power_j}`, one term per direction
    /// (a zero coefficient drops the direction).
    Power {
        offset: f64,
        sign: f64,
        coef: Vec<f64>,
        power: Vec<f64>,
    },
    /// `offset + sign · sqrt(radius² - |x'|²)`: an arc of a circle or sphere.
    Circle {
        offset: f64,
        radius: f64,
        sign: f64,
    },
}

impl GraphFn {
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            GraphFn::Constant { value } => *value,
            GraphFn::Power { offset, sign, coef, power } => {
                let s: f64 = x
                    .iter()
                    .zip(coef.iter().zip(power))
                    .map(|(xi, (c, p))| if *c == 0.0 { 0.0 } else { c * xi.abs().powf(*p) })
                    .sum();
                offset + sign * s
            }
            GraphFn::Circle { offset, radius, sign } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                offset + sign * (radius * radius - r2).max(0.0).sqrt()
            }
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            GraphFn::Constant { .. } => vec![0.0; x.len()],
            GraphFn::Power { sign, coef, power, .. } => {
                x.iter()
                    .zip(coef.iter().zip(power))
                    .map(|(xi, (c, p))| {
                        if *c == 0.0 || *xi == 0.0 {
                            0.0
                        } else {
                            sign * c * p * xi.abs().powf(p - 1.0) * xi.signum()
                        }
                    })
                    .collect()
            }
            GraphFn::Circle { radius, sign, .. } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                let root = (radius * radius - r2).max(f64::MIN_POSITIVE).sqrt();
                x.iter().map(|xi| -sign * xi / root).collect()
            }
        }
    }
}

/// One narrow region: a rotated box of half-width `r` in which ∂D1 is the
/// graph `x_n = f(x')` and ∂D2 the graph `x_n = g(x')`, with `f < g`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapPatch {
    pub center: Vec<f64>,
    /// Rows are the local axes e_1..e_n; e_n points from D1 towards D2.
    pub frame: Vec<Vec<f64>>,
    pub half_width: f64,
    pub f: GraphFn,
    pub g: GraphFn,
    pub orders: VanishingOrders,
    /// Declared sandwich constant C > 1.
    pub sandwich: f64,
    /// Declared bound on |f|, |g|, |∇f|, |∇g| over the box.
    pub graph_bound: f64,
}

impl GapPatch {
    /// 2D frame whose normal axis is rotated by `angle` from +y.
    pub fn frame2d(angle: f64) -> Vec<Vec<f64>> {
        let (s, c) = angle.sin_cos();
        vec![vec![c, s], vec![-s, c]]
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn to_local(&self, p: &[f64]) -> Vec<f64> {
        self.frame
            .iter()
            .map(|e| e.iter().zip(p.iter().zip(&self.center)).map(|(ek, (pk, ck))| ek * (pk - ck)).sum())
            .collect()
    }

    pub fn to_local2(&self, p: Point) -> Point {
        let d = [p[0] - self.center[0], p[1] - self.center[1]];
        [self.frame[0][0] * d[0] + self.frame[0][1] * d[1], self.frame[1][0] * d[0] + self.frame[1][1] * d[1]]
    }

    pub fn to_global2(&self, q: Point) -> Point {
        [
            self.center[0] + self.frame[0][0] * q[0] + self.frame[1][0] * q[1],
            self.center[1] + self.frame[0][1] * q[0] + self.frame[1][1] * q[1],
        ]
    }

    /// Whether `p` lies in the open box scaled by `scale` (1 = the patch box).
    pub fn contains2(&self, p: Point, scale: f64) -> bool {
        let q = self.to_local2(p);
        let r = self.half_width * scale;
        q[0].abs() < r && q[1].abs() < r
    }

    /// Σ_j x_j^{2α_j} over the finite orders.
    pub fn opening(&self, x: &[f64]) -> f64 {
        self.orders.as_slice().iter().zip(x).filter_map(|(o, xi)| o.finite().map(|a| xi.abs().powf(2.0 * a))).sum()
    }

    /// Axis-aligned bounds (in global 2D coordinates) of the band between
    /// the graphs, padded by `normal_margin` across and `tangent_margin`
    /// along the gap.
    pub fn band_bbox2(&self, normal_margin: f64, tangent_margin: f64) -> ([f64; 2], [f64; 2]) {
        let r = self.half_width;
        let n = 65;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..n {
            let x = -r + 2.0 * r * k as f64 / (n - 1) as f64;
            lo = lo.min(self.f.value(&[x]));
            hi = hi.max(self.g.value(&[x]));
        }
        let lo = (lo - normal_margin).max(-r);
        let hi = (hi + normal_margin).min(r);
        let t = r + tangent_margin;
        let mut bx = [f64::INFINITY, f64::NEG_INFINITY];
        let mut by = [f64::INFINITY, f64::NEG_INFINITY];
        for q in [[-t, lo], [t, lo], [-t, hi], [t, hi]] {
            let p = self.to_global2(q);
            bx = [bx[0].min(p[0]), bx[1].max(p[0])];
            by = [by[0].min(p[1]), by[1].max(p[1])];
        }
        (bx, by)
    }
}

/// Measured sandwich constants of a patch: extremes of
/// (g - f)/(ε + Σ x_j^{2α_j}) over a tensor sample grid of the closed box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapValidation {
    pub c_lo: f64,
    pub c_hi: f64,
}

impl GapValidation {
    /// Whether the declared constant C brackets the measured ratio.
    pub fn within(&self, c: f64) -> bool {
        self.c_lo > 1.0 / c && self.c_hi < c
    }
}

/// Samples `sample_count` points per axis (plus the center) and returns the
/// extremes of the gap ratio. Fails at the first point where g <= f.
pub fn validate_gap(patch: &GapPatch, epsilon: f64, sample_count: usize) -> Result<GapValidation> {
    if sample_count < 100 {
        return Err(Error::InvalidInput(format!("sample_count {sample_count} < 100")));
    }
    let m = patch.dim() - 1;
    let r = patch.half_width;
    let axis: Vec<f64> = (0..sample_count).map(|k| -r + 2.0 * r * k as f64 / (sample_count - 1) as f64).collect();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut check = |x: &[f64]| -> Result<()> {
        let width = patch.g.value(x) - patch.f.value(x);
        if width.is_nan() || width <= 0.0 {
            return Err(Error::GapViolation { at: x.to_vec(), width });
        }
        let ratio = width / (epsilon + patch.opening(x));
        lo = lo.min(ratio);
        hi = hi.max(ratio);
        Ok(())
    };
    check(&vec![0.0; m])?;
    let total = sample_count.pow(m as u32);
    let mut x = vec![0.0; m];
    for flat in 0..total {
        let mut rem = flat;
        for xk in x.iter_mut() {
            *xk = axis[rem % sample_count];
            rem /= sample_count;
        }
        check(&x)?;
    }
    Ok(GapValidation { c_lo: lo, c_hi: hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::orders::Order;

    fn patch(f: GraphFn, g: GraphFn, orders: Vec<Order>) -> GapPatch {
        let n = orders.len() + 1;
        let mut frame = vec![vec![0.0; n]; n];
        for (k, row) in frame.iter_mut().enumerate() {
            row[k] = 1.0;
        }
        GapPatch {
            center: vec![0.0; n],
            frame,
            half_width: 1.0,
            f,
            g,
            orders: VanishingOrders::new(orders).unwrap(),
            sandwich: 4.0,
            graph_bound: 10.0,
        }
    }

    #[test]
    fn flat_gap_ratio_is_one() {
        let eps = 0.01;
        let p = patch(
            GraphFn::Constant { value: -eps / 2.0 },
            GraphFn::Constant { value: eps / 2.0 },
            vec![Order::Infinite],
        );
        let v = validate_gap(&p, eps, 512).unwrap();
        assert!((v.c_lo - 1.0).abs() < 1e-12 && (v.c_hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quartic_correction_ratio() {
        let eps = 1e-6;
        let p = patch(
            GraphFn::Constant { value: 0.0 },
            GraphFn::Power { offset: eps, sign: 1.0, coef: vec![1.0], power: vec![2.0] },
            vec![Order::Finite(1.0)],
        );
        let v = validate_gap(&p, eps, 512).unwrap();
        assert!((v.c_lo - 1.0).abs() < 1e-12 && (v.c_hi - 1.0).abs() < 1e-12);

        let q = patch(
            GraphFn::Power { offset: 0.0, sign: -1.0, coef: vec![1.0], power: vec![4.0] },
            GraphFn::Power { offset: eps, sign: 1.0, coef: vec![1.0], power: vec![2.0] },
            vec![Order::Finite(1.0)],
        );
        let v = validate_gap(&q, eps, 512).unwrap();
        // (ε + x² + x⁴)/(ε + x²): 1 at the center, (2 + ε)/(1 + ε) at |x| = 1.
        assert!((v.c_lo - 1.0).abs() < 1e-12);
        assert!((v.c_hi - (2.0 + eps) / (1.0 + eps)).abs() < 1e-12);
    }

    #[test]
    fn closed_gap_is_reported() {
        let p = patch(
            GraphFn::Constant { value: 0.0 },
            GraphFn::Power { offset: -0.1, sign: 1.0, coef: vec![1.0], power: vec![2.0] },
            vec![Order::Finite(1.0)],
        );
        assert!(matches!(validate_gap(&p, 0.1, 128), Err(Error::GapViolation { .. })));
    }

    #[test]
    fn circle_gradient_matches_difference() {
        let c = GraphFn::Circle { offset: 1.0, radius: 1.0, sign: -1.0 };
        let x = 0.3;
        let h = 1e-6;
        let fd = (c.value(&[x + h]) - c.value(&[x - h])) / (2.0 * h);
        assert!((c.gradient(&[x])[0] - fd).abs() < 1e-8);
    }
}
