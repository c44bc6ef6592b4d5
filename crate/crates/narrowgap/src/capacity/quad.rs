//! Adaptive Gauss-Kronrod (7/15) quadrature with a shared evaluation budget.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Counts integrand evaluations across nested integrations.
#[derive(Debug)]
pub struct Budget {
    used: Cell<usize>,
    limit: usize,
}

impl Budget {
    pub fn new(limit: usize) -> Budget {
        Budget { used: Cell::new(0), limit }
    }

    pub fn used(&self) -> usize {
        self.used.get()
    }

    fn spend(&self, n: usize) -> Result<()> {
        let u = self.used.get() + n;
        self.used.set(u);
        if u > self.limit {
            Err(Error::QuadratureBudget(u))
        } else {
            Ok(())
        }
    }
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn gk15<F: FnMut(f64) -> Result<f64>>(f: &mut F, a: f64, b: f64, budget: &Budget) -> Result<Piece> {
    budget.spend(15)?;
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x)? + f(c + x)?;
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    let value = k * h;
    let error = ((k - g) * h).abs();
    Ok(Piece { a, b, value, error })
}

/// Integrates `f` over the partition given by `breaks` (sorted, at least two
/// points) until the estimated error is below `rel_tol·|I|`.
pub fn integrate<F>(mut f: F, breaks: &[f64], rel_tol: f64, budget: &Budget) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(gk15(&mut f, w[0], w[1], budget)?);
        }
    }
    loop {
        let total: f64 = heap.iter().map(|p| p.value).sum();
        let err: f64 = heap.iter().map(|p| p.error).sum();
        if err <= rel_tol * total.abs() || err <= f64::MIN_POSITIVE {
            return Ok(total);
        }
        let worst = heap.pop().expect("non-empty partition");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Interval at machine resolution; accept what we have.
            heap.push(Piece { error: 0.0, ..worst });
            continue;
        }
        heap.push(gk15(&mut f, worst.a, mid, budget)?);
        heap.push(gk15(&mut f, mid, worst.b, budget)?);
    }
}

/// Breakpoints for a peak of width `w` at the left end of [0, r]:
/// geometric from w/64 up to r.
pub fn peak_breaks(w: f64, r: f64) -> Vec<f64> {
    let mut b = vec![0.0];
    let mut x = w / 64.0;
    while x < r {
        b.push(x);
        x *= 4.0;
    }
    b.push(r);
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let b = Budget::new(1000);
        let v = integrate(|x| Ok(x.powi(6)), &[0.0, 1.0], 1e-14, &b).unwrap();
        assert!((v - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn sharp_peak() {
        let b = Budget::new(1_000_000);
        let eps: f64 = 1e-10;
        let v = integrate(|x| Ok(1.0 / (eps + x * x)), &peak_breaks(eps.sqrt(), 1.0), 1e-10, &b).unwrap();
        let exact = (1.0 / eps.sqrt()).atan() / eps.sqrt();
        assert!((v / exact - 1.0).abs() < 1e-9);
    }

    #[test]
    fn budget_exhaustion() {
        let b = Budget::new(100);
        let r = integrate(|x| Ok((1.0 / x).sin()), &[1e-6, 1.0], 1e-12, &b);
        assert!(matches!(r, Err(Error::QuadratureBudget(_))));
    }
}
