//! One-dimensional node sets: uniform, periodic, or graded around fine
//! intervals.

/// Nodes `k·h` covering `[lo, hi]` with one node at or beyond each end.
pub fn uniform(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let k0 = (lo / h).floor() as i64;
    let k1 = (hi / h).ceil() as i64;
    (k0..=k1).map(|k| k as f64 * h).collect()
}

/// `n` nodes spaced `period/n` from `x0`, with `n = ceil(period/h)`.
pub fn periodic(x0: f64, period: f64, h: f64) -> Vec<f64> {
    let n = (period / h - 1e-9).ceil().max(1.0) as usize;
    (0..n).map(|k| x0 + period * k as f64 / n as f64).collect()
}

/// Spacing `h` on the fine intervals (snapped to multiples of `h`, so the
/// fine nodes all lie on the lattice `h·Z`), growing geometrically by
/// `ratio` up to `h_max` away from them, covering `[lo, hi]`.
pub fn graded(lo: f64, hi: f64, h: f64, fine: &[(f64, f64)], ratio: f64, h_max: f64) -> Vec<f64> {
    let mut iv: Vec<(i64, i64)> = fine
        .iter()
        .map(|&(a, b)| ((a.max(lo) / h).floor() as i64, (b.min(hi) / h).ceil() as i64))
        .filter(|(a, b)| b > a)
        .collect();
    if iv.is_empty() {
        return uniform(lo, hi, h);
    }
    iv.sort();
    let mut merged: Vec<(i64, i64)> = Vec::new();
    for (a, b) in iv {
        match merged.last_mut() {
            Some(last) if a <= last.1 + 2 => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    let step = |k: i32| (h * ratio.powi(k)).min(h_max);

    let mut nodes = Vec::new();
    // Left end, marched outward then reversed.
    let mut left = Vec::new();
    let mut x = merged[0].0 as f64 * h;
    let mut k = 1;
    while x > lo {
        x -= step(k);
        left.push(x);
        k += 1;
    }
    left.reverse();
    nodes.extend(left);

    for (idx, &(a, b)) in merged.iter().enumerate() {
        nodes.extend((a..=b).map(|k| k as f64 * h));
        if let Some(&(next, _)) = merged.get(idx + 1) {
            nodes.extend(bridge(b as f64 * h, next as f64 * h, &step));
        }
    }

    let mut x = merged.last().unwrap().1 as f64 * h;
    let mut k = 1;
    while x < hi {
        x += step(k);
        nodes.push(x);
        k += 1;
    }
    nodes
}

/// Interior nodes strictly between two fine intervals, growing from both
/// sides and meeting in the middle.
fn bridge(a: f64, b: f64, step: &dyn Fn(i32) -> f64) -> Vec<f64> {
    let (mut l, mut r) = (a, b);
    let (mut kl, mut kr) = (1, 1);
    let mut lp = Vec::new();
    let mut rp = Vec::new();
    loop {
        let (sl, sr) = (step(kl), step(kr));
        if r - l <= 2.0 * (sl + sr) {
            let cell = 0.5 * (sl + sr);
            let m = ((r - l) / cell).round().max(1.0) as usize;
            for j in 1..m {
                lp.push(l + (r - l) * j as f64 / m as f64);
            }
            break;
        }
        if sl <= sr {
            l += sl;
            lp.push(l);
            kl += 1;
        } else {
            r -= sr;
            rp.push(r);
            kr += 1;
        }
    }
    rp.reverse();
    lp.extend(rp);
    lp
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_sorted(v: &[f64]) {
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn graded_contains_fine_lattice() {
        let h = 0.01;
        let v = graded(-4.0, 4.0, h, &[(-0.3, 0.3), (1.0, 1.2)], 1.1, 0.2);
        check_sorted(&v);
        assert!(v[0] <= -4.0 && *v.last().unwrap() >= 4.0);
        assert!(v.iter().any(|x| x.abs() < 1e-15));
        for w in v.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let d = w[1] - w[0];
            if (-0.3..0.3).contains(&mid) || (1.0..1.2).contains(&mid) {
                assert!(d <= h * (1.0 + 1e-9));
            }
            assert!(d <= 0.2 * (1.0 + 1e-9));
        }
        // Neighbouring cells never differ by more than a factor 2.
        for w in v.windows(3) {
            let (a, b) = (w[1] - w[0], w[2] - w[1]);
            assert!(a / b < 2.0 && b / a < 2.0, "{a} {b}");
        }
    }

    #[test]
    fn periodic_count() {
        let v = periodic(0.0, 0.5, 0.0125);
        assert_eq!(v.len(), 40);
    }
}
