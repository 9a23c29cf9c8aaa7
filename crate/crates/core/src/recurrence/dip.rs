//! Hartigan's dip statistic of unimodality.

fn hull(xs: &[f64], ys: &[f64], lower: bool) -> Vec<usize> {
    let mut h: Vec<usize> = Vec::new();
    for i in 0..xs.len() {
        while h.len() >= 2 {
            let (a, b) = (h[h.len() - 2], h[h.len() - 1]);
            let cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]);
            if (lower && cross <= 0.0) || (!lower && cross >= 0.0) {
                h.pop();
            } else {
                break;
            }
        }
        h.push(i);
    }
    h
}

/// Value at `xs[i]` of the piecewise-linear curve through the hull vertices `h`.
fn on_hull(xs: &[f64], ys: &[f64], h: &[usize], i: usize) -> f64 {
    let k = h.partition_point(|&j| j < i);
    if k < h.len() && h[k] == i {
        return ys[i];
    }
    if k == 0 {
        return ys[h[0]];
    }
    if k == h.len() {
        return ys[h[k - 1]];
    }
    let (a, b) = (h[k - 1], h[k]);
    ys[a] + (ys[b] - ys[a]) * (xs[i] - xs[a]) / (xs[b] - xs[a])
}

/// Dip of the empirical distribution of `sample`: the sup-distance to the
/// nearest unimodal distribution. Lies in `[1/(2n), 1/4]`; tied values are
/// treated as one atom.
pub fn dip_statistic(sample: &[f64]) -> f64 {
    let n = sample.len();
    if n == 0 {
        return 0.0;
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut xs = Vec::new();
    let mut upper = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        if xs.last() == Some(&v) {
            *upper.last_mut().unwrap() = (i + 1) as f64;
        } else {
            xs.push(v);
            upper.push((i + 1) as f64);
        }
    }
    if xs.len() < 2 {
        return 0.0;
    }
    let lower: Vec<f64> = (0..xs.len()).map(|k| if k == 0 { 0.0 } else { upper[k - 1] }).collect();

    let (mut lo, mut hi) = (0usize, xs.len() - 1);
    let mut dip = 1.0;
    loop {
        let (x, l, u) = (&xs[lo..=hi], &lower[lo..=hi], &upper[lo..=hi]);
        let gcm = hull(x, l, true);
        let lcm = hull(x, u, false);
        let mut gap = -1.0;
        let mut at_gcm = true;
        let mut pos = 0;
        for &g in &gcm {
            let d = on_hull(x, u, &lcm, g) - l[g];
            if d > gap {
                gap = d;
                at_gcm = true;
                pos = g;
            }
        }
        for &c in &lcm {
            let d = u[c] - on_hull(x, l, &gcm, c);
            if d > gap {
                gap = d;
                at_gcm = false;
                pos = c;
            }
        }
        let (new_lo, new_hi) = if at_gcm {
            (pos, *lcm.iter().find(|&&c| c >= pos).unwrap())
        } else {
            (*gcm.iter().rev().find(|&&g| g <= pos).unwrap(), pos)
        };
        if gap <= dip {
            break;
        }
        let left = (0..=new_lo).map(|i| u[i] - on_hull(x, l, &gcm, i)).fold(0.0, f64::max);
        let right = (new_hi..x.len()).map(|i| on_hull(x, u, &lcm, i) - l[i]).fold(0.0, f64::max);
        dip = dip.max(left).max(right);
        if new_lo == 0 && new_hi == x.len() - 1 {
            break;
        }
        (lo, hi) = (lo + new_lo, lo + new_hi);
    }
    dip / (2.0 * n as f64)
}
