//! Quadrature over sampled integrands.

/// Composite Simpson rule on possibly non-uniform abscissae. An odd number
/// of intervals closes with the quadratic through the last three points, so
/// the rule stays fourth-order on smooth data.
pub fn simpson(t: &[f64], f: &[f64]) -> f64 {
    assert_eq!(t.len(), f.len());
    let n = t.len();
    match n {
        0 | 1 => return 0.0,
        2 => return 0.5 * (t[1] - t[0]) * (f[0] + f[1]),
        _ => {}
    }
    let intervals = n - 1;
    let paired = intervals - intervals % 2;
    let mut sum = 0.0;
    let mut i = 0;
    while i < paired {
        let h0 = t[i + 1] - t[i];
        let h1 = t[i + 2] - t[i + 1];
        let hs = h0 + h1;
        sum += hs / 6.0
            * ((2.0 - h1 / h0) * f[i] + hs * hs / (h0 * h1) * f[i + 1] + (2.0 - h0 / h1) * f[i + 2]);
        i += 2;
    }
    if intervals % 2 == 1 {
        let k = n - 1;
        let h0 = t[k - 1] - t[k - 2];
        let h1 = t[k] - t[k - 1];
        let alpha = (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1));
        let beta = (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0);
        let eta = h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
        sum += alpha * f[k] + beta * f[k - 1] - eta * f[k - 2];
    }
    sum
}

/// Running integral `F(t_i) = ∫_{t_0}^{t_i} f`, each interval integrated
/// exactly against the cubic through the four nearest samples.
pub fn cumulative(t: &[f64], f: &[f64]) -> Vec<f64> {
    assert_eq!(t.len(), f.len());
    let n = t.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n < 4 {
        for i in 1..n {
            out[i] = out[i - 1] + 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
        }
        return out;
    }
    // 3-point Gauss-Legendre is exact on cubics
    const NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
    const WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    for i in 0..n - 1 {
        let lo = i.saturating_sub(1).min(n - 4);
        let xs = &t[lo..lo + 4];
        let ys = &f[lo..lo + 4];
        let (a, b) = (t[i], t[i + 1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (node, w) in NODES.iter().zip(WEIGHTS) {
            acc += w * lagrange(xs, ys, mid + half * node);
        }
        out[i + 1] = out[i] + half * acc;
    }
    out
}

/// Lagrange interpolation through the given nodes.
pub fn lagrange(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for (j, (&xj, &yj)) in xs.iter().zip(ys).enumerate() {
        let mut basis = 1.0;
        for (m, &xm) in xs.iter().enumerate() {
            if m != j {
                basis *= (x - xm) / (xj - xm);
            }
        }
        acc += yj * basis;
    }
    acc
}

/// `n + 1` equally spaced points on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    let h = (b - a) / n as f64;
    (0..=n)
        .map(|i| if i == n { b } else { a + h * i as f64 })
        .collect()
}
