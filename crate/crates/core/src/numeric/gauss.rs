use std::f64::consts::PI;

/// A Gauss rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Maps the rule onto `[a, b]` (weights absorb the Jacobian).
    pub fn on_interval(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&t, &w)| (mid + half * t, half * w))
    }
}

/// Gauss-Legendre rule with `m` points; exact for polynomials of degree `2m - 1`.
pub fn gauss_legendre(m: usize) -> GaussRule {
    gauss_symmetric_jacobi(m, 0.0)
}

/// Gauss rule for the weight `(1 - t^2)^a` on `[-1, 1]`, `a` a nonnegative
/// multiple of 1/2, built with the Golub-Welsch eigenvalue method.
///
/// In `t = cos(theta)` this is the Gauss rule for `sin^(2a+1)(theta) d(theta)`
/// on `[0, pi]`, which is what the hyperspherical product rules need.
pub fn gauss_symmetric_jacobi(m: usize, a: f64) -> GaussRule {
    assert!(m >= 1, "gauss rule needs at least one node");
    assert!(
        a >= 0.0 && (2.0 * a).fract() == 0.0,
        "weight exponent must be a nonnegative half-integer"
    );
    // Monic three-term recurrence: p_{k+1} = t p_k - beta_k p_{k-1}.
    let mut diag = vec![0.0; m];
    let mut off = vec![0.0; m];
    for (k, o) in off.iter_mut().enumerate().skip(1) {
        let kf = k as f64;
        let beta = kf * (kf + 2.0 * a) / ((2.0 * kf + 2.0 * a + 1.0) * (2.0 * kf + 2.0 * a - 1.0));
        *o = beta.sqrt();
    }
    let mut z = vec![0.0; m * m];
    for i in 0..m {
        z[i * m + i] = 1.0;
    }
    tridiagonal_ql(&mut diag, &mut off, &mut z, m);

    let mu0 = weight_mass(a);
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|j| {
            let v0 = z[j]; // first row, column j
            (diag[j], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    // Symmetrize: the weight is even, so nodes come in +/- pairs.
    for i in 0..m / 2 {
        let j = m - 1 - i;
        let t = 0.5 * (pairs[j].0 - pairs[i].0);
        let w = 0.5 * (pairs[i].1 + pairs[j].1);
        pairs[i] = (-t, w);
        pairs[j] = (t, w);
    }
    if m % 2 == 1 {
        pairs[m / 2].0 = 0.0;
    }
    GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// `int_{-1}^{1} (1 - t^2)^a dt` for half-integer `a`.
fn weight_mass(a: f64) -> f64 {
    let (mut value, mut cur) = if a.fract() == 0.0 { (2.0, 0.0) } else { (PI / 2.0, 0.5) };
    while cur < a {
        cur += 1.0;
        value *= 2.0 * cur / (2.0 * cur + 1.0);
    }
    value
}

/// Implicit QL iteration for a symmetric tridiagonal matrix. `off[k]` couples
/// rows `k - 1` and `k`. On return `diag` holds the eigenvalues and the columns
/// of `z` the eigenvectors.
fn tridiagonal_ql(diag: &mut [f64], off: &mut [f64], z: &mut [f64], n: usize) {
    for i in 1..n {
        off[i - 1] = off[i];
    }
    if n > 0 {
        off[n - 1] = 0.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 60, "tridiagonal QL failed to converge");
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let zf = z[k * n + i + 1];
                    z[k * n + i + 1] = s * z[k * n + i] + c * zf;
                    z[k * n + i] = c * z[k * n + i] - s * zf;
                }
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
}
