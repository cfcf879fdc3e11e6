use std::f64::consts::PI;

/// Half-width of the support of a unit-variance uniform variable.
pub const XI_BOUND: f64 = 1.732_050_807_568_877_2;

/// Gauss–Legendre rule with `p + 1` points for the uniform density on
/// `[−√3, √3]`: nodes scaled by `√3`, weights halved so they sum to one.
/// Exact for polynomials up to degree `2p + 1`.
pub fn gauss_legendre_1d(p: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre_reference(p + 1);
    (
        x.into_iter().map(|t| t * XI_BOUND).collect(),
        w.into_iter().map(|t| 0.5 * t).collect(),
    )
}

/// Nodes (ascending) and weights of the `n`-point rule on `[−1, 1]`, by
/// Newton iteration on the Legendre three-term recurrence.
fn gauss_legendre_reference(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for k in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p2) / (k + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0, 0.0);
        for k in 0..n {
            let p2 = p1;
            p1 = p0;
            p0 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p2) / (k + 1) as f64;
        }
        dp = if (z * z - 1.0).abs() > 0.0 {
            n as f64 * (z * p0 - p1) / (z * z - 1.0)
        } else {
            dp
        };
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}
