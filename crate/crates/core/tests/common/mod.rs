use flatsol_core::linalg::thomas;
use flatsol_core::Mesh;

/// Damped Newton on the tridiagonal system for `-u'' = λu + m u^α` on an interval.
pub fn newton_oracle(mesh: &Mesh, m: &[f64], lambda: f64, alpha: f64) -> Vec<f64> {
    let (lo, hi, n) = match *mesh {
        Mesh::Interval { lo, hi, n } => (lo, hi, n),
        _ => unreachable!(),
    };
    let h = (hi - lo) / n as f64;
    let c = 1.0 / (h * h);
    let inner = n - 1;
    // start from the exact profile of the unit forcing, scaled
    let mut u: Vec<f64> = (1..n).map(|i| {
        let x = lo + i as f64 * h;
        0.05 * (x - lo) * (hi - x)
    }).collect();
    let residual = |u: &[f64]| -> Vec<f64> {
        (0..inner)
            .map(|i| {
                let l = if i > 0 { u[i - 1] } else { 0.0 };
                let r = if i + 1 < inner { u[i + 1] } else { 0.0 };
                c * (2.0 * u[i] - l - r) - lambda * u[i] - m[i + 1] * u[i].max(0.0).powf(alpha)
            })
            .collect()
    };
    let norm = |v: &[f64]| v.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let mut res = residual(&u);
    for _ in 0..200 {
        if norm(&res) < 1e-13 {
            break;
        }
        let diag: Vec<f64> = (0..inner).map(|i| 2.0 * c - lambda - alpha * m[i + 1] * u[i].powf(alpha - 1.0)).collect();
        let step = thomas(&vec![-c; inner], &diag, &vec![-c; inner], &res).unwrap();
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(&step).map(|(a, s)| a - t * s).collect();
            if trial.iter().all(|v| *v > 0.0) {
                let r = residual(&trial);
                if norm(&r) < norm(&res) || t < 1e-6 {
                    u = trial;
                    res = r;
                    break;
                }
            }
            t *= 0.5;
        }
    }
    let mut full = vec![0.0];
    full.extend(u);
    full.push(0.0);
    full
}
