/// Soft-threshold level `τ` such that `Σ max(|x_i| − τ, 0) = radius`.
///
/// Only meaningful when `‖x‖₁ > radius`.
fn l1_threshold(x: &[f64], radius: f64) -> f64 {
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (j, &m) in mags.iter().enumerate() {
        cumsum += m;
        let t = (cumsum - radius) / (j + 1) as f64;
        if m > t {
            tau = t;
        } else {
            break;
        }
    }
    tau.max(0.0)
}

/// Euclidean projection of `x` onto `{y : ‖y‖₁ ≤ radius}`.
pub fn project_l1_ball(x: &[f64], radius: f64) -> Vec<f64> {
    assert!(radius > 0.0, "radius must be positive");
    let l1: f64 = x.iter().map(|v| v.abs()).sum();
    if l1 <= radius {
        return x.to_vec();
    }
    let tau = l1_threshold(x, radius);
    x.iter()
        .map(|&v| v.signum() * (v.abs() - tau).max(0.0))
        .collect()
}

/// In-place variant used by the SDP solver on flattened matrices.
pub fn project_l1_ball_in_place(x: &mut [f64], radius: f64) {
    let l1: f64 = x.iter().map(|v| v.abs()).sum();
    if l1 <= radius {
        return;
    }
    let tau = l1_threshold(x, radius);
    for v in x.iter_mut() {
        *v = v.signum() * (v.abs() - tau).max(0.0);
    }
}
