//! g(x′) = sup_{|y′−x′|≤R} f(y′) + √(R² − |x′−y′|²) and its inf dual.

use super::graph::GraphFunction;

fn cap(r: f64, x: &[f64], y: &[f64]) -> Option<f64> {
    let q = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    let rem = r * r - q;
    if rem >= 0.0 {
        Some(rem.sqrt())
    } else {
        None
    }
}

/// Maximises `sign·(value(y) + sign·cap)` over the R-ball; `sign` = 1 for
/// the sup form, −1 for the inf form.
fn extremum<F: Fn(&[f64]) -> f64>(value: F, r: f64, x: &[f64], sign: f64) -> f64 {
    let m = x.len();
    let obj = |y: &[f64]| cap(r, x, y).map(|c| sign * value(y) + c);
    let k: usize = match m {
        1 => 2001,
        2 => 101,
        _ => 15,
    };
    let mut best = x.to_vec();
    let mut best_v = obj(x).unwrap();
    let mut y = vec![0.0; m];
    for idx in 0..k.pow(m as u32) {
        let mut i = idx;
        for j in 0..m {
            y[j] = x[j] + r * (2.0 * (i % k) as f64 / (k - 1) as f64 - 1.0);
            i /= k;
        }
        if let Some(v) = obj(&y) {
            if v > best_v {
                best_v = v;
                best.copy_from_slice(&y);
            }
        }
    }
    // pattern search polish from the best sample
    let mut step = 2.0 * r / (k - 1) as f64;
    while step > 1e-13 * (1.0 + r) {
        let mut improved = false;
        for j in 0..m {
            for dir in [-1.0, 1.0] {
                let mut t = best.clone();
                t[j] += dir * step;
                if let Some(v) = obj(&t) {
                    if v > best_v {
                        best_v = v;
                        best = t;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    sign * best_v
}

pub fn sup_convolution(f: &GraphFunction, r: f64, x: &[f64]) -> f64 {
    extremum(|y| f.value(y), r, x, 1.0)
}

pub fn inf_convolution(g: &GraphFunction, r: f64, x: &[f64]) -> f64 {
    extremum(|y| g.value(y), r, x, -1.0)
}

/// inf-convolution of an arbitrary evaluable graph, used for round trips.
pub fn inf_convolution_of<F: Fn(&[f64]) -> f64>(g: F, r: f64, x: &[f64]) -> f64 {
    extremum(g, r, x, -1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_and_affine() {
        let zero = GraphFunction::Affine { slope: vec![0.0], offset: 0.0 };
        assert!((sup_convolution(&zero, 0.3, &[1.0]) - 0.3).abs() < 1e-12);
        let a = GraphFunction::Affine { slope: vec![0.5], offset: 0.2 };
        let g = sup_convolution(&a, 0.3, &[1.0]);
        assert!((g - (0.7 + 0.3 * 1.25f64.sqrt())).abs() < 1e-10);
        let back = inf_convolution_of(|y| sup_convolution(&a, 0.3, y), 0.3, &[1.0]);
        assert!((back - 0.7).abs() < 1e-9);
    }
}
