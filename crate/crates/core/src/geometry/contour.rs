//! Marching squares on a node-centred grid.

pub type Segment = [[f64; 2]; 2];

/// Zero-level segments of `values` (row-major, `nx` × `ny`, x fastest) on
/// the grid x = x0 + i·hx, y = y0 + j·hy. Saddle cells are split using the
/// cell-centre average.
pub fn marching_squares(values: &[f64], nx: usize, ny: usize, origin: [f64; 2], h: [f64; 2]) -> Vec<Segment> {
    let mut out = Vec::new();
    let at = |i: usize, j: usize| values[j * nx + i];
    let lerp = |p: [f64; 2], q: [f64; 2], a: f64, b: f64| {
        let t = a / (a - b);
        [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
    };
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let v = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
            let mut code = 0;
            for (b, val) in v.iter().enumerate() {
                if *val > 0.0 {
                    code |= 1 << b;
                }
            }
            if code == 0 || code == 15 {
                continue;
            }
            let x = origin[0] + i as f64 * h[0];
            let y = origin[1] + j as f64 * h[1];
            let p = [[x, y], [x + h[0], y], [x + h[0], y + h[1]], [x, y + h[1]]];
            // edge k joins corner k and k+1
            let edge = |k: usize| lerp(p[k], p[(k + 1) % 4], v[k], v[(k + 1) % 4]);
            let crossed: Vec<usize> = (0..4).filter(|&k| (v[k] > 0.0) != (v[(k + 1) % 4] > 0.0)).collect();
            if crossed.len() == 2 {
                out.push([edge(crossed[0]), edge(crossed[1])]);
            } else if crossed.len() == 4 {
                let centre = 0.25 * (v[0] + v[1] + v[2] + v[3]);
                // connect so that the centre's side stays joined
                if (centre > 0.0) == (v[0] > 0.0) {
                    out.push([edge(0), edge(1)]);
                    out.push([edge(2), edge(3)]);
                } else {
                    out.push([edge(3), edge(0)]);
                    out.push([edge(1), edge(2)]);
                }
            }
        }
    }
    out
}

/// Length of the part of the segment inside the disk |x − c| < r.
pub fn clipped_length(seg: &Segment, c: [f64; 2], r: f64) -> f64 {
    let [p, q] = *seg;
    let d = [q[0] - p[0], q[1] - p[1]];
    let f = [p[0] - c[0], p[1] - c[1]];
    let a = d[0] * d[0] + d[1] * d[1];
    if a == 0.0 {
        return 0.0;
    }
    let b = 2.0 * (f[0] * d[0] + f[1] * d[1]);
    let cc = f[0] * f[0] + f[1] * f[1] - r * r;
    let disc = b * b - 4.0 * a * cc;
    if disc <= 0.0 {
        return 0.0;
    }
    let sq = disc.sqrt();
    let t0 = ((-b - sq) / (2.0 * a)).max(0.0);
    let t1 = ((-b + sq) / (2.0 * a)).min(1.0);
    if t1 <= t0 {
        return 0.0;
    }
    (t1 - t0) * a.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_perimeter() {
        let n = 401;
        let h = 3.0 / (n - 1) as f64;
        let mut v = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                let (x, y) = (-1.5 + i as f64 * h, -1.5 + j as f64 * h);
                v[j * n + i] = 1.0 - (x * x + y * y).sqrt();
            }
        }
        let segs = marching_squares(&v, n, n, [-1.5, -1.5], [h, h]);
        let len: f64 = segs.iter().map(|s| clipped_length(s, [0.0, 0.0], 10.0)).sum();
        assert!((len - 2.0 * std::f64::consts::PI).abs() < 1e-4);
        // clipping to the right half-disk of radius 1.5 centred at (1, 0)
        let half: f64 = segs.iter().map(|s| clipped_length(s, [1.0, 0.0], 1.0)).sum();
        // arc of the unit circle inside |x − (1,0)| < 1: angle 2π/3
        assert!((half - 2.0 * std::f64::consts::PI / 3.0).abs() < 1e-4);
    }
}
