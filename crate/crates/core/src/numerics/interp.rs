//! Piecewise cubic Hermite interpolation on sorted abscissae.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Hermite {
    x: Vec<f64>,
    y: Vec<f64>,
    dy: Vec<f64>,
}

impl Hermite {
    pub fn new(x: Vec<f64>, y: Vec<f64>, dy: Vec<f64>) -> Result<Self> {
        if x.len() < 2 || x.len() != y.len() || x.len() != dy.len() {
            return Err(Error::Domain("Hermite table needs >= 2 consistent nodes".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("Hermite abscissae must be strictly increasing".into()));
        }
        Ok(Self { x, y, dy })
    }

    /// Monotone cubic (Fritsch–Carlson) through the data; derivatives are
    /// chosen so the interpolant never overshoots.
    pub fn monotone(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::Domain("monotone interpolant needs >= 2 nodes".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("abscissae must be strictly increasing".into()));
        }
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
        let mut m = vec![0.0; n];
        m[0] = delta[0];
        m[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            m[i] = if delta[i - 1] * delta[i] <= 0.0 { 0.0 } else { 0.5 * (delta[i - 1] + delta[i]) };
        }
        for i in 0..n - 1 {
            if delta[i] == 0.0 {
                m[i] = 0.0;
                m[i + 1] = 0.0;
                continue;
            }
            let a = m[i] / delta[i];
            let b = m[i + 1] / delta[i];
            let s = a * a + b * b;
            if s > 9.0 {
                let t = 3.0 / s.sqrt();
                m[i] = t * a * delta[i];
                m[i + 1] = t * b * delta[i];
            }
        }
        Self::new(x, y, m)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn dy(&self) -> &[f64] {
        &self.dy
    }

    pub fn lo(&self) -> f64 {
        self.x[0]
    }

    pub fn hi(&self) -> f64 {
        *self.x.last().unwrap()
    }

    fn locate(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap_or(std::cmp::Ordering::Less)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    /// Value and first derivative; clamps outside the table.
    pub fn eval2(&self, t: f64) -> (f64, f64) {
        let t = t.clamp(self.lo(), self.hi());
        let i = self.locate(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.dy[i] * h, self.dy[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let v = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * m1;
        let d = ((6.0 * s2 - 6.0 * s) * y0
            + (3.0 * s2 - 4.0 * s + 1.0) * m0
            + (-6.0 * s2 + 6.0 * s) * y1
            + (3.0 * s2 - 2.0 * s) * m1)
            / h;
        (v, d)
    }

    /// Exact range of the interpolant's derivative over the table.
    pub fn derivative_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.x.len() - 1 {
            let h = self.x[i + 1] - self.x[i];
            let (dy, m0, m1) = (self.y[i] - self.y[i + 1], self.dy[i] * h, self.dy[i + 1] * h);
            // h·d(s) = a s² + b s + c on s ∈ [0, 1]
            let a = 6.0 * dy + 3.0 * m0 + 3.0 * m1;
            let b = -6.0 * dy - 4.0 * m0 - 2.0 * m1;
            let c = m0;
            let mut cand = vec![c, a + b + c];
            if a != 0.0 {
                let s = -b / (2.0 * a);
                if s > 0.0 && s < 1.0 {
                    cand.push((a * s + b) * s + c);
                }
            }
            for v in cand {
                lo = lo.min(v / h);
                hi = hi.max(v / h);
            }
        }
        (lo, hi)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval2(t).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubic() {
        let x: Vec<f64> = (0..11).map(|i| i as f64 * 0.3).collect();
        let y = x.iter().map(|t| t * t * t - t).collect();
        let dy = x.iter().map(|t| 3.0 * t * t - 1.0).collect();
        let h = Hermite::new(x, y, dy).unwrap();
        for &t in &[0.05, 1.234, 2.99] {
            assert!((h.eval(t) - (t * t * t - t)).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_has_no_overshoot() {
        let x = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let y = vec![0.0, 0.0, 1.0, 1.0, 1.0];
        let h = Hermite::monotone(x, y).unwrap();
        let mut prev = -1.0;
        for i in 0..=400 {
            let v = h.eval(i as f64 * 0.01);
            assert!(v >= prev - 1e-15 && (0.0..=1.0).contains(&v));
            prev = v;
        }
    }
}
