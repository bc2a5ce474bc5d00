//! Admissible nonlinearities φ with 0 < δ₁ ≤ φ′ ≤ δ₂ and φ(0) = 0, together
//! with the logarithmic transform Φ(s) = ∫₁ˢ φ′(ξ)/ξ dξ and its inverse Ψ.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::interp::Hermite;
use crate::numerics::quadrature;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Sampling window used to validate the derivative bounds.
pub const VALIDATION_RANGE: (f64, f64) = (-10.0, 10.0);
pub const VALIDATION_SAMPLES: usize = 10_000;

const PHI_ZERO_TOL: f64 = 1e-12;
const BOUND_SLACK: f64 = 1e-9;

/// A validated nonlinearity. Cheap to clone; safe to share across threads.
#[derive(Clone)]
pub struct Nonlinearity {
    phi: ScalarFn,
    dphi: ScalarFn,
    delta1: f64,
    delta2: f64,
    name: String,
    c2: bool,
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nonlinearity")
            .field("name", &self.name)
            .field("delta1", &self.delta1)
            .field("delta2", &self.delta2)
            .field("c2", &self.c2)
            .finish()
    }
}

/// Builds and validates a nonlinearity from φ and φ′.
pub fn make_nonlinearity<P, D>(name: &str, phi: P, dphi: D, delta1: f64, delta2: f64) -> Result<Nonlinearity>
where
    P: Fn(f64) -> f64 + Send + Sync + 'static,
    D: Fn(f64) -> f64 + Send + Sync + 'static,
{
    Nonlinearity::build(name, Arc::new(phi), Arc::new(dphi), delta1, delta2, true)
}

impl Nonlinearity {
    fn build(name: &str, phi: ScalarFn, dphi: ScalarFn, delta1: f64, delta2: f64, c2: bool) -> Result<Self> {
        if !(delta1 > 0.0 && delta1.is_finite()) {
            return Err(Error::InvalidNonlinearity(format!("{name}: delta1 = {delta1} must be positive")));
        }
        if !(delta2 >= delta1 && delta2.is_finite()) {
            return Err(Error::InvalidNonlinearity(format!(
                "{name}: delta2 = {delta2} must be >= delta1 = {delta1}"
            )));
        }
        let p0 = phi(0.0);
        if !(p0.abs() <= PHI_ZERO_TOL) {
            return Err(Error::InvalidNonlinearity(format!("{name}: phi(0) = {p0:e}, expected 0")));
        }
        let (lo, hi) = VALIDATION_RANGE;
        let step = (hi - lo) / (VALIDATION_SAMPLES - 1) as f64;
        let (dmin, dmax) = (delta1 * (1.0 - BOUND_SLACK), delta2 * (1.0 + BOUND_SLACK));
        let mut prev = f64::NEG_INFINITY;
        for i in 0..VALIDATION_SAMPLES {
            let s = lo + step * i as f64;
            let d = dphi(s);
            if !(d >= dmin && d <= dmax) {
                return Err(Error::InvalidNonlinearity(format!(
                    "{name}: phi'({s}) = {d} outside [{delta1}, {delta2}]"
                )));
            }
            let v = phi(s);
            if !(v > prev) {
                return Err(Error::InvalidNonlinearity(format!("{name}: phi not increasing near s = {s}")));
            }
            prev = v;
        }
        Ok(Self { phi, dphi, delta1, delta2, name: name.to_string(), c2 })
    }

    /// φ(s) = s.
    pub fn heat() -> Self {
        Self::scaled(1.0).map(|mut n| {
            n.name = "heat".into();
            n
        })
        .expect("heat is admissible")
    }

    /// φ(s) = κ s.
    pub fn scaled(kappa: f64) -> Result<Self> {
        Self::build(
            &format!("scaled({kappa})"),
            Arc::new(move |s| kappa * s),
            Arc::new(move |_| kappa),
            kappa,
            kappa,
            true,
        )
    }

    /// φ(s) = s + a sin s with |a| < 1.
    pub fn sine(a: f64) -> Result<Self> {
        if !(a.abs() < 1.0) {
            return Err(Error::InvalidNonlinearity(format!("sine: |a| = {} must be < 1", a.abs())));
        }
        Self::build(
            &format!("sine({a})"),
            Arc::new(move |s| s + a * s.sin()),
            Arc::new(move |s| 1.0 + a * s.cos()),
            1.0 - a.abs(),
            1.0 + a.abs(),
            true,
        )
    }

    /// Smoothed two-slope ramp: φ′ moves from `d1` to `d2` around `s0` over a
    /// logistic layer of width `w`.
    pub fn ramp(d1: f64, d2: f64, s0: f64, w: f64) -> Result<Self> {
        if !(w > 0.0) {
            return Err(Error::InvalidNonlinearity(format!("ramp: width {w} must be positive")));
        }
        let softplus = |x: f64| x.max(0.0) + (-x.abs()).exp().ln_1p();
        let shift = softplus(-s0 / w);
        let (lo, hi) = (d1.min(d2), d1.max(d2));
        Self::build(
            &format!("ramp({d1},{d2},{s0},{w})"),
            Arc::new(move |s| d1 * s + (d2 - d1) * w * (softplus((s - s0) / w) - shift)),
            Arc::new(move |s| d1 + (d2 - d1) / (1.0 + (-(s - s0) / w).exp())),
            lo,
            hi,
            true,
        )
    }

    /// The ramp used throughout the test suite.
    pub fn default_ramp() -> Self {
        Self::ramp(0.5, 1.5, 0.5, 0.05).expect("default ramp is admissible")
    }

    /// Monotone cubic through tabulated (s, φ(s)) pairs, extended linearly
    /// beyond the table. Bounds are taken from the interpolant's slopes. The
    /// result is C¹ only and is flagged as such.
    pub fn tabulated(name: &str, s: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        let table = Hermite::monotone(s, phi).map_err(|e| Error::InvalidNonlinearity(format!("{name}: {e}")))?;
        let (lo, hi) = (table.lo(), table.hi());
        let (dlo, dhi) = (table.dy()[0], *table.dy().last().unwrap());
        let (ylo, yhi) = (table.y()[0], *table.y().last().unwrap());
        let (dmin, dmax) = table.derivative_range();
        let t1 = Arc::new(table);
        let t2 = t1.clone();
        let phi: ScalarFn = Arc::new(move |x| {
            if x < lo {
                ylo + dlo * (x - lo)
            } else if x > hi {
                yhi + dhi * (x - hi)
            } else {
                t1.eval(x)
            }
        });
        let dphi: ScalarFn = Arc::new(move |x| if x < lo { dlo } else if x > hi { dhi } else { t2.eval2(x).1 });
        Self::build(name, phi, dphi, dmin * (1.0 - 1e-12), dmax * (1.0 + 1e-12), false)
    }

    /// Reads a two-column CSV (s, φ(s)); a header row is allowed.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path)?;
        let (mut s, mut p) = (Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec?;
            if rec.len() < 2 {
                return Err(Error::InvalidNonlinearity(format!("{}: rows need two columns", path.display())));
            }
            match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
                (Ok(a), Ok(b)) => {
                    s.push(a);
                    p.push(b);
                }
                _ if s.is_empty() => continue,
                _ => return Err(Error::InvalidNonlinearity(format!("{}: unparsable row {rec:?}", path.display()))),
            }
        }
        let name = format!("tabulated({})", path.file_name().and_then(|n| n.to_str()).unwrap_or("?"));
        Self::tabulated(&name, s, p)
    }

    pub fn phi(&self, s: f64) -> f64 {
        (self.phi)(s)
    }

    pub fn dphi(&self, s: f64) -> f64 {
        (self.dphi)(s)
    }

    pub fn delta1(&self) -> f64 {
        self.delta1
    }

    pub fn delta2(&self) -> f64 {
        self.delta2
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// False for tabulated imports, whose interpolant is only C¹.
    pub fn is_c2(&self) -> bool {
        self.c2
    }

    /// True when φ′ is constant (δ₁ = δ₂).
    pub fn is_linear(&self) -> bool {
        self.delta1 == self.delta2
    }

    /// ψ(s) = φ(c) − φ(c − s), the reflected nonlinearity used for the
    /// whole-line problem. Admissible with the same bounds.
    pub fn reflected(&self, c: f64) -> Result<Self> {
        let (p, d) = (self.phi.clone(), self.dphi.clone());
        let pc = p(c);
        Self::build(
            &format!("reflect[{}]({c})", self.name),
            Arc::new(move |s| pc - p(c - s)),
            Arc::new(move |s| d(c - s)),
            self.delta1,
            self.delta2,
            self.c2,
        )
    }

    pub fn transform(&self) -> PhiTransform {
        PhiTransform::new(self.clone(), DEFAULT_QUAD_TOL)
    }

    pub fn spec_label(&self) -> String {
        self.name.clone()
    }
}

/// Heat, the s + 0.1 sin s perturbation and the default ramp.
pub fn test_family() -> Vec<Nonlinearity> {
    vec![Nonlinearity::heat(), Nonlinearity::sine(0.1).unwrap(), Nonlinearity::default_ramp()]
}

/// Configuration form of a nonlinearity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum NonlinearitySpec {
    Heat,
    Scaled { kappa: f64 },
    Sine { a: f64 },
    Ramp { d1: f64, d2: f64, s0: f64, w: f64 },
    Tabulated { path: String },
}

impl NonlinearitySpec {
    pub fn build(&self) -> Result<Nonlinearity> {
        match self {
            Self::Heat => Ok(Nonlinearity::heat()),
            Self::Scaled { kappa } => Nonlinearity::scaled(*kappa),
            Self::Sine { a } => Nonlinearity::sine(*a),
            Self::Ramp { d1, d2, s0, w } => Nonlinearity::ramp(*d1, *d2, *s0, *w),
            Self::Tabulated { path } => Nonlinearity::from_csv(Path::new(path)),
        }
    }

    /// Parses the short command-line form: `heat`, `scaled:2`, `sine:0.1`,
    /// `ramp`, `ramp:0.5,1.5,0.5,0.05` or `table:path.csv`.
    pub fn parse(text: &str) -> Result<Self> {
        let (head, rest) = match text.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (text, None),
        };
        let nums = |r: &str| -> Result<Vec<f64>> {
            r.split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad number '{v}' in '{text}'"))))
                .collect()
        };
        match (head, rest) {
            ("heat", None) => Ok(Self::Heat),
            ("scaled", Some(r)) => Ok(Self::Scaled { kappa: nums(r)?[0] }),
            ("sine", Some(r)) => Ok(Self::Sine { a: nums(r)?[0] }),
            ("ramp", None) => Ok(Self::Ramp { d1: 0.5, d2: 1.5, s0: 0.5, w: 0.05 }),
            ("ramp", Some(r)) => match nums(r)?.as_slice() {
                [d1, d2, s0, w] => Ok(Self::Ramp { d1: *d1, d2: *d2, s0: *s0, w: *w }),
                _ => Err(Error::Config(format!("ramp needs four parameters: '{text}'"))),
            },
            ("table" | "tabulated", Some(p)) => Ok(Self::Tabulated { path: p.to_string() }),
            _ => Err(Error::Config(format!("unknown nonlinearity '{text}'"))),
        }
    }
}

pub const DEFAULT_QUAD_TOL: f64 = 1e-13;
/// Below this level Φ is continued analytically instead of by quadrature.
pub const PHI_SPLIT: f64 = 1e-8;
/// Upper limit of Φ's argument for non-linear φ; solution values stay far below.
pub const PHI_MAX: f64 = 1e4;

/// Φ and Ψ for a fixed nonlinearity.
#[derive(Debug, Clone)]
pub struct PhiTransform {
    nl: Nonlinearity,
    tol: f64,
}

impl PhiTransform {
    pub fn new(nl: Nonlinearity, quadrature_tolerance: f64) -> Self {
        Self { nl, tol: quadrature_tolerance }
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nl
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    // Φ(e^τ): for s < 1 in log space, ∫_τ^0 φ′(e^σ) dσ; for s > 1 directly
    // in ξ on unit pieces so oscillating φ′ stays resolved
    fn phi_log(&self, tau: f64) -> Result<f64> {
        if tau == 0.0 {
            return Ok(0.0);
        }
        if self.nl.is_linear() {
            return Ok(self.nl.delta1 * tau);
        }
        let d = &self.nl.dphi;
        if tau < 0.0 {
            return quadrature::integrate(|x| d(x.exp()), 0.0, tau, self.tol);
        }
        let s = tau.exp();
        if s > PHI_MAX {
            return Err(Error::Domain(format!("Phi is only tabulated up to s = {PHI_MAX:e}, got {s:e}")));
        }
        let pieces = (s - 1.0).ceil().max(1.0) as usize;
        let mut breaks: Vec<f64> = (0..pieces).map(|i| 1.0 + i as f64).collect();
        breaks.push(s);
        quadrature::integrate_pieces(|x| d(x) / x, &breaks, self.tol)
    }

    /// Φ(s) = ∫₁ˢ φ′(ξ)/ξ dξ for s > 0.
    pub fn phi(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::Domain(format!("Phi needs s > 0, got {s}")));
        }
        self.phi_of_ln(s.ln())
    }

    /// Φ(e^τ); lets callers pass logarithms of underflowing values.
    pub fn phi_of_ln(&self, tau: f64) -> Result<f64> {
        if !tau.is_finite() {
            return Err(Error::Domain(format!("Phi needs a finite log argument, got {tau}")));
        }
        let split = PHI_SPLIT.ln();
        if tau >= split {
            return self.phi_log(tau);
        }
        // φ′ is nearly constant on (0, 1e-8); the mean-value point keeps the
        // continuation inside the δ-envelopes.
        let base = self.phi_log(split)?;
        let mid = (0.5 * (tau + split)).exp();
        Ok(base + self.nl.dphi(mid) * (tau - split))
    }

    /// ln Ψ(y), usable when Ψ(y) underflows.
    pub fn ln_psi(&self, y: f64) -> Result<f64> {
        if !y.is_finite() {
            return Err(Error::Domain(format!("Psi needs a finite argument, got {y}")));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        let (d1, d2) = (self.nl.delta1, self.nl.delta2);
        let (mut lo, mut hi) = if y > 0.0 { (y / d2, y / d1) } else { (y / d1, y / d2) };
        // guard against the bounds touching through rounding
        let pad = 1e-12 * (1.0 + y.abs());
        lo -= pad;
        hi += pad;
        if self.nl.is_linear() {
            return Ok(y / d1);
        }
        let mut tau = 0.5 * (lo + hi);
        let mut resid = f64::INFINITY;
        for _ in 0..200 {
            let g = self.phi_of_ln(tau)? - y;
            resid = g.abs();
            if resid <= 1e-12 * (1.0 + y.abs()) {
                return Ok(tau);
            }
            if g > 0.0 {
                hi = tau;
            } else {
                lo = tau;
            }
            let slope = self.nl.dphi(tau.exp());
            let mut next = tau - g / slope;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - tau).abs() <= 4.0 * f64::EPSILON * tau.abs().max(1.0) {
                return Ok(next);
            }
            tau = next;
        }
        Err(Error::NoConvergence { what: "Psi inversion", iterations: 200, residual: resid })
    }

    /// Ψ = Φ⁻¹.
    pub fn psi(&self, y: f64) -> Result<f64> {
        let t = self.ln_psi(y)?;
        let s = t.exp();
        if s == 0.0 || !s.is_normal() {
            return Err(Error::Underflow(format!("Psi({y}) = exp({t}) is not representable")));
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heat_values() {
        let t = Nonlinearity::heat().transform();
        assert!((t.phi(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(t.phi(1.0).unwrap(), 0.0);
        assert!((t.psi(-1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(t.psi(0.0).unwrap(), 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(make_nonlinearity("square", |s| s * s, |s| 2.0 * s, 1.0, 2.0).is_err());
        assert!(make_nonlinearity("offset", |s| s + 1.0, |_| 1.0, 1.0, 1.0).is_err());
        assert!(make_nonlinearity("bad-delta", |s| s, |_| 1.0, 0.0, 1.0).is_err());
        assert!(make_nonlinearity("swapped", |s| s, |_| 1.0, 2.0, 1.0).is_err());
        assert!(Nonlinearity::sine(1.0).is_err());
        assert!(Nonlinearity::transform(&Nonlinearity::heat()).phi(0.0).is_err());
    }

    #[test]
    fn sine_accepted() {
        let n = make_nonlinearity("s", |s| s + 0.1 * s.sin(), |s| 1.0 + 0.1 * s.cos(), 0.9, 1.1).unwrap();
        assert!(n.is_c2());
    }

    #[test]
    fn phi_matches_riemann_oracle() {
        let t = Nonlinearity::sine(0.1).unwrap().transform();
        // composite midpoint rule on φ′(ξ)/ξ, 10⁶ panels on [1, 2]
        let n = 1_000_000;
        let h = 1.0 / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let x = 1.0 + (i as f64 + 0.5) * h;
            acc += (1.0 + 0.1 * x.cos()) / x;
        }
        let oracle = acc * h;
        assert!((t.phi(2.0).unwrap() - oracle).abs() < 1e-8);
    }

    #[test]
    fn split_continuation_is_continuous() {
        let t = Nonlinearity::default_ramp().transform();
        let a = t.phi(PHI_SPLIT * (1.0 + 1e-9)).unwrap();
        let b = t.phi(PHI_SPLIT * (1.0 - 1e-9)).unwrap();
        assert!((a - b).abs() < 1e-8);
        assert!(t.phi(1e-300).unwrap() < -300.0);
    }

    #[test]
    fn reflected_bounds() {
        let n = Nonlinearity::default_ramp();
        let r = n.reflected(1.0).unwrap();
        assert_eq!(r.phi(0.0), 0.0);
        assert!((r.dphi(0.3) - n.dphi(0.7)).abs() < 1e-15);
    }

    #[test]
    fn tabulated_round_trip() {
        let s: Vec<f64> = (0..=200).map(|i| -10.0 + 0.1 * i as f64).collect();
        let p = s.iter().map(|&x| x + 0.1 * f64::sin(x)).collect();
        let n = Nonlinearity::tabulated("tab", s, p).unwrap();
        assert!(!n.is_c2());
        assert!((n.phi(0.55) - (0.55 + 0.1 * 0.55f64.sin())).abs() < 1e-5);
        assert!(n.delta1() > 0.89 && n.delta2() < 1.11);
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(NonlinearitySpec::parse("sine:0.1").unwrap(), NonlinearitySpec::Sine { a: 0.1 });
        assert!(NonlinearitySpec::parse("porous").is_err());
    }
}
