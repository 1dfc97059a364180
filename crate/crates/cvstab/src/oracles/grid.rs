//! Position-grid simulator for one or two bosonic modes at finite squeezing.
//!
//! The grid is self-dual: `h^2 = 2 pi / N`, so the sampled Fourier transform
//! is exactly a length-N DFT and momentum lives on the same grid as position.
//! Grid points are aligned with the physical lattice `sqrt(2 pi / d2)`.

use crate::error::{Error, Result};
use crate::gkp::{GkpEmbeddingPlan, GkpGate, GkpGateKind};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;
use std::f64::consts::PI;

const EDGE_FRACTION: f64 = 0.05;
const EDGE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub n_points: usize,
    pub h: f64,
    /// Physical lattice spacing `sqrt(2 pi / d2)`.
    pub lattice: f64,
    /// Grid points per lattice step.
    pub steps_per_lattice: usize,
}

impl GridSpec {
    /// Finest-needed grid for peaks of width `delta_peak` under an envelope of
    /// width `1 / delta_env`, capped at `max_points`.
    pub fn for_code(d2: u64, delta_peak: f64, delta_env: f64, max_points: usize) -> Result<GridSpec> {
        if !(delta_peak > 0.0 && delta_env > 0.0) {
            return Err(Error::Grid("squeezing parameters must be positive".into()));
        }
        Self::with_step(d2, delta_peak.min(delta_env) / 6.0, max_points)
    }

    /// Largest lattice-aligned grid step not exceeding `hmax`.
    pub fn with_step(d2: u64, hmax: f64, max_points: usize) -> Result<GridSpec> {
        let lattice = (2.0 * PI / d2 as f64).sqrt();
        let m = (lattice / (8.0 * hmax)).ceil().max(1.0) as usize;
        let n_points = 64 * m * m * d2 as usize;
        if n_points > max_points {
            return Err(Error::Grid(format!("grid needs {} points, cap is {}", n_points, max_points)));
        }
        Ok(GridSpec { n_points, h: lattice / (8 * m) as f64, lattice, steps_per_lattice: 8 * m })
    }

    pub fn q(&self, i: usize) -> f64 {
        (i as f64 - (self.n_points / 2) as f64) * self.h
    }

    pub fn half_extent(&self) -> f64 {
        (self.n_points / 2) as f64 * self.h
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub modes: usize,
    pub spec: GridSpec,
    /// Row-major over modes: index `i0 * N + i1` for two modes.
    pub amplitudes: Vec<Complex64>,
    /// Peak width and envelope parameter used to build the inputs.
    pub squeezing: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinnedDistribution {
    pub probabilities: Vec<f64>,
    /// Probability mass that fell between bins, before renormalizing.
    pub outside: f64,
}

impl GridState {
    /// Finite-squeezing codeword `|j>` of a dimension-`d` GKP code: Gaussian
    /// peaks of width `delta` at `(j + d s) sqrt(2 pi / d)`, weighted by
    /// `exp(-delta_env^2 q_s^2 / 2)`.
    pub fn gkp_codeword(spec: GridSpec, d: u64, j: u64, delta: f64, delta_env: f64) -> Result<GridState> {
        let ell = (2.0 * PI / d as f64).sqrt();
        let n = spec.n_points;
        let mut amps = vec![Complex64::new(0.0, 0.0); n];
        let reach = spec.half_extent();
        let smax = (reach / (ell * d as f64)).ceil() as i64 + 1;
        for s in -smax..=smax {
            let qs = (j as f64 + (d as i64 * s) as f64) * ell;
            let env = (-delta_env * delta_env * qs * qs / 2.0).exp();
            if env < 1e-300 {
                continue;
            }
            let centre = (qs / spec.h).round() as i64 + (n / 2) as i64;
            let w = (10.0 * delta / spec.h).ceil() as i64;
            for i in (centre - w).max(0)..=(centre + w).min(n as i64 - 1) {
                let x = spec.q(i as usize) - qs;
                amps[i as usize] += Complex64::new(env * (-x * x / (2.0 * delta * delta)).exp(), 0.0);
            }
        }
        let mut s = GridState { modes: 1, spec, amplitudes: amps, squeezing: (delta, delta_env) };
        s.normalize();
        s.check_edges()?;
        Ok(s)
    }

    /// Squeezed vacuum of width `sigma` in position.
    pub fn gaussian(spec: GridSpec, sigma: f64) -> GridState {
        let amps = (0..spec.n_points)
            .map(|i| {
                let q = spec.q(i);
                Complex64::new((-q * q / (2.0 * sigma * sigma)).exp(), 0.0)
            })
            .collect();
        let mut s = GridState { modes: 1, spec, amplitudes: amps, squeezing: (sigma, 0.0) };
        s.normalize();
        s
    }

    pub fn product(a: &GridState, b: &GridState) -> Result<GridState> {
        if a.modes != 1 || b.modes != 1 || a.spec != b.spec {
            return Err(Error::Grid("product needs two single-mode states on the same grid".into()));
        }
        let n = a.spec.n_points;
        let mut amps = Vec::with_capacity(n * n);
        for x in &a.amplitudes {
            amps.extend(b.amplitudes.iter().map(|y| x * y));
        }
        Ok(GridState { modes: 2, spec: a.spec, amplitudes: amps, squeezing: a.squeezing })
    }

    fn cell(&self) -> f64 {
        self.spec.h.powi(self.modes as i32)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.cell()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        self.amplitudes.iter_mut().for_each(|a| *a /= n);
    }

    pub fn inner(&self, other: &GridState) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum::<Complex64>() * self.cell()
    }

    pub fn overlap(&self, other: &GridState) -> f64 {
        self.inner(other).norm()
    }

    /// Coordinates of the mode-`k` index of a flat position.
    fn index(&self, flat: usize, k: usize) -> usize {
        let n = self.spec.n_points;
        if self.modes == 1 {
            flat
        } else if k == 0 {
            flat / n
        } else {
            flat % n
        }
    }

    fn check_mode(&self, k: usize) -> Result<()> {
        if k >= self.modes {
            return Err(Error::Grid(format!("mode {} out of range for {} modes", k, self.modes)));
        }
        Ok(())
    }

    /// Probability mass in the outer grid margin of any mode.
    pub fn edge_mass(&self) -> f64 {
        let n = self.spec.n_points;
        let margin = ((n as f64) * EDGE_FRACTION) as usize;
        let near = |i: usize| i < margin || i >= n - margin;
        let mut m = 0.0;
        for (flat, a) in self.amplitudes.iter().enumerate() {
            if (0..self.modes).any(|k| near(self.index(flat, k))) {
                m += a.norm_sqr();
            }
        }
        m * self.cell()
    }

    fn check_edges(&self) -> Result<()> {
        let m = self.edge_mass();
        if m > EDGE_TOL {
            return Err(Error::Grid(format!("{:.2e} of the probability reaches the grid edge", m)));
        }
        Ok(())
    }

    fn diagonal(&mut self, f: impl Fn(&[f64]) -> f64) {
        let mut q = vec![0.0; self.modes];
        for flat in 0..self.amplitudes.len() {
            for (k, qk) in q.iter_mut().enumerate() {
                *qk = self.spec.q(self.index(flat, k));
            }
            self.amplitudes[flat] *= Complex64::from_polar(1.0, f(&q));
        }
    }

    /// `q_k -> q_k + shift`; the shift must be a whole number of grid steps.
    pub fn displace_q(&mut self, k: usize, shift: f64) -> Result<()> {
        self.check_mode(k)?;
        let steps = shift / self.spec.h;
        if (steps - steps.round()).abs() > 1e-6 {
            return Err(Error::Grid(format!("shift {} is not on the grid", shift)));
        }
        let steps = steps.round() as i64;
        let n = self.spec.n_points as i64;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (flat, a) in self.amplitudes.iter().enumerate() {
            let i = self.index(flat, k) as i64;
            let j = i + steps;
            if j < 0 || j >= n {
                continue;
            }
            let dst = if self.modes == 1 {
                j as usize
            } else if k == 0 {
                flat + (steps * n) as usize
            } else {
                (flat as i64 + steps) as usize
            };
            out[dst] = *a;
        }
        self.amplitudes = out;
        self.check_edges()
    }

    /// `exp(i kick q_k)`.
    pub fn kick_p(&mut self, k: usize, kick: f64) -> Result<()> {
        self.check_mode(k)?;
        self.diagonal(|q| kick * q[k]);
        Ok(())
    }

    /// `exp(i (q_k^2 - 2 c q_k) / 2)`.
    pub fn shear(&mut self, k: usize, c: f64) -> Result<()> {
        self.check_mode(k)?;
        self.diagonal(|q| (q[k] * q[k] - 2.0 * c * q[k]) / 2.0);
        Ok(())
    }

    /// `exp(i q_a q_b)`.
    pub fn cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_mode(a)?;
        self.check_mode(b)?;
        if a == b {
            return Err(Error::Grid("cz needs two modes".into()));
        }
        self.diagonal(|q| q[a] * q[b]);
        Ok(())
    }

    /// `psi(x) -> (2 pi)^{-1/2} int exp(+i x q) psi(q) dq` on mode k.
    pub fn fourier(&mut self, k: usize) -> Result<()> {
        self.transform(k, true)
    }

    pub fn fourier_inv(&mut self, k: usize) -> Result<()> {
        self.transform(k, false)
    }

    fn transform(&mut self, k: usize, positive: bool) -> Result<()> {
        self.check_mode(k)?;
        let n = self.spec.n_points;
        let mut planner = FftPlanner::<f64>::new();
        let fft = if positive { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
        let c = (n / 2) as f64;
        let sign = if positive { 1.0 } else { -1.0 };
        // (k-c)(i-c) = ki - c k - c i + c^2, with h^2 = 2 pi / N
        let global = Complex64::from_polar(1.0 / (n as f64).sqrt(), sign * 2.0 * PI * c * c / n as f64);
        let alt: Vec<Complex64> = (0..n)
            .map(|i| Complex64::from_polar(1.0, -sign * 2.0 * PI * c * i as f64 / n as f64))
            .collect();
        let lines = self.amplitudes.len() / n;
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for line in 0..lines {
            let at = |i: usize| if self.modes == 1 || k == 1 { line * n + i } else { i * n + line };
            for (i, b) in buf.iter_mut().enumerate() {
                *b = self.amplitudes[at(i)] * alt[i];
            }
            fft.process(&mut buf);
            for (i, b) in buf.iter().enumerate() {
                let idx = at(i);
                self.amplitudes[idx] = b * alt[i] * global;
            }
        }
        self.check_edges()
    }

    /// Homodyne outcome classes on the lattice `sqrt(2 pi / d2)`: class `j`
    /// collects the mass within `half_width` of every peak `j + d2 s`.
    pub fn homodyne(&self, k: usize, d2: u64, half_width: f64) -> Result<BinnedDistribution> {
        self.check_mode(k)?;
        let ell = (2.0 * PI / d2 as f64).sqrt();
        if half_width >= ell / 2.0 {
            return Err(Error::Grid("homodyne bins overlap".into()));
        }
        let mut probs = vec![0.0; d2 as usize];
        let mut outside = 0.0;
        for (flat, a) in self.amplitudes.iter().enumerate() {
            let q = self.spec.q(self.index(flat, k));
            let r = (q / ell).round();
            let p = a.norm_sqr() * self.cell();
            if (q - r * ell).abs() <= half_width + 1e-12 {
                probs[(r as i64).rem_euclid(d2 as i64) as usize] += p;
            } else {
                outside += p;
            }
        }
        let total: f64 = probs.iter().sum();
        if total <= 0.0 {
            return Err(Error::Grid("no probability inside homodyne bins".into()));
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(BinnedDistribution { probabilities: probs, outside: outside / (outside + total) })
    }

    /// Joint homodyne classes of both modes of a two-mode state, indexed
    /// `j0 * d2 + j1`, renormalized over the mass inside both bins.
    pub fn homodyne_joint(&self, d2: u64, half_width: f64) -> Result<BinnedDistribution> {
        if self.modes != 2 {
            return Err(Error::Grid("joint homodyne needs two modes".into()));
        }
        let ell = (2.0 * PI / d2 as f64).sqrt();
        if half_width >= ell / 2.0 {
            return Err(Error::Grid("homodyne bins overlap".into()));
        }
        let class = |q: f64| {
            let r = (q / ell).round();
            ((q - r * ell).abs() <= half_width + 1e-12).then(|| (r as i64).rem_euclid(d2 as i64) as usize)
        };
        let mut probs = vec![0.0; (d2 * d2) as usize];
        let mut outside = 0.0;
        for (flat, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr() * self.cell();
            match (class(self.spec.q(self.index(flat, 0))), class(self.spec.q(self.index(flat, 1)))) {
                (Some(j0), Some(j1)) => probs[j0 * d2 as usize + j1] += p,
                _ => outside += p,
            }
        }
        let total: f64 = probs.iter().sum();
        if total <= 0.0 {
            return Err(Error::Grid("no probability inside homodyne bins".into()));
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(BinnedDistribution { probabilities: probs, outside: outside / (outside + total) })
    }

    /// Applies a GKP gate, with amounts in units of `sqrt(2 pi / d1)`.
    pub fn apply_gkp_gate(&mut self, plan: &GkpEmbeddingPlan, g: &GkpGate) -> Result<()> {
        let ell1 = (2.0 * PI / plan.d1 as f64).sqrt();
        let m = |i: usize| g.modes.get(i).copied().ok_or_else(|| Error::Grid("gate is missing a mode".into()));
        match &g.kind {
            GkpGateKind::DispQ(t) => self.displace_q(m(0)?, ratio_f64(*t) * ell1),
            GkpGateKind::DispP(t) => self.kick_p(m(0)?, ratio_f64(*t) * ell1),
            GkpGateKind::Shear => self.shear(m(0)?, 0.0),
            GkpGateKind::ShearOdd(t) => self.shear(m(0)?, ratio_f64(*t) * ell1),
            GkpGateKind::Fourier => self.fourier(m(0)?),
            GkpGateKind::Cz => self.cz(m(0)?, m(1)?),
            GkpGateKind::HomodyneQ => Ok(()),
            GkpGateKind::NonClifford { label, .. } => Err(Error::Grid(format!("`{}` has no grid model", label))),
        }
    }
}

fn ratio_f64(r: num_rational::Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
