//! Single-mode Wigner functions of sampled wavefunctions and their negativity.
//!
//! `W(q, p) = (1/pi) int psi*(q + y) psi(q - y) exp(2 i p y) dy` with `[q, p] = i`.
//! The autocorrelation is taken at grid offsets `y = k h` and transformed with
//! one FFT per row, so the momentum window is `|p| < pi / (2h)`.

use crate::circuit::{Code, CvCircuit};
use crate::error::{Error, Result};
use crate::rsb::{default_n_max, rsb_codeword_fock, Primitive, RsbCodewordSpec};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;
use std::f64::consts::PI;

/// A wavefunction sampled at `q0 + i h`, normalized so `sum |psi|^2 h = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    pub q0: f64,
    pub h: f64,
    pub values: Vec<Complex64>,
}

impl Wavefunction {
    /// `n` points symmetric about the origin covering `[-half_extent, half_extent)`.
    pub fn sample(half_extent: f64, n: usize, f: impl Fn(f64) -> Complex64) -> Self {
        let h = 2.0 * half_extent / n as f64;
        let q0 = -half_extent;
        let values = (0..n).map(|i| f(q0 + i as f64 * h)).collect();
        let mut w = Wavefunction { q0, h, values };
        w.normalize();
        w
    }

    pub fn q(&self, i: usize) -> f64 {
        self.q0 + i as f64 * self.h
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.values.len()).map(|i| self.q(i)).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.h
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            self.values.iter_mut().for_each(|a| *a /= n);
        }
    }

    pub fn inner(&self, other: &Wavefunction) -> Complex64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum::<Complex64>() * self.h
    }

    /// `(1/sqrt(2 pi)) int psi(q) exp(-i p q) dq` by direct summation.
    pub fn momentum_amplitude(&self, p: f64) -> Complex64 {
        let s: Complex64 =
            self.values.iter().enumerate().map(|(i, a)| a * Complex64::from_polar(1.0, -p * self.q(i))).sum();
        s * self.h / (2.0 * PI).sqrt()
    }

    /// Momentum mass beyond `|p| >= cutoff`.
    fn momentum_tail(&self, cutoff: f64) -> f64 {
        let n = self.values.len();
        let mut buf = self.values.clone();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let dp = 2.0 * PI / (n as f64 * self.h);
        let total: f64 = buf.iter().map(|a| a.norm_sqr()).sum();
        let tail: f64 = buf
            .iter()
            .enumerate()
            .filter(|(m, _)| {
                let m = if *m < n / 2 { *m as f64 } else { *m as f64 - n as f64 };
                (m * dp).abs() >= cutoff
            })
            .map(|(_, a)| a.norm_sqr())
            .sum();
        tail / total
    }
}

/// Position wavefunction of a state with Fock amplitudes `coeffs`.
pub fn fock_wavefunction(coeffs: &[Complex64], half_extent: f64, n: usize) -> Wavefunction {
    Wavefunction::sample(half_extent, n, |q| {
        let mut prev = 0.0;
        let mut cur = PI.powf(-0.25) * (-q * q / 2.0).exp();
        let mut acc = coeffs.first().copied().unwrap_or_default() * cur;
        for (k, c) in coeffs.iter().enumerate().skip(1) {
            let m = (k - 1) as f64;
            let next = (2.0 / (m + 1.0)).sqrt() * q * cur - (m / (m + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
            acc += c * cur;
        }
        acc
    })
}

/// Finite-squeezing GKP codeword `|j>` in dimension `d`: peaks of width
/// `delta` at `(j + d s) sqrt(2 pi / d)` under an envelope of width `1/delta_env`.
pub fn gkp_wavefunction(d: u64, j: u64, delta: f64, delta_env: f64, half_extent: f64, n: usize) -> Wavefunction {
    let ell = (2.0 * PI / d as f64).sqrt();
    let smax = (half_extent / (ell * d as f64)).ceil() as i64 + 2;
    Wavefunction::sample(half_extent, n, |q| {
        let mut acc = 0.0;
        for s in -smax..=smax {
            let qs = (j as f64 + (d as i64 * s) as f64) * ell;
            let x = q - qs;
            acc += (-delta_env * delta_env * qs * qs / 2.0 - x * x / (2.0 * delta * delta)).exp();
        }
        Complex64::new(acc, 0.0)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseSpaceGrid {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    /// Row-major, one row per position.
    pub values: Vec<f64>,
}

impl PhaseSpaceGrid {
    fn cell(&self) -> f64 {
        (self.q[1] - self.q[0]) * (self.p[1] - self.p[0])
    }

    pub fn at(&self, i: usize, m: usize) -> f64 {
        self.values[i * self.p.len() + m]
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell()
    }

    pub fn q_marginal(&self) -> Vec<f64> {
        let dp = self.p[1] - self.p[0];
        self.values.chunks(self.p.len()).map(|row| row.iter().sum::<f64>() * dp).collect()
    }

    pub fn p_marginal(&self) -> Vec<f64> {
        let dq = self.q[1] - self.q[0];
        (0..self.p.len()).map(|m| (0..self.q.len()).map(|i| self.at(i, m)).sum::<f64>() * dq).collect()
    }

    /// `2 pi int W1 W2 dq dp`, equal to `|<psi1|psi2>|^2` for pure states.
    pub fn overlap(&self, other: &PhaseSpaceGrid) -> Result<f64> {
        if self.q != other.q || self.p != other.p {
            return Err(Error::Grid("phase-space grids differ".into()));
        }
        Ok(2.0 * PI * self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() * self.cell())
    }

    /// CSV rows `q,p,w`, keeping every `stride`-th point along each axis.
    pub fn to_csv(&self, stride: usize) -> String {
        let stride = stride.max(1);
        let mut s = String::from("q,p,w\n");
        for (i, q) in self.q.iter().enumerate().step_by(stride) {
            for (m, p) in self.p.iter().enumerate().step_by(stride) {
                s.push_str(&format!("{:.6},{:.6},{:.9e}\n", q, p, self.at(i, m)));
            }
        }
        s
    }
}

pub fn wigner_of_wavefunction(psi: &Wavefunction) -> Result<PhaseSpaceGrid> {
    let n = psi.values.len();
    if n < 4 {
        return Err(Error::Grid("wavefunction needs at least 4 samples".into()));
    }
    if (psi.norm_sqr() - 1.0).abs() > 1e-6 {
        return Err(Error::Grid(format!("wavefunction norm {} is not 1", psi.norm_sqr())));
    }
    let p_max = PI / (2.0 * psi.h);
    let tail = psi.momentum_tail(p_max);
    if tail > 1e-6 {
        return Err(Error::Grid(format!("momentum content beyond |p| = {:.3}: {:e}; refine the grid", p_max, tail)));
    }
    let fft = FftPlanner::new().plan_fft_inverse(n);
    let signed = |k: usize| if k < n / 2 { k as i64 } else { k as i64 - n as i64 };
    let mut values = vec![0.0; n * n];
    let mut row = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        for (k, slot) in row.iter_mut().enumerate() {
            let y = signed(k);
            let (a, b) = (i as i64 + y, i as i64 - y);
            *slot = if a >= 0 && b >= 0 && (a as usize) < n && (b as usize) < n {
                psi.values[a as usize].conj() * psi.values[b as usize]
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        fft.process(&mut row);
        for m in 0..n {
            // ascending momentum: column m holds frequency signed(m + n/2)
            let src = (m + n / 2) % n;
            values[i * n + m] = row[src].re * psi.h / PI;
        }
    }
    let dp = PI / (n as f64 * psi.h);
    let p = (0..n).map(|m| signed((m + n / 2) % n) as f64 * dp).collect();
    Ok(PhaseSpaceGrid { q: psi.positions(), p, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NegativityReport {
    pub min_value: f64,
    /// `(int |W| - int W) / 2`.
    pub negative_volume: f64,
    /// `ln int |W|`, taken relative to `int W` to absorb discretization error.
    pub log_negativity: f64,
}

pub fn negativity(g: &PhaseSpaceGrid) -> Result<NegativityReport> {
    let total = g.integral();
    if (total - 1.0).abs() > 1e-3 {
        return Err(Error::Grid(format!("Wigner function integrates to {}", total)));
    }
    let abs = g.values.iter().map(|w| w.abs()).sum::<f64>() * g.cell();
    let min_value = g.values.iter().copied().fold(f64::INFINITY, f64::min);
    let negative_volume = (abs - total) / 2.0;
    // round-off of a non-negative function must not read as negativity
    if min_value >= -1e-12 {
        return Ok(NegativityReport { min_value: min_value.max(0.0), negative_volume: 0.0, log_negativity: 0.0 });
    }
    Ok(NegativityReport { min_value, negative_volume, log_negativity: (abs / total).ln() })
}

/// Wavefunction of the codeword a circuit feeds into `mode`, on a grid sized
/// for the peak width `delta` (GKP) or the coherent amplitude (RSB).
pub fn input_wavefunction(c: &CvCircuit, mode: usize, delta: f64, delta_env: f64) -> Result<Wavefunction> {
    let j = *c.inputs.get(mode).ok_or(Error::IndexOutOfRange { index: mode, n: c.modes })?;
    let points = |half: f64, p_band: f64| (2.0 * half / (PI / (2.0 * p_band))).ceil().max(64.0) as usize;
    match c.code {
        Code::Gkp => {
            if !(delta > 0.0 && delta_env > 0.0) {
                return Err(Error::Argument("finite squeezing needs delta > 0".into()));
            }
            let half = 7.0 / delta_env;
            let n = points(half, 7.0 / delta).next_power_of_two();
            Ok(gkp_wavefunction(c.d1, j, delta, delta_env, half, n))
        }
        Code::Rsb { n, primitive } => {
            let Primitive::Coherent(alpha) = primitive else {
                return Err(Error::Argument("the ideal primitive has no wavefunction; declare primitive=coherent:<alpha>".into()));
            };
            let spec = RsbCodewordSpec { d: c.d1, m: n, j, primitive };
            let coeffs = rsb_codeword_fock(&spec, default_n_max(alpha))?;
            let half = 2f64.sqrt() * alpha + 8.0;
            Ok(fock_wavefunction(&coeffs, half, points(half, half).next_power_of_two()))
        }
    }
}
