//! Truncated Fock-space simulation of one or two modes with number-diagonal
//! gates. Phases are reduced exactly before conversion to floating point.

use crate::error::{Error, Result};
use crate::oracles::grid::BinnedDistribution;
use num_complex::Complex64;
use num_rational::Ratio;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    pub modes: usize,
    /// Levels per mode, `n_max + 1`.
    pub dim: usize,
    /// Row-major in mode order (mode 0 slowest).
    pub amplitudes: Vec<Complex64>,
}

/// `exp(2 pi i p/q)` with `p/q` reduced modulo 1 in integers.
fn turn(num: i128, den: i128) -> Complex64 {
    let r = num.rem_euclid(den);
    Complex64::from_polar(1.0, 2.0 * PI * r as f64 / den as f64)
}

fn parts(r: Ratio<i64>) -> (i128, i128) {
    (*r.numer() as i128, *r.denom() as i128)
}

impl FockState {
    pub fn single(v: Vec<Complex64>) -> Self {
        FockState { modes: 1, dim: v.len(), amplitudes: v }
    }

    pub fn product(a: &[Complex64], b: &[Complex64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Argument("modes must share the truncation".into()));
        }
        let amplitudes = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
        Ok(FockState { modes: 2, dim: a.len(), amplitudes })
    }

    fn levels(&self, idx: usize) -> [usize; 2] {
        if self.modes == 1 {
            [idx, 0]
        } else {
            [idx / self.dim, idx % self.dim]
        }
    }

    fn check_mode(&self, k: usize) -> Result<()> {
        if k >= self.modes {
            return Err(Error::IndexOutOfRange { index: k, n: self.modes });
        }
        Ok(())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            self.amplitudes.iter_mut().for_each(|a| *a /= n);
        }
    }

    pub fn inner(&self, other: &FockState) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn fidelity(&self, other: &FockState) -> f64 {
        self.inner(other).norm_sqr() / (self.norm_sqr() * other.norm_sqr())
    }

    fn diagonal(&mut self, phase: impl Fn([usize; 2]) -> Complex64) {
        for i in 0..self.amplitudes.len() {
            let n = self.levels(i);
            self.amplitudes[i] *= phase(n);
        }
    }

    /// `exp(2 pi i r n_k)`.
    pub fn rotation(&mut self, k: usize, r: Ratio<i64>) -> Result<()> {
        self.check_mode(k)?;
        let (p, q) = parts(r);
        self.diagonal(|n| turn(p * n[k] as i128, q));
        Ok(())
    }

    /// `exp(2 pi i (u n^2 + v n))` on mode `k`.
    pub fn kerr(&mut self, k: usize, u: Ratio<i64>, v: Ratio<i64>) -> Result<()> {
        self.check_mode(k)?;
        let ((a, b), (c, e)) = (parts(u), parts(v));
        self.diagonal(|n| {
            let n = n[k] as i128;
            turn(a * n * n * e + c * n * b, b * e)
        });
        Ok(())
    }

    /// `exp(2 pi i w n_0 n_1)`.
    pub fn cross_kerr(&mut self, w: Ratio<i64>) -> Result<()> {
        self.check_mode(1)?;
        let (p, q) = parts(w);
        self.diagonal(|n| turn(p * n[0] as i128 * n[1] as i128, q));
        Ok(())
    }

    /// Projects mode `k` onto `bra` and returns the remaining mode and the
    /// probability of the projection.
    pub fn project_mode(&self, k: usize, bra: &[Complex64]) -> Result<(FockState, f64)> {
        self.check_mode(1)?;
        self.check_mode(k)?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for i in 0..self.amplitudes.len() {
            let n = self.levels(i);
            out[n[1 - k]] += bra[n[k]].conj() * self.amplitudes[i];
        }
        let mut s = FockState::single(out);
        let p = s.norm_sqr() / self.norm_sqr();
        s.normalize();
        Ok((s, p))
    }

    /// Probability of each class `n = M (c + d s)` on mode `k`; levels that are
    /// not multiples of `M` count as outside.
    pub fn phase_classes(&self, k: usize, d: u64, m: u64) -> Result<BinnedDistribution> {
        self.joint_classes(&[k], d, m)
    }

    /// Joint class distribution over `ks`, index `c_0 d + c_1` for two modes.
    pub fn joint_classes(&self, ks: &[usize], d: u64, m: u64) -> Result<BinnedDistribution> {
        for &k in ks {
            self.check_mode(k)?;
        }
        let (d, m) = (d as usize, m as usize);
        let mut probabilities = vec![0.0; d.pow(ks.len() as u32)];
        let mut outside = 0.0;
        let total = self.norm_sqr();
        for (i, a) in self.amplitudes.iter().enumerate() {
            let n = self.levels(i);
            let p = a.norm_sqr() / total;
            if ks.iter().any(|&k| !n[k].is_multiple_of(m)) {
                outside += p;
                continue;
            }
            let idx = ks.iter().fold(0, |acc, &k| acc * d + (n[k] / m) % d);
            probabilities[idx] += p;
        }
        let s: f64 = probabilities.iter().sum();
        if s > 0.0 {
            probabilities.iter_mut().for_each(|p| *p /= s);
        }
        Ok(BinnedDistribution { probabilities, outside })
    }

    /// Teleported Fourier gadget: cross-Kerr with `ancilla` in a fresh mode,
    /// then projection of the input onto `ancilla`. Returns the output and the
    /// success probability.
    pub fn fourier_gadget(&self, ancilla: &[Complex64], d: u64, m: u64) -> Result<(FockState, f64)> {
        if self.modes != 1 {
            return Err(Error::Argument("gadget acts on a single-mode state".into()));
        }
        let mut joint = FockState::product(&self.amplitudes, ancilla)?;
        joint.cross_kerr(Ratio::new(1, (d * m * m) as i64))?;
        joint.project_mode(0, ancilla)
    }

    /// Same map as [`FockState::fourier_gadget`] applied in place to mode `k`
    /// of a one- or two-mode state; returns the success probability.
    pub fn apply_fourier_gadget(&mut self, k: usize, ancilla: &[Complex64], d: u64, m: u64) -> Result<f64> {
        self.check_mode(k)?;
        let q = (d * m * m) as i128;
        let dim = self.dim;
        let kernel: Vec<Complex64> = (0..dim * dim)
            .map(|i| {
                let (out, inp) = (i / dim, i % dim);
                ancilla[out] * ancilla[inp].conj() * turn(out as i128 * inp as i128, q)
            })
            .collect();
        let before = self.norm_sqr();
        let (stride, outer) = if self.modes == 1 || k == 1 { (1, self.amplitudes.len() / dim) } else { (dim, dim) };
        let mut col = vec![Complex64::new(0.0, 0.0); dim];
        for o in 0..outer {
            let base = if stride == 1 { o * dim } else { o };
            for (n, c) in col.iter_mut().enumerate() {
                *c = self.amplitudes[base + n * stride];
            }
            for out in 0..dim {
                let row = &kernel[out * dim..(out + 1) * dim];
                self.amplitudes[base + out * stride] = row.iter().zip(&col).map(|(a, b)| a * b).sum();
            }
        }
        let p = self.norm_sqr() / before;
        self.normalize();
        Ok(p)
    }
}
