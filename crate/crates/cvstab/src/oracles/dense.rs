//! Dense state-vector simulator for n qudits of dimension d.
//!
//! Qudit 0 is the most significant digit of the basis index.

use crate::error::{Error, Result};
use crate::pauli::PauliWord;
use crate::tableau::Tableau;
use num_complex::Complex64;
use std::f64::consts::PI;

const MAX_DIM: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseQuditState {
    pub n: usize,
    pub d: u64,
    pub amplitudes: Vec<Complex64>,
}

fn total_dim(n: usize, d: u64) -> Result<usize> {
    let mut dim: usize = 1;
    for _ in 0..n {
        dim = dim
            .checked_mul(d as usize)
            .filter(|&v| v <= MAX_DIM)
            .ok_or_else(|| Error::TooLarge(format!("{}^{} amplitudes", d, n)))?;
    }
    Ok(dim)
}

impl DenseQuditState {
    pub fn zero(n: usize, d: u64) -> Result<Self> {
        let dim = total_dim(n, d)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(DenseQuditState { n, d, amplitudes })
    }

    pub fn from_amplitudes(n: usize, d: u64, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != total_dim(n, d)? {
            return Err(Error::Argument("amplitude vector has wrong length".into()));
        }
        Ok(DenseQuditState { n, d, amplitudes })
    }

    fn stride(&self, k: usize) -> usize {
        (self.d as usize).pow((self.n - 1 - k) as u32)
    }

    fn digit(&self, idx: usize, k: usize) -> usize {
        (idx / self.stride(k)) % self.d as usize
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        for a in &mut self.amplitudes {
            *a /= n;
        }
    }

    fn omega(&self, k: i64) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * k as f64 / self.d as f64)
    }

    /// Apply a single-qudit matrix `u` (row-major d x d) to qudit k.
    pub fn apply_single(&mut self, k: usize, u: &[Complex64]) {
        let d = self.d as usize;
        let s = self.stride(k);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for idx in 0..self.amplitudes.len() {
            let j = self.digit(idx, k);
            let base = idx - j * s;
            let a = self.amplitudes[idx];
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for row in 0..d {
                out[base + row * s] += u[row * d + j] * a;
            }
        }
        self.amplitudes = out;
    }

    pub fn fourier_matrix(d: u64) -> Vec<Complex64> {
        let du = d as usize;
        let norm = 1.0 / (d as f64).sqrt();
        let mut m = vec![Complex64::new(0.0, 0.0); du * du];
        for j in 0..du {
            for k in 0..du {
                let ph = 2.0 * PI * ((j * k) % du) as f64 / d as f64;
                m[k * du + j] = Complex64::from_polar(norm, ph);
            }
        }
        m
    }

    /// Diagonal of the phase gate, `exp(i pi (j^2 - beta j) / d)`.
    pub fn phase_diagonal(d: u64) -> Vec<Complex64> {
        let beta = (d % 2) as f64;
        (0..d)
            .map(|j| {
                let j = j as f64;
                Complex64::from_polar(1.0, PI * (j * j - beta * j) / d as f64)
            })
            .collect()
    }

    pub fn apply_fourier(&mut self, k: usize) {
        let f = Self::fourier_matrix(self.d);
        self.apply_single(k, &f);
    }

    pub fn apply_fourier_inv(&mut self, k: usize) {
        let du = self.d as usize;
        let f = Self::fourier_matrix(self.d);
        let mut g = vec![Complex64::new(0.0, 0.0); du * du];
        for r in 0..du {
            for c in 0..du {
                g[r * du + c] = f[c * du + r].conj();
            }
        }
        self.apply_single(k, &g);
    }

    pub fn apply_phase_gate(&mut self, k: usize) {
        let diag = Self::phase_diagonal(self.d);
        for idx in 0..self.amplitudes.len() {
            let j = self.digit(idx, k);
            self.amplitudes[idx] *= diag[j];
        }
    }

    pub fn apply_sum(&mut self, c: usize, t: usize) {
        let d = self.d as usize;
        let st = self.stride(t);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for idx in 0..self.amplitudes.len() {
            let i = self.digit(idx, c);
            let j = self.digit(idx, t);
            let nj = (i + j) % d;
            out[idx - j * st + nj * st] = self.amplitudes[idx];
        }
        self.amplitudes = out;
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) {
        for idx in 0..self.amplitudes.len() {
            let i = self.digit(idx, a) as i64;
            let j = self.digit(idx, b) as i64;
            let w = self.omega(i * j);
            self.amplitudes[idx] *= w;
        }
    }

    /// Apply the operator `omega_D^phase prod_k X_k^x Z_k^z`.
    pub fn apply_pauli(&mut self, w: &PauliWord) {
        let d = self.d as usize;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        let global = Complex64::from_polar(1.0, 2.0 * PI * w.phase as f64 / w.ring.big_d as f64);
        for idx in 0..self.amplitudes.len() {
            let mut zexp: u64 = 0;
            let mut target = 0usize;
            for k in 0..self.n {
                let j = self.digit(idx, k);
                zexp += w.z[k] * j as u64;
                target += ((j + w.x[k] as usize) % d) * self.stride(k);
            }
            out[target] += self.amplitudes[idx] * global * self.omega((zexp % self.d) as i64);
        }
        self.amplitudes = out;
    }

    /// Born-rule distribution of a computational-basis measurement of qudit k.
    pub fn distribution(&self, k: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.d as usize];
        for (idx, a) in self.amplitudes.iter().enumerate() {
            p[self.digit(idx, k)] += a.norm_sqr();
        }
        p
    }

    /// Joint distribution over the listed qudits, indexed with the first listed
    /// qudit as most significant digit.
    pub fn joint_distribution(&self, ks: &[usize]) -> Vec<f64> {
        let d = self.d as usize;
        let mut p = vec![0.0; d.pow(ks.len() as u32)];
        for (idx, a) in self.amplitudes.iter().enumerate() {
            let mut key = 0;
            for &k in ks {
                key = key * d + self.digit(idx, k);
            }
            p[key] += a.norm_sqr();
        }
        p
    }

    /// Project qudit k onto outcome m; returns the outcome probability.
    pub fn project(&mut self, k: usize, m: u64) -> f64 {
        for idx in 0..self.amplitudes.len() {
            if self.digit(idx, k) as u64 != m {
                self.amplitudes[idx] = Complex64::new(0.0, 0.0);
            }
        }
        let p = self.norm().powi(2);
        if p > 0.0 {
            self.normalize();
        }
        p
    }

    pub fn inner(&self, other: &DenseQuditState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn fidelity(&self, other: &DenseQuditState) -> f64 {
        self.inner(other).norm_sqr() / (self.norm().powi(2) * other.norm().powi(2))
    }

    /// `<psi| W |psi>` for a Pauli word.
    pub fn expectation(&self, w: &PauliWord) -> Complex64 {
        let mut v = self.clone();
        v.apply_pauli(w);
        self.inner(&v)
    }

    /// State stabilized by a tableau, built by projecting basis vectors onto the
    /// joint +1 eigenspace of all generators.
    pub fn from_tableau(t: &Tableau) -> Result<Self> {
        let dim = total_dim(t.n(), t.d())?;
        for start in 0..dim {
            let mut s = DenseQuditState::zero(t.n(), t.d())?;
            s.amplitudes[0] = Complex64::new(0.0, 0.0);
            s.amplitudes[start] = Complex64::new(1.0, 0.0);
            for g in t.generators() {
                let mut acc = s.clone();
                let mut cur = s.clone();
                for _ in 1..t.d() {
                    cur.apply_pauli(g);
                    for (a, c) in acc.amplitudes.iter_mut().zip(&cur.amplitudes) {
                        *a += c;
                    }
                }
                s = acc;
            }
            if s.norm() > 1e-6 {
                s.normalize();
                return Ok(s);
            }
        }
        Err(Error::InvalidTableau("stabilized subspace is empty".into()))
    }

    /// True if `W |psi> = |psi>` for every generator.
    pub fn is_stabilized_by(&self, t: &Tableau, tol: f64) -> bool {
        t.generators().iter().all(|g| {
            let mut v = self.clone();
            v.apply_pauli(g);
            v.amplitudes
                .iter()
                .zip(&self.amplitudes)
                .all(|(a, b)| (a - b).norm() < tol)
        })
    }
}

/// Projector-free check used by tests: dense state equals tableau state up to phase.
pub fn matches_tableau(s: &DenseQuditState, t: &Tableau, tol: f64) -> Result<bool> {
    let r = DenseQuditState::from_tableau(t)?;
    Ok((1.0 - s.fidelity(&r)).abs() < tol)
}
