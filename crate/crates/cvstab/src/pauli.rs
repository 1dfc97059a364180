//! Generalized Pauli words `omega_D^phase (x) X^x_k Z^z_k`.

use crate::ring::{add, modn, mul, neg, PauliPhaseRing};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A generalized Pauli operator on n qudits of dimension d.
///
/// Each tensor factor is written X before Z, so the operator is
/// `omega_D^phase * prod_k X_k^{x_k} Z_k^{z_k}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliWord {
    pub ring: PauliPhaseRing,
    pub x: Vec<u64>,
    pub z: Vec<u64>,
    pub phase: u64,
}

impl PauliWord {
    pub fn identity(n: usize, d: u64) -> Self {
        PauliWord {
            ring: PauliPhaseRing::new(d),
            x: vec![0; n],
            z: vec![0; n],
            phase: 0,
        }
    }

    /// `X_k^x Z_k^z` acting on qudit `k` only.
    pub fn single(n: usize, d: u64, k: usize, x: i64, z: i64) -> Self {
        let mut w = Self::identity(n, d);
        w.x[k] = modn(x as i128, d);
        w.z[k] = modn(z as i128, d);
        w
    }

    /// Build a word from signed exponents, reducing everything into range.
    pub fn from_parts(d: u64, phase: i64, x: &[i64], z: &[i64]) -> Self {
        let ring = PauliPhaseRing::new(d);
        PauliWord {
            ring,
            x: x.iter().map(|&v| modn(v as i128, d)).collect(),
            z: z.iter().map(|&v| modn(v as i128, d)).collect(),
            phase: modn(phase as i128, ring.big_d),
        }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn d(&self) -> u64 {
        self.ring.d
    }

    pub fn with_phase(mut self, phase: i64) -> Self {
        self.phase = modn(phase as i128, self.ring.big_d);
        self
    }

    /// Column access in the `[x_0..x_{n-1}, z_0..z_{n-1}]` layout.
    #[inline]
    pub fn col(&self, c: usize) -> u64 {
        let n = self.x.len();
        if c < n {
            self.x[c]
        } else {
            self.z[c - n]
        }
    }

    pub fn is_scalar(&self) -> bool {
        self.x.iter().all(|&v| v == 0) && self.z.iter().all(|&v| v == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.is_scalar() && self.phase == 0
    }

    /// Operator product `self * other`.
    pub fn mul(&self, other: &PauliWord) -> PauliWord {
        let mut out = self.clone();
        out.mul_assign(other);
        out
    }

    /// In-place right multiplication `self <- self * other`.
    pub fn mul_assign(&mut self, other: &PauliWord) {
        let d = self.ring.d;
        let mut cross: u64 = 0;
        for k in 0..self.x.len() {
            // Z^{z1} X^{x2} = omega^{z1 x2} X^{x2} Z^{z1}
            cross = (cross + self.z[k] * other.x[k]) % d;
            self.x[k] = (self.x[k] + other.x[k]) % d;
            self.z[k] = (self.z[k] + other.z[k]) % d;
        }
        let big = self.ring.big_d;
        self.phase = (self.phase + other.phase + cross * self.ring.ratio()) % big;
    }

    /// Operator power `self^e` for `e >= 0`.
    pub fn pow(&self, e: u64) -> PauliWord {
        let d = self.ring.d;
        let big = self.ring.big_d;
        if e == 0 {
            return PauliWord::identity(self.n(), d);
        }
        // (w X^x Z^z)^e = w^e omega_d^{x z e(e-1)/2} X^{ex} Z^{ez}, factor by factor
        let tri = ((e as u128 * (e as u128 - 1)) / 2 % d as u128) as u64;
        let mut cross: u64 = 0;
        let em = e % d;
        let mut out = self.clone();
        for k in 0..self.x.len() {
            cross = (cross + (self.x[k] * self.z[k] % d) * tri) % d;
            out.x[k] = self.x[k] * em % d;
            out.z[k] = self.z[k] * em % d;
        }
        let ph = ((self.phase as u128 * e as u128) % big as u128) as u64;
        out.phase = (ph + cross * self.ring.ratio()) % big;
        out
    }

    /// Fused in-place update `self <- self * other^c`.
    pub fn mul_pow_assign(&mut self, other: &PauliWord, c: u64) {
        let d = self.ring.d;
        let c = c % d;
        if c == 0 {
            return;
        }
        let mut cross: u128 = 0;
        let mut diag: u128 = 0;
        for k in 0..self.x.len() {
            let (ox, oz) = (other.x[k], other.z[k]);
            if ox == 0 && oz == 0 {
                continue;
            }
            diag += (ox * oz) as u128;
            let cx = c * ox % d;
            let cz = c * oz % d;
            cross += (self.z[k] * cx) as u128;
            let nx = self.x[k] + cx;
            self.x[k] = if nx >= d { nx - d } else { nx };
            let nz = self.z[k] + cz;
            self.z[k] = if nz >= d { nz - d } else { nz };
        }
        let dd = d as u128;
        let tri = (c as u128 * (c as u128 - 1) / 2) % dd;
        let omega = ((diag % dd) * tri + cross) % dd;
        let big = self.ring.big_d as u128;
        let ph = self.phase as u128 + other.phase as u128 * c as u128 + omega * self.ring.ratio() as u128;
        self.phase = (ph % big) as u64;
    }

    /// Conjugation by the Fourier gate on qudit k: X -> Z, Z -> X^-1.
    #[inline]
    pub fn conj_fourier(&mut self, k: usize) {
        let d = self.ring.d;
        let (x, z) = (self.x[k], self.z[k]);
        // X^x Z^z -> Z^x X^{-z} = omega^{-xz} X^{-z} Z^x
        self.x[k] = neg(z, d);
        self.z[k] = x;
        self.add_omega_d(neg(mul(x, z, d), d));
    }

    /// Conjugation by the inverse Fourier gate: X -> Z^-1, Z -> X.
    #[inline]
    pub fn conj_fourier_inv(&mut self, k: usize) {
        let d = self.ring.d;
        let (x, z) = (self.x[k], self.z[k]);
        // X^x Z^z -> Z^{-x} X^z = omega^{-xz} X^z Z^{-x}
        self.x[k] = z;
        self.z[k] = neg(x, d);
        self.add_omega_d(neg(mul(x, z, d), d));
    }

    /// Conjugation by the phase gate: X -> eta X Z, Z -> Z.
    #[inline]
    pub fn conj_phase(&mut self, k: usize) {
        let d = self.ring.d;
        let (x, z) = (self.x[k], self.z[k]);
        if x == 0 {
            return;
        }
        // (eta X Z)^x Z^z = eta^x omega^{x(x-1)/2} X^x Z^{x+z}
        self.z[k] = add(x, z, d);
        let big = self.ring.big_d;
        if d.is_multiple_of(2) {
            self.phase = add(self.phase, x, big);
        }
        self.add_omega_d(mul(x, x - 1, 2 * d) / 2);
    }

    /// Conjugation by SUM: X_c -> X_c X_t, Z_t -> Z_t Z_c^-1.
    #[inline]
    pub fn conj_sum(&mut self, c: usize, t: usize) {
        let d = self.ring.d;
        self.x[t] = add(self.x[t], self.x[c], d);
        self.z[c] = add(self.z[c], neg(self.z[t], d), d);
    }

    /// Conjugation by CZ: X_a -> X_a Z_b, X_b -> Z_a X_b.
    #[inline]
    pub fn conj_cz(&mut self, a: usize, b: usize) {
        let d = self.ring.d;
        let (xa, xb) = (self.x[a], self.x[b]);
        self.z[a] = add(self.z[a], xb, d);
        self.z[b] = add(self.z[b], xa, d);
        self.add_omega_d(mul(xa, xb, d));
    }

    /// Conjugation by another Pauli word.
    #[inline]
    pub fn conj_pauli(&mut self, w: &PauliWord) {
        let c = w.commutator(self);
        self.add_omega_d(c);
    }

    /// Conjugation by `X_k^x Z_k^z` with exponents already reduced mod d.
    #[inline]
    pub fn conj_local_pauli(&mut self, k: usize, x: u64, z: u64) {
        let d = self.ring.d;
        let c = add(mul(z, self.x[k], d), neg(mul(self.z[k], x, d), d), d);
        self.add_omega_d(c);
    }

    /// Adds `omega_d^k` for `k < d`.
    #[inline]
    fn add_omega_d(&mut self, k: u64) {
        let big = self.ring.big_d;
        let k = if big == self.ring.d { k } else { 2 * k };
        self.phase = add(self.phase, k, big);
    }

    /// Symplectic form: `self * other = omega_d^{form} other * self`.
    pub fn commutator(&self, other: &PauliWord) -> u64 {
        let d = self.ring.d;
        let mut s: i128 = 0;
        for k in 0..self.x.len() {
            s += self.z[k] as i128 * other.x[k] as i128 - other.z[k] as i128 * self.x[k] as i128;
        }
        modn(s, d)
    }

    pub fn commutes_with(&self, other: &PauliWord) -> bool {
        self.commutator(other) == 0
    }

    /// Phase acquired under conjugation by `w`: `w self w^dagger`.
    pub fn conjugated_by(&self, w: &PauliWord) -> PauliWord {
        let mut out = self.clone();
        let c = w.commutator(self);
        out.phase = (out.phase + c * self.ring.ratio()) % self.ring.big_d;
        out
    }

    /// Text form `phase | x.. | z..` used by the tableau serializer.
    pub fn to_line(&self) -> String {
        let xs: Vec<String> = self.x.iter().map(|v| v.to_string()).collect();
        let zs: Vec<String> = self.z.iter().map(|v| v.to_string()).collect();
        format!("{} | {} | {}", self.phase, xs.join(" "), zs.join(" "))
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.phase != 0 {
            write!(f, "w{}^{} ", self.ring.big_d, self.phase)?;
        }
        let mut any = false;
        for k in 0..self.x.len() {
            if self.x[k] != 0 {
                write!(f, "X{}^{} ", k, self.x[k])?;
                any = true;
            }
            if self.z[k] != 0 {
                write!(f, "Z{}^{} ", k, self.z[k])?;
                any = true;
            }
        }
        if !any {
            write!(f, "I")?;
        }
        Ok(())
    }
}
