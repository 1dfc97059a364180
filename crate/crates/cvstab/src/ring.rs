//! Modular arithmetic helpers and the Pauli phase ring.

use serde::{Deserialize, Serialize};

/// Phase ring of the d-dimensional Pauli group.
///
/// Operator phases are stored as exponents of `omega_D = exp(2 pi i / D)`,
/// where `D = d` for odd `d` and `D = 2d` for even `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliPhaseRing {
    pub d: u64,
    pub big_d: u64,
}

impl PauliPhaseRing {
    pub fn new(d: u64) -> Self {
        assert!(d >= 2, "dimension must be at least 2");
        let big_d = if d.is_multiple_of(2) { 2 * d } else { d };
        PauliPhaseRing { d, big_d }
    }

    /// Number of `omega_D` steps in one `omega_d` step.
    pub fn ratio(&self) -> u64 {
        self.big_d / self.d
    }

    /// Exponent of `omega_D` equal to `omega_d^k`.
    pub fn omega_d(&self, k: i64) -> u64 {
        modn(k as i128 * self.ratio() as i128, self.big_d)
    }

    /// Exponent of `omega_D` carried by the phase gate's X image.
    ///
    /// The phase gate maps X to `omega_{2d}^{1-beta} X Z`, which is
    /// `omega_D^1` for even d and trivial for odd d.
    pub fn eta(&self) -> u64 {
        if self.d.is_multiple_of(2) {
            1
        } else {
            0
        }
    }

    pub fn beta(&self) -> u64 {
        self.d % 2
    }
}

/// Reduce a signed value into `[0, n)`.
pub fn modn(v: i128, n: u64) -> u64 {
    v.rem_euclid(n as i128) as u64
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    num_integer::lcm(a, b)
}

/// Extended gcd over the integers: returns `(g, s, t)` with `s a + t b = g`.
pub fn xgcd(a: i64, b: i64) -> (i64, i64, i64) {
    let e = num_integer::Integer::extended_gcd(&a, &b);
    (e.gcd, e.x, e.y)
}

/// A unit `u` of `Z_n` with `u a = gcd(a, n) (mod n)`.
pub fn normalizing_unit(a: u64, n: u64) -> u64 {
    let a = a % n;
    if a == 0 {
        return 1;
    }
    let g = gcd(a, n);
    let m = n / g;
    if m == 1 {
        return 1;
    }
    let (_, s, _) = xgcd((a / g) as i64, m as i64);
    let u0 = modn(s as i128, m);
    let mut u = u0;
    while gcd(u, n) != 1 {
        u += m;
    }
    u % n
}

/// Multiplicative inverse modulo n, if it exists.
pub fn inv_mod(a: u64, n: u64) -> Option<u64> {
    let (g, s, _) = xgcd((a % n) as i64, n as i64);
    if g != 1 {
        return None;
    }
    Some(modn(s as i128, n))
}

// Residue helpers for operands already reduced modulo `m`.
#[inline]
pub(crate) fn add(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
pub(crate) fn neg(a: u64, m: u64) -> u64 {
    if a == 0 {
        0
    } else {
        m - a
    }
}

#[inline]
pub(crate) fn mul(a: u64, b: u64, m: u64) -> u64 {
    if m.is_power_of_two() {
        (a * b) & (m - 1)
    } else {
        a * b % m
    }
}
