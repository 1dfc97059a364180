//! Embedding of d1-dimensional logical qudits into d2 = d1 a^2 dimensional
//! physical qudits.

use crate::error::{Error, Result};
use crate::pauli::PauliWord;
use crate::program::{CliffordProgram, Instr};
use crate::ring::PauliPhaseRing;
use crate::tableau::Tableau;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EmbeddingParams {
    pub d1: u64,
    pub a: u64,
    pub d2: u64,
}

impl EmbeddingParams {
    pub fn new(d1: u64, a: u64) -> Result<Self> {
        if d1 < 2 || a < 1 {
            return Err(Error::Argument(format!("need d1 >= 2 and a >= 1, got d1={} a={}", d1, a)));
        }
        let d2 = a
            .checked_mul(a)
            .and_then(|a2| a2.checked_mul(d1))
            .filter(|&d2| d2 < (1 << 31))
            .ok_or_else(|| Error::TooLarge(format!("d1={} a={}", d1, a)))?;
        Ok(EmbeddingParams { d1, a, d2 })
    }

    /// Physical phase exponent (in Z_{D2}) equal to one logical phase unit of Z_{D1}.
    fn phase_scale(&self) -> u64 {
        PauliPhaseRing::new(self.d2).big_d / PauliPhaseRing::new(self.d1).big_d
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalPauliMap {
    pub x_image: PauliWord,
    pub z_image: PauliWord,
    pub codespace_stabilizers: [PauliWord; 2],
}

pub fn logical_pauli(p: EmbeddingParams) -> LogicalPauliMap {
    let (a, d2) = (p.a as i64, p.d2);
    let m = (p.d1 * p.a) as i64;
    LogicalPauliMap {
        x_image: PauliWord::single(1, d2, 0, a, 0),
        z_image: PauliWord::single(1, d2, 0, 0, a),
        codespace_stabilizers: [PauliWord::single(1, d2, 0, m, 0), PauliWord::single(1, d2, 0, 0, m)],
    }
}

/// Tableau of `sum_k |(k d1 + j) a>` in dimension d2.
pub fn encode_basis_state(p: EmbeddingParams, j: u64) -> Result<Tableau> {
    if j >= p.d1 {
        return Err(Error::Argument(format!("logical index {} out of range for d1={}", j, p.d1)));
    }
    let mut logical = Tableau::new_zero_state(1, p.d1)?;
    logical.apply_local_pauli(0, j as i64, 0)?;
    encode_tableau(&logical, p.a)
}

/// Maps every logical generator `X^x Z^z` to `X^{ax} Z^{az}` and adds the
/// codespace stabilizers on each qudit.
pub fn encode_tableau(logical: &Tableau, a: u64) -> Result<Tableau> {
    let p = EmbeddingParams::new(logical.d(), a)?;
    let n = logical.n();
    let scale = p.phase_scale() as i64;
    let m = (p.d1 * p.a) as i64;
    let mut gens = Vec::with_capacity(logical.len() + 2 * n);
    for g in logical.generators() {
        let x: Vec<i64> = g.x.iter().map(|&v| v as i64 * a as i64).collect();
        let z: Vec<i64> = g.z.iter().map(|&v| v as i64 * a as i64).collect();
        gens.push(PauliWord::from_parts(p.d2, g.phase as i64 * scale, &x, &z));
    }
    if a > 1 {
        for k in 0..n {
            gens.push(PauliWord::single(n, p.d2, k, m, 0));
            gens.push(PauliWord::single(n, p.d2, k, 0, m));
        }
    }
    Tableau::from_generators(n, p.d2, gens)
}

/// Two-qudit circuit preparing encoded |0> on qudit 0: Fourier, `a` SUMs onto
/// the ancilla, measure the ancilla (outcome `a t`), undo `X^t`, discard.
pub fn generation_circuit(p: EmbeddingParams) -> CliffordProgram {
    let mut prog = CliffordProgram::new();
    prog.push(Instr::Fourier { qudit: 0 });
    for _ in 0..p.a {
        prog.push(Instr::Sum { control: 0, target: 1 });
    }
    prog.push(Instr::MeasureZ { qudit: 1 });
    prog.push(Instr::FeedbackX { target: 0, record: 0, scale: -1, divisor: p.a });
    prog.push(Instr::Discard { qudit: 1 });
    prog
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_in_eight() {
        let t = encode_basis_state(EmbeddingParams::new(2, 2).unwrap(), 0).unwrap();
        let s = t.z_support(0).unwrap();
        assert_eq!((s.offset, s.stride), (0, 4));
        let t1 = encode_basis_state(EmbeddingParams::new(2, 2).unwrap(), 1).unwrap();
        assert!(!t.states_equal(&t1).unwrap());
        assert_eq!(t1.z_support(0).unwrap().offset, 2);
    }

    #[test]
    fn logical_commutation_phase() {
        for (d1, a) in [(2, 2), (3, 2), (2, 3), (5, 1)] {
            let p = EmbeddingParams::new(d1, a).unwrap();
            let m = logical_pauli(p);
            // Z X = omega_{d2}^{a^2} X Z = omega_{d1} X Z
            let c = m.z_image.commutator(&m.x_image);
            assert_eq!(c * d1 % p.d2, 0);
            assert_eq!(c, p.d2 / d1);
            for s in &m.codespace_stabilizers {
                assert!(s.commutes_with(&m.x_image) && s.commutes_with(&m.z_image));
            }
        }
    }
}
