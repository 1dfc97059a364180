//! GKP circuits: gate IR, choice of the physical dimension, and compilation
//! to qudit Clifford instructions.
//!
//! Amounts are exact rationals in units of the logical lattice spacing
//! `sqrt(2 pi / d1)`. A displacement by `t` units is `t * A` steps of the
//! physical lattice `sqrt(2 pi / d2)`, `d2 = d1 A^2`.

use crate::encoding::{encode_basis_state, EmbeddingParams};
use crate::error::{Error, Result};
use crate::program::{CliffordProgram, Instr};
use crate::ring::lcm;
use crate::tableau::Tableau;
use num_rational::Ratio;
use num_traits::Zero;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GkpGateKind {
    /// Position shift `q -> q + t`.
    DispQ(Ratio<i64>),
    /// Momentum kick `exp(i t q)`.
    DispP(Ratio<i64>),
    /// `exp(i q^2 / 2)`.
    Shear,
    /// `exp(i (q^2 - 2 c q) / 2)` with `c` in lattice units.
    ShearOdd(Ratio<i64>),
    /// `exp(i pi (p^2 + q^2) / 4)`.
    Fourier,
    /// `exp(i q_c q_t)`.
    Cz,
    HomodyneQ,
    NonClifford { label: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GkpGate {
    pub kind: GkpGateKind,
    pub modes: Vec<usize>,
}

impl GkpGate {
    pub fn new(kind: GkpGateKind, modes: &[usize]) -> Self {
        GkpGate { kind, modes: modes.to_vec() }
    }

    pub fn label(&self) -> String {
        let m = self.modes.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" ");
        match &self.kind {
            GkpGateKind::DispQ(t) => format!("dispq {} {}", m, t),
            GkpGateKind::DispP(t) => format!("dispp {} {}", m, t),
            GkpGateKind::Shear => format!("shear {}", m),
            GkpGateKind::ShearOdd(t) => format!("shearodd {} {}", m, t),
            GkpGateKind::Fourier => format!("fourier {}", m),
            GkpGateKind::Cz => format!("cz {}", m),
            GkpGateKind::HomodyneQ => format!("homodyne {}", m),
            GkpGateKind::NonClifford { label, .. } => format!("{} {}", label, m),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GkpEmbeddingPlan {
    pub d1: u64,
    pub a: u64,
    pub d2: u64,
    /// True when A was enlarged beyond the displacement lcm so the shears compile.
    pub parity_fix: bool,
}

impl GkpEmbeddingPlan {
    pub fn params(&self) -> EmbeddingParams {
        EmbeddingParams { d1: self.d1, a: self.a, d2: self.d2 }
    }

    /// Tableau of the encoded computational-basis product state.
    pub fn initial_state(&self, inputs: &[u64]) -> Result<Tableau> {
        product_state(self.params(), inputs)
    }
}

pub(crate) fn product_state(p: EmbeddingParams, inputs: &[u64]) -> Result<Tableau> {
    let mut t: Option<Tableau> = None;
    for &j in inputs {
        let e = encode_basis_state(p, j)?;
        t = Some(match t {
            None => e,
            Some(prev) => prev.tensor(&e)?,
        });
    }
    t.ok_or_else(|| Error::Argument("circuit has no modes".into()))
}

fn ratio_u64(den: i64) -> u64 {
    den.unsigned_abs()
}

/// Smallest A compatible with every gate of the circuit.
pub fn resolve_embedding(d1: u64, gates: &[GkpGate]) -> Result<GkpEmbeddingPlan> {
    if d1 < 2 {
        return Err(Error::Argument(format!("d1 must be at least 2, got {}", d1)));
    }
    let mut a0 = 1u64;
    let mut odd_shears = Vec::new();
    let mut shear = false;
    for g in gates {
        match &g.kind {
            GkpGateKind::NonClifford { label, reason } => {
                return Err(Error::NonCliffordGate { label: label.clone(), reason: reason.clone() })
            }
            GkpGateKind::DispQ(t) | GkpGateKind::DispP(t) => a0 = lcm(a0, ratio_u64(*t.denom())),
            GkpGateKind::Shear => shear = true,
            GkpGateKind::ShearOdd(t) => odd_shears.push(*t),
            _ => {}
        }
    }
    let period = odd_shears.iter().fold(1u64, |acc, t| lcm(acc, ratio_u64(*t.denom())));
    let fits = |a: u64| -> bool {
        let d2 = d1 * a * a;
        if shear && d2 % 2 == 1 {
            return false;
        }
        let half = Ratio::new((d2 % 2) as i64, 2);
        odd_shears.iter().all(|t| (*t * a as i64 - half).is_integer())
    };
    for k in 1..=4 * period {
        let a = a0 * k;
        if fits(a) {
            EmbeddingParams::new(d1, a)?;
            return Ok(GkpEmbeddingPlan { d1, a, d2: d1 * a * a, parity_fix: k > 1 });
        }
    }
    Err(Error::NotAdmitted(format!("no lattice refinement of d1={} admits every shear", d1)))
}

fn lattice_steps(plan: &GkpEmbeddingPlan, t: Ratio<i64>, label: &str) -> Result<i64> {
    let s = t * plan.a as i64;
    if !s.is_integer() {
        return Err(Error::NotAdmitted(format!("`{}` needs A divisible by {}", label, t.denom())));
    }
    Ok(s.to_integer())
}

pub fn compile_gate(plan: &GkpEmbeddingPlan, g: &GkpGate) -> Result<CliffordProgram> {
    let mut p = CliffordProgram::new();
    let m = |i: usize| -> Result<usize> {
        g.modes.get(i).copied().ok_or_else(|| Error::Argument(format!("`{}` is missing a mode", g.label())))
    };
    match &g.kind {
        GkpGateKind::DispQ(t) => p.push(Instr::Pauli { qudit: m(0)?, x: lattice_steps(plan, *t, &g.label())?, z: 0 }),
        GkpGateKind::DispP(t) => p.push(Instr::Pauli { qudit: m(0)?, x: 0, z: lattice_steps(plan, *t, &g.label())? }),
        GkpGateKind::Fourier => p.push(Instr::Fourier { qudit: m(0)? }),
        GkpGateKind::Shear => {
            if plan.d2 % 2 == 1 {
                return Err(Error::NotAdmitted(format!("`{}` needs even d2, plan has {}", g.label(), plan.d2)));
            }
            p.push(Instr::Phase { qudit: m(0)? });
        }
        GkpGateKind::ShearOdd(t) => {
            let half = Ratio::new((plan.d2 % 2) as i64, 2);
            let z = *t * plan.a as i64 - half;
            if !z.is_integer() {
                return Err(Error::NotAdmitted(format!("`{}` does not fit d2={}", g.label(), plan.d2)));
            }
            let k = m(0)?;
            p.push(Instr::Phase { qudit: k });
            if !z.is_zero() {
                p.push(Instr::Pauli { qudit: k, x: 0, z: -z.to_integer() });
            }
        }
        GkpGateKind::Cz => {
            let (c, t) = (m(0)?, m(1)?);
            p.push(Instr::FourierInv { qudit: t });
            p.push(Instr::Sum { control: c, target: t });
            p.push(Instr::Fourier { qudit: t });
        }
        GkpGateKind::HomodyneQ => p.push(Instr::MeasureZ { qudit: m(0)? }),
        GkpGateKind::NonClifford { label, reason } => {
            return Err(Error::NonCliffordGate { label: label.clone(), reason: reason.clone() })
        }
    }
    Ok(p)
}

pub fn compile_circuit(plan: &GkpEmbeddingPlan, gates: &[GkpGate]) -> Result<CliffordProgram> {
    let mut p = CliffordProgram::new();
    for g in gates {
        p.extend(compile_gate(plan, g)?);
    }
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HomodyneDecode {
    pub d2_index: u64,
    /// Peak position `sqrt(2 pi / d2) * j`, within one period `sqrt(2 pi d2)`.
    pub position_residue: f64,
    /// Logical value, or `None` when the peak is off the logical sublattice.
    pub logical: Option<u64>,
}

pub fn homodyne_outcome_decode(plan: &GkpEmbeddingPlan, outcome: u64) -> HomodyneDecode {
    let j = outcome % plan.d2;
    HomodyneDecode {
        d2_index: j,
        position_residue: (2.0 * PI / plan.d2 as f64).sqrt() * j as f64,
        logical: j.is_multiple_of(plan.a).then(|| (j / plan.a) % plan.d1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Ratio<i64> {
        Ratio::new(n, d)
    }

    #[test]
    fn resolver_examples() {
        let g = [GkpGate::new(GkpGateKind::DispQ(r(1, 2)), &[0])];
        assert_eq!(resolve_embedding(2, &g).unwrap(), GkpEmbeddingPlan { d1: 2, a: 2, d2: 8, parity_fix: false });
        let g = [GkpGate::new(GkpGateKind::DispQ(r(3, 1)), &[0]), GkpGate::new(GkpGateKind::Fourier, &[0])];
        assert_eq!(resolve_embedding(2, &g).unwrap().d2, 2);
        let g = [GkpGate::new(GkpGateKind::Shear, &[0])];
        let p = resolve_embedding(3, &g).unwrap();
        assert_eq!((p.a, p.d2, p.parity_fix), (2, 12, true));
        let g = [GkpGate::new(GkpGateKind::ShearOdd(r(1, 2)), &[0])];
        let p = resolve_embedding(3, &g).unwrap();
        assert_eq!((p.a, p.d2, p.parity_fix), (1, 3, false));
    }

    #[test]
    fn decode_examples() {
        let p = GkpEmbeddingPlan { d1: 2, a: 2, d2: 8, parity_fix: false };
        assert_eq!(homodyne_outcome_decode(&p, 4).logical, Some(0));
        assert_eq!(homodyne_outcome_decode(&p, 2).logical, Some(1));
        assert_eq!(homodyne_outcome_decode(&p, 1).logical, None);
        let q = GkpEmbeddingPlan { d1: 2, a: 1, d2: 2, parity_fix: false };
        assert_eq!(homodyne_outcome_decode(&q, 1).logical, Some(1));
    }
}
