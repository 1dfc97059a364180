//! Rotation-symmetric bosonic codes: gate IR, codewords, the two embedding
//! methods and compilation to qudit Clifford instructions.
//!
//! Gate parameters are exact rationals multiplying `2 pi`: a rotation `r` is
//! `exp(2 pi i r n)`, a self-Kerr `(u, v)` is `exp(2 pi i (u n^2 + v n))` and a
//! cross-Kerr `w` is `exp(2 pi i w n_k n_l)`.

use crate::encoding::EmbeddingParams;
use crate::error::{Error, Result};
use crate::gkp::product_state;
use crate::oracles::fock::FockState;
use crate::program::{CliffordProgram, Instr};
use crate::tableau::Tableau;
use num_complex::Complex64;
use num_rational::Ratio;
use serde::Serialize;

const MAX_D2: u64 = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RsbGateKind {
    Rotation(Ratio<i64>),
    SelfKerr { u: Ratio<i64>, v: Ratio<i64> },
    CrossKerr(Ratio<i64>),
    TeleportedFourier,
    PhaseMeasure,
    NonClifford { label: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsbGate {
    pub kind: RsbGateKind,
    pub modes: Vec<usize>,
}

impl RsbGate {
    pub fn new(kind: RsbGateKind, modes: &[usize]) -> Self {
        RsbGate { kind, modes: modes.to_vec() }
    }

    pub fn label(&self) -> String {
        let m = self.modes.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" ");
        match &self.kind {
            RsbGateKind::Rotation(r) => format!("rot {} {}", m, r),
            RsbGateKind::SelfKerr { u, v } => format!("kerr {} {} {}", m, u, v),
            RsbGateKind::CrossKerr(w) => format!("xkerr {} {}", m, w),
            RsbGateKind::TeleportedFourier => format!("tfourier {}", m),
            RsbGateKind::PhaseMeasure => format!("phasemeas {}", m),
            RsbGateKind::NonClifford { label, .. } => format!("{} {}", label, m),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Primitive {
    IdealOrthogonal,
    Coherent(f64),
}

/// `|j_d; M>`: the primitive projected onto Fock levels `j M + s d M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RsbCodewordSpec {
    pub d: u64,
    pub m: u64,
    pub j: u64,
    pub primitive: Primitive,
}

impl RsbCodewordSpec {
    pub fn support(&self, n_max: usize) -> Vec<usize> {
        let (start, step) = ((self.j * self.m) as usize, (self.d * self.m) as usize);
        (start..=n_max).step_by(step.max(1)).collect()
    }
}

/// `|u^0_d; M>`, the uniform superposition of the d codewords.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XBasisCodeword {
    pub d: u64,
    pub m: u64,
    pub k: u64,
    pub primitive: Primitive,
}

pub fn xbasis_codeword(d2: u64, m2: u64, primitive: Primitive) -> XBasisCodeword {
    XBasisCodeword { d: d2, m: m2, k: 0, primitive }
}

pub fn default_n_max(alpha: f64) -> usize {
    let a = alpha.abs();
    (a * a + 8.0 * a + 20.0).ceil() as usize
}

/// Fock amplitudes of a coherent state with real amplitude `alpha`.
pub fn coherent_amplitudes(alpha: f64, n_max: usize) -> Result<Vec<f64>> {
    let mut c = Vec::with_capacity(n_max + 1);
    c.push((-alpha * alpha / 2.0).exp());
    for n in 1..=n_max {
        let prev = c[n - 1];
        c.push(prev * alpha / (n as f64).sqrt());
    }
    let loss = 1.0 - c.iter().map(|x| x * x).sum::<f64>();
    if loss > 1e-8 {
        return Err(Error::Truncation(loss));
    }
    Ok(c)
}

fn primitive_amplitudes(p: Primitive, n_max: usize) -> Result<Vec<f64>> {
    match p {
        Primitive::Coherent(alpha) => coherent_amplitudes(alpha, n_max),
        Primitive::IdealOrthogonal => {
            Err(Error::Argument("the ideal primitive has no Fock vector; use the support only".into()))
        }
    }
}

fn normalized(mut v: Vec<Complex64>) -> Result<Vec<Complex64>> {
    let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if n == 0.0 {
        return Err(Error::Argument("codeword vanishes under truncation".into()));
    }
    v.iter_mut().for_each(|a| *a /= n);
    Ok(v)
}

/// Normalized Fock vector of `|j_d; M>` on levels `0..=n_max`.
pub fn rsb_codeword_fock(spec: &RsbCodewordSpec, n_max: usize) -> Result<Vec<Complex64>> {
    normalized(codeword_unnormalized(spec, n_max)?)
}

/// `sum_m omega^{-jm} R^m |phi> / sqrt(d M)`, i.e. the codeword with the
/// normalization it has for perfectly orthogonal rotated primitives.
pub fn codeword_unnormalized(spec: &RsbCodewordSpec, n_max: usize) -> Result<Vec<Complex64>> {
    let c = primitive_amplitudes(spec.primitive, n_max)?;
    let scale = ((spec.d * spec.m) as f64).sqrt();
    let mut v = vec![Complex64::new(0.0, 0.0); n_max + 1];
    for n in spec.support(n_max) {
        v[n] = Complex64::new(scale * c[n], 0.0);
    }
    Ok(v)
}

impl XBasisCodeword {
    pub fn fock(&self, n_max: usize) -> Result<Vec<Complex64>> {
        let c = primitive_amplitudes(self.primitive, n_max)?;
        let dm = (self.d * self.m) as f64;
        let mut v = vec![Complex64::new(0.0, 0.0); n_max + 1];
        for n in (0..=n_max).step_by(self.m as usize) {
            let ph = -2.0 * std::f64::consts::PI * ((self.k * n as u64) % (self.d * self.m)) as f64 / dm;
            v[n] = Complex64::from_polar(c[n], ph);
        }
        normalized(v)
    }
}

/// `max_{0 < s < dM} |<phi| exp(2 pi i s n / (d M)) |phi>|`.
pub fn orthogonality_defect(primitive: Primitive, d: u64, m: u64, n_max: usize) -> Result<f64> {
    let c = match primitive {
        Primitive::IdealOrthogonal => return Ok(0.0),
        Primitive::Coherent(a) => coherent_amplitudes(a, n_max)?,
    };
    let dm = d * m;
    let mut worst: f64 = 0.0;
    for s in 1..dm {
        let z: Complex64 = c
            .iter()
            .enumerate()
            .map(|(n, x)| {
                let ph = 2.0 * std::f64::consts::PI * ((s * n as u64) % dm) as f64 / dm as f64;
                Complex64::from_polar(x * x, ph)
            })
            .sum();
        worst = worst.max(z.norm());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    /// Fidelity with the right-hand side built from codewords carrying the
    /// orthogonal-primitive normalization `d2 M2`.
    pub fidelity: f64,
    /// Same, with every d2 codeword normalized on its own.
    pub fidelity_individual: f64,
    pub defect: f64,
}

/// Compares `|j_{d1}; N>` with `a^{-1/2} sum_t |(a j + a d1 t)_{d2}; N/a>`.
pub fn method1_identity_check(
    d1: u64,
    n: u64,
    a: u64,
    j: u64,
    primitive: Primitive,
    n_max: usize,
) -> Result<IdentityCheck> {
    if a == 0 || !n.is_multiple_of(a) {
        return Err(Error::Argument(format!("a={} does not divide N={}", a, n)));
    }
    let d2 = d1 * a * a;
    let m2 = n / a;
    let lhs = rsb_codeword_fock(&RsbCodewordSpec { d: d1, m: n, j, primitive }, n_max)?;
    let mut ideal = vec![Complex64::new(0.0, 0.0); n_max + 1];
    let mut indiv = ideal.clone();
    for t in 0..a {
        let spec = RsbCodewordSpec { d: d2, m: m2, j: (a * j + a * d1 * t) % d2, primitive };
        for (acc, x) in ideal.iter_mut().zip(codeword_unnormalized(&spec, n_max)?) {
            *acc += x;
        }
        for (acc, x) in indiv.iter_mut().zip(rsb_codeword_fock(&spec, n_max)?) {
            *acc += x;
        }
    }
    let fid = |v: Vec<Complex64>| -> Result<f64> {
        let v = normalized(v)?;
        Ok(lhs.iter().zip(&v).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm_sqr())
    };
    Ok(IdentityCheck {
        fidelity: fid(ideal)?,
        fidelity_individual: fid(indiv)?,
        defect: orthogonality_defect(primitive, d2, m2, n_max)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RsbEmbeddingPlan {
    pub method: Method,
    pub d1: u64,
    /// Rotation order of the logical code.
    pub n: u64,
    /// Embedding factor of method one (1 for method two).
    pub a: u64,
    pub d2: u64,
    pub m2: u64,
}

impl RsbEmbeddingPlan {
    fn beta(&self) -> i64 {
        (self.d2 % 2) as i64
    }

    /// Initial tableau for logical inputs `inputs`.
    pub fn initial_state(&self, inputs: &[u64]) -> Result<Tableau> {
        match self.method {
            Method::One => product_state(EmbeddingParams::new(self.d1, self.a)?, inputs),
            Method::Two => {
                if let Some((mode, &j)) = inputs.iter().enumerate().find(|(_, &j)| j != 0) {
                    return Err(Error::MethodTwoInputViolation { mode, j });
                }
                let mut t = Tableau::new_zero_state(inputs.len(), self.d2)?;
                for k in 0..inputs.len() {
                    t.apply_fourier(k)?;
                }
                Ok(t)
            }
        }
    }

    /// Logical d1 value of a phase-measurement outcome, when it has one.
    pub fn decode(&self, outcome: u64) -> Option<u64> {
        match self.method {
            Method::One => outcome.is_multiple_of(self.a).then(|| (outcome / self.a) % self.d1),
            Method::Two => None,
        }
    }

    fn units(&self) -> i64 {
        (self.d2 * self.m2) as i64
    }

    fn rotation_power(&self, r: Ratio<i64>) -> Option<i64> {
        let k = r * self.units();
        k.is_integer().then(|| k.to_integer())
    }

    /// `(m, k)` with the self-Kerr equal to `S^m Z^k`.
    fn kerr_powers(&self, u: Ratio<i64>, v: Ratio<i64>) -> Option<(i64, i64)> {
        let m = u * (2 * self.units() * self.m2 as i64);
        if !m.is_integer() {
            return None;
        }
        let m = m.to_integer();
        let k = (v + Ratio::new(m * self.beta(), 2 * self.units())) * self.units();
        k.is_integer().then(|| (m, k.to_integer()))
    }

    fn cross_power(&self, w: Ratio<i64>) -> Option<i64> {
        let k = w * (self.units() * self.m2 as i64);
        k.is_integer().then(|| k.to_integer())
    }

    fn admits(&self, g: &RsbGate) -> bool {
        match &g.kind {
            RsbGateKind::Rotation(r) => self.rotation_power(*r).is_some(),
            RsbGateKind::SelfKerr { u, v } => self.kerr_powers(*u, *v).is_some(),
            RsbGateKind::CrossKerr(w) => self.cross_power(*w).is_some(),
            RsbGateKind::TeleportedFourier | RsbGateKind::PhaseMeasure => true,
            RsbGateKind::NonClifford { .. } => false,
        }
    }
}

fn first_non_clifford(gates: &[RsbGate]) -> Result<()> {
    for g in gates {
        if let RsbGateKind::NonClifford { label, reason } = &g.kind {
            return Err(Error::NonCliffordGate { label: label.clone(), reason: reason.clone() });
        }
    }
    Ok(())
}

fn method_one(d1: u64, n: u64, gates: &[RsbGate]) -> Option<RsbEmbeddingPlan> {
    (1..=n).filter(|a| n.is_multiple_of(*a)).find_map(|a| {
        let d2 = d1.checked_mul(a * a)?;
        let plan = RsbEmbeddingPlan { method: Method::One, d1, n, a, d2, m2: n / a };
        (d2 <= MAX_D2 && gates.iter().all(|g| plan.admits(g))).then_some(plan)
    })
}

fn method_two(d1: u64, n: u64, gates: &[RsbGate]) -> Option<RsbEmbeddingPlan> {
    (2..=MAX_D2).find_map(|d2| {
        let plan = RsbEmbeddingPlan { method: Method::Two, d1, n, a: 1, d2, m2: d1 * n };
        gates.iter().all(|g| plan.admits(g)).then_some(plan)
    })
}

/// Chooses the method and dimension. Without a hint method one is preferred;
/// method two is only used when every input is logical 0.
pub fn resolve_embedding_rsb(
    d1: u64,
    n: u64,
    gates: &[RsbGate],
    inputs: &[u64],
    hint: Option<Method>,
) -> Result<RsbEmbeddingPlan> {
    if d1 < 2 || n < 1 {
        return Err(Error::Argument(format!("need d1 >= 2 and N >= 1, got d1={} N={}", d1, n)));
    }
    first_non_clifford(gates)?;
    let bad_input = inputs.iter().enumerate().find(|(_, &j)| j != 0);
    let two = || -> Result<RsbEmbeddingPlan> {
        let plan = method_two(d1, n, gates)
            .ok_or_else(|| Error::NotAdmitted(format!("no dimension up to {} admits every gate", MAX_D2)))?;
        if let Some((mode, &j)) = bad_input {
            return Err(Error::MethodTwoInputViolation { mode, j });
        }
        Ok(plan)
    };
    match hint {
        Some(Method::One) => method_one(d1, n, gates)
            .ok_or_else(|| Error::NotAdmitted("no divisor a of N admits every gate".into())),
        Some(Method::Two) => two(),
        None => match method_one(d1, n, gates) {
            Some(p) => Ok(p),
            None => two().map_err(|e| match e {
                Error::NotAdmitted(_) => Error::NotAdmitted(
                    "neither method admits every gate (mixed method-one and method-two gates are refused)".into(),
                ),
                other => other,
            }),
        },
    }
}

pub fn compile_gate_rsb(plan: &RsbEmbeddingPlan, g: &RsbGate) -> Result<CliffordProgram> {
    let mut p = CliffordProgram::new();
    let d2 = plan.d2 as i64;
    let m = |i: usize| -> Result<usize> {
        g.modes.get(i).copied().ok_or_else(|| Error::Argument(format!("`{}` is missing a mode", g.label())))
    };
    let reject = || Error::NotAdmitted(format!("`{}` does not match d2={} M={}", g.label(), plan.d2, plan.m2));
    match &g.kind {
        RsbGateKind::Rotation(r) => {
            let k = plan.rotation_power(*r).ok_or_else(reject)?.rem_euclid(d2);
            if k != 0 {
                p.push(Instr::Pauli { qudit: m(0)?, x: 0, z: k });
            }
        }
        RsbGateKind::SelfKerr { u, v } => {
            let (s, k) = plan.kerr_powers(*u, *v).ok_or_else(reject)?;
            let q = m(0)?;
            for _ in 0..s.rem_euclid(2 * d2) {
                p.push(Instr::Phase { qudit: q });
            }
            if k.rem_euclid(d2) != 0 {
                p.push(Instr::Pauli { qudit: q, x: 0, z: k.rem_euclid(d2) });
            }
        }
        RsbGateKind::CrossKerr(w) => {
            let k = plan.cross_power(*w).ok_or_else(reject)?.rem_euclid(d2);
            let (c, t) = (m(0)?, m(1)?);
            if k != 0 {
                p.push(Instr::FourierInv { qudit: t });
                for _ in 0..k {
                    p.push(Instr::Sum { control: c, target: t });
                }
                p.push(Instr::Fourier { qudit: t });
            }
        }
        RsbGateKind::TeleportedFourier => {
            let q = m(0)?;
            p.push(Instr::Fourier { qudit: q });
            p.push(Instr::Postselect { label: format!("tfourier {}", q), numer: 1, denom: plan.d2 });
        }
        RsbGateKind::PhaseMeasure => p.push(Instr::MeasureZ { qudit: m(0)? }),
        RsbGateKind::NonClifford { label, reason } => {
            return Err(Error::NonCliffordGate { label: label.clone(), reason: reason.clone() })
        }
    }
    Ok(p)
}

pub fn compile_circuit_rsb(plan: &RsbEmbeddingPlan, gates: &[RsbGate]) -> Result<CliffordProgram> {
    let mut p = CliffordProgram::new();
    for g in gates {
        p.extend(compile_gate_rsb(plan, g)?);
    }
    Ok(p)
}

/// Fock-oracle result for a compiled RSB circuit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FockRun {
    /// Modes of the phase measurements, in circuit order.
    pub measured_modes: Vec<usize>,
    /// Joint class distribution over `measured_modes`, first mode slowest.
    pub distribution: Vec<f64>,
    /// Mass on Fock levels outside every class.
    pub outside: f64,
    pub gadget_probabilities: Vec<f64>,
    pub defect: f64,
    pub n_max: usize,
}

/// Runs the circuit on the logical inputs in a truncated Fock space. Phase
/// measurements must be the last operation on their mode.
pub fn fock_simulate(
    plan: &RsbEmbeddingPlan,
    gates: &[RsbGate],
    inputs: &[u64],
    primitive: Primitive,
    n_max: Option<usize>,
) -> Result<FockRun> {
    let alpha = match primitive {
        Primitive::Coherent(a) => a,
        Primitive::IdealOrthogonal => {
            return Err(Error::Argument("the Fock oracle needs a coherent primitive".into()))
        }
    };
    if inputs.is_empty() || inputs.len() > 2 {
        return Err(Error::TooLarge(format!("Fock oracle handles 1 or 2 modes, circuit has {}", inputs.len())));
    }
    let n_max = n_max.unwrap_or_else(|| default_n_max(alpha));
    let mut words = Vec::new();
    for &j in inputs {
        words.push(rsb_codeword_fock(&RsbCodewordSpec { d: plan.d1, m: plan.n, j, primitive }, n_max)?);
    }
    let mut state = if words.len() == 1 {
        FockState::single(words.pop().unwrap())
    } else {
        FockState::product(&words[0], &words[1])?
    };
    let ancilla = xbasis_codeword(plan.d2, plan.m2, primitive).fock(n_max)?;
    let mut measured: Vec<usize> = Vec::new();
    let mut gadget_probabilities = Vec::new();
    for g in gates {
        if let Some(&k) = g.modes.iter().find(|k| measured.contains(k)) {
            return Err(Error::Argument(format!("`{}` acts on mode {} after its phase measurement", g.label(), k)));
        }
        let k = g.modes.first().copied().unwrap_or(0);
        match &g.kind {
            RsbGateKind::Rotation(r) => state.rotation(k, *r)?,
            RsbGateKind::SelfKerr { u, v } => state.kerr(k, *u, *v)?,
            RsbGateKind::CrossKerr(w) => state.cross_kerr(*w)?,
            RsbGateKind::TeleportedFourier => {
                gadget_probabilities.push(state.apply_fourier_gadget(k, &ancilla, plan.d2, plan.m2)?)
            }
            RsbGateKind::PhaseMeasure => measured.push(k),
            RsbGateKind::NonClifford { label, reason } => {
                return Err(Error::NonCliffordGate { label: label.clone(), reason: reason.clone() })
            }
        }
    }
    let dist = state.joint_classes(&measured, plan.d2, plan.m2)?;
    Ok(FockRun {
        measured_modes: measured,
        distribution: dist.probabilities,
        outside: dist.outside,
        gadget_probabilities,
        defect: orthogonality_defect(primitive, plan.d2, plan.m2, n_max)?,
        n_max,
    })
}
