//! Parse, compile, simulate and cross-check circuit files.

use crate::circuit::{Code, CvCircuit, Gate, Op};
use crate::error::{Error, Result};
use crate::gkp::{compile_gate, homodyne_outcome_decode, resolve_embedding, GkpEmbeddingPlan, GkpGateKind};
use crate::oracles::{DenseQuditState, GridSpec, GridState};
use crate::pauli::PauliWord;
use crate::program::{CliffordProgram, Instr, PostselectionEntry};
use crate::rsb::{
    compile_gate_rsb, fock_simulate, resolve_embedding_rsb, Method, Primitive, RsbEmbeddingPlan, RsbGateKind,
};
use crate::tableau::Tableau;
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Plan {
    Gkp(GkpEmbeddingPlan),
    Rsb(RsbEmbeddingPlan),
}

impl Plan {
    pub fn d2(&self) -> u64 {
        match self {
            Plan::Gkp(p) => p.d2,
            Plan::Rsb(p) => p.d2,
        }
    }

    /// Logical d1 value of a measurement outcome, if it lies on the logical sublattice.
    pub fn decode(&self, outcome: u64) -> Option<u64> {
        match self {
            Plan::Gkp(p) => homodyne_outcome_decode(p, outcome).logical,
            Plan::Rsb(p) => p.decode(outcome),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Compiled {
    pub circuit: CvCircuit,
    pub plan: Plan,
    pub program: CliffordProgram,
    pub initial: Tableau,
    /// Mode of every measurement, in program order.
    pub measured_modes: Vec<usize>,
}

fn at_line(op: &Op, e: Error) -> Error {
    let label = format!("line {}: `{}`", op.line, op.text);
    match e {
        Error::NonCliffordGate { reason, .. } => Error::NonCliffordGate { label, reason },
        Error::NotAdmitted(m) => Error::NotAdmitted(format!("{}: {}", label, m)),
        other => other,
    }
}

fn check_non_clifford(c: &CvCircuit) -> Result<()> {
    for op in &c.ops {
        let hit = match &op.gate {
            Gate::Gkp(g) => matches!(g.kind, GkpGateKind::NonClifford { .. }),
            Gate::Rsb(g) => matches!(g.kind, RsbGateKind::NonClifford { .. }),
        };
        if hit {
            let reason = match &op.gate {
                Gate::Gkp(g) => match &g.kind {
                    GkpGateKind::NonClifford { reason, .. } => reason.clone(),
                    _ => unreachable!(),
                },
                Gate::Rsb(g) => match &g.kind {
                    RsbGateKind::NonClifford { reason, .. } => reason.clone(),
                    _ => unreachable!(),
                },
            };
            return Err(Error::NonCliffordGate { label: format!("line {}: `{}`", op.line, op.text), reason });
        }
    }
    Ok(())
}

pub fn compile(circuit: &CvCircuit, method: Option<Method>) -> Result<Compiled> {
    check_non_clifford(circuit)?;
    let (plan, initial) = match &circuit.code {
        Code::Gkp => {
            let plan = resolve_embedding(circuit.d1, &circuit.gkp_gates())?;
            (Plan::Gkp(plan), plan.initial_state(&circuit.inputs)?)
        }
        Code::Rsb { n, .. } => {
            let plan = resolve_embedding_rsb(circuit.d1, *n, &circuit.rsb_gates(), &circuit.inputs, method)?;
            (Plan::Rsb(plan), plan.initial_state(&circuit.inputs)?)
        }
    };
    let mut program = CliffordProgram::new();
    for op in &circuit.ops {
        let part = match (&op.gate, &plan) {
            (Gate::Gkp(g), Plan::Gkp(p)) => compile_gate(p, g),
            (Gate::Rsb(g), Plan::Rsb(p)) => compile_gate_rsb(p, g),
            _ => unreachable!("parser keeps gates in the declared family"),
        };
        program.extend(part.map_err(|e| at_line(op, e))?);
    }
    let measured_modes = program
        .instrs
        .iter()
        .filter_map(|i| if let Instr::MeasureZ { qudit } = i { Some(*qudit) } else { None })
        .collect();
    Ok(Compiled { circuit: circuit.clone(), plan, program, initial, measured_modes })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeProbability {
    pub outcomes: Vec<u64>,
    pub logical: Vec<Option<u64>>,
    #[serde(serialize_with = "ser_ratio")]
    pub probability: Ratio<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PostselectionLog {
    pub label: String,
    pub uses: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub success_probability: Ratio<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrongResult {
    pub outcomes: Vec<OutcomeProbability>,
    pub postselection: Vec<PostselectionLog>,
    /// Final tableau of the most likely branch.
    #[serde(skip)]
    pub final_state: Option<Tableau>,
}

impl StrongResult {
    pub fn total(&self) -> Ratio<u64> {
        self.outcomes.iter().map(|o| o.probability).fold(Ratio::from_integer(0), |a, b| a + b)
    }

    /// Distribution over the joint outcome index `sum_i o_i d^(k-1-i)`.
    pub fn dense(&self, d: u64) -> Vec<f64> {
        let k = self.outcomes.first().map_or(0, |o| o.outcomes.len());
        let mut v = vec![0.0; (d as usize).pow(k as u32)];
        for o in &self.outcomes {
            let idx = o.outcomes.iter().fold(0usize, |acc, &x| acc * d as usize + x as usize);
            v[idx] += ratio_f64(o.probability);
        }
        v
    }
}

pub(crate) fn ser_ratio<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

fn ratio_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn postselection_log(entries: &[PostselectionEntry]) -> Vec<PostselectionLog> {
    let mut map: BTreeMap<(String, u64, u64), usize> = BTreeMap::new();
    for e in entries {
        *map.entry((e.label.clone(), e.numer, e.denom)).or_default() += 1;
    }
    map.into_iter()
        .map(|((label, n, d), uses)| PostselectionLog { label, uses, success_probability: Ratio::new(n, d) })
        .collect()
}

pub const DEFAULT_MAX_BRANCHES: usize = 1 << 16;

pub fn run_strong(c: &Compiled, max_branches: usize) -> Result<StrongResult> {
    let branches = c.program.enumerate(c.initial.clone(), max_branches)?;
    let mut agg: BTreeMap<Vec<u64>, Ratio<u64>> = BTreeMap::new();
    let mut best: Option<(Ratio<u64>, Tableau)> = None;
    let mut post = Vec::new();
    for b in branches {
        *agg.entry(b.outcomes.clone()).or_insert(Ratio::from_integer(0)) += b.probability;
        if post.is_empty() {
            post = b.postselections.clone();
        }
        if best.as_ref().is_none_or(|(p, _)| b.probability > *p) {
            best = Some((b.probability, b.tableau));
        }
    }
    let outcomes = agg
        .into_iter()
        .map(|(o, p)| OutcomeProbability { logical: o.iter().map(|&x| c.plan.decode(x)).collect(), outcomes: o, probability: p })
        .collect();
    Ok(StrongResult { outcomes, postselection: postselection_log(&post), final_state: best.map(|b| b.1) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShotCount {
    pub outcomes: Vec<u64>,
    pub logical: Vec<Option<u64>>,
    pub count: usize,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakResult {
    pub shots: usize,
    pub seed: u64,
    pub counts: Vec<ShotCount>,
    /// Shots stopped by a failed post-selection (only with modelled post-selection).
    pub aborted: usize,
    pub postselection: Vec<PostselectionLog>,
    #[serde(skip)]
    pub final_state: Option<Tableau>,
}

/// Samples `shots` runs; shot `i` draws from stream `i` of a generator seeded with `seed`.
pub fn run_weak(c: &Compiled, shots: usize, seed: u64, model_postselection: bool) -> Result<WeakResult> {
    let mut counts: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
    let mut aborted = 0;
    let mut post = Vec::new();
    let mut last = None;
    for shot in 0..shots {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(shot as u64);
        let out = c.program.run_weak(c.initial.clone(), &mut rng, model_postselection)?;
        if out.aborted {
            aborted += 1;
            continue;
        }
        if post.is_empty() {
            post = out.postselections.clone();
        }
        *counts.entry(out.records.iter().map(|r| r.outcome).collect()).or_default() += 1;
        last = Some(out.tableau);
    }
    let kept = (shots - aborted).max(1) as f64;
    let counts = counts
        .into_iter()
        .map(|(o, n)| ShotCount {
            logical: o.iter().map(|&x| c.plan.decode(x)).collect(),
            outcomes: o,
            count: n,
            frequency: n as f64 / kept,
        })
        .collect();
    Ok(WeakResult { shots, seed, counts, aborted, postselection: postselection_log(&post), final_state: last })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyOptions {
    /// GKP peak width and envelope.
    pub delta: f64,
    pub delta_env: f64,
    pub grid_max_points: usize,
    /// Fock truncation; `None` picks the default for the primitive.
    pub n_max: Option<usize>,
    /// Coherent amplitude used when the circuit declares the ideal primitive.
    pub fallback_alpha: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { delta: 0.15, delta_env: 0.15, grid_max_points: 1 << 17, n_max: None, fallback_alpha: 6.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleComparison {
    pub oracle: String,
    pub measured_modes: Vec<usize>,
    pub tableau: Vec<f64>,
    pub oracle_distribution: Vec<f64>,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Squeezing, truncation, orthogonality defect and binning notes.
    pub metadata: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyResult {
    pub comparisons: Vec<OracleComparison>,
    pub passed: bool,
}

fn require_terminal_measurements(c: &CvCircuit) -> Result<()> {
    let mut done: Vec<usize> = Vec::new();
    for op in &c.ops {
        if let Some(m) = op.gate.modes().iter().find(|m| done.contains(m)) {
            return Err(Error::Argument(format!(
                "line {}: mode {} is used after its measurement; oracles need terminal measurements",
                op.line, m
            )));
        }
        if op.gate.is_measurement() {
            done.push(op.gate.modes()[0]);
        }
    }
    Ok(())
}

fn compare(oracle: &str, c: &Compiled, tableau: Vec<f64>, other: Vec<f64>, tol: f64, meta: BTreeMap<String, String>) -> OracleComparison {
    let max_deviation = tableau.iter().zip(&other).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    OracleComparison {
        oracle: oracle.into(),
        measured_modes: c.measured_modes.clone(),
        passed: max_deviation <= tol && tableau.len() == other.len(),
        tableau,
        oracle_distribution: other,
        max_deviation,
        tolerance: tol,
        metadata: meta,
    }
}

/// Distribution of the terminal measurements from a state vector.
pub fn dense_distribution(c: &Compiled) -> Result<Vec<f64>> {
    let mut psi = DenseQuditState::from_tableau(&c.initial)?;
    let (n, d) = (c.initial.n(), c.initial.d());
    for i in &c.program.instrs {
        match i {
            Instr::Fourier { qudit } => psi.apply_fourier(*qudit),
            Instr::FourierInv { qudit } => psi.apply_fourier_inv(*qudit),
            Instr::Phase { qudit } => psi.apply_phase_gate(*qudit),
            Instr::Sum { control, target } => psi.apply_sum(*control, *target),
            Instr::Cz { a, b } => psi.apply_cz(*a, *b),
            Instr::Pauli { qudit, x, z } => psi.apply_pauli(&PauliWord::single(n, d, *qudit, *x, *z)),
            Instr::MeasureZ { .. } | Instr::Postselect { .. } => {}
            other => return Err(Error::Argument(format!("dense oracle does not model {:?}", other))),
        }
    }
    Ok(psi.joint_distribution(&c.measured_modes))
}

pub fn verify(c: &Compiled, opts: &VerifyOptions) -> Result<VerifyResult> {
    require_terminal_measurements(&c.circuit)?;
    if c.measured_modes.is_empty() {
        return Err(Error::Argument("nothing to compare: the circuit has no measurements".into()));
    }
    let strong = run_strong(c, DEFAULT_MAX_BRANCHES)?;
    let d2 = c.plan.d2();
    let exact = strong.dense(d2);
    let mut comparisons = Vec::new();
    if (d2 as f64).powi(c.initial.n() as i32) <= (1u64 << 20) as f64 {
        let dense = dense_distribution(c)?;
        let mut meta = BTreeMap::new();
        meta.insert("dimension".into(), format!("{}^{}", d2, c.initial.n()));
        comparisons.push(compare("dense", c, exact.clone(), dense, 1e-9, meta));
    }
    match c.plan {
        Plan::Gkp(plan) => {
            if c.circuit.modes > 2 {
                return Err(Error::TooLarge(format!("grid oracle handles 1 or 2 modes, circuit has {}", c.circuit.modes)));
            }
            let two = c.circuit.modes == 2;
            if two && c.measured_modes != [0, 1] {
                return Err(Error::Argument("two-mode grid comparison needs `homodyne 0` then `homodyne 1`".into()));
            }
            let spec = if two {
                GridSpec::with_step(d2, opts.delta / 2.0, 1 << 12)?
            } else {
                GridSpec::for_code(d2, opts.delta, opts.delta_env, opts.grid_max_points)?
            };
            let words: Vec<GridState> = c
                .circuit
                .inputs
                .iter()
                .map(|&j| GridState::gkp_codeword(spec, plan.d1, j, opts.delta, opts.delta_env))
                .collect::<Result<_>>()?;
            let mut psi = if two { GridState::product(&words[0], &words[1])? } else { words[0].clone() };
            for g in c.circuit.gkp_gates() {
                psi.apply_gkp_gate(&plan, &g)?;
            }
            let bins = if two {
                psi.homodyne_joint(d2, spec.lattice / 4.0)?
            } else {
                psi.homodyne(c.measured_modes[0], d2, spec.lattice / 4.0)?
            };
            let mut meta = BTreeMap::new();
            meta.insert("delta".into(), format!("{}", opts.delta));
            meta.insert("delta_env".into(), format!("{}", opts.delta_env));
            meta.insert("grid_points_per_mode".into(), spec.n_points.to_string());
            meta.insert("bin_half_width".into(), "lattice/4".into());
            meta.insert("mass_outside_bins".into(), format!("{:e}", bins.outside));
            let tol = if two { 1e-2 } else { 1e-3 };
            comparisons.push(compare("grid", c, exact, bins.probabilities, tol, meta));
        }
        Plan::Rsb(plan) => {
            let prim = match c.circuit.code {
                Code::Rsb { primitive: Primitive::Coherent(a), .. } => Primitive::Coherent(a),
                _ => Primitive::Coherent(opts.fallback_alpha),
            };
            let run = fock_simulate(&plan, &c.circuit.rsb_gates(), &c.circuit.inputs, prim, opts.n_max)?;
            let tol = (10.0 * run.defect).max(1e-6);
            let mut meta = BTreeMap::new();
            if let Primitive::Coherent(a) = prim {
                meta.insert("alpha".into(), format!("{}", a));
            }
            meta.insert("n_max".into(), run.n_max.to_string());
            meta.insert("orthogonality_defect".into(), format!("{:e}", run.defect));
            meta.insert("phase_measurement".into(), "Fock-support class projectors n = M2 (c + d2 s)".into());
            meta.insert("mass_outside_classes".into(), format!("{:e}", run.outside));
            if !run.gadget_probabilities.is_empty() {
                let g: Vec<String> = run.gadget_probabilities.iter().map(|p| format!("{:.9}", p)).collect();
                meta.insert("gadget_success_probabilities".into(), g.join(","));
            }
            comparisons.push(compare("fock", c, exact, run.distribution, tol, meta));
        }
    }
    let passed = comparisons.iter().all(|c| c.passed);
    Ok(VerifyResult { comparisons, passed })
}

/// Parses and compiles in one step.
pub fn compile_text(text: &str, method: Option<Method>) -> Result<Compiled> {
    compile(&crate::circuit::parse_circuit(text)?, method)
}
