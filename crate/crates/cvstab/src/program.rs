//! Straight-line Clifford programs with measurement feedback, run weakly
//! (sampled) or strongly (every branch with exact probability).

use crate::error::{Error, Result};
use crate::ring::modn;
use crate::tableau::{Kernel, MeasurementRecord, Support, Tableau};
use num_rational::Ratio;
use rand::Rng;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Instr {
    Fourier { qudit: usize },
    FourierInv { qudit: usize },
    Phase { qudit: usize },
    Sum { control: usize, target: usize },
    Cz { a: usize, b: usize },
    Pauli { qudit: usize, x: i64, z: i64 },
    /// Computational-basis measurement; appends a record.
    MeasureZ { qudit: usize },
    /// `X^{scale * m / divisor}` where `m` is the outcome of record `record`.
    FeedbackX { target: usize, record: usize, scale: i64, divisor: u64 },
    /// A heralded step that succeeds with probability `numer/denom`.
    Postselect { label: String, numer: u64, denom: u64 },
    Discard { qudit: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct CliffordProgram {
    pub instrs: Vec<Instr>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PostselectionEntry {
    pub label: String,
    pub numer: u64,
    pub denom: u64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub tableau: Tableau,
    pub records: Vec<MeasurementRecord>,
    pub postselections: Vec<PostselectionEntry>,
    /// Set when a modelled post-selection failed; the shot stops there.
    pub aborted: bool,
}

/// One leaf of the strong-simulation branch tree.
#[derive(Debug, Clone)]
pub struct Branch {
    pub outcomes: Vec<u64>,
    pub probability: Ratio<u64>,
    pub tableau: Tableau,
    pub postselections: Vec<PostselectionEntry>,
}

impl CliffordProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, i: Instr) {
        self.instrs.push(i);
    }

    pub fn extend(&mut self, other: CliffordProgram) {
        self.instrs.extend(other.instrs);
    }

    pub fn len(&self) -> usize {
        self.instrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instrs.is_empty()
    }

    pub fn measurement_count(&self) -> usize {
        self.instrs.iter().filter(|i| matches!(i, Instr::MeasureZ { .. })).count()
    }

    /// Sampled execution. Consecutive measurements of distinct qudits are
    /// performed as one batch.
    pub fn run_weak<R: Rng + ?Sized>(
        &self,
        init: Tableau,
        rng: &mut R,
        model_postselection: bool,
    ) -> Result<RunOutcome> {
        let rng = std::cell::RefCell::new(rng);
        self.run_with(
            init,
            &mut |_, s| Ok(s.offset + s.stride * rng.borrow_mut().gen_range(0..s.d / s.stride)),
            &mut |num, den| !model_postselection || rng.borrow_mut().gen_range(0..den) < num,
        )
    }

    /// Execution with prescribed outcomes, one per measurement.
    pub fn run_forced(&self, init: Tableau, outcomes: &[u64]) -> Result<RunOutcome> {
        if outcomes.len() != self.measurement_count() {
            return Err(Error::Argument(format!(
                "{} outcomes given for {} measurements",
                outcomes.len(),
                self.measurement_count()
            )));
        }
        let mut it = outcomes.iter();
        self.run_with(init, &mut |_, _| Ok(*it.next().expect("counted")), &mut |_, _| true)
    }

    fn run_with(
        &self,
        init: Tableau,
        choose: &mut dyn FnMut(usize, &Support) -> Result<u64>,
        herald: &mut dyn FnMut(u64, u64) -> bool,
    ) -> Result<RunOutcome> {
        let mut out = RunOutcome { tableau: init, records: Vec::new(), postselections: Vec::new(), aborted: false };
        let mut pc = 0;
        while pc < self.instrs.len() {
            if let Instr::MeasureZ { .. } = self.instrs[pc] {
                let mut ks = Vec::new();
                while let Some(Instr::MeasureZ { qudit }) = self.instrs.get(pc) {
                    if ks.contains(qudit) {
                        break;
                    }
                    ks.push(*qudit);
                    pc += 1;
                }
                let recs = out.tableau.measure_z_many(&ks, choose)?;
                out.records.extend(recs);
                continue;
            }
            if let Instr::Postselect { label, numer, denom } = &self.instrs[pc] {
                out.postselections.push(PostselectionEntry { label: label.clone(), numer: *numer, denom: *denom });
                if !herald(*numer, *denom) {
                    out.aborted = true;
                    return Ok(out);
                }
                pc += 1;
                continue;
            }
            let end = block_end(&self.instrs, pc);
            if end > pc {
                apply_block(&mut out.tableau, &self.instrs[pc..end])?;
                pc = end;
                continue;
            }
            apply_unitary(&mut out.tableau, &self.instrs[pc], &out.records)?;
            pc += 1;
        }
        Ok(out)
    }

    /// Every measurement branch with its exact probability, depth first.
    /// Fails with `TooLarge` beyond `max_leaves` leaves.
    pub fn enumerate(&self, init: Tableau, max_leaves: usize) -> Result<Vec<Branch>> {
        struct Node {
            t: Tableau,
            pc: usize,
            records: Vec<MeasurementRecord>,
            p: Ratio<u64>,
            post: Vec<PostselectionEntry>,
        }
        let mut leaves = Vec::new();
        let mut stack = vec![Node { t: init, pc: 0, records: Vec::new(), p: Ratio::from_integer(1), post: Vec::new() }];
        while let Some(mut node) = stack.pop() {
            let mut split = None;
            while node.pc < self.instrs.len() {
                match &self.instrs[node.pc] {
                    Instr::MeasureZ { qudit } => {
                        split = Some(*qudit);
                        break;
                    }
                    Instr::Postselect { label, numer, denom } => node.post.push(PostselectionEntry {
                        label: label.clone(),
                        numer: *numer,
                        denom: *denom,
                    }),
                    i => apply_unitary(&mut node.t, i, &node.records)?,
                }
                node.pc += 1;
            }
            let Some(k) = split else {
                if leaves.len() >= max_leaves {
                    return Err(Error::TooLarge(format!("more than {} measurement branches", max_leaves)));
                }
                leaves.push(Branch {
                    outcomes: node.records.iter().map(|r| r.outcome).collect(),
                    probability: node.p,
                    tableau: node.t,
                    postselections: node.post,
                });
                continue;
            };
            let support = node.t.z_support(k)?;
            if leaves.len() + stack.len() + support.outcomes().len() > 4 * max_leaves {
                return Err(Error::TooLarge(format!("more than {} measurement branches", max_leaves)));
            }
            for m in support.outcomes().into_iter().rev() {
                let mut t = node.t.clone();
                let rec = t.measure_z_forced(k, m)?;
                let mut records = node.records.clone();
                let p = node.p * rec.probability;
                records.push(rec);
                stack.push(Node { t, pc: node.pc + 1, records, p, post: node.post.clone() });
            }
        }
        Ok(leaves)
    }
}

/// End of the run of feedback-free unitary instructions starting at `pc`.
fn block_end(instrs: &[Instr], pc: usize) -> usize {
    let mut end = pc;
    while let Some(
        Instr::Fourier { .. }
        | Instr::FourierInv { .. }
        | Instr::Phase { .. }
        | Instr::Sum { .. }
        | Instr::Cz { .. }
        | Instr::Pauli { .. },
    ) = instrs.get(end)
    {
        end += 1;
    }
    end
}

fn apply_block(t: &mut Tableau, instrs: &[Instr]) -> Result<()> {
    let (n, d) = (t.n(), t.d());
    let check = |k: usize| if k < n { Ok(k) } else { Err(Error::IndexOutOfRange { index: k, n }) };
    let pair = |a: usize, b: usize| {
        if a == b {
            Err(Error::Argument("two-qudit gate on a single qudit".into()))
        } else {
            Ok((check(a)?, check(b)?))
        }
    };
    let kernels = instrs
        .iter()
        .map(|i| {
            Ok(match *i {
                Instr::Fourier { qudit } => Kernel::F(check(qudit)?),
                Instr::FourierInv { qudit } => Kernel::Finv(check(qudit)?),
                Instr::Phase { qudit } => Kernel::S(check(qudit)?),
                Instr::Sum { control, target } => {
                    let (c, g) = pair(control, target)?;
                    Kernel::Sum(c, g)
                }
                Instr::Cz { a, b } => {
                    let (a, b) = pair(a, b)?;
                    Kernel::Cz(a, b)
                }
                Instr::Pauli { qudit, x, z } => Kernel::P(check(qudit)?, modn(x as i128, d), modn(z as i128, d)),
                _ => unreachable!("block_end admits unitaries only"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    t.apply_kernels(&kernels);
    Ok(())
}

fn apply_unitary(t: &mut Tableau, i: &Instr, records: &[MeasurementRecord]) -> Result<()> {
    match *i {
        Instr::Fourier { qudit } => t.apply_fourier(qudit),
        Instr::FourierInv { qudit } => t.apply_fourier_inv(qudit),
        Instr::Phase { qudit } => t.apply_phase_gate(qudit),
        Instr::Sum { control, target } => t.apply_sum(control, target),
        Instr::Cz { a, b } => t.apply_cz(a, b),
        Instr::Pauli { qudit, x, z } => t.apply_local_pauli(qudit, x, z),
        Instr::FeedbackX { target, record, scale, divisor } => {
            let rec = records
                .get(record)
                .ok_or_else(|| Error::Argument(format!("feedback reads missing record {}", record)))?;
            if divisor == 0 || rec.outcome % divisor != 0 {
                return Err(Error::Argument(format!(
                    "outcome {} not divisible by {}",
                    rec.outcome, divisor
                )));
            }
            t.apply_local_pauli(target, scale * (rec.outcome / divisor) as i64, 0)
        }
        Instr::Discard { qudit } => t.discard(qudit),
        Instr::MeasureZ { .. } | Instr::Postselect { .. } => unreachable!("handled by the runner"),
    }
}
