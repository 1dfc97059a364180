//! Stabilizer tableau over `Z_d` for arbitrary (including composite) d.
//!
//! A state is held as a generating set of its stabilizer group. Gates act by
//! conjugating each generator. Canonical forms are Howell forms of the
//! generator module over `Z_d`, with phases carried along by performing every
//! row operation as a product of group elements.

use crate::error::{Error, Result};
use crate::pauli::PauliWord;
use crate::ring::{add, gcd, modn, mul, neg, normalizing_unit, xgcd, PauliPhaseRing};
use num_rational::Ratio;
use rand::Rng;
use std::fmt;

/// Outcome set of a computational-basis measurement: `offset + stride * Z_d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Support {
    pub offset: u64,
    pub stride: u64,
    pub d: u64,
}

impl Support {
    pub fn contains(&self, m: u64) -> bool {
        m < self.d && (m + self.d - self.offset).is_multiple_of(self.stride)
    }

    pub fn outcomes(&self) -> Vec<u64> {
        (0..self.d / self.stride).map(|t| self.offset + t * self.stride).collect()
    }

    /// Probability of each supported outcome.
    pub fn probability(&self) -> Ratio<u64> {
        Ratio::new(self.stride, self.d)
    }
}

/// Result of measuring one qudit in the computational basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementRecord {
    pub qudit: usize,
    pub outcome: u64,
    pub support: Support,
    pub probability: Ratio<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    ring: PauliPhaseRing,
    generators: Vec<PauliWord>,
    /// Pivot columns of the canonical form, `None` once a gate has been applied.
    rank_profile: Option<Vec<usize>>,
}

/// A Clifford conjugation with checked qudit indices and exponents reduced
/// modulo d.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kernel {
    F(usize),
    Finv(usize),
    S(usize),
    Sum(usize, usize),
    Cz(usize, usize),
    P(usize, u64, u64),
}

impl Kernel {
    fn conjugate(&self, w: &mut PauliWord) {
        match *self {
            Kernel::F(q) => w.conj_fourier(q),
            Kernel::Finv(q) => w.conj_fourier_inv(q),
            Kernel::S(q) => w.conj_phase(q),
            Kernel::Sum(c, t) => w.conj_sum(c, t),
            Kernel::Cz(a, b) => w.conj_cz(a, b),
            Kernel::P(q, x, z) => w.conj_local_pauli(q, x, z),
        }
    }
}

/// Howell form of `rows` with columns visited in `order`.
///
/// Returns the nonzero rows in echelon order together with the position (in
/// `order`) of each row's pivot.
fn howell(rows: Vec<PauliWord>, order: &[usize]) -> Result<(Vec<PauliWord>, Vec<usize>)> {
    let mut rows: Vec<PauliWord> = rows.into_iter().filter(|w| !w.is_identity()).collect();
    let d = match rows.first() {
        Some(w) => w.d(),
        None => return Ok((rows, Vec::new())),
    };
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for (pos, &col) in order.iter().enumerate() {
        if r >= rows.len() {
            break;
        }
        if rows[r].col(col) == 0 {
            match (r + 1..rows.len()).find(|&i| rows[i].col(col) != 0) {
                Some(i) => rows.swap(r, i),
                None => continue,
            }
        }
        let u = normalizing_unit(rows[r].col(col), d);
        if u != 1 {
            rows[r] = rows[r].pow(u);
        }
        for i in r + 1..rows.len() {
            let b = rows[i].col(col);
            if b == 0 {
                continue;
            }
            let a = rows[r].col(col);
            if b.is_multiple_of(a) {
                let pr = rows[r].clone();
                rows[i].mul_pow_assign(&pr, d - b / a);
                continue;
            }
            let (g, s, t) = xgcd(a as i64, b as i64);
            let s = modn(s as i128, d);
            let t = modn(t as i128, d);
            let uu = modn(-((b as i64 / g) as i128), d);
            let vv = (a as i64 / g) as u64 % d;
            let mut new_r = rows[r].pow(s);
            new_r.mul_pow_assign(&rows[i], t);
            let mut new_i = rows[r].pow(uu);
            new_i.mul_pow_assign(&rows[i], vv);
            rows[r] = new_r;
            rows[i] = new_i;
            let u = normalizing_unit(rows[r].col(col), d);
            if u != 1 {
                rows[r] = rows[r].pow(u);
            }
        }
        let p = rows[r].col(col);
        for i in 0..r {
            let q = rows[i].col(col) / p;
            if q != 0 {
                let pr = rows[r].clone();
                rows[i].mul_pow_assign(&pr, d - q % d);
            }
        }
        if p != 1 {
            let extra = rows[r].pow(d / p);
            if !extra.is_identity() {
                rows.push(extra);
            }
        }
        pivots.push(pos);
        r += 1;
    }
    for w in &rows[r..] {
        if !w.is_identity() {
            return Err(Error::InvalidTableau(format!(
                "group contains the nontrivial scalar {}",
                w
            )));
        }
    }
    rows.truncate(r);
    Ok((rows, pivots))
}

impl Tableau {
    /// The all-zero computational basis state.
    pub fn new_zero_state(n: usize, d: u64) -> Result<Tableau> {
        if n < 1 {
            return Err(Error::Argument("need at least one qudit".into()));
        }
        if d < 2 {
            return Err(Error::Argument(format!("dimension {} < 2", d)));
        }
        let generators = (0..n).map(|k| PauliWord::single(n, d, k, 0, 1)).collect();
        Ok(Tableau {
            n,
            ring: PauliPhaseRing::new(d),
            generators,
            rank_profile: Some((n..2 * n).collect()),
        })
    }

    /// Build a tableau from generators, checking that they stabilize a unique state.
    pub fn from_generators(n: usize, d: u64, generators: Vec<PauliWord>) -> Result<Tableau> {
        if n < 1 || d < 2 {
            return Err(Error::Argument(format!("invalid n={} d={}", n, d)));
        }
        for g in &generators {
            if g.n() != n || g.d() != d {
                return Err(Error::RingMismatch(format!(
                    "generator on n={} d={} in tableau n={} d={}",
                    g.n(),
                    g.d(),
                    n,
                    d
                )));
            }
            if !g.pow(d).is_identity() {
                return Err(Error::InvalidTableau(format!("{} has order beyond d", g)));
            }
        }
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if !a.commutes_with(b) {
                    return Err(Error::InvalidTableau(format!("{} and {} do not commute", a, b)));
                }
            }
        }
        let mut t = Tableau {
            n,
            ring: PauliPhaseRing::new(d),
            generators,
            rank_profile: None,
        };
        t.canonicalize()?;
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u64 {
        self.ring.d
    }

    pub fn ring(&self) -> PauliPhaseRing {
        self.ring
    }

    pub fn generators(&self) -> &[PauliWord] {
        &self.generators
    }

    pub fn rank_profile(&self) -> Option<&[usize]> {
        self.rank_profile.as_deref()
    }

    fn check(&self, k: usize) -> Result<()> {
        if k >= self.n {
            Err(Error::IndexOutOfRange { index: k, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Put the generators into canonical (Howell) form and verify the group order.
    pub fn canonicalize(&mut self) -> Result<()> {
        if self.rank_profile.is_some() {
            return Ok(());
        }
        let order: Vec<usize> = (0..2 * self.n).collect();
        let gens = self.generators.clone();
        let (rows, pivots) = howell(gens, &order)?;
        let d = self.ring.d;
        // group order is prod (d / pivot); it must equal d^n
        let mut log_order = 0f64;
        let mut exact: u128 = 1;
        let mut target: u128 = 1;
        let mut overflow = false;
        for (w, &p) in rows.iter().zip(&pivots) {
            let e = d / w.col(order[p]);
            log_order += (e as f64).ln();
            match exact.checked_mul(e as u128) {
                Some(v) => exact = v,
                None => overflow = true,
            }
        }
        for _ in 0..self.n {
            match target.checked_mul(d as u128) {
                Some(v) => target = v,
                None => overflow = true,
            }
        }
        let full = if overflow {
            (log_order - self.n as f64 * (d as f64).ln()).abs() < 1e-6
        } else {
            exact == target
        };
        if !full {
            return Err(Error::InvalidTableau(format!(
                "stabilizer group has order {} instead of {}^{}",
                exact, d, self.n
            )));
        }
        self.generators = rows;
        self.rank_profile = Some(pivots);
        Ok(())
    }

    pub fn canonical(&self) -> Result<Tableau> {
        let mut t = self.clone();
        t.canonicalize()?;
        Ok(t)
    }

    /// True iff both tableaux stabilize the same state.
    pub fn states_equal(&self, other: &Tableau) -> Result<bool> {
        if self.n != other.n || self.ring != other.ring {
            return Err(Error::RingMismatch(format!(
                "(n={}, d={}) vs (n={}, d={})",
                self.n,
                self.d(),
                other.n,
                other.d()
            )));
        }
        Ok(self.canonical()?.generators == other.canonical()?.generators)
    }

    pub fn apply_fourier(&mut self, k: usize) -> Result<()> {
        self.check(k)?;
        self.generators.iter_mut().for_each(|w| w.conj_fourier(k));
        self.rank_profile = None;
        Ok(())
    }

    /// Inverse Fourier gate `F^dagger`.
    pub fn apply_fourier_inv(&mut self, k: usize) -> Result<()> {
        self.check(k)?;
        self.generators.iter_mut().for_each(|w| w.conj_fourier_inv(k));
        self.rank_profile = None;
        Ok(())
    }

    pub fn apply_phase_gate(&mut self, k: usize) -> Result<()> {
        self.check(k)?;
        self.generators.iter_mut().for_each(|w| w.conj_phase(k));
        self.rank_profile = None;
        Ok(())
    }

    pub fn apply_sum(&mut self, control: usize, target: usize) -> Result<()> {
        self.check(control)?;
        self.check(target)?;
        if control == target {
            return Err(Error::Argument("SUM control equals target".into()));
        }
        self.generators.iter_mut().for_each(|w| w.conj_sum(control, target));
        self.rank_profile = None;
        Ok(())
    }

    /// Controlled-Z `|j,k> -> omega^{jk} |j,k>`.
    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Err(Error::Argument("CZ on a single qudit".into()));
        }
        self.generators.iter_mut().for_each(|w| w.conj_cz(a, b));
        self.rank_profile = None;
        Ok(())
    }

    /// Applies a run of checked gates. Long runs are applied to a transposed
    /// copy of the generators so every gate streams over contiguous columns.
    pub(crate) fn apply_kernels(&mut self, ks: &[Kernel]) {
        self.rank_profile = None;
        if ks.len() < 2 * self.n {
            for g in ks {
                self.generators.iter_mut().for_each(|w| g.conjugate(w));
            }
            return;
        }
        let (n, r) = (self.n, self.generators.len());
        let (d, big) = (self.ring.d, self.ring.big_d);
        let omega = |k: u64| if big == d { k } else { 2 * k };
        let mut x = vec![0u64; n * r];
        let mut z = vec![0u64; n * r];
        let mut ph: Vec<u64> = self.generators.iter().map(|w| w.phase).collect();
        for (i, w) in self.generators.iter().enumerate() {
            for k in 0..n {
                x[k * r + i] = w.x[k];
                z[k * r + i] = w.z[k];
            }
        }
        for g in ks {
            match *g {
                Kernel::F(k) | Kernel::Finv(k) => {
                    let inv = matches!(g, Kernel::Finv(_));
                    let (xs, zs) = (&mut x[k * r..(k + 1) * r], &mut z[k * r..(k + 1) * r]);
                    for ((a, b), p) in xs.iter_mut().zip(zs.iter_mut()).zip(ph.iter_mut()) {
                        let (xv, zv) = (*a, *b);
                        if inv {
                            *a = zv;
                            *b = neg(xv, d);
                        } else {
                            *a = neg(zv, d);
                            *b = xv;
                        }
                        *p = add(*p, omega(neg(mul(xv, zv, d), d)), big);
                    }
                }
                Kernel::S(k) => {
                    let (xs, zs) = (&x[k * r..(k + 1) * r], &mut z[k * r..(k + 1) * r]);
                    for ((&xv, b), p) in xs.iter().zip(zs.iter_mut()).zip(ph.iter_mut()) {
                        *b = add(xv, *b, d);
                        let eta = if big != d { xv } else { 0 };
                        *p = add(add(*p, eta, big), omega(mul(xv, xv.saturating_sub(1), 2 * d) / 2), big);
                    }
                }
                Kernel::Sum(c, t) => {
                    for i in 0..r {
                        x[t * r + i] = add(x[t * r + i], x[c * r + i], d);
                        z[c * r + i] = add(z[c * r + i], neg(z[t * r + i], d), d);
                    }
                }
                Kernel::Cz(a, b) => {
                    for i in 0..r {
                        let (xa, xb) = (x[a * r + i], x[b * r + i]);
                        z[a * r + i] = add(z[a * r + i], xb, d);
                        z[b * r + i] = add(z[b * r + i], xa, d);
                        ph[i] = add(ph[i], omega(mul(xa, xb, d)), big);
                    }
                }
                Kernel::P(k, px, pz) => {
                    let (xs, zs) = (&x[k * r..(k + 1) * r], &z[k * r..(k + 1) * r]);
                    for ((&xv, &zv), p) in xs.iter().zip(zs).zip(ph.iter_mut()) {
                        let c = add(mul(pz, xv, d), neg(mul(zv, px, d), d), d);
                        *p = add(*p, omega(c), big);
                    }
                }
            }
        }
        for (i, w) in self.generators.iter_mut().enumerate() {
            w.phase = ph[i];
            for k in 0..n {
                w.x[k] = x[k * r + i];
                w.z[k] = z[k * r + i];
            }
        }
    }

    /// Conjugate by a Pauli word; only phases change.
    pub fn apply_pauli(&mut self, word: &PauliWord) -> Result<()> {
        if word.n() != self.n || word.ring != self.ring {
            return Err(Error::RingMismatch("Pauli word on a different register".into()));
        }
        self.generators.iter_mut().for_each(|w| w.conj_pauli(word));
        Ok(())
    }

    /// `X_k^x Z_k^z` on a single qudit.
    pub fn apply_local_pauli(&mut self, k: usize, x: i64, z: i64) -> Result<()> {
        self.check(k)?;
        let d = self.ring.d;
        let (x, z) = (modn(x as i128, d), modn(z as i128, d));
        self.generators.iter_mut().for_each(|w| w.conj_local_pauli(k, x, z));
        Ok(())
    }

    /// Supports of computational-basis outcomes for the qudits `ks`, measured in
    /// that order, together with the constraint rows needed to condition later
    /// outcomes on earlier ones.
    fn z_constraints(&self, ks: &[usize]) -> Result<(Vec<PauliWord>, Vec<usize>)> {
        let n = self.n;
        let mut seen = vec![false; n];
        for &k in ks {
            self.check(k)?;
            if seen[k] {
                return Err(Error::Argument(format!("qudit {} measured twice in one batch", k)));
            }
            seen[k] = true;
        }
        let mut order: Vec<usize> = ks.to_vec();
        order.extend((0..n).filter(|&k| !seen[k]));
        order.extend((0..n).filter(|&k| !seen[k]).map(|k| n + k));
        order.extend(ks.iter().rev().map(|&k| n + k));
        howell(self.generators.clone(), &order)
    }

    /// Measure the qudits `ks` in the computational basis, in order.
    ///
    /// `choose` receives the qudit index and its support conditioned on the
    /// earlier outcomes of this batch, and returns the outcome to record.
    pub fn measure_z_many(
        &mut self,
        ks: &[usize],
        choose: &mut dyn FnMut(usize, &Support) -> Result<u64>,
    ) -> Result<Vec<MeasurementRecord>> {
        let n = self.n;
        let d = self.ring.d;
        let r = self.ring.ratio();
        let (rows, pivots) = self.z_constraints(ks)?;
        let nk = ks.len();
        let mut outcomes: Vec<u64> = Vec::with_capacity(nk);
        let mut records = Vec::with_capacity(nk);
        for (i, &k) in ks.iter().enumerate() {
            let pos = 2 * n - 1 - i;
            let support = match pivots.iter().position(|&p| p == pos) {
                None => Support { offset: 0, stride: 1, d },
                Some(ri) => {
                    let w = &rows[ri];
                    if w.phase % r != 0 {
                        return Err(Error::InvalidTableau("inconsistent Z phase".into()));
                    }
                    let b = modn(-((w.phase / r) as i128), d);
                    let mut rhs = b as i128;
                    for (j, &kj) in ks[..i].iter().enumerate() {
                        rhs -= (w.z[kj] as i128) * (outcomes[j] as i128);
                    }
                    let rhs = modn(rhs, d);
                    let p = w.z[k];
                    if !rhs.is_multiple_of(p) {
                        return Err(Error::InvalidTableau("unsolvable Z constraint".into()));
                    }
                    let stride = d / p;
                    Support { offset: (rhs / p) % stride, stride, d }
                }
            };
            let m = choose(k, &support)?;
            if !support.contains(m) {
                return Err(Error::Contradiction {
                    qudit: k,
                    outcome: m,
                    offset: support.offset,
                    stride: support.stride,
                });
            }
            outcomes.push(m);
            records.push(MeasurementRecord {
                qudit: k,
                outcome: m,
                support,
                probability: support.probability(),
            });
        }
        let mut gens: Vec<PauliWord> = rows
            .into_iter()
            .zip(&pivots)
            .filter(|(_, &p)| p >= nk)
            .map(|(w, _)| w)
            .collect();
        for (i, &k) in ks.iter().enumerate() {
            let w = PauliWord::single(n, d, k, 0, 1).with_phase(-((r * outcomes[i]) as i64));
            gens.push(w);
        }
        self.generators = gens;
        self.rank_profile = None;
        self.canonicalize()?;
        Ok(records)
    }

    /// Support of a Z measurement on qudit `k` without collapsing.
    pub fn z_support(&self, k: usize) -> Result<Support> {
        let mut t = self.clone();
        let mut found = None;
        let _ = t.measure_z_many(&[k], &mut |_, s| {
            found = Some(*s);
            Ok(s.offset)
        })?;
        Ok(found.expect("support computed"))
    }

    /// Measure qudit `k`, sampling the outcome from `rng`.
    pub fn measure_z<R: Rng + ?Sized>(&mut self, k: usize, rng: &mut R) -> Result<MeasurementRecord> {
        let mut recs = self.measure_z_many(&[k], &mut |_, s| {
            Ok(s.offset + s.stride * rng.gen_range(0..s.d / s.stride))
        })?;
        Ok(recs.pop().expect("one record"))
    }

    /// Measure qudit `k` and post-select on `outcome`.
    pub fn measure_z_forced(&mut self, k: usize, outcome: u64) -> Result<MeasurementRecord> {
        let mut recs = self.measure_z_many(&[k], &mut |_, _| Ok(outcome))?;
        Ok(recs.pop().expect("one record"))
    }

    /// Remove qudit `k`, which must be unentangled from the rest.
    pub fn discard(&mut self, k: usize) -> Result<()> {
        self.check(k)?;
        let n = self.n;
        if n == 1 {
            return Err(Error::Argument("cannot discard the only qudit".into()));
        }
        let d = self.ring.d;
        let mut order = vec![k, n + k];
        order.extend((0..2 * n).filter(|&c| c != k && c != n + k));
        let (rows, pivots) = howell(self.generators.clone(), &order)?;
        let gens: Vec<PauliWord> = rows
            .into_iter()
            .zip(&pivots)
            .filter(|(_, &p)| p >= 2)
            .map(|(mut w, _)| {
                w.x.remove(k);
                w.z.remove(k);
                w
            })
            .collect();
        let mut t = Tableau {
            n: n - 1,
            ring: PauliPhaseRing::new(d),
            generators: gens,
            rank_profile: None,
        };
        t.canonicalize().map_err(|_| Error::Entangled(k))?;
        *self = t;
        Ok(())
    }

    /// Append `m` qudits in `|0>`.
    pub fn extend_zero(&mut self, m: usize) {
        let d = self.ring.d;
        let n = self.n;
        for w in &mut self.generators {
            w.x.extend(std::iter::repeat_n(0, m));
            w.z.extend(std::iter::repeat_n(0, m));
        }
        for k in n..n + m {
            self.generators.push(PauliWord::single(n + m, d, k, 0, 1));
        }
        self.n = n + m;
        self.rank_profile = None;
    }

    /// Tensor product `self (x) other`.
    pub fn tensor(&self, other: &Tableau) -> Result<Tableau> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch("tensor of different dimensions".into()));
        }
        let n = self.n + other.n;
        let mut gens = Vec::new();
        for w in &self.generators {
            let mut v = w.clone();
            v.x.extend(std::iter::repeat_n(0, other.n));
            v.z.extend(std::iter::repeat_n(0, other.n));
            gens.push(v);
        }
        for w in &other.generators {
            let mut v = PauliWord::identity(n, self.d()).with_phase(w.phase as i64);
            v.x[self.n..].copy_from_slice(&w.x);
            v.z[self.n..].copy_from_slice(&w.z);
            gens.push(v);
        }
        Ok(Tableau {
            n,
            ring: self.ring,
            generators: gens,
            rank_profile: None,
        })
    }

    /// Line-based text form: header then one `phase | x.. | z..` line per generator.
    pub fn to_text(&self) -> String {
        let mut s = format!("tableau d={} n={}\n", self.d(), self.n);
        for w in &self.generators {
            s.push_str(&w.to_line());
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Tableau> {
        let bad = |m: &str| Error::Argument(format!("tableau text: {}", m));
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| bad("empty input"))?;
        let mut d = None;
        let mut n = None;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("tableau") {
            return Err(bad("missing `tableau` header"));
        }
        for p in parts {
            if let Some(v) = p.strip_prefix("d=") {
                d = v.parse::<u64>().ok();
            } else if let Some(v) = p.strip_prefix("n=") {
                n = v.parse::<usize>().ok();
            }
        }
        let (d, n) = (d.ok_or_else(|| bad("d"))?, n.ok_or_else(|| bad("n"))?);
        let mut gens = Vec::new();
        for line in lines {
            let f: Vec<&str> = line.split('|').collect();
            if f.len() != 3 {
                return Err(bad(line));
            }
            let phase: i64 = f[0].trim().parse().map_err(|_| bad(line))?;
            let parse = |s: &str| -> Result<Vec<i64>> {
                s.split_whitespace()
                    .map(|t| t.parse::<i64>().map_err(|_| bad(line)))
                    .collect()
            };
            let x = parse(f[1])?;
            let z = parse(f[2])?;
            if x.len() != n || z.len() != n {
                return Err(bad(line));
            }
            gens.push(PauliWord::from_parts(d, phase, &x, &z));
        }
        Tableau::from_generators(n, d, gens)
    }

    /// Number of generators currently stored.
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Order of the generated group, computed from the canonical form.
    pub fn group_order(&self) -> Result<u128> {
        let c = self.canonical()?;
        let profile = c.rank_profile.clone().unwrap_or_default();
        let mut o: u128 = 1;
        for (w, &p) in c.generators.iter().zip(&profile) {
            o *= (self.d() / w.col(p)) as u128;
        }
        Ok(o)
    }
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// Greatest common divisor of a qudit's X column, which sets its Z-outcome stride.
pub fn x_column_gcd(t: &Tableau, k: usize) -> u64 {
    t.generators().iter().fold(t.d(), |g, w| gcd(g, w.x[k]))
}
