//! Line-based circuit files.
//!
//! ```text
//! code gkp d1=2 modes=1
//! input 0 0
//! dispq 0 1/2
//! homodyne 0
//! ```
//!
//! RSB circuits use `code rsb d1=<d1> N=<N> primitive=coherent:<alpha>|ideal`.
//! `#` starts a comment. Amounts are integers, fractions `p/q` or finite
//! decimals; anything containing `sqrt`, `pi` or an exponent marks the gate
//! as non-Clifford.

use crate::error::{Error, Result};
use crate::gkp::{GkpGate, GkpGateKind};
use crate::rsb::{Primitive, RsbGate, RsbGateKind};
use num_rational::Ratio;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Code {
    Gkp,
    Rsb { n: u64, primitive: Primitive },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gate {
    Gkp(GkpGate),
    Rsb(RsbGate),
}

impl Gate {
    pub fn modes(&self) -> &[usize] {
        match self {
            Gate::Gkp(g) => &g.modes,
            Gate::Rsb(g) => &g.modes,
        }
    }

    pub fn is_measurement(&self) -> bool {
        matches!(
            self,
            Gate::Gkp(GkpGate { kind: GkpGateKind::HomodyneQ, .. })
                | Gate::Rsb(RsbGate { kind: RsbGateKind::PhaseMeasure, .. })
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Op {
    pub line: usize,
    pub text: String,
    pub gate: Gate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvCircuit {
    pub code: Code,
    pub d1: u64,
    pub modes: usize,
    pub inputs: Vec<u64>,
    pub ops: Vec<Op>,
}

impl CvCircuit {
    pub fn gkp_gates(&self) -> Vec<GkpGate> {
        self.ops.iter().filter_map(|o| if let Gate::Gkp(g) = &o.gate { Some(g.clone()) } else { None }).collect()
    }

    pub fn rsb_gates(&self) -> Vec<RsbGate> {
        self.ops.iter().filter_map(|o| if let Gate::Rsb(g) = &o.gate { Some(g.clone()) } else { None }).collect()
    }
}

struct Tok<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Tok { text: &line[s..i], column: s + 1 });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Tok { text: &line[s..], column: s + 1 });
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Amount {
    Exact(Ratio<i64>),
    Irrational(String),
}

struct Ctx {
    line: usize,
}

impl Ctx {
    fn err<T>(&self, column: usize, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { line: self.line, column, message: message.into() })
    }

    fn int(&self, t: &Tok) -> Result<i64> {
        match t.text.parse::<i64>() {
            Ok(v) => Ok(v),
            Err(e) if matches!(e.kind(), std::num::IntErrorKind::PosOverflow | std::num::IntErrorKind::NegOverflow) => {
                self.err(t.column, format!("integer `{}` overflows", t.text))
            }
            Err(_) => self.err(t.column, format!("expected an integer, found `{}`", t.text)),
        }
    }

    fn unsigned(&self, t: &Tok, what: &str) -> Result<u64> {
        t.text.parse::<u64>().or_else(|_| self.err(t.column, format!("expected {} (non-negative integer), found `{}`", what, t.text)))
    }

    fn amount(&self, t: &Tok) -> Result<Amount> {
        let s = t.text;
        let lower = s.to_ascii_lowercase();
        if lower.contains("sqrt") || lower.contains("pi") || lower.contains('e') {
            return Ok(Amount::Irrational(s.to_string()));
        }
        if let Some((p, q)) = s.split_once('/') {
            let num = self.int(&Tok { text: p, column: t.column })?;
            let den = self.int(&Tok { text: q, column: t.column + p.len() + 1 })?;
            if den == 0 {
                return self.err(t.column + p.len() + 1, format!("zero denominator in `{}`", s));
            }
            if den < 0 {
                return self.err(t.column + p.len() + 1, format!("denominator must be positive in `{}`", s));
            }
            return Ok(Amount::Exact(Ratio::new(num, den)));
        }
        if let Some((ip, fp)) = s.split_once('.') {
            if fp.is_empty() || !fp.bytes().all(|b| b.is_ascii_digit()) || fp.len() > 15 {
                return self.err(t.column, format!("malformed decimal `{}`", s));
            }
            let neg = ip.starts_with('-');
            let whole = if ip.is_empty() || ip == "-" { 0 } else { self.int(&Tok { text: ip, column: t.column })? };
            let den = 10i64.pow(fp.len() as u32);
            let frac: i64 = fp.parse().or_else(|_| self.err(t.column, format!("malformed decimal `{}`", s)))?;
            let num = whole
                .checked_mul(den)
                .and_then(|w| if neg { w.checked_sub(frac) } else { w.checked_add(frac) })
                .map_or_else(|| self.err(t.column, format!("decimal `{}` overflows", s)), Ok)?;
            return Ok(Amount::Exact(Ratio::new(num, den)));
        }
        Ok(Amount::Exact(Ratio::from_integer(self.int(t)?)))
    }
}

struct Header {
    code: Code,
    d1: u64,
    modes: Option<usize>,
}

fn parse_header(ctx: &Ctx, toks: &[Tok]) -> Result<Header> {
    let family = match toks.get(1) {
        Some(t) if t.text == "gkp" || t.text == "rsb" => t.text,
        Some(t) => return ctx.err(t.column, format!("unknown code family `{}` (expected gkp or rsb)", t.text)),
        None => return ctx.err(toks[0].column + 4, "missing code family"),
    };
    let (mut d1, mut n, mut primitive, mut modes) = (None, None, None, None);
    for t in &toks[2..] {
        let Some((key, value)) = t.text.split_once('=') else {
            return ctx.err(t.column, format!("expected key=value, found `{}`", t.text));
        };
        let vt = Tok { text: value, column: t.column + key.len() + 1 };
        match (family, key) {
            (_, "d1") => d1 = Some(ctx.unsigned(&vt, "d1")?),
            (_, "modes") => modes = Some(ctx.unsigned(&vt, "a mode count")? as usize),
            ("rsb", "N") => n = Some(ctx.unsigned(&vt, "N")?),
            ("rsb", "primitive") => {
                primitive = Some(if value == "ideal" {
                    Primitive::IdealOrthogonal
                } else if let Some(a) = value.strip_prefix("coherent:") {
                    let alpha: f64 = a
                        .parse()
                        .ok()
                        .filter(|x: &f64| x.is_finite() && *x > 0.0)
                        .map_or_else(|| ctx.err(vt.column, format!("bad coherent amplitude `{}`", a)), Ok)?;
                    Primitive::Coherent(alpha)
                } else {
                    return ctx.err(vt.column, format!("unknown primitive `{}`", value));
                })
            }
            _ => return ctx.err(t.column, format!("unknown {} header key `{}`", family, key)),
        }
    }
    let d1 = d1.map_or_else(|| ctx.err(toks[0].column, "header needs d1=<d1>"), Ok)?;
    if d1 < 2 {
        return ctx.err(toks[0].column, format!("d1 must be at least 2, got {}", d1));
    }
    let code = if family == "gkp" {
        Code::Gkp
    } else {
        let n = n.map_or_else(|| ctx.err(toks[0].column, "rsb header needs N=<N>"), Ok)?;
        if n == 0 {
            return ctx.err(toks[0].column, "N must be positive");
        }
        Code::Rsb { n, primitive: primitive.unwrap_or(Primitive::IdealOrthogonal) }
    };
    Ok(Header { code, d1, modes })
}

fn non_clifford(label: &str, reason: &str) -> (String, String) {
    (label.to_string(), reason.to_string())
}

pub fn parse_circuit(text: &str) -> Result<CvCircuit> {
    let mut header: Option<Header> = None;
    let mut ops: Vec<Op> = Vec::new();
    let mut inputs: Vec<(usize, u64, usize, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let ctx = Ctx { line: idx + 1 };
        let line = raw.split('#').next().unwrap_or("");
        let toks = tokens(line);
        let Some(head) = toks.first() else { continue };
        if head.text == "code" {
            if header.is_some() {
                return ctx.err(head.column, "second `code` header");
            }
            header = Some(parse_header(&ctx, &toks)?);
            continue;
        }
        let Some(h) = header.as_ref() else {
            return ctx.err(head.column, "circuit must start with a `code` header");
        };
        let argc = |n: usize| -> Result<()> {
            if toks.len() != n + 1 {
                let col = toks.get(n + 1).map_or(raw.trim_end().len() + 1, |t| t.column);
                return ctx.err(col, format!("`{}` takes {} argument(s), got {}", head.text, n, toks.len() - 1));
            }
            Ok(())
        };
        let mode = |i: usize| -> Result<usize> {
            let t = &toks[i];
            let m = ctx.unsigned(t, "a mode index")? as usize;
            if let Some(k) = h.modes {
                if m >= k {
                    return ctx.err(t.column, format!("undeclared mode {} (circuit declares {} modes)", m, k));
                }
            }
            Ok(m)
        };
        if head.text == "input" {
            argc(2)?;
            let m = mode(1)?;
            let j = ctx.unsigned(&toks[2], "a logical basis index")?;
            if j >= h.d1 {
                return ctx.err(toks[2].column, format!("input {} is outside 0..{}", j, h.d1));
            }
            inputs.push((m, j, ctx.line, toks[1].column));
            continue;
        }
        let text = line.trim().to_string();
        let exact = |i: usize, label: &str| -> Result<std::result::Result<Ratio<i64>, (String, String)>> {
            Ok(match ctx.amount(&toks[i])? {
                Amount::Exact(r) => Ok(r),
                Amount::Irrational(s) => Err(non_clifford(
                    label,
                    &format!("amount `{}` is not an exact rational multiple of the lattice or rotation unit", s),
                )),
            })
        };
        let gate = match (&h.code, head.text) {
            (_, "tgate") | (_, "tcubic") | (_, "tquartic") => {
                argc(1)?;
                let reason = match (&h.code, head.text) {
                    (Code::Gkp, "tquartic") => "quartic position phase exp(i pi/4 (q/sqrt(pi))^4)",
                    (Code::Gkp, _) => "cubic position phase exp(i pi/4 [2(q/a)^3 + (q/a)^2 - 2 q/a])",
                    (Code::Rsb { .. }, "tcubic") => "cubic number phase exp(i pi/4 [2(n/N)^3 + (n/N)^2 - 2 n/N])",
                    (Code::Rsb { .. }, _) => "quartic Kerr exp(i pi n^4 / (4 N^4))",
                };
                let (label, reason) = non_clifford(head.text, reason);
                match h.code {
                    Code::Gkp => Gate::Gkp(GkpGate::new(GkpGateKind::NonClifford { label, reason }, &[mode(1)?])),
                    Code::Rsb { .. } => Gate::Rsb(RsbGate::new(RsbGateKind::NonClifford { label, reason }, &[mode(1)?])),
                }
            }
            (Code::Gkp, kw @ ("dispq" | "dispp" | "shearodd")) => {
                argc(2)?;
                let m = mode(1)?;
                let kind = match exact(2, kw)? {
                    Err((label, reason)) => GkpGateKind::NonClifford { label, reason },
                    Ok(t) if kw == "dispq" => GkpGateKind::DispQ(t),
                    Ok(t) if kw == "dispp" => GkpGateKind::DispP(t),
                    Ok(t) => GkpGateKind::ShearOdd(t),
                };
                Gate::Gkp(GkpGate::new(kind, &[m]))
            }
            (Code::Gkp, kw @ ("shear" | "fourier" | "homodyne")) => {
                argc(1)?;
                let kind = match kw {
                    "shear" => GkpGateKind::Shear,
                    "fourier" => GkpGateKind::Fourier,
                    _ => GkpGateKind::HomodyneQ,
                };
                Gate::Gkp(GkpGate::new(kind, &[mode(1)?]))
            }
            (Code::Gkp, "cz") => {
                argc(2)?;
                let (a, b) = (mode(1)?, mode(2)?);
                if a == b {
                    return ctx.err(toks[2].column, "cz needs two distinct modes");
                }
                Gate::Gkp(GkpGate::new(GkpGateKind::Cz, &[a, b]))
            }
            (Code::Rsb { .. }, "rot") => {
                argc(2)?;
                let m = mode(1)?;
                let kind = match exact(2, "rot")? {
                    Ok(r) => RsbGateKind::Rotation(r),
                    Err((label, reason)) => RsbGateKind::NonClifford { label, reason },
                };
                Gate::Rsb(RsbGate::new(kind, &[m]))
            }
            (Code::Rsb { .. }, "kerr") => {
                argc(3)?;
                let m = mode(1)?;
                let kind = match (exact(2, "kerr")?, exact(3, "kerr")?) {
                    (Ok(u), Ok(v)) => RsbGateKind::SelfKerr { u, v },
                    (Err((label, reason)), _) | (_, Err((label, reason))) => RsbGateKind::NonClifford { label, reason },
                };
                Gate::Rsb(RsbGate::new(kind, &[m]))
            }
            (Code::Rsb { .. }, "xkerr") => {
                argc(3)?;
                let (a, b) = (mode(1)?, mode(2)?);
                if a == b {
                    return ctx.err(toks[2].column, "xkerr needs two distinct modes");
                }
                let kind = match exact(3, "xkerr")? {
                    Ok(w) => RsbGateKind::CrossKerr(w),
                    Err((label, reason)) => RsbGateKind::NonClifford { label, reason },
                };
                Gate::Rsb(RsbGate::new(kind, &[a, b]))
            }
            (Code::Rsb { .. }, kw @ ("tfourier" | "phasemeas")) => {
                argc(1)?;
                let kind = if kw == "tfourier" { RsbGateKind::TeleportedFourier } else { RsbGateKind::PhaseMeasure };
                Gate::Rsb(RsbGate::new(kind, &[mode(1)?]))
            }
            (code, kw) => {
                let fam = if matches!(code, Code::Gkp) { "gkp" } else { "rsb" };
                return ctx.err(head.column, format!("unknown {} directive `{}`", fam, kw));
            }
        };
        ops.push(Op { line: ctx.line, text, gate });
    }
    let h = header.ok_or(Error::Parse { line: 1, column: 1, message: "empty circuit: no `code` header".into() })?;
    let used = ops
        .iter()
        .flat_map(|o| o.gate.modes().iter().copied())
        .chain(inputs.iter().map(|i| i.0))
        .max()
        .map_or(0, |m| m + 1);
    let modes = h.modes.unwrap_or(used.max(1));
    if modes == 0 {
        return Err(Error::Parse { line: 1, column: 1, message: "modes must be positive".into() });
    }
    let mut init = vec![0; modes];
    let mut seen = vec![false; modes];
    for (m, j, line, column) in inputs {
        if seen[m] {
            return Err(Error::Parse { line, column, message: format!("mode {} has two inputs", m) });
        }
        seen[m] = true;
        init[m] = j;
    }
    Ok(CvCircuit { code: h.code, d1: h.d1, modes, inputs: init, ops })
}
