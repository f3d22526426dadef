//! Lower-bound certificates in a four-rule system, with a binary codec, an
//! independent checker and a generator working from a bounds dump.
//!
//! Rules, for a subject `X` of width `w` and claimed bound `k`:
//!
//! * `Triv`: `s(X) ≥ 0`.
//! * `PH`: `s(X) ≥ 1` when `|X| ≥ w + 2`.
//! * `Succ`: every non-redundant comparator `[i, j]` has a premise `Y` with
//!   `Y ⊆ transform(X^[i,j], σ, b)`; then `k ≤ 1 + min` of the premise bounds.
//! * `Huffman`: with `Z = X` or its negation, every prunable channel `p` of
//!   `Z` has exactly one premise `Y ⊆ transform(Z/p, σ, b)`; then `k` is at
//!   most the Huffman value of the premise bounds.
//!
//! The checker only uses set operations; it never canonicalizes.

use std::fmt;

use parking_lot::Mutex;
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::canon::canonicalize;
use crate::dump::Dump;
use crate::error::{Error, Result};
use crate::huffman::huffman_min;
use crate::seqset::{BoolSeqSet, ChannelPermutation, Comparator, MAX_WIDTH};
use crate::subsume::{filter_nonsubsumed, Redirect, RedirectIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Triv,
    Ph,
    Succ,
    Huffman,
}

impl Rule {
    fn code(self) -> u8 {
        match self {
            Rule::Triv => 0,
            Rule::Ph => 1,
            Rule::Succ => 2,
            Rule::Huffman => 3,
        }
    }

    fn from_code(b: u8) -> Option<Rule> {
        Some(match b {
            0 => Rule::Triv,
            1 => Rule::Ph,
            2 => Rule::Succ,
            3 => Rule::Huffman,
            _ => return None,
        })
    }
}

/// How a premise's bound is justified.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PremiseKind {
    InlineTriv,
    InlinePh,
    /// The subject of an earlier step, embedded via `transform(·, perm, negate)`.
    StepRef {
        index: u64,
        negate: bool,
        perm: ChannelPermutation,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Premise {
    /// Comparator `(i, j)` for `Succ`, `(p, 0)` for `Huffman`.
    pub discriminator: (u8, u8),
    pub kind: PremiseKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CertStep {
    pub rule: Rule,
    pub subject: BoolSeqSet,
    pub bound: u32,
    /// Only meaningful for `Huffman`.
    pub negate: bool,
    pub premises: Vec<Premise>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Certificate {
    pub n: u8,
    pub steps: Vec<CertStep>,
}

/// Why a certificate was rejected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rejection {
    BadRef,
    BadSubset,
    BadCoverage,
    BadBound,
    BadChannels,
    BadRule,
    TruncatedInput,
}

impl Rejection {
    pub fn code(&self) -> &'static str {
        match self {
            Rejection::BadRef => "bad-ref",
            Rejection::BadSubset => "bad-subset",
            Rejection::BadCoverage => "bad-coverage",
            Rejection::BadBound => "bad-bound",
            Rejection::BadChannels => "bad-channels",
            Rejection::BadRule => "bad-rule",
            Rejection::TruncatedInput => "truncated-input",
        }
    }
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{code} at step {step}")]
pub struct CheckError {
    pub step: usize,
    pub code: Rejection,
}

/// A step's verified conclusion `s(subject) ≥ bound`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verified {
    pub width: usize,
    pub bound: u32,
}

fn premise_bound(
    steps: &[CertStep],
    current: usize,
    target: &BoolSeqSet,
    kind: &PremiseKind,
) -> Result<u32, Rejection> {
    match kind {
        PremiseKind::InlineTriv => Ok(0),
        PremiseKind::InlinePh => {
            if target.len() >= target.width() + 2 {
                Ok(1)
            } else {
                Err(Rejection::BadSubset)
            }
        }
        PremiseKind::StepRef {
            index,
            negate,
            perm,
        } => {
            let index = usize::try_from(*index).map_err(|_| Rejection::BadRef)?;
            if index >= current {
                return Err(Rejection::BadRef);
            }
            let referenced = &steps[index];
            if referenced.subject.width() != target.width() || perm.width() != target.width() {
                return Err(Rejection::BadRef);
            }
            let image = target
                .transform(perm, *negate)
                .map_err(|_| Rejection::BadRef)?;
            if !referenced.subject.is_subset(&image) {
                return Err(Rejection::BadSubset);
            }
            Ok(referenced.bound)
        }
    }
}

/// Verifies step `index` assuming every earlier step is valid.
pub fn check_step(steps: &[CertStep], index: usize) -> Result<Verified, Rejection> {
    let step = &steps[index];
    let x = &step.subject;
    let w = x.width();
    if step.negate && step.rule != Rule::Huffman {
        return Err(Rejection::BadRule);
    }
    match step.rule {
        Rule::Triv => {
            if !step.premises.is_empty() {
                return Err(Rejection::BadRule);
            }
            if step.bound != 0 {
                return Err(Rejection::BadBound);
            }
        }
        Rule::Ph => {
            if !step.premises.is_empty() || x.len() < w + 2 {
                return Err(Rejection::BadRule);
            }
            if step.bound != 1 {
                return Err(Rejection::BadBound);
            }
        }
        Rule::Succ => {
            if step.premises.is_empty() {
                return Err(Rejection::BadCoverage);
            }
            let mut covered: FxHashMap<(u8, u8), &Premise> = FxHashMap::default();
            for p in &step.premises {
                if covered.insert(p.discriminator, p).is_some() {
                    return Err(Rejection::BadCoverage);
                }
            }
            let mut least = u32::MAX;
            for c in Comparator::all(w) {
                let Some(z) = x.successor_for(c) else {
                    continue;
                };
                let premise = covered
                    .remove(&(c.i() as u8, c.j() as u8))
                    .ok_or(Rejection::BadCoverage)?;
                least = least.min(premise_bound(steps, index, &z, &premise.kind)?);
            }
            if !covered.is_empty() || least == u32::MAX {
                return Err(Rejection::BadCoverage);
            }
            if step.bound > least.saturating_add(1) {
                return Err(Rejection::BadBound);
            }
        }
        Rule::Huffman => {
            if w < 2 {
                return Err(Rejection::BadRule);
            }
            let z0 = if step.negate { x.negate() } else { x.clone() };
            let prunable = z0.prunable_mask();
            let mut seen = 0u32;
            for p in &step.premises {
                let (c, pad) = p.discriminator;
                if c as usize >= w || pad != 0 || seen & (1 << c) != 0 {
                    return Err(Rejection::BadChannels);
                }
                seen |= 1 << c;
            }
            if seen != prunable || prunable == 0 {
                return Err(Rejection::BadChannels);
            }
            let mut bounds = Vec::with_capacity(step.premises.len());
            for p in &step.premises {
                let pruned = z0
                    .prune(p.discriminator.0 as usize)
                    .map_err(|_| Rejection::BadChannels)?;
                bounds.push(premise_bound(steps, index, &pruned, &p.kind)?);
            }
            let h = huffman_min(&bounds).map_err(|_| Rejection::BadChannels)?;
            if step.bound > h {
                return Err(Rejection::BadBound);
            }
        }
    }
    Ok(Verified {
        width: w,
        bound: step.bound,
    })
}

fn final_result(cert: &Certificate) -> Result<(usize, u32), CheckError> {
    let last = cert.steps.len().checked_sub(1).ok_or(CheckError {
        step: 0,
        code: Rejection::TruncatedInput,
    })?;
    let step = &cert.steps[last];
    if step.subject.width() != cert.n as usize {
        return Err(CheckError {
            step: last,
            code: Rejection::BadRule,
        });
    }
    Ok((cert.n as usize, step.bound))
}

/// Verifies every step in order; returns `(n, k)` certifying `s(n) ≥ k`.
pub fn check_certificate(cert: &Certificate) -> Result<(usize, u32), CheckError> {
    for index in 0..cert.steps.len() {
        check_step(&cert.steps, index).map_err(|code| CheckError { step: index, code })?;
    }
    final_result(cert)
}

/// Same verdict as [`check_certificate`], verifying steps concurrently.
pub fn check_certificate_parallel(cert: &Certificate) -> Result<(usize, u32), CheckError> {
    let first_failure = (0..cert.steps.len())
        .into_par_iter()
        .filter_map(|index| {
            check_step(&cert.steps, index)
                .err()
                .map(|code| CheckError { step: index, code })
        })
        .min_by_key(|e| e.step);
    match first_failure {
        Some(e) => Err(e),
        None => final_result(cert),
    }
}

// ---------------------------------------------------------------------------
// Codec

pub const MAGIC: &[u8; 4] = b"SNB1";
pub const VERSION: u8 = 1;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("bad magic")]
    BadMagic,
    #[error("unsupported version {0}")]
    VersionMismatch(u8),
    #[error("truncated input")]
    Truncated,
    #[error("step {step} references out-of-range step {index}")]
    IndexOutOfRange { step: usize, index: u64 },
    #[error("non-bijective permutation in step {0}")]
    NonBijectivePermutation(usize),
    #[error("malformed certificate: {0}")]
    Malformed(String),
}

impl Certificate {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.push(self.n);
        out.extend_from_slice(&(self.steps.len() as u64).to_le_bytes());
        for step in &self.steps {
            out.push(step.rule.code());
            out.push(step.subject.width() as u8);
            out.extend_from_slice(&step.subject.to_bytes());
            out.extend_from_slice(&step.bound.to_le_bytes());
            if step.rule == Rule::Huffman {
                out.push(step.negate as u8);
            }
            out.extend_from_slice(&(step.premises.len() as u32).to_le_bytes());
            for p in &step.premises {
                out.push(p.discriminator.0);
                if step.rule != Rule::Huffman {
                    out.push(p.discriminator.1);
                }
                match &p.kind {
                    PremiseKind::InlineTriv => out.push(0),
                    PremiseKind::InlinePh => out.push(1),
                    PremiseKind::StepRef {
                        index,
                        negate,
                        perm,
                    } => {
                        out.push(2);
                        out.extend_from_slice(&index.to_le_bytes());
                        out.push(*negate as u8);
                        out.extend(perm.images().map(|c| c as u8));
                    }
                }
            }
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Certificate, ParseError> {
        let mut r = Reader { bytes, pos: 0 };
        if bytes.len() < 4 || &bytes[..4] != MAGIC {
            return Err(ParseError::BadMagic);
        }
        r.pos = 4;
        let version = r.u8()?;
        if version != VERSION {
            return Err(ParseError::VersionMismatch(version));
        }
        let n = r.u8()?;
        let count = r.u64()?;
        let mut steps = Vec::new();
        for s in 0..count {
            let s = s as usize;
            let rule = Rule::from_code(r.u8()?)
                .ok_or_else(|| ParseError::Malformed(format!("unknown rule in step {s}")))?;
            let width = r.u8()? as usize;
            if width > MAX_WIDTH {
                return Err(ParseError::Malformed(format!("width {width} in step {s}")));
            }
            let subject = BoolSeqSet::from_bytes(width, r.take(BoolSeqSet::bitmap_len(width))?)
                .map_err(|e| ParseError::Malformed(e.to_string()))?;
            let bound = r.u32()?;
            let negate = if rule == Rule::Huffman {
                r.flag(s)?
            } else {
                false
            };
            let premise_count = r.u32()?;
            let perm_width = match rule {
                Rule::Huffman => width.saturating_sub(1),
                _ => width,
            };
            let mut premises = Vec::new();
            for _ in 0..premise_count {
                let a = r.u8()?;
                let b = if rule == Rule::Huffman { 0 } else { r.u8()? };
                let kind = match r.u8()? {
                    0 => PremiseKind::InlineTriv,
                    1 => PremiseKind::InlinePh,
                    2 => {
                        let index = r.u64()?;
                        if index >= count {
                            return Err(ParseError::IndexOutOfRange { step: s, index });
                        }
                        let negate = r.flag(s)?;
                        let image: Vec<usize> =
                            r.take(perm_width)?.iter().map(|&c| c as usize).collect();
                        let perm = ChannelPermutation::new(image)
                            .map_err(|_| ParseError::NonBijectivePermutation(s))?;
                        PremiseKind::StepRef {
                            index,
                            negate,
                            perm,
                        }
                    }
                    k => {
                        return Err(ParseError::Malformed(format!(
                            "premise kind {k} in step {s}"
                        )))
                    }
                };
                premises.push(Premise {
                    discriminator: (a, b),
                    kind,
                });
            }
            steps.push(CertStep {
                rule,
                subject,
                bound,
                negate,
                premises,
            });
        }
        if r.pos != bytes.len() {
            return Err(ParseError::Malformed("trailing bytes".into()));
        }
        Ok(Certificate { n, steps })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8], ParseError> {
        let end = self.pos.checked_add(len).ok_or(ParseError::Truncated)?;
        let slice = self.bytes.get(self.pos..end).ok_or(ParseError::Truncated)?;
        self.pos = end;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8, ParseError> {
        Ok(self.take(1)?[0])
    }

    fn flag(&mut self, step: usize) -> Result<bool, ParseError> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            b => Err(ParseError::Malformed(format!(
                "negation byte {b} in step {step}"
            ))),
        }
    }

    fn u32(&mut self) -> Result<u32, ParseError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, ParseError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

// ---------------------------------------------------------------------------
// Generation

/// Builds a certificate for `s(n) ≥ s` from a bounds dump.
pub fn generate_certificate(dump: &Dump) -> Result<Certificate> {
    let n = dump.manifest.n;
    let s = dump.manifest.s;
    if n == 0 || n > MAX_WIDTH {
        return Err(Error::Corrupt(format!("manifest channel count {n}")));
    }
    let full = BoolSeqSet::full(n)?;
    let single = |rule, bound| Certificate {
        n: n as u8,
        steps: vec![CertStep {
            rule,
            subject: full.clone(),
            bound,
            negate: false,
            premises: Vec::new(),
        }],
    };
    if s == 0 {
        return Ok(single(Rule::Triv, 0));
    }
    if s == 1 && full.len() >= n + 2 {
        return Ok(single(Rule::Ph, 1));
    }
    let levels = dump
        .parts
        .iter()
        .flat_map(|(&(_, k), sets)| sets.iter().map(move |set| (set.clone(), k)))
        .collect();
    let parts = dump
        .parts
        .iter()
        .map(|(&key, sets)| Ok((key, filter_nonsubsumed(sets)?)))
        .collect::<Result<_>>()?;
    let mut generator = Generator {
        index: RedirectIndex::new(parts),
        levels,
        redirects: Mutex::new(FxHashMap::default()),
        steps: Vec::new(),
        registry: FxHashMap::default(),
    };
    let top = generator.redirect(&full)?.ok_or_else(|| {
        Error::Corrupt(format!("no stored set certifies a bound for {n} channels"))
    })?;
    if top.k < s {
        return Err(Error::Corrupt(format!(
            "stored sets only certify s({n}) ≥ {}, manifest claims {s}",
            top.k
        )));
    }
    generator.step_for(&top.set, top.k)?;
    Ok(Certificate {
        n: n as u8,
        steps: generator.steps,
    })
}

struct Generator {
    index: RedirectIndex,
    /// Stored lower bound of every dumped set, before filtering.
    levels: FxHashMap<BoolSeqSet, u32>,
    /// Redirects of canonical forms.
    redirects: Mutex<FxHashMap<BoolSeqSet, Option<Redirect>>>,
    steps: Vec<CertStep>,
    registry: FxHashMap<BoolSeqSet, usize>,
}

/// A premise source before its referenced step has been emitted.
enum Source {
    Inline(PremiseKind, u32),
    Stored {
        set: BoolSeqSet,
        k: u32,
        perm: ChannelPermutation,
        negate: bool,
    },
}

impl Source {
    fn bound(&self) -> u32 {
        match self {
            Source::Inline(_, k) | Source::Stored { k, .. } => *k,
        }
    }
}

impl Generator {
    /// A surviving set from the part of `x`, falling back to every part.
    fn lookup(&self, x: &BoolSeqSet) -> Result<Option<Redirect>> {
        let Some(&k) = self.levels.get(x) else {
            return Ok(None);
        };
        if let Some(index) = self.index.part(x.width(), k) {
            if let Some((position, perm, negate)) = index.find_subsumed_into(x, |_| true)? {
                return Ok(Some(Redirect {
                    set: index.sets()[position].clone(),
                    k,
                    position,
                    perm,
                    negate,
                }));
            }
        }
        match self.index.redirect(x) {
            Ok(r) => Ok(Some(r)),
            Err(Error::NotFound(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// A stored set `Y` with `transform(Y, σ, b) ⊆ z`, taken from the part
    /// holding the canonical form of `z`.
    fn redirect(&self, z: &BoolSeqSet) -> Result<Option<Redirect>> {
        let cf = canonicalize(z);
        let cached = self.redirects.lock().get(&cf.set).cloned();
        let found = match cached {
            Some(found) => found,
            None => {
                let found = self.lookup(&cf.set)?;
                self.redirects.lock().insert(cf.set, found.clone());
                found
            }
        };
        // transform(Y, σ, b) ⊆ transform(z, π, c)  ⇔  transform(Y, σπ⁻¹, b ⊕ c) ⊆ z
        Ok(found.map(|r| Redirect {
            perm: r.perm.then(&cf.perm.inverse()),
            negate: r.negate ^ cf.negate,
            ..r
        }))
    }

    /// The best available bound for an arbitrary set `z`.
    fn source(&self, z: &BoolSeqSet) -> Result<Source> {
        let inline = if z.len() >= z.width() + 2 {
            Source::Inline(PremiseKind::InlinePh, 1)
        } else {
            Source::Inline(PremiseKind::InlineTriv, 0)
        };
        Ok(match self.redirect(z)? {
            Some(r) if r.k > inline.bound() => Source::Stored {
                set: r.set,
                k: r.k,
                // transform(Y, σ, b) ⊆ Z  ⇔  Y ⊆ transform(Z, σ⁻¹, b)
                perm: r.perm.inverse(),
                negate: r.negate,
            },
            _ => inline,
        })
    }

    fn sources(&self, targets: &[BoolSeqSet]) -> Result<Vec<Source>> {
        targets.par_iter().map(|z| self.source(z)).collect()
    }

    fn premise(&mut self, discriminator: (u8, u8), source: Source) -> Result<Premise> {
        let kind = match source {
            Source::Inline(kind, _) => kind,
            Source::Stored {
                set,
                k,
                perm,
                negate,
            } => PremiseKind::StepRef {
                index: self.step_for(&set, k)? as u64,
                negate,
                perm,
            },
        };
        Ok(Premise {
            discriminator,
            kind,
        })
    }

    /// Emits (once) a step proving `s(x) ≥ k` and returns its index.
    fn step_for(&mut self, x: &BoolSeqSet, k: u32) -> Result<usize> {
        if let Some(&i) = self.registry.get(x) {
            if self.steps[i].bound >= k {
                return Ok(i);
            }
        }
        let w = x.width();
        let (rule, negate, planned) = self.plan(x, k)?;
        let mut premises = Vec::with_capacity(planned.len());
        for (discriminator, source) in planned {
            premises.push(self.premise(discriminator, source)?);
        }
        let index = self.steps.len();
        self.steps.push(CertStep {
            rule,
            subject: x.clone(),
            bound: k,
            negate,
            premises,
        });
        debug_assert!(check_step(&self.steps, index).is_ok(), "width {w}");
        self.registry.insert(x.clone(), index);
        Ok(index)
    }

    #[allow(clippy::type_complexity)]
    fn plan(&self, x: &BoolSeqSet, k: u32) -> Result<(Rule, bool, Vec<((u8, u8), Source)>)> {
        let w = x.width();
        if k == 0 {
            return Ok((Rule::Triv, false, Vec::new()));
        }
        if k == 1 && x.len() >= w + 2 {
            return Ok((Rule::Ph, false, Vec::new()));
        }
        for negate in [false, true] {
            let z0 = if negate { x.negate() } else { x.clone() };
            let channels = z0.prunable_channels();
            if channels.is_empty() {
                continue;
            }
            // Interiors are what the search bounded; they lie inside `Z/p`.
            let pruned = channels
                .iter()
                .map(|&p| z0.pruned_interior(p))
                .collect::<Result<Vec<_>>>()?;
            let sources = self.sources(&pruned)?;
            let bounds: Vec<u32> = sources.iter().map(Source::bound).collect();
            if huffman_min(&bounds)? >= k {
                let planned = channels
                    .iter()
                    .map(|&p| (p as u8, 0))
                    .zip(sources)
                    .collect();
                return Ok((Rule::Huffman, negate, planned));
            }
        }
        let successors = x.successors();
        let targets: Vec<BoolSeqSet> = successors.iter().map(|(_, z)| z.clone()).collect();
        let sources = self.sources(&targets)?;
        let least = sources.iter().map(Source::bound).min();
        match least {
            Some(least) if least + 1 >= k => Ok((
                Rule::Succ,
                false,
                successors
                    .iter()
                    .map(|(c, _)| (c.i() as u8, c.j() as u8))
                    .zip(sources)
                    .collect(),
            )),
            _ => Err(Error::Corrupt(format!(
                "no rule derives s ≥ {k} for a stored set of width {w}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(rule: Rule, subject: BoolSeqSet, bound: u32, premises: Vec<Premise>) -> CertStep {
        CertStep {
            rule,
            subject,
            bound,
            negate: false,
            premises,
        }
    }

    fn two_cube_succ(kind: PremiseKind) -> Certificate {
        let full = BoolSeqSet::full(2).unwrap();
        let succ = full
            .apply_comparator(Comparator::new(0, 1).unwrap())
            .unwrap();
        Certificate {
            n: 2,
            steps: vec![
                step(Rule::Triv, succ, 0, vec![]),
                step(
                    Rule::Succ,
                    full,
                    1,
                    vec![Premise {
                        discriminator: (0, 1),
                        kind,
                    }],
                ),
            ],
        }
    }

    #[test]
    fn triv_accepts_anything_at_zero() {
        for n in 1..=4 {
            let cert = Certificate {
                n,
                steps: vec![step(
                    Rule::Triv,
                    BoolSeqSet::full(n as usize).unwrap(),
                    0,
                    vec![],
                )],
            };
            assert_eq!(check_certificate(&cert), Ok((n as usize, 0)));
        }
        let bad = Certificate {
            n: 2,
            steps: vec![step(Rule::Triv, BoolSeqSet::full(2).unwrap(), 1, vec![])],
        };
        assert_eq!(
            check_certificate(&bad).unwrap_err().code,
            Rejection::BadBound
        );
    }

    #[test]
    fn succ_on_the_two_cube() {
        let inline = two_cube_succ(PremiseKind::InlinePh);
        assert_eq!(
            check_certificate(&inline).unwrap_err(),
            CheckError {
                step: 1,
                code: Rejection::BadSubset
            }
        );
        let referenced = two_cube_succ(PremiseKind::StepRef {
            index: 0,
            negate: false,
            perm: ChannelPermutation::identity(2),
        });
        assert_eq!(check_certificate(&referenced), Ok((2, 1)));
        let mut no_premises = referenced.clone();
        no_premises.steps[1].premises.clear();
        assert_eq!(
            check_certificate(&no_premises).unwrap_err().code,
            Rejection::BadCoverage
        );
        let mut forward = referenced.clone();
        forward.steps[1].premises[0].kind = PremiseKind::StepRef {
            index: 1,
            negate: false,
            perm: ChannelPermutation::identity(2),
        };
        assert_eq!(
            check_certificate(&forward).unwrap_err().code,
            Rejection::BadRef
        );
    }

    #[test]
    fn huffman_requires_every_prunable_channel() {
        let full = BoolSeqSet::full(3).unwrap();
        let premises: Vec<Premise> = (0..3)
            .map(|p| Premise {
                discriminator: (p, 0),
                kind: PremiseKind::InlinePh,
            })
            .collect();
        let ok = Certificate {
            n: 3,
            steps: vec![step(Rule::Huffman, full.clone(), 3, premises.clone())],
        };
        assert_eq!(check_certificate(&ok), Ok((3, 3)));
        let missing = Certificate {
            n: 3,
            steps: vec![step(Rule::Huffman, full.clone(), 2, premises[..2].to_vec())],
        };
        assert_eq!(
            check_certificate(&missing).unwrap_err().code,
            Rejection::BadChannels
        );
        let overstated = Certificate {
            n: 3,
            steps: vec![step(Rule::Huffman, full, 4, premises)],
        };
        assert_eq!(
            check_certificate(&overstated).unwrap_err().code,
            Rejection::BadBound
        );
    }

    #[test]
    fn ph_is_strict() {
        let sorted_plus_one = BoolSeqSet::from_codes(3, [0, 4, 6, 7, 1]).unwrap();
        let sorted = BoolSeqSet::sorted(3).unwrap();
        let ok = Certificate {
            n: 3,
            steps: vec![step(Rule::Ph, sorted_plus_one, 1, vec![])],
        };
        assert_eq!(check_certificate(&ok), Ok((3, 1)));
        let bad = Certificate {
            n: 3,
            steps: vec![step(Rule::Ph, sorted, 1, vec![])],
        };
        assert_eq!(
            check_certificate(&bad).unwrap_err().code,
            Rejection::BadRule
        );
    }

    #[test]
    fn codec_round_trip_and_errors() {
        let cert = two_cube_succ(PremiseKind::StepRef {
            index: 0,
            negate: true,
            perm: ChannelPermutation::new(vec![1, 0]).unwrap(),
        });
        let bytes = cert.encode();
        assert_eq!(Certificate::decode(&bytes).unwrap(), cert);
        assert_eq!(Certificate::decode(&[]), Err(ParseError::BadMagic));
        let mut v = bytes.clone();
        v[4] = 2;
        assert_eq!(Certificate::decode(&v), Err(ParseError::VersionMismatch(2)));
        assert_eq!(
            Certificate::decode(&bytes[..bytes.len() - 1]),
            Err(ParseError::Truncated)
        );
        let mut dup = bytes.clone();
        let last = dup.len() - 1;
        dup[last] = dup[last - 1];
        assert_eq!(
            Certificate::decode(&dup),
            Err(ParseError::NonBijectivePermutation(1))
        );
        let mut far = bytes.clone();
        let idx = far.len() - 2 - 1 - 8;
        far[idx] = 9;
        assert!(matches!(
            Certificate::decode(&far),
            Err(ParseError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn generated_certificates_check() {
        for n in 1..=6 {
            let search = crate::Search::new();
            let s = search.min_size(n).unwrap();
            let dump = Dump::from_table(n, s, search.table());
            let cert = generate_certificate(&dump).unwrap();
            let decoded = Certificate::decode(&cert.encode()).unwrap();
            assert_eq!(check_certificate(&decoded), Ok((n, s)));
            assert_eq!(check_certificate_parallel(&decoded), Ok((n, s)));
        }
    }

    #[test]
    fn empty_certificate_is_truncated() {
        let cert = Certificate {
            n: 3,
            steps: vec![],
        };
        assert_eq!(
            check_certificate(&cert).unwrap_err().code,
            Rejection::TruncatedInput
        );
    }
}
