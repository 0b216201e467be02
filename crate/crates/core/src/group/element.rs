//! Canonical normal forms: reduced words (free), integer vectors (abelian),
//! Heisenberg triples (p, q, r) under the law
//! (p,q,r)(p',q',r') = (p+p', q+q', r+r'+p·q'), residues (cyclic), and
//! alternating syllable lists (free products).

use super::ModelKind;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    /// Reduced word over signed generator letters.
    Word(Vec<i16>),
    /// Integer vector.
    Vector(Vec<i64>),
    /// Heisenberg triple (p, q, r).
    Heis(i64, i64, i64),
    /// Residue mod the model order.
    Cyclic(u64),
    /// Alternating nonidentity syllables (factor index, factor element).
    Product(Vec<(u8, GroupElement)>),
}

impl GroupElement {
    pub fn is_identity(&self) -> bool {
        match self {
            GroupElement::Word(w) => w.is_empty(),
            GroupElement::Vector(v) => v.iter().all(|&x| x == 0),
            GroupElement::Heis(p, q, r) => *p == 0 && *q == 0 && *r == 0,
            GroupElement::Cyclic(r) => *r == 0,
            GroupElement::Product(s) => s.is_empty(),
        }
    }

    /// Syllables of a free-product normal form; `None` for other forms.
    pub fn syllables(&self) -> Option<&[(u8, GroupElement)]> {
        match self {
            GroupElement::Product(s) => Some(s),
            _ => None,
        }
    }

    /// Canonical byte encoding; unique per element, usable as a map key and
    /// as a deterministic sort key.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16);
        self.encode_into(&mut out);
        out
    }

    pub fn encode_into(&self, out: &mut Vec<u8>) {
        match self {
            GroupElement::Word(w) => {
                out.push(1);
                write_uvarint(out, w.len() as u64);
                for &l in w {
                    write_ivarint(out, l as i64);
                }
            }
            GroupElement::Vector(v) => {
                out.push(2);
                write_uvarint(out, v.len() as u64);
                for &x in v {
                    write_ivarint(out, x);
                }
            }
            GroupElement::Heis(p, q, r) => {
                out.push(3);
                write_ivarint(out, *p);
                write_ivarint(out, *q);
                write_ivarint(out, *r);
            }
            GroupElement::Cyclic(r) => {
                out.push(4);
                write_uvarint(out, *r);
            }
            GroupElement::Product(s) => {
                out.push(5);
                write_uvarint(out, s.len() as u64);
                for (idx, e) in s {
                    out.push(*idx);
                    e.encode_into(out);
                }
            }
        }
    }

    pub fn decode(bytes: &[u8]) -> Result<GroupElement> {
        let mut pos = 0usize;
        let e = decode_at(bytes, &mut pos)?;
        if pos != bytes.len() {
            return Err(Error::Invalid("trailing bytes in element encoding".into()));
        }
        Ok(e)
    }
}

fn decode_at(bytes: &[u8], pos: &mut usize) -> Result<GroupElement> {
    let tag = *bytes.get(*pos).ok_or_else(|| Error::Invalid("truncated encoding".into()))?;
    *pos += 1;
    match tag {
        1 => {
            let n = read_uvarint(bytes, pos)? as usize;
            let mut w = Vec::with_capacity(n);
            for _ in 0..n {
                w.push(read_ivarint(bytes, pos)? as i16);
            }
            Ok(GroupElement::Word(w))
        }
        2 => {
            let n = read_uvarint(bytes, pos)? as usize;
            let mut v = Vec::with_capacity(n);
            for _ in 0..n {
                v.push(read_ivarint(bytes, pos)?);
            }
            Ok(GroupElement::Vector(v))
        }
        3 => {
            let p = read_ivarint(bytes, pos)?;
            let q = read_ivarint(bytes, pos)?;
            let r = read_ivarint(bytes, pos)?;
            Ok(GroupElement::Heis(p, q, r))
        }
        4 => Ok(GroupElement::Cyclic(read_uvarint(bytes, pos)?)),
        5 => {
            let n = read_uvarint(bytes, pos)? as usize;
            let mut s = Vec::with_capacity(n);
            for _ in 0..n {
                let idx = *bytes.get(*pos).ok_or_else(|| Error::Invalid("truncated encoding".into()))?;
                *pos += 1;
                s.push((idx, decode_at(bytes, pos)?));
            }
            Ok(GroupElement::Product(s))
        }
        t => Err(Error::Invalid(format!("bad element tag {t}"))),
    }
}

fn write_uvarint(out: &mut Vec<u8>, mut x: u64) {
    loop {
        let b = (x & 0x7f) as u8;
        x >>= 7;
        if x == 0 {
            out.push(b);
            return;
        }
        out.push(b | 0x80);
    }
}

fn write_ivarint(out: &mut Vec<u8>, x: i64) {
    write_uvarint(out, ((x << 1) ^ (x >> 63)) as u64);
}

fn read_uvarint(bytes: &[u8], pos: &mut usize) -> Result<u64> {
    let mut x = 0u64;
    let mut shift = 0u32;
    loop {
        let b = *bytes.get(*pos).ok_or_else(|| Error::Invalid("truncated varint".into()))?;
        *pos += 1;
        x |= ((b & 0x7f) as u64) << shift;
        if b & 0x80 == 0 {
            return Ok(x);
        }
        shift += 7;
        if shift > 63 {
            return Err(Error::Invalid("varint overflow".into()));
        }
    }
}

fn read_ivarint(bytes: &[u8], pos: &mut usize) -> Result<i64> {
    let u = read_uvarint(bytes, pos)?;
    Ok(((u >> 1) as i64) ^ -((u & 1) as i64))
}

pub(super) fn identity(kind: &ModelKind) -> GroupElement {
    match kind {
        ModelKind::FreeGroup { .. } => GroupElement::Word(Vec::new()),
        ModelKind::FreeAbelian { rank } => GroupElement::Vector(vec![0; *rank]),
        ModelKind::Heisenberg => GroupElement::Heis(0, 0, 0),
        ModelKind::FiniteCyclic { .. } => GroupElement::Cyclic(0),
        ModelKind::FreeProduct { .. } => GroupElement::Product(Vec::new()),
    }
}

pub(super) fn letter_to_factor(kind: &ModelKind, letter: i16) -> Option<(usize, i16)> {
    let ModelKind::FreeProduct { factors } = kind else { return None };
    let mut base = 0i16;
    for (i, f) in factors.iter().enumerate() {
        let width = f
            .generators()
            .iter()
            .map(|g| g.letter.unsigned_abs() as i16)
            .max()
            .unwrap_or(0);
        let abs = letter.abs();
        if abs > base && abs <= base + width {
            let local = abs - base;
            return Some((i, if letter < 0 { -local } else { local }));
        }
        base += width;
    }
    None
}

pub(super) fn from_letter(kind: &ModelKind, letter: i16) -> Result<GroupElement> {
    if letter == 0 {
        return Err(Error::Invalid("generator letter 0".into()));
    }
    let abs = letter.unsigned_abs() as usize;
    match kind {
        ModelKind::FreeGroup { rank } => {
            if abs > *rank {
                return Err(Error::Invalid(format!("letter {letter} outside rank {rank}")));
            }
            Ok(GroupElement::Word(vec![letter]))
        }
        ModelKind::FreeAbelian { rank } => {
            if abs > *rank {
                return Err(Error::Invalid(format!("letter {letter} outside rank {rank}")));
            }
            let mut v = vec![0i64; *rank];
            v[abs - 1] = if letter < 0 { -1 } else { 1 };
            Ok(GroupElement::Vector(v))
        }
        ModelKind::Heisenberg => match letter {
            1 => Ok(GroupElement::Heis(1, 0, 0)),
            -1 => Ok(GroupElement::Heis(-1, 0, 0)),
            2 => Ok(GroupElement::Heis(0, 1, 0)),
            -2 => Ok(GroupElement::Heis(0, -1, 0)),
            _ => Err(Error::Invalid(format!("letter {letter} outside Heisenberg generators"))),
        },
        ModelKind::FiniteCyclic { order } => {
            if abs != 1 {
                return Err(Error::Invalid(format!("letter {letter} outside cyclic generators")));
            }
            Ok(GroupElement::Cyclic(if letter > 0 { 1 } else { order - 1 }))
        }
        ModelKind::FreeProduct { factors } => {
            let (fi, local) = letter_to_factor(kind, letter)
                .ok_or_else(|| Error::Invalid(format!("letter {letter} outside free product generators")))?;
            let inner = from_letter(factors[fi].kind(), local)?;
            Ok(GroupElement::Product(vec![(fi as u8, inner)]))
        }
    }
}

pub(super) fn check_model(kind: &ModelKind, g: &GroupElement) -> Result<()> {
    let ok = match (kind, g) {
        (ModelKind::FreeGroup { rank }, GroupElement::Word(w)) => {
            w.iter().all(|l| *l != 0 && l.unsigned_abs() as usize <= *rank)
        }
        (ModelKind::FreeAbelian { rank }, GroupElement::Vector(v)) => v.len() == *rank,
        (ModelKind::Heisenberg, GroupElement::Heis(..)) => true,
        (ModelKind::FiniteCyclic { order }, GroupElement::Cyclic(r)) => r < order,
        (ModelKind::FreeProduct { factors }, GroupElement::Product(s)) => s
            .iter()
            .all(|(i, e)| (*i as usize) < factors.len() && check_model(factors[*i as usize].kind(), e).is_ok()),
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::ModelMismatch(format!("{g:?} does not belong to {kind:?}")))
    }
}

pub(super) fn compose(kind: &ModelKind, a: &GroupElement, b: &GroupElement) -> GroupElement {
    match (kind, a, b) {
        (ModelKind::FreeGroup { .. }, GroupElement::Word(x), GroupElement::Word(y)) => {
            let mut w = x.clone();
            for &l in y {
                if w.last().is_some_and(|&t| t == -l) {
                    w.pop();
                } else {
                    w.push(l);
                }
            }
            GroupElement::Word(w)
        }
        (ModelKind::FreeAbelian { .. }, GroupElement::Vector(x), GroupElement::Vector(y)) => {
            GroupElement::Vector(x.iter().zip(y).map(|(u, v)| u + v).collect())
        }
        (ModelKind::Heisenberg, GroupElement::Heis(p, q, r), GroupElement::Heis(p2, q2, r2)) => {
            GroupElement::Heis(p + p2, q + q2, r + r2 + p * q2)
        }
        (ModelKind::FiniteCyclic { order }, GroupElement::Cyclic(x), GroupElement::Cyclic(y)) => {
            GroupElement::Cyclic((x + y) % order)
        }
        (ModelKind::FreeProduct { factors }, GroupElement::Product(x), GroupElement::Product(y)) => {
            // Greedy left-to-right merge at the seam.
            let mut s = x.clone();
            for (idx, e) in y {
                push_syllable(factors, &mut s, *idx, e.clone());
            }
            GroupElement::Product(s)
        }
        _ => unreachable!("compose on mismatched forms"),
    }
}

fn push_syllable(factors: &[super::GroupModel], s: &mut Vec<(u8, GroupElement)>, idx: u8, e: GroupElement) {
    if e.is_identity() {
        return;
    }
    if let Some((last_idx, last)) = s.last_mut() {
        if *last_idx == idx {
            let merged = compose(factors[idx as usize].kind(), last, &e);
            if merged.is_identity() {
                s.pop();
            } else {
                *last = merged;
            }
            return;
        }
    }
    s.push((idx, e));
}

pub(super) fn invert(kind: &ModelKind, a: &GroupElement) -> GroupElement {
    match (kind, a) {
        (ModelKind::FreeGroup { .. }, GroupElement::Word(w)) => {
            GroupElement::Word(w.iter().rev().map(|l| -l).collect())
        }
        (ModelKind::FreeAbelian { .. }, GroupElement::Vector(v)) => {
            GroupElement::Vector(v.iter().map(|x| -x).collect())
        }
        (ModelKind::Heisenberg, GroupElement::Heis(p, q, r)) => {
            GroupElement::Heis(-p, -q, p * q - r)
        }
        (ModelKind::FiniteCyclic { order }, GroupElement::Cyclic(r)) => {
            GroupElement::Cyclic(if *r == 0 { 0 } else { order - r })
        }
        (ModelKind::FreeProduct { factors }, GroupElement::Product(s)) => GroupElement::Product(
            s.iter()
                .rev()
                .map(|(i, e)| (*i, invert(factors[*i as usize].kind(), e)))
                .collect(),
        ),
        _ => unreachable!("invert on mismatched form"),
    }
}
