//! Permutations of `{1..n}` with cycle-notation parsing and printing.
//!
//! The action convention is left-to-right everywhere in this crate:
//! `x^(ab) = (x^a)^b`, i.e. [`Perm::compose`]`(a, b)` maps `x` to `b(a(x))`.
//! Points are 1-based in all textual I/O and 0-based internally.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use std::fmt;

/// A permutation of `{0..n-1}` stored as its image table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    /// The identity on `n` points.
    pub fn identity(n: usize) -> Self {
        Perm {
            images: (0..n as u32).collect(),
        }
    }

    /// Builds a permutation from a 0-based image table, checking bijectivity.
    pub fn from_images(images: Vec<u32>) -> Result<Self, crate::Error> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &y in &images {
            if (y as usize) >= n || seen[y as usize] {
                return Err(crate::Error::BadGenerators(format!(
                    "image table of length {n} is not a bijection"
                )));
            }
            seen[y as usize] = true;
        }
        Ok(Perm { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        debug_assert!(Perm::from_images(images.clone()).is_ok());
        Perm { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of the 0-based point `x`.
    #[inline(always)]
    pub fn apply(&self, x: u32) -> u32 {
        self.images[x as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &y)| i as u32 == y)
    }

    /// `compose(a, b)` applies `a` first, then `b` (left-to-right action).
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree(), "degree mismatch in compose");
        Perm {
            images: self.images.iter().map(|&y| other.images[y as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &y) in self.images.iter().enumerate() {
            inv[y as usize] = i as u32;
        }
        Perm { images: inv }
    }

    /// The conjugate `g⁻¹·self·g` (apply `g⁻¹`, then `self`, then `g`).
    pub fn conjugate_by(&self, g: &Perm) -> Perm {
        g.inverse().compose(self).compose(g)
    }

    /// The commutator `a⁻¹·b⁻¹·a·b`.
    pub fn commutator(a: &Perm, b: &Perm) -> Perm {
        a.inverse().compose(&b.inverse()).compose(a).compose(b)
    }

    /// `self` raised to a non-negative big-integer power, by squaring.
    pub fn pow_big(&self, e: &BigUint) -> Perm {
        let mut acc = Perm::identity(self.degree());
        let mut sq = self.clone();
        for i in 0..e.bits() {
            if e.bit(i) {
                acc = acc.compose(&sq);
            }
            if i + 1 < e.bits() {
                sq = sq.compose(&sq);
            }
        }
        acc
    }

    pub fn pow(&self, e: u64) -> Perm {
        self.pow_big(&BigUint::from(e))
    }

    /// Lengths of all cycles, including fixed points (length 1).
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                len += 1;
                x = self.images[x] as usize;
            }
            out.push(len);
        }
        out
    }

    /// Multiplicative order: the lcm of the cycle lengths.
    pub fn element_order(&self) -> BigUint {
        let mut ord = BigUint::one();
        for len in self.cycle_lengths() {
            ord = ord.lcm(&BigUint::from(len));
        }
        ord
    }

    /// 0-based points moved by the permutation, ascending.
    pub fn moved_points(&self) -> Vec<u32> {
        self.images
            .iter()
            .enumerate()
            .filter(|&(i, &y)| i as u32 != y)
            .map(|(i, _)| i as u32)
            .collect()
    }

    /// Smallest moved 0-based point, if any.
    pub fn first_moved_point(&self) -> Option<u32> {
        self.images
            .iter()
            .enumerate()
            .find(|&(i, &y)| i as u32 != y)
            .map(|(i, _)| i as u32)
    }

    /// Prints disjoint cycles with 1-based points; the identity is `()`.
    pub fn to_cycles_string(&self) -> String {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for s in 0..n {
            if seen[s] || self.images[s] as usize == s {
                seen[s] = true;
                continue;
            }
            out.push('(');
            let mut x = s;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    out.push(' ');
                }
                first = false;
                out.push_str(&(x + 1).to_string());
                x = self.images[x] as usize;
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cycles_string())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm[{}]{}", self.degree(), self.to_cycles_string())
    }
}

/// Error from [`parse_cycles`], annotated with a 0-based byte offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("point {point} out of range 1..={degree} at byte {pos}")]
    PointOutOfRange { pos: usize, point: u64, degree: usize },
    #[error("point {point} repeated within one cycle at byte {pos}")]
    RepeatedPointInCycle { pos: usize, point: u64 },
    #[error("syntax error at byte {pos}: {msg}")]
    SyntaxError { pos: usize, msg: String },
}

/// Parses cycle notation over `{1..degree}`.
///
/// Grammar: `perm := "()" | cycle+` with `cycle := "(" int (ws int)* ")"`.
/// Cycles need not be disjoint; they multiply left-to-right. The empty
/// string and `()` both denote the identity.
pub fn parse_cycles(text: &str, degree: usize) -> Result<Perm, ParseError> {
    let bytes = text.as_bytes();
    let mut pos = 0usize;
    let mut images: Vec<u32> = (0..degree as u32).collect();
    let mut any_cycle = false;

    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };

    skip_ws(&mut pos);
    while pos < bytes.len() {
        if bytes[pos] != b'(' {
            return Err(ParseError::SyntaxError {
                pos,
                msg: format!("expected '(', found {:?}", bytes[pos] as char),
            });
        }
        pos += 1;
        skip_ws(&mut pos);
        let mut cycle: Vec<u32> = Vec::new();
        loop {
            if pos >= bytes.len() {
                return Err(ParseError::SyntaxError {
                    pos,
                    msg: "unterminated cycle".into(),
                });
            }
            if bytes[pos] == b')' {
                pos += 1;
                break;
            }
            if !bytes[pos].is_ascii_digit() {
                return Err(ParseError::SyntaxError {
                    pos,
                    msg: format!("expected point or ')', found {:?}", bytes[pos] as char),
                });
            }
            let start = pos;
            let mut val: u64 = 0;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                val = val.saturating_mul(10).saturating_add((bytes[pos] - b'0') as u64);
                pos += 1;
            }
            if val == 0 || val > degree as u64 {
                return Err(ParseError::PointOutOfRange {
                    pos: start,
                    point: val,
                    degree,
                });
            }
            let p = (val - 1) as u32;
            if cycle.contains(&p) {
                return Err(ParseError::RepeatedPointInCycle { pos: start, point: val });
            }
            cycle.push(p);
            skip_ws(&mut pos);
        }
        any_cycle = true;
        if cycle.len() > 1 {
            // Fold this cycle onto the accumulated product (cycle applied last).
            let mut cyc: Vec<u32> = (0..degree as u32).collect();
            for w in cycle.windows(2) {
                cyc[w[0] as usize] = w[1];
            }
            cyc[cycle[cycle.len() - 1] as usize] = cycle[0];
            for y in images.iter_mut() {
                *y = cyc[*y as usize];
            }
        }
        skip_ws(&mut pos);
    }
    let _ = any_cycle;
    Ok(Perm { images })
}
