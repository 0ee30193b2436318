//! Small exact linear algebra over the prime field F_p, supporting the
//! irreducible-module refinement of elementary abelian layers.
//!
//! Vectors are coordinate rows `Vec<u32>` with entries in `0..p`; matrices
//! act on the right (row vector times matrix), matching the right-conjugation
//! action used throughout.

use crate::Error;

/// A subspace of F_p^dim kept in reduced row echelon form.
#[derive(Clone, Debug)]
pub struct FpSpace {
    p: u64,
    dim: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // p prime, a ≠ 0 mod p: Fermat
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

impl FpSpace {
    pub fn new(p: u32, dim: usize) -> Self {
        FpSpace {
            p: p as u64,
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// Reduces `v` against the stored rows (returns the residual).
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.dim);
        let p = self.p;
        let mut out: Vec<u64> = v.iter().map(|&x| x as u64 % p).collect();
        for (row, &col) in self.rows.iter().zip(&self.pivots) {
            let c = out[col];
            if c != 0 {
                for (o, &r) in out.iter_mut().zip(row.iter()) {
                    *o = (*o + (p - c) * r as u64) % p;
                }
            }
        }
        out.into_iter().map(|x| x as u32).collect()
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Inserts `v`; returns true iff the rank grew.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        let mut red = self.reduce(v);
        let Some(col) = red.iter().position(|&x| x != 0) else {
            return false;
        };
        let p = self.p;
        let scale = inv_mod(red[col] as u64, p);
        for x in red.iter_mut() {
            *x = ((*x as u64) * scale % p) as u32;
        }
        // back-substitute into existing rows
        for row in self.rows.iter_mut() {
            let c = row[col] as u64;
            if c != 0 {
                for (r, &n) in row.iter_mut().zip(red.iter()) {
                    *r = ((*r as u64 + (p - c) * n as u64) % p) as u32;
                }
            }
        }
        let at = self.pivots.partition_point(|&c| c < col);
        self.pivots.insert(at, col);
        self.rows.insert(at, red);
        true
    }
}

/// An l×l matrix over F_p acting on row vectors from the right.
#[derive(Clone, Debug, PartialEq)]
pub struct FpMatrix {
    p: u64,
    pub rows: Vec<Vec<u32>>,
}

impl FpMatrix {
    pub fn new(p: u32, rows: Vec<Vec<u32>>) -> Self {
        let dim = rows.len();
        for r in &rows {
            assert_eq!(r.len(), dim);
        }
        FpMatrix { p: p as u64, rows }
    }

    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        let dim = self.rows.len();
        assert_eq!(v.len(), dim);
        let mut out = vec![0u64; dim];
        for (i, &c) in v.iter().enumerate() {
            if c != 0 {
                let c = c as u64;
                for (o, &m) in out.iter_mut().zip(self.rows[i].iter()) {
                    *o = (*o + c * m as u64) % self.p;
                }
            }
        }
        out.into_iter().map(|x| x as u32).collect()
    }
}

/// Closure of the span of `seeds` under the matrices: the smallest submodule
/// containing the seeds.
pub fn spin(p: u32, dim: usize, seeds: &[Vec<u32>], mats: &[FpMatrix]) -> FpSpace {
    let mut space = FpSpace::new(p, dim);
    let mut frontier: Vec<Vec<u32>> = Vec::new();
    for s in seeds {
        if space.insert(s) {
            frontier.push(s.clone());
        }
    }
    while let Some(v) = frontier.pop() {
        for m in mats {
            let w = m.apply(&v);
            if space.insert(&w) {
                frontier.push(w);
            }
        }
    }
    space
}

/// Number of 1-dimensional subspaces of F_p^r: (p^r − 1)/(p − 1), or `None`
/// on overflow past `u64`.
pub fn line_count(p: u32, r: usize) -> Option<u64> {
    let mut total: u64 = 0;
    let mut power: u64 = 1;
    for _ in 0..r {
        total = total.checked_add(power)?;
        power = power.checked_mul(p as u64)?;
    }
    Some(total)
}

/// All projective-line representatives in the row space of `basis`
/// (first non-zero coefficient normalized to 1), as ambient vectors.
fn lines_in_span(p: u32, dim: usize, basis: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let r = basis.len();
    let mut out = Vec::new();
    // leading coefficient index i: coeffs[0..i] = 0, coeffs[i] = 1, rest free
    for lead in 0..r {
        let free = r - lead - 1;
        let mut counter = vec![0u32; free];
        loop {
            let mut v = vec![0u64; dim];
            for (k, &b) in basis[lead].iter().enumerate() {
                v[k] += b as u64;
            }
            for (j, &c) in counter.iter().enumerate() {
                if c != 0 {
                    for (k, &b) in basis[lead + 1 + j].iter().enumerate() {
                        v[k] += c as u64 * b as u64;
                    }
                }
            }
            out.push(v.into_iter().map(|x| (x % p as u64) as u32).collect());
            // increment counter in base p
            let mut pos = 0;
            loop {
                if pos == free {
                    break;
                }
                counter[pos] += 1;
                if counter[pos] < p {
                    break;
                }
                counter[pos] = 0;
                pos += 1;
            }
            if pos == free {
                break;
            }
        }
    }
    out
}

/// A basis of a minimal non-zero submodule of F_p^dim under the matrices.
///
/// Exact (every line swept) while the number of lines in the candidate stays
/// within `line_cap`; for larger spaces, descends by spinning basis vectors
/// and errors with [`Error::RefinementFailed`] if minimality cannot be
/// certified.
pub fn minimal_submodule(
    p: u32,
    dim: usize,
    mats: &[FpMatrix],
    line_cap: u64,
) -> Result<Vec<Vec<u32>>, Error> {
    assert!(dim > 0);
    let mut identity_basis: Vec<Vec<u32>> = Vec::new();
    for i in 0..dim {
        let mut e = vec![0u32; dim];
        e[i] = 1;
        identity_basis.push(e);
    }
    minimal_submodule_within(p, dim, mats, &identity_basis, line_cap)
}

fn minimal_submodule_within(
    p: u32,
    dim: usize,
    mats: &[FpMatrix],
    basis: &[Vec<u32>],
    line_cap: u64,
) -> Result<Vec<Vec<u32>>, Error> {
    let r = basis.len();
    if r == 1 {
        return Ok(basis.to_vec());
    }
    if line_count(p, r).is_some_and(|c| c <= line_cap) {
        // sweep every line; any submodule contains a line, so the smallest
        // spin over all lines is a minimal submodule
        let mut best: Option<FpSpace> = None;
        for v in lines_in_span(p, dim, basis) {
            let s = spin(p, dim, &[v], mats);
            if s.rank() == 1 {
                return Ok(s.basis().to_vec());
            }
            if best.as_ref().is_none_or(|b| s.rank() < b.rank()) {
                best = Some(s);
            }
        }
        return Ok(best.expect("non-trivial space has lines").basis().to_vec());
    }
    // too many lines: descend greedily through spins of basis vectors
    let mut smallest: Option<FpSpace> = None;
    for v in basis {
        let s = spin(p, dim, &[v.clone()], mats);
        if s.rank() < r && smallest.as_ref().is_none_or(|b| s.rank() < b.rank()) {
            smallest = Some(s);
        }
    }
    match smallest {
        Some(s) => {
            let inner = s.basis().to_vec();
            minimal_submodule_within(p, dim, mats, &inner, line_cap)
        }
        None => Err(Error::RefinementFailed(format!(
            "cannot certify irreducibility of a {r}-dimensional module over F_{p} \
             ({} lines exceed the sweep cap {line_cap})",
            line_count(p, r)
                .map(|c| c.to_string())
                .unwrap_or_else(|| "≥2^64".into())
        ))),
    }
}
