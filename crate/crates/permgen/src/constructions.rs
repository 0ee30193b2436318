//! Constructors for benchmark and test groups, driven by a small expression
//! language.
//!
//! # Grammar
//!
//! ```text
//! spec  := atom | comb
//! atom  := "sym(" n ")" | "alt(" n ")" | "cyclic(" n ")" | "dihedral(" n ")"
//!        | "psl_3_2" | "q8"
//!        | "from_file(" quoted-path ")"
//!        | "raw(" n ("," quoted-cycles)* ")"
//! comb  := "direct_product(" spec ("," spec)+ ")"
//!        | "direct_power(" spec "," k ")"
//!        | "wreath(" spec "," spec ")"
//!        | "crown_inversion(" p "," k ")"
//! ```
//!
//! Whitespace is free between tokens. `wreath_imprimitive` is accepted as a
//! synonym for `wreath`; the printer always writes `wreath`.
//!
//! Direct products act on disjoint point sets (degrees add).
//! `wreath(G, H)` with `G` of degree `m` and `H` of degree `k` is the
//! imprimitive wreath action on `m·k` points: one copy of `G` per block, and
//! `H` permuting the blocks; its order is `|G|^k · |H|`.
//! `crown_inversion(p, k)` (odd prime `p`) acts on `p·k` points: one `p`-cycle
//! per block plus the simultaneous inversion of all blocks, a group of order
//! `2·p^k`.
//!
//! # Group files
//!
//! `from_file` reads: first non-comment line `degree n`, then one generator
//! per line in cycle notation. `#` starts a comment; blank lines are ignored.

use crate::group::Group;
use crate::perm::{parse_cycles, Perm};
use crate::Error;
use std::fmt;

/// Parsed group-construction expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Sym(u32),
    Alt(u32),
    Cyclic(u32),
    Dihedral(u32),
    Psl32,
    Q8,
    FromFile(String),
    Raw { degree: u32, gens: Vec<String> },
    DirectProduct(Vec<GroupSpec>),
    DirectPower(Box<GroupSpec>, u32),
    Wreath(Box<GroupSpec>, Box<GroupSpec>),
    CrownInversion(u32, u32),
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Sym(n) => write!(f, "sym({n})"),
            GroupSpec::Alt(n) => write!(f, "alt({n})"),
            GroupSpec::Cyclic(n) => write!(f, "cyclic({n})"),
            GroupSpec::Dihedral(n) => write!(f, "dihedral({n})"),
            GroupSpec::Psl32 => write!(f, "psl_3_2"),
            GroupSpec::Q8 => write!(f, "q8"),
            GroupSpec::FromFile(path) => write!(f, "from_file({:?})", path),
            GroupSpec::Raw { degree, gens } => {
                write!(f, "raw({degree}")?;
                for g in gens {
                    write!(f, ", {:?}", g)?;
                }
                write!(f, ")")
            }
            GroupSpec::DirectProduct(parts) => {
                write!(f, "direct_product(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
            GroupSpec::DirectPower(g, k) => write!(f, "direct_power({g}, {k})"),
            GroupSpec::Wreath(g, h) => write!(f, "wreath({g}, {h})"),
            GroupSpec::CrownInversion(p, k) => write!(f, "crown_inversion({p}, {k})"),
        }
    }
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, Error> {
        Err(Error::SpecSyntax(self.pos, msg.into()))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn expect(&mut self, ch: u8) -> Result<(), Error> {
        if self.peek() == Some(ch) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", ch as char))
        }
    }

    fn ident(&mut self) -> Result<String, Error> {
        self.skip_ws();
        let start = self.pos;
        while self
            .text
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
        {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected a name");
        }
        Ok(std::str::from_utf8(&self.text[start..self.pos])
            .unwrap()
            .to_string())
    }

    fn number(&mut self) -> Result<u32, Error> {
        self.skip_ws();
        let start = self.pos;
        while self.text.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected a number");
        }
        std::str::from_utf8(&self.text[start..self.pos])
            .unwrap()
            .parse()
            .or_else(|_| {
                self.pos = start;
                self.err("number too large")
            })
    }

    fn quoted(&mut self) -> Result<String, Error> {
        self.expect(b'"')?;
        let start = self.pos;
        while self.text.get(self.pos).is_some_and(|&c| c != b'"') {
            self.pos += 1;
        }
        if self.pos >= self.text.len() {
            self.pos = start;
            return self.err("unterminated string");
        }
        let s = std::str::from_utf8(&self.text[start..self.pos])
            .map_err(|_| Error::SpecSyntax(start, "invalid UTF-8 in string".into()))?
            .to_string();
        self.pos += 1; // closing quote
        Ok(s)
    }

    fn spec(&mut self) -> Result<GroupSpec, Error> {
        let name_pos = {
            self.skip_ws();
            self.pos
        };
        let name = self.ident()?;
        match name.as_str() {
            "psl_3_2" => Ok(GroupSpec::Psl32),
            "q8" => Ok(GroupSpec::Q8),
            "sym" | "alt" | "cyclic" | "dihedral" => {
                self.expect(b'(')?;
                let n = self.number()?;
                self.expect(b')')?;
                Ok(match name.as_str() {
                    "sym" => GroupSpec::Sym(n),
                    "alt" => GroupSpec::Alt(n),
                    "cyclic" => GroupSpec::Cyclic(n),
                    _ => GroupSpec::Dihedral(n),
                })
            }
            "from_file" => {
                self.expect(b'(')?;
                let path = self.quoted()?;
                self.expect(b')')?;
                Ok(GroupSpec::FromFile(path))
            }
            "raw" => {
                self.expect(b'(')?;
                let degree = self.number()?;
                let mut gens = Vec::new();
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    gens.push(self.quoted()?);
                }
                self.expect(b')')?;
                Ok(GroupSpec::Raw { degree, gens })
            }
            "direct_product" => {
                self.expect(b'(')?;
                let mut parts = vec![self.spec()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    parts.push(self.spec()?);
                }
                self.expect(b')')?;
                if parts.len() < 2 {
                    return self.err("direct_product needs at least two factors");
                }
                Ok(GroupSpec::DirectProduct(parts))
            }
            "direct_power" => {
                self.expect(b'(')?;
                let g = self.spec()?;
                self.expect(b',')?;
                let k = self.number()?;
                self.expect(b')')?;
                Ok(GroupSpec::DirectPower(Box::new(g), k))
            }
            "wreath" | "wreath_imprimitive" => {
                self.expect(b'(')?;
                let g = self.spec()?;
                self.expect(b',')?;
                let h = self.spec()?;
                self.expect(b')')?;
                Ok(GroupSpec::Wreath(Box::new(g), Box::new(h)))
            }
            "crown_inversion" => {
                self.expect(b'(')?;
                let p = self.number()?;
                self.expect(b',')?;
                let k = self.number()?;
                self.expect(b')')?;
                Ok(GroupSpec::CrownInversion(p, k))
            }
            _ => Err(Error::SpecSyntax(
                name_pos,
                format!("unknown construction '{name}'"),
            )),
        }
    }
}

/// Parses a group-construction expression; errors carry byte offsets.
pub fn parse_spec(text: &str) -> Result<GroupSpec, Error> {
    let mut p = Parser {
        text: text.as_bytes(),
        pos: 0,
    };
    let spec = p.spec()?;
    p.skip_ws();
    if p.pos != p.text.len() {
        return p.err("trailing input after expression");
    }
    Ok(spec)
}

fn cycle_perm(degree: usize, points: &[u32]) -> Perm {
    let mut images: Vec<u32> = (0..degree as u32).collect();
    for w in points.windows(2) {
        images[w[0] as usize] = w[1];
    }
    if points.len() > 1 {
        images[*points.last().unwrap() as usize] = points[0];
    }
    Perm::from_images(images).unwrap()
}

fn sym_group(n: u32) -> Result<Group, Error> {
    if n == 0 {
        return Err(Error::BadGenerators("sym(n) needs n ≥ 1".into()));
    }
    let n = n as usize;
    let mut gens = Vec::new();
    if n >= 2 {
        gens.push(cycle_perm(n, &[0, 1]));
    }
    if n >= 3 {
        gens.push(cycle_perm(n, &(0..n as u32).collect::<Vec<_>>()));
    }
    Group::new(n, gens)
}

fn alt_group(n: u32) -> Result<Group, Error> {
    if n == 0 {
        return Err(Error::BadGenerators("alt(n) needs n ≥ 1".into()));
    }
    let n = n as usize;
    let mut gens = Vec::new();
    if n >= 3 {
        gens.push(cycle_perm(n, &[0, 1, 2]));
    }
    if n >= 4 {
        // an even permutation completing the generation: the full cycle for
        // odd n, the cycle on points 2..n for even n
        let cyc: Vec<u32> = if n % 2 == 1 {
            (0..n as u32).collect()
        } else {
            (1..n as u32).collect()
        };
        gens.push(cycle_perm(n, &cyc));
    }
    Group::new(n, gens)
}

fn cyclic_group(n: u32) -> Result<Group, Error> {
    if n == 0 {
        return Err(Error::BadGenerators("cyclic(n) needs n ≥ 1".into()));
    }
    let n = n as usize;
    let gens = if n >= 2 {
        vec![cycle_perm(n, &(0..n as u32).collect::<Vec<_>>())]
    } else {
        Vec::new()
    };
    Group::new(n, gens)
}

fn dihedral_group(n: u32) -> Result<Group, Error> {
    if n < 3 {
        return Err(Error::BadGenerators(
            "dihedral(n) needs n ≥ 3 for a faithful degree-n action".into(),
        ));
    }
    let n = n as usize;
    let rotation = cycle_perm(n, &(0..n as u32).collect::<Vec<_>>());
    // reflection fixing point 0: i ↦ n - i for i ≥ 1
    let reflection =
        Perm::from_images((0..n as u32).map(|i| if i == 0 { 0 } else { n as u32 - i }).collect())
            .unwrap();
    Group::new(n, vec![rotation, reflection])
}

fn psl_3_2_group() -> Group {
    // PSL(3,2) on the 7 points of the Fano plane; order 168, checked below.
    let a = parse_cycles("(1 2 3 4 5 6 7)", 7).unwrap();
    let b = parse_cycles("(1 2)(3 5)", 7).unwrap();
    let g = Group::new(7, vec![a, b]).unwrap();
    assert_eq!(g.order_u64(), Some(168), "PSL(3,2) generator sanity check");
    g
}

fn q8_group() -> Group {
    // Quaternion group in its regular action on 8 points.
    let i = parse_cycles("(1 3 2 4)(5 8 6 7)", 8).unwrap();
    let j = parse_cycles("(1 5 2 6)(3 7 4 8)", 8).unwrap();
    let g = Group::new(8, vec![i, j]).unwrap();
    assert_eq!(g.order_u64(), Some(8), "Q8 generator sanity check");
    g
}

/// Parses a group file: first line `degree n`, then one generator per line in
/// cycle notation; `#` comments and blank lines allowed.
pub fn parse_group_file(content: &str) -> Result<Group, Error> {
    let mut degree: Option<usize> = None;
    let mut gens = Vec::new();
    for raw_line in content.lines() {
        let line = match raw_line.find('#') {
            Some(i) => &raw_line[..i],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        match degree {
            None => {
                let rest = line.strip_prefix("degree").ok_or_else(|| {
                    Error::BadGenerators("group file must start with 'degree n'".into())
                })?;
                let n: usize = rest.trim().parse().map_err(|_| {
                    Error::BadGenerators(format!("bad degree line: '{line}'"))
                })?;
                degree = Some(n);
            }
            Some(n) => {
                let p = parse_cycles(line, n)
                    .map_err(|e| Error::BadGenerators(format!("in '{line}': {e}")))?;
                gens.push(p);
            }
        }
    }
    let n = degree.ok_or_else(|| Error::BadGenerators("empty group file".into()))?;
    Group::new(n, gens)
}

/// Direct product on disjoint point sets; degrees add, orders multiply.
pub fn direct_product(parts: &[Group]) -> Group {
    let total: usize = parts.iter().map(|g| g.degree()).sum();
    let mut gens = Vec::new();
    let mut offset = 0usize;
    for part in parts {
        for g in part.generators() {
            let mut images: Vec<u32> = (0..total as u32).collect();
            for x in 0..part.degree() {
                images[offset + x] = (offset as u32) + g.apply(x as u32);
            }
            gens.push(Perm::from_images(images).unwrap());
        }
        offset += part.degree();
    }
    Group::new(total, gens).unwrap()
}

/// Imprimitive wreath product: one copy of `g` per point of `h`, with `h`
/// permuting the copies blockwise. Order `|g|^deg(h) · |h|`.
pub fn wreath_imprimitive(g: &Group, h: &Group) -> Group {
    let m = g.degree();
    let k = h.degree();
    let total = m * k;
    let mut gens = Vec::new();
    for block in 0..k {
        for gen in g.generators() {
            let mut images: Vec<u32> = (0..total as u32).collect();
            for x in 0..m {
                images[block * m + x] = (block * m) as u32 + gen.apply(x as u32);
            }
            gens.push(Perm::from_images(images).unwrap());
        }
    }
    for gen in h.generators() {
        let mut images: Vec<u32> = vec![0; total];
        for block in 0..k {
            let target = gen.apply(block as u32) as usize;
            for x in 0..m {
                images[block * m + x] = (target * m + x) as u32;
            }
        }
        gens.push(Perm::from_images(images).unwrap());
    }
    Group::new(total, gens).unwrap()
}

/// `p^k : 2` on `p·k` points: one `p`-cycle per block, plus the involution
/// inverting every block simultaneously. Order `2·p^k`; the inversion acts
/// identically on all blocks, which forces a generating set of size `k + 1`.
pub fn crown_inversion(p: u32, k: u32) -> Result<Group, Error> {
    let is_odd_prime = p >= 3 && p % 2 == 1 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0);
    if !is_odd_prime {
        return Err(Error::BadGenerators(format!(
            "crown_inversion needs an odd prime, got {p}"
        )));
    }
    if k == 0 {
        return Err(Error::BadGenerators("crown_inversion needs k ≥ 1".into()));
    }
    let (p, k) = (p as usize, k as usize);
    let total = p * k;
    let mut gens = Vec::new();
    for block in 0..k {
        let pts: Vec<u32> = (0..p as u32).map(|i| (block * p) as u32 + i).collect();
        gens.push(cycle_perm(total, &pts));
    }
    let mut images: Vec<u32> = vec![0; total];
    for block in 0..k {
        for i in 0..p {
            let inv = if i == 0 { 0 } else { p - i };
            images[block * p + i] = (block * p + inv) as u32;
        }
    }
    gens.push(Perm::from_images(images).unwrap());
    Group::new(total, gens)
}

/// Builds the concrete permutation group described by `spec`.
pub fn elaborate(spec: &GroupSpec) -> Result<Group, Error> {
    match spec {
        GroupSpec::Sym(n) => sym_group(*n),
        GroupSpec::Alt(n) => alt_group(*n),
        GroupSpec::Cyclic(n) => cyclic_group(*n),
        GroupSpec::Dihedral(n) => dihedral_group(*n),
        GroupSpec::Psl32 => Ok(psl_3_2_group()),
        GroupSpec::Q8 => Ok(q8_group()),
        GroupSpec::FromFile(path) => {
            let content = std::fs::read_to_string(path)
                .map_err(|e| Error::FileRead(path.clone(), e.to_string()))?;
            parse_group_file(&content)
        }
        GroupSpec::Raw { degree, gens } => {
            let n = *degree as usize;
            let perms: Result<Vec<Perm>, Error> = gens
                .iter()
                .map(|s| {
                    parse_cycles(s, n).map_err(|e| Error::BadGenerators(format!("in '{s}': {e}")))
                })
                .collect();
            Group::new(n, perms?)
        }
        GroupSpec::DirectProduct(parts) => {
            let groups: Result<Vec<Group>, Error> = parts.iter().map(elaborate).collect();
            Ok(direct_product(&groups?))
        }
        GroupSpec::DirectPower(g, k) => {
            if *k == 0 {
                return Err(Error::BadGenerators("direct_power needs k ≥ 1".into()));
            }
            let base = elaborate(g)?;
            let copies: Vec<Group> = (0..*k).map(|_| base.clone()).collect();
            Ok(direct_product(&copies))
        }
        GroupSpec::Wreath(g, h) => Ok(wreath_imprimitive(&elaborate(g)?, &elaborate(h)?)),
        GroupSpec::CrownInversion(p, k) => crown_inversion(*p, *k),
    }
}

/// Convenience: parse and elaborate in one step.
pub fn build(text: &str) -> Result<Group, Error> {
    elaborate(&parse_spec(text)?)
}
