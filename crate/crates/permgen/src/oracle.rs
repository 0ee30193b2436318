//! Brute-force reference implementations for small groups.
//!
//! Everything here works by explicit element enumeration and is deliberately
//! independent of the stabilizer-chain machinery: elements are produced by
//! closure under the generators, not by chain traversal. These functions are
//! the ground truth the fast algorithms are tested against.
//!
//! Enumeration order is lexicographic by image vector, so all sweeps are
//! reproducible.

use crate::group::Group;
use crate::perm::Perm;
use crate::Error;
use num_integer::Integer;
use std::collections::HashMap;

/// Largest group the oracles will enumerate.
pub const ORACLE_ELEMENT_CAP: usize = 5000;

/// Pair-density sweeps are quadratic; keep them smaller.
pub const ORACLE_PAIR_CAP: usize = 400;

/// A fully enumerated group: all elements, lexicographically sorted, with an
/// index for constant-time lookup.
pub struct Enumerated {
    degree: usize,
    elements: Vec<Perm>,
    index: HashMap<Vec<u32>, usize>,
}

impl Enumerated {
    /// Enumerates `⟨gens⟩` by breadth-first closure; errors with
    /// [`Error::CapExceeded`] once more than `cap` elements appear.
    pub fn close(gens: &[Perm], degree: usize, cap: usize) -> Result<Self, Error> {
        let id = Perm::identity(degree);
        let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
        index.insert(id.images().to_vec(), 0);
        let mut elements = vec![id];
        let mut head = 0;
        while head < elements.len() {
            let cur = elements[head].clone();
            head += 1;
            for g in gens {
                let next = cur.compose(g);
                if !index.contains_key(next.images()) {
                    if elements.len() >= cap {
                        return Err(Error::CapExceeded(format!(
                            "group has more than {cap} elements"
                        )));
                    }
                    index.insert(next.images().to_vec(), elements.len());
                    elements.push(next);
                }
            }
        }
        elements.sort_by(|a, b| a.images().cmp(b.images()));
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, p)| (p.images().to_vec(), i))
            .collect();
        Ok(Enumerated {
            degree,
            elements,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a group always contains the identity
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.index.get(p.images()).copied()
    }

    pub fn identity_index(&self) -> usize {
        self.index_of(&Perm::identity(self.degree)).unwrap()
    }

    /// Index map of right multiplication by element `g`.
    fn right_mult_map(&self, g: &Perm) -> Vec<u32> {
        self.elements
            .iter()
            .map(|e| self.index_of(&e.compose(g)).expect("closed under products") as u32)
            .collect()
    }

    /// Size of the subgroup generated by the given element indices, by
    /// breadth-first closure over the index set.
    pub fn subgroup_closure(&self, gen_idxs: &[usize]) -> Vec<usize> {
        let maps: Vec<Vec<u32>> = gen_idxs
            .iter()
            .map(|&i| self.right_mult_map(&self.elements[i]))
            .collect();
        let mut seen = vec![false; self.len()];
        let start = self.identity_index();
        seen[start] = true;
        let mut out = vec![start];
        let mut head = 0;
        while head < out.len() {
            let cur = out[head];
            head += 1;
            for m in &maps {
                let next = m[cur] as usize;
                if !seen[next] {
                    seen[next] = true;
                    out.push(next);
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn generates_whole(&self, gen_idxs: &[usize]) -> bool {
        self.subgroup_closure(gen_idxs).len() == self.len()
    }

    /// Conjugacy classes as sorted index lists, ordered by smallest member.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut assigned = vec![false; self.len()];
        let mut classes = Vec::new();
        for i in 0..self.len() {
            if assigned[i] {
                continue;
            }
            let mut class = Vec::new();
            let mut frontier = vec![i];
            assigned[i] = true;
            while let Some(j) = frontier.pop() {
                class.push(j);
                for e in &self.elements {
                    let conj = self.elements[j].conjugate_by(e);
                    let k = self.index_of(&conj).expect("closed under conjugation");
                    if !assigned[k] {
                        assigned[k] = true;
                        frontier.push(k);
                    }
                }
            }
            class.sort_unstable();
            classes.push(class);
        }
        classes
    }
}

/// Enumerates all elements of `g` (capped at [`ORACLE_ELEMENT_CAP`]).
pub fn enumerate_group(g: &Group) -> Result<Enumerated, Error> {
    Enumerated::close(g.generators(), g.degree(), ORACLE_ELEMENT_CAP)
}

/// The smallest number of elements generating `g`, by exhaustive subset
/// sweep. The first element of each candidate ranges only over conjugacy
/// class representatives (valid because `d` is conjugation-invariant);
/// the identity is skipped everywhere.
///
/// Returns `0` for the trivial group. Errors with
/// [`Error::NotFoundWithin`] if no set of size ≤ `max_size` generates.
pub fn oracle_min_gen(g: &Group, max_size: usize) -> Result<usize, Error> {
    let enumerated = enumerate_group(g)?;
    let n = enumerated.len();
    if n == 1 {
        return Ok(0);
    }
    let id = enumerated.identity_index();
    let reps: Vec<usize> = enumerated
        .conjugacy_classes()
        .iter()
        .map(|c| c[0])
        .filter(|&i| i != id)
        .collect();
    let others: Vec<usize> = (0..n).filter(|&i| i != id).collect();
    for m in 1..=max_size {
        for &first in &reps {
            if m == 1 {
                if enumerated.generates_whole(&[first]) {
                    return Ok(1);
                }
                continue;
            }
            // all (m-1)-subsets of non-identity elements other than `first`,
            // in lexicographic index order
            let pool: Vec<usize> = others.iter().copied().filter(|&i| i != first).collect();
            let k = m - 1;
            if pool.len() < k {
                continue;
            }
            let mut choose: Vec<usize> = (0..k).collect();
            loop {
                let mut cand = Vec::with_capacity(m);
                cand.push(first);
                cand.extend(choose.iter().map(|&c| pool[c]));
                if enumerated.generates_whole(&cand) {
                    return Ok(m);
                }
                // advance the combination
                let mut i = k;
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    if choose[i] != i + pool.len() - k {
                        choose[i] += 1;
                        for j in i + 1..k {
                            choose[j] = choose[j - 1] + 1;
                        }
                        break;
                    }
                    if i == 0 {
                        choose.clear();
                        break;
                    }
                }
                if choose.is_empty() {
                    break;
                }
            }
        }
    }
    Err(Error::NotFoundWithin(max_size))
}

/// Checks that `series` is a chief series of `g` by brute force.
///
/// `series[k]` lists generators of the k-th subgroup, ascending; the first
/// entry must generate the trivial group and the last must generate `g`.
/// Verified: strict ascent, normality of every member in `g`, and per-factor
/// minimality — every element of `N_k` outside `N_{k-1}` must normally
/// generate `N_k` together with `N_{k-1}`.
pub fn verify_chief_series(g: &Group, series: &[Vec<Perm>]) -> Result<bool, Error> {
    let enumerated = enumerate_group(g)?;
    if series.is_empty() {
        return Ok(false);
    }
    // member element sets, as sorted index lists
    let mut members: Vec<Vec<usize>> = Vec::new();
    for gens in series {
        let mut idxs = Vec::new();
        for p in gens {
            match enumerated.index_of(p) {
                Some(i) => idxs.push(i),
                None => return Ok(false), // generator outside g
            }
        }
        members.push(enumerated.subgroup_closure(&idxs));
    }
    if members[0].len() != 1 || members.last().unwrap().len() != enumerated.len() {
        return Ok(false);
    }
    for w in members.windows(2) {
        let (small, big) = (&w[0], &w[1]);
        if small.len() >= big.len() || !small.iter().all(|i| big.binary_search(i).is_ok()) {
            return Ok(false);
        }
    }
    // Normality of every member in g. Conjugating by g's generators
    // suffices: if x^a stays in the member for every generator a, the same
    // holds for every product of generators.
    for member in &members {
        for &i in member.iter() {
            for c in g.generators() {
                let conj = enumerated.elements()[i].conjugate_by(c);
                let j = enumerated.index_of(&conj).unwrap();
                if member.binary_search(&j).is_err() {
                    return Ok(false);
                }
            }
        }
    }
    // Minimality of each factor: every element of the layer must normally
    // generate it over the member below. The closure is conjugation
    // invariant, so one representative per conjugacy class of g is enough,
    // and (below being normal) the normal closure of ⟨below, x⟩ is the
    // plain closure of below's generators together with the class of x.
    let classes = enumerated.conjugacy_classes();
    for (w, below_gens) in members.windows(2).zip(series.windows(2)) {
        let (below, above) = (&w[0], &w[1]);
        let below_gen_idxs: Vec<usize> = below_gens[0]
            .iter()
            .map(|p| enumerated.index_of(p).unwrap())
            .collect();
        for class in &classes {
            let x = class[0];
            if above.binary_search(&x).is_err() || below.binary_search(&x).is_ok() {
                continue;
            }
            let mut gen_idxs = below_gen_idxs.clone();
            gen_idxs.extend(class.iter().copied());
            let closure = enumerated.subgroup_closure(&gen_idxs);
            if closure.len() != above.len() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Exact fraction of ordered pairs `(a, b)` of elements with `⟨a, b⟩ = g`,
/// as a reduced fraction. Scales by conjugacy class size so only class
/// representatives are swept in the first coordinate.
pub fn generating_pair_density(g: &Group) -> Result<(u64, u64), Error> {
    let enumerated = enumerate_group(g)?;
    let n = enumerated.len();
    if n > ORACLE_PAIR_CAP {
        return Err(Error::CapExceeded(format!(
            "pair density limited to order ≤ {ORACLE_PAIR_CAP}, group has {n}"
        )));
    }
    let mut hits: u64 = 0;
    for class in enumerated.conjugacy_classes() {
        let rep = class[0];
        let mut rep_hits: u64 = 0;
        for b in 0..n {
            if enumerated.generates_whole(&[rep, b]) {
                rep_hits += 1;
            }
        }
        hits += rep_hits * class.len() as u64;
    }
    let total = (n * n) as u64;
    let d = hits.gcd(&total);
    Ok((hits / d, total / d))
}

/// `a/b ≥ c/d` for non-negative fractions with non-zero denominators.
pub fn fraction_at_least(lhs: (u64, u64), rhs: (u64, u64)) -> bool {
    (lhs.0 as u128) * (rhs.1 as u128) >= (rhs.0 as u128) * (lhs.1 as u128)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::build;
    use crate::perm::parse_cycles;

    #[test]
    fn min_gen_on_small_groups() {
        assert_eq!(oracle_min_gen(&build("cyclic(6)").unwrap(), 3).unwrap(), 1);
        assert_eq!(
            oracle_min_gen(&build("direct_power(cyclic(2), 3)").unwrap(), 4).unwrap(),
            3
        );
        assert_eq!(oracle_min_gen(&build("sym(3)").unwrap(), 3).unwrap(), 2);
        assert_eq!(oracle_min_gen(&Group::trivial(3), 3).unwrap(), 0);
        assert_eq!(oracle_min_gen(&build("q8").unwrap(), 3).unwrap(), 2);
        assert_eq!(oracle_min_gen(&build("alt(4)").unwrap(), 3).unwrap(), 2);
        assert_eq!(
            oracle_min_gen(&build("crown_inversion(3, 2)").unwrap(), 4).unwrap(),
            3
        );
        assert!(matches!(
            oracle_min_gen(&build("direct_power(cyclic(2), 3)").unwrap(), 2),
            Err(Error::NotFoundWithin(2))
        ));
    }

    #[test]
    fn enumeration_is_lexicographic_and_capped() {
        let s3 = build("sym(3)").unwrap();
        let e = enumerate_group(&s3).unwrap();
        assert_eq!(e.len(), 6);
        for w in e.elements().windows(2) {
            assert!(w[0].images() < w[1].images());
        }
        assert!(matches!(
            enumerate_group(&build("sym(8)").unwrap()),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn chief_series_verification_on_sym4() {
        let s4 = build("sym(4)").unwrap();
        let gens = |specs: &[&str]| -> Vec<Perm> {
            specs
                .iter()
                .map(|s| parse_cycles(s, 4).unwrap())
                .collect()
        };
        let good = vec![
            vec![],
            gens(&["(1 2)(3 4)", "(1 3)(2 4)"]),
            gens(&["(1 2 3)", "(1 2)(3 4)", "(1 3)(2 4)"]),
            s4.generators().to_vec(),
        ];
        assert!(verify_chief_series(&s4, &good).unwrap());

        // skipping the Klein four group: A4 is not minimal normal in S4
        let skipping = vec![vec![], gens(&["(1 2 3)", "(1 2)(3 4)"]), s4.generators().to_vec()];
        assert!(!verify_chief_series(&s4, &skipping).unwrap());

        // a simple group needs only 1 < G
        let a5 = build("alt(5)").unwrap();
        assert!(verify_chief_series(&a5, &[vec![], a5.generators().to_vec()]).unwrap());

        // non-normal member rejected
        let s3 = build("sym(3)").unwrap();
        let bad = vec![
            vec![],
            vec![parse_cycles("(1 2)", 3).unwrap()],
            s3.generators().to_vec(),
        ];
        assert!(!verify_chief_series(&s3, &bad).unwrap());
    }

    #[test]
    fn pair_densities() {
        assert_eq!(
            generating_pair_density(&build("cyclic(2)").unwrap()).unwrap(),
            (3, 4)
        );
        let a5 = generating_pair_density(&build("alt(5)").unwrap()).unwrap();
        assert_eq!(a5, (19, 30));
        assert!(fraction_at_least(a5, (53, 90)));
        assert!(matches!(
            generating_pair_density(&build("sym(6)").unwrap()),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn psl_3_2_pair_density_meets_simple_group_bound() {
        let d = generating_pair_density(&build("psl_3_2").unwrap()).unwrap();
        assert!(fraction_at_least(d, (53, 90)), "density {d:?}");
    }

    #[test]
    fn quotient_monotonicity_spot_checks() {
        // d(G) ≥ d(G/N): check on direct products where the quotient is a factor
        let d_prod = oracle_min_gen(&build("direct_product(q8, cyclic(3))").unwrap(), 4).unwrap();
        let d_q8 = oracle_min_gen(&build("q8").unwrap(), 4).unwrap();
        assert!(d_prod >= d_q8);
        let d_crown = oracle_min_gen(&build("crown_inversion(3, 3)").unwrap(), 5).unwrap();
        let d_sub = oracle_min_gen(&build("crown_inversion(3, 2)").unwrap(), 5).unwrap();
        assert_eq!(d_crown, 4);
        assert!(d_crown >= d_sub);
    }
}
