//! A permutation group: generators plus a lazily built certified chain.

use crate::bsgs::{build_chain_ss, StabilizerChain};
use crate::perm::Perm;
use crate::Error;
use num_bigint::BigUint;
use rand::Rng;
use std::sync::OnceLock;

/// A finite permutation group given by generators.
///
/// The stabilizer chain (and hence the order) is computed on first use and
/// cached; all cached data is certified-exact.
pub struct Group {
    degree: usize,
    gens: Vec<Perm>,
    chain: OnceLock<StabilizerChain>,
    order: OnceLock<BigUint>,
}

impl Group {
    /// A group from generators acting on `0..degree`.
    pub fn new(degree: usize, gens: Vec<Perm>) -> Result<Self, Error> {
        for g in &gens {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch(g.degree(), degree));
            }
        }
        Ok(Group {
            degree,
            gens,
            chain: OnceLock::new(),
            order: OnceLock::new(),
        })
    }

    /// The trivial group on `degree` points.
    pub fn trivial(degree: usize) -> Self {
        Group::new(degree, Vec::new()).unwrap()
    }

    /// A group whose order is already known exactly (e.g. read off a sliced
    /// chain); the chain itself is still built lazily on first use.
    pub(crate) fn with_known_order(degree: usize, gens: Vec<Perm>, order: BigUint) -> Self {
        let g = Group::new(degree, gens).expect("degree-checked by caller");
        let _ = g.order.set(order);
        g
    }

    /// Wraps an already-built certified chain (avoids recomputation).
    pub fn from_chain(gens: Vec<Perm>, chain: StabilizerChain) -> Self {
        assert!(chain.is_certified());
        let g = Group {
            degree: chain.degree(),
            gens,
            chain: OnceLock::new(),
            order: OnceLock::new(),
        };
        let _ = g.chain.set(chain);
        g
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    /// The certified stabilizer chain (built on first call).
    pub fn chain(&self) -> &StabilizerChain {
        self.chain
            .get_or_init(|| build_chain_ss(&self.gens, self.degree))
    }

    pub fn order(&self) -> &BigUint {
        self.order.get_or_init(|| self.chain().order())
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.chain().order_u64()
    }

    pub fn is_trivial(&self) -> bool {
        self.gens.iter().all(|g| g.is_identity())
    }

    pub fn contains(&self, g: &Perm) -> Result<bool, Error> {
        self.chain().contains(g)
    }

    /// Exactly uniform random element.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Perm {
        self.chain().random_element(rng)
    }

    /// True iff all generators commute pairwise.
    pub fn is_abelian(&self) -> bool {
        for (i, a) in self.gens.iter().enumerate() {
            for b in &self.gens[i + 1..] {
                if a.compose(b) != b.compose(a) {
                    return false;
                }
            }
        }
        true
    }
}

impl Clone for Group {
    fn clone(&self) -> Self {
        let g = Group {
            degree: self.degree,
            gens: self.gens.clone(),
            chain: OnceLock::new(),
            order: OnceLock::new(),
        };
        if let Some(c) = self.chain.get() {
            let _ = g.chain.set(c.clone());
        }
        if let Some(o) = self.order.get() {
            let _ = g.order.set(o.clone());
        }
        g
    }
}

impl std::fmt::Debug for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Group")
            .field("degree", &self.degree)
            .field("gens", &self.gens.len())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::parse_cycles;

    #[test]
    fn basic_group_queries() {
        let s3 = Group::new(
            3,
            vec![
                parse_cycles("(1 2 3)", 3).unwrap(),
                parse_cycles("(1 2)", 3).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(s3.order_u64(), Some(6));
        assert!(!s3.is_abelian());
        assert!(s3.contains(&parse_cycles("(1 3)", 3).unwrap()).unwrap());

        let c6 = Group::new(6, vec![parse_cycles("(1 2 3 4 5 6)", 6).unwrap()]).unwrap();
        assert!(c6.is_abelian());
        assert_eq!(c6.order_u64(), Some(6));

        assert!(Group::trivial(4).is_trivial());
        assert_eq!(Group::trivial(4).order_u64(), Some(1));

        assert!(matches!(
            Group::new(3, vec![parse_cycles("(1 2)", 2).unwrap()]),
            Err(Error::DegreeMismatch(2, 3))
        ));
    }
}
