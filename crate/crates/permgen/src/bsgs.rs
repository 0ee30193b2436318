//! Stabilizer chains (base and strong generating set).
//!
//! A [`StabilizerChain`] stores a base `β_0, β_1, …` and, per base point, the
//! orbit of `β_i` under the generators fixing `β_0..β_{i-1}`, encoded as a
//! Schreier vector (predecessor point + generator id per orbit point).
//! Transversal elements are rebuilt by walking the tree. The chain yields the
//! exact group order (product of orbit sizes), membership testing by sifting,
//! and exactly uniform random elements.
//!
//! Two constructions are provided:
//! * deterministic ([`build_chain_ss`]): every Schreier generator is verified
//!   to sift to the identity, so the chain is certified exact;
//! * Monte Carlo ([`build_chain_rss`]): random subproducts of the generators
//!   are sifted until `⌈log2(1/ε)⌉ + 16` consecutive ones sift cleanly. The
//!   reported order never exceeds the true order; it may fall short with
//!   probability at most ε.
//!
//! Orbits are extended append-only: transversal entries, once written, are
//! never rewritten. Combined with per-level watermarks over the (orbit point ×
//! generator) pair rectangle, this lets a completed chain be cloned and
//! extended with new generators while re-verifying only the genuinely new
//! Schreier pairs — the backbone of fast "generates modulo N" tests.

use crate::perm::Perm;
use crate::Error;
use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;
use serde::{Deserialize, Serialize};

const ABSENT: u32 = u32::MAX;

#[derive(Clone)]
struct Level {
    beta: u32,
    /// Ids (into the pool) of strong generators fixing `β_0..β_{i-1}`.
    gen_ids: Vec<usize>,
    /// Orbit of `beta` in discovery order; `orbit[0] == beta`.
    orbit: Vec<u32>,
    /// Per point: position in `orbit`, or `ABSENT`.
    pos: Vec<u32>,
    /// Per orbit point: predecessor in the Schreier tree (`beta` for itself).
    prev: Vec<u32>,
    /// Per orbit point: pool id of the generator that discovered it (`ABSENT` at `beta`).
    via: Vec<u32>,
    /// Watermarks: Schreier pairs `(o, g)` with `o < pairs_orbit_done` and
    /// `g < pairs_gens_done` have been verified.
    pairs_orbit_done: usize,
    pairs_gens_done: usize,
}

impl Level {
    fn new(degree: usize, beta: u32) -> Self {
        let mut pos = vec![ABSENT; degree];
        pos[beta as usize] = 0;
        Level {
            beta,
            gen_ids: Vec::new(),
            orbit: vec![beta],
            pos,
            prev: vec![ABSENT; degree],
            via: vec![ABSENT; degree],
            pairs_orbit_done: 0,
            pairs_gens_done: 0,
        }
    }
}

/// A base and strong generating set for a permutation group.
#[derive(Clone)]
pub struct StabilizerChain {
    degree: usize,
    certified: bool,
    /// When non-empty, new base points are chosen in this order (it must
    /// cover all points); otherwise the smallest moved point is used.
    levels: Vec<Level>,
    eager_base: bool,
    gens: Vec<Perm>,
    gen_invs: Vec<Perm>,
    gen_max_level: Vec<usize>,
}

impl StabilizerChain {
    /// Empty chain (trivial group); base points are chosen greedily as the
    /// smallest moved point when generators are inserted.
    pub fn new(degree: usize) -> Self {
        StabilizerChain {
            degree,
            certified: true,
            levels: Vec::new(),
            eager_base: false,
            gens: Vec::new(),
            gen_invs: Vec::new(),
            gen_max_level: Vec::new(),
        }
    }

    /// Empty chain whose base is prescribed as `base` (a permutation of all
    /// points, laid out eagerly). The group fixing `base[0..k]` pointwise is
    /// then exactly the subgroup at level `k`, which makes pointwise
    /// stabilizers of prefixes available as chain slices.
    pub fn with_full_base(degree: usize, base: &[u32]) -> Self {
        assert_eq!(base.len(), degree, "full base must cover every point");
        let mut chain = StabilizerChain::new(degree);
        chain.eager_base = true;
        for &b in base {
            chain.levels.push(Level::new(degree, b));
        }
        chain
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// Base points, including levels with singleton orbits.
    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.beta).collect()
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn orbit_size(&self, level: usize) -> usize {
        self.levels[level].orbit.len()
    }

    /// Points in the orbit of the level's base point, in discovery order.
    pub fn orbit_points(&self, level: usize) -> impl Iterator<Item = u32> + '_ {
        self.levels[level].orbit.iter().copied()
    }

    /// The strong generator pool (generators of the whole group first).
    pub fn strong_generators(&self) -> &[Perm] {
        &self.gens
    }

    /// Generators listed at `level`, i.e. strong generators of the point
    /// stabilizer at that level.
    pub fn level_generators(&self, level: usize) -> impl Iterator<Item = &Perm> {
        self.levels[level].gen_ids.iter().map(|&id| &self.gens[id])
    }

    /// Exact order of the group spanned by the chain (for a certified chain,
    /// the order of the generated group).
    pub fn order(&self) -> BigUint {
        let mut ord = BigUint::one();
        for l in &self.levels {
            ord *= BigUint::from(l.orbit.len());
        }
        ord
    }

    /// Order of the subgroup spanned by levels `from_level..` (the pointwise
    /// stabilizer of the first `from_level` base points).
    pub fn suffix_order(&self, from_level: usize) -> BigUint {
        let mut ord = BigUint::one();
        for l in &self.levels[from_level..] {
            ord *= BigUint::from(l.orbit.len());
        }
        ord
    }

    /// `order()` as `u64` when it fits.
    pub fn order_u64(&self) -> Option<u64> {
        let mut ord: u64 = 1;
        for l in &self.levels {
            ord = ord.checked_mul(l.orbit.len() as u64)?;
        }
        Some(ord)
    }

    fn transversal_into(&self, level: usize, point: u32, acc: Perm) -> Perm {
        // Returns u_p · acc where u_p maps beta to point.
        let lv = &self.levels[level];
        let mut ids: Vec<u32> = Vec::new();
        let mut q = point;
        while q != lv.beta {
            ids.push(lv.via[q as usize]);
            q = lv.prev[q as usize];
        }
        let mut out = acc;
        for &gid in ids.iter() {
            // walking from `point` upward yields the path in reverse, so the
            // generator reached last is applied first
            out = self.gens[gid as usize].compose(&out);
        }
        out
    }

    /// The transversal element mapping `β_level` to `point` (which must lie in
    /// the orbit at that level).
    pub fn transversal_element(&self, level: usize, point: u32) -> Perm {
        assert_ne!(self.levels[level].pos[point as usize], ABSENT, "point not in orbit");
        self.transversal_into(level, point, Perm::identity(self.degree))
    }

    /// Sifts `g` starting at `from_level`. Returns the residue and the level
    /// at which sifting stopped (`levels.len()` if every level was passed).
    fn sift_from(&self, from_level: usize, g: &Perm) -> (Perm, usize) {
        let mut cur = g.clone();
        for i in from_level..self.levels.len() {
            let lv = &self.levels[i];
            let p = cur.apply(lv.beta);
            if p == lv.beta {
                continue;
            }
            if lv.pos[p as usize] == ABSENT {
                return (cur, i);
            }
            // cur ← cur · u_p⁻¹, walking the Schreier tree from p to beta
            let mut q = p;
            while q != lv.beta {
                let gid = lv.via[q as usize];
                cur = cur.compose(&self.gen_invs[gid as usize]);
                q = lv.prev[q as usize];
            }
        }
        (cur, self.levels.len())
    }

    /// True iff `g` sifts to the identity. On a certified chain this is exact
    /// membership; on an uncertified chain `true` still proves membership,
    /// while `false` is unreliable (one-sided, like the Monte Carlo order).
    pub fn sifts_to_identity(&self, g: &Perm) -> bool {
        debug_assert_eq!(g.degree(), self.degree);
        let (residue, stuck) = self.sift_from(0, g);
        stuck == self.levels.len() && residue.is_identity()
    }

    /// One-sided membership alias for uncertified chains.
    pub fn may_contain(&self, g: &Perm) -> bool {
        self.sifts_to_identity(g)
    }

    /// Exact membership; requires a certified chain.
    pub fn contains(&self, g: &Perm) -> Result<bool, Error> {
        if g.degree() != self.degree {
            return Err(Error::DegreeMismatch(g.degree(), self.degree));
        }
        assert!(self.certified, "membership requires a certified chain");
        Ok(self.sifts_to_identity(g))
    }

    /// An exactly uniform random element, drawn as a product of one uniform
    /// transversal element per level (at most one integer draw per level).
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Perm {
        let mut out = Perm::identity(self.degree);
        // Ascending levels with prepending accumulation yields
        // u[last]·…·u[1]·u[0]; with uniform orbit draws at every level this
        // is a uniform element of the group the chain describes.
        for i in 0..self.levels.len() {
            let len = self.levels[i].orbit.len();
            if len <= 1 {
                continue;
            }
            let p = self.levels[i].orbit[rng.gen_range(0..len)];
            out = self.transversal_into(i, p, out);
        }
        out
    }

    fn push_pool_gen(&mut self, g: Perm, max_level: usize) -> usize {
        let id = self.gens.len();
        self.gen_invs.push(g.inverse());
        self.gens.push(g);
        self.gen_max_level.push(max_level);
        id
    }

    /// Lists pool generator `id` at `level` and extends the orbit (append-only).
    fn list_gen_at_level(&mut self, level: usize, id: usize) {
        self.levels[level].gen_ids.push(id);
        // Phase 1: apply the new generator to the existing orbit.
        let pre_len = self.levels[level].orbit.len();
        for idx in 0..pre_len {
            let q = self.levels[level].orbit[idx];
            let t = self.gens[id].apply(q);
            if self.levels[level].pos[t as usize] == ABSENT {
                let lv = &mut self.levels[level];
                lv.pos[t as usize] = lv.orbit.len() as u32;
                lv.orbit.push(t);
                lv.prev[t as usize] = q;
                lv.via[t as usize] = id as u32;
            }
        }
        // Phase 2: close newly discovered points under all listed generators.
        let mut i = pre_len;
        while i < self.levels[level].orbit.len() {
            let q = self.levels[level].orbit[i];
            for gi in 0..self.levels[level].gen_ids.len() {
                let gid = self.levels[level].gen_ids[gi];
                let t = self.gens[gid].apply(q);
                if self.levels[level].pos[t as usize] == ABSENT {
                    let lv = &mut self.levels[level];
                    lv.pos[t as usize] = lv.orbit.len() as u32;
                    lv.orbit.push(t);
                    lv.prev[t as usize] = q;
                    lv.via[t as usize] = gid as u32;
                }
            }
            i += 1;
        }
    }

    /// Sifts `g` and, if a nonidentity residue remains, installs it as a new
    /// strong generator at levels `min_level..=stuck`. Returns whether the
    /// chain changed. The chain loses its certificate until re-completed.
    fn insert_generator_at(&mut self, g: &Perm, min_level: usize) -> bool {
        let (residue, mut stuck) = self.sift_from(min_level, g);
        if stuck == self.levels.len() {
            if residue.is_identity() {
                return false;
            }
            if self.eager_base {
                unreachable!("full-base chain: nonidentity residue must move some base point");
            }
            let beta = residue
                .first_moved_point()
                .expect("nonidentity residue moves a point");
            self.levels.push(Level::new(self.degree, beta));
            stuck = self.levels.len() - 1;
        }
        self.certified = false;
        let id = self.push_pool_gen(residue, stuck);
        for level in min_level..=stuck {
            self.list_gen_at_level(level, id);
        }
        true
    }

    /// Inserts a generator (sift first; no-op if already spanned). Call
    /// [`complete`](Self::complete) afterwards to re-certify.
    pub fn insert_generator(&mut self, g: &Perm) -> bool {
        assert_eq!(g.degree(), self.degree, "degree mismatch");
        self.insert_generator_at(g, 0)
    }

    /// Verifies all unprocessed Schreier pairs, inserting residues until the
    /// chain is complete, then marks it certified. Work already verified
    /// (watermarked) is never redone, so completing a cloned-and-extended
    /// chain costs only the new pairs.
    pub fn complete(&mut self) {
        loop {
            let mut inserted = false;
            for i in (0..self.levels.len()).rev() {
                inserted |= self.process_new_pairs(i);
            }
            if !inserted {
                break;
            }
        }
        self.certified = true;
    }

    fn process_new_pairs(&mut self, i: usize) -> bool {
        let mut changed = false;
        let o_len = self.levels[i].orbit.len();
        let g_len = self.levels[i].gen_ids.len();
        let o_done = self.levels[i].pairs_orbit_done;
        let g_done = self.levels[i].pairs_gens_done;
        if o_done == o_len && g_done == g_len {
            return false;
        }
        for oi in 0..o_len {
            for gi in 0..g_len {
                if oi < o_done && gi < g_done {
                    continue;
                }
                let p = self.levels[i].orbit[oi];
                let gid = self.levels[i].gen_ids[gi];
                // A generator also listed one level deeper contributes the
                // trivial Schreier pair at its own base point.
                if p == self.levels[i].beta && self.gen_max_level[gid] > i {
                    continue;
                }
                // Schreier generator u_p · h · u_{p^h}⁻¹, sifted below level i.
                let s0 = self.transversal_into(i, p, Perm::identity(self.degree));
                let mut s = s0.compose(&self.gens[gid]);
                let q = self.gens[gid].apply(p);
                let lv = &self.levels[i];
                let mut walk = q;
                while walk != lv.beta {
                    let wid = lv.via[walk as usize];
                    s = s.compose(&self.gen_invs[wid as usize]);
                    walk = lv.prev[walk as usize];
                }
                debug_assert_eq!(s.apply(self.levels[i].beta), self.levels[i].beta);
                if self.insert_schreier_residue(i + 1, &s) {
                    changed = true;
                }
            }
        }
        // Deeper insertions never touch this level's orbit or generator list,
        // so the pre-loop lengths are still current.
        debug_assert_eq!(self.levels[i].orbit.len(), o_len);
        debug_assert_eq!(self.levels[i].gen_ids.len(), g_len);
        self.levels[i].pairs_orbit_done = o_len;
        self.levels[i].pairs_gens_done = g_len;
        changed
    }

    fn insert_schreier_residue(&mut self, min_level: usize, s: &Perm) -> bool {
        if min_level >= self.levels.len() {
            if s.is_identity() {
                return false;
            }
            if self.eager_base {
                unreachable!("full-base chain: residue below the last level");
            }
            let beta = s.first_moved_point().expect("nonidentity");
            self.levels.push(Level::new(self.degree, beta));
        }
        self.insert_generator_at(s, min_level)
    }

    /// Inserts generators and re-completes; the chain stays certified.
    pub fn extend_and_complete(&mut self, extra: &[Perm]) {
        for g in extra {
            self.insert_generator(g);
        }
        self.complete();
    }

    /// Monte Carlo extension: inserts `extra`, then sifts random subproducts
    /// of (`extra` ∪ a sample of the pool) until `⌈log2(1/ε)⌉ + 16`
    /// consecutive ones sift cleanly. The resulting chain is uncertified; its
    /// order never exceeds the true order of the extended group.
    pub fn rss_extend<R: Rng + ?Sized>(&mut self, extra: &[Perm], epsilon: f64, rng: &mut R) {
        for g in extra {
            self.insert_generator_at(g, 0);
        }
        let mut slots: Vec<Perm> = extra
            .iter()
            .filter(|g| !g.is_identity())
            .cloned()
            .collect();
        // Mix in pool generators so subproducts range over the whole group.
        let pool_sample = 16.min(self.gens.len());
        if pool_sample > 0 {
            let step = self.gens.len().max(1) / pool_sample.max(1);
            for k in 0..pool_sample {
                slots.push(self.gens[(k * step.max(1)).min(self.gens.len() - 1)].clone());
            }
        }
        if slots.is_empty() {
            self.certified = self.levels.iter().all(|l| l.orbit.len() == 1) && self.gens.is_empty();
            if self.gens.is_empty() {
                return;
            }
            slots.push(self.gens[0].clone());
        }
        while slots.len() < 8 {
            let g = slots[slots.len() % slots.len().max(1)].clone();
            slots.push(g);
        }
        let target_clean = rss_clean_threshold(epsilon);
        let mut acc = Perm::identity(self.degree);
        let rattle = |slots: &mut Vec<Perm>, acc: &mut Perm, rng: &mut R| {
            let i = rng.gen_range(0..slots.len());
            let mut j = rng.gen_range(0..slots.len() - 1);
            if j >= i {
                j += 1;
            }
            let other = if rng.gen::<bool>() {
                slots[j].clone()
            } else {
                slots[j].inverse()
            };
            slots[i] = if rng.gen::<bool>() {
                slots[i].compose(&other)
            } else {
                other.compose(&slots[i])
            };
            *acc = acc.compose(&slots[i]);
            acc.clone()
        };
        for _ in 0..50 {
            rattle(&mut slots, &mut acc, rng);
        }
        let mut clean = 0usize;
        while clean < target_clean {
            let r = rattle(&mut slots, &mut acc, rng);
            if self.insert_generator_at(&r, 0) {
                clean = 0;
            } else {
                clean += 1;
            }
        }
        self.certified = false;
    }

    /// Clones the suffix of the chain from `from_level` on: the certified
    /// chain of the pointwise stabilizer of `base[0..from_level]`.
    pub fn clone_suffix(&self, from_level: usize) -> StabilizerChain {
        assert!(from_level <= self.levels.len());
        let mut id_map: Vec<Option<usize>> = vec![None; self.gens.len()];
        let mut gens = Vec::new();
        let mut gen_invs = Vec::new();
        let mut gen_max_level = Vec::new();
        for (old_id, &maxl) in self.gen_max_level.iter().enumerate() {
            if maxl >= from_level && self.levels[from_level..].iter().any(|l| l.gen_ids.contains(&old_id)) {
                id_map[old_id] = Some(gens.len());
                gens.push(self.gens[old_id].clone());
                gen_invs.push(self.gen_invs[old_id].clone());
                gen_max_level.push(maxl - from_level);
            }
        }
        let levels = self.levels[from_level..]
            .iter()
            .map(|lv| {
                let mut out = lv.clone();
                out.gen_ids = lv
                    .gen_ids
                    .iter()
                    .map(|&id| id_map[id].expect("listed gen survives the slice"))
                    .collect();
                for &p in &out.orbit {
                    if out.via[p as usize] != ABSENT {
                        out.via[p as usize] =
                            id_map[out.via[p as usize] as usize].expect("via gen survives") as u32;
                    }
                }
                out
            })
            .collect();
        StabilizerChain {
            degree: self.degree,
            certified: self.certified,
            levels,
            eager_base: self.eager_base,
            gens,
            gen_invs,
            gen_max_level,
        }
    }

    /// Number of levels whose base point lies in `0..prefix_len` given the
    /// prescribed full base; helper for prefix-stabilizer slicing.
    pub fn level_of_base_prefix(&self, prefix: &[u32]) -> usize {
        let set: std::collections::HashSet<u32> = prefix.iter().copied().collect();
        let mut count = 0;
        for lv in &self.levels {
            if set.contains(&lv.beta) {
                count += 1;
            } else {
                break;
            }
        }
        count
    }
}

/// Consecutive clean random sifts required for error bound `ε`.
pub(crate) fn rss_clean_threshold(epsilon: f64) -> usize {
    assert!(epsilon > 0.0 && epsilon < 1.0, "ε must be in (0,1)");
    (1.0 / epsilon).log2().ceil() as usize + 16
}

/// Deterministic Schreier–Sims: certified chain with the exact order.
pub fn build_chain_ss(gens: &[Perm], degree: usize) -> StabilizerChain {
    let mut chain = StabilizerChain::new(degree);
    for g in gens {
        chain.insert_generator(g);
    }
    chain.complete();
    chain
}

/// Monte Carlo Schreier–Sims. `Pr[order < true order] ≤ ε`; the reported
/// order never exceeds the true order.
pub fn build_chain_rss<R: Rng + ?Sized>(
    gens: &[Perm],
    degree: usize,
    epsilon: f64,
    rng: &mut R,
) -> StabilizerChain {
    let mut chain = StabilizerChain::new(degree);
    chain.rss_extend(gens, epsilon, rng);
    if gens.iter().all(|g| g.is_identity()) {
        chain.complete(); // trivial group: nothing to verify
    }
    chain
}

/// Which flavor of generating test to run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GenStrategy {
    /// Deterministic Schreier–Sims: exact answer.
    Deterministic,
    /// Monte Carlo: "generates" is always correct; "does not generate" may be
    /// wrong with probability at most `epsilon`.
    MonteCarlo { epsilon: f64 },
}

/// Counters for generating tests and random draws, with a per-factor trace.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct GenTestStats {
    pub ss_tests: u64,
    pub rss_tests: u64,
    pub random_elements: u64,
    pub per_factor: Vec<FactorTrace>,
}

/// One lifting decision: which chief factor, which branch, how many trials.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FactorTrace {
    /// 1-based chief-factor index (0 for whole-group events such as quick
    /// random attempts or early stops).
    pub factor: usize,
    pub branch: String,
    pub trials: u64,
}

impl GenTestStats {
    pub fn record(&mut self, factor: usize, branch: &str, trials: u64) {
        self.per_factor.push(FactorTrace {
            factor,
            branch: branch.to_string(),
            trials,
        });
    }
}

/// Tests `⟨candidates ∪ (group of modulus_chain)⟩ = target_order` by cloning
/// the modulus chain, inserting the candidates, and comparing orders.
///
/// All candidates must lie in the target group and the modulus group must be
/// a subgroup of it; then equality of orders is equivalent to generation
/// modulo the modulus. With [`GenStrategy::Deterministic`] the answer is
/// exact; with [`GenStrategy::MonteCarlo`] a "true" answer is always correct.
pub fn generates_mod<R: Rng + ?Sized>(
    candidates: &[Perm],
    modulus_chain: &StabilizerChain,
    target_order: &BigUint,
    strategy: GenStrategy,
    stats: &mut GenTestStats,
    rng: &mut R,
) -> bool {
    let mut chain = modulus_chain.clone();
    match strategy {
        GenStrategy::Deterministic => {
            stats.ss_tests += 1;
            debug_assert!(chain.is_certified());
            chain.extend_and_complete(candidates);
        }
        GenStrategy::MonteCarlo { epsilon } => {
            stats.rss_tests += 1;
            chain.rss_extend(candidates, epsilon, rng);
        }
    }
    chain.order() == *target_order
}

/// Tests `⟨candidates⟩ = G` for a group `G` with a certified chain.
///
/// Candidates outside `G` are rejected cheaply by sifting before any chain is
/// built.
pub fn generates<R: Rng + ?Sized>(
    candidates: &[Perm],
    target: &crate::group::Group,
    strategy: GenStrategy,
    stats: &mut GenTestStats,
    rng: &mut R,
) -> Result<bool, Error> {
    for c in candidates {
        if c.degree() != target.degree() {
            return Err(Error::DegreeMismatch(c.degree(), target.degree()));
        }
    }
    let target_chain = target.chain();
    if !candidates.iter().all(|c| target_chain.sifts_to_identity(c)) {
        match strategy {
            GenStrategy::Deterministic => stats.ss_tests += 1,
            GenStrategy::MonteCarlo { .. } => stats.rss_tests += 1,
        }
        return Ok(false);
    }
    let trivial = StabilizerChain::new(target.degree());
    Ok(generates_mod(
        candidates,
        &trivial,
        target.order(),
        strategy,
        stats,
        rng,
    ))
}
