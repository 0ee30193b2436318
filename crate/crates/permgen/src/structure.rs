//! Chief series of permutation groups, plus the normal-subgroup toolbox
//! (normal closures, derived series, orbit/block kernel series) used to
//! build them.
//!
//! The pipeline behind [`chief_series`]:
//!
//! 1. seed a normal series from kernels of the actions on orbits and on
//!    minimal block systems, intersected progressively, together with the
//!    derived series;
//! 2. nest those subgroups greedily from the top, preferring (under
//!    [`SeriesOrdering::AbelianHigh`]) steps with abelian quotient so abelian
//!    factors end up near the top;
//! 3. refine every remaining layer to minimal normal factors: elementary
//!    abelian layers exactly, via irreducible-submodule spinning over F_p;
//!    other layers by normal-closure descent with an exhaustive per-coset
//!    certificate.
//!
//! Quotients are never materialized: "generates modulo N" is always decided
//! by adjoining N's generators and comparing big-integer orders, and factor
//! elements are coset representatives inside the parent group.

use crate::bsgs::StabilizerChain;
use crate::fp::{minimal_submodule, FpMatrix};
use crate::group::Group;
use crate::perm::Perm;
use crate::Error;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use std::collections::HashMap;

/// How the chief-series builder arranges factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesOrdering {
    /// Push abelian factors toward the top of the group (solvable orbit
    /// constituents are peeled first and abelian-quotient steps preferred).
    /// The default: lifting through abelian factors is cheaper.
    AbelianHigh,
    /// Keep subgroups in natural discovery order.
    AsFound,
}

/// Metadata for one chief factor `N_k / N_{k-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiefFactorInfo {
    /// `|N_k / N_{k-1}|`.
    pub order: BigUint,
    pub abelian: bool,
    /// For an abelian factor of order `p^l`: the prime.
    pub p: Option<u64>,
    /// For an abelian factor of order `p^l`: the rank.
    pub l: Option<u32>,
    /// Number of chief factors of `G/N_{k-1}` with the same order
    /// (counted among factors `k..=u`).
    pub delta_prime: usize,
    /// Least `m ≥ 2` with `|N|^(5m−8) ≥ δ′^5`, i.e. `⌈8/5 + log_|N| δ′⌉`.
    pub t_prime: usize,
}

/// An ascending chief series `1 = N_0 < N_1 < … < N_u = G` with per-factor
/// metadata.
#[derive(Clone, Debug)]
pub struct ChiefSeries {
    /// Ascending members, `subgroups[0]` trivial, last one the whole group.
    pub subgroups: Vec<Group>,
    /// `factors[k-1]` describes `N_k / N_{k-1}`; length `u`.
    pub factors: Vec<ChiefFactorInfo>,
}

impl ChiefSeries {
    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn whole_group(&self) -> &Group {
        self.subgroups.last().unwrap()
    }
}

/// Orbits of the group generated by `gens` on `0..degree`, each ascending,
/// ordered by smallest point.
pub fn orbits(gens: &[Perm], degree: usize) -> Vec<Vec<u32>> {
    let mut seen = vec![false; degree];
    let mut out = Vec::new();
    for start in 0..degree as u32 {
        if seen[start as usize] {
            continue;
        }
        seen[start as usize] = true;
        let mut orbit = vec![start];
        let mut head = 0;
        while head < orbit.len() {
            let p = orbit[head];
            head += 1;
            for g in gens {
                let q = g.apply(p);
                if !seen[q as usize] {
                    seen[q as usize] = true;
                    orbit.push(q);
                }
            }
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

/// Restriction of permutations to an invariant point set.
struct PointSet {
    points: Vec<u32>,
    pos: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl PointSet {
    fn new(points: &[u32], degree: usize) -> Self {
        let mut pos = vec![ABSENT; degree];
        for (i, &p) in points.iter().enumerate() {
            pos[p as usize] = i as u32;
        }
        PointSet {
            points: points.to_vec(),
            pos,
        }
    }

    fn restrict(&self, g: &Perm) -> Perm {
        let images = self
            .points
            .iter()
            .map(|&p| {
                let q = g.apply(p);
                debug_assert_ne!(self.pos[q as usize], ABSENT, "set not invariant");
                self.pos[q as usize]
            })
            .collect();
        Perm::from_images_unchecked(images)
    }
}

/// Finest block system (for a transitive action of `gens` on `0..m`) in
/// which points 0 and `b` share a block: labels per point, renumbered by
/// first occurrence.
fn blocks_joining(gens: &[Perm], m: usize, b: u32) -> Vec<u32> {
    // union-find with path compression
    let mut parent: Vec<u32> = (0..m as u32).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    let mut queue: Vec<(u32, u32)> = vec![(0, b)];
    parent[b as usize] = 0;
    while let Some((x, y)) = queue.pop() {
        for g in gens {
            let (gx, gy) = (g.apply(x), g.apply(y));
            let (rx, ry) = (find(&mut parent, gx), find(&mut parent, gy));
            if rx != ry {
                parent[ry as usize] = rx;
                queue.push((gx, gy));
            }
        }
    }
    let mut labels = vec![ABSENT; m];
    let mut next = 0;
    for x in 0..m as u32 {
        let r = find(&mut parent, x);
        if labels[r as usize] == ABSENT {
            labels[r as usize] = next;
            next += 1;
        }
        labels[x as usize] = labels[r as usize];
    }
    labels
}

fn num_blocks(labels: &[u32]) -> usize {
    (labels.iter().copied().max().unwrap_or(0) + 1) as usize
}

/// A minimal (finest non-trivial) block system of a transitive action on
/// `0..m`, or `None` if the action is primitive. Deterministic: among the
/// candidate systems the one with the smallest block size (smallest joining
/// point on ties) wins.
pub fn minimal_block_system(gens: &[Perm], m: usize) -> Option<Vec<u32>> {
    if m < 2 {
        return None;
    }
    let mut best: Option<(usize, Vec<u32>)> = None;
    for b in 1..m as u32 {
        let labels = blocks_joining(gens, m, b);
        let k = num_blocks(&labels);
        if k == 1 || k == m {
            continue;
        }
        let block_size = m / k;
        if best.as_ref().is_none_or(|(s, _)| block_size < *s) {
            best = Some((block_size, labels));
        }
    }
    best.map(|(_, labels)| labels)
}

/// Action induced on the blocks of `labels` (one new point per block).
fn block_action(gens: &[Perm], labels: &[u32]) -> Vec<Perm> {
    let k = num_blocks(labels);
    // representative point per block
    let mut rep = vec![0u32; k];
    for (p, &l) in labels.iter().enumerate().rev() {
        rep[l as usize] = p as u32;
    }
    gens.iter()
        .map(|g| {
            let images = (0..k)
                .map(|bl| labels[g.apply(rep[bl]) as usize])
                .collect();
            Perm::from_images_unchecked(images)
        })
        .collect()
}

fn is_solvable(g: &Group) -> bool {
    derived_series(g).last().unwrap().is_trivial()
}

/// Smallest normal subgroup of `g` containing `seeds`, with certified chain.
pub fn normal_closure(g: &Group, seeds: &[Perm]) -> Result<Group, Error> {
    let g_chain = g.chain();
    for s in seeds {
        if s.degree() != g.degree() {
            return Err(Error::DegreeMismatch(s.degree(), g.degree()));
        }
        if !g_chain.sifts_to_identity(s) {
            return Err(Error::SeedNotInGroup);
        }
    }
    let mut chain = StabilizerChain::new(g.degree());
    let mut gens: Vec<Perm> = Vec::new();
    let mut queue: Vec<Perm> = Vec::new();
    for s in seeds {
        if !chain.sifts_to_identity(s) {
            chain.extend_and_complete(std::slice::from_ref(s));
            gens.push(s.clone());
            queue.push(s.clone());
        }
    }
    while let Some(x) = queue.pop() {
        for a in g.generators() {
            let y = x.conjugate_by(a);
            if !chain.sifts_to_identity(&y) {
                chain.extend_and_complete(std::slice::from_ref(&y));
                gens.push(y.clone());
                queue.push(y);
            }
        }
    }
    Ok(Group::from_chain(gens, chain))
}

/// The derived subgroup `[G, G]`: normal closure of the generator
/// commutators.
pub fn derived_subgroup(g: &Group) -> Group {
    let gens = g.generators();
    let mut seeds = Vec::new();
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i + 1..] {
            let c = Perm::commutator(a, b);
            if !c.is_identity() {
                seeds.push(c);
            }
        }
    }
    normal_closure(g, &seeds).expect("commutators lie in the group")
}

/// Descending derived series `G ≥ G′ ≥ G″ ≥ …`, stopping when it stabilizes
/// (at the trivial group for solvable `G`, at a perfect subgroup otherwise).
pub fn derived_series(g: &Group) -> Vec<Group> {
    let mut out = vec![g.clone()];
    loop {
        let last = out.last().unwrap();
        let next = derived_subgroup(last);
        if next.order() == last.order() || next.is_trivial() {
            let push = next.is_trivial() && !last.is_trivial();
            if push {
                out.push(next);
            }
            return out;
        }
        out.push(next);
    }
}

/// One block-system tower entry: a partition of the orbit's points (labels
/// per orbit position) and its number of blocks.
struct TowerSystem {
    labels: Vec<u32>,
    blocks: usize,
}

/// Per-orbit plan: the orbit (original points, ascending) and its block
/// systems from finest to coarsest, all expressed on orbit positions.
struct OrbitPlan {
    points: Vec<u32>,
    systems: Vec<TowerSystem>,
}

fn orbit_plan(g: &Group, orbit: &[u32]) -> OrbitPlan {
    let set = PointSet::new(orbit, g.degree());
    let mut level_gens: Vec<Perm> = g.generators().iter().map(|x| set.restrict(x)).collect();
    let mut level_deg = orbit.len();
    // composed labels orbit-position → block id at the current tower level
    let mut compose: Vec<u32> = (0..orbit.len() as u32).collect();
    let mut systems = Vec::new();
    while let Some(labels) = minimal_block_system(&level_gens, level_deg) {
        let composed: Vec<u32> = compose.iter().map(|&c| labels[c as usize]).collect();
        let blocks = num_blocks(&labels);
        systems.push(TowerSystem {
            labels: composed.clone(),
            blocks,
        });
        level_gens = block_action(&level_gens, &labels);
        level_deg = blocks;
        compose = composed;
    }
    OrbitPlan {
        points: orbit.to_vec(),
        systems,
    }
}

/// Descending normal series from orbit and block kernels, intersected
/// progressively: `G ≥ … ≥ 1`. Solvable orbit constituents are peeled first
/// when `solvable_first` is set (the AbelianHigh arrangement).
fn kernel_series_ordered(g: &Group, solvable_first: bool) -> Vec<Group> {
    let n = g.degree();
    if g.is_trivial() {
        return vec![g.clone()];
    }
    let all_orbits = orbits(g.generators(), n);
    let mut moving: Vec<Vec<u32>> = Vec::new();
    let mut fixed: Vec<u32> = Vec::new();
    for o in all_orbits {
        if o.len() > 1 {
            moving.push(o);
        } else {
            fixed.push(o[0]);
        }
    }
    if solvable_first {
        let solvable: Vec<bool> = moving
            .iter()
            .map(|o| {
                let set = PointSet::new(o, n);
                let gens: Vec<Perm> = g.generators().iter().map(|x| set.restrict(x)).collect();
                is_solvable(&Group::new(o.len(), gens).unwrap())
            })
            .collect();
        let mut reordered: Vec<Vec<u32>> = Vec::new();
        for pass in [true, false] {
            for (i, o) in moving.iter().enumerate() {
                if solvable[i] == pass {
                    reordered.push(o.clone());
                }
            }
        }
        moving = reordered;
    }
    let plans: Vec<OrbitPlan> = moving.iter().map(|o| orbit_plan(g, o)).collect();

    // Auxiliary action: original points plus one column per block of every
    // system. Base order: per orbit (peel order) coarsest system's columns,
    // …, finest system's columns, then the orbit's points; pointwise
    // stabilizers of base prefixes are then exactly the kernel
    // intersections, read off the chain as level suffixes.
    let mut aux_degree = n;
    let mut col_offsets: Vec<Vec<usize>> = Vec::new(); // per plan, per system, aux offset
    for plan in &plans {
        let mut offs = Vec::new();
        for sys in &plan.systems {
            offs.push(aux_degree);
            aux_degree += sys.blocks;
        }
        col_offsets.push(offs);
    }
    let mut base: Vec<u32> = Vec::new();
    let mut boundaries: Vec<usize> = Vec::new();
    for (plan, offs) in plans.iter().zip(&col_offsets) {
        for si in (0..plan.systems.len()).rev() {
            base.extend((0..plan.systems[si].blocks).map(|b| (offs[si] + b) as u32));
            boundaries.push(base.len());
        }
        base.extend(plan.points.iter().copied());
        boundaries.push(base.len());
    }
    base.extend(fixed.iter().copied());
    assert_eq!(base.len(), aux_degree);

    // block representative per (plan, system, block) for computing the
    // induced action on columns
    let mut block_reps: Vec<Vec<Vec<u32>>> = Vec::new();
    for plan in &plans {
        let mut per_sys = Vec::new();
        for sys in &plan.systems {
            let mut rep = vec![0u32; sys.blocks];
            for (pos, &l) in sys.labels.iter().enumerate().rev() {
                rep[l as usize] = plan.points[pos];
            }
            per_sys.push(rep);
        }
        block_reps.push(per_sys);
    }
    let point_pos: Vec<PointSet> = plans.iter().map(|p| PointSet::new(&p.points, n)).collect();
    let extend = |x: &Perm| -> Perm {
        let mut images: Vec<u32> = vec![0; aux_degree];
        for p in 0..n {
            images[p] = x.apply(p as u32);
        }
        for (pi, plan) in plans.iter().enumerate() {
            for (si, sys) in plan.systems.iter().enumerate() {
                let off = col_offsets[pi][si];
                for b in 0..sys.blocks {
                    let target_point = x.apply(block_reps[pi][si][b]);
                    let target_block = sys.labels[point_pos[pi].pos[target_point as usize] as usize];
                    images[off + b] = (off + target_block as usize) as u32;
                }
            }
        }
        Perm::from_images_unchecked(images)
    };

    let mut chain = StabilizerChain::with_full_base(aux_degree, &base);
    for x in g.generators() {
        chain.insert_generator(&extend(x));
    }
    chain.complete();

    let mut out: Vec<Group> = vec![g.clone()];
    for &prefix in &boundaries {
        let order = chain.suffix_order(prefix);
        if order == *out.last().unwrap().order() {
            continue;
        }
        if order.is_one() {
            break;
        }
        let gens: Vec<Perm> = chain
            .level_generators(prefix)
            .map(|p| Perm::from_images_unchecked(p.images()[..n].to_vec()))
            .collect();
        out.push(Group::with_known_order(n, gens, order));
    }
    if !out.last().unwrap().is_trivial() {
        out.push(Group::trivial(n));
    }
    out
}

/// Descending normal series from orbit and block-system kernels.
pub fn kernel_series(g: &Group) -> Vec<Group> {
    kernel_series_ordered(g, false)
}

/// True iff `member`'s generators lie in `g` and their conjugates by `g`'s
/// generators stay inside `member`.
pub fn is_normal_subgroup(g: &Group, member: &Group) -> bool {
    let mc = member.chain();
    member
        .generators()
        .iter()
        .all(|x| g.chain().sifts_to_identity(x))
        && member.generators().iter().all(|x| {
            g.generators()
                .iter()
                .all(|a| mc.sifts_to_identity(&x.conjugate_by(a)))
        })
}

fn subgroup_of(member: &Group, cur: &Group) -> bool {
    member.order() < cur.order()
        && member
            .generators()
            .iter()
            .all(|x| cur.chain().sifts_to_identity(x))
}

fn groups_equal(a: &Group, b: &Group) -> bool {
    a.order() == b.order()
        && a.generators()
            .iter()
            .all(|x| b.chain().sifts_to_identity(x))
}

fn pool_insert(pool: &mut Vec<Group>, candidate: Group) {
    if !pool.iter().any(|m| groups_equal(m, &candidate)) {
        pool.push(candidate);
    }
}

/// `upper/lower` is abelian ⟺ commutators of `upper`'s generators lie in
/// `lower`.
fn layer_is_abelian(upper: &Group, lower: &Group) -> bool {
    let lc = lower.chain();
    let gens = upper.generators();
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i + 1..] {
            if !lc.sifts_to_identity(&Perm::commutator(a, b)) {
                return false;
            }
        }
    }
    true
}

/// Writes `m` as `p^l` (all primes dividing a permutation-group order are at
/// most the degree, so trial division always succeeds here).
pub(crate) fn factor_prime_power(m: &BigUint) -> Option<(u64, u32)> {
    if m <= &BigUint::one() {
        return None;
    }
    let mut p = 2u64;
    loop {
        let bp = BigUint::from(p);
        if (m % &bp).is_zero() {
            let mut rest = m.clone();
            let mut l = 0u32;
            while (&rest % &bp).is_zero() {
                rest /= &bp;
                l += 1;
            }
            return if rest.is_one() { Some((p, l)) } else { None };
        }
        if &bp * &bp > *m {
            // m itself is prime
            return Some((m.to_u64()?, 1));
        }
        p = if p == 2 { 3 } else { p + 2 };
        if p > 10_000_000 {
            return None;
        }
    }
}

pub(crate) fn small_prime_factors(m: &BigUint) -> Option<Vec<(u64, u32)>> {
    let mut rest = m.clone();
    let mut out = Vec::new();
    let mut p = 2u64;
    while rest > BigUint::one() {
        let bp = BigUint::from(p);
        if (&rest % &bp).is_zero() {
            let mut l = 0u32;
            while (&rest % &bp).is_zero() {
                rest /= &bp;
                l += 1;
            }
            out.push((p, l));
        } else if &bp * &bp > rest {
            out.push((rest.to_u64()?, 1));
            break;
        }
        p = if p == 2 { 3 } else { p + 2 };
        if p > 10_000_000 {
            return None;
        }
    }
    Some(out)
}

/// The canonical representative of the coset `H·m`, where `H` is the group
/// of `sub`: the element of the coset whose base-image tuple under `sub`'s
/// chain is lexicographically smallest. Equal cosets yield equal
/// representatives.
pub fn canonical_coset_rep(sub: &StabilizerChain, m: &Perm) -> Perm {
    let mut r = m.clone();
    for level in 0..sub.num_levels() {
        if sub.orbit_size(level) <= 1 {
            continue;
        }
        let q = sub
            .orbit_points(level)
            .min_by_key(|&q| r.apply(q))
            .expect("non-empty orbit");
        r = sub.transversal_element(level, q).compose(&r);
    }
    r
}

/// Canonical representatives of the cosets of `sub` inside `⟨super_gens⟩`
/// (which must contain the group of `sub`), in a deterministic BFS order
/// starting from the subgroup's own coset. Errors if more than `cap` cosets
/// appear.
pub fn coset_representatives(
    sub: &StabilizerChain,
    super_gens: &[Perm],
    cap: usize,
) -> Result<Vec<Perm>, Error> {
    let first = canonical_coset_rep(sub, &Perm::identity(sub.degree()));
    let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
    index.insert(first.images().to_vec(), 0);
    let mut reps = vec![first];
    let mut head = 0;
    while head < reps.len() {
        let cur = reps[head].clone();
        head += 1;
        for g in super_gens {
            let c = canonical_coset_rep(sub, &cur.compose(g));
            if !index.contains_key(c.images()) {
                if reps.len() >= cap {
                    return Err(Error::CapExceeded(format!(
                        "more than {cap} cosets in the layer"
                    )));
                }
                index.insert(c.images().to_vec(), reps.len());
                reps.push(c);
            }
        }
    }
    Ok(reps)
}

/// `⟨low ∪ (conjugacy closure of seed under g)⟩`, built by extending `low`'s
/// chain: the smallest subgroup normal in `g` containing `low` and `seed`,
/// provided `low` itself is normal in `g`.
pub(crate) fn closure_above(g: &Group, low: &Group, seed: &Perm) -> Group {
    let mut chain = low.chain().clone();
    let mut gens: Vec<Perm> = low.generators().to_vec();
    let mut queue = Vec::new();
    if !chain.sifts_to_identity(seed) {
        chain.extend_and_complete(std::slice::from_ref(seed));
        gens.push(seed.clone());
        queue.push(seed.clone());
    }
    while let Some(x) = queue.pop() {
        for a in g.generators() {
            let y = x.conjugate_by(a);
            if !chain.sifts_to_identity(&y) {
                chain.extend_and_complete(std::slice::from_ref(&y));
                gens.push(y.clone());
                queue.push(y);
            }
        }
    }
    Group::from_chain(gens, chain)
}

const LAYER_SWEEP_CAP: usize = 10_000;
const LINE_SWEEP_CAP: u64 = 10_000;

/// A minimal subgroup strictly above `low` that is normal in `g`, found by
/// normal-closure descent from `upper` and certified by an exhaustive sweep
/// of the layer's cosets (when at most [`LAYER_SWEEP_CAP`] of them exist).
fn minimal_member_above<R: Rng + ?Sized>(
    g: &Group,
    upper: &Group,
    low: &Group,
    rng: &mut R,
) -> Result<Group, Error> {
    let mut cur = upper.clone();
    'descend: loop {
        let span: BigUint = cur.order() / low.order();
        if span <= BigUint::from(LAYER_SWEEP_CAP) {
            let reps = coset_representatives(low.chain(), cur.generators(), LAYER_SWEEP_CAP)?;
            for rep in &reps {
                if low.chain().sifts_to_identity(rep) {
                    continue;
                }
                let ncl = closure_above(g, low, rep);
                if ncl.order() < cur.order() {
                    cur = ncl;
                    continue 'descend;
                }
                debug_assert_eq!(ncl.order(), cur.order());
            }
            // every non-trivial coset normally generates the layer: minimal
            return Ok(cur);
        }
        let budget = 64 * span.bits().max(1) as usize;
        for _ in 0..budget {
            let x = cur.random_element(rng);
            if low.chain().sifts_to_identity(&x) {
                continue;
            }
            let ncl = closure_above(g, low, &x);
            if ncl.order() < cur.order() {
                cur = ncl;
                continue 'descend;
            }
        }
        return Err(Error::RefinementFailed(format!(
            "layer of size {span} exceeds the coset sweep cap and sampling \
             found no proper closure; minimality cannot be certified"
        )));
    }
}

/// Refines a (possibly huge) layer by repeated minimal-member extraction.
/// Returns the ascending chain `low = M_0 < … < M_r = upper` inclusive.
fn refine_by_closure_descent<R: Rng + ?Sized>(
    g: &Group,
    upper: &Group,
    lower: &Group,
    rng: &mut R,
) -> Result<Vec<Group>, Error> {
    let mut asc = vec![lower.clone()];
    while asc.last().unwrap().order() < upper.order() {
        let m = minimal_member_above(g, upper, asc.last().unwrap(), rng)?;
        asc.push(m);
    }
    Ok(asc)
}

/// Basis of `upper` modulo `lower` as independent coset generators: each
/// extends the chain by a factor of exactly `p`. Also returns the chains of
/// the partial spans `⟨lower, e_1..e_i⟩` for coordinate computations.
pub(crate) fn layer_basis(
    upper: &Group,
    lower: &Group,
) -> (Vec<Perm>, Vec<StabilizerChain>) {
    let mut chains = vec![lower.chain().clone()];
    let mut basis = Vec::new();
    for x in upper.generators() {
        if !chains.last().unwrap().sifts_to_identity(x) {
            let mut next = chains.last().unwrap().clone();
            next.extend_and_complete(std::slice::from_ref(x));
            chains.push(next);
            basis.push(x.clone());
        }
    }
    (basis, chains)
}

/// Coordinates of `y` (an element of the span) over the layer basis, mod
/// `lower`: the unique `(c_1..c_l)` with `y ≡ e_1^{c_1}…e_l^{c_l}`.
fn layer_coordinates(
    y: &Perm,
    basis: &[Perm],
    chains: &[StabilizerChain],
    p: u64,
) -> Result<Vec<u32>, Error> {
    let l = basis.len();
    let mut coords = vec![0u32; l];
    let mut rest = y.clone();
    for i in (0..l).rev() {
        let inv = basis[i].inverse();
        let mut c = 0u64;
        loop {
            if chains[i].sifts_to_identity(&rest) {
                break;
            }
            c += 1;
            if c >= p {
                return Err(Error::InternalInconsistency(
                    "element has no coordinates over the layer basis".into(),
                ));
            }
            rest = rest.compose(&inv);
        }
        coords[i] = c as u32;
        // rest is now in ⟨lower, e_1..e_i⟩; continue peeling
    }
    Ok(coords)
}

/// Exact refinement of an elementary abelian layer into irreducible module
/// layers via spinning. Ascending, endpoints included.
fn refine_elementary<'a>(
    g: &Group,
    upper: &'a Group,
    lower: &'a Group,
    p: u64,
) -> Result<Vec<Group>, Error> {
    let mut asc = vec![lower.clone()];
    while asc.last().unwrap().order() < upper.order() {
        let cur = asc.last().unwrap();
        let (basis, chains) = layer_basis(upper, cur);
        let l = basis.len();
        debug_assert!(l > 0);
        if l == 1 {
            // prime-order layer: nothing to split
            let mut chain = cur.chain().clone();
            chain.extend_and_complete(&basis);
            let mut gens = cur.generators().to_vec();
            gens.extend(basis);
            asc.push(Group::from_chain(gens, chain));
            continue;
        }
        let mats: Vec<FpMatrix> = g
            .generators()
            .iter()
            .map(|a| {
                let rows = basis
                    .iter()
                    .map(|e| layer_coordinates(&e.conjugate_by(a), &basis, &chains, p))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(FpMatrix::new(p as u32, rows))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        let sub_basis = minimal_submodule(p as u32, l, &mats, LINE_SWEEP_CAP)?;
        let mut gens = cur.generators().to_vec();
        let mut chain = cur.chain().clone();
        for v in &sub_basis {
            let mut f = Perm::identity(g.degree());
            for (i, &c) in v.iter().enumerate() {
                if c > 0 {
                    f = f.compose(&basis[i].pow(c as u64));
                }
            }
            debug_assert!(!f.is_identity());
            gens.push(f.clone());
            chain.extend_and_complete(std::slice::from_ref(&f));
        }
        asc.push(Group::from_chain(gens, chain));
    }
    Ok(asc)
}

/// Splits an abelian layer into primary components, each primary layer into
/// elementary layers by p-th power maps, and each elementary layer into
/// irreducible module layers. Ascending, endpoints included.
fn refine_abelian<R: Rng + ?Sized>(
    g: &Group,
    upper: &Group,
    lower: &Group,
    _rng: &mut R,
) -> Result<Vec<Group>, Error> {
    let span: BigUint = upper.order() / lower.order();
    let primes = small_prime_factors(&span).ok_or_else(|| {
        Error::RefinementFailed("cannot factor the abelian layer order".into())
    })?;
    // primary decomposition: accumulate one prime component at a time
    let mut primary = vec![lower.clone()];
    for j in 0..primes.len() {
        if j + 1 == primes.len() {
            primary.push(upper.clone());
            break;
        }
        // exponent killing all primes after position j
        let mut q = BigUint::one();
        for &(pp, aa) in &primes[j + 1..] {
            q *= BigUint::from(pp).pow(aa);
        }
        let cur = primary.last().unwrap();
        let mut gens = cur.generators().to_vec();
        let mut chain = cur.chain().clone();
        for x in upper.generators() {
            let y = x.pow_big(&q);
            if !chain.sifts_to_identity(&y) {
                chain.extend_and_complete(std::slice::from_ref(&y));
                gens.push(y);
            }
        }
        primary.push(Group::from_chain(gens, chain));
    }
    // elementary decomposition inside each primary layer, then spinning
    let mut asc = vec![lower.clone()];
    for (w, &(p, _)) in primary.windows(2).zip(primes.iter()) {
        let (lo, hi) = (&w[0], &w[1]);
        // exponent e of the layer: largest p-power order among generators
        let mut e = 0u32;
        for x in hi.generators() {
            let mut j = 0u32;
            let mut y = x.clone();
            while !lo.chain().sifts_to_identity(&y) {
                y = y.pow(p);
                j += 1;
            }
            e = e.max(j);
        }
        let mut elementary = vec![lo.clone()];
        for t in (1..e).rev() {
            let q = BigUint::from(p).pow(t);
            let cur = elementary.last().unwrap();
            let mut gens = cur.generators().to_vec();
            let mut chain = cur.chain().clone();
            for x in hi.generators() {
                let y = x.pow_big(&q);
                if !chain.sifts_to_identity(&y) {
                    chain.extend_and_complete(std::slice::from_ref(&y));
                    gens.push(y);
                }
            }
            elementary.push(Group::from_chain(gens, chain));
        }
        elementary.push(hi.clone());
        for pair in elementary.windows(2) {
            if pair[0].order() == pair[1].order() {
                continue;
            }
            let refined = refine_elementary(g, &pair[1], &pair[0], p)?;
            asc.extend(refined.into_iter().skip(1));
        }
    }
    Ok(asc)
}

/// Validates layer preconditions and refines an elementary abelian layer of
/// `g` into irreducible module layers. Returns the ascending chain
/// `lower = M_0 < … < M_r = upper`.
pub fn refine_abelian_layer(
    g: &Group,
    upper: &Group,
    lower: &Group,
) -> Result<Vec<Group>, Error> {
    if !is_normal_subgroup(g, lower) || !is_normal_subgroup(g, upper) {
        return Err(Error::LayerNotNormal);
    }
    if !subgroup_of(lower, upper) && lower.order() != upper.order() {
        return Err(Error::LayerNotNormal);
    }
    if !layer_is_abelian(upper, lower) {
        return Err(Error::LayerNotElementaryAbelian);
    }
    let span: BigUint = upper.order() / lower.order();
    let Some((p, _)) = factor_prime_power(&span) else {
        return Err(Error::LayerNotElementaryAbelian);
    };
    // exponent p: generator p-th powers must fall into lower
    for x in upper.generators() {
        if !lower.chain().sifts_to_identity(&x.pow(p)) && !lower.chain().sifts_to_identity(x) {
            return Err(Error::LayerNotElementaryAbelian);
        }
    }
    refine_elementary(g, upper, lower, p)
}

/// Builds a chief series of `g`. The RNG is consulted only when a
/// non-abelian layer is too large for the exhaustive minimality sweep; on
/// the supported corpus the construction is deterministic.
pub fn chief_series<R: Rng + ?Sized>(
    g: &Group,
    ordering: SeriesOrdering,
    rng: &mut R,
) -> Result<ChiefSeries, Error> {
    let n = g.degree();
    if g.is_trivial() {
        return Ok(ChiefSeries {
            subgroups: vec![Group::trivial(n)],
            factors: Vec::new(),
        });
    }
    // subgroup pool from kernels and the derived series
    let solvable_first = ordering == SeriesOrdering::AbelianHigh;
    let mut pool: Vec<Group> = Vec::new();
    pool_insert(&mut pool, Group::trivial(n));
    for m in kernel_series_ordered(g, solvable_first) {
        pool_insert(&mut pool, m);
    }
    for m in derived_series(g) {
        pool_insert(&mut pool, m);
    }

    // greedy descending nesting
    let mut desc: Vec<Group> = vec![g.clone()];
    let mut cur = g.clone();
    while !cur.is_trivial() {
        let cur_derived = derived_subgroup(&cur);
        let mut cands: Vec<&Group> = pool.iter().filter(|m| subgroup_of(m, &cur)).collect();
        if !cands.iter().any(|m| groups_equal(m, &cur_derived)) && cur_derived.order() < cur.order()
        {
            pool_insert(&mut pool, cur_derived.clone());
            cands = pool.iter().filter(|m| subgroup_of(m, &cur)).collect();
        }
        let abelian_quotient = |m: &Group| {
            cur_derived
                .generators()
                .iter()
                .all(|x| m.chain().sifts_to_identity(x))
        };
        let pick = match ordering {
            SeriesOrdering::AbelianHigh => cands
                .iter()
                .filter(|m| abelian_quotient(m))
                .max_by_key(|m| m.order().clone())
                .or_else(|| cands.iter().max_by_key(|m| m.order().clone())),
            SeriesOrdering::AsFound => cands.iter().max_by_key(|m| m.order().clone()),
        }
        .expect("the trivial group is always a candidate")
        .to_owned()
        .clone();
        desc.push(pick.clone());
        cur = pick;
    }

    // refine every layer to chief factors
    let mut subgroups: Vec<Group> = vec![desc.last().unwrap().clone()];
    for w in desc.windows(2).rev() {
        let (upper, lower) = (&w[0], &w[1]);
        if upper.order() == lower.order() {
            continue;
        }
        let refined = if layer_is_abelian(upper, lower) {
            refine_abelian(g, upper, lower, rng)?
        } else {
            refine_by_closure_descent(g, upper, lower, rng)?
        };
        subgroups.extend(refined.into_iter().skip(1));
    }

    // factor metadata
    let u = subgroups.len() - 1;
    let orders: Vec<BigUint> = subgroups
        .windows(2)
        .map(|w| w[1].order() / w[0].order())
        .collect();
    let mut factors = Vec::with_capacity(u);
    for k in 0..u {
        let abelian = layer_is_abelian(&subgroups[k + 1], &subgroups[k]);
        let (p, l) = if abelian {
            let (p, l) = factor_prime_power(&orders[k]).ok_or_else(|| {
                Error::InternalInconsistency(
                    "abelian chief factor is not of prime-power order".into(),
                )
            })?;
            (Some(p), Some(l))
        } else {
            (None, None)
        };
        let delta = orders[k..].iter().filter(|o| **o == orders[k]).count();
        factors.push(ChiefFactorInfo {
            order: orders[k].clone(),
            abelian,
            p,
            l,
            delta_prime: delta,
            t_prime: t_prime(&orders[k], delta),
        });
    }
    let series = ChiefSeries { subgroups, factors };
    // structural guarantees
    let product: BigUint = series
        .factors
        .iter()
        .fold(BigUint::one(), |acc, f| acc * &f.order);
    assert_eq!(&product, g.order(), "factor orders must multiply to |G|");
    assert!(
        series.num_factors() + 1 <= n.max(2),
        "chief length exceeds degree bound"
    );
    Ok(series)
}

/// `δ′` for factor `k` (1-based): how many chief factors of `G/N_{k-1}` have
/// the same order as `N_k/N_{k-1}`.
pub fn delta_prime(series: &ChiefSeries, k: usize) -> Result<usize, Error> {
    if k == 0 || k > series.num_factors() {
        return Err(Error::IndexOutOfRange(k));
    }
    let target = &series.factors[k - 1].order;
    Ok(series.factors[k - 1..]
        .iter()
        .filter(|f| f.order == *target)
        .count())
}

/// `t′ = ⌈8/5 + log_|N| δ′⌉`, exactly: the least `m ≥ 2` with
/// `|N|^(5m−8) ≥ δ′^5` (integer comparison, no floating point).
pub fn t_prime(factor_order: &BigUint, delta_prime: usize) -> usize {
    assert!(*factor_order >= BigUint::from(2u32));
    assert!(delta_prime >= 1);
    let d5 = BigUint::from(delta_prime).pow(5);
    let mut m = 2usize;
    loop {
        let exponent = (5 * m - 8) as u32;
        if factor_order.pow(exponent) >= d5 {
            return m;
        }
        m += 1;
    }
}
