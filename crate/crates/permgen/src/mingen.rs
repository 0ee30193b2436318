//! Minimum-size generating sets.
//!
//! [`min_generating_set`] computes `d(G)`, the size of a smallest generating
//! set of a permutation group, together with an explicit witness tuple. The
//! core algorithm lifts a partial generating tuple down a chief series: the
//! top factor is handled directly, and every further factor either keeps the
//! tuple, modifies its entries by layer elements, or (exactly when provably
//! necessary) appends one more generator. Randomness is used Las-Vegas
//! style: candidate tuples are found by sampling and screened with a Monte
//! Carlo test, but every adopted tuple is confirmed by a deterministic
//! Schreier–Sims test, and the final witness is verified against the whole
//! group before being returned.
//!
//! Cheap exact routes for nilpotent groups (Frattini-quotient ranks) and a
//! bounded random attempt at a known lower bound run first unless
//! [`MinGenOptions::use_fast_paths`] is cleared.

use crate::bsgs::{generates, generates_mod, GenStrategy, GenTestStats};
use crate::group::Group;
use crate::perm::Perm;
use crate::structure::{
    self, canonical_coset_rep, chief_series, coset_representatives, normal_closure, ChiefSeries,
    SeriesOrdering,
};
use crate::Error;
use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;
use std::collections::HashMap;

/// Monte Carlo error bound used when none is configured: 2⁻²⁰.
pub const DEFAULT_EPSILON: f64 = 9.5367431640625e-7;

/// Upper bound on any single sampling loop; hitting it means the success
/// probability bound was violated by ~40 standard deviations, i.e. a bug.
const SAMPLE_LOOP_CAP: u64 = 10_000;

/// How to behave when a layer is too large for the exhaustive certainty
/// sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Fail with [`Error::ExhaustiveCapExceeded`] rather than return an
    /// uncertified size.
    Certified,
    /// Keep sampling; the result may overshoot `d(G)` and is flagged
    /// `certified_minimal = false`.
    Heuristic,
}

impl Mode {
    /// The lowercase name used on the command line and in reports.
    pub fn name(self) -> &'static str {
        match self {
            Mode::Certified => "certified",
            Mode::Heuristic => "heuristic",
        }
    }
}

#[derive(Clone, Debug)]
pub struct MinGenOptions {
    pub mode: Mode,
    /// Error bound for each Monte Carlo generating test.
    pub epsilon: f64,
    /// Try the nilpotent and bounded-random routes before the chief-series
    /// engine.
    pub use_fast_paths: bool,
    /// Largest modification-tuple space the exhaustive sweep will walk.
    pub exhaustive_cap: u64,
}

impl Default for MinGenOptions {
    fn default() -> Self {
        MinGenOptions {
            mode: Mode::Certified,
            epsilon: DEFAULT_EPSILON,
            use_fast_paths: true,
            exhaustive_cap: 10_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MinGenResult {
    /// `d(G)` (when `certified_minimal`; an upper bound otherwise).
    pub d: usize,
    /// Witness tuple of that size; verified to generate the group.
    pub gens: Vec<Perm>,
    pub certified_minimal: bool,
    /// Ascending chief factor orders, when the series engine ran (empty for
    /// fast-path answers).
    pub factor_orders: Vec<BigUint>,
    pub stats: GenTestStats,
}

/// Computes a minimum-size generating set of `g`.
pub fn min_generating_set<R: Rng + ?Sized>(
    g: &Group,
    opts: &MinGenOptions,
    rng: &mut R,
) -> Result<MinGenResult, Error> {
    let mut stats = GenTestStats::default();
    if g.is_trivial() {
        return Ok(MinGenResult {
            d: 0,
            gens: Vec::new(),
            certified_minimal: true,
            factor_orders: Vec::new(),
            stats,
        });
    }
    if opts.use_fast_paths {
        if let Some(gens) = nilpotent_route(g, &mut stats)? {
            return finish(g, gens, true, Vec::new(), stats, rng);
        }
        if let Some(gens) = quick_random_route(g, opts, &mut stats, rng)? {
            return finish(g, gens, true, Vec::new(), stats, rng);
        }
    }
    let series = chief_series(g, SeriesOrdering::AbelianHigh, rng)?;
    min_generating_set_with_series(g, &series, opts, stats, rng)
}

/// The chief-series lifting engine, on a precomputed series.
pub fn min_generating_set_with_series<R: Rng + ?Sized>(
    g: &Group,
    series: &ChiefSeries,
    opts: &MinGenOptions,
    mut stats: GenTestStats,
    rng: &mut R,
) -> Result<MinGenResult, Error> {
    let u = series.num_factors();
    if u == 0 {
        return Ok(MinGenResult {
            d: 0,
            gens: Vec::new(),
            certified_minimal: true,
            factor_orders: Vec::new(),
            stats,
        });
    }
    let factor_orders: Vec<BigUint> = series.factors.iter().map(|f| f.order.clone()).collect();
    let members = &series.subgroups;
    let mut certified_minimal = true;

    // Top factor: G modulo the maximal member.
    let top_below = &members[u - 1];
    let mut gens: Vec<Perm> = if series.factors[u - 1].abelian {
        // An abelian top chief factor has prime order (the conjugation
        // action on it is trivial, so irreducibility forces rank one); any
        // generator escaping the member below it generates the quotient.
        let x = g
            .generators()
            .iter()
            .find(|x| !top_below.chain().sifts_to_identity(x))
            .ok_or_else(|| {
                Error::InternalInconsistency(
                    "no generator escapes the maximal member of the series".into(),
                )
            })?;
        stats.record(u, "TopAbelian", 1);
        vec![x.clone()]
    } else {
        // A non-abelian top factor makes G/N_{u-1} characteristically
        // simple, hence two-generated: sample pairs.
        let mc = GenStrategy::MonteCarlo {
            epsilon: opts.epsilon,
        };
        let mut trials = 0u64;
        loop {
            trials += 1;
            if trials > SAMPLE_LOOP_CAP {
                return Err(Error::InternalInconsistency(
                    "pair sampling for the top factor exceeded its cap".into(),
                ));
            }
            let cand = vec![g.random_element(rng), g.random_element(rng)];
            stats.random_elements += 2;
            if generates_mod(&cand, top_below.chain(), g.order(), mc, &mut stats, rng)
                && generates_mod(
                    &cand,
                    top_below.chain(),
                    g.order(),
                    GenStrategy::Deterministic,
                    &mut stats,
                    rng,
                )
            {
                stats.record(u, "TopNonAbelian", trials);
                break cand;
            }
        }
    };

    // Lift through factors u-1 .. 1; after handling factor k the tuple
    // generates G modulo members[k-1].
    for k in (1..u).rev() {
        let layer_top = &members[k];
        let below = &members[k - 1];
        let info = &series.factors[k - 1];
        if info.abelian {
            lift_abelian(g, layer_top, below, k, &mut gens, &mut stats, rng)?;
        } else {
            lift_nonabelian(
                g,
                layer_top,
                below,
                k,
                info,
                opts,
                &mut gens,
                &mut certified_minimal,
                &mut stats,
                rng,
            )?;
        }
        // The tuple often generates the whole group well before the bottom
        // of the series; one cheap screen per factor pays for itself.
        if k > 1 {
            let mc = GenStrategy::MonteCarlo {
                epsilon: opts.epsilon,
            };
            if generates(&gens, g, mc, &mut stats, rng)?
                && generates(&gens, g, GenStrategy::Deterministic, &mut stats, rng)?
            {
                stats.record(0, "EarlyStop", 1);
                break;
            }
        }
    }
    finish(g, gens, certified_minimal, factor_orders, stats, rng)
}

/// Deterministic final verification; every returned result has passed it.
fn finish<R: Rng + ?Sized>(
    g: &Group,
    gens: Vec<Perm>,
    certified_minimal: bool,
    factor_orders: Vec<BigUint>,
    mut stats: GenTestStats,
    rng: &mut R,
) -> Result<MinGenResult, Error> {
    let ok = if gens.is_empty() {
        g.is_trivial()
    } else {
        generates(&gens, g, GenStrategy::Deterministic, &mut stats, rng)?
    };
    stats.record(0, "FinalVerify", 1);
    if !ok {
        return Err(Error::InternalInconsistency(
            "final verification rejected the witness tuple".into(),
        ));
    }
    Ok(MinGenResult {
        d: gens.len(),
        gens,
        certified_minimal,
        factor_orders,
        stats,
    })
}

/// Abelian layer lift. The failing modifications of the tuple form a linear
/// space (they are graphs of derivations into the layer), so if the
/// unmodified tuple and every single-entry modification by a layer basis
/// element fail, every simultaneous modification fails too; appending any
/// basis element then both suffices and is provably necessary.
fn lift_abelian<R: Rng + ?Sized>(
    g: &Group,
    layer_top: &Group,
    below: &Group,
    k: usize,
    gens: &mut Vec<Perm>,
    stats: &mut GenTestStats,
    rng: &mut R,
) -> Result<(), Error> {
    let det = GenStrategy::Deterministic;
    let mut trials = 1u64;
    if generates_mod(gens, below.chain(), g.order(), det, stats, rng) {
        stats.record(k, "AbelianKeep", trials);
        return Ok(());
    }
    let (basis, _) = structure::layer_basis(layer_top, below);
    for i in 0..gens.len() {
        for e in &basis {
            trials += 1;
            let mut cand = gens.clone();
            cand[i] = cand[i].compose(e);
            if generates_mod(&cand, below.chain(), g.order(), det, stats, rng) {
                *gens = cand;
                stats.record(k, "AbelianReplace", trials);
                return Ok(());
            }
        }
    }
    gens.push(basis[0].clone());
    trials += 1;
    if !generates_mod(gens, below.chain(), g.order(), det, stats, rng) {
        return Err(Error::InternalInconsistency(
            "appending a layer basis element failed to generate the quotient".into(),
        ));
    }
    stats.record(k, "AbelianAppend", trials);
    Ok(())
}

/// Non-abelian layer lift: sampling first, an exhaustive sweep when sampling
/// is not trusted to decide, and an appended generator exactly when the
/// sweep proves no same-size modification exists.
#[allow(clippy::too_many_arguments)]
fn lift_nonabelian<R: Rng + ?Sized>(
    g: &Group,
    layer_top: &Group,
    below: &Group,
    k: usize,
    info: &crate::structure::ChiefFactorInfo,
    opts: &MinGenOptions,
    gens: &mut Vec<Perm>,
    certified_minimal: &mut bool,
    stats: &mut GenTestStats,
    rng: &mut R,
) -> Result<(), Error> {
    let det = GenStrategy::Deterministic;
    let mc = GenStrategy::MonteCarlo {
        epsilon: opts.epsilon,
    };
    let d = gens.len();

    if d == 1 {
        // A cyclic quotient extended by a non-abelian factor needs two
        // generators, and pairs (g₁n₁, n₂) with random layer elements hit
        // with good probability.
        let mut trials = 0u64;
        loop {
            trials += 1;
            if trials > SAMPLE_LOOP_CAP {
                return Err(Error::InternalInconsistency(
                    "pair sampling over a non-abelian layer exceeded its cap".into(),
                ));
            }
            let n1 = layer_top.random_element(rng);
            let n2 = layer_top.random_element(rng);
            stats.random_elements += 2;
            let cand = vec![gens[0].compose(&n1), n2];
            if generates_mod(&cand, below.chain(), g.order(), mc, stats, rng)
                && generates_mod(&cand, below.chain(), g.order(), det, stats, rng)
            {
                *gens = cand;
                stats.record(k, "NonAbelianPair", trials);
                return Ok(());
            }
        }
    }

    let draw_modified = |rng: &mut R, stats: &mut GenTestStats| -> Vec<Perm> {
        stats.random_elements += d as u64;
        gens.iter()
            .map(|gi| gi.compose(&layer_top.random_element(rng)))
            .collect()
    };

    if info.t_prime <= d {
        // Plenty of tuple entries relative to the factor multiplicity: a
        // random modification generates with probability bounded away from
        // zero, so plain sampling decides.
        let mut trials = 0u64;
        loop {
            trials += 1;
            if trials > SAMPLE_LOOP_CAP {
                return Err(Error::InternalInconsistency(
                    "modification sampling exceeded its cap".into(),
                ));
            }
            let cand = draw_modified(rng, stats);
            if generates_mod(&cand, below.chain(), g.order(), mc, stats, rng)
                && generates_mod(&cand, below.chain(), g.order(), det, stats, rng)
            {
                *gens = cand;
                stats.record(k, "NonAbelianReplace", trials);
                return Ok(());
            }
        }
    }

    // Scarce case: a same-size modification may be rare or may not exist.
    // Sample within a budget, then let the exhaustive sweep decide.
    let ln_order = info.order.bits() as f64 * std::f64::consts::LN_2;
    let budget = ((90.0 * d as f64 * info.delta_prime as f64 * ln_order) / 53.0).ceil() as u64;
    let mut trials = 0u64;
    while trials < budget {
        trials += 1;
        let cand = draw_modified(rng, stats);
        if generates_mod(&cand, below.chain(), g.order(), mc, stats, rng)
            && generates_mod(&cand, below.chain(), g.order(), det, stats, rng)
        {
            *gens = cand;
            stats.record(k, "NonAbelianBudgetedReplace", trials);
            return Ok(());
        }
    }

    let span: BigUint = layer_top.order() / below.order();
    let space = span.pow(d as u32);
    if space <= BigUint::from(opts.exhaustive_cap) {
        let before = stats.ss_tests;
        if let Some(cand) =
            modification_sweep(g, layer_top, below, gens, true, opts.exhaustive_cap, stats, rng)?
        {
            *gens = cand;
            stats.record(k, "NonAbelianExhaustive", stats.ss_tests - before);
            return Ok(());
        }
        // The sweep covered every modification class, so the quotient
        // provably needs one more generator; find it by sampling.
        let sweep_tests = stats.ss_tests - before;
        let mut trials = 0u64;
        loop {
            trials += 1;
            if trials > SAMPLE_LOOP_CAP {
                return Err(Error::InternalInconsistency(
                    "append sampling over a non-abelian layer exceeded its cap".into(),
                ));
            }
            let mut cand = gens.clone();
            cand.push(layer_top.random_element(rng));
            stats.random_elements += 1;
            if generates_mod(&cand, below.chain(), g.order(), mc, stats, rng)
                && generates_mod(&cand, below.chain(), g.order(), det, stats, rng)
            {
                *gens = cand;
                stats.record(k, "NonAbelianAppend", sweep_tests + trials);
                return Ok(());
            }
        }
    }

    match opts.mode {
        Mode::Certified => Err(Error::ExhaustiveCapExceeded(
            space,
            BigUint::from(opts.exhaustive_cap),
        )),
        Mode::Heuristic => {
            // Alternate same-size and appended candidates; an append may
            // overshoot d(G), which the caller surfaces via the flag.
            let mut trials = 0u64;
            loop {
                trials += 1;
                if trials > 4 * SAMPLE_LOOP_CAP {
                    return Err(Error::InternalInconsistency(
                        "heuristic sampling over a non-abelian layer exceeded its cap".into(),
                    ));
                }
                if trials % 2 == 1 {
                    let cand = draw_modified(rng, stats);
                    if generates_mod(&cand, below.chain(), g.order(), mc, stats, rng)
                        && generates_mod(&cand, below.chain(), g.order(), det, stats, rng)
                    {
                        *gens = cand;
                        stats.record(k, "NonAbelianReplace", trials);
                        return Ok(());
                    }
                } else {
                    let mut cand = gens.clone();
                    cand.push(layer_top.random_element(rng));
                    stats.random_elements += 1;
                    if generates_mod(&cand, below.chain(), g.order(), mc, stats, rng)
                        && generates_mod(&cand, below.chain(), g.order(), det, stats, rng)
                    {
                        *gens = cand;
                        *certified_minimal = false;
                        stats.record(k, "NonAbelianAppend", trials);
                        return Ok(());
                    }
                }
            }
        }
    }
}

/// Exhaustive search for a modification `(gᵢ·nᵢ)` of `tuple` that generates
/// `g` modulo `below`, with the `nᵢ` ranging over coset representatives of
/// the layer `layer_top / below`.
///
/// With `reduce_by_symmetry`, tuples are grouped into classes under
/// simultaneous conjugation by layer elements — `(nᵢ) ↦ (aᵢ·nᵢ·m)` with
/// `aᵢ = gᵢ⁻¹m⁻¹gᵢ`, which preserves the generation outcome — and one
/// deterministic test is spent per class instead of per tuple. Returns a
/// successful modified tuple, or `None` after covering the whole space.
#[allow(clippy::too_many_arguments)]
pub fn modification_sweep<R: Rng + ?Sized>(
    g: &Group,
    layer_top: &Group,
    below: &Group,
    tuple: &[Perm],
    reduce_by_symmetry: bool,
    cap: u64,
    stats: &mut GenTestStats,
    rng: &mut R,
) -> Result<Option<Vec<Perm>>, Error> {
    let d = tuple.len();
    let span: BigUint = layer_top.order() / below.order();
    let space = span.pow(d as u32);
    if space > BigUint::from(cap) {
        return Err(Error::ExhaustiveCapExceeded(space, BigUint::from(cap)));
    }
    let reps = coset_representatives(below.chain(), layer_top.generators(), cap as usize)?;
    let t = reps.len();
    let total: usize = t.pow(d as u32);

    let mut visited = vec![false; total];
    let decode = |mut idx: usize| -> Vec<usize> {
        let mut digits = vec![0usize; d];
        for digit in digits.iter_mut() {
            *digit = idx % t;
            idx /= t;
        }
        digits
    };

    // Translation tables for the symmetry action, one per acting layer
    // generator and tuple coordinate.
    let tables: Vec<Vec<Vec<u32>>> = if reduce_by_symmetry {
        let mut index: HashMap<&[u32], u32> = HashMap::new();
        for (i, r) in reps.iter().enumerate() {
            index.insert(r.images(), i as u32);
        }
        layer_top
            .generators()
            .iter()
            .filter(|m| !below.chain().sifts_to_identity(m))
            .map(|m| {
                let m_inv = m.inverse();
                (0..d)
                    .map(|i| {
                        let a_i = m_inv.conjugate_by(&tuple[i]);
                        reps.iter()
                            .map(|n| {
                                let moved = a_i.compose(n).compose(m);
                                let canon = canonical_coset_rep(below.chain(), &moved);
                                *index.get(canon.images()).expect("closed under the action")
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    } else {
        Vec::new()
    };

    for start in 0..total {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        if reduce_by_symmetry {
            let mut queue = vec![start];
            while let Some(cur) = queue.pop() {
                let digits = decode(cur);
                for table in &tables {
                    let mut next = 0usize;
                    for i in (0..d).rev() {
                        next = next * t + table[i][digits[i]] as usize;
                    }
                    if !visited[next] {
                        visited[next] = true;
                        queue.push(next);
                    }
                }
            }
        }
        let digits = decode(start);
        let cand: Vec<Perm> = (0..d).map(|i| tuple[i].compose(&reps[digits[i]])).collect();
        if generates_mod(
            &cand,
            below.chain(),
            g.order(),
            GenStrategy::Deterministic,
            stats,
            rng,
        ) {
            return Ok(Some(cand));
        }
    }
    Ok(None)
}

/// Exact route for nilpotent groups. Per prime `p` dividing the order, the
/// elements `x^(|G|/pᵃ)` land in the (unique, for nilpotent groups) Sylow
/// p-subgroup; if every such subgroup has full Sylow order and they commute
/// pairwise, the group is their direct product, minimum generating sets per
/// prime follow from Frattini quotients, and entrywise products combine
/// them. Returns `None` when the group fails the nilpotency checks.
fn nilpotent_route(g: &Group, stats: &mut GenTestStats) -> Result<Option<Vec<Perm>>, Error> {
    let primes = match structure::small_prime_factors(g.order()) {
        Some(p) => p,
        None => return Ok(None),
    };
    let parts: Vec<Group> = if primes.len() == 1 {
        vec![g.clone()]
    } else {
        let mut parts = Vec::new();
        for &(p, a) in &primes {
            let co_part = g.order() / BigUint::from(p).pow(a);
            let part_gens: Vec<Perm> = g
                .generators()
                .iter()
                .map(|x| x.pow_big(&co_part))
                .filter(|x| !x.is_identity())
                .collect();
            let part = Group::new(g.degree(), part_gens)?;
            if *part.order() != BigUint::from(p).pow(a) {
                return Ok(None); // not nilpotent
            }
            parts.push(part);
        }
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                for x in parts[i].generators() {
                    for y in parts[j].generators() {
                        if !Perm::commutator(x, y).is_identity() {
                            return Ok(None); // Sylow parts do not commute
                        }
                    }
                }
            }
        }
        parts
    };
    let mut per_prime: Vec<Vec<Perm>> = Vec::new();
    for (part, &(p, _)) in parts.iter().zip(&primes) {
        per_prime.push(frattini_quotient_basis(part, p)?);
    }
    let d = per_prime.iter().map(|t| t.len()).max().unwrap_or(0);
    let mut gens = Vec::with_capacity(d);
    for i in 0..d {
        let mut x = Perm::identity(g.degree());
        for tuple in &per_prime {
            if i < tuple.len() {
                x = x.compose(&tuple[i]);
            }
        }
        gens.push(x);
    }
    stats.record(0, "Nilpotent", 1);
    Ok(Some(gens))
}

/// Minimum generating set of a p-group: generators picked greedily to be
/// independent modulo the Frattini subgroup (commutators and p-th powers)
/// generate the group, and their count is the Frattini-quotient rank.
fn frattini_quotient_basis(h: &Group, p: u64) -> Result<Vec<Perm>, Error> {
    let mut seeds = Vec::new();
    for (i, a) in h.generators().iter().enumerate() {
        for b in &h.generators()[i + 1..] {
            let c = Perm::commutator(a, b);
            if !c.is_identity() {
                seeds.push(c);
            }
        }
        let ap = a.pow(p);
        if !ap.is_identity() {
            seeds.push(ap);
        }
    }
    let phi = normal_closure(h, &seeds)?;
    let mut chain = phi.chain().clone();
    let mut picked = Vec::new();
    for x in h.generators() {
        if !chain.sifts_to_identity(x) {
            chain.extend_and_complete(std::slice::from_ref(x));
            picked.push(x.clone());
        }
    }
    if chain.order() != *h.order() {
        return Err(Error::InternalInconsistency(
            "generators failed to span their own Frattini quotient".into(),
        ));
    }
    Ok(picked)
}

/// Bounded random attempt at the cheap lower bound max(2, abelianization
/// rank); the nilpotent route has already excluded cyclic groups, so a hit
/// is exact.
fn quick_random_route<R: Rng + ?Sized>(
    g: &Group,
    opts: &MinGenOptions,
    stats: &mut GenTestStats,
    rng: &mut R,
) -> Result<Option<Vec<Perm>>, Error> {
    let ell = abelianization_rank(g)?.max(2);
    let mc = GenStrategy::MonteCarlo {
        epsilon: opts.epsilon,
    };
    for attempt in 1..=8u64 {
        let cand: Vec<Perm> = (0..ell).map(|_| g.random_element(rng)).collect();
        stats.random_elements += ell as u64;
        if generates(&cand, g, mc, stats, rng)?
            && generates(&cand, g, GenStrategy::Deterministic, stats, rng)?
        {
            stats.record(0, "QuickAttempt", attempt);
            return Ok(Some(cand));
        }
    }
    Ok(None)
}

/// `d` of the abelianization: the largest rank among the quotients by
/// `⟨commutators, p-th powers⟩`, over primes `p` dividing `|G/G′|`.
fn abelianization_rank(g: &Group) -> Result<usize, Error> {
    let derived = structure::derived_subgroup(g);
    if derived.order() == g.order() {
        return Ok(0);
    }
    let ab_order: BigUint = g.order() / derived.order();
    let primes = structure::small_prime_factors(&ab_order).ok_or_else(|| {
        Error::RefinementFailed("cannot factor the abelianization order".into())
    })?;
    let mut best = 0usize;
    for &(p, _) in &primes {
        let mut sub = derived.clone();
        for x in g.generators() {
            let xp = x.pow(p);
            if !sub.chain().sifts_to_identity(&xp) {
                sub = structure::closure_above(g, &sub, &xp);
            }
        }
        let index: BigUint = g.order() / sub.order();
        if index > BigUint::one() {
            let (q, r) = structure::factor_prime_power(&index).ok_or_else(|| {
                Error::InternalInconsistency("mixed-prime Frattini-style quotient".into())
            })?;
            debug_assert_eq!(q, p);
            best = best.max(r as usize);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::build;
    use crate::oracle;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn solve(spec: &str, opts: &MinGenOptions, seed: u64) -> MinGenResult {
        let g = build(spec).unwrap();
        min_generating_set(&g, opts, &mut rng(seed)).unwrap()
    }

    #[test]
    fn sizes_match_brute_force_on_small_groups() {
        let cases = [
            ("cyclic(6)", 1),
            ("cyclic(12)", 1),
            ("direct_product(cyclic(2), cyclic(2), cyclic(2))", 3),
            ("direct_power(cyclic(3), 3)", 3),
            ("sym(3)", 2),
            ("sym(4)", 2),
            ("alt(4)", 2),
            ("alt(5)", 2),
            ("q8", 2),
            ("dihedral(6)", 2),
            ("crown_inversion(3, 2)", 3),
            ("direct_product(alt(5), cyclic(2))", 2),
            ("wreath(cyclic(3), sym(2))", 2),
            ("direct_product(cyclic(2), cyclic(4))", 2),
        ];
        let opts = MinGenOptions::default();
        for (spec, expect) in cases {
            let res = solve(spec, &opts, 7);
            assert_eq!(res.d, expect, "{spec}");
            assert!(res.certified_minimal, "{spec}");
            let g = build(spec).unwrap();
            assert_eq!(
                oracle::oracle_min_gen(&g, 6).unwrap(),
                res.d,
                "oracle disagrees on {spec}"
            );
        }
    }

    #[test]
    fn trivial_group_needs_no_generators() {
        let g = Group::trivial(4);
        let res = min_generating_set(&g, &MinGenOptions::default(), &mut rng(0)).unwrap();
        assert_eq!(res.d, 0);
        assert!(res.gens.is_empty());
        assert!(res.certified_minimal);
    }

    #[test]
    fn fast_paths_and_series_agree() {
        let mut with = MinGenOptions::default();
        with.use_fast_paths = true;
        let mut without = MinGenOptions::default();
        without.use_fast_paths = false;
        for spec in [
            "cyclic(8)",
            "cyclic(30)",
            "direct_power(cyclic(2), 4)",
            "q8",
            "sym(4)",
            "alt(5)",
            "crown_inversion(3, 2)",
            "crown_inversion(3, 3)",
            "dihedral(8)",
        ] {
            let a = solve(spec, &with, 3);
            let b = solve(spec, &without, 3);
            assert_eq!(a.d, b.d, "{spec}");
            assert!(a.certified_minimal && b.certified_minimal, "{spec}");
        }
    }

    #[test]
    fn crown_sizes_grow_linearly() {
        let opts = MinGenOptions::default();
        for k in 2..=5 {
            let res = solve(&format!("crown_inversion(3, {k})"), &opts, 11);
            assert_eq!(res.d, k + 1, "crown with {k} blocks");
            assert!(res.certified_minimal);
        }
    }

    #[test]
    fn direct_powers_of_simple_groups() {
        let opts = MinGenOptions::default();
        let res = solve("direct_power(alt(5), 2)", &opts, 5);
        assert_eq!(res.d, 2);
        let res = solve("direct_power(alt(5), 5)", &opts, 5);
        assert_eq!(res.d, 2);
    }

    #[test]
    fn witness_actually_generates() {
        let opts = MinGenOptions::default();
        for spec in ["sym(4)", "crown_inversion(3, 2)", "direct_power(alt(5), 2)"] {
            let g = build(spec).unwrap();
            let res = min_generating_set(&g, &opts, &mut rng(1)).unwrap();
            let h = Group::new(g.degree(), res.gens.clone()).unwrap();
            assert_eq!(h.order(), g.order(), "{spec}");
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let opts = MinGenOptions::default();
        let a = solve("direct_power(alt(5), 3)", &opts, 42);
        let b = solve("direct_power(alt(5), 3)", &opts, 42);
        assert_eq!(a.d, b.d);
        assert_eq!(a.gens, b.gens);
        assert_eq!(a.stats, b.stats);
    }

    #[test]
    fn lifting_records_factor_traces() {
        let mut opts = MinGenOptions::default();
        opts.use_fast_paths = false;
        let res = solve("direct_power(alt(5), 3)", &opts, 2);
        assert_eq!(res.d, 2);
        assert_eq!(res.factor_orders.len(), 3);
        assert!(res
            .stats
            .per_factor
            .iter()
            .any(|t| t.branch == "TopNonAbelian"));
        assert!(res
            .stats
            .per_factor
            .iter()
            .any(|t| t.branch == "FinalVerify"));
        assert!(res.stats.ss_tests > 0);
    }

    #[test]
    fn abelian_lift_keeps_replaces_and_appends() {
        let mut opts = MinGenOptions::default();
        opts.use_fast_paths = false;
        // Elementary abelian 3³ forces two appends after the top generator.
        let res = solve("direct_power(cyclic(3), 3)", &opts, 4);
        assert_eq!(res.d, 3);
        let appends = res
            .stats
            .per_factor
            .iter()
            .filter(|t| t.branch == "AbelianAppend")
            .count();
        assert_eq!(appends, 2);
        // A cyclic group of mixed order lifts without ever appending.
        let res = solve("cyclic(12)", &opts, 4);
        assert_eq!(res.d, 1);
        assert!(res
            .stats
            .per_factor
            .iter()
            .all(|t| t.branch != "AbelianAppend"));
    }

    #[test]
    fn sweep_reduced_and_full_agree() {
        // One generator above the base group of Alt(5) wr Sym(2): no
        // single-element modification can generate the (non-cyclic) whole
        // group, so both sweeps walk their entire space and return None —
        // the reduced one with one test per symmetry class.
        let g = build("wreath(alt(5), sym(2))").unwrap();
        let base = structure::kernel_series(&g)
            .into_iter()
            .find(|m| m.order_u64() == Some(3600))
            .expect("base group is an orbit/block kernel");
        let below = Group::trivial(g.degree());
        let top_gen = g
            .generators()
            .iter()
            .find(|x| !base.chain().sifts_to_identity(x))
            .unwrap()
            .clone();

        let mut stats_r = GenTestStats::default();
        let found_reduced = modification_sweep(
            &g,
            &base,
            &below,
            std::slice::from_ref(&top_gen),
            true,
            10_000,
            &mut stats_r,
            &mut rng(1),
        )
        .unwrap();
        let mut stats_f = GenTestStats::default();
        let found_full = modification_sweep(
            &g,
            &base,
            &below,
            std::slice::from_ref(&top_gen),
            false,
            10_000,
            &mut stats_f,
            &mut rng(1),
        )
        .unwrap();
        assert!(found_reduced.is_none() && found_full.is_none());
        assert_eq!(stats_f.ss_tests, 3600);
        assert!(
            stats_r.ss_tests < stats_f.ss_tests,
            "symmetry classes must save deterministic tests ({} vs {})",
            stats_r.ss_tests,
            stats_f.ss_tests
        );

        // An instance where a modification exists: both sweeps find one.
        let g2 = build("direct_power(alt(5), 2)").unwrap();
        let series =
            structure::chief_series(&g2, SeriesOrdering::AbelianHigh, &mut rng(0)).unwrap();
        let mut opts = MinGenOptions::default();
        opts.use_fast_paths = false;
        let solved = min_generating_set(&g2, &opts, &mut rng(9)).unwrap();
        for reduce in [true, false] {
            let mut stats = GenTestStats::default();
            let found = modification_sweep(
                &g2,
                &series.subgroups[1],
                &Group::trivial(g2.degree()),
                &solved.gens,
                reduce,
                10_000,
                &mut stats,
                &mut rng(1),
            )
            .unwrap();
            assert!(found.is_some());
        }
    }

    #[test]
    fn heuristic_mode_matches_on_small_groups() {
        let mut certified = MinGenOptions::default();
        certified.use_fast_paths = false;
        let mut heuristic = certified.clone();
        heuristic.mode = Mode::Heuristic;
        for spec in ["sym(4)", "alt(5)", "crown_inversion(3, 2)", "q8"] {
            let a = solve(spec, &certified, 6);
            let b = solve(spec, &heuristic, 6);
            assert_eq!(a.d, b.d, "{spec}");
        }
    }
}
