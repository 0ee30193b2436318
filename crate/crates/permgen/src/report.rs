//! Machine-readable result records.
//!
//! Every solve — whether from the `mingen` subcommand or a benchmark run —
//! serializes to one JSON object per line with a fixed field order, so that
//! identical inputs (expression, seed, flags) produce byte-identical output
//! and downstream tools can diff or aggregate runs without a schema lookup.

use serde::{Deserialize, Serialize};

use crate::bsgs::GenTestStats;
use crate::group::Group;
use crate::mingen::{MinGenResult, Mode};
use crate::structure::ChiefSeries;

/// One completed minimum-generating-set computation.
///
/// `order` is the exact group order in decimal (kept as a string so that
/// orders beyond `u64` survive JSON round-trips losslessly), and `gens` are
/// the returned generators in 1-based cycle notation.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SolveReport {
    pub group: String,
    pub degree: usize,
    pub order: String,
    pub d: usize,
    pub gens: Vec<String>,
    pub stats: GenTestStats,
    pub mode: String,
    pub seed: u64,
    pub certified_minimal: bool,
}

impl SolveReport {
    pub fn new(group: &str, g: &Group, result: &MinGenResult, mode: Mode, seed: u64) -> Self {
        SolveReport {
            group: group.to_string(),
            degree: g.degree(),
            order: g.order().to_string(),
            d: result.d,
            gens: result.gens.iter().map(|p| p.to_cycles_string()).collect(),
            stats: result.stats.clone(),
            mode: mode.name().to_string(),
            seed,
            certified_minimal: result.certified_minimal,
        }
    }

    /// The newline-delimited-JSON form (no trailing newline).
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }
}

/// One factor in a chief-series report, listed bottom-up.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FactorReport {
    pub order: String,
    pub abelian: bool,
    /// Prime of an abelian factor of order `p^l`.
    pub p: Option<u64>,
    /// Exponent of an abelian factor of order `p^l`.
    pub l: Option<u32>,
    pub delta_prime: usize,
    pub t_prime: usize,
}

/// A chief series described factor by factor, bottom-up.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ChiefReport {
    pub group: String,
    pub degree: usize,
    pub order: String,
    pub factors: Vec<FactorReport>,
}

impl ChiefReport {
    pub fn new(group: &str, g: &Group, series: &ChiefSeries) -> Self {
        ChiefReport {
            group: group.to_string(),
            degree: g.degree(),
            order: g.order().to_string(),
            factors: series
                .factors
                .iter()
                .map(|f| FactorReport {
                    order: f.order.to_string(),
                    abelian: f.abelian,
                    p: f.p,
                    l: f.l,
                    delta_prime: f.delta_prime,
                    t_prime: f.t_prime,
                })
                .collect(),
        }
    }

    /// The newline-delimited-JSON form (no trailing newline).
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::build;
    use crate::mingen::{min_generating_set, MinGenOptions};
    use crate::structure::{chief_series, SeriesOrdering};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn solve_report_field_order_is_pinned() {
        let g = build("cyclic(12)").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let res = min_generating_set(&g, &MinGenOptions::default(), &mut rng).unwrap();
        let line = SolveReport::new("cyclic(12)", &g, &res, Mode::Certified, 5).to_json_line();
        assert!(line.starts_with(
            "{\"group\":\"cyclic(12)\",\"degree\":12,\"order\":\"12\",\"d\":1,\"gens\":["
        ));
        assert!(line.contains("\"stats\":{\"ss_tests\":"));
        assert!(line.ends_with("\"mode\":\"certified\",\"seed\":5,\"certified_minimal\":true}"));
        let round: SolveReport = serde_json::from_str(&line).unwrap();
        assert_eq!(round.to_json_line(), line);
    }

    #[test]
    fn chief_report_lists_factors_bottom_up() {
        let g = build("sym(4)").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let series = chief_series(&g, SeriesOrdering::AbelianHigh, &mut rng).unwrap();
        let rep = ChiefReport::new("sym(4)", &g, &series);
        let orders: Vec<&str> = rep.factors.iter().map(|f| f.order.as_str()).collect();
        assert_eq!(orders, ["4", "3", "2"]);
        assert!(rep.factors.iter().all(|f| f.abelian));
        assert_eq!(rep.factors[0].p, Some(2));
        assert_eq!(rep.factors[0].l, Some(2));
        let line = rep.to_json_line();
        assert!(line.starts_with("{\"group\":\"sym(4)\",\"degree\":4,\"order\":\"24\","));
        let round: ChiefReport = serde_json::from_str(&line).unwrap();
        assert_eq!(round, rep);
    }
}
