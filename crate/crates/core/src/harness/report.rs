use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::heuristics::{predicted_density, predicted_moment};

/// Exact per-shard accumulators. Merging is addition, so any split of the
/// conductor range yields the same totals.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partial {
    pub field_count: u64,
    pub histogram: BTreeMap<u32, u64>,
    /// `k ↦ Σ 3^{k·s}` over fields, as decimal strings.
    #[serde(with = "decimal_map")]
    pub moment_sums: BTreeMap<u32, BigUint>,
}

impl Partial {
    pub fn new(k_max: u32) -> Self {
        Self { moment_sums: (1..=k_max).map(|k| (k, BigUint::zero())).collect(), ..Default::default() }
    }

    pub fn record(&mut self, s: u32) {
        self.field_count += 1;
        *self.histogram.entry(s).or_default() += 1;
        for (k, sum) in self.moment_sums.iter_mut() {
            *sum += BigUint::from(3u32).pow(k * s);
        }
    }

    pub fn merge(&mut self, other: &Partial) {
        self.field_count += other.field_count;
        for (s, n) in &other.histogram {
            *self.histogram.entry(*s).or_default() += n;
        }
        for (k, v) in &other.moment_sums {
            *self.moment_sums.entry(*k).or_default() += v;
        }
    }
}

mod decimal_map {
    use std::collections::BTreeMap;

    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<u32, BigUint>, s: S) -> Result<S::Ok, S::Error> {
        let as_str: BTreeMap<u32, String> = m.iter().map(|(k, v)| (*k, v.to_string())).collect();
        as_str.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<u32, BigUint>, D::Error> {
        let raw = BTreeMap::<u32, String>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| v.parse::<BigUint>().map(|n| (k, n)).map_err(D::Error::custom))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deltas {
    /// `empirical − predicted` per rank.
    pub density: BTreeMap<u32, f64>,
    /// `empirical − predicted` per moment order.
    pub moment: BTreeMap<u32, f64>,
}

/// Aggregate of a scan. `empirical_moment[k]` is the field average of
/// `3^{k·s} = |im φ|^k`, compared against `(N(k+1,3) − N(k,3))/3^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub field_count: u64,
    pub max_conductor: u64,
    pub histogram: BTreeMap<u32, u64>,
    pub empirical_density: BTreeMap<u32, f64>,
    pub empirical_moment: BTreeMap<u32, f64>,
    pub predicted_density: BTreeMap<u32, f64>,
    pub predicted_moment: BTreeMap<u32, f64>,
    pub delta: Deltas,
    /// Exact `Σ 3^{k·s}` behind `empirical_moment`.
    pub moment_sums: BTreeMap<u32, String>,
}

/// Ranks reported even when no field attains them.
const MIN_REPORTED_RANK: u32 = 2;

impl MomentReport {
    pub fn from_partial(max_conductor: u64, partial: &Partial) -> Self {
        let n = partial.field_count;
        let ratio = |num: BigUint| -> f64 {
            if n == 0 {
                return 0.0;
            }
            BigRational::new(num.into(), BigUint::from(n).into()).to_f64().unwrap()
        };
        let top = partial.histogram.keys().max().copied().unwrap_or(0).max(MIN_REPORTED_RANK);
        let histogram: BTreeMap<u32, u64> =
            (0..=top).map(|s| (s, partial.histogram.get(&s).copied().unwrap_or(0))).collect();
        let empirical_density: BTreeMap<u32, f64> =
            histogram.iter().map(|(&s, &c)| (s, ratio(BigUint::from(c)))).collect();
        let predicted_density: BTreeMap<u32, f64> = (0..=top).map(|s| (s, predicted_density(s, 3))).collect();
        let empirical_moment: BTreeMap<u32, f64> =
            partial.moment_sums.iter().map(|(&k, v)| (k, ratio(v.clone()))).collect();
        let predicted_moment: BTreeMap<u32, f64> = partial
            .moment_sums
            .keys()
            .map(|&k| (k, predicted_moment(k, 3).size_moment.to_f64().unwrap()))
            .collect();
        let delta = Deltas {
            density: empirical_density.iter().map(|(s, e)| (*s, e - predicted_density[s])).collect(),
            moment: empirical_moment.iter().map(|(k, e)| (*k, e - predicted_moment[k])).collect(),
        };
        MomentReport {
            field_count: n,
            max_conductor,
            histogram,
            empirical_density,
            empirical_moment,
            predicted_density,
            predicted_moment,
            delta,
            moment_sums: partial.moment_sums.iter().map(|(k, v)| (*k, v.to_string())).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}
