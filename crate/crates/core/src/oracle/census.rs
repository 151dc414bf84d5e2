//! Exhaustive census of a class on `n` vertices.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::canon::is_canonical_fixing;
use super::graph::{blocks_any, is_cactus, is_forest, pair_count, SmallGraph, MAX_N};
use super::minor::{has_minor, k4_free_by_reduction, Pattern};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassName {
    Trees,
    Cacti,
    Outerplanar,
    Sp,
}

impl ClassName {
    pub const ALL: [ClassName; 4] = [ClassName::Trees, ClassName::Cacti, ClassName::Outerplanar, ClassName::Sp];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassName::Trees => "trees",
            ClassName::Cacti => "cacti",
            ClassName::Outerplanar => "outerplanar",
            ClassName::Sp => "sp",
        }
    }

    /// Membership test; every class is closed under disjoint unions.
    pub fn contains(self, g: &SmallGraph) -> bool {
        match self {
            ClassName::Trees => is_forest(g),
            ClassName::Cacti => is_cactus(g),
            ClassName::Outerplanar => k4_free_by_reduction(g) && !has_minor(g, Pattern::K23),
            ClassName::Sp => k4_free_by_reduction(g),
        }
    }

    /// Upper bound on the edge count of a member on `n` vertices.
    pub fn max_edges(self, n: usize) -> usize {
        let n1 = n.saturating_sub(1);
        match self {
            ClassName::Trees => n1,
            ClassName::Cacti => 3 * n1 / 2,
            ClassName::Outerplanar | ClassName::Sp => (2 * n).saturating_sub(3).max(n1),
        }
    }

    fn max_order(self) -> usize {
        match self {
            ClassName::Trees | ClassName::Cacti => 8,
            ClassName::Outerplanar | ClassName::Sp => 7,
        }
    }
}

impl fmt::Display for ClassName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "trees" | "acyclic" | "forests" => Ok(ClassName::Trees),
            "cacti" => Ok(ClassName::Cacti),
            "outerplanar" => Ok(ClassName::Outerplanar),
            "sp" | "series-parallel" => Ok(ClassName::Sp),
            _ => Err(format!("unknown class `{s}` (expected trees, cacti, outerplanar or sp)")),
        }
    }
}

/// `Rooted` counts connected graphs with a distinguished vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Connectivity {
    All,
    Connected,
    #[serde(rename = "2-connected")]
    Biconnected,
    Rooted,
}

impl Connectivity {
    pub fn as_str(self) -> &'static str {
        match self {
            Connectivity::All => "all",
            Connectivity::Connected => "connected",
            Connectivity::Biconnected => "2-connected",
            Connectivity::Rooted => "rooted",
        }
    }

    fn admits(self, g: &SmallGraph) -> bool {
        match self {
            Connectivity::All => true,
            Connectivity::Connected | Connectivity::Rooted => g.order() > 0 && g.is_connected(),
            Connectivity::Biconnected => g.is_biconnected(),
        }
    }
}

impl fmt::Display for Connectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Connectivity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "all" => Ok(Connectivity::All),
            "connected" => Ok(Connectivity::Connected),
            "2-connected" | "biconnected" => Ok(Connectivity::Biconnected),
            "rooted" => Ok(Connectivity::Rooted),
            _ => Err(format!("unknown connectivity `{s}`")),
        }
    }
}

pub type Histogram = BTreeMap<u32, u64>;

/// `histograms` count labelled objects, so each sums to `labelled`;
/// `unlabelled_histograms` count isomorphism classes.  `rootdegree` is the
/// degree of vertex 0, which for labelled objects is by symmetry the degree
/// of a uniformly chosen vertex, and for rooted unlabelled objects the
/// degree of the root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub class: ClassName,
    pub connectivity: Connectivity,
    pub n: usize,
    pub labelled: u64,
    pub unlabelled: u64,
    pub histograms: BTreeMap<String, Histogram>,
    pub unlabelled_histograms: BTreeMap<String, Histogram>,
}

impl CensusRow {
    pub fn histogram(&self, name: &str) -> Option<&Histogram> {
        self.histograms.get(name)
    }

    /// Mean of a histogrammed parameter over labelled objects.
    pub fn mean(&self, name: &str) -> Option<f64> {
        let h = self.histograms.get(name)?;
        if self.labelled == 0 {
            return None;
        }
        let s: f64 = h.iter().map(|(&k, &c)| k as f64 * c as f64).sum();
        Some(s / self.labelled as f64)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("census rows serialize")
    }

    /// One line per (flavor, parameter, value), after a `count` line per
    /// flavor.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["class", "connectivity", "n", "flavor", "parameter", "value", "count"]).unwrap();
        let head = [self.class.as_str(), self.connectivity.as_str()];
        let n = self.n.to_string();
        for (flavor, total, hists) in [
            ("labelled", self.labelled, &self.histograms),
            ("unlabelled", self.unlabelled, &self.unlabelled_histograms),
        ] {
            w.write_record([head[0], head[1], &n, flavor, "count", "", &total.to_string()]).unwrap();
            for (name, h) in hists {
                for (k, c) in h {
                    w.write_record([head[0], head[1], &n, flavor, name, &k.to_string(), &c.to_string()]).unwrap();
                }
            }
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CensusError {
    #[error("census of {class} supports n <= {max}, got {n}")]
    OutOfRange { class: ClassName, n: usize, max: usize },
}

pub const PARAMETERS: [&str; 4] = ["edges", "blocks", "cutvertices", "rootdegree"];

#[derive(Default, Clone)]
struct Partial {
    labelled: u64,
    unlabelled: u64,
    hist: [Histogram; 4],
    uhist: [Histogram; 4],
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.labelled += other.labelled;
        self.unlabelled += other.unlabelled;
        for (a, b) in self.hist.iter_mut().chain(self.uhist.iter_mut()).zip(other.hist.into_iter().chain(other.uhist)) {
            for (k, c) in b {
                *a.entry(k).or_default() += c;
            }
        }
        self
    }
}

/// Calls `f` on every mask below `2^bits` with at most `max_ones` set
/// bits whose bits at and above `low` equal `prefix`.
fn for_masks_with_prefix(prefix: u32, low: u32, max_ones: u32, mut f: impl FnMut(u32)) {
    let used = prefix.count_ones();
    if used > max_ones {
        return;
    }
    let room = (max_ones - used).min(low);
    let high = prefix << low;
    for k in 0..=room {
        if k == 0 {
            f(high);
            continue;
        }
        // Gosper's hack over k-subsets of the low bits
        let mut m: u64 = (1u64 << k) - 1;
        while m < 1u64 << low {
            f(high | m as u32);
            let c = m & m.wrapping_neg();
            let r = m + c;
            m = (((r ^ m) >> 2) / c) | r;
        }
    }
}

/// Enumerates `class` on `n` labelled vertices.  Edge subsets are split by
/// their top bits for parallel work; totals are exact sums, so the result
/// does not depend on the split.
pub fn enumerate(class: ClassName, n: usize, connectivity: Connectivity) -> Result<CensusRow, CensusError> {
    let max = class.max_order();
    if n > max.min(MAX_N) {
        return Err(CensusError::OutOfRange { class, n, max });
    }
    let bits = pair_count(n) as u32;
    let high_bits = bits.saturating_sub(12).min(8);
    let low = bits - high_bits;
    let max_ones = class.max_edges(n) as u32;
    let fixed = usize::from(connectivity == Connectivity::Rooted);
    let total = (0..1u32 << high_bits)
        .into_par_iter()
        .map(|prefix| {
            let mut p = Partial::default();
            for_masks_with_prefix(prefix, low, max_ones, |mask| {
                let g = SmallGraph::new(n, mask);
                if !connectivity.admits(&g) || !class.contains(&g) {
                    return;
                }
                p.labelled += 1;
                let canon = is_canonical_fixing(&g, fixed);
                p.unlabelled += u64::from(canon);
                let bd = blocks_any(&g);
                let vals = [
                    g.edge_count(),
                    bd.block_count() as u32,
                    bd.cut_vertex_count(),
                    if n > 0 { g.degree(0) } else { 0 },
                ];
                for (i, v) in vals.into_iter().enumerate() {
                    *p.hist[i].entry(v).or_default() += 1;
                    if canon {
                        *p.uhist[i].entry(v).or_default() += 1;
                    }
                }
            });
            p
        })
        .reduce(Partial::default, Partial::merge);
    let scale = if connectivity == Connectivity::Rooted { n as u64 } else { 1 };
    let histograms = PARAMETERS
        .iter()
        .zip(total.hist)
        .map(|(name, h)| (name.to_string(), h.into_iter().map(|(k, c)| (k, c * scale)).collect()))
        .collect();
    let unlabelled_histograms = PARAMETERS.iter().zip(total.uhist).map(|(name, h)| (name.to_string(), h)).collect();
    Ok(CensusRow {
        class,
        connectivity,
        n,
        labelled: total.labelled * scale,
        unlabelled: total.unlabelled,
        histograms,
        unlabelled_histograms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(c: ClassName, n: usize, k: Connectivity) -> (u64, u64) {
        let r = enumerate(c, n, k).unwrap();
        (r.labelled, r.unlabelled)
    }

    #[test]
    fn trees_and_forests() {
        assert_eq!(counts(ClassName::Trees, 4, Connectivity::Connected), (16, 2));
        assert_eq!(counts(ClassName::Trees, 5, Connectivity::Connected), (125, 3));
        assert_eq!(counts(ClassName::Trees, 4, Connectivity::All).0, 38);
        assert_eq!(counts(ClassName::Trees, 5, Connectivity::Rooted), (625, 9));
        assert_eq!(counts(ClassName::Trees, 1, Connectivity::Connected), (1, 1));
    }

    #[test]
    fn small_connected_counts() {
        assert_eq!(counts(ClassName::Sp, 4, Connectivity::Connected).1, 5);
        assert_eq!(counts(ClassName::Cacti, 4, Connectivity::Connected).1, 4);
        assert_eq!(counts(ClassName::Outerplanar, 4, Connectivity::Connected).1, 5);
        // K2,3 with or without the edge joining its two hubs
        let sp = counts(ClassName::Sp, 5, Connectivity::Biconnected).1;
        let op = counts(ClassName::Outerplanar, 5, Connectivity::Biconnected).1;
        assert_eq!(sp - op, 2);
    }

    #[test]
    fn class_inclusions() {
        for n in 1..=6 {
            let c = counts(ClassName::Cacti, n, Connectivity::Connected);
            let o = counts(ClassName::Outerplanar, n, Connectivity::Connected);
            let s = counts(ClassName::Sp, n, Connectivity::Connected);
            assert!(c.0 <= o.0 && o.0 <= s.0 && c.1 <= o.1 && o.1 <= s.1, "n = {n}");
        }
    }

    #[test]
    fn histograms_sum_to_count() {
        for k in [Connectivity::All, Connectivity::Connected, Connectivity::Rooted] {
            let r = enumerate(ClassName::Cacti, 5, k).unwrap();
            for name in PARAMETERS {
                let s: u64 = r.histogram(name).unwrap().values().sum();
                assert_eq!(s, r.labelled, "{name} {k}");
                let s: u64 = r.unlabelled_histograms[name].values().sum();
                assert_eq!(s, r.unlabelled, "{name} {k}");
            }
        }
    }

    #[test]
    fn tree_edges_are_deterministic() {
        let r = enumerate(ClassName::Trees, 6, Connectivity::Connected).unwrap();
        assert_eq!(r.mean("edges"), Some(5.0));
        assert_eq!(r.mean("blocks"), Some(5.0));
    }

    #[test]
    fn csv_and_json_render() {
        let r = enumerate(ClassName::Trees, 3, Connectivity::Connected).unwrap();
        let csv = r.to_csv();
        assert!(csv.starts_with("class,connectivity,n,flavor,parameter,value,count\n"));
        assert!(csv.contains("trees,connected,3,labelled,count,,3\n"));
        assert!(csv.contains("trees,connected,3,unlabelled,edges,2,1\n"));
        let back: CensusRow = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn out_of_range() {
        assert!(enumerate(ClassName::Sp, 8, Connectivity::Connected).is_err());
    }
}
