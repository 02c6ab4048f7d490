use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub group: String,
    pub stratum: String,
    pub n: usize,
    pub mu: f64,
    /// Population standard deviation.
    pub sigma: f64,
}

/// One `GroupStats` per (group, stratum) pair, ordered by stratum then
/// group (first-appearance order for both). Every group must occur in every
/// stratum.
pub fn group_stats(estimates: &[f64], groups: &[String], strata: &[String]) -> Result<Vec<GroupStats>> {
    if estimates.len() != groups.len() || estimates.len() != strata.len() {
        return Err(Error::Dimension(format!(
            "{} estimates, {} group labels, {} stratum labels",
            estimates.len(),
            groups.len(),
            strata.len()
        )));
    }
    if estimates.is_empty() {
        return Err(Error::EmptyInput);
    }
    if estimates.iter().any(|e| !e.is_finite()) {
        return Err(Error::NonFinite);
    }
    let group_order = first_appearance(groups);
    let stratum_order = first_appearance(strata);
    let mut cells: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    for ((e, g), s) in estimates.iter().zip(groups).zip(strata) {
        let gi = group_order.iter().position(|x| x == g).expect("seen");
        let si = stratum_order.iter().position(|x| x == s).expect("seen");
        cells.entry((si, gi)).or_default().push(*e);
    }
    let mut out = Vec::new();
    for (si, s) in stratum_order.iter().enumerate() {
        for (gi, g) in group_order.iter().enumerate() {
            let v = cells.get(&(si, gi)).ok_or_else(|| Error::EmptyCell {
                group: g.clone(),
                stratum: s.clone(),
            })?;
            let (mu, sigma) = mean_std(v);
            out.push(GroupStats {
                group: g.clone(),
                stratum: s.clone(),
                n: v.len(),
                mu,
                sigma,
            });
        }
    }
    Ok(out)
}

fn first_appearance(labels: &[String]) -> Vec<String> {
    let mut seen: Vec<String> = Vec::new();
    for l in labels {
        if !seen.contains(l) {
            seen.push(l.clone());
        }
    }
    seen
}

pub(crate) fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mu = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / n;
    (mu, var.sqrt())
}

/// A bias score; `+∞` when both groups have zero spread but different
/// means. Serialized as a number, or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BiasScore(pub f64);

impl BiasScore {
    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for BiasScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else if let Some(p) = f.precision() {
            write!(f, "{:.*}", p, self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for BiasScore {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for BiasScore {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) if x >= 0.0 && x.is_finite() => Ok(BiasScore(x)),
            Raw::Text(t) if t == "inf" => Ok(BiasScore(f64::INFINITY)),
            _ => Err(serde::de::Error::custom("bias score must be a number >= 0 or \"inf\"")),
        }
    }
}

pub fn bias_score_from(mu_a: f64, mu_b: f64, sigma_a: f64, sigma_b: f64) -> BiasScore {
    let diff = (mu_a - mu_b).abs();
    let avg = (sigma_a + sigma_b) / 2.0;
    if avg == 0.0 {
        return BiasScore(if diff == 0.0 { 0.0 } else { f64::INFINITY });
    }
    BiasScore(diff / avg)
}

pub fn bias_score(a: &GroupStats, b: &GroupStats) -> Result<BiasScore> {
    if a.stratum != b.stratum {
        return Err(Error::InvalidArgument(format!(
            "groups come from different strata (`{}`, `{}`)",
            a.stratum, b.stratum
        )));
    }
    if a.group == b.group {
        return Err(Error::TooFewGroups);
    }
    Ok(bias_score_from(a.mu, b.mu, a.sigma, b.sigma))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasRow {
    pub stratum: String,
    pub n_a: usize,
    pub n_b: usize,
    pub mu_a: f64,
    pub mu_b: f64,
    pub mu_diff: f64,
    pub sigma_a: f64,
    pub sigma_b: f64,
    pub sigma_avg: f64,
    pub bias_score: BiasScore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasTable {
    pub group_a: String,
    pub group_b: String,
    pub rows: Vec<BiasRow>,
}

impl BiasTable {
    pub fn row(&self, stratum: &str) -> Option<&BiasRow> {
        self.rows.iter().find(|r| r.stratum == stratum)
    }

    pub fn scores(&self) -> Vec<(String, BiasScore)> {
        self.rows.iter().map(|r| (r.stratum.clone(), r.bias_score)).collect()
    }
}

/// Two-group table from per-cell stats. `contrast` picks the two groups
/// when more than two are present.
pub fn bias_table(stats: &[GroupStats], contrast: Option<(&str, &str)>) -> Result<BiasTable> {
    let groups = first_appearance(&stats.iter().map(|s| s.group.clone()).collect::<Vec<_>>());
    let (a, b) = match contrast {
        Some((a, b)) => {
            for g in [a, b] {
                if !groups.iter().any(|x| x == g) {
                    return Err(Error::InvalidArgument(format!("contrast group `{g}` not present")));
                }
            }
            if a == b {
                return Err(Error::TooFewGroups);
            }
            (a.to_string(), b.to_string())
        }
        None => match groups.len() {
            0 | 1 => return Err(Error::TooFewGroups),
            2 => (groups[0].clone(), groups[1].clone()),
            k => {
                return Err(Error::InvalidArgument(format!(
                    "{k} groups present; choose two to contrast"
                )))
            }
        },
    };
    let strata = first_appearance(&stats.iter().map(|s| s.stratum.clone()).collect::<Vec<_>>());
    let mut rows = Vec::with_capacity(strata.len());
    for s in strata {
        let find = |g: &str| {
            stats
                .iter()
                .find(|x| x.stratum == s && x.group == g)
                .ok_or_else(|| Error::EmptyCell {
                    group: g.to_string(),
                    stratum: s.clone(),
                })
        };
        let (sa, sb) = (find(&a)?, find(&b)?);
        rows.push(BiasRow {
            stratum: s.clone(),
            n_a: sa.n,
            n_b: sb.n,
            mu_a: sa.mu,
            mu_b: sb.mu,
            mu_diff: (sa.mu - sb.mu).abs(),
            sigma_a: sa.sigma,
            sigma_b: sb.sigma,
            sigma_avg: (sa.sigma + sb.sigma) / 2.0,
            bias_score: bias_score(sa, sb)?,
        });
    }
    Ok(BiasTable {
        group_a: a,
        group_b: b,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn constant_single_cell() {
        let st = group_stats(&[0.5; 4], &s(&["a"; 4]), &s(&["x"; 4])).unwrap();
        assert_eq!(st.len(), 1);
        assert_eq!((st[0].mu, st[0].sigma, st[0].n), (0.5, 0.0, 4));
    }

    #[test]
    fn two_groups_by_hand() {
        let st = group_stats(
            &[0.2, 0.4, 0.6, 0.8],
            &s(&["A", "A", "B", "B"]),
            &s(&["all"; 4]),
        )
        .unwrap();
        assert!((st[0].mu - 0.3).abs() < 1e-12 && (st[1].mu - 0.7).abs() < 1e-12);
        assert!((st[0].sigma - 0.1).abs() < 1e-12 && (st[1].sigma - 0.1).abs() < 1e-12);
        let t = bias_table(&st, None).unwrap();
        assert!((t.rows[0].bias_score.0 - 4.0).abs() < 1e-9);
    }

    #[test]
    fn empty_cell_and_length_errors() {
        let e = group_stats(&[1.0, 2.0], &s(&["A", "B"]), &s(&["x", "y"])).unwrap_err();
        assert!(matches!(e, Error::EmptyCell { .. }));
        assert!(group_stats(&[1.0], &s(&["A", "B"]), &s(&["x"])).is_err());
    }

    #[test]
    fn printed_scores() {
        assert!((bias_score_from(0.75, 0.44, 0.08, 0.06).0 - 4.43).abs() < 0.01);
        assert!((bias_score_from(0.51, 0.15, 0.17, 0.13).0 - 2.40).abs() < 0.01);
        assert_eq!(bias_score_from(0.3, 0.3, 0.1, 0.1).0, 0.0);
    }

    #[test]
    fn zero_spread_sentinel() {
        assert!(bias_score_from(0.2, 0.4, 0.0, 0.0).is_infinite());
        assert_eq!(bias_score_from(0.2, 0.2, 0.0, 0.0).0, 0.0);
        let json = serde_json::to_string(&BiasScore(f64::INFINITY)).unwrap();
        assert_eq!(json, "\"inf\"");
        let back: BiasScore = serde_json::from_str(&json).unwrap();
        assert!(back.is_infinite());
    }

    #[test]
    fn single_group_rejected() {
        let st = group_stats(&[0.1, 0.2], &s(&["A", "A"]), &s(&["x", "x"])).unwrap();
        assert!(matches!(bias_table(&st, None), Err(Error::TooFewGroups)));
    }

    #[test]
    fn contrast_picks_two_of_three() {
        let st = group_stats(
            &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
            &s(&["u", "u", "m", "m", "o", "o"]),
            &s(&["all"; 6]),
        )
        .unwrap();
        assert!(bias_table(&st, None).is_err());
        let t = bias_table(&st, Some(("u", "o"))).unwrap();
        assert_eq!((t.group_a.as_str(), t.group_b.as_str()), ("u", "o"));
        assert!((t.rows[0].mu_diff - 0.4).abs() < 1e-12);
    }
}
