use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<usize>,
    /// Values outside `[lo, hi]`, counted in the nearest edge bin.
    pub clamped: usize,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn edges(&self, bin: usize) -> (f64, f64) {
        let w = (self.hi - self.lo) / self.bins() as f64;
        let lo = self.lo + w * bin as f64;
        let hi = if bin + 1 == self.bins() { self.hi } else { self.lo + w * (bin + 1) as f64 };
        (lo, hi)
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Equal-width bins over `[lo, hi]`; `hi` itself lands in the last bin.
pub fn histogram(values: &[f64], bins: usize, lo: f64, hi: f64) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if bins == 0 {
        return Err(Error::InvalidArgument("bins must be >= 1".into()));
    }
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!("bad histogram range [{lo}, {hi}]")));
    }
    let mut counts = vec![0; bins];
    let mut clamped = 0;
    let width = (hi - lo) / bins as f64;
    for &v in values {
        if v.is_nan() {
            return Err(Error::NonFinite);
        }
        let bin = if v < lo {
            clamped += 1;
            0
        } else if v > hi {
            clamped += 1;
            bins - 1
        } else {
            (((v - lo) / width).floor() as usize).min(bins - 1)
        };
        counts[bin] += 1;
    }
    Ok(Histogram {
        lo,
        hi,
        counts,
        clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn small_example() {
        let h = histogram(&[0.05, 0.15, 0.95], 10, 0.0, 1.0).unwrap();
        assert_eq!(h.counts, vec![1, 1, 0, 0, 0, 0, 0, 0, 0, 1]);
        assert_eq!(h.clamped, 0);
    }

    #[test]
    fn upper_edge_in_last_bin() {
        let h = histogram(&[1.0], 10, 0.0, 1.0).unwrap();
        assert_eq!(h.counts[9], 1);
    }

    #[test]
    fn clamping_reported() {
        let h = histogram(&[-0.5, 0.5, 1.5], 4, 0.0, 1.0).unwrap();
        assert_eq!(h.counts, vec![1, 0, 1, 1]);
        assert_eq!(h.clamped, 2);
        assert_eq!(h.total(), 3);
    }

    #[test]
    fn uniform_within_binomial_band() {
        let mut rng = Rng::new(11);
        let v: Vec<f64> = (0..1000).map(|_| rng.uniform()).collect();
        let h = histogram(&v, 10, 0.0, 1.0).unwrap();
        assert!(h.counts.iter().all(|&c| (60..=140).contains(&c)), "{:?}", h.counts);
    }

    #[test]
    fn errors() {
        assert!(histogram(&[], 3, 0.0, 1.0).is_err());
        assert!(histogram(&[0.1], 0, 0.0, 1.0).is_err());
        assert!(histogram(&[0.1], 3, 1.0, 1.0).is_err());
    }
}
