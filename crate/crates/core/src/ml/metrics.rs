use crate::error::{Error, Result};

/// Fraction of `probs` that land on the right side of `threshold`
/// (`p >= threshold` predicts 1).
pub fn accuracy(probs: &[f64], labels: &[f64], threshold: f64) -> Result<f64> {
    if probs.len() != labels.len() {
        return Err(Error::Dimension(format!(
            "{} predictions, {} labels",
            probs.len(),
            labels.len()
        )));
    }
    if probs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let correct = probs
        .iter()
        .zip(labels)
        .filter(|(&p, &y)| (p >= threshold) == (y >= 0.5))
        .count();
    Ok(correct as f64 / probs.len() as f64)
}

/// `1 − SS_res / SS_tot`; may be negative.
pub fn r_squared(preds: &[f64], y: &[f64]) -> Result<f64> {
    if preds.len() != y.len() {
        return Err(Error::Dimension(format!(
            "{} predictions, {} targets",
            preds.len(),
            y.len()
        )));
    }
    if y.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    if ss_tot <= 0.0 {
        return Err(Error::InvalidArgument("R² undefined for constant targets".into()));
    }
    let ss_res: f64 = preds.iter().zip(y).map(|(p, v)| (v - p).powi(2)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// Area under the ROC curve via the Mann–Whitney statistic, with tied
/// scores given their average rank.
pub fn auc(scores: &[f64], positive: &[bool]) -> Result<f64> {
    if scores.len() != positive.len() {
        return Err(Error::Dimension(format!(
            "{} scores, {} labels",
            scores.len(),
            positive.len()
        )));
    }
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        // ranks are 1-based: i+1 ..= j+1
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            if positive[k] {
                rank_sum_pos += avg;
            }
        }
        i = j + 1;
    }
    let np = n_pos as f64;
    Ok((rank_sum_pos - np * (np + 1.0) / 2.0) / (np * n_neg as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[0.9, 0.1], &[1.0, 0.0], 0.5).unwrap(), 1.0);
        let a = accuracy(&[0.6, 0.4, 0.7], &[1.0, 0.0, 0.0], 0.5).unwrap();
        assert!((a - 2.0 / 3.0).abs() < 1e-15);
        assert!(accuracy(&[0.5], &[], 0.5).is_err());
    }

    #[test]
    fn r_squared_examples() {
        let y = [1.0, 2.0, 4.0];
        assert_eq!(r_squared(&y, &y).unwrap(), 1.0);
        let m = 7.0 / 3.0;
        assert!(r_squared(&[m; 3], &y).unwrap().abs() < 1e-15);
        assert!(r_squared(&[1.0, 1.0], &[2.0, 2.0]).is_err());
    }

    #[test]
    fn auc_examples() {
        assert_eq!(auc(&[0.1, 0.2, 0.8, 0.9], &[false, false, true, true]).unwrap(), 1.0);
        assert_eq!(auc(&[0.5; 4], &[false, true, false, true]).unwrap(), 0.5);
        // one inversion out of four pairs
        let a = auc(&[0.1, 0.6, 0.5, 0.9], &[false, false, true, true]).unwrap();
        assert!((a - 0.75).abs() < 1e-15);
    }
}
