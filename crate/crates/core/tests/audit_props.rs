use fairprep::audit::{bias_score_from, bias_table, group_stats, histogram};
use proptest::prelude::*;

fn sample() -> impl Strategy<Value = (Vec<f64>, Vec<String>)> {
    prop::collection::vec((-10f64..10.0, prop::bool::ANY), 4..80)
        .prop_filter("both groups present", |v| {
            v.iter().filter(|(_, g)| *g).count() >= 2 && v.iter().filter(|(_, g)| !*g).count() >= 2
        })
        .prop_map(|v| {
            let (e, g): (Vec<f64>, Vec<bool>) = v.into_iter().unzip();
            (e, g.into_iter().map(|g| if g { "A".into() } else { "B".into() }).collect())
        })
}

fn score(e: &[f64], g: &[String]) -> f64 {
    let strata = vec!["all".to_string(); e.len()];
    let t = bias_table(&group_stats(e, g, &strata).unwrap(), Some(("A", "B"))).unwrap();
    t.rows[0].bias_score.value()
}

proptest! {
    #[test]
    fn invariant_to_affine_maps((e, g) in sample(), a in 0.01f64..100.0, b in -100f64..100.0, flip in prop::bool::ANY) {
        let s0 = score(&e, &g);
        let a = if flip { -a } else { a };
        let mapped: Vec<f64> = e.iter().map(|x| a * x + b).collect();
        let s1 = score(&mapped, &g);
        if s0.is_finite() {
            prop_assert!((s0 - s1).abs() <= 1e-6 * s0.max(1.0), "{s0} vs {s1}");
        } else {
            prop_assert!(s1.is_infinite());
        }
    }

    #[test]
    fn symmetric_in_groups((e, g) in sample()) {
        let strata = vec!["all".to_string(); e.len()];
        let stats = group_stats(&e, &g, &strata).unwrap();
        let ab = bias_table(&stats, Some(("A", "B"))).unwrap().rows[0].bias_score;
        let ba = bias_table(&stats, Some(("B", "A"))).unwrap().rows[0].bias_score;
        prop_assert_eq!(ab, ba);
        prop_assert!(ab.value() >= 0.0);
    }

    #[test]
    fn stats_match_direct_formulas((e, g) in sample()) {
        let strata = vec!["all".to_string(); e.len()];
        for s in group_stats(&e, &g, &strata).unwrap() {
            let v: Vec<f64> = e.iter().zip(&g).filter(|(_, x)| **x == s.group).map(|(e, _)| *e).collect();
            let n = v.len() as f64;
            let mu = v.iter().sum::<f64>() / n;
            let var = v.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / n;
            prop_assert_eq!(s.n, v.len());
            prop_assert!((s.mu - mu).abs() < 1e-9);
            prop_assert!((s.sigma - var.sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn identical_distributions_score_zero(v in prop::collection::vec(-5f64..5.0, 1..40)) {
        let e: Vec<f64> = v.iter().chain(&v).copied().collect();
        let g: Vec<String> = (0..e.len()).map(|i| if i < v.len() { "A".into() } else { "B".into() }).collect();
        prop_assert_eq!(score(&e, &g), 0.0);
    }

    #[test]
    fn histogram_conserves_count(v in prop::collection::vec(-2f64..3.0, 1..300), bins in 1usize..40) {
        let h = histogram(&v, bins, 0.0, 1.0).unwrap();
        prop_assert_eq!(h.total(), v.len());
        prop_assert_eq!(h.bins(), bins);
        let outside = v.iter().filter(|x| !(0.0..=1.0).contains(*x)).count();
        prop_assert_eq!(h.clamped, outside);
    }
}

#[test]
fn zero_spread_cases() {
    assert_eq!(bias_score_from(0.4, 0.4, 0.0, 0.0).value(), 0.0);
    assert!(bias_score_from(0.5, 0.4, 0.0, 0.0).is_infinite());
    assert!((bias_score_from(0.7, 0.4, 0.1, 0.2).value() - 2.0).abs() < 1e-12);
}
