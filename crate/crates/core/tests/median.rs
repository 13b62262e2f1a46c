use proptest::prelude::*;

use scrumsim::metrics::median;

#[test]
fn even_count_averages_central_pair() {
    assert_eq!(median(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 2.5);
    assert_eq!(median(&[1.0, 3.0, 2.0]).unwrap(), 2.0);
    assert_eq!(median(&[7.25; 30]).unwrap(), 7.25);
    assert!(median(&[]).is_err());
}

proptest! {
    #[test]
    fn permutation_invariant_and_bounded(
        (values, perm) in prop::collection::vec(-1e6f64..1e6, 1..60)
            .prop_flat_map(|v| {
                let n = v.len();
                (Just(v), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
            })
    ) {
        let shuffled: Vec<f64> = perm.iter().map(|&i| values[i]).collect();
        let a = median(&values).unwrap();
        let b = median(&shuffled).unwrap();
        prop_assert_eq!(a, b);
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo <= a && a <= hi);
    }
}
