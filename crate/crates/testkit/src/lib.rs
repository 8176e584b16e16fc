//! Brute-force reference implementations used to cross-check the main crates.
//!
//! Everything here is written from the metric definitions directly, with no
//! code shared with `selfcal-core`. The ECE oracle groups predictions by
//! sorting them against explicit bin edges instead of floor-assigning bin
//! indices, so the two implementations only agree if both read the
//! definitions the same way.

/// Majority element of a slice by exhaustive max-count scan.
///
/// Ties are broken in favor of the element whose first occurrence comes
/// earliest. Returns `None` on an empty slice.
pub fn oracle_mode<T: PartialEq>(items: &[T]) -> Option<&T> {
    let mut best: Option<(&T, usize)> = None;
    for (i, item) in items.iter().enumerate() {
        // Skip items we've already counted at an earlier index.
        if items[..i].contains(item) {
            continue;
        }
        let count = items.iter().filter(|x| *x == item).count();
        match best {
            Some((_, best_count)) if count <= best_count => {}
            _ => best = Some((item, count)),
        }
    }
    best.map(|(item, _)| item)
}

/// Expected calibration error by sort-then-group over explicit bin edges.
///
/// Bin `m` holds confidences in `[m/M, (m+1)/M)`, with the last bin closed
/// at 1.0. Empty bins contribute nothing.
pub fn oracle_ece(preds: &[(f64, bool)], bins: usize) -> f64 {
    assert!(!preds.is_empty(), "oracle_ece: empty prediction list");
    assert!(bins >= 1, "oracle_ece: need at least one bin");

    let mut sorted: Vec<(f64, bool)> = preds.to_vec();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("non-finite confidence"));

    let n = sorted.len() as f64;
    let mut ece = 0.0;
    let mut cursor = 0;
    for m in 0..bins {
        let upper = (m + 1) as f64 / bins as f64;
        let start = cursor;
        while cursor < sorted.len() {
            let conf = sorted[cursor].0;
            let in_bin = if m + 1 == bins { conf <= 1.0 } else { conf < upper };
            if !in_bin {
                break;
            }
            cursor += 1;
        }
        let group = &sorted[start..cursor];
        if group.is_empty() {
            continue;
        }
        let count = group.len() as f64;
        let acc = group.iter().filter(|(_, c)| *c).count() as f64 / count;
        let conf = group.iter().map(|(p, _)| p).sum::<f64>() / count;
        ece += count / n * (acc - conf).abs();
    }
    ece
}

/// Brier score: mean squared gap between confidence and the 0/1 outcome.
pub fn oracle_brier(preds: &[(f64, bool)]) -> f64 {
    assert!(!preds.is_empty(), "oracle_brier: empty prediction list");
    let mut total = 0.0;
    for &(conf, correct) in preds {
        let outcome = if correct { 1.0 } else { 0.0 };
        total += (conf - outcome) * (conf - outcome);
    }
    total / preds.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_majority() {
        assert_eq!(oracle_mode(&["a", "b", "a"]), Some(&"a"));
    }

    #[test]
    fn mode_tie_prefers_first_occurrence() {
        assert_eq!(oracle_mode(&["a", "b"]), Some(&"a"));
        assert_eq!(oracle_mode(&["b", "a", "a", "b"]), Some(&"b"));
    }

    #[test]
    fn mode_empty() {
        assert_eq!(oracle_mode::<u8>(&[]), None);
    }

    #[test]
    fn ece_single_bin_collapses_to_gap() {
        let preds = vec![(0.2, true), (0.9, false), (0.4, true)];
        let acc = 2.0 / 3.0;
        let conf = (0.2 + 0.9 + 0.4) / 3.0;
        let ece = oracle_ece(&preds, 1);
        assert!((ece - (acc - conf).abs()).abs() < 1e-15);
    }

    #[test]
    fn ece_two_bin_hand_value() {
        let mut preds = vec![(0.95, true); 5];
        preds.extend(vec![(0.55, false); 5]);
        let ece = oracle_ece(&preds, 10);
        assert!((ece - 0.3).abs() < 1e-12, "got {ece}");
    }

    #[test]
    fn brier_hand_value() {
        let preds = vec![(0.9, true), (0.2, false)];
        assert!((oracle_brier(&preds) - 0.025).abs() < 1e-12);
    }
}
