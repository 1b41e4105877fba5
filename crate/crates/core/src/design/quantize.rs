//! Probabilistic rounding of a design to integer sample counts.

use rand::Rng;

use crate::estimation::Design;
use crate::signal::SampleSet;

/// `Mη_i` within this distance of an integer is treated as that integer.
const SNAP: f64 = 1e-9;

/// Rounds `Mη` to counts summing to `M` with `E[m_i] = Mη_i`.
///
/// Every vertex first receives `⌊Mη_i⌋`. The `R` leftover samples go to
/// distinct vertices chosen by systematic sampling over the fractional parts
/// in vertex order: one uniform offset `u`, points `u, u+1, …, u+R−1`, and
/// vertex `i` takes the points falling in its slice of the cumulative sum.
/// Vertex `i` is therefore selected with probability equal to its fractional
/// part.
pub fn quantize_design<R: Rng + ?Sized>(design: &Design, rng: &mut R) -> SampleSet {
    let m = design.budget();
    let scaled: Vec<f64> = design
        .eta()
        .iter()
        .map(|&x| {
            let y = x * m as f64;
            if (y - y.round()).abs() < SNAP {
                y.round()
            } else {
                y
            }
        })
        .collect();
    let mut counts: Vec<usize> = scaled.iter().map(|y| y.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let remaining = m.saturating_sub(assigned);
    if remaining == 0 {
        return SampleSet::new(counts);
    }
    let fractions: Vec<f64> = scaled.iter().map(|y| y - y.floor()).collect();
    let total: f64 = fractions.iter().sum();
    let scale = remaining as f64 / total;
    let offset: f64 = rng.random();
    let mut lo = 0.0;
    let last_positive = fractions.iter().rposition(|&f| f > 0.0);
    for (i, f) in fractions.iter().enumerate() {
        if *f <= 0.0 {
            continue;
        }
        let hi = if Some(i) == last_positive {
            remaining as f64
        } else {
            lo + f * scale
        };
        // number of integers k with lo <= offset + k < hi
        let hits = (hi - offset).ceil() - (lo - offset).ceil();
        counts[i] += hits.max(0.0) as usize;
        lo = hi;
    }
    debug_assert_eq!(counts.iter().sum::<usize>(), m);
    SampleSet::new(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use nalgebra::DVector;
    use proptest::prelude::*;

    #[test]
    fn exact_multiples_are_deterministic() {
        let d = Design::uniform(5, 10);
        assert_eq!(quantize_design(&d, &mut seeded(1)).counts(), &[2, 2, 2, 2, 2]);
        let d = Design::new(DVector::from_vec(vec![0.25, 0.75]), 4).unwrap();
        assert_eq!(quantize_design(&d, &mut seeded(1)).counts(), &[1, 3]);
    }

    #[test]
    fn leftover_samples_go_to_distinct_vertices() {
        let d = Design::uniform(64, 10);
        for seed in 0..50 {
            let s = quantize_design(&d, &mut seeded(seed));
            assert_eq!(s.budget(), 10);
            assert!(s.counts().iter().all(|&c| c <= 1));
        }
    }

    proptest! {
        #[test]
        fn counts_sum_to_budget(
            raw in proptest::collection::vec(0.0f64..1.0, 1..40),
            budget in 0usize..60,
            seed in any::<u64>(),
        ) {
            let total: f64 = raw.iter().sum();
            prop_assume!(total > 1e-6);
            let eta = DVector::from_vec(raw.iter().map(|x| x / total).collect());
            prop_assume!((eta.sum() - 1.0).abs() <= 1e-12);
            let d = Design::new(eta.clone(), budget).unwrap();
            let s = quantize_design(&d, &mut seeded(seed));
            prop_assert_eq!(s.budget(), budget);
            for (c, e) in s.counts().iter().zip(eta.iter()) {
                let target = e * budget as f64;
                prop_assert!((*c as f64) >= target.floor());
                prop_assert!((*c as f64) <= target.ceil() + 1e-9);
            }
        }
    }
}
