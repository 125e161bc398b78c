mod common;

use common::*;
use num_complex::Complex32;
use proptest::prelude::*;
use ris_admm::signal::{steering_vector, ArrayGeometry};
use ris_admm::spectrum::{
    hankel_matrix, hankel_rows, match_rmse, match_trial, music_doas, music_doas_with, pick_peaks, AngleGrid,
    PeakOptions,
};
use ris_admm::Error;

fn geometry(m: usize) -> ArrayGeometry<f64> {
    ArrayGeometry::half_wavelength(m).unwrap()
}

fn mixture(thetas: &[f64], amps: &[C], m: usize) -> Vec<C> {
    let mut x = vec![C::new(0.0, 0.0); m];
    for (&t, &a) in thetas.iter().zip(amps) {
        for (xi, si) in x.iter_mut().zip(steering_vector(t, &geometry(m)).unwrap()) {
            *xi += si * a;
        }
    }
    x
}

/// Angle of the largest `|a(θ)ᴴx|` on a 0.001° grid within `±1°` of `near`.
fn matched_filter(x: &[C], near: f64) -> f64 {
    let g = geometry(x.len());
    (0..=2000)
        .map(|i| near - 1.0 + 0.001 * i as f64)
        .map(|t| (steering_vector(t, &g).unwrap().iter().zip(x).map(|(a, x)| a.conj() * x).sum::<C>().norm(), t))
        .fold((f64::NEG_INFINITY, near), |best, cur| if cur.0 > best.0 { cur } else { best })
        .1
}

#[test]
fn two_sources_resolved_against_matched_filter() {
    let x = mixture(&[20.0, -35.0], &[C::new(1.0, 0.0), C::new(0.0, 1.0)], 64);
    let res = music_doas(&x, 2, &AngleGrid::music_default(), &geometry(64)).unwrap();
    assert!(!res.flagged);
    // Well separated, so each source's matched-filter peak sits on it.
    let oracle = [matched_filter(&x, -35.0), matched_filter(&x, 20.0)];
    assert!((oracle[0] + 35.0).abs() < 0.01 && (oracle[1] - 20.0).abs() < 0.01, "{oracle:?}");
    for (est, want) in res.sorted_peaks().iter().zip(oracle) {
        assert!((est - want).abs() <= 0.05, "{est} vs {want}");
    }
}

#[test]
fn off_grid_exponentials_are_refined_below_the_grid_step() {
    let truth = [-41.237, 3.3333, 27.91];
    let x = mixture(&truth, &[C::new(1.0, 0.0), C::new(0.6, 0.6), C::new(-0.8, 0.1)], 64);
    let res = music_doas(&x, 3, &AngleGrid::music_default(), &geometry(64)).unwrap();
    assert!(match_rmse(&res.peaks, &truth).unwrap() < 0.01);
    let coarse = music_doas_with(&x, 3, &AngleGrid::music_default(), &geometry(64), PeakOptions::on_grid()).unwrap();
    for p in &coarse.peaks {
        assert!((p / 0.05 - (p / 0.05).round()).abs() < 1e-9, "{p} not on grid");
    }
}

#[test]
fn single_exponential_peaks_at_its_angle() {
    let x = steering_vector(0.0, &geometry(16)).unwrap();
    let res = music_doas(&x, 1, &AngleGrid::music_default(), &geometry(16)).unwrap();
    assert!(res.peaks[0].abs() <= 0.05);
    assert_eq!(res.peaks.len(), 1);
}

#[test]
fn zero_input_is_flat_and_flagged() {
    let res = music_doas(&vec![C::new(0.0, 0.0); 8], 2, &AngleGrid::music_default(), &geometry(8)).unwrap();
    assert!(res.flagged);
    assert!(res.peaks.is_empty());
    assert!(res.values.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn music_argument_checks() {
    let x = vec![C::new(1.0, 0.0); 8];
    assert!(matches!(music_doas(&x, 5, &AngleGrid::music_default(), &geometry(8)), Err(Error::Parameter(_))));
    assert!(matches!(music_doas(&x, 1, &AngleGrid::music_default(), &geometry(9)), Err(Error::Dimension(_))));
    assert!(AngleGrid::new(10.0, -10.0, 1.0).is_err());
    assert!(AngleGrid::new(-91.0, 0.0, 1.0).is_err());
    assert_eq!(AngleGrid::<f64>::music_default().len(), 3601);
    assert_eq!(AngleGrid::<f64>::baseline_default().len(), 181);
}

#[test]
fn single_precision_music() {
    let g = ArrayGeometry::<f32>::half_wavelength(16).unwrap();
    let x: Vec<Complex32> = steering_vector(12.5f32, &g).unwrap();
    let grid = AngleGrid::new(-90.0f32, 90.0, 0.1).unwrap();
    let res = music_doas(&x, 1, &grid, &g).unwrap();
    assert!((res.peaks[0] - 12.5).abs() < 0.1, "{}", res.peaks[0]);
}

#[test]
fn hankel_entries_exhaustive() {
    let x = random_vector(&mut rng(20), 8);
    let h = hankel_matrix(&x, 4).unwrap();
    assert_eq!((h.rows(), h.cols()), (4, 5));
    for i in 0..4 {
        for j in 0..5 {
            assert_eq!(h[(i, j)], x[i + j]);
        }
    }
    assert!(hankel_matrix(&x, 9).is_err());
    assert_eq!(hankel_rows(64), 33);
    assert_eq!(hankel_rows(7), 4);
}

#[test]
fn rmse_examples() {
    assert_eq!(match_rmse(&[-10.0, 10.0], &[-10.0, 10.0]).unwrap(), 0.0);
    assert_eq!(match_rmse(&[3.0], &[0.0]).unwrap(), 3.0);
    let m = match_trial(&[9.0, -11.0], &[-10.0, 10.0]).unwrap();
    assert_eq!(m.assignment, vec![1, 0]);
    assert!((match_rmse(&[9.0f64, -11.0], &[-10.0, 10.0]).unwrap() - 1.0).abs() < 1e-12);
    assert!(matches!(match_rmse::<f64>(&[], &[]), Err(Error::Domain(_))));
}

fn brute_force_cost(est: &[f64], truth: &[f64]) -> f64 {
    fn rec(i: usize, est: &[f64], truth: &[f64], used: &mut Vec<bool>) -> f64 {
        if i == truth.len() {
            return 0.0;
        }
        let e = if i < est.len() { Some(est[i]) } else { None };
        let mut best = f64::INFINITY;
        for j in 0..truth.len() {
            if !used[j] {
                used[j] = true;
                let c = e.map_or(90.0 * 90.0, |e| (e - truth[j]).powi(2));
                best = best.min(c + rec(i + 1, est, truth, used));
                used[j] = false;
            }
        }
        best
    }
    rec(0, est, truth, &mut vec![false; truth.len()])
}

/// Above six targets the assignment switches to the Hungarian method.
#[test]
fn large_assignments_are_optimal() {
    let mut r = rng(21);
    for k in [7usize, 8] {
        for _ in 0..5 {
            let truth: Vec<f64> = (0..k).map(|_| rand::Rng::random_range(&mut r, -80.0..80.0)).collect();
            let est: Vec<f64> = (0..k - 1).map(|_| rand::Rng::random_range(&mut r, -80.0..80.0)).collect();
            let m = match_trial(&est, &truth).unwrap();
            assert!(m.padded);
            assert!((m.squared_error - brute_force_cost(&est, &truth)).abs() < 1e-9);
        }
    }
}

fn source_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<C>)> {
    (1usize..4).prop_flat_map(|k| {
        (
            proptest::collection::vec(-70.0f64..70.0, k),
            proptest::collection::vec((0.3f64..1.5, 0.0f64..6.28), k)
                .prop_map(|v| v.into_iter().map(|(a, p)| C::from_polar(a, p)).collect()),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn music_is_invariant_to_complex_scaling((thetas, amps) in source_strategy(), mag in 0.01f64..100.0, phase in 0.0f64..6.28) {
        let m = 24;
        let mut x = mixture(&thetas, &amps, m);
        let noise = random_vector(&mut rng((mag * 1e6) as u64), m);
        x.iter_mut().zip(noise).for_each(|(v, n)| *v += n * 0.05);
        let alpha = C::from_polar(mag, phase);
        let grid = AngleGrid::new(-90.0, 90.0, 0.1).unwrap();
        let k = thetas.len();
        let a = music_doas(&x, k, &grid, &geometry(m)).unwrap();
        let scaled: Vec<C> = x.iter().map(|v| v * alpha).collect();
        let b = music_doas(&scaled, k, &grid, &geometry(m)).unwrap();
        prop_assert_eq!(&a.peak_indices, &b.peak_indices);
        for (p, q) in a.peaks.iter().zip(&b.peaks) {
            prop_assert!((p - q).abs() <= 1e-9);
        }
    }

    #[test]
    fn pseudospectrum_is_positive_and_peaks_are_local_maxima((thetas, amps) in source_strategy()) {
        let x = mixture(&thetas, &amps, 16);
        let res = music_doas_with(&x, thetas.len(), &AngleGrid::new(-90.0, 90.0, 0.5).unwrap(), &geometry(16), PeakOptions::on_grid()).unwrap();
        prop_assert!(res.values.iter().all(|&v| v > 0.0 && v.is_finite()));
        for &i in &res.peak_indices {
            if i > 0 { prop_assert!(res.values[i] > res.values[i - 1]); }
            if i + 1 < res.values.len() { prop_assert!(res.values[i] >= res.values[i + 1]); }
        }
        let heights: Vec<f64> = res.peak_indices.iter().map(|&i| res.values[i]).collect();
        prop_assert!(heights.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rmse_is_symmetric_under_permutation(
        truth in proptest::collection::vec(-90.0f64..90.0, 1..7),
        seed in any::<u64>(),
        drop in 0usize..2,
    ) {
        let mut r = rng(seed);
        let mut est: Vec<f64> = truth.iter().map(|t| t + rand::Rng::random_range(&mut r, -5.0..5.0)).collect();
        est.truncate(truth.len() - drop.min(truth.len() - 1));
        let base = match_rmse(&est, &truth).unwrap();
        let mut shuffled = est.clone();
        rand::seq::SliceRandom::shuffle(shuffled.as_mut_slice(), &mut r);
        prop_assert!((match_rmse(&shuffled, &truth).unwrap() - base).abs() <= 1e-12);
        let expect = (brute_force_cost(&est, &truth) / truth.len() as f64).sqrt();
        prop_assert!((base - expect).abs() <= 1e-9);
    }

    #[test]
    fn picked_peaks_respect_spacing(values in proptest::collection::vec(0.0f64..1.0, 3..60), k in 1usize..6, d in 1usize..5) {
        let p = pick_peaks(&values, k, d);
        prop_assert!(p.len() <= k);
        for (i, a) in p.iter().enumerate() {
            for b in &p[i + 1..] {
                prop_assert!(a.abs_diff(*b) >= d);
            }
        }
    }
}
