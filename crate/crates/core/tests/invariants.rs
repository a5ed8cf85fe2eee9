use charsums::arith::primes_in;
use charsums::characters;
use charsums::experiments::config::HRule;
use charsums::experiments::emit::csv_string;
use charsums::experiments::{run_theorem3, run_theorem4, ScenarioConfig};
use charsums::kernel::{variance_deficit_with_alpha, DirichletKernel};
use charsums::polya::{build_series, grid_size_for, series_distribution, truncation, SeriesFlavor};
use charsums::short_sums::sliding_sums;
use charsums::CharacterGroup;
use num_complex::Complex;
use proptest::prelude::*;

fn small_primes() -> Vec<u64> {
    primes_in(37, 700).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kernel_closed_form_matches_direct_sum(pi in 0usize..100, a in 1u64..1000, hf in 0.02f64..0.3, delta in 0.05f64..1.0) {
        let primes = small_primes();
        let q = primes[pi % primes.len()];
        let h = ((hf * q as f64) as u64).max(1);
        let group = CharacterGroup::for_prime(q).unwrap();
        let chi = group.character(1 + a % (q - 2)).unwrap();
        if let Ok(k) = DirichletKernel::new(&chi, h, delta) {
            for x in 0..q as i64 {
                prop_assert!((k.direct(x) - k.closed(x)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn mean_square_of_window_sums(pi in 0usize..100, a in 1u64..1000, hf in 0.0f64..1.0) {
        let primes = small_primes();
        let q = primes[pi % primes.len()];
        let h = 1 + ((q - 2) as f64 * hf) as u64;
        let chi = CharacterGroup::for_prime(q).unwrap().character(1 + a % (q - 2)).unwrap();
        let s = sliding_sums(&chi, h).unwrap();
        let m = s.iter().map(|z| z.norm_sqr()).sum::<f64>() / q as f64;
        let hh = h as f64;
        prop_assert!((m - (hh - hh * hh / q as f64)).abs() <= 1e-9 * hh);
        // With α = 0 the deficit is the same identity divided by H.
        if 3 * h <= q {
            let d = variance_deficit_with_alpha(&chi, h, 0.5, Complex::new(0.0, 0.0)).unwrap();
            prop_assert!((d - (1.0 - hh / q as f64)).abs() < 1e-9);
        }
    }

    #[test]
    fn grid_second_moment_is_parseval(pi in 0usize..100, a in 1u64..1000, ratio in 3.0f64..12.0) {
        let primes = small_primes();
        let q = primes[pi % primes.len()];
        let h = ((q as f64 / ratio) as u64).max(1);
        let chi = CharacterGroup::for_prime(q).unwrap().character(1 + a % (q - 2)).unwrap();
        let flavor = SeriesFlavor::for_parity(chi.parity());
        let series = build_series(&chi, h, flavor).unwrap();
        let dist = series_distribution(&series, grid_size_for(2, series.kmax)).unwrap();
        prop_assert!((dist.second_moment() - series.mean_square()).abs() < 1e-9);
    }
}

#[test]
fn theorem3_report_invariants() {
    let mut cfg = ScenarioConfig::default();
    cfg.theorem3.q = 2003;
    cfg.theorem3.h = HRule::Ratio { value: 8.0 };
    cfg.theorem3.max_order = 6;
    cfg.theorem3.sweep_count = 0;
    let r = run_theorem3(&cfg).unwrap();
    let moments = r.moments.unwrap();
    // sliding, cosine and sine, orders 0..=6
    assert_eq!(moments.len(), 3 * 7);
    assert_eq!(csv_string(&moments).unwrap().lines().count(), 1 + moments.len());
    assert!(moments.iter().all(|m| m.discrepancy >= 0.0));
    // The grid must exceed order × degree for the quadrature to be exact.
    let degree = truncation(2003, moments[0].h) - 1;
    for m in moments.iter().filter(|m| m.source != "sliding") {
        assert!(m.nodes > 6 * degree);
    }
    for row in r.polya.unwrap() {
        assert!(row.max_error < 1e-9, "{row:?}");
    }
}

#[test]
fn theorem4_zero_pair_and_row_count() {
    let mut cfg = ScenarioConfig::default();
    cfg.theorem4.pairs = vec![(0, 0), (1, 0)];
    let rows = run_theorem4(&cfg).unwrap().bridge.unwrap();
    assert_eq!(rows.len(), 2 * 2);
    for r in &rows {
        if (r.j, r.k) == (0, 0) {
            assert_eq!((r.character_average, r.rmf_exact), (0.0, 0.0));
        }
        assert!(r.difference < 1e-9 && r.orthogonality_exact);
    }
}

#[test]
fn single_precision_instantiation_tracks_f64() {
    let g32 = characters::CharacterGroup::<f32>::for_prime(1009).unwrap();
    let g64 = CharacterGroup::for_prime(1009).unwrap();
    let (c32, c64) = (g32.character(17).unwrap(), g64.character(17).unwrap());
    for n in 1..200i64 {
        let (a, b) = (c32.value(n), c64.value(n));
        assert!((a.re as f64 - b.re).abs() < 1e-5 && (a.im as f64 - b.im).abs() < 1e-5);
    }
    let s32 = sliding_sums(&c32, 50).unwrap();
    let s64 = sliding_sums(&c64, 50).unwrap();
    let worst = s32.iter().zip(&s64).map(|(a, b)| ((a.re as f64 - b.re).abs()).max((a.im as f64 - b.im).abs())).fold(0.0, f64::max);
    assert!(worst < 1e-3, "{worst}");
}
