use proptest::prelude::*;
use uoh_core::econometrics::*;
use uoh_core::indices::dynamic::{g_index, kendall_tau_b, SeasonPair, TopKWindow};
use uoh_core::indices::{pair_indices, seasonal_indices, IndexName};
use uoh_core::league::{LeagueSeason, Levels, TeamSeasonRecord};
use uoh_core::linalg::{Matrix, Vector};
use uoh_core::replicate::Sequential;
use uoh_core::sim::{simulate_league, LeagueParams};
use uoh_core::stats;

/// Season from a double round robin: `outcomes[g]` is 0 home win, 1 draw,
/// 2 away win for the g-th ordered pair. Ranked by 2-1-0 points.
fn season_from(n: usize, outcomes: &[u8], names: &[String], season: i32) -> LeagueSeason {
    let mut tally = vec![(0u32, 0u32, 0u32); n];
    let mut g = 0;
    for h in 0..n {
        for a in 0..n {
            if h == a {
                continue;
            }
            match outcomes[g] % 3 {
                0 => {
                    tally[h].0 += 1;
                    tally[a].2 += 1;
                }
                1 => {
                    tally[h].1 += 1;
                    tally[a].1 += 1;
                }
                _ => {
                    tally[a].0 += 1;
                    tally[h].2 += 1;
                }
            }
            g += 1;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(2 * tally[i].0 + tally[i].1), i));
    let records = order
        .iter()
        .enumerate()
        .map(|(r, &i)| TeamSeasonRecord {
            team: names[i].clone(),
            rank: r as u32 + 1,
            wins: tally[i].0,
            draws: tally[i].1,
            losses: tally[i].2,
            points: 3 * tally[i].0 + tally[i].1,
        })
        .collect();
    let k = if n >= 8 { 3 } else { 1 };
    LeagueSeason::new("X", season, records, Levels { top: k, relegation: k }).unwrap()
}

fn league() -> impl Strategy<Value = (usize, Vec<u8>)> {
    (3usize..12).prop_flat_map(|n| (Just(n), proptest::collection::vec(0u8..3, n * (n - 1))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn seasonal_indices_lie_in_unit_interval((n, outcomes) in league()) {
        let names: Vec<String> = (0..n).map(|i| format!("T{i}")).collect();
        let s = season_from(n, &outcomes, &names, 2000);
        for v in seasonal_indices(&s).unwrap() {
            prop_assert!((0.0..=1.0).contains(&v.value), "{} = {}", v.name, v.value);
            prop_assert!(!v.flagged, "{} flagged", v.name);
        }
    }

    #[test]
    fn seasonal_indices_ignore_team_names((n, outcomes) in league()) {
        let a: Vec<String> = (0..n).map(|i| format!("T{i}")).collect();
        let b: Vec<String> = (0..n).map(|i| format!("Z{}", n - i)).collect();
        let x = seasonal_indices(&season_from(n, &outcomes, &a, 2000)).unwrap();
        let y = seasonal_indices(&season_from(n, &outcomes, &b, 2000)).unwrap();
        for (u, v) in x.iter().zip(&y) {
            prop_assert_eq!(u.value, v.value);
        }
    }

    #[test]
    fn dynamic_indices_lie_in_unit_interval(
        (n, o1) in league(),
        o2 in proptest::collection::vec(0u8..3, 132),
        newcomers in 0usize..3,
    ) {
        let prev_names: Vec<String> = (0..n).map(|i| format!("T{i}")).collect();
        let mut curr_names = prev_names.clone();
        for (j, name) in curr_names.iter_mut().take(newcomers.min(n - 2)).enumerate() {
            *name = format!("N{j}");
        }
        let prev = season_from(n, &o1, &prev_names, 2000);
        let mut curr = season_from(n, &o2[..n * (n - 1)], &curr_names, 2001);
        curr.set_promoted_from(&prev);
        let pair = SeasonPair::new(&prev, &curr).unwrap();
        let dynamic = pair_indices(&pair).unwrap();
        for v in &dynamic {
            prop_assert!((0.0..=1.0).contains(&v.value), "{} = {}", v.name, v.value);
        }
        // bi-dimensional values are midpoints
        let seasonal = seasonal_indices(&curr).unwrap();
        for b in [IndexName::Dc1, IndexName::AdcK, IndexName::DcI, IndexName::SdcKI] {
            let (sn, dn) = b.components().unwrap();
            let s = seasonal.iter().find(|v| v.name == sn).unwrap();
            let d = dynamic.iter().find(|v| v.name == dn).unwrap();
            let c = uoh_core::indices::combine_bidimensional(s, d).unwrap();
            prop_assert!((c.value - (s.value + d.value) / 2.0).abs() < 1e-15);
            prop_assert!((0.0..=1.0).contains(&c.value));
        }
    }

    #[test]
    fn kendall_tau_is_symmetric_and_bounded(x in proptest::collection::vec(0u8..5, 2..30), seed in 0u64..1000) {
        let xs: Vec<f64> = x.iter().map(|&v| v as f64).collect();
        let ys: Vec<f64> = xs.iter().enumerate().map(|(i, v)| ((i as u64 * 31 + seed) % 7) as f64 + v).collect();
        if let (Ok(a), Ok(b)) = (kendall_tau_b(&xs, &ys), kendall_tau_b(&ys, &xs)) {
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&a));
        }
    }

    #[test]
    fn fisher_is_monotone(ps in proptest::collection::vec(0.001f64..1.0, 1..12), j in 0usize..12, f in 0.05f64..0.95) {
        let j = j % ps.len();
        let a = fisher_panel_unit_root(&ps).unwrap();
        let mut lower = ps.clone();
        lower[j] *= f;
        let b = fisher_panel_unit_root(&lower).unwrap();
        prop_assert!(b.statistic > a.statistic);
        prop_assert!(b.p_value <= a.p_value);
        prop_assert!((0.0..=1.0).contains(&a.p_value));
    }

    #[test]
    fn reference_tails_are_monotone(x in 0.0f64..60.0, dx in 0.001f64..5.0, df in 1.0f64..40.0, df2 in 1.0f64..200.0) {
        for (p, q) in [
            (stats::chi2_sf(x, df), stats::chi2_sf(x + dx, df)),
            (stats::f_sf(x, df, df2), stats::f_sf(x + dx, df, df2)),
            (stats::t_two_sided(x, df2), stats::t_two_sided(x + dx, df2)),
            (stats::normal_two_sided(x), stats::normal_two_sided(x + dx)),
        ] {
            prop_assert!((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&q));
            prop_assert!(q <= p);
        }
    }

    #[test]
    fn jarque_bera_and_durbin_watson_ranges(e in proptest::collection::vec(-10.0f64..10.0, 8..60)) {
        prop_assume!(stats::variance(&e) > 1e-6);
        let jb = jarque_bera(&e).unwrap();
        prop_assert!(jb.statistic >= 0.0 && (0.0..=1.0).contains(&jb.p_value));
        let n = e.len();
        let d = DesignMatrix::single(Vector::from_vec(e), Matrix::from_element(n, 1, 1.0), vec!["c".into()]).unwrap();
        let fit = ols_fit(&d).unwrap();
        let dw = durbin_watson_panel(&fit).unwrap();
        prop_assert!((0.0..=4.0).contains(&dw.statistic));
        prop_assert!((0.0..=1.0).contains(&dw.p_value));
    }

    #[test]
    fn stacked_rows_are_lags_trimmed(lengths in proptest::collection::vec(6usize..20, 2..5), p in 1usize..4, seed in 0u64..50) {
        let mut params = uoh_core::sim::DgpParams::balanced(lengths.len(), 20);
        params.countries = lengths.iter().enumerate().map(|(i, l)| (format!("C{i}"), 2008 - *l as i32 + 1, 2008)).collect();
        params.seed = seed;
        let d = uoh_core::sim::simulate_dgp(&params).unwrap();
        let panel = uoh_core::panel::build_panel(&[], &d.observations, &Default::default()).unwrap();
        let mut spec = RegressionSpec::new(IndexName::SdcKI);
        spec.adl_order = p;
        let design = build_adl_design(&panel, &d.index, &spec).unwrap();
        prop_assert_eq!(design.nrows(), lengths.iter().map(|l| l - p).sum::<usize>());
    }
}

/// Expected distinct top-K teams under random rankings, in closed form:
/// a team appearing in seasons S is never in the top K with probability
/// prod over S of (1 - K / n_s).
fn exact_g_expectation(window: &TopKWindow) -> f64 {
    let mut miss: std::collections::BTreeMap<u32, f64> = Default::default();
    for roster in window.rosters() {
        let p = 1.0 - window.k as f64 / roster.len() as f64;
        for id in roster {
            *miss.entry(*id).or_insert(1.0) *= p;
        }
    }
    miss.values().map(|m| 1.0 - m).sum()
}

#[test]
fn g_expectation_matches_closed_form() {
    for (seed, relegated) in [(1u64, 0usize), (2, 3), (3, 2)] {
        let mut p = LeagueParams::new("X", 12, 6);
        p.relegated = relegated;
        p.seed = seed;
        let seasons = simulate_league(&p).unwrap();
        let window = TopKWindow::new(&seasons[1..], 3).unwrap();
        let g = g_index(&window, 20_000, seed, &Sequential).unwrap();
        let exact = exact_g_expectation(&window);
        assert!((g.expected - exact).abs() < 2.5 * g.mc_se, "{} vs {exact} (se {})", g.expected, g.mc_se);
        assert!((0.0..=1.0).contains(&g.value));
    }
}
