//! Grid-based invariants tying the analytic modules to each other and
//! to independent brute-force oracles.

use mmm_core::erlang::{
    self, erlang_b_poisson, erlang_b_recurrence, erlang_c, phi_b, FastServerView, QueueSpec,
};
use mmm_core::morphing::{
    corrected_residence, morphing_error_bound, morphing_residence, CorrectionPolynomial,
};
use mmm_core::polyroots::{corrected_roots, morphing_roots};
use proptest::prelude::*;

/// Erlang B straight from the factorial sums. Only trustworthy for
/// small `m`, which is exactly why it exists: it shares no code with
/// the production algorithms.
fn erlang_b_bruteforce(m: u32, a: f64) -> f64 {
    let mut fact = 1.0_f64;
    let mut sum = 0.0_f64;
    let mut power = 1.0_f64;
    for k in 0..m {
        if k > 0 {
            fact *= f64::from(k);
            power *= a;
        }
        sum += power / fact;
    }
    let a_m = power * a / (fact * f64::from(m));
    a_m / (sum + a_m)
}

/// Erlang C from the factorial sums, same caveats.
fn erlang_c_bruteforce(m: u32, a: f64) -> f64 {
    let rho = a / f64::from(m);
    let mut fact = 1.0_f64;
    let mut sum = 0.0_f64;
    let mut power = 1.0_f64;
    for k in 0..m {
        if k > 0 {
            fact *= f64::from(k);
            power *= a;
        }
        sum += power / fact;
    }
    let a_m = power * a / (fact * f64::from(m));
    a_m / ((1.0 - rho) * sum + a_m)
}

fn rho_grid() -> impl Iterator<Item = f64> {
    (1..100).map(|i| f64::from(i) / 100.0)
}

#[test]
fn ansatz_identity_across_grid() {
    let mut worst = 0.0_f64;
    for m in 1..=64 {
        for rho in rho_grid() {
            let a = rho * f64::from(m);
            let c = erlang_c(m, a).unwrap();
            let phi = phi_b(m, a).unwrap();
            worst = worst.max((phi - c).abs() / c);
        }
    }
    assert!(worst <= 1e-12, "max |phi_b - C|/C = {worst:e}");
}

#[test]
fn blocking_algorithms_agree_across_grid() {
    let mut worst = 0.0_f64;
    for m in 1..=64 {
        for rho in rho_grid() {
            let a = rho * f64::from(m);
            let rec = erlang_b_recurrence(m, a).unwrap();
            let poi = erlang_b_poisson(m, a).unwrap();
            worst = worst.max((rec - poi).abs() / rec);
        }
    }
    assert!(worst <= 1e-12, "max recurrence/poisson gap = {worst:e}");
}

#[test]
fn production_algorithms_match_bruteforce_oracle() {
    let mut worst = 0.0_f64;
    for m in 1..=6 {
        for rho in rho_grid() {
            let a = rho * f64::from(m);
            let b_oracle = erlang_b_bruteforce(m, a);
            let c_oracle = erlang_c_bruteforce(m, a);
            worst = worst.max((erlang_b_recurrence(m, a).unwrap() - b_oracle).abs() / b_oracle);
            worst = worst.max((erlang_b_poisson(m, a).unwrap() - b_oracle).abs() / b_oracle);
            worst = worst.max((erlang_c(m, a).unwrap() - c_oracle).abs() / c_oracle);
        }
    }
    assert!(worst <= 1e-10, "max gap vs factorial oracle = {worst:e}");
}

#[test]
fn blocking_below_waiting_probability() {
    for m in 1..=64 {
        for rho in rho_grid() {
            let a = rho * f64::from(m);
            let b = erlang_b_recurrence(m, a).unwrap();
            let c = erlang_c(m, a).unwrap();
            assert!((0.0..=1.0).contains(&b));
            assert!((0.0..=1.0).contains(&c));
            assert!(b <= c, "B must not exceed C at m={m} rho={rho}");
        }
    }
}

#[test]
fn waiting_probability_rises_with_traffic() {
    for m in [1u32, 4, 16, 64] {
        let mut prev = -1.0;
        for rho in rho_grid() {
            let c = erlang_c(m, rho * f64::from(m)).unwrap();
            assert!(c > prev, "C must rise with load at m={m}");
            prev = c;
        }
    }
}

#[test]
fn light_and_heavy_traffic_limits() {
    for m in [1u32, 2, 4, 8] {
        let light = QueueSpec::from_traffic(m, 1e-6 * f64::from(m), 1.0).unwrap();
        let w = erlang::waiting_time(&light).unwrap();
        assert!(w < 1e-5, "light-traffic wait {w} at m={m}");

        let heavy = QueueSpec::from_traffic(m, (1.0 - 1e-6) * f64::from(m), 1.0).unwrap();
        let ratio = erlang::waiting_time(&heavy).unwrap() / FastServerView::of(&heavy).unwrap().r1_fast;
        assert!(
            (0.999..=1.0).contains(&ratio),
            "heavy-traffic W/R1 = {ratio} at m={m}"
        );
    }
}

#[test]
fn morphing_exact_for_one_and_two_servers() {
    for m in 1..=2u32 {
        for rho in rho_grid() {
            let spec = QueueSpec::from_traffic(m, rho * f64::from(m), 1.0).unwrap();
            let exact = erlang::residence_time(&spec).unwrap();
            let morph = morphing_residence(m, rho, 1.0).unwrap();
            assert!(
                (morph - exact).abs() / exact <= 1e-12,
                "m={m} rho={rho}: {morph} vs {exact}"
            );
        }
    }
}

#[test]
fn morphing_error_stays_under_bound() {
    for m in 1..=8u32 {
        let bound = morphing_error_bound(u64::from(m)).unwrap();
        let mut worst = 0.0_f64;
        for rho in rho_grid() {
            let spec = QueueSpec::from_traffic(m, rho * f64::from(m), 1.0).unwrap();
            let exact = erlang::residence_time(&spec).unwrap();
            let morph = morphing_residence(m, rho, 1.0).unwrap();
            worst = worst.max((morph - exact).abs() / exact);
        }
        // The m = 1 bound is exactly zero; grant rounding headroom there.
        assert!(
            worst <= bound.max(1e-12),
            "m={m}: worst error {worst} above bound {bound}"
        );
        if (4..=8).contains(&m) {
            assert!(
                (0.01..=0.15).contains(&worst),
                "m={m}: worst error {worst} outside the typical bracket"
            );
        }
    }
}

#[test]
fn corrected_form_is_exact_for_all_tabulated_orders() {
    for poly in CorrectionPolynomial::all() {
        let m = poly.servers();
        for i in 1..=19 {
            let rho = f64::from(i) * 0.05;
            let spec = QueueSpec::from_traffic(m, rho * f64::from(m), 1.0).unwrap();
            let exact = erlang::residence_time(&spec).unwrap();
            let corrected = corrected_residence(poly, rho, 1.0).unwrap();
            assert!(
                (corrected - exact).abs() / exact <= 1e-9,
                "m={m} rho={rho}: corrected {corrected} vs exact {exact}"
            );
        }
    }
}

#[test]
fn root_loci_meet_scaled_residual_contract() {
    for m in 1..=8u32 {
        let locus = morphing_roots(m).unwrap();
        assert_eq!(locus.roots.len() as u32, m);
        for z in &locus.roots {
            assert!((z.norm() - 1.0).abs() <= 1e-9);
        }
        // Scaled by the coefficient mass of 1 - z^m.
        assert!(locus.max_residual / 3.0 <= 1e-10);

        let poly = CorrectionPolynomial::for_servers(m).unwrap();
        let locus = corrected_roots(poly).unwrap();
        assert_eq!(locus.roots.len() as u32, m);
        let mass: f64 = 1.0 + poly.coeffs().iter().map(|c| c.unsigned_abs() as f64).sum::<f64>();
        assert!(
            locus.max_residual / mass <= 1e-10,
            "m={m}: scaled residual {}",
            locus.max_residual / mass
        );
    }
}

proptest! {
    #[test]
    fn iron_law_and_littles_law(m in 1u32..64, rho in 0.0f64..0.99, s in 0.1f64..10.0) {
        let spec = QueueSpec::from_traffic(m, rho * f64::from(m), s).unwrap();
        let metrics = erlang::metrics(&spec).unwrap();
        // R - W = S to machine rounding.
        prop_assert!((metrics.r - metrics.w - s).abs() <= 1e-12 * s.max(metrics.r));
        prop_assert!((metrics.q - spec.arrival_rate() * metrics.r).abs() <= 1e-12 * metrics.q.max(1.0));
        prop_assert!(metrics.rho_loss < 1.0);
    }

    #[test]
    fn single_server_specializes_to_mm1(rho in 0.0f64..0.99, s in 0.1f64..10.0) {
        let spec = QueueSpec::from_traffic(1, rho, s).unwrap();
        let r = erlang::residence_time(&spec).unwrap();
        let mm1 = s / (1.0 - spec.utilization());
        prop_assert!((r - mm1).abs() / mm1 <= 1e-12);
    }

    #[test]
    fn poisson_cdf_is_a_distribution(k in 0u32..200, a in 0.0f64..100.0) {
        let pmf = erlang::poisson_pmf(k, a).unwrap();
        let cdf = erlang::poisson_cdf(k, a).unwrap();
        prop_assert!((0.0..=1.0).contains(&pmf));
        prop_assert!(cdf > 0.0 && cdf <= 1.0);
        if k > 0 {
            prop_assert!(erlang::poisson_cdf(k - 1, a).unwrap() <= cdf + 1e-15);
        }
    }
}
