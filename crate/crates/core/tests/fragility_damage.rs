use std::collections::BTreeMap;

use num_rational::Ratio;
use proptest::prelude::*;
use restoration::damage::{
    damaged_in_class, estimate_line_damage, ingest_observed_damage, repair_time, ClassDamage,
    RepairParams,
};
use restoration::fragility::{validate_class_table, ClassId, LifetimeClass};
use restoration::grid::Line;
use restoration::Rounding;

type Q = Ratio<i64>;

/// Field class table in exact form: (p0, v_th, v_max) with v_th in tenths.
fn exact_classes() -> [(Q, Q, Q); 4] {
    let r = |n: i64, d: i64| Q::new(n, d);
    [
        (r(5, 100), r(60, 1), r(120, 1)),
        (r(7, 100), r(595, 10), r(115, 1)),
        (r(9, 100), r(59, 1), r(110, 1)),
        (r(11, 100), r(58, 1), r(100, 1)),
    ]
}

fn float_classes() -> Vec<LifetimeClass<f64>> {
    vec![
        LifetimeClass::new(1, (0.0, 5.0), 0.05, 60.0, 120.0),
        LifetimeClass::new(2, (5.0, 10.0), 0.07, 59.5, 115.0),
        LifetimeClass::new(3, (10.0, 15.0), 0.09, 59.0, 110.0),
        LifetimeClass::new(4, (15.0, 20.0), 0.11, 58.0, 100.0),
    ]
}

/// Piecewise-linear curve evaluated in exact rationals.
fn exact_q((p0, vth, vmax): (Q, Q, Q), v: Q) -> Q {
    if v < vth {
        p0
    } else if v > vmax {
        Q::from_integer(1)
    } else {
        (Q::from_integer(1) - p0) / (vmax - vth) * (v - vth) + p0
    }
}

/// Nearest integer, halves away from zero, in exact arithmetic.
fn exact_round(x: Q) -> i64 {
    (x + Q::new(1, 2)).floor().to_integer()
}

#[test]
fn exact_oracle_reproduces_field_damage_table() {
    let sizes: [[u32; 4]; 3] = [[15, 106, 98, 21], [18, 84, 110, 20], [17, 93, 105, 15]];
    let expected = [[6, 44, 46, 12], [7, 35, 51, 12], [6, 38, 49, 9]];
    let v = Q::from_integer(80);
    for (f, n) in sizes.iter().enumerate() {
        let oracle: Vec<i64> = exact_classes()
            .iter()
            .zip(n)
            .map(|(&c, &n)| exact_round(exact_q(c, v) * Q::from_integer(i64::from(n))))
            .collect();
        assert_eq!(
            oracle,
            expected[f].map(i64::from).to_vec(),
            "oracle feeder {}",
            f + 1
        );
        let got: Vec<u32> = float_classes()
            .iter()
            .zip(n)
            .map(|(c, &n)| damaged_in_class(c.failure_probability(80.0), n, Rounding::Nearest))
            .collect();
        assert_eq!(got, expected[f].to_vec(), "feeder {}", f + 1);
    }
    // class 1 at 80 m/s is exactly 11/30, and 11/30 * 15 is an exact tie
    assert_eq!(exact_q(exact_classes()[0], v), Q::new(11, 30));
    assert_eq!(
        exact_q(exact_classes()[0], v) * Q::from_integer(15),
        Q::new(11, 2)
    );
}

#[test]
fn slopes_match_exact_values() {
    for (exact, float) in exact_classes().iter().zip(float_classes()) {
        let (p0, vth, vmax) = *exact;
        let m = (Q::from_integer(1) - p0) / (vmax - vth);
        let m = *m.numer() as f64 / *m.denom() as f64;
        assert!((float.slope() - m).abs() < 1e-15);
    }
    assert!((float_classes()[0].slope() - 0.015_833_333_333).abs() < 1e-12);
    assert!((float_classes()[3].slope() - 0.021_190_476_190).abs() < 1e-12);
}

#[test]
fn older_classes_never_fail_less() {
    let table = validate_class_table(float_classes()).unwrap();
    for step in 0..=1300 {
        let v = step as f64 / 10.0;
        let qs: Vec<f64> = table
            .classes()
            .iter()
            .map(|c| c.failure_probability(v))
            .collect();
        assert!(qs.windows(2).all(|w| w[0] <= w[1]), "v = {v}: {qs:?}");
    }
}

fn class_strategy() -> impl Strategy<Value = LifetimeClass<f64>> {
    (0.001f64..0.999, 1.0f64..100.0, 0.5f64..100.0)
        .prop_map(|(p0, v_th, span)| LifetimeClass::new(1, (0.0, 1.0), p0, v_th, v_th + span))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn curve_is_continuous_bounded_and_monotone(
        c in class_strategy(),
        a in 0.0f64..250.0,
        b in 0.0f64..250.0,
    ) {
        prop_assert!(c.check().is_ok());
        prop_assert!((c.failure_probability(c.v_th) - c.p0).abs() < 1e-9);
        prop_assert!((c.failure_probability(c.v_max) - 1.0).abs() < 1e-9);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (qa, qb) = (c.failure_probability(lo), c.failure_probability(hi));
        prop_assert!(qa <= qb);
        for q in [qa, qb] {
            prop_assert!(q >= c.p0 && q <= 1.0);
        }
        prop_assert!(c.slope() > 0.0);
    }

    #[test]
    fn class_damage_stays_within_inventory(q in 0.0f64..=1.0, n in 0u32..10_000) {
        for r in [Rounding::Nearest, Rounding::Ceil] {
            let b = damaged_in_class(q, n, r);
            prop_assert!(b <= n);
        }
        prop_assert!(damaged_in_class(q, n, Rounding::Nearest) <= damaged_in_class(q, n, Rounding::Ceil));
    }

    #[test]
    fn repair_time_is_monotone(
        bt in 0u32..30,
        extra in 0u32..5,
        t1 in 0.0f64..=1.0,
        t2 in 0.0f64..=1.0,
    ) {
        let params = RepairParams::default();
        let poles = [(1u32, 40u32)];
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let line_lo = Line::new(1, 0, 1, "F", lo, poles);
        let line_hi = Line::new(1, 0, 1, "F", hi, poles);
        let d = |k: u32| ingest_observed_damage(&line_lo, &BTreeMap::from([(ClassId(1), k)])).unwrap();
        let base = repair_time(&d(bt), &line_lo, &params);
        prop_assert!(base <= repair_time(&d(bt + extra), &line_lo, &params));
        prop_assert!(base <= repair_time(&d(bt), &line_hi, &params));
        if bt == 0 {
            prop_assert_eq!(base, 0.0);
        }
        // uniform per-pole durations reduce to bt * t_rep_av
        let mut explicit = RepairParams::default();
        explicit.pole_durations.insert(line_lo.id, vec![4.0; bt as usize]);
        prop_assert_eq!(repair_time(&d(bt), &line_lo, &explicit), base);
    }

    #[test]
    fn line_estimates_partition_class_damage(
        inventories in prop::collection::vec(prop::collection::vec(0u32..6, 3), 1..40),
        qs in prop::collection::vec(0.0f64..=1.0, 3),
    ) {
        let lines: Vec<Line<f64>> = inventories
            .iter()
            .enumerate()
            .map(|(i, inv)| {
                let mut inv = inv.clone();
                if inv.iter().all(|&n| n == 0) { inv[0] = 1; }
                Line::new(i as u32 + 1, 0, i as u32 + 1, "F", 0.0, (1..=3).zip(inv))
            })
            .collect();
        let per_class: Vec<ClassDamage<f64>> = (0..3)
            .map(|c| {
                let n: u32 = lines.iter().map(|l| l.poles_in(ClassId(c + 1))).sum();
                ClassDamage { class: ClassId(c + 1), q: qs[c as usize], n, damaged: damaged_in_class(qs[c as usize], n, Rounding::Nearest) }
            })
            .collect();
        let b_total: u32 = per_class.iter().map(|d| d.damaged).sum();
        let mut expected_sum = 0.0;
        let mut rounded_sum = 0i64;
        for l in &lines {
            let d = estimate_line_damage(l, &per_class, Rounding::Nearest).unwrap();
            expected_sum += d.by_class.values().sum::<f64>();
            rounded_sum += i64::from(d.damaged_poles);
            prop_assert!(u64::from(d.damaged_poles) <= l.total_poles());
        }
        prop_assert!((expected_sum - f64::from(b_total)).abs() < 1e-9 * f64::from(b_total.max(1)));
        prop_assert!((rounded_sum - i64::from(b_total)).abs() <= lines.len() as i64);
    }
}
