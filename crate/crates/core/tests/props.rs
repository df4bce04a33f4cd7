//! Property suites over seeded random distributions, intervals and maps.

use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use kuiper_core::generate::{
    random_distribution, random_moebius_map, random_point, random_pwl_map, trial_rng,
    DistributionOptions,
};
use kuiper_core::io::{parse_distribution, parse_map, serialize_distribution, serialize_map};
use kuiper_core::metrics::{kuiper_distance, kuiper_witness};
use kuiper_core::scalar::{rat, rat_int, ExtReal, Rational};
use kuiper_core::transform::{compose, pullback, CirclePoint};
use kuiper_core::{Distribution, Interval, MonotoneMap};
use rand::Rng;

fn any_distribution(seed: u64, tails: bool) -> Distribution {
    let opts = DistributionOptions {
        allow_tails: tails,
        ..Default::default()
    };
    let mut rng = trial_rng(seed, 0xd157, 0);
    random_distribution(&mut rng, &opts)
}

fn any_interval(seed: u64) -> Interval {
    let mut rng = trial_rng(seed, 0x1a7e, 0);
    let a = random_point(&mut rng);
    let b = random_point(&mut rng);
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if lo == hi {
        return Interval::point(lo);
    }
    match rng.random_range(0..5u32) {
        0 => Interval::new(ExtReal::NegInf, ExtReal::Finite(hi), false, rng.random_bool(0.5))
            .unwrap(),
        1 => Interval::new(ExtReal::Finite(lo), ExtReal::PosInf, rng.random_bool(0.5), false)
            .unwrap(),
        _ => Interval::new(
            ExtReal::Finite(lo),
            ExtReal::Finite(hi),
            rng.random_bool(0.5),
            rng.random_bool(0.5),
        )
        .unwrap(),
    }
}

/// Splits an interval at an interior point into two pieces.
fn split_interval(iv: &Interval, at: &Rational) -> Option<(Interval, Interval)> {
    let inside = match (iv.lo(), iv.hi()) {
        (ExtReal::Finite(a), ExtReal::Finite(b)) => a < at && at < b,
        (ExtReal::NegInf, ExtReal::Finite(b)) => at < b,
        (ExtReal::Finite(a), ExtReal::PosInf) => a < at,
        _ => true,
    };
    if !inside {
        return None;
    }
    let left = Interval::new(
        iv.lo().clone(),
        ExtReal::Finite(at.clone()),
        iv.lo_closed(),
        true,
    )
    .ok()?;
    let right = Interval::new(
        ExtReal::Finite(at.clone()),
        iv.hi().clone(),
        false,
        iv.hi_closed(),
    )
    .ok()?;
    Some((left, right))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn interval_mass_is_additive(seed in any::<u64>(), tails in any::<bool>()) {
        let d = any_distribution(seed, tails);
        let iv = any_interval(seed.wrapping_add(1));
        let mut rng = trial_rng(seed, 0xadd, 0);
        let at = random_point(&mut rng);
        if let Some((l, r)) = split_interval(&iv, &at) {
            prop_assert_eq!(
                d.interval_mass(&iv),
                d.interval_mass(&l) + d.interval_mass(&r)
            );
        }
        prop_assert_eq!(d.interval_mass(&Interval::real_line()), Rational::one());
    }

    #[test]
    fn complement_identity(seed in any::<u64>()) {
        let a = any_distribution(seed, false);
        let b = any_distribution(seed.wrapping_add(7), true);
        let iv = any_interval(seed.wrapping_add(2));
        let direct = a.interval_mass(&iv) - b.interval_mass(&iv);
        let through_complement =
            (Rational::one() - a.interval_mass(&iv)) - (Rational::one() - b.interval_mass(&iv));
        prop_assert_eq!(direct, -through_complement);
    }

    #[test]
    fn conditioning_is_a_ratio_of_masses(seed in any::<u64>()) {
        let a = any_distribution(seed, false);
        let iv = any_interval(seed.wrapping_add(3));
        let mass = a.interval_mass(&iv);
        prop_assume!(mass.is_positive());
        let cond = a.condition_on_interval(&iv).unwrap();
        let j = any_interval(seed.wrapping_add(4));
        let lhs = cond.interval_mass(&j) * &mass;
        let rhs = match j.intersect(&iv) {
            Some(k) => a.interval_mass(&k),
            None => Rational::zero(),
        };
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn zero_distance_means_equal(seed in any::<u64>()) {
        let a = any_distribution(seed, false);
        let b = any_distribution(seed.wrapping_add(5), false);
        let d = kuiper_distance(&a, &b);
        if d.as_exact() == Some(&Rational::zero()) {
            prop_assert_eq!(&a, &b);
        }
        let same = kuiper_distance(&a, &a);
        prop_assert_eq!(same.as_exact(), Some(&Rational::zero()));
    }

    #[test]
    fn serialization_round_trips(seed in any::<u64>(), tails in any::<bool>()) {
        let d = any_distribution(seed, tails);
        let text = serialize_distribution(&d);
        let back = parse_distribution(&text).unwrap();
        prop_assert_eq!(&back, &d);
        prop_assert_eq!(serialize_distribution(&back), text);

        let mut rng = trial_rng(seed, 0x3a9, 0);
        let g = if seed % 2 == 0 {
            random_pwl_map(&mut rng, 4)
        } else {
            random_moebius_map(&mut rng)
        };
        let gtext = serialize_map(&g);
        prop_assert_eq!(parse_map(&gtext).unwrap(), g);
    }

    #[test]
    fn bounded_intervals_suffice(seed in any::<u64>()) {
        // The interval supremum restricted to bounded intervals equals the
        // full Kuiper distance on compactly supported data.
        let a = any_distribution(seed, false);
        let b = any_distribution(seed.wrapping_add(6), false);
        let d = kuiper_distance(&a, &b).as_exact().unwrap().clone();
        let mut positions: Vec<(Rational, bool)> = Vec::new();
        for nd in a.nodes().iter().chain(b.nodes().iter()) {
            positions.push((nd.t.clone(), false));
            positions.push((nd.t.clone(), true));
        }
        let mut best = Rational::zero();
        // A position flag of `false` is the left limit, `true` the value:
        // a left-limit lower endpoint closes the interval from below, a
        // value upper endpoint closes it from above. Backwards pairs are
        // rejected by the interval constructor.
        for (lo, lo_side) in positions.iter() {
            for (hi, hi_side) in positions.iter() {
                let iv = match Interval::new(
                    ExtReal::Finite(lo.clone()),
                    ExtReal::Finite(hi.clone()),
                    !*lo_side,
                    *hi_side,
                ) {
                    Ok(iv) => iv,
                    Err(_) => continue,
                };
                let gap = (a.interval_mass(&iv) - b.interval_mass(&iv)).abs();
                if gap > best {
                    best = gap;
                }
            }
        }
        prop_assert_eq!(best, d);
    }

    #[test]
    fn transported_distance_is_preserved_with_atoms(seed in any::<u64>()) {
        // Beyond the continuous family: pairs giving zero mass to both
        // exceptional points of g∘r_x keep their distance.
        let a = any_distribution(seed, false);
        let b = any_distribution(seed.wrapping_add(8), false);
        let mut rng = trial_rng(seed, 0x9e1, 0);
        let g = random_pwl_map(&mut rng, 3);
        let pole = random_point(&mut rng);
        let k = compose(&g, &MonotoneMap::r_map(&ExtReal::Finite(pole)));
        let clear = |d: &Distribution| {
            if let Some(p) = k.range_exceptional() {
                if d.atom_at(&p).is_positive() {
                    return false;
                }
            }
            true
        };
        prop_assume!(clear(&a) && clear(&b));
        let ta = pullback(&a, &k).unwrap();
        let tb = pullback(&b, &k).unwrap();
        let before = kuiper_distance(&a, &b).to_f64();
        let after = kuiper_distance(&ta, &tb).to_f64();
        prop_assert!((before - after).abs() <= 1e-9);
    }

    #[test]
    fn compose_invert_antihomomorphism(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0xc0de, 0);
        let g = random_pwl_map(&mut rng, 3);
        let h = random_moebius_map(&mut rng);
        let lhs = compose(&g, &h).invert();
        let rhs = compose(&h.invert(), &g.invert());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn witness_is_deterministic_and_attaining(seed in any::<u64>()) {
        let a = any_distribution(seed, false);
        let b = any_distribution(seed.wrapping_add(9), false);
        let (w1, d1) = kuiper_witness(&a, &b);
        let (w2, _) = kuiper_witness(&a, &b);
        prop_assert_eq!(&w1.interval, &w2.interval);
        let mass = a.interval_mass(&w1.interval) - b.interval_mass(&w1.interval);
        prop_assert_eq!(Some(&mass), w1.signed_value.as_exact());
        prop_assert_eq!(mass.abs(), d1.as_exact().unwrap().clone());
    }

    #[test]
    fn quantize_bound_holds_with_tails(seed in any::<u64>()) {
        let d = any_distribution(seed, true);
        for n in [4u64, 16] {
            let q = d.quantize(n);
            let dist = kuiper_distance(&d, &q);
            let bound = 2.0 / (n as f64);
            prop_assert!(
                dist.to_f64() <= bound + 1e-12,
                "n = {}, distance = {}",
                n,
                dist.to_f64()
            );
        }
    }

    #[test]
    fn co_interval_support_closure_is_the_closed_support(seed in any::<u64>(), tails in any::<bool>()) {
        let d = any_distribution(seed, tails);
        let cs = d.co_interval_support();
        for gap in &cs.bounded_gaps {
            prop_assert_eq!(d.interval_mass(gap), Rational::zero());
        }
        // Closing the components and merging touching pieces must give the
        // closed support exactly.
        let mut closed: Vec<Interval> = Vec::new();
        for comp in &cs.components {
            let iv = Interval::new(
                comp.lo().clone(),
                comp.hi().clone(),
                comp.lo().is_finite(),
                comp.hi().is_finite(),
            )
            .unwrap();
            match closed.last_mut() {
                Some(last) if iv.lo() <= last.hi() && iv.lo().is_finite() => {
                    if iv.hi() > last.hi() {
                        *last = Interval::new(
                            last.lo().clone(),
                            iv.hi().clone(),
                            last.lo_closed(),
                            iv.hi_closed(),
                        )
                        .unwrap();
                    }
                }
                _ => closed.push(iv),
            }
        }
        prop_assert_eq!(closed, d.closed_support());
    }

    #[test]
    fn tv_matches_segmentwise_positive_parts(seed in any::<u64>()) {
        // On piecewise-linear pairs the density difference has constant
        // sign on every refined segment, so TV is the sum of positive mass
        // differences over refined segments and atoms, computed through
        // interval masses only.
        let a = any_distribution(seed, false);
        let b = any_distribution(seed.wrapping_add(11), false);
        let mut cuts: Vec<Rational> = a
            .nodes()
            .iter()
            .chain(b.nodes().iter())
            .map(|nd| nd.t.clone())
            .collect();
        cuts.sort();
        cuts.dedup();
        let mut total = Rational::zero();
        for t in &cuts {
            let gap = a.atom_at(t) - b.atom_at(t);
            if gap.is_positive() {
                total += gap;
            }
        }
        for w in cuts.windows(2) {
            let iv = Interval::new(
                ExtReal::Finite(w[0].clone()),
                ExtReal::Finite(w[1].clone()),
                false,
                false,
            )
            .unwrap();
            let gap = a.interval_mass(&iv) - b.interval_mass(&iv);
            if gap.is_positive() {
                total += gap;
            }
        }
        let tv = kuiper_core::metrics::tv_distance(&a, &b);
        prop_assert_eq!(tv.as_exact(), Some(&total));
    }

    #[test]
    fn ks_matches_ray_enumeration(seed in any::<u64>()) {
        let a = any_distribution(seed, false);
        let b = any_distribution(seed.wrapping_add(12), false);
        let mut best = Rational::zero();
        for nd in a.nodes().iter().chain(b.nodes().iter()) {
            for closed in [true, false] {
                let ray = Interval::new(
                    ExtReal::NegInf,
                    ExtReal::Finite(nd.t.clone()),
                    false,
                    closed,
                )
                .unwrap();
                let gap = (a.interval_mass(&ray) - b.interval_mass(&ray)).abs();
                if gap > best {
                    best = gap;
                }
            }
        }
        let ks = kuiper_core::metrics::ks_distance(&a, &b);
        prop_assert_eq!(ks.as_exact(), Some(&best));
    }

    #[test]
    fn polar_check_holds_for_conditioned_measures(seed in any::<u64>()) {
        // ν = μ conditioned on an interval is absolutely continuous with
        // respect to μ; every probe at distance 1 from μ must then be at
        // distance 1 from ν.
        let mu = any_distribution(seed, false);
        let iv = any_interval(seed.wrapping_add(10));
        prop_assume!(mu.interval_mass(&iv).is_positive());
        prop_assume!(!mu.is_dirac());
        let nu = mu.condition_on_interval(&iv).unwrap();
        prop_assume!(nu.is_absolutely_continuous_wrt(&mu));
        let mut rng = trial_rng(seed, 0x90be, 0);
        let probes = kuiper_core::generate::region_probes(&mut rng, &mu);
        for probe in &probes {
            prop_assert!(kuiper_core::characterize::is_unit_distant(&mu, probe));
        }
        prop_assert!(
            kuiper_core::characterize::absolute_continuity_polar_check(&mu, &nu, &probes)
                .unwrap()
        );
    }

    #[test]
    fn pullback_preserves_point_masses(seed in any::<u64>()) {
        let d = any_distribution(seed, false);
        let mut rng = trial_rng(seed, 0xabcd, 0);
        let g = random_pwl_map(&mut rng, 3);
        let out = pullback(&d, &g).unwrap();
        let t = random_point(&mut rng);
        if let CirclePoint::Finite(image) = g.eval(&t) {
            prop_assert_eq!(out.atom_at(&t), d.atom_at(&image));
        }
    }
}

#[test]
fn quantile_atoms_collapse() {
    let d = Distribution::dirac(rat_int(5));
    assert_eq!(d.quantize(7), d);
    // Left quantiles of ½δ₀ + ½δ₁ all sit at 0: the ties collapse and the
    // 2/n bound absorbs the distance of ½.
    let two = Distribution::mix(&[
        (rat(1, 2), Distribution::dirac(rat_int(0))),
        (rat(1, 2), Distribution::dirac(rat_int(1))),
    ])
    .unwrap();
    assert_eq!(two.quantize(2), Distribution::dirac(rat_int(0)));
    assert_eq!(
        kuiper_distance(&two, &two.quantize(2)).as_exact(),
        Some(&rat(1, 2))
    );
}
