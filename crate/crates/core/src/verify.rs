//! Seeded verification suites.
//!
//! Each suite turns one of the library's structural guarantees into a
//! randomized check: maximum attainment of the interval supremum, the
//! metric chain, invariance under the two transformation families, the
//! conditioning identity, the Dirac distance formula, the unit-distance
//! characterization, quantization density, and the line↔circle
//! correspondence. Runs are deterministic given `(seed, trials)`.

use num_traits::{One, Signed};
use serde::Serialize;
use std::time::Instant;

use crate::characterize::is_unit_distant;
use crate::circle::{circle_kuiper, tau_transport};
use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::generate::{
    random_distribution, random_moebius_map, random_point, random_pwl_map, trial_rng,
    DistributionOptions,
};
use crate::interval::Interval;
use crate::io::serialize_distribution;
use crate::metrics::{
    brute_force_interval_sup, dirac_distance, ks_distance, kuiper_distance, kuiper_witness,
    tv_distance,
};
use crate::scalar::{format_rational, rat, rat_int, ExtReal, Rational, Value};
use crate::transform::{pullback, ContinuousIsometry, GeneralIsometry, MonotoneMap};
use rand::Rng;

const MAX_RECORDED_FAILURES: usize = 8;

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub trial: u64,
    pub message: String,
    pub inputs: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub trials: u64,
    pub failure_count: u64,
    pub failures: Vec<Failure>,
    pub exact_trials: u64,
    pub approx_trials: u64,
    pub wall_ms: u128,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    pub fn exactness_summary(&self) -> String {
        format!("{}/{} exact", self.exact_trials, self.trials)
    }
}

struct Recorder {
    report: SuiteReport,
}

impl Recorder {
    fn new(suite: &str, seed: u64) -> Recorder {
        Recorder {
            report: SuiteReport {
                suite: suite.to_string(),
                seed,
                trials: 0,
                failure_count: 0,
                failures: Vec::new(),
                exact_trials: 0,
                approx_trials: 0,
                wall_ms: 0,
            },
        }
    }

    fn trial(&mut self, exact: bool) {
        self.report.trials += 1;
        if exact {
            self.report.exact_trials += 1;
        } else {
            self.report.approx_trials += 1;
        }
    }

    fn fail(&mut self, trial: u64, message: String, inputs: Vec<String>) {
        self.report.failure_count += 1;
        if self.report.failures.len() < MAX_RECORDED_FAILURES {
            self.report.failures.push(Failure {
                trial,
                message,
                inputs,
            });
        }
    }

    fn finish(mut self, started: Instant) -> SuiteReport {
        self.report.wall_ms = started.elapsed().as_millis();
        self.report
    }
}

/// Suite names with their default trial counts.
pub const SUITES: &[(&str, u64)] = &[
    ("fixtures", 4),
    ("witness", 1000),
    ("chain", 1000),
    ("continuous-transport", 500),
    ("general-transport", 500),
    ("conditioning", 500),
    ("dirac", 500),
    ("unitdist", 1000),
    ("quantize", 100),
    ("circle", 200),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(n, _)| *n).collect()
}

pub fn default_trials(name: &str) -> Option<u64> {
    SUITES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Runs one suite; `trials = None` uses the suite default.
pub fn run_suite(name: &str, seed: u64, trials: Option<u64>) -> Result<SuiteReport> {
    let default = default_trials(name).ok_or_else(|| Error::UnknownSuite(name.to_string()))?;
    let trials = trials.unwrap_or(default);
    let started = Instant::now();
    let rec = match name {
        "fixtures" => fixtures_suite(seed),
        "witness" => witness_suite(seed, trials),
        "chain" => chain_suite(seed, trials),
        "continuous-transport" => continuous_transport_suite(seed, trials),
        "general-transport" => general_transport_suite(seed, trials),
        "conditioning" => conditioning_suite(seed, trials),
        "dirac" => dirac_suite(seed, trials),
        "unitdist" => unitdist_suite(seed, trials),
        "quantize" => quantize_suite(seed, trials),
        "circle" => circle_suite(seed, trials),
        _ => unreachable!("validated above"),
    };
    Ok(rec.finish(started))
}

/// Runs every suite in order.
pub fn run_all(seed: u64, trials: Option<u64>) -> Vec<SuiteReport> {
    SUITES
        .iter()
        .map(|(name, _)| run_suite(name, seed, trials).expect("known suite"))
        .collect()
}

fn uniform(lo: i64, hi: i64) -> Distribution {
    Distribution::uniform(rat_int(lo), rat_int(hi)).unwrap()
}

fn expect_exact(rec: &mut Recorder, trial: u64, v: &Value, what: &str, inputs: &[String]) -> Option<Rational> {
    match v.as_exact() {
        Some(q) => Some(q.clone()),
        None => {
            rec.fail(
                trial,
                format!("{what} was not exact: {v}"),
                inputs.to_vec(),
            );
            None
        }
    }
}

/// Criterion: the four hand-checked fixtures, exact, within 10 ms.
fn fixtures_suite(seed: u64) -> Recorder {
    let mut rec = Recorder::new("fixtures", seed);
    let t0 = Instant::now();
    let checks: Vec<(&str, bool)> = {
        let (w, d) = kuiper_witness(&uniform(0, 3), &uniform(1, 2));
        vec![
            (
                "kuiper(U[0,3],U[1,2]) = 2/3",
                d.as_exact() == Some(&rat(2, 3)),
            ),
            ("witness is [1,2]", format!("{}", w.interval) == "[1,2]"),
            (
                "witness signed value is -2/3",
                w.signed_value.as_exact() == Some(&rat(-2, 3)),
            ),
            (
                "ks(U[0,3],U[1,2]) = 1/3",
                ks_distance(&uniform(0, 3), &uniform(1, 2)).as_exact() == Some(&rat(1, 3)),
            ),
            (
                "tv(U[0,2],U[1,3]) = 1/2",
                tv_distance(&uniform(0, 2), &uniform(1, 3)).as_exact() == Some(&rat(1, 2)),
            ),
            (
                "kuiper(U[0,1],U[0,2]) = 1/2",
                kuiper_distance(&uniform(0, 1), &uniform(0, 2)).as_exact() == Some(&rat(1, 2)),
            ),
        ]
    };
    let elapsed = t0.elapsed();
    for (what, ok) in checks {
        rec.trial(true);
        if !ok {
            rec.fail(0, format!("fixture failed: {what}"), vec![]);
        }
    }
    if elapsed.as_millis() >= 10 {
        rec.fail(
            0,
            format!("fixtures took {} µs, budget is 10 ms", elapsed.as_micros()),
            vec![],
        );
    }
    rec
}

/// Criterion: the interval supremum is attained and matches the
/// brute-force enumeration exactly on piecewise-linear pairs.
fn witness_suite(seed: u64, trials: u64) -> Recorder {
    let mut rec = Recorder::new("witness", seed);
    let opts = DistributionOptions::default();
    for trial in 0..trials {
        let mut rng = trial_rng(seed, 0x11, trial);
        let a = random_distribution(&mut rng, &opts);
        let b = random_distribution(&mut rng, &opts);
        let inputs = vec![serialize_distribution(&a), serialize_distribution(&b)];
        let (w, d) = kuiper_witness(&a, &b);
        let bf = brute_force_interval_sup(&a, &b);
        let exact = d.is_exact() && bf.is_exact() && w.exact;
        rec.trial(exact);
        let (Some(dq), Some(bq)) = (
            expect_exact(&mut rec, trial, &d, "kuiper distance", &inputs),
            expect_exact(&mut rec, trial, &bf, "brute force supremum", &inputs),
        ) else {
            continue;
        };
        if dq != bq {
            rec.fail(
                trial,
                format!(
                    "kuiper {} differs from brute force {}",
                    format_rational(&dq),
                    format_rational(&bq)
                ),
                inputs.clone(),
            );
        }
        let attained = a.interval_mass(&w.interval) - b.interval_mass(&w.interval);
        match w.signed_value.as_exact() {
            Some(sv) if *sv == attained && sv.abs() == dq => {}
            _ => rec.fail(
                trial,
                format!(
                    "witness {} attains {} but distance is {}",
                    w.interval,
                    format_rational(&attained),
                    format_rational(&dq)
                ),
                inputs,
            ),
        }
    }
    rec
}

/// Criterion: the exact chain 0 ≤ d_KS ≤ d_Ku ≤ min(2·d_KS, d_TV) ≤ 1,
/// symmetry, and the triangle inequality on a 30% subsample of triples.
fn chain_suite(seed: u64, trials: u64) -> Recorder {
    let mut rec = Recorder::new("chain", seed);
    let opts = DistributionOptions::default();
    for trial in 0..trials {
        let mut rng = trial_rng(seed, 0x22, trial);
        let a = random_distribution(&mut rng, &opts);
        let b = random_distribution(&mut rng, &opts);
        let inputs = vec![serialize_distribution(&a), serialize_distribution(&b)];
        let ks = ks_distance(&a, &b);
        let ku = kuiper_distance(&a, &b);
        let tv = tv_distance(&a, &b);
        let exact = ks.is_exact() && ku.is_exact() && tv.is_exact();
        rec.trial(exact);
        let (Some(ksq), Some(kuq), Some(tvq)) = (
            expect_exact(&mut rec, trial, &ks, "ks", &inputs),
            expect_exact(&mut rec, trial, &ku, "kuiper", &inputs),
            expect_exact(&mut rec, trial, &tv, "tv", &inputs),
        ) else {
            continue;
        };
        let cap = (rat_int(2) * &ksq).min(tvq.clone());
        let chain_ok = !ksq.is_negative() && ksq <= kuq && kuq <= cap && tvq <= rat_int(1) && kuq <= rat_int(1);
        if !chain_ok {
            rec.fail(
                trial,
                format!(
                    "chain violated: ks={} ku={} tv={}",
                    format_rational(&ksq),
                    format_rational(&kuq),
                    format_rational(&tvq)
                ),
                inputs.clone(),
            );
        }
        let ku_sym = kuiper_distance(&b, &a);
        if ku_sym.as_exact() != Some(&kuq) {
            rec.fail(trial, "kuiper not symmetric".into(), inputs.clone());
        }
        if ks_distance(&b, &a).as_exact() != Some(&ksq)
            || tv_distance(&b, &a).as_exact() != Some(&tvq)
        {
            rec.fail(trial, "ks or tv not symmetric".into(), inputs.clone());
        }
        if trial % 10 < 3 {
            let c = random_distribution(&mut rng, &opts);
            let ab = kuiper_distance(&a, &b);
            let bc = kuiper_distance(&b, &c);
            let ac = kuiper_distance(&a, &c);
            match (ab.as_exact(), bc.as_exact(), ac.as_exact()) {
                (Some(x), Some(y), Some(z)) => {
                    if z > &(x + y) {
                        rec.fail(
                            trial,
                            "triangle inequality violated".into(),
                            vec![
                                inputs[0].clone(),
                                inputs[1].clone(),
                                serialize_distribution(&c),
                            ],
                        );
                    }
                }
                _ => rec.fail(trial, "triangle legs not exact".into(), inputs.clone()),
            }
        }
    }
    rec
}

/// Criterion: the continuous family `μ ↦ μ∘(g∘r_x)` preserves the Kuiper
/// distance: exactly on piecewise-linear trials with `x = ∞`, within 1e-9
/// when Möbius pieces or a finite pole enter.
fn continuous_transport_suite(seed: u64, trials: u64) -> Recorder {
    let mut rec = Recorder::new("continuous-transport", seed);
    let opts = DistributionOptions::atom_free();
    for trial in 0..trials {
        let mut rng = trial_rng(seed, 0x33, trial);
        let a = random_distribution(&mut rng, &opts);
        let b = random_distribution(&mut rng, &opts);
        let pw_linear_g = rng.random_bool(0.5);
        let g = if pw_linear_g {
            random_pwl_map(&mut rng, 4)
        } else {
            random_moebius_map(&mut rng)
        };
        let x = if rng.random_bool(0.5) {
            ExtReal::PosInf
        } else {
            ExtReal::Finite(random_point(&mut rng))
        };
        let inputs = vec![
            serialize_distribution(&a),
            serialize_distribution(&b),
            format!("x = {}", x),
        ];
        let iso = ContinuousIsometry::new(g, &x).expect("generated maps are line bijections");
        let (ta, tb) = match (iso.apply(&a), iso.apply(&b)) {
            (Ok(ta), Ok(tb)) => (ta, tb),
            (ra, rb) => {
                rec.trial(false);
                rec.fail(
                    trial,
                    format!("transport failed: {:?} {:?}", ra.err(), rb.err()),
                    inputs,
                );
                continue;
            }
        };
        if !ta.is_continuous() || !tb.is_continuous() {
            rec.fail(trial, "transport created atoms".into(), inputs.clone());
        }
        let before = kuiper_distance(&a, &b);
        let after = kuiper_distance(&ta, &tb);
        let exact_trial = pw_linear_g && x == ExtReal::PosInf;
        rec.trial(if exact_trial {
            before.is_exact() && after.is_exact()
        } else {
            false
        });
        if exact_trial {
            match (before.as_exact(), after.as_exact()) {
                (Some(x0), Some(x1)) if x0 == x1 => {}
                _ => rec.fail(
                    trial,
                    format!("exact preservation failed: {before} vs {after}"),
                    inputs,
                ),
            }
        } else if (before.to_f64() - after.to_f64()).abs() > 1e-9 {
            rec.fail(
                trial,
                format!(
                    "distance moved by {} under transport",
                    (before.to_f64() - after.to_f64()).abs()
                ),
                inputs,
            );
        }
    }
    rec
}

/// Criterion: the general family `μ ↦ μ∘g` preserves the distance exactly
/// with atoms, transports atom masses pointwise, and the inversion family
/// rejects measures charging the exceptional point in 100% of 100 trials.
fn general_transport_suite(seed: u64, trials: u64) -> Recorder {
    let mut rec = Recorder::new("general-transport", seed);
    let opts = DistributionOptions::default();
    for trial in 0..trials {
        let mut rng = trial_rng(seed, 0x44, trial);
        let a = random_distribution(&mut rng, &opts);
        let b = random_distribution(&mut rng, &opts);
        let g = random_pwl_map(&mut rng, 4);
        let inputs = vec![serialize_distribution(&a), serialize_distribution(&b)];
        let iso = GeneralIsometry::new(g.clone()).expect("pwl maps are line bijections");
        let (ta, tb) = (iso.apply(&a).unwrap(), iso.apply(&b).unwrap());
        let before = kuiper_distance(&a, &b);
        let after = kuiper_distance(&ta, &tb);
        rec.trial(before.is_exact() && after.is_exact());
        match (before.as_exact(), after.as_exact()) {
            (Some(x0), Some(x1)) if x0 == x1 => {}
            _ => rec.fail(
                trial,
                format!("exact preservation failed: {before} vs {after}"),
                inputs.clone(),
            ),
        }
        // Atom transport identity at atoms and random probes.
        let mut probes: Vec<Rational> = ta.atoms().into_iter().map(|(t, _)| t).collect();
        for _ in 0..3 {
            probes.push(random_point(&mut rng));
        }
        for t in probes {
            let image = match g.eval(&t) {
                crate::transform::CirclePoint::Finite(v) => v,
                crate::transform::CirclePoint::Infinity => continue,
            };
            if ta.atom_at(&t) != a.atom_at(&image) {
                rec.fail(
                    trial,
                    format!("atom transport failed at {}", format_rational(&t)),
                    inputs.clone(),
                );
                break;
            }
        }
        // Negative test on the first 100 trials: an atom at the exceptional
        // point of r_x stops the transport.
        if trial < 100 {
            let bad = Distribution::mix(&[
                (rat(1, 2), Distribution::dirac(rat_int(0))),
                (rat(1, 2), uniform(1, 2)),
            ])
            .unwrap();
            let pole = random_point(&mut rng);
            let r = MonotoneMap::r_map(&ExtReal::Finite(pole.clone()));
            match pullback(&bad, &r) {
                Err(Error::MassDeficiency { .. }) => {}
                other => rec.fail(
                    trial,
                    format!(
                        "expected mass deficiency for pole {}, got {:?}",
                        format_rational(&pole),
                        other.map(|_| "distribution")
                    ),
                    vec![serialize_distribution(&bad)],
                ),
            }
        }
    }
    rec
}

/// Criterion: conditioning on a closed interval sits at distance exactly
/// `1 − μ(I)`, and everything supported inside `I` is at least that far.
fn conditioning_suite(seed: u64, trials: u64) -> Recorder {
    let mut rec = Recorder::new("conditioning", seed);
    let opts = DistributionOptions::default();
    for trial in 0..trials {
        let mut rng = trial_rng(seed, 0x55, trial);
        let a = random_distribution(&mut rng, &opts);
        let iv = pick_massive_closed_interval(&mut rng, &a);
        let inputs = vec![serialize_distribution(&a), iv.to_string()];
        let mass = a.interval_mass(&iv);
        let conditioned = match a.condition_on_interval(&iv) {
            Ok(c) => c,
            Err(e) => {
                rec.trial(false);
                rec.fail(trial, format!("conditioning failed: {e}"), inputs);
                continue;
            }
        };
        let d = kuiper_distance(&a, &conditioned);
        rec.trial(d.is_exact());
        let want = rat_int(1) - &mass;
        if d.as_exact() != Some(&want) {
            rec.fail(
                trial,
                format!("kuiper to conditioned is {d}, expected {}", format_rational(&want)),
                inputs.clone(),
            );
        }
        // Any measure carried by I is at least 1 − μ(I) away.
        let (w1, w2) = inner_window(&iv);
        for _ in 0..20 {
            let theta = if w1 == w2 {
                Distribution::dirac(w1.clone())
            } else {
                let theta_opts = DistributionOptions::within(w1.clone(), w2.clone());
                random_distribution(&mut rng, &theta_opts)
            };
            let dt = kuiper_distance(&a, &theta);
            match dt.as_exact() {
                Some(q) if *q >= want => {}
                _ => {
                    rec.fail(
                        trial,
                        format!("support-in-I measure closer than 1 − μ(I): {dt}"),
                        vec![inputs[0].clone(), inputs[1].clone(), serialize_distribution(&theta)],
                    );
                    break;
                }
            }
        }
    }
    rec
}

/// A closed (sometimes unbounded) interval with positive mass.
fn pick_massive_closed_interval(rng: &mut rand_chacha::ChaCha8Rng, a: &Distribution) -> Interval {
    let lo_t = a.nodes().first().unwrap().t.clone();
    let hi_t = a.nodes().last().unwrap().t.clone();
    for _ in 0..20 {
        let kind = rng.random_range(0..4u32);
        let p = &lo_t + (&hi_t - &lo_t) * rat(rng.random_range(0..=64i64), 64);
        let q = &lo_t + (&hi_t - &lo_t) * rat(rng.random_range(0..=64i64), 64);
        let candidate = match kind {
            0 => Interval::new(ExtReal::NegInf, ExtReal::Finite(p), false, true).unwrap(),
            1 => Interval::new(ExtReal::Finite(p), ExtReal::PosInf, true, false).unwrap(),
            _ => {
                let (x, y) = if p <= q { (p, q) } else { (q, p) };
                Interval::new(ExtReal::Finite(x), ExtReal::Finite(y), true, true).unwrap()
            }
        };
        if a.interval_mass(&candidate).is_positive() {
            return candidate;
        }
    }
    Interval::new(
        ExtReal::Finite(&lo_t - rat_int(1)),
        ExtReal::Finite(&hi_t + rat_int(1)),
        true,
        true,
    )
    .unwrap()
}

/// A nonempty window strictly inside the interval for support placement.
fn inner_window(iv: &Interval) -> (Rational, Rational) {
    match (iv.lo(), iv.hi()) {
        (ExtReal::Finite(a), ExtReal::Finite(b)) => {
            if a == b {
                (a.clone(), b.clone())
            } else {
                let span = b - a;
                (a + &span * rat(1, 8), a + &span * rat(7, 8))
            }
        }
        (ExtReal::Finite(a), ExtReal::PosInf) => (a + rat_int(1), a + rat_int(5)),
        (ExtReal::NegInf, ExtReal::Finite(b)) => (b - rat_int(5), b - rat_int(1)),
        _ => (rat_int(-4), rat_int(4)),
    }
}

/// Criterion: `dirac_distance(μ,x) = d_Ku(μ, δ_x) = 1 − μ({x})`, exactly.
fn dirac_suite(seed: u64, trials: u64) -> Recorder {
    let mut rec = Recorder::new("dirac", seed);
    let opts = DistributionOptions::default();
    for trial in 0..trials {
        let mut rng = trial_rng(seed, 0x66, trial);
        let a = random_distribution(&mut rng, &opts);
        let atoms = a.atoms();
        let x = if !atoms.is_empty() && rng.random_bool(0.5) {
            atoms[rng.random_range(0..atoms.len())].0.clone()
        } else {
            random_point(&mut rng)
        };
        let inputs = vec![serialize_distribution(&a), format_rational(&x)];
        let want = rat_int(1) - a.atom_at(&x);
        let dd = dirac_distance(&a, &x);
        let kd = kuiper_distance(&a, &Distribution::dirac(x.clone()));
        rec.trial(dd.is_exact() && kd.is_exact());
        if dd.as_exact() != Some(&want) || kd.as_exact() != Some(&want) {
            rec.fail(
                trial,
                format!(
                    "dirac distance mismatch: formula {dd}, metric {kd}, expected {}",
                    format_rational(&want)
                ),
                inputs,
            );
        }
    }
    rec
}

/// Criterion: `is_unit_distant(μ,ν) ⇔ d_Ku(μ,ν) = 1`, plus symmetry of
/// the decision, over mixed Dirac/atomic/continuous pairs.
fn unitdist_suite(seed: u64, trials: u64) -> Recorder {
    let mut rec = Recorder::new("unitdist", seed);
    let opts = DistributionOptions::default();
    for trial in 0..trials {
        let mut rng = trial_rng(seed, 0x77, trial);
        let a = match rng.random_range(0..4u32) {
            0 => Distribution::dirac(random_point(&mut rng)),
            _ => random_distribution(&mut rng, &opts),
        };
        let b = match rng.random_range(0..5u32) {
            0 => Distribution::dirac(random_point(&mut rng)),
            1 | 2 => constructed_unit_partner(&mut rng, &a)
                .unwrap_or_else(|| random_distribution(&mut rng, &opts)),
            _ => random_distribution(&mut rng, &opts),
        };
        let inputs = vec![serialize_distribution(&a), serialize_distribution(&b)];
        let d = kuiper_distance(&a, &b);
        rec.trial(d.is_exact());
        let Some(dq) = expect_exact(&mut rec, trial, &d, "kuiper", &inputs) else {
            continue;
        };
        let decided = is_unit_distant(&a, &b);
        if decided != dq.is_one() {
            rec.fail(
                trial,
                format!(
                    "decision {} disagrees with distance {}",
                    decided,
                    format_rational(&dq)
                ),
                inputs.clone(),
            );
        }
        if decided != is_unit_distant(&b, &a) {
            rec.fail(trial, "decision is asymmetric".into(), inputs);
        }
    }
    rec
}

/// A measure carried by a gap or by the outer region of `a`, when it has
/// one.
fn constructed_unit_partner(
    rng: &mut rand_chacha::ChaCha8Rng,
    a: &Distribution,
) -> Option<Distribution> {
    if a.is_dirac() {
        return None;
    }
    let cs = a.co_interval_support();
    let mut regions: Vec<Interval> = cs.bounded_gaps.clone();
    regions.extend(cs.outer.clone());
    if regions.is_empty() {
        return None;
    }
    let region = &regions[rng.random_range(0..regions.len())];
    let (w1, w2) = inner_window(region);
    if w1 == w2 {
        return Some(Distribution::dirac(w1));
    }
    let opts = DistributionOptions::within(w1, w2);
    Some(random_distribution(rng, &opts))
}

/// Criterion: quantization stays within `2/n` in Kuiper distance, with
/// the quantile fixture for the uniform.
fn quantize_suite(seed: u64, trials: u64) -> Recorder {
    let mut rec = Recorder::new("quantize", seed);
    // Fixture: quantize(U[0,1], 4) has atoms 1/4 at {0, 1/4, 1/2, 3/4} and
    // distance exactly 1/4.
    let q = uniform(0, 1).quantize(4);
    let want: Vec<(Rational, Rational)> = [(0, 1), (1, 4), (1, 2), (3, 4)]
        .iter()
        .map(|&(n, d)| (rat(n, d), rat(1, 4)))
        .collect();
    if q.atoms() != want {
        rec.fail(0, "quantize(U[0,1],4) atoms are wrong".into(), vec![]);
    }
    if kuiper_distance(&uniform(0, 1), &q).as_exact() != Some(&rat(1, 4)) {
        rec.fail(0, "quantize(U[0,1],4) distance is not 1/4".into(), vec![]);
    }
    let opts = DistributionOptions::default();
    for trial in 0..trials {
        let mut rng = trial_rng(seed, 0x88, trial);
        let a = random_distribution(&mut rng, &opts);
        let inputs = vec![serialize_distribution(&a)];
        let mut all_exact = true;
        for n in [4u64, 16, 256] {
            let qa = a.quantize(n);
            let d = kuiper_distance(&a, &qa);
            all_exact &= d.is_exact();
            let bound = rat(2, n as i64);
            match d.as_exact() {
                Some(dq) if dq <= &bound => {}
                _ => {
                    rec.fail(
                        trial,
                        format!("quantize({n}) drifted: {d} > 2/{n}"),
                        inputs.clone(),
                    );
                }
            }
        }
        rec.trial(all_exact);
    }
    rec
}

/// Criterion: the transported circle metric matches the line metric within
/// `2ε + 1e-9` at ε = 1e-6, and the circle metric is rotation invariant
/// within 1e-12.
fn circle_suite(seed: u64, trials: u64) -> Recorder {
    let mut rec = Recorder::new("circle", seed);
    let opts = DistributionOptions::atom_free();
    let eps = 1e-6;
    for trial in 0..trials {
        let mut rng = trial_rng(seed, 0x99, trial);
        let a = random_distribution(&mut rng, &opts);
        let b = random_distribution(&mut rng, &opts);
        let inputs = vec![serialize_distribution(&a), serialize_distribution(&b)];
        rec.trial(false); // circle values are floating point by design
        let (ca, cb) = match (tau_transport(&a, eps), tau_transport(&b, eps)) {
            (Ok(ca), Ok(cb)) => (ca, cb),
            (ra, rb) => {
                rec.fail(
                    trial,
                    format!("transport failed: {:?} {:?}", ra.err(), rb.err()),
                    inputs,
                );
                continue;
            }
        };
        let line = kuiper_distance(&a, &b).to_f64();
        let circ = circle_kuiper(&ca, &cb);
        if (line - circ).abs() > 2.0 * eps + 1e-9 {
            rec.fail(
                trial,
                format!("correspondence broke: line {line} vs circle {circ}"),
                inputs.clone(),
            );
        }
        // Rotation invariance on the transported pair.
        let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let rotated = circle_kuiper(&ca.rotate(theta), &cb.rotate(theta));
        if (rotated - circ).abs() > 1e-12 {
            rec.fail(
                trial,
                format!(
                    "rotation by {theta} moved the circle distance by {}",
                    (rotated - circ).abs()
                ),
                inputs,
            );
        }
    }
    rec
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_reported() {
        assert!(matches!(
            run_suite("nope", 1, None),
            Err(Error::UnknownSuite(_))
        ));
    }

    #[test]
    fn small_runs_pass_and_are_deterministic() {
        for (name, _) in SUITES {
            let r1 = run_suite(name, 42, Some(12)).unwrap();
            let r2 = run_suite(name, 42, Some(12)).unwrap();
            assert_eq!(r1.failure_count, 0, "suite {name}: {:?}", r1.failures);
            assert_eq!(r1.trials, r2.trials);
            assert_eq!(r1.exact_trials, r2.exact_trials);
            assert_eq!(
                serde_json::to_string(&r1.failures).unwrap(),
                serde_json::to_string(&r2.failures).unwrap()
            );
        }
    }
}
