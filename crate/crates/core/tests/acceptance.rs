//! Acceptance suite: one PASS/FAIL line per criterion, in order. Exits
//! nonzero if any criterion fails.
//!
//! Oracles are independent of the library: printed passivity polynomials
//! and printed transfer functions are transcribed here, evaluated with
//! plain complex arithmetic; stability is cross-checked with companion
//! matrix eigenvalues; the integrator against a closed-form oscillator.

use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sea_core::experiments::{reproduce_fig3, reproduce_fig4, Assertion};
use sea_core::lti::routh_hurwitz;
use sea_core::model::{make_preset, PresetParams, Slot};
use sea_core::passivity::{
    analyze_config, closed_form_condition, max_passive_gain, realpart_poly, MaxGain,
};
use sea_core::sim::{rendered_stiffness_step, simulate};
use sea_core::{
    impedance_tf, stiffness_tf, ComplianceElement, LinearController, ParamPath, Polynomial,
    PresetId, SeaConfig, SimScenario,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn params(kv: &[(&str, f64)]) -> PresetParams {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn get(p: &PresetParams, k: &str) -> f64 {
    p.get(k).copied().unwrap_or(0.0)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------------------
// 1. closed-form catalog

/// Printed passivity-condition polynomial in u = ω², ascending.
fn printed_condition(id: PresetId, p: &PresetParams) -> Vec<f64> {
    let [m, b, k1, k2, b1, b2, kd, bd, id_] =
        ["m", "b", "k1", "k2", "b1", "b2", "kd", "bd", "id"].map(|k| get(p, k));
    match id {
        PresetId::PureSpringLp => vec![0.0, b * k1 * (k1 - kd)],
        PresetId::SpringSpringLp => vec![0.0, b * k1 * (k1 + k2 - kd)],
        PresetId::ParallelSpringDamperLp => {
            vec![0.0, (k1 - kd) * b * k1, (b * b + b * b1 - m * kd) * b1]
        }
        PresetId::DisjointedSpringDamperLp => {
            vec![0.0, b * k1 * (k1 - kd), b2 * (b * b - m * k1), m * b2]
        }
        PresetId::PureSpringLpd => vec![0.0, k1 * (b * k1 + bd * k1 - b * kd), -bd * k1 * m],
        PresetId::PureSpringLpi => vec![-id_ * k1 * k1, k1 * (b * k1 - b * kd + id_ * m)],
        PresetId::PureSpringAp => vec![0.0, b * k1 * k1],
        PresetId::PureSpringApd => vec![0.0, k1 * k1 * (b + bd)],
        PresetId::PureSpringApi => vec![-id_ * k1 * k1, b * k1 * k1],
        PresetId::CombinedApd => vec![
            0.0,
            b1 * kd * kd + b * k1 * k1 + bd * k1 * k1,
            b1 * ((b + bd).powi(2) + b * b1 + b1 * bd - 2.0 * m * kd),
            m * m * b1,
        ],
    }
}

/// Polynomial the implementation is expected to produce, derived from the
/// printed one:
/// * rows whose transfer function carries `i_d/s` are cleared of the
///   fraction by one extra factor of s, which multiplies the condition by
///   `s·(−s) = ω²`;
/// * the load-side proportional row of the controller table prints
///   `bk1(k1 − kd ω²)`, an obvious typo for the mechanical table's row 1,
///   so that row is taken from the mechanical table;
/// * the parallel spring-damper row omits the `m² b1 ω⁶` term and the
///   disjointed spring-damper row prints `m b2` for `m² b2`; both are
///   confirmed by the transfer-function oracle below.
fn expected_condition(id: PresetId, p: &PresetParams) -> Vec<f64> {
    let mut c = printed_condition(id, p);
    let (m, b1, b2) = (get(p, "m"), get(p, "b1"), get(p, "b2"));
    match id {
        PresetId::PureSpringLpi | PresetId::PureSpringApi => c.insert(0, 0.0),
        PresetId::ParallelSpringDamperLp => c.push(m * m * b1),
        PresetId::DisjointedSpringDamperLp => c[3] += (m * m - m) * b2,
        _ => {}
    }
    c
}

fn poly(c: &[f64]) -> impl Fn(Complex64) -> Complex64 + '_ {
    move |s| {
        c.iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &x| acc * s + x)
    }
}

/// Printed stiffness transfer function, with any `i_d/s` cleared by one
/// factor of s: (numerator, denominator) ascending in s.
fn printed_tf(id: PresetId, p: &PresetParams) -> (Vec<f64>, Vec<f64>) {
    let [m, b, k1, k2, b1, b2, kd, bd, i] =
        ["m", "b", "k1", "k2", "b1", "b2", "kd", "bd", "id"].map(|k| get(p, k));
    let alpha = Polynomial::new(vec![0.0, b, m]);
    let c = |v: &[f64]| Polynomial::new(v.to_vec());
    let (num, den) = match id {
        PresetId::PureSpringLp => (&(&alpha + &c(&[kd])) * &c(&[k1]), &alpha + &c(&[k1])),
        PresetId::SpringSpringLp => (
            &(&alpha * &c(&[k1 + k2])) + &c(&[k1 * kd]),
            &alpha + &c(&[k1]),
        ),
        PresetId::ParallelSpringDamperLp => (
            &c(&[k1, b1]) * &(&alpha + &c(&[kd])),
            &alpha + &c(&[k1, b1]),
        ),
        PresetId::DisjointedSpringDamperLp => (
            &(&c(&[k1, b2]) * &alpha) + &c(&[k1 * kd]),
            &alpha + &c(&[k1]),
        ),
        PresetId::PureSpringLpd => (&(&alpha + &c(&[kd, bd])) * &c(&[k1]), &alpha + &c(&[k1])),
        PresetId::PureSpringLpi => (
            &(&(&alpha + &c(&[kd])) * &Polynomial::s() + &c(&[i])) * &c(&[k1]),
            &(&alpha + &c(&[k1])) * &Polynomial::s(),
        ),
        PresetId::PureSpringAp => (&(&alpha + &c(&[kd])) * &c(&[k1]), &alpha + &c(&[k1 + kd])),
        PresetId::PureSpringApd => (
            &(&alpha + &c(&[kd, bd])) * &c(&[k1]),
            &alpha + &c(&[k1 + kd, bd]),
        ),
        PresetId::PureSpringApi => (
            &(&(&alpha + &c(&[kd])) * &Polynomial::s() + &c(&[i])) * &c(&[k1]),
            &(&(&alpha + &c(&[k1 + kd])) * &Polynomial::s()) + &c(&[i]),
        ),
        PresetId::CombinedApd => (
            &c(&[k1, b1]) * &(&alpha + &c(&[kd, bd])),
            &alpha + &c(&[k1 + kd, b1 + bd]),
        ),
    };
    (num.coeffs().to_vec(), den.coeffs().to_vec())
}

/// Re(n(jω)·conj(jω·d(jω))) for the printed K = n/d, i.e. the real part of
/// the impedance K/s times |s·d|².
fn oracle_realpart(tf: &(Vec<f64>, Vec<f64>), w: f64) -> f64 {
    let jw = Complex64::new(0.0, w);
    let n = poly(&tf.0)(jw);
    let d = poly(&tf.1)(jw);
    (n * (jw * d).conj()).re
}

fn random_params(id: PresetId, rng: &mut ChaCha8Rng) -> PresetParams {
    let mut p = PresetParams::new();
    for slot in id.slots() {
        let name = slot.as_str();
        let v = match name {
            "m" => rng.gen_range(0.2..5.0),
            "b" => rng.gen_range(0.5..50.0),
            "k1" => rng.gen_range(50.0..5000.0),
            "k2" => rng.gen_range(10.0..5000.0),
            "b1" | "b2" | "bd" => rng.gen_range(0.5..200.0),
            "kd" => rng.gen_range(0.0..10_000.0),
            "id" => rng.gen_range(0.5..500.0),
            other => panic!("unexpected slot {other}"),
        };
        p.insert(name.to_string(), v);
    }
    p
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let mut worst_coeff = 0.0f64;
    let mut worst_oracle = 0.0f64;
    for id in PresetId::ALL {
        for draw in 0..200 {
            let p = random_params(id, &mut rng);
            let config = make_preset(id, &p).map_err(|e| e.to_string())?;
            let rp = realpart_poly(&impedance_tf(&stiffness_tf(&config)));
            let expected = expected_condition(id, &p);
            let got = rp.poly_in_u.coeffs();
            let env = rp.envelope_in_u.coeffs();
            let n = expected.len().max(got.len());
            for i in 0..n {
                let e = expected.get(i).copied().unwrap_or(0.0);
                let g = got.get(i).copied().unwrap_or(0.0);
                let scale = env
                    .get(i)
                    .copied()
                    .unwrap_or(0.0)
                    .max(e.abs())
                    .max(f64::MIN_POSITIVE);
                let rel = (g - e).abs() / scale;
                worst_coeff = worst_coeff.max(rel);
                ensure(rel <= 1e-12, || {
                    format!("{} draw {draw}: u^{i} coefficient {g} vs {e}", id.name())
                })?;
            }
            // the printed transfer function, evaluated directly, must agree
            // with the (corrected) condition polynomial
            let tf = printed_tf(id, &p);
            let abs_env: Vec<f64> = env.to_vec();
            for w in [0.3, 3.0, 30.0, 300.0] {
                let u = w * w;
                let o = oracle_realpart(&tf, w);
                let e = Polynomial::new(expected.clone()).eval(u);
                let scale = Polynomial::new(abs_env.clone())
                    .eval(u)
                    .max(f64::MIN_POSITIVE);
                let rel = (o - e).abs() / scale;
                worst_oracle = worst_oracle.max(rel);
                ensure(rel <= 1e-10, || {
                    format!("{} draw {draw}: oracle at ω={w}: {o} vs {e}", id.name())
                })?;
            }
        }
    }
    // the two mechanical-table typos really are typos: the printed forms
    // disagree with the transfer-function oracle
    let p = params(&[
        ("m", 2.0),
        ("b", 10.0),
        ("k1", 1000.0),
        ("b1", 50.0),
        ("b2", 50.0),
        ("kd", 300.0),
    ]);
    for id in [
        PresetId::ParallelSpringDamperLp,
        PresetId::DisjointedSpringDamperLp,
    ] {
        let tf = printed_tf(id, &p);
        let w = 50.0;
        let printed = Polynomial::new(printed_condition(id, &p)).eval(w * w);
        let o = oracle_realpart(&tf, w);
        ensure((o - printed).abs() > 1e-3 * o.abs(), || {
            format!("{} printed form unexpectedly exact", id.name())
        })?;
    }
    Ok(format!(
        "10 rows x 200 draws; worst coefficient error {worst_coeff:.1e}, worst oracle error {worst_oracle:.1e} (relative to term envelope)"
    ))
}

// ---------------------------------------------------------------------------
// 2. pure spring + load-side P boundary

fn criterion_2() -> Outcome {
    let mut parts = Vec::new();
    for k1 in [100.0, 1000.0, 5000.0] {
        let c = make_preset(
            PresetId::PureSpringLp,
            &params(&[("m", 1.0), ("b", 10.0), ("k1", k1), ("kd", 0.0)]),
        )
        .map_err(|e| e.to_string())?;
        let g =
            max_passive_gain(&c, ParamPath::ClKp, (0.0, 3.0 * k1)).map_err(|e| e.to_string())?;
        let MaxGain::Bounded(kd) = g else {
            return Err(format!("k1={k1}: no bound found"));
        };
        let rel = (kd - k1).abs() / k1;
        ensure(rel < 1e-3, || format!("k1={k1}: max kd {kd}"))?;
        parts.push(format!("k1={k1}: {kd:.3}"));
    }
    Ok(parts.join(", "))
}

// ---------------------------------------------------------------------------
// 3, 4. controller families

fn random_spring(rng: &mut ChaCha8Rng) -> Vec<(&'static str, f64)> {
    vec![
        ("m", rng.gen_range(0.2..5.0)),
        ("b", rng.gen_range(0.5..50.0)),
        ("k1", rng.gen_range(50.0..5000.0)),
    ]
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..100 {
        let mut kv = random_spring(&mut rng);
        kv.push(("kd", 1e6));
        let ap = make_preset(PresetId::PureSpringAp, &params(&kv)).map_err(|e| e.to_string())?;
        kv.push(("bd", rng.gen_range(0.5..200.0)));
        let apd = make_preset(PresetId::PureSpringApd, &params(&kv)).map_err(|e| e.to_string())?;
        for c in [&ap, &apd] {
            let v = analyze_config(c).map_err(|e| e.to_string())?;
            ensure(v.passive, || {
                format!("draw {i}: {:?} not passive at kd=1e6", c.label)
            })?;
        }
    }
    Ok("200 configurations passive at kd = 1e6".into())
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..100 {
        let spring = random_spring(&mut rng);
        let kd = rng.gen_range(0.0..5000.0);
        let mut lpd = spring.clone();
        lpd.extend([("kd", kd), ("bd", rng.gen_range(0.5..200.0))]);
        let mut lpi = spring;
        lpi.extend([("kd", kd), ("id", rng.gen_range(0.5..500.0))]);
        for (id, kv) in [
            (PresetId::PureSpringLpd, lpd),
            (PresetId::PureSpringLpi, lpi),
        ] {
            let c = make_preset(id, &params(&kv)).map_err(|e| e.to_string())?;
            let v = analyze_config(&c).map_err(|e| e.to_string())?;
            ensure(!v.passive, || format!("draw {i}: {} passive", id.name()))?;
        }
    }
    Ok("200 configurations not passive".into())
}

// ---------------------------------------------------------------------------
// 5. combined damper + actuator PD: sufficient, not necessary

fn capd_bound(p: &PresetParams) -> f64 {
    let [m, b, b1, bd] = ["m", "b", "b1", "bd"].map(|k| get(p, k));
    ((b + bd).powi(2) + b * b1 + b1 * bd) / (2.0 * m)
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut satisfied, mut violated_but_passive, mut violated) = (0, 0, 0);
    for i in 0..1000 {
        let mut kv = random_spring(&mut rng);
        kv.push(("b1", rng.gen_range(0.5..200.0)));
        kv.push(("bd", rng.gen_range(0.0..100.0)));
        kv.push(("kd", 0.0));
        let mut p = params(&kv);
        let bound = capd_bound(&p);
        p.insert("kd".into(), rng.gen_range(0.0..2.0 * bound));
        let c = make_preset(PresetId::CombinedApd, &p).map_err(|e| e.to_string())?;
        let cf = closed_form_condition(&c);
        let v = analyze_config(&c).map_err(|e| e.to_string())?;
        let near_boundary = (get(&p, "kd") - bound).abs() <= 1e-6 * bound;
        if cf.satisfied == Some(true) {
            satisfied += 1;
            ensure(v.passive || near_boundary, || {
                format!("draw {i}: closed form satisfied but not passive: {p:?}")
            })?;
        } else {
            violated += 1;
            if v.passive {
                violated_but_passive += 1;
            }
        }
    }
    let p = params(&[
        ("m", 1.0),
        ("b", 10.0),
        ("k1", 1000.0),
        ("b1", 50.0),
        ("kd", 2000.0),
        ("bd", 25.0),
    ]);
    let c = make_preset(PresetId::CombinedApd, &p).map_err(|e| e.to_string())?;
    ensure(closed_form_condition(&c).satisfied == Some(false), || {
        "kd=2000 should violate the bound".into()
    })?;
    ensure(
        analyze_config(&c).map_err(|e| e.to_string())?.passive,
        || "kd=2000 should be passive".into(),
    )?;
    Ok(format!(
        "{satisfied} satisfied draws all passive; {violated_but_passive}/{violated} violating draws still passive; kd=2000 (bound {:.1}) passive",
        capd_bound(&p)
    ))
}

// ---------------------------------------------------------------------------
// 6, 7. scripted comparisons

fn assertion_lines(assertions: &[Assertion]) -> String {
    assertions
        .iter()
        .map(|a| {
            format!(
                "{}={} [{}]",
                a.name,
                if a.passed { "ok" } else { "FAILED" },
                a.detail
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn criterion_6() -> Outcome {
    let r = reproduce_fig3(20).map_err(|e| e.to_string())?;
    let text = assertion_lines(&r.assertions);
    if r.all_passed() {
        Ok(text)
    } else {
        Err(text)
    }
}

fn criterion_7() -> Outcome {
    let r = reproduce_fig4().map_err(|e| e.to_string())?;
    let thresholds: Vec<String> = r
        .lp_thresholds
        .iter()
        .map(|(m, kd)| {
            format!(
                "{m} kg: {}",
                kd.map_or("none".into(), |k| format!("kd >= {k}"))
            )
        })
        .collect();
    let text = format!(
        "LP thresholds {}; {}",
        thresholds.join(", "),
        assertion_lines(&r.assertions)
    );
    if r.all_passed() {
        Ok(text)
    } else {
        Err(text)
    }
}

// ---------------------------------------------------------------------------
// 8. static stiffness: transfer function vs simulation

fn criterion_8() -> Outcome {
    let all = params(&[
        ("m", 1.0),
        ("b", 10.0),
        ("k1", 1000.0),
        ("k2", 500.0),
        ("b1", 50.0),
        ("b2", 20.0),
        ("kd", 1000.0),
        ("bd", 25.0),
        ("id", 100.0),
    ]);
    let mut checked = Vec::new();
    for id in PresetId::ALL {
        let mut p: PresetParams = id
            .slots()
            .map(|s| (s.as_str().to_string(), all[s.as_str()]))
            .collect();
        // Load-side rows: kd = k1 sits exactly on the lossless boundary and
        // never comes to rest, and the non-passive derivative row needs a
        // small bd to stay coupled-stable with the light test load (bd = 25
        // diverges against 1 kg).
        if id.path_of(Slot::Kd) == Some(ParamPath::ClKp) {
            p.insert("kd".into(), 500.0);
            if p.contains_key("bd") {
                p.insert("bd".into(), 5.0);
            }
        }
        let c = make_preset(id, &p).map_err(|e| e.to_string())?;
        let dc = stiffness_tf(&c).eval(Complex64::new(0.0, 0.0));
        if !(dc.re.is_finite() && dc.re != 0.0) {
            continue;
        }
        let est =
            rendered_stiffness_step(&c, 1.0, 10.0).map_err(|e| format!("{}: {e}", id.name()))?;
        let rel = (est.stiffness - dc.re).abs() / dc.re.abs();
        ensure(rel < 1e-2, || {
            format!("{}: {} vs {}", id.name(), est.stiffness, dc.re)
        })?;
        checked.push(format!("{} {:.1}", id.name(), est.stiffness));
    }
    ensure(checked.len() >= 8, || {
        format!("only {} presets checked", checked.len())
    })?;
    Ok(format!("N/m: {}", checked.join(", ")))
}

// ---------------------------------------------------------------------------
// 9. numerical hygiene

/// Two free bodies joined by a spring-damper, no actuator damping and no
/// control: the separation is a damped oscillator with the reduced mass
/// and the centre of mass stays put.
fn two_body_error(dt: f64) -> Result<f64, String> {
    let (m, ml, k, c, x0, t_end) = (1.0, 3.0, 400.0, 0.5, 0.1, 2.0);
    let config = SeaConfig {
        m,
        b: 0.0,
        d1: ComplianceElement::new(k, c),
        d2: ComplianceElement::ZERO,
        ca: LinearController::ZERO,
        cl: LinearController::ZERO,
        label: None,
    };
    let sc = SimScenario::displaced_load(config, ml, x0).with_timing(t_end, dt);
    let tr = simulate(&sc).map_err(|e| e.to_string())?;
    let mu = m * ml / (m + ml);
    let zeta = c / (2.0 * (k * mu).sqrt());
    let wn = (k / mu).sqrt();
    let wd = wn * (1.0 - zeta * zeta).sqrt();
    let r =
        |t: f64| x0 * (-zeta * wn * t).exp() * ((wd * t).cos() + zeta * wn / wd * (wd * t).sin());
    let cm = ml * x0 / (m + ml);
    let mut worst = 0.0f64;
    for (t, s) in tr.times.iter().zip(&tr.states) {
        let exact = cm + m / (m + ml) * r(*t);
        worst = worst.max((s.x_l - exact).abs());
    }
    Ok(worst)
}

fn companion_stable(c: &[f64]) -> Option<bool> {
    let n = c.len() - 1;
    let lead = c[n];
    let mat = DMatrix::from_fn(n, n, |i, j| {
        if i == 0 {
            -c[n - 1 - j] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let eig = mat.complex_eigenvalues();
    let scale = eig.iter().map(|z| z.norm()).fold(1e-300, f64::max);
    if eig.iter().any(|z| z.re.abs() < 1e-3 * scale) {
        return None;
    }
    Some(eig.iter().all(|z| z.re < 0.0))
}

fn criterion_9() -> Outcome {
    // 4th-order convergence
    let errs: Vec<f64> = [4e-3, 2e-3, 1e-3]
        .iter()
        .map(|&dt| two_body_error(dt))
        .collect::<Result<_, _>>()?;
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    ensure(orders.iter().all(|&p| (p - 4.0).abs() < 0.3), || {
        format!("observed orders {orders:?}, errors {errs:?}")
    })?;

    // Routh–Hurwitz vs eigenvalues
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut compared, mut stable_count) = (0, 0);
    while compared < 1000 {
        let deg = rng.gen_range(1..=6);
        let coeffs: Vec<f64> = if rng.gen_bool(0.5) {
            // random roots, mostly in the left half-plane
            let mut roots = Vec::new();
            while roots.len() < deg {
                let re = rng.gen_range(-5.0..1.0);
                if deg - roots.len() >= 2 && rng.gen_bool(0.5) {
                    let im = rng.gen_range(0.1..5.0);
                    roots.push(Complex64::new(re, im));
                    roots.push(Complex64::new(re, -im));
                } else {
                    roots.push(Complex64::new(re, 0.0));
                }
            }
            Polynomial::from_roots(&roots, rng.gen_range(0.5..3.0))
                .coeffs()
                .to_vec()
        } else {
            let mut c: Vec<f64> = (0..=deg).map(|_| rng.gen_range(-1.0..3.0)).collect();
            if c[deg].abs() < 0.1 {
                c[deg] = 1.0;
            }
            c
        };
        let Some(oracle) = companion_stable(&coeffs) else {
            continue;
        };
        let r = routh_hurwitz(&Polynomial::new(coeffs.clone())).map_err(|e| e.to_string())?;
        ensure(r.stable == oracle, || {
            format!("{coeffs:?}: routh {} vs eigenvalues {oracle}", r.stable)
        })?;
        compared += 1;
        stable_count += usize::from(oracle);
    }

    // frequency response symmetry and simulation determinism
    let c = make_preset(
        PresetId::CombinedApd,
        &params(&[
            ("m", 1.0),
            ("b", 10.0),
            ("k1", 1000.0),
            ("b1", 50.0),
            ("kd", 1000.0),
            ("bd", 25.0),
        ]),
    )
    .map_err(|e| e.to_string())?;
    let tf = stiffness_tf(&c);
    for w in [0.1, 7.0, 900.0] {
        let (a, b) = (tf.eval_jw(w).unwrap(), tf.eval_jw(-w).unwrap());
        ensure((a - b.conj()).norm() <= 1e-12 * a.norm(), || {
            format!("conjugate symmetry at {w}")
        })?;
    }
    let sc = SimScenario::displaced_load(c, 10.0, 0.5).with_timing(1.0, 1e-4);
    ensure(simulate(&sc) == simulate(&sc), || {
        "simulation not deterministic".into()
    })?;

    Ok(format!(
        "RK4 orders {:.2}/{:.2} (errors {:.1e}..{:.1e}); Routh agrees with eigenvalues on 1000 polynomials ({stable_count} stable); see also tests/properties.rs",
        orders[0], orders[1], errs[0], errs[2]
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("closed-form catalog fidelity", criterion_1),
        ("pure-spring load-side P boundary kd = k1", criterion_2),
        ("actuator-side P/PD passive at any gain", criterion_3),
        ("load-side PD/PI never passive", criterion_4),
        (
            "combined damper bound sufficient, not necessary",
            criterion_5,
        ),
        ("three-controller comparison (tuned at 10 kg)", criterion_6),
        ("gain sweep on damped transmission", criterion_7),
        (
            "static stiffness: transfer function vs simulation",
            criterion_8,
        ),
        ("numerical hygiene", criterion_9),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({secs:.1} s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({secs:.1} s): {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
