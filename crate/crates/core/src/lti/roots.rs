//! Polynomial root finding.
//!
//! Two independent tools live here: an Aberth–Ehrlich iteration that
//! returns every complex root, and a Sturm-chain isolator for the distinct
//! real roots on the positive half-line. The passivity check relies on the
//! latter, since it only ever needs to know where a polynomial in `ω²`
//! changes sign.

use num_complex::Complex64;

use super::polynomial::Polynomial;

const ABERTH_MAX_ITER: usize = 500;

/// All complex roots of `p`, with multiplicity. Exact zeros at the origin
/// are split off before iterating; the rest come from Aberth–Ehrlich
/// followed by a Newton polish.
pub fn complex_roots(p: &Polynomial) -> Vec<Complex64> {
    let Some(_) = p.degree() else {
        return Vec::new();
    };
    let k = p.origin_multiplicity();
    let mut roots = vec![Complex64::new(0.0, 0.0); k];
    let q = p.unshift(k);
    let n = q.degree().unwrap_or(0);
    match n {
        0 => {}
        1 => roots.push(Complex64::new(-q.coeff(0) / q.coeff(1), 0.0)),
        2 => roots.extend(quadratic_roots(q.coeff(2), q.coeff(1), q.coeff(0))),
        _ => roots.extend(aberth(&q)),
    }
    roots
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        // numerically stable pairing
        let t = -0.5 * (b + b.signum() * sq);
        if t == 0.0 {
            return [Complex64::new(0.0, 0.0); 2];
        }
        [Complex64::new(t / a, 0.0), Complex64::new(c / t, 0.0)]
    } else {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a.abs());
        [Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

fn aberth(q: &Polynomial) -> Vec<Complex64> {
    let n = q.degree().expect("nonzero polynomial");
    let dq = q.derivative();
    let lead = q.leading();
    // Initial radius from the geometric mean of root magnitudes.
    let r0 = (q.coeff(0).abs() / lead.abs())
        .powf(1.0 / n as f64)
        .max(1e-12);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(r0, theta)
        })
        .collect();

    for _ in 0..ABERTH_MAX_ITER {
        let mut max_step = 0.0f64;
        let mut max_mag = 0.0f64;
        for i in 0..n {
            let pz = q.eval_complex(z[i]);
            if pz.norm() == 0.0 {
                continue;
            }
            let ratio = pz / dq.eval_complex(z[i]);
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if w.is_finite() {
                z[i] -= w;
                max_step = max_step.max(w.norm());
            }
            max_mag = max_mag.max(z[i].norm());
        }
        if max_step <= 4.0 * f64::EPSILON * max_mag.max(f64::MIN_POSITIVE) {
            break;
        }
    }

    for zi in z.iter_mut() {
        for _ in 0..2 {
            let d = dq.eval_complex(*zi);
            if d.norm() == 0.0 {
                break;
            }
            let step = q.eval_complex(*zi) / d;
            if !step.is_finite() || step.norm() > 1e-6 * zi.norm().max(1.0) {
                break;
            }
            *zi -= step;
        }
    }
    z
}

/// Distinct real roots of `p` in the open interval `(0, ∞)`, ascending.
///
/// Roots are isolated with a Sturm chain on a rescaled copy of `p` (so
/// every positive root lies in `(0, 1]`) and then refined by Sturm-count
/// bisection, which also handles even-multiplicity roots where `p` does
/// not change sign.
pub fn positive_real_roots(p: &Polynomial) -> Vec<f64> {
    let q = p.unshift(p.origin_multiplicity());
    let Some(n) = q.degree() else {
        return Vec::new();
    };
    if n == 0 {
        return Vec::new();
    }
    let bound = positive_root_bound(&q);
    if bound == 0.0 || !bound.is_finite() {
        return Vec::new();
    }

    // r(v) = q(bound * v), normalized to unit max coefficient
    let mut scaled: Vec<f64> = Vec::with_capacity(n + 1);
    let mut pow = 1.0;
    for &c in q.coeffs() {
        scaled.push(c * pow);
        pow *= bound;
    }
    let r = normalize(Polynomial::new(scaled));
    let chain = SturmChain::new(r);

    let mut roots = Vec::new();
    let mut stack = vec![(0.0f64, 1.0f64, 0usize)];
    while let Some((a, b, depth)) = stack.pop() {
        let count = chain.count_in(a, b);
        if count == 0 {
            continue;
        }
        if count == 1 || depth > 64 {
            roots.push(chain.refine(a, b) * bound);
            continue;
        }
        let mid = 0.5 * (a + b);
        stack.push((mid, b, depth + 1));
        stack.push((a, mid, depth + 1));
    }
    roots.sort_by(|x, y| x.total_cmp(y));
    roots
}

/// Upper bound on root magnitudes (Fujiwara), padded slightly so the
/// bound itself is never a root.
fn positive_root_bound(q: &Polynomial) -> f64 {
    let n = q.degree().unwrap_or(0);
    let an = q.leading().abs();
    let mut m = 0.0f64;
    for i in 0..n {
        let k = (n - i) as f64;
        let mut ratio = q.coeff(i).abs() / an;
        if i == 0 {
            ratio *= 0.5;
        }
        m = m.max(ratio.powf(1.0 / k));
    }
    2.0 * m * 1.01
}

fn normalize(p: Polynomial) -> Polynomial {
    let m = p.max_abs_coeff();
    if m == 0.0 {
        p
    } else {
        p.scale(1.0 / m)
    }
}

struct SturmChain {
    seq: Vec<Polynomial>,
}

impl SturmChain {
    /// Remainders smaller than this, relative to the dividend, end the
    /// chain (the last nonzero element is then the GCD with the derivative).
    const REM_TOL: f64 = 1e-10;

    fn new(p: Polynomial) -> Self {
        let mut seq = vec![p.clone(), normalize(p.derivative())];
        loop {
            let len = seq.len();
            let (a, b) = (&seq[len - 2], &seq[len - 1]);
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            let (_, rem) = a.div_rem(b);
            if rem.max_abs_coeff() <= Self::REM_TOL * a.max_abs_coeff() {
                break;
            }
            seq.push(normalize(-rem));
        }
        SturmChain { seq }
    }

    fn variations(&self, x: f64) -> usize {
        let mut count = 0;
        let mut last = 0.0f64;
        for p in &self.seq {
            let v = p.eval(x);
            if v == 0.0 {
                continue;
            }
            if last != 0.0 && (v > 0.0) != (last > 0.0) {
                count += 1;
            }
            last = v;
        }
        count
    }

    /// Distinct roots in `(a, b]`.
    fn count_in(&self, a: f64, b: f64) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }

    fn refine(&self, mut a: f64, mut b: f64) -> f64 {
        for _ in 0..200 {
            if b - a <= 4.0 * f64::EPSILON * b {
                break;
            }
            let mid = 0.5 * (a + b);
            if self.count_in(a, mid) > 0 {
                b = mid;
            } else {
                a = mid;
            }
        }
        0.5 * (a + b)
    }
}
