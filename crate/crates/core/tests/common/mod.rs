//! Independent oracles: hand-transcribed operators, closed forms and
//! numerical expansions.

#![allow(dead_code)]

use oscibo_core::pairs::pair_index;
use oscibo_core::{PuiseuxSeries, SymmetricPairMap};

pub const SQRT2: f64 = std::f64::consts::SQRT_2;

pub fn mu(mi: f64, mj: f64) -> f64 {
    mi * mj / (mi + mj)
}

/// One term `coef(ρ) ∂_p ∂_q` (or `coef ∂_p` when `q` is `None`), with
/// `coef(ρ) = constant + Σ linear_r ρ_r`.
#[derive(Debug, Clone)]
pub struct Term {
    pub p: (usize, usize),
    pub q: Option<(usize, usize)>,
    pub constant: f64,
    pub linear: Vec<((usize, usize), f64)>,
}

fn second(p: (usize, usize), q: (usize, usize), linear: Vec<((usize, usize), f64)>) -> Term {
    Term {
        p,
        q: Some(q),
        constant: 0.0,
        linear,
    }
}

fn first(p: (usize, usize), constant: f64) -> Term {
    Term {
        p,
        q: None,
        constant,
        linear: Vec::new(),
    }
}

/// Three-body radial operator, term by term (0-based labels).
pub fn three_body_terms(m: [f64; 3], d: f64) -> Vec<Term> {
    let (p12, p13, p23) = ((0, 1), (0, 2), (1, 2));
    let (m1, m2, m3) = (m[0], m[1], m[2]);
    let (mu12, mu13, mu23) = (mu(m1, m2), mu(m1, m3), mu(m2, m3));
    vec![
        second(p13, p13, vec![(p13, 2.0 / mu13)]),
        second(p23, p23, vec![(p23, 2.0 / mu23)]),
        second(p12, p12, vec![(p12, 2.0 / mu12)]),
        second(p13, p12, vec![(p13, 2.0 / m1), (p12, 2.0 / m1), (p23, -2.0 / m1)]),
        second(p13, p23, vec![(p13, 2.0 / m3), (p23, 2.0 / m3), (p12, -2.0 / m3)]),
        second(p23, p12, vec![(p23, 2.0 / m2), (p12, 2.0 / m2), (p13, -2.0 / m2)]),
        first(p13, d / mu13),
        first(p23, d / mu23),
        first(p12, d / mu12),
    ]
}

/// Four-body radial operator, term by term (0-based labels).
pub fn four_body_terms(m: [f64; 4], d: f64) -> Vec<Term> {
    let (p12, p13, p14, p23, p24, p34) = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3));
    let (m1, m2, m3, m4) = (m[0], m[1], m[2], m[3]);
    let u = |a: usize, b: usize| mu(m[a], m[b]);
    let mut t = vec![
        second(p12, p12, vec![(p12, 2.0 / u(0, 1))]),
        second(p13, p13, vec![(p13, 2.0 / u(0, 2))]),
        second(p14, p14, vec![(p14, 2.0 / u(0, 3))]),
        second(p23, p23, vec![(p23, 2.0 / u(1, 2))]),
        second(p24, p24, vec![(p24, 2.0 / u(1, 3))]),
        second(p34, p34, vec![(p34, 2.0 / u(2, 3))]),
    ];
    let cross = |w: f64, a, b, c| vec![(a, w), (b, w), (c, -w)];
    let w1 = 2.0 / m1;
    t.push(second(p12, p13, cross(w1, p12, p13, p23)));
    t.push(second(p12, p14, cross(w1, p12, p14, p24)));
    t.push(second(p13, p14, cross(w1, p13, p14, p34)));
    let w2 = 2.0 / m2;
    t.push(second(p12, p23, cross(w2, p12, p23, p13)));
    t.push(second(p12, p24, cross(w2, p12, p24, p14)));
    t.push(second(p23, p24, cross(w2, p23, p24, p34)));
    let w3 = 2.0 / m3;
    t.push(second(p13, p23, cross(w3, p13, p23, p12)));
    t.push(second(p13, p34, cross(w3, p13, p34, p14)));
    t.push(second(p23, p34, cross(w3, p23, p34, p24)));
    let w4 = 2.0 / m4;
    t.push(second(p14, p24, cross(w4, p14, p24, p12)));
    t.push(second(p14, p34, cross(w4, p14, p34, p13)));
    t.push(second(p24, p34, cross(w4, p24, p34, p23)));
    for (p, (a, b)) in [(p12, (0, 1)), (p13, (0, 2)), (p14, (0, 3)), (p23, (1, 2)), (p24, (1, 3)), (p34, (2, 3))] {
        t.push(first(p, d / u(a, b)));
    }
    t
}

/// `(C, L)` with `-Δ e^{-Σcρ} = (C - Σ L ρ) e^{-Σcρ}` for an operator given
/// term by term.
pub fn symbol_from_terms(n: usize, terms: &[Term], c: &SymmetricPairMap) -> (f64, Vec<f64>) {
    let mut constant = 0.0;
    let mut linear = vec![0.0; n * (n - 1) / 2];
    let cp = |p: (usize, usize)| c.get(p.0, p.1);
    for term in terms {
        match term.q {
            None => constant += term.constant * cp(term.p),
            Some(q) => {
                let w = cp(term.p) * cp(q);
                constant -= term.constant * w;
                for &(r, coef) in &term.linear {
                    linear[pair_index(n, r.0, r.1)] += coef * w;
                }
            }
        }
    }
    (constant, linear)
}

/// Three-body potential coefficients `ν` from reduced exponents `a, b, c`
/// on pairs 12, 13, 23.
pub fn freq3(m: [f64; 3], a: f64, b: f64, c: f64) -> [f64; 3] {
    let (m1, m2, m3) = (m[0], m[1], m[2]);
    let (u12, u13, u23) = (mu(m1, m2), mu(m1, m3), mu(m2, m3));
    [
        a * a * u12 + a * b * u12 * u13 / m1 + a * c * u12 * u23 / m2 - b * c * u13 * u23 / m3,
        b * b * u13 + a * b * u12 * u13 / m1 + b * c * u13 * u23 / m3 - a * c * u12 * u23 / m2,
        c * c * u23 + a * c * u12 * u23 / m2 + b * c * u13 * u23 / m3 - a * b * u12 * u13 / m1,
    ]
}

/// Four-body potential coefficients from reduced exponents on pairs
/// 12, 13, 14, 23, 24, 34 (named a, b, c, e, f, g).
pub fn freq4(m: [f64; 4], x: [f64; 6]) -> [f64; 6] {
    let [a, b, c, e, f, g] = x;
    let [m1, m2, m3, m4] = m;
    let u12 = mu(m1, m2);
    let u13 = mu(m1, m3);
    let u14 = mu(m1, m4);
    let u23 = mu(m2, m3);
    let u24 = mu(m2, m4);
    let u34 = mu(m3, m4);
    [
        a * a * u12 + a * b * u12 * u13 / m1 + a * c * u12 * u14 / m1 + a * e * u12 * u23 / m2 + a * f * u12 * u24 / m2
            - b * e * u13 * u23 / m3
            - c * f * u14 * u24 / m4,
        b * b * u13 + b * a * u13 * u12 / m1 + b * c * u13 * u14 / m1 + b * e * u13 * u23 / m3 + b * g * u13 * u34 / m3
            - a * e * u12 * u23 / m2
            - c * g * u14 * u34 / m4,
        c * c * u14 + c * a * u14 * u12 / m1 + c * b * u14 * u13 / m1 + c * f * u14 * u24 / m4 + c * g * u14 * u34 / m4
            - a * f * u12 * u24 / m2
            - b * g * u13 * u34 / m3,
        e * e * u23 + e * a * u23 * u12 / m2 + e * f * u23 * u24 / m2 + e * b * u23 * u13 / m3 + e * g * u23 * u34 / m3
            - a * b * u12 * u13 / m1
            - f * g * u24 * u34 / m4,
        f * f * u24 + f * a * u24 * u12 / m2 + f * e * u24 * u23 / m2 + f * c * u24 * u14 / m4 + f * g * u24 * u34 / m4
            - a * c * u12 * u14 / m1
            - e * g * u23 * u34 / m3,
        g * g * u34 + g * b * u34 * u13 / m3 + g * e * u34 * u23 / m3 + g * c * u34 * u14 / m4 + g * f * u34 * u24 / m4
            - b * c * u13 * u14 / m1
            - e * f * u23 * u24 / m2,
    ]
}

/// Spring coefficients (of `ρ`) for three equal masses.
pub fn v3_equal(m: f64, omega: f64, a: f64, b: f64, c: f64) -> [f64; 3] {
    let s = 0.5 * m * omega * omega;
    [
        s * (2.0 * a * a + a * (b + c) - b * c),
        s * (2.0 * b * b + b * (a + c) - a * c),
        s * (2.0 * c * c + c * (a + b) - a * b),
    ]
}

/// Spring coefficients for four equal masses; the last entry multiplies `ρ₃₄`.
pub fn v4_equal(m: f64, omega: f64, x: [f64; 6]) -> [f64; 6] {
    let [a, b, c, e, f, g] = x;
    let s = 0.5 * m * omega * omega;
    [
        s * (2.0 * a * a + a * (b + c + e + f) - b * e - c * f),
        s * (2.0 * b * b + b * (a + c + e + g) - a * e - c * g),
        s * (2.0 * c * c + c * (a + b + f + g) - a * f - b * g),
        s * (2.0 * e * e + e * (a + b + f + g) - a * b - f * g),
        s * (2.0 * f * f + f * (a + c + e + g) - a * c - e * g),
        s * (2.0 * g * g + g * (b + c + e + f) - b * c - e * f),
    ]
}

/// Triangle area from squared sides.
pub fn area_from_sides(r12: f64, r13: f64, r23: f64) -> f64 {
    0.25 * (2.0 * (r12 * r13 + r12 * r23 + r13 * r23) - (r12 * r12 + r13 * r13 + r23 * r23)).sqrt()
}

/// Tetrahedron volume from squared edges.
pub fn tetra_from_edges(r: [f64; 6]) -> f64 {
    let [r12, r13, r14, r23, r24, r34] = r;
    let bracket = ((r13 + r14 + r23 + r24) * r34 - (r13 - r14) * (r23 - r24) - r34 * r34) * r12
        - r13 * r13 * r24
        - r34 * r12 * r12
        + r23 * ((r14 - r24) * r34 - r14 * (r14 + r23 - r24))
        + r13 * (r14 * (r23 + r24 - r34) + r24 * (r23 - r24 + r34));
    bracket.sqrt() / 12.0
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Area of a triangle in ℝ³ from `½|u×v|`.
pub fn area_cross(p: &[Vec<f64>]) -> f64 {
    let u = sub(&p[1], &p[0]);
    let v = sub(&p[2], &p[0]);
    let w = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    0.5 * (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt()
}

/// Volume of a tetrahedron in ℝ³ from `|u·(v×w)|/6`.
pub fn volume_triple(p: &[Vec<f64>]) -> f64 {
    let u = sub(&p[1], &p[0]);
    let v = sub(&p[2], &p[0]);
    let w = sub(&p[3], &p[0]);
    let vw = [v[1] * w[2] - v[2] * w[1], v[2] * w[0] - v[0] * w[2], v[0] * w[1] - v[1] * w[0]];
    (u[0] * vw[0] + u[1] * vw[1] + u[2] * vw[2]).abs() / 6.0
}

/// `√det(EᵀE)/(n-1)!` with `E` the edge vectors from the first point.
pub fn content_gram(p: &[Vec<f64>]) -> f64 {
    let k = p.len() - 1;
    let edges: Vec<Vec<f64>> = p[1..].iter().map(|q| sub(q, &p[0])).collect();
    let gram = nalgebra::DMatrix::from_fn(k, k, |i, j| edges[i].iter().zip(&edges[j]).map(|(a, b)| a * b).sum::<f64>());
    let fact: f64 = (1..=k).map(|v| v as f64).product();
    gram.determinant().max(0.0).sqrt() / fact
}

// ---- two-heavy closed forms ----

pub fn e0_three(d: f64, m: f64, k: f64) -> f64 {
    0.5 * d * ((k * (m + 2.0) / m).sqrt() + (k + 1.0).sqrt())
}

pub fn ebo_three(d: f64, m: f64, k: f64) -> f64 {
    0.5 * d * ((2.0 * k / m).sqrt() + (k + 1.0).sqrt())
}

pub fn e0_four(d: f64, m: f64, k1: f64, k2: f64) -> f64 {
    0.5 * d * ((1.0 + 2.0 * k2).sqrt() + (2.0 * (k1 + k2) / m).sqrt() + (2.0 * k2 * (1.0 + m) / m).sqrt())
}

pub fn ebo_four(d: f64, m: f64, k1: f64, k2: f64) -> f64 {
    0.5 * d * ((1.0 + 2.0 * k2).sqrt() + (2.0 * k2 / m).sqrt() + (2.0 * (k1 + k2) / m).sqrt())
}

pub fn e0_n(n: f64, d: f64, m: f64, k1: f64, k2: f64) -> f64 {
    0.5 * d
        * ((1.0 + (n - 2.0) * k2).sqrt()
            + (n - 3.0) * ((2.0 * k2 + (n - 2.0) * k1) / m).sqrt()
            + (k2 * (2.0 + (n - 2.0) * m) / m).sqrt())
}

/// `α_n`, `β_n`, `γ_n` in closed form.
pub fn abc_n(n: f64, m: f64, k1: f64, k2: f64) -> (f64, f64, f64) {
    let den = 2.0 + (n - 2.0) * m;
    let alpha = 0.5 * ((1.0 + (n - 2.0) * k2).sqrt() - (n - 2.0) * (k2 * m / den).sqrt());
    let beta = 0.5 * (m + 1.0) / m * (k2 * m / den).sqrt();
    let gamma = ((((n - 2.0) * k1) + 2.0 * k2).sqrt() - (4.0 * k2 / den).sqrt()) / ((n - 2.0) * m.sqrt());
    (alpha, beta, gamma)
}

/// `E_exact - E_BO` without cancellation.
pub fn gap_n(n: f64, d: f64, m: f64, k2: f64) -> f64 {
    0.5 * d * (k2 / m).sqrt() * (n - 2.0) * m / ((2.0 + (n - 2.0) * m).sqrt() + SQRT2)
}

pub fn delta_e_three(m: f64, k: f64) -> f64 {
    1.0 - ((2.0 * k / m).sqrt() + (k + 1.0).sqrt()) / ((k * (m + 2.0) / m).sqrt() + (k + 1.0).sqrt())
}

pub fn delta_e_four(m: f64, k1: f64, k2: f64) -> f64 {
    let bo = (1.0 + 2.0 * k2).sqrt() + (2.0 * k2 / m).sqrt() + (2.0 * (k1 + k2) / m).sqrt();
    let ex = (1.0 + 2.0 * k2).sqrt() + (2.0 * (k1 + k2) / m).sqrt() + (2.0 * k2 * (1.0 + m) / m).sqrt();
    1.0 - bo / ex
}

/// Closed-form small-`m` coefficients of the three-body relative error at
/// `m`, `m^{3/2}`, `m²`.
pub fn del_e_three_coefficients(k: f64) -> [f64; 3] {
    [0.25, -0.25 * ((k + 1.0) / (2.0 * k)).sqrt(), (k + 4.0) / (32.0 * k)]
}

/// Closed-form four-body coefficients at `m` and `m^{3/2}`.
pub fn ratio4_coefficients(k1: f64, k2: f64) -> [f64; 2] {
    let s = k2.sqrt() + (k1 + k2).sqrt();
    [0.5 * k2.sqrt() / s, -((1.0 + 2.0 * k2) * k2).sqrt() / (2.0 * SQRT2 * s * s)]
}

/// Closed-form general-`n` coefficients at `m` and `m^{3/2}`.
pub fn ratio_n_coefficients(n: f64, k1: f64, k2: f64) -> [f64; 2] {
    let den = (n - 3.0) * (k1 * (n - 2.0) + 2.0 * k2).sqrt() + (2.0 * k2).sqrt();
    [
        k2.sqrt() * (n - 2.0) / (2.0 * SQRT2 * den),
        -k2.sqrt() * (n - 2.0) * (k2 * (n - 2.0) + 1.0).sqrt() / (2.0 * SQRT2 * den * den),
    ]
}

/// Closed-form energy-gap coefficients at `m^{1/2}`, `m^{3/2}`, `m^{5/2}`.
pub fn gap_coefficients(n: usize, d: f64, k1: f64, k2: f64) -> [f64; 3] {
    let _ = k1;
    match n {
        3 => {
            let s = d * k2.sqrt() / (4.0 * SQRT2);
            [s, -s / 8.0, s / 32.0]
        }
        4 => {
            let s = d * k2.sqrt() / (2.0 * SQRT2);
            [s, -s / 4.0, s / 8.0]
        }
        _ => {
            let nl = (n - 2) as f64;
            let s = d * k2.sqrt() * nl / (128.0 * SQRT2);
            [32.0 * s, -4.0 * nl * s, nl * nl * s]
        }
    }
}

/// Closed-form phase-gap coefficients (exponent of the BO state minus that of
/// the exact state, per class) at `m^{3/2}` and `m^{5/2}`:
/// `[heavy_heavy, heavy_light, light_light]`.
pub fn phase_gap_coefficients(n: f64, k2: f64) -> [[f64; 2]; 3] {
    let r = |c: f64| [c, -c * 3.0 * (n - 2.0) / 8.0];
    // Φ_exact - Φ_BO on each class; the stored exponent is -Φ.
    let hh = -(n - 2.0) * (n - 2.0) * k2.sqrt() / (16.0 * SQRT2);
    let hl = (n - 2.0) * k2.sqrt() / (8.0 * SQRT2);
    let ll = -k2.sqrt() / (4.0 * SQRT2);
    [r(hh), r(hl), r(ll)]
}

/// `(1 - T)` for the three-body exact/BO pair without cancellation.
pub fn one_minus_t(m: f64, d: f64) -> f64 {
    // with w = sqrt(1 + m/2): T^{1/d} = 2 sqrt(w) / (1 + w)
    let u = 0.5 * m;
    let w = (1.0 + u).sqrt();
    let e = u / ((w + 1.0) * (w.sqrt() + 1.0));
    let log_t = -d * (e * e / (2.0 * w.sqrt())).ln_1p();
    -log_t.exp_m1()
}

/// Normalization prefactor of the exact three-body state.
pub fn norm_three(k: f64, m: f64, d: f64) -> f64 {
    let gamma = |x: f64| libm::tgamma(x);
    let angular = std::f64::consts::PI.sqrt() * gamma(d / 2.0) * gamma((d - 1.0) / 2.0) / 2f64.powf(d - 4.0);
    angular.powf(-0.5) * (k * m / (m + 2.0) * (1.0 + k)).powf(d / 8.0)
}

/// Closed-form electronic prefactor for three bodies: `π^{-d/4}(2Km)^{d/8}`.
pub fn norm_electronic_three(k: f64, m: f64, d: f64) -> f64 {
    std::f64::consts::PI.powf(-d / 4.0) * (2.0 * k * m).powf(d / 8.0)
}

// ---- numerical expansion ----

/// Numerical coefficients `c_k`, `k = low..=high`, of `f(t) = Σ c_k t^k`.
///
/// For each `k` the lower coefficients taken from `reference` are removed,
/// the remainder is divided by `t^k` and extrapolated to `t = 0` from
/// `t₀, t₀/2, t₀/4, t₀/8`. Coefficients are checked in increasing order, so
/// a wrong lower coefficient shows up before it can contaminate a later one.
pub fn numeric_expansion(f: impl Fn(f64) -> f64, reference: &PuiseuxSeries, low: i32, high: i32, t0: f64) -> Vec<f64> {
    let ts: Vec<f64> = (0..4).map(|i| t0 / 2f64.powi(i)).collect();
    let values: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
    (low..=high)
        .map(|k| {
            let r: Vec<f64> = ts
                .iter()
                .zip(&values)
                .map(|(&t, &v)| {
                    let known: f64 = (low..k).map(|j| reference.coeff_t(j) * t.powi(j)).sum();
                    (v - known) / t.powi(k)
                })
                .collect();
            richardson(&r)
        })
        .collect()
}

/// Neville table for values at `h, h/2, h/4, …` with errors in integer
/// powers of `h`.
pub fn richardson(values: &[f64]) -> f64 {
    let mut row = values.to_vec();
    for j in 1..values.len() {
        let factor = 2f64.powi(j as i32);
        row = row.windows(2).map(|w| w[1] + (w[1] - w[0]) / (factor - 1.0)).collect();
    }
    row[0]
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).abs() / a.abs().max(b.abs())
}
