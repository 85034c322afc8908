//! Adaptive Gauss–Kronrod (7/15) quadrature used as an independent oracle.

#![allow(dead_code)]

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: (f64, f64), tol: f64, depth: u32) -> f64 {
    let (value, err) = whole;
    if err <= tol || depth == 0 {
        return value;
    }
    let m = 0.5 * (a + b);
    let left = gk15(f, a, m);
    let right = gk15(f, m, b);
    adapt(f, a, m, left, 0.5 * tol, depth - 1) + adapt(f, m, b, right, 0.5 * tol, depth - 1)
}

/// ∫ₐᵇ f with absolute tolerance `abs_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let whole = gk15(&f, a, b);
    adapt(&f, a, b, whole, abs_tol, 50)
}

/// ∫ₐᵇ f to roughly `rel_tol` relative accuracy (two passes).
pub fn integrate_rel<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let rough = integrate(&f, a, b, 1e-6 * gk15(&f, a, b).0.abs().max(1e-300));
    integrate(&f, a, b, rel_tol * rough.abs().max(1e-300))
}

/// `1 − e^{−z}` divided by `z`, continuous at 0.
pub fn one_minus_exp_over(z: f64) -> f64 {
    if z < 1e-8 {
        1.0 - 0.5 * z
    } else {
        -(-z).exp_m1() / z
    }
}

/// ∫_{r0}^{∞} (1 − e^{−x r^{−α}}) r dr for r0 ≥ 1, by substituting u = r^{2−α}.
pub fn pgfl_tail(x: f64, alpha: f64, r0: f64, rel_tol: f64) -> f64 {
    let k = alpha / (alpha - 2.0);
    let u_max = r0.powf(2.0 - alpha);
    integrate_rel(
        |u: f64| {
            if u <= 0.0 {
                return x / (alpha - 2.0);
            }
            let z = x * u.powf(k);
            x * one_minus_exp_over(z) / (alpha - 2.0)
        },
        0.0,
        u_max,
        rel_tol,
    )
}

/// ∫_a^b (1 − e^{−x max(r,1)^{−α}}) r dr for finite 0 ≤ a ≤ b.
pub fn pgfl_finite(x: f64, alpha: f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    let g = |r: f64| -(-x * r.max(1.0).powf(-alpha)).exp_m1() * r;
    let mut total = 0.0;
    if a < 1.0 {
        total += integrate_rel(g, a, b.min(1.0), rel_tol);
    }
    if b > 1.0 {
        total += integrate_rel(g, a.max(1.0), b, rel_tol);
    }
    total
}

/// ∫_a^∞ (1 − e^{−x max(r,1)^{−α}}) r dr.
pub fn pgfl_outer(x: f64, alpha: f64, a: f64, rel_tol: f64) -> f64 {
    let mut total = 0.0;
    if a < 1.0 {
        total += pgfl_finite(x, alpha, a, 1.0, rel_tol);
    }
    total + pgfl_tail(x, alpha, a.max(1.0), rel_tol)
}
