//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use curveflow::Vec3;

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = KRONROD_WEIGHTS[7] * fc;
    let mut gauss = GAUSS_WEIGHTS[3] * fc;
    for i in 0..7 {
        let x = h * KRONROD_NODES[i];
        let pair = f(c - x) + f(c + x);
        kronrod += KRONROD_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod (7/15) quadrature to an absolute tolerance.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, err) = gk15(f, a, b);
        // stop once the estimate is at rounding level, or the recursion explodes
        if err <= tol || err <= 1e-15 * v.abs() || depth == 0 {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, depth - 1) + rec(f, m, b, 0.5 * tol, depth - 1)
    }
    rec(&f, a, b, tol, 30)
}

pub fn elliptic_k_quad(m: f64) -> f64 {
    integrate(|t| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, PI / 2.0, 1e-15)
}

pub fn elliptic_e_quad(m: f64) -> f64 {
    integrate(|t| (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, PI / 2.0, 1e-15)
}

pub fn i_s_quad(delta: f64) -> f64 {
    // sin 2πv integrates to zero, so subtract 1 from the kernel to keep
    // relative accuracy at small delta
    integrate(
        |v| {
            let s = (2.0 * PI * v).sin();
            s * (-1.5 * (-delta * s).ln_1p()).exp_m1()
        },
        0.0,
        1.0,
        1e-15 * delta.abs(),
    )
}

pub fn i_0_quad(delta: f64) -> f64 {
    integrate(|v| 1.0 / (1.0 - delta * (2.0 * PI * v).sin()).powf(1.5), 0.0, 1.0, 1e-14)
}

/// The Biot-Savart integral of a smooth closed curve, by adaptive
/// quadrature in its parameter.
pub fn biot_savart_quad(p: Vec3, curve: impl Fn(f64) -> Vec3, tangent_du: impl Fn(f64) -> Vec3) -> Vec3 {
    let comp = |c: usize| {
        integrate(
            |u| {
                let r = p - curve(u);
                let v = r.cross(tangent_du(u)) / r.norm().powi(3);
                v.to_array()[c]
            },
            0.0,
            1.0,
            1e-13,
        )
    };
    Vec3::new(comp(0), comp(1), comp(2))
}

/// Least-squares slope of `-log(error)` against `log(resolution)`.
pub fn fitted_order(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    -sxy / sxx
}

pub fn report(criterion: u32, title: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion} [{}] {title}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}
