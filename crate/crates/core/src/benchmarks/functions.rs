//! Basic functions, their input transforms and the composition rule.

use std::f64::consts::{E, PI};

use nalgebra::DMatrix;

/// Offset that moves the Schwefel optimum onto the shift point.
pub const SCHWEFEL_OFFSET: f64 = 4.209687462275036e2;

/// `m * x` for a square matrix.
pub fn rotate(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    let d = x.len();
    (0..d).map(|i| (0..d).map(|j| m[(i, j)] * x[j]).sum()).collect()
}

/// Oscillation transform applied coordinate-wise.
pub fn t_osz(x: &mut [f64]) {
    for v in x.iter_mut() {
        if *v == 0.0 {
            continue;
        }
        let h = v.abs().ln();
        let (c1, c2) = if *v > 0.0 { (10.0, 7.9) } else { (5.5, 3.1) };
        *v = v.signum() * (h + 0.049 * ((c1 * h).sin() + (c2 * h).sin())).exp();
    }
}

/// Asymmetry transform with strength `beta`; negative coordinates pass through.
pub fn t_asy(x: &mut [f64], beta: f64) {
    let denom = (x.len() - 1) as f64;
    for (i, v) in x.iter_mut().enumerate() {
        if *v > 0.0 {
            *v = v.powf(1.0 + beta * i as f64 / denom * v.sqrt());
        }
    }
}

/// Diagonal ill-conditioning with ratio `alpha` between the extreme coordinates' sqrt-scales.
pub fn lambda_scale(x: &mut [f64], alpha: f64) {
    let denom = (x.len() - 1) as f64;
    for (i, v) in x.iter_mut().enumerate() {
        *v *= alpha.powf(i as f64 / (2.0 * denom));
    }
}

fn sphere(z: &[f64]) -> f64 {
    z.iter().map(|v| v * v).sum()
}

fn elliptic(z: &[f64]) -> f64 {
    let denom = (z.len() - 1) as f64;
    z.iter().enumerate().map(|(i, v)| 1e6f64.powf(i as f64 / denom) * v * v).sum()
}

fn bent_cigar(z: &[f64]) -> f64 {
    z[0] * z[0] + 1e6 * z[1..].iter().map(|v| v * v).sum::<f64>()
}

fn discus(z: &[f64]) -> f64 {
    1e6 * z[0] * z[0] + z[1..].iter().map(|v| v * v).sum::<f64>()
}

fn different_powers(z: &[f64]) -> f64 {
    let denom = (z.len() - 1) as f64;
    z.iter()
        .enumerate()
        .map(|(i, v)| v.abs().powf(2.0 + 4.0 * i as f64 / denom))
        .sum::<f64>()
        .sqrt()
}

fn rosenbrock(z: &[f64]) -> f64 {
    z.windows(2)
        .map(|w| 100.0 * (w[0] * w[0] - w[1]).powi(2) + (w[0] - 1.0).powi(2))
        .sum()
}

fn schaffers_f7(z: &[f64]) -> f64 {
    let n = (z.len() - 1) as f64;
    let total: f64 = z
        .windows(2)
        .map(|w| {
            let s = (w[0] * w[0] + w[1] * w[1]).sqrt();
            s.sqrt() + s.sqrt() * (50.0 * s.powf(0.2)).sin().powi(2)
        })
        .sum();
    (total / n).powi(2)
}

fn ackley(z: &[f64]) -> f64 {
    let d = z.len() as f64;
    let sq = sphere(z) / d;
    let cos = z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / d;
    -20.0 * (-0.2 * sq.sqrt()).exp() - cos.exp() + 20.0 + E
}

const WEIERSTRASS_TERMS: i32 = 20;

fn weierstrass(z: &[f64]) -> f64 {
    let (a, b) = (0.5f64, 3.0f64);
    let term = |v: f64| -> f64 {
        (0..=WEIERSTRASS_TERMS)
            .map(|k| a.powi(k) * (2.0 * PI * b.powi(k) * (v + 0.5)).cos())
            .sum()
    };
    z.iter().map(|v| term(*v)).sum::<f64>() - z.len() as f64 * term(0.0)
}

fn griewank(z: &[f64]) -> f64 {
    let product: f64 = z.iter().enumerate().map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos()).product();
    sphere(z) / 4000.0 - product + 1.0
}

fn rastrigin(z: &[f64]) -> f64 {
    z.iter().map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0).sum()
}

fn schwefel_term(z: f64, d: f64) -> f64 {
    if z.abs() <= 500.0 {
        z * z.abs().sqrt().sin()
    } else if z > 500.0 {
        let m = 500.0 - z % 500.0;
        m * m.abs().sqrt().sin() - (z - 500.0).powi(2) / (10_000.0 * d)
    } else {
        let m = z.abs() % 500.0 - 500.0;
        m * m.abs().sqrt().sin() - (z + 500.0).powi(2) / (10_000.0 * d)
    }
}

/// Schwefel 1.2-style sum, anchored so that `z = SCHWEFEL_OFFSET` everywhere gives 0.
fn schwefel(z: &[f64]) -> f64 {
    let d = z.len() as f64;
    let anchor = schwefel_term(SCHWEFEL_OFFSET, d);
    z.iter().map(|v| anchor - schwefel_term(*v, d)).sum()
}

fn katsuura(z: &[f64]) -> f64 {
    let d = z.len() as f64;
    let exponent = 10.0 / d.powf(1.2);
    let product: f64 = z
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let inner: f64 = (1..=32)
                .map(|j| {
                    let p = 2f64.powi(j);
                    (p * v - (p * v).round()).abs() / p
                })
                .sum();
            (1.0 + (i + 1) as f64 * inner).powf(exponent)
        })
        .product();
    10.0 / (d * d) * product - 10.0 / (d * d)
}

fn expanded<F: Fn(f64, f64) -> f64>(z: &[f64], pair: F) -> f64 {
    let d = z.len();
    (0..d).map(|i| pair(z[i], z[(i + 1) % d])).sum()
}

fn griewank_rosenbrock(z: &[f64]) -> f64 {
    expanded(z, |a, b| {
        let r = 100.0 * (a * a - b).powi(2) + (a - 1.0).powi(2);
        r * r / 4000.0 - r.cos() + 1.0
    })
}

fn schaffer_f6(z: &[f64]) -> f64 {
    expanded(z, |a, b| {
        let s = a * a + b * b;
        0.5 + (s.sqrt().sin().powi(2) - 0.5) / (1.0 + 0.001 * s).powi(2)
    })
}

/// Coordinates larger than 0.5 in magnitude snap to the nearest multiple of 0.5.
fn round_to_halves(z: &mut [f64]) {
    for v in z.iter_mut() {
        if v.abs() > 0.5 {
            *v = (2.0 * *v).round() / 2.0;
        }
    }
}

/// Input scale applied to `x - shift` before the outer rotation.
pub fn input_scale(base: usize) -> f64 {
    match base {
        6 => 2.048 / 100.0,
        9 => 0.5 / 100.0,
        10 => 600.0 / 100.0,
        11..=13 => 5.12 / 100.0,
        14 | 15 => 1000.0 / 100.0,
        16 | 19 => 5.0 / 100.0,
        17 | 18 => 10.0 / 100.0,
        _ => 1.0,
    }
}

/// One shifted and rotated basic function.
#[derive(Clone, Debug)]
pub struct Component<'a> {
    pub shift: &'a [f64],
    pub rotation: &'a DMatrix<f64>,
    pub inner: &'a DMatrix<f64>,
}

/// Evaluates basic function `base` (1..=20) with value 0 at `component.shift`.
///
/// The outer rotation acts first on the scaled offset; `inner` is every later rotation.
pub fn evaluate_basic(base: usize, c: &Component, x: &[f64]) -> f64 {
    let scale = input_scale(base);
    let offset: Vec<f64> = x.iter().zip(c.shift).map(|(v, o)| scale * (v - o)).collect();
    let mut z = rotate(c.rotation, &offset);
    match base {
        1 => sphere(&z),
        2 => {
            t_osz(&mut z);
            elliptic(&z)
        }
        3 => {
            t_asy(&mut z, 0.5);
            bent_cigar(&rotate(c.inner, &z))
        }
        4 => {
            t_osz(&mut z);
            discus(&z)
        }
        5 => different_powers(&z),
        6 => {
            z.iter_mut().for_each(|v| *v += 1.0);
            rosenbrock(&z)
        }
        7..=9 => {
            t_asy(&mut z, 0.5);
            let mut z = rotate(c.inner, &z);
            lambda_scale(&mut z, 10.0);
            match base {
                7 => schaffers_f7(&z),
                8 => ackley(&z),
                _ => weierstrass(&z),
            }
        }
        10 => {
            lambda_scale(&mut z, 100.0);
            griewank(&z)
        }
        11 => {
            t_osz(&mut z);
            t_asy(&mut z, 0.2);
            lambda_scale(&mut z, 10.0);
            rastrigin(&z)
        }
        12 | 13 => {
            if base == 13 {
                round_to_halves(&mut z);
            }
            t_osz(&mut z);
            t_asy(&mut z, 0.2);
            let mut z = rotate(c.inner, &z);
            lambda_scale(&mut z, 10.0);
            rastrigin(&rotate(c.inner, &z))
        }
        14 | 15 => {
            lambda_scale(&mut z, 10.0);
            z.iter_mut().for_each(|v| *v += SCHWEFEL_OFFSET);
            schwefel(&z)
        }
        16 => {
            lambda_scale(&mut z, 100.0);
            katsuura(&rotate(c.inner, &z))
        }
        17 | 18 => lunacek(&z, c, base == 18),
        19 => {
            z.iter_mut().for_each(|v| *v += 1.0);
            griewank_rosenbrock(&z)
        }
        20 => {
            t_asy(&mut z, 0.5);
            schaffer_f6(&rotate(c.inner, &z))
        }
        _ => panic!("basic function id {base} out of range"),
    }
}

fn lunacek(y: &[f64], c: &Component, rotated: bool) -> f64 {
    let d = y.len() as f64;
    let mu0 = 2.5;
    let s = 1.0 - 1.0 / (2.0 * (d + 20.0).sqrt() - 8.2);
    let mu1 = -((mu0 * mu0 - 1.0) / s).sqrt();
    let hat: Vec<f64> = y
        .iter()
        .zip(c.shift)
        .map(|(v, o)| 2.0 * if *o < 0.0 { -1.0 } else { 1.0 } * v + mu0)
        .collect();
    let first: f64 = hat.iter().map(|v| (v - mu0).powi(2)).sum();
    let second = d + s * hat.iter().map(|v| (v - mu1).powi(2)).sum::<f64>();
    let mut z: Vec<f64> = hat.iter().map(|v| v - mu0).collect();
    lambda_scale(&mut z, 100.0);
    if rotated {
        z = rotate(c.inner, &z);
    }
    first.min(second) + 10.0 * (d - z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>())
}

/// Normalized distance weights of a composition at `x`.
///
/// Computed in log space; a point sitting on a component's shift gives that component weight 1.
pub fn composition_weights(x: &[f64], shifts: &[&[f64]], sigmas: &[f64]) -> Vec<f64> {
    let d = x.len() as f64;
    let squared: Vec<f64> = shifts
        .iter()
        .map(|o| x.iter().zip(*o).map(|(a, b)| (a - b).powi(2)).sum())
        .collect();
    if let Some(k) = squared.iter().position(|s| *s == 0.0) {
        let mut w = vec![0.0; shifts.len()];
        w[k] = 1.0;
        return w;
    }
    let logs: Vec<f64> = squared
        .iter()
        .zip(sigmas)
        .map(|(s, sigma)| -0.5 * s.ln() - s / (2.0 * d * sigma * sigma))
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| w / total).collect()
}
