#![allow(dead_code)]

use lti_pmp::{AutocorrelationModel, Matrix, StateSpace};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn lag() -> StateSpace<f64> {
    StateSpace::from_f64(&[&[-1.0]], &[1.0], &[1.0]).unwrap()
}

/// 1/(s+1)² as a Jordan chain
pub fn double_lag() -> StateSpace<f64> {
    StateSpace::from_f64(&[&[-1.0, 1.0], &[0.0, -1.0]], &[0.0, 1.0], &[1.0, 0.0]).unwrap()
}

/// 1/(s² + 0.2 s + 1)
pub fn resonant() -> StateSpace<f64> {
    StateSpace::from_f64(&[&[0.0, 1.0], &[-1.0, -0.2]], &[0.0, 1.0], &[1.0, 0.0]).unwrap()
}

/// Π a_i / (s + a_i) as a chain x_i' = -a_i x_i + a_i x_{i-1}.
pub fn series_of_lags(rates: &[f64]) -> StateSpace<f64> {
    let n = rates.len();
    let mut a = Matrix::<f64>::zeros(n, n);
    for (i, &r) in rates.iter().enumerate() {
        a[(i, i)] = -r;
        if i > 0 {
            a[(i, i - 1)] = r;
        }
    }
    let mut b = vec![0.0; n];
    b[0] = rates[0];
    let mut c = vec![0.0; n];
    c[n - 1] = 1.0;
    StateSpace::new(a, b, c).unwrap()
}

pub fn random_lags(rng: &mut ChaCha8Rng) -> StateSpace<f64> {
    let order = rng.gen_range(1..=5);
    let rates: Vec<f64> = (0..order).map(|_| rng.gen_range(0.1..=5.0)).collect();
    series_of_lags(&rates)
}

/// Dense random Hurwitz system of order 1..=max_order with abscissa in
/// [-2, -0.2], output scaled so that R(0) = 1.
pub fn random_stable(rng: &mut ChaCha8Rng, max_order: usize) -> StateSpace<f64> {
    loop {
        let n = rng.gen_range(1..=max_order);
        let mut a = Matrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = rng.gen_range(-1.0..1.0);
            }
        }
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let alpha = lti_pmp::linalg::spectral_abscissa(&a).unwrap();
        let shift = alpha + rng.gen_range(0.2..2.0);
        for i in 0..n {
            a[(i, i)] -= shift;
        }
        let Ok(sys) = StateSpace::new(a, b, c) else { continue };
        let Ok(model) = AutocorrelationModel::build(&sys) else { continue };
        if model.r0() < 1e-6 {
            continue;
        }
        return sys.with_scaled_output(1.0 / model.r0().sqrt()).unwrap();
    }
}

/// `c Aᵐ e^{At} P cᵀ` from scratch, for derivative orders beyond the model's.
pub fn direct_deriv(sys: &StateSpace<f64>, p: &Matrix<f64>, m: usize, t: f64) -> f64 {
    let mut row = sys.c().to_vec();
    for _ in 0..m {
        row = sys.a().vec_mul(&row);
    }
    let e = lti_pmp::linalg::expm(sys.a(), t).unwrap();
    let pc = p.mul_vec(sys.c());
    let v = e.mul_vec(&pc);
    row.iter().zip(&v).map(|(x, y)| x * y).sum()
}
