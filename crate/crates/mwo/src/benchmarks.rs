//! The nine standard benchmark functions used by the experiment harness:
//! sphere, two Schwefel variants, the Schwefel sine function, Ackley, a
//! penalized function, the six-hump camel, and two Shekel functions.
//! All evaluators are pure.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchmarkError {
    #[error("expected {expected} dimensions for {id}, got {got}")]
    DimensionMismatch {
        id: BenchmarkId,
        expected: usize,
        got: usize,
    },
    #[error("unknown benchmark function '{0}'")]
    UnknownFunction(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchmarkId {
    Tf1,
    Tf2,
    Tf3,
    Tf4,
    Tf5,
    Tf6,
    Tf7,
    Tf8,
    Tf9,
}

impl BenchmarkId {
    pub const ALL: [BenchmarkId; 9] = [
        BenchmarkId::Tf1,
        BenchmarkId::Tf2,
        BenchmarkId::Tf3,
        BenchmarkId::Tf4,
        BenchmarkId::Tf5,
        BenchmarkId::Tf6,
        BenchmarkId::Tf7,
        BenchmarkId::Tf8,
        BenchmarkId::Tf9,
    ];
}

impl fmt::Display for BenchmarkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = *self as usize + 1;
        write!(f, "tf{n}")
    }
}

impl FromStr for BenchmarkId {
    type Err = BenchmarkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tf1" => Ok(BenchmarkId::Tf1),
            "tf2" => Ok(BenchmarkId::Tf2),
            "tf3" => Ok(BenchmarkId::Tf3),
            "tf4" => Ok(BenchmarkId::Tf4),
            "tf5" => Ok(BenchmarkId::Tf5),
            "tf6" => Ok(BenchmarkId::Tf6),
            "tf7" => Ok(BenchmarkId::Tf7),
            "tf8" => Ok(BenchmarkId::Tf8),
            "tf9" => Ok(BenchmarkId::Tf9),
            other => Err(BenchmarkError::UnknownFunction(other.to_string())),
        }
    }
}

/// Metadata for one benchmark function: dimension, symmetric search box and
/// the known global optimum value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkFunction {
    pub id: BenchmarkId,
    pub dim: usize,
    pub lower: f64,
    pub upper: f64,
    pub known_optimum: f64,
}

/// All nine functions in order.
pub fn catalog() -> Vec<BenchmarkFunction> {
    use BenchmarkId::*;
    vec![
        BenchmarkFunction { id: Tf1, dim: 30, lower: -100.0, upper: 100.0, known_optimum: 0.0 },
        BenchmarkFunction { id: Tf2, dim: 30, lower: -10.0, upper: 10.0, known_optimum: 0.0 },
        BenchmarkFunction { id: Tf3, dim: 30, lower: -100.0, upper: 100.0, known_optimum: 0.0 },
        BenchmarkFunction { id: Tf4, dim: 30, lower: -500.0, upper: 500.0, known_optimum: -12569.49 },
        BenchmarkFunction { id: Tf5, dim: 30, lower: -32.0, upper: 32.0, known_optimum: 0.0 },
        BenchmarkFunction { id: Tf6, dim: 30, lower: -50.0, upper: 50.0, known_optimum: 0.0 },
        BenchmarkFunction { id: Tf7, dim: 2, lower: -5.0, upper: 5.0, known_optimum: -1.0316 },
        BenchmarkFunction { id: Tf8, dim: 4, lower: 0.0, upper: 10.0, known_optimum: -10.153 },
        BenchmarkFunction { id: Tf9, dim: 4, lower: 0.0, upper: 10.0, known_optimum: -10.403 },
    ]
}

pub fn metadata(id: BenchmarkId) -> BenchmarkFunction {
    catalog()[id as usize]
}

/// Evaluation result with an out-of-bounds diagnostic. Out-of-bounds points
/// still evaluate normally; the optimizer clamps before calling, so the flag
/// only matters for direct use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub out_of_bounds: bool,
}

pub fn evaluate(id: BenchmarkId, x: &[f64]) -> Result<f64, BenchmarkError> {
    let meta = metadata(id);
    if x.len() != meta.dim {
        return Err(BenchmarkError::DimensionMismatch {
            id,
            expected: meta.dim,
            got: x.len(),
        });
    }
    Ok(raw_evaluate(id, x))
}

pub fn evaluate_checked(id: BenchmarkId, x: &[f64]) -> Result<Evaluation, BenchmarkError> {
    let meta = metadata(id);
    let value = evaluate(id, x)?;
    let out_of_bounds = x.iter().any(|&v| v < meta.lower || v > meta.upper);
    Ok(Evaluation {
        value,
        out_of_bounds,
    })
}

/// Published minimizer coordinates (approximate for the camel and Shekel
/// functions, exact for the rest).
pub fn known_minimizer(id: BenchmarkId) -> Vec<f64> {
    match id {
        BenchmarkId::Tf1 | BenchmarkId::Tf2 | BenchmarkId::Tf3 | BenchmarkId::Tf5 => vec![0.0; 30],
        BenchmarkId::Tf4 => vec![420.9687; 30],
        BenchmarkId::Tf6 => vec![-1.0; 30],
        BenchmarkId::Tf7 => vec![0.0898, -0.7126],
        BenchmarkId::Tf8 | BenchmarkId::Tf9 => vec![4.0; 4],
    }
}

fn raw_evaluate(id: BenchmarkId, x: &[f64]) -> f64 {
    match id {
        BenchmarkId::Tf1 => x.iter().map(|v| v * v).sum(),
        BenchmarkId::Tf2 => {
            let sum: f64 = x.iter().map(|v| v.abs()).sum();
            let prod: f64 = x.iter().map(|v| v.abs()).product();
            sum + prod
        }
        BenchmarkId::Tf3 => {
            let mut total = 0.0;
            let mut prefix = 0.0;
            for &v in x {
                prefix += v;
                total += prefix * prefix;
            }
            total
        }
        BenchmarkId::Tf4 => x.iter().map(|&v| -v * v.abs().sqrt().sin()).sum(),
        BenchmarkId::Tf5 => {
            let n = x.len() as f64;
            let sq: f64 = x.iter().map(|v| v * v).sum();
            let cs: f64 = x.iter().map(|v| (2.0 * PI * v).cos()).sum();
            -20.0 * (-0.2 * (sq / n).sqrt()).exp() - (cs / n).exp() + 20.0 + E
        }
        BenchmarkId::Tf6 => {
            let d = x.len() as f64;
            let y: Vec<f64> = x.iter().map(|v| 1.0 + (v + 1.0) / 4.0).collect();
            let mut inner = 10.0 * (PI * y[0]).sin().powi(2);
            for i in 0..y.len() - 1 {
                inner += (y[i] - 1.0).powi(2) * (1.0 + 10.0 * (PI * y[i + 1]).sin().powi(2));
            }
            inner += (y[y.len() - 1] - 1.0).powi(2);
            let penalty: f64 = x.iter().map(|&v| u_penalty(v, 10.0, 100.0, 4)).sum();
            PI / d * inner + penalty
        }
        BenchmarkId::Tf7 => {
            let (x1, x2) = (x[0], x[1]);
            4.0 * x1.powi(2) - 2.1 * x1.powi(4) + x1.powi(6) / 3.0 + x1 * x2
                - 4.0 * x2.powi(2)
                + 4.0 * x2.powi(4)
        }
        BenchmarkId::Tf8 => shekel(x, 5),
        BenchmarkId::Tf9 => shekel(x, 7),
    }
}

/// Standard boundary penalty term of the penalized function family.
fn u_penalty(x: f64, a: f64, k: f64, m: i32) -> f64 {
    if x > a {
        k * (x - a).powi(m)
    } else if x < -a {
        k * (-x - a).powi(m)
    } else {
        0.0
    }
}

const SHEKEL_A: [[f64; 4]; 7] = [
    [4.0, 4.0, 4.0, 4.0],
    [1.0, 1.0, 1.0, 1.0],
    [8.0, 8.0, 8.0, 8.0],
    [6.0, 6.0, 6.0, 6.0],
    [3.0, 7.0, 3.0, 7.0],
    [2.0, 9.0, 2.0, 9.0],
    [5.0, 5.0, 3.0, 3.0],
];
const SHEKEL_C: [f64; 7] = [0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3];

fn shekel(x: &[f64], m: usize) -> f64 {
    -(0..m)
        .map(|i| {
            let dist: f64 = x
                .iter()
                .zip(SHEKEL_A[i].iter())
                .map(|(v, a)| (v - a).powi(2))
                .sum();
            1.0 / (dist + SHEKEL_C[i])
        })
        .sum::<f64>()
}
