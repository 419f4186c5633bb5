use num_complex::Complex64;

use crate::channel::CVec;
use crate::estimation::UlEstimates;
use crate::scenario::Scheme;

/// MRT beams, one per pilot: `a_j = est_j^* / sqrt(E[||est_j||^2])`.
///
/// Under Scheme-N the center and edge user of a group share `a_j`.
/// `norms[j]` is the constant `c_j` with `a_j = c_j * ybar_j^*`, i.e.
/// `1 / sqrt(E[||ybar_j||^2])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Beams {
    pub scheme: Scheme,
    pub vectors: Vec<CVec>,
    pub norms: Vec<f64>,
}

/// Normalizes with the analytic expectation, so the beams meet the power
/// constraint on average rather than per realization. Pilots that carry no
/// power give an all-zero beam.
pub fn build_mrt_beams(est: &UlEstimates) -> Beams {
    let mut vectors = Vec::with_capacity(est.vectors.len());
    let mut norms = Vec::with_capacity(est.vectors.len());
    for (j, v) in est.vectors.iter().enumerate() {
        let expected = est.expected_norm_sqr(j);
        if expected > 0.0 {
            let inv = 1.0 / expected.sqrt();
            vectors.push(v.iter().map(|x| x.conj() * inv).collect());
            norms.push(1.0 / (est.pilot_power[j] * v.len() as f64).sqrt());
        } else {
            vectors.push(vec![Complex64::new(0.0, 0.0); v.len()]);
            norms.push(0.0);
        }
    }
    Beams { scheme: est.scheme, vectors, norms }
}
