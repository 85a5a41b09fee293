//! Danger and safety control signals.

use std::f64::consts::PI;

use rand::Rng;

/// Deterministic amplitude of the danger signal.
///
/// Nonlinear form: `2 (1 - t/T)^(pi t / T)`, which starts at 2 and decays to
/// 0 at `t = T`. The linear form `2 (1 - t/T)` is used by the plain-WO
/// ablation.
pub fn danger_amplitude(t: usize, t_max: usize, nonlinear: bool) -> f64 {
    let ratio = t as f64 / t_max as f64;
    if nonlinear {
        2.0 * (1.0 - ratio).powf(PI * ratio)
    } else {
        2.0 * (1.0 - ratio)
    }
}

/// Danger signal: amplitude modulated by a uniform(-1, 1) perturbation.
pub fn danger_signal<R: Rng>(t: usize, t_max: usize, nonlinear: bool, rng: &mut R) -> f64 {
    danger_amplitude(t, t_max, nonlinear) * rng.gen_range(-1.0..1.0)
}

/// Safety signal: sigmoid transition from near 1 early to near 0 late,
/// exactly 0.5 at the midpoint, strictly decreasing in `t`.
pub fn safety_signal(t: usize, t_max: usize) -> f64 {
    let z = (t_max as f64 / 2.0 - t as f64) / t_max as f64 * 10.0;
    1.0 - 1.0 / (1.0 + z.exp())
}
