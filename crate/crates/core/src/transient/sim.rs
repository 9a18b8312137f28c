use std::f64::consts::PI;

use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::model::{jacobian, state_derivative, InverterParams, InverterState, ParamError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimOptions {
    /// Integration step (s).
    pub dt: f64,
    /// Simulated window after the load step (s).
    pub duration: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            dt: 1e-4,
            duration: 3.0,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("time step must be positive and finite, got {0}")]
    Step(f64),
    #[error("duration {duration} s is shorter than ten filter time constants ({min} s)")]
    Duration { duration: f64, min: f64 },
    #[error("equilibrium iteration did not converge (residual {residual:.3e})")]
    NoEquilibrium { residual: f64 },
    #[error("load values must be finite")]
    Load,
    #[error("trace is empty")]
    EmptyTrace,
}

impl SimOptions {
    pub fn validate(&self, p: &InverterParams) -> Result<(), SimError> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(SimError::Step(self.dt));
        }
        let min = 10.0 * 2.0 * PI / p.omega_c;
        if !(self.duration >= min) {
            return Err(SimError::Duration {
                duration: self.duration,
                min,
            });
        }
        Ok(())
    }
}

/// Frequency response to one load step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTrace {
    /// Sample times (s), starting at 0.
    pub t: Vec<f64>,
    /// Frequency samples (Hz).
    pub f: Vec<f64>,
    pub f_nadir: f64,
    pub t_nadir: f64,
    pub delta_f_meas: f64,
    pub stable: bool,
    pub final_state: InverterState,
}

pub const EQUILIBRIUM_TOL: f64 = 1e-9;
const NEWTON_MAX_ITER: usize = 50;

fn residual_norm(s: &InverterState, p: &InverterParams, p_l: f64, q_l: f64) -> f64 {
    state_derivative(s, p, p_l, q_l)
        .to_array()
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
}

fn newton(
    mut x: InverterState,
    p: &InverterParams,
    p_l: f64,
    q_l: f64,
) -> Result<InverterState, f64> {
    let mut res = residual_norm(&x, p, p_l, q_l);
    for _ in 0..NEWTON_MAX_ITER {
        if res <= EQUILIBRIUM_TOL {
            return Ok(x);
        }
        let j = SMatrix::<f64, 7, 7>::from_fn(|r, c| jacobian(&x, p)[r][c]);
        let f = SVector::<f64, 7>::from(state_derivative(&x, p, p_l, q_l).to_array());
        let Some(dx) = j.lu().solve(&(-f)) else {
            return Err(res);
        };
        // Backtrack until the residual drops.
        let mut step = 1.0;
        loop {
            let mut a = x.to_array();
            for (ai, di) in a.iter_mut().zip(dx.iter()) {
                *ai += step * di;
            }
            let cand = InverterState::from_array(a);
            let r = residual_norm(&cand, p, p_l, q_l);
            if r.is_finite() && r < res {
                x = cand;
                res = r;
                break;
            }
            step *= 0.5;
            if step < 1e-6 {
                return Err(res);
            }
        }
    }
    if res <= EQUILIBRIUM_TOL {
        Ok(x)
    } else {
        Err(res)
    }
}

/// Steady state for constant loads `p_l`, `q_l` (pu).
pub fn equilibrium_state(p: &InverterParams, p_l: f64, q_l: f64) -> Result<InverterState, SimError> {
    p.validate()?;
    if p.omega_set != p.omega_0 {
        return Err(ParamError::OffNominal {
            set: p.omega_set,
            nominal: p.omega_0,
        }
        .into());
    }
    if !(p_l.is_finite() && q_l.is_finite()) {
        return Err(SimError::Load);
    }
    let mut x = InverterState {
        p: 0.0,
        q: 0.0,
        theta: 0.0,
        omega: p.omega_0,
        v: p.v_set,
        i_d: 0.0,
        i_q: 0.0,
    };
    // Continuation in the load keeps each Newton solve near its start.
    const PIECES: usize = 8;
    for k in 1..=PIECES {
        let frac = k as f64 / PIECES as f64;
        x = newton(x, p, frac * p_l, frac * q_l).map_err(|residual| SimError::NoEquilibrium { residual })?;
    }
    Ok(x)
}

fn rk4_step(s: &InverterState, p: &InverterParams, p_l: f64, q_l: f64, dt: f64) -> InverterState {
    let x = s.to_array();
    let add = |a: &[f64; 7], k: &[f64; 7], h: f64| -> InverterState {
        let mut o = *a;
        for i in 0..7 {
            o[i] += h * k[i];
        }
        InverterState::from_array(o)
    };
    let k1 = state_derivative(s, p, p_l, q_l).to_array();
    let k2 = state_derivative(&add(&x, &k1, dt / 2.0), p, p_l, q_l).to_array();
    let k3 = state_derivative(&add(&x, &k2, dt / 2.0), p, p_l, q_l).to_array();
    let k4 = state_derivative(&add(&x, &k3, dt), p, p_l, q_l).to_array();
    let mut o = x;
    for i in 0..7 {
        o[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    InverterState::from_array(o)
}

/// Frequency band outside which a run is declared unstable, as a fraction
/// of nominal.
pub const STABILITY_BAND: (f64, f64) = (0.9, 1.1);

/// Integrate from `s0` with the loads switched to `p_l`, `q_l` at t = 0.
pub fn simulate_load_step(
    s0: &InverterState,
    p: &InverterParams,
    p_l: f64,
    q_l: f64,
    opts: &SimOptions,
) -> Result<FrequencyTrace, SimError> {
    p.validate()?;
    opts.validate(p)?;
    if !(p_l.is_finite() && q_l.is_finite()) {
        return Err(SimError::Load);
    }
    let n = (opts.duration / opts.dt).round() as usize;
    let to_hz = |w: f64| w / (2.0 * PI);
    let cap = (n + 1).min(1 << 20);
    let mut t = Vec::with_capacity(cap);
    let mut f = Vec::with_capacity(cap);
    t.push(0.0);
    f.push(to_hz(s0.omega));
    let (lo, hi) = (STABILITY_BAND.0 * p.omega_0, STABILITY_BAND.1 * p.omega_0);
    let mut s = *s0;
    let mut stable = s.is_finite() && s.omega >= lo && s.omega <= hi;
    if stable {
        for k in 1..=n {
            let next = rk4_step(&s, p, p_l, q_l, opts.dt);
            if !next.is_finite() {
                stable = false;
                break;
            }
            s = next;
            t.push(k as f64 * opts.dt);
            f.push(to_hz(s.omega));
            if s.omega < lo || s.omega > hi {
                stable = false;
                break;
            }
        }
    }
    let (f_nadir, t_nadir) = frequency_nadir_of(&t, &f).expect("trace holds the initial sample");
    Ok(FrequencyTrace {
        delta_f_meas: delta_f_meas(f_nadir, p.f0()),
        t,
        f,
        f_nadir,
        t_nadir,
        stable,
        final_state: s,
    })
}

fn frequency_nadir_of(t: &[f64], f: &[f64]) -> Result<(f64, f64), SimError> {
    let mut best: Option<(f64, f64)> = None;
    for (&ti, &fi) in t.iter().zip(f) {
        match best {
            Some((fb, _)) if fb <= fi => {}
            _ => best = Some((fi, ti)),
        }
    }
    best.ok_or(SimError::EmptyTrace)
}

/// Lowest frequency of the trace and its earliest time.
pub fn frequency_nadir(trace: &FrequencyTrace) -> Result<(f64, f64), SimError> {
    frequency_nadir_of(&trace.t, &trace.f)
}

/// Drop of the nadir below `f0`, floored at zero (Hz).
pub fn delta_f_meas(f_nadir: f64, f0: f64) -> f64 {
    (f0 - f_nadir).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace_of(f: &[f64]) -> FrequencyTrace {
        FrequencyTrace {
            t: (0..f.len()).map(|k| k as f64 * 0.1).collect(),
            f: f.to_vec(),
            f_nadir: f64::NAN,
            t_nadir: f64::NAN,
            delta_f_meas: f64::NAN,
            stable: true,
            final_state: equilibrium_state(&InverterParams::default(), 0.0, 0.0).unwrap(),
        }
    }

    #[test]
    fn nadir_picks_minimum_and_earliest_tie() {
        assert_eq!(frequency_nadir(&trace_of(&[60.0, 59.8, 59.7, 59.9])).unwrap(), (59.7, 0.2));
        assert_eq!(frequency_nadir(&trace_of(&[60.0; 5])).unwrap(), (60.0, 0.0));
        assert_eq!(frequency_nadir(&trace_of(&[60.0, 59.5, 59.9, 59.5])).unwrap(), (59.5, 0.1));
        assert_eq!(frequency_nadir(&trace_of(&[])), Err(SimError::EmptyTrace));
    }

    #[test]
    fn measured_drop_is_floored() {
        assert!((delta_f_meas(59.7044, 60.0) - 0.2956).abs() < 1e-12);
        assert_eq!(delta_f_meas(60.0, 60.0), 0.0);
        assert_eq!(delta_f_meas(60.2, 60.0), 0.0);
    }

    #[test]
    fn zero_load_equilibrium_is_the_origin() {
        let p = InverterParams::default();
        let s = equilibrium_state(&p, 0.0, 0.0).unwrap();
        assert!(s.p.abs() < 1e-12 && s.q.abs() < 1e-12);
        assert!(s.theta.abs() < 1e-12 && s.i_d.abs() < 1e-12 && s.i_q.abs() < 1e-12);
        assert!((s.omega - p.omega_0).abs() < 1e-12);
        assert!((s.v - p.v_set).abs() < 1e-12);
        assert!(residual_norm(&s, &p, 0.0, 0.0) <= EQUILIBRIUM_TOL);
    }

    #[test]
    fn loaded_equilibrium_residual() {
        let p = InverterParams::default();
        let s = equilibrium_state(&p, 0.3, 0.1).unwrap();
        assert!(residual_norm(&s, &p, 0.3, 0.1) <= 1e-9);
        assert!((s.p - 0.3).abs() < 1e-6);
    }

    #[test]
    fn off_nominal_set_point_rejected() {
        let p = InverterParams {
            omega_set: 2.0 * PI * 60.1,
            ..Default::default()
        };
        assert!(matches!(
            equilibrium_state(&p, 0.1, 0.0),
            Err(SimError::Params(ParamError::OffNominal { .. }))
        ));
    }

    #[test]
    fn zero_step_stays_at_nominal() {
        let p = InverterParams::default();
        let s0 = equilibrium_state(&p, 0.0, 0.0).unwrap();
        let tr = simulate_load_step(&s0, &p, 0.0, 0.0, &SimOptions::default()).unwrap();
        assert_eq!(tr.t.len(), 30_001);
        assert!((tr.f_nadir - 60.0).abs() < 1e-9);
        assert!(tr.delta_f_meas < 1e-9);
        assert!(tr.stable);
    }

    #[test]
    fn options_validated() {
        let p = InverterParams::default();
        assert_eq!(
            SimOptions { dt: 0.0, duration: 3.0 }.validate(&p),
            Err(SimError::Step(0.0))
        );
        assert!(matches!(
            SimOptions { dt: 1e-4, duration: 0.5 }.validate(&p),
            Err(SimError::Duration { .. })
        ));
    }

    #[test]
    fn runaway_flagged_unstable() {
        // A step far beyond the transfer limit of the R-L branch.
        let p = InverterParams::default();
        let s0 = equilibrium_state(&p, 0.0, 0.0).unwrap();
        let tr = simulate_load_step(&s0, &p, 50.0, 0.0, &SimOptions::default()).unwrap();
        assert!(!tr.stable);
        assert!(tr.t.len() < 30_001);
    }
}
