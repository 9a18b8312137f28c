use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Sign of the angle equation relative to the frequency deviation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngleConvention {
    /// `dθ/dt = ω0 - ω`: a frequency sag advances the angle and raises the
    /// delivered power, so the operating point is stable.
    Restoring,
    /// `dθ/dt = ω - ω0`: a sag retards the angle and cuts the delivered
    /// power further.
    Retarding,
}

/// Aggregate droop-controlled grid-forming inverter behind an R-L branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InverterParams {
    /// Power filter cut-off (rad/s).
    pub omega_c: f64,
    /// P-ω droop in rad/s per watt; scaled by `power_base_w` to per unit.
    pub d_p: f64,
    /// Q-V droop in pu voltage per pu reactive power.
    pub d_q: f64,
    pub omega_set: f64,
    pub omega_0: f64,
    pub v_set: f64,
    pub v_bus: f64,
    /// Branch resistance (pu).
    pub r: f64,
    /// Branch inductance (pu·s).
    pub l: f64,
    /// Power base of the per-unit system (W).
    pub power_base_w: f64,
    /// Gain of the droop dynamics; `None` reuses `omega_c`.
    pub droop_gain: Option<f64>,
    pub angle: AngleConvention,
}

impl Default for InverterParams {
    fn default() -> Self {
        let w0 = 2.0 * PI * 60.0;
        InverterParams {
            omega_c: 2.0 * PI * 10.0,
            d_p: 1e-5,
            d_q: 1e-5,
            omega_set: w0,
            omega_0: w0,
            v_set: 1.0,
            v_bus: 1.0,
            r: 0.1,
            l: 0.005,
            power_base_w: 1e6,
            droop_gain: None,
            angle: AngleConvention::Restoring,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("{name} must be {rule}, got {value}")]
    Invalid {
        name: &'static str,
        rule: &'static str,
        value: f64,
    },
    #[error("set-point frequency {set} differs from nominal {nominal}; no stationary angle exists")]
    OffNominal { set: f64, nominal: f64 },
}

fn positive(name: &'static str, value: f64) -> Result<(), ParamError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ParamError::Invalid {
            name,
            rule: "finite and positive",
            value,
        })
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<(), ParamError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(ParamError::Invalid {
            name,
            rule: "finite and non-negative",
            value,
        })
    }
}

impl InverterParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        positive("omega_c", self.omega_c)?;
        positive("l", self.l)?;
        non_negative("r", self.r)?;
        positive("omega_set", self.omega_set)?;
        positive("omega_0", self.omega_0)?;
        positive("power_base_w", self.power_base_w)?;
        non_negative("d_p", self.d_p)?;
        if !self.d_q.is_finite() {
            return Err(ParamError::Invalid {
                name: "d_q",
                rule: "finite",
                value: self.d_q,
            });
        }
        for (name, v) in [("v_set", self.v_set), ("v_bus", self.v_bus)] {
            positive(name, v)?;
        }
        if let Some(k) = self.droop_gain {
            positive("droop_gain", k)?;
        }
        Ok(())
    }

    /// P-ω droop in rad/s per pu.
    pub fn droop_p_pu(&self) -> f64 {
        self.d_p * self.power_base_w
    }

    pub fn droop_gain(&self) -> f64 {
        self.droop_gain.unwrap_or(self.omega_c)
    }

    pub fn f0(&self) -> f64 {
        self.omega_0 / (2.0 * PI)
    }

    fn angle_sign(&self) -> f64 {
        match self.angle {
            AngleConvention::Restoring => -1.0,
            AngleConvention::Retarding => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverterState {
    pub p: f64,
    pub q: f64,
    pub theta: f64,
    pub omega: f64,
    pub v: f64,
    pub i_d: f64,
    pub i_q: f64,
}

impl InverterState {
    pub fn to_array(&self) -> [f64; 7] {
        [self.p, self.q, self.theta, self.omega, self.v, self.i_d, self.i_q]
    }

    pub fn from_array(a: [f64; 7]) -> Self {
        InverterState {
            p: a[0],
            q: a[1],
            theta: a[2],
            omega: a[3],
            v: a[4],
            i_d: a[5],
            i_q: a[6],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    pub fn max_abs_diff(&self, other: &InverterState) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Right-hand side of the seven state equations for loads `p_l`, `q_l` (pu).
pub fn state_derivative(s: &InverterState, p: &InverterParams, p_l: f64, q_l: f64) -> InverterState {
    let (sn, cs) = s.theta.sin_cos();
    let k = p.droop_gain();
    InverterState {
        p: p.omega_c * (s.v * cs * s.i_d + s.v * sn * s.i_q - s.p),
        q: p.omega_c * (s.v * sn * s.i_d - s.v * cs * s.i_q - s.q),
        theta: p.angle_sign() * (s.omega - p.omega_0),
        omega: k * (p.omega_set - s.omega + p.droop_p_pu() * (s.p - p_l)),
        v: k * (p.v_set - s.v + p.d_q * (s.q - q_l)),
        i_d: (s.v * cs - p.v_bus - p.r * s.i_d) / p.l + p.omega_0 * s.i_q,
        i_q: (s.v * sn - p.r * s.i_q) / p.l - p.omega_0 * s.i_d,
    }
}

/// Jacobian of `state_derivative` with respect to the state, row-major in
/// the order of `InverterState::to_array`.
pub(crate) fn jacobian(s: &InverterState, p: &InverterParams) -> [[f64; 7]; 7] {
    let (sn, cs) = s.theta.sin_cos();
    let (wc, k, l) = (p.omega_c, p.droop_gain(), p.l);
    let mut j = [[0.0; 7]; 7];
    j[0] = [
        -wc,
        0.0,
        wc * (-s.v * sn * s.i_d + s.v * cs * s.i_q),
        0.0,
        wc * (cs * s.i_d + sn * s.i_q),
        wc * s.v * cs,
        wc * s.v * sn,
    ];
    j[1] = [
        0.0,
        -wc,
        wc * (s.v * cs * s.i_d + s.v * sn * s.i_q),
        0.0,
        wc * (sn * s.i_d - cs * s.i_q),
        wc * s.v * sn,
        -wc * s.v * cs,
    ];
    j[2][3] = p.angle_sign();
    j[3][0] = k * p.droop_p_pu();
    j[3][3] = -k;
    j[4][1] = k * p.d_q;
    j[4][4] = -k;
    j[5] = [0.0, 0.0, -s.v * sn / l, 0.0, cs / l, -p.r / l, p.omega_0];
    j[6] = [0.0, 0.0, s.v * cs / l, 0.0, sn / l, -p.omega_0, -p.r / l];
    j
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state() -> InverterState {
        InverterState {
            p: 0.2,
            q: 0.05,
            theta: -0.01,
            omega: 2.0 * PI * 60.0,
            v: 1.0,
            i_d: 0.2,
            i_q: -0.03,
        }
    }

    #[test]
    fn omega_rate_vanishes_at_set_point_with_matched_power() {
        let p = InverterParams::default();
        for (q, v, th) in [(0.0, 1.0, 0.0), (0.4, 0.97, 0.3), (-0.2, 1.02, -1.0)] {
            let s = InverterState { q, v, theta: th, ..state() };
            let d = state_derivative(&s, &p, s.p, 0.7);
            assert_eq!(d.omega, 0.0);
        }
    }

    #[test]
    fn currents_still_at_zero_angle_and_bus_voltage() {
        let p = InverterParams { r: 0.0, ..Default::default() };
        let s = InverterState {
            theta: 0.0,
            v: p.v_bus,
            i_d: 0.0,
            i_q: 0.0,
            ..state()
        };
        let d = state_derivative(&s, &p, 0.1, 0.0);
        assert_eq!(d.i_d, 0.0);
        assert_eq!(d.i_q, 0.0);
    }

    #[test]
    fn angle_sign_follows_convention() {
        let mut p = InverterParams::default();
        let s = InverterState { omega: p.omega_0 - 1.0, ..state() };
        assert_eq!(state_derivative(&s, &p, 0.0, 0.0).theta, 1.0);
        p.angle = AngleConvention::Retarding;
        assert_eq!(state_derivative(&s, &p, 0.0, 0.0).theta, -1.0);
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let p = InverterParams::default();
        let s = state();
        let j = jacobian(&s, &p);
        let h = 1e-6;
        for c in 0..7 {
            let (mut up, mut dn) = (s.to_array(), s.to_array());
            up[c] += h;
            dn[c] -= h;
            let fu = state_derivative(&InverterState::from_array(up), &p, 0.2, 0.05).to_array();
            let fd = state_derivative(&InverterState::from_array(dn), &p, 0.2, 0.05).to_array();
            for r in 0..7 {
                let fd_val = (fu[r] - fd[r]) / (2.0 * h);
                let scale = j[r][c].abs().max(1.0);
                assert!((fd_val - j[r][c]).abs() / scale < 1e-5, "J[{r}][{c}] {} vs {fd_val}", j[r][c]);
            }
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        let bad = [
            InverterParams { omega_c: 0.0, ..Default::default() },
            InverterParams { l: -1.0, ..Default::default() },
            InverterParams { r: -0.1, ..Default::default() },
            InverterParams { omega_0: f64::NAN, ..Default::default() },
            InverterParams { d_q: f64::INFINITY, ..Default::default() },
        ];
        for p in bad {
            assert!(p.validate().is_err(), "{p:?}");
        }
        assert!(InverterParams::default().validate().is_ok());
    }
}
