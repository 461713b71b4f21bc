//! Adaptive Dormand–Prince 5(4) integrator with a per-step observer.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-10, atol: 1e-12, h_init: 0.0, h_max: f64::INFINITY, max_steps: 200_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OdeSolution {
    pub t: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub rejected: usize,
    /// Set when integration stopped before `t_end`.
    pub stopped: Option<String>,
}

impl OdeSolution {
    pub fn last(&self) -> (f64, &[f64]) {
        (*self.t.last().unwrap(), self.y.last().unwrap())
    }

    pub fn completed(&self) -> bool {
        self.stopped.is_none()
    }
}

/// What to do after an accepted step.
pub enum StepControl {
    Continue,
    Stop(String),
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate `y' = f(t, y)` from `t0` to `t_end` (either direction).
///
/// `f` may report a singular state with `Err`; integration then stops with a
/// partial solution. `observer` runs on every accepted point, including `t0`.
pub fn integrate<F, O>(mut f: F, t0: f64, y0: &[f64], t_end: f64, opts: &OdeOptions, mut observer: O) -> Result<OdeSolution>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> std::result::Result<(), String>,
    O: FnMut(f64, &[f64]) -> StepControl,
{
    let n = y0.len();
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut sol = OdeSolution { t: vec![t0], y: vec![y0.to_vec()], rejected: 0, stopped: None };
    if let StepControl::Stop(msg) = observer(t0, y0) {
        sol.stopped = Some(msg);
        return Ok(sol);
    }
    let span = (t_end - t0).abs();
    if span == 0.0 {
        return Ok(sol);
    }
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    let mut t = t0;
    let mut y = y0.to_vec();
    if let Err(msg) = f(t, &y, &mut k[0]) {
        sol.stopped = Some(msg);
        return Ok(sol);
    }
    let mut h = if opts.h_init > 0.0 { opts.h_init } else { (span * 1e-3).min(1e-2 * (1.0 + t0.abs())) };
    h = h.min(opts.h_max).min(span);
    let mut err_prev: f64 = 1e-4;
    let mut ytmp = vec![0.0; n];
    let mut y5 = vec![0.0; n];
    for _ in 0..opts.max_steps {
        if (t_end - t) * dir <= 0.0 {
            return Ok(sol);
        }
        let last = (t + dir * h - t_end) * dir >= 0.0;
        if last {
            h = (t_end - t).abs();
        }
        let mut failed = None;
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += dir * h * A[s][j] * kj[i];
                }
                ytmp[i] = acc;
            }
            let (head, tail) = k.split_at_mut(s);
            let _ = head;
            if let Err(msg) = f(t + dir * C[s] * h, &ytmp, &mut tail[0]) {
                failed = Some(msg);
                break;
            }
        }
        if let Some(msg) = failed {
            // shrink and retry; give up when the step collapses
            h *= 0.25;
            sol.rejected += 1;
            if h < 1e-14 * (1.0 + t.abs()) {
                sol.stopped = Some(msg);
                return Ok(sol);
            }
            continue;
        }
        let mut err: f64 = 0.0;
        for i in 0..n {
            let mut hi = y[i];
            let mut lo = y[i];
            for s in 0..7 {
                hi += dir * h * B5[s] * k[s][i];
                lo += dir * h * B4[s] * k[s][i];
            }
            y5[i] = hi;
            let sc = opts.atol + opts.rtol * y[i].abs().max(hi.abs());
            err = err.max(((hi - lo) / sc).abs());
        }
        if !err.is_finite() {
            h *= 0.25;
            sol.rejected += 1;
            continue;
        }
        if err <= 1.0 {
            t = if last { t_end } else { t + dir * h };
            y.copy_from_slice(&y5);
            // FSAL: stage 7 was evaluated at the new point
            let k7 = k[6].clone();
            k[0] = k7;
            sol.t.push(t);
            sol.y.push(y.clone());
            if let StepControl::Stop(msg) = observer(t, &y) {
                sol.stopped = Some(msg);
                return Ok(sol);
            }
            let fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            h = (h * fac.clamp(0.2, 5.0)).min(opts.h_max);
            err_prev = err.max(1e-4);
        } else {
            sol.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
        if h < 1e-14 * (1.0 + t.abs()) {
            sol.stopped = Some(format!("step size underflow at t = {t}"));
            return Ok(sol);
        }
    }
    Err(Error::SingularTrajectory(format!("step budget of {} exhausted at t = {t}", opts.max_steps)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let sol = integrate(
            |_, y, dy| {
                dy[0] = -y[0];
                Ok(())
            },
            0.0,
            &[1.0],
            5.0,
            &OdeOptions::default(),
            |_, _| StepControl::Continue,
        )
        .unwrap();
        let (t, y) = sol.last();
        assert_eq!(t, 5.0);
        assert!((y[0] - (-5.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn harmonic_oscillator_backwards() {
        let sol = integrate(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
                Ok(())
            },
            0.0,
            &[0.0, 1.0],
            -3.0,
            &OdeOptions::default(),
            |_, _| StepControl::Continue,
        )
        .unwrap();
        let (_, y) = sol.last();
        assert!((y[0] - (-3.0f64).sin()).abs() < 1e-9);
    }

    #[test]
    fn blow_up_reports_partial_solution() {
        // y' = y², y(0) = 1 blows up at t = 1
        let sol = integrate(
            |_, y, dy| {
                if y[0] > 1e8 {
                    return Err("state left the regular region".into());
                }
                dy[0] = y[0] * y[0];
                Ok(())
            },
            0.0,
            &[1.0],
            2.0,
            &OdeOptions::default(),
            |_, _| StepControl::Continue,
        )
        .unwrap();
        assert!(!sol.completed());
        assert!(sol.last().0 < 1.0);
    }
}
