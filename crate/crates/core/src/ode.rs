//! Dormand-Prince 5(4) integrator with exact landing on output times and
//! sign-change events located by bisection over fresh single steps.

use crate::error::{Error, Result};

pub type Rhs<'a, const N: usize> = dyn Fn(f64, &[f64; N]) -> [f64; N] + 'a;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Direction of zero crossings an event reacts to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossing {
    Rising,
    Falling,
    Either,
}

impl Crossing {
    fn matches(self, before: f64, after: f64) -> bool {
        let rising = before < 0.0 && after >= 0.0;
        let falling = before > 0.0 && after <= 0.0;
        match self {
            Crossing::Rising => rising,
            Crossing::Falling => falling,
            Crossing::Either => rising || falling,
        }
    }
}

pub struct Event<'a, const N: usize> {
    pub g: &'a dyn Fn(&[f64; N]) -> f64,
    pub crossing: Crossing,
    /// Stop the integration at the first root.
    pub terminal: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub rtol: f64,
    pub atol: f64,
    pub event_tol: f64,
    pub max_steps: usize,
}

impl Settings {
    pub fn new(tol: f64, event_tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            event_tol,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Solution<const N: usize> {
    /// Accepted output points: the start, every requested output time
    /// reached, and the final point.
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
    /// Located roots of the event function (time, state).
    pub roots: Vec<(f64, [f64; N])>,
    /// True when a terminal event ended the run before `t_end`.
    pub stopped: bool,
}

impl<const N: usize> Solution<N> {
    pub fn last(&self) -> (f64, [f64; N]) {
        (*self.times.last().unwrap(), *self.states.last().unwrap())
    }
}

/// One Dormand-Prince step. Returns the fifth-order solution and the error
/// estimate vector.
pub fn step<const N: usize>(f: &Rhs<N>, t: f64, y: &[f64; N], h: f64) -> ([f64; N], [f64; N]) {
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, y);
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        if s == 6 {
            // stage 7 is evaluated at the fifth-order solution (FSAL)
            k[6] = f(t + h, &ys);
            let mut err = [0.0; N];
            for i in 0..N {
                err[i] = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
            }
            return (ys, err);
        }
        k[s] = f(t + C[s] * h, &ys);
    }
    unreachable!()
}

fn error_norm<const N: usize>(y: &[f64; N], y1: &[f64; N], err: &[f64; N], s: &Settings) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sc = s.atol + s.rtol * y[i].abs().max(y1[i].abs());
        acc += (err[i] / sc).powi(2);
    }
    (acc / N as f64).sqrt()
}

/// Integrates from `t0` to `t_end`, landing exactly on every time in
/// `outputs` (sorted, inside the interval).
pub fn integrate<const N: usize>(
    f: &Rhs<N>,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    outputs: &[f64],
    event: Option<&Event<N>>,
    settings: &Settings,
) -> Result<Solution<N>> {
    let mut sol = Solution {
        times: vec![t0],
        states: vec![y0],
        roots: Vec::new(),
        stopped: false,
    };
    if t_end <= t0 {
        return Ok(sol);
    }
    let mut t = t0;
    let mut y = y0;
    let span = t_end - t0;
    let mut h = (0.01 * span).min(0.05);
    let mut next_out = outputs.iter().copied().filter(|&o| o > t0 && o < t_end).peekable();
    let mut g_prev = event.map(|e| (e.g)(&y));
    let mut steps = 0usize;

    while t < t_end {
        steps += 1;
        if steps > settings.max_steps {
            return Err(Error::NonIntegrable(format!("step budget exhausted at t = {t}")));
        }
        let target = next_out.peek().copied().unwrap_or(t_end);
        let mut h_try = h.min(target - t);
        let landing = h_try >= target - t - 1e-15 * (1.0 + t.abs());
        if landing {
            h_try = target - t;
        }
        let (y1, err) = step(f, t, &y, h_try);
        let en = error_norm(&y, &y1, &err, settings);
        if !en.is_finite() {
            h *= 0.25;
            if h < 1e-14 * (1.0 + t.abs()) {
                return Err(Error::NonIntegrable(format!("non-finite state at t = {t}")));
            }
            continue;
        }
        if en > 1.0 {
            h = h_try * (0.9 * en.powf(-0.2)).max(0.2);
            continue;
        }
        let t1 = if landing { target } else { t + h_try };

        if let (Some(ev), Some(gp)) = (event, g_prev) {
            let g1 = (ev.g)(&y1);
            if !g1.is_finite() {
                return Err(Error::EventDetectionFailure(t));
            }
            if ev.crossing.matches(gp, g1) {
                let (tau, y_root) = locate(f, t, &y, h_try, ev, gp, settings)?;
                sol.roots.push((t + tau, y_root));
                if ev.terminal {
                    sol.times.push(t + tau);
                    sol.states.push(y_root);
                    sol.stopped = true;
                    return Ok(sol);
                }
            }
            g_prev = Some(g1);
        }

        t = t1;
        y = y1;
        if landing {
            sol.times.push(t);
            sol.states.push(y);
            if next_out.peek().is_some() {
                next_out.next();
            }
        }
        let grow = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h_try * grow).max(1e-12);
    }
    if *sol.times.last().unwrap() < t_end {
        sol.times.push(t);
        sol.states.push(y);
    }
    Ok(sol)
}

/// Bisection on the step length so that the event function changes sign
/// within `event_tol`.
fn locate<const N: usize>(
    f: &Rhs<N>,
    t: f64,
    y: &[f64; N],
    h: f64,
    ev: &Event<N>,
    g0: f64,
    settings: &Settings,
) -> Result<(f64, [f64; N])> {
    let mut lo = 0.0;
    let mut hi = h;
    let mut y_hi = step(f, t, y, h).0;
    let mut iterations = 0;
    while hi - lo > settings.event_tol {
        iterations += 1;
        if iterations > 200 {
            return Err(Error::EventDetectionFailure(t + lo));
        }
        let mid = 0.5 * (lo + hi);
        let y_mid = step(f, t, y, mid).0;
        let g_mid = (ev.g)(&y_mid);
        if !g_mid.is_finite() {
            return Err(Error::EventDetectionFailure(t + mid));
        }
        if ev.crossing.matches(g0, g_mid) || g_mid == 0.0 {
            hi = mid;
            y_hi = y_mid;
        } else {
            lo = mid;
        }
    }
    Ok((hi, y_hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_accuracy() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let s = Settings::new(1e-10, 1e-12);
        let sol = integrate(&f, 0.0, [1.0, 0.0], 10.0, &[], None, &s).unwrap();
        let (t, y) = sol.last();
        assert_eq!(t, 10.0);
        assert!((y[0] - 10f64.cos()).abs() < 1e-8, "{}", y[0] - 10f64.cos());
        assert!((y[1] + 10f64.sin()).abs() < 1e-8);
    }

    #[test]
    fn lands_on_outputs() {
        let f = |_t: f64, y: &[f64; 1]| [y[0]];
        let s = Settings::new(1e-11, 1e-12);
        let outs = [0.1, 0.5, 0.50001, 0.9];
        let sol = integrate(&f, 0.0, [1.0], 1.0, &outs, None, &s).unwrap();
        assert_eq!(sol.times, vec![0.0, 0.1, 0.5, 0.50001, 0.9, 1.0]);
        for (t, y) in sol.times.iter().zip(&sol.states) {
            assert!((y[0] - t.exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn terminal_event_located() {
        // y = cos t crosses zero falling at π/2
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let g = |y: &[f64; 2]| y[0];
        let ev = Event { g: &g, crossing: Crossing::Falling, terminal: true };
        let s = Settings::new(1e-10, 1e-12);
        let sol = integrate(&f, 0.0, [1.0, 0.0], 5.0, &[], Some(&ev), &s).unwrap();
        assert!(sol.stopped);
        let (t, _) = sol.last();
        assert!((t - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
    }

    #[test]
    fn non_terminal_events_collected() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let g = |y: &[f64; 2]| y[0];
        let ev = Event { g: &g, crossing: Crossing::Either, terminal: false };
        let s = Settings::new(1e-10, 1e-12);
        let sol = integrate(&f, 0.0, [1.0, 0.0], 10.0, &[], Some(&ev), &s).unwrap();
        let roots: Vec<f64> = sol.roots.iter().map(|r| r.0).collect();
        assert_eq!(roots.len(), 3);
        for (k, r) in roots.iter().enumerate() {
            let exact = std::f64::consts::FRAC_PI_2 + k as f64 * std::f64::consts::PI;
            assert!((r - exact).abs() < 1e-9);
        }
    }
}
