//! Fixed-step classical Runge-Kutta integration.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Integrator name written into trajectory metadata.
pub const INTEGRATOR: &str = "rk4";

fn finite_or_err<T: Real>(k: Vec<T>, t: T) -> Result<Vec<T>> {
    if k.iter().all(|v| v.is_finite()) {
        Ok(k)
    } else {
        Err(Error::NonFiniteRate { t: t.to_f64_lossy() })
    }
}

fn axpy<T: Real>(x: &[T], a: T, k: &[T]) -> Vec<T> {
    x.iter().zip(k).map(|(xi, ki)| *xi + a * *ki).collect()
}

fn combine<T: Real>(x: &[T], h: T, k1: &[T], k2: &[T], k3: &[T], k4: &[T]) -> Vec<T> {
    let two = T::lit(2.0);
    let six = T::lit(6.0);
    (0..x.len()).map(|i| x[i] + h / six * (k1[i] + two * k2[i] + two * k3[i] + k4[i])).collect()
}

fn rk4_from_k1<T, F>(f: &mut F, x: &[T], t: T, h: T, k1: Vec<T>) -> Result<Vec<T>>
where
    T: Real,
    F: FnMut(T, &[T]) -> Result<Vec<T>>,
{
    let half = h / T::lit(2.0);
    let k2 = finite_or_err(f(t + half, &axpy(x, half, &k1))?, t + half)?;
    let k3 = finite_or_err(f(t + half, &axpy(x, half, &k2))?, t + half)?;
    let k4 = finite_or_err(f(t + h, &axpy(x, h, &k3))?, t + h)?;
    Ok(combine(x, h, &k1, &k2, &k3, &k4))
}

/// One classical RK4 step of ẋ = f(t, x).
pub fn rk4_step<T, F>(mut f: F, x: &[T], t: T, h: T) -> Result<Vec<T>>
where
    T: Real,
    F: FnMut(T, &[T]) -> Result<Vec<T>>,
{
    let k1 = finite_or_err(f(t, x)?, t)?;
    rk4_from_k1(&mut f, x, t, h, k1)
}

/// Keeps a fixed-step integration of a flow that reaches its target in finite
/// time from ringing around it. The first `dims` components are measured
/// against `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct OriginGuard<T> {
    pub target: Vec<T>,
    pub dims: usize,
    /// Below this distance the guarded components snap onto the target.
    pub dead_zone: T,
    /// Maximum number of step halvings.
    pub max_depth: u32,
}

impl<T: Real> OriginGuard<T> {
    pub fn new(target: Vec<T>, dead_zone: T) -> Self {
        OriginGuard { dims: target.len(), target, dead_zone, max_depth: 48 }
    }

    pub fn distance(&self, x: &[T]) -> T {
        (0..self.dims).fold(T::zero(), |acc, i| {
            let d = x[i] - self.target[i];
            acc + d * d
        })
        .sqrt()
    }

    fn clamp(&self, mut x: Vec<T>) -> Vec<T> {
        if self.distance(&x) <= self.dead_zone {
            x[..self.dims].clone_from_slice(&self.target);
        }
        x
    }
}

/// RK4 step that halves itself while the explicit Euler increment of the
/// guarded components would reach past the target, and snaps onto the
/// target inside the dead zone.
pub fn rk4_guarded_step<T, F>(mut f: F, x: &[T], t: T, h: T, guard: &OriginGuard<T>) -> Result<Vec<T>>
where
    T: Real,
    F: FnMut(T, &[T]) -> Result<Vec<T>>,
{
    guarded(&mut f, x, t, h, guard, 0)
}

fn guarded<T, F>(f: &mut F, x: &[T], t: T, h: T, guard: &OriginGuard<T>, depth: u32) -> Result<Vec<T>>
where
    T: Real,
    F: FnMut(T, &[T]) -> Result<Vec<T>>,
{
    let dist = guard.distance(x);
    let k1 = finite_or_err(f(t, x)?, t)?;
    if dist > guard.dead_zone && depth < guard.max_depth {
        let reach = (0..guard.dims).fold(T::zero(), |acc, i| acc + k1[i] * k1[i]).sqrt() * h;
        if reach >= dist {
            let half = h / T::lit(2.0);
            let mid = guarded(f, x, t, half, guard, depth + 1)?;
            return guarded(f, &mid, t + half, half, guard, depth + 1);
        }
    }
    Ok(guard.clamp(rk4_from_k1(f, x, t, h, k1)?))
}

/// Step boundaries on `[t0, t_end]`: the grid `t0 + k·h`, cut at every
/// breakpoint so that no breakpoint falls inside a step. Boundaries closer
/// than `1e-9·h` are merged.
pub fn step_boundaries<T: Real>(t0: T, t_end: T, h: T, breakpoints: &[T]) -> Result<Vec<T>> {
    if !(h > T::zero()) || !h.is_finite() {
        return Err(Error::InvalidParameter { name: "step".into(), reason: "must be positive".into() });
    }
    if !(t_end >= t0) {
        return Err(Error::InvalidScenario("span ends before it starts".into()));
    }
    let eps = h * T::lit(1e-9);
    let mut out = vec![t0];
    let mut k = 1usize;
    loop {
        let t = t0 + T::from_count(k) * h;
        if t >= t_end - eps {
            break;
        }
        out.push(t);
        k += 1;
    }
    out.push(t_end);
    for b in breakpoints {
        if *b > t0 + eps && *b < t_end - eps {
            out.push(*b);
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));
    out.dedup_by(|b, a| *b - *a <= eps);
    if let Some(last) = out.last_mut() {
        *last = t_end;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rate_keeps_state() {
        let x = rk4_step(|_, x: &[f64]| Ok(vec![0.0; x.len()]), &[1.5, -2.0], 0.0, 0.1).unwrap();
        assert_eq!(x, vec![1.5, -2.0]);
    }

    #[test]
    fn taylor_truncation() {
        let (lam, h) = (-0.7f64, 0.3);
        let x = rk4_step(|_, x: &[f64]| Ok(vec![lam * x[0]]), &[2.0], 0.0, h).unwrap();
        let z = lam * h;
        let taylor = 2.0 * (1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0);
        assert!((x[0] - taylor).abs() < 1e-15);
    }

    #[test]
    fn non_finite_rate() {
        let r = rk4_step(|_, _: &[f64]| Ok(vec![f64::NAN]), &[0.0], 0.0, 0.1);
        assert!(matches!(r, Err(Error::NonFiniteRate { .. })));
    }

    #[test]
    fn boundaries_include_breakpoints() {
        let b = step_boundaries(0.0f64, 1.0, 0.3, &[0.45, 0.6]).unwrap();
        assert_eq!(b.len(), 6);
        assert!((b[1] - 0.3).abs() < 1e-15 && b[2] == 0.45 && (b[3] - 0.6).abs() < 1e-12);
        assert!((b[4] - 0.9).abs() < 1e-15 && b[5] == 1.0);
        let grid = step_boundaries(0.0, 600.0, 0.01, &[300.0]).unwrap();
        assert_eq!(grid.len(), 60001);
        assert!(grid.contains(&300.0));
    }

    #[test]
    fn guard_reaches_target() {
        // ẋ = −x^{1/3} reaches 0 at t = 1.5
        let f = |_: f64, x: &[f64]| Ok(vec![if x[0].abs() <= 1e-9 { 0.0 } else { -x[0].cbrt() }]);
        let guard = OriginGuard::new(vec![0.0], 1e-9);
        let mut x = vec![1.0];
        let mut prev = 1.0f64;
        for k in 0..2000 {
            x = rk4_guarded_step(f, &x, k as f64 * 0.001, 0.001, &guard).unwrap();
            assert!(x[0].abs() <= prev);
            prev = x[0].abs();
        }
        assert_eq!(x[0], 0.0);
    }
}
