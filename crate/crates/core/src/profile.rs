//! Half de Sitter-Schwarzschild profile: the warp factor u(s) with
//! u'' = (1 - u'^2)/(2u) - u/2, u(0) = a, u'(0) = 0, and the algebra around
//! it (mass parameter, horizon radii, scalar curvature).
//!
//! The first integral u(1 - u'^2) - u^3/3 = 2m identifies the mass, and the
//! scalar-curvature-2 normalization f(r) = 1 - r^2/3 - 2m/r fixes the mass
//! range to (0, 1/3].

use crate::error::{Error, Result};
use crate::scalar::{fl, half, two, Scalar};

/// Normalization convention. Only the R = 2 branch is implemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    #[default]
    R2,
}

/// Parameters (a, m) with m = (a - a^3/3)/2.
#[derive(Debug, Clone, Copy)]
pub struct ProfileParams<T> {
    /// Minimal radius, a in (0, 1].
    pub a: T,
    /// Mass, m in (0, 1/3].
    pub m: T,
    pub convention: Convention,
}

impl<T: Scalar> ProfileParams<T> {
    pub fn from_a(a: T) -> Result<Self> {
        Ok(Self {
            a,
            m: mass_from_a(a)?,
            convention: Convention::R2,
        })
    }

    pub fn from_mass(m: T) -> Result<Self> {
        let a = min_radius_from_mass(m)?;
        Ok(Self {
            a,
            m,
            convention: Convention::R2,
        })
    }
}

/// m = (a - a^3/3)/2, strictly increasing on (0, 1].
pub fn mass_from_a<T: Scalar>(a: T) -> Result<T> {
    if !(a > T::zero() && a <= T::one()) {
        return Err(Error::Domain(format!("minimal radius a = {a} not in (0, 1]")));
    }
    Ok(half(a - a * a * a / fl::<T>(3.0)))
}

/// f_m(r) = 1 - r^2/3 - 2m/r.
pub fn f_m<T: Scalar>(m: T, r: T) -> T {
    T::one() - r * r / fl::<T>(3.0) - two::<T>() * m / r
}

/// The two positive roots of f_m, r_minus <= r_plus.
///
/// f_m(r) = 0 is the depressed cubic r^3 - 3r + 6m = 0, solved in closed
/// trigonometric form and polished with one Newton step.
pub fn horizon_roots<T: Scalar>(m: T) -> Result<(T, T)> {
    let third = T::one() / fl::<T>(3.0);
    if m <= T::zero() || m > third + fl::<T>(1e-15) {
        return Err(Error::Domain(format!("mass m = {m} not in (0, 1/3]")));
    }
    if (m - third).abs() <= fl::<T>(1e-15) {
        // Double root: the cylinder limit.
        return Ok((T::one(), T::one()));
    }
    let phi = (-fl::<T>(3.0) * m).acos();
    let r_plus = two::<T>() * (phi / fl::<T>(3.0)).cos();
    let r_minus = two::<T>() * ((phi - two::<T>() * T::PI()) / fl::<T>(3.0)).cos();
    let polish = |r: T| {
        // Newton on g(r) = r^3 - 3r + 6m; g' = 3r^2 - 3.
        let g = r * r * r - fl::<T>(3.0) * r + fl::<T>(6.0) * m;
        let gp = fl::<T>(3.0) * (r * r - T::one());
        if gp.abs() > fl::<T>(1e-8) {
            r - g / gp
        } else {
            r
        }
    };
    let (r_minus, r_plus) = (polish(r_minus), polish(r_plus));
    debug_assert!(r_minus > T::zero() && r_minus < r_plus);
    Ok((r_minus, r_plus))
}

/// Inverse of `mass_from_a`: the minimal radius is the inner horizon root.
pub fn min_radius_from_mass<T: Scalar>(m: T) -> Result<T> {
    Ok(horizon_roots(m)?.0)
}

/// ODE right-hand side: u'' = (1 - p^2)/(2u) - u/2.
#[inline]
pub fn upp<T: Scalar>(u: T, p: T) -> T {
    half((T::one() - p * p) / u) - half(u)
}

/// Third derivative, obtained by differentiating the right-hand side.
#[inline]
pub fn uppp<T: Scalar>(u: T, p: T) -> T {
    let w = upp(u, p);
    -p * w / u - half((T::one() - p * p) * p / (u * u)) - half(p)
}

/// Integrated profile on a symmetric arc-length grid.
#[derive(Debug, Clone)]
pub struct Profile<T> {
    pub s_grid: Vec<T>,
    pub u: Vec<T>,
    pub up: Vec<T>,
    pub params: ProfileParams<T>,
    pub step: T,
    s_max: T,
    /// Index of s = 0 in the grid.
    center: usize,
}

/// Classical fourth-order one-step integration on [-s_max, s_max].
pub fn integrate_profile<T: Scalar>(
    params: ProfileParams<T>,
    s_max: T,
    step: T,
) -> Result<Profile<T>> {
    if step <= T::zero() || s_max <= T::zero() {
        return Err(Error::Domain("step and s_max must be positive".into()));
    }
    let n_half = (s_max / step).to_f64().unwrap().round() as usize;
    if n_half == 0 {
        return Err(Error::Domain("s_max smaller than one step".into()));
    }

    let rk4 = |u: T, p: T, h: T| -> Result<(T, T)> {
        let f = |u: T, p: T| (p, upp(u, p));
        let (k1u, k1p) = f(u, p);
        let (k2u, k2p) = f(u + half(h) * k1u, p + half(h) * k1p);
        let (k3u, k3p) = f(u + half(h) * k2u, p + half(h) * k2p);
        let (k4u, k4p) = f(u + h * k3u, p + h * k3p);
        let six = fl::<T>(6.0);
        let un = u + h * (k1u + two::<T>() * k2u + two::<T>() * k3u + k4u) / six;
        let pn = p + h * (k1p + two::<T>() * k2p + two::<T>() * k3p + k4p) / six;
        if !(un > T::zero()) || !un.is_finite() || !pn.is_finite() {
            return Err(Error::Integration(format!(
                "profile reached u = {un} (must stay positive)"
            )));
        }
        Ok((un, pn))
    };

    // March forward and backward from the minimal radius.
    let mut fw_u = vec![params.a];
    let mut fw_p = vec![T::zero()];
    let mut bw_u = vec![params.a];
    let mut bw_p = vec![T::zero()];
    for k in 0..n_half {
        let (u, p) = (fw_u[k], fw_p[k]);
        let (un, pn) = rk4(u, p, step)?;
        fw_u.push(un);
        fw_p.push(pn);
        let (u, p) = (bw_u[k], bw_p[k]);
        let (un, pn) = rk4(u, p, -step)?;
        bw_u.push(un);
        bw_p.push(pn);
    }

    let n = 2 * n_half + 1;
    let mut s_grid = vec![T::zero(); n];
    let mut u = vec![T::zero(); n];
    let mut up = vec![T::zero(); n];
    for k in 0..=n_half {
        let idx_f = n_half + k;
        let idx_b = n_half - k;
        s_grid[idx_f] = fl::<T>(k as f64) * step;
        s_grid[idx_b] = -s_grid[idx_f];
        u[idx_f] = fw_u[k];
        up[idx_f] = fw_p[k];
        u[idx_b] = bw_u[k];
        up[idx_b] = bw_p[k];
    }

    Ok(Profile {
        s_grid,
        u,
        up,
        params,
        step,
        s_max: fl::<T>(n_half as f64) * step,
        center: n_half,
    })
}

impl<T: Scalar> Profile<T> {
    pub fn s_max(&self) -> T {
        self.s_max
    }

    /// (u, u') at arbitrary s by quintic Hermite interpolation on the cell,
    /// using the stored endpoint values, slopes and ODE curvatures. The
    /// interpolation error is far below the integrator error at step 1e-3.
    pub fn eval(&self, s: T) -> Result<(T, T)> {
        if !(s >= -self.s_max && s <= self.s_max) {
            return Err(Error::OutOfRange(format!(
                "s = {s} outside profile range [{}, {}]",
                -self.s_max, self.s_max
            )));
        }
        let x = (s + self.s_max) / self.step;
        let mut i = x.to_f64().unwrap().floor() as usize;
        let last = self.s_grid.len() - 1;
        if i >= last {
            i = last - 1;
        }
        let t = (s - self.s_grid[i]) / self.step;

        let (u0, p0) = (self.u[i], self.up[i]);
        let (u1, p1) = (self.u[i + 1], self.up[i + 1]);
        let h = self.step;
        let (a0, a1) = (upp(u0, p0), upp(u1, p1));

        // Quintic Hermite basis in t over [0,1], scaled derivatives.
        let t2 = t * t;
        let t3 = t2 * t;
        let t4 = t3 * t;
        let t5 = t4 * t;
        let c6 = fl::<T>(6.0);
        let c15 = fl::<T>(15.0);
        let c10 = fl::<T>(10.0);
        let h00 = T::one() - c10 * t3 + c15 * t4 - c6 * t5;
        let h10 = t - c6 * t3 + fl::<T>(8.0) * t4 - fl::<T>(3.0) * t5;
        let h20 = half(t2) - fl::<T>(1.5) * t3 + fl::<T>(1.5) * t4 - half(t5);
        let h01 = c10 * t3 - c15 * t4 + c6 * t5;
        let h11 = -fl::<T>(4.0) * t3 + fl::<T>(7.0) * t4 - fl::<T>(3.0) * t5;
        let h21 = half(t3) - t4 + half(t5);

        let u = h00 * u0 + h10 * (h * p0) + h20 * (h * h * a0) + h01 * u1
            + h11 * (h * p1)
            + h21 * (h * h * a1);

        // d/dt of the basis, then chain rule by 1/h.
        let d00 = -fl::<T>(30.0) * t2 + fl::<T>(60.0) * t3 - fl::<T>(30.0) * t4;
        let d10 = T::one() - fl::<T>(18.0) * t2 + fl::<T>(32.0) * t3 - c15 * t4;
        let d20 = t - fl::<T>(4.5) * t2 + c6 * t3 - fl::<T>(2.5) * t4;
        let d01 = -d00;
        let d11 = -fl::<T>(12.0) * t2 + fl::<T>(28.0) * t3 - c15 * t4;
        let d21 = fl::<T>(1.5) * t2 - fl::<T>(4.0) * t3 + fl::<T>(2.5) * t4;

        let p = (d00 * u0 + d10 * (h * p0) + d20 * (h * h * a0) + d01 * u1
            + d11 * (h * p1)
            + d21 * (h * h * a1))
            / h;

        Ok((u, p))
    }

    /// First integral u(1 - u'^2) - u^3/3 at a node.
    pub fn first_integral_at(&self, idx: usize) -> T {
        let (u, p) = (self.u[idx], self.up[idx]);
        u * (T::one() - p * p) - u * u * u / fl::<T>(3.0)
    }

    /// Max relative drift of the first integral from 2m over all nodes.
    pub fn first_integral_drift(&self) -> T {
        let target = two::<T>() * self.params.m;
        let mut worst = T::zero();
        for idx in 0..self.u.len() {
            let d = (self.first_integral_at(idx) - target).abs() / target.abs();
            if d > worst {
                worst = d;
            }
        }
        worst
    }

    /// Maximum radius over the grid, refined by locating u' = 0 in the
    /// bracketing cell (the node spacing alone would miss the peak by
    /// O(step^2)).
    pub fn max_u(&self) -> T {
        let mut best = 0usize;
        for (i, v) in self.u.iter().enumerate() {
            if *v > self.u[best] {
                best = i;
            }
        }
        if best == 0 || best == self.u.len() - 1 {
            return self.u[best];
        }
        let mut lo = self.s_grid[best - 1];
        let mut hi = self.s_grid[best + 1];
        let slope = |s: T| self.eval(s).map(|(_, p)| p).unwrap_or(T::zero());
        if slope(lo) * slope(hi) < T::zero() {
            for _ in 0..80 {
                let mid = half(lo + hi);
                if slope(lo) * slope(mid) <= T::zero() {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            self.eval(half(lo + hi)).map(|(u, _)| u).unwrap_or(self.u[best])
        } else {
            self.u[best]
        }
    }

    pub fn center_index(&self) -> usize {
        self.center
    }

    /// CSV export (columns s, u, up) at 17 significant digits.
    pub fn to_csv(&self) -> String {
        let s: Vec<f64> = self.s_grid.iter().map(|v| v.to_f64().unwrap()).collect();
        let u: Vec<f64> = self.u.iter().map(|v| v.to_f64().unwrap()).collect();
        let p: Vec<f64> = self.up.iter().map(|v| v.to_f64().unwrap()).collect();
        crate::report::csv_table(&["s", "u", "up"], &[&s, &u, &p], ",")
    }
}

/// Scalar curvature R(s) = 2(1 - u'^2)/u^2 - 4u''/u with u'' from the ODE;
/// identically 2 on solutions.
pub fn scalar_curvature_of_profile<T: Scalar>(profile: &Profile<T>, s: T) -> Result<T> {
    let (u, p) = profile.eval(s)?;
    Ok(scalar_curvature_from_state(u, p, upp(u, p)))
}

/// The warped-product curvature formula itself, usable with synthetic data.
pub fn scalar_curvature_from_state<T: Scalar>(u: T, p: T, upp_val: T) -> T {
    two::<T>() * (T::one() - p * p) / (u * u) - fl::<T>(4.0) * upp_val / u
}
