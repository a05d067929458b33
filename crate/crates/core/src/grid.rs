//! Hemisphere grids: uniform theta nodes on [0, pi/2] including pole and
//! equator, uniform periodic phi nodes, Simpson-in-theta x trapezoid-in-phi
//! quadrature.
//!
//! n_phi = 1 means axisymmetric semantics: fields are phi-independent and
//! quadrature carries the 2*pi factor.

use crate::error::{Error, Result};
use crate::scalar::{fl, Scalar};

#[derive(Debug, Clone)]
pub struct HemisphereGrid<T> {
    pub n_theta: usize,
    pub n_phi: usize,
    pub thetas: Vec<T>,
    pub phis: Vec<T>,
    /// Simpson weights in theta (length n_theta, sums to pi/2).
    pub w_theta: Vec<T>,
    /// Trapezoid weight in phi (2*pi/n_phi; 2*pi when axisymmetric).
    pub w_phi: T,
    pub h_theta: T,
}

impl<T: Scalar> HemisphereGrid<T> {
    /// n_theta must be odd (composite Simpson) and at least 5.
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 5 || n_theta % 2 == 0 {
            return Err(Error::Config(format!(
                "n_theta = {n_theta} must be odd and >= 5"
            )));
        }
        if n_phi != 1 && (n_phi < 4 || n_phi % 2 != 0) {
            return Err(Error::Config(format!(
                "n_phi = {n_phi} must be 1 (axisymmetric) or even >= 4"
            )));
        }
        let h = T::FRAC_PI_2() / fl::<T>((n_theta - 1) as f64);
        let thetas: Vec<T> = (0..n_theta).map(|j| fl::<T>(j as f64) * h).collect();
        let third = T::one() / fl::<T>(3.0);
        let mut w_theta = vec![T::zero(); n_theta];
        for (j, w) in w_theta.iter_mut().enumerate() {
            let c = if j == 0 || j == n_theta - 1 {
                T::one()
            } else if j % 2 == 1 {
                fl::<T>(4.0)
            } else {
                fl::<T>(2.0)
            };
            *w = c * h * third;
        }
        let two_pi = T::PI() + T::PI();
        let (phis, w_phi) = if n_phi == 1 {
            (vec![T::zero()], two_pi)
        } else {
            let hp = two_pi / fl::<T>(n_phi as f64);
            ((0..n_phi).map(|k| fl::<T>(k as f64) * hp).collect(), hp)
        };
        Ok(Self {
            n_theta,
            n_phi,
            thetas,
            phis,
            w_theta,
            w_phi,
            h_theta: h,
        })
    }

    pub fn axisym(&self) -> bool {
        self.n_phi == 1
    }

    pub fn n_nodes(&self) -> usize {
        self.n_theta * self.n_phi
    }

    #[inline]
    pub fn idx(&self, j: usize, k: usize) -> usize {
        j * self.n_phi + k
    }

    /// Neighbor in theta with ghost handling: through-pole reflection below
    /// j = 0 (phi advances by half a turn) and even reflection past the
    /// equator. Returns the (j, k) actually sampled.
    #[inline]
    pub fn theta_neighbor(&self, j: isize, k: usize) -> (usize, usize) {
        if j < 0 {
            let jj = (-j) as usize;
            let kk = if self.n_phi == 1 {
                0
            } else {
                (k + self.n_phi / 2) % self.n_phi
            };
            (jj, kk)
        } else if j as usize >= self.n_theta {
            (2 * (self.n_theta - 1) - j as usize, k)
        } else {
            (j as usize, k)
        }
    }

    #[inline]
    pub fn phi_neighbor(&self, k: isize) -> usize {
        let n = self.n_phi as isize;
        (((k % n) + n) % n) as usize
    }

    /// Quadrature of the round-unit-hemisphere area element; equals 2*pi.
    pub fn round_hemisphere_area(&self) -> T {
        let mut acc = T::zero();
        for j in 0..self.n_theta {
            for _k in 0..self.n_phi {
                acc += self.w_theta[j] * self.w_phi * self.thetas[j].sin();
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_integrates_round_area() {
        let g = HemisphereGrid::<f64>::new(257, 1).unwrap();
        let area = g.round_hemisphere_area();
        assert!(
            (area - 2.0 * std::f64::consts::PI).abs() < 1e-10,
            "area = {area}"
        );
        let g2 = HemisphereGrid::<f64>::new(257, 8).unwrap();
        assert!((g2.round_hemisphere_area() - 2.0 * std::f64::consts::PI).abs() < 1e-10);
    }

    #[test]
    fn ghost_maps() {
        let g = HemisphereGrid::<f64>::new(9, 8).unwrap();
        assert_eq!(g.theta_neighbor(-1, 0), (1, 4));
        assert_eq!(g.theta_neighbor(-1, 6), (1, 2));
        assert_eq!(g.theta_neighbor(9, 3), (7, 3));
        assert_eq!(g.theta_neighbor(4, 3), (4, 3));
        assert_eq!(g.phi_neighbor(-1), 7);
        assert_eq!(g.phi_neighbor(8), 0);
        let ax = HemisphereGrid::<f64>::new(9, 1).unwrap();
        assert_eq!(ax.theta_neighbor(-2, 0), (2, 0));
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(HemisphereGrid::<f64>::new(8, 1).is_err());
        assert!(HemisphereGrid::<f64>::new(9, 3).is_err());
    }
}
