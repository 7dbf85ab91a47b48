//! Named example symbols, matrices and reference tables.

use std::f64::consts::{FRAC_PI_2, PI};
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::domain::{MatrixSymbol, Rect, ScalarSymbol};
use crate::error::{Error, Result};
use crate::matching::{Direction, MonotonePiece};

/// `a + b cos(theta)` on `[-pi, pi]`.
pub fn cosine_symbol(a: f64, b: f64) -> ScalarSymbol {
    ScalarSymbol::univariate(-PI, PI, move |t| a + b * t.cos(), a - b.abs(), a + b.abs())
        .expect("valid interval")
}

fn fc(t: f64) -> f64 {
    let t = t.abs();
    if t < FRAC_PI_2 {
        1.0
    } else {
        t + 1.0 - FRAC_PI_2
    }
}

fn fd(t: f64) -> f64 {
    let t = t.abs();
    if t < FRAC_PI_2 {
        (2.0 * t).cos() + (3.0 * t).cos()
    } else {
        t
    }
}

/// Minimum point of `cos 2t + cos 3t` on `[0, pi/2]`: `cos t = (sqrt 10 - 1) / 6`.
pub fn fd_argmin() -> f64 {
    ((10f64.sqrt() - 1.0) / 6.0).acos()
}

/// `min fd = -25/54 - 10 sqrt(10) / 27`.
pub fn fd_min() -> f64 {
    -25.0 / 54.0 - 10.0 * 10f64.sqrt() / 27.0
}

/// Even symbol equal to `1` on `[0, pi/2)` and `t + 1 - pi/2` on `[pi/2, pi]`.
pub fn fc_symbol() -> ScalarSymbol {
    ScalarSymbol::univariate(-PI, PI, fc, 1.0, 1.0 + FRAC_PI_2)
        .expect("valid interval")
        .with_discontinuities(vec![-FRAC_PI_2, FRAC_PI_2])
}

/// Even symbol equal to `cos 2t + cos 3t` on `[0, pi/2)` and `t` on `[pi/2, pi]`.
pub fn fd_symbol() -> ScalarSymbol {
    ScalarSymbol::univariate(-PI, PI, fd, fd_min(), PI)
        .expect("valid interval")
        .with_discontinuities(vec![-FRAC_PI_2, FRAC_PI_2])
}

/// Monotone pieces of [`fd_symbol`] on `[0, pi]`.
pub fn fd_pieces() -> Vec<MonotonePiece> {
    let smooth = |t: f64| (2.0 * t).cos() + (3.0 * t).cos();
    let m = fd_argmin();
    vec![
        MonotonePiece::new(0.0, m, Direction::Decreasing, smooth).expect("non-empty"),
        MonotonePiece::new(m, FRAC_PI_2, Direction::Increasing, smooth).expect("non-empty"),
        MonotonePiece::new(FRAC_PI_2, PI, Direction::Increasing, |t| t).expect("non-empty"),
    ]
}

/// Characteristic function of `{1}` on `[0, 1]`.
pub fn chi_one_symbol() -> ScalarSymbol {
    ScalarSymbol::univariate(0.0, 1.0, |x| if x == 1.0 { 1.0 } else { 0.0 }, 0.0, 1.0).expect("valid interval")
}

/// Scalar Toeplitz examples with tabulated `M_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToeplitzExample {
    /// [`fc_symbol`].
    E2,
    /// [`fd_symbol`].
    E3,
}

impl ToeplitzExample {
    pub fn symbol(self) -> ScalarSymbol {
        match self {
            ToeplitzExample::E2 => fc_symbol(),
            ToeplitzExample::E3 => fd_symbol(),
        }
    }

    pub fn table(self) -> &'static [(usize, f64)] {
        match self {
            ToeplitzExample::E2 => &E2_TABLE,
            ToeplitzExample::E3 => &E3_TABLE,
        }
    }
}

impl FromStr for ToeplitzExample {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e2" => Ok(ToeplitzExample::E2),
            "e3" => Ok(ToeplitzExample::E3),
            _ => Err(Error::InvalidArgument(format!("unknown example {s:?}"))),
        }
    }
}

pub const E2_TABLE: [(usize, f64); 8] = [
    (8, 0.0851),
    (16, 0.0632),
    (32, 0.0454),
    (64, 0.0312),
    (128, 0.0206),
    (256, 0.0132),
    (512, 0.0082),
    (1024, 0.0050),
];

pub const E3_TABLE: [(usize, f64); 8] = [
    (8, 0.7220),
    (16, 0.5625),
    (32, 0.4471),
    (64, 0.2956),
    (128, 0.1783),
    (256, 0.1096),
    (512, 0.0605),
    (1024, 0.0373),
];

/// Diffusion coefficients for the finite-difference example.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coefficient {
    /// `e^{-x}`
    Exp,
    /// `2 + cos 3x`
    Cos3,
    /// `x log(1 + x)`
    XLog,
}

impl Coefficient {
    pub const ALL: [Coefficient; 3] = [Coefficient::Exp, Coefficient::Cos3, Coefficient::XLog];

    pub fn eval(self, x: f64) -> f64 {
        match self {
            Coefficient::Exp => (-x).exp(),
            Coefficient::Cos3 => 2.0 + (3.0 * x).cos(),
            Coefficient::XLog => x * x.ln_1p(),
        }
    }

    pub fn bounds(self) -> (f64, f64) {
        match self {
            Coefficient::Exp => ((-1.0f64).exp(), 1.0),
            Coefficient::Cos3 => (1.0, 3.0),
            Coefficient::XLog => (0.0, 2f64.ln()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Coefficient::Exp => "exp",
            Coefficient::Cos3 => "cos3",
            Coefficient::XLog => "xlog",
        }
    }

    /// `a(x) (2 - 2 cos theta)` on `[0, 1] x [0, pi]`.
    pub fn symbol(self) -> ScalarSymbol {
        let (lo, hi) = self.bounds();
        let rect = Rect::new(vec![0.0, 0.0], vec![1.0, PI]).expect("valid rectangle");
        ScalarSymbol::new(rect, move |x: &[f64]| self.eval(x[0]) * (2.0 - 2.0 * x[1].cos()), 0.0f64.min(4.0 * lo), 4.0 * hi)
            .expect("valid symbol")
    }

    pub fn table(self) -> &'static [(usize, f64)] {
        match self {
            Coefficient::Exp => &E4_EXP_TABLE,
            Coefficient::Cos3 => &E4_COS3_TABLE,
            Coefficient::XLog => &E4_XLOG_TABLE,
        }
    }
}

impl FromStr for Coefficient {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Coefficient::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown coefficient {s:?}")))
    }
}

pub const E4_EXP_TABLE: [(usize, f64); 8] = [
    (900, 0.0684),
    (1600, 0.0559),
    (2500, 0.0473),
    (3600, 0.0411),
    (4900, 0.0364),
    (6400, 0.0326),
    (8100, 0.0296),
    (10000, 0.0271),
];

pub const E4_COS3_TABLE: [(usize, f64); 8] = [
    (900, 0.1471),
    (1600, 0.1132),
    (2500, 0.0890),
    (3600, 0.0738),
    (4900, 0.0634),
    (6400, 0.0558),
    (8100, 0.0484),
    (10000, 0.0436),
];

pub const E4_XLOG_TABLE: [(usize, f64); 8] = [
    (900, 0.1240),
    (1600, 0.0915),
    (2500, 0.0717),
    (3600, 0.0583),
    (4900, 0.0497),
    (6400, 0.0435),
    (8100, 0.0383),
    (10000, 0.0344),
];

pub fn kappa(t: f64) -> f64 {
    1.0 - 2.0 / 3.0 * t.cos() - (2.0 * t).cos() / 3.0
}

pub fn mu(t: f64) -> f64 {
    11.0 / 20.0 + 13.0 / 30.0 * t.cos() + (2.0 * t).cos() / 60.0
}

/// `kappa(t1) mu(t2) + mu(t1) kappa(t2)` on `[0, pi]^2`.
pub fn iga_symbol() -> ScalarSymbol {
    let rect = Rect::new(vec![0.0, 0.0], vec![PI, PI]).expect("valid rectangle");
    ScalarSymbol::new(rect, |x: &[f64]| kappa(x[0]) * mu(x[1]) + mu(x[0]) * kappa(x[1]), 0.0, 1.5)
        .expect("valid symbol")
}

/// `(1/3) [[4, -2 - 2 e^{i t}], [-2 - 2 e^{-i t}, 8 - 4 cos t]]` on `[0, pi]`.
pub fn e5_symbol() -> MatrixSymbol {
    MatrixSymbol::new(0.0, PI, 2, |t| {
        let off = (Complex64::new(-2.0, 0.0) - 2.0 * Complex64::from_polar(1.0, t)) / 3.0;
        DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(4.0 / 3.0, 0.0),
                off,
                off.conj(),
                Complex64::new((8.0 - 4.0 * t.cos()) / 3.0, 0.0),
            ],
        )
    })
    .expect("valid symbol")
}

pub fn e5_branch1(t: f64) -> f64 {
    2.0 - 2.0 / 3.0 * t.cos() - 2.0 / 3.0 * (3.0 + t.cos() * t.cos()).sqrt()
}

pub fn e5_branch2(t: f64) -> f64 {
    2.0 - 2.0 / 3.0 * t.cos() + 2.0 / 3.0 * (3.0 + t.cos() * t.cos()).sqrt()
}

/// The `(2n - 1) x (2n - 1)` matrix with rows `(4, -2)/3` and
/// `(-2, -2, 8, -2, -2)/3` alternating, built entrywise.
pub fn e5_matrix(n: usize) -> DMatrix<f64> {
    let d = 2 * n - 1;
    DMatrix::from_fn(d, d, |i, j| {
        let v = match (i % 2, i.abs_diff(j)) {
            (0, 0) => 4.0,
            (1, 0) => 8.0,
            (_, 1) => -2.0,
            (1, 2) => -2.0,
            _ => 0.0,
        };
        v / 3.0
    })
}

/// Diagonal matrix symbol with the given scalar branches.
pub fn diagonal_symbol(a: f64, b: f64, fs: Vec<Arc<dyn Fn(f64) -> f64 + Send + Sync>>) -> Result<MatrixSymbol> {
    MatrixSymbol::diagonal(a, b, fs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eig::eig_sym;
    use crate::toeplitz::fourier_coeff;

    #[test]
    fn fc_mean() {
        let c0 = fourier_coeff(&fc_symbol(), 0);
        assert!((c0.re - (1.0 + PI / 8.0)).abs() < 1e-13);
        assert!(c0.im.abs() < 1e-15);
    }

    #[test]
    fn fd_extremum() {
        let m = fd_argmin();
        assert!((fd(m) - fd_min()).abs() < 1e-14);
        for i in 0..=1000 {
            assert!(fd(i as f64 * PI / 1000.0) >= fd_min() - 1e-15);
        }
        assert!((m - 1.202_121_5).abs() < 1e-7);
    }

    #[test]
    fn e5_branches_are_symbol_eigenvalues() {
        let ms = e5_symbol();
        for i in 0..=20 {
            let t = i as f64 * PI / 20.0;
            let b = ms.branches(t);
            assert!((b[0] - e5_branch1(t)).abs() < 1e-13);
            assert!((b[1] - e5_branch2(t)).abs() < 1e-13);
        }
        assert!(e5_branch1(0.0).abs() < 1e-15 && (e5_branch1(PI) - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn e5_matrix_spectrum() {
        let n = 9;
        let s = eig_sym(&e5_matrix(n)).unwrap();
        let mut exact: Vec<f64> = (1..=n).map(|i| e5_branch1(i as f64 * PI / n as f64)).collect();
        exact.extend((1..n).map(|i| e5_branch2(i as f64 * PI / n as f64)));
        exact.sort_by(f64::total_cmp);
        for (a, b) in s.values().iter().zip(&exact) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn iga_symbol_range() {
        let f = iga_symbol();
        assert!(f.eval(&[0.0, 0.0]).abs() < 1e-15);
        let m = 400;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..=m {
            for j in 0..=m {
                let v = f.eval(&[i as f64 * PI / m as f64, j as f64 * PI / m as f64]);
                assert!((-1e-15..=1.5 + 1e-12).contains(&v));
                hi = hi.max(v);
            }
        }
        assert!(hi > 1.49);
    }

    #[test]
    fn parse_names() {
        assert_eq!("cos3".parse::<Coefficient>().unwrap(), Coefficient::Cos3);
        assert_eq!("e3".parse::<ToeplitzExample>().unwrap(), ToeplitzExample::E3);
        assert!("e9".parse::<ToeplitzExample>().is_err());
    }
}
