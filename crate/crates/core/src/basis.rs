//! Gauss–Legendre quadrature on the unit interval and the nodal Lagrange
//! basis built on its nodes, together with the small operators derived from
//! it: reconstruction and interpolation matrices, the oscillation indicator
//! and the local space-time predictor operators.

use crate::error::{Error, Result};
use crate::linalg::SmallMatrix;
use crate::real::Real;

/// Largest supported polynomial degree.
pub const MAX_DEGREE: usize = 5;

/// Quadrature rule on `[0, 1]`; weights sum to one.
#[derive(Clone, Debug)]
pub struct QuadratureRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> QuadratureRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate(&self, a: T, b: T, mut f: impl FnMut(T) -> T) -> T {
        let h = b - a;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(a + h * x))
            .sum::<T>()
            * h
    }
}

/// Gauss–Legendre rule with `n` points mapped to `[0, 1]`, `1 <= n <= 10`.
pub fn gauss_legendre<T: Real>(n: usize) -> Result<QuadratureRule<T>> {
    if !(1..=10).contains(&n) {
        return Err(Error::Config(format!(
            "Gauss-Legendre rule with {n} points is not supported (1..=10)"
        )));
    }
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, t);
            dp = d;
            let dt = p / d;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, t);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - t * t) * dp * dp);
        // t decreases with i: mirror pairs fill from both ends
        nodes[i] = 0.5 * (1.0 - t);
        nodes[n - 1 - i] = 0.5 * (1.0 + t);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.5;
    }
    Ok(QuadratureRule {
        nodes: nodes.into_iter().map(T::lit).collect(),
        weights: weights.into_iter().map(T::lit).collect(),
    })
}

fn legendre(n: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = t;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

/// Lagrange basis of degree `M` interpolating at the `M + 1` Gauss–Legendre
/// nodes of the unit interval.
#[derive(Clone, Debug)]
pub struct NodalBasis<T> {
    degree: usize,
    rule: QuadratureRule<T>,
    /// `D[i][j] = psi_j'(x_i)`
    derivative: SmallMatrix<T>,
    left: Vec<T>,
    right: Vec<T>,
    center: Vec<T>,
}

impl<T: Real> NodalBasis<T> {
    pub fn new(degree: usize) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::Config(format!(
                "polynomial degree {degree} exceeds the supported maximum {MAX_DEGREE}"
            )));
        }
        let rule = gauss_legendre::<T>(degree + 1)?;
        let mut b = Self {
            degree,
            rule,
            derivative: SmallMatrix::zeros(degree + 1),
            left: Vec::new(),
            right: Vec::new(),
            center: Vec::new(),
        };
        let n = degree + 1;
        let mut d = SmallMatrix::zeros(n);
        for i in 0..n {
            let mut diag = T::zero();
            for j in 0..n {
                if i != j {
                    let v = b.derivative_at(j, b.rule.nodes[i]);
                    d[(i, j)] = v;
                    diag -= v;
                }
            }
            // rows annihilate constants exactly
            d[(i, i)] = diag;
        }
        b.derivative = d;
        b.left = b.values_at(T::zero());
        b.right = b.values_at(T::one());
        b.center = b.values_at(T::lit(0.5));
        Ok(b)
    }

    #[inline(always)]
    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline(always)]
    pub fn len(&self) -> usize {
        self.degree + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[T] {
        &self.rule.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.rule.weights
    }

    pub fn rule(&self) -> &QuadratureRule<T> {
        &self.rule
    }

    pub fn derivative_matrix(&self) -> &SmallMatrix<T> {
        &self.derivative
    }

    /// Basis values at `0`.
    pub fn left_values(&self) -> &[T] {
        &self.left
    }

    /// Basis values at `1`.
    pub fn right_values(&self) -> &[T] {
        &self.right
    }

    /// Basis values at `1/2`.
    pub fn center_values(&self) -> &[T] {
        &self.center
    }

    /// Value of basis function `l` at `x`.
    pub fn eval(&self, l: usize, x: T) -> T {
        let mu = &self.rule.nodes;
        let mut v = T::one();
        for (m, &xm) in mu.iter().enumerate() {
            if m != l {
                v *= (x - xm) / (mu[l] - xm);
            }
        }
        v
    }

    /// Derivative of basis function `l` at `x`.
    pub fn derivative_at(&self, l: usize, x: T) -> T {
        let mu = &self.rule.nodes;
        let n = mu.len();
        let mut sum = T::zero();
        for k in 0..n {
            if k == l {
                continue;
            }
            let mut term = T::one() / (mu[l] - mu[k]);
            for m in 0..n {
                if m != l && m != k {
                    term *= (x - mu[m]) / (mu[l] - mu[m]);
                }
            }
            sum += term;
        }
        sum
    }

    pub fn values_at(&self, x: T) -> Vec<T> {
        (0..self.len()).map(|l| self.eval(l, x)).collect()
    }

    /// Evaluates the interpolant with nodal values `coeffs` at `x`.
    pub fn interpolate(&self, coeffs: &[T], x: T) -> T {
        coeffs
            .iter()
            .enumerate()
            .map(|(l, &c)| c * self.eval(l, x))
            .sum()
    }

    /// Matrix whose row `e` holds the averages of every basis function over
    /// the cell shifted by `offsets[e]`.
    pub fn reconstruction_matrix(&self, offsets: &[isize]) -> SmallMatrix<T> {
        assert_eq!(offsets.len(), self.len());
        SmallMatrix::from_fn(self.len(), |e, r| {
            let a = T::from_isize(offsets[e]).unwrap();
            self.rule.integrate(a, a + T::one(), |x| self.eval(r, x))
        })
    }

    /// Matrix whose row `e` holds every basis function evaluated at the
    /// centre of the cell shifted by `offsets[e]`.
    pub fn interpolation_matrix(&self, offsets: &[isize]) -> SmallMatrix<T> {
        assert_eq!(offsets.len(), self.len());
        SmallMatrix::from_fn(self.len(), |e, r| {
            let x = T::from_isize(offsets[e]).unwrap() + T::lit(0.5);
            self.eval(r, x)
        })
    }

    /// Quadratic form `sum_alpha (D^alpha)^T W D^alpha` measuring the
    /// squared derivatives of a nodal polynomial on the unit interval.
    pub fn oscillation_indicator(&self) -> SmallMatrix<T> {
        let n = self.len();
        let mut sigma = SmallMatrix::zeros(n);
        let mut dpow = SmallMatrix::identity(n);
        for _ in 1..=self.degree {
            dpow = self.derivative.matmul(&dpow);
            for r in 0..n {
                for s in 0..n {
                    let mut acc = T::zero();
                    for q in 0..n {
                        acc += dpow[(q, r)] * self.rule.weights[q] * dpow[(q, s)];
                    }
                    sigma[(r, s)] += acc;
                }
            }
        }
        sigma
    }

    /// Matrix `E[a][b] = psi_b(1 + ratio * tau_a)` that extrapolates a
    /// nodal polynomial in time from the previous step into the next one.
    pub fn extrapolation_matrix(&self, ratio: T) -> SmallMatrix<T> {
        SmallMatrix::from_fn(self.len(), |a, b| {
            self.eval(b, T::one() + ratio * self.rule.nodes[a])
        })
    }
}

/// Local operators of the space-time predictor in the collocated nodal
/// basis. With the mass matrix diagonal, the time part of the weak form
/// reduces to the `(M+1) x (M+1)` matrix
/// `K[a][b] = psi_a(1) psi_b(1) - w_b psi_a'(tau_b)`
/// acting independently at every spatial node.
#[derive(Clone, Debug)]
pub struct PredictorOperators<T> {
    /// Time lift matrix `K`.
    pub time_lift: SmallMatrix<T>,
    /// `K^-1 diag(w)` applied to nodal right-hand sides.
    pub picard: SmallMatrix<T>,
    /// `psi(0)`; the initial data enters as `K^-1 psi(0) = 1`.
    pub initial: Vec<T>,
}

impl<T: Real> PredictorOperators<T> {
    pub fn new(basis: &NodalBasis<T>) -> Result<Self> {
        let n = basis.len();
        let w = basis.weights();
        let right = basis.right_values();
        let d = basis.derivative_matrix();
        // psi_a'(tau_b) = D[b][a]
        let k = SmallMatrix::from_fn(n, |a, b| right[a] * right[b] - w[b] * d[(b, a)]);
        let kinv = k
            .inverse()
            .ok_or_else(|| Error::Config("singular predictor time matrix".into()))?;
        let picard = SmallMatrix::from_fn(n, |a, b| kinv[(a, b)] * w[b]);
        Ok(Self {
            time_lift: k,
            picard,
            initial: basis.left_values().to_vec(),
        })
    }
}
