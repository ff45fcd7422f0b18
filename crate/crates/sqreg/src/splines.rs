//! B-spline bases on equidistant knots over [0,1], monotone splines, and
//! inversion of monotone piecewise polynomials.
//!
//! Bases are clamped: boundary knots carry multiplicity `degree + 1`, so a
//! degree-`m` basis on `k` intervals has `k + m` functions, the first equal
//! to 1 at `t = 0` and the last equal to 1 at `t = 1`.

use thiserror::Error;

/// Largest basis size the inversion scratch buffers are sized for
/// (degree 3 with 12 intervals gives 15 functions).
const MAX_SUPPORT: usize = 4;

/// Positivity floor shared with likelihood evaluation: derivatives at or
/// below this value are treated as zero density.
pub const POSITIVITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SplineError {
    #[error("spline degree must be between 1 and 3, got {0}")]
    UnsupportedDegree(usize),
    #[error("knot intervals must be at least 1, got {0}")]
    TooFewIntervals(usize),
    #[error("basis index {index} out of range for {count} basis functions")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("coefficient vector has length {got}, basis needs {expected}")]
    CoefficientLength { got: usize, expected: usize },
    #[error("monotone coefficients must start at 0 and end at 1, got [{first}, {last}]")]
    BadEndpoints { first: f64, last: f64 },
    #[error("monotone coefficients must be nondecreasing (violated at index {0})")]
    NotMonotone(usize),
    #[error("argument {name} = {value} outside [0,1]")]
    OutOfDomain { name: &'static str, value: f64 },
    #[error("argument {name} is not finite")]
    NonFinite { name: &'static str },
    #[error("splines have mismatched bases ({0} vs {1} functions)")]
    BasisMismatch(usize, usize),
}

/// Clamped B-spline basis of a given degree on `k` equidistant intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineBasis {
    degree: usize,
    intervals: usize,
    knots: Vec<f64>,
}

impl SplineBasis {
    /// Builds the basis with interior knots `i/k` and boundary knots of
    /// multiplicity `degree + 1`.
    pub fn new(degree: usize, intervals: usize) -> Result<Self, SplineError> {
        if degree == 0 || degree > 3 {
            return Err(SplineError::UnsupportedDegree(degree));
        }
        if intervals == 0 {
            return Err(SplineError::TooFewIntervals(intervals));
        }
        let k = intervals;
        let mut knots = Vec::with_capacity(k + 2 * degree + 1);
        knots.extend(std::iter::repeat(0.0).take(degree + 1));
        knots.extend((1..k).map(|i| i as f64 / k as f64));
        knots.extend(std::iter::repeat(1.0).take(degree + 1));
        Ok(Self {
            degree,
            intervals,
            knots,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    /// Number of basis functions, `k + m`.
    pub fn basis_count(&self) -> usize {
        self.intervals + self.degree
    }

    /// Dimension of the spacing vector that parameterizes a monotone spline
    /// on this basis, `k + m - 1`.
    pub fn spacing_dim(&self) -> usize {
        self.basis_count() - 1
    }

    /// Extended knot sequence including boundary multiplicities.
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Index of the knot interval containing `t`, in `0..k`. Evaluation at
    /// `t = 1` uses the last interval (left-continuity).
    pub fn interval_of(&self, t: f64) -> usize {
        let raw = (t * self.intervals as f64) as usize;
        raw.min(self.intervals - 1)
    }

    /// Values of the `degree + 1` basis functions that are nonzero at `t`,
    /// together with the index of the first of them.
    pub fn eval_nonzero(&self, t: f64) -> (usize, [f64; MAX_SUPPORT]) {
        let m = self.degree;
        let interval = self.interval_of(t);
        let span = m + interval;
        let mut values = [0.0; MAX_SUPPORT];
        let mut left = [0.0; MAX_SUPPORT];
        let mut right = [0.0; MAX_SUPPORT];
        values[0] = 1.0;
        for j in 1..=m {
            left[j] = t - self.knots[span + 1 - j];
            right[j] = self.knots[span + j] - t;
            let mut saved = 0.0;
            for r in 0..j {
                let tmp = values[r] / (right[r + 1] + left[j - r]);
                values[r] = saved + right[r + 1] * tmp;
                saved = left[j - r] * tmp;
            }
            values[j] = saved;
        }
        (interval, values)
    }

    /// Value of the `j`-th basis function (0-based) at `t`.
    pub fn basis_value(&self, j: usize, t: f64) -> Result<f64, SplineError> {
        let count = self.basis_count();
        if j >= count {
            return Err(SplineError::IndexOutOfRange { index: j, count });
        }
        check_unit("t", t)?;
        let (start, values) = self.eval_nonzero(t);
        if j < start || j > start + self.degree {
            return Ok(0.0);
        }
        Ok(values[j - start])
    }

    /// Greville abscissae: means of `degree` consecutive interior knots.
    /// Using them as coefficients reproduces the identity function.
    pub fn greville(&self) -> Vec<f64> {
        let m = self.degree;
        (0..self.basis_count())
            .map(|j| self.knots[j + 1..j + 1 + m].iter().sum::<f64>() / m as f64)
            .collect()
    }

    /// Basis of the derivative splines: same intervals, degree lowered by one.
    pub fn derivative_basis(&self) -> Result<SplineBasis, SplineError> {
        SplineBasis::new(self.degree - 1, self.intervals)
    }

    /// Coefficients of the exact derivative of a spline with coefficients
    /// `coeffs`, expressed on [`Self::derivative_basis`]. Entry `j` is
    /// `m (c[j+1] - c[j]) / (T[j+1+m] - T[j+1])`.
    pub fn derivative_coefficients(&self, coeffs: &[f64]) -> Result<Vec<f64>, SplineError> {
        let count = self.basis_count();
        if coeffs.len() != count {
            return Err(SplineError::CoefficientLength {
                got: coeffs.len(),
                expected: count,
            });
        }
        let m = self.degree as f64;
        Ok((0..count - 1)
            .map(|j| {
                let span = self.knots[j + 1 + self.degree] - self.knots[j + 1];
                m * (coeffs[j + 1] - coeffs[j]) / span
            })
            .collect())
    }
}

/// A spline given by a basis and a coefficient vector.
#[derive(Debug, Clone)]
pub struct Spline {
    basis: SplineBasis,
    coeffs: Vec<f64>,
}

impl Spline {
    pub fn new(basis: SplineBasis, coeffs: Vec<f64>) -> Result<Self, SplineError> {
        if coeffs.len() != basis.basis_count() {
            return Err(SplineError::CoefficientLength {
                got: coeffs.len(),
                expected: basis.basis_count(),
            });
        }
        Ok(Self { basis, coeffs })
    }

    pub fn basis(&self) -> &SplineBasis {
        &self.basis
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, t: f64) -> f64 {
        eval_with(&self.basis, &self.coeffs, t)
    }
}

/// A strictly increasing spline pinned to 0 at `t = 0` and 1 at `t = 1`.
#[derive(Debug, Clone)]
pub struct MonotoneSpline {
    basis: SplineBasis,
    coeffs: Vec<f64>,
}

impl MonotoneSpline {
    /// Validates endpoint and ordering constraints. Adjacent coefficients may
    /// be equal, which makes the spline non-strictly monotone.
    pub fn new(basis: SplineBasis, coeffs: Vec<f64>) -> Result<Self, SplineError> {
        if coeffs.len() != basis.basis_count() {
            return Err(SplineError::CoefficientLength {
                got: coeffs.len(),
                expected: basis.basis_count(),
            });
        }
        let first = coeffs[0];
        let last = *coeffs.last().expect("nonempty");
        if first.abs() > 1e-12 || (last - 1.0).abs() > 1e-12 {
            return Err(SplineError::BadEndpoints { first, last });
        }
        for (j, pair) in coeffs.windows(2).enumerate() {
            if !(pair[1] >= pair[0]) {
                return Err(SplineError::NotMonotone(j));
            }
        }
        Ok(Self { basis, coeffs })
    }

    /// Identity spline built from the Greville abscissae.
    pub fn identity(basis: SplineBasis) -> Self {
        let coeffs = basis.greville();
        Self { basis, coeffs }
    }

    pub fn basis(&self) -> &SplineBasis {
        &self.basis
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, t: f64) -> f64 {
        eval_with(&self.basis, &self.coeffs, t)
    }

    /// Exact derivative as a degree-(m-1) spline.
    pub fn derivative(&self) -> Result<Spline, SplineError> {
        let coeffs = self.basis.derivative_coefficients(&self.coeffs)?;
        Spline::new(self.basis.derivative_basis()?, coeffs)
    }
}

pub(crate) fn eval_with(basis: &SplineBasis, coeffs: &[f64], t: f64) -> f64 {
    let (start, values) = basis.eval_nonzero(t);
    let mut acc = 0.0;
    for r in 0..=basis.degree() {
        acc += coeffs[start + r] * values[r];
    }
    acc
}

fn check_unit(name: &'static str, value: f64) -> Result<(), SplineError> {
    if !value.is_finite() {
        return Err(SplineError::NonFinite { name });
    }
    if !(0.0..=1.0).contains(&value) {
        return Err(SplineError::OutOfDomain { name, value });
    }
    Ok(())
}

/// Solves `x s1(tau) + (1-x) s2(tau) = y` for `tau` in [0,1].
///
/// The convex combination is itself a monotone spline with coefficients
/// `x c1[j] + (1-x) c2[j]`. The containing knot interval is located by
/// binary search over the breakpoint values; quadratic splines are then
/// inverted analytically and cubic splines by bisection to tolerance `tol`.
pub fn solve_monotone(
    s1: &MonotoneSpline,
    s2: &MonotoneSpline,
    x: f64,
    y: f64,
    tol: f64,
) -> Result<f64, SplineError> {
    let combined = combine(s1, s2, x, y)?;
    Ok(invert_coeffs(s1.basis(), &combined, y, tol))
}

/// Bisection-only variant of [`solve_monotone`]; reference path for checking
/// the analytic quadratic inversion.
pub fn solve_monotone_bisect(
    s1: &MonotoneSpline,
    s2: &MonotoneSpline,
    x: f64,
    y: f64,
    tol: f64,
) -> Result<f64, SplineError> {
    let combined = combine(s1, s2, x, y)?;
    let (lo, hi) = bracket_interval(s1.basis(), &combined, y);
    Ok(bisect(s1.basis(), &combined, y, lo, hi, tol))
}

fn combine(
    s1: &MonotoneSpline,
    s2: &MonotoneSpline,
    x: f64,
    y: f64,
) -> Result<Vec<f64>, SplineError> {
    if s1.basis() != s2.basis() {
        return Err(SplineError::BasisMismatch(
            s1.basis().basis_count(),
            s2.basis().basis_count(),
        ));
    }
    check_unit("x", x)?;
    check_unit("y", y)?;
    Ok(s1
        .coefficients()
        .iter()
        .zip(s2.coefficients())
        .map(|(a, b)| x * a + (1.0 - x) * b)
        .collect())
}

/// Inverts a monotone coefficient vector on `basis` at `y`. Callers must
/// guarantee the coefficients are nondecreasing with endpoints 0 and 1.
pub(crate) fn invert_coeffs(basis: &SplineBasis, coeffs: &[f64], y: f64, tol: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 1.0;
    }
    let (lo, hi) = bracket_interval(basis, coeffs, y);
    if basis.degree() == 2 {
        invert_quadratic(basis, coeffs, y, lo, hi)
    } else {
        bisect(basis, coeffs, y, lo, hi, tol)
    }
}

/// Binary search over breakpoint values for the knot interval holding the
/// root: returns `(l/k, (l+1)/k)` with `C(l/k) <= y <= C((l+1)/k)`.
fn bracket_interval(basis: &SplineBasis, coeffs: &[f64], y: f64) -> (f64, f64) {
    let k = basis.intervals();
    let mut lo = 0usize;
    let mut hi = k;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        let value = eval_with(basis, coeffs, mid as f64 / k as f64);
        if value <= y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo as f64 / k as f64, hi as f64 / k as f64)
}

/// Analytic inversion of a quadratic piece. The restriction of the spline to
/// `[a, b]` is interpolated exactly through its values at the endpoints and
/// midpoint, then the increasing root is taken in the stable form
/// `s = 2(y - c0) / (c1 + sqrt(c1^2 - 4 c2 (c0 - y)))`.
fn invert_quadratic(basis: &SplineBasis, coeffs: &[f64], y: f64, a: f64, b: f64) -> f64 {
    let u0 = eval_with(basis, coeffs, a);
    let u1 = eval_with(basis, coeffs, b);
    let um = eval_with(basis, coeffs, 0.5 * (a + b));
    let c0 = u0;
    let c1 = 4.0 * um - 3.0 * u0 - u1;
    let c2 = 2.0 * (u0 + u1 - 2.0 * um);
    let disc = (c1 * c1 - 4.0 * c2 * (c0 - y)).max(0.0);
    let denom = c1 + disc.sqrt();
    let s = if denom > 0.0 {
        (2.0 * (y - c0) / denom).clamp(0.0, 1.0)
    } else {
        0.0
    };
    a + s * (b - a)
}

/// Bisection with a residual stopping rule: the returned point satisfies
/// `|C(tau) - y| <= tol` (up to floating-point resolution of the bracket).
fn bisect(basis: &SplineBasis, coeffs: &[f64], y: f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..128 {
        mid = 0.5 * (lo + hi);
        let value = eval_with(basis, coeffs, mid);
        if (value - y).abs() <= tol {
            return mid;
        }
        if value <= y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    mid
}
