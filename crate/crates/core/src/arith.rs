//! Exact arbitrary-precision arithmetic: rational numbers, binomials and
//! multinomials backed by a process-wide factorial cache, dense polynomials,
//! and exact Lagrange interpolation.

use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use num::{BigInt, BigRational, One, Signed, Zero};
use once_cell::sync::Lazy;

use crate::{Error, Result};

/// An exact rational p/q in lowest terms. Arithmetic never rounds.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactNumber(BigRational);

impl ExactNumber {
    pub fn zero() -> Self {
        ExactNumber(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactNumber(BigRational::one())
    }

    pub fn from_int(v: i64) -> Self {
        ExactNumber(BigRational::from_integer(BigInt::from(v)))
    }

    /// p/q as a reduced rational. `q` must be nonzero.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        ExactNumber(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        ExactNumber(BigRational::from_integer(v))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// The numerator, valid only when `is_integer`.
    pub fn to_bigint(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.numer().clone())
    }

    pub fn pow(&self, e: u32) -> Self {
        if e == 0 {
            // 0^0 = 1 by the empty-product convention used throughout.
            return ExactNumber::one();
        }
        ExactNumber(num::pow::pow(self.0.clone(), e as usize))
    }

    pub fn recip(&self) -> Self {
        ExactNumber(self.0.recip())
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }
}

impl fmt::Display for ExactNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for ExactNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for ExactNumber {
    type Err = Error;

    /// Accepts decimal integers (`-3`) and rationals (`p/q`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_int = |t: &str| -> Result<BigInt> {
            BigInt::from_str(t.trim())
                .map_err(|_| Error::Invalid(format!("not an integer: `{t}`")))
        };
        match s.split_once('/') {
            None => Ok(ExactNumber(BigRational::from_integer(parse_int(s)?))),
            Some((p, q)) => {
                let q = parse_int(q)?;
                if q.is_zero() {
                    return Err(Error::Invalid(format!("zero denominator in `{s}`")));
                }
                Ok(ExactNumber(BigRational::new(parse_int(p)?, q)))
            }
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl std::ops::$trait for ExactNumber {
            type Output = ExactNumber;
            fn $method(self, rhs: ExactNumber) -> ExactNumber {
                ExactNumber(std::ops::$trait::$method(self.0, rhs.0))
            }
        }
        impl std::ops::$trait<&ExactNumber> for ExactNumber {
            type Output = ExactNumber;
            fn $method(self, rhs: &ExactNumber) -> ExactNumber {
                ExactNumber(std::ops::$trait::$method(self.0, &rhs.0))
            }
        }
        impl std::ops::$trait<&ExactNumber> for &ExactNumber {
            type Output = ExactNumber;
            fn $method(self, rhs: &ExactNumber) -> ExactNumber {
                ExactNumber(std::ops::$trait::$method(&self.0, &rhs.0))
            }
        }
        impl std::ops::$trait<ExactNumber> for &ExactNumber {
            type Output = ExactNumber;
            fn $method(self, rhs: ExactNumber) -> ExactNumber {
                ExactNumber(std::ops::$trait::$method(&self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl std::ops::Neg for ExactNumber {
    type Output = ExactNumber;
    fn neg(self) -> ExactNumber {
        ExactNumber(-self.0)
    }
}

impl std::ops::Neg for &ExactNumber {
    type Output = ExactNumber;
    fn neg(self) -> ExactNumber {
        ExactNumber(-&self.0)
    }
}

impl std::ops::AddAssign<ExactNumber> for ExactNumber {
    fn add_assign(&mut self, rhs: ExactNumber) {
        self.0 += rhs.0;
    }
}

impl std::ops::MulAssign<&ExactNumber> for ExactNumber {
    fn mul_assign(&mut self, rhs: &ExactNumber) {
        self.0 *= &rhs.0;
    }
}

impl std::iter::Sum for ExactNumber {
    fn sum<I: Iterator<Item = ExactNumber>>(iter: I) -> Self {
        iter.fold(ExactNumber::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}

static FACTORIALS: Lazy<Mutex<Vec<BigInt>>> = Lazy::new(|| Mutex::new(vec![BigInt::one()]));

/// n!, memoized process-wide up to the largest n ever requested.
pub fn factorial(n: usize) -> BigInt {
    let mut cache = FACTORIALS.lock().unwrap();
    while cache.len() <= n {
        let k = cache.len();
        let next = &cache[k - 1] * BigInt::from(k);
        cache.push(next);
    }
    cache[n].clone()
}

/// C(n, m) as an integer; 0 when m > n.
pub fn binomial_int(n: usize, m: usize) -> BigInt {
    if m > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(m) * factorial(n - m))
}

/// C(n, m) wrapped as an `ExactNumber`; 0 when m > n.
pub fn binomial(n: usize, m: usize) -> ExactNumber {
    ExactNumber::from_bigint(binomial_int(n, m))
}

/// |k|! / prod k_i! as an integer.
pub fn multinomial_int(k: &[u32]) -> BigInt {
    let total: u32 = k.iter().sum();
    let mut denom = BigInt::one();
    for &ki in k {
        denom *= factorial(ki as usize);
    }
    factorial(total as usize) / denom
}

/// |k|! / prod k_i!.
pub fn multinomial(k: &[u32]) -> ExactNumber {
    ExactNumber::from_bigint(multinomial_int(k))
}

/// Calls `f` on every vector of `parts` non-negative integers summing to
/// `total`, in lexicographic order.
pub fn for_each_composition<F: FnMut(&[u32])>(total: u32, parts: usize, f: &mut F) {
    fn rec<F: FnMut(&[u32])>(buf: &mut Vec<u32>, left: u32, remaining: usize, f: &mut F) {
        if remaining == 1 {
            buf.push(left);
            f(buf);
            buf.pop();
            return;
        }
        for v in 0..=left {
            buf.push(v);
            rec(buf, left - v, remaining - 1, f);
            buf.pop();
        }
    }
    if parts == 0 {
        if total == 0 {
            f(&[]);
        }
        return;
    }
    rec(&mut Vec::with_capacity(parts), total, parts, f);
}

/// Dense polynomial with exact coefficients; index = degree, trailing zero
/// coefficients trimmed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExactPolynomial {
    coeffs: Vec<ExactNumber>,
}

impl ExactPolynomial {
    pub fn new(mut coeffs: Vec<ExactNumber>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        ExactPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        ExactPolynomial { coeffs: vec![] }
    }

    pub fn constant(c: ExactNumber) -> Self {
        ExactPolynomial::new(vec![c])
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[ExactNumber] {
        &self.coeffs
    }

    /// Coefficient of X^i (zero beyond the stored degree).
    pub fn coeff(&self, i: usize) -> ExactNumber {
        self.coeffs.get(i).cloned().unwrap_or_else(ExactNumber::zero)
    }

    pub fn eval(&self, x: &ExactNumber) -> ExactNumber {
        let mut acc = ExactNumber::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// self * (X - c), in place.
    fn mul_linear(&mut self, c: &ExactNumber) {
        let n = self.coeffs.len();
        self.coeffs.push(ExactNumber::zero());
        for i in (0..=n).rev() {
            let lower = if i == 0 {
                ExactNumber::zero()
            } else {
                self.coeffs[i - 1].clone()
            };
            let shifted = if i < n {
                &self.coeffs[i] * c
            } else {
                ExactNumber::zero()
            };
            self.coeffs[i] = lower - shifted;
        }
    }

    /// self / (X - c) by synthetic division; the remainder is discarded
    /// (callers only divide at known roots).
    fn div_linear(&self, c: &ExactNumber) -> ExactPolynomial {
        let n = self.coeffs.len();
        if n == 0 {
            return ExactPolynomial::zero();
        }
        let mut out = vec![ExactNumber::zero(); n - 1];
        let mut carry = ExactNumber::zero();
        for i in (0..n).rev() {
            let v = &self.coeffs[i] + &carry;
            if i == 0 {
                break;
            }
            carry = &v * c;
            out[i - 1] = v;
        }
        ExactPolynomial::new(out)
    }
}

/// The unique polynomial of degree < |points| through all points, exactly.
///
/// Abscissas must be pairwise distinct. The values are assumed to come from a
/// polynomial of that degree; no consistency check is possible or attempted.
pub fn interpolate(points: &[(ExactNumber, ExactNumber)]) -> Result<ExactPolynomial> {
    for (a, (xi, _)) in points.iter().enumerate() {
        for (xj, _) in &points[a + 1..] {
            if xi == xj {
                return Err(Error::Invalid(format!("duplicate abscissa {xi}")));
            }
        }
    }
    if points.is_empty() {
        return Ok(ExactPolynomial::zero());
    }
    // Lagrange via the master polynomial M = prod (X - x_r): each basis
    // polynomial is M / (X - x_s), scaled by y_s / M'(x_s).
    let mut master = ExactPolynomial::constant(ExactNumber::one());
    for (x, _) in points {
        master.mul_linear(x);
    }
    let mut result = vec![ExactNumber::zero(); points.len()];
    for (xs, ys) in points {
        if ys.is_zero() {
            continue;
        }
        let basis = master.div_linear(xs);
        let denom = basis.eval(xs);
        let scale = ys / &denom;
        for (i, b) in basis.coeffs.iter().enumerate() {
            result[i] += b * &scale;
        }
    }
    Ok(ExactPolynomial::new(result))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: i64) -> ExactNumber {
        ExactNumber::from_int(v)
    }

    #[test]
    fn binomial_basics() {
        assert_eq!(binomial(5, 2), n(10));
        assert_eq!(binomial(3, 0), n(1));
        assert_eq!(binomial(2, 5), n(0));
    }

    #[test]
    fn multinomial_basics() {
        assert_eq!(multinomial(&[1, 1, 1]), n(6));
        assert_eq!(multinomial(&[3]), n(1));
        assert_eq!(multinomial(&[2, 2]), n(6));
    }

    #[test]
    fn composition_sum_matches_power() {
        // sum over |k|=n of multinomial(k) = u^n.
        for u in 1..=3usize {
            for total in 0..=8u32 {
                let mut sum = ExactNumber::zero();
                for_each_composition(total, u, &mut |k| {
                    sum += multinomial(k);
                });
                assert_eq!(sum, n(u as i64).pow(total));
            }
        }
    }

    #[test]
    fn interpolate_quadratic() {
        let pts = vec![(n(0), n(1)), (n(1), n(2)), (n(2), n(5))];
        let p = interpolate(&pts).unwrap();
        assert_eq!(p.coeffs(), &[n(1), n(0), n(1)]); // x^2 + 1
    }

    #[test]
    fn interpolate_constant() {
        let p = interpolate(&[(n(0), n(42))]).unwrap();
        assert_eq!(p.coeffs(), &[n(42)]);
    }

    #[test]
    fn interpolate_round_trips_cubics() {
        // Sample fixed integer cubics at 4 points and recover them.
        for poly in [
            ExactPolynomial::new(vec![n(3), n(-2), n(0), n(7)]),
            ExactPolynomial::new(vec![n(-1), n(5), n(11), n(-4)]),
            ExactPolynomial::new(vec![n(0), n(0), n(1), n(1)]),
        ] {
            let pts: Vec<_> = (0..4).map(|i| (n(i), poly.eval(&n(i)))).collect();
            assert_eq!(interpolate(&pts).unwrap(), poly);
        }
    }

    #[test]
    fn interpolate_degree_six_round_trip() {
        let poly = ExactPolynomial::new(vec![n(2), n(-3), n(5), n(0), n(-1), n(4), n(9)]);
        let pts: Vec<_> = (0..7).map(|i| (n(i), poly.eval(&n(i)))).collect();
        assert_eq!(interpolate(&pts).unwrap(), poly);
    }

    #[test]
    fn interpolate_rejects_duplicate_abscissa() {
        let err = interpolate(&[(n(1), n(1)), (n(1), n(2))]).unwrap_err();
        assert!(err.to_string().contains("duplicate abscissa"));
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(n(3).to_string(), "3");
        assert_eq!(n(-7).to_string(), "-7");
        assert_eq!(ExactNumber::from_ratio(1, 2).to_string(), "1/2");
        assert_eq!(ExactNumber::from_ratio(4, -2).to_string(), "-2");
        for s in ["3", "-7", "1/2", "-22/7"] {
            assert_eq!(s.parse::<ExactNumber>().unwrap().to_string(), s);
        }
        assert!("1/0".parse::<ExactNumber>().is_err());
        assert!("abc".parse::<ExactNumber>().is_err());
    }

    #[test]
    fn zero_pow_zero_is_one() {
        assert_eq!(ExactNumber::zero().pow(0), n(1));
        assert_eq!(ExactNumber::zero().pow(3), n(0));
    }

    #[test]
    fn trailing_zeros_trimmed() {
        let p = ExactPolynomial::new(vec![n(1), n(2), n(0), n(0)]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(ExactPolynomial::new(vec![n(0)]).degree(), None);
    }
}
