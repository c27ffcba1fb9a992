//! Arbitrary-precision rational arithmetic and univariate ε-polynomials.
//!
//! Every quantity in the solver pipeline is an exact [`Rational`]; floating
//! point appears nowhere in this crate. Perturbation magnitudes are described
//! symbolically by sparse polynomials in ε ([`EpsPoly`]) and instantiated at
//! concrete rational ε values.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Exact rational number: arbitrary-precision numerator and denominator,
/// always in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

/// Shorthand for a rational from machine integers.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Shorthand for an integer-valued rational.
pub fn rat_i(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Error parsing the textual rational syntax `p/q` (or integer shorthand `p`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseRationalError {
    Empty,
    BadInteger(String),
    ZeroDenominator,
}

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseRationalError::Empty => write!(f, "empty rational literal"),
            ParseRationalError::BadInteger(s) => write!(f, "bad integer literal: {s:?}"),
            ParseRationalError::ZeroDenominator => write!(f, "zero denominator"),
        }
    }
}

impl core::error::Error for ParseRationalError {}

/// Parses `p/q` or `p` with optional leading sign. Round-trips exactly with
/// the `Display` form of [`Rational`].
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    fn parse_int(s: &str) -> Result<BigInt, ParseRationalError> {
        if s.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        BigInt::from_str(s).map_err(|_| ParseRationalError::BadInteger(String::from(s)))
    }
    match s.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(s)?)),
        Some((num, den)) => {
            let n = parse_int(num)?;
            let d = parse_int(den)?;
            if d.is_zero() {
                return Err(ParseRationalError::ZeroDenominator);
            }
            Ok(Rational::new(n, d))
        }
    }
}

/// Univariate polynomial in the perturbation magnitude ε, stored sparsely as
/// degree → coefficient with no zero coefficients retained.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EpsPoly {
    terms: BTreeMap<u32, Rational>,
}

/// Error from polynomial operations that require a nonzero input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroPolynomial;

impl fmt::Display for ZeroPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "zero polynomial input")
    }
}

impl core::error::Error for ZeroPolynomial {}

impl EpsPoly {
    pub fn zero() -> Self {
        EpsPoly::default()
    }

    pub fn constant(c: Rational) -> Self {
        EpsPoly::monomial(c, 0)
    }

    pub fn one() -> Self {
        EpsPoly::constant(Rational::one())
    }

    /// `coeff * ε^degree`.
    pub fn monomial(coeff: Rational, degree: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(degree, coeff);
        }
        EpsPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree of the lowest-order nonzero term; `None` for the zero polynomial.
    pub fn lowest_degree(&self) -> Option<u32> {
        self.terms.keys().next().copied()
    }

    /// Coefficient of the lowest-order nonzero term.
    pub fn lowest_coeff(&self) -> Option<&Rational> {
        self.terms.values().next()
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&0).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeff(&self, degree: u32) -> Rational {
        self.terms
            .get(&degree)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.terms.iter().map(|(d, c)| (*d, c))
    }

    fn insert(&mut self, degree: u32, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(degree) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Exact evaluation at a concrete ε, sparse Horner over descending degrees.
    pub fn eval(&self, eps: &Rational) -> Rational {
        let mut acc = Rational::zero();
        let mut prev_degree: Option<u32> = None;
        for (&degree, coeff) in self.terms.iter().rev() {
            if let Some(prev) = prev_degree {
                acc *= pow(eps, prev - degree);
            }
            acc += coeff;
            prev_degree = Some(degree);
        }
        if let Some(lowest) = prev_degree {
            acc *= pow(eps, lowest);
        }
        acc
    }
}

fn pow(base: &Rational, exp: u32) -> Rational {
    let mut acc = Rational::one();
    let mut sq = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &sq;
        }
        e >>= 1;
        if e > 0 {
            sq = &sq * &sq;
        }
    }
    acc
}

impl core::ops::Add for &EpsPoly {
    type Output = EpsPoly;
    fn add(self, rhs: &EpsPoly) -> EpsPoly {
        let mut out = self.clone();
        for (d, c) in rhs.terms() {
            out.insert(d, c.clone());
        }
        out
    }
}

impl core::ops::Mul for &EpsPoly {
    type Output = EpsPoly;
    fn mul(self, rhs: &EpsPoly) -> EpsPoly {
        let mut out = EpsPoly::zero();
        for (da, ca) in self.terms() {
            for (db, cb) in rhs.terms() {
                out.insert(da + db, ca * cb);
            }
        }
        out
    }
}

impl core::ops::Neg for &EpsPoly {
    type Output = EpsPoly;
    fn neg(self) -> EpsPoly {
        let mut out = EpsPoly::zero();
        for (d, c) in self.terms() {
            out.insert(d, -c.clone());
        }
        out
    }
}

impl fmt::Display for EpsPoly {
    /// Renders e.g. `1/3*e^2 + e^4`, matching the scheme-file syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (degree, coeff) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (degree, coeff.is_one()) {
                (0, _) => write!(f, "{coeff}")?,
                (1, true) => write!(f, "e")?,
                (1, false) => write!(f, "{coeff}*e")?,
                (d, true) => write!(f, "e^{d}")?,
                (d, false) => write!(f, "{coeff}*e^{d}")?,
            }
        }
        Ok(())
    }
}

/// Whether `num(ε)/den(ε) → 0` as `ε → 0⁺`, for nonzero polynomials with
/// positive lowest-order coefficients: true iff the numerator's lowest degree
/// strictly exceeds the denominator's.
pub fn ratio_limit_at_zero_is_zero(num: &EpsPoly, den: &EpsPoly) -> Result<bool, ZeroPolynomial> {
    match (num.lowest_degree(), den.lowest_degree()) {
        (Some(n), Some(d)) => Ok(n > d),
        _ => Err(ZeroPolynomial),
    }
}

/// Positivity probe used by scheme validation: exact sign of `p(ε)` at each
/// given ε.
pub fn positive_at_probes(p: &EpsPoly, probes: &[Rational]) -> bool {
    probes.iter().all(|eps| p.eval(eps).is_positive())
}

/// Renders a rational vector as space-separated exact literals (debug dumps).
pub fn format_rational_row(row: &[Rational]) -> String {
    let parts: Vec<String> = row.iter().map(|r| alloc::format!("{r}")).collect();
    parts.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_round_trip() {
        for s in ["3/4", "-1000000", "0", "7", "-5/9"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(alloc::format!("{r}"), s);
        }
        // Non-canonical input parses to the canonical form.
        assert_eq!(parse_rational("6/-8").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("1/0"), Err(ParseRationalError::ZeroDenominator));
        assert!(parse_rational("").is_err());
        assert!(parse_rational("a/2").is_err());
    }

    #[test]
    fn canonical_invariants() {
        let r = rat(6, -8);
        assert!(r.denom().is_positive());
        assert_eq!(r, rat(-3, 4));
    }

    #[test]
    fn eval_examples() {
        // ε² at ε = 1/10
        let sq = EpsPoly::monomial(rat_i(1), 2);
        assert_eq!(sq.eval(&rat(1, 10)), rat(1, 100));
        // ε/3 at ε = 1/2
        let third = EpsPoly::monomial(rat(1, 3), 1);
        assert_eq!(third.eval(&rat(1, 2)), rat(1, 6));
        // 2ε + 3ε³ at ε = 1/5: 2/5 + 3/125 = 53/125
        let p = &EpsPoly::monomial(rat_i(2), 1) + &EpsPoly::monomial(rat_i(3), 3);
        assert_eq!(p.eval(&rat(1, 5)), rat(53, 125));
    }

    #[test]
    fn ratio_limits() {
        let e = EpsPoly::monomial(rat_i(1), 1);
        let e2 = EpsPoly::monomial(rat_i(1), 2);
        let e_third = EpsPoly::monomial(rat(1, 3), 1);
        assert_eq!(ratio_limit_at_zero_is_zero(&e2, &e), Ok(true));
        assert_eq!(ratio_limit_at_zero_is_zero(&e_third, &e), Ok(false));
        assert_eq!(ratio_limit_at_zero_is_zero(&e, &e), Ok(false));
        assert_eq!(
            ratio_limit_at_zero_is_zero(&EpsPoly::zero(), &e),
            Err(ZeroPolynomial)
        );
    }

    #[test]
    fn display_matches_scheme_syntax() {
        let p = &EpsPoly::monomial(rat(1, 3), 2) + &EpsPoly::monomial(rat_i(1), 4);
        assert_eq!(alloc::format!("{p}"), "1/3*e^2 + e^4");
        assert_eq!(alloc::format!("{}", EpsPoly::one()), "1");
        assert_eq!(alloc::format!("{}", EpsPoly::monomial(rat_i(1), 1)), "e");
    }

    fn arb_poly() -> impl Strategy<Value = EpsPoly> {
        proptest::collection::vec((0u32..6, -9i64..10, 1i64..9), 0..5).prop_map(|terms| {
            let mut p = EpsPoly::zero();
            for (d, n, den) in terms {
                p.insert(d, rat(n, den));
            }
            p
        })
    }

    proptest! {
        // Evaluation at a fixed ε is a ring homomorphism.
        #[test]
        fn eval_is_ring_homomorphism(a in arb_poly(), b in arb_poly(), n in -7i64..8, d in 1i64..9) {
            let eps = rat(n, d);
            prop_assert_eq!((&a + &b).eval(&eps), a.eval(&eps) + b.eval(&eps));
            prop_assert_eq!((&a * &b).eval(&eps), a.eval(&eps) * b.eval(&eps));
        }

        #[test]
        fn no_zero_coefficients_stored(a in arb_poly(), b in arb_poly()) {
            let s = &a + &b;
            prop_assert!(s.terms().all(|(_, c)| !c.is_zero()));
            let m = &a * &b;
            prop_assert!(m.terms().all(|(_, c)| !c.is_zero()));
        }
    }
}
