//! Sparse Laurent polynomials in one variable and arrow polynomials in
//! `A, K1, K2, ...`, generic over the coefficient ring.
//!
//! Every value is kept in canonical form: zero coefficients are never stored,
//! so structural equality is polynomial equality.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::marker::PhantomData;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{FromPrimitive, Signed, ToPrimitive};
use thiserror::Error;

use crate::Q;

/// Coefficient ring for polynomials: exact rationals, integers or floats.
pub trait Coefficient:
    Signed + Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

impl<T> Coefficient for T where
    T: Signed + Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("cannot average an empty list")]
    EmptyList,
    #[error("cannot parse polynomial {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// Name of the single variable of a [`Laurent`] polynomial.
pub trait Variable: Clone + Copy + fmt::Debug + Default + PartialEq + Eq + Send + Sync + 'static {
    const NAME: &'static str;
}

/// The bracket variable `A`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarA;
impl Variable for VarA {
    const NAME: &'static str = "A";
}

/// The affine index variable `t`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarT;
impl Variable for VarT {
    const NAME: &'static str = "t";
}

/// Laurent polynomial `sum c_e X^e` over the variable `V`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Laurent<T, V = VarA> {
    terms: BTreeMap<i32, T>,
    _var: PhantomData<V>,
}

impl<T: Coefficient, V: Variable> Default for Laurent<T, V> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Coefficient, V: Variable> Laurent<T, V> {
    pub fn zero() -> Self {
        Laurent { terms: BTreeMap::new(), _var: PhantomData }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::monomial(0, c)
    }

    /// `c * X^exp`.
    pub fn monomial(exp: i32, c: T) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, c);
        p
    }

    /// The variable itself, `X`.
    pub fn var() -> Self {
        Self::monomial(1, T::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (i32, T)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exp: i32, c: T) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exp).or_insert_with(T::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: i32) -> T {
        self.terms.get(&exp).cloned().unwrap_or_else(T::zero)
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i32, &T)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, x)| (*e, x.clone() * c.clone())))
    }

    /// Multiply by the monomial `X^shift`.
    pub fn shift(&self, shift: i32) -> Self {
        Laurent {
            terms: self.terms.iter().map(|(e, c)| (e + shift, c.clone())).collect(),
            _var: PhantomData,
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Integer power of a single-term polynomial; negative exponents invert the monomial.
    /// Returns `None` when `self` is not a unit monomial `±X^e`.
    pub fn monomial_pow(&self, k: i32) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, c) = self.terms.iter().next().unwrap();
        if !(c.is_one() || (-c.clone()).is_one()) {
            return None;
        }
        let sign = if c.is_negative() && k.rem_euclid(2) == 1 { -T::one() } else { T::one() };
        Some(Self::monomial(e * k, sign))
    }

    /// Value at `X = 1`.
    pub fn eval_one(&self) -> T {
        self.terms.values().fold(T::zero(), |acc, c| acc + c.clone())
    }

    pub fn map_coeffs<U: Coefficient>(&self, f: impl Fn(&T) -> U) -> Laurent<U, V> {
        Laurent::from_terms(self.terms.iter().map(|(e, c)| (*e, f(c))))
    }

    /// Coefficient-wise mean of a nonempty list.
    pub fn mean(list: &[Self]) -> Result<Self, PolyError>
    where
        T: FromPrimitive,
    {
        if list.is_empty() {
            return Err(PolyError::EmptyList);
        }
        let sum = list.iter().fold(Self::zero(), |acc, p| &acc + p);
        let n = T::from_usize(list.len()).expect("list length representable");
        Ok(Self::from_terms(sum.terms.into_iter().map(|(e, c)| (e, c / n.clone()))))
    }

    /// Reinterpret the same coefficients under another variable name.
    pub fn rename<W: Variable>(self) -> Laurent<T, W> {
        Laurent { terms: self.terms, _var: PhantomData }
    }
}

impl<T: Coefficient> Laurent<T, VarA> {
    /// The loop value `d = -A^2 - A^-2`.
    pub fn loop_value() -> Self {
        Self::from_terms([(2, -T::one()), (-2, -T::one())])
    }

    /// Lift to an arrow polynomial with no `K` variables.
    pub fn to_arrow(&self) -> Arrow<T> {
        Arrow::from_terms(self.terms.iter().map(|(e, c)| (ArrowMonomial::a_power(*e), c.clone())))
    }
}

impl<'a, T: Coefficient, V: Variable> Add for &'a Laurent<T, V> {
    type Output = Laurent<T, V>;
    fn add(self, rhs: Self) -> Laurent<T, V> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl<'a, T: Coefficient, V: Variable> Sub for &'a Laurent<T, V> {
    type Output = Laurent<T, V>;
    fn sub(self, rhs: Self) -> Laurent<T, V> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl<'a, T: Coefficient, V: Variable> Mul for &'a Laurent<T, V> {
    type Output = Laurent<T, V>;
    fn mul(self, rhs: Self) -> Laurent<T, V> {
        let mut out = Laurent::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<'a, T: Coefficient, V: Variable> Neg for &'a Laurent<T, V> {
    type Output = Laurent<T, V>;
    fn neg(self) -> Laurent<T, V> {
        self.map_coeffs(|c| -c.clone())
    }
}

macro_rules! forward_owned_ops {
    ($ty:ident) => {
        impl<T: Coefficient, V: Variable> Add for $ty<T, V> {
            type Output = $ty<T, V>;
            fn add(self, rhs: Self) -> Self {
                &self + &rhs
            }
        }
        impl<T: Coefficient, V: Variable> Sub for $ty<T, V> {
            type Output = $ty<T, V>;
            fn sub(self, rhs: Self) -> Self {
                &self - &rhs
            }
        }
        impl<T: Coefficient, V: Variable> Mul for $ty<T, V> {
            type Output = $ty<T, V>;
            fn mul(self, rhs: Self) -> Self {
                &self * &rhs
            }
        }
        impl<T: Coefficient, V: Variable> Neg for $ty<T, V> {
            type Output = $ty<T, V>;
            fn neg(self) -> Self {
                -&self
            }
        }
    };
}
forward_owned_ops!(Laurent);

impl<T: Coefficient, V: Variable> std::iter::Sum for Laurent<T, V> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| &a + &b)
    }
}

/// Monomial `A^a * prod K_i^{e_i}`.
///
/// Ordered for printing: higher `A` exponent first, then `K` parts
/// ascending (the pure `A` power sorts before anything with a `K`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ArrowMonomial {
    pub a: i32,
    /// `(index, exponent)` pairs, index ascending, exponents positive.
    k: Vec<(u32, u32)>,
}

impl ArrowMonomial {
    pub fn a_power(a: i32) -> Self {
        ArrowMonomial { a, k: Vec::new() }
    }

    pub fn new(a: i32, k: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut m = ArrowMonomial::a_power(a);
        for (i, e) in k {
            m.mul_k(i, e);
        }
        m
    }

    pub fn k_parts(&self) -> &[(u32, u32)] {
        &self.k
    }

    pub fn has_k(&self) -> bool {
        !self.k.is_empty()
    }

    pub fn mul_k(&mut self, index: u32, exp: u32) {
        if exp == 0 {
            return;
        }
        match self.k.binary_search_by_key(&index, |p| p.0) {
            Ok(pos) => self.k[pos].1 += exp,
            Err(pos) => self.k.insert(pos, (index, exp)),
        }
    }

    fn mul(&self, other: &ArrowMonomial) -> ArrowMonomial {
        let mut out = self.clone();
        out.a += other.a;
        for &(i, e) in &other.k {
            out.mul_k(i, e);
        }
        out
    }

    fn fmt_with(&self, f: &mut fmt::Formatter<'_>, var: &str) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.a {
            0 => {}
            1 => parts.push(var.to_string()),
            a => parts.push(format!("{var}^{a}")),
        }
        for &(i, e) in &self.k {
            if e == 1 {
                parts.push(format!("K{i}"));
            } else {
                parts.push(format!("K{i}^{e}"));
            }
        }
        write!(f, "{}", parts.join("*"))
    }
}

impl Ord for ArrowMonomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.a.cmp(&self.a).then_with(|| self.k.cmp(&other.k))
    }
}

impl PartialOrd for ArrowMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in `A` (Laurent) and the commuting variables `K1, K2, ...`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Arrow<T> {
    terms: BTreeMap<ArrowMonomial, T>,
}

impl<T: Coefficient> Default for Arrow<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Coefficient> Arrow<T> {
    pub fn zero() -> Self {
        Arrow { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::from_terms([(ArrowMonomial::default(), T::one())])
    }

    pub fn from_terms<I: IntoIterator<Item = (ArrowMonomial, T)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// The single variable `K_index`.
    pub fn k_var(index: u32) -> Self {
        Self::from_terms([(ArrowMonomial::new(0, [(index, 1)]), T::one())])
    }

    pub fn add_term(&mut self, m: ArrowMonomial, c: T) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m.clone()).or_insert_with(T::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical print order.
    pub fn terms(&self) -> impl Iterator<Item = (&ArrowMonomial, &T)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &ArrowMonomial) -> T {
        self.terms.get(m).cloned().unwrap_or_else(T::zero)
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, x)| (m.clone(), x.clone() * c.clone())))
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// True when no `K` variable occurs.
    pub fn is_laurent(&self) -> bool {
        self.terms.keys().all(|m| !m.has_k())
    }

    /// Substitute `K_i -> rules[i]` (a Laurent polynomial in `A`); variables
    /// without a rule are kept.
    pub fn substitute(&self, rules: &BTreeMap<u32, Laurent<T>>) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut term = Arrow::from_terms([(ArrowMonomial::a_power(m.a), c.clone())]);
            for &(i, e) in &m.k {
                let factor = match rules.get(&i) {
                    Some(r) => r.pow(e).to_arrow(),
                    None => Arrow::from_terms([(ArrowMonomial::new(0, [(i, e)]), T::one())]),
                };
                term = &term * &factor;
            }
            out = &out + &term;
        }
        out
    }

    /// Specialise every `K_i` to 1.
    pub fn specialize_k_to_one(&self) -> Laurent<T> {
        Laurent::from_terms(self.terms.iter().map(|(m, c)| (m.a, c.clone())))
    }

    /// The Laurent polynomial, if no `K` variable occurs.
    pub fn to_laurent(&self) -> Option<Laurent<T>> {
        self.is_laurent().then(|| self.specialize_k_to_one())
    }

    pub fn map_coeffs<U: Coefficient>(&self, f: impl Fn(&T) -> U) -> Arrow<U> {
        Arrow::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    pub fn mean(list: &[Self]) -> Result<Self, PolyError>
    where
        T: FromPrimitive,
    {
        if list.is_empty() {
            return Err(PolyError::EmptyList);
        }
        let sum = list.iter().fold(Self::zero(), |acc, p| &acc + p);
        let n = T::from_usize(list.len()).expect("list length representable");
        Ok(Self::from_terms(sum.terms.into_iter().map(|(m, c)| (m, c / n.clone()))))
    }
}

impl<'a, T: Coefficient> Add for &'a Arrow<T> {
    type Output = Arrow<T>;
    fn add(self, rhs: Self) -> Arrow<T> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a, T: Coefficient> Sub for &'a Arrow<T> {
    type Output = Arrow<T>;
    fn sub(self, rhs: Self) -> Arrow<T> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a, T: Coefficient> Mul for &'a Arrow<T> {
    type Output = Arrow<T>;
    fn mul(self, rhs: Self) -> Arrow<T> {
        let mut out = Arrow::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<'a, T: Coefficient> Neg for &'a Arrow<T> {
    type Output = Arrow<T>;
    fn neg(self) -> Arrow<T> {
        self.map_coeffs(|c| -c.clone())
    }
}

impl<T: Coefficient> Add for Arrow<T> {
    type Output = Arrow<T>;
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}
impl<T: Coefficient> Sub for Arrow<T> {
    type Output = Arrow<T>;
    fn sub(self, rhs: Self) -> Self {
        &self - &rhs
    }
}
impl<T: Coefficient> Mul for Arrow<T> {
    type Output = Arrow<T>;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

// ---------------------------------------------------------------------------
// Canonical text form

fn write_terms<'a, T: Coefficient + 'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (&'a ArrowMonomial, &'a T)>,
    var: &str,
) -> fmt::Result {
    let mut first = true;
    for (m, c) in terms {
        let negative = c.is_negative();
        let abs = c.abs();
        if first {
            if negative {
                write!(f, "-")?;
            }
        } else {
            write!(f, "{}", if negative { " - " } else { " + " })?;
        }
        first = false;
        let is_const = m.a == 0 && !m.has_k();
        if is_const {
            write!(f, "{abs}")?;
        } else {
            if !abs.is_one() {
                write!(f, "{abs}*")?;
            }
            m.fmt_with(f, var)?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl<T: Coefficient, V: Variable> fmt::Display for Laurent<T, V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let monos: Vec<(ArrowMonomial, &T)> =
            self.terms.iter().rev().map(|(e, c)| (ArrowMonomial::a_power(*e), c)).collect();
        write_terms(f, monos.iter().map(|(m, c)| (m, *c)), V::NAME)
    }
}

impl<T: Coefficient, V: Variable> fmt::Debug for Laurent<T, V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Laurent({self})")
    }
}

impl<T: Coefficient> fmt::Display for Arrow<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms.iter(), "A")
    }
}

impl<T: Coefficient> fmt::Debug for Arrow<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Arrow({self})")
    }
}

/// Split a polynomial string into signed terms, respecting `^-` exponents.
fn split_terms(s: &str) -> Vec<(bool, String)> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let chars: Vec<char> = compact.chars().collect();
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut negative = false;
    for (i, &ch) in chars.iter().enumerate() {
        let is_sign = (ch == '+' || ch == '-') && (i == 0 || chars[i - 1] != '^');
        if is_sign {
            if !cur.is_empty() {
                out.push((negative, std::mem::take(&mut cur)));
            }
            negative = ch == '-';
        } else {
            cur.push(ch);
        }
    }
    if !cur.is_empty() {
        out.push((negative, cur));
    }
    out
}

fn parse_rational(tok: &str) -> Option<Q> {
    if let Some((p, q)) = tok.split_once('/') {
        let p: i128 = p.parse().ok()?;
        let q: i128 = q.parse().ok()?;
        (q != 0).then(|| Q::new(p, q))
    } else {
        tok.parse::<i128>().ok().map(Q::from_integer)
    }
}

fn parse_arrow_terms(input: &str, var: &str) -> Result<Vec<(ArrowMonomial, Q)>, PolyError> {
    let err = |reason: &str| PolyError::Parse { input: input.to_string(), reason: reason.to_string() };
    let mut out = Vec::new();
    for (negative, term) in split_terms(input) {
        let mut coeff = Q::from_integer(1);
        let mut mono = ArrowMonomial::default();
        for factor in term.split('*') {
            if factor.is_empty() {
                return Err(err("empty factor"));
            }
            if let Some(c) = parse_rational(factor) {
                coeff *= c;
                continue;
            }
            let (name, exp) = match factor.split_once('^') {
                Some((n, e)) => (n, e.parse::<i32>().map_err(|_| err("bad exponent"))?),
                None => (factor, 1),
            };
            if name == var {
                mono.a += exp;
            } else if let Some(idx) = name.strip_prefix('K') {
                let idx: u32 = idx.parse().map_err(|_| err("bad K index"))?;
                if exp < 0 {
                    return Err(err("negative K exponent"));
                }
                mono.mul_k(idx, exp as u32);
            } else {
                return Err(err(&format!("unknown factor {factor:?}")));
            }
        }
        if negative {
            coeff = -coeff;
        }
        out.push((mono, coeff));
    }
    if out.is_empty() && input.trim() != "0" {
        return Err(err("empty input"));
    }
    Ok(out)
}

impl FromStr for Arrow<Q> {
    type Err = PolyError;
    fn from_str(s: &str) -> Result<Self, PolyError> {
        if s.trim() == "0" {
            return Ok(Arrow::zero());
        }
        Ok(Arrow::from_terms(parse_arrow_terms(s, "A")?))
    }
}

impl<V: Variable> FromStr for Laurent<Q, V> {
    type Err = PolyError;
    fn from_str(s: &str) -> Result<Self, PolyError> {
        if s.trim() == "0" {
            return Ok(Laurent::zero());
        }
        let terms = parse_arrow_terms(s, V::NAME)?;
        if terms.iter().any(|(m, _)| m.has_k()) {
            return Err(PolyError::Parse { input: s.to_string(), reason: "K variable in a Laurent polynomial".into() });
        }
        Ok(Laurent::from_terms(terms.into_iter().map(|(m, c)| (m.a, c))))
    }
}

impl<V: Variable> FromStr for Laurent<i64, V> {
    type Err = PolyError;
    fn from_str(s: &str) -> Result<Self, PolyError> {
        let q: Laurent<Q, V> = s.parse()?;
        let mut out = Laurent::zero();
        for (e, c) in q.terms() {
            if !c.is_integer() {
                return Err(PolyError::Parse { input: s.to_string(), reason: "non-integer coefficient".into() });
            }
            out.add_term(e, c.to_integer().to_i64().expect("coefficient fits i64"));
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Real-valued estimates

/// Mean and standard error of one coefficient of a sampled polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct CoeffEstimate {
    pub mean: f64,
    pub stderr: f64,
}

/// Polynomial with real coefficients and a standard error per coefficient.
/// Scalars are stored as the constant term.
#[derive(Clone, Debug, PartialEq)]
pub struct RealPoly {
    pub variable: &'static str,
    pub terms: BTreeMap<ArrowMonomial, CoeffEstimate>,
}

impl RealPoly {
    pub fn new(variable: &'static str) -> Self {
        RealPoly { variable, terms: BTreeMap::new() }
    }

    /// Coefficient-wise mean and standard error (sample deviation over `sqrt(N)`).
    pub fn from_samples(variable: &'static str, samples: &[BTreeMap<ArrowMonomial, f64>]) -> Self {
        let n = samples.len() as f64;
        let keys: BTreeSet<&ArrowMonomial> = samples.iter().flat_map(|s| s.keys()).collect();
        let mut out = RealPoly::new(variable);
        for m in keys {
            let xs: Vec<f64> = samples.iter().map(|s| s.get(m).copied().unwrap_or(0.0)).collect();
            let mean = xs.iter().sum::<f64>() / n;
            let stderr = if xs.len() < 2 {
                0.0
            } else {
                let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
                (var / n).sqrt()
            };
            if mean != 0.0 || stderr != 0.0 {
                out.terms.insert(m.clone(), CoeffEstimate { mean, stderr });
            }
        }
        out
    }

    pub fn mean_coeff(&self, m: &ArrowMonomial) -> f64 {
        self.terms.get(m).map(|e| e.mean).unwrap_or(0.0)
    }

    pub fn stderr_coeff(&self, m: &ArrowMonomial) -> f64 {
        self.terms.get(m).map(|e| e.stderr).unwrap_or(0.0)
    }

    /// Largest coefficient-wise |self - other| over the union of monomials.
    pub fn max_abs_diff(&self, other: &BTreeMap<ArrowMonomial, f64>) -> f64 {
        let mut keys: Vec<&ArrowMonomial> = self.terms.keys().collect();
        keys.extend(other.keys());
        keys.into_iter()
            .map(|m| (self.mean_coeff(m) - other.get(m).copied().unwrap_or(0.0)).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_stderr(&self) -> f64 {
        self.terms.values().map(|e| e.stderr).fold(0.0, f64::max)
    }

    /// Canonical string of the means.
    pub fn mean_string(&self) -> String {
        let arrow: Arrow<f64> = Arrow::from_terms(self.terms.iter().map(|(m, e)| (m.clone(), e.mean)));
        let s = arrow.to_string();
        if self.variable == "A" {
            s
        } else {
            s.replace('A', self.variable)
        }
    }

    /// Monomial -> standard error, keyed by monomial text.
    pub fn stderr_map(&self) -> BTreeMap<String, f64> {
        self.terms
            .iter()
            .map(|(m, e)| {
                let key = if m.a == 0 && !m.has_k() {
                    "1".to_string()
                } else {
                    let s = MonoDisplay(m, self.variable).to_string();
                    s
                };
                (key, e.stderr)
            })
            .collect()
    }
}

struct MonoDisplay<'a>(&'a ArrowMonomial, &'a str);
impl fmt::Display for MonoDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt_with(f, self.1)
    }
}

/// Exact values that can be turned into real coefficient maps for averaging.
pub trait ToRealTerms {
    fn to_real_terms(&self) -> BTreeMap<ArrowMonomial, f64>;
}

fn q_to_f64(q: &Q) -> f64 {
    q.numer().to_f64().unwrap() / q.denom().to_f64().unwrap()
}

impl<V: Variable> ToRealTerms for Laurent<Q, V> {
    fn to_real_terms(&self) -> BTreeMap<ArrowMonomial, f64> {
        self.terms().map(|(e, c)| (ArrowMonomial::a_power(e), q_to_f64(c))).collect()
    }
}

impl<V: Variable> ToRealTerms for Laurent<i64, V> {
    fn to_real_terms(&self) -> BTreeMap<ArrowMonomial, f64> {
        self.terms().map(|(e, c)| (ArrowMonomial::a_power(e), *c as f64)).collect()
    }
}

impl ToRealTerms for Arrow<Q> {
    fn to_real_terms(&self) -> BTreeMap<ArrowMonomial, f64> {
        self.terms().map(|(m, c)| (m.clone(), q_to_f64(c))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type L = Laurent<Q>;

    fn q(n: i128) -> Q {
        Q::from_integer(n)
    }

    #[test]
    fn d_squared() {
        let d = L::loop_value();
        assert_eq!(d.pow(2).to_string(), "A^4 + 2 + A^-4");
    }

    #[test]
    fn substitute_k_to_one() {
        let p: Arrow<Q> = "A + A^-1*K1".parse().unwrap();
        let rules = BTreeMap::from([(1, L::one())]);
        assert_eq!(p.substitute(&rules).to_string(), "A + A^-1");
        assert_eq!(p.specialize_k_to_one().to_string(), "A + A^-1");
    }

    #[test]
    fn inverse_monomial_power() {
        let m = L::monomial(3, q(-1));
        assert_eq!(m.monomial_pow(-2).unwrap(), L::monomial(-6, q(1)));
        assert_eq!(m.monomial_pow(-1).unwrap(), L::monomial(-3, q(-1)));
        assert!(L::loop_value().monomial_pow(2).is_none());
    }

    #[test]
    fn means() {
        assert_eq!(L::mean(&[L::one(), L::one(), L::one()]).unwrap(), L::one());
        let m = L::mean(&[L::zero(), L::zero(), L::one()]).unwrap();
        assert_eq!(m.to_string(), "1/3");
        assert_eq!(L::mean(&[]), Err(PolyError::EmptyList));

        let a: L = "A^2 - 1".parse().unwrap();
        let b: L = "A^-2 + 3".parse().unwrap();
        let c: L = "2*A^2 + A^-4".parse().unwrap();
        let got = L::mean(&[a.clone(), b.clone(), c.clone()]).unwrap();
        // direct summation
        let mut expect = L::zero();
        for e in -4..=2 {
            let s = a.coeff(e) + b.coeff(e) + c.coeff(e);
            expect.add_term(e, s / q(3));
        }
        assert_eq!(got, expect);
        assert_eq!(got.to_string(), "A^2 + 2/3 + 1/3*A^-2 + 1/3*A^-4");
    }

    #[test]
    fn canonical_printing() {
        let p: Arrow<Q> = "A^4 + 1 + A^-4 - A^4*K1^2 - 2*K1^2 - A^-4*K1^2 + 2*K2".parse().unwrap();
        assert_eq!(p.to_string(), "A^4 - A^4*K1^2 + 1 - 2*K1^2 + 2*K2 + A^-4 - A^-4*K1^2");
        let t: Laurent<i64, VarT> = "t^-2 + t^2 - 2".parse().unwrap();
        assert_eq!(t.to_string(), "t^2 - 2 + t^-2");
        assert_eq!(t.eval_one(), 0);
        assert_eq!(L::zero().to_string(), "0");
        assert_eq!("-A^3".parse::<L>().unwrap().to_string(), "-A^3");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("A + B".parse::<L>().is_err());
        assert!("A*K1".parse::<L>().is_err());
        assert!("".parse::<Arrow<Q>>().is_err());
    }

    #[test]
    fn generic_over_floats() {
        let p: Laurent<f64> = Laurent::from_terms([(1, 0.5), (-1, 0.25)]);
        let sq = &p * &p;
        assert_eq!(sq.coeff(0), 0.25);
        assert_eq!(Laurent::<f64>::mean(&[p.clone(), p.clone()]).unwrap(), p);
    }

    #[test]
    fn arrow_embeds_laurent() {
        let l: L = "A^3 - 2 + A^-5".parse().unwrap();
        assert_eq!(l.to_arrow().to_laurent().unwrap(), l);
        assert!(Arrow::<Q>::k_var(2).to_laurent().is_none());
    }

    fn arb_laurent() -> impl Strategy<Value = L> {
        prop::collection::vec((-6i32..6, -5i128..5), 0..12)
            .prop_map(|v| L::from_terms(v.into_iter().map(|(e, c)| (e, q(c)))))
    }

    fn arb_arrow() -> impl Strategy<Value = Arrow<Q>> {
        prop::collection::vec((-4i32..4, 0u32..3, 0u32..3, -4i128..4), 0..12).prop_map(|v| {
            Arrow::from_terms(
                v.into_iter().map(|(a, k1, k2, c)| (ArrowMonomial::new(a, [(1, k1), (2, k2)]), q(c))),
            )
        })
    }

    proptest! {
        #[test]
        fn laurent_ring_laws(a in arb_laurent(), b in arb_laurent(), c in arb_laurent()) {
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            prop_assert_eq!(a.to_string().parse::<L>().unwrap(), a);
        }

        #[test]
        fn arrow_ring_laws(a in arb_arrow(), b in arb_arrow(), c in arb_arrow()) {
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(a.to_string().parse::<Arrow<Q>>().unwrap(), a.clone());
            prop_assert_eq!((&a * &b).specialize_k_to_one(), &a.specialize_k_to_one() * &b.specialize_k_to_one());
        }
    }
}
