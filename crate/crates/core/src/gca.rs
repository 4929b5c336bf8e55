//! Free graded-commutative algebras over Q.
//!
//! A [`GeneratorSet`] fixes the canonical generator order; a [`Monomial`] is an exponent
//! vector in that order, and the written form of a monomial is always its factors in
//! generator order. Products are normalized with the Koszul sign: only transpositions of two
//! odd generators contribute a factor of -1.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactq::{rat, Rational, SparseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    Base,
    /// `sv` for the base generator at index `partner`.
    Suspended {
        partner: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
    pub kind: GeneratorKind,
}

impl Generator {
    pub fn base(name: impl Into<String>, degree: u32) -> Self {
        Generator {
            name: name.into(),
            degree,
            kind: GeneratorKind::Base,
        }
    }

    pub fn suspended(name: impl Into<String>, degree: u32, partner: usize) -> Self {
        Generator {
            name: name.into(),
            degree,
            kind: GeneratorKind::Suspended { partner },
        }
    }

    pub fn is_odd(&self) -> bool {
        self.degree % 2 == 1
    }

    pub fn is_suspended(&self) -> bool {
        matches!(self.kind, GeneratorKind::Suspended { .. })
    }
}

/// Exponent vector over a [`GeneratorSet`]. Ordered lexicographically, which within one
/// degree is the canonical monomial order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(num_generators: usize) -> Self {
        Monomial(vec![0; num_generators])
    }

    pub fn generator(num_generators: usize, index: usize) -> Self {
        let mut e = vec![0; num_generators];
        e[index] = 1;
        Monomial(e)
    }

    pub fn from_exponents(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, index: usize) -> u32 {
        self.0[index]
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Total number of factors.
    pub fn length(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Splits at generator index `at`: factors below `at` and factors from `at` on, each
    /// padded back to full length. No sign arises since the factors are already in order.
    pub fn split_at(&self, at: usize) -> (Monomial, Monomial) {
        let mut low = self.0.clone();
        let mut high = self.0.clone();
        low[at..].iter_mut().for_each(|e| *e = 0);
        high[..at].iter_mut().for_each(|e| *e = 0);
        (Monomial(low), Monomial(high))
    }

    /// Restriction to the generator range `range`, re-indexed from zero.
    pub fn restrict(&self, range: std::ops::Range<usize>) -> Monomial {
        Monomial(self.0[range].to_vec())
    }

    /// Places `self` at generator offset `offset` in a set of `total` generators.
    pub fn embed(&self, offset: usize, total: usize) -> Monomial {
        let mut e = vec![0; total];
        e[offset..offset + self.0.len()].copy_from_slice(&self.0);
        Monomial(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementDegree {
    Zero,
    Homogeneous(u32),
    Inhomogeneous,
}

/// Linear combination of monomials with nonzero rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Element {
    terms: BTreeMap<Monomial, Rational>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn one(num_generators: usize) -> Self {
        Element::from_monomial(Monomial::one(num_generators), Rational::one())
    }

    pub fn generator(num_generators: usize, index: usize) -> Self {
        Element::from_monomial(Monomial::generator(num_generators, index), Rational::one())
    }

    pub fn from_monomial(m: Monomial, coefficient: Rational) -> Self {
        let mut e = Element::zero();
        e.add_term(m, &coefficient);
        e
    }

    pub fn add_term(&mut self, m: Monomial, coefficient: &Rational) {
        if coefficient.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(slot) => {
                slot.insert(coefficient.clone());
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coefficient;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Element, scale: &Rational) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), &(c * scale));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scaled(&self, s: &Rational) -> Element {
        let mut out = Element::zero();
        out.add_scaled(self, s);
        out
    }

    pub fn neg(&self) -> Element {
        self.scaled(&rat(-1))
    }

    pub fn sum(&self, other: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled(other, &Rational::one());
        out
    }

    pub fn map_monomials(&self, f: impl Fn(&Monomial) -> Monomial) -> Element {
        let mut out = Element::zero();
        for (m, c) in &self.terms {
            out.add_term(f(m), c);
        }
        out
    }
}

/// Generators in canonical order together with the operations that need their degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSet {
    generators: Vec<Generator>,
}

impl GeneratorSet {
    pub fn new(generators: Vec<Generator>) -> Self {
        for g in &generators {
            assert!(g.degree >= 1, "generator {} has degree 0", g.name);
            if let GeneratorKind::Suspended { partner } = g.kind {
                let p = &generators[partner];
                assert_eq!(p.degree, g.degree + 1, "suspension degree of {}", g.name);
            }
        }
        GeneratorSet { generators }
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn get(&self, index: usize) -> &Generator {
        &self.generators[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn degree(&self, m: &Monomial) -> u32 {
        m.0.iter()
            .zip(&self.generators)
            .map(|(e, g)| e * g.degree)
            .sum()
    }

    pub fn element_degree(&self, e: &Element) -> ElementDegree {
        let mut degrees = e.terms().map(|(m, _)| self.degree(m));
        match degrees.next() {
            None => ElementDegree::Zero,
            Some(d) if degrees.all(|x| x == d) => ElementDegree::Homogeneous(d),
            Some(_) => ElementDegree::Inhomogeneous,
        }
    }

    /// Number of suspended factors.
    pub fn word_length(&self, m: &Monomial) -> u32 {
        m.0.iter()
            .zip(&self.generators)
            .filter(|(_, g)| g.is_suspended())
            .map(|(e, _)| e)
            .sum()
    }

    pub fn unit(&self) -> Monomial {
        Monomial::one(self.len())
    }

    /// `a * b` rewritten in canonical order: `Some((sign, m))`, or `None` when an odd
    /// generator would appear twice.
    pub fn multiply(&self, a: &Monomial, b: &Monomial) -> Option<(i32, Monomial)> {
        let mut exps = Vec::with_capacity(self.len());
        let mut odd_in_a_above = 0u32;
        let mut inversions = 0u32;
        // Walk from the top index down: an odd factor of b at index i has to move left past
        // every odd factor of a with a larger index.
        for i in (0..self.len()).rev() {
            let odd = self.generators[i].is_odd();
            let (ea, eb) = (a.0[i], b.0[i]);
            if odd {
                if ea + eb > 1 {
                    return None;
                }
                if eb == 1 {
                    inversions += odd_in_a_above;
                }
                if ea == 1 {
                    odd_in_a_above += 1;
                }
            }
            exps.push(ea + eb);
        }
        exps.reverse();
        let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
        Some((sign, Monomial(exps)))
    }

    pub fn multiply_elements(&self, a: &Element, b: &Element) -> Element {
        let mut out = Element::zero();
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                if let Some((sign, m)) = self.multiply(ma, mb) {
                    out.add_term(m, &(ca * cb * rat(sign as i64)));
                }
            }
        }
        out
    }

    /// Monomials of total degree `n` in canonical order.
    pub fn basis_of_degree(&self, n: u32) -> Vec<Monomial> {
        self.enumerate(n, None)
    }

    /// Monomials of total degree `n` with exactly `k` suspended factors.
    pub fn basis_of_bidegree(&self, n: u32, k: u32) -> Vec<Monomial> {
        self.enumerate(n, Some(k))
    }

    fn enumerate(&self, n: u32, word_length: Option<u32>) -> Vec<Monomial> {
        fn go(
            gens: &[Generator],
            index: usize,
            remaining: u32,
            words_left: Option<u32>,
            current: &mut Vec<u32>,
            out: &mut Vec<Monomial>,
        ) {
            if index == gens.len() {
                if remaining == 0 && words_left.is_none_or(|w| w == 0) {
                    out.push(Monomial(current.clone()));
                }
                return;
            }
            let g = &gens[index];
            let mut max = remaining / g.degree;
            if g.is_odd() {
                max = max.min(1);
            }
            if let (Some(w), true) = (words_left, g.is_suspended()) {
                max = max.min(w);
            }
            for e in 0..=max {
                current[index] = e;
                let words = match words_left {
                    Some(w) if g.is_suspended() => Some(w - e),
                    other => other,
                };
                go(
                    gens,
                    index + 1,
                    remaining - e * g.degree,
                    words,
                    current,
                    out,
                );
            }
            current[index] = 0;
        }
        let mut out = Vec::new();
        let mut current = vec![0; self.len()];
        go(&self.generators, 0, n, word_length, &mut current, &mut out);
        out.sort();
        out
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        let factors: Vec<String> =
            m.0.iter()
                .zip(&self.generators)
                .filter(|(e, _)| **e > 0)
                .map(|(e, g)| {
                    if *e == 1 {
                        g.name.clone()
                    } else {
                        format!("{}^{}", g.name, e)
                    }
                })
                .collect();
        if factors.is_empty() {
            "1".to_string()
        } else {
            factors.join("*")
        }
    }

    pub fn format_element(&self, e: &Element) -> String {
        if e.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in e.terms().enumerate() {
            let negative = c < &Rational::zero();
            let abs = if negative { -c.clone() } else { c.clone() };
            match (i, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let body = self.format_monomial(m);
            if abs.is_one() {
                out.push_str(&body);
            } else if m.is_one() {
                let _ = write!(out, "{abs}");
            } else {
                let _ = write!(out, "{abs}*{body}");
            }
        }
        out
    }
}

/// A derivation of the free algebra, given by its values on generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationSpec {
    pub degree_shift: i32,
    images: Vec<Option<Element>>,
}

impl DerivationSpec {
    /// Checks that every declared image is homogeneous of degree `|g| + degree_shift`.
    pub fn new(
        gens: &GeneratorSet,
        degree_shift: i32,
        images: Vec<Option<Element>>,
    ) -> Result<Self> {
        if images.len() != gens.len() {
            return Err(Error::Internal(format!(
                "derivation declares {} images for {} generators",
                images.len(),
                gens.len()
            )));
        }
        for (g, img) in gens.generators().iter().zip(&images) {
            let Some(img) = img else { continue };
            let expected = g.degree as i64 + degree_shift as i64;
            match gens.element_degree(img) {
                ElementDegree::Zero => {}
                ElementDegree::Homogeneous(d) if d as i64 == expected => {}
                other => {
                    return Err(Error::Internal(format!(
                        "image of {} has degree {:?}, expected {}",
                        g.name, other, expected
                    )))
                }
            }
        }
        Ok(DerivationSpec {
            degree_shift,
            images,
        })
    }

    pub fn zero(gens: &GeneratorSet, degree_shift: i32) -> Self {
        DerivationSpec {
            degree_shift,
            images: vec![Some(Element::zero()); gens.len()],
        }
    }

    pub fn image(&self, generator: usize) -> Option<&Element> {
        self.images[generator].as_ref()
    }

    pub fn images(&self) -> &[Option<Element>] {
        &self.images
    }

    fn shift_is_odd(&self) -> bool {
        self.degree_shift.rem_euclid(2) == 1
    }
}

/// Extends `spec` to `e` by the graded Leibniz rule.
pub fn apply_derivation(
    gens: &GeneratorSet,
    spec: &DerivationSpec,
    e: &Element,
) -> Result<Element> {
    let mut out = Element::zero();
    for (m, c) in e.terms() {
        let image = apply_to_monomial(gens, spec, m)?;
        out.add_scaled(&image, c);
    }
    Ok(out)
}

fn apply_to_monomial(gens: &GeneratorSet, spec: &DerivationSpec, m: &Monomial) -> Result<Element> {
    let mut out = Element::zero();
    let mut degree_before = 0u32;
    for (i, g) in gens.generators().iter().enumerate() {
        let e = m.exponent(i);
        if e == 0 {
            continue;
        }
        let image = spec
            .image(i)
            .ok_or_else(|| Error::MissingImage(g.name.clone()))?;
        // m = L * g * R with L the factors below i (times g^(e-1), which is even whenever
        // e > 1) and R the factors above i. Each of the e copies of g contributes the same
        // term.
        let (low, high) = m.split_at(i);
        let mut left = low;
        left.0[i] = e - 1;
        let mut right = high;
        right.0[i] = 0;
        let sign = if spec.shift_is_odd() && degree_before % 2 == 1 {
            -1
        } else {
            1
        };
        let left_el = Element::from_monomial(left, rat(sign * e as i64));
        let right_el = Element::from_monomial(right, Rational::one());
        let term = gens.multiply_elements(&gens.multiply_elements(&left_el, image), &right_el);
        out.add_scaled(&term, &Rational::one());
        degree_before += e * g.degree;
    }
    Ok(out)
}

/// Matrix of `spec` from `domain` to `codomain`, columns in `domain` order.
///
/// Both bases must be sorted. A term of an image outside `codomain` is an error: it means
/// the derivation does not respect the slicing the caller assumed.
pub fn matrix_between(
    gens: &GeneratorSet,
    spec: &DerivationSpec,
    domain: &[Monomial],
    codomain: &[Monomial],
) -> Result<SparseMatrix> {
    let mut mat = SparseMatrix::zeros(codomain.len(), domain.len());
    for (col, m) in domain.iter().enumerate() {
        let image = apply_to_monomial(gens, spec, m)?;
        for (t, c) in image.terms() {
            let row = codomain.binary_search(t).map_err(|_| {
                Error::Internal(format!(
                    "image of {} contains {} outside the target slice",
                    gens.format_monomial(m),
                    gens.format_monomial(t)
                ))
            })?;
            mat.set(row, col, c.clone());
        }
    }
    Ok(mat)
}

/// Matrix of `spec` from degree `n` to degree `n + degree_shift`.
pub fn matrix_of_degree_slice(
    gens: &GeneratorSet,
    spec: &DerivationSpec,
    n: u32,
) -> Result<SparseMatrix> {
    let domain = gens.basis_of_degree(n);
    let target = n as i64 + spec.degree_shift as i64;
    let codomain = if target < 0 {
        Vec::new()
    } else {
        gens.basis_of_degree(target as u32)
    };
    matrix_between(gens, spec, &domain, &codomain)
}

/// Coordinates of a homogeneous element in a sorted monomial basis.
pub fn coordinates(e: &Element, basis: &[Monomial]) -> Option<Vec<Rational>> {
    let mut v = vec![Rational::zero(); basis.len()];
    for (m, c) in e.terms() {
        let i = basis.binary_search(m).ok()?;
        v[i] = c.clone();
    }
    Some(v)
}

pub fn from_coordinates(v: &[Rational], basis: &[Monomial]) -> Element {
    let mut e = Element::zero();
    for (m, c) in basis.iter().zip(v) {
        e.add_term(m.clone(), c);
    }
    e
}
