//! Minimal Sullivan models: the model file format, structural validation, cohomology,
//! and the Poincare duality check.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactq::{self, rat, Rational, SparseMatrix, Vector};
use crate::gca::{self, DerivationSpec, Element, Generator, GeneratorSet, Monomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completeness {
    Complete,
    /// Every generator of degree `<= c` is present.
    UpTo(u32),
}

/// Degree-indexed dimensions with a trust bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankTable {
    pub label: String,
    pub entries: BTreeMap<u32, usize>,
    /// `None` means every entry is trusted.
    pub trusted_up_to: Option<u32>,
}

impl RankTable {
    pub fn new(label: impl Into<String>, trusted_up_to: Option<u32>) -> Self {
        RankTable {
            label: label.into(),
            entries: BTreeMap::new(),
            trusted_up_to,
        }
    }

    pub fn get(&self, degree: u32) -> usize {
        self.entries.get(&degree).copied().unwrap_or(0)
    }

    pub fn is_trusted(&self, degree: u32) -> bool {
        self.trusted_up_to.is_none_or(|t| degree <= t)
    }

    /// Values for `0..=max`, missing degrees as zero.
    pub fn dense(&self, max: u32) -> Vec<usize> {
        (0..=max).map(|n| self.get(n)).collect()
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.entries.keys().next_back().copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SullivanModel {
    name: String,
    generators: GeneratorSet,
    differential: DerivationSpec,
    formal_dimension: u32,
    completeness: Completeness,
}

impl SullivanModel {
    /// Builds a model from generators in any order. The generators are put into canonical
    /// order (degree, then position in `generators`); `differential` maps a generator name
    /// to its image written over the input order.
    pub fn new(
        name: impl Into<String>,
        generators: Vec<(String, u32)>,
        differential: Vec<(String, Element)>,
        formal_dimension: u32,
        completeness: Completeness,
    ) -> Result<Self> {
        let input = GeneratorSet::new(
            generators
                .iter()
                .map(|(n, d)| Generator::base(n.clone(), *d))
                .collect(),
        );
        let mut order: Vec<usize> = (0..generators.len()).collect();
        order.sort_by_key(|&i| (generators[i].1, i));
        let gens = GeneratorSet::new(order.iter().map(|&i| input.get(i).clone()).collect());
        let relabel =
            |m: &Monomial| Monomial::from_exponents(order.iter().map(|&i| m.exponent(i)).collect());
        let mut images: Vec<Option<Element>> = vec![Some(Element::zero()); gens.len()];
        for (name, img) in differential {
            let idx = gens
                .index_of(&name)
                .ok_or(Error::UnknownGenerator { line: 0, name })?;
            images[idx] = Some(canonical_reorder(&input, img, &relabel));
        }
        let differential = DerivationSpec::new(&gens, 1, images)?;
        Ok(SullivanModel {
            name: name.into(),
            generators: gens,
            differential,
            formal_dimension,
            completeness,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.generators
    }

    pub fn differential(&self) -> &DerivationSpec {
        &self.differential
    }

    pub fn formal_dimension(&self) -> u32 {
        self.formal_dimension
    }

    pub fn completeness(&self) -> Completeness {
        self.completeness
    }

    /// Largest degree at which base cohomology is determined by the generators present.
    pub fn trusted_base(&self) -> Option<u32> {
        match self.completeness {
            Completeness::Complete => None,
            Completeness::UpTo(c) => Some(c),
        }
    }

    /// Trust bound for everything built from the free loop model (suspension lowers
    /// degrees by one).
    pub fn trusted_loop(&self) -> Option<u32> {
        match self.completeness {
            Completeness::Complete => None,
            Completeness::UpTo(c) => Some(c.saturating_sub(1)),
        }
    }

    pub fn basis(&self, n: u32) -> Vec<Monomial> {
        self.generators.basis_of_degree(n)
    }

    /// Matrix of `d : (ΛV)^n -> (ΛV)^{n+1}`.
    pub fn differential_matrix(&self, n: u32) -> Result<SparseMatrix> {
        gca::matrix_of_degree_slice(&self.generators, &self.differential, n)
    }

    pub fn apply_d(&self, e: &Element) -> Result<Element> {
        gca::apply_derivation(&self.generators, &self.differential, e)
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Element {
        self.generators.multiply_elements(a, b)
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }

    /// Runs [`validate`] and turns a failed report into [`Error::ValidationFailed`].
    pub fn ensure_valid(&self) -> Result<ValidationReport> {
        let report = validate(self);
        if report.passed() {
            Ok(report)
        } else {
            let failed: Vec<String> = report
                .checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| format!("{} ({})", c.name, c.detail))
                .collect();
            Err(Error::ValidationFailed(failed.join("; ")))
        }
    }

    /// Canonical text form; parsing it gives back an equal model.
    pub fn to_model_text(&self) -> String {
        let mut out = format!("model {}\ndim {}\n", self.name, self.formal_dimension);
        match self.completeness {
            Completeness::Complete => out.push_str("complete\n"),
            Completeness::UpTo(c) => out.push_str(&format!("complete-to {c}\n")),
        }
        for g in self.generators.generators() {
            out.push_str(&format!("gen {} {}\n", g.name, g.degree));
        }
        for (g, img) in self
            .generators
            .generators()
            .iter()
            .zip(self.differential.images())
        {
            if let Some(img) = img {
                if !img.is_zero() {
                    out.push_str(&format!(
                        "d {} = {}\n",
                        g.name,
                        self.generators.format_element(img)
                    ));
                }
            }
        }
        out
    }
}

fn canonical_reorder(
    input: &GeneratorSet,
    e: Element,
    relabel: &impl Fn(&Monomial) -> Monomial,
) -> Element {
    // Reordering generators changes the Koszul sign of a written monomial: rebuild each
    // monomial as a product of its factors in the new order.
    let mut out = Element::zero();
    for (m, c) in e.terms() {
        let target = relabel(m);
        // sign of the permutation restricted to odd factors: count odd pairs whose relative
        // order flips
        let odd_positions: Vec<usize> = (0..input.len())
            .filter(|&i| m.exponent(i) == 1 && input.get(i).is_odd())
            .collect();
        let mut new_pos: Vec<usize> = Vec::new();
        for &i in &odd_positions {
            // position in the canonical order = rank of (degree, i)
            let key = (input.get(i).degree, i);
            let rank = (0..input.len())
                .filter(|&j| (input.get(j).degree, j) < key)
                .count();
            new_pos.push(rank);
        }
        let mut inversions = 0;
        for a in 0..new_pos.len() {
            for b in a + 1..new_pos.len() {
                if new_pos[a] > new_pos[b] {
                    inversions += 1;
                }
            }
        }
        let sign = if inversions % 2 == 0 { rat(1) } else { rat(-1) };
        out.add_term(target, &(c * sign));
    }
    out
}

// ---------------------------------------------------------------------------------------
// Parsing

struct ParsedLine<'a> {
    line: usize,
    keyword: &'a str,
    rest: &'a str,
}

/// Parses the line-oriented model format.
pub fn parse_model(text: &str) -> Result<SullivanModel> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (keyword, rest) = match content.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (content, ""),
        };
        lines.push(ParsedLine {
            line: i + 1,
            keyword,
            rest,
        });
    }

    let mut name: Option<String> = None;
    let mut dim: Option<u32> = None;
    let mut completeness: Option<Completeness> = None;
    let mut generators: Vec<(String, u32)> = Vec::new();
    let mut differentials: Vec<&ParsedLine> = Vec::new();

    for pl in &lines {
        let err = |message: String| Error::Parse {
            line: pl.line,
            message,
        };
        match pl.keyword {
            "model" => {
                if pl.rest.is_empty() {
                    return Err(err("`model` needs a name".into()));
                }
                name = Some(pl.rest.to_string());
            }
            "dim" => {
                let n: u32 = pl
                    .rest
                    .parse()
                    .map_err(|_| err(format!("bad formal dimension `{}`", pl.rest)))?;
                if n == 0 {
                    return Err(err("formal dimension must be positive".into()));
                }
                dim = Some(n);
            }
            "complete" => {
                if !pl.rest.is_empty() {
                    return Err(err("`complete` takes no argument".into()));
                }
                completeness = Some(Completeness::Complete);
            }
            "complete-to" => {
                let c: u32 = pl
                    .rest
                    .parse()
                    .map_err(|_| err(format!("bad completeness degree `{}`", pl.rest)))?;
                if c == 0 {
                    return Err(err("completeness degree must be positive".into()));
                }
                completeness = Some(Completeness::UpTo(c));
            }
            "gen" => {
                let parts: Vec<&str> = pl.rest.split_whitespace().collect();
                let [gname, deg] = parts[..] else {
                    return Err(err("expected `gen NAME DEGREE`".into()));
                };
                if !is_identifier(gname) {
                    return Err(err(format!("bad generator name `{gname}`")));
                }
                let deg: u32 = deg
                    .parse()
                    .map_err(|_| err(format!("bad degree `{deg}`")))?;
                if deg == 0 {
                    return Err(err("generator degree must be positive".into()));
                }
                if generators.iter().any(|(n, _)| n == gname) {
                    return Err(err(format!("generator `{gname}` declared twice")));
                }
                generators.push((gname.to_string(), deg));
            }
            "d" => differentials.push(pl),
            other => return Err(err(format!("unknown keyword `{other}`"))),
        }
    }

    let dim = dim.ok_or(Error::Parse {
        line: 0,
        message: "missing `dim` line".into(),
    })?;
    let completeness = completeness.ok_or(Error::Parse {
        line: 0,
        message: "missing `complete` or `complete-to` line".into(),
    })?;

    let input = GeneratorSet::new(
        generators
            .iter()
            .map(|(n, d)| Generator::base(n.clone(), *d))
            .collect(),
    );
    let mut images: Vec<(String, Element)> = Vec::new();
    for pl in differentials {
        let (lhs, rhs) = pl.rest.split_once('=').ok_or(Error::Parse {
            line: pl.line,
            message: "expected `d NAME = POLY`".into(),
        })?;
        let gname = lhs.trim();
        let idx = input.index_of(gname).ok_or(Error::UnknownGenerator {
            line: pl.line,
            name: gname.to_string(),
        })?;
        if images.iter().any(|(n, _)| n == gname) {
            return Err(Error::Parse {
                line: pl.line,
                message: format!("d({gname}) given twice"),
            });
        }
        let poly = parse_polynomial(&input, rhs, pl.line)?;
        let expected = input.get(idx).degree + 1;
        for (m, _) in poly.terms() {
            let found = input.degree(m);
            if found != expected {
                return Err(Error::DegreeMismatch {
                    line: pl.line,
                    generator: gname.to_string(),
                    expected,
                    found,
                });
            }
        }
        images.push((gname.to_string(), poly));
    }

    SullivanModel::new(
        name.unwrap_or_else(|| "unnamed".to_string()),
        generators,
        images,
        dim,
        completeness,
    )
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

fn parse_polynomial(gens: &GeneratorSet, text: &str, line: usize) -> Result<Element> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let err = |message: String| Error::Parse { line, message };
    if compact.is_empty() {
        return Err(err("empty polynomial".into()));
    }
    let mut terms: Vec<(bool, &str)> = Vec::new();
    let mut start = 0;
    let mut negative = false;
    let bytes = compact.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'+' || b == b'-' {
            if i == 0 {
                negative = b == b'-';
                start = 1;
                continue;
            }
            terms.push((negative, &compact[start..i]));
            negative = b == b'-';
            start = i + 1;
        }
    }
    terms.push((negative, &compact[start..]));

    let n = gens.len();
    let mut out = Element::zero();
    for (negative, term) in terms {
        if term.is_empty() {
            return Err(err("empty term".into()));
        }
        let mut coefficient = if negative { rat(-1) } else { rat(1) };
        let mut value = Element::one(n);
        for (fi, factor) in term.split('*').enumerate() {
            if factor.is_empty() {
                return Err(err(format!("empty factor in `{term}`")));
            }
            if factor.starts_with(|c: char| c.is_ascii_digit()) {
                if fi != 0 {
                    return Err(err(format!("coefficient must come first in `{term}`")));
                }
                coefficient *= parse_rational(factor)
                    .ok_or_else(|| err(format!("bad coefficient `{factor}`")))?;
                continue;
            }
            let (fname, exp) = match factor.split_once('^') {
                Some((f, e)) => (
                    f,
                    e.parse::<u32>()
                        .map_err(|_| err(format!("bad exponent in `{factor}`")))?,
                ),
                None => (factor, 1),
            };
            let idx = gens.index_of(fname).ok_or(Error::UnknownGenerator {
                line,
                name: fname.to_string(),
            })?;
            let g = gens.get(idx);
            let already = value.terms().next().map_or(0, |(m, _)| m.exponent(idx));
            if g.is_odd() && exp + already > 1 {
                return Err(Error::OddExponent {
                    line,
                    name: fname.to_string(),
                });
            }
            for _ in 0..exp {
                value = gens.multiply_elements(&value, &Element::generator(n, idx));
            }
        }
        out.add_scaled(&value, &coefficient);
    }
    Ok(out)
}

fn parse_rational(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.parse().ok()?;
            let b: BigInt = b.parse().ok()?;
            (!b.is_zero()).then(|| Rational::new(a, b))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

// ---------------------------------------------------------------------------------------
// Validation

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub trusted_base: Option<u32>,
    pub trusted_loop: Option<u32>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn validate(model: &SullivanModel) -> ValidationReport {
    let gens = model.generators();
    let mut checks = Vec::new();

    let low: Vec<&str> = gens
        .generators()
        .iter()
        .filter(|g| g.degree < 2)
        .map(|g| g.name.as_str())
        .collect();
    checks.push(Check {
        name: "simply connected (V^1 = 0)".into(),
        pass: low.is_empty(),
        detail: if low.is_empty() {
            "all generators in degree >= 2".into()
        } else {
            format!("generators of degree 1: {}", low.join(", "))
        },
    });

    let linear: Vec<&str> = gens
        .generators()
        .iter()
        .zip(model.differential().images())
        .filter(|(_, img)| {
            img.as_ref()
                .is_some_and(|e| e.terms().any(|(m, _)| m.length() < 2))
        })
        .map(|(g, _)| g.name.as_str())
        .collect();
    checks.push(Check {
        name: "minimality".into(),
        pass: linear.is_empty(),
        detail: if linear.is_empty() {
            "d(V) is decomposable".into()
        } else {
            format!("linear part in d({})", linear.join("), d("))
        },
    });

    let mut bad: Vec<String> = Vec::new();
    for i in 0..gens.len() {
        let g = Element::generator(gens.len(), i);
        let dd = model.apply_d(&g).and_then(|dg| model.apply_d(&dg));
        match dd {
            Ok(e) if e.is_zero() => {}
            Ok(e) => bad.push(format!(
                "d(d({})) = {}",
                gens.get(i).name,
                gens.format_element(&e)
            )),
            Err(e) => bad.push(e.to_string()),
        }
    }
    checks.push(Check {
        name: "d^2 = 0".into(),
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("checked on {} generators", gens.len())
        } else {
            bad.join("; ")
        },
    });

    ValidationReport {
        checks,
        trusted_base: model.trusted_base(),
        trusted_loop: model.trusted_loop(),
    }
}

// ---------------------------------------------------------------------------------------
// Cohomology

/// `dim H^n(ΛV, d)` for `0 <= n <= n_max`.
pub fn cohomology_table(model: &SullivanModel, n_max: u32) -> Result<RankTable> {
    let diffs: Vec<SparseMatrix> = (0..=n_max)
        .into_par_iter()
        .map(|n| model.differential_matrix(n))
        .collect::<Result<_>>()?;
    let dims: Vec<usize> = (0..=n_max as usize)
        .into_par_iter()
        .map(|n| {
            let incoming = if n == 0 {
                SparseMatrix::zeros(diffs[0].cols(), 0)
            } else {
                diffs[n - 1].clone()
            };
            exactq::cohomology_dim(&diffs[n], &incoming)
        })
        .collect::<Result<_>>()?;
    let trusted = model.trusted_base().map(|c| c.min(n_max)).or(Some(n_max));
    let mut table = RankTable::new("H(ΛV,d)", trusted);
    for (n, d) in dims.into_iter().enumerate() {
        table.entries.insert(n as u32, d);
    }
    Ok(table)
}

/// Cocycles in `(ΛV)^n` whose classes form a basis of `H^n`.
pub fn cohomology_representatives(model: &SullivanModel, n: u32) -> Result<Vec<Element>> {
    let d_out = model.differential_matrix(n)?;
    let d_in = incoming_differential(model, n)?;
    let basis = model.basis(n);
    Ok(exactq::cohomology_representatives(&d_out, &d_in)?
        .iter()
        .map(|v| gca::from_coordinates(v, &basis))
        .collect())
}

fn incoming_differential(model: &SullivanModel, n: u32) -> Result<SparseMatrix> {
    if n == 0 {
        Ok(SparseMatrix::zeros(1, 0))
    } else {
        model.differential_matrix(n - 1)
    }
}

/// The linear functional on `(ΛV)^N` that vanishes on `d((ΛV)^{N-1})` and on the pivot
/// monomials of `d^N`, normalized to 1 on `omega`.
///
/// On cocycles it reads off the coefficient of the fundamental class.
pub fn top_class_functional(model: &SullivanModel, omega: &Element) -> Result<Vector> {
    let n = model.formal_dimension();
    let basis = model.basis(n);
    let d_in = incoming_differential(model, n)?;
    let pivots = exactq::rref(&model.differential_matrix(n)?).pivot_cols;
    let mut constraints = SparseMatrix::zeros(d_in.cols() + pivots.len(), basis.len());
    for (r, c, v) in d_in.entries() {
        constraints.set(c, r, v.clone());
    }
    for (i, &p) in pivots.iter().enumerate() {
        constraints.set(d_in.cols() + i, p, Rational::one());
    }
    let kernel = exactq::kernel_basis(&constraints);
    if kernel.len() != 1 {
        return Err(Error::NotPoincareDuality {
            degree: n,
            reason: format!("top cohomology has dimension {}", kernel.len()),
        });
    }
    let phi = &kernel[0];
    let omega_v = gca::coordinates(omega, &basis)
        .ok_or_else(|| Error::Internal("fundamental class not homogeneous of degree N".into()))?;
    let value: Rational = phi.iter().zip(&omega_v).map(|(a, b)| a * b).sum();
    if value.is_zero() {
        return Err(Error::TopClassCollapse);
    }
    Ok(phi.iter().map(|a| a / &value).collect())
}

#[derive(Debug, Clone)]
pub struct PairingBlock {
    pub degree: u32,
    pub dual_degree: u32,
    pub matrix: SparseMatrix,
    pub rank: usize,
}

#[derive(Debug, Clone)]
pub struct FundamentalClass {
    pub formal_dimension: u32,
    pub representative: Element,
    /// Cohomology dimensions on the checked window.
    pub dims: Vec<usize>,
    pub pairings: Vec<PairingBlock>,
}

/// Degrees above `N` examined for vanishing cohomology.
pub fn duality_window(model: &SullivanModel) -> u32 {
    let n = model.formal_dimension();
    let max_gen = model
        .generators()
        .generators()
        .iter()
        .map(|g| g.degree)
        .max()
        .unwrap_or(0);
    let window = (2 * n).max(n + max_gen) + 1;
    model.trusted_base().map_or(window, |c| window.min(c))
}

pub fn check_poincare_duality(model: &SullivanModel) -> Result<FundamentalClass> {
    model.ensure_valid()?;
    let n = model.formal_dimension();
    if let Some(c) = model.trusted_base() {
        if c < n {
            return Err(Error::NotPoincareDuality {
                degree: c + 1,
                reason: format!("model is only complete to degree {c}, below the formal dimension"),
            });
        }
    }
    let window = duality_window(model);
    let table = cohomology_table(model, window)?;
    let dims = table.dense(window);
    if dims[n as usize] != 1 {
        return Err(Error::NotPoincareDuality {
            degree: n,
            reason: format!("dim H^{n} = {}", dims[n as usize]),
        });
    }
    if let Some(k) = (n + 1..=window).find(|&k| dims[k as usize] != 0) {
        return Err(Error::NotPoincareDuality {
            degree: k,
            reason: format!(
                "dim H^{k} = {} above the formal dimension",
                dims[k as usize]
            ),
        });
    }

    let reps: Vec<Vec<Element>> = (0..=n)
        .into_par_iter()
        .map(|k| cohomology_representatives(model, k))
        .collect::<Result<_>>()?;
    let omega = reps[n as usize][0].clone();
    let phi = top_class_functional(model, &omega)?;
    let top_basis = model.basis(n);

    let mut pairings = Vec::new();
    for k in 0..=n {
        let dual = n - k;
        let (a, b) = (&reps[k as usize], &reps[dual as usize]);
        if a.len() != b.len() {
            return Err(Error::NotPoincareDuality {
                degree: k,
                reason: format!("dim H^{k} = {} but dim H^{dual} = {}", a.len(), b.len()),
            });
        }
        let mut matrix = SparseMatrix::zeros(a.len(), b.len());
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let prod = model.multiply(x, y);
                let v = gca::coordinates(&prod, &top_basis)
                    .ok_or_else(|| Error::Internal("product left degree N".into()))?;
                let value: Rational = phi.iter().zip(&v).map(|(p, q)| p * q).sum();
                matrix.set(i, j, value);
            }
        }
        let rank = exactq::rank(&matrix);
        if rank != a.len() {
            return Err(Error::NotPoincareDuality {
                degree: k,
                reason: format!("cup pairing H^{k} x H^{dual} has rank {rank} < {}", a.len()),
            });
        }
        pairings.push(PairingBlock {
            degree: k,
            dual_degree: dual,
            matrix,
            rank,
        });
    }

    Ok(FundamentalClass {
        formal_dimension: n,
        representative: omega,
        dims,
        pairings,
    })
}

impl fmt::Display for SullivanModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_model_text())
    }
}
