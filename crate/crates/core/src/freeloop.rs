//! The free loop space model `(ΛV ⊗ ΛsV, D)` and its word-length (Hodge) splitting.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactq::{self, ratio, Rational, SparseMatrix};
use crate::gca::{self, DerivationSpec, Element, Generator, GeneratorSet, Monomial};
use crate::sullivan::{RankTable, SullivanModel};

#[derive(Debug, Clone)]
pub struct FreeLoopModel {
    base: SullivanModel,
    generators: GeneratorSet,
    suspension: DerivationSpec,
    differential: DerivationSpec,
}

/// Builds `(ΛV ⊗ ΛsV, D)` with `D(v) = dv` and `D(sv) = -s(dv)`.
pub fn build_free_loop_model(model: &SullivanModel) -> Result<FreeLoopModel> {
    model.ensure_valid()?;
    let base = model.generators();
    let nb = base.len();
    let total = 2 * nb;

    let mut gens: Vec<Generator> = base.generators().to_vec();
    for (i, g) in base.generators().iter().enumerate() {
        gens.push(Generator::suspended(
            format!("s{}", g.name),
            g.degree - 1,
            i,
        ));
    }
    let generators = GeneratorSet::new(gens);
    let lift = |e: &Element| e.map_monomials(|m| m.embed(0, total));

    let mut s_images = Vec::with_capacity(total);
    for i in 0..nb {
        s_images.push(Some(Element::generator(total, nb + i)));
    }
    s_images.extend((0..nb).map(|_| Some(Element::zero())));
    let suspension = DerivationSpec::new(&generators, -1, s_images)?;

    let mut d_images = Vec::with_capacity(total);
    for i in 0..nb {
        let dv = model
            .differential()
            .image(i)
            .ok_or_else(|| Error::MissingImage(base.get(i).name.clone()))?;
        d_images.push(Some(lift(dv)));
    }
    for i in 0..nb {
        let dv = lift(d_images[i].as_ref().expect("set above"));
        let sdv = gca::apply_derivation(&generators, &suspension, &dv)?;
        d_images.push(Some(sdv.neg()));
    }
    let differential = DerivationSpec::new(&generators, 1, d_images)?;

    let flm = FreeLoopModel {
        base: model.clone(),
        generators,
        suspension,
        differential,
    };
    flm.check_square_zero()?;
    Ok(flm)
}

impl FreeLoopModel {
    pub fn base(&self) -> &SullivanModel {
        &self.base
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.generators
    }

    pub fn num_base_generators(&self) -> usize {
        self.base.generators().len()
    }

    pub fn suspension(&self) -> &DerivationSpec {
        &self.suspension
    }

    pub fn differential(&self) -> &DerivationSpec {
        &self.differential
    }

    /// `D(sv)` for the base generator at `index`.
    pub fn loop_image(&self, index: usize) -> &Element {
        self.differential
            .image(self.num_base_generators() + index)
            .expect("every image is declared")
    }

    pub fn apply_d(&self, e: &Element) -> Result<Element> {
        gca::apply_derivation(&self.generators, &self.differential, e)
    }

    fn check_square_zero(&self) -> Result<()> {
        for i in 0..self.generators.len() {
            let g = Element::generator(self.generators.len(), i);
            let dd = self.apply_d(&self.apply_d(&g)?)?;
            if !dd.is_zero() {
                return Err(Error::DifferentialSquareNonzero(format!(
                    "D(D({})) = {}",
                    self.generators.get(i).name,
                    self.generators.format_element(&dd)
                )));
            }
        }
        Ok(())
    }

    /// Splits a monomial into its `ΛV` part and its `ΛsV` part (no sign: base generators
    /// precede suspended ones in canonical order).
    pub fn split(&self, m: &Monomial) -> (Monomial, Monomial) {
        let nb = self.num_base_generators();
        (m.restrict(0..nb), m.restrict(nb..2 * nb))
    }

    /// `ΛsV` on its own, as a free algebra with the suspended generators in order.
    pub fn suspended_generators(&self) -> GeneratorSet {
        let nb = self.num_base_generators();
        GeneratorSet::new(
            self.generators.generators()[nb..]
                .iter()
                .map(|g| Generator::base(g.name.clone(), g.degree))
                .collect(),
        )
    }

    pub fn basis(&self, n: u32, word_length: u32) -> Vec<Monomial> {
        self.generators.basis_of_bidegree(n, word_length)
    }

    /// `D : (ΛV ⊗ Λ^k sV)^n -> (ΛV ⊗ Λ^k sV)^{n+1}`. Fails if `D` leaves word length `k`.
    pub fn slice_matrix(&self, n: u32, word_length: u32) -> Result<SparseMatrix> {
        gca::matrix_between(
            &self.generators,
            &self.differential,
            &self.basis(n, word_length),
            &self.basis(n + 1, word_length),
        )
    }

    /// `D` on the whole degree-`n` slice.
    pub fn full_slice_matrix(&self, n: u32) -> Result<SparseMatrix> {
        gca::matrix_of_degree_slice(&self.generators, &self.differential, n)
    }

    pub fn trusted_up_to(&self, n_max: u32) -> u32 {
        self.base.trusted_loop().map_or(n_max, |t| t.min(n_max))
    }
}

/// `dim H^n_{(k)}` for `n <= n_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HodgeTable {
    pub entries: BTreeMap<(u32, u32), usize>,
    pub n_max: u32,
    pub trusted_up_to: u32,
}

impl HodgeTable {
    pub fn get(&self, n: u32, k: u32) -> usize {
        self.entries.get(&(n, k)).copied().unwrap_or(0)
    }

    pub fn row_sum(&self, n: u32) -> usize {
        self.entries
            .range((n, 0)..=(n, u32::MAX))
            .map(|(_, v)| v)
            .sum()
    }

    /// Largest word length with a nonzero entry.
    pub fn max_word_length(&self) -> u32 {
        self.entries
            .iter()
            .filter(|(_, &v)| v > 0)
            .map(|((_, k), _)| *k)
            .max()
            .unwrap_or(0)
    }

    /// The table of `H^*_{(k)}` for a fixed `k`.
    pub fn word_length_table(&self, k: u32) -> RankTable {
        let mut t = RankTable::new(format!("H_({k})"), Some(self.trusted_up_to));
        for n in 0..=self.n_max {
            t.entries.insert(n, self.get(n, k));
        }
        t
    }
}

fn slice_cohomology(flm: &FreeLoopModel, n: u32, k: u32) -> Result<usize> {
    let d_out = flm.slice_matrix(n, k)?;
    let d_in = if n == 0 {
        SparseMatrix::zeros(d_out.cols(), 0)
    } else {
        flm.slice_matrix(n - 1, k)?
    };
    exactq::cohomology_dim(&d_out, &d_in)
}

pub fn hodge_betti_table(flm: &FreeLoopModel, n_max: u32) -> Result<HodgeTable> {
    let cells: Vec<(u32, u32)> = (0..=n_max)
        .flat_map(|n| (0..=n).map(move |k| (n, k)))
        .collect();
    let values: Vec<usize> = cells
        .par_iter()
        .map(|&(n, k)| slice_cohomology(flm, n, k))
        .collect::<Result<_>>()?;
    Ok(HodgeTable {
        entries: cells.into_iter().zip(values).collect(),
        n_max,
        trusted_up_to: flm.trusted_up_to(n_max),
    })
}

/// Total Betti numbers of the loop model, computed on full degree slices and cross-checked
/// against the sums of the Hodge pieces.
pub fn loop_betti(flm: &FreeLoopModel, n_max: u32) -> Result<RankTable> {
    let hodge = hodge_betti_table(flm, n_max)?;
    loop_betti_checked(flm, &hodge)
}

pub fn loop_betti_checked(flm: &FreeLoopModel, hodge: &HodgeTable) -> Result<RankTable> {
    let n_max = hodge.n_max;
    let full: Vec<SparseMatrix> = (0..=n_max)
        .into_par_iter()
        .map(|n| flm.full_slice_matrix(n))
        .collect::<Result<_>>()?;
    let dims: Vec<usize> = (0..=n_max as usize)
        .into_par_iter()
        .map(|n| {
            let d_in = if n == 0 {
                SparseMatrix::zeros(full[0].cols(), 0)
            } else {
                full[n - 1].clone()
            };
            exactq::cohomology_dim(&full[n], &d_in)
        })
        .collect::<Result<_>>()?;
    let mut table = RankTable::new("H(LM)", Some(hodge.trusted_up_to));
    for (n, total) in dims.into_iter().enumerate() {
        let n = n as u32;
        let hodge_sum = hodge.row_sum(n);
        if hodge_sum != total {
            return Err(Error::HodgeSumMismatch {
                degree: n,
                hodge_sum,
                total,
            });
        }
        table.entries.insert(n, total);
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthClass {
    /// Every partial sum is zero.
    Degenerate,
    /// Fewer than four trusted degrees.
    Inconclusive,
    SubExponential,
    /// Successive ratios stay at or above 5/4 over the second half of the window.
    Exponential,
}

impl GrowthClass {
    pub fn label(self) -> &'static str {
        match self {
            GrowthClass::Degenerate => "degenerate",
            GrowthClass::Inconclusive => "inconclusive",
            GrowthClass::SubExponential => "sub-exponential",
            GrowthClass::Exponential => "exponential",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    /// `(n, Σ_{i<=n} b_i)` over the trusted window.
    pub partial_sums: Vec<(u32, u64)>,
    /// `s_n / s_{n-1}`, absent where `s_{n-1} = 0`.
    pub ratios: Vec<(u32, Option<Rational>)>,
    /// Largest and smallest `s_n^{1/n}` for `n >= 2`. Observational only.
    pub root_bounds: Option<(f64, f64)>,
    pub class: GrowthClass,
    pub window_end: u32,
}

pub fn growth_report(table: &RankTable) -> GrowthReport {
    let last = table.max_degree().unwrap_or(0);
    let window_end = table.trusted_up_to.map_or(last, |t| t.min(last));
    let mut partial_sums = Vec::new();
    let mut running = 0u64;
    for n in 0..=window_end {
        running += table.get(n) as u64;
        partial_sums.push((n, running));
    }
    let ratios: Vec<(u32, Option<Rational>)> = partial_sums
        .windows(2)
        .map(|w| {
            let (prev, cur) = (w[0].1, w[1].1);
            (w[1].0, (prev > 0).then(|| ratio(cur as i64, prev as i64)))
        })
        .collect();
    let roots: Vec<f64> = partial_sums
        .iter()
        .filter(|(n, s)| *n >= 2 && *s > 0)
        .map(|(n, s)| (*s as f64).powf(1.0 / *n as f64))
        .collect();
    let root_bounds = (!roots.is_empty()).then(|| {
        let max = roots.iter().cloned().fold(f64::MIN, f64::max);
        let min = roots.iter().cloned().fold(f64::MAX, f64::min);
        (max, min)
    });

    let class = if partial_sums.iter().all(|(_, s)| *s == 0) {
        GrowthClass::Degenerate
    } else if partial_sums.len() < 4 {
        GrowthClass::Inconclusive
    } else {
        let half = ratios.len() / 2;
        let threshold = ratio(5, 4);
        let tail = &ratios[half..];
        if !tail.is_empty()
            && tail
                .iter()
                .all(|(_, r)| r.as_ref().is_some_and(|r| r >= &threshold))
        {
            GrowthClass::Exponential
        } else {
            GrowthClass::SubExponential
        }
    };

    GrowthReport {
        partial_sums,
        ratios,
        root_bounds,
        class,
        window_end,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sullivan::parse_model;

    const S2: &str = "model S2\ngen x 2\ngen y 3\nd y = x^2\ndim 2\ncomplete\n";
    const CP2: &str = "model CP2\ngen x 2\ngen y 5\nd y = x^3\ndim 4\ncomplete\n";
    const S3: &str = "model S3\ngen x 3\ndim 3\ncomplete\n";

    fn flm(text: &str) -> FreeLoopModel {
        build_free_loop_model(&parse_model(text).unwrap()).unwrap()
    }

    #[test]
    fn loop_models_of_standard_spaces() {
        let s2 = flm(S2);
        let names: Vec<&str> = s2
            .generators()
            .generators()
            .iter()
            .map(|g| g.name.as_str())
            .collect();
        assert_eq!(names, vec!["x", "y", "sx", "sy"]);
        let degrees: Vec<u32> = s2
            .generators()
            .generators()
            .iter()
            .map(|g| g.degree)
            .collect();
        assert_eq!(degrees, vec![2, 3, 1, 2]);
        assert_eq!(s2.generators().format_element(s2.loop_image(1)), "-2*x*sx");

        let s3 = flm(S3);
        assert!(s3
            .differential()
            .images()
            .iter()
            .all(|i| i.as_ref().unwrap().is_zero()));

        let cp2 = flm(CP2);
        assert_eq!(
            cp2.generators().format_element(cp2.loop_image(1)),
            "-3*x^2*sx"
        );
    }

    #[test]
    fn hodge_table_of_s2() {
        let h = hodge_betti_table(&flm(S2), 5).unwrap();
        assert_eq!(h.get(1, 1), 1);
        assert_eq!(h.get(2, 0), 1);
        assert_eq!(h.get(3, 2), 1);
        assert_eq!(h.get(4, 1), 1);
        assert_eq!(h.get(3, 1), 0);
    }

    #[test]
    fn hodge_table_of_s3_is_diagonal() {
        let h = hodge_betti_table(&flm(S3), 12).unwrap();
        for n in 0..=12u32 {
            for k in 0..=n {
                let expected = usize::from(n == 2 * k || n == 2 * k + 3);
                assert_eq!(h.get(n, k), expected, "H^{n}_({k})");
            }
        }
    }

    #[test]
    fn hodge_table_of_cp2() {
        let h = hodge_betti_table(&flm(CP2), 8).unwrap();
        assert_eq!(h.get(6, 1), 1);
        assert_eq!(h.get(7, 1), 0);
        assert_eq!(h.get(8, 1), 1);
    }

    #[test]
    fn word_length_zero_is_the_base() {
        for text in [S2, CP2, S3] {
            let m = parse_model(text).unwrap();
            let h = hodge_betti_table(&build_free_loop_model(&m).unwrap(), 9).unwrap();
            let base = crate::sullivan::cohomology_table(&m, 9).unwrap();
            for n in 0..=9 {
                assert_eq!(h.get(n, 0), base.get(n));
            }
        }
    }

    #[test]
    fn loop_betti_numbers() {
        assert_eq!(
            loop_betti(&flm(S2), 4).unwrap().dense(4),
            vec![1, 1, 1, 1, 1]
        );
        assert_eq!(
            loop_betti(&flm(S3), 6).unwrap().dense(6),
            vec![1, 0, 1, 1, 1, 1, 1]
        );
        assert_eq!(loop_betti(&flm(CP2), 1).unwrap().get(1), 1);
    }

    #[test]
    fn differential_preserves_word_length() {
        let l = flm(CP2);
        for n in 0..10 {
            let full = l.full_slice_matrix(n).unwrap();
            let total: usize = (0..=n).map(|k| l.slice_matrix(n, k).unwrap().nnz()).sum();
            assert_eq!(full.nnz(), total);
        }
    }

    #[test]
    fn growth_of_small_loop_spaces() {
        let b = loop_betti(&flm(S3), 10).unwrap();
        let g = growth_report(&b);
        let sums: Vec<u64> = g.partial_sums.iter().map(|(_, s)| *s).collect();
        assert_eq!(sums, vec![1, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10]);
        assert_eq!(g.class, GrowthClass::SubExponential);

        let b = loop_betti(&flm(S2), 10).unwrap();
        let g = growth_report(&b);
        let sums: Vec<u64> = g.partial_sums.iter().map(|(_, s)| *s).collect();
        assert_eq!(sums, (1..=11).collect::<Vec<u64>>());
        assert_eq!(g.class, GrowthClass::SubExponential);

        let mut zero = RankTable::new("zero", None);
        for n in 0..6 {
            zero.entries.insert(n, 0);
        }
        assert_eq!(growth_report(&zero).class, GrowthClass::Degenerate);
    }

    #[test]
    fn doubling_sequence_is_exponential() {
        let mut t = RankTable::new("doubling", None);
        for n in 0..12u32 {
            t.entries.insert(n, 1usize << n);
        }
        let g = growth_report(&t);
        assert_eq!(g.class, GrowthClass::Exponential);
        assert_eq!(g.ratios.last().unwrap().1, Some(ratio(4095, 2047)));
    }
}
