//! The quotient loop model `(A ⊗ ΛsV, D̄)`, the duality map `Du : A -> A^∨`, the dual
//! complex `(A^∨ ⊗ sV, δ)`, and three independent routes to the ranks of
//! `π_*(Ω aut₁ M) ⊗ Q`:
//!
//! 1. word-length-one cohomology of the free loop model above degree `N`,
//! 2. cohomology of `(A ⊗ sV, D̄)` above degree `N`, cross-checked on `(A^∨ ⊗ sV, δ)`,
//! 3. homology of the positive-degree derivation complex of `(ΛV, d)`.
//!
//! `D̄(a ⊗ sv) = da ⊗ sv - (-1)^{|a|} a · (ρ⊗1)(s dv)`, extended to `A ⊗ ΛsV` as a
//! derivation. Writing `D̄(1 ⊗ sv) = Σ_i a_i ⊗ sv_i` with `sv_i ∈ sV`, the dual differential is
//!
//! ```text
//! δ(a_j^∨ ⊗ sv) = (-1)^{|a_j|} [ Σ_{i,l} α_il^j a_l^∨ ⊗ sv_i - Σ_r β_r^j a_r^∨ ⊗ sv ]
//! ```
//!
//! and `Du(a_i) = Σ_j α_ij^top a_j^∨`. Duals are graded by `|a^∨| = -|a|`, so `Du ⊗ 1` lowers
//! degree by `N`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactq::{self, rat, Rational, SparseMatrix, Vector};
use crate::freeloop::FreeLoopModel;
use crate::gca::{self, DerivationSpec, Element, GeneratorSet, Monomial};
use crate::pdquotient::{self, FiniteCdga, QuotientMap};
use crate::sullivan::{RankTable, SullivanModel};

type TensorKey = (usize, Monomial);
type TensorVec = BTreeMap<TensorKey, Rational>;

fn add_tensor(v: &mut TensorVec, key: TensorKey, c: Rational) {
    if c.is_zero() {
        return;
    }
    let entry = v.entry(key.clone()).or_insert_with(Rational::zero);
    *entry += c;
    if entry.is_zero() {
        v.remove(&key);
    }
}

fn parity_sign(odd: bool) -> Rational {
    if odd {
        rat(-1)
    } else {
        rat(1)
    }
}

/// `(A ⊗ ΛsV, D̄)` together with the projection `ρ ⊗ 1` from the free loop model.
#[derive(Debug, Clone)]
pub struct ExtendedQuotientModel {
    algebra: FiniteCdga,
    qmap: QuotientMap,
    suspended: GeneratorSet,
    /// `D̄(1 ⊗ sv)` per base generator; every term has word length one.
    loop_images: Vec<TensorVec>,
    n_max: u32,
    /// Trust bound inherited from the free loop model.
    trust: Option<u32>,
}

impl ExtendedQuotientModel {
    pub fn algebra(&self) -> &FiniteCdga {
        &self.algebra
    }

    pub fn suspended_generators(&self) -> &GeneratorSet {
        &self.suspended
    }

    pub fn formal_dimension(&self) -> u32 {
        self.algebra.formal_dimension()
    }

    /// Basis of `(A ⊗ Λ^k sV)^n`, sorted by `(index in A, monomial)`.
    pub fn basis(&self, n: u32, k: u32) -> Vec<TensorKey> {
        let mut out = Vec::new();
        for i in 0..self.algebra.dim() {
            let da = self.algebra.degree(i);
            if da > n {
                break;
            }
            for w in self.suspended.basis_of_degree(n - da) {
                if w.length() == k {
                    out.push((i, w));
                }
            }
        }
        out
    }

    /// `D̄(1 ⊗ w)` for a monomial `w ∈ ΛsV`.
    fn bar_on_suspended(&self, w: &Monomial) -> TensorVec {
        let mut out = TensorVec::new();
        let mut degree_before = 0u32;
        for g in 0..self.suspended.len() {
            let e = w.exponent(g);
            if e == 0 {
                continue;
            }
            let (low, high) = w.split_at(g);
            let mut left = Monomial::from_exponents(low.exponents().to_vec());
            let mut left_exps = left.exponents().to_vec();
            left_exps[g] = e - 1;
            left = Monomial::from_exponents(left_exps);
            let mut right_exps = high.exponents().to_vec();
            right_exps[g] = 0;
            let right = Monomial::from_exponents(right_exps);
            let left_degree = self.suspended.degree(&left);
            let outer = parity_sign(degree_before % 2 == 1) * rat(e as i64);
            for ((j, u), c) in &self.loop_images[g] {
                // (1 ⊗ L)(a_j ⊗ u)(1 ⊗ R) = (-1)^{|L||a_j|} a_j ⊗ L u R
                let s1 = parity_sign(left_degree % 2 == 1 && self.algebra.degree(*j) % 2 == 1);
                let Some((s2, lu)) = self.suspended.multiply(&left, u) else {
                    continue;
                };
                let Some((s3, m)) = self.suspended.multiply(&lu, &right) else {
                    continue;
                };
                add_tensor(&mut out, (*j, m), &outer * &s1 * rat((s2 * s3) as i64) * c);
            }
            degree_before += e * self.suspended.get(g).degree;
        }
        out
    }

    /// `D̄(a_i ⊗ w) = d a_i ⊗ w + (-1)^{|a_i|} (a_i ⊗ 1) · D̄(1 ⊗ w)`.
    pub fn apply(&self, i: usize, w: &Monomial) -> TensorVec {
        let mut out = TensorVec::new();
        for (j, c) in self.algebra.d(i) {
            add_tensor(&mut out, (*j, w.clone()), c.clone());
        }
        let sign = parity_sign(self.algebra.degree(i) % 2 == 1);
        for ((j, u), c) in self.bar_on_suspended(w) {
            for (l, a) in self.algebra.product(i, j) {
                add_tensor(&mut out, (*l, u.clone()), &sign * &c * a);
            }
        }
        out
    }

    /// `D̄ : (A ⊗ Λ^k sV)^n -> (A ⊗ Λ^k sV)^{n+1}`.
    pub fn slice_matrix(&self, n: u32, k: u32) -> Result<SparseMatrix> {
        let domain = self.basis(n, k);
        let codomain = self.basis(n + 1, k);
        tensor_matrix(&domain, &codomain, |(i, w)| self.apply(*i, w))
    }

    fn incoming(&self, n: u32, k: u32) -> Result<SparseMatrix> {
        if n == 0 {
            Ok(SparseMatrix::zeros(self.basis(0, k).len(), 0))
        } else {
            self.slice_matrix(n - 1, k)
        }
    }

    /// `ρ ⊗ 1 : (ΛV ⊗ Λ^k sV)^n -> (A ⊗ Λ^k sV)^n`.
    pub fn projection_matrix(&self, flm: &FreeLoopModel, n: u32, k: u32) -> Result<SparseMatrix> {
        let domain = flm.basis(n, k);
        let codomain = self.basis(n, k);
        let model = flm.base();
        let mut columns = Vec::with_capacity(domain.len());
        for m in &domain {
            columns.push(self.project(
                model,
                &Element::from_monomial(m.clone(), Rational::one()),
                flm,
            )?);
        }
        let mut mat = SparseMatrix::zeros(codomain.len(), domain.len());
        for (col, image) in columns.into_iter().enumerate() {
            for (key, c) in image {
                let row = codomain
                    .binary_search(&key)
                    .map_err(|_| Error::Internal("projection leaves the target slice".into()))?;
                mat.set(row, col, c);
            }
        }
        Ok(mat)
    }

    fn project(
        &self,
        model: &SullivanModel,
        e: &Element,
        flm: &FreeLoopModel,
    ) -> Result<TensorVec> {
        project_tensor(&self.qmap, model, flm, e)
    }

    /// `dim H^n(A ⊗ Λ^k sV, D̄)`.
    pub fn slice_cohomology(&self, n: u32, k: u32) -> Result<usize> {
        exactq::cohomology_dim(&self.slice_matrix(n, k)?, &self.incoming(n, k)?)
    }

    /// Largest total degree of `A ⊗ sV`.
    pub fn word_length_one_top(&self) -> u32 {
        let max_sv = self
            .suspended
            .generators()
            .iter()
            .map(|g| g.degree)
            .max()
            .unwrap_or(0);
        self.formal_dimension() + max_sv
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }
}

fn project_tensor(
    qmap: &QuotientMap,
    model: &SullivanModel,
    flm: &FreeLoopModel,
    e: &Element,
) -> Result<TensorVec> {
    let mut out = TensorVec::new();
    for (m, c) in e.terms() {
        let (b, w) = flm.split(m);
        let base = Element::from_monomial(b, Rational::one());
        for (i, x) in qmap.apply(model, &base)? {
            add_tensor(&mut out, (i, w.clone()), x * c);
        }
    }
    Ok(out)
}

fn tensor_matrix(
    domain: &[TensorKey],
    codomain: &[TensorKey],
    f: impl Fn(&TensorKey) -> TensorVec + Sync,
) -> Result<SparseMatrix> {
    let mut mat = SparseMatrix::zeros(codomain.len(), domain.len());
    for (col, key) in domain.iter().enumerate() {
        for (t, c) in f(key) {
            let row = codomain.binary_search(&t).map_err(|_| {
                Error::Internal("D̄ leaves the expected degree and word length".into())
            })?;
            mat.set(row, col, c);
        }
    }
    Ok(mat)
}

/// Builds `(A ⊗ ΛsV, D̄)` and checks `D̄² = 0` and that `ρ ⊗ 1` is a chain map on every
/// slice of degree `<= n_max`.
pub fn extend_to_quotient_loop(
    algebra: &FiniteCdga,
    qmap: &QuotientMap,
    flm: &FreeLoopModel,
    n_max: u32,
) -> Result<ExtendedQuotientModel> {
    let model = flm.base();
    let nb = flm.num_base_generators();
    let loop_images = (0..nb)
        .map(|g| project_tensor(qmap, model, flm, flm.loop_image(g)))
        .collect::<Result<Vec<_>>>()?;
    for (g, img) in loop_images.iter().enumerate() {
        if img.keys().any(|(_, w)| w.length() != 1) {
            return Err(Error::Internal(format!(
                "D̄(1 ⊗ s{}) leaves word length one",
                model.generators().get(g).name
            )));
        }
    }
    let eqm = ExtendedQuotientModel {
        algebra: algebra.clone(),
        qmap: qmap.clone(),
        suspended: flm.suspended_generators(),
        loop_images,
        n_max,
        trust: model.trusted_loop(),
    };

    let cells: Vec<(u32, u32)> = (0..=n_max)
        .flat_map(|n| (0..=n).map(move |k| (n, k)))
        .collect();
    cells.par_iter().try_for_each(|&(n, k)| -> Result<()> {
        let d0 = eqm.slice_matrix(n, k)?;
        let d1 = eqm.slice_matrix(n + 1, k)?;
        if !d1.mul(&d0).is_zero() {
            return Err(Error::DifferentialSquareNonzero(format!(
                "D̄² ≠ 0 on (A ⊗ Λ^{k} sV)^{n}"
            )));
        }
        let r0 = eqm.projection_matrix(flm, n, k)?;
        let r1 = eqm.projection_matrix(flm, n + 1, k)?;
        if r1.mul(&flm.slice_matrix(n, k)?) != d0.mul(&r0) {
            return Err(Error::ChainMapFailure(format!(
                "ρ⊗1 does not commute with the differentials on degree {n}, word length {k}"
            )));
        }
        Ok(())
    })?;
    Ok(eqm)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceComparison {
    pub degree: u32,
    pub word_length: u32,
    pub loop_dim: usize,
    pub quotient_dim: usize,
    pub induced_rank: usize,
}

impl SliceComparison {
    pub fn pass(&self) -> bool {
        self.loop_dim == self.quotient_dim && self.induced_rank == self.loop_dim
    }
}

/// Checks that `ρ ⊗ 1` induces isomorphisms on every `(n, k)` slice with `n` trusted.
pub fn verify_rho_tensor_quasi_iso(
    flm: &FreeLoopModel,
    eqm: &ExtendedQuotientModel,
    n_max: u32,
) -> Result<Vec<SliceComparison>> {
    let upto = flm.trusted_up_to(n_max.min(eqm.n_max));
    let cells: Vec<(u32, u32)> = (0..=upto)
        .flat_map(|n| (0..=n).map(move |k| (n, k)))
        .collect();
    let results: Vec<SliceComparison> = cells
        .par_iter()
        .map(|&(n, k)| -> Result<SliceComparison> {
            let up_out = flm.slice_matrix(n, k)?;
            let up_in = if n == 0 {
                SparseMatrix::zeros(up_out.cols(), 0)
            } else {
                flm.slice_matrix(n - 1, k)?
            };
            let reps = exactq::cohomology_representatives(&up_out, &up_in)?;
            let down_out = eqm.slice_matrix(n, k)?;
            let down_in = eqm.incoming(n, k)?;
            let quotient_dim = exactq::cohomology_dim(&down_out, &down_in)?;
            let r = eqm.projection_matrix(flm, n, k)?;
            let images: Vec<Vector> = reps.iter().map(|z| r.mul_vec(z)).collect();
            let boundaries: Vec<Vector> = (0..down_in.cols()).map(|c| down_in.column(c)).collect();
            let induced_rank = exactq::relative_rank(r.rows(), &boundaries, &images);
            Ok(SliceComparison {
                degree: n,
                word_length: k,
                loop_dim: reps.len(),
                quotient_dim,
                induced_rank,
            })
        })
        .collect::<Result<_>>()?;
    if let Some(bad) = results.iter().find(|c| !c.pass()) {
        return Err(Error::QuasiIsoFailure {
            locus: format!("(n, k) = ({}, {})", bad.degree, bad.word_length),
            detail: format!(
                "loop dim {}, quotient dim {}, induced rank {}",
                bad.loop_dim, bad.quotient_dim, bad.induced_rank
            ),
        });
    }
    Ok(results)
}

/// `Du` as an `n x n` matrix: column `i` holds the coordinates of `Du(a_i)` in the dual
/// basis.
#[derive(Debug, Clone)]
pub struct DualityMap {
    pub matrix: SparseMatrix,
    /// Whether `Du` is already invertible before passing to cohomology.
    pub invertible_on_cochains: bool,
    /// Rank of the cup pairing `H^k(A) x H^{N-k}(A) -> Q`, per `k`.
    pub cohomology_pairing_ranks: Vec<(u32, usize)>,
}

/// `Du(a_i) = Σ_j α_ij^top a_j^∨`. Fails with [`Error::SingularDuality`] unless the induced
/// pairing on `H(A)` is perfect.
pub fn duality_map(a: &FiniteCdga) -> Result<DualityMap> {
    let n = a.dim();
    let top = a.top_index();
    let mut matrix = SparseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            matrix.set(j, i, a.alpha(i, j, top));
        }
    }
    let invertible_on_cochains = exactq::rank(&matrix) == n;

    let big_n = a.formal_dimension();
    let reps: Vec<Vec<Vector>> = (0..=big_n)
        .map(|k| pdquotient::quotient_cohomology(a, k).map(|(r, _)| r))
        .collect::<Result<_>>()?;
    let mut ranks = Vec::new();
    for k in 0..=big_n {
        let (lo, hi) = (&reps[k as usize], &reps[(big_n - k) as usize]);
        if lo.len() != hi.len() {
            return Err(Error::SingularDuality { degree: k });
        }
        let (rk, rd) = (a.degree_range(k), a.degree_range(big_n - k));
        let mut pairing = SparseMatrix::zeros(lo.len(), hi.len());
        for (p, x) in lo.iter().enumerate() {
            for (q, y) in hi.iter().enumerate() {
                let mut value = Rational::zero();
                for (i, xi) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                    for (j, yj) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                        value += xi * yj * a.alpha(rk.start + i, rd.start + j, top);
                    }
                }
                pairing.set(p, q, value);
            }
        }
        let r = exactq::rank(&pairing);
        if r != lo.len() {
            return Err(Error::SingularDuality { degree: k });
        }
        ranks.push((k, r));
    }
    Ok(DualityMap {
        matrix,
        invertible_on_cochains,
        cohomology_pairing_ranks: ranks,
    })
}

/// `d^∨(a_i^∨) = -(-1)^{|a_i|} Σ_j β_j^i a_j^∨`, as an `n x n` matrix over the dual basis.
pub fn dual_differential(a: &FiniteCdga) -> SparseMatrix {
    let n = a.dim();
    let mut m = SparseMatrix::zeros(n, n);
    for i in 0..n {
        let s = -parity_sign(a.degree(i) % 2 == 1);
        for j in 0..n {
            let b = a.beta(j, i);
            if !b.is_zero() {
                m.set(j, i, &s * b);
            }
        }
    }
    m
}

/// `Du ∘ d_A = (-1)^N d^∨ ∘ Du` on the whole of `A`.
pub fn check_dual_differential(a: &FiniteCdga, du: &DualityMap) -> Result<()> {
    let n = a.dim();
    let mut d = SparseMatrix::zeros(n, n);
    for i in 0..n {
        for (j, c) in a.d(i) {
            d.set(*j, i, c.clone());
        }
    }
    let dual = dual_differential(a);
    let left = du.matrix.mul(&d);
    let right = dual
        .mul(&du.matrix)
        .scaled(&parity_sign(a.formal_dimension() % 2 == 1));
    if left != right || !dual.mul(&dual).is_zero() {
        return Err(Error::SignIdentityFailure { degree: 0 });
    }
    Ok(())
}

/// `(A^∨ ⊗ sV, δ)` in every degree where it is nonzero, with the matrices of `Du ⊗ 1`.
#[derive(Debug, Clone)]
pub struct DualSectionComplex {
    pub formal_dimension: u32,
    /// Basis per degree `p`: pairs `(j, g)` standing for `a_j^∨ ⊗ s v_g`.
    pub bases: BTreeMap<i64, Vec<(usize, usize)>>,
    /// `δ : degree p -> degree p + 1`.
    pub delta: BTreeMap<i64, SparseMatrix>,
    /// `Du ⊗ 1 : (A ⊗ sV)^m -> (A^∨ ⊗ sV)^{m - N}`, keyed by `m`.
    pub du: BTreeMap<u32, SparseMatrix>,
    /// `D̄` on `(A ⊗ sV)^m`, keyed by `m`.
    pub d_bar: BTreeMap<u32, SparseMatrix>,
    /// Degrees `m` where `δ ∘ (Du ⊗ 1) = (-1)^N (Du ⊗ 1) ∘ D̄` was checked.
    pub sign_identity_checked: Vec<u32>,
}

impl DualSectionComplex {
    pub fn basis(&self, p: i64) -> &[(usize, usize)] {
        self.bases.get(&p).map_or(&[], Vec::as_slice)
    }

    fn delta_or_zero(&self, p: i64) -> SparseMatrix {
        self.delta
            .get(&p)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zeros(self.basis(p + 1).len(), self.basis(p).len()))
    }

    /// `dim H^p(A^∨ ⊗ sV, δ)`.
    pub fn cohomology_dim(&self, p: i64) -> Result<usize> {
        exactq::cohomology_dim(&self.delta_or_zero(p), &self.delta_or_zero(p - 1))
    }
}

/// Builds `δ` from the explicit formula, verifies `δ² = 0` and the sign identity
/// `δ ∘ (Du ⊗ 1) = (-1)^N (Du ⊗ 1) ∘ D̄` on every degree of `A ⊗ sV`.
pub fn build_dual_complex(
    a: &FiniteCdga,
    eqm: &ExtendedQuotientModel,
) -> Result<DualSectionComplex> {
    let big_n = a.formal_dimension() as i64;
    let sv = eqm.suspended_generators();
    let num_sv = sv.len();
    let dual_degree = |j: usize, g: usize| sv.get(g).degree as i64 - a.degree(j) as i64;

    let mut bases: BTreeMap<i64, Vec<(usize, usize)>> = BTreeMap::new();
    for j in 0..a.dim() {
        for g in 0..num_sv {
            bases.entry(dual_degree(j, g)).or_default().push((j, g));
        }
    }
    for b in bases.values_mut() {
        b.sort();
    }

    // sv_i read off from D̄(1 ⊗ sv) = Σ_i a_i ⊗ sv_i
    let sv_index = |w: &Monomial| {
        (0..num_sv)
            .find(|&h| w.exponent(h) == 1)
            .expect("word length one")
    };
    let expansions: Vec<Vec<(usize, usize, Rational)>> = eqm
        .loop_images
        .iter()
        .map(|img| {
            img.iter()
                .map(|((i, w), c)| (*i, sv_index(w), c.clone()))
                .collect()
        })
        .collect();

    let mut delta = BTreeMap::new();
    for (&p, domain) in &bases {
        let empty = Vec::new();
        let codomain = bases.get(&(p + 1)).unwrap_or(&empty);
        let mut m = SparseMatrix::zeros(codomain.len(), domain.len());
        for (col, &(j, g)) in domain.iter().enumerate() {
            let s = parity_sign(a.degree(j) % 2 == 1);
            let mut image: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
            for (i, h, c) in &expansions[g] {
                for l in 0..a.dim() {
                    let alpha = a.alpha(*i, l, j);
                    if !alpha.is_zero() {
                        *image.entry((l, *h)).or_insert_with(Rational::zero) += &s * c * alpha;
                    }
                }
            }
            for r in 0..a.dim() {
                let beta = a.beta(r, j);
                if !beta.is_zero() {
                    *image.entry((r, g)).or_insert_with(Rational::zero) -= &s * beta;
                }
            }
            for (key, c) in image {
                if c.is_zero() {
                    continue;
                }
                let row = codomain
                    .binary_search(&key)
                    .map_err(|_| Error::Internal("δ leaves its degree".into()))?;
                m.set(row, col, c);
            }
        }
        delta.insert(p, m);
    }

    for (&p, m) in &delta {
        if let Some(next) = delta.get(&(p + 1)) {
            if !next.mul(m).is_zero() {
                return Err(Error::DifferentialSquareNonzero(format!(
                    "δ² ≠ 0 in degree {p}"
                )));
            }
        }
    }

    let top = a.top_index();
    let sign_n = parity_sign(big_n % 2 == 1);
    let m_top = eqm.word_length_one_top();
    let mut du = BTreeMap::new();
    let mut d_bar = BTreeMap::new();
    for m in 0..=m_top + 1 {
        let domain = eqm.basis(m, 1);
        let p = m as i64 - big_n;
        let empty = Vec::new();
        let codomain = bases.get(&p).unwrap_or(&empty);
        let mut mat = SparseMatrix::zeros(codomain.len(), domain.len());
        for (col, (i, w)) in domain.iter().enumerate() {
            let g = sv_index(w);
            for j in 0..a.dim() {
                let alpha = a.alpha(*i, j, top);
                if alpha.is_zero() {
                    continue;
                }
                let row = codomain
                    .binary_search(&(j, g))
                    .map_err(|_| Error::Internal("Du ⊗ 1 leaves its degree".into()))?;
                mat.set(row, col, alpha);
            }
        }
        du.insert(m, mat);
        d_bar.insert(m, eqm.slice_matrix(m, 1)?);
    }

    let complex = DualSectionComplex {
        formal_dimension: a.formal_dimension(),
        bases,
        delta,
        du,
        d_bar,
        sign_identity_checked: Vec::new(),
    };
    let mut checked = Vec::new();
    for m in 0..=m_top {
        let p = m as i64 - big_n;
        let left = complex.delta_or_zero(p).mul(&complex.du[&m]);
        let right = complex.du[&(m + 1)].mul(&complex.d_bar[&m]).scaled(&sign_n);
        if left != right {
            return Err(Error::SignIdentityFailure { degree: m as i64 });
        }
        checked.push(m);
    }
    Ok(DualSectionComplex {
        sign_identity_checked: checked,
        ..complex
    })
}

/// Checks that `Du ⊗ 1` induces an isomorphism `H^m(A ⊗ sV) -> H^{m-N}(A^∨ ⊗ sV)` in every
/// degree. Returns `(m, rank)` pairs.
pub fn verify_duality_quasi_iso(
    eqm: &ExtendedQuotientModel,
    dual: &DualSectionComplex,
) -> Result<Vec<(u32, usize)>> {
    let big_n = dual.formal_dimension as i64;
    let mut out = Vec::new();
    for m in 0..=eqm.word_length_one_top() {
        let reps = exactq::cohomology_representatives(&dual.d_bar[&m], &eqm.incoming(m, 1)?)?;
        let p = m as i64 - big_n;
        let incoming = dual.delta_or_zero(p - 1);
        let images: Vec<Vector> = reps.iter().map(|z| dual.du[&m].mul_vec(z)).collect();
        let boundaries: Vec<Vector> = (0..incoming.cols()).map(|c| incoming.column(c)).collect();
        let rank = exactq::relative_rank(dual.basis(p).len(), &boundaries, &images);
        let target = dual.cohomology_dim(p)?;
        if rank != reps.len() || target != reps.len() {
            return Err(Error::QuasiIsoFailure {
                locus: format!("Du ⊗ 1 in degree {m}"),
                detail: format!(
                    "source {}, target {}, induced rank {rank}",
                    reps.len(),
                    target
                ),
            });
        }
        out.push((m, rank));
    }
    Ok(out)
}

/// Ranks of `π_n(Ω aut₁ M) ⊗ Q = dim H^{n+N}(A ⊗ sV, D̄)` for `1 <= n <= n_max - N`,
/// cross-checked on the dual complex.
pub fn aut_rank_table(
    eqm: &ExtendedQuotientModel,
    dual: &DualSectionComplex,
    n_max: u32,
) -> Result<RankTable> {
    let big_n = eqm.formal_dimension();
    let trusted = eqm.qmap_trust(n_max);
    let mut table = RankTable::new(
        "pi_n(Omega aut_1 M)",
        trusted.map(|t| t.saturating_sub(big_n)),
    );
    for n in 1..=n_max.saturating_sub(big_n) {
        let direct = eqm.slice_cohomology(n + big_n, 1)?;
        let dual_dim = dual.cohomology_dim(n as i64)?;
        if direct != dual_dim {
            return Err(Error::DualMismatch {
                degree: n,
                direct,
                dual: dual_dim,
            });
        }
        table.entries.insert(n, direct);
    }
    Ok(table)
}

/// `dim H^m(A ⊗ sV, D̄)` for `m <= N`. These classes carry no homotopy interpretation.
pub fn low_degree_classes(eqm: &ExtendedQuotientModel) -> Result<RankTable> {
    let mut t = RankTable::new("low-degree H^(1)", None);
    for m in 0..=eqm.formal_dimension() {
        t.entries.insert(m, eqm.slice_cohomology(m, 1)?);
    }
    Ok(t)
}

impl ExtendedQuotientModel {
    fn qmap_trust(&self, n_max: u32) -> Option<u32> {
        Some(self.trust.map_or(n_max, |t| t.min(n_max)))
    }
}

// ---------------------------------------------------------------------------------------
// Derivation complex

/// Basis of `Der_m(ΛV)`: a generator together with a monomial of degree `|v| - m`.
fn derivation_basis(model: &SullivanModel, m: u32) -> Vec<(usize, Monomial)> {
    let gens = model.generators();
    let mut out = Vec::new();
    for (g, gen) in gens.generators().iter().enumerate() {
        if gen.degree >= m {
            for mono in model.basis(gen.degree - m) {
                out.push((g, mono));
            }
        }
    }
    out
}

/// Matrix of `θ ↦ d∘θ - (-1)^{|θ|} θ∘d` from `Der_m` to `Der_{m-1}` (`m >= 1`).
pub fn derivation_differential(model: &SullivanModel, m: u32) -> Result<SparseMatrix> {
    let gens = model.generators();
    let domain = derivation_basis(model, m);
    let codomain = derivation_basis(model, m - 1);
    let index: BTreeMap<(usize, Monomial), usize> = codomain
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, key)| (key, i))
        .collect();
    let sign = parity_sign(m % 2 == 1);
    let mut mat = SparseMatrix::zeros(codomain.len(), domain.len());
    for (col, (g, mono)) in domain.iter().enumerate() {
        let mut images = vec![Some(Element::zero()); gens.len()];
        images[*g] = Some(Element::from_monomial(mono.clone(), Rational::one()));
        let theta = DerivationSpec::new(gens, -(m as i32), images)?;
        for (v, _) in gens.generators().iter().enumerate() {
            let mut value = if v == *g {
                model.apply_d(&Element::from_monomial(mono.clone(), Rational::one()))?
            } else {
                Element::zero()
            };
            let dv = model
                .differential()
                .image(v)
                .cloned()
                .unwrap_or_else(Element::zero);
            let theta_dv = gca::apply_derivation(gens, &theta, &dv)?;
            value.add_scaled(&theta_dv, &-sign.clone());
            for (t, c) in value.terms() {
                let row = *index.get(&(v, t.clone())).ok_or_else(|| {
                    Error::Internal("derivation differential leaves its degree".into())
                })?;
                mat.set(row, col, c.clone());
            }
        }
    }
    Ok(mat)
}

/// `dim H_m(Der(ΛV), [d, -])` for `1 <= m <= n_max`; in degree 1 every cycle counts.
pub fn derivation_oracle(model: &SullivanModel, n_max: u32) -> Result<RankTable> {
    model.ensure_valid()?;
    let trusted = model
        .trusted_loop()
        .map(|t| (t + 1).saturating_sub(model.formal_dimension()));
    let mut table = RankTable::new("H(Der)", trusted.map(|t| t.min(n_max)).or(Some(n_max)));
    let ranks: Vec<usize> = (1..=n_max + 1)
        .into_par_iter()
        .map(|m| derivation_differential(model, m).map(|d| exactq::rank(&d)))
        .collect::<Result<_>>()?;
    for m in 1..=n_max {
        let dim = derivation_basis(model, m).len();
        let out_rank = ranks[(m - 1) as usize];
        let in_rank = ranks[m as usize];
        table.entries.insert(m, dim - out_rank - in_rank);
    }
    Ok(table)
}

// ---------------------------------------------------------------------------------------
// Theorem check

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremRow {
    pub n: u32,
    pub loop_rank: usize,
    pub quotient_rank: usize,
    pub derivation_rank: usize,
    pub trusted: bool,
}

impl TheoremRow {
    pub fn pass(&self) -> bool {
        self.loop_rank == self.quotient_rank && self.quotient_rank == self.derivation_rank
    }
}

#[derive(Debug, Clone)]
pub struct TheoremReport {
    pub rows: Vec<TheoremRow>,
    pub loop_table: RankTable,
    pub aut_table: RankTable,
    pub derivation_table: RankTable,
}

/// Compares `dim H^{n+N}_{(1)}` of the free loop model, `dim H^{n+N}(A ⊗ sV)` and
/// `dim H_{n+1}(Der)` for `1 <= n <= n_max - N`.
pub fn verify_theorems(model: &SullivanModel, n_max: u32) -> Result<TheoremReport> {
    let flm = crate::freeloop::build_free_loop_model(model)?;
    let (a, qmap) = pdquotient::build_quotient(model)?;
    let eqm = extend_to_quotient_loop(&a, &qmap, &flm, n_max)?;
    let dual = build_dual_complex(&a, &eqm)?;
    theorem_rows(model, &flm, &eqm, &dual, n_max)
}

pub fn theorem_rows(
    model: &SullivanModel,
    flm: &FreeLoopModel,
    eqm: &ExtendedQuotientModel,
    dual: &DualSectionComplex,
    n_max: u32,
) -> Result<TheoremReport> {
    let big_n = model.formal_dimension();
    let aut_table = aut_rank_table(eqm, dual, n_max)?;
    let derivation_table = derivation_oracle(model, n_max.saturating_sub(big_n) + 1)?;
    let mut loop_table = RankTable::new("H^(1)(LM)", Some(flm.trusted_up_to(n_max)));
    let mut rows = Vec::new();
    for n in 1..=n_max.saturating_sub(big_n) {
        let d = n + big_n;
        let d_out = flm.slice_matrix(d, 1)?;
        let d_in = flm.slice_matrix(d - 1, 1)?;
        let loop_rank = exactq::cohomology_dim(&d_out, &d_in)?;
        loop_table.entries.insert(d, loop_rank);
        rows.push(TheoremRow {
            n,
            loop_rank,
            quotient_rank: aut_table.get(n),
            derivation_rank: derivation_table.get(n + 1),
            trusted: aut_table.is_trusted(n),
        });
    }
    if let Some(bad) = rows.iter().find(|r| r.trusted && !r.pass()) {
        return Err(Error::TheoremMismatch {
            degree: bad.n,
            loop_rank: bad.loop_rank,
            quotient_rank: bad.quotient_rank,
            derivation_rank: bad.derivation_rank,
        });
    }
    Ok(TheoremReport {
        rows,
        loop_table,
        aut_table,
        derivation_table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freeloop::build_free_loop_model;
    use crate::pdquotient::build_quotient;
    use crate::sullivan::parse_model;

    const S2: &str = "model S2\ngen x 2\ngen y 3\nd y = x^2\ndim 2\ncomplete\n";
    const CP2: &str = "model CP2\ngen x 2\ngen y 5\nd y = x^3\ndim 4\ncomplete\n";
    const S3: &str = "model S3\ngen x 3\ndim 3\ncomplete\n";
    const S2XS3: &str = "model S2xS3\ngen x 2\ngen y 3\ngen z 3\nd y = x^2\ndim 5\ncomplete\n";

    struct Pipeline {
        flm: FreeLoopModel,
        a: FiniteCdga,
        eqm: ExtendedQuotientModel,
        dual: DualSectionComplex,
    }

    fn pipeline(text: &str, n_max: u32) -> Pipeline {
        let model = parse_model(text).unwrap();
        let flm = build_free_loop_model(&model).unwrap();
        let (a, qmap) = build_quotient(&model).unwrap();
        let eqm = extend_to_quotient_loop(&a, &qmap, &flm, n_max).unwrap();
        let dual = build_dual_complex(&a, &eqm).unwrap();
        Pipeline { flm, a, eqm, dual }
    }

    fn sx(len: usize, g: usize) -> Monomial {
        Monomial::generator(len, g)
    }

    #[test]
    fn bar_differential_on_suspended_generators() {
        let p = pipeline(CP2, 8);
        // D̄(1 ⊗ sy) = -3 x^2 ⊗ sx
        let img = &p.eqm.loop_images[1];
        assert_eq!(img.len(), 1);
        assert_eq!(img.get(&(2, sx(2, 0))), Some(&rat(-3)));
        assert!(p.eqm.loop_images[0].is_empty());

        let p = pipeline(S2, 6);
        let img = &p.eqm.loop_images[1];
        assert_eq!(img.len(), 1);
        assert_eq!(img.get(&(1, sx(2, 0))), Some(&rat(-2)));
    }

    #[test]
    fn duality_map_of_truncated_polynomial() {
        let p = pipeline(CP2, 6);
        let du = duality_map(&p.a).unwrap();
        assert!(du.invertible_on_cochains);
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i + j == 2 { rat(1) } else { rat(0) };
                assert_eq!(du.matrix.get(j, i), expected, "Du({i}) at {j}");
            }
        }
        check_dual_differential(&p.a, &du).unwrap();
    }

    #[test]
    fn duality_map_of_s2xs3_is_singular_on_cochains_only() {
        let p = pipeline(S2XS3, 8);
        let du = duality_map(&p.a).unwrap();
        assert!(!du.invertible_on_cochains);
        assert_eq!(
            du.cohomology_pairing_ranks,
            vec![(0, 1), (1, 0), (2, 1), (3, 1), (4, 0), (5, 1)]
        );
        check_dual_differential(&p.a, &du).unwrap();
    }

    #[test]
    fn dual_complex_squares_to_zero_and_intertwines() {
        for text in [S2, CP2, S3, S2XS3] {
            let p = pipeline(text, 10);
            assert_eq!(
                p.dual.sign_identity_checked.len() as u32,
                p.eqm.word_length_one_top() + 1
            );
            let ranks = verify_duality_quasi_iso(&p.eqm, &p.dual).unwrap();
            assert!(!ranks.is_empty());
        }
    }

    #[test]
    fn rho_tensor_one_is_a_quasi_isomorphism() {
        for text in [S2, CP2, S2XS3] {
            let p = pipeline(text, 9);
            let cmp = verify_rho_tensor_quasi_iso(&p.flm, &p.eqm, 9).unwrap();
            assert!(cmp.iter().all(SliceComparison::pass));
        }
    }

    #[test]
    fn aut_ranks_of_spheres_and_cp2() {
        let p = pipeline(S2, 8);
        let t = aut_rank_table(&p.eqm, &p.dual, 8).unwrap();
        assert_eq!(t.dense(6), vec![0, 0, 1, 0, 0, 0, 0]);

        let p = pipeline(S3, 9);
        let t = aut_rank_table(&p.eqm, &p.dual, 9).unwrap();
        assert_eq!(t.dense(6), vec![0, 0, 1, 0, 0, 0, 0]);

        let p = pipeline(CP2, 10);
        let t = aut_rank_table(&p.eqm, &p.dual, 10).unwrap();
        assert_eq!(t.dense(6), vec![0, 0, 1, 0, 1, 0, 0]);
    }

    #[test]
    fn derivation_oracle_values() {
        let t = derivation_oracle(&parse_model(S2).unwrap(), 6).unwrap();
        assert_eq!(t.dense(6)[1..].to_vec(), vec![0, 0, 1, 0, 0, 0]);
        let t = derivation_oracle(&parse_model(CP2).unwrap(), 7).unwrap();
        assert_eq!(t.dense(7)[1..].to_vec(), vec![0, 0, 1, 0, 1, 0, 0]);
        let t = derivation_oracle(&parse_model(S3).unwrap(), 6).unwrap();
        assert_eq!(t.dense(6)[1..].to_vec(), vec![0, 0, 1, 0, 0, 0]);
    }

    #[test]
    fn three_routes_agree() {
        for (text, n_max) in [(S2, 10), (CP2, 12), (S3, 10), (S2XS3, 12)] {
            let model = parse_model(text).unwrap();
            let report = verify_theorems(&model, n_max).unwrap();
            assert!(report.rows.iter().all(TheoremRow::pass));
            assert_eq!(report.rows.len() as u32, n_max - model.formal_dimension());
        }
    }

    #[test]
    fn low_degree_classes_are_reported_separately() {
        let p = pipeline(S2, 6);
        let low = low_degree_classes(&p.eqm).unwrap();
        assert_eq!(low.entries.len(), 3);
    }
}
