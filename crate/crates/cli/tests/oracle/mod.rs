//! A deliberately naive, self-contained implementation of the free loop model used as an
//! independent oracle: its own monomial enumeration, its own Koszul signs (derived by
//! expanding monomials into words of factors), and dense Gaussian elimination over `Q`.
//! Nothing here calls into the library under test.

#![allow(clippy::needless_range_loop)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

type Q = BigRational;
type Exps = Vec<u32>;
type Poly = BTreeMap<Exps, Q>;

pub struct LoopModel {
    degrees: Vec<u32>,
    /// Number of base generators; generators `nb..2nb` are the suspended copies.
    nb: usize,
    differential: Vec<Poly>,
}

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

impl LoopModel {
    /// `base` lists generator degrees in canonical order; `d` gives each differential as
    /// `(coefficient, exponents over the base generators)`.
    pub fn new(base: &[u32], d: &[Vec<(i64, Vec<u32>)>]) -> Self {
        let nb = base.len();
        let mut degrees = base.to_vec();
        degrees.extend(base.iter().map(|g| g - 1));
        let mut lm = LoopModel {
            degrees,
            nb,
            differential: Vec::new(),
        };
        let lift = |e: &[u32]| {
            let mut v = e.to_vec();
            v.resize(2 * nb, 0);
            v
        };
        let mut base_d: Vec<Poly> = Vec::new();
        for terms in d {
            let mut p = Poly::new();
            for (c, e) in terms {
                add(&mut p, lift(e), q(*c));
            }
            base_d.push(p);
        }
        // s: v_i -> sv_i, sv_i -> 0 (degree -1)
        let s: Vec<Poly> = (0..2 * nb)
            .map(|i| {
                let mut p = Poly::new();
                if i < nb {
                    let mut e = vec![0; 2 * nb];
                    e[nb + i] = 1;
                    p.insert(e, q(1));
                }
                p
            })
            .collect();
        let mut differential = base_d.clone();
        for dv in &base_d {
            let sdv = lm.apply(&s, 1, dv);
            differential.push(sdv.into_iter().map(|(e, c)| (e, -c)).collect());
        }
        lm.differential = differential;
        lm
    }

    fn odd(&self, g: usize) -> bool {
        self.degrees[g] % 2 == 1
    }

    fn degree(&self, e: &[u32]) -> u32 {
        e.iter().zip(&self.degrees).map(|(x, d)| x * d).sum()
    }

    /// Product of two monomials written left to right, with its Koszul sign.
    fn mul(&self, a: &[u32], b: &[u32]) -> Option<(i64, Exps)> {
        let mut sign = 1;
        for j in 0..a.len() {
            if b[j] == 0 || !self.odd(j) {
                continue;
            }
            // odd factor x_j of b moves left past the odd factors x_i (i > j) of a
            for i in j + 1..a.len() {
                if a[i] > 0 && self.odd(i) {
                    sign = -sign;
                }
            }
        }
        let out: Exps = a.iter().zip(b).map(|(x, y)| x + y).collect();
        if (0..out.len()).any(|g| self.odd(g) && out[g] > 1) {
            return None;
        }
        Some((sign, out))
    }

    /// Applies the derivation with the given generator images and parity.
    fn apply(&self, images: &[Poly], parity: u32, p: &Poly) -> Poly {
        let mut out = Poly::new();
        for (e, c) in p {
            let word: Vec<usize> = (0..e.len())
                .flat_map(|g| std::iter::repeat_n(g, e[g] as usize))
                .collect();
            for pos in 0..word.len() {
                let mut prefix = vec![0; e.len()];
                for &g in &word[..pos] {
                    prefix[g] += 1;
                }
                let mut suffix = vec![0; e.len()];
                for &g in &word[pos + 1..] {
                    suffix[g] += 1;
                }
                let koszul = if parity % 2 == 1 && self.degree(&prefix) % 2 == 1 {
                    -1
                } else {
                    1
                };
                for (t, tc) in &images[word[pos]] {
                    let Some((s1, m1)) = self.mul(&prefix, t) else {
                        continue;
                    };
                    let Some((s2, m2)) = self.mul(&m1, &suffix) else {
                        continue;
                    };
                    add(&mut out, m2, c * tc * q(koszul * s1 * s2));
                }
            }
        }
        out
    }

    fn word_length(&self, e: &[u32]) -> u32 {
        e[self.nb..].iter().sum()
    }

    /// Every monomial of total degree `n` and word length `k` (`None`: any word length).
    fn monomials(&self, n: u32, k: Option<u32>) -> Vec<Exps> {
        let mut out = Vec::new();
        let mut cur = vec![0; self.degrees.len()];
        self.enumerate(0, n, &mut cur, &mut out);
        out.retain(|e| k.is_none_or(|k| self.word_length(e) == k));
        out
    }

    fn enumerate(&self, g: usize, left: u32, cur: &mut Exps, out: &mut Vec<Exps>) {
        if g == self.degrees.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let d = self.degrees[g];
        let max = if d == 0 {
            0
        } else if self.odd(g) {
            1.min(left / d)
        } else {
            left / d
        };
        for x in 0..=max {
            cur[g] = x;
            self.enumerate(g + 1, left - x * d, cur, out);
        }
        cur[g] = 0;
    }

    fn matrix(&self, n: u32, k: Option<u32>) -> (Vec<Vec<Q>>, usize) {
        let src = self.monomials(n, k);
        let dst = self.monomials(n + 1, k);
        let index: BTreeMap<&Exps, usize> = dst.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let mut m = vec![vec![Q::zero(); src.len()]; dst.len()];
        for (col, e) in src.iter().enumerate() {
            let mut p = Poly::new();
            p.insert(e.clone(), Q::one());
            for (t, c) in self.apply(&self.differential, 1, &p) {
                m[index[&t]][col] = c;
            }
        }
        (m, src.len())
    }

    /// `dim H^n_{(k)}`, or the total `dim H^n` when `k` is `None`.
    pub fn betti(&self, n: u32, k: Option<u32>) -> usize {
        let (out, dim) = self.matrix(n, k);
        let incoming = if n == 0 {
            0
        } else {
            rank(self.matrix(n - 1, k).0)
        };
        dim - rank(out) - incoming
    }
}

fn add(p: &mut Poly, e: Exps, c: Q) {
    let entry = p.entry(e.clone()).or_insert_with(Q::zero);
    *entry += c;
    if entry.is_zero() {
        p.remove(&e);
    }
}

fn rank(mut m: Vec<Vec<Q>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in r + 1..rows {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &pivot;
            for j in c..cols {
                let v = &f * &m[r][j];
                m[i][j] -= v;
            }
        }
        r += 1;
    }
    r
}

/// Coefficients of `Π (1 + t^a)` over `odd` times `Π 1/(1 - t^b)` over `even`, through `n`.
pub fn hilbert_product(odd: &[u32], even: &[u32], n: u32) -> Vec<u64> {
    let mut c = vec![0u64; n as usize + 1];
    c[0] = 1;
    for &a in odd {
        for i in (a as usize..=n as usize).rev() {
            c[i] += c[i - a as usize];
        }
    }
    for &b in even {
        for i in b as usize..=n as usize {
            c[i] += c[i - b as usize];
        }
    }
    c
}
