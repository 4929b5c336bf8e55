//! One function per subcommand. Each fills a [`Report`] and returns the first error it
//! meets; the caller turns that error into a failed verdict and an exit code.

use autloop_core::freeloop::{self, hodge_betti_table, loop_betti_checked};
use autloop_core::pdquotient::{self, structure_identities, verify_quasi_iso};
use autloop_core::sections::{self, SliceComparison};
use autloop_core::sullivan::{self, check_poincare_duality, cohomology_table, duality_window};
use autloop_core::{
    build_free_loop_model, build_quotient, Error, FiniteCdga, Rational, Result, SullivanModel,
};

use crate::report::{Report, Table};

/// Test hook: overwrite one structure constant `α_ij^k` of the quotient before it is checked.
#[derive(Debug, Clone)]
pub struct Corruption {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: Rational,
}

impl std::str::FromStr for Corruption {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err("expected I,J,K,VALUE".into());
        }
        let index = |p: &str| {
            p.parse::<usize>()
                .map_err(|e| format!("bad index `{p}`: {e}"))
        };
        Ok(Corruption {
            i: index(parts[0])?,
            j: index(parts[1])?,
            k: index(parts[2])?,
            value: parts[3]
                .parse::<Rational>()
                .map_err(|e| format!("bad value `{}`: {e}", parts[3]))?,
        })
    }
}

pub struct Options {
    pub max_degree: u32,
    pub growth: bool,
    pub corrupt_alpha: Option<Corruption>,
}

/// Default `n_max = N + 8`; the aut table needs at least `N + 2`.
pub fn default_max_degree(model: &SullivanModel) -> u32 {
    model.formal_dimension() + 8
}

pub fn clamp_for_aut(model: &SullivanModel, n: u32) -> u32 {
    n.max(model.formal_dimension() + 2)
}

pub fn validate(model: &SullivanModel, report: &mut Report) -> Result<()> {
    report.stage("validation");
    let v = model.validate();
    for c in &v.checks {
        report.verdict(&c.name, None, c.pass);
        if !c.pass {
            report.note(format!("{}: {}", c.name, c.detail));
        }
    }
    if !v.passed() {
        return Err(model.ensure_valid().expect_err("report failed"));
    }
    let window = duality_window(model);
    report.table(
        "H(M)",
        Table::from_rank_table(&cohomology_table(model, window)?, 0, window),
    );
    report.stage("poincare duality");
    let fc = check_poincare_duality(model)?;
    for block in &fc.pairings {
        let pass = block.rank == fc.dims[block.degree as usize];
        report.verdict("cup pairing perfect", Some(block.degree as i64), pass);
    }
    report.verdict("poincare duality", None, true);
    report.note(format!(
        "fundamental class in degree {}: {}",
        fc.formal_dimension,
        model.generators().format_element(&fc.representative)
    ));
    Ok(())
}

pub fn betti(model: &SullivanModel, opts: &Options, report: &mut Report) -> Result<()> {
    report.stage("free loop model");
    let flm = build_free_loop_model(model)?;
    let n = opts.max_degree;
    report.stage("loop betti numbers");
    let hodge = hodge_betti_table(&flm, n)?;
    let total = loop_betti_checked(&flm, &hodge)?;
    report.table("H(LM)", Table::from_rank_table(&total, 0, n));
    report.verdict("hodge pieces sum to the total", None, true);
    if opts.growth {
        let g = freeloop::growth_report(&total);
        let mut sums = Table {
            values: vec![None; n as usize + 1],
            trusted_up_to: total.trusted_up_to,
        };
        for (d, s) in &g.partial_sums {
            sums.values[*d as usize] = Some(*s);
        }
        report.table("partial sums H(LM)", sums);
        report.note(format!(
            "growth: {} over degrees 0..={}",
            g.class.label(),
            g.window_end
        ));
        for (d, r) in &g.ratios {
            if let Some(r) = r {
                report.note(format!("growth ratio s_{d}/s_{}: {r}", d - 1));
            }
        }
        if let Some((max, min)) = g.root_bounds {
            report.note(format!(
                "growth root bounds s_n^(1/n) (floating point, observational): max {max:.6}, min {min:.6}"
            ));
        }
    }
    Ok(())
}

pub fn hodge(model: &SullivanModel, opts: &Options, report: &mut Report) -> Result<()> {
    report.stage("free loop model");
    let flm = build_free_loop_model(model)?;
    let n = opts.max_degree;
    report.stage("hodge table");
    let hodge = hodge_betti_table(&flm, n)?;
    let total = loop_betti_checked(&flm, &hodge)?;
    for k in 0..=hodge.max_word_length() {
        report.table(
            &format!("H_({k})(LM)"),
            Table::from_rank_table(&hodge.word_length_table(k), 0, n),
        );
    }
    report.table("H(LM)", Table::from_rank_table(&total, 0, n));
    report.verdict("hodge pieces sum to the total", None, true);
    Ok(())
}

fn quotient_with_hook(
    model: &SullivanModel,
    opts: &Options,
    report: &mut Report,
) -> Result<(FiniteCdga, pdquotient::QuotientMap)> {
    report.stage("poincare duality");
    let (mut a, qmap) = build_quotient(model)?;
    if let Some(c) = &opts.corrupt_alpha {
        if c.i.max(c.j).max(c.k) >= a.dim() {
            return Err(Error::Internal(format!(
                "corruption index out of range for an algebra of dimension {}",
                a.dim()
            )));
        }
        report.note(format!(
            "structure constant alpha({},{},{}) overwritten with {}",
            c.i, c.j, c.k, c.value
        ));
        a.corrupt_alpha(c.i, c.j, c.k, c.value.clone());
    }
    Ok((a, qmap))
}

fn identity_checks(a: &FiniteCdga, report: &mut Report) -> Result<()> {
    report.stage("structure identities");
    let counts = structure_identities(a)?;
    report.verdict("graded commutativity", None, true);
    report.verdict("associativity", None, true);
    report.verdict("leibniz rule", None, true);
    report.verdict("d^2 = 0 on A", None, true);
    report.note(format!(
        "identity instances checked: commutativity {}, associativity {}, leibniz {}, d^2 {}",
        counts.commutativity, counts.associativity, counts.leibniz, counts.square_zero
    ));
    Ok(())
}

fn quasi_iso_checks(
    model: &SullivanModel,
    a: &FiniteCdga,
    qmap: &pdquotient::QuotientMap,
    n: u32,
    report: &mut Report,
) -> Result<()> {
    report.stage("rho quasi-isomorphism");
    let qi = verify_quasi_iso(model, a, qmap, n)?;
    let mut base = Table {
        values: vec![None; n as usize + 1],
        trusted_up_to: model.trusted_base(),
    };
    let mut quotient = base.clone();
    for d in &qi.degrees {
        base.values[d.degree as usize] = Some(d.base_dim as u64);
        quotient.values[d.degree as usize] = Some(d.quotient_dim as u64);
        report.verdict("rho quasi-isomorphism", Some(d.degree as i64), d.pass());
    }
    report.table("H(M)", base);
    report.table("H(A)", quotient);

    report.stage("ideal acyclic");
    let ideal = pdquotient::ideal_cohomology(model, qmap, qi.checked_up_to)?;
    report.table("H(I)", Table::from_rank_table(&ideal, 0, qi.checked_up_to));
    for d in 0..=qi.checked_up_to {
        report.verdict("ideal acyclic", Some(d as i64), ideal.get(d) == 0);
    }
    if let Some(d) = (0..=qi.checked_up_to).find(|&d| ideal.get(d) != 0) {
        return Err(Error::QuasiIsoFailure {
            locus: format!("degree {d}"),
            detail: "the ideal has nonzero cohomology".into(),
        });
    }
    Ok(())
}

fn describe_algebra(a: &FiniteCdga, report: &mut Report) {
    let n = a.formal_dimension();
    let mut dims = Table {
        values: vec![None; n as usize + 1],
        trusted_up_to: None,
    };
    for k in 0..=n {
        dims.values[k as usize] = Some(a.degree_range(k).len() as u64);
    }
    report.table("A", dims);
    for i in 0..a.dim() {
        report.note(format!("a{i} = {} (degree {})", a.label(i), a.degree(i)));
    }
    let show = |v: &pdquotient::SparseVec| {
        v.iter()
            .map(|(k, c)| format!("{c}*a{k}"))
            .collect::<Vec<_>>()
            .join(" + ")
    };
    for i in 1..a.dim() {
        for j in i..a.dim() {
            let p = a.product(i, j);
            if !p.is_empty() {
                report.note(format!("a{i} * a{j} = {}", show(p)));
            }
        }
    }
    for i in 0..a.dim() {
        if !a.d(i).is_empty() {
            report.note(format!("d a{i} = {}", show(a.d(i))));
        }
    }
}

pub fn quotient(model: &SullivanModel, opts: &Options, report: &mut Report) -> Result<()> {
    let (a, qmap) = quotient_with_hook(model, opts, report)?;
    describe_algebra(&a, report);
    identity_checks(&a, report)?;
    quasi_iso_checks(model, &a, &qmap, opts.max_degree, report)
}

struct Pipeline {
    flm: autloop_core::FreeLoopModel,
    a: FiniteCdga,
    eqm: autloop_core::ExtendedQuotientModel,
    dual: autloop_core::DualSectionComplex,
}

fn build_sections(
    model: &SullivanModel,
    a: FiniteCdga,
    qmap: &pdquotient::QuotientMap,
    n: u32,
    report: &mut Report,
) -> Result<Pipeline> {
    report.stage("free loop model");
    let flm = build_free_loop_model(model)?;
    report.stage("quotient loop model");
    let eqm = sections::extend_to_quotient_loop(&a, qmap, &flm, n)?;
    report.verdict("D-bar^2 = 0 and rho(x)1 is a chain map", None, true);
    report.stage("dual complex");
    let dual = sections::build_dual_complex(&a, &eqm)?;
    report.verdict("delta^2 = 0", None, true);
    for m in &dual.sign_identity_checked {
        report.verdict("duality sign identity", Some(*m as i64), true);
    }
    Ok(Pipeline { flm, a, eqm, dual })
}

fn aut_tables(model: &SullivanModel, p: &Pipeline, n: u32, report: &mut Report) -> Result<()> {
    let big_n = model.formal_dimension();
    report.stage("aut ranks");
    let low = sections::low_degree_classes(&p.eqm)?;
    report.table(
        "H^(1)(A(x)sV) low degrees",
        Table::from_rank_table(&low, 0, big_n),
    );
    report.stage("theorem check");
    let th = sections::theorem_rows(model, &p.flm, &p.eqm, &p.dual, n)?;
    let top = n - big_n;
    report.table(
        "pi(Omega aut1 M)",
        Table::from_rank_table(&th.aut_table, 1, top),
    );
    report.table(
        "H(Der)",
        Table::from_rank_table(&th.derivation_table, 1, top + 1),
    );
    report.table(
        "H^(1)(LM)",
        Table::from_rank_table(&th.loop_table, big_n + 1, n),
    );
    for row in &th.rows {
        let check = if row.trusted {
            "three routes agree"
        } else {
            "three routes agree (untrusted degree)"
        };
        report.verdict(check, Some(row.n as i64), row.pass());
    }
    Ok(())
}

pub fn aut_ranks(model: &SullivanModel, opts: &Options, report: &mut Report) -> Result<()> {
    let n = clamp_for_aut(model, opts.max_degree);
    report.parameters.max_degree = Some(n);
    let (a, qmap) = quotient_with_hook(model, opts, report)?;
    let p = build_sections(model, a, &qmap, n, report)?;
    aut_tables(model, &p, n, report)
}

pub fn verify(model: &SullivanModel, opts: &Options, report: &mut Report) -> Result<()> {
    let n = clamp_for_aut(model, opts.max_degree);
    report.parameters.max_degree = Some(n);
    report.stage("validation");
    let v = model.ensure_valid()?;
    for c in &v.checks {
        report.verdict(&c.name, None, c.pass);
    }
    let (a, qmap) = quotient_with_hook(model, opts, report)?;
    report.verdict("poincare duality", None, true);
    identity_checks(&a, report)?;
    quasi_iso_checks(model, &a, &qmap, n, report)?;

    let p = build_sections(model, a, &qmap, n, report)?;

    report.stage("rho(x)1 quasi-isomorphism");
    let cmp = sections::verify_rho_tensor_quasi_iso(&p.flm, &p.eqm, n)?;
    let slices = cmp.len();
    let mut by_degree = std::collections::BTreeMap::new();
    for c in &cmp {
        let e = by_degree.entry(c.degree).or_insert(true);
        *e &= c.pass();
    }
    for (d, pass) in by_degree {
        report.verdict("rho(x)1 quasi-isomorphism", Some(d as i64), pass);
    }
    report.note(format!(
        "rho(x)1 compared on {slices} (degree, word length) slices; {} nonzero",
        cmp.iter()
            .filter(|c: &&SliceComparison| c.loop_dim > 0)
            .count()
    ));

    report.stage("duality map");
    let du = sections::duality_map(&p.a)?;
    for (k, _) in &du.cohomology_pairing_ranks {
        report.verdict("cup pairing on H(A) perfect", Some(*k as i64), true);
    }
    report.note(format!(
        "Du invertible on cochains: {}",
        if du.invertible_on_cochains {
            "yes"
        } else {
            "no"
        }
    ));
    report.stage("dual differential");
    sections::check_dual_differential(&p.a, &du)?;
    report.verdict("Du d = (-1)^N d' Du", None, true);

    report.stage("Du(x)1 quasi-isomorphism");
    for (m, _) in sections::verify_duality_quasi_iso(&p.eqm, &p.dual)? {
        report.verdict("Du(x)1 quasi-isomorphism", Some(m as i64), true);
    }

    aut_tables(model, &p, n, report)
}

/// Reads and parses a model file. I/O failures are reported like parse errors.
pub fn load(path: &std::path::Path) -> Result<SullivanModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    sullivan::parse_model(&text)
}
