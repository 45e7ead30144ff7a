//! Cross-checks of every family and formula against the brute-force oracle.
//!
//! Cases whose oracle scan needs more cells than the budget are skipped, so
//! a run is a deterministic function of `(suite, budget)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::Serialize;
use serde_json::Value;

use crate::cardinality::{
    binomial_identity_check, count_sum_t, inner_count_full_type_I, inner_count_pure_ws,
    outer_count_S4, outer_count_full_type_I, outer_count_full_type_III, outer_count_natural_pop,
};
use crate::characterize::{self as ch, InverseFamily};
use crate::classify::{class_membership, rank_one_factorize, uw_decompose, Rank2Structure};
use crate::enumerate::{
    brute_force_count, brute_force_inverses, count_json, materialize_family, set_equal,
    to_int, EnumOptions, Enumeration, PenroseSpec, Population,
};
use crate::error::{domain_err, Error, Result};
use crate::matrix::{
    parse_matrix, penrose_check, ternary_rank, transform_inverse, Matrix, SignedPermutation,
    TernaryMatrix,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Core,
    Inner,
    Outer,
    Counts,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "core" => Ok(Suite::Core),
            "inner" => Ok(Suite::Inner),
            "outer" => Ok(Suite::Outer),
            "counts" => Ok(Suite::Counts),
            "all" => Ok(Suite::All),
            _ => domain_err(format!("unknown suite `{s}`")),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Core => "core",
            Suite::Inner => "inner",
            Suite::Outer => "outer",
            Suite::Counts => "counts",
            Suite::All => "all",
        })
    }
}

/// A documented, expected mismatch between a stated family and the oracle.
pub struct KnownGap {
    pub id: &'static str,
    pub theorem_ids: &'static [&'static str],
    pub description: &'static str,
}

pub const KNOWN_GAPS: &[KnownGap] = &[KnownGap {
    id: "lambda-family-zero-first-column",
    theorem_ids: &["Thm5.14", "Thm5.19"],
    description: "the λ-parametrized rank-one outer inverses all have a nonzero first column; \
                  rank-one outer inverses with a zero first column satisfy XAX = X but are not \
                  represented. Open question: whether the stated set and count intend to \
                  cover only λ-representable members.",
}];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiffSample {
    pub only_in_family: Vec<Matrix<i64>>,
    pub only_in_oracle: Vec<Matrix<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub theorem_id: String,
    pub instance: String,
    pub family_count: Value,
    pub oracle_count: Value,
    pub diff_sample: DiffSample,
    /// Allowlist entry this discrepancy matches, if any.
    pub known_gap: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyOutcome {
    pub suite: Suite,
    pub budget: usize,
    pub cases_run: usize,
    pub cases_passed: usize,
    pub discrepancies: Vec<Discrepancy>,
}

impl VerifyOutcome {
    /// Success iff every discrepancy is allowlisted and gaps are allowed.
    pub fn success(&self, allow_known_gaps: bool) -> bool {
        self.discrepancies
            .iter()
            .all(|d| allow_known_gaps && d.known_gap.is_some())
    }
}

const SAMPLE: usize = 8;

struct Runner {
    opts: EnumOptions,
    cases_run: usize,
    cases_passed: usize,
    discrepancies: Vec<Discrepancy>,
    pop: Population,
}

impl Runner {
    fn new(budget: usize, threads: Option<usize>) -> Self {
        Runner {
            opts: EnumOptions { budget, threads },
            cases_run: 0,
            cases_passed: 0,
            discrepancies: Vec::new(),
            pop: Population::ternary(),
        }
    }

    fn fits(&self, cells: usize) -> bool {
        cells <= self.opts.budget
    }

    fn oracle(&self, a: &TernaryMatrix, spec: PenroseSpec, rank: Option<usize>) -> Enumeration {
        brute_force_inverses(a, spec, &self.pop, rank, &self.opts).expect("gated by fits")
    }

    fn oracle_count(&self, a: &TernaryMatrix, spec: PenroseSpec, pop: &Population) -> BigUint {
        brute_force_count(a, spec, pop, None, &self.opts).expect("gated by fits")
    }

    fn record(&mut self, d: Option<Discrepancy>) {
        self.cases_run += 1;
        match d {
            None => self.cases_passed += 1,
            Some(d) => self.discrepancies.push(d),
        }
    }

    fn sets(&mut self, id: &str, instance: String, family: &Enumeration, oracle: &Enumeration) {
        let cmp = set_equal(&family.matrices, &oracle.matrices);
        if cmp.equal {
            return self.record(None);
        }
        let known_gap = KNOWN_GAPS
            .iter()
            .find(|g| {
                g.theorem_ids.contains(&id)
                    && cmp.only_in_a.is_empty()
                    && cmp.only_in_b.iter().all(|x| x.column(0).iter().all(|&v| v == 0))
            })
            .map(|g| g.id.to_string());
        self.record(Some(Discrepancy {
            theorem_id: id.to_string(),
            instance,
            family_count: count_json(&family.count),
            oracle_count: count_json(&oracle.count),
            diff_sample: DiffSample {
                only_in_family: cmp.only_in_a.into_iter().take(SAMPLE).collect(),
                only_in_oracle: cmp.only_in_b.into_iter().take(SAMPLE).collect(),
            },
            known_gap,
        }));
    }

    fn family_vs_oracle(
        &mut self,
        family: &InverseFamily,
        a: &TernaryMatrix,
        spec: PenroseSpec,
        rank: Option<usize>,
    ) {
        if !self.fits(a.rows() * a.cols()) {
            return;
        }
        let fam = materialize_family(family, &self.pop, &self.opts).expect("small family");
        let oracle = self.oracle(a, spec, rank);
        let instance = match rank {
            Some(k) => format!("A = {a:?}, {spec}, rank {k}"),
            None => format!("A = {a:?}, {spec}"),
        };
        self.sets(&family.theorem_id.clone(), instance, &fam, &oracle);
    }

    fn counts(&mut self, id: &str, instance: String, formula: BigUint, oracle: BigUint) {
        let d = (formula != oracle).then(|| Discrepancy {
            theorem_id: id.to_string(),
            instance,
            family_count: count_json(&formula),
            oracle_count: count_json(&oracle),
            diff_sample: DiffSample { only_in_family: vec![], only_in_oracle: vec![] },
            known_gap: None,
        });
        self.record(d);
    }

    fn check(&mut self, id: &str, instance: String, ok: bool) {
        let d = (!ok).then(|| Discrepancy {
            theorem_id: id.to_string(),
            instance,
            family_count: Value::Null,
            oracle_count: Value::Null,
            diff_sample: DiffSample { only_in_family: vec![], only_in_oracle: vec![] },
            known_gap: None,
        });
        self.record(d);
    }

    fn finish(self, suite: Suite) -> VerifyOutcome {
        VerifyOutcome {
            suite,
            budget: self.opts.budget,
            cases_run: self.cases_run,
            cases_passed: self.cases_passed,
            discrepancies: self.discrepancies,
        }
    }
}

/// All ternary matrices of a shape, in odometer order.
pub fn all_ternary(rows: usize, cols: usize) -> Vec<TernaryMatrix> {
    let cells = rows * cols;
    (0..3usize.pow(cells as u32))
        .map(|code| {
            let mut c = code;
            let mut e = vec![0i8; cells];
            for v in e.iter_mut().rev() {
                *v = (c % 3) as i8 - 1;
                c /= 3;
            }
            TernaryMatrix::new(rows, cols, e).expect("shape")
        })
        .collect()
}

fn t(rows: &[&[i8]]) -> TernaryMatrix {
    TernaryMatrix::from_rows(rows).expect("literal")
}

fn repeat(v: i8, k: usize) -> impl Iterator<Item = i8> {
    std::iter::repeat_n(v, k)
}

/// `(s·1_{m n1} | −s·1_{m n2})`.
fn type_ii(m: usize, n1: usize, n2: usize, s: i8) -> TernaryMatrix {
    let row: Vec<i8> = repeat(s, n1).chain(repeat(-s, n2)).collect();
    TernaryMatrix::from_rows(&vec![row; m]).expect("shape")
}

fn type_iii(m: usize, n1: usize, n2: usize) -> TernaryMatrix {
    let row: Vec<i8> = repeat(1, n1).chain(repeat(0, n2)).collect();
    TernaryMatrix::from_rows(&vec![row; m]).expect("shape")
}

const SHAPES: &[(usize, usize)] = &[(1, 1), (1, 2), (2, 1), (1, 3), (3, 1), (2, 2), (2, 3), (3, 2)];

fn run_core(r: &mut Runner) {
    let specs = [PenroseSpec::One, PenroseSpec::Two, PenroseSpec::OneTwo];

    // {1,2} = {1} ∩ {2}
    for &(m, n) in SHAPES {
        if !r.fits(m * n) {
            continue;
        }
        let ok = all_ternary(m, n).iter().all(|a| {
            let one = r.oracle(a, PenroseSpec::One, None).matrices;
            let two = r.oracle(a, PenroseSpec::Two, None).matrices;
            let both = r.oracle(a, PenroseSpec::OneTwo, None).matrices;
            let inter: Vec<_> = one.into_iter().filter(|x| two.binary_search(x).is_ok()).collect();
            inter == both
        });
        r.check("OracleIntersection", format!("all {m}x{n}"), ok);
    }

    // (UAV){i} = Vᵀ A{i} Uᵀ for every signed permutation pair
    for &(m, n) in SHAPES {
        if !r.fits(m * n) {
            continue;
        }
        for spec in specs {
            let mut cache: HashMap<TernaryMatrix, Vec<Matrix<i64>>> = HashMap::new();
            for a in all_ternary(m, n) {
                let set = r.oracle(&a, spec, None).matrices;
                cache.insert(a, set);
            }
            let us = SignedPermutation::all(m);
            let vs = SignedPermutation::all(n);
            let mut ok = true;
            'outer: for a in all_ternary(m, n) {
                for u in &us {
                    for v in &vs {
                        let b = SignedPermutation::sandwich(u, &a, v).expect("shape");
                        let mut moved: Vec<Matrix<i64>> = cache[&a]
                            .iter()
                            .map(|x| transform_inverse(x, u, v).expect("shape"))
                            .collect();
                        moved.sort();
                        if moved != cache[&b] {
                            ok = false;
                            break 'outer;
                        }
                    }
                }
            }
            r.check("Lem2.1", format!("all {m}x{n}, {spec}, all (U, V)"), ok);
        }
    }

    // outer inverses of (B | 0): X1 ∈ B{2} and X2 B X1 = X2
    let z = 1;
    for &(m, n) in &[(1, 1), (1, 2), (2, 1), (2, 2)] {
        {
            if !r.fits(m * (n + z)) {
                continue;
            }
            let mut ok = true;
            for b in all_ternary(m, n) {
                let rows: Vec<Vec<i8>> = (0..m)
                    .map(|i| b.row(i).iter().copied().chain(repeat(0, z)).collect())
                    .collect();
                let a = TernaryMatrix::from_rows(&rows).expect("shape");
                for x in r.oracle(&a, PenroseSpec::Two, None).matrices {
                    let xi = to_int(&x);
                    let x1 = xi.submatrix(0..n, 0..m);
                    let x2 = xi.submatrix(n..n + z, 0..m);
                    let bi = b.to_int();
                    let top = penrose_check(&bi, &x1).expect("shape").satisfies_2;
                    let bottom = x2.mul(&bi).and_then(|p| p.mul(&x1)).expect("shape") == x2;
                    ok &= top && bottom;
                }
            }
            r.check("Lem2.4", format!("B {m}x{n}, zero block width {z}"), ok);
        }
    }

    // text format round trip
    let ok = all_ternary(2, 2)
        .iter()
        .all(|a| parse_matrix(&a.to_text()).map(|b| b == *a).unwrap_or(false));
    r.check("TextFormat", "all 2x2".into(), ok);

    // factorization round trips
    for &(m, n) in &[(1, 3), (2, 2), (2, 3), (3, 2), (3, 3)] {
        let mut ok = true;
        for a in all_ternary(m, n) {
            if ternary_rank(&a) == 1 {
                ok &= rank_one_factorize(&a).map(|f| f.reassemble() == a).unwrap_or(false);
            }
            if class_membership(&a).is_class_II {
                ok &= uw_decompose(&a).map(|d| d.reassemble() == a).unwrap_or(false);
            }
        }
        r.check("Factorization", format!("all {m}x{n}"), ok);
    }
}

fn run_inner(r: &mut Runner) {
    let one = PenroseSpec::One;
    for m in 1..=3 {
        for n in 1..=3 {
            let f = ch::inner_full_type_I(m, n).expect("valid");
            r.family_vs_oracle(&f, &TernaryMatrix::ones(m, n), one, None);
        }
    }
    for m in 1..=4 {
        for n1 in 1..=4 {
            for n2 in 1..=4 {
                if m * (n1 + n2) > 8 {
                    continue;
                }
                for s in [1, -1] {
                    let f = ch::inner_full_type_II(m, n1, n2, s).expect("valid");
                    r.family_vs_oracle(&f, &type_ii(m, n1, n2, s), one, None);
                }
            }
        }
    }

    // the parametric generator only emits inner inverses
    for (m, n1, n2) in [(1, 1, 1), (1, 2, 1), (2, 1, 1), (2, 2, 1)] {
        for s in [1, -1] {
            let g = ch::inner_type_II_parametric(m, n1, n2, s).expect("valid");
            let a = type_ii(m, n1, n2, s).to_int();
            let k = g.parameter_count();
            let mut ok = true;
            for code in 0..5usize.pow(k.min(4) as u32) {
                let mut c = code;
                let params: Vec<i64> = (0..k)
                    .map(|_| {
                        let v = (c % 5) as i64 - 2;
                        c /= 5;
                        v
                    })
                    .collect();
                let x = g.emit(&params).expect("arity");
                ok &= penrose_check(&a, &x).expect("shape").satisfies_1;
            }
            r.check("Thm3.4", format!("m={m} n1={n1} n2={n2} sign={s}"), ok);
        }
    }

    // rank-one matrices in every row/column arrangement
    for &(m, n) in &[(1, 2), (2, 1), (2, 2), (2, 3), (3, 2)] {
        if !r.fits(m * n) {
            continue;
        }
        for a in all_ternary(m, n) {
            if ternary_rank(&a) == 1 {
                let f = ch::inner_rank_one(&a).expect("rank one");
                r.family_vs_oracle(&f, &a, one, None);
            }
        }
    }

    r.family_vs_oracle(&ch::inner_S1(1, 1, 1).expect("valid"), &t(&[&[1, 1], &[1, -1]]), one, None);
    r.family_vs_oracle(
        &ch::inner_S2(1, 1, 1, 1).expect("valid"),
        &t(&[&[1, 1, 1], &[1, -1, 0]]),
        one,
        None,
    );
    r.family_vs_oracle(
        &ch::inner_S3(1, 1, [1, 1, 1, 1]).expect("valid"),
        &t(&[&[1, 1, 1, 0], &[1, -1, 0, 1]]),
        one,
        None,
    );
    for a in [
        t(&[&[1, -1, 1, 0], &[0, 1, 1, 1]]),
        t(&[&[1, 1, 0, 0], &[0, 0, 1, -1]]),
        t(&[&[1, 1, 0], &[1, -1, 0], &[0, 0, 1]]),
    ] {
        let f = ch::inner_class_III(&a).expect("class III");
        r.family_vs_oracle(&f, &a, one, None);
    }

    // full row rank: the two worked examples
    let star = t(&[
        &[1, -1, 0, 0, 0],
        &[1, 0, -1, 0, 0],
        &[1, 0, 0, 0, -1],
        &[1, 0, 0, -1, 0],
    ]);
    let f = ch::reflexive_full_row_rank(std::slice::from_ref(&star)).expect("full row rank");
    let fam = materialize_family(&f, &r.pop, &r.opts).expect("sum family");
    let oracle = columnwise_right_inverses(&star);
    r.sets("Thm5.16", format!("A = {star:?}, {{1,2}}"), &fam, &oracle);
    let listed = star_graph_listing();
    r.sets("Thm5.16", "star graph listed members".into(), &fam, &listed);
    let small = t(&[&[1, 1, 0], &[1, 0, 0]]);
    let f = ch::reflexive_full_row_rank(std::slice::from_ref(&small)).expect("full row rank");
    r.family_vs_oracle(&f, &small, one, None);
}

/// Right inverses of a full-row-rank `A`, solved one column at a time.
fn columnwise_right_inverses(a: &TernaryMatrix) -> Enumeration {
    let (m, n) = a.shape();
    let cols: Vec<Vec<Vec<i64>>> = (0..m)
        .map(|j| {
            all_ternary(n, 1)
                .into_iter()
                .map(|c| c.entries().iter().map(|&v| i64::from(v)).collect::<Vec<i64>>())
                .filter(|c| {
                    (0..m).all(|i| {
                        let v: i64 = (0..n).map(|k| i64::from(a.get(i, k)) * c[k]).sum();
                        v == i64::from(i == j)
                    })
                })
                .collect()
        })
        .collect();
    let mut out = vec![vec![0i64; n * m]];
    for (j, choices) in cols.iter().enumerate() {
        out = out
            .into_iter()
            .flat_map(|e| {
                choices.iter().map(move |c| {
                    let mut e = e.clone();
                    for k in 0..n {
                        e[k * m + j] = c[k];
                    }
                    e
                })
            })
            .collect();
    }
    let mut mats: Vec<Matrix<i64>> =
        out.into_iter().map(|e| Matrix::new(n, m, e).expect("shape")).collect();
    mats.sort();
    let count = BigUint::from(mats.len());
    Enumeration { matrices: mats, count }
}

/// The sixteen members displayed for the star-graph example.
fn star_graph_listing() -> Enumeration {
    let mut mats = Vec::new();
    for code in 0..16 {
        let [a, b, c, d] = [code >> 3 & 1, code >> 2 & 1, code >> 1 & 1, code & 1];
        let rows: Vec<Vec<i64>> = vec![
            vec![a, b, c, d],
            vec![a - 1, b, c, d],
            vec![a, b - 1, c, d],
            vec![a, b, c, d - 1],
            vec![a, b, c - 1, d],
        ];
        mats.push(Matrix::from_rows(&rows).expect("shape"));
    }
    mats.sort();
    Enumeration { count: BigUint::from(mats.len()), matrices: mats }
}

fn run_outer(r: &mut Runner) {
    let two = PenroseSpec::Two;
    for m in 1..=3 {
        for n in 1..=3 {
            let f = ch::outer_full_type_I(m, n).expect("valid");
            r.family_vs_oracle(&f, &TernaryMatrix::ones(m, n), two, Some(1));
        }
    }
    for m in 1..=2 {
        for n1 in 1..=3 {
            for n2 in 1..=2 {
                let f = ch::outer_full_type_III(m, n1, n2).expect("valid");
                r.family_vs_oracle(&f, &type_iii(m, n1, n2), two, Some(1));
            }
        }
    }
    for (zeta, eta) in [
        (vec![1, 1], vec![1, -1]),
        (vec![1, 0], vec![0, 1, -1]),
        (vec![-1, 1, 0], vec![1, 1]),
    ] {
        let f = ch::outer_rank_one_general(&zeta, &eta).expect("valid");
        let a = ch_kernel(&zeta, &eta);
        r.family_vs_oracle(&f, &a, two, Some(1));
    }
    let bd = [t(&[&[1, 1]]), t(&[&[1]])];
    let f = ch::outer_rank1_block_diagonal(&bd).expect("valid");
    r.family_vs_oracle(&f, &TernaryMatrix::block_diagonal(&bd).expect("blocks"), two, Some(1));
    let f = ch::outer_rank1_block_diagonal(&[t(&[&[1]]), t(&[&[1]])]).expect("valid");
    r.family_vs_oracle(&f, &TernaryMatrix::identity(2), two, Some(1));
    for blocks in [
        vec![t(&[&[1, 1]]), t(&[&[1, -1]])],
        vec![t(&[&[1, 0, 1]]), t(&[&[0, 1, 1], &[0, -1, -1]])],
    ] {
        let f = ch::outer_rank1_row_partitioned(&blocks).expect("valid");
        r.family_vs_oracle(&f, &TernaryMatrix::vstack(&blocks).expect("blocks"), two, Some(1));
    }

    // λ-family against all rank-one outer inverses
    for rows in [
        vec![vec![1, 0], vec![0, 1]],
        vec![vec![1, 1, 0], vec![1, 0, 0]],
        vec![vec![1, 1], vec![1, -1]],
    ] {
        let f = ch::outer_rank1_full_row_rank(&rows).expect("independent rows");
        let a = TernaryMatrix::from_rows(&rows).expect("shape");
        r.family_vs_oracle(&f, &a, two, Some(1));
    }

    // rank-two outer inverses of the four two-row structures
    for s in [
        Rank2Structure::S1 { n1: 1 },
        Rank2Structure::S1 { n1: 2 },
        Rank2Structure::S2 { n1: 1, n3: 1 },
        Rank2Structure::S2 { n1: 1, n3: 2 },
        Rank2Structure::S3 { n1: 1, n2: 1, n3: 1, n4: 1 },
        Rank2Structure::S4 { n1: 1, n2: 1 },
        Rank2Structure::S4 { n1: 2, n2: 1 },
        Rank2Structure::S4 { n1: 2, n2: 2 },
    ] {
        let f = ch::outer_rank2_class3(s).expect("valid");
        let a = s.canonical(1, 1).expect("valid");
        r.family_vs_oracle(&f, &a, PenroseSpec::OneTwo, None);
    }

    // complete outer set of S4, stated formula then the oracle
    for (n1, n2) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
        let f = ch::outer_full_set_S4(n1, n2).expect("valid");
        let a = Rank2Structure::S4 { n1, n2 }.canonical(1, 1).expect("valid");
        if !r.fits(a.rows() * a.cols()) {
            continue;
        }
        let fam = materialize_family(&f, &r.pop, &r.opts).expect("small family");
        r.counts(
            "Thm5.19",
            format!("stated count vs family members, n1={n1} n2={n2}"),
            outer_count_S4(n1, n2),
            fam.count.clone(),
        );
        r.family_vs_oracle(&f, &a, two, None);
    }
}

fn ch_kernel(zeta: &[i8], eta: &[i8]) -> TernaryMatrix {
    let e = zeta.iter().flat_map(|&z| eta.iter().map(move |&h| z * h)).collect();
    TernaryMatrix::new(zeta.len(), eta.len(), e).expect("shape")
}

fn run_counts(r: &mut Runner) {
    let one = PenroseSpec::One;
    let two = PenroseSpec::Two;
    let tern = Population::ternary();

    for n in 0..=12usize {
        let mut census: BTreeMap<i64, u64> = BTreeMap::new();
        for code in 0..3u64.pow(n as u32) {
            let mut c = code;
            let mut s = 0i64;
            for _ in 0..n {
                s += (c % 3) as i64 - 1;
                c /= 3;
            }
            *census.entry(s).or_default() += 1;
        }
        let ok = (-(n as i64)..=n as i64)
            .all(|t| count_sum_t(n, t) == BigUint::from(*census.get(&t).unwrap_or(&0)));
        r.check("SumCount", format!("n={n}"), ok);
    }

    for m in 1..=9 {
        for n in 1..=9 {
            if m * n <= 9 && r.fits(m * n) {
                let oracle = r.oracle_count(&TernaryMatrix::ones(m, n), one, &tern);
                r.counts("InnerTypeI", format!("m={m} n={n}"), inner_count_full_type_I(m, n), oracle);
            }
        }
    }
    for m in 1..=3 {
        for n in 1..=3 {
            if r.fits(m * n) {
                let oracle = r.oracle_count(&TernaryMatrix::ones(m, n), two, &tern);
                r.counts("Cor5.4", format!("m={m} n={n}"), outer_count_full_type_I(m, n, true), oracle);
            }
        }
    }
    for m in 1..=4 {
        for n1 in 1..=4 {
            for n2 in 0..=4 {
                let cells = m * (n1 + n2);
                if cells <= 8 && r.fits(cells) {
                    let oracle = r.oracle_count(&type_iii(m, n1, n2), two, &tern);
                    r.counts(
                        "Thm5.5",
                        format!("m={m} n1={n1} n2={n2}"),
                        outer_count_full_type_III(m, n1, n2, true),
                        oracle,
                    );
                }
            }
        }
    }
    let with_zero = Population::new(vec![0, 1]).expect("valid");
    let without = Population::new(vec![1]).expect("valid");
    for m in 1..=3 {
        for n in 1..=3 {
            if r.fits(m * n) {
                let a = TernaryMatrix::ones(m, n);
                let c = r.oracle_count(&a, two, &with_zero);
                r.counts("Cor5.3", format!("m={m} n={n} P={{0,1}}"), outer_count_natural_pop(m, n, true), c);
                let c = r.oracle_count(&a, two, &without);
                r.counts("Cor5.3", format!("m={m} n={n} P={{1}}"), outer_count_natural_pop(m, n, false), c);
            }
        }
    }
    for dims in [
        vec![(1, 1), (1, 1)],
        vec![(1, 2), (1, 1)],
        vec![(2, 1), (1, 1)],
        vec![(1, 2), (1, 2)],
        vec![(1, 1), (1, 1), (1, 1)],
    ] {
        let blocks: Vec<TernaryMatrix> = dims.iter().map(|&(m, n)| TernaryMatrix::ones(m, n)).collect();
        let a = TernaryMatrix::block_diagonal(&blocks).expect("blocks");
        if r.fits(a.rows() * a.cols()) {
            let c = r.oracle_count(&a, one, &tern);
            r.counts("PureWellSettled", format!("{dims:?}"), inner_count_pure_ws(&dims), c);
        }
    }
    for m in 1..=4 {
        for n1 in 1..=4 {
            for n2 in 1..=4 {
                let c = binomial_identity_check(m, n1, n2);
                r.check("BinomialIdentity", format!("m={m} n1={n1} n2={n2}"), c.equal);
            }
        }
    }

    // equal-cardinality claims
    for m in 1..=4 {
        for n1 in 1..=4 {
            for n2 in 1..=4 {
                let cells = m * (n1 + n2);
                if cells > 8 || !r.fits(cells) {
                    continue;
                }
                let a = TernaryMatrix::ones(m, n1 + n2);
                let b = type_ii(m, n1, n2, 1);
                let (ca, cb) = (r.oracle_count(&a, one, &tern), r.oracle_count(&b, one, &tern));
                r.counts("Cor3.7", format!("m={m} n1={n1} n2={n2}"), ca, cb);
                let (ca, cb) = (r.oracle_count(&a, two, &tern), r.oracle_count(&b, two, &tern));
                r.counts("OuterTypeII", format!("m={m} n1={n1} n2={n2}"), ca, cb);
            }
        }
    }
    for m in 1..=3 {
        for n in 1..=3 {
            if !r.fits(m * n) {
                continue;
            }
            for (id, spec) in [("Thm3.8", one), ("OuterRankOne", two)] {
                let mut seen: BTreeMap<(usize, usize), BigUint> = BTreeMap::new();
                let mut ok = true;
                for a in all_ternary(m, n) {
                    if ternary_rank(&a) != 1 {
                        continue;
                    }
                    let key = (
                        (0..m).filter(|&i| a.is_zero_row(i)).count(),
                        (0..n).filter(|&j| a.is_zero_col(j)).count(),
                    );
                    let c = r.oracle_count(&a, spec, &tern);
                    ok &= seen.entry(key).or_insert_with(|| c.clone()) == &c;
                }
                r.check(id, format!("all rank-one {m}x{n}"), ok);
            }
        }
    }
    for dims in [vec![(1, 2), (1, 2)], vec![(1, 2), (1, 3)], vec![(2, 2), (1, 2)], vec![(1, 3), (1, 2)]] {
        let cells: usize = dims.iter().map(|d| d.0).sum::<usize>() * dims.iter().map(|d| d.1).sum::<usize>();
        if !r.fits(cells) {
            continue;
        }
        let (ok11, ok15) = block_family_counts(r, &dims);
        r.check("Thm3.11", format!("{dims:?}"), ok11);
        r.check("Thm3.15", format!("{dims:?}"), ok15);
    }
}

/// Compares `#X{1}` across the signed all-ones block diagonals `A`, their
/// split variants `B`, mixtures `C` and sign-scaled rank-one blocks `D`.
fn block_family_counts(r: &Runner, dims: &[(usize, usize)]) -> (bool, bool) {
    let tern = Population::ternary();
    let s = dims.len();
    let count = |blocks: &[TernaryMatrix]| {
        let a = TernaryMatrix::block_diagonal(blocks).expect("blocks");
        r.oracle_count(&a, PenroseSpec::One, &tern)
    };
    let reference = count(&dims.iter().map(|&(m, n)| TernaryMatrix::ones(m, n)).collect::<Vec<_>>());
    let mut ok11 = true;
    for eps in 0..(1usize << s) {
        let sign = |i: usize| if eps >> i & 1 == 1 { -1i8 } else { 1 };
        // per block: plain, or split at each interior cut
        let choices: Vec<Vec<TernaryMatrix>> = dims
            .iter()
            .enumerate()
            .map(|(i, &(m, n))| {
                let mut c = vec![type_ii(m, n, 0, sign(i))];
                c.extend((1..n).map(|n1| type_ii(m, n1, n - n1, sign(i))));
                c
            })
            .collect();
        for pick in product_indices(&choices.iter().map(Vec::len).collect::<Vec<_>>()) {
            let blocks: Vec<TernaryMatrix> =
                pick.iter().enumerate().map(|(i, &k)| choices[i][k].clone()).collect();
            ok11 &= count(&blocks) == reference;
        }
    }
    let mut ok15 = true;
    let sign_vectors = |k: usize| -> Vec<Vec<i8>> {
        (0..1usize << k)
            .map(|c| (0..k).map(|i| if c >> i & 1 == 1 { -1 } else { 1 }).collect())
            .collect()
    };
    let choices: Vec<Vec<TernaryMatrix>> = dims
        .iter()
        .map(|&(m, n)| {
            let mut out = Vec::new();
            for u in sign_vectors(m) {
                for v in sign_vectors(n).into_iter().filter(|v| v[0] == 1) {
                    let e = u.iter().flat_map(|&a| v.iter().map(move |&b| a * b)).collect();
                    out.push(TernaryMatrix::new(m, n, e).expect("shape"));
                }
            }
            out
        })
        .collect();
    for pick in product_indices(&choices.iter().map(Vec::len).collect::<Vec<_>>()) {
        let blocks: Vec<TernaryMatrix> =
            pick.iter().enumerate().map(|(i, &k)| choices[i][k].clone()).collect();
        ok15 &= count(&blocks) == reference;
    }
    (ok11, ok15)
}

fn product_indices(lens: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &l in lens {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..l).map(move |k| {
                    let mut p = p.clone();
                    p.push(k);
                    p
                })
            })
            .collect();
    }
    out
}

/// Runs a suite. `threads` sizes the enumeration pool; results do not
/// depend on it.
pub fn run_suite(suite: Suite, budget: usize, threads: Option<usize>) -> VerifyOutcome {
    let mut r = Runner::new(budget, threads);
    match suite {
        Suite::Core => run_core(&mut r),
        Suite::Inner => run_inner(&mut r),
        Suite::Outer => run_outer(&mut r),
        Suite::Counts => run_counts(&mut r),
        Suite::All => {
            run_core(&mut r);
            run_inner(&mut r);
            run_outer(&mut r);
            run_counts(&mut r);
        }
    }
    r.finish(suite)
}
