//! Brute-force oracle and constraint-guided generators.
//!
//! Every stream is in odometer order: row-major, last entry varying
//! fastest, population values ascending. For matrices of one shape this is
//! the lexicographic order on entry vectors, which is also `Matrix`'s `Ord`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::characterize::{
    lcm_of_denominators, ColumnScaledFamily, FamilyBody, InverseFamily, RankOneProductFamily,
    SumConstraintSystem,
};
use crate::error::{domain_err, Error, Result};
use crate::matrix::{exact_rank, IntMatrix, Matrix, TernaryMatrix};

/// Environment variable that overrides the default cell budget.
pub const BUDGET_ENV: &str = "BOHEMIAN_BUDGET";
pub const DEFAULT_BUDGET: usize = 16;

/// Largest absolute population value; keeps every product well inside `i128`.
const MAX_POPULATION_ABS: i64 = 1 << 31;

/// Finite set of allowed entries, stored ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Population {
    values: Vec<i64>,
}

impl Population {
    pub fn new(mut values: Vec<i64>) -> Result<Self> {
        values.sort_unstable();
        if values.is_empty() {
            return domain_err("population must be nonempty");
        }
        if values.windows(2).any(|w| w[0] == w[1]) {
            return domain_err("population values must be distinct");
        }
        if values.len() > 8 {
            return domain_err("populations are limited to 8 values");
        }
        if values.iter().any(|v| v.abs() > MAX_POPULATION_ABS) {
            return domain_err(format!("population values must lie within ±{MAX_POPULATION_ABS}"));
        }
        Ok(Population { values })
    }

    pub fn ternary() -> Self {
        Population { values: vec![-1, 0, 1] }
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, v: i64) -> bool {
        self.values.binary_search(&v).is_ok()
    }

    pub fn min(&self) -> i64 {
        self.values[0]
    }

    pub fn max(&self) -> i64 {
        self.values[self.values.len() - 1]
    }
}

impl Default for Population {
    fn default() -> Self {
        Population::ternary()
    }
}

impl FromStr for Population {
    type Err = Error;

    /// Comma-separated integers, e.g. `-1,0,1`.
    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Domain(format!("`{}` is not an integer", t.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        Population::new(values)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PenroseSpec {
    One,
    Two,
    OneTwo,
}

impl FromStr for PenroseSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "{1}" => Ok(PenroseSpec::One),
            "2" | "{2}" => Ok(PenroseSpec::Two),
            "12" | "1,2" | "{1,2}" => Ok(PenroseSpec::OneTwo),
            _ => domain_err(format!("unknown Penrose spec `{s}`")),
        }
    }
}

impl fmt::Display for PenroseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PenroseSpec::One => "{1}",
            PenroseSpec::Two => "{2}",
            PenroseSpec::OneTwo => "{1,2}",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumOptions {
    /// Maximum number of ternary cells; larger populations are charged
    /// `log_3 |P|` cells per entry.
    pub budget: usize,
    /// Worker count; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl EnumOptions {
    /// Budget from [`BUDGET_ENV`] when set and valid, else the default.
    pub fn from_env() -> Self {
        let budget = std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_BUDGET);
        EnumOptions { budget, threads: None }
    }

    pub fn with_budget(budget: usize) -> Self {
        EnumOptions { budget, threads: None }
    }

    fn check(&self, cells: usize, population: &Population) -> Result<()> {
        let cost = cells as f64 * (population.len() as f64).ln() / 3f64.ln();
        if cost > self.budget as f64 + 1e-9 {
            return Err(Error::Budget { cells, budget: self.budget });
        }
        Ok(())
    }

    fn run<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match self.threads {
            Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build() {
                Ok(pool) => pool.install(f),
                Err(_) => f(),
            },
            None => f(),
        }
    }
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions::from_env()
    }
}

/// An ordered set of matrices with its size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub matrices: Vec<Matrix<i64>>,
    pub count: BigUint,
}

impl Enumeration {
    fn from_sorted(matrices: Vec<Matrix<i64>>) -> Self {
        let count = BigUint::from(matrices.len());
        Enumeration { matrices, count }
    }

    fn from_set(set: BTreeSet<Matrix<i64>>) -> Self {
        Enumeration::from_sorted(set.into_iter().collect())
    }

    /// Matrices in the text format separated by blank lines, then a
    /// `count:` line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for m in &self.matrices {
            out.push_str(&m.to_string());
            out.push('\n');
        }
        out.push_str(&format!("count: {}\n", self.count));
        out
    }

    /// A JSON array of matrices whose final element is `{"count": N}`.
    pub fn to_json(&self) -> Value {
        let mut items: Vec<Value> = self
            .matrices
            .iter()
            .map(|m| serde_json::to_value(m).expect("matrix serializes"))
            .collect();
        items.push(json!({ "count": count_json(&self.count) }));
        Value::Array(items)
    }
}

/// Counts as JSON numbers when they fit in `u64`, else decimal strings.
pub fn count_json(n: &BigUint) -> Value {
    match n.to_u64() {
        Some(v) => Value::from(v),
        None => Value::from(n.to_string()),
    }
}

pub fn to_int(m: &Matrix<i64>) -> IntMatrix {
    m.map(|&v| BigInt::from(v))
}

/// Dense Penrose test for `n × m` candidates against an `m × n` matrix.
struct PenroseTester {
    a: Vec<i128>,
    m: usize,
    n: usize,
    spec: PenroseSpec,
}

impl PenroseTester {
    fn new(a: &TernaryMatrix, spec: PenroseSpec) -> Self {
        PenroseTester {
            a: a.entries().iter().map(|&v| i128::from(v)).collect(),
            m: a.rows(),
            n: a.cols(),
            spec,
        }
    }

    fn accepts(&self, x: &[i64]) -> bool {
        match self.spec {
            PenroseSpec::One => self.eq1(x),
            PenroseSpec::Two => self.eq2(x),
            PenroseSpec::OneTwo => self.eq1(x) && self.eq2(x),
        }
    }

    /// `A X A = A`.
    fn eq1(&self, x: &[i64]) -> bool {
        let (m, n) = (self.m, self.n);
        let mut ax = vec![0i128; m * m];
        for i in 0..m {
            for k in 0..n {
                let a = self.a[i * n + k];
                if a != 0 {
                    for j in 0..m {
                        ax[i * m + j] += a * i128::from(x[k * m + j]);
                    }
                }
            }
        }
        for i in 0..m {
            for j in 0..n {
                let v: i128 = (0..m).map(|k| ax[i * m + k] * self.a[k * n + j]).sum();
                if v != self.a[i * n + j] {
                    return false;
                }
            }
        }
        true
    }

    /// `X A X = X`.
    fn eq2(&self, x: &[i64]) -> bool {
        let (m, n) = (self.m, self.n);
        let mut xa = vec![0i128; n * n];
        for i in 0..n {
            for k in 0..m {
                let xv = i128::from(x[i * m + k]);
                if xv != 0 {
                    for j in 0..n {
                        xa[i * n + j] += xv * self.a[k * n + j];
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..m {
                let v: i128 = (0..n).map(|k| xa[i * n + k] * i128::from(x[k * m + j])).sum();
                if v != i128::from(x[i * m + j]) {
                    return false;
                }
            }
        }
        true
    }
}

/// Number of leading cells fixed per parallel task.
fn prefix_len(cells: usize, base: usize) -> usize {
    let mut k = 0;
    let mut tasks = 1usize;
    while k < cells && tasks < 512 {
        tasks *= base;
        k += 1;
    }
    k
}

/// Visits every population-valued vector of length `cells` in odometer
/// order, split into independent prefix tasks, and concatenates the
/// per-task results in order.
fn odometer_scan<R: Send>(
    cells: usize,
    population: &Population,
    task: impl Fn(&mut dyn FnMut(&mut dyn FnMut(&[i64]))) -> R + Sync,
) -> Vec<R> {
    let values = population.values();
    let base = values.len();
    let k = prefix_len(cells, base);
    let tasks = base.pow(k as u32);
    (0..tasks)
        .into_par_iter()
        .map(|prefix| {
            let mut digits = vec![0usize; cells];
            let mut code = prefix;
            for d in (0..k).rev() {
                digits[d] = code % base;
                code /= base;
            }
            let mut entries: Vec<i64> = digits.iter().map(|&d| values[d]).collect();
            let mut visit = |f: &mut dyn FnMut(&[i64])| loop {
                f(&entries);
                let mut pos = cells;
                loop {
                    if pos == k {
                        return;
                    }
                    pos -= 1;
                    digits[pos] += 1;
                    if digits[pos] < base {
                        entries[pos] = values[digits[pos]];
                        break;
                    }
                    digits[pos] = 0;
                    entries[pos] = values[0];
                }
            };
            task(&mut visit)
        })
        .collect()
}

fn rank_of(x: &Matrix<i64>) -> usize {
    exact_rank(&to_int(x))
}

/// Every population-valued `X` satisfying the Penrose equations of `spec`
/// for `A` (and of the given rank, if any), in odometer order.
pub fn brute_force_inverses(
    a: &TernaryMatrix,
    spec: PenroseSpec,
    population: &Population,
    rank_filter: Option<usize>,
    options: &EnumOptions,
) -> Result<Enumeration> {
    let (m, n) = a.shape();
    let cells = m * n;
    options.check(cells, population)?;
    let tester = PenroseTester::new(a, spec);
    let chunks = options.run(|| {
        odometer_scan(cells, population, |visit| {
            let mut found = Vec::new();
            visit(&mut |x: &[i64]| {
                if tester.accepts(x) {
                    let mat = Matrix::new(n, m, x.to_vec()).expect("shape");
                    if rank_filter.is_none_or(|r| rank_of(&mat) == r) {
                        found.push(mat);
                    }
                }
            });
            found
        })
    });
    Ok(Enumeration::from_sorted(chunks.into_iter().flatten().collect()))
}

/// Count-only variant of [`brute_force_inverses`].
pub fn brute_force_count(
    a: &TernaryMatrix,
    spec: PenroseSpec,
    population: &Population,
    rank_filter: Option<usize>,
    options: &EnumOptions,
) -> Result<BigUint> {
    let (m, n) = a.shape();
    let cells = m * n;
    options.check(cells, population)?;
    let tester = PenroseTester::new(a, spec);
    let chunks = options.run(|| {
        odometer_scan(cells, population, |visit| {
            let mut count = 0u64;
            visit(&mut |x: &[i64]| {
                if tester.accepts(x)
                    && rank_filter.is_none_or(|r| {
                        rank_of(&Matrix::new(n, m, x.to_vec()).expect("shape")) == r
                    })
                {
                    count += 1;
                }
            });
            count
        })
    });
    Ok(chunks.into_iter().map(BigUint::from).sum())
}

/// Number of population vectors of each length-`size` sum.
fn sum_distribution(size: usize, population: &Population) -> BTreeMap<i64, BigUint> {
    let mut dist = BTreeMap::from([(0i64, BigUint::one())]);
    for _ in 0..size {
        let mut next: BTreeMap<i64, BigUint> = BTreeMap::new();
        for (s, c) in &dist {
            for &v in population.values() {
                *next.entry(s + v).or_default() += c;
            }
        }
        dist = next;
    }
    dist
}

/// All population vectors of length `size` with entry sum `target`, in
/// odometer order.
fn fillings(size: usize, target: i64, population: &Population) -> Vec<Vec<i64>> {
    fn go(
        pos: usize,
        size: usize,
        remaining: i64,
        pop: &Population,
        cur: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        if pos == size {
            if remaining == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let left = (size - pos - 1) as i64;
        for &v in pop.values() {
            let rest = remaining - v;
            if rest < left * pop.min() || rest > left * pop.max() {
                continue;
            }
            cur.push(v);
            go(pos + 1, size, rest, pop, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, size, target, population, &mut Vec::with_capacity(size), &mut out);
    out
}

/// Integer form of a sum system: per block, per constraint coefficients.
struct IntegerSystem {
    /// `(row_block, col_block)` of every block, in row-major block order.
    blocks: Vec<(usize, usize)>,
    sizes: Vec<usize>,
    /// `coeffs[k][b]` for constraint `k` and block `b`.
    coeffs: Vec<Vec<i64>>,
    rhs: Vec<i64>,
}

impl IntegerSystem {
    fn new(system: &SumConstraintSystem) -> Self {
        let p = &system.partition;
        let mut blocks = Vec::new();
        let mut sizes = Vec::new();
        for j in 0..p.row_blocks() {
            for i in 0..p.col_blocks() {
                blocks.push((j, i));
                sizes.push(p.block_size(j, i));
            }
        }
        let index: HashMap<(usize, usize), usize> =
            blocks.iter().enumerate().map(|(b, &key)| (key, b)).collect();
        let mut coeffs = Vec::new();
        let mut rhs = Vec::new();
        for c in &system.constraints {
            let l = lcm_of_denominators(c);
            let mut row = vec![0i64; blocks.len()];
            for (key, k) in &c.terms {
                row[index[key]] += (k * l).to_integer();
            }
            coeffs.push(row);
            rhs.push((c.rhs * l).to_integer());
        }
        IntegerSystem { blocks, sizes, coeffs, rhs }
    }

    /// Blocks that appear with a nonzero coefficient.
    fn constrained(&self) -> Vec<usize> {
        (0..self.blocks.len())
            .filter(|&b| self.coeffs.iter().any(|row| row[b] != 0))
            .collect()
    }

    /// Feasible sum profiles over the constrained blocks.
    fn profiles(&self, dists: &[BTreeMap<i64, BigUint>], constrained: &[usize]) -> Vec<Vec<i64>> {
        let k = self.coeffs.len();
        // suffix bounds on each constraint's remaining contribution
        let mut lo = vec![vec![0i64; k]; constrained.len() + 1];
        let mut hi = vec![vec![0i64; k]; constrained.len() + 1];
        for pos in (0..constrained.len()).rev() {
            let b = constrained[pos];
            let (tmin, tmax) = bounds(&dists[b]);
            for c in 0..k {
                let co = self.coeffs[c][b];
                let (x, y) = (co * tmin, co * tmax);
                lo[pos][c] = lo[pos + 1][c] + x.min(y);
                hi[pos][c] = hi[pos + 1][c] + x.max(y);
            }
        }
        let mut out = Vec::new();
        let mut partial = vec![0i64; k];
        let mut cur = Vec::with_capacity(constrained.len());
        self.search(0, constrained, dists, &lo, &hi, &mut partial, &mut cur, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        &self,
        pos: usize,
        constrained: &[usize],
        dists: &[BTreeMap<i64, BigUint>],
        lo: &[Vec<i64>],
        hi: &[Vec<i64>],
        partial: &mut Vec<i64>,
        cur: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        let feasible = (0..self.rhs.len()).all(|c| {
            let need = self.rhs[c] - partial[c];
            lo[pos][c] <= need && need <= hi[pos][c]
        });
        if !feasible {
            return;
        }
        if pos == constrained.len() {
            out.push(cur.clone());
            return;
        }
        let b = constrained[pos];
        for &t in dists[b].keys() {
            for c in 0..self.rhs.len() {
                partial[c] += self.coeffs[c][b] * t;
            }
            cur.push(t);
            self.search(pos + 1, constrained, dists, lo, hi, partial, cur, out);
            cur.pop();
            for c in 0..self.rhs.len() {
                partial[c] -= self.coeffs[c][b] * t;
            }
        }
    }
}

fn bounds(dist: &BTreeMap<i64, BigUint>) -> (i64, i64) {
    (
        *dist.keys().next().expect("nonempty"),
        *dist.keys().next_back().expect("nonempty"),
    )
}

/// Number of population-valued members of a sum system, without
/// materializing them.
pub fn count_sum_constrained(system: &SumConstraintSystem, population: &Population) -> BigUint {
    let sys = IntegerSystem::new(system);
    let dists: Vec<_> = sys.sizes.iter().map(|&s| sum_distribution(s, population)).collect();
    let constrained = sys.constrained();
    let free_cells: usize = (0..sys.blocks.len())
        .filter(|b| !constrained.contains(b))
        .map(|b| sys.sizes[b])
        .sum();
    let free = BigUint::from(population.len()).pow(free_cells as u32);
    let total: BigUint = sys
        .profiles(&dists, &constrained)
        .iter()
        .map(|profile| {
            constrained
                .iter()
                .zip(profile)
                .map(|(&b, t)| dists[b][t].clone())
                .product::<BigUint>()
        })
        .sum();
    total * free
}

/// All population-valued members of a sum system, in odometer order.
pub fn enumerate_sum_constrained(
    system: &SumConstraintSystem,
    population: &Population,
) -> Enumeration {
    let sys = IntegerSystem::new(system);
    let dists: Vec<_> = sys.sizes.iter().map(|&s| sum_distribution(s, population)).collect();
    let constrained = sys.constrained();
    let profiles = sys.profiles(&dists, &constrained);
    let (n, m) = system.shape;
    let p = &system.partition;
    let mut fill_cache: HashMap<(usize, Option<i64>), Vec<Vec<i64>>> = HashMap::new();
    let mut out = Vec::new();
    for profile in &profiles {
        // per block: the admissible fillings
        let mut options: Vec<&Vec<Vec<i64>>> = Vec::with_capacity(sys.blocks.len());
        let targets: Vec<Option<i64>> = (0..sys.blocks.len())
            .map(|b| constrained.iter().position(|&c| c == b).map(|pos| profile[pos]))
            .collect();
        for (b, target) in targets.iter().enumerate() {
            let key = (sys.sizes[b], *target);
            fill_cache.entry(key).or_insert_with(|| match target {
                Some(t) => fillings(sys.sizes[b], *t, population),
                None => all_vectors(sys.sizes[b], population),
            });
        }
        for (b, target) in targets.iter().enumerate() {
            options.push(&fill_cache[&(sys.sizes[b], *target)]);
        }
        if options.iter().any(|o| o.is_empty()) {
            continue;
        }
        let mut choice = vec![0usize; options.len()];
        'fill: loop {
            let mut entries = vec![0i64; n * m];
            for (b, &(j, i)) in sys.blocks.iter().enumerate() {
                let fill = &options[b][choice[b]];
                let cols = p.col_range(i);
                for (idx, (r, c)) in p
                    .row_range(j)
                    .flat_map(|r| cols.clone().map(move |c| (r, c)))
                    .enumerate()
                {
                    entries[r * m + c] = fill[idx];
                }
            }
            out.push(Matrix::new(n, m, entries).expect("shape"));
            let mut pos = options.len();
            loop {
                if pos == 0 {
                    break 'fill;
                }
                pos -= 1;
                choice[pos] += 1;
                if choice[pos] < options[pos].len() {
                    break;
                }
                choice[pos] = 0;
            }
        }
    }
    out.sort_unstable();
    Enumeration::from_sorted(out)
}

fn all_vectors(size: usize, population: &Population) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..size {
        out = out
            .into_iter()
            .flat_map(|v| {
                population.values().iter().map(move |&x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn materialize_product(
    f: &RankOneProductFamily,
    population: &Population,
    options: &EnumOptions,
) -> Result<BTreeSet<Matrix<i64>>> {
    let (n, m) = f.shape;
    options.check(n.max(m), population)?;
    let forms = f.expanded_forms();
    let dot = |a: &[i64], b: &[i64]| -> i64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let qs: Vec<(Vec<i64>, Vec<i64>)> = all_vectors(m, population)
        .into_iter()
        .map(|q| {
            let g = forms.iter().map(|(_, b)| dot(b, &q)).collect();
            (q, g)
        })
        .collect();
    let mut out = BTreeSet::new();
    for p in all_vectors(n, population) {
        let beta: Vec<i64> = forms.iter().map(|(a, _)| dot(a, &p)).collect();
        if beta.iter().all(|&b| b == 0) {
            continue;
        }
        for (q, gamma) in &qs {
            if dot(&beta, gamma) != 1 {
                continue;
            }
            let entries: Vec<i64> = p.iter().flat_map(|&pi| q.iter().map(move |&qj| pi * qj)).collect();
            if entries.iter().all(|&v| population.contains(v)) {
                out.insert(Matrix::new(n, m, entries).expect("shape"));
            }
        }
    }
    Ok(out)
}

fn materialize_column_scaled(
    f: &ColumnScaledFamily,
    population: &Population,
    options: &EnumOptions,
) -> Result<BTreeSet<Matrix<i64>>> {
    let (n, m) = f.shape;
    options.check(n.max(m.saturating_sub(1)), population)?;
    let forms = f.expanded_forms();
    let x1s: Vec<(Vec<i64>, Vec<i64>)> = all_vectors(n, population)
        .into_iter()
        .filter(|x| x.iter().any(|&v| v != 0))
        .map(|x| {
            let vals = forms.iter().map(|g| g.iter().zip(&x).map(|(a, b)| a * b).sum()).collect();
            (x, vals)
        })
        .collect();
    let mut out = BTreeSet::new();
    for lambdas in all_vectors(m - 1, population) {
        let scale: Vec<i64> = std::iter::once(1).chain(lambdas.iter().copied()).collect();
        for (x1, vals) in &x1s {
            let cond: i64 = scale.iter().zip(vals).map(|(l, v)| l * v).sum();
            if cond != 1 {
                continue;
            }
            let entries: Vec<i64> =
                x1.iter().flat_map(|&x| scale.iter().map(move |&l| l * x)).collect();
            if entries.iter().all(|&v| population.contains(v)) {
                out.insert(Matrix::new(n, m, entries).expect("shape"));
            }
        }
    }
    Ok(out)
}

fn materialize_set(
    family: &InverseFamily,
    population: &Population,
    options: &EnumOptions,
) -> Result<BTreeSet<Matrix<i64>>> {
    match &family.body {
        FamilyBody::Sum(s) => Ok(enumerate_sum_constrained(s, population).matrices.into_iter().collect()),
        FamilyBody::Product(p) => materialize_product(p, population, options),
        FamilyBody::ColumnScaled(c) => materialize_column_scaled(c, population, options),
        FamilyBody::Union(u) => {
            let mut out = BTreeSet::new();
            if u.include_zero && population.contains(0) {
                let (n, m) = family.shape;
                out.insert(Matrix::new(n, m, vec![0; n * m]).expect("shape"));
            }
            for (_, f) in &u.components {
                out.extend(materialize_set(f, population, options)?);
            }
            Ok(out)
        }
    }
}

/// The population-valued members of a family, deduplicated and in odometer
/// order.
pub fn materialize_family(
    family: &InverseFamily,
    population: &Population,
    options: &EnumOptions,
) -> Result<Enumeration> {
    Ok(Enumeration::from_set(materialize_set(family, population, options)?))
}

/// Member count of a family; constraint systems are counted without
/// materializing.
pub fn family_count(
    family: &InverseFamily,
    population: &Population,
    options: &EnumOptions,
) -> Result<BigUint> {
    match &family.body {
        FamilyBody::Sum(s) => Ok(count_sum_constrained(s, population)),
        _ => Ok(materialize_family(family, population, options)?.count),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetComparison {
    pub equal: bool,
    pub only_in_a: Vec<Matrix<i64>>,
    pub only_in_b: Vec<Matrix<i64>>,
}

pub fn set_equal(a: &[Matrix<i64>], b: &[Matrix<i64>]) -> SetComparison {
    let sa: BTreeSet<&Matrix<i64>> = a.iter().collect();
    let sb: BTreeSet<&Matrix<i64>> = b.iter().collect();
    let only_in_a: Vec<_> = sa.difference(&sb).map(|m| (*m).clone()).collect();
    let only_in_b: Vec<_> = sb.difference(&sa).map(|m| (*m).clone()).collect();
    SetComparison {
        equal: only_in_a.is_empty() && only_in_b.is_empty(),
        only_in_a,
        only_in_b,
    }
}
