//! Inverse families as data: each family names the result it comes from,
//! the shape of its members and a checkable constraint payload.
//!
//! Block indices into a [`BlockPartition`] are `(row_block, col_block)` of
//! `X`. In the usual notation `X = (X_1 | X_2 | ...)` with `X_i` split into
//! row blocks `X_i1, X_i2, ...`, block `X_ij` is `(j - 1, i - 1)` here.

#![allow(non_snake_case)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::classify::{
    class_membership, full_form, rank2_class3_detail, FullKind, Rank2Structure,
};
use crate::error::{domain_err, shape_err, Error, Result};
use crate::matrix::{
    block_sums, exact_rank, penrose_check, ternary_rank, BlockPartition, IntMatrix, Matrix,
    RatMatrix, TernaryMatrix,
};

pub type Rat = Rational64;

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

fn big(r: &Rat) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn rat_json(r: &Rat) -> Value {
    json!({ "num": r.numer(), "den": r.denom() })
}

/// Which generalized inverse set a family describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum InverseSpec {
    #[serde(rename = "{1}")]
    Inner,
    #[serde(rename = "{2}")]
    Outer,
    /// Rank-one outer inverses.
    #[serde(rename = "{2}_1")]
    OuterRankOne,
    /// Outer inverses of the same rank as the matrix.
    #[serde(rename = "{2}_r")]
    OuterFullRank,
    #[serde(rename = "{1,2}")]
    Reflexive,
}

/// `Σ coeff · Ξ(block) = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumConstraint {
    pub terms: Vec<((usize, usize), Rat)>,
    pub rhs: Rat,
}

impl SumConstraint {
    pub fn new(terms: &[((usize, usize), i64)], rhs: Rat) -> Self {
        SumConstraint {
            terms: terms.iter().map(|&(b, c)| (b, Rat::from_integer(c))).collect(),
            rhs,
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "terms": self.terms.iter().map(|((j, i), c)| json!({
                "block": [j, i],
                "coeff": rat_json(c),
            })).collect::<Vec<_>>(),
            "rhs": rat_json(&self.rhs),
        })
    }
}

/// Linear equations over the block sums of an `n × m` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumConstraintSystem {
    pub shape: (usize, usize),
    pub partition: BlockPartition,
    pub constraints: Vec<SumConstraint>,
}

impl SumConstraintSystem {
    pub fn new(partition: BlockPartition, constraints: Vec<SumConstraint>) -> Result<Self> {
        for c in &constraints {
            for &((j, i), _) in &c.terms {
                if j >= partition.row_blocks() || i >= partition.col_blocks() {
                    return shape_err(format!("constraint refers to missing block ({j}, {i})"));
                }
            }
        }
        Ok(SumConstraintSystem {
            shape: (partition.rows(), partition.cols()),
            partition,
            constraints,
        })
    }

    /// Whether the given block sums (indexed `[row_block][col_block]`)
    /// satisfy every equation.
    pub fn satisfied_by(&self, sums: &[Vec<BigRational>]) -> bool {
        self.constraints.iter().all(|c| {
            let lhs = c
                .terms
                .iter()
                .fold(BigRational::zero(), |acc, ((j, i), k)| acc + &sums[*j][*i] * big(k));
            lhs == big(&c.rhs)
        })
    }

    pub fn contains_rational(&self, x: &RatMatrix) -> Result<bool> {
        Ok(self.satisfied_by(&block_sums(x, &self.partition)?))
    }

    pub fn contains(&self, x: &IntMatrix) -> Result<bool> {
        self.contains_rational(&x.to_rational())
    }

    fn partition_json(&self) -> Value {
        json!({
            "row_widths": self.partition.row_widths(),
            "col_widths": self.partition.col_widths(),
        })
    }
}

/// Widths of the maximal runs on which `key` is constant.
fn runs<K: PartialEq>(len: usize, key: impl Fn(usize) -> K) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for idx in 0..len {
        match out.last_mut() {
            Some((start, width)) if key(*start) == key(idx) => *width += 1,
            _ => out.push((idx, 1)),
        }
    }
    out
}

/// The system `row_forms[i]ᵀ · X · col_forms[j] = rhs(i, j)` for every pair
/// `(i, j)`, on the coarsest partition where all coefficients are constant.
fn bilinear_system(
    n: usize,
    m: usize,
    row_forms: &[Vec<i64>],
    col_forms: &[Vec<i64>],
    rhs: impl Fn(usize, usize) -> Rat,
) -> Result<SumConstraintSystem> {
    let row_runs = runs(n, |r| row_forms.iter().map(|f| f[r]).collect::<Vec<_>>());
    let col_runs = runs(m, |c| col_forms.iter().map(|f| f[c]).collect::<Vec<_>>());
    let partition = BlockPartition::new(
        row_runs.iter().map(|r| r.1).collect(),
        col_runs.iter().map(|r| r.1).collect(),
    )?;
    let mut constraints = Vec::new();
    for (i, v) in row_forms.iter().enumerate() {
        for (j, u) in col_forms.iter().enumerate() {
            let mut terms = Vec::new();
            for (rb, &(r0, _)) in row_runs.iter().enumerate() {
                for (cb, &(c0, _)) in col_runs.iter().enumerate() {
                    let k = v[r0] * u[c0];
                    if k != 0 {
                        terms.push(((rb, cb), Rat::from_integer(k)));
                    }
                }
            }
            constraints.push(SumConstraint { terms, rhs: rhs(i, j) });
        }
    }
    SumConstraintSystem::new(partition, constraints)
}

/// `X = p qᵀ` with `Σ_t (p_form_t · p)(q_form_t · q) = 1`. Forms are
/// constant on the blocks of `p_widths` / `q_widths` and stored per block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankOneProductFamily {
    pub shape: (usize, usize),
    pub p_widths: Vec<usize>,
    pub q_widths: Vec<usize>,
    pub terms: Vec<ProductTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProductTerm {
    pub p_form: Vec<i64>,
    pub q_form: Vec<i64>,
}

impl RankOneProductFamily {
    /// Family of rank-one `X` with `qᵀ K p = 1` for the kernel matrix `K`
    /// (`m × n`). This is exactly the set of rank-one outer inverses of `K`.
    fn from_kernel(k: &TernaryMatrix) -> Self {
        let (m, n) = k.shape();
        // rows grouped into classes r ~ ±r give qᵀKp = Σ_t (σ_t·q)(v_t·p)
        let mut reps: Vec<Vec<i8>> = Vec::new();
        let mut q_full: Vec<Vec<i64>> = Vec::new();
        for r in 0..m {
            let row = k.row(r);
            let Some(lead) = row.iter().copied().find(|&t| t != 0) else {
                continue;
            };
            let rep: Vec<i8> = row.iter().map(|&t| t * lead).collect();
            let t = match reps.iter().position(|x| *x == rep) {
                Some(t) => t,
                None => {
                    reps.push(rep);
                    q_full.push(vec![0; m]);
                    reps.len() - 1
                }
            };
            q_full[t][r] = i64::from(lead);
        }
        let p_full: Vec<Vec<i64>> = reps
            .iter()
            .map(|v| v.iter().map(|&t| i64::from(t)).collect())
            .collect();
        let p_runs = runs(n, |j| p_full.iter().map(|f| f[j]).collect::<Vec<_>>());
        let q_runs = runs(m, |i| q_full.iter().map(|f| f[i]).collect::<Vec<_>>());
        let terms = p_full
            .iter()
            .zip(&q_full)
            .map(|(pf, qf)| ProductTerm {
                p_form: p_runs.iter().map(|&(s, _)| pf[s]).collect(),
                q_form: q_runs.iter().map(|&(s, _)| qf[s]).collect(),
            })
            .collect();
        RankOneProductFamily {
            shape: (n, m),
            p_widths: p_runs.iter().map(|r| r.1).collect(),
            q_widths: q_runs.iter().map(|r| r.1).collect(),
            terms,
        }
    }

    /// Per-entry coefficients of each term's forms.
    pub fn expanded_forms(&self) -> Vec<(Vec<i64>, Vec<i64>)> {
        let expand = |form: &[i64], widths: &[usize]| -> Vec<i64> {
            form.iter()
                .zip(widths)
                .flat_map(|(&c, &w)| std::iter::repeat_n(c, w))
                .collect()
        };
        self.terms
            .iter()
            .map(|t| (expand(&t.p_form, &self.p_widths), expand(&t.q_form, &self.q_widths)))
            .collect()
    }

    /// The condition value `Σ_t (a_t·p)(b_t·q)` for integer vectors.
    pub fn condition(&self, p: &[i64], q: &[i64]) -> i64 {
        self.expanded_forms()
            .iter()
            .map(|(a, b)| dot_i64(a, p) * dot_i64(b, q))
            .sum()
    }

    pub fn contains(&self, x: &IntMatrix) -> Result<bool> {
        check_shape(x, self.shape)?;
        let Some((p, q)) = rank_one_factors(x) else {
            return Ok(false);
        };
        let value = self.expanded_forms().iter().fold(BigRational::zero(), |acc, (a, b)| {
            acc + dot_rat(a, &p) * dot_rat(b, &q)
        });
        Ok(value.is_one())
    }
}

fn dot_i64(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dot_rat(a: &[i64], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .fold(BigRational::zero(), |acc, (&x, y)| acc + y * BigRational::from_integer(x.into()))
}

/// `X = p qᵀ` over the rationals when `X` has rank exactly one.
fn rank_one_factors(x: &IntMatrix) -> Option<(Vec<BigRational>, Vec<BigRational>)> {
    if exact_rank(x) != 1 {
        return None;
    }
    let c0 = (0..x.cols()).find(|&c| (0..x.rows()).any(|r| !x.get(r, c).is_zero()))?;
    let r0 = (0..x.rows()).find(|&r| !x.get(r, c0).is_zero())?;
    let pivot = x.get(r0, c0).clone();
    let p = (0..x.rows())
        .map(|r| BigRational::from_integer(x.get(r, c0).clone()))
        .collect();
    let q = (0..x.cols())
        .map(|c| BigRational::new(x.get(r0, c).clone(), pivot.clone()))
        .collect();
    Some((p, q))
}

fn check_shape<T>(x: &Matrix<T>, shape: (usize, usize)) -> Result<()> {
    if x.shape() != shape {
        return shape_err(format!(
            "family members are {}x{}, got {}x{}",
            shape.0,
            shape.1,
            x.rows(),
            x.cols()
        ));
    }
    Ok(())
}

/// `X = (X1 | λ1·X1 | ... | λ_{m-1}·X1)` with
/// `Σ_i λ_{i-1} · (A_i · X1) = 1` and `λ0 = 1`.
///
/// Every member has a nonzero first column, so rank-one outer inverses
/// whose first column vanishes are not represented.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnScaledFamily {
    pub shape: (usize, usize),
    /// Blocks of `X1` on which every row form is constant.
    pub x1_widths: Vec<usize>,
    /// For each `λ` index `i` (with `λ0 = 1`), the coefficient of each
    /// `X1` block in `A_{i+1} · X1`.
    pub forms: Vec<Vec<i64>>,
}

impl ColumnScaledFamily {
    pub fn expanded_forms(&self) -> Vec<Vec<i64>> {
        self.forms
            .iter()
            .map(|f| {
                f.iter()
                    .zip(&self.x1_widths)
                    .flat_map(|(&c, &w)| std::iter::repeat_n(c, w))
                    .collect()
            })
            .collect()
    }

    pub fn contains(&self, x: &IntMatrix) -> Result<bool> {
        check_shape(x, self.shape)?;
        let (n, m) = self.shape;
        let x1: Vec<BigInt> = x.column(0);
        let Some(pivot) = x1.iter().position(|v| !v.is_zero()) else {
            return Ok(false);
        };
        let mut lambdas = vec![BigRational::one()];
        for c in 1..m {
            let lambda = BigRational::new(x.get(pivot, c).clone(), x1[pivot].clone());
            let scaled_ok = (0..n).all(|r| {
                BigRational::from_integer(x.get(r, c).clone())
                    == &lambda * BigRational::from_integer(x1[r].clone())
            });
            if !scaled_ok {
                return Ok(false);
            }
            lambdas.push(lambda);
        }
        let x1r: Vec<BigRational> = x1.into_iter().map(BigRational::from_integer).collect();
        let value = self
            .expanded_forms()
            .iter()
            .zip(&lambdas)
            .fold(BigRational::zero(), |acc, (f, l)| acc + l * dot_rat(f, &x1r));
        Ok(value.is_one())
    }
}

/// Union of families, each tagged with the rank of its members, plus the
/// zero matrix when `include_zero` is set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitUnion {
    pub include_zero: bool,
    pub components: Vec<(usize, InverseFamily)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyBody {
    Sum(SumConstraintSystem),
    Product(RankOneProductFamily),
    ColumnScaled(ColumnScaledFamily),
    Union(ExplicitUnion),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseFamily {
    pub theorem_id: String,
    pub spec: InverseSpec,
    /// `(n, m)`: members are `n × m` for an `m × n` matrix.
    pub shape: (usize, usize),
    pub body: FamilyBody,
    pub notes: Vec<String>,
}

const LAMBDA_GAP_NOTE: &str = "members all have a nonzero first column; rank-one outer inverses \
                               with a zero first column are not represented";

impl InverseFamily {
    fn new(theorem_id: &str, spec: InverseSpec, shape: (usize, usize), body: FamilyBody) -> Self {
        InverseFamily {
            theorem_id: theorem_id.to_string(),
            spec,
            shape,
            body,
            notes: Vec::new(),
        }
    }

    fn with_note(mut self, note: &str) -> Self {
        self.notes.push(note.to_string());
        self
    }

    pub fn kind(&self) -> &'static str {
        match self.body {
            FamilyBody::Sum(_) => "sum_constraints",
            FamilyBody::Product(_) => "rank_one_product",
            FamilyBody::ColumnScaled(_) => "column_scaled",
            FamilyBody::Union(_) => "union",
        }
    }

    pub fn contains(&self, x: &IntMatrix) -> Result<bool> {
        check_shape(x, self.shape)?;
        match &self.body {
            FamilyBody::Sum(s) => s.contains(x),
            FamilyBody::Product(p) => p.contains(x),
            FamilyBody::ColumnScaled(c) => c.contains(x),
            FamilyBody::Union(u) => {
                if u.include_zero && x.is_zero() {
                    return Ok(true);
                }
                for (_, f) in &u.components {
                    if f.contains(x)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    /// Membership of a rational matrix; only constraint systems (and unions
    /// of them) accept non-integer members.
    pub fn contains_rational(&self, x: &RatMatrix) -> Result<bool> {
        check_shape(x, self.shape)?;
        match &self.body {
            FamilyBody::Sum(s) => s.contains_rational(x),
            _ => match x.to_integer() {
                Some(xi) => self.contains(&xi),
                None => Ok(false),
            },
        }
    }

    pub fn to_json(&self) -> Value {
        let (partition, constraints, extra) = match &self.body {
            FamilyBody::Sum(s) => (
                s.partition_json(),
                Value::from(s.constraints.iter().map(SumConstraint::to_json).collect::<Vec<_>>()),
                Value::Null,
            ),
            FamilyBody::Product(p) => (
                json!({ "p_widths": p.p_widths, "q_widths": p.q_widths }),
                json!([{ "terms": p.terms, "rhs": rat_json(&Rat::one()) }]),
                Value::Null,
            ),
            FamilyBody::ColumnScaled(c) => (
                json!({ "x1_widths": c.x1_widths }),
                json!([{ "lambda_forms": c.forms, "rhs": rat_json(&Rat::one()) }]),
                Value::Null,
            ),
            FamilyBody::Union(u) => (
                Value::Null,
                Value::Null,
                json!({
                    "include_zero": u.include_zero,
                    "components": u.components.iter().map(|(rank, f)| json!({
                        "rank": rank,
                        "family": f.to_json(),
                    })).collect::<Vec<_>>(),
                }),
            ),
        };
        let mut out = json!({
            "theorem_id": self.theorem_id,
            "spec": self.spec,
            "shape": [self.shape.0, self.shape.1],
            "kind": self.kind(),
            "partition": partition,
            "constraints": constraints,
            "notes": self.notes,
        });
        if !extra.is_null() {
            out["union"] = extra;
        }
        out
    }
}

impl Serialize for InverseFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

fn positive(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        return domain_err(format!("{name} must be at least 1"));
    }
    Ok(())
}

fn sum_family(id: &str, spec: InverseSpec, system: SumConstraintSystem) -> InverseFamily {
    InverseFamily::new(id, spec, system.shape, FamilyBody::Sum(system))
}

/// `(1_{mn}){1}`: every `X` with `Ξ(X) = 1`.
pub fn inner_full_type_I(m: usize, n: usize) -> Result<InverseFamily> {
    positive("m", m)?;
    positive("n", n)?;
    let system = SumConstraintSystem::new(
        BlockPartition::single(n, m),
        vec![SumConstraint::new(&[((0, 0), 1)], Rat::one())],
    )?;
    Ok(sum_family("FullTypeI", InverseSpec::Inner, system))
}

/// `(±1_{mn1} | ∓1_{mn2}){1}`: `sign·(Ξ(X_1) − Ξ(X_2)) = 1` over the row
/// split `(n1 | n2)` of `X`.
pub fn inner_full_type_II(m: usize, n1: usize, n2: usize, sign: i8) -> Result<InverseFamily> {
    positive("m", m)?;
    positive("n1", n1)?;
    positive("n2", n2)?;
    if sign != 1 && sign != -1 {
        return domain_err("sign must be +1 or -1");
    }
    let s = i64::from(sign);
    let system = SumConstraintSystem::new(
        BlockPartition::new(vec![n1, n2], vec![m])?,
        vec![SumConstraint::new(&[((0, 0), s), ((1, 0), -s)], Rat::one())],
    )?;
    Ok(sum_family("Thm3.5", InverseSpec::Inner, system))
}

/// Single-parameter-set description of `(±1_{mn1} | ∓1_{mn2}){1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TypeIIParametric {
    pub m: usize,
    pub n1: usize,
    pub n2: usize,
    pub sign: i8,
}

/// An affine expression `constant + Σ coeffs[k]·x_{k+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Affine {
    pub constant: i64,
    pub coeffs: Vec<i64>,
}

pub fn inner_type_II_parametric(m: usize, n1: usize, n2: usize, sign: i8) -> Result<TypeIIParametric> {
    positive("m", m)?;
    positive("n1", n1)?;
    positive("n2", n2)?;
    if sign != 1 && sign != -1 {
        return domain_err("sign must be +1 or -1");
    }
    Ok(TypeIIParametric { m, n1, n2, sign })
}

impl TypeIIParametric {
    pub fn parameter_count(&self) -> usize {
        (self.n1 + self.n2) * self.m - 1
    }

    /// Entries of `X` as affine forms in the parameters, row-major.
    pub fn symbolic(&self) -> Vec<Affine> {
        let k = self.parameter_count();
        let n = self.n1 + self.n2;
        let mut out = Vec::with_capacity(n * self.m);
        for r in 0..n {
            let row_sign = if r < self.n1 {
                i64::from(self.sign)
            } else {
                -i64::from(self.sign)
            };
            for c in 0..self.m {
                let idx = r * self.m + c;
                let mut coeffs = vec![0; k];
                let constant = if idx == 0 {
                    coeffs.iter_mut().for_each(|v| *v = -row_sign);
                    row_sign
                } else {
                    coeffs[idx - 1] = row_sign;
                    0
                };
                out.push(Affine { constant, coeffs });
            }
        }
        out
    }

    pub fn emit(&self, params: &[i64]) -> Result<IntMatrix> {
        if params.len() != self.parameter_count() {
            return shape_err(format!(
                "expected {} parameters, got {}",
                self.parameter_count(),
                params.len()
            ));
        }
        let entries: Vec<i64> = self
            .symbolic()
            .iter()
            .map(|a| a.constant + dot_i64(&a.coeffs, params))
            .collect();
        IntMatrix::from_i64(self.n1 + self.n2, self.m, &entries)
    }
}

/// `A{1}` for any rank-one `A = ζηᵀ`: the single equation `ηᵀ X ζ = 1`.
pub fn inner_rank_one(a: &TernaryMatrix) -> Result<InverseFamily> {
    let f = crate::classify::rank_one_factorize(a)?;
    let (m, n) = a.shape();
    let (u, v) = (f.u(), f.v());
    // A = U core V with core = e fᵀ, so ζ = U e and η = Vᵀ f
    let k = m - f.zero_row_count;
    let s = f.core_form.widths.0;
    let mut zeta = vec![0i64; m];
    for (i, z) in zeta.iter_mut().enumerate() {
        if u.perm()[i] < k {
            *z = i64::from(u.signs()[i]);
        }
    }
    let mut eta = vec![0i64; n];
    for l in 0..s {
        eta[v.perm()[l]] = i64::from(v.signs()[l]);
    }
    let system = bilinear_system(n, m, &[eta], &[zeta], |_, _| Rat::one())?;
    Ok(sum_family("Thm3.2", InverseSpec::Inner, system))
}

/// Row partition `(n1 | n2 | ...)` and column partition `(m1 | m2)` of
/// a two-block system.
fn two_block_partition(row_widths: Vec<usize>, m1: usize, m2: usize) -> Result<BlockPartition> {
    BlockPartition::new(row_widths, vec![m1, m2])
}

fn s1_system(m1: usize, m2: usize, n1: usize) -> Result<SumConstraintSystem> {
    positive("n1", n1)?;
    positive("m1", m1)?;
    positive("m2", m2)?;
    let half = rat(1, 2);
    SumConstraintSystem::new(
        two_block_partition(vec![n1, n1], m1, m2)?,
        vec![
            SumConstraint::new(&[((0, 0), 1)], half),
            SumConstraint::new(&[((1, 0), 1)], half),
            SumConstraint::new(&[((0, 1), 1)], half),
            SumConstraint::new(&[((1, 1), 1)], -half),
        ],
    )
}

fn s2_system(m1: usize, m2: usize, n1: usize, n3: usize) -> Result<SumConstraintSystem> {
    positive("n1", n1)?;
    positive("m1", m1)?;
    positive("m2", m2)?;
    SumConstraintSystem::new(
        two_block_partition(vec![n1, n1, n3], m1, m2)?,
        vec![
            SumConstraint::new(&[((0, 0), 1), ((1, 0), 1), ((2, 0), 1)], Rat::one()),
            SumConstraint::new(&[((0, 1), 1), ((1, 1), -1)], Rat::one()),
            SumConstraint::new(&[((0, 0), 1), ((1, 0), -1)], Rat::zero()),
            SumConstraint::new(&[((0, 1), 1), ((1, 1), 1), ((2, 1), 1)], Rat::zero()),
        ],
    )
}

fn s3_system(m1: usize, m2: usize, w: [usize; 4]) -> Result<SumConstraintSystem> {
    for (i, &v) in w.iter().enumerate() {
        positive(&format!("n{}", i + 1), v)?;
    }
    positive("m1", m1)?;
    positive("m2", m2)?;
    SumConstraintSystem::new(
        two_block_partition(w.to_vec(), m1, m2)?,
        vec![
            // (a) Ξ(X13) = 1 − Ξ(X11) − Ξ(X12)
            SumConstraint::new(&[((2, 0), 1), ((0, 0), 1), ((1, 0), 1)], Rat::one()),
            // (b) Ξ(X14) = Ξ(X12) − Ξ(X11)
            SumConstraint::new(&[((3, 0), 1), ((1, 0), -1), ((0, 0), 1)], Rat::zero()),
            // (c) −Ξ(X23) = Ξ(X21) + Ξ(X22)
            SumConstraint::new(&[((2, 1), 1), ((0, 1), 1), ((1, 1), 1)], Rat::zero()),
            // (d) Ξ(X24) = 1 + Ξ(X22) − Ξ(X21)
            SumConstraint::new(&[((3, 1), 1), ((1, 1), -1), ((0, 1), 1)], Rat::one()),
        ],
    )
}

/// Structure S1: all four block sums are ±½.
pub fn inner_S1(m1: usize, m2: usize, n1: usize) -> Result<InverseFamily> {
    Ok(sum_family("Thm4.5", InverseSpec::Inner, s1_system(m1, m2, n1)?))
}

pub fn inner_S2(m1: usize, m2: usize, n1: usize, n3: usize) -> Result<InverseFamily> {
    Ok(sum_family("Thm4.6", InverseSpec::Inner, s2_system(m1, m2, n1, n3)?))
}

pub fn inner_S3(m1: usize, m2: usize, widths: [usize; 4]) -> Result<InverseFamily> {
    Ok(sum_family("Thm4.8", InverseSpec::Inner, s3_system(m1, m2, widths)?))
}

/// `A{1}` for a Class III matrix in any row order: with row classes
/// `A = Σ u_i v_iᵀ`, `X ∈ A{1}` iff `v_iᵀ X u_j = δ_ij` for all `i, j`.
pub fn inner_class_III(a: &TernaryMatrix) -> Result<InverseFamily> {
    let report = crate::classify::class_membership(a);
    if !report.is_class_III || report.terms.is_empty() {
        return domain_err("matrix is not a nonzero Class III matrix");
    }
    let (m, n) = a.shape();
    let vs: Vec<Vec<i64>> = report.terms.iter().map(|t| widen(&t.v)).collect();
    let us: Vec<Vec<i64>> = report.terms.iter().map(|t| widen(&t.u)).collect();
    let system = bilinear_system(n, m, &vs, &us, |i, j| {
        if i == j {
            Rat::one()
        } else {
            Rat::zero()
        }
    })?;
    Ok(sum_family("Thm4.7", InverseSpec::Inner, system))
}

fn widen(v: &[i8]) -> Vec<i64> {
    v.iter().map(|&t| i64::from(t)).collect()
}

/// Splits a stack of row blocks into `(u_i, v_i)` with `A_i = u_i v_iᵀ`.
fn block_terms(blocks: &[TernaryMatrix]) -> Result<Vec<(Vec<i64>, Vec<i64>)>> {
    let Some(first) = blocks.first() else {
        return domain_err("at least one block is required");
    };
    let n = first.cols();
    let mut out = Vec::with_capacity(blocks.len());
    for b in blocks {
        if b.cols() != n {
            return shape_err("blocks must share a column count");
        }
        if ternary_rank(b) != 1 {
            return domain_err("every block must have rank one");
        }
        let lead_row = (0..b.rows()).find(|&r| !b.is_zero_row(r)).expect("rank one");
        let row = b.row(lead_row);
        let lead = row.iter().copied().find(|&t| t != 0).expect("nonzero row");
        let v: Vec<i64> = row.iter().map(|&t| i64::from(t * lead)).collect();
        let u: Vec<i64> = (0..b.rows())
            .map(|r| i64::from(b.row(r).iter().copied().find(|&t| t != 0).unwrap_or(0)))
            .collect();
        out.push((u, v));
    }
    for i in 0..out.len() {
        for j in i + 1..out.len() {
            if dot_i64(&out[i].1, &out[j].1) != 0 {
                return domain_err(format!("blocks {i} and {j} are not orthogonal"));
            }
        }
    }
    Ok(out)
}

/// Column blocks `X_i` of `X` conformal with the row blocks of `A`.
fn column_blocks(blocks: &[TernaryMatrix], x: &RatMatrix) -> Result<Vec<RatMatrix>> {
    let n = blocks[0].cols();
    let m: usize = blocks.iter().map(|b| b.rows()).sum();
    check_shape(x, (n, m))?;
    let mut start = 0;
    Ok(blocks
        .iter()
        .map(|b| {
            let xi = x.submatrix(0..n, start..start + b.rows());
            start += b.rows();
            xi
        })
        .collect())
}

/// Membership in `A{1}` for stacked orthogonal rank-one blocks: each
/// `X_i ∈ A_i{1}` and `⟨v_i, X_j u_j⟩ = 0` for `i ≠ j`.
pub fn class3_inner_membership_rational(blocks: &[TernaryMatrix], x: &RatMatrix) -> Result<bool> {
    let terms = block_terms(blocks)?;
    let xs = column_blocks(blocks, x)?;
    let e: Vec<Vec<BigRational>> = xs
        .iter()
        .zip(&terms)
        .map(|(xi, (u, _))| {
            (0..xi.rows())
                .map(|r| dot_rat(u, xi.row(r)))
                .collect()
        })
        .collect();
    for (i, (_, v)) in terms.iter().enumerate() {
        for (j, ej) in e.iter().enumerate() {
            let value = dot_rat(v, ej);
            let want = if i == j { BigRational::one() } else { BigRational::zero() };
            if value != want {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn class3_inner_membership(blocks: &[TernaryMatrix], x: &IntMatrix) -> Result<bool> {
    class3_inner_membership_rational(blocks, &x.to_rational())
}

/// Each column block `X_i` is an inner inverse of its row block `A_i`.
/// Necessary for `AXA = A` but not sufficient.
pub fn class3_inner_necessary(blocks: &[TernaryMatrix], x: &IntMatrix) -> Result<bool> {
    let Some(first) = blocks.first() else {
        return domain_err("at least one block is required");
    };
    let n = first.cols();
    for (i, a) in blocks.iter().enumerate() {
        if a.cols() != n {
            return shape_err("blocks must share a column count");
        }
        for b in &blocks[i + 1..] {
            if !a.to_int().mul(&b.to_int().transpose())?.is_zero() {
                return domain_err("blocks must satisfy A_i A_jᵀ = 0");
            }
        }
    }
    let m: usize = blocks.iter().map(|b| b.rows()).sum();
    check_shape(x, (n, m))?;
    let mut start = 0;
    for b in blocks {
        let xi = x.submatrix(0..n, start..start + b.rows());
        start += b.rows();
        if !penrose_check(&b.to_int(), &xi)?.satisfies_1 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn product_family(id: &str, kernel: &TernaryMatrix) -> InverseFamily {
    let p = RankOneProductFamily::from_kernel(kernel);
    InverseFamily::new(id, InverseSpec::OuterRankOne, p.shape, FamilyBody::Product(p))
}

fn ternary_vector(name: &str, v: &[i8]) -> Result<()> {
    if v.is_empty() || v.iter().all(|&t| t == 0) {
        return domain_err(format!("{name} must be a nonzero vector"));
    }
    if v.iter().any(|t| !(-1..=1).contains(t)) {
        return domain_err(format!("{name} must be ternary"));
    }
    Ok(())
}

/// Nonzero outer inverses of `A = ζηᵀ`: `X = p qᵀ` with `⟨q,ζ⟩⟨η,p⟩ = 1`.
pub fn outer_rank_one_general(zeta: &[i8], eta: &[i8]) -> Result<InverseFamily> {
    ternary_vector("zeta", zeta)?;
    ternary_vector("eta", eta)?;
    let entries = zeta.iter().flat_map(|&z| eta.iter().map(move |&e| z * e)).collect();
    let a = TernaryMatrix::new(zeta.len(), eta.len(), entries)?;
    Ok(product_family("Thm5.1", &a))
}

/// Nonzero outer inverses of an arbitrary rank-one matrix.
pub fn outer_rank_one(a: &TernaryMatrix) -> Result<InverseFamily> {
    if ternary_rank(a) != 1 {
        return domain_err("matrix must have rank one");
    }
    Ok(product_family("Thm5.1", a))
}

/// `{0} ∪ F` as the full outer-inverse set described by a rank-one family.
pub fn with_zero(family: InverseFamily) -> InverseFamily {
    let id = family.theorem_id.clone();
    let shape = family.shape;
    let notes = family.notes.clone();
    let mut out = InverseFamily::new(
        &id,
        InverseSpec::Outer,
        shape,
        FamilyBody::Union(ExplicitUnion {
            include_zero: true,
            components: vec![(1, family)],
        }),
    );
    out.notes = notes;
    out
}

pub fn outer_full_type_I(m: usize, n: usize) -> Result<InverseFamily> {
    positive("m", m)?;
    positive("n", n)?;
    Ok(product_family("Cor5.2", &TernaryMatrix::ones(m, n)))
}

/// `(1_{mn1} | 0_{mn2})`: the `p` entries over the zero block are free.
pub fn outer_full_type_III(m: usize, n1: usize, n2: usize) -> Result<InverseFamily> {
    positive("m", m)?;
    positive("n1", n1)?;
    let row: Vec<i8> = std::iter::repeat_n(1, n1).chain(std::iter::repeat_n(0, n2)).collect();
    let rows = vec![row; m];
    Ok(product_family("Thm5.5", &TernaryMatrix::from_rows(&rows)?))
}

/// Rank-one outer inverses of `diag(A_1, ..., A_r)`:
/// `Σ_i q^iᵀ A_i p^i = 1`.
pub fn outer_rank1_block_diagonal(blocks: &[TernaryMatrix]) -> Result<InverseFamily> {
    if blocks.is_empty() || blocks.iter().any(TernaryMatrix::is_zero) {
        return domain_err("blocks must be nonzero");
    }
    Ok(product_family("Thm5.10", &TernaryMatrix::block_diagonal(blocks)?))
}

/// Rank-one outer inverses of a row-partitioned matrix:
/// `Σ_i q^iᵀ A_i p = 1`.
pub fn outer_rank1_row_partitioned(blocks: &[TernaryMatrix]) -> Result<InverseFamily> {
    let a = TernaryMatrix::vstack(blocks)?;
    if a.is_zero() {
        return domain_err("matrix must be nonzero");
    }
    Ok(product_family("Thm5.13", &a))
}

/// The λ-parametrized rank-one outer inverses of a full-row-rank matrix
/// given by its rows.
pub fn outer_rank1_full_row_rank(rows: &[Vec<i8>]) -> Result<InverseFamily> {
    let a = TernaryMatrix::from_rows(rows)?;
    if ternary_rank(&a) != a.rows() {
        return domain_err("rows must be linearly independent");
    }
    let (m, n) = a.shape();
    let x1_runs = runs(n, |j| a.column(j));
    let forms = (0..m)
        .map(|i| x1_runs.iter().map(|&(s, _)| i64::from(a.get(i, s))).collect())
        .collect();
    let family = ColumnScaledFamily {
        shape: (n, m),
        x1_widths: x1_runs.iter().map(|r| r.1).collect(),
        forms,
    };
    Ok(InverseFamily::new(
        "Thm5.14",
        InverseSpec::OuterRankOne,
        (n, m),
        FamilyBody::ColumnScaled(family),
    )
    .with_note(LAMBDA_GAP_NOTE))
}

/// `A{1} = A{1,2}` for full row rank `A`: the equations `AX = I`.
pub fn reflexive_full_row_rank(blocks: &[TernaryMatrix]) -> Result<InverseFamily> {
    let a = TernaryMatrix::vstack(blocks)?;
    let (m, n) = a.shape();
    if ternary_rank(&a) != m {
        return domain_err("stacked matrix must have full row rank");
    }
    let row_runs = runs(n, |j| a.column(j));
    let partition = BlockPartition::new(row_runs.iter().map(|r| r.1).collect(), vec![1; m])?;
    let mut constraints = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let terms: Vec<((usize, usize), i64)> = row_runs
                .iter()
                .enumerate()
                .filter_map(|(rb, &(s, _))| {
                    let c = i64::from(a.get(i, s));
                    (c != 0).then_some(((rb, j), c))
                })
                .collect();
            let rhs = if i == j { Rat::one() } else { Rat::zero() };
            constraints.push(SumConstraint::new(&terms, rhs));
        }
    }
    let system = SumConstraintSystem::new(partition, constraints)?;
    Ok(sum_family("Thm5.16", InverseSpec::Reflexive, system))
}

/// Rank-two outer inverses (equivalently `{1,2}`-inverses) of the
/// two-row form of S1–S4.
pub fn outer_rank2_class3(structure: Rank2Structure) -> Result<InverseFamily> {
    let system = match structure {
        Rank2Structure::S1 { n1 } => s1_system(1, 1, n1)?,
        Rank2Structure::S2 { n1, n3 } => s2_system(1, 1, n1, n3)?,
        Rank2Structure::S3 { n1, n2, n3, n4 } => s3_system(1, 1, [n1, n2, n3, n4])?,
        Rank2Structure::S4 { n1, n2 } => {
            positive("n1", n1)?;
            positive("n2", n2)?;
            SumConstraintSystem::new(
                BlockPartition::new(vec![n1, n2], vec![1, 1])?,
                vec![
                    SumConstraint::new(&[((0, 0), 1)], Rat::one()),
                    SumConstraint::new(&[((1, 1), 1)], Rat::one()),
                    SumConstraint::new(&[((1, 0), 1)], Rat::zero()),
                    SumConstraint::new(&[((0, 1), 1)], Rat::zero()),
                ],
            )?
        }
    };
    Ok(sum_family("Thm5.17", InverseSpec::OuterFullRank, system))
}

/// All outer inverses of `(1 0; 0 1)`-style S4 as zero, the rank-one
/// λ-family and the rank-two system.
pub fn outer_full_set_S4(n1: usize, n2: usize) -> Result<InverseFamily> {
    let s = Rank2Structure::S4 { n1, n2 };
    let rank2 = outer_rank2_class3(s)?;
    let (a1, a2) = s.rows();
    let rank1 = outer_rank1_full_row_rank(&[a1, a2])?;
    let union = ExplicitUnion {
        include_zero: true,
        components: vec![(1, rank1), (2, rank2)],
    };
    Ok(InverseFamily::new(
        "Thm5.19",
        InverseSpec::Outer,
        (n1 + n2, 2),
        FamilyBody::Union(union),
    )
    .with_note(LAMBDA_GAP_NOTE))
}

/// Picks the most specific characterization of `A{spec}`: literal full
/// types, then two-row S-structures, then Class III, then full row rank.
pub fn dispatch(a: &TernaryMatrix, spec: InverseSpec) -> Result<InverseFamily> {
    let (m, n) = a.shape();
    let report = class_membership(a);
    let full = full_form(a);
    // literal S-structure layout, with its row multiplicities
    let s_layout = if report.is_class_III && report.rank == 2 {
        rank2_class3_detail(a)?.and_then(|d| {
            (d.structure.canonical(d.m1, d.m2).ok().as_ref() == Some(a)).then_some(d)
        })
    } else {
        None
    };
    let unsupported = || -> Result<InverseFamily> {
        let class = if report.is_class_III {
            "Class III"
        } else if report.is_class_II || report.is_class_II_columnwise {
            "Class II"
        } else {
            "unclassified"
        };
        Err(Error::Unsupported(format!(
            "no characterization of {} for this {m}x{n} matrix of rank {} ({class})",
            spec_label(spec),
            report.rank
        )))
    };
    match spec {
        InverseSpec::Inner => {
            if let Some(f) = full {
                match f.kind {
                    FullKind::TypeI if f.sign == 1 => return inner_full_type_I(m, n),
                    FullKind::TypeII => return inner_full_type_II(m, f.widths.0, f.widths.1, f.sign),
                    _ => {}
                }
            }
            if report.rank == 1 {
                return inner_rank_one(a);
            }
            if let Some(d) = s_layout {
                match d.structure {
                    Rank2Structure::S1 { n1 } => return inner_S1(d.m1, d.m2, n1),
                    Rank2Structure::S2 { n1, n3 } => return inner_S2(d.m1, d.m2, n1, n3),
                    Rank2Structure::S3 { n1, n2, n3, n4 } => {
                        return inner_S3(d.m1, d.m2, [n1, n2, n3, n4])
                    }
                    Rank2Structure::S4 { .. } => {}
                }
            }
            if report.is_class_III && report.rank > 0 {
                return inner_class_III(a);
            }
            if report.rank == m {
                return reflexive_full_row_rank(std::slice::from_ref(a));
            }
            unsupported()
        }
        InverseSpec::Reflexive => {
            if report.rank == 1 {
                return outer_rank_one(a);
            }
            if let Some(d) = s_layout.filter(|d| d.m1 == 1 && d.m2 == 1) {
                return outer_rank2_class3(d.structure);
            }
            if report.rank == m {
                return reflexive_full_row_rank(std::slice::from_ref(a));
            }
            unsupported()
        }
        InverseSpec::Outer => {
            if let Some(f) = full.filter(|f| f.sign == 1) {
                match f.kind {
                    FullKind::TypeI => return Ok(with_zero(outer_full_type_I(m, n)?)),
                    FullKind::TypeIII => {
                        return Ok(with_zero(outer_full_type_III(m, f.widths.0, f.widths.2)?))
                    }
                    _ => {}
                }
            }
            if report.rank == 1 {
                return Ok(with_zero(outer_rank_one(a)?));
            }
            if let Some(d) = s_layout.filter(|d| d.m1 == 1 && d.m2 == 1) {
                if let Rank2Structure::S4 { n1, n2 } = d.structure {
                    return outer_full_set_S4(n1, n2);
                }
            }
            unsupported()
        }
        InverseSpec::OuterRankOne | InverseSpec::OuterFullRank => unsupported(),
    }
}

fn spec_label(spec: InverseSpec) -> &'static str {
    match spec {
        InverseSpec::Inner => "{1}",
        InverseSpec::Outer => "{2}",
        InverseSpec::OuterRankOne => "{2}_1",
        InverseSpec::OuterFullRank => "{2}_r",
        InverseSpec::Reflexive => "{1,2}",
    }
}

/// Common denominator of a constraint's coefficients and right-hand side.
pub(crate) fn lcm_of_denominators(c: &SumConstraint) -> i64 {
    c.terms
        .iter()
        .map(|(_, k)| *k.denom())
        .chain(std::iter::once(*c.rhs.denom()))
        .fold(1i64, |acc, d| acc.lcm(&d))
}
