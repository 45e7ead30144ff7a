//! Structural classification of ternary matrices: full types, rank-one
//! factorization, (generalized) well-settledness and the row-class
//! hierarchy Class I ⊂ Class III ⊂ Class II.

use std::collections::HashMap;
use std::ops::Range;

use serde::Serialize;

use crate::error::{domain_err, Result};
use crate::matrix::{ternary_rank, SignedPermutation, TernaryMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FullKind {
    TypeI,
    TypeII,
    TypeIII,
    TypeIV,
}

/// A full matrix layout: a `sign` block of width `n1`, an optional
/// `-sign` block of width `n2` and an optional zero block of width `n3`,
/// with every row identical.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FullForm {
    pub kind: FullKind,
    pub sign: i8,
    pub widths: (usize, usize, usize),
}

impl FullForm {
    pub fn new(kind: FullKind, sign: i8, widths: (usize, usize, usize)) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return domain_err("full form sign must be +1 or -1");
        }
        let (n1, n2, n3) = widths;
        let ok = n1 >= 1
            && match kind {
                FullKind::TypeI => n2 == 0 && n3 == 0,
                FullKind::TypeII => n2 >= 1 && n3 == 0,
                FullKind::TypeIII => n2 == 0 && n3 >= 1,
                FullKind::TypeIV => n2 >= 1 && n3 >= 1,
            };
        if !ok {
            return domain_err(format!("widths {widths:?} do not fit {kind:?}"));
        }
        Ok(FullForm { kind, sign, widths })
    }

    pub fn cols(&self) -> usize {
        self.widths.0 + self.widths.1 + self.widths.2
    }

    /// The `m`-row matrix with this layout.
    pub fn reconstruct(&self, m: usize) -> TernaryMatrix {
        let row = self.row();
        let entries: Vec<i8> = (0..m).flat_map(|_| row.iter().copied()).collect();
        TernaryMatrix::new(m, row.len(), entries).expect("full forms have positive width")
    }

    fn row(&self) -> Vec<i8> {
        let (n1, n2, n3) = self.widths;
        let mut row = vec![self.sign; n1];
        row.extend(std::iter::repeat_n(-self.sign, n2));
        row.extend(std::iter::repeat_n(0, n3));
        row
    }
}

/// Literal (column-order-exact) full type of `a`, if any.
pub fn full_form(a: &TernaryMatrix) -> Option<FullForm> {
    let first = a.row(0);
    if (1..a.rows()).any(|r| a.row(r) != first) {
        return None;
    }
    let sign = first[0];
    if sign == 0 {
        return None;
    }
    let run = |start: usize, value: i8| first[start..].iter().take_while(|&&t| t == value).count();
    let n1 = run(0, sign);
    let n2 = run(n1, -sign);
    let n3 = run(n1 + n2, 0);
    if n1 + n2 + n3 != first.len() {
        return None;
    }
    let kind = match (n2 > 0, n3 > 0) {
        (false, false) => FullKind::TypeI,
        (true, false) => FullKind::TypeII,
        (false, true) => FullKind::TypeIII,
        (true, true) => FullKind::TypeIV,
    };
    Some(FullForm {
        kind,
        sign,
        widths: (n1, n2, n3),
    })
}

/// `A = P1 · D1 · core · D2 · P2` for a rank-one ternary `A`.
///
/// `p1[i]` is the core row that lands on row `i` of `A`; core column `l`
/// lands on column `p2[l]` of `A`. The core is `(1 | 0)` stacked over
/// `zero_row_count` zero rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankOneFactorization {
    pub p1: Vec<usize>,
    pub p2: Vec<usize>,
    pub d1: Vec<i8>,
    pub d2: Vec<i8>,
    pub core: TernaryMatrix,
    pub core_form: FullForm,
    pub zero_row_count: usize,
}

impl RankOneFactorization {
    /// `U = P1 · D1` as a signed permutation.
    pub fn u(&self) -> SignedPermutation {
        let signs = self.p1.iter().map(|&k| self.d1[k]).collect();
        SignedPermutation::new(self.p1.clone(), signs).expect("valid by construction")
    }

    /// `V = D2 · P2` as a signed permutation.
    pub fn v(&self) -> SignedPermutation {
        SignedPermutation::new(self.p2.clone(), self.d2.clone()).expect("valid by construction")
    }

    pub fn reassemble(&self) -> TernaryMatrix {
        SignedPermutation::sandwich(&self.u(), &self.core, &self.v()).expect("shapes agree")
    }
}

pub fn rank_one_factorize(a: &TernaryMatrix) -> Result<RankOneFactorization> {
    let rank = ternary_rank(a);
    if rank != 1 {
        return domain_err(format!("rank-one factorization needs rank 1, got rank {rank}"));
    }
    let (m, n) = a.shape();
    let nonzero: Vec<usize> = (0..m).filter(|&r| !a.is_zero_row(r)).collect();
    let zero: Vec<usize> = (0..m).filter(|&r| a.is_zero_row(r)).collect();
    let r0 = a.row(nonzero[0]);
    let lead = first_nonzero(r0).expect("nonzero row");
    let reference: Vec<i8> = r0.iter().map(|&t| t * lead).collect();

    let support: Vec<usize> = (0..n).filter(|&c| reference[c] != 0).collect();
    let col_order: Vec<usize> = support
        .iter()
        .copied()
        .chain((0..n).filter(|&c| reference[c] == 0))
        .collect();
    let row_order: Vec<usize> = nonzero.iter().chain(&zero).copied().collect();

    let mut p1 = vec![0; m];
    let mut d1 = vec![1i8; m];
    for (k, &r) in row_order.iter().enumerate() {
        p1[r] = k;
        if k < nonzero.len() {
            // rank one: every nonzero row is ± the reference
            d1[k] = first_nonzero(a.row(r)).expect("nonzero row");
        }
    }
    let d2: Vec<i8> = col_order
        .iter()
        .map(|&c| if reference[c] != 0 { reference[c] } else { 1 })
        .collect();

    let s = support.len();
    let k = nonzero.len();
    let core = TernaryMatrix::new(
        m,
        n,
        (0..m)
            .flat_map(|r| (0..n).map(move |l| i8::from(r < k && l < s)))
            .collect(),
    )?;
    let core_form = if s == n {
        FullForm::new(FullKind::TypeI, 1, (n, 0, 0))?
    } else {
        FullForm::new(FullKind::TypeIII, 1, (s, 0, n - s))?
    };
    Ok(RankOneFactorization {
        p1,
        p2: col_order,
        d1,
        d2,
        core,
        core_form,
        zero_row_count: zero.len(),
    })
}

fn first_nonzero(v: &[i8]) -> Option<i8> {
    v.iter().copied().find(|&t| t != 0)
}

/// One diagonal block of a block-diagonal rearrangement. Ranges index the
/// permuted matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagonalBlock {
    pub rows: Range<usize>,
    pub cols: Range<usize>,
    pub matrix: TernaryMatrix,
}

/// Block-diagonal form `A[row_perm][col_perm]` with rank-one blocks and
/// a trailing all-zero region of `zero_rows` rows and `zero_cols` columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GwsDecomposition {
    /// Row `i` of the permuted matrix is row `row_perm[i]` of `A`.
    pub row_perm: Vec<usize>,
    /// Column `j` of the permuted matrix is column `col_perm[j]` of `A`.
    pub col_perm: Vec<usize>,
    pub blocks: Vec<DiagonalBlock>,
    pub zero_rows: usize,
    pub zero_cols: usize,
}

impl GwsDecomposition {
    pub fn permuted(&self, a: &TernaryMatrix) -> TernaryMatrix {
        a.select(&self.row_perm, &self.col_perm)
    }

    /// Rebuilds the original matrix from the blocks and permutations.
    pub fn reassemble(&self) -> TernaryMatrix {
        let (m, n) = (self.row_perm.len(), self.col_perm.len());
        let mut entries = vec![0i8; m * n];
        for b in &self.blocks {
            for (i, r) in b.rows.clone().enumerate() {
                for (j, c) in b.cols.clone().enumerate() {
                    entries[self.row_perm[r] * n + self.col_perm[c]] = b.matrix.get(i, j);
                }
            }
        }
        TernaryMatrix::new(m, n, entries).expect("same shape as the input")
    }
}

/// Connected components of the bipartite row/column support graph, each
/// as (sorted rows, sorted columns), ordered by smallest row.
fn support_components(a: &TernaryMatrix) -> Vec<(Vec<usize>, Vec<usize>)> {
    let (m, n) = a.shape();
    let mut parent: Vec<usize> = (0..m + n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for r in 0..m {
        for c in 0..n {
            if a.get(r, c) != 0 {
                let (x, y) = (find(&mut parent, r), find(&mut parent, m + c));
                parent[x.max(y)] = x.min(y);
            }
        }
    }
    let mut by_root: Vec<(usize, Vec<usize>, Vec<usize>)> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for r in (0..m).filter(|&r| !a.is_zero_row(r)) {
        let root = find(&mut parent, r);
        let i = *slot.entry(root).or_insert_with(|| {
            by_root.push((root, Vec::new(), Vec::new()));
            by_root.len() - 1
        });
        by_root[i].1.push(r);
    }
    for c in (0..n).filter(|&c| !a.is_zero_col(c)) {
        let root = find(&mut parent, m + c);
        by_root[slot[&root]].2.push(c);
    }
    by_root.into_iter().map(|(_, r, c)| (r, c)).collect()
}

pub fn gws_detect(a: &TernaryMatrix) -> Option<GwsDecomposition> {
    let (m, n) = a.shape();
    let comps = support_components(a);
    let mut row_perm = Vec::with_capacity(m);
    let mut col_perm = Vec::with_capacity(n);
    let mut blocks = Vec::with_capacity(comps.len());
    for (rows, cols) in comps {
        let matrix = a.select(&rows, &cols);
        if ternary_rank(&matrix) > 1 {
            return None;
        }
        let (r0, c0) = (row_perm.len(), col_perm.len());
        row_perm.extend_from_slice(&rows);
        col_perm.extend_from_slice(&cols);
        blocks.push(DiagonalBlock {
            rows: r0..row_perm.len(),
            cols: c0..col_perm.len(),
            matrix,
        });
    }
    let zero_rows = m - row_perm.len();
    let zero_cols = n - col_perm.len();
    row_perm.extend((0..m).filter(|&r| a.is_zero_row(r)));
    col_perm.extend((0..n).filter(|&c| a.is_zero_col(c)));
    Some(GwsDecomposition {
        row_perm,
        col_perm,
        blocks,
        zero_rows,
        zero_cols,
    })
}

/// Permutation equivalence to a block diagonal of full matrices. Zero
/// columns can be absorbed into a block as its zero part; zero rows cannot.
pub fn ws_detect(a: &TernaryMatrix) -> bool {
    let Some(g) = gws_detect(a) else {
        return false;
    };
    g.zero_rows == 0
        && !g.blocks.is_empty()
        && g.blocks.iter().all(|b| {
            let first = b.matrix.row(0);
            (1..b.matrix.rows()).all(|r| b.matrix.row(r) == first)
        })
}

/// One term `u vᵀ` of a Class II decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankOneTerm {
    pub u: Vec<i8>,
    pub v: Vec<i8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Structure {
    S1,
    S2,
    S3,
    S4,
}

/// Field names follow the published report schema.
#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub rank: usize,
    pub full_form: Option<FullForm>,
    pub is_rank_one: bool,
    pub is_well_settled: bool,
    pub is_generalized_well_settled: bool,
    pub is_class_I: bool,
    pub is_class_II: bool,
    pub is_class_II_columnwise: bool,
    pub is_class_III: bool,
    pub terms: Vec<RankOneTerm>,
    pub s_structure: Option<Structure>,
}

/// Nonzero rows grouped by `r ~ ±r`, in order of first appearance. Each
/// entry is the representative (first nonzero +1) and the signed member
/// rows.
fn row_classes(a: &TernaryMatrix) -> Vec<(Vec<i8>, Vec<(usize, i8)>)> {
    let mut classes: Vec<(Vec<i8>, Vec<(usize, i8)>)> = Vec::new();
    let mut index: HashMap<Vec<i8>, usize> = HashMap::new();
    for r in 0..a.rows() {
        let row = a.row(r);
        let Some(lead) = first_nonzero(row) else {
            continue;
        };
        let rep: Vec<i8> = row.iter().map(|&t| t * lead).collect();
        let i = *index.entry(rep.clone()).or_insert_with(|| {
            classes.push((rep, Vec::new()));
            classes.len() - 1
        });
        classes[i].1.push((r, lead));
    }
    classes
}

/// Row-wise Class II terms, or `None` when the row classes outnumber the rank.
fn class_ii_terms(a: &TernaryMatrix, rank: usize) -> Option<Vec<RankOneTerm>> {
    let classes = row_classes(a);
    if classes.len() != rank {
        return None;
    }
    Some(
        classes
            .into_iter()
            .map(|(v, members)| {
                let mut u = vec![0i8; a.rows()];
                for (r, s) in members {
                    u[r] = s;
                }
                RankOneTerm { u, v }
            })
            .collect(),
    )
}

fn dot(a: &[i8], b: &[i8]) -> i64 {
    a.iter().zip(b).map(|(&x, &y)| i64::from(x) * i64::from(y)).sum()
}

#[allow(non_snake_case)]
pub fn class_membership(a: &TernaryMatrix) -> ClassReport {
    let rank = ternary_rank(a);
    let terms = class_ii_terms(a, rank);
    let is_class_II = terms.is_some();
    let terms = terms.unwrap_or_default();
    let pairs = || {
        (0..terms.len()).flat_map(|i| (i + 1..terms.len()).map(move |j| (i, j)))
    };
    let is_class_III = is_class_II && pairs().all(|(i, j)| dot(&terms[i].v, &terms[j].v) == 0);
    let is_class_I = is_class_II
        && pairs().all(|(i, j)| terms[i].v.iter().zip(&terms[j].v).all(|(&x, &y)| x * y == 0));
    let is_class_II_columnwise = class_ii_terms(&a.transpose(), rank).is_some();
    let s_structure = if is_class_III && rank == 2 {
        rank2_details(a, &terms).map(|d| d.structure.kind())
    } else {
        None
    };
    ClassReport {
        rank,
        full_form: full_form(a),
        is_rank_one: rank == 1,
        is_well_settled: ws_detect(a),
        is_generalized_well_settled: gws_detect(a).is_some(),
        is_class_I,
        is_class_II,
        is_class_II_columnwise,
        is_class_III,
        terms,
        s_structure,
    }
}

/// Canonical rank-two Class III layouts with their column block widths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Rank2Structure {
    /// `A1 = (1 | 1)`, `A2 = (1 | -1)`, both blocks of width `n1`.
    S1 { n1: usize },
    /// `A1 = (1 | 1 | 1)`, `A2 = (1 | -1 | 0)` with widths `n1, n1, n3`.
    S2 { n1: usize, n3: usize },
    /// `A1 = (1 | 1 | 1 | 0)`, `A2 = (1 | -1 | 0 | 1)`.
    S3 { n1: usize, n2: usize, n3: usize, n4: usize },
    /// `A1 = (1 | 0)`, `A2 = (0 | 1)`.
    S4 { n1: usize, n2: usize },
}

impl Rank2Structure {
    pub fn kind(&self) -> Structure {
        match self {
            Rank2Structure::S1 { .. } => Structure::S1,
            Rank2Structure::S2 { .. } => Structure::S2,
            Rank2Structure::S3 { .. } => Structure::S3,
            Rank2Structure::S4 { .. } => Structure::S4,
        }
    }

    /// Column widths of the structure's blocks, left to right.
    pub fn widths(&self) -> Vec<usize> {
        match *self {
            Rank2Structure::S1 { n1 } => vec![n1, n1],
            Rank2Structure::S2 { n1, n3 } => vec![n1, n1, n3],
            Rank2Structure::S3 { n1, n2, n3, n4 } => vec![n1, n2, n3, n4],
            Rank2Structure::S4 { n1, n2 } => vec![n1, n2],
        }
    }

    /// Per-block values of the two row patterns.
    pub fn patterns(&self) -> (Vec<i8>, Vec<i8>) {
        match self {
            Rank2Structure::S1 { .. } => (vec![1, 1], vec![1, -1]),
            Rank2Structure::S2 { .. } => (vec![1, 1, 1], vec![1, -1, 0]),
            Rank2Structure::S3 { .. } => (vec![1, 1, 1, 0], vec![1, -1, 0, 1]),
            Rank2Structure::S4 { .. } => (vec![1, 0], vec![0, 1]),
        }
    }

    /// The two expanded row vectors `A1` and `A2`.
    pub fn rows(&self) -> (Vec<i8>, Vec<i8>) {
        let (p1, p2) = self.patterns();
        let expand = |p: &[i8]| -> Vec<i8> {
            self.widths()
                .iter()
                .zip(p)
                .flat_map(|(&w, &v)| std::iter::repeat_n(v, w))
                .collect()
        };
        (expand(&p1), expand(&p2))
    }

    /// `m1` copies of `A1` stacked over `m2` copies of `A2`.
    pub fn canonical(&self, m1: usize, m2: usize) -> Result<TernaryMatrix> {
        let (a1, a2) = self.rows();
        if a1.is_empty() || m1 == 0 || m2 == 0 {
            return domain_err("structure needs positive widths and row counts");
        }
        let rows: Vec<Vec<i8>> = std::iter::repeat_n(a1, m1)
            .chain(std::iter::repeat_n(a2, m2))
            .collect();
        TernaryMatrix::from_rows(&rows)
    }
}

/// Normalized description of a rank-two Class III matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Rank2Detail {
    pub structure: Rank2Structure,
    /// Rows in the class playing `A1` and `A2`.
    pub m1: usize,
    pub m2: usize,
    /// All-zero columns, which none of the canonical layouts carry.
    pub zero_cols: usize,
    pub zero_rows: usize,
}

fn rank2_details(a: &TernaryMatrix, terms: &[RankOneTerm]) -> Option<Rank2Detail> {
    let [t1, t2] = terms else {
        return None;
    };
    let count_rows = |t: &RankOneTerm| t.u.iter().filter(|&&x| x != 0).count();
    let (mut m1, mut m2) = (count_rows(t1), count_rows(t2));
    let (mut ap, mut am, mut b, mut c, mut z) = (0, 0, 0, 0, 0);
    for (&x, &y) in t1.v.iter().zip(&t2.v) {
        match (x != 0, y != 0) {
            (true, true) if x * y > 0 => ap += 1,
            (true, true) => am += 1,
            (true, false) => b += 1,
            (false, true) => c += 1,
            (false, false) => z += 1,
        }
    }
    let structure = if ap + am == 0 {
        Rank2Structure::S4 { n1: b, n2: c }
    } else if b == 0 && c == 0 {
        Rank2Structure::S1 { n1: ap }
    } else if b == 0 || c == 0 {
        // the row pattern with the larger support plays A1
        if b == 0 {
            std::mem::swap(&mut m1, &mut m2);
        }
        Rank2Structure::S2 { n1: ap, n3: b + c }
    } else {
        Rank2Structure::S3 {
            n1: ap,
            n2: am,
            n3: b,
            n4: c,
        }
    };
    let zero_rows = (0..a.rows()).filter(|&r| a.is_zero_row(r)).count();
    Some(Rank2Detail {
        structure,
        m1,
        m2,
        zero_cols: z,
        zero_rows,
    })
}

/// Which of S1–S4 a rank-two Class III matrix reduces to under signed
/// permutations; `None` when the rank is not two.
pub fn rank2_class3_structure(a: &TernaryMatrix) -> Result<Option<Structure>> {
    Ok(rank2_class3_detail(a)?.map(|d| d.structure.kind()))
}

pub fn rank2_class3_detail(a: &TernaryMatrix) -> Result<Option<Rank2Detail>> {
    let report = class_membership(a);
    if !report.is_class_III {
        return domain_err("matrix is not in Class III");
    }
    if report.rank != 2 {
        return Ok(None);
    }
    Ok(rank2_details(a, &report.terms))
}

/// Row-wise Class II matrix as `A = U · W` with `U` a sign diagonal and
/// every row block of `W` constant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UwDecomposition {
    pub u: SignedPermutation,
    pub w: TernaryMatrix,
    /// Row indices of each block, one block per Class II term.
    pub blocks: Vec<Vec<usize>>,
    /// Zero rows, kept apart from every block.
    pub zero_rows: Vec<usize>,
}

impl UwDecomposition {
    pub fn reassemble(&self) -> TernaryMatrix {
        let id = SignedPermutation::identity(self.w.cols());
        SignedPermutation::sandwich(&self.u, &self.w, &id).expect("shapes agree")
    }
}

pub fn uw_decompose(a: &TernaryMatrix) -> Result<UwDecomposition> {
    let rank = ternary_rank(a);
    let classes = row_classes(a);
    if classes.len() != rank {
        return domain_err(format!(
            "not row-wise Class II: {} row classes for rank {}",
            classes.len(),
            rank
        ));
    }
    let (m, n) = a.shape();
    let mut signs = vec![1i8; m];
    let mut w = vec![0i8; m * n];
    let mut blocks = Vec::with_capacity(classes.len());
    for (rep, members) in classes {
        let mut rows = Vec::with_capacity(members.len());
        for (r, s) in members {
            signs[r] = s;
            w[r * n..(r + 1) * n].copy_from_slice(&rep);
            rows.push(r);
        }
        blocks.push(rows);
    }
    Ok(UwDecomposition {
        u: SignedPermutation::diagonal(signs)?,
        w: TernaryMatrix::new(m, n, w)?,
        blocks,
        zero_rows: (0..m).filter(|&r| a.is_zero_row(r)).collect(),
    })
}
