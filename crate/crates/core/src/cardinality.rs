//! Closed-form counts of Bohemian inverse sets, in arbitrary precision.

#![allow(non_snake_case)]

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::enumerate::count_json;
use crate::error::{domain_err, Result};

/// `C(a, b)`, zero when `b < 0`, `b > a` or `a < 0`.
pub fn binom(a: i64, b: i64) -> BigUint {
    if a < 0 || b < 0 || b > a {
        return BigUint::zero();
    }
    let b = b.min(a - b);
    let mut out = BigUint::one();
    for k in 0..b {
        out = out * BigUint::from((a - k) as u64) / BigUint::from((k + 1) as u64);
    }
    out
}

/// Number of ternary vectors of length `n` with entry sum `t`.
pub fn count_sum_t(n: usize, t: i64) -> BigUint {
    let n = n as i64;
    (0..=n).map(|s| binom(n, s) * binom(n - s, s + t.abs())).sum()
}

/// `#(1_{mn}){1}` over `{-1, 0, 1}`.
pub fn inner_count_full_type_I(m: usize, n: usize) -> BigUint {
    count_sum_t(m * n, 1)
}

fn plus_zero(v: BigUint, include_zero: bool) -> BigUint {
    if include_zero {
        v + 1u32
    } else {
        v
    }
}

/// `#(1_{mn}){2}`, optionally counting the zero matrix.
pub fn outer_count_full_type_I(m: usize, n: usize, include_zero: bool) -> BigUint {
    plus_zero(count_sum_t(m, 1) * count_sum_t(n, 1), include_zero)
}

/// `#(1_{mn}){2}` over a population `P ⊂ ℕ` with `1 ∈ P`.
pub fn outer_count_natural_pop(m: usize, n: usize, zero_in_pop: bool) -> BigUint {
    if zero_in_pop {
        BigUint::from(m * n + 1)
    } else if m == 1 && n == 1 {
        BigUint::one()
    } else {
        BigUint::zero()
    }
}

/// `#(1_{mn1} | 0_{mn2}){2}`.
pub fn outer_count_full_type_III(m: usize, n1: usize, n2: usize, include_zero: bool) -> BigUint {
    let v = BigUint::from(3u32).pow(n2 as u32) * count_sum_t(m, 1) * count_sum_t(n1, 1);
    plus_zero(v, include_zero)
}

/// The stated count of all outer inverses of the two-row S4 matrix
/// `(1_{n1} 0; 0 1_{n2})`, evaluated as written.
pub fn outer_count_S4(n1: usize, n2: usize) -> BigUint {
    let c1 = |n| count_sum_t(n, 1);
    let c0 = |n| count_sum_t(n, 0);
    BigUint::one()
        + BigUint::from(3u32).pow(n2 as u32) * c1(n1)
        + BigUint::from(2u32) * c1(n1 + n2)
        + c1(n1) * c1(n2) * c0(n1) * c0(n2)
}

/// `#A{1}` for `A = diag(1_{m1 n1}, ..., 1_{mr nr})`: the diagonal blocks
/// of `X` sum to one and the off-diagonal blocks to zero.
pub fn inner_count_pure_ws(block_dims: &[(usize, usize)]) -> BigUint {
    let mut out = BigUint::one();
    for (i, &(_, ni)) in block_dims.iter().enumerate() {
        for (j, &(mj, _)) in block_dims.iter().enumerate() {
            let t = if i == j { 1 } else { 0 };
            out *= count_sum_t(ni * mj, t);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    #[serde(serialize_with = "ser_big")]
    pub lhs: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub rhs: BigUint,
    pub equal: bool,
}

fn ser_big<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    count_json(v).serialize(s)
}

/// Both sides of the split-sum identity for `n = n1 + n2`. Every sum runs
/// over its full rectangular range and relies on out-of-range binomials
/// vanishing.
pub fn binomial_identity_check(m: usize, n1: usize, n2: usize) -> IdentityCheck {
    let nm = ((n1 + n2) * m) as i64;
    let a = (n1 * m) as i64;
    let b = (n2 * m) as i64;
    let lhs: BigUint = (0..=nm).map(|s1| binom(nm, s1) * binom(nm - s1, s1 + 1)).sum();
    let mut rhs = BigUint::zero();
    for r2 in 0..=b {
        for s2 in 0..=b {
            let outer = binom(b, s2) * binom(b - s2, r2);
            if outer.is_zero() {
                continue;
            }
            for s1 in 0..=a {
                rhs += &outer * binom(a, s1) * binom(a - s1, r2 - s2 + s1 + 1);
            }
        }
    }
    let equal = lhs == rhs;
    IdentityCheck { lhs, rhs, equal }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Enumeration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CardinalityReport {
    pub value: BigUint,
    pub formula_id: String,
    pub parameters: BTreeMap<String, i64>,
    pub method: Method,
}

impl CardinalityReport {
    pub fn to_json(&self) -> Value {
        json!({
            "formula_id": self.formula_id,
            "parameters": self.parameters,
            "value": count_json(&self.value),
            "method": self.method,
        })
    }

    pub fn csv_header(&self) -> String {
        let mut cols = vec!["formula_id".to_string()];
        cols.extend(self.parameters.keys().cloned());
        cols.push("value".into());
        cols.push("method".into());
        cols.join(",")
    }

    pub fn csv_row(&self) -> String {
        let mut cols = vec![self.formula_id.clone()];
        cols.extend(self.parameters.values().map(i64::to_string));
        cols.push(self.value.to_string());
        cols.push(
            match self.method {
                Method::ClosedForm => "closed_form",
                Method::Enumeration => "enumeration",
            }
            .into(),
        );
        cols.join(",")
    }
}

impl Serialize for CardinalityReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// A closed-form formula known to [`evaluate`].
pub struct FormulaInfo {
    pub id: &'static str,
    pub required: &'static [&'static str],
    pub optional: &'static [&'static str],
    pub summary: &'static str,
}

pub const FORMULAS: &[FormulaInfo] = &[
    FormulaInfo {
        id: "sum_t",
        required: &["n", "t"],
        optional: &[],
        summary: "ternary vectors of length n with entry sum t",
    },
    FormulaInfo {
        id: "inner_type_I",
        required: &["m", "n"],
        optional: &[],
        summary: "#(1_mn){1}",
    },
    FormulaInfo {
        id: "outer_type_I",
        required: &["m", "n"],
        optional: &["include_zero"],
        summary: "#(1_mn){2}",
    },
    FormulaInfo {
        id: "natural_pop",
        required: &["m", "n"],
        optional: &["zero_in_pop"],
        summary: "#(1_mn){2} over a population of naturals containing 1",
    },
    FormulaInfo {
        id: "outer_type_III",
        required: &["m", "n1", "n2"],
        optional: &["include_zero"],
        summary: "#(1_mn1 | 0_mn2){2}",
    },
    FormulaInfo {
        id: "outer_S4",
        required: &["n1", "n2"],
        optional: &[],
        summary: "stated #A{2} for the two-row S4 matrix",
    },
    FormulaInfo {
        id: "inner_pure_ws",
        required: &["m1", "n1"],
        optional: &["m2", "n2", "m3", "n3", "m4", "n4"],
        summary: "#A{1} for a block diagonal of all-ones blocks (m_i x n_i)",
    },
];

pub fn formula_info(id: &str) -> Option<&'static FormulaInfo> {
    FORMULAS.iter().find(|f| f.id == id)
}

/// Evaluates a registered formula on named integer parameters.
pub fn evaluate(formula_id: &str, params: &BTreeMap<String, i64>) -> Result<CardinalityReport> {
    let Some(info) = formula_info(formula_id) else {
        return domain_err(format!("unknown formula `{formula_id}`"));
    };
    for key in params.keys() {
        if !info.required.contains(&key.as_str()) && !info.optional.contains(&key.as_str()) {
            return domain_err(format!("formula `{formula_id}` takes no parameter `{key}`"));
        }
    }
    let get = |name: &str| -> Result<i64> {
        match params.get(name) {
            Some(&v) => Ok(v),
            None => domain_err(format!("formula `{formula_id}` needs parameter `{name}`")),
        }
    };
    let size = |name: &str, min: i64| -> Result<usize> {
        let v = get(name)?;
        if v < min {
            return domain_err(format!("parameter `{name}` must be at least {min}"));
        }
        Ok(v as usize)
    };
    let flag = |name: &str| params.get(name).is_some_and(|&v| v != 0);
    let value = match formula_id {
        "sum_t" => count_sum_t(size("n", 0)?, get("t")?),
        "inner_type_I" => inner_count_full_type_I(size("m", 1)?, size("n", 1)?),
        "outer_type_I" => outer_count_full_type_I(size("m", 1)?, size("n", 1)?, flag("include_zero")),
        "natural_pop" => outer_count_natural_pop(size("m", 1)?, size("n", 1)?, flag("zero_in_pop")),
        "outer_type_III" => outer_count_full_type_III(
            size("m", 1)?,
            size("n1", 1)?,
            size("n2", 0)?,
            flag("include_zero"),
        ),
        "outer_S4" => outer_count_S4(size("n1", 1)?, size("n2", 1)?),
        "inner_pure_ws" => {
            let mut dims = Vec::new();
            for k in 1..=4 {
                let (mk, nk) = (format!("m{k}"), format!("n{k}"));
                match (params.contains_key(&mk), params.contains_key(&nk)) {
                    (true, true) => dims.push((size(&mk, 1)?, size(&nk, 1)?)),
                    (false, false) => {}
                    _ => return domain_err(format!("parameters `{mk}` and `{nk}` come in pairs")),
                }
            }
            inner_count_pure_ws(&dims)
        }
        _ => unreachable!("registry and dispatch disagree"),
    };
    Ok(CardinalityReport {
        value,
        formula_id: formula_id.to_string(),
        parameters: params.clone(),
        method: Method::ClosedForm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(v: u64) -> BigUint {
        BigUint::from(v)
    }

    /// Exhaustive count of ternary vectors by sum.
    fn census(n: usize) -> BTreeMap<i64, u64> {
        let mut out = BTreeMap::new();
        for code in 0..3u64.pow(n as u32) {
            let mut c = code;
            let mut s = 0i64;
            for _ in 0..n {
                s += (c % 3) as i64 - 1;
                c /= 3;
            }
            *out.entry(s).or_default() += 1;
        }
        out
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(5, 2), u(10));
        assert_eq!(binom(5, 6), u(0));
        assert_eq!(binom(5, -1), u(0));
        assert_eq!(binom(0, 0), u(1));
        assert_eq!(binom(60, 30), u(118264581564861424));
    }

    #[test]
    fn sum_counts() {
        assert_eq!(count_sum_t(2, 1), u(2));
        assert_eq!(count_sum_t(2, 0), u(3));
        assert_eq!(count_sum_t(3, 1), u(6));
        assert_eq!(count_sum_t(1, 1), u(1));
        for n in 0..=8 {
            let c = census(n);
            for t in -(n as i64)..=(n as i64) {
                assert_eq!(count_sum_t(n, t), u(*c.get(&t).unwrap_or(&0)), "n={n} t={t}");
            }
        }
        let total: BigUint = (-40..=40).map(|t| count_sum_t(40, t)).sum();
        assert_eq!(total, BigUint::from(3u32).pow(40));
    }

    #[test]
    fn formula_values() {
        assert_eq!(inner_count_full_type_I(2, 2), u(16));
        assert_eq!(inner_count_full_type_I(3, 3), u(2907));
        assert_eq!(outer_count_full_type_I(2, 2, false), u(4));
        assert_eq!(outer_count_full_type_I(2, 3, false), u(12));
        assert_eq!(outer_count_full_type_I(2, 2, true), u(5));
        assert_eq!(outer_count_natural_pop(2, 3, true), u(7));
        assert_eq!(outer_count_natural_pop(1, 1, false), u(1));
        assert_eq!(outer_count_natural_pop(2, 2, false), u(0));
        assert_eq!(outer_count_full_type_III(1, 1, 1, false), u(3));
        assert_eq!(outer_count_full_type_III(1, 1, 0, false), u(1));
        assert_eq!(outer_count_full_type_III(2, 2, 1, false), u(12));
        assert_eq!(outer_count_S4(1, 1), u(9));
        assert_eq!(outer_count_S4(2, 1), u(25));
        assert_eq!(inner_count_pure_ws(&[(1, 1), (1, 1)]), u(1));
        assert_eq!(inner_count_pure_ws(&[(1, 2), (1, 1)]), u(6));
        assert_eq!(inner_count_pure_ws(&[(2, 3)]), inner_count_full_type_I(2, 3));
    }

    #[test]
    fn identity_examples() {
        let c = binomial_identity_check(1, 1, 1);
        assert_eq!((c.lhs.clone(), c.rhs.clone(), c.equal), (u(2), u(2), true));
        assert_eq!(binomial_identity_check(2, 1, 1).lhs, u(16));
        assert!(binomial_identity_check(2, 1, 1).equal);
        assert_eq!(binomial_identity_check(1, 2, 1).lhs, u(6));
        assert!(binomial_identity_check(1, 2, 1).equal);
    }

    #[test]
    fn registry() {
        let p = |pairs: &[(&str, i64)]| pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let r = evaluate("outer_type_I", &p(&[("m", 2), ("n", 2)])).unwrap();
        assert_eq!(r.value, u(4));
        assert_eq!(r.csv_header(), "formula_id,m,n,value,method");
        assert_eq!(r.csv_row(), "outer_type_I,2,2,4,closed_form");
        assert_eq!(r.to_json()["value"], 4);
        let r = evaluate("natural_pop", &p(&[("m", 2), ("n", 3), ("zero_in_pop", 1)])).unwrap();
        assert_eq!(r.value, u(7));
        let r = evaluate("inner_pure_ws", &p(&[("m1", 1), ("n1", 2), ("m2", 1), ("n2", 1)])).unwrap();
        assert_eq!(r.value, u(6));
        assert!(evaluate("nope", &p(&[])).is_err());
        assert!(evaluate("outer_type_I", &p(&[("m", 2)])).is_err());
        assert!(evaluate("outer_type_I", &p(&[("m", 2), ("n", 2), ("q", 1)])).is_err());
        assert!(evaluate("outer_type_I", &p(&[("m", 0), ("n", 2)])).is_err());
    }
}
