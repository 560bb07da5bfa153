//! JSON interchange for q-terms and Laurent polynomials.
//!
//! Documents are parsed into `serde_json::Value` and then validated by hand so
//! that every problem is reported with a JSON pointer, not just the first one.

use std::str::FromStr;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use super::forms::{LinForm, QuadForm, Sign};
use super::laurent::LaurentPoly;
use super::term::{Factor, QTerm, QuadFactor, SpecialQTerm};
use crate::{Error, Result, SchemaIssue};

/// Either kind of term a document can describe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyTerm {
    Plain(QTerm),
    Special(SpecialQTerm),
}

impl AnyTerm {
    /// The plain q-term whose variational equations describe this term.
    pub fn variational_qterm(&self) -> Option<QTerm> {
        match self {
            AnyTerm::Plain(t) => Some(t.clone()),
            AnyTerm::Special(s) => s.fiber_qterm(),
        }
    }
}

struct Checker {
    issues: Vec<SchemaIssue>,
}

impl Checker {
    fn fail(&mut self, ptr: &str, msg: impl Into<String>) {
        self.issues.push(SchemaIssue { pointer: ptr.to_string(), message: msg.into() });
    }

    fn field<'a>(&mut self, obj: &'a Map<String, Value>, ptr: &str, key: &str) -> Option<&'a Value> {
        let v = obj.get(key);
        if v.is_none() {
            self.fail(ptr, format!("missing field \"{key}\""));
        }
        v
    }

    fn object<'a>(&mut self, v: &'a Value, ptr: &str) -> Option<&'a Map<String, Value>> {
        let o = v.as_object();
        if o.is_none() {
            self.fail(ptr, "expected an object");
        }
        o
    }

    fn int(&mut self, v: &Value, ptr: &str) -> Option<i64> {
        let i = v.as_i64();
        if i.is_none() {
            self.fail(ptr, "expected an integer");
        }
        i
    }

    fn int_vec(&mut self, v: &Value, ptr: &str, len: Option<usize>) -> Option<Vec<i64>> {
        let Some(arr) = v.as_array() else {
            self.fail(ptr, "expected an array of integers");
            return None;
        };
        if let Some(n) = len {
            if arr.len() != n {
                self.fail(ptr, format!("expected {n} entries, found {}", arr.len()));
                return None;
            }
        }
        let vals: Vec<Option<i64>> =
            arr.iter().enumerate().map(|(i, x)| self.int(x, &format!("{ptr}/{i}"))).collect();
        vals.into_iter().collect()
    }

    /// Integer or half-integer, returned doubled.
    fn half_int(&mut self, v: &Value, ptr: &str) -> Option<i64> {
        if let Some(i) = v.as_i64() {
            return i.checked_mul(2).or_else(|| {
                self.fail(ptr, "value out of range");
                None
            });
        }
        if let Some(s) = v.as_str() {
            let s = s.trim();
            if let Some(num) = s.strip_suffix("/2") {
                if let Ok(p) = num.trim().parse::<i64>() {
                    return Some(p);
                }
            } else if let Ok(p) = s.parse::<i64>() {
                if let Some(d) = p.checked_mul(2) {
                    return Some(d);
                }
            }
        }
        self.fail(ptr, "expected an integer or a string \"p/2\"");
        None
    }

    fn sign(&mut self, v: &Value, ptr: &str) -> Option<Sign> {
        let s = v.as_i64().and_then(Sign::from_i64);
        if s.is_none() {
            self.fail(ptr, "expected 1 or -1");
        }
        s
    }

    fn lin_form(&mut self, v: &Value, ptr: &str, dim: usize) -> Option<LinForm> {
        let obj = self.object(v, ptr)?;
        let coeffs = self
            .field(obj, ptr, "coeffs")
            .and_then(|c| self.int_vec(c, &format!("{ptr}/coeffs"), Some(dim)));
        let constant = match obj.get("constant") {
            None => Some(0),
            Some(c) => self.int(c, &format!("{ptr}/constant")),
        };
        Some(LinForm::new(coeffs?, constant?))
    }
}

/// Parse a q-term or special q-term document.
pub fn parse_term(text: &str) -> Result<AnyTerm> {
    let v: Value = serde_json::from_str(text).map_err(|e| {
        Error::Schema(vec![SchemaIssue { pointer: String::new(), message: format!("invalid JSON: {e}") }])
    })?;
    parse_term_value(&v)
}

pub fn parse_term_value(v: &Value) -> Result<AnyTerm> {
    let mut ck = Checker { issues: Vec::new() };
    let out = term_from_value(&mut ck, v);
    if !ck.issues.is_empty() {
        return Err(Error::Schema(ck.issues));
    }
    match out {
        Some(r) => r,
        None => Err(Error::Schema(vec![SchemaIssue {
            pointer: String::new(),
            message: "invalid document".into(),
        }])),
    }
}

fn term_from_value(ck: &mut Checker, v: &Value) -> Option<Result<AnyTerm>> {
    let obj = ck.object(v, "")?;
    let r = ck.field(obj, "", "r").and_then(|r| ck.int(r, "/r"));
    let r = match r {
        Some(r) if (0..=64).contains(&r) => r as usize,
        Some(_) => {
            ck.fail("/r", "r must be between 0 and 64");
            return None;
        }
        None => return None,
    };
    let dim = r + 1;

    let q = ck.field(obj, "", "Q").and_then(|qv| {
        let qo = ck.object(qv, "/Q")?;
        let matrix = ck.field(qo, "/Q", "matrix").and_then(|m| {
            let Some(rows) = m.as_array() else {
                ck.fail("/Q/matrix", "expected an array of rows");
                return None;
            };
            if rows.len() != dim {
                ck.fail("/Q/matrix", format!("expected {dim} rows, found {}", rows.len()));
                return None;
            }
            let rows: Vec<Option<Vec<i64>>> = rows
                .iter()
                .enumerate()
                .map(|(i, row)| ck.int_vec(row, &format!("/Q/matrix/{i}"), Some(dim)))
                .collect();
            rows.into_iter().collect::<Option<Vec<_>>>()
        });
        let linear = match qo.get("linear") {
            None => Some(vec![0; dim]),
            Some(lv) => match lv.as_array() {
                Some(a) if a.len() == dim => a
                    .iter()
                    .enumerate()
                    .map(|(i, x)| ck.half_int(x, &format!("/Q/linear/{i}")))
                    .collect::<Vec<_>>()
                    .into_iter()
                    .collect(),
                _ => {
                    ck.fail("/Q/linear", format!("expected an array of {dim} entries"));
                    None
                }
            },
        };
        let (matrix, linear) = (matrix?, linear?);
        match QuadForm::new(matrix, linear) {
            Ok(q) => Some(q),
            Err(e) => {
                ck.fail("/Q", e.to_string());
                None
            }
        }
    });
    let l = match obj.get("L") {
        None => Some(LinForm::zero(dim)),
        Some(lv) => ck.lin_form(lv, "/L", dim),
    };
    let eps = match obj.get("epsilon") {
        None => Some(Sign::Plus),
        Some(e) => ck.sign(e, "/epsilon"),
    };

    if let Some(quads) = obj.get("quads") {
        if obj.get("factors").and_then(|f| f.as_array()).is_some_and(|a| !a.is_empty()) {
            ck.fail("/factors", "a term with \"quads\" cannot also have \"factors\"");
        }
        if r == 0 {
            ck.fail("/r", "a special term needs r ≥ 1");
        }
        let Some(arr) = quads.as_array() else {
            ck.fail("/quads", "expected an array");
            return None;
        };
        let mut parsed = Vec::new();
        for (j, qv) in arr.iter().enumerate() {
            let ptr = format!("/quads/{j}");
            let Some(qo) = ck.object(qv, &ptr) else { continue };
            let mut forms = Vec::new();
            for key in ["B", "C", "D", "E"] {
                let f = match qo.get(key) {
                    None => Some(LinForm::zero(dim)),
                    Some(fv) => ck.lin_form(fv, &format!("{ptr}/{key}"), dim),
                };
                forms.push(f);
            }
            if let [Some(b), Some(c), Some(d), Some(e)] = <[Option<LinForm>; 4]>::try_from(forms).ok()? {
                parsed.push(QuadFactor::new(b, c, d, e));
            }
        }
        let (q, l, eps) = (q?, l?, eps?);
        if !ck.issues.is_empty() {
            return None;
        }
        return Some(SpecialQTerm::new(q, l, eps, parsed).map(AnyTerm::Special));
    }

    let factors = ck.field(obj, "", "factors").and_then(|fv| {
        let Some(arr) = fv.as_array() else {
            ck.fail("/factors", "expected an array");
            return None;
        };
        let mut out = Vec::new();
        let mut ok = true;
        for (j, f) in arr.iter().enumerate() {
            let ptr = format!("/factors/{j}");
            let Some(fo) = ck.object(f, &ptr) else {
                ok = false;
                continue;
            };
            let a = ck.field(fo, &ptr, "A").and_then(|a| ck.lin_form(a, &format!("{ptr}/A"), dim));
            let s = match fo.get("sign") {
                None => Some(Sign::Plus),
                Some(s) => ck.sign(s, &format!("{ptr}/sign")),
            };
            match (a, s) {
                (Some(a), Some(s)) => out.push(Factor::new(a, s)),
                _ => ok = false,
            }
        }
        ok.then_some(out)
    });
    let (q, l, eps, factors) = (q?, l?, eps?, factors?);
    Some(QTerm::new(q, l, eps, factors).map(AnyTerm::Plain))
}

fn half_to_json(twice: i64) -> Value {
    if twice % 2 == 0 {
        json!(twice / 2)
    } else {
        json!(format!("{twice}/2"))
    }
}

fn lin_to_json(f: &LinForm) -> Value {
    json!({"coeffs": f.coeffs(), "constant": f.constant()})
}

fn quad_to_json(q: &QuadForm) -> Value {
    json!({
        "matrix": q.matrix(),
        "linear": q.linear_twice().iter().map(|&x| half_to_json(x)).collect::<Vec<_>>(),
    })
}

pub fn qterm_to_json(t: &QTerm) -> Value {
    json!({
        "r": t.r(),
        "Q": quad_to_json(t.q()),
        "L": lin_to_json(t.l()),
        "epsilon": t.epsilon().as_i64(),
        "factors": t.factors().iter().map(|f| json!({
            "A": lin_to_json(&f.form),
            "sign": f.sign.as_i64(),
        })).collect::<Vec<_>>(),
    })
}

pub fn special_to_json(t: &SpecialQTerm) -> Value {
    json!({
        "r": t.r(),
        "Q": quad_to_json(t.q()),
        "L": lin_to_json(t.l()),
        "epsilon": t.epsilon().as_i64(),
        "quads": t.quads().iter().map(|qf| json!({
            "B": lin_to_json(&qf.b),
            "C": lin_to_json(&qf.c),
            "D": lin_to_json(&qf.d),
            "E": lin_to_json(&qf.e),
        })).collect::<Vec<_>>(),
    })
}

pub fn term_to_json(t: &AnyTerm) -> Value {
    match t {
        AnyTerm::Plain(q) => qterm_to_json(q),
        AnyTerm::Special(s) => special_to_json(s),
    }
}

/// `{"terms": [[exp, "coeff"], ...]}` with exponents increasing and
/// coefficients as decimal strings.
pub fn laurent_to_json(p: &LaurentPoly) -> Value {
    json!({"terms": p.terms().map(|(e, c)| json!([e, c.to_string()])).collect::<Vec<_>>()})
}

pub fn parse_laurent(text: &str) -> Result<LaurentPoly> {
    let v: Value = serde_json::from_str(text).map_err(|e| {
        Error::Schema(vec![SchemaIssue { pointer: String::new(), message: format!("invalid JSON: {e}") }])
    })?;
    laurent_from_value(&v)
}

pub fn laurent_from_value(v: &Value) -> Result<LaurentPoly> {
    let mut ck = Checker { issues: Vec::new() };
    let mut out = LaurentPoly::zero();
    let terms = ck.object(v, "").and_then(|o| ck.field(o, "", "terms").cloned());
    if let Some(terms) = terms {
        match terms.as_array() {
            None => ck.fail("/terms", "expected an array"),
            Some(arr) => {
                let mut last: Option<i64> = None;
                for (i, t) in arr.iter().enumerate() {
                    let ptr = format!("/terms/{i}");
                    let pair = t.as_array().filter(|a| a.len() == 2);
                    let Some(pair) = pair else {
                        ck.fail(&ptr, "expected [exponent, \"coefficient\"]");
                        continue;
                    };
                    let e = ck.int(&pair[0], &format!("{ptr}/0"));
                    let c = match &pair[1] {
                        Value::String(s) => BigInt::from_str(s.trim()).ok(),
                        Value::Number(n) => n.as_i64().map(BigInt::from),
                        _ => None,
                    };
                    if c.is_none() {
                        ck.fail(&format!("{ptr}/1"), "expected a decimal integer");
                    }
                    if let Some(e) = e {
                        if last.is_some_and(|l| l >= e) {
                            ck.fail(&format!("{ptr}/0"), "exponents must be strictly increasing");
                        }
                        last = Some(e);
                    }
                    if let (Some(e), Some(c)) = (e, c) {
                        out.add_term(e, c);
                    }
                }
            }
        }
    }
    if ck.issues.is_empty() {
        Ok(out)
    } else {
        Err(Error::Schema(ck.issues))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FOUR_ONE: &str = r#"{
        "r": 1,
        "Q": {"matrix": [[0, -1], [-1, 0]], "linear": ["0", "0"]},
        "L": {"coeffs": [0, 0], "constant": 0},
        "epsilon": 1,
        "quads": [
            {"B": {"coeffs": [0, 0]}, "C": {"coeffs": [0, 0]},
             "D": {"coeffs": [1, 1]}, "E": {"coeffs": [1, 0]}},
            {"B": {"coeffs": [0, 0]}, "C": {"coeffs": [0, 0]},
             "D": {"coeffs": [1, 0], "constant": -1}, "E": {"coeffs": [1, -1], "constant": -1}}
        ]
    }"#;

    #[test]
    fn round_trip_special() {
        let t = parse_term(FOUR_ONE).unwrap();
        let back = parse_term(&term_to_json(&t).to_string()).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn round_trip_plain() {
        let doc = r#"{"r":0,"Q":{"matrix":[[1]],"linear":["1/2"]},"L":{"coeffs":[1]},
                      "epsilon":-1,"factors":[{"A":{"coeffs":[1],"constant":0},"sign":-1}]}"#;
        let t = parse_term(doc).unwrap();
        let AnyTerm::Plain(q) = &t else { panic!() };
        assert_eq!(q.q().linear_twice(), &[1]);
        assert_eq!(parse_term(&term_to_json(&t).to_string()).unwrap(), t);
    }

    #[test]
    fn errors_carry_pointers() {
        let doc = r#"{"r":1,"Q":{"matrix":[[0,1],[1,0]],"linear":["x","0"]},
                      "epsilon":3,"factors":[{"A":{"coeffs":[1]}}]}"#;
        let Err(Error::Schema(issues)) = parse_term(doc) else { panic!() };
        let ptrs: Vec<&str> = issues.iter().map(|i| i.pointer.as_str()).collect();
        assert!(ptrs.contains(&"/Q/linear/0"), "{ptrs:?}");
        assert!(ptrs.contains(&"/epsilon"), "{ptrs:?}");
        assert!(ptrs.contains(&"/factors/0/A/coeffs"), "{ptrs:?}");
    }

    #[test]
    fn parity_violation_is_schema_error() {
        let doc = r#"{"r":0,"Q":{"matrix":[[1]],"linear":["0"]},"factors":[]}"#;
        assert!(matches!(parse_term(doc), Err(Error::Schema(_))));
    }

    #[test]
    fn laurent_round_trip() {
        let p = LaurentPoly::from_terms([(-2, BigInt::from(3)), (7, BigInt::from(-1) << 100)]);
        let back = parse_laurent(&laurent_to_json(&p).to_string()).unwrap();
        assert_eq!(p, back);
        assert!(parse_laurent(r#"{"terms":[[2,"1"],[1,"1"]]}"#).is_err());
        assert!(parse_laurent("[").is_err());
    }
}
