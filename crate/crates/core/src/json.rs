//! JSON encodings for polynomials, domains, certificates, and results.
//!
//! Every numeric value that carries mathematical content is a **string**:
//! exact scalars print as rationals (`"-3/7"`, `"1/2+1/3i"`) and floats
//! print with 17 significant digits (`"2.5000000000000000e-1"`), so files
//! round-trip without drift and byte-identical reruns stay byte-identical.
//! Structural integers (variable counts, degrees, permutations) are plain
//! JSON integers.
//!
//! When *reading*, scalar fields accept a string in any form
//! [`crate::scalar::Scalar::parse_json_str`] understands, or a JSON
//! integer. A bare non-integer JSON number is accepted only in the float
//! tower; the exact tower rejects it with a pointer to the offending field,
//! since its decimal intent cannot be recovered from an `f64` faithfully.
//!
//! Formats:
//!
//! * bihomogeneous polynomial: `{"n", "m", "terms": [{"mu", "nu", "re",
//!   "im"}]}` — `mu`/`nu` are exponent arrays; terms may list just one of a
//!   conjugate pair `(μ,ν)/(ν,μ)` and the other is filled in by Hermitian
//!   symmetry, but if both appear they must be conjugates.
//! * holomorphic polynomial: `{"n", "d", "terms": [{"alpha", "re", "im"}]}`.
//! * domain: `{"kind": "ball"|"polydisc", "n"}`, `{"kind": "egg", "p"}`,
//!   `{"kind": "linear-ball", "matrix": [[entry strings]]}`, or
//!   `{"kind": "sampled", "volume", "points": [[re, im, ...]]}` /
//!   `{"kind": "sampled", "volume", "points_file": "path"}` (one line per
//!   point, `2n` floats per line).
//! * certificate: `{"n", "degree", "domain", "d", "perm", "L", "D",
//!   "rank", "strict", "h"}` — `L` is the full unit lower-triangular
//!   matrix as rows of scalar strings, `D` the real pivots, `h` the float
//!   components as dense `[re, im]` string pairs over the graded-lex
//!   monomial basis of the product degree.

use std::fmt::Write as _;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::cert::{DomainId, SosCertificate, VerifyReport};
use crate::domains::DomainSpec;
use crate::error::{Error, Result};
use crate::herm::NegativityWitness;
use crate::mat::Mat;
use crate::multiindex::{dim_homogeneous, enumerate_basis, MultiIndex};
use crate::poly::{BihomPoly, HoloPoly};
use crate::scalar::{format_f64, Complex64, GaussianRational, RealScalar, Scalar};
use crate::stabilize::{DegreeTrial, SphereMinEstimate, StabilizationResult, StabilizeOutcome};

// ---------------------------------------------------------------------
// Field-aware access helpers
// ---------------------------------------------------------------------

fn bad(path: &str, want: &str, got: &Value) -> Error {
    let shown = match got {
        Value::Null => "null".to_string(),
        Value::Bool(_) => "a boolean".to_string(),
        Value::Number(_) => "a number".to_string(),
        Value::String(s) => format!("the string {s:?}"),
        Value::Array(_) => "an array".to_string(),
        Value::Object(_) => "an object".to_string(),
    };
    Error::invalid("json", format!("field `{path}`: expected {want}, found {shown}"))
}

fn get<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::invalid("json", format!("missing field `{path}{key}`")))
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| bad(path, "a nonnegative integer", v))
}

fn as_u32(v: &Value, path: &str) -> Result<u32> {
    let x = as_usize(v, path)?;
    u32::try_from(x).map_err(|_| bad(path, "a degree that fits in 32 bits", v))
}

fn as_bool(v: &Value, path: &str) -> Result<bool> {
    v.as_bool().ok_or_else(|| bad(path, "a boolean", v))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(path, "an array", v))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| bad(path, "a string", v))
}

/// Parse one scalar field: a string in rational/decimal/complex form, or a
/// JSON integer. Bare non-integer numbers are rejected in the exact tower.
fn scalar_from_value<S: Scalar>(v: &Value, path: &str) -> Result<S> {
    match v {
        Value::String(s) => S::parse_json_str(s).map_err(|e| {
            Error::invalid("json", format!("field `{path}`: {e}"))
        }),
        Value::Number(num) => {
            if let Some(i) = num.as_i64() {
                return Ok(S::from_rational(&crate::scalar::Rational::from_integer(
                    i.into(),
                )));
            }
            if S::EXACT {
                return Err(Error::invalid(
                    "json",
                    format!(
                        "field `{path}`: non-integer JSON number {num} cannot enter the exact \
                         tower faithfully; quote it as a string (\"1/2\", \"0.1\", \"2.5e-3\")"
                    ),
                ));
            }
            let x = num.as_f64().ok_or_else(|| bad(path, "a finite number", v))?;
            let re = crate::scalar::rational_from_f64(x)
                .ok_or_else(|| bad(path, "a finite number", v))?;
            Ok(S::from_rational(&re))
        }
        other => Err(bad(path, "a scalar (string or integer)", other)),
    }
}

/// Parse a real field: any scalar form with zero imaginary part.
fn real_from_value<S: Scalar>(v: &Value, path: &str) -> Result<S::Real> {
    let s: S = scalar_from_value(v, path)?;
    if !s.imag().is_zero() {
        return Err(Error::invalid(
            "json",
            format!("field `{path}`: expected a real value, found nonzero imaginary part"),
        ));
    }
    Ok(s.real())
}

fn real_to_string<R: RealScalar>(r: &R) -> String {
    if R::EXACT {
        format!("{r}")
    } else {
        format_f64(r.to_f64())
    }
}

fn f64_from_value(v: &Value, path: &str) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| bad(path, "a finite number", v)),
        Value::String(s) => s
            .parse::<f64>()
            .map_err(|_| bad(path, "a floating-point number", v)),
        other => Err(bad(path, "a number (or number string)", other)),
    }
}

fn multi_index_from_value(v: &Value, n: usize, path: &str) -> Result<MultiIndex> {
    let arr = as_array(v, path)?;
    if arr.len() != n {
        return Err(Error::invalid(
            "json",
            format!("field `{path}`: exponent list has {} entries, expected {n}", arr.len()),
        ));
    }
    let mut exps = Vec::with_capacity(n);
    for (j, e) in arr.iter().enumerate() {
        exps.push(as_u32(e, &format!("{path}[{j}]"))?);
    }
    Ok(MultiIndex::new(exps))
}

fn multi_index_to_value(alpha: &MultiIndex) -> Value {
    Value::Array(alpha.exponents().iter().map(|&e| json!(e)).collect())
}

// ---------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------

/// Serialize a bihomogeneous polynomial. Both members of every conjugate
/// pair are written out; readers may rely on either.
pub fn bihom_to_json<S: Scalar>(f: &BihomPoly<S>) -> Value {
    let terms: Vec<Value> = f
        .terms()
        .map(|((mu, nu), c)| {
            json!({
                "mu": multi_index_to_value(mu),
                "nu": multi_index_to_value(nu),
                "re": real_to_string(&c.real()),
                "im": real_to_string(&c.imag()),
            })
        })
        .collect();
    json!({ "n": f.vars(), "m": f.bidegree(), "terms": terms })
}

/// Parse a bihomogeneous polynomial, completing Hermitian symmetry: a term
/// present as `(μ,ν)` only also contributes `conj` at `(ν,μ)`; listing both
/// with inconsistent values is an error naming the term.
pub fn bihom_from_json<S: Scalar>(v: &Value) -> Result<BihomPoly<S>> {
    let n = as_usize(get(v, "n", "")?, "n")?;
    let m = as_u32(get(v, "m", "")?, "m")?;
    let terms_v = as_array(get(v, "terms", "")?, "terms")?;
    let mut terms: std::collections::BTreeMap<(MultiIndex, MultiIndex), S> =
        std::collections::BTreeMap::new();
    for (i, tv) in terms_v.iter().enumerate() {
        let path = format!("terms[{i}]");
        let mu = multi_index_from_value(get(tv, "mu", &format!("{path}."))?, n, &format!("{path}.mu"))?;
        let nu = multi_index_from_value(get(tv, "nu", &format!("{path}."))?, n, &format!("{path}.nu"))?;
        let re = real_from_value::<S>(get(tv, "re", &format!("{path}."))?, &format!("{path}.re"))?;
        let im = match tv.get("im") {
            Some(iv) => real_from_value::<S>(iv, &format!("{path}.im"))?,
            None => S::Real::zero(),
        };
        let c = S::from_parts(re, im);
        for ((a, b), value) in [((mu.clone(), nu.clone()), c.clone()), ((nu, mu), c.conj())] {
            if let Some(existing) = terms.get(&(a.clone(), b.clone())) {
                if *existing != value {
                    return Err(Error::invalid(
                        "json",
                        format!(
                            "field `{path}`: coefficient at (mu={a}, nu={b}) conflicts with \
                             the Hermitian mirror of an earlier term"
                        ),
                    ));
                }
            } else {
                terms.insert((a, b), value);
            }
        }
    }
    BihomPoly::from_terms(n, m, terms.into_iter().map(|((mu, nu), c)| (mu, nu, c)))
}

/// Serialize a holomorphic polynomial.
pub fn holo_to_json<S: Scalar>(p: &HoloPoly<S>) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .map(|(alpha, c)| {
            json!({
                "alpha": multi_index_to_value(alpha),
                "re": real_to_string(&c.real()),
                "im": real_to_string(&c.imag()),
            })
        })
        .collect();
    json!({ "n": p.vars(), "d": p.degree(), "terms": terms })
}

/// Parse a holomorphic polynomial.
pub fn holo_from_json<S: Scalar>(v: &Value) -> Result<HoloPoly<S>> {
    let n = as_usize(get(v, "n", "")?, "n")?;
    let d = as_u32(get(v, "d", "")?, "d")?;
    let terms_v = as_array(get(v, "terms", "")?, "terms")?;
    let mut terms = Vec::with_capacity(terms_v.len());
    for (i, tv) in terms_v.iter().enumerate() {
        let path = format!("terms[{i}]");
        let alpha = multi_index_from_value(
            get(tv, "alpha", &format!("{path}."))?,
            n,
            &format!("{path}.alpha"),
        )?;
        let re = real_from_value::<S>(get(tv, "re", &format!("{path}."))?, &format!("{path}.re"))?;
        let im = match tv.get("im") {
            Some(iv) => real_from_value::<S>(iv, &format!("{path}.im"))?,
            None => S::Real::zero(),
        };
        terms.push((alpha, S::from_parts(re, im)));
    }
    HoloPoly::from_terms(n, d, terms)
}

// ---------------------------------------------------------------------
// Domains
// ---------------------------------------------------------------------

/// Serialize a domain. Sampled domains inline their points.
pub fn domain_to_json(dom: &DomainSpec) -> Value {
    match dom.id() {
        DomainId::Ball => json!({ "kind": "ball", "n": dom.vars() }),
        DomainId::Polydisc => json!({ "kind": "polydisc", "n": dom.vars() }),
        DomainId::Egg(p) => json!({ "kind": "egg", "p": p }),
        DomainId::LinearBall => {
            let a = dom.linear_matrix().expect("kind checked");
            let rows: Vec<Value> = (0..a.nrows())
                .map(|i| {
                    Value::Array(
                        a.row(i)
                            .iter()
                            .map(|e| Value::String(e.to_json_string()))
                            .collect(),
                    )
                })
                .collect();
            json!({ "kind": "linear-ball", "matrix": rows })
        }
        DomainId::Sampled => {
            let (points, volume) = dom.sample_data().expect("kind checked");
            let rows: Vec<Value> = points
                .iter()
                .map(|pt| {
                    Value::Array(
                        pt.iter()
                            .flat_map(|c| [c.re, c.im])
                            .map(|x| Value::String(format_f64(x)))
                            .collect(),
                    )
                })
                .collect();
            json!({ "kind": "sampled", "volume": format_f64(volume), "points": rows })
        }
        DomainId::Euclidean => json!({ "kind": "euclidean" }),
    }
}

/// Parse a domain description. `points_file` paths are read relative to
/// the process working directory.
pub fn domain_from_json(v: &Value) -> Result<DomainSpec> {
    let kind = as_str(get(v, "kind", "")?, "kind")?;
    match kind {
        "ball" => DomainSpec::ball(as_usize(get(v, "n", "")?, "n")?),
        "polydisc" => DomainSpec::polydisc(as_usize(get(v, "n", "")?, "n")?),
        "egg" => DomainSpec::egg(as_u32(get(v, "p", "")?, "p")?),
        "linear-ball" => {
            let rows_v = as_array(get(v, "matrix", "")?, "matrix")?;
            let mut rows = Vec::with_capacity(rows_v.len());
            for (i, rv) in rows_v.iter().enumerate() {
                let row_v = as_array(rv, &format!("matrix[{i}]"))?;
                let mut row = Vec::with_capacity(row_v.len());
                for (j, ev) in row_v.iter().enumerate() {
                    row.push(scalar_from_value::<GaussianRational>(
                        ev,
                        &format!("matrix[{i}][{j}]"),
                    )?);
                }
                rows.push(row);
            }
            DomainSpec::linear_ball(Mat::from_rows(rows)?)
        }
        "sampled" => {
            let volume = f64_from_value(get(v, "volume", "")?, "volume")?;
            let points = if let Some(pv) = v.get("points") {
                parse_inline_points(pv)?
            } else if let Some(fv) = v.get("points_file") {
                let path = as_str(fv, "points_file")?;
                let text = std::fs::read_to_string(path)?;
                parse_points_text(&text)?
            } else {
                return Err(Error::invalid(
                    "json",
                    "sampled domain needs `points` or `points_file`",
                ));
            };
            DomainSpec::sampled(points, volume)
        }
        other => Err(Error::invalid(
            "json",
            format!("field `kind`: unknown domain kind {other:?}"),
        )),
    }
}

fn parse_inline_points(v: &Value) -> Result<Vec<Vec<Complex64>>> {
    let rows = as_array(v, "points")?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, rv) in rows.iter().enumerate() {
        let path = format!("points[{i}]");
        let row = as_array(rv, &path)?;
        if row.len() % 2 != 0 {
            return Err(Error::invalid(
                "json",
                format!("field `{path}`: need an even count of re/im values"),
            ));
        }
        let mut pt = Vec::with_capacity(row.len() / 2);
        for pair in row.chunks(2) {
            let re = f64_from_value(&pair[0], &path)?;
            let im = f64_from_value(&pair[1], &path)?;
            pt.push(Complex64::new(re, im));
        }
        out.push(pt);
    }
    Ok(out)
}

/// Text form of a point cloud: one point per line, `2n` whitespace-separated
/// floats (re and im of each coordinate); blank lines and `#` comments skip.
pub fn parse_points_text(text: &str) -> Result<Vec<Vec<Complex64>>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let nums: std::result::Result<Vec<f64>, _> =
            line.split_whitespace().map(str::parse::<f64>).collect();
        let nums = nums.map_err(|_| {
            Error::invalid(
                "points",
                format!("line {}: expected whitespace-separated floats", lineno + 1),
            )
        })?;
        if nums.is_empty() || nums.len() % 2 != 0 {
            return Err(Error::invalid(
                "points",
                format!("line {}: need an even, positive count of floats", lineno + 1),
            ));
        }
        out.push(nums.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect());
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------

/// Serialize a certificate.
pub fn certificate_to_json<S: Scalar>(cert: &SosCertificate<S>) -> Value {
    let size = cert.unit_lower.nrows();
    let l_rows: Vec<Value> = (0..size)
        .map(|i| {
            Value::Array(
                cert.unit_lower
                    .row(i)
                    .iter()
                    .map(|e| Value::String(e.to_json_string()))
                    .collect(),
            )
        })
        .collect();
    let d_row: Vec<Value> = cert
        .pivots
        .iter()
        .map(|p| Value::String(real_to_string(p)))
        .collect();
    let basis = enumerate_basis(cert.n, cert.degree);
    let h_rows: Vec<Value> = cert
        .components
        .iter()
        .map(|h| {
            Value::Array(
                basis
                    .iter()
                    .map(|alpha| {
                        let c = h.coeff(alpha);
                        json!([format_f64(c.re), format_f64(c.im)])
                    })
                    .collect(),
            )
        })
        .collect();
    json!({
        "n": cert.n,
        "degree": cert.degree,
        "domain": cert.domain.as_str(),
        "d": cert.d,
        "perm": cert.perm.clone(),
        "L": l_rows,
        "D": d_row,
        "rank": cert.rank,
        "strict": cert.strict,
        "h": h_rows,
    })
}

/// Parse a certificate, checking all cross-field size constraints.
pub fn certificate_from_json<S: Scalar>(v: &Value) -> Result<SosCertificate<S>> {
    let n = as_usize(get(v, "n", "")?, "n")?;
    let degree = as_u32(get(v, "degree", "")?, "degree")?;
    let domain = DomainId::parse(as_str(get(v, "domain", "")?, "domain")?)?;
    let d = as_u32(get(v, "d", "")?, "d")?;
    let size = dim_homogeneous(n, degree);

    let perm_v = as_array(get(v, "perm", "")?, "perm")?;
    if perm_v.len() != size {
        return Err(Error::invalid(
            "json",
            format!("field `perm`: has {} entries, basis needs {size}", perm_v.len()),
        ));
    }
    let mut perm = Vec::with_capacity(size);
    for (i, pv) in perm_v.iter().enumerate() {
        perm.push(as_usize(pv, &format!("perm[{i}]"))?);
    }

    let l_v = as_array(get(v, "L", "")?, "L")?;
    if l_v.len() != size {
        return Err(Error::invalid(
            "json",
            format!("field `L`: has {} rows, basis needs {size}", l_v.len()),
        ));
    }
    let mut unit_lower = Mat::<S>::zeros(size, size);
    for (i, rv) in l_v.iter().enumerate() {
        let row = as_array(rv, &format!("L[{i}]"))?;
        if row.len() != size {
            return Err(Error::invalid(
                "json",
                format!("field `L[{i}]`: has {} entries, basis needs {size}", row.len()),
            ));
        }
        for (j, ev) in row.iter().enumerate() {
            unit_lower[(i, j)] = scalar_from_value::<S>(ev, &format!("L[{i}][{j}]"))?;
        }
    }

    let d_v = as_array(get(v, "D", "")?, "D")?;
    if d_v.len() != size {
        return Err(Error::invalid(
            "json",
            format!("field `D`: has {} entries, basis needs {size}", d_v.len()),
        ));
    }
    let mut pivots = Vec::with_capacity(size);
    for (i, pv) in d_v.iter().enumerate() {
        pivots.push(real_from_value::<S>(pv, &format!("D[{i}]"))?);
    }

    let rank = as_usize(get(v, "rank", "")?, "rank")?;
    let strict = as_bool(get(v, "strict", "")?, "strict")?;

    let h_v = as_array(get(v, "h", "")?, "h")?;
    let basis = enumerate_basis(n, degree);
    let mut components = Vec::with_capacity(h_v.len());
    for (s, hv) in h_v.iter().enumerate() {
        let dense = as_array(hv, &format!("h[{s}]"))?;
        if dense.len() != size {
            return Err(Error::invalid(
                "json",
                format!("field `h[{s}]`: has {} coefficients, basis needs {size}", dense.len()),
            ));
        }
        let mut terms = Vec::new();
        for (k, cv) in dense.iter().enumerate() {
            let pair = as_array(cv, &format!("h[{s}][{k}]"))?;
            if pair.len() != 2 {
                return Err(Error::invalid(
                    "json",
                    format!("field `h[{s}][{k}]`: expected a [re, im] pair"),
                ));
            }
            let re = f64_from_value(&pair[0], &format!("h[{s}][{k}][0]"))?;
            let im = f64_from_value(&pair[1], &format!("h[{s}][{k}][1]"))?;
            if re != 0.0 || im != 0.0 {
                terms.push((basis[k].clone(), Complex64::new(re, im)));
            }
        }
        components.push(HoloPoly::from_terms(n, degree, terms)?);
    }

    Ok(SosCertificate {
        n,
        degree,
        domain,
        d,
        perm,
        unit_lower,
        pivots,
        rank,
        strict,
        components,
        numeric: !S::EXACT,
    })
}

// ---------------------------------------------------------------------
// Search results and reports
// ---------------------------------------------------------------------

/// Serialize a negativity witness.
pub fn witness_to_json<S: Scalar>(w: &NegativityWitness<S>) -> Value {
    json!({
        "vector": w.vector.iter().map(|c| Value::String(c.to_json_string())).collect::<Vec<_>>(),
        "value": real_to_string(&w.value),
    })
}

fn sphere_to_json(s: &SphereMinEstimate) -> Value {
    json!({
        "min": format_f64(s.value),
        "point": s.point.iter()
            .map(|c| json!([format_f64(c.re), format_f64(c.im)]))
            .collect::<Vec<_>>(),
        "starts": s.starts,
    })
}

fn trial_to_json<S: Scalar>(t: &DegreeTrial<S>) -> Value {
    match &t.witness {
        Some(w) => json!({ "d": t.d, "psd": t.psd, "witness": witness_to_json(w) }),
        None => json!({ "d": t.d, "psd": t.psd }),
    }
}

/// Serialize a full stabilization outcome (success or cap exhaustion).
pub fn stabilize_outcome_to_json<S: Scalar>(out: &StabilizeOutcome<S>) -> Value {
    match out {
        StabilizeOutcome::Stabilized(r) => stabilization_to_json(r),
        StabilizeOutcome::CapExceeded { tested, sphere, cap } => json!({
            "stabilized": false,
            "cap": cap,
            "sphere": sphere_to_json(sphere),
            "tested": tested.iter().map(trial_to_json).collect::<Vec<_>>(),
        }),
    }
}

/// Serialize a successful stabilization run.
pub fn stabilization_to_json<S: Scalar>(r: &StabilizationResult<S>) -> Value {
    json!({
        "stabilized": true,
        "domain": r.domain.as_str(),
        "d0": r.d0,
        "cap": r.cap,
        "numeric": r.numeric,
        "hypotheses_met": r.hypotheses_met,
        "sphere": sphere_to_json(&r.sphere),
        "tested": r.tested.iter().map(trial_to_json).collect::<Vec<_>>(),
        "tail": r.tail.iter().map(trial_to_json).collect::<Vec<_>>(),
        "certificate": certificate_to_json(&r.certificate),
    })
}

/// Serialize a verification report.
pub fn verify_report_to_json(rep: &VerifyReport) -> Value {
    json!({
        "pass": rep.pass(),
        "structure_ok": rep.structure_ok,
        "structure_error": rep.structure_error.clone(),
        "matrix_ok": rep.matrix_ok(),
        "first_mismatch": rep.first_mismatch.map(|(i, j)| json!([i, j])),
        "residual": format_f64(rep.residual),
        "residual_bound": format_f64(rep.residual_bound),
        "numeric": rep.numeric,
    })
}

/// Render any value as stable, pretty-printed JSON with a trailing newline.
/// Object keys are emitted in sorted order, so equal data means equal bytes.
pub fn to_stable_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    let _ = writeln!(s);
    s
}
