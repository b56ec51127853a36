//! Integer ranges `a..b[:step]` (inclusive), comma lists, and rationals for tolerances.

use std::str::FromStr;
use zonalis::Rational;

pub fn parse_range(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        let (body, step) = match part.split_once(':') {
            Some((b, st)) => (b, st.parse::<usize>().map_err(|_| format!("bad step in '{part}'"))?),
            None => (part, 1),
        };
        if step == 0 {
            return Err(format!("zero step in '{part}'"));
        }
        match body.split_once("..") {
            Some((a, b)) => {
                let a: usize = a.trim().parse().map_err(|_| format!("bad range '{part}'"))?;
                let b: usize = b.trim().parse().map_err(|_| format!("bad range '{part}'"))?;
                if a > b {
                    return Err(format!("empty range '{part}'"));
                }
                out.extend((a..=b).step_by(step));
            }
            None => out.push(body.parse().map_err(|_| format!("bad integer '{part}'"))?),
        }
    }
    if out.is_empty() {
        return Err("empty range".into());
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Orders `i` for dimension `n`: `all`, `n-1`, or a range.
pub fn parse_orders(s: &str, n: usize) -> Result<Vec<usize>, String> {
    match s.trim() {
        "all" => Ok((1..n).collect()),
        "n-1" => Ok(vec![n - 1]),
        other => {
            let v = parse_range(other)?;
            match v.iter().find(|&&i| i < 1 || i >= n) {
                Some(i) => Err(format!("order i = {i} outside [1, {}]", n - 1)),
                None => Ok(v),
            }
        }
    }
}

/// `p/q`, `2^-e`, or a decimal (taken exactly).
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    if let Some((b, e)) = s.split_once('^') {
        let b = Rational::from_str(b).map_err(|_| format!("bad base in '{s}'"))?;
        let e: i32 = e.parse().map_err(|_| format!("bad exponent in '{s}'"))?;
        return Ok(num_pow(&b, e));
    }
    if let Ok(r) = Rational::from_str(s) {
        return Ok(r);
    }
    let x: f64 = s.parse().map_err(|_| format!("bad number '{s}'"))?;
    Rational::from_float(x).ok_or_else(|| format!("bad number '{s}'"))
}

fn num_pow(b: &Rational, e: i32) -> Rational {
    let p = (0..e.unsigned_abs()).fold(Rational::from_integer(1.into()), |acc, _| acc * b);
    if e < 0 {
        Rational::from_integer(1.into()) / p
    } else {
        p
    }
}
