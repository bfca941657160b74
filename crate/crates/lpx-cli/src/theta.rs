//! Parser for complex literals of the form `a+bi` with decimal parts:
//! `2`, `-1.5`, `i`, `-i`, `2i`, `1+2i`, `1.5-0.5i`, `1e-3+2e2i`.

use num_complex::Complex64;

pub fn parse_complex(input: &str) -> Result<Complex64, String> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex literal".into());
    }
    if !s.ends_with('i') {
        let re: f64 = s.parse().map_err(|_| format!("bad real literal {s:?}"))?;
        return Ok(Complex64::new(re, 0.0));
    }
    let body = &s[..s.len() - 1];
    // Split at the last '+'/'-' that is not leading and not an exponent
    // sign; if none, the whole literal is imaginary.
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        let c = bytes[i] as char;
        if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
            split = Some(i);
            break;
        }
    }
    let (re_part, im_part) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let re: f64 = if re_part.is_empty() {
        0.0
    } else {
        re_part
            .parse()
            .map_err(|_| format!("bad real part {re_part:?}"))?
    };
    let im: f64 = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other
            .parse()
            .map_err(|_| format!("bad imaginary part {other:?}"))?,
    };
    Ok(Complex64::new(re, im))
}
