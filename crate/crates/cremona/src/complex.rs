//! Complex numbers on the wire: written as `[re, im]`, read from either
//! `[re, im]`, a bare number, or a string such as `"0.31+1.17i"`.

use std::fmt;

use cremona_core::Complex64;
use serde::de::{self, SeqAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cx(pub Complex64);

impl From<Complex64> for Cx {
    fn from(z: Complex64) -> Self {
        Cx(z)
    }
}

impl From<Cx> for Complex64 {
    fn from(z: Cx) -> Self {
        z.0
    }
}

impl Serialize for Cx {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cx {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(CxVisitor)
    }
}

struct CxVisitor;

impl<'de> Visitor<'de> for CxVisitor {
    type Value = Cx;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a complex number as [re, im], a number, or \"a+bi\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Cx, E> {
        Ok(Cx(Complex64::new(v, 0.0)))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Cx, E> {
        self.visit_f64(v as f64)
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Cx, E> {
        self.visit_f64(v as f64)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Cx, E> {
        parse_complex(v).map(Cx).map_err(E::custom)
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Cx, A::Error> {
        let re: f64 = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
        let im: f64 = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &self))?;
        if seq.next_element::<f64>()?.is_some() {
            return Err(de::Error::invalid_length(3, &self));
        }
        Ok(Cx(Complex64::new(re, im)))
    }
}

/// Parses `"a"`, `"bi"`, `"a+bi"`, `"a-bi"`, `"i"`, `"-i"`, allowing
/// exponents and surrounding whitespace.
pub fn parse_complex(input: &str) -> Result<Complex64, String> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || format!("invalid complex number {input:?}");
    if s.is_empty() {
        return Err(err());
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| err());
    };
    // split before the last sign that is not the leading one or part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().map_err(|_| err())?,
    };
    let re = re.parse::<f64>().map_err(|_| err())?;
    Ok(Complex64::new(re, im))
}
