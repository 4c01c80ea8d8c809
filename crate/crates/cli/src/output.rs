//! Certified decimal emission.
//!
//! Every printed number is checked against its enclosure: if the exact value
//! of the printed string does not lie inside the enclosure, the row carries a
//! `wide` warning so a reader can never mistake a loose result for a tight
//! one.  Output is plain text built deterministically from midpoints, so
//! repeated runs at fixed precision produce bit-identical bytes.

use rug::ops::Pow;
use rug::{Float, Rational};
use tessella::rigor::Enclosure;

pub struct Formatter {
    pub decimals: usize,
}

impl Formatter {
    /// Renders the midpoint to the configured number of places and reports
    /// whether the printed value is certified: the whole enclosure must fit
    /// inside the printed value's half-ulp interval, so every point of the
    /// enclosure agrees with the printed digits to within one final-digit
    /// rounding step.
    pub fn enc(&self, e: &Enclosure) -> (String, bool) {
        let text = format!("{:.*}", self.decimals, e.mid_f64());
        let printed = rational_of_fixed(&text);
        let half_ulp = Rational::from((1, 2)) * Rational::from((1, 10)).pow(self.decimals as u32);
        let interval = Enclosure::new(
            Float::with_val(e.prec(), &printed),
            Float::with_val(e.prec(), half_ulp),
        );
        (text, interval.encloses(e))
    }

    /// Renders a row of enclosures; the last column flags uncertified cells.
    pub fn cells(&self, encs: &[&Enclosure]) -> (Vec<String>, bool) {
        let mut certified = true;
        let mut out = Vec::with_capacity(encs.len());
        for e in encs {
            let (s, ok) = self.enc(e);
            certified &= ok;
            out.push(s);
        }
        (out, certified)
    }
}

fn rational_of_fixed(s: &str) -> Rational {
    let neg = s.starts_with('-');
    let body = s.trim_start_matches('-');
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits: rug::Integer = format!("{int}{frac}").parse().unwrap();
    let denom = rug::Integer::from(10u32).pow(frac.len() as u32);
    let q = Rational::from((digits, denom));
    if neg {
        -q
    } else {
        q
    }
}

/// Parses a decimal literal or a `p/q` fraction into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    if let Some((num, den)) = s.split_once('/') {
        let n: rug::Integer = num.trim().parse().ok()?;
        let d: rug::Integer = den.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Rational::from((n, d)));
    }
    let neg = s.starts_with('-');
    let body = s.trim_start_matches('-');
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: rug::Integer = format!("{}{frac}", if int.is_empty() { "0" } else { int })
        .parse()
        .ok()?;
    let denom = rug::Integer::from(10u32).pow(frac.len() as u32);
    let q = Rational::from((digits, denom));
    Some(if neg { -q } else { q })
}
