//! Line-oriented manifold description files.
//!
//! Grammar (one directive per line, `#` starts a comment):
//!
//! ```text
//! name <string>
//! generator <letter> <8 decimals>   # re/im of a, b, c, d row-major
//! facepairing <word>                # repeatable
//! basepoint <3 decimals>            # upper-half-space point, default 0 0 1
//! volume <decimal>
//! ```
//!
//! Decimals are ingested at full printed precision: the enclosure midpoint is
//! the exact rational value of the literal and the radius is half an ulp of
//! the last printed digit, so truncated published entries stay honest.

use std::path::Path;

use tessella::isometry::{Generators, Isometry, UhpPoint};
use tessella::rigor::{enclosure_from_decimal, ComplexEnclosure, Enclosure};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Grammar { line: usize, msg: String },
    #[error("line {line}: word uses undeclared letter '{letter}'")]
    UnknownLetter { line: usize, letter: char },
    #[error("generator '{letter}' is not a unit-determinant matrix: {reason}")]
    BadMatrix { letter: char, reason: String },
}

/// A parsed input file: a two-or-more generator matrix group together with
/// optional face-pairing words, basepoint, and volume metadata.
pub struct ManifoldFile {
    pub name: String,
    pub generators: Generators,
    pub facepairings: Vec<String>,
    pub basepoint: UhpPoint,
    pub volume: Option<Enclosure>,
}

fn decimal(tok: &str, prec: u32, line: usize) -> Result<Enclosure, ParseError> {
    enclosure_from_decimal(tok, prec).ok_or_else(|| ParseError::Grammar {
        line,
        msg: format!("expected a decimal number, got {tok:?}"),
    })
}

/// Conjugator moving the standard basepoint (0,0,1) to `p`, as an
/// upper-half-space isometry: z ↦ z·height + (x+iy).
fn basepoint_conjugator(p: &UhpPoint) -> Result<Isometry, ParseError> {
    let bad = |msg: &str| ParseError::Grammar {
        line: 0,
        msg: format!("invalid basepoint: {msg}"),
    };
    if !p.z.certainly_positive() {
        return Err(bad("height must be certifiably positive"));
    }
    let s = p.z.sqrt().map_err(|e| bad(&e.to_string()))?;
    let zero = Enclosure::zero(p.prec());
    let a = ComplexEnclosure::real(s.clone());
    let d = ComplexEnclosure::real(s.recip().map_err(|e| bad(&e.to_string()))?);
    let b = ComplexEnclosure::new(p.x.clone(), p.y.clone()).mul(&d);
    let c = ComplexEnclosure::real(zero);
    Ok(Isometry::from_entries(a, b, c, d, ""))
}

pub fn parse_manifold(path: &Path, prec: u32) -> Result<ManifoldFile, ParseError> {
    let text = std::fs::read_to_string(path)?;
    let mut name = String::new();
    let mut raw: Vec<(char, [Enclosure; 8], usize)> = Vec::new();
    let mut facepairings: Vec<(String, usize)> = Vec::new();
    let mut basepoint = UhpPoint::basepoint(prec);
    let mut volume = None;

    for (idx, full_line) in text.lines().enumerate() {
        let line = idx + 1;
        let body = full_line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut toks = body.split_whitespace();
        let directive = toks.next().unwrap();
        let rest: Vec<&str> = toks.collect();
        match directive {
            "name" => {
                name = rest.join(" ");
            }
            "generator" => {
                if rest.len() != 9 {
                    return Err(ParseError::Grammar {
                        line,
                        msg: format!(
                            "generator takes a letter and 8 decimals, got {} fields",
                            rest.len()
                        ),
                    });
                }
                let letter = rest[0];
                let c = match letter.chars().next() {
                    Some(c) if letter.len() == 1 && c.is_ascii_lowercase() => c,
                    _ => {
                        return Err(ParseError::Grammar {
                            line,
                            msg: format!(
                                "generator letter must be one lowercase ASCII char, got {letter:?}"
                            ),
                        })
                    }
                };
                if raw.iter().any(|(l, _, _)| *l == c) {
                    return Err(ParseError::Grammar {
                        line,
                        msg: format!("generator '{c}' declared twice"),
                    });
                }
                let mut entries = Vec::with_capacity(8);
                for tok in &rest[1..] {
                    entries.push(decimal(tok, prec, line)?);
                }
                raw.push((c, entries.try_into().unwrap(), line));
            }
            "facepairing" => {
                if rest.len() != 1 {
                    return Err(ParseError::Grammar {
                        line,
                        msg: "facepairing takes exactly one word".into(),
                    });
                }
                facepairings.push((rest[0].to_string(), line));
            }
            "basepoint" => {
                if rest.len() != 3 {
                    return Err(ParseError::Grammar {
                        line,
                        msg: "basepoint takes 3 decimals".into(),
                    });
                }
                basepoint = UhpPoint::new(
                    decimal(rest[0], prec, line)?,
                    decimal(rest[1], prec, line)?,
                    decimal(rest[2], prec, line)?,
                );
            }
            "volume" => {
                if rest.len() != 1 {
                    return Err(ParseError::Grammar {
                        line,
                        msg: "volume takes one decimal".into(),
                    });
                }
                volume = Some(decimal(rest[0], prec, line)?);
            }
            other => {
                return Err(ParseError::Grammar {
                    line,
                    msg: format!("unknown directive {other:?}"),
                });
            }
        }
    }

    if raw.is_empty() {
        return Err(ParseError::Grammar {
            line: text.lines().count(),
            msg: "no generators declared".into(),
        });
    }

    // Recenter so the Dirichlet basepoint sits at the standard (0,0,1).
    let one = Enclosure::one(prec);
    let trivial = basepoint.x.contains_zero()
        && basepoint.x.is_exact()
        && basepoint.y.contains_zero()
        && basepoint.y.is_exact()
        && basepoint.z.overlaps(&one)
        && basepoint.z.is_exact();
    let conj = if trivial {
        None
    } else {
        let t = basepoint_conjugator(&basepoint)?;
        let t_inv = t.inverse().map_err(|e| ParseError::Grammar {
            line: 0,
            msg: format!("invalid basepoint: {e}"),
        })?;
        Some((t, t_inv))
    };

    let mut gens = Vec::new();
    for (letter, e, _line) in &raw {
        let cx = |re: &Enclosure, im: &Enclosure| ComplexEnclosure::new(re.clone(), im.clone());
        let mut g = Isometry::from_entries(
            cx(&e[0], &e[1]),
            cx(&e[2], &e[3]),
            cx(&e[4], &e[5]),
            cx(&e[6], &e[7]),
            &letter.to_string(),
        );
        if let Some((t, t_inv)) = &conj {
            let h = t_inv.mul(&g).mul(t);
            g = Isometry::from_entries(h.a, h.b, h.c, h.d, &letter.to_string());
        }
        let g = g.normalized().map_err(|e| ParseError::BadMatrix {
            letter: *letter,
            reason: e.to_string(),
        })?;
        let det = g.det();
        if !det.sub(&ComplexEnclosure::one(prec)).contains_zero() {
            return Err(ParseError::BadMatrix {
                letter: *letter,
                reason: "determinant enclosure excludes 1 after normalization".into(),
            });
        }
        gens.push((*letter, g));
    }
    let letters: Vec<char> = gens.iter().map(|(l, _)| *l).collect();
    let generators = Generators::new(gens).map_err(|e| ParseError::Grammar {
        line: 0,
        msg: e.to_string(),
    })?;

    for (word, line) in &facepairings {
        for ch in word.chars() {
            if !letters.contains(&ch.to_ascii_lowercase()) {
                return Err(ParseError::UnknownLetter {
                    line: *line,
                    letter: ch,
                });
            }
        }
    }

    Ok(ManifoldFile {
        name,
        generators,
        facepairings: facepairings.into_iter().map(|(w, _)| w).collect(),
        basepoint,
        volume,
    })
}

/// Validates a command-line word against the declared generator letters.
pub fn check_word(word: &str, gens: &Generators) -> Result<(), ParseError> {
    let letters: Vec<char> = gens.letters().collect();
    for ch in word.chars() {
        if !letters.contains(&ch.to_ascii_lowercase()) {
            return Err(ParseError::UnknownLetter { line: 0, letter: ch });
        }
    }
    if word.is_empty() {
        return Err(ParseError::Grammar {
            line: 0,
            msg: "empty word".into(),
        });
    }
    Ok(())
}
