//! JSON formats for distributions, maps and circle distributions.
//!
//! Rational values travel as strings (`"1/2"`, `"0.25"`, `"-inf"`); circle
//! angles as decimal strings in radians. Parsing canonicalizes and
//! validates (total mass 1, monotone CDF, bijective map); serialization is
//! canonical and byte-stable, so parse∘serialize is the identity on
//! canonical values.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::circle::CircleDistribution;
use crate::distribution::{Distribution, SegmentSpec};
use crate::error::{Error, Result};
use crate::moebius::Moebius;
use crate::scalar::{format_rational, parse_rational, rat_to_f64, ExtReal};
use crate::transform::{MonotoneMap, Orientation};

#[derive(Serialize, Deserialize)]
struct AtomJson {
    at: String,
    mass: String,
}

#[derive(Serialize, Deserialize)]
struct MoebiusJson {
    a: String,
    b: String,
    c: String,
    d: String,
}

#[derive(Serialize, Deserialize)]
struct SegmentJson {
    from: String,
    to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    density: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    moebius: Option<MoebiusJson>,
}

#[derive(Serialize, Deserialize)]
struct DistributionJson {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    atoms: Vec<AtomJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    segments: Vec<SegmentJson>,
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Json(e.to_string())
}

pub fn parse_distribution(text: &str) -> Result<Distribution> {
    let raw: DistributionJson = serde_json::from_str(text).map_err(json_err)?;
    let mut atoms = Vec::with_capacity(raw.atoms.len());
    for a in &raw.atoms {
        atoms.push((parse_rational(&a.at)?, parse_rational(&a.mass)?));
    }
    let mut segments = Vec::with_capacity(raw.segments.len());
    for s in &raw.segments {
        let from = ExtReal::parse(&s.from)?;
        let to = ExtReal::parse(&s.to)?;
        match (&s.density, &s.moebius) {
            (Some(d), None) => {
                let (from, to) = match (from, to) {
                    (ExtReal::Finite(a), ExtReal::Finite(b)) => (a, b),
                    _ => {
                        return Err(Error::InvalidDistribution(
                            "density segments must be bounded".into(),
                        ))
                    }
                };
                segments.push(SegmentSpec::Density {
                    from,
                    to,
                    density: parse_rational(d)?,
                });
            }
            (None, Some(m)) => {
                let cdf = Moebius::from_rationals(
                    &parse_rational(&m.a)?,
                    &parse_rational(&m.b)?,
                    &parse_rational(&m.c)?,
                    &parse_rational(&m.d)?,
                )?;
                segments.push(SegmentSpec::MoebiusCdf { from, to, cdf });
            }
            _ => {
                return Err(Error::InvalidDistribution(
                    "segment needs exactly one of density or moebius".into(),
                ))
            }
        }
    }
    Distribution::assemble(atoms, segments)
}

pub fn serialize_distribution(d: &Distribution) -> String {
    let atoms = d
        .atoms()
        .into_iter()
        .map(|(t, m)| AtomJson {
            at: format_rational(&t),
            mass: format_rational(&m),
        })
        .collect();
    let mut segments = Vec::new();
    let n = d.nodes().len();
    for i in 0..=n {
        let piece = &d.pieces()[i];
        if piece.is_constant() {
            continue;
        }
        let (lo, hi) = d.piece_span(i);
        let (_, _, c, _) = piece.coeffs();
        if c.is_zero() {
            // Bounded linear piece: density form.
            let (from, to) = match (&lo, &hi) {
                (ExtReal::Finite(a), ExtReal::Finite(b)) => (a.clone(), b.clone()),
                _ => unreachable!("unbounded nonconstant pieces have poles"),
            };
            let density = piece
                .derivative_at(&from)
                .expect("linear piece has no pole");
            segments.push(SegmentJson {
                from: format_rational(&from),
                to: format_rational(&to),
                density: Some(format_rational(&density)),
                moebius: None,
            });
        } else {
            let (a, b, c, dd) = piece.coeffs();
            segments.push(SegmentJson {
                from: lo.to_string(),
                to: hi.to_string(),
                density: None,
                moebius: Some(MoebiusJson {
                    a: format_rational(&a),
                    b: format_rational(&b),
                    c: format_rational(&c),
                    d: format_rational(&dd),
                }),
            });
        }
    }
    serde_json::to_string_pretty(&DistributionJson { atoms, segments })
        .expect("distribution serializes")
}

#[derive(Serialize, Deserialize)]
struct MapPieceJson {
    from: String,
    to: String,
    a: String,
    b: String,
    c: String,
    d: String,
}

#[derive(Serialize, Deserialize)]
struct MapExplicitJson {
    orientation: String,
    pieces: Vec<MapPieceJson>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MapJson {
    RPole { r_pole: String },
    Explicit(MapExplicitJson),
}

pub fn parse_map(text: &str) -> Result<MonotoneMap> {
    let raw: MapJson = serde_json::from_str(text).map_err(json_err)?;
    match raw {
        MapJson::RPole { r_pole } => Ok(MonotoneMap::r_map(&ExtReal::parse(&r_pole)?)),
        MapJson::Explicit(exp) => {
            if exp.pieces.is_empty() {
                return Err(Error::InvalidMap("map needs at least one piece".into()));
            }
            let mut breakpoints = Vec::new();
            let mut pieces = Vec::new();
            let mut cursor = ExtReal::NegInf;
            for (i, p) in exp.pieces.iter().enumerate() {
                let from = ExtReal::parse(&p.from)?;
                let to = ExtReal::parse(&p.to)?;
                if from != cursor {
                    return Err(Error::InvalidMap(format!(
                        "piece {} starts at {} but the previous one ended at {}",
                        i, from, cursor
                    )));
                }
                if let ExtReal::Finite(t) = &to {
                    breakpoints.push(t.clone());
                } else if i + 1 != exp.pieces.len() {
                    return Err(Error::InvalidMap(
                        "only the last piece may extend to +inf".into(),
                    ));
                }
                pieces.push(Moebius::from_rationals(
                    &parse_rational(&p.a)?,
                    &parse_rational(&p.b)?,
                    &parse_rational(&p.c)?,
                    &parse_rational(&p.d)?,
                )?);
                cursor = to;
            }
            if cursor != ExtReal::PosInf {
                return Err(Error::InvalidMap("last piece must extend to +inf".into()));
            }
            let map = MonotoneMap::from_parts(breakpoints, pieces)?;
            let want = match exp.orientation.as_str() {
                "inc" | "increasing" => Orientation::Increasing,
                "dec" | "decreasing" => Orientation::Decreasing,
                other => {
                    return Err(Error::InvalidMap(format!(
                        "unknown orientation '{}'",
                        other
                    )))
                }
            };
            if map.orientation() != want {
                return Err(Error::InvalidMap(
                    "declared orientation contradicts the pieces".into(),
                ));
            }
            Ok(map)
        }
    }
}

pub fn serialize_map(map: &MonotoneMap) -> String {
    let mut pieces = Vec::new();
    let n = map.breakpoints().len();
    for i in 0..=n {
        let from = if i == 0 {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(map.breakpoints()[i - 1].clone())
        };
        let to = if i == n {
            ExtReal::PosInf
        } else {
            ExtReal::Finite(map.breakpoints()[i].clone())
        };
        let (a, b, c, d) = map.pieces()[i].coeffs();
        pieces.push(MapPieceJson {
            from: from.to_string(),
            to: to.to_string(),
            a: format_rational(&a),
            b: format_rational(&b),
            c: format_rational(&c),
            d: format_rational(&d),
        });
    }
    let orientation = match map.orientation() {
        Orientation::Increasing => "inc",
        Orientation::Decreasing => "dec",
    }
    .to_string();
    serde_json::to_string_pretty(&MapExplicitJson {
        orientation,
        pieces,
    })
    .expect("map serializes")
}

#[derive(Serialize, Deserialize)]
struct CircleAtomJson {
    angle: String,
    mass: String,
}

#[derive(Serialize, Deserialize)]
struct CircleSegmentJson {
    from_angle: String,
    to_angle: String,
    density: String,
}

#[derive(Serialize, Deserialize)]
struct CircleJson {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    atoms: Vec<CircleAtomJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    segments: Vec<CircleSegmentJson>,
}

fn parse_angle(s: &str) -> Result<f64> {
    let q = parse_rational(s)?;
    Ok(rat_to_f64(&q))
}

pub fn parse_circle(text: &str) -> Result<CircleDistribution> {
    let raw: CircleJson = serde_json::from_str(text).map_err(json_err)?;
    let mut atoms = Vec::with_capacity(raw.atoms.len());
    for a in &raw.atoms {
        atoms.push((parse_angle(&a.angle)?, parse_angle(&a.mass)?));
    }
    let mut cells = Vec::with_capacity(raw.segments.len());
    for s in &raw.segments {
        let from = parse_angle(&s.from_angle)?;
        let to = parse_angle(&s.to_angle)?;
        let density = parse_angle(&s.density)?;
        if density.is_negative() {
            return Err(Error::InvalidDistribution("negative density".into()));
        }
        cells.push((from, to, density * (to - from)));
    }
    CircleDistribution::from_items(&atoms, &cells)
}

pub fn serialize_circle(c: &CircleDistribution) -> String {
    let atoms = c
        .atoms()
        .into_iter()
        .map(|(th, m)| CircleAtomJson {
            angle: format!("{:?}", th),
            mass: format!("{:?}", m),
        })
        .collect();
    let mut segments = Vec::new();
    let nodes = c.nodes();
    for (i, nd) in nodes.iter().enumerate() {
        let (next_theta, next_val) = if i + 1 < nodes.len() {
            (nodes[i + 1].theta, nodes[i + 1].f_left)
        } else {
            (std::f64::consts::PI, 1.0)
        };
        let mass = next_val - nd.f_right;
        if mass > 0.0 && next_theta > nd.theta {
            segments.push(CircleSegmentJson {
                from_angle: format!("{:?}", nd.theta),
                to_angle: format!("{:?}", next_theta),
                density: format!("{:?}", mass / (next_theta - nd.theta)),
            });
        }
    }
    serde_json::to_string_pretty(&CircleJson { atoms, segments }).expect("circle serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    #[test]
    fn distribution_round_trip() {
        let m = Distribution::mix(&[
            (rat(1, 4), Distribution::dirac(rat(1, 2))),
            (rat(3, 4), Distribution::uniform(rat_int(0), rat_int(2)).unwrap()),
        ])
        .unwrap();
        let text = serialize_distribution(&m);
        let back = parse_distribution(&text).unwrap();
        assert_eq!(back, m);
        // Deterministic bytes.
        assert_eq!(serialize_distribution(&back), text);
    }

    #[test]
    fn moebius_tail_round_trip() {
        let text = r#"{"segments":[
            {"from":"0","to":"1","density":"1/2"},
            {"from":"1","to":"+inf","moebius":{"a":"1","b":"-1/2","c":"1","d":"0"}}
        ]}"#;
        let d = parse_distribution(text).unwrap();
        assert_eq!(d.cdf(&rat_int(1)), rat(1, 2));
        assert_eq!(d.cdf(&rat_int(2)), rat(3, 4));
        let back = parse_distribution(&serialize_distribution(&d)).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(matches!(
            parse_distribution("{not json"),
            Err(Error::Json(_))
        ));
        // Mass 1/2 only.
        let text = r#"{"segments":[{"from":"0","to":"1","density":"1/2"}]}"#;
        assert!(matches!(
            parse_distribution(text),
            Err(Error::InvalidDistribution(_))
        ));
        let json_err_text = parse_distribution("{\"atoms\": [}").unwrap_err();
        assert!(json_err_text.to_string().contains("column"));
    }

    #[test]
    fn map_round_trip_and_shorthand() {
        let g = MonotoneMap::pwl_map(
            &[(rat_int(0), rat_int(1)), (rat_int(2), rat_int(4))],
            &rat_int(1),
            &rat(5, 2),
        )
        .unwrap();
        let text = serialize_map(&g);
        let back = parse_map(&text).unwrap();
        assert_eq!(back, g);

        let r = parse_map(r#"{"r_pole":"0"}"#).unwrap();
        assert_eq!(r, MonotoneMap::r_map(&ExtReal::Finite(rat_int(0))));
        let id = parse_map(r#"{"r_pole":"inf"}"#).unwrap();
        assert_eq!(id, MonotoneMap::identity());
        let round = parse_map(&serialize_map(&r)).unwrap();
        assert_eq!(round, r);
    }

    #[test]
    fn map_validation_errors() {
        let gap = r#"{"orientation":"inc","pieces":[
            {"from":"-inf","to":"0","a":"1","b":"0","c":"0","d":"1"},
            {"from":"1","to":"+inf","a":"1","b":"0","c":"0","d":"1"}
        ]}"#;
        assert!(parse_map(gap).is_err());
        let wrong_orientation = r#"{"orientation":"dec","pieces":[
            {"from":"-inf","to":"+inf","a":"1","b":"0","c":"0","d":"1"}
        ]}"#;
        assert!(parse_map(wrong_orientation).is_err());
    }

    #[test]
    fn circle_round_trip() {
        let text = r#"{"atoms":[{"angle":"0","mass":"0.5"}],
                       "segments":[{"from_angle":"-1","to_angle":"1","density":"0.25"}]}"#;
        let c = parse_circle(text).unwrap();
        assert!((c.g_right(0.0) - 0.75).abs() < 1e-12);
        let back = parse_circle(&serialize_circle(&c)).unwrap();
        assert!(crate::circle::circle_kuiper(&c, &back) < 1e-12);
    }
}
