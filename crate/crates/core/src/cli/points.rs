//! Point specifications on the command line.
//!
//! Cell corners are addressed as `F:0233,q:3`: a map word followed by a
//! corner label `1..=4`. Letters are single digits, or separated by dots
//! when the alphabet has more than ten letters (`F:0.11.3,q:2`, `F:11.,q:2`). Points on
//! the skeleton are written `arm:A,s:S,off:T`, optionally followed by
//! `,path:D@L+D@L` giving the legs inside the attached tree. Arms and leg
//! directions are labelled `1..=4` as well.

use std::fmt;
use std::str::FromStr;

use crate::green::{Leg, SkeletonPoint};

#[derive(Debug, Clone, PartialEq)]
pub struct Address {
    pub word: Vec<usize>,
    /// 0-based corner.
    pub corner: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointSpec {
    Address(Address),
    Skeleton(SkeletonPoint),
}

fn label(s: &str, what: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(k @ 1..=4) => Ok(k - 1),
        _ => Err(format!("{what} must be one of 1, 2, 3, 4, got `{s}`")),
    }
}

fn number(s: &str, what: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| format!("{what} must be a finite number, got `{s}`"))
}

fn fields(s: &str) -> Result<Vec<(&str, &str)>, String> {
    s.split(',')
        .map(|f| f.split_once(':').ok_or_else(|| format!("expected key:value, got `{f}`")))
        .collect()
}

impl FromStr for Address {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut word = None;
        let mut corner = None;
        for (k, v) in fields(s)? {
            match k.trim() {
                "F" => {
                    let v = v.trim();
                    let letters: Result<Vec<usize>, _> = if v.contains('.') {
                        v.split('.').filter(|l| !l.is_empty()).map(|l| l.parse().map_err(|_| ())).collect()
                    } else {
                        v.chars().map(|c| c.to_digit(10).map(|d| d as usize).ok_or(())).collect()
                    };
                    word = Some(letters.map_err(|_| format!("bad map word `{v}`"))?);
                }
                "q" => corner = Some(label(v, "corner")?),
                other => return Err(format!("unknown address field `{other}`")),
            }
        }
        Ok(Address {
            word: word.unwrap_or_default(),
            corner: corner.ok_or("an address needs a corner `q:K`")?,
        })
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dotted = self.word.iter().any(|&l| l > 9);
        let w: Vec<String> = self.word.iter().map(|l| l.to_string()).collect();
        // A lone multi-digit letter keeps a trailing dot so it is not read as
        // several single-digit letters.
        let tail = if dotted && w.len() == 1 { "." } else { "" };
        write!(f, "F:{}{tail},q:{}", w.join(if dotted { "." } else { "" }), self.corner + 1)
    }
}

fn parse_skeleton(s: &str) -> Result<SkeletonPoint, String> {
    let mut arm = None;
    let mut pos = None;
    let mut offset = 0.0;
    let mut path = None;
    for (k, v) in fields(s)? {
        match k.trim() {
            "arm" => arm = Some(label(v, "arm")?),
            "s" => pos = Some(number(v, "s")?),
            "off" => offset = number(v, "off")?,
            "path" => {
                let legs = v
                    .split('+')
                    .filter(|l| !l.trim().is_empty())
                    .map(|l| {
                        let (d, len) = l.split_once('@').ok_or_else(|| format!("bad leg `{l}`"))?;
                        Ok(Leg {
                            dir: label(d, "leg direction")?,
                            len: number(len, "leg length")?,
                        })
                    })
                    .collect::<Result<Vec<_>, String>>()?;
                path = Some(legs);
            }
            other => return Err(format!("unknown point field `{other}`")),
        }
    }
    let p = SkeletonPoint {
        arm: arm.ok_or("a skeleton point needs `arm:A`")?,
        s: pos.ok_or("a skeleton point needs `s:S`")?,
        offset,
        branch_path: path.or(if offset == 0.0 { Some(Vec::new()) } else { None }),
    };
    p.validate().map_err(|e| e.to_string())?;
    Ok(p)
}

impl FromStr for PointSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.trim_start().starts_with("arm") {
            parse_skeleton(s).map(PointSpec::Skeleton)
        } else {
            s.parse().map(PointSpec::Address)
        }
    }
}

impl fmt::Display for PointSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointSpec::Address(a) => a.fmt(f),
            PointSpec::Skeleton(p) => {
                write!(f, "arm:{},s:{},off:{}", p.arm + 1, p.s, p.offset)?;
                if let Some(legs) = p.branch_path.as_ref().filter(|l| !l.is_empty()) {
                    let l: Vec<String> = legs.iter().map(|l| format!("{}@{}", l.dir + 1, l.len)).collect();
                    write!(f, ",path:{}", l.join("+"))?;
                }
                Ok(())
            }
        }
    }
}
