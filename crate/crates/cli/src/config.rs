//! Configuration files: one declaration per line.
//!
//! ```text
//! # comment
//! point A = (0, 0)
//! point B = (sqrt(2), 1/2)
//! circle c = center (0,0) r2 1
//! circle d = center A through B
//! line l = through (0,0) (1,0)
//! line m = 1 -1 0
//! target point M = (1, 0)
//! ```
//!
//! Points inside circle and line declarations may be literals or names of
//! points declared earlier.

use std::fmt;

use euclid_core::field::Session;
use euclid_core::geom::{self, Circle, GeomObject, Line, Point};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Debug)]
pub struct Config {
    pub objects: Vec<(String, GeomObject)>,
    pub target: Option<(String, GeomObject)>,
}

impl Config {
    pub fn get(&self, name: &str) -> Option<&GeomObject> {
        self.objects
            .iter()
            .chain(self.target.iter())
            .find(|(n, _)| n == name)
            .map(|(_, o)| o)
    }

    /// The start configuration: every declared object except the target.
    pub fn start(&self) -> Vec<GeomObject> {
        self.objects.iter().map(|(_, o)| o.clone()).collect()
    }

    pub fn target_named(&self, name: &str) -> Option<&GeomObject> {
        match &self.target {
            Some((n, o)) if n == name => Some(o),
            _ => self.objects.iter().find(|(n, _)| n == name).map(|(_, o)| o),
        }
    }
}

pub fn parse_config(session: &Session, text: &str) -> Result<Config, ConfigError> {
    let mut cfg = Config {
        objects: vec![],
        target: None,
    };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| ConfigError { line: i + 1, message };
        let (is_target, rest) = match line.strip_prefix("target ") {
            Some(r) => (true, r.trim()),
            None => (false, line),
        };
        let (head, body) = rest
            .split_once('=')
            .ok_or_else(|| err("expected `<kind> <name> = ...`".into()))?;
        let mut words = head.split_whitespace();
        let (Some(kind), Some(name), None) = (words.next(), words.next(), words.next()) else {
            return Err(err("expected `<kind> <name> = ...`".into()));
        };
        if !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(err(format!("bad name `{name}`")));
        }
        if cfg.get(name).is_some() {
            return Err(err(format!("`{name}` declared twice")));
        }
        let obj = parse_object(session, &cfg, kind, body.trim()).map_err(err)?;
        if is_target {
            if cfg.target.is_some() {
                return Err(err("only one target may be declared".into()));
            }
            cfg.target = Some((name.to_string(), obj));
        } else {
            cfg.objects.push((name.to_string(), obj));
        }
    }
    Ok(cfg)
}

fn parse_object(session: &Session, cfg: &Config, kind: &str, body: &str) -> Result<GeomObject, String> {
    let mut toks = Tokens { rest: body };
    let obj: GeomObject = match kind {
        "point" => toks.point(session, cfg)?.into(),
        "circle" => {
            toks.keyword("center")?;
            let center = toks.point(session, cfg)?;
            let c = match toks.word() {
                Some("r2") => Circle::new(center, parse_real(session, toks.word().ok_or("missing r2 value")?)?),
                Some("through") => {
                    let p = toks.point(session, cfg)?;
                    geom::circle_centered(&center, &center, &p)
                }
                _ => return Err("expected `r2 <value>` or `through <point>`".into()),
            };
            c.map_err(|e| e.to_string())?.into()
        }
        "line" => {
            let l = if toks.rest.trim_start().starts_with("through") {
                toks.keyword("through")?;
                let p = toks.point(session, cfg)?;
                let q = toks.point(session, cfg)?;
                geom::line_through(&p, &q)
            } else {
                let mut c = vec![];
                while let Some(w) = toks.word() {
                    c.push(parse_real(session, w)?);
                }
                let [a, b, c] = <[_; 3]>::try_from(c).map_err(|_| "expected three coefficients `a b c`")?;
                Line::new(a, b, c)
            };
            l.map_err(|e| e.to_string())?.into()
        }
        other => return Err(format!("unknown kind `{other}`")),
    };
    if !toks.rest.trim().is_empty() {
        return Err(format!("unexpected `{}`", toks.rest.trim()));
    }
    Ok(obj)
}

fn parse_real(session: &Session, text: &str) -> Result<euclid_core::field::Real, String> {
    session.parse(text.trim()).map_err(|e| format!("bad number `{}`: {e}", text.trim()))
}

struct Tokens<'a> {
    rest: &'a str,
}

impl<'a> Tokens<'a> {
    /// Next whitespace-separated word; parentheses keep a word together.
    fn word(&mut self) -> Option<&'a str> {
        let s = self.rest.trim_start();
        if s.is_empty() {
            return None;
        }
        let mut depth = 0i32;
        let mut end = s.len();
        for (i, ch) in s.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                c if c.is_whitespace() && depth == 0 => {
                    end = i;
                    break;
                }
                _ => {}
            }
        }
        self.rest = &s[end..];
        Some(&s[..end])
    }

    fn keyword(&mut self, kw: &str) -> Result<(), String> {
        match self.word() {
            Some(w) if w == kw => Ok(()),
            Some(w) => Err(format!("expected `{kw}`, found `{w}`")),
            None => Err(format!("expected `{kw}`")),
        }
    }

    /// `(x, y)` or the name of a declared point.
    fn point(&mut self, session: &Session, cfg: &Config) -> Result<Point, String> {
        let s = self.rest.trim_start();
        if !s.starts_with('(') {
            let name = self.word().ok_or("expected a point")?;
            return match cfg.get(name) {
                Some(GeomObject::Point(p)) => Ok(p.clone()),
                Some(_) => Err(format!("`{name}` is not a point")),
                None => Err(format!("unknown point `{name}`")),
            };
        }
        let mut depth = 0;
        let mut comma = None;
        let mut close = None;
        for (i, ch) in s.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        close = Some(i);
                        break;
                    }
                }
                ',' if depth == 1 && comma.is_none() => comma = Some(i),
                _ => {}
            }
        }
        let (Some(comma), Some(close)) = (comma, close) else {
            return Err(format!("bad point `{s}`"));
        };
        let x = parse_real(session, &s[1..comma])?;
        let y = parse_real(session, &s[comma + 1..close])?;
        self.rest = &s[close + 1..];
        Ok(Point::new(x, y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_form() {
        let s = Session::new();
        let text = "# two points\npoint A = (0, 0)\npoint B = (sqrt(2), 1/2)\n\
                    circle c = center (0,0) r2 1\ncircle d = center A through B\n\
                    line l = through (0,0) (1,0)\nline m = 1 -1 0\ntarget point M = (1, 0)\n";
        let cfg = parse_config(&s, text).unwrap();
        assert_eq!(cfg.objects.len(), 6);
        assert_eq!(cfg.target.as_ref().unwrap().0, "M");
        let d = cfg.get("d").unwrap().as_circle().unwrap();
        assert_eq!(d.r2(), &s.parse("9/4").unwrap());
        let l = cfg.get("l").unwrap().as_line().unwrap();
        assert!(l.a().is_zero());
        assert_eq!(cfg.start().len(), 6);
    }

    #[test]
    fn reports_the_bad_line() {
        let s = Session::new();
        let e = parse_config(&s, "point A = (0, 0)\npoint A = (1, 1)\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_config(&s, "point A = (0, 0)\n\ncircle c = center Q r2 1\n").unwrap_err();
        assert_eq!(e.to_string(), "line 3: unknown point `Q`");
        assert!(parse_config(&s, "circle c = center (0,0) r2 0").is_err());
        assert!(parse_config(&s, "line l = 0 0 1").is_err());
        assert!(parse_config(&s, "point P = (1, 2) extra").is_err());
    }
}
