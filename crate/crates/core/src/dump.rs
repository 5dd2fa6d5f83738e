//! Plain-text dumps of polygons and meshes.
//!
//! Polygon blocks:
//!
//! ```text
//! # polygon <name>
//! # <key> <value>
//! x y
//! ...
//! ```
//!
//! separated by blank lines. Meshes use three counted sections:
//!
//! ```text
//! # mesh level <L>
//! nodes <count>
//! x y
//! elements <count>
//! i j k
//! boundary <count>
//! i j <dirichlet|neumann> <segment>
//! ```
//!
//! Coordinates are written in shortest round-trip form.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{Point, Polygon};
use crate::mesh::{BoundaryEdge, BoundaryTag, Mesh};

#[derive(Clone, Debug, PartialEq)]
pub struct PolygonBlock {
    pub name: String,
    pub header: Vec<(String, String)>,
    pub polygon: Polygon,
}

impl PolygonBlock {
    pub fn new(name: impl Into<String>, polygon: Polygon) -> Self {
        PolygonBlock {
            name: name.into(),
            header: Vec::new(),
            polygon,
        }
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.header.push((key.into(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.header
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

pub fn write_polygons(blocks: &[PolygonBlock]) -> String {
    let mut out = String::new();
    for (i, b) in blocks.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "# polygon {}", b.name);
        for (k, v) in &b.header {
            let _ = writeln!(out, "# {k} {v}");
        }
        for p in b.polygon.vertices() {
            let _ = writeln!(out, "{:?} {:?}", p.x, p.y);
        }
    }
    out
}

fn parse_f64(tok: Option<&str>, line: usize) -> Result<f64> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        msg: "missing number".into(),
    })?;
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("not a number: {tok:?}"),
    })
}

fn parse_usize(tok: Option<&str>, line: usize) -> Result<usize> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        msg: "missing integer".into(),
    })?;
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("not an index: {tok:?}"),
    })
}

/// Block under construction: name, header, vertices, first line.
type PartialBlock = (String, Vec<(String, String)>, Vec<Point>, usize);

pub fn read_polygons(text: &str) -> Result<Vec<PolygonBlock>> {
    let mut blocks = Vec::new();
    let mut current: Option<PartialBlock> = None;
    let finish = |cur: Option<PartialBlock>, blocks: &mut Vec<PolygonBlock>| -> Result<()> {
        if let Some((name, header, pts, line)) = cur {
            let polygon = Polygon::new(pts).map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
            blocks.push(PolygonBlock {
                name,
                header,
                polygon,
            });
        }
        Ok(())
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        if let Some(rest) = l.strip_prefix('#') {
            let rest = rest.trim();
            let (key, value) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
            if key == "polygon" {
                finish(current.take(), &mut blocks)?;
                current = Some((value.trim().to_string(), Vec::new(), Vec::new(), line));
            } else if let Some(cur) = current.as_mut() {
                cur.1.push((key.to_string(), value.trim().to_string()));
            }
            continue;
        }
        let cur = current.as_mut().ok_or(Error::Parse {
            line,
            msg: "vertex before any '# polygon' line".into(),
        })?;
        let mut it = l.split_whitespace();
        let x = parse_f64(it.next(), line)?;
        let y = parse_f64(it.next(), line)?;
        if it.next().is_some() {
            return Err(Error::Parse {
                line,
                msg: "expected two coordinates".into(),
            });
        }
        cur.2.push(Point::new(x, y));
    }
    finish(current, &mut blocks)?;
    Ok(blocks)
}

pub fn write_mesh(m: &Mesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# mesh level {}", m.level);
    let _ = writeln!(out, "nodes {}", m.nodes.len());
    for p in &m.nodes {
        let _ = writeln!(out, "{:?} {:?}", p.x, p.y);
    }
    let _ = writeln!(out, "elements {}", m.elements.len());
    for e in &m.elements {
        let _ = writeln!(out, "{} {} {}", e[0], e[1], e[2]);
    }
    let _ = writeln!(out, "boundary {}", m.boundary.len());
    for b in &m.boundary {
        let _ = writeln!(
            out,
            "{} {} {} {}",
            b.nodes[0],
            b.nodes[1],
            b.tag.name(),
            b.segment
        );
    }
    out
}

pub fn read_mesh(text: &str) -> Result<Mesh> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let mut cursor = lines.iter().copied();
    let mut next = || {
        cursor.next().ok_or(Error::Parse {
            line: text.lines().count(),
            msg: "unexpected end of mesh".into(),
        })
    };
    let mut level = 0;
    let (mut line, mut l) = next()?;
    if let Some(rest) = l.strip_prefix("# mesh level") {
        level = rest.trim().parse().map_err(|_| Error::Parse {
            line,
            msg: "bad level".into(),
        })?;
        (line, l) = next()?;
    }
    let section = |l: &str, line: usize, name: &str| -> Result<usize> {
        let mut it = l.split_whitespace();
        if it.next() != Some(name) {
            return Err(Error::Parse {
                line,
                msg: format!("expected section {name:?}"),
            });
        }
        parse_usize(it.next(), line)
    };
    let count = section(l, line, "nodes")?;
    let mut nodes = Vec::with_capacity(count);
    for _ in 0..count {
        let (line, l) = next()?;
        let mut it = l.split_whitespace();
        nodes.push(Point::new(
            parse_f64(it.next(), line)?,
            parse_f64(it.next(), line)?,
        ));
    }
    let (line, l) = next()?;
    let count = section(l, line, "elements")?;
    let mut elements = Vec::with_capacity(count);
    for _ in 0..count {
        let (line, l) = next()?;
        let mut it = l.split_whitespace();
        let mut e = [0; 3];
        for v in &mut e {
            *v = parse_usize(it.next(), line)?;
            if *v >= nodes.len() {
                return Err(Error::Parse {
                    line,
                    msg: format!("node index {v} out of range"),
                });
            }
        }
        elements.push(e);
    }
    let (line, l) = next()?;
    let count = section(l, line, "boundary")?;
    let mut boundary = Vec::with_capacity(count);
    for _ in 0..count {
        let (line, l) = next()?;
        let mut it = l.split_whitespace();
        let a = parse_usize(it.next(), line)?;
        let b = parse_usize(it.next(), line)?;
        if a.max(b) >= nodes.len() {
            return Err(Error::Parse {
                line,
                msg: format!("node index {} out of range", a.max(b)),
            });
        }
        let tag = match it.next() {
            Some("dirichlet") => BoundaryTag::Dirichlet,
            Some("neumann") => BoundaryTag::Neumann,
            other => {
                return Err(Error::Parse {
                    line,
                    msg: format!("unknown tag {other:?}"),
                })
            }
        };
        let segment = parse_usize(it.next(), line)?;
        boundary.push(BoundaryEdge {
            nodes: [a, b],
            tag,
            segment,
        });
    }
    let mesh = Mesh {
        nodes,
        elements,
        boundary,
        level,
    };
    mesh.check()?;
    Ok(mesh)
}
