//! Line formats for the reduction sources. Indices are 1-based.
//!
//! ```text
//! DST v1
//! <vertices> <edges>
//! root <r>
//! terminals <t1> <t2> ...
//! <from> <to> <cost>          (one line per edge)
//!
//! SETCOVER v1
//! <sets> <elements>
//! <members of set 1>          (one line per set, may be empty)
//!
//! 3DM v1
//! <n> <triples>
//! <x> <y> <z>                 (one line per triple)
//! ```

use super::{DiEdge, DstInstance, SetCoverInstance, ThreeDmInstance};
use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational};

pub const DST_HEADER: &str = "DST v1";
pub const SETCOVER_HEADER: &str = "SETCOVER v1";
pub const THREEDM_HEADER: &str = "3DM v1";

struct Reader<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str, header: &str) -> Result<Self> {
        let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).collect();
        match lines.first() {
            Some((_, h)) if *h == header => {}
            _ => return Err(Error::parse(1, format!("expected '{header}'"))),
        }
        Ok(Reader { lines, pos: 1 })
    }

    fn next(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        let (ln, line) = *self
            .lines
            .get(self.pos)
            .ok_or_else(|| Error::parse(self.pos + 1, format!("missing {what}")))?;
        self.pos += 1;
        Ok((ln, line.split_whitespace().collect()))
    }

    fn finish(&self) -> Result<()> {
        match self.lines[self.pos..].iter().find(|(_, l)| !l.is_empty()) {
            Some(&(ln, _)) => Err(Error::parse(ln, "unexpected trailing content")),
            None => Ok(()),
        }
    }
}

fn index(ln: usize, field: &str, limit: usize) -> Result<usize> {
    field
        .parse::<usize>()
        .ok()
        .filter(|&v| v >= 1 && v <= limit)
        .map(|v| v - 1)
        .ok_or_else(|| Error::parse(ln, format!("bad index '{field}'")))
}

fn count(ln: usize, field: &str) -> Result<usize> {
    field
        .parse()
        .map_err(|_| Error::parse(ln, format!("bad count '{field}'")))
}

fn pair(ln: usize, fields: &[&str]) -> Result<(usize, usize)> {
    match fields {
        [a, b] => Ok((count(ln, a)?, count(ln, b)?)),
        _ => Err(Error::parse(ln, "malformed line: expected two counts")),
    }
}

pub fn parse_dst(text: &str) -> Result<DstInstance> {
    let mut r = Reader::new(text, DST_HEADER)?;
    let (ln, f) = r.next("dimensions")?;
    let (vertex_count, edge_count) = pair(ln, &f)?;
    let (ln, f) = r.next("root")?;
    let root = match f.as_slice() {
        ["root", v] => index(ln, v, vertex_count)?,
        _ => return Err(Error::parse(ln, "expected 'root <r>'")),
    };
    let (ln, f) = r.next("terminals")?;
    let terminals = match f.split_first() {
        Some((&"terminals", rest)) => rest
            .iter()
            .map(|t| index(ln, t, vertex_count))
            .collect::<Result<Vec<_>>>()?,
        _ => return Err(Error::parse(ln, "expected 'terminals ...'")),
    };
    let mut edges = Vec::with_capacity(edge_count);
    for _ in 0..edge_count {
        let (ln, f) = r.next("edge")?;
        let [from, to, cost] = f.as_slice() else {
            return Err(Error::parse(ln, "malformed edge line"));
        };
        let cost = parse_rational(cost).ok_or_else(|| Error::parse(ln, "malformed cost"))?;
        edges.push(DiEdge::new(index(ln, from, vertex_count)?, index(ln, to, vertex_count)?, cost));
    }
    r.finish()?;
    let dst = DstInstance {
        vertex_count,
        edges,
        root,
        terminals,
    };
    dst.validate()?;
    Ok(dst)
}

pub fn serialize_dst(dst: &DstInstance) -> String {
    let mut out = format!("{DST_HEADER}\n{} {}\nroot {}\nterminals", dst.vertex_count, dst.edges.len(), dst.root + 1);
    for t in &dst.terminals {
        out.push_str(&format!(" {}", t + 1));
    }
    out.push('\n');
    for e in &dst.edges {
        out.push_str(&format!("{} {} {}\n", e.from + 1, e.to + 1, format_rational(&e.cost)));
    }
    out
}

pub fn parse_setcover(text: &str) -> Result<SetCoverInstance> {
    let mut r = Reader::new(text, SETCOVER_HEADER)?;
    let (ln, f) = r.next("dimensions")?;
    let (sets, elements) = pair(ln, &f)?;
    let mut membership = Vec::new();
    for v in 0..sets {
        let (ln, f) = r.next("set")?;
        for u in f {
            membership.push((v, index(ln, u, elements)?));
        }
    }
    r.finish()?;
    let sc = SetCoverInstance {
        sets,
        elements,
        membership,
    };
    sc.validate()?;
    Ok(sc)
}

pub fn serialize_setcover(sc: &SetCoverInstance) -> String {
    let mut out = format!("{SETCOVER_HEADER}\n{} {}\n", sc.sets, sc.elements);
    for v in 0..sc.sets {
        let members: Vec<String> = sc.members(v).map(|u| (u + 1).to_string()).collect();
        out.push_str(&members.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_threedm(text: &str) -> Result<ThreeDmInstance> {
    let mut r = Reader::new(text, THREEDM_HEADER)?;
    let (ln, f) = r.next("dimensions")?;
    let (size, count) = pair(ln, &f)?;
    let mut triples = Vec::with_capacity(count);
    for _ in 0..count {
        let (ln, f) = r.next("triple")?;
        let [x, y, z] = f.as_slice() else {
            return Err(Error::parse(ln, "malformed triple"));
        };
        triples.push([index(ln, x, size)?, index(ln, y, size)?, index(ln, z, size)?]);
    }
    r.finish()?;
    let tdm = ThreeDmInstance { size, triples };
    tdm.validate()?;
    Ok(tdm)
}

pub fn serialize_threedm(tdm: &ThreeDmInstance) -> String {
    let mut out = format!("{THREEDM_HEADER}\n{} {}\n", tdm.size, tdm.triples.len());
    for t in &tdm.triples {
        out.push_str(&format!("{} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn dst_round_trip() {
        let dst = DstInstance {
            vertex_count: 4,
            edges: vec![DiEdge::new(0, 1, int(1)), DiEdge::new(1, 2, ratio(1, 2)), DiEdge::new(1, 3, int(1))],
            root: 0,
            terminals: vec![2, 3],
        };
        let text = serialize_dst(&dst);
        assert!(text.starts_with("DST v1\n4 3\nroot 1\nterminals 3 4\n"));
        assert_eq!(parse_dst(&text).unwrap(), dst);
    }

    #[test]
    fn setcover_round_trip() {
        let sc = SetCoverInstance {
            sets: 3,
            elements: 2,
            membership: vec![(0, 0), (0, 1), (2, 1)],
        };
        let text = serialize_setcover(&sc);
        assert_eq!(text, "SETCOVER v1\n3 2\n1 2\n\n2\n");
        assert_eq!(parse_setcover(&text).unwrap(), sc);
    }

    #[test]
    fn threedm_round_trip() {
        let tdm = ThreeDmInstance {
            size: 2,
            triples: vec![[0, 0, 0], [1, 1, 1]],
        };
        assert_eq!(parse_threedm(&serialize_threedm(&tdm)).unwrap(), tdm);
        assert!(parse_threedm("3DM v1\n2 1\n1 3 1\n").is_err());
    }
}
