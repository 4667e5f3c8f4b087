//! Line-oriented text format for every value kind, with an exact
//! parse/print round-trip and a field-for-field JSON mirror.
//!
//! Every document starts with the header
//! `breuil v1 p=<int> e=<int> E=[c0,...,ce] N=<int>`, followed by a kind
//! line (`selem`, `okelem`, `sinfelem`, `vector`, `sdiv`, `morphism`,
//! `torsion`) and the kind-specific body. Ring elements print as
//! `S{ i:coeff@prec, ... }` with ascending indices (`S{ @prec }` for zero);
//! matrices are row-major in brackets with `;` between rows; torsion
//! presentations use the named sections `[cover] [subcover] [iota] [n]
//! [witness]`.

use std::fmt::Write as _;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::matrix::SMat;
use crate::module::{SDivModule, SDivMorphism};
use crate::padic::{PadicConfig, PadicInt};
use crate::ring::{OKElem, SElem};
use crate::torsion::{ExtensionData, SInfElem, TorsionPresentation};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    SElem(SElem),
    OkElem(OKElem),
    SInf(SInfElem),
    Vector(Vec<SElem>),
    SDiv(SDivModule),
    Morphism(SDivMorphism),
    Torsion(TorsionPresentation),
    Ext(ExtensionData),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub cfg: Arc<PadicConfig>,
    pub body: Body,
}

impl Body {
    pub fn kind(&self) -> &'static str {
        match self {
            Body::SElem(_) => "selem",
            Body::OkElem(_) => "okelem",
            Body::SInf(_) => "sinfelem",
            Body::Vector(_) => "vector",
            Body::SDiv(_) => "sdiv",
            Body::Morphism(_) => "morphism",
            Body::Torsion(_) => "torsion",
            Body::Ext(_) => "ext",
        }
    }
}

// ---------------------------------------------------------------- printing

pub fn print(doc: &Document) -> String {
    let cfg = &doc.cfg;
    let mut out = String::new();
    let coeffs: Vec<String> = cfg.e_coeffs().iter().map(|c| c.to_string()).collect();
    writeln!(
        out,
        "breuil v1 p={} e={} E=[{}] N={}",
        cfg.p(),
        cfg.e(),
        coeffs.join(","),
        cfg.precision()
    )
    .unwrap();
    writeln!(out, "{}", doc.body.kind()).unwrap();
    match &doc.body {
        Body::SElem(s) => writeln!(out, "{}", print_selem(s)).unwrap(),
        Body::OkElem(o) => writeln!(out, "{}", print_okelem(o)).unwrap(),
        Body::SInf(s) => {
            writeln!(out, "denom {}", s.denom_exp()).unwrap();
            writeln!(out, "{}", print_selem(s.numer())).unwrap();
        }
        Body::Vector(v) => writeln!(out, "{}", print_row(v)).unwrap(),
        Body::SDiv(m) => print_sdiv(&mut out, m),
        Body::Morphism(f) => {
            writeln!(out, "[source]").unwrap();
            print_sdiv(&mut out, &f.source);
            writeln!(out, "[target]").unwrap();
            print_sdiv(&mut out, &f.target);
            writeln!(out, "[matrix]").unwrap();
            writeln!(out, "{}", print_mat(&f.mat)).unwrap();
        }
        Body::Torsion(t) => {
            writeln!(out, "[cover]").unwrap();
            print_sdiv(&mut out, t.cover());
            writeln!(out, "[subcover]").unwrap();
            print_sdiv(&mut out, t.sub());
            writeln!(out, "[iota]").unwrap();
            writeln!(out, "{}", print_mat(t.iota())).unwrap();
            writeln!(out, "[n]").unwrap();
            writeln!(out, "{}", t.kill_exp()).unwrap();
            writeln!(out, "[witness]").unwrap();
            writeln!(out, "{}", print_mat(t.witness())).unwrap();
        }
        Body::Ext(x) => {
            writeln!(out, "[lift]").unwrap();
            writeln!(out, "{}", print_mat(&x.t)).unwrap();
            writeln!(out, "[antecedent]").unwrap();
            writeln!(out, "{}", print_mat(&x.xhat)).unwrap();
        }
    }
    out
}

fn print_selem(s: &SElem) -> String {
    if s.is_zero() {
        return format!("S{{ @{} }}", s.prec());
    }
    let terms: Vec<String> = s
        .coeff_pairs()
        .map(|(i, v)| format!("{}:{}@{}", i, v, s.prec()))
        .collect();
    format!("S{{ {} }}", terms.join(", "))
}

fn print_okelem(o: &OKElem) -> String {
    let coeffs: Vec<String> = o.coeffs().iter().map(|c| c.to_string()).collect();
    format!("O[{}]@{}", coeffs.join(","), o.prec())
}

fn print_row(v: &[SElem]) -> String {
    let items: Vec<String> = v.iter().map(print_selem).collect();
    format!("[{}]", items.join(", "))
}

fn print_mat(m: &SMat) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| print_selem(m.at(i, j)))
                .collect::<Vec<_>>()
                .join(", ")
        })
        .collect();
    format!("[{}]", rows.join("; "))
}

fn print_sdiv(out: &mut String, m: &SDivModule) {
    let types: Vec<String> = m.types().iter().map(|t| t.to_string()).collect();
    writeln!(out, "types [{}]", types.join(",")).unwrap();
    writeln!(out, "matrix {}", print_mat(m.structure())).unwrap();
}

// ----------------------------------------------------------------- JSON

pub fn to_json(doc: &Document) -> Value {
    let cfg = &doc.cfg;
    let header = json!({
        "format": "breuil v1",
        "p": cfg.p(),
        "e": cfg.e(),
        "E": cfg.e_coeffs(),
        "N": cfg.precision(),
    });
    let body = match &doc.body {
        Body::SElem(s) => selem_json(s),
        Body::OkElem(o) => json!({ "coeffs": o.coeffs(), "prec": o.prec() }),
        Body::SInf(s) => json!({ "denom": s.denom_exp(), "numer": selem_json(s.numer()) }),
        Body::Vector(v) => Value::Array(v.iter().map(selem_json).collect()),
        Body::SDiv(m) => sdiv_json(m),
        Body::Morphism(f) => json!({
            "source": sdiv_json(&f.source),
            "target": sdiv_json(&f.target),
            "matrix": mat_json(&f.mat),
        }),
        Body::Torsion(t) => json!({
            "cover": sdiv_json(t.cover()),
            "subcover": sdiv_json(t.sub()),
            "iota": mat_json(t.iota()),
            "n": t.kill_exp(),
            "witness": mat_json(t.witness()),
        }),
        Body::Ext(x) => json!({
            "lift": mat_json(&x.t),
            "antecedent": mat_json(&x.xhat),
        }),
    };
    json!({ "header": header, "kind": doc.body.kind(), "body": body })
}

fn selem_json(s: &SElem) -> Value {
    json!({
        "prec": s.prec(),
        "terms": s.coeff_pairs().map(|(i, v)| json!([i, v])).collect::<Vec<_>>(),
    })
}

fn mat_json(m: &SMat) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| selem_json(m.at(i, j))).collect()))
            .collect(),
    )
}

fn sdiv_json(m: &SDivModule) -> Value {
    json!({ "types": m.types(), "matrix": mat_json(m.structure()) })
}

// ---------------------------------------------------------------- parsing

struct Cur<'a> {
    text: &'a str,
    line: usize,
    pos: usize,
}

impl<'a> Cur<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        Cur { text, line, pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { line: self.line, col: self.pos + 1, msg: msg.into() })
    }

    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        while self.rest().starts_with(' ') || self.rest().starts_with('\t') {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> Result<()> {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            Ok(())
        } else {
            self.err(format!("expected `{tok}`"))
        }
    }

    fn try_eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn int_i64(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.text.as_bytes();
        if self.pos < bytes.len() && (bytes[self.pos] == b'-' || bytes[self.pos] == b'+') {
            self.pos += 1;
        }
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.text[start..self.pos]
            .parse()
            .or_else(|_| self.err("expected an integer"))
    }

    fn int_u64(&mut self) -> Result<u64> {
        let v = self.int_i64()?;
        u64::try_from(v).or_else(|_| self.err("expected a nonnegative integer"))
    }

    fn end(&mut self) -> Result<()> {
        self.skip_ws();
        if self.rest().is_empty() {
            Ok(())
        } else {
            self.err("trailing input")
        }
    }
}

struct Lines<'a> {
    lines: Vec<(usize, &'a str)>,
    idx: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| !l.trim().is_empty())
            .collect();
        Lines { lines, idx: 0 }
    }

    fn next(&mut self) -> Result<Cur<'a>> {
        match self.lines.get(self.idx) {
            Some(&(no, text)) => {
                self.idx += 1;
                Ok(Cur::new(text, no))
            }
            None => Err(Error::Parse {
                line: self.lines.last().map_or(1, |&(no, _)| no + 1),
                col: 1,
                msg: "unexpected end of document".into(),
            }),
        }
    }

    fn done(&self) -> Result<()> {
        match self.lines.get(self.idx) {
            None => Ok(()),
            Some(&(no, _)) => Err(Error::Parse {
                line: no,
                col: 1,
                msg: "trailing content after document body".into(),
            }),
        }
    }
}

pub fn parse(text: &str) -> Result<Document> {
    let mut lines = Lines::new(text);
    let cfg = parse_header(&mut lines.next()?)?;
    let mut kind_cur = lines.next()?;
    kind_cur.skip_ws();
    let kind = kind_cur.rest().trim().to_string();
    let body = match kind.as_str() {
        "selem" => {
            let mut c = lines.next()?;
            let s = parse_selem(&mut c, &cfg)?;
            c.end()?;
            Body::SElem(s)
        }
        "okelem" => {
            let mut c = lines.next()?;
            let o = parse_okelem(&mut c, &cfg)?;
            c.end()?;
            Body::OkElem(o)
        }
        "sinfelem" => {
            let mut c = lines.next()?;
            c.eat("denom")?;
            let m = c.int_u64()? as u32;
            c.end()?;
            let mut c = lines.next()?;
            let numer = parse_selem(&mut c, &cfg)?;
            c.end()?;
            if numer.prec() != m {
                return Err(Error::Semantic(format!(
                    "sinfelem numerator precision {} must equal the denominator exponent {m}",
                    numer.prec()
                )));
            }
            Body::SInf(SInfElem::new(m, &numer))
        }
        "vector" => {
            let mut c = lines.next()?;
            let v = parse_row(&mut c, &cfg)?;
            c.end()?;
            Body::Vector(v)
        }
        "sdiv" => Body::SDiv(parse_sdiv(&mut lines, &cfg)?),
        "morphism" => {
            expect_section(&mut lines, "source")?;
            let source = parse_sdiv(&mut lines, &cfg)?;
            expect_section(&mut lines, "target")?;
            let target = parse_sdiv(&mut lines, &cfg)?;
            expect_section(&mut lines, "matrix")?;
            let mut c = lines.next()?;
            let mat = parse_mat(&mut c, &cfg)?;
            c.end()?;
            Body::Morphism(SDivMorphism { source, target, mat })
        }
        "torsion" => {
            expect_section(&mut lines, "cover")?;
            let cover = parse_sdiv(&mut lines, &cfg)?;
            expect_section(&mut lines, "subcover")?;
            let sub = parse_sdiv(&mut lines, &cfg)?;
            expect_section(&mut lines, "iota")?;
            let mut c = lines.next()?;
            let iota = parse_mat(&mut c, &cfg)?;
            c.end()?;
            expect_section(&mut lines, "n")?;
            let mut c = lines.next()?;
            let n = c.int_u64()? as u32;
            c.end()?;
            expect_section(&mut lines, "witness")?;
            let mut c = lines.next()?;
            let witness = parse_mat(&mut c, &cfg)?;
            c.end()?;
            Body::Torsion(TorsionPresentation::new_unchecked(cover, sub, iota, n, witness))
        }
        "ext" => {
            expect_section(&mut lines, "lift")?;
            let mut c = lines.next()?;
            let t = parse_mat(&mut c, &cfg)?;
            c.end()?;
            expect_section(&mut lines, "antecedent")?;
            let mut c = lines.next()?;
            let xhat = parse_mat(&mut c, &cfg)?;
            c.end()?;
            Body::Ext(ExtensionData { t, xhat })
        }
        other => {
            return Err(Error::Parse {
                line: kind_cur.line,
                col: 1,
                msg: format!("unknown document kind `{other}`"),
            })
        }
    };
    lines.done()?;
    Ok(Document { cfg, body })
}

fn parse_header(c: &mut Cur) -> Result<Arc<PadicConfig>> {
    c.eat("breuil")?;
    c.eat("v1")?;
    c.eat("p=")?;
    let p = c.int_u64()?;
    c.eat("e=")?;
    let e = c.int_u64()? as usize;
    c.eat("E=")?;
    c.eat("[")?;
    let mut coeffs = Vec::new();
    loop {
        coeffs.push(c.int_i64()?);
        if !c.try_eat(",") {
            break;
        }
    }
    c.eat("]")?;
    c.eat("N=")?;
    let n = c.int_u64()? as u32;
    c.end()?;
    if coeffs.len() != e + 1 {
        return Err(Error::Semantic(format!(
            "E has {} coefficients but e={e} requires {}",
            coeffs.len(),
            e + 1
        )));
    }
    PadicConfig::new(p, coeffs, n).map(Arc::new)
}

fn parse_selem(c: &mut Cur, cfg: &Arc<PadicConfig>) -> Result<SElem> {
    c.eat("S{")?;
    if c.try_eat("@") {
        let prec = c.int_u64()? as u32;
        c.eat("}")?;
        check_prec(c, cfg, prec)?;
        return Ok(SElem::zero(cfg, prec));
    }
    let mut pairs: Vec<(u32, u64, u32)> = Vec::new();
    loop {
        let i = c.int_u64()? as u32;
        c.eat(":")?;
        let v = c.int_u64()?;
        c.eat("@")?;
        let prec = c.int_u64()? as u32;
        pairs.push((i, v, prec));
        if !c.try_eat(",") {
            break;
        }
    }
    c.eat("}")?;
    let prec = pairs[0].2;
    check_prec(c, cfg, prec)?;
    let mut out = SElem::zero(cfg, prec);
    let mut last: Option<u32> = None;
    for &(i, v, pr) in &pairs {
        if pr != prec {
            return c.err("inconsistent precision tags in one element");
        }
        if let Some(l) = last {
            if i == l {
                return c.err(format!("duplicate basis index {i}"));
            }
            if i < l {
                return c.err("basis indices must be ascending");
            }
        }
        last = Some(i);
        if v >= crate::padic::pow_checked(cfg.p(), prec).map_err(|e| e)? as u64 {
            return c.err(format!("coefficient {v} out of range at precision {prec}"));
        }
        out = out.add(&SElem::single(cfg, i, PadicInt::new(cfg.p(), prec, v)));
    }
    Ok(out)
}

fn check_prec(c: &Cur, cfg: &Arc<PadicConfig>, prec: u32) -> Result<()> {
    if prec > cfg.precision() {
        return Err(Error::Semantic(format!(
            "precision {prec} exceeds the header bound N={}",
            cfg.precision()
        )));
    }
    let _ = c;
    Ok(())
}

fn parse_okelem(c: &mut Cur, cfg: &Arc<PadicConfig>) -> Result<OKElem> {
    c.eat("O[")?;
    let mut coeffs = Vec::new();
    loop {
        coeffs.push(c.int_u64()?);
        if !c.try_eat(",") {
            break;
        }
    }
    c.eat("]")?;
    c.eat("@")?;
    let prec = c.int_u64()? as u32;
    check_prec(c, cfg, prec)?;
    if coeffs.len() != cfg.e() as usize {
        return c.err(format!("expected {} coefficients", cfg.e()));
    }
    let m = crate::padic::pow_checked(cfg.p(), prec)?;
    if let Some(v) = coeffs.iter().find(|&&v| v >= m) {
        return c.err(format!("coefficient {v} out of range at precision {prec}"));
    }
    Ok(OKElem::from_coeffs(cfg, prec, coeffs))
}

fn parse_row(c: &mut Cur, cfg: &Arc<PadicConfig>) -> Result<Vec<SElem>> {
    c.eat("[")?;
    let mut out = Vec::new();
    loop {
        out.push(parse_selem(c, cfg)?);
        if !c.try_eat(",") {
            break;
        }
    }
    c.eat("]")?;
    Ok(out)
}

fn parse_mat(c: &mut Cur, cfg: &Arc<PadicConfig>) -> Result<SMat> {
    c.eat("[")?;
    let mut rows: Vec<Vec<SElem>> = Vec::new();
    loop {
        let mut row = Vec::new();
        loop {
            row.push(parse_selem(c, cfg)?);
            if !c.try_eat(",") {
                break;
            }
        }
        rows.push(row);
        if !c.try_eat(";") {
            break;
        }
    }
    c.eat("]")?;
    let line = c.line;
    SMat::from_rows(cfg, rows).map_err(|_| Error::Parse {
        line,
        col: 1,
        msg: "ragged matrix rows".into(),
    })
}

fn expect_section(lines: &mut Lines, name: &str) -> Result<()> {
    let mut c = lines.next()?;
    c.eat(&format!("[{name}]"))?;
    c.end()
}

fn parse_sdiv(lines: &mut Lines, cfg: &Arc<PadicConfig>) -> Result<SDivModule> {
    let mut c = lines.next()?;
    c.eat("types")?;
    c.eat("[")?;
    let mut types = Vec::new();
    loop {
        types.push(c.int_u64()? as u8);
        if !c.try_eat(",") {
            break;
        }
    }
    c.eat("]")?;
    c.end()?;
    let mut c = lines.next()?;
    c.eat("matrix")?;
    let mat = parse_mat(&mut c, cfg)?;
    c.end()?;
    Ok(SDivModule::new_unchecked(cfg, types, mat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::tests_support::{all_cfgs, rand_selem, Lcg};
    use crate::torsion::SInfElem;

    fn rand_unit_matrix(cfg: &Arc<PadicConfig>, n: usize, prec: u32, rng: &mut Lcg) -> SMat {
        let mut l = SMat::identity(cfg, n, prec);
        let mut u = SMat::identity(cfg, n, prec);
        for i in 0..n {
            for j in 0..n {
                if i > j {
                    l.set(i, j, rand_selem(cfg, prec, rng));
                } else if i < j {
                    u.set(i, j, rand_selem(cfg, prec, rng));
                }
            }
        }
        l.mul(&u).unwrap()
    }

    fn rand_doc(cfg: &Arc<PadicConfig>, kind: usize, rng: &mut Lcg) -> Document {
        let n = cfg.precision();
        let body = match kind {
            0 => Body::SElem(rand_selem(cfg, 1 + (rng.next() % n as u64) as u32, rng)),
            1 => Body::OkElem(rand_selem(cfg, n, rng).project_ok().unwrap()),
            2 => Body::SInf(SInfElem::new(
                (rng.next() % (n as u64 + 1)) as u32,
                &rand_selem(cfg, n, rng),
            )),
            3 => Body::Vector((0..3).map(|_| rand_selem(cfg, n, rng)).collect()),
            4 => {
                let d = 1 + (rng.next() % 3) as usize;
                let types = (0..d).map(|_| (rng.next() % 2) as u8).collect();
                Body::SDiv(
                    SDivModule::new(cfg, types, rand_unit_matrix(cfg, d, n, rng)).unwrap(),
                )
            }
            5 => {
                let d = 1 + (rng.next() % 2) as usize;
                let types: Vec<u8> = (0..d).map(|_| (rng.next() % 2) as u8).collect();
                let m = SDivModule::new(cfg, types, rand_unit_matrix(cfg, d, n, rng)).unwrap();
                Body::Morphism(SDivMorphism::identity(&m))
            }
            _ => {
                let d = 1 + (rng.next() % 2) as usize;
                let types: Vec<u8> = (0..d).map(|_| (rng.next() % 2) as u8).collect();
                let m = SDivModule::new(cfg, types, rand_unit_matrix(cfg, d, n, rng)).unwrap();
                let iota = SMat::identity(cfg, d, n).mul_p_pow(1);
                let w = SMat::identity(cfg, d, n);
                Body::Torsion(TorsionPresentation::make(m.clone(), m, iota, 1, w).unwrap())
            }
        };
        Document { cfg: cfg.clone(), body }
    }

    #[test]
    fn round_trip_random_documents() {
        let mut rng = Lcg(2024);
        for cfg in all_cfgs() {
            for kind in 0..7 {
                for _ in 0..100 {
                    let doc = rand_doc(&cfg, kind, &mut rng);
                    let text = print(&doc);
                    let back = parse(&text).unwrap();
                    assert_eq!(back, doc, "kind {kind}:\n{text}");
                    // printing is canonical
                    assert_eq!(print(&back), text);
                }
            }
        }
    }

    #[test]
    fn header_examples() {
        let doc = parse("breuil v1 p=3 e=2 E=[-3,0,1] N=4\nselem\nS{ @4 }\n").unwrap();
        assert_eq!(doc.cfg.p(), 3);
        assert_eq!(doc.cfg.e(), 2);
        // non-Eisenstein E is a semantic error
        let bad = parse("breuil v1 p=2 e=1 E=[4,1] N=3\nselem\nS{ @3 }\n");
        assert!(matches!(bad, Err(Error::Semantic(_))));
    }

    #[test]
    fn parse_errors_carry_position() {
        let bad = parse("breuil v1 p=2 e=1 E=[-2,1] N=3\nselem\nS{ 0:1@3, 0:2@3 }\n");
        match bad {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected a parse error, got {other:?}"),
        }
        let bad = parse("breuil v2 p=2 e=1 E=[-2,1] N=3\nselem\nS{ @3 }\n");
        assert!(matches!(bad, Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn json_mirror_has_all_fields() {
        let mut rng = Lcg(5);
        let cfg = all_cfgs().remove(0);
        let doc = rand_doc(&cfg, 6, &mut rng);
        let v = to_json(&doc);
        assert_eq!(v["kind"], "torsion");
        assert_eq!(v["header"]["p"], 2);
        assert!(v["body"]["iota"].is_array());
        assert!(v["body"]["n"].is_number());
    }
}
