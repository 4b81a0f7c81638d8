//! Line-oriented topos and functor description files.
//!
//! ```text
//! # comment
//! [index]
//! stages: 0 1
//! 0 -> 1 : u
//! g.f = h
//!
//! [object A]
//! 0: a b
//! 1: c
//! u: c -> a
//!
//! [morphism f : A -> B]
//! 0: a -> p, b -> q
//!
//! [subobject S of A]
//! 0: a
//!
//! [functor]
//! slice: A
//! object A -> A2
//! morphism f -> f2
//! ```
//!
//! Restriction rows `u: x -> y` state `X(u)(x) = y` for `x` at the codomain
//! stage of `u`; rows for composites and into one-element stages may be
//! omitted. Without an `[index]` section the site is the one-stage
//! category of finite sets, whose stage is named `*`.

use std::collections::BTreeMap;

use crate::error::ParseError;
use crate::functor::{SliceFunctor, TableFunctor, ToposFunctor};
use crate::index::IndexCategory;
use crate::logic::{Env, TypeExpr};
use crate::object::{Morphism, Object};
use crate::subobject::Subobject;
use crate::topos::Topos;

type PResult<T> = std::result::Result<T, ParseError>;

/// How a functor file defines its functor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctorSpec {
    /// `A ↦ A × X → X` for the named source object.
    Slice(String),
    /// Explicit `(source name, target name)` rows.
    Table {
        objects: Vec<(String, String)>,
        morphisms: Vec<(String, String)>,
    },
}

/// A parsed description file.
#[derive(Debug, Clone)]
pub struct ToposFile {
    pub topos: Topos,
    pub objects: BTreeMap<String, Object>,
    pub morphisms: BTreeMap<String, Morphism>,
    pub subobjects: BTreeMap<String, (String, Subobject)>,
    pub functor: Option<FunctorSpec>,
}

impl ToposFile {
    /// An environment for formulas naming the file's objects, morphisms and subobjects.
    pub fn env(&self) -> Env {
        let mut env = Env::new(&self.topos);
        for (name, obj) in &self.objects {
            env.add_object(name, obj);
        }
        for (name, m) in &self.morphisms {
            env.add_morphism(name, m);
        }
        for (name, (carrier, s)) in &self.subobjects {
            env.add_subobject(name, TypeExpr::Named(carrier.clone()), s)
                .expect("carrier registered above");
        }
        env
    }

    /// The functor described by `self` with source `source`.
    pub fn functor_from(&self, source: &ToposFile) -> PResult<Box<dyn ToposFunctor>> {
        let spec = self
            .functor
            .as_ref()
            .ok_or_else(|| ParseError::new(0, "no [functor] section"))?;
        match spec {
            FunctorSpec::Slice(x) => {
                let obj = source
                    .objects
                    .get(x)
                    .ok_or_else(|| ParseError::new(0, format!("unknown source object {x}")))?;
                let f = SliceFunctor::new(&source.topos, obj).map_err(|e| ParseError::new(0, e.to_string()))?;
                Ok(Box::new(f))
            }
            FunctorSpec::Table { objects, morphisms } => {
                let mut f = TableFunctor::new("table", &source.topos, &self.topos);
                for (a, b) in objects {
                    let (Some(x), Some(y)) = (source.objects.get(a), self.objects.get(b)) else {
                        return Err(ParseError::new(0, format!("unknown object in row {a} -> {b}")));
                    };
                    f.map_object_to(x.clone(), y.clone());
                }
                for (a, b) in morphisms {
                    let (Some(x), Some(y)) = (source.morphisms.get(a), self.morphisms.get(b)) else {
                        return Err(ParseError::new(0, format!("unknown morphism in row {a} -> {b}")));
                    };
                    f.map_morphism_to(x.clone(), y.clone());
                }
                Ok(Box::new(f))
            }
        }
    }
}

#[derive(Debug)]
enum Header {
    Index,
    Object(String),
    Morphism { name: String, dom: String, cod: String },
    Subobject { name: String, carrier: String },
    Functor,
}

struct Section {
    line: usize,
    header: Header,
    rows: Vec<(usize, String)>,
}

fn split_sections(src: &str) -> PResult<Vec<Section>> {
    let mut out: Vec<Section> = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        if let Some(inner) = text.strip_prefix('[') {
            let inner = inner
                .strip_suffix(']')
                .ok_or_else(|| ParseError::new(line, "unterminated section header"))?;
            out.push(Section {
                line,
                header: parse_header(line, inner.trim())?,
                rows: Vec::new(),
            });
        } else {
            let sec = out
                .last_mut()
                .ok_or_else(|| ParseError::new(line, "row outside any section"))?;
            sec.rows.push((line, text.to_string()));
        }
    }
    Ok(out)
}

fn parse_header(line: usize, inner: &str) -> PResult<Header> {
    let words: Vec<&str> = inner.split_whitespace().collect();
    match words.as_slice() {
        ["index"] => Ok(Header::Index),
        ["functor"] => Ok(Header::Functor),
        ["object", name] => Ok(Header::Object(name.to_string())),
        ["subobject", name, "of", carrier] => Ok(Header::Subobject {
            name: name.to_string(),
            carrier: carrier.to_string(),
        }),
        ["morphism", rest @ ..] => {
            let joined = rest.join(" ");
            let (name, ty) = joined
                .split_once(':')
                .ok_or_else(|| ParseError::new(line, "expected [morphism NAME : A -> B]"))?;
            let (dom, cod) = ty
                .split_once("->")
                .ok_or_else(|| ParseError::new(line, "expected [morphism NAME : A -> B]"))?;
            let ident = |s: &str| {
                let s = s.trim();
                if s.is_empty() || s.contains(char::is_whitespace) {
                    Err(ParseError::new(line, format!("bad name {s:?}")))
                } else {
                    Ok(s.to_string())
                }
            };
            Ok(Header::Morphism {
                name: ident(name)?,
                dom: ident(dom)?,
                cod: ident(cod)?,
            })
        }
        _ => Err(ParseError::new(line, format!("unknown section [{inner}]"))),
    }
}

fn key_value(line: usize, row: &str) -> PResult<(String, String)> {
    let (k, v) = row
        .split_once(':')
        .ok_or_else(|| ParseError::new(line, "expected `key: value`"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn arrow_pair(line: usize, s: &str) -> PResult<(String, String)> {
    let (a, b) = s
        .split_once("->")
        .ok_or_else(|| ParseError::new(line, format!("expected `x -> y`, found {s:?}")))?;
    let (a, b) = (a.trim(), b.trim());
    if a.is_empty() || b.is_empty() {
        return Err(ParseError::new(line, format!("expected `x -> y`, found {s:?}")));
    }
    Ok((a.to_string(), b.to_string()))
}

fn parse_index(sec: &Section) -> PResult<IndexCategory> {
    let mut stages: Vec<String> = Vec::new();
    let mut arrows: Vec<(usize, usize, String)> = Vec::new();
    let mut rows: Vec<(usize, usize, usize)> = Vec::new();
    let stage_of = |stages: &[String], line: usize, s: &str| {
        stages
            .iter()
            .position(|x| x == s)
            .ok_or_else(|| ParseError::new(line, format!("unknown stage {s}")))
    };
    for (line, row) in &sec.rows {
        let line = *line;
        if let Some(rest) = row.strip_prefix("stages:") {
            stages.extend(rest.split_whitespace().map(str::to_string));
        } else if let Some((eq_lhs, h)) = row.split_once('=') {
            let (g, f) = eq_lhs
                .trim()
                .split_once('.')
                .ok_or_else(|| ParseError::new(line, "expected `g.f = h`"))?;
            let find = |n: &str| {
                arrows
                    .iter()
                    .position(|a| a.2 == n.trim())
                    .ok_or_else(|| ParseError::new(line, format!("unknown arrow {}", n.trim())))
            };
            rows.push((find(g)?, find(f)?, find(h)?));
        } else {
            let (ends, name) = row
                .split_once(':')
                .ok_or_else(|| ParseError::new(line, "expected `src -> dst : name`"))?;
            let (s, d) = arrow_pair(line, ends)?;
            let name = name.trim();
            if name.is_empty() || arrows.iter().any(|a| a.2 == name) {
                return Err(ParseError::new(line, format!("bad or duplicate arrow name {name:?}")));
            }
            arrows.push((
                stage_of(&stages, line, &s)?,
                stage_of(&stages, line, &d)?,
                name.to_string(),
            ));
        }
    }
    IndexCategory::new(stages, arrows, rows).map_err(|e| ParseError::new(sec.line, e.to_string()))
}

fn parse_object(t: &Topos, sec: &Section) -> PResult<Object> {
    let cat = t.index();
    let mut labels: Vec<Option<Vec<String>>> = vec![None; cat.num_stages()];
    let mut rest_rows: Vec<(usize, usize, String, String)> = Vec::new();
    for (line, row) in &sec.rows {
        let (k, v) = key_value(*line, row)?;
        if let Some(c) = cat.stage_index(&k) {
            if labels[c].is_some() {
                return Err(ParseError::new(*line, format!("stage {k} listed twice")));
            }
            let elems: Vec<String> = v.split_whitespace().map(str::to_string).collect();
            let mut sorted = elems.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != elems.len() {
                return Err(ParseError::new(*line, "duplicate element label"));
            }
            labels[c] = Some(elems);
        } else if let Some(a) = cat.arrow_index(&k) {
            for pair in v.split(',') {
                let (x, y) = arrow_pair(*line, pair)?;
                rest_rows.push((*line, a, x, y));
            }
        } else {
            return Err(ParseError::new(*line, format!("{k} is neither a stage nor an arrow")));
        }
    }
    let labels: Vec<Vec<String>> = labels.into_iter().map(Option::unwrap_or_default).collect();
    let sizes: Vec<usize> = labels.iter().map(Vec::len).collect();
    let mut restrict: Vec<Vec<Option<usize>>> = (0..cat.num_arrows())
        .map(|a| {
            let dst = cat.arrow(a).dst;
            if cat.is_identity(a) {
                (0..sizes[dst]).map(Some).collect()
            } else {
                vec![None; sizes[dst]]
            }
        })
        .collect();
    let find = |c: usize, x: &str, line: usize| {
        labels[c]
            .iter()
            .position(|l| l == x)
            .ok_or_else(|| ParseError::new(line, format!("{x} is not an element at stage {}", cat.stage_name(c))))
    };
    for (line, a, x, y) in rest_rows {
        let arrow = cat.arrow(a);
        let xi = find(arrow.dst, &x, line)?;
        let yi = find(arrow.src, &y, line)?;
        if restrict[a][xi].replace(yi).is_some_and(|old| old != yi) {
            return Err(ParseError::new(
                line,
                format!("conflicting restriction of {x} along {}", arrow.name),
            ));
        }
    }
    // composite arrows are derived from declared ones when left out
    for _ in 0..cat.num_arrows() {
        for g in 0..cat.num_arrows() {
            for f in 0..cat.num_arrows() {
                let Some(h) = cat.compose(g, f) else { continue };
                for x in 0..restrict[h].len() {
                    if restrict[h][x].is_none() {
                        if let Some(y) = restrict[g][x].and_then(|y| restrict[f][y]) {
                            restrict[h][x] = Some(y);
                        }
                    }
                }
            }
        }
    }
    for (a, row) in restrict.iter_mut().enumerate() {
        if sizes[cat.arrow(a).src] == 1 {
            row.iter_mut().filter(|y| y.is_none()).for_each(|y| *y = Some(0));
        }
    }
    let mut table = Vec::with_capacity(restrict.len());
    for (a, row) in restrict.into_iter().enumerate() {
        let complete: Option<Vec<usize>> = row.into_iter().collect();
        table.push(complete.ok_or_else(|| {
            ParseError::new(
                sec.line,
                format!("restriction along {} is incomplete", cat.arrow(a).name),
            )
        })?);
    }
    let obj = t
        .object(sizes, table)
        .map_err(|e| ParseError::new(sec.line, e.to_string()))?;
    Ok(obj.with_labels(labels))
}

fn parse_morphism(t: &Topos, sec: &Section, dom: &Object, cod: &Object) -> PResult<Morphism> {
    let cat = t.index();
    let mut maps: Vec<Vec<Option<usize>>> = (0..cat.num_stages()).map(|c| vec![None; dom.size(c)]).collect();
    for (line, row) in &sec.rows {
        let (k, v) = key_value(*line, row)?;
        let c = cat
            .stage_index(&k)
            .ok_or_else(|| ParseError::new(*line, format!("unknown stage {k}")))?;
        for pair in v.split(',').filter(|p| !p.trim().is_empty()) {
            let (x, y) = arrow_pair(*line, pair)?;
            let xi = dom
                .find_label(c, &x)
                .ok_or_else(|| ParseError::new(*line, format!("{x} is not in the domain at stage {k}")))?;
            let yi = cod
                .find_label(c, &y)
                .ok_or_else(|| ParseError::new(*line, format!("{y} is not in the codomain at stage {k}")))?;
            if maps[c][xi].replace(yi).is_some_and(|old| old != yi) {
                return Err(ParseError::new(*line, format!("{x} mapped twice")));
            }
        }
    }
    let mut table = Vec::new();
    for (c, row) in maps.into_iter().enumerate() {
        let complete: Option<Vec<usize>> = row.into_iter().collect();
        table.push(complete.ok_or_else(|| {
            ParseError::new(
                sec.line,
                format!("mapping at stage {} is incomplete", cat.stage_name(c)),
            )
        })?);
    }
    t.morphism(dom, cod, table)
        .map_err(|e| ParseError::new(sec.line, e.to_string()))
}

fn parse_subobject(t: &Topos, sec: &Section, carrier: &Object) -> PResult<Subobject> {
    let cat = t.index();
    let mut mem: Vec<Vec<bool>> = (0..cat.num_stages()).map(|c| vec![false; carrier.size(c)]).collect();
    for (line, row) in &sec.rows {
        let (k, v) = key_value(*line, row)?;
        let c = cat
            .stage_index(&k)
            .ok_or_else(|| ParseError::new(*line, format!("unknown stage {k}")))?;
        for x in v.split_whitespace() {
            let xi = carrier
                .find_label(c, x)
                .ok_or_else(|| ParseError::new(*line, format!("{x} is not in the carrier at stage {k}")))?;
            mem[c][xi] = true;
        }
    }
    Subobject::new(cat, carrier.clone(), mem).map_err(|e| ParseError::new(sec.line, e.to_string()))
}

fn parse_functor(sec: &Section) -> PResult<FunctorSpec> {
    let mut slice = None;
    let (mut objects, mut morphisms) = (Vec::new(), Vec::new());
    for (line, row) in &sec.rows {
        if let Some(x) = row.strip_prefix("slice:") {
            slice = Some(x.trim().to_string());
        } else if let Some(rest) = row.strip_prefix("object ") {
            objects.push(arrow_pair(*line, rest)?);
        } else if let Some(rest) = row.strip_prefix("morphism ") {
            morphisms.push(arrow_pair(*line, rest)?);
        } else {
            return Err(ParseError::new(
                *line,
                "expected `slice: X`, `object A -> B` or `morphism f -> g`",
            ));
        }
    }
    match slice {
        Some(_) if !objects.is_empty() || !morphisms.is_empty() => {
            Err(ParseError::new(sec.line, "a slice functor takes no table rows"))
        }
        Some(x) => Ok(FunctorSpec::Slice(x)),
        None => Ok(FunctorSpec::Table { objects, morphisms }),
    }
}

/// Parses a description file.
pub fn parse_topos(src: &str) -> PResult<ToposFile> {
    let sections = split_sections(src)?;
    let mut index = None;
    for sec in &sections {
        if let Header::Index = sec.header {
            if index.is_some() {
                return Err(ParseError::new(sec.line, "second [index] section"));
            }
            index = Some(parse_index(sec)?);
        }
    }
    let topos = match index {
        Some(cat) => Topos::new("file", cat),
        None => Topos::finset(),
    };
    let mut file = ToposFile {
        topos,
        objects: BTreeMap::new(),
        morphisms: BTreeMap::new(),
        subobjects: BTreeMap::new(),
        functor: None,
    };
    let taken = |file: &ToposFile, name: &str| {
        file.objects.contains_key(name) || file.morphisms.contains_key(name) || file.subobjects.contains_key(name)
    };
    for sec in &sections {
        let lookup = |file: &ToposFile, name: &str| {
            file.objects
                .get(name)
                .cloned()
                .ok_or_else(|| ParseError::new(sec.line, format!("unknown object {name}")))
        };
        match &sec.header {
            Header::Index => {}
            Header::Object(name) => {
                if taken(&file, name) {
                    return Err(ParseError::new(sec.line, format!("{name} defined twice")));
                }
                let obj = parse_object(&file.topos, sec)?;
                file.objects.insert(name.clone(), obj);
            }
            Header::Morphism { name, dom, cod } => {
                if taken(&file, name) {
                    return Err(ParseError::new(sec.line, format!("{name} defined twice")));
                }
                let m = parse_morphism(&file.topos, sec, &lookup(&file, dom)?, &lookup(&file, cod)?)?;
                file.morphisms.insert(name.clone(), m);
            }
            Header::Subobject { name, carrier } => {
                if taken(&file, name) {
                    return Err(ParseError::new(sec.line, format!("{name} defined twice")));
                }
                let s = parse_subobject(&file.topos, sec, &lookup(&file, carrier)?)?;
                file.subobjects.insert(name.clone(), (carrier.clone(), s));
            }
            Header::Functor => {
                if file.functor.is_some() {
                    return Err(ParseError::new(sec.line, "second [functor] section"));
                }
                file.functor = Some(parse_functor(sec)?);
            }
        }
    }
    Ok(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIERP: &str = "
[index]
stages: 0 1
0 -> 1 : u

[object A]
0: a b
1: c
u: c -> a

[object B]
0: p
1: q

[morphism f : A -> B]
0: a -> p, b -> p
1: c -> q

[subobject S of A]
0: a
";

    #[test]
    fn parses_sierpinski_file() {
        let file = parse_topos(SIERP).unwrap();
        assert_eq!(file.topos.index().num_stages(), 2);
        let a = &file.objects["A"];
        assert_eq!(a.sizes(), &[2, 1]);
        assert_eq!(a.restrict(2, 0), 0);
        assert!(file.morphisms["f"].is_epi());
        assert_eq!(file.subobjects["S"].1.count(), 1);
        assert!(file.env().object("A").is_some());
    }

    #[test]
    fn finset_default_and_slice_functor() {
        let file = parse_topos("[object X]\n*: 1 2 3\n[functor]\nslice: X\n").unwrap();
        assert_eq!(file.objects["X"].sizes(), &[3]);
        assert_eq!(file.functor, Some(FunctorSpec::Slice("X".into())));
        let f = file.functor_from(&file).unwrap();
        assert_eq!(f.target().index().num_stages(), 3);
    }

    #[test]
    fn errors_carry_lines() {
        let err = parse_topos("[object X]\n*: a\n[morphism f : X -> Y]\n").unwrap_err();
        assert_eq!(err.line, 3);
        let err = parse_topos("[index]\nstages: 0 1\n0 -> 1 : u\n[object A]\n0: a c\n1: b\n").unwrap_err();
        assert_eq!(err.line, 4);
        let err = parse_topos("[object X]\n*: a\nzz: a -> a\n").unwrap_err();
        assert_eq!(err.line, 3);
        let err = parse_topos("junk\n").unwrap_err();
        assert_eq!(err.line, 1);
        let err = parse_topos("[index]\nstages: 0\n0 -> 9 : u\n").unwrap_err();
        assert_eq!(err.line, 3);
    }

    #[test]
    fn non_natural_morphism_rejected() {
        let src = "
[index]
stages: 0 1
0 -> 1 : u
[object A]
0: a b
1: c d
u: c -> a, d -> b
[morphism f : A -> A]
0: a -> a, b -> b
1: c -> d, d -> d
";
        assert!(parse_topos(src).is_err());
    }
}
