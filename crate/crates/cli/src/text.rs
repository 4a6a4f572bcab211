//! Line-oriented text formats for categories, functors, natural
//! transformations, homotopies and squares.
//!
//! A file is a sequence of blocks, each opened by a header line:
//!
//! ```text
//! category NAME              # followed by object / arrow / entry lines
//! category NAME = A x B      # a product, no body
//! functor F : C -> D         # object X -> U / arrow f -> u
//! nat N : F => G             # at X : u
//! homotopy H : A0 -> A1      # a functor Cyl(A0) -> A1, in functor lines
//! square Q                   # top F / left J / right P / bottom G
//! ```
//!
//! Names resolve against earlier blocks of the same file, then against the
//! workspace. Identities are implicit and may be written `id_X`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use folkengine_core::fincat::{product, same_cat, split_arr, Arr, BuildError, CatBuilder, FinCat, Functor, NatTrans, Obj, Square};
use folkengine_core::homotopy::Homotopy;
use folkengine_core::interval::cyl;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagKind {
    Syntax,
    Dangling,
    Invalid,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct Diagnostic {
    pub line: usize,
    pub kind: DiagKind,
    pub message: String,
}

fn diag(line: usize, kind: DiagKind, message: impl Into<String>) -> Diagnostic {
    Diagnostic { line, kind, message: message.into() }
}

#[derive(Clone, Debug)]
pub enum Item {
    Category(Arc<FinCat>),
    Functor(String, Functor),
    Nat(String, NatTrans),
    Homotopy(String, Homotopy),
    Square(String, Square),
}

impl Item {
    pub fn name(&self) -> &str {
        match self {
            Item::Category(c) => c.name(),
            Item::Functor(n, _) | Item::Nat(n, _) | Item::Homotopy(n, _) | Item::Square(n, _) => n,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Item::Category(_) => "category",
            Item::Functor(..) => "functor",
            Item::Nat(..) => "nat",
            Item::Homotopy(..) => "homotopy",
            Item::Square(..) => "square",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Document {
    pub items: Vec<Item>,
}

impl Document {
    pub fn category(&self, name: &str) -> Option<&Arc<FinCat>> {
        self.items.iter().find_map(|i| match i {
            Item::Category(c) if c.name() == name => Some(c),
            _ => None,
        })
    }

    pub fn functor(&self, name: &str) -> Option<&Functor> {
        self.items.iter().find_map(|i| match i {
            Item::Functor(n, f) if n == name => Some(f),
            _ => None,
        })
    }

    pub fn last_functor(&self) -> Option<(&str, &Functor)> {
        self.items.iter().rev().find_map(|i| match i {
            Item::Functor(n, f) => Some((n.as_str(), f)),
            _ => None,
        })
    }

    pub fn last_square(&self) -> Option<(&str, &Square)> {
        self.items.iter().rev().find_map(|i| match i {
            Item::Square(n, s) => Some((n.as_str(), s)),
            _ => None,
        })
    }
}

/// Named values visible to a parse.
#[derive(Clone, Debug, Default)]
pub struct Workspace {
    categories: HashMap<String, Arc<FinCat>>,
    functors: HashMap<String, Functor>,
    homotopies: HashMap<String, Homotopy>,
}

impl Workspace {
    pub fn new() -> Workspace {
        Workspace::default()
    }

    pub fn with_categories(cats: &[Arc<FinCat>]) -> Workspace {
        let mut ws = Workspace::new();
        for c in cats {
            ws.categories.insert(c.name().to_string(), c.clone());
        }
        ws
    }

    pub fn category(&self, name: &str) -> Option<&Arc<FinCat>> {
        self.categories.get(name)
    }

    pub fn functor(&self, name: &str) -> Option<&Functor> {
        self.functors.get(name)
    }

    pub fn homotopy(&self, name: &str) -> Option<&Homotopy> {
        self.homotopies.get(name)
    }

    fn add(&mut self, item: &Item) {
        match item {
            Item::Category(c) => {
                self.categories.insert(c.name().to_string(), c.clone());
            }
            Item::Functor(n, f) => {
                self.functors.insert(n.clone(), f.clone());
            }
            Item::Homotopy(n, h) => {
                self.homotopies.insert(n.clone(), h.clone());
            }
            Item::Nat(..) | Item::Square(..) => {}
        }
    }

    /// Parse `text` and make its definitions visible to later parses.
    pub fn load(&mut self, text: &str) -> Result<Document, Diagnostic> {
        let doc = parse_document(text, self)?;
        for item in &doc.items {
            self.add(item);
        }
        Ok(doc)
    }
}

// ---------------------------------------------------------------------------
// Parsing

struct Line<'a> {
    no: usize,
    toks: Vec<&'a str>,
}

fn lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(k, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = body.split_whitespace().collect();
            (!toks.is_empty()).then_some(Line { no: k + 1, toks })
        })
        .collect()
}

const HEADERS: [&str; 5] = ["category", "functor", "nat", "homotopy", "square"];

/// Parse a whole file against `ws`, without modifying it.
pub fn parse_document(text: &str, ws: &Workspace) -> Result<Document, Diagnostic> {
    let all = lines(text);
    let mut scope = ws.clone();
    let mut doc = Document::default();
    let mut seen: HashMap<(&'static str, String), usize> = HashMap::new();
    let mut k = 0;
    while k < all.len() {
        let head = &all[k];
        if !HEADERS.contains(&head.toks[0]) {
            return Err(diag(head.no, DiagKind::Syntax, format!("expected a block header, found `{}`", head.toks[0])));
        }
        let end = (k + 1..all.len()).find(|&e| HEADERS.contains(&all[e].toks[0])).unwrap_or(all.len());
        let body = &all[k + 1..end];
        let item = match head.toks[0] {
            "category" => Item::Category(parse_category_block(head, body, &scope)?),
            "functor" => {
                let (n, f) = parse_functor_block(head, body, &scope)?;
                Item::Functor(n, f)
            }
            "nat" => {
                let (n, t) = parse_nat_block(head, body, &scope)?;
                Item::Nat(n, t)
            }
            "homotopy" => {
                let (n, h) = parse_homotopy_block(head, body, &scope)?;
                Item::Homotopy(n, h)
            }
            _ => {
                let (n, s) = parse_square_block(head, body, &scope)?;
                Item::Square(n, s)
            }
        };
        if let Some(prev) = seen.insert((item.kind(), item.name().to_string()), head.no) {
            return Err(diag(head.no, DiagKind::Syntax, format!("{} {} already defined on line {prev}", item.kind(), item.name())));
        }
        scope.add(&item);
        doc.items.push(item);
        k = end;
    }
    Ok(doc)
}

fn expect_shape(line: &Line, pattern: &[Option<&str>], what: &str) -> Result<(), Diagnostic> {
    let ok = line.toks.len() == pattern.len()
        && line.toks.iter().zip(pattern).all(|(t, p)| p.is_none_or(|p| *t == p));
    if ok {
        Ok(())
    } else {
        Err(diag(line.no, DiagKind::Syntax, format!("expected `{what}`")))
    }
}

fn resolve_cat(scope: &Workspace, name: &str, line: usize) -> Result<Arc<FinCat>, Diagnostic> {
    scope.category(name).cloned().ok_or_else(|| diag(line, DiagKind::Dangling, format!("unknown category {name}")))
}

fn resolve_functor(scope: &Workspace, name: &str, line: usize) -> Result<Functor, Diagnostic> {
    scope.functor(name).cloned().ok_or_else(|| diag(line, DiagKind::Dangling, format!("unknown functor {name}")))
}

fn find_arrow(c: &FinCat, name: &str) -> Option<Arr> {
    c.find_arr(name).or_else(|| name.strip_prefix("id_").and_then(|x| c.find_obj(x)).map(|x| c.id(x)))
}

fn parse_category_block(head: &Line, body: &[Line], scope: &Workspace) -> Result<Arc<FinCat>, Diagnostic> {
    if head.toks.len() == 6 && head.toks[2] == "=" && head.toks[4] == "x" {
        if let Some(l) = body.first() {
            return Err(diag(l.no, DiagKind::Syntax, "a product category has no body"));
        }
        let a = resolve_cat(scope, head.toks[3], head.no)?;
        let b = resolve_cat(scope, head.toks[5], head.no)?;
        return Ok(Arc::new(product(&a, &b).renamed(head.toks[1])));
    }
    expect_shape(head, &[Some("category"), None], "category NAME")?;
    let mut b = CatBuilder::new(head.toks[1]);
    let mut arrow_lines: Vec<(&str, &str, &str, usize)> = Vec::new();
    let mut entry_lines: Vec<(&str, &str, usize)> = Vec::new();
    for l in body {
        match l.toks[0] {
            "object" => {
                expect_shape(l, &[Some("object"), None], "object X")?;
                b.add_object(l.toks[1]);
            }
            "arrow" => {
                expect_shape(l, &[Some("arrow"), None, Some(":"), None, Some("->"), None], "arrow f : X -> Y")?;
                b.add_arrow(l.toks[1], l.toks[3], l.toks[5]);
                arrow_lines.push((l.toks[1], l.toks[3], l.toks[5], l.no));
            }
            _ => {
                expect_shape(l, &[None, Some("."), None, Some("="), None], "g . f = h")?;
                b.add_entry(l.toks[0], l.toks[2], l.toks[4]);
                entry_lines.push((l.toks[0], l.toks[2], l.no));
            }
        }
    }
    let in_context = |msg: String| format!("category {}: {msg}", head.toks[1]);
    b.build().map(Arc::new).map_err(|e| {
        let (line, kind) = match &e {
            BuildError::UnknownObject(o) => {
                let l = arrow_lines.iter().find(|a| a.1 == o || a.2 == o).map_or(head.no, |a| a.3);
                (l, DiagKind::Dangling)
            }
            BuildError::UnknownArrow(a) => {
                let l = entry_lines.iter().find(|x| x.0 == a || x.1 == a).map_or(head.no, |x| x.2);
                (l, DiagKind::Dangling)
            }
            BuildError::DuplicateArrow(a) => (arrow_lines.iter().find(|x| x.0 == a).map_or(head.no, |x| x.3), DiagKind::Syntax),
            BuildError::DuplicateObject(_) => (head.no, DiagKind::Syntax),
            BuildError::NotComposable(g, f) | BuildError::BadEndpoints { g, f, .. } => {
                (entry_lines.iter().find(|x| x.0 == g && x.1 == f).map_or(head.no, |x| x.2), DiagKind::Invalid)
            }
            // the later of the two entries is the one that conflicts
            BuildError::Conflict(g, f) => {
                (entry_lines.iter().rfind(|x| x.0 == g && x.1 == f).map_or(head.no, |x| x.2), DiagKind::Invalid)
            }
            BuildError::MissingEntry(..) | BuildError::Laws(_) => (head.no, DiagKind::Invalid),
        };
        diag(line, kind, in_context(e.to_string()))
    })
}

/// The object and arrow lines of a functor body, against a known domain and
/// codomain. Unlisted identities go to identities.
fn functor_body(dom: &Arc<FinCat>, cod: &Arc<FinCat>, head: &Line, body: &[Line], what: &str) -> Result<Functor, Diagnostic> {
    let mut obj: Vec<Option<Obj>> = vec![None; dom.n_obj()];
    let mut arr: Vec<Option<Arr>> = vec![None; dom.n_arr()];
    for l in body {
        match l.toks[0] {
            "object" => {
                expect_shape(l, &[Some("object"), None, Some("->"), None], "object X -> U")?;
                let x = dom.find_obj(l.toks[1]).ok_or_else(|| {
                    diag(l.no, DiagKind::Dangling, format!("{} has no object {}", dom.name(), l.toks[1]))
                })?;
                let y = cod.find_obj(l.toks[3]).ok_or_else(|| {
                    diag(l.no, DiagKind::Dangling, format!("{} has no object {}", cod.name(), l.toks[3]))
                })?;
                if obj[x as usize].replace(y).is_some() {
                    return Err(diag(l.no, DiagKind::Syntax, format!("object {} mapped twice", l.toks[1])));
                }
            }
            "arrow" => {
                expect_shape(l, &[Some("arrow"), None, Some("->"), None], "arrow f -> u")?;
                let a = find_arrow(dom, l.toks[1]).ok_or_else(|| {
                    diag(l.no, DiagKind::Dangling, format!("{} has no arrow {}", dom.name(), l.toks[1]))
                })?;
                let b = find_arrow(cod, l.toks[3]).ok_or_else(|| {
                    diag(l.no, DiagKind::Dangling, format!("{} has no arrow {}", cod.name(), l.toks[3]))
                })?;
                if arr[a as usize].replace(b).is_some() {
                    return Err(diag(l.no, DiagKind::Syntax, format!("arrow {} mapped twice", l.toks[1])));
                }
            }
            other => {
                return Err(diag(l.no, DiagKind::Syntax, format!("unexpected `{other}` in a {what} block")));
            }
        }
    }
    let obj: Vec<Obj> = dom
        .objects()
        .map(|x| obj[x as usize].ok_or_else(|| diag(head.no, DiagKind::Syntax, format!("object {} has no image", dom.obj_name(x)))))
        .collect::<Result<_, _>>()?;
    let arr: Vec<Arr> = dom
        .arrows()
        .map(|a| match arr[a as usize] {
            Some(b) => Ok(b),
            None if dom.is_identity(a) => Ok(cod.id(obj[dom.src(a) as usize])),
            None => Err(diag(head.no, DiagKind::Syntax, format!("arrow {} has no image", dom.arr_name(a)))),
        })
        .collect::<Result<_, _>>()?;
    let f = Functor::new(dom.clone(), cod.clone(), obj, arr);
    f.validate().map_err(|e| diag(head.no, DiagKind::Invalid, format!("{what} {}: {e}", head.toks[1])))?;
    Ok(f)
}

fn parse_functor_block(head: &Line, body: &[Line], scope: &Workspace) -> Result<(String, Functor), Diagnostic> {
    expect_shape(head, &[Some("functor"), None, Some(":"), None, Some("->"), None], "functor F : C -> D")?;
    let dom = resolve_cat(scope, head.toks[3], head.no)?;
    let cod = resolve_cat(scope, head.toks[5], head.no)?;
    Ok((head.toks[1].to_string(), functor_body(&dom, &cod, head, body, "functor")?))
}

fn parse_homotopy_block(head: &Line, body: &[Line], scope: &Workspace) -> Result<(String, Homotopy), Diagnostic> {
    expect_shape(head, &[Some("homotopy"), None, Some(":"), None, Some("->"), None], "homotopy H : A0 -> A1")?;
    let a0 = resolve_cat(scope, head.toks[3], head.no)?;
    let a1 = resolve_cat(scope, head.toks[5], head.no)?;
    let carrier = functor_body(&cyl(&a0), &a1, head, body, "homotopy")?;
    let h = Homotopy::from_carrier(carrier).map_err(|e| diag(head.no, DiagKind::Invalid, e.to_string()))?;
    Ok((head.toks[1].to_string(), h))
}

fn parse_nat_block(head: &Line, body: &[Line], scope: &Workspace) -> Result<(String, NatTrans), Diagnostic> {
    expect_shape(head, &[Some("nat"), None, Some(":"), None, Some("=>"), None], "nat N : F => G")?;
    let source = resolve_functor(scope, head.toks[3], head.no)?;
    let target = resolve_functor(scope, head.toks[5], head.no)?;
    if !same_cat(&source.dom, &target.dom) || !same_cat(&source.cod, &target.cod) {
        return Err(diag(head.no, DiagKind::Invalid, "source and target functors are not parallel"));
    }
    let (d, c) = (source.dom.clone(), source.cod.clone());
    let mut comps: Vec<Option<Arr>> = vec![None; d.n_obj()];
    for l in body {
        expect_shape(l, &[Some("at"), None, Some(":"), None], "at X : u")?;
        let x = d.find_obj(l.toks[1]).ok_or_else(|| diag(l.no, DiagKind::Dangling, format!("{} has no object {}", d.name(), l.toks[1])))?;
        let u = find_arrow(&c, l.toks[3]).ok_or_else(|| diag(l.no, DiagKind::Dangling, format!("{} has no arrow {}", c.name(), l.toks[3])))?;
        if comps[x as usize].replace(u).is_some() {
            return Err(diag(l.no, DiagKind::Syntax, format!("component at {} given twice", l.toks[1])));
        }
    }
    let comps = d
        .objects()
        .map(|x| comps[x as usize].ok_or_else(|| diag(head.no, DiagKind::Syntax, format!("no component at {}", d.obj_name(x)))))
        .collect::<Result<_, _>>()?;
    let t = NatTrans { source, target, comps };
    t.validate().map_err(|e| diag(head.no, DiagKind::Invalid, format!("nat {}: {e}", head.toks[1])))?;
    Ok((head.toks[1].to_string(), t))
}

fn parse_square_block(head: &Line, body: &[Line], scope: &Workspace) -> Result<(String, Square), Diagnostic> {
    expect_shape(head, &[Some("square"), None], "square NAME")?;
    let mut sides: [Option<Functor>; 4] = Default::default();
    const SIDES: [&str; 4] = ["top", "left", "right", "bottom"];
    for l in body {
        let Some(k) = SIDES.iter().position(|s| *s == l.toks[0]) else {
            return Err(diag(l.no, DiagKind::Syntax, format!("expected one of top, left, right, bottom, found `{}`", l.toks[0])));
        };
        expect_shape(l, &[Some(SIDES[k]), None], &format!("{} F", SIDES[k]))?;
        if sides[k].replace(resolve_functor(scope, l.toks[1], l.no)?).is_some() {
            return Err(diag(l.no, DiagKind::Syntax, format!("{} given twice", SIDES[k])));
        }
    }
    let [top, left, right, bottom] = sides;
    let missing = |k: usize| diag(head.no, DiagKind::Syntax, format!("square {} has no {}", head.toks[1], SIDES[k]));
    let sq = Square {
        top: top.ok_or_else(|| missing(0))?,
        left: left.ok_or_else(|| missing(1))?,
        right: right.ok_or_else(|| missing(2))?,
        bottom: bottom.ok_or_else(|| missing(3))?,
    };
    sq.check().map_err(|e| diag(head.no, DiagKind::Invalid, format!("square {}: {e}", head.toks[1])))?;
    Ok((head.toks[1].to_string(), sq))
}

// ---------------------------------------------------------------------------
// Printing

/// The printed name of an arrow: identities as `id_X`, arrows of a product
/// by their components, so the text agrees with the parsed form of the factors.
fn arrow_text(c: &FinCat, a: Arr) -> String {
    if c.is_identity(a) {
        format!("id_{}", c.obj_name(c.src(a)))
    } else {
        component_text(c, a)
    }
}

fn component_text(c: &FinCat, a: Arr) -> String {
    match c.product_parts() {
        Some((l, r)) => {
            let (x, y) = split_arr(c, a);
            format!("({},{})", component_text(l, x), component_text(r, y))
        }
        None if c.is_identity(a) => format!("id_{}", c.obj_name(c.src(a))),
        None => c.arr_name(a).to_string(),
    }
}

/// The table form, which parses back to the same category whenever its
/// identities come first and its arrow names agree with [`arrow_text`].
pub fn print_category(c: &FinCat) -> String {
    let mut s = format!("category {}\n", c.name());
    for x in c.objects() {
        let _ = writeln!(s, "object {}", c.obj_name(x));
    }
    let plain: Vec<Arr> = c.arrows().filter(|&a| !c.is_identity(a)).collect();
    for &a in &plain {
        let _ = writeln!(s, "arrow {} : {} -> {}", arrow_text(c, a), c.obj_name(c.src(a)), c.obj_name(c.tgt(a)));
    }
    for &f in &plain {
        for &g in &plain {
            if c.src(g) == c.tgt(f) {
                let _ = writeln!(s, "{} . {} = {}", arrow_text(c, g), arrow_text(c, f), arrow_text(c, c.comp(g, f)));
            }
        }
    }
    s
}

fn functor_lines(s: &mut String, f: &Functor) {
    let (d, c) = (&f.dom, &f.cod);
    for x in d.objects() {
        let _ = writeln!(s, "object {} -> {}", d.obj_name(x), c.obj_name(f.on_obj(x)));
    }
    for a in d.arrows().filter(|&a| !d.is_identity(a)) {
        let _ = writeln!(s, "arrow {} -> {}", arrow_text(d, a), arrow_text(c, f.on_arr(a)));
    }
}

pub fn print_functor(name: &str, f: &Functor) -> String {
    let mut s = format!("functor {name} : {} -> {}\n", f.dom.name(), f.cod.name());
    functor_lines(&mut s, f);
    s
}

pub fn print_homotopy(name: &str, h: &Homotopy) -> String {
    let mut s = format!("homotopy {name} : {} -> {}\n", h.source().name(), h.target().name());
    functor_lines(&mut s, &h.carrier);
    s
}

pub fn print_nat(name: &str, source: &str, target: &str, t: &NatTrans) -> String {
    let mut s = format!("nat {name} : {source} => {target}\n");
    let (d, c) = (&t.source.dom, &t.source.cod);
    for x in d.objects() {
        let _ = writeln!(s, "at {} : {}", d.obj_name(x), arrow_text(c, t.comps[x as usize]));
    }
    s
}

pub fn print_square(name: &str, sides: [&str; 4]) -> String {
    format!("square {name}\ntop {}\nleft {}\nright {}\nbottom {}\n", sides[0], sides[1], sides[2], sides[3])
}

/// Name of the functor item in `items` equal to `f`, for nat and square lines.
fn functor_name<'a>(items: &'a [Item], f: &Functor) -> &'a str {
    items
        .iter()
        .rev()
        .find_map(|i| match i {
            Item::Functor(n, g) if g == f => Some(n.as_str()),
            _ => None,
        })
        .unwrap_or("?")
}

/// Print every item in order. Products whose factors were printed earlier in
/// the document use the product header; nats and squares refer to earlier
/// functor items by name.
pub fn print_document(doc: &Document) -> String {
    let mut out = String::new();
    for (k, item) in doc.items.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        let earlier = &doc.items[..k];
        let known = |c: &Arc<FinCat>| {
            earlier.iter().any(|i| matches!(i, Item::Category(e) if e.name() == c.name() && **e == **c))
        };
        match item {
            Item::Category(c) => match c.product_parts() {
                Some((a, b)) if known(a) && known(b) => {
                    let _ = writeln!(out, "category {} = {} x {}", c.name(), a.name(), b.name());
                }
                _ => out.push_str(&print_category(c)),
            },
            Item::Functor(n, f) => out.push_str(&print_functor(n, f)),
            Item::Homotopy(n, h) => out.push_str(&print_homotopy(n, h)),
            Item::Nat(n, t) => {
                out.push_str(&print_nat(n, functor_name(earlier, &t.source), functor_name(earlier, &t.target), t))
            }
            Item::Square(n, q) => {
                let sides = [&q.top, &q.left, &q.right, &q.bottom].map(|f| functor_name(earlier, f));
                out.push_str(&print_square(n, sides))
            }
        }
    }
    out
}
