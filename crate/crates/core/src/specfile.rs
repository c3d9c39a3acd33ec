//! Line-oriented groupoid files.
//!
//! ```text
//! # the group Z/2
//! [arrows]
//! e g
//! [units]
//! e
//! [range]
//! e e
//! g e
//! [source]
//! e e
//! g e
//! [inverse]
//! e e
//! g g
//! [compose]
//! e e e
//! e g g
//! g e g
//! g g e
//! [measure]   # optional, one positive weight per unit
//! e 1
//! [haar]      # optional, one positive weight per arrow
//! e 1
//! g 1
//! ```
//!
//! Tokens are separated by whitespace and `#` starts a comment. `[arrows]`
//! and `[units]` take any number of labels per line; `[range]`, `[source]`
//! and `[inverse]` take `arrow value` lines covering every arrow once,
//! `[compose]` takes `x y xy` lines. Without `[measure]` the units get equal
//! weights summing to one, without `[haar]` every arrow gets weight one.
//! Groupoid axioms are not checked here, see [`crate::groupoid::validate`].

use std::collections::HashMap;
use std::fmt;

use crate::groupoid::GroupoidData;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupoidFile {
    pub data: GroupoidData,
    /// Unit weights in the order of `data.units`.
    pub measure: Vec<f64>,
    pub haar: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Section {
    Arrows,
    Units,
    Range,
    Source,
    Inverse,
    Compose,
    Measure,
    Haar,
}

impl Section {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "arrows" => Section::Arrows,
            "units" => Section::Units,
            "range" => Section::Range,
            "source" => Section::Source,
            "inverse" => Section::Inverse,
            "compose" => Section::Compose,
            "measure" => Section::Measure,
            "haar" => Section::Haar,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Section::Arrows => "arrows",
            Section::Units => "units",
            Section::Range => "range",
            Section::Source => "source",
            Section::Inverse => "inverse",
            Section::Compose => "compose",
            Section::Measure => "measure",
            Section::Haar => "haar",
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl Token<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: self.column, message: message.into() }
    }
}

fn tokens(line: &str, number: usize) -> Vec<Token<'_>> {
    let content = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in content.char_indices().chain(std::iter::once((content.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token { text: &content[s..i], line: number, column: content[..s].chars().count() + 1 });
                start = None;
            }
            _ => {}
        }
    }
    out
}

/// A section of `arrow value` lines that must cover every arrow exactly once.
struct Table<'t, 'a> {
    section: Section,
    rows: &'t [Vec<Token<'a>>],
    header: Token<'a>,
    arrows: &'t [String],
    index: &'t HashMap<&'a str, usize>,
}

impl Table<'_, '_> {
    fn per_arrow<T>(&self, value: impl Fn(&Token<'_>) -> Result<T, ParseError>) -> Result<Vec<T>, ParseError> {
        let name = self.section.name();
        let mut out: Vec<Option<T>> = (0..self.arrows.len()).map(|_| None).collect();
        for row in self.rows {
            if row.len() != 2 {
                return Err(row[0].error(format!("`[{name}]` lines have the form `arrow value`")));
            }
            let x =
                *self.index.get(row[0].text).ok_or_else(|| row[0].error(format!("unknown arrow `{}`", row[0].text)))?;
            if out[x].replace(value(&row[1])?).is_some() {
                return Err(row[0].error(format!("arrow `{}` listed twice in `[{name}]`", row[0].text)));
            }
        }
        out.into_iter()
            .enumerate()
            .map(|(x, v)| {
                v.ok_or_else(|| self.header.error(format!("`[{name}]` has no entry for arrow `{}`", self.arrows[x])))
            })
            .collect()
    }
}

pub fn parse_groupoid_file(text: &str) -> Result<GroupoidFile, ParseError> {
    let mut lines: HashMap<Section, Vec<Vec<Token<'_>>>> = HashMap::new();
    let mut headers: HashMap<Section, Token<'_>> = HashMap::new();
    let mut current: Option<Section> = None;
    for (i, raw) in text.lines().enumerate() {
        let toks = tokens(raw, i + 1);
        let Some(first) = toks.first() else { continue };
        if let Some(rest) = first.text.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| first.error(format!("malformed section header `{}`", first.text)))?;
            let section = Section::parse(name).ok_or_else(|| first.error(format!("unknown section `[{name}]`")))?;
            if let Some(extra) = toks.get(1) {
                return Err(extra.error("unexpected token after section header"));
            }
            if headers.insert(section, *first).is_some() {
                return Err(first.error(format!("section `[{name}]` appears twice")));
            }
            lines.insert(section, Vec::new());
            current = Some(section);
            continue;
        }
        let section = current.ok_or_else(|| first.error("content before the first section header"))?;
        lines.get_mut(&section).expect("registered").push(toks);
    }
    let end = ParseError { line: text.lines().count().max(1), column: 1, message: String::new() };
    let section = |s: Section| -> Result<&Vec<Vec<Token<'_>>>, ParseError> {
        lines.get(&s).ok_or_else(|| ParseError { message: format!("missing section `[{}]`", s.name()), ..end.clone() })
    };

    let mut arrows = Vec::new();
    let mut index = HashMap::new();
    for t in section(Section::Arrows)?.iter().flatten() {
        if index.insert(t.text, arrows.len()).is_some() {
            return Err(t.error(format!("duplicate arrow `{}`", t.text)));
        }
        arrows.push(t.text.to_string());
    }
    if arrows.is_empty() {
        return Err(headers[&Section::Arrows].error("no arrows listed"));
    }
    let lookup =
        |t: &Token<'_>| index.get(t.text).copied().ok_or_else(|| t.error(format!("unknown arrow `{}`", t.text)));

    let mut units = Vec::new();
    for t in section(Section::Units)?.iter().flatten() {
        let u = lookup(t)?;
        if units.contains(&u) {
            return Err(t.error(format!("duplicate unit `{}`", t.text)));
        }
        units.push(u);
    }
    if units.is_empty() {
        return Err(headers[&Section::Units].error("no units listed"));
    }

    let table = |s: Section| -> Result<Table<'_, '_>, ParseError> {
        Ok(Table { section: s, rows: section(s)?, header: headers[&s], arrows: &arrows, index: &index })
    };
    let range = table(Section::Range)?.per_arrow(lookup)?;
    let source = table(Section::Source)?.per_arrow(lookup)?;
    let inverse = table(Section::Inverse)?.per_arrow(lookup)?;

    let mut compose = Vec::new();
    for row in section(Section::Compose)? {
        if row.len() != 3 {
            return Err(row[0].error("`[compose]` lines have the form `x y xy`"));
        }
        compose.push((lookup(&row[0])?, lookup(&row[1])?, lookup(&row[2])?));
    }

    let weight = |t: &Token<'_>| -> Result<f64, ParseError> {
        match t.text.parse::<f64>() {
            Ok(w) if w.is_finite() && w > 0.0 => Ok(w),
            Ok(_) => Err(t.error(format!("weight `{}` must be positive and finite", t.text))),
            Err(_) => Err(t.error(format!("`{}` is not a number", t.text))),
        }
    };
    let haar = if lines.contains_key(&Section::Haar) {
        table(Section::Haar)?.per_arrow(weight)?
    } else {
        vec![1.0; arrows.len()]
    };
    let measure = match lines.get(&Section::Measure) {
        None => vec![1.0 / units.len() as f64; units.len()],
        Some(rows) => {
            let mut out: Vec<Option<f64>> = vec![None; units.len()];
            for row in rows {
                if row.len() != 2 {
                    return Err(row[0].error("`[measure]` lines have the form `unit weight`"));
                }
                let x = lookup(&row[0])?;
                let k = units
                    .iter()
                    .position(|&u| u == x)
                    .ok_or_else(|| row[0].error(format!("`{}` is not a unit", row[0].text)))?;
                if out[k].replace(weight(&row[1])?).is_some() {
                    return Err(row[0].error(format!("unit `{}` listed twice in `[measure]`", row[0].text)));
                }
            }
            out.iter()
                .enumerate()
                .map(|(k, v)| {
                    v.ok_or_else(|| {
                        headers[&Section::Measure]
                            .error(format!("`[measure]` has no entry for unit `{}`", arrows[units[k]]))
                    })
                })
                .collect::<Result<_, _>>()?
        }
    };
    Ok(GroupoidFile { data: GroupoidData { arrows, units, range, source, inverse, compose }, measure, haar })
}

/// The file format for an existing groupoid, with the given weights.
pub fn write_groupoid_file(data: &GroupoidData, measure: &[f64], haar: &[f64]) -> String {
    let a = |x: usize| data.arrows[x].as_str();
    let mut out = String::from("[arrows]\n");
    out += &data.arrows.join(" ");
    out += "\n[units]\n";
    out += &data.units.iter().map(|&u| a(u)).collect::<Vec<_>>().join(" ");
    for (name, map) in [("range", &data.range), ("source", &data.source), ("inverse", &data.inverse)] {
        out += &format!("\n[{name}]\n");
        for (x, &y) in map.iter().enumerate() {
            out += &format!("{} {}\n", a(x), a(y));
        }
    }
    out += "[compose]\n";
    for &(x, y, z) in &data.compose {
        out += &format!("{} {} {}\n", a(x), a(y), a(z));
    }
    out += "[measure]\n";
    for (&u, w) in data.units.iter().zip(measure) {
        out += &format!("{} {:?}\n", a(u), w);
    }
    out += "[haar]\n";
    for (x, w) in haar.iter().enumerate() {
        out += &format!("{} {:?}\n", a(x), w);
    }
    out
}
