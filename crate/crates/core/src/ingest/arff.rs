//! ARFF subset: `@relation`, nominal and numeric `@attribute`s, `@data`
//! with comma-separated rows, `?` for missing, `%` comment lines.
//!
//! Attribute kinds are inferred from the declarations: `{0,1}` is a binary
//! score, a two-value yes/no set is boolean, any other nominal set is
//! categorical and `numeric`/`real`/`integer` are numeric.

use std::fmt::Write as _;

use super::table::{AttributeKind, AttributeSpec, Cell, RawTable, Value};
use super::{parse_yes_no, IngestError, ParseOptions, DEFAULT_CLASS_ATTRIBUTE};

struct Token {
    text: String,
    quoted: bool,
}

/// Splits a comma-separated list honouring `'…'`/`"…"` quoting with
/// backslash escapes. Unquoted tokens are trimmed.
fn split_fields(line: &str, lineno: usize) -> Result<Vec<Token>, IngestError> {
    let malformed = |message: &str| IngestError::MalformedHeader {
        line: lineno,
        message: message.to_string(),
    };
    let mut out = Vec::new();
    let mut chars = line.chars().peekable();
    loop {
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        let token = match chars.peek().copied() {
            Some(q @ ('\'' | '"')) => {
                chars.next();
                let mut text = String::new();
                loop {
                    match chars.next() {
                        Some('\\') => match chars.next() {
                            Some(c) => text.push(c),
                            None => return Err(malformed("dangling escape")),
                        },
                        Some(c) if c == q => break,
                        Some(c) => text.push(c),
                        None => return Err(malformed("unterminated quote")),
                    }
                }
                while chars.peek().is_some_and(|c| c.is_whitespace()) {
                    chars.next();
                }
                match chars.peek() {
                    None | Some(',') => {}
                    Some(_) => return Err(malformed("text after closing quote")),
                }
                Token { text, quoted: true }
            }
            _ => {
                let mut text = String::new();
                while let Some(&c) = chars.peek() {
                    if c == ',' {
                        break;
                    }
                    text.push(c);
                    chars.next();
                }
                Token {
                    text: text.trim().to_string(),
                    quoted: false,
                }
            }
        };
        out.push(token);
        match chars.next() {
            Some(',') => continue,
            None => break,
            Some(_) => unreachable!("token loops stop at a comma or end of line"),
        }
    }
    Ok(out)
}

/// Reads a leading (possibly quoted) name and returns it with the remainder.
fn take_name(s: &str, lineno: usize) -> Result<(String, &str), IngestError> {
    let s = s.trim_start();
    let malformed = |message: &str| IngestError::MalformedHeader {
        line: lineno,
        message: message.to_string(),
    };
    match s.chars().next() {
        Some(q @ ('\'' | '"')) => {
            let mut name = String::new();
            let mut escaped = false;
            for (i, c) in s.char_indices().skip(1) {
                if escaped {
                    name.push(c);
                    escaped = false;
                } else if c == '\\' {
                    escaped = true;
                } else if c == q {
                    return Ok((name, &s[i + c.len_utf8()..]));
                } else {
                    name.push(c);
                }
            }
            Err(malformed("unterminated quoted name"))
        }
        Some(_) => {
            let end = s.find(char::is_whitespace).unwrap_or(s.len());
            Ok((s[..end].to_string(), &s[end..]))
        }
        None => Err(malformed("missing name")),
    }
}

enum Declared {
    Nominal(Vec<String>),
    Numeric,
}

fn parse_attribute(rest: &str, lineno: usize) -> Result<(String, Declared), IngestError> {
    let (name, ty) = take_name(rest, lineno)?;
    let ty = ty.trim();
    let declared = if let Some(inner) = ty.strip_prefix('{') {
        let inner = inner.strip_suffix('}').ok_or(IngestError::MalformedHeader {
            line: lineno,
            message: format!("nominal list for `{name}` is not closed"),
        })?;
        let values: Vec<String> = split_fields(inner, lineno)?
            .into_iter()
            .map(|t| t.text.trim().to_string())
            .filter(|v| !v.is_empty())
            .collect();
        if values.is_empty() {
            return Err(IngestError::MalformedHeader {
                line: lineno,
                message: format!("nominal attribute `{name}` declares no values"),
            });
        }
        Declared::Nominal(values)
    } else {
        match ty.to_ascii_lowercase().as_str() {
            "numeric" | "real" | "integer" => Declared::Numeric,
            other => {
                return Err(IngestError::MalformedHeader {
                    line: lineno,
                    message: format!("unsupported type `{other}` for `{name}`"),
                })
            }
        }
    };
    Ok((name, declared))
}

fn is_binary_set(values: &[String]) -> bool {
    let mut v: Vec<&str> = values.iter().map(String::as_str).collect();
    v.sort_unstable();
    v.dedup();
    v == ["0", "1"]
}

fn infer_kind(
    name: &str,
    declared: Declared,
    is_class: bool,
    lineno: usize,
) -> Result<AttributeKind, IngestError> {
    match declared {
        Declared::Numeric if is_class => Err(IngestError::MalformedHeader {
            line: lineno,
            message: format!("class attribute `{name}` must be nominal yes/no"),
        }),
        Declared::Numeric => Ok(AttributeKind::Numeric),
        Declared::Nominal(values) => {
            let flags: Option<Vec<bool>> = values.iter().map(|v| parse_yes_no(v)).collect();
            let two_flags = flags.as_ref().is_some_and(|f| f.contains(&true) && f.contains(&false));
            if is_class {
                if flags.is_some() {
                    Ok(AttributeKind::ClassLabel)
                } else {
                    Err(IngestError::MalformedHeader {
                        line: lineno,
                        message: format!("class attribute `{name}` must be nominal yes/no"),
                    })
                }
            } else if is_binary_set(&values) {
                Ok(AttributeKind::BinaryScore)
            } else if two_flags {
                Ok(AttributeKind::Boolean)
            } else {
                Ok(AttributeKind::categorical(values))
            }
        }
    }
}

/// Parses ARFF text.
pub fn parse_arff(text: &str, options: &ParseOptions) -> Result<RawTable, IngestError> {
    let mut relation = String::new();
    let mut declared: Vec<(String, Declared, usize)> = Vec::new();
    let mut data_start = None;

    let mut lines = text.lines().enumerate();
    for (i, line) in lines.by_ref() {
        let lineno = i + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let (keyword, rest) = t.split_at(t.find(char::is_whitespace).unwrap_or(t.len()));
        match keyword.to_ascii_lowercase().as_str() {
            "@relation" => relation = take_name(rest, lineno)?.0,
            "@attribute" => {
                let (name, d) = parse_attribute(rest, lineno)?;
                declared.push((name, d, lineno));
            }
            "@data" => {
                data_start = Some(lineno);
                break;
            }
            _ => {
                return Err(IngestError::MalformedHeader {
                    line: lineno,
                    message: format!("unexpected header line `{t}`"),
                })
            }
        }
    }
    let Some(data_line) = data_start else {
        return Err(IngestError::MalformedHeader {
            line: text.lines().count().max(1),
            message: "no @data section".into(),
        });
    };
    if declared.is_empty() {
        return Err(IngestError::MalformedHeader {
            line: data_line,
            message: "no attributes declared".into(),
        });
    }

    let class_pos = match &options.class_attribute {
        Some(name) => declared
            .iter()
            .position(|(n, _, _)| n == name)
            .ok_or_else(|| IngestError::MalformedHeader {
                line: data_line,
                message: format!("class attribute `{name}` is not declared"),
            })?,
        None => declared
            .iter()
            .position(|(n, _, _)| n.eq_ignore_ascii_case(DEFAULT_CLASS_ATTRIBUTE))
            .unwrap_or(declared.len() - 1),
    };

    let mut schema = Vec::with_capacity(declared.len());
    for (i, (name, d, lineno)) in declared.into_iter().enumerate() {
        let kind = infer_kind(&name, d, i == class_pos, lineno)?;
        schema.push(AttributeSpec::new(name, kind));
    }

    let mut rows = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        if t.starts_with('{') {
            return Err(IngestError::MalformedHeader {
                line: lineno,
                message: "sparse data rows are not supported".into(),
            });
        }
        let tokens = split_fields(t, lineno)?;
        if tokens.len() != schema.len() {
            return Err(IngestError::Arity {
                line: lineno,
                expected: schema.len(),
                found: tokens.len(),
            });
        }
        let mut row: Vec<Cell> = Vec::with_capacity(schema.len());
        for (attr, tok) in schema.iter().zip(tokens) {
            if !tok.quoted && tok.text == "?" {
                row.push(None);
                continue;
            }
            let v = attr.kind.read(&tok.text).ok_or_else(|| IngestError::InvalidCell {
                line: lineno,
                attribute: attr.name.clone(),
                value: tok.text.clone(),
            })?;
            row.push(Some(v));
        }
        rows.push(row);
    }

    RawTable::new(relation, schema, rows)
}

fn needs_quotes(s: &str) -> bool {
    s.is_empty()
        || s == "?"
        || s
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, ',' | '\'' | '"' | '%' | '{' | '}' | '\\'))
}

fn quote(s: &str) -> String {
    if !needs_quotes(s) {
        return s.to_string();
    }
    let mut out = String::with_capacity(s.len() + 2);
    out.push('\'');
    for c in s.chars() {
        if c == '\'' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('\'');
    out
}

/// Serialises a table as ARFF. Parsing the output yields an equal table as
/// long as the class attribute is `Class/ASD` or the last column.
pub fn to_arff(table: &RawTable) -> String {
    let mut out = String::new();
    let relation = if table.relation().is_empty() {
        "data"
    } else {
        table.relation()
    };
    let _ = writeln!(out, "@relation {}", quote(relation));
    for a in table.schema() {
        let ty = match &a.kind {
            AttributeKind::BinaryScore => "{0,1}".to_string(),
            AttributeKind::Boolean => "{no,yes}".to_string(),
            AttributeKind::ClassLabel => "{NO,YES}".to_string(),
            AttributeKind::Numeric => "numeric".to_string(),
            AttributeKind::Categorical(values) => {
                let inner: Vec<String> = values.iter().map(|v| quote(v)).collect();
                format!("{{{}}}", inner.join(","))
            }
        };
        let _ = writeln!(out, "@attribute {} {}", quote(&a.name), ty);
    }
    out.push_str("@data\n");
    for row in table.rows() {
        let cells: Vec<String> = table
            .schema()
            .iter()
            .zip(row)
            .map(|(a, cell)| match cell {
                None => "?".to_string(),
                Some(Value::Number(v)) => match a.kind {
                    AttributeKind::BinaryScore => {
                        if *v == 1.0 { "1" } else { "0" }.to_string()
                    }
                    _ => format!("{v}"),
                },
                Some(Value::Flag(b)) => match (a.kind == AttributeKind::ClassLabel, b) {
                    (true, true) => "YES".to_string(),
                    (true, false) => "NO".to_string(),
                    (false, true) => "yes".to_string(),
                    (false, false) => "no".to_string(),
                },
                Some(Value::Category(c)) => quote(c),
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
