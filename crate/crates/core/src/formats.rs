//! Line-oriented text formats.
//!
//! Models (`.rsys`) hold one reaction per line as three comma-separated
//! fields of whitespace-separated entity names:
//!
//! ```text
//! # reactants , inhibitors , products
//! a b, c, a b
//! a, b c, d
//! d, c, b
//! ```
//!
//! Entities are numbered in order of first appearance. A line of the form
//! `#@entities x y z` declares entities ahead of their use, which lets a
//! model fix the id order or include entities no reaction mentions. To any
//! other reader it is an ordinary comment.
//!
//! Contexts (`.ctx`) and trajectories (`.traj`) hold one state per line,
//! names in id order, with `.` standing for the empty set. Blank lines and
//! `#` comments are skipped everywhere. LF and CRLF are accepted, LF is
//! written.

use std::collections::HashMap;

use thiserror::Error;

use crate::error::{Field, ModelError};
use crate::state::State;
use crate::system::{ContextSequence, Reaction, ReactionSystem, Strictness, Trajectory};

pub const ENTITIES_PRAGMA: &str = "#@entities";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected 3 comma-separated fields, found {0}")]
    FieldCount(usize),
    #[error("{0} field is empty")]
    EmptyField(Field),
    #[error("entity `{name}` listed twice in {field}")]
    DuplicateEntity { field: Field, name: String },
    #[error("entity `{0}` is both a reactant and an inhibitor")]
    Overlap(String),
    #[error("entity `{0}` declared twice")]
    DuplicateDeclaration(String),
    #[error("`{0}` is not a valid entity name")]
    InvalidName(String),
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("`.` must stand alone on its line")]
    MixedEmptyMarker,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A parse failure with a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

/// Text before any `#`.
fn split_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Whitespace-separated tokens with their 1-based character columns, given
/// the character offset of `s` within its line.
fn tokens(s: &str, char_offset: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    let mut col = char_offset;
    for (byte, ch) in s.char_indices() {
        col += 1;
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some((byte, col)),
            (true, Some((b, c))) => {
                out.push((c, &s[b..byte]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some((b, c)) = start {
        out.push((c, &s[b..]));
    }
    out
}

struct Interner {
    names: Vec<String>,
    ids: HashMap<String, usize>,
}

impl Interner {
    fn intern(&mut self, name: &str) -> usize {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        id
    }
}

fn pragma_body(line: &str) -> Option<&str> {
    let trimmed = line.trim_start();
    let rest = trimmed.strip_prefix(ENTITIES_PRAGMA)?;
    if rest.is_empty() || rest.starts_with(char::is_whitespace) {
        Some(rest)
    } else {
        None
    }
}

/// Parses a model document into a reaction system.
pub fn parse_model(doc: &str, mode: Strictness) -> Result<ReactionSystem, ParseError> {
    let mut interner = Interner {
        names: Vec::new(),
        ids: HashMap::new(),
    };
    let mut reactions = Vec::new();

    for (lineno, raw) in doc.lines().enumerate() {
        let line_no = lineno + 1;
        let err = |column, kind| ParseError {
            line: line_no,
            column,
            kind,
        };

        if let Some(body) = pragma_body(raw) {
            let offset = raw.chars().count() - body.chars().count();
            let mut seen = Vec::new();
            for (col, name) in tokens(body, offset) {
                if name == "." {
                    return Err(err(col, ParseErrorKind::InvalidName(name.into())));
                }
                if seen.contains(&name) {
                    return Err(err(col, ParseErrorKind::DuplicateDeclaration(name.into())));
                }
                seen.push(name);
                interner.intern(name);
            }
            continue;
        }

        let content = split_comment(raw);
        if content.trim().is_empty() {
            continue;
        }

        let mut fields: Vec<(usize, &str)> = Vec::with_capacity(3);
        let mut char_pos = 0;
        let mut field_start = 0;
        let mut field_char_start = 0;
        for (byte, ch) in content.char_indices() {
            if ch == ',' {
                fields.push((field_char_start, &content[field_start..byte]));
                if fields.len() == 3 {
                    return Err(err(char_pos + 1, ParseErrorKind::FieldCount(fields.len() + 1)));
                }
                field_start = byte + 1;
                field_char_start = char_pos + 1;
            }
            char_pos += 1;
        }
        fields.push((field_char_start, &content[field_start..]));
        if fields.len() != 3 {
            return Err(err(char_pos + 1, ParseErrorKind::FieldCount(fields.len())));
        }

        let mut sets: [Vec<usize>; 3] = Default::default();
        for (k, (field, (offset, text))) in [Field::Reactants, Field::Inhibitors, Field::Products]
            .into_iter()
            .zip(fields)
            .enumerate()
        {
            let toks = tokens(text, offset);
            let empty_ok = field == Field::Inhibitors && mode == Strictness::AllowEmptyInhibitors;
            if toks.is_empty() && !empty_ok {
                return Err(err(offset + 1, ParseErrorKind::EmptyField(field)));
            }
            for (col, name) in toks {
                if name == "." {
                    return Err(err(col, ParseErrorKind::InvalidName(name.into())));
                }
                let id = interner.intern(name);
                if sets[k].contains(&id) {
                    return Err(err(
                        col,
                        ParseErrorKind::DuplicateEntity {
                            field,
                            name: name.into(),
                        },
                    ));
                }
                if field == Field::Inhibitors && sets[0].contains(&id) {
                    return Err(err(col, ParseErrorKind::Overlap(name.into())));
                }
                sets[k].push(id);
            }
        }
        let [r, i, p] = sets;
        reactions.push((line_no, Reaction::new(r, i, p)));
    }

    let (lines, reactions): (Vec<usize>, Vec<Reaction>) = reactions.into_iter().unzip();
    ReactionSystem::new(interner.names, reactions, mode).map_err(|e| {
        let line = match &e {
            ModelError::EmptyField { reaction, .. }
            | ModelError::Overlap { reaction, .. }
            | ModelError::EntityOutOfRange { reaction, .. } => lines[*reaction],
            _ => 0,
        };
        ParseError {
            line,
            column: 1,
            kind: e.into(),
        }
    })
}

fn write_names(out: &mut String, sys: &ReactionSystem, ids: impl Iterator<Item = usize>) {
    let mut first = true;
    for id in ids {
        if !first {
            out.push(' ');
        }
        out.push_str(&sys.entity_names()[id]);
        first = false;
    }
}

/// Renders a model. The entities pragma is emitted only when the reactions
/// alone would not reproduce the system's id order.
pub fn write_model(sys: &ReactionSystem) -> String {
    let mut order = Vec::with_capacity(sys.n_entities());
    let mut seen = vec![false; sys.n_entities()];
    for r in sys.reactions() {
        for e in r
            .reactants()
            .iter()
            .chain(r.inhibitors())
            .chain(r.products())
        {
            if !seen[e.index()] {
                seen[e.index()] = true;
                order.push(e.index());
            }
        }
    }
    let needs_pragma =
        order.len() != sys.n_entities() || order.iter().enumerate().any(|(i, &e)| i != e);

    let mut out = String::new();
    if needs_pragma {
        out.push_str(ENTITIES_PRAGMA);
        for name in sys.entity_names() {
            out.push(' ');
            out.push_str(name);
        }
        out.push('\n');
    }
    for r in sys.reactions() {
        write_names(&mut out, sys, r.reactants().iter().map(|e| e.index()));
        out.push_str(", ");
        write_names(&mut out, sys, r.inhibitors().iter().map(|e| e.index()));
        out.push_str(", ");
        write_names(&mut out, sys, r.products().iter().map(|e| e.index()));
        out.push('\n');
    }
    out
}

/// Parses one-state-per-line text against the entities of `sys`.
pub fn parse_states(doc: &str, sys: &ReactionSystem) -> Result<Vec<State>, ParseError> {
    let mut states = Vec::new();
    for (lineno, raw) in doc.lines().enumerate() {
        let content = split_comment(raw);
        let toks = tokens(content, 0);
        if toks.is_empty() {
            continue;
        }
        let err = |column, kind| ParseError {
            line: lineno + 1,
            column,
            kind,
        };
        let mut s = sys.empty_state();
        if toks.len() == 1 && toks[0].1 == "." {
            states.push(s);
            continue;
        }
        for (col, name) in toks {
            if name == "." {
                return Err(err(col, ParseErrorKind::MixedEmptyMarker));
            }
            match sys.entity_id(name) {
                Some(id) => s.insert(id.index()),
                None => return Err(err(col, ParseErrorKind::UnknownEntity(name.into()))),
            }
        }
        states.push(s);
    }
    Ok(states)
}

pub fn parse_context(doc: &str, sys: &ReactionSystem) -> Result<ContextSequence, ParseError> {
    let states = parse_states(doc, sys)?;
    Ok(ContextSequence::new(sys.n_entities(), states).expect("states built at system width"))
}

/// Reads a trajectory file back into its states.
pub fn parse_trajectory(doc: &str, sys: &ReactionSystem) -> Result<Vec<State>, ParseError> {
    parse_states(doc, sys)
}

/// One line per state: names in id order, `.` for the empty set.
pub fn write_states<'a, I: IntoIterator<Item = &'a State>>(states: I, sys: &ReactionSystem) -> String {
    let mut out = String::new();
    for s in states {
        if s.is_empty() {
            out.push('.');
        } else {
            write_names(&mut out, sys, s.ones());
        }
        out.push('\n');
    }
    out
}

pub fn write_context(ctx: &ContextSequence, sys: &ReactionSystem) -> String {
    write_states(ctx.steps(), sys)
}

pub fn write_trajectory(tr: &Trajectory, sys: &ReactionSystem) -> String {
    write_states(tr.states(), sys)
}

/// `|S|x|A|xalpha` label for generated models.
pub fn size_label(n_entities: usize, n_reactions: usize, alpha: f64) -> String {
    format!("{n_entities}x{n_reactions}x{alpha}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, DirectEngine};

    const EXAMPLE: &str = "a b, c, a b\na, b c, d\nd, c, b";

    #[test]
    fn parses_example_model() {
        let sys = parse_model(EXAMPLE, Strictness::Strict).unwrap();
        assert_eq!(sys, ReactionSystem::example());
        assert_eq!(sys.entity_names(), &["a", "b", "c", "d"]);
    }

    #[test]
    fn minimal_model() {
        let sys = parse_model("x, y, x", Strictness::Strict).unwrap();
        assert_eq!(sys.n_reactions(), 1);
        assert_eq!(sys.entity_names(), &["x", "y"]);
    }

    #[test]
    fn comments_blank_lines_crlf() {
        let doc = "# header\r\n\r\na b, c, a b # r1\r\n  \r\na, b c, d\r\nd, c, b\r\n";
        assert_eq!(parse_model(doc, Strictness::Strict).unwrap(), ReactionSystem::example());
    }

    #[test]
    fn overlap_rejected() {
        let e = parse_model("a, a, b", Strictness::Strict).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Overlap("a".into()));
        assert_eq!((e.line, e.column), (1, 4));
    }

    #[test]
    fn empty_fields() {
        let e = parse_model("x, y, x\n a, , b", Strictness::Strict).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::EmptyField(Field::Inhibitors));
        assert_eq!(e.line, 2);
        let sys = parse_model("a, , b", Strictness::AllowEmptyInhibitors).unwrap();
        assert!(sys.reactions()[0].inhibitors().is_empty());
        let e = parse_model(", b, c", Strictness::AllowEmptyInhibitors).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::EmptyField(Field::Reactants));
        let e = parse_model("a, b,  ", Strictness::AllowEmptyInhibitors).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::EmptyField(Field::Products));
    }

    #[test]
    fn duplicate_in_field() {
        let e = parse_model("a a, b, c", Strictness::Strict).unwrap_err();
        assert_eq!(
            e.kind,
            ParseErrorKind::DuplicateEntity { field: Field::Reactants, name: "a".into() }
        );
        assert_eq!(e.column, 3);
        // the same entity in reactants and products is fine
        assert!(parse_model("a, b, a", Strictness::Strict).is_ok());
    }

    #[test]
    fn field_count_errors_cite_column() {
        let e = parse_model("a, b", Strictness::Strict).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::FieldCount(2));
        assert_eq!((e.line, e.column), (1, 5));
        let e = parse_model("a, b, c, d", Strictness::Strict).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::FieldCount(4));
        assert_eq!(e.column, 8);
    }

    #[test]
    fn dot_is_not_an_entity() {
        let e = parse_model("., b, c", Strictness::Strict).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::InvalidName(".".into()));
    }

    #[test]
    fn pragma_fixes_order_and_adds_unused_entities() {
        let sys = parse_model("#@entities z q\nq, z, w", Strictness::Strict).unwrap();
        assert_eq!(sys.entity_names(), &["z", "q", "w"]);
        let e = parse_model("#@entities z z\n", Strictness::Strict).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateDeclaration("z".into()));
        // not the pragma: an ordinary comment
        let sys = parse_model("#@entitiesx y\nx, y, x", Strictness::Strict).unwrap();
        assert_eq!(sys.entity_names(), &["x", "y"]);
    }

    #[test]
    fn write_model_golden_and_pragma() {
        let sys = ReactionSystem::example();
        assert_eq!(write_model(&sys), "a b, c, a b\na, b c, d\nd, c, b\n");
        let sys = parse_model("#@entities z q\nq, z, w", Strictness::Strict).unwrap();
        let text = write_model(&sys);
        assert_eq!(text, "#@entities z q w\nq, z, w\n");
        assert_eq!(parse_model(&text, Strictness::Strict).unwrap(), sys);
    }

    #[test]
    fn contexts() {
        let sys = ReactionSystem::example();
        let ctx = parse_context("b d\n.", &sys).unwrap();
        assert_eq!(ctx.steps(), &[sys.state_of(["b", "d"]).unwrap(), sys.empty_state()]);
        assert!(parse_context("", &sys).unwrap().is_empty());
        let e = parse_context("a\nz", &sys).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownEntity("z".into()));
        assert_eq!(e.line, 2);
        let e = parse_context("a .", &sys).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MixedEmptyMarker);
        assert_eq!(write_context(&ctx, &sys), "b d\n.\n");
    }

    #[test]
    fn trajectory_text() {
        let sys = ReactionSystem::example();
        let ctx = parse_context("b d\n.", &sys).unwrap();
        let tr = run(&mut DirectEngine::compile(&sys), &ctx).unwrap();
        let text = write_trajectory(&tr, &sys);
        assert_eq!(text, ".\nb\n.\n");
        assert_eq!(parse_trajectory(&text, &sys).unwrap(), tr.states());
        let full = State::full(4);
        assert_eq!(write_states([&full], &sys), "a b c d\n");
    }

    #[test]
    fn label() {
        assert_eq!(size_label(1000, 1000, 0.1), "1000x1000x0.1");
    }
}
