//! Canonical text form of grids, grilles and ballot papers.
//!
//! Every document is UTF-8 with LF line endings and a trailing newline. The
//! header is a fixed sequence of `key=value` lines; `rows=<n>` is followed by
//! exactly `n` row lines, which makes each document self-delimiting.
//!
//! ```text
//! kind=grid            kind=grille          kind=ballot
//! id=<decimal>         id=<decimal>         id=<decimal>
//! marks=bits|codes     marks=bits|codes     checksum=<decimal>
//! checksum=<decimal>   rows=<n>             [embellishment=<decimal>]
//! [embellishment=<d>]  <bit> | <code>       rows=<n>
//! rows=<n>                                  <name>\t<bit>
//! <name> | <name>\t<code>
//! ```
//!
//! Parsing is strict: any deviation from the canonical form is an error, so
//! serialization followed by parsing is the identity and vice versa.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use super::grid::{BallotPaper, Grid, Grille, Marks};
use super::BallotId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

impl ParseError {
    fn new(line: usize, reason: impl Into<String>) -> Self {
        Self {
            line,
            reason: reason.into(),
        }
    }
}

/// Canonical decimal: ASCII digits only, no sign, no leading zeros.
pub(crate) fn parse_decimal<T: FromStr>(s: &str, line: usize) -> Result<T, ParseError> {
    let canonical = !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) && (s == "0" || !s.starts_with('0'));
    if !canonical {
        return Err(ParseError::new(line, format!("{s:?} is not a canonical decimal")));
    }
    s.parse()
        .map_err(|_| ParseError::new(line, format!("{s:?} is out of range")))
}

fn valid_row_name(name: &str) -> bool {
    !name.contains(['\t', '\r'])
}

impl Grid {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_text(&mut out);
        out
    }

    pub(crate) fn write_text(&self, out: &mut String) {
        let marks = if self.code_numbers.is_some() { "codes" } else { "bits" };
        let _ = writeln!(
            out,
            "kind=grid\nid={}\nmarks={marks}\nchecksum={}",
            self.id, self.checksum
        );
        if let Some(e) = self.embellishment {
            let _ = writeln!(out, "embellishment={e}");
        }
        let _ = writeln!(out, "rows={}", self.names.len());
        match &self.code_numbers {
            None => {
                for name in &self.names {
                    let _ = writeln!(out, "{name}");
                }
            }
            Some(codes) => {
                for (i, name) in self.names.iter().enumerate() {
                    match codes.get(i) {
                        Some(code) => {
                            let _ = writeln!(out, "{name}\t{code}");
                        }
                        None => {
                            let _ = writeln!(out, "{name}\t");
                        }
                    }
                }
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut doc = Cursor::new(text)?;
        doc.expect_exact("kind", "grid")?;
        let grid = parse_grid_body(&mut doc)?;
        doc.finish()?;
        Ok(grid)
    }
}

fn parse_grid_body(doc: &mut Cursor<'_>) -> Result<Grid, ParseError> {
    let id = doc.expect_number::<u128>("id")?;
    let codes = match doc.expect_value("marks")? {
        "bits" => false,
        "codes" => true,
        other => return Err(ParseError::new(doc.line, format!("unknown marks {other:?}"))),
    };
    let checksum = doc.expect_number::<u64>("checksum")?;
    let embellishment = doc.optional_number::<u64>("embellishment")?;
    let rows = doc.expect_number::<usize>("rows")?;
    let mut names = Vec::new();
    let mut code_numbers = Vec::new();
    for _ in 0..rows {
        let (line, row) = doc.next_line()?;
        if codes {
            let (name, code) = row
                .split_once('\t')
                .ok_or_else(|| ParseError::new(line, "expected <name>\\t<code>"))?;
            if !valid_row_name(name) {
                return Err(ParseError::new(line, "row name contains a tab"));
            }
            names.push(name.to_string());
            code_numbers.push(parse_decimal::<u32>(code, line)?);
        } else {
            if !valid_row_name(row) {
                return Err(ParseError::new(line, "row name contains a tab"));
            }
            names.push(row.to_string());
        }
    }
    Ok(Grid {
        id: BallotId::new(id),
        names,
        checksum,
        embellishment,
        code_numbers: codes.then_some(code_numbers),
    })
}

impl Grille {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_text(&mut out);
        out
    }

    pub(crate) fn write_text(&self, out: &mut String) {
        match self.marks() {
            Marks::Bits(bits) => {
                let _ = writeln!(out, "kind=grille\nid={}\nmarks=bits\nrows={}", self.id(), bits.len());
                for b in bits {
                    out.push(if *b { '1' } else { '0' });
                    out.push('\n');
                }
            }
            Marks::Codes(codes) => {
                let _ = writeln!(out, "kind=grille\nid={}\nmarks=codes\nrows={}", self.id(), codes.len());
                for c in codes {
                    let _ = writeln!(out, "{c}");
                }
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut doc = Cursor::new(text)?;
        doc.expect_exact("kind", "grille")?;
        let grille = parse_grille_body(&mut doc)?;
        doc.finish()?;
        Ok(grille)
    }
}

fn parse_grille_body(doc: &mut Cursor<'_>) -> Result<Grille, ParseError> {
    let id = BallotId::new(doc.expect_number::<u128>("id")?);
    let marks = doc.expect_value("marks")?;
    let marks_line = doc.line;
    let rows = doc.expect_number::<usize>("rows")?;
    match marks {
        "bits" => {
            let mut bits = Vec::new();
            for _ in 0..rows {
                let (line, row) = doc.next_line()?;
                bits.push(match row {
                    "0" => false,
                    "1" => true,
                    other => return Err(ParseError::new(line, format!("mark {other:?} is not 0 or 1"))),
                });
            }
            Ok(Grille::bits(id, bits))
        }
        "codes" => {
            let mut codes: Vec<u32> = Vec::new();
            for _ in 0..rows {
                let (line, row) = doc.next_line()?;
                let code = parse_decimal::<u32>(row, line)?;
                if codes.last().is_some_and(|prev| *prev >= code) {
                    return Err(ParseError::new(line, "codes must be strictly ascending"));
                }
                codes.push(code);
            }
            Ok(Grille::codes(id, codes).expect("ascending codes are distinct"))
        }
        other => Err(ParseError::new(marks_line, format!("unknown marks {other:?}"))),
    }
}

impl BallotPaper {
    /// Single-document form with `<name>\t<bit>` rows; bit-vector papers only.
    pub fn to_text(&self) -> Option<String> {
        let bits = self.grille.as_bits()?;
        if self.grid.code_numbers.is_some() || bits.len() != self.grid.names.len() {
            return None;
        }
        let mut out = String::new();
        let _ = writeln!(out, "kind=ballot\nid={}\nchecksum={}", self.grid.id, self.grid.checksum);
        if let Some(e) = self.grid.embellishment {
            let _ = writeln!(out, "embellishment={e}");
        }
        let _ = writeln!(out, "rows={}", bits.len());
        for (name, bit) in self.grid.names.iter().zip(bits) {
            let _ = writeln!(out, "{name}\t{}", u8::from(*bit));
        }
        Some(out)
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut doc = Cursor::new(text)?;
        doc.expect_exact("kind", "ballot")?;
        let id = BallotId::new(doc.expect_number::<u128>("id")?);
        let checksum = doc.expect_number::<u64>("checksum")?;
        let embellishment = doc.optional_number::<u64>("embellishment")?;
        let rows = doc.expect_number::<usize>("rows")?;
        let mut names = Vec::new();
        let mut bits = Vec::new();
        for _ in 0..rows {
            let (line, row) = doc.next_line()?;
            let (name, bit) = row
                .rsplit_once('\t')
                .ok_or_else(|| ParseError::new(line, "expected <name>\\t<bit>"))?;
            if !valid_row_name(name) {
                return Err(ParseError::new(line, "row name contains a tab"));
            }
            names.push(name.to_string());
            bits.push(match bit {
                "0" => false,
                "1" => true,
                other => return Err(ParseError::new(line, format!("mark {other:?} is not 0 or 1"))),
            });
        }
        doc.finish()?;
        let grid = Grid {
            id,
            names,
            checksum,
            embellishment,
            code_numbers: None,
        };
        Ok(BallotPaper {
            grid,
            grille: Grille::bits(id, bits),
        })
    }
}

/// Any of the canonical documents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Grid(Grid),
    Grille(Grille),
    Ballot(BallotPaper),
}

/// Parses whichever canonical document `text` holds.
pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    let mut doc = Cursor::new(text)?;
    let parsed = match doc.expect_value("kind")? {
        "grid" => Document::Grid(parse_grid_body(&mut doc)?),
        "grille" => Document::Grille(parse_grille_body(&mut doc)?),
        "ballot" => return BallotPaper::parse(text).map(Document::Ballot),
        other => return Err(ParseError::new(1, format!("unknown kind {other:?}"))),
    };
    doc.finish()?;
    Ok(parsed)
}

struct Cursor<'a> {
    lines: std::str::Split<'a, char>,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Result<Self, ParseError> {
        let body = text
            .strip_suffix('\n')
            .ok_or_else(|| ParseError::new(text.lines().count().max(1), "missing trailing newline"))?;
        if body.contains('\r') {
            return Err(ParseError::new(0, "carriage return in document"));
        }
        Ok(Self {
            lines: body.split('\n'),
            line: 0,
        })
    }

    fn next_line(&mut self) -> Result<(usize, &'a str), ParseError> {
        self.line += 1;
        self.lines
            .next()
            .map(|l| (self.line, l))
            .ok_or_else(|| ParseError::new(self.line, "unexpected end of document"))
    }

    fn peek_key(&self) -> Option<&'a str> {
        self.lines
            .clone()
            .next()
            .and_then(|l| l.split_once('='))
            .map(|(k, _)| k)
    }

    fn expect_value(&mut self, key: &str) -> Result<&'a str, ParseError> {
        let (line, text) = self.next_line()?;
        match text.split_once('=') {
            Some((k, v)) if k == key => Ok(v),
            _ => Err(ParseError::new(line, format!("expected {key}=..."))),
        }
    }

    fn expect_exact(&mut self, key: &str, value: &str) -> Result<(), ParseError> {
        let got = self.expect_value(key)?;
        if got == value {
            Ok(())
        } else {
            Err(ParseError::new(self.line, format!("expected {key}={value}")))
        }
    }

    fn expect_number<T: FromStr>(&mut self, key: &str) -> Result<T, ParseError> {
        let v = self.expect_value(key)?;
        parse_decimal(v, self.line)
    }

    fn optional_number<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, ParseError> {
        if self.peek_key() == Some(key) {
            self.expect_number(key).map(Some)
        } else {
            Ok(None)
        }
    }

    fn finish(mut self) -> Result<(), ParseError> {
        match self.lines.next() {
            None => Ok(()),
            Some(_) => Err(ParseError::new(self.line + 1, "trailing content")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid {
            id: BallotId::new(340282366920938463463374607431768211455),
            names: vec!["Alice".into(), "x7Qd".into(), "Bob".into()],
            checksum: 2,
            embellishment: Some(4),
            code_numbers: None,
        }
    }

    #[test]
    fn grid_golden() {
        let text = grid().to_text();
        assert_eq!(
            text,
            "kind=grid\nid=340282366920938463463374607431768211455\nmarks=bits\nchecksum=2\nembellishment=4\nrows=3\nAlice\nx7Qd\nBob\n"
        );
        assert_eq!(Grid::parse(&text).unwrap(), grid());
    }

    #[test]
    fn grille_golden() {
        let g = Grille::bits(BallotId::new(17), vec![true, false, true]);
        let text = g.to_text();
        assert_eq!(text, "kind=grille\nid=17\nmarks=bits\nrows=3\n1\n0\n1\n");
        assert_eq!(Grille::parse(&text).unwrap(), g);

        let c = Grille::codes(BallotId::new(17), vec![900, 12]).unwrap();
        assert_eq!(c.to_text(), "kind=grille\nid=17\nmarks=codes\nrows=2\n12\n900\n");
        assert_eq!(Grille::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn numerical_grid_round_trip() {
        let mut g = grid();
        g.code_numbers = Some(vec![5, 0, 4294967295]);
        let text = g.to_text();
        assert!(text.contains("Alice\t5\n"));
        assert_eq!(Grid::parse(&text).unwrap(), g);
    }

    #[test]
    fn ballot_paper_golden() {
        let text = "kind=ballot\nid=5\nchecksum=1\nrows=2\nAlice\t1\nnoise\t0\n";
        let paper = BallotPaper::parse(text).unwrap();
        assert_eq!(paper.grid.names, ["Alice", "noise"]);
        assert_eq!(paper.grille.as_bits().unwrap(), [true, false]);
        assert_eq!(paper.to_text().unwrap(), text);
    }

    #[test]
    fn strictness() {
        for bad in [
            "kind=grille\nid=17\nmarks=bits\nrows=1\n2\n",
            "kind=grille\nid=017\nmarks=bits\nrows=1\n1\n",
            "kind=grille\nid=17\nmarks=bits\nrows=2\n1\n",
            "kind=grille\nid=17\nmarks=bits\nrows=1\n1\n1\n",
            "kind=grille\nid=17\nmarks=bits\nrows=1\n1",
            "kind=grille\r\nid=17\nmarks=bits\nrows=1\n1\n",
            "kind=grille\nid=-1\nmarks=bits\nrows=0\n",
            "kind=grille\nid=340282366920938463463374607431768211456\nmarks=bits\nrows=0\n",
            "kind=grille\nid=1\nmarks=codes\nrows=2\n9\n3\n",
            "HELLO WORLD",
            "",
        ] {
            assert!(Grille::parse(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn parse_document_dispatches_on_kind() {
        assert!(matches!(parse_document(&grid().to_text()), Ok(Document::Grid(_))));
        let g = Grille::bits(BallotId::new(1), vec![]);
        assert!(matches!(parse_document(&g.to_text()), Ok(Document::Grille(_))));
        assert!(parse_document("kind=poster\n").is_err());
    }
}
