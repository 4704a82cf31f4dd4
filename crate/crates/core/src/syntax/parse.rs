use super::{Formula, Term, Var};
use crate::error::{Error, Result};
use crate::hfset::HfSet;

/// Offsets in errors are 1-based character positions; end of input is `len + 1`.
enum Sexp {
    Atom(String, usize),
    Const(HfSet, usize),
    List(Vec<Sexp>, usize),
}

impl Sexp {
    fn offset(&self) -> usize {
        match self {
            Sexp::Atom(_, p) | Sexp::Const(_, p) | Sexp::List(_, p) => *p,
        }
    }
}

struct Reader<'a> {
    chars: Vec<(usize, char)>,
    text: &'a str,
    pos: usize,
}

fn err(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        offset,
        message: message.into(),
    }
}

fn is_delim(c: char) -> bool {
    c.is_whitespace() || c == '(' || c == ')' || c == '{' || c == '}'
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Reader {
            chars: text.char_indices().collect(),
            text,
            pos: 0,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.pos + 1
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn byte_pos(&self) -> usize {
        self.chars
            .get(self.pos)
            .map_or(self.text.len(), |&(b, _)| b)
    }

    fn word(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(|&c| !is_delim(c)) {
            s.push(c);
            self.pos += 1;
        }
        s
    }

    fn constant(&mut self) -> Result<HfSet> {
        let start = self.offset();
        self.pos += 1; // '#'
        if self.peek() == Some('{') {
            self.pos += 1;
            let mut elems = Vec::new();
            loop {
                self.skip_ws();
                match self.peek() {
                    Some('}') => {
                        self.pos += 1;
                        break;
                    }
                    Some('#') => elems.push(self.constant()?),
                    None => return Err(err(self.offset(), "unterminated constant literal")),
                    Some(_) => return Err(err(self.offset(), "malformed constant literal")),
                }
            }
            if self.peek().is_some_and(|c| !is_delim(c)) {
                return Err(err(self.offset(), "malformed constant literal"));
            }
            return Ok(HfSet::from_elems(elems));
        }
        let digits = self.word();
        match digits.parse::<u64>() {
            Ok(n) if digits.bytes().all(|b| b.is_ascii_digit()) => Ok(HfSet::from_code(n)),
            _ => Err(err(
                start,
                format!("malformed constant literal '#{digits}'"),
            )),
        }
    }

    fn sexp(&mut self) -> Result<Sexp> {
        self.skip_ws();
        let at = self.offset();
        match self.peek() {
            None => Err(err(at, "unbalanced expression")),
            Some(')') => Err(err(at, "unexpected ')'")),
            Some('{') | Some('}') => Err(err(at, "unexpected brace")),
            Some('(') => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        None => return Err(err(self.offset(), "unbalanced expression")),
                        Some(')') => {
                            self.pos += 1;
                            return Ok(Sexp::List(items, at));
                        }
                        _ => items.push(self.sexp()?),
                    }
                }
            }
            Some('#') => Ok(Sexp::Const(self.constant()?, at)),
            Some(_) => Ok(Sexp::Atom(self.word(), at)),
        }
    }
}

fn term(s: &Sexp) -> Result<Term> {
    match s {
        Sexp::Atom(name, _) => Ok(Term::Var(Var::new(name))),
        Sexp::Const(c, _) => Ok(Term::Const(c.clone())),
        Sexp::List(_, p) => Err(err(*p, "expected a term")),
    }
}

fn var(s: &Sexp) -> Result<Var> {
    match s {
        Sexp::Atom(name, _) => Ok(Var::new(name)),
        _ => Err(err(s.offset(), "expected a variable")),
    }
}

fn symbol(s: &Sexp) -> Result<String> {
    match s {
        Sexp::Atom(name, _) => Ok(name.clone()),
        _ => Err(err(s.offset(), "expected a symbol")),
    }
}

fn formula(s: &Sexp) -> Result<Formula> {
    let (items, at) = match s {
        Sexp::List(items, at) => (items, *at),
        other => return Err(err(other.offset(), "expected a formula")),
    };
    let Some((head, args)) = items.split_first() else {
        return Err(err(at, "empty form"));
    };
    let Sexp::Atom(head, _) = head else {
        return Err(err(head.offset(), "form head must be a symbol"));
    };
    let arity = |n: usize| -> Result<()> {
        if args.len() == n {
            Ok(())
        } else {
            Err(err(
                at,
                format!("'{head}' takes {n} argument(s), got {}", args.len()),
            ))
        }
    };
    match head.as_str() {
        "mem" => {
            arity(2)?;
            Ok(Formula::mem(term(&args[0])?, term(&args[1])?))
        }
        "eq" => {
            arity(2)?;
            Ok(Formula::equals(term(&args[0])?, term(&args[1])?))
        }
        "pred" => {
            arity(2)?;
            Ok(Formula::pred(&symbol(&args[0])?, term(&args[1])?))
        }
        "prov" => {
            arity(2)?;
            Ok(Formula::prov(&symbol(&args[0])?, formula(&args[1])?))
        }
        "not" => {
            arity(1)?;
            Ok(Formula::not(formula(&args[0])?))
        }
        "or" | "and" | "imp" | "iff" => {
            arity(2)?;
            let (a, b) = (formula(&args[0])?, formula(&args[1])?);
            Ok(match head.as_str() {
                "or" => Formula::or(a, b),
                "and" => Formula::and(a, b),
                "imp" => Formula::implies(a, b),
                _ => Formula::iff(a, b),
            })
        }
        "ex" | "all" => {
            arity(2)?;
            let (v, a) = (var(&args[0])?, formula(&args[1])?);
            Ok(if head == "ex" {
                Formula::exists(v, a)
            } else {
                Formula::forall(v, a)
            })
        }
        "ex-in" | "all-in" => {
            arity(3)?;
            let (v, w, a) = (var(&args[0])?, term(&args[1])?, formula(&args[2])?);
            if w.as_var() == Some(&v) {
                return Err(err(
                    args[1].offset(),
                    "bound variable used as its own bound",
                ));
            }
            Ok(if head == "ex-in" {
                Formula::exists_in(v, w, a)
            } else {
                Formula::forall_in(v, w, a)
            })
        }
        other => Err(err(at, format!("unknown form '{other}'"))),
    }
}

/// Parses one formula; the whole input must be consumed.
pub fn parse(text: &str) -> Result<Formula> {
    let (f, used) = parse_prefix(text)?;
    let rest = &text[used..];
    if let Some(i) = rest.find(|c: char| !c.is_whitespace()) {
        let offset = text[..used + i].chars().count() + 1;
        return Err(err(offset, "trailing input"));
    }
    Ok(f)
}

/// Parses one formula from the start of `text`, returning it with the number of bytes read.
pub fn parse_prefix(text: &str) -> Result<(Formula, usize)> {
    let mut r = Reader::new(text);
    let s = r.sexp()?;
    Ok((formula(&s)?, r.byte_pos()))
}
