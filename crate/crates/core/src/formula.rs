//! Intuitionistic propositional formulas over an ordered variable context.
//!
//! Concrete syntax (ASCII):
//!
//! ```text
//! form := imp
//! imp  := or ("->" imp)?
//! or   := and ("|" and)*
//! and  := neg ("&" neg)*
//! neg  := "~" neg | atom
//! atom := "false" | "true" | ident | "(" form ")"
//! ```
//!
//! `~a` is sugar for `a -> false`. Printing uses the minimal number of
//! parentheses for that grammar, so `parse(print(f)) == f` structurally.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Ordered propositional variables. Position `k` is bit `k` of a color.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct VarContext {
    names: Vec<String>,
}

impl VarContext {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut ctx = VarContext::default();
        for name in names {
            ctx.push(name.into())?;
        }
        Ok(ctx)
    }

    /// `p1, ..., pn`.
    pub fn standard(n: usize) -> Self {
        VarContext {
            names: (1..=n).map(|i| format!("p{i}")).collect(),
        }
    }

    pub fn push(&mut self, name: String) -> Result<usize> {
        if self.names.contains(&name) {
            return Err(Error::DuplicateVariable(name));
        }
        if self.names.len() == 64 {
            return Err(Error::TooManyVariables(65));
        }
        self.names.push(name);
        Ok(self.names.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.names.get(index).map(String::as_str)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Bot,
    Top,
    Var(usize),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Impl(Arc<Formula>, Arc<Formula>),
}

use Formula::*;

impl Formula {
    pub fn var(index: usize) -> Self {
        Var(index)
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Or(Arc::new(a), Arc::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Impl(Arc::new(a), Arc::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Self {
        Formula::implies(a, Bot)
    }

    /// `(a -> b) & (b -> a)`.
    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        )
    }

    /// Left-folded conjunction; the empty conjunction is `Top`.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Self {
        items.into_iter().reduce(Formula::and).unwrap_or(Top)
    }

    /// Left-folded disjunction; the empty disjunction is `Bot`.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Self {
        items.into_iter().reduce(Formula::or).unwrap_or(Bot)
    }

    pub fn is_implication_free(&self) -> bool {
        match self {
            Bot | Top | Var(_) => true,
            And(a, b) | Or(a, b) => a.is_implication_free() && b.is_implication_free(),
            Impl(..) => false,
        }
    }

    /// No implication occurs inside the antecedent of another implication.
    pub fn is_nnil(&self) -> bool {
        match self {
            Bot | Top | Var(_) => true,
            And(a, b) | Or(a, b) => a.is_nnil() && b.is_nnil(),
            Impl(a, b) => a.is_implication_free() && b.is_nnil(),
        }
    }

    /// Matches `φ := ⊥ | ⊤ | p | φ∧φ | φ∨φ | p→φ`.
    pub fn is_nnil_normal_form(&self) -> bool {
        match self {
            Bot | Top | Var(_) => true,
            And(a, b) | Or(a, b) => a.is_nnil_normal_form() && b.is_nnil_normal_form(),
            Impl(a, b) => matches!(**a, Var(_)) && b.is_nnil_normal_form(),
        }
    }

    /// Number of implications nested to the left, minus one; zero for
    /// implication-free formulas. NNIL formulas are exactly those with
    /// nesting zero.
    pub fn left_nesting(&self) -> usize {
        self.left_chain().saturating_sub(1)
    }

    // Longest chain of implications each sitting in the antecedent of the
    // previous one.
    fn left_chain(&self) -> usize {
        match self {
            Bot | Top | Var(_) => 0,
            And(a, b) | Or(a, b) => a.left_chain().max(b.left_chain()),
            Impl(a, b) => (a.left_chain() + 1).max(b.left_chain()),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Bot | Top | Var(_) => 0,
            And(a, b) | Or(a, b) | Impl(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Bot | Top | Var(_) => 1,
            And(a, b) | Or(a, b) | Impl(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Bot | Top => {}
            Var(i) => {
                out.insert(*i);
            }
            And(a, b) | Or(a, b) | Impl(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn max_var(&self) -> Option<usize> {
        self.vars().into_iter().next_back()
    }

    /// Fails when a variable index falls outside `ctx`.
    pub fn check_context(&self, ctx: &VarContext) -> Result<()> {
        match self.max_var() {
            Some(i) if i >= ctx.len() => Err(Error::VariableOutOfRange {
                index: i,
                len: ctx.len(),
            }),
            _ => Ok(()),
        }
    }

    pub fn display<'a>(&'a self, ctx: &'a VarContext) -> Printed<'a> {
        Printed { f: self, ctx }
    }

    /// Prints with `ctx` names; variables outside `ctx` print as `p{k+1}`.
    pub fn print(&self, ctx: &VarContext) -> String {
        self.display(ctx).to_string()
    }
}

/// Rewrites a NNIL formula so every implication has an atomic antecedent.
///
/// Applied innermost-first until nothing changes:
/// `(a∧b)→c ⇒ a→(b→c)`, `(a∨b)→c ⇒ (a→c)∧(b→c)`, `⊥→c ⇒ ⊤`, `⊤→c ⇒ c`.
pub fn to_nnil_normal_form(f: &Formula) -> Result<Formula> {
    if !f.is_nnil() {
        return Err(Error::NotNnil(f.print(&VarContext::default())));
    }
    Ok(normalize(f))
}

fn normalize(f: &Formula) -> Formula {
    match f {
        Bot | Top | Var(_) => f.clone(),
        And(a, b) => Formula::and(normalize(a), normalize(b)),
        Or(a, b) => Formula::or(normalize(a), normalize(b)),
        Impl(a, b) => implication_nf(a, normalize(b)),
    }
}

fn implication_nf(antecedent: &Formula, consequent: Formula) -> Formula {
    match antecedent {
        Bot => Top,
        Top => consequent,
        Var(_) => Formula::implies(antecedent.clone(), consequent),
        And(x, y) => implication_nf(x, implication_nf(y, consequent)),
        Or(x, y) => Formula::and(
            implication_nf(x, consequent.clone()),
            implication_nf(y, consequent),
        ),
        Impl(..) => unreachable!("antecedent of a NNIL implication is implication-free"),
    }
}

pub struct Printed<'a> {
    f: &'a Formula,
    ctx: &'a VarContext,
}

const PREC_IMPL: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_ATOM: u8 = 4;

impl Printed<'_> {
    fn write(&self, f: &Formula, required: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let own = match f {
            Bot | Top | Var(_) => PREC_ATOM,
            Impl(_, b) if **b == Bot => PREC_ATOM,
            Impl(..) => PREC_IMPL,
            Or(..) => PREC_OR,
            And(..) => PREC_AND,
        };
        let wrap = own < required;
        if wrap {
            out.write_str("(")?;
        }
        match f {
            Bot => out.write_str("false")?,
            Top => out.write_str("true")?,
            Var(i) => match self.ctx.name(*i) {
                Some(name) => out.write_str(name)?,
                None => write!(out, "p{}", i + 1)?,
            },
            Impl(a, b) if **b == Bot => {
                out.write_str("~")?;
                self.write(a, PREC_ATOM, out)?;
            }
            Impl(a, b) => {
                self.write(a, PREC_OR, out)?;
                out.write_str(" -> ")?;
                self.write(b, PREC_IMPL, out)?;
            }
            Or(a, b) => {
                self.write(a, PREC_OR, out)?;
                out.write_str(" | ")?;
                self.write(b, PREC_AND, out)?;
            }
            And(a, b) => {
                self.write(a, PREC_AND, out)?;
                out.write_str(" & ")?;
                self.write(b, PREC_ATOM, out)?;
            }
        }
        if wrap {
            out.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Printed<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.f, PREC_IMPL, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Arrow,
    Or,
    And,
    Not,
    LParen,
    RParen,
    False,
    True,
    Ident(String),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Arrow => f.write_str("`->`"),
            Tok::Or => f.write_str("`|`"),
            Tok::And => f.write_str("`&`"),
            Tok::Not => f.write_str("`~`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::False => f.write_str("`false`"),
            Tok::True => f.write_str("`true`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i + 1;
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => toks.push((Tok::LParen, start)),
            ')' => toks.push((Tok::RParen, start)),
            '&' => toks.push((Tok::And, start)),
            '|' => toks.push((Tok::Or, start)),
            '~' => toks.push((Tok::Not, start)),
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    toks.push((Tok::Arrow, start));
                    i += 1;
                } else {
                    return Err(Error::Syntax {
                        offset: start,
                        message: "expected `->`".into(),
                    });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = match word.as_str() {
                    "false" => Tok::False,
                    "true" => Tok::True,
                    _ => Tok::Ident(word),
                };
                toks.push((tok, start));
                i = j;
                continue;
            }
            other => {
                return Err(Error::Syntax {
                    offset: start,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
        i += 1;
    }
    toks.push((Tok::End, chars.len() + 1));
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    ctx: ParseContext<'a>,
}

enum ParseContext<'a> {
    Fixed(&'a VarContext),
    Growing(VarContext),
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> Error {
        Error::Syntax {
            offset: self.offset(),
            message: format!("expected {expected}, found {}", self.peek()),
        }
    }

    fn form(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.form()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut acc = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            acc = Formula::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut acc = self.negation()?;
        while *self.peek() == Tok::And {
            self.bump();
            acc = Formula::and(acc, self.negation()?);
        }
        Ok(acc)
    }

    fn negation(&mut self) -> Result<Formula> {
        if *self.peek() == Tok::Not {
            self.bump();
            return Ok(Formula::not(self.negation()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::False => {
                self.bump();
                Ok(Bot)
            }
            Tok::True => {
                self.bump();
                Ok(Top)
            }
            Tok::Ident(name) => {
                self.bump();
                self.variable(name)
            }
            Tok::LParen => {
                self.bump();
                let inner = self.form()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn variable(&mut self, name: String) -> Result<Formula> {
        match &mut self.ctx {
            ParseContext::Fixed(ctx) => ctx
                .index_of(&name)
                .map(Var)
                .ok_or(Error::UnknownVariable(name)),
            ParseContext::Growing(ctx) => match ctx.index_of(&name) {
                Some(i) => Ok(Var(i)),
                None => ctx.push(name).map(Var),
            },
        }
    }

    fn finish(&mut self, f: Formula) -> Result<Formula> {
        if *self.peek() != Tok::End {
            return Err(self.unexpected("end of input"));
        }
        Ok(f)
    }
}

/// Parses `text` against a fixed context; unknown identifiers are errors.
pub fn parse(text: &str, ctx: &VarContext) -> Result<Formula> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        ctx: ParseContext::Fixed(ctx),
    };
    let f = p.form()?;
    p.finish(f)
}

/// Parses `text`, extending `base` with new identifiers in order of first
/// occurrence.
pub fn parse_extending(text: &str, base: VarContext) -> Result<(Formula, VarContext)> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        ctx: ParseContext::Growing(base),
    };
    let f = p.form()?;
    let f = p.finish(f)?;
    match p.ctx {
        ParseContext::Growing(ctx) => Ok((f, ctx)),
        ParseContext::Fixed(_) => unreachable!(),
    }
}
