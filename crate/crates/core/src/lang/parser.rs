// Grammar (LL(1), keyword-block form):
//
// model_file   -> 'model' NAME '{' model_item* '}' EOF
// model_item   -> 'kind' ':' IDENT
//               | '@common'
//               | element
//               | 'group' NAME '{' element* '}'
//               | schema
// element      -> ('topic' | 'service' | 'action' | 'parameter') NAME '{' attr* '}'
// attr         -> 'obligation' ':' IDENT | 'category' ':' IDENT | 'direction' ':' IDENT
//               | 'schema' ':' NAME | 'requires' ':' 'group' | 'type' ':' type
//               | 'unit' STRING | 'default' ':' literal
//               | 'value' ':' literal | 'path' ':' STRING          (descriptors only)
// schema       -> 'message' NAME record
//               | 'srv' NAME '{' 'request' record 'response' record '}'
//               | 'action_schema' NAME '{' 'goal' record 'result' record 'feedback' record '}'
// record       -> '{' ('field' NAME ':' type ('unit' STRING)?
//                     | 'constant' NAME ':' IDENT 'value' ':' literal)* '}'
// type         -> IDENT ('[' NUMBER? ']')?
// literal      -> NUMBER | STRING | 'true' | 'false'
//
// descriptor_file -> 'descriptor' NAME '{' desc_item* '}' EOF
// desc_item    -> 'kind' ':' IDENT | '@common' | element | schema
//               | 'identity' '{' (('vendor' | 'product' | 'instance') ':' TOKEN)* '}'
//
// On a syntax error the parser skips to the next item keyword at model
// level, always consuming at least one token.

use std::collections::HashSet;

use crate::descriptor::{ClaimedElement, ModuleDescriptor, ParsedDescriptor};
use crate::diag::{Code, Diagnostic, Locus, Span};
use crate::model::{
    common_requirements, validate_model, ActionSchema, ComponentModel, ConstantDef, DeviceKind,
    Direction, ElementCategory, ElementKind, FieldDef, FieldType, HexToken, Identity, InterfaceElement, Literal,
    Obligation, OptionalGroup, ParamSpec, Primitive, Record, Schema, ServiceSchema,
};
use crate::naming::{is_pascal_case, is_snake_case};

use super::lexer::{Keyword, Lexer, Token, TokenKind};
use super::{ParsedModel, SourceFile, SpanMap};

type PResult<T> = Result<T, ()>;

#[derive(Debug, Default)]
struct Attrs {
    obligation: Option<(Obligation, Span)>,
    category: Option<(ElementCategory, Span)>,
    direction: Option<(Direction, Span)>,
    schema: Option<(String, Span)>,
    requires: Option<Span>,
    ty: Option<(FieldType, Span)>,
    unit: Option<(String, Span)>,
    default: Option<(Literal, Span)>,
    value: Option<(Literal, Span)>,
    path: Option<(String, Span)>,
}

impl Attrs {
    /// Attributes that are set, with their names and spans.
    fn present(&self) -> Vec<(&'static str, Span)> {
        let mut out = Vec::new();
        macro_rules! push {
            ($($field:ident => $name:literal),*) => {
                $(if let Some(v) = &self.$field { out.push(($name, span_of(v))); })*
            };
        }
        push!(obligation => "obligation", category => "category", direction => "direction", schema => "schema",
              ty => "type", unit => "unit", default => "default", value => "value", path => "path");
        if let Some(span) = self.requires {
            out.push(("requires", span));
        }
        out
    }
}

trait HasSpan {
    fn span(&self) -> Span;
}

impl<T> HasSpan for (T, Span) {
    fn span(&self) -> Span {
        self.1
    }
}

fn span_of<T: HasSpan>(v: &T) -> Span {
    v.span()
}

struct RawElement {
    kind: ElementKind,
    name: String,
    attrs: Attrs,
    span: Span,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Model,
    Descriptor,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    depth: usize,
    diags: Vec<Diagnostic>,
    spans: SpanMap,
    mode: Mode,
}

impl Parser {
    fn new(source: &SourceFile, mode: Mode) -> Self {
        let mut tokens = Vec::new();
        let mut diags = Vec::new();
        for item in Lexer::new(source) {
            match item {
                Ok(tok) => tokens.push(tok),
                Err(diag) => diags.push(diag),
            }
        }
        Parser { tokens, pos: 0, depth: 0, diags, spans: SpanMap::default(), mode }
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_kind(&self) -> &TokenKind {
        &self.peek().kind
    }

    fn at_eof(&self) -> bool {
        *self.peek_kind() == TokenKind::Eof
    }

    fn bump(&mut self) -> Token {
        let tok = self.peek().clone();
        match tok.kind {
            TokenKind::LBrace => self.depth += 1,
            TokenKind::RBrace => self.depth = self.depth.saturating_sub(1),
            _ => {}
        }
        if !self.at_eof() {
            self.pos += 1;
        }
        tok
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn error(&mut self, code: Code, message: impl Into<String>, span: Span) {
        self.diags.push(Diagnostic::error(code, message, span));
    }

    fn unexpected<T>(&mut self, expected: &str) -> PResult<T> {
        let tok = self.peek().clone();
        self.error(Code::E_UNEXPECTED_TOKEN, format!("expected {expected}, found {}", tok.kind), tok.span);
        Err(())
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek_kind() == kind {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> PResult<Span> {
        if *self.peek_kind() == kind {
            Ok(self.bump().span)
        } else {
            self.unexpected(what)
        }
    }

    fn is_keyword(&self, kw: Keyword) -> bool {
        *self.peek_kind() == TokenKind::Keyword(kw)
    }

    fn is_ident(&self, word: &str) -> bool {
        matches!(self.peek_kind(), TokenKind::Ident(s) if s == word)
    }

    /// Any identifier-like token, keywords included.
    fn name(&mut self, what: &str) -> PResult<(String, Span)> {
        match self.peek_kind().word_text() {
            Some(text) => {
                let text = text.to_string();
                Ok((text, self.bump().span))
            }
            None => self.unexpected(what),
        }
    }

    fn expect_word(&mut self, word: &str) -> PResult<Span> {
        if self.is_ident(word) {
            Ok(self.bump().span)
        } else {
            self.unexpected(&format!("`{word}`"))
        }
    }

    fn is_item_start(&self) -> bool {
        match self.peek_kind() {
            TokenKind::Keyword(kw) => matches!(
                kw,
                Keyword::Kind
                    | Keyword::Topic
                    | Keyword::Service
                    | Keyword::Action
                    | Keyword::Parameter
                    | Keyword::Group
                    | Keyword::Message
                    | Keyword::Srv
                    | Keyword::ActionSchema
            ),
            TokenKind::Directive(_) => true,
            TokenKind::Ident(s) => self.mode == Mode::Descriptor && s == "identity",
            _ => false,
        }
    }

    /// Skips to the next model-level item (or the model's closing brace).
    fn recover(&mut self, item_start: usize, item_depth: usize) {
        if self.pos == item_start {
            self.bump();
        }
        while !self.at_eof() {
            if self.depth == item_depth && (self.is_item_start() || *self.peek_kind() == TokenKind::RBrace) {
                return;
            }
            if self.depth < item_depth {
                return;
            }
            self.bump();
        }
    }

    fn enum_value<T: std::str::FromStr>(&mut self, what: &str, allowed: &[&str]) -> PResult<(T, Span)> {
        let (text, span) = self.name(what)?;
        match text.parse::<T>() {
            Ok(v) => Ok((v, span)),
            Err(_) => {
                self.error(
                    Code::E_INVALID_VALUE,
                    format!("`{text}` is not a valid {what}; expected one of {}", allowed.join(", ")),
                    span,
                );
                Err(())
            }
        }
    }

    fn literal(&mut self) -> PResult<(Literal, Span)> {
        let tok = self.peek().clone();
        let lit = match &tok.kind {
            TokenKind::Number(n) => Literal::Number(n.clone()),
            TokenKind::Str(s) => Literal::Str(s.clone()),
            TokenKind::Ident(s) if s == "true" => Literal::Bool(true),
            TokenKind::Ident(s) if s == "false" => Literal::Bool(false),
            _ => return self.unexpected("a literal"),
        };
        self.bump();
        Ok((lit, tok.span))
    }

    fn string(&mut self, what: &str) -> PResult<(String, Span)> {
        let tok = self.peek().clone();
        match tok.kind {
            TokenKind::Str(s) => {
                self.bump();
                Ok((s, tok.span))
            }
            _ => self.unexpected(what),
        }
    }

    fn type_expr(&mut self) -> PResult<(FieldType, Span)> {
        let (name, start) = self.name("a type")?;
        let mut span = start;
        let array = if self.eat(&TokenKind::LBracket) {
            let len = match self.peek_kind().clone() {
                TokenKind::Number(n) => {
                    self.bump();
                    match n.parse::<u32>() {
                        Ok(v) if v > 0 => Some(v),
                        _ => {
                            self.error(Code::E_INVALID_VALUE, format!("invalid array length `{n}`"), self.prev_span());
                            return Err(());
                        }
                    }
                }
                _ => None,
            };
            span = start.to(self.expect(TokenKind::RBracket, "`]`")?);
            Some(len)
        } else {
            None
        };
        match (name.parse::<Primitive>(), array) {
            (Ok(ty), None) => Ok((FieldType::Primitive { ty }, span)),
            (Ok(elem), Some(len)) => Ok((FieldType::Array { elem, len }, span)),
            (Err(()), None) if is_pascal_case(&name) => Ok((FieldType::Nested { schema: name }, span)),
            _ => {
                self.error(Code::E_UNKNOWN_TYPE, format!("unknown type `{name}`"), span);
                Err(())
            }
        }
    }

    fn set<T>(&mut self, slot: &mut Option<T>, value: T, name: &str, span: Span) {
        if slot.is_some() {
            self.error(Code::E_DUPLICATE_ATTRIBUTE, format!("attribute `{name}` given more than once"), span);
        } else {
            *slot = Some(value);
        }
    }

    fn attrs(&mut self) -> PResult<Attrs> {
        let mut attrs = Attrs::default();
        loop {
            let tok = self.peek().clone();
            match &tok.kind {
                TokenKind::RBrace => return Ok(attrs),
                TokenKind::Keyword(Keyword::Obligation) => {
                    self.bump();
                    self.expect(TokenKind::Colon, "`:`")?;
                    let v = self.enum_value::<Obligation>("obligation", &["mandatory", "optional"])?;
                    self.set(&mut attrs.obligation, v, "obligation", tok.span);
                }
                TokenKind::Keyword(Keyword::Category) => {
                    self.bump();
                    self.expect(TokenKind::Colon, "`:`")?;
                    let allowed = ElementCategory::ALL.map(ElementCategory::as_str);
                    let v = self.enum_value::<ElementCategory>("category", &allowed)?;
                    self.set(&mut attrs.category, v, "category", tok.span);
                }
                TokenKind::Keyword(Keyword::Direction) => {
                    self.bump();
                    self.expect(TokenKind::Colon, "`:`")?;
                    let v = self.enum_value::<Direction>("direction", &["published", "subscribed"])?;
                    self.set(&mut attrs.direction, v, "direction", tok.span);
                }
                TokenKind::Keyword(Keyword::Requires) => {
                    self.bump();
                    self.expect(TokenKind::Colon, "`:`")?;
                    let end = self.expect(TokenKind::Keyword(Keyword::Group), "`group`")?;
                    self.set(&mut attrs.requires, tok.span.to(end), "requires", tok.span);
                }
                TokenKind::Keyword(Keyword::Unit) => {
                    self.bump();
                    let v = self.string("a unit string")?;
                    self.set(&mut attrs.unit, v, "unit", tok.span);
                }
                TokenKind::Keyword(Keyword::Default) => {
                    self.bump();
                    self.expect(TokenKind::Colon, "`:`")?;
                    let v = self.literal()?;
                    self.set(&mut attrs.default, v, "default", tok.span);
                }
                TokenKind::Ident(word) if word == "schema" => {
                    self.bump();
                    self.expect(TokenKind::Colon, "`:`")?;
                    let v = self.name("a schema name")?;
                    self.set(&mut attrs.schema, v, "schema", tok.span);
                }
                TokenKind::Ident(word) if word == "type" => {
                    self.bump();
                    self.expect(TokenKind::Colon, "`:`")?;
                    let v = self.type_expr()?;
                    self.set(&mut attrs.ty, v, "type", tok.span);
                }
                TokenKind::Ident(word) if word == "value" => {
                    self.bump();
                    self.expect(TokenKind::Colon, "`:`")?;
                    let v = self.literal()?;
                    self.set(&mut attrs.value, v, "value", tok.span);
                }
                TokenKind::Ident(word) if word == "path" => {
                    self.bump();
                    self.expect(TokenKind::Colon, "`:`")?;
                    let v = self.string("a path string")?;
                    self.set(&mut attrs.path, v, "path", tok.span);
                }
                _ => return self.unexpected("an attribute or `}`"),
            }
        }
    }

    fn element(&mut self) -> PResult<RawElement> {
        let kw = self.bump();
        let kind = match kw.kind {
            TokenKind::Keyword(Keyword::Topic) => ElementKind::Topic,
            TokenKind::Keyword(Keyword::Service) => ElementKind::Service,
            TokenKind::Keyword(Keyword::Action) => ElementKind::Action,
            _ => ElementKind::Parameter,
        };
        let (name, _) = self.name("an element name")?;
        self.expect(TokenKind::LBrace, "`{`")?;
        let attrs = self.attrs()?;
        let end = self.expect(TokenKind::RBrace, "`}`")?;
        Ok(RawElement { kind, name, attrs, span: kw.span.to(end) })
    }

    fn reject_attrs(&mut self, raw: &RawElement, allowed: &[&str]) {
        for (name, span) in raw.attrs.present() {
            if !allowed.contains(&name) {
                self.error(
                    Code::E_UNEXPECTED_ATTRIBUTE,
                    format!("attribute `{name}` is not allowed on {} `{}`", raw.kind, raw.name),
                    span,
                );
            }
        }
    }

    fn require_shape(&mut self, raw: &RawElement) -> bool {
        let mut ok = true;
        if raw.kind == ElementKind::Topic && raw.attrs.direction.is_none() {
            self.error(
                Code::E_MISSING_DIRECTION,
                format!("topic `{}` must declare `direction: published|subscribed`", raw.name),
                raw.span,
            );
            ok = false;
        }
        if raw.kind != ElementKind::Parameter && raw.attrs.schema.is_none() {
            self.error(Code::E_MISSING_SCHEMA, format!("{} `{}` must declare `schema:`", raw.kind, raw.name), raw.span);
            ok = false;
        }
        if raw.kind == ElementKind::Parameter && raw.attrs.ty.is_none() {
            self.error(Code::E_MISSING_TYPE, format!("parameter `{}` must declare `type:`", raw.name), raw.span);
            ok = false;
        }
        ok
    }

    fn param_type(&mut self, raw: &RawElement) -> Option<Primitive> {
        let (ty, span) = raw.attrs.ty.as_ref()?;
        match ty {
            FieldType::Primitive { ty } => Some(*ty),
            other => {
                self.error(Code::E_UNKNOWN_TYPE, format!("parameter type must be a primitive, found `{other}`"), *span);
                None
            }
        }
    }

    fn checked_literal(&mut self, ty: Primitive, lit: &Option<(Literal, Span)>) -> Option<Option<Literal>> {
        match lit {
            None => Some(None),
            Some((value, span)) if ty.accepts(value) => {
                let _ = span;
                Some(Some(value.clone()))
            }
            Some((value, span)) => {
                self.error(Code::E_INVALID_VALUE, format!("value {value} does not fit type {ty}"), *span);
                None
            }
        }
    }

    /// Builds a model element. `group` carries the group name and the
    /// category members inherit when they do not state one.
    fn model_element(&mut self, raw: RawElement, group: Option<(&str, ElementCategory)>) -> Option<InterfaceElement> {
        let mut allowed = vec!["obligation", "category"];
        match raw.kind {
            ElementKind::Topic => allowed.extend(["direction", "schema"]),
            ElementKind::Service | ElementKind::Action => allowed.push("schema"),
            ElementKind::Parameter => allowed.extend(["type", "unit", "default"]),
        }
        if group.is_some() {
            allowed.push("requires");
        }
        self.reject_attrs(&raw, &allowed);
        let mut ok = self.require_shape(&raw);

        let (obligation, category) = match group {
            Some((_, inherited)) => (
                raw.attrs.obligation.map_or(Obligation::Optional, |(o, _)| o),
                raw.attrs.category.map_or(inherited, |(c, _)| c),
            ),
            None => {
                if raw.attrs.obligation.is_none() {
                    self.error(Code::E_MISSING_OBLIGATION, format!("`{}` must declare `obligation:`", raw.name), raw.span);
                    ok = false;
                }
                if raw.attrs.category.is_none() {
                    self.error(Code::E_MISSING_CATEGORY, format!("`{}` must declare `category:`", raw.name), raw.span);
                    ok = false;
                }
                (
                    raw.attrs.obligation.map_or(Obligation::Mandatory, |(o, _)| o),
                    raw.attrs.category.map_or(ElementCategory::DevicePurpose, |(c, _)| c),
                )
            }
        };

        let param = if raw.kind == ElementKind::Parameter {
            let ty = self.param_type(&raw);
            match ty {
                Some(ty) => match self.checked_literal(ty, &raw.attrs.default) {
                    Some(default) => Some(ParamSpec { ty, unit: raw.attrs.unit.as_ref().map(|(u, _)| u.clone()), default }),
                    None => {
                        ok = false;
                        None
                    }
                },
                None => {
                    ok = false;
                    None
                }
            }
        } else {
            None
        };

        if !ok {
            return None;
        }
        if let Some((unit, span)) = &raw.attrs.unit {
            let _ = unit;
            self.spans.insert(Locus::Unit { owner: raw.name.clone() }, *span);
        }
        self.spans.insert(Locus::Element { name: raw.name.clone() }, raw.span);
        Some(InterfaceElement {
            kind: raw.kind,
            name: raw.name,
            direction: raw.attrs.direction.map(|(d, _)| d),
            schema: raw.attrs.schema.map(|(s, _)| s),
            param,
            obligation,
            category,
            group: group.map(|(g, _)| g.to_string()),
            required_in_group: raw.attrs.requires.is_some(),
        })
    }

    fn record(&mut self, schema: &str, section: &str) -> PResult<Record> {
        self.expect(TokenKind::LBrace, "`{`")?;
        let mut record = Record::default();
        loop {
            let tok = self.peek().clone();
            match &tok.kind {
                TokenKind::RBrace => {
                    self.bump();
                    return Ok(record);
                }
                TokenKind::Keyword(Keyword::Field) => {
                    self.bump();
                    let (name, _) = self.name("a field name")?;
                    self.expect(TokenKind::Colon, "`:`")?;
                    let (field_type, mut span) = self.type_expr()?;
                    let qualified = if section.is_empty() { name.clone() } else { format!("{section}.{name}") };
                    let unit = if self.is_keyword(Keyword::Unit) {
                        self.bump();
                        let (unit, unit_span) = self.string("a unit string")?;
                        self.spans.insert(Locus::Unit { owner: format!("{schema}.{qualified}") }, unit_span);
                        span = span.to(unit_span);
                        Some(unit)
                    } else {
                        None
                    };
                    self.spans.insert(Locus::Field { schema: schema.to_string(), field: qualified }, tok.span.to(span));
                    record.fields.push(FieldDef { name, field_type, unit });
                }
                TokenKind::Ident(word) if word == "constant" => {
                    self.bump();
                    let (name, _) = self.name("a constant name")?;
                    self.expect(TokenKind::Colon, "`:`")?;
                    let (ty_name, ty_span) = self.name("a primitive type")?;
                    let Ok(ty) = ty_name.parse::<Primitive>() else {
                        self.error(Code::E_UNKNOWN_TYPE, format!("constant type must be a primitive, found `{ty_name}`"), ty_span);
                        return Err(());
                    };
                    self.expect_word("value")?;
                    self.expect(TokenKind::Colon, "`:`")?;
                    let (value, value_span) = self.literal()?;
                    let qualified = if section.is_empty() { name.clone() } else { format!("{section}.{name}") };
                    self.spans.insert(Locus::Field { schema: schema.to_string(), field: qualified }, tok.span.to(value_span));
                    record.constants.push(ConstantDef { name, ty, value });
                }
                _ => return self.unexpected("`field`, `constant` or `}`"),
            }
        }
    }

    fn schema(&mut self) -> PResult<Schema> {
        let kw = self.bump();
        let (name, name_span) = self.name("a schema name")?;
        if !is_pascal_case(&name) {
            self.error(Code::E_MALFORMED_NAME, format!("schema name `{name}` is not PascalCase"), name_span);
        }
        let schema = match kw.kind {
            TokenKind::Keyword(Keyword::Message) => Schema::message(name.clone(), self.record(&name, "")?),
            TokenKind::Keyword(Keyword::Srv) => {
                self.expect(TokenKind::LBrace, "`{`")?;
                self.expect_word("request")?;
                let request = self.record(&name, "request")?;
                self.expect_word("response")?;
                let response = self.record(&name, "response")?;
                self.expect(TokenKind::RBrace, "`}`")?;
                Schema::Service(ServiceSchema { name: name.clone(), request, response })
            }
            _ => {
                self.expect(TokenKind::LBrace, "`{`")?;
                self.expect_word("goal")?;
                let goal = self.record(&name, "goal")?;
                self.expect_word("result")?;
                let result = self.record(&name, "result")?;
                self.expect_word("feedback")?;
                let feedback = self.record(&name, "feedback")?;
                self.expect(TokenKind::RBrace, "`}`")?;
                Schema::Action(ActionSchema { name: name.clone(), goal, result, feedback })
            }
        };
        self.spans.insert(Locus::Schema { name }, kw.span.to(self.prev_span()));
        Ok(schema)
    }

    fn push_schema(&mut self, schemas: &mut Vec<Schema>, schema: Schema, span: Span) {
        if schemas.iter().any(|s| s.name() == schema.name()) {
            self.error(Code::E_DUPLICATE_SCHEMA, format!("schema `{}` defined more than once", schema.name()), span);
        } else {
            schemas.push(schema);
        }
    }

    fn kind_item(&mut self, slot: &mut Option<DeviceKind>) -> PResult<()> {
        let kw = self.bump();
        self.expect(TokenKind::Colon, "`:`")?;
        let (text, span) = self.name("a device kind")?;
        match text.parse::<DeviceKind>() {
            Ok(kind) if slot.is_none() => *slot = Some(kind),
            Ok(_) => self.error(Code::E_DUPLICATE_ATTRIBUTE, "`kind` given more than once", kw.span.to(span)),
            Err(()) => {
                let kinds = DeviceKind::ALL.map(DeviceKind::as_str).join(", ");
                self.error(Code::E_UNKNOWN_KIND, format!("`{text}` is not a device kind; expected one of {kinds}"), span);
            }
        }
        Ok(())
    }

    /// Finds the header keyword of the single top-level block.
    fn block_header(&mut self, keyword: &str) -> PResult<(String, Span)> {
        let is_header = |p: &Parser| p.peek_kind().word_text() == Some(keyword);
        if !is_header(self) {
            if self.at_eof() {
                let span = self.peek().span;
                let code = if keyword == "model" { Code::E_NO_MODEL_BLOCK } else { Code::E_UNEXPECTED_TOKEN };
                self.error(code, format!("file contains no `{keyword}` block"), span);
                return Err(());
            }
            self.unexpected::<()>(&format!("`{keyword}`")).ok();
            while !self.at_eof() && !is_header(self) {
                self.bump();
            }
            if self.at_eof() {
                let span = self.peek().span;
                let code = if keyword == "model" { Code::E_NO_MODEL_BLOCK } else { Code::E_UNEXPECTED_TOKEN };
                self.error(code, format!("file contains no `{keyword}` block"), span);
                return Err(());
            }
        }
        let kw = self.bump();
        let (name, name_span) = self.name("a device name")?;
        if !is_snake_case(&name) {
            self.error(Code::E_MALFORMED_NAME, format!("device name `{name}` is not snake_case"), name_span);
        }
        self.expect(TokenKind::LBrace, "`{`")?;
        Ok((name, kw.span.to(name_span)))
    }

    fn finish_block(&mut self, keyword: &str) {
        if !self.eat(&TokenKind::RBrace) {
            let span = self.peek().span;
            self.error(Code::E_UNEXPECTED_TOKEN, format!("expected `}}` closing the {keyword} block"), span);
            return;
        }
        if !self.at_eof() {
            let tok = self.peek().clone();
            if tok.kind.word_text() == Some(keyword) {
                self.error(Code::E_EXTRA_MODEL_BLOCK, format!("only one `{keyword}` block is allowed per file"), tok.span);
            } else {
                self.error(Code::E_UNEXPECTED_TOKEN, format!("unexpected {} after the {keyword} block", tok.kind), tok.span);
            }
        }
    }

    fn add_element(&mut self, model: &mut ComponentModel, seen: &mut HashSet<String>, element: InterfaceElement, span: Span) {
        if !seen.insert(element.name.clone()) {
            self.error(Code::E_DUPLICATE_ELEMENT, format!("element `{}` declared more than once", element.name), span);
            return;
        }
        model.push(element);
    }

    fn group(&mut self, model: &mut ComponentModel, seen: &mut HashSet<String>) -> PResult<()> {
        let kw = self.bump();
        let (name, _) = self.name("a group name")?;
        self.expect(TokenKind::LBrace, "`{`")?;
        if model.group(&name).is_some() {
            self.error(Code::E_DUPLICATE_GROUP, format!("group `{name}` declared more than once"), kw.span);
            return Err(());
        }
        model.groups.push(OptionalGroup { name: name.clone(), members: Vec::new() });
        let mut inherited = None;
        loop {
            match self.peek_kind() {
                TokenKind::RBrace => break,
                TokenKind::Keyword(Keyword::Topic | Keyword::Service | Keyword::Action | Keyword::Parameter) => {
                    let raw = self.element()?;
                    let span = raw.span;
                    let category = *inherited.get_or_insert(
                        raw.attrs.category.map_or(ElementCategory::OptionalHardware, |(c, _)| c),
                    );
                    if let Some(element) = self.model_element(raw, Some((&name, category))) {
                        self.add_element(model, seen, element, span);
                    }
                }
                _ => return self.unexpected("an element or `}`"),
            }
        }
        let end = self.bump().span;
        self.spans.insert(Locus::Group { name }, kw.span.to(end));
        Ok(())
    }

    fn model_file(&mut self) -> Option<ComponentModel> {
        let (name, header_span) = self.block_header("model").ok()?;
        self.spans.set_model(header_span);
        let mut kind = None;
        let mut model = ComponentModel::new(DeviceKind::Sensor, &name);
        let mut seen = HashSet::new();
        let item_depth = self.depth;
        loop {
            let start = self.pos;
            let tok = self.peek().clone();
            let result = match &tok.kind {
                TokenKind::RBrace | TokenKind::Eof => break,
                TokenKind::Keyword(Keyword::Kind) => self.kind_item(&mut kind),
                TokenKind::Directive(d) if d == "common" => {
                    self.bump();
                    for element in common_requirements(&name) {
                        self.spans.insert(Locus::Element { name: element.name.clone() }, tok.span);
                        self.add_element(&mut model, &mut seen, element, tok.span);
                    }
                    Ok(())
                }
                TokenKind::Keyword(Keyword::Topic | Keyword::Service | Keyword::Action | Keyword::Parameter) => {
                    self.element().map(|raw| {
                        let span = raw.span;
                        if let Some(element) = self.model_element(raw, None) {
                            self.add_element(&mut model, &mut seen, element, span);
                        }
                    })
                }
                TokenKind::Keyword(Keyword::Group) => self.group(&mut model, &mut seen),
                TokenKind::Keyword(Keyword::Message | Keyword::Srv | Keyword::ActionSchema) => {
                    self.schema().map(|schema| {
                        let span = self.spans.lookup(&Locus::Schema { name: schema.name().to_string() });
                        let mut schemas = std::mem::take(&mut model.schemas);
                        self.push_schema(&mut schemas, schema, span);
                        model.schemas = schemas;
                    })
                }
                _ => self.unexpected("a model item or `}`"),
            };
            if result.is_err() {
                self.recover(start, item_depth);
            }
        }
        self.finish_block("model");
        match kind {
            Some(k) => model.kind = k,
            None if self.diags.iter().any(|d| d.code == Code::E_UNKNOWN_KIND) => {}
            None => self.error(Code::E_MISSING_KIND, format!("model `{name}` must declare `kind:`"), header_span),
        }
        Some(model)
    }

    fn identity(&mut self, slot: &mut Option<(Identity, Span)>) -> PResult<()> {
        let kw = self.bump();
        self.expect(TokenKind::LBrace, "`{`")?;
        let mut values: [Option<String>; 3] = [None, None, None];
        let keys = ["vendor", "product", "instance"];
        while *self.peek_kind() != TokenKind::RBrace {
            let (key, key_span) = self.name("`vendor`, `product` or `instance`")?;
            let Some(i) = keys.iter().position(|k| *k == key) else {
                self.error(Code::E_UNEXPECTED_ATTRIBUTE, format!("unknown identity field `{key}`"), key_span);
                return Err(());
            };
            self.expect(TokenKind::Colon, "`:`")?;
            let tok = self.bump();
            let text = match &tok.kind {
                TokenKind::Ident(s) | TokenKind::Word(s) | TokenKind::Number(s) | TokenKind::Str(s) => s.clone(),
                other => {
                    self.error(Code::E_UNEXPECTED_TOKEN, format!("expected an identity token, found {other}"), tok.span);
                    return Err(());
                }
            };
            if HexToken::parse(&text).is_err() {
                self.error(
                    Code::E_INVALID_IDENTITY,
                    format!("{key} id `{text}` is not 4 lowercase hex characters"),
                    tok.span,
                );
            }
            values[i] = Some(text);
        }
        let end = self.bump().span;
        let span = kw.span.to(end);
        let missing: Vec<&str> = keys.iter().zip(&values).filter(|(_, v)| v.is_none()).map(|(k, _)| *k).collect();
        if !missing.is_empty() {
            self.error(Code::E_MISSING_IDENTITY, format!("identity lacks {}", missing.join(", ")), span);
            return Ok(());
        }
        let [vendor, product, instance] = values.map(Option::unwrap);
        if let Ok(identity) = Identity::parse(&vendor, &product, Some(&instance)) {
            *slot = Some((identity, span));
        }
        Ok(())
    }

    fn claimed_element(&mut self, raw: RawElement) -> Option<ClaimedElement> {
        let allowed: &[&str] = match raw.kind {
            ElementKind::Topic => &["direction", "schema", "path"],
            ElementKind::Service | ElementKind::Action => &["schema", "path"],
            ElementKind::Parameter => &["type", "unit", "value"],
        };
        self.reject_attrs(&raw, allowed);
        if !self.require_shape(&raw) {
            return None;
        }
        let param_type = if raw.kind == ElementKind::Parameter {
            let ty = self.param_type(&raw)?;
            self.checked_literal(ty, &raw.attrs.value)?;
            Some(ty)
        } else {
            None
        };
        if !is_snake_case(&raw.name) {
            self.error(Code::E_MALFORMED_NAME, format!("element name `{}` is not snake_case", raw.name), raw.span);
            return None;
        }
        self.spans.insert(Locus::Element { name: raw.name.clone() }, raw.span);
        Some(ClaimedElement {
            kind: raw.kind,
            name: raw.name,
            direction: raw.attrs.direction.map(|(d, _)| d),
            schema: raw.attrs.schema.map(|(s, _)| s),
            param_type,
            unit: raw.attrs.unit.map(|(u, _)| u),
            value: raw.attrs.value.map(|(v, _)| v),
            path: raw.attrs.path.map(|(p, _)| p),
        })
    }

    fn descriptor_file(&mut self) -> Option<ModuleDescriptor> {
        let (name, header_span) = self.block_header("descriptor").ok()?;
        self.spans.set_model(header_span);
        let mut kind = None;
        let mut identity = None;
        let mut elements: Vec<ClaimedElement> = Vec::new();
        let mut schemas = Vec::new();
        let item_depth = self.depth;
        let mut push = |p: &mut Parser, element: ClaimedElement, span: Span| {
            if elements.iter().any(|e| e.name == element.name) {
                p.error(Code::E_DUPLICATE_ELEMENT, format!("element `{}` declared more than once", element.name), span);
            } else {
                elements.push(element);
            }
        };
        loop {
            let start = self.pos;
            let tok = self.peek().clone();
            let result = match &tok.kind {
                TokenKind::RBrace | TokenKind::Eof => break,
                TokenKind::Keyword(Keyword::Kind) => self.kind_item(&mut kind),
                TokenKind::Ident(word) if word == "identity" => {
                    if identity.is_some() {
                        self.error(Code::E_DUPLICATE_ATTRIBUTE, "`identity` given more than once", tok.span);
                    }
                    self.identity(&mut identity)
                }
                TokenKind::Directive(d) if d == "common" => {
                    self.bump();
                    for element in common_requirements(&name) {
                        self.spans.insert(Locus::Element { name: element.name.clone() }, tok.span);
                        push(self, ClaimedElement::from_model(&element), tok.span);
                    }
                    Ok(())
                }
                TokenKind::Keyword(Keyword::Topic | Keyword::Service | Keyword::Action | Keyword::Parameter) => {
                    self.element().map(|raw| {
                        let span = raw.span;
                        if let Some(element) = self.claimed_element(raw) {
                            push(self, element, span);
                        }
                    })
                }
                TokenKind::Keyword(Keyword::Message | Keyword::Srv | Keyword::ActionSchema) => self.schema().map(|schema| {
                    let span = self.spans.lookup(&Locus::Schema { name: schema.name().to_string() });
                    self.push_schema(&mut schemas, schema, span);
                }),
                _ => self.unexpected("a descriptor item or `}`"),
            };
            if result.is_err() {
                self.recover(start, item_depth);
            }
        }
        self.finish_block("descriptor");
        let Some(kind) = kind else {
            if self.diags.iter().any(|d| d.code == Code::E_UNKNOWN_KIND) {
                return None;
            }
            self.error(Code::E_MISSING_KIND, format!("descriptor `{name}` must declare `kind:`"), header_span);
            return None;
        };
        let Some((identity, _)) = identity else {
            if !self.diags.iter().any(|d| d.code == Code::E_INVALID_IDENTITY || d.code == Code::E_MISSING_IDENTITY) {
                self.error(Code::E_MISSING_IDENTITY, format!("descriptor `{name}` must declare `identity {{ .. }}`"), header_span);
            }
            return None;
        };
        Some(ModuleDescriptor { identity, kind, device_name: name, elements, schemas })
    }
}

/// Parses one `.hrim` file. When parsing succeeds without errors the model
/// is validated and its findings are appended to the diagnostics.
pub fn parse_model(source: &SourceFile) -> ParsedModel {
    let mut parser = Parser::new(source, Mode::Model);
    let model = parser.model_file();
    let mut diagnostics = parser.diags;
    let spans = parser.spans;
    if let Some(model) = &model {
        if !diagnostics.iter().any(Diagnostic::is_error) {
            for finding in validate_model(model) {
                diagnostics.push(Diagnostic::from_finding(&finding, spans.lookup(&finding.locus)));
            }
        }
    }
    diagnostics.sort_by_key(|d| (d.span.start, d.code));
    ParsedModel { model, diagnostics, spans }
}

/// Parses one `.hrimd` module descriptor file.
pub fn parse_descriptor(source: &SourceFile) -> ParsedDescriptor {
    let mut parser = Parser::new(source, Mode::Descriptor);
    let descriptor = parser.descriptor_file();
    let mut diagnostics = parser.diags;
    let spans = parser.spans;
    if let Some(descriptor) = &descriptor {
        if !diagnostics.iter().any(Diagnostic::is_error) {
            for finding in descriptor.check_references() {
                diagnostics.push(Diagnostic::from_finding(&finding, spans.lookup(&finding.locus)));
            }
        }
    }
    diagnostics.sort_by_key(|d| (d.span.start, d.code));
    ParsedDescriptor { descriptor, diagnostics, spans }
}
