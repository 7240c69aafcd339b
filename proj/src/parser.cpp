#include "albert/parser.hpp"

#include <cctype>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace albert {

namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class Tok {
  Ident,   // lower-case or underscore start: variables, labels, functions
  Ctor,    // upper-case start: constructors (True/False/Some/None included)
  Number,  // optionally negative integer literal
  Str,
  LBrace, RBrace, LBrack, RBrack, LParen, RParen,
  Semi, Colon, Comma, Dot, Pipe, Plus, Eq, Arrow, GreaterEq,
  End,  // end of input
};

struct Token {
  Tok kind;
  std::string text;  // identifier/constructor name or string contents
  big_int num;       // Tok::Number
  int line = 1;
  int col = 1;
};

// Keywords are lexed as Ident and recognized by spelling at parse sites; this
// set is what may NOT be used as a variable/label/function name.
const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words = {
      "def", "noop", "drop", "dup", "match", "with", "end", "type",
      "update", "failwith", "assert_some", "amount",
      "nat", "int", "string", "mutez", "bool", "operation",
      "list", "map", "option", "or",
  };
  return words;
}

// Constructor names with fixed meaning; not available for user variants.
const std::set<std::string>& reserved_ctors() {
  static const std::set<std::string> words = {"True", "False", "Some", "None"};
  return words;
}

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_blank();
      Token t = next();
      out.push_back(t);
      if (t.kind == Tok::End) return out;
    }
  }

 private:
  [[noreturn]] void fail(const std::string& msg) { throw ParseError(line_, col_, msg); }

  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
  char peek2() const { return pos_ + 1 < src_.size() ? src_[pos_ + 1] : '\0'; }

  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_blank() {
    for (;;) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#') {
        while (peek() != '\0' && peek() != '\n') advance();
      } else {
        return;
      }
    }
  }

  Token tok(Tok kind, std::string text = {}) {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.line = start_line_;
    t.col = start_col_;
    return t;
  }

  Token next() {
    start_line_ = line_;
    start_col_ = col_;
    char c = peek();
    if (c == '\0') return tok(Tok::End);
    if (static_cast<unsigned char>(c) >= 0x80)
      fail("non-ASCII byte in source");
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident();
    if (std::isdigit(static_cast<unsigned char>(c))) return number(false);
    advance();
    switch (c) {
      case '{': return tok(Tok::LBrace);
      case '}': return tok(Tok::RBrace);
      case '[': return tok(Tok::LBrack);
      case ']': return tok(Tok::RBrack);
      case '(': return tok(Tok::LParen);
      case ')': return tok(Tok::RParen);
      case ';': return tok(Tok::Semi);
      case ':': return tok(Tok::Colon);
      case ',': return tok(Tok::Comma);
      case '.': return tok(Tok::Dot);
      case '|': return tok(Tok::Pipe);
      case '+': return tok(Tok::Plus);
      case '"': return string_lit();
      case '=': return tok(Tok::Eq);
      case '-':
        if (peek() == '>') {
          advance();
          return tok(Tok::Arrow);
        }
        if (std::isdigit(static_cast<unsigned char>(peek()))) return number(true);
        fail("stray '-'");
      case '>':
        if (peek() == '=') {
          advance();
          return tok(Tok::GreaterEq);
        }
        fail("stray '>'");
      default: fail(std::string("unexpected character '") + c + "'");
    }
  }

  Token ident() {
    std::string name;
    while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')
      name += advance();
    bool upper = std::isupper(static_cast<unsigned char>(name[0]));
    return tok(upper ? Tok::Ctor : Tok::Ident, std::move(name));
  }

  Token number(bool negative) {
    std::string digits;
    while (std::isdigit(static_cast<unsigned char>(peek()))) digits += advance();
    Token t = tok(Tok::Number);
    t.num = big_int(digits);
    if (negative) t.num = -t.num;
    return t;
  }

  Token string_lit() {
    std::string out;
    for (;;) {
      char c = peek();
      if (c == '\0' || c == '\n') fail("unterminated string literal");
      advance();
      if (c == '"') return tok(Tok::Str, std::move(out));
      if (c == '\\') {
        char e = peek();
        if (e == '"' || e == '\\') {
          out += advance();
        } else {
          fail("unknown string escape");
        }
      } else {
        out += c;
      }
    }
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  int start_line_ = 1, start_col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program() {
    Program p;
    std::set<std::string> alias_names, fn_names;
    while (!at(Tok::End)) {
      if (at_word("type")) {
        TypeAlias a = alias_decl();
        if (!alias_names.insert(a.name).second)
          fail_at(a.pos, "type alias " + a.name + " is defined twice");
        p.aliases.push_back(std::move(a));
      } else if (at_word("def")) {
        FuncDef f = func_def();
        if (!fn_names.insert(f.name).second)
          fail_at(f.pos, "function " + f.name + " is defined twice");
        p.functions.push_back(std::move(f));
      } else {
        fail("expected 'def' or 'type' at top level");
      }
    }
    return p;
  }

  ValuePtr value_text() {
    ValuePtr v = value();
    expect(Tok::End, "end of input after the value");
    return v;
  }

  TypePtr type_text() {
    TypePtr t = type();
    expect(Tok::End, "end of input after the type");
    return t;
  }

 private:
  const Token& cur() const { return toks_[idx_]; }
  const Token& ahead(std::size_t n = 1) const {
    return toks_[std::min(idx_ + n, toks_.size() - 1)];
  }
  Pos here() const { return {cur().line, cur().col}; }

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(cur().line, cur().col, msg);
  }
  [[noreturn]] void fail_at(Pos pos, const std::string& msg) {
    throw ParseError(pos.line, pos.col, msg);
  }

  bool at(Tok k) const { return cur().kind == k; }
  bool at_word(const char* w) const { return at(Tok::Ident) && cur().text == w; }
  bool at_ctor(const char* w) const { return at(Tok::Ctor) && cur().text == w; }

  Token advance() { return toks_[idx_++]; }

  Token expect(Tok k, const std::string& what) {
    if (!at(k)) fail("expected " + what);
    return advance();
  }

  void expect_word(const char* w) {
    if (!at_word(w)) fail(std::string("expected '") + w + "'");
    advance();
  }

  // A variable / label / function name: a lower-case identifier that is not a
  // reserved word.
  std::string name(const char* what) {
    if (!at(Tok::Ident)) fail(std::string("expected ") + what);
    if (reserved_words().count(cur().text))
      fail("'" + cur().text + "' is a reserved word and cannot be used as a " + what);
    return advance().text;
  }

  std::string ctor_name() {
    if (!at(Tok::Ctor)) fail("expected a constructor name");
    return advance().text;
  }

  // ---- types ----

  TypePtr type() {
    if (at_word("list")) {
      advance();
      return t_list(type_atom());
    }
    if (at_word("option")) {
      advance();
      return t_option(type_atom());
    }
    if (at_word("map")) {
      advance();
      TypePtr k = type_atom();
      TypePtr v = type_atom();
      return t_map(std::move(k), std::move(v));
    }
    if (at_word("or")) {
      advance();
      TypePtr l = type_atom();
      TypePtr r = type_atom();
      return t_variant({{"Left", std::move(l)}, {"Right", std::move(r)}});
    }
    return type_atom();
  }

  TypePtr type_atom() {
    if (at(Tok::Ident)) {
      const std::string& w = cur().text;
      if (w == "nat") return advance(), t_nat();
      if (w == "int") return advance(), t_int();
      if (w == "string") return advance(), t_string();
      if (w == "mutez") return advance(), t_mutez();
      if (w == "bool") return advance(), t_bool();
      if (w == "operation") return advance(), t_operation();
      if (reserved_words().count(w)) fail("type '" + w + "' needs its arguments here");
      return t_alias(advance().text);
    }
    if (at(Tok::LBrace)) return record_type();
    if (at(Tok::LBrack)) return variant_type();
    if (at(Tok::LParen)) {
      advance();
      TypePtr t = type();
      expect(Tok::RParen, "')'");
      return t;
    }
    fail("expected a type");
  }

  TypePtr record_type() {
    Pos pos = here();
    expect(Tok::LBrace, "'{'");
    TypeFields fields;
    std::set<std::string> seen;
    while (!at(Tok::RBrace)) {
      std::string l = name("field label");
      if (!seen.insert(l).second) fail_at(pos, "duplicate record label " + l);
      expect(Tok::Colon, "':'");
      fields.emplace_back(std::move(l), type());
      if (!at(Tok::RBrace)) expect(Tok::Semi, "';' or '}'");
    }
    advance();
    return t_record(std::move(fields));
  }

  TypePtr variant_type() {
    Pos pos = here();
    expect(Tok::LBrack, "'['");
    TypeFields ctors;
    std::set<std::string> seen;
    for (;;) {
      std::string c = ctor_name();
      if (reserved_ctors().count(c))
        fail_at(pos, "constructor name " + c + " is reserved");
      if (!seen.insert(c).second) fail_at(pos, "duplicate constructor " + c);
      expect(Tok::Colon, "':'");
      ctors.emplace_back(std::move(c), type());
      if (at(Tok::RBrack)) break;
      expect(Tok::Pipe, "'|' or ']'");
    }
    advance();
    if (ctors.empty()) fail_at(pos, "a variant needs at least one constructor");
    return t_variant(std::move(ctors));
  }

  // ---- values ----

  bool at_value_start() const {
    return at(Tok::Number) || at(Tok::Str) || at(Tok::Ctor) || at(Tok::LBrack) ||
           at(Tok::LBrace) || at(Tok::LParen);
  }

  ValuePtr value() {
    Pos pos = here();
    if (at(Tok::Number)) {
      big_int n = advance().num;
      return n < 0 ? v_int(std::move(n)) : v_nat(std::move(n));
    }
    if (at(Tok::Str)) return v_string(advance().text);
    if (at(Tok::Ctor)) {
      std::string c = advance().text;
      if (c == "True") return v_bool(true);
      if (c == "False") return v_bool(false);
      if (c == "None") return v_none(nullptr);
      if (c == "Some") return v_some(value());
      fail_at(pos, "constructor " + c + " needs a type: write (" + c + " value : type)");
    }
    if (at(Tok::LBrack)) return list_value();
    if (at(Tok::LBrace)) return braced_value();
    if (at(Tok::LParen)) return ascribed_value();
    fail("expected a value");
  }

  ValuePtr list_value() {
    expect(Tok::LBrack, "'['");
    std::vector<ValuePtr> elems;
    while (!at(Tok::RBrack)) {
      elems.push_back(value());
      if (!at(Tok::RBrack)) expect(Tok::Semi, "';' or ']'");
    }
    advance();
    TypePtr elem = elems.empty() ? nullptr : type_of_value(elems.front());
    return v_list(std::move(elems), std::move(elem));
  }

  // `{}` (unit), `{l = v; ...}` (record) or `{k -> v; ...}` (map).
  ValuePtr braced_value() {
    Pos pos = here();
    expect(Tok::LBrace, "'{'");
    if (at(Tok::RBrace)) {
      advance();
      return v_unit();
    }
    if (at(Tok::Ident)) {
      ValueFields fields;
      std::set<std::string> seen;
      for (;;) {
        std::string l = name("field label");
        if (!seen.insert(l).second) fail_at(pos, "duplicate label " + l);
        expect(Tok::Eq, "'='");
        fields.emplace_back(std::move(l), value());
        if (at(Tok::RBrace)) break;
        expect(Tok::Semi, "';' or '}'");
      }
      advance();
      return v_record(std::move(fields));
    }
    // Map literal: keys are comparable literals.
    std::vector<std::pair<ValuePtr, ValuePtr>> entries;
    for (;;) {
      ValuePtr k = value();
      expect(Tok::Arrow, "'->'");
      ValuePtr v = value();
      entries.emplace_back(std::move(k), std::move(v));
      if (at(Tok::RBrace)) break;
      expect(Tok::Semi, "';' or '}'");
    }
    advance();
    // Bare digits read back as nat, so a literal mixing them with a negative
    // key means the keys are int; lift the nat-shaped ones to match. The
    // surrounding ascription settles the final element types either way.
    bool has_int = false, has_nat = false;
    for (const auto& [k, v] : entries) {
      has_int = has_int || std::holds_alternative<IntVal>(k->node);
      has_nat = has_nat || std::holds_alternative<NatVal>(k->node);
    }
    if (has_int && has_nat)
      for (auto& [k, v] : entries)
        if (std::holds_alternative<NatVal>(k->node)) k = retype_value(k, t_int());
    TypePtr kt, vt;
    if (!entries.empty()) {
      kt = type_of_value(entries.front().first);
      vt = type_of_value(entries.front().second);
      if (!kt) fail_at(pos, "map keys must be complete literals");
      for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i].first->node.index() != entries.front().first->node.index())
          fail_at(pos, "map keys must all have the same type");
      }
    }
    try {
      return v_map(std::move(entries), std::move(kt), std::move(vt));
    } catch (const InternalError& e) {
      fail_at(pos, e.what());  // duplicate keys / non-comparable keys
    }
  }

  // `(value : type)` — including `(C payload : type)` for variant values.
  ValuePtr ascribed_value() {
    Pos pos = here();
    expect(Tok::LParen, "'('");
    ValuePtr inner;
    if (at(Tok::Ctor) && !reserved_ctors().count(cur().text)) {
      std::string c = advance().text;
      ValuePtr payload = value();
      inner = v_variant(std::move(c), std::move(payload), nullptr);
    } else {
      inner = value();
    }
    expect(Tok::Colon, "':' (a parenthesized value must carry a type)");
    TypePtr t = type();
    expect(Tok::RParen, "')'");
    return retype_at(inner, t, pos);
  }

  ValuePtr retype_at(const ValuePtr& v, const TypePtr& t, Pos pos) {
    // A user-constructor value still lacking its type is matched against the
    // ascription before the general retype pass.
    if (auto* vv = std::get_if<VariantVal>(&v->node); vv && !vv->type) {
      auto* vt = t ? std::get_if<VariantTy>(&t->node) : nullptr;
      if (!vt) fail_at(pos, "constructor " + vv->ctor + " ascribed a non-variant type");
      for (const auto& [c, pt] : vt->ctors)
        if (c == vv->ctor) return v_variant(vv->ctor, retype_at(vv->payload, pt, pos), t);
      fail_at(pos, "constructor " + vv->ctor + " is not part of the ascribed variant");
    }
    try {
      return retype_value(v, t);
    } catch (const std::runtime_error& e) {
      fail_at(pos, e.what());
    }
  }

  // ---- args ----

  ArgPtr arg() {
    Pos pos = here();
    if (at(Tok::Ident)) return a_var(name("variable"), pos);
    if (at(Tok::LBrace)) return braced_arg();
    if (at_value_start()) return a_val(value(), pos);
    fail("expected an argument (variable, literal, or record of variables)");
  }

  // `{...}` in argument position: all fields variables -> a record argument;
  // all fields literals -> a record value; `{}` -> the unit value; a map
  // literal is a value.
  ArgPtr braced_arg() {
    Pos pos = here();
    std::size_t save = idx_;
    expect(Tok::LBrace, "'{'");
    if (at(Tok::RBrace)) {
      advance();
      return a_val(v_unit(), pos);
    }
    if (!(at(Tok::Ident) && ahead().kind == Tok::Eq)) {
      idx_ = save;
      return a_val(braced_value(), pos);
    }
    bool all_vars = true;
    {
      // Decide the flavor with a lookahead pass, then reparse cleanly.
      std::size_t probe = idx_;
      int depth = 1;
      bool expecting_rhs = false;
      while (depth > 0 && toks_[probe].kind != Tok::End) {
        const Token& t = toks_[probe];
        if (t.kind == Tok::LBrace || t.kind == Tok::LBrack || t.kind == Tok::LParen)
          ++depth;
        if (t.kind == Tok::RBrace || t.kind == Tok::RBrack || t.kind == Tok::RParen)
          --depth;
        if (depth == 1 && t.kind == Tok::Eq) expecting_rhs = true;
        else if (depth == 1 && expecting_rhs) {
          if (t.kind != Tok::Ident ||
              (toks_[probe + 1].kind != Tok::Semi && toks_[probe + 1].kind != Tok::RBrace))
            all_vars = false;
          expecting_rhs = false;
        }
        ++probe;
      }
    }
    if (!all_vars) {
      idx_ = save;
      return a_val(braced_value(), pos);
    }
    std::vector<std::pair<Label, Label>> fields;
    std::set<std::string> seen;
    for (;;) {
      std::string l = name("field label");
      if (!seen.insert(l).second) fail_at(pos, "duplicate label " + l);
      expect(Tok::Eq, "'='");
      fields.emplace_back(std::move(l), name("variable"));
      if (at(Tok::RBrace)) break;
      expect(Tok::Semi, "';' or '}'");
    }
    advance();
    return a_record(std::move(fields), pos);
  }

  // ---- rhs ----

  RhsPtr rhs() {
    Pos pos = here();
    if (at_word("update")) {
      advance();
      Label m = name("map variable");
      ArgPtr k = arg();
      ArgPtr v = arg();
      return r_mapupdate(std::move(m), std::move(k), std::move(v), pos);
    }
    if (at_word("failwith") || at_word("assert_some") || at_word("dup")) {
      std::string fn = advance().text;
      return r_apply(std::move(fn), arg(), pos);
    }
    if (at_word("amount")) {
      advance();
      // `amount` takes no written argument; its argument is the unit record.
      return r_apply("amount", a_val(v_unit(), pos), pos);
    }
    if (at_word("match")) return match_rhs();
    if (at(Tok::Ctor)) return ctor_rhs();
    if (at(Tok::LParen)) return paren_rhs();
    if (at(Tok::LBrace)) return braced_rhs();
    if (at(Tok::Ident)) return ident_rhs();
    if (at_value_start()) return r_arg(a_val(value(), pos), pos);
    fail("expected a right-hand side");
  }

  RhsPtr ident_rhs() {
    Pos pos = here();
    Label first = name("variable or function");
    if (at(Tok::Dot)) {
      advance();
      return r_proj(std::move(first), name("field label"), pos);
    }
    if (at(Tok::LBrack)) {
      advance();
      Label key = name("key variable");
      expect(Tok::RBrack, "']'");
      return r_binop(BinOpKind::MapGet, std::move(first), std::move(key), pos);
    }
    if (at(Tok::Plus)) {
      advance();
      return r_binop(BinOpKind::Add, std::move(first), name("variable"), pos);
    }
    if (at(Tok::GreaterEq)) {
      advance();
      return r_binop(BinOpKind::Ge, std::move(first), name("variable"), pos);
    }
    // A function application if an argument follows; a bare variable
    // otherwise. A reserved word is never an argument: in `... -> x end` the
    // `end` closes the surrounding match rather than feeding `x`.
    if ((at(Tok::Ident) && !reserved_words().count(cur().text)) ||
        at(Tok::LBrace) || at_value_start())
      return r_apply(std::move(first), arg(), pos);
    return r_arg(a_var(std::move(first), pos), pos);
  }

  // Upper-case head in rhs position: True/False/None are literals; Some and
  // user constructors take an argument.
  RhsPtr ctor_rhs() {
    Pos pos = here();
    std::string c = cur().text;
    if (c == "True" || c == "False" || c == "None")
      return r_arg(a_val(value(), pos), pos);
    advance();
    ArgPtr payload = arg();
    if (c == "Some") return r_construct("Some", std::move(payload), nullptr, pos);
    fail_at(pos, "constructor " + c + " needs a type: write (" + c + " arg : type)");
  }

  // `(...)` in rhs position: `(C arg : ty)` constructs (Some included);
  // `(value : ty)` ascribes.
  RhsPtr paren_rhs() {
    Pos pos = here();
    expect(Tok::LParen, "'('");
    if (at(Tok::Ctor) && (cur().text == "Some" || !reserved_ctors().count(cur().text))) {
      std::string c = advance().text;
      ArgPtr payload = arg();
      expect(Tok::Colon, "':'");
      TypePtr annot = type();
      expect(Tok::RParen, "')'");
      // A bare literal payload takes its element types from the annotation,
      // so a printed construct reads back exactly as its source tree.
      if (const auto* va = std::get_if<ValArg>(&payload->node)) {
        TypePtr want;
        if (c == "Some") {
          if (const auto* o = std::get_if<OptionTy>(&annot->node)) want = o->elem;
        } else if (const auto* vt = std::get_if<VariantTy>(&annot->node)) {
          for (const auto& [cn, ct] : vt->ctors)
            if (cn == c) want = ct;
        }
        if (want) payload = a_val(retype_at(va->value, want, pos), pos);
      }
      return r_construct(std::move(c), std::move(payload), std::move(annot), pos);
    }
    ValuePtr inner = value();
    expect(Tok::Colon, "':' (a parenthesized value must carry a type)");
    TypePtr t = type();
    expect(Tok::RParen, "')'");
    return r_arg(a_val(retype_at(inner, t, pos), pos), pos);
  }

  RhsPtr braced_rhs() {
    // `{x with l = v; ...}` is a record update; anything else is an argument.
    if (ahead().kind == Tok::Ident && !reserved_words().count(ahead().text) &&
        ahead(2).kind == Tok::Ident && ahead(2).text == "with") {
      Pos pos = here();
      advance();  // {
      Label var = name("record variable");
      expect_word("with");
      std::vector<std::pair<Label, Label>> fields;
      std::set<std::string> seen;
      for (;;) {
        std::string l = name("field label");
        if (!seen.insert(l).second) fail_at(pos, "duplicate label " + l);
        expect(Tok::Eq, "'='");
        fields.emplace_back(std::move(l), name("variable"));
        if (at(Tok::RBrace)) break;
        expect(Tok::Semi, "';' or '}'");
      }
      advance();
      return r_update(std::move(var), std::move(fields), pos);
    }
    Pos pos = here();
    return r_arg(braced_arg(), pos);
  }

  RhsPtr match_rhs() {
    Pos pos = here();
    expect_word("match");
    Label scrut = name("variable");
    expect_word("with");
    std::vector<RhsBranch> branches;
    std::set<std::string> seen;  // duplicate ctors are the typer's business
    if (at(Tok::Pipe)) advance();
    for (;;) {
      Pos bpos = here();
      std::string c = ctor_name();
      std::string binder = name("binder variable");
      expect(Tok::Arrow, "'->'");
      branches.push_back({std::move(c), std::move(binder), rhs(), bpos});
      if (at(Tok::Pipe)) {
        advance();
        continue;
      }
      break;
    }
    expect_word("end");
    if (branches.empty()) fail_at(pos, "match needs at least one branch");
    return r_match(std::move(scrut), std::move(branches), pos);
  }

  // ---- instructions ----

  InstrPtr instruction() {
    Pos pos = here();
    if (at_word("noop")) {
      advance();
      return i_noop(pos);
    }
    if (at_word("drop")) {
      advance();
      return i_drop(name("variable"), pos);
    }
    if (at_word("match")) return match_instr();
    // `lhs = rhs` if an assignment target is ahead; a bare rhs otherwise.
    if (at(Tok::Ident) && !reserved_words().count(cur().text) && ahead().kind == Tok::Eq) {
      Label x = advance().text;
      advance();  // =
      return i_assign({VarLhs{std::move(x)}, pos}, rhs(), pos);
    }
    if (at(Tok::LParen) && tuple_pattern_ahead()) return tuple_assign();
    if (at(Tok::LBrace) && pattern_ahead()) return record_assign();
    return i_exec(rhs(), pos);
  }

  // Does the `{...}` ahead close with an '=' after it (a record pattern)?
  bool pattern_ahead() const {
    std::size_t probe = idx_ + 1;
    int depth = 1;
    while (depth > 0 && toks_[probe].kind != Tok::End) {
      Tok k = toks_[probe].kind;
      if (k == Tok::LBrace) ++depth;
      if (k == Tok::RBrace) --depth;
      ++probe;
    }
    return toks_[probe].kind == Tok::Eq;
  }

  // `(a, b) = ...`
  bool tuple_pattern_ahead() const {
    return ahead(1).kind == Tok::Ident && ahead(2).kind == Tok::Comma &&
           ahead(3).kind == Tok::Ident && ahead(4).kind == Tok::RParen &&
           ahead(5).kind == Tok::Eq;
  }

  InstrPtr tuple_assign() {
    Pos pos = here();
    advance();  // (
    Label a = name("variable");
    expect(Tok::Comma, "','");
    Label b = name("variable");
    expect(Tok::RParen, "')'");
    expect(Tok::Eq, "'='");
    if (a == b) fail_at(pos, "tuple pattern binds " + a + " twice");
    // `(a, b) = rhs` is sugar for the record pattern over dup's result.
    return i_assign({RecordLhs{{{"car", a}, {"cdr", b}}}, pos}, rhs(), pos);
  }

  InstrPtr record_assign() {
    Pos pos = here();
    advance();  // {
    std::vector<std::pair<Label, Label>> fields;
    std::set<std::string> labels, vars;
    while (!at(Tok::RBrace)) {
      std::string l = name("field label");
      if (!labels.insert(l).second) fail_at(pos, "duplicate label " + l + " in pattern");
      expect(Tok::Eq, "'='");
      std::string v = name("variable");
      if (!vars.insert(v).second)
        fail_at(pos, "pattern binds variable " + v + " twice");
      fields.emplace_back(std::move(l), std::move(v));
      if (!at(Tok::RBrace)) expect(Tok::Semi, "';' or '}'");
    }
    advance();
    expect(Tok::Eq, "'='");
    return i_assign({RecordLhs{std::move(fields)}, pos}, rhs(), pos);
  }

  InstrPtr match_instr() {
    Pos pos = here();
    expect_word("match");
    Label scrut = name("variable");
    expect_word("with");
    std::vector<InstrBranch> branches;
    if (at(Tok::Pipe)) advance();
    for (;;) {
      Pos bpos = here();
      std::string c = ctor_name();
      std::string binder = name("binder variable");
      expect(Tok::Arrow, "'->'");
      branches.push_back({std::move(c), std::move(binder), instr_seq(), bpos});
      if (at(Tok::Pipe)) {
        advance();
        continue;
      }
      break;
    }
    expect_word("end");
    if (branches.empty()) fail_at(pos, "match needs at least one branch");
    return i_match(std::move(scrut), std::move(branches), pos);
  }

  bool at_seq_end() const {
    return at(Tok::End) || at(Tok::Pipe) || at_word("end") || at_word("def") ||
           at_word("type");
  }

  // A non-empty `;`-separated instruction sequence, right-associated.
  InstrPtr instr_seq() {
    std::vector<InstrPtr> instrs;
    instrs.push_back(instruction());
    while (at(Tok::Semi)) {
      advance();
      if (at_seq_end()) break;  // tolerate one trailing ';'
      instrs.push_back(instruction());
    }
    InstrPtr out = instrs.back();
    for (std::size_t i = instrs.size() - 1; i-- > 0;)
      out = i_seq(instrs[i], out, instrs[i]->pos);
    return out;
  }

  TypeAlias alias_decl() {
    Pos pos = here();
    expect_word("type");
    Label n = name("type alias name");
    expect(Tok::Eq, "'='");
    return {std::move(n), type(), pos};
  }

  FuncDef func_def() {
    Pos pos = here();
    expect_word("def");
    Label n = name("function name");
    expect(Tok::Colon, "':'");
    TypePtr input = type();
    expect(Tok::Arrow, "'->'");
    TypePtr output = type();
    expect(Tok::Eq, "'='");
    InstrPtr body = instr_seq();
    return {std::move(n), std::move(input), std::move(output), std::move(body), pos};
  }

  std::vector<Token> toks_;
  std::size_t idx_ = 0;
};

}  // namespace

Program parse_program(const std::string& source) {
  return Parser(Lexer(source).run()).program();
}

ValuePtr parse_value_text(const std::string& source) {
  return Parser(Lexer(source).run()).value_text();
}

TypePtr parse_type_text(const std::string& source) {
  return Parser(Lexer(source).run()).type_text();
}

}  // namespace albert
