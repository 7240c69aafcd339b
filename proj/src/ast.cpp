#include "albert/ast.hpp"

#include <algorithm>
#include <limits>

namespace albert {

void internal_error(const std::string& msg) { throw InternalError(msg); }

// ---------------------------------------------------------------------------
// Type constructors
// ---------------------------------------------------------------------------

static TypePtr make_type(AlbertType t) {
  return std::make_shared<const AlbertType>(std::move(t));
}

TypePtr t_prim(Prim p) {
  // The six leaves are shared singletons; everything compares structurally
  // anyway, this just avoids millions of tiny allocations.
  static const TypePtr cache[] = {
      make_type({PrimTy{Prim::Nat}}),    make_type({PrimTy{Prim::Int}}),
      make_type({PrimTy{Prim::String}}), make_type({PrimTy{Prim::Mutez}}),
      make_type({PrimTy{Prim::Bool}}),   make_type({PrimTy{Prim::Operation}}),
  };
  return cache[static_cast<int>(p)];
}

TypePtr t_nat() { return t_prim(Prim::Nat); }
TypePtr t_int() { return t_prim(Prim::Int); }
TypePtr t_string() { return t_prim(Prim::String); }
TypePtr t_mutez() { return t_prim(Prim::Mutez); }
TypePtr t_bool() { return t_prim(Prim::Bool); }
TypePtr t_operation() { return t_prim(Prim::Operation); }

TypePtr t_unit() {
  static const TypePtr unit = make_type({RecordTy{{}}});
  return unit;
}

TypePtr t_record(TypeFields fields) { return make_type({RecordTy{std::move(fields)}}); }

TypePtr t_variant(TypeFields ctors) {
  if (ctors.empty()) internal_error("variant type with zero constructors");
  return make_type({VariantTy{std::move(ctors)}});
}

TypePtr t_list(TypePtr elem) { return make_type({ListTy{std::move(elem)}}); }
TypePtr t_option(TypePtr elem) { return make_type({OptionTy{std::move(elem)}}); }
TypePtr t_map(TypePtr key, TypePtr val) {
  return make_type({MapTy{std::move(key), std::move(val)}});
}
TypePtr t_alias(Label name) { return make_type({AliasTy{std::move(name)}}); }

static bool equal_type_fields(const TypeFields& a, const TypeFields& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].first != b[i].first || !equal_types(a[i].second, b[i].second))
      return false;
  }
  return true;
}

bool equal_types(const TypePtr& a, const TypePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  struct Cmp {
    const AlbertType& rhs;
    bool operator()(const PrimTy& x) const {
      return x.prim == std::get<PrimTy>(rhs.node).prim;
    }
    bool operator()(const RecordTy& x) const {
      return equal_type_fields(x.fields, std::get<RecordTy>(rhs.node).fields);
    }
    bool operator()(const VariantTy& x) const {
      return equal_type_fields(x.ctors, std::get<VariantTy>(rhs.node).ctors);
    }
    bool operator()(const ListTy& x) const {
      return equal_types(x.elem, std::get<ListTy>(rhs.node).elem);
    }
    bool operator()(const OptionTy& x) const {
      return equal_types(x.elem, std::get<OptionTy>(rhs.node).elem);
    }
    bool operator()(const MapTy& x) const {
      const auto& o = std::get<MapTy>(rhs.node);
      return equal_types(x.key, o.key) && equal_types(x.val, o.val);
    }
    bool operator()(const AliasTy& x) const {
      return x.name == std::get<AliasTy>(rhs.node).name;
    }
  };
  return std::visit(Cmp{*b}, a->node);
}

// ---------------------------------------------------------------------------
// Value constructors
// ---------------------------------------------------------------------------

static ValuePtr make_value(Value v) {
  return std::make_shared<const Value>(std::move(v));
}

ValuePtr v_nat(big_int v) {
  if (v < 0) internal_error("nat literal below zero");
  return make_value({NatVal{std::move(v)}});
}
ValuePtr v_int(big_int v) { return make_value({IntVal{std::move(v)}}); }
ValuePtr v_mutez(std::int64_t v) {
  if (v < 0) internal_error("mutez literal below zero");
  return make_value({MutezVal{v}});
}
ValuePtr v_string(std::string v) { return make_value({StringVal{std::move(v)}}); }
ValuePtr v_bool(bool v) { return make_value({BoolVal{v}}); }

ValuePtr v_unit() {
  static const ValuePtr unit = make_value({RecordVal{{}}});
  return unit;
}

ValuePtr v_record(ValueFields fields) {
  std::stable_sort(fields.begin(), fields.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < fields.size(); ++i)
    if (fields[i - 1].first == fields[i].first)
      internal_error("record value with duplicate label " + fields[i].first);
  return make_value({RecordVal{std::move(fields)}});
}

ValuePtr v_variant(Label ctor, ValuePtr payload, TypePtr type) {
  return make_value({VariantVal{std::move(ctor), std::move(payload), std::move(type)}});
}
ValuePtr v_some(ValuePtr payload) { return make_value({SomeVal{std::move(payload)}}); }
ValuePtr v_none(TypePtr elem) { return make_value({NoneVal{std::move(elem)}}); }
ValuePtr v_list(std::vector<ValuePtr> elems, TypePtr elem) {
  return make_value({ListVal{std::move(elems), std::move(elem)}});
}

ValuePtr v_map(std::vector<std::pair<ValuePtr, ValuePtr>> entries, TypePtr key,
               TypePtr val) {
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return compare_values(a.first, b.first) < 0;
  });
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (compare_values(entries[i - 1].first, entries[i].first) == 0)
      internal_error("map value with duplicate key");
  return make_value({MapVal{std::move(entries), std::move(key), std::move(val)}});
}

ValuePtr v_operation(std::string tag) { return make_value({OperationVal{std::move(tag)}}); }

// ---------------------------------------------------------------------------
// Value equality / ordering
// ---------------------------------------------------------------------------

bool equal_values(const ValuePtr& a, const ValuePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  struct Cmp {
    const Value& rhs;
    bool operator()(const NatVal& x) const { return x.v == std::get<NatVal>(rhs.node).v; }
    bool operator()(const IntVal& x) const { return x.v == std::get<IntVal>(rhs.node).v; }
    bool operator()(const MutezVal& x) const {
      return x.v == std::get<MutezVal>(rhs.node).v;
    }
    bool operator()(const StringVal& x) const {
      return x.v == std::get<StringVal>(rhs.node).v;
    }
    bool operator()(const BoolVal& x) const { return x.v == std::get<BoolVal>(rhs.node).v; }
    bool operator()(const RecordVal& x) const {
      const auto& o = std::get<RecordVal>(rhs.node);
      if (x.fields.size() != o.fields.size()) return false;
      for (std::size_t i = 0; i < x.fields.size(); ++i) {
        if (x.fields[i].first != o.fields[i].first ||
            !equal_values(x.fields[i].second, o.fields[i].second))
          return false;
      }
      return true;
    }
    bool operator()(const VariantVal& x) const {
      const auto& o = std::get<VariantVal>(rhs.node);
      return x.ctor == o.ctor && equal_values(x.payload, o.payload) &&
             equal_types(x.type, o.type);
    }
    bool operator()(const SomeVal& x) const {
      return equal_values(x.payload, std::get<SomeVal>(rhs.node).payload);
    }
    bool operator()(const NoneVal& x) const {
      const auto& o = std::get<NoneVal>(rhs.node);
      // Two Nones of the same option type are the same value regardless of how
      // much type information the literals happened to carry.
      return !x.elem || !o.elem || equal_types(x.elem, o.elem);
    }
    bool operator()(const ListVal& x) const {
      const auto& o = std::get<ListVal>(rhs.node);
      if (x.elems.size() != o.elems.size()) return false;
      for (std::size_t i = 0; i < x.elems.size(); ++i)
        if (!equal_values(x.elems[i], o.elems[i])) return false;
      return true;
    }
    bool operator()(const MapVal& x) const {
      const auto& o = std::get<MapVal>(rhs.node);
      if (x.entries.size() != o.entries.size()) return false;
      for (std::size_t i = 0; i < x.entries.size(); ++i) {
        if (!equal_values(x.entries[i].first, o.entries[i].first) ||
            !equal_values(x.entries[i].second, o.entries[i].second))
          return false;
      }
      return true;
    }
    bool operator()(const OperationVal& x) const {
      return x.tag == std::get<OperationVal>(rhs.node).tag;
    }
  };
  return std::visit(Cmp{*b}, a->node);
}

static int cmp_big(const big_int& a, const big_int& b) {
  return a < b ? -1 : (a > b ? 1 : 0);
}

int compare_values(const ValuePtr& a, const ValuePtr& b) {
  if (!a || !b) internal_error("compare_values on null");
  if (a->node.index() != b->node.index())
    internal_error("compare_values on differently shaped values");
  if (auto* x = std::get_if<NatVal>(&a->node))
    return cmp_big(x->v, std::get<NatVal>(b->node).v);
  if (auto* x = std::get_if<IntVal>(&a->node))
    return cmp_big(x->v, std::get<IntVal>(b->node).v);
  if (auto* x = std::get_if<MutezVal>(&a->node)) {
    auto y = std::get<MutezVal>(b->node).v;
    return x->v < y ? -1 : (x->v > y ? 1 : 0);
  }
  if (auto* x = std::get_if<StringVal>(&a->node))
    return x->v.compare(std::get<StringVal>(b->node).v);
  if (auto* x = std::get_if<BoolVal>(&a->node)) {
    bool y = std::get<BoolVal>(b->node).v;
    return x->v == y ? 0 : (x->v ? 1 : -1);
  }
  internal_error("compare_values on a non-comparable value");
}

// ---------------------------------------------------------------------------
// Typing of literals
// ---------------------------------------------------------------------------

TypePtr type_of_value(const ValuePtr& v) {
  if (!v) internal_error("type_of_value on null");
  struct Visit {
    TypePtr operator()(const NatVal&) const { return t_nat(); }
    TypePtr operator()(const IntVal&) const { return t_int(); }
    TypePtr operator()(const MutezVal&) const { return t_mutez(); }
    TypePtr operator()(const StringVal&) const { return t_string(); }
    TypePtr operator()(const BoolVal&) const { return t_bool(); }
    TypePtr operator()(const RecordVal& x) const {
      TypeFields fields;
      fields.reserve(x.fields.size());
      for (const auto& [l, fv] : x.fields) {
        TypePtr ft = type_of_value(fv);
        if (!ft) return nullptr;
        fields.emplace_back(l, std::move(ft));
      }
      return t_record(std::move(fields));
    }
    TypePtr operator()(const VariantVal& x) const { return x.type; }
    TypePtr operator()(const SomeVal& x) const {
      TypePtr pt = type_of_value(x.payload);
      return pt ? t_option(std::move(pt)) : nullptr;
    }
    TypePtr operator()(const NoneVal& x) const {
      return x.elem ? t_option(x.elem) : nullptr;
    }
    TypePtr operator()(const ListVal& x) const {
      return x.elem ? t_list(x.elem) : nullptr;
    }
    TypePtr operator()(const MapVal& x) const {
      return (x.key && x.val) ? t_map(x.key, x.val) : nullptr;
    }
    TypePtr operator()(const OperationVal&) const { return t_operation(); }
  };
  return std::visit(Visit{}, v->node);
}

bool value_has_type(const ValuePtr& v, const TypePtr& t) {
  if (!v || !t) return false;
  if (auto* p = std::get_if<PrimTy>(&t->node)) {
    switch (p->prim) {
      case Prim::Nat: return std::holds_alternative<NatVal>(v->node);
      case Prim::Int: return std::holds_alternative<IntVal>(v->node);
      case Prim::String: return std::holds_alternative<StringVal>(v->node);
      case Prim::Mutez: return std::holds_alternative<MutezVal>(v->node);
      case Prim::Bool: return std::holds_alternative<BoolVal>(v->node);
      case Prim::Operation: return std::holds_alternative<OperationVal>(v->node);
    }
    return false;
  }
  if (auto* r = std::get_if<RecordTy>(&t->node)) {
    auto* rv = std::get_if<RecordVal>(&v->node);
    if (!rv || rv->fields.size() != r->fields.size()) return false;
    for (std::size_t i = 0; i < r->fields.size(); ++i) {
      if (rv->fields[i].first != r->fields[i].first ||
          !value_has_type(rv->fields[i].second, r->fields[i].second))
        return false;
    }
    return true;
  }
  if (auto* vt = std::get_if<VariantTy>(&t->node)) {
    auto* vv = std::get_if<VariantVal>(&v->node);
    if (!vv || !equal_types(vv->type, t)) return false;
    for (const auto& [c, pt] : vt->ctors)
      if (c == vv->ctor) return value_has_type(vv->payload, pt);
    return false;
  }
  if (auto* l = std::get_if<ListTy>(&t->node)) {
    auto* lv = std::get_if<ListVal>(&v->node);
    if (!lv) return false;
    if (lv->elem && !equal_types(lv->elem, l->elem)) return false;
    if (!lv->elem && !lv->elems.empty()) return false;
    for (const auto& e : lv->elems)
      if (!value_has_type(e, l->elem)) return false;
    return true;
  }
  if (auto* o = std::get_if<OptionTy>(&t->node)) {
    if (auto* sv = std::get_if<SomeVal>(&v->node))
      return value_has_type(sv->payload, o->elem);
    if (auto* nv = std::get_if<NoneVal>(&v->node))
      return !nv->elem || equal_types(nv->elem, o->elem);
    return false;
  }
  if (auto* m = std::get_if<MapTy>(&t->node)) {
    auto* mv = std::get_if<MapVal>(&v->node);
    if (!mv) return false;
    if (mv->key && (!equal_types(mv->key, m->key) || !equal_types(mv->val, m->val)))
      return false;
    if (!mv->key && !mv->entries.empty()) return false;
    for (const auto& [k, val] : mv->entries)
      if (!value_has_type(k, m->key) || !value_has_type(val, m->val)) return false;
    return true;
  }
  return false;  // aliases must be inlined before inhabitation checks
}

namespace {

[[noreturn]] void retype_fail(const std::string& msg) { throw std::runtime_error(msg); }

bool fits_mutez(const big_int& v) {
  return v >= 0 && v <= big_int(std::numeric_limits<std::int64_t>::max());
}

}  // namespace

ValuePtr retype_value(const ValuePtr& v, const TypePtr& t) {
  if (!v || !t) internal_error("retype_value on null");
  if (std::holds_alternative<AliasTy>(t->node))
    retype_fail("type aliases cannot appear in value ascriptions");

  if (auto* p = std::get_if<PrimTy>(&t->node)) {
    switch (p->prim) {
      case Prim::Nat:
        if (std::holds_alternative<NatVal>(v->node)) return v;
        break;
      case Prim::Int:
        if (std::holds_alternative<IntVal>(v->node)) return v;
        // A bare non-negative numeral reads as nat; an int ascription re-reads it.
        if (auto* n = std::get_if<NatVal>(&v->node)) return v_int(n->v);
        break;
      case Prim::Mutez:
        if (std::holds_alternative<MutezVal>(v->node)) return v;
        if (auto* n = std::get_if<NatVal>(&v->node)) {
          if (!fits_mutez(n->v)) retype_fail("mutez literal out of range");
          return v_mutez(static_cast<std::int64_t>(n->v));
        }
        break;
      case Prim::String:
        if (std::holds_alternative<StringVal>(v->node)) return v;
        break;
      case Prim::Bool:
        if (std::holds_alternative<BoolVal>(v->node)) return v;
        break;
      case Prim::Operation:
        break;  // operations have no literal syntax
    }
    retype_fail("literal does not fit the ascribed primitive type");
  }

  if (auto* r = std::get_if<RecordTy>(&t->node)) {
    auto* rv = std::get_if<RecordVal>(&v->node);
    if (!rv) retype_fail("record type ascribed to a non-record literal");
    if (rv->fields.size() != r->fields.size())
      retype_fail("record literal has the wrong field count");
    // Both sides are sorted by label, so fields line up positionally.
    TypeFields sorted = r->fields;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    ValueFields out;
    out.reserve(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (rv->fields[i].first != sorted[i].first)
        retype_fail("record literal field '" + rv->fields[i].first +
                    "' does not match the ascribed type");
      out.emplace_back(sorted[i].first, retype_value(rv->fields[i].second, sorted[i].second));
    }
    return v_record(std::move(out));
  }

  if (auto* vt = std::get_if<VariantTy>(&t->node)) {
    auto* vv = std::get_if<VariantVal>(&v->node);
    if (!vv) retype_fail("variant type ascribed to a non-variant literal");
    for (const auto& [c, pt] : vt->ctors)
      if (c == vv->ctor) return v_variant(vv->ctor, retype_value(vv->payload, pt), t);
    retype_fail("constructor " + vv->ctor + " is not part of the ascribed variant");
  }

  if (auto* l = std::get_if<ListTy>(&t->node)) {
    auto* lv = std::get_if<ListVal>(&v->node);
    if (!lv) retype_fail("list type ascribed to a non-list literal");
    std::vector<ValuePtr> elems;
    elems.reserve(lv->elems.size());
    for (const auto& e : lv->elems) elems.push_back(retype_value(e, l->elem));
    return v_list(std::move(elems), l->elem);
  }

  if (auto* o = std::get_if<OptionTy>(&t->node)) {
    if (auto* sv = std::get_if<SomeVal>(&v->node))
      return v_some(retype_value(sv->payload, o->elem));
    if (std::holds_alternative<NoneVal>(v->node)) return v_none(o->elem);
    retype_fail("option type ascribed to a non-option literal");
  }

  if (auto* m = std::get_if<MapTy>(&t->node)) {
    if (auto* rv = std::get_if<RecordVal>(&v->node)) {
      // `{}` reads as the empty record; under a map ascription it is the empty map.
      if (rv->fields.empty()) return v_map({}, m->key, m->val);
      retype_fail("record literal where a map was ascribed");
    }
    auto* mv = std::get_if<MapVal>(&v->node);
    if (!mv) retype_fail("map type ascribed to a non-map literal");
    std::vector<std::pair<ValuePtr, ValuePtr>> entries;
    entries.reserve(mv->entries.size());
    for (const auto& [k, val] : mv->entries)
      entries.emplace_back(retype_value(k, m->key), retype_value(val, m->val));
    return v_map(std::move(entries), m->key, m->val);
  }

  retype_fail("unsupported ascription");
}

// ---------------------------------------------------------------------------
// Structural equality of instruction-level nodes
// ---------------------------------------------------------------------------

ArgPtr a_var(Label name, Pos pos) {
  return std::make_shared<const Arg>(Arg{VarArg{std::move(name)}, pos});
}
ArgPtr a_val(ValuePtr v, Pos pos) {
  return std::make_shared<const Arg>(Arg{ValArg{std::move(v)}, pos});
}
ArgPtr a_record(std::vector<std::pair<Label, Label>> fields, Pos pos) {
  return std::make_shared<const Arg>(Arg{RecordArg{std::move(fields)}, pos});
}

RhsPtr r_arg(ArgPtr arg, Pos pos) {
  return std::make_shared<const Rhs>(Rhs{ArgRhs{std::move(arg)}, pos});
}
RhsPtr r_apply(Label fn, ArgPtr arg, Pos pos) {
  return std::make_shared<const Rhs>(Rhs{ApplyRhs{std::move(fn), std::move(arg)}, pos});
}
RhsPtr r_proj(Label var, Label field, Pos pos) {
  return std::make_shared<const Rhs>(Rhs{ProjRhs{std::move(var), std::move(field)}, pos});
}
RhsPtr r_update(Label var, std::vector<std::pair<Label, Label>> fields, Pos pos) {
  return std::make_shared<const Rhs>(Rhs{UpdateRhs{std::move(var), std::move(fields)}, pos});
}
RhsPtr r_mapupdate(Label map, ArgPtr key, ArgPtr val, Pos pos) {
  return std::make_shared<const Rhs>(
      Rhs{MapUpdateRhs{std::move(map), std::move(key), std::move(val)}, pos});
}
RhsPtr r_binop(BinOpKind op, Label left, Label right, Pos pos) {
  return std::make_shared<const Rhs>(
      Rhs{BinOpRhs{op, std::move(left), std::move(right)}, pos});
}
RhsPtr r_construct(Label ctor, ArgPtr arg, TypePtr annot, Pos pos) {
  return std::make_shared<const Rhs>(
      Rhs{ConstructRhs{std::move(ctor), std::move(arg), std::move(annot)}, pos});
}
RhsPtr r_match(Label scrutinee, std::vector<RhsBranch> branches, Pos pos) {
  return std::make_shared<const Rhs>(
      Rhs{MatchRhs{std::move(scrutinee), std::move(branches)}, pos});
}

InstrPtr i_noop(Pos pos) {
  return std::make_shared<const Instruction>(Instruction{NoopInstr{}, pos});
}
InstrPtr i_seq(InstrPtr first, InstrPtr second, Pos pos) {
  return std::make_shared<const Instruction>(
      Instruction{SeqInstr{std::move(first), std::move(second)}, pos});
}
InstrPtr i_assign(Lhs lhs, RhsPtr rhs, Pos pos) {
  return std::make_shared<const Instruction>(
      Instruction{AssignInstr{std::move(lhs), std::move(rhs)}, pos});
}
InstrPtr i_drop(Label var, Pos pos) {
  return std::make_shared<const Instruction>(Instruction{DropInstr{std::move(var)}, pos});
}
InstrPtr i_match(Label scrutinee, std::vector<InstrBranch> branches, Pos pos) {
  return std::make_shared<const Instruction>(
      Instruction{MatchInstr{std::move(scrutinee), std::move(branches)}, pos});
}
InstrPtr i_exec(RhsPtr rhs, Pos pos) {
  return std::make_shared<const Instruction>(Instruction{ExecInstr{std::move(rhs)}, pos});
}

bool equal_args(const ArgPtr& a, const ArgPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  if (auto* x = std::get_if<VarArg>(&a->node))
    return x->name == std::get<VarArg>(b->node).name;
  if (auto* x = std::get_if<ValArg>(&a->node))
    return equal_values(x->value, std::get<ValArg>(b->node).value);
  return std::get<RecordArg>(a->node).fields == std::get<RecordArg>(b->node).fields;
}

bool equal_lhs(const Lhs& a, const Lhs& b) {
  if (a.node.index() != b.node.index()) return false;
  if (auto* x = std::get_if<VarLhs>(&a.node))
    return x->name == std::get<VarLhs>(b.node).name;
  return std::get<RecordLhs>(a.node).fields == std::get<RecordLhs>(b.node).fields;
}

bool equal_rhs(const RhsPtr& a, const RhsPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  if (auto* x = std::get_if<ArgRhs>(&a->node))
    return equal_args(x->arg, std::get<ArgRhs>(b->node).arg);
  if (auto* x = std::get_if<ApplyRhs>(&a->node)) {
    const auto& o = std::get<ApplyRhs>(b->node);
    return x->fn == o.fn && equal_args(x->arg, o.arg);
  }
  if (auto* x = std::get_if<ProjRhs>(&a->node)) {
    const auto& o = std::get<ProjRhs>(b->node);
    return x->var == o.var && x->field == o.field;
  }
  if (auto* x = std::get_if<UpdateRhs>(&a->node)) {
    const auto& o = std::get<UpdateRhs>(b->node);
    return x->var == o.var && x->fields == o.fields;
  }
  if (auto* x = std::get_if<MapUpdateRhs>(&a->node)) {
    const auto& o = std::get<MapUpdateRhs>(b->node);
    return x->map == o.map && equal_args(x->key, o.key) && equal_args(x->val, o.val);
  }
  if (auto* x = std::get_if<BinOpRhs>(&a->node)) {
    const auto& o = std::get<BinOpRhs>(b->node);
    return x->op == o.op && x->left == o.left && x->right == o.right;
  }
  if (auto* x = std::get_if<ConstructRhs>(&a->node)) {
    const auto& o = std::get<ConstructRhs>(b->node);
    if (x->ctor != o.ctor || !equal_args(x->arg, o.arg)) return false;
    if (!x->annot != !o.annot) return false;
    return !x->annot || equal_types(x->annot, o.annot);
  }
  const auto& x = std::get<MatchRhs>(a->node);
  const auto& o = std::get<MatchRhs>(b->node);
  if (x.scrutinee != o.scrutinee || x.branches.size() != o.branches.size()) return false;
  for (std::size_t i = 0; i < x.branches.size(); ++i) {
    if (x.branches[i].ctor != o.branches[i].ctor ||
        x.branches[i].binder != o.branches[i].binder ||
        !equal_rhs(x.branches[i].body, o.branches[i].body))
      return false;
  }
  return true;
}

bool equal_instructions(const InstrPtr& a, const InstrPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  if (std::holds_alternative<NoopInstr>(a->node)) return true;
  if (auto* x = std::get_if<SeqInstr>(&a->node)) {
    const auto& o = std::get<SeqInstr>(b->node);
    return equal_instructions(x->first, o.first) && equal_instructions(x->second, o.second);
  }
  if (auto* x = std::get_if<AssignInstr>(&a->node)) {
    const auto& o = std::get<AssignInstr>(b->node);
    return equal_lhs(x->lhs, o.lhs) && equal_rhs(x->rhs, o.rhs);
  }
  if (auto* x = std::get_if<DropInstr>(&a->node))
    return x->var == std::get<DropInstr>(b->node).var;
  if (auto* x = std::get_if<MatchInstr>(&a->node)) {
    const auto& o = std::get<MatchInstr>(b->node);
    if (x->scrutinee != o.scrutinee || x->branches.size() != o.branches.size())
      return false;
    for (std::size_t i = 0; i < x->branches.size(); ++i) {
      if (x->branches[i].ctor != o.branches[i].ctor ||
          x->branches[i].binder != o.branches[i].binder ||
          !equal_instructions(x->branches[i].body, o.branches[i].body))
        return false;
    }
    return true;
  }
  return equal_rhs(std::get<ExecInstr>(a->node).rhs, std::get<ExecInstr>(b->node).rhs);
}

bool equal_programs(const Program& a, const Program& b) {
  if (a.aliases.size() != b.aliases.size() || a.functions.size() != b.functions.size())
    return false;
  for (std::size_t i = 0; i < a.aliases.size(); ++i) {
    if (a.aliases[i].name != b.aliases[i].name ||
        !equal_types(a.aliases[i].type, b.aliases[i].type))
      return false;
  }
  for (std::size_t i = 0; i < a.functions.size(); ++i) {
    const auto& f = a.functions[i];
    const auto& g = b.functions[i];
    if (f.name != g.name || !equal_types(f.input, g.input) ||
        !equal_types(f.output, g.output) || !equal_instructions(f.body, g.body))
      return false;
  }
  return true;
}

}  // namespace albert
