#include "albert/types.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace albert {

const char* type_error_kind_name(TypeErrorKind k) {
  switch (k) {
    case TypeErrorKind::UnboundVariable: return "UnboundVariable";
    case TypeErrorKind::VariableAlreadyBound: return "VariableAlreadyBound";
    case TypeErrorKind::LinearityLeftover: return "LinearityLeftover";
    case TypeErrorKind::TypeMismatch: return "TypeMismatch";
    case TypeErrorKind::UnknownConstructor: return "UnknownConstructor";
    case TypeErrorKind::NonExhaustiveMatch: return "NonExhaustiveMatch";
    case TypeErrorKind::DuplicateBranch: return "DuplicateBranch";
    case TypeErrorKind::UnknownFunction: return "UnknownFunction";
    case TypeErrorKind::JoinClash: return "JoinClash";
  }
  return "TypeError";
}

TypeError::TypeError(TypeErrorKind kind, Pos pos, const std::string& detail)
    : std::runtime_error(detail), kind(kind), pos(pos) {}

// ---------------------------------------------------------------------------
// Env
// ---------------------------------------------------------------------------

Env Env::from_record(const TypePtr& record_type) {
  auto* r = record_type ? std::get_if<RecordTy>(&record_type->node) : nullptr;
  if (!r) internal_error("environment built from a non-record type");
  Env env;
  for (const auto& [l, t] : r->fields) env.bind(l, t);
  return env;
}

static TypeFields::const_iterator find_label(const TypeFields& items, const Label& name) {
  auto it = std::lower_bound(
      items.begin(), items.end(), name,
      [](const auto& item, const Label& n) { return item.first < n; });
  if (it != items.end() && it->first == name) return it;
  return items.end();
}

bool Env::contains(const Label& name) const {
  return find_label(items_, name) != items_.end();
}

TypePtr Env::lookup(const Label& name) const {
  auto it = find_label(items_, name);
  return it == items_.end() ? nullptr : it->second;
}

void Env::bind(const Label& name, TypePtr type, Pos pos) {
  auto it = std::lower_bound(
      items_.begin(), items_.end(), name,
      [](const auto& item, const Label& n) { return item.first < n; });
  if (it != items_.end() && it->first == name)
    throw TypeError(TypeErrorKind::VariableAlreadyBound, pos,
                    "variable " + name + " is already bound");
  items_.emplace(it, name, std::move(type));
}

TypePtr Env::take(const Label& name, Pos pos) {
  auto it = find_label(items_, name);
  if (it == items_.end())
    throw TypeError(TypeErrorKind::UnboundVariable, pos,
                    "variable " + name +
                        " is not bound here; bindings are linear, so a variable is "
                        "gone after its first use");
  TypePtr t = it->second;
  items_.erase(it);
  return t;
}

void Env::remove_all(const Env& consumed) {
  for (const auto& [l, t] : consumed.items_) {
    auto it = find_label(items_, l);
    if (it == items_.end()) internal_error("remove_all: " + l + " absent");
    items_.erase(it);
  }
}

TypePtr Env::to_record() const { return t_record(items_); }

bool Env::operator==(const Env& other) const {
  if (items_.size() != other.items_.size()) return false;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (items_[i].first != other.items_[i].first ||
        !equal_types(items_[i].second, other.items_[i].second))
      return false;
  }
  return true;
}

Env join(const Env& a, const Env& b) {
  Env out = a;
  for (const auto& [l, t] : b.items()) {
    if (out.contains(l))
      throw TypeError(TypeErrorKind::JoinClash, {},
                      "environments overlap on label " + l);
    out.bind(l, t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generic type rewriting over programs
//
// Alias inlining and normalization are both "apply f to every type reachable
// from the program": function signatures, construct annotations, and the
// element types stored inside value literals.
// ---------------------------------------------------------------------------

namespace {

using TypeFn = std::function<TypePtr(const TypePtr&)>;

ValuePtr rewrite_value_types(const ValuePtr& v, const TypeFn& f);

ArgPtr rewrite_arg(const ArgPtr& a, const TypeFn& f) {
  if (auto* val = std::get_if<ValArg>(&a->node))
    return a_val(rewrite_value_types(val->value, f), a->pos);
  return a;
}

ValuePtr rewrite_value_types(const ValuePtr& v, const TypeFn& f) {
  if (auto* x = std::get_if<RecordVal>(&v->node)) {
    ValueFields fields;
    fields.reserve(x->fields.size());
    for (const auto& [l, fv] : x->fields)
      fields.emplace_back(l, rewrite_value_types(fv, f));
    return v_record(std::move(fields));
  }
  if (auto* x = std::get_if<VariantVal>(&v->node))
    return v_variant(x->ctor, rewrite_value_types(x->payload, f), f(x->type));
  if (auto* x = std::get_if<SomeVal>(&v->node))
    return v_some(rewrite_value_types(x->payload, f));
  if (auto* x = std::get_if<NoneVal>(&v->node))
    return v_none(x->elem ? f(x->elem) : nullptr);
  if (auto* x = std::get_if<ListVal>(&v->node)) {
    std::vector<ValuePtr> elems;
    elems.reserve(x->elems.size());
    for (const auto& e : x->elems) elems.push_back(rewrite_value_types(e, f));
    return v_list(std::move(elems), x->elem ? f(x->elem) : nullptr);
  }
  if (auto* x = std::get_if<MapVal>(&v->node)) {
    std::vector<std::pair<ValuePtr, ValuePtr>> entries;
    entries.reserve(x->entries.size());
    for (const auto& [k, val] : x->entries)
      entries.emplace_back(rewrite_value_types(k, f), rewrite_value_types(val, f));
    return v_map(std::move(entries), x->key ? f(x->key) : nullptr,
                 x->val ? f(x->val) : nullptr);
  }
  return v;  // leaves carry no types
}

RhsPtr rewrite_rhs(const RhsPtr& r, const TypeFn& f) {
  struct Visit {
    const TypeFn& f;
    const RhsPtr& r;
    RhsPtr operator()(const ArgRhs& x) const { return r_arg(rewrite_arg(x.arg, f), r->pos); }
    RhsPtr operator()(const ApplyRhs& x) const {
      return r_apply(x.fn, rewrite_arg(x.arg, f), r->pos);
    }
    RhsPtr operator()(const ProjRhs&) const { return r; }
    RhsPtr operator()(const UpdateRhs&) const { return r; }
    RhsPtr operator()(const MapUpdateRhs& x) const {
      return r_mapupdate(x.map, rewrite_arg(x.key, f), rewrite_arg(x.val, f), r->pos);
    }
    RhsPtr operator()(const BinOpRhs&) const { return r; }
    RhsPtr operator()(const ConstructRhs& x) const {
      return r_construct(x.ctor, rewrite_arg(x.arg, f),
                         x.annot ? f(x.annot) : nullptr, r->pos);
    }
    RhsPtr operator()(const MatchRhs& x) const {
      std::vector<RhsBranch> branches;
      branches.reserve(x.branches.size());
      for (const auto& b : x.branches)
        branches.push_back({b.ctor, b.binder, rewrite_rhs(b.body, f), b.pos});
      return r_match(x.scrutinee, std::move(branches), r->pos);
    }
  };
  return std::visit(Visit{f, r}, r->node);
}

InstrPtr rewrite_instr(const InstrPtr& i, const TypeFn& f) {
  struct Visit {
    const TypeFn& f;
    const InstrPtr& i;
    InstrPtr operator()(const NoopInstr&) const { return i; }
    InstrPtr operator()(const SeqInstr& x) const {
      return i_seq(rewrite_instr(x.first, f), rewrite_instr(x.second, f), i->pos);
    }
    InstrPtr operator()(const AssignInstr& x) const {
      return i_assign(x.lhs, rewrite_rhs(x.rhs, f), i->pos);
    }
    InstrPtr operator()(const DropInstr&) const { return i; }
    InstrPtr operator()(const MatchInstr& x) const {
      std::vector<InstrBranch> branches;
      branches.reserve(x.branches.size());
      for (const auto& b : x.branches)
        branches.push_back({b.ctor, b.binder, rewrite_instr(b.body, f), b.pos});
      return i_match(x.scrutinee, std::move(branches), i->pos);
    }
    InstrPtr operator()(const ExecInstr& x) const {
      return i_exec(rewrite_rhs(x.rhs, f), i->pos);
    }
  };
  return std::visit(Visit{f, i}, i->node);
}

Program rewrite_program(const Program& p, const TypeFn& f, bool keep_aliases) {
  Program out;
  if (keep_aliases) {
    out.aliases.reserve(p.aliases.size());
    for (const auto& a : p.aliases) out.aliases.push_back({a.name, f(a.type), a.pos});
  }
  out.functions.reserve(p.functions.size());
  for (const auto& fn : p.functions) {
    out.functions.push_back(
        {fn.name, f(fn.input), f(fn.output), rewrite_instr(fn.body, f), fn.pos});
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Alias inlining
// ---------------------------------------------------------------------------

namespace {

struct AliasResolver {
  std::map<Label, TypePtr> defs;
  std::map<Label, TypePtr> resolved;
  std::set<Label> in_progress;

  TypePtr expand(const TypePtr& t, Pos pos) {
    struct Visit {
      AliasResolver& self;
      Pos pos;
      const TypePtr& t;
      TypePtr operator()(const PrimTy&) const { return t; }
      TypePtr operator()(const RecordTy& x) const {
        TypeFields fields;
        fields.reserve(x.fields.size());
        for (const auto& [l, ft] : x.fields) fields.emplace_back(l, self.expand(ft, pos));
        return t_record(std::move(fields));
      }
      TypePtr operator()(const VariantTy& x) const {
        TypeFields ctors;
        ctors.reserve(x.ctors.size());
        for (const auto& [l, ct] : x.ctors) ctors.emplace_back(l, self.expand(ct, pos));
        return t_variant(std::move(ctors));
      }
      TypePtr operator()(const ListTy& x) const { return t_list(self.expand(x.elem, pos)); }
      TypePtr operator()(const OptionTy& x) const {
        return t_option(self.expand(x.elem, pos));
      }
      TypePtr operator()(const MapTy& x) const {
        return t_map(self.expand(x.key, pos), self.expand(x.val, pos));
      }
      TypePtr operator()(const AliasTy& x) const { return self.resolve(x.name, pos); }
    };
    return std::visit(Visit{*this, pos, t}, t->node);
  }

  TypePtr resolve(const Label& name, Pos pos) {
    if (auto it = resolved.find(name); it != resolved.end()) return it->second;
    auto def = defs.find(name);
    if (def == defs.end())
      throw TypeError(TypeErrorKind::TypeMismatch, pos, "unknown type alias " + name);
    if (!in_progress.insert(name).second)
      throw TypeError(TypeErrorKind::TypeMismatch, pos,
                      "type aliases form a cycle through " + name);
    TypePtr full = expand(def->second, pos);
    in_progress.erase(name);
    resolved.emplace(name, full);
    return full;
  }
};

}  // namespace

Program inline_aliases(const Program& p) {
  AliasResolver resolver;
  for (const auto& a : p.aliases) {
    if (!resolver.defs.emplace(a.name, a.type).second)
      throw TypeError(TypeErrorKind::TypeMismatch, a.pos,
                      "type alias " + a.name + " is defined twice");
  }
  // Forcing every alias up front reports cycles even in unused definitions.
  for (const auto& a : p.aliases) resolver.resolve(a.name, a.pos);
  return rewrite_program(
      p, [&](const TypePtr& t) { return resolver.expand(t, {}); },
      /*keep_aliases=*/false);
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

static TypeFields sorted_fields(const TypeFields& fields) {
  TypeFields out;
  out.reserve(fields.size());
  for (const auto& [l, t] : fields) out.emplace_back(l, normalize_type(t));
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

TypePtr normalize_type(const TypePtr& t) {
  struct Visit {
    const TypePtr& t;
    TypePtr operator()(const PrimTy&) const { return t; }
    TypePtr operator()(const RecordTy& x) const { return t_record(sorted_fields(x.fields)); }
    TypePtr operator()(const VariantTy& x) const {
      return t_variant(sorted_fields(x.ctors));
    }
    TypePtr operator()(const ListTy& x) const { return t_list(normalize_type(x.elem)); }
    TypePtr operator()(const OptionTy& x) const { return t_option(normalize_type(x.elem)); }
    TypePtr operator()(const MapTy& x) const {
      return t_map(normalize_type(x.key), normalize_type(x.val));
    }
    TypePtr operator()(const AliasTy&) const {
      internal_error("normalize_type on a type containing aliases");
    }
  };
  return std::visit(Visit{t}, t->node);
}

Program normalize_program(const Program& p) {
  return rewrite_program(p, [](const TypePtr& t) { return normalize_type(t); },
                         /*keep_aliases=*/true);
}

ValuePtr normalize_value(const ValuePtr& v) {
  return rewrite_value_types(v, [](const TypePtr& t) { return normalize_type(t); });
}

// ---------------------------------------------------------------------------
// Well-formedness
// ---------------------------------------------------------------------------

static bool comparable_leaf(const TypePtr& t) {
  auto* p = std::get_if<PrimTy>(&t->node);
  return p && p->prim != Prim::Operation;
}

static void well_formed_at(const TypePtr& t, const std::string& path) {
  struct Visit {
    const std::string& path;
    void check_fields(const TypeFields& fields, const char* what) const {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0 && !(fields[i - 1].first < fields[i].first))
          throw TypeError(TypeErrorKind::TypeMismatch, {},
                          path + ": " + what + " labels not strictly increasing (" +
                              fields[i - 1].first + " before " + fields[i].first + ")");
        well_formed_at(fields[i].second, path + "." + fields[i].first);
      }
    }
    void operator()(const PrimTy&) const {}
    void operator()(const RecordTy& x) const { check_fields(x.fields, "record"); }
    void operator()(const VariantTy& x) const {
      if (x.ctors.empty())
        throw TypeError(TypeErrorKind::TypeMismatch, {},
                        path + ": variant with zero constructors");
      check_fields(x.ctors, "variant");
    }
    void operator()(const ListTy& x) const { well_formed_at(x.elem, path + ".elem"); }
    void operator()(const OptionTy& x) const { well_formed_at(x.elem, path + ".elem"); }
    void operator()(const MapTy& x) const {
      if (!comparable_leaf(x.key))
        throw TypeError(TypeErrorKind::TypeMismatch, {},
                        path + ": map key type is not a comparable leaf");
      // Map contents are storable data; operations are runtime artifacts
      // with no literal form and cannot be put into (or pushed as) a map.
      if (contains_operation(x.val))
        throw TypeError(TypeErrorKind::TypeMismatch, {},
                        path + ": map values cannot contain operation");
      well_formed_at(x.val, path + ".val");
    }
    void operator()(const AliasTy& x) const {
      throw TypeError(TypeErrorKind::TypeMismatch, {},
                      path + ": unresolved type alias " + x.name);
    }
  };
  std::visit(Visit{path}, t->node);
}

void well_formed(const TypePtr& t) { well_formed_at(t, "type"); }

bool contains_operation(const TypePtr& t) {
  if (const auto* p = std::get_if<PrimTy>(&t->node)) return p->prim == Prim::Operation;
  if (const auto* r = std::get_if<RecordTy>(&t->node)) {
    for (const auto& [label, ft] : r->fields)
      if (contains_operation(ft)) return true;
    return false;
  }
  if (const auto* v = std::get_if<VariantTy>(&t->node)) {
    for (const auto& [label, ct] : v->ctors)
      if (contains_operation(ct)) return true;
    return false;
  }
  if (const auto* l = std::get_if<ListTy>(&t->node)) return contains_operation(l->elem);
  if (const auto* o = std::get_if<OptionTy>(&t->node)) return contains_operation(o->elem);
  if (const auto* m = std::get_if<MapTy>(&t->node))
    return contains_operation(m->key) || contains_operation(m->val);
  return false;  // aliases are resolved before this question is asked
}

bool type_equal(const TypePtr& a, const TypePtr& b) { return equal_types(a, b); }

}  // namespace albert
