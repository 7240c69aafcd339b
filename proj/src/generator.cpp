#include "albert/generator.hpp"

#include <algorithm>
#include <functional>
#include <iterator>
#include <set>

#include "albert/types.hpp"

namespace albert {

namespace {

const char* const kStringPool[] = {"", "a", "b", "yes", "no", "k1", "k2", "k3"};
const char* const kFieldPool[] = {"a", "b", "c", "d", "e", "f", "g", "h"};
const char* const kCtorPool[] = {"A", "B", "C", "D", "E"};

class Rand {
 public:
  explicit Rand(std::mt19937_64& rng) : rng_(rng) {}
  std::size_t pick(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }
  bool chance(unsigned num, unsigned den) { return pick(den) < num; }
  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64& rng_;
};

TypePtr random_leaf(Rand& r) {
  switch (r.pick(5)) {
    case 0: return t_nat();
    case 1: return t_int();
    case 2: return t_string();
    case 3: return t_mutez();
    default: return t_bool();
  }
}

TypePtr random_type(Rand& r, unsigned depth) {
  if (depth == 0 || r.chance(2, 5)) return random_leaf(r);
  switch (r.pick(6)) {
    case 0: {  // record, occasionally empty
      if (r.chance(1, 10)) return t_unit();
      std::size_t n = 1 + r.pick(4);
      std::set<std::size_t> picks;
      while (picks.size() < n) picks.insert(r.pick(8));
      TypeFields fields;
      for (std::size_t i : picks) fields.emplace_back(kFieldPool[i], random_type(r, depth - 1));
      return t_record(std::move(fields));
    }
    case 1: {  // variant with 1..3 constructors
      std::size_t n = 1 + r.pick(3);
      std::set<std::size_t> picks;
      while (picks.size() < n) picks.insert(r.pick(5));
      TypeFields ctors;
      for (std::size_t i : picks) ctors.emplace_back(kCtorPool[i], random_type(r, depth - 1));
      return t_variant(std::move(ctors));
    }
    case 2: return t_option(random_type(r, depth - 1));
    case 3: return t_list(random_type(r, depth - 1));
    case 4: return t_map(random_leaf(r), random_type(r, depth - 1));
    default: return random_leaf(r);
  }
}

ValuePtr value_of(Rand& r, const TypePtr& t) {
  if (const auto* p = std::get_if<PrimTy>(&t->node)) {
    switch (p->prim) {
      case Prim::Nat:
        if (r.chance(1, 20)) return v_nat(big_int("123456789012345678901234567890"));
        return v_nat(big_int(r.pick(101)));
      case Prim::Int: {
        big_int n(r.pick(101));
        if (r.chance(1, 2)) n = -n;
        return v_int(std::move(n));
      }
      case Prim::String:
        return v_string(kStringPool[r.pick(std::size(kStringPool))]);
      case Prim::Mutez:
        // Near-max values make mutez addition overflow now and then, which
        // exercises the failure path on both sides of the comparison.
        if (r.chance(1, 12)) return v_mutez(9223372036854775000LL);
        return v_mutez(static_cast<std::int64_t>(r.pick(1000001)));
      case Prim::Bool:
        return v_bool(r.chance(1, 2));
      case Prim::Operation:
        internal_error("operation values cannot be generated");
    }
  }
  if (const auto* rec = std::get_if<RecordTy>(&t->node)) {
    ValueFields fields;
    for (const auto& [label, ft] : rec->fields) fields.emplace_back(label, value_of(r, ft));
    return v_record(std::move(fields));
  }
  if (const auto* vt = std::get_if<VariantTy>(&t->node)) {
    const auto& c = vt->ctors[r.pick(vt->ctors.size())];
    return v_variant(c.first, value_of(r, c.second), t);
  }
  if (const auto* o = std::get_if<OptionTy>(&t->node)) {
    if (r.chance(1, 2)) return v_none(o->elem);
    return v_some(value_of(r, o->elem));
  }
  if (const auto* l = std::get_if<ListTy>(&t->node)) {
    std::vector<ValuePtr> elems;
    std::size_t n = r.pick(4);
    for (std::size_t i = 0; i < n; ++i) elems.push_back(value_of(r, l->elem));
    return v_list(std::move(elems), l->elem);
  }
  if (const auto* m = std::get_if<MapTy>(&t->node)) {
    std::vector<std::pair<ValuePtr, ValuePtr>> entries;
    std::size_t n = r.pick(4);
    for (std::size_t attempt = 0; attempt < n * 4 && entries.size() < n; ++attempt) {
      ValuePtr k = value_of(r, m->key);
      bool dup = false;
      for (const auto& [ek, ev] : entries)
        if (compare_values(ek, k) == 0) { dup = true; break; }
      if (!dup) entries.emplace_back(std::move(k), value_of(r, m->val));
    }
    return v_map(std::move(entries), m->key, m->val);
  }
  internal_error("cannot generate a value of an alias type");
}

// The canonical rhs for a literal: variant and Some literals read back as
// constructor syntax, so they are emitted that way from the start.
RhsPtr literal_rhs(ValuePtr v, const TypePtr& t) {
  if (const auto* var = std::get_if<VariantVal>(&v->node))
    return r_construct(var->ctor, a_val(var->payload), t);
  if (const auto* some = std::get_if<SomeVal>(&v->node))
    return r_construct("Some", a_val(some->payload), t);
  return r_arg(a_val(std::move(v)));
}

struct HelperInfo {
  Label name;
  std::vector<std::pair<Label, TypePtr>> inputs;  // sorted field -> type
  TypePtr out_type;                               // type of the single field r0
};

class Gen {
 public:
  Gen(std::uint64_t seed, std::size_t budget) : rng_(seed), r_(rng_), budget_(budget) {}

  Program run() {
    Program p;
    if (budget_ <= 1) {
      p.functions.push_back(FuncDef{"f0", t_unit(), t_unit(), i_noop(), Pos{}});
      return p;
    }
    std::size_t helper_count = 0;
    if (budget_ >= 12) helper_count = r_.pick(3);
    else if (budget_ >= 8) helper_count = r_.pick(2);
    std::size_t left = budget_;
    for (std::size_t i = 0; i < helper_count; ++i) {
      std::size_t slice = 3 + r_.pick(3);
      left -= std::min(left - 2, slice);
      p.functions.push_back(make_helper(i, slice));
    }
    p.functions.push_back(make_entry(std::max<std::size_t>(left, 2)));
    return p;
  }

 private:
  struct Ctx {
    Env env;
    std::vector<InstrPtr> instrs;
    bool failed = false;
    bool allow_calls = false;
    std::size_t call_limit = 0;  // helpers with index < call_limit are callable
  };

  Label fresh() { return "x" + std::to_string(next_var_++); }

  void emit_assign(Ctx& c, const Label& x, RhsPtr rhs, const TypePtr& t) {
    c.instrs.push_back(i_assign(Lhs{VarLhs{x}, Pos{}}, std::move(rhs), Pos{}));
    c.env.bind(x, t);
  }

  // --- individual actions; each returns false when not applicable ---------

  bool act_literal(Ctx& c) {
    TypePtr t;
    if (r_.chance(1, 3) && !c.env.items().empty()) {
      // Rebuild a type already in scope, so same-typed operand pairs appear.
      t = c.env.items()[r_.pick(c.env.items().size())].second;
    } else {
      t = random_type(r_, r_.pick(3));
    }
    if (contains_operation(t)) return false;
    Label x = fresh();
    emit_assign(c, x, literal_rhs(value_of(r_, t), t), t);
    return true;
  }

  bool act_dup(Ctx& c) {
    const Label* x = pick_var(c, [](const TypePtr&) { return true; });
    if (!x) return false;
    Label xv = *x;
    TypePtr tx = c.env.lookup(xv);
    RhsPtr rhs = r_apply("dup", a_var(xv));
    c.env.take(xv, Pos{});
    if (r_.chance(1, 2)) {
      Label a = fresh(), b = fresh();
      c.instrs.push_back(
          i_assign(Lhs{RecordLhs{{{"car", a}, {"cdr", b}}}, Pos{}}, std::move(rhs), Pos{}));
      c.env.bind(a, tx);
      c.env.bind(b, tx);
    } else {
      Label y = fresh();
      TypePtr rec = t_record({{"car", tx}, {"cdr", tx}});
      c.instrs.push_back(i_assign(Lhs{VarLhs{y}, Pos{}}, std::move(rhs), Pos{}));
      c.env.bind(y, rec);
    }
    return true;
  }

  bool act_drop(Ctx& c) {
    const Label* x = pick_var(c, [](const TypePtr&) { return true; });
    if (!x) return false;
    Label name = *x;
    c.instrs.push_back(i_drop(name));
    c.env.take(name, Pos{});
    return true;
  }

  bool act_proj(Ctx& c) {
    const Label* x = pick_var(c, [](const TypePtr& t) {
      const auto* rec = std::get_if<RecordTy>(&t->node);
      return rec && !rec->fields.empty();
    });
    if (!x) return false;
    Label src = *x;
    TypePtr tsrc = c.env.lookup(src);  // owned: keeps the fields alive past take
    const auto& rec = std::get<RecordTy>(tsrc->node);
    const auto& field = rec.fields[r_.pick(rec.fields.size())];
    Label y = fresh();
    RhsPtr rhs = r_proj(src, field.first);
    c.env.take(src, Pos{});
    emit_assign(c, y, std::move(rhs), field.second);
    return true;
  }

  bool act_update(Ctx& c) {
    const Label* x = pick_var(c, [](const TypePtr& t) {
      const auto* rec = std::get_if<RecordTy>(&t->node);
      return rec && !rec->fields.empty();
    });
    if (!x) return false;
    Label dst = *x;
    TypePtr tdst = c.env.lookup(dst);
    const auto& rec = std::get<RecordTy>(tdst->node);
    const auto& field = rec.fields[r_.pick(rec.fields.size())];
    const Label* src = pick_var(c, [&](const TypePtr& t) { return type_equal(t, field.second); },
                                &dst);
    if (!src) return false;
    Label s = *src;
    Label y = fresh();
    RhsPtr rhs = r_update(dst, {{field.first, s}});
    c.env.take(dst, Pos{});
    c.env.take(s, Pos{});
    emit_assign(c, y, std::move(rhs), tdst);
    return true;
  }

  bool act_mapget(Ctx& c) {
    const Label* m = pick_var(c, [](const TypePtr& t) {
      return std::holds_alternative<MapTy>(t->node);
    });
    if (!m) return false;
    Label mv = *m;
    TypePtr tmap = c.env.lookup(mv);  // owned: keeps key/val alive past take
    const auto& mt = std::get<MapTy>(tmap->node);
    const Label* k = pick_var(c, [&](const TypePtr& t) { return type_equal(t, mt.key); }, &mv);
    if (!k) return false;
    Label kv = *k;
    Label y = fresh();
    TypePtr out = t_option(mt.val);
    RhsPtr rhs = r_binop(BinOpKind::MapGet, mv, kv);
    c.env.take(mv, Pos{});
    c.env.take(kv, Pos{});
    emit_assign(c, y, std::move(rhs), out);
    return true;
  }

  bool act_mapupdate(Ctx& c) {
    const Label* m = pick_var(c, [](const TypePtr& t) {
      return std::holds_alternative<MapTy>(t->node);
    });
    if (!m) return false;
    Label mv = *m;
    TypePtr tmap = c.env.lookup(mv);
    const auto& mt = std::get<MapTy>(tmap->node);
    if (contains_operation(mt.val)) return false;
    c.env.take(mv, Pos{});
    ArgPtr key;
    const Label* kvar = pick_var(c, [&](const TypePtr& t) { return type_equal(t, mt.key); });
    if (kvar && r_.chance(2, 3)) {
      Label kv = *kvar;
      key = a_var(kv);
      c.env.take(kv, Pos{});
    } else {
      key = a_val(value_of(r_, mt.key));
    }
    ArgPtr val;
    TypePtr opt = t_option(mt.val);
    const Label* vvar = pick_var(c, [&](const TypePtr& t) { return type_equal(t, opt); });
    if (vvar && r_.chance(2, 3)) {
      Label vv = *vvar;
      val = a_var(vv);
      c.env.take(vv, Pos{});
    } else {
      val = a_val(value_of(r_, opt));
    }
    Label y = fresh();
    emit_assign(c, y, r_mapupdate(mv, std::move(key), std::move(val)), tmap);
    return true;
  }

  bool act_arith(Ctx& c, BinOpKind op) {
    auto addable = [](const TypePtr& t) {
      const auto* p = std::get_if<PrimTy>(&t->node);
      return p && (p->prim == Prim::Nat || p->prim == Prim::Int || p->prim == Prim::Mutez);
    };
    const Label* a = pick_var(c, addable);
    if (!a) return false;
    Label left = *a;
    TypePtr ta = c.env.lookup(left);
    const Label* b = pick_var(c, [&](const TypePtr& t) { return type_equal(t, ta); }, &left);
    if (!b) return false;
    Label right = *b;
    Label y = fresh();
    TypePtr out = op == BinOpKind::Add ? ta : t_bool();
    RhsPtr rhs = r_binop(op, left, right);
    c.env.take(left, Pos{});
    c.env.take(right, Pos{});
    emit_assign(c, y, std::move(rhs), out);
    return true;
  }

  bool act_amount(Ctx& c) {
    Label y = fresh();
    emit_assign(c, y, r_apply("amount", a_val(v_unit())), t_mutez());
    return true;
  }

  bool act_assert_some(Ctx& c) {
    const Label* o = pick_var(c, [](const TypePtr& t) {
      return std::holds_alternative<OptionTy>(t->node);
    });
    if (!o) return false;
    Label ov = *o;
    TypePtr elem = std::get<OptionTy>(c.env.lookup(ov)->node).elem;
    Label res = fresh();
    RhsPtr rhs = r_apply("assert_some", a_record({{"opt", ov}}));
    c.env.take(ov, Pos{});
    c.instrs.push_back(i_assign(Lhs{RecordLhs{{{"res", res}}}, Pos{}}, std::move(rhs), Pos{}));
    c.env.bind(res, elem);
    return true;
  }

  bool act_construct_some(Ctx& c) {
    const Label* x = pick_var(c, [](const TypePtr& t) { return !contains_operation(t); });
    if (!x) return false;
    Label xv = *x;
    TypePtr tx = c.env.lookup(xv);
    Label y = fresh();
    RhsPtr rhs = r_construct("Some", a_var(xv), nullptr);
    c.env.take(xv, Pos{});
    emit_assign(c, y, std::move(rhs), t_option(tx));
    return true;
  }

  bool act_construct_variant(Ctx& c) {
    const Label* x = pick_var(c, [](const TypePtr& t) { return !contains_operation(t); });
    if (!x) return false;
    Label xv = *x;
    TypePtr tx = c.env.lookup(xv);
    std::size_t extra = r_.pick(3);
    std::set<std::size_t> picks;
    while (picks.size() < extra + 1) picks.insert(r_.pick(5));
    TypeFields ctors;
    std::size_t slot = r_.pick(extra + 1);
    std::size_t at = 0;
    Label chosen;
    for (std::size_t i : picks) {
      if (at == slot) {
        chosen = kCtorPool[i];
        ctors.emplace_back(kCtorPool[i], tx);
      } else {
        ctors.emplace_back(kCtorPool[i], random_type(r_, 1));
      }
      ++at;
    }
    TypePtr vt = t_variant(std::move(ctors));
    Label y = fresh();
    RhsPtr rhs = r_construct(chosen, a_var(xv), vt);
    c.env.take(xv, Pos{});
    emit_assign(c, y, std::move(rhs), vt);
    return true;
  }

  // The constructor view of a matchable type, mirroring the typechecker.
  static std::vector<std::pair<Label, TypePtr>> match_view(const TypePtr& t) {
    if (const auto* p = std::get_if<PrimTy>(&t->node); p && p->prim == Prim::Bool)
      return {{"False", t_unit()}, {"True", t_unit()}};
    if (const auto* o = std::get_if<OptionTy>(&t->node))
      return {{"None", t_unit()}, {"Some", o->elem}};
    if (const auto* v = std::get_if<VariantTy>(&t->node)) return v->ctors;
    return {};
  }

  bool act_match_instr(Ctx& c) {
    const Label* s = pick_var(c, [](const TypePtr& t) { return !match_view(t).empty(); });
    if (!s) return false;
    Label sv = *s;
    auto view = match_view(c.env.lookup(sv));
    std::size_t fail_branch = view.size();  // none by default
    if (view.size() >= 2 && r_.chance(1, 4)) fail_branch = r_.pick(view.size());
    std::vector<InstrBranch> branches;
    for (std::size_t i = 0; i < view.size(); ++i) {
      Label binder = fresh();
      InstrPtr body;
      if (i == fail_branch) {
        body = i_assign(Lhs{VarLhs{fresh()}, Pos{}},
                        r_apply("failwith", a_val(v_string(kStringPool[r_.pick(8)]))), Pos{});
      } else {
        body = i_drop(binder);
      }
      branches.push_back(InstrBranch{view[i].first, binder, std::move(body), Pos{}});
    }
    c.instrs.push_back(i_match(sv, std::move(branches)));
    c.env.take(sv, Pos{});
    return true;
  }

  bool act_match_rhs(Ctx& c) {
    const Label* s = pick_var(c, [](const TypePtr& t) { return !match_view(t).empty(); });
    if (!s) return false;
    Label sv = *s;
    auto view = match_view(c.env.lookup(sv));
    // One branch yields its binder; every other branch fails, so all
    // non-failing branches trivially agree on the result type.
    std::size_t keep = r_.pick(view.size());
    std::vector<RhsBranch> branches;
    for (std::size_t i = 0; i < view.size(); ++i) {
      Label binder = fresh();
      RhsPtr body;
      if (i == keep) {
        body = r_arg(a_var(binder));
      } else {
        body = r_apply("failwith", a_val(v_string(kStringPool[r_.pick(8)])));
      }
      branches.push_back(RhsBranch{view[i].first, binder, std::move(body), Pos{}});
    }
    Label y = fresh();
    RhsPtr rhs = r_match(sv, std::move(branches));
    c.env.take(sv, Pos{});
    emit_assign(c, y, std::move(rhs), view[keep].second);
    return true;
  }

  bool act_call(Ctx& c, bool exec) {
    if (!c.allow_calls || c.call_limit == 0) return false;
    std::size_t start = r_.pick(c.call_limit);
    for (std::size_t probe = 0; probe < c.call_limit; ++probe) {
      const HelperInfo& h = helpers_[(start + probe) % c.call_limit];
      if (exec && c.env.lookup("r0")) continue;
      std::vector<std::pair<Label, Label>> args;
      std::set<Label> used;
      bool ok = true;
      for (const auto& [field, ft] : h.inputs) {
        const Label* v = pick_var(c, [&](const TypePtr& t) { return type_equal(t, ft); },
                                  nullptr, &used);
        if (!v) { ok = false; break; }
        used.insert(*v);
        args.emplace_back(field, *v);
      }
      if (!ok) continue;
      RhsPtr rhs = r_apply(h.name, a_record(args));
      for (const auto& [field, var] : args) c.env.take(var, Pos{});
      if (exec) {
        c.instrs.push_back(i_exec(std::move(rhs)));
        c.env.bind("r0", h.out_type);
      } else {
        Label y = fresh();
        emit_assign(c, y, std::move(rhs), t_record({{"r0", h.out_type}}));
      }
      return true;
    }
    return false;
  }

  // --- scaffolding ---------------------------------------------------------

  const Label* pick_var(Ctx& c, const std::function<bool(const TypePtr&)>& pred,
                        const Label* exclude = nullptr,
                        const std::set<Label>* exclude_set = nullptr) {
    const auto& items = c.env.items();
    std::vector<const Label*> cands;
    for (const auto& [name, t] : items) {
      if (exclude && name == *exclude) continue;
      if (exclude_set && exclude_set->count(name)) continue;
      if (pred(t)) cands.push_back(&name);
    }
    if (cands.empty()) return nullptr;
    return cands[r_.pick(cands.size())];
  }

  void actions(Ctx& c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      // Weighted roulette over applicable actions; inapplicable picks fall
      // back to a literal so the budget is always spent.
      struct Choice { int weight; std::function<bool()> go; };
      int drop_weight = c.env.items().size() > 6 ? 4 : 1;
      std::vector<Choice> table = {
          {3, [&] { return act_literal(c); }},
          {2, [&] { return act_dup(c); }},
          {drop_weight, [&] { return act_drop(c); }},
          {2, [&] { return act_proj(c); }},
          {2, [&] { return act_update(c); }},
          {2, [&] { return act_mapget(c); }},
          {2, [&] { return act_mapupdate(c); }},
          {2, [&] { return act_arith(c, BinOpKind::Add); }},
          {2, [&] { return act_arith(c, BinOpKind::Ge); }},
          {1, [&] { return act_amount(c); }},
          {2, [&] { return act_assert_some(c); }},
          {1, [&] { return act_construct_some(c); }},
          {1, [&] { return act_construct_variant(c); }},
          {2, [&] { return act_match_instr(c); }},
          {2, [&] { return act_match_rhs(c); }},
          {3, [&] { return act_call(c, false); }},
          {2, [&] { return act_call(c, true); }},
      };
      int total = 0;
      for (const auto& ch : table) total += ch.weight;
      int roll = static_cast<int>(r_.pick(static_cast<std::size_t>(total)));
      std::size_t idx = 0;
      for (; idx < table.size(); ++idx) {
        roll -= table[idx].weight;
        if (roll < 0) break;
      }
      if (!table[idx].go()) act_literal(c);
    }
  }

  InstrPtr fold_body(const std::vector<InstrPtr>& instrs) {
    if (instrs.empty()) return i_noop();
    InstrPtr acc = instrs.back();
    for (std::size_t i = instrs.size() - 1; i-- > 0;) acc = i_seq(instrs[i], acc);
    return acc;
  }

  FuncDef make_helper(std::size_t index, std::size_t slice) {
    Ctx c;
    std::vector<std::pair<Label, TypePtr>> inputs;
    inputs.emplace_back("p0", random_type(r_, 1));
    if (r_.chance(1, 3)) inputs.emplace_back("p1", random_type(r_, 1));
    for (const auto& [name, t] : inputs) c.env.bind(name, t);
    c.allow_calls = index > 0;
    c.call_limit = index;
    actions(c, slice);
    if (c.env.items().empty()) act_literal(c);
    if (c.env.items().empty()) {
      Label x = fresh();
      emit_assign(c, x, r_arg(a_val(v_nat(big_int(0)))), t_nat());
    }
    const auto& items = c.env.items();
    Label keep = items[r_.pick(items.size())].first;
    TypePtr out = c.env.lookup(keep);
    std::vector<Label> to_drop;
    for (const auto& [name, t] : items)
      if (name != keep) to_drop.push_back(name);
    for (const auto& name : to_drop) {
      c.instrs.push_back(i_drop(name));
      c.env.take(name, Pos{});
    }
    // Consume before binding: `keep` may itself be named r0 (an exec call
    // inside the body binds r0), and `r0 = r0` is legal under linearity.
    c.env.take(keep, Pos{});
    emit_assign(c, "r0", r_arg(a_var(keep)), out);
    HelperInfo info{"h" + std::to_string(index), inputs, out};
    helpers_.push_back(info);
    TypeFields in_fields;
    for (const auto& [name, t] : inputs) in_fields.emplace_back(name, t);
    return FuncDef{info.name, t_record(std::move(in_fields)),
                   t_record({{"r0", out}}), fold_body(c.instrs), Pos{}};
  }

  FuncDef make_entry(std::size_t slice) {
    TypePtr param_ty = random_type(r_, 2);
    TypePtr store_ty = random_type(r_, 2);
    Ctx c;
    c.env.bind("param", param_ty);
    c.env.bind("store", store_ty);
    c.allow_calls = true;
    c.call_limit = helpers_.size();
    actions(c, slice);
    if (r_.chance(1, 10)) {
      c.instrs.push_back(
          i_assign(Lhs{VarLhs{fresh()}, Pos{}},
                   r_apply("failwith", a_val(v_string(kStringPool[r_.pick(8)]))), Pos{}));
      c.failed = true;
    } else {
      finish_entry(c, store_ty);
    }
    TypePtr in = t_record({{"param", param_ty}, {"store", store_ty}});
    TypePtr out = t_record({{"operations", t_list(t_operation())}, {"store", store_ty}});
    return FuncDef{"main", in, out, fold_body(c.instrs), Pos{}};
  }

  void finish_entry(Ctx& c, const TypePtr& store_ty) {
    Label keep;
    if (c.env.lookup("store")) {
      keep = "store";
    } else {
      for (const auto& [name, t] : c.env.items())
        if (type_equal(t, store_ty)) { keep = name; break; }
    }
    std::vector<Label> to_drop;
    for (const auto& [name, t] : c.env.items())
      if (name != keep) to_drop.push_back(name);
    for (const auto& name : to_drop) {
      c.instrs.push_back(i_drop(name));
      c.env.take(name, Pos{});
    }
    if (keep.empty()) {
      emit_assign(c, "store", literal_rhs(value_of(r_, store_ty), store_ty),
                  store_ty);
    } else if (keep != "store") {
      RhsPtr rhs = r_arg(a_var(keep));
      c.env.take(keep, Pos{});
      emit_assign(c, "store", std::move(rhs), store_ty);
    }
    emit_assign(c, "operations", r_arg(a_val(v_list({}, t_operation()))),
                t_list(t_operation()));
  }

  std::mt19937_64 rng_;
  Rand r_;
  std::size_t budget_;
  std::size_t next_var_ = 0;
  std::vector<HelperInfo> helpers_;
};

void tally_rhs(const RhsPtr& r, std::map<std::string, std::size_t>& out);

void tally_instr(const InstrPtr& i, std::map<std::string, std::size_t>& out) {
  if (const auto* s = std::get_if<SeqInstr>(&i->node)) {
    tally_instr(s->first, out);
    tally_instr(s->second, out);
  } else if (const auto* a = std::get_if<AssignInstr>(&i->node)) {
    tally_rhs(a->rhs, out);
  } else if (const auto* m = std::get_if<MatchInstr>(&i->node)) {
    ++out["match_instr"];
    for (const auto& b : m->branches) tally_instr(b.body, out);
  } else if (const auto* e = std::get_if<ExecInstr>(&i->node)) {
    ++out["exec"];
    tally_rhs(e->rhs, out);
  } else if (std::holds_alternative<DropInstr>(i->node)) {
    ++out["drop"];
  }
}

void tally_rhs(const RhsPtr& r, std::map<std::string, std::size_t>& out) {
  if (std::holds_alternative<ArgRhs>(r->node)) {
    ++out["arg"];
  } else if (const auto* ap = std::get_if<ApplyRhs>(&r->node)) {
    if (ap->fn == "dup" || ap->fn == "amount" || ap->fn == "failwith" ||
        ap->fn == "assert_some")
      ++out["apply:" + ap->fn];
    else
      ++out["apply:call"];
  } else if (std::holds_alternative<ProjRhs>(r->node)) {
    ++out["proj"];
  } else if (std::holds_alternative<UpdateRhs>(r->node)) {
    ++out["update"];
  } else if (std::holds_alternative<MapUpdateRhs>(r->node)) {
    ++out["mapupdate"];
  } else if (const auto* b = std::get_if<BinOpRhs>(&r->node)) {
    switch (b->op) {
      case BinOpKind::Add: ++out["binop:add"]; break;
      case BinOpKind::Ge: ++out["binop:ge"]; break;
      case BinOpKind::MapGet: ++out["binop:mapget"]; break;
    }
  } else if (std::holds_alternative<ConstructRhs>(r->node)) {
    ++out["construct"];
  } else if (const auto* m = std::get_if<MatchRhs>(&r->node)) {
    ++out["match_rhs"];
    for (const auto& br : m->branches) tally_rhs(br.body, out);
  }
}

}  // namespace

Program generate_program(std::uint64_t seed, const GenConfig& cfg) {
  Gen g(seed, cfg.budget);
  return g.run();
}

ValuePtr generate_value(std::mt19937_64& rng, const TypePtr& t) {
  Rand r(rng);
  return value_of(r, t);
}

ValuePtr generate_input(std::uint64_t seed, const TypePtr& input_type) {
  std::mt19937_64 rng(seed);
  return generate_value(rng, input_type);
}

std::map<std::string, std::size_t> rhs_coverage(const Program& p) {
  std::map<std::string, std::size_t> out;
  for (const auto& f : p.functions) tally_instr(f.body, out);
  return out;
}

}  // namespace albert
