#include "albert/eval.hpp"

#include <algorithm>
#include <utility>
#include <vector>

#include "albert/printer.hpp"

namespace albert {

namespace {

// Unwinds to eval_function when the contract fails; never escapes this file.
struct ContractFailureEx {
  ValuePtr payload;
};

// Runtime environment: variable -> value, sorted by name. The typer guarantees
// every lookup hits and every bind is fresh, so misses are internal errors.
class REnv {
 public:
  void bind(const Label& name, ValuePtr v) {
    auto it = std::lower_bound(items_.begin(), items_.end(), name,
                               [](const auto& a, const Label& b) { return a.first < b; });
    if (it != items_.end() && it->first == name)
      internal_error("runtime environment already holds " + name);
    items_.insert(it, {name, std::move(v)});
  }

  ValuePtr take(const Label& name) {
    auto it = std::lower_bound(items_.begin(), items_.end(), name,
                               [](const auto& a, const Label& b) { return a.first < b; });
    if (it == items_.end() || it->first != name)
      internal_error("runtime environment is missing " + name);
    ValuePtr v = std::move(it->second);
    items_.erase(it);
    return v;
  }

  const std::vector<std::pair<Label, ValuePtr>>& items() const { return items_; }

 private:
  std::vector<std::pair<Label, ValuePtr>> items_;  // sorted by name
};

struct Evaluator {
  const TypedProgram& prog;
  const EvalContext& ctx;
  std::uint64_t steps = 0;

  void tick() {
    if (++steps > ctx.max_steps)
      internal_error("evaluation exceeded its step ceiling");
  }

  void check_env(const REnv& env, const Env& expected) {
    if (!ctx.check_types) return;
    if (env.items().size() != expected.items().size())
      internal_error("runtime environment shape drifted from the typed one");
    for (std::size_t i = 0; i < expected.items().size(); ++i) {
      const auto& [name, type] = expected.items()[i];
      const auto& [rname, value] = env.items()[i];
      if (rname != name || !value_has_type(value, type))
        internal_error("runtime value for " + name + " does not inhabit " +
                       print_type(type));
    }
  }

  ValuePtr eval_targ(REnv& env, const TArg& a) {
    switch (a.k) {
      case TArg::K::Var:
        return env.take(a.var);
      case TArg::K::Lit:
        return a.lit;
      case TArg::K::Record: {
        ValueFields fields;
        fields.reserve(a.rec.size());
        for (const auto& [l, x] : a.rec) fields.emplace_back(l, env.take(x));
        return v_record(std::move(fields));
      }
    }
    internal_error("unreachable argument kind");
  }

  ValuePtr eval_rhs(REnv& env, const TRhsPtr& r) {
    tick();
    switch (r->k) {
      case TRhs::K::Arg:
        return eval_targ(env, r->arg);
      case TRhs::K::Dup: {
        ValuePtr v = eval_targ(env, r->arg);
        return v_record({{"car", v}, {"cdr", v}});
      }
      case TRhs::K::Amount:
        eval_targ(env, r->arg);
        return v_mutez(ctx.amount);
      case TRhs::K::Failwith:
        throw ContractFailureEx{eval_targ(env, r->arg)};
      case TRhs::K::AssertSome: {
        ValuePtr v = eval_targ(env, r->arg);
        const auto& rec = std::get<RecordVal>(v->node);
        const ValuePtr& opt = rec.fields.at(0).second;
        if (auto* some = std::get_if<SomeVal>(&opt->node))
          return v_record({{"res", some->payload}});
        throw ContractFailureEx{v_string("assert_some")};
      }
      case TRhs::K::Call: {
        ValuePtr argv = eval_targ(env, r->arg);
        const TypedFunction* f = prog.find(r->callee);
        if (!f) internal_error("call to unknown function " + r->callee);
        return run_body(*f, argv);
      }
      case TRhs::K::Proj: {
        ValuePtr rv = env.take(r->var);
        for (const auto& [l, fv] : std::get<RecordVal>(rv->node).fields)
          if (l == r->field) return fv;
        internal_error("projected field " + r->field + " is missing at runtime");
      }
      case TRhs::K::RecUpdate: {
        ValuePtr rv = env.take(r->var);
        ValueFields fields = std::get<RecordVal>(rv->node).fields;
        for (const auto& [l, src] : r->upd_fields) {
          ValuePtr sv = env.take(src);
          bool hit = false;
          for (auto& [fl, fv] : fields)
            if (fl == l) {
              fv = sv;
              hit = true;
            }
          if (!hit) internal_error("updated field " + l + " is missing at runtime");
        }
        return v_record(std::move(fields));
      }
      case TRhs::K::MapUpdate: {
        ValuePtr mv = env.take(r->var);
        const auto& m = std::get<MapVal>(mv->node);
        ValuePtr kv = eval_targ(env, r->key);
        ValuePtr vv = eval_targ(env, r->val);
        auto entries = m.entries;
        auto it = std::lower_bound(
            entries.begin(), entries.end(), kv,
            [](const auto& e, const ValuePtr& k) { return compare_values(e.first, k) < 0; });
        bool present = it != entries.end() && compare_values(it->first, kv) == 0;
        if (auto* some = std::get_if<SomeVal>(&vv->node)) {
          if (present)
            it->second = some->payload;
          else
            entries.insert(it, {kv, some->payload});
        } else if (present) {
          entries.erase(it);
        }
        return v_map(std::move(entries), m.key, m.val);
      }
      case TRhs::K::Add: {
        ValuePtr lv = env.take(r->left);
        ValuePtr rv = env.take(r->right);
        if (auto* ln = std::get_if<NatVal>(&lv->node))
          return v_nat(ln->v + std::get<NatVal>(rv->node).v);
        if (auto* li = std::get_if<IntVal>(&lv->node))
          return v_int(li->v + std::get<IntVal>(rv->node).v);
        std::int64_t a = std::get<MutezVal>(lv->node).v;
        std::int64_t b = std::get<MutezVal>(rv->node).v;
        std::int64_t sum = 0;
        if (__builtin_add_overflow(a, b, &sum))
          throw ContractFailureEx{v_string("mutez overflow")};
        return v_mutez(sum);
      }
      case TRhs::K::Ge: {
        ValuePtr lv = env.take(r->left);
        ValuePtr rv = env.take(r->right);
        return v_bool(compare_values(lv, rv) >= 0);
      }
      case TRhs::K::MapGet: {
        ValuePtr mv = env.take(r->left);
        ValuePtr kv = env.take(r->right);
        const auto& m = std::get<MapVal>(mv->node);
        auto it = std::lower_bound(
            m.entries.begin(), m.entries.end(), kv,
            [](const auto& e, const ValuePtr& k) { return compare_values(e.first, k) < 0; });
        if (it != m.entries.end() && compare_values(it->first, kv) == 0)
          return v_some(it->second);
        return v_none(m.val);
      }
      case TRhs::K::Construct: {
        ValuePtr pv = eval_targ(env, r->arg);
        if (std::holds_alternative<OptionTy>(r->type->node)) return v_some(pv);
        return v_variant(r->ctor, pv, r->type);
      }
      case TRhs::K::Match: {
        ValuePtr sv = env.take(r->scrutinee);
        auto [ctor, payload] = deconstruct(sv);
        for (const auto& b : r->branches)
          if (b.ctor == ctor) {
            env.bind(b.binder, payload);
            return eval_rhs(env, b.body);
          }
        internal_error("no branch for constructor " + ctor);
      }
    }
    internal_error("unreachable right-hand-side kind");
  }

  // Splits a matchable value into (constructor name, payload).
  static std::pair<Label, ValuePtr> deconstruct(const ValuePtr& v) {
    if (auto* b = std::get_if<BoolVal>(&v->node))
      return {b->v ? "True" : "False", v_unit()};
    if (std::holds_alternative<NoneVal>(v->node)) return {"None", v_unit()};
    if (auto* s = std::get_if<SomeVal>(&v->node)) return {"Some", s->payload};
    const auto& var = std::get<VariantVal>(v->node);
    return {var.ctor, var.payload};
  }

  void eval_instr(REnv& env, const TInstrPtr& i) {
    tick();
    check_env(env, i->env_in);
    switch (i->k) {
      case TInstr::K::Noop:
        return;
      case TInstr::K::Seq:
        eval_instr(env, i->first);
        eval_instr(env, i->second);
        return;
      case TInstr::K::Assign: {
        ValuePtr v = eval_rhs(env, i->rhs);
        if (auto* var = std::get_if<VarLhs>(&i->lhs.node)) {
          env.bind(var->name, std::move(v));
        } else {
          const auto& pat = std::get<RecordLhs>(i->lhs.node);
          const auto& rec = std::get<RecordVal>(v->node);
          for (const auto& [l, x] : pat.fields) {
            bool hit = false;
            for (const auto& [fl, fv] : rec.fields)
              if (fl == l) {
                env.bind(x, fv);
                hit = true;
              }
            if (!hit) internal_error("pattern field " + l + " is missing at runtime");
          }
        }
        return;
      }
      case TInstr::K::Drop:
        env.take(i->var);
        return;
      case TInstr::K::Exec: {
        ValuePtr v = eval_rhs(env, i->rhs);
        for (const auto& [l, fv] : std::get<RecordVal>(v->node).fields)
          env.bind(l, fv);
        return;
      }
      case TInstr::K::Match: {
        ValuePtr sv = env.take(i->scrutinee);
        auto [ctor, payload] = deconstruct(sv);
        for (const auto& b : i->branches)
          if (b.ctor == ctor) {
            env.bind(b.binder, payload);
            eval_instr(env, b.body);
            return;
          }
        internal_error("no branch for constructor " + ctor);
      }
    }
  }

  ValuePtr run_body(const TypedFunction& f, const ValuePtr& input) {
    REnv env;
    for (const auto& [l, fv] : std::get<RecordVal>(input->node).fields)
      env.bind(l, fv);
    eval_instr(env, f.body);
    check_env(env, f.output);
    ValueFields fields(env.items().begin(), env.items().end());
    return v_record(std::move(fields));
  }
};

}  // namespace

EvalResult eval_function(const TypedProgram& p, const Label& name,
                         const ValuePtr& input, const EvalContext& ctx) {
  const TypedFunction* f = p.find(name);
  if (!f) throw EvalError("no function named " + name);
  if (!value_has_type(input, f->input_type))
    throw EvalError("the input value does not have type " + print_type(f->input_type) +
                    ": " + print_value(input));
  Evaluator ev{p, ctx};
  try {
    return EvalResult{ev.run_body(*f, input), nullptr};
  } catch (const ContractFailureEx& fail) {
    return EvalResult{nullptr, fail.payload};
  }
}

}  // namespace albert
