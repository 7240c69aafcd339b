#include "albert/typer.hpp"

#include <algorithm>
#include <memory>
#include <sstream>

#include "albert/printer.hpp"

namespace albert {

namespace {

std::string show(const TypePtr& t) { return print_type(t); }

[[noreturn]] void mismatch(Pos pos, const std::string& msg) {
  throw TypeError(TypeErrorKind::TypeMismatch, pos, msg);
}

const FnSig* find_fn(const FnTable& fns, const Label& name) {
  for (const auto& [n, sig] : fns)
    if (n == name) return &sig;
  return nullptr;
}

bool is_addable(const TypePtr& t) {
  auto* p = std::get_if<PrimTy>(&t->node);
  return p && (p->prim == Prim::Nat || p->prim == Prim::Int || p->prim == Prim::Mutez);
}

// ---------------------------------------------------------------------------
// Right-hand sides.  A typer instance owns a private copy of the environment;
// `take` consumes from it and records the binding in `consumed`.  What is left
// in `env` afterwards is the untouched frame.
// ---------------------------------------------------------------------------

struct RhsTyper {
  const FnTable& fns;
  Env env;
  Env consumed;

  TypePtr take(const Label& x, Pos pos) {
    TypePtr t = env.take(x, pos);
    consumed.bind(x, t, pos);
    return t;
  }

  TArg type_arg(const ArgPtr& a) {
    TArg out;
    out.pos = a->pos;
    if (auto* v = std::get_if<VarArg>(&a->node)) {
      out.k = TArg::K::Var;
      out.var = v->name;
      out.type = take(v->name, a->pos);
      return out;
    }
    if (auto* v = std::get_if<ValArg>(&a->node)) {
      out.k = TArg::K::Lit;
      out.lit = v->value;
      out.type = type_of_value(v->value);
      if (!out.type)
        mismatch(a->pos, "this literal does not determine its type on its own; "
                         "add a type ascription");
      well_formed(out.type);
      return out;
    }
    const auto& r = std::get<RecordArg>(a->node);
    out.k = TArg::K::Record;
    out.rec = r.fields;
    std::sort(out.rec.begin(), out.rec.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    for (std::size_t i = 1; i < out.rec.size(); ++i)
      if (out.rec[i - 1].first == out.rec[i].first)
        mismatch(a->pos, "field " + out.rec[i].first +
                             " appears twice in this record expression");
    TypeFields fields;
    fields.reserve(out.rec.size());
    for (const auto& [l, x] : out.rec) fields.emplace_back(l, take(x, a->pos));
    out.type = t_record(std::move(fields));
    return out;
  }

  TRhsPtr run(const RhsPtr& r) {
    auto out = std::make_shared<TRhs>();
    out->pos = r->pos;
    if (auto* x = std::get_if<ArgRhs>(&r->node)) {
      out->k = TRhs::K::Arg;
      out->arg = type_arg(x->arg);
      out->type = out->arg.type;
    } else if (auto* x = std::get_if<ApplyRhs>(&r->node)) {
      type_apply(*out, *x, r->pos);
    } else if (auto* x = std::get_if<ProjRhs>(&r->node)) {
      out->k = TRhs::K::Proj;
      out->var = x->var;
      out->field = x->field;
      TypePtr rt = take(x->var, r->pos);
      auto* rec = std::get_if<RecordTy>(&rt->node);
      if (!rec)
        mismatch(r->pos, "cannot project field " + x->field + " out of " + show(rt) +
                             " (not a record)");
      out->type = nullptr;
      for (const auto& [l, ft] : rec->fields)
        if (l == x->field) out->type = ft;
      if (!out->type)
        mismatch(r->pos, "record " + show(rt) + " has no field " + x->field);
    } else if (auto* x = std::get_if<UpdateRhs>(&r->node)) {
      type_update(*out, *x, r->pos);
    } else if (auto* x = std::get_if<MapUpdateRhs>(&r->node)) {
      out->k = TRhs::K::MapUpdate;
      out->var = x->map;
      TypePtr mt = take(x->map, r->pos);
      auto* m = std::get_if<MapTy>(&mt->node);
      if (!m)
        mismatch(r->pos, "update needs a map as its first operand, got " + show(mt));
      out->key = type_arg(x->key);
      if (!type_equal(out->key.type, m->key))
        mismatch(out->key.pos, "map key has type " + show(m->key) + " but got " +
                                   show(out->key.type));
      out->val = type_arg(x->val);
      TypePtr want = t_option(m->val);
      if (!type_equal(out->val.type, want))
        mismatch(out->val.pos, "map update value must have type " + show(want) +
                                   " (Some inserts, None removes), got " +
                                   show(out->val.type));
      out->type = mt;
    } else if (auto* x = std::get_if<BinOpRhs>(&r->node)) {
      type_binop(*out, *x, r->pos);
    } else if (auto* x = std::get_if<ConstructRhs>(&r->node)) {
      type_construct(*out, *x, r->pos);
    } else {
      type_match(*out, std::get<MatchRhs>(r->node), r->pos);
    }
    out->consumed = consumed;
    return out;
  }

  void type_apply(TRhs& out, const ApplyRhs& x, Pos pos) {
    out.arg = type_arg(x.arg);
    const TypePtr& at = out.arg.type;
    if (x.fn == "dup") {
      out.k = TRhs::K::Dup;
      out.type = t_record({{"car", at}, {"cdr", at}});
    } else if (x.fn == "amount") {
      out.k = TRhs::K::Amount;
      if (!type_equal(at, t_unit()))
        mismatch(pos, "amount takes no argument (the empty record), got " + show(at));
      out.type = t_mutez();
    } else if (x.fn == "failwith") {
      out.k = TRhs::K::Failwith;
      if (!type_equal(at, t_string()))
        mismatch(pos, "failwith takes a string payload, got " + show(at));
      out.fails = true;
      out.type = nullptr;
    } else if (x.fn == "assert_some") {
      out.k = TRhs::K::AssertSome;
      const RecordTy* rec = std::get_if<RecordTy>(&at->node);
      const OptionTy* opt = nullptr;
      if (rec && rec->fields.size() == 1 && rec->fields[0].first == "opt")
        opt = std::get_if<OptionTy>(&rec->fields[0].second->node);
      if (!opt)
        mismatch(pos, "assert_some expects { opt : option t }, got " + show(at));
      out.type = t_record({{"res", opt->elem}});
    } else {
      const FnSig* sig = find_fn(fns, x.fn);
      if (!sig)
        throw TypeError(TypeErrorKind::UnknownFunction, pos,
                        "unknown function " + x.fn +
                            " (a function may only call functions defined above it)");
      TypePtr want = sig->input.to_record();
      if (!type_equal(at, want))
        mismatch(pos, "function " + x.fn + " expects " + show(want) +
                          " but the argument has type " + show(at));
      out.k = TRhs::K::Call;
      out.callee = x.fn;
      out.type = sig->output.to_record();
    }
  }

  void type_update(TRhs& out, const UpdateRhs& x, Pos pos) {
    out.k = TRhs::K::RecUpdate;
    out.var = x.var;
    TypePtr rt = take(x.var, pos);
    auto* rec = std::get_if<RecordTy>(&rt->node);
    if (!rec)
      mismatch(pos, "cannot update fields of " + show(rt) + " (not a record)");
    out.upd_fields = x.fields;
    std::sort(out.upd_fields.begin(), out.upd_fields.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < out.upd_fields.size(); ++i)
      if (out.upd_fields[i - 1].first == out.upd_fields[i].first)
        mismatch(pos, "field " + out.upd_fields[i].first + " is updated twice");
    for (const auto& [l, src] : out.upd_fields) {
      const TypePtr* ft = nullptr;
      for (const auto& [fl, t] : rec->fields)
        if (fl == l) ft = &t;
      if (!ft) mismatch(pos, "record " + show(rt) + " has no field " + l);
      TypePtr st = take(src, pos);
      if (!type_equal(st, *ft))
        mismatch(pos, "field " + l + " has type " + show(*ft) + " but " + src +
                          " has type " + show(st));
    }
    out.type = rt;
  }

  void type_binop(TRhs& out, const BinOpRhs& x, Pos pos) {
    out.left = x.left;
    out.right = x.right;
    TypePtr lt = take(x.left, pos);
    TypePtr rt = take(x.right, pos);
    switch (x.op) {
      case BinOpKind::Add:
        out.k = TRhs::K::Add;
        if (!is_addable(lt) || !type_equal(lt, rt))
          mismatch(pos, "+ needs two nat, two int or two mutez operands; got " +
                            show(lt) + " and " + show(rt));
        out.type = lt;
        return;
      case BinOpKind::Ge:
        out.k = TRhs::K::Ge;
        if (!is_addable(lt) || !type_equal(lt, rt))
          mismatch(pos, ">= needs two nat, two int or two mutez operands; got " +
                            show(lt) + " and " + show(rt));
        out.type = t_bool();
        return;
      case BinOpKind::MapGet: {
        out.k = TRhs::K::MapGet;
        auto* m = std::get_if<MapTy>(&lt->node);
        if (!m) mismatch(pos, "cannot index into " + show(lt) + " (not a map)");
        if (!type_equal(rt, m->key))
          mismatch(pos, "map key has type " + show(m->key) + " but the index has type " +
                            show(rt));
        out.type = t_option(m->val);
        return;
      }
    }
  }

  void type_construct(TRhs& out, const ConstructRhs& x, Pos pos) {
    out.k = TRhs::K::Construct;
    out.ctor = x.ctor;
    out.arg = type_arg(x.arg);
    if (!x.annot) {
      // Only `Some arg` may appear without an ascription.
      if (x.ctor != "Some")
        mismatch(pos, "constructor " + x.ctor + " needs a type ascription");
      out.type = t_option(out.arg.type);
      return;
    }
    well_formed(x.annot);
    if (auto* o = std::get_if<OptionTy>(&x.annot->node)) {
      if (x.ctor != "Some")
        throw TypeError(TypeErrorKind::UnknownConstructor, pos,
                        "type " + show(x.annot) + " has no constructor " + x.ctor);
      if (!type_equal(out.arg.type, o->elem))
        mismatch(pos, "Some payload must have type " + show(o->elem) + ", got " +
                          show(out.arg.type));
      out.type = x.annot;
      return;
    }
    auto* v = std::get_if<VariantTy>(&x.annot->node);
    if (!v)
      mismatch(pos, x.ctor + " cannot construct a value of type " + show(x.annot));
    const TypePtr* payload = nullptr;
    for (const auto& [c, t] : v->ctors)
      if (c == x.ctor) payload = &t;
    if (!payload)
      throw TypeError(TypeErrorKind::UnknownConstructor, pos,
                      "type " + show(x.annot) + " has no constructor " + x.ctor);
    if (!type_equal(out.arg.type, *payload))
      mismatch(pos, "constructor " + x.ctor + " takes " + show(*payload) + ", got " +
                        show(out.arg.type));
    out.type = x.annot;
  }

  void type_match(TRhs& out, const MatchRhs& x, Pos pos) {
    out.k = TRhs::K::Match;
    out.scrutinee = x.scrutinee;
    out.scrut_type = take(x.scrutinee, pos);
    auto view = variant_view(out.scrut_type);
    if (view.empty())
      mismatch(pos, "cannot match on " + show(out.scrut_type) +
                        " (only bool, option and variant values have constructors)");
    Env before = env;  // after consuming the scrutinee

    out.branches.reserve(x.branches.size());
    for (const auto& [ctor, payload] : view) {
      const RhsBranch* br = nullptr;
      for (const auto& b : x.branches)
        if (b.ctor == ctor) {
          if (br)
            throw TypeError(TypeErrorKind::DuplicateBranch, b.pos,
                            "duplicate branch for constructor " + ctor);
          br = &b;
        }
      if (!br) continue;  // reported below with the full missing set
      RhsTyper bt{fns, before, Env{}};
      bt.env.bind(br->binder, payload, br->pos);
      TRhsPtr body = bt.run(br->body);
      if (!body->fails && bt.env.contains(br->binder))
        throw TypeError(TypeErrorKind::LinearityLeftover, br->pos,
                        "branch " + ctor + " does not consume its binder " +
                            br->binder);
      out.branches.push_back(TRhsBranch{ctor, br->binder, payload, body});
    }
    for (const auto& b : x.branches) {
      bool known = false;
      for (const auto& [ctor, payload] : view) known = known || ctor == b.ctor;
      if (!known)
        throw TypeError(TypeErrorKind::UnknownConstructor, b.pos,
                        "type " + show(out.scrut_type) + " has no constructor " +
                            b.ctor);
    }
    if (out.branches.size() != view.size()) {
      std::string missing;
      for (const auto& [ctor, payload] : view) {
        bool found = false;
        for (const auto& b : out.branches) found = found || b.ctor == ctor;
        if (!found) missing += (missing.empty() ? "" : ", ") + ctor;
      }
      throw TypeError(TypeErrorKind::NonExhaustiveMatch, pos,
                      "match does not cover: " + missing);
    }

    // Non-failing branches must agree on the produced type and on which outer
    // variables they consume; a branch that always fails constrains nothing.
    const TRhsBranch* lead = nullptr;
    for (const auto& b : out.branches) {
      if (b.body->fails) continue;
      if (!lead) {
        lead = &b;
        continue;
      }
      if (!type_equal(b.body->type, lead->body->type))
        mismatch(pos, "match branches produce different types: " +
                          show(lead->body->type) + " (" + lead->ctor + ") vs " +
                          show(b.body->type) + " (" + b.ctor + ")");
      Env lead_left = leftover(before, *lead);
      Env b_left = leftover(before, b);
      if (lead_left != b_left)
        mismatch(pos, "match branches consume different variables: after " +
                          lead->ctor + " the environment is " +
                          show(lead_left.to_record()) + " but after " + b.ctor +
                          " it is " + show(b_left.to_record()));
    }
    if (!lead) {
      out.fails = true;
      out.type = nullptr;
      return;
    }
    out.type = lead->body->type;
    // Commit the outer consumption of the surviving branches.
    Env after = leftover(before, *lead);
    for (const auto& [l, t] : before.items())
      if (!after.contains(l)) consumed.bind(l, t, pos);
    env = std::move(after);
  }

  // The environment a branch leaves behind, excluding its binder.
  static Env leftover(const Env& before, const TRhsBranch& b) {
    Env left = before;
    left.bind(b.binder, b.payload);
    left.remove_all(b.body->consumed);
    return left;
  }
};

}  // namespace

std::vector<std::pair<Label, TypePtr>> variant_view(const TypePtr& t) {
  if (auto* p = std::get_if<PrimTy>(&t->node); p && p->prim == Prim::Bool)
    return {{"False", t_unit()}, {"True", t_unit()}};
  if (auto* o = std::get_if<OptionTy>(&t->node))
    return {{"None", t_unit()}, {"Some", o->elem}};
  if (auto* v = std::get_if<VariantTy>(&t->node)) return v->ctors;
  return {};
}

namespace {

// ---------------------------------------------------------------------------
// Instructions
// ---------------------------------------------------------------------------

struct InstrTyper {
  const FnTable& fns;

  TInstrPtr run(const Env& env, const InstrPtr& i) {
    auto out = std::make_shared<TInstr>();
    out->pos = i->pos;
    out->src = i;
    out->env_in = env;
    if (std::holds_alternative<NoopInstr>(i->node)) {
      out->k = TInstr::K::Noop;
      out->env_out = env;
    } else if (auto* x = std::get_if<SeqInstr>(&i->node)) {
      out->k = TInstr::K::Seq;
      out->first = run(env, x->first);
      if (out->first->fails)
        mismatch(x->second->pos,
                 "unreachable instruction: the previous one always fails");
      out->second = run(out->first->env_out, x->second);
      out->fails = out->second->fails;
      out->env_out = out->second->env_out;
    } else if (auto* x = std::get_if<AssignInstr>(&i->node)) {
      out->k = TInstr::K::Assign;
      out->lhs = x->lhs;
      RhsTyper rt{fns, env, Env{}};
      out->rhs = rt.run(x->rhs);
      if (out->rhs->fails) {
        out->fails = true;
      } else {
        out->env_out = bind_lhs(std::move(rt.env), x->lhs, out->rhs->type);
      }
    } else if (auto* x = std::get_if<DropInstr>(&i->node)) {
      out->k = TInstr::K::Drop;
      out->var = x->var;
      Env e = env;
      out->var_type = e.take(x->var, i->pos);
      out->env_out = std::move(e);
    } else if (auto* x = std::get_if<MatchInstr>(&i->node)) {
      type_match(*out, *x, i->pos);
    } else {
      const auto& ex = std::get<ExecInstr>(i->node);
      out->k = TInstr::K::Exec;
      RhsTyper rt{fns, env, Env{}};
      out->rhs = rt.run(ex.rhs);
      if (out->rhs->fails) {
        out->fails = true;
      } else {
        auto* rec = std::get_if<RecordTy>(&out->rhs->type->node);
        if (!rec)
          mismatch(i->pos, "an expression in instruction position must produce a "
                           "record (its fields rejoin the environment), got " +
                               show(out->rhs->type));
        Env e = std::move(rt.env);
        for (const auto& [l, t] : rec->fields) e.bind(l, t, i->pos);
        out->env_out = std::move(e);
      }
    }
    return out;
  }

  static Env bind_lhs(Env env, const Lhs& lhs, const TypePtr& t) {
    if (auto* v = std::get_if<VarLhs>(&lhs.node)) {
      env.bind(v->name, t, lhs.pos);
      return env;
    }
    const auto& pat = std::get<RecordLhs>(lhs.node);
    auto* rec = std::get_if<RecordTy>(&t->node);
    if (!rec)
      mismatch(lhs.pos,
               "a record pattern needs a record on the right-hand side, got " +
                   show(t));
    auto fields = pat.fields;
    std::sort(fields.begin(), fields.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < fields.size(); ++i)
      if (fields[i - 1].first == fields[i].first)
        mismatch(lhs.pos, "field " + fields[i].first + " is matched twice");
    for (const auto& [l, x] : fields) {
      bool known = false;
      for (const auto& [fl, ft] : rec->fields) known = known || fl == l;
      if (!known)
        mismatch(lhs.pos, "pattern names field " + l + " but " + show(t) +
                              " has no such field");
    }
    for (const auto& [fl, ft] : rec->fields) {
      const Label* var = nullptr;
      for (const auto& [l, x] : fields)
        if (l == fl) var = &x;
      if (!var)
        mismatch(lhs.pos, "pattern does not bind field " + fl + " of " + show(t));
      env.bind(*var, ft, lhs.pos);
    }
    return env;
  }

  void type_match(TInstr& out, const MatchInstr& x, Pos pos) {
    out.k = TInstr::K::Match;
    out.scrutinee = x.scrutinee;
    Env before = out.env_in;
    out.scrut_type = before.take(x.scrutinee, pos);
    auto view = variant_view(out.scrut_type);
    if (view.empty())
      mismatch(pos, "cannot match on " + show(out.scrut_type) +
                        " (only bool, option and variant values have constructors)");

    out.branches.reserve(x.branches.size());
    for (const auto& [ctor, payload] : view) {
      const InstrBranch* br = nullptr;
      for (const auto& b : x.branches)
        if (b.ctor == ctor) {
          if (br)
            throw TypeError(TypeErrorKind::DuplicateBranch, b.pos,
                            "duplicate branch for constructor " + ctor);
          br = &b;
        }
      if (!br) continue;
      Env benv = before;
      benv.bind(br->binder, payload, br->pos);
      out.branches.push_back(TInstrBranch{ctor, br->binder, payload, run(benv, br->body)});
    }
    for (const auto& b : x.branches) {
      bool known = false;
      for (const auto& [ctor, payload] : view) known = known || ctor == b.ctor;
      if (!known)
        throw TypeError(TypeErrorKind::UnknownConstructor, b.pos,
                        "type " + show(out.scrut_type) + " has no constructor " +
                            b.ctor);
    }
    if (out.branches.size() != view.size()) {
      std::string missing;
      for (const auto& [ctor, payload] : view) {
        bool found = false;
        for (const auto& b : out.branches) found = found || b.ctor == ctor;
        if (!found) missing += (missing.empty() ? "" : ", ") + ctor;
      }
      throw TypeError(TypeErrorKind::NonExhaustiveMatch, pos,
                      "match does not cover: " + missing);
    }

    const TInstrBranch* lead = nullptr;
    for (const auto& b : out.branches) {
      if (b.body->fails) continue;
      if (!lead) {
        lead = &b;
        continue;
      }
      if (b.body->env_out != lead->body->env_out)
        mismatch(pos, "match branches end in different environments: " +
                          show(lead->body->env_out.to_record()) + " (" + lead->ctor +
                          ") vs " + show(b.body->env_out.to_record()) + " (" +
                          b.ctor + ")");
    }
    if (!lead) {
      out.fails = true;
      return;
    }
    out.env_out = lead->body->env_out;
  }
};

}  // namespace

const TypedFunction* TypedProgram::find(const Label& name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

TInstrPtr typecheck_instruction(const Env& env, const InstrPtr& i, const FnTable& fns) {
  return InstrTyper{fns}.run(env, i);
}

TRhsPtr typecheck_rhs(const Env& env, const RhsPtr& r, const FnTable& fns) {
  return RhsTyper{fns, env, Env{}}.run(r);
}

TypedProgram typecheck_program(const Program& p) {
  Program q = normalize_program(inline_aliases(p));
  TypedProgram out;
  FnTable fns;
  for (const auto& f : q.functions) {
    try {
      well_formed(f.input);
      well_formed(f.output);
    } catch (const TypeError& e) {
      throw TypeError(e.kind, f.pos, "in the signature of " + f.name + ": " + e.what());
    }
    if (!std::holds_alternative<RecordTy>(f.input->node))
      mismatch(f.pos, "the input type of " + f.name + " must be a record, got " +
                          show(f.input));
    if (!std::holds_alternative<RecordTy>(f.output->node))
      mismatch(f.pos, "the output type of " + f.name + " must be a record, got " +
                          show(f.output));
    TypedFunction tf;
    tf.name = f.name;
    tf.pos = f.pos;
    tf.input_type = f.input;
    tf.output_type = f.output;
    tf.input = Env::from_record(f.input);
    tf.output = Env::from_record(f.output);
    tf.body = InstrTyper{fns}.run(tf.input, f.body);
    tf.fails = tf.body->fails;
    if (!tf.fails) {
      const Env& end = tf.body->env_out;
      for (const auto& [l, t] : end.items())
        if (!tf.output.contains(l))
          throw TypeError(TypeErrorKind::LinearityLeftover, f.pos,
                          "variable " + l + " is left over at the end of " + f.name +
                              "; every binding must be consumed");
      for (const auto& [l, t] : tf.output.items()) {
        TypePtr got = end.lookup(l);
        if (!got)
          mismatch(f.pos, "the body of " + f.name + " ends without binding " + l +
                              " declared in its output");
        if (!type_equal(got, t))
          mismatch(f.pos, "at the end of " + f.name + ", " + l + " has type " +
                              show(got) + " but the output declares " + show(t));
      }
    }
    fns.emplace_back(f.name, FnSig{tf.input, tf.output});
    out.functions.push_back(std::move(tf));
  }
  return out;
}

namespace {

std::string env_str(const Env& e) { return print_type(e.to_record()); }

void dump_instr(std::ostringstream& os, const TInstrPtr& i) {
  if (i->k == TInstr::K::Seq) {
    dump_instr(os, i->first);
    dump_instr(os, i->second);
    return;
  }
  os << "  " << env_str(i->env_in) << " ⊢ " << print_instruction_inline(i->src)
     << " ⊣ " << (i->fails ? std::string("⊥") : env_str(i->env_out))
     << '\n';
}

}  // namespace

std::string dump_typed(const TypedProgram& p) {
  std::ostringstream os;
  bool first = true;
  for (const auto& f : p.functions) {
    if (!first) os << '\n';
    first = false;
    os << "def " << f.name << " : " << print_type(f.input_type) << " -> "
       << print_type(f.output_type) << '\n';
    dump_instr(os, f.body);
  }
  return os.str();
}

}  // namespace albert
