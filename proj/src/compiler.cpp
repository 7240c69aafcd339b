#include "albert/compiler.hpp"

#include <algorithm>
#include <memory>

#include "albert/printer.hpp"

namespace albert {

namespace {

[[noreturn]] void bug(const std::string& what) { internal_error("compiler: " + what); }

}  // namespace

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

MTypePtr compile_type(const TypePtr& t) {
  if (!t) bug("compile_type on null type");
  if (const auto* p = std::get_if<PrimTy>(&t->node)) {
    switch (p->prim) {
      case Prim::Nat: return mt_nat();
      case Prim::Int: return mt_int();
      case Prim::String: return mt_string();
      case Prim::Mutez: return mt_mutez();
      case Prim::Bool: return mt_bool();
      case Prim::Operation: return mt_operation();
    }
    bug("unknown primitive");
  }
  if (const auto* r = std::get_if<RecordTy>(&t->node)) {
    const auto& fs = r->fields;
    if (fs.empty()) return mt_unit();
    MTypePtr acc = compile_type(fs.back().second);
    for (size_t i = fs.size() - 1; i-- > 0;)
      acc = mt_pair(compile_type(fs[i].second), acc);
    return acc;
  }
  if (const auto* v = std::get_if<VariantTy>(&t->node)) {
    const auto& cs = v->ctors;
    if (cs.empty()) bug("variant with no constructors");
    MTypePtr acc = compile_type(cs.back().second);
    for (size_t i = cs.size() - 1; i-- > 0;)
      acc = mt_or(compile_type(cs[i].second), acc);
    return acc;
  }
  if (const auto* l = std::get_if<ListTy>(&t->node)) return mt_list(compile_type(l->elem));
  if (const auto* o = std::get_if<OptionTy>(&t->node)) return mt_option(compile_type(o->elem));
  if (const auto* m = std::get_if<MapTy>(&t->node))
    return mt_map(compile_type(m->key), compile_type(m->val));
  bug("aliases must be inlined before compilation");
}

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

namespace {

MValPtr compile_record_value(const std::vector<std::pair<Label, ValuePtr>>& vals,
                             const std::vector<std::pair<Label, TypePtr>>& fields,
                             size_t from) {
  if (from + 1 == fields.size()) return compile_value(vals[from].second, fields[from].second);
  return mv_pair(compile_value(vals[from].second, fields[from].second),
                 compile_record_value(vals, fields, from + 1));
}

}  // namespace

MValPtr compile_value(const ValuePtr& v, const TypePtr& t) {
  if (!v || !t) bug("compile_value on null");
  if (const auto* p = std::get_if<PrimTy>(&t->node)) {
    switch (p->prim) {
      case Prim::Nat: return mv_nat(std::get<NatVal>(v->node).v);
      case Prim::Int: return mv_int(std::get<IntVal>(v->node).v);
      case Prim::String: return mv_string(std::get<StringVal>(v->node).v);
      case Prim::Mutez: return mv_mutez(std::get<MutezVal>(v->node).v);
      case Prim::Bool: return mv_bool(std::get<BoolVal>(v->node).v);
      case Prim::Operation: return mv_operation(std::get<OperationVal>(v->node).tag);
    }
    bug("unknown primitive");
  }
  if (const auto* r = std::get_if<RecordTy>(&t->node)) {
    const auto& rv = std::get<RecordVal>(v->node);
    if (rv.fields.size() != r->fields.size()) bug("record value does not match its type");
    if (r->fields.empty()) return mv_unit();
    return compile_record_value(rv.fields, r->fields, 0);
  }
  if (const auto* vt = std::get_if<VariantTy>(&t->node)) {
    const auto& cv = std::get<VariantVal>(v->node);
    size_t idx = vt->ctors.size();
    for (size_t i = 0; i < vt->ctors.size(); ++i)
      if (vt->ctors[i].first == cv.ctor) { idx = i; break; }
    if (idx == vt->ctors.size()) bug("constructor " + cv.ctor + " not in variant type");
    MValPtr acc = compile_value(cv.payload, vt->ctors[idx].second);
    if (vt->ctors.size() == 1) return acc;
    if (idx + 1 < vt->ctors.size()) acc = mv_left(acc);
    for (size_t i = 0; i < idx; ++i) acc = mv_right(acc);
    return acc;
  }
  if (const auto* o = std::get_if<OptionTy>(&t->node)) {
    if (std::holds_alternative<NoneVal>(v->node)) return mv_none();
    return mv_some(compile_value(std::get<SomeVal>(v->node).payload, o->elem));
  }
  if (const auto* l = std::get_if<ListTy>(&t->node)) {
    const auto& lv = std::get<ListVal>(v->node);
    std::vector<MValPtr> elems;
    elems.reserve(lv.elems.size());
    for (const auto& e : lv.elems) elems.push_back(compile_value(e, l->elem));
    return mv_list(std::move(elems));
  }
  if (const auto* m = std::get_if<MapTy>(&t->node)) {
    const auto& mv = std::get<MapVal>(v->node);
    std::vector<std::pair<MValPtr, MValPtr>> entries;
    entries.reserve(mv.entries.size());
    for (const auto& [k, val] : mv.entries)
      entries.emplace_back(compile_value(k, m->key), compile_value(val, m->val));
    return mv_map(std::move(entries));
  }
  bug("aliases must be inlined before compilation");
}

namespace {

void decode_record_value(const MValPtr& m,
                         const std::vector<std::pair<Label, TypePtr>>& fields,
                         size_t from, std::vector<std::pair<Label, ValuePtr>>& out) {
  if (from + 1 == fields.size()) {
    out.emplace_back(fields[from].first, decode_value(m, fields[from].second));
    return;
  }
  if (m->k != MV::Pair) bug("expected a pair while decoding a record");
  out.emplace_back(fields[from].first, decode_value(m->a, fields[from].second));
  decode_record_value(m->b, fields, from + 1, out);
}

}  // namespace

ValuePtr decode_value(const MValPtr& m, const TypePtr& t) {
  if (!m || !t) bug("decode_value on null");
  if (const auto* p = std::get_if<PrimTy>(&t->node)) {
    switch (p->prim) {
      case Prim::Nat: return v_nat(m->num);
      case Prim::Int: return v_int(m->num);
      case Prim::String: return v_string(m->str);
      case Prim::Mutez: return v_mutez(m->mutez);
      case Prim::Bool: return v_bool(m->flag);
      case Prim::Operation: return v_operation(m->str);
    }
    bug("unknown primitive");
  }
  if (const auto* r = std::get_if<RecordTy>(&t->node)) {
    if (r->fields.empty()) {
      if (m->k != MV::Unit) bug("expected Unit for the empty record");
      return v_unit();
    }
    std::vector<std::pair<Label, ValuePtr>> fields;
    decode_record_value(m, r->fields, 0, fields);
    return v_record(std::move(fields));
  }
  if (const auto* vt = std::get_if<VariantTy>(&t->node)) {
    size_t idx = 0;
    MValPtr cur = m;
    if (vt->ctors.size() > 1) {
      while (cur->k == MV::Right && idx + 1 < vt->ctors.size()) {
        cur = cur->a;
        ++idx;
      }
      if (idx + 1 < vt->ctors.size()) {
        if (cur->k != MV::Left) bug("expected Left/Right while decoding a variant");
        cur = cur->a;
      }
    }
    return v_variant(vt->ctors[idx].first, decode_value(cur, vt->ctors[idx].second), t);
  }
  if (const auto* o = std::get_if<OptionTy>(&t->node)) {
    if (m->k == MV::None) return v_none(o->elem);
    if (m->k != MV::Some) bug("expected an option while decoding");
    return v_some(decode_value(m->a, o->elem));
  }
  if (const auto* l = std::get_if<ListTy>(&t->node)) {
    if (m->k != MV::List) bug("expected a list while decoding");
    std::vector<ValuePtr> elems;
    elems.reserve(m->elems.size());
    for (const auto& e : m->elems) elems.push_back(decode_value(e, l->elem));
    return v_list(std::move(elems), l->elem);
  }
  if (const auto* mp = std::get_if<MapTy>(&t->node)) {
    if (m->k != MV::Map) bug("expected a map while decoding");
    std::vector<std::pair<ValuePtr, ValuePtr>> entries;
    entries.reserve(m->entries.size());
    for (const auto& [k, v] : m->entries)
      entries.emplace_back(decode_value(k, mp->key), decode_value(v, mp->val));
    return v_map(std::move(entries), mp->key, mp->val);
  }
  bug("aliases must be inlined before compilation");
}

// ---------------------------------------------------------------------------
// Stack frames
// ---------------------------------------------------------------------------

namespace {

// Tracks which variable lives in which stack slot while code is emitted.
// slots[0] is the stack top; "" marks an anonymous intermediate. Between
// instructions the frame holds exactly the environment's variables, sorted
// ascending from the top, so emission is deterministic.
class Frame {
 public:
  Frame(std::vector<Label> slots, MichCode& out) : slots_(std::move(slots)), out_(&out) {}

  const std::vector<Label>& slots() const { return slots_; }
  void set_slots(std::vector<Label> s) { slots_ = std::move(s); }
  MichCode& code() { return *out_; }

  void emit(MichInstr i) { out_->push_back(std::move(i)); }

  size_t pos(const Label& x) const {
    for (size_t i = 0; i < slots_.size(); ++i)
      if (slots_[i] == x) return i;
    bug("variable " + x + " is not on the stack");
  }

  // Bring x to the top (DIG, skipped when already there).
  void dig_var(const Label& x) {
    size_t j = pos(x);
    if (j > 0) {
      emit(m_dig(j));
      Label name = slots_[j];
      slots_.erase(slots_.begin() + static_cast<long>(j));
      slots_.insert(slots_.begin(), std::move(name));
    }
  }

  void push_temp() { slots_.insert(slots_.begin(), Label{}); }
  void pop() {
    if (slots_.empty()) bug("pop from an empty frame");
    slots_.erase(slots_.begin());
  }
  void name_top(const Label& x) {
    if (slots_.empty()) bug("no slot to name");
    slots_[0] = x;
  }
  void rename(const Label& from, const Label& to) { slots_[pos(from)] = to; }

  // Give the top slot a name and sink it to its sorted position; every slot
  // below must already be named and sorted.
  void place_top(const Label& x) {
    if (slots_.empty()) bug("no slot to place");
    size_t idx = 0;
    for (size_t i = 1; i < slots_.size(); ++i)
      if (slots_[i] < x) ++idx;
    if (idx > 0) emit(m_dug(idx));
    slots_.erase(slots_.begin());
    slots_.insert(slots_.begin() + static_cast<long>(idx), x);
  }

  // Selection placement: sort all (named) slots by name with DIG/DUG pairs,
  // deepest target position first.
  void restore_sorted() {
    std::vector<Label> target = slots_;
    std::sort(target.begin(), target.end());
    for (size_t k = slots_.size(); k-- > 0;) {
      if (slots_[k] == target[k]) continue;
      size_t j = pos(target[k]);
      if (j > 0) {
        emit(m_dig(j));
        Label name = slots_[j];
        slots_.erase(slots_.begin() + static_cast<long>(j));
        slots_.insert(slots_.begin(), std::move(name));
      }
      if (k > 0) {
        emit(m_dug(k));
        Label name = slots_[0];
        slots_.erase(slots_.begin());
        slots_.insert(slots_.begin() + static_cast<long>(k), std::move(name));
      }
    }
  }

  // Destructure the record value on top into `names` (one per field, in
  // field order); afterwards every field sits in a slot of that name.
  void destructure(const std::vector<Label>& names) {
    if (slots_.empty()) bug("nothing to destructure");
    size_t n = names.size();
    if (n == 0) {
      emit(m_op(MOp::DROP));
      pop();
      return;
    }
    if (n == 1) {
      name_top(names[0]);
      return;
    }
    for (size_t i = 0; i + 1 < n; ++i) {
      emit(m_op(MOp::UNPAIR));
      pop();
      push_temp();
      push_temp();
      slots_[0] = names[i];
      if (i + 2 == n) {
        slots_[1] = names[n - 1];
      } else {
        emit(m_op(MOp::SWAP));
        std::swap(slots_[0], slots_[1]);
      }
    }
  }

  // Build the record value pair(f0, pair(f1, …)) from the named variables
  // `sources` (one per field, in field order); consumes them all and leaves
  // the record on top as an anonymous temporary.
  void assemble(const std::vector<Label>& sources) {
    size_t n = sources.size();
    if (n == 0) {
      emit(m_op(MOp::UNIT));
      push_temp();
      return;
    }
    dig_var(sources[n - 1]);
    name_top(Label{});
    for (size_t i = n - 1; i-- > 0;) {
      dig_var(sources[i]);
      name_top(Label{});
      emit(m_op(MOp::PAIR));
      pop();
    }
  }

  void assert_env(const Env& e) const {
    const auto& items = e.items();
    if (slots_.size() != items.size()) bug("layout does not match the environment");
    for (size_t i = 0; i < items.size(); ++i)
      if (slots_[i] != items[i].first)
        bug("layout slot " + std::to_string(i) + " holds " + slots_[i] +
            " but the environment expects " + items[i].first);
  }

 private:
  std::vector<Label> slots_;
  MichCode* out_;
};

// Push a literal. Compound shapes are built piecewise when PUSH would be
// illegal: operation never inhabits a written literal, but empty lists and
// None at operation-bearing types are still denotable.
void push_literal(Frame& f, const ValuePtr& v, const TypePtr& t) {
  MTypePtr mt = compile_type(t);
  if (mich_pushable(mt)) {
    f.emit(m_push(mt, compile_value(v, t)));
    f.push_temp();
    return;
  }
  if (const auto* r = std::get_if<RecordTy>(&t->node)) {
    const auto& rv = std::get<RecordVal>(v->node);
    size_t n = r->fields.size();
    if (n == 0) {
      f.emit(m_op(MOp::UNIT));
      f.push_temp();
      return;
    }
    if (n == 1) {
      push_literal(f, rv.fields[0].second, r->fields[0].second);
      return;
    }
    std::vector<std::pair<Label, ValuePtr>> tail_vals(rv.fields.begin() + 1, rv.fields.end());
    std::vector<std::pair<Label, TypePtr>> tail_fields(r->fields.begin() + 1, r->fields.end());
    push_literal(f, v_record(std::move(tail_vals)), t_record(std::move(tail_fields)));
    push_literal(f, rv.fields[0].second, r->fields[0].second);
    f.emit(m_op(MOp::PAIR));
    f.pop();
    return;
  }
  if (const auto* vt = std::get_if<VariantTy>(&t->node)) {
    const auto& cv = std::get<VariantVal>(v->node);
    size_t n = vt->ctors.size();
    size_t idx = n;
    for (size_t i = 0; i < n; ++i)
      if (vt->ctors[i].first == cv.ctor) { idx = i; break; }
    if (idx == n) bug("constructor not in variant type");
    push_literal(f, cv.payload, vt->ctors[idx].second);
    if (n == 1) return;
    if (idx + 1 < n) {
      MTypePtr suffix = compile_type(vt->ctors[n - 1].second);
      for (size_t i = n - 1; i-- > idx + 1;)
        suffix = mt_or(compile_type(vt->ctors[i].second), suffix);
      f.emit(m_left(suffix));
    }
    for (size_t i = idx; i-- > 0;) f.emit(m_right(compile_type(vt->ctors[i].second)));
    return;
  }
  if (const auto* o = std::get_if<OptionTy>(&t->node)) {
    if (std::holds_alternative<NoneVal>(v->node)) {
      f.emit(m_none(compile_type(o->elem)));
      f.push_temp();
      return;
    }
    push_literal(f, std::get<SomeVal>(v->node).payload, o->elem);
    f.emit(m_op(MOp::SOME));
    return;
  }
  if (const auto* l = std::get_if<ListTy>(&t->node)) {
    const auto& lv = std::get<ListVal>(v->node);
    f.emit(m_nil(compile_type(l->elem)));
    f.push_temp();
    for (size_t i = lv.elems.size(); i-- > 0;) {
      push_literal(f, lv.elems[i], l->elem);
      f.emit(m_op(MOp::CONS));
      f.pop();
    }
    return;
  }
  bug("literal of type " + print_type(t) + " cannot be pushed");
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

class Emitter {
 public:
  Emitter(const TypedProgram& prog, std::map<Label, MichCode>& fn_cache)
      : prog_(prog), fn_cache_(&fn_cache) {}

  // The position-independent splice for a call: consumes the input record on
  // top, leaves the output record on top (or fails).
  const MichCode& function_code(const Label& name) {
    auto it = fn_cache_->find(name);
    if (it != fn_cache_->end()) return it->second;
    const TypedFunction* fn = prog_.find(name);
    if (!fn) bug("no function named " + name);
    MichCode code;
    Frame f({Label{}}, code);
    std::vector<Label> names;
    for (const auto& [label, ty] : fn->input.items()) names.push_back(label);
    f.destructure(names);
    f.restore_sorted();
    instr(f, fn->body);
    if (!fn->fails) {
      std::vector<Label> outs;
      for (const auto& [label, ty] : fn->output.items()) outs.push_back(label);
      f.assemble(outs);
    }
    return fn_cache_->emplace(name, std::move(code)).first->second;
  }

  // Leaves one anonymous temporary (the value) on top; when the right-hand
  // side fails the emitted code ends in FAILWITH and the frame is dead.
  void rhs(Frame& f, const TRhsPtr& r) {
    switch (r->k) {
      case TRhs::K::Arg:
        targ(f, r->arg);
        return;
      case TRhs::K::Dup:
        targ(f, r->arg);
        f.emit(m_op(MOp::DUP));
        f.push_temp();
        f.emit(m_op(MOp::PAIR));
        f.pop();
        f.name_top(Label{});
        return;
      case TRhs::K::Amount:
        if (r->arg.k == TArg::K::Var) {
          f.dig_var(r->arg.var);
          f.emit(m_op(MOp::DROP));
          f.pop();
        }
        f.emit(m_op(MOp::AMOUNT));
        f.push_temp();
        return;
      case TRhs::K::Failwith:
        targ(f, r->arg);
        f.emit(m_op(MOp::FAILWITH));
        f.pop();
        return;
      case TRhs::K::AssertSome: {
        // The argument record has the single field `opt`, so its compiled
        // value is the option itself; the result record collapses to `res`.
        targ(f, r->arg);
        MichCode none_arm;
        none_arm.push_back(m_push(mt_string(), mv_string("assert_some")));
        none_arm.push_back(m_op(MOp::FAILWITH));
        f.emit(m_if_none(std::move(none_arm), MichCode{}));
        return;
      }
      case TRhs::K::Call: {
        targ(f, r->arg);
        const TypedFunction* callee = prog_.find(r->callee);
        if (!callee) bug("call to unknown function " + r->callee);
        const MichCode& body = function_code(r->callee);
        for (const auto& ins : body) f.emit(ins);
        if (callee->fails) f.pop();
        return;
      }
      case TRhs::K::Proj: {
        TypePtr src_ty = r->consumed.lookup(r->var);
        if (!src_ty) bug("projection source missing from the consumed environment");
        const auto* rec = std::get_if<RecordTy>(&src_ty->node);
        if (!rec) bug("projection from a non-record");
        f.dig_var(r->var);
        f.name_top(Label{});
        size_t n = rec->fields.size();
        size_t idx = n;
        for (size_t i = 0; i < n; ++i)
          if (rec->fields[i].first == r->field) { idx = i; break; }
        if (idx == n) bug("projected field is missing");
        if (n > 1) {
          // Right comb: field i sits at CDR^i CAR, the last at CDR^(n-1).
          for (size_t i = 0; i < idx; ++i) f.emit(m_op(MOp::CDR));
          if (idx + 1 < n) f.emit(m_op(MOp::CAR));
        }
        return;
      }
      case TRhs::K::RecUpdate: {
        const auto* rec = std::get_if<RecordTy>(&r->type->node);
        if (!rec) bug("record update on a non-record");
        f.dig_var(r->var);
        f.name_top(Label{});
        size_t n = rec->fields.size();
        std::vector<Label> tmp(n);
        for (size_t i = 0; i < n; ++i) tmp[i] = "#" + std::to_string(i);
        f.destructure(tmp);
        for (const auto& [label, src] : r->upd_fields) {
          size_t idx = n;
          for (size_t i = 0; i < n; ++i)
            if (rec->fields[i].first == label) { idx = i; break; }
          if (idx == n) bug("updated field is missing");
          f.dig_var(tmp[idx]);
          f.emit(m_op(MOp::DROP));
          f.pop();
          f.rename(src, tmp[idx]);
        }
        f.assemble(tmp);
        return;
      }
      case TRhs::K::MapUpdate:
        f.dig_var(r->var);
        f.name_top(Label{});
        targ(f, r->val);
        targ(f, r->key);
        f.emit(m_op(MOp::UPDATE));
        f.pop();
        f.pop();
        f.name_top(Label{});
        return;
      case TRhs::K::Add:
        f.dig_var(r->right);
        f.dig_var(r->left);
        f.emit(m_op(MOp::ADD));
        f.pop();
        f.name_top(Label{});
        return;
      case TRhs::K::Ge:
        f.dig_var(r->right);
        f.dig_var(r->left);
        f.emit(m_op(MOp::COMPARE));
        f.emit(m_op(MOp::GE));
        f.pop();
        f.name_top(Label{});
        return;
      case TRhs::K::MapGet:
        f.dig_var(r->left);
        f.dig_var(r->right);
        f.emit(m_op(MOp::GET));
        f.pop();
        f.name_top(Label{});
        return;
      case TRhs::K::Construct: {
        targ(f, r->arg);
        if (std::holds_alternative<OptionTy>(r->type->node)) {
          f.emit(m_op(MOp::SOME));
          return;
        }
        const auto* vt = std::get_if<VariantTy>(&r->type->node);
        if (!vt) bug("constructor application at a non-variant type");
        size_t n = vt->ctors.size();
        size_t idx = n;
        for (size_t i = 0; i < n; ++i)
          if (vt->ctors[i].first == r->ctor) { idx = i; break; }
        if (idx == n) bug("constructor not in variant type");
        if (n == 1) return;
        if (idx + 1 < n) {
          MTypePtr suffix = compile_type(vt->ctors[n - 1].second);
          for (size_t i = n - 1; i-- > idx + 1;)
            suffix = mt_or(compile_type(vt->ctors[i].second), suffix);
          f.emit(m_left(suffix));
        }
        for (size_t i = idx; i-- > 0;) f.emit(m_right(compile_type(vt->ctors[i].second)));
        return;
      }
      case TRhs::K::Match:
        lower_match(
            f, r->scrutinee, r->scrut_type, r->fails, r->branches.size(),
            [&](size_t b) -> const Label& { return r->branches[b].binder; },
            [&](Frame& arm, size_t b) { rhs(arm, r->branches[b].body); },
            [&](size_t b) { return r->branches[b].body->fails; });
        return;
    }
    bug("unhandled right-hand side");
  }

  void instr(Frame& f, const TInstrPtr& i) {
    f.assert_env(i->env_in);
    switch (i->k) {
      case TInstr::K::Noop:
        break;
      case TInstr::K::Seq:
        instr(f, i->first);
        instr(f, i->second);
        break;
      case TInstr::K::Assign: {
        rhs(f, i->rhs);
        if (i->fails) return;
        if (const auto* vl = std::get_if<VarLhs>(&i->lhs.node)) {
          f.place_top(vl->name);
        } else {
          const auto& rl = std::get<RecordLhs>(i->lhs.node);
          const auto* rec = std::get_if<RecordTy>(&i->rhs->type->node);
          if (!rec) bug("record pattern against a non-record value");
          std::vector<Label> names;
          names.reserve(rec->fields.size());
          for (const auto& [label, ty] : rec->fields) {
            Label bound;
            for (const auto& [pl, pv] : rl.fields)
              if (pl == label) { bound = pv; break; }
            if (bound.empty()) bug("pattern is missing field " + label);
            names.push_back(bound);
          }
          f.destructure(names);
          f.restore_sorted();
        }
        break;
      }
      case TInstr::K::Drop:
        f.dig_var(i->var);
        f.emit(m_op(MOp::DROP));
        f.pop();
        break;
      case TInstr::K::Exec: {
        rhs(f, i->rhs);
        if (i->fails) return;
        const auto* rec = std::get_if<RecordTy>(&i->rhs->type->node);
        if (!rec) bug("instruction-position expression of non-record type");
        std::vector<Label> names;
        names.reserve(rec->fields.size());
        for (const auto& [label, ty] : rec->fields) names.push_back(label);
        f.destructure(names);
        f.restore_sorted();
        break;
      }
      case TInstr::K::Match:
        lower_match(
            f, i->scrutinee, i->scrut_type, i->fails, i->branches.size(),
            [&](size_t b) -> const Label& { return i->branches[b].binder; },
            [&](Frame& arm, size_t b) { instr(arm, i->branches[b].body); },
            [&](size_t b) { return i->branches[b].body->fails; });
        break;
    }
    if (!i->fails) f.assert_env(i->env_out);
  }

 private:
  void targ(Frame& f, const TArg& a) {
    switch (a.k) {
      case TArg::K::Var:
        f.dig_var(a.var);
        f.name_top(Label{});
        return;
      case TArg::K::Lit:
        push_literal(f, a.lit, a.type);
        return;
      case TArg::K::Record: {
        std::vector<Label> sources;
        sources.reserve(a.rec.size());
        for (const auto& [label, var] : a.rec) sources.push_back(var);
        f.assemble(sources);
        return;
      }
    }
    bug("unhandled argument form");
  }

  // Shared lowering for both match forms. Arms are emitted against copies of
  // the frame; every non-failing arm must end in the same layout, which the
  // parent frame then adopts. Sorted branch order mirrors the or-comb, with
  // bool lowered to IF and option to IF_NONE.
  template <typename BinderOf, typename Body, typename FailsOf>
  void lower_match(Frame& f, const Label& scrutinee, const TypePtr& scrut_type, bool all_fail,
                   size_t n_branches, BinderOf binder_of, Body body, FailsOf fails_of) {
    f.dig_var(scrutinee);
    f.pop();  // consumed by the branching instruction (or rebound as payload)

    auto view = variant_view(scrut_type);
    if (view.size() != n_branches) bug("match branch count does not match the scrutinee type");

    std::vector<MichCode> arm_code(n_branches);
    bool adopted = false;
    std::vector<Label> final_slots;

    for (size_t b = 0; b < n_branches; ++b) {
      Frame arm(f.slots(), arm_code[b]);
      if (payload_carrying(scrut_type, b)) {
        arm.push_temp();
      } else {
        arm.emit(m_op(MOp::UNIT));
        arm.push_temp();
      }
      arm.place_top(binder_of(b));
      body(arm, b);
      if (!fails_of(b)) {
        if (!adopted) {
          final_slots = arm.slots();
          adopted = true;
        } else if (final_slots != arm.slots()) {
          bug("match arms end in different layouts");
        }
      }
    }

    emit_branch_tree(f, scrut_type, n_branches, arm_code);
    if (!all_fail) f.set_slots(std::move(final_slots));
  }

  static bool payload_carrying(const TypePtr& scrut_type, size_t branch) {
    if (std::holds_alternative<PrimTy>(scrut_type->node)) return false;  // bool
    if (std::holds_alternative<OptionTy>(scrut_type->node)) return branch == 1;  // Some
    return true;  // variants: every arm receives its payload
  }

  void emit_branch_tree(Frame& f, const TypePtr& scrut_type, size_t n,
                        std::vector<MichCode>& arms) {
    if (std::holds_alternative<PrimTy>(scrut_type->node)) {
      // Sorted branches are [False, True]; IF runs its first code on True.
      f.emit(m_if(std::move(arms[1]), std::move(arms[0])));
      return;
    }
    if (std::holds_alternative<OptionTy>(scrut_type->node)) {
      f.emit(m_if_none(std::move(arms[0]), std::move(arms[1])));
      return;
    }
    if (n == 1) {
      // Singleton variant: the scrutinee value is the payload itself, so the
      // single arm runs inline with no branching instruction.
      for (auto& ins : arms[0]) f.emit(std::move(ins));
      return;
    }
    MichCode tree = std::move(arms[n - 1]);
    for (size_t i = n - 1; i-- > 0;) {
      MichCode wrapped;
      wrapped.push_back(m_if_left(std::move(arms[i]), std::move(tree)));
      tree = std::move(wrapped);
    }
    for (auto& ins : tree) f.emit(std::move(ins));
  }

  const TypedProgram& prog_;
  std::map<Label, MichCode>* fn_cache_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Public interface
// ---------------------------------------------------------------------------

const MichCode& Compiler::function_code(const Label& name) {
  Emitter e(prog_, fn_cache_);
  return e.function_code(name);
}

std::pair<MichCode, std::vector<Label>> Compiler::compile_instruction(
    std::vector<Label> layout, const TInstrPtr& instr) {
  MichCode code;
  Frame f(std::move(layout), code);
  Emitter e(prog_, fn_cache_);
  e.instr(f, instr);
  return {std::move(code), f.slots()};
}

MichScript Compiler::compile_contract(const Label& main) {
  const TypedFunction* fn = prog_.find(main);
  if (!fn)
    throw TypeError(TypeErrorKind::UnknownFunction, Pos{},
                    "no function named " + main + " to use as the entry point");
  const auto convention_error = [&]() -> TypeError {
    return TypeError(TypeErrorKind::TypeMismatch, fn->pos,
                     "the entry point must have type { param : P; store : S } -> "
                     "{ operations : list operation; store : S }, but " + main +
                     " has type " + print_type(fn->input_type) + " -> " +
                     print_type(fn->output_type));
  };
  const auto& in = fn->input.items();
  const auto& out = fn->output.items();
  if (in.size() != 2 || in[0].first != "param" || in[1].first != "store")
    throw convention_error();
  if (out.size() != 2 || out[0].first != "operations" || out[1].first != "store")
    throw convention_error();
  if (!type_equal(out[0].second, t_list(t_operation())))
    throw convention_error();
  if (!type_equal(in[1].second, out[1].second))
    throw convention_error();

  MichScript script;
  script.param = compile_type(in[0].second);
  script.storage = compile_type(in[1].second);

  Frame f({Label{}}, script.code);
  f.destructure({"param", "store"});
  f.restore_sorted();
  Emitter e(prog_, fn_cache_);
  e.instr(f, fn->body);
  if (!fn->fails) f.assemble({"operations", "store"});
  return script;
}

MichScript compile_contract(const TypedProgram& p, const Label& main) {
  Compiler c(p);
  return c.compile_contract(main);
}

}  // namespace albert
