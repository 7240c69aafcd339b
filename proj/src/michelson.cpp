#include "albert/michelson.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

namespace albert {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

namespace {

MTypePtr make_leaf(MT k) { return std::make_shared<MichType>(MichType{k, nullptr, nullptr}); }

const MTypePtr& leaf(MT k) {
  static const MTypePtr unit = make_leaf(MT::Unit);
  static const MTypePtr nat = make_leaf(MT::Nat);
  static const MTypePtr int_ = make_leaf(MT::Int);
  static const MTypePtr string_ = make_leaf(MT::String);
  static const MTypePtr mutez = make_leaf(MT::Mutez);
  static const MTypePtr bool_ = make_leaf(MT::Bool);
  static const MTypePtr operation = make_leaf(MT::Operation);
  switch (k) {
    case MT::Unit: return unit;
    case MT::Nat: return nat;
    case MT::Int: return int_;
    case MT::String: return string_;
    case MT::Mutez: return mutez;
    case MT::Bool: return bool_;
    case MT::Operation: return operation;
    default: internal_error("not a leaf type");
  }
}

}  // namespace

MTypePtr mt_unit() { return leaf(MT::Unit); }
MTypePtr mt_nat() { return leaf(MT::Nat); }
MTypePtr mt_int() { return leaf(MT::Int); }
MTypePtr mt_string() { return leaf(MT::String); }
MTypePtr mt_mutez() { return leaf(MT::Mutez); }
MTypePtr mt_bool() { return leaf(MT::Bool); }
MTypePtr mt_operation() { return leaf(MT::Operation); }

MTypePtr mt_pair(MTypePtr a, MTypePtr b) {
  return std::make_shared<MichType>(MichType{MT::Pair, std::move(a), std::move(b)});
}
MTypePtr mt_or(MTypePtr a, MTypePtr b) {
  return std::make_shared<MichType>(MichType{MT::Or, std::move(a), std::move(b)});
}
MTypePtr mt_option(MTypePtr a) {
  return std::make_shared<MichType>(MichType{MT::Option, std::move(a), nullptr});
}
MTypePtr mt_list(MTypePtr a) {
  return std::make_shared<MichType>(MichType{MT::List, std::move(a), nullptr});
}
MTypePtr mt_map(MTypePtr key, MTypePtr val) {
  return std::make_shared<MichType>(MichType{MT::Map, std::move(key), std::move(val)});
}

bool mich_type_equal(const MTypePtr& a, const MTypePtr& b) {
  if (a.get() == b.get()) return true;
  if (a->k != b->k) return false;
  if (a->a && (!b->a || !mich_type_equal(a->a, b->a))) return false;
  if (!a->a && b->a) return false;
  if (a->b && (!b->b || !mich_type_equal(a->b, b->b))) return false;
  if (!a->b && b->b) return false;
  return true;
}

bool mich_comparable(const MTypePtr& t) {
  switch (t->k) {
    case MT::Nat:
    case MT::Int:
    case MT::String:
    case MT::Mutez:
    case MT::Bool:
      return true;
    default:
      return false;
  }
}

bool mich_pushable(const MTypePtr& t) {
  if (t->k == MT::Operation) return false;
  if (t->a && !mich_pushable(t->a)) return false;
  if (t->b && !mich_pushable(t->b)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

namespace {
MValPtr mk(MichValue v) { return std::make_shared<MichValue>(std::move(v)); }
}  // namespace

MValPtr mv_unit() {
  static const MValPtr u = mk({MV::Unit});
  return u;
}
MValPtr mv_nat(big_int v) {
  if (v < 0) internal_error("nat literal below zero");
  MichValue m{MV::Nat};
  m.num = std::move(v);
  return mk(std::move(m));
}
MValPtr mv_int(big_int v) {
  MichValue m{MV::Int};
  m.num = std::move(v);
  return mk(std::move(m));
}
MValPtr mv_mutez(std::int64_t v) {
  if (v < 0) internal_error("mutez literal below zero");
  MichValue m{MV::Mutez};
  m.mutez = v;
  return mk(std::move(m));
}
MValPtr mv_string(std::string v) {
  MichValue m{MV::String};
  m.str = std::move(v);
  return mk(std::move(m));
}
MValPtr mv_bool(bool v) {
  static const MValPtr t = [] {
    MichValue m{MV::Bool};
    m.flag = true;
    return mk(std::move(m));
  }();
  static const MValPtr f = mk({MV::Bool});
  return v ? t : f;
}
MValPtr mv_pair(MValPtr a, MValPtr b) {
  MichValue m{MV::Pair};
  m.a = std::move(a);
  m.b = std::move(b);
  return mk(std::move(m));
}
MValPtr mv_left(MValPtr v) {
  MichValue m{MV::Left};
  m.a = std::move(v);
  return mk(std::move(m));
}
MValPtr mv_right(MValPtr v) {
  MichValue m{MV::Right};
  m.a = std::move(v);
  return mk(std::move(m));
}
MValPtr mv_some(MValPtr v) {
  MichValue m{MV::Some};
  m.a = std::move(v);
  return mk(std::move(m));
}
MValPtr mv_none() {
  static const MValPtr n = mk({MV::None});
  return n;
}
MValPtr mv_list(std::vector<MValPtr> elems) {
  MichValue m{MV::List};
  m.elems = std::move(elems);
  return mk(std::move(m));
}
MValPtr mv_map(std::vector<std::pair<MValPtr, MValPtr>> entries) {
  std::sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) {
    return mich_compare(x.first, y.first) < 0;
  });
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (mich_compare(entries[i - 1].first, entries[i].first) == 0)
      internal_error("duplicate key in map literal");
  MichValue m{MV::Map};
  m.entries = std::move(entries);
  return mk(std::move(m));
}
MValPtr mv_operation(std::string tag) {
  MichValue m{MV::Operation};
  m.str = std::move(tag);
  return mk(std::move(m));
}

bool mich_value_equal(const MValPtr& a, const MValPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->k != b->k) return false;
  switch (a->k) {
    case MV::Unit: return true;
    case MV::Nat:
    case MV::Int: return a->num == b->num;
    case MV::Mutez: return a->mutez == b->mutez;
    case MV::String:
    case MV::Operation: return a->str == b->str;
    case MV::Bool: return a->flag == b->flag;
    case MV::Pair:
      return mich_value_equal(a->a, b->a) && mich_value_equal(a->b, b->b);
    case MV::Left:
    case MV::Right:
    case MV::Some: return mich_value_equal(a->a, b->a);
    case MV::None: return true;
    case MV::List: {
      if (a->elems.size() != b->elems.size()) return false;
      for (std::size_t i = 0; i < a->elems.size(); ++i)
        if (!mich_value_equal(a->elems[i], b->elems[i])) return false;
      return true;
    }
    case MV::Map: {
      if (a->entries.size() != b->entries.size()) return false;
      for (std::size_t i = 0; i < a->entries.size(); ++i)
        if (!mich_value_equal(a->entries[i].first, b->entries[i].first) ||
            !mich_value_equal(a->entries[i].second, b->entries[i].second))
          return false;
      return true;
    }
  }
  return false;
}

int mich_compare(const MValPtr& a, const MValPtr& b) {
  if (a->k != b->k) internal_error("comparing values of different shapes");
  switch (a->k) {
    case MV::Nat:
    case MV::Int:
      return a->num < b->num ? -1 : a->num == b->num ? 0 : 1;
    case MV::Mutez:
      return a->mutez < b->mutez ? -1 : a->mutez == b->mutez ? 0 : 1;
    case MV::String: {
      int c = a->str.compare(b->str);
      return c < 0 ? -1 : c == 0 ? 0 : 1;
    }
    case MV::Bool:
      return int(a->flag) - int(b->flag);
    default:
      internal_error("value is not comparable");
  }
}

bool mich_value_has_type(const MValPtr& v, const MTypePtr& t) {
  switch (t->k) {
    case MT::Unit: return v->k == MV::Unit;
    case MT::Nat: return v->k == MV::Nat && v->num >= 0;
    case MT::Int: return v->k == MV::Int;
    case MT::String: return v->k == MV::String;
    case MT::Mutez: return v->k == MV::Mutez && v->mutez >= 0;
    case MT::Bool: return v->k == MV::Bool;
    case MT::Operation: return v->k == MV::Operation;
    case MT::Pair:
      return v->k == MV::Pair && mich_value_has_type(v->a, t->a) &&
             mich_value_has_type(v->b, t->b);
    case MT::Or:
      if (v->k == MV::Left) return mich_value_has_type(v->a, t->a);
      if (v->k == MV::Right) return mich_value_has_type(v->a, t->b);
      return false;
    case MT::Option:
      if (v->k == MV::None) return true;
      return v->k == MV::Some && mich_value_has_type(v->a, t->a);
    case MT::List: {
      if (v->k != MV::List) return false;
      for (const auto& e : v->elems)
        if (!mich_value_has_type(e, t->a)) return false;
      return true;
    }
    case MT::Map: {
      if (v->k != MV::Map) return false;
      if (!mich_comparable(t->a)) return false;
      for (std::size_t i = 0; i < v->entries.size(); ++i) {
        if (!mich_value_has_type(v->entries[i].first, t->a) ||
            !mich_value_has_type(v->entries[i].second, t->b))
          return false;
        if (i > 0 && mich_compare(v->entries[i - 1].first, v->entries[i].first) >= 0)
          return false;
      }
      return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Instruction constructors
// ---------------------------------------------------------------------------

MichInstr m_op(MOp op) { return MichInstr{op, nullptr, nullptr, 0, {}, {}}; }
MichInstr m_push(MTypePtr ty, MValPtr val) {
  return MichInstr{MOp::PUSH, std::move(ty), std::move(val), 0, {}, {}};
}
MichInstr m_dig(std::size_t n) { return MichInstr{MOp::DIG, nullptr, nullptr, n, {}, {}}; }
MichInstr m_dug(std::size_t n) { return MichInstr{MOp::DUG, nullptr, nullptr, n, {}, {}}; }
MichInstr m_left(MTypePtr right_ty) {
  return MichInstr{MOp::LEFT, std::move(right_ty), nullptr, 0, {}, {}};
}
MichInstr m_right(MTypePtr left_ty) {
  return MichInstr{MOp::RIGHT, std::move(left_ty), nullptr, 0, {}, {}};
}
MichInstr m_none(MTypePtr ty) {
  return MichInstr{MOp::NONE, std::move(ty), nullptr, 0, {}, {}};
}
MichInstr m_nil(MTypePtr ty) {
  return MichInstr{MOp::NIL, std::move(ty), nullptr, 0, {}, {}};
}
MichInstr m_if(MichCode then_arm, MichCode else_arm) {
  return MichInstr{MOp::IF, nullptr, nullptr, 0, std::move(then_arm), std::move(else_arm)};
}
MichInstr m_if_left(MichCode left_arm, MichCode right_arm) {
  return MichInstr{MOp::IF_LEFT, nullptr, nullptr, 0, std::move(left_arm),
                   std::move(right_arm)};
}
MichInstr m_if_none(MichCode none_arm, MichCode some_arm) {
  return MichInstr{MOp::IF_NONE, nullptr, nullptr, 0, std::move(none_arm),
                   std::move(some_arm)};
}
MichInstr m_seq(MichCode code) {
  return MichInstr{MOp::SEQ, nullptr, nullptr, 0, std::move(code), {}};
}

namespace {

bool mich_instr_equal(const MichInstr& a, const MichInstr& b) {
  if (a.op != b.op || a.n != b.n) return false;
  if ((a.ty == nullptr) != (b.ty == nullptr)) return false;
  if (a.ty && !mich_type_equal(a.ty, b.ty)) return false;
  if ((a.val == nullptr) != (b.val == nullptr)) return false;
  if (a.val && !mich_value_equal(a.val, b.val)) return false;
  return mich_code_equal(a.a, b.a) && mich_code_equal(a.b, b.b);
}

}  // namespace

bool mich_code_equal(const MichCode& a, const MichCode& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!mich_instr_equal(a[i], b[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Stack typechecking
// ---------------------------------------------------------------------------

MichStackTy stack_of(std::vector<MTypePtr> items) {
  return MichStackTy{false, std::move(items)};
}
MichStackTy failed_stack() { return MichStackTy{true, {}}; }

bool mich_stack_equal(const MichStackTy& a, const MichStackTy& b) {
  if (a.failed != b.failed) return false;
  if (a.failed) return true;
  if (a.items.size() != b.items.size()) return false;
  for (std::size_t i = 0; i < a.items.size(); ++i)
    if (!mich_type_equal(a.items[i], b.items[i])) return false;
  return true;
}

namespace {

const char* op_name(MOp op) {
  switch (op) {
    case MOp::PUSH: return "PUSH";
    case MOp::UNIT: return "UNIT";
    case MOp::PAIR: return "PAIR";
    case MOp::CAR: return "CAR";
    case MOp::CDR: return "CDR";
    case MOp::UNPAIR: return "UNPAIR";
    case MOp::DUP: return "DUP";
    case MOp::DROP: return "DROP";
    case MOp::SWAP: return "SWAP";
    case MOp::DIG: return "DIG";
    case MOp::DUG: return "DUG";
    case MOp::LEFT: return "LEFT";
    case MOp::RIGHT: return "RIGHT";
    case MOp::IF_LEFT: return "IF_LEFT";
    case MOp::IF: return "IF";
    case MOp::IF_NONE: return "IF_NONE";
    case MOp::SOME: return "SOME";
    case MOp::NONE: return "NONE";
    case MOp::NIL: return "NIL";
    case MOp::CONS: return "CONS";
    case MOp::ADD: return "ADD";
    case MOp::COMPARE: return "COMPARE";
    case MOp::GE: return "GE";
    case MOp::GET: return "GET";
    case MOp::UPDATE: return "UPDATE";
    case MOp::AMOUNT: return "AMOUNT";
    case MOp::FAILWITH: return "FAILWITH";
    case MOp::SEQ: return "SEQ";
  }
  return "?";
}

std::string stack_str(const MichStackTy& s) {
  if (s.failed) return "<failed>";
  std::string out = "[";
  for (std::size_t i = 0; i < s.items.size(); ++i) {
    if (i) out += ", ";
    out += print_mich_type(s.items[i]);
  }
  return out + "]";
}

struct StackChecker {
  [[noreturn]] void err(const std::string& where, const std::string& msg,
                        const MichStackTy& st) {
    throw MichTypeError(where + ": " + msg + " (stack " + stack_str(st) + ")");
  }

  MTypePtr pop(MichStackTy& st, const std::string& where, const char* what) {
    if (st.items.empty()) err(where, std::string("needs ") + what + " but the stack is empty", st);
    MTypePtr t = st.items.front();
    st.items.erase(st.items.begin());
    return t;
  }

  MichStackTy unify(const MichStackTy& x, const MichStackTy& y,
                    const std::string& where) {
    if (x.failed) return y;
    if (y.failed) return x;
    if (!mich_stack_equal(x, y))
      throw MichTypeError(where + ": branches end in different stacks: " +
                          stack_str(x) + " vs " + stack_str(y));
    return x;
  }

  MichStackTy check_seq(const MichCode& code, MichStackTy st, const std::string& where) {
    for (std::size_t i = 0; i < code.size(); ++i) {
      std::string here = where + "[" + std::to_string(i) + "] " + op_name(code[i].op);
      if (st.failed)
        throw MichTypeError(here + ": unreachable instruction after FAILWITH");
      st = check_one(code[i], std::move(st), here);
    }
    return st;
  }

  MichStackTy check_one(const MichInstr& in, MichStackTy st, const std::string& here) {
    switch (in.op) {
      case MOp::PUSH:
        if (!in.ty || !in.val) err(here, "missing its type or value", st);
        if (!mich_pushable(in.ty))
          err(here, "type " + print_mich_type(in.ty) + " cannot be pushed", st);
        if (!mich_value_has_type(in.val, in.ty))
          err(here, "value " + print_mich_value(in.val) + " does not have type " +
                        print_mich_type(in.ty), st);
        st.items.insert(st.items.begin(), in.ty);
        return st;
      case MOp::UNIT:
        st.items.insert(st.items.begin(), mt_unit());
        return st;
      case MOp::PAIR: {
        MTypePtr a = pop(st, here, "two values");
        MTypePtr b = pop(st, here, "two values");
        st.items.insert(st.items.begin(), mt_pair(a, b));
        return st;
      }
      case MOp::CAR: {
        MTypePtr t = pop(st, here, "a pair");
        if (t->k != MT::Pair) err(here, "needs a pair, got " + print_mich_type(t), st);
        st.items.insert(st.items.begin(), t->a);
        return st;
      }
      case MOp::CDR: {
        MTypePtr t = pop(st, here, "a pair");
        if (t->k != MT::Pair) err(here, "needs a pair, got " + print_mich_type(t), st);
        st.items.insert(st.items.begin(), t->b);
        return st;
      }
      case MOp::UNPAIR: {
        MTypePtr t = pop(st, here, "a pair");
        if (t->k != MT::Pair) err(here, "needs a pair, got " + print_mich_type(t), st);
        st.items.insert(st.items.begin(), t->b);
        st.items.insert(st.items.begin(), t->a);
        return st;
      }
      case MOp::DUP: {
        if (st.items.empty()) err(here, "needs a value", st);
        st.items.insert(st.items.begin(), st.items.front());
        return st;
      }
      case MOp::DROP:
        pop(st, here, "a value");
        return st;
      case MOp::SWAP: {
        if (st.items.size() < 2) err(here, "needs two values", st);
        std::swap(st.items[0], st.items[1]);
        return st;
      }
      case MOp::DIG: {
        if (st.items.size() < in.n + 1)
          err(here, "reaches depth " + std::to_string(in.n) + " but the stack is shallower", st);
        MTypePtr t = st.items[in.n];
        st.items.erase(st.items.begin() + static_cast<std::ptrdiff_t>(in.n));
        st.items.insert(st.items.begin(), t);
        return st;
      }
      case MOp::DUG: {
        if (st.items.size() < in.n + 1)
          err(here, "reaches depth " + std::to_string(in.n) + " but the stack is shallower", st);
        MTypePtr t = st.items.front();
        st.items.erase(st.items.begin());
        st.items.insert(st.items.begin() + static_cast<std::ptrdiff_t>(in.n), t);
        return st;
      }
      case MOp::LEFT: {
        if (!in.ty) err(here, "missing its type argument", st);
        MTypePtr t = pop(st, here, "a value");
        st.items.insert(st.items.begin(), mt_or(t, in.ty));
        return st;
      }
      case MOp::RIGHT: {
        if (!in.ty) err(here, "missing its type argument", st);
        MTypePtr t = pop(st, here, "a value");
        st.items.insert(st.items.begin(), mt_or(in.ty, t));
        return st;
      }
      case MOp::IF_LEFT: {
        MTypePtr t = pop(st, here, "an or value");
        if (t->k != MT::Or) err(here, "needs an or, got " + print_mich_type(t), st);
        MichStackTy l = st;
        l.items.insert(l.items.begin(), t->a);
        MichStackTy r = std::move(st);
        r.items.insert(r.items.begin(), t->b);
        return unify(check_seq(in.a, std::move(l), here + ".left"),
                     check_seq(in.b, std::move(r), here + ".right"), here);
      }
      case MOp::IF: {
        MTypePtr t = pop(st, here, "a bool");
        if (t->k != MT::Bool) err(here, "needs a bool, got " + print_mich_type(t), st);
        MichStackTy e = st;
        return unify(check_seq(in.a, std::move(st), here + ".then"),
                     check_seq(in.b, std::move(e), here + ".else"), here);
      }
      case MOp::IF_NONE: {
        MTypePtr t = pop(st, here, "an option");
        if (t->k != MT::Option)
          err(here, "needs an option, got " + print_mich_type(t), st);
        MichStackTy s = st;
        s.items.insert(s.items.begin(), t->a);
        return unify(check_seq(in.a, std::move(st), here + ".none"),
                     check_seq(in.b, std::move(s), here + ".some"), here);
      }
      case MOp::SOME: {
        MTypePtr t = pop(st, here, "a value");
        st.items.insert(st.items.begin(), mt_option(t));
        return st;
      }
      case MOp::NONE:
        if (!in.ty) err(here, "missing its type argument", st);
        st.items.insert(st.items.begin(), mt_option(in.ty));
        return st;
      case MOp::NIL:
        if (!in.ty) err(here, "missing its type argument", st);
        st.items.insert(st.items.begin(), mt_list(in.ty));
        return st;
      case MOp::CONS: {
        MTypePtr x = pop(st, here, "an element and a list");
        MTypePtr l = pop(st, here, "an element and a list");
        if (l->k != MT::List || !mich_type_equal(l->a, x))
          err(here, "cannot cons " + print_mich_type(x) + " onto " + print_mich_type(l), st);
        st.items.insert(st.items.begin(), l);
        return st;
      }
      case MOp::ADD: {
        MTypePtr x = pop(st, here, "two numbers");
        MTypePtr y = pop(st, here, "two numbers");
        bool num = x->k == MT::Nat || x->k == MT::Int || x->k == MT::Mutez;
        if (!num || x->k != y->k)
          err(here, "cannot add " + print_mich_type(x) + " and " + print_mich_type(y), st);
        st.items.insert(st.items.begin(), x);
        return st;
      }
      case MOp::COMPARE: {
        MTypePtr x = pop(st, here, "two comparable values");
        MTypePtr y = pop(st, here, "two comparable values");
        if (!mich_comparable(x) || !mich_type_equal(x, y))
          err(here, "cannot compare " + print_mich_type(x) + " with " + print_mich_type(y), st);
        st.items.insert(st.items.begin(), mt_int());
        return st;
      }
      case MOp::GE: {
        MTypePtr t = pop(st, here, "an int");
        if (t->k != MT::Int) err(here, "needs an int, got " + print_mich_type(t), st);
        st.items.insert(st.items.begin(), mt_bool());
        return st;
      }
      case MOp::GET: {
        MTypePtr k = pop(st, here, "a key and a map");
        MTypePtr m = pop(st, here, "a key and a map");
        if (m->k != MT::Map || !mich_type_equal(m->a, k))
          err(here, "cannot look up " + print_mich_type(k) + " in " + print_mich_type(m), st);
        st.items.insert(st.items.begin(), mt_option(m->b));
        return st;
      }
      case MOp::UPDATE: {
        MTypePtr k = pop(st, here, "a key, an optional value and a map");
        MTypePtr v = pop(st, here, "a key, an optional value and a map");
        MTypePtr m = pop(st, here, "a key, an optional value and a map");
        if (m->k != MT::Map || !mich_type_equal(m->a, k) || v->k != MT::Option ||
            !mich_type_equal(v->a, m->b))
          err(here, "cannot update " + print_mich_type(m) + " with key " +
                        print_mich_type(k) + " and value " + print_mich_type(v), st);
        st.items.insert(st.items.begin(), m);
        return st;
      }
      case MOp::AMOUNT:
        st.items.insert(st.items.begin(), mt_mutez());
        return st;
      case MOp::FAILWITH: {
        MTypePtr t = pop(st, here, "a failure payload");
        if (!mich_pushable(t))
          err(here, "payload type " + print_mich_type(t) + " cannot fail", st);
        return failed_stack();
      }
      case MOp::SEQ:
        return check_seq(in.a, std::move(st), here + ".seq");
    }
    internal_error("unreachable instruction kind");
  }
};

}  // namespace

MichStackTy mtc_typecheck(const MichCode& code, const MichStackTy& input) {
  if (input.failed) internal_error("cannot typecheck code against a failed stack");
  return StackChecker{}.check_seq(code, input, "code");
}

void mtc_typecheck_script(const MichScript& s) {
  if (!mich_pushable(s.param))
    throw MichTypeError("the parameter type cannot mention operation");
  if (!mich_pushable(s.storage))
    throw MichTypeError("the storage type cannot mention operation");
  MichStackTy out =
      mtc_typecheck(s.code, stack_of({mt_pair(s.param, s.storage)}));
  MichStackTy want = stack_of({mt_pair(mt_list(mt_operation()), s.storage)});
  if (!out.failed && !mich_stack_equal(out, want))
    throw MichTypeError(
        "the code does not satisfy the contract convention: expected " +
        stack_str(want) + ", got " + stack_str(out));
}

// ---------------------------------------------------------------------------
// Interpretation
// ---------------------------------------------------------------------------

namespace {

struct MichFailureEx {
  MValPtr payload;
};

struct Machine {
  const MichContext& ctx;
  std::uint64_t steps = 0;
  std::vector<MValPtr> st = {};  // index 0 = top

  void tick() {
    if (++steps > ctx.max_steps) internal_error("execution exceeded its step ceiling");
  }

  MValPtr pop() {
    if (st.empty()) internal_error("stack underflow (code was not typechecked)");
    MValPtr v = std::move(st.front());
    st.erase(st.begin());
    return v;
  }

  void push(MValPtr v) { st.insert(st.begin(), std::move(v)); }

  void run(const MichCode& code) {
    for (const auto& in : code) exec(in);
  }

  void exec(const MichInstr& in) {
    tick();
    switch (in.op) {
      case MOp::PUSH: push(in.val); return;
      case MOp::UNIT: push(mv_unit()); return;
      case MOp::PAIR: {
        MValPtr a = pop(), b = pop();
        push(mv_pair(std::move(a), std::move(b)));
        return;
      }
      case MOp::CAR: push(pop()->a); return;
      case MOp::CDR: push(pop()->b); return;
      case MOp::UNPAIR: {
        MValPtr p = pop();
        push(p->b);
        push(p->a);
        return;
      }
      case MOp::DUP: {
        if (st.empty()) internal_error("stack underflow (code was not typechecked)");
        push(st.front());
        return;
      }
      case MOp::DROP: pop(); return;
      case MOp::SWAP: {
        if (st.size() < 2) internal_error("stack underflow (code was not typechecked)");
        std::swap(st[0], st[1]);
        return;
      }
      case MOp::DIG: {
        if (st.size() < in.n + 1)
          internal_error("stack underflow (code was not typechecked)");
        MValPtr v = st[in.n];
        st.erase(st.begin() + static_cast<std::ptrdiff_t>(in.n));
        push(std::move(v));
        return;
      }
      case MOp::DUG: {
        if (st.size() < in.n + 1)
          internal_error("stack underflow (code was not typechecked)");
        MValPtr v = pop();
        st.insert(st.begin() + static_cast<std::ptrdiff_t>(in.n), std::move(v));
        return;
      }
      case MOp::LEFT: push(mv_left(pop())); return;
      case MOp::RIGHT: push(mv_right(pop())); return;
      case MOp::IF_LEFT: {
        MValPtr v = pop();
        if (v->k == MV::Left) {
          push(v->a);
          run(in.a);
        } else {
          push(v->a);
          run(in.b);
        }
        return;
      }
      case MOp::IF: {
        MValPtr v = pop();
        run(v->flag ? in.a : in.b);
        return;
      }
      case MOp::IF_NONE: {
        MValPtr v = pop();
        if (v->k == MV::None) {
          run(in.a);
        } else {
          push(v->a);
          run(in.b);
        }
        return;
      }
      case MOp::SOME: push(mv_some(pop())); return;
      case MOp::NONE: push(mv_none()); return;
      case MOp::NIL: push(mv_list({})); return;
      case MOp::CONS: {
        MValPtr x = pop(), l = pop();
        std::vector<MValPtr> elems;
        elems.reserve(l->elems.size() + 1);
        elems.push_back(std::move(x));
        elems.insert(elems.end(), l->elems.begin(), l->elems.end());
        push(mv_list(std::move(elems)));
        return;
      }
      case MOp::ADD: {
        MValPtr x = pop(), y = pop();
        if (x->k == MV::Nat) {
          push(mv_nat(x->num + y->num));
        } else if (x->k == MV::Int) {
          push(mv_int(x->num + y->num));
        } else {
          std::int64_t sum = 0;
          if (__builtin_add_overflow(x->mutez, y->mutez, &sum))
            throw MichFailureEx{mv_string("mutez overflow")};
          push(mv_mutez(sum));
        }
        return;
      }
      case MOp::COMPARE: {
        MValPtr x = pop(), y = pop();
        push(mv_int(mich_compare(x, y)));
        return;
      }
      case MOp::GE: push(mv_bool(pop()->num >= 0)); return;
      case MOp::GET: {
        MValPtr k = pop(), m = pop();
        auto it = std::lower_bound(
            m->entries.begin(), m->entries.end(), k,
            [](const auto& e, const MValPtr& key) { return mich_compare(e.first, key) < 0; });
        if (it != m->entries.end() && mich_compare(it->first, k) == 0)
          push(mv_some(it->second));
        else
          push(mv_none());
        return;
      }
      case MOp::UPDATE: {
        MValPtr k = pop(), v = pop(), m = pop();
        auto entries = m->entries;
        auto it = std::lower_bound(
            entries.begin(), entries.end(), k,
            [](const auto& e, const MValPtr& key) { return mich_compare(e.first, key) < 0; });
        bool present = it != entries.end() && mich_compare(it->first, k) == 0;
        if (v->k == MV::Some) {
          if (present)
            it->second = v->a;
          else
            entries.insert(it, {k, v->a});
        } else if (present) {
          entries.erase(it);
        }
        push(mv_map(std::move(entries)));
        return;
      }
      case MOp::AMOUNT: push(mv_mutez(ctx.amount)); return;
      case MOp::FAILWITH: throw MichFailureEx{pop()};
      case MOp::SEQ: run(in.a); return;
    }
    internal_error("unreachable instruction kind");
  }
};

}  // namespace

MichResult mtc_interpret(const MichCode& code, std::vector<MValPtr> stack,
                         const MichContext& ctx) {
  Machine m{ctx};
  m.st = std::move(stack);
  try {
    m.run(code);
    return MichResult{std::move(m.st), nullptr};
  } catch (const MichFailureEx& f) {
    return MichResult{{}, f.payload};
  }
}

MichContractResult run_contract(const MichScript& s, const MValPtr& parameter,
                                const MValPtr& storage, std::int64_t amount) {
  mtc_typecheck_script(s);
  if (!mich_value_has_type(parameter, s.param))
    throw MichTypeError("the parameter value does not have type " +
                        print_mich_type(s.param));
  if (!mich_value_has_type(storage, s.storage))
    throw MichTypeError("the storage value does not have type " +
                        print_mich_type(s.storage));
  MichContext ctx;
  ctx.amount = amount;
  MichResult r = mtc_interpret(s.code, {mv_pair(parameter, storage)}, ctx);
  if (r.failed()) return MichContractResult{nullptr, r.failure};
  if (r.stack.size() != 1)
    internal_error("contract execution ended with a malformed stack");
  return MichContractResult{r.stack[0], nullptr};
}

// ---------------------------------------------------------------------------
// Concrete syntax
// ---------------------------------------------------------------------------

namespace {

bool leaf_type(const MTypePtr& t) { return !t->a; }

void print_type_to(std::ostream& os, const MTypePtr& t, bool arg_position) {
  if (leaf_type(t)) {
    switch (t->k) {
      case MT::Unit: os << "unit"; return;
      case MT::Nat: os << "nat"; return;
      case MT::Int: os << "int"; return;
      case MT::String: os << "string"; return;
      case MT::Mutez: os << "mutez"; return;
      case MT::Bool: os << "bool"; return;
      case MT::Operation: os << "operation"; return;
      default: internal_error("leaf type expected");
    }
  }
  if (arg_position) os << '(';
  switch (t->k) {
    case MT::Pair: os << "pair "; break;
    case MT::Or: os << "or "; break;
    case MT::Option: os << "option "; break;
    case MT::List: os << "list "; break;
    case MT::Map: os << "map "; break;
    default: internal_error("compound type expected");
  }
  print_type_to(os, t->a, true);
  if (t->b) {
    os << ' ';
    print_type_to(os, t->b, true);
  }
  if (arg_position) os << ')';
}

void print_value_to(std::ostream& os, const MValPtr& v) {
  switch (v->k) {
    case MV::Unit: os << "Unit"; return;
    case MV::Nat:
    case MV::Int: os << v->num; return;
    case MV::Mutez: os << v->mutez; return;
    case MV::String: {
      os << '"';
      for (char c : v->str) {
        if (c == '"' || c == '\\') os << '\\';
        os << c;
      }
      os << '"';
      return;
    }
    case MV::Bool: os << (v->flag ? "True" : "False"); return;
    case MV::Pair:
      os << "(Pair ";
      print_value_to(os, v->a);
      os << ' ';
      print_value_to(os, v->b);
      os << ')';
      return;
    case MV::Left:
      os << "(Left ";
      print_value_to(os, v->a);
      os << ')';
      return;
    case MV::Right:
      os << "(Right ";
      print_value_to(os, v->a);
      os << ')';
      return;
    case MV::Some:
      os << "(Some ";
      print_value_to(os, v->a);
      os << ')';
      return;
    case MV::None: os << "None"; return;
    case MV::List: {
      if (v->elems.empty()) {
        os << "{}";
        return;
      }
      os << "{ ";
      for (std::size_t i = 0; i < v->elems.size(); ++i) {
        if (i) os << " ; ";
        print_value_to(os, v->elems[i]);
      }
      os << " }";
      return;
    }
    case MV::Map: {
      if (v->entries.empty()) {
        os << "{}";
        return;
      }
      os << "{ ";
      for (std::size_t i = 0; i < v->entries.size(); ++i) {
        if (i) os << " ; ";
        os << "Elt ";
        print_value_to(os, v->entries[i].first);
        os << ' ';
        print_value_to(os, v->entries[i].second);
      }
      os << " }";
      return;
    }
    case MV::Operation:
      // Operations have no literal syntax; this spelling is diagnostic only.
      os << "<operation " << v->str << '>';
      return;
  }
}

void print_code_to(std::ostream& os, const MichCode& code);

void print_instr_to(std::ostream& os, const MichInstr& in) {
  switch (in.op) {
    case MOp::PUSH:
      os << "PUSH ";
      print_type_to(os, in.ty, true);
      os << ' ';
      print_value_to(os, in.val);
      return;
    case MOp::DIG:
    case MOp::DUG:
      os << op_name(in.op) << ' ' << in.n;
      return;
    case MOp::LEFT:
    case MOp::RIGHT:
    case MOp::NONE:
    case MOp::NIL:
      os << op_name(in.op) << ' ';
      print_type_to(os, in.ty, true);
      return;
    case MOp::IF:
    case MOp::IF_LEFT:
    case MOp::IF_NONE:
      os << op_name(in.op) << ' ';
      print_code_to(os, in.a);
      os << ' ';
      print_code_to(os, in.b);
      return;
    case MOp::SEQ:
      print_code_to(os, in.a);
      return;
    default:
      os << op_name(in.op);
      return;
  }
}

void print_code_to(std::ostream& os, const MichCode& code) {
  if (code.empty()) {
    os << "{}";
    return;
  }
  os << "{ ";
  for (std::size_t i = 0; i < code.size(); ++i) {
    if (i) os << " ; ";
    print_instr_to(os, code[i]);
  }
  os << " }";
}

}  // namespace

std::string print_mich_type(const MTypePtr& t) {
  std::ostringstream os;
  print_type_to(os, t, false);
  return os.str();
}

std::string print_mich_value(const MValPtr& v) {
  std::ostringstream os;
  print_value_to(os, v);
  return os.str();
}

std::string print_mich_code(const MichCode& code) {
  std::ostringstream os;
  print_code_to(os, code);
  return os.str();
}

std::string print_michelson(const MichScript& s) {
  std::ostringstream os;
  os << "parameter ";
  print_type_to(os, s.param, true);
  os << ";\nstorage ";
  print_type_to(os, s.storage, true);
  os << ";\ncode ";
  print_code_to(os, s.code);
  os << ";\n";
  return os.str();
}

}  // namespace albert
