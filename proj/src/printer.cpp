#include "albert/printer.hpp"

#include <sstream>

namespace albert {

namespace {

// Compound types need parentheses as arguments of list/option/map; records,
// variants and leaves delimit themselves.
bool self_delimiting(const TypePtr& t) {
  return std::holds_alternative<PrimTy>(t->node) ||
         std::holds_alternative<RecordTy>(t->node) ||
         std::holds_alternative<VariantTy>(t->node) ||
         std::holds_alternative<AliasTy>(t->node);
}

void print_type_to(std::ostream& os, const TypePtr& t);

void print_type_arg(std::ostream& os, const TypePtr& t) {
  if (self_delimiting(t)) {
    print_type_to(os, t);
  } else {
    os << '(';
    print_type_to(os, t);
    os << ')';
  }
}

void print_type_to(std::ostream& os, const TypePtr& t) {
  struct Visit {
    std::ostream& os;
    void operator()(const PrimTy& x) const {
      switch (x.prim) {
        case Prim::Nat: os << "nat"; return;
        case Prim::Int: os << "int"; return;
        case Prim::String: os << "string"; return;
        case Prim::Mutez: os << "mutez"; return;
        case Prim::Bool: os << "bool"; return;
        case Prim::Operation: os << "operation"; return;
      }
    }
    void operator()(const RecordTy& x) const {
      if (x.fields.empty()) {
        os << "{}";
        return;
      }
      os << "{ ";
      for (std::size_t i = 0; i < x.fields.size(); ++i) {
        if (i) os << "; ";
        os << x.fields[i].first << " : ";
        print_type_to(os, x.fields[i].second);
      }
      os << " }";
    }
    void operator()(const VariantTy& x) const {
      os << "[ ";
      for (std::size_t i = 0; i < x.ctors.size(); ++i) {
        if (i) os << " | ";
        os << x.ctors[i].first << " : ";
        print_type_to(os, x.ctors[i].second);
      }
      os << " ]";
    }
    void operator()(const ListTy& x) const {
      os << "list ";
      print_type_arg(os, x.elem);
    }
    void operator()(const OptionTy& x) const {
      os << "option ";
      print_type_arg(os, x.elem);
    }
    void operator()(const MapTy& x) const {
      os << "map ";
      print_type_arg(os, x.key);
      os << ' ';
      print_type_arg(os, x.val);
    }
    void operator()(const AliasTy& x) const { os << x.name; }
  };
  std::visit(Visit{os}, t->node);
}

void escape_string(std::ostream& os, const std::string& s) {
  os << '"';
  for (char c : s) {
    if (c == '"' || c == '\\') os << '\\';
    os << c;
  }
  os << '"';
}

// `typed` means the surrounding context already determines this value's type,
// so ascriptions can be dropped.
void print_value_to(std::ostream& os, const ValuePtr& v, bool typed);

void print_ascribed(std::ostream& os, const ValuePtr& v, const TypePtr& t,
                    const char* what) {
  if (!t) internal_error(std::string("cannot print an untyped ") + what + " literal");
  os << '(';
  print_value_to(os, v, /*typed=*/true);
  os << " : ";
  print_type_to(os, t);
  os << ')';
}

void print_value_to(std::ostream& os, const ValuePtr& v, bool typed) {
  struct Visit {
    std::ostream& os;
    bool typed;
    const ValuePtr& v;
    void operator()(const NatVal& x) const { os << x.v; }
    void operator()(const IntVal& x) const {
      if (x.v < 0 || typed) {
        os << x.v;
      } else {
        os << '(' << x.v << " : int)";
      }
    }
    void operator()(const MutezVal& x) const {
      if (typed) {
        os << x.v;
      } else {
        os << '(' << x.v << " : mutez)";
      }
    }
    void operator()(const StringVal& x) const { escape_string(os, x.v); }
    void operator()(const BoolVal& x) const { os << (x.v ? "True" : "False"); }
    void operator()(const RecordVal& x) const {
      if (x.fields.empty()) {
        os << "{}";
        return;
      }
      os << "{ ";
      for (std::size_t i = 0; i < x.fields.size(); ++i) {
        if (i) os << "; ";
        os << x.fields[i].first << " = ";
        print_value_to(os, x.fields[i].second, typed);
      }
      os << " }";
    }
    void operator()(const VariantVal& x) const {
      // Always self-contained: bare constructor applications have no parse.
      if (!x.type) internal_error("variant value without its type");
      os << '(' << x.ctor << ' ';
      print_value_to(os, x.payload, /*typed=*/true);
      os << " : ";
      print_type_to(os, x.type);
      os << ')';
    }
    void operator()(const SomeVal& x) const {
      if (typed) {
        os << "Some ";
        print_value_to(os, x.payload, true);
      } else {
        // Bare `Some v` only parses in right-hand-side position, not as an
        // argument, so standalone occurrences carry their ascription.
        print_ascribed(os, v, type_of_value(v), "Some");
      }
    }
    void operator()(const NoneVal& x) const {
      if (typed) {
        os << "None";
      } else {
        print_ascribed(os, v, type_of_value(v), "None");
      }
    }
    void operator()(const ListVal& x) const {
      if (!typed) {
        print_ascribed(os, v, type_of_value(v), "list");
        return;
      }
      os << '[';
      for (std::size_t i = 0; i < x.elems.size(); ++i) {
        if (i) os << "; ";
        print_value_to(os, x.elems[i], true);
      }
      os << ']';
    }
    void operator()(const MapVal& x) const {
      if (!typed) {
        print_ascribed(os, v, type_of_value(v), "map");
        return;
      }
      if (x.entries.empty()) {
        os << "{}";
        return;
      }
      os << "{ ";
      for (std::size_t i = 0; i < x.entries.size(); ++i) {
        if (i) os << "; ";
        print_value_to(os, x.entries[i].first, true);
        os << " -> ";
        print_value_to(os, x.entries[i].second, true);
      }
      os << " }";
    }
    void operator()(const OperationVal& x) const {
      // Diagnostic only; operations have no source literal.
      os << "<operation " << x.tag << '>';
    }
  };
  std::visit(Visit{os, typed, v}, v->node);
}

void print_arg_to(std::ostream& os, const ArgPtr& a) {
  struct Visit {
    std::ostream& os;
    void operator()(const VarArg& x) const { os << x.name; }
    void operator()(const ValArg& x) const { print_value_to(os, x.value, false); }
    void operator()(const RecordArg& x) const {
      if (x.fields.empty()) {
        os << "{}";
        return;
      }
      os << "{ ";
      for (std::size_t i = 0; i < x.fields.size(); ++i) {
        if (i) os << "; ";
        os << x.fields[i].first << " = " << x.fields[i].second;
      }
      os << " }";
    }
  };
  std::visit(Visit{os}, a->node);
}

void print_rhs_to(std::ostream& os, const RhsPtr& r) {
  struct Visit {
    std::ostream& os;
    void operator()(const ArgRhs& x) const { print_arg_to(os, x.arg); }
    void operator()(const ApplyRhs& x) const {
      if (x.fn == "amount") {
        os << "amount";  // its unit argument is implicit in the syntax
        return;
      }
      os << x.fn << ' ';
      print_arg_to(os, x.arg);
    }
    void operator()(const ProjRhs& x) const { os << x.var << '.' << x.field; }
    void operator()(const UpdateRhs& x) const {
      os << "{ " << x.var << " with ";
      for (std::size_t i = 0; i < x.fields.size(); ++i) {
        if (i) os << "; ";
        os << x.fields[i].first << " = " << x.fields[i].second;
      }
      os << " }";
    }
    void operator()(const MapUpdateRhs& x) const {
      os << "update " << x.map << ' ';
      print_arg_to(os, x.key);
      os << ' ';
      print_arg_to(os, x.val);
    }
    void operator()(const BinOpRhs& x) const {
      switch (x.op) {
        case BinOpKind::Add: os << x.left << " + " << x.right; return;
        case BinOpKind::Ge: os << x.left << " >= " << x.right; return;
        case BinOpKind::MapGet: os << x.left << '[' << x.right << ']'; return;
      }
    }
    void operator()(const ConstructRhs& x) const {
      if (!x.annot) {
        os << x.ctor << ' ';
        print_arg_to(os, x.arg);
        return;
      }
      os << '(' << x.ctor << ' ';
      print_arg_to(os, x.arg);
      os << " : ";
      print_type_to(os, x.annot);
      os << ')';
    }
    void operator()(const MatchRhs& x) const {
      os << "match " << x.scrutinee << " with";
      for (std::size_t i = 0; i < x.branches.size(); ++i) {
        os << (i ? " | " : " ") << x.branches[i].ctor << ' ' << x.branches[i].binder
           << " -> ";
        print_rhs_to(os, x.branches[i].body);
      }
      os << " end";
    }
  };
  std::visit(Visit{os}, r->node);
}

void print_instr_block(std::ostream& os, const InstrPtr& i, int indent);

void indent_to(std::ostream& os, int indent) {
  for (int k = 0; k < indent; ++k) os << ' ';
}

// Writes one instruction; sequences flatten into `;`-terminated lines.
void print_instr_lines(std::ostream& os, const InstrPtr& i, int indent, bool last) {
  if (auto* seq = std::get_if<SeqInstr>(&i->node)) {
    print_instr_lines(os, seq->first, indent, false);
    print_instr_lines(os, seq->second, indent, last);
    return;
  }
  indent_to(os, indent);
  if (auto* m = std::get_if<MatchInstr>(&i->node)) {
    os << "match " << m->scrutinee << " with\n";
    for (std::size_t b = 0; b < m->branches.size(); ++b) {
      indent_to(os, indent + 2);
      os << "| " << m->branches[b].ctor << ' ' << m->branches[b].binder << " ->\n";
      print_instr_block(os, m->branches[b].body, indent + 4);
      os << '\n';
    }
    indent_to(os, indent);
    os << "end";
  } else if (std::holds_alternative<NoopInstr>(i->node)) {
    os << "noop";
  } else if (auto* d = std::get_if<DropInstr>(&i->node)) {
    os << "drop " << d->var;
  } else if (auto* a = std::get_if<AssignInstr>(&i->node)) {
    if (auto* x = std::get_if<VarLhs>(&a->lhs.node)) {
      os << x->name;
    } else {
      const auto& pat = std::get<RecordLhs>(a->lhs.node);
      if (pat.fields.empty()) {
        os << "{}";
      } else {
        os << "{ ";
        for (std::size_t k = 0; k < pat.fields.size(); ++k) {
          if (k) os << "; ";
          os << pat.fields[k].first << " = " << pat.fields[k].second;
        }
        os << " }";
      }
    }
    os << " = ";
    print_rhs_to(os, a->rhs);
  } else {
    print_rhs_to(os, std::get<ExecInstr>(i->node).rhs);
  }
  if (!last) os << ";\n";
}

void print_instr_block(std::ostream& os, const InstrPtr& i, int indent) {
  print_instr_lines(os, i, indent, /*last=*/true);
}

}  // namespace

std::string print_type(const TypePtr& t) {
  std::ostringstream os;
  print_type_to(os, t);
  return os.str();
}

std::string print_value(const ValuePtr& v) {
  std::ostringstream os;
  print_value_to(os, v, /*typed=*/false);
  return os.str();
}

std::string print_rhs(const RhsPtr& r) {
  std::ostringstream os;
  print_rhs_to(os, r);
  return os.str();
}

std::string print_instruction_inline(const InstrPtr& i) {
  struct Visit {
    std::ostringstream os;
    void run(const InstrPtr& i) {
      if (auto* seq = std::get_if<SeqInstr>(&i->node)) {
        run(seq->first);
        os << "; ";
        run(seq->second);
      } else if (auto* m = std::get_if<MatchInstr>(&i->node)) {
        os << "match " << m->scrutinee << " with ";
        for (std::size_t b = 0; b < m->branches.size(); ++b) {
          if (b) os << " | ";
          os << m->branches[b].ctor << ' ' << m->branches[b].binder << " -> ";
          run(m->branches[b].body);
        }
        os << " end";
      } else {
        std::ostringstream line;
        print_instr_lines(line, i, 0, true);
        os << line.str();
      }
    }
  } v;
  v.run(i);
  return v.os.str();
}

std::string print_program(const Program& p) {
  std::ostringstream os;
  bool first = true;
  for (const auto& a : p.aliases) {
    if (!first) os << '\n';
    first = false;
    os << "type " << a.name << " = ";
    print_type_to(os, a.type);
    os << '\n';
  }
  for (const auto& f : p.functions) {
    if (!first) os << '\n';
    first = false;
    os << "def " << f.name << " : ";
    print_type_to(os, f.input);
    os << " -> ";
    print_type_to(os, f.output);
    os << " =\n";
    print_instr_block(os, f.body, 2);
    os << '\n';
  }
  return os.str();
}

}  // namespace albert
