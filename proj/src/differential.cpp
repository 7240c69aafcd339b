#include "albert/differential.hpp"

#include <algorithm>
#include <exception>
#include <ostream>
#include <utility>

#include <json.hpp>

#include "albert/compiler.hpp"
#include "albert/eval.hpp"
#include "albert/generator.hpp"
#include "albert/michelson.hpp"
#include "albert/printer.hpp"
#include "albert/typer.hpp"
#include "albert/types.hpp"

namespace albert {

namespace {

// Derives an independent stream from (seed, lane); splitmix64 finalizer.
std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// The compare itself, no shrinking. Everything that can go wrong lands in the
// verdict strings so a disagreement report is self-describing.
FuzzVerdict check_once(const Program& p, const ValuePtr& input,
                       std::int64_t amount) {
  FuzzVerdict v;
  v.source = print_program(p);
  v.input_text = print_value(input);
  v.amount = amount;

  TypedProgram tp;
  try {
    tp = typecheck_program(p);
  } catch (const TypeError& e) {
    v.program_typechecked = false;
    v.albert_result = std::string("type error: ") + e.what();
    v.michelson_result = v.albert_result;
    return v;
  }
  if (tp.functions.empty()) {
    v.program_typechecked = false;
    v.albert_result = "type error: program has no functions";
    v.michelson_result = v.albert_result;
    return v;
  }
  const TypedFunction& entry = tp.functions.back();

  try {
    EvalContext ec;
    ec.amount = amount;
    EvalResult er = eval_function(tp, entry.name, input, ec);
    v.albert_result = er.failed() ? "failure: " + print_value(er.failure)
                                  : "value: " + print_value(er.value);
  } catch (const std::exception& e) {
    v.albert_result = std::string("interpreter error: ") + e.what();
  }

  try {
    MichScript script = compile_contract(tp, entry.name);
    try {
      mtc_typecheck_script(script);
    } catch (const MichTypeError& e) {
      v.michelson_typechecked = false;
      v.michelson_result = std::string("type error: ") + e.what();
      return v;
    }

    const auto* rec = std::get_if<RecordVal>(&input->node);
    const auto* rt = std::get_if<RecordTy>(&entry.input_type->node);
    ValuePtr pv, sv;
    TypePtr pt, st;
    if (rec && rt) {
      for (const auto& [f, x] : rec->fields) {
        if (f == "param") pv = x;
        if (f == "store") sv = x;
      }
      for (const auto& [f, t] : rt->fields) {
        if (f == "param") pt = t;
        if (f == "store") st = t;
      }
    }
    if (!pv || !sv || !pt || !st) {
      v.michelson_result = "input error: expected a { param = ...; store = ... } record";
      return v;
    }

    MichContractResult mr = run_contract(script, compile_value(pv, pt),
                                         compile_value(sv, st), amount);
    if (mr.failed()) {
      // Every failure this compiler emits carries a string payload.
      std::string payload = mr.failure->k == MV::String
                                ? print_value(v_string(mr.failure->str))
                                : print_mich_value(mr.failure);
      v.michelson_result = "failure: " + payload;
    } else {
      v.michelson_result =
          "value: " + print_value(decode_value(mr.output, entry.output_type));
    }
  } catch (const std::exception& e) {
    v.michelson_result = std::string("compile error: ") + e.what();
  }

  v.agree = v.albert_result == v.michelson_result;
  return v;
}

void flatten_spine(const InstrPtr& i, std::vector<InstrPtr>& out) {
  if (!i) return;
  if (const auto* s = std::get_if<SeqInstr>(&i->node)) {
    flatten_spine(s->first, out);
    flatten_spine(s->second, out);
  } else if (!std::holds_alternative<NoopInstr>(i->node)) {
    out.push_back(i);
  }
}

InstrPtr rebuild_body(const std::vector<InstrPtr>& instrs) {
  if (instrs.empty()) return i_noop();
  InstrPtr acc = instrs.back();
  for (std::size_t i = instrs.size() - 1; i-- > 0;) acc = i_seq(instrs[i], acc);
  return acc;
}

bool still_typechecks(const Program& p) {
  try {
    typecheck_program(p);
    return true;
  } catch (const TypeError&) {
    return false;
  }
}

}  // namespace

FuzzVerdict differential_check(const Program& p, const ValuePtr& input,
                               std::int64_t amount) {
  FuzzVerdict v = check_once(p, input, amount);
  if (v.agree || !v.program_typechecked) return v;

  // Greedy shrink: drop whole helper functions, then single entry-body
  // instructions, keeping a deletion only when the smaller program still
  // typechecks and still disagrees. Capped so a pathological case cannot
  // stall the harness.
  Program cur = p;
  std::size_t attempts = 0;
  const std::size_t kMaxAttempts = 400;
  bool improved = true;
  while (improved && attempts < kMaxAttempts) {
    improved = false;

    for (std::size_t f = 0; f + 1 < cur.functions.size(); ++f) {
      Program cand = cur;
      cand.functions.erase(cand.functions.begin() +
                           static_cast<std::ptrdiff_t>(f));
      ++attempts;
      if (!still_typechecks(cand)) continue;
      if (!check_once(cand, input, amount).agree) {
        cur = std::move(cand);
        v.shrink_trace.push_back(print_program(cur));
        improved = true;
        break;
      }
    }
    if (improved) continue;

    std::vector<InstrPtr> spine;
    flatten_spine(cur.functions.back().body, spine);
    for (std::size_t i = 0; i < spine.size() && attempts < kMaxAttempts; ++i) {
      std::vector<InstrPtr> rest;
      rest.reserve(spine.size() - 1);
      for (std::size_t j = 0; j < spine.size(); ++j)
        if (j != i) rest.push_back(spine[j]);
      Program cand = cur;
      cand.functions.back().body = rebuild_body(rest);
      ++attempts;
      if (!still_typechecks(cand)) continue;
      if (!check_once(cand, input, amount).agree) {
        cur = std::move(cand);
        v.shrink_trace.push_back(print_program(cur));
        improved = true;
        break;
      }
    }
  }
  return v;
}

FuzzStats run_fuzz(const FuzzOptions& opts) {
  FuzzStats st;
  GenConfig gc;
  // The contract convention needs an entry with real inputs and outputs; tiny
  // budgets produce the degenerate {} -> {} program, which has no entry point
  // to run, so the harness floors the budget.
  gc.budget = std::max<std::size_t>(opts.budget, 4);

  for (std::size_t i = 0; i < opts.cases; ++i) {
    const std::uint64_t case_seed = mix(opts.seed, i);
    Program prog = generate_program(case_seed, gc);
    for (const auto& [k, n] : rhs_coverage(prog)) st.coverage[k] += n;
    ++st.cases;

    const TypePtr in_ty = prog.functions.back().input;
    bool prog_ok = true;
    bool mich_ok = true;
    bool all_agree = true;
    nlohmann::ordered_json runs = nlohmann::ordered_json::array();

    for (std::size_t j = 0; j < opts.inputs_per_program; ++j) {
      ValuePtr input = generate_input(mix(case_seed, 1000 + j), in_ty);
      auto amount = static_cast<std::int64_t>(mix(case_seed, 2000 + j) % 2001);
      FuzzVerdict v = differential_check(prog, input, amount);
      ++st.runs;
      prog_ok = prog_ok && v.program_typechecked;
      mich_ok = mich_ok && v.michelson_typechecked;
      if (!v.agree) {
        ++st.disagreements;
        all_agree = false;
        if (st.failures.size() < 8) st.failures.push_back(v);
      }
      if (opts.report) {
        runs.push_back({{"input", v.input_text},
                        {"amount", v.amount},
                        {"albert", v.albert_result},
                        {"michelson", v.michelson_result},
                        {"agree", v.agree}});
      }
      // An ill-typed program fails identically for every input; move on.
      if (!v.program_typechecked) break;
    }

    if (!prog_ok) {
      ++st.generator_type_errors;
    } else if (!mich_ok) {
      ++st.michelson_type_errors;
    }

    if (opts.report) {
      nlohmann::ordered_json row{{"seed", opts.seed},
                                 {"case", i},
                                 {"program_seed", case_seed},
                                 {"typechecked", prog_ok},
                                 {"michelson_typechecked", mich_ok},
                                 {"agree", all_agree},
                                 {"runs", runs}};
      *opts.report << row.dump() << "\n";
    }
  }
  return st;
}

}  // namespace albert
