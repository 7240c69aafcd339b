#include "albert/cli.hpp"

#include <cstdint>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "albert/ast.hpp"
#include "albert/compiler.hpp"
#include "albert/differential.hpp"
#include "albert/eval.hpp"
#include "albert/michelson.hpp"
#include "albert/parser.hpp"
#include "albert/printer.hpp"
#include "albert/typer.hpp"
#include "albert/types.hpp"

namespace albert {

namespace {

constexpr int kOk = 0;
constexpr int kUserError = 1;
constexpr int kContractFailure = 2;
constexpr int kInternalError = 3;

// A diagnostic the user caused; printed to the error stream with exit code 1.
struct UserError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string locate(const std::string& file, int line, int col) {
  std::string s = file;
  if (line > 0) s += ":" + std::to_string(line) + ":" + std::to_string(col);
  return s;
}

Program parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UserError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_program(ss.str());
  } catch (const ParseError& e) {
    throw UserError(locate(path, e.line, e.col) + ": " + e.what());
  }
}

TypedProgram typecheck_file(const Program& p, const std::string& path) {
  try {
    return typecheck_program(p);
  } catch (const TypeError& e) {
    throw UserError(locate(path, e.pos.line, e.pos.col) + ": " + e.what());
  }
}

Label resolve_entry(const TypedProgram& tp, const std::string& flag) {
  if (!flag.empty()) {
    if (!tp.find(flag)) throw UserError("unknown function: " + flag);
    return flag;
  }
  if (tp.functions.empty()) throw UserError("program defines no functions");
  return tp.functions.back().name;
}

// Parses --input and fits it to the function's input type; an absent flag is
// accepted only for a {} input.
ValuePtr make_input(const std::string& text, const TypePtr& want,
                    const Label& entry) {
  if (text.empty()) {
    if (const auto* r = std::get_if<RecordTy>(&want->node); r && r->fields.empty())
      return v_record({});
    throw UserError("--input is required: " + entry + " takes " + print_type(want));
  }
  ValuePtr raw;
  try {
    raw = parse_value_text(text);
  } catch (const ParseError& e) {
    throw UserError("--input at " + std::to_string(e.line) + ":" +
                    std::to_string(e.col) + ": " + e.what());
  }
  try {
    return retype_value(raw, want);
  } catch (const std::exception& e) {
    throw UserError(std::string("--input: ") + e.what());
  }
}

std::string default_tz_path(const std::string& in_path) {
  const std::string ext = ".alb";
  if (in_path.size() > ext.size() &&
      in_path.compare(in_path.size() - ext.size(), ext.size(), ext) == 0)
    return in_path.substr(0, in_path.size() - ext.size()) + ".tz";
  return in_path + ".tz";
}

MichScript compile_entry(const TypedProgram& tp, const Label& entry,
                         const std::string& path) {
  try {
    return compile_contract(tp, entry);
  } catch (const TypeError& e) {
    throw UserError(path + ": " + e.what());
  }
}

void split_contract_input(const ValuePtr& in, const TypePtr& in_ty,
                          ValuePtr& pv, TypePtr& pt, ValuePtr& sv, TypePtr& st) {
  const auto* rec = std::get_if<RecordVal>(&in->node);
  const auto* rt = std::get_if<RecordTy>(&in_ty->node);
  if (!rec || !rt) internal_error("contract input is not a record");
  for (const auto& [f, x] : rec->fields) {
    if (f == "param") pv = x;
    if (f == "store") sv = x;
  }
  for (const auto& [f, t] : rt->fields) {
    if (f == "param") pt = t;
    if (f == "store") st = t;
  }
  if (!pv || !sv || !pt || !st)
    internal_error("contract input lacks param/store after convention check");
}

int cmd_typecheck(const std::string& path, bool dump, std::ostream& out) {
  TypedProgram tp = typecheck_file(parse_file(path), path);
  if (dump) out << dump_typed(tp);
  return kOk;
}

int cmd_compile(const std::string& path, const std::string& out_path,
                const std::string& entry, std::ostream& out) {
  TypedProgram tp = typecheck_file(parse_file(path), path);
  MichScript s = compile_entry(tp, resolve_entry(tp, entry), path);
  mtc_typecheck_script(s);  // a failure here is a compiler bug, not a user error
  std::string text = print_michelson(s);
  if (out_path == "-") {
    out << text;
    return kOk;
  }
  std::string target = out_path.empty() ? default_tz_path(path) : out_path;
  std::ofstream f(target, std::ios::binary);
  if (!f) throw UserError("cannot write " + target);
  f << text;
  return kOk;
}

int cmd_run(const std::string& path, const std::string& entry_flag,
            std::int64_t amount, const std::string& input_text,
            std::ostream& out) {
  TypedProgram tp = typecheck_file(parse_file(path), path);
  Label entry = resolve_entry(tp, entry_flag);
  const TypedFunction* fn = tp.find(entry);
  ValuePtr in = make_input(input_text, fn->input_type, entry);
  EvalContext ec;
  ec.amount = amount;
  EvalResult r = eval_function(tp, entry, in, ec);
  if (r.failed()) {
    out << "failure: " << print_value(r.failure) << "\n";
    return kContractFailure;
  }
  out << print_value(r.value) << "\n";
  return kOk;
}

int cmd_simulate(const std::string& path, const std::string& entry_flag,
                 std::int64_t amount, const std::string& input_text,
                 std::ostream& out) {
  TypedProgram tp = typecheck_file(parse_file(path), path);
  Label entry = resolve_entry(tp, entry_flag);
  MichScript s = compile_entry(tp, entry, path);
  mtc_typecheck_script(s);
  const TypedFunction* fn = tp.find(entry);
  ValuePtr in = make_input(input_text, fn->input_type, entry);
  ValuePtr pv, sv;
  TypePtr pt, st;
  split_contract_input(in, fn->input_type, pv, pt, sv, st);
  MichContractResult r = run_contract(s, compile_value(pv, pt),
                                      compile_value(sv, st), amount);
  if (r.failed()) {
    std::string payload = r.failure->k == MV::String
                              ? print_value(v_string(r.failure->str))
                              : print_mich_value(r.failure);
    out << "failure: " << payload << "\n";
    return kContractFailure;
  }
  out << print_value(decode_value(r.output, fn->output_type)) << "\n";
  return kOk;
}

int cmd_fuzz(const FuzzOptions& base, const std::string& report_path,
             std::ostream& out) {
  FuzzOptions fo = base;
  std::ofstream report;
  if (!report_path.empty()) {
    report.open(report_path, std::ios::binary);
    if (!report) throw UserError("cannot write " + report_path);
    fo.report = &report;
  }
  FuzzStats st = run_fuzz(fo);
  out << "cases: " << st.cases << "\n"
      << "runs: " << st.runs << "\n"
      << "disagreements: " << st.disagreements << "\n"
      << "generator type errors: " << st.generator_type_errors << "\n"
      << "michelson type errors: " << st.michelson_type_errors << "\n"
      << "coverage:\n";
  for (const auto& [k, n] : st.coverage) out << "  " << k << ": " << n << "\n";
  for (const auto& f : st.failures) {
    out << "\ndisagreement:\n"
        << "amount: " << f.amount << "\n"
        << "input: " << f.input_text << "\n"
        << "albert:    " << f.albert_result << "\n"
        << "michelson: " << f.michelson_result << "\n"
        << "program:\n"
        << (f.shrink_trace.empty() ? f.source : f.shrink_trace.back());
  }
  const bool broken =
      st.disagreements || st.generator_type_errors || st.michelson_type_errors;
  return broken ? kInternalError : kOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Albert: a typed intermediate language compiled to Michelson"};
  app.name("albertc");
  app.require_subcommand(1);

  std::string file, out_path, entry, input_text, report_path;
  std::int64_t amount = 0;
  bool dump = false;
  FuzzOptions fuzz_opts;

  auto* tc = app.add_subcommand("typecheck", "Parse and typecheck a program");
  tc->add_option("file", file, ".alb source")->required();
  tc->add_flag("--dump-typed", dump,
               "print every instruction with its input/output environment");

  auto* co = app.add_subcommand(
      "compile", "Compile the entry point to a Michelson script");
  co->add_option("file", file, ".alb source")->required();
  co->add_option("-o,--output", out_path,
                 "output path, '-' for stdout (default: source with .tz)");
  co->add_option("--entry", entry, "entry function (default: last defined)");

  auto* ru = app.add_subcommand(
      "run", "Evaluate a function with the reference interpreter");
  ru->add_option("file", file, ".alb source")->required();
  ru->add_option("--entry", entry, "function to call (default: last defined)");
  ru->add_option("--amount", amount, "mutez sent with the call");
  ru->add_option("--input", input_text, "argument record, Albert literal syntax");

  auto* si = app.add_subcommand(
      "simulate", "Compile, then execute on the Michelson interpreter");
  si->add_option("file", file, ".alb source")->required();
  si->add_option("--entry", entry, "entry function (default: last defined)");
  si->add_option("--amount", amount, "mutez sent with the call");
  si->add_option("--input", input_text, "argument record, Albert literal syntax");

  auto* fz = app.add_subcommand(
      "fuzz", "Differentially test generated programs against the compiler");
  fz->add_option("--seed", fuzz_opts.seed, "master seed");
  fz->add_option("--cases", fuzz_opts.cases, "number of generated programs");
  fz->add_option("--budget", fuzz_opts.budget, "size budget per program");
  fz->add_option("--inputs", fuzz_opts.inputs_per_program, "inputs per program");
  fz->add_option("--report", report_path, "write a JSON-lines report here");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("albertc");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUserError;
  }

  try {
    if (tc->parsed()) return cmd_typecheck(file, dump, out);
    if (co->parsed()) return cmd_compile(file, out_path, entry, out);
    if (ru->parsed()) return cmd_run(file, entry, amount, input_text, out);
    if (si->parsed()) return cmd_simulate(file, entry, amount, input_text, out);
    if (fz->parsed()) return cmd_fuzz(fuzz_opts, report_path, out);
    err << "albertc: no command\n";
    return kUserError;
  } catch (const UserError& e) {
    err << "albertc: " << e.what() << "\n";
    return kUserError;
  } catch (const std::exception& e) {
    err << "albertc: internal error: " << e.what() << "\n";
    return kInternalError;
  }
}

}  // namespace albert
