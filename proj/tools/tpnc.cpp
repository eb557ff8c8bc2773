#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tpn/tpn.hpp"

namespace {

using namespace tpn;

constexpr int kOk = 0;
constexpr int kPropertyFailed = 1;
constexpr int kInputError = 2;

struct Options {
  std::string input;
  std::string output;
  std::string model;
  GraphKind graph = GraphKind::cscg;
  Reduction reduce = Reduction::none;
  std::string format = "dot";
  std::size_t horizon = 4;
  std::string grid = "1/2";
  std::size_t budget = 100000;
  unsigned jobs = 1;
  ErrBound err_bound = ErrBound::upper;
  std::size_t depth = 3;
};

AnyNet load(const Options& o) {
  std::ifstream in(o.input);
  if (!in) throw std::invalid_argument("cannot open '" + o.input + "'");
  AnyNet net = parse_net(in);
  if (!o.model.empty()) {
    const bool is_p = std::holds_alternative<PNet>(net);
    if ((o.model == "ptpn") != is_p)
      throw std::invalid_argument("--model " + o.model + " does not match the net header (" +
                                  (is_p ? "ptpn" : "atpn") + ")");
  }
  return net;
}

/// Writes to the output path, or standard output when none was given.
void emit(const Options& o, const std::string& text) {
  if (o.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(o.output);
  if (!out) throw std::invalid_argument("cannot write '" + o.output + "'");
  out << text;
}

int run_explore(const Options& o) {
  ExploreConfig cfg;
  cfg.graph = o.graph;
  cfg.reduce = o.reduce;
  cfg.budget = o.budget;
  cfg.jobs = o.jobs;
  return std::visit(
      [&](const auto& net) {
        const auto g = explore(net, cfg);
        if (o.format == "json") emit(o, stats_json(g.stats).dump() + "\n");
        else if (o.format == "text") emit(o, to_text(net, g));
        else emit(o, to_dot(net, g));
        if (g.stats.truncated) std::cerr << "warning: node budget exhausted, graph is partial\n";
        return kOk;
      },
      load(o));
}

RunConfig run_config(const Options& o) {
  RunConfig r;
  r.horizon = o.horizon;
  r.grid = Rational::parse(o.grid);
  r.budget = o.budget * 10;
  r.err_bound = o.err_bound;
  if (r.grid <= 0) throw std::invalid_argument("grid must be positive");
  return r;
}

int run_simulate(const Options& o) {
  const RunConfig r = run_config(o);
  return std::visit(
      [&](const auto& net) {
        std::string text;
        for (const auto& run : enumerate_runs(net, r)) text += run_str(net, run) + "\n";
        emit(o, text);
        return kOk;
      },
      load(o));
}

int run_check(const Options& o) {
  const RunConfig r = run_config(o);
  AgglCheckConfig ac;
  ac.depth = o.depth;
  std::vector<SuiteResult> results = std::visit(
      [&](const auto& net) {
        return std::vector<SuiteResult>{check_agglomeration(net, ac), check_redundancy(net, ac),
                                        check_containment(net, r), check_step_equivalence(net, r.horizon)};
      },
      load(o));
  bool ok = true;
  std::ostringstream out;
  for (const auto& s : results) {
    ok = ok && s.passed();
    out << (s.passed() ? "PASS " : "FAIL ") << s.name << " (" << s.checked << " checked";
    if (s.skipped) out << ", " << s.skipped << " skipped";
    out << ")\n";
    for (const auto& f : s.failures) out << "  " << f << "\n";
  }
  emit(o, out.str());
  return ok ? kOk : kPropertyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reachability analysis of P-TPNs and A-TPNs with state class graphs"};
  app.require_subcommand(1);
  Options o;

  const std::map<std::string, GraphKind> graphs{{"scg", GraphKind::scg}, {"cscg", GraphKind::cscg}};
  const std::map<std::string, Reduction> reductions{{"none", Reduction::none},
                                                    {"inclusion", Reduction::inclusion},
                                                    {"convex-union", Reduction::convex_union},
                                                    {"step-aggl", Reduction::step_aggl}};
  const std::map<std::string, ErrBound> bounds{{"upper", ErrBound::upper}, {"lower", ErrBound::lower}};

  auto common = [&](CLI::App* sub) {
    sub->add_option("net", o.input, "Net description file")->required();
    sub->add_option("-o,--output", o.output, "Output file (default: standard output)");
    sub->add_option("--model", o.model, "Expected net kind; must match the header")
        ->check(CLI::IsMember({"ptpn", "atpn"}));
    sub->add_option("--budget", o.budget, "Node budget")->capture_default_str();
    sub->add_option("--err-bound", o.err_bound, "Bound that kills an A-TPN arc when Err fires")
        ->transform(CLI::CheckedTransformer(bounds, CLI::ignore_case));
  };

  auto* ex = app.add_subcommand("explore", "Build a state class graph");
  common(ex);
  ex->add_option("--graph", o.graph, "scg or cscg")->transform(CLI::CheckedTransformer(graphs, CLI::ignore_case));
  ex->add_option("--reduce", o.reduce, "none, inclusion, convex-union or step-aggl")
      ->transform(CLI::CheckedTransformer(reductions, CLI::ignore_case));
  ex->add_option("--format", o.format, "dot, json or text")->check(CLI::IsMember({"dot", "json", "text"}));
  ex->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::Range(1u, 256u));

  auto* sim = app.add_subcommand("simulate", "Enumerate timed runs of bounded length");
  common(sim);
  sim->add_option("--horizon", o.horizon, "Maximal run length")->capture_default_str();
  sim->add_option("--grid", o.grid, "Delay grid a/b")->capture_default_str();

  auto* chk = app.add_subcommand("check", "Run the cross-validation suites");
  common(chk);
  chk->add_option("--horizon", o.horizon, "Run length and language depth")->capture_default_str();
  chk->add_option("--grid", o.grid, "Delay grid a/b")->capture_default_str();
  chk->add_option("--depth", o.depth, "Class depth for agglomeration checks")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*ex) return run_explore(o);
    if (*sim) return run_simulate(o);
    return run_check(o);
  } catch (const ParseError& e) {
    std::cerr << o.input << ": " << e.what() << "\n";
  } catch (const SafetyViolation& e) {
    std::cerr << "net is not safe: " << e.what() << "\n";
  } catch (const BudgetExhausted& e) {
    std::cerr << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kInputError;
}
