#include "conemin/cli.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <optional>
#include <ostream>

#include "conemin/bruteforce.hpp"
#include "conemin/instance_io.hpp"
#include "conemin/solver.hpp"

namespace conemin {

namespace {

using json = nlohmann::ordered_json;

json point_json(const QVector& p) {
  json a = json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) a.push_back(to_string(p(i)));
  return a;
}

json values_json(const std::vector<SqrtVal>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(to_string(v));
  return a;
}

void emit(std::ostream& out, const json& j) { out << j.dump() << "\n"; }

void write_trace(const std::string& path, const SolveTrace& tr) {
  std::ofstream f(path);
  if (!f) throw std::invalid_argument("cannot write trace file: " + path);
  f << tr.to_json() << "\n";
}

struct SolveFlags {
  std::string strategy = "flat";
  std::string trace_path;
  int parallel = 1;
  long seed = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--strategy", strategy, "covering strategy")
        ->check(CLI::IsMember({"flat", "boxes"}));
    cmd->add_option("--trace", trace_path, "write a JSON solve trace to this file");
    cmd->add_option("--parallel", parallel, "max concurrent facet descents")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed, "reserved for test-instance generation");
  }

  SolverOptions options(SolveTrace* tr) const {
    SolverOptions opts;
    opts.strategy = strategy == "boxes" ? CoverStrategy::Boxes : CoverStrategy::Flat;
    opts.parallel = parallel;
    opts.trace = tr;
    return opts;
  }
};

int cmd_feasible(const std::string& file, const SolveFlags& flags, std::ostream& out) {
  Instance inst = parse_instance(file);
  SolveTrace tr;
  SolverOptions opts = flags.options(flags.trace_path.empty() ? nullptr : &tr);
  SolveOutcome res = solve_feasibility(inst, opts);
  if (!flags.trace_path.empty()) write_trace(flags.trace_path, tr);
  json j;
  if (res.feasible()) {
    j["status"] = "feasible";
    j["point"] = point_json(*res.point);
    j["values"] = values_json(res.values);
  } else {
    j["status"] = "infeasible";
  }
  emit(out, j);
  return res.feasible() ? 0 : 1;
}

int cmd_minimize(const std::string& file, const SolveFlags& flags, std::ostream& out) {
  Instance inst = parse_instance(file);
  SolveTrace tr;
  SolverOptions opts = flags.options(flags.trace_path.empty() ? nullptr : &tr);
  MinimizeOutcome res = minimize(inst, opts);
  if (!flags.trace_path.empty()) write_trace(flags.trace_path, tr);
  json j;
  if (res.feasible()) {
    j["status"] = "feasible";
    j["point"] = point_json(*res.point);
    j["values"] = values_json(res.values);
    j["value"] = to_string(res.value);
  } else {
    j["status"] = "infeasible";
  }
  emit(out, j);
  return res.feasible() ? 0 : 1;
}

int cmd_brute(const std::string& file, const std::string& threshold, std::ostream& out) {
  Instance inst = parse_instance(file);
  Rational tau;
  try {
    tau = parse_rational(threshold);
  } catch (const std::exception& e) {
    throw ParseError("--threshold", e.what());
  }
  std::vector<QVector> pts = enumerate(inst, tau);
  json j;
  j["status"] = pts.empty() ? "infeasible" : "feasible";
  json arr = json::array();
  for (const auto& p : pts) arr.push_back(point_json(p));
  j["points"] = std::move(arr);
  emit(out, j);
  return pts.empty() ? 1 : 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"epsilon-feasibility and epsilon-minimization over integer points "
               "of box-bounded convex systems"};
  app.require_subcommand(1);

  SolveFlags flags;
  std::string feas_file, min_file, brute_file;
  std::string threshold = "0";

  CLI::App* feas = app.add_subcommand("feasible", "decide feasibility of an instance file");
  feas->add_option("file", feas_file, "instance JSON file")->required();
  flags.attach(feas);

  CLI::App* mini = app.add_subcommand("minimize", "minimize the instance objective");
  mini->add_option("file", min_file, "instance JSON file")->required();
  flags.attach(mini);

  CLI::App* brt = app.add_subcommand("brute", "enumerate feasible points by brute force");
  brt->add_option("file", brute_file, "instance JSON file")->required();
  brt->add_option("--threshold", threshold, "feasibility level (exact rational)");
  brt->add_option("--seed", flags.seed, "reserved for test-instance generation");

  try {
    // CLI11 consumes the vector back to front.
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (feas->parsed()) return cmd_feasible(feas_file, flags, out);
    if (mini->parsed()) return cmd_minimize(min_file, flags, out);
    return cmd_brute(brute_file, threshold, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace conemin
