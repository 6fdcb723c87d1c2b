#include "ureach/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <locale>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ureach/bounds.hpp"
#include "ureach/errors.hpp"
#include "ureach/linalg.hpp"
#include "ureach/model_io.hpp"
#include "ureach/reach.hpp"
#include "ureach/robustness.hpp"
#include "ureach/sensitivity.hpp"

namespace ureach {

namespace {

using ojson = nlohmann::ordered_json;

struct ReachArgs {
  std::string model;
  std::string method = "numeric";
  std::string norm = "two";
  std::string out;
  std::string reduction;
  int period = 0;
  std::optional<double> t_start;
  std::optional<double> t_end;
};

struct OrderArgs {
  std::string model;
  std::string out;
  bool discrete = false;
};

struct RobustArgs {
  std::string model;
  std::vector<std::string> cells;
  std::string scheme = "equal";
  bool literal_proportional = false;
  double step = 0.01;
  int cap = 200;
  std::string method = "numeric";
  std::string norm = "two";
  std::string out;
};

struct NormsArgs {
  std::string model;
  int limit = kDefaultSignEnumerationLimit;
};

void prepare(std::ostream& os) {
  os.imbue(std::locale::classic());
  os.precision(17);
}

std::string describe(const SafetyVerdict& v, const std::vector<HalfSpace>& unsafe) {
  if (unsafe.empty()) return "safe (no unsafe set given)";
  if (v.safe) return "safe";
  return "unsafe at step " + std::to_string(v.step) + " (half-space " + std::to_string(v.halfspace) +
         ")";
}

void write_box(std::ostream& os, const Boxd& box) {
  for (Eigen::Index i = 0; i < box.size(); ++i) os << ',' << box(i).lo() << ',' << box(i).hi();
}

void box_header(std::ostream& os, Eigen::Index n) {
  for (Eigen::Index i = 1; i <= n; ++i) os << ",lo_" << i << ",hi_" << i;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  prepare(f);
  return f;
}

void emit_json(const ojson& doc, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << doc.dump(2) << '\n';
  } else {
    std::ofstream f = open_out(path);
    f << doc.dump(2) << '\n';
  }
}

ojson interval_matrix_json(const IntervalMatrixd& m) {
  ojson lo = ojson::array(), hi = ojson::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ojson lr = ojson::array(), hr = ojson::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      lr.push_back(m(i, j).lo());
      hr.push_back(m(i, j).hi());
    }
    lo.push_back(lr);
    hi.push_back(hr);
  }
  return {{"lower", lo}, {"upper", hi}};
}

ojson cells_json(const std::vector<Cell>& cells) {
  ojson a = ojson::array();
  for (const Cell& c : cells) a.push_back({c.row, c.col});
  return a;
}

Cell parse_cell(const std::string& text) {
  std::string s = text;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  in.imbue(std::locale::classic());
  Cell c;
  std::string rest;
  if (!(in >> c.row >> c.col) || (in >> rest)) {
    throw InvalidArgument("cell '" + text + "' must look like ROW,COL");
  }
  return c;
}

int cmd_reach(const ReachArgs& args, std::ostream& out) {
  ModelSpec model = load_model(args.model);
  if (!args.reduction.empty()) model.reduction.method = parse_reduction_method(args.reduction);
  if (args.period > 0) model.reduction.period = args.period;
  model.validate();
  const Eigen::Index n = model.dim();
  std::ofstream csv = open_out(args.out);

  if (args.method == "numeric") {
    csv << "step";
    box_header(csv, n);
    csv << ",gen_count\n";
    SafetyVerdict verdict;
    ReachOptions opts;
    opts.keep_sets = false;
    opts.on_step = [&](std::size_t k, const Stard& set) {
      csv << k;
      write_box(csv, bounding_box(set));
      csv << ',' << set.num_generators() << '\n';
      if (verdict.safe) {
        if (auto h = first_violation(set, model.unsafe)) verdict = {false, k, *h};
      }
      return true;
    };
    const ReachResult result = ors_reach(model, opts);
    out << "model: " << model.name << "\n"
        << "method: numeric (reduction " << to_string(model.reduction.method) << ")\n"
        << "steps: " << model.horizon << "\n"
        << "final generators: " << result.generator_counts.back() << "\n"
        << "seconds: " << result.seconds << "\n"
        << "verdict: " << describe(verdict, model.unsafe) << "\n";
    return 0;
  }

  const BoundMethod method = parse_bound_method(args.method);
  const NormKind norm = parse_norm_kind(args.norm);
  if (!model.continuous) throw InvalidArgument("symbolic bounds need a continuous-time model");
  std::vector<double> times;
  const double t0 = args.t_start.value_or(0.0);
  const double t1 = args.t_end.value_or(model.step * model.horizon);
  if (t0 < 0.0 || t1 < t0) throw InvalidArgument("time window must satisfy 0 <= start <= end");
  for (long k = 0;; ++k) {
    const double t = t0 + k * model.step;
    if (t > t1 + 1e-9 * model.step) break;
    times.push_back(t);
  }
  const auto steps = symbolic_reach(model.a, model.perturbation(), model.initial, times, method, norm);
  csv << "t,phi,radius";
  box_header(csv, n);
  csv << '\n';
  for (const auto& s : steps) {
    csv << s.t << ',' << s.phi << ',' << s.radius;
    write_box(csv, bloated_box(s));
    csv << '\n';
  }
  out << "model: " << model.name << "\n"
      << "method: " << to_string(method) << " (" << to_string(norm) << " norm)\n"
      << "samples: " << steps.size() << "\n"
      << "verdict: " << describe(safety_check(steps, model.unsafe), model.unsafe) << "\n";
  return 0;
}

int cmd_order(const OrderArgs& args, std::ostream& out) {
  const ModelSpec model = load_model(args.model);
  const bool discrete = args.discrete && model.continuous;
  const Eigen::MatrixXd target = discrete ? expm((model.a * model.step).eval()) : model.a;
  const OrdMatrix ord = order_cells(target);

  ojson scores = ojson::array();
  for (Eigen::Index i = 0; i < ord.scores.rows(); ++i) {
    ojson row = ojson::array();
    for (Eigen::Index j = 0; j < ord.scores.cols(); ++j) row.push_back(ord.scores(i, j));
    scores.push_back(row);
  }
  const std::size_t k = std::min<std::size_t>(5, ord.ranking.size());
  const std::vector<Cell> top(ord.ranking.begin(), ord.ranking.begin() + static_cast<long>(k));
  const std::vector<Cell> bottom(ord.ranking.end() - static_cast<long>(k), ord.ranking.end());

  ojson doc;
  doc["model"] = model.name;
  doc["matrix"] = discrete ? "discrete" : "dynamics";
  doc["scores"] = scores;
  doc["ranking"] = cells_json(ord.ranking);
  doc["top5"] = cells_json(top);
  doc["bottom5"] = cells_json(bottom);
  emit_json(doc, args.out, out);
  return 0;
}

int cmd_robust(const RobustArgs& args, std::ostream& out) {
  const ModelSpec model = load_model(args.model);
  std::vector<Cell> cells;
  for (const auto& c : args.cells) cells.push_back(parse_cell(c));
  if (cells.empty()) {
    for (const auto& u : model.uncertainty) cells.push_back({u.row, u.col});
  }
  if (cells.empty()) throw InvalidArgument("no cells given and the model lists no uncertain cells");

  RobustnessOptions opts;
  opts.cap = args.cap;
  opts.distribution.literal_proportional = args.literal_proportional;
  opts.norm = parse_norm_kind(args.norm);
  if (args.method != "numeric") opts.symbolic = parse_bound_method(args.method);
  const BudgetScheme scheme = parse_budget_scheme(args.scheme);
  const ThresholdReport r = robustness_threshold(model, cells, scheme, args.step, opts);

  ojson trace = ojson::array();
  for (const auto& t : r.trace) {
    trace.push_back({{"budget", t.budget}, {"safe", t.safe}, {"norm", t.norm}});
  }
  ojson doc;
  doc["model"] = model.name;
  doc["scheme"] = std::string(to_string(r.scheme));
  doc["pipeline"] = args.method;
  doc["cells"] = cells_json(r.cells);
  doc["status"] = std::string(to_string(r.status));
  doc["already_unsafe"] = r.status == ThresholdStatus::AlreadyUnsafe;
  doc["cap_reached"] = r.status == ThresholdStatus::CapReached;
  doc["step"] = args.step;
  doc["final_budget"] = r.final_budget;
  doc["norm"] = r.norm;
  doc["iterations"] = r.iterations;
  doc["safe_perturbation"] = interval_matrix_json(r.safe_perturbation);
  doc["trace"] = trace;
  emit_json(doc, args.out, out);
  return 0;
}

int cmd_norms(const NormsArgs& args, std::ostream& out) {
  const ModelSpec model = load_model(args.model);
  const IntervalMatrixd lambda = model.perturbation();
  ojson doc;
  doc["model"] = model.name;
  doc["frobenius_sup"] = frobenius_sup(lambda);
  try {
    doc["two_norm_sup"] = two_norm_sup(lambda, args.limit);
  } catch (const DimensionTooLarge&) {
    doc["two_norm_sup"] = nullptr;
  }
  doc["perturbation"] = interval_matrix_json(lambda);
  out << doc.dump(2) << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  prepare(out);
  CLI::App app{"Reachability and robustness analysis for linear systems with interval uncertainty",
               "ureach"};
  app.require_subcommand(1);

  ReachArgs reach;
  auto* sub_reach = app.add_subcommand("reach", "Over-approximate the reachable set");
  sub_reach->add_option("model", reach.model, "Model file")->required();
  sub_reach->add_option("--method", reach.method, "numeric|kagstrom1|kagstrom2|loan")
      ->check(CLI::IsMember({"numeric", "kagstrom1", "kagstrom2", "loan"}));
  sub_reach->add_option("--norm", reach.norm, "Interval norm for symbolic bounds: two|frobenius")
      ->check(CLI::IsMember({"two", "frobenius"}));
  sub_reach->add_option("--out", reach.out, "CSV output path")->required();
  sub_reach->add_option("--reduction", reach.reduction, "Override: none|interval|zonotope")
      ->check(CLI::IsMember({"none", "interval", "zonotope"}));
  sub_reach->add_option("--period", reach.period, "Override the reduction period");
  sub_reach->add_option("--t-start", reach.t_start, "Symbolic window start time");
  sub_reach->add_option("--t-end", reach.t_end, "Symbolic window end time");

  OrderArgs order;
  auto* sub_order = app.add_subcommand("order", "Rank dynamics cells by sensitivity");
  sub_order->add_option("model", order.model, "Model file")->required();
  sub_order->add_option("--out", order.out, "JSON output path (default: stdout)");
  sub_order->add_flag("--discrete", order.discrete, "Rank cells of exp(A h) instead of A");

  RobustArgs robust;
  auto* sub_robust = app.add_subcommand("robust", "Search for the robustness threshold");
  sub_robust->add_option("model", robust.model, "Model file")->required();
  sub_robust->add_option("--cell", robust.cells, "Cell ROW,COL to perturb (repeatable)");
  sub_robust->add_option("--scheme", robust.scheme, "proportional|harmonic|equal")
      ->check(CLI::IsMember({"proportional", "harmonic", "equal"}));
  sub_robust->add_flag("--literal-proportional", robust.literal_proportional,
                       "Proportional weights from the summed Ord of less sensitive cells");
  sub_robust->add_option("--step", robust.step, "Budget increment");
  sub_robust->add_option("--cap", robust.cap, "Maximum number of budgets tried");
  sub_robust->add_option("--method", robust.method, "numeric|kagstrom1|kagstrom2|loan")
      ->check(CLI::IsMember({"numeric", "kagstrom1", "kagstrom2", "loan"}));
  sub_robust->add_option("--norm", robust.norm, "two|frobenius")
      ->check(CLI::IsMember({"two", "frobenius"}));
  sub_robust->add_option("--out", robust.out, "JSON output path (default: stdout)");

  NormsArgs norms;
  auto* sub_norms = app.add_subcommand("norms", "Print interval norms of the model uncertainty");
  sub_norms->add_option("model", norms.model, "Model file")->required();
  sub_norms->add_option("--limit", norms.limit, "Largest dimension for 2-norm enumeration");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*sub_reach) return cmd_reach(reach, out);
    if (*sub_order) return cmd_order(order, out);
    if (*sub_robust) return cmd_robust(robust, out);
    if (*sub_norms) return cmd_norms(norms, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace ureach
