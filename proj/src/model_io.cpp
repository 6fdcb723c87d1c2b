#include "ureach/model_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ureach/errors.hpp"

namespace ureach {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing key '") + key + "'");
  return *it;
}

void only_keys(const json& obj, std::initializer_list<const char*> allowed,
               const std::string& where) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!ok.count(it.key())) fail(where, "unknown key '" + it.key() + "'");
  }
}

double real(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(where, "non-finite number");
  return x;
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  return v.get<int>();
}

Intervald interval(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) fail(where, "expected [lo, hi]");
  const double lo = real(v[0], where + "[0]");
  const double hi = real(v[1], where + "[1]");
  if (!(lo <= hi)) fail(where, "interval lower bound exceeds upper bound");
  return {lo, hi};
}

Eigen::VectorXd vector(const json& v, Eigen::Index n, const std::string& where) {
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != n) {
    fail(where, "expected " + std::to_string(n) + " numbers");
  }
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = real(v[static_cast<std::size_t>(i)], where);
  return out;
}

template <typename Json>
Json interval_json(const Intervald& x) {
  return Json::array({x.lo(), x.hi()});
}

}  // namespace

ModelSpec model_from_json(const json& doc) {
  if (!doc.is_object()) fail("model", "top level must be an object");
  only_keys(doc,
            {"name", "notes", "dimension", "dynamics", "uncertainty", "initial", "unsafe",
             "horizon", "reduction"},
            "model");
  ModelSpec m;

  const json& name = field(doc, "name", "model");
  if (!name.is_string()) fail("name", "expected a string");
  m.name = name.get<std::string>();

  if (auto it = doc.find("notes"); it != doc.end()) {
    if (!it->is_array()) fail("notes", "expected a list of strings");
    for (const auto& line : *it) {
      if (!line.is_string()) fail("notes", "expected a list of strings");
      m.notes.push_back(line.get<std::string>());
    }
  }

  const int n = integer(field(doc, "dimension", "model"), "dimension");
  if (n < 1) fail("dimension", "must be positive");

  const json& dyn = field(doc, "dynamics", "model");
  only_keys(dyn, {"matrix", "continuous", "step"}, "dynamics");
  const Eigen::VectorXd flat = vector(field(dyn, "matrix", "dynamics"), Eigen::Index{n} * n,
                                      "dynamics.matrix");
  m.a = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), n, n);
  if (auto it = dyn.find("continuous"); it != dyn.end()) {
    if (!it->is_boolean()) fail("dynamics.continuous", "expected true or false");
    m.continuous = it->get<bool>();
  }
  if (auto it = dyn.find("step"); it != dyn.end()) {
    m.step = real(*it, "dynamics.step");
  } else if (m.continuous) {
    fail("dynamics", "continuous models need a 'step'");
  }

  if (auto it = doc.find("uncertainty"); it != doc.end()) {
    if (!it->is_array()) fail("uncertainty", "expected a list");
    for (std::size_t k = 0; k < it->size(); ++k) {
      const std::string where = "uncertainty[" + std::to_string(k) + "]";
      const json& u = (*it)[k];
      only_keys(u, {"row", "col", "relative", "interval"}, where);
      UncertainCell cell;
      cell.row = integer(field(u, "row", where), where + ".row");
      cell.col = integer(field(u, "col", where), where + ".col");
      const bool rel = u.contains("relative"), ivl = u.contains("interval");
      if (rel == ivl) fail(where, "give exactly one of 'relative' or 'interval'");
      if (rel) {
        cell.spec = real(u["relative"], where + ".relative");
      } else {
        cell.spec = interval(u["interval"], where + ".interval");
      }
      m.uncertainty.push_back(cell);
    }
  }

  const json& init = field(doc, "initial", "model");
  only_keys(init, {"box"}, "initial");
  const json& box = field(init, "box", "initial");
  if (!box.is_array() || box.size() != static_cast<std::size_t>(n)) {
    fail("initial.box", "expected " + std::to_string(n) + " intervals");
  }
  m.initial.resize(n);
  for (int i = 0; i < n; ++i) {
    m.initial(i) = interval(box[static_cast<std::size_t>(i)], "initial.box[" + std::to_string(i) + "]");
  }

  if (auto it = doc.find("unsafe"); it != doc.end()) {
    if (!it->is_array()) fail("unsafe", "expected a list");
    for (std::size_t k = 0; k < it->size(); ++k) {
      const std::string where = "unsafe[" + std::to_string(k) + "]";
      const json& h = (*it)[k];
      only_keys(h, {"normal", "offset"}, where);
      m.unsafe.push_back({vector(field(h, "normal", where), n, where + ".normal"),
                          real(field(h, "offset", where), where + ".offset")});
    }
  }

  m.horizon = integer(field(doc, "horizon", "model"), "horizon");

  if (auto it = doc.find("reduction"); it != doc.end()) {
    only_keys(*it, {"method", "period", "target"}, "reduction");
    const json& method = field(*it, "method", "reduction");
    if (!method.is_string()) fail("reduction.method", "expected a string");
    try {
      m.reduction.method = parse_reduction_method(method.get<std::string>());
    } catch (const InvalidArgument& e) {
      fail("reduction.method", e.what());
    }
    if (auto p = it->find("period"); p != it->end()) {
      m.reduction.period = integer(*p, "reduction.period");
    }
    if (auto t = it->find("target"); t != it->end()) {
      m.reduction.target = integer(*t, "reduction.target");
    }
  }

  try {
    m.validate();
  } catch (const Error& e) {
    throw ParseError(std::string("invalid model: ") + e.what());
  }
  return m;
}

ModelSpec parse_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return model_from_json(doc);
}

nlohmann::ordered_json model_to_json(const ModelSpec& model) {
  using oj = nlohmann::ordered_json;
  const Eigen::Index n = model.dim();
  oj doc;
  doc["name"] = model.name;
  if (!model.notes.empty()) doc["notes"] = model.notes;
  doc["dimension"] = n;

  oj matrix = oj::array();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) matrix.push_back(model.a(i, j));
  doc["dynamics"] = {{"matrix", matrix}, {"continuous", model.continuous}, {"step", model.step}};

  oj cells = oj::array();
  for (const auto& c : model.uncertainty) {
    oj u = {{"row", c.row}, {"col", c.col}};
    if (const double* r = std::get_if<double>(&c.spec)) {
      u["relative"] = *r;
    } else {
      u["interval"] = interval_json<oj>(std::get<Intervald>(c.spec));
    }
    cells.push_back(u);
  }
  doc["uncertainty"] = cells;

  oj box = oj::array();
  for (Eigen::Index i = 0; i < n; ++i) box.push_back(interval_json<oj>(model.initial(i)));
  doc["initial"] = {{"box", box}};

  oj unsafe = oj::array();
  for (const auto& h : model.unsafe) {
    unsafe.push_back({{"normal", std::vector<double>(h.normal.data(), h.normal.data() + n)},
                      {"offset", h.offset}});
  }
  doc["unsafe"] = unsafe;
  doc["horizon"] = model.horizon;

  oj red = {{"method", std::string(to_string(model.reduction.method))},
            {"period", model.reduction.period}};
  if (model.reduction.target != 0) red["target"] = model.reduction.target;
  doc["reduction"] = red;
  return doc;
}

std::string serialize_model(const ModelSpec& model) { return model_to_json(model).dump(2) + "\n"; }

ModelSpec load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_model(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace ureach
