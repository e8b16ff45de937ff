#include "conemin/instance_io.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

namespace conemin {

namespace {

using json = nlohmann::ordered_json;

std::string idx(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

std::string key(const std::string& path, const std::string& k) {
  return path.empty() ? k : path + "." + k;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ParseError(path, what);
}

void expect_object(const json& j, const std::string& path,
                   std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) fail(key(path, item.key()), "unknown field");
  }
}

// Exact scalar: a string like "3/7" or "-0.25". Integer JSON literals are
// also exact and accepted; anything float-typed is refused.
Rational get_rational(const json& j, const std::string& path) {
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const std::exception& e) {
      fail(path, e.what());
    }
  }
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_number_unsigned()) return Rational(j.get<std::uint64_t>());
  if (j.is_number_float()) fail(path, "write numbers as strings, not float literals");
  fail(path, "expected a number string");
}

Int get_integer(const json& j, const std::string& path) {
  Rational q = get_rational(j, path);
  if (!is_integer(q)) fail(path, "expected an integer");
  return num(q);
}

Eigen::Index get_count(const json& j, const std::string& path) {
  Int v = get_integer(j, path);
  if (v < 0 || v > 1000) fail(path, "count out of range");
  return static_cast<Eigen::Index>(v.convert_to<long>());
}

QVector get_vector(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  QVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = get_rational(j[i], idx(path, i));
  return v;
}

QMatrix get_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of rows");
  std::size_t cols = 0;
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array()) fail(idx(path, r), "expected an array");
    if (r == 0)
      cols = j[r].size();
    else if (j[r].size() != cols)
      fail(idx(path, r), "ragged matrix rows");
  }
  QMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          get_rational(j[r][c], idx(idx(path, r), c));
  return m;
}

const json& get_field(const json& j, const char* k, const std::string& path) {
  auto it = j.find(k);
  if (it == j.end()) fail(path, std::string("missing field '") + k + "'");
  return *it;
}

int get_norm_p(const json& j, const std::string& path) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "1") return 1;
    if (s == "2") return 2;
    if (s == "inf") return kInfNorm;
    fail(path, "p must be \"1\", \"2\" or \"inf\"");
  }
  Int v = get_integer(j, path);
  if (v == 1 || v == 2) return static_cast<int>(v.convert_to<long>());
  fail(path, "p must be \"1\", \"2\" or \"inf\"");
}

FunctionExpr get_expr(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an expression object");
  const json& tj = get_field(j, "type", path);
  if (!tj.is_string()) fail(key(path, "type"), "expected a string");
  std::string type = tj.get<std::string>();

  if (type == "affine") {
    expect_object(j, path, {"type", "a", "b"});
    Affine f;
    f.a = get_vector(get_field(j, "a", path), key(path, "a"));
    f.b = get_rational(get_field(j, "b", path), key(path, "b"));
    return FunctionExpr(std::move(f));
  }
  if (type == "quadratic") {
    expect_object(j, path, {"type", "Q", "a", "b"});
    Quadratic f;
    f.Q = get_matrix(get_field(j, "Q", path), key(path, "Q"));
    f.a = get_vector(get_field(j, "a", path), key(path, "a"));
    f.b = get_rational(get_field(j, "b", path), key(path, "b"));
    return FunctionExpr(std::move(f));
  }
  if (type == "norm") {
    expect_object(j, path, {"type", "p", "M", "v", "scale"});
    NormOfAffine f;
    f.p = get_norm_p(get_field(j, "p", path), key(path, "p"));
    f.M = get_matrix(get_field(j, "M", path), key(path, "M"));
    f.v = get_vector(get_field(j, "v", path), key(path, "v"));
    if (j.contains("scale")) f.scale = get_rational(j["scale"], key(path, "scale"));
    return FunctionExpr(std::move(f));
  }
  if (type == "max") {
    expect_object(j, path, {"type", "parts"});
    const json& pj = get_field(j, "parts", path);
    if (!pj.is_array()) fail(key(path, "parts"), "expected an array");
    MaxExpr f;
    for (std::size_t i = 0; i < pj.size(); ++i)
      f.parts.push_back(get_expr(pj[i], idx(key(path, "parts"), i)));
    return FunctionExpr(std::move(f));
  }
  if (type == "sum") {
    expect_object(j, path, {"type", "parts", "weights"});
    const json& pj = get_field(j, "parts", path);
    const json& wj = get_field(j, "weights", path);
    if (!pj.is_array()) fail(key(path, "parts"), "expected an array");
    if (!wj.is_array()) fail(key(path, "weights"), "expected an array");
    SumExpr f;
    for (std::size_t i = 0; i < pj.size(); ++i)
      f.parts.push_back(get_expr(pj[i], idx(key(path, "parts"), i)));
    for (std::size_t i = 0; i < wj.size(); ++i)
      f.weights.push_back(get_rational(wj[i], idx(key(path, "weights"), i)));
    return FunctionExpr(std::move(f));
  }
  fail(key(path, "type"), "unknown expression type '" + type + "'");
}

std::string rat_str(const Rational& q) { return to_string(q); }

json put_vector(const QVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(rat_str(v(i)));
  return a;
}

json put_matrix(const QMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(rat_str(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json put_expr(const FunctionExpr& f) {
  json j;
  if (const auto* aff = std::get_if<Affine>(&f.node)) {
    j["type"] = "affine";
    j["a"] = put_vector(aff->a);
    j["b"] = rat_str(aff->b);
  } else if (const auto* q = std::get_if<Quadratic>(&f.node)) {
    j["type"] = "quadratic";
    j["Q"] = put_matrix(q->Q);
    j["a"] = put_vector(q->a);
    j["b"] = rat_str(q->b);
  } else if (const auto* nm = std::get_if<NormOfAffine>(&f.node)) {
    j["type"] = "norm";
    j["p"] = nm->p == kInfNorm ? "inf" : std::to_string(nm->p);
    j["M"] = put_matrix(nm->M);
    j["v"] = put_vector(nm->v);
    j["scale"] = rat_str(nm->scale);
  } else if (const auto* mx = std::get_if<MaxExpr>(&f.node)) {
    j["type"] = "max";
    json parts = json::array();
    for (const auto& p : mx->parts) parts.push_back(put_expr(p));
    j["parts"] = std::move(parts);
  } else {
    const auto& sm = std::get<SumExpr>(f.node);
    j["type"] = "sum";
    json parts = json::array();
    for (const auto& p : sm.parts) parts.push_back(put_expr(p));
    j["parts"] = std::move(parts);
    json weights = json::array();
    for (const auto& w : sm.weights) weights.push_back(rat_str(w));
    j["weights"] = std::move(weights);
  }
  return j;
}

json put_int(const Int& v) {
  // JSON integer when it fits, exact string beyond that.
  static const Int lo = Int(std::numeric_limits<std::int64_t>::min());
  static const Int hi = Int(std::numeric_limits<std::int64_t>::max());
  if (v >= lo && v <= hi) return v.convert_to<std::int64_t>();
  return v.str();
}

}  // namespace

Instance parse_instance_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin, e.what());
  }
  expect_object(j, "", {"dimension", "B", "Delta", "M", "epsilon", "objective",
                        "constraints", "mixed_continuous"});

  Instance inst;
  inst.n = get_count(get_field(j, "dimension", ""), "dimension");
  inst.B = get_integer(get_field(j, "B", ""), "B");
  inst.Delta = get_integer(get_field(j, "Delta", ""), "Delta");
  inst.M = get_integer(get_field(j, "M", ""), "M");
  inst.epsilon = get_rational(get_field(j, "epsilon", ""), "epsilon");
  if (j.contains("mixed_continuous") && !j["mixed_continuous"].is_null())
    inst.mixed_continuous = get_count(j["mixed_continuous"], "mixed_continuous");
  if (j.contains("objective") && !j["objective"].is_null())
    inst.objective = get_expr(j["objective"], "objective");
  const json& cj = get_field(j, "constraints", "");
  if (!cj.is_array()) fail("constraints", "expected an array");
  for (std::size_t i = 0; i < cj.size(); ++i)
    inst.constraints.push_back(get_expr(cj[i], idx("constraints", i)));

  try {
    validate_instance(inst);
  } catch (const std::invalid_argument& e) {
    throw ParseError(origin, e.what());
  }
  return inst;
}

Instance parse_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance_text(buf.str(), path);
}

std::string serialize_instance(const Instance& inst) {
  json j;
  j["dimension"] = static_cast<std::int64_t>(inst.n);
  j["B"] = put_int(inst.B);
  j["Delta"] = put_int(inst.Delta);
  j["M"] = put_int(inst.M);
  j["epsilon"] = rat_str(inst.epsilon);
  if (inst.objective) j["objective"] = put_expr(*inst.objective);
  json cs = json::array();
  for (const auto& c : inst.constraints) cs.push_back(put_expr(c));
  j["constraints"] = std::move(cs);
  if (inst.mixed_continuous > 0)
    j["mixed_continuous"] = static_cast<std::int64_t>(inst.mixed_continuous);
  return j.dump(2) + "\n";
}

}  // namespace conemin
