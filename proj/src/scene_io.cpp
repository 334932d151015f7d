#include "fraclab/scene_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <type_traits>

#include "fraclab/errors.hpp"
#include "json.hpp"

namespace fraclab {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::ValidationError, (path.empty() ? "/" : path) + ": " + what);
}

const json& member(const json& j, const std::string& path, const char* key) {
  if (!j.is_object() || !j.contains(key)) invalid(path, std::string("missing key '") + key + "'");
  return j.at(key);
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) invalid(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) invalid(path, "expected a finite number");
  return v;
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) invalid(path, "expected an integer");
  return j.get<int>();
}

Vector vec(const json& j, const std::string& path, int n) {
  if (!j.is_array()) invalid(path, "expected an array of numbers");
  if (static_cast<int>(j.size()) != n) invalid(path, "expected " + std::to_string(n) + " entries");
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = number(j[static_cast<std::size_t>(i)], path + "/" + std::to_string(i));
  return v;
}

Matrix mat(const json& j, const std::string& path, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) invalid(path, "expected " + std::to_string(n) + " rows");
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m.row(i) = vec(j[static_cast<std::size_t>(i)], path + "/" + std::to_string(i), n);
  return m;
}

CsgSet parse_set(const json& j, const std::string& path, int n) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "everything") return CsgSet::everything(n);
    if (s == "nothing") return CsgSet::nothing(n);
    invalid(path, "unknown set '" + s + "'");
  }
  if (!j.is_object() || j.size() != 1) invalid(path, "a set node is an object with exactly one key");
  const auto& [key, body] = *j.items().begin();
  const std::string p = path + "/" + key;
  try {
    if (key == "ball")
      return CsgSet::ball(vec(member(body, p, "center"), p + "/center", n), number(member(body, p, "radius"), p + "/radius"));
    if (key == "box") return CsgSet::box(vec(member(body, p, "lo"), p + "/lo", n), vec(member(body, p, "hi"), p + "/hi", n));
    if (key == "half_space")
      return CsgSet::half_space(vec(member(body, p, "normal"), p + "/normal", n),
                                number(member(body, p, "offset"), p + "/offset"));
    if (key == "cylinder")
      return CsgSet::cylinder(vec(member(body, p, "point"), p + "/point", n), vec(member(body, p, "axis"), p + "/axis", n),
                              number(member(body, p, "radius"), p + "/radius"));
    if (key == "paraboloid")
      return CsgSet::paraboloid(vec(member(body, p, "apex"), p + "/apex", n),
                                number(member(body, p, "curvature"), p + "/curvature"));
    if (key == "union" || key == "intersection") {
      if (!body.is_array() || body.empty()) invalid(p, "expected a nonempty array of sets");
      std::vector<CsgSet> children;
      for (std::size_t i = 0; i < body.size(); ++i) children.push_back(parse_set(body[i], p + "/" + std::to_string(i), n));
      return key == "union" ? CsgSet::unite(std::move(children)) : CsgSet::intersect(std::move(children));
    }
    if (key == "complement") return CsgSet::complement(parse_set(body, p, n));
  } catch (const Error& e) {
    const std::string msg = e.what();
    // Errors from nested nodes already carry their path.
    if (e.kind() == ErrorKind::ValidationError && msg.find(": /") != std::string::npos) throw;
    invalid(p, msg.substr(msg.find(": ") + 2));
  }
  invalid(path, "unknown set node '" + key + "'");
}

FieldSpec parse_field(const json& j, const std::string& path, int n) {
  FieldSpec f;
  if (j.is_string()) {
    f.type = j.get<std::string>();
  } else {
    f.type = member(j, path, "type").get<std::string>();
    if (j.contains("center")) f.center = vec(j["center"], path + "/center", n);
    if (j.contains("width")) f.width = number(j["width"], path + "/width");
    if (j.contains("matrix")) f.matrix = mat(j["matrix"], path + "/matrix", n);
    if (j.contains("value")) f.value = number(j["value"], path + "/value");
    if (j.contains("axis")) f.axis = integer(j["axis"], path + "/axis");
  }
  static const std::vector<std::string> known = {"indicator", "distance", "truncated_distance", "gaussian",
                                                 "anisotropic", "getoor", "constant"};
  if (std::find(known.begin(), known.end(), f.type) == known.end()) invalid(path + "/type", "unknown field '" + f.type + "'");
  return f;
}

json vec_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json set_json(const CsgSet& set) {
  using N = CsgSet::Node;
  return std::visit(
      overloaded{
          [](const Ball& b) -> json { return {{"ball", {{"center", vec_json(b.center)}, {"radius", b.radius}}}}; },
          [](const Box& b) -> json { return {{"box", {{"lo", vec_json(b.lo)}, {"hi", vec_json(b.hi)}}}}; },
          [](const HalfSpace& h) -> json {
            return {{"half_space", {{"normal", vec_json(h.normal)}, {"offset", h.offset}}}};
          },
          [](const Cylinder& c) -> json {
            return {{"cylinder", {{"point", vec_json(c.point)}, {"axis", vec_json(c.axis)}, {"radius", c.radius}}}};
          },
          [](const Paraboloid& p) -> json {
            return {{"paraboloid", {{"apex", vec_json(p.apex)}, {"curvature", p.curvature}}}};
          },
          [](const N::Union& u) -> json {
            json a = json::array();
            for (const auto& c : u.children) a.push_back(set_json(c));
            return {{"union", a}};
          },
          [](const N::Intersection& u) -> json {
            json a = json::array();
            for (const auto& c : u.children) a.push_back(set_json(c));
            return {{"intersection", a}};
          },
          [](const N::Complement& c) -> json { return {{"complement", set_json(c.child)}}; },
          [](const N::Everything&) -> json { return "everything"; },
          [](const N::Nothing&) -> json { return "nothing"; },
      },
      set.node().kind);
}

void apply_overrides(Scene& sc, const json& j) {
  const int n = sc.dimension;
  if (j.contains("omega")) sc.omega = parse_set(j["omega"], "/omega", n);
  if (j.contains("field")) sc.field = parse_field(j["field"], "/field", n);
  if (j.contains("params")) {
    const json& p = j["params"];
    if (p.contains("s")) sc.params.s = number(p["s"], "/params/s");
    if (p.contains("k")) sc.params.k = integer(p["k"], "/params/k");
  }
  if (j.contains("quadrature")) {
    const json& q = j["quadrature"];
    if (q.contains("split_radius")) sc.quadrature.split_radius = number(q["split_radius"], "/quadrature/split_radius");
    if (q.contains("outer_tol")) sc.quadrature.outer_tol = number(q["outer_tol"], "/quadrature/outer_tol");
    if (q.contains("tail_tol")) sc.quadrature.tail_tol = number(q["tail_tol"], "/quadrature/tail_tol");
    if (q.contains("inner_nodes")) sc.quadrature.inner_nodes = integer(q["inner_nodes"], "/quadrature/inner_nodes");
  }
  if (j.contains("optimizer")) {
    const json& o = j["optimizer"];
    if (o.contains("restarts")) sc.optimizer.restarts = integer(o["restarts"], "/optimizer/restarts");
    if (o.contains("max_iters")) sc.optimizer.max_iters = integer(o["max_iters"], "/optimizer/max_iters");
    if (o.contains("seed")) {
      if (!o["seed"].is_number_unsigned()) invalid("/optimizer/seed", "expected a nonnegative integer");
      sc.optimizer.seed = o["seed"].get<std::uint64_t>();
    }
    if (o.contains("tol")) sc.optimizer.tol = number(o["tol"], "/optimizer/tol");
  }
}

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

void Scene::validate() const {
  if (dimension < 1) invalid("/dimension", "must be >= 1");
  if (set.dim() != dimension) invalid("/set", "dimension differs from scene dimension");
  if (omega.dim() != dimension) invalid("/omega", "dimension differs from scene dimension");
  if (!(params.s > 0.0 && params.s < 1.0)) invalid("/params/s", "s must lie in (0, 1)");
  if (params.s < kMinS || params.s > kMaxS) invalid("/params/s", "s must lie in [1e-3, 1 - 1e-3]");
  if (params.k < 1 || params.k > dimension) invalid("/params/k", "k must lie in [1, N]");
  if (params.n != dimension) invalid("/params", "parameter dimension differs from scene dimension");
  try {
    quadrature.validate();
  } catch (const Error& e) {
    invalid("/quadrature", e.what());
  }
  try {
    optimizer.validate();
  } catch (const Error& e) {
    invalid("/optimizer", e.what());
  }
  if (field.center && field.center->size() != dimension) invalid("/field/center", "dimension mismatch");
  if (field.type == "gaussian" && !(field.width > 0.0)) invalid("/field/width", "must be > 0");
  if (field.type == "getoor" && (field.axis < 0 || field.axis >= dimension)) invalid("/field/axis", "out of range");
}

FieldPtr Scene::make_field() const {
  const Point c = field.center.value_or(Point::Zero(dimension));
  if (field.type == "indicator") return indicator_field(set);
  if (field.type == "distance") return distance_field(set, params.s > 0.5);
  if (field.type == "truncated_distance") return truncated_distance_field(set);
  if (field.type == "gaussian") return gaussian_bump(c, field.width);
  if (field.type == "anisotropic") return anisotropic_bump(c, field.matrix.value_or(Matrix::Identity(dimension, dimension)));
  if (field.type == "getoor") return getoor_profile(params.s, dimension, field.axis);
  if (field.type == "constant") return constant_field(dimension, field.value);
  invalid("/field/type", "unknown field '" + field.type + "'");
}

ImplicitSurfacePatch Scene::make_patch() const {
  if (const auto* p = std::get_if<Paraboloid>(&set.node().kind)) return paraboloid_patch(p->apex, p->curvature);
  return set_patch(set);
}

std::vector<std::string> fixture_names() { return {"two-balls-r3", "annulus-shell", "unit-ball", "paraboloid", "getoor"}; }

Scene fixture_scene(const std::string& name) {
  Scene sc;
  sc.name = name;
  if (name == "two-balls-r3") {
    sc.dimension = 3;
    sc.set = CsgSet::unite({CsgSet::ball(Point::Zero(3), 1.0), CsgSet::ball(Point(Eigen::Vector3d(0, 4, 0)), 1.0)});
    sc.params = {0.5, 2, 3};
  } else if (name == "annulus-shell") {
    sc.dimension = 3;
    const Vector e3 = Eigen::Vector3d(0, 0, 1);
    sc.set = CsgSet::intersect({CsgSet::cylinder(Point::Zero(3), e3, std::sqrt(2.0)),
                                CsgSet::complement(CsgSet::cylinder(Point::Zero(3), e3, 1.0))});
    sc.params = {0.5, 1, 3};
  } else if (name == "unit-ball") {
    sc.dimension = 3;
    sc.set = CsgSet::ball(Point::Zero(3), 1.0);
    sc.params = {0.5, 2, 3};
  } else if (name == "paraboloid") {
    sc.dimension = 3;
    sc.set = CsgSet::paraboloid(Point::Zero(3), 1.0);
    sc.params = {0.5, 1, 3};
  } else if (name == "getoor") {
    sc.dimension = 1;
    sc.set = CsgSet::nothing(1);
    sc.field.type = "getoor";
    sc.params = {0.5, 1, 1};
  } else {
    invalid("/fixture", "unknown fixture '" + name + "'");
  }
  sc.omega = CsgSet::everything(sc.dimension);
  return sc;
}

Scene parse_scene_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, line_column(text, e.byte) + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::ParseError, "line 1, column 1: scene must be a JSON object");
  Scene sc;
  try {
    if (j.contains("fixture")) {
      if (!j["fixture"].is_string()) invalid("/fixture", "expected a string");
      sc = fixture_scene(j["fixture"].get<std::string>());
      if (j.contains("dimension") && integer(j["dimension"], "/dimension") != sc.dimension)
        invalid("/dimension", "differs from the fixture dimension");
      if (j.contains("set")) sc.set = parse_set(j["set"], "/set", sc.dimension);
    } else {
      sc.name = "custom";
      sc.dimension = integer(member(j, "", "dimension"), "/dimension");
      if (sc.dimension < 1) invalid("/dimension", "must be >= 1");
      sc.set = parse_set(member(j, "", "set"), "/set", sc.dimension);
      sc.omega = CsgSet::everything(sc.dimension);
      sc.params.k = 1;
    }
    sc.params.n = sc.dimension;
    apply_overrides(sc, j);
  } catch (const json::exception& e) {
    invalid("", e.what());
  }
  sc.validate();
  return sc;
}

Scene parse_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open scene file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scene_text(ss.str());
}

std::string scene_to_json(const Scene& sc) {
  json j;
  j["dimension"] = sc.dimension;
  j["set"] = set_json(sc.set);
  j["omega"] = set_json(sc.omega);
  json f = {{"type", sc.field.type}};
  if (sc.field.center) f["center"] = vec_json(*sc.field.center);
  if (sc.field.type == "gaussian") f["width"] = sc.field.width;
  if (sc.field.matrix) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < sc.field.matrix->rows(); ++i) rows.push_back(vec_json(sc.field.matrix->row(i).transpose()));
    f["matrix"] = rows;
  }
  if (sc.field.type == "constant") f["value"] = sc.field.value;
  if (sc.field.type == "getoor") f["axis"] = sc.field.axis;
  j["field"] = f;
  j["params"] = {{"s", sc.params.s}, {"k", sc.params.k}};
  j["quadrature"] = {{"split_radius", sc.quadrature.split_radius},
                     {"outer_tol", sc.quadrature.outer_tol},
                     {"tail_tol", sc.quadrature.tail_tol},
                     {"inner_nodes", sc.quadrature.inner_nodes}};
  j["optimizer"] = {{"restarts", sc.optimizer.restarts},
                    {"max_iters", sc.optimizer.max_iters},
                    {"seed", sc.optimizer.seed},
                    {"tol", sc.optimizer.tol}};
  return j.dump(2) + "\n";
}

}  // namespace fraclab
