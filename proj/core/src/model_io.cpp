#include "fsik/kinematics.hpp"

#include "embedded_models.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace fsik {
namespace {

using nlohmann::json;

double number_field(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ModelError(where + ": missing field '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number()) throw ModelError(where + ": field '" + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ModelError(where + ": field '" + key + "' must be finite");
  return x;
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-9; }

void require(bool ok, const std::string& name, const std::string& what) {
  if (!ok) throw ModelError("model '" + name + "': " + what);
}

void derive_link_lengths(RobotModel& m) {
  const auto& dh = m.dh;
  for (std::size_t i = 0; i < dh.size(); ++i) {
    require(dh[i].theta_offset == 0.0, m.name,
            "dh[" + std::to_string(i) + "].theta_offset must be zero for this solver");
  }
  const double h = kPi / 2.0;
  if (m.kind == RobotKind::UR5) {
    require(dh.size() == 6, m.name, "ur5 needs 6 dh rows");
    const double alpha[6] = {h, 0.0, 0.0, h, -h, 0.0};
    for (std::size_t i = 0; i < 6; ++i) {
      require(near(dh[i].alpha, alpha[i]), m.name, "dh[" + std::to_string(i) + "].alpha does not match the ur5 layout");
    }
    require(dh[0].a == 0.0 && dh[3].a == 0.0 && dh[4].a == 0.0 && dh[5].a == 0.0, m.name,
            "ur5 layout needs a1 = a4 = a5 = a6 = 0");
    require(dh[1].d == 0.0 && dh[2].d == 0.0, m.name, "ur5 layout needs d2 = d3 = 0");
    m.link_lengths = {dh[0].d, std::abs(dh[1].a), std::abs(dh[2].a), dh[3].d, dh[4].d, dh[5].d};
    require(dh[1].a < 0.0 && dh[2].a < 0.0, m.name, "ur5 layout needs negative a2 and a3");
  } else {
    require(dh.size() == 7, m.name, "kuka needs 7 dh rows");
    for (std::size_t i = 0; i < 7; ++i) {
      const double want = i == 6 ? 0.0 : (i % 2 == 0 ? -h : h);
      require(near(dh[i].alpha, want), m.name, "dh[" + std::to_string(i) + "].alpha does not match the kuka layout");
      require(dh[i].a == 0.0, m.name, "kuka layout needs all a = 0");
    }
    require(dh[1].d == 0.0 && dh[3].d == 0.0 && dh[5].d == 0.0, m.name, "kuka layout needs d2 = d4 = d6 = 0");
    m.link_lengths = {dh[0].d, dh[2].d, dh[4].d, dh[6].d};
  }
  for (double l : m.link_lengths) require(l > 0.0, m.name, "link lengths must be positive");
}

RobotModel model_from_json(const json& doc) {
  if (!doc.is_object()) throw ModelError("model document must be a JSON object");
  if (!doc.contains("name") || !doc.at("name").is_string()) throw ModelError("model: missing string field 'name'");
  RobotModel m;
  m.name = doc.at("name").get<std::string>();
  m.kind = parse_robot_kind(m.name);

  if (!doc.contains("dh") || !doc.at("dh").is_array()) throw ModelError("model '" + m.name + "': missing array field 'dh'");
  const json& rows = doc.at("dh");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string where = "model '" + m.name + "' dh[" + std::to_string(i) + "]";
    if (!rows[i].is_object()) throw ModelError(where + ": must be an object");
    DHRow r;
    r.a = number_field(rows[i], "a", where);
    r.alpha = number_field(rows[i], "alpha", where);
    r.d = number_field(rows[i], "d", where);
    r.theta_offset = number_field(rows[i], "theta_offset", where);
    r.alpha = wrap_angle(r.alpha);
    if (r.alpha == -kPi) r.alpha = kPi;
    m.dh.push_back(r);
  }

  if (!doc.contains("limits") || !doc.at("limits").is_array()) {
    throw ModelError("model '" + m.name + "': missing array field 'limits'");
  }
  const json& lims = doc.at("limits");
  for (std::size_t i = 0; i < lims.size(); ++i) {
    const std::string where = "model '" + m.name + "' limits[" + std::to_string(i) + "]";
    const json& p = lims[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw ModelError(where + ": must be a [lo, hi] number pair");
    }
    JointLimit l{p[0].get<double>(), p[1].get<double>()};
    if (!std::isfinite(l.lo) || !std::isfinite(l.hi) || !(l.lo < l.hi)) {
      throw ModelError(where + ": needs finite lo < hi");
    }
    m.limits.push_back(l);
  }
  require(m.limits.size() == m.dh.size(), m.name, "number of limit pairs must equal number of dh rows");
  derive_link_lengths(m);
  return m;
}

}  // namespace

RobotModel parse_model_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("model JSON does not parse: ") + e.what());
  }
  return model_from_json(doc);
}

RobotModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model_json(ss.str());
}

RobotModel builtin_model(RobotKind kind) {
  static const json doc = json::parse(detail::kEmbeddedRobotModels);
  for (const json& entry : doc.at("models")) {
    if (parse_robot_kind(entry.at("name").get<std::string>()) == kind) return model_from_json(entry);
  }
  throw ModelError("no embedded model for " + to_string(kind));
}

}  // namespace fsik
