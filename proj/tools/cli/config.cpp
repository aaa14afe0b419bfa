#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <map>

namespace mcsim_cli {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

// SI value = magnitude * mul / div; sub-units divide so "20 um" rounds to 2e-5 exactly.
struct Scale {
  double mul = 1.0;
  double div = 1.0;
};
using UnitTable = std::map<std::string, Scale, std::less<>>;

const UnitTable& units_for(Dimension dim) {
  static const UnitTable length{{"m", {}},           {"cm", {1, 1e2}},
                                {"mm", {1, 1e3}},    {"um", {1, 1e6}},
                                {"\xC2\xB5m", {1, 1e6}}, {"nm", {1, 1e9}}};
  static const UnitTable time{{"s", {}}, {"ms", {1, 1e3}}, {"us", {1, 1e6}}, {"min", {60, 1}}};
  static const UnitTable diffusion{{"m2/s", {}},          {"m^2/s", {}},
                                   {"cm2/s", {1, 1e4}},   {"cm^2/s", {1, 1e4}},
                                   {"mm2/s", {1, 1e6}},   {"mm^2/s", {1, 1e6}},
                                   {"um2/s", {1, 1e12}},  {"um^2/s", {1, 1e12}}};
  switch (dim) {
    case Dimension::Length: return length;
    case Dimension::Time: return time;
    case Dimension::Diffusion: return diffusion;
  }
  return length;
}

const char* dim_name(Dimension dim) {
  switch (dim) {
    case Dimension::Length: return "length (e.g. \"50 um\")";
    case Dimension::Time: return "time (e.g. \"0.1 s\")";
    case Dimension::Diffusion: return "diffusion coefficient (e.g. \"1e-9 m2/s\")";
  }
  return "quantity";
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) bad(path + "." + key, "unknown key");
  }
}

const json& object_at(const json& parent, const std::string& key, const std::string& path) {
  const json& v = parent.at(key);
  if (!v.is_object()) bad(path, "expected an object");
  return v;
}

std::int64_t integer(const json& v, const std::string& path, std::int64_t min_value) {
  if (!v.is_number_integer()) bad(path, "expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < min_value) bad(path, "must be at least " + std::to_string(min_value));
  return x;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) bad(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad(path, "must be finite");
  return x;
}

std::array<double, 3> point(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) bad(path, "expected an array of three lengths");
  std::array<double, 3> p{};
  for (std::size_t i = 0; i < 3; ++i)
    p[i] = parse_quantity(v[i], Dimension::Length, path + "[" + std::to_string(i) + "]");
  return p;
}

// A scalar or a non-empty list of quantities.
std::vector<double> axis(const json& v, Dimension dim, const std::string& path) {
  std::vector<double> out;
  if (!v.is_array()) {
    out.push_back(parse_quantity(v, dim, path));
    return out;
  }
  if (v.empty()) bad(path, "list must not be empty");
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(parse_quantity(v[i], dim, path + "[" + std::to_string(i) + "]"));
  return out;
}

double positive(double x, const std::string& path) {
  if (!(x > 0.0)) bad(path, "must be positive");
  return x;
}

SceneConfig parse_scene(const json& s) {
  const std::string p = "scene";
  reject_unknown(s, p, {"diffusion", "time_step", "samples", "molecules", "transmitter", "receivers",
                        "layout"});
  SceneConfig scene;
  for (const char* key : {"diffusion", "time_step", "samples"})
    if (!s.contains(key)) bad(p + "." + key, "required");
  scene.diffusion = positive(parse_quantity(s["diffusion"], Dimension::Diffusion, p + ".diffusion"),
                             p + ".diffusion");
  scene.time_step = positive(parse_quantity(s["time_step"], Dimension::Time, p + ".time_step"),
                             p + ".time_step");
  scene.samples = integer(s["samples"], p + ".samples", 2);
  if (s.contains("molecules")) scene.molecules = integer(s["molecules"], p + ".molecules", 1);
  if (s.contains("transmitter")) scene.transmitter = point(s["transmitter"], p + ".transmitter");

  if (s.contains("receivers") == s.contains("layout"))
    bad(p, "exactly one of \"receivers\" or \"layout\" is required");
  if (s.contains("receivers")) {
    const json& list = s["receivers"];
    if (!list.is_array() || list.empty()) bad(p + ".receivers", "expected a non-empty array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string rp = p + ".receivers[" + std::to_string(i) + "]";
      if (!list[i].is_object()) bad(rp, "expected an object");
      reject_unknown(list[i], rp, {"center", "radius"});
      if (!list[i].contains("center")) bad(rp + ".center", "required");
      if (!list[i].contains("radius")) bad(rp + ".radius", "required");
      ReceiverSpec rx;
      rx.center = point(list[i]["center"], rp + ".center");
      rx.radius = positive(parse_quantity(list[i]["radius"], Dimension::Length, rp + ".radius"),
                           rp + ".radius");
      scene.receivers.push_back(rx);
    }
  } else {
    const std::string lp = p + ".layout";
    const json& l = object_at(s, "layout", lp);
    reject_unknown(l, lp, {"count", "radius", "distance"});
    if (!l.contains("radius")) bad(lp + ".radius", "required");
    if (!l.contains("distance")) bad(lp + ".distance", "required");
    const auto count = l.contains("count") ? integer(l["count"], lp + ".count", 1) : 1;
    if (count != 1 && count != 2 && count != 4) bad(lp + ".count", "must be 1, 2 or 4");
    const double radius =
        positive(parse_quantity(l["radius"], Dimension::Length, lp + ".radius"), lp + ".radius");
    const double distance = positive(parse_quantity(l["distance"], Dimension::Length, lp + ".distance"),
                                     lp + ".distance");
    if (!(distance > radius)) bad(lp + ".distance", "must exceed the radius");
    scene.receivers = symmetric_receivers(static_cast<int>(count), radius, distance);
  }
  return scene;
}

ChannelGrid parse_channel(const json& c) {
  const std::string p = "channel";
  reject_unknown(c, p, {"radius", "distance", "diffusion", "time_step", "molecules"});
  for (const char* key : {"radius", "distance", "diffusion", "time_step"})
    if (!c.contains(key)) bad(p + "." + key, "required");
  ChannelGrid grid;
  grid.radius = axis(c["radius"], Dimension::Length, p + ".radius");
  grid.distance = axis(c["distance"], Dimension::Length, p + ".distance");
  grid.diffusion = axis(c["diffusion"], Dimension::Diffusion, p + ".diffusion");
  grid.time_step = axis(c["time_step"], Dimension::Time, p + ".time_step");
  if (c.contains("molecules")) grid.molecules = integer(c["molecules"], p + ".molecules", 1);
  for (double v : grid.radius) positive(v, p + ".radius");
  for (double v : grid.diffusion) positive(v, p + ".diffusion");
  for (double v : grid.time_step) positive(v, p + ".time_step");
  for (double r : grid.radius)
    for (double d : grid.distance)
      if (!(d > r)) bad(p + ".distance", "every distance must exceed every radius");
  return grid;
}

AsymptoteConfig parse_asymptote(const json& a) {
  const std::string p = "asymptote";
  reject_unknown(a, p, {"radius", "distance", "tol", "n_max"});
  if (!a.contains("radius")) bad(p + ".radius", "required");
  if (!a.contains("distance")) bad(p + ".distance", "required");
  AsymptoteConfig out;
  out.radius = positive(parse_quantity(a["radius"], Dimension::Length, p + ".radius"), p + ".radius");
  out.distance = parse_quantity(a["distance"], Dimension::Length, p + ".distance");
  if (!(out.distance > out.radius)) bad(p + ".distance", "must exceed the radius");
  if (a.contains("tol")) out.tol = positive(number(a["tol"], p + ".tol"), p + ".tol");
  if (a.contains("n_max"))
    out.n_max = static_cast<int>(integer(a["n_max"], p + ".n_max", 1));
  return out;
}

}  // namespace

double parse_quantity(const json& value, Dimension dim, const std::string& path) {
  if (!value.is_string())
    bad(path, std::string("expected a ") + dim_name(dim) + " with a unit suffix");
  const std::string& text = value.get_ref<const std::string&>();
  const char* first = text.data();
  const char* last = first + text.size();
  while (first < last && *first == ' ') ++first;
  double magnitude = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, magnitude);
  if (ec != std::errc{} || !std::isfinite(magnitude))
    bad(path, "cannot parse number in \"" + text + "\"");
  std::string_view unit(ptr, static_cast<std::size_t>(last - ptr));
  while (!unit.empty() && unit.front() == ' ') unit.remove_prefix(1);
  while (!unit.empty() && unit.back() == ' ') unit.remove_suffix(1);
  if (unit.empty()) bad(path, std::string("missing unit; expected a ") + dim_name(dim));
  const auto& table = units_for(dim);
  const auto it = table.find(unit);
  if (it == table.end())
    bad(path, "unknown unit \"" + std::string(unit) + "\" for a " + dim_name(dim));
  return magnitude * it->second.mul / it->second.div;
}

std::vector<ReceiverSpec> symmetric_receivers(int count, double radius, double distance) {
  static constexpr std::array<std::array<double, 3>, 4> dirs{
      {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}}};
  std::vector<ReceiverSpec> out;
  for (int i = 0; i < count; ++i) {
    ReceiverSpec rx;
    for (int k = 0; k < 3; ++k) rx.center[k] = distance * dirs[i][k];
    rx.radius = radius;
    out.push_back(rx);
  }
  return out;
}

ExperimentConfig parse_config(const json& root) {
  if (!root.is_object()) bad("$", "config root must be an object");
  reject_unknown(root, "$", {"scene", "channel", "asymptote", "policy", "run", "output"});
  ExperimentConfig cfg;
  if (root.contains("scene")) cfg.scene = parse_scene(object_at(root, "scene", "scene"));
  if (root.contains("channel")) cfg.channel = parse_channel(object_at(root, "channel", "channel"));
  if (root.contains("asymptote"))
    cfg.asymptote = parse_asymptote(object_at(root, "asymptote", "asymptote"));

  if (root.contains("policy")) {
    const json& p = object_at(root, "policy", "policy");
    reject_unknown(p, "policy", {"algorithm", "xi"});
    if (p.contains("algorithm")) {
      if (!p["algorithm"].is_string()) bad("policy.algorithm", "expected a string");
      cfg.algorithm = p["algorithm"].get<std::string>();
    }
    if (p.contains("xi")) {
      cfg.xi.clear();
      const json& x = p["xi"];
      if (x.is_array()) {
        if (x.empty()) bad("policy.xi", "list must not be empty");
        for (std::size_t i = 0; i < x.size(); ++i)
          cfg.xi.push_back(number(x[i], "policy.xi[" + std::to_string(i) + "]"));
      } else {
        cfg.xi.push_back(number(x, "policy.xi"));
      }
      for (double v : cfg.xi)
        if (v < 0.0 || v >= 1.0) bad("policy.xi", "values must lie in [0, 1)");
    }
  }
  if (root.contains("run")) {
    const json& r = object_at(root, "run", "run");
    reject_unknown(r, "run", {"seed", "realizations", "workers"});
    if (r.contains("seed")) {
      if (!r["seed"].is_number_unsigned() && !r["seed"].is_number_integer())
        bad("run.seed", "expected a nonnegative integer");
      if (r["seed"].is_number_integer() && r["seed"].get<std::int64_t>() < 0)
        bad("run.seed", "expected a nonnegative integer");
      cfg.seed = r["seed"].get<std::uint64_t>();
    }
    if (r.contains("realizations")) cfg.realizations = integer(r["realizations"], "run.realizations", 1);
    if (r.contains("workers"))
      cfg.workers = static_cast<int>(integer(r["workers"], "run.workers", 1));
  }
  if (root.contains("output")) {
    if (!root["output"].is_string()) bad("output", "expected a path string");
    cfg.output = root["output"].get<std::string>();
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(root);
}

json to_json(const ExperimentConfig& c) {
  json out;
  if (c.scene) {
    json rxs = json::array();
    for (const auto& rx : c.scene->receivers)
      rxs.push_back({{"center_m", rx.center}, {"radius_m", rx.radius}});
    out["scene"] = {{"diffusion_m2_per_s", c.scene->diffusion},
                    {"time_step_s", c.scene->time_step},
                    {"samples", c.scene->samples},
                    {"molecules", c.scene->molecules},
                    {"transmitter_m", c.scene->transmitter},
                    {"receivers", rxs}};
  }
  if (c.channel)
    out["channel"] = {{"radius_m", c.channel->radius},
                      {"distance_m", c.channel->distance},
                      {"diffusion_m2_per_s", c.channel->diffusion},
                      {"time_step_s", c.channel->time_step},
                      {"molecules", c.channel->molecules}};
  if (c.asymptote)
    out["asymptote"] = {{"radius_m", c.asymptote->radius},
                        {"distance_m", c.asymptote->distance},
                        {"tol", c.asymptote->tol},
                        {"n_max", c.asymptote->n_max}};
  out["policy"] = {{"algorithm", c.algorithm}, {"xi", c.xi}};
  out["run"] = {{"seed", c.seed}, {"realizations", c.realizations}, {"workers", c.workers}};
  out["output"] = c.output;
  return out;
}

}  // namespace mcsim_cli
