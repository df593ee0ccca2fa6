#include "ccopf/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ccopf/format.hpp"

namespace ccopf::model {

using nlohmann::json;

double DistributionSpec::mean() const {
  switch (kind) {
    case DistKind::Beta:
      return lo + (hi - lo) * a / (a + b);
    case DistKind::TruncatedNormal: {
      const auto phi = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); };
      const auto Phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
      const double za = (lo - mu) / sigma;
      const double zb = (hi - mu) / sigma;
      const double mass = Phi(zb) - Phi(za);
      return mu + sigma * (phi(za) - phi(zb)) / mass;
    }
    case DistKind::PointMass:
      return value;
  }
  return 0.0;
}

int Network::slack_bus() const {
  for (const auto& b : buses)
    if (b.is_slack) return b.id;
  throw std::logic_error("network has no slack bus");
}

bool Network::has_bus(int id) const {
  return std::any_of(buses.begin(), buses.end(), [&](const Bus& b) { return b.id == id; });
}

std::vector<int> Network::wind_buses() const {
  std::vector<int> out;
  for (const auto& w : wind_farms) out.push_back(w.bus);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> Network::gen_buses() const {
  std::vector<int> out;
  for (const auto& g : generators) out.push_back(g.bus);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> Network::load_buses() const {
  std::vector<int> out;
  for (const auto& l : loads) out.push_back(l.bus);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) known = true;
    if (!known) throw ParseError("unknown key '" + item.key() + "' in " + where);
  }
}

const json& require(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError("missing key '" + std::string(key) + "' in " + where);
  return *it;
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError("expected number at " + where);
  return j.get<double>();
}

int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ParseError("expected integer at " + where);
  return j.get<int>();
}

bool as_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) throw ParseError("expected boolean at " + where);
  return j.get<bool>();
}

DistributionSpec parse_dist(const json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError("expected object at " + where);
  reject_unknown_keys(j, {"type", "params", "support_mw"}, where);
  DistributionSpec d;
  const std::string type = require(j, "type", where).get<std::string>();
  const json& params = require(j, "params", where);
  const json& support = require(j, "support_mw", where);
  if (!support.is_array() || support.size() != 2)
    throw ParseError("support_mw must be [lo, hi] at " + where);
  d.lo = as_number(support[0], where + ".support_mw[0]");
  d.hi = as_number(support[1], where + ".support_mw[1]");
  if (type == "beta") {
    d.kind = DistKind::Beta;
    reject_unknown_keys(params, {"a", "b"}, where + ".params");
    d.a = as_number(require(params, "a", where), where + ".params.a");
    d.b = as_number(require(params, "b", where), where + ".params.b");
  } else if (type == "truncated_normal") {
    d.kind = DistKind::TruncatedNormal;
    reject_unknown_keys(params, {"mu", "sigma"}, where + ".params");
    d.mu = as_number(require(params, "mu", where), where + ".params.mu");
    d.sigma = as_number(require(params, "sigma", where), where + ".params.sigma");
  } else if (type == "point") {
    d.kind = DistKind::PointMass;
    reject_unknown_keys(params, {"value"}, where + ".params");
    d.value = as_number(require(params, "value", where), where + ".params.value");
  } else {
    throw ParseError("unknown distribution type '" + type + "' at " + where);
  }
  return d;
}

json dist_to_json(const DistributionSpec& d) {
  json params;
  std::string type;
  switch (d.kind) {
    case DistKind::Beta:
      type = "beta";
      params = {{"a", d.a}, {"b", d.b}};
      break;
    case DistKind::TruncatedNormal:
      type = "truncated_normal";
      params = {{"mu", d.mu}, {"sigma", d.sigma}};
      break;
    case DistKind::PointMass:
      type = "point";
      params = {{"value", d.value}};
      break;
  }
  return json{{"type", type}, {"params", params}, {"support_mw", {d.lo, d.hi}}};
}

std::string dist_violations(const DistributionSpec& d, const std::string& where,
                            std::vector<std::string>& out) {
  switch (d.kind) {
    case DistKind::Beta:
      if (!(d.a > 0.0) || !(d.b > 0.0)) out.push_back(where + ": beta shapes must be positive");
      if (!(d.lo < d.hi)) out.push_back(where + ": support must satisfy lo < hi");
      break;
    case DistKind::TruncatedNormal:
      if (!(d.sigma > 0.0)) out.push_back(where + ": sigma must be positive");
      if (!(d.lo < d.hi)) out.push_back(where + ": support must satisfy lo < hi");
      break;
    case DistKind::PointMass:
      if (d.value < d.lo || d.value > d.hi)
        out.push_back(where + ": point mass outside its support");
      break;
  }
  return where;
}

}  // namespace

Network network_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("network file must contain a JSON object");
  reject_unknown_keys(j,
                      {"buses", "feeders", "generators", "slack_source", "wind", "loads",
                       "angle_bounds_rad"},
                      "network");
  Network net;

  for (const auto& bj : require(j, "buses", "network")) {
    reject_unknown_keys(bj, {"id", "slack"}, "buses[]");
    Bus b;
    b.id = as_int(require(bj, "id", "buses[]"), "buses[].id");
    b.is_slack = as_bool(require(bj, "slack", "buses[]"), "buses[].slack");
    net.buses.push_back(b);
  }

  for (const auto& fj : require(j, "feeders", "network")) {
    reject_unknown_keys(fj, {"from", "to", "susceptance_mw_per_rad", "p_max_mw", "alpha"},
                        "feeders[]");
    Feeder f;
    f.from_bus = as_int(require(fj, "from", "feeders[]"), "feeders[].from");
    f.to_bus = as_int(require(fj, "to", "feeders[]"), "feeders[].to");
    f.susceptance =
        as_number(require(fj, "susceptance_mw_per_rad", "feeders[]"), "feeders[].susceptance");
    f.p_max = as_number(require(fj, "p_max_mw", "feeders[]"), "feeders[].p_max_mw");
    if (fj.contains("alpha")) f.alpha = as_number(fj["alpha"], "feeders[].alpha");
    net.feeders.push_back(f);
  }

  for (const auto& gj : require(j, "generators", "network")) {
    reject_unknown_keys(gj, {"bus", "price_per_mwh", "p_min_mw", "p_max_mw"}, "generators[]");
    Generator g;
    g.bus = as_int(require(gj, "bus", "generators[]"), "generators[].bus");
    g.price = as_number(require(gj, "price_per_mwh", "generators[]"), "generators[].price");
    g.p_min = as_number(require(gj, "p_min_mw", "generators[]"), "generators[].p_min_mw");
    g.p_max = as_number(require(gj, "p_max_mw", "generators[]"), "generators[].p_max_mw");
    net.generators.push_back(g);
  }

  {
    const json& sj = require(j, "slack_source", "network");
    reject_unknown_keys(sj, {"bus", "price_per_mwh", "p_min_mw", "p_max_mw"}, "slack_source");
    net.slack_source.bus = as_int(require(sj, "bus", "slack_source"), "slack_source.bus");
    net.slack_source.price =
        as_number(require(sj, "price_per_mwh", "slack_source"), "slack_source.price");
    net.slack_source.p_min =
        as_number(require(sj, "p_min_mw", "slack_source"), "slack_source.p_min_mw");
    net.slack_source.p_max =
        as_number(require(sj, "p_max_mw", "slack_source"), "slack_source.p_max_mw");
  }

  for (const auto& wj : require(j, "wind", "network")) {
    reject_unknown_keys(wj, {"bus", "p_max_mw", "forecast_mw", "dist"}, "wind[]");
    WindFarm w;
    w.bus = as_int(require(wj, "bus", "wind[]"), "wind[].bus");
    w.p_max = as_number(require(wj, "p_max_mw", "wind[]"), "wind[].p_max_mw");
    w.forecast = as_number(require(wj, "forecast_mw", "wind[]"), "wind[].forecast_mw");
    w.dist = parse_dist(require(wj, "dist", "wind[]"), "wind[].dist");
    net.wind_farms.push_back(w);
  }

  for (const auto& lj : require(j, "loads", "network")) {
    reject_unknown_keys(lj, {"bus", "mean_mw", "dist"}, "loads[]");
    Load l;
    l.bus = as_int(require(lj, "bus", "loads[]"), "loads[].bus");
    l.mean = as_number(require(lj, "mean_mw", "loads[]"), "loads[].mean_mw");
    l.dist = parse_dist(require(lj, "dist", "loads[]"), "loads[].dist");
    net.loads.push_back(l);
  }

  if (j.contains("angle_bounds_rad")) {
    const json& aj = j["angle_bounds_rad"];
    reject_unknown_keys(aj, {"min", "max"}, "angle_bounds_rad");
    net.angle_min = as_number(require(aj, "min", "angle_bounds_rad"), "angle_bounds_rad.min");
    net.angle_max = as_number(require(aj, "max", "angle_bounds_rad"), "angle_bounds_rad.max");
  }

  return net;
}

json network_to_json(const Network& net) {
  json j;
  j["buses"] = json::array();
  for (const auto& b : net.buses) j["buses"].push_back({{"id", b.id}, {"slack", b.is_slack}});
  j["feeders"] = json::array();
  for (const auto& f : net.feeders)
    j["feeders"].push_back({{"from", f.from_bus},
                            {"to", f.to_bus},
                            {"susceptance_mw_per_rad", f.susceptance},
                            {"p_max_mw", f.p_max},
                            {"alpha", f.alpha}});
  j["generators"] = json::array();
  for (const auto& g : net.generators)
    j["generators"].push_back({{"bus", g.bus},
                               {"price_per_mwh", g.price},
                               {"p_min_mw", g.p_min},
                               {"p_max_mw", g.p_max}});
  j["slack_source"] = {{"bus", net.slack_source.bus},
                       {"price_per_mwh", net.slack_source.price},
                       {"p_min_mw", net.slack_source.p_min},
                       {"p_max_mw", net.slack_source.p_max}};
  j["wind"] = json::array();
  for (const auto& w : net.wind_farms)
    j["wind"].push_back({{"bus", w.bus},
                         {"p_max_mw", w.p_max},
                         {"forecast_mw", w.forecast},
                         {"dist", dist_to_json(w.dist)}});
  j["loads"] = json::array();
  for (const auto& l : net.loads)
    j["loads"].push_back({{"bus", l.bus}, {"mean_mw", l.mean}, {"dist", dist_to_json(l.dist)}});
  j["angle_bounds_rad"] = {{"min", net.angle_min}, {"max", net.angle_max}};
  return j;
}

std::vector<std::string> validate_network(const Network& net) {
  std::vector<std::string> v;

  std::set<int> bus_ids;
  int slack_count = 0;
  for (const auto& b : net.buses) {
    if (!bus_ids.insert(b.id).second)
      v.push_back("duplicate bus id " + std::to_string(b.id));
    if (b.id <= 0) v.push_back("bus id must be positive: " + std::to_string(b.id));
    if (b.is_slack) ++slack_count;
  }
  if (net.buses.empty()) v.push_back("network has no buses");
  if (slack_count != 1)
    v.push_back("exactly one slack bus required, found " + std::to_string(slack_count));

  std::set<std::pair<int, int>> seen_pairs;
  for (const auto& f : net.feeders) {
    const std::string name =
        "feeder (" + std::to_string(f.from_bus) + "," + std::to_string(f.to_bus) + ")";
    if (f.from_bus == f.to_bus) v.push_back(name + ": from and to must differ");
    auto key = std::minmax(f.from_bus, f.to_bus);
    if (!seen_pairs.insert({key.first, key.second}).second)
      v.push_back("duplicate feeder between buses " + std::to_string(key.first) + " and " +
                  std::to_string(key.second));
    if (!(f.susceptance > 0.0)) v.push_back(name + ": susceptance must be positive");
    if (!(f.p_max > 0.0)) v.push_back(name + ": p_max must be positive");
    if (f.alpha < 0.5) v.push_back(name + ": alpha below 0.5");
    if (f.alpha > 1.0) v.push_back(name + ": alpha above 1");
    for (int bus : {f.from_bus, f.to_bus})
      if (bus_ids.count(bus) == 0)
        v.push_back(name + " references absent bus " + std::to_string(bus));
  }

  for (const auto& g : net.generators) {
    const std::string name = "generator at bus " + std::to_string(g.bus);
    if (bus_ids.count(g.bus) == 0) v.push_back(name + " references absent bus");
    if (!(0.0 <= g.p_min && g.p_min <= g.p_max))
      v.push_back(name + ": requires 0 <= p_min <= p_max");
  }

  {
    if (bus_ids.count(net.slack_source.bus) == 0)
      v.push_back("slack_source references absent bus " + std::to_string(net.slack_source.bus));
    if (!(net.slack_source.p_min <= net.slack_source.p_max))
      v.push_back("slack_source: requires p_min <= p_max");
    if (slack_count == 1) {
      int sb = 0;
      for (const auto& b : net.buses)
        if (b.is_slack) sb = b.id;
      if (net.slack_source.bus != sb)
        v.push_back("slack_source bus " + std::to_string(net.slack_source.bus) +
                    " is not the slack bus " + std::to_string(sb));
    }
  }

  for (const auto& w : net.wind_farms) {
    const std::string name = "wind farm at bus " + std::to_string(w.bus);
    if (bus_ids.count(w.bus) == 0) v.push_back(name + " references absent bus");
    if (!(0.0 <= w.forecast && w.forecast <= w.p_max))
      v.push_back(name + ": requires 0 <= forecast <= p_max");
    dist_violations(w.dist, name, v);
  }

  for (const auto& l : net.loads) {
    const std::string name = "load at bus " + std::to_string(l.bus);
    if (bus_ids.count(l.bus) == 0) v.push_back(name + " references absent bus");
    if (l.mean < 0.0) v.push_back(name + ": mean must be nonnegative");
    dist_violations(l.dist, name, v);
  }

  if (!(net.angle_min < 0.0 && 0.0 < net.angle_max))
    v.push_back("angle bounds must satisfy angle_min < 0 < angle_max");

  // connectivity over the feeder graph
  if (!net.buses.empty()) {
    std::map<int, std::vector<int>> adj;
    for (const auto& f : net.feeders) {
      if (bus_ids.count(f.from_bus) && bus_ids.count(f.to_bus)) {
        adj[f.from_bus].push_back(f.to_bus);
        adj[f.to_bus].push_back(f.from_bus);
      }
    }
    std::set<int> seen;
    std::queue<int> q;
    q.push(net.buses.front().id);
    seen.insert(net.buses.front().id);
    while (!q.empty()) {
      int b = q.front();
      q.pop();
      for (int nb : adj[b])
        if (seen.insert(nb).second) q.push(nb);
    }
    if (seen.size() != bus_ids.size()) v.push_back("graph not connected");
  }

  return v;
}

Network load_network(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(format::read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError("failed to parse " + path.string() + ": " + e.what());
  }
  Network net = network_from_json(j);
  auto violations = validate_network(net);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << path.string() << ": network invariants violated:";
    for (const auto& s : violations) msg << "\n  - " << s;
    throw ValidationError(msg.str(), violations);
  }
  return net;
}

}  // namespace ccopf::model
