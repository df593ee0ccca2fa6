#include "ccopf/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <nlohmann/json.hpp>

#include "ccopf/format.hpp"
#include "ccopf/parallel.hpp"
#include "ccopf/rng.hpp"

namespace ccopf::scenario {

using nlohmann::json;

std::string to_string(Source s) {
  return s == Source::MonteCarlo ? "monte-carlo" : "quasi-monte-carlo";
}

Source source_from_string(const std::string& s) {
  if (s == "monte-carlo" || s == "mc") return Source::MonteCarlo;
  if (s == "quasi-monte-carlo" || s == "qmc") return Source::QuasiMonteCarlo;
  throw std::invalid_argument("unknown scenario source '" + s + "'");
}

ScenarioSet::ScenarioSet(std::vector<int> wind_buses, std::vector<int> load_buses,
                         Eigen::ArrayXXd wind, Eigen::ArrayXXd load)
    : wind_buses_(std::move(wind_buses)),
      load_buses_(std::move(load_buses)),
      wind_(std::move(wind)),
      load_(std::move(load)) {
  if (wind_.rows() != load_.rows()) throw std::invalid_argument("scenario row count mismatch");
  if (static_cast<std::size_t>(wind_.cols()) != wind_buses_.size() ||
      static_cast<std::size_t>(load_.cols()) != load_buses_.size())
    throw std::invalid_argument("scenario column count mismatch");
}

Scenario ScenarioSet::scenario(std::size_t i) const {
  Scenario s;
  s.sample_index = static_cast<int>(i);
  for (std::size_t k = 0; k < wind_buses_.size(); ++k)
    s.wind[wind_buses_[k]] = wind_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
  for (std::size_t k = 0; k < load_buses_.size(); ++k)
    s.load[load_buses_[k]] = load_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
  return s;
}

std::vector<double> sample_beta(double a, double b, std::size_t count, std::uint64_t seed) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("beta shapes must be positive");
  if (count < 1) throw std::invalid_argument("count must be at least 1");
  std::vector<double> out(count);
  rng::Engine eng(seed);
  for (auto& v : out) v = eng.beta(a, b);
  return out;
}

namespace {
constexpr int kHaltonPrimes[20] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                   31, 37, 41, 43, 47, 53, 59, 61, 67, 71};

double radical_inverse(std::uint64_t index, int base) {
  double inv_base = 1.0 / base;
  double fraction = inv_base;
  double result = 0.0;
  while (index > 0) {
    result += static_cast<double>(index % static_cast<std::uint64_t>(base)) * fraction;
    index /= static_cast<std::uint64_t>(base);
    fraction *= inv_base;
  }
  return result;
}
}  // namespace

Eigen::ArrayXXd halton(int dimension, std::size_t count, std::uint64_t start_index) {
  if (dimension < 1 || dimension > 20)
    throw std::invalid_argument("halton dimension must be in [1, 20]");
  if (count < 1) throw std::invalid_argument("count must be at least 1");
  Eigen::ArrayXXd pts(static_cast<Eigen::Index>(count), dimension);
#pragma omp parallel for schedule(static) num_threads(parallel::thread_count())
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i)
    for (int d = 0; d < dimension; ++d)
      pts(i, d) = radical_inverse(start_index + static_cast<std::uint64_t>(i), kHaltonPrimes[d]);
  return pts;
}

double cdf(const model::DistributionSpec& d, double x) {
  if (x <= d.lo) return 0.0;
  if (x >= d.hi) return 1.0;
  switch (d.kind) {
    case model::DistKind::Beta:
      return boost::math::ibeta(d.a, d.b, (x - d.lo) / (d.hi - d.lo));
    case model::DistKind::TruncatedNormal: {
      boost::math::normal_distribution<double> n(d.mu, d.sigma);
      const double fa = boost::math::cdf(n, d.lo);
      const double fb = boost::math::cdf(n, d.hi);
      return (boost::math::cdf(n, x) - fa) / (fb - fa);
    }
    case model::DistKind::PointMass:
      return x >= d.value ? 1.0 : 0.0;
  }
  return 0.0;
}

double inverse_cdf(const model::DistributionSpec& d, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability outside [0,1]");
  switch (d.kind) {
    case model::DistKind::Beta: {
      const double z = boost::math::ibeta_inv(d.a, d.b, p);
      return std::clamp(d.lo + (d.hi - d.lo) * z, d.lo, d.hi);
    }
    case model::DistKind::TruncatedNormal: {
      boost::math::normal_distribution<double> n(d.mu, d.sigma);
      const double fa = boost::math::cdf(n, d.lo);
      const double fb = boost::math::cdf(n, d.hi);
      const double x = boost::math::quantile(n, fa + p * (fb - fa));
      return std::clamp(x, d.lo, d.hi);
    }
    case model::DistKind::PointMass:
      return d.value;
  }
  throw std::logic_error("unsupported distribution kind");
}

namespace {
double draw(const model::DistributionSpec& d, rng::Engine& eng) {
  switch (d.kind) {
    case model::DistKind::Beta:
      return d.lo + (d.hi - d.lo) * eng.beta(d.a, d.b);
    case model::DistKind::TruncatedNormal: {
      double x;
      do {
        x = d.mu + d.sigma * eng.normal();
      } while (x < d.lo || x > d.hi);
      return x;
    }
    case model::DistKind::PointMass:
      return d.value;
  }
  throw std::logic_error("unsupported distribution kind");
}
}  // namespace

ScenarioSet generate_scenarios(const model::Network& net, std::size_t count, std::uint64_t seed,
                               Source source, std::uint64_t qmc_offset) {
  if (count < 1) throw std::invalid_argument("count must be at least 1");
  std::vector<int> wb = net.wind_buses();
  std::vector<int> lb = net.load_buses();

  // ascending-bus component order fixes the per-scenario draw order
  std::vector<const model::DistributionSpec*> dists;
  for (int bus : wb)
    for (const auto& w : net.wind_farms)
      if (w.bus == bus) dists.push_back(&w.dist);
  for (int bus : lb)
    for (const auto& l : net.loads)
      if (l.bus == bus) dists.push_back(&l.dist);

  const auto n_wind = static_cast<Eigen::Index>(wb.size());
  const auto n_load = static_cast<Eigen::Index>(lb.size());
  Eigen::ArrayXXd wind(static_cast<Eigen::Index>(count), n_wind);
  Eigen::ArrayXXd load(static_cast<Eigen::Index>(count), n_load);

  if (source == Source::MonteCarlo) {
#pragma omp parallel for schedule(static) num_threads(parallel::thread_count())
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
      rng::Engine eng(seed, static_cast<std::uint64_t>(i));
      for (Eigen::Index k = 0; k < n_wind; ++k) wind(i, k) = draw(*dists[k], eng);
      for (Eigen::Index k = 0; k < n_load; ++k)
        load(i, k) = draw(*dists[static_cast<std::size_t>(n_wind + k)], eng);
    }
  } else {
    const int dim = static_cast<int>(n_wind + n_load);
    if (dim > 20) throw std::invalid_argument("quasi-Monte Carlo supports at most 20 dimensions");
    const Eigen::ArrayXXd pts = halton(dim, count, qmc_offset);
#pragma omp parallel for schedule(static) num_threads(parallel::thread_count())
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
      for (Eigen::Index k = 0; k < n_wind; ++k)
        wind(i, k) = inverse_cdf(*dists[static_cast<std::size_t>(k)], pts(i, k));
      for (Eigen::Index k = 0; k < n_load; ++k)
        load(i, k) =
            inverse_cdf(*dists[static_cast<std::size_t>(n_wind + k)], pts(i, n_wind + k));
    }
  }

  ScenarioSet set(std::move(wb), std::move(lb), std::move(wind), std::move(load));
  set.seed = seed;
  set.source = source;
  set.qmc_offset = source == Source::QuasiMonteCarlo ? qmc_offset : 0;
  set.provenance_known = true;
  return set;
}

ScenarioSet forecast_scenarios(const model::Network& net) {
  std::vector<int> wb = net.wind_buses();
  std::vector<int> lb = net.load_buses();
  Eigen::ArrayXXd wind(1, static_cast<Eigen::Index>(wb.size()));
  Eigen::ArrayXXd load(1, static_cast<Eigen::Index>(lb.size()));
  for (std::size_t k = 0; k < wb.size(); ++k)
    for (const auto& w : net.wind_farms)
      if (w.bus == wb[k]) wind(0, static_cast<Eigen::Index>(k)) = w.forecast;
  for (std::size_t k = 0; k < lb.size(); ++k)
    for (const auto& l : net.loads)
      if (l.bus == lb[k]) load(0, static_cast<Eigen::Index>(k)) = l.mean;
  ScenarioSet set(std::move(wb), std::move(lb), std::move(wind), std::move(load));
  set.provenance_known = true;
  return set;
}

void save_scenarios(const ScenarioSet& set, const std::filesystem::path& path) {
  std::string out;
  out.reserve(set.count() * 32);
  out += "sample";
  for (int b : set.wind_buses()) out += ",wind_bus_" + std::to_string(b);
  for (int b : set.load_buses()) out += ",load_bus_" + std::to_string(b);
  out += "\n";
  const auto rows = static_cast<Eigen::Index>(set.count());
  for (Eigen::Index i = 0; i < rows; ++i) {
    out += std::to_string(i);
    for (Eigen::Index k = 0; k < set.wind().cols(); ++k) {
      out += ',';
      out += format::shortest(set.wind()(i, k));
    }
    for (Eigen::Index k = 0; k < set.load().cols(); ++k) {
      out += ',';
      out += format::shortest(set.load()(i, k));
    }
    out += '\n';
  }
  format::write_file(path, out);

  json manifest;
  manifest["command"] = "save_scenarios";
  manifest["config"] = {{"count", set.count()},
                        {"seed", set.seed},
                        {"source", to_string(set.source)},
                        {"qmc_offset", set.qmc_offset}};
  format::write_file(path.string() + ".manifest.json", manifest.dump(2) + "\n");
}

namespace {
std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

int parse_bus_column(const std::string& name, const std::string& prefix) {
  if (name.rfind(prefix, 0) != 0) return -1;
  const std::string tail = name.substr(prefix.size());
  int bus = 0;
  auto [p, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), bus);
  if (ec != std::errc() || p != tail.data() + tail.size() || bus <= 0) return -1;
  return bus;
}
}  // namespace

ScenarioSet load_scenarios(const std::filesystem::path& path) {
  const std::string content = format::read_file(path);
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(path.string() + ": empty scenario file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = split(line, ',');
  if (header.empty() || header[0] != "sample")
    throw SchemaError(path.string() + ": malformed header, first column must be 'sample'");
  std::vector<int> wind_buses, load_buses;
  std::size_t col = 1;
  while (col < header.size()) {
    const int bus = parse_bus_column(header[col], "wind_bus_");
    if (bus < 0) break;
    wind_buses.push_back(bus);
    ++col;
  }
  while (col < header.size()) {
    const int bus = parse_bus_column(header[col], "load_bus_");
    if (bus < 0)
      throw SchemaError(path.string() + ": malformed header column '" + header[col] + "'");
    load_buses.push_back(bus);
    ++col;
  }
  if (!std::is_sorted(wind_buses.begin(), wind_buses.end()) ||
      !std::is_sorted(load_buses.begin(), load_buses.end()))
    throw SchemaError(path.string() + ": header bus ids must be ascending");

  std::vector<double> cells;
  std::size_t rows = 0;
  const std::size_t arity = 1 + wind_buses.size() + load_buses.size();
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto parts = split(line, ',');
    if (parts.size() != arity)
      throw SchemaError(path.string() + ": row " + std::to_string(rows) + " has " +
                        std::to_string(parts.size()) + " cells, expected " +
                        std::to_string(arity));
    for (std::size_t k = 1; k < parts.size(); ++k) {
      double v = 0.0;
      const auto& cell = parts[k];
      auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || p != cell.data() + cell.size())
        throw SchemaError(path.string() + ": non-numeric cell '" + cell + "' in row " +
                          std::to_string(rows));
      cells.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw SchemaError(path.string() + ": no scenario rows");

  const auto n_wind = static_cast<Eigen::Index>(wind_buses.size());
  const auto n_load = static_cast<Eigen::Index>(load_buses.size());
  Eigen::ArrayXXd wind(static_cast<Eigen::Index>(rows), n_wind);
  Eigen::ArrayXXd load(static_cast<Eigen::Index>(rows), n_load);
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = cells.data() + i * (arity - 1);
    for (Eigen::Index k = 0; k < n_wind; ++k) wind(static_cast<Eigen::Index>(i), k) = row[k];
    for (Eigen::Index k = 0; k < n_load; ++k)
      load(static_cast<Eigen::Index>(i), k) = row[n_wind + k];
  }
  ScenarioSet set(std::move(wind_buses), std::move(load_buses), std::move(wind), std::move(load));

  const std::filesystem::path sidecar(path.string() + ".manifest.json");
  if (std::filesystem::exists(sidecar)) {
    try {
      const json manifest = json::parse(format::read_file(sidecar));
      const json& cfg = manifest.at("config");
      if (cfg.at("count").get<std::size_t>() == rows) {
        set.seed = cfg.at("seed").get<std::uint64_t>();
        set.source = source_from_string(cfg.at("source").get<std::string>());
        set.qmc_offset = cfg.at("qmc_offset").get<std::uint64_t>();
        set.provenance_known = true;
      }
    } catch (...) {
      // sidecar is advisory; a malformed one leaves provenance unknown
    }
  }
  return set;
}

void validate_schema(const model::Network& net, const ScenarioSet& set) {
  const auto wb = net.wind_buses();
  const auto lb = net.load_buses();
  if (set.wind_buses() != wb || set.load_buses() != lb) {
    std::ostringstream msg;
    msg << "scenario columns do not match the network (expected wind:";
    for (int b : wb) msg << " " << b;
    msg << ", load:";
    for (int b : lb) msg << " " << b;
    msg << "; got wind:";
    for (int b : set.wind_buses()) msg << " " << b;
    msg << ", load:";
    for (int b : set.load_buses()) msg << " " << b;
    msg << ")";
    throw SchemaError(msg.str());
  }
}

}  // namespace ccopf::scenario
