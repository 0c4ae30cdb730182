// SPDX-License-Identifier: Apache-2.0
#include "rcl/presets_parse.hpp"

#include <cmath>
#include <map>
#include <set>

#include "rcl/presets.hpp"

namespace rcl::cli {
namespace {

class Params {
 public:
  Params(const std::string& preset, const std::string& body, std::set<std::string> allowed)
      : preset_(preset) {
    std::size_t pos = 0;
    while (pos < body.size()) {
      const std::size_t comma = std::min(body.find(',', pos), body.size());
      const std::string item = body.substr(pos, comma - pos);
      const std::size_t eq = item.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw UsageError("preset parameter '" + item + "' must look like key=value");
      }
      const std::string key = item.substr(0, eq);
      if (!allowed.count(key)) throw UsageError("preset " + preset + " has no parameter '" + key + "'");
      values_[key] = item.substr(eq + 1);
      pos = comma + 1;
    }
  }

  double number(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      std::size_t used = 0;
      const double v = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument(key);
      return v;
    } catch (const std::exception&) {
      throw UsageError("preset " + preset_ + ": '" + key + "' is not a number");
    }
  }

  std::size_t count(const std::string& key, std::size_t fallback) const {
    const double v = number(key, static_cast<double>(fallback));
    if (!(v >= 1.0) || v != std::floor(v)) {
      throw UsageError("preset " + preset_ + ": '" + key + "' must be a positive integer");
    }
    return static_cast<std::size_t>(v);
  }

  PotentialDistribution law(double lo_default, double hi_default) const {
    const double lo = number("lo", lo_default);
    const double hi = number("hi", hi_default);
    if (!(lo < hi)) throw UsageError("preset " + preset_ + ": need lo < hi");
    const auto it = values_.find("dist");
    const std::string kind = it == values_.end() ? "uniform" : it->second;
    if (kind == "uniform") return PotentialDistribution::uniform(lo, hi);
    if (kind == "tent") return PotentialDistribution::tent(lo, hi);
    throw UsageError("preset " + preset_ + ": dist must be uniform or tent");
  }

 private:
  std::string preset_;
  std::map<std::string, std::string> values_;
};

}  // namespace

ModelSpec parse_preset(const std::string& spec) {
  const std::size_t colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : spec.substr(colon + 1);

  if (name == "single") {
    Params p(name, body, {"lo", "hi", "dist"});
    return ModelSpec(SiteSet{1, {{0.0}}}, Eigen::MatrixXd::Zero(1, 1), {p.law(0.0, 1.0)}, true);
  }
  if (name == "twosite") {
    Params p(name, body, {});
    Eigen::MatrixXd t(2, 2);
    t << 0.0, 0.1, 0.1, 0.0;
    const auto law = PotentialDistribution::uniform(0.1, 0.9);
    return ModelSpec(SiteSet{2, {{0.0}, {1.0}}}, t, {law, law}, true);
  }
  if (name == "anderson1d") {
    Params p(name, body, {"n", "t", "lo", "hi", "dist"});
    return anderson_1d(p.count("n", 8), p.number("t", 0.1), p.law(0.0, 1.0));
  }
  if (name == "anderson2d") {
    Params p(name, body, {"L", "t", "lo", "hi", "dist"});
    return anderson_2d(p.count("L", 4), p.number("t", 0.1), p.law(0.0, 1.0));
  }
  if (name == "critical1d") {
    Params p(name, body, {"n", "lo", "hi", "dist"});
    const std::size_t n = p.count("n", 100);
    if (n < 2) throw UsageError("preset critical1d needs n >= 2");
    return critical_1d(n, p.law(-1.0, 1.0));
  }
  throw UsageError("unknown preset '" + name + "'");
}

}  // namespace rcl::cli
