// SPDX-License-Identifier: Apache-2.0
#include "rcl/model_io.hpp"

#include <cstdio>

#include "rcl/error.hpp"

namespace rcl {
namespace {

using nlohmann::json;

PotentialDistribution parse_potential(const json& p) {
  const std::string kind = p.at("kind").get<std::string>();
  if (kind == "uniform") return PotentialDistribution::uniform(p.at("lo"), p.at("hi"));
  if (kind == "tent") return PotentialDistribution::tent(p.at("lo"), p.at("hi"));
  if (kind == "piecewise_linear") {
    return PotentialDistribution::piecewise_linear(p.at("knots").get<std::vector<double>>(),
                                                   p.at("density").get<std::vector<double>>());
  }
  throw ModelError("unknown potential kind '" + kind + "'");
}

Eigen::MatrixXd parse_hopping(const json& h, SiteSet& sites) {
  const std::string kind = h.at("kind").get<std::string>();
  const auto n = static_cast<Eigen::Index>(sites.size);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  if (kind == "chain") {
    const double hop = h.value("t", 1.0);
    for (Eigen::Index i = 0; i + 1 < n; ++i) t(i, i + 1) = t(i + 1, i) = hop;
    if (sites.coords.empty()) {
      for (Eigen::Index i = 0; i < n; ++i) sites.coords.push_back({static_cast<double>(i)});
    }
    return t;
  }
  if (kind == "grid") {
    const auto side = h.at("L").get<Eigen::Index>();
    if (side * side != n) throw ModelError("grid hopping needs sites.size == L*L");
    const double hop = h.value("t", 1.0);
    for (Eigen::Index r = 0; r < side; ++r) {
      for (Eigen::Index c = 0; c < side; ++c) {
        const Eigen::Index i = r * side + c;
        if (c + 1 < side) t(i, i + 1) = t(i + 1, i) = hop;
        if (r + 1 < side) t(i, i + side) = t(i + side, i) = hop;
      }
    }
    if (sites.coords.empty()) {
      for (Eigen::Index i = 0; i < n; ++i) {
        sites.coords.push_back({static_cast<double>(i / side), static_cast<double>(i % side)});
      }
    }
    return t;
  }
  if (kind == "dense") {
    const auto rows = h.at("matrix").get<std::vector<std::vector<double>>>();
    if (static_cast<Eigen::Index>(rows.size()) != n) throw ModelError("dense hopping has wrong row count");
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = rows[static_cast<std::size_t>(i)];
      if (static_cast<Eigen::Index>(row.size()) != n) throw ModelError("dense hopping has a ragged row");
      for (Eigen::Index j = 0; j < n; ++j) t(i, j) = row[static_cast<std::size_t>(j)];
    }
    return t;
  }
  throw ModelError("unknown hopping kind '" + kind + "'");
}

}  // namespace

ModelSpec model_from_json(const json& config) {
  try {
    SiteSet sites;
    const auto& s = config.at("sites");
    sites.size = s.at("size").get<std::size_t>();
    if (s.contains("coords")) sites.coords = s.at("coords").get<std::vector<std::vector<double>>>();

    Eigen::MatrixXd hopping = parse_hopping(config.at("hopping"), sites);

    std::vector<PotentialDistribution> laws;
    for (const auto& p : config.at("potentials")) laws.push_back(parse_potential(p));
    if (laws.size() == 1 && sites.size > 1) laws.assign(sites.size, laws.front());

    const bool already = config.value("rescaled", false);
    ModelSpec model(std::move(sites), std::move(hopping), std::move(laws), already);
    if (config.value("rescale", false) && !already) return rescale_to_unit_interval(model);
    return model;
  } catch (const json::exception& e) {
    throw ModelError(std::string("malformed model config: ") + e.what());
  }
}

nlohmann::ordered_json model_to_json(const ModelSpec& model) {
  nlohmann::ordered_json out;
  out["sites"]["size"] = model.size();
  if (model.sites().has_coords()) out["sites"]["coords"] = model.sites().coords;

  auto rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < model.hopping().rows(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index j = 0; j < model.hopping().cols(); ++j) row.push_back(model.hopping()(i, j));
    rows.push_back(std::move(row));
  }
  out["hopping"] = {{"kind", "dense"}, {"matrix", std::move(rows)}};

  auto laws = nlohmann::ordered_json::array();
  for (const auto& p : model.potentials()) {
    nlohmann::ordered_json law;
    if (p.kind() == DistributionKind::Uniform) {
      law["kind"] = "uniform";
      law["lo"] = p.lo();
      law["hi"] = p.hi();
    } else {
      law["kind"] = "piecewise_linear";
      law["knots"] = p.knots();
      law["density"] = p.density();
    }
    laws.push_back(std::move(law));
  }
  out["potentials"] = std::move(laws);
  out["rescaled"] = model.rescaled();
  return out;
}

std::string model_hash(const ModelSpec& model) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(model_to_json(model).dump())));
  return buf;
}

}  // namespace rcl
