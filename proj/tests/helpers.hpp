#pragma once

#include <string>
#include <utility>
#include <vector>

#include "crtbounds/model.hpp"
#include "crtbounds/rng.hpp"

namespace testutil {

// Compact fixture builder: one entry per cluster, units as (d, y, covariates).
struct UnitSpec {
  int d;
  double y;
  std::vector<double> x;
};

inline crtb::StudyData build_study(
    const std::vector<std::pair<int, std::vector<UnitSpec>>>& spec,
    std::vector<std::string> names) {
  std::vector<crtb::Cluster> clusters;
  int id = 0;
  for (const auto& [z, units] : spec) {
    crtb::Cluster c;
    c.id = "c" + std::to_string(id++);
    c.z = z;
    for (const auto& u : units) {
      crtb::Unit unit;
      unit.cluster_id = c.id;
      unit.d = u.d;
      unit.y = u.y;
      unit.x = u.x;
      c.units.push_back(std::move(unit));
    }
    clusters.push_back(std::move(c));
  }
  return crtb::StudyData(std::move(clusters), std::move(names));
}

// Random small study with p continuous covariates; receipts loosely tied to
// the first covariate so classifiers have something to learn.
inline crtb::StudyData random_study(std::uint64_t seed, int j, int m,
                                    int p = 2, int max_units = 4) {
  crtb::Rng rng(seed, crtb::Stream::population);
  std::vector<std::pair<int, std::vector<UnitSpec>>> spec;
  for (int c = 0; c < j; ++c) {
    const int z = c < m ? 1 : 0;
    const int n = 1 + static_cast<int>(rng.below(max_units));
    std::vector<UnitSpec> units;
    for (int i = 0; i < n; ++i) {
      UnitSpec u;
      u.x.resize(p);
      for (int k = 0; k < p; ++k) u.x[k] = rng.uniform(-1.0, 1.0);
      const double score = u.x[0] + 0.5 * rng.uniform(-1.0, 1.0);
      const int type = score > 0.5 ? 1 : (score < -0.5 ? 0 : 2);
      u.d = type == 1 ? 1 : (type == 2 ? z : 0);
      u.y = rng.uniform() < 0.3 + 0.3 * u.d ? 1.0 : 0.0;
      units.push_back(std::move(u));
    }
    spec.emplace_back(z, std::move(units));
  }
  std::vector<std::string> names;
  for (int k = 0; k < p; ++k) names.push_back("x" + std::to_string(k + 1));
  return build_study(spec, names);
}

}  // namespace testutil
