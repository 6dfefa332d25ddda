#pragma once

#include <optional>
#include <vector>

#include "crtbounds/bounds.hpp"

namespace crtb {

struct BootstrapConfig {
  int b = 1000;            // number of replicates
  double alpha = 0.05;     // two-sided level for the confidence set
  std::uint64_t seed = 0;  // resampling stream; replicates derive child seeds
};

struct ConfidenceSet {
  double lower = 0.0;
  double upper = 0.0;
};

struct BootstrapResult {
  BoundResults point;
  ConfidenceSet nt, at, co;
  int completed = 0;         // replicates that produced classifier bounds
  int missing_extended = 0;  // replicates whose strata degenerated

  ConfidenceSet& by_type(int t) { return t == 0 ? nt : (t == 1 ? at : co); }
  const ConfidenceSet& by_type(int t) const {
    return t == 0 ? nt : (t == 1 ? at : co);
  }
};

// Type-7 sample quantile (linear interpolation of order statistics).
double quantile(std::vector<double> values, double p);

// Cluster bootstrap for the intersected bounds: resamples treated and
// control clusters separately, reruns the full pipeline per replicate, and
// reads off percentile endpoints from whichever bound (classifier or
// extended) was binding at the point estimate.
BootstrapResult cluster_bootstrap(const StudyData& data,
                                  const PipelineConfig& pipeline,
                                  const BootstrapConfig& config);

}  // namespace crtb
