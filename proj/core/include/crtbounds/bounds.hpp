#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crtbounds/classify.hpp"
#include "crtbounds/model.hpp"

namespace crtb {

// Plug-in population quantities feeding the bound program. Types are indexed
// 0 = never-taker, 1 = always-taker, 2 = complier; arms by z in {0, 1}.
struct LpInputs {
  double s[2] = {0.0, 0.0};       // S^(z): outcome totals scaled to N
  double s_nt1 = 0.0;             // S_NT^(1)
  double s_at0 = 0.0;             // S_AT^(0)
  double s_ct[3][2] = {};         // S_{C-tilde,t}^(z)
  double n_t[3] = {};             // estimated type sizes
  double r_t[3] = {};             // estimated misclassification counts
  int n = 0;                      // population size
  std::vector<std::string> warnings;
};

struct Bound {
  double lower = 0.0;
  double upper = 0.0;
  bool feasible = true;
};

struct BoundSet {
  Bound nt, at, co;

  Bound& by_type(int t) { return t == 0 ? nt : (t == 1 ? at : co); }
  const Bound& by_type(int t) const { return t == 0 ? nt : (t == 1 ? at : co); }
};

struct RescaleInfo {
  double shift = 0.0;   // subtracted from raw outcomes
  double scale = 1.0;   // divisor after the shift
  bool degenerate = false;  // all outcomes equal; data left untouched
};

LpInputs compute_lp_inputs(const StudyData& data, const TrainedClassifier& nt,
                           const TrainedClassifier& at,
                           const TrainedClassifier& co);

// Elastic-program bounds for all three type effects. Requires outcomes
// already rescaled to [0, 1].
BoundSet classifier_bounds(const LpInputs& inputs,
                           std::vector<std::string>* warnings = nullptr);

// Stratified moment bounds from receipt patterns alone; `strata_column`
// names a discrete covariate whose distinct values define the strata.
BoundSet extended_bounds(const StudyData& data,
                         const std::string& strata_column,
                         std::vector<std::string>* warnings = nullptr);

BoundSet intersect(const BoundSet& classifier, const BoundSet& extended,
                   std::vector<std::string>* warnings = nullptr);

// Affine map of outcomes onto [0, 1]; bounds on differences map back by
// multiplying with `scale`.
std::pair<StudyData, RescaleInfo> rescale_outcomes(const StudyData& data);

struct PipelineConfig {
  LearnerKind kind = LearnerKind::LINEAR;
  double lambda = 1e-3;
  std::uint64_t seed = 0;
  std::optional<std::string> strata_column;
  std::optional<double> r_override;
};

struct BoundResults {
  RescaleInfo rescale;
  LpInputs inputs;                    // on the rescaled outcome scale
  BoundSet classifier;                // on the original outcome scale
  std::optional<BoundSet> extended;   // present when strata were requested
  BoundSet intersection;              // equals `classifier` without strata
  TrainedClassifier nt, at, co;
  std::vector<std::string> warnings;
};

BoundResults run_bound_pipeline(const StudyData& data,
                                const PipelineConfig& config);

}  // namespace crtb
