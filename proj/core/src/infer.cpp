#include "crtbounds/infer.hpp"

#include <algorithm>
#include <cmath>

#include "crtbounds/rng.hpp"

namespace crtb {

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw Error("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw Error("quantile level outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - lo) * (values[lo + 1] - values[lo]);
}

namespace {

StudyData resample(const StudyData& data, Rng& rng) {
  std::vector<const Cluster*> treated, control;
  for (const auto& c : data.clusters())
    (c.z == 1 ? treated : control).push_back(&c);

  std::vector<Cluster> clusters;
  clusters.reserve(data.J());
  int tag = 0;
  auto draw_from = [&](const std::vector<const Cluster*>& pool) {
    for (std::size_t k = 0; k < pool.size(); ++k) {
      Cluster c = *pool[rng.below(pool.size())];
      const std::string id = c.id + "#" + std::to_string(tag++);
      c.id = id;
      for (auto& u : c.units) u.cluster_id = id;
      clusters.push_back(std::move(c));
    }
  };
  draw_from(treated);
  draw_from(control);
  return StudyData(std::move(clusters), data.covariate_names());
}

}  // namespace

BootstrapResult cluster_bootstrap(const StudyData& data,
                                  const PipelineConfig& pipeline,
                                  const BootstrapConfig& config) {
  if (config.b < 2) throw Error("bootstrap needs at least 2 replicates");
  BootstrapResult out;
  out.point = run_bound_pipeline(data, pipeline);

  // per type: replicate endpoint samples from each bound family
  std::vector<double> cls_low[3], cls_up[3], ext_low[3], ext_up[3];
  for (int rep = 0; rep < config.b; ++rep) {
    Rng rng(config.seed, Stream::bootstrap, static_cast<std::uint64_t>(rep));
    const StudyData draw = resample(data, rng);
    PipelineConfig cfg = pipeline;
    cfg.seed = derive_seed(pipeline.seed, static_cast<std::uint64_t>(rep));

    BoundResults res;
    bool have_extended = pipeline.strata_column.has_value();
    try {
      res = run_bound_pipeline(draw, cfg);
    } catch (const Error&) {
      // strata can degenerate under resampling; fall back to the
      // classifier-only pipeline for this replicate
      if (!have_extended) throw;
      PipelineConfig no_strata = cfg;
      no_strata.strata_column.reset();
      res = run_bound_pipeline(draw, no_strata);
      have_extended = false;
      out.missing_extended++;
    }
    out.completed++;
    for (int t = 0; t < 3; ++t) {
      cls_low[t].push_back(res.classifier.by_type(t).lower);
      cls_up[t].push_back(res.classifier.by_type(t).upper);
      if (have_extended) {
        ext_low[t].push_back(res.extended->by_type(t).lower);
        ext_up[t].push_back(res.extended->by_type(t).upper);
      }
    }
  }

  const bool strata = pipeline.strata_column.has_value();
  if (strata && out.missing_extended > config.b / 5)
    throw Error("too many bootstrap replicates lost their strata");

  for (int t = 0; t < 3; ++t) {
    // the family that was binding at the point estimate supplies each end
    bool ext_binds_low = false, ext_binds_up = false;
    if (strata && out.point.extended) {
      ext_binds_low = out.point.extended->by_type(t).lower >
                      out.point.classifier.by_type(t).lower;
      ext_binds_up = out.point.extended->by_type(t).upper <
                     out.point.classifier.by_type(t).upper;
    }
    const std::vector<double>& low =
        ext_binds_low ? ext_low[t] : cls_low[t];
    const std::vector<double>& up = ext_binds_up ? ext_up[t] : cls_up[t];
    out.by_type(t).lower = quantile(low, config.alpha / 2.0);
    out.by_type(t).upper = quantile(up, 1.0 - config.alpha / 2.0);
  }
  return out;
}

}  // namespace crtb
