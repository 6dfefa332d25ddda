#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace crtb {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Unit {
  std::string cluster_id;
  int d = 0;               // treatment receipt
  double y = 0.0;          // outcome
  std::vector<double> x;   // covariates as stored in the file (no intercept)
};

struct Cluster {
  std::string id;
  int z = 0;  // assignment
  std::vector<Unit> units;

  int n() const { return static_cast<int>(units.size()); }
};

class StudyData {
 public:
  StudyData() = default;
  StudyData(std::vector<Cluster> clusters, std::vector<std::string> names);

  const std::vector<Cluster>& clusters() const { return clusters_; }
  const std::vector<std::string>& covariate_names() const { return names_; }

  int J() const { return static_cast<int>(clusters_.size()); }
  int m() const { return m_; }
  int N() const { return n_total_; }
  int p_raw() const { return static_cast<int>(names_.size()); }

  // position of a named covariate column; throws on unknown names
  int column(const std::string& name) const;

 private:
  std::vector<Cluster> clusters_;
  std::vector<std::string> names_;
  int m_ = 0;
  int n_total_ = 0;
};

StudyData load_csv(const std::string& path);
void write_csv(const StudyData& data, const std::string& path);

// Invariant violations as data; empty means the dataset is analysis-ready.
std::vector<std::string> validate(const StudyData& data);

}  // namespace crtb
