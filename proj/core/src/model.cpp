#include "crtbounds/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace crtb {

StudyData::StudyData(std::vector<Cluster> clusters,
                     std::vector<std::string> names)
    : clusters_(std::move(clusters)), names_(std::move(names)) {
  for (auto& c : clusters_) {
    if (c.z == 1) ++m_;
    n_total_ += c.n();
  }
}

int StudyData::column(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw Error("unknown covariate column: " + name);
  return static_cast<int>(it - names_.begin());
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& cell, std::size_t row,
                    const std::string& col) {
  const std::string t = trim(cell);
  if (t.empty())
    throw Error("empty cell in column '" + col + "' at data row " +
                std::to_string(row));
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || !std::isfinite(v))
    throw Error("unparsable value '" + t + "' in column '" + col +
                "' at data row " + std::to_string(row));
  return v;
}

int parse_binary(const std::string& cell, std::size_t row,
                 const std::string& col) {
  double v = parse_double(cell, row, col);
  if (v != 0.0 && v != 1.0)
    throw Error("non-binary " + col + " value '" + trim(cell) +
                "' at data row " + std::to_string(row));
  return static_cast<int>(v);
}

}  // namespace

StudyData load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw Error("empty file: " + path);
  auto header = split_line(line);
  for (auto& h : header) h = trim(h);

  const std::vector<std::string> reserved = {"cluster_id", "z", "d", "y"};
  std::map<std::string, int> pos;
  for (std::size_t i = 0; i < header.size(); ++i) pos[header[i]] = (int)i;
  for (const auto& r : reserved)
    if (!pos.count(r)) throw Error("missing column: " + r);

  std::vector<std::string> cov_names;
  std::vector<int> cov_cols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (std::find(reserved.begin(), reserved.end(), header[i]) ==
        reserved.end()) {
      cov_names.push_back(header[i]);
      cov_cols.push_back(static_cast<int>(i));
    }
  }

  std::vector<Cluster> clusters;
  std::map<std::string, int> index_of;  // cluster_id -> position
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    auto cells = split_line(line);
    if (cells.size() != header.size())
      throw Error("row " + std::to_string(row) + " has " +
                  std::to_string(cells.size()) + " cells, expected " +
                  std::to_string(header.size()));

    Unit u;
    u.cluster_id = trim(cells[pos["cluster_id"]]);
    if (u.cluster_id.empty())
      throw Error("empty cell in column 'cluster_id' at data row " +
                  std::to_string(row));
    int z = parse_binary(cells[pos["z"]], row, "z");
    u.d = parse_binary(cells[pos["d"]], row, "d");
    u.y = parse_double(cells[pos["y"]], row, "y");
    u.x.reserve(cov_cols.size());
    for (std::size_t k = 0; k < cov_cols.size(); ++k)
      u.x.push_back(parse_double(cells[cov_cols[k]], row, cov_names[k]));

    auto it = index_of.find(u.cluster_id);
    if (it == index_of.end()) {
      index_of[u.cluster_id] = static_cast<int>(clusters.size());
      Cluster c;
      c.id = u.cluster_id;
      c.z = z;
      c.units.push_back(std::move(u));
      clusters.push_back(std::move(c));
    } else {
      Cluster& c = clusters[it->second];
      if (c.z != z)
        throw Error("inconsistent assignment: cluster '" + c.id +
                    "' has rows with both z=0 and z=1");
      c.units.push_back(std::move(u));
    }
  }
  if (row == 0) throw Error("empty file: " + path + " (no data rows)");

  return StudyData(std::move(clusters), std::move(cov_names));
}

void write_csv(const StudyData& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open file for writing: " + path);
  out << "cluster_id,z,d,y";
  for (const auto& n : data.covariate_names()) out << ',' << n;
  out << '\n';
  out.precision(17);
  for (const auto& c : data.clusters()) {
    for (const auto& u : c.units) {
      out << c.id << ',' << c.z << ',' << u.d << ',' << u.y;
      for (double v : u.x) out << ',' << v;
      out << '\n';
    }
  }
}

std::vector<std::string> validate(const StudyData& data) {
  std::vector<std::string> v;
  int treated = 0, control = 0;
  for (const auto& c : data.clusters()) {
    if (c.z != 0 && c.z != 1)
      v.push_back("cluster '" + c.id + "': non-binary assignment");
    if (c.units.empty()) v.push_back("cluster '" + c.id + "': empty cluster");
    (c.z == 1 ? treated : control)++;
    for (std::size_t i = 0; i < c.units.size(); ++i) {
      const Unit& u = c.units[i];
      const std::string tag =
          "cluster '" + c.id + "' unit " + std::to_string(i + 1);
      if (u.cluster_id != c.id) v.push_back(tag + ": cluster-id mismatch");
      if (u.d != 0 && u.d != 1) v.push_back(tag + ": non-binary receipt");
      if (!std::isfinite(u.y)) v.push_back(tag + ": non-finite outcome");
      for (double x : u.x)
        if (!std::isfinite(x)) {
          v.push_back(tag + ": non-finite covariate");
          break;
        }
      if (u.x.size() != data.covariate_names().size())
        v.push_back(tag + ": covariate length mismatch");
    }
  }
  if (treated == 0) v.push_back("treated arm is empty (m=0)");
  if (control == 0) v.push_back("control arm is empty (m=J)");
  return v;
}

}  // namespace crtb
