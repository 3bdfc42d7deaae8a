#pragma once

#include <cstdlib>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "lofdrf/dataset.hpp"

namespace testutil {

inline std::filesystem::path data_dir() {
  const char* p = std::getenv("LOFDRF_DATA");
  if (p == nullptr || *p == '\0') throw std::runtime_error("LOFDRF_DATA is not set");
  return p;
}

inline std::filesystem::path cli_path() {
  const char* p = std::getenv("LOFDRF_CLI");
  if (p == nullptr || *p == '\0') throw std::runtime_error("LOFDRF_CLI is not set");
  return p;
}

struct TempDir {
  std::filesystem::path path;

  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "lofdrf-test-XXXXXX").string();
    if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path file(const std::string& name) const { return path / name; }
};

// In-memory dataset with numeric features f0..f{F-1}; class label order is
// first appearance, same as the CSV loader.
inline lofdrf::Dataset make_numeric_dataset(const std::vector<std::vector<double>>& rows,
                                            const std::vector<std::string>& labels) {
  if (rows.size() != labels.size() || rows.empty()) throw std::runtime_error("bad fixture");
  lofdrf::Dataset d;
  d.name = "fixture";
  d.label_name = "class";
  size_t f = rows[0].size();
  d.columns.assign(f, std::vector<double>(rows.size()));
  for (size_t i = 0; i < f; ++i) {
    lofdrf::FeatureSpec spec;
    spec.name = "f" + std::to_string(i);
    d.features.push_back(spec);
    for (size_t r = 0; r < rows.size(); ++r) d.columns[i][r] = rows[r][i];
  }
  d.labels.resize(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    const std::string& lab = labels[r];
    size_t idx = 0;
    while (idx < d.class_labels.size() && d.class_labels[idx] != lab) ++idx;
    if (idx == d.class_labels.size()) d.class_labels.push_back(lab);
    d.labels[r] = int32_t(idx);
  }
  return d;
}

}  // namespace testutil
