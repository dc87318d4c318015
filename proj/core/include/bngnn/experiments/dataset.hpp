#pragma once

#include <filesystem>
#include <stdexcept>
#include <vector>

#include "bngnn/netbuild/graph.hpp"

namespace bngnn {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kLabelsFile = "labels.csv";

// Directory layout: labels.csv with "id,label" lines (an "id,label" header is
// allowed) and one comma-separated n×n matrix file <id>.csv per instance.
// Graphs come back sorted by id.
std::vector<WeightedGraph> load_dataset(const std::filesystem::path& dir);
void write_dataset(const std::filesystem::path& dir, const std::vector<WeightedGraph>& graphs);

Matrix read_matrix_csv(const std::filesystem::path& file);
void write_matrix_csv(const std::filesystem::path& file, const Matrix& m);

}  // namespace bngnn
