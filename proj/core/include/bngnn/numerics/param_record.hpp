#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "bngnn/numerics/matrix.hpp"

namespace bngnn {

// Versioned text record of named matrices plus string metadata, shared by the
// GNN and policy checkpoints. Doubles are written in shortest round-trip form so
// the output is byte-stable and reloads bit-exactly.
struct ParamRecord {
  static constexpr int kVersion = 1;

  std::string kind;
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::pair<std::string, Matrix>> matrices;

  const std::string& meta_value(const std::string& key) const;
  const Matrix& matrix(const std::string& name) const;
};

void write_param_record(std::ostream& out, const ParamRecord& record);
ParamRecord read_param_record(std::istream& in);

void save_param_record(const std::string& path, const ParamRecord& record);
ParamRecord load_param_record(const std::string& path);

std::string format_double(double value);

}  // namespace bngnn
