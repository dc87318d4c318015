#include "bngnn/experiments/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "bngnn/numerics/param_record.hpp"

namespace bngnn {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const fs::path& file, std::size_t line, const std::string& what) {
  throw DatasetError(file.string() + ":" + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

Matrix read_matrix_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw DatasetError(file.string() + ": cannot open matrix file");
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest = trim(line);
    if (rest.empty()) continue;
    std::size_t count = 0;
    while (true) {
      const auto comma = rest.find(',');
      const std::string_view tok = trim(rest.substr(0, comma));
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
        fail(file, line_no, "bad value '" + std::string(tok) + "' in column " + std::to_string(count + 1));
      }
      if (!std::isfinite(v)) fail(file, line_no, "non-finite value '" + std::string(tok) + "'");
      values.push_back(v);
      ++count;
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (rows == 0) cols = count;
    else if (count != cols) fail(file, line_no, "ragged row: " + std::to_string(count) + " values, expected " + std::to_string(cols));
    ++rows;
  }
  if (rows == 0) throw DatasetError(file.string() + ": empty matrix file");
  return Matrix(rows, cols, std::move(values));
}

void write_matrix_csv(const fs::path& file, const Matrix& m) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw DatasetError(file.string() + ": cannot open for writing");
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
  if (!out) throw DatasetError(file.string() + ": write failed");
}

std::vector<WeightedGraph> load_dataset(const fs::path& dir) {
  const fs::path labels_path = dir / kLabelsFile;
  std::ifstream in(labels_path);
  if (!in) throw DatasetError(labels_path.string() + ": cannot open labels file");
  std::vector<WeightedGraph> graphs;
  std::vector<std::size_t> label_lines;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) fail(labels_path, line_no, "expected 'id,label'");
    const std::string id(trim(text.substr(0, comma)));
    const std::string_view label_text = trim(text.substr(comma + 1));
    if (line_no == 1 && id == "id" && label_text == "label") continue;
    int label = -1;
    auto [ptr, ec] = std::from_chars(label_text.data(), label_text.data() + label_text.size(), label);
    if (ec != std::errc() || ptr != label_text.data() + label_text.size() || (label != 0 && label != 1)) {
      fail(labels_path, line_no, "label must be 0 or 1, got '" + std::string(label_text) + "'");
    }
    if (id.empty() || id.find_first_of("/\\") != std::string::npos || id + ".csv" == kLabelsFile) {
      fail(labels_path, line_no, "invalid id '" + id + "'");
    }
    if (!seen.insert(id).second) fail(labels_path, line_no, "duplicate id '" + id + "'");
    graphs.push_back(WeightedGraph{id, Matrix(), label});
    label_lines.push_back(line_no);
  }
  if (graphs.empty()) throw DatasetError(labels_path.string() + ": no instances listed");

  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const fs::path file = dir / (graphs[i].id + ".csv");
    if (!fs::exists(file)) fail(labels_path, label_lines[i], "missing matrix file " + file.string());
    graphs[i].weights = read_matrix_csv(file);
    const Matrix& w = graphs[i].weights;
    if (w.rows() != w.cols()) throw DatasetError(file.string() + ": matrix is " + w.shape_string() + ", expected square");
    if (w.rows() != graphs.front().weights.rows()) {
      throw DatasetError(file.string() + ": n=" + std::to_string(w.rows()) + " differs from n=" +
                         std::to_string(graphs.front().weights.rows()) + " of '" + graphs.front().id + "'");
    }
  }
  std::sort(graphs.begin(), graphs.end(), [](const WeightedGraph& a, const WeightedGraph& b) { return a.id < b.id; });
  return graphs;
}

void write_dataset(const fs::path& dir, const std::vector<WeightedGraph>& graphs) {
  fs::create_directories(dir);
  std::ofstream labels(dir / kLabelsFile, std::ios::binary);
  if (!labels) throw DatasetError((dir / kLabelsFile).string() + ": cannot open for writing");
  labels << "id,label\n";
  for (const WeightedGraph& g : graphs) {
    labels << g.id << ',' << g.label << '\n';
    write_matrix_csv(dir / (g.id + ".csv"), g.weights);
  }
}

}  // namespace bngnn
