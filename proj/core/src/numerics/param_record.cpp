#include "bngnn/numerics/param_record.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bngnn {

namespace {

constexpr const char* kMagic = "bngnn-record";

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw std::runtime_error("param record line " + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view token, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) parse_error(line, "bad number '" + std::string(token) + "'");
  return v;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

const std::string& ParamRecord::meta_value(const std::string& key) const {
  for (const auto& [k, v] : meta)
    if (k == key) return v;
  throw std::out_of_range("param record: missing meta key '" + key + "'");
}

const Matrix& ParamRecord::matrix(const std::string& name) const {
  for (const auto& [k, m] : matrices)
    if (k == name) return m;
  throw std::out_of_range("param record: missing matrix '" + name + "'");
}

void write_param_record(std::ostream& out, const ParamRecord& record) {
  out << kMagic << ' ' << ParamRecord::kVersion << '\n';
  out << "kind " << record.kind << '\n';
  for (const auto& [k, v] : record.meta) {
    if (k.find_first_of(" \n") != std::string::npos || v.find('\n') != std::string::npos) {
      throw std::invalid_argument("param record: meta entries must be single-line, key without spaces");
    }
    out << "meta " << k << ' ' << v << '\n';
  }
  for (const auto& [name, m] : record.matrices) {
    out << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) {
        if (c) out << ' ';
        out << format_double(m(r, c));
      }
      out << '\n';
    }
  }
  out << "end\n";
}

ParamRecord read_param_record(std::istream& in) {
  ParamRecord record;
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() {
    if (!std::getline(in, line)) parse_error(line_no + 1, "unexpected end of input");
    ++line_no;
  };
  next();
  {
    std::istringstream hs(line);
    std::string magic;
    int version = 0;
    hs >> magic >> version;
    if (magic != kMagic) parse_error(line_no, "not a parameter record");
    if (version != ParamRecord::kVersion) parse_error(line_no, "unsupported version " + std::to_string(version));
  }
  while (true) {
    next();
    if (line == "end") break;
    const auto space = line.find(' ');
    const std::string tag = line.substr(0, space);
    const std::string rest = space == std::string::npos ? "" : line.substr(space + 1);
    if (tag == "kind") {
      record.kind = rest;
    } else if (tag == "meta") {
      const auto sp = rest.find(' ');
      if (sp == std::string::npos) parse_error(line_no, "meta entry without value");
      record.meta.emplace_back(rest.substr(0, sp), rest.substr(sp + 1));
    } else if (tag == "matrix") {
      std::istringstream hs(rest);
      std::string name;
      std::size_t rows = 0, cols = 0;
      if (!(hs >> name >> rows >> cols)) parse_error(line_no, "bad matrix header");
      Matrix m(rows, cols);
      for (std::size_t r = 0; r < rows; ++r) {
        next();
        std::string_view view(line);
        std::size_t c = 0;
        while (!view.empty()) {
          const auto sp = view.find(' ');
          const std::string_view tok = view.substr(0, sp);
          if (c >= cols) parse_error(line_no, "too many values in row");
          m(r, c++) = parse_double(tok, line_no);
          view = sp == std::string_view::npos ? std::string_view{} : view.substr(sp + 1);
        }
        if (c != cols) parse_error(line_no, "expected " + std::to_string(cols) + " values, got " + std::to_string(c));
      }
      record.matrices.emplace_back(std::move(name), std::move(m));
    } else {
      parse_error(line_no, "unknown tag '" + tag + "'");
    }
  }
  return record;
}

void save_param_record(const std::string& path, const ParamRecord& record) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_param_record(out, record);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

ParamRecord load_param_record(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_param_record(in);
}

}  // namespace bngnn
