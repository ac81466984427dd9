#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "trapchain/chain.hpp"

namespace trapchain {

// 17 significant digits: round-trip exact, trailing zeros stripped.
inline std::string format_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Trap list rendered with semicolons so it stays a single CSV field.
inline std::string format_traps(const std::vector<int>& traps) {
  std::string out;
  for (std::size_t i = 0; i < traps.size(); ++i) {
    if (i > 0) out += ';';
    out += std::to_string(traps[i]);
  }
  return out;
}

inline std::string config_comment(const ChainConfig& cfg) {
  return "# config n=" + std::to_string(cfg.n_nodes) + " nu=" + cfg.nu.str() +
         " gamma=" + format_float(cfg.gamma) + " traps=" + format_traps(cfg.traps);
}

// Writes through a ".partial" sibling and renames on commit, so a failed
// run never leaves a half-written file under the final name.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path target)
      : target_(std::move(target)), partial_(target_) {
    partial_ += ".partial";
    stream_.open(partial_, std::ios::binary | std::ios::trunc);
    if (!stream_) {
      throw std::runtime_error("cannot open " + partial_.string() + " for writing");
    }
  }

  std::ofstream& stream() { return stream_; }

  void commit() {
    stream_.close();
    if (stream_.fail()) {
      throw std::runtime_error("write failed for " + partial_.string());
    }
    std::filesystem::rename(partial_, target_);
    committed_ = true;
  }

  ~AtomicFile() = default;  // uncommitted: the .partial file stays behind

  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

 private:
  std::filesystem::path target_;
  std::filesystem::path partial_;
  std::ofstream stream_;
  bool committed_ = false;
};

struct CsvFile {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

inline CsvFile read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  CsvFile csv;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      csv.comments.push_back(line);
      continue;
    }
    if (!header_seen) {
      csv.header = split_csv_line(line);
      header_seen = true;
    } else {
      csv.rows.push_back(split_csv_line(line));
    }
  }
  return csv;
}

}  // namespace trapchain
