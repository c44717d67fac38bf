#pragma once

#include <optional>
#include <string>

#include "netlmi/synthesis.hpp"

namespace netlmi {

// Text system file: domain, per-subsystem dimension table, sparse nonzero parameter blocks
// (1-based indices, row-major values), optional (Q,S,R) spec and indexing order.
struct SystemFile {
  NetworkedSystem system;
  std::optional<QsrSpec> qsr;
  std::optional<IndexingScheme> indexing;

  bool operator==(const SystemFile& o) const;
};

std::string save_system(const SystemFile& f);
SystemFile load_system(const std::string& text);

std::string save_design(const Design& d);
Design load_design(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

SolveStatus solve_status_from_string(const std::string& s);

// 64-bit FNV-1a digest as 16 hex digits.
std::string content_hash(const std::string& data);

}  // namespace netlmi
