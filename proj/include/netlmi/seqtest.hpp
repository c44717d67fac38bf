#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "netlmi/netmat.hpp"
#include "netlmi/topology.hpp"

namespace netlmi {

struct Message {
  enum class Kind { Tilde, Raw };
  int sender = 0;
  int receiver = 0;
  Kind kind = Kind::Tilde;
  int a = 0;  // tilde_block(a,b) = W~_ab, or raw_block(a,b) = W_ab
  int b = 0;
  int rows = 0;
  int cols = 0;
  double cost = 0.0;  // scalar entries transmitted

  std::string payload() const;
  bool operator==(const Message& o) const;
};

struct MessageLog {
  std::vector<Message> entries;

  void append(const MessageLog& o) { entries.insert(entries.end(), o.entries.begin(), o.entries.end()); }
  std::string to_text() const;
  static MessageLog from_text(const std::string& text);
};

struct TildeRow {
  int owner = 0;
  std::vector<Mat> blocks;  // W~_{owner,0..owner}
};

struct PdResult {
  bool pd = false;
  std::optional<int> failing_index;
  bool singular = false;
  std::vector<TildeRow> rows;
  MessageLog log;
  std::vector<std::string> warnings;
};

// Incremental form of the sequential test: rows are pushed one subsystem at a time.
class SequentialFactor {
 public:
  SequentialFactor(const Topology* topo, bool skip_redundant);

  int size() const { return static_cast<int>(rows_.size()); }
  const std::vector<TildeRow>& rows() const { return rows_; }
  const MessageLog& log() const { return log_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  // A_i D_i A_i^T for the rows pushed so far (equals the leading principal submatrix).
  Mat leading_product() const;
  Dims dims() const { return dims_; }

  // wrow[j] = W_ij for j = 0..i with i = size(). Returns min eigenvalue of W~_ii.
  double push_row(const std::vector<Mat>& wrow);
  bool last_pd() const { return last_pd_; }

 private:
  int skip_start(int i, int j) const;

  const Topology* topo_;
  bool skip_;
  std::vector<TildeRow> rows_;
  std::vector<Eigen::LLT<Mat>> inv_;
  Dims dims_;
  MessageLog log_;
  std::vector<std::string> warnings_;
  bool last_pd_ = true;
};

double symmetry_tolerance(const Mat& w);

PdResult sequential_pd_test(const BlockMatrix& w, const Topology* topo, bool skip_redundant,
                            bool compute_all = false);

BlockMatrix residual(const BlockMatrix& w, int i);

enum class EqualityStructure { General, BlockDiag };

// Solves A X B + C = 0 blockwise for block-diagonal A and B.
BlockMatrix enforce_equality(const BlockMatrix& a, const BlockMatrix& b, const BlockMatrix& c,
                             EqualityStructure structure, double cond_max = kCondWarn);

std::map<std::pair<int, int>, int> comm_count(const PdResult& result);
std::map<std::pair<int, int>, int> comm_count(const MessageLog& log);

}  // namespace netlmi
