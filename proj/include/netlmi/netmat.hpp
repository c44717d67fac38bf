#pragma once

#include "netlmi/common.hpp"

namespace netlmi {

class Topology;

// Dense two-level block matrix with explicit block row/column dimensions.
class BlockMatrix {
 public:
  BlockMatrix() = default;
  BlockMatrix(Dims row_dims, Dims col_dims);
  BlockMatrix(Dims row_dims, Dims col_dims, Mat data);

  static BlockMatrix square(const Dims& dims) { return BlockMatrix(dims, dims); }
  static BlockMatrix identity(const Dims& dims);
  static BlockMatrix block_diag(const std::vector<Mat>& blocks);

  int n_block_rows() const { return static_cast<int>(row_dims_.size()); }
  int n_block_cols() const { return static_cast<int>(col_dims_.size()); }
  const Dims& row_dims() const { return row_dims_; }
  const Dims& col_dims() const { return col_dims_; }
  const Mat& dense() const { return data_; }
  Mat& dense() { return data_; }

  Eigen::Block<Mat> block(int i, int j);
  Eigen::Block<const Mat> block(int i, int j) const;
  void set_block(int i, int j, const Mat& m);

  bool is_block_diagonal(double tol = kZeroTol) const;
  bool same_structure(const BlockMatrix& o) const {
    return row_dims_ == o.row_dims_ && col_dims_ == o.col_dims_;
  }

 private:
  Dims row_dims_, col_dims_;
  std::vector<int> ro_, co_;
  Mat data_;
};

bool is_network_matrix(const BlockMatrix& theta, const Topology& topo, double tol = kZeroTol);

BlockMatrix transpose(const BlockMatrix& a);
BlockMatrix axpy(double alpha, const BlockMatrix& a, double beta, const BlockMatrix& b);
BlockMatrix mul_blockdiag(const BlockMatrix& phi_diag, const BlockMatrix& theta);
BlockMatrix mul_blockdiag_right(const BlockMatrix& theta, const BlockMatrix& phi_diag);
BlockMatrix multiply(const BlockMatrix& a, const BlockMatrix& b);

// Simultaneous block row/column permutation: result block (perm[i], perm[j]) = a(i, j).
BlockMatrix permute(const BlockMatrix& a, const std::vector<int>& perm);

// Grid of constituent block matrices Psi[k][l], each n x n in blocks.
struct BewLayout {
  int outer = 0;
  int inner = 0;
  std::vector<Dims> dims;  // dims[k][i]: block size of constituent row k for subsystem i
};

using BlockGrid = std::vector<std::vector<BlockMatrix>>;

BewLayout bew_layout(const BlockGrid& psi);
Mat flatten(const BlockGrid& psi);
BlockMatrix bew(const BlockGrid& psi, const BewLayout& layout);
std::vector<int> bew_permutation(const BewLayout& layout);

}  // namespace netlmi
