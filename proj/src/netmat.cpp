#include "netlmi/netmat.hpp"

#include "netlmi/topology.hpp"

namespace netlmi {

BlockMatrix::BlockMatrix(Dims row_dims, Dims col_dims)
    : row_dims_(std::move(row_dims)), col_dims_(std::move(col_dims)) {
  ro_ = offsets(row_dims_);
  co_ = offsets(col_dims_);
  data_ = Mat::Zero(ro_.back(), co_.back());
}

BlockMatrix::BlockMatrix(Dims row_dims, Dims col_dims, Mat data)
    : BlockMatrix(std::move(row_dims), std::move(col_dims)) {
  if (data.rows() != data_.rows() || data.cols() != data_.cols())
    throw Error("BlockMatrix: data shape does not match block dimensions");
  data_ = std::move(data);
}

BlockMatrix BlockMatrix::identity(const Dims& dims) {
  BlockMatrix b(dims, dims);
  b.data_.setIdentity();
  return b;
}

BlockMatrix BlockMatrix::block_diag(const std::vector<Mat>& blocks) {
  Dims r, c;
  for (const auto& m : blocks) {
    r.push_back(static_cast<int>(m.rows()));
    c.push_back(static_cast<int>(m.cols()));
  }
  BlockMatrix b(r, c);
  for (size_t i = 0; i < blocks.size(); ++i) b.set_block(i, i, blocks[i]);
  return b;
}

Eigen::Block<Mat> BlockMatrix::block(int i, int j) {
  return data_.block(ro_[i], co_[j], row_dims_[i], col_dims_[j]);
}

Eigen::Block<const Mat> BlockMatrix::block(int i, int j) const {
  return data_.block(ro_[i], co_[j], row_dims_[i], col_dims_[j]);
}

void BlockMatrix::set_block(int i, int j, const Mat& m) {
  if (m.rows() != row_dims_[i] || m.cols() != col_dims_[j])
    throw Error("BlockMatrix::set_block: block shape mismatch");
  block(i, j) = m;
}

bool BlockMatrix::is_block_diagonal(double tol) const {
  for (int i = 0; i < n_block_rows(); ++i)
    for (int j = 0; j < n_block_cols(); ++j)
      if (i != j && !is_zero_block(block(i, j), tol)) return false;
  return true;
}

bool is_network_matrix(const BlockMatrix& theta, const Topology& topo, double tol) {
  const int n = topo.size();
  if (theta.n_block_rows() != n || theta.n_block_cols() != n)
    throw Error("is_network_matrix: block count does not match topology");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!topo.coupled(i, j) && !is_zero_block(theta.block(i, j), tol)) return false;
  return true;
}

BlockMatrix transpose(const BlockMatrix& a) {
  return BlockMatrix(a.col_dims(), a.row_dims(), a.dense().transpose());
}

BlockMatrix axpy(double alpha, const BlockMatrix& a, double beta, const BlockMatrix& b) {
  if (!a.same_structure(b)) throw Error("axpy: non-conformable block structures");
  return BlockMatrix(a.row_dims(), a.col_dims(), alpha * a.dense() + beta * b.dense());
}

BlockMatrix multiply(const BlockMatrix& a, const BlockMatrix& b) {
  if (a.col_dims() != b.row_dims()) throw Error("multiply: non-conformable block structures");
  return BlockMatrix(a.row_dims(), b.col_dims(), a.dense() * b.dense());
}

BlockMatrix mul_blockdiag(const BlockMatrix& phi_diag, const BlockMatrix& theta) {
  if (!phi_diag.is_block_diagonal()) throw Error("mul_blockdiag: left factor is not block diagonal");
  if (phi_diag.col_dims() != theta.row_dims()) throw Error("mul_blockdiag: non-conformable blocks");
  BlockMatrix r(phi_diag.row_dims(), theta.col_dims());
  for (int i = 0; i < theta.n_block_rows(); ++i)
    for (int j = 0; j < theta.n_block_cols(); ++j) r.block(i, j) = phi_diag.block(i, i) * theta.block(i, j);
  return r;
}

BlockMatrix mul_blockdiag_right(const BlockMatrix& theta, const BlockMatrix& phi_diag) {
  if (!phi_diag.is_block_diagonal()) throw Error("mul_blockdiag_right: right factor is not block diagonal");
  if (theta.col_dims() != phi_diag.row_dims()) throw Error("mul_blockdiag_right: non-conformable blocks");
  BlockMatrix r(theta.row_dims(), phi_diag.col_dims());
  for (int i = 0; i < theta.n_block_rows(); ++i)
    for (int j = 0; j < theta.n_block_cols(); ++j) r.block(i, j) = theta.block(i, j) * phi_diag.block(j, j);
  return r;
}

BlockMatrix permute(const BlockMatrix& a, const std::vector<int>& perm) {
  const int nr = a.n_block_rows(), nc = a.n_block_cols();
  if (static_cast<int>(perm.size()) != nr || nr != nc) throw Error("permute: permutation size mismatch");
  Dims rd(nr), cd(nc);
  for (int i = 0; i < nr; ++i) {
    rd[perm[i]] = a.row_dims()[i];
    cd[perm[i]] = a.col_dims()[i];
  }
  BlockMatrix r(rd, cd);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nc; ++j) r.block(perm[i], perm[j]) = a.block(i, j);
  return r;
}

BewLayout bew_layout(const BlockGrid& psi) {
  BewLayout lay;
  lay.outer = static_cast<int>(psi.size());
  if (lay.outer == 0) return lay;
  lay.inner = psi[0][0].n_block_rows();
  for (int k = 0; k < lay.outer; ++k) {
    if (static_cast<int>(psi[k].size()) != lay.outer) throw Error("bew: grid is not square");
    lay.dims.push_back(psi[k][k].row_dims());
  }
  for (int k = 0; k < lay.outer; ++k)
    for (int l = 0; l < lay.outer; ++l) {
      const auto& b = psi[k][l];
      if (b.n_block_rows() != lay.inner || b.n_block_cols() != lay.inner)
        throw Error("bew: constituents do not share the inner block structure");
      if (b.row_dims() != lay.dims[k] || b.col_dims() != lay.dims[l])
        throw Error("bew: inconsistent constituent block dimensions");
    }
  return lay;
}

Mat flatten(const BlockGrid& psi) {
  const int m = static_cast<int>(psi.size());
  std::vector<int> sizes(m);
  for (int k = 0; k < m; ++k) sizes[k] = static_cast<int>(psi[k][k].dense().rows());
  auto off = offsets(sizes);
  Mat out = Mat::Zero(off.back(), off.back());
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < m; ++l) out.block(off[k], off[l], sizes[k], sizes[l]) = psi[k][l].dense();
  return out;
}

// Maps each scalar row of the flattened grid to its row in the BEW form.
std::vector<int> bew_permutation(const BewLayout& lay) {
  std::vector<std::vector<int>> koff(lay.outer);
  for (int k = 0; k < lay.outer; ++k) koff[k] = offsets(lay.dims[k]);
  std::vector<int> kbase(lay.outer + 1, 0);
  for (int k = 0; k < lay.outer; ++k) kbase[k + 1] = kbase[k] + koff[k].back();
  std::vector<int> perm(kbase.back());
  int pos = 0;
  for (int i = 0; i < lay.inner; ++i)
    for (int k = 0; k < lay.outer; ++k)
      for (int r = 0; r < lay.dims[k][i]; ++r) perm[kbase[k] + koff[k][i] + r] = pos++;
  return perm;
}

BlockMatrix bew(const BlockGrid& psi, const BewLayout& lay) {
  if (lay.outer == 0) return BlockMatrix();
  Mat flat = flatten(psi);
  auto perm = bew_permutation(lay);
  Mat out(flat.rows(), flat.cols());
  for (int a = 0; a < flat.rows(); ++a)
    for (int b = 0; b < flat.cols(); ++b) out(perm[a], perm[b]) = flat(a, b);
  Dims d(lay.inner, 0);
  for (int i = 0; i < lay.inner; ++i)
    for (int k = 0; k < lay.outer; ++k) d[i] += lay.dims[k][i];
  return BlockMatrix(d, d, out);
}

}  // namespace netlmi
