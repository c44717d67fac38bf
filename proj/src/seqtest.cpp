#include "netlmi/seqtest.hpp"

#include <algorithm>
#include <sstream>

namespace netlmi {

std::string Message::payload() const {
  std::ostringstream os;
  os << (kind == Kind::Tilde ? "tilde_block(" : "raw_block(") << a + 1 << "," << b + 1 << ")";
  return os.str();
}

bool Message::operator==(const Message& o) const {
  return sender == o.sender && receiver == o.receiver && kind == o.kind && a == o.a && b == o.b &&
         rows == o.rows && cols == o.cols && cost == o.cost;
}

std::string MessageLog::to_text() const {
  std::ostringstream os;
  for (const auto& e : entries)
    os << e.sender + 1 << ' ' << e.receiver + 1 << ' ' << e.payload() << ' ' << e.rows << 'x' << e.cols << ' '
       << e.cost << '\n';
  return os.str();
}

MessageLog MessageLog::from_text(const std::string& text) {
  MessageLog log;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Message m;
    std::string payload, shape;
    ls >> m.sender >> m.receiver >> payload >> shape >> m.cost;
    if (!ls) throw Error("message log: malformed line: " + line);
    m.sender -= 1;
    m.receiver -= 1;
    m.kind = payload.rfind("tilde_block(", 0) == 0 ? Message::Kind::Tilde : Message::Kind::Raw;
    auto lp = payload.find('('), cm = payload.find(','), rp = payload.find(')');
    m.a = std::stoi(payload.substr(lp + 1, cm - lp - 1)) - 1;
    m.b = std::stoi(payload.substr(cm + 1, rp - cm - 1)) - 1;
    auto x = shape.find('x');
    m.rows = std::stoi(shape.substr(0, x));
    m.cols = std::stoi(shape.substr(x + 1));
    log.entries.push_back(m);
  }
  return log;
}

SequentialFactor::SequentialFactor(const Topology* topo, bool skip_redundant)
    : topo_(topo), skip_(skip_redundant && topo != nullptr) {}

int SequentialFactor::skip_start(int i, int j) const {
  if (!skip_) return 0;
  return std::max(topo_->min_combined_closed(i), topo_->min_combined_closed(j));
}

Mat SequentialFactor::leading_product() const {
  const int n = size();
  auto off = offsets(dims_);
  Mat a = Mat::Zero(off.back(), off.back());
  for (int r = 0; r < n; ++r)
    for (int c = 0; c <= r; ++c) a.block(off[r], off[c], dims_[r], dims_[c]) = rows_[r].blocks[c];
  Mat dat = Mat::Zero(off.back(), off.back());  // D A^T
  for (int k = 0; k < n; ++k)
    dat.middleRows(off[k], dims_[k]) = inv_[k].solve(Mat(a.middleCols(off[k], dims_[k]).transpose()));
  Mat out = a * dat;
  return 0.5 * (out + out.transpose());
}

double SequentialFactor::push_row(const std::vector<Mat>& wrow) {
  const int i = size();
  if (static_cast<int>(wrow.size()) != i + 1) throw Error("sequential test: row has wrong block count");
  if (topo_ && i >= topo_->size()) throw Error("sequential test: more rows than subsystems");
  const int di = static_cast<int>(wrow[i].rows());
  TildeRow row;
  row.owner = i;
  row.blocks.resize(i + 1);
  for (int j = 0; j < i; ++j) {
    Mat t = wrow[j];
    for (int k = skip_start(i, j); k < j; ++k)
      t -= row.blocks[k] * inv_[k].solve(rows_[j].blocks[k].transpose());
    row.blocks[j] = t;
  }
  Mat tii = wrow[i];
  for (int k = skip_start(i, i); k < i; ++k) tii -= row.blocks[k] * inv_[k].solve(row.blocks[k].transpose());
  tii = 0.5 * (tii + tii.transpose());
  row.blocks[i] = tii;

  for (int j = 0; j < i; ++j) {
    if (skip_ && skip_start(i, j) > j) continue;  // W~_ij = W_ij = 0: nothing to exchange
    const bool requested = !topo_ || topo_->has_out(i, j);
    auto add = [&](Message::Kind kind, int a, int b, int r, int c) {
      Message m;
      m.sender = j;
      m.receiver = i;
      m.kind = kind;
      m.a = a;
      m.b = b;
      m.rows = r;
      m.cols = c;
      m.cost = static_cast<double>(r) * c;
      log_.entries.push_back(m);
    };
    if (requested) add(Message::Kind::Raw, i, j, di, dims_[j]);
    add(Message::Kind::Tilde, j, j, dims_[j], dims_[j]);
    for (int k = skip_start(i, j); k < j; ++k) add(Message::Kind::Tilde, j, k, dims_[j], dims_[k]);
  }

  const double me = min_eig(tii);
  last_pd_ = me > kPdTol;
  Eigen::LLT<Mat> llt(tii);
  if (last_pd_ && llt.info() == Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Mat> es(tii, Eigen::EigenvaluesOnly);
    const double cond = es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
    if (cond > kCondWarn) warnings_.push_back("ill-conditioned W~_" + std::to_string(i + 1));
  } else {
    last_pd_ = false;
  }
  rows_.push_back(std::move(row));
  inv_.push_back(std::move(llt));
  dims_.push_back(di);
  return me;
}

double symmetry_tolerance(const Mat& w) { return 1e-9 * std::max(1.0, inf_norm(w)); }

PdResult sequential_pd_test(const BlockMatrix& w, const Topology* topo, bool skip_redundant, bool compute_all) {
  const int n = w.n_block_rows();
  if (n != w.n_block_cols() || w.row_dims() != w.col_dims()) throw Error("sequential test: W is not square-block");
  if (topo && topo->size() != n) throw Error("sequential test: topology size mismatch");
  if (inf_norm(w.dense() - w.dense().transpose()) > symmetry_tolerance(w.dense()))
    throw Error("sequential test: W is not symmetric");
  PdResult res;
  SequentialFactor f(topo, skip_redundant);
  res.pd = true;
  for (int i = 0; i < n; ++i) {
    std::vector<Mat> wrow(i + 1);
    for (int j = 0; j <= i; ++j) wrow[j] = w.block(i, j);
    f.push_row(wrow);
    if (!f.last_pd()) {
      if (!res.failing_index) res.failing_index = i;
      res.pd = false;
      const Mat& t = f.rows().back().blocks.back();
      Eigen::LLT<Mat> llt(t);
      if (llt.info() != Eigen::Success && std::abs(min_eig(t)) <= kPdTol) res.singular = true;
      if (!compute_all) break;
      if (res.singular) break;
    }
  }
  res.rows = f.rows();
  res.log = f.log();
  res.warnings = f.warnings();
  return res;
}

BlockMatrix residual(const BlockMatrix& w, int i) {
  const int n = w.n_block_rows();
  if (i < 0 || i >= n) throw Error("residual: index out of range");
  Dims rd, cd;
  for (int k = 0; k < n; ++k)
    if (k != i) {
      rd.push_back(w.row_dims()[k]);
      cd.push_back(w.col_dims()[k]);
    }
  BlockMatrix r(rd, cd);
  for (int a = 0, ra = 0; a < n; ++a) {
    if (a == i) continue;
    for (int b = 0, rb = 0; b < n; ++b) {
      if (b == i) continue;
      r.block(ra, rb) = w.block(a, b);
      ++rb;
    }
    ++ra;
  }
  return r;
}

namespace {

Eigen::FullPivLU<Mat> checked_lu(const Mat& m, double cond_max, const char* what) {
  Eigen::FullPivLU<Mat> lu(m);
  if (m.rows() != m.cols() || !lu.isInvertible()) throw Error(std::string("enforce_equality: singular block in ") + what);
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) <= 0.0 || s(0) / s(s.size() - 1) > cond_max)
    throw Error(std::string("enforce_equality: ill-conditioned block in ") + what);
  return lu;
}

}  // namespace

BlockMatrix enforce_equality(const BlockMatrix& a, const BlockMatrix& b, const BlockMatrix& c,
                             EqualityStructure structure, double cond_max) {
  const int n = c.n_block_rows();
  if (a.n_block_rows() != n || b.n_block_cols() != c.n_block_cols() || !a.is_block_diagonal() ||
      !b.is_block_diagonal())
    throw Error("enforce_equality: A and B must be conformable block-diagonal matrices");
  if (structure == EqualityStructure::BlockDiag && !c.is_block_diagonal())
    throw Error("enforce_equality: C violates the block-diagonal structure");
  std::vector<Eigen::FullPivLU<Mat>> la, lb;
  for (int i = 0; i < n; ++i) la.push_back(checked_lu(a.block(i, i), cond_max, "A"));
  for (int j = 0; j < b.n_block_rows(); ++j) lb.push_back(checked_lu(b.block(j, j), cond_max, "B"));
  BlockMatrix x(a.col_dims(), b.row_dims());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < c.n_block_cols(); ++j) {
      if (structure == EqualityStructure::BlockDiag && i != j) continue;
      if (is_zero_block(c.block(i, j), 0.0)) continue;
      Mat t = la[i].solve(Mat(c.block(i, j)));
      x.block(i, j) = -(t * Mat(lb[j].inverse()));
    }
  return x;
}

std::map<std::pair<int, int>, int> comm_count(const MessageLog& log) {
  std::map<std::pair<int, int>, int> out;
  for (const auto& e : log.entries) out[{e.sender, e.receiver}] += 1;
  return out;
}

std::map<std::pair<int, int>, int> comm_count(const PdResult& result) { return comm_count(result.log); }

}  // namespace netlmi
