#include "netlmi/io.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace netlmi {

std::string format_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string content_hash(const std::string& data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SolveStatus solve_status_from_string(const std::string& s) {
  for (SolveStatus st : {SolveStatus::Feasible, SolveStatus::Infeasible, SolveStatus::Inaccurate, SolveStatus::Unbounded})
    if (to_string(st) == s) return st;
  throw Error("unknown solve status: " + s);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
  if (!out) throw Error("write failed: " + path);
}

bool SystemFile::operator==(const SystemFile& o) const {
  if (!(system == o.system) || indexing.has_value() != o.indexing.has_value() || qsr.has_value() != o.qsr.has_value())
    return false;
  if (indexing && !(*indexing == *o.indexing)) return false;
  if (qsr && (qsr->Q.dense() != o.qsr->Q.dense() || qsr->S.dense() != o.qsr->S.dense() ||
              qsr->R.dense() != o.qsr->R.dense()))
    return false;
  return true;
}

namespace {

void put_dims(std::ostream& os, const std::string& key, const Dims& d) {
  os << key;
  for (int v : d) os << ' ' << v;
  os << '\n';
}

// "<prefix> i j v..." for every nonzero block.
void put_blocks(std::ostream& os, const std::string& prefix, const BlockMatrix& b) {
  for (int i = 0; i < b.n_block_rows(); ++i)
    for (int j = 0; j < b.n_block_cols(); ++j) {
      const auto blk = b.block(i, j);
      if (blk.size() == 0 || (blk.array() == 0.0).all()) continue;
      os << prefix << ' ' << i + 1 << ' ' << j + 1;
      for (int r = 0; r < blk.rows(); ++r)
        for (int c = 0; c < blk.cols(); ++c) os << ' ' << format_double(blk(r, c));
      os << '\n';
    }
}

struct Line {
  int number = 0;
  std::vector<std::string> tok;
};

std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> out;
  std::istringstream is(text);
  std::string s;
  int no = 0;
  while (std::getline(is, s)) {
    ++no;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s.erase(hash);
    std::istringstream ls(s);
    Line l;
    l.number = no;
    std::string t;
    while (ls >> t) l.tok.push_back(t);
    if (!l.tok.empty()) out.push_back(std::move(l));
  }
  return out;
}

[[noreturn]] void fail(const Line& l, const std::string& why) {
  throw Error("line " + std::to_string(l.number) + ": " + why);
}

double to_double(const Line& l, const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') fail(l, "bad number '" + s + "'");
  return v;
}

int to_int(const Line& l, const std::string& s) {
  int v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) fail(l, "bad integer '" + s + "'");
  return v;
}

Dims read_dims(const Line& l, size_t from) {
  Dims d;
  for (size_t k = from; k < l.tok.size(); ++k) {
    const int v = to_int(l, l.tok[k]);
    if (v < 0) fail(l, "negative dimension");
    d.push_back(v);
  }
  return d;
}

// Reads "i j values" starting at token `from` into block (i, j) of b.
void read_block(const Line& l, size_t from, BlockMatrix& b) {
  if (l.tok.size() < from + 2) fail(l, "block line needs indices");
  const int i = to_int(l, l.tok[from]) - 1, j = to_int(l, l.tok[from + 1]) - 1;
  if (i < 0 || j < 0 || i >= b.n_block_rows() || j >= b.n_block_cols()) fail(l, "block index out of range");
  auto blk = b.block(i, j);
  if (l.tok.size() - from - 2 != static_cast<size_t>(blk.size()))
    fail(l, "block (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") expects " +
                std::to_string(blk.size()) + " values");
  size_t k = from + 2;
  for (int r = 0; r < blk.rows(); ++r)
    for (int c = 0; c < blk.cols(); ++c) blk(r, c) = to_double(l, l.tok[k++]);
}

std::vector<int> read_order(const Line& l) {
  std::vector<int> order;
  for (size_t k = 1; k < l.tok.size(); ++k) order.push_back(to_int(l, l.tok[k]) - 1);
  return order;
}

void put_order(std::ostream& os, const IndexingScheme& s) {
  os << "indexing";
  for (int o : s.order()) os << ' ' << o + 1;
  os << '\n';
}

}  // namespace

std::string save_system(const SystemFile& f) {
  const auto& s = f.system;
  s.validate();
  std::ostringstream os;
  os << "netlmi-system 1\n";
  os << "domain " << to_string(s.domain) << '\n';
  os << "subsystems " << s.size() << '\n';
  put_dims(os, "n", s.n);
  put_dims(os, "p", s.p);
  put_dims(os, "q", s.q);
  put_dims(os, "m", s.m);
  put_dims(os, "l", s.l);
  for (char c : kParamNames) put_blocks(os, std::string("block ") + c, s.param(c));
  if (f.qsr) {
    os << "qsrdims";
    for (int v : f.qsr->Q.row_dims()) os << ' ' << v;
    os << " /";
    for (int v : f.qsr->R.row_dims()) os << ' ' << v;
    os << '\n';
    put_blocks(os, "Q", f.qsr->Q);
    put_blocks(os, "S", f.qsr->S);
    put_blocks(os, "R", f.qsr->R);
  }
  if (f.indexing) put_order(os, *f.indexing);
  return os.str();
}

SystemFile load_system(const std::string& text) {
  const auto lines = tokenize(text);
  if (lines.empty() || lines[0].tok.size() != 2 || lines[0].tok[0] != "netlmi-system" || lines[0].tok[1] != "1")
    throw Error("not a netlmi system file (expected header 'netlmi-system 1')");
  Domain dom = Domain::CT;
  int count = -1;
  std::map<std::string, Dims> dims;
  size_t k = 1;
  for (; k < lines.size(); ++k) {
    const Line& l = lines[k];
    const std::string& key = l.tok[0];
    if (key == "domain" && l.tok.size() == 2) {
      try {
        dom = domain_from_string(l.tok[1]);
      } catch (const Error& e) {
        fail(l, e.what());
      }
    } else if (key == "subsystems" && l.tok.size() == 2) {
      count = to_int(l, l.tok[1]);
    } else if (key == "n" || key == "p" || key == "q" || key == "m" || key == "l") {
      dims[key] = read_dims(l, 1);
      if (static_cast<int>(dims[key].size()) != count) fail(l, "dimension table length differs from subsystem count");
    } else {
      break;
    }
  }
  if (count < 0) throw Error("system file: missing 'subsystems'");
  for (const char* key : {"n", "p", "q", "m", "l"})
    if (!dims.count(key)) throw Error(std::string("system file: missing dimension table '") + key + "'");
  SystemFile f;
  f.system = NetworkedSystem::zeros(dom, dims["n"], dims["p"], dims["q"], dims["m"], dims["l"]);
  auto& s = f.system;
  for (; k < lines.size(); ++k) {
    const Line& l = lines[k];
    const std::string& key = l.tok[0];
    if (key == "block") {
      if (l.tok.size() < 2 || l.tok[1].size() != 1) fail(l, "block line needs a parameter name");
      const char c = l.tok[1][0];
      bool known = false;
      for (char pn : kParamNames) known = known || pn == c;
      if (!known) fail(l, "unknown parameter matrix " + l.tok[1]);
      read_block(l, 2, s.param(c));
    } else if (key == "qsrdims") {
      if (l.tok.size() < 2) fail(l, "qsrdims needs dimensions");
      // qsrdims <out dims...> / <in dims...>
      Dims od, id;
      bool second = false;
      for (size_t t = 1; t < l.tok.size(); ++t) {
        if (l.tok[t] == "/") {
          second = true;
          continue;
        }
        (second ? id : od).push_back(to_int(l, l.tok[t]));
      }
      f.qsr = QsrSpec{BlockMatrix(od, od), BlockMatrix(od, id), BlockMatrix(id, id)};
    } else if (key == "Q" || key == "S" || key == "R") {
      if (!f.qsr) fail(l, "supply-rate block before 'qsrdims'");
      BlockMatrix& b = key == "Q" ? f.qsr->Q : key == "S" ? f.qsr->S : f.qsr->R;
      read_block(l, 1, b);
    } else if (key == "indexing") {
      try {
        f.indexing = IndexingScheme::from_order(read_order(l));
      } catch (const Error& e) {
        fail(l, e.what());
      }
      if (f.indexing->size() != s.size()) fail(l, "indexing length differs from subsystem count");
    } else {
      fail(l, "unexpected '" + key + "'");
    }
  }
  return f;
}

namespace {

struct NamedMatrix {
  const char* name;
  BlockMatrix Design::*member;
};

constexpr NamedMatrix kDesignMatrices[] = {
    {"K", &Design::K},   {"L", &Design::L},   {"Ahat", &Design::Ahat}, {"Bhat", &Design::Bhat},
    {"Ac", &Design::Ac}, {"Bc", &Design::Bc}, {"Cc", &Design::Cc},     {"Dc", &Design::Dc},
    {"P", &Design::P},   {"M", &Design::M},   {"X", &Design::X},       {"Y", &Design::Y},
    {"Mcov", &Design::Mcov}, {"Ncov", &Design::Ncov}};

}  // namespace

std::string save_design(const Design& d) {
  std::ostringstream os;
  os << "netlmi-design 1\n";
  os << "task " << to_string(d.task) << '\n';
  os << "property " << to_string(d.property) << '\n';
  os << "mode " << to_string(d.mode) << '\n';
  os << "domain " << to_string(d.domain) << '\n';
  os << "feasible " << (d.feasible ? 1 : 0) << '\n';
  os << "status " << to_string(d.status) << '\n';
  if (d.gamma) os << "gamma " << format_double(*d.gamma) << '\n';
  os << "certificate_dual " << (d.certificate_dual ? 1 : 0) << '\n';
  os << "failing_subsystem " << d.failing_subsystem + 1 << '\n';
  if (!d.failing_constraint.empty()) os << "failing_constraint " << d.failing_constraint << '\n';
  if (d.indexing.size()) put_order(os, d.indexing);
  if (!d.local_margins.empty()) {
    os << "margins";
    for (double v : d.local_margins) os << ' ' << format_double(v);
    os << '\n';
  }
  os << "newton_steps " << d.newton_steps << '\n';
  if (!d.message.empty()) os << "message " << d.message << '\n';
  for (const auto& nm : kDesignMatrices) {
    const BlockMatrix& b = d.*(nm.member);
    if (b.n_block_rows() == 0 && b.n_block_cols() == 0) continue;
    os << "matrix " << nm.name << '\n';
    put_dims(os, "rows", b.row_dims());
    put_dims(os, "cols", b.col_dims());
    put_blocks(os, "block", b);
    os << "end\n";
  }
  std::istringstream log(d.log.to_text());
  std::string line;
  while (std::getline(log, line)) os << "msg " << line << '\n';
  return os.str();
}

Design load_design(const std::string& text) {
  // the message is free text: keep it out of the tokenizer
  std::string body;
  Design d;
  {
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
      if (line.rfind("message ", 0) == 0)
        d.message = line.substr(8);
      else
        body += line + '\n';
    }
  }
  const auto lines = tokenize(body);
  if (lines.empty() || lines[0].tok.size() != 2 || lines[0].tok[0] != "netlmi-design" || lines[0].tok[1] != "1")
    throw Error("not a netlmi design file (expected header 'netlmi-design 1')");
  std::string log_text;
  for (size_t k = 1; k < lines.size(); ++k) {
    const Line& l = lines[k];
    const std::string& key = l.tok[0];
    const auto one = [&]() -> const std::string& {
      if (l.tok.size() != 2) fail(l, "'" + key + "' takes one value");
      return l.tok[1];
    };
    try {
      if (key == "task") d.task = task_from_string(one());
      else if (key == "property") d.property = property_from_string(one());
      else if (key == "mode") d.mode = mode_from_string(one());
      else if (key == "domain") d.domain = domain_from_string(one());
      else if (key == "feasible") d.feasible = to_int(l, one()) != 0;
      else if (key == "status") d.status = solve_status_from_string(one());
      else if (key == "gamma") d.gamma = to_double(l, one());
      else if (key == "certificate_dual") d.certificate_dual = to_int(l, one()) != 0;
      else if (key == "failing_subsystem") d.failing_subsystem = to_int(l, one()) - 1;
      else if (key == "failing_constraint") d.failing_constraint = one();
      else if (key == "newton_steps") d.newton_steps = to_int(l, one());
      else if (key == "indexing") d.indexing = IndexingScheme::from_order(read_order(l));
      else if (key == "margins") {
        for (size_t t = 1; t < l.tok.size(); ++t) d.local_margins.push_back(to_double(l, l.tok[t]));
      } else if (key == "msg") {
        std::string s;
        for (size_t t = 1; t < l.tok.size(); ++t) s += (t > 1 ? " " : "") + l.tok[t];
        log_text += s + '\n';
      } else if (key == "matrix") {
        const std::string name = one();
        const NamedMatrix* nm = nullptr;
        for (const auto& c : kDesignMatrices)
          if (name == c.name) nm = &c;
        if (!nm) fail(l, "unknown design matrix " + name);
        if (k + 2 >= lines.size() || lines[k + 1].tok[0] != "rows" || lines[k + 2].tok[0] != "cols")
          fail(l, "matrix needs 'rows' and 'cols' lines");
        BlockMatrix b(read_dims(lines[k + 1], 1), read_dims(lines[k + 2], 1));
        k += 3;
        for (; k < lines.size() && lines[k].tok[0] != "end"; ++k) {
          if (lines[k].tok[0] != "block") fail(lines[k], "expected 'block' or 'end'");
          read_block(lines[k], 1, b);
        }
        if (k == lines.size()) fail(l, "matrix without 'end'");
        d.*(nm->member) = std::move(b);
      } else {
        fail(l, "unexpected '" + key + "'");
      }
    } catch (const Error& e) {
      const std::string what = e.what();
      if (what.rfind("line ", 0) == 0) throw;
      fail(l, what);
    }
  }
  d.log = MessageLog::from_text(log_text);
  return d;
}

}  // namespace netlmi
