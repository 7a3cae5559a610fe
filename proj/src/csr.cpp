#include "eqs/csr.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "eqs/errors.hpp"

namespace eqs {

void CsrMatrix::apply(const Vec& x, Vec& y) const {
  if (x.size() != n_cols) throw NumericalError("CsrMatrix::apply: dimension mismatch");
  y.resize(n_rows);
  for (int i = 0; i < n_rows; ++i) {
    double s = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += values[k] * x[col_idx[k]];
    y[i] = s;
  }
}

Vec CsrMatrix::apply(const Vec& x) const {
  Vec y;
  apply(x, y);
  return y;
}

double CsrMatrix::coeff(int i, int j) const {
  const int* begin = col_idx.data() + row_ptr[i];
  const int* end = col_idx.data() + row_ptr[i + 1];
  const int* it = std::lower_bound(begin, end, j);
  if (it != end && *it == j) return values[it - col_idx.data()];
  return 0.0;
}

double* CsrMatrix::find(int i, int j) {
  const int* begin = col_idx.data() + row_ptr[i];
  const int* end = col_idx.data() + row_ptr[i + 1];
  const int* it = std::lower_bound(begin, end, j);
  if (it != end && *it == j) return values.data() + (it - col_idx.data());
  return nullptr;
}

Vec CsrMatrix::diagonal() const {
  Vec d(n_rows);
  for (int i = 0; i < n_rows; ++i) d[i] = coeff(i, i);
  return d;
}

CsrMatrix CsrMatrix::transposed() const {
  CsrMatrix t;
  t.n_rows = n_cols;
  t.n_cols = n_rows;
  t.row_ptr.assign(n_cols + 1, 0);
  for (int c : col_idx) ++t.row_ptr[c + 1];
  for (int i = 0; i < n_cols; ++i) t.row_ptr[i + 1] += t.row_ptr[i];
  t.col_idx.resize(col_idx.size());
  t.values.resize(values.size());
  std::vector<int> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
  for (int i = 0; i < n_rows; ++i) {
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      int pos = next[col_idx[k]]++;
      t.col_idx[pos] = i;
      t.values[pos] = values[k];
    }
  }
  return t;  // rows come out sorted because source rows are scanned in order
}

Mat CsrMatrix::to_dense() const {
  Mat d = Mat::Zero(n_rows, n_cols);
  for (int i = 0; i < n_rows; ++i)
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) d(i, col_idx[k]) += values[k];
  return d;
}

double CsrMatrix::symmetry_error() const {
  if (n_rows != n_cols) return std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double err = 0.0;
  for (int i = 0; i < n_rows; ++i)
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      err = std::max(err, std::abs(values[k] - coeff(col_idx[k], i)));
  return err / scale;
}

CsrMatrix CsrMatrix::from_triplets(int n_rows, int n_cols,
                                   std::vector<std::array<int, 2>> pattern,
                                   const std::vector<double>& vals) {
  std::vector<int> order(pattern.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return pattern[a] < pattern[b];
  });

  CsrMatrix m;
  m.n_rows = n_rows;
  m.n_cols = n_cols;
  m.row_ptr.assign(n_rows + 1, 0);
  int last_i = -1, last_j = -1;
  for (int o : order) {
    int i = pattern[o][0], j = pattern[o][1];
    if (i == last_i && j == last_j) {
      m.values.back() += vals[o];
      continue;
    }
    ++m.row_ptr[i + 1];
    m.col_idx.push_back(j);
    m.values.push_back(vals[o]);
    last_i = i;
    last_j = j;
  }
  for (int i = 0; i < n_rows; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
  return m;
}

CsrMatrix CsrMatrix::from_pattern(std::vector<std::vector<int>> row_cols) {
  CsrMatrix m;
  m.n_rows = static_cast<int>(row_cols.size());
  m.n_cols = m.n_rows;
  m.row_ptr.assign(m.n_rows + 1, 0);
  for (int i = 0; i < m.n_rows; ++i) m.row_ptr[i + 1] = m.row_ptr[i] + static_cast<int>(row_cols[i].size());
  m.col_idx.reserve(m.row_ptr.back());
  for (auto& cols : row_cols) m.col_idx.insert(m.col_idx.end(), cols.begin(), cols.end());
  m.values.assign(m.col_idx.size(), 0.0);
  return m;
}

CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b) {
  if (a.n_cols != b.n_rows) throw NumericalError("csr multiply: dimension mismatch");
  CsrMatrix c;
  c.n_rows = a.n_rows;
  c.n_cols = b.n_cols;
  c.row_ptr.assign(a.n_rows + 1, 0);

  std::vector<double> accum(b.n_cols, 0.0);
  std::vector<int> marker(b.n_cols, -1);
  std::vector<int> cols;
  for (int i = 0; i < a.n_rows; ++i) {
    cols.clear();
    for (int ka = a.row_ptr[i]; ka < a.row_ptr[i + 1]; ++ka) {
      const int k = a.col_idx[ka];
      const double av = a.values[ka];
      for (int kb = b.row_ptr[k]; kb < b.row_ptr[k + 1]; ++kb) {
        const int j = b.col_idx[kb];
        if (marker[j] != i) {
          marker[j] = i;
          accum[j] = 0.0;
          cols.push_back(j);
        }
        accum[j] += av * b.values[kb];
      }
    }
    std::sort(cols.begin(), cols.end());
    for (int j : cols) {
      c.col_idx.push_back(j);
      c.values.push_back(accum[j]);
    }
    c.row_ptr[i + 1] = static_cast<int>(c.col_idx.size());
  }
  return c;
}

CsrMatrix add(double alpha, const CsrMatrix& a, double beta, const CsrMatrix& b) {
  if (a.n_rows != b.n_rows || a.n_cols != b.n_cols)
    throw NumericalError("csr add: dimension mismatch");
  CsrMatrix c;
  c.n_rows = a.n_rows;
  c.n_cols = a.n_cols;
  c.row_ptr.assign(a.n_rows + 1, 0);
  for (int i = 0; i < a.n_rows; ++i) {
    int ka = a.row_ptr[i], kb = b.row_ptr[i];
    const int ea = a.row_ptr[i + 1], eb = b.row_ptr[i + 1];
    while (ka < ea || kb < eb) {
      int ja = ka < ea ? a.col_idx[ka] : c.n_cols;
      int jb = kb < eb ? b.col_idx[kb] : c.n_cols;
      if (ja == jb) {
        c.col_idx.push_back(ja);
        c.values.push_back(alpha * a.values[ka++] + beta * b.values[kb++]);
      } else if (ja < jb) {
        c.col_idx.push_back(ja);
        c.values.push_back(alpha * a.values[ka++]);
      } else {
        c.col_idx.push_back(jb);
        c.values.push_back(beta * b.values[kb++]);
      }
    }
    c.row_ptr[i + 1] = static_cast<int>(c.col_idx.size());
  }
  return c;
}

CsrMatrix extract_block(const CsrMatrix& a, const std::vector<int>& rows,
                        const std::vector<int>& cols) {
  std::vector<int> col_map(a.n_cols, -1);
  for (int c = 0; c < static_cast<int>(cols.size()); ++c) col_map[cols[c]] = c;

  CsrMatrix blk;
  blk.n_rows = static_cast<int>(rows.size());
  blk.n_cols = static_cast<int>(cols.size());
  blk.row_ptr.assign(blk.n_rows + 1, 0);
  for (int r = 0; r < blk.n_rows; ++r) {
    const int i = rows[r];
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const int c = col_map[a.col_idx[k]];
      if (c >= 0) {
        blk.col_idx.push_back(c);
        blk.values.push_back(a.values[k]);
      }
    }
    blk.row_ptr[r + 1] = static_cast<int>(blk.col_idx.size());
    // source row is sorted; col_map is monotone only for sorted `cols`,
    // so restore ordering per row explicitly
    int begin = blk.row_ptr[r], end = blk.row_ptr[r + 1];
    std::vector<std::pair<int, double>> tmp;
    tmp.reserve(end - begin);
    for (int k = begin; k < end; ++k) tmp.emplace_back(blk.col_idx[k], blk.values[k]);
    std::sort(tmp.begin(), tmp.end());
    for (int k = begin; k < end; ++k) {
      blk.col_idx[k] = tmp[k - begin].first;
      blk.values[k] = tmp[k - begin].second;
    }
  }
  return blk;
}

void write_matrix_market(const CsrMatrix& a, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open for writing: " + path);
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << a.n_rows << " " << a.n_cols << " " << a.nnz() << "\n";
  char buf[64];
  for (int i = 0; i < a.n_rows; ++i)
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i + 1, a.col_idx[k] + 1, a.values[k]);
      os << buf;
    }
}

}  // namespace eqs
