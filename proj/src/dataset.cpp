#include "wsc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wsc/rng.hpp"

namespace wsc {

namespace {

// Ceiling with a one-nanounit dust guard so values that are integers up to
// floating noise do not get bumped to the next integer.
double ceil_guarded(double x) {
  double c = std::ceil(x - 1e-9);
  return c < 0 ? 0.0 : c;
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == delim) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

Dataset Dataset::from_points(std::vector<std::vector<double>> points, MetricConfig metric) {
  Dataset ds;
  ds.n_ = int(points.size());
  if (ds.n_ == 0) throw PreconditionError("dataset must contain at least one point");
  size_t d = points[0].size();
  for (size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != d)
      throw PreconditionError("point " + std::to_string(i) + " has inconsistent dimension");
    for (double v : points[i])
      if (!std::isfinite(v))
        throw PreconditionError("point " + std::to_string(i) + " has a non-finite coordinate");
  }
  ds.points_ = std::move(points);
  ds.weights_.assign(ds.n_, 1.0);
  ds.metric_ = metric;
  return ds;
}

Dataset Dataset::from_matrix(int n, std::vector<double> row_major, MetricConfig metric) {
  if (n <= 0) throw PreconditionError("matrix dataset must have n >= 1");
  if (row_major.size() != size_t(n) * size_t(n))
    throw PreconditionError("distance matrix must hold n*n entries");
  auto at = [&](int i, int j) { return row_major[size_t(i) * n + j]; };
  for (int i = 0; i < n; ++i) {
    if (std::abs(at(i, i)) > 1e-12)
      throw PreconditionError("distance matrix diagonal must be zero at row " + std::to_string(i));
    for (int j = 0; j < n; ++j) {
      double v = at(i, j);
      if (!std::isfinite(v) || v < 0)
        throw PreconditionError("distance matrix entries must be finite and nonnegative");
      if (std::abs(v - at(j, i)) > 1e-9)
        throw PreconditionError("distance matrix must be symmetric (rows " + std::to_string(i) +
                                "," + std::to_string(j) + ")");
    }
  }
  // Triangle inequality: exhaustive for small n, randomized triples otherwise.
  auto check = [&](int i, int j, int k) {
    if (at(i, k) > at(i, j) + at(j, k) + 1e-9)
      throw PreconditionError("triangle inequality violated for (" + std::to_string(i) + "," +
                              std::to_string(j) + "," + std::to_string(k) + ")");
  };
  if (n <= 300) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) check(i, j, k);
  } else {
    Rng rng(0x7219a3u);
    for (int t = 0; t < 200000; ++t)
      check(int(rng.next_below(n)), int(rng.next_below(n)), int(rng.next_below(n)));
  }
  Dataset ds;
  ds.n_ = n;
  ds.matrix_backed_ = true;
  ds.matrix_ = std::move(row_major);
  ds.weights_.assign(n, 1.0);
  ds.metric_ = metric;
  return ds;
}

double Dataset::total_weight() const {
  double s = 0;
  for (double w : weights_) s += w;
  return s;
}

void Dataset::set_weight(int i, double w) {
  if (!(w > 0) || !std::isfinite(w))
    throw PreconditionError("weights must be positive and finite");
  weights_[i] = w;
}

bool Dataset::unit_weights() const {
  for (double w : weights_)
    if (w != 1.0) return false;
  return true;
}

double Dataset::distance(int i, int j) const {
  double d;
  if (matrix_backed_) {
    d = matrix_[size_t(i) * n_ + j];
  } else if (i == j) {
    d = 0.0;
  } else {
    const auto& a = points_[i];
    const auto& b = points_[j];
    double s = 0;
    for (size_t t = 0; t < a.size(); ++t) {
      double diff = a[t] - b[t];
      s += diff * diff;
    }
    d = std::sqrt(s);
  }
  return metric_.integerize ? ceil_guarded(d) : d;
}

std::vector<int> Dataset::points_in_group(int a, int g) const {
  std::vector<int> out;
  for (int i = 0; i < n_; ++i)
    if (labels_[a][i] == g) out.push_back(i);
  return out;
}

void Dataset::add_attribute(const std::string& name, const std::vector<std::string>& per_point) {
  if (int(per_point.size()) != n_)
    throw PreconditionError("attribute '" + name + "' must label every point");
  std::vector<std::string> names;
  std::vector<int> ids(n_);
  for (int i = 0; i < n_; ++i) {
    auto it = std::find(names.begin(), names.end(), per_point[i]);
    if (it == names.end()) {
      ids[i] = int(names.size());
      names.push_back(per_point[i]);
    } else {
      ids[i] = int(it - names.begin());
    }
  }
  attribute_names_.push_back(name);
  group_names_.push_back(std::move(names));
  labels_.push_back(std::move(ids));
}

double true_distance(const Dataset& ds, int i, int j) { return ds.distance(i, j); }

double diameter(const Dataset& ds) {
  double best = 0;
  for (int i = 0; i < ds.size(); ++i)
    for (int j = i + 1; j < ds.size(); ++j) best = std::max(best, ds.distance(i, j));
  return best;
}

double aspect_ratio(const Dataset& ds) {
  double mx = 0, mn = 0;
  bool seen = false;
  for (int i = 0; i < ds.size(); ++i)
    for (int j = i + 1; j < ds.size(); ++j) {
      double d = ds.distance(i, j);
      if (d <= 0) continue;
      mx = std::max(mx, d);
      if (!seen || d < mn) mn = d, seen = true;
    }
  return seen ? mx / mn : 1.0;
}

Dataset load_dataset(const std::string& csv_path, const CsvSchema& schema, MetricConfig metric) {
  std::ifstream in(csv_path);
  if (!in) throw LoadError("cannot open '" + csv_path + "'");
  std::string line;
  if (!std::getline(in, line)) throw LoadError("'" + csv_path + "' is empty");
  std::vector<std::string> header = split_line(line, schema.delimiter);
  for (auto& h : header) h = trim(h);

  auto column_of = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw LoadError("'" + csv_path + "' has no column named '" + name + "'");
    return int(it - header.begin());
  };

  std::vector<int> group_cols;
  for (const auto& g : schema.group_columns) group_cols.push_back(column_of(g));
  std::vector<int> feature_cols;
  if (!schema.feature_columns.empty()) {
    for (const auto& f : schema.feature_columns) feature_cols.push_back(column_of(f));
  } else {
    for (int c = 0; c < int(header.size()); ++c)
      if (std::find(group_cols.begin(), group_cols.end(), c) == group_cols.end())
        feature_cols.push_back(c);
  }
  if (feature_cols.empty()) throw LoadError("'" + csv_path + "' has no feature columns");

  std::vector<std::vector<double>> points;
  std::vector<std::vector<std::string>> group_values(group_cols.size());
  long long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_line(line, schema.delimiter);
    if (cells.size() != header.size())
      throw LoadError(csv_path + ":" + std::to_string(row) + ": expected " +
                      std::to_string(header.size()) + " cells, got " + std::to_string(cells.size()));
    std::vector<double> pt;
    for (int c : feature_cols) {
      const std::string cell = trim(cells[c]);
      char* end = nullptr;
      double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(v))
        throw LoadError(csv_path + ":" + std::to_string(row) + ": column '" + header[c] +
                        "' is not a finite number: '" + cell + "'");
      pt.push_back(v);
    }
    points.push_back(std::move(pt));
    for (size_t t = 0; t < group_cols.size(); ++t)
      group_values[t].push_back(trim(cells[group_cols[t]]));
  }
  if (points.empty()) throw LoadError("'" + csv_path + "' has a header but no rows");

  Dataset ds = Dataset::from_points(std::move(points), metric);
  for (size_t t = 0; t < group_cols.size(); ++t)
    ds.add_attribute(header[group_cols[t]], group_values[t]);
  return ds;
}

Dataset load_matrix_dataset(const std::string& path, MetricConfig metric) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open '" + path + "'");
  long long n = 0;
  if (!(in >> n) || n <= 0) throw LoadError("'" + path + "' must start with the point count");
  std::vector<double> m;
  m.reserve(size_t(n) * n);
  double v;
  while (in >> v) m.push_back(v);
  if (m.size() != size_t(n) * n)
    throw LoadError("'" + path + "' holds " + std::to_string(m.size()) + " entries, expected " +
                    std::to_string(n * n));
  try {
    return Dataset::from_matrix(int(n), std::move(m), metric);
  } catch (const PreconditionError& e) {
    throw LoadError("'" + path + "': " + e.what());
  }
}

void write_csv(const Dataset& ds, const std::string& path) {
  if (ds.matrix_backed()) throw PreconditionError("matrix-backed datasets have no CSV form");
  std::ostringstream out;
  for (int c = 0; c < ds.dim(); ++c) out << (c ? "," : "") << "f" << c;
  for (int a = 0; a < ds.attribute_count(); ++a) out << "," << ds.attribute_name(a);
  out << "\n";
  char buf[64];
  for (int i = 0; i < ds.size(); ++i) {
    for (int c = 0; c < ds.dim(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", ds.point(i)[c]);
      out << (c ? "," : "") << buf;
    }
    for (int a = 0; a < ds.attribute_count(); ++a)
      out << "," << ds.group_name(a, ds.group_of(i, a));
    out << "\n";
  }
  std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw LoadError("cannot write '" + tmp + "'");
    f << out.str();
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw LoadError("cannot move '" + tmp + "' to '" + path + "'");
}

}  // namespace wsc
