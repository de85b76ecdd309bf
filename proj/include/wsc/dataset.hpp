#pragma once

#include <string>
#include <vector>

#include "wsc/error.hpp"

namespace wsc {

// Distance handling shared by every consumer of a Dataset.
struct MetricConfig {
  // Apply ceil() to every distance. Ceiling (unlike round-to-nearest)
  // preserves the triangle inequality, so integerized datasets stay metric.
  bool integerize = false;
  // When > 0, consumers may warn if max/min-nonzero distance exceeds the cap.
  double aspect_ratio_cap = 0.0;
};

struct CsvSchema {
  // Empty feature list: every column that is not a group column is a feature.
  std::vector<std::string> feature_columns;
  // Each group column defines one attribute, i.e. one disjoint partition of
  // the points into named groups.
  std::vector<std::string> group_columns;
  char delimiter = ',';
};

// Point set with either coordinate backing (Euclidean distances computed on
// demand) or an explicit symmetric distance matrix. Points carry positive
// weights (default 1) and optional group labels, one per attribute.
class Dataset {
 public:
  Dataset() = default;

  static Dataset from_points(std::vector<std::vector<double>> points,
                             MetricConfig metric = {});
  // Validates symmetry, zero diagonal, non-negativity and (exhaustively for
  // small n, sampled otherwise) the triangle inequality.
  static Dataset from_matrix(int n, std::vector<double> row_major,
                             MetricConfig metric = {});

  int size() const { return n_; }
  int dim() const { return points_.empty() ? 0 : int(points_[0].size()); }
  bool matrix_backed() const { return matrix_backed_; }

  const std::vector<double>& point(int i) const { return points_[i]; }

  double weight(int i) const { return weights_[i]; }
  double total_weight() const;
  void set_weight(int i, double w);
  bool unit_weights() const;

  const MetricConfig& metric() const { return metric_; }
  void set_metric(MetricConfig m) { metric_ = m; }

  double distance(int i, int j) const;

  // Attributes and groups.
  int attribute_count() const { return int(attribute_names_.size()); }
  const std::string& attribute_name(int a) const { return attribute_names_[a]; }
  int group_count(int a) const { return int(group_names_[a].size()); }
  const std::string& group_name(int a, int g) const { return group_names_[a][g]; }
  int group_of(int point, int a) const { return labels_[a][point]; }
  std::vector<int> points_in_group(int a, int g) const;
  // Per-point group names; unseen names allocate new group ids.
  void add_attribute(const std::string& name, const std::vector<std::string>& per_point);

 private:
  int n_ = 0;
  bool matrix_backed_ = false;
  std::vector<std::vector<double>> points_;
  std::vector<double> matrix_;
  std::vector<double> weights_;
  MetricConfig metric_;
  std::vector<std::string> attribute_names_;
  std::vector<std::vector<std::string>> group_names_;
  std::vector<std::vector<int>> labels_;
};

// Free-function forms used throughout; distance semantics live in one place.
double true_distance(const Dataset& ds, int i, int j);
double diameter(const Dataset& ds);
// max distance / min nonzero distance; 1 for degenerate inputs. O(n^2).
double aspect_ratio(const Dataset& ds);

Dataset load_dataset(const std::string& csv_path, const CsvSchema& schema,
                     MetricConfig metric = {});
Dataset load_matrix_dataset(const std::string& path, MetricConfig metric = {});
void write_csv(const Dataset& ds, const std::string& path);

}  // namespace wsc
