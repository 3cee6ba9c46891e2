#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pauc {

// Dense row-major feature table.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::size_t cols, std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> data() const noexcept { return data_; }

  void push_row(std::span<const double> values);
  Matrix select(std::span<const std::size_t> indices) const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class Label { Negative, Positive };

// Labeled samples split by class. Order within each class is the insertion
// order and is preserved by every transformation below.
class Dataset {
 public:
  // Throws EmptyClass if either class is empty and DimensionMismatch if the
  // two matrices (or the feature names) disagree on the dimension.
  Dataset(Matrix positives, Matrix negatives, std::vector<std::string> feature_names = {});

  const Matrix& positives() const noexcept { return positives_; }
  const Matrix& negatives() const noexcept { return negatives_; }
  const std::vector<std::string>& feature_names() const noexcept { return names_; }

  std::size_t dim() const noexcept { return positives_.cols(); }
  std::size_t n_pos() const noexcept { return positives_.rows(); }
  std::size_t n_neg() const noexcept { return negatives_.rows(); }

  bool operator==(const Dataset&) const = default;

 private:
  Matrix positives_;
  Matrix negatives_;
  std::vector<std::string> names_;
};

struct CsvOptions {
  std::string label_column = "label";
  std::string positive_value = "1";
  std::string negative_value = "0";  // only used when writing
};

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& opts = {});
void write_csv(const Dataset& ds, const std::filesystem::path& path, const CsvOptions& opts = {});

// Shortest decimal representation that parses back to the same double.
std::string format_real(double value);

// Per-class seeded shuffle followed by a floor(train_fraction * n) cut.
// Members keep their original relative order inside each part.
std::pair<Dataset, Dataset> split_stratified(const Dataset& ds, double train_fraction,
                                             std::uint64_t seed);

constexpr double kStddevFloor = 1e-12;

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;

  std::size_t dim() const noexcept { return mean.size(); }
  void apply_inplace(std::span<double> x) const;
  bool operator==(const Standardizer&) const = default;
};

// Population statistics over positives and negatives together.
Standardizer fit_standardizer(const Dataset& ds);
Dataset apply_standardizer(const Standardizer& st, const Dataset& ds);

// Two-dimensional XOR layout: positives around (+1,+1) and (-1,-1), negatives
// around (+1,-1) and (-1,+1), isotropic noise with the given stddev. Samples
// alternate between the two anchors of their class.
Dataset synth_xor_gmm(std::size_t n_pos, std::size_t n_neg, double spread, std::uint64_t seed);

}  // namespace pauc
