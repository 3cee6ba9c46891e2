#include "pauc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "pauc/error.hpp"
#include "pauc/rng.hpp"

namespace pauc {

Matrix::Matrix(std::size_t cols, std::vector<double> data)
    : rows_(cols == 0 ? 0 : data.size() / cols), cols_(cols), data_(std::move(data)) {
  if (cols_ == 0 ? !data_.empty() : data_.size() % cols_ != 0) {
    throw Error(ErrorCode::DimensionMismatch, "matrix data is not a multiple of the column count");
  }
}

void Matrix::push_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) {
    throw Error(ErrorCode::DimensionMismatch, "row has " + std::to_string(values.size()) +
                                                  " values, expected " + std::to_string(cols_));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

Matrix Matrix::select(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Dataset::Dataset(Matrix positives, Matrix negatives, std::vector<std::string> feature_names)
    : positives_(std::move(positives)), negatives_(std::move(negatives)), names_(std::move(feature_names)) {
  if (positives_.rows() == 0) throw Error(ErrorCode::EmptyClass, "EmptyClass(positive): no positive samples");
  if (negatives_.rows() == 0) throw Error(ErrorCode::EmptyClass, "EmptyClass(negative): no negative samples");
  if (positives_.cols() != negatives_.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "positive and negative samples differ in dimension");
  }
  if (positives_.cols() == 0) throw Error(ErrorCode::DimensionMismatch, "dataset has zero features");
  if (!names_.empty() && names_.size() != positives_.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "feature name count does not match dimension");
  }
  for (const Matrix* m : {&positives_, &negatives_}) {
    for (double v : m->data()) {
      if (!std::isfinite(v)) throw Error(ErrorCode::BadFormat, "dataset contains a non-finite feature value");
    }
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

bool parse_real(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end && !s.empty() && std::isfinite(out);
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, "MissingFile: cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::BadFormat, "empty CSV file: " + path.string());
  const auto header = split_fields(line);
  const auto label_it = std::find(header.begin(), header.end(), opts.label_column);
  if (label_it == header.end()) {
    throw Error(ErrorCode::BadFormat, "label column '" + opts.label_column + "' not found in " + path.string());
  }
  const auto label_col = static_cast<std::size_t>(label_it - header.begin());

  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_col) names.emplace_back(header[c]);
  }

  Matrix pos(0, names.size());
  Matrix neg(0, names.size());
  std::vector<double> values(names.size());
  std::size_t row_index = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row_index;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::RaggedRows, "RaggedRows(" + std::to_string(row_index) + "): expected " +
                                             std::to_string(header.size()) + " fields, got " +
                                             std::to_string(fields.size()));
    }
    std::size_t k = 0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c == label_col) continue;
      if (!parse_real(fields[c], values[k])) {
        throw Error(ErrorCode::UnparseableCell, "UnparseableCell(" + std::to_string(row_index) + ", " +
                                                    std::to_string(c + 1) + "): '" + std::string(fields[c]) + "'");
      }
      ++k;
    }
    (fields[label_col] == opts.positive_value ? pos : neg).push_row(values);
  }
  return Dataset(std::move(pos), std::move(neg), std::move(names));
}

std::string format_real(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void write_csv(const Dataset& ds, const std::filesystem::path& path, const CsvOptions& opts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write " + path.string());

  for (std::size_t c = 0; c < ds.dim(); ++c) {
    out << (ds.feature_names().empty() ? "x" + std::to_string(c) : ds.feature_names()[c]) << ',';
  }
  out << opts.label_column << '\n';

  const auto emit = [&](const Matrix& m, const std::string& label) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (double v : m.row(i)) out << format_real(v) << ',';
      out << label << '\n';
    }
  };
  emit(ds.positives(), opts.positive_value);
  emit(ds.negatives(), opts.negative_value);
}

std::pair<Dataset, Dataset> split_stratified(const Dataset& ds, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "train_fraction must lie in (0, 1)");
  }

  struct Parts {
    std::vector<std::size_t> train, test;
  };
  const auto split_class = [&](std::size_t n, std::uint64_t stream, const char* name) {
    const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n) + 1e-9));
    if (n_train < 1 || n_train >= n) {
      throw Error(ErrorCode::DegenerateSplit, std::string("DegenerateSplit: ") + name + " class of size " +
                                                  std::to_string(n) + " cannot be split at fraction " +
                                                  format_real(train_fraction));
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed, stream);
    rng.shuffle(std::span(idx));
    Parts p{{idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train)},
            {idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end()}};
    std::sort(p.train.begin(), p.train.end());
    std::sort(p.test.begin(), p.test.end());
    return p;
  };

  const auto pos = split_class(ds.n_pos(), 0, "positive");
  const auto neg = split_class(ds.n_neg(), 1, "negative");
  return {Dataset(ds.positives().select(pos.train), ds.negatives().select(neg.train), ds.feature_names()),
          Dataset(ds.positives().select(pos.test), ds.negatives().select(neg.test), ds.feature_names())};
}

void Standardizer::apply_inplace(std::span<double> x) const {
  if (x.size() != dim()) {
    throw Error(ErrorCode::DimensionMismatch, "DimensionMismatch: standardizer has dimension " +
                                                  std::to_string(dim()) + ", data has " + std::to_string(x.size()));
  }
  for (std::size_t c = 0; c < x.size(); ++c) x[c] = (x[c] - mean[c]) / stddev[c];
}

Standardizer fit_standardizer(const Dataset& ds) {
  const std::size_t d = ds.dim();
  const double n = static_cast<double>(ds.n_pos() + ds.n_neg());
  Standardizer st{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (const Matrix* m : {&ds.positives(), &ds.negatives()}) {
    for (std::size_t i = 0; i < m->rows(); ++i) {
      const auto r = m->row(i);
      for (std::size_t c = 0; c < d; ++c) st.mean[c] += r[c];
    }
  }
  for (auto& v : st.mean) v /= n;
  for (const Matrix* m : {&ds.positives(), &ds.negatives()}) {
    for (std::size_t i = 0; i < m->rows(); ++i) {
      const auto r = m->row(i);
      for (std::size_t c = 0; c < d; ++c) {
        const double diff = r[c] - st.mean[c];
        st.stddev[c] += diff * diff;
      }
    }
  }
  for (auto& v : st.stddev) v = std::max(std::sqrt(v / n), kStddevFloor);
  return st;
}

Dataset apply_standardizer(const Standardizer& st, const Dataset& ds) {
  if (st.dim() != ds.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "DimensionMismatch: standardizer has dimension " +
                                                  std::to_string(st.dim()) + ", data has " + std::to_string(ds.dim()));
  }
  Matrix pos = ds.positives();
  Matrix neg = ds.negatives();
  for (Matrix* m : {&pos, &neg}) {
    for (std::size_t i = 0; i < m->rows(); ++i) st.apply_inplace(m->row(i));
  }
  return Dataset(std::move(pos), std::move(neg), ds.feature_names());
}

Dataset synth_xor_gmm(std::size_t n_pos, std::size_t n_neg, double spread, std::uint64_t seed) {
  if (n_pos < 1 || n_neg < 1) throw Error(ErrorCode::EmptyClass, "synth_xor_gmm needs at least one sample per class");
  if (!(spread >= 0.0) || !std::isfinite(spread)) throw Error(ErrorCode::InvalidConfig, "spread must be >= 0");

  Rng rng(seed);
  const auto draw = [&](std::size_t n, double sign) {
    Matrix m(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = (i % 2 == 0) ? 1.0 : -1.0;
      m.row(i)[0] = a + spread * rng.normal();
      m.row(i)[1] = sign * a + spread * rng.normal();
    }
    return m;
  };
  Matrix pos = draw(n_pos, 1.0);
  Matrix neg = draw(n_neg, -1.0);
  return Dataset(std::move(pos), std::move(neg), {"x0", "x1"});
}

}  // namespace pauc
