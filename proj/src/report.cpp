#include "pauc/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "pauc/error.hpp"

namespace pauc {

namespace {

template <class F>
void for_each_entry(MetricsReport& r, F&& f) {
  for (double& v : r.pauc) f(v);
  for (double& v : r.tpr) f(v);
  f(r.auc);
}

std::vector<double> flatten(const MetricsReport& r) {
  std::vector<double> out(r.pauc.begin(), r.pauc.end());
  out.insert(out.end(), r.tpr.begin(), r.tpr.end());
  out.push_back(r.auc);
  return out;
}

void unflatten(const std::vector<double>& v, MetricsReport& r) {
  std::size_t i = 0;
  for_each_entry(r, [&](double& x) { x = v[i++]; });
}

std::string percent_cell(double mean, double sd, bool with_sd) {
  char buf[64];
  if (with_sd) {
    std::snprintf(buf, sizeof buf, "%.1f (%.1f)", 100.0 * mean, 100.0 * sd);
  } else {
    std::snprintf(buf, sizeof buf, "%.1f", 100.0 * mean);
  }
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

ReportSummary summarize(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw Error(ErrorCode::InvalidConfig, "no reports to summarize");
  const double n = static_cast<double>(reports.size());
  std::vector<double> mean(flatten(reports.front()).size(), 0.0);
  for (const auto& r : reports) {
    const auto v = flatten(r);
    for (std::size_t i = 0; i < v.size(); ++i) mean[i] += v[i];
  }
  for (double& m : mean) m /= n;
  std::vector<double> var(mean.size(), 0.0);
  if (reports.size() > 1) {
    for (const auto& r : reports) {
      const auto v = flatten(r);
      for (std::size_t i = 0; i < v.size(); ++i) var[i] += (v[i] - mean[i]) * (v[i] - mean[i]);
    }
    for (double& x : var) x = std::sqrt(x / (n - 1.0));
  }
  ReportSummary s;
  s.splits = reports.size();
  unflatten(mean, s.mean);
  unflatten(var, s.stddev);
  return s;
}

std::string method_label(Family family, const PaucRange& range) {
  std::string base = family == Family::GmmRatio ? "GMM" : family == Family::Mlp ? "DNN" : "Linear";
  if (range.alpha() == 0.0 && range.beta() == 1.0) return base + "-AUC";
  std::ostringstream out;
  out << base << "-pAUC (";
  if (range.alpha() != 0.0) out << "alpha=" << range.alpha() << ", ";
  out << "beta=" << range.beta() << ')';
  return out.str();
}

std::string format_report_table(const std::string& method, const ReportSummary& summary) {
  const bool with_sd = summary.splits > 1;
  const std::size_t name_width = std::max<std::size_t>(method.size(), 6) + 1;
  // Widest of the header labels and all table cells, plus one space.
  std::size_t cell_width = std::string("FPR=0.01").size();
  for (std::size_t i = 0; i < kReadoutFprs.size(); ++i) {
    cell_width = std::max({cell_width, percent_cell(summary.mean.pauc[i], summary.stddev.pauc[i], with_sd).size(),
                           percent_cell(summary.mean.tpr[i], summary.stddev.tpr[i], with_sd).size()});
  }
  ++cell_width;

  std::ostringstream out;
  const auto header = [&] {
    out << pad("Method", name_width);
    for (std::size_t i = 0; i < kReadoutFprs.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "FPR=%g", kReadoutFprs[i]);
      out << "| " << (i + 1 < kReadoutFprs.size() ? pad(buf, cell_width) : std::string(buf));
    }
    out << '\n';
  };
  const auto row = [&](const std::array<double, 3>& m, const std::array<double, 3>& sd) {
    out << pad(method, name_width);
    for (std::size_t i = 0; i < m.size(); ++i) {
      const auto cell = percent_cell(m[i], sd[i], with_sd);
      out << "| " << (i + 1 < m.size() ? pad(cell, cell_width) : cell);
    }
    out << '\n';
  };

  out << "Average pAUC value (%)\n";
  header();
  row(summary.mean.pauc, summary.stddev.pauc);
  out << "\nAverage TPR value (%)\n";
  header();
  row(summary.mean.tpr, summary.stddev.tpr);
  out << "\nAUC (%): " << percent_cell(summary.mean.auc, summary.stddev.auc, with_sd) << '\n';
  return out.str();
}

}  // namespace pauc
