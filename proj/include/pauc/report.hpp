#pragma once

#include <array>
#include <string>
#include <vector>

#include "pauc/trainer.hpp"

namespace pauc {

// Mean and sample standard deviation of each report entry over several
// evaluation splits (std is 0 for a single split).
struct ReportSummary {
  std::size_t splits = 0;
  MetricsReport mean;
  MetricsReport stddev;
};

ReportSummary summarize(const std::vector<MetricsReport>& reports);

// "GMM-pAUC (beta=0.1)", "DNN-AUC", "Linear-pAUC (beta=0.05)", ...
std::string method_label(Family family, const PaucRange& training_range);

// Two fixed-width tables, pAUC then TPR, in percent with one decimal:
//
//   Average pAUC value (%)
//   Method               | FPR=0.01   | FPR=0.05   | FPR=0.1
//   GMM-pAUC (beta=0.1)  | 31.7 (2.0) | 67.1 (2.7) | 79.8 (2.3)
//
// The "(std)" suffix is printed only when summary.splits > 1.
std::string format_report_table(const std::string& method, const ReportSummary& summary);

}  // namespace pauc
