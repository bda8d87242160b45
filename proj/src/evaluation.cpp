#include "tgan/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

namespace tgan {

double auroc(const Vector<double>& scores, const std::vector<int>& labels) {
  check_arg(scores.size() == Index(labels.size()), "auroc: length mismatch");
  check_arg(scores.size() >= 2, "auroc: need at least two samples");
  Index n_pos = 0, n_neg = 0;
  for (int v : labels) {
    check_arg(v == 1 || v == -1, "auroc: labels must be +1/-1");
    (v == 1 ? n_pos : n_neg) += 1;
  }
  check_arg(n_pos > 0 && n_neg > 0, "auroc: both classes must be present");
  for (Index i = 0; i < scores.size(); ++i)
    check_arg(std::isfinite(scores(i)), "auroc: non-finite score");

  std::vector<Index> order(std::size_t(scores.size()));
  std::iota(order.begin(), order.end(), Index(0));
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return scores(a) < scores(b); });

  // midranks over tied groups, then the rank-sum statistic
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores(order[j + 1]) == scores(order[i])) ++j;
    const double midrank = (double(i + 1) + double(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k)
      if (labels[std::size_t(order[k])] == 1) rank_sum_pos += midrank;
    i = j + 1;
  }
  return (rank_sum_pos - double(n_pos) * (double(n_pos) + 1.0) / 2.0) /
         (double(n_pos) * double(n_neg));
}

namespace {

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

void export_results_table(const std::vector<EvalReport>& reports, const std::string& path) {
  check_arg(!reports.empty(), "export_results_table: no reports");
  const std::string dataset = reports.front().dataset;
  for (const auto& r : reports)
    check_arg(r.dataset == dataset,
              "export_results_table: mixed datasets in one table (" + dataset + " vs " +
                  r.dataset + ")");

  // columns keyed by (method, pi); cells collect per-seed aurocs
  std::set<std::pair<std::string, double>> columns;
  std::map<std::pair<int, std::pair<std::string, double>>, std::vector<double>> cells;
  std::set<int> classes;
  for (const auto& r : reports) {
    const std::pair<std::string, double> col{r.mode, r.pi_requested};
    columns.insert(col);
    classes.insert(r.novel_class);
    cells[{r.novel_class, col}].push_back(r.auroc);
  }

  std::ofstream out(path);
  check_state(bool(out), "export_results_table: cannot open " + path);
  out << "novel_class";
  for (const auto& col : columns) out << "," << col.first << "@" << fmt3(col.second);
  out << "\n";

  std::map<std::pair<std::string, double>, std::vector<double>> column_means;
  for (int cls : classes) {
    out << cls;
    for (const auto& col : columns) {
      auto it = cells.find({cls, col});
      if (it == cells.end()) {
        out << ",";
        continue;
      }
      const auto& v = it->second;
      const double mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
      double var = 0.0;
      for (double x : v) var += (x - mean) * (x - mean);
      const double sd = v.size() > 1 ? std::sqrt(var / double(v.size())) : 0.0;
      out << "," << fmt3(mean) << "(" << fmt3(sd) << ")";
      column_means[col].push_back(mean);
    }
    out << "\n";
  }
  out << "mean";
  for (const auto& col : columns) {
    const auto& v = column_means[col];
    if (v.empty()) {
      out << ",";
    } else {
      out << ","
          << fmt3(std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()));
    }
  }
  out << "\n";
  check_state(bool(out), "export_results_table: write failure on " + path);
}

}  // namespace tgan
