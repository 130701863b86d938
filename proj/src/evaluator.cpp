#include "cygnet/evaluator.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "cygnet/error.hpp"

namespace cygnet {

namespace {

// Neumaier summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

Metrics metrics_from_ranks(std::span<const std::int64_t> ranks) {
  Metrics m;
  m.count = static_cast<std::int64_t>(ranks.size());
  if (ranks.empty()) return m;
  CompensatedSum rr;
  std::int64_t h1 = 0, h3 = 0, h10 = 0;
  for (auto r : ranks) {
    if (r < 1) throw ParameterError("ranks are 1-based");
    rr.add(1.0 / static_cast<double>(r));
    h1 += r <= 1;
    h3 += r <= 3;
    h10 += r <= 10;
  }
  const auto n = static_cast<double>(ranks.size());
  m.mrr = rr.value() / n;
  m.hits1 = static_cast<double>(h1) / n;
  m.hits3 = static_cast<double>(h3) / n;
  m.hits10 = static_cast<double>(h10) / n;
  return m;
}

template <class T>
EvalReport evaluate(const ModelParams<T>& params, std::span<const Quadruple> split,
                    const HistVocab& vocab, const FilterIndex& filter, const EvalConfig& config,
                    std::int32_t num_relations) {
  if (!(config.alpha >= 0.0 && config.alpha <= 1.0)) {
    throw ParameterError("alpha must lie in [0, 1]");
  }
  EvalReport report;
  report.mode = config.mode;
  report.filter = config.filter;
  report.alpha = config.alpha;

  kernels::RankRequest request;
  request.alpha = config.alpha;
  request.mode = config.mode;
  request.mask = config.mask;
  request.regime = config.filter;
  request.filter = &filter;
  const auto ranks = kernels::rank_queries(config.exec, params, split, vocab, request);

  std::vector<std::int64_t> object_ranks, subject_ranks;
  std::map<SnapshotIndex, std::vector<std::int64_t>> by_snapshot;
  for (std::size_t i = 0; i < split.size(); ++i) {
    (split[i].relation < num_relations ? object_ranks : subject_ranks).push_back(ranks[i]);
    by_snapshot[split[i].time].push_back(ranks[i]);
  }
  report.overall = metrics_from_ranks(ranks);
  report.object = metrics_from_ranks(object_ranks);
  report.subject = metrics_from_ranks(subject_ranks);
  for (const auto& [k, r] : by_snapshot) report.per_snapshot.push_back({k, metrics_from_ranks(r)});
  return report;
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * fraction);
  return buf;
}

namespace {

void write_metrics(std::ostream& out, const std::string& prefix, const Metrics& m) {
  out << prefix << "count=" << m.count << '\n';
  if (!m.defined()) {
    out << prefix << "metrics=undefined\n";
    return;
  }
  out << prefix << "mrr=" << format_percent(m.mrr) << '\n'
      << prefix << "hits1=" << format_percent(m.hits1) << '\n'
      << prefix << "hits3=" << format_percent(m.hits3) << '\n'
      << prefix << "hits10=" << format_percent(m.hits10) << '\n';
}

}  // namespace

void write_report(std::ostream& out, const EvalReport& report) {
  out << "mode=" << to_string(report.mode) << '\n'
      << "filter=" << to_string(report.filter) << '\n'
      << "alpha=" << report.alpha << '\n';
  write_metrics(out, "", report.overall);
  write_metrics(out, "object.", report.object);
  write_metrics(out, "subject.", report.subject);
}

void write_per_snapshot_csv(std::ostream& out, const EvalReport& report) {
  out << "snapshot,count,mrr,hits1,hits3,hits10\n";
  for (const auto& s : report.per_snapshot) {
    out << s.snapshot << ',' << s.metrics.count << ',' << format_percent(s.metrics.mrr) << ','
        << format_percent(s.metrics.hits1) << ',' << format_percent(s.metrics.hits3) << ','
        << format_percent(s.metrics.hits10) << '\n';
  }
}

template EvalReport evaluate(const ModelParams<float>&, std::span<const Quadruple>,
                             const HistVocab&, const FilterIndex&, const EvalConfig&,
                             std::int32_t);
template EvalReport evaluate(const ModelParams<double>&, std::span<const Quadruple>,
                             const HistVocab&, const FilterIndex&, const EvalConfig&,
                             std::int32_t);

}  // namespace cygnet
