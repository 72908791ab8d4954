#include "nwfe/report.hpp"

#include <ostream>

namespace nwfe {

namespace {

template <typename T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <typename T>
void csv_optional(std::ostream& out, const std::optional<T>& v) {
  if (v) out << *v;
}

}  // namespace

nlohmann::json to_json(const CvReport& r) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : r.folds) {
    folds.push_back({{"fold", f.fold},
                     {"accuracy", f.accuracy},
                     {"train_size", f.train_size},
                     {"test_size", f.test_size},
                     {"init_size", f.init_size},
                     {"arrivals", f.arrivals},
                     {"between_gap", optional_json(f.between_gap)},
                     {"within_gap", optional_json(f.within_gap)},
                     {"batch_accuracy", optional_json(f.batch_accuracy)}});
  }
  return {{"mode", to_string(r.mode)},
          {"dim", r.dim},
          {"seed", r.seed},
          {"init_fraction", r.init_fraction},
          {"folds", folds},
          {"mean", r.mean},
          {"half_width", r.half_width},
          {"stratified", true}};
}

nlohmann::json to_json(const SweepReport& r) {
  nlohmann::json per_dim = nlohmann::json::array();
  for (const auto& c : r.reports) per_dim.push_back(to_json(c));
  return {{"best_dim", r.best_dim}, {"best_mean", r.best_mean}, {"reports", per_dim}};
}

nlohmann::json to_json(const LearningCurve& c) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : c.checkpoints) points.push_back({{"samples_seen", p.samples_seen}, {"accuracy", p.accuracy}});
  return {{"dim", c.dim},
          {"test_size", c.test_size},
          {"init_size", c.init_size},
          {"batch_accuracy", c.batch_accuracy},
          {"final_between_gap", c.final_between_gap},
          {"final_within_gap", c.final_within_gap},
          {"checkpoints", points}};
}

nlohmann::json to_json(const TimingTable& t) {
  nlohmann::json chunks = nlohmann::json::array();
  for (const auto& c : t.chunks) {
    chunks.push_back({{"samples_seen", c.samples_seen},
                      {"arrivals", c.arrivals},
                      {"batch_seconds", c.batch_seconds},
                      {"incremental_seconds", c.incremental_seconds},
                      {"cumulative_batch_seconds", c.cumulative_batch_seconds},
                      {"cumulative_incremental_seconds", c.cumulative_incremental_seconds},
                      {"weight_recomputations", c.weight_recomputations},
                      {"batch_weight_computations", c.batch_weight_computations},
                      {"bound_violations", c.bound_violations}});
  }
  return {{"chunk", t.chunk}, {"init_size", t.init_size}, {"chunks", chunks}};
}

nlohmann::json to_json(const OracleCheck& c) {
  return {{"arrivals", c.arrivals},
          {"new_class_arrivals", c.new_class_arrivals},
          {"checks", c.checks},
          {"max_between_gap", c.max_between_gap},
          {"max_within_gap", c.max_within_gap}};
}

void write_csv(const CvReport& r, std::ostream& out) {
  out << "mode,dim,seed,fold,accuracy,train_size,test_size,init_size,arrivals,between_gap,within_gap,batch_accuracy\n";
  for (const auto& f : r.folds) {
    out << to_string(r.mode) << ',' << r.dim << ',' << r.seed << ',' << f.fold << ',' << f.accuracy << ','
        << f.train_size << ',' << f.test_size << ',' << f.init_size << ',' << f.arrivals << ',';
    csv_optional(out, f.between_gap);
    out << ',';
    csv_optional(out, f.within_gap);
    out << ',';
    csv_optional(out, f.batch_accuracy);
    out << '\n';
  }
}

void write_csv(const SweepReport& r, std::ostream& out) {
  out << "dim,mean,half_width,best\n";
  for (const auto& c : r.reports) {
    out << c.dim << ',' << c.mean << ',' << c.half_width << ',' << (c.dim == r.best_dim ? 1 : 0) << '\n';
  }
}

void write_csv(const LearningCurve& c, std::ostream& out) {
  out << "samples_seen,accuracy\n";
  for (const auto& p : c.checkpoints) out << p.samples_seen << ',' << p.accuracy << '\n';
}

void write_csv(const TimingTable& t, std::ostream& out) {
  out << "samples_seen,arrivals,batch_seconds,incremental_seconds,cumulative_batch_seconds,"
         "cumulative_incremental_seconds,weight_recomputations,batch_weight_computations,bound_violations\n";
  for (const auto& c : t.chunks) {
    out << c.samples_seen << ',' << c.arrivals << ',' << c.batch_seconds << ',' << c.incremental_seconds << ','
        << c.cumulative_batch_seconds << ',' << c.cumulative_incremental_seconds << ',' << c.weight_recomputations
        << ',' << c.batch_weight_computations << ',' << c.bound_violations << '\n';
  }
}

}  // namespace nwfe
