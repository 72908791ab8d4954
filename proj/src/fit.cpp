#include "nwfe/fit.hpp"

#include "nwfe/error.hpp"
#include "nwfe/log.hpp"

namespace nwfe {

Extractor extract(const ScatterPair& scatters, std::size_t d, std::vector<std::string> label_names) {
  const auto& within = scatters.within;
  const auto p = within.rows();
  auto with_floor = [&](const char* reason) {
    const double floor = 1e-12 * within.trace() / static_cast<double>(p);
    logger().warn("{}; adding diagonal floor {:.3e} to the regularized within-class scatter", reason, floor);
    Matrix reg = 0.5 * within;
    reg.diagonal() = within.diagonal().array() + floor;
    return reg;
  };

  Extractor ex;
  try {
    ex = solve(scatters.between, regularize(within), d);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ZeroDiagonal && e.kind() != ErrorKind::NotPositiveDefinite) throw;
    ex = solve(scatters.between, with_floor(e.what()), d);
  }
  ex.label_names = std::move(label_names);
  return ex;
}

BatchFit fit_batch(const LabeledDataset& ds, std::size_t d) {
  if (ds.num_classes() < 2) throw Error(ErrorKind::FewerThanTwoClasses, "NWFE needs at least two classes");
  if (d < 1 || d > ds.dim()) {
    throw Error(ErrorKind::InvalidArgument,
                "target dimension " + std::to_string(d) + " outside 1.." + std::to_string(ds.dim()));
  }
  auto scatters = batch_scatters(ds, SingletonPolicy::Reject);
  auto ex = extract(scatters, d, ds.label_names());
  logger().debug("batch fit: N={} p={} L={} d={} top eigenvalue {:.6g}", ds.size(), ds.dim(), ds.num_classes(), d,
                 ex.eigenvalues[0]);
  return {std::move(ex), std::move(scatters)};
}

}  // namespace nwfe
