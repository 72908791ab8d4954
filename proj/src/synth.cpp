#include "nwfe/synth.hpp"

#include <cmath>
#include <fstream>

#include "nwfe/error.hpp"
#include "nwfe/random.hpp"

namespace nwfe {

namespace {

void check_params(const NormalParams& p, std::size_t dim) {
  if (static_cast<std::size_t>(p.mean.size()) != dim || static_cast<std::size_t>(p.sigma.size()) != dim) {
    throw Error(ErrorKind::DimensionMismatch, "mean/sigma length differs from the spec dimension");
  }
  for (Eigen::Index d = 0; d < p.sigma.size(); ++d) {
    if (!(p.sigma[d] > 0.0) || !std::isfinite(p.sigma[d])) {
      throw Error(ErrorKind::InvalidSigma, "sigma[" + std::to_string(d) + "] = " +
                                               std::to_string(p.sigma[d]) + " must be > 0");
    }
  }
}

Vector draw(Rng& rng, const NormalParams& p) {
  Vector x(p.mean.size());
  for (Eigen::Index d = 0; d < x.size(); ++d) x[d] = p.mean[d] + p.sigma[d] * rng.normal();
  return x;
}

std::vector<std::string> names_or_default(std::vector<std::string> names) {
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (names[c].empty()) names[c] = "class" + std::to_string(c + 1);
  }
  return names;
}

Vector to_vector(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

LabeledDataset generate_gaussian(const GaussianSpec& spec) {
  if (spec.classes.empty()) throw Error(ErrorKind::InvalidArgument, "gaussian spec has no classes");
  if (spec.samples_per_class == 0) throw Error(ErrorKind::InvalidArgument, "samples_per_class must be >= 1");
  const auto dim = static_cast<std::size_t>(spec.classes.front().params.mean.size());
  for (const auto& c : spec.classes) check_params(c.params, dim);

  Rng rng(spec.seed);
  std::vector<Vector> xs;
  std::vector<int> ys;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < spec.classes.size(); ++c) {
    names.push_back(spec.classes[c].name);
    for (std::size_t k = 0; k < spec.samples_per_class; ++k) {
      xs.push_back(draw(rng, spec.classes[c].params));
      ys.push_back(static_cast<int>(c));
    }
  }
  return LabeledDataset(std::move(xs), std::move(ys), names_or_default(std::move(names)));
}

LabeledDataset generate_mixture(const MixtureSpec& spec) {
  if (spec.classes.empty()) throw Error(ErrorKind::InvalidArgument, "mixture spec has no classes");
  if (spec.classes.front().groups.empty()) throw Error(ErrorKind::InvalidArgument, "class without groups");
  const auto dim = static_cast<std::size_t>(spec.classes.front().groups.front().params.mean.size());
  for (const auto& c : spec.classes) {
    if (c.groups.empty()) throw Error(ErrorKind::InvalidArgument, "class without groups");
    for (const auto& g : c.groups) {
      check_params(g.params, dim);
      if (g.count == 0) throw Error(ErrorKind::InvalidArgument, "group count must be >= 1");
    }
  }

  Rng rng(spec.seed);
  std::vector<Vector> xs;
  std::vector<int> ys;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < spec.classes.size(); ++c) {
    names.push_back(spec.classes[c].name);
    for (const auto& g : spec.classes[c].groups) {
      for (std::size_t k = 0; k < g.count; ++k) {
        xs.push_back(draw(rng, g.params));
        ys.push_back(static_cast<int>(c));
      }
    }
  }
  return LabeledDataset(std::move(xs), std::move(ys), names_or_default(std::move(names)));
}

LabeledDataset generate(const SynthSpec& spec) {
  return std::visit(
      [](const auto& s) {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, GaussianSpec>) {
          return generate_gaussian(s);
        } else {
          return generate_mixture(s);
        }
      },
      spec);
}

SynthSpec synth_spec_from_json(const nlohmann::json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    const auto seed = j.value("seed", std::uint64_t{0});
    if (kind == "gaussian") {
      GaussianSpec spec;
      spec.seed = seed;
      spec.samples_per_class = j.at("samples_per_class").get<std::size_t>();
      for (const auto& c : j.at("classes")) {
        spec.classes.push_back({c.value("name", std::string{}), {to_vector(c.at("mean")), to_vector(c.at("sigma"))}});
      }
      return spec;
    }
    if (kind == "mixture") {
      MixtureSpec spec;
      spec.seed = seed;
      for (const auto& c : j.at("classes")) {
        MixtureSpec::Class cls{c.value("name", std::string{}), {}};
        for (const auto& g : c.at("groups")) {
          cls.groups.push_back({{to_vector(g.at("mean")), to_vector(g.at("sigma"))}, g.at("count").get<std::size_t>()});
        }
        spec.classes.push_back(std::move(cls));
      }
      return spec;
    }
    throw Error(ErrorKind::InvalidArgument, "unknown spec kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed synthetic spec: ") + e.what());
  }
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, path.string() + ": " + e.what());
  }
  return synth_spec_from_json(j);
}

void set_seed(SynthSpec& spec, std::uint64_t seed) {
  std::visit([seed](auto& s) { s.seed = seed; }, spec);
}

GaussianSpec random_gaussian_spec(std::size_t classes, std::size_t dim, std::size_t samples_per_class,
                                  std::uint64_t seed, double spread) {
  if (classes == 0 || dim == 0) throw Error(ErrorKind::InvalidArgument, "need at least one class and dimension");
  Rng rng(mix_seed(seed, 0));
  GaussianSpec spec;
  spec.samples_per_class = samples_per_class;
  spec.seed = mix_seed(seed, 1);
  for (std::size_t c = 0; c < classes; ++c) {
    NormalParams p{Vector(static_cast<Eigen::Index>(dim)), Vector(static_cast<Eigen::Index>(dim))};
    for (std::size_t d = 0; d < dim; ++d) {
      p.mean[static_cast<Eigen::Index>(d)] = spread * (2.0 * rng.uniform() - 1.0);
      p.sigma[static_cast<Eigen::Index>(d)] = 0.5 + rng.uniform();
    }
    spec.classes.push_back({"class" + std::to_string(c + 1), std::move(p)});
  }
  return spec;
}

LabeledDataset random_labeled_dataset(std::size_t n, std::size_t classes, std::size_t dim, std::uint64_t seed) {
  if (n < classes) throw Error(ErrorKind::InvalidArgument, "fewer samples than classes");
  const auto spec = random_gaussian_spec(classes, dim, 1, seed);
  Rng rng(mix_seed(seed, 2));
  std::vector<int> labels(n);
  for (std::size_t t = 0; t < n; ++t) labels[t] = static_cast<int>(t % classes);
  rng.shuffle(std::span(labels));
  std::vector<Vector> xs;
  xs.reserve(n);
  for (int c : labels) xs.push_back(draw(rng, spec.classes[static_cast<std::size_t>(c)].params));
  std::vector<std::string> names;
  for (const auto& c : spec.classes) names.push_back(c.name);
  return LabeledDataset(std::move(xs), std::move(labels), std::move(names));
}

}  // namespace nwfe
