#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "nwfe/dataset.hpp"

namespace nwfe {

/// Axis-aligned normal parameters; `sigma` holds per-dimension standard
/// deviations, not variances.
struct NormalParams {
  Vector mean;
  Vector sigma;
};

struct GaussianSpec {
  struct Class {
    std::string name;
    NormalParams params;
  };
  std::vector<Class> classes;
  std::size_t samples_per_class = 0;
  std::uint64_t seed = 0;
};

/// Each class is a mixture of groups; samples are labelled by class, not group.
struct MixtureSpec {
  struct Group {
    NormalParams params;
    std::size_t count = 0;
  };
  struct Class {
    std::string name;
    std::vector<Group> groups;
  };
  std::vector<Class> classes;
  std::uint64_t seed = 0;
};

using SynthSpec = std::variant<GaussianSpec, MixtureSpec>;

/// Throws InvalidSigma for any sigma <= 0 (or non-finite), InvalidArgument for
/// shape problems.
LabeledDataset generate_gaussian(const GaussianSpec& spec);
LabeledDataset generate_mixture(const MixtureSpec& spec);
LabeledDataset generate(const SynthSpec& spec);

/// JSON layout: {"kind": "gaussian"|"mixture", "seed": n, ...}; see the
/// files under data/ for complete examples.
SynthSpec synth_spec_from_json(const nlohmann::json& j);
SynthSpec load_synth_spec(const std::filesystem::path& path);
void set_seed(SynthSpec& spec, std::uint64_t seed);

/// Gaussian classes with means uniform in [-spread, spread]^dim and sigmas
/// uniform in [0.5, 1.5]. Used for vowel-sized benchmark streams.
GaussianSpec random_gaussian_spec(std::size_t classes, std::size_t dim, std::size_t samples_per_class,
                                  std::uint64_t seed, double spread = 3.0);

/// `n` samples with labels dealt round-robin over `classes` and then
/// shuffled, drawn from the classes of random_gaussian_spec.
LabeledDataset random_labeled_dataset(std::size_t n, std::size_t classes, std::size_t dim, std::uint64_t seed);

}  // namespace nwfe
