#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tnstream/dataset_io.hpp"

namespace tnstream {

/// K Gaussian blobs with n points in total (split as evenly as possible);
/// centers are at least `separation` apart.
struct BlobsSpec {
    std::size_t clusters = 3;
    std::size_t n = 300;
    std::size_t dim = 2;
    double sigma = 0.1;
    double separation = 10.0;
};

/// Concentric circles in the plane, one label per radius, with Gaussian
/// radial jitter of scale `noise`.
struct RingsSpec {
    std::size_t n = 300;
    std::vector<double> radii{1.0, 2.0};
    double noise = 0.02;
};

/// A tight blob next to a diffuse one (labels 1 and 2).
struct MultiDensitySpec {
    std::size_t n_dense = 200;
    std::size_t n_sparse = 100;
    std::size_t dim = 2;
    double sigma_dense = 0.05;
    double sigma_sparse = 0.5;
    double separation = 5.0;
};

/// K clusters, each inside a ball of diameter < threshold, with every
/// cross-cluster pair farther than threshold + gap. The result is certified
/// absolutely distance dividable under `threshold` before it is returned.
struct AddInstanceSpec {
    std::size_t clusters = 3;
    std::size_t dim = 2;
    double threshold = 1.0;
    double gap = 0.5;
    std::size_t min_size = 5;
    std::size_t max_size = 40;
};

/// A named stand-in for a benchmark dataset ("n3_k2", "n3_k3", "ring").
struct AnalogueSpec {
    std::string name;
};

struct NoisySpec;

using SyntheticSpec = std::variant<BlobsSpec, RingsSpec, MultiDensitySpec, AddInstanceSpec, AnalogueSpec, NoisySpec>;

/// `base` plus uniform noise over its (slightly padded) bounding box, so
/// that noise makes up `fraction` of the output. Noise is labeled 0.
struct NoisySpec {
    std::shared_ptr<const SyntheticSpec> base;
    double fraction = 0.1;
};

/// Rows are shuffled (deterministically) so a stream sees classes
/// interleaved. Labels start at 1. Throws Errc::InvalidSpec.
LabeledData generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

/// Text form used by the CLI, e.g.
///   blobs:k=3,n=300,d=2,sigma=0.1,sep=10
///   rings:n=300,radii=1;2,noise=0.02
///   multi_density:dense=200,sparse=100,d=2,sigma_dense=0.05,sigma_sparse=0.5,sep=5
///   add:k=3,d=2,thr=1,gap=0.5,min=5,max=40
///   noisy:0.1:blobs:k=2
///   n3_k2 | n3_k3 | ring
/// Omitted keys keep their defaults. Throws Errc::InvalidSpec.
SyntheticSpec parse_synthetic_spec(std::string_view text);

/// Names accepted by AnalogueSpec.
std::vector<std::string> analogue_names();

}  // namespace tnstream
