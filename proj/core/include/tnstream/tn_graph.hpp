#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "tnstream/point_set.hpp"

namespace tnstream {

/// Tightest-neighbor graph at level k: an undirected edge joins x and y
/// exactly when each is among the other's k nearest neighbors (self
/// excluded). Edge weights are Euclidean distances.
class TnGraph {
public:
    struct Edge {
        PointId to;
        double weight;

        bool operator==(const Edge&) const = default;
    };

    struct WeightedEdge {
        PointId a;  // a < b
        PointId b;
        double weight;

        bool operator==(const WeightedEdge&) const = default;
    };

    /// `adjacency[i]` lists (position, weight) pairs for the vertex `ids[i]`.
    /// The caller guarantees symmetry; positions must be in range.
    TnGraph(std::size_t k, std::vector<PointId> ids,
            std::vector<std::vector<std::pair<std::size_t, double>>> adjacency);

    std::size_t k() const noexcept { return k_; }
    std::size_t size() const noexcept { return ids_.size(); }
    std::span<const PointId> ids() const noexcept { return ids_; }
    bool contains(PointId id) const { return pos_.count(id) != 0; }

    /// Sorted by neighbor id. Throws Errc::UnknownId.
    std::vector<Edge> neighbors(PointId id) const;
    std::size_t degree(PointId id) const;
    bool has_edge(PointId a, PointId b) const;
    std::size_t edge_count() const noexcept;
    /// Every edge once, sorted by (a, b).
    std::vector<WeightedEdge> edges() const;

    /// Same vertices, keeping only edges for which `keep(a, b, weight)` holds.
    TnGraph filter_edges(const std::function<bool(PointId, PointId, double)>& keep) const;
    /// Induced subgraph on the vertices not listed in `removed`.
    TnGraph without(std::span<const PointId> removed) const;

    /// Connected components, each sorted ascending, ordered by smallest member.
    std::vector<std::vector<PointId>> components() const;

    // Position-level access for algorithms that walk the graph.
    std::size_t position(PointId id) const;
    struct Arc {
        std::size_t pos;
        double weight;
    };
    std::span<const Arc> arcs(std::size_t pos) const { return adj_[pos]; }

private:
    std::size_t k_;
    std::vector<PointId> ids_;
    std::unordered_map<PointId, std::size_t> pos_;
    std::vector<std::vector<Arc>> adj_;
};

/// Self-excluded k nearest neighbors of every point, by position in `ps`,
/// each list ordered by (distance, id). Exact (KD-tree backed).
std::vector<std::vector<std::size_t>> knn_positions(const PointSet& ps, std::size_t k);

/// TN(k, x) for every point of `ps` (aligned with ps order), ids ascending.
/// For k = 0 each set is empty: the point itself is its only 0-tightest
/// neighbor and is never listed. Throws Errc::KTooLarge when k ≥ |ps|.
std::vector<std::vector<PointId>> tightest_neighbors(const PointSet& ps, std::size_t k);

/// Throws Errc::KTooLarge when k ≥ |ps|.
TnGraph tn_graph(const PointSet& ps, std::size_t k);

/// s-fold closure of `seed` (each pass adds every member's tightest
/// neighbors). Sorted ids. Throws Errc::UnknownId, Errc::InvalidArgument for s = 0.
std::vector<PointId> closure(const TnGraph& graph, std::span<const PointId> seed, std::size_t s);

/// The minimal closure-invariant set containing x, i.e. the closure fixpoint.
std::vector<PointId> mtncis(const TnGraph& graph, PointId x);

/// Per-point outlier factor: sum of tightest-neighbor distances divided by
/// the squared number of tightest neighbors; +∞ for a point without any.
struct TnofReport {
    std::vector<PointId> ids;
    std::vector<double> scores;
    double theta = std::numeric_limits<double>::quiet_NaN();
    double alpha = 1.0;
};

/// Throws Errc::InvalidArgument for k = 0, Errc::KTooLarge for k ≥ |ps|.
TnofReport tnof_scores(const PointSet& ps, std::size_t k);
TnofReport tnof_scores(const TnGraph& graph);

/// Population mean + alpha · population std over the finite scores.
/// Throws Errc::AllScoresInfinite when no score is finite.
double outlier_threshold(std::span<const double> scores, double alpha);

/// Fills report.theta/alpha and returns the ids with score > theta or +∞, ascending.
std::vector<PointId> detect_outliers(TnofReport& report, double alpha = 1.0);

struct Clustering {
    std::vector<std::vector<PointId>> clusters;  // each ascending, ordered by smallest member
    std::vector<PointId> outliers;               // ascending

    std::size_t K() const noexcept { return clusters.size(); }
    /// 1-based cluster index per id, 0 for outliers. Throws Errc::UnknownId.
    std::vector<long> labels_for(std::span<const PointId> ids) const;
};

/// Outlier removal by TNOF, then connected components of the TN graph over
/// the remaining vertices. When every score is infinite all points are
/// reported as outliers and K = 0.
Clustering ktnc(const TnGraph& graph, double alpha = 1.0);
/// Requires 1 ≤ k < |ps|.
Clustering ktnc(const PointSet& ps, std::size_t k, double alpha = 1.0);

enum class Separability { Add, Cd, None };
const char* to_string(Separability s) noexcept;

struct SeparabilityReport {
    double threshold = 0.0;
    Separability cls = Separability::None;
    std::vector<std::vector<PointId>> components;
};

/// Components of the graph joining pairs at distance ≤ d. Two or more
/// components make the set connectedly dividable; if additionally every
/// component is a clique under d it is absolutely distance dividable.
/// Throws Errc::NonpositiveThreshold.
SeparabilityReport separability_class(const PointSet& ps, double d);

/// For every component X_i of size m_i and every x in it, checks
/// TN(m_i − 1, x) = X_i \ {x}. Throws Errc::NotAdd unless report.cls is Add.
bool verify_add_tightness(const PointSet& ps, const SeparabilityReport& report);

/// x is strictly closer to every other member of its cluster than to any
/// member of another cluster. Throws Errc::OutlierPoint, Errc::UnknownId.
bool is_prototype_point(const PointSet& ps, const Clustering& clustering, PointId x);

/// Checks that the iterated closure of each subsets[i] under the level-k TN
/// graph (outliers removed) reproduces clustering.clusters[i].
/// Throws Errc::LengthMismatch, Errc::SubsetNotContained.
bool verify_skeleton_set(const PointSet& ps, std::size_t k, const std::vector<std::vector<PointId>>& subsets,
                         const Clustering& clustering);

/// Smallest k in [1, max_k] for which ktnc's clusters, restricted to
/// non-outliers, coincide with the partition given by `labels` (aligned with
/// ps order) and every label class is represented by exactly one cluster.
std::optional<std::size_t> minimal_recovering_k(const PointSet& ps, std::span<const long> labels, double alpha,
                                                std::size_t max_k);

}  // namespace tnstream
