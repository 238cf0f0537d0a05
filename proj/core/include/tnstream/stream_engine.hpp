#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tnstream/point_set.hpp"
#include "tnstream/snn_radius.hpp"
#include "tnstream/spatial_index.hpp"

namespace tnstream {

using McId = std::uint64_t;     // 0 is never issued
using MacroId = std::uint64_t;  // 0 is never issued

struct StreamConfig {
    std::size_t window = 1000;  // W: most recent points kept live
    std::size_t min_pts = 2;    // N: minimum points per micro-cluster
    std::size_t n_micro = 3;    // minimum micro-clusters per macro-cluster
    double r_max = 0.05;        // micro-cluster radius cap
    std::size_t k = 4;          // tightest-neighbor level over micro-cluster centers
    std::size_t tk = 5;
    std::size_t mk = 4;
    double alpha = 1.0;  // outlier factor threshold multiplier
    IndexBackend backend = IndexBackend::kd_tree();
    std::size_t stride = 1;  // arrivals per pipeline pass

    /// Throws Errc::InvalidConfig.
    void validate() const;
    SnnParams snn() const { return {tk, mk, r_max}; }
};

struct StreamPoint {
    PointId id = 0;
    std::uint64_t arrival_index = 0;
    std::vector<double> coords;
    std::optional<long> true_label;
};

struct LivePoint {
    PointId id;
    std::uint64_t arrival;
    std::vector<double> coords;
    std::optional<McId> mc;
    std::optional<long> label;
};

struct MicroCluster {
    McId id = 0;
    std::vector<double> center;
    double radius = 0.0;
    std::size_t count = 0;
    std::optional<MacroId> macro;

    bool operator==(const MicroCluster&) const = default;
};

struct MacroCluster {
    MacroId id = 0;
    std::vector<McId> mcs;  // ascending

    bool operator==(const MacroCluster&) const = default;
};

/// Complete mutable state of one stream. The phase functions below each
/// implement one step of the per-arrival pipeline and may be called
/// individually (tests script scenarios this way).
struct StreamState {
    std::size_t dim = 0;  // fixed by the first arrival
    std::deque<LivePoint> points;
    std::map<McId, MicroCluster> mcs;
    std::map<MacroId, MacroCluster> macros;
    std::optional<std::uint64_t> last_arrival;
    McId next_mc_id = 1;
    MacroId next_macro_id = 1;
};

/// Drops the oldest points until at most W remain; affected micro-cluster
/// counts are decremented but nothing is deleted here.
void evict_expired(StreamState& state, const StreamConfig& config);

/// Repeated passes over the unassigned points in arrival order: a seed with
/// an adaptive radius whose ball holds ≥ N unassigned points founds a new
/// micro-cluster. Stops when a pass creates nothing.
void define_mcs(StreamState& state, const StreamConfig& config);

/// Each unassigned point joins the nearest micro-cluster whose ball contains
/// it (ties to the smaller id).
void add_to_mcs(StreamState& state, const StreamConfig& config);

/// Tightest-neighbor clustering over the centers of unattached
/// micro-clusters; an edge between a and b survives only when
/// ‖c_a − c_b‖ ≤ r_a + r_b. Components with ≥ n_micro members become macros.
void define_macros(StreamState& state, const StreamConfig& config);

/// Each unattached micro-cluster joins the macro of its nearest attached
/// micro-cluster within r_a + r_b (ties: smaller macro id).
void add_mc_to_macro(StreamState& state, const StreamConfig& config);

/// Recomputes count and mean center of every micro-cluster from live members.
void update_mcs(StreamState& state, const StreamConfig& config);

/// Re-clusters each macro's own micro-clusters and keeps the largest
/// component, detaching the rest.
void update_macros(StreamState& state, const StreamConfig& config);

/// Deletes micro-clusters with fewer than N members and frees their points.
void kill_mcs(StreamState& state, const StreamConfig& config);

/// Deletes macros with fewer than n_micro micro-clusters and frees them.
void kill_macros(StreamState& state, const StreamConfig& config);

/// All nine phases in pipeline order.
void run_pipeline(StreamState& state, const StreamConfig& config);

/// Human-readable descriptions of every broken state invariant; empty when
/// the state is consistent.
std::vector<std::string> check_invariants(const StreamState& state, const StreamConfig& config);

struct SnapshotPoint {
    PointId id = 0;
    McId mc = 0;        // 0: unassigned
    MacroId macro = 0;  // 0: unassigned point or outlier micro-cluster

    bool operator==(const SnapshotPoint&) const = default;
};

struct StreamSnapshot {
    std::uint64_t step = 0;
    std::vector<SnapshotPoint> points;  // arrival order
    std::vector<MicroCluster> mcs;      // ascending id
    std::vector<MacroCluster> macros;   // ascending id

    /// Micro-clusters not attached to any macro.
    std::vector<McId> outlier_mcs() const;
    bool operator==(const StreamSnapshot&) const = default;
};

StreamSnapshot snapshot(const StreamState& state);

/// Owns one stream. Single-threaded with respect to mutation; may be moved
/// between threads.
class StreamEngine {
public:
    /// Throws Errc::InvalidConfig.
    explicit StreamEngine(StreamConfig config);

    /// Appends the point and, every `stride` arrivals, runs the pipeline.
    /// Throws Errc::OutOfOrderArrival (arrival_index must be last + 1,
    /// starting at 0), Errc::DimensionMismatch, Errc::NonFiniteCoordinate.
    void process_point(StreamPoint point);

    /// Convenience: id and arrival index are both the next arrival index.
    void push(std::vector<double> coords, std::optional<long> label = std::nullopt);

    /// Runs the pipeline if arrivals are pending since the last pass.
    void flush();

    StreamSnapshot snapshot() const { return tnstream::snapshot(state_); }
    const StreamState& state() const noexcept { return state_; }
    const StreamConfig& config() const noexcept { return config_; }
    std::uint64_t next_arrival() const noexcept { return state_.last_arrival ? *state_.last_arrival + 1 : 0; }

private:
    StreamConfig config_;
    StreamState state_;
    std::size_t pending_ = 0;
};

}  // namespace tnstream
