#include "tnstream/stream_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>

#include "tnstream/error.hpp"
#include "tnstream/tn_graph.hpp"

namespace tnstream {

void StreamConfig::validate() const
{
    auto fail = [](const std::string& what) { throw Error(Errc::InvalidConfig, what); };
    if (min_pts < 2) {
        fail("N (min points per micro-cluster) must be at least 2");
    }
    if (window < min_pts) {
        fail("window W must be at least N");
    }
    if (n_micro < 1) {
        fail("n_micro must be at least 1");
    }
    if (k < 1) {
        fail("k must be at least 1");
    }
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        fail("alpha must be finite and non-negative");
    }
    if (stride < 1) {
        fail("stride must be at least 1");
    }
    snn().validate();
}

namespace {

// ‖c_a − c_b‖ ≤ r_a + r_b; with equal radii this is the 2r rule.
bool macro_gate(const MicroCluster& a, const MicroCluster& b)
{
    return within_radius(squared_distance(a.center, b.center), a.radius + b.radius);
}

// Tightest-neighbor graph over the centers of `ids`, with the radius gate.
TnGraph gated_center_graph(const StreamState& state, const std::vector<McId>& ids, std::size_t k)
{
    PointSet centers(state.dim);
    centers.reserve(ids.size());
    for (McId id : ids) {
        centers.add(id, state.mcs.at(id).center);
    }
    const std::size_t level = std::min(k, ids.size() - 1);
    return tn_graph(centers, level).filter_edges([&](PointId a, PointId b, double) {
        return macro_gate(state.mcs.at(a), state.mcs.at(b));
    });
}

}  // namespace

void evict_expired(StreamState& state, const StreamConfig& config)
{
    while (state.points.size() > config.window) {
        const LivePoint& old = state.points.front();
        if (old.mc) {
            auto it = state.mcs.find(*old.mc);
            if (it != state.mcs.end() && it->second.count > 0) {
                --it->second.count;
            }
        }
        state.points.pop_front();
    }
}

void define_mcs(StreamState& state, const StreamConfig& config)
{
    const SnnParams snn = config.snn();
    const std::size_t min_free = std::max<std::size_t>(config.min_pts, 2);
    std::vector<std::size_t> free_slots;  // indices into state.points, arrival order
    for (std::size_t i = 0; i < state.points.size(); ++i) {
        if (!state.points[i].mc) {
            free_slots.push_back(i);
        }
    }
    if (free_slots.size() < min_free) {
        return;
    }

    PointSet unassigned(state.dim);
    unassigned.reserve(free_slots.size());
    for (std::size_t slot : free_slots) {
        unassigned.add(state.points[slot].id, state.points[slot].coords);
    }
    std::unique_ptr<SpatialIndex> index = build_index(std::move(unassigned), config.backend);
    SnnContext ctx(*index, snn.tk);

    // Passes repeat over the still-unassigned points until one creates
    // nothing. A seed whose neighbor lists all carry over from the previous
    // pass gets the same radius again, and its ball can only have lost
    // members, so it is skipped.
    std::vector<char> settled(free_slots.size(), 0);
    for (;;) {
        const PointSet& pts = index->points();
        std::vector<char> taken(pts.size(), 0);
        std::vector<PointId> removed;
        for (std::size_t u = 0; u < pts.size(); ++u) {
            if (taken[u] || settled[u]) {
                continue;
            }
            const std::optional<double> radius = ctx.adaptive_radius(pts.id(u), snn);
            if (!radius) {
                continue;
            }
            std::vector<std::size_t> members;
            for (PointId id : index->range(pts.coords(u), *radius)) {
                const std::size_t pos = pts.position(id);
                if (!taken[pos]) {
                    members.push_back(pos);
                }
            }
            if (members.size() < config.min_pts) {
                continue;
            }

            MicroCluster mc;
            mc.id = state.next_mc_id++;
            mc.radius = *radius;
            mc.count = members.size();
            mc.center.assign(state.dim, 0.0);
            for (std::size_t pos : members) {
                taken[pos] = 1;
                removed.push_back(pts.id(pos));
                LivePoint& p = state.points[free_slots[pos]];
                p.mc = mc.id;
                for (std::size_t d = 0; d < state.dim; ++d) {
                    mc.center[d] += p.coords[d];
                }
            }
            for (double& c : mc.center) {
                c /= static_cast<double>(members.size());
            }
            state.mcs.emplace(mc.id, std::move(mc));
        }
        if (removed.empty() || pts.size() - removed.size() < min_free) {
            return;
        }

        std::vector<std::size_t> rest;
        for (std::size_t u = 0; u < pts.size(); ++u) {
            if (!taken[u]) {
                rest.push_back(free_slots[u]);
            }
        }
        free_slots = std::move(rest);
        auto next = index->without(removed);
        ctx.rebase(*next);
        index = std::move(next);
        settled.assign(free_slots.size(), 0);
        for (std::size_t u = 0; u < free_slots.size(); ++u) {
            settled[u] = ctx.memoized(index->points().id(u));
        }
    }
}

void add_to_mcs(StreamState& state, const StreamConfig&)
{
    if (state.mcs.empty()) {
        return;
    }
    for (LivePoint& p : state.points) {
        if (p.mc) {
            continue;
        }
        MicroCluster* best = nullptr;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (auto& [id, mc] : state.mcs) {
            const double d2 = squared_distance(p.coords, mc.center);
            // Map iteration is ascending by id, so strict < keeps the smaller id on ties.
            if (within_radius(d2, mc.radius) && d2 < best_d2) {
                best = &mc;
                best_d2 = d2;
            }
        }
        if (best != nullptr) {
            p.mc = best->id;
            ++best->count;
        }
    }
}

void define_macros(StreamState& state, const StreamConfig& config)
{
    std::vector<McId> free_mcs;
    for (const auto& [id, mc] : state.mcs) {
        if (!mc.macro) {
            free_mcs.push_back(id);
        }
    }
    if (free_mcs.size() < std::max<std::size_t>(config.n_micro, 2)) {
        return;
    }
    const Clustering clustering = ktnc(gated_center_graph(state, free_mcs, config.k), config.alpha);
    for (const auto& cluster : clustering.clusters) {
        if (cluster.size() < config.n_micro) {
            continue;
        }
        MacroCluster macro;
        macro.id = state.next_macro_id++;
        macro.mcs.assign(cluster.begin(), cluster.end());
        for (McId id : macro.mcs) {
            state.mcs.at(id).macro = macro.id;
        }
        state.macros.emplace(macro.id, std::move(macro));
    }
}

void add_mc_to_macro(StreamState& state, const StreamConfig&)
{
    for (auto& [id, mc] : state.mcs) {
        if (mc.macro) {
            continue;
        }
        const MicroCluster* best = nullptr;
        std::tuple<double, MacroId, McId> best_key{std::numeric_limits<double>::infinity(), 0, 0};
        for (const auto& [other_id, other] : state.mcs) {
            if (other_id == id || !other.macro || !macro_gate(mc, other)) {
                continue;
            }
            const std::tuple<double, MacroId, McId> key{squared_distance(mc.center, other.center), *other.macro,
                                                        other_id};
            if (best == nullptr || key < best_key) {
                best = &other;
                best_key = key;
            }
        }
        if (best != nullptr) {
            mc.macro = best->macro;
            auto& members = state.macros.at(*best->macro).mcs;
            members.insert(std::upper_bound(members.begin(), members.end(), id), id);
        }
    }
}

void update_mcs(StreamState& state, const StreamConfig&)
{
    std::unordered_map<McId, std::pair<std::size_t, std::vector<double>>> sums;
    for (const LivePoint& p : state.points) {
        if (!p.mc) {
            continue;
        }
        auto& [count, sum] = sums[*p.mc];
        if (sum.empty()) {
            sum.assign(state.dim, 0.0);
        }
        ++count;
        for (std::size_t d = 0; d < state.dim; ++d) {
            sum[d] += p.coords[d];
        }
    }
    for (auto& [id, mc] : state.mcs) {
        auto it = sums.find(id);
        if (it == sums.end()) {
            mc.count = 0;  // center kept; kill_mcs removes it
            continue;
        }
        mc.count = it->second.first;
        for (std::size_t d = 0; d < state.dim; ++d) {
            mc.center[d] = it->second.second[d] / static_cast<double>(mc.count);
        }
    }
}

void update_macros(StreamState& state, const StreamConfig& config)
{
    for (auto& [macro_id, macro] : state.macros) {
        if (macro.mcs.size() < 2) {
            continue;
        }
        const auto components = gated_center_graph(state, macro.mcs, config.k).components();
        // Components are ordered by smallest member, so the first of the
        // largest size wins ties.
        const auto largest = std::max_element(components.begin(), components.end(),
                                              [](const auto& a, const auto& b) { return a.size() < b.size(); });
        for (McId id : macro.mcs) {
            if (!std::binary_search(largest->begin(), largest->end(), id)) {
                state.mcs.at(id).macro.reset();
            }
        }
        macro.mcs.assign(largest->begin(), largest->end());
    }
}

void kill_mcs(StreamState& state, const StreamConfig& config)
{
    std::set<McId> doomed;
    for (const auto& [id, mc] : state.mcs) {
        if (mc.count < config.min_pts) {
            doomed.insert(id);
        }
    }
    if (doomed.empty()) {
        return;
    }
    for (LivePoint& p : state.points) {
        if (p.mc && doomed.count(*p.mc)) {
            p.mc.reset();
        }
    }
    for (McId id : doomed) {
        const auto& mc = state.mcs.at(id);
        if (mc.macro) {
            auto& members = state.macros.at(*mc.macro).mcs;
            members.erase(std::remove(members.begin(), members.end(), id), members.end());
        }
        state.mcs.erase(id);
    }
}

void kill_macros(StreamState& state, const StreamConfig& config)
{
    for (auto it = state.macros.begin(); it != state.macros.end();) {
        if (it->second.mcs.size() < config.n_micro) {
            for (McId id : it->second.mcs) {
                state.mcs.at(id).macro.reset();
            }
            it = state.macros.erase(it);
        } else {
            ++it;
        }
    }
}

void run_pipeline(StreamState& state, const StreamConfig& config)
{
    evict_expired(state, config);
    define_mcs(state, config);
    add_to_mcs(state, config);
    define_macros(state, config);
    add_mc_to_macro(state, config);
    update_mcs(state, config);
    update_macros(state, config);
    kill_mcs(state, config);
    kill_macros(state, config);
}

std::vector<std::string> check_invariants(const StreamState& state, const StreamConfig& config)
{
    std::vector<std::string> issues;
    auto report = [&](std::string s) { issues.push_back(std::move(s)); };

    if (state.points.size() > config.window) {
        report("more than W live points");
    }
    std::unordered_map<McId, std::size_t> counts;
    std::set<PointId> seen_ids;
    std::optional<std::uint64_t> prev_arrival;
    for (const LivePoint& p : state.points) {
        if (!seen_ids.insert(p.id).second) {
            report("duplicate live point id " + std::to_string(p.id));
        }
        if (prev_arrival && p.arrival <= *prev_arrival) {
            report("arrival order broken at point " + std::to_string(p.id));
        }
        prev_arrival = p.arrival;
        if (p.mc) {
            if (!state.mcs.count(*p.mc)) {
                report("point " + std::to_string(p.id) + " references dead micro-cluster");
            }
            ++counts[*p.mc];
        }
    }
    std::unordered_map<McId, MacroId> owner;
    for (const auto& [macro_id, macro] : state.macros) {
        if (macro.id != macro_id || macro_id == 0 || macro_id >= state.next_macro_id) {
            report("bad macro id " + std::to_string(macro_id));
        }
        if (macro.mcs.size() < config.n_micro) {
            report("macro " + std::to_string(macro_id) + " below n_micro");
        }
        if (!std::is_sorted(macro.mcs.begin(), macro.mcs.end())) {
            report("macro " + std::to_string(macro_id) + " member list unsorted");
        }
        for (McId id : macro.mcs) {
            auto it = state.mcs.find(id);
            if (it == state.mcs.end()) {
                report("macro " + std::to_string(macro_id) + " references dead micro-cluster");
                continue;
            }
            if (it->second.macro != macro_id) {
                report("micro-cluster " + std::to_string(id) + " disagrees with its macro");
            }
            if (!owner.emplace(id, macro_id).second) {
                report("micro-cluster " + std::to_string(id) + " in two macros");
            }
        }
    }
    for (const auto& [id, mc] : state.mcs) {
        if (mc.id != id || id == 0 || id >= state.next_mc_id) {
            report("bad micro-cluster id " + std::to_string(id));
        }
        const std::size_t live = counts.count(id) ? counts.at(id) : 0;
        if (mc.count != live) {
            report("micro-cluster " + std::to_string(id) + " count " + std::to_string(mc.count) + " != live " +
                   std::to_string(live));
        }
        if (mc.count < config.min_pts) {
            report("micro-cluster " + std::to_string(id) + " below N");
        }
        if (!(mc.radius > 0.0) || mc.radius > config.r_max) {
            report("micro-cluster " + std::to_string(id) + " radius out of (0, r_max]");
        }
        if (mc.macro && !owner.count(id)) {
            report("micro-cluster " + std::to_string(id) + " claims a macro that does not list it");
        }
    }
    return issues;
}

std::vector<McId> StreamSnapshot::outlier_mcs() const
{
    std::vector<McId> out;
    for (const auto& mc : mcs) {
        if (!mc.macro) {
            out.push_back(mc.id);
        }
    }
    return out;
}

StreamSnapshot snapshot(const StreamState& state)
{
    StreamSnapshot snap;
    snap.step = state.last_arrival.value_or(0);
    snap.points.reserve(state.points.size());
    for (const LivePoint& p : state.points) {
        SnapshotPoint sp{p.id, 0, 0};
        if (p.mc) {
            sp.mc = *p.mc;
            const auto& mc = state.mcs.at(*p.mc);
            sp.macro = mc.macro.value_or(0);
        }
        snap.points.push_back(sp);
    }
    for (const auto& [id, mc] : state.mcs) {
        snap.mcs.push_back(mc);
    }
    for (const auto& [id, macro] : state.macros) {
        snap.macros.push_back(macro);
    }
    return snap;
}

StreamEngine::StreamEngine(StreamConfig config) : config_(std::move(config)) { config_.validate(); }

void StreamEngine::process_point(StreamPoint point)
{
    const std::uint64_t expected = next_arrival();
    if (point.arrival_index != expected) {
        throw Error(Errc::OutOfOrderArrival, "arrival " + std::to_string(point.arrival_index) + ", expected " +
                                                 std::to_string(expected));
    }
    if (state_.dim == 0) {
        if (point.coords.empty()) {
            throw Error(Errc::DimensionMismatch, "point without coordinates");
        }
        state_.dim = point.coords.size();
    } else if (point.coords.size() != state_.dim) {
        throw Error(Errc::DimensionMismatch, "point has " + std::to_string(point.coords.size()) +
                                                 " coordinates, stream has " + std::to_string(state_.dim));
    }
    for (double c : point.coords) {
        if (!std::isfinite(c)) {
            throw Error(Errc::NonFiniteCoordinate, "point " + std::to_string(point.id));
        }
    }
    for (const LivePoint& p : state_.points) {
        if (p.id == point.id) {
            throw Error(Errc::DuplicateId, "point id " + std::to_string(point.id) + " is still live");
        }
    }

    state_.points.push_back({point.id, point.arrival_index, std::move(point.coords), std::nullopt, point.true_label});
    state_.last_arrival = point.arrival_index;
    if (++pending_ >= config_.stride) {
        flush();
    }
}

void StreamEngine::push(std::vector<double> coords, std::optional<long> label)
{
    const std::uint64_t a = next_arrival();
    process_point({a, a, std::move(coords), label});
}

void StreamEngine::flush()
{
    if (pending_ == 0) {
        return;
    }
    pending_ = 0;
    run_pipeline(state_, config_);
}

}  // namespace tnstream
