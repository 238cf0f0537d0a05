#include "tnstream/tn_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <string>
#include <unordered_set>

#include "tnstream/error.hpp"
#include "tnstream/spatial_index.hpp"

namespace tnstream {

TnGraph::TnGraph(std::size_t k, std::vector<PointId> ids,
                 std::vector<std::vector<std::pair<std::size_t, double>>> adjacency)
    : k_(k), ids_(std::move(ids))
{
    if (adjacency.size() != ids_.size()) {
        throw Error(Errc::LengthMismatch, "adjacency size differs from vertex count");
    }
    pos_.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (!pos_.emplace(ids_[i], i).second) {
            throw Error(Errc::DuplicateId, "vertex " + std::to_string(ids_[i]));
        }
    }
    adj_.resize(ids_.size());
    for (std::size_t i = 0; i < adjacency.size(); ++i) {
        auto& arcs = adj_[i];
        arcs.reserve(adjacency[i].size());
        for (const auto& [p, w] : adjacency[i]) {
            if (p >= ids_.size() || p == i) {
                throw Error(Errc::InvalidArgument, "bad edge endpoint");
            }
            arcs.push_back({p, w});
        }
        std::sort(arcs.begin(), arcs.end(), [&](const Arc& a, const Arc& b) { return ids_[a.pos] < ids_[b.pos]; });
    }
}

std::size_t TnGraph::position(PointId id) const
{
    auto it = pos_.find(id);
    if (it == pos_.end()) {
        throw Error(Errc::UnknownId, "vertex " + std::to_string(id));
    }
    return it->second;
}

std::vector<TnGraph::Edge> TnGraph::neighbors(PointId id) const
{
    std::vector<Edge> out;
    for (const Arc& a : adj_[position(id)]) {
        out.push_back({ids_[a.pos], a.weight});
    }
    return out;
}

std::size_t TnGraph::degree(PointId id) const { return adj_[position(id)].size(); }

bool TnGraph::has_edge(PointId a, PointId b) const
{
    const std::size_t pa = position(a);
    const std::size_t pb = position(b);
    const auto& arcs = adj_[pa];
    return std::any_of(arcs.begin(), arcs.end(), [&](const Arc& arc) { return arc.pos == pb; });
}

std::size_t TnGraph::edge_count() const noexcept
{
    std::size_t twice = 0;
    for (const auto& arcs : adj_) {
        twice += arcs.size();
    }
    return twice / 2;
}

std::vector<TnGraph::WeightedEdge> TnGraph::edges() const
{
    std::vector<WeightedEdge> out;
    for (std::size_t i = 0; i < adj_.size(); ++i) {
        for (const Arc& a : adj_[i]) {
            if (ids_[i] < ids_[a.pos]) {
                out.push_back({ids_[i], ids_[a.pos], a.weight});
            }
        }
    }
    std::sort(out.begin(), out.end(),
              [](const WeightedEdge& x, const WeightedEdge& y) { return x.a < y.a || (x.a == y.a && x.b < y.b); });
    return out;
}

TnGraph TnGraph::filter_edges(const std::function<bool(PointId, PointId, double)>& keep) const
{
    std::vector<std::vector<std::pair<std::size_t, double>>> adjacency(ids_.size());
    for (std::size_t i = 0; i < adj_.size(); ++i) {
        for (const Arc& a : adj_[i]) {
            // Evaluate each undirected edge once, from the smaller id, so an
            // asymmetric predicate cannot break symmetry.
            const PointId lo = std::min(ids_[i], ids_[a.pos]);
            const PointId hi = std::max(ids_[i], ids_[a.pos]);
            if (keep(lo, hi, a.weight)) {
                adjacency[i].emplace_back(a.pos, a.weight);
            }
        }
    }
    return TnGraph(k_, ids_, std::move(adjacency));
}

TnGraph TnGraph::without(std::span<const PointId> removed) const
{
    std::vector<char> drop(ids_.size(), 0);
    for (PointId id : removed) {
        drop[position(id)] = 1;
    }
    std::vector<std::size_t> remap(ids_.size(), 0);
    std::vector<PointId> ids;
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (!drop[i]) {
            remap[i] = ids.size();
            ids.push_back(ids_[i]);
        }
    }
    std::vector<std::vector<std::pair<std::size_t, double>>> adjacency(ids.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (drop[i]) {
            continue;
        }
        for (const Arc& a : adj_[i]) {
            if (!drop[a.pos]) {
                adjacency[remap[i]].emplace_back(remap[a.pos], a.weight);
            }
        }
    }
    return TnGraph(k_, std::move(ids), std::move(adjacency));
}

std::vector<std::vector<PointId>> TnGraph::components() const
{
    std::vector<std::size_t> order(ids_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids_[a] < ids_[b]; });

    std::vector<char> seen(ids_.size(), 0);
    std::vector<std::vector<PointId>> out;
    std::vector<std::size_t> stack;
    for (std::size_t start : order) {
        if (seen[start]) {
            continue;
        }
        std::vector<PointId> comp;
        seen[start] = 1;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            comp.push_back(ids_[v]);
            for (const Arc& a : adj_[v]) {
                if (!seen[a.pos]) {
                    seen[a.pos] = 1;
                    stack.push_back(a.pos);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    return out;
}

std::vector<std::vector<std::size_t>> knn_positions(const PointSet& ps, std::size_t k)
{
    std::vector<std::vector<std::size_t>> out(ps.size());
    if (k == 0 || ps.empty()) {
        return out;
    }
    const auto index = build_index(ps, IndexBackend::kd_tree());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        for (const Neighbor& nb : index->knn(ps.id(i), k)) {
            out[i].push_back(ps.position(nb.id));
        }
    }
    return out;
}

namespace {

void check_k_below_size(const PointSet& ps, std::size_t k)
{
    if (k >= ps.size()) {
        throw Error(Errc::KTooLarge,
                    "k = " + std::to_string(k) + " must be smaller than the point count " + std::to_string(ps.size()));
    }
}

// Mutual-kNN adjacency by position.
std::vector<std::vector<std::size_t>> mutual_positions(const PointSet& ps, std::size_t k)
{
    auto knn = knn_positions(ps, k);
    for (auto& list : knn) {
        std::sort(list.begin(), list.end());
    }
    std::vector<std::vector<std::size_t>> mutual(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        for (std::size_t j : knn[i]) {
            if (std::binary_search(knn[j].begin(), knn[j].end(), i)) {
                mutual[i].push_back(j);
            }
        }
    }
    return mutual;
}

}  // namespace

std::vector<std::vector<PointId>> tightest_neighbors(const PointSet& ps, std::size_t k)
{
    check_k_below_size(ps, k);
    const auto mutual = mutual_positions(ps, k);
    std::vector<std::vector<PointId>> out(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        for (std::size_t j : mutual[i]) {
            out[i].push_back(ps.id(j));
        }
        std::sort(out[i].begin(), out[i].end());
    }
    return out;
}

TnGraph tn_graph(const PointSet& ps, std::size_t k)
{
    check_k_below_size(ps, k);
    const auto mutual = mutual_positions(ps, k);
    std::vector<std::vector<std::pair<std::size_t, double>>> adjacency(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        for (std::size_t j : mutual[i]) {
            adjacency[i].emplace_back(j, distance(ps.coords(i), ps.coords(j)));
        }
    }
    std::vector<PointId> ids(ps.ids().begin(), ps.ids().end());
    return TnGraph(k, std::move(ids), std::move(adjacency));
}

std::vector<PointId> closure(const TnGraph& graph, std::span<const PointId> seed, std::size_t s)
{
    if (s == 0) {
        throw Error(Errc::InvalidArgument, "closure multiplicity must be at least 1");
    }
    std::vector<char> in(graph.size(), 0);
    std::vector<std::size_t> frontier;
    for (PointId id : seed) {
        const std::size_t p = graph.position(id);
        if (!in[p]) {
            in[p] = 1;
            frontier.push_back(p);
        }
    }
    // Only the members added by the previous pass can contribute new points.
    for (std::size_t pass = 0; pass < s && !frontier.empty(); ++pass) {
        std::vector<std::size_t> next;
        for (std::size_t p : frontier) {
            for (const auto& arc : graph.arcs(p)) {
                if (!in[arc.pos]) {
                    in[arc.pos] = 1;
                    next.push_back(arc.pos);
                }
            }
        }
        frontier = std::move(next);
    }
    std::vector<PointId> out;
    for (std::size_t p = 0; p < graph.size(); ++p) {
        if (in[p]) {
            out.push_back(graph.ids()[p]);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<PointId> mtncis(const TnGraph& graph, PointId x)
{
    const PointId seed[] = {x};
    return closure(graph, seed, std::max<std::size_t>(graph.size(), 1));
}

TnofReport tnof_scores(const TnGraph& graph)
{
    TnofReport report;
    report.ids.assign(graph.ids().begin(), graph.ids().end());
    report.scores.reserve(graph.size());
    for (std::size_t p = 0; p < graph.size(); ++p) {
        const auto arcs = graph.arcs(p);
        if (arcs.empty()) {
            report.scores.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        double sum = 0.0;
        for (const auto& a : arcs) {
            sum += a.weight;
        }
        const double m = static_cast<double>(arcs.size());
        report.scores.push_back(sum / (m * m));
    }
    return report;
}

TnofReport tnof_scores(const PointSet& ps, std::size_t k)
{
    if (k == 0) {
        throw Error(Errc::InvalidArgument, "TNOF needs k >= 1");
    }
    return tnof_scores(tn_graph(ps, k));
}

double outlier_threshold(std::span<const double> scores, double alpha)
{
    double sum = 0.0;
    std::size_t n = 0;
    for (double s : scores) {
        if (std::isfinite(s)) {
            sum += s;
            ++n;
        }
    }
    if (n == 0) {
        throw Error(Errc::AllScoresInfinite, "every point lacks tightest neighbors");
    }
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double s : scores) {
        if (std::isfinite(s)) {
            ss += (s - mean) * (s - mean);
        }
    }
    return mean + alpha * std::sqrt(ss / static_cast<double>(n));
}

std::vector<PointId> detect_outliers(TnofReport& report, double alpha)
{
    report.alpha = alpha;
    report.theta = outlier_threshold(report.scores, alpha);
    std::vector<PointId> out;
    for (std::size_t i = 0; i < report.scores.size(); ++i) {
        const double s = report.scores[i];
        if (std::isinf(s) || s > report.theta) {
            out.push_back(report.ids[i]);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<long> Clustering::labels_for(std::span<const PointId> ids) const
{
    std::unordered_map<PointId, long> label;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        for (PointId id : clusters[c]) {
            label[id] = static_cast<long>(c + 1);
        }
    }
    for (PointId id : outliers) {
        label[id] = 0;
    }
    std::vector<long> out;
    out.reserve(ids.size());
    for (PointId id : ids) {
        auto it = label.find(id);
        if (it == label.end()) {
            throw Error(Errc::UnknownId, "point " + std::to_string(id) + " is not in the clustering");
        }
        out.push_back(it->second);
    }
    return out;
}

Clustering ktnc(const TnGraph& graph, double alpha)
{
    Clustering result;
    if (graph.size() == 0) {
        return result;
    }
    TnofReport report = tnof_scores(graph);
    try {
        result.outliers = detect_outliers(report, alpha);
    } catch (const Error& e) {
        if (e.code() != Errc::AllScoresInfinite) {
            throw;
        }
        result.outliers.assign(graph.ids().begin(), graph.ids().end());
        std::sort(result.outliers.begin(), result.outliers.end());
        return result;
    }
    result.clusters = graph.without(result.outliers).components();
    return result;
}

Clustering ktnc(const PointSet& ps, std::size_t k, double alpha)
{
    if (ps.empty()) {
        throw Error(Errc::EmptyPointSet, "ktnc on an empty point set");
    }
    if (k == 0) {
        throw Error(Errc::InvalidArgument, "ktnc needs k >= 1");
    }
    return ktnc(tn_graph(ps, k), alpha);
}

const char* to_string(Separability s) noexcept
{
    switch (s) {
    case Separability::Add: return "ADD";
    case Separability::Cd: return "CD";
    case Separability::None: return "None";
    }
    return "unknown";
}

SeparabilityReport separability_class(const PointSet& ps, double d)
{
    if (!(d > 0.0) || !std::isfinite(d)) {
        throw Error(Errc::NonpositiveThreshold, "threshold must be positive and finite");
    }
    SeparabilityReport report;
    report.threshold = d;
    if (ps.empty()) {
        return report;
    }

    const auto index = build_index(ps, IndexBackend::kd_tree());
    std::vector<std::vector<std::pair<std::size_t, double>>> adjacency(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        for (PointId j : index->range(ps.coords(i), d)) {
            const std::size_t pj = ps.position(j);
            if (pj != i) {
                adjacency[i].emplace_back(pj, 0.0);
            }
        }
    }
    std::vector<PointId> ids(ps.ids().begin(), ps.ids().end());
    const TnGraph threshold_graph(0, std::move(ids), std::move(adjacency));
    report.components = threshold_graph.components();

    if (report.components.size() < 2) {
        report.cls = Separability::None;
        return report;
    }
    bool cliques = true;
    for (const auto& comp : report.components) {
        for (std::size_t a = 0; a < comp.size() && cliques; ++a) {
            const std::size_t pa = ps.position(comp[a]);
            if (threshold_graph.arcs(pa).size() != comp.size() - 1) {
                cliques = false;
            }
        }
        if (!cliques) {
            break;
        }
    }
    report.cls = cliques ? Separability::Add : Separability::Cd;
    return report;
}

bool verify_add_tightness(const PointSet& ps, const SeparabilityReport& report)
{
    if (report.cls != Separability::Add) {
        throw Error(Errc::NotAdd, "report is not absolutely distance dividable");
    }
    std::set<std::size_t> sizes;
    for (const auto& comp : report.components) {
        sizes.insert(comp.size());
    }
    for (std::size_t m : sizes) {
        if (m < 2) {
            continue;  // TN(0, x) = {x}
        }
        const auto tn = tightest_neighbors(ps, m - 1);
        for (const auto& comp : report.components) {
            if (comp.size() != m) {
                continue;
            }
            for (PointId x : comp) {
                std::vector<PointId> expected;
                std::copy_if(comp.begin(), comp.end(), std::back_inserter(expected),
                             [x](PointId y) { return y != x; });
                if (tn[ps.position(x)] != expected) {
                    return false;
                }
            }
        }
    }
    return true;
}

bool is_prototype_point(const PointSet& ps, const Clustering& clustering, PointId x)
{
    if (std::binary_search(clustering.outliers.begin(), clustering.outliers.end(), x)) {
        throw Error(Errc::OutlierPoint, "point " + std::to_string(x) + " is an outlier");
    }
    const std::vector<PointId>* own = nullptr;
    for (const auto& c : clustering.clusters) {
        if (std::binary_search(c.begin(), c.end(), x)) {
            own = &c;
            break;
        }
    }
    if (own == nullptr) {
        throw Error(Errc::UnknownId, "point " + std::to_string(x) + " is not in any cluster");
    }
    const auto cx = ps.coords_of(x);
    double own_max = 0.0;
    for (PointId y : *own) {
        if (y != x) {
            own_max = std::max(own_max, squared_distance(cx, ps.coords_of(y)));
        }
    }
    for (const auto& c : clustering.clusters) {
        if (&c == own) {
            continue;
        }
        for (PointId y : c) {
            if (!(own_max < squared_distance(cx, ps.coords_of(y)))) {
                return false;
            }
        }
    }
    return true;
}

bool verify_skeleton_set(const PointSet& ps, std::size_t k, const std::vector<std::vector<PointId>>& subsets,
                         const Clustering& clustering)
{
    if (subsets.size() != clustering.K()) {
        throw Error(Errc::LengthMismatch, "one subset per cluster is required");
    }
    for (std::size_t i = 0; i < subsets.size(); ++i) {
        const auto& cluster = clustering.clusters[i];
        for (PointId id : subsets[i]) {
            if (!std::binary_search(cluster.begin(), cluster.end(), id)) {
                throw Error(Errc::SubsetNotContained,
                            "point " + std::to_string(id) + " is not in cluster " + std::to_string(i + 1));
            }
        }
    }
    const TnGraph graph = tn_graph(ps, k).without(clustering.outliers);
    for (std::size_t i = 0; i < subsets.size(); ++i) {
        if (closure(graph, subsets[i], std::max<std::size_t>(graph.size(), 1)) != clustering.clusters[i]) {
            return false;
        }
    }
    return true;
}

std::optional<std::size_t> minimal_recovering_k(const PointSet& ps, std::span<const long> labels, double alpha,
                                                std::size_t max_k)
{
    if (labels.size() != ps.size()) {
        throw Error(Errc::LengthMismatch, "one label per point is required");
    }
    const std::set<long> classes(labels.begin(), labels.end());
    const std::size_t upper = std::min(max_k, ps.size() - 1);
    for (std::size_t k = 1; k <= upper; ++k) {
        const Clustering c = ktnc(ps, k, alpha);
        if (c.K() != classes.size()) {
            continue;
        }
        std::set<long> used;
        bool ok = true;
        for (const auto& cluster : c.clusters) {
            const long label = labels[ps.position(cluster.front())];
            for (PointId id : cluster) {
                ok = ok && labels[ps.position(id)] == label;
            }
            ok = ok && used.insert(label).second;
        }
        if (ok) {
            return k;
        }
    }
    return std::nullopt;
}

}  // namespace tnstream
