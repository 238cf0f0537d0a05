#include "tnstream/synthetic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "tnstream/error.hpp"
#include "tnstream/tn_graph.hpp"

namespace tnstream {

namespace {

using Rng = std::mt19937_64;

struct Rows {
    std::vector<std::vector<double>> x;
    std::vector<long> y;

    void add(std::vector<double> p, long label)
    {
        x.push_back(std::move(p));
        y.push_back(label);
    }
};

[[noreturn]] void bad_spec(const std::string& what) { throw Error(Errc::InvalidSpec, what); }

std::vector<double> gaussian(Rng& rng, std::size_t dim, double sigma)
{
    std::normal_distribution<double> g(0.0, sigma);
    std::vector<double> v(dim);
    for (double& c : v) {
        c = g(rng);
    }
    return v;
}

// Uniform in the ball of radius r.
std::vector<double> in_ball(Rng& rng, std::size_t dim, double r)
{
    std::vector<double> v = gaussian(rng, dim, 1.0);
    double norm = 0.0;
    for (double c : v) {
        norm += c * c;
    }
    norm = std::sqrt(norm);
    const double scale = r * std::pow(std::uniform_real_distribution<double>(0.0, 1.0)(rng), 1.0 / dim) / norm;
    for (double& c : v) {
        c *= scale;
    }
    return v;
}

std::vector<double> plus(std::vector<double> a, const std::vector<double>& b)
{
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] += b[i];
    }
    return a;
}

// Centers in a box, pairwise at least `sep` apart, by rejection.
std::vector<std::vector<double>> spread_centers(Rng& rng, std::size_t k, std::size_t dim, double sep)
{
    const double side = sep * std::max<double>(2.0, 2.0 * std::pow(static_cast<double>(k), 1.0 / dim));
    std::uniform_real_distribution<double> u(0.0, side);
    std::vector<std::vector<double>> centers;
    for (int attempt = 0; centers.size() < k; ++attempt) {
        if (attempt > 100000) {
            bad_spec("cannot place cluster centers");
        }
        std::vector<double> c(dim);
        for (double& v : c) {
            v = u(rng);
        }
        const bool ok = std::all_of(centers.begin(), centers.end(),
                                    [&](const auto& o) { return squared_distance(c, o) >= sep * sep; });
        if (ok) {
            centers.push_back(std::move(c));
        }
    }
    return centers;
}

std::size_t share(std::size_t n, std::size_t k, std::size_t i) { return n / k + (i < n % k ? 1 : 0); }

Rows blobs(const BlobsSpec& s, Rng& rng)
{
    if (s.clusters == 0 || s.n < s.clusters || s.dim == 0 || !(s.sigma > 0) || !(s.separation > 0)) {
        bad_spec("blobs needs k >= 1, n >= k, d >= 1, sigma > 0, sep > 0");
    }
    Rows out;
    const auto centers = spread_centers(rng, s.clusters, s.dim, s.separation);
    for (std::size_t c = 0; c < s.clusters; ++c) {
        for (std::size_t i = 0; i < share(s.n, s.clusters, c); ++i) {
            out.add(plus(gaussian(rng, s.dim, s.sigma), centers[c]), static_cast<long>(c + 1));
        }
    }
    return out;
}

Rows rings(const RingsSpec& s, Rng& rng)
{
    if (s.radii.empty() || s.n < s.radii.size() || s.noise < 0 ||
        std::any_of(s.radii.begin(), s.radii.end(), [](double r) { return !(r > 0); })) {
        bad_spec("rings needs positive radii, n >= number of rings, noise >= 0");
    }
    Rows out;
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> jitter(0.0, s.noise > 0 ? s.noise : 1.0);
    for (std::size_t c = 0; c < s.radii.size(); ++c) {
        for (std::size_t i = 0; i < share(s.n, s.radii.size(), c); ++i) {
            const double t = angle(rng);
            const double r = s.radii[c] + (s.noise > 0 ? jitter(rng) : 0.0);
            out.add({r * std::cos(t), r * std::sin(t)}, static_cast<long>(c + 1));
        }
    }
    return out;
}

Rows multi_density(const MultiDensitySpec& s, Rng& rng)
{
    if (s.n_dense == 0 || s.n_sparse == 0 || s.dim == 0 || !(s.sigma_dense > 0) || !(s.sigma_sparse > 0)) {
        bad_spec("multi_density needs positive sizes and sigmas");
    }
    Rows out;
    std::vector<double> far(s.dim, 0.0);
    far[0] = s.separation;
    for (std::size_t i = 0; i < s.n_dense; ++i) {
        out.add(gaussian(rng, s.dim, s.sigma_dense), 1);
    }
    for (std::size_t i = 0; i < s.n_sparse; ++i) {
        out.add(plus(gaussian(rng, s.dim, s.sigma_sparse), far), 2);
    }
    return out;
}

Rows add_instance(const AddInstanceSpec& s, Rng& rng)
{
    if (s.clusters < 2 || s.dim == 0 || !(s.threshold > 0) || !(s.gap > 0) || s.min_size < 2 ||
        s.max_size < s.min_size) {
        bad_spec("add needs k >= 2, thr > 0, gap > 0, 2 <= min <= max");
    }
    // Cluster diameter < 0.9 thr; centers far enough that cross pairs exceed thr + gap.
    const double radius = 0.45 * s.threshold;
    const double sep = 2.0 * radius + s.threshold + s.gap;
    const auto centers = spread_centers(rng, s.clusters, s.dim, sep);
    std::uniform_int_distribution<std::size_t> size(s.min_size, s.max_size);
    Rows out;
    for (std::size_t c = 0; c < s.clusters; ++c) {
        const std::size_t m = size(rng);
        for (std::size_t i = 0; i < m; ++i) {
            out.add(plus(in_ball(rng, s.dim, radius), centers[c]), static_cast<long>(c + 1));
        }
    }
    return out;
}

// Stand-ins for the small benchmark sets (3-D, Table 3 sizes and class
// counts). Blob classes are built from tight clumps of 10 points scattered
// over a ball; rings are thin tubes. Shapes are compact relative to their
// spacing so they stay well separated after min-max scaling.
Rows analogue(const std::string& name, Rng& rng)
{
    Rows out;
    auto clumps = [&](std::size_t m, std::size_t clump, double jitter, long label, auto&& where) {
        for (std::size_t i = 0; i < m; i += clump) {
            const std::vector<double> c = where();
            for (std::size_t j = i; j < std::min(m, i + clump); ++j) {
                out.add(plus(in_ball(rng, 3, jitter), c), label);
            }
        }
    };
    auto ball = [&](std::size_t m, std::vector<double> center, double r, long label) {
        clumps(m, 10, 0.12, label, [&] { return plus(in_ball(rng, 3, r), center); });
    };
    if (name == "n3_k2") {
        ball(200, {0.0, 0.0, 0.0}, 1.0, 1);
        ball(100, {5.2, 3.9, 2.6}, 0.8, 2);
    } else if (name == "n3_k3") {
        ball(150, {0.0, 0.0, 0.0}, 1.0, 1);
        ball(150, {5.2, 0.65, 1.3}, 1.0, 2);
        ball(100, {1.95, 5.2, 3.9}, 0.8, 3);
    } else if (name == "ring") {
        // Two unit circles in perpendicular planes, far apart, with a thin tube.
        std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
        const double off = 12.0;
        for (long c = 1; c <= 2; ++c) {
            clumps(150, 1, 0.1, c, [&] {
                const double t = angle(rng);
                return c == 1 ? std::vector<double>{std::cos(t), std::sin(t), 0.0}
                              : std::vector<double>{off + std::cos(t), off, off + std::sin(t)};
            });
        }
    } else {
        bad_spec("unknown analogue '" + name + "'");
    }
    return out;
}

Rows generate_rows(const SyntheticSpec& spec, Rng& rng);

Rows noisy(const NoisySpec& s, Rng& rng)
{
    if (!s.base || !(s.fraction >= 0.0) || !(s.fraction < 1.0)) {
        bad_spec("noisy needs a base spec and 0 <= fraction < 1");
    }
    Rows out = generate_rows(*s.base, rng);
    const std::size_t dim = out.x.front().size();
    std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
    for (const auto& p : out.x) {
        for (std::size_t d = 0; d < dim; ++d) {
            lo[d] = std::min(lo[d], p[d]);
            hi[d] = std::max(hi[d], p[d]);
        }
    }
    const auto base_n = static_cast<double>(out.x.size());
    const auto m = static_cast<std::size_t>(std::llround(s.fraction * base_n / (1.0 - s.fraction)));
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> p(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            const double pad = 0.05 * (hi[d] - lo[d]);
            p[d] = std::uniform_real_distribution<double>(lo[d] - pad, hi[d] + pad)(rng);
        }
        out.add(std::move(p), 0);
    }
    return out;
}

Rows generate_rows(const SyntheticSpec& spec, Rng& rng)
{
    return std::visit(
        [&](const auto& s) -> Rows {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, BlobsSpec>) {
                return blobs(s, rng);
            } else if constexpr (std::is_same_v<T, RingsSpec>) {
                return rings(s, rng);
            } else if constexpr (std::is_same_v<T, MultiDensitySpec>) {
                return multi_density(s, rng);
            } else if constexpr (std::is_same_v<T, AddInstanceSpec>) {
                return add_instance(s, rng);
            } else if constexpr (std::is_same_v<T, AnalogueSpec>) {
                return analogue(s.name, rng);
            } else {
                return noisy(s, rng);
            }
        },
        spec);
}

// key=value list; values may contain ';' for lists.
std::map<std::string, std::string> parse_kv(std::string_view text)
{
    std::map<std::string, std::string> kv;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto item = text.substr(0, comma);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos || eq == 0) {
            bad_spec("expected key=value, got '" + std::string(item) + "'");
        }
        kv[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    }
    return kv;
}

double to_double(const std::string& key, std::string_view v)
{
    double out = 0.0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || end != v.data() + v.size()) {
        bad_spec("bad number for '" + key + "': '" + std::string(v) + "'");
    }
    return out;
}

std::size_t to_size(const std::string& key, std::string_view v)
{
    std::size_t out = 0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || end != v.data() + v.size()) {
        bad_spec("bad integer for '" + key + "': '" + std::string(v) + "'");
    }
    return out;
}

class Fields {
public:
    explicit Fields(std::string_view text) : kv_(parse_kv(text)) {}

    void get(const char* key, std::size_t& out) { take(key, [&](const std::string& v) { out = to_size(key, v); }); }
    void get(const char* key, double& out) { take(key, [&](const std::string& v) { out = to_double(key, v); }); }
    void get(const char* key, std::vector<double>& out)
    {
        take(key, [&](const std::string& v) {
            out.clear();
            std::string_view rest = v;
            while (!rest.empty()) {
                const auto semi = rest.find(';');
                out.push_back(to_double(key, rest.substr(0, semi)));
                rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
            }
        });
    }
    void done() const
    {
        if (!kv_.empty()) {
            bad_spec("unknown key '" + kv_.begin()->first + "'");
        }
    }

private:
    template <typename F>
    void take(const char* key, F&& f)
    {
        if (auto it = kv_.find(key); it != kv_.end()) {
            f(it->second);
            kv_.erase(it);
        }
    }

    std::map<std::string, std::string> kv_;
};

}  // namespace

std::vector<std::string> analogue_names() { return {"n3_k2", "n3_k3", "ring"}; }

LabeledData generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed)
{
    Rng rng(seed);
    Rows rows = generate_rows(spec, rng);

    std::vector<std::size_t> order(rows.x.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::vector<double>> x;
    std::vector<long> y;
    x.reserve(order.size());
    y.reserve(order.size());
    for (std::size_t i : order) {
        x.push_back(std::move(rows.x[i]));
        y.push_back(rows.y[i]);
    }
    LabeledData out{PointSet::from_rows(x), std::move(y)};

    if (const auto* add = std::get_if<AddInstanceSpec>(&spec)) {
        const SeparabilityReport rep = separability_class(out.points, add->threshold);
        if (rep.cls != Separability::Add || rep.components.size() != add->clusters) {
            bad_spec("generated instance failed ADD certification");
        }
    }
    return out;
}

SyntheticSpec parse_synthetic_spec(std::string_view text)
{
    const auto colon = text.find(':');
    const std::string kind(text.substr(0, colon));
    const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

    if (kind == "noisy") {
        const auto second = rest.find(':');
        if (second == std::string_view::npos) {
            bad_spec("noisy spec is noisy:<fraction>:<base spec>");
        }
        NoisySpec s;
        s.fraction = to_double("fraction", rest.substr(0, second));
        s.base = std::make_shared<const SyntheticSpec>(parse_synthetic_spec(rest.substr(second + 1)));
        return s;
    }
    const auto names = analogue_names();
    if (std::find(names.begin(), names.end(), kind) != names.end()) {
        if (!rest.empty()) {
            bad_spec("analogue '" + kind + "' takes no parameters");
        }
        return AnalogueSpec{kind};
    }

    Fields f(rest);
    if (kind == "blobs") {
        BlobsSpec s;
        f.get("k", s.clusters);
        f.get("n", s.n);
        f.get("d", s.dim);
        f.get("sigma", s.sigma);
        f.get("sep", s.separation);
        f.done();
        return s;
    }
    if (kind == "rings") {
        RingsSpec s;
        f.get("n", s.n);
        f.get("radii", s.radii);
        f.get("noise", s.noise);
        f.done();
        return s;
    }
    if (kind == "multi_density") {
        MultiDensitySpec s;
        f.get("dense", s.n_dense);
        f.get("sparse", s.n_sparse);
        f.get("d", s.dim);
        f.get("sigma_dense", s.sigma_dense);
        f.get("sigma_sparse", s.sigma_sparse);
        f.get("sep", s.separation);
        f.done();
        return s;
    }
    if (kind == "add") {
        AddInstanceSpec s;
        f.get("k", s.clusters);
        f.get("d", s.dim);
        f.get("thr", s.threshold);
        f.get("gap", s.gap);
        f.get("min", s.min_size);
        f.get("max", s.max_size);
        f.done();
        return s;
    }
    bad_spec("unknown generator '" + kind + "'");
}

}  // namespace tnstream
