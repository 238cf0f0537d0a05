#include "tnstream/harness.hpp"

#include <chrono>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "tnstream/error.hpp"

namespace tnstream {

using nlohmann::json;

namespace {

long predicted_label(const StreamState& state, const LivePoint& p)
{
    if (!p.mc) {
        return 0;
    }
    return static_cast<long>(state.mcs.at(*p.mc).macro.value_or(0));
}

json config_json(const StreamConfig& c)
{
    json j = {{"window", c.window}, {"min_pts", c.min_pts}, {"n_micro", c.n_micro}, {"r_max", c.r_max},
              {"k", c.k},           {"tk", c.tk},           {"mk", c.mk},           {"alpha", c.alpha},
              {"stride", c.stride}, {"backend", to_string(c.backend.kind())}};
    if (const auto& lsh = c.backend.lsh_params()) {
        j["num_hyperplanes"] = lsh->num_hyperplanes;
        j["num_tables"] = lsh->num_tables;
        j["seed"] = lsh->seed;
    }
    return j;
}

}  // namespace

Scores ReplayResult::scores(OutlierMode mode) const
{
    if (truth.empty()) {
        throw Error(Errc::Empty, "nothing to score");
    }
    return evaluate(truth, predicted, mode);
}

ReplayResult replay_stream(const PointSet& ps, std::span<const long> labels, StreamEngine& engine,
                           const ReplayOptions& options)
{
    if (!labels.empty() && labels.size() != ps.size()) {
        throw Error(Errc::LengthMismatch,
                    std::to_string(labels.size()) + " labels for " + std::to_string(ps.size()) + " points");
    }
    const auto start = std::chrono::steady_clock::now();
    const std::size_t window = engine.config().window;
    ReplayResult result;

    auto take_snapshot = [&] {
        StreamSnapshot snap = engine.snapshot();
        ++result.snapshot_count;
        if (options.on_snapshot) {
            options.on_snapshot(snap);
        }
        if (options.keep_snapshots) {
            result.snapshots.push_back(std::move(snap));
        }
    };

    // Cumulative mode: last label seen for each row before it was evicted.
    std::vector<long> last_label;
    const bool cumulative = options.window == ScoreWindow::Cumulative;
    if (cumulative) {
        last_label.assign(ps.size(), 0);
    }
    const std::uint64_t base = engine.next_arrival();

    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (cumulative) {
            const auto& st = engine.state();
            const std::size_t at_risk = st.points.size() + 1 > window ? st.points.size() + 1 - window : 0;
            for (std::size_t j = 0; j < at_risk && j < st.points.size(); ++j) {
                const auto& p = st.points[j];
                if (p.arrival >= base) {
                    last_label[p.arrival - base] = predicted_label(st, p);
                }
            }
        }
        const auto c = ps.coords(i);
        std::optional<long> label;
        if (!labels.empty()) {
            label = labels[i];
        }
        const std::uint64_t a = engine.next_arrival();
        engine.process_point({a, a, std::vector<double>(c.begin(), c.end()), label});
        if ((i + 1) % window == 0 && i + 1 < ps.size()) {
            take_snapshot();
        }
    }
    if (!ps.empty()) {
        engine.flush();
        take_snapshot();
    }

    const auto& st = engine.state();
    if (!labels.empty()) {
        if (cumulative) {
            for (const auto& p : st.points) {
                if (p.arrival >= base) {
                    last_label[p.arrival - base] = predicted_label(st, p);
                }
            }
            result.truth.assign(labels.begin(), labels.end());
            result.predicted = std::move(last_label);
        } else {
            for (const auto& p : st.points) {
                if (p.label) {
                    result.truth.push_back(*p.label);
                    result.predicted.push_back(predicted_label(st, p));
                }
            }
        }
    }
    result.n_mc = st.mcs.size();
    result.n_macro = st.macros.size();
    result.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
}

ReplayResult replay_stream(const LabeledData& data, const StreamConfig& config, const ReplayOptions& options)
{
    StreamEngine engine(config);
    return replay_stream(data.points, data.labels, engine, options);
}

std::vector<ScoreRow> run_benchmark(const std::vector<BenchmarkCase>& cases, OutlierMode mode, ScoreWindow window)
{
    std::vector<ScoreRow> rows;
    for (const auto& c : cases) {
        ScoreRow row;
        row.dataset = c.dataset;
        row.backend = to_string(c.config.backend.kind());
        row.config = c.config;
        try {
            const LabeledData data = c.load();
            ReplayOptions opts;
            opts.window = window;
            opts.keep_snapshots = false;
            const ReplayResult r = replay_stream(data, c.config, opts);
            row.wall_ms = r.wall_ms;
            row.n_mc = r.n_mc;
            row.n_macro = r.n_macro;
            row.scores = r.scores(mode);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string config_to_json(const StreamConfig& config) { return config_json(config).dump(); }

std::string score_row_to_json(const ScoreRow& row)
{
    json j = {{"dataset", row.dataset},
              {"backend", row.backend},
              {"purity", row.scores.purity},
              {"ari", row.scores.ari},
              {"nmi", row.scores.nmi},
              {"wall_ms", row.wall_ms},
              {"n_mc", row.n_mc},
              {"n_macro", row.n_macro},
              {"params", config_json(row.config)}};
    if (!row.ok()) {
        j["error"] = row.error;
    }
    return j.dump();
}

void write_scorecard_jsonl(std::ostream& out, const std::vector<ScoreRow>& rows)
{
    for (const auto& r : rows) {
        out << score_row_to_json(r) << '\n';
    }
}

void write_scorecard_table(std::ostream& out, const std::vector<ScoreRow>& rows)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-16s %-9s %8s %8s %8s %10s %6s %7s\n", "dataset", "backend", "purity", "ari",
                  "nmi", "wall_ms", "n_mc", "n_macro");
    out << buf;
    for (const auto& r : rows) {
        if (!r.ok()) {
            out << r.dataset << "  " << r.backend << "  FAILED: " << r.error << '\n';
            continue;
        }
        std::snprintf(buf, sizeof buf, "%-16s %-9s %8.5f %8.5f %8.5f %10.1f %6zu %7zu\n", r.dataset.c_str(),
                      r.backend.c_str(), r.scores.purity, r.scores.ari, r.scores.nmi, r.wall_ms, r.n_mc, r.n_macro);
        out << buf;
    }
}

}  // namespace tnstream
