// tnstream: run, generate, bench and ktnc subcommands over the core library.
//
// Exit codes: 0 success, 1 configuration error, 2 data error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tnstream/tnstream.hpp"

namespace {

using namespace tnstream;

constexpr int exit_config = 1;
constexpr int exit_data = 2;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flags shared by run and bench. Names follow the parameter symbols.
struct StreamFlags {
    StreamConfig cfg;
    std::string backend = "kdtree";
    std::size_t num_hashes = 40;
    std::size_t lsh_tables = 4;
    std::uint64_t seed = 0;

    void add_to(CLI::App& app)
    {
        app.add_option("--window", cfg.window, "Window width W (live points)")->capture_default_str();
        app.add_option("--min-pts", cfg.min_pts, "Micro-cluster threshold N")->capture_default_str();
        app.add_option("--n-micro", cfg.n_micro, "Macro-cluster threshold n_micro")->capture_default_str();
        app.add_option("--r-max", cfg.r_max, "Maximum micro-cluster radius")->capture_default_str();
        app.add_option("--k", cfg.k, "Tightest-neighbor level over micro-clusters")->capture_default_str();
        app.add_option("--tk", cfg.tk, "SNN neighborhood size")->capture_default_str();
        app.add_option("--mk", cfg.mk, "SNN shared-count threshold")->capture_default_str();
        app.add_option("--alpha", cfg.alpha, "TNOF threshold multiplier")->capture_default_str();
        app.add_option("--backend", backend, "kdtree | balltree | lsh")->capture_default_str();
        app.add_option("--num-hashes", num_hashes, "LSH hyperplanes in total (split over tables)")
            ->capture_default_str();
        app.add_option("--lsh-tables", lsh_tables, "LSH hash tables")->capture_default_str();
        app.add_option("--seed", seed, "Seed for LSH hyperplanes and generators")->capture_default_str();
        app.add_option("--stride", cfg.stride, "Arrivals per pipeline pass")->capture_default_str();
    }

    StreamConfig resolve(const std::string& backend_name) const
    {
        StreamConfig out = cfg;
        const auto kind = parse_backend(backend_name);
        if (!kind) {
            throw ConfigError("unknown backend '" + backend_name + "'");
        }
        switch (*kind) {
        case BackendKind::KdTree:
            out.backend = IndexBackend::kd_tree();
            break;
        case BackendKind::BallTree:
            out.backend = IndexBackend::ball_tree();
            break;
        case BackendKind::Lsh:
            if (lsh_tables == 0 || num_hashes % lsh_tables != 0) {
                throw ConfigError("--num-hashes must be a positive multiple of --lsh-tables");
            }
            out.backend = IndexBackend::lsh(num_hashes / lsh_tables, lsh_tables, seed);
            break;
        }
        out.validate();
        return out;
    }
};

// Where the points come from: a CSV file or a generator spec.
struct DataFlags {
    std::string input;
    std::string generate;
    bool no_labels = false;
    bool raw = false;

    void add_to(CLI::App& app)
    {
        app.add_option("--input", input, "CSV dataset (features, then an integer label)");
        app.add_option("--generate", generate, "Synthetic generator spec instead of --input");
        app.add_flag("--no-labels", no_labels, "The CSV has no label column");
        app.add_flag("--raw", raw, "Skip min-max normalization");
    }

    LabeledData load(std::uint64_t seed) const
    {
        if (input.empty() == generate.empty()) {
            throw ConfigError("exactly one of --input and --generate is required");
        }
        if (!input.empty()) {
            return load_csv(input, !no_labels, !raw);
        }
        LabeledData d = generate_synthetic(parse_synthetic_spec(generate), seed);
        if (!raw) {
            d.points = normalize_minmax(d.points);
        }
        return d;
    }
};

OutlierMode parse_mode(const std::string& s)
{
    if (s == "as-cluster") {
        return OutlierMode::AsCluster;
    }
    if (s == "exclude") {
        return OutlierMode::Exclude;
    }
    throw ConfigError("unknown metrics mode '" + s + "'");
}

ScoreWindow parse_window(const std::string& s)
{
    if (s == "final") {
        return ScoreWindow::Final;
    }
    if (s == "cumulative") {
        return ScoreWindow::Cumulative;
    }
    throw ConfigError("unknown score window '" + s + "'");
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw Error(Errc::Io, "cannot write " + path);
    }
    return out;
}

int classify(Errc code)
{
    switch (code) {
    case Errc::InvalidConfig:
    case Errc::InvalidSpec:
    case Errc::InvalidArgument:
    case Errc::KTooLarge:
        return exit_config;
    default:
        return exit_data;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Tightest-neighbor stream clustering"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Replay a dataset through the stream engine");
    StreamFlags run_stream;
    DataFlags run_data;
    std::string snapshots_path;
    std::string metrics_mode = "as-cluster";
    std::string score_window = "final";
    run_stream.add_to(*run);
    run_data.add_to(*run);
    run->add_option("--snapshots", snapshots_path, "Write JSON-lines snapshots here");
    run->add_option("--metrics-mode", metrics_mode, "as-cluster | exclude (predicted outliers)")
        ->capture_default_str();
    run->add_option("--score-window", score_window, "final | cumulative")->capture_default_str();

    // generate
    auto* gen = app.add_subcommand("generate", "Write a synthetic labeled dataset as CSV");
    std::string gen_spec;
    std::string gen_out;
    std::uint64_t gen_seed = 0;
    gen->add_option("--spec", gen_spec, "Generator spec, e.g. blobs:k=3,n=300,d=2")->required();
    gen->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
    gen->add_option("--output", gen_out, "CSV path (default: stdout)");

    // bench
    auto* bench = app.add_subcommand("bench", "Score several datasets and backends");
    StreamFlags bench_stream;
    std::vector<std::string> bench_inputs;
    std::vector<std::string> bench_specs;
    std::vector<std::string> bench_backends;
    std::string bench_jsonl;
    std::string bench_table;
    std::string bench_mode = "as-cluster";
    bool bench_raw = false;
    bench_stream.add_to(*bench);
    bench->add_option("--input", bench_inputs, "Labeled CSV dataset (repeatable)");
    bench->add_option("--generate", bench_specs, "Generator spec (repeatable)");
    bench->add_option("--backends", bench_backends, "Backends to compare (default: --backend)")->delimiter(',');
    bench->add_option("--output", bench_jsonl, "Scorecard JSON-lines path (default: stdout)");
    bench->add_option("--table", bench_table, "Plain-text scorecard path");
    bench->add_option("--metrics-mode", bench_mode, "as-cluster | exclude")->capture_default_str();
    bench->add_flag("--raw", bench_raw, "Skip min-max normalization");

    // ktnc
    auto* kt = app.add_subcommand("ktnc", "Static tightest-neighbor clustering of a dataset");
    DataFlags kt_data;
    std::size_t kt_k = 4;
    double kt_alpha = 1.0;
    std::uint64_t kt_seed = 0;
    kt_data.add_to(*kt);
    kt->add_option("--k", kt_k, "Tightest-neighbor level")->capture_default_str();
    kt->add_option("--alpha", kt_alpha, "TNOF threshold multiplier")->capture_default_str();
    kt->add_option("--seed", kt_seed, "Generator seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }

    try {
        if (*run) {
            const StreamConfig cfg = run_stream.resolve(run_stream.backend);
            const OutlierMode mode = parse_mode(metrics_mode);
            ReplayOptions opts;
            opts.window = parse_window(score_window);
            opts.keep_snapshots = false;
            std::ofstream snaps;
            if (!snapshots_path.empty()) {
                snaps = open_out(snapshots_path);
                opts.on_snapshot = [&](const StreamSnapshot& s) { snaps << snapshot_to_json(s) << '\n'; };
            }
            const LabeledData data = run_data.load(run_stream.seed);
            const ReplayResult r = replay_stream(data, cfg, opts);

            nlohmann::json out = {{"points", data.points.size()},
                                  {"snapshots", r.snapshot_count},
                                  {"n_mc", r.n_mc},
                                  {"n_macro", r.n_macro},
                                  {"wall_ms", r.wall_ms},
                                  {"params", nlohmann::json::parse(config_to_json(cfg))}};
            if (!r.truth.empty()) {
                const Scores s = r.scores(mode);
                out["purity"] = s.purity;
                out["ari"] = s.ari;
                out["nmi"] = s.nmi;
            }
            std::cout << out.dump() << '\n';
        } else if (*gen) {
            const LabeledData data = generate_synthetic(parse_synthetic_spec(gen_spec), gen_seed);
            if (gen_out.empty()) {
                write_csv(std::cout, data);
            } else {
                auto out = open_out(gen_out);
                write_csv(out, data);
            }
        } else if (*bench) {
            const OutlierMode mode = parse_mode(bench_mode);
            if (bench_backends.empty()) {
                bench_backends.push_back(bench_stream.backend);
            }
            std::vector<BenchmarkCase> cases;
            for (const auto& backend : bench_backends) {
                const StreamConfig cfg = bench_stream.resolve(backend);
                for (const auto& path : bench_inputs) {
                    cases.push_back({path, [path, bench_raw] { return load_csv(path, true, !bench_raw); }, cfg});
                }
                for (const auto& spec : bench_specs) {
                    DataFlags df;
                    df.generate = spec;
                    df.raw = bench_raw;
                    const std::uint64_t seed = bench_stream.seed;
                    cases.push_back({spec, [df, seed] { return df.load(seed); }, cfg});
                }
            }
            const auto rows = run_benchmark(cases, mode);
            if (bench_jsonl.empty()) {
                write_scorecard_jsonl(std::cout, rows);
            } else {
                auto out = open_out(bench_jsonl);
                write_scorecard_jsonl(out, rows);
            }
            if (!bench_table.empty()) {
                auto out = open_out(bench_table);
                write_scorecard_table(out, rows);
            }
        } else if (*kt) {
            const LabeledData data = kt_data.load(kt_seed);
            const TnGraph graph = tn_graph(data.points, kt_k);
            TnofReport report = tnof_scores(graph);
            const Clustering c = ktnc(graph, kt_alpha);
            nlohmann::json scores = nlohmann::json::array();
            for (double s : report.scores) {
                scores.push_back(std::isfinite(s) ? nlohmann::json(s) : nlohmann::json(nullptr));
            }
            nlohmann::json out = {{"k", kt_k},
                                  {"alpha", kt_alpha},
                                  {"K", c.K()},
                                  {"clusters", c.clusters},
                                  {"outliers", c.outliers},
                                  {"tnof", scores}};  // null = infinite
            if (c.K() > 0) {
                out["theta"] = outlier_threshold(report.scores, kt_alpha);
            }
            if (!data.labels.empty()) {
                const auto pred = c.labels_for(data.points.ids());
                const Scores s = evaluate(data.labels, pred);
                out["purity"] = s.purity;
                out["ari"] = s.ari;
                out["nmi"] = s.nmi;
            }
            std::cout << out.dump() << '\n';
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const Error& e) {
        std::cerr << (classify(e.code()) == exit_config ? "config error: " : "data error: ") << e.what() << '\n';
        return classify(e.code());
    }
    return 0;
}
