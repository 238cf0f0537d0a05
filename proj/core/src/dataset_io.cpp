#include "tnstream/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "tnstream/error.hpp"

namespace tnstream {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) {
            return out;
        }
        start = comma + 1;
    }
}

template <typename T>
std::optional<T> parse_number(std::string_view s)
{
    T v{};
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
        return std::nullopt;
    }
    return v;
}

// Labels may be written as integral reals ("2.0").
std::optional<long> parse_label(std::string_view s)
{
    if (auto v = parse_number<long>(s)) {
        return v;
    }
    if (auto d = parse_number<double>(s); d && std::isfinite(*d) && *d == std::floor(*d)) {
        return static_cast<long>(*d);
    }
    return std::nullopt;
}

std::string row_tag(std::size_t line) { return "row " + std::to_string(line); }

}  // namespace

void normalize_minmax(std::vector<std::vector<double>>& rows)
{
    if (rows.empty()) {
        return;
    }
    const std::size_t dim = rows.front().size();
    for (std::size_t d = 0; d < dim; ++d) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& r : rows) {
            lo = std::min(lo, r[d]);
            hi = std::max(hi, r[d]);
        }
        const double span = hi - lo;
        for (auto& r : rows) {
            r[d] = span > 0.0 ? (r[d] - lo) / span : 0.0;
        }
    }
}

PointSet normalize_minmax(const PointSet& ps)
{
    std::vector<std::vector<double>> rows;
    rows.reserve(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto c = ps.coords(i);
        rows.emplace_back(c.begin(), c.end());
    }
    normalize_minmax(rows);
    PointSet out(ps.dim());
    out.reserve(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        out.add(ps.id(i), rows[i]);
    }
    return out;
}

LabeledData read_csv(std::istream& in, bool has_labels, bool normalize)
{
    std::vector<std::vector<double>> rows;
    std::vector<long> labels;
    std::optional<std::size_t> arity;
    std::string line;
    std::size_t line_no = 0;
    bool first_content = true;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_fields(line);
        const std::size_t n_features = has_labels ? fields.size() - 1 : fields.size();
        if (has_labels && fields.size() < 2) {
            throw Error(Errc::ArityMismatch, row_tag(line_no) + ": expected features and a label");
        }

        std::vector<double> row;
        row.reserve(n_features);
        bool numeric = true;
        for (std::size_t f = 0; f < n_features && numeric; ++f) {
            auto v = parse_number<double>(fields[f]);
            numeric = v.has_value();
            if (numeric) {
                row.push_back(*v);
            }
        }
        std::optional<long> label;
        if (numeric && has_labels) {
            label = parse_label(fields.back());
            numeric = label.has_value();
        }
        if (!numeric) {
            if (first_content) {
                first_content = false;  // header
                continue;
            }
            throw Error(Errc::ParseError, row_tag(line_no) + ": not a number");
        }
        first_content = false;

        if (!arity) {
            arity = fields.size();
        } else if (*arity != fields.size()) {
            throw Error(Errc::ArityMismatch, row_tag(line_no) + ": " + std::to_string(fields.size()) +
                                                 " fields, expected " + std::to_string(*arity));
        }
        for (double v : row) {
            if (!std::isfinite(v)) {
                throw Error(Errc::ParseError, row_tag(line_no) + ": non-finite value");
            }
        }
        rows.push_back(std::move(row));
        if (label) {
            labels.push_back(*label);
        }
    }
    if (rows.empty()) {
        throw Error(Errc::ParseError, "no data rows");
    }
    if (normalize) {
        normalize_minmax(rows);
    }
    return {PointSet::from_rows(rows), std::move(labels)};
}

LabeledData load_csv(const std::filesystem::path& path, bool has_labels, bool normalize)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(Errc::Io, "cannot open " + path.string());
    }
    return read_csv(in, has_labels, normalize);
}

void write_csv(std::ostream& out, const LabeledData& data)
{
    const auto& ps = data.points;
    out << std::setprecision(17);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto c = ps.coords(i);
        for (std::size_t d = 0; d < c.size(); ++d) {
            out << (d ? "," : "") << c[d];
        }
        if (!data.labels.empty()) {
            out << ',' << data.labels[i];
        }
        out << '\n';
    }
}

}  // namespace tnstream
