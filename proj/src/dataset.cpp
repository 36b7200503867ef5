#include "dropcol/dataset.hpp"

#include "dropcol/error.hpp"
#include "dropcol/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

namespace dropcol {

namespace {

constexpr std::array<std::string_view, 5> kBaseNames{"we", "b", "delta", "p", "mu"};
constexpr std::array<std::string_view, 8> kDomainNames{"we", "b", "delta", "p", "mu", "c1", "c2", "c3"};
constexpr std::array<std::string_view, 6> kGapFillable{"we", "b", "delta", "p", "mu", "label"};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_number(std::string_view text, std::size_t line, std::string_view field) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
        throw ParseError(line, "field '" + std::string(field) + "' is not a number: '" + std::string(text) + "'");
    if (!std::isfinite(value)) throw ValidationError(line, std::string(field), "must be finite");
    return value;
}

// Range checks from the feature table: we >= 0, b in [0,1], delta in (0,1], p > 0, mu > 0.
void check_ranges(const CollisionRecord& r, std::size_t line) {
    if (!(r.we >= 0.0)) throw ValidationError(line, "we", "must be >= 0, got " + std::to_string(r.we));
    if (!(r.b >= 0.0 && r.b <= 1.0)) throw ValidationError(line, "b", "must lie in [0, 1], got " + std::to_string(r.b));
    if (!(r.delta > 0.0 && r.delta <= 1.0))
        throw ValidationError(line, "delta", "must lie in (0, 1], got " + std::to_string(r.delta));
    if (!(r.p > 0.0)) throw ValidationError(line, "p", "must be > 0, got " + std::to_string(r.p));
    if (!(r.mu > 0.0)) throw ValidationError(line, "mu", "must be > 0, got " + std::to_string(r.mu));
}

CollisionRecord parse_row(std::string_view row, std::size_t line) {
    const auto cells = split(row, ',');
    if (cells.size() != 8)
        throw ParseError(line, "expected 8 fields, found " + std::to_string(cells.size()));
    CollisionRecord r;
    r.we = parse_number(cells[0], line, "we");
    r.b = parse_number(cells[1], line, "b");
    r.delta = parse_number(cells[2], line, "delta");
    r.p = parse_number(cells[3], line, "p");
    r.mu = parse_number(cells[4], line, "mu");
    const auto label = parse_regime(trim(cells[5]));
    if (!label) throw ValidationError(line, "label", "unknown regime '" + std::string(trim(cells[5])) + "'");
    r.label = *label;
    r.source_id = std::string(trim(cells[6]));
    if (!is_registered_source(r.source_id))
        throw ValidationError(line, "source_id", "unknown source '" + r.source_id + "'");
    const auto gaps = trim(cells[7]);
    if (!gaps.empty()) {
        for (auto name : split(gaps, ';')) {
            name = trim(name);
            if (std::find(kGapFillable.begin(), kGapFillable.end(), name) == kGapFillable.end())
                throw ValidationError(line, "gap_filled", "unknown feature name '" + std::string(name) + "'");
            r.gap_filled.emplace_back(name);
        }
    }
    check_ranges(r, line);
    return r;
}

// Reads the header; returns false on an empty stream.
bool read_header(std::istream& in, std::size_t& line_no) {
    std::string line;
    if (!std::getline(in, line)) return false;
    ++line_no;
    std::string_view header = line;
    if (header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);
    if (trim(header) != kCorpusHeader)
        throw ParseError(line_no, "header must be '" + std::string(kCorpusHeader) + "'");
    return true;
}

void append_number(std::string& out, double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

} // namespace

std::optional<RegimeLabel> parse_regime(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "coalescence") return RegimeLabel::Coalescence;
    if (lower == "bouncing") return RegimeLabel::Bouncing;
    if (lower == "stretching" || lower == "stretching separation" || lower == "off-center separation")
        return RegimeLabel::Stretching;
    if (lower == "reflexive" || lower == "reflexive separation" || lower == "head-on separation")
        return RegimeLabel::Reflexive;
    return std::nullopt;
}

bool is_registered_source(std::string_view source) {
    return std::find(kRegisteredSources.begin(), kRegisteredSources.end(), source) != kRegisteredSources.end();
}

std::vector<CollisionRecord> filter_sources(std::span<const CollisionRecord> records,
                                            std::span<const std::string> sources) {
    std::vector<CollisionRecord> out;
    for (const auto& r : records)
        if (sources.empty() || std::find(sources.begin(), sources.end(), r.source_id) != sources.end())
            out.push_back(r);
    return out;
}

std::vector<CollisionRecord> parse_corpus(std::istream& in) {
    std::size_t line_no = 0;
    if (!read_header(in, line_no)) throw ParseError(1, "empty corpus file (missing header)");
    std::vector<CollisionRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        records.push_back(parse_row(line, line_no));
    }
    return records;
}

std::vector<CollisionRecord> load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open corpus file '" + path + "'");
    return parse_corpus(in);
}

CorpusValidation validate_corpus(std::istream& in) {
    CorpusValidation v;
    std::size_t line_no = 0;
    try {
        if (!read_header(in, line_no)) {
            v.issues.push_back({1, "", "no records (empty file)"});
            return v;
        }
    } catch (const ParseError& e) {
        v.issues.push_back({e.line(), "", e.what()});
        return v;
    }
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            v.records.push_back(parse_row(line, line_no));
        } catch (const ValidationError& e) {
            v.issues.push_back({e.line(), e.field(), e.what()});
        } catch (const ParseError& e) {
            v.issues.push_back({e.line(), "", e.what()});
        }
    }
    if (v.records.empty() && v.issues.empty()) v.issues.push_back({line_no, "", "no records"});
    return v;
}

void write_corpus(std::ostream& out, std::span<const CollisionRecord> records) {
    out << kCorpusHeader << '\n';
    std::string row;
    for (const auto& r : records) {
        row.clear();
        for (double v : {r.we, r.b, r.delta, r.p, r.mu}) {
            append_number(row, v);
            row += ',';
        }
        row += to_string(r.label);
        row += ',';
        row += r.source_id;
        row += ',';
        for (std::size_t i = 0; i < r.gap_filled.size(); ++i) {
            if (i) row += ';';
            row += r.gap_filled[i];
        }
        out << row << '\n';
    }
}

void save_corpus(const std::string& path, std::span<const CollisionRecord> records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write corpus file '" + path + "'");
    write_corpus(out, records);
}

std::vector<CollisionRecord> shuffle(std::span<const CollisionRecord> records, std::uint64_t seed) {
    std::vector<CollisionRecord> out(records.begin(), records.end());
    Rng rng(seed);
    rng.shuffle(std::span<CollisionRecord>(out));
    return out;
}

// --- features ----------------------------------------------------------------------------------

std::string_view to_string(FeatureSet set) noexcept {
    return set == FeatureSet::BaseOnly ? "base" : "domain";
}

std::optional<FeatureSet> parse_feature_set(std::string_view text) {
    if (text == "base") return FeatureSet::BaseOnly;
    if (text == "domain") return FeatureSet::WithDomainKnowledge;
    return std::nullopt;
}

std::size_t feature_count(FeatureSet set) noexcept { return set == FeatureSet::BaseOnly ? 5 : 8; }

std::span<const std::string_view> feature_names(FeatureSet set) noexcept {
    if (set == FeatureSet::BaseOnly) return kBaseNames;
    return kDomainNames;
}

FeatureMatrix FeatureMatrix::select(std::span<const std::size_t> indices) const {
    FeatureMatrix out;
    out.values = values.select_rows(indices);
    out.feature_set = feature_set;
    out.standardization = standardization;
    out.labels.reserve(indices.size());
    for (auto i : indices) out.labels.push_back(labels[i]);
    return out;
}

FeatureMatrix build_features(std::span<const CollisionRecord> records, FeatureSet feature_set,
                             const PhysicsModelParams& physics) {
    if (records.empty()) throw ConfigError("build_features: no records");
    const auto f = feature_count(feature_set);
    FeatureMatrix m;
    m.feature_set = feature_set;
    m.values = Matrix(records.size(), f);
    m.labels.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        auto row = m.values.row(i);
        row[0] = r.we;
        row[1] = r.b;
        row[2] = r.delta;
        row[3] = r.p;
        row[4] = r.mu;
        if (feature_set == FeatureSet::WithDomainKnowledge) {
            try {
                const auto c = eval_curves(r.we, r.b, r.delta, physics);
                row[5] = c.c1;
                row[6] = c.c2;
                row[7] = c.c3;
            } catch (const SingularityError& e) {
                throw SingularityError("record " + std::to_string(i) + ": " + e.what());
            }
        }
        m.labels.push_back(r.label);
    }
    return m;
}

void Standardization::apply(Matrix& m) const {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        for (std::size_t c = 0; c < columns.size(); ++c) row[c] = (row[c] - columns[c].mean) / columns[c].std;
    }
}

Standardization fit_standardization(const Matrix& m) {
    Standardization s;
    s.columns.resize(m.cols());
    const auto n = static_cast<double>(m.rows());
    for (std::size_t c = 0; c < m.cols(); ++c) {
        double lo = m(0, c), hi = m(0, c), sum = 0.0;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            const double v = m(r, c);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
        }
        if (lo == hi) {
            s.columns[c] = {lo, 1.0};
            continue;
        }
        const double mean = sum / n;
        double ss = 0.0;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            const double d = m(r, c) - mean;
            ss += d * d;
        }
        s.columns[c] = {mean, std::sqrt(ss / n)};
    }
    return s;
}

std::pair<FeatureMatrix, Standardization> standardize_fit_transform(const FeatureMatrix& train) {
    if (train.rows() < 2) throw ConfigError("standardization requires at least 2 rows");
    auto s = fit_standardization(train.values);
    return {apply_standardization(train, s), s};
}

FeatureMatrix apply_standardization(const FeatureMatrix& m, const Standardization& s) {
    if (s.columns.size() != m.cols()) throw ConfigError("standardization column count mismatch");
    FeatureMatrix out = m;
    s.apply(out.values);
    out.standardization = s;
    return out;
}

std::vector<std::size_t> subsample_indices(std::size_t total, std::size_t n, std::uint64_t seed) {
    if (n < 1 || n > total)
        throw ConfigError("subsample size " + std::to_string(n) + " outside [1, " + std::to_string(total) + "]");
    std::vector<std::size_t> idx(total);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(idx));
    idx.resize(n);
    return idx;
}

FeatureMatrix subsample(const FeatureMatrix& m, std::size_t n, std::uint64_t seed) {
    const auto idx = subsample_indices(m.rows(), n, seed);
    return m.select(idx);
}

nlohmann::json to_json(const Standardization& s, FeatureSet set) {
    nlohmann::json j = nlohmann::json::object();
    const auto names = feature_names(set);
    for (std::size_t c = 0; c < s.columns.size() && c < names.size(); ++c)
        j[std::string(names[c])] = {{"mean", s.columns[c].mean}, {"std", s.columns[c].std}};
    return j;
}

Standardization standardization_from_json(const nlohmann::json& j, FeatureSet set) {
    Standardization s;
    for (auto name : feature_names(set)) {
        const std::string key(name);
        if (!j.contains(key)) throw ConfigError("standardization: missing feature '" + key + "'");
        s.columns.push_back({j.at(key).at("mean").get<double>(), j.at(key).at("std").get<double>()});
    }
    return s;
}

} // namespace dropcol
