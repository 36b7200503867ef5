#pragma once

#include "dropcol/matrix.hpp"
#include "dropcol/physics.hpp"
#include "dropcol/regime.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dropcol {

/// Studies the corpus is assembled from, in publication-table order.
inline constexpr std::array<std::string_view, 4> kRegisteredSources{"ashgriz1990", "estrade1999", "qian1997",
                                                                    "sommerfeld2016"};

/// Exact header line of a corpus CSV.
inline constexpr std::string_view kCorpusHeader = "we,b,delta,p,mu,label,source_id,gap_filled";

/// One collision experiment. Pressure in Pa, viscosity in Pa*s.
struct CollisionRecord {
    double we = 0.0;
    double b = 0.0;
    double delta = 1.0;
    double p = 101325.0;
    double mu = 1e-3;
    RegimeLabel label = RegimeLabel::Coalescence;
    std::string source_id;
    /// Fields whose values were estimated rather than reported (any of
    /// we, b, delta, p, mu, label), in file order.
    std::vector<std::string> gap_filled;

    bool operator==(const CollisionRecord&) const = default;
};

bool is_registered_source(std::string_view source);

/// Parses a corpus CSV. Throws ParseError / ValidationError naming the line
/// (header is line 1) on the first bad row.
std::vector<CollisionRecord> parse_corpus(std::istream& in);
std::vector<CollisionRecord> load_corpus(const std::string& path);

/// Writes records in the canonical corpus format; doubles use shortest
/// round-trip formatting.
void write_corpus(std::ostream& out, std::span<const CollisionRecord> records);
void save_corpus(const std::string& path, std::span<const CollisionRecord> records);

struct CorpusIssue {
    std::size_t line = 0;
    std::string field; ///< empty for structural errors
    std::string message;
};

/// Full-file check that keeps going past bad rows.
struct CorpusValidation {
    std::vector<CollisionRecord> records;
    std::vector<CorpusIssue> issues;
    bool ok() const noexcept { return issues.empty() && !records.empty(); }
};

CorpusValidation validate_corpus(std::istream& in);

/// Records whose source_id is in `sources`, in input order. Empty `sources` keeps everything.
std::vector<CollisionRecord> filter_sources(std::span<const CollisionRecord> records,
                                            std::span<const std::string> sources);

std::vector<CollisionRecord> shuffle(std::span<const CollisionRecord> records, std::uint64_t seed);

// --- feature matrices --------------------------------------------------------------------------

enum class FeatureSet : std::uint8_t {
    BaseOnly,            ///< we, b, delta, p, mu
    WithDomainKnowledge, ///< base + c1, c2, c3
};

std::string_view to_string(FeatureSet set) noexcept;
/// Accepts "base" / "domain".
std::optional<FeatureSet> parse_feature_set(std::string_view text);
std::size_t feature_count(FeatureSet set) noexcept;
std::span<const std::string_view> feature_names(FeatureSet set) noexcept;

struct ColumnStats {
    double mean = 0.0;
    double std = 1.0;
    bool operator==(const ColumnStats&) const = default;
};

/// Per-column z-scoring parameters (population standard deviation). Constant
/// columns carry std = 1 and map to zero.
struct Standardization {
    std::vector<ColumnStats> columns;

    void apply(Matrix& m) const;
    bool operator==(const Standardization&) const = default;
};

struct FeatureMatrix {
    Matrix values;
    FeatureSet feature_set = FeatureSet::BaseOnly;
    std::vector<RegimeLabel> labels;
    std::optional<Standardization> standardization;

    std::size_t rows() const noexcept { return values.rows(); }
    std::size_t cols() const noexcept { return values.cols(); }

    FeatureMatrix select(std::span<const std::size_t> indices) const;
};

/// Raw (unstandardized) features in the fixed column order
/// [we, b, delta, p, mu] then [c1, c2, c3]. Domain curves are evaluated with
/// b clamped below 1; any remaining singularity is rethrown with the record index.
FeatureMatrix build_features(std::span<const CollisionRecord> records, FeatureSet feature_set,
                             const PhysicsModelParams& physics = {});

Standardization fit_standardization(const Matrix& m);
std::pair<FeatureMatrix, Standardization> standardize_fit_transform(const FeatureMatrix& train);
FeatureMatrix apply_standardization(const FeatureMatrix& m, const Standardization& s);

/// First n rows of a seeded permutation, so subsets for a fixed seed are nested.
FeatureMatrix subsample(const FeatureMatrix& m, std::size_t n, std::uint64_t seed);
std::vector<std::size_t> subsample_indices(std::size_t total, std::size_t n, std::uint64_t seed);

nlohmann::json to_json(const Standardization& s, FeatureSet set);
Standardization standardization_from_json(const nlohmann::json& j, FeatureSet set);

} // namespace dropcol
