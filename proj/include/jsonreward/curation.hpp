#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jsonreward/rng.hpp"
#include "jsonreward/schema.hpp"

namespace jsonreward {

enum class CurationOutcome { Kept, DroppedUnresolvable, DroppedMetaInvalid };

std::string_view to_string(CurationOutcome outcome);
std::optional<CurationOutcome> curation_outcome_from_string(std::string_view name);

struct RawDocument {
    std::string source_id;
    std::string text;
};

struct CurationRecord {
    std::string source_id;
    CurationOutcome outcome = CurationOutcome::DroppedMetaInvalid;
    std::vector<std::string> reasons;
    /// Merged schema; present exactly when the record is kept.
    std::optional<Json> final_schema;

    Json to_json() const;
    /// Throws std::invalid_argument for malformed records.
    static CurationRecord from_json(const Json& record);
};

/// Parse, merge external refs, then compile. Resolver exceptions become
/// reasons on the record.
CurationRecord curate_one(const RawDocument& doc, const Resolver& resolver);

/// Records in input order. The resolver is called from several threads and
/// must tolerate that.
std::vector<CurationRecord> curate_batch(std::span<const RawDocument> docs, const Resolver& resolver);
std::vector<CurationRecord> curate_batch_serial(std::span<const RawDocument> docs, const Resolver& resolver);

/// Test share of the original benchmark split (3,746 of 40,706).
inline constexpr double kDefaultTestFraction = 3746.0 / 40706.0;

template <class T>
struct Split {
    std::vector<T> train;
    std::vector<T> test;
};

/// Seeded Fisher-Yates shuffle; the first round(n * (1 - test_fraction))
/// items train, the rest test. Throws std::invalid_argument unless
/// 0 < test_fraction < 1.
template <class T>
Split<T> split(std::vector<T> items, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw std::invalid_argument("test fraction must be in (0, 1)");
    Rng rng(seed);
    for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[rng.below(i)]);
    const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(items.size()) * test_fraction));
    Split<T> out;
    const auto cut = items.size() - n_test;
    out.train.assign(std::make_move_iterator(items.begin()), std::make_move_iterator(items.begin() + static_cast<std::ptrdiff_t>(cut)));
    out.test.assign(std::make_move_iterator(items.begin() + static_cast<std::ptrdiff_t>(cut)), std::make_move_iterator(items.end()));
    return out;
}

/// Corpus statistics over kept records. Throws std::invalid_argument when
/// there are none.
CorpusStats report(std::span<const CurationRecord> kept);

/// Reads every regular file under `dir` (sorted by path) as one raw document;
/// the id is the path relative to `dir`.
std::vector<RawDocument> read_corpus_dir(const std::filesystem::path& dir);

}  // namespace jsonreward
