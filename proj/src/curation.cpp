#include "jsonreward/curation.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <sstream>

namespace jsonreward {

namespace {

constexpr std::pair<CurationOutcome, std::string_view> kOutcomeNames[] = {
    {CurationOutcome::Kept, "kept"},
    {CurationOutcome::DroppedUnresolvable, "dropped_unresolvable"},
    {CurationOutcome::DroppedMetaInvalid, "dropped_meta_invalid"},
};

}  // namespace

std::string_view to_string(CurationOutcome outcome) {
    for (const auto& [o, n] : kOutcomeNames) {
        if (o == outcome) return n;
    }
    return "dropped_meta_invalid";
}

std::optional<CurationOutcome> curation_outcome_from_string(std::string_view name) {
    for (const auto& [o, n] : kOutcomeNames) {
        if (n == name) return o;
    }
    return std::nullopt;
}

Json CurationRecord::to_json() const {
    Json out;
    out["source_id"]    = source_id;
    out["outcome"]      = std::string(jsonreward::to_string(outcome));
    out["reasons"]      = reasons;
    out["final_schema"] = final_schema ? *final_schema : Json();
    return out;
}

CurationRecord CurationRecord::from_json(const Json& record) {
    try {
        CurationRecord r;
        r.source_id = record.at("source_id").get<std::string>();
        auto outcome = curation_outcome_from_string(record.at("outcome").get<std::string>());
        if (!outcome) throw std::invalid_argument("unknown outcome " + record.at("outcome").get<std::string>());
        r.outcome = *outcome;
        r.reasons = record.value("reasons", std::vector<std::string>{});
        if (auto it = record.find("final_schema"); it != record.end() && !it->is_null()) r.final_schema = *it;
        return r;
    } catch (const Json::exception& e) {
        throw std::invalid_argument(std::string("malformed curation record: ") + e.what());
    }
}

CurationRecord curate_one(const RawDocument& doc, const Resolver& resolver) {
    CurationRecord rec;
    rec.source_id = doc.source_id;

    const auto parsed = parse(doc.text, Dialect::Json);
    if (!parsed) {
        rec.outcome = CurationOutcome::DroppedMetaInvalid;
        rec.reasons.push_back("parse error at offset " + std::to_string(parsed.failure().error_offset) + ": " +
                              parsed.failure().message);
        return rec;
    }

    std::vector<std::string> thrown;
    Resolver guarded;
    if (resolver) {
        guarded = [&](const std::string& uri) -> std::optional<Json> {
            try {
                return resolver(uri);
            } catch (const std::exception& e) {
                thrown.push_back("resolver failed for " + uri + ": " + e.what());
                throw;
            } catch (...) {
                thrown.push_back("resolver failed for " + uri);
                throw;
            }
        };
    }
    auto merged = merge_external_refs(parsed.tree(), guarded);
    if (merged.status != ResolverResult::Status::Merged) {
        rec.outcome = CurationOutcome::DroppedUnresolvable;
        for (const auto& uri : merged.failed_uris) rec.reasons.push_back("unresolvable reference " + uri);
        rec.reasons.insert(rec.reasons.end(), thrown.begin(), thrown.end());
        return rec;
    }

    auto compiled = compile(*merged.merged_schema);
    if (!compiled) {
        rec.outcome = CurationOutcome::DroppedMetaInvalid;
        rec.reasons.push_back(compiled.error().reason);
        return rec;
    }
    rec.outcome      = CurationOutcome::Kept;
    rec.final_schema = std::move(*merged.merged_schema);
    return rec;
}

std::vector<CurationRecord> curate_batch_serial(std::span<const RawDocument> docs, const Resolver& resolver) {
    std::vector<CurationRecord> out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back(curate_one(d, resolver));
    return out;
}

std::vector<CurationRecord> curate_batch(std::span<const RawDocument> docs, const Resolver& resolver) {
    std::vector<CurationRecord> out(docs.size());
    std::exception_ptr error;
    const auto n = static_cast<long long>(docs.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (long long i = 0; i < n; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = curate_one(docs[static_cast<std::size_t>(i)], resolver);
        } catch (...) {
#pragma omp critical(jsonreward_curate_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return out;
}

CorpusStats report(std::span<const CurationRecord> kept) {
    std::vector<SchemaDoc> docs;
    for (const auto& r : kept) {
        if (r.outcome != CurationOutcome::Kept || !r.final_schema) continue;
        auto c = compile(*r.final_schema);
        if (c) docs.push_back(std::move(c).value());
    }
    return corpus_stats(docs);
}

std::vector<RawDocument> read_corpus_dir(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<RawDocument> out;
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        if (!in) throw std::runtime_error("cannot read " + f.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        out.push_back({std::filesystem::relative(f, dir).generic_string(), buf.str()});
    }
    return out;
}

}  // namespace jsonreward
