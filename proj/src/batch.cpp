#include "jsonreward/batch.hpp"

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace jsonreward {

namespace {

RewardScore score_one(const ScoreRequest& r) {
    if (!r.schema) return {};
    return fine_grained_score(r.text, *r.schema, r.mode);
}

}  // namespace

std::vector<RewardScore> score_batch_serial(std::span<const ScoreRequest> requests) {
    std::vector<RewardScore> out;
    out.reserve(requests.size());
    for (const auto& r : requests) out.push_back(score_one(r));
    return out;
}

std::vector<RewardScore> score_batch(std::span<const ScoreRequest> requests) {
    std::vector<RewardScore> out(requests.size());
    std::exception_ptr error;
    const auto n = static_cast<long long>(requests.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (long long i = 0; i < n; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = score_one(requests[static_cast<std::size_t>(i)]);
        } catch (...) {
#pragma omp critical(jsonreward_batch_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return out;
}

int batch_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace jsonreward
