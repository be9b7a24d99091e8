#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace laudit::detectors {

inline constexpr const char* kHigherIsMember = "higher-is-member";

/// Per-sample detector scores, aligned with the split's pro and held order.
struct ScoreVector {
    std::vector<double> member_scores;
    std::vector<double> nonmember_scores;
    std::string detector_id;
    std::string sign_convention = kHigherIsMember;
    std::string transform_hash;  ///< empty when scored on originals
    std::string model_id;

    /// Throws ValidationError on an empty side or a non-finite value.
    void validate() const;
    bool operator==(const ScoreVector&) const = default;
};

nlohmann::json to_json(const ScoreVector& v);
ScoreVector score_vector_from_json(const nlohmann::json& j);

}  // namespace laudit::detectors
