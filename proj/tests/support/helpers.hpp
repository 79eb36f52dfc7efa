#ifndef MISC_TESTS_HELPERS_HPP
#define MISC_TESTS_HELPERS_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include <json.hpp>

#include "misc/data_model.hpp"
#include "misc/rng.hpp"

namespace testutil {

inline Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed, bool laplace = false) {
    misc::Rng rng(seed);
    Eigen::MatrixXd M(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) M(i, j) = laplace ? rng.laplace() : rng.normal();
    }
    return M;
}

inline std::vector<int> random_labels(std::size_t n, int k, std::uint64_t seed) {
    misc::Rng rng(seed);
    std::vector<int> labels(n);
    for (auto& l : labels) l = static_cast<int>(rng.index(static_cast<std::size_t>(k)));
    return labels;
}

// The two synthetic views used throughout the multi-view tests: four blobs
// whose centers avoid every parallelogram pairing (so no linear map can
// factor the pair of coordinates), and two anisotropic blobs with opposite
// orientations (a scale coupling no rotation removes).
inline misc::LabeledDataset four_blob_view(std::size_t n, std::uint64_t seed) {
    nlohmann::json params{{"centers", {{9.0, 0.0}, {-5.0, 7.0}, {-5.0, -7.0}, {1.5, 1.0}}},
                          {"std", 1.0}};
    return misc::gen_gaussian_blobs({misc::GeneratorKind::gaussian_blobs, n, seed, params});
}

inline misc::LabeledDataset two_blob_view(std::size_t n, std::uint64_t seed) {
    nlohmann::json params{{"centers", {{-3.0, -3.0}, {3.0, 3.0}}},
                          {"std", {{1.6, 0.5}, {0.5, 1.6}}}};
    return misc::gen_gaussian_blobs({misc::GeneratorKind::gaussian_blobs, n, seed, params});
}

// Minimal JSON-Schema checker covering the subset used by the shipped
// schema: type, properties, required, items, enum, additionalProperties.
inline bool validate_schema(const nlohmann::json& value, const nlohmann::json& schema,
                            std::string* error, const std::string& path = "$") {
    auto fail = [&](const std::string& msg) {
        if (error) *error = path + ": " + msg;
        return false;
    };
    if (schema.contains("enum")) {
        for (const auto& allowed : schema.at("enum")) {
            if (value == allowed) return true;
        }
        return fail("value not in enum");
    }
    if (schema.contains("type")) {
        const std::string type = schema.at("type").get<std::string>();
        if (type == "object" && !value.is_object()) return fail("expected object");
        if (type == "array" && !value.is_array()) return fail("expected array");
        if (type == "string" && !value.is_string()) return fail("expected string");
        if (type == "integer" && !value.is_number_integer() && !value.is_number_unsigned()) {
            return fail("expected integer");
        }
        if (type == "number" && !value.is_number()) return fail("expected number");
        if (type == "boolean" && !value.is_boolean()) return fail("expected boolean");
    }
    if (value.is_object()) {
        if (schema.contains("required")) {
            for (const auto& key : schema.at("required")) {
                if (!value.contains(key.get<std::string>())) {
                    return fail("missing required key '" + key.get<std::string>() + "'");
                }
            }
        }
        if (schema.contains("properties")) {
            for (const auto& [key, sub] : schema.at("properties").items()) {
                if (value.contains(key) &&
                    !validate_schema(value.at(key), sub, error, path + "." + key)) {
                    return false;
                }
            }
        }
    }
    if (value.is_array() && schema.contains("items")) {
        for (std::size_t i = 0; i < value.size(); ++i) {
            if (!validate_schema(value.at(i), schema.at("items"), error,
                                 path + "[" + std::to_string(i) + "]")) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace testutil

#endif
