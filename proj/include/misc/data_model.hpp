#ifndef MISC_DATA_MODEL_HPP
#define MISC_DATA_MODEL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace misc {

// Dataset held features-by-samples: values(i, j) is feature i of sample j.
struct DataMatrix {
    Eigen::MatrixXd values;
    std::optional<std::vector<std::string>> feature_names;

    Eigen::Index num_features() const { return values.rows(); }
    Eigen::Index num_samples() const { return values.cols(); }

    // Throws std::invalid_argument on non-finite entries or degenerate shape
    // (requires d >= 1, n >= 2).
    void validate() const;
};

struct LabelView {
    std::string name;
    std::vector<int> labels;  // contiguous ids 0..k-1
};

struct LabeledDataset {
    DataMatrix data;
    std::vector<LabelView> views;

    void validate() const;
};

enum class GeneratorKind { gaussian_blobs, atom, lsun, rings };

GeneratorKind generator_kind_from_string(const std::string& name);
std::string to_string(GeneratorKind kind);

// Shape parameters live in `params` as a JSON object; each generator
// documents its keys and defaults next to its implementation.
struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::gaussian_blobs;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    nlohmann::json params = nlohmann::json::object();
};

enum class CsvOrientation { samples_as_rows, features_as_rows };

// Comma-separated numeric table with an optional single header row
// (detected when any first-row cell is non-numeric). Ragged rows and
// unparseable cells raise std::runtime_error citing the 1-based location.
DataMatrix load_csv(const std::string& path, CsvOrientation orientation);
DataMatrix parse_csv(std::istream& in, CsvOrientation orientation, const std::string& source_name);

// Centers each feature and scales to unit population variance. Features with
// zero variance are dropped; their indices are reported through `dropped`
// when provided. Throws if every feature is constant.
DataMatrix standardize(const DataMatrix& X, std::vector<Eigen::Index>* dropped = nullptr);

LabeledDataset gen_gaussian_blobs(const GeneratorSpec& spec);
LabeledDataset gen_atom(const GeneratorSpec& spec);
LabeledDataset gen_lsun(const GeneratorSpec& spec);
LabeledDataset gen_rings(const GeneratorSpec& spec);
LabeledDataset generate(const GeneratorSpec& spec);

// Stacks the parts' feature blocks after independently permuting each part's
// sample order (seeded per part). Label views follow their part's
// permutation, so every view stays aligned with the stacked samples.
// `permute = false` keeps the original sample order in every part.
LabeledDataset compose_multiview(const std::vector<LabeledDataset>& parts, std::uint64_t seed,
                                 bool permute = true);

}  // namespace misc

#endif  // MISC_DATA_MODEL_HPP
