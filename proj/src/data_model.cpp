#include "misc/data_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "misc/errors.hpp"
#include "misc/rng.hpp"

namespace misc {

void DataMatrix::validate() const {
    if (values.rows() < 1 || values.cols() < 2) {
        throw std::invalid_argument("DataMatrix requires d >= 1 features and n >= 2 samples, got " +
                                    std::to_string(values.rows()) + "x" + std::to_string(values.cols()));
    }
    if (!values.allFinite()) {
        throw std::invalid_argument("DataMatrix contains non-finite entries");
    }
    if (feature_names && static_cast<Eigen::Index>(feature_names->size()) != values.rows()) {
        throw std::invalid_argument("feature_names length does not match feature count");
    }
}

void LabeledDataset::validate() const {
    data.validate();
    const std::size_t n = static_cast<std::size_t>(data.num_samples());
    for (const auto& view : views) {
        if (view.labels.size() != n) {
            throw std::invalid_argument("view '" + view.name + "' has " +
                                        std::to_string(view.labels.size()) + " labels, expected " +
                                        std::to_string(n));
        }
        const int k = view.labels.empty() ? 0 : *std::max_element(view.labels.begin(), view.labels.end()) + 1;
        std::vector<bool> seen(static_cast<std::size_t>(k), false);
        for (int l : view.labels) {
            if (l < 0 || l >= k) throw std::invalid_argument("view '" + view.name + "' has label out of range");
            seen[static_cast<std::size_t>(l)] = true;
        }
        if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
            throw std::invalid_argument("view '" + view.name + "' labels are not contiguous 0..k-1");
        }
    }
}

GeneratorKind generator_kind_from_string(const std::string& name) {
    if (name == "gaussian_blobs" || name == "blobs") return GeneratorKind::gaussian_blobs;
    if (name == "atom") return GeneratorKind::atom;
    if (name == "lsun") return GeneratorKind::lsun;
    if (name == "rings") return GeneratorKind::rings;
    throw std::invalid_argument("unknown generator kind '" + name + "'");
}

std::string to_string(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::gaussian_blobs: return "gaussian_blobs";
        case GeneratorKind::atom: return "atom";
        case GeneratorKind::lsun: return "lsun";
        case GeneratorKind::rings: return "rings";
    }
    return "unknown";
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

bool parse_double(const std::string& cell, double& out) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && !cell.empty();
}

}  // namespace

DataMatrix parse_csv(std::istream& in, CsvOrientation orientation, const std::string& source_name) {
    std::vector<std::vector<double>> rows;
    std::optional<std::vector<std::string>> header;
    std::size_t expected_cols = 0;
    std::size_t line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_row(line);
        if (rows.empty() && !header) {
            // First non-empty row: treat as header when any cell is non-numeric.
            bool numeric = true;
            double tmp;
            for (const auto& c : cells) {
                if (!parse_double(c, tmp)) {
                    numeric = false;
                    break;
                }
            }
            expected_cols = cells.size();
            if (!numeric) {
                header = cells;
                continue;
            }
        }
        if (cells.size() != expected_cols) {
            throw ParseError(source_name + ": row " + std::to_string(line_no) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(expected_cols));
        }
        std::vector<double> row(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (!parse_double(cells[c], row[c])) {
                throw ParseError(source_name + ": could not parse '" + cells[c] + "' at row " +
                                 std::to_string(line_no) + ", column " + std::to_string(c + 1));
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(source_name + ": no data rows");

    Eigen::MatrixXd table(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(expected_cols));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < expected_cols; ++c) {
            table(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }

    DataMatrix out;
    if (orientation == CsvOrientation::samples_as_rows) {
        out.values = table.transpose();
        if (header) out.feature_names = header;
    } else {
        out.values = table;
        // A header names columns, i.e. samples, so it carries no feature names here.
    }
    out.validate();
    return out;
}

DataMatrix load_csv(const std::string& path, CsvOrientation orientation) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return parse_csv(in, orientation, path);
}

DataMatrix standardize(const DataMatrix& X, std::vector<Eigen::Index>* dropped) {
    X.validate();
    const Eigen::Index d = X.num_features();
    const Eigen::Index n = X.num_samples();
    const Eigen::VectorXd mean = X.values.rowwise().mean();
    Eigen::MatrixXd centered = X.values.colwise() - mean;
    const Eigen::VectorXd var = centered.array().square().rowwise().mean();  // population variance

    std::vector<Eigen::Index> keep;
    keep.reserve(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) {
        if (var(i) > 1e-24) {
            keep.push_back(i);
        } else if (dropped) {
            dropped->push_back(i);
        }
    }
    if (keep.empty()) throw std::runtime_error("standardize: every feature is constant");

    DataMatrix out;
    out.values.resize(static_cast<Eigen::Index>(keep.size()), n);
    std::vector<std::string> names;
    for (std::size_t r = 0; r < keep.size(); ++r) {
        const Eigen::Index i = keep[r];
        out.values.row(static_cast<Eigen::Index>(r)) = centered.row(i) / std::sqrt(var(i));
        if (X.feature_names) names.push_back((*X.feature_names)[static_cast<std::size_t>(i)]);
    }
    if (X.feature_names) out.feature_names = std::move(names);
    return out;
}

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// Uniform direction on the unit sphere in R^dim.
Eigen::VectorXd sphere_direction(Rng& rng, int dim) {
    Eigen::VectorXd v(dim);
    double norm = 0.0;
    do {
        for (int i = 0; i < dim; ++i) v(i) = rng.normal();
        norm = v.norm();
    } while (norm < 1e-12);
    return v / norm;
}

}  // namespace

// params: "centers" (array of equal-length points) or "k" (default 6) +
// "dim" (default 2) + "center_radius" (default 8.0, centers evenly spaced on
// a circle in the first two dims); "std" (scalar or per-cluster array,
// default 1.0).
LabeledDataset gen_gaussian_blobs(const GeneratorSpec& spec) {
    std::vector<Eigen::VectorXd> centers;
    if (spec.params.contains("centers")) {
        for (const auto& c : spec.params.at("centers")) {
            Eigen::VectorXd v(static_cast<Eigen::Index>(c.size()));
            for (std::size_t i = 0; i < c.size(); ++i) v(static_cast<Eigen::Index>(i)) = c.at(i).get<double>();
            centers.push_back(std::move(v));
            require(centers.back().size() == centers.front().size(), "gaussian_blobs: centers differ in dimension");
        }
        require(!centers.empty(), "gaussian_blobs: empty centers list");
    } else {
        const int k = spec.params.value("k", 6);
        const int dim = spec.params.value("dim", 2);
        const double radius = spec.params.value("center_radius", 8.0);
        require(k >= 1 && dim >= 1, "gaussian_blobs: k and dim must be positive");
        const double two_pi = 2.0 * std::numbers::pi;
        for (int c = 0; c < k; ++c) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
            const double angle = two_pi * c / k;
            v(0) = radius * std::cos(angle);
            if (dim > 1) v(1) = radius * std::sin(angle);
            centers.push_back(std::move(v));
        }
    }
    const std::size_t k = centers.size();
    require(spec.n >= 2 * k, "gaussian_blobs: need n >= 2k");
    const int dim = static_cast<int>(centers.front().size());

    // "std": scalar, per-cluster array, or per-cluster per-dimension arrays
    // (diagonal covariance scales).
    std::vector<Eigen::VectorXd> stds(k, Eigen::VectorXd::Ones(dim));
    if (spec.params.contains("std")) {
        const auto& s = spec.params.at("std");
        if (s.is_array()) {
            require(s.size() == k, "gaussian_blobs: std array length must equal k");
            for (std::size_t i = 0; i < k; ++i) {
                if (s.at(i).is_array()) {
                    require(s.at(i).size() == static_cast<std::size_t>(dim),
                            "gaussian_blobs: per-dimension std length must equal dim");
                    for (int a = 0; a < dim; ++a) stds[i](a) = s.at(i).at(a).get<double>();
                } else {
                    stds[i].setConstant(s.at(i).get<double>());
                }
            }
        } else {
            for (auto& v : stds) v.setConstant(s.get<double>());
        }
    }
    Rng rng = Rng::stream(spec.seed, 0xb10b5);
    LabeledDataset ds;
    ds.data.values.resize(dim, static_cast<Eigen::Index>(spec.n));
    LabelView view{"blobs", std::vector<int>(spec.n)};
    for (std::size_t j = 0; j < spec.n; ++j) {
        const std::size_t c = j % k;  // round-robin assignment
        for (int i = 0; i < dim; ++i) {
            ds.data.values(i, static_cast<Eigen::Index>(j)) = centers[c](i) + stds[c](i) * rng.normal();
        }
        view.labels[j] = static_cast<int>(c);
    }
    ds.views.push_back(std::move(view));
    ds.validate();
    return ds;
}

// Dense ball nested inside a hollow shell in 3D. params: "inner_radius"
// (default 1.0, ball sampled uniformly inside), "shell_radius" (default 5.0),
// "shell_thickness" (default 1.0, uniform radial jitter around the shell).
LabeledDataset gen_atom(const GeneratorSpec& spec) {
    require(spec.n % 2 == 0, "atom: n must be even");
    require(spec.n >= 4, "atom: need n >= 4");
    const double inner_radius = spec.params.value("inner_radius", 1.0);
    const double shell_radius = spec.params.value("shell_radius", 5.0);
    const double shell_thickness = spec.params.value("shell_thickness", 1.0);
    require(inner_radius > 0 && shell_radius > 0 && shell_thickness >= 0, "atom: radii must be positive");
    require(shell_radius - 0.5 * shell_thickness > inner_radius,
            "atom: shell must not intersect the inner ball");

    Rng rng = Rng::stream(spec.seed, 0xa70);
    const std::size_t half = spec.n / 2;
    LabeledDataset ds;
    ds.data.values.resize(3, static_cast<Eigen::Index>(spec.n));
    LabelView view{"atom", std::vector<int>(spec.n)};
    for (std::size_t j = 0; j < spec.n; ++j) {
        const bool inner = j < half;
        const Eigen::VectorXd dir = sphere_direction(rng, 3);
        double r;
        if (inner) {
            r = inner_radius * std::cbrt(rng.uniform());  // uniform in the ball
        } else {
            r = shell_radius + shell_thickness * (rng.uniform() - 0.5);
        }
        ds.data.values.col(static_cast<Eigen::Index>(j)) = r * dir;
        view.labels[j] = inner ? 0 : 1;
    }
    ds.views.push_back(std::move(view));
    ds.validate();
    return ds;
}

// Two thin rectangles forming an "L" plus a round cluster, 2D. The bars use
// n/4 samples each, the round cluster n/2. params: "bar_length" (default
// 4.0), "bar_width" (default 0.5), "corner_gap" (default 1.0), "ball_center"
// (default [4.2, 2.9]), "ball_sigma" (default 1.15), "ball_clip" (default
// 1.9, radial truncation keeping bounding boxes disjoint).
LabeledDataset gen_lsun(const GeneratorSpec& spec) {
    require(spec.n % 4 == 0, "lsun: n must be divisible by 4");
    require(spec.n >= 12, "lsun: need n >= 12");
    const double bar_length = spec.params.value("bar_length", 4.0);
    const double bar_width = spec.params.value("bar_width", 0.5);
    const double corner_gap = spec.params.value("corner_gap", 1.0);
    const double ball_sigma = spec.params.value("ball_sigma", 1.15);
    const double ball_clip = spec.params.value("ball_clip", 1.9);
    double ball_cx = 4.2, ball_cy = 2.9;
    if (spec.params.contains("ball_center")) {
        const auto& c = spec.params.at("ball_center");
        require(c.is_array() && c.size() == 2, "lsun: ball_center must be [x, y]");
        ball_cx = c.at(0).get<double>();
        ball_cy = c.at(1).get<double>();
    }
    // Vertical bar box: [0, w] x [0, L]. Horizontal bar box:
    // [w + gap, w + gap + L] x [0, w]. The ball box must avoid both.
    const double h_x0 = bar_width + corner_gap;
    require(ball_cx - ball_clip > bar_width || ball_cy - ball_clip > bar_length,
            "lsun: ball overlaps the vertical bar box");
    require(ball_cy - ball_clip > bar_width || ball_cx + ball_clip < h_x0 ||
                ball_cx - ball_clip > h_x0 + bar_length,
            "lsun: ball overlaps the horizontal bar box");

    Rng rng = Rng::stream(spec.seed, 0x15c4);
    const std::size_t quarter = spec.n / 4;
    LabeledDataset ds;
    ds.data.values.resize(2, static_cast<Eigen::Index>(spec.n));
    LabelView view{"lsun", std::vector<int>(spec.n)};
    for (std::size_t j = 0; j < spec.n; ++j) {
        double x, y;
        int label;
        if (j < quarter) {
            x = rng.uniform(0.0, bar_width);
            y = rng.uniform(0.0, bar_length);
            label = 0;
        } else if (j < 2 * quarter) {
            x = rng.uniform(h_x0, h_x0 + bar_length);
            y = rng.uniform(0.0, bar_width);
            label = 1;
        } else {
            do {
                x = ball_sigma * rng.normal();
                y = ball_sigma * rng.normal();
            } while (x * x + y * y > ball_clip * ball_clip);
            x += ball_cx;
            y += ball_cy;
            label = 2;
        }
        ds.data.values(0, static_cast<Eigen::Index>(j)) = x;
        ds.data.values(1, static_cast<Eigen::Index>(j)) = y;
        view.labels[j] = label;
    }
    ds.views.push_back(std::move(view));
    ds.validate();
    return ds;
}

// Concentric noisy circles in 2D, samples round-robin across rings.
// params: "radii" (default [1.0, 2.2]), "noise" (default 0.06).
LabeledDataset gen_rings(const GeneratorSpec& spec) {
    std::vector<double> radii{1.0, 2.2};
    if (spec.params.contains("radii")) {
        radii.clear();
        for (const auto& r : spec.params.at("radii")) radii.push_back(r.get<double>());
        require(!radii.empty(), "rings: empty radii list");
    }
    const double noise = spec.params.value("noise", 0.06);
    const std::size_t k = radii.size();
    require(spec.n >= 2 * k, "rings: need n >= 2k");

    Rng rng = Rng::stream(spec.seed, 0x4153);
    const double two_pi = 2.0 * std::numbers::pi;
    LabeledDataset ds;
    ds.data.values.resize(2, static_cast<Eigen::Index>(spec.n));
    LabelView view{"rings", std::vector<int>(spec.n)};
    for (std::size_t j = 0; j < spec.n; ++j) {
        const std::size_t c = j % k;
        const double angle = two_pi * rng.uniform();
        const double r = radii[c] + noise * rng.normal();
        ds.data.values(0, static_cast<Eigen::Index>(j)) = r * std::cos(angle);
        ds.data.values(1, static_cast<Eigen::Index>(j)) = r * std::sin(angle);
        view.labels[j] = static_cast<int>(c);
    }
    ds.views.push_back(std::move(view));
    ds.validate();
    return ds;
}

LabeledDataset generate(const GeneratorSpec& spec) {
    switch (spec.kind) {
        case GeneratorKind::gaussian_blobs: return gen_gaussian_blobs(spec);
        case GeneratorKind::atom: return gen_atom(spec);
        case GeneratorKind::lsun: return gen_lsun(spec);
        case GeneratorKind::rings: return gen_rings(spec);
    }
    throw std::invalid_argument("generate: unknown kind");
}

LabeledDataset compose_multiview(const std::vector<LabeledDataset>& parts, std::uint64_t seed,
                                 bool permute) {
    require(!parts.empty(), "compose_multiview: no parts");
    const Eigen::Index n = parts.front().data.num_samples();
    Eigen::Index d_total = 0;
    for (const auto& part : parts) {
        part.validate();
        if (part.data.num_samples() != n) {
            throw std::invalid_argument("compose_multiview: parts disagree on sample count (" +
                                        std::to_string(part.data.num_samples()) + " vs " +
                                        std::to_string(n) + ")");
        }
        d_total += part.data.num_features();
    }

    LabeledDataset out;
    out.data.values.resize(d_total, n);
    Eigen::Index row = 0;
    bool any_names = false;
    for (const auto& part : parts) any_names = any_names || part.data.feature_names.has_value();
    std::vector<std::string> names;

    for (std::size_t p = 0; p < parts.size(); ++p) {
        const auto& part = parts[p];
        std::vector<std::size_t> perm;
        if (permute) {
            Rng rng = Rng::stream(seed, 0xc0135e + p);
            perm = rng.permutation(static_cast<std::size_t>(n));
        } else {
            perm.resize(static_cast<std::size_t>(n));
            for (std::size_t j = 0; j < perm.size(); ++j) perm[j] = j;
        }
        const Eigen::Index dp = part.data.num_features();
        for (Eigen::Index j = 0; j < n; ++j) {
            out.data.values.block(row, j, dp, 1) =
                part.data.values.col(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(j)]));
        }
        for (const auto& view : part.views) {
            std::string name = view.name;
            for (const auto& existing : out.views) {
                if (existing.name == name) {
                    name = view.name + "_" + std::to_string(p);
                    break;
                }
            }
            LabelView moved{std::move(name), std::vector<int>(static_cast<std::size_t>(n))};
            for (Eigen::Index j = 0; j < n; ++j) {
                moved.labels[static_cast<std::size_t>(j)] = view.labels[perm[static_cast<std::size_t>(j)]];
            }
            out.views.push_back(std::move(moved));
        }
        if (any_names) {
            for (Eigen::Index i = 0; i < dp; ++i) {
                names.push_back(part.data.feature_names
                                    ? (*part.data.feature_names)[static_cast<std::size_t>(i)]
                                    : "part" + std::to_string(p) + "_f" + std::to_string(i));
            }
        }
        row += dp;
    }
    if (any_names) out.data.feature_names = std::move(names);
    out.validate();
    return out;
}

}  // namespace misc
