#ifndef MISC_FACTORIZATION_HPP
#define MISC_FACTORIZATION_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace misc {

struct KernelSpec {
    enum class Kind { gaussian, linear };
    Kind kind = Kind::gaussian;
    std::optional<double> width;  // nullopt: sigma = sqrt(mean squared distance to the data mean)
};

KernelSpec::Kind kernel_kind_from_string(const std::string& name);

// 0-1 epsilon-nearest-neighbor graph, OR-symmetrized, with L = D - P.
struct NeighborhoodGraph {
    Eigen::MatrixXd adjacency;  // P, symmetric, zero diagonal
    Eigen::VectorXd degree;     // row sums of P
    Eigen::MatrixXd laplacian;  // D - P
    int neighbors_per_node = 0;
};

struct SolverConfig {
    double lambda = 10.0;
    int max_iter = 500;
    double rel_tol = 1e-6;
    std::uint64_t seed = 0;
    double epsilon_guard = 1e-12;
    // Applies the H update exactly as printed upstream instead of the
    // KKT-consistent form; kept for side-by-side comparison only.
    bool use_printed_h_update = false;
};

struct FactorizationState {
    Eigen::MatrixXd W;  // n x k, nonnegative
    Eigen::MatrixXd H;  // k x n, nonnegative
    std::vector<double> objective_trace;
    bool converged = false;
    int iterations = 0;
    std::vector<std::string> warnings;
};

double auto_kernel_width(const Eigen::MatrixXd& X);

// Kernel matrix over sample columns: gaussian exp(-||xi-xj||^2 / (2 sigma^2))
// or linear X^T X. Gaussian width resolves per `spec`; throws when all
// samples coincide (sigma = 0).
Eigen::MatrixXd gram(const Eigen::MatrixXd& X, const KernelSpec& spec);

// P_ij = 1 iff j is among i's eps nearest neighbors or vice versa; distance
// ties break toward the lower index. Requires 1 <= eps < n.
NeighborhoodGraph knn_graph(const Eigen::MatrixXd& X, int eps);

// Elementwise split M = M_plus - M_minus with both parts nonnegative and
// disjoint supports.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> split_pos_neg(const Eigen::MatrixXd& M);

Eigen::MatrixXd update_w(const Eigen::MatrixXd& W, const Eigen::MatrixXd& H,
                         const Eigen::MatrixXd& K_plus, const Eigen::MatrixXd& K_minus,
                         double guard = 1e-12);

Eigen::MatrixXd update_h(const Eigen::MatrixXd& W, const Eigen::MatrixXd& H,
                         const Eigen::MatrixXd& K_plus, const Eigen::MatrixXd& K_minus,
                         const Eigen::MatrixXd& P, const Eigen::VectorXd& degree, double lambda,
                         double guard = 1e-12, bool printed_form = false);

// tr(H L H^T).
double graph_penalty(const Eigen::MatrixXd& H, const Eigen::MatrixXd& laplacian);

// Kernel graph-regularized semi-NMF: alternates the W and H multiplicative
// updates on a precomputed kernel matrix, minimizing
//   tr(K) - 2 tr(K W H) + tr(H^T W^T K W H) + lambda tr(H L H^T).
// `graph` may be null when lambda = 0.
FactorizationState kgsnmf(const Eigen::MatrixXd& K, const NeighborhoodGraph* graph, int k,
                          const SolverConfig& cfg);

enum class SolverVariant { snmf, gsnmf, ksnmf, kgsnmf };

SolverVariant solver_variant_from_string(const std::string& name);
std::string to_string(SolverVariant variant);

// Runs one factorization variant on raw data: snmf/gsnmf alternate a
// least-squares basis with the multiplicative H update in input space;
// ksnmf/kgsnmf work on the kernel matrix (ksnmf forces lambda = 0).
FactorizationState ablation_solver(const Eigen::MatrixXd& X, int k, SolverVariant variant,
                                   const SolverConfig& cfg, const KernelSpec& kernel = {},
                                   int eps_neighbors = 5);

}  // namespace misc

#endif  // MISC_FACTORIZATION_HPP
