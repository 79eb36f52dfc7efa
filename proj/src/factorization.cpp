#include "misc/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "misc/rng.hpp"

namespace misc {

KernelSpec::Kind kernel_kind_from_string(const std::string& name) {
    if (name == "gaussian") return KernelSpec::Kind::gaussian;
    if (name == "linear") return KernelSpec::Kind::linear;
    throw std::invalid_argument("unknown kernel kind '" + name + "'");
}

double auto_kernel_width(const Eigen::MatrixXd& X) {
    const Eigen::VectorXd mean = X.rowwise().mean();
    return std::sqrt((X.colwise() - mean).colwise().squaredNorm().mean());
}

Eigen::MatrixXd gram(const Eigen::MatrixXd& X, const KernelSpec& spec) {
    const Eigen::Index n = X.cols();
    if (spec.kind == KernelSpec::Kind::linear) {
        Eigen::MatrixXd K = X.transpose() * X;
        K = 0.5 * (K + K.transpose()).eval();
        return K;
    }
    const double sigma = spec.width ? *spec.width : auto_kernel_width(X);
    if (!(sigma > 0.0)) {
        throw std::runtime_error("gram: kernel width is zero (all samples identical)");
    }
    const Eigen::VectorXd sq = X.colwise().squaredNorm();
    Eigen::MatrixXd dist2 = (-2.0 * X.transpose() * X).eval();
    dist2.colwise() += sq;
    dist2.rowwise() += sq.transpose();
    dist2 = dist2.cwiseMax(0.0);
    Eigen::MatrixXd K = (-dist2 / (2.0 * sigma * sigma)).array().exp();
    K = 0.5 * (K + K.transpose()).eval();
    K.diagonal().setOnes();
    return K;
}

NeighborhoodGraph knn_graph(const Eigen::MatrixXd& X, int eps) {
    const Eigen::Index n = X.cols();
    if (eps < 1 || eps >= n) {
        throw std::invalid_argument("knn_graph: eps must satisfy 1 <= eps < n, got eps=" +
                                    std::to_string(eps) + ", n=" + std::to_string(n));
    }
    const Eigen::VectorXd sq = X.colwise().squaredNorm();
    NeighborhoodGraph g;
    g.neighbors_per_node = eps;
    g.adjacency = Eigen::MatrixXd::Zero(n, n);

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd d2 = sq.array() - 2.0 * (X.transpose() * X.col(i)).array() + sq(i);
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        // Ties fall to the lower index: the comparator is strict on distance
        // and the sort is made stable by the index tiebreak.
        std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            if (d2(a) != d2(b)) return d2(a) < d2(b);
            return a < b;
        });
        int taken = 0;
        for (Eigen::Index j : order) {
            if (j == i) continue;
            g.adjacency(i, j) = 1.0;
            if (++taken == eps) break;
        }
    }
    // OR-symmetrization.
    g.adjacency = g.adjacency.cwiseMax(g.adjacency.transpose().eval());
    g.degree = g.adjacency.rowwise().sum();
    g.laplacian = Eigen::MatrixXd(g.degree.asDiagonal()) - g.adjacency;
    return g;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> split_pos_neg(const Eigen::MatrixXd& M) {
    return {M.cwiseMax(0.0), (-M).cwiseMax(0.0)};
}

Eigen::MatrixXd update_w(const Eigen::MatrixXd& W, const Eigen::MatrixXd& H,
                         const Eigen::MatrixXd& K_plus, const Eigen::MatrixXd& K_minus,
                         double guard) {
    const Eigen::MatrixXd Ht = H.transpose();
    const Eigen::MatrixXd WHHt = W * (H * Ht);
    const Eigen::MatrixXd numer = K_plus * Ht + K_minus * WHHt;
    const Eigen::MatrixXd denom = K_minus * Ht + K_plus * WHHt;
    return W.array() * (numer.array() / (denom.array() + guard)).sqrt();
}

Eigen::MatrixXd update_h(const Eigen::MatrixXd& W, const Eigen::MatrixXd& H,
                         const Eigen::MatrixXd& K_plus, const Eigen::MatrixXd& K_minus,
                         const Eigen::MatrixXd& P, const Eigen::VectorXd& degree, double lambda,
                         double guard, bool printed_form) {
    const Eigen::MatrixXd K = K_plus - K_minus;
    const auto [WtK_p, WtK_m] = split_pos_neg(W.transpose() * K);
    const auto [WtKW_p, WtKW_m] = split_pos_neg(W.transpose() * K * W);

    Eigen::MatrixXd numer, denom;
    if (printed_form) {
        // Update as printed upstream: identical fit terms on both sides, the
        // graph split applied to H L as a whole.
        Eigen::MatrixXd L = -P;
        L.diagonal() += degree;
        const auto [HL_p, HL_m] = split_pos_neg(H * L);
        const Eigen::MatrixXd fit = WtK_p + WtKW_p * H;
        numer = fit + lambda * HL_m;
        denom = fit + lambda * HL_p;
    } else {
        numer = WtK_p + WtKW_m * H;
        denom = WtK_m + WtKW_p * H;
        if (lambda > 0.0) {
            numer += lambda * (H * P);
            denom += lambda * (H * degree.asDiagonal());
        }
    }
    return H.array() * (numer.array() / (denom.array() + guard)).sqrt();
}

double graph_penalty(const Eigen::MatrixXd& H, const Eigen::MatrixXd& laplacian) {
    return ((H * laplacian).array() * H.array()).sum();
}

namespace {

void random_init(Eigen::MatrixXd& M, Rng& rng) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
        for (Eigen::Index i = 0; i < M.rows(); ++i) {
            M(i, j) = 1.0 - rng.uniform();  // (0, 1]: multiplicative updates need a positive start
        }
    }
}

bool relative_drop_below(double prev, double curr, double rel_tol) {
    const double scale = std::max(std::abs(prev), 1e-300);
    return std::abs(prev - curr) / scale < rel_tol;
}

void check_finite(double value, const char* what) {
    if (!std::isfinite(value)) {
        throw std::runtime_error(std::string(what) + ": objective became non-finite");
    }
}

}  // namespace

FactorizationState kgsnmf(const Eigen::MatrixXd& K, const NeighborhoodGraph* graph, int k,
                          const SolverConfig& cfg) {
    const Eigen::Index n = K.cols();
    if (K.rows() != n) throw std::invalid_argument("kgsnmf: kernel matrix must be square");
    if (!K.isApprox(K.transpose(), 1e-10)) {
        throw std::invalid_argument("kgsnmf: kernel matrix must be symmetric");
    }
    if (k < 1 || k > n) throw std::invalid_argument("kgsnmf: k must be in 1..n");
    if (cfg.lambda > 0.0 && graph == nullptr) {
        throw std::invalid_argument("kgsnmf: lambda > 0 requires a neighborhood graph");
    }

    const auto [K_plus, K_minus] = split_pos_neg(K);
    const bool has_negative = K_minus.maxCoeff() > 0.0;
    const double trace_K = K.trace();

    Rng rng = Rng::stream(cfg.seed, 0x59);
    FactorizationState state;
    state.W.resize(n, k);
    state.H.resize(k, n);
    random_init(state.W, rng);
    random_init(state.H, rng);

    const Eigen::MatrixXd empty_P;
    const Eigen::VectorXd empty_d;
    const Eigen::MatrixXd& P = graph ? graph->adjacency : empty_P;
    const Eigen::VectorXd& deg = graph ? graph->degree : empty_d;

    // Neighbor lists make the graph terms O(edges * k) instead of O(n^2 k).
    std::vector<std::vector<Eigen::Index>> neighbors;
    if (graph && cfg.lambda > 0.0) {
        neighbors.resize(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (P(i, j) != 0.0) neighbors[static_cast<std::size_t>(i)].push_back(j);
            }
        }
    }
    auto graph_terms = [&](const Eigen::MatrixXd& H, Eigen::MatrixXd& HP) {
        HP.resize(H.rows(), n);
        for (Eigen::Index j = 0; j < n; ++j) {
            HP.col(j).setZero();
            for (Eigen::Index i : neighbors[static_cast<std::size_t>(j)]) HP.col(j) += H.col(i);
        }
    };
    auto penalty = [&](const Eigen::MatrixXd& H) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index i : neighbors[static_cast<std::size_t>(j)]) {
                acc += (H.col(j) - H.col(i)).squaredNorm();
            }
        }
        return 0.5 * acc;  // each edge visited twice
    };

    Eigen::MatrixXd KW = K * state.W;  // maintained across the sweep
    auto objective = [&](const Eigen::MatrixXd& W, const Eigen::MatrixXd& H) {
        double value = trace_K - 2.0 * (KW.array() * H.transpose().array()).sum() +
                       ((W.transpose() * KW).array() * (H * H.transpose()).array()).sum();
        if (cfg.lambda > 0.0) value += cfg.lambda * penalty(H);
        return value;
    };

    state.objective_trace.push_back(objective(state.W, state.H));
    check_finite(state.objective_trace.back(), "kgsnmf");
    Eigen::MatrixXd HP;
    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        if (has_negative) {
            state.W = update_w(state.W, state.H, K_plus, K_minus, cfg.epsilon_guard);
        } else {
            // K_minus is identically zero, so Eq.-style terms with it vanish
            // and K W from the previous sweep can serve as the denominator.
            const Eigen::MatrixXd numer = K * state.H.transpose();
            const Eigen::MatrixXd denom = KW * (state.H * state.H.transpose());
            state.W = (state.W.array() * (numer.array() / (denom.array() + cfg.epsilon_guard)).sqrt())
                          .matrix();
        }
        KW.noalias() = K * state.W;

        if (has_negative || cfg.use_printed_h_update) {
            state.H = update_h(state.W, state.H, K_plus, K_minus, P, deg, cfg.lambda,
                               cfg.epsilon_guard, cfg.use_printed_h_update);
        } else {
            const Eigen::MatrixXd WtK = KW.transpose();  // K symmetric, W, K >= 0
            const Eigen::MatrixXd WtKW = state.W.transpose() * KW;
            Eigen::MatrixXd numer = WtK;
            Eigen::MatrixXd denom = WtKW * state.H;
            if (cfg.lambda > 0.0) {
                graph_terms(state.H, HP);
                numer += cfg.lambda * HP;
                denom += cfg.lambda * (state.H * deg.asDiagonal());
            }
            state.H =
                (state.H.array() * (numer.array() / (denom.array() + cfg.epsilon_guard)).sqrt())
                    .matrix();
        }

        const double value = objective(state.W, state.H);
        check_finite(value, "kgsnmf");
        state.objective_trace.push_back(value);
        state.iterations = iter + 1;
        const double prev = state.objective_trace[state.objective_trace.size() - 2];
        if (relative_drop_below(prev, value, cfg.rel_tol)) {
            state.converged = true;
            break;
        }
    }
    return state;
}

SolverVariant solver_variant_from_string(const std::string& name) {
    if (name == "snmf") return SolverVariant::snmf;
    if (name == "gsnmf") return SolverVariant::gsnmf;
    if (name == "ksnmf") return SolverVariant::ksnmf;
    if (name == "kgsnmf") return SolverVariant::kgsnmf;
    throw std::invalid_argument("unknown solver variant '" + name + "'");
}

std::string to_string(SolverVariant variant) {
    switch (variant) {
        case SolverVariant::snmf: return "snmf";
        case SolverVariant::gsnmf: return "gsnmf";
        case SolverVariant::ksnmf: return "ksnmf";
        case SolverVariant::kgsnmf: return "kgsnmf";
    }
    return "unknown";
}

namespace {

// Input-space semi-NMF: basis by ridge least squares, H multiplicatively.
FactorizationState input_space_solver(const Eigen::MatrixXd& X, int k, double lambda,
                                      const NeighborhoodGraph* graph, const SolverConfig& cfg) {
    const Eigen::Index n = X.cols();
    Rng rng = Rng::stream(cfg.seed, 0x59);
    FactorizationState state;
    // Input-space variants carry no sample-weight matrix; W stays zero.
    state.W = Eigen::MatrixXd::Zero(n, k);
    state.H.resize(k, n);
    random_init(state.H, rng);

    bool warned_singular = false;
    Eigen::MatrixXd Z;
    auto solve_basis = [&](const Eigen::MatrixXd& H) {
        Eigen::MatrixXd HHt = H * H.transpose();
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(HHt);
        if (eig.eigenvalues().minCoeff() < 1e-10 && !warned_singular) {
            state.warnings.push_back("H H^T numerically singular; ridge applied");
            warned_singular = true;
        }
        HHt.diagonal().array() += 1e-10;
        return Eigen::MatrixXd((HHt.ldlt().solve(H * X.transpose())).transpose());
    };

    auto objective = [&](const Eigen::MatrixXd& Zc, const Eigen::MatrixXd& H) {
        double value = (X - Zc * H).squaredNorm();
        if (lambda > 0.0) value += lambda * graph_penalty(H, graph->laplacian);
        return value;
    };

    Z = solve_basis(state.H);
    state.objective_trace.push_back(objective(Z, state.H));
    check_finite(state.objective_trace.back(), "snmf");
    const Eigen::MatrixXd empty_P;
    const Eigen::VectorXd empty_d;
    const Eigen::MatrixXd& P = graph ? graph->adjacency : empty_P;
    const Eigen::VectorXd& deg = graph ? graph->degree : empty_d;

    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        Z = solve_basis(state.H);
        const auto [A_p, A_m] = split_pos_neg(Z.transpose() * X);
        const auto [B_p, B_m] = split_pos_neg(Z.transpose() * Z);
        Eigen::MatrixXd numer = A_p + B_m * state.H;
        Eigen::MatrixXd denom = A_m + B_p * state.H;
        if (lambda > 0.0) {
            numer += lambda * (state.H * P);
            denom += lambda * (state.H * deg.asDiagonal());
        }
        state.H = state.H.array() * (numer.array() / (denom.array() + cfg.epsilon_guard)).sqrt();

        const double value = objective(Z, state.H);
        check_finite(value, "snmf");
        state.objective_trace.push_back(value);
        state.iterations = iter + 1;
        const double prev = state.objective_trace[state.objective_trace.size() - 2];
        if (relative_drop_below(prev, value, cfg.rel_tol)) {
            state.converged = true;
            break;
        }
    }
    return state;
}

}  // namespace

FactorizationState ablation_solver(const Eigen::MatrixXd& X, int k, SolverVariant variant,
                                   const SolverConfig& cfg, const KernelSpec& kernel,
                                   int eps_neighbors) {
    switch (variant) {
        case SolverVariant::snmf:
            return input_space_solver(X, k, 0.0, nullptr, cfg);
        case SolverVariant::gsnmf: {
            if (cfg.lambda == 0.0) return input_space_solver(X, k, 0.0, nullptr, cfg);
            const NeighborhoodGraph graph = knn_graph(X, eps_neighbors);
            return input_space_solver(X, k, cfg.lambda, &graph, cfg);
        }
        case SolverVariant::ksnmf: {
            SolverConfig no_graph = cfg;
            no_graph.lambda = 0.0;
            return kgsnmf(gram(X, kernel), nullptr, k, no_graph);
        }
        case SolverVariant::kgsnmf: {
            if (cfg.lambda == 0.0) return kgsnmf(gram(X, kernel), nullptr, k, cfg);
            const NeighborhoodGraph graph = knn_graph(X, eps_neighbors);
            return kgsnmf(gram(X, kernel), &graph, k, cfg);
        }
    }
    throw std::invalid_argument("ablation_solver: unknown variant");
}

}  // namespace misc
