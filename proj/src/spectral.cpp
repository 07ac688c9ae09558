#include "hsbm/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "hsbm/localstats.hpp"
#include "hsbm/rng.hpp"
#include "hsbm/saw.hpp"

namespace hsbm {

namespace {

template <class T>
void apply_block(const SparseSymMatrix<T>& m, const Eigen::MatrixXd& x, Eigen::MatrixXd& y) {
    y.resize(x.rows(), x.cols());
    const auto n = static_cast<std::size_t>(x.rows());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        m.multiply(std::span<const double>(x.col(c).data(), n), std::span<double>(y.col(c).data(), n));
    }
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& x) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
    return qr.householderQ() * Eigen::MatrixXd::Identity(x.rows(), x.cols());
}

// Flip so the entries sum to a nonnegative value (ties: first nonzero > 0).
void canonical_sign(std::vector<double>& v) {
    const double sum = std::accumulate(v.begin(), v.end(), 0.0);
    bool flip = sum < 0.0;
    if (sum == 0.0) {
        for (double x : v) {
            if (x != 0.0) {
                flip = x < 0.0;
                break;
            }
        }
    }
    if (flip) {
        for (double& x : v) x = -x;
    }
}

template <class T>
std::vector<EigenPair> block_power(const SparseSymMatrix<T>& m, int k, const EigenOptions& options) {
    if (k < 1 || k > 4) throw std::invalid_argument("top_eigenpairs supports 1 <= k <= 4");
    const auto n = static_cast<Eigen::Index>(m.size());
    if (n == 0) return {};
    k = std::min<int>(k, static_cast<int>(n));
    const Eigen::Index block = std::min<Eigen::Index>(n, k + 4);

    Rng rng(options.seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd q(n, block);
    for (Eigen::Index c = 0; c < block; ++c) {
        for (Eigen::Index r = 0; r < n; ++r) q(r, c) = gauss(rng);
    }
    q = orthonormalize(q);

    Eigen::MatrixXd mq, ritz, mritz;
    Eigen::VectorXd theta(block);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(block));
    std::vector<bool> done(static_cast<std::size_t>(k), false);
    int iterations = 0;
    for (int it = 1; it <= options.max_iter; ++it) {
        iterations = it;
        apply_block(m, q, mq);
        Eigen::MatrixXd small = q.transpose() * mq;
        small = 0.5 * (small + small.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(small);
        const Eigen::VectorXd& vals = eig.eigenvalues();
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](Eigen::Index x, Eigen::Index y) { return std::abs(vals(x)) > std::abs(vals(y)); });
        Eigen::MatrixXd vecs(block, block);
        for (Eigen::Index c = 0; c < block; ++c) {
            vecs.col(c) = eig.eigenvectors().col(order[static_cast<std::size_t>(c)]);
            theta(c) = vals(order[static_cast<std::size_t>(c)]);
        }
        ritz = q * vecs;
        mritz = mq * vecs;
        bool all = true;
        for (int c = 0; c < k; ++c) {
            const double res = (mritz.col(c) - theta(c) * ritz.col(c)).norm();
            done[static_cast<std::size_t>(c)] = res <= options.tol * (std::abs(theta(c)) + 1.0);
            all = all && done[static_cast<std::size_t>(c)];
        }
        if (all) break;
        q = orthonormalize(mritz);
    }

    std::vector<EigenPair> pairs;
    for (int c = 0; c < k; ++c) {
        EigenPair p;
        p.value = theta(c);
        p.vector.assign(ritz.col(c).data(), ritz.col(c).data() + n);
        const double norm = std::sqrt(std::inner_product(p.vector.begin(), p.vector.end(), p.vector.begin(), 0.0));
        for (double& x : p.vector) x /= norm;
        canonical_sign(p.vector);
        p.iterations = iterations;
        p.converged = done[static_cast<std::size_t>(c)];
        pairs.push_back(std::move(p));
    }
    return pairs;
}

double dot(std::span<const double> x, std::span<const double> y) {
    return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

}  // namespace

std::vector<EigenPair> top_eigenpairs(const CountMatrix& m, int k, const EigenOptions& options) {
    return block_power(m, k, options);
}

std::vector<EigenPair> top_eigenpairs(const RealMatrix& m, int k, const EigenOptions& options) {
    return block_power(m, k, options);
}

SpinAssignment estimate_labels(std::span<const double> x, double t) {
    const double cut = t / std::sqrt(static_cast<double>(x.size()));
    std::vector<std::int8_t> labels(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) labels[i] = x[i] >= cut ? 1 : -1;
    return SpinAssignment(std::move(labels));
}

double overlap(const SpinAssignment& estimate, const SpinAssignment& truth) {
    if (estimate.size() != truth.size()) throw std::invalid_argument("overlap of label vectors of different length");
    if (truth.size() == 0) throw std::invalid_argument("overlap of empty label vectors");
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) sum += estimate[i] * truth[i];
    return static_cast<double>(sum) / static_cast<double>(truth.size());
}

double alignment(std::span<const double> v, std::span<const double> w) {
    if (v.size() != w.size()) throw std::invalid_argument("alignment of vectors of different length");
    const double nv = std::sqrt(dot(v, v));
    const double nw = std::sqrt(dot(w, w));
    if (nv == 0.0 || nw == 0.0) throw std::invalid_argument("alignment with a zero vector");
    return std::min(1.0, std::abs(dot(v, w)) / (nv * nw));
}

double bulk_residual(const CountMatrix& b, std::span<const double> v1, std::span<const double> v2, int trials,
                     std::uint64_t seed) {
    const std::size_t n = b.size();
    if (v1.size() != n || v2.size() != n) throw std::invalid_argument("bulk_residual vectors must have length n");
    // Orthonormal basis of span{v1, v2}.
    std::vector<std::vector<double>> basis;
    for (auto v : {v1, v2}) {
        std::vector<double> u(v.begin(), v.end());
        for (const auto& e : basis) {
            const double c = dot(u, e);
            for (std::size_t i = 0; i < n; ++i) u[i] -= c * e[i];
        }
        const double norm = std::sqrt(dot(u, u));
        if (norm > 1e-12 * (1.0 + std::sqrt(dot(v, v)))) {
            for (double& x : u) x /= norm;
            basis.push_back(std::move(u));
        }
    }
    Rng rng(seed);
    std::normal_distribution<double> gauss;
    double worst = 0.0;
    std::vector<double> x(n), y(n);
    for (int trial = 0; trial < trials; ++trial) {
        for (double& xi : x) xi = gauss(rng);
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& e : basis) {
                const double c = dot(x, e);
                for (std::size_t i = 0; i < n; ++i) x[i] -= c * e[i];
            }
        }
        const double norm = std::sqrt(dot(x, x));
        if (norm == 0.0) continue;
        for (double& xi : x) xi /= norm;
        b.multiply(x, y);
        worst = std::max(worst, std::sqrt(dot(y, y)));
    }
    return worst;
}

DetectionResult detect_from_matrix(const Hypergraph& h, const CountMatrix& b, const DetectOptions& options,
                                   const SpinAssignment* truth) {
    if (options.l < 1) throw std::invalid_argument("detection needs l >= 1");
    if (truth != nullptr && truth->size() != h.n()) throw std::invalid_argument("truth length differs from n");
    DetectionResult result;
    result.l = options.l;
    result.threshold_t = options.t;
    result.nnz = b.nnz();
    const std::size_t n = h.n();
    const int k = std::clamp(options.num_pairs, 2, 4);
    result.eigenpairs = top_eigenpairs(b, k, options.eigen);
    for (const auto& p : result.eigenpairs) result.converged = result.converged && p.converged;
    result.zero_spectrum = b.nnz() == 0;

    if (result.eigenpairs.size() >= 2) {
        result.labels = estimate_labels(result.eigenpairs[1].vector, options.t);
    } else {
        result.labels = SpinAssignment(std::vector<std::int8_t>(n, 1));
    }
    if (truth != nullptr) result.overlap = overlap(result.labels, *truth);

    if (!result.zero_spectrum && !result.eigenpairs.empty()) {
        const SpinAssignment& spins = truth != nullptr ? *truth : result.labels;
        const SdVectors sd = sd_vectors(h, spins, options.l);
        const bool s_nonzero = std::any_of(sd.S.begin(), sd.S.end(), [](double x) { return x != 0.0; });
        if (s_nonzero) result.alignment_s = alignment(result.eigenpairs[0].vector, sd.S);
        const bool d_nonzero = std::any_of(sd.D.begin(), sd.D.end(), [](double x) { return x != 0.0; });
        if (truth != nullptr && d_nonzero && result.eigenpairs.size() >= 2) {
            result.alignment_d = alignment(result.eigenpairs[1].vector, sd.D);
        }
    }
    return result;
}

DetectionResult detect(const Hypergraph& h, const DetectOptions& options, const SpinAssignment* truth) {
    if (options.l < 1) throw std::invalid_argument("detection needs l >= 1");
    return detect_from_matrix(h, saw_matrix(h, options.l), options, truth);
}

}  // namespace hsbm
