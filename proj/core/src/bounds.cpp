#include "lipsqml/bounds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace lipsqml {

namespace {

Eigen::MatrixXcd dense_matrix(const Observable &obs, std::size_t n_qubits) {
    const auto dim = Eigen::Index{1} << n_qubits;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto &term : obs.terms) {
        Complex y_phase{1.0, 0.0};
        for (unsigned k = 0; k < term.y_count(); ++k) {
            y_phase *= Complex{0.0, 1.0};
        }
        for (Eigen::Index b = 0; b < dim; ++b) {
            const auto ub = static_cast<std::uint64_t>(b);
            const double sign = (std::popcount(ub & term.z_mask()) & 1U) ? -1.0 : 1.0;
            const auto row = static_cast<Eigen::Index>(ub ^ term.x_mask());
            m(row, b) += term.coefficient() * sign * y_phase;
        }
    }
    return m;
}

void require_positive(double v, const char *what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + " must be positive and finite");
    }
}

double scale_sum(const Circuit &circuit) {
    double sum = 0.0;
    for (std::size_t j = 0; j < circuit.rotation_count(); ++j) {
        sum += std::abs(circuit.rotation(j).scale);
    }
    return sum;
}

} // namespace

double spectral_norm(const Observable &obs, NormMode mode) {
    if (mode == NormMode::upper) {
        return obs.coefficient_l1();
    }
    const std::size_t n = std::max<std::size_t>(1, obs.min_qubits());
    if (n > kExactNormMaxQubits) {
        throw std::invalid_argument("exact spectral norm limited to " +
                                    std::to_string(kExactNormMaxQubits) + " qubits");
    }
    if (obs.terms.empty()) {
        return 0.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense_matrix(obs, n),
                                                           Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("spectral_norm: eigensolver did not converge");
    }
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<double> per_gate_terms(const Circuit &circuit, const ModelParams &params) {
    circuit.check_params(params);
    std::vector<double> terms(circuit.rotation_count());
    for (std::size_t j = 0; j < terms.size(); ++j) {
        terms[j] = params.W.row(static_cast<Eigen::Index>(j)).norm() *
                   std::abs(circuit.rotation(j).scale);
    }
    return terms;
}

double lipschitz_tight(const Circuit &circuit, const ModelParams &params, const Observable &obs,
                       NormMode mode) {
    double sum = 0.0;
    for (double t : per_gate_terms(circuit, params)) {
        sum += t;
    }
    return 2.0 * spectral_norm(obs, mode) * sum;
}

double lipschitz_simple(const Circuit &circuit, const ModelParams &params, const Observable &obs,
                        NormMode mode) {
    circuit.check_params(params);
    const double sigma_max =
        params.W.size() == 0 ? 0.0 : Eigen::JacobiSVD<Eigen::MatrixXd>(params.W).singularValues()(0);
    return 2.0 * spectral_norm(obs, mode) * sigma_max * scale_sum(circuit);
}

std::string to_string(DomainConvention c) {
    return c == DomainConvention::raw_data_space ? "raw_data_space" : "scaled_data_space";
}

BoundReport make_bound_report(const Circuit &circuit, const ModelParams &params,
                              const Observable &obs, NormMode mode) {
    BoundReport report;
    report.obs_norm = spectral_norm(obs, mode);
    report.per_gate_terms = per_gate_terms(circuit, params);
    report.lipschitz_tight = lipschitz_tight(circuit, params, obs, mode);
    report.lipschitz_simple = lipschitz_simple(circuit, params, obs, mode);
    report.domain_convention = DomainConvention::scaled_data_space;
    report.raw_space_factor = std::numbers::pi;
    return report;
}

double covering_number_upper(double radius, double gamma, std::size_t data_dim) {
    require_positive(radius, "radius");
    require_positive(gamma, "gamma");
    return std::pow(6.0 * radius / gamma, static_cast<double>(data_dim + 1));
}

double auto_gamma(double n, std::size_t data_dim) {
    require_positive(n, "n");
    return std::pow(n, -1.0 / static_cast<double>(2 * data_dim + 2));
}

GenBoundInputs squared_loss_defaults(double lipschitz, std::size_t data_dim, double n,
                                     double delta) {
    GenBoundInputs in;
    in.lipschitz = lipschitz;
    // |grad (y - f)^2| = 2 sqrt(2) |y - f| <= 4 sqrt(2) for y, f in [-1, 1].
    in.loss_lipschitz = 4.0 * std::numbers::sqrt2;
    in.loss_sup = 4.0;
    // Z = [-pi, pi]^d x {-1, 1}, centred at the origin.
    in.radius = std::sqrt(static_cast<double>(data_dim) * std::numbers::pi * std::numbers::pi + 1.0);
    in.data_dim = data_dim;
    in.n = n;
    in.delta = delta;
    return in;
}

double generalization_bound(const GenBoundInputs &in) {
    if (!(in.lipschitz >= 0.0) || !std::isfinite(in.lipschitz)) {
        throw std::invalid_argument("lipschitz must be non-negative and finite");
    }
    require_positive(in.loss_lipschitz, "loss_lipschitz");
    require_positive(in.loss_sup, "loss_sup");
    require_positive(in.n, "n");
    if (in.data_dim < 1) {
        throw std::invalid_argument("data_dim must be positive");
    }
    if (!(in.delta > 0.0 && in.delta < 1.0)) {
        throw std::invalid_argument("delta must lie in (0, 1)");
    }
    const double gamma = in.gamma ? *in.gamma : auto_gamma(in.n, in.data_dim);
    const double covering = covering_number_upper(in.radius, gamma, in.data_dim);
    const double robustness = gamma * in.loss_lipschitz * std::max(1.0, in.lipschitz);
    const double sampling =
        in.loss_sup *
        std::sqrt((2.0 * covering * std::numbers::ln2 + 2.0 * std::log(1.0 / in.delta)) / in.n);
    return robustness + sampling;
}

} // namespace lipsqml
