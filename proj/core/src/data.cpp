#include "lipsqml/data.hpp"

#include <random>
#include <stdexcept>

#include "lipsqml/parallel.hpp"

namespace lipsqml {

void Dataset::add(std::span<const double> x, int label) {
    if (x.size() != dim_) {
        throw std::invalid_argument("Dataset::add: point has wrong dimension");
    }
    if (label != 1 && label != -1) {
        throw std::invalid_argument("Dataset::add: label must be +1 or -1");
    }
    coords_.insert(coords_.end(), x.begin(), x.end());
    labels_.push_back(label);
}

int circle_label(std::span<const double> x) {
    double r2 = 0.0;
    for (double v : x) {
        r2 += v * v;
    }
    return r2 < kCircleRadius * kCircleRadius ? 1 : -1;
}

Dataset generate_circle_dataset(std::size_t n, std::uint64_t seed) {
    if (n < 1) {
        throw std::invalid_argument("generate_circle_dataset: n must be positive");
    }
    Dataset data(2, seed);
    auto rng = make_rng(seed, 0);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double x1 = uniform(rng);
        const double x2 = uniform(rng);
        const double p[2] = {x1, x2};
        data.add(p, circle_label(p));
    }
    return data;
}

std::vector<double> rescale_to_angle_domain(std::span<const double> x, bool *outside) {
    std::vector<double> out(x.size());
    bool flagged = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        flagged = flagged || x[i] < -1.0 || x[i] > 1.0;
        out[i] = kAngleScale * x[i];
    }
    if (outside) {
        *outside = flagged;
    }
    return out;
}

Dataset rescale_dataset(const Dataset &data) {
    Dataset out(data.dim(), data.seed());
    for (std::size_t k = 0; k < data.size(); ++k) {
        out.add(rescale_to_angle_domain(data.point(k)), data.label(k));
    }
    return out;
}

NoiseBatch::NoiseBatch(std::size_t points, std::size_t samples, std::size_t dim,
                       std::uint64_t seed)
    : points_(points), samples_(samples), dim_(dim), draws_(points * samples * dim) {
    if (samples < 1) {
        throw std::invalid_argument("NoiseBatch: need at least one sample per point");
    }
    auto rng = make_rng(seed, 1);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    for (double &v : draws_) {
        v = uniform(rng);
    }
}

} // namespace lipsqml
