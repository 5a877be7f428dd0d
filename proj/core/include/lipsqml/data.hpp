#pragma once

/**
 * @file data.hpp
 * Circle classification data, input preprocessing and noise batches.
 */

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace lipsqml {

/// sqrt(2/pi): the disc then covers half of [-1, 1]^2.
inline const double kCircleRadius = std::sqrt(2.0 / std::numbers::pi);

/// Slope of the map [-1, 1] -> [-pi, pi] applied before the model.
inline constexpr double kAngleScale = std::numbers::pi;

class Dataset {
  public:
    explicit Dataset(std::size_t dim = 2, std::uint64_t seed = 0) : dim_(dim), seed_(seed) {}

    void add(std::span<const double> x, int label);

    [[nodiscard]] std::size_t size() const { return labels_.size(); }
    [[nodiscard]] bool empty() const { return labels_.empty(); }
    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] std::uint64_t seed() const { return seed_; }
    [[nodiscard]] std::span<const double> point(std::size_t k) const {
        return {coords_.data() + k * dim_, dim_};
    }
    [[nodiscard]] int label(std::size_t k) const { return labels_[k]; }
    [[nodiscard]] const std::vector<int> &labels() const { return labels_; }

  private:
    std::size_t dim_;
    std::uint64_t seed_;
    std::vector<double> coords_;
    std::vector<int> labels_;
};

/// +1 strictly inside the circle, -1 otherwise.
int circle_label(std::span<const double> x);

/// n i.i.d. uniform points on [-1, 1]^2, labelled by circle_label.
Dataset generate_circle_dataset(std::size_t n, std::uint64_t seed);

/**
 * Componentwise multiplication by pi. Values outside [-1, 1] are scaled all
 * the same; `outside` (when given) reports whether that happened.
 */
std::vector<double> rescale_to_angle_domain(std::span<const double> x, bool *outside = nullptr);

/// Copy of `data` with every point rescaled to the angle domain.
Dataset rescale_dataset(const Dataset &data);

/**
 * Unit perturbation directions, uniform in [-1, 1]^d, `samples` per point.
 * The actual perturbation at budget eps is eps * draw, so every eps reuses
 * the same directions.
 */
class NoiseBatch {
  public:
    NoiseBatch(std::size_t points, std::size_t samples, std::size_t dim, std::uint64_t seed);

    [[nodiscard]] std::size_t points() const { return points_; }
    [[nodiscard]] std::size_t samples() const { return samples_; }
    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] std::span<const double> draw(std::size_t point, std::size_t sample) const {
        return {draws_.data() + (point * samples_ + sample) * dim_, dim_};
    }

  private:
    std::size_t points_;
    std::size_t samples_;
    std::size_t dim_;
    std::vector<double> draws_;
};

} // namespace lipsqml
