#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "latpath/point_cloud.hpp"

namespace latpath {

// Dense pairwise Euclidean distances, stored as a packed lower triangle so
// each value is computed once and symmetry holds bitwise. Storage::Float32
// halves the footprint for large clouds; lookups always return double.
class DistanceMatrix {
  public:
    enum class Storage { Float64, Float32 };

    static DistanceMatrix compute(const PointCloud& cloud,
                                  Storage storage = Storage::Float64);

    std::size_t size() const { return n_; }

    double operator()(std::size_t i, std::size_t j) const {
        if (i == j) return 0.0;
        if (i < j) std::swap(i, j);
        const std::size_t k = i * (i - 1) / 2 + j;
        return single_ ? static_cast<double>(d32_[k]) : d64_[k];
    }

  private:
    std::size_t n_ = 0;
    bool single_ = false;
    std::vector<double> d64_;
    std::vector<float> d32_;
};

// min over i of max over j of d(i, j); past this radius the complex is a
// cone over the minimizing point, so no new 1-cycles survive.
double enclosing_radius(const DistanceMatrix& dm);

}  // namespace latpath
