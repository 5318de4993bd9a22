#include "latpath/distance_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "latpath/errors.hpp"

namespace latpath {

DistanceMatrix DistanceMatrix::compute(const PointCloud& cloud, Storage storage) {
    const std::size_t n = cloud.size();
    if (n == 0) throw DataError("distance matrix of an empty point cloud");

    DistanceMatrix dm;
    dm.n_ = n;
    dm.single_ = (storage == Storage::Float32);
    const std::size_t m = n * (n - 1) / 2;
    if (dm.single_) {
        dm.d32_.resize(m);
    } else {
        dm.d64_.resize(m);
    }

    std::size_t k = 0;
    for (std::size_t i = 1; i < n; ++i) {
        const Point3& a = cloud.points[i];
        for (std::size_t j = 0; j < i; ++j, ++k) {
            const Point3& b = cloud.points[j];
            const double dx = a.x - b.x;
            const double dy = a.y - b.y;
            const double dz = a.z - b.z;
            const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
            if (d == 0.0) {
                throw DataError("duplicate points at indices " +
                                std::to_string(j) + " and " + std::to_string(i) +
                                " (distance 0); jitter the input to separate them");
            }
            if (dm.single_) {
                dm.d32_[k] = static_cast<float>(d);
            } else {
                dm.d64_[k] = d;
            }
        }
    }
    return dm;
}

double enclosing_radius(const DistanceMatrix& dm) {
    const std::size_t n = dm.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double row_max = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            row_max = std::max(row_max, dm(i, j));
        }
        best = std::min(best, row_max);
    }
    return best;
}

}  // namespace latpath
