#include "fabsim/cost.hpp"

#include <cmath>
#include <stdexcept>

namespace fabsim {

double pixel_l2(const Observation& a, const Observation& b) {
    if (a.px.size() != b.px.size()) throw std::invalid_argument("observation size mismatch");
    double acc = 0;
    for (int r = kBorderCrop; r < Observation::height - kBorderCrop; ++r) {
        for (int c = kBorderCrop; c < Observation::width - kBorderCrop; ++c) {
            for (int ch = 0; ch < Observation::channels; ++ch) {
                double d = double(a.at(r, c, ch)) - double(b.at(r, c, ch));
                acc += d * d;
            }
        }
    }
    return std::sqrt(acc);
}

double vertex_l2(const std::vector<Vec3>& a, const std::vector<Vec3>& b, VertexMode mode) {
    if (a.size() != b.size()) throw std::invalid_argument("mesh size mismatch");
    double acc = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        double dx = double(a[i].x) - b[i].x;
        double dy = double(a[i].y) - b[i].y;
        double dz = double(a[i].z) - b[i].z;
        double sq = dx * dx + dy * dy + dz * dz;
        acc += mode == VertexMode::sum_sq ? sq : std::sqrt(sq);
    }
    return acc;
}

bool classify_success(const Observation& final_obs, const ClothState* final_mesh,
                      const Goal& goal, const SuccessThresholds& th) {
    if (pixel_l2(final_obs, goal.obs) < th.pixel) return true;
    if (final_mesh && vertex_l2(*final_mesh, goal.mesh) < th.vertex) return true;
    return false;
}

}  // namespace fabsim
