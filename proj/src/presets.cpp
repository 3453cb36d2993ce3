#include "semrd/presets.hpp"

#include <random>

namespace semrd::presets {

GaussianSemanticModel toy_model() {
    Matrix kx(3, 3), h(2, 3), kz(2, 2);
    kx << 11, 0, 0.5, 0, 3, -2, 0.5, -2, 2.35;
    h << 0.0701, 0.305, 0.457, -0.0305, -0.220, 0.671;
    kz << 0.701, -0.305, -0.305, 0.220;
    return validate_gaussian_model(kx, h, kz);
}

CirculantRows circulant_rows() {
    Vector kx = Vector::Zero(128);
    kx(0) = 1.0;
    kx(1) = 0.4;
    kx(127) = 0.4;
    Vector h = Vector::Zero(128);
    h.head(4).setConstant(0.3);
    return {kx, h};
}

GaussianSemanticModel sparse_model(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    Matrix h = Matrix::Zero(16, 64);
    for (Eigen::Index r = 0; r < h.rows(); ++r)
        for (Eigen::Index c = 0; c < h.cols(); ++c) {
            const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
            const bool positive = (gen() & 1u) != 0;
            if (u < 0.05) h(r, c) = positive ? 1.0 : -1.0;
        }
    return validate_gaussian_model(2.0 * Matrix::Identity(64, 64), h, Matrix::Identity(16, 16));
}

DiscreteSemanticSource binary_source() {
    Matrix p(2, 2);
    p << 0.4, 0.1, 0.1, 0.4;
    return DiscreteSemanticSource::create(p, hamming_distortion(2, 2), hamming_distortion(2, 2));
}

}  // namespace semrd::presets
