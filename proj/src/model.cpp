#include "semrd/model.hpp"

#include <cmath>
#include <sstream>

namespace semrd {

namespace {

constexpr double kPmfTol = 1e-12;

void check_distortion_table(const Matrix& d, const char* name) {
    if (d.rows() == 0 || d.cols() == 0)
        throw Error(Errc::DimensionMismatch, std::string(name) + " distortion table is empty");
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        const double v = d.data()[i];
        if (!std::isfinite(v) || v < 0.0)
            throw Error(Errc::InvalidDistortion, std::string(name) + " distortion entries must be finite and nonnegative");
    }
}

std::string shape(const Matrix& m) {
    std::ostringstream os;
    os << m.rows() << "x" << m.cols();
    return os.str();
}

// Relative eigenvalue floor used for psd checks of covariance-like inputs.
double psd_floor(const Matrix& sym) {
    const double scale = sym.size() == 0 ? 0.0 : sym.cwiseAbs().maxCoeff();
    return linalg::kEigenFloor * std::max(1.0, scale);
}

}  // namespace

DiscreteSemanticSource DiscreteSemanticSource::create(Matrix joint_pmf, Matrix state_distortion, Matrix obs_distortion) {
    if (joint_pmf.rows() == 0 || joint_pmf.cols() == 0) throw Error(Errc::InvalidPmf, "joint pmf is empty");
    double total = 0.0;
    for (Eigen::Index i = 0; i < joint_pmf.size(); ++i) {
        const double v = joint_pmf.data()[i];
        if (!std::isfinite(v) || v < 0.0) throw Error(Errc::InvalidPmf, "joint pmf entries must be nonnegative");
        total += v;
    }
    if (std::abs(total - 1.0) > kPmfTol) throw Error(Errc::InvalidPmf, "joint pmf must sum to 1 within 1e-12");
    check_distortion_table(state_distortion, "state");
    check_distortion_table(obs_distortion, "observation");
    if (state_distortion.rows() != joint_pmf.rows())
        throw Error(Errc::DimensionMismatch, "state distortion " + shape(state_distortion) + " does not match |S| = " +
                                                 std::to_string(joint_pmf.rows()));
    if (obs_distortion.rows() != joint_pmf.cols())
        throw Error(Errc::DimensionMismatch, "observation distortion " + shape(obs_distortion) +
                                                 " does not match |X| = " + std::to_string(joint_pmf.cols()));
    Vector p_x = joint_pmf.colwise().sum().transpose();
    for (Eigen::Index x = 0; x < p_x.size(); ++x)
        if (!(p_x(x) > 0.0))
            throw Error(Errc::ZeroProbabilitySymbol, "observation symbol " + std::to_string(x) + " has zero probability");
    return DiscreteSemanticSource(std::move(joint_pmf), std::move(state_distortion), std::move(obs_distortion),
                                  std::move(p_x));
}

Matrix DiscreteSemanticSource::state_given_obs() const {
    Matrix cond = joint_;
    for (Eigen::Index x = 0; x < cond.cols(); ++x) cond.col(x) /= p_x_(x);
    return cond;
}

MultiStateDiscreteSource MultiStateDiscreteSource::create(std::vector<State> states, Matrix obs_distortion) {
    if (states.empty()) throw Error(Errc::InvalidArgument, "at least one state is required");
    std::vector<DiscreteSemanticSource> built;
    built.reserve(states.size());
    for (auto& st : states)
        built.push_back(DiscreteSemanticSource::create(std::move(st.joint_pmf), std::move(st.distortion), obs_distortion));
    const Vector& ref = built.front().obs_marginal();
    for (const auto& s : built) {
        if (s.obs_size() != built.front().obs_size())
            throw Error(Errc::DimensionMismatch, "states disagree on the observation alphabet size");
        if ((s.obs_marginal() - ref).cwiseAbs().maxCoeff() > kPmfTol)
            throw Error(Errc::InvalidPmf, "states disagree on the observation marginal p(x)");
    }
    return MultiStateDiscreteSource(std::move(built));
}

MultiStateDiscreteSource MultiStateDiscreteSource::from_single(const DiscreteSemanticSource& source) {
    return MultiStateDiscreteSource({source});
}

DiscreteSemanticSource deterministic_state_source(const Vector& p_x, const std::vector<std::size_t>& g, const Matrix& d_s,
                                                  const Matrix& d_o) {
    if (static_cast<Eigen::Index>(g.size()) != p_x.size())
        throw Error(Errc::DimensionMismatch, "state map must have one entry per observation symbol");
    Matrix joint = Matrix::Zero(d_s.rows(), p_x.size());
    for (std::size_t x = 0; x < g.size(); ++x) {
        if (static_cast<Eigen::Index>(g[x]) >= d_s.rows())
            throw Error(Errc::DimensionMismatch, "state map value out of range of the state alphabet");
        joint(static_cast<Eigen::Index>(g[x]), static_cast<Eigen::Index>(x)) = p_x(static_cast<Eigen::Index>(x));
    }
    return DiscreteSemanticSource::create(std::move(joint), d_s, d_o);
}

Matrix hamming_distortion(std::size_t rows, std::size_t cols) {
    Matrix d = Matrix::Ones(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < std::min(rows, cols); ++i) d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 0.0;
    return d;
}

GaussianSemanticModel validate_gaussian_model(const Matrix& K_X, const Matrix& H, const Matrix& K_Z) {
    const Eigen::Index m = K_X.rows();
    if (m == 0 || K_X.cols() != m) throw Error(Errc::DimensionMismatch, "K_X must be square and nonempty, got " + shape(K_X));
    if (H.rows() == 0 || H.cols() != m) throw Error(Errc::DimensionMismatch, "H must be l x " + std::to_string(m) + ", got " + shape(H));
    if (K_Z.rows() != H.rows() || K_Z.cols() != H.rows())
        throw Error(Errc::DimensionMismatch, "K_Z must be " + std::to_string(H.rows()) + " x " + std::to_string(H.rows()) +
                                                 ", got " + shape(K_Z));
    if (!K_X.allFinite() || !H.allFinite() || !K_Z.allFinite())
        throw Error(Errc::InvalidArgument, "model matrices must be finite");
    if (!linalg::is_symmetric(K_X)) throw Error(Errc::NonSymmetric, "K_X is not symmetric");
    if (!linalg::is_symmetric(K_Z)) throw Error(Errc::NonSymmetric, "K_Z is not symmetric");

    Matrix kx = linalg::symmetrize(K_X);
    Matrix kz = linalg::symmetrize(K_Z);
    Eigen::SelfAdjointEigenSolver<Matrix> es(kx, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(hi > 0.0) || !(lo > linalg::kEigenFloor * hi))
        throw Error(Errc::NotPositiveDefinite, "K_X is not positive definite (smallest eigenvalue " + std::to_string(lo) + ")");
    if (kz.size() > 0 && linalg::min_eigenvalue(kz) < -psd_floor(kz))
        throw Error(Errc::NotPsd, "K_Z is not positive semidefinite");
    return GaussianSemanticModel(std::move(kx), H, std::move(kz));
}

GaussianSemanticModel MultiStateGaussianModel::state_model(std::size_t j) const {
    return validate_gaussian_model(k_x_, states_.at(j).H, states_.at(j).K_Z);
}

MultiStateGaussianModel validate_multi_state_model(const Matrix& K_X, const std::vector<LinearState>& states) {
    if (states.empty()) throw Error(Errc::InvalidArgument, "at least one state is required");
    std::vector<LinearState> clean;
    clean.reserve(states.size());
    Matrix kx;
    for (const auto& st : states) {
        auto model = validate_gaussian_model(K_X, st.H, st.K_Z);
        kx = model.K_X();
        clean.push_back({model.H(), model.K_Z()});
    }
    return MultiStateGaussianModel(std::move(kx), std::move(clean));
}

LinearState jointly_gaussian_to_linear(const Matrix& K_S, const Matrix& K_SX, const Matrix& K_X) {
    const Eigen::Index m = K_X.rows();
    const Eigen::Index l = K_S.rows();
    if (K_X.cols() != m || K_S.cols() != l || K_SX.rows() != l || K_SX.cols() != m)
        throw Error(Errc::DimensionMismatch, "joint covariance blocks have inconsistent shapes");
    const Matrix kx = linalg::symmetrize(K_X);
    Eigen::LLT<Matrix> llt(kx);
    if (llt.info() != Eigen::Success) throw Error(Errc::NotPositiveDefinite, "K_X is not positive definite");

    Matrix joint(l + m, l + m);
    joint << linalg::symmetrize(K_S), K_SX, K_SX.transpose(), kx;
    if (linalg::min_eigenvalue(joint) < -psd_floor(joint))
        throw Error(Errc::JointCovarianceNotPsd, "joint covariance of (S, X) is not positive semidefinite");

    // H = K_SX K_X^{-1}  <=>  K_X H^T = K_SX^T
    Matrix h = llt.solve(K_SX.transpose()).transpose();
    Matrix kz = linalg::symmetrize(linalg::symmetrize(K_S) - h * K_SX.transpose());
    if (!linalg::clip_to_psd(kz, psd_floor(joint)))
        throw Error(Errc::JointCovarianceNotPsd, "conditional covariance K_S - K_SX K_X^{-1} K_SX^T is not psd");
    return {std::move(h), std::move(kz)};
}

void validate_budget(const DistortionBudget& b) {
    if (std::isnan(b.D_s) || std::isnan(b.D_o) || b.D_s < 0.0 || b.D_o < 0.0)
        throw Error(Errc::InvalidArgument, "distortion budgets must be nonnegative");
}

void validate_budget(const WeightedBudget& b) {
    if (std::isnan(b.w_s) || std::isnan(b.w_o) || std::isnan(b.D_bar) || b.w_s < 0.0 || b.w_o < 0.0 || b.D_bar < 0.0)
        throw Error(Errc::InvalidArgument, "weights and weighted budget must be nonnegative");
    if (b.w_s == 0.0 && b.w_o == 0.0) throw Error(Errc::InvalidArgument, "weights must not both be zero");
}

void validate_budget(const MultiBudget& b) {
    if (std::isnan(b.D_o) || b.D_o < 0.0) throw Error(Errc::InvalidArgument, "distortion budgets must be nonnegative");
    for (double d : b.D_s)
        if (std::isnan(d) || d < 0.0) throw Error(Errc::InvalidArgument, "distortion budgets must be nonnegative");
}

void validate_budget(const MatrixBudget& b) {
    if (!linalg::is_symmetric(b.D_s) || !linalg::is_symmetric(b.D_o))
        throw Error(Errc::NonSymmetric, "matrix budgets must be symmetric");
}

}  // namespace semrd
