#include "semrd/linalg.hpp"

#include <cmath>

#include "semrd/error.hpp"

namespace semrd {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::NonSymmetric: return "NonSymmetric";
        case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
        case Errc::NotPsd: return "NotPsd";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::JointCovarianceNotPsd: return "JointCovarianceNotPsd";
        case Errc::InvalidPmf: return "InvalidPmf";
        case Errc::ZeroProbabilitySymbol: return "ZeroProbabilitySymbol";
        case Errc::InvalidDistortion: return "InvalidDistortion";
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::Parse: return "Parse";
        case Errc::Infeasible: return "Infeasible";
        case Errc::InfeasibleBudget: return "InfeasibleBudget";
        case Errc::MaxIterationsExceeded: return "MaxIterationsExceeded";
        case Errc::NewtonFailure: return "NewtonFailure";
        case Errc::RootFindingFailure: return "RootFindingFailure";
        case Errc::TooLarge: return "TooLarge";
        case Errc::NonPositiveSigma: return "NonPositiveSigma";
        case Errc::DeltaOutOfRange: return "DeltaOutOfRange";
        case Errc::NotDiagonalizable: return "NotDiagonalizable";
    }
    return "Unknown";
}

namespace linalg {

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

bool is_symmetric(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    if (m.size() == 0) return true;
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, m.cwiseAbs().maxCoeff());
}

double min_eigenvalue(const Matrix& sym) {
    if (sym.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double max_eigenvalue(const Matrix& sym) {
    if (sym.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

bool try_logdet_spd(const Matrix& sym, double& out) {
    Eigen::LLT<Matrix> llt(sym);
    if (llt.info() != Eigen::Success) return false;
    const auto diag = llt.matrixLLT().diagonal();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
        if (!(diag(i) > 0.0)) return false;
        acc += std::log(diag(i));
    }
    out = 2.0 * acc;
    return true;
}

double logdet_spd(const Matrix& sym) {
    double out = 0.0;
    if (!try_logdet_spd(sym, out)) throw Error(Errc::NotPositiveDefinite, "logdet of a non-positive-definite matrix");
    return out;
}

Matrix psd_sqrt(const Matrix& sym) {
    if (sym.size() == 0) return sym;
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(sym));
    Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

bool clip_to_psd(Matrix& sym, double floor) {
    if (sym.size() == 0) return true;
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(sym));
    if (es.eigenvalues().minCoeff() < -floor) return false;
    if (es.eigenvalues().minCoeff() >= 0.0) {
        sym = symmetrize(sym);
        return true;
    }
    Vector ev = es.eigenvalues().cwiseMax(0.0);
    sym = symmetrize(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose());
    return true;
}

Matrix project_psd(const Matrix& sym) {
    if (sym.size() == 0) return sym;
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(sym));
    Vector ev = es.eigenvalues().cwiseMax(0.0);
    return symmetrize(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose());
}

}  // namespace linalg
}  // namespace semrd
