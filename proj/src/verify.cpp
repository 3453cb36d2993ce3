#include "semrd/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>
#include <thread>

namespace semrd {

namespace {

void check_delta(const GaussianSemanticModel& model, const Matrix& Delta) {
    const Matrix& K = model.K_X();
    if (Delta.rows() != K.rows() || Delta.cols() != K.cols()) throw Error(Errc::DimensionMismatch, "Delta must be m x m");
    if (!Delta.allFinite() || !linalg::is_symmetric(Delta, 1e-10))
        throw Error(Errc::DeltaOutOfRange, "Delta must be finite and symmetric");
    const Matrix D = linalg::symmetrize(Delta);
    if (Eigen::LLT<Matrix>(D).info() != Eigen::Success || linalg::min_eigenvalue(D) <= 0.0)
        throw Error(Errc::DeltaOutOfRange, "Delta must be positive definite");
    if (linalg::min_eigenvalue(linalg::symmetrize(K - D)) < -linalg::kEigenFloor * linalg::max_eigenvalue(K))
        throw Error(Errc::DeltaOutOfRange, "Delta must not exceed K_X");
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Counter-based stream: the k-th draw of a shard is a pure function of
// (seed, shard, k).
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t shard) : key_(splitmix64(seed ^ splitmix64(shard + 1))) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(th);
        has_spare_ = true;
        return r * std::cos(th);
    }

private:
    double uniform() {
        const std::uint64_t bits = splitmix64(key_ + 0x632BE59BD9B4E019ULL * counter_++);
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;  // in (0, 1)
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct Moments {
    double n = 0.0;
    double mean_o = 0.0;
    double m2_o = 0.0;
    double mean_s = 0.0;
    double m2_s = 0.0;
};

void merge(Moments& into, const Moments& b) {
    if (b.n == 0.0) return;
    const double n = into.n + b.n;
    const double d_o = b.mean_o - into.mean_o;
    const double d_s = b.mean_s - into.mean_s;
    into.m2_o += b.m2_o + d_o * d_o * into.n * b.n / n;
    into.m2_s += b.m2_s + d_s * d_s * into.n * b.n / n;
    into.mean_o += d_o * b.n / n;
    into.mean_s += d_s * b.n / n;
    into.n = n;
}

constexpr std::size_t kShard = 65536;

}  // namespace

unsigned default_worker_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SEMRD_WORKERS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
    }
    return n;
}

TestChannel build_test_channel(const GaussianSemanticModel& model, const Matrix& Delta) {
    check_delta(model, Delta);
    const Matrix D = linalg::symmetrize(Delta);
    const Eigen::Index m = D.rows();
    const Eigen::LLT<Matrix> chol(model.K_X());
    const Matrix DKinv = chol.solve(D).transpose();  // Delta K^{-1}
    Matrix noise = linalg::symmetrize(D - DKinv * D);
    const double floor = linalg::kEigenFloor * std::max(1.0, linalg::max_eigenvalue(model.K_X()));
    if (!linalg::clip_to_psd(noise, floor)) throw Error(Errc::DeltaOutOfRange, "test-channel noise is not psd");
    return {Matrix::Identity(m, m) - DKinv, noise, model.H(), D, model};
}

double lemma2_psd_check(const Matrix& Delta, const Matrix& K) {
    if (Delta.rows() != K.rows() || Delta.cols() != K.cols() || K.rows() != K.cols())
        throw Error(Errc::DimensionMismatch, "Delta and K must be square of equal size");
    const Matrix D = linalg::symmetrize(Delta);
    const Matrix KinvD = Eigen::LLT<Matrix>(linalg::symmetrize(K)).solve(D);
    return linalg::min_eigenvalue(linalg::symmetrize(D - D * KinvD));
}

ChannelMoments channel_moments(const TestChannel& ch) {
    const Matrix& K = ch.model.K_X();
    ChannelMoments mo;
    mo.K_XXhat = K * ch.gain.transpose();
    mo.K_Xhat = linalg::symmetrize(ch.gain * K * ch.gain.transpose() + ch.noise_cov);
    mo.K_XShat = mo.K_XXhat * ch.state_map.transpose();
    mo.K_Shat = linalg::symmetrize(ch.state_map * mo.K_Xhat * ch.state_map.transpose());
    return mo;
}

ChannelDistortions closed_form_distortions(const TestChannel& ch) {
    const Matrix& K = ch.model.K_X();
    const ChannelMoments mo = channel_moments(ch);
    // E||X - X^||^2 = tr K - 2 tr K_XX^ + tr K_X^
    const double d_o = K.trace() - 2.0 * mo.K_XXhat.trace() + mo.K_Xhat.trace();
    const Matrix& H = ch.model.H();
    const double d_s = (H * K * H.transpose()).trace() - 2.0 * (H * mo.K_XShat).trace() + ch.model.trace_K_Z() +
                       mo.K_Shat.trace();
    return {d_o, d_s};
}

MonteCarloEstimate monte_carlo_distortions(const TestChannel& ch, std::size_t n_samples, std::uint64_t seed,
                                           unsigned workers) {
    if (n_samples == 0) throw Error(Errc::InvalidArgument, "n_samples must be positive");
    const Eigen::Index m = ch.model.obs_dim();
    const Eigen::Index l = ch.model.state_dim();
    const Matrix sx = linalg::psd_sqrt(ch.model.K_X());
    const Matrix sz = linalg::psd_sqrt(ch.model.K_Z());
    const Matrix su = linalg::psd_sqrt(ch.noise_cov);
    const Matrix& G = ch.gain;
    const Matrix& H = ch.model.H();

    const std::size_t shards = (n_samples + kShard - 1) / kShard;
    std::vector<Moments> parts(shards);
    auto run_shard = [&](std::size_t s) {
        const std::size_t begin = s * kShard;
        const auto n = static_cast<Eigen::Index>(std::min(kShard, n_samples - begin));
        NormalStream rng(seed, s);
        Matrix wx(m, n), wz(l, n), wu(m, n);
        for (Eigen::Index k = 0; k < n; ++k) {
            for (Eigen::Index i = 0; i < m; ++i) wx(i, k) = rng.next();
            for (Eigen::Index i = 0; i < l; ++i) wz(i, k) = rng.next();
            for (Eigen::Index i = 0; i < m; ++i) wu(i, k) = rng.next();
        }
        const Matrix X = sx * wx;
        const Matrix Xhat = G * X + su * wu;
        const Matrix S = H * X + sz * wz;
        const Matrix Shat = H * Xhat;
        const Vector eo = (X - Xhat).colwise().squaredNorm().transpose();
        const Vector es = (S - Shat).colwise().squaredNorm().transpose();
        Moments mo;
        mo.n = static_cast<double>(n);
        mo.mean_o = eo.mean();
        mo.mean_s = es.mean();
        mo.m2_o = (eo.array() - mo.mean_o).square().sum();
        mo.m2_s = (es.array() - mo.mean_s).square().sum();
        parts[s] = mo;
    };

    const unsigned nw = std::max(1u, std::min<unsigned>(workers == 0 ? default_worker_count() : workers,
                                                        static_cast<unsigned>(shards)));
    if (nw == 1) {
        for (std::size_t s = 0; s < shards; ++s) run_shard(s);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < nw; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t s = w; s < shards; s += nw) run_shard(s);
            });
        for (auto& t : pool) t.join();
    }

    Moments total;
    for (const auto& p : parts) merge(total, p);
    MonteCarloEstimate est;
    est.samples = n_samples;
    est.Do_hat = total.mean_o;
    est.Ds_hat = total.mean_s;
    const double nn = total.n;
    if (nn > 1.0) {
        est.Do_se = std::sqrt(total.m2_o / (nn - 1.0) / nn);
        est.Ds_se = std::sqrt(total.m2_s / (nn - 1.0) / nn);
    }
    return est;
}

double rate_of_test_channel(const GaussianSemanticModel& model, const Matrix& Delta) {
    check_delta(model, Delta);
    return 0.5 * (linalg::logdet_spd(model.K_X()) - linalg::logdet_spd(linalg::symmetrize(Delta)));
}

}  // namespace semrd
