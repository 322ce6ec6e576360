#include "mixnorm/synth.hpp"

#include <cmath>
#include <numbers>

namespace mixnorm {

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

Matrix Rng::normal_matrix(Index rows, Index cols) {
    Matrix out(rows, cols);
    // Row-major fill order so the stream does not depend on storage layout.
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) out(r, c) = normal();
    }
    return out;
}

Vector Rng::normal_vector(Index n) {
    Vector out(n);
    for (Index i = 0; i < n; ++i) out[i] = normal();
    return out;
}

EntryDist parse_entry_dist(const std::string& name) {
    if (name == "uniform01" || name == "uniform") return EntryDist::uniform01;
    if (name == "standard_normal" || name == "normal") return EntryDist::standard_normal;
    throw InvalidParameterError("unknown entry distribution '" + name + "'");
}

std::string to_string(EntryDist dist) {
    return dist == EntryDist::uniform01 ? "uniform01" : "standard_normal";
}

void SynthSpec::validate_joint_sparse() const {
    if (m < 1 || d < 1 || k < 1) throw InvalidParameterError("dimensions must be positive");
    if (d_tilde < 0 || d_tilde > d) throw InvalidParameterError("d_tilde must lie in [0, d]");
    if (!(sigma >= 0.0)) throw InvalidParameterError("sigma must be nonnegative");
}

void SynthSpec::validate_screening() const {
    if (m < 3) throw InvalidParameterError("screening instances need m >= 3");
    if (p < 1 || groups < 1 || groups > p) throw InvalidParameterError("need 1 <= groups <= p");
    if (!(corr_lo >= -1.0 && corr_lo <= corr_hi && corr_hi <= 1.0)) {
        throw InvalidParameterError("correlation range must satisfy -1 <= lo <= hi <= 1");
    }
}

GroupPartition even_partition(Index p, Index groups) {
    std::vector<Index> sizes(static_cast<std::size_t>(groups), p / groups);
    for (Index g = 0; g < p % groups; ++g) ++sizes[static_cast<std::size_t>(g)];
    return GroupPartition(std::move(sizes));
}

JointSparseData gen_joint_sparse(const SynthSpec& spec) {
    spec.validate_joint_sparse();
    Rng rng(spec.seed);
    JointSparseData data;
    data.A = rng.normal_matrix(spec.m, spec.d);
    data.X_true = Matrix::Zero(spec.d, spec.k);
    for (Index r = 0; r < spec.d_tilde; ++r) {
        for (Index c = 0; c < spec.k; ++c) {
            data.X_true(r, c) = spec.entry_dist == EntryDist::uniform01 ? rng.uniform() : rng.normal();
        }
    }
    data.Y = data.A * data.X_true;
    if (spec.sigma > 0.0) data.Y += spec.sigma * rng.normal_matrix(spec.m, spec.k);
    return data;
}

ProblemInstance gen_screening_instance(const SynthSpec& spec, const Exponent& q, double lambda) {
    spec.validate_screening();
    Rng rng(spec.seed);
    const Vector y = rng.normal_vector(spec.m);
    Vector y_hat = y.array() - y.mean();
    y_hat /= y_hat.norm();

    Matrix design(spec.m, spec.p);
    for (Index j = 0; j < spec.p; ++j) {
        const double rho = rng.uniform(spec.corr_lo, spec.corr_hi);
        Vector xi = rng.normal_vector(spec.m);
        xi.array() -= xi.mean();
        xi -= xi.dot(y_hat) * y_hat;
        xi /= xi.norm();
        design.col(j) = rho * y_hat + std::sqrt(std::max(0.0, 1.0 - rho * rho)) * xi;
    }
    return ProblemInstance(std::move(design), y, even_partition(spec.p, spec.groups), q, lambda);
}

}  // namespace mixnorm
