#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "mixnorm/model.hpp"

namespace mixnorm {

/// Seeded generator for synthetic data. Draws come from std::mt19937_64 raw
/// output with in-house uniform and Box-Muller transforms, so streams are
/// identical across standard library implementations.
class Rng {
public:
    static constexpr const char* kName = "mt19937_64/box-muller v1";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();

    Matrix normal_matrix(Index rows, Index cols);
    Vector normal_vector(Index n);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

enum class EntryDist { uniform01, standard_normal };

EntryDist parse_entry_dist(const std::string& name);
std::string to_string(EntryDist dist);

struct SynthSpec {
    // Jointly sparse multi-task model: A is m x d, X_true is d x k.
    Index m = 100;
    Index d = 200;
    Index k = 50;
    Index d_tilde = 50;
    double sigma = 0.1;
    EntryDist entry_dist = EntryDist::standard_normal;

    // Screening model: B is m x p split into `groups` contiguous groups.
    Index p = 1000;
    Index groups = 100;
    double corr_lo = -0.8;
    double corr_hi = 0.8;

    std::uint64_t seed = 0;

    void validate_joint_sparse() const;
    void validate_screening() const;
};

struct JointSparseData {
    Matrix A;
    Matrix X_true;
    Matrix Y;
};

/// A ~ N(0,1); the first d_tilde rows of X_true drawn from entry_dist, the
/// rest zero; Y = A X_true + Z with Z ~ N(0, sigma^2).
JointSparseData gen_joint_sparse(const SynthSpec& spec);

/// Gaussian Y and columns b_j = rho_j Yhat + sqrt(1 - rho_j^2) xi_j, where
/// Yhat is the centered, normalized response, xi_j is centered Gaussian noise
/// orthonormalized against Yhat, and rho_j ~ U[corr_lo, corr_hi]. Columns are
/// centered with unit norm, so the sample correlation of b_j with Y is rho_j.
ProblemInstance gen_screening_instance(const SynthSpec& spec, const Exponent& q = Exponent::two(),
                                       double lambda = 0.0);

/// Near-equal contiguous sizes; the first p % groups groups get one extra.
GroupPartition even_partition(Index p, Index groups);

}  // namespace mixnorm
