#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mixnorm/error.hpp"

namespace mixnorm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Exponent q of an l_q norm, q in [1, +inf].
///
/// The values 1, 2 and +inf are tagged so that closed-form branches are
/// selected by kind rather than by comparing floats. `general(q)` builds an
/// untagged finite exponent and is the only way to route q = 2 through the
/// iterative machinery.
class Exponent {
public:
    enum class Kind { one, two, infinity, general };

    static Exponent one() { return Exponent(Kind::one, 1.0); }
    static Exponent two() { return Exponent(Kind::two, 2.0); }
    static Exponent infinity();
    static Exponent general(double q);

    // Tags 1, 2 and +inf; anything else in (1, inf) becomes general.
    static Exponent from_value(double q);
    // Accepts numbers and "inf"/"infinity" (case-insensitive).
    static Exponent parse(std::string_view text);

    Kind kind() const { return kind_; }
    double value() const { return value_; }
    bool is_infinite() const { return kind_ == Kind::infinity; }

    /// Conjugate exponent q/(q-1), with 1 <-> inf.
    Exponent dual() const;

    std::string to_string() const;

    friend bool operator==(const Exponent&, const Exponent&) = default;

private:
    Exponent(Kind kind, double value) : kind_(kind), value_(value) {}

    Kind kind_;
    double value_;
};

/// l_q norm of a dense vector. Finite general exponents are evaluated on the
/// max-scaled vector so large entries do not overflow.
double lp_norm(const Eigen::Ref<const Vector>& x, const Exponent& q);

/// Contiguous, non-overlapping group layout over p coordinates.
class GroupPartition {
public:
    GroupPartition() = default;
    explicit GroupPartition(std::vector<Index> sizes);

    static GroupPartition uniform(Index groups, Index group_size);
    static GroupPartition singletons(Index p) { return uniform(p, 1); }

    Index num_groups() const { return static_cast<Index>(sizes_.size()); }
    Index dim() const { return offsets_.empty() ? 0 : offsets_.back(); }
    Index size(Index g) const { return sizes_[static_cast<std::size_t>(g)]; }
    Index offset(Index g) const { return offsets_[static_cast<std::size_t>(g)]; }
    const std::vector<Index>& sizes() const { return sizes_; }
    const std::vector<Index>& offsets() const { return offsets_; }

    friend bool operator==(const GroupPartition& a, const GroupPartition& b) {
        return a.sizes_ == b.sizes_;
    }

private:
    std::vector<Index> sizes_;
    std::vector<Index> offsets_{0};
};

using PartitionPtr = std::shared_ptr<const GroupPartition>;

/// Length-p coefficient vector addressable per group.
class GroupedVector {
public:
    GroupedVector() = default;
    explicit GroupedVector(PartitionPtr partition);
    GroupedVector(PartitionPtr partition, Vector values);

    static GroupedVector zeros(PartitionPtr partition) { return GroupedVector(std::move(partition)); }

    const GroupPartition& partition() const { return *partition_; }
    const PartitionPtr& partition_ptr() const { return partition_; }

    Vector& values() { return values_; }
    const Vector& values() const { return values_; }

    auto group(Index g) { return values_.segment(partition_->offset(g), partition_->size(g)); }
    auto group(Index g) const { return values_.segment(partition_->offset(g), partition_->size(g)); }

    Index dim() const { return values_.size(); }
    Index num_groups() const { return partition_->num_groups(); }

private:
    PartitionPtr partition_ = std::make_shared<const GroupPartition>();
    Vector values_;
};

/// Sum over groups of the l_q norm of each group.
double mixed_norm(const GroupedVector& w, const Exponent& q);
/// Overload for callers holding a raw value vector.
double mixed_norm(const Eigen::Ref<const Vector>& values, const GroupPartition& partition,
                  const Exponent& q);

/// Dense least-squares problem min 1/2 ||Y - B W||^2 + lambda sum_i ||w_i||_q.
///
/// The data (B, Y, partition) is shared and immutable, so changing lambda or
/// q produces a cheap copy.
class ProblemInstance {
public:
    ProblemInstance(Matrix design, Vector response, GroupPartition partition, Exponent q,
                    double lambda);

    const Matrix& design() const { return data_->design; }
    const Vector& response() const { return data_->response; }
    const GroupPartition& partition() const { return *data_->partition; }
    const PartitionPtr& partition_ptr() const { return data_->partition; }
    const Exponent& q() const { return q_; }
    double lambda() const { return lambda_; }

    Index rows() const { return data_->design.rows(); }
    Index dim() const { return data_->design.cols(); }
    Index num_groups() const { return partition().num_groups(); }

    /// Column block B_i of group g, a view into the design matrix.
    auto block(Index g) const {
        return data_->design.middleCols(partition().offset(g), partition().size(g));
    }

    ProblemInstance with_lambda(double lambda) const;
    ProblemInstance with_exponent(const Exponent& q) const;

    GroupedVector zeros() const { return GroupedVector::zeros(partition_ptr()); }

private:
    struct Data {
        Matrix design;
        Vector response;
        PartitionPtr partition;
    };

    std::shared_ptr<const Data> data_;
    Exponent q_;
    double lambda_;
};

/// 1/2 ||Y - B W||^2 + lambda * mixed_norm(W, q).
double objective(const ProblemInstance& inst, const GroupedVector& w);
/// Smooth part 1/2 ||Y - B W||^2 only.
double least_squares_loss(const ProblemInstance& inst, const Vector& w);
/// B^T (B W - Y).
GroupedVector gradient_ls(const ProblemInstance& inst, const GroupedVector& w);

/// Smooth convex loss used by the accelerated solver.
class SmoothLoss {
public:
    virtual ~SmoothLoss() = default;
    virtual Index dim() const = 0;
    virtual double value(const Vector& w) const = 0;
    /// Writes the gradient at w into grad and returns the loss value.
    virtual double value_and_gradient(const Vector& w, Vector& grad) const = 0;
};

class LeastSquaresLoss final : public SmoothLoss {
public:
    explicit LeastSquaresLoss(const ProblemInstance& inst) : inst_(inst) {}

    Index dim() const override { return inst_.dim(); }
    double value(const Vector& w) const override;
    double value_and_gradient(const Vector& w, Vector& grad) const override;

private:
    ProblemInstance inst_;
};

}  // namespace mixnorm
