#include "mixnorm/model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace mixnorm {

Exponent Exponent::infinity() {
    return Exponent(Kind::infinity, std::numeric_limits<double>::infinity());
}

Exponent Exponent::general(double q) {
    if (!(q > 1.0) || !std::isfinite(q)) {
        throw InvalidExponentError("general exponent must lie in (1, inf), got " +
                                   std::to_string(q));
    }
    return Exponent(Kind::general, q);
}

Exponent Exponent::from_value(double q) {
    if (std::isnan(q) || q < 1.0) {
        throw InvalidExponentError("exponent must satisfy q >= 1, got " + std::to_string(q));
    }
    if (q == 1.0) return one();
    if (q == 2.0) return two();
    if (std::isinf(q)) return infinity();
    return general(q);
}

Exponent Exponent::parse(std::string_view text) {
    std::string lower;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    if (lower == "inf" || lower == "infinity" || lower == "+inf") return infinity();
    double q = 0.0;
    auto [ptr, ec] = std::from_chars(lower.data(), lower.data() + lower.size(), q);
    if (ec != std::errc() || ptr != lower.data() + lower.size()) {
        throw InvalidExponentError("cannot parse exponent '" + std::string(text) + "'");
    }
    return from_value(q);
}

Exponent Exponent::dual() const {
    switch (kind_) {
        case Kind::one: return infinity();
        case Kind::two: return two();
        case Kind::infinity: return one();
        case Kind::general: break;
    }
    return general(value_ / (value_ - 1.0));
}

std::string Exponent::to_string() const {
    if (kind_ == Kind::infinity) return "inf";
    std::ostringstream os;
    os << value_;
    return os.str();
}

double lp_norm(const Eigen::Ref<const Vector>& x, const Exponent& q) {
    if (x.size() == 0) return 0.0;
    switch (q.kind()) {
        case Exponent::Kind::one: return x.lpNorm<1>();
        case Exponent::Kind::two: return x.norm();
        case Exponent::Kind::infinity: return x.lpNorm<Eigen::Infinity>();
        case Exponent::Kind::general: break;
    }
    const double scale = x.lpNorm<Eigen::Infinity>();
    if (scale == 0.0 || !std::isfinite(scale)) return scale;
    const double p = q.value();
    double sum = 0.0;
    for (Index i = 0; i < x.size(); ++i) {
        const double r = std::abs(x[i]) / scale;
        if (r > 0.0) sum += std::pow(r, p);
    }
    return scale * std::pow(sum, 1.0 / p);
}

GroupPartition::GroupPartition(std::vector<Index> sizes) : sizes_(std::move(sizes)) {
    offsets_.assign(1, 0);
    offsets_.reserve(sizes_.size() + 1);
    for (Index s : sizes_) {
        if (s < 1) throw DimensionError("group sizes must be positive");
        offsets_.push_back(offsets_.back() + s);
    }
}

GroupPartition GroupPartition::uniform(Index groups, Index group_size) {
    if (groups < 0) throw DimensionError("group count must be nonnegative");
    return GroupPartition(std::vector<Index>(static_cast<std::size_t>(groups), group_size));
}

GroupedVector::GroupedVector(PartitionPtr partition)
    : partition_(std::move(partition)), values_(Vector::Zero(partition_->dim())) {}

GroupedVector::GroupedVector(PartitionPtr partition, Vector values)
    : partition_(std::move(partition)), values_(std::move(values)) {
    if (values_.size() != partition_->dim()) {
        throw DimensionError("grouped vector length " + std::to_string(values_.size()) +
                             " does not match partition dimension " +
                             std::to_string(partition_->dim()));
    }
}

double mixed_norm(const Eigen::Ref<const Vector>& values, const GroupPartition& partition,
                  const Exponent& q) {
    if (values.size() != partition.dim()) {
        throw DimensionError("vector length does not match partition");
    }
    double total = 0.0;
    for (Index g = 0; g < partition.num_groups(); ++g) {
        total += lp_norm(values.segment(partition.offset(g), partition.size(g)), q);
    }
    return total;
}

double mixed_norm(const GroupedVector& w, const Exponent& q) {
    return mixed_norm(w.values(), w.partition(), q);
}

ProblemInstance::ProblemInstance(Matrix design, Vector response, GroupPartition partition,
                                 Exponent q, double lambda)
    : q_(q), lambda_(lambda) {
    if (design.cols() != partition.dim()) {
        throw DimensionError("design has " + std::to_string(design.cols()) +
                             " columns but partition covers " + std::to_string(partition.dim()));
    }
    if (design.rows() != response.size()) {
        throw DimensionError("design has " + std::to_string(design.rows()) +
                             " rows but response has length " + std::to_string(response.size()));
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw InvalidParameterError("lambda must be finite and nonnegative");
    }
    if (!design.allFinite() || !response.allFinite()) {
        throw InputError("design and response must be finite");
    }
    data_ = std::make_shared<const Data>(
        Data{std::move(design), std::move(response),
             std::make_shared<const GroupPartition>(std::move(partition))});
}

ProblemInstance ProblemInstance::with_lambda(double lambda) const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw InvalidParameterError("lambda must be finite and nonnegative");
    }
    ProblemInstance copy = *this;
    copy.lambda_ = lambda;
    return copy;
}

ProblemInstance ProblemInstance::with_exponent(const Exponent& q) const {
    ProblemInstance copy = *this;
    copy.q_ = q;
    return copy;
}

namespace {

void check_shape(const ProblemInstance& inst, Index n) {
    if (n != inst.dim()) {
        throw DimensionError("coefficient length " + std::to_string(n) +
                             " does not match problem dimension " + std::to_string(inst.dim()));
    }
}

}  // namespace

double least_squares_loss(const ProblemInstance& inst, const Vector& w) {
    check_shape(inst, w.size());
    return 0.5 * (inst.response() - inst.design() * w).squaredNorm();
}

double objective(const ProblemInstance& inst, const GroupedVector& w) {
    check_shape(inst, w.dim());
    double value = least_squares_loss(inst, w.values());
    if (inst.lambda() > 0.0) value += inst.lambda() * mixed_norm(w.values(), inst.partition(), inst.q());
    return value;
}

GroupedVector gradient_ls(const ProblemInstance& inst, const GroupedVector& w) {
    check_shape(inst, w.dim());
    Vector residual = inst.design() * w.values() - inst.response();
    return GroupedVector(inst.partition_ptr(), inst.design().transpose() * residual);
}

double LeastSquaresLoss::value(const Vector& w) const { return least_squares_loss(inst_, w); }

double LeastSquaresLoss::value_and_gradient(const Vector& w, Vector& grad) const {
    check_shape(inst_, w.size());
    Vector residual = inst_.design() * w - inst_.response();
    grad.noalias() = inst_.design().transpose() * residual;
    return 0.5 * residual.squaredNorm();
}

}  // namespace mixnorm
