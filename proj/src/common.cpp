#include "slackal/common.hpp"
#include "slackal/errors.hpp"

namespace slackal {

bool Box::contains(const Vector& x, double tol) const {
    if (x.size() != lower.size()) return false;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!(x[i] >= lower[i] - tol && x[i] <= upper[i] + tol)) return false;
    }
    return true;
}

Vector Box::clamp(const Vector& x) const {
    return x.cwiseMax(lower).cwiseMin(upper);
}

Vector Box::from_unit(const Vector& u) const {
    return lower + (upper - lower).cwiseProduct(u);
}

Vector Box::to_unit(const Vector& x) const {
    return (x - lower).cwiseQuotient(upper - lower);
}

ConstraintKinds::ConstraintKinds(int inequalities, int equalities)
    : m_(inequalities), p_(equalities) {
    if (m_ < 0 || p_ < 0) throw ShapeError("constraint counts must be nonnegative");
}

ConstraintKinds::ConstraintKinds(std::vector<ConstraintKind> kinds) {
    bool seen_equality = false;
    for (ConstraintKind k : kinds) {
        if (k == ConstraintKind::Equality) {
            seen_equality = true;
            ++p_;
        } else {
            if (seen_equality)
                throw ShapeError("inequality constraints must precede equality constraints");
            ++m_;
        }
    }
}

void require_size(const Vector& v, int expected, const std::string& what) {
    if (v.size() != expected) {
        throw ShapeError(what + ": expected length " + std::to_string(expected) + ", got " +
                         std::to_string(v.size()));
    }
}

} // namespace slackal
