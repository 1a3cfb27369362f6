#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace slackal {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Axis-aligned box of admissible inputs.
struct Box {
    Vector lower;
    Vector upper;

    static Box unit(int dim) { return {Vector::Zero(dim), Vector::Ones(dim)}; }

    [[nodiscard]] int dim() const { return static_cast<int>(lower.size()); }
    [[nodiscard]] bool contains(const Vector& x, double tol = 1e-12) const;
    [[nodiscard]] Vector clamp(const Vector& x) const;
    // Maps a point of [0,1]^d onto the box.
    [[nodiscard]] Vector from_unit(const Vector& u) const;
    [[nodiscard]] Vector to_unit(const Vector& x) const;
};

enum class ConstraintKind { Inequality, Equality };

// Constraint kinds in c(x) = [g(x); h(x)] order: the m inequalities come first.
class ConstraintKinds {
public:
    ConstraintKinds() = default;
    ConstraintKinds(int inequalities, int equalities);
    explicit ConstraintKinds(std::vector<ConstraintKind> kinds);

    [[nodiscard]] int m() const { return m_; }
    [[nodiscard]] int p() const { return p_; }
    [[nodiscard]] int size() const { return m_ + p_; }
    [[nodiscard]] bool is_equality(int j) const { return j >= m_; }
    [[nodiscard]] ConstraintKind operator[](int j) const {
        return is_equality(j) ? ConstraintKind::Equality : ConstraintKind::Inequality;
    }

    friend bool operator==(const ConstraintKinds&, const ConstraintKinds&) = default;

private:
    int m_ = 0;
    int p_ = 0;
};

inline double normal_pdf(double z) {
    constexpr double inv_sqrt_2pi = 0.39894228040143267794;
    return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

inline double normal_cdf(double z) {
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    return 0.5 * std::erfc(-z * inv_sqrt2);
}

// SplitMix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void require_size(const Vector& v, int expected, const std::string& what);

} // namespace slackal
