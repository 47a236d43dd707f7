#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cgb/errors.hpp"

namespace cgb {

inline constexpr int kMaxVars = 4;
inline constexpr int kMaxDegree = 4;
inline constexpr int kMaxCoeffs = 70; // multi-indices with |alpha| <= 4 in 4 variables

/// Shared lookup tables for truncated Taylor arithmetic in a fixed number of
/// variables. Multi-indices are enumerated in graded lexicographic order, so
/// the indices of total degree <= d always form a prefix of the table; a
/// truncated product only touches the precomputed (a,b,prod) triples whose
/// total degree fits.
struct JetTables {
    int num_vars = 0;
    int size = 0; // number of multi-indices with |alpha| <= kMaxDegree

    // degree_offset[d] = first table index of total degree d;
    // degree_offset[kMaxDegree + 1] = size.
    std::array<int, kMaxDegree + 2> degree_offset{};

    std::vector<std::array<std::uint8_t, kMaxVars>> exponents;
    std::vector<int> exponent_degree;
    std::vector<double> alpha_factorial; // prod_i alpha_i!

    struct ProductTerm {
        std::uint16_t a, b, prod;
    };
    // Triples sorted by deg(a) + deg(b), then by prod. Monomial degrees add,
    // so each prod lives in exactly one degree block and its terms form a
    // contiguous run. product_offset[d + 1] bounds the prefix with total
    // degree <= d.
    std::vector<ProductTerm> products;
    std::array<int, kMaxDegree + 2> product_offset{};

    // Run r covers products[run_begin[r] .. run_begin[r + 1]) and accumulates
    // into the single coefficient run_prod[r]. run_offset[d + 1] bounds the
    // runs whose output degree is <= d.
    std::vector<std::uint16_t> run_prod;
    std::vector<int> run_begin;
    std::array<int, kMaxDegree + 2> run_offset{};

    // raise[i][axis] = index of alpha_i + e_axis, or -1 if that leaves the table.
    std::vector<std::array<std::int16_t, kMaxVars>> raise;

    int index_of(std::span<const int> alpha) const; // -1 if absent
};

const JetTables& jet_tables(int num_vars);

/// Truncated multivariate Taylor expansion of a scalar field about an
/// implicit base point: coefficient c_alpha multiplies prod_i (x_i - p_i)^alpha_i.
/// Arithmetic is exact truncation at min(degree) of the operands, which is the
/// highest order to which the result is meaningful. Values are immutable in
/// spirit: every operation returns a fresh jet.
class Jet {
public:
    Jet() : num_vars_(1), degree_(0) { c_.fill(0.0); }
    Jet(int num_vars, int degree);

    static Jet constant(double value, int num_vars, int degree);
    /// Jet of the coordinate function x_axis (axis is 0-based) with the given
    /// base-point value.
    static Jet variable(int axis, double value, int num_vars, int degree);

    int num_vars() const { return num_vars_; }
    int degree() const { return degree_; }
    int size() const { return jet_tables(num_vars_).degree_offset[degree_ + 1]; }
    double value() const { return c_[0]; }

    double operator[](int i) const { return c_[i]; }
    double& operator[](int i) { return c_[i]; }

    double coeff(std::span<const int> alpha) const;
    /// partial derivative d^alpha f at the base point = alpha! * coeff(alpha).
    double partial(std::span<const int> alpha) const;
    double coeff(std::initializer_list<int> alpha) const {
        return coeff(std::span<const int>(alpha.begin(), alpha.size()));
    }
    double partial(std::initializer_list<int> alpha) const {
        return partial(std::span<const int>(alpha.begin(), alpha.size()));
    }

    /// Jet of d f / d x_axis, known to one degree less.
    Jet derivative(int axis) const;
    /// Same coefficients up to the new (lower or equal) degree.
    Jet truncated(int degree) const;
    /// Restriction to the slice through the base point spanned by keep_axes:
    /// drops every coefficient with a nonzero exponent on a removed axis and
    /// renumbers the kept axes in the given order.
    Jet restricted(std::span<const int> keep_axes) const;
    Jet restricted(std::initializer_list<int> keep_axes) const {
        return restricted(std::span<const int>(keep_axes.begin(), keep_axes.size()));
    }

    Jet operator-() const;
    Jet& operator+=(const Jet& rhs);
    Jet& operator-=(const Jet& rhs);
    Jet& operator+=(double rhs) { c_[0] += rhs; return *this; }
    Jet& operator-=(double rhs) { c_[0] -= rhs; return *this; }
    Jet& operator*=(double rhs);

    friend Jet operator+(Jet a, const Jet& b) { a += b; return a; }
    friend Jet operator-(Jet a, const Jet& b) { a -= b; return a; }
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator/(const Jet& a, const Jet& b);

    friend Jet operator+(Jet a, double b) { a += b; return a; }
    friend Jet operator+(double a, Jet b) { b += a; return b; }
    friend Jet operator-(Jet a, double b) { a -= b; return a; }
    friend Jet operator-(double a, const Jet& b) { Jet r = -b; r += a; return r; }
    friend Jet operator*(Jet a, double b) { a *= b; return a; }
    friend Jet operator*(double a, Jet b) { b *= a; return b; }
    friend Jet operator/(Jet a, double b) { a *= 1.0 / b; return a; }
    friend Jet operator/(double a, const Jet& b);

    /// r += a * b without a temporary; shapes must match r's.
    void add_product(const Jet& a, const Jet& b);
    /// r -= a * b.
    void sub_product(const Jet& a, const Jet& b);

    std::string to_string() const;

private:
    friend Jet jet_inverse(const Jet&);
    friend Jet compose_univariate(std::span<const double> series, const Jet& arg);

    void require_same_shape(const Jet& other) const;

    std::array<double, kMaxCoeffs> c_{};
    std::int8_t num_vars_;
    std::int8_t degree_;
};

/// 1 / a by composition of the geometric series about a's constant term.
/// Requires a nonzero constant term.
Jet jet_inverse(const Jet& a);

/// f(a) where series[k] = f^(k)(a.value()) / k!; Horner evaluation in the
/// nilpotent part of a. series must cover k = 0..a.degree().
Jet compose_univariate(std::span<const double> series, const Jet& arg);

Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet sqrt(const Jet& a);
/// Integer power by binary exponentiation (exact for polynomials); negative
/// exponents go through jet_inverse.
Jet powi(const Jet& a, int n);

/// Largest absolute coefficient difference over the common degree.
double max_coeff_delta(const Jet& a, const Jet& b);

} // namespace cgb
