#include "cgb/jet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cgb {

namespace {

int pack_exponents(const std::array<std::uint8_t, kMaxVars>& alpha) {
    int key = 0;
    for (int i = 0; i < kMaxVars; ++i) key = key * (kMaxDegree + 1) + alpha[i];
    return key;
}

JetTables build_tables(int num_vars) {
    JetTables t;
    t.num_vars = num_vars;

    // Graded lexicographic enumeration: degree classes in increasing order,
    // within a class the first variable varies slowest and descends, so the
    // degree-1 block is e_0, e_1, ..., e_{n-1}.
    for (int d = 0; d <= kMaxDegree; ++d) {
        t.degree_offset[d] = static_cast<int>(t.exponents.size());
        std::array<std::uint8_t, kMaxVars> alpha{};
        auto emit = [&](auto&& self, int pos, int remaining) -> void {
            if (pos == num_vars - 1) {
                alpha[pos] = static_cast<std::uint8_t>(remaining);
                t.exponents.push_back(alpha);
                alpha[pos] = 0;
                return;
            }
            for (int e = remaining; e >= 0; --e) {
                alpha[pos] = static_cast<std::uint8_t>(e);
                self(self, pos + 1, remaining - e);
            }
            alpha[pos] = 0;
        };
        emit(emit, 0, d);
    }
    t.size = static_cast<int>(t.exponents.size());
    t.degree_offset[kMaxDegree + 1] = t.size;

    std::vector<int> lookup(625, -1);
    for (int i = 0; i < t.size; ++i) lookup[pack_exponents(t.exponents[i])] = i;

    t.exponent_degree.resize(t.size);
    t.alpha_factorial.resize(t.size);
    t.raise.resize(t.size);
    for (int i = 0; i < t.size; ++i) {
        int deg = 0;
        double fact = 1.0;
        for (int v = 0; v < num_vars; ++v) {
            deg += t.exponents[i][v];
            for (int k = 2; k <= t.exponents[i][v]; ++k) fact *= k;
        }
        t.exponent_degree[i] = deg;
        t.alpha_factorial[i] = fact;
        for (int v = 0; v < kMaxVars; ++v) {
            if (v >= num_vars || deg == kMaxDegree) {
                t.raise[i][v] = -1;
                continue;
            }
            auto up = t.exponents[i];
            up[v] += 1;
            t.raise[i][v] = static_cast<std::int16_t>(lookup[pack_exponents(up)]);
        }
    }

    for (int a = 0; a < t.size; ++a) {
        for (int b = 0; b < t.size; ++b) {
            if (t.exponent_degree[a] + t.exponent_degree[b] > kMaxDegree) continue;
            auto sum = t.exponents[a];
            for (int v = 0; v < num_vars; ++v) sum[v] += t.exponents[b][v];
            t.products.push_back({static_cast<std::uint16_t>(a),
                                  static_cast<std::uint16_t>(b),
                                  static_cast<std::uint16_t>(lookup[pack_exponents(sum)])});
        }
    }
    std::stable_sort(t.products.begin(), t.products.end(),
                     [&](const JetTables::ProductTerm& x, const JetTables::ProductTerm& y) {
                         int dx = t.exponent_degree[x.a] + t.exponent_degree[x.b];
                         int dy = t.exponent_degree[y.a] + t.exponent_degree[y.b];
                         if (dx != dy) return dx < dy;
                         return x.prod < y.prod;
                     });
    t.product_offset[0] = 0;
    {
        std::size_t i = 0;
        for (int d = 0; d <= kMaxDegree; ++d) {
            while (i < t.products.size() &&
                   t.exponent_degree[t.products[i].a] + t.exponent_degree[t.products[i].b] <= d) {
                ++i;
            }
            t.product_offset[d + 1] = static_cast<int>(i);
        }
    }

    // Prod indices never repeat across degree blocks, so run boundaries are
    // plain value changes in the sorted order.
    for (std::size_t i = 0; i < t.products.size(); ++i) {
        if (i == 0 || t.products[i].prod != t.products[i - 1].prod) {
            t.run_prod.push_back(t.products[i].prod);
            t.run_begin.push_back(static_cast<int>(i));
        }
    }
    t.run_begin.push_back(static_cast<int>(t.products.size()));
    t.run_offset[0] = 0;
    for (int d = 0; d <= kMaxDegree; ++d) {
        int r = t.run_offset[d];
        while (r < static_cast<int>(t.run_prod.size()) && t.run_begin[r] < t.product_offset[d + 1])
            ++r;
        t.run_offset[d + 1] = r;
    }
    return t;
}

} // namespace

int JetTables::index_of(std::span<const int> alpha) const {
    if (static_cast<int>(alpha.size()) != num_vars)
        throw input_error("multi-index length does not match jet variable count");
    int deg = 0;
    for (int v = 0; v < num_vars; ++v) {
        if (alpha[v] < 0) throw input_error("multi-index entries must be nonnegative");
        deg += alpha[v];
    }
    if (deg > kMaxDegree) return -1;
    for (int i = degree_offset[deg]; i < degree_offset[deg + 1]; ++i) {
        bool match = true;
        for (int v = 0; v < num_vars; ++v) {
            if (exponents[i][v] != alpha[v]) { match = false; break; }
        }
        if (match) return i;
    }
    return -1;
}

const JetTables& jet_tables(int num_vars) {
    static const std::array<JetTables, kMaxVars> all = {
        build_tables(1), build_tables(2), build_tables(3), build_tables(4)};
    if (num_vars < 1 || num_vars > kMaxVars)
        throw input_error("jet variable count must be between 1 and 4");
    return all[num_vars - 1];
}

Jet::Jet(int num_vars, int degree)
    : num_vars_(static_cast<std::int8_t>(num_vars)), degree_(static_cast<std::int8_t>(degree)) {
    if (num_vars < 1 || num_vars > kMaxVars)
        throw input_error("jet variable count must be between 1 and 4");
    if (degree < 0 || degree > kMaxDegree)
        throw input_error("jet degree must be between 0 and 4");
    c_.fill(0.0);
}

Jet Jet::constant(double value, int num_vars, int degree) {
    Jet j(num_vars, degree);
    j.c_[0] = value;
    return j;
}

Jet Jet::variable(int axis, double value, int num_vars, int degree) {
    Jet j(num_vars, degree);
    if (axis < 0 || axis >= num_vars)
        throw input_error("jet variable axis out of range");
    j.c_[0] = value;
    if (degree >= 1) j.c_[1 + axis] = 1.0;
    return j;
}

double Jet::coeff(std::span<const int> alpha) const {
    const JetTables& t = jet_tables(num_vars_);
    int i = t.index_of(alpha);
    if (i < 0 || t.exponent_degree[i] > degree_) return 0.0;
    return c_[i];
}

double Jet::partial(std::span<const int> alpha) const {
    const JetTables& t = jet_tables(num_vars_);
    int i = t.index_of(alpha);
    if (i < 0 || t.exponent_degree[i] > degree_) return 0.0;
    return t.alpha_factorial[i] * c_[i];
}

Jet Jet::derivative(int axis) const {
    if (axis < 0 || axis >= num_vars_)
        throw input_error("derivative axis out of range");
    const JetTables& t = jet_tables(num_vars_);
    Jet r(num_vars_, std::max(0, degree_ - 1));
    int n = r.size();
    for (int i = 0; i < n; ++i) {
        int up = t.raise[i][axis];
        if (up >= 0) r.c_[i] = c_[up] * t.exponents[up][axis];
    }
    return r;
}

Jet Jet::truncated(int degree) const {
    if (degree > degree_)
        throw input_error("cannot truncate a jet to a higher degree");
    Jet r(num_vars_, degree);
    std::copy(c_.begin(), c_.begin() + r.size(), r.c_.begin());
    return r;
}

Jet Jet::restricted(std::span<const int> keep_axes) const {
    int m = static_cast<int>(keep_axes.size());
    if (m < 1 || m > num_vars_)
        throw input_error("restriction must keep between 1 and num_vars axes");
    std::array<bool, kMaxVars> seen{};
    for (int a : keep_axes) {
        if (a < 0 || a >= num_vars_) throw input_error("restriction axis out of range");
        if (seen[a]) throw input_error("restriction axes must be distinct");
        seen[a] = true;
    }
    const JetTables& t_old = jet_tables(num_vars_);
    const JetTables& t_new = jet_tables(m);
    Jet r(m, degree_);
    for (int i = 0; i < size(); ++i) {
        bool tangential = true;
        for (int v = 0; v < num_vars_; ++v) {
            if (!seen[v] && t_old.exponents[i][v] != 0) { tangential = false; break; }
        }
        if (!tangential) continue;
        std::array<int, kMaxVars> alpha{};
        for (int j = 0; j < m; ++j) alpha[j] = t_old.exponents[i][keep_axes[j]];
        r.c_[t_new.index_of(std::span<const int>(alpha.data(), m))] = c_[i];
    }
    return r;
}

void Jet::require_same_shape(const Jet& other) const {
    if (num_vars_ != other.num_vars_)
        throw input_error("jet variable counts do not match");
}

Jet Jet::operator-() const {
    Jet r(num_vars_, degree_);
    int n = size();
    for (int i = 0; i < n; ++i) r.c_[i] = -c_[i];
    return r;
}

Jet& Jet::operator+=(const Jet& rhs) {
    require_same_shape(rhs);
    int old_n = size();
    degree_ = std::min(degree_, rhs.degree_);
    int n = size();
    for (int i = 0; i < n; ++i) c_[i] += rhs.c_[i];
    std::fill(c_.begin() + n, c_.begin() + old_n, 0.0);
    return *this;
}

Jet& Jet::operator-=(const Jet& rhs) {
    require_same_shape(rhs);
    int old_n = size();
    degree_ = std::min(degree_, rhs.degree_);
    int n = size();
    for (int i = 0; i < n; ++i) c_[i] -= rhs.c_[i];
    std::fill(c_.begin() + n, c_.begin() + old_n, 0.0);
    return *this;
}

Jet& Jet::operator*=(double rhs) {
    int n = size();
    for (int i = 0; i < n; ++i) c_[i] *= rhs;
    return *this;
}

namespace {

// One register-accumulated dot product per output coefficient; the run layout
// keeps the result array out of the dependency chain.
inline void accumulate_runs(double* __restrict out, const double* __restrict ca,
                            const double* __restrict cb, const JetTables& t, int degree,
                            double sign) {
    const JetTables::ProductTerm* __restrict terms = t.products.data();
    const int* __restrict begin = t.run_begin.data();
    const std::uint16_t* __restrict prod = t.run_prod.data();
    int runs = t.run_offset[degree + 1];
    for (int r = 0; r < runs; ++r) {
        double acc = 0.0;
        for (int i = begin[r]; i < begin[r + 1]; ++i) acc += ca[terms[i].a] * cb[terms[i].b];
        out[prod[r]] += sign * acc;
    }
}

} // namespace

Jet operator*(const Jet& a, const Jet& b) {
    a.require_same_shape(b);
    const JetTables& t = jet_tables(a.num_vars());
    Jet r(a.num_vars(), std::min(a.degree(), b.degree()));
    accumulate_runs(r.c_.data(), a.c_.data(), b.c_.data(), t, r.degree(), 1.0);
    return r;
}

void Jet::add_product(const Jet& a, const Jet& b) {
    require_same_shape(a);
    require_same_shape(b);
    if (a.degree_ < degree_ || b.degree_ < degree_)
        throw input_error("add_product operands must carry at least the target degree");
    accumulate_runs(c_.data(), a.c_.data(), b.c_.data(), jet_tables(num_vars_), degree_, 1.0);
}

void Jet::sub_product(const Jet& a, const Jet& b) {
    require_same_shape(a);
    require_same_shape(b);
    if (a.degree_ < degree_ || b.degree_ < degree_)
        throw input_error("sub_product operands must carry at least the target degree");
    accumulate_runs(c_.data(), a.c_.data(), b.c_.data(), jet_tables(num_vars_), degree_, -1.0);
}

Jet compose_univariate(std::span<const double> series, const Jet& arg) {
    if (static_cast<int>(series.size()) < arg.degree() + 1)
        throw input_error("composition series too short for jet degree");
    Jet t = arg;
    t.c_[0] = 0.0;
    Jet r = Jet::constant(series[arg.degree()], arg.num_vars(), arg.degree());
    for (int k = arg.degree() - 1; k >= 0; --k) {
        r = r * t;
        r.c_[0] += series[k];
    }
    return r;
}

Jet jet_inverse(const Jet& a) {
    double v = a.value();
    if (v == 0.0)
        throw numerical_error("cannot invert a jet with zero constant term");
    std::array<double, kMaxDegree + 1> series;
    double p = 1.0 / v;
    for (int k = 0; k <= a.degree(); ++k) {
        series[k] = p;
        p *= -1.0 / v;
    }
    return compose_univariate(std::span<const double>(series.data(), a.degree() + 1), a);
}

Jet operator/(const Jet& a, const Jet& b) { return a * jet_inverse(b); }

Jet operator/(double a, const Jet& b) {
    Jet r = jet_inverse(b);
    r *= a;
    return r;
}

Jet exp(const Jet& a) {
    std::array<double, kMaxDegree + 1> series;
    double e = std::exp(a.value());
    double fact = 1.0;
    for (int k = 0; k <= a.degree(); ++k) {
        if (k > 0) fact *= k;
        series[k] = e / fact;
    }
    return compose_univariate(std::span<const double>(series.data(), a.degree() + 1), a);
}

Jet log(const Jet& a) {
    double v = a.value();
    if (v <= 0.0)
        throw numerical_error("log of a jet with nonpositive constant term");
    std::array<double, kMaxDegree + 1> series;
    series[0] = std::log(v);
    double p = 1.0 / v;
    for (int k = 1; k <= a.degree(); ++k) {
        series[k] = ((k % 2 == 1) ? 1.0 : -1.0) * p / k;
        p /= v;
    }
    return compose_univariate(std::span<const double>(series.data(), a.degree() + 1), a);
}

Jet sin(const Jet& a) {
    double s = std::sin(a.value());
    double c = std::cos(a.value());
    std::array<double, 4> cycle = {s, c, -s, -c};
    std::array<double, kMaxDegree + 1> series;
    double fact = 1.0;
    for (int k = 0; k <= a.degree(); ++k) {
        if (k > 0) fact *= k;
        series[k] = cycle[k % 4] / fact;
    }
    return compose_univariate(std::span<const double>(series.data(), a.degree() + 1), a);
}

Jet cos(const Jet& a) {
    double s = std::sin(a.value());
    double c = std::cos(a.value());
    std::array<double, 4> cycle = {c, -s, -c, s};
    std::array<double, kMaxDegree + 1> series;
    double fact = 1.0;
    for (int k = 0; k <= a.degree(); ++k) {
        if (k > 0) fact *= k;
        series[k] = cycle[k % 4] / fact;
    }
    return compose_univariate(std::span<const double>(series.data(), a.degree() + 1), a);
}

Jet sqrt(const Jet& a) {
    double v = a.value();
    if (v <= 0.0)
        throw numerical_error("sqrt of a jet with nonpositive constant term");
    std::array<double, kMaxDegree + 1> series;
    double root = std::sqrt(v);
    // series[k] = sqrt(v) * binom(1/2, k) / v^k
    double coeff = root;
    series[0] = coeff;
    for (int k = 1; k <= a.degree(); ++k) {
        coeff *= (0.5 - (k - 1)) / (k * v);
        series[k] = coeff;
    }
    return compose_univariate(std::span<const double>(series.data(), a.degree() + 1), a);
}

Jet powi(const Jet& a, int n) {
    if (n < 0) return jet_inverse(powi(a, -n));
    Jet r = Jet::constant(1.0, a.num_vars(), a.degree());
    Jet base = a;
    int e = n;
    while (e > 0) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

double max_coeff_delta(const Jet& a, const Jet& b) {
    if (a.num_vars() != b.num_vars())
        throw input_error("jet variable counts do not match");
    int n = jet_tables(a.num_vars()).degree_offset[std::min(a.degree(), b.degree()) + 1];
    double m = 0.0;
    for (int i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

std::string Jet::to_string() const {
    const JetTables& t = jet_tables(num_vars_);
    std::ostringstream out;
    out << "jet(deg " << int(degree_) << ")";
    bool any = false;
    for (int i = 0; i < size(); ++i) {
        if (c_[i] == 0.0) continue;
        out << (any ? " + " : ": ") << c_[i];
        any = true;
        for (int v = 0; v < num_vars_; ++v) {
            int e = t.exponents[i][v];
            if (e == 0) continue;
            out << "*x" << (v + 1);
            if (e > 1) out << "^" << e;
        }
    }
    if (!any) out << ": 0";
    return out.str();
}

} // namespace cgb
