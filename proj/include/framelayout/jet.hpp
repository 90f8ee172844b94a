#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace framelayout {

/// Forward-mode dual number: a value and its derivative with respect to a
/// fixed set of input slots. An empty derivative vector means "constant", so
/// plain double evaluation pays no allocation cost.
class Jet {
public:
    Jet() = default;
    Jet(double value) : value_(value) {}  // NOLINT(google-explicit-constructor)
    Jet(double value, std::vector<double> derivative) : value_(value), derivative_(std::move(derivative)) {}

    /// Input slot `index` of a `dim`-dimensional gradient space.
    static Jet variable(double value, std::size_t index, std::size_t dim) {
        std::vector<double> d(dim, 0.0);
        d[index] = 1.0;
        return {value, std::move(d)};
    }

    double value() const { return value_; }
    const std::vector<double>& derivative() const { return derivative_; }
    bool is_constant() const { return derivative_.empty(); }
    std::size_t dim() const { return derivative_.size(); }

    /// d/d(slot); zero for constants and out-of-range slots.
    double partial(std::size_t slot) const { return slot < derivative_.size() ? derivative_[slot] : 0.0; }

    Jet& operator+=(const Jet& o) {
        value_ += o.value_;
        accumulate(o.derivative_, 1.0);
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        value_ -= o.value_;
        accumulate(o.derivative_, -1.0);
        return *this;
    }
    Jet& operator*=(const Jet& o) {
        if (&o == this) {
            const Jet copy = o;
            return *this *= copy;
        }
        const double a = value_;
        scale(o.value_);
        accumulate(o.derivative_, a);
        value_ = a * o.value_;
        return *this;
    }
    Jet& operator/=(const Jet& o) {
        if (&o == this) {
            const Jet copy = o;
            return *this /= copy;
        }
        const double inv = 1.0 / o.value_;
        const double q = value_ * inv;
        scale(inv);
        accumulate(o.derivative_, -q * inv);
        value_ = q;
        return *this;
    }

    /// Builds f(x) given f and f'(x) at the current value (chain rule).
    Jet apply(double fx, double dfx) const {
        Jet r(fx);
        if (!derivative_.empty()) {
            r.derivative_.resize(derivative_.size());
            for (std::size_t i = 0; i < derivative_.size(); ++i) {
                r.derivative_[i] = dfx * derivative_[i];
            }
        }
        return r;
    }

private:
    void scale(double s) {
        for (double& x : derivative_) x *= s;
    }
    void accumulate(const std::vector<double>& other, double s) {
        if (other.empty()) return;
        if (derivative_.size() < other.size()) derivative_.resize(other.size(), 0.0);
        for (std::size_t i = 0; i < other.size(); ++i) derivative_[i] += s * other[i];
    }

    double value_ = 0.0;
    std::vector<double> derivative_;
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator*(Jet a, const Jet& b) { return a *= b; }
inline Jet operator/(Jet a, const Jet& b) { return a /= b; }
inline Jet operator-(const Jet& a) { return a.apply(-a.value(), -1.0); }

inline bool operator<(const Jet& a, const Jet& b) { return a.value() < b.value(); }
inline bool operator>(const Jet& a, const Jet& b) { return a.value() > b.value(); }
inline bool operator<=(const Jet& a, const Jet& b) { return a.value() <= b.value(); }
inline bool operator>=(const Jet& a, const Jet& b) { return a.value() >= b.value(); }

inline Jet sin(const Jet& a) { return a.apply(std::sin(a.value()), std::cos(a.value())); }
inline Jet cos(const Jet& a) { return a.apply(std::cos(a.value()), -std::sin(a.value())); }

/// Derivative is defined as 0 at the origin.
inline Jet sqrt(const Jet& a) {
    const double s = std::sqrt(a.value());
    return a.apply(s, s > 0.0 ? 0.5 / s : 0.0);
}

/// Subgradient 0 at the kink.
inline Jet abs(const Jet& a) {
    const double v = a.value();
    return a.apply(std::abs(v), v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0));
}

inline Jet square(const Jet& a) { return a * a; }

/// max(0, z)^2, the squared hinge.
inline Jet hinge_sq(const Jet& z) {
    const double v = z.value();
    if (v <= 0.0) return Jet(0.0);
    return z.apply(v * v, 2.0 * v);
}

/// max(0, z), derivative 0 at the kink.
inline Jet hinge(const Jet& z) {
    const double v = z.value();
    if (v <= 0.0) return Jet(0.0);
    return z.apply(v, 1.0);
}

/// Gradient is 0 at (0, 0).
inline Jet atan2(const Jet& y, const Jet& x) {
    const double yv = y.value();
    const double xv = x.value();
    const double r2 = xv * xv + yv * yv;
    Jet r(std::atan2(yv, xv));
    if (r2 > 0.0) {
        r += y.apply(0.0, xv / r2);
        r += x.apply(0.0, -yv / r2);
    }
    return r;
}

/// Selection (not blending): ties resolve to the first argument.
inline Jet min(const Jet& a, const Jet& b) { return b.value() < a.value() ? b : a; }
inline Jet max(const Jet& a, const Jet& b) { return b.value() > a.value() ? b : a; }

// Plain-double counterparts so scalar-generic geometry resolves the same names.
inline double sin(double a) { return std::sin(a); }
inline double cos(double a) { return std::cos(a); }
inline double sqrt(double a) { return std::sqrt(a); }
inline double abs(double a) { return std::abs(a); }
inline double square(double a) { return a * a; }
inline double hinge_sq(double z) { return z > 0.0 ? z * z : 0.0; }
inline double hinge(double z) { return z > 0.0 ? z : 0.0; }
inline double atan2(double y, double x) { return std::atan2(y, x); }
inline double min(double a, double b) { return b < a ? b : a; }
inline double max(double a, double b) { return b > a ? b : a; }

inline double value_of(double a) { return a; }
inline double value_of(const Jet& a) { return a.value(); }

}  // namespace framelayout
