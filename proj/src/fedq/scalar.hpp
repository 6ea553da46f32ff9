#ifndef FEDQ_SCALAR_HPP
#define FEDQ_SCALAR_HPP

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace fedq {

struct ScalarError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact element of Q(i): a + b*i with arbitrary-precision rational a, b.
class RationalComplex {
  public:
    RationalComplex() : re_(0), im_(0) {}
    RationalComplex(long v) : re_(v), im_(0) {}
    RationalComplex(const mpq_class& re, const mpq_class& im) : re_(re), im_(im) {
        re_.canonicalize();
        im_.canonicalize();
    }

    static RationalComplex from_ratio(long p, long q) {
        if (q == 0) throw ScalarError("rational with zero denominator");
        mpq_class r(p, q);
        r.canonicalize();
        return RationalComplex(r, mpq_class(0));
    }
    static RationalComplex i() { return RationalComplex(mpq_class(0), mpq_class(1)); }

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }

    bool is_zero() const { return re_ == 0 && im_ == 0; }
    bool is_real() const { return im_ == 0; }

    RationalComplex conj() const { return RationalComplex(re_, -im_); }

    RationalComplex operator-() const { return RationalComplex(-re_, -im_); }
    RationalComplex& operator+=(const RationalComplex& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    RationalComplex& operator-=(const RationalComplex& o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    RationalComplex& operator*=(const RationalComplex& o) {
        mpq_class r = re_ * o.re_ - im_ * o.im_;
        mpq_class i = re_ * o.im_ + im_ * o.re_;
        re_ = r;
        im_ = i;
        return *this;
    }
    RationalComplex& operator/=(const RationalComplex& o) {
        mpq_class n = o.re_ * o.re_ + o.im_ * o.im_;
        if (n == 0) throw ScalarError("division by zero scalar");
        mpq_class r = (re_ * o.re_ + im_ * o.im_) / n;
        mpq_class i = (im_ * o.re_ - re_ * o.im_) / n;
        re_ = r;
        im_ = i;
        return *this;
    }

    friend RationalComplex operator+(RationalComplex a, const RationalComplex& b) { return a += b; }
    friend RationalComplex operator-(RationalComplex a, const RationalComplex& b) { return a -= b; }
    friend RationalComplex operator*(RationalComplex a, const RationalComplex& b) { return a *= b; }
    friend RationalComplex operator/(RationalComplex a, const RationalComplex& b) { return a /= b; }
    friend bool operator==(const RationalComplex& a, const RationalComplex& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const RationalComplex& a, const RationalComplex& b) { return !(a == b); }

    double abs() const {
        return std::hypot(re_.get_d(), im_.get_d());
    }

    // Canonical text form "p/q+r/s i" (denominator 1 printed bare).
    std::string str() const;
    static RationalComplex parse(const std::string& text);

  private:
    mpq_class re_, im_;
};

// Double-precision complex with tolerance-based equality.
class ApproxComplex {
  public:
    static constexpr double kEps = 1e-9;

    ApproxComplex() : z_(0.0, 0.0) {}
    ApproxComplex(long v) : z_(double(v), 0.0) {}
    explicit ApproxComplex(std::complex<double> z) : z_(z) {}
    ApproxComplex(double re, double im) : z_(re, im) {}

    static ApproxComplex from_ratio(long p, long q) {
        if (q == 0) throw ScalarError("rational with zero denominator");
        return ApproxComplex(double(p) / double(q), 0.0);
    }
    static ApproxComplex i() { return ApproxComplex(0.0, 1.0); }

    std::complex<double> value() const { return z_; }

    bool is_zero() const { return std::abs(z_) <= kEps; }
    bool is_real() const { return std::abs(z_.imag()) <= kEps; }

    ApproxComplex conj() const { return ApproxComplex(std::conj(z_)); }

    ApproxComplex operator-() const { return ApproxComplex(-z_); }
    ApproxComplex& operator+=(const ApproxComplex& o) {
        z_ += o.z_;
        return *this;
    }
    ApproxComplex& operator-=(const ApproxComplex& o) {
        z_ -= o.z_;
        return *this;
    }
    ApproxComplex& operator*=(const ApproxComplex& o) {
        z_ *= o.z_;
        return *this;
    }
    ApproxComplex& operator/=(const ApproxComplex& o) {
        if (std::abs(o.z_) == 0.0) throw ScalarError("division by zero scalar");
        z_ /= o.z_;
        return *this;
    }

    friend ApproxComplex operator+(ApproxComplex a, const ApproxComplex& b) { return a += b; }
    friend ApproxComplex operator-(ApproxComplex a, const ApproxComplex& b) { return a -= b; }
    friend ApproxComplex operator*(ApproxComplex a, const ApproxComplex& b) { return a *= b; }
    friend ApproxComplex operator/(ApproxComplex a, const ApproxComplex& b) { return a /= b; }
    friend bool operator==(const ApproxComplex& a, const ApproxComplex& b) {
        return std::abs(a.z_ - b.z_) <= kEps;
    }
    friend bool operator!=(const ApproxComplex& a, const ApproxComplex& b) { return !(a == b); }

    double abs() const { return std::abs(z_); }

    std::string str() const;
    static ApproxComplex parse(const std::string& text);

  private:
    std::complex<double> z_;
};

// Uniform construction hooks used by the templated containers.
template <class S>
struct ScalarOps;

template <>
struct ScalarOps<RationalComplex> {
    static constexpr const char* name = "exact";
    static RationalComplex zero() { return RationalComplex(); }
    static RationalComplex one() { return RationalComplex(1); }
    static RationalComplex i() { return RationalComplex::i(); }
    static RationalComplex ratio(long p, long q) { return RationalComplex::from_ratio(p, q); }
    static RationalComplex integer(long v) { return RationalComplex(v); }
    // Exact integrality: v == i*m for an integer m; returns true and sets m.
    static bool as_i_times_integer(const RationalComplex& v, long& m) {
        if (v.re() != 0) return false;
        if (v.im().get_den() != 1) return false;
        if (!v.im().get_num().fits_slong_p()) return false;
        m = v.im().get_num().get_si();
        return true;
    }
};

template <>
struct ScalarOps<ApproxComplex> {
    static constexpr const char* name = "approx";
    static ApproxComplex zero() { return ApproxComplex(); }
    static ApproxComplex one() { return ApproxComplex(1); }
    static ApproxComplex i() { return ApproxComplex::i(); }
    static ApproxComplex ratio(long p, long q) { return ApproxComplex::from_ratio(p, q); }
    static ApproxComplex integer(long v) { return ApproxComplex(v); }
    static bool as_i_times_integer(const ApproxComplex& v, long& m) {
        if (std::abs(v.value().real()) > ApproxComplex::kEps) return false;
        double im = v.value().imag();
        double r = std::round(im);
        if (std::abs(im - r) > ApproxComplex::kEps) return false;
        m = long(r);
        return true;
    }
};

}  // namespace fedq

#endif
